//! Linear Strichartz boundedness on random data and the running
//! space-time norm monitor for the scattering criterion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::norms::{
    mixed_norm_from_series, select, strichartz_norm_of_samples, strichartz_series, FamilyKind, NormSpec,
    StrichartzFamily,
};
use crate::rational::{to_f64, Q};
use crate::regime::{critical_index, Criticality, ProblemParams};
use crate::solver::{InitialData, Trajectory};
use crate::spectral::{free_propagator, sobolev_seminorm, Grid};

/// Frozen bound on max/min of the empirical Strichartz constants.
pub const SPREAD_THRESHOLD: f64 = 50.0;
/// Relative growth over the last quarter window counted as a plateau.
pub const PLATEAU_TOL: f64 = 0.01;
const TIME_SAMPLES: usize = 200;
const FAMILY_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzProbeReport {
    pub s: Q,
    /// Per trial: `(σ, c, k)` of the random datum and its ratio.
    pub trials: Vec<(InitialData, f64)>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl StrichartzProbeReport {
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }

    pub fn passes(&self) -> bool {
        self.spread() <= SPREAD_THRESHOLD
    }
}

/// Ratios `‖e^{itΔ²}f‖_{B(Ḣ^s; [0,1])} / ‖f‖_{Ḣ^s}` over random modulated
/// Gaussians `f` drawn from a seeded stream, with the default family at `s`
/// and the exact free flow sampled at 201 times.
pub fn strichartz_probe(grid: &Grid, s: &Q, trials: usize, seed: u64) -> Result<StrichartzProbeReport> {
    if trials < 10 {
        return Err(Error::Precondition(vec![format!("trials >= 10 [{trials}]")]));
    }
    let family = StrichartzFamily::default_family(grid.dim() as u32, s, FamilyKind::Sup, FAMILY_SIZE)?;
    let sf = to_f64(s);
    let quarter = grid.box_length() / 8.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let sigma = rng.random_range(0.5..2.0);
        let mut center = [0.0; 3];
        let mut wavevector = [0.0; 3];
        for a in 0..grid.dim() {
            center[a] = rng.random_range(-quarter..quarter);
            wavevector[a] = rng.random_range(-2.0..2.0);
        }
        let data = InitialData::modulated(1.0, sigma, center, wavevector);
        data.check_resolvable(grid)?;
        let f = data.sample(grid);
        let denom = sobolev_seminorm(&f, sf)?;
        if denom == 0.0 {
            continue;
        }
        let samples = (0..=TIME_SAMPLES)
            .map(|k| free_propagator(&f, k as f64 / TIME_SAMPLES as f64))
            .collect::<Result<Vec<_>>>()?;
        let v = strichartz_norm_of_samples(&samples, &family, 0.0, 1.0)?;
        out.push((data, v.value / denom));
    }
    if out.is_empty() {
        return Err(Error::Domain("every trial had zero Ḣ^s norm".into()));
    }
    let mut sorted: Vec<f64> = out.iter().map(|t| t.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    Ok(StrichartzProbeReport { s: s.clone(), min: sorted[0], median, max: sorted[sorted.len() - 1], trials: out })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringReport {
    pub s_c: Q,
    pub times: Vec<f64>,
    /// Family surrogate of `‖u‖_{B(Ḣ^{s_c}; [0,T])}` at each sample time `T`.
    pub running_norm: Vec<f64>,
    pub h2_sup: f64,
    /// Relative growth of the running norm over `[3T/4, T]`.
    pub last_quarter_growth: f64,
    pub plateau: bool,
}

/// Running `B(Ḣ^{s_c})` surrogate and `sup_t ‖u(t)‖_{H²}`. Reports an
/// indication only: a plateau on a finite window does not establish the
/// infinite-time hypothesis.
pub fn scattering_monitor(traj: &Trajectory, params: &ProblemParams) -> Result<ScatteringReport> {
    let rep = critical_index(params);
    if rep.klass != Criticality::Intercritical {
        return Err(Error::WrongRegime(format!("scattering monitor needs 0 < s_c < 2 (s_c = {})", rep.s_c)));
    }
    let family = StrichartzFamily::default_family(params.dim(), &rep.s_c, FamilyKind::Sup, FAMILY_SIZE)?;
    let times = traj.times();
    let series = strichartz_series(&traj.samples, &family)?;
    let t0 = times[0];
    let mut running_norm = Vec::with_capacity(times.len());
    for &t in &times {
        let per_pair = family
            .pairs()
            .iter()
            .zip(&series)
            .map(|(p, (qe, re, spatial))| {
                let v = mixed_norm_from_series(&times, spatial, &NormSpec::new(qe.clone(), re.clone(), t0, t))?;
                Ok((p.clone(), v))
            })
            .collect::<Result<Vec<_>>>()?;
        running_norm.push(select(FamilyKind::Sup, per_pair).value);
    }
    let h2_sup = traj.diagnostics.iter().map(|d| d.h2_norm).fold(0.0, f64::max);
    let t_end = *times.last().expect("nonempty");
    let t_q = t0 + 0.75 * (t_end - t0);
    let k = times.iter().position(|&t| t >= t_q).unwrap_or(times.len() - 1);
    let last = *running_norm.last().expect("nonempty");
    let last_quarter_growth = if last == 0.0 { 0.0 } else { (last - running_norm[k]) / last };
    Ok(ScatteringReport {
        s_c: rep.s_c,
        times,
        running_norm,
        h2_sup,
        plateau: last_quarter_growth <= PLATEAU_TOL,
        last_quarter_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::regime::Lambda;
    use crate::solver::{evolve, SolverConfig};
    use crate::spectral::ComplexField;
    use num_traits::Zero;

    #[test]
    fn probe_needs_ten_trials() {
        let g = Grid::new(1, 512, 200.0).unwrap();
        assert!(strichartz_probe(&g, &Q::zero(), 9, 1).is_err());
    }

    #[test]
    fn probe_is_seed_deterministic() {
        let g = Grid::new(1, 1024, 200.0).unwrap();
        let a = strichartz_probe(&g, &Q::zero(), 10, 5).unwrap();
        let b = strichartz_probe(&g, &Q::zero(), 10, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.min > 0.0 && a.min <= a.median && a.median <= a.max);
    }

    #[test]
    fn monitor_rejects_non_intercritical() {
        let p = ProblemParams::new(1, q(1, 2), int(3), Lambda::Defocusing).unwrap();
        let g = Grid::new(1, 64, 20.0).unwrap();
        let cfg = SolverConfig::new(p.clone(), g, 0.01, 0.05).unwrap();
        let traj = evolve(&ComplexField::zeros(g), &cfg).unwrap();
        assert!(matches!(scattering_monitor(&traj, &p), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn zero_solution_plateaus() {
        let p = ProblemParams::new(1, q(1, 2), int(14), Lambda::Defocusing).unwrap();
        let g = Grid::new(1, 64, 20.0).unwrap();
        let cfg = SolverConfig::new(p.clone(), g, 0.01, 0.05).unwrap();
        let traj = evolve(&ComplexField::zeros(g), &cfg).unwrap();
        let rep = scattering_monitor(&traj, &p).unwrap();
        assert!(rep.plateau);
        assert!(rep.running_norm.iter().all(|&v| v == 0.0));
        assert_eq!(rep.s_c, q(1, 4));
    }
}
