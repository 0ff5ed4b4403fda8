//! Numerical harnesses for the identities and estimates around the
//! equation: conservation, scaling covariance, pointwise and functional
//! inequalities, Strichartz boundedness, scattering monitoring and
//! stability under forcing.
//!
//! Inequalities with unspecified constants are tested as boundedness of an
//! empirical constant against a frozen threshold.

mod estimates;
mod perturb;
mod strichartz;

pub use estimates::{
    gradient_estimate_probe, hl_gn_function_probe, pointwise_estimate_probe, FunctionInequality, FunctionProbeReport,
    GradientReport, PointwiseReport, DEFAULT_GRADIENT_THRESHOLD, FLATNESS_TOL, PROBE_SIGMAS,
};
pub use perturb::{
    b_surrogate, fit_slope, perturbation_experiment, perturbation_run, ForcingFn, PerturbationConfig,
    PerturbationDistance, PerturbationReport, DEFAULT_LADDER,
};
pub use strichartz::{
    scattering_monitor, strichartz_probe, ScatteringReport, StrichartzProbeReport, PLATEAU_TOL, SPREAD_THRESHOLD,
};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};
use crate::regime::ProblemParams;
use crate::solver::{evolve, InitialData, SolverConfig, Trajectory};
use crate::spectral::{fourier_resample_onto, sobolev_seminorm, Grid};

/// Static scaling errors at or below this level are roundoff; doubling the
/// resolution cannot shrink them further.
pub const STATIC_ROUNDOFF: f64 = 1e-14;

/// Error `fine` at doubled resolution is at most a quarter of `coarse`, or
/// both are at roundoff.
pub fn static_scaling_converges(coarse: f64, fine: f64) -> bool {
    fine <= (coarse / 4.0).max(STATIC_ROUNDOFF)
}

/// Below this `|E[u₀]|` the energy drift is absolute instead of relative.
pub const ENERGY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub mass_drift: f64,
    pub energy_drift: f64,
}

/// Drifts are the max deviation from the `t = 0` values, relative to them.
pub fn conservation_probe(traj: &Trajectory) -> ConservationReport {
    let d = &traj.diagnostics;
    let times: Vec<f64> = d.iter().map(|x| x.t).collect();
    let mass: Vec<f64> = d.iter().map(|x| x.mass).collect();
    let energy: Vec<f64> = d.iter().map(|x| x.energy).collect();
    let drift = |v: &[f64], floor: f64| {
        let base = v[0];
        let denom = if base.abs() < floor { 1.0 } else { base.abs() };
        v.iter().map(|x| (x - base).abs() / denom).fold(0.0, f64::max)
    };
    let mass_drift = drift(&mass, f64::MIN_POSITIVE);
    let energy_drift = drift(&energy, ENERGY_FLOOR);
    ConservationReport { times, mass, energy, mass_drift, energy_drift }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCheckConfig {
    pub mu: f64,
    pub s: Q,
    pub t_probe: f64,
}

impl ScalingCheckConfig {
    pub fn new(mu: f64, s: Q, t_probe: f64) -> Result<Self> {
        let cfg = Self { mu, s, t_probe };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidParams(format!("mu must be positive (got {})", self.mu)));
        }
        if !(self.t_probe.is_finite() && self.t_probe >= 0.0) {
            return Err(Error::InvalidParams(format!("t_probe must be >= 0 (got {})", self.t_probe)));
        }
        Ok(())
    }
}

/// Relative error of `‖u_{0,μ}‖_{Ḣ^s} = μ^{s - N/2 + (4-b)/α} ‖u₀‖_{Ḣ^s}`,
/// with `u_{0,μ} = μ^{(4-b)/α} u₀(μ·)` re-evaluated from the generator.
pub fn static_scaling_check(
    data: &InitialData,
    grid: &Grid,
    params: &ProblemParams,
    cfg: &ScalingCheckConfig,
) -> Result<f64> {
    cfg.validate()?;
    let power = to_f64(&params.scaling_power());
    let scaled = data.scaled(cfg.mu, power);
    data.check_resolvable(grid)?;
    scaled.check_resolvable(grid)?;
    let s = to_f64(&cfg.s);
    let base = sobolev_seminorm(&data.sample(grid), s)?;
    if base == 0.0 {
        return Err(Error::Domain("data has zero Ḣ^s seminorm".into()));
    }
    let lhs = sobolev_seminorm(&scaled.sample(grid), s)?;
    let exponent = s - grid.dim() as f64 / 2.0 + power;
    Ok((lhs - cfg.mu.powf(exponent) * base).abs() / base)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicScalingReport {
    pub mismatch: f64,
    /// Grid of the unscaled run: same `M`, box `μL`, so its nodes are `μ`
    /// times those of the scaled run.
    pub base_grid: Grid,
    pub base_time: f64,
    pub scaled_time: f64,
}

/// Evolves `u₀` on the conjugate grid to `μ⁴ t_probe` and `u_{0,μ}` on
/// `solver.grid` to `t_probe`, both with `solver.dt`, and returns the
/// relative `L²` distance between `μ^{(4-b)/α} u(μ⁴t, μ·)` and the scaled
/// run. The regularization of the base run is `μδ`, the conjugate of `δ`.
pub fn dynamic_scaling_check(
    data: &InitialData,
    cfg: &ScalingCheckConfig,
    solver: &SolverConfig,
) -> Result<DynamicScalingReport> {
    cfg.validate()?;
    solver.validate()?;
    if cfg.t_probe <= 0.0 {
        return Err(Error::InvalidParams("dynamic scaling needs t_probe > 0".into()));
    }
    let mu = cfg.mu;
    let power = to_f64(&solver.params.scaling_power());
    let scaled_data = data.scaled(mu, power);
    let g = solver.grid;
    let base_grid = Grid::with_offset(g.dim(), g.points_per_axis(), mu * g.box_length(), g.offset())?;
    data.check_resolvable(&base_grid)?;
    scaled_data.check_resolvable(&g)?;

    let base_time = mu.powi(4) * cfg.t_probe;
    let stride = usize::MAX / 2;
    let base_cfg = SolverConfig {
        grid: base_grid,
        t_end: base_time,
        delta_reg: mu * solver.delta_reg,
        sample_stride: stride,
        ..solver.clone()
    };
    let scaled_cfg = SolverConfig { t_end: cfg.t_probe, sample_stride: stride, ..solver.clone() };
    let base = evolve(&data.sample(&base_grid), &base_cfg)?;
    let scaled = evolve(&scaled_data.sample(&g), &scaled_cfg)?;
    if base.blow_up || scaled.blow_up {
        return Err(Error::Domain("a scaling run blew up".into()));
    }
    let pulled = fourier_resample_onto(base.last(), &g, mu)?.scale(mu.powf(power));
    let target = scaled.last();
    let norm = target.l2_norm();
    if norm == 0.0 {
        return Err(Error::Domain("scaled run has zero L² norm".into()));
    }
    let mismatch = pulled.l2_distance(target)? / norm;
    Ok(DynamicScalingReport { mismatch, base_grid, base_time, scaled_time: cfg.t_probe })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::regime::Lambda;
    use crate::spectral::ComplexField;

    fn standard() -> ProblemParams {
        ProblemParams::new(1, q(1, 2), int(3), Lambda::Defocusing).unwrap()
    }

    #[test]
    fn zero_data_has_zero_energy_and_no_drift() {
        let g = Grid::new(1, 64, 20.0).unwrap();
        let cfg = SolverConfig::new(standard(), g, 0.01, 0.05).unwrap();
        let traj = evolve(&ComplexField::zeros(g), &cfg).unwrap();
        let rep = conservation_probe(&traj);
        assert_eq!(rep.energy[0], 0.0);
        assert_eq!(rep.mass_drift, 0.0);
        assert_eq!(rep.energy_drift, 0.0);
        assert_eq!(rep.times.len(), rep.mass.len());
    }

    #[test]
    fn linear_run_conserves_both() {
        let g = Grid::new(1, 256, 30.0).unwrap();
        let mut cfg = SolverConfig::new(standard(), g, 1e-3, 0.2).unwrap();
        cfg.coupling = 0.0;
        cfg.sample_stride = 10;
        let traj = evolve(&InitialData::gaussian(1.0, 1.0).sample(&g), &cfg).unwrap();
        let rep = conservation_probe(&traj);
        assert!(rep.mass_drift <= 1e-12, "{}", rep.mass_drift);
        assert!(rep.energy_drift <= 1e-12, "{}", rep.energy_drift);
    }

    #[test]
    fn static_scaling_trivial_and_standard() {
        let g = Grid::new(1, 1024, 40.0).unwrap();
        let d = InitialData::gaussian(1.0, 1.0);
        let one = ScalingCheckConfig::new(1.0, int(2), 0.0).unwrap();
        assert_eq!(static_scaling_check(&d, &g, &standard(), &one).unwrap(), 0.0);
        let two = ScalingCheckConfig::new(2.0, int(2), 0.0).unwrap();
        assert!(static_scaling_check(&d, &g, &standard(), &two).unwrap() <= 1e-6);
        let huge = ScalingCheckConfig::new(64.0, int(2), 0.0).unwrap();
        assert!(matches!(static_scaling_check(&d, &g, &standard(), &huge), Err(Error::Precondition(_))));
        assert!(ScalingCheckConfig::new(0.0, int(0), 0.0).is_err());
    }

    #[test]
    fn dynamic_scaling_of_free_flow_is_exact() {
        let g = Grid::new(1, 256, 40.0).unwrap();
        let mut solver = SolverConfig::new(standard(), g, 1e-3, 1.0).unwrap();
        solver.coupling = 0.0;
        let d = InitialData::gaussian(0.3, 2.0);
        let cfg = ScalingCheckConfig::new(2.0, int(0), 0.01).unwrap();
        let rep = dynamic_scaling_check(&d, &cfg, &solver).unwrap();
        assert!(rep.mismatch <= 1e-8, "{}", rep.mismatch);
        assert_eq!(rep.base_grid.box_length(), 80.0);
        let unit = ScalingCheckConfig::new(1.0, int(0), 0.01).unwrap();
        solver.coupling = 1.0;
        solver.delta_reg = 0.5;
        assert!(dynamic_scaling_check(&d, &unit, &solver).unwrap().mismatch <= 1e-10);
    }
}
