//! Stability under perturbed data and forcing: the distance between the
//! unforced solution and the forced, perturbed one, against the size of
//! the perturbation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::norms::{
    lebesgue_norm_f64, mixed_norm_from_series, strichartz_norm_of_samples, FamilyKind, NormSpec, StrichartzFamily,
};
use crate::rational::{q, Exponent, Q};
use crate::solver::{evolve, evolve_forced, SolverConfig, Trajectory};
use crate::spectral::{bessel_norm, ComplexField, C64};

pub const DEFAULT_LADDER: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const DEFAULT_SLOPE_TOL: f64 = 0.2;

/// Forcing profile `e(t)` sampled on the solver grid.
pub type ForcingFn = Arc<dyn Fn(f64) -> Vec<C64> + Send + Sync>;

#[derive(Clone)]
pub struct PerturbationConfig {
    /// Unit forcing; rung `ε` of the ladder applies `ε e`.
    pub forcing: ForcingFn,
    /// Recognized key: `slope` (allowed deviation of the fitted slope from 1).
    pub tolerances: BTreeMap<String, f64>,
    pub m_bound: f64,
    pub m_prime: f64,
    pub l_bound: f64,
    pub eps: f64,
    pub ladder: Vec<f64>,
}

impl fmt::Debug for PerturbationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationConfig")
            .field("tolerances", &self.tolerances)
            .field("m_bound", &self.m_bound)
            .field("m_prime", &self.m_prime)
            .field("l_bound", &self.l_bound)
            .field("eps", &self.eps)
            .field("ladder", &self.ladder)
            .finish_non_exhaustive()
    }
}

impl PerturbationConfig {
    pub fn new(forcing: ForcingFn, eps: f64) -> Result<Self> {
        let cfg = Self {
            forcing,
            tolerances: BTreeMap::from([("slope".to_string(), DEFAULT_SLOPE_TOL)]),
            m_bound: 1.0,
            m_prime: 1.0,
            l_bound: 1.0,
            eps,
            ladder: DEFAULT_LADDER.to_vec(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidParams(format!("eps must be positive (got {})", self.eps)));
        }
        if self.ladder.len() < 2 || self.ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidParams("ladder needs at least two positive rungs".into()));
        }
        for (k, v) in &self.tolerances {
            if k != "slope" {
                return Err(Error::InvalidParams(format!("unknown tolerance '{k}'")));
            }
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidParams(format!("tolerance {k} must be positive")));
            }
        }
        Ok(())
    }

    pub fn slope_tol(&self) -> f64 {
        self.tolerances.get("slope").copied().unwrap_or(DEFAULT_SLOPE_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationDistance {
    /// `sup_t ‖u(t) - ũ(t)‖_{L²}`.
    pub linf_l2: f64,
    /// Surrogate `B(I)` norm of `u - ũ`.
    pub b_norm: f64,
}

/// `L^ρ_{t,x}` with `ρ = 2(N+4)/(N-4)` for `N ≥ 5`; for `N ≤ 4`, where that
/// exponent does not exist, the default `B(L²)` family.
pub fn b_surrogate(samples: &[ComplexField]) -> Result<f64> {
    let first = samples.first().ok_or_else(|| Error::Domain("no samples".into()))?;
    let dim = first.grid.dim() as u32;
    let (t0, t1) = (first.time, samples[samples.len() - 1].time);
    if dim >= 5 {
        let rho = 2.0 * (dim as f64 + 4.0) / (dim as f64 - 4.0);
        let spatial: Vec<f64> = samples.iter().map(|u| lebesgue_norm_f64(u, rho)).collect();
        let times: Vec<f64> = samples.iter().map(|u| u.time).collect();
        let rq = Exponent::Finite(q(2 * (dim as i64 + 4), dim as i64 - 4));
        return mixed_norm_from_series(&times, &spatial, &NormSpec::new(rq.clone(), rq, t0, t1));
    }
    let family = StrichartzFamily::default_family(dim, &Q::zero(), FamilyKind::Sup, 5)?;
    Ok(strichartz_norm_of_samples(samples, &family, t0, t1)?.value)
}

fn distance(u: &Trajectory, v: &Trajectory) -> Result<PerturbationDistance> {
    if u.samples.len() != v.samples.len() {
        return Err(Error::Domain("trajectories have different sample counts".into()));
    }
    let diff = u
        .samples
        .iter()
        .zip(&v.samples)
        .map(|(a, b)| {
            let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
            ComplexField::from_values(a.grid, values, a.time)
        })
        .collect::<Result<Vec<_>>>()?;
    let linf_l2 = diff.iter().map(|d| d.l2_norm()).fold(0.0, f64::max);
    Ok(PerturbationDistance { linf_l2, b_norm: b_surrogate(&diff)? })
}

/// Evolves `u₀` unforced and `ũ₀` with the forcing, on one grid and
/// schedule, and measures their distance.
pub fn perturbation_run(
    u0: &ComplexField,
    u0_tilde: &ComplexField,
    forcing: Option<&ForcingFn>,
    solver: &SolverConfig,
) -> Result<PerturbationDistance> {
    u0.check_grid(&u0_tilde.grid)?;
    let u = evolve(u0, solver)?;
    let f = forcing.map(|f| f.as_ref() as &dyn Fn(f64) -> Vec<C64>);
    let v = evolve_forced(u0_tilde, solver, f)?;
    distance(&u, &v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub ladder: Vec<f64>,
    pub distances: Vec<PerturbationDistance>,
    pub slope_linf: f64,
    pub slope_b: f64,
    pub slope_tol: f64,
    /// Informational quantities, never asserted.
    pub info: Vec<(String, String)>,
}

impl PerturbationReport {
    pub fn passes(&self) -> bool {
        (self.slope_linf - 1.0).abs() <= self.slope_tol && (self.slope_b - 1.0).abs() <= self.slope_tol
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("slope fit needs at least two positive points".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("slope fit needs distinct abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// For each rung `ε`: `ũ₀ = u₀ + ε d₀` and forcing `ε e`. Reports the
/// distances, their log-log slopes against `ε`, and the bounds of the
/// stability statement as INFO fields.
pub fn perturbation_experiment(
    u0: &ComplexField,
    direction: &ComplexField,
    config: &PerturbationConfig,
    solver: &SolverConfig,
) -> Result<PerturbationReport> {
    config.validate()?;
    u0.check_grid(&solver.grid)?;
    direction.check_grid(&solver.grid)?;
    let u = evolve(u0, solver)?;
    let mut distances = Vec::with_capacity(config.ladder.len());
    let mut h2_sup: f64 = 0.0;
    let mut b_tilde: f64 = 0.0;
    for &eps in &config.ladder {
        let values = u0.values.iter().zip(&direction.values).map(|(a, d)| a + d * eps).collect();
        let tilde0 = ComplexField::from_values(u0.grid, values, 0.0)?;
        let unit = config.forcing.clone();
        let scaled = move |t: f64| -> Vec<C64> { unit(t).into_iter().map(|z| z * eps).collect() };
        let v = evolve_forced(&tilde0, solver, Some(&scaled))?;
        if v.blow_up {
            return Err(Error::Domain(format!("perturbed run blew up at eps = {eps}")));
        }
        distances.push(distance(&u, &v)?);
        h2_sup = h2_sup.max(v.diagnostics.iter().map(|d| d.h2_norm).fold(0.0, f64::max));
        b_tilde = b_tilde.max(b_surrogate(&v.samples)?);
    }
    let linf: Vec<f64> = distances.iter().map(|d| d.linf_l2).collect();
    let bn: Vec<f64> = distances.iter().map(|d| d.b_norm).collect();
    let slope_linf = fit_slope(&config.ladder, &linf)?;
    let slope_b = fit_slope(&config.ladder, &bn)?;
    let gap = bessel_norm(direction, 2.0) * config.ladder.iter().copied().fold(0.0, f64::max);
    let info = vec![
        ("sup_h2_tilde".to_string(), format!("{h2_sup:.16e} (M = {})", config.m_bound)),
        ("max_h2_initial_gap".to_string(), format!("{gap:.16e} (M' = {})", config.m_prime)),
        ("max_b_tilde".to_string(), format!("{b_tilde:.16e} (L = {})", config.l_bound)),
        ("eps".to_string(), format!("{}", config.eps)),
        ("forcing_norms".to_string(), "dual-pair smallness of e and its gradient not verified".to_string()),
    ];
    Ok(PerturbationReport {
        ladder: config.ladder.clone(),
        distances,
        slope_linf,
        slope_b,
        slope_tol: config.slope_tol(),
        info,
    })
}
