//! Quadrature Lebesgue norms, mixed space-time norms and finite-family
//! surrogates of the Strichartz norms `B(Ḣ^s)` and `B′(Ḣ^{-s})`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pairs::{is_admissible, ExponentPair};
use crate::rational::{int, q, Exponent, Q};
use crate::solver::Trajectory;
use crate::spectral::ComplexField;

/// Rectangle-rule `(Σ|u|^r h^dim)^{1/r}`; the max norm for `r = ∞`.
pub fn lebesgue_norm(field: &ComplexField, r: &Exponent) -> Result<f64> {
    match r {
        Exponent::Infinite => Ok(field.max_abs()),
        Exponent::Finite(rq) => {
            if *rq < Q::one() {
                return Err(Error::Unsupported(format!("Lebesgue exponent {rq} < 1")));
            }
            Ok(lebesgue_norm_f64(field, crate::rational::to_f64(rq)))
        }
    }
}

pub fn lebesgue_norm_f64(field: &ComplexField, r: f64) -> f64 {
    if r == 2.0 {
        return field.l2_norm();
    }
    let peak = field.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    // Factor out the peak so large r cannot overflow.
    let s: f64 = field.values.iter().map(|z| (z.norm() / peak).powf(r)).sum();
    peak * (s * field.grid.cell_volume()).powf(1.0 / r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec {
    pub q: Exponent,
    pub r: Exponent,
    pub t0: f64,
    pub t1: f64,
}

impl NormSpec {
    pub fn new(q: Exponent, r: Exponent, t0: f64, t1: f64) -> Self {
        Self { q, r, t0, t1 }
    }

    /// The spec over the whole trajectory span.
    pub fn whole(q: Exponent, r: Exponent, traj: &Trajectory) -> Self {
        let t = traj.times();
        Self { q, r, t0: t[0], t1: *t.last().expect("nonempty") }
    }
}

fn window_indices(times: &[f64], t0: f64, t1: f64) -> Result<Vec<usize>> {
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::Domain(format!("invalid window [{t0}, {t1}]")));
    }
    let span = times.last().copied().unwrap_or(0.0) - times.first().copied().unwrap_or(0.0);
    let tol = 1e-9 * span.max(1.0);
    if times.is_empty() || t0 < times[0] - tol || t1 > times[times.len() - 1] + tol {
        return Err(Error::Domain(format!("window [{t0}, {t1}] is not inside the trajectory span")));
    }
    let idx: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= t0 - tol && times[i] <= t1 + tol).collect();
    if idx.is_empty() {
        return Err(Error::Domain(format!("no samples in window [{t0}, {t1}]")));
    }
    Ok(idx)
}

/// Mixed norm from per-sample spatial norms: composite trapezoid of
/// `‖u(t)‖_r^q` over the samples inside the window, or the max for
/// `q = ∞`. A window holding a single sample has length zero.
pub fn mixed_norm_from_series(times: &[f64], spatial: &[f64], spec: &NormSpec) -> Result<f64> {
    let idx = window_indices(times, spec.t0, spec.t1)?;
    match &spec.q {
        Exponent::Infinite => Ok(idx.iter().map(|&i| spatial[i]).fold(0.0, f64::max)),
        Exponent::Finite(qq) => {
            if *qq < Q::one() {
                return Err(Error::Unsupported(format!("time exponent {qq} < 1")));
            }
            let qf = crate::rational::to_f64(qq);
            let peak = idx.iter().map(|&i| spatial[i]).fold(0.0, f64::max);
            if peak == 0.0 {
                return Ok(0.0);
            }
            let integral: f64 = idx
                .windows(2)
                .map(|p| {
                    let (a, b) = (p[0], p[1]);
                    let fa = (spatial[a] / peak).powf(qf);
                    let fb = (spatial[b] / peak).powf(qf);
                    (times[b] - times[a]) * (fa + fb) / 2.0
                })
                .sum();
            Ok(peak * integral.powf(1.0 / qf))
        }
    }
}

pub fn mixed_norm(traj: &Trajectory, spec: &NormSpec) -> Result<f64> {
    let times = traj.times();
    let idx = window_indices(&times, spec.t0, spec.t1)?;
    let mut spatial = vec![0.0; times.len()];
    for &i in &idx {
        spatial[i] = lebesgue_norm(&traj.samples[i], &spec.r)?;
    }
    mixed_norm_from_series(&times, &spatial, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `B(Ḣ^s)`: supremum over the pairs.
    Sup,
    /// `B′(Ḣ^{-s})`: infimum over conjugates of pairs admissible at `-s`.
    InfDual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzFamily {
    s: Q,
    pairs: Vec<ExponentPair>,
    kind: FamilyKind,
    dim: u32,
}

impl StrichartzFamily {
    /// Every pair must be admissible at level `s` (`-s` for the dual kind).
    pub fn new(dim: u32, s: Q, pairs: Vec<ExponentPair>, kind: FamilyKind) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParams("Strichartz family is empty".into()));
        }
        let level = match kind {
            FamilyKind::Sup => s.clone(),
            FamilyKind::InfDual => -s.clone(),
        };
        for p in &pairs {
            if p.s != level || !is_admissible(&p.q, &p.r, &p.s, dim) {
                return Err(Error::InvalidParams(format!(
                    "pair (q={}, r={}) is not admissible at level {level} in dimension {dim}",
                    p.q, p.r
                )));
            }
        }
        Ok(Self { s, pairs, kind, dim })
    }

    /// `count` pairs equally spaced in `1/r` across the admissible segment,
    /// with both ends moved inward by `1/100`.
    pub fn default_family(dim: u32, s: &Q, kind: FamilyKind, count: usize) -> Result<Self> {
        let level = match kind {
            FamilyKind::Sup => s.clone(),
            FamilyKind::InfDual => -s.clone(),
        };
        let pairs = segment_pairs(dim, &level, count)?;
        Self::new(dim, s.clone(), pairs, kind)
    }

    pub fn s(&self) -> &Q {
        &self.s
    }

    pub fn pairs(&self) -> &[ExponentPair] {
        &self.pairs
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Exponents actually used in the mixed norm for each pair.
    pub fn norm_exponents(&self) -> Result<Vec<(Exponent, Exponent)>> {
        self.pairs
            .iter()
            .map(|p| match self.kind {
                FamilyKind::Sup => Ok((p.q.clone(), Exponent::Finite(p.r.clone()))),
                FamilyKind::InfDual => p.conjugates(),
            })
            .collect()
    }
}

/// Admissible pairs with `1/r` equally spaced in `[lo + 1/100, hi - 1/100]`,
/// where `[lo, hi]` is the closure of the admissible range of `1/r`.
pub fn segment_pairs(dim: u32, s: &Q, count: usize) -> Result<Vec<ExponentPair>> {
    if count == 0 {
        return Err(Error::InvalidParams("family size must be >= 1".into()));
    }
    let n = int(dim as i64);
    // 1/r <= (N - 2s)/(2N) from 4/q >= 0
    let mut hi = (&n - int(2) * s) / (int(2) * &n);
    let lo = if dim >= 5 { (&n - int(4)) / (int(2) * &n) } else { Q::zero() };
    if dim <= 4 && hi > q(1, 2) {
        hi = q(1, 2);
    }
    let shift = q(1, 100);
    let (a, b) = (&lo + &shift, &hi - &shift);
    if a > b {
        return Err(Error::Domain(format!("admissible segment at s = {s} is too short in dimension {dim}")));
    }
    let pts: Vec<Q> = if count == 1 {
        vec![(&a + &b) / int(2)]
    } else {
        (0..count).map(|k| &a + (&b - &a) * int(k as i64) / int(count as i64 - 1)).collect()
    };
    pts.into_iter()
        .map(|inv_r| {
            let four_over_q = &n / int(2) - &n * &inv_r - s;
            let qexp = if four_over_q.is_zero() {
                Exponent::Infinite
            } else {
                Exponent::Finite(int(4) / four_over_q)
            };
            Ok(ExponentPair::new(qexp, inv_r.recip(), s.clone()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzValue {
    pub value: f64,
    pub attained: ExponentPair,
    pub per_pair: Vec<(ExponentPair, f64)>,
}

/// Max (`Sup`) or min (`InfDual`, over conjugate exponents) of the mixed
/// norms of the family on `[t0, t1]`.
pub fn strichartz_norm(traj: &Trajectory, family: &StrichartzFamily, t0: f64, t1: f64) -> Result<StrichartzValue> {
    strichartz_norm_of_samples(&traj.samples, family, t0, t1)
}

/// `strichartz_norm` over bare time-ordered samples.
pub fn strichartz_norm_of_samples(
    samples: &[ComplexField],
    family: &StrichartzFamily,
    t0: f64,
    t1: f64,
) -> Result<StrichartzValue> {
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    window_indices(&times, t0, t1)?;
    let series = strichartz_series(samples, family)?;
    let mut per_pair = Vec::with_capacity(series.len());
    for (p, (qe, re, spatial)) in family.pairs.iter().zip(series) {
        let v = mixed_norm_from_series(&times, &spatial, &NormSpec::new(qe, re, t0, t1))?;
        per_pair.push((p.clone(), v));
    }
    Ok(select(family.kind, per_pair))
}

/// Per-pair time exponent, space exponent and spatial norm at every sample.
pub(crate) fn strichartz_series(
    samples: &[ComplexField],
    family: &StrichartzFamily,
) -> Result<Vec<(Exponent, Exponent, Vec<f64>)>> {
    family
        .norm_exponents()?
        .into_iter()
        .map(|(qe, re)| {
            let spatial = samples.iter().map(|u| lebesgue_norm(u, &re)).collect::<Result<Vec<f64>>>()?;
            Ok((qe, re, spatial))
        })
        .collect()
}

pub(crate) fn select(kind: FamilyKind, per_pair: Vec<(ExponentPair, f64)>) -> StrichartzValue {
    let mut best = 0;
    for (i, (_, v)) in per_pair.iter().enumerate() {
        let better = match kind {
            FamilyKind::Sup => *v > per_pair[best].1,
            FamilyKind::InfDual => *v < per_pair[best].1,
        };
        if better {
            best = i;
        }
    }
    StrichartzValue { value: per_pair[best].1, attained: per_pair[best].0.clone(), per_pair }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::regime::{Lambda, ProblemParams};
    use crate::solver::SolverConfig;
    use crate::spectral::{sobolev_seminorm, Grid, C64};
    use std::f64::consts::PI;

    fn constant_traj(t_end: f64, n: usize) -> Trajectory {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let p = ProblemParams::new(1, q(1, 2), int(3), Lambda::Defocusing).unwrap();
        let cfg = SolverConfig::new(p, g, t_end / n as f64, t_end).unwrap();
        let samples = (0..=n)
            .map(|k| ComplexField { time: k as f64 * t_end / n as f64, ..ComplexField::from_fn(g, |_| C64::new(1.0, 0.0)) })
            .collect();
        Trajectory::from_samples(samples, cfg).unwrap()
    }

    #[test]
    fn single_cell_indicator() {
        let g = Grid::new(2, 8, 4.0).unwrap();
        let mut u = ComplexField::zeros(g);
        u.values[9] = C64::new(1.0, 0.0);
        let h = g.h();
        for r in [1.0, 2.0, 3.0, 7.5] {
            let v = lebesgue_norm(&u, &Exponent::Finite(Q::from_float(r).unwrap())).unwrap();
            assert!((v - h.powf(2.0 / r)).abs() < 1e-14);
        }
        assert_eq!(lebesgue_norm(&u, &Exponent::Infinite).unwrap(), 1.0);
        assert!(lebesgue_norm(&u, &Exponent::Finite(q(1, 2))).is_err());
    }

    #[test]
    fn gaussian_l4_norm() {
        let g = Grid::new(1, 1024, 40.0).unwrap();
        let u = ComplexField::from_fn(g, |x| C64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        let v = lebesgue_norm(&u, &Exponent::Finite(int(4))).unwrap();
        assert!((v - (PI / 2.0).powf(0.125)).abs() < 1e-6);
        let l2 = lebesgue_norm(&u, &Exponent::Finite(int(2))).unwrap();
        assert!((l2 - sobolev_seminorm(&u, 0.0).unwrap()).abs() < 1e-12 * l2);
    }

    #[test]
    fn constant_in_time() {
        let traj = constant_traj(2.0, 8);
        let spatial = 2.0; // ‖1‖_{L²} on a box of length 4
        let spec = NormSpec::whole(Exponent::Finite(int(3)), Exponent::Finite(int(2)), &traj);
        assert!((mixed_norm(&traj, &spec).unwrap() - 2f64.powf(1.0 / 3.0) * spatial).abs() < 1e-12);
        let spec = NormSpec::whole(Exponent::Infinite, Exponent::Finite(int(2)), &traj);
        assert!((mixed_norm(&traj, &spec).unwrap() - spatial).abs() < 1e-12);
        let bad = NormSpec::new(Exponent::Infinite, Exponent::Finite(int(2)), 1.0, 0.5);
        assert!(matches!(mixed_norm(&traj, &bad), Err(Error::Domain(_))));
        let outside = NormSpec::new(Exponent::Infinite, Exponent::Finite(int(2)), 0.0, 3.0);
        assert!(matches!(mixed_norm(&traj, &outside), Err(Error::Domain(_))));
    }

    #[test]
    fn default_family_is_admissible() {
        for dim in [1, 2, 3, 5, 6] {
            for s in [Q::zero(), q(1, 4)] {
                let f = StrichartzFamily::default_family(dim, &s, FamilyKind::Sup, 5).unwrap();
                assert_eq!(f.pairs().len(), 5);
                let d = StrichartzFamily::default_family(dim, &s, FamilyKind::InfDual, 5).unwrap();
                assert!(d.norm_exponents().is_ok());
            }
        }
    }

    #[test]
    fn inadmissible_pair_rejected() {
        let p = ExponentPair::new(int(3), q(5, 2), Q::zero());
        assert!(StrichartzFamily::new(6, Q::zero(), vec![p], FamilyKind::Sup).is_err());
        assert!(StrichartzFamily::new(6, Q::zero(), vec![], FamilyKind::Sup).is_err());
    }

    #[test]
    fn singleton_and_monotone() {
        let traj = constant_traj(1.0, 4);
        let fam = StrichartzFamily::default_family(1, &Q::zero(), FamilyKind::Sup, 5).unwrap();
        let full = strichartz_norm(&traj, &fam, 0.0, 1.0).unwrap();
        let one = StrichartzFamily::new(1, Q::zero(), vec![fam.pairs()[2].clone()], FamilyKind::Sup).unwrap();
        let v1 = strichartz_norm(&traj, &one, 0.0, 1.0).unwrap();
        let (qe, re) = (fam.pairs()[2].q.clone(), Exponent::Finite(fam.pairs()[2].r.clone()));
        let direct = mixed_norm(&traj, &NormSpec::new(qe, re, 0.0, 1.0)).unwrap();
        assert_eq!(v1.value, direct);
        assert!(full.value >= v1.value);
    }
}
