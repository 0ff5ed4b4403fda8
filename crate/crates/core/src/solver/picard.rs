//! Literal Picard iteration of the Duhamel map
//! `G(u)(t) = e^{itΔ²}u₀ + iλ ∫₀ᵗ e^{i(t-s)Δ²} w |u(s)|^α u(s) ds`
//! on the slice set of the solver's step schedule.
//!
//! The trapezoid sum is accumulated in the interaction picture:
//! with `V_k = e^{-it_kΔ²} F_k`, `G(t_j) = e^{it_jΔ²}(u₀ + iλ S_j)` where
//! `S_j` is the trapezoid sum of `V_0..V_j`. This equals the direct double
//! sum term by term, since `e^{i(t_j - t_k)Δ²} = e^{it_jΔ²} e^{-it_kΔ²}`.

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::spectral::{fft, ifft, propagator_symbol, ComplexField, WeightField, C64};

/// Distances below `RATIO_FLOOR × ‖u₀‖_{L²}` are roundoff; ratios with such
/// a denominator are left undefined.
pub const RATIO_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    pub times: Vec<f64>,
    /// `iterates[k][j]` is `u^{(k)}(t_j)`; `iterates[0]` is the free flow.
    pub iterates: Vec<Vec<ComplexField>>,
    /// `distances[k] = d(u^{(k+1)}, u^{(k)})`, max over slices of the `L²`
    /// distance.
    pub distances: Vec<f64>,
    /// `distances[k+1] / distances[k]` where the denominator is above the
    /// roundoff floor.
    pub contraction_ratios: Vec<Option<f64>>,
    pub converged: bool,
}

impl PicardReport {
    pub fn final_iterate(&self) -> &[ComplexField] {
        self.iterates.last().expect("at least two iterates")
    }
}

pub fn picard_iterate(u0: &ComplexField, config: &SolverConfig, n_iters: usize) -> Result<PicardReport> {
    if n_iters < 2 {
        return Err(Error::Usage(format!("picard needs at least 2 iterations (got {n_iters})")));
    }
    config.validate()?;
    u0.check_grid(&config.grid)?;
    let grid = config.grid;
    let w = config.weight()?;
    let lambda = config.params.lambda().value();
    let alpha = config.params.alpha_f64();

    let mut times = vec![0.0];
    times.extend(config.step_times());
    let u0_hat = fft(&grid, &u0.values);
    let forward: Vec<Vec<C64>> = times.iter().map(|&t| propagator_symbol(&grid, t)).collect();

    let free: Vec<ComplexField> = times
        .iter()
        .zip(&forward)
        .map(|(&t, p)| {
            let hat: Vec<C64> = u0_hat.iter().zip(p).map(|(a, b)| a * b).collect();
            ComplexField { grid, values: ifft(&grid, &hat), time: t }
        })
        .collect();

    let norm0 = u0.l2_norm();
    let mut iterates = vec![free];
    let mut distances = Vec::with_capacity(n_iters);
    for _ in 0..n_iters {
        let prev = iterates.last().expect("nonempty");
        let next = duhamel(prev, &u0_hat, &times, &forward, &w, lambda, alpha);
        let d = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| a.l2_distance(b))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        distances.push(d);
        iterates.push(next);
    }
    let floor = RATIO_FLOOR * norm0;
    let contraction_ratios = distances
        .windows(2)
        .map(|p| (p[0] > floor).then(|| p[1] / p[0]))
        .collect();
    let converged = distances.last().is_some_and(|&d| d < 1e-8 * norm0);
    Ok(PicardReport { times, iterates, distances, contraction_ratios, converged })
}

fn duhamel(
    u: &[ComplexField],
    u0_hat: &[C64],
    times: &[f64],
    forward: &[Vec<C64>],
    w: &WeightField,
    lambda: f64,
    alpha: f64,
) -> Vec<ComplexField> {
    let grid = w.grid;
    let n = grid.len();
    let mut sum = vec![C64::new(0.0, 0.0); n];
    let mut prev_v: Option<Vec<C64>> = None;
    let coef = C64::new(0.0, lambda);
    u.iter()
        .enumerate()
        .map(|(j, uj)| {
            let f: Vec<C64> = uj
                .values
                .iter()
                .zip(&w.values)
                .map(|(z, wv)| z * (wv * z.norm().powf(alpha)))
                .collect();
            // V_j = e^{-it_jΔ²} F_j
            let v: Vec<C64> = fft(&grid, &f).iter().zip(&forward[j]).map(|(a, p)| a * p.conj()).collect();
            if let Some(pv) = &prev_v {
                let h = (times[j] - times[j - 1]) / 2.0;
                for ((s, a), b) in sum.iter_mut().zip(pv).zip(&v) {
                    *s += (a + b) * h;
                }
            }
            prev_v = Some(v);
            let hat: Vec<C64> = u0_hat
                .iter()
                .zip(&sum)
                .zip(&forward[j])
                .map(|((a, s), p)| (a + coef * s) * p)
                .collect();
            ComplexField { grid, values: ifft(&grid, &hat), time: times[j] }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::regime::{Lambda, ProblemParams};
    use crate::solver::InitialData;
    use crate::spectral::{free_propagator, Grid};

    fn config(coupling: f64) -> SolverConfig {
        let g = Grid::new(1, 128, 30.0).unwrap();
        let p = ProblemParams::new(1, q(1, 2), int(3), Lambda::Defocusing).unwrap();
        let mut c = SolverConfig::new(p, g, 0.01, 0.1).unwrap();
        c.coupling = coupling;
        c
    }

    #[test]
    fn needs_two_iterations() {
        let c = config(1.0);
        let u0 = InitialData::gaussian(1.0, 1.0).sample(&c.grid);
        assert!(matches!(picard_iterate(&u0, &c, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn zero_weight_gives_free_flow_fixed_point() {
        let c = config(0.0);
        let u0 = InitialData::gaussian(1.0, 1.0).sample(&c.grid);
        let rep = picard_iterate(&u0, &c, 3).unwrap();
        assert_eq!(rep.iterates.len(), 4);
        assert_eq!(rep.distances.len(), 3);
        assert!(rep.distances.iter().all(|&d| d < 1e-14));
        assert!(rep.contraction_ratios.iter().all(Option::is_none));
        assert!(rep.converged);
        let exact = free_propagator(&u0, 0.1).unwrap();
        assert!(rep.final_iterate().last().unwrap().l2_distance(&exact).unwrap() < 1e-12);
    }

    /// The interaction-picture sum against the literal double sum.
    #[test]
    fn matches_direct_duhamel_sum() {
        let c = config(1.0);
        let u0 = InitialData::gaussian(0.5, 1.0).sample(&c.grid);
        let rep = picard_iterate(&u0, &c, 2).unwrap();
        let w = c.weight().unwrap();
        let u1 = &rep.iterates[1];
        let j = u1.len() - 1;
        let nl = |f: &ComplexField| -> ComplexField {
            let v = f.values.iter().zip(&w.values).map(|(z, wv)| z * (wv * z.norm().powi(3))).collect();
            ComplexField { values: v, ..f.clone() }
        };
        let tj = rep.times[j];
        let mut acc = vec![C64::new(0.0, 0.0); c.grid.len()];
        for k in 0..j {
            let h = rep.times[k + 1] - rep.times[k];
            let a = free_propagator(&nl(&u1[k]), tj - rep.times[k]).unwrap();
            let b = free_propagator(&nl(&u1[k + 1]), tj - rep.times[k + 1]).unwrap();
            for (s, (x, y)) in acc.iter_mut().zip(a.values.iter().zip(&b.values)) {
                *s += (x + y) * (h / 2.0);
            }
        }
        let free = free_propagator(&u0, tj).unwrap();
        let direct: Vec<C64> = free.values.iter().zip(&acc).map(|(f, s)| f + C64::new(0.0, 1.0) * s).collect();
        let got = &rep.iterates[2][j];
        let err: f64 = got.values.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }
}
