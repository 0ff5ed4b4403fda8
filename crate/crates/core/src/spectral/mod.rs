//! Periodic tensor grids, Fourier transforms and Fourier multipliers.
//!
//! Transforms follow the `rustfft` convention: the forward transform is
//! unnormalized with kernel `e^{-2πi jk/M}`, the inverse divides by `M^dim`.
//! Discrete Plancherel then reads
//! `Σ_j |u_j|² h^dim = (h/M)^dim Σ_k |û_k|²`.

mod io;
mod weight;

pub use io::{decode_field, encode_field, read_field, write_field, FIELD_MAGIC, FIELD_VERSION};
pub use weight::{weight, WeightField};

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    m: usize,
    l: f64,
    offset: bool,
}

impl Grid {
    /// Half-cell offset grid on `[-L/2, L/2)^dim`.
    pub fn new(dim: usize, m: usize, l: f64) -> Result<Self> {
        Self::with_offset(dim, m, l, true)
    }

    pub fn with_offset(dim: usize, m: usize, l: f64, offset: bool) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParams(format!("grid dimension must be 1, 2 or 3 (got {dim})")));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidParams(format!("points per axis must be a power of two >= 2 (got {m})")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidParams(format!("box length must be positive and finite (got {l})")));
        }
        if m.checked_pow(dim as u32).is_none_or(|n| n > 1 << 28) {
            return Err(Error::InvalidParams(format!("grid {m}^{dim} is too large")));
        }
        Ok(Self { dim, m, l, offset })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn box_length(&self) -> f64 {
        self.l
    }

    pub fn offset(&self) -> bool {
        self.offset
    }

    pub fn h(&self) -> f64 {
        self.l / self.m as f64
    }

    /// `h^dim`, the quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate along one axis.
    pub fn node(&self, j: usize) -> f64 {
        let shift = if self.offset { 0.5 } else { 0.0 };
        -self.l / 2.0 + (j as f64 + shift) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    /// Signed mode index of FFT slot `k`: `0, 1, …, M/2-1, -M/2, …, -1`.
    pub fn mode_index(&self, k: usize) -> i64 {
        let m = self.m as i64;
        let k = k as i64;
        if k < m / 2 { k } else { k - m }
    }

    /// `ξ_k = 2πk/L` for FFT slot `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * self.mode_index(k) as f64 / self.l
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.wavenumber(k)).collect()
    }

    /// Per-axis indices of a flat row-major index (unused axes are 0).
    pub fn unflatten(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.m;
            idx /= self.m;
        }
        out
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let ix = self.unflatten(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.node(ix[a]);
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Wave vector of a flat Fourier index.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let ix = self.unflatten(idx);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.wavenumber(ix[a]);
        }
        xi
    }

    /// `|ξ|²` at every flat Fourier index.
    pub fn xi_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let xi = self.wavevector(i);
                xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
            })
            .collect()
    }

    /// Whether some node is at distance `< eps` from the origin.
    pub fn has_origin_node(&self) -> bool {
        let tol = 1e-12 * self.h();
        (0..self.m).any(|j| self.node(j).abs() < tol)
    }

    fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

/// A sampled complex field with a timestamp. Values are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub time: f64,
}

impl ComplexField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()], time: 0.0 }
    }

    pub fn from_values(grid: Grid, values: Vec<C64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        Ok(Self { grid, values, time })
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> C64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, values, time: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|z| z * c).collect(), time: self.time }
    }

    pub fn check_grid(&self, other: &Grid) -> Result<()> {
        if self.grid.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other)))
        }
    }

    /// Discrete `L²` norm `(Σ|u|² h^dim)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete `L²` distance to another field on the same grid.
    pub fn l2_distance(&self, other: &ComplexField) -> Result<f64> {
        other.check_grid(&self.grid)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.cell_volume()).sqrt())
    }
}

fn planner() -> &'static Mutex<PlanCache> {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(PlanCache::default()))
}

struct PlanCache {
    planner: FftPlanner<f64>,
    plans: HashMap<(usize, bool), Arc<dyn Fft<f64>>>,
}

impl Default for PlanCache {
    fn default() -> Self {
        Self { planner: FftPlanner::new(), plans: HashMap::new() }
    }
}

fn plan(m: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = planner().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(p) = cache.plans.get(&(m, forward)) {
        return p.clone();
    }
    let p = if forward { cache.planner.plan_fft_forward(m) } else { cache.planner.plan_fft_inverse(m) };
    cache.plans.insert((m, forward), p.clone());
    p
}

fn transform_axes(grid: &Grid, data: &mut [C64], forward: bool) {
    let m = grid.m;
    let fft = plan(m, forward);
    let mut line = vec![C64::new(0.0, 0.0); m];
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = grid.len();
    for axis in 0..grid.dim {
        let stride = m.pow((grid.dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(m) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * m;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

/// Unnormalized forward transform.
pub fn fft(grid: &Grid, values: &[C64]) -> Vec<C64> {
    let mut data = values.to_vec();
    transform_axes(grid, &mut data, true);
    data
}

/// Inverse transform, normalized by `M^dim`.
pub fn ifft(grid: &Grid, values: &[C64]) -> Vec<C64> {
    let mut data = values.to_vec();
    transform_axes(grid, &mut data, false);
    let scale = 1.0 / grid.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    data
}

pub(crate) fn ifft_in_place(grid: &Grid, data: &mut [C64]) {
    transform_axes(grid, data, false);
    let scale = 1.0 / grid.len() as f64;
    for v in data {
        *v *= scale;
    }
}

/// Phase factors `exp(i t |ξ|⁴)` at every Fourier index.
pub fn propagator_symbol(grid: &Grid, t: f64) -> Vec<C64> {
    grid.xi_squared().into_iter().map(|k2| C64::from_polar(1.0, t * k2 * k2)).collect()
}

/// Exact free flow `e^{itΔ²}`; the timestamp advances by `t`.
pub fn free_propagator(field: &ComplexField, t: f64) -> Result<ComplexField> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("propagation time must be finite (got {t})")));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    let grid = field.grid;
    let mut data = fft(&grid, &field.values);
    for (v, p) in data.iter_mut().zip(propagator_symbol(&grid, t)) {
        *v *= p;
    }
    ifft_in_place(&grid, &mut data);
    Ok(ComplexField { grid, values: data, time: field.time + t })
}

fn multiplier_norm(field: &ComplexField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = field.grid;
    let hat = fft(&grid, &field.values);
    let sum: f64 = hat.iter().zip(grid.xi_squared()).map(|(v, k2)| weight(k2) * v.norm_sqr()).sum();
    let norm = (grid.h() / grid.m as f64).powi(grid.dim as i32);
    (sum * norm).sqrt()
}

/// Homogeneous seminorm `‖D^s u‖_{L²}`; the zero mode has weight `0^s`
/// (`1` when `s = 0`).
pub fn sobolev_seminorm(field: &ComplexField, s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Unsupported(format!("negative Sobolev order {s}")));
    }
    if s == 0.0 {
        return Ok(multiplier_norm(field, |_| 1.0));
    }
    Ok(multiplier_norm(field, |k2| if k2 == 0.0 { 0.0 } else { k2.powf(s) }))
}

/// `D^s u` through the multiplier `|ξ|^s`; the zero mode is dropped for
/// `s > 0`.
pub fn fractional_derivative(field: &ComplexField, s: f64) -> Result<ComplexField> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Unsupported(format!("negative derivative order {s}")));
    }
    if s == 0.0 {
        return Ok(field.clone());
    }
    let grid = field.grid;
    let mut hat = fft(&grid, &field.values);
    for (v, k2) in hat.iter_mut().zip(grid.xi_squared()) {
        *v *= if k2 == 0.0 { 0.0 } else { k2.powf(s / 2.0) };
    }
    ifft_in_place(&grid, &mut hat);
    Ok(ComplexField { grid, values: hat, time: field.time })
}

/// Inhomogeneous norm `‖(1+|ξ|²)^{s/2} û‖`, used for `H²` diagnostics.
pub fn bessel_norm(field: &ComplexField, s: f64) -> f64 {
    multiplier_norm(field, |k2| (1.0 + k2).powf(s))
}

/// `‖Δu‖_{L²}` through the multiplier `|ξ|²`.
pub fn laplacian_norm(field: &ComplexField) -> f64 {
    multiplier_norm(field, |k2| k2 * k2)
}

/// Spectral partial derivatives `∂_a u` for each axis; the Nyquist mode is
/// dropped since its derivative is not real-representable.
pub fn gradient(field: &ComplexField) -> Vec<Vec<C64>> {
    let grid = field.grid;
    let hat = fft(&grid, &field.values);
    let half = grid.m / 2;
    (0..grid.dim)
        .map(|axis| {
            let mut d: Vec<C64> = hat
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let k = grid.unflatten(i)[axis];
                    if k == half { C64::new(0.0, 0.0) } else { v * C64::new(0.0, grid.wavenumber(k)) }
                })
                .collect();
            ifft_in_place(&grid, &mut d);
            d
        })
        .collect()
}

/// Fraction of the mass carried by nodes adjacent to the box boundary.
pub fn boundary_mass_fraction(field: &ComplexField) -> f64 {
    let grid = field.grid;
    let total: f64 = field.values.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let last = grid.m - 1;
    let edge: f64 = field
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.unflatten(*i)[..grid.dim].iter().any(|&j| j == 0 || j == last))
        .map(|(_, z)| z.norm_sqr())
        .sum();
    edge / total
}

/// 2/3-rule truncation: zeroes modes with `|k| > M/3` on any axis.
pub fn dealias(field: &mut ComplexField) {
    let grid = field.grid;
    let cutoff = grid.m as i64 / 3;
    let mut hat = fft(&grid, &field.values);
    for (i, v) in hat.iter_mut().enumerate() {
        let ix = grid.unflatten(i);
        if ix[..grid.dim].iter().any(|&k| grid.mode_index(k).abs() > cutoff) {
            *v = C64::new(0.0, 0.0);
        }
    }
    ifft_in_place(&grid, &mut hat);
    field.values = hat;
}

/// Evaluates the trigonometric interpolant of `field` at the points
/// `(μ y_{j_1}, …, μ y_{j_dim})` where `y` are the nodes of `target`, axis
/// by axis. Points outside the box are evaluated on the periodic extension;
/// callers mask them.
pub fn fourier_resample_onto(field: &ComplexField, target: &Grid, mu: f64) -> Result<ComplexField> {
    let grid = field.grid;
    if target.dim != grid.dim || target.m != grid.m {
        return Err(Error::GridMismatch(format!(
            "resampling needs equal dimension and M (source {}^{}, target {}^{})",
            grid.m, grid.dim, target.m, target.dim
        )));
    }
    let m = grid.m;
    let x0 = grid.node(0);
    let targets: Vec<f64> = target.nodes().into_iter().map(|x| mu * x - x0).collect();
    // Row k of the evaluation matrix holds e^{i ξ_k (μ x_j - x_0)} / M; the
    // Nyquist mode is split evenly between ±M/2 to keep real data real.
    let half = m / 2;
    let kernel: Vec<C64> = (0..m)
        .flat_map(|k| {
            let xi = grid.wavenumber(k);
            let targets = &targets;
            (0..m).map(move |j| {
                if k == half {
                    C64::new((xi * targets[j]).cos() / m as f64, 0.0)
                } else {
                    C64::from_polar(1.0 / m as f64, xi * targets[j])
                }
            })
        })
        .collect();
    let fft_fwd = plan(m, true);
    let mut scratch = vec![C64::new(0.0, 0.0); fft_fwd.get_inplace_scratch_len()];
    let mut data = field.values.clone();
    let mut line = vec![C64::new(0.0, 0.0); m];
    let mut out = vec![C64::new(0.0, 0.0); m];
    for axis in 0..grid.dim {
        let stride = m.pow((grid.dim - 1 - axis) as u32);
        let block = stride * m;
        for base in (0..grid.len()).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                fft_fwd.process_with_scratch(&mut line, &mut scratch);
                for (j, o) in out.iter_mut().enumerate() {
                    *o = (0..m).map(|k| line[k] * kernel[k * m + j]).sum();
                }
                for (j, v) in out.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
    Ok(ComplexField { grid: *target, values: data, time: field.time })
}

/// `fourier_resample_onto` with the source grid as target.
pub fn fourier_resample_scaled(field: &ComplexField, mu: f64) -> ComplexField {
    fourier_resample_onto(field, &field.grid, mu).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid) -> ComplexField {
        ComplexField::from_fn(grid, |x| C64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0))
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
        let g = Grid::new(1, 8, 8.0).unwrap();
        assert_eq!(g.node(0), -3.5);
        assert!(!g.has_origin_node());
        assert!(Grid::with_offset(1, 8, 8.0, false).unwrap().has_origin_node());
    }

    #[test]
    fn wavenumbers_are_symmetric_fft_order() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let k: Vec<i64> = (0..8).map(|i| g.mode_index(i)).collect();
        assert_eq!(k, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.wavenumber(3), 3.0);
    }

    #[test]
    fn fft_round_trip_3d() {
        let g = Grid::new(3, 8, 6.0).unwrap();
        let u = ComplexField::from_fn(g, |x| C64::new(x[0] + 2.0 * x[1], x[2] * x[0]));
        let back = ifft(&g, &fft(&g, &u.values));
        for (a, b) in u.values.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_propagated_by_its_symbol() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let u = ComplexField::from_fn(g, |x| C64::from_polar(1.0, 3.0 * x[0]));
        let v = free_propagator(&u, 0.01).unwrap();
        let phase = C64::from_polar(1.0, 0.01 * 81.0);
        for (a, b) in u.values.iter().zip(&v.values) {
            assert!((a * phase - b).norm() < 1e-12);
        }
        assert!((v.time - 0.01).abs() < 1e-15);
    }

    #[test]
    fn propagator_group_law_and_reversal() {
        let g = Grid::new(2, 32, 20.0).unwrap();
        let u = gaussian(g);
        let a = free_propagator(&free_propagator(&u, 0.3).unwrap(), 0.4).unwrap();
        let b = free_propagator(&u, 0.7).unwrap();
        assert!(a.l2_distance(&b).unwrap() / u.l2_norm() < 1e-12);
        let back = free_propagator(&b, -0.7).unwrap();
        assert!(back.l2_distance(&u).unwrap() / u.l2_norm() < 1e-12);
        assert!(free_propagator(&u, f64::NAN).is_err());
    }

    #[test]
    fn plancherel_and_plane_wave_seminorm() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let u = ComplexField::from_fn(g, |x| C64::from_polar(1.0, 5.0 * x[0]));
        let l2 = u.l2_norm();
        assert!((sobolev_seminorm(&u, 0.0).unwrap() - l2).abs() < 1e-12 * l2);
        assert!((sobolev_seminorm(&u, 2.0).unwrap() - 25.0 * l2).abs() < 1e-10 * l2);
        assert!(matches!(sobolev_seminorm(&u, -1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn gaussian_second_derivative_norm() {
        // ∫ (x²-1)² e^{-x²} dx = 3√π/4
        let g = Grid::new(1, 1024, 60.0).unwrap();
        let u = gaussian(g);
        let expect = (3.0 * PI.sqrt() / 4.0).sqrt();
        assert!((sobolev_seminorm(&u, 2.0).unwrap() - expect).abs() < 1e-6);
        assert!((laplacian_norm(&u) - expect).abs() < 1e-6);
    }

    #[test]
    fn seminorm_zero_mode_convention() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let c = ComplexField::from_fn(g, |_| C64::new(1.0, 0.0));
        assert!(sobolev_seminorm(&c, 0.5).unwrap() < 1e-14);
        assert!((sobolev_seminorm(&c, 0.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_gradient_of_gaussian() {
        let g = Grid::new(2, 64, 24.0).unwrap();
        let u = gaussian(g);
        let grad = gradient(&u);
        for i in (0..g.len()).step_by(97) {
            let x = g.position(i);
            let exact = -x[1] * u.values[i].re;
            assert!((grad[1][i].re - exact).abs() < 1e-10, "{i}");
        }
    }

    #[test]
    fn boundary_fraction_of_constant() {
        let g = Grid::new(1, 8, 8.0).unwrap();
        let c = ComplexField::from_fn(g, |_| C64::new(1.0, 0.0));
        assert!((boundary_mass_fraction(&c) - 0.25).abs() < 1e-15);
        assert_eq!(boundary_mass_fraction(&ComplexField::zeros(g)), 0.0);
    }

    #[test]
    fn resampling_matches_analytic_dilation() {
        let g = Grid::new(1, 256, 40.0).unwrap();
        let u = gaussian(g);
        let v = fourier_resample_scaled(&u, 0.5);
        for (i, z) in v.values.iter().enumerate() {
            let x = 0.5 * g.node(i);
            assert!((z.re - (-x * x / 2.0).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn resampling_onto_a_wider_grid() {
        let g = Grid::new(1, 256, 40.0).unwrap();
        let wide = Grid::new(1, 256, 80.0).unwrap();
        let u = gaussian(g);
        let v = fourier_resample_onto(&u, &wide, 0.25).unwrap();
        assert_eq!(v.grid, wide);
        for (i, z) in v.values.iter().enumerate() {
            let x = 0.25 * wide.node(i);
            assert!((z.re - (-x * x / 2.0).exp()).abs() < 1e-12);
        }
        assert!(fourier_resample_onto(&u, &Grid::new(1, 128, 40.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn fractional_derivative_of_order_two_is_minus_laplacian() {
        let g = Grid::new(1, 128, 30.0).unwrap();
        let u = gaussian(g);
        let d = fractional_derivative(&u, 2.0).unwrap();
        for (i, z) in d.values.iter().enumerate() {
            let x = g.node(i);
            assert!((z.re - (1.0 - x * x) * (-x * x / 2.0).exp()).abs() < 1e-10);
        }
        let l2 = ComplexField { values: fractional_derivative(&u, 0.75).unwrap().values, ..u.clone() }.l2_norm();
        assert!((l2 - sobolev_seminorm(&u, 0.75).unwrap()).abs() < 1e-12);
        assert!(fractional_derivative(&u, -1.0).is_err());
    }

    #[test]
    fn dealias_removes_high_modes() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let mut u = ComplexField::from_fn(g, |x| C64::new((2.0 * x[0]).cos() + (14.0 * x[0]).cos(), 0.0));
        dealias(&mut u);
        for (i, z) in u.values.iter().enumerate() {
            assert!((z.re - (2.0 * g.node(i)).cos()).abs() < 1e-12);
        }
    }
}
