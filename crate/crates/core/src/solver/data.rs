//! Analytic initial data: modulated Gaussians
//! `A e^{-|x-c|²/(2σ²)} e^{i k·x}`.

use crate::error::{Error, Result};

/// The profile must fall below `e^{-18}` of its peak before the box edge.
pub const SUPPORT_SIGMAS: f64 = 6.0;
/// The spectrum must fall below `e^{-8}` of its peak before the Nyquist
/// wavenumber.
pub const BAND_SIGMAS: f64 = 4.0;
use crate::spectral::{bessel_norm, ComplexField, Grid, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub amplitude: f64,
    pub sigma: f64,
    pub center: [f64; 3],
    pub wavevector: [f64; 3],
}

impl InitialData {
    pub fn gaussian(amplitude: f64, sigma: f64) -> Self {
        Self { amplitude, sigma, center: [0.0; 3], wavevector: [0.0; 3] }
    }

    pub fn modulated(amplitude: f64, sigma: f64, center: [f64; 3], wavevector: [f64; 3]) -> Self {
        Self { amplitude, sigma, center, wavevector }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.amplitude.is_finite()
            && self.center.iter().chain(&self.wavevector).all(|v| v.is_finite());
        if !finite || !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParams(format!("initial data needs finite values and sigma > 0 ({self:?})")));
        }
        Ok(())
    }

    /// Support and bandwidth checks against `grid` on its active axes.
    pub fn check_resolvable(&self, grid: &Grid) -> Result<()> {
        self.validate()?;
        let mut failed = Vec::new();
        let half = grid.box_length() / 2.0;
        let nyquist = std::f64::consts::PI / grid.h();
        for a in 0..grid.dim() {
            let reach = self.center[a].abs() + SUPPORT_SIGMAS * self.sigma;
            if reach > half {
                failed.push(format!("axis {a}: |c| + {SUPPORT_SIGMAS}σ = {reach} exceeds L/2 = {half}"));
            }
            let band = self.wavevector[a].abs() + BAND_SIGMAS / self.sigma;
            if band > nyquist {
                failed.push(format!("axis {a}: |k| + {BAND_SIGMAS}/σ = {band} exceeds π/h = {nyquist}"));
            }
        }
        if failed.is_empty() { Ok(()) } else { Err(Error::Precondition(failed)) }
    }

    pub fn eval(&self, x: [f64; 3]) -> C64 {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for a in 0..3 {
            let d = x[a] - self.center[a];
            r2 += d * d;
            phase += self.wavevector[a] * x[a];
        }
        C64::from_polar(self.amplitude * (-r2 / (2.0 * self.sigma * self.sigma)).exp(), phase)
    }

    /// `∇u(x) = (-(x-c)/σ² + i k) u(x)`.
    pub fn gradient(&self, x: [f64; 3]) -> [C64; 3] {
        let u = self.eval(x);
        let s2 = self.sigma * self.sigma;
        let mut g = [C64::new(0.0, 0.0); 3];
        for a in 0..3 {
            g[a] = u * C64::new(-(x[a] - self.center[a]) / s2, self.wavevector[a]);
        }
        g
    }

    pub fn sample(&self, grid: &Grid) -> ComplexField {
        let dim = grid.dim();
        let mut d = *self;
        for a in dim..3 {
            d.center[a] = 0.0;
            d.wavevector[a] = 0.0;
        }
        ComplexField::from_fn(*grid, |x| d.eval(x))
    }

    /// `μ^p u(μx)` as another modulated Gaussian (exact, no interpolation).
    pub fn scaled(&self, mu: f64, power: f64) -> Self {
        Self {
            amplitude: self.amplitude * mu.powf(power),
            sigma: self.sigma / mu,
            center: self.center.map(|c| c / mu),
            wavevector: self.wavevector.map(|k| k * mu),
        }
    }

    /// Rescales the amplitude so the sampled data has discrete `H²` norm
    /// `target`.
    pub fn normalized_h2(&self, grid: &Grid, target: f64) -> Result<Self> {
        let norm = bessel_norm(&self.sample(grid), 2.0);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize data with zero H² norm".into()));
        }
        Ok(Self { amplitude: self.amplitude * target / norm, ..*self })
    }
}
