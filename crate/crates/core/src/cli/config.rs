//! `key = value` experiment files with `[section]` headers and `#`
//! comments. Every key is declared in `SCHEMA`; anything else is an error.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Exponent, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Real,
    Rational,
    Exponent,
    Bool,
    Text,
    /// Comma-separated reals.
    Reals,
    /// Comma-separated rationals.
    Rationals,
}

/// `(section.key, kind, default, help)`; top-level keys have no section.
/// An empty default marks a key that has no default.
pub const SCHEMA: &[(&str, Kind, &str, &str)] = &[
    ("seed", Kind::Int, "0", "seed of every randomized probe"),
    ("out", Kind::Text, "ibnls-out", "output directory"),
    ("params.dim", Kind::Int, "", "spatial dimension N"),
    ("params.b", Kind::Rational, "", "weight exponent b"),
    ("params.alpha", Kind::Rational, "", "nonlinearity power alpha"),
    ("params.lambda", Kind::Text, "1", "1 (defocusing) or -1 (focusing)"),
    ("classify.theorem", Kind::Text, "all", "theorem id or 'all'"),
    ("lemma.id", Kind::Text, "", "3.2, 3.3 or 4.1"),
    ("lemma.theta", Kind::Rational, "", "theta (default: a third of theta_max)"),
    ("lemma.eps", Kind::Rational, "", "epsilon (default: a third of eps_max)"),
    ("grid.m", Kind::Int, "256", "points per axis (power of two)"),
    ("grid.l", Kind::Real, "40", "box length"),
    ("grid.offset", Kind::Bool, "true", "half-cell offset (no node at the origin)"),
    ("solver.dt", Kind::Real, "0.001", "time step"),
    ("solver.t_end", Kind::Real, "1", "final time"),
    ("solver.scheme", Kind::Text, "strang", "strang or picard"),
    ("solver.delta", Kind::Real, "0", "weight regularization delta"),
    ("solver.stride", Kind::Int, "1", "keep every stride-th step"),
    ("solver.dealias", Kind::Bool, "false", "2/3-rule truncation after each step"),
    ("solver.coupling", Kind::Real, "1", "weight multiplier (0 gives the free flow)"),
    ("solver.boundary_tol", Kind::Real, "1e-6", "boundary-mass warning level"),
    ("solver.iterations", Kind::Int, "6", "Picard iterations"),
    ("solver.reference_dt", Kind::Real, "", "Strang reference step for picard (default dt/10)"),
    ("data.amplitude", Kind::Real, "1", "Gaussian amplitude"),
    ("data.sigma", Kind::Real, "1", "Gaussian width"),
    ("data.center", Kind::Reals, "0", "center, one value per axis"),
    ("data.wavevector", Kind::Reals, "0", "modulation wavevector, one value per axis"),
    ("data.h2_norm", Kind::Real, "", "rescale the data to this H^2 norm"),
    ("data.file", Kind::Text, "", "field file used as initial data instead"),
    ("norm.q", Kind::Exponent, "", "time exponent"),
    ("norm.r", Kind::Exponent, "", "space exponent"),
    ("norm.t0", Kind::Real, "0", "window start"),
    ("norm.t1", Kind::Real, "", "window end (default t_end)"),
    ("norm.s", Kind::Rational, "0", "Sobolev level of the Strichartz family"),
    ("norm.kind", Kind::Text, "sup", "sup or inf-dual"),
    ("norm.family_size", Kind::Int, "5", "size of the default family"),
    ("norm.pairs_file", Kind::Text, "", "explicit family (q, r, s per line)"),
    ("norm.fields", Kind::Text, "", "directory of field snapshots instead of a run"),
    ("scaling.mu", Kind::Real, "2", "scaling parameter"),
    ("scaling.s", Kind::Rationals, "", "Sobolev levels (default 0, s_c, 2)"),
    ("scaling.t_probe", Kind::Real, "0", "dynamic comparison time; 0 skips the dynamic check"),
    ("scaling.tol", Kind::Real, "1e-6", "static identity tolerance"),
    ("scaling.dynamic_tol", Kind::Real, "1e-3", "dynamic mismatch tolerance"),
    ("conserve.mass_tol", Kind::Real, "1e-10", "relative mass drift tolerance"),
    ("conserve.energy_ratio", Kind::Real, "3.5", "required drift ratio between dt and dt/2"),
    ("estimate.kind", Kind::Text, "pointwise", "pointwise, gradient, hl or gn"),
    ("estimate.alpha", Kind::Rationals, "1/2, 1, 2, 3", "powers for the pointwise probe"),
    ("estimate.samples", Kind::Int, "100000", "random pairs for the pointwise probe"),
    ("estimate.threshold", Kind::Real, "10", "gradient-ratio bound"),
    ("estimate.v_amplitude", Kind::Real, "0.5", "amplitude of the second gradient test field"),
    ("estimate.v_sigma", Kind::Real, "1.5", "width of the second gradient test field"),
    ("estimate.p", Kind::Rational, "", "HL/GN exponent p"),
    ("estimate.q", Kind::Rational, "", "HL exponent q"),
    ("estimate.s", Kind::Rational, "", "HL/GN derivative order s"),
    ("estimate.rho", Kind::Rational, "", "HL weight exponent rho"),
    ("estimate.p0", Kind::Rational, "", "GN exponent p0"),
    ("estimate.p1", Kind::Rational, "", "GN exponent p1"),
    ("estimate.s1", Kind::Rational, "", "GN derivative order s1"),
    ("estimate.theta", Kind::Rational, "", "GN interpolation weight"),
    ("strichartz.s", Kind::Rational, "0", "Sobolev level"),
    ("strichartz.trials", Kind::Int, "20", "random data"),
    ("perturb.ladder", Kind::Reals, "0.1, 0.01, 0.001, 0.0001", "epsilon rungs"),
    ("perturb.slope_tol", Kind::Real, "0.2", "allowed |slope - 1|"),
    ("perturb.direction_sigma", Kind::Real, "1.5", "width of the data perturbation"),
    ("perturb.forcing_sigma", Kind::Real, "2", "width of the forcing profile"),
    ("perturb.forcing_frequency", Kind::Real, "1", "forcing e(t) = cos(w t) g(x)"),
    ("perturb.m_bound", Kind::Real, "1", "M of the stability statement (INFO)"),
    ("perturb.m_prime", Kind::Real, "1", "M' of the stability statement (INFO)"),
    ("perturb.l_bound", Kind::Real, "1", "L of the stability statement (INFO)"),
    ("perturb.eps", Kind::Real, "0.1", "epsilon of the stability statement (INFO)"),
];

pub fn schema(key: &str) -> Option<(Kind, &'static str)> {
    SCHEMA.iter().find(|e| e.0 == key).map(|e| (e.1, e.2))
}

/// Where a value came from; line 0 means the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(usize),
    Flag,
    Default,
}

#[derive(Debug, Default)]
pub struct ExperimentConfig {
    entries: BTreeMap<String, Entry>,
    /// Line count of the source text, used as the line of missing keys.
    lines: usize,
    resolved: RefCell<BTreeMap<String, (String, Source)>>,
}

impl Clone for ExperimentConfig {
    fn clone(&self) -> Self {
        Self { entries: self.entries.clone(), lines: self.lines, resolved: RefCell::new(self.resolved.borrow().clone()) }
    }
}

fn check_value(kind: Kind, value: &str) -> std::result::Result<(), Error> {
    match kind {
        Kind::Int => value.parse::<u64>().map(|_| ()).map_err(|_| Error::InvalidParams(format!("'{value}' is not a non-negative integer"))),
        Kind::Real => parse_real(value).map(|_| ()),
        Kind::Rational => parse_rational(value).map(|_| ()),
        Kind::Exponent => value.parse::<Exponent>().map(|_| ()),
        Kind::Bool => parse_bool(value).map(|_| ()),
        Kind::Text => Ok(()),
        Kind::Reals => split_list(value).try_for_each(|v| parse_real(v).map(|_| ())),
        Kind::Rationals => split_list(value).try_for_each(|v| parse_rational(v).map(|_| ())),
    }
}

fn parse_real(value: &str) -> Result<f64> {
    match value.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::InvalidParams(format!("'{value}' is not a finite real"))),
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::InvalidParams(format!("'{other}' is not true or false"))),
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim)
}

/// Parses and validates the text. Values are checked against their declared
/// kind here, so a malformed rational fails with its own line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig { lines: text.lines().count(), ..Default::default() };
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Config { line, msg: format!("unterminated section header '{body}'") })?
                .trim();
            if !SCHEMA.iter().any(|e| e.0.split_once('.').is_some_and(|(s, _)| s == name)) {
                return Err(Error::Config { line, msg: format!("unknown section [{name}]") });
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::Config { line, msg: format!("expected 'key = value', got '{body}'") })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config { line, msg: "empty key".into() });
        }
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        cfg.insert(&full, value, line)?;
    }
    Ok(cfg)
}

impl ExperimentConfig {
    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let (kind, _) = schema(key).ok_or_else(|| Error::Config { line, msg: format!("unknown key '{key}'") })?;
        if let Some(prev) = self.entries.get(key) {
            let first = if prev.line == 0 { "the command line".to_string() } else { format!("line {}", prev.line) };
            return Err(Error::Config { line, msg: format!("duplicate key '{key}' (first set on {first}, again on line {line})") });
        }
        check_value(kind, value).map_err(|e| Error::Config { line, msg: format!("{key}: {e}") })?;
        self.entries.insert(key.to_string(), Entry { value: value.to_string(), line });
        Ok(())
    }

    /// Command-line values replace file values.
    pub fn set_flag(&mut self, key: &str, value: &str) -> Result<()> {
        let (kind, _) = schema(key).ok_or_else(|| Error::Usage(format!("unknown key '{key}'")))?;
        check_value(kind, value).map_err(|e| Error::Usage(format!("{key}: {e}")))?;
        self.entries.insert(key.to_string(), Entry { value: value.to_string(), line: 0 });
        Ok(())
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn raw(&self, key: &str) -> Result<Option<(String, usize)>> {
        let (_, default) = schema(key).ok_or_else(|| Error::Usage(format!("internal: undeclared key '{key}'")))?;
        let (value, line, source) = match self.entries.get(key) {
            Some(e) => (e.value.clone(), e.line, if e.line == 0 { Source::Flag } else { Source::File(e.line) }),
            None if default.is_empty() => return Ok(None),
            None => (default.to_string(), 0, Source::Default),
        };
        self.resolved.borrow_mut().insert(key.to_string(), (value.clone(), source));
        Ok(Some((value, line)))
    }

    fn missing(&self, key: &str) -> Error {
        Error::Config { line: self.lines, msg: format!("missing required key '{key}'") }
    }

    fn typed<T>(&self, key: &str, f: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        match self.raw(key)? {
            None => Ok(None),
            Some((v, line)) => f(&v).map(Some).map_err(|e| Error::Config { line, msg: format!("{key}: {e}") }),
        }
    }

    fn required<T>(&self, key: &str, f: impl Fn(&str) -> Result<T>) -> Result<T> {
        self.typed(key, f)?.ok_or_else(|| self.missing(key))
    }

    pub fn opt_real(&self, key: &str) -> Result<Option<f64>> {
        self.typed(key, parse_real)
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        self.required(key, parse_real)
    }

    pub fn int(&self, key: &str) -> Result<u64> {
        self.required(key, |v| v.parse::<u64>().map_err(|_| Error::InvalidParams(format!("'{v}' is not an integer"))))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.int(key)?;
        usize::try_from(v).map_err(|_| Error::InvalidParams(format!("{key} = {v} is too large")))
    }

    pub fn opt_rational(&self, key: &str) -> Result<Option<Q>> {
        self.typed(key, parse_rational)
    }

    pub fn rational(&self, key: &str) -> Result<Q> {
        self.required(key, parse_rational)
    }

    pub fn exponent(&self, key: &str) -> Result<Exponent> {
        self.required(key, |v| v.parse::<Exponent>())
    }

    pub fn boolean(&self, key: &str) -> Result<bool> {
        self.required(key, parse_bool)
    }

    pub fn opt_text(&self, key: &str) -> Result<Option<String>> {
        self.typed(key, |v| Ok(v.to_string()))
    }

    pub fn text(&self, key: &str) -> Result<String> {
        self.required(key, |v| Ok(v.to_string()))
    }

    pub fn reals(&self, key: &str) -> Result<Vec<f64>> {
        self.required(key, |v| split_list(v).map(parse_real).collect())
    }

    pub fn opt_rationals(&self, key: &str) -> Result<Option<Vec<Q>>> {
        self.typed(key, |v| split_list(v).map(parse_rational).collect())
    }

    pub fn seed(&self) -> Result<u64> {
        self.int("seed")
    }

    pub fn out_dir(&self) -> Result<PathBuf> {
        Ok(PathBuf::from(self.text("out")?))
    }

    /// Every value read so far, with its origin, in key order.
    pub fn resolved(&self) -> Vec<(String, String, Source)> {
        self.resolved.borrow().iter().map(|(k, (v, s))| (k.clone(), v.clone(), s.clone())).collect()
    }
}
