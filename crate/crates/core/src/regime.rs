//! Criticality classification and theorem-hypothesis checks.
//!
//! All comparisons are exact; the hypotheses are strict inequalities whose
//! boundary cases matter (e.g. `alpha = (8-2b)/N` is mass-critical, never
//! intercritical).

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, q, to_f64, Q};

/// Sign of the nonlinear term: `+1` defocusing, `-1` focusing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lambda {
    Defocusing,
    Focusing,
}

impl Lambda {
    pub fn value(self) -> f64 {
        match self {
            Lambda::Defocusing => 1.0,
            Lambda::Focusing => -1.0,
        }
    }

    pub fn from_sign(s: i64) -> Result<Self> {
        match s {
            1 => Ok(Lambda::Defocusing),
            -1 => Ok(Lambda::Focusing),
            other => Err(Error::InvalidParams(format!("lambda must be +1 or -1, got {other}"))),
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Defocusing => write!(f, "1"),
            Lambda::Focusing => write!(f, "-1"),
        }
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "+1" => Ok(Lambda::Defocusing),
            "-1" => Ok(Lambda::Focusing),
            other => Err(Error::InvalidParams(format!("lambda must be +1 or -1, got '{other}'"))),
        }
    }
}

/// The quadruple `(N, b, alpha, lambda)` defining one instance of the equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    dim: u32,
    b: Q,
    alpha: Q,
    lambda: Lambda,
}

impl ProblemParams {
    pub fn new(dim: u32, b: Q, alpha: Q, lambda: Lambda) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be >= 1".into()));
        }
        if !b.is_positive() {
            return Err(Error::InvalidParams(format!("b must be > 0, got {b}")));
        }
        if !alpha.is_positive() {
            return Err(Error::InvalidParams(format!("alpha must be > 0, got {alpha}")));
        }
        Ok(Self { dim, b, alpha, lambda })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn n(&self) -> Q {
        int(self.dim as i64)
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn b_f64(&self) -> f64 {
        to_f64(&self.b)
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha)
    }

    /// `s_c = N/2 - (4-b)/alpha`.
    pub fn critical_sobolev(&self) -> Q {
        self.n() / int(2) - (int(4) - &self.b) / &self.alpha
    }

    /// Scaling exponent `(4-b)/alpha` of `u_mu = mu^{(4-b)/alpha} u(mu^4 t, mu x)`.
    pub fn scaling_power(&self) -> Q {
        (int(4) - &self.b) / &self.alpha
    }

    /// `4*`: `(8-2b)/(N-4)` for `N >= 5`, `None` (+∞) for `N <= 4`.
    pub fn four_star(&self) -> Option<Q> {
        (self.dim >= 5).then(|| (int(8) - int(2) * &self.b) / int(self.dim as i64 - 4))
    }

    /// Lower end of the intercritical range, `(8-2b)/N`.
    pub fn mass_critical_alpha(&self) -> Q {
        (int(8) - int(2) * &self.b) / self.n()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criticality {
    MassSubcritical,
    MassCritical,
    Intercritical,
    EnergyCritical,
    EnergySupercritical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport {
    pub s_c: Q,
    /// `None` encodes `+∞` (dimensions 1 to 4).
    pub four_star: Option<Q>,
    pub klass: Criticality,
}

impl CriticalityReport {
    pub fn four_star_string(&self) -> String {
        self.four_star.as_ref().map_or_else(|| "inf".to_string(), |x| x.to_string())
    }
}

pub fn critical_index(params: &ProblemParams) -> CriticalityReport {
    let s_c = params.critical_sobolev();
    let two = int(2);
    let klass = if s_c.is_negative() {
        Criticality::MassSubcritical
    } else if s_c.is_zero() {
        Criticality::MassCritical
    } else if s_c < two {
        Criticality::Intercritical
    } else if s_c == two {
        Criticality::EnergyCritical
    } else {
        Criticality::EnergySupercritical
    };
    CriticalityReport { s_c, four_star: params.four_star(), klass }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    ThmAI,
    ThmAII,
    ThmAIII,
    ThmAIV,
    ThmGwpH2,
    ThmGwpH2N5,
    CorN5,
    ThmEnergyCritical,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::ThmAI,
        TheoremId::ThmAII,
        TheoremId::ThmAIII,
        TheoremId::ThmAIV,
        TheoremId::ThmGwpH2,
        TheoremId::ThmGwpH2N5,
        TheoremId::CorN5,
        TheoremId::ThmEnergyCritical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::ThmAI => "ThmA_i",
            TheoremId::ThmAII => "ThmA_ii",
            TheoremId::ThmAIII => "ThmA_iii",
            TheoremId::ThmAIV => "ThmA_iv",
            TheoremId::ThmGwpH2 => "Thm_GWPH2",
            TheoremId::ThmGwpH2N5 => "Thm_GWPH2_N5",
            TheoremId::CorN5 => "Cor_N5",
            TheoremId::ThmEnergyCritical => "Thm_EnergyCritical",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::Usage(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisVerdict {
    pub theorem_id: TheoremId,
    pub satisfied: bool,
    pub failed_conditions: Vec<String>,
}

/// Collects the violated conditions of a hypothesis list.
#[derive(Default)]
pub(crate) struct Conditions {
    failed: Vec<String>,
}

impl Conditions {
    fn record(&mut self, ok: bool, text: String) {
        if !ok {
            self.failed.push(text);
        }
    }

    pub(crate) fn lt(&mut self, lhs: (&str, &Q), rhs: (&str, &Q)) {
        self.record(lhs.1 < rhs.1, fmt_cond(lhs, "<", rhs));
    }

    pub(crate) fn le(&mut self, lhs: (&str, &Q), rhs: (&str, &Q)) {
        self.record(lhs.1 <= rhs.1, fmt_cond(lhs, "<=", rhs));
    }

    pub(crate) fn eq(&mut self, lhs: (&str, &Q), rhs: (&str, &Q)) {
        self.record(lhs.1 == rhs.1, fmt_cond(lhs, "=", rhs));
    }

    pub(crate) fn dim_in(&mut self, n: u32, lo: u32, hi: Option<u32>) {
        let ok = n >= lo && hi.is_none_or(|h| n <= h);
        let text = match hi {
            Some(h) if h == lo => format!("N = {lo} [N = {n}]"),
            Some(h) => format!("{lo} <= N <= {h} [N = {n}]"),
            None => format!("N >= {lo} [N = {n}]"),
        };
        self.record(ok, text);
    }

    pub(crate) fn into_failed(self) -> Vec<String> {
        self.failed
    }
}

fn fmt_cond(lhs: (&str, &Q), op: &str, rhs: (&str, &Q)) -> String {
    let side = |(name, v): (&str, &Q)| {
        let lit = v.to_string();
        if name == lit { lit } else { name.to_string() }
    };
    format!("{} {op} {} [{} {op} {}]", side(lhs), side(rhs), lhs.1, rhs.1)
}

fn intercritical_conditions(c: &mut Conditions, p: &ProblemParams, upper: Option<(&str, Q)>) {
    let lower = p.mass_critical_alpha();
    c.lt(("(8-2b)/N", &lower), ("alpha", p.alpha()));
    if let Some((name, up)) = upper {
        c.lt(("alpha", p.alpha()), (name, &up));
    }
}

pub fn check_theorem(params: &ProblemParams, theorem: TheoremId) -> HypothesisVerdict {
    let mut c = Conditions::default();
    let n = params.dim();
    let nq = params.n();
    let b = params.b();
    let alpha = params.alpha();
    let zero = Q::zero();
    let four = int(4);
    let four_star = params.four_star();
    let four_star_bound = || four_star.clone().map(|x| ("4*", x));

    match theorem {
        TheoremId::ThmAI => {
            c.dim_in(n, 8, None);
            c.lt(("0", &zero), ("b", b));
            c.lt(("b", b), ("4", &four));
            intercritical_conditions(&mut c, params, four_star_bound());
        }
        TheoremId::ThmAII => {
            c.dim_in(n, 5, Some(7));
            let upper = (nq.clone() - int(2) * b) / (nq.clone() - int(4));
            intercritical_conditions(&mut c, params, Some(("(N-2b)/(N-4)", upper)));
            c.lt(("0", &zero), ("b", b));
            let bb = (nq.clone() * &nq - int(8) * &nq + int(32)) / int(8);
            c.lt(("b", b), ("(N^2-8N+32)/8", &bb));
        }
        TheoremId::ThmAIII => {
            c.dim_in(n, 6, Some(7));
            c.lt(("0", &zero), ("b", b));
            c.lt(("b", b), ("N-4", &(nq.clone() - int(4))));
            intercritical_conditions(&mut c, params, four_star_bound());
        }
        TheoremId::ThmAIV => {
            c.dim_in(n, 3, Some(4));
            c.lt(("0", &zero), ("b", b));
            c.lt(("b", b), ("N/2", &(nq.clone() / int(2))));
            intercritical_conditions(&mut c, params, None);
        }
        TheoremId::ThmGwpH2 => {
            c.dim_in(n, 3, None);
            c.lt(("0", &zero), ("b", b));
            c.lt(("b", b), ("N/2", &(nq.clone() / int(2))));
            c.lt(("b", b), ("4", &four));
            intercritical_conditions(&mut c, params, four_star_bound());
            if n == 5 {
                c.lt(("alpha", alpha), ("7-2b", &(int(7) - int(2) * b)));
            }
        }
        TheoremId::ThmGwpH2N5 => {
            c.dim_in(n, 5, Some(5));
            c.lt(("0", &zero), ("b", b));
            c.le(("b", b), ("3/2", &q(3, 2)));
            let upper = int(8) - int(2) * b;
            intercritical_conditions(&mut c, params, Some(("8-2b", upper)));
        }
        TheoremId::CorN5 => {
            c.dim_in(n, 5, Some(5));
            c.lt(("0", &zero), ("b", b));
            c.lt(("b", b), ("5/2", &q(5, 2)));
            let low = params.mass_critical_alpha().min(Q::one());
            c.lt(("min{1, (8-2b)/5}", &low), ("alpha", alpha));
            c.lt(("alpha", alpha), ("8-2b", &(int(8) - int(2) * b)));
        }
        TheoremId::ThmEnergyCritical => {
            c.dim_in(n, 5, Some(11));
            if n >= 5 {
                let crit = (int(8) - int(2) * b) / (nq.clone() - int(4));
                c.eq(("alpha", alpha), ("(8-2b)/(N-4)", &crit));
                c.lt(("0", &zero), ("b", b));
                let bmax = (int(12) - nq.clone()) / (nq.clone() - int(2));
                c.lt(("b", b), ("(12-N)/(N-2)", &bmax));
            }
        }
    }

    let failed_conditions = c.into_failed();
    HypothesisVerdict { theorem_id: theorem, satisfied: failed_conditions.is_empty(), failed_conditions }
}

/// The smallness threshold for the free-evolution norm in the `N = 5`
/// contraction argument:
///
/// `min{ (1/(2 c^{θ+2} 2^{α+1} η^{θ+1}))^{1/(α-1-θ)}, (1/(2 c^{θ+1} 2^{α+1} η^θ))^{1/(α-θ)} }`.
///
/// The roots are irrational in general, so the result is a float. Logs are
/// used so that large exponents do not overflow before the root is taken.
pub fn smallness_threshold(c: &Q, eta: &Q, alpha: &Q, theta: &Q) -> Result<f64> {
    if !c.is_positive() || !eta.is_positive() {
        return Err(Error::Domain("c and eta must be positive".into()));
    }
    let e1 = alpha - Q::one() - theta;
    let e2 = alpha - theta;
    if !e1.is_positive() || !e2.is_positive() {
        return Err(Error::Domain(format!(
            "root orders alpha-1-theta = {e1} and alpha-theta = {e2} must be positive"
        )));
    }
    let ln_c = to_f64(c).ln();
    let ln_eta = to_f64(eta).ln();
    let th = to_f64(theta);
    let ln_pow2 = (to_f64(alpha) + 1.0) * std::f64::consts::LN_2;
    let ln_first = -(std::f64::consts::LN_2 + (th + 2.0) * ln_c + ln_pow2 + (th + 1.0) * ln_eta);
    let ln_second = -(std::f64::consts::LN_2 + (th + 1.0) * ln_c + ln_pow2 + th * ln_eta);
    let first = (ln_first / to_f64(&e1)).exp();
    let second = (ln_second / to_f64(&e2)).exp();
    Ok(first.min(second))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, b: Q, alpha: Q) -> ProblemParams {
        ProblemParams::new(n, b, alpha, Lambda::Defocusing).unwrap()
    }

    #[test]
    fn mass_critical_example() {
        let r = critical_index(&params(5, int(1), q(6, 5)));
        assert_eq!(r.s_c, Q::zero());
        assert_eq!(r.klass, Criticality::MassCritical);
    }

    #[test]
    fn energy_critical_example() {
        let r = critical_index(&params(6, int(1), int(3)));
        assert_eq!(r.s_c, int(2));
        assert_eq!(r.klass, Criticality::EnergyCritical);
        assert_eq!(r.four_star, Some(int(3)));
    }

    #[test]
    fn four_star_infinite_below_five() {
        let r = critical_index(&params(4, int(1), int(1)));
        assert_eq!(r.four_star, None);
        assert_eq!(r.four_star_string(), "inf");
        // s_c = 2 - 3 = -1
        assert_eq!(r.klass, Criticality::MassSubcritical);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(ProblemParams::new(3, int(1), Q::zero(), Lambda::Focusing).is_err());
        assert!(ProblemParams::new(3, Q::zero(), int(1), Lambda::Focusing).is_err());
        assert!(ProblemParams::new(0, int(1), int(1), Lambda::Focusing).is_err());
        assert!(Lambda::from_sign(0).is_err());
    }

    #[test]
    fn gwph2_satisfied_in_dimension_six() {
        let v = check_theorem(&params(6, int(1), int(2)), TheoremId::ThmGwpH2);
        assert!(v.satisfied, "{:?}", v.failed_conditions);
    }

    #[test]
    fn n5_theorem_fails_on_b() {
        let v = check_theorem(&params(5, int(2), int(1)), TheoremId::ThmGwpH2N5);
        assert!(!v.satisfied);
        assert_eq!(v.failed_conditions.len(), 1, "{:?}", v.failed_conditions);
        assert!(v.failed_conditions[0].starts_with("b <= 3/2"));
    }

    #[test]
    fn energy_critical_theorem_example() {
        let v = check_theorem(&params(6, int(1), int(3)), TheoremId::ThmEnergyCritical);
        assert!(v.satisfied, "{:?}", v.failed_conditions);
        let v = check_theorem(&params(6, q(3, 2), q(5, 2)), TheoremId::ThmEnergyCritical);
        assert!(!v.satisfied);
        let v = check_theorem(&params(12, q(1, 100), q(199, 100)), TheoremId::ThmEnergyCritical);
        assert!(!v.satisfied);
    }

    #[test]
    fn theorem_a_clause_ii_strict() {
        // N = 5: (N^2-8N+32)/8 = 17/8; alpha upper (N-2b)/(N-4) = 5-2b.
        let v = check_theorem(&params(5, int(1), int(2)), TheoremId::ThmAII);
        assert!(v.satisfied, "{:?}", v.failed_conditions);
        let v = check_theorem(&params(5, int(1), int(3)), TheoremId::ThmAII);
        assert!(!v.satisfied);
    }

    #[test]
    fn boundary_is_mass_critical_not_intercritical() {
        let p = params(6, int(1), int(1));
        assert_eq!(critical_index(&p).klass, Criticality::MassCritical);
        let v = check_theorem(&p, TheoremId::ThmGwpH2);
        assert!(!v.satisfied);
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.name().parse::<TheoremId>().unwrap(), t);
        }
        assert!("Thm_Nope".parse::<TheoremId>().is_err());
    }

    #[test]
    fn smallness_threshold_examples() {
        let d = smallness_threshold(&int(1), &int(1), &int(2), &int(0)).unwrap();
        assert!((d - 1.0 / 16.0).abs() < 1e-15);
        let d = smallness_threshold(&int(1), &int(1), &int(3), &int(0)).unwrap();
        assert!((d - (1.0f64 / 32.0).sqrt()).abs() < 1e-15);
        assert!(matches!(
            smallness_threshold(&int(1), &int(1), &int(2), &int(1)),
            Err(Error::Domain(_))
        ));
    }
}
