//! Closed-form exponent families of the nonlinear estimates, checked exactly.
//!
//! Each builder evaluates the closed forms for `(N, b, alpha)` and a pair of
//! small parameters `(theta, eps)`, then records every relation the
//! estimates rely on as an [`Identity`]. Under valid inputs every identity
//! holds; the report never hides a failing one.
//!
//! "theta, eps sufficiently small" is made concrete through [`Margin`]s:
//! each strict inequality that depends on the small parameters is written
//! (after clearing positive denominators) as `c0 + c1 theta + c2 eps > 0`.
//! `theta_max` is the smallest root over margins decreasing in theta (at
//! `eps = 0`), likewise `eps_max`. The default evaluation point is a third
//! of each maximum, which satisfies every margin jointly (halves can land
//! exactly on a margin that decreases in both parameters).

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::{gn_exponent_check, is_admissible, ExponentPair};
use crate::error::{Error, Result};
use crate::rational::{int, q, Exponent, Q};
use crate::regime::Conditions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// Improved gradient estimate, `N = 5, 6, 7`.
    L32,
    /// `N = 5` estimates with the `(a*, r*)` norm.
    L33,
    /// Energy-critical estimates, `5 <= N <= 11`.
    L41,
}

impl Lemma {
    pub fn name(self) -> &'static str {
        match self {
            Lemma::L32 => "3.2",
            Lemma::L33 => "3.3",
            Lemma::L41 => "4.1",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "3.2" => Ok(Lemma::L32),
            "3.3" => Ok(Lemma::L33),
            "4.1" => Ok(Lemma::L41),
            other => Err(Error::Usage(format!("unknown lemma '{other}' (expected 3.2, 3.3 or 4.1)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Lt,
    Le,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Le => "<=",
        }
    }

    fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub name: String,
    pub lhs: Q,
    pub rhs: Q,
    pub relation: Relation,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedPair {
    pub name: String,
    pub pair: ExponentPair,
    pub admissible: bool,
}

/// A strict inequality `constant + theta_coef * theta + eps_coef * eps > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub name: &'static str,
    pub constant: Q,
    pub theta_coef: Q,
    pub eps_coef: Q,
}

impl Margin {
    fn new(name: &'static str, constant: Q, theta_coef: Q, eps_coef: Q) -> Self {
        Self { name, constant, theta_coef, eps_coef }
    }

    pub fn at(&self, theta: &Q, eps: &Q) -> Q {
        &self.constant + &self.theta_coef * theta + &self.eps_coef * eps
    }
}

/// Requested small parameters; `None` selects a third of the window maximum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Smallness {
    pub theta: Option<Q>,
    pub eps: Option<Q>,
}

impl Smallness {
    pub fn new(theta: Option<Q>, eps: Option<Q>) -> Self {
        Self { theta, eps }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaExponentReport {
    pub lemma: Lemma,
    pub dim: u32,
    pub b: Q,
    pub alpha: Q,
    pub s_c: Q,
    pub theta: Q,
    /// Zero where the lemma has no `eps`.
    pub eps: Q,
    pub pairs: Vec<NamedPair>,
    pub auxiliaries: Vec<(String, Q)>,
    pub identities: Vec<Identity>,
    pub theta_max: Q,
    pub eps_max: Q,
    pub margins: Vec<Margin>,
    pub notes: Vec<String>,
}

impl LemmaExponentReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Identity> {
        self.identities.iter().filter(|i| !i.holds)
    }

    pub fn pair(&self, name: &str) -> Option<&NamedPair> {
        self.pairs.iter().find(|p| p.name == name)
    }

    pub fn aux(&self, name: &str) -> Option<&Q> {
        self.auxiliaries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn identity(&self, name: &str) -> Option<&Identity> {
        self.identities.iter().find(|i| i.name == name)
    }

    fn pair_entry(&mut self, name: &str, q: impl Into<Exponent>, r: Q, s: Q) {
        let pair = ExponentPair::new(q, r, s);
        let admissible = is_admissible(&pair.q, &pair.r, &pair.s, self.dim);
        self.pairs.push(NamedPair { name: name.to_string(), pair, admissible });
    }

    fn aux_entry(&mut self, name: &str, v: &Q) {
        self.auxiliaries.push((name.to_string(), v.clone()));
    }

    fn check(&mut self, name: impl Into<String>, lhs: Q, relation: Relation, rhs: Q) {
        let holds = relation.holds(&lhs, &rhs);
        self.identities.push(Identity { name: name.into(), lhs, rhs, relation, holds });
    }

    fn expect_eq(&mut self, name: impl Into<String>, lhs: Q, rhs: Q) {
        self.check(name, lhs, Relation::Eq, rhs);
    }

    fn expect_lt(&mut self, name: impl Into<String>, lhs: Q, rhs: Q) {
        self.check(name, lhs, Relation::Lt, rhs);
    }
}

struct Window {
    theta_max: Q,
    eps_max: Q,
}

fn window(margins: &[Margin]) -> Result<Window> {
    let bad: Vec<String> = margins
        .iter()
        .filter(|m| !m.constant.is_positive())
        .map(|m| format!("margin '{}' is not positive at theta = eps = 0 (value {})", m.name, m.constant))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Precondition(bad));
    }
    let root_min = |coef: fn(&Margin) -> &Q| {
        margins
            .iter()
            .filter(|m| coef(m).is_negative())
            .map(|m| &m.constant / -coef(m))
            .min()
            .unwrap_or_else(Q::zero)
    };
    Ok(Window { theta_max: root_min(|m| &m.theta_coef), eps_max: root_min(|m| &m.eps_coef) })
}

fn choose(
    requested: Option<&Q>,
    max: &Q,
    name: &'static str,
) -> Result<Q> {
    let value = requested.cloned().unwrap_or_else(|| max / int(3));
    if !value.is_positive() || value >= *max {
        return Err(Error::Range { name, value: value.to_string(), max: max.to_string(), detail: String::new() });
    }
    Ok(value)
}

fn check_joint(margins: &[Margin], theta: &Q, eps: &Q) -> Result<()> {
    if let Some(m) = margins.iter().find(|m| !m.at(theta, eps).is_positive()) {
        return Err(Error::Range {
            name: "theta",
            value: theta.to_string(),
            max: "joint window".into(),
            detail: format!(" (with eps = {eps}, margin '{}' fails)", m.name),
        });
    }
    Ok(())
}

fn precondition(c: Conditions) -> Result<()> {
    let failed = c.into_failed();
    if failed.is_empty() { Ok(()) } else { Err(Error::Precondition(failed)) }
}

fn critical_index(n: u32, b: &Q, alpha: &Q) -> Q {
    int(n as i64) / int(2) - (int(4) - b) / alpha
}

// ---------------------------------------------------------------------------
// Lemma 3.2: N = 5, 6, 7
// ---------------------------------------------------------------------------

fn lemma32_hypotheses(n: u32, b: &Q, alpha: &Q) -> Result<()> {
    let mut c = Conditions::default();
    c.dim_in(n, 5, Some(7));
    let nq = int(n as i64);
    c.lt(("0", &Q::zero()), ("b", b));
    c.lt(("b", b), ("N/2", &(nq.clone() / int(2))));
    c.lt(("b", b), ("4", &int(4)));
    let low = (int(8) - int(2) * b) / &nq;
    c.lt(("(8-2b)/N", &low), ("alpha", alpha));
    if n >= 5 {
        let four_star = (int(8) - int(2) * b) / int(n as i64 - 4);
        c.lt(("alpha", alpha), ("4*", &four_star));
    }
    if n == 5 {
        c.lt(("alpha", alpha), ("7-2b", &(int(7) - int(2) * b)));
    }
    precondition(c)
}

/// Margins shared by both branches: the Hardy–Littlewood exponent `beta`
/// must satisfy `1 < beta < N` for both `r1` choices, and `gamma > 0`.
fn beta_margins_32(n: u32, b: &Q, s_c: &Q) -> Vec<Margin> {
    let nq = int(n as i64);
    let two_minus = int(2) - s_c;
    let zero = Q::zero;
    vec![
        // N/beta_ball = (N+2)/2 - b - theta(2 - s_c)
        Margin::new("beta_ball < N", nq.clone() / int(2) - b, -two_minus.clone(), zero()),
        Margin::new("1 < beta_ball", (nq.clone() - int(2)) / int(2) + b, two_minus, zero()),
        // N/beta_complement = (N+2)/2 - b + theta s_c
        Margin::new("beta_complement < N", nq.clone() / int(2) - b, s_c.clone(), zero()),
        Margin::new("1 < beta_complement", (nq - int(2)) / int(2) + b, -s_c.clone(), zero()),
        // N/gamma_complement = b - theta s_c
        Margin::new("0 < N/gamma_complement", b.clone(), -s_c.clone(), zero()),
    ]
}

fn lemma32_margins(n: u32, b: &Q, alpha: &Q, s_c: &Q) -> Vec<Margin> {
    let nq = int(n as i64);
    let four_b = int(4) - b;
    let mut m = vec![Margin::new("theta < alpha", alpha.clone(), -Q::one(), Q::zero())];
    if n == 5 {
        // r = 10 alpha (alpha - theta) / (alpha(7-2b) - 2 theta (4-b) - 2 eps alpha)
        let seven = int(7) - int(2) * b;
        m.push(Margin::new("eps < 3/2", q(3, 2), Q::zero(), -Q::one()));
        m.push(Margin::new("0 < r", alpha * &seven, -int(2) * &four_b, -int(2) * alpha));
        m.push(Margin::new(
            "r < 10",
            alpha * (seven - alpha),
            -(int(8) - int(2) * b - alpha),
            -int(2) * alpha,
        ));
    } else {
        let denom0 = alpha * (nq.clone() + int(4) - int(2) * b);
        m.push(Margin::new("0 < r_bar", denom0.clone(), -int(2) * &four_b, Q::zero()));
        m.push(Margin::new(
            "r_bar < N",
            denom0 - int(2) * alpha * (alpha + Q::one()),
            int(2) * (alpha - &four_b),
            Q::zero(),
        ));
        let na = &nq * alpha;
        m.push(Margin::new(
            "0 < q_bar",
            alpha * (na.clone() - int(4) + int(2) * b),
            -(na - int(8) + int(2) * b),
            Q::zero(),
        ));
    }
    m.extend(beta_margins_32(n, b, s_c));
    m
}

/// Records the Hölder/Sobolev chain of the gradient estimate for one region
/// (`ball` or `complement`):
///
/// `N/gamma = (N+2)/2 - N/beta`, `N/beta = N/r1 + N(alpha-theta)/r + N/r2`.
#[allow(clippy::too_many_arguments)]
fn gradient_chain(
    rep: &mut LemmaExponentReport,
    tag: &str,
    n_over_r1: Q,
    main_term: &Q,
    n_over_r2: &Q,
    theta: &Q,
    b: &Q,
    alpha: &Q,
    s_c: &Q,
) {
    let nq = int(rep.dim as i64);
    let ball = tag == "ball";
    let n_over_beta = if ball {
        (nq.clone() + int(2)) / int(2) - b - theta * (int(2) - s_c)
    } else {
        (nq.clone() + int(2)) / int(2) - b + theta * s_c
    };
    rep.expect_eq(
        format!("LGR1 chain ({tag}): N/beta = N/r1 + N(alpha-theta)/r + N/r2"),
        n_over_beta.clone(),
        &n_over_r1 + main_term + n_over_r2,
    );
    let n_over_gamma = (nq.clone() + int(2)) / int(2) - &n_over_beta;
    let reduced = &n_over_gamma - b;
    rep.expect_eq(
        format!("LGr2 ({tag}): N/gamma - b = theta(4-b)/alpha - N/r1"),
        reduced.clone(),
        theta * (int(4) - b) / alpha - &n_over_r1,
    );
    if ball {
        rep.expect_eq("N/gamma - b = theta(2-s_c) (ball)", reduced.clone(), theta * (int(2) - s_c));
        rep.expect_lt("0 < N/gamma - b (ball)", Q::zero(), reduced);
    } else {
        rep.expect_eq("N/gamma - b = -theta s_c (complement)", reduced.clone(), -(theta * s_c));
        rep.expect_lt("N/gamma - b < 0 (complement)", reduced, Q::zero());
    }
    rep.expect_lt(format!("0 < N/gamma ({tag})"), Q::zero(), n_over_gamma.clone());
    rep.expect_lt(format!("1 < beta ({tag})"), Q::one(), &nq / &n_over_beta);
    rep.expect_lt(format!("beta < N ({tag})"), &nq / &n_over_beta, nq.clone());
    rep.aux_entry(&format!("beta_{tag}"), &(&nq / &n_over_beta));
    if n_over_gamma.is_positive() {
        rep.aux_entry(&format!("gamma_{tag}"), &(&nq / &n_over_gamma));
    }
    if n_over_r1.is_positive() {
        rep.aux_entry(&format!("r1_{tag}"), &(&nq / &n_over_r1));
    }
}

fn new_report(lemma: Lemma, n: u32, b: &Q, alpha: &Q, theta: Q, eps: Q, w: &Window, margins: Vec<Margin>) -> LemmaExponentReport {
    LemmaExponentReport {
        lemma,
        dim: n,
        b: b.clone(),
        alpha: alpha.clone(),
        s_c: critical_index(n, b, alpha),
        theta,
        eps,
        pairs: Vec::new(),
        auxiliaries: Vec::new(),
        identities: Vec::new(),
        theta_max: w.theta_max.clone(),
        eps_max: w.eps_max.clone(),
        margins,
        notes: Vec::new(),
    }
}

fn build_lemma32(rep: &mut LemmaExponentReport) {
    let n = rep.dim;
    let nq = int(n as i64);
    let (b, alpha, s_c) = (rep.b.clone(), rep.alpha.clone(), rep.s_c.clone());
    let (theta, eps) = (rep.theta.clone(), rep.eps.clone());
    let half = q(1, 2);
    let am = &alpha - &theta;
    let (r_main, n_over_r2) = if n == 5 {
        let q_eps = int(8) / (int(3) - int(2) * &eps);
        let r_eps = int(5) / (Q::one() + &eps);
        let a = int(8) * &am / (Q::one() + int(2) * &eps);
        let r = int(10) * &alpha * &am
            / (&alpha * (int(7) - int(2) * &b) - int(2) * &theta * (int(4) - &b) - int(2) * &eps * &alpha);
        rep.pair_entry("q_eps", q_eps.clone(), r_eps.clone(), Q::zero());
        rep.pair_entry("a", a.clone(), r.clone(), s_c.clone());
        rep.aux_entry("q_eps", &q_eps);
        rep.aux_entry("r_eps", &r_eps);
        rep.aux_entry("a", &a);
        rep.aux_entry("r", &r);
        rep.expect_eq("q_eps scaling: 4/q_eps = N/2 - N/r_eps", int(4) / &q_eps, &nq / int(2) - &nq / &r_eps);
        rep.expect_eq("a scaling: 4/a = N/2 - N/r - s_c", int(4) / &a, &nq / int(2) - &nq / &r - &s_c);
        rep.expect_eq("1/2 = (alpha-theta)/a + 1/q_eps", half, &am / &a + q_eps.recip());
        rep.expect_lt("r < 10", r.clone(), int(10));
        rep.expect_lt("r_eps < 5", r_eps.clone(), int(5));
        // grad u in L^{r3} from Delta u in L^{r_eps}: N/r3 = N/r_eps - 1
        let n_over_r3 = &nq / &r_eps - Q::one();
        rep.expect_lt("0 < N/r3", Q::zero(), n_over_r3.clone());
        (r, n_over_r3)
    } else {
        let a1 = &alpha + Q::one() - &theta;
        let na = &nq * &alpha;
        let abar = int(8) * &alpha * &a1 / (int(8) - int(2) * &b - &alpha * (&nq - int(4)));
        let rbar = int(2) * &alpha * &nq * &a1
            / (&alpha * (&nq + int(4) - int(2) * &b) - int(2) * &theta * (int(4) - &b));
        let qbar = int(8) * &alpha * &a1
            / (&alpha * (&na - int(4) + int(2) * &b) - &theta * (&na - int(8) + int(2) * &b));
        rep.pair_entry("q_bar", qbar.clone(), rbar.clone(), Q::zero());
        rep.pair_entry("a_bar", abar.clone(), rbar.clone(), s_c.clone());
        rep.aux_entry("a_bar", &abar);
        rep.aux_entry("r_bar", &rbar);
        rep.aux_entry("q_bar", &qbar);
        rep.expect_eq("q_bar scaling: 4/q_bar = N/2 - N/r_bar", int(4) / &qbar, &nq / int(2) - &nq / &rbar);
        rep.expect_eq("a_bar scaling: 4/a_bar = N/2 - N/r_bar - s_c", int(4) / &abar, &nq / int(2) - &nq / &rbar - &s_c);
        rep.expect_eq("holglo: 1/2 = (alpha-theta)/a_bar + 1/q_bar", half, &am / &abar + qbar.recip());
        rep.expect_lt("r_bar < N", rbar.clone(), nq.clone());
        // Sobolev: 1 = N/r_bar - N/r2
        let n_over_r2 = &nq / &rbar - Q::one();
        (rbar, n_over_r2)
    };
    let main_term = &nq * &am / &r_main;
    // theta r1 = 2N/(N-4) inside the ball, theta r1 = 2 outside.
    let n_over_r1_ball = &theta * (&nq - int(4)) / int(2);
    let n_over_r1_comp = &theta * &nq / int(2);
    gradient_chain(rep, "ball", n_over_r1_ball, &main_term, &n_over_r2, &theta, &b, &alpha, &s_c);
    gradient_chain(rep, "complement", n_over_r1_comp, &main_term, &n_over_r2, &theta, &b, &alpha, &s_c);
}

/// Builds the exponent report of the improved gradient estimate
/// (`N = 6, 7`: `a_bar, r_bar, q_bar`; `N = 5`: `q_eps, r_eps, a, r`).
///
/// `eps` is only used for `N = 5` and must be left unset otherwise.
pub fn lemma32_exponents(n: u32, b: &Q, alpha: &Q, small: &Smallness) -> Result<LemmaExponentReport> {
    lemma32_hypotheses(n, b, alpha)?;
    let s_c = critical_index(n, b, alpha);
    let margins = lemma32_margins(n, b, alpha, &s_c);
    let w = window(&margins)?;
    let theta = choose(small.theta.as_ref(), &w.theta_max, "theta")?;
    let eps = if n == 5 {
        choose(small.eps.as_ref(), &w.eps_max, "eps")?
    } else {
        if small.eps.as_ref().is_some_and(|e| !e.is_zero()) {
            return Err(Error::Usage("eps is only used by lemma 3.2 when N = 5".into()));
        }
        Q::zero()
    };
    check_joint(&margins, &theta, &eps)?;
    let mut rep = new_report(Lemma::L32, n, b, alpha, theta, eps, &w, margins);
    build_lemma32(&mut rep);
    Ok(rep)
}

/// Evaluates the same closed forms at an arbitrary `(theta, eps)`, skipping
/// the window check. `theta = 0` gives the formal limit, where the strict
/// sign conditions of the chain degenerate to equalities.
pub fn lemma32_at(n: u32, b: &Q, alpha: &Q, theta: &Q, eps: &Q) -> Result<LemmaExponentReport> {
    lemma32_hypotheses(n, b, alpha)?;
    let s_c = critical_index(n, b, alpha);
    let margins = lemma32_margins(n, b, alpha, &s_c);
    let w = window(&margins)?;
    let mut rep = new_report(Lemma::L32, n, b, alpha, theta.clone(), eps.clone(), &w, margins);
    build_lemma32(&mut rep);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Lemma 3.3: N = 5, 0 < b <= 3/2
// ---------------------------------------------------------------------------

fn lemma33_hypotheses(b: &Q, alpha: &Q) -> Result<()> {
    let mut c = Conditions::default();
    c.lt(("0", &Q::zero()), ("b", b));
    c.le(("b", b), ("3/2", &q(3, 2)));
    let low = (int(8) - int(2) * b) / int(5);
    c.lt(("(8-2b)/5", &low), ("alpha", alpha));
    c.lt(("alpha", alpha), ("8-2b", &(int(8) - int(2) * b)));
    precondition(c)
}

fn lemma33_margins(b: &Q, alpha: &Q, s_c: &Q) -> Vec<Margin> {
    let zero = Q::zero;
    let one = Q::one;
    let four_b = int(4) - b;
    let eight = int(8) - int(2) * b;
    let two_minus = int(2) - s_c;
    let five_b = (int(5) - int(2) * b) / int(2);
    let one_b = (Q::one() + int(2) * b) / int(2);
    vec![
        Margin::new("theta < alpha", alpha.clone(), -one(), zero()),
        Margin::new("eps < 2", int(2), zero(), -one()),
        Margin::new("0 < r_star", alpha * (int(9) - int(2) * b), -int(2) * &four_b, -int(2) * alpha),
        Margin::new("r_star < 10", alpha * (&eight - alpha), -(&eight - alpha), -int(2) * alpha),
        Margin::new(
            "0 < q_star",
            alpha * (int(5) * alpha - int(4) + int(2) * b),
            -(int(5) * alpha - int(8) + int(2) * b),
            int(2) * alpha,
        ),
        // N/beta_ball = (9-2b)/2 - theta(2-s_c) - eps; need 2 < N/beta < 5
        Margin::new("beta_ball < N/2", five_b.clone(), -two_minus.clone(), -one()),
        Margin::new("1 < beta_ball", one_b.clone(), two_minus, one()),
        // N/beta_complement = (9-2b)/2 + theta s_c - eps
        Margin::new("beta_complement < N/2", five_b, s_c.clone(), -one()),
        Margin::new("1 < beta_complement", one_b, -s_c.clone(), one()),
        Margin::new("0 < N/gamma_complement", b.clone(), -s_c.clone(), zero()),
        // 5/p* = (5 alpha + 1 + 2 s_c - 5 theta - 2 eps) / (2 (alpha + 1 - theta))
        Margin::new("0 < p_star", int(5) * alpha + one() + int(2) * s_c, -int(5), -int(2)),
        Margin::new("p_star < 10", int(4) * alpha + int(2) * s_c, -int(4), -int(2)),
        Margin::new("p_star < 5/s_c", int(9) - int(2) * b, -(int(5) - int(2) * s_c), -int(2)),
    ]
}

fn build_lemma33(rep: &mut LemmaExponentReport) {
    let nq = int(5);
    let (b, alpha, s_c) = (rep.b.clone(), rep.alpha.clone(), rep.s_c.clone());
    let (theta, eps) = (rep.theta.clone(), rep.eps.clone());
    let a1 = &alpha + Q::one() - &theta;
    let am = &alpha - &theta;
    let na = &nq * &alpha;
    let two_eps_alpha = int(2) * &eps * &alpha;

    let a_star = int(8) * &alpha * &a1 / (int(8) - int(2) * &b - &alpha * (&nq - int(4)) + &two_eps_alpha);
    let r_star = int(2) * &alpha * &nq * &a1
        / (&alpha * (&nq + int(4) - int(2) * &b) - int(2) * &theta * (int(4) - &b) - &two_eps_alpha);
    let q_star = int(8) * &alpha * &a1
        / (&alpha * (&na - int(4) + int(2) * &b) - &theta * (&na - int(8) + int(2) * &b) + &two_eps_alpha);
    let q_eps = int(4) / (int(2) - &eps);
    let r_eps = int(2) * &nq / (&nq - int(4) + int(2) * &eps);
    let p_star = int(10) * &a1 / (int(5) * &alpha + Q::one() + int(2) * &s_c - int(5) * &theta - int(2) * &eps);

    rep.pair_entry("q_star", q_star.clone(), r_star.clone(), Q::zero());
    rep.pair_entry("q_eps", q_eps.clone(), r_eps.clone(), Q::zero());
    rep.pair_entry("a_star", a_star.clone(), r_star.clone(), s_c.clone());
    rep.pair_entry("p_star", a_star.clone(), p_star.clone(), Q::zero());
    for (name, v) in [
        ("a_star", &a_star),
        ("r_star", &r_star),
        ("q_star", &q_star),
        ("q_eps", &q_eps),
        ("r_eps", &r_eps),
        ("p_star", &p_star),
    ] {
        rep.aux_entry(name, v);
    }

    let half_n = &nq / int(2);
    rep.expect_eq("q_star scaling: 4/q_star = N/2 - N/r_star", int(4) / &q_star, &half_n - &nq / &r_star);
    rep.expect_eq("q_eps scaling: 4/q_eps = N/2 - N/r_eps", int(4) / &q_eps, &half_n - &nq / &r_eps);
    rep.expect_eq(
        "a_star relation: 4/a_star = N/2 - N/r_star - s_c",
        int(4) / &a_star,
        &half_n - &nq / &r_star - &s_c,
    );
    rep.expect_eq(
        "N=5 relation: 1/q_eps' = (alpha-theta)/a_star + 1/q_star",
        Q::one() - q_eps.recip(),
        &am / &a_star + q_star.recip(),
    );
    rep.expect_lt("r_star < 10", r_star.clone(), int(10));
    rep.expect_lt("r_eps < 10", r_eps.clone(), int(10));

    if rep.pair("a_star").is_some_and(|p| p.admissible) {
        rep.notes.push(
            "(a_star, r_star) satisfies the s_c scaling relation and lies in [2N/(N-2s_c), 2N/(N-4)); \
             it is reported admissible by the range test"
                .into(),
        );
    }

    // (a1)-(a4): 1/beta = 1/r1 + (alpha-theta)/r* + 1/r*,  N/gamma = (N+4-2eps)/2 - N/beta
    let main_term = &nq * &a1 / &r_star;
    for (tag, n_over_r1) in [
        ("ball", &theta * (&nq - int(4)) / int(2)),
        ("complement", &theta * &nq / int(2)),
    ] {
        let ball = tag == "ball";
        let closed = if ball {
            (&nq + int(4) - int(2) * &b) / int(2) - &theta * (int(2) - &s_c) - &eps
        } else {
            (&nq + int(4) - int(2) * &b) / int(2) + &theta * &s_c - &eps
        };
        rep.expect_eq(format!("a4 chain ({tag}): N/beta = N/r1 + N(alpha-theta+1)/r_star"), closed.clone(), &n_over_r1 + &main_term);
        let n_over_gamma = (&nq + int(4) - int(2) * &eps) / int(2) - &closed;
        let reduced = &n_over_gamma - &b;
        rep.expect_eq(
            format!("LGr2 ({tag}): N/gamma - b = theta(4-b)/alpha - N/r1"),
            reduced.clone(),
            &theta * (int(4) - &b) / &alpha - &n_over_r1,
        );
        if ball {
            rep.expect_lt("0 < N/gamma - b (ball)", Q::zero(), reduced);
        } else {
            rep.expect_lt("N/gamma - b < 0 (complement)", reduced, Q::zero());
        }
        rep.expect_lt(format!("0 < N/gamma ({tag})"), Q::zero(), n_over_gamma.clone());
        let beta = &nq / &closed;
        rep.expect_lt(format!("1 < beta ({tag})"), Q::one(), beta.clone());
        rep.expect_lt(format!("beta < N/2 ({tag})"), beta.clone(), &nq / int(2));
        rep.aux_entry(&format!("beta_{tag}"), &beta);
        if n_over_gamma.is_positive() {
            rep.aux_entry(&format!("gamma_{tag}"), &(&nq / &n_over_gamma));
        }
        if n_over_r1.is_positive() {
            rep.aux_entry(&format!("r1_{tag}"), &(&nq / &n_over_r1));
        }
    }

    // p*: the auxiliary B-admissible pair used with the Sobolev embedding.
    rep.expect_eq("p_star scaling: 4/a_star = N/2 - N/p_star", int(4) / &a_star, &half_n - &nq / &p_star);
    rep.expect_eq("s_c = 5/p_star - 5/r_star", s_c.clone(), &nq / &p_star - &nq / &r_star);
    if s_c.is_positive() {
        rep.expect_lt("p_star < 5/s_c", p_star.clone(), &nq / &s_c);
    }
    rep.expect_lt("2 < p_star", int(2), p_star.clone());
    rep.expect_lt("p_star < 10", p_star.clone(), int(10));

    // Gagliardo–Nirenberg step of (iii): eta = s_c/2 on L^{r_eps'}.
    let eta = &s_c / int(2);
    let r_eps_conj = &r_eps / (&r_eps - Q::one());
    let gn_ok = gn_exponent_check(&r_eps_conj, &r_eps_conj, &r_eps_conj, &s_c, &int(2), &eta, 5);
    let n_over_p = &nq / &r_eps_conj;
    rep.expect_eq(
        "GN (iii): N/p - s_c = (1-eta) N/p + eta (N/p - 2), eta = s_c/2",
        &n_over_p - &s_c,
        (Q::one() - &eta) * &n_over_p + &eta * (&n_over_p - int(2)),
    );
    if !gn_ok {
        rep.notes.push("GN exponent check rejected the (iii) interpolation tuple".into());
        rep.check("GN (iii) exponent check", Q::zero(), Relation::Eq, Q::one());
    }
}

/// Exponents of the `N = 5` estimates (`a*, r*, q*, q_eps, r_eps, p*`).
pub fn lemma33_exponents(b: &Q, alpha: &Q, small: &Smallness) -> Result<LemmaExponentReport> {
    lemma33_hypotheses(b, alpha)?;
    let s_c = critical_index(5, b, alpha);
    let margins = lemma33_margins(b, alpha, &s_c);
    let w = window(&margins)?;
    let theta = choose(small.theta.as_ref(), &w.theta_max, "theta")?;
    let eps = choose(small.eps.as_ref(), &w.eps_max, "eps")?;
    check_joint(&margins, &theta, &eps)?;
    let mut rep = new_report(Lemma::L33, 5, b, alpha, theta, eps, &w, margins);
    build_lemma33(&mut rep);
    Ok(rep)
}

/// [`lemma33_exponents`] at an arbitrary `(theta, eps)` without the window
/// check (`theta = eps = 0` is the formal limit).
pub fn lemma33_at(b: &Q, alpha: &Q, theta: &Q, eps: &Q) -> Result<LemmaExponentReport> {
    lemma33_hypotheses(b, alpha)?;
    let s_c = critical_index(5, b, alpha);
    let margins = lemma33_margins(b, alpha, &s_c);
    let w = window(&margins)?;
    let mut rep = new_report(Lemma::L33, 5, b, alpha, theta.clone(), eps.clone(), &w, margins);
    build_lemma33(&mut rep);
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Lemma 4.1: energy-critical, 5 <= N <= 11
// ---------------------------------------------------------------------------

/// Exponents of the energy-critical estimates, with `alpha = (8-2b)/(N-4)`.
pub fn lemma41_exponents(n: u32, b: &Q) -> Result<LemmaExponentReport> {
    let mut c = Conditions::default();
    c.dim_in(n, 5, Some(11));
    c.lt(("0", &Q::zero()), ("b", b));
    if n >= 3 {
        let nq = int(n as i64);
        let bmax = (int(12) - &nq) / (&nq - int(2));
        c.lt(("b", b), ("(12-N)/(N-2)", &bmax));
    }
    precondition(c)?;

    let nq = int(n as i64);
    let alpha = (int(8) - int(2) * b) / (&nq - int(4));
    let w = Window { theta_max: Q::zero(), eps_max: Q::zero() };
    let mut rep = new_report(Lemma::L41, n, b, &alpha, Q::zero(), Q::zero(), &w, Vec::new());

    let b1 = b + Q::one();
    let q = int(2) * (&nq + int(4)) * &b1 / (b * (&nq - int(2)) + &nq - int(4));
    let r = int(2) * &nq * (&nq + int(4)) * &b1 / (&nq * &nq + b * (&nq * &nq + int(8)) + int(16));
    let rbar = int(2) * (&nq + int(4)) / (&nq - int(4));
    let beta = &nq * &r / (&nq - &r);

    rep.pair_entry("q_crit", q.clone(), r.clone(), Q::zero());
    for (name, v) in [("alpha", &alpha), ("q_crit", &q), ("r_crit", &r), ("r_bar_crit", &rbar), ("beta_crit", &beta)] {
        rep.aux_entry(name, v);
    }
    let amb = &alpha - b;
    rep.expect_lt("beta < N", beta.clone(), nq.clone());
    rep.expect_eq(
        "(N+2)/(2N) = (alpha-b)/r_bar + (b+1)/beta",
        (&nq + int(2)) / (int(2) * &nq),
        &amb / &rbar + &b1 / &beta,
    );
    rep.expect_eq("1/2 = (alpha-b)/r_bar + (b+1)/q", q_half(), &amb / &rbar + &b1 / &q);
    rep.expect_eq("1 = N/r - N/beta", Q::one(), &nq / &r - &nq / &beta);
    rep.expect_eq("q_crit scaling: 4/q = N/2 - N/r", int(4) / &q, &nq / int(2) - &nq / &r);
    rep.expect_lt("0 < alpha - b - 1", Q::zero(), &amb - Q::one());
    rep.expect_eq(
        "B(I) scaling: 4/r_bar = N/2 - N/r_bar - 2",
        int(4) / &rbar,
        &nq / int(2) - &nq / &rbar - int(2),
    );
    Ok(rep)
}

fn q_half() -> Q {
    q(1, 2)
}
