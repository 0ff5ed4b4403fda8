//! Admissible pairs and exponent bookkeeping in exact arithmetic.
//!
//! A pair `(q, r)` is `Ḣ^s`-biharmonic admissible in dimension `N` when
//! `4/q = N/2 - N/r - s` and `r` lies in `[2N/(N-2s), 2N/(N-4))` for
//! `N >= 5`, or in `[2, ∞)` for `N <= 4`.

mod file;
mod lemmas;

pub use file::parse_pairs_file;

pub use lemmas::{
    lemma32_at, lemma32_exponents, lemma33_at, lemma33_exponents, lemma41_exponents, Identity,
    Lemma, LemmaExponentReport, Margin, NamedPair, Relation, Smallness,
};

use num_traits::{One, Signed};

use crate::error::Result;
use crate::rational::{int, Exponent, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentPair {
    pub q: Exponent,
    pub r: Q,
    pub s: Q,
}

impl ExponentPair {
    pub fn new(q: impl Into<Exponent>, r: Q, s: Q) -> Self {
        Self { q: q.into(), r, s }
    }

    pub fn is_admissible(&self, n: u32) -> bool {
        is_admissible(&self.q, &self.r, &self.s, n)
    }

    /// `(q', r')` with `1/q + 1/q' = 1` and `1/r + 1/r' = 1`.
    pub fn conjugates(&self) -> Result<(Exponent, Exponent)> {
        Ok((self.q.conjugate()?, Exponent::Finite(self.r.clone()).conjugate()?))
    }
}

/// Lower end of the admissible `r`-range, `2N/(N-2s)`, or `None` when
/// `N - 2s <= 0` (no finite `r` qualifies).
fn sobolev_lower_bound(n: u32, s: &Q) -> Option<Q> {
    let nq = int(n as i64);
    let den = nq.clone() - int(2) * s;
    den.is_positive().then(|| int(2) * nq / den)
}

pub fn is_admissible(q: &Exponent, r: &Q, s: &Q, n: u32) -> bool {
    if n == 0 || !q.is_positive() || !r.is_positive() {
        return false;
    }
    let nq = int(n as i64);
    let scaling = int(4) * q.recip() == nq.clone() / int(2) - nq.clone() / r - s;
    if !scaling {
        return false;
    }
    in_range(r, s, n)
}

fn in_range(r: &Q, s: &Q, n: u32) -> bool {
    let Some(lower) = sobolev_lower_bound(n, s) else {
        return false;
    };
    if n >= 5 {
        let upper = int(2 * n as i64) / int(n as i64 - 4);
        lower <= *r && *r < upper
    } else {
        // [2, ∞), with the s-dependent bound enforced when it is the larger one.
        *r >= int(2) && *r >= lower
    }
}

/// For `N <= 4`, whether the s-independent range `[2, ∞)` and the
/// s-dependent bound `r >= 2N/(N-2s)` give different verdicts for `r`.
/// Under the scaling relation with `q > 0` they always agree; this flags
/// inputs where they would not.
pub fn low_dimension_readings_differ(r: &Q, s: &Q, n: u32) -> bool {
    if n >= 5 {
        return false;
    }
    let plain = *r >= int(2);
    let strict = sobolev_lower_bound(n, s).is_some_and(|lo| *r >= lo && plain);
    plain != strict
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    BallOnly,
    ComplementOnly,
    Neither,
}

/// Where `|x|^{-b}` lies in `L^gamma`: on the unit ball when `N/gamma - b > 0`,
/// on its complement when `N/gamma - b < 0`.
pub fn weight_integrability(n: u32, b: &Q, gamma: &Q) -> Integrability {
    debug_assert!(gamma.is_positive());
    let m = int(n as i64) / gamma - b;
    if m.is_positive() {
        Integrability::BallOnly
    } else if m.is_negative() {
        Integrability::ComplementOnly
    } else {
        Integrability::Neither
    }
}

/// Exponent condition of the fractional Gagliardo–Nirenberg inequality
/// `‖D^s u‖_p ≲ ‖u‖_{p0}^{1-θ} ‖D^{s1} u‖_{p1}^θ`.
#[allow(clippy::too_many_arguments)]
pub fn gn_exponent_check(p: &Q, p0: &Q, p1: &Q, s: &Q, s1: &Q, theta: &Q, n: u32) -> bool {
    let one = Q::one();
    let open = |x: &Q| *x > one;
    if !(open(p) && open(p0) && open(p1)) || theta.is_negative() || *theta > one {
        return false;
    }
    let nq = int(n as i64);
    let lhs = nq.clone() / p - s;
    let rhs = (&one - theta) * (nq.clone() / p0) + theta * (nq / p1 - s1);
    lhs == rhs && *s <= theta * s1
}

/// Exponent condition of the Hardy–Littlewood (Stein–Weiss) inequality
/// `‖|x|^{-ρ} u‖_q ≲ ‖D^s u‖_p`.
pub fn hl_exponent_check(p: &Q, q: &Q, s: &Q, rho: &Q, n: u32) -> bool {
    let nq = int(n as i64);
    Q::one() < *p
        && p <= q
        && s.is_positive()
        && *s < nq
        && !rho.is_negative()
        && *rho < nq.clone() / q
        && *s == nq.clone() / p - nq / q + rho
}

/// `1/p + 1/p' = 1` on reciprocals; the value returned is `1/p'`.
pub fn conjugate_recip(p_recip: &Q) -> Q {
    Q::one() - p_recip
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::rational::q;

    #[test]
    fn lemma41_pair_is_b_admissible() {
        assert!(is_admissible(&Exponent::Finite(q(20, 3)), &q(5, 2), &Q::zero(), 6));
    }

    #[test]
    fn infinity_two_is_b_admissible() {
        assert!(is_admissible(&Exponent::Infinite, &int(2), &Q::zero(), 6));
        assert!(is_admissible(&Exponent::Infinite, &int(2), &Q::zero(), 1));
    }

    #[test]
    fn upper_endpoint_excluded() {
        // 4/2 = 3 - 6/6: scaling holds, r = 2N/(N-4) is excluded.
        assert!(!is_admissible(&Exponent::Finite(int(2)), &int(6), &Q::zero(), 6));
    }

    #[test]
    fn scaling_failure_is_inadmissible() {
        assert!(!is_admissible(&Exponent::Finite(int(3)), &q(5, 2), &Q::zero(), 6));
    }

    #[test]
    fn low_dimension_readings_agree_under_scaling() {
        // N = 3, s = 1/2: 2N/(N-2s) = 3 > 2.
        assert!(low_dimension_readings_differ(&q(5, 2), &q(1, 2), 3));
        assert!(!low_dimension_readings_differ(&int(4), &q(1, 2), 3));
        // r = 5/2 with s = 1/2 has 4/q = 3/2 - 6/5 - 1/2 < 0, so no q > 0 exists.
        assert!(!is_admissible(&Exponent::Infinite, &q(5, 2), &q(1, 2), 3));
    }

    #[test]
    fn weight_integrability_examples() {
        assert_eq!(weight_integrability(6, &int(1), &int(3)), Integrability::BallOnly);
        assert_eq!(weight_integrability(6, &int(3), &int(6)), Integrability::ComplementOnly);
        assert_eq!(weight_integrability(6, &int(2), &int(3)), Integrability::Neither);
    }

    #[test]
    fn gn_examples() {
        let two = int(2);
        assert!(gn_exponent_check(&two, &two, &two, &Q::zero(), &two, &Q::zero(), 3));
        assert!(!gn_exponent_check(&two, &two, &two, &int(1), &two, &q(1, 4), 3));
        // endpoint exponents are excluded
        assert!(!gn_exponent_check(&int(1), &two, &two, &Q::zero(), &two, &Q::zero(), 3));
    }

    #[test]
    fn gn_interpolation_with_half_critical_index() {
        // N/p - s_c = (1-η) N/p + η (N/p - 2) with η = s_c/2, for any p.
        let p = q(10, 9);
        let s_c = q(1, 2);
        let eta = &s_c / int(2);
        assert!(gn_exponent_check(&p, &p, &p, &s_c, &int(2), &eta, 5));
    }

    #[test]
    fn hl_examples() {
        let beta = q(30, 7);
        assert!(hl_exponent_check(&beta, &beta, &int(1), &int(1), 6));
        assert!(!hl_exponent_check(&int(2), &int(2), &Q::zero(), &Q::zero(), 3));
        // rho < N/q = 1 fails for rho = 2
        assert!(!hl_exponent_check(&int(2), &int(4), &int(3), &int(2), 4));
    }

    #[test]
    fn conjugates_sum_to_one() {
        let p = ExponentPair::new(q(20, 3), q(5, 2), Q::zero());
        let (qc, rc) = p.conjugates().unwrap();
        assert_eq!(p.q.recip() + qc.recip(), Q::one());
        assert_eq!(p.r.recip() + rc.recip(), Q::one());
    }
}
