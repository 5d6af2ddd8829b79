//! Exact Fuss–Catalan and Raney numbers.
//!
//! `FC_s(n) = C((s+1)n, n) / (sn + 1)` and `R_{p,r}(n) = r/(pn + r) · C(pn + r, n)`.
//! Both are computed with arbitrary-precision integers; the final division is
//! checked to be exact. Real-parameter Raney moments are evaluated in log-gamma
//! space, with an exact integer path whenever `(p, r)` are integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::signed_log_gamma;

/// Identifies an integer moment sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SequenceSpec {
    FussCatalan { s: u32 },
    Raney { p: u32, r: u32 },
}

impl SequenceSpec {
    pub fn fuss_catalan(s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("Fuss-Catalan order s must be >= 1".into()));
        }
        Ok(SequenceSpec::FussCatalan { s })
    }

    pub fn raney(p: u32, r: u32) -> Result<Self> {
        validate_raney(p, r)?;
        Ok(SequenceSpec::Raney { p, r })
    }

    pub fn term(&self, n: u32) -> Result<BigUint> {
        match *self {
            SequenceSpec::FussCatalan { s } => fc_number(s, n),
            SequenceSpec::Raney { p, r } => raney_number(p, r, n),
        }
    }

    pub fn terms(&self, n_max: u32) -> Result<Vec<BigUint>> {
        (0..=n_max).map(|n| self.term(n)).collect()
    }
}

fn validate_raney(p: u32, r: u32) -> Result<()> {
    let mut problems = Vec::new();
    if p < 2 {
        problems.push(format!("p = {p} must be >= 2"));
    }
    if r < 1 {
        problems.push(format!("r = {r} must be >= 1"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(problems.join("; ")))
    }
}

/// Exact binomial coefficient via the multiplicative formula.
///
/// After step `i` the accumulator equals `C(m - k + i, i)`, so every division is exact.
pub fn binomial(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= m - k + i;
        let (q, rem) = acc.div_rem(&BigUint::from(i));
        debug_assert!(rem.is_zero());
        acc = q;
    }
    acc
}

/// `numerator · C(m, k) / denominator`, asserting the division leaves no remainder.
fn exact_scaled_binomial(m: u64, k: u64, numerator: u64, denominator: u64) -> BigUint {
    let scaled = binomial(m, k) * numerator;
    let (q, rem) = scaled.div_rem(&BigUint::from(denominator));
    assert!(
        rem.is_zero(),
        "non-integral quotient {numerator}*C({m},{k})/{denominator}"
    );
    q
}

/// Fuss–Catalan number `FC_s(n)`.
pub fn fc_number(s: u32, n: u32) -> Result<BigUint> {
    if s == 0 {
        return Err(Error::InvalidParameter("Fuss-Catalan order s must be >= 1".into()));
    }
    let (s, n) = (u64::from(s), u64::from(n));
    Ok(exact_scaled_binomial((s + 1) * n, n, 1, s * n + 1))
}

/// Raney number `R_{p,r}(n)`.
pub fn raney_number(p: u32, r: u32, n: u32) -> Result<BigUint> {
    validate_raney(p, r)?;
    let (p, r, n) = (u64::from(p), u64::from(r), u64::from(n));
    Ok(exact_scaled_binomial(p * n + r, n, r, p * n + r))
}

/// Converts an exact count to `f64` (saturating to infinity when it does not fit).
pub fn big_to_f64(value: &BigUint) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}

fn check_sigma(p: f64, r: f64) -> Result<()> {
    if !(p.is_finite() && r.is_finite()) || p < 0.0 || r <= 0.0 || r > p {
        return Err(Error::OutsideSigma { p, r });
    }
    Ok(())
}

fn as_small_integer(v: f64) -> Option<u32> {
    (v.fract() == 0.0 && v >= 0.0 && v <= f64::from(u32::MAX)).then_some(v as u32)
}

/// Natural logarithm of the real-parameter Raney moment
/// `r/(np+r) · Γ(np+r+1) / (Γ(n+1) Γ(np+r−n+1))`.
pub fn raney_moment_log(p: f64, r: f64, n: u32) -> Result<f64> {
    check_sigma(p, r)?;
    let nf = f64::from(n);
    let top = nf * p + r;
    let bottom = top - nf + 1.0;
    if bottom <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma argument np + r - n + 1 = {bottom} is not positive"
        )));
    }
    let lg = |x: f64| signed_log_gamma(x).map(|g| g.log_abs);
    Ok(r.ln() - top.ln() + lg(top + 1.0)? - lg(nf + 1.0)? - lg(bottom)?)
}

/// Real-parameter Raney moment; exact big-integer arithmetic when `(p, r)` are
/// integers with `p >= 2`, log-gamma otherwise.
pub fn raney_moment_real(p: f64, r: f64, n: u32) -> Result<f64> {
    check_sigma(p, r)?;
    if let (Some(pi), Some(ri)) = (as_small_integer(p), as_small_integer(r)) {
        if pi >= 2 {
            return raney_number(pi, ri, n).map(|v| big_to_f64(&v));
        }
    }
    raney_moment_log(p, r, n).map(f64::exp)
}

/// One checked instance of an integer identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub n: u32,
    pub lhs: String,
    pub rhs: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub p: u32,
    pub n_max: u32,
    pub checks: Vec<IdentityCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks `R_{p+1,p+1}(n) = FC_p(n+1)` and `R_{p,p}(n) = R_{p,1}(n+1)` for `n` in `0..=n_max`.
pub fn check_raney_relations(p: u32, n_max: u32) -> Result<RelationReport> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 2")));
    }
    let mut checks = Vec::with_capacity(2 * (n_max as usize + 1));
    for n in 0..=n_max {
        let lhs = raney_number(p + 1, p + 1, n)?;
        let rhs = fc_number(p, n + 1)?;
        checks.push(IdentityCheck {
            identity: "R_{p+1,p+1}(n) = FC_p(n+1)",
            n,
            passed: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
        let lhs = raney_number(p, p, n)?;
        let rhs = raney_number(p, 1, n + 1)?;
        checks.push(IdentityCheck {
            identity: "R_{p,p}(n) = R_{p,1}(n+1)",
            n,
            passed: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }
    Ok(RelationReport { p, n_max, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(spec: SequenceSpec, n_max: u32) -> Vec<u64> {
        spec.terms(n_max)
            .unwrap()
            .iter()
            .map(|v| v.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn printed_sequences() {
        assert_eq!(
            seq(SequenceSpec::fuss_catalan(1).unwrap(), 7),
            [1, 1, 2, 5, 14, 42, 132, 429]
        );
        assert_eq!(seq(SequenceSpec::fuss_catalan(2).unwrap(), 5), [1, 1, 3, 12, 55, 273]);
        assert_eq!(seq(SequenceSpec::fuss_catalan(3).unwrap(), 5), [1, 1, 4, 22, 140, 969]);
        assert_eq!(
            seq(SequenceSpec::raney(4, 2).unwrap(), 7),
            [1, 2, 9, 52, 340, 2394, 17710, 135720]
        );
        assert_eq!(
            seq(SequenceSpec::raney(5, 2).unwrap(), 7),
            [1, 2, 11, 80, 665, 5980, 56637, 556512]
        );
        assert_eq!(
            seq(SequenceSpec::raney(4, 5).unwrap(), 7),
            [1, 5, 30, 200, 1425, 10626, 81900, 647280]
        );
        assert_eq!(
            seq(SequenceSpec::raney(6, 3).unwrap(), 7),
            [1, 3, 21, 190, 1950, 21576, 250971, 3025308]
        );
    }

    #[test]
    fn operation_examples() {
        assert_eq!(fc_number(2, 3).unwrap(), BigUint::from(12u32));
        assert_eq!(fc_number(3, 5).unwrap(), BigUint::from(969u32));
        assert_eq!(fc_number(5, 0).unwrap(), BigUint::one());
        assert_eq!(raney_number(4, 2, 3).unwrap(), BigUint::from(52u32));
        assert_eq!(raney_number(6, 3, 4).unwrap(), BigUint::from(1950u32));
        assert_eq!(raney_number(3, 1, 4).unwrap(), BigUint::from(55u32));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(fc_number(0, 3), Err(Error::InvalidParameter(_))));
        assert!(raney_number(1, 1, 3).is_err());
        assert!(raney_number(3, 0, 3).is_err());
        match raney_number(1, 0, 0) {
            Err(Error::InvalidParameter(msg)) => {
                assert!(msg.contains("p = 1") && msg.contains("r = 0"), "{msg}")
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            raney_moment_real(2.0, 3.0, 1),
            Err(Error::OutsideSigma { .. })
        ));
        assert!(matches!(
            raney_moment_real(2.0, 0.0, 1),
            Err(Error::OutsideSigma { .. })
        ));
    }

    #[test]
    fn binomial_against_pascal() {
        let mut row = vec![BigUint::one()];
        for m in 1..=60u64 {
            let mut next = vec![BigUint::one(); m as usize + 1];
            for k in 1..m as usize {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            for k in 0..=m {
                assert_eq!(binomial(m, k), row[k as usize], "C({m},{k})");
            }
        }
        assert!(binomial(3, 5).is_zero());
    }

    #[test]
    fn large_arguments_stay_exact() {
        // FC_8(50) is far beyond u128 and still exactly divisible.
        let v = fc_number(8, 50).unwrap();
        assert!(v.bits() > 128);
        assert_eq!(v * BigUint::from(8u32 * 50 + 1), binomial(9 * 50, 50));
    }

    #[test]
    fn raney_moment_examples() {
        assert_eq!(raney_moment_real(2.0, 1.0, 2).unwrap(), 2.0);
        assert_eq!(raney_moment_real(4.0, 2.0, 4).unwrap(), 340.0);
        // Independent route: r/(np+r) · (np+r)(np+r−1)…(np+r−n+1)/n!
        let (p, r, n) = (2.5f64, 1.5f64, 3u32);
        let top = f64::from(n) * p + r;
        let falling: f64 = (0..n).map(|k| top - f64::from(k)).product();
        let fact: f64 = (1..=n).map(f64::from).product();
        let oracle = r / top * falling / fact;
        assert!((oracle - 14.0).abs() < 1e-12);
        let got = raney_moment_real(p, r, n).unwrap();
        assert!((got - oracle).abs() / oracle < 1e-12, "{got} vs {oracle}");
    }

    #[test]
    fn log_path_matches_exact_path() {
        for p in 2..=8u32 {
            for r in 1..=p {
                for n in 0..=20u32 {
                    let exact = big_to_f64(&raney_number(p, r, n).unwrap());
                    let log = raney_moment_log(f64::from(p), f64::from(r), n).unwrap().exp();
                    assert!((log - exact).abs() / exact < 1e-12, "p={p} r={r} n={n}");
                }
            }
        }
    }

    #[test]
    fn log_path_handles_overflowing_moments() {
        let lv = raney_moment_log(8.0, 3.0, 400).unwrap();
        assert!(lv.is_finite() && lv > 709.0);
    }

    #[test]
    fn relation_examples() {
        assert!(check_raney_relations(3, 6).unwrap().all_passed());
        let report = check_raney_relations(4, 7).unwrap();
        assert!(report.all_passed());
        // R_{5,5}(1) = FC_4(2) = 5
        let row = &report.checks[2];
        assert_eq!((row.n, row.lhs.as_str(), row.rhs.as_str()), (1, "5", "5"));
        assert_eq!(raney_number(5, 5, 1).unwrap(), fc_number(4, 2).unwrap());
        let r22: Vec<u64> = (0..=7).map(|n| raney_number(2, 2, n).unwrap().to_u64().unwrap()).collect();
        assert_eq!(r22, [1, 2, 5, 14, 42, 132, 429, 1430]);
        assert!(check_raney_relations(1, 3).is_err());
    }

    #[test]
    fn mean_and_second_moment_identities() {
        for p in 2..=8u32 {
            for r in 1..=p {
                assert_eq!(raney_number(p, r, 1).unwrap(), BigUint::from(r));
                // 2·R(2) = r(2p + r − 1)
                let second = raney_number(p, r, 2).unwrap() * 2u32;
                assert_eq!(second, BigUint::from(r * (2 * p + r - 1)));
            }
        }
        for (p, r) in [(2.5, 1.5), (3.7, 0.4), (1.2, 1.1), (6.0, 6.0)] {
            assert!((raney_moment_real(p, r, 1).unwrap() - r).abs() < 1e-12 * r);
            let expected = r * (2.0 * p + r - 1.0) / 2.0;
            let got = raney_moment_real(p, r, 2).unwrap();
            assert!((got - expected).abs() < 1e-12 * expected, "{got} vs {expected}");
        }
    }

    proptest::proptest! {
        #[test]
        fn raney_reduces_to_fuss_catalan(s in 1u32..=6, n in 0u32..=12) {
            proptest::prop_assert_eq!(raney_number(s + 1, 1, n).unwrap(), fc_number(s, n).unwrap());
        }

        #[test]
        fn raney_relations_hold(p in 2u32..=6, n in 0u32..=12) {
            proptest::prop_assert_eq!(raney_number(p + 1, p + 1, n).unwrap(), fc_number(p, n + 1).unwrap());
            proptest::prop_assert_eq!(raney_number(p, p, n).unwrap(), raney_number(p, 1, n + 1).unwrap());
        }
    }
}
