//! Gamma-family primitives and the generalized hypergeometric series.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// `ln |Γ(x)|` together with the sign of `Γ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLogGamma {
    pub log_abs: f64,
    pub sign: f64,
}

impl SignedLogGamma {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

// Stirling series coefficients B_{2k} / (2k (2k − 1)), k = 1..7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];
// Below this the argument is shifted up before the asymptotic series is used.
const STIRLING_MIN: f64 = 16.0;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `sin(πx)` with exact argument reduction, so zeros at the integers are exact.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = x.recip();
    let inv2 = inv * inv;
    let series = STIRLING.iter().rev().fold(0.0, |acc, &c| acc * inv2 + c) * inv;
    (x - 0.5).mul_add(x.ln(), -x) + HALF_LN_TWO_PI + series
}

fn ln_gamma_positive(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    if x >= STIRLING_MIN {
        return ln_gamma_stirling(x);
    }
    // Γ(x) = Γ(x + n) / (x (x+1) … (x+n−1))
    let shift = (STIRLING_MIN - x).ceil();
    let product: f64 = (0..shift as u32).map(|k| x + f64::from(k)).product();
    ln_gamma_stirling(x + shift) - product.ln()
}

/// `ln|Γ(x)|` and the sign of `Γ(x)` for any real `x` off the poles.
pub fn signed_log_gamma(x: f64) -> Result<SignedLogGamma> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x >= 0.5 {
        return Ok(SignedLogGamma { log_abs: ln_gamma_positive(x), sign: 1.0 });
    }
    // Reflection: Γ(x) Γ(1−x) = π / sin(πx)
    let s = sin_pi(x);
    Ok(SignedLogGamma {
        log_abs: PI.ln() - s.abs().ln() - ln_gamma_positive(1.0 - x),
        sign: s.signum(),
    })
}

pub fn gamma(x: f64) -> Result<f64> {
    signed_log_gamma(x).map(|g| g.value())
}

/// `1/Γ(x)`, which is zero at the poles of `Γ`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    match signed_log_gamma(x) {
        Ok(g) => g.sign * (-g.log_abs).exp(),
        Err(_) => 0.0,
    }
}

/// Rising factorial `(a)_n = a (a+1) … (a+n−1)`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + f64::from(k)))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Upper and lower parameter lists of a `pFq` series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperGeomParams {
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl HyperGeomParams {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>) -> Result<Self> {
        if let Some(b) = lower.iter().find(|&&b| is_nonpositive_integer(b)) {
            return Err(Error::InvalidParameter(format!(
                "lower parameter {b} is a non-positive integer"
            )));
        }
        Ok(Self { upper, lower })
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// `(p, q)` of the `pFq`.
    pub fn order(&self) -> (usize, usize) {
        (self.upper.len(), self.lower.len())
    }

    fn terminates(&self) -> bool {
        self.upper.iter().any(|&a| is_nonpositive_integer(a))
    }

    /// `term_{n+1} / term_n = ∏(a_j + n) / ∏(b_j + n) · z / (n + 1)`.
    pub fn term_ratio(&self, n: u32, z: f64) -> f64 {
        let nf = f64::from(n);
        let num: f64 = self.upper.iter().map(|a| a + nf).product();
        let den: f64 = self.lower.iter().map(|b| b + nf).product();
        num / den * z / (nf + 1.0)
    }
}

/// Relative size below which a term counts as negligible.
pub const SERIES_REL_TOL: f64 = 1e-16;
/// Consecutive negligible terms required before stopping.
pub const SERIES_QUIET_TERMS: u32 = 3;
pub const SERIES_MAX_TERMS: usize = 100_000;
/// `|1 − z|` below which the `p = q + 1` series is refused.
pub const EDGE_GAP: f64 = 1e-6;

/// Result of a series evaluation with the number of terms consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
}

/// Sums `pFq(upper; lower; z)` and reports how many terms were needed.
pub fn hypergeometric_series(params: &HyperGeomParams, z: f64) -> Result<SeriesValue> {
    let (p, q) = params.order();
    if !z.is_finite() {
        return Err(Error::InvalidParameter(format!("argument z = {z} is not finite")));
    }
    if !params.terminates() {
        if p > q + 1 && z != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{p}F{q} diverges for every z != 0"
            )));
        }
        if p == q + 1 {
            if z.abs() > 1.0 {
                return Err(Error::Domain { x: z, upper: 1.0 });
            }
            if (1.0 - z).abs() < EDGE_GAP {
                return Err(Error::EdgeRegion { x: z, upper: 1.0 });
            }
        }
    }

    let mut sum = CompensatedSum::default();
    let mut term = 1.0;
    let mut quiet = 0;
    for n in 0..SERIES_MAX_TERMS {
        sum.add(term);
        if term == 0.0 {
            return Ok(SeriesValue { value: sum.value(), terms: n + 1 });
        }
        if term.abs() <= SERIES_REL_TOL * sum.value().abs() {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                return Ok(SeriesValue { value: sum.value(), terms: n + 1 });
            }
        } else {
            quiet = 0;
        }
        term *= params.term_ratio(n as u32, z);
        if !term.is_finite() {
            return Err(Error::NonConvergence { terms: n + 1, last_term: term });
        }
    }
    Err(Error::NonConvergence { terms: SERIES_MAX_TERMS, last_term: term.abs() })
}

/// Generalized hypergeometric function `pFq(upper; lower; z)` by direct summation.
pub fn hypergeometric_pfq(params: &HyperGeomParams, z: f64) -> Result<f64> {
    hypergeometric_series(params, z).map(|s| s.value)
}

/// Relative residual of the Gauss–Legendre multiplication formula
/// `Γ(kz) = (2π)^{(1−k)/2} k^{kz−1/2} ∏_{j<k} Γ(z + j/k)`, compared in log space.
pub fn verify_gauss_legendre(z: f64, k: u32) -> Result<f64> {
    if !(z > 0.0) || !(1..=8).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "need z > 0 and 1 <= k <= 8 (got z = {z}, k = {k})"
        )));
    }
    let kf = f64::from(k);
    let lhs = signed_log_gamma(kf * z)?.log_abs;
    let mut rhs = CompensatedSum::default();
    rhs.add(0.5 * (1.0 - kf) * (2.0 * PI).ln());
    rhs.add((kf * z - 0.5) * kf.ln());
    for j in 0..k {
        rhs.add(signed_log_gamma(z + f64::from(j) / kf)?.log_abs);
    }
    Ok((rhs.value() - lhs).exp_m1().abs())
}
