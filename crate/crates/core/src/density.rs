//! Densities written as finite sums of power-prefactored hypergeometric terms,
//!
//! ```text
//! f(x) = Σ_k c_k · x^{e_k} · pFq(upper_k; lower_k; x / K),
//! ```
//!
//! shared by the Fuss–Catalan and Raney families. Parameters are kept as exact
//! rationals next to their floating-point images so that structural checks
//! (cancellation, pole detection, parameter lists) never compare floats.
//!
//! Near the support edge `K` the series converge too slowly to be summed
//! directly. Every density in scope vanishes there like `sqrt(K − x)` times an
//! analytic function, so the edge is covered by a Chebyshev model of
//! `f(x) / sqrt(K − x)` fitted on `[K/2, K(1 − EDGE_MODEL_GAP)]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::combinatorics::SequenceSpec;
use crate::error::{Error, Result};
use crate::special::{hypergeometric_pfq, signed_log_gamma, CompensatedSum, HyperGeomParams, EDGE_GAP};

pub type Rational = Ratio<i64>;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn is_gamma_pole(r: &Rational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// Running product of gamma factors and scalars, kept as a signed logarithm.
///
/// A reciprocal gamma evaluated at a pole makes the whole product exactly zero.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SignedLogProduct {
    log_abs: f64,
    sign: f64,
    zero: bool,
}

impl SignedLogProduct {
    pub(crate) fn new() -> Self {
        Self { log_abs: 0.0, sign: 1.0, zero: false }
    }

    pub(crate) fn mul_log(&mut self, log_value: f64) {
        self.log_abs += log_value;
    }

    pub(crate) fn mul_gamma(&mut self, arg: &Rational) -> Result<()> {
        if is_gamma_pole(arg) {
            return Err(Error::GammaPole(rational_to_f64(arg)));
        }
        let g = signed_log_gamma(rational_to_f64(arg))?;
        self.log_abs += g.log_abs;
        self.sign *= g.sign;
        Ok(())
    }

    pub(crate) fn div_gamma(&mut self, arg: &Rational) {
        if is_gamma_pole(arg) {
            self.zero = true;
            return;
        }
        // Off the poles signed_log_gamma cannot fail.
        let g = signed_log_gamma(rational_to_f64(arg)).expect("gamma argument off the poles");
        self.log_abs -= g.log_abs;
        self.sign *= g.sign;
    }

    pub(crate) fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.sign * self.log_abs.exp()
        }
    }
}

/// Removes every upper parameter that also occurs in the lower list (one for one).
pub fn cancel_common_parameters(upper: &mut Vec<Rational>, lower: &mut Vec<Rational>) -> usize {
    let mut cancelled = 0;
    let mut i = 0;
    while i < upper.len() {
        if let Some(pos) = lower.iter().position(|b| *b == upper[i]) {
            lower.remove(pos);
            upper.remove(i);
            cancelled += 1;
        } else {
            i += 1;
        }
    }
    cancelled
}

fn serialize_rationals<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// One term `coefficient · x^{power} · pFq(upper; lower; argument_scale · x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperGeomTerm {
    /// `k` for Fuss–Catalan, `j` for Raney.
    pub index: u32,
    pub coefficient: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub power: Rational,
    #[serde(serialize_with = "serialize_rationals")]
    pub upper: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub lower: Vec<Rational>,
    #[serde(skip)]
    pub params: HyperGeomParams,
    pub argument_scale: f64,
}

impl HyperGeomTerm {
    pub fn new(
        index: u32,
        coefficient: f64,
        power: Rational,
        upper: Vec<Rational>,
        lower: Vec<Rational>,
        argument_scale: f64,
    ) -> Result<Self> {
        let params = HyperGeomParams::new(
            upper.iter().map(rational_to_f64).collect(),
            lower.iter().map(rational_to_f64).collect(),
        )?;
        Ok(Self { index, coefficient, power, upper, lower, params, argument_scale })
    }

    pub fn power_exponent(&self) -> f64 {
        rational_to_f64(&self.power)
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let f = hypergeometric_pfq(&self.params, self.argument_scale * x)?;
        Ok(self.coefficient * x.powf(self.power_exponent()) * f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    FussCatalan { s: u32 },
    Raney { p: u32, r: u32 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::FussCatalan { s } => write!(f, "P_{s}"),
            Family::Raney { p, r } => write!(f, "W_{{{p},{r}}}"),
        }
    }
}

/// How a plotted density value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityFlag {
    Ok,
    Extrapolated,
}

impl fmt::Display for DensityFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityFlag::Ok => "ok",
            DensityFlag::Extrapolated => "extrapolated",
        })
    }
}

/// Relative distance from `K` beyond which the edge model replaces direct summation.
pub const EDGE_MODEL_GAP: f64 = 4e-3;
const EDGE_MODEL_NODES: usize = 32;

/// Chebyshev interpolant of `f(x) / sqrt(K − x)` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeModel {
    lo: f64,
    hi: f64,
    upper: f64,
    coeffs: Vec<f64>,
}

impl EdgeModel {
    fn fit(spec: &DensitySpec) -> Result<Self> {
        let upper = spec.support_upper;
        let (lo, hi) = (0.5 * upper, upper * (1.0 - EDGE_MODEL_GAP));
        let (mid, half) = (0.5 * (hi + lo), 0.5 * (hi - lo));
        let n = EDGE_MODEL_NODES;
        let angles: Vec<f64> = (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect();
        let values = angles
            .iter()
            .map(|a| {
                let x = mid + half * a.cos();
                Ok(spec.series_density(x)? / (upper - x).sqrt())
            })
            .collect::<Result<Vec<f64>>>()?;
        let coeffs = (0..n)
            .map(|k| {
                let s: CompensatedSum = values
                    .iter()
                    .zip(&angles)
                    .map(|(v, a)| v * (k as f64 * a).cos())
                    .collect();
                let c = 2.0 * s.value() / n as f64;
                if k == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Ok(Self { lo, hi, upper, coeffs })
    }

    /// Model value of the density at `x` (valid on `[K/2, K]`).
    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.hi - self.lo) / (self.hi - self.lo);
        // Clenshaw recurrence
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        let smooth = t * b1 - b2 + self.coeffs[0];
        smooth * (self.upper - x).max(0.0).sqrt()
    }
}

/// A density of the Fuss–Catalan / Raney family with its hypergeometric terms.
#[derive(Debug, Clone, Serialize)]
pub struct DensitySpec {
    pub family: Family,
    /// Right end `K` of the support `[0, K]`.
    pub support_upper: f64,
    /// Common denominator of the term exponents; `x = c·w^m` with this `m`
    /// turns the small-`x` behaviour into integer powers of `w`.
    pub power_denominator: u32,
    pub terms: Vec<HyperGeomTerm>,
    #[serde(skip)]
    edge: OnceLock<std::result::Result<EdgeModel, Error>>,
}

impl DensitySpec {
    pub(crate) fn new(family: Family, support_upper: f64, power_denominator: u32, terms: Vec<HyperGeomTerm>) -> Self {
        Self { family, support_upper, power_denominator, terms, edge: OnceLock::new() }
    }

    pub fn sequence(&self) -> SequenceSpec {
        match self.family {
            Family::FussCatalan { s } => SequenceSpec::FussCatalan { s },
            Family::Raney { p, r } => SequenceSpec::Raney { p, r },
        }
    }

    /// False for the Raney quasi-measures with `r > p`.
    pub fn is_probability(&self) -> bool {
        match self.family {
            Family::FussCatalan { .. } => true,
            Family::Raney { p, r } => r <= p,
        }
    }

    /// Leading small-`x` exponent: the smallest power among the active terms.
    pub fn small_x_exponent(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.power)
            .min()
            .map(|r| rational_to_f64(&r))
            .unwrap_or(0.0)
    }

    /// `Σ c_k x^{e_k}`: the density with every hypergeometric factor replaced by 1.
    pub fn power_sum(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.coefficient * x.powf(t.power_exponent())).sum()
    }

    /// Start of the interval handled by the edge model.
    pub fn edge_model_start(&self) -> f64 {
        self.support_upper * (1.0 - EDGE_MODEL_GAP)
    }

    /// Start of the refused edge region `[K(1 − 1e-6), K]`.
    pub fn edge_region_start(&self) -> f64 {
        self.support_upper * (1.0 - EDGE_GAP)
    }

    /// Direct summation of all terms at `x`; slow or failing close to `K`.
    pub fn series_density(&self, x: f64) -> Result<f64> {
        let mut acc = CompensatedSum::default();
        for term in &self.terms {
            acc.add(term.evaluate(x)?);
        }
        Ok(acc.value())
    }

    pub fn edge_model(&self) -> Result<&EdgeModel> {
        self.edge
            .get_or_init(|| EdgeModel::fit(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(x > 0.0 && x <= self.support_upper) {
            return Err(Error::Domain { x, upper: self.support_upper });
        }
        Ok(())
    }

    /// Density at `0 < x < K(1 − 1e-6)`.
    pub fn density_at(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if x >= self.edge_region_start() {
            return Err(Error::EdgeRegion { x, upper: self.support_upper });
        }
        self.density_unchecked(x)
    }

    /// Evaluates on `(0, K]`; in the refused edge region the edge model value is
    /// returned and flagged as extrapolated (intended for plotting only).
    pub fn density_for_plot(&self, x: f64) -> Result<(f64, DensityFlag)> {
        self.check_domain(x)?;
        if x >= self.edge_region_start() {
            return Ok((self.edge_model()?.eval(x), DensityFlag::Extrapolated));
        }
        Ok((self.density_unchecked(x)?, DensityFlag::Ok))
    }

    /// Evaluation on `(0, K]` without the edge-region refusal; used by quadrature,
    /// which never asks for the integrand at `x = K` itself.
    pub(crate) fn density_unchecked(&self, x: f64) -> Result<f64> {
        if x > self.edge_model_start() {
            Ok(self.edge_model()?.eval(x))
        } else {
            self.series_density(x)
        }
    }

    /// Copy with one term's coefficient multiplied by `factor`.
    #[doc(hidden)]
    pub fn with_scaled_coefficient(&self, term: usize, factor: f64) -> Self {
        let mut terms = self.terms.clone();
        if let Some(t) = terms.get_mut(term) {
            t.coefficient *= factor;
        }
        Self::new(self.family, self.support_upper, self.power_denominator, terms)
    }
}

/// Evenly spaced interior points `x_i = lo + (hi − lo)(i + 1)/(n + 1)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64 + 1.0) / (n as f64 + 1.0))
        .collect()
}

/// Least-squares slope of `ln f` against `ln x` on `n` log-spaced points of `[lo, hi]`.
pub fn log_log_slope<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, n: usize) -> Result<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let lx = llo + (lhi - llo) * i as f64 / (n as f64 - 1.0);
        let v = f(lx.exp())?;
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "log-log fit needs positive values, got {v} at x = {}",
                lx.exp()
            )));
        }
        xs.push(lx);
        ys.push(v.ln());
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
