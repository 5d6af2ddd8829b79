//! Raney densities `W_{p,r}(x)` on `[0, p^p/(p−1)^{p−1}]`, whose moments are the
//! Raney numbers `R_{p,r}(n)`.
//!
//! `W_{p,r}(x) = Σ_{j=1}^{p} Ω(p,r;j) x^{(r−1+j)/p − 1} pF_{p−1}(upper_j; lower_j; x/K)`
//! with `β_j = (r−p−1+j)/p`, `α_i = (r−p+i)/(p−1)`,
//! `upper_j = [1+β_j] ∪ {1+β_j−α_i}_{i=2..p}` and `lower_j = {1+(j−i)/p}_{i≠j}`.
//!
//! For `r ≤ p` the coefficient with `j = p+1−r` vanishes and every remaining term
//! has one upper parameter equal to a lower one, so it reduces to `(p−1)F(p−2)`.
//! `r = p+1` is accepted to draw the signed quasi-densities.

use std::f64::consts::PI;

use serde::Serialize;

use crate::density::{
    cancel_common_parameters, rational, DensitySpec, Family, HyperGeomTerm, Rational, SignedLogProduct,
};
use crate::error::{Error, Result};

fn check_pair(p: u32, r: u32) -> Result<()> {
    let mut problems = Vec::new();
    if p < 2 {
        problems.push(format!("p = {p} must be >= 2"));
    }
    if r < 1 || r > p + 1 {
        problems.push(format!("r = {r} must lie in [1, p+1]"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(problems.join("; ")))
    }
}

/// Support bound `K = p^p / (p−1)^{p−1}`.
pub fn raney_support(p: u32) -> Result<f64> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 2")));
    }
    let pf = f64::from(p);
    Ok(pf * (pf / (pf - 1.0)).powi(p as i32 - 1))
}

/// Index `j = p+1−r` of the coefficient that vanishes, when `r ≤ p`.
pub fn vanishing_index(p: u32, r: u32) -> Option<u32> {
    (1..=p).contains(&r).then(|| p + 1 - r)
}

/// Coefficient `Ω(p,r;j)`.
pub fn omega_coeff(p: u32, r: u32, j: u32) -> Result<f64> {
    check_pair(p, r)?;
    if !(1..=p).contains(&j) {
        return Err(Error::InvalidParameter(format!("j = {j} must lie in [1, {p}]")));
    }
    if vanishing_index(p, r) == Some(j) {
        return Ok(0.0);
    }
    let (pf, rf, jf) = (f64::from(p), f64::from(r), f64::from(j));
    let (pi, ri, ji) = (i64::from(p), i64::from(r), i64::from(j));
    let mut prod = SignedLogProduct::new();
    prod.mul_log(rf.ln() - 0.5 * (2.0 * PI).ln());
    prod.mul_log((rf - pf - 0.5) * pf.ln() - (rf - pf + 1.5) * (pf - 1.0).ln());
    prod.mul_log((rf - pf - 1.0 + jf) / pf * ((pf - 1.0) * (pf - 1.0).ln() - pf * pf.ln()));
    prod.div_gamma(&rational(pi - ri + 1 - ji, pi));
    for i in 1..ji {
        prod.mul_gamma(&rational(i - ji, pi))?;
    }
    for i in 1..=pi - ji {
        prod.mul_gamma(&rational(i, pi))?;
    }
    let beta = rational(ri - pi - 1 + ji, pi);
    for i in 2..=pi {
        prod.div_gamma(&(rational(ri - pi + i, pi - 1) - beta));
    }
    Ok(prod.value())
}

/// All `p` coefficients, the vanishing one stored as an exact zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaneyCoefficients {
    pub omega: Vec<f64>,
    pub vanishing_index: Option<u32>,
}

pub fn raney_coefficients(p: u32, r: u32) -> Result<RaneyCoefficients> {
    let omega = (1..=p).map(|j| omega_coeff(p, r, j)).collect::<Result<_>>()?;
    Ok(RaneyCoefficients { omega, vanishing_index: vanishing_index(p, r) })
}

/// Uncancelled upper and lower parameter lists of term `j`.
pub fn raney_term_parameters(p: u32, r: u32, j: u32) -> (Vec<Rational>, Vec<Rational>) {
    let (pi, ri, ji) = (i64::from(p), i64::from(r), i64::from(j));
    let one = rational(1, 1);
    let beta = rational(ri - pi - 1 + ji, pi);
    let upper = std::iter::once(one + beta)
        .chain((2..=pi).map(|i| one + beta - rational(ri - pi + i, pi - 1)))
        .collect();
    let lower = (1..=pi)
        .filter(|&i| i != ji)
        .map(|i| one + rational(ji - i, pi))
        .collect();
    (upper, lower)
}

/// Builds `W_{p,r}` with cancelled parameter lists; zero-coefficient terms are left out.
pub fn build_raney_spec(p: u32, r: u32) -> Result<DensitySpec> {
    check_pair(p, r)?;
    let upper_bound = raney_support(p)?;
    let scale = upper_bound.recip();
    let mut terms = Vec::new();
    for j in 1..=p {
        let omega = omega_coeff(p, r, j)?;
        if omega == 0.0 {
            continue;
        }
        let (mut upper, mut lower) = raney_term_parameters(p, r, j);
        cancel_common_parameters(&mut upper, &mut lower);
        let power = rational(i64::from(r) - 1 + i64::from(j), i64::from(p)) - rational(1, 1);
        terms.push(HyperGeomTerm::new(j, omega, power, upper, lower, scale)?);
    }
    Ok(DensitySpec::new(Family::Raney { p, r }, upper_bound, p, terms))
}

/// `W_{p,r}(x)` for `0 < x < K(1 − 1e-6)`.
pub fn raney_density_at(p: u32, r: u32, x: f64) -> Result<f64> {
    build_raney_spec(p, r)?.density_at(x)
}

/// Elementary forms of `W_{2,2}` (shifted semicircle) and `W_{3,2}`.
pub fn raney_density_closed(p: u32, r: u32, x: f64) -> Result<f64> {
    let upper = match (p, r) {
        (2, 2) | (3, 2) => raney_support(p)?,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "closed form available for (p, r) = (2, 2), (3, 2) only (got ({p}, {r}))"
            )))
        }
    };
    if !(x > 0.0 && x <= upper) {
        return Err(Error::Domain { x, upper });
    }
    if p == 2 {
        return Ok((x * (4.0 - x)).max(0.0).sqrt() / (2.0 * PI));
    }
    let cbrt2 = 2f64.cbrt();
    let c = 27.0 + 3.0 * (81.0 - 12.0 * x).max(0.0).sqrt();
    let num = c.powf(4.0 / 3.0) - 18.0 * cbrt2 * x.powf(2.0 / 3.0);
    Ok(3f64.sqrt() * cbrt2 / (36.0 * PI) * num / (x.cbrt() * c.powf(2.0 / 3.0)))
}

/// Leading small-`x` exponent: `−(p−r)/p` for `r < p`, `1/p` for `r = p`.
pub fn small_x_exponent(p: u32, r: u32) -> Result<f64> {
    if p < 2 || r < 1 || r > p {
        return Err(Error::InvalidParameter(format!("need 1 <= r <= p and p >= 2, got ({p}, {r})")));
    }
    let pf = f64::from(p);
    Ok(if r == p { pf.recip() } else { -(pf - f64::from(r)) / pf })
}
