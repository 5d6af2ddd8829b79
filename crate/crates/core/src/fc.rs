//! Fuss–Catalan densities `P_s(x)` on `[0, (s+1)^{s+1}/s^s]`.
//!
//! `P_s(x) = Σ_{k=1}^{s} Λ_{k,s} x^{k/(s+1)−1} sF_{s−1}(upper_k; lower_k; x/K_s)` with
//! `upper_k = {1 − (1+j)/s + k/(s+1)}_{j=1..s}` and `lower_k = {1 + (k−j)/(s+1)}_{j≠k}`.

use std::f64::consts::PI;

use crate::density::{rational, DensitySpec, Family, HyperGeomTerm, Rational, SignedLogProduct};
use crate::error::{Error, Result};

fn check_order(s: u32) -> Result<()> {
    if s == 0 {
        return Err(Error::InvalidParameter("Fuss-Catalan order s must be >= 1".into()));
    }
    Ok(())
}

/// Support bound `K_s = (s+1)^{s+1} / s^s`.
pub fn fc_support(s: u32) -> Result<f64> {
    check_order(s)?;
    let sf = f64::from(s);
    Ok((sf + 1.0) * ((sf + 1.0) / sf).powi(s as i32))
}

/// Coefficient `Λ_{k,s}`, assembled as one signed-log product of gamma factors.
pub fn lambda_coeff(k: u32, s: u32) -> Result<f64> {
    check_order(s)?;
    if !(1..=s).contains(&k) {
        return Err(Error::InvalidParameter(format!("k = {k} must lie in [1, {s}]")));
    }
    let (sf, kf) = (f64::from(s), f64::from(k));
    let (si, ki) = (i64::from(s), i64::from(k));
    let mut prod = SignedLogProduct::new();
    prod.mul_log(-1.5 * sf.ln() + 0.5 * ((sf + 1.0) / (2.0 * PI)).ln());
    prod.mul_log(kf * (sf / (sf + 1.0) * sf.ln() - (sf + 1.0).ln()));
    for j in (1..=si).filter(|&j| j != ki) {
        prod.mul_gamma(&rational(j - ki, si + 1))?;
    }
    for j in 1..=si {
        prod.div_gamma(&(rational(j + 1, si) - rational(ki, si + 1)));
    }
    Ok(prod.value())
}

/// Exact upper and lower parameter lists of term `k`.
pub fn fc_term_parameters(k: u32, s: u32) -> (Vec<Rational>, Vec<Rational>) {
    let (si, ki) = (i64::from(s), i64::from(k));
    let one = rational(1, 1);
    let upper = (1..=si)
        .map(|j| one - rational(1 + j, si) + rational(ki, si + 1))
        .collect();
    let lower = (1..=si)
        .filter(|&j| j != ki)
        .map(|j| one + rational(ki - j, si + 1))
        .collect();
    (upper, lower)
}

/// Builds the `s`-term representation of `P_s`.
pub fn build_fc_spec(s: u32) -> Result<DensitySpec> {
    let upper_bound = fc_support(s)?;
    let scale = upper_bound.recip();
    let si = i64::from(s);
    let terms = (1..=s)
        .map(|k| {
            let (upper, lower) = fc_term_parameters(k, s);
            let power = rational(i64::from(k), si + 1) - rational(1, 1);
            HyperGeomTerm::new(k, lambda_coeff(k, s)?, power, upper, lower, scale)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensitySpec::new(Family::FussCatalan { s }, upper_bound, s + 1, terms))
}

/// `P_s(x)` for `0 < x < K_s(1 − 1e-6)`. Builds the spec on every call; keep a
/// [`DensitySpec`] around when evaluating many points.
pub fn fc_density_at(s: u32, x: f64) -> Result<f64> {
    build_fc_spec(s)?.density_at(x)
}

/// Elementary closed forms of `P_1` (Marchenko–Pastur) and `P_2`.
pub fn fc_density_closed(s: u32, x: f64) -> Result<f64> {
    let upper = match s {
        1 | 2 => fc_support(s)?,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "closed form available for s = 1, 2 only (got {s})"
            )))
        }
    };
    if !(x > 0.0 && x <= upper) {
        return Err(Error::Domain { x, upper });
    }
    if s == 1 {
        return Ok((1.0 - x / 4.0).max(0.0).sqrt() / (PI * x.sqrt()));
    }
    let cbrt2 = 2f64.cbrt();
    let c = 27.0 + 3.0 * (81.0 - 12.0 * x).max(0.0).sqrt();
    let num = cbrt2 * c.powf(2.0 / 3.0) - 6.0 * x.cbrt();
    Ok(cbrt2 * 3f64.sqrt() / (12.0 * PI) * num / (x.powf(2.0 / 3.0) * c.cbrt()))
}
