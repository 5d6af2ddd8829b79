//! Hausdorff moment check: `∫_0^K x^n f(x) dx` against the exact sequence.

use serde::Serialize;

use crate::combinatorics::big_to_f64;
use crate::density::DensitySpec;
use crate::error::{Error, Result};
use crate::quadrature::density_moments;

#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub n: u32,
    /// `None` when the quadrature for this row failed; see `error`.
    pub numeric: Option<f64>,
    pub exact: f64,
    /// The exact moment as a decimal integer.
    pub exact_digits: String,
    pub rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub spec: DensitySpec,
    pub n_max: u32,
    pub rows: Vec<MomentRow>,
    pub passed: bool,
    pub tolerance: f64,
}

impl MomentReport {
    pub fn max_rel_error(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.rel_error).try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))
    }
}

/// Integrates `x^n` against `spec` for `n = 0..=n_max` and compares with the
/// exact moments. A failed row is recorded in the report and fails it.
pub fn verify_moments(spec: &DensitySpec, n_max: u32, tolerance: f64) -> Result<MomentReport> {
    if !spec.is_probability() {
        return Err(Error::InvalidParameter(format!(
            "{} is not a probability density; moments are only checked for r <= p",
            spec.family
        )));
    }
    let exact = spec.sequence().terms(n_max)?;
    let numeric = match density_moments(spec, n_max) {
        Ok(rows) => rows,
        Err(e) => (0..=n_max).map(|_| Err(e.clone())).collect(),
    };
    let rows: Vec<MomentRow> = exact
        .iter()
        .zip(numeric)
        .enumerate()
        .map(|(n, (ex, num))| {
            let exact = big_to_f64(ex);
            let (numeric, rel_error, error) = match num {
                Ok(v) => (Some(v), Some((v - exact).abs() / exact), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            MomentRow { n: n as u32, numeric, exact, exact_digits: ex.to_string(), rel_error, error }
        })
        .collect();
    let passed = rows.iter().all(|r| r.rel_error.is_some_and(|e| e <= tolerance));
    Ok(MomentReport { spec: spec.clone(), n_max, rows, passed, tolerance })
}

/// `m_n ≤ K^n` for every `n ≤ n_max`, the growth bound of a law on `[0, K]`.
pub fn moment_growth_bound_holds(spec: &DensitySpec, n_max: u32) -> Result<bool> {
    let k = spec.support_upper;
    Ok(spec
        .sequence()
        .terms(n_max)?
        .iter()
        .enumerate()
        .all(|(n, m)| big_to_f64(m) <= k.powi(n as i32) * (1.0 + 1e-12)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fc::build_fc_spec;
    use crate::raney::build_raney_spec;

    #[test]
    fn marchenko_pastur_catalan_moments() {
        let report = verify_moments(&build_fc_spec(1).unwrap(), 7, 1e-8).unwrap();
        let exact: Vec<f64> = report.rows.iter().map(|r| r.exact).collect();
        assert_eq!(exact, [1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0, 429.0]);
        assert!(report.passed, "{:?}", report.max_rel_error());
        assert_eq!(report.rows[7].exact_digits, "429");
    }

    #[test]
    fn raney_examples() {
        let r22 = verify_moments(&build_raney_spec(2, 2).unwrap(), 2, 1e-7).unwrap();
        assert_eq!(r22.rows[1].exact, 2.0);
        assert!(r22.passed);
        let r32 = verify_moments(&build_raney_spec(3, 2).unwrap(), 2, 1e-7).unwrap();
        assert_eq!(r32.rows[2].exact, 7.0);
        assert!(r32.passed);
    }

    #[test]
    fn fuss_catalan_moments() {
        for s in 1..=6 {
            let report = verify_moments(&build_fc_spec(s).unwrap(), 8, 1e-8).unwrap();
            assert!(report.passed, "s = {s}: {:?}", report.max_rel_error());
        }
    }

    #[test]
    fn raney_moments() {
        for p in 2..=5 {
            for r in 1..=p {
                let report = verify_moments(&build_raney_spec(p, r).unwrap(), 6, 1e-7).unwrap();
                assert!(report.passed, "({p},{r}): {:?}", report.max_rel_error());
            }
        }
    }

    #[test]
    fn quasi_measures_are_refused() {
        assert!(verify_moments(&build_raney_spec(2, 3).unwrap(), 3, 1e-7).is_err());
    }

    #[test]
    fn perturbed_coefficient_fails() {
        let spec = build_fc_spec(3).unwrap().with_scaled_coefficient(1, 1.0 + 1e-6);
        let report = verify_moments(&spec, 4, 1e-8).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn growth_bound() {
        for s in 1..=6 {
            assert!(moment_growth_bound_holds(&build_fc_spec(s).unwrap(), 30).unwrap());
        }
        for p in 2..=5 {
            for r in 1..=p {
                assert!(moment_growth_bound_holds(&build_raney_spec(p, r).unwrap(), 30).unwrap());
            }
        }
    }
}
