//! Squared singular values of products of Ginibre matrices, compared with `P_s`.
//!
//! Entries have unit variance (`E|g|² = 1`) and the squared singular values of
//! `X = G_1 ⋯ G_s` are divided by `N^s`, which makes `(1/N) Σ x_i^n → FC_s(n)`.

use nalgebra::{Complex, DMatrix, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{big_to_f64, fc_number};
use crate::error::{Error, Result};
use crate::fc::build_fc_spec;
use crate::quadrature::bin_masses;
use crate::special::CompensatedSum;

/// Moments `n = 0..=MOMENT_ORDER` are reported.
pub const MOMENT_ORDER: u32 = 6;
const SVD_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Complex,
    Real,
}

impl std::str::FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Ensemble::Complex),
            "real" => Ok(Ensemble::Real),
            _ => Err(Error::InvalidParameter(format!("unknown ensemble '{s}' (complex|real)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MCConfig {
    pub s: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub ensemble: Ensemble,
    pub seed: u64,
    pub bins: usize,
}

impl MCConfig {
    /// Reports every violated constraint at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.s < 1 {
            problems.push("s must be >= 1".to_string());
        }
        if self.n < 8 {
            problems.push(format!("N = {} must be >= 8", self.n));
        }
        if self.samples < 1 {
            problems.push("samples must be >= 1".to_string());
        }
        if self.bins < 10 {
            problems.push(format!("bins = {} must be >= 10", self.bins));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GinibreMatrix {
    Complex(DMatrix<Complex<f64>>),
    Real(DMatrix<f64>),
}

impl GinibreMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            GinibreMatrix::Complex(m) => m.shape(),
            GinibreMatrix::Real(m) => m.shape(),
        }
    }
}

/// One `n × n` Ginibre matrix with unit-variance entries.
pub fn sample_ginibre<R: rand::Rng>(n: usize, ensemble: Ensemble, rng: &mut R) -> GinibreMatrix {
    match ensemble {
        Ensemble::Complex => {
            let sd = std::f64::consts::FRAC_1_SQRT_2;
            GinibreMatrix::Complex(DMatrix::from_fn(n, n, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(sd * re, sd * im)
            }))
        }
        Ensemble::Real => GinibreMatrix::Real(DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng))),
    }
}

/// Generator for sample `index`: the seed picks the key, the index the stream.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn squared_singular_values(config: &MCConfig, index: u64) -> Option<Vec<f64>> {
    let mut rng = sample_rng(config.seed, index);
    let scale = (config.n as f64).powi(config.s as i32).recip();
    let eps = f64::EPSILON;
    let mut next = || sample_ginibre(config.n, config.ensemble, &mut rng);
    let singular = match next() {
        GinibreMatrix::Complex(mut x) => {
            for _ in 1..config.s {
                let GinibreMatrix::Complex(g) = next() else { unreachable!("ensemble is fixed") };
                x *= g;
            }
            SVD::try_new(x, false, false, eps, SVD_MAX_ITERATIONS)?.singular_values
        }
        GinibreMatrix::Real(mut x) => {
            for _ in 1..config.s {
                let GinibreMatrix::Real(g) = next() else { unreachable!("ensemble is fixed") };
                x *= g;
            }
            SVD::try_new(x, false, false, eps, SVD_MAX_ITERATIONS)?.singular_values
        }
    };
    let values: Vec<f64> = singular.iter().map(|v| v * v * scale).collect();
    values.iter().all(|v| v.is_finite()).then_some(values)
}

/// Squared singular values of all samples, concatenated in sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpectra {
    pub values: Vec<f64>,
    pub sample_size: usize,
    pub failed_samples: usize,
}

/// Draws `config.samples` products in parallel; each sample uses its own stream,
/// so the result does not depend on the thread count.
pub fn product_squared_singular_values(config: &MCConfig) -> Result<ProductSpectra> {
    config.validate()?;
    let per_sample: Vec<Option<Vec<f64>>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| squared_singular_values(config, i))
        .collect();
    let failed_samples = per_sample.iter().filter(|s| s.is_none()).count();
    let values = per_sample.into_iter().flatten().flatten().collect();
    Ok(ProductSpectra { values, sample_size: config.n, failed_samples })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub n: u32,
    pub mean: f64,
    pub std_error: f64,
    pub exact: f64,
    /// `|mean − exact| / std_error`; infinite when the standard error vanishes but the mean is off.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// Equal-width bins on `[0, K]`.
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    /// Empirical mass above `K`.
    pub overflow_mass: f64,
    pub theory_masses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCRunReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<MCConfig>,
    pub empirical_moments: Vec<MomentEstimate>,
    pub histogram: Histogram,
    pub l1_distance: f64,
    pub ks_distance: f64,
    pub negative_count: usize,
    pub failed_samples: usize,
}

impl MCRunReport {
    /// Whether the moments `1..=n_max` lie within `k` standard errors.
    pub fn moments_within(&self, n_max: u32, k: f64) -> bool {
        self.empirical_moments
            .iter()
            .filter(|m| (1..=n_max).contains(&m.n))
            .all(|m| m.z_score <= k)
    }
}

/// Histogram, L1 and KS distances and moments of `values` against `P_s`.
///
/// Values are grouped in consecutive blocks of `group_size` (one matrix each);
/// the block moments are treated as independent draws for the standard errors.
pub fn empirical_vs_theory(values: &[f64], group_size: usize, s: u32, bins: usize) -> Result<MCRunReport> {
    if values.is_empty() || group_size == 0 || values.len() % group_size != 0 {
        return Err(Error::InvalidParameter(format!(
            "need a non-empty sample whose length is a multiple of the group size {group_size}"
        )));
    }
    if bins < 1 {
        return Err(Error::InvalidParameter("need at least one bin".into()));
    }
    let spec = build_fc_spec(s)?;
    let k = spec.support_upper;
    let edges: Vec<f64> = (0..=bins).map(|i| k * i as f64 / bins as f64).collect();
    let theory_masses = bin_masses(&spec, &edges)?;

    let total = values.len() as f64;
    let mut counts = vec![0usize; bins];
    let mut overflow = 0usize;
    let mut negative_count = 0usize;
    for &x in values {
        if x < 0.0 {
            negative_count += 1;
        }
        if x >= k {
            overflow += 1;
        } else {
            let b = ((x.max(0.0) / k) * bins as f64) as usize;
            counts[b.min(bins - 1)] += 1;
        }
    }
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let overflow_mass = overflow as f64 / total;

    let l1: CompensatedSum = masses
        .iter()
        .zip(&theory_masses)
        .map(|(e, t)| (e - t).abs())
        .chain(std::iter::once(overflow_mass))
        .collect();
    let (mut emp_cdf, mut th_cdf, mut ks) = (0.0, 0.0, 0.0f64);
    for (e, t) in masses.iter().zip(&theory_masses) {
        emp_cdf += e;
        th_cdf += t;
        ks = ks.max((emp_cdf - th_cdf).abs());
    }

    let groups = values.len() / group_size;
    let empirical_moments = (0..=MOMENT_ORDER)
        .map(|n| {
            let block: Vec<f64> = values
                .chunks(group_size)
                .map(|c| c.iter().map(|x| x.powi(n as i32)).sum::<f64>() / group_size as f64)
                .collect();
            let mean = block.iter().sum::<f64>() / groups as f64;
            let var = if groups > 1 {
                block.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (groups - 1) as f64
            } else {
                0.0
            };
            let std_error = (var / groups as f64).sqrt();
            let exact = big_to_f64(&fc_number(s, n)?);
            let diff = (mean - exact).abs();
            let z_score = if diff == 0.0 { 0.0 } else { diff / std_error };
            Ok(MomentEstimate { n, mean, std_error, exact, z_score })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MCRunReport {
        config: None,
        empirical_moments,
        histogram: Histogram { edges, masses, overflow_mass, theory_masses },
        l1_distance: l1.value(),
        ks_distance: ks,
        negative_count,
        failed_samples: 0,
    })
}

/// Full Monte-Carlo run: sampling followed by [`empirical_vs_theory`].
pub fn run_mc(config: &MCConfig) -> Result<MCRunReport> {
    let spectra = product_squared_singular_values(config)?;
    if spectra.values.is_empty() {
        return Err(Error::NonConvergence { terms: SVD_MAX_ITERATIONS, last_term: f64::NAN });
    }
    let mut report = empirical_vs_theory(&spectra.values, spectra.sample_size, config.s, config.bins)?;
    report.config = Some(*config);
    report.failed_samples = spectra.failed_samples;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn config(s: u32, n: usize, samples: usize) -> MCConfig {
        MCConfig { s, n, samples, ensemble: Ensemble::Complex, seed: 7, bins: 40 }
    }

    #[test]
    fn entry_statistics() {
        let mut rng = sample_rng(1, 0);
        let GinibreMatrix::Complex(g) = sample_ginibre(64, Ensemble::Complex, &mut rng) else { panic!() };
        let n2 = (64 * 64) as f64;
        let power = g.iter().map(|z| z.norm_sqr()).sum::<f64>() / n2;
        assert!((0.8..=1.2).contains(&power), "{power}");
        let mean = g.iter().sum::<Complex<f64>>() / n2;
        assert!(mean.norm() < 3.0 * 5.0 / n2.sqrt());
        assert_eq!(sample_ginibre(2, Ensemble::Real, &mut rng).shape(), (2, 2));
        assert_eq!(sample_ginibre(2, Ensemble::Complex, &mut rng).shape(), (2, 2));
    }

    #[test]
    fn config_validation_lists_all_problems() {
        let bad = MCConfig { s: 0, n: 4, samples: 0, ensemble: Ensemble::Real, seed: 0, bins: 3 };
        match bad.validate() {
            Err(Error::InvalidParameter(msg)) => {
                for key in ["s must", "N = 4", "samples", "bins = 3"] {
                    assert!(msg.contains(key), "{msg}");
                }
            }
            other => panic!("{other:?}"),
        }
        assert!("quaternion".parse::<Ensemble>().is_err());
        assert_eq!("real".parse::<Ensemble>().unwrap(), Ensemble::Real);
    }

    #[test]
    fn marchenko_pastur_scale() {
        let spectra = product_squared_singular_values(&config(1, 256, 100)).unwrap();
        assert_eq!(spectra.values.len(), 256 * 100);
        assert!(spectra.values.iter().all(|x| *x >= 0.0));
        let mean = spectra.values.iter().sum::<f64>() / spectra.values.len() as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
        let max = spectra.values.iter().copied().fold(0.0, f64::max);
        assert!(max < 5.0, "{max}");
    }

    #[test]
    fn product_of_two_second_moment() {
        let spectra = product_squared_singular_values(&config(2, 256, 100)).unwrap();
        let m2 = spectra.values.iter().map(|x| x * x).sum::<f64>() / spectra.values.len() as f64;
        assert!((m2 - 3.0).abs() < 0.3, "{m2}");
    }

    #[test]
    fn runs_are_deterministic() {
        let c = MCConfig { s: 2, n: 32, samples: 12, ensemble: Ensemble::Real, seed: 99, bins: 20 };
        let a = run_mc(&c).unwrap();
        let b = run_mc(&c).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c3 = pool.install(|| run_mc(&c).unwrap());
        assert_eq!(a, c3);
        let other = run_mc(&MCConfig { seed: 100, ..c }).unwrap();
        assert_ne!(a.l1_distance, other.l1_distance);
    }

    #[test]
    fn histogram_accounting() {
        let report = run_mc(&config(1, 64, 10)).unwrap();
        let total = report.histogram.masses.iter().sum::<f64>() + report.histogram.overflow_mass;
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(report.negative_count, 0);
        assert_eq!(report.histogram.edges.len(), 41);
        assert!((report.histogram.theory_masses.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        // Values beyond the support never land in a regular bin.
        let r = empirical_vs_theory(&[4.0 + 1e-9, 1.0], 1, 1, 10).unwrap();
        assert_eq!(r.histogram.overflow_mass, 0.5);
        assert_eq!(r.histogram.masses.iter().sum::<f64>(), 0.5);
    }

    #[test]
    fn inverse_cdf_samples_match() {
        let spec = build_fc_spec(1).unwrap();
        let k = spec.support_upper;
        let m = 4000;
        let edges: Vec<f64> = (0..=m).map(|i| k * i as f64 / m as f64).collect();
        let mut cdf = vec![0.0];
        for w in bin_masses(&spec, &edges).unwrap() {
            cdf.push(cdf.last().unwrap() + w);
        }
        let mut rng = sample_rng(3, 0);
        let values: Vec<f64> = (0..100_000)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * cdf[m];
                let i = cdf.partition_point(|c| *c < u).clamp(1, m);
                let t = (u - cdf[i - 1]) / (cdf[i] - cdf[i - 1]);
                edges[i - 1] + t * (edges[i] - edges[i - 1])
            })
            .collect();
        let report = empirical_vs_theory(&values, 1, 1, 40).unwrap();
        assert!(report.l1_distance < 0.02, "{}", report.l1_distance);
        assert!(report.ks_distance < 0.01, "{}", report.ks_distance);
        assert!(report.moments_within(4, 5.0), "{:?}", report.empirical_moments);
    }
}
