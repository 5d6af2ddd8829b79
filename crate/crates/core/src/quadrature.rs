//! Adaptive Gauss–Kronrod (G10/K21) integration, scalar and vector-valued, and
//! the variable changes that make the density integrands smooth.
//!
//! On `[0, K/2]` the substitution `x = (K/2)·w^m` turns `x^{k/m − 1}` into
//! `w^{k−1}`; on `[K/2, K]` the substitution `x = K − v²` absorbs the square-root
//! edge. Both pieces are then analytic on their closed intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::density::DensitySpec;
use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1]`; odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for `XGK[1], XGK[3], ..., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default stopping rule: error estimate below `1e-10 · (1 + |value|)`.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Cap on the number of subintervals of one adaptive integration.
pub const MAX_INTERVALS: usize = 2000;

/// Result of a scalar integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

/// Result of a vector-valued integration; `converged[c]` tells whether component
/// `c` met its tolerance before the interval cap.
#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegral {
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub converged: Vec<bool>,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    priority: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod_rule<F>(f: &F, a: f64, b: f64, dim: usize) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, &mut [f64]) -> Result<()>,
{
    let (center, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut buf = vec![0.0; dim];
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    f(center, &mut buf)?;
    for c in 0..dim {
        kron[c] = WGK[10] * buf[c];
    }
    for (i, (&x, &wk)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        for sign in [-1.0, 1.0] {
            f(center + sign * half * x, &mut buf)?;
            for c in 0..dim {
                kron[c] += wk * buf[c];
                gauss[c] += wg * buf[c];
            }
        }
    }
    let errors = kron.iter().zip(&gauss).map(|(k, g)| (half * (k - g)).abs()).collect();
    let values = kron.into_iter().map(|k| half * k).collect();
    Ok((values, errors))
}

/// Adaptive bisection on `[a, b]` for an integrand writing `dim` components into
/// its output slice. Each component must reach `tol · (1 + |value|)`.
pub fn integrate_vec<F>(f: F, a: f64, b: f64, dim: usize, tol: f64, max_intervals: usize) -> Result<VecIntegral>
where
    F: Fn(f64, &mut [f64]) -> Result<()>,
{
    let mut heap = BinaryHeap::new();
    let mut totals = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    let push = |heap: &mut BinaryHeap<Segment>, a: f64, b: f64, values: Vec<f64>, errors: Vec<f64>, totals: &[f64]| {
        let priority = errors
            .iter()
            .zip(totals)
            .map(|(e, t)| e / (tol * (1.0 + t.abs())))
            .fold(0.0, f64::max);
        heap.push(Segment { a, b, values, errors, priority });
    };
    let (values, errors) = kronrod_rule(&f, a, b, dim)?;
    for c in 0..dim {
        totals[c] = values[c];
        total_err[c] = errors[c];
    }
    push(&mut heap, a, b, values, errors, &totals);
    let done = |totals: &[f64], errs: &[f64]| -> Vec<bool> {
        totals.iter().zip(errs).map(|(t, e)| *e <= tol * (1.0 + t.abs())).collect()
    };
    loop {
        let converged = done(&totals, &total_err);
        if converged.iter().all(|&c| c) || heap.len() >= max_intervals {
            // Re-sum from the segments to shed the drift of incremental updates.
            let mut values = vec![0.0; dim];
            let mut errs = vec![0.0; dim];
            for seg in heap.iter() {
                for c in 0..dim {
                    values[c] += seg.values[c];
                    errs[c] += seg.errors[c];
                }
            }
            let converged = done(&values, &errs);
            return Ok(VecIntegral { values, error_estimates: errs, converged, intervals: heap.len() });
        }
        let seg = heap.pop().expect("heap never empty");
        let mid = 0.5 * (seg.a + seg.b);
        let (lv, le) = kronrod_rule(&f, seg.a, mid, dim)?;
        let (rv, re) = kronrod_rule(&f, mid, seg.b, dim)?;
        for c in 0..dim {
            totals[c] += lv[c] + rv[c] - seg.values[c];
            total_err[c] += le[c] + re[c] - seg.errors[c];
        }
        push(&mut heap, seg.a, mid, lv, le, &totals);
        push(&mut heap, mid, seg.b, rv, re, &totals);
    }
}

/// Scalar adaptive integration; fails with [`Error::Quadrature`] past the interval cap.
pub fn integrate<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    let r = integrate_vec(|x, out| Ok(out[0] = f(x)?), a, b, 1, tol, MAX_INTERVALS)?;
    if !r.converged[0] {
        return Err(Error::Quadrature { value: r.values[0], error_estimate: r.error_estimates[0] });
    }
    Ok(Integral { value: r.values[0], error_estimate: r.error_estimates[0] })
}

/// Smallest integer `m ≥ 1` with `m(1 + α) ≥ 1`, so that `x = c·w^m` makes
/// `x^α dx` bounded at `w = 0`.
pub fn substitution_power(singular_exponent: f64) -> u32 {
    let m = (1.0 / (1.0 + singular_exponent) - 1e-9).ceil();
    m.max(1.0) as u32
}

fn check_endpoints(a: f64, b: f64, upper: f64) -> Result<()> {
    if !(0.0 <= a && a <= b && b <= upper) {
        return Err(Error::InvalidParameter(format!(
            "integration range [{a}, {b}] must lie inside [0, {upper}]"
        )));
    }
    Ok(())
}

/// Integrates `x^{n_j} f(x)` over `[a, b] ⊂ [0, K]` for every power `n_j` in
/// `powers`, with the `w`/`v` substitutions described in the module docs.
pub fn integrate_powers<F>(f: F, powers: &[f64], a: f64, b: f64, upper: f64, m: u32, tol: f64) -> Result<VecIntegral>
where
    F: Fn(f64) -> Result<f64>,
{
    check_endpoints(a, b, upper)?;
    let dim = powers.len();
    let half = 0.5 * upper;
    let mf = f64::from(m);
    let fill = |x: f64, jac: f64, out: &mut [f64]| -> Result<()> {
        let v = f(x)? * jac;
        for (o, &n) in out.iter_mut().zip(powers) {
            *o = v * x.powf(n);
        }
        Ok(())
    };
    let mut total = VecIntegral {
        values: vec![0.0; dim],
        error_estimates: vec![0.0; dim],
        converged: vec![true; dim],
        intervals: 0,
    };
    let mut add = |part: VecIntegral| {
        for c in 0..dim {
            total.values[c] += part.values[c];
            total.error_estimates[c] += part.error_estimates[c];
            total.converged[c] &= part.converged[c];
        }
        total.intervals += part.intervals;
    };
    if a < half {
        let hi = b.min(half);
        let (w0, w1) = ((a / half).powf(mf.recip()), (hi / half).powf(mf.recip()));
        let g = |w: f64, out: &mut [f64]| fill(half * w.powi(m as i32), half * mf * w.powi(m as i32 - 1), out);
        add(integrate_vec(g, w0, w1, dim, tol, MAX_INTERVALS)?);
    }
    if b > half {
        let lo = a.max(half);
        let (v0, v1) = ((upper - b).max(0.0).sqrt(), (upper - lo).sqrt());
        let g = |v: f64, out: &mut [f64]| fill(upper - v * v, 2.0 * v, out);
        add(integrate_vec(g, v0, v1, dim, tol, MAX_INTERVALS)?);
    }
    Ok(total)
}

/// `∫_0^K x^n f(x) dx` for a density with `f(x) ~ x^α` at 0 (α > −1) that
/// vanishes like `sqrt(K − x)` at `K`.
pub fn quadrature_integral<F>(density: F, weight_power: f64, upper: f64, singular_exponent_at_zero: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(singular_exponent_at_zero > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "singular exponent {singular_exponent_at_zero} must exceed -1"
        )));
    }
    let m = substitution_power(singular_exponent_at_zero);
    let r = integrate_powers(density, &[weight_power], 0.0, upper, upper, m, DEFAULT_TOL)?;
    if !r.converged[0] {
        return Err(Error::Quadrature { value: r.values[0], error_estimate: r.error_estimates[0] });
    }
    Ok(r.values[0])
}

/// Moments `n = 0..=n_max` of `spec` sharing one set of density evaluations.
/// Components that miss the tolerance are returned as [`Error::Quadrature`].
pub fn density_moments(spec: &DensitySpec, n_max: u32) -> Result<Vec<Result<f64>>> {
    let powers: Vec<f64> = (0..=n_max).map(f64::from).collect();
    let k = spec.support_upper;
    let r = integrate_powers(|x| spec.density_unchecked(x), &powers, 0.0, k, k, spec.power_denominator, DEFAULT_TOL)?;
    Ok((0..powers.len())
        .map(|c| {
            if r.converged[c] {
                Ok(r.values[c])
            } else {
                Err(Error::Quadrature { value: r.values[c], error_estimate: r.error_estimates[c] })
            }
        })
        .collect())
}

/// Mass of `spec` on each bin `[edges[i], edges[i+1]]`; edges must be increasing
/// inside `[0, K]`.
pub fn bin_masses(spec: &DensitySpec, edges: &[f64]) -> Result<Vec<f64>> {
    let k = spec.support_upper;
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("bin edges must be strictly increasing".into()));
    }
    edges
        .windows(2)
        .map(|w| {
            let r = integrate_powers(|x| spec.density_unchecked(x), &[0.0], w[0], w[1], k, spec.power_denominator, 1e-12)?;
            Ok(r.values[0])
        })
        .collect()
}

/// Distribution function `F(x) = ∫_0^x f`.
pub fn cdf(spec: &DensitySpec, x: f64) -> Result<f64> {
    let k = spec.support_upper;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let r = integrate_powers(|t| spec.density_unchecked(t), &[0.0], 0.0, x.min(k), k, spec.power_denominator, 1e-12)?;
    Ok(r.values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fc::build_fc_spec;
    use crate::raney::build_raney_spec;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| Ok(x.powi(20) - 3.0 * x.powi(7)), 0.0, 1.0, 1e-14).unwrap();
        assert!((r.value - (1.0 / 21.0 - 3.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let r = integrate(|x| Ok((50.0 * x).cos()), 0.0, 3.0, 1e-12).unwrap();
        assert!((r.value - (150.0f64).sin() / 50.0).abs() < 1e-12);
        let r = integrate(|x| Ok(1.0 / (1e-4 + (x - 0.3) * (x - 0.3))), 0.0, 1.0, 1e-12).unwrap();
        let want = 100.0 * ((70.0f64).atan() + (30.0f64).atan());
        assert!((r.value - want).abs() < 1e-8 * want);
    }

    #[test]
    fn interval_cap_reports_failure() {
        let r = integrate_vec(|x, o| Ok(o[0] = (1.0 / x).sin()), 1e-6, 1.0, 1, 1e-15, 4).unwrap();
        assert!(!r.converged[0]);
        assert!(matches!(
            integrate(|x| Ok(if x < 0.5 { 0.0 } else { 1.0 } * (1.0 / (x - 0.49999)).sin()), 0.0, 1.0, 1e-16),
            Err(Error::Quadrature { .. })
        ));
    }

    #[test]
    fn substitution_powers() {
        assert_eq!(substitution_power(-0.5), 2);
        assert_eq!(substitution_power(-2.0 / 3.0), 3);
        assert_eq!(substitution_power(-6.0 / 7.0), 7);
        assert_eq!(substitution_power(0.25), 1);
        assert_eq!(substitution_power(-0.3), 2);
    }

    #[test]
    fn singular_endpoints_beta_integral() {
        // ∫_0^1 x^{-3/4} sqrt(1 - x) dx = B(1/4, 3/2)
        let f = |x: f64| Ok(x.powf(-0.75) * (1.0 - x).sqrt());
        let v = quadrature_integral(f, 0.0, 1.0, -0.75).unwrap();
        let want = crate::special::gamma(0.25).unwrap() * crate::special::gamma(1.5).unwrap()
            / crate::special::gamma(1.75).unwrap();
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        assert!(quadrature_integral(f, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn density_integral_examples() {
        let p1 = build_fc_spec(1).unwrap();
        let v = quadrature_integral(|x| p1.density_unchecked(x), 0.0, 4.0, -0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let p2 = build_fc_spec(2).unwrap();
        let v = quadrature_integral(|x| p2.density_unchecked(x), 3.0, 6.75, -2.0 / 3.0).unwrap();
        assert!((v - 12.0).abs() < 1e-8 * 12.0, "{v}");
        let w42 = build_raney_spec(4, 2).unwrap();
        let v = quadrature_integral(|x| w42.density_unchecked(x), 2.0, w42.support_upper, -0.5).unwrap();
        assert!((v - 9.0).abs() < 1e-7 * 9.0, "{v}");
    }

    #[test]
    fn bins_add_up_to_cdf() {
        let spec = build_fc_spec(1).unwrap();
        let edges: Vec<f64> = (0..=8).map(|i| 0.5 * f64::from(i)).collect();
        let masses = bin_masses(&spec, &edges).unwrap();
        assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-11);
        // Marchenko–Pastur CDF at 2: 1/2 + 1/π
        let want = 0.5 + 1.0 / std::f64::consts::PI;
        assert!((cdf(&spec, 2.0).unwrap() - want).abs() < 1e-11);
        assert!((masses[..4].iter().sum::<f64>() - want).abs() < 1e-11);
        assert_eq!(cdf(&spec, -1.0).unwrap(), 0.0);
        assert!((cdf(&spec, 5.0).unwrap() - 1.0).abs() < 1e-11);
        assert!(bin_masses(&spec, &[0.0, 1.0, 1.0]).is_err());
    }
}
