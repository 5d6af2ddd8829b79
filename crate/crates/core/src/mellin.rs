//! Independent reconstruction of the densities as multiplicative (Mellin)
//! convolutions of beta-type factors
//!
//! ```text
//! M^{-1}[Γ(σ+a)/Γ(σ+b)](x) = x^a (1−x)^{b−a−1} / Γ(b−a),   0 < x < 1.
//! ```
//!
//! Each factor is non-negative, so the convolution product is too: a positivity
//! certificate that shares no code path with the hypergeometric series.
//!
//! Numerically every factor lives on a uniform lattice in `u = −ln x` over
//! `[0, U]`, `U = ln 1e8`. Cell masses are integrated after the substitution
//! `w = u^{c+1}` (`c = b−a−1`), which removes the endpoint singularity at `x = 1`;
//! mass beyond `U` is kept in a tail bin. In `u` the Mellin convolution is an
//! ordinary additive convolution of masses, done by direct summation with each
//! pair split evenly between the two cells adjacent to its centre sum. Nothing
//! negative is ever added, and mass is conserved up to rounding.

use serde::Serialize;

use crate::density::{DensitySpec, Family};
use crate::error::{Error, Result};
use crate::special::{gamma, CompensatedSum};

/// Smallest grid abscissa relative to the support bound.
pub const GRID_EPSILON: f64 = 1e-8;
/// Allowed relative drift of the total mass through a convolution.
pub const MASS_TOLERANCE: f64 = 1e-6;
/// Lower bound on the internal lattice size of [`oracle_density`].
const FINE_CELLS: usize = 8192;
const MIN_GRID: usize = 64;

const GL_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_NODES
        .iter()
        .zip(&GL_WEIGHTS)
        .map(|(x, w)| w * (f(c - h * x) + f(c + h * x)))
        .sum::<f64>()
        * h
}

/// Density `x^a (1−x)^{b−a−1} / Γ(b−a)` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaFactor {
    pub a: f64,
    pub b: f64,
}

impl BetaFactor {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > a) {
            return Err(Error::InvalidParameter(format!(
                "beta factor needs a > -1 and b > a, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// Exponent `b − a − 1` of `(1 − x)`.
    pub fn exponent_at_one(&self) -> f64 {
        self.b - self.a - 1.0
    }

    /// Total mass `Γ(1+a)/Γ(1+b)`.
    pub fn mass(&self) -> f64 {
        gamma(1.0 + self.a).expect("a > -1") / gamma(1.0 + self.b).expect("b > -1")
    }

    fn norm(&self) -> f64 {
        gamma(self.b - self.a).expect("b > a").recip()
    }

    /// Mass on `u ∈ [u0, u1]`. With `g(u) = u^c φ(u)` and `φ` analytic, the
    /// substitution `w = u^{c+1}` leaves a smooth integrand.
    fn lattice_cell_mass(&self, u0: f64, u1: f64) -> f64 {
        let c = self.exponent_at_one();
        let e = c + 1.0;
        let phi = |u: f64| {
            let ratio = if u == 0.0 { 1.0 } else { -(-u).exp_m1() / u };
            (-(self.a + 1.0) * u).exp() * ratio.powf(c)
        };
        let integrand = |w: f64| phi(w.powf(e.recip()));
        self.norm() / e * gauss_legendre(integrand, u0.powf(e), u1.powf(e))
    }

    /// Mass on `x ∈ (0, eps)` from `x^a (1−x)^c = Σ_k (−c)_k/k! x^{a+k}`.
    fn mass_below(&self, eps: f64) -> f64 {
        let c = self.exponent_at_one();
        let mut sum = CompensatedSum::default();
        let mut coef = 1.0;
        for k in 0..60 {
            let kf = f64::from(k);
            let term = coef * eps.powf(self.a + 1.0 + kf) / (self.a + 1.0 + kf);
            sum.add(term);
            if term.abs() < 1e-18 * sum.value().abs() {
                break;
            }
            coef *= (kf - c) / (kf + 1.0);
        }
        self.norm() * sum.value()
    }
}

/// Density of one beta factor at `x ∈ (0, 1)`.
pub fn beta_factor_at(f: &BetaFactor, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { x, upper: 1.0 });
    }
    Ok(f.norm() * x.powf(f.a) * (1.0 - x).powf(f.exponent_at_one()))
}

/// Factors, scale constant `C` and support `K` with `f(x) = C · h(x/K)`,
/// `h` the Mellin convolution of the factors.
#[derive(Debug, Clone, Serialize)]
pub struct FactorDecomposition {
    pub factors: Vec<BetaFactor>,
    pub constant: f64,
    pub support_upper: f64,
}

/// Beta factors of a Fuss–Catalan or Raney (`r ≤ p`) density.
pub fn factor_list(spec: &DensitySpec) -> Result<FactorDecomposition> {
    let support_upper = spec.support_upper;
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    match spec.family {
        Family::FussCatalan { s } => {
            let sf = f64::from(s);
            let factors = (0..s)
                .map(|j| {
                    let jf = f64::from(j);
                    BetaFactor::new((jf - sf) / (sf + 1.0), (2.0 + jf - sf) / sf)
                })
                .collect::<Result<_>>()?;
            let constant = sf.powf(sf - 1.5) / ((sf + 1.0).powf(sf + 0.5) * sqrt_2pi);
            Ok(FactorDecomposition { factors, constant, support_upper })
        }
        Family::Raney { p, r } => {
            if r > p {
                return Err(Error::InvalidParameter(format!(
                    "W_{{{p},{r}}} has no positive factorisation (r > p)"
                )));
            }
            let (pf, rf) = (f64::from(p), f64::from(r));
            let mut factors = Vec::with_capacity(p as usize);
            if r < p {
                factors.push(BetaFactor::new((rf - pf) / pf, 0.0)?);
            }
            for j in 1..p {
                let jf = f64::from(j);
                factors.push(BetaFactor::new((rf - pf + jf) / pf, (rf - pf + jf + 1.0) / (pf - 1.0))?);
            }
            let constant = rf / sqrt_2pi * pf.powf(rf - pf - 0.5) / (pf - 1.0).powf(rf - pf + 1.5);
            Ok(FactorDecomposition { factors, constant, support_upper })
        }
    }
}

/// Density values on a log-spaced grid of `(0, upper]`.
///
/// Point `i` stands for the cell `[grid_i e^{−δ/2}, grid_i e^{δ/2}]`, `δ = log_step`,
/// and cell masses are taken as value times width. Mass below the first cell is
/// kept in `tail_mass`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub upper: f64,
    pub log_step: f64,
    pub tail_mass: f64,
}

impl GridFunction {
    fn cell_width(&self, i: usize) -> f64 {
        let h = 0.5 * self.log_step;
        self.grid[i] * (h.exp() - (-h).exp())
    }

    /// Mass in cell `i`.
    pub fn cell_mass(&self, i: usize) -> f64 {
        self.values[i] * self.cell_width(i)
    }

    /// Mass on the grid plus the tail.
    pub fn total_mass(&self) -> f64 {
        let s: CompensatedSum = (0..self.grid.len()).map(|i| self.cell_mass(i)).collect();
        s.value() + self.tail_mass
    }

    /// Cell masses ordered by increasing `u = −ln(x/upper)`.
    fn lattice(&self) -> Lattice {
        let n = self.grid.len();
        Lattice {
            step: self.log_step,
            masses: (0..n).rev().map(|i| self.cell_mass(i)).collect(),
            tail: self.tail_mass,
        }
    }

    fn check(&self) -> Result<()> {
        if self.grid.len() < MIN_GRID || self.grid.len() != self.values.len() {
            return Err(Error::GridMismatch(format!(
                "need at least {MIN_GRID} points and equal lengths (grid {}, values {})",
                self.grid.len(),
                self.values.len()
            )));
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch("grid must increase strictly and values be finite".into()));
        }
        Ok(())
    }
}

/// Masses on the `u` lattice: cell `i` is `[iδ, (i+1)δ)`, plus mass beyond `nδ`.
#[derive(Debug, Clone)]
struct Lattice {
    step: f64,
    masses: Vec<f64>,
    tail: f64,
}

impl Lattice {
    fn from_factor(f: &BetaFactor, cells: usize, u_max: f64) -> Self {
        let step = u_max / cells as f64;
        let masses = (0..cells)
            .map(|i| f.lattice_cell_mass(i as f64 * step, (i + 1) as f64 * step))
            .collect();
        Self { step, masses, tail: f.mass_below((-u_max).exp()) }
    }

    fn total(&self) -> f64 {
        let s: CompensatedSum = self.masses.iter().copied().collect();
        s.value() + self.tail
    }

    /// Additive convolution. Centres `(i+½)δ` and `(j+½)δ` add up to the common
    /// edge of cells `i+j` and `i+j+1`, which share the pair's mass equally.
    fn convolve(&self, other: &Lattice) -> Lattice {
        let n = self.masses.len();
        let mut out = vec![0.0; n + 1];
        for (i, &mi) in self.masses.iter().enumerate() {
            if mi == 0.0 {
                continue;
            }
            let half = 0.5 * mi;
            for (j, &mj) in other.masses[..n - i].iter().enumerate() {
                let v = half * mj;
                out[i + j] += v;
                out[i + j + 1] += v;
            }
        }
        let spill = out.pop().expect("n + 1 cells");
        let own_total: f64 = self.masses.iter().sum();
        let other_total: f64 = other.masses.iter().sum();
        // Pairs with i + j >= n land beyond the grid, as does anything paired with a tail.
        let inner: f64 = out.iter().sum::<f64>() + spill;
        let beyond = own_total * other_total - inner;
        let tail = spill + beyond.max(0.0) + self.tail * (other_total + other.tail) + own_total * other.tail;
        Lattice { step: self.step, masses: out, tail }
    }

    /// Keeps every `factor`-th cell (the middle one of each group) and returns the
    /// grid function on `(0, upper]` with density `scale · h(x / upper)`. The
    /// fine-cell averages are accurate point values; coarse averages would not be.
    fn to_grid(&self, factor: usize, upper: f64, scale: f64) -> GridFunction {
        let step = self.step * factor as f64;
        let n = self.masses.len() / factor;
        let h = 0.5 * self.step;
        let fine_width = h.exp() - (-h).exp();
        let mut grid = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for k in (0..n).rev() {
            let i = k * factor + factor / 2;
            let t = (-(i as f64 + 0.5) * self.step).exp();
            grid.push(upper * t);
            values.push(scale * self.masses[i] / (t * fine_width));
        }
        GridFunction { grid, values, upper, log_step: step, tail_mass: scale * upper * self.tail }
    }
}

fn drift_check(actual: f64, expected: f64) -> Result<()> {
    let drift = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
    if drift > MASS_TOLERANCE {
        return Err(Error::MassDrift { drift });
    }
    Ok(())
}

/// Multiplicative convolution `∫ f(x/t) g(t) dt/t` of two grid functions on
/// `(0, 1]` sharing the same log step and length.
pub fn mellin_convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.check()?;
    g.check()?;
    if f.grid.len() != g.grid.len() || (f.log_step - g.log_step).abs() > 1e-12 * f.log_step {
        return Err(Error::GridMismatch("convolution needs identical log grids".into()));
    }
    if f.upper != 1.0 || g.upper != 1.0 {
        return Err(Error::GridMismatch("convolution operands must live on (0, 1]".into()));
    }
    let (lf, lg) = (f.lattice(), g.lattice());
    let out = lf.convolve(&lg);
    drift_check(out.total(), lf.total() * lg.total())?;
    Ok(out.to_grid(1, 1.0, 1.0))
}

/// Discretisation of a single factor on `n` log cells of `(ε, 1]`.
pub fn factor_grid(f: &BetaFactor, n: usize) -> Result<GridFunction> {
    if n < MIN_GRID {
        return Err(Error::InvalidParameter(format!("grid size {n} below {MIN_GRID}")));
    }
    Ok(Lattice::from_factor(f, n, -GRID_EPSILON.ln()).to_grid(1, 1.0, 1.0))
}

/// Expected and obtained total mass after each successive factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassStep {
    pub expected: f64,
    pub actual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReconstruction {
    pub decomposition: FactorDecomposition,
    pub density: GridFunction,
    pub mass_trace: Vec<MassStep>,
}

/// Convolves the factors of `spec` on an internal lattice of at least 8192 cells
/// and returns the cell averages on `grid_size` log cells of `(Kε, K]`.
pub fn oracle_reconstruction(spec: &DensitySpec, grid_size: usize) -> Result<OracleReconstruction> {
    if grid_size < 256 {
        return Err(Error::InvalidParameter(format!("oracle grid size {grid_size} must be >= 256")));
    }
    let decomposition = factor_list(spec)?;
    let refine = FINE_CELLS.div_ceil(grid_size);
    let cells = grid_size * refine;
    let u_max = -GRID_EPSILON.ln();
    let mut mass_trace = Vec::with_capacity(decomposition.factors.len());
    let mut expected = 1.0;
    let mut acc: Option<Lattice> = None;
    for f in &decomposition.factors {
        let lat = Lattice::from_factor(f, cells, u_max);
        expected *= f.mass();
        let next = match acc {
            None => lat,
            Some(prev) => prev.convolve(&lat),
        };
        let actual = next.total();
        mass_trace.push(MassStep { expected, actual });
        drift_check(actual, expected)?;
        acc = Some(next);
    }
    let lattice = acc.ok_or_else(|| Error::InvalidParameter("empty factor list".into()))?;
    let density = lattice.to_grid(refine, decomposition.support_upper, decomposition.constant);
    Ok(OracleReconstruction { decomposition, density, mass_trace })
}

pub fn oracle_density(spec: &DensitySpec, grid_size: usize) -> Result<GridFunction> {
    Ok(oracle_reconstruction(spec, grid_size)?.density)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub x: f64,
    pub oracle: f64,
    pub hypergeom: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub rows: Vec<OracleRow>,
    /// `∫|oracle − f| / ∫|f|` over `[0.05K, 0.95K]`.
    pub rel_l1_central: f64,
    pub min_oracle: f64,
}

/// Compares an oracle grid with the hypergeometric evaluation at its points.
pub fn compare_with_hypergeometric(spec: &DensitySpec, oracle: &GridFunction) -> Result<OracleComparison> {
    let k = spec.support_upper;
    let (lo, hi) = (0.05 * k, 0.95 * k);
    let (mut num, mut den) = (CompensatedSum::default(), CompensatedSum::default());
    let mut rows = Vec::with_capacity(oracle.grid.len());
    for (i, (&x, &o)) in oracle.grid.iter().zip(&oracle.values).enumerate() {
        let (h, _) = spec.density_for_plot(x)?;
        if (lo..=hi).contains(&x) {
            let w = oracle.cell_width(i);
            num.add(w * (o - h).abs());
            den.add(w * h.abs());
        }
        rows.push(OracleRow { x, oracle: o, hypergeom: h, abs_diff: (o - h).abs() });
    }
    let min_oracle = oracle.values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(OracleComparison { rows, rel_l1_central: num.value() / den.value(), min_oracle })
}
