//! Product states, their Bell distributions, and the seeded numeric oracle
//! that minimizes objectives over product states.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::{product_vector, BellBasis, QTable};
use crate::error::{Error, Result};
use crate::tensor::{CMatrix, Dims, C64, TOL_EQ};

#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    factors: Vec<Vec<C64>>,
}

impl ProductState {
    pub fn new(factors: Vec<Vec<C64>>) -> Result<Self> {
        for (k, f) in factors.iter().enumerate() {
            let n: f64 = f.iter().map(|z| z.norm_sqr()).sum();
            if (n - 1.0).abs() > TOL_EQ {
                return Err(Error::Parameter(format!("factor {k} has squared norm {n}")));
            }
        }
        Ok(ProductState { factors })
    }

    /// Normalizes each factor; fails on a zero factor.
    pub fn normalized(factors: Vec<Vec<C64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(factors.len());
        for (k, f) in factors.into_iter().enumerate() {
            let n: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n == 0.0 {
                return Err(Error::Parameter(format!("factor {k} is zero")));
            }
            out.push(f.into_iter().map(|z| z / n).collect());
        }
        Ok(ProductState { factors: out })
    }

    /// Real-amplitude convenience constructor (normalizing).
    pub fn real(factors: &[&[f64]]) -> Result<Self> {
        Self::normalized(factors.iter().map(|f| f.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    pub fn vector(&self) -> Vec<C64> {
        product_vector(&self.factors)
    }

    pub fn density(&self) -> CMatrix {
        CMatrix::outer(&self.vector())
    }

    fn check_dims(&self, dims: &Dims) -> Result<()> {
        if self.dims() != dims.factors() {
            return Err(Error::Dimension(format!(
                "product state dims {:?} vs {:?}",
                self.dims(),
                dims.factors()
            )));
        }
        Ok(())
    }
}

/// P_k(gamma) = |<gamma|psi_k>|^2 in basis index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub values: Vec<f64>,
}

impl Distribution {
    pub fn at(&self, basis: &BellBasis, idx: &[usize]) -> Result<f64> {
        Ok(self.values[basis.position(idx)?])
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn distribution(basis: &BellBasis, gamma: &ProductState) -> Result<Distribution> {
    gamma.check_dims(basis.dims())?;
    let g = gamma.vector();
    let values = basis
        .states()
        .iter()
        .map(|psi| psi.iter().zip(&g).map(|(a, b)| a.conj() * b).sum::<C64>().norm_sqr())
        .collect();
    Ok(Distribution { values })
}

/// C(gamma) = sum_k q_k P_k (unscaled).
pub fn c_gamma(q: &QTable, dist: &Distribution) -> Result<f64> {
    let qs = q.as_f64();
    if qs.len() != dist.values.len() {
        return Err(Error::Dimension(format!("{} coefficients for {} probabilities", qs.len(), dist.values.len())));
    }
    Ok(qs.iter().zip(&dist.values).map(|(a, b)| a * b).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSettings {
    pub grid_density: usize,
    pub refine_iters: usize,
    pub seed: u64,
    /// Number of lattice candidates evaluated before refinement.
    pub candidates: usize,
    /// Number of best candidates refined by coordinate descent.
    pub starts: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { grid_density: 24, refine_iters: 20_000, seed: 42, candidates: 4096, starts: 16 }
    }
}

impl OracleSettings {
    pub fn with_seed(seed: u64) -> Self {
        OracleSettings { seed, ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: ProductState,
    pub angles: Vec<f64>,
}

/// Generalized spherical parameterization: per factor of dimension d,
/// d-1 magnitude angles then d-1 phases; the first amplitude is real.
pub fn angles_len(dims: &Dims) -> usize {
    dims.factors().iter().map(|d| 2 * (d - 1)).sum()
}

pub fn state_from_angles(dims: &Dims, angles: &[f64]) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity(dims.arity());
    let mut o = 0;
    for &d in dims.factors() {
        let theta = &angles[o..o + d - 1];
        let phi = &angles[o + d - 1..o + 2 * (d - 1)];
        o += 2 * (d - 1);
        let mut v = Vec::with_capacity(d);
        let mut s = 1.0;
        for k in 0..d {
            let r = if k < d - 1 { s * theta[k].cos() } else { s };
            if k < d - 1 {
                s *= theta[k].sin();
            }
            let ph = if k == 0 { 0.0 } else { phi[k - 1] };
            v.push(C64::from_polar(r, ph));
        }
        out.push(v);
    }
    out
}

/// Angle of lattice level m: magnitudes on [0, pi/2], phases on [0, 2pi).
fn lattice_angle(is_phase: bool, m: usize, g: usize) -> f64 {
    if is_phase {
        2.0 * PI * m as f64 / g as f64
    } else {
        FRAC_PI_2 * m as f64 / g as f64
    }
}

fn phase_mask(dims: &Dims) -> Vec<bool> {
    let mut mask = Vec::new();
    for &d in dims.factors() {
        mask.extend(std::iter::repeat_n(false, d - 1));
        mask.extend(std::iter::repeat_n(true, d - 1));
    }
    mask
}

fn coordinate_descent(f: &impl Fn(&[f64]) -> f64, x: &mut [f64], h0: f64, max_sweeps: usize) -> f64 {
    let mut fx = f(x);
    let mut h = h0;
    let mut sweeps = 0;
    while h > 1e-10 && sweeps < max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut step = h * dir;
                loop {
                    let old = x[i];
                    x[i] = old + step;
                    let fn_ = f(x);
                    if fn_ < fx {
                        fx = fn_;
                        improved = true;
                        step *= 2.0;
                    } else {
                        x[i] = old;
                        break;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    fx
}

/// Minimizes `f` over product states: seeded lattice candidates on the
/// grid_density angle lattice, then coordinate descent with step halving
/// from the best `starts` candidates. Ties resolve to the lexicographically
/// smallest lattice coordinate.
pub fn minimize_over_products(
    dims: &Dims,
    f: impl Fn(&[C64]) -> f64,
    settings: &OracleSettings,
) -> Result<OracleResult> {
    if settings.grid_density < 4 {
        return Err(Error::Parameter(format!("grid_density must be >= 4, got {}", settings.grid_density)));
    }
    let g = settings.grid_density;
    let mask = phase_mask(dims);
    let n = mask.len();
    let obj = |angles: &[f64]| f(&product_vector(&state_from_angles(dims, angles)));
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut cands: Vec<(f64, Vec<usize>)> = Vec::with_capacity(settings.candidates + 1);
    let mut coords = vec![0usize; n];
    let to_angles = |c: &[usize]| -> Vec<f64> { c.iter().zip(&mask).map(|(&m, &p)| lattice_angle(p, m, g)).collect() };
    cands.push((obj(&to_angles(&coords)), coords.clone()));
    for _ in 0..settings.candidates {
        for (k, &p) in mask.iter().enumerate() {
            coords[k] = if p { rng.gen_range(0..g) } else { rng.gen_range(0..=g) };
        }
        cands.push((obj(&to_angles(&coords)), coords.clone()));
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    cands.dedup_by(|a, b| a.1 == b.1);
    let h0 = 2.0 * PI / g as f64;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, c) in cands.iter().take(settings.starts.max(1)) {
        let mut x = to_angles(c);
        let v = coordinate_descent(&obj, &mut x, h0, settings.refine_iters);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, x));
        }
    }
    let (value, angles) = best.expect("at least one start");
    let argmin = ProductState::normalized(state_from_angles(dims, &angles))?;
    Ok(OracleResult { value, argmin, angles })
}

/// Brute-force minimum of C(gamma) over product states.
pub fn oracle_min_c(basis: &BellBasis, q: &QTable, settings: &OracleSettings) -> Result<OracleResult> {
    let m = q.operator(basis);
    minimize_over_products(basis.dims(), |v| m.quadratic_form(v).map(|z| z.re).unwrap_or(f64::NAN), settings)
}

/// Minimum of <gamma|W|gamma> over product states.
pub fn oracle_min_expectation(w: &CMatrix, dims: &Dims, settings: &OracleSettings) -> Result<OracleResult> {
    if w.rows() != dims.total() {
        return Err(Error::Dimension(format!("witness of size {} for dims {:?}", w.rows(), dims.factors())));
    }
    minimize_over_products(dims, |v| w.quadratic_form(v).map(|z| z.re).unwrap_or(f64::NAN), settings)
}

pub fn random_product_state(dims: &Dims, rng: &mut impl Rng) -> ProductState {
    let factors = dims
        .factors()
        .iter()
        .map(|&d| {
            let v: Vec<C64> = (0..d).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / n).collect()
        })
        .collect();
    ProductState { factors }
}

/// Standard normal sample by Box-Muller.
pub fn gauss(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveCheck {
    /// Numeric max of P+ over product states with P- = lambda P+.
    pub curve_max: f64,
    /// P+ on the line through (1/2^{n-1}, 0) and (1/2, 1/2).
    pub line_value: f64,
    /// The reference closed form (2/(1+sqrt l)) / (1+rho^{2/n})^n.
    pub reference_formula: f64,
    /// Closed form of the numeric maximum: 2 / ((1+sqrt l)^2 (1+rho^{2/n})^n).
    pub corrected_formula: f64,
}

/// Tests the polygon claim for P+ = P_{00..0}, P- = P_{10..0} on n qubits.
pub fn curve_check_multiqubit(n: usize, lambda: f64) -> Result<CurveCheck> {
    if n < 2 {
        return Err(Error::Parameter(format!("n must be >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Parameter(format!("lambda must be in [0,1], got {lambda}")));
    }
    let half = 2f64.powi(n as i32 - 1);
    let line_value = 1.0 / (half - lambda * (half - 2.0));
    let sl = lambda.sqrt();
    let rho = (1.0 - sl) / (1.0 + sl);
    let denom = (1.0 + rho.powf(2.0 / n as f64)).powi(n as i32);
    let reference_formula = (2.0 / (1.0 + sl)) / denom;
    let corrected_formula = 2.0 / ((1.0 + sl).powi(2) * denom);

    // For fixed magnitudes a = prod cos, b = prod sin the relative phase is free:
    // P+ = (a^2+b^2)/(1+lambda) whenever (1-lambda)(a^2+b^2) <= 2ab(1+lambda).
    let value = |th: &[f64]| -> f64 {
        let a: f64 = th.iter().map(|t| t.cos()).product();
        let b: f64 = th.iter().map(|t| t.sin()).product();
        let s = a * a + b * b;
        if (1.0 - lambda) * s <= 2.0 * a.abs() * b.abs() * (1.0 + lambda) + 1e-15 {
            s / (1.0 + lambda)
        } else {
            f64::NEG_INFINITY
        }
    };
    let g = 48usize;
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    // Symmetric diagonal plus per-coordinate grid refinement.
    for k in 0..=4 * g {
        let t = FRAC_PI_2 * k as f64 / (4 * g) as f64;
        let th = vec![t; n];
        let v = value(&th);
        if v > best.0 {
            best = (v, th);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20_000 {
        let th: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..FRAC_PI_2)).collect();
        let v = value(&th);
        if v > best.0 {
            best = (v, th);
        }
    }
    let neg = |th: &[f64]| -value(th);
    let mut x = best.1.clone();
    let v = -coordinate_descent(&neg, &mut x, FRAC_PI_2 / g as f64, 20_000);
    Ok(CurveCheck { curve_max: v.max(best.0), line_value, reference_formula, corrected_formula })
}

/// Maximum of P_{00..0} + P_{00..01} over n-qubit product states.
pub fn max_sum_multiqubit_b(n: usize, settings: &OracleSettings) -> Result<f64> {
    let dims = Dims::qubits(n);
    let basis = BellBasis::build(&dims, crate::bell::Convention::QubitPauli)?;
    let mut last = vec![0; n];
    last[n - 1] = 1;
    let a = basis.state(&vec![0; n])?.to_vec();
    let b = basis.state(&last)?.to_vec();
    let f = |v: &[C64]| {
        let pa: C64 = a.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
        let pb: C64 = b.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
        -(pa.norm_sqr() + pb.norm_sqr())
    };
    Ok(-minimize_over_products(&dims, f, settings)?.value)
}

/// Weighted objective sum_k q_k P_k for float weights (used for numeric checks).
pub fn weighted_distribution_objective(basis: &BellBasis, weights: &[f64]) -> CMatrix {
    let d = basis.dims().total();
    let mut m = CMatrix::zeros(d, d);
    for (s, &w) in basis.states().iter().zip(weights) {
        if w != 0.0 {
            m = &m + &CMatrix::outer(s).scale(w);
        }
    }
    m
}
