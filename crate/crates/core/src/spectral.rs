//! Partial-transpose spectra of the 3 (x) 3 critical witnesses, decomposability
//! thresholds, bound-state construction and detection, tangency checks and
//! boundary separable states.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bell::{BellBasis, Convention};
use crate::error::{Error, Result};
use crate::product::{distribution, gauss, random_product_state, ProductState};
use crate::rational::{fmt_q, to_f64, Q};
use crate::tensor::{eig_hermitian, kron, partial_transpose, trace_product, CMatrix, Dims, C64};
use crate::witness::{family_witness, reduction_witness, window_hi, window_lo, Family};

/// Tr(W rho) below this counts as detection.
pub const DETECT_THRESHOLD: f64 = 1e-12;

fn dims33() -> Dims {
    Dims::new(vec![3, 3]).expect("valid dims")
}

fn basis33() -> BellBasis {
    BellBasis::build(&dims33(), Convention::GenericPhaseShift).expect("3x3 basis")
}

fn check_window(x: &Q) -> Result<()> {
    if x < &window_lo() || x > &window_hi() {
        return Err(Error::Parameter(format!(
            "x={} outside [{}, {}]",
            fmt_q(x),
            fmt_q(&window_lo()),
            fmt_q(&window_hi())
        )));
    }
    Ok(())
}

/// lambda_pm = 1/6 +- (1/6) sqrt(4 + 48 x (4x - 1)).
pub fn lambda_pm(x: f64) -> (f64, f64) {
    let s = (4.0 + 48.0 * x * (4.0 * x - 1.0)).sqrt() / 6.0;
    (1.0 / 6.0 + s, 1.0 / 6.0 - s)
}

/// C_j = (4/3)(x w + (1/4 - x) w-bar) w-bar^j.
pub fn c_offdiag(x: f64, j: usize) -> C64 {
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    (w * x + w.conj() * (0.25 - x)) * w.conj().powu(j as u32) * (4.0 / 3.0)
}

/// The 3 (x) 3 critical witness W_c(x) at r = -3.
pub fn critical_witness(x: &Q) -> Result<CMatrix> {
    check_window(x)?;
    Ok(family_witness(&Family::ThreeThreeX { x: x.clone() })?.matrix)
}

#[derive(Clone, Debug)]
pub struct PtSpectrum {
    pub x: Q,
    /// O_j = <psi_{jk}| W_c^{T_A} |psi_{jk'}>.
    pub blocks: Vec<CMatrix>,
    /// Closed-form C_j, j = 0, 1, 2.
    pub c_offdiag: Vec<C64>,
    pub lambda_zero: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Eigenvalues of W_c^{T_A}, ascending.
    pub numeric: Vec<f64>,
    pub q0: CMatrix,
    pub q_plus: CMatrix,
    pub q_minus: CMatrix,
    pub pt: CMatrix,
}

pub fn pt_spectrum(x: &Q) -> Result<PtSpectrum> {
    let wc = critical_witness(x)?;
    let dims = dims33();
    let pt = partial_transpose(&wc, &dims, 0)?;
    let basis = basis33();
    let xf = to_f64(x);
    let (lambda_plus, lambda_minus) = lambda_pm(xf);
    let mut blocks = Vec::with_capacity(3);
    let mut q0 = CMatrix::zeros(9, 9);
    let mut q_plus = CMatrix::zeros(9, 9);
    let mut q_minus = CMatrix::zeros(9, 9);
    for j in 0..3 {
        let states: Vec<Vec<C64>> = (0..3).map(|k| basis.state(&[j, k]).map(<[C64]>::to_vec)).collect::<Result<_>>()?;
        let proj = |a: &[C64], b: &[C64]| -> Result<C64> {
            let v = pt.apply(b)?;
            Ok(a.iter().zip(&v).map(|(x, y)| x.conj() * y).sum())
        };
        let mut o = CMatrix::zeros(3, 3);
        for k in 0..3 {
            for kp in 0..3 {
                o[(k, kp)] = proj(&states[k], &states[kp])?;
            }
        }
        q0 = &q0 + &CMatrix::outer(&states[0]);
        let mut sub = CMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                sub[(a, b)] = o[(a + 1, b + 1)];
            }
        }
        let e = eig_hermitian(&sub)?;
        for (col, target) in [(0usize, &mut q_minus), (1usize, &mut q_plus)] {
            let v = e.vectors.column(col);
            let phi: Vec<C64> = (0..9).map(|i| states[1][i] * v[0] + states[2][i] * v[1]).collect();
            *target = &*target + &CMatrix::outer(&phi);
        }
        blocks.push(o);
    }
    let numeric = eig_hermitian(&pt)?.values;
    Ok(PtSpectrum {
        x: x.clone(),
        blocks,
        c_offdiag: (0..3).map(|j| c_offdiag(xf, j)).collect(),
        lambda_zero: 0.0,
        lambda_plus,
        lambda_minus,
        numeric,
        q0,
        q_plus,
        q_minus,
        pt,
    })
}

impl PtSpectrum {
    /// max |W_c^{T_A} - (lambda_+ Q_+ - |lambda_-| Q_-)|.
    pub fn decomposition_residual(&self) -> f64 {
        let r = &self.q_plus.scale(self.lambda_plus) - &self.q_minus.scale(self.lambda_minus.abs());
        self.pt.max_abs_diff(&r)
    }

    /// max |closed-form eigenvalue - numeric eigenvalue| with multiplicity 3 each.
    pub fn eigenvalue_residual(&self) -> f64 {
        let mut expected = vec![self.lambda_minus; 3];
        expected.extend([0.0; 3]);
        expected.extend([self.lambda_plus; 3]);
        expected.sort_by(f64::total_cmp);
        expected.iter().zip(&self.numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// For r >= this value the witness at x has a positive partial transpose.
pub fn decomposability_bound(x: &Q) -> Result<f64> {
    check_window(x)?;
    let l = lambda_pm(to_f64(x)).1.abs();
    Ok((-3.0 + 9.0 * l) / (1.0 + 9.0 * l))
}

/// epsilon = (r + 3)/4, so that W(r) = epsilon I/9 + (1 - epsilon) W_c.
pub fn epsilon(r: f64) -> f64 {
    (r + 3.0) / 4.0
}

/// The 3 (x) 3 witness at parameter r (float).
pub fn witness_at_r(x: &Q, r: f64) -> Result<CMatrix> {
    let wc = critical_witness(x)?;
    let e = epsilon(r);
    Ok(&CMatrix::identity(9).scale(e / 9.0) + &wc.scale(1.0 - e))
}

/// W_Lambda^{T_A} >= 0 iff Lambda <= 1/(1 + 3|lambda_-|).
pub fn lambda_positivity_bound(x: &Q) -> Result<f64> {
    check_window(x)?;
    Ok(1.0 / (1.0 + 3.0 * lambda_pm(to_f64(x)).1.abs()))
}

pub fn min_pt_eigenvalue(m: &CMatrix) -> Result<f64> {
    let dims = Dims::new(vec![3, 3])?;
    Ok(eig_hermitian(&partial_transpose(m, &dims, 0)?)?.min())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundStateSpec {
    pub x: Q,
    /// `None` selects the smallest admissible mu.
    pub mu: Option<f64>,
    pub eta: f64,
    pub zeta: f64,
}

#[derive(Clone, Debug)]
pub struct BoundState {
    /// Trace-normalized state.
    pub rho: CMatrix,
    pub mu: f64,
    /// Trace of the unnormalized mu Q0^{T_A} + eta Q+^{T_A} + zeta Q-^{T_A}.
    pub scale: f64,
    pub min_eig: f64,
    pub min_pt_eig: f64,
}

/// Smallest mu making mu Q0^{T_A} + eta Q+^{T_A} + zeta Q-^{T_A} positive.
pub fn mu_lower_bound(x: &Q, eta: f64, zeta: f64) -> Result<f64> {
    check_window(x)?;
    let xf = to_f64(x);
    let (lp, lm) = lambda_pm(xf);
    let s = (eta - zeta) / (lm.abs() + lp);
    Ok([0.0, s / 3.0, -s * (12.0 * xf - 1.0) / 3.0, s * (12.0 * xf - 2.0) / 3.0].into_iter().fold(0.0, f64::max))
}

/// The reference lower bound on mu, for comparison with `mu_lower_bound`.
pub fn mu_reference_bound(x: &Q, eta: f64) -> Result<f64> {
    check_window(x)?;
    let xf = to_f64(x);
    let (lp, lm) = lambda_pm(xf);
    let t = 3.0 * (lm.abs() + lp);
    Ok(if xf >= 0.125 {
        (12.0 * xf - 1.0) * (1.0 / 3.0 - 2.0 * eta) / ((12.0 * xf - 1.0) + t)
    } else {
        (2.0 - 12.0 * xf) * (1.0 / 3.0 - 2.0 * eta) / ((2.0 - 12.0 * xf) + t)
    })
}

pub fn build_bound_state(spec: &BoundStateSpec) -> Result<BoundState> {
    if spec.eta < 0.0 || spec.zeta < 0.0 {
        return Err(Error::Parameter("eta and zeta must be nonnegative".into()));
    }
    let sp = pt_spectrum(&spec.x)?;
    let mu_min = mu_lower_bound(&spec.x, spec.eta, spec.zeta)?;
    let mu = spec.mu.unwrap_or(mu_min);
    if mu < 0.0 || mu < mu_min - 1e-12 {
        return Err(Error::Parameter(format!("mu={mu} below the positivity bound {mu_min}")));
    }
    let dims = dims33();
    let pt_part = &(&sp.q0.scale(mu) + &sp.q_plus.scale(spec.eta)) + &sp.q_minus.scale(spec.zeta);
    let raw = partial_transpose(&pt_part, &dims, 0)?;
    let scale = raw.trace().re;
    if scale <= 0.0 {
        return Err(Error::Parameter("state has zero trace".into()));
    }
    let rho = raw.scale(1.0 / scale);
    let min_eig = eig_hermitian(&rho)?.min();
    let min_pt_eig = eig_hermitian(&partial_transpose(&rho, &dims, 0)?)?.min();
    if min_eig < -1e-10 || min_pt_eig < -1e-10 {
        return Err(Error::Parameter(format!("not a PPT state: min eig {min_eig:.3e}, min PT eig {min_pt_eig:.3e}")));
    }
    Ok(BoundState { rho, mu, scale, min_eig, min_pt_eig })
}

/// (Tr(W rho), detected).
pub fn detect(w: &CMatrix, rho: &CMatrix) -> Result<(f64, bool)> {
    let v = trace_product(w, rho)?.re;
    Ok((v, v < -DETECT_THRESHOLD))
}

/// r_star = (-3 + 27 delta)/(1 + 27 delta), delta = zeta |lambda_-| - eta lambda_+.
pub fn detection_r_bound(x: &Q, eta: f64, zeta: f64) -> Result<f64> {
    check_window(x)?;
    let (lp, lm) = lambda_pm(to_f64(x));
    let delta = zeta * lm.abs() - eta * lp;
    if delta <= 0.0 {
        return Err(Error::Parameter(format!("zeta |lambda_-| <= eta lambda_+ (delta = {delta:.3e}): no detection")));
    }
    Ok((-3.0 + 27.0 * delta) / (1.0 + 27.0 * delta))
}

#[derive(Clone, Debug)]
pub struct OptimalityReport {
    pub samples: usize,
    pub max_residue: f64,
    /// P00 = 1/3, P01 = P02, P11 = P22, P12 = P21 on every sample.
    pub reference_pattern: bool,
    /// The same identities with the two indices exchanged.
    pub transposed_pattern: bool,
}

impl OptimalityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_residue < tol
    }
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Residues Tr(W |a><a| (x) |a*><a*|) over seeded random a.
pub fn optimality_check(w: &CMatrix, samples: usize, seed: u64) -> Result<OptimalityReport> {
    if w.rows() != 9 || w.cols() != 9 {
        return Err(Error::Dimension(format!("optimality check needs a 9x9 witness, got {}x{}", w.rows(), w.cols())));
    }
    let basis = basis33();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residue: f64 = 0.0;
    let mut reference = true;
    let mut transposed = true;
    let close = |a: f64, b: f64| (a - b).abs() < 1e-10;
    for _ in 0..samples {
        let a = random_unit(&mut rng, 3);
        let ac: Vec<C64> = a.iter().map(|z| z.conj()).collect();
        let g = ProductState::new(vec![a, ac])?;
        max_residue = max_residue.max(w.quadratic_form(&g.vector())?.re.abs());
        let d = distribution(&basis, &g)?;
        let p = |i: usize, j: usize| d.at(&basis, &[i, j]).unwrap_or(f64::NAN);
        reference &= close(p(0, 0), 1.0 / 3.0) && close(p(0, 1), p(0, 2)) && close(p(1, 1), p(2, 2)) && close(p(1, 2), p(2, 1));
        transposed &= close(p(0, 0), 1.0 / 3.0) && close(p(1, 0), p(2, 0)) && close(p(1, 1), p(2, 2)) && close(p(2, 1), p(1, 2));
    }
    Ok(OptimalityReport { samples, max_residue, reference_pattern: reference, transposed_pattern: transposed })
}

/// Omega^i S^j on one qutrit.
pub fn local_factor(i: usize, j: usize) -> Result<CMatrix> {
    let (om, s) = crate::bell::build_omega_shift(3)?;
    let mut u = CMatrix::identity(3);
    for _ in 0..i {
        u = u.matmul(&om)?;
    }
    for _ in 0..j {
        u = u.matmul(&s)?;
    }
    Ok(u)
}

/// Local unitary Omega^i S^j on the first factor.
pub fn local_unitary(i: usize, j: usize) -> Result<CMatrix> {
    Ok(kron(&local_factor(i, j)?, &CMatrix::identity(3)))
}

pub fn conjugate(u: &CMatrix, m: &CMatrix) -> Result<CMatrix> {
    u.matmul(m)?.matmul(&u.adjoint())
}

#[derive(Clone, Debug)]
pub struct BoundarySeparable {
    pub rho: CMatrix,
    /// Weighted product states whose mixture equals `rho`.
    pub decomposition: Vec<(f64, ProductState)>,
}

/// rho_S^mu = (mu rho_0 + (1 - mu) rho'_0)/3, with rho_0 = sum_k |psi_k0><psi_k0|
/// and rho'_0 = sum_k |psi_0k><psi_0k|, optionally conjugated by a local unitary.
pub fn boundary_separables(mu: f64, unitary_index: Option<(usize, usize)>) -> Result<BoundarySeparable> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Parameter(format!("mu must be in [0,1], got {mu}")));
    }
    let basis = basis33();
    let mut bell = CMatrix::zeros(9, 9);
    for k in 0..3 {
        bell = &bell + &basis.projector(&[k, 0])?.scale(mu / 3.0);
        bell = &bell + &basis.projector(&[0, k])?.scale((1.0 - mu) / 3.0);
    }
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut decomposition = Vec::new();
    for l in 0..3 {
        let e: Vec<C64> = (0..3).map(|j| if j == l { one } else { zero }).collect();
        decomposition.push((mu / 3.0, ProductState::new(vec![e.clone(), e])?));
    }
    for m in 0..3 {
        let f: Vec<C64> = (0..3).map(|l| w.powu((m * l) as u32) / 3f64.sqrt()).collect();
        let fc: Vec<C64> = f.iter().map(|z| z.conj()).collect();
        decomposition.push(((1.0 - mu) / 3.0, ProductState::new(vec![f, fc])?));
    }
    let mut rho = CMatrix::zeros(9, 9);
    for (p, g) in &decomposition {
        rho = &rho + &g.density().scale(*p);
    }
    if !rho.approx_eq(&bell, 1e-12) {
        return Err(Error::Parameter("product decomposition does not reproduce the Bell form".into()));
    }
    if let Some((i, j)) = unitary_index {
        let u = local_unitary(i, j)?;
        rho = conjugate(&u, &rho)?;
        let u1 = local_factor(i, j)?;
        decomposition = decomposition
            .into_iter()
            .map(|(p, g)| {
                let f = g.factors();
                let a = u1.apply(&f[0])?;
                Ok((p, ProductState::new(vec![a, f[1].clone()])?))
            })
            .collect::<Result<_>>()?;
    }
    Ok(BoundarySeparable { rho, decomposition })
}

/// W_Lambda(x) = Lambda W_c(x) + (1 - Lambda) W_red.
pub fn w_lambda(x: &Q, lambda: f64) -> Result<CMatrix> {
    let wc = critical_witness(x)?;
    let wr = reduction_witness(3)?;
    Ok(&wc.scale(lambda) + &wr.scale(1.0 - lambda))
}

/// Seeded ensemble of PPT states: Bell-diagonal states and mixtures with
/// random product states, kept when both rho and rho^{T_A} are positive.
pub fn ppt_ensemble(count: usize, seed: u64) -> Result<Vec<CMatrix>> {
    use rand::Rng;
    let basis = basis33();
    let dims = dims33();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Parameter("PPT ensemble sampling did not converge".into()));
        }
        let w: Vec<f64> = (0..9).map(|_| rng.gen::<f64>().powi(3)).collect();
        let tot: f64 = w.iter().sum();
        let mut rho = crate::product::weighted_distribution_objective(&basis, &w.iter().map(|v| v / tot).collect::<Vec<_>>());
        let t: f64 = rng.gen_range(0.0..0.5);
        if t > 0.0 {
            let g = random_product_state(&dims, &mut rng);
            rho = &rho.scale(1.0 - t) + &g.density().scale(t);
        }
        if eig_hermitian(&partial_transpose(&rho, &dims, 0)?)?.min() >= -1e-12 {
            out.push(rho);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::tensor::TOL_EQ;

    #[test]
    fn spectrum_at_window_start() {
        let sp = pt_spectrum(&q(67, 756)).unwrap();
        assert!((sp.lambda_minus + 0.01997).abs() < 1e-5);
        assert!(sp.eigenvalue_residual() < 1e-9);
        assert!(sp.decomposition_residual() < 1e-12);
        let id = &(&sp.q0 + &sp.q_plus) + &sp.q_minus;
        assert!(id.approx_eq(&CMatrix::identity(9), TOL_EQ));
        let n = sp.c_offdiag[0].norm();
        assert!(sp.c_offdiag.iter().all(|z| (z.norm() - n).abs() < 1e-15));
    }

    #[test]
    fn reduction_point_is_pt_positive() {
        let sp = pt_spectrum(&q(1, 8)).unwrap();
        assert!(sp.lambda_minus.abs() < 1e-15);
        assert!((decomposability_bound(&q(1, 8)).unwrap() + 3.0).abs() < 1e-15);
        assert!((lambda_positivity_bound(&q(1, 8)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_state_detected() {
        let spec = BoundStateSpec { x: q(67, 756), mu: None, eta: 0.0, zeta: 0.05 };
        let bs = build_bound_state(&spec).unwrap();
        let (v, det) = detect(&critical_witness(&q(67, 756)).unwrap(), &bs.rho).unwrap();
        assert!(det && v < -1e-6);
        let low = BoundStateSpec { mu: Some(bs.mu * 0.5), ..spec };
        assert!(build_bound_state(&low).is_err());
    }

    #[test]
    fn equal_weights_not_detected() {
        let x = q(1, 10);
        let bs = build_bound_state(&BoundStateSpec { x: x.clone(), mu: None, eta: 0.05, zeta: 0.05 }).unwrap();
        assert!(!detect(&critical_witness(&x).unwrap(), &bs.rho).unwrap().1);
        assert!(detection_r_bound(&x, 0.05, 0.05).is_err());
    }

    #[test]
    fn maximally_mixed_trace() {
        let w = critical_witness(&q(1, 10)).unwrap();
        let (v, det) = detect(&w, &CMatrix::identity(9).scale(1.0 / 9.0)).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-12 && !det);
    }

    #[test]
    fn identity_fails_optimality() {
        let r = optimality_check(&CMatrix::identity(9).scale(1.0 / 9.0), 10, 1).unwrap();
        assert!((r.max_residue - 1.0 / 9.0).abs() < 1e-12);
        assert!(!r.passed(1e-10));
    }

    #[test]
    fn boundary_states() {
        let wl = w_lambda(&q(1, 10), 0.5).unwrap();
        for mu in [0.0, 0.5, 1.0] {
            let s = boundary_separables(mu, None).unwrap();
            assert!((s.rho.trace().re - 1.0).abs() < 1e-12);
            assert!(trace_product(&wl, &s.rho).unwrap().re.abs() < 1e-10);
        }
        let s = boundary_separables(0.25, Some((1, 2))).unwrap();
        let u = local_unitary(1, 2).unwrap();
        let wt = conjugate(&u, &wl).unwrap();
        assert!(trace_product(&wt, &s.rho).unwrap().re.abs() < 1e-10);
    }
}
