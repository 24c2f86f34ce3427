//! Generalized Bell bases built from phase (modulation) and shift operators.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::tensor::{kron, kron_vec, CMatrix, Dims, C64, TOL_EQ};

/// Multi-index (i1, ..., in) of a Bell state. Ordered lexicographically.
pub type BellIndex = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Omega^{i1} (x) S^{i2} (x) ... (x) S^{in} |psi_0>.
    GenericPhaseShift,
    /// sigma_z^{i1} (x) sigma_x^{i2} (x) ... on qubits.
    QubitPauli,
    /// I_2 (x) S^{i2} Omega^{i1} |psi_0> on 2 (x) N.
    TwoByN,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "generic" | "generic-phase-shift" => Ok(Convention::GenericPhaseShift),
            "qubit" | "qubit-pauli" | "pauli" => Ok(Convention::QubitPauli),
            "two-by-n" | "2xn" | "twobyn" => Ok(Convention::TwoByN),
            other => Err(Error::Parameter(format!("unknown convention '{other}'"))),
        }
    }
}

fn omega(d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / d as f64)
}

fn cyclic_shift(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d, d);
    for j in 0..d {
        s[((j + 1) % d, j)] = C64::new(1.0, 0.0);
    }
    s
}

fn phase_diag(d: usize, w: C64) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = w.powu(j as u32);
    }
    m
}

/// Phase operator Omega = diag(1, w, ..., w^{d-1}) and cyclic shift S|j> = |j+1 mod d>.
pub fn build_omega_shift(d: usize) -> Result<(CMatrix, CMatrix)> {
    if d < 2 {
        return Err(Error::Parameter(format!("dimension must be >= 2, got {d}")));
    }
    Ok((phase_diag(d, omega(d)), cyclic_shift(d)))
}

/// Block forms displayed for the 2 (x) N family: Omega = diag(1,-1,1,...,1) and S
/// swapping the first two levels.
pub fn two_by_n_display_operators(n: usize) -> Result<(CMatrix, CMatrix)> {
    if n < 2 {
        return Err(Error::Parameter(format!("N must be >= 2, got {n}")));
    }
    let (om, _) = two_by_n_generators(n)?;
    let mut s = CMatrix::identity(n);
    s[(0, 0)] = C64::new(0.0, 0.0);
    s[(1, 1)] = C64::new(0.0, 0.0);
    s[(0, 1)] = C64::new(1.0, 0.0);
    s[(1, 0)] = C64::new(1.0, 0.0);
    Ok((om, s))
}

/// Operators that generate the 2 (x) N basis: Omega = diag(1,-1,1,...,1) and the
/// cyclic shift. The two-level swap squares to the identity and cannot reach
/// all 2N states for N > 2.
pub fn two_by_n_generators(n: usize) -> Result<(CMatrix, CMatrix)> {
    if n < 2 {
        return Err(Error::Parameter(format!("N must be >= 2, got {n}")));
    }
    let mut diag = vec![1.0; n];
    diag[1] = -1.0;
    Ok((CMatrix::diag(&diag), cyclic_shift(n)))
}

fn mat_pow(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::identity(m.rows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

fn all_indices(ranges: &[usize]) -> Vec<BellIndex> {
    let mut out = vec![vec![]];
    for &r in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..r).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellBasis {
    dims: Dims,
    convention: Convention,
    indices: Vec<BellIndex>,
    states: Vec<Vec<C64>>,
}

/// Reference state (1/sqrt d1) sum_{i < d1} |i>|i>...|i>.
pub fn psi_zero(dims: &Dims) -> Vec<C64> {
    let f = dims.factors();
    let d1 = f[0];
    let mut v = vec![C64::new(0.0, 0.0); dims.total()];
    let amp = 1.0 / (d1 as f64).sqrt();
    for i in 0..d1 {
        let pos = f.iter().fold(0, |acc, &d| acc * d + i);
        v[pos] = C64::new(amp, 0.0);
    }
    v
}

impl BellBasis {
    pub fn build(dims: &Dims, convention: Convention) -> Result<Self> {
        let f = dims.factors();
        let psi0 = psi_zero(dims);
        let indices = all_indices(f);
        let ops: Vec<CMatrix> = match convention {
            Convention::GenericPhaseShift => {
                let om = phase_diag(f[0], omega(f[0]));
                indices
                    .iter()
                    .map(|idx| {
                        let mut op = mat_pow(&om, idx[0]);
                        for (k, &d) in f.iter().enumerate().skip(1) {
                            op = kron(&op, &mat_pow(&cyclic_shift(d), idx[k]));
                        }
                        op
                    })
                    .collect()
            }
            Convention::QubitPauli => {
                if f.iter().any(|&d| d != 2) || f.len() < 2 {
                    return Err(Error::Parameter(format!("QubitPauli requires qubit dims, got {f:?}")));
                }
                let sz = CMatrix::diag(&[1.0, -1.0]);
                let sx = cyclic_shift(2);
                indices
                    .iter()
                    .map(|idx| {
                        let mut op = mat_pow(&sz, idx[0]);
                        for &i in &idx[1..] {
                            op = kron(&op, &mat_pow(&sx, i));
                        }
                        op
                    })
                    .collect()
            }
            Convention::TwoByN => {
                if f.len() != 2 || f[0] != 2 {
                    return Err(Error::Parameter(format!("TwoByN requires dims (2, N), got {f:?}")));
                }
                let (om, s) = two_by_n_generators(f[1])?;
                indices
                    .iter()
                    .map(|idx| kron(&CMatrix::identity(2), &(&mat_pow(&s, idx[1]) * &mat_pow(&om, idx[0]))))
                    .collect()
            }
        };
        let states = ops.iter().map(|op| op.apply(&psi0)).collect::<Result<Vec<_>>>()?;
        Ok(BellBasis { dims: dims.clone(), convention, indices, states })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn indices(&self) -> &[BellIndex] {
        &self.indices
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    pub fn position(&self, idx: &[usize]) -> Result<usize> {
        self.indices.binary_search_by(|probe| probe.as_slice().cmp(idx)).map_err(|_| Error::UnknownIndex(idx.to_vec()))
    }

    pub fn state(&self, idx: &[usize]) -> Result<&[C64]> {
        Ok(&self.states[self.position(idx)?])
    }

    pub fn projector(&self, idx: &[usize]) -> Result<CMatrix> {
        Ok(CMatrix::outer(self.state(idx)?))
    }

    /// Gram matrix <psi_a|psi_b> in index order.
    pub fn gram(&self) -> CMatrix {
        let n = self.states.len();
        CMatrix::from_fn(n, n, |a, b| self.states[a].iter().zip(&self.states[b]).map(|(x, y)| x.conj() * y).sum())
    }

    /// States stacked as rows (one row per Bell index).
    pub fn as_matrix(&self) -> CMatrix {
        let d = self.dims.total();
        CMatrix::from_fn(self.states.len(), d, |i, j| self.states[i][j])
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.gram().approx_eq(&CMatrix::identity(self.len()), tol)
    }

    pub fn completeness_deviation(&self) -> f64 {
        let d = self.dims.total();
        let mut sum = CMatrix::zeros(d, d);
        for s in &self.states {
            sum = &sum + &CMatrix::outer(s);
        }
        sum.max_abs_diff(&CMatrix::identity(d))
    }
}

/// Convenience wrapper matching the operation name used in reports.
pub fn build_bell_basis(dims: &Dims, convention: Convention) -> Result<BellBasis> {
    BellBasis::build(dims, convention)
}

pub fn bell_projector(basis: &BellBasis, idx: &[usize]) -> Result<CMatrix> {
    basis.projector(idx)
}

/// Product of local unitaries U_1 (x) ... (x) U_n applied as a tensor.
pub fn local_operator(ops: &[CMatrix]) -> CMatrix {
    let mut out = ops[0].clone();
    for op in &ops[1..] {
        out = kron(&out, op);
    }
    out
}

/// Product vector of local factors.
pub fn product_vector(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = kron_vec(&out, f);
    }
    out
}

/// Coefficient table q over Bell indices, exact rationals, nonnegative, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    entries: BTreeMap<BellIndex, Q>,
}

impl QTable {
    /// All indices of `basis` receive a coefficient; missing entries are zero.
    pub fn new(basis: &BellBasis, entries: BTreeMap<BellIndex, Q>) -> Result<Self> {
        for (k, v) in &entries {
            basis.position(k)?;
            if v.is_negative() {
                return Err(Error::Parameter(format!("negative coefficient at {k:?}")));
            }
        }
        let total: Q = entries.values().sum();
        if total != Q::from_integer(1.into()) {
            return Err(Error::Parameter(format!("coefficients sum to {total}, not 1")));
        }
        let mut full = BTreeMap::new();
        for idx in basis.indices() {
            full.insert(idx.clone(), entries.get(idx).cloned().unwrap_or_else(Q::zero));
        }
        Ok(QTable { entries: full })
    }

    /// Uniform coefficient on every index except those in `special`, which get the given values.
    pub fn with_rest_uniform(basis: &BellBasis, special: &[(BellIndex, Q)]) -> Result<Self> {
        let used: Q = special.iter().map(|(_, v)| v.clone()).sum();
        let rest = basis.len() - special.len();
        let each = (Q::from_integer(1.into()) - used) / Q::from_integer((rest as i64).into());
        let mut entries = BTreeMap::new();
        for idx in basis.indices() {
            entries.insert(idx.clone(), each.clone());
        }
        for (k, v) in special {
            entries.insert(k.clone(), v.clone());
        }
        Self::new(basis, entries)
    }

    pub fn get(&self, idx: &[usize]) -> Q {
        self.entries.get(idx).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BellIndex, &Q)> {
        self.entries.iter()
    }

    /// Values in basis index order as floats.
    pub fn as_f64(&self) -> Vec<f64> {
        self.entries.values().map(crate::rational::to_f64).collect()
    }

    /// Sum_k q_k |psi_k><psi_k|.
    pub fn operator(&self, basis: &BellBasis) -> CMatrix {
        let d = basis.dims().total();
        let mut m = CMatrix::zeros(d, d);
        for (state, q) in basis.states().iter().zip(self.as_f64()) {
            if q != 0.0 {
                m = &m + &CMatrix::outer(state).scale(q);
            }
        }
        m
    }
}

pub fn projectors_equal_up_to_phase(a: &[C64], b: &[C64]) -> bool {
    CMatrix::outer(a).approx_eq(&CMatrix::outer(b), TOL_EQ)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_shift_qubit_and_qutrit() {
        let (om, s) = build_omega_shift(2).unwrap();
        assert!(om.approx_eq(&CMatrix::diag(&[1.0, -1.0]), TOL_EQ));
        assert!(s.approx_eq(&CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(), TOL_EQ));
        let (om, s) = build_omega_shift(3).unwrap();
        assert!(mat_pow(&om, 3).approx_eq(&CMatrix::identity(3), TOL_EQ));
        assert!(mat_pow(&s, 3).approx_eq(&CMatrix::identity(3), TOL_EQ));
        assert!(build_omega_shift(1).is_err());
    }

    #[test]
    fn shift_direction() {
        let (_, s) = build_omega_shift(3).unwrap();
        let e0 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let out = s.apply(&e0).unwrap();
        assert_eq!(out[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn two_by_n_display_swaps_first_levels() {
        let (om, s) = two_by_n_display_operators(3).unwrap();
        assert!(om.approx_eq(&CMatrix::diag(&[1.0, -1.0, 1.0]), TOL_EQ));
        let expect = CMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(s.approx_eq(&expect, TOL_EQ));
    }

    #[test]
    fn bell_bases_are_orthonormal_and_complete() {
        for (dims, conv) in [
            (vec![2, 2], Convention::QubitPauli),
            (vec![2, 2, 2], Convention::QubitPauli),
            (vec![3, 3], Convention::GenericPhaseShift),
            (vec![2, 3], Convention::GenericPhaseShift),
            (vec![2, 4], Convention::TwoByN),
            (vec![2, 5], Convention::TwoByN),
        ] {
            let b = BellBasis::build(&Dims::new(dims.clone()).unwrap(), conv).unwrap();
            assert_eq!(b.len(), dims.iter().product::<usize>());
            assert!(b.is_orthonormal(TOL_EQ), "{dims:?} {conv:?}");
            assert!(b.completeness_deviation() < TOL_EQ, "{dims:?} {conv:?}");
        }
    }

    #[test]
    fn generic_qubits_coincide_with_pauli() {
        let dims = Dims::qubits(3);
        let g = BellBasis::build(&dims, Convention::GenericPhaseShift).unwrap();
        let p = BellBasis::build(&dims, Convention::QubitPauli).unwrap();
        for idx in g.indices() {
            assert!(projectors_equal_up_to_phase(g.state(idx).unwrap(), p.state(idx).unwrap()));
        }
    }

    #[test]
    fn projector_properties() {
        let b = BellBasis::build(&Dims::new(vec![3, 3]).unwrap(), Convention::GenericPhaseShift).unwrap();
        let p = b.projector(&[0, 0]).unwrap();
        assert!((p.trace().re - 1.0).abs() < TOL_EQ);
        assert!((&p * &p).approx_eq(&p, TOL_EQ));
        assert!((p[(0, 0)].re - 1.0 / 3.0).abs() < TOL_EQ);
        assert!(b.projector(&[3, 0]).is_err());
    }

    #[test]
    fn convention_mismatch_rejected() {
        assert!(BellBasis::build(&Dims::new(vec![3, 3]).unwrap(), Convention::QubitPauli).is_err());
        assert!(BellBasis::build(&Dims::new(vec![3, 3]).unwrap(), Convention::TwoByN).is_err());
    }

    #[test]
    fn qtable_normalization() {
        let b = BellBasis::build(&Dims::qubits(2), Convention::QubitPauli).unwrap();
        let q = QTable::with_rest_uniform(&b, &[(vec![0, 0], Q::zero())]).unwrap();
        assert_eq!(q.get(&[1, 1]), crate::rational::q(1, 3));
        let mut bad = BTreeMap::new();
        bad.insert(vec![0, 0], crate::rational::q(1, 2));
        assert!(QTable::new(&b, bad).is_err());
    }
}
