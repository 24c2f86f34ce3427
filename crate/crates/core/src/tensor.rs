//! Dense complex matrices: Kronecker products, partial transpose,
//! Hermitian eigendecomposition and the `.cmat` text format.

use std::fmt::Write as _;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Structural equality tolerance.
pub const TOL_EQ: f64 = 1e-12;
/// Spectral tolerance for eigen-decompositions.
pub const TOL_SPEC: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Rank-one operator |v><v|.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// <v|M|v> for a column vector v.
    pub fn quadratic_form(&self, v: &[C64]) -> Result<C64> {
        let mv = self.apply(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("shape mismatch")
    }
}

/// Ordered local dimensions of a multipartite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Dimension("empty dims profile".into()));
        }
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::Dimension(format!("every factor must be >= 2, got {factors:?}")));
        }
        if factors.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Dimension(format!("factors must be nondecreasing, got {factors:?}")));
        }
        Ok(Dims(factors))
    }

    pub fn qubits(n: usize) -> Self {
        Dims(vec![2; n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn split_index(mut idx: usize, dims: &[usize], digits: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        digits[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Transpose on tensor factor `factor` only.
pub fn partial_transpose(m: &CMatrix, dims: &Dims, factor: usize) -> Result<CMatrix> {
    let n = dims.total();
    if !m.is_square() || m.rows() != n {
        return Err(Error::Dimension(format!(
            "matrix {}x{} does not match dims {:?}",
            m.rows(),
            m.cols(),
            dims.factors()
        )));
    }
    if factor >= dims.arity() {
        return Err(Error::Dimension(format!("factor index {factor} out of range")));
    }
    let f = dims.factors();
    let mut out = CMatrix::zeros(n, n);
    let mut ri = vec![0; f.len()];
    let mut ci = vec![0; f.len()];
    for i in 0..n {
        split_index(i, f, &mut ri);
        for j in 0..n {
            split_index(j, f, &mut ci);
            std::mem::swap(&mut ri[factor], &mut ci[factor]);
            let (ti, tj) = (join_index(&ri, f), join_index(&ci, f));
            std::mem::swap(&mut ri[factor], &mut ci[factor]);
            out[(ti, tj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Tr(AB) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if !a.is_square() || a.rows() != b.cols() || a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "trace_product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut s = C64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj()).sum()
        })
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian(m: &CMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    let dev = m.hermitian_deviation();
    let scale = m.data().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if dev > TOL_EQ * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let total: f64 = a.data().iter().map(|z| z.norm_sqr()).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= 1e-32 * total.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let e = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // J = diag(1, conj(e)) * [[c, s], [-s, c]] (on the p, q plane).
                let jpp = C64::new(cs, 0.0);
                let jpq = C64::new(sn, 0.0);
                let jqp = -e.conj() * sn;
                let jqq = e.conj() * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigen { values, vectors })
}

pub fn write_cmat(m: &CMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", m.rows(), m.cols());
    for z in m.data() {
        let _ = writeln!(s, "{:.16e} {:.16e}", z.re, z.im);
    }
    s
}

pub fn parse_cmat(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty .cmat input".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header '{header}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let mut data = Vec::with_capacity(dims[0] * dims[1]);
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("bad entry line '{line}'")));
        }
        let re: f64 = parts[0].parse().map_err(|_| Error::Parse(format!("bad number '{}'", parts[0])))?;
        let im: f64 = parts[1].parse().map_err(|_| Error::Parse(format!("bad number '{}'", parts[1])))?;
        data.push(C64::new(re, im));
    }
    CMatrix::from_vec(dims[0], dims[1], data).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> CMatrix {
        CMatrix::diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_identity_and_scalar() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let two = CMatrix::from_real(1, 1, &[2.0]).unwrap();
        let m = CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(kron(&two, &m), m.scale(2.0));
    }

    #[test]
    fn kron_pauli_maps_bell_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi00 = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let out = kron(&pauli_z(), &pauli_x()).apply(&psi00).unwrap();
        // (|01> - |10>)/sqrt2
        let expect = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        for (a, b) in out.iter().zip(expect) {
            assert!((a - b).norm() < TOL_EQ);
        }
    }

    #[test]
    fn partial_transpose_product_case() {
        let a = CMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 3.0), c(0.5, 0.0)]).unwrap();
        let b = CMatrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64, i as f64 - j as f64));
        let dims = Dims::new(vec![2, 3]).unwrap();
        let pt = partial_transpose(&kron(&a, &b), &dims, 0).unwrap();
        assert_eq!(pt, kron(&a.transpose(), &b));
        let pt1 = partial_transpose(&kron(&a, &b), &dims, 1).unwrap();
        assert_eq!(pt1, kron(&a, &b.transpose()));
    }

    #[test]
    fn partial_transpose_rejects_bad_shapes() {
        let dims = Dims::new(vec![2, 2]).unwrap();
        assert!(partial_transpose(&CMatrix::identity(3), &dims, 0).is_err());
        assert!(partial_transpose(&CMatrix::identity(4), &dims, 2).is_err());
    }

    #[test]
    fn eig_simple_cases() {
        let e = eig_hermitian(&CMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = eig_hermitian(&CMatrix::diag(&[2.0, -1.0, 0.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.0, 2.0]);
        let y = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let e = eig_hermitian(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < TOL_SPEC && (e.values[1] - 1.0).abs() < TOL_SPEC);
        assert!(e.reconstruct().approx_eq(&y, 1e-12));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trace_product_examples() {
        let rho = CMatrix::diag(&[0.25, 0.25, 0.5]);
        assert!((trace_product(&CMatrix::identity(3), &rho).unwrap() - c(1.0, 0.0)).norm() < TOL_EQ);
        let a = CMatrix::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| c(j as f64 - 2.0, i as f64 * 0.5));
        let direct = (&a * &b).trace();
        assert!((trace_product(&a, &b).unwrap() - direct).norm() < 1e-12);
        assert!(trace_product(&a, &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn cmat_roundtrip_exact() {
        let m = CMatrix::from_fn(3, 2, |i, j| c(1.0 / (i as f64 + 3.0), -std::f64::consts::PI * j as f64));
        let back = parse_cmat(&write_cmat(&m)).unwrap();
        assert_eq!(back, m);
        assert!(parse_cmat("2 2\n1 0\n").is_err());
        assert!(parse_cmat("").is_err());
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(vec![2, 3]).is_ok());
        assert!(Dims::new(vec![3, 2]).is_err());
        assert!(Dims::new(vec![1, 2]).is_err());
        assert_eq!(Dims::qubits(3).total(), 8);
    }
}
