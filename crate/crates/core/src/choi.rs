//! Choi maps phi(a,b,c) on 3x3 matrices, their Jamiolkowski witnesses and the
//! associated linear program.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::bell::{BellBasis, QTable};
use crate::error::{Error, Result};
use crate::lp::{simplex_solve, LinearProgram, LpStatus, Relation, Sense};
use crate::product::OracleSettings;
use crate::rational::{fmt_q, nearest_rational, q, qi, to_f64, Q};
use crate::region::{choi_groups, max_violation_full, three_three_basis, Halfspace};
use crate::tensor::{eig_hermitian, CMatrix};
use crate::witness::{assemble, r_critical, WitnessSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiParams {
    pub a: Q,
    pub b: Q,
    pub c: Q,
}

impl ChoiParams {
    pub fn new(a: Q, b: Q, c: Q) -> Self {
        ChoiParams { a, b, c }
    }

    pub fn ints(a: i64, b: i64, c: i64) -> Self {
        ChoiParams { a: qi(a), b: qi(b), c: qi(c) }
    }

    /// K = 8 - 2a + b + c.
    pub fn k(&self) -> Q {
        qi(8) - qi(2) * &self.a + &self.b + &self.c
    }

    pub fn ordered(&self) -> bool {
        self.a >= self.b && self.b >= self.c
    }
}

impl std::fmt::Display for ChoiParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(a={}, b={}, c={})", fmt_q(&self.a), fmt_q(&self.b), fmt_q(&self.c))
    }
}

pub fn choi_apply(p: &ChoiParams, rho: &CMatrix) -> Result<CMatrix> {
    if rho.rows() != 3 || rho.cols() != 3 {
        return Err(Error::Dimension(format!("Choi map acts on 3x3 matrices, got {}x{}", rho.rows(), rho.cols())));
    }
    let (a, b, c) = (to_f64(&p.a), to_f64(&p.b), to_f64(&p.c));
    let d = |i: usize| rho[(i, i)];
    let diag = [a * d(0) + b * d(1) + c * d(2), a * d(1) + b * d(2) + c * d(0), a * d(2) + b * d(0) + c * d(1)];
    let mut out = CMatrix::zeros(3, 3);
    for (i, v) in diag.iter().enumerate() {
        out[(i, i)] = *v;
    }
    Ok(&out - rho)
}

/// (I (x) phi) applied to |psi_00><psi_00|, normalized to unit trace.
pub fn jamiolkowski(p: &ChoiParams) -> Result<CMatrix> {
    let basis = three_three_basis()?;
    let psi = basis.state(&[0, 0])?.to_vec();
    let rho = CMatrix::outer(&psi);
    let mut out = CMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            let mut block = CMatrix::zeros(3, 3);
            for k in 0..3 {
                for l in 0..3 {
                    block[(k, l)] = rho[(3 * i + k, 3 * j + l)];
                }
            }
            let img = choi_apply(p, &block)?;
            for k in 0..3 {
                for l in 0..3 {
                    out[(3 * i + k, 3 * j + l)] = img[(k, l)];
                }
            }
        }
    }
    let t = out.trace().re;
    if t.abs() < 1e-15 {
        return Err(Error::Parameter(format!("{p}: zero-trace Jamiolkowski image")));
    }
    Ok(out.scale(1.0 / t))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiWindow {
    /// a >= 1, a+b+c >= 3, 1 <= a <= 3.
    pub stated: bool,
    /// Additionally bc >= (2-a)^2 when a <= 2.
    pub with_product_condition: bool,
    /// r/9 + (1-r)(c+3-a)/(3K) < 0.
    pub stated_negative_eigenvalue: bool,
    pub min_eigenvalue: f64,
}

impl ChoiWindow {
    pub fn negative_eigenvalue(&self) -> bool {
        self.min_eigenvalue < -1e-12
    }
}

/// r = -3(3-a)/(a+b+c-1).
pub fn choi_r(p: &ChoiParams) -> Result<Q> {
    let den = &p.a + &p.b + &p.c - Q::one();
    if den.is_zero() {
        return Err(Error::Parameter(format!("{p}: a+b+c = 1")));
    }
    Ok(-(qi(3) * (qi(3) - &p.a)) / den)
}

pub fn choi_positivity_window(p: &ChoiParams) -> Result<ChoiWindow> {
    let one = Q::one();
    let stated = p.a >= one && &p.a + &p.b + &p.c >= qi(3) && p.a <= qi(3);
    let two_minus_a = qi(2) - &p.a;
    let product = p.a >= qi(2) || &p.b * &p.c >= &two_minus_a * &two_minus_a;
    let with_product_condition = stated && product;
    let k = p.k();
    let stated_negative_eigenvalue = if (&p.a + &p.b + &p.c - &one).is_zero() || k.is_zero() {
        false
    } else {
        let r = choi_r(p)?;
        let v = &r / qi(9) + (&one - &r) * (&p.c + qi(3) - &p.a) / (qi(3) * &k);
        v < Q::zero()
    };
    let min_eigenvalue = eig_hermitian(&choi_matrix_formula(p)?)?.min();
    Ok(ChoiWindow { stated, with_product_condition, stated_negative_eigenvalue, min_eigenvalue })
}

/// (a sum_k P_k0 + b sum_k P_k2 + c sum_k P_k1 - 3 P_00) / (3(a+b+c-1)).
pub fn choi_matrix_formula(p: &ChoiParams) -> Result<CMatrix> {
    let basis = three_three_basis()?;
    let n = to_f64(&(&p.a + &p.b + &p.c - Q::one())) * 3.0;
    if n == 0.0 {
        return Err(Error::Parameter(format!("{p}: a+b+c = 1")));
    }
    let mut m = CMatrix::zeros(9, 9);
    for k in 0..3 {
        m = &m + &basis.projector(&[k, 0])?.scale(to_f64(&p.a));
        m = &m + &basis.projector(&[k, 2])?.scale(to_f64(&p.b));
        m = &m + &basis.projector(&[k, 1])?.scale(to_f64(&p.c));
    }
    m = &m - &basis.projector(&[0, 0])?.scale(3.0);
    Ok(m.scale(1.0 / n))
}

/// q_10 = q_20 = 1/K, q_k2 = (b+3-a)/(3K), q_k1 = (c+3-a)/(3K), q_00 = 0.
pub fn choi_q(p: &ChoiParams, basis: &BellBasis) -> Result<QTable> {
    let k = p.k();
    if k.is_zero() {
        return Err(Error::Parameter(format!("{p}: 8-2a+b+c = 0")));
    }
    let mut e = BTreeMap::new();
    e.insert(vec![0, 0], Q::zero());
    for j in 1..3 {
        e.insert(vec![j, 0], Q::one() / &k);
    }
    for j in 0..3 {
        e.insert(vec![j, 2], (&p.b + qi(3) - &p.a) / (qi(3) * &k));
        e.insert(vec![j, 1], (&p.c + qi(3) - &p.a) / (qi(3) * &k));
    }
    QTable::new(basis, e)
}

/// Witness assembled from the extracted q-table and r; requires the window.
pub fn choi_witness(p: &ChoiParams) -> Result<CMatrix> {
    let w = choi_positivity_window(p)?;
    if !w.stated {
        return Err(Error::Parameter(format!("{p} outside the positivity window")));
    }
    let basis = three_three_basis()?;
    let qt = choi_q(p, &basis)?;
    Ok(assemble(&WitnessSpec::new(basis, qt, choi_r(p)?)?))
}

/// The Choi halfspaces over (P1, P2, P3) with plane offset 2 + delta.
pub fn choi_lp_program(p: &ChoiParams, delta: &Q) -> Result<LinearProgram> {
    let k = p.k();
    if k.is_zero() {
        return Err(Error::Parameter(format!("{p}: 8-2a+b+c = 0")));
    }
    let obj = vec![Q::one() / &k, (&p.b + qi(3) - &p.a) / (qi(3) * &k), (&p.c + qi(3) - &p.a) / (qi(3) * &k)];
    let mut lp = LinearProgram::new(Sense::Min, obj);
    let top = qi(2) + delta;
    lp.push(vec![qi(3), qi(1), qi(2)], Relation::Le, top.clone());
    lp.push(vec![qi(3), qi(2), qi(1)], Relation::Le, top);
    lp.push(vec![qi(1); 3], Relation::Le, Q::one());
    lp.push(vec![qi(1); 3], Relation::Ge, q(2, 3));
    lp.push(vec![qi(1), qi(0), qi(0)], Relation::Le, q(2, 3));
    lp.push(vec![qi(0), qi(1), qi(0)], Relation::Le, Q::one());
    lp.push(vec![qi(0), qi(0), qi(1)], Relation::Le, Q::one());
    Ok(lp)
}

/// Maximum violation of 3 P1 + P2 + 2 P3 <= 2 over product states.
pub fn choi_delta(settings: &OracleSettings) -> Result<f64> {
    let basis = three_three_basis()?;
    let h = Halfspace::le(&[3, 1, 2], qi(2));
    Ok(max_violation_full(&basis, &choi_groups(), &h, settings)?.0)
}

/// Delta as a rational just above the numeric violation.
pub fn delta_rational(delta: f64) -> Result<Q> {
    nearest_rational(delta.max(0.0) + 1e-9, 1_000_000)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiLp {
    pub c_min: Q,
    pub r_c: Q,
    pub lp_value: Q,
    pub lp_value_half_delta: Q,
    pub vertex: Vec<Q>,
    pub delta: Q,
}

/// C_min = (6 + 2(c-a))/(9K), r_c = (-6 + 2(a-c))/(2 + b - c).
pub fn choi_closed_form(p: &ChoiParams) -> Result<(Q, Q)> {
    let k = p.k();
    let den = qi(2) + &p.b - &p.c;
    if k.is_zero() || den.is_zero() {
        return Err(Error::Parameter(format!("{p}: degenerate closed form")));
    }
    let c_min = (qi(6) + qi(2) * (&p.c - &p.a)) / (qi(9) * k);
    let r_c = (qi(-6) + qi(2) * (&p.a - &p.c)) / den;
    Ok((c_min, r_c))
}

pub fn choi_lp(p: &ChoiParams, delta: &Q) -> Result<ChoiLp> {
    if !p.ordered() {
        return Err(Error::Parameter(format!("{p}: requires a >= b >= c")));
    }
    let (c_min, r_c) = choi_closed_form(p)?;
    let solve = |d: &Q| -> Result<(Q, Vec<Q>)> {
        let s = simplex_solve(&choi_lp_program(p, d)?)?;
        if s.status != LpStatus::Optimal {
            return Err(Error::Parameter(format!("{p}: Choi LP is {:?}", s.status)));
        }
        Ok((s.value, s.vertex))
    };
    let (lp_value, vertex) = solve(delta)?;
    let (lp_value_half_delta, _) = solve(&(delta / qi(2)))?;
    Ok(ChoiLp { c_min, r_c, lp_value, lp_value_half_delta, vertex, delta: delta.clone() })
}

/// r_c from the scaled LP value, for comparison with the closed form.
pub fn choi_r_from_lp(value: &Q) -> Result<Option<Q>> {
    r_critical(&(qi(9) * value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{C64, TOL_EQ};
    use crate::witness::reduction_witness;

    #[test]
    fn apply_examples() {
        let id = CMatrix::identity(3);
        assert!(choi_apply(&ChoiParams::ints(2, 0, 1), &id).unwrap().approx_eq(&id.scale(2.0), TOL_EQ));
        let p = ChoiParams::ints(2, 1, 0);
        let mut e0 = CMatrix::zeros(3, 3);
        e0[(0, 0)] = C64::new(1.0, 0.0);
        let expect = &CMatrix::diag(&[2.0, 0.0, 1.0]) - &e0;
        assert!(choi_apply(&p, &e0).unwrap().approx_eq(&expect, TOL_EQ));
        assert!(choi_apply(&p, &CMatrix::identity(2)).is_err());
    }

    #[test]
    fn reduction_case() {
        let p = ChoiParams::ints(1, 1, 1);
        let w = choi_witness(&p).unwrap();
        assert!(w.approx_eq(&reduction_witness(3).unwrap(), TOL_EQ));
        assert!(jamiolkowski(&p).unwrap().approx_eq(&w, TOL_EQ));
        assert_eq!(choi_closed_form(&p).unwrap().1, qi(-3));
    }

    #[test]
    fn two_one_zero() {
        let p = ChoiParams::ints(2, 1, 0);
        assert_eq!(choi_r(&p).unwrap(), q(-3, 2));
        let (c, r) = choi_closed_form(&p).unwrap();
        assert_eq!((c, r), (q(2, 45), q(-2, 3)));
        let w = choi_witness(&p).unwrap();
        assert!(w.approx_eq(&choi_matrix_formula(&p).unwrap(), TOL_EQ));
        assert!(w.approx_eq(&jamiolkowski(&p).unwrap(), TOL_EQ));
        let lp = choi_lp(&p, &q(1, 3)).unwrap();
        assert_eq!(lp.lp_value, lp.c_min);
        assert_eq!(lp.lp_value_half_delta, lp.c_min);
    }

    #[test]
    fn window_flags() {
        assert!(!choi_positivity_window(&ChoiParams::new(q(1, 2), qi(2), qi(1))).unwrap().stated);
        let w = choi_positivity_window(&ChoiParams::ints(1, 1, 1)).unwrap();
        assert!(w.stated && w.negative_eigenvalue());
        // The stated expression reduces to c / (3(a+b+c-1)).
        assert!(!w.stated_negative_eigenvalue);
        assert!(choi_positivity_window(&ChoiParams::new(qi(2), qi(2), q(-1, 2))).unwrap().stated_negative_eigenvalue);
        let w = choi_positivity_window(&ChoiParams::ints(3, 0, 0)).unwrap();
        assert!(w.stated && !w.negative_eigenvalue());
        let w = choi_positivity_window(&ChoiParams::new(q(3, 2), q(3, 2), qi(0))).unwrap();
        assert!(w.stated && !w.with_product_condition);
    }
}
