//! Witness assembly `W = r I/D + (1-r) sum q |psi><psi|`, critical parameters,
//! and the named one-parameter families.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::bell::{BellBasis, BellIndex, Convention, QTable};
use crate::error::{Error, Result};
use crate::product::ProductState;
use crate::rational::{fmt_q, pow2, q, qi, to_f64, Q};
use crate::tensor::{CMatrix, Dims};

/// Lower end of the 3 (x) 3 window where C_min = 1/12.
pub fn window_lo() -> Q {
    q(67, 756)
}

/// Upper end of the 3 (x) 3 window where C_min = 1/12.
pub fn window_hi() -> Q {
    q(61, 378)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSpec {
    pub basis: BellBasis,
    pub q: QTable,
    pub r: Q,
}

impl WitnessSpec {
    pub fn new(basis: BellBasis, q: QTable, r: Q) -> Result<Self> {
        if r.is_positive() {
            return Err(Error::Parameter(format!("r must be <= 0, got {}", fmt_q(&r))));
        }
        Ok(WitnessSpec { basis, q, r })
    }
}

/// r I/D + (1-r) sum_k q_k |psi_k><psi_k|.
pub fn assemble(spec: &WitnessSpec) -> CMatrix {
    assemble_raw(&spec.basis, &spec.q, &spec.r)
}

fn assemble_raw(basis: &BellBasis, qt: &QTable, r: &Q) -> CMatrix {
    let d = basis.dims().total();
    let rf = to_f64(r);
    let id = CMatrix::identity(d).scale(rf / d as f64);
    &id + &qt.operator(basis).scale(1.0 - rf)
}

/// r_c = -C/(1-C) for the scaled minimum C = D * sum q P. `None` when C >= 1
/// (no constraint on r).
pub fn r_critical(c_scaled: &Q) -> Result<Option<Q>> {
    if c_scaled.is_negative() {
        return Err(Error::Parameter(format!("C must be nonnegative, got {}", fmt_q(c_scaled))));
    }
    if c_scaled >= &Q::one() {
        return Ok(None);
    }
    Ok(Some(-c_scaled / (Q::one() - c_scaled)))
}

/// <gamma|W|gamma>.
pub fn expectation(w: &CMatrix, gamma: &ProductState) -> Result<f64> {
    let v = gamma.vector();
    if v.len() != w.rows() {
        return Err(Error::Dimension(format!("state of length {} for a {}x{} witness", v.len(), w.rows(), w.cols())));
    }
    Ok(w.quadratic_form(&v)?.re)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// n qubits, q_{0..0}=0, q_{10..0}=x, rest equal.
    MultiQubitA { n: usize, x: Q },
    /// n qubits, q_{0..0}=0, q_{0..01}=x, rest equal.
    MultiQubitB { n: usize, x: Q },
    /// 2 (x) N, q_{00}=0, q_{10}=x (modulated), rest equal.
    TwoByNA { n: usize, x: Q },
    /// 2 (x) N, q_{00}=0, q_{01}=x (shifted), rest equal.
    TwoByNB { n: usize, x: Q },
    /// 3 (x) 3, q_{00}=0, q_{10}=x, q_{20}=1/4-x, rest 1/8.
    ThreeThreeX { x: Q },
    /// 3 (x) 3, q_{00}=0, q_{10}=x, q_{01}=1/4-x, rest 1/8.
    ThreeThreeXPrime { x: Q },
    /// Reduction witness (I - d |psi_0><psi_0|)/(D - d) on qubits or d (x) d.
    Reduction { dims: Vec<usize> },
    /// Lambda W_c(x) + (1-Lambda) W_red on 3 (x) 3.
    Lambda { x: Q, lambda: Q },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::MultiQubitA { n, x } => write!(f, "multiqubit-a(n={n}, x={})", fmt_q(x)),
            Family::MultiQubitB { n, x } => write!(f, "multiqubit-b(n={n}, x={})", fmt_q(x)),
            Family::TwoByNA { n, x } => write!(f, "two-by-n-a(N={n}, x={})", fmt_q(x)),
            Family::TwoByNB { n, x } => write!(f, "two-by-n-b(N={n}, x={})", fmt_q(x)),
            Family::ThreeThreeX { x } => write!(f, "three-three-x(x={})", fmt_q(x)),
            Family::ThreeThreeXPrime { x } => write!(f, "three-three-x-prime(x={})", fmt_q(x)),
            Family::Reduction { dims } => write!(f, "reduction(dims={dims:?})"),
            Family::Lambda { x, lambda } => write!(f, "lambda(x={}, Lambda={})", fmt_q(x), fmt_q(lambda)),
        }
    }
}

/// Linear model of C(gamma) in a few coordinates: each coordinate is the sum of
/// P over a group of indices, all other indices share the coefficient `rest`.
/// C = rest + sum_i (weights_i - rest) * coord_i.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateModel {
    pub groups: Vec<Vec<BellIndex>>,
    pub weights: Vec<Q>,
    pub rest: Q,
}

impl CoordinateModel {
    pub fn constant(&self) -> Q {
        self.rest.clone()
    }

    pub fn coefficients(&self) -> Vec<Q> {
        self.weights.iter().map(|w| w - &self.rest).collect()
    }

    pub fn value(&self, coords: &[Q]) -> Q {
        self.constant() + self.coefficients().iter().zip(coords).map(|(a, b)| a * b).sum::<Q>()
    }

    pub fn value_f64(&self, coords: &[f64]) -> f64 {
        to_f64(&self.constant()) + self.coefficients().iter().zip(coords).map(|(a, b)| to_f64(a) * b).sum::<f64>()
    }

    /// Coordinates of a Bell distribution.
    pub fn coords(&self, basis: &BellBasis, dist: &crate::product::Distribution) -> Result<Vec<f64>> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|idx| dist.at(basis, idx)).sum::<Result<f64>>())
            .collect()
    }
}

fn unit(n: usize, pos: usize) -> BellIndex {
    let mut v = vec![0; n];
    v[pos] = 1;
    v
}

fn in_range(x: &Q, lo: &Q, hi: &Q, what: &str) -> Result<()> {
    if x < lo || x > hi {
        return Err(Error::Parameter(format!("{what}: x={} outside [{}, {}]", fmt_q(x), fmt_q(lo), fmt_q(hi))));
    }
    Ok(())
}

impl Family {
    pub fn parse_name(name: &str) -> Result<&'static str> {
        Ok(match name {
            "multiqubit-a" | "multi-qubit-a" => "multiqubit-a",
            "multiqubit-b" | "multi-qubit-b" => "multiqubit-b",
            "two-by-n-a" | "2xn-a" => "two-by-n-a",
            "two-by-n-b" | "2xn-b" => "two-by-n-b",
            "three-three-x" | "3x3-x" => "three-three-x",
            "three-three-x-prime" | "3x3-x-prime" => "three-three-x-prime",
            "reduction" => "reduction",
            "lambda" => "lambda",
            other => return Err(Error::Parameter(format!("unknown family '{other}'"))),
        })
    }

    pub fn dims(&self) -> Dims {
        match self {
            Family::MultiQubitA { n, .. } | Family::MultiQubitB { n, .. } => Dims::qubits(*n),
            Family::TwoByNA { n, .. } | Family::TwoByNB { n, .. } => Dims::new(vec![2, *n]).expect("validated N"),
            Family::ThreeThreeX { .. } | Family::ThreeThreeXPrime { .. } | Family::Lambda { .. } => {
                Dims::new(vec![3, 3]).expect("valid dims")
            }
            Family::Reduction { dims } => Dims::new(dims.clone()).expect("validated dims"),
        }
    }

    pub fn convention(&self) -> Convention {
        match self {
            Family::MultiQubitA { .. } | Family::MultiQubitB { .. } => Convention::QubitPauli,
            Family::TwoByNA { .. } | Family::TwoByNB { .. } => Convention::TwoByN,
            Family::Reduction { dims } if dims.iter().all(|&d| d == 2) => Convention::QubitPauli,
            _ => Convention::GenericPhaseShift,
        }
    }

    /// Checks parameter ranges. The B families are restricted to x >= 1/(D-1),
    /// where the box bound P <= 1/2 alone fixes the minimum.
    pub fn validate(&self) -> Result<()> {
        let zero = Q::zero();
        let one = Q::one();
        match self {
            Family::MultiQubitA { n, x } => {
                if *n < 2 {
                    return Err(Error::Parameter(format!("n must be >= 2, got {n}")));
                }
                in_range(x, &zero, &one, "multiqubit-a")
            }
            Family::MultiQubitB { n, x } => {
                if *n < 2 {
                    return Err(Error::Parameter(format!("n must be >= 2, got {n}")));
                }
                in_range(x, &(one.clone() / (pow2(*n as u32) - &one)), &one, "multiqubit-b")
            }
            Family::TwoByNA { n, x } => {
                if *n < 2 {
                    return Err(Error::Parameter(format!("N must be >= 2, got {n}")));
                }
                in_range(x, &zero, &one, "two-by-n-a")
            }
            Family::TwoByNB { n, x } => {
                if *n < 2 {
                    return Err(Error::Parameter(format!("N must be >= 2, got {n}")));
                }
                in_range(x, &q(1, 2 * *n as i64 - 1), &one, "two-by-n-b")
            }
            Family::ThreeThreeX { x } | Family::ThreeThreeXPrime { x } => in_range(x, &zero, &q(1, 4), "3x3"),
            Family::Lambda { x, lambda } => {
                in_range(x, &window_lo(), &window_hi(), "lambda family")?;
                if lambda.is_negative() || lambda > &one {
                    return Err(Error::Parameter(format!("Lambda={} outside [0, 1]", fmt_q(lambda))));
                }
                Ok(())
            }
            Family::Reduction { dims } => {
                let d = Dims::new(dims.clone())?;
                let f = d.factors();
                let qubits = f.len() >= 2 && f.iter().all(|&k| k == 2);
                let square = f.len() == 2 && f[0] == f[1];
                if !(qubits || square) {
                    return Err(Error::Parameter(format!("reduction witness needs qubits or d x d, got {f:?}")));
                }
                Ok(())
            }
        }
    }

    pub fn basis(&self) -> Result<BellBasis> {
        self.validate()?;
        BellBasis::build(&self.dims(), self.convention())
    }

    pub fn model(&self) -> Result<CoordinateModel> {
        self.validate()?;
        let one = Q::one();
        let m = match self {
            Family::MultiQubitA { n, x } => CoordinateModel {
                groups: vec![vec![vec![0; *n]], vec![unit(*n, 0)]],
                weights: vec![Q::zero(), x.clone()],
                rest: (&one - x) / (pow2(*n as u32) - qi(2)),
            },
            Family::MultiQubitB { n, x } => CoordinateModel {
                groups: vec![vec![vec![0; *n]], vec![unit(*n, *n - 1)]],
                weights: vec![Q::zero(), x.clone()],
                rest: (&one - x) / (pow2(*n as u32) - qi(2)),
            },
            Family::TwoByNA { n, x } => CoordinateModel {
                groups: vec![vec![vec![0, 0]], vec![vec![1, 0]]],
                weights: vec![Q::zero(), x.clone()],
                rest: (&one - x) / qi(2 * *n as i64 - 2),
            },
            Family::TwoByNB { n, x } => CoordinateModel {
                groups: vec![vec![vec![0, 0]], vec![vec![0, 1]]],
                weights: vec![Q::zero(), x.clone()],
                rest: (&one - x) / qi(2 * *n as i64 - 2),
            },
            Family::ThreeThreeX { x } => CoordinateModel {
                groups: vec![vec![vec![0, 0]], vec![vec![1, 0]], vec![vec![2, 0]]],
                weights: vec![Q::zero(), x.clone(), q(1, 4) - x],
                rest: q(1, 8),
            },
            Family::ThreeThreeXPrime { x } => CoordinateModel {
                groups: vec![vec![vec![0, 0]], vec![vec![1, 0]], vec![vec![0, 1]]],
                weights: vec![Q::zero(), x.clone(), q(1, 4) - x],
                rest: q(1, 8),
            },
            Family::Reduction { dims } => {
                let total: usize = dims.iter().product();
                CoordinateModel {
                    groups: vec![vec![vec![0; dims.len()]]],
                    weights: vec![Q::zero()],
                    rest: one / qi(total as i64 - 1),
                }
            }
            Family::Lambda { x, lambda } => {
                let red = q(1, 8);
                let l1 = &one - lambda;
                CoordinateModel {
                    groups: vec![vec![vec![0, 0]], vec![vec![1, 0]], vec![vec![2, 0]]],
                    weights: vec![Q::zero(), lambda * x + &l1 * &red, lambda * (q(1, 4) - x) + &l1 * &red],
                    rest: red,
                }
            }
        };
        Ok(m)
    }

    pub fn qtable(&self, basis: &BellBasis) -> Result<QTable> {
        let m = self.model()?;
        let mut entries = std::collections::BTreeMap::new();
        for idx in basis.indices() {
            entries.insert(idx.clone(), m.rest.clone());
        }
        for (g, w) in m.groups.iter().zip(&m.weights) {
            for idx in g {
                entries.insert(idx.clone(), w.clone());
            }
        }
        QTable::new(basis, entries)
    }

    /// Exact unscaled C_min where a closed form holds; `None` when the LP decides.
    pub fn closed_form_c_min(&self) -> Result<Option<Q>> {
        self.validate()?;
        let one = Q::one();
        Ok(match self {
            Family::MultiQubitA { n, x } => {
                let half = pow2(*n as u32 - 1);
                if x <= &(one.clone() / (&half + &one)) {
                    Some(x / qi(2))
                } else {
                    Some((&one - x) / pow2(*n as u32))
                }
            }
            Family::MultiQubitB { n, x } => Some((&one - x) / (qi(4) * (pow2(*n as u32 - 1) - &one))),
            Family::TwoByNA { n, x } => {
                if x <= &q(1, 2 * *n as i64 - 1) {
                    Some(x / qi(2))
                } else {
                    Some((&one - x) / qi(4 * (*n as i64 - 1)))
                }
            }
            Family::TwoByNB { n, x } => Some((&one - x) / qi(4 * (*n as i64 - 1))),
            Family::ThreeThreeX { x } => {
                if x >= &window_lo() && x <= &window_hi() {
                    Some(q(1, 12))
                } else {
                    None
                }
            }
            Family::ThreeThreeXPrime { x } => {
                let k = qi(8) * x - &one;
                if x >= &q(1, 8) {
                    Some((qi(2) - k) / qi(24))
                } else {
                    Some((qi(2) + k) / qi(24))
                }
            }
            Family::Reduction { dims } => {
                let d = qi(dims[0] as i64);
                let total = qi(dims.iter().product::<usize>() as i64);
                Some((&d - &one) / (&d * (total - &one)))
            }
            Family::Lambda { .. } => Some(q(1, 12)),
        })
    }

    /// The reference closed form of the critical parameter for each family.
    pub fn reference_r_c(&self) -> Result<Option<Q>> {
        self.validate()?;
        let one = Q::one();
        Ok(match self {
            Family::MultiQubitA { n, x } => {
                let half = pow2(*n as u32 - 1);
                if x <= &(one.clone() / (&half + &one)) {
                    Some(-(&half * x) / (&one - &half * x))
                } else {
                    Some(-(&one - x) / x)
                }
            }
            Family::MultiQubitB { n, x } => {
                let dd = pow2(*n as u32);
                let half = pow2(*n as u32 - 1);
                Some(-(&dd * (&one - x)) / (qi(2) * (half * (x + &one) - qi(2))))
            }
            Family::TwoByNA { n, x } => {
                let nn = qi(*n as i64);
                if x <= &q(1, *n as i64 + 1) {
                    Some(-(&nn * x) / (&one - &nn * x))
                } else {
                    Some(-(&one - x) / x)
                }
            }
            Family::TwoByNB { n, x } => {
                let nn = qi(*n as i64);
                Some(-(qi(2) * &nn * (&one - x)) / (qi(2) * (&nn * (x + &one) - qi(2))))
            }
            Family::ThreeThreeX { x } => {
                if x >= &window_lo() && x <= &window_hi() {
                    Some(qi(-3))
                } else {
                    None
                }
            }
            Family::ThreeThreeXPrime { x } => {
                let den = qi(24) * x - &one;
                if den.is_zero() {
                    None
                } else {
                    Some((qi(24) * x - qi(3)) / den)
                }
            }
            Family::Reduction { .. } | Family::Lambda { .. } => None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct FamilyWitness {
    pub spec: WitnessSpec,
    pub matrix: CMatrix,
    /// Unscaled minimum of sum q P over the family's LP region.
    pub c_min: Q,
    pub r_c: Q,
}

/// Builds the critical witness of a family. C_min comes from the closed form
/// where one holds and from the exact LP otherwise.
pub fn family_witness(f: &Family) -> Result<FamilyWitness> {
    let basis = f.basis()?;
    let qt = f.qtable(&basis)?;
    let c_min = match f.closed_form_c_min()? {
        Some(c) => c,
        None => crate::lp::family_c_min(f)?,
    };
    let total = qi(basis.dims().total() as i64);
    let r_c = r_critical(&(&total * &c_min))?
        .ok_or_else(|| Error::Parameter(format!("{f}: C_min leaves r unconstrained")))?;
    let spec = WitnessSpec::new(basis, qt, r_c.clone())?;
    let matrix = assemble(&spec);
    Ok(FamilyWitness { spec, matrix, c_min, r_c })
}

/// Lambda W_c(x) + (1-Lambda) W_red on 3 (x) 3.
pub fn combine_lambda(x: &Q, lambda: &Q) -> Result<CMatrix> {
    Family::Lambda { x: x.clone(), lambda: lambda.clone() }.validate()?;
    let wc = family_witness(&Family::ThreeThreeX { x: x.clone() })?.matrix;
    let wr = reduction_witness(3)?;
    let l = to_f64(lambda);
    Ok(&wc.scale(l) + &wr.scale(1.0 - l))
}

/// (I - d |psi_00><psi_00|) / (d(d-1)) on d (x) d.
pub fn reduction_witness(d: usize) -> Result<CMatrix> {
    Ok(family_witness(&Family::Reduction { dims: vec![d, d] })?.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::TOL_EQ;

    #[test]
    fn r_critical_examples() {
        assert_eq!(r_critical(&q(1, 2)).unwrap(), Some(qi(-1)));
        assert_eq!(r_critical(&q(3, 4)).unwrap(), Some(qi(-3)));
        assert_eq!(r_critical(&qi(1)).unwrap(), None);
        assert!(r_critical(&q(-1, 2)).is_err());
    }

    #[test]
    fn uniform_q_at_r_zero_is_maximally_mixed() {
        let basis = BellBasis::build(&Dims::new(vec![3, 3]).unwrap(), Convention::GenericPhaseShift).unwrap();
        let qt = QTable::with_rest_uniform(&basis, &[]).unwrap();
        let w = assemble(&WitnessSpec::new(basis, qt, Q::zero()).unwrap());
        assert!(w.approx_eq(&CMatrix::identity(9).scale(1.0 / 9.0), TOL_EQ));
        assert!((w.trace().re - 1.0).abs() < TOL_EQ);
    }

    #[test]
    fn reduction_witness_3x3() {
        let basis = BellBasis::build(&Dims::new(vec![3, 3]).unwrap(), Convention::GenericPhaseShift).unwrap();
        let p = basis.projector(&[0, 0]).unwrap();
        let expect = (&CMatrix::identity(9) - &p.scale(3.0)).scale(1.0 / 6.0);
        let fw = family_witness(&Family::Reduction { dims: vec![3, 3] }).unwrap();
        assert_eq!(fw.r_c, qi(-3));
        assert!(fw.matrix.approx_eq(&expect, TOL_EQ));
    }

    #[test]
    fn family_examples() {
        let fw = family_witness(&Family::MultiQubitA { n: 3, x: q(1, 5) }).unwrap();
        assert_eq!(fw.c_min, q(1, 10));
        assert_eq!(fw.r_c, qi(-4));
        let fw = family_witness(&Family::TwoByNA { n: 3, x: q(1, 10) }).unwrap();
        assert_eq!(fw.r_c, q(-3, 7));
        let fw = family_witness(&Family::ThreeThreeX { x: q(67, 756) }).unwrap();
        assert_eq!((fw.c_min.clone(), fw.r_c.clone()), (q(1, 12), qi(-3)));
        assert!((fw.matrix.trace().re - 1.0).abs() < TOL_EQ);
    }

    #[test]
    fn ranges_enforced() {
        assert!(Family::ThreeThreeX { x: q(1, 2) }.validate().is_err());
        assert!(Family::MultiQubitB { n: 2, x: q(1, 10) }.validate().is_err());
        assert!(Family::Lambda { x: q(1, 8), lambda: q(3, 2) }.validate().is_err());
        assert!(Family::Reduction { dims: vec![2, 3] }.validate().is_err());
    }

    #[test]
    fn combine_lambda_endpoints() {
        let x = q(67, 756);
        let w0 = combine_lambda(&x, &Q::zero()).unwrap();
        let w1 = combine_lambda(&x, &Q::one()).unwrap();
        let wh = combine_lambda(&x, &q(1, 2)).unwrap();
        assert!(w0.approx_eq(&reduction_witness(3).unwrap(), TOL_EQ));
        assert!(w1.approx_eq(&family_witness(&Family::ThreeThreeX { x: x.clone() }).unwrap().matrix, TOL_EQ));
        assert!(wh.approx_eq(&(&w0 + &w1).scale(0.5), TOL_EQ));
        assert!(combine_lambda(&q(1, 4), &q(1, 2)).is_err());
    }

    #[test]
    fn expectation_reduction_on_basis_product() {
        let w = reduction_witness(3).unwrap();
        let g = ProductState::real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap();
        assert!((expectation(&w, &g).unwrap() - 1.0 / 6.0).abs() < TOL_EQ);
    }
}
