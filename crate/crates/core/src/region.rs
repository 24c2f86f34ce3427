//! Feasible regions of product distributions: extreme-point catalogs, plane
//! violations, hull expansion and vertex enumeration.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::bell::{BellBasis, BellIndex, Convention};
use crate::error::{Error, Result};
use crate::lp::{rank, Relation};
use crate::product::{distribution, minimize_over_products, OracleSettings, ProductState};
use crate::rational::{fmt_q, nearest_rational, pow2, q, qi, to_f64, Q};
use crate::tensor::{c, Dims, C64, TOL_EQ};
use crate::witness::Family;

/// normal . P (rel) offset.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<Q>,
    pub rel: Relation,
    pub offset: Q,
}

impl Halfspace {
    pub fn new(normal: Vec<Q>, rel: Relation, offset: Q) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Parameter("halfspace normal must be nonzero".into()));
        }
        Ok(Halfspace { normal, rel, offset })
    }

    pub fn le(normal: &[i64], offset: Q) -> Self {
        Halfspace { normal: normal.iter().map(|&v| qi(v)).collect(), rel: Relation::Le, offset }
    }

    /// normal . p - offset.
    pub fn value(&self, p: &[Q]) -> Q {
        self.normal.iter().zip(p).map(|(a, b)| a * b).sum::<Q>() - &self.offset
    }

    pub fn value_f64(&self, p: &[f64]) -> f64 {
        self.normal.iter().zip(p).map(|(a, b)| to_f64(a) * b).sum::<f64>() - to_f64(&self.offset)
    }

    pub fn satisfied(&self, p: &[Q]) -> bool {
        self.rel.holds(&(&self.value(p) + &self.offset), &self.offset)
    }

    /// Signed amount by which p lies outside (positive = violated).
    pub fn violation_f64(&self, p: &[f64]) -> f64 {
        let v = self.value_f64(p);
        match self.rel {
            Relation::Le => v,
            Relation::Ge => -v,
            Relation::Eq => v.abs(),
        }
    }

    pub fn shifted(&self, delta: &Q) -> Self {
        let offset = match self.rel {
            Relation::Ge => &self.offset - delta,
            _ => &self.offset + delta,
        };
        Halfspace { offset, ..self.clone() }
    }
}

impl std::fmt::Display for Halfspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let coeffs: Vec<String> = self.normal.iter().map(fmt_q).collect();
        let rel = match self.rel {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        write!(f, "{} {rel} {}", coeffs.join(" "), fmt_q(&self.offset))
    }
}

/// The six reference 3 (x) 3 planes over (P00, P10, P20), numbered 1 to 6.
pub fn three_three_x_planes() -> Vec<(usize, Halfspace)> {
    let one = Q::one();
    vec![
        (1, Halfspace::le(&[1, 3, -1], one.clone())),
        (2, Halfspace::le(&[-1, 3, 1], one.clone())),
        (3, Halfspace::le(&[-1, 1, 3], one.clone())),
        (4, Halfspace::le(&[1, -1, 3], one.clone())),
        (5, Halfspace::le(&[3, -1, 1], one.clone())),
        (6, Halfspace::le(&[3, 1, -1], one)),
    ]
}

pub fn three_three_x_shift() -> Q {
    q(2, 61)
}

/// Shifted planes, the simplex face sum P <= 1 and P >= 0.
pub fn three_three_x_expanded_planes() -> Vec<Halfspace> {
    let mut out: Vec<Halfspace> = three_three_x_planes().into_iter().map(|(_, h)| h.shifted(&three_three_x_shift())).collect();
    out.push(Halfspace::le(&[1, 1, 1], Q::one()));
    for i in 0..3 {
        let mut n = [0i64; 3];
        n[i] = -1;
        out.push(Halfspace::le(&n, Q::zero()));
    }
    out
}

fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col].clone();
        for j in col..n {
            a[col][j] = &a[col][j] / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Vertices from all k-fold plane intersections (k = dimension) that satisfy
/// every plane and, if given, the box lo <= P_i <= hi. Sorted, deduplicated.
pub fn enumerate_vertices(planes: &[Halfspace], bounds: Option<(Q, Q)>) -> Result<Vec<Vec<Q>>> {
    let k = planes.first().map(|h| h.normal.len()).ok_or_else(|| Error::Parameter("no planes".into()))?;
    if planes.len() < k {
        return Err(Error::Parameter(format!("need at least {k} planes, got {}", planes.len())));
    }
    if planes.iter().any(|h| h.normal.len() != k) {
        return Err(Error::Dimension("planes of mixed dimension".into()));
    }
    let mut out = Vec::new();
    for combo in combinations(planes.len(), k) {
        let a: Vec<Vec<Q>> = combo.iter().map(|&i| planes[i].normal.clone()).collect();
        let b: Vec<Q> = combo.iter().map(|&i| planes[i].offset.clone()).collect();
        if rank(a.clone()) < k {
            continue;
        }
        let Some(p) = solve_exact(a, b) else { continue };
        if !planes.iter().all(|h| h.satisfied(&p)) {
            continue;
        }
        if let Some((lo, hi)) = &bounds {
            if p.iter().any(|v| v < lo || v > hi) {
                continue;
            }
        }
        out.push(p);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn cross(a: &[Q], b: &[Q]) -> Vec<Q> {
    vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Facets (as <= halfspaces) of the convex hull of full-dimensional points in 3D.
pub fn hull_facets(points: &[Vec<Q>]) -> Result<Vec<Halfspace>> {
    if points.iter().any(|p| p.len() != 3) {
        return Err(Error::Dimension("hull_facets expects 3D points".into()));
    }
    let mut out: Vec<Halfspace> = Vec::new();
    for t in combinations(points.len(), 3) {
        let (a, b, cc) = (&points[t[0]], &points[t[1]], &points[t[2]]);
        let u: Vec<Q> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let v: Vec<Q> = cc.iter().zip(a).map(|(x, y)| x - y).collect();
        let mut n = cross(&u, &v);
        if n.iter().all(Zero::is_zero) {
            continue;
        }
        let mut off = dot(&n, a);
        let sides: Vec<Q> = points.iter().map(|p| dot(&n, p) - &off).collect();
        let pos = sides.iter().any(|s| s.is_positive());
        let neg = sides.iter().any(|s| s.is_negative());
        if pos && neg {
            continue;
        }
        if pos {
            n = n.into_iter().map(|x| -x).collect();
            off = -off;
        }
        let scale = n.iter().find(|x| !x.is_zero()).expect("nonzero normal").abs();
        let n: Vec<Q> = n.into_iter().map(|x| x / &scale).collect();
        let off = off / &scale;
        let h = Halfspace { normal: n, rel: Relation::Le, offset: off };
        if !out.contains(&h) {
            out.push(h);
        }
    }
    Ok(out)
}

/// Vertices of the expanded 3 (x) 3 system filtered by the box P <= 1/3,
/// together with (1/3, 1/3, 1/3).
pub fn three_three_x_vertices() -> Result<Vec<Vec<Q>>> {
    let mut v = enumerate_vertices(&three_three_x_expanded_planes(), Some((Q::zero(), q(1, 3))))?;
    let e = vec![q(1, 3); 3];
    if !v.contains(&e) {
        v.push(e);
        v.sort();
    }
    Ok(v)
}

/// H-representation of conv(three_three_x_vertices()).
pub fn three_three_x_hull() -> Result<Vec<Halfspace>> {
    hull_facets(&three_three_x_vertices()?)
}

/// An extreme point of a family's coordinate region and a product state attaining it.
#[derive(Clone, Debug)]
pub struct CatalogPoint {
    pub point: Vec<Q>,
    pub state: ProductState,
}

fn omega3() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

fn vec_c(v: &[C64]) -> Vec<C64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

fn state(a: &[C64], b: &[C64]) -> ProductState {
    ProductState::new(vec![vec_c(a), vec_c(b)]).expect("normalized catalog state")
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn qubit_state(factors: &[[f64; 2]]) -> ProductState {
    ProductState::new(factors.iter().map(|f| vec_c(&real(f))).collect()).expect("normalized catalog state")
}

fn pt(v: &[(i64, i64)]) -> Vec<Q> {
    v.iter().map(|&(a, b)| q(a, b)).collect()
}

/// The catalog of extreme points with realizing product states.
pub fn extreme_points(f: &Family) -> Result<Vec<CatalogPoint>> {
    f.validate()?;
    let w = omega3();
    let wb = w.conj();
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let u3 = [one, one, one];
    let out = match f {
        Family::MultiQubitA { n, .. } => {
            let h = pow2(*n as u32 - 1);
            let inv = Q::one() / h;
            let zeros = vec![[1.0, 0.0]; *n];
            let plus = vec![[1.0, 1.0]; *n];
            let mut minus = plus.clone();
            minus[0] = [1.0, -1.0];
            vec![
                CatalogPoint { point: pt(&[(1, 2), (1, 2)]), state: qubit_state(&zeros) },
                CatalogPoint { point: vec![inv.clone(), Q::zero()], state: qubit_state(&plus) },
                CatalogPoint { point: vec![Q::zero(), inv], state: qubit_state(&minus) },
            ]
        }
        Family::MultiQubitB { n, .. } => {
            let zeros = vec![[1.0, 0.0]; *n];
            let mut last = zeros.clone();
            last[*n - 1] = [0.0, 1.0];
            vec![
                CatalogPoint { point: pt(&[(1, 2), (0, 1)]), state: qubit_state(&zeros) },
                CatalogPoint { point: pt(&[(0, 1), (1, 2)]), state: qubit_state(&last) },
            ]
        }
        Family::TwoByNA { n, .. } | Family::TwoByNB { n, .. } => {
            let e = |k: usize| -> Vec<C64> { (0..*n).map(|j| if j == k { one } else { zero }).collect() };
            let p01: Vec<C64> = (0..*n).map(|j| if j < 2 { one } else { zero }).collect();
            if matches!(f, Family::TwoByNA { .. }) {
                vec![
                    CatalogPoint { point: pt(&[(1, 2), (1, 2)]), state: state(&[one, zero], &e(0)) },
                    CatalogPoint { point: pt(&[(1, 2), (0, 1)]), state: state(&[one, one], &p01) },
                    CatalogPoint { point: pt(&[(0, 1), (1, 2)]), state: state(&[one, -one], &p01) },
                ]
            } else {
                vec![
                    CatalogPoint { point: pt(&[(1, 2), (0, 1)]), state: state(&[one, zero], &e(0)) },
                    CatalogPoint { point: pt(&[(0, 1), (1, 2)]), state: state(&[one, zero], &e(1)) },
                ]
            }
        }
        Family::ThreeThreeX { .. } | Family::Lambda { .. } => vec![
            CatalogPoint { point: pt(&[(1, 3), (0, 1), (0, 1)]), state: state(&u3, &u3) },
            CatalogPoint { point: pt(&[(0, 1), (1, 3), (0, 1)]), state: state(&[one, w, wb], &u3) },
            CatalogPoint { point: pt(&[(0, 1), (0, 1), (1, 3)]), state: state(&[one, wb, w], &u3) },
            CatalogPoint { point: pt(&[(0, 1), (1, 4), (1, 4)]), state: state(&[zero, one, one], &[zero, one, -one]) },
            CatalogPoint { point: pt(&[(1, 4), (0, 1), (1, 4)]), state: state(&[one, zero, one], &[one, zero, -wb]) },
            CatalogPoint { point: pt(&[(1, 4), (1, 4), (0, 1)]), state: state(&[one, one, zero], &[one, -wb, zero]) },
            CatalogPoint { point: pt(&[(1, 3), (1, 3), (1, 3)]), state: state(&[one, zero, zero], &[one, zero, zero]) },
        ],
        Family::ThreeThreeXPrime { .. } => vec![
            CatalogPoint { point: pt(&[(1, 3), (1, 3), (0, 1)]), state: state(&[one, zero, zero], &[one, zero, zero]) },
            CatalogPoint { point: pt(&[(1, 3), (0, 1), (1, 3)]), state: state(&u3, &u3) },
            CatalogPoint { point: pt(&[(0, 1), (1, 3), (1, 3)]), state: state(&[one, w, one], &[one, one, wb]) },
            CatalogPoint { point: pt(&[(1, 3), (0, 1), (0, 1)]), state: state(&[one, one, wb], &[one, one, w]) },
            CatalogPoint { point: pt(&[(0, 1), (1, 3), (0, 1)]), state: state(&u3, &[one, w, wb]) },
            CatalogPoint { point: pt(&[(0, 1), (0, 1), (1, 3)]), state: state(&[one, zero, zero], &[zero, one, zero]) },
        ],
        Family::Reduction { dims } => {
            let factors: Vec<Vec<C64>> = dims.iter().map(|&d| (0..d).map(|j| if j == 0 { one } else { zero }).collect()).collect();
            vec![CatalogPoint { point: vec![q(1, dims[0] as i64)], state: ProductState::new(factors)? }]
        }
    };
    Ok(out)
}

/// Index groups of the Choi coordinates (P1, P2, P3) = (sum_{k=1,2} P_k0, sum_k P_k2, sum_k P_k1).
pub fn choi_groups() -> Vec<Vec<BellIndex>> {
    vec![vec![vec![1, 0], vec![2, 0]], (0..3).map(|k| vec![k, 2]).collect(), (0..3).map(|k| vec![k, 1]).collect()]
}

pub fn choi_extreme_points() -> Vec<CatalogPoint> {
    let w = omega3();
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let e = |k: usize| -> Vec<C64> { (0..3).map(|j| if j == k { one } else { zero }).collect() };
    vec![
        CatalogPoint { point: pt(&[(1, 3), (1, 3), (1, 3)]), state: state(&[one, w, w.conj()], &[one, w, w.conj()]) },
        CatalogPoint { point: pt(&[(0, 1), (1, 1), (0, 1)]), state: state(&e(0), &e(2)) },
        CatalogPoint { point: pt(&[(0, 1), (0, 1), (1, 1)]), state: state(&e(0), &e(1)) },
        CatalogPoint { point: pt(&[(2, 3), (0, 1), (0, 1)]), state: state(&e(0), &e(0)) },
    ]
}

/// Coordinates of a product state in terms of grouped Bell distributions.
pub fn coordinates(basis: &BellBasis, groups: &[Vec<BellIndex>], gamma: &ProductState) -> Result<Vec<f64>> {
    let d = distribution(basis, gamma)?;
    groups.iter().map(|g| g.iter().map(|idx| d.at(basis, idx)).sum::<Result<f64>>()).collect()
}

/// Whether the realizing state reproduces the point: within TOL_EQ and
/// equal, as a rational of denominator <= 1000, to the stated point.
pub fn verify_point(basis: &BellBasis, groups: &[Vec<BellIndex>], cp: &CatalogPoint) -> Result<bool> {
    let got = coordinates(basis, groups, &cp.state)?;
    Ok(got.iter().zip(&cp.point).all(|(g, p)| (g - to_f64(p)).abs() < TOL_EQ && nearest_rational(*g, 1000).is_ok_and(|r| &r == p)))
}

pub fn family_groups(f: &Family) -> Result<Vec<Vec<BellIndex>>> {
    Ok(f.model()?.groups)
}

/// (P00, P10, P20) on the slice x1 = 1 - 2 x2, x2 = x3, phases (0, phi, -phi).
pub fn slice_distribution(x2: f64, phi: f64) -> [f64; 3] {
    let x1 = 1.0 - 2.0 * x2;
    let mut p = [0.0; 3];
    for (k, v) in p.iter_mut().enumerate() {
        let a = x1 + 2.0 * x2 * (phi + 2.0 * PI * k as f64 / 3.0).cos();
        *v = a * a / 3.0;
    }
    p
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceViolation {
    pub d: f64,
    pub x2: f64,
    pub cos_phi: f64,
}

/// Maximum violation of a (P00, P10, P20) plane over the reduced slice
/// x2 in [0, 1/3], phi in [0, 2 pi): grid then coordinate refinement.
pub fn max_violation_slice(h: &Halfspace) -> Result<SliceViolation> {
    if h.normal.len() != 3 {
        return Err(Error::Dimension("slice violation needs a 3-coordinate plane".into()));
    }
    let x2_max = 1.0 / 3.0;
    let f = |x2: f64, phi: f64| h.violation_f64(&slice_distribution(x2.clamp(0.0, x2_max), phi));
    let (gx, gp) = (400usize, 720usize);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=gx {
        let x2 = x2_max * i as f64 / gx as f64;
        for j in 0..gp {
            let phi = 2.0 * PI * j as f64 / gp as f64;
            let v = f(x2, phi);
            if v > best.0 {
                best = (v, x2, phi);
            }
        }
    }
    let (mut v, mut x2, mut phi) = best;
    let mut h_step = [x2_max / gx as f64, 2.0 * PI / gp as f64];
    while h_step[0] > 1e-13 || h_step[1] > 1e-13 {
        let mut improved = false;
        for (ci, step) in h_step.iter().enumerate() {
            for dir in [1.0, -1.0] {
                let (nx, np) = if ci == 0 { ((x2 + dir * step).clamp(0.0, x2_max), phi) } else { (x2, phi + dir * step) };
                let nv = f(nx, np);
                if nv > v {
                    v = nv;
                    x2 = nx;
                    phi = np;
                    improved = true;
                }
            }
        }
        if !improved {
            h_step[0] *= 0.5;
            h_step[1] *= 0.5;
        }
    }
    Ok(SliceViolation { d: v, x2, cos_phi: phi.cos() })
}

/// Maximum violation of a plane in grouped coordinates over all product states.
pub fn max_violation_full(
    basis: &BellBasis,
    groups: &[Vec<BellIndex>],
    h: &Halfspace,
    settings: &OracleSettings,
) -> Result<(f64, ProductState)> {
    if groups.len() != h.normal.len() {
        return Err(Error::Dimension(format!("{} groups for a {}-coordinate plane", groups.len(), h.normal.len())));
    }
    let sign = match h.rel {
        Relation::Ge => -1.0,
        _ => 1.0,
    };
    let mut weights = vec![0.0; basis.len()];
    for (g, a) in groups.iter().zip(&h.normal) {
        for idx in g {
            weights[basis.position(idx)?] += sign * to_f64(a);
        }
    }
    let m = crate::product::weighted_distribution_objective(basis, &weights);
    let off = sign * to_f64(&h.offset);
    let res = minimize_over_products(basis.dims(), |v| off - m.quadratic_form(v).map(|z| z.re).unwrap_or(f64::NAN), settings)?;
    Ok((-res.value, res.argmin))
}

#[derive(Clone, Debug)]
pub struct PlaneViolation {
    pub label: String,
    pub plane: Halfspace,
    pub slice: Option<SliceViolation>,
    pub full: f64,
}

#[derive(Clone, Debug)]
pub struct RegionReport {
    pub family: String,
    pub vertices: Vec<Vec<Q>>,
    pub violations: Vec<PlaneViolation>,
    pub expanded_planes: Vec<Halfspace>,
}

/// Region report for the 3 (x) 3 families.
pub fn region_report(f: &Family, settings: &OracleSettings) -> Result<RegionReport> {
    let basis = f.basis()?;
    let groups = family_groups(f)?;
    match f {
        Family::ThreeThreeX { .. } | Family::Lambda { .. } => {
            let mut violations = Vec::new();
            for (k, h) in three_three_x_planes() {
                let slice = max_violation_slice(&h)?;
                let (full, _) = max_violation_full(&basis, &groups, &h, settings)?;
                violations.push(PlaneViolation { label: format!("plane{k}"), plane: h, slice: Some(slice), full });
            }
            Ok(RegionReport {
                family: f.to_string(),
                vertices: three_three_x_vertices()?,
                violations,
                expanded_planes: three_three_x_hull()?,
            })
        }
        Family::ThreeThreeXPrime { .. } => {
            let h = Halfspace::le(&[1, 1, 1], q(2, 3));
            let (full, _) = max_violation_full(&basis, &groups, &h, settings)?;
            let lp = crate::lp::family_lp(f)?;
            let planes: Vec<Halfspace> =
                lp.constraints.iter().map(|c| Halfspace { normal: c.coeffs.clone(), rel: c.rel, offset: c.rhs.clone() }).collect();
            let mut all = planes.clone();
            for i in 0..3 {
                let mut n = [0i64; 3];
                n[i] = -1;
                all.push(Halfspace::le(&n, Q::zero()));
            }
            Ok(RegionReport {
                family: f.to_string(),
                vertices: enumerate_vertices(&all, None)?,
                violations: vec![PlaneViolation { label: "sum".into(), plane: h, slice: None, full }],
                expanded_planes: planes,
            })
        }
        _ => Err(Error::Parameter(format!("region report is defined for the 3x3 families, not {f}"))),
    }
}

impl RegionReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# family\t{}", self.family);
        let _ = writeln!(s, "# vertices");
        for v in &self.vertices {
            let row: Vec<String> = v.iter().map(fmt_q).collect();
            let _ = writeln!(s, "vertex\t{}", row.join("\t"));
        }
        let _ = writeln!(s, "# violations: label, plane, slice D, x2, cos phi, full-search D");
        for pv in &self.violations {
            let (d, x2, cp) = match &pv.slice {
                Some(sv) => (format!("{:.10}", sv.d), format!("{:.10}", sv.x2), format!("{:.10}", sv.cos_phi)),
                None => ("-".into(), "-".into(), "-".into()),
            };
            let _ = writeln!(s, "violation\t{}\t{}\t{d}\t{x2}\t{cp}\t{:.10}", pv.label, pv.plane, pv.full);
        }
        let _ = writeln!(s, "# expanded halfspaces");
        for h in &self.expanded_planes {
            let _ = writeln!(s, "plane\t{h}");
        }
        s
    }
}

/// Bell basis used by the Choi coordinates.
pub fn three_three_basis() -> Result<BellBasis> {
    BellBasis::build(&Dims::new(vec![3, 3])?, Convention::GenericPhaseShift)
}
