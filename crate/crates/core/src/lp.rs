//! Exact-rational two-phase simplex with Bland's rule, and the `.lp` text format.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_rational, pow2, q, Q};
use crate::witness::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub rel: Relation,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, rel: Relation, rhs: Q) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn lhs(&self, x: &[Q]) -> Q {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn satisfied(&self, x: &[Q]) -> bool {
        self.rel.holds(&self.lhs(x), &self.rhs)
    }

    pub fn active(&self, x: &[Q]) -> bool {
        self.lhs(x) == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Q>,
    /// Constant added to the objective value.
    pub constant: Q,
    pub constraints: Vec<Constraint>,
    /// `true` for variables constrained to be nonnegative.
    pub nonneg: Vec<bool>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Q>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constant: Q::zero(), constraints: Vec::new(), nonneg: vec![true; n] }
    }

    pub fn with_constant(mut self, c: Q) -> Self {
        self.constant = c;
        self
    }

    pub fn push(&mut self, coeffs: Vec<Q>, rel: Relation, rhs: Q) {
        self.constraints.push(Constraint::new(coeffs, rel, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.nonneg.len() != n {
            return Err(Error::Dimension(format!("{} bound flags for {n} variables", self.nonneg.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Dimension(format!("constraint {i} has {} coefficients, expected {n}", c.coeffs.len())));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Q]) -> Q {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum::<Q>() + &self.constant
    }

    /// Every constraint and sign bound holds exactly.
    pub fn feasible(&self, x: &[Q]) -> bool {
        self.constraints.iter().all(|c| c.satisfied(x))
            && self.nonneg.iter().zip(x).all(|(&nn, v)| !nn || !v.is_negative())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Q,
    pub vertex: Vec<Q>,
    /// Basic columns of the final standard-form tableau, ascending.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    /// Structural column for original variable j; `negative` marks the x- half of a free split.
    Structural { var: usize, negative: bool },
    Slack { row: usize },
    Surplus { row: usize },
    Artificial { row: usize },
}

/// Equality form A x = b, x >= 0, b >= 0, objective maximized.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    pub c: Vec<Q>,
    pub columns: Vec<ColumnKind>,
    /// Initial basic column for each row (slack or artificial).
    pub initial_basis: Vec<usize>,
}

impl StandardForm {
    pub fn count(&self, pred: impl Fn(&ColumnKind) -> bool) -> usize {
        self.columns.iter().filter(|k| pred(k)).count()
    }
}

pub fn to_standard_form(lp: &LinearProgram) -> Result<StandardForm> {
    lp.validate()?;
    let n = lp.num_vars();
    let mut columns = Vec::new();
    for j in 0..n {
        columns.push(ColumnKind::Structural { var: j, negative: false });
        if !lp.nonneg[j] {
            columns.push(ColumnKind::Structural { var: j, negative: true });
        }
    }
    let n_struct = columns.len();
    let m = lp.constraints.len();
    let mut rows: Vec<(Vec<Q>, Relation, Q)> = Vec::with_capacity(m);
    for con in &lp.constraints {
        let mut coeffs = Vec::with_capacity(n_struct);
        for col in &columns {
            if let ColumnKind::Structural { var, negative } = *col {
                let v = con.coeffs[var].clone();
                coeffs.push(if negative { -v } else { v });
            }
        }
        let (mut coeffs, mut rel, mut rhs) = (coeffs, con.rel, con.rhs.clone());
        if rhs.is_negative() {
            coeffs.iter_mut().for_each(|v| *v = -v.clone());
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push((coeffs, rel, rhs));
    }
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        match rel {
            Relation::Le => columns.push(ColumnKind::Slack { row: i }),
            Relation::Ge => columns.push(ColumnKind::Surplus { row: i }),
            Relation::Eq => {}
        }
    }
    for (i, (_, rel, _)) in rows.iter().enumerate() {
        if *rel != Relation::Le {
            columns.push(ColumnKind::Artificial { row: i });
        }
    }
    let total = columns.len();
    let mut a = vec![vec![Q::zero(); total]; m];
    let mut b = Vec::with_capacity(m);
    let mut initial_basis = vec![0; m];
    for (i, (coeffs, _, rhs)) in rows.into_iter().enumerate() {
        for (j, v) in coeffs.into_iter().enumerate() {
            a[i][j] = v;
        }
        b.push(rhs);
    }
    for (j, col) in columns.iter().enumerate() {
        match *col {
            ColumnKind::Slack { row } => {
                a[row][j] = Q::one();
                initial_basis[row] = j;
            }
            ColumnKind::Surplus { row } => a[row][j] = -Q::one(),
            ColumnKind::Artificial { row } => {
                a[row][j] = Q::one();
                initial_basis[row] = j;
            }
            ColumnKind::Structural { .. } => {}
        }
    }
    let sign = if lp.sense == Sense::Max { Q::one() } else { -Q::one() };
    let c = columns
        .iter()
        .map(|col| match *col {
            ColumnKind::Structural { var, negative } => {
                let v = &lp.objective[var] * &sign;
                if negative {
                    -v
                } else {
                    v
                }
            }
            _ => Q::zero(),
        })
        .collect();
    Ok(StandardForm { a, b, c, columns, initial_basis })
}

struct Tableau {
    a: Vec<Vec<Q>>,
    b: Vec<Q>,
    basis: Vec<usize>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, s: usize) {
        let p = self.a[r][s].clone();
        for v in self.a[r].iter_mut() {
            *v /= &p;
        }
        self.b[r] /= &p;
        let pivot_row = self.a[r].clone();
        let pivot_b = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][s].is_zero() {
                continue;
            }
            let f = self.a[i][s].clone();
            for (v, pr) in self.a[i].iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *v -= &f * pr;
                }
            }
            self.b[i] -= &f * &pivot_b;
        }
        self.basis[r] = s;
        self.pivots += 1;
    }

    /// Maximizes c.x over columns with allowed[j]; Bland's rule.
    fn optimize(&mut self, c: &[Q], allowed: &[bool]) -> Outcome {
        loop {
            let ncols = c.len();
            let mut entering = None;
            for j in 0..ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut red = c[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !self.a[i][j].is_zero() && !c[bi].is_zero() {
                        red -= &c[bi] * &self.a[i][j];
                    }
                }
                if red.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(s) = entering else { return Outcome::Optimal };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.a.len() {
                if self.a[i][s].is_positive() {
                    let ratio = &self.b[i] / &self.a[i][s];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return Outcome::Unbounded };
            self.pivot(r, s);
        }
    }
}

pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let sf = to_standard_form(lp)?;
    let ncols = sf.columns.len();
    let mut t = Tableau { a: sf.a.clone(), b: sf.b.clone(), basis: sf.initial_basis.clone(), pivots: 0 };
    let is_art: Vec<bool> = sf.columns.iter().map(|k| matches!(k, ColumnKind::Artificial { .. })).collect();
    let fail = |status, pivots| LpSolution { status, value: Q::zero(), vertex: vec![], basis: vec![], pivots };

    if is_art.iter().any(|&x| x) {
        let c1: Vec<Q> = is_art.iter().map(|&x| if x { -Q::one() } else { Q::zero() }).collect();
        let all = vec![true; ncols];
        t.optimize(&c1, &all);
        let infeas: Q = t.basis.iter().zip(&t.b).filter(|(&bi, _)| is_art[bi]).map(|(_, v)| v.clone()).sum();
        if infeas.is_positive() {
            return Ok(fail(LpStatus::Infeasible, t.pivots));
        }
        // Drive zero-level artificials out; drop rows that are redundant.
        let mut i = 0;
        while i < t.basis.len() {
            if is_art[t.basis[i]] {
                match (0..ncols).find(|&j| !is_art[j] && !t.a[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.a.remove(i);
                        t.b.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let allowed: Vec<bool> = is_art.iter().map(|&x| !x).collect();
    if let Outcome::Unbounded = t.optimize(&sf.c, &allowed) {
        return Ok(fail(LpStatus::Unbounded, t.pivots));
    }
    let mut x_std = vec![Q::zero(); ncols];
    for (i, &bi) in t.basis.iter().enumerate() {
        x_std[bi] = t.b[i].clone();
    }
    let mut vertex = vec![Q::zero(); lp.num_vars()];
    for (j, col) in sf.columns.iter().enumerate() {
        if let ColumnKind::Structural { var, negative } = *col {
            if negative {
                vertex[var] -= &x_std[j];
            } else {
                vertex[var] += &x_std[j];
            }
        }
    }
    let value = lp.objective_value(&vertex);
    let mut basis = t.basis.clone();
    basis.sort_unstable();
    Ok(LpSolution { status: LpStatus::Optimal, value, vertex, basis, pivots: t.pivots })
}

/// Number of linearly independent constraints (including active sign bounds) tight at x.
pub fn active_rank(lp: &LinearProgram, x: &[Q]) -> usize {
    let n = lp.num_vars();
    let mut rows: Vec<Vec<Q>> = lp.constraints.iter().filter(|c| c.active(x)).map(|c| c.coeffs.clone()).collect();
    for j in 0..n {
        if lp.nonneg[j] && x[j].is_zero() {
            let mut e = vec![Q::zero(); n];
            e[j] = Q::one();
            rows.push(e);
        }
    }
    rank(rows)
}

pub fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = &rows[i][col] / &pivot[col];
                for (v, pv) in rows[i].iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        r += 1;
    }
    r
}

/// Parses the `.lp` text format:
/// `min|max`, `obj: c1 c2 ...`, optional `const: k`, optional `free: j ...`,
/// then rows `a1 a2 ... <=|=|>= b`. `#` starts a comment.
pub fn parse_lp(text: &str) -> Result<LinearProgram> {
    let mut sense = None;
    let mut objective: Option<Vec<Q>> = None;
    let mut constant = Q::zero();
    let mut free: Vec<usize> = Vec::new();
    let mut rows = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let rat = |s: &str| parse_rational(s).map(|(v, _)| v);
        if line.eq_ignore_ascii_case("min") || line.eq_ignore_ascii_case("max") {
            sense = Some(if line.eq_ignore_ascii_case("min") { Sense::Min } else { Sense::Max });
        } else if let Some(rest) = line.strip_prefix("obj:") {
            objective = Some(rest.split_whitespace().map(rat).collect::<Result<_>>()?);
        } else if let Some(rest) = line.strip_prefix("const:") {
            constant = rat(rest.trim())?;
        } else if let Some(rest) = line.strip_prefix("free:") {
            free = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad variable index '{t}'"))))
                .collect::<Result<_>>()?;
        } else {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let pos = toks
                .iter()
                .position(|t| matches!(*t, "<=" | "=" | ">="))
                .ok_or_else(|| Error::Parse(format!("constraint without relation: '{line}'")))?;
            if pos + 2 != toks.len() {
                return Err(Error::Parse(format!("malformed constraint: '{line}'")));
            }
            let rel = match toks[pos] {
                "<=" => Relation::Le,
                ">=" => Relation::Ge,
                _ => Relation::Eq,
            };
            let coeffs = toks[..pos].iter().map(|t| rat(t)).collect::<Result<Vec<_>>>()?;
            rows.push(Constraint::new(coeffs, rel, rat(toks[pos + 1])?));
        }
    }
    let sense = sense.ok_or_else(|| Error::Parse("missing 'min' or 'max' line".into()))?;
    let objective = objective.ok_or_else(|| Error::Parse("missing 'obj:' line".into()))?;
    let mut lp = LinearProgram::new(sense, objective).with_constant(constant);
    for j in free {
        if j >= lp.nonneg.len() {
            return Err(Error::Parse(format!("free variable {j} out of range")));
        }
        lp.nonneg[j] = false;
    }
    lp.constraints = rows;
    lp.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(lp)
}

pub fn write_lp(lp: &LinearProgram) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", if lp.sense == Sense::Min { "min" } else { "max" });
    let obj: Vec<String> = lp.objective.iter().map(fmt_q).collect();
    let _ = writeln!(s, "obj: {}", obj.join(" "));
    if !lp.constant.is_zero() {
        let _ = writeln!(s, "const: {}", fmt_q(&lp.constant));
    }
    let free: Vec<String> = lp.nonneg.iter().enumerate().filter(|(_, &nn)| !nn).map(|(j, _)| j.to_string()).collect();
    if !free.is_empty() {
        let _ = writeln!(s, "free: {}", free.join(" "));
    }
    for c in &lp.constraints {
        let row: Vec<String> = c.coeffs.iter().map(fmt_q).collect();
        let _ = writeln!(s, "{} {} {}", row.join(" "), c.rel.symbol(), fmt_q(&c.rhs));
    }
    s
}

/// The LP over a family's coordinates (see `CoordinateModel`): minimize C
/// subject to the family's halfspaces.
pub fn family_lp(f: &Family) -> Result<LinearProgram> {
    let model = f.model()?;
    let mut lp = LinearProgram::new(Sense::Min, model.coefficients()).with_constant(model.constant());
    let one = Q::one();
    let box_rows = |lp: &mut LinearProgram, k: usize, hi: Q| {
        for i in 0..k {
            let mut row = vec![Q::zero(); k];
            row[i] = one.clone();
            lp.push(row, Relation::Le, hi.clone());
        }
    };
    match f {
        Family::MultiQubitA { n, .. } => {
            let a = &one - &(&one / pow2(*n as u32 - 2));
            let b = &one / pow2(*n as u32 - 1);
            lp.push(vec![one.clone(), -a.clone()], Relation::Le, b.clone());
            lp.push(vec![-a, one.clone()], Relation::Le, b);
            box_rows(&mut lp, 2, q(1, 2));
        }
        Family::MultiQubitB { .. } | Family::TwoByNA { .. } | Family::TwoByNB { .. } => box_rows(&mut lp, 2, q(1, 2)),
        Family::ThreeThreeX { .. } | Family::Lambda { .. } => {
            for h in crate::region::three_three_x_hull()? {
                lp.push(h.normal.clone(), h.rel, h.offset.clone());
            }
        }
        Family::ThreeThreeXPrime { .. } => {
            lp.push(vec![one.clone(); 3], Relation::Le, q(2, 3));
            box_rows(&mut lp, 3, q(1, 3));
        }
        Family::Reduction { dims } => box_rows(&mut lp, 1, q(1, dims[0] as i64)),
    }
    Ok(lp)
}

/// Exact LP minimum of the unscaled C for a family.
pub fn family_c_min(f: &Family) -> Result<Q> {
    let sol = simplex_solve(&family_lp(f)?)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        other => Err(Error::Parameter(format!("{f}: LP is {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn v(xs: &[(i64, i64)]) -> Vec<Q> {
        xs.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn simple_max() {
        let mut lp = LinearProgram::new(Sense::Max, v(&[(1, 1), (1, 1)]));
        lp.push(v(&[(1, 1), (1, 1)]), Relation::Le, qi(1));
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, qi(1));
        assert!(lp.feasible(&s.vertex));
    }

    #[test]
    fn slacks_for_le_rows() {
        let mut lp = LinearProgram::new(Sense::Max, v(&[(1, 1), (0, 1)]));
        lp.push(v(&[(2, 1), (-3, 2)]), Relation::Le, q(1, 4));
        lp.push(v(&[(-3, 2), (2, 1)]), Relation::Le, q(1, 4));
        let sf = to_standard_form(&lp).unwrap();
        assert_eq!(sf.count(|k| matches!(k, ColumnKind::Slack { .. })), 2);
        assert_eq!(sf.count(|k| matches!(k, ColumnKind::Artificial { .. })), 0);
        let mut eq = LinearProgram::new(Sense::Min, v(&[(1, 1)]));
        eq.push(v(&[(1, 1)]), Relation::Eq, qi(2));
        let sf = to_standard_form(&eq).unwrap();
        assert_eq!(sf.count(|k| matches!(k, ColumnKind::Artificial { .. })), 1);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y s.t. x + y = 3, x >= 1, y >= 1/2
        let mut lp = LinearProgram::new(Sense::Min, v(&[(1, 1), (2, 1)]));
        lp.push(v(&[(1, 1), (1, 1)]), Relation::Eq, qi(3));
        lp.push(v(&[(1, 1), (0, 1)]), Relation::Ge, qi(1));
        lp.push(v(&[(0, 1), (1, 1)]), Relation::Ge, q(1, 2));
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.vertex, v(&[(5, 2), (1, 2)]));
        assert_eq!(s.value, q(7, 2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Max, v(&[(1, 1)]));
        lp.push(v(&[(1, 1)]), Relation::Le, qi(1));
        lp.push(v(&[(1, 1)]), Relation::Ge, qi(2));
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
        let lp = LinearProgram::new(Sense::Max, v(&[(1, 1)]));
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // min x s.t. x >= -5 with x free
        let mut lp = LinearProgram::new(Sense::Min, v(&[(1, 1)]));
        lp.nonneg[0] = false;
        lp.push(v(&[(1, 1)]), Relation::Ge, qi(-5));
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.vertex, vec![qi(-5)]);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Max, v(&[(3, 4), (-150, 1), (1, 50), (-6, 1)]));
        lp.push(v(&[(1, 4), (-60, 1), (-1, 25), (9, 1)]), Relation::Le, qi(0));
        lp.push(v(&[(1, 2), (-90, 1), (-1, 50), (3, 1)]), Relation::Le, qi(0));
        lp.push(v(&[(0, 1), (0, 1), (1, 1), (0, 1)]), Relation::Le, qi(1));
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, q(1, 20));
    }

    #[test]
    fn text_roundtrip() {
        let text = "min\nobj: 1 -1/2\nconst: 1/8\nfree: 1\n1 1 <= 1\n1/3 -1 >= -2 # comment\n";
        let lp = parse_lp(text).unwrap();
        assert_eq!(lp.constant, q(1, 8));
        assert!(!lp.nonneg[1]);
        assert_eq!(parse_lp(&write_lp(&lp)).unwrap(), lp);
        assert!(parse_lp("obj: 1\n1 <= 1").is_err());
        assert!(parse_lp("min\nobj: 1 1\n1 <= 1").is_err());
    }

    #[test]
    fn active_rank_at_vertex() {
        let mut lp = LinearProgram::new(Sense::Max, v(&[(1, 1), (1, 1)]));
        lp.push(v(&[(1, 1), (1, 1)]), Relation::Le, qi(1));
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(active_rank(&lp, &s.vertex), 2);
    }
}
