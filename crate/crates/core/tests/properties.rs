use num_traits::Zero;
use proptest::prelude::*;

use bdew::bell::{build_bell_basis, Convention, QTable};
use bdew::lp::{parse_lp, simplex_solve, write_lp, LinearProgram, LpStatus, Relation, Sense};
use bdew::product::{distribution, oracle_min_c, OracleSettings, ProductState};
use bdew::rational::{fmt_q, nearest_rational, parse_rational, q, to_f64, Q};
use bdew::region::{coordinates, extreme_points, family_groups};
use bdew::tensor::{eig_hermitian, kron, parse_cmat, partial_transpose, write_cmat, CMatrix, Dims, C64};
use bdew::witness::{assemble, r_critical, Family, WitnessSpec};

fn hermitian(n: usize, vals: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    let mut it = vals.iter().cycle();
    for i in 0..n {
        m[(i, i)] = C64::new(*it.next().unwrap(), 0.0);
        for j in i + 1..n {
            let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![Just(vec![2, 2]), Just(vec![2, 3]), Just(vec![3, 3]), Just(vec![2, 2, 2]), Just(vec![2, 4])]
}

fn factors(dims: &[usize], raw: &[f64]) -> Vec<Vec<C64>> {
    let mut it = raw.iter().cycle();
    dims.iter()
        .map(|&d| (0..d).map(|_| C64::new(*it.next().unwrap(), *it.next().unwrap())).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_transpose_involution(dims in dims_strategy(), vals in prop::collection::vec(-1.0f64..1.0, 40), k in 0usize..3) {
        let d = Dims::new(dims.clone()).unwrap();
        let k = k % dims.len();
        let m = hermitian(d.total(), &vals);
        let t = partial_transpose(&m, &d, k).unwrap();
        prop_assert!((t.trace() - m.trace()).norm() < 1e-12);
        prop_assert_eq!(partial_transpose(&t, &d, k).unwrap(), m);
    }

    #[test]
    fn kron_associative(a in prop::collection::vec(-3i32..4, 4), b in prop::collection::vec(-3i32..4, 9), c in prop::collection::vec(-3i32..4, 4)) {
        let mk = |v: &[i32], n: usize| CMatrix::from_real(n, n, &v.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
        let (a, b, c) = (mk(&a, 2), mk(&b, 3), mk(&c, 2));
        prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }

    #[test]
    fn eigen_reconstruction(n in 1usize..=16, vals in prop::collection::vec(-1.0f64..1.0, 64)) {
        let m = hermitian(n, &vals);
        let e = eig_hermitian(&m).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&m) <= 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cmat_roundtrip(n in 1usize..6, vals in prop::collection::vec(-1e3f64..1e3, 64)) {
        let m = hermitian(n, &vals);
        prop_assert_eq!(parse_cmat(&write_cmat(&m)).unwrap(), m);
    }

    #[test]
    fn rational_text_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = q(n, d);
        let (back, approx) = parse_rational(&fmt_q(&x)).unwrap();
        prop_assert!(!approx);
        prop_assert_eq!(back, x);
    }

    #[test]
    fn nearest_rational_recovers_small_fractions(n in -999i64..1000, d in 1i64..1000) {
        let x = q(n, d);
        prop_assert_eq!(nearest_rational(to_f64(&x), 1_000_000).unwrap(), x);
    }

    #[test]
    fn lp_text_roundtrip_and_exact_feasibility(
        obj in prop::collection::vec(-5i64..6, 3),
        rows in prop::collection::vec((prop::collection::vec(-4i64..5, 3), 0i64..10, 1i64..4), 1..5),
    ) {
        let mut lp = LinearProgram::new(Sense::Max, obj.iter().map(|&v| q(v, 1)).collect());
        for (c, r, den) in &rows {
            lp.push(c.iter().map(|&v| q(v, *den)).collect(), Relation::Le, q(*r, 1));
        }
        for i in 0..3 {
            let mut e = vec![Q::zero(); 3];
            e[i] = q(1, 1);
            lp.push(e, Relation::Le, q(20, 1));
        }
        prop_assert_eq!(parse_lp(&write_lp(&lp)).unwrap(), lp.clone());
        let s = simplex_solve(&lp).unwrap();
        prop_assert_eq!(s.status, LpStatus::Optimal);
        prop_assert!(lp.feasible(&s.vertex));
        prop_assert_eq!(lp.objective_value(&s.vertex), s.value);
    }

    #[test]
    fn distributions_are_probabilities(dims in dims_strategy(), raw in prop::collection::vec(-1.0f64..1.0, 16)) {
        let d = Dims::new(dims.clone()).unwrap();
        let conv = if dims.iter().all(|&k| k == 2) { Convention::QubitPauli } else { Convention::GenericPhaseShift };
        let basis = build_bell_basis(&d, conv).unwrap();
        let g = ProductState::normalized(factors(&dims, &raw));
        prop_assume!(g.is_ok());
        let dist = distribution(&basis, &g.unwrap()).unwrap();
        prop_assert!((dist.total() - 1.0).abs() < 1e-12);
        let cap = 1.0 / dims[0] as f64;
        prop_assert!(dist.values.iter().all(|&p| p >= -1e-12 && p <= cap + 1e-12));
    }

    #[test]
    fn witnesses_have_unit_trace(x in 1i64..20, r in -40i64..=0) {
        let f = Family::MultiQubitA { n: 3, x: q(x, 20) };
        let basis = f.basis().unwrap();
        let qt: QTable = f.qtable(&basis).unwrap();
        let w = assemble(&WitnessSpec::new(basis, qt, q(r, 10)).unwrap());
        prop_assert!((w.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(w.is_hermitian(1e-12));
    }

    #[test]
    fn critical_r_closes_the_gap(c in 1i64..99) {
        // Tr(W gamma) = r/D + (1 - r) C(gamma) vanishes at C_min when r = r_c.
        let cs = q(c, 100);
        let r = r_critical(&cs).unwrap().unwrap();
        prop_assert!((&r + (q(1, 1) - &r) * &cs).is_zero());
    }
}

#[test]
fn oracle_is_idempotent() {
    let f = Family::ThreeThreeX { x: q(1, 10) };
    let basis = f.basis().unwrap();
    let qt = f.qtable(&basis).unwrap();
    let s = OracleSettings::with_seed(11);
    let a = oracle_min_c(&basis, &qt, &s).unwrap();
    let b = oracle_min_c(&basis, &qt, &s).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.angles, b.angles);
}

#[test]
fn oracle_never_exceeds_catalog_points() {
    for f in [
        Family::MultiQubitA { n: 3, x: q(1, 10) },
        Family::TwoByNA { n: 3, x: q(1, 2) },
        Family::ThreeThreeX { x: q(1, 8) },
        Family::ThreeThreeXPrime { x: q(3, 16) },
    ] {
        let basis = f.basis().unwrap();
        let qt = f.qtable(&basis).unwrap();
        let model = f.model().unwrap();
        let groups = family_groups(&f).unwrap();
        let o = oracle_min_c(&basis, &qt, &OracleSettings::default()).unwrap();
        for cp in extreme_points(&f).unwrap() {
            let coords = coordinates(&basis, &groups, &cp.state).unwrap();
            assert!(o.value <= model.value_f64(&coords) + 1e-12, "{f}");
        }
    }
}

#[test]
fn bell_states_are_mutually_orthogonal_under_local_unitaries() {
    let basis = build_bell_basis(&Dims::new(vec![3, 3]).unwrap(), Convention::GenericPhaseShift).unwrap();
    let u = bdew::spectral::local_unitary(2, 1).unwrap();
    let moved: Vec<Vec<C64>> = basis.states().iter().map(|s| u.apply(s).unwrap()).collect();
    for s in &moved {
        let hits = basis
            .states()
            .iter()
            .filter(|t| t.iter().zip(s).map(|(a, b)| a.conj() * b).sum::<C64>().norm() > 1.0 - 1e-12)
            .count();
        assert_eq!(hits, 1);
    }
}
