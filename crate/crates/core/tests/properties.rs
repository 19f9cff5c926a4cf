//! Randomized invariants.

mod common;

use std::sync::Arc;

use common::{catalog, interval};
use kgsae::spectral::greens_function_with_root;
use kgsae::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn discrete_specs() -> Vec<Problem> {
    catalog().into_iter().filter(|(_, p)| p.manifold.closure(0).unwrap().1.is_finite()).map(|(_, p)| p).collect()
}

fn bump_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3..0.7f64, 0.05..0.25f64, -2.0..2.0f64)
}

fn data(p: &Problem, a: (f64, f64, f64), b: (f64, f64, f64)) -> CauchyData {
    CauchyData::new(&p.manifold, Profile::bump(make_bump(a.0, a.1, a.2)), Profile::bump(make_bump(b.0, b.1, b.2))).unwrap()
}

fn grid() -> Vec<Point> {
    (0..20).map(|i| Point::on_first(0.05 * i as f64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn evolution_is_linear(
        spec in 0usize..8, a in bump_strategy(), b in bump_strategy(), c in bump_strategy(),
        s in -2.0..2.0f64, r in -2.0..2.0f64, t in -1.5..1.5f64,
    ) {
        let p = &discrete_specs()[spec];
        let (u, v) = (data(p, a, b), data(p, c, a));
        let w = u.combine(&p.manifold, s, &v, r);
        let basis = Arc::new(Basis::for_data(p, &[&u, &v, &w], BasisOptions::with_horizon(t)).unwrap());
        let field = |d: &CauchyData| Solution::new(basis.clone(), d).unwrap().field(t, &grid()).unwrap();
        let (fu, fv, fw) = (field(&u), field(&v), field(&w));
        for i in 0..fw.phi.len() {
            let lin = fu.phi[i] * s + fv.phi[i] * r;
            prop_assert!((fw.phi[i] - lin).norm() <= 1e-10 * (1.0 + lin.norm()));
            let lin = fu.phidot[i] * s + fv.phidot[i] * r;
            prop_assert!((fw.phidot[i] - lin).norm() <= 1e-9 * (1.0 + lin.norm()));
        }
    }

    #[test]
    fn forms_are_hermitian_and_antisymmetric(
        spec in 0usize..8, a in bump_strategy(), b in bump_strategy(), t in -3.0..3.0f64,
    ) {
        let p = &discrete_specs()[spec];
        let (u, v) = (data(p, a, b), data(p, b, a));
        let basis = Arc::new(Basis::for_data(p, &[&u, &v], BasisOptions::with_horizon(t)).unwrap());
        let su = Solution::new(basis.clone(), &u).unwrap().state(t).unwrap();
        let sv = Solution::new(basis.clone(), &v).unwrap().state(t).unwrap();
        let (e1, e2) = (energy(&basis, &su, &sv).unwrap(), energy(&basis, &sv, &su).unwrap());
        let (s1, s2) = (symplectic(&basis, &su, &sv).unwrap(), symplectic(&basis, &sv, &su).unwrap());
        prop_assert!((e1 - e2.conj()).norm() <= 1e-10 * (1.0 + e1.norm()));
        prop_assert!((s1 + s2.conj()).norm() <= 1e-10 * (1.0 + s1.norm()));
        prop_assert!(symplectic(&basis, &su, &su).unwrap().re.abs() <= 1e-10);
    }

    #[test]
    fn time_reversal(spec in 0usize..8, a in bump_strategy(), b in bump_strategy(), t in 0.0..1.5f64) {
        let p = &discrete_specs()[spec];
        let u = data(p, a, b);
        let fwd = evolve(p, &u, -t, &grid()).unwrap();
        let back = evolve(p, &u.reversed(), t, &grid()).unwrap();
        for i in 0..fwd.phi.len() {
            prop_assert!((fwd.phi[i] - back.phi[i]).norm() <= 1e-10);
            prop_assert!((fwd.phidot[i] + back.phidot[i]).norm() <= 1e-9);
        }
    }

    #[test]
    fn resolvent_is_symmetric_under_conjugation(
        spec in 0usize..11, x in 0.05..0.95f64, y in 0.05..0.95f64, re in -5.0..20.0f64, im in 0.1..5.0f64,
    ) {
        let p = &catalog()[spec].1;
        let l = Complex64::new(re, im);
        let g = greens_function(p, Point::on_first(x), Point::on_first(y), l).unwrap();
        let h = greens_function(p, Point::on_first(y), Point::on_first(x), l.conj()).unwrap();
        prop_assert!((g - h.conj()).norm() <= 1e-11 * (1.0 + g.norm()));
    }

    #[test]
    fn kernels_do_not_depend_on_the_root(
        spec in 0usize..7, x in 0.0..1.0f64, y in 0.0..1.0f64, re in -5.0..20.0f64, im in -5.0..5.0f64,
    ) {
        prop_assume!(im.abs() > 1e-3);
        let p = &discrete_specs()[spec];
        let root = Complex64::new(re, im).sqrt();
        let (x, y) = (Point::on_first(x), Point::on_first(y));
        let a = greens_function_with_root(p, x, y, root).unwrap();
        let b = greens_function_with_root(p, x, y, -root).unwrap();
        prop_assert!((a - b).norm() <= 1e-11 * (1.0 + a.norm()));
    }

    #[test]
    fn eigenvalue_condition_vanishes_on_found_eigenvalues(t11 in -2.0..2.0f64, t22 in -2.0..2.0f64, re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let p = interval(1.0, Extension::first_kind(t11, t22, Complex64::new(re, im)));
        let found = find_eigenvalues(&p, Window::lowest(6)).unwrap();
        prop_assert!(found.iter().filter(|e| e.lambda < 0.0).count() <= 2);
        for e in found {
            prop_assert!(!eigenfunction(&p, e.lambda).unwrap().is_empty());
        }
    }

    #[test]
    fn causal_slices_grow_with_time(lo in 0.1..0.5f64, w in 0.0..0.3f64, t1 in 0.0..1.0f64, dt in 0.0..1.0f64) {
        let m = Manifold::Interval { length: 1.0 };
        let k = SpatialSet::interval(&m, lo, lo + w).unwrap();
        let a = causal_slice(&m, &k, t1).unwrap().set;
        let b = causal_slice(&m, &k, t1 + dt).unwrap().set;
        prop_assert!(a.is_subset_of(&b));
        prop_assert!(k.is_subset_of(&a));
    }
}
