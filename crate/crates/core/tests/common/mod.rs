#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use kgsae::{make_bump, CauchyData, Extension, Manifold, Problem, Profile};
use num_complex::Complex64;

pub fn interval(a: f64, e: Extension) -> Problem {
    Problem::new(Manifold::Interval { length: a }, e).unwrap()
}

/// One representative of every kind of extension in the catalog.
pub fn catalog() -> Vec<(&'static str, Problem)> {
    vec![
        ("dirichlet", interval(1.0, Extension::IntervalDirichlet)),
        ("neumann", interval(1.0, Extension::neumann())),
        ("first_kind", interval(1.0, Extension::first_kind(0.3, -0.2, Complex64::new(0.4, 0.7)))),
        ("off_diagonal", interval(1.0, Extension::first_kind(0.0, 0.0, Complex64::new(1.0, 0.0)))),
        (
            "second_kind",
            interval(1.0, Extension::second_kind(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 1.5)),
        ),
        (
            "periodic",
            interval(1.0, Extension::second_kind(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0), 0.0)),
        ),
        ("circle", Problem::new(Manifold::Circle { circumference: 1.0 }, Extension::CircleClosure).unwrap()),
        ("robin", Problem::new(Manifold::HalfLine, Extension::robin(0.5)).unwrap()),
        ("robin_bound", Problem::new(Manifold::HalfLine, Extension::robin(-FRAC_PI_4)).unwrap()),
        ("massive_dirichlet", interval(1.0, Extension::IntervalDirichlet.mass_shift(2.0))),
        (
            "direct_sum",
            Problem::new(
                Manifold::DisjointHalfLines { count: 2 },
                Extension::DirectSum { components: vec![Extension::robin(-0.5), Extension::robin(0.3)] },
            )
            .unwrap(),
        ),
    ]
}

/// Smooth bump data centered in the unit cell of every component.
pub fn bump_data(p: &Problem) -> CauchyData {
    let mut phi = Profile::zero();
    let mut phidot = Profile::zero();
    for c in 0..p.manifold.component_count() {
        phi = phi.plus(Profile::bump(kgsae::Bump::on(c, 0.5, 0.25, 1.0)));
        phidot = phidot.plus(Profile::bump(kgsae::Bump::on(c, 0.45, 0.2, 0.5)));
    }
    CauchyData::new(&p.manifold, phi, phidot).unwrap()
}

/// A second, independent data set.
pub fn other_data(p: &Problem) -> CauchyData {
    let mut phi = Profile::zero();
    let mut phidot = Profile::zero();
    for c in 0..p.manifold.component_count() {
        phi = phi.plus(Profile::bump(kgsae::Bump::on(c, 0.6, 0.2, -0.7)));
        phidot = phidot.plus(Profile::bump(kgsae::Bump::on(c, 0.5, 0.3, 1.1)));
    }
    CauchyData::new(&p.manifold, phi, phidot).unwrap()
}

pub fn bump(center: f64, hw: f64, amp: f64) -> Profile {
    Profile::bump(make_bump(center, hw, amp))
}

/// Wide bumps on every component, with quickly decaying transforms.
pub fn wide_bump_data(p: &Problem) -> CauchyData {
    let mut phi = Profile::zero();
    let mut phidot = Profile::zero();
    for c in 0..p.manifold.component_count() {
        phi = phi.plus(Profile::bump(kgsae::Bump::on(c, 1.5, 0.8, 1.0)));
        phidot = phidot.plus(Profile::bump(kgsae::Bump::on(c, 1.4, 0.6, 0.5)));
    }
    CauchyData::new(&p.manifold, phi, phidot).unwrap()
}
