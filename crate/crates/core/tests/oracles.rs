//! Reference values from `tests/oracle/derive.py`, an independent
//! arbitrary-precision solve of the boundary-value problems.

mod common;

use common::catalog;
use kgsae::{find_eigenvalues, greens_function, Point, Problem, Window};
use num_complex::Complex64;

fn named(name: &str) -> Problem {
    catalog().into_iter().find(|(n, _)| *n == name).unwrap().1
}

fn assert_eigenvalues(name: &str, expected: &[f64]) {
    let found = find_eigenvalues(&named(name), Window::lowest(expected.len())).unwrap();
    assert_eq!(found.len(), expected.len());
    for (f, e) in found.iter().zip(expected) {
        assert!((f.lambda - e).abs() <= 1e-10 * e.abs().max(1.0), "{name}: {} vs {e}", f.lambda);
        assert_eq!(f.multiplicity, 1);
    }
}

#[test]
fn first_kind_eigenvalues() {
    assert_eigenvalues(
        "first_kind",
        &[0.21179105108675266, 8.5116251908491169, 41.232639695289722, 87.430358751029081, 159.70167340519629, 245.3415014878885],
    );
}

#[test]
fn second_kind_eigenvalues() {
    assert_eigenvalues(
        "second_kind",
        &[4.7289983646511708, 25.036465816510151, 64.616883469727751, 123.86673694007147, 202.83745845811515, 301.54067990906508],
    );
}

fn assert_kernel(p: &Problem, x: f64, y: f64, lambda: Complex64, expected: Complex64) {
    let g = greens_function(p, Point::on_first(x), Point::on_first(y), lambda).unwrap();
    assert!((g - expected).norm() <= 1e-12, "g({x}, {y}; {lambda}) = {g}, expected {expected}");
}

#[test]
fn interval_kernels() {
    let l = Complex64::new(2.0, 1.0);
    let fk = named("first_kind");
    assert_kernel(&fk, 0.3, 0.8, l, Complex64::new(-0.4381254103393177, 0.4435928484940127));
    assert_kernel(&fk, 0.8, 0.3, l, Complex64::new(-0.60724374061653706, -0.0428490862915481));
    let sk = named("second_kind");
    assert_kernel(&sk, 0.3, 0.8, l, Complex64::new(0.30299201876290957, -0.056238301105679084));
    assert_kernel(&sk, 0.8, 0.3, l, Complex64::new(0.16886439028028142, 0.26027217630510236));
}

#[test]
fn robin_kernels() {
    use kgsae::{Extension, Manifold};
    let r = |a: f64| Problem::new(Manifold::HalfLine, Extension::robin(a)).unwrap();
    assert_kernel(&r(0.5), 0.3, 1.1, Complex64::new(-2.0, 1.0), Complex64::new(0.091177334322239854, 0.043938380478132507));
    assert_kernel(&r(-0.7), 0.0, 0.6, Complex64::new(3.0, -2.0), Complex64::new(-0.36944052601477145, -0.053290915900474894));
}
