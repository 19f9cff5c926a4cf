//! Forward-mode dual numbers, used to get exact derivatives of the
//! characteristic functions during root isolation.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub const fn new(v: f64, d: f64) -> Self {
        Dual { v, d }
    }

    pub const fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }

    pub const fn variable(v: f64) -> Self {
        Dual { v, d: 1.0 }
    }

    pub fn sin(self) -> Self {
        Dual::new(self.v.sin(), self.d * self.v.cos())
    }

    pub fn cos(self) -> Self {
        Dual::new(self.v.cos(), -self.d * self.v.sin())
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Dual::new(e, self.d * e)
    }

    pub fn exp_m1(self) -> Self {
        Dual::new(self.v.exp_m1(), self.d * self.v.exp())
    }

    pub fn scale(self, k: f64) -> Self {
        Dual::new(self.v * k, self.d * k)
    }
}

impl From<f64> for Dual {
    fn from(v: f64) -> Self {
        Dual::constant(v)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, o: f64) -> Dual {
        Dual::new(self.v + o, self.d)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    fn sub(self, o: f64) -> Dual {
        Dual::new(self.v - o, self.d)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, o: f64) -> Dual {
        self.scale(o)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.v / o.v;
        Dual::new(q, (self.d - q * o.d) / o.v)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.v, -self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sinc_matches_closed_form() {
        let a = 1.7;
        for &s in &[0.3, 1.0, 4.2] {
            let x = Dual::variable(s);
            let f = (x * a).sin() / x;
            let exact = (a * s * (a * s).cos() - (a * s).sin()) / (s * s);
            assert!((f.d - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn chain_rule_through_exp() {
        let x = Dual::variable(0.4);
        let f = (x * x).exp_m1();
        assert!((f.d - 2.0 * 0.4 * (0.16f64).exp()).abs() < 1e-15);
    }
}
