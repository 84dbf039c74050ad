//! Forward-mode dual numbers `a + b ε`, `ε² = 0`.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub const fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }

    pub const fn constant(re: f64) -> Self {
        Dual { re, eps: 0.0 }
    }

    pub fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, e * self.eps)
    }

    pub fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.re.cos() * self.eps)
    }

    pub fn cos(self) -> Self {
        Dual::new(self.re.cos(), -self.re.sin() * self.eps)
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::constant(1.0);
        }
        Dual::new(self.re.powi(n), n as f64 * self.re.powi(n - 1) * self.eps)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.eps.is_finite()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual::new(self.re / o.re, (self.eps * o.re - self.re * o.eps) / (o.re * o.re))
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}
