//! First-order forward-mode numbers: a value with its gradient over a fixed
//! number of seed variables, in double or double-double precision.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use twofloat::TwoFloat;

pub(crate) trait Real:
    Copy + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn div(self, o: Self) -> Self;
    fn sqrt(self) -> Self;

    fn powi(self, n: u32) -> Self {
        let (mut acc, mut base, mut n) = (Self::from_f64(1.0), self, n);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> f64 {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn div(self, o: f64) -> f64 {
        self / o
    }

    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
}

impl Real for TwoFloat {
    fn from_f64(v: f64) -> TwoFloat {
        TwoFloat::from(v)
    }

    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }

    fn div(self, o: TwoFloat) -> TwoFloat {
        div(self, o)
    }

    fn sqrt(self) -> TwoFloat {
        TwoFloat::sqrt(self)
    }
}

/// Double-double quotient refined by two correction steps; the `twofloat`
/// division only carries about 53 bits.
pub(crate) fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let y = TwoFloat::from(a.hi() / b.hi());
    let y = y + (a - b * y).hi() / b.hi();
    y + (a - b * y).hi() / b.hi()
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Jet<T = f64> {
    pub v: T,
    pub g: Vec<T>,
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T, dim: usize) -> Jet<T> {
        Jet {
            v,
            g: vec![T::from_f64(0.0); dim],
        }
    }

    pub fn variable(v: T, i: usize, dim: usize) -> Jet<T> {
        let mut j = Jet::constant(v, dim);
        j.g[i] = T::from_f64(1.0);
        j
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// Applies a scalar function given its value and derivative at `self.v`.
    fn chain(&self, f0: T, f1: T) -> Jet<T> {
        Jet {
            v: f0,
            g: self.g.iter().map(|&gi| f1 * gi).collect(),
        }
    }

    pub fn sqrt(&self) -> Jet<T> {
        let s = self.v.sqrt();
        self.chain(s, T::from_f64(0.5).div(s))
    }

    pub fn recip(&self) -> Jet<T> {
        let r = T::from_f64(1.0).div(self.v);
        self.chain(r, -(r * r))
    }

    pub fn powi(&self, n: u32) -> Jet<T> {
        match n {
            0 => Jet::constant(T::from_f64(1.0), self.dim()),
            1 => self.clone(),
            _ => self.chain(self.v.powi(n), T::from_f64(n as f64) * self.v.powi(n - 1)),
        }
    }

    pub fn scale(&self, c: f64) -> Jet<T> {
        let c = T::from_f64(c);
        Jet {
            v: self.v * c,
            g: self.g.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Jet<T> {
        let mut j = self.clone();
        j.v = j.v + T::from_f64(c);
        j
    }
}

impl<T: Real> Add for &Jet<T> {
    type Output = Jet<T>;

    fn add(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            v: self.v + o.v,
            g: self.g.iter().zip(&o.g).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Jet<T> {
    type Output = Jet<T>;

    fn sub(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            v: self.v - o.v,
            g: self.g.iter().zip(&o.g).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &Jet<T> {
    type Output = Jet<T>;

    fn mul(self, o: &Jet<T>) -> Jet<T> {
        Jet {
            v: self.v * o.v,
            g: self.g.iter().zip(&o.g).map(|(&a, &b)| self.v * b + o.v * a).collect(),
        }
    }
}

impl<T: Real> std::ops::Div for &Jet<T> {
    type Output = Jet<T>;

    fn div(self, o: &Jet<T>) -> Jet<T> {
        self * &o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_closed_form_derivatives() {
        // f(x, y) = sqrt(x) * y^3 / (1 + x y)
        let (x0, y0) = (0.7, 1.3);
        let x = Jet::variable(x0, 0, 2);
        let y = Jet::variable(y0, 1, 2);
        let f = &(&x.sqrt() * &y.powi(3)) / &(&x * &y).add_const(1.0);

        let func = |x: f64, y: f64| x.sqrt() * y.powi(3) / (1.0 + x * y);
        let h = 1e-5;
        let fx = (func(x0 + h, y0) - func(x0 - h, y0)) / (2.0 * h);
        let fy = (func(x0, y0 + h) - func(x0, y0 - h)) / (2.0 * h);

        assert!((f.v - func(x0, y0)).abs() < 1e-14);
        assert!((f.g[0] - fx).abs() < 1e-8);
        assert!((f.g[1] - fy).abs() < 1e-8);
    }

    #[test]
    fn double_double_resolves_cancellation() {
        // sqrt(1 - (1 - d)) for d far below double precision
        let x = Jet::variable(TwoFloat::from(1.0) - TwoFloat::from(1e-24), 0, 1);
        let r = x.scale(-1.0).add_const(1.0).sqrt();
        assert!((r.v.to_f64() - 1e-12).abs() < 1e-24);
        assert!((r.g[0].to_f64() + 0.5e12).abs() < 1e-3);
    }
}
