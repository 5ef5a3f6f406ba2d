//! Second-order forward-mode dual numbers.
//!
//! A [`Dual2`] carries a value together with its first and second derivative
//! with respect to a single variable. Arithmetic propagates both derivatives
//! exactly (up to rounding), which the shape checks rely on for logconvexity
//! tests where finite differences of finite differences would be too noisy.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Dual2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Self::new(v, 0.0, 0.0)
    }

    /// The independent variable itself at `t`.
    pub const fn variable(t: f64) -> Self {
        Self::new(t, 1.0, 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Self::new(e, e * self.d1, e * (self.d2 + self.d1 * self.d1))
    }

    /// Natural log. The caller is responsible for checking `v > 0`.
    pub fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        Self::new(
            self.v.ln(),
            self.d1 * inv,
            self.d2 * inv - self.d1 * self.d1 * inv * inv,
        )
    }

    /// `self^p` for a constant real exponent.
    ///
    /// Terms whose coefficient vanishes are skipped so that e.g. `t^1` or
    /// `t^2` at `t = 0` do not produce `0 * inf`.
    pub fn powf_const(self, p: f64) -> Self {
        if p == 0.0 {
            return Self::constant(1.0);
        }
        if p == 1.0 {
            return self;
        }
        let integer = p.fract() == 0.0 && p.abs() < i32::MAX as f64;
        let pw = |e: f64| {
            if integer {
                self.v.powi(e as i32)
            } else {
                self.v.powf(e)
            }
        };
        let v = pw(p);
        let dp1 = pw(p - 1.0);
        let d1 = p * dp1 * self.d1;
        let mut d2 = p * dp1 * self.d2;
        let c2 = p * (p - 1.0);
        if c2 != 0.0 && self.d1 != 0.0 {
            d2 += c2 * pw(p - 2.0) * self.d1 * self.d1;
        }
        Self::new(v, d1, d2)
    }
}

impl From<f64> for Dual2 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for Dual2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Dual2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Dual2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Dual2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        let q1 = (self.d1 - q * o.d1) / o.v;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v;
        Self::new(q, q1, q2)
    }
}

impl Neg for Dual2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn quotient_second_derivative() {
        // t / (1 + t) at t = 1: f' = 1/(1+t)^2 = 1/4, f'' = -2/(1+t)^3 = -1/4
        let t = Dual2::variable(1.0);
        let f = t / (Dual2::constant(1.0) + t);
        assert!(close(f.v, 0.5));
        assert!(close(f.d1, 0.25));
        assert!(close(f.d2, -0.25));
    }

    #[test]
    fn ln_and_exp_chain() {
        // exp(-t^2/2) at t = 1: f' = -t f, f'' = (t^2 - 1) f
        let t = Dual2::variable(1.0);
        let f = (-(t * t) / Dual2::constant(2.0)).exp();
        let e = (-0.5f64).exp();
        assert!(close(f.v, e));
        assert!(close(f.d1, -e));
        assert!(close(f.d2, 0.0));
        let g = f.ln();
        assert!(close(g.v, -0.5));
        assert!(close(g.d1, -1.0));
        assert!(close(g.d2, -1.0));
    }

    #[test]
    fn integer_power_at_zero() {
        let t = Dual2::variable(0.0);
        let sq = t.powf_const(2.0);
        assert_eq!((sq.v, sq.d1, sq.d2), (0.0, 0.0, 2.0));
        let cube = t.powf_const(3.0);
        assert_eq!((cube.v, cube.d1, cube.d2), (0.0, 0.0, 0.0));
        let one = t.powf_const(1.0);
        assert_eq!(one, t);
    }
}
