//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`).
//!
//! Gives roughly 106 bits of mantissa. Arithmetic follows the usual
//! error-free transformations (two-sum, fused-multiply-add two-product);
//! `exp` uses argument reduction by `ln 2` and `2^-10` with an `expm1`
//! doubling ladder, and `ln` is two Newton steps on `exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

/// Inverse factorials 1/2! .. 1/13! are built on demand; the Taylor series
/// only ever needs a dozen terms after reduction to |r| <= ln2/2048.
const TAYLOR_TERMS: usize = 12;
const EXP_HALVINGS: i32 = 10;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Builds from a non-overlapping pair; `lo` must be below half an ulp of `hi`.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn nan() -> Self {
        Dd {
            hi: f64::NAN,
            lo: f64::NAN,
        }
    }

    /// Exact scaling by a power of two.
    fn ldexp(self, k: i32) -> Self {
        // split to stay clear of overflow in the scale factor itself
        let half = k / 2;
        let f1 = 2f64.powi(half);
        let f2 = 2f64.powi(k - half);
        Dd {
            hi: self.hi * f1 * f2,
            lo: self.lo * f1 * f2,
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (h, l) = quick_two_sum(p1, p2);
        Dd { hi: h, lo: l }
    }

    /// `exp(self) - 1` for |self| <= ln2/2 * 2^-10 via Taylor series.
    fn expm1_small(r: Dd) -> Dd {
        let mut sum = r;
        let mut term = r;
        for k in 2..=TAYLOR_TERMS {
            term = term * r / Dd::new(k as f64);
            sum += term;
            if term.hi.abs() <= 1e-34 * sum.hi.abs() {
                break;
            }
        }
        sum
    }

    pub fn exp(self) -> Dd {
        if self.hi.is_nan() {
            return Dd::nan();
        }
        if self.hi > 709.7 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        let r = r.ldexp(-EXP_HALVINGS);
        let mut s = Self::expm1_small(r);
        for _ in 0..EXP_HALVINGS {
            // e^{2r} - 1 = (e^r - 1)(e^r - 1 + 2)
            s = s * (s + Dd::new(2.0));
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi.is_nan() || self.hi < 0.0 {
            return Dd::nan();
        }
        if self.hi == 0.0 {
            return Dd::new(f64::NEG_INFINITY);
        }
        if self.hi.is_infinite() {
            return self;
        }
        if self == Dd::ONE {
            return Dd::ZERO;
        }
        let mut x = Dd::new(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Dd::ONE;
        }
        x
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::nan();
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (p, e) = two_prod(ax, ax);
        let resid = (self - Dd { hi: p, lo: e }).hi;
        let (h, l) = two_sum(ax, resid * x * 0.5);
        Dd { hi: h, lo: l }
    }

    pub fn powf(self, y: Dd) -> Dd {
        if self.hi == 0.0 {
            return if y.hi > 0.0 {
                Dd::ZERO
            } else if y.hi == 0.0 {
                Dd::ONE
            } else {
                Dd::new(f64::INFINITY)
            };
        }
        if y == Dd::ZERO {
            return Dd::ONE;
        }
        (y * self.ln()).exp()
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;

    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (h, l) = quick_two_sum(s1, s2);
        Dd { hi: h, lo: l }
    }
}

impl Neg for Dd {
    type Output = Dd;

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;

    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;

    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (h, l) = quick_two_sum(p1, p2);
        Dd { hi: h, lo: l }
    }
}

impl Div for Dd {
    type Output = Dd;

    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::new(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd { hi: q1, lo: q2 } + Dd::new(q3)
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Dd {
            #[inline]
            fn $m(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

impl Real for Dd {
    const EPSILON: f64 = 4.93038065763132e-32; // 2^-104

    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd::new(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }

    fn ln(self) -> Self {
        Dd::ln(self)
    }

    fn exp(self) -> Self {
        Dd::exp(self)
    }

    fn powf(self, y: Self) -> Self {
        Dd::powf(self, y)
    }

    fn abs(self) -> Self {
        Dd::abs(self)
    }

    fn half() -> Self {
        Dd::new(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference pairs (hi, lo) for the exact binary inputs, 50-digit arithmetic
    fn close(x: Dd, hi: f64, lo: f64, tol: f64) {
        let want = Dd::from_parts(hi, lo);
        let err = ((x - want) / want).abs().to_f64();
        assert!(err <= tol, "{x} vs {want}: rel err {err:e}");
    }

    #[test]
    fn ln_matches_reference() {
        close(
            Dd::new(2.0).ln(),
            std::f64::consts::LN_2,
            2.3190468138462996e-17,
            1e-30,
        );
        close(
            Dd::new(3.0).ln(),
            1.0986122886681098,
            -9.07129723500153e-17,
            1e-30,
        );
        let r = Dd::new(6251.0) / Dd::new(6250.0);
        close(
            r.ln(),
            0.00015998720136516952,
            -4.127571677743562e-21,
            1e-28,
        );
    }

    #[test]
    fn exp_matches_reference() {
        close(
            Dd::ONE.exp(),
            std::f64::consts::E,
            1.4456468917292502e-16,
            1e-30,
        );
        close(
            Dd::new(-7.3).exp(),
            0.0006755387751938444,
            -2.9077504938462766e-20,
            1e-30,
        );
        let em1 = Dd::new(1e-9).exp() - Dd::ONE;
        close(em1, 1.0000000005000001e-09, -7.443897403844588e-26, 1e-22);
    }

    #[test]
    fn sqrt_and_pow_match_reference() {
        close(
            Dd::new(2.0).sqrt(),
            std::f64::consts::SQRT_2,
            -9.667293313452913e-17,
            1e-31,
        );
        close(
            Dd::new(6250.5).powf(Dd::new(0.3)),
            13.764943333254061,
            -8.948023200554448e-17,
            1e-29,
        );
        assert_eq!(Dd::ZERO.powf(Dd::new(0.25)), Dd::ZERO);
    }

    #[test]
    fn division_is_inverse_of_multiplication() {
        let a = Dd::new(1.0) / Dd::new(3.0);
        let back = a * Dd::new(3.0);
        assert!((back - Dd::ONE).abs().to_f64() < 1e-31);
    }

    #[test]
    fn resolves_what_f64_cannot() {
        let big = Dd::new(1e16);
        let x = (big + Dd::ONE) - big;
        assert_eq!(x.to_f64(), 1.0);
    }
}
