//! Scalar abstraction for the numerical kernel.
//!
//! All series and coefficient evaluations are generic over [`Scalar`], so the
//! same code runs at `f32`, `f64` and at the software double-double type
//! [`DoubleDouble`]. The latter carries roughly 31 significant digits and is
//! used as the extended-precision oracle path (`QUADLIN_PRECISION=extended`).

#![allow(clippy::excessive_precision)] // double-double constants carry both words

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

/// Floating-point scalar usable by the theta series and coefficient families.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Default relative accuracy target for truncated q-series.
    fn theta_epsilon() -> Self {
        Self::epsilon() * Self::from_f64(450.0).unwrap()
    }

    /// Lossy conversion used for reporting and geometric tolerances.
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

// ---------------------------------------------------------------------------
// Double-double arithmetic
// ---------------------------------------------------------------------------

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

/// Unevaluated sum of two `f64` words, `hi + lo` with `|lo| <= ulp(hi)/2`.
///
/// Implements enough of `num_traits::Float` to drive the generic q-series and
/// coefficient code at ~31 significant digits. Transcendental functions are
/// accurate to a few ulps of the double-double format, which is far beyond
/// what the oracle comparisons need.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

pub type Dd = DoubleDouble;

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    const PI: Self = Self {
        hi: 3.141592653589793116e0,
        lo: 1.224646799147353207e-16,
    };
    const TWO_PI: Self = Self {
        hi: 6.283185307179586232e0,
        lo: 2.449293598294706414e-16,
    };
    const FRAC_PI_2: Self = Self {
        hi: 1.570796326794896558e0,
        lo: 6.123233995736766036e-17,
    };
    const E: Self = Self {
        hi: 2.718281828459045091e0,
        lo: 1.445646891729250158e-16,
    };
    const LN_2: Self = Self {
        hi: 6.931471805599452862e-1,
        lo: 2.319046813846299558e-17,
    };
    const LN_10: Self = Self {
        hi: 2.302585092994045901e0,
        lo: -2.170756223382249351e-16,
    };
    const SQRT_2: Self = Self {
        hi: 1.414213562373095145e0,
        lo: -9.667293313452913451e-17,
    };
    const EPS: f64 = 4.93038065763132e-32; // 2^-104

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Self { hi: s, lo: e }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn mul_pwr2(self, p: f64) -> Self {
        Self {
            hi: self.hi * p,
            lo: self.lo * p,
        }
    }

    fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (s, e) = quick_two_sum(p1, p2);
        Self { hi: s, lo: e }
    }

    fn nint(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (s, e) = quick_two_sum(hi, lo);
            return Self { hi: s, lo: e };
        }
        // hi.round() breaks ties away from zero; lo decides exact half cases.
        if (hi - self.hi).abs() == 0.5 {
            if self.lo < 0.0 && hi > self.hi {
                return Self {
                    hi: hi - 1.0,
                    lo: 0.0,
                };
            }
            if self.lo > 0.0 && hi < self.hi {
                return Self {
                    hi: hi + 1.0,
                    lo: 0.0,
                };
            }
        }
        Self { hi, lo: 0.0 }
    }

    /// exp(x) - 1 via scaled Taylor series, for the reduced range |x| <= ln2/2.
    fn expm1_reduced(self) -> Self {
        // Scale down by 2^9, Taylor, then square back up in the m1 form.
        let k = 512.0;
        let r = self.mul_pwr2(1.0 / k);
        let mut term = r;
        let mut sum = r;
        let mut fact = 1.0f64;
        for n in 2..32 {
            fact *= n as f64;
            term = term * r;
            let contrib = term / Self::from_f64(fact);
            sum = sum + contrib;
            if contrib.abs_f64() < Self::EPS {
                break;
            }
        }
        // (1+s)^2 - 1 = s^2 + 2s, applied log2(k) = 9 times
        let mut s = sum;
        for _ in 0..9 {
            s = s.sqr() + s.mul_pwr2(2.0);
        }
        s
    }

    fn abs_f64(self) -> f64 {
        self.hi.abs()
    }

    fn sin_taylor(self) -> Self {
        // |self| <= pi/4
        if self.hi == 0.0 {
            return Self::ZERO;
        }
        let x2 = self.sqr();
        let mut term = self;
        let mut sum = self;
        let mut n = 1.0f64;
        loop {
            term = term * x2 / Self::from_f64(-((n + 1.0) * (n + 2.0)));
            sum = sum + term;
            n += 2.0;
            if term.abs_f64() < Self::EPS * sum.abs_f64().max(1e-300) || n > 60.0 {
                break;
            }
        }
        sum
    }

    fn cos_taylor(self) -> Self {
        let x2 = self.sqr();
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        let mut n = 0.0f64;
        loop {
            term = term * x2 / Self::from_f64(-((n + 1.0) * (n + 2.0)));
            sum = sum + term;
            n += 2.0;
            if term.abs_f64() < Self::EPS || n > 60.0 {
                break;
            }
        }
        sum
    }

    fn sin_cos_dd(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            return (Self::from_f64(f64::NAN), Self::from_f64(f64::NAN));
        }
        // Reduce modulo 2*pi, then modulo pi/2.
        let t = self - Self::TWO_PI * (self / Self::TWO_PI).nint();
        let q = (t / Self::FRAC_PI_2).nint();
        let r = t - Self::FRAC_PI_2 * q;
        let (s, c) = (r.sin_taylor(), r.cos_taylor());
        match (q.to_f64() as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi + self.lo)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Self { hi: s1, lo: s2 }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, rhs.hi);
        p2 += self.hi * rhs.lo + self.lo * rhs.hi;
        let (s, e) = quick_two_sum(p1, p2);
        Self { hi: s, lo: e }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        if !q1.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - rhs * Self::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Self { hi: s, lo: e } + Self::from_f64(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let n = (self / rhs).trunc();
        self - rhs * n
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}
impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}
impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}
impl RemAssign for DoubleDouble {
    fn rem_assign(&mut self, rhs: Self) {
        *self = *self % rhs;
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(str: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(str, radix).map(Self::from_f64)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        self.to_f64().map(|x| x as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_f64().map(|x| x as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        // Exact for |n| < 2^53; split otherwise.
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Some(Self::new(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = n.wrapping_sub(hi as u64) as i64 as f64;
        Some(Self::new(hi, lo))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Self::from_f64(n))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(Self::from_f64)
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self::from_f64(f64::NAN)
    }
    fn infinity() -> Self {
        Self::from_f64(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::from_f64(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::from_f64(-0.0)
    }
    fn min_value() -> Self {
        Self::from_f64(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Self::from_f64(f64::MIN_POSITIVE)
    }
    fn max_value() -> Self {
        Self::from_f64(f64::MAX)
    }
    fn epsilon() -> Self {
        Self::from_f64(Self::EPS)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (s, e) = quick_two_sum(hi, self.lo.floor());
            Self { hi: s, lo: e }
        } else {
            Self { hi, lo: 0.0 }
        }
    }
    fn ceil(self) -> Self {
        -((-self).floor())
    }
    fn round(self) -> Self {
        self.nint()
    }
    fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        if self.is_zero() {
            Self::ZERO
        } else if self.hi < 0.0 {
            -Self::ONE
        } else {
            Self::ONE
        }
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::ONE / self
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }
    fn powf(self, n: Self) -> Self {
        if self.is_zero() {
            return if n.is_zero() { Self::ONE } else { Self::ZERO };
        }
        (self.ln() * n).exp()
    }
    fn sqrt(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        if self.hi < 0.0 {
            return Self::nan();
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = Self::from_f64(self.hi * x);
        ax + (self - ax.sqr()).mul_pwr2(x * 0.5)
    }
    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::infinity();
        }
        if self.hi < -709.0 {
            return Self::ZERO;
        }
        let m = (self / Self::LN_2).nint();
        let r = self - Self::LN_2 * m;
        let em1 = r.expm1_reduced();
        let e = em1 + Self::ONE;
        let scale = 2f64.powi(m.to_f64() as i32);
        e.mul_pwr2(scale)
    }
    fn exp2(self) -> Self {
        (self * Self::LN_2).exp()
    }
    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return if self.is_zero() {
                Self::neg_infinity()
            } else {
                Self::nan()
            };
        }
        // Newton refinement of the f64 seed: y' = y + x*exp(-y) - 1
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn log2(self) -> Self {
        self.ln() / Self::LN_2
    }
    fn log10(self) -> Self {
        self.ln() / Self::LN_10
    }
    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::ZERO
        }
    }
    fn cbrt(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = self.signum();
        let a = self.abs();
        let mut y = Self::from_f64(a.hi.cbrt());
        for _ in 0..2 {
            y = y + (a / y.sqr() - y) / Self::from_f64(3.0);
        }
        sign * y
    }
    fn hypot(self, other: Self) -> Self {
        (self.sqr() + other.sqr()).sqrt()
    }
    fn sin(self) -> Self {
        self.sin_cos_dd().0
    }
    fn cos(self) -> Self {
        self.sin_cos_dd().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos_dd();
        s / c
    }
    fn asin(self) -> Self {
        // f64 seed plus one Newton step through sin.
        let mut y = Self::from_f64(self.to_f64().asin());
        let c = y.cos();
        if c.abs_f64() > 1e-8 {
            y = y + (self - y.sin()) / c;
        }
        y
    }
    fn acos(self) -> Self {
        Self::FRAC_PI_2 - self.asin()
    }
    fn atan(self) -> Self {
        self.atan2(Self::ONE)
    }
    fn atan2(self, other: Self) -> Self {
        let seed = self.to_f64().atan2(other.to_f64());
        if !seed.is_finite() {
            return Self::from_f64(seed);
        }
        let mut t = Self::from_f64(seed);
        // Newton on f(t) = sin(t)*x - cos(t)*y with r = hypot
        let r = self.hypot(other);
        if r.is_zero() {
            return Self::ZERO;
        }
        let (y, x) = (self / r, other / r);
        for _ in 0..2 {
            let (st, ct) = t.sin_cos_dd();
            t = t + (y * ct - x * st);
        }
        t
    }
    fn sin_cos(self) -> (Self, Self) {
        self.sin_cos_dd()
    }
    fn exp_m1(self) -> Self {
        if self.abs_f64() < 0.34 {
            let m = (self / Self::LN_2).nint();
            if m.is_zero() {
                return self.expm1_reduced();
            }
        }
        self.exp() - Self::ONE
    }
    fn ln_1p(self) -> Self {
        (Self::ONE + self).ln()
    }
    fn sinh(self) -> Self {
        if self.abs_f64() < 0.05 {
            // Taylor to avoid cancellation near zero.
            let x2 = self.sqr();
            let mut term = self;
            let mut sum = self;
            let mut n = 1.0f64;
            for _ in 0..12 {
                term = term * x2 / Self::from_f64((n + 1.0) * (n + 2.0));
                sum = sum + term;
                n += 2.0;
                if term.abs_f64() < Self::EPS {
                    break;
                }
            }
            sum
        } else {
            let e = self.exp();
            (e - e.recip()).mul_pwr2(0.5)
        }
    }
    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()).mul_pwr2(0.5)
    }
    fn tanh(self) -> Self {
        let e2 = (self.mul_pwr2(2.0)).exp();
        (e2 - Self::ONE) / (e2 + Self::ONE)
    }
    fn asinh(self) -> Self {
        (self + (self.sqr() + Self::ONE).sqrt()).ln()
    }
    fn acosh(self) -> Self {
        (self + (self.sqr() - Self::ONE).sqrt()).ln()
    }
    fn atanh(self) -> Self {
        ((Self::ONE + self) / (Self::ONE - self)).ln().mul_pwr2(0.5)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
    fn to_degrees(self) -> Self {
        self * (Self::from_f64(180.0) / Self::PI)
    }
    fn to_radians(self) -> Self {
        self * (Self::PI / Self::from_f64(180.0))
    }
}

impl FloatConst for DoubleDouble {
    fn E() -> Self {
        Self::E
    }
    fn FRAC_1_PI() -> Self {
        Self::ONE / Self::PI
    }
    fn FRAC_1_SQRT_2() -> Self {
        Self::SQRT_2.mul_pwr2(0.5)
    }
    fn FRAC_2_PI() -> Self {
        Self::from_f64(2.0) / Self::PI
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Self::from_f64(2.0) / Self::PI.sqrt()
    }
    fn FRAC_PI_2() -> Self {
        Self::FRAC_PI_2
    }
    fn FRAC_PI_3() -> Self {
        Self::PI / Self::from_f64(3.0)
    }
    fn FRAC_PI_4() -> Self {
        Self::PI.mul_pwr2(0.25)
    }
    fn FRAC_PI_6() -> Self {
        Self::PI / Self::from_f64(6.0)
    }
    fn FRAC_PI_8() -> Self {
        Self::PI.mul_pwr2(0.125)
    }
    fn LN_10() -> Self {
        Self::LN_10
    }
    fn LN_2() -> Self {
        Self::LN_2
    }
    fn LOG10_E() -> Self {
        Self::ONE / Self::LN_10
    }
    fn LOG2_E() -> Self {
        Self::ONE / Self::LN_2
    }
    fn PI() -> Self {
        Self::PI
    }
    fn SQRT_2() -> Self {
        Self::SQRT_2
    }
    fn TAU() -> Self {
        Self::TWO_PI
    }
}

impl Scalar for DoubleDouble {}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> Dd {
        Dd::from_f64(x)
    }

    #[test]
    fn arithmetic_keeps_extra_bits() {
        let a = dd(1.0) / dd(3.0);
        let resid = a * dd(3.0) - dd(1.0);
        assert!(resid.abs_f64() < 1e-31, "resid = {:?}", resid);
        let b = dd(1e16) + dd(1.0) - dd(1e16);
        assert_eq!(b.to_f64(), 1.0);
    }

    #[test]
    fn sqrt_exp_ln_roundtrip() {
        let x = dd(2.0);
        let r = x.sqrt();
        assert!((r.sqr() - x).abs_f64() < 1e-31);
        let y = dd(0.7).exp();
        // exp of the binary double nearest 0.7
        assert!((y - Dd::new(2.0137527074704766, -2.0058243549764793e-16)).abs_f64() < 1e-30);
        assert!((y.ln() - dd(0.7)).abs_f64() < 1e-30);
    }

    #[test]
    fn trig_values() {
        // sin(1) = 0.84147098480789650665250232163029899962256...
        let s = dd(1.0).sin();
        assert!((s - Dd::new(0.8414709848078965, 1.776845092935536e-18)).abs_f64() < 1e-30);
        let (s2, c2) = dd(10.5).sin_cos();
        assert!((s2.sqr() + c2.sqr() - Dd::ONE).abs_f64() < 1e-30);
        // atan2 consistency
        let t = dd(0.3).atan2(dd(1.2));
        assert!((t.tan() - dd(0.25)).abs_f64() < 1e-29);
    }

    #[test]
    fn powi_and_rounding() {
        assert!((dd(3.0).powi(7) - dd(2187.0)).abs_f64() == 0.0);
        assert_eq!(dd(2.5).round().to_f64(), 3.0);
        assert_eq!(dd(-2.5).round().to_f64(), -3.0);
        assert_eq!(dd(1.9).floor().to_f64(), 1.0);
    }
}
