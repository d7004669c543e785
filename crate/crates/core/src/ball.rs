//! Midpoint-radius ("ball") arithmetic over binary multiprecision floats.
//!
//! A [`Real`] is a binary float midpoint together with an `f64` radius that
//! bounds the distance to the true value. Radii are accumulated with upward
//! rounding so every ball encloses the exact result of the computation chain.
//! A zero radius means the chain so far was exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu::base::Approximation;
use dashu::float::round::mode::{Down, HalfEven, Up};
use dashu::float::round::Rounded;
use dashu::float::{Context, FBig};
use dashu::integer::IBig;
use dashu::rational::RBig;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Binary multiprecision float used for every midpoint.
pub type Float = FBig<HalfEven, 2>;

/// Significant decimal digits used when rendering intervals.
pub const DECIMAL_DIGITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BallError {
    #[error("logarithm of a ball that is not certified positive (lower bound {0:e})")]
    LogDomain(f64),
    #[error("square root of a ball with negative midpoint")]
    SqrtDomain,
}

// Directed rounding on the f64 radius channel. Round-to-nearest followed by
// one ulp step in the right direction bounds the exact result.

fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.next_up()
    }
}

fn down(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.next_down().max(0.0)
    }
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    up(a + b)
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        up(a * b)
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b <= 0.0 {
        f64::INFINITY
    } else {
        up(a / b)
    }
}

fn sub_down(a: f64, b: f64) -> f64 {
    down(a - b)
}

fn abs_upper(v: &Float) -> f64 {
    if *v == Float::ZERO {
        return 0.0;
    }
    let a = v.to_f64().value().abs();
    if a == 0.0 {
        // underflow: still a valid (coarse) upper bound
        f64::MIN_POSITIVE
    } else {
        up(a)
    }
}

fn abs_lower(v: &Float) -> f64 {
    if *v == Float::ZERO {
        return 0.0;
    }
    down(v.to_f64().value().abs())
}

fn ulp_bound(v: &Float, prec: usize) -> f64 {
    mul_up(abs_upper(v), 2f64.powi(1 - prec as i32))
}

fn settle(r: Rounded<Float>, prec: usize) -> (Float, f64) {
    match r {
        Approximation::Exact(v) => (v, 0.0),
        Approximation::Inexact(v, _) => {
            let e = ulp_bound(&v, prec);
            (v, e)
        }
    }
}

fn ctx(prec: usize) -> Context<HalfEven> {
    Context::new(prec)
}

fn float_from_f64(x: f64) -> Float {
    Float::try_from(x).expect("finite f64")
}

/// A real ball `mid ± rad`.
#[derive(Clone, Debug)]
pub struct Real {
    mid: Float,
    rad: f64,
    prec: usize,
}

impl Real {
    pub fn zero(prec: usize) -> Self {
        Self { mid: Float::ZERO, rad: 0.0, prec }
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::from_ibig(IBig::from(v), prec)
    }

    pub fn from_ibig(v: IBig, prec: usize) -> Self {
        let (mid, rad) = settle(ctx(prec).convert_int::<2>(v), prec);
        Self { mid, rad, prec }
    }

    pub fn from_rational(r: &RBig, prec: usize) -> Self {
        let (mid, rad) = settle(r.to_float::<HalfEven, 2>(prec), prec);
        Self { mid, rad, prec }
    }

    /// Exact conversion of a finite `f64` (re-rounded only if `prec < 53`).
    pub fn from_f64(x: f64, prec: usize) -> Self {
        let (mid, rad) = settle(float_from_f64(x).with_precision(prec), prec);
        Self { mid, rad, prec }
    }

    /// `2^e`, exactly.
    pub fn pow2(e: isize, prec: usize) -> Self {
        Self {
            mid: Float::from_parts(IBig::ONE, e),
            rad: 0.0,
            prec,
        }
    }

    pub fn from_parts(mid: Float, rad: f64, prec: usize) -> Self {
        assert!(rad >= 0.0, "negative radius");
        Self { mid, rad, prec }
    }

    /// The midpoint as an exact ball.
    pub fn center(&self) -> Self {
        Self {
            mid: self.mid.clone(),
            rad: 0.0,
            prec: self.prec,
        }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64().value()
    }

    pub fn is_exact(&self) -> bool {
        self.rad == 0.0
    }

    /// Rigorous upper bound on `|x|` over the ball.
    pub fn upper_abs(&self) -> f64 {
        add_up(abs_upper(&self.mid), self.rad)
    }

    /// Rigorous lower bound on `|x|` over the ball (0 when the ball meets 0).
    pub fn lower_abs(&self) -> f64 {
        sub_down(abs_lower(&self.mid), self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.lower_abs() == 0.0
    }

    pub fn is_positive(&self) -> bool {
        self.mid.repr().sign() == dashu::base::Sign::Positive
            && self.mid != Float::ZERO
            && self.lower_abs() > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.mid.repr().sign() == dashu::base::Sign::Negative && self.lower_abs() > 0.0
    }

    /// True when the two balls intersect.
    pub fn overlaps(&self, other: &Real) -> bool {
        (self - other).contains_zero()
    }

    /// Widen the radius by `extra`.
    pub fn inflate(&self, extra: f64) -> Self {
        Self {
            mid: self.mid.clone(),
            rad: add_up(self.rad, extra),
            prec: self.prec,
        }
    }

    /// Re-round the midpoint to `prec` bits.
    pub fn with_prec(&self, prec: usize) -> Self {
        let (mid, e) = settle(self.mid.clone().with_precision(prec), prec);
        Self {
            mid,
            rad: add_up(self.rad, e),
            prec,
        }
    }

    pub fn abs(&self) -> Self {
        let mut out = self.clone();
        if self.mid.repr().sign() == dashu::base::Sign::Negative {
            out.mid = -out.mid;
        }
        out
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Self {
        Real::one(self.prec).div(self)
    }

    /// Ball division. A divisor that meets zero yields an unbounded ball.
    pub fn div(&self, other: &Real) -> Self {
        let prec = self.prec.max(other.prec);
        let lower = other.lower_abs();
        if other.mid == Float::ZERO {
            return Self {
                mid: Float::ZERO,
                rad: f64::INFINITY,
                prec,
            };
        }
        let (mid, e) = settle(
            ctx(prec)
                .div(self.mid.repr(), other.mid.repr())
                .expect("finite division"),
            prec,
        );
        let rad = if self.rad == 0.0 && other.rad == 0.0 {
            e
        } else {
            let num = add_up(
                mul_up(abs_upper(&self.mid), other.rad),
                mul_up(abs_upper(&other.mid), self.rad),
            );
            let den = down(abs_lower(&other.mid) * lower);
            add_up(div_up(num, den), e)
        };
        Self { mid, rad, prec }
    }

    /// Natural logarithm; the ball must be certified positive.
    pub fn ln(&self) -> Result<Self, BallError> {
        if !self.is_positive() {
            return Err(BallError::LogDomain(self.lower_abs()));
        }
        let prec = self.prec;
        let (mid, e) = settle(
            ctx(prec).ln(self.mid.repr(), None).expect("positive argument"),
            prec,
        );
        let prop = div_up(self.rad, self.lower_abs());
        Ok(Self {
            mid,
            rad: add_up(prop, e),
            prec,
        })
    }

    pub fn sqrt(&self) -> Result<Self, BallError> {
        if self.mid.repr().sign() == dashu::base::Sign::Negative && self.mid != Float::ZERO {
            return Err(BallError::SqrtDomain);
        }
        let prec = self.prec;
        let (mid, e) = settle(ctx(prec).sqrt(self.mid.repr()).expect("nonnegative"), prec);
        let lower = self.lower_abs();
        let prop = if self.rad == 0.0 {
            0.0
        } else if lower > 0.0 {
            div_up(self.rad, down(lower.sqrt()))
        } else {
            up(add_up(abs_upper(&self.mid), self.rad).sqrt())
        };
        Ok(Self {
            mid,
            rad: add_up(prop, e),
            prec,
        })
    }

    /// Rigorous decimal enclosure `[lo, hi]` with outward rounding.
    pub fn interval_string(&self) -> String {
        let work = self.prec + 64;
        let rad = float_from_f64(if self.rad.is_finite() { self.rad } else { f64::MAX });
        let lo = Context::<Down>::new(work)
            .sub(self.mid.repr(), rad.repr())
            .expect("finite")
            .value();
        let hi = Context::<Up>::new(work)
            .add(self.mid.repr(), rad.repr())
            .expect("finite")
            .value();
        let lo = lo.with_base_and_precision::<10>(DECIMAL_DIGITS).value();
        let hi = hi.with_base_and_precision::<10>(DECIMAL_DIGITS).value();
        if self.rad.is_finite() {
            format!("[{:e}, {:e}]", lo, hi)
        } else {
            "[-inf, inf]".to_string()
        }
    }

    /// Midpoint rendered in decimal scientific notation.
    pub fn mid_string(&self) -> String {
        let d = self
            .mid
            .clone()
            .with_base_and_precision::<10>(DECIMAL_DIGITS)
            .value();
        format!("{:e}", d)
    }

    /// Orders by midpoint only.
    pub fn cmp_mid(&self, other: &Real) -> Ordering {
        self.mid.cmp(&other.mid)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.mid_string(), self.rad)
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        let (mid, e) = settle(
            ctx(prec).add(self.mid.repr(), other.mid.repr()).expect("finite"),
            prec,
        );
        Real {
            mid,
            rad: add_up(add_up(self.rad, other.rad), e),
            prec,
        }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        let (mid, e) = settle(
            ctx(prec).sub(self.mid.repr(), other.mid.repr()).expect("finite"),
            prec,
        );
        Real {
            mid,
            rad: add_up(add_up(self.rad, other.rad), e),
            prec,
        }
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, other: &Real) -> Real {
        let prec = self.prec.max(other.prec);
        let (mid, e) = settle(
            ctx(prec).mul(self.mid.repr(), other.mid.repr()).expect("finite"),
            prec,
        );
        let prop = add_up(
            add_up(
                mul_up(abs_upper(&self.mid), other.rad),
                mul_up(abs_upper(&other.mid), self.rad),
            ),
            mul_up(self.rad, other.rad),
        );
        Real {
            mid,
            rad: add_up(prop, e),
            prec,
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mid: -self.mid.clone(),
            rad: self.rad,
            prec: self.prec,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $ty:ty) => {
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, other: $ty) -> $ty {
                (&self).$m(&other)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, other: &$ty) -> $ty {
                (&self).$m(other)
            }
        }
    };
}

forward_owned!(Add, add, Real);
forward_owned!(Sub, sub, Real);
forward_owned!(Mul, mul, Real);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

/// A complex ball given by independent real balls for the two parts.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_real(Real::zero(prec))
    }

    pub fn one(prec: usize) -> Self {
        Self::from_real(Real::one(prec))
    }

    pub fn i(prec: usize) -> Self {
        Self::new(Real::zero(prec), Real::one(prec))
    }

    pub fn from_real(re: Real) -> Self {
        let prec = re.prec();
        Self {
            re,
            im: Real::zero(prec),
        }
    }

    pub fn prec(&self) -> usize {
        self.re.prec().max(self.im.prec())
    }

    /// The midpoint as an exact ball.
    pub fn center(&self) -> Self {
        Self {
            re: self.re.center(),
            im: self.im.center(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `|z|^2` as a real ball.
    pub fn norm_sqr(&self) -> Real {
        &self.re.sqr() + &self.im.sqr()
    }

    /// `|z|` as a real ball.
    pub fn abs(&self) -> Real {
        let prec = self.prec();
        let (mid, e) = settle(
            ctx(prec)
                .hypot(self.re.mid().repr(), self.im.mid().repr())
                .expect("finite"),
            prec,
        );
        Real::from_parts(mid, add_up(add_up(self.re.rad(), self.im.rad()), e), prec)
    }

    /// Upper bound on `|z|`.
    pub fn upper_abs(&self) -> f64 {
        let r = self.re.upper_abs();
        let i = self.im.upper_abs();
        up(add_up(mul_up(r, r), mul_up(i, i)).sqrt())
    }

    /// Lower bound on `|z|`.
    pub fn lower_abs(&self) -> f64 {
        let r = self.re.lower_abs();
        let i = self.im.lower_abs();
        down(down(down(r * r) + down(i * i)).sqrt())
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// True when the imaginary part is exactly zero (radius included).
    pub fn is_exactly_real(&self) -> bool {
        *self.im.mid() == Float::ZERO && self.im.rad() == 0.0
    }

    pub fn overlaps(&self, other: &Complex) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn scale(&self, k: &Real) -> Self {
        Self {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn div(&self, other: &Complex) -> Self {
        let den = other.norm_sqr();
        let num = self * &other.conj();
        Self {
            re: num.re.div(&den),
            im: num.im.div(&den),
        }
    }

    pub fn recip(&self) -> Self {
        Complex::one(self.prec()).div(self)
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Complex::one(self.prec());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Upper bound on the distance between the two balls' contents.
    pub fn deviation_upper(&self, other: &Complex) -> f64 {
        let d = self - other;
        d.upper_abs()
    }

    /// Distance between midpoints (no radius).
    pub fn mid_distance(&self, other: &Complex) -> f64 {
        let d = self - other;
        let r = d.re.mid_f64();
        let i = d.im.mid_f64();
        (r * r + i * i).sqrt()
    }

    pub fn interval_strings(&self) -> (String, String) {
        (self.re.interval_string(), self.im.interval_string())
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.interval_string())
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &self.re)?;
        st.serialize_field("im", &self.im)?;
        st.end()
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + i({})", self.re, self.im)
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, other: &Complex) -> Complex {
        Complex {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, other: &Complex) -> Complex {
        Complex {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
        }
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, other: &Complex) -> Complex {
        Complex {
            re: &(&self.re * &other.re) - &(&self.im * &other.im),
            im: &(&self.re * &other.im) + &(&self.im * &other.re),
        }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

forward_owned!(Add, add, Complex);
forward_owned!(Sub, sub, Complex);
forward_owned!(Mul, mul, Complex);

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: usize = 128;

    fn rat(n: i64, d: u64) -> RBig {
        RBig::from_parts(IBig::from(n), d.into())
    }

    #[test]
    fn exact_chain_keeps_zero_radius() {
        let a = Real::from_i64(3, P);
        let b = Real::from_i64(-5, P);
        let c = &(&a * &b) + &a;
        assert!(c.is_exact());
        assert_eq!(c.mid_f64(), -12.0);
    }

    #[test]
    fn third_encloses_true_value() {
        let x = Real::from_rational(&rat(1, 3), P);
        assert!(!x.is_exact());
        let back = &x * &Real::from_i64(3, P);
        assert!(back.overlaps(&Real::one(P)));
        assert!(back.rad() < 1e-37);
    }

    #[test]
    fn ln_of_one_is_exact_zero() {
        let z = Real::one(P).ln().unwrap();
        assert!(z.is_exact());
        assert!(*z.mid() == Float::ZERO);
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert!(Real::zero(P).ln().is_err());
        assert!(Real::from_i64(-2, P).ln().is_err());
    }

    #[test]
    fn division_by_ball_containing_zero_is_unbounded() {
        let z = Real::from_parts(Float::ZERO, 1e-3, P);
        let q = Real::one(P).div(&z);
        assert!(q.rad().is_infinite());
    }

    #[test]
    fn interval_string_encloses_mid() {
        let x = Real::from_rational(&rat(-1, 3), P);
        let s = x.interval_string();
        assert!(s.starts_with("[-3.3333"), "{s}");
        assert!(s.contains(", -3.3333"), "{s}");
    }

    #[test]
    fn complex_mul_matches_hand_value() {
        // (1 + 2i)(3 - i) = 5 + 5i
        let a = Complex::new(Real::from_i64(1, P), Real::from_i64(2, P));
        let b = Complex::new(Real::from_i64(3, P), Real::from_i64(-1, P));
        let c = &a * &b;
        assert_eq!(c.re.mid_f64(), 5.0);
        assert_eq!(c.im.mid_f64(), 5.0);
        let q = c.div(&b);
        assert!(q.overlaps(&a));
    }

    #[test]
    fn real_times_real_keeps_exact_zero_imaginary() {
        let a = Complex::from_real(Real::from_rational(&rat(2, 3), P));
        let b = Complex::from_real(Real::from_rational(&rat(5, 7), P));
        let c = &(&a * &b) + &a;
        assert!(c.is_exactly_real());
    }

    proptest! {
        #[test]
        fn ball_ops_enclose_exact_rational_results(
            an in -1000i64..1000, ad in 1u64..1000,
            bn in -1000i64..1000, bd in 1u64..1000,
        ) {
            let (ra, rb) = (rat(an, ad), rat(bn, bd));
            let (a, b) = (Real::from_rational(&ra, P), Real::from_rational(&rb, P));
            let exact_sum = Real::from_rational(&(&ra + &rb), P);
            let exact_prod = Real::from_rational(&(&ra * &rb), P);
            prop_assert!((&a + &b).overlaps(&exact_sum));
            prop_assert!((&a * &b).overlaps(&exact_prod));
            if bn != 0 {
                let exact_q = Real::from_rational(&(&ra / &rb), P);
                prop_assert!(a.div(&b).overlaps(&exact_q));
            }
        }
    }
}
