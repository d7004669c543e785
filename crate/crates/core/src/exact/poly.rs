//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use dashu::base::{Abs, Signed, UnsignedAbs};
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExactError;

/// Polynomial over ℚ stored as ascending coefficients with no trailing zeros.
///
/// The zero polynomial has an empty coefficient vector and reports degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<RBig>,
}

fn trim(mut coeffs: Vec<RBig>) -> Vec<RBig> {
    while coeffs.last().is_some_and(|c| c == &RBig::ZERO) {
        coeffs.pop();
    }
    coeffs
}

pub(crate) fn rbig_pow(base: &RBig, exp: usize) -> RBig {
    let mut acc = RBig::ONE;
    for _ in 0..exp {
        acc = &acc * base;
    }
    acc
}

fn lcm(a: &UBig, b: &UBig) -> UBig {
    use dashu::base::Gcd;
    let g = a.gcd(b);
    (a / &g) * b
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<RBig>) -> Self {
        Self {
            coeffs: trim(coeffs),
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| RBig::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(RBig::ONE)
    }

    pub fn constant(c: RBig) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `c · x^k`.
    pub fn monomial(c: RBig, k: usize) -> Self {
        let mut v = vec![RBig::ZERO; k];
        v.push(c);
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[RBig] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> RBig {
        self.coeffs.get(k).cloned().unwrap_or(RBig::ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> RBig {
        self.coeffs.last().cloned().unwrap_or(RBig::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == RBig::ONE
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denominator() == &UBig::ONE)
    }

    /// Integer coefficients, if the polynomial is integral.
    pub fn integer_coeffs(&self) -> Option<Vec<IBig>> {
        self.is_integral()
            .then(|| self.coeffs.iter().map(|c| c.numerator().clone()).collect())
    }

    /// Coefficients as small integers, if they all fit in `i64`.
    pub fn i64_coeffs(&self) -> Option<Vec<i64>> {
        self.integer_coeffs()?
            .into_iter()
            .map(|c| i64::try_from(c).ok())
            .collect()
    }

    pub fn scale(&self, k: &RBig) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.leading();
        self.scale(&(RBig::ONE / lc))
    }

    /// Integer multiple with coprime coefficients and positive leading coefficient.
    pub fn primitive(&self) -> Self {
        use dashu::base::Gcd;
        if self.is_zero() {
            return Self::zero();
        }
        let den = self
            .coeffs
            .iter()
            .fold(UBig::ONE, |acc, c| lcm(&acc, c.denominator()));
        let nums: Vec<IBig> = self
            .coeffs
            .iter()
            .map(|c| (c * RBig::from(den.clone())).numerator().clone())
            .collect();
        let content = nums
            .iter()
            .filter(|n| **n != IBig::ZERO)
            .fold(UBig::ZERO, |acc, n| {
                if acc == UBig::ZERO {
                    n.unsigned_abs()
                } else {
                    acc.gcd(&n.unsigned_abs())
                }
            });
        let sign = if nums.last().is_some_and(|n| n.is_negative()) {
            -RBig::ONE
        } else {
            RBig::ONE
        };
        let k = &sign / RBig::from(content);
        Self::new(nums.into_iter().map(|n| RBig::from(n) * &k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * RBig::from(k as u64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &RBig) -> RBig {
        self.coeffs
            .iter()
            .rev()
            .fold(RBig::ZERO, |acc, c| acc * x + c)
    }

    /// Exact division with remainder.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), ExactError> {
        if divisor.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let dn = divisor.degree();
        let lc_inv = RBig::ONE / divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dn {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![RBig::ZERO; rem.len() - dn];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dn] * &lc_inv;
            if c != RBig::ZERO {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dn);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self, ExactError> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Greatest common divisor, returned primitive with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Result<Self, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(gcd_any(self, other))
    }

    /// Extended Euclid: `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = RBig::ONE / r0.leading();
        (r0.scale(&k), s0.scale(&k), t0.scale(&k))
    }

    /// `p / gcd(p, p')`, primitive.
    pub fn squarefree_part(&self) -> Self {
        if self.is_constant() {
            return self.primitive();
        }
        let g = gcd_any(self, &self.derivative());
        let (q, _) = self.div_rem(&g).expect("gcd is nonzero");
        q.primitive()
    }

    pub fn is_squarefree(&self) -> bool {
        self.is_constant() || gcd_any(self, &self.derivative()).is_constant()
    }

    /// Strict bound: every complex root satisfies `|z| < 1 + max |a_i / a_n|`.
    pub fn cauchy_bound(&self) -> RBig {
        let lc = self.leading();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| (c / &lc).abs())
            .max()
            .unwrap_or(RBig::ZERO);
        RBig::ONE + m
    }

    /// `self(x + shift)`.
    pub fn taylor_shift(&self, shift: &RBig) -> Self {
        let lin = Self::new(vec![shift.clone(), RBig::ONE]);
        self.compose(&lin)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }

    /// Ascending decimal coefficient strings, e.g. `["-1","-1","0","1"]`.
    pub fn to_strings(&self) -> Vec<String> {
        if self.is_zero() {
            return vec!["0".to_string()];
        }
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self, ExactError> {
        let coeffs = items
            .iter()
            .enumerate()
            .map(|(i, s)| parse_rational(s.as_ref()).map_err(|e| ExactError::Parse(format!("[{i}]: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }
}

/// Parses `"-3"`, `"7/2"` or `"+4"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<RBig, String> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return Err("empty coefficient".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = IBig::from_str(n.trim()).map_err(|_| format!("invalid numerator in '{s}'"))?;
        let d = IBig::from_str(d.trim()).map_err(|_| format!("invalid denominator in '{s}'"))?;
        if d == IBig::ZERO {
            return Err(format!("zero denominator in '{s}'"));
        }
        Ok(RBig::from_parts_signed(n, d))
    } else {
        IBig::from_str(t)
            .map(RBig::from)
            .map_err(|_| format!("invalid rational '{s}'"))
    }
}

pub(crate) fn gcd_any(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    while !r1.is_zero() {
        let r = r0.rem(&r1).expect("nonzero divisor");
        r0 = std::mem::replace(&mut r1, r.monic());
    }
    r0.primitive()
}

/// Build the unique polynomial of degree `< points.len()` through `(x_k, y_k)`.
pub(crate) fn interpolate(points: &[(RBig, RBig)]) -> IntPolynomial {
    // Newton divided differences.
    let n = points.len();
    let xs: Vec<RBig> = points.iter().map(|p| p.0.clone()).collect();
    let mut dd: Vec<RBig> = points.iter().map(|p| p.1.clone()).collect();
    for level in 1..n {
        for k in (level..n).rev() {
            dd[k] = (&dd[k] - &dd[k - 1]) / (&xs[k] - &xs[k - level]);
        }
    }
    let mut acc = IntPolynomial::zero();
    for k in (0..n).rev() {
        let lin = IntPolynomial::new(vec![-xs[k].clone(), RBig::ONE]);
        acc = &(&acc * &lin) + &IntPolynomial::constant(dd[k].clone());
    }
    acc
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![RBig::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a == &RBig::ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c == &RBig::ZERO {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.clone().abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = k == 0 || mag != RBig::ONE;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        IntPolynomial::from_strings(&items).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_ints(c)
    }

    #[test]
    fn gcd_of_common_linear_factor() {
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[-1, 1])).unwrap(), p(&[-1, 1]));
    }

    #[test]
    fn remainder_theorem_example() {
        let (_, r) = p(&[-1, -1, 0, 1]).div_rem(&p(&[-2, 1])).unwrap();
        assert_eq!(r, p(&[5]));
    }

    #[test]
    fn gcd_of_sixth_and_cube_root_polys_is_one() {
        assert_eq!(p(&[-2, 0, 0, 0, 0, 0, 1]).gcd(&p(&[-2, 0, 0, 1])).unwrap(), p(&[1]));
    }

    #[test]
    fn division_by_zero_polynomial_is_an_error() {
        assert_eq!(p(&[1, 1]).div_rem(&IntPolynomial::zero()), Err(ExactError::DivisionByZero));
        assert_eq!(p(&[1, 1]).gcd(&IntPolynomial::zero()), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn gcd_is_primitive_with_positive_leading_coefficient() {
        // gcd(-2x^2 + 2, 3x - 3) = x - 1
        let g = p(&[2, 0, -2]).gcd(&p(&[-3, 3])).unwrap();
        assert_eq!(g, p(&[-1, 1]));
    }

    #[test]
    fn string_round_trip_and_rationals() {
        let q = IntPolynomial::from_strings(&["-1", "-1", "0", "1"]).unwrap();
        assert_eq!(q, p(&[-1, -1, 0, 1]));
        assert_eq!(q.to_strings(), vec!["-1", "-1", "0", "1"]);
        let h = IntPolynomial::from_strings(&["1/2", "-3/4"]).unwrap();
        assert_eq!(h.to_strings(), vec!["1/2", "-3/4"]);
        assert!(IntPolynomial::from_strings(&["1", "x"]).is_err());
        assert!(IntPolynomial::from_strings(&["1/0"]).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[-1, -1, 0, 1]).to_string(), "x^3 - x - 1");
        assert_eq!(p(&[4, 0, 0, 0, 1]).to_string(), "x^4 + 4");
    }

    #[test]
    fn squarefree_part_removes_repeated_factor() {
        // (x-1)^2 (x+2) -> (x-1)(x+2)
        let f = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[2, 1]);
        assert_eq!(f.squarefree_part(), p(&[-2, 1, 1]));
        assert!(!f.is_squarefree());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = p(&[3, -1, 0, 2]);
        let pts: Vec<_> = (0..4)
            .map(|k| {
                let x = RBig::from(k);
                let y = f.eval(&x);
                (x, y)
            })
            .collect();
        assert_eq!(interpolate(&pts), f);
    }

    fn small_poly() -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-9i64..=9, 1..6).prop_map(|v| IntPolynomial::from_ints(&v))
    }

    proptest! {
        #[test]
        fn remainder_by_linear_is_evaluation(f in small_poly(), cn in -20i64..20, cd in 1u64..7) {
            let c = RBig::from_parts(IBig::from(cn), UBig::from(cd));
            let lin = IntPolynomial::new(vec![-c.clone(), RBig::ONE]);
            let (_, r) = f.div_rem(&lin).unwrap();
            prop_assert_eq!(r.coeff(0), f.eval(&c));
            prop_assert!(r.is_constant());
        }

        #[test]
        fn div_rem_reconstructs(f in small_poly(), g in small_poly()) {
            prop_assume!(!g.is_zero());
            let (q, r) = f.div_rem(&g).unwrap();
            prop_assert_eq!(&(&q * &g) + &r, f);
            prop_assert!(r.is_zero() || r.degree() < g.degree() || g.is_constant() && r.is_zero());
        }
    }
}
