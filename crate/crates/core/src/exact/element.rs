//! Elements of residue rings ℚ[x]/(p).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use dashu::rational::RBig;

use super::poly::{gcd_any, interpolate, IntPolynomial};
use super::sturm::resultant;
use super::ExactError;

/// Residue class `r(x) mod p(x)` with `deg r < deg p`.
///
/// The modulus is shared; two elements are compatible when their moduli are
/// equal as polynomials.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    residue: IntPolynomial,
    modulus: Arc<IntPolynomial>,
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.residue == other.residue
            && (Arc::ptr_eq(&self.modulus, &other.modulus) || self.modulus == other.modulus)
    }
}

impl Eq for AlgebraicNumber {}

impl AlgebraicNumber {
    /// Reduces `residue` modulo `modulus`. The modulus must have positive degree.
    pub fn new(residue: IntPolynomial, modulus: Arc<IntPolynomial>) -> Self {
        assert!(!modulus.is_constant(), "modulus must have positive degree");
        let residue = residue.rem(&modulus).expect("nonzero modulus");
        Self { residue, modulus }
    }

    pub fn from_rational(c: RBig, modulus: Arc<IntPolynomial>) -> Self {
        Self::new(IntPolynomial::constant(c), modulus)
    }

    pub fn from_int(c: i64, modulus: Arc<IntPolynomial>) -> Self {
        Self::from_rational(RBig::from(c), modulus)
    }

    /// The class of `x`.
    pub fn generator(modulus: Arc<IntPolynomial>) -> Self {
        Self::new(IntPolynomial::x(), modulus)
    }

    pub fn residue(&self) -> &IntPolynomial {
        &self.residue
    }

    pub fn modulus(&self) -> &Arc<IntPolynomial> {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.residue.is_constant()
    }

    pub fn zero_like(&self) -> Self {
        Self::from_int(0, self.modulus.clone())
    }

    pub fn one_like(&self) -> Self {
        Self::from_int(1, self.modulus.clone())
    }

    fn same_ring(&self, other: &Self) -> Result<(), ExactError> {
        if Arc::ptr_eq(&self.modulus, &other.modulus) || self.modulus == other.modulus {
            Ok(())
        } else {
            Err(ExactError::ModulusMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.same_ring(other)?;
        Ok(Self {
            residue: &self.residue + &other.residue,
            modulus: self.modulus.clone(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.same_ring(other)?;
        Ok(Self {
            residue: &self.residue - &other.residue,
            modulus: self.modulus.clone(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.same_ring(other)?;
        Ok(Self::new(&self.residue * &other.residue, self.modulus.clone()))
    }

    pub fn scale(&self, k: &RBig) -> Self {
        Self {
            residue: self.residue.scale(k),
            modulus: self.modulus.clone(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inverse(&self) -> Result<Self, ExactError> {
        let (g, s, _) = self.residue.xgcd(&self.modulus);
        if g.is_zero() || !g.is_constant() {
            return Err(ExactError::NotInvertible);
        }
        Ok(Self::new(s, self.modulus.clone()))
    }

    /// `self^e` for any integer exponent; negative exponents need an inverse.
    pub fn pow(&self, e: i64) -> Result<Self, ExactError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.one_like();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Evaluates `f` at this element.
    pub fn apply(&self, f: &IntPolynomial) -> Self {
        f.coeffs()
            .iter()
            .rev()
            .fold(self.zero_like(), |acc, c| {
                &(&acc * self) + &Self::from_rational(c.clone(), self.modulus.clone())
            })
    }

    /// `resultant(residue, modulus)`: the norm when the modulus is monic.
    pub fn norm(&self) -> RBig {
        if self.residue.is_zero() {
            return RBig::ZERO;
        }
        resultant(&self.residue, &self.modulus).expect("both nonzero")
    }

    /// `∏ (y - r(α_i))` over the roots of the modulus, as a monic polynomial of
    /// degree `deg p`. Requires a monic modulus.
    pub fn char_poly(&self) -> IntPolynomial {
        let n = self.modulus.degree();
        let lc = self.modulus.leading();
        // χ(y) = resultant(y - r, p) / lc^n.
        let scale = RBig::ONE / super::rbig_pow(&lc, n);
        let pts: Vec<(RBig, RBig)> = (0..=n)
            .map(|k| {
                let y = RBig::from(k as u64);
                let f = &IntPolynomial::constant(y.clone()) - &self.residue;
                let v = if f.is_zero() {
                    RBig::ZERO
                } else {
                    resultant(&f, &self.modulus).expect("both nonzero") * &scale
                };
                (y, v)
            })
            .collect();
        interpolate(&pts)
    }

    /// Sum of the conjugates, `-χ_{n-1}` of the characteristic polynomial.
    pub fn trace(&self) -> RBig {
        let chi = self.char_poly();
        -chi.coeff(chi.degree().saturating_sub(1))
    }

    /// Monic minimal polynomial over ℚ, confirmed by exact evaluation.
    pub fn min_poly(&self) -> Result<IntPolynomial, ExactError> {
        let chi = self.char_poly();
        let g = gcd_any(&chi, &chi.derivative());
        let (m, _) = chi.div_rem(&g)?;
        let m = m.monic();
        if !self.apply(&m).is_zero() {
            return Err(ExactError::MinPolyUnconfirmed);
        }
        Ok(m)
    }
}

macro_rules! element_op {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr for &AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, other: &AlgebraicNumber) -> AlgebraicNumber {
                self.$try(other).expect("elements of the same residue ring")
            }
        }
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, other: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$method(&other)
            }
        }
    };
}

element_op!(Add, add, try_add);
element_op!(Sub, sub, try_sub);
element_op!(Mul, mul, try_mul);

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber {
            residue: -&self.residue,
            modulus: self.modulus.clone(),
        }
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue.to_string().replace('x', "θ"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_ints(c)
    }

    fn plastic() -> Arc<IntPolynomial> {
        Arc::new(p(&[-1, -1, 0, 1]))
    }

    #[test]
    fn generator_norm_and_trace() {
        let t = AlgebraicNumber::generator(plastic());
        assert_eq!(t.norm(), RBig::ONE);
        assert_eq!(t.trace(), RBig::ZERO);
        assert_eq!(t.min_poly().unwrap(), p(&[-1, -1, 0, 1]));
    }

    #[test]
    fn min_poly_of_square_root_element() {
        // θ = 2^{1/6}, θ^3 = √2.
        let m = Arc::new(p(&[-2, 0, 0, 0, 0, 0, 1]));
        let t = AlgebraicNumber::generator(m);
        assert_eq!(t.pow(3).unwrap().min_poly().unwrap(), p(&[-2, 0, 1]));
        assert_eq!(t.pow(2).unwrap().min_poly().unwrap(), p(&[-2, 0, 0, 1]));
        assert_eq!(t.one_like().min_poly().unwrap(), p(&[-1, 1]));
    }

    #[test]
    fn inverse_of_generator() {
        let t = AlgebraicNumber::generator(plastic());
        let inv = t.inverse().unwrap();
        // θ^{-1} = θ² - 1
        assert_eq!(inv.residue(), &p(&[-1, 0, 1]));
        assert_eq!(&inv * &t, t.one_like());
        assert!(t.zero_like().inverse().is_err());
    }

    #[test]
    fn reducible_modulus_has_zero_divisors() {
        let m = Arc::new(p(&[4, 0, 0, 0, 1])); // (x²+2x+2)(x²-2x+2)
        let f = AlgebraicNumber::new(p(&[2, 2, 1]), m);
        assert_eq!(f.inverse(), Err(ExactError::NotInvertible));
        assert_eq!(f.norm(), RBig::ZERO);
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = AlgebraicNumber::generator(plastic());
        let b = AlgebraicNumber::generator(Arc::new(p(&[-2, 0, 0, 1])));
        assert_eq!(a.try_add(&b), Err(ExactError::ModulusMismatch));
    }

    fn elem() -> impl Strategy<Value = AlgebraicNumber> {
        prop::collection::vec(-6i64..=6, 3).prop_map(|v| AlgebraicNumber::new(p(&v), plastic()))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in elem(), b in elem()) {
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        }

        #[test]
        fn trace_is_additive(a in elem(), b in elem()) {
            prop_assert_eq!((&a + &b).trace(), a.trace() + b.trace());
        }

        #[test]
        fn min_poly_annihilates(a in elem()) {
            let m = a.min_poly().unwrap();
            prop_assert!(a.apply(&m).is_zero());
            prop_assert!(m.is_monic());
        }

        #[test]
        fn inverse_round_trip(a in elem()) {
            prop_assume!(!a.is_zero());
            let inv = a.inverse().unwrap();
            prop_assert_eq!(&a * &inv, a.one_like());
        }
    }
}
