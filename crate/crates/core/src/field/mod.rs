//! Number fields ℚ[t]/(p) with certified complex embeddings.

mod irreducible;
mod roots;

use std::sync::Arc;

use dashu::integer::UBig;
use dashu::rational::RBig;
use thiserror::Error;

use crate::ball::{Complex, Real};
use crate::exact::{real_root_count, AlgebraicNumber, ExactError, IntPolynomial};
use crate::precision::PrecisionPolicy;

pub use irreducible::{check_irreducible, IrreducibilityStatus, Method, Status};
pub use roots::CertifiedRoots;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("defining polynomial must have integer coefficients")]
    NotIntegral,
    #[error("defining polynomial must be monic")]
    NotMonic,
    #[error("defining polynomial must have degree at least 2 (got {0})")]
    DegreeTooSmall(usize),
    #[error("defining polynomial is not squarefree")]
    NotSquarefree,
    #[error("root certification failed up to {bits} bits")]
    CertificationFailed { bits: usize },
    #[error("embedding index {index} out of range for degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },
    #[error("element does not belong to this field")]
    ForeignElement,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A number field with its signature and ordered, certified embeddings.
///
/// Embedding `i` (0-based) is real for `i < s`; `s..s+t` are the
/// representatives with positive imaginary part and `s+t+k` is the conjugate
/// of `s+k`.
#[derive(Clone, Debug)]
pub struct NumberField {
    defining: Arc<IntPolynomial>,
    label: Option<String>,
    s: usize,
    t: usize,
    roots: CertifiedRoots,
    policy: PrecisionPolicy,
    irreducibility: IrreducibilityStatus,
}

/// Retries at doubled precision stop after this multiple of the initial budget.
pub const MAX_PRECISION_FACTOR: usize = 4;

/// Builds a field from a monic integer polynomial.
pub fn build_field(defining: IntPolynomial, policy: PrecisionPolicy) -> Result<NumberField, FieldError> {
    build_field_with(defining, policy, None)
}

pub(crate) fn build_field_with(
    defining: IntPolynomial,
    policy: PrecisionPolicy,
    status: Option<IrreducibilityStatus>,
) -> Result<NumberField, FieldError> {
    if !defining.is_integral() {
        return Err(FieldError::NotIntegral);
    }
    if !defining.is_monic() {
        return Err(FieldError::NotMonic);
    }
    if defining.degree() < 2 {
        return Err(FieldError::DegreeTooSmall(defining.degree()));
    }
    if !defining.is_squarefree() {
        return Err(FieldError::NotSquarefree);
    }
    let n = defining.degree();
    let s = real_root_count(&defining)?;
    let t = (n - s) / 2;
    let mut bits = policy.working_bits;
    let roots = loop {
        match roots::certified_roots(&defining, s, bits) {
            Ok(r) => break r,
            Err(_) if bits * 2 <= policy.working_bits * MAX_PRECISION_FACTOR => bits *= 2,
            Err(_) => return Err(FieldError::CertificationFailed { bits }),
        }
    };
    let irreducibility = status.unwrap_or_else(|| check_irreducible(&defining));
    Ok(NumberField {
        defining: Arc::new(defining),
        label: None,
        s,
        t,
        roots,
        policy,
        irreducibility,
    })
}

impl NumberField {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Same field rebuilt at another precision.
    pub fn with_policy(&self, policy: PrecisionPolicy) -> Result<NumberField, FieldError> {
        let mut f = build_field_with((*self.defining).clone(), policy, Some(self.irreducibility.clone()))?;
        f.label = self.label.clone();
        Ok(f)
    }

    pub fn defining(&self) -> &IntPolynomial {
        &self.defining
    }

    pub fn modulus(&self) -> &Arc<IntPolynomial> {
        &self.defining
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.defining.degree()
    }

    /// `(s, t)`: real embeddings and complex-conjugate pairs.
    pub fn signature(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `m = s + t`, the complex dimension of the associated manifold.
    pub fn m(&self) -> usize {
        self.s + self.t
    }

    pub fn is_ot_eligible(&self) -> bool {
        self.s > 0 && self.t > 0
    }

    pub fn policy(&self) -> PrecisionPolicy {
        self.policy
    }

    pub fn roots(&self) -> &CertifiedRoots {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &Complex {
        &self.roots.roots[i]
    }

    pub fn irreducibility(&self) -> &IrreducibilityStatus {
        &self.irreducibility
    }

    /// Same field with the representative and conjugate of each listed
    /// complex pair (0-based among the `t` pairs) exchanged.
    pub fn with_swapped_pairs(&self, pairs: &[usize]) -> Result<NumberField, FieldError> {
        let mut out = self.clone();
        for &p in pairs {
            if p >= self.t {
                return Err(FieldError::IndexOutOfRange {
                    index: p,
                    degree: self.t,
                });
            }
            let (a, b) = (self.s + p, self.s + self.t + p);
            out.roots.roots.swap(a, b);
            out.roots.radii.swap(a, b);
        }
        Ok(out)
    }

    pub fn element(&self, residue: IntPolynomial) -> AlgebraicNumber {
        AlgebraicNumber::new(residue, self.defining.clone())
    }

    /// Element with power-basis coordinates `c_0 + c_1 θ + ...`.
    pub fn from_ints(&self, coeffs: &[i64]) -> AlgebraicNumber {
        self.element(IntPolynomial::from_ints(coeffs))
    }

    pub fn from_rational(&self, c: RBig) -> AlgebraicNumber {
        AlgebraicNumber::from_rational(c, self.defining.clone())
    }

    pub fn one(&self) -> AlgebraicNumber {
        self.from_ints(&[1])
    }

    pub fn generator(&self) -> AlgebraicNumber {
        AlgebraicNumber::generator(self.defining.clone())
    }

    pub fn contains(&self, x: &AlgebraicNumber) -> bool {
        Arc::ptr_eq(x.modulus(), &self.defining) || **x.modulus() == *self.defining
    }

    fn check(&self, x: &AlgebraicNumber) -> Result<(), FieldError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(FieldError::ForeignElement)
        }
    }

    /// `σ_i(x)` as a complex ball, `i` 0-based.
    ///
    /// For real embeddings the imaginary part is exactly zero.
    pub fn embed(&self, x: &AlgebraicNumber, i: usize) -> Result<Complex, FieldError> {
        self.check(x)?;
        let n = self.degree();
        if i >= n {
            return Err(FieldError::IndexOutOfRange { index: i, degree: n });
        }
        Ok(eval_at(x.residue(), &self.roots.roots[i]))
    }

    /// All `n` embeddings in the canonical order.
    pub fn embeddings(&self, x: &AlgebraicNumber) -> Result<Vec<Complex>, FieldError> {
        (0..self.degree()).map(|i| self.embed(x, i)).collect()
    }

    /// `∏ σ_i(x)`, exactly.
    pub fn norm(&self, x: &AlgebraicNumber) -> Result<RBig, FieldError> {
        self.check(x)?;
        Ok(x.norm())
    }

    /// `Σ σ_i(x)`, exactly.
    pub fn trace(&self, x: &AlgebraicNumber) -> Result<RBig, FieldError> {
        self.check(x)?;
        Ok(x.trace())
    }

    /// True iff the minimal polynomial of `x` has integer coefficients.
    pub fn is_algebraic_integer(&self, x: &AlgebraicNumber) -> Result<bool, FieldError> {
        self.check(x)?;
        if x.residue().is_integral() {
            // monic integer modulus: ℤ[θ] is integral
            return Ok(true);
        }
        // Over an irreducible modulus χ is a power of the minimal polynomial,
        // so integrality of either is equivalent.
        Ok(x.char_poly().is_integral())
    }

    /// Algebraic integer with norm ±1.
    pub fn is_unit(&self, x: &AlgebraicNumber) -> Result<bool, FieldError> {
        if !self.is_algebraic_integer(x)? {
            return Ok(false);
        }
        let n = self.norm(x)?;
        Ok(n.denominator() == &UBig::ONE && (n == RBig::ONE || n == -RBig::ONE))
    }
}

/// Evaluates a rational polynomial at a complex ball.
pub fn eval_at(f: &IntPolynomial, z: &Complex) -> Complex {
    let prec = z.prec();
    let mut acc = Complex::zero(prec);
    for c in f.coeffs().iter().rev() {
        let t = &acc * z;
        acc = Complex::new(&t.re + &Real::from_rational(c, prec), t.im);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(c: &[i64]) -> NumberField {
        build_field(IntPolynomial::from_ints(c), PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn plastic_signature_and_real_root() {
        let k = field(&[-1, -1, 0, 1]);
        assert_eq!(k.signature(), (1, 1));
        let r = k.embed(&k.generator(), 0).unwrap();
        assert!(r.is_exactly_real());
        assert!((r.re.mid_f64() - 1.324717957).abs() < 1e-9);
    }

    #[test]
    fn gaussian_field_is_valid_but_not_eligible() {
        let k = field(&[1, 0, 1]);
        assert_eq!(k.signature(), (0, 1));
        assert!(!k.is_ot_eligible());
        let i = k.embed(&k.generator(), 0).unwrap();
        assert!((i.im.mid_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn quintic_signature() {
        assert_eq!(field(&[-1, -1, 0, 0, 0, 1]).signature(), (1, 2));
    }

    #[test]
    fn rejects_bad_defining_polynomials() {
        let pol = PrecisionPolicy::default();
        assert_eq!(build_field(IntPolynomial::from_ints(&[1, 1]), pol).unwrap_err(), FieldError::DegreeTooSmall(1));
        assert_eq!(build_field(IntPolynomial::from_ints(&[1, 0, 2]), pol).unwrap_err(), FieldError::NotMonic);
        let sq = &IntPolynomial::from_ints(&[-1, 1]) * &IntPolynomial::from_ints(&[-1, 1]);
        assert_eq!(build_field(sq, pol).unwrap_err(), FieldError::NotSquarefree);
    }

    #[test]
    fn embedding_of_one_is_exact() {
        let k = field(&[-1, -1, 0, 1]);
        for i in 0..3 {
            let e = k.embed(&k.one(), i).unwrap();
            assert!(e.re.is_exact() && e.im.is_exact());
            assert_eq!(e.re.mid_f64(), 1.0);
        }
    }

    #[test]
    fn complex_embedding_modulus() {
        // |θ₂|² = 1/θ₁ since the product of the roots is 1.
        let k = field(&[-1, -1, 0, 1]);
        let th = k.generator();
        let z2 = k.embed(&(&th * &th), 1).unwrap();
        let r1 = k.embed(&th, 0).unwrap().re.mid_f64();
        assert!((z2.abs().mid_f64() - 1.0 / r1).abs() < 1e-15);
        assert!(k.embed(&th, 1).unwrap().im.is_positive());
    }

    #[test]
    fn norms_and_integrality() {
        let k = field(&[-1, -1, 0, 1]);
        assert_eq!(k.norm(&k.generator()).unwrap(), RBig::ONE);
        assert_eq!(k.norm(&k.from_ints(&[2])).unwrap(), RBig::from(8));
        assert!(k.is_algebraic_integer(&k.generator()).unwrap());
        assert!(k.is_algebraic_integer(&k.from_ints(&[0, 1, 1])).unwrap());
        let half = k.from_rational(RBig::from_parts(1.into(), 2u8.into()));
        assert!(!k.is_algebraic_integer(&half).unwrap());
        let c = field(&[-2, 0, 0, 1]);
        assert_eq!(c.norm(&c.from_ints(&[-1, 1])).unwrap(), RBig::ONE);
        assert!(c.is_unit(&c.from_ints(&[-1, 1])).unwrap());
        assert!(!k.is_unit(&k.from_ints(&[2])).unwrap());
    }

    #[test]
    fn non_integral_residue_can_still_be_integral() {
        // (1 + √5)/2 in ℚ(√5).
        let k = field(&[-5, 0, 1]);
        let phi = k.element(IntPolynomial::from_strings(&["1/2", "1/2"]).unwrap());
        assert!(k.is_algebraic_integer(&phi).unwrap());
        assert!(k.is_unit(&phi).unwrap());
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let k = field(&[-1, -1, 0, 1]);
        let c = field(&[-2, 0, 0, 1]);
        assert_eq!(k.embed(&c.generator(), 0).unwrap_err(), FieldError::ForeignElement);
        assert!(matches!(k.embed(&k.one(), 3), Err(FieldError::IndexOutOfRange { .. })));
    }

    fn eligible_fields() -> Vec<NumberField> {
        [&[-1, -1, 0, 1][..], &[-2, 0, 0, 1], &[-1, -1, 0, 0, 0, 1], &[-1, 0, -1, 0, 1], &[-2, 0, 0, 0, 0, 0, 1]]
            .iter()
            .map(|c| field(c))
            .collect()
    }

    #[test]
    fn signatures_add_up() {
        for k in eligible_fields() {
            let (s, t) = k.signature();
            assert_eq!(s + 2 * t, k.degree());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn numeric_norm_trace_and_conjugation(coeffs in prop::collection::vec(-5i64..=5, 6), which in 0usize..5) {
            let k = &eligible_fields()[which];
            let n = k.degree();
            let x = k.from_ints(&coeffs[..n.min(coeffs.len())]);
            let e = k.embeddings(&x).unwrap();
            let prec = k.policy().working_bits;
            let prod = e.iter().fold(Complex::one(prec), |a, z| &a * z);
            let sum = e.iter().fold(Complex::zero(prec), |a, z| &a + z);
            let norm = Complex::from_real(Real::from_rational(&k.norm(&x).unwrap(), prec));
            let tr = Complex::from_real(Real::from_rational(&k.trace(&x).unwrap(), prec));
            prop_assert!(prod.overlaps(&norm));
            prop_assert!(sum.overlaps(&tr));
            let (s, t) = k.signature();
            for i in 0..t {
                prop_assert!(e[s + t + i].overlaps(&e[s + i].conj()));
            }
            for z in &e[..s] {
                prop_assert!(z.is_exactly_real());
            }
        }
    }
}
