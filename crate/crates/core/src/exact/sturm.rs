//! Resultants and Sturm root counting.

use dashu::base::Signed;
use dashu::rational::RBig;

use super::poly::{rbig_pow, IntPolynomial};
use super::ExactError;

/// `lc(q)^deg(p) · ∏ p(β)` over the roots `β` of `q`.
///
/// With this ordering `resultant(x³ - x - 1, x) = -1`, i.e. the product of
/// `p` at the roots of `q`. Computed by the Euclidean remainder sequence.
pub fn resultant(p: &IntPolynomial, q: &IntPolynomial) -> Result<RBig, ExactError> {
    if p.is_zero() || q.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    Ok(res_std(q.clone(), p.clone()))
}

// lc(a)^deg(b) ∏_{a(α)=0} b(α)
fn res_std(mut a: IntPolynomial, mut b: IntPolynomial) -> RBig {
    if a.is_constant() {
        return rbig_pow(&a.coeff(0), b.degree());
    }
    let mut acc = RBig::ONE;
    loop {
        let m = a.degree();
        let n = b.degree();
        if b.is_constant() {
            return acc * rbig_pow(&b.coeff(0), m);
        }
        let r = a.rem(&b).expect("nonzero divisor");
        if r.is_zero() {
            return RBig::ZERO;
        }
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        acc *= rbig_pow(&b.leading(), m - r.degree());
        a = b;
        b = r;
    }
}

/// Standard Sturm chain `p, p', -rem(p, p'), ...` of a nonzero polynomial.
pub fn sturm_sequence(p: &IntPolynomial) -> Vec<IntPolynomial> {
    let mut seq = vec![p.clone()];
    if p.is_constant() {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero divisor");
        if r.is_zero() {
            break;
        }
        seq.push((-&r).primitive_keep_sign());
    }
    seq
}

impl IntPolynomial {
    // Positive rescaling so Sturm signs stay intact.
    fn primitive_keep_sign(&self) -> IntPolynomial {
        let prim = self.primitive();
        if self.leading().is_negative() {
            -&prim
        } else {
            prim
        }
    }
}

fn sign_changes(seq: &[IntPolynomial], x: &RBig) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|f| f.eval(x))
        .filter(|v| v != &RBig::ZERO)
        .map(|v| if v.is_negative() { -1 } else { 1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
///
/// `p` is reduced to its squarefree part first. Endpoints that are roots are
/// rejected so the half-open convention never matters.
pub fn sturm_count(p: &IntPolynomial, lo: &RBig, hi: &RBig) -> Result<usize, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(ExactError::InvalidInterval);
    }
    for end in [lo, hi] {
        if p.eval(end) == RBig::ZERO {
            return Err(ExactError::EndpointIsRoot(end.to_string()));
        }
    }
    let sf = p.squarefree_part();
    let seq = sturm_sequence(&sf);
    Ok(sign_changes(&seq, lo) - sign_changes(&seq, hi))
}

/// Number of distinct real roots of `p`.
pub fn real_root_count(p: &IntPolynomial) -> Result<usize, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    if p.is_constant() {
        return Ok(0);
    }
    let b = p.cauchy_bound();
    sturm_count(p, &-b.clone(), &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dashu::integer::{IBig, UBig};
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_ints(c)
    }

    fn r(n: i64) -> RBig {
        RBig::from(n)
    }

    #[test]
    fn resultant_of_linear_factors() {
        // Product of (x - a) at the root of (x - b).
        let (a, b) = (3, -5);
        assert_eq!(resultant(&p(&[-a, 1]), &p(&[-b, 1])).unwrap(), r(b - a));
    }

    #[test]
    fn resultant_small_examples() {
        assert_eq!(resultant(&p(&[-1, -1, 0, 1]), &p(&[0, 1])).unwrap(), r(-1));
        assert_eq!(resultant(&p(&[-2, 0, 1]), &p(&[-3, 0, 1])).unwrap(), r(1));
    }

    #[test]
    fn resultant_zero_iff_common_root() {
        let f = &p(&[-1, 1]) * &p(&[2, 0, 1]);
        let g = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(resultant(&f, &g).unwrap(), RBig::ZERO);
        assert!(resultant(&f, &IntPolynomial::zero()).is_err());
    }

    #[test]
    fn resultant_of_constants() {
        assert_eq!(resultant(&p(&[3]), &p(&[0, 0, 1])).unwrap(), r(9));
        assert_eq!(resultant(&p(&[1, 0, 1]), &p(&[2])).unwrap(), r(4));
    }

    #[test]
    fn sturm_counts_plastic_root() {
        assert_eq!(sturm_count(&p(&[-1, -1, 0, 1]), &r(-2), &r(2)).unwrap(), 1);
        assert_eq!(real_root_count(&p(&[-1, -1, 0, 1])).unwrap(), 1);
    }

    #[test]
    fn sturm_counts_two_roots_of_degree_four() {
        assert_eq!(sturm_count(&p(&[-2, 0, 0, 0, 1]), &r(-2), &r(2)).unwrap(), 2);
    }

    #[test]
    fn sturm_rejects_endpoint_roots_and_bad_intervals() {
        let f = p(&[-1, 0, 1]);
        assert!(matches!(sturm_count(&f, &r(-1), &r(2)), Err(ExactError::EndpointIsRoot(_))));
        assert_eq!(sturm_count(&f, &r(2), &r(-2)), Err(ExactError::InvalidInterval));
    }

    #[test]
    fn sturm_ignores_multiplicity() {
        let f = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[3, 1]);
        assert_eq!(real_root_count(&f).unwrap(), 2);
    }

    fn roots_poly(roots: &[i64]) -> IntPolynomial {
        roots
            .iter()
            .fold(IntPolynomial::one(), |acc, &a| &acc * &p(&[-a, 1]))
    }

    proptest! {
        #[test]
        fn sturm_matches_known_integer_roots(roots in prop::collection::vec(-6i64..=6, 1..6), lo in -8i64..0, w in 1i64..16) {
            let f = roots_poly(&roots);
            let lo_q = RBig::from_parts(IBig::from(2 * lo + 1), UBig::from(2u8));
            let hi_q = &lo_q + RBig::from(w);
            let mut distinct: Vec<i64> = roots.clone();
            distinct.sort();
            distinct.dedup();
            let expected = distinct.iter().filter(|&&a| RBig::from(a) > lo_q && RBig::from(a) <= hi_q).count();
            prop_assert_eq!(sturm_count(&f, &lo_q, &hi_q).unwrap(), expected);
        }

        #[test]
        fn resultant_of_split_polys_is_product_of_differences(a in prop::collection::vec(-5i64..=5, 1..4), b in prop::collection::vec(-5i64..=5, 1..4)) {
            // resultant(p, q) = ∏_{β root of q} p(β)
            let expected = b.iter().fold(RBig::ONE, |acc, &bj| {
                acc * a.iter().fold(RBig::ONE, |x, &ai| x * RBig::from(bj - ai))
            });
            prop_assert_eq!(resultant(&roots_poly(&a), &roots_poly(&b)).unwrap(), expected);
        }
    }
}
