//! Inoue surfaces of type S⁰ from unimodular integer 3×3 matrices.

use serde::Serialize;
use thiserror::Error;

use crate::ball::{Complex, Real};
use crate::exact::{AlgebraicNumber, IntPolynomial};
use crate::field::{build_field, eval_at, FieldError, NumberField};
use crate::linalg;
use crate::ot::{act, GroupElement, OtData, OtError, Sampler};
use crate::precision::PrecisionPolicy;
use crate::units::{UnitError, UnitSystem};
use crate::verdict::Verdict;

pub type Matrix3 = [[i64; 3]; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InoueError {
    #[error("determinant is {0}, expected 1")]
    DetNotOne(i128),
    #[error("1 is an eigenvalue, so c equals 1")]
    CEqualsOne,
    #[error("all eigenvalues are real")]
    AllRealSpectrum,
    #[error("field has degree {0}, expected 3")]
    NotCubic(usize),
    #[error("field has signature ({0}, {1}), expected (1, 1)")]
    Signature(usize, usize),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("real image of the unit is not positive")]
    NotPositive,
    #[error("unit has norm -1; pass its square instead")]
    NormMinusOne,
    #[error("multiplication matrix has non-integer entries")]
    NonIntegralMatrix,
    #[error("matrix eigenvalues do not match the embeddings of the unit")]
    EigenMismatch,
    #[error("entry of size {0} does not fit in 64 bits")]
    Overflow(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Unit(#[from] UnitError),
    #[error(transparent)]
    Ot(#[from] OtError),
}

#[derive(Clone, Debug, Serialize)]
pub struct InoueData {
    pub matrix: Matrix3,
    pub char_poly: IntPolynomial,
    pub c: Real,
    pub alpha: Complex,
    pub real_eigvec: Vec<Real>,
    pub complex_eigvec: Vec<Complex>,
    /// Upper bound on `| |α|² c - 1 |`.
    pub unimodularity_residual: String,
    #[serde(skip)]
    pub unimodularity_residual_f64: f64,
    pub generators: Vec<String>,
    pub bits: usize,
    #[serde(skip)]
    pub tolerance: f64,
}

fn det3(m: &Matrix3) -> i128 {
    let e = |i: usize, j: usize| m[i][j] as i128;
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

/// `M - tI` with polynomial entries.
fn shifted(m: &Matrix3) -> Vec<Vec<IntPolynomial>> {
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let c = IntPolynomial::constant(m[i][j].into());
                    if i == j {
                        &c - &IntPolynomial::x()
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect()
}

fn adjugate(a: &[Vec<IntPolynomial>]) -> Vec<Vec<IntPolynomial>> {
    // adj[i][j] = cofactor(j, i)
    let minor = |r: usize, c: usize| {
        let rs: Vec<usize> = (0..3).filter(|&x| x != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&x| x != c).collect();
        &(&a[rs[0]][cs[0]] * &a[rs[1]][cs[1]]) - &(&a[rs[0]][cs[1]] * &a[rs[1]][cs[0]])
    };
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let m = minor(j, i);
                    if (i + j) % 2 == 0 {
                        m
                    } else {
                        -&m
                    }
                })
                .collect()
        })
        .collect()
}

/// `det(tI - M)`.
pub fn char_poly(m: &Matrix3) -> IntPolynomial {
    let a = shifted(m);
    let d = &(&a[0][0] * &(&(&a[1][1] * &a[2][2]) - &(&a[1][2] * &a[2][1])))
        - &(&a[0][1] * &(&(&a[1][0] * &a[2][2]) - &(&a[1][2] * &a[2][0])));
    let d = &d + &(&a[0][2] * &(&(&a[1][0] * &a[2][1]) - &(&a[1][1] * &a[2][0])));
    -&d
}

/// Kernel vector of `M - λI` from the adjugate column of largest norm,
/// scaled so its largest entry is 1.
fn eigvec(adj: &[Vec<IntPolynomial>], lambda: &Complex) -> Vec<Complex> {
    let vals: Vec<Vec<Complex>> = adj
        .iter()
        .map(|row| row.iter().map(|p| eval_at(p, lambda)).collect())
        .collect();
    let col_norm = |j: usize| (0..3).map(|i| vals[i][j].mid_distance(&Complex::zero(lambda.prec()))).sum::<f64>();
    let j = (0..3).fold(0, |b, j| if col_norm(j) > col_norm(b) { j } else { b });
    let v: Vec<Complex> = (0..3).map(|i| vals[i][j].clone()).collect();
    let k = (0..3).fold(0, |b, i| {
        if v[i].mid_distance(&Complex::zero(lambda.prec())) > v[b].mid_distance(&Complex::zero(lambda.prec())) {
            i
        } else {
            b
        }
    });
    let piv = v[k].clone();
    (0..3)
        .map(|i| if i == k { Complex::one(lambda.prec()) } else { v[i].div(&piv) })
        .collect()
}

pub fn inoue_from_matrix(m: &Matrix3, policy: PrecisionPolicy) -> Result<InoueData, InoueError> {
    let d = det3(m);
    if d != 1 {
        return Err(InoueError::DetNotOne(d));
    }
    let chi = char_poly(m);
    if chi.eval(&1.into()) == 0.into() {
        return Err(InoueError::CEqualsOne);
    }
    // A repeated root of a real cubic forces a real spectrum.
    if !chi.is_squarefree() {
        return Err(InoueError::AllRealSpectrum);
    }
    let field = build_field(chi.clone(), policy)?;
    if field.s() != 1 {
        return Err(InoueError::AllRealSpectrum);
    }
    let prec = field.roots().prec;
    let c = field.root(0).re.clone();
    let alpha = field.root(1).clone();
    let adj = adjugate(&shifted(m));
    let real_eigvec: Vec<Real> = eigvec(&adj, field.root(0)).into_iter().map(|z| z.re).collect();
    let complex_eigvec = eigvec(&adj, &alpha);
    let residual = &(&alpha.norm_sqr() * &c) - &Real::one(prec);
    let res = residual.upper_abs();
    // Coordinates z1 in C, z2 in the upper half-plane.
    let mut generators = vec!["g0: (z1, z2) -> (alpha z1, c z2)".to_string()];
    generators.extend((1..=3).map(|i| format!("g{i}: (z1, z2) -> (z1 + alpha_{i}, z2 + c_{i})")));
    Ok(InoueData {
        matrix: *m,
        char_poly: chi,
        c,
        alpha,
        real_eigvec,
        complex_eigvec,
        unimodularity_residual: format!("{res:e}"),
        unimodularity_residual_f64: res,
        generators,
        bits: prec,
        tolerance: policy.tolerance(),
    })
}

/// Multiplication-by-`u` matrix on `(1, θ, θ²)`, columns are images.
pub fn multiplication_matrix(field: &NumberField, u: &AlgebraicNumber) -> Result<Matrix3, InoueError> {
    let n = field.degree();
    if n != 3 {
        return Err(InoueError::NotCubic(n));
    }
    let mut m = [[0i64; 3]; 3];
    let mut basis = field.one();
    for j in 0..3 {
        let img = u * &basis;
        let r = img.residue();
        for (i, row) in m.iter_mut().enumerate() {
            let c = r.coeff(i);
            if c.denominator() != &dashu::integer::UBig::ONE {
                return Err(InoueError::NonIntegralMatrix);
            }
            row[j] = i64::try_from(c.numerator().clone()).map_err(|_| InoueError::Overflow(c.to_string()))?;
        }
        basis = &basis * &field.generator();
    }
    Ok(m)
}

fn check_cubic_unit(field: &NumberField, u: &AlgebraicNumber) -> Result<(), InoueError> {
    if field.degree() != 3 {
        return Err(InoueError::NotCubic(field.degree()));
    }
    if field.signature() != (1, 1) {
        let (s, t) = field.signature();
        return Err(InoueError::Signature(s, t));
    }
    if !field.is_unit(u)? {
        return Err(InoueError::NotAUnit);
    }
    if field.norm(u)? != 1.into() {
        return Err(InoueError::NormMinusOne);
    }
    if !field.embed(u, 0)?.re.is_positive() {
        return Err(InoueError::NotPositive);
    }
    Ok(())
}

pub fn inoue_from_cubic(field: &NumberField, u: &AlgebraicNumber) -> Result<InoueData, InoueError> {
    check_cubic_unit(field, u)?;
    let m = multiplication_matrix(field, u)?;
    let d = inoue_from_matrix(&m, field.policy())?;
    let s1 = field.embed(u, 0)?;
    let s2 = field.embed(u, 1)?;
    let c_ok = Complex::from_real(d.c.clone()).overlaps(&s1);
    let a_ok = d.alpha.overlaps(&s2) || d.alpha.overlaps(&s2.conj());
    if !(c_ok && a_ok) {
        return Err(InoueError::EigenMismatch);
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub det: Real,
    pub verdict: Verdict,
}

/// Real independence of `(Re α_i, Im α_i, c_i)`, `i = 1..3`.
pub fn verify_lattice_rank(d: &InoueData) -> LatticeReport {
    let rows: Vec<Vec<Real>> = (0..3)
        .map(|i| {
            vec![
                d.complex_eigvec[i].re.clone(),
                d.complex_eigvec[i].im.clone(),
                d.real_eigvec[i].clone(),
            ]
        })
        .collect();
    let det = linalg::det(&rows, d.bits);
    let verdict = if det.lower_abs() > d.tolerance {
        Verdict::Pass
    } else if det.upper_abs() < d.tolerance {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    LatticeReport { det, verdict }
}

#[derive(Clone, Debug, Serialize)]
pub struct OtAgreement {
    pub trials: usize,
    pub seed: u64,
    /// The complex coordinate matches the conjugate of the OT coordinate.
    pub conjugated: bool,
    pub max_deviation: String,
    #[serde(skip)]
    pub max_deviation_f64: f64,
    pub verdict: Verdict,
}

/// Compares the OT action of `(u^k, a)` on `ℍ × ℂ` with the Inoue action of
/// `g0^k` followed by the translations `Σ a_i g_i`, after the linear change of
/// coordinates `(w, z) ↦ (κ_r w, κ_c z)` that matches the two lattices.
/// The Inoue side is built from the transpose of the multiplication matrix,
/// whose eigenvectors are the embedding vectors `(1, σ(θ), σ(θ²))`.
pub fn compare_with_ot(field: &NumberField, u: &AlgebraicNumber, trials: usize, seed: u64) -> Result<OtAgreement, InoueError> {
    check_cubic_unit(field, u)?;
    let m = multiplication_matrix(field, u)?;
    let mt: Matrix3 = std::array::from_fn(|i| std::array::from_fn(|j| m[j][i]));
    let d = inoue_from_matrix(&mt, field.policy())?;
    let ot = OtData::new(UnitSystem::new(field, vec![u.clone()])?)?;
    let prec = d.bits;
    let s2 = field.embed(u, 1)?;
    let conjugated = !d.alpha.overlaps(&s2);
    let kr = d.real_eigvec[0].clone();
    let kc = d.complex_eigvec[0].clone();
    let phi_z = |z: &Complex| if conjugated { &kc * &z.conj() } else { &kc * z };
    let mut rng = Sampler::new(seed ^ 0x696e_6f75);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let k = rng.index(5) as i64 - 2;
        let a = rng.integer(field, 5);
        let g = GroupElement::new(u.pow(k).map_err(|_| InoueError::NotAUnit)?, a.clone());
        let p = rng.point(field);
        let q = act(ot.field(), &g, &p)?;
        let (w, z) = (&p.coords[0].re, &p.coords[0].im);
        let w = Complex::new(w.clone(), z.clone());
        let cw = Complex::from_real(kr.clone());
        let lhs_w = &cw * &q.coords[0];
        let lhs_z = phi_z(&q.coords[1]);
        let ck = Complex::from_real(d.c.clone()).pow(k.unsigned_abs() as u32);
        let ak = d.alpha.pow(k.unsigned_abs() as u32);
        let (ck, ak) = if k < 0 { (ck.recip(), ak.recip()) } else { (ck, ak) };
        let mut rhs_w = &ck * &(&cw * &w);
        let mut rhs_z = &ak * &phi_z(&p.coords[1]);
        for i in 0..3 {
            let n = Real::from_rational(&a.residue().coeff(i), prec);
            rhs_w = &rhs_w + &Complex::from_real(&n * &d.real_eigvec[i]);
            rhs_z = &rhs_z + &d.complex_eigvec[i].scale(&n);
        }
        worst = worst.max(lhs_w.deviation_upper(&rhs_w)).max(lhs_z.deviation_upper(&rhs_z));
    }
    let tol = field.policy().tolerance();
    Ok(OtAgreement {
        trials,
        seed,
        conjugated,
        max_deviation: format!("{worst:e}"),
        max_deviation_f64: worst,
        verdict: Verdict::from_bool(worst < tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMPANION: Matrix3 = [[0, 0, 1], [1, 0, 1], [0, 1, 0]];

    fn plastic() -> NumberField {
        build_field(IntPolynomial::from_ints(&[-1, -1, 0, 1]), PrecisionPolicy::default()).unwrap()
    }

    #[test]
    fn companion_matrix_of_plastic_polynomial() {
        let d = inoue_from_matrix(&COMPANION, PrecisionPolicy::default()).unwrap();
        assert_eq!(d.char_poly, IntPolynomial::from_ints(&[-1, -1, 0, 1]));
        assert!((d.c.mid_f64() - 1.324_717_957).abs() < 1e-9);
        assert!((d.alpha.norm_sqr().mid_f64() - 0.754_877_666).abs() < 1e-9);
        assert!(d.unimodularity_residual_f64 < 2f64.powi(-60));
        assert!(verify_lattice_rank(&d).verdict.is_pass());
    }

    #[test]
    fn eigenvectors_solve_the_system() {
        let d = inoue_from_matrix(&COMPANION, PrecisionPolicy::default()).unwrap();
        let p = d.bits;
        for i in 0..3 {
            let mut mv = Complex::zero(p);
            let mut mr = Real::zero(p);
            for j in 0..3 {
                let e = Real::from_i64(COMPANION[i][j], p);
                mv = &mv + &d.complex_eigvec[j].scale(&e);
                mr = &mr + &(&e * &d.real_eigvec[j]);
            }
            assert!(mv.deviation_upper(&(&d.alpha * &d.complex_eigvec[i])) < 2f64.powi(-100));
            assert!((&mr - &(&d.c * &d.real_eigvec[i])).upper_abs() < 2f64.powi(-100));
        }
    }

    #[test]
    fn rejections() {
        let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        assert_eq!(inoue_from_matrix(&id, PrecisionPolicy::default()).unwrap_err(), InoueError::CEqualsOne);
        let real = [[-1, 0, 0], [0, 1, 1], [0, 1, 0]];
        assert_eq!(inoue_from_matrix(&real, PrecisionPolicy::default()).unwrap_err(), InoueError::AllRealSpectrum);
        let two = [[2, 0, 0], [0, 1, 1], [0, 1, 0]];
        assert_eq!(inoue_from_matrix(&two, PrecisionPolicy::default()).unwrap_err(), InoueError::DetNotOne(-2));
        let rot = [[1, 0, 0], [0, 0, -1], [0, 1, 0]];
        assert_eq!(inoue_from_matrix(&rot, PrecisionPolicy::default()).unwrap_err(), InoueError::CEqualsOne);
    }

    #[test]
    fn plastic_unit_matrix() {
        let k = plastic();
        let m = multiplication_matrix(&k, &k.generator()).unwrap();
        assert_eq!(m, COMPANION);
        let d = inoue_from_cubic(&k, &k.generator()).unwrap();
        assert!(Complex::from_real(d.c.clone()).overlaps(&k.embed(&k.generator(), 0).unwrap()));
        assert!(matches!(inoue_from_cubic(&k, &k.one()), Err(InoueError::CEqualsOne)));
    }

    #[test]
    fn cube_root_of_two_unit() {
        let k = build_field(IntPolynomial::from_ints(&[-2, 0, 0, 1]), PrecisionPolicy::default()).unwrap();
        let u = k.from_ints(&[-1, 1]);
        assert_eq!(k.norm(&u).unwrap(), 1.into());
        let d = inoue_from_cubic(&k, &u).unwrap();
        assert!(verify_lattice_rank(&d).verdict.is_pass());
        // 1 + θ + θ² = 1/(θ - 1) has norm 1 and σ₁ > 0.
        let v = k.from_ints(&[1, 1, 1]);
        assert!(inoue_from_cubic(&k, &v).is_ok());
    }

    #[test]
    fn norm_minus_one_hint() {
        let k = build_field(IntPolynomial::from_ints(&[1, -1, 0, 1]), PrecisionPolicy::default()).unwrap();
        let u = k.generator();
        assert_eq!(k.norm(&u).unwrap(), (-1).into());
        assert_eq!(inoue_from_cubic(&k, &u).unwrap_err(), InoueError::NormMinusOne);
    }

    #[test]
    fn degenerate_and_scaled_lattices() {
        let mut d = inoue_from_matrix(&COMPANION, PrecisionPolicy::default()).unwrap();
        let two = Real::from_i64(2, d.bits);
        let mut scaled = d.clone();
        scaled.real_eigvec = scaled.real_eigvec.iter().map(|x| &two * x).collect();
        assert!(verify_lattice_rank(&scaled).verdict.is_pass());
        d.complex_eigvec = d.real_eigvec.iter().map(|x| Complex::from_real(x.clone())).collect();
        assert_eq!(verify_lattice_rank(&d).verdict, Verdict::Fail);
    }

    #[test]
    fn agrees_with_ot_action() {
        let k = plastic();
        let r = compare_with_ot(&k, &k.generator(), 50, 7).unwrap();
        assert!(r.verdict.is_pass(), "{}", r.max_deviation);
        let k2 = build_field(IntPolynomial::from_ints(&[-2, 0, 0, 1]), PrecisionPolicy::default()).unwrap();
        let r = compare_with_ot(&k2, &k2.from_ints(&[-1, 1]), 50, 7).unwrap();
        assert!(r.verdict.is_pass(), "{}", r.max_deviation);
    }
}
