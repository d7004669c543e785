//! The potential `log φ = -Σ_{i≤s} ln Im z_i` and its (1,1)-form
//! `h = diag(1/(4 Im(z_i)²), …, 0, …)`.

use serde::Serialize;
use thiserror::Error;

use crate::ball::{Complex, Real};
use crate::field::NumberField;
use crate::ot::{act, group_mul, GroupElement, OtData, OtError, Point, Sampler};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("Im z_{index} is not certified positive")]
    OutsideDomain { index: usize },
    #[error("step 2^-{step_exp} exceeds the distance of Im z_{index} to the boundary")]
    StepTooLarge { index: usize, step_exp: u32 },
    #[error("vector has {got} components, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error(transparent)]
    Ot(#[from] OtError),
}

fn check_domain(field: &NumberField, z: &Point) -> Result<(), FormError> {
    if z.coords.len() != field.m() {
        return Err(FormError::Dimension {
            got: z.coords.len(),
            expected: field.m(),
        });
    }
    match (0..field.s()).find(|&i| !z.coords[i].im.is_positive()) {
        Some(index) => Err(FormError::OutsideDomain { index }),
        None => Ok(()),
    }
}

pub fn log_phi(field: &NumberField, z: &Point) -> Result<Real, FormError> {
    check_domain(field, z)?;
    let prec = z.coords[0].prec();
    let mut acc = Real::zero(prec);
    for i in 0..field.s() {
        let l = z.coords[i]
            .im
            .ln()
            .map_err(|_| FormError::OutsideDomain { index: i })?;
        acc = &acc - &l;
    }
    Ok(acc)
}

/// Coefficients `h_ij` of `dz_i ∧ dz̄_j`.
#[derive(Clone, Debug, Serialize)]
pub struct FormMatrix {
    pub h: Vec<Vec<Complex>>,
}

impl FormMatrix {
    pub fn dim(&self) -> usize {
        self.h.len()
    }

    /// Largest entrywise deviation bound.
    pub fn max_deviation(&self, other: &FormMatrix) -> f64 {
        self.h
            .iter()
            .flatten()
            .zip(other.h.iter().flatten())
            .map(|(a, b)| a.deviation_upper(b))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.h[i][j].overlaps(&self.h[j][i].conj())))
    }
}

pub fn omega_at(field: &NumberField, z: &Point) -> Result<FormMatrix, FormError> {
    check_domain(field, z)?;
    let m = field.m();
    let prec = z.coords[0].prec();
    let four = Real::from_i64(4, prec);
    let h = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j && i < field.s() {
                        let y = &z.coords[i].im;
                        Complex::from_real((&four * &y.sqr()).recip())
                    } else {
                        Complex::zero(prec)
                    }
                })
                .collect()
        })
        .collect();
    Ok(FormMatrix { h })
}

/// `ω(v, Iv) = 2 Re Σ h_ij v_i v̄_j`, i.e. `Σ_{i≤s} |v_i|² / (2 Im(z_i)²)`.
pub fn eval_form(field: &NumberField, z: &Point, v: &[Complex]) -> Result<Real, FormError> {
    let h = omega_at(field, z)?;
    if v.len() != h.dim() {
        return Err(FormError::Dimension {
            got: v.len(),
            expected: h.dim(),
        });
    }
    let prec = z.coords[0].prec();
    let mut acc = Complex::zero(prec);
    for (i, row) in h.h.iter().enumerate() {
        for (j, hij) in row.iter().enumerate() {
            if hij.upper_abs() == 0.0 {
                continue;
            }
            acc = &acc + &(&(hij * &v[i]) * &v[j].conj());
        }
    }
    Ok(&Real::from_i64(2, prec) * &acc.re)
}

/// Basis of `{v : ω(v, Iv) = 0}`: the coordinate directions `e_{s+1}, …, e_m`.
pub fn zero_foliation_kernel(field: &NumberField, z: &Point) -> Result<Vec<Vec<Complex>>, FormError> {
    check_domain(field, z)?;
    let prec = z.coords[0].prec();
    let m = field.m();
    Ok((field.s()..m)
        .map(|k| {
            (0..m)
                .map(|i| if i == k { Complex::one(prec) } else { Complex::zero(prec) })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DdcReport {
    pub bits: usize,
    pub step_exp: u32,
    /// `max |H_fd - h| / max |h|`, decimal upper bound.
    pub relative_error: String,
    #[serde(skip)]
    pub relative_error_f64: f64,
    /// Predicted relative truncation error `h²/(8 y⁴) / max|h|`.
    pub truncation_estimate: String,
    /// Rigorous rounding contribution from the ball radii, relative.
    pub rounding_estimate: String,
    pub threshold: String,
    pub finite_difference: FormMatrix,
    pub verdict: Verdict,
}

fn shifted(z: &Point, moves: &[(usize, i32)], step: &Real) -> Point {
    let mut p = z.clone();
    for &(coord, dir) in moves {
        let (i, imag) = (coord / 2, coord % 2 == 1);
        let d = if dir > 0 { step.clone() } else { -step };
        let c = &mut p.coords[i];
        if imag {
            c.im = &c.im + &d;
        } else {
            c.re = &c.re + &d;
        }
    }
    p
}

/// Central finite-difference `∂∂̄ log φ` in the `2m` real coordinates
/// compared with [`omega_at`]. `z` and `field` must share the precision.
pub fn verify_ddc(field: &NumberField, z: &Point, step_exp: u32, threshold: f64) -> Result<DdcReport, FormError> {
    check_domain(field, z)?;
    let prec = field.policy().working_bits;
    let z = Point {
        coords: z
            .coords
            .iter()
            .map(|c| Complex::new(c.re.with_prec(prec), c.im.with_prec(prec)))
            .collect(),
    };
    let step = Real::pow2(-(step_exp as isize), prec);
    let h_step = 2f64.powi(-(step_exp as i32));
    for i in 0..field.s() {
        if z.coords[i].im.lower_abs() <= 2.0 * h_step {
            return Err(FormError::StepTooLarge { index: i, step_exp });
        }
    }
    let m = field.m();
    let n = 2 * m;
    let f = |moves: &[(usize, i32)]| log_phi(field, &shifted(&z, moves, &step));
    let f0 = f(&[])?;
    let inv_h2 = Real::pow2(2 * step_exp as isize, prec);
    let quarter = Real::pow2(-2, prec);
    // Real Hessian D[a][b].
    let mut d = vec![vec![Real::zero(prec); n]; n];
    for a in 0..n {
        let fp = f(&[(a, 1)])?;
        let fm = f(&[(a, -1)])?;
        let two_f0 = &f0 + &f0;
        d[a][a] = &(&(&fp + &fm) - &two_f0) * &inv_h2;
        for b in (a + 1)..n {
            let num = &(&f(&[(a, 1), (b, 1)])? - &f(&[(a, 1), (b, -1)])?)
                - &(&f(&[(a, -1), (b, 1)])? - &f(&[(a, -1), (b, -1)])?);
            let v = &(&num * &inv_h2) * &quarter;
            d[a][b] = v.clone();
            d[b][a] = v;
        }
    }
    // H_ij = ¼[(D_xixj + D_yiyj) + i(D_xiyj - D_yixj)]
    let fd: Vec<Vec<Complex>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
                    let re = &(&d[xi][xj] + &d[yi][yj]) * &quarter;
                    let im = &(&d[xi][yj] - &d[yi][xj]) * &quarter;
                    Complex::new(re, im)
                })
                .collect()
        })
        .collect();
    let fd = FormMatrix { h: fd };
    let exact = omega_at(field, &z)?;
    let scale = exact
        .h
        .iter()
        .flatten()
        .map(|c| c.lower_abs())
        .fold(0.0, f64::max);
    let abs_err = fd.max_deviation(&exact);
    let rounding = fd
        .h
        .iter()
        .flatten()
        .map(|c| c.re.rad().max(c.im.rad()))
        .fold(0.0, f64::max);
    let trunc = (0..field.s())
        .map(|i| {
            let y = z.coords[i].im.mid_f64();
            h_step * h_step / (8.0 * y.powi(4))
        })
        .fold(0.0, f64::max);
    let rel = if scale > 0.0 { abs_err / scale } else { abs_err };
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(DdcReport {
        bits: prec,
        step_exp,
        relative_error: format!("{rel:e}"),
        relative_error_f64: rel,
        truncation_estimate: format!("{:e}", trunc / scale),
        rounding_estimate: format!("{:e}", rounding / scale),
        threshold: format!("{threshold:e}"),
        finite_difference: fd,
        verdict: Verdict::from_bool(rel < threshold),
    })
}

/// `h'_ij = conj(σ_i(u)) h_ij(g·z) σ_j(u)`, the pullback by the diagonal Jacobian.
pub fn pullback(field: &NumberField, g: &GroupElement, z: &Point) -> Result<FormMatrix, FormError> {
    let gz = act(field, g, z)?;
    let h = omega_at(field, &gz)?;
    let m = field.m();
    let j: Vec<Complex> = (0..m)
        .map(|i| field.embed(&g.u, i))
        .collect::<Result<_, _>>()
        .map_err(OtError::from)?;
    let out = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| &(&j[a].conj() * &h.h[a][b]) * &j[b])
                .collect()
        })
        .collect();
    Ok(FormMatrix { h: out })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub generators_checked: usize,
    pub words_checked: usize,
    pub seed: u64,
    pub max_deviation: String,
    #[serde(skip)]
    pub max_deviation_f64: f64,
    pub tolerance: String,
    pub verdict: Verdict,
}

/// Generators `(u_j, 0)` and `(1, θ^k)` of the group, with inverses.
pub fn group_generators(ot: &OtData) -> Vec<GroupElement> {
    let field = ot.field();
    let zero = field.from_ints(&[0]);
    let mut out: Vec<GroupElement> = ot
        .units()
        .generators()
        .iter()
        .map(|u| GroupElement::new(u.clone(), zero.clone()))
        .collect();
    out.extend(
        ot.translation_basis()
            .into_iter()
            .map(|a| GroupElement::new(field.one(), a)),
    );
    let inv: Vec<GroupElement> = out.iter().map(|g| g.inverse()).collect();
    out.extend(inv);
    out
}

/// Pullback invariance at one random point per generator and per random word
/// of length ≤ 5.
pub fn verify_invariance(ot: &OtData, words: usize, seed: u64) -> Result<InvarianceReport, FormError> {
    let field = ot.field();
    let gens = group_generators(ot);
    let mut rng = Sampler::new(seed ^ 0x696e_7661);
    let mut worst: f64 = 0.0;
    let mut check = |g: &GroupElement, rng: &mut Sampler| -> Result<(), FormError> {
        let z = rng.point(field);
        let lhs = pullback(field, g, &z)?;
        let rhs = omega_at(field, &z)?;
        worst = worst.max(lhs.max_deviation(&rhs));
        Ok(())
    };
    for g in &gens {
        check(g, &mut rng)?;
    }
    for _ in 0..words {
        let len = 1 + rng.index(5);
        let mut w = GroupElement::identity(field);
        for _ in 0..len {
            w = group_mul(&w, &gens[rng.index(gens.len())]);
        }
        check(&w, &mut rng)?;
    }
    let tol = field.policy().tolerance();
    Ok(InvarianceReport {
        generators_checked: gens.len(),
        words_checked: words,
        seed,
        max_deviation: format!("{worst:e}"),
        max_deviation_f64: worst,
        tolerance: format!("{tol:e}"),
        verdict: Verdict::from_bool(worst < tol),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SemipositivityReport {
    pub samples: usize,
    pub seed: u64,
    /// Smallest certified lower bound of `ω(v, Iv)` over the samples.
    pub min_lower_bound: String,
    #[serde(skip)]
    pub min_lower_bound_f64: f64,
    /// Samples with a nonzero real-coordinate component that were certified `> 0`.
    pub strictly_positive: usize,
    pub kernel_dimension_ok: bool,
    pub verdict: Verdict,
}

/// `ω(v, Iv)` over random `(z, v)`, plus kernel checks at each sample.
pub fn semipositivity_survey(field: &NumberField, samples: usize, seed: u64, tolerance: f64) -> Result<SemipositivityReport, FormError> {
    let mut rng = Sampler::new(seed ^ 0x7365_6d69);
    let prec = field.policy().working_bits;
    let mut min: f64 = f64::INFINITY;
    let mut strict = 0;
    let mut kernel_ok = true;
    for _ in 0..samples {
        let z = rng.point(field);
        let v: Vec<Complex> = (0..field.m())
            .map(|_| {
                Complex::new(
                    Real::from_f64(rng.f64_in(-3.0, 3.0), prec),
                    Real::from_f64(rng.f64_in(-3.0, 3.0), prec),
                )
            })
            .collect();
        let val = eval_form(field, &z, &v)?;
        let lower = val.mid_f64() - val.rad();
        min = min.min(lower);
        if val.is_positive() {
            strict += 1;
        }
        let ker = zero_foliation_kernel(field, &z)?;
        kernel_ok &= ker.len() == field.t();
        for k in &ker {
            kernel_ok &= eval_form(field, &z, k)?.upper_abs() == 0.0;
        }
    }
    let min = if samples == 0 { 0.0 } else { min };
    Ok(SemipositivityReport {
        samples,
        seed,
        min_lower_bound: format!("{min:e}"),
        min_lower_bound_f64: min,
        strictly_positive: strict,
        kernel_dimension_ok: kernel_ok,
        verdict: Verdict::from_bool(min >= -tolerance && kernel_ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPolynomial;
    use crate::field::build_field;
    use crate::precision::PrecisionPolicy;
    use crate::units::UnitSystem;

    fn plastic(bits: usize) -> NumberField {
        build_field(IntPolynomial::from_ints(&[-1, -1, 0, 1]), PrecisionPolicy::with_bits(bits)).unwrap()
    }

    fn pt(k: &NumberField, p: &[(f64, f64)]) -> Point {
        Point::from_f64(k, p).unwrap()
    }

    #[test]
    fn log_phi_examples() {
        let k = plastic(128);
        assert_eq!(log_phi(&k, &pt(&k, &[(0.3, 1.0), (1.0, 1.0)])).unwrap().mid_f64(), 0.0);
        let v = log_phi(&k, &pt(&k, &[(0.0, 2.0), (0.0, 0.0)])).unwrap();
        assert!((v.mid_f64() + 2f64.ln()).abs() < 1e-15);
        let q = build_field(IntPolynomial::from_ints(&[-1, -1, 0, 0, 1]), PrecisionPolicy::default()).unwrap();
        let v = log_phi(&q, &pt(&q, &[(0.0, 2.0), (0.0, 3.0), (0.0, 0.0)])).unwrap();
        assert!((v.mid_f64() + 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn omega_examples() {
        let k = plastic(128);
        let h = omega_at(&k, &pt(&k, &[(0.0, 1.0), (0.0, 0.0)])).unwrap();
        assert_eq!(h.h[0][0].re.mid_f64(), 0.25);
        assert_eq!(h.h[1][1].upper_abs(), 0.0);
        assert!(h.is_hermitian());
        let h = omega_at(&k, &pt(&k, &[(0.0, 2.0), (0.0, 0.0)])).unwrap();
        assert_eq!(h.h[0][0].re.mid_f64(), 1.0 / 16.0);
    }

    #[test]
    fn eval_form_examples() {
        let k = plastic(128);
        let z = pt(&k, &[(0.0, 1.0), (0.0, 0.0)]);
        let e1 = vec![Complex::one(128), Complex::zero(128)];
        let e2 = vec![Complex::zero(128), Complex::one(128)];
        assert_eq!(eval_form(&k, &z, &e1).unwrap().mid_f64(), 0.5);
        assert_eq!(eval_form(&k, &z, &e2).unwrap().upper_abs(), 0.0);
        assert!(eval_form(&k, &z, &[Complex::one(128)]).is_err());
    }

    #[test]
    fn kernel_dimensions() {
        let k = plastic(128);
        let z = pt(&k, &[(0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(zero_foliation_kernel(&k, &z).unwrap().len(), 1);
        let q = build_field(IntPolynomial::from_ints(&[-1, -1, 0, 0, 0, 1]), PrecisionPolicy::default()).unwrap();
        let w = pt(&q, &[(0.0, 1.0), (0.0, 0.0), (1.0, 1.0)]);
        let ker = zero_foliation_kernel(&q, &w).unwrap();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert_eq!(eval_form(&q, &w, v).unwrap().upper_abs(), 0.0);
        }
    }

    #[test]
    fn ddc_matches_closed_form() {
        let k = plastic(256);
        let z = pt(&k, &[(0.0, 1.0), (0.0, 0.0)]);
        let r = verify_ddc(&k, &z, 40, 2f64.powi(-30)).unwrap();
        assert!(r.verdict.is_pass(), "{}", r.relative_error);
        assert!(r.finite_difference.h[1][1].upper_abs() < 2f64.powi(-30));
        let k512 = plastic(512);
        let r2 = verify_ddc(&k512, &z, 40, 2f64.powi(-30)).unwrap();
        assert!(r2.relative_error_f64 <= r.relative_error_f64 * 1.0001);
    }

    #[test]
    fn ddc_rejects_large_step() {
        let k = plastic(256);
        let z = pt(&k, &[(0.0, 0.01), (0.0, 0.0)]);
        assert!(matches!(verify_ddc(&k, &z, 2, 1e-9), Err(FormError::StepTooLarge { .. })));
    }

    #[test]
    fn invariance_examples() {
        let k = plastic(128);
        let ot = OtData::new(UnitSystem::new(&k, vec![k.generator()]).unwrap()).unwrap();
        let z = pt(&k, &[(0.2, 0.7), (0.1, -0.4)]);
        let id = GroupElement::identity(&k);
        assert!(pullback(&k, &id, &z).unwrap().max_deviation(&omega_at(&k, &z).unwrap()) < 2f64.powi(-120));
        let r = verify_invariance(&ot, 20, 3).unwrap();
        assert!(r.max_deviation_f64 < 2f64.powi(-64), "{}", r.max_deviation);
    }

    #[test]
    fn semipositivity_sample() {
        let k = plastic(128);
        let r = semipositivity_survey(&k, 100, 1, 2f64.powi(-60)).unwrap();
        assert!(r.verdict.is_pass());
        assert_eq!(r.strictly_positive, 100);
    }
}
