//! Simultaneous root refinement and disk-separation certificates.

use std::cmp::Ordering;

use crate::ball::{Complex, Real};
use crate::exact::IntPolynomial;

/// Certified complex roots in the canonical order: real roots ascending, then
/// one representative with positive imaginary part per conjugate pair, then
/// the conjugates of those representatives in the same order.
#[derive(Clone, Debug)]
pub struct CertifiedRoots {
    /// Each root is a box that contains the isolating disk.
    pub roots: Vec<Complex>,
    /// Radius of the isolating disk around each midpoint.
    pub radii: Vec<f64>,
    /// Smallest certified lower bound on the distance between two midpoints.
    pub min_separation: f64,
    pub prec: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RootFailure {
    NoConvergence,
    PairingMismatch,
    DisksOverlap,
}

fn coeff_balls(p: &IntPolynomial, prec: usize) -> Vec<Real> {
    p.coeffs().iter().map(|c| Real::from_rational(c, prec)).collect()
}

fn horner(coeffs: &[Real], z: &Complex) -> Complex {
    let prec = z.prec();
    coeffs.iter().rev().fold(Complex::zero(prec), |acc, c| {
        let t = &acc * z;
        Complex::new(&t.re + c, t.im)
    })
}

fn horner_with_derivative(coeffs: &[Real], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec();
    let mut v = Complex::zero(prec);
    let mut d = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        d = &(&d * z) + &v;
        let t = &v * z;
        v = Complex::new(&t.re + c, t.im);
    }
    (v.center(), d.center())
}

fn exact_from_f64(x: f64, prec: usize) -> Real {
    Real::from_f64(x, prec.max(53)).with_prec(prec).center()
}

fn start_points(p: &IntPolynomial) -> Vec<(f64, f64)> {
    // Fujiwara-type radius; the perturbed angles avoid symmetric stalls.
    let n = p.degree();
    let lc = p.leading().to_f64().value().abs();
    let mut r: f64 = 0.0;
    for k in 1..=n {
        let a = p.coeff(n - k).to_f64().value().abs() / lc;
        r = r.max(a.powf(1.0 / k as f64));
    }
    let r = (2.0 * r).max(0.5);
    (0..n)
        .map(|k| {
            let ang = std::f64::consts::TAU * (k as f64) / (n as f64) + 0.4 + 0.01 * k as f64;
            (r * ang.cos(), r * ang.sin())
        })
        .collect()
}

/// Aberth-Ehrlich iteration on exact midpoints.
fn aberth(p: &IntPolynomial, prec: usize) -> Option<Vec<Complex>> {
    let n = p.degree();
    let coeffs = coeff_balls(p, prec);
    let mut z: Vec<Complex> = start_points(p)
        .into_iter()
        .map(|(a, b)| Complex::new(exact_from_f64(a, prec), exact_from_f64(b, prec)))
        .collect();
    // Stop well above the rounding floor, then polish twice.
    let stop = 2f64.powi(-((3 * prec / 4) as i32));
    let max_iter = 200 + 4 * prec;
    let mut polish = None;
    for _ in 0..max_iter {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (v, d) = horner_with_derivative(&coeffs, &z[i]);
            if v.upper_abs() == 0.0 {
                continue;
            }
            let newton = v.div(&d).center();
            let mut sum = Complex::zero(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    sum = &sum + &(&z[i] - zj).recip().center();
                }
            }
            let den = &Complex::one(prec) - &(&newton * &sum);
            let w = newton.div(&den).center();
            let step = w.upper_abs();
            if !step.is_finite() {
                return None;
            }
            worst = worst.max(step / (1.0 + z[i].upper_abs()));
            z[i] = (&z[i] - &w).center();
        }
        match polish {
            Some(0) => return Some(z),
            Some(k) => polish = Some(k - 1),
            None if worst <= stop => polish = Some(1),
            None => {}
        }
    }
    None
}

fn cmp_real(a: &Real, b: &Real) -> Ordering {
    a.cmp_mid(b)
}

/// Snap `s` roots to the real axis and pair the rest by conjugation.
fn canonicalize(z: Vec<Complex>, s: usize) -> Result<Vec<Complex>, RootFailure> {
    let n = z.len();
    let mut by_im: Vec<Complex> = z;
    by_im.sort_by(|a, b| {
        a.im.mid_f64()
            .abs()
            .partial_cmp(&b.im.mid_f64().abs())
            .unwrap_or(Ordering::Equal)
    });
    let mut reals: Vec<Complex> = by_im[..s]
        .iter()
        .map(|c| Complex::from_real(c.re.center()))
        .collect();
    reals.sort_by(|a, b| cmp_real(&a.re, &b.re));
    let mut reps: Vec<Complex> = by_im[s..]
        .iter()
        .filter(|c| c.im.is_positive())
        .cloned()
        .collect();
    if 2 * reps.len() != n - s {
        return Err(RootFailure::PairingMismatch);
    }
    reps.sort_by(|a, b| cmp_real(&a.re, &b.re).then_with(|| cmp_real(&a.im, &b.im)));
    let conj: Vec<Complex> = reps.iter().map(|c| c.conj()).collect();
    Ok(reals.into_iter().chain(reps).chain(conj).collect())
}

/// Weierstrass-correction disks `n·|p(z_i)| / |lc·∏(z_i - z_j)|`; accepted
/// only when every radius is below half the distance to every other midpoint.
fn certify(p: &IntPolynomial, z: Vec<Complex>) -> Result<CertifiedRoots, RootFailure> {
    let n = z.len();
    let prec = z[0].prec();
    let coeffs = coeff_balls(p, prec);
    let lc = Real::from_rational(&p.leading(), prec);
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let v = horner(&coeffs, &z[i]);
        let mut den = Complex::from_real(lc.clone());
        for (j, zj) in z.iter().enumerate() {
            if j != i {
                den = &den * &(&z[i] - zj);
            }
        }
        let lower = den.lower_abs();
        if lower <= 0.0 {
            return Err(RootFailure::DisksOverlap);
        }
        let r = (n as f64 * v.upper_abs() / lower).next_up();
        radii.push(r);
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (&z[i] - &z[j]).lower_abs();
            min_sep = min_sep.min(d);
            if !(2.0 * radii[i] < d && 2.0 * radii[j] < d) {
                return Err(RootFailure::DisksOverlap);
            }
        }
    }
    let roots = z
        .into_iter()
        .zip(&radii)
        .map(|(c, &r)| {
            if c.is_exactly_real() {
                Complex::new(c.re.inflate(r), c.im)
            } else {
                Complex::new(c.re.inflate(r), c.im.inflate(r))
            }
        })
        .collect();
    Ok(CertifiedRoots {
        roots,
        radii,
        min_separation: min_sep,
        prec,
    })
}

/// Isolates and certifies all roots of a squarefree polynomial with exactly
/// `s` real roots, at `prec` bits.
pub(crate) fn certified_roots(
    p: &IntPolynomial,
    s: usize,
    prec: usize,
) -> Result<CertifiedRoots, RootFailure> {
    let z = aberth(p, prec).ok_or(RootFailure::NoConvergence)?;
    let z = canonicalize(z, s)?;
    certify(p, z)
}

/// Midpoint of a root as a bare float pair, for diagnostics.
#[cfg(test)]
fn midpoint_f64(c: &Complex) -> (f64, f64) {
    (c.re.mid_f64(), c.im.mid_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plastic_roots_certified() {
        let p = IntPolynomial::from_ints(&[-1, -1, 0, 1]);
        let r = certified_roots(&p, 1, 128).unwrap();
        assert_eq!(r.roots.len(), 3);
        assert!(r.roots[0].is_exactly_real());
        assert!((r.roots[0].re.mid_f64() - 1.324717957244746).abs() < 1e-12);
        assert!(r.roots[1].im.is_positive());
        assert!(r.radii.iter().all(|&x| x < 1e-30));
    }

    #[test]
    fn quartic_with_two_pairs() {
        let p = IntPolynomial::from_ints(&[1, 0, 0, 0, 1]);
        let r = certified_roots(&p, 0, 128).unwrap();
        let (a, b) = midpoint_f64(&r.roots[0]);
        let (c, d) = midpoint_f64(&r.roots[1]);
        assert!(a < c && b > 0.0 && d > 0.0);
        assert_eq!(midpoint_f64(&r.roots[2]), (a, -b));
    }
}
