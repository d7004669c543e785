//! Small dense linear algebra on real balls.

use crate::ball::Real;

/// Determinant enclosure by partial-pivot elimination.
///
/// When no remaining pivot can be certified nonzero, the Hadamard bound on
/// the trailing block yields a ball centered at zero.
pub fn det(matrix: &[Vec<Real>], prec: usize) -> Real {
    let n = matrix.len();
    if n == 0 {
        return Real::one(prec);
    }
    let mut a: Vec<Vec<Real>> = matrix.to_vec();
    let mut acc = Real::one(prec);
    for k in 0..n {
        let (best, best_lower) = (k..n)
            .map(|r| (r, a[r][k].lower_abs()))
            .fold((k, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if best_lower <= 0.0 {
            let h = hadamard(&a[k..], k);
            let bound = acc.upper_abs() * h;
            return Real::from_parts(crate::ball::Float::ZERO, bound.next_up(), prec);
        }
        if best != k {
            a.swap(best, k);
            acc = -acc;
        }
        let piv = a[k][k].clone();
        acc = &acc * &piv;
        for i in (k + 1)..n {
            let f = a[i][k].div(&piv);
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
    }
    acc
}

// ∏ ‖row[from..]‖₂, rounded up.
fn hadamard(rows: &[Vec<Real>], from: usize) -> f64 {
    rows.iter()
        .map(|r| {
            r[from..]
                .iter()
                .map(|x| x.upper_abs() * x.upper_abs())
                .sum::<f64>()
                .sqrt()
                * (1.0 + 1e-12)
        })
        .product()
}

/// Outcome of a numerical rank computation with a tolerance band.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOutcome {
    /// Number of pivots certified nonzero.
    pub rank: usize,
    /// True when some pivot fell between `tol` and `sqrt(tol)`.
    pub inconclusive: bool,
}

/// Rank by full-pivot elimination. A remaining block whose entries are all
/// below `tol` counts as zero; a pivot above `sqrt(tol)` counts as nonzero.
pub fn rank(matrix: &[Vec<Real>], tol: f64) -> RankOutcome {
    let mut a: Vec<Vec<Real>> = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let accept = tol.sqrt();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best = (r, r);
        let mut best_mid = -1.0;
        let mut all_small = true;
        for i in r..rows {
            for j in r..cols {
                let v = &a[i][j];
                if v.upper_abs() >= tol {
                    all_small = false;
                }
                let m = v.mid_f64().abs();
                if m > best_mid {
                    best_mid = m;
                    best = (i, j);
                }
            }
        }
        if all_small {
            return RankOutcome {
                rank: r,
                inconclusive: false,
            };
        }
        let (pi, pj) = best;
        if a[pi][pj].lower_abs() <= accept {
            return RankOutcome {
                rank: r,
                inconclusive: true,
            };
        }
        a.swap(r, pi);
        for row in a.iter_mut() {
            row.swap(r, pj);
        }
        let piv = a[r][r].clone();
        for i in (r + 1)..rows {
            let f = a[i][r].div(&piv);
            for j in r..cols {
                let t = &f * &a[r][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
        r += 1;
    }
    RankOutcome {
        rank: r,
        inconclusive: false,
    }
}

/// `A·Aᵀ` for a row set.
pub fn gram(rows: &[Vec<Real>], prec: usize) -> Vec<Vec<Real>> {
    rows.iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    a.iter()
                        .zip(b)
                        .fold(Real::zero(prec), |acc, (x, y)| &acc + &(x * y))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 128;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Real>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Real::from_i64(x, P)).collect())
            .collect()
    }

    #[test]
    fn integer_determinants() {
        assert_eq!(det(&m(&[&[2, 1], &[1, 1]]), P).mid_f64(), 1.0);
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]]), P).mid_f64(), -1.0);
        let d = det(&m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]), P);
        assert!((d.mid_f64() + 3.0).abs() < 1e-30);
    }

    #[test]
    fn singular_matrix_gives_ball_around_zero() {
        let d = det(&m(&[&[1, 2], &[2, 4]]), P);
        assert!(d.contains_zero());
    }

    #[test]
    fn ranks() {
        let tol = 2f64.powi(-64);
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]]), tol).rank, 1);
        assert_eq!(rank(&m(&[&[1, 0, 0], &[0, 1, 0]]), tol).rank, 2);
        assert_eq!(rank(&m(&[&[0, 0]]), tol).rank, 0);
        assert_eq!(rank(&[], tol).rank, 0);
    }

    #[test]
    fn tiny_pivot_is_inconclusive() {
        let tol = 2f64.powi(-64);
        let tiny = Real::pow2(-40, P);
        let a = vec![vec![Real::one(P), Real::zero(P)], vec![Real::zero(P), tiny]];
        let r = rank(&a, tol);
        assert!(r.inconclusive);
        assert_eq!(r.rank, 1);
    }
}
