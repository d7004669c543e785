//! Units, the log map, rank and admissibility certificates, and a bounded
//! search for units in ℤ[θ].

use std::cmp::Ordering;
use std::collections::BTreeMap;

use dashu::base::Abs;
use dashu::rational::RBig;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ball::{BallError, Real};
use crate::exact::AlgebraicNumber;
use crate::field::{FieldError, NumberField};
use crate::linalg;
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("generator {index} is not a unit")]
    NotAUnit { index: usize },
    #[error("embedding {index} of a unit is not certified nonzero: {source}")]
    Precision { index: usize, source: BallError },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `(ln|σ_1(u)|, …, ln|σ_s(u)|, 2 ln|σ_{s+1}(u)|, …, 2 ln|σ_{s+t}(u)|)`.
pub fn log_map(field: &NumberField, u: &AlgebraicNumber) -> Result<Vec<Real>, UnitError> {
    let s = field.s();
    (0..field.m())
        .map(|i| {
            let z = field.embed(u, i)?;
            let v = if i < s { z.re.abs() } else { z.norm_sqr() };
            v.ln().map_err(|source| UnitError::Precision { index: i, source })
        })
        .collect()
}

/// `Σ_j l_j`, which vanishes for units.
pub fn log_sum(log: &[Real]) -> Real {
    let prec = log.first().map_or(64, |x| x.prec());
    log.iter().fold(Real::zero(prec), |a, x| &a + x)
}

/// Euclidean norm of the full log vector.
pub fn log_height(log: &[Real]) -> Real {
    let prec = log.first().map_or(64, |x| x.prec());
    let sq = log.iter().fold(Real::zero(prec), |a, x| &a + &x.sqr());
    sq.sqrt().unwrap_or(sq)
}

/// A finite set of unit generators with their log rows.
#[derive(Clone, Debug)]
pub struct UnitSystem {
    field: NumberField,
    generators: Vec<AlgebraicNumber>,
    log_matrix: Vec<Vec<Real>>,
    positivity: Vec<bool>,
}

impl UnitSystem {
    /// Validates every generator as a unit and computes its log row.
    pub fn new(field: &NumberField, generators: Vec<AlgebraicNumber>) -> Result<Self, UnitError> {
        let mut log_matrix = Vec::with_capacity(generators.len());
        let mut positivity = Vec::with_capacity(generators.len());
        for (index, g) in generators.iter().enumerate() {
            if !field.is_unit(g)? {
                return Err(UnitError::NotAUnit { index });
            }
            log_matrix.push(log_map(field, g)?);
            positivity.push(is_totally_positive(field, g)?);
        }
        Ok(Self {
            field: field.clone(),
            generators,
            log_matrix,
            positivity,
        })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn generators(&self) -> &[AlgebraicNumber] {
        &self.generators
    }

    pub fn log_matrix(&self) -> &[Vec<Real>] {
        &self.log_matrix
    }

    pub fn positivity_flags(&self) -> &[bool] {
        &self.positivity
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Largest `|Σ_j l_j|` upper bound over the rows.
    pub fn max_log_sum(&self) -> f64 {
        self.log_matrix
            .iter()
            .map(|r| log_sum(r).upper_abs())
            .fold(0.0, f64::max)
    }
}

/// True when every real embedding of `u` is certified positive.
pub fn is_totally_positive(field: &NumberField, u: &AlgebraicNumber) -> Result<bool, UnitError> {
    for i in 0..field.s() {
        let z = field.embed(u, i)?;
        if !z.re.is_positive() {
            if z.re.is_negative() {
                return Ok(false);
            }
            return Err(UnitError::Precision {
                index: i,
                source: BallError::LogDomain(z.re.lower_abs()),
            });
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub expected: usize,
    pub generators: usize,
    pub verdict: Verdict,
}

/// Numerical rank of the log matrix against the Dirichlet rank `s + t - 1`.
pub fn dirichlet_rank_check(us: &UnitSystem) -> RankReport {
    let expected = us.field.m() - 1;
    let tol = us.field.policy().tolerance();
    let out = linalg::rank(&us.log_matrix, tol);
    let verdict = if out.inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(out.rank <= expected && out.rank == us.len().min(expected))
    };
    RankReport {
        rank: out.rank,
        expected,
        generators: us.len(),
        verdict,
    }
}

/// Squares every unit with a negative real embedding.
pub fn positivity_enforce(
    field: &NumberField,
    gens: &[AlgebraicNumber],
) -> Result<Vec<AlgebraicNumber>, UnitError> {
    gens.iter()
        .map(|g| {
            if is_totally_positive(field, g)? {
                Ok(g.clone())
            } else {
                Ok(g * g)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    Admissible,
    NotAdmissible,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityCertificate {
    /// First-s log coordinates, one row per generator.
    pub projected_matrix: Vec<Vec<Real>>,
    pub det: Real,
    /// Certified lower bound on `|det|`, as a decimal string.
    pub det_abs_lower: String,
    #[serde(skip)]
    pub det_abs_lower_f64: f64,
    pub verdict: Admissibility,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl AdmissibilityCertificate {
    pub fn verdict(&self) -> Verdict {
        match self.verdict {
            Admissibility::Admissible => Verdict::Pass,
            Admissibility::NotAdmissible => Verdict::Fail,
            Admissibility::Inconclusive => Verdict::Inconclusive,
        }
    }
}

fn projected(us: &UnitSystem) -> Vec<Vec<Real>> {
    let s = us.field.s();
    us.log_matrix.iter().map(|r| r[..s].to_vec()).collect()
}

/// `s×s` determinant test on the first-s log coordinates.
pub fn admissibility_check(us: &UnitSystem) -> AdmissibilityCertificate {
    let s = us.field.s();
    let prec = us.field.policy().working_bits;
    let tol = us.field.policy().tolerance();
    let proj = projected(us);
    let square = proj.len() == s && s > 0;
    let det = if square {
        linalg::det(&proj, prec)
    } else {
        Real::zero(prec)
    };
    let lower = if square { det.lower_abs() } else { 0.0 };
    let (verdict, reason) = if s == 0 {
        (Admissibility::NotAdmissible, Some("field has no real embedding".into()))
    } else if proj.len() != s {
        (
            Admissibility::NotAdmissible,
            Some(format!("{} generators, expected s = {s}", proj.len())),
        )
    } else if let Some(k) = us.positivity.iter().position(|p| !p) {
        (
            Admissibility::NotAdmissible,
            Some(format!("generator {k} has a negative real embedding")),
        )
    } else if lower > tol {
        (Admissibility::Admissible, None)
    } else if det.upper_abs() < tol {
        (Admissibility::NotAdmissible, Some("projected determinant vanishes".into()))
    } else {
        (
            Admissibility::Inconclusive,
            Some("determinant within the tolerance band".into()),
        )
    };
    AdmissibilityCertificate {
        projected_matrix: proj,
        det_abs_lower: format!("{lower:e}"),
        det_abs_lower_f64: lower,
        det,
        verdict,
        reason,
    }
}

/// Coefficient vector padded to the field degree.
fn padded(x: &AlgebraicNumber, n: usize) -> Vec<RBig> {
    (0..n).map(|k| x.residue().coeff(k)).collect()
}

fn rep_order(field: &NumberField, a: &AlgebraicNumber, b: &AlgebraicNumber) -> Ordering {
    let n = field.degree();
    let (ca, cb) = (padded(a, n), padded(b, n));
    let l1 = |c: &[RBig]| c.iter().fold(RBig::ZERO, |acc, x| acc + x.clone().abs());
    let linf = |c: &[RBig]| c.iter().map(|x| x.clone().abs()).max().unwrap_or(RBig::ZERO);
    let neg = |x: &AlgebraicNumber| {
        field.s() > 0 && field.embed(x, 0).map(|z| z.re.is_negative()).unwrap_or(false)
    };
    l1(&ca)
        .cmp(&l1(&cb))
        .then_with(|| linf(&ca).cmp(&linf(&cb)))
        .then_with(|| neg(a).cmp(&neg(b)))
        .then_with(|| ca.cmp(&cb))
}

/// Canonical member of `{u, -u, u⁻¹, -u⁻¹}`: smallest coefficients, then a
/// positive first real embedding.
pub fn canonical_unit(field: &NumberField, u: &AlgebraicNumber) -> Result<AlgebraicNumber, UnitError> {
    let inv = u.inverse().map_err(FieldError::from)?;
    let class = [u.clone(), -u, inv.clone(), -&inv];
    Ok(class
        .into_iter()
        .min_by(|a, b| rep_order(field, a, b))
        .expect("nonempty class"))
}

fn decode(mut idx: u64, n: usize, bound: i64) -> Vec<i64> {
    let w = (2 * bound + 1) as u64;
    (0..n)
        .map(|_| {
            let c = (idx % w) as i64 - bound;
            idx /= w;
            c
        })
        .collect()
}

/// Enumerates `[-bound, bound]^n` power-basis coordinates and returns
/// distinct units up to `±u^{±1}`, sorted by log height.
pub fn unit_search(field: &NumberField, coeff_bound: u32, max_results: usize) -> Vec<AlgebraicNumber> {
    let n = field.degree();
    let bound = coeff_bound as i64;
    if bound == 0 {
        return Vec::new();
    }
    let roots: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let r = field.root(i);
            (r.re.mid_f64(), r.im.mid_f64())
        })
        .collect();
    let total = ((2 * bound + 1) as u64).pow(n as u32);
    let candidates: Vec<Vec<i64>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let c = decode(idx, n, bound);
            approx_unit(&c, &roots).then_some(c)
        })
        .collect();
    let mut reps: BTreeMap<Vec<RBig>, (AlgebraicNumber, Real)> = BTreeMap::new();
    for c in candidates {
        let x = field.from_ints(&c);
        if x.is_rational() {
            continue; // 0 and ±1
        }
        let nrm = x.norm();
        if nrm != RBig::ONE && nrm != -RBig::ONE {
            continue;
        }
        let Ok(rep) = canonical_unit(field, &x) else { continue };
        let key = padded(&rep, n);
        if reps.contains_key(&key) {
            continue;
        }
        let Ok(log) = log_map(field, &rep) else { continue };
        reps.insert(key, (rep, log_height(&log)));
    }
    let mut found: Vec<(Vec<RBig>, AlgebraicNumber, Real)> =
        reps.into_iter().map(|(k, (u, h))| (k, u, h)).collect();
    found.sort_by(|a, b| a.2.cmp_mid(&b.2).then_with(|| a.0.cmp(&b.0)));
    found.into_iter().take(max_results).map(|(_, u, _)| u).collect()
}

// |∏ σ_i(x)| ≈ 1 in double precision.
fn approx_unit(c: &[i64], roots: &[(f64, f64)]) -> bool {
    let mut log_abs = 0.0;
    for &(re, im) in roots {
        let (mut a, mut b) = (0.0f64, 0.0f64);
        for &k in c.iter().rev() {
            let na = a * re - b * im + k as f64;
            b = a * im + b * re;
            a = na;
        }
        let m = a.hypot(b);
        if m == 0.0 {
            return false;
        }
        log_abs += m.ln();
    }
    log_abs.abs() < 1e-6
}

#[derive(Debug, Clone, Error)]
#[error("basis completion stopped after {} of {needed} generators: {reason}", partial.len())]
pub struct CompletionError {
    pub partial: Vec<AlgebraicNumber>,
    pub needed: usize,
    pub reason: String,
}

fn gram_det(rows: &[Vec<Real>], prec: usize) -> Real {
    linalg::det(&linalg::gram(rows, prec), prec)
}

/// Extends `seed` with the first pool units (made totally positive first)
/// that raise the rank of the first-s log projections.
pub fn complete_basis(seed: &UnitSystem, pool: &UnitSystem) -> Result<UnitSystem, CompletionError> {
    let field = seed.field();
    let s = field.s();
    let prec = field.policy().working_bits;
    let tol = field.policy().tolerance();
    let mut chosen: Vec<AlgebraicNumber> = seed.generators.clone();
    let mut rows: Vec<Vec<Real>> = projected(seed);
    let fail = |chosen: &[AlgebraicNumber], reason: String| CompletionError {
        partial: chosen.to_vec(),
        needed: s,
        reason,
    };
    if !rows.is_empty() && gram_det(&rows, prec).lower_abs() <= tol {
        return Err(fail(&chosen, "seed has degenerate log projection".into()));
    }
    let pool_gens = positivity_enforce(field, pool.generators())
        .map_err(|e| fail(&chosen, e.to_string()))?;
    let pool_rows: Vec<Vec<Real>> = pool_gens
        .iter()
        .map(|g| log_map(field, g).map(|r| r[..s].to_vec()))
        .collect::<Result<_, _>>()
        .map_err(|e| fail(&chosen, e.to_string()))?;
    // First fit in pool order, which for a searched pool is ascending height.
    for (g, r) in pool_gens.iter().zip(&pool_rows) {
        if chosen.len() == s {
            break;
        }
        let mut trial = rows.clone();
        trial.push(r.clone());
        if gram_det(&trial, prec).lower_abs() > tol {
            chosen.push(g.clone());
            rows = trial;
        }
    }
    if chosen.len() < s {
        return Err(fail(&chosen, "no pool unit increases the projected rank".into()));
    }
    UnitSystem::new(field, chosen.clone()).map_err(|e| fail(&chosen, e.to_string()))
}
