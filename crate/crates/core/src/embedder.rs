//! Embedding `ℍ × ℂ` into `ℍ^s × ℂ^t` from a subfield of signature (1, 1).

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ball::Complex;
use crate::exact::{AlgebraicNumber, ExactError, IntPolynomial};
use crate::field::{build_field, eval_at, FieldError, NumberField, MAX_PRECISION_FACTOR};
use crate::ot::{act, GroupElement, OtData, OtError, Point, Sampler};
use crate::units::{complete_basis, unit_search, CompletionError, UnitError, UnitSystem};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Error)]
pub enum EmbedError {
    #[error("candidate generator is rational")]
    Rational,
    #[error("candidate generates the whole field, not a proper subfield")]
    NotProper,
    #[error("subfield degree {sub} does not divide {degree}")]
    DegreeDoesNotDivide { sub: usize, degree: usize },
    #[error("minimal polynomial is not integral; use an algebraic integer generator")]
    NotIntegral,
    #[error("subfield has signature ({0}, {1}), the embedding needs (1, 1)")]
    Signature(usize, usize),
    #[error("embedding {index} matches {matches} subfield embeddings up to {bits} bits")]
    AmbiguousMatch { index: usize, matches: usize, bits: usize },
    #[error("no unit found in the subfield within the search bound")]
    NoSubfieldUnit,
    #[error("image of the subfield unit is not a unit")]
    ImageNotAUnit,
    #[error(transparent)]
    Completion(#[from] CompletionError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Unit(#[from] UnitError),
    #[error(transparent)]
    Ot(#[from] OtError),
}

#[derive(Clone, Debug)]
pub struct SubfieldWitness {
    pub eta: AlgebraicNumber,
    pub k1_defining: IntPolynomial,
    pub k1: NumberField,
    /// Signature is (1, 1), so the witness can drive the embedding.
    pub embeddable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSummary {
    pub eta: String,
    pub k1_defining: IntPolynomial,
    pub signature: (usize, usize),
    pub embeddable: bool,
}

impl SubfieldWitness {
    pub fn summary(&self) -> WitnessSummary {
        WitnessSummary {
            eta: self.eta.to_string(),
            k1_defining: self.k1_defining.clone(),
            signature: self.k1.signature(),
            embeddable: self.embeddable,
        }
    }

    fn require_embeddable(&self) -> Result<(), EmbedError> {
        if self.embeddable {
            Ok(())
        } else {
            let (s, t) = self.k1.signature();
            Err(EmbedError::Signature(s, t))
        }
    }
}

pub fn verify_subfield(k: &NumberField, eta: &AlgebraicNumber) -> Result<SubfieldWitness, EmbedError> {
    if !k.contains(eta) {
        return Err(FieldError::ForeignElement.into());
    }
    if eta.is_rational() {
        return Err(EmbedError::Rational);
    }
    let mp = eta.min_poly()?;
    let (d, n) = (mp.degree(), k.degree());
    if n % d != 0 {
        return Err(EmbedError::DegreeDoesNotDivide { sub: d, degree: n });
    }
    if d == n {
        return Err(EmbedError::NotProper);
    }
    if !mp.is_integral() {
        return Err(EmbedError::NotIntegral);
    }
    let k1 = build_field(mp.clone(), k.policy())?;
    let embeddable = k1.signature() == (1, 1);
    Ok(SubfieldWitness {
        eta: eta.clone(),
        k1_defining: mp,
        k1,
        embeddable,
    })
}

/// The image of `x ∈ K₁` in `K`: substitute `η` for the generator.
pub fn include(w: &SubfieldWitness, x: &AlgebraicNumber) -> AlgebraicNumber {
    w.eta.apply(x.residue())
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionMap {
    /// `r[i]` is the `K₁` embedding index that `σ_i` restricts to.
    pub r: Vec<usize>,
    /// Complex pairs of `K` (0-based) whose representative was exchanged.
    pub swaps: Vec<usize>,
    pub bits: usize,
}

fn match_once(k: &NumberField, w: &SubfieldWitness) -> Result<Vec<usize>, (usize, usize)> {
    let n1 = w.k1.degree();
    (0..k.degree())
        .map(|i| {
            let v = eval_at(w.eta.residue(), k.root(i));
            let hits: Vec<usize> = (0..n1).filter(|&j| v.overlaps(w.k1.root(j))).collect();
            if hits.len() == 1 {
                Ok(hits[0])
            } else {
                Err((i, hits.len()))
            }
        })
        .collect()
}

/// Matches every `σ_i(η)` with one `τ_j`, then swaps complex pairs of `K`
/// so each complex restriction lands on the representative `τ_{s₁}`.
pub fn match_restrictions(k: &NumberField, w: &SubfieldWitness) -> Result<RestrictionMap, EmbedError> {
    w.require_embeddable()?;
    let base = k.policy();
    let mut policy = base;
    let (mut kk, mut ww) = (k.clone(), w.clone());
    let r = loop {
        match match_once(&kk, &ww) {
            Ok(r) => break r,
            Err((index, matches)) => {
                if policy.working_bits * 2 > base.working_bits * MAX_PRECISION_FACTOR {
                    return Err(EmbedError::AmbiguousMatch {
                        index,
                        matches,
                        bits: policy.working_bits,
                    });
                }
                policy = policy.doubled();
                kk = k.with_policy(policy)?;
                ww.k1 = w.k1.with_policy(policy)?;
            }
        }
    };
    let (s, t) = k.signature();
    let (s1, t1) = w.k1.signature();
    let mut r = r;
    let mut swaps = Vec::new();
    for p in 0..t {
        let (a, b) = (s + p, s + t + p);
        if r[a] >= s1 + t1 {
            r.swap(a, b);
            swaps.push(p);
        }
    }
    Ok(RestrictionMap {
        r,
        swaps,
        bits: policy.working_bits,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    W1,
    W2,
}

#[derive(Clone, Debug)]
pub struct EmbeddedSurface {
    pub witness: SubfieldWitness,
    pub restriction: RestrictionMap,
    /// `K` with the representative swaps applied.
    pub field: NumberField,
    pub u: AlgebraicNumber,
    pub u1: AlgebraicNumber,
    pub u1_image: AlgebraicNumber,
    pub big_units: UnitSystem,
    /// Which subfield coordinate each of the `m` coordinates of `K` carries.
    pub map_spec: Vec<Carrier>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingSummary {
    pub witness: WitnessSummary,
    pub restriction: RestrictionMap,
    pub u: String,
    pub u1: String,
    pub u1_image: String,
    pub big_units: Vec<String>,
    pub map_spec: Vec<Carrier>,
}

impl EmbeddedSurface {
    pub fn summary(&self) -> EmbeddingSummary {
        EmbeddingSummary {
            witness: self.witness.summary(),
            restriction: self.restriction.clone(),
            u: self.u.to_string(),
            u1: self.u1.to_string(),
            u1_image: self.u1_image.to_string(),
            big_units: self.big_units.generators().iter().map(|g| g.to_string()).collect(),
            map_spec: self.map_spec.clone(),
        }
    }

    /// Holomorphy guard: no coordinate restricts to the conjugate `τ̄₂`.
    pub fn is_holomorphic(&self) -> bool {
        self.restriction.r[..self.field.m()].iter().all(|&j| j < 2)
    }
}

/// Subfield unit search bound used by [`build_embedding`].
pub const SUBFIELD_UNIT_BOUND: u32 = 5;

pub fn build_embedding(k: &NumberField, w: &SubfieldWitness, pool: &UnitSystem) -> Result<EmbeddedSurface, EmbedError> {
    let restriction = match_restrictions(k, w)?;
    let field = k.with_swapped_pairs(&restriction.swaps)?;
    let u = unit_search(&w.k1, SUBFIELD_UNIT_BOUND, 1)
        .into_iter()
        .next()
        .ok_or(EmbedError::NoSubfieldUnit)?;
    let u1 = &u * &u;
    let u1_image = include(w, &u1);
    if !field.is_unit(&u1_image)? {
        return Err(EmbedError::ImageNotAUnit);
    }
    let seed = UnitSystem::new(&field, vec![u1_image.clone()])?;
    let pool = UnitSystem::new(&field, pool.generators().to_vec())?;
    let big_units = complete_basis(&seed, &pool)?;
    let map_spec = (0..field.m())
        .map(|i| if restriction.r[i] == 0 { Carrier::W1 } else { Carrier::W2 })
        .collect();
    Ok(EmbeddedSurface {
        witness: w.clone(),
        restriction,
        field,
        u,
        u1,
        u1_image,
        big_units,
        map_spec,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbedCompatReport {
    pub trials: usize,
    pub seed: u64,
    pub max_deviation: String,
    #[serde(skip)]
    pub max_deviation_f64: f64,
    pub tolerance: String,
    pub verdict: Verdict,
}

fn lift_point(e: &EmbeddedSurface, w1: &Complex, w2: &Complex) -> Point {
    Point {
        coords: e
            .map_spec
            .iter()
            .map(|c| match c {
                Carrier::W1 => w1.clone(),
                Carrier::W2 => w2.clone(),
            })
            .collect(),
    }
}

/// Acting by `γ₁ = (u1^k, a₁)` on `ℍ × ℂ` and then including agrees with
/// including and then acting by the image of `γ₁`.
pub fn verify_embedding_compat(e: &EmbeddedSurface, ot: &OtData, trials: usize, seed: u64) -> Result<EmbedCompatReport, EmbedError> {
    let k1 = &e.witness.k1;
    let field = ot.field();
    let mut rng = Sampler::new(seed ^ 0x656d_6264);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let kexp = rng.index(5) as i64 - 2;
        let g_u = e.u1.pow(kexp)?;
        let a1 = rng.integer(k1, 5);
        let p = rng.point(k1);
        let (w1, w2) = (&p.coords[0], &p.coords[1]);
        let lhs = act(k1, &GroupElement::new(g_u.clone(), a1.clone()), &p)?;
        let lhs = lift_point(e, &lhs.coords[0], &lhs.coords[1]);
        let g = GroupElement::new(include(&e.witness, &g_u), include(&e.witness, &a1));
        let rhs = act(field, &g, &lift_point(e, w1, w2))?;
        worst = worst.max(lhs.max_deviation(&rhs));
    }
    let tol = field.policy().tolerance();
    Ok(EmbedCompatReport {
        trials,
        seed,
        max_deviation: format!("{worst:e}"),
        max_deviation_f64: worst,
        tolerance: format!("{tol:e}"),
        verdict: Verdict::from_bool(worst < tol),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismReport {
    pub pairs: usize,
    pub seed: u64,
    /// `include` respects sums and products exactly.
    pub exact_homomorphism: bool,
    /// `σ_i(include(x))` overlaps `τ_{r(i)}(x)` for every sample.
    pub embedding_coherent: bool,
    pub verdict: Verdict,
}

pub fn verify_inclusion(e: &EmbeddedSurface, pairs: usize, seed: u64) -> Result<HomomorphismReport, EmbedError> {
    let w = &e.witness;
    let mut rng = Sampler::new(seed ^ 0x686f_6d6f);
    let mut exact = true;
    let mut coherent = true;
    for _ in 0..pairs {
        let x = rng.integer(&w.k1, 5);
        let y = rng.integer(&w.k1, 5);
        let (ix, iy) = (include(w, &x), include(w, &y));
        exact &= include(w, &(&x * &y)) == &ix * &iy;
        exact &= include(w, &(&x + &y)) == &ix + &iy;
        for i in 0..e.field.degree() {
            let lhs = e.field.embed(&ix, i)?;
            let rhs = w.k1.embed(&x, e.restriction.r[i])?;
            coherent &= lhs.overlaps(&rhs);
        }
    }
    Ok(HomomorphismReport {
        pairs,
        seed,
        exact_homomorphism: exact,
        embedding_coherent: coherent,
        verdict: Verdict::from_bool(exact && coherent),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeEntry {
    pub index: usize,
    pub eta: String,
    pub k1_defining: Option<IntPolynomial>,
    pub signature: Option<(usize, usize)>,
    pub hit: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    /// Exploration aid over user-supplied candidates; not a subfield enumeration.
    pub scope: String,
    pub entries: Vec<ProbeEntry>,
    pub hits: Vec<usize>,
}

pub fn conjecture_probe(k: &NumberField, candidates: &[AlgebraicNumber]) -> ProbeReport {
    let entries: Vec<ProbeEntry> = candidates
        .par_iter()
        .enumerate()
        .map(|(index, eta)| {
            let base = ProbeEntry {
                index,
                eta: eta.to_string(),
                k1_defining: None,
                signature: None,
                hit: false,
                note: None,
            };
            match verify_subfield(k, eta) {
                Ok(w) => ProbeEntry {
                    k1_defining: Some(w.k1_defining.clone()),
                    signature: Some(w.k1.signature()),
                    hit: w.embeddable,
                    ..base
                },
                Err(EmbedError::Rational) => ProbeEntry {
                    note: Some("skipped: rational candidate".into()),
                    ..base
                },
                Err(err) => ProbeEntry {
                    note: Some(err.to_string()),
                    ..base
                },
            }
        })
        .collect();
    let hits = entries.iter().filter(|e| e.hit).map(|e| e.index).collect();
    ProbeReport {
        scope: "user-supplied candidates only".into(),
        entries,
        hits,
    }
}
