//! The affine action of `U ⋉ O_K` on `ℍ^s × ℂ^t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ball::{Complex, Real};
use crate::exact::AlgebraicNumber;
use crate::field::{FieldError, NumberField, MAX_PRECISION_FACTOR};
use crate::units::{
    admissibility_check, dirichlet_rank_check, AdmissibilityCertificate, RankReport, UnitError,
    UnitSystem,
};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OtError {
    #[error("field signature ({0}, {1}) needs s > 0 and t > 0")]
    NotEligible(usize, usize),
    #[error("unit system is not admissible: {0}")]
    NotAdmissible(String),
    #[error("group element is the identity")]
    Identity,
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("coordinate {index} is not certified in the upper half plane")]
    OutsideDomain { index: usize },
    #[error("σ_{index}(u) cannot be separated from 1 up to {bits} bits")]
    Precision { index: usize, bits: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Unit(#[from] UnitError),
}

/// Field, unit generators and the power-basis translation lattice.
#[derive(Clone, Debug)]
pub struct OtData {
    field: NumberField,
    units: UnitSystem,
}

impl OtData {
    /// Checked constructor: eligible signature and an admissible unit system.
    pub fn new(units: UnitSystem) -> Result<Self, OtError> {
        let d = Self::unchecked(units)?;
        let cert = admissibility_check(&d.units);
        if !cert.verdict().is_pass() {
            return Err(OtError::NotAdmissible(
                cert.reason.unwrap_or_else(|| "inconclusive".into()),
            ));
        }
        Ok(d)
    }

    /// Only the signature is checked; [`validate`] reports the rest.
    pub fn unchecked(units: UnitSystem) -> Result<Self, OtError> {
        let field = units.field().clone();
        if !field.is_ot_eligible() {
            return Err(OtError::NotEligible(field.s(), field.t()));
        }
        Ok(Self { field, units })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    /// `1, θ, …, θ^{n-1}`.
    pub fn translation_basis(&self) -> Vec<AlgebraicNumber> {
        let th = self.field.generator();
        (0..self.field.degree())
            .map(|k| th.pow(k as i64).expect("nonnegative power"))
            .collect()
    }

    fn with_field(&self, field: NumberField) -> Result<Self, OtError> {
        let units = UnitSystem::new(&field, self.units.generators().to_vec())?;
        Ok(Self { field, units })
    }
}

/// `(u, a)` acting by `z ↦ σ(u) z + σ(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub u: AlgebraicNumber,
    pub a: AlgebraicNumber,
}

impl GroupElement {
    pub fn new(u: AlgebraicNumber, a: AlgebraicNumber) -> Self {
        Self { u, a }
    }

    pub fn identity(field: &NumberField) -> Self {
        Self::new(field.one(), field.from_ints(&[0]))
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.u == self.u.one_like()
    }

    /// `(u⁻¹, -u⁻¹ a)`.
    pub fn inverse(&self) -> Self {
        let ui = self.u.inverse().expect("unit");
        let a = -&(&ui * &self.a);
        Self::new(ui, a)
    }
}

/// `(u1, a1)(u2, a2) = (u1 u2, a1 + u1 a2)`, exactly.
pub fn group_mul(g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    GroupElement::new(&g1.u * &g2.u, &g1.a + &(&g1.u * &g2.a))
}

/// A point of `ℍ^s × ℂ^t`.
#[derive(Clone, Debug, Serialize)]
pub struct Point {
    pub coords: Vec<Complex>,
}

impl Point {
    pub fn new(field: &NumberField, coords: Vec<Complex>) -> Result<Self, OtError> {
        if coords.len() != field.m() {
            return Err(OtError::Dimension {
                got: coords.len(),
                expected: field.m(),
            });
        }
        if let Some(index) = (0..field.s()).find(|&i| !coords[i].im.is_positive()) {
            return Err(OtError::OutsideDomain { index });
        }
        Ok(Self { coords })
    }

    /// Point from `(re, im)` pairs of doubles, converted exactly.
    pub fn from_f64(field: &NumberField, pairs: &[(f64, f64)]) -> Result<Self, OtError> {
        let prec = field.policy().working_bits;
        let coords = pairs
            .iter()
            .map(|&(a, b)| Complex::new(Real::from_f64(a, prec), Real::from_f64(b, prec)))
            .collect();
        Self::new(field, coords)
    }

    pub fn max_deviation(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.deviation_upper(b))
            .fold(0.0, f64::max)
    }
}

/// Coordinate-wise `σ_i(u) z_i + σ_i(a)` for `i < m`.
pub fn act(field: &NumberField, g: &GroupElement, z: &Point) -> Result<Point, OtError> {
    let m = field.m();
    if z.coords.len() != m {
        return Err(OtError::Dimension {
            got: z.coords.len(),
            expected: m,
        });
    }
    let coords = (0..m)
        .map(|i| {
            let su = field.embed(&g.u, i)?;
            let sa = field.embed(&g.a, i)?;
            Ok(&(&su * &z.coords[i]) + &sa)
        })
        .collect::<Result<Vec<_>, OtError>>()?;
    if let Some(index) = (0..field.s()).find(|&i| !coords[i].im.is_positive()) {
        return Err(OtError::OutsideDomain { index });
    }
    Ok(Point { coords })
}

/// Deterministic sampler of group elements and points.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Word in the unit generators with exponents in `[-2, 2]`.
    pub fn unit(&mut self, units: &UnitSystem) -> AlgebraicNumber {
        let field = units.field();
        units.generators().iter().fold(field.one(), |acc, g| {
            let e = self.rng.random_range(-2i64..=2);
            &acc * &g.pow(e).expect("unit")
        })
    }

    /// Power-basis element with coordinates in `[-bound, bound]`.
    pub fn integer(&mut self, field: &NumberField, bound: i64) -> AlgebraicNumber {
        let c: Vec<i64> = (0..field.degree())
            .map(|_| self.rng.random_range(-bound..=bound))
            .collect();
        field.from_ints(&c)
    }

    pub fn element(&mut self, units: &UnitSystem) -> GroupElement {
        let u = self.unit(units);
        let a = self.integer(units.field(), 5);
        GroupElement::new(u, a)
    }

    pub fn nontrivial_element(&mut self, units: &UnitSystem) -> GroupElement {
        loop {
            let g = self.element(units);
            if !g.is_identity() {
                return g;
            }
        }
    }

    /// `Re ∈ [-2, 2]`, `Im ∈ [1/2, 2]` on the first `s` coordinates and
    /// `[-2, 2]²` on the rest.
    pub fn point(&mut self, field: &NumberField) -> Point {
        let s = field.s();
        let pairs: Vec<(f64, f64)> = (0..field.m())
            .map(|i| {
                let re = self.rng.random_range(-2.0..=2.0);
                let im = if i < s {
                    self.rng.random_range(0.5..=2.0)
                } else {
                    self.rng.random_range(-2.0..=2.0)
                };
                (re, im)
            })
            .collect();
        Point::from_f64(field, &pairs).expect("sampled inside the domain")
    }

    pub fn f64_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub trials: usize,
    pub seed: u64,
    /// Upper bound on the largest coordinate deviation, decimal.
    pub max_deviation: String,
    #[serde(skip)]
    pub max_deviation_f64: f64,
    pub tolerance: String,
    pub verdict: Verdict,
}

/// `act(g1, act(g2, z))` against `act(g1·g2, z)` on random triples.
pub fn verify_action_compat(ot: &OtData, trials: usize, seed: u64) -> Result<CompatReport, OtError> {
    let field = &ot.field;
    let mut rng = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let g1 = rng.element(&ot.units);
        let g2 = rng.element(&ot.units);
        let z = rng.point(field);
        let lhs = act(field, &g1, &act(field, &g2, &z)?)?;
        let rhs = act(field, &group_mul(&g1, &g2), &z)?;
        worst = worst.max(lhs.max_deviation(&rhs));
    }
    let tol = field.policy().tolerance();
    Ok(CompatReport {
        trials,
        seed,
        max_deviation: format!("{worst:e}"),
        max_deviation_f64: worst,
        tolerance: format!("{tol:e}"),
        verdict: Verdict::from_bool(worst < tol),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafCase {
    /// `u ≠ 1`: candidate fixed coordinate `σ_i(a) / (1 - σ_i(u))`.
    Rotation,
    /// `u = 1, a ≠ 0`: every leaf is translated by `σ_i(a) ≠ 0`.
    Translation,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafCoordinate {
    pub index: usize,
    /// Candidate fixed coordinate (rotation) or translation amount.
    pub value: Real,
    pub certified_real: bool,
    pub certified_nonzero: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafVerdict {
    NoFixedLeaf,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafReport {
    pub case: LeafCase,
    pub coordinates: Vec<LeafCoordinate>,
    pub bits: usize,
    pub verdict: LeafVerdict,
}

/// Solves `σ_i(u) z_i + σ_i(a) = z_i` on the real coordinates.
///
/// When `1 - σ_i(u)` cannot be certified nonzero the precision is doubled,
/// up to four times the field's budget.
pub fn leaf_intersection_solve(ot: &OtData, g: &GroupElement) -> Result<LeafReport, OtError> {
    if g.is_identity() {
        return Err(OtError::Identity);
    }
    let base = ot.field.policy();
    let mut policy = base;
    loop {
        let data = if policy == base {
            ot.clone()
        } else {
            ot.with_field(ot.field.with_policy(policy)?)?
        };
        match leaf_once(&data, g) {
            Err(OtError::Precision { index, .. }) => {
                if policy.working_bits * 2 > base.working_bits * MAX_PRECISION_FACTOR {
                    return Err(OtError::Precision {
                        index,
                        bits: policy.working_bits,
                    });
                }
                policy = policy.doubled();
            }
            other => return other,
        }
    }
}

fn leaf_once(ot: &OtData, g: &GroupElement) -> Result<LeafReport, OtError> {
    let field = &ot.field;
    let bits = field.policy().working_bits;
    let rotation = g.u != g.u.one_like();
    let mut coordinates = Vec::with_capacity(field.s());
    for i in 0..field.s() {
        let sa = field.embed(&g.a, i)?;
        let (value, real) = if rotation {
            let su = field.embed(&g.u, i)?;
            let den = &Complex::one(bits) - &su;
            if den.re.contains_zero() {
                return Err(OtError::Precision { index: i, bits });
            }
            let z = sa.div(&den);
            let real = z.is_exactly_real() && sa.is_exactly_real() && su.is_exactly_real();
            (z.re, real)
        } else {
            let real = sa.is_exactly_real();
            (sa.re, real)
        };
        let nonzero = !value.contains_zero();
        if !rotation && !nonzero {
            return Err(OtError::Precision { index: i, bits });
        }
        coordinates.push(LeafCoordinate {
            index: i,
            value,
            certified_real: real,
            certified_nonzero: nonzero,
        });
    }
    let ok = coordinates.iter().all(|c| c.certified_real && (rotation || c.certified_nonzero));
    Ok(LeafReport {
        case: if rotation {
            LeafCase::Rotation
        } else {
            LeafCase::Translation
        },
        coordinates,
        bits,
        verdict: if ok {
            LeafVerdict::NoFixedLeaf
        } else {
            LeafVerdict::Undetermined
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafSummary {
    pub elements: usize,
    pub no_fixed_leaf: usize,
    pub failures: usize,
    pub verdict: Verdict,
}

/// `count` deterministic nontrivial elements through [`leaf_intersection_solve`].
pub fn leaf_survey(ot: &OtData, count: usize, seed: u64) -> LeafSummary {
    let mut rng = Sampler::new(seed ^ 0x6c65_6166);
    let mut ok = 0;
    for _ in 0..count {
        let g = rng.nontrivial_element(&ot.units);
        if matches!(
            leaf_intersection_solve(ot, &g),
            Ok(LeafReport {
                verdict: LeafVerdict::NoFixedLeaf,
                ..
            })
        ) {
            ok += 1;
        }
    }
    LeafSummary {
        elements: count,
        no_fixed_leaf: ok,
        failures: count - ok,
        verdict: Verdict::from_bool(ok == count),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationBundle {
    pub admissibility: AdmissibilityCertificate,
    pub rank: RankReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compatibility: Option<CompatReport>,
    pub leaves: LeafSummary,
    pub verdict: Verdict,
}

/// Runs admissibility, rank, compatibility and the leaf survey.
pub fn validate(ot: &OtData, trials: usize, leaf_samples: usize, seed: u64) -> Result<ValidationBundle, OtError> {
    let admissibility = admissibility_check(&ot.units);
    let rank = dirichlet_rank_check(&ot.units);
    let compatibility = if admissibility.verdict().is_pass() {
        Some(verify_action_compat(ot, trials, seed)?)
    } else {
        None
    };
    let leaves = leaf_survey(ot, leaf_samples, seed);
    let verdict = Verdict::all(
        [admissibility.verdict(), rank.verdict, leaves.verdict]
            .into_iter()
            .chain(compatibility.as_ref().map(|c| c.verdict)),
    );
    Ok(ValidationBundle {
        admissibility,
        rank,
        compatibility,
        leaves,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntPolynomial;
    use crate::precision::PrecisionPolicy;
    use proptest::prelude::*;

    fn plastic() -> OtData {
        let k = crate::field::build_field(IntPolynomial::from_ints(&[-1, -1, 0, 1]), PrecisionPolicy::default())
            .unwrap();
        OtData::new(UnitSystem::new(&k, vec![k.generator()]).unwrap()).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let ot = plastic();
        let k = ot.field();
        let th = k.generator();
        let id = GroupElement::identity(k);
        let g = GroupElement::new(th.clone(), k.one());
        assert_eq!(group_mul(&id, &g), g);
        assert!(group_mul(&g, &g.inverse()).is_identity());
        let h = GroupElement::new(th.clone(), k.from_ints(&[0]));
        assert_eq!(group_mul(&g, &h), GroupElement::new(&th * &th, k.one()));
    }

    #[test]
    fn action_examples() {
        let ot = plastic();
        let k = ot.field();
        let z = Point::from_f64(k, &[(0.0, 1.0), (0.0, 0.0)]).unwrap();
        let id = act(k, &GroupElement::identity(k), &z).unwrap();
        assert_eq!(id.max_deviation(&z), 0.0);
        let t = act(k, &GroupElement::new(k.one(), k.one()), &z).unwrap();
        assert_eq!(t.coords[0].re.mid_f64(), 1.0);
        assert_eq!(t.coords[0].im.mid_f64(), 1.0);
        let w = Point::from_f64(k, &[(0.0, 1.0), (0.5, 0.25)]).unwrap();
        let g = GroupElement::new(k.generator(), k.from_ints(&[0]));
        let r = act(k, &g, &w).unwrap();
        assert!((r.coords[0].im.mid_f64() - 1.324717957244746).abs() < 1e-15);
        let s2 = k.embed(&k.generator(), 1).unwrap();
        assert!(r.coords[1].deviation_upper(&(&s2 * &w.coords[1])) < 1e-30);
    }

    #[test]
    fn points_outside_domain_are_rejected() {
        let ot = plastic();
        assert!(matches!(
            Point::from_f64(ot.field(), &[(0.0, -1.0), (0.0, 0.0)]),
            Err(OtError::OutsideDomain { index: 0 })
        ));
    }

    #[test]
    fn compatibility_runs() {
        let ot = plastic();
        let r = verify_action_compat(&ot, 0, 0).unwrap();
        assert!(r.verdict.is_pass());
        let r = verify_action_compat(&ot, 50, 7).unwrap();
        assert!(r.max_deviation_f64 < 2f64.powi(-64), "{}", r.max_deviation);
    }

    #[test]
    fn leaf_examples() {
        let ot = plastic();
        let k = ot.field();
        let th = k.generator();
        let g = GroupElement::new(&th * &th, k.one());
        let r = leaf_intersection_solve(&ot, &g).unwrap();
        assert_eq!(r.verdict, LeafVerdict::NoFixedLeaf);
        assert!((r.coordinates[0].value.mid_f64() + 1.324717957).abs() < 1e-3);
        let r = leaf_intersection_solve(&ot, &GroupElement::new(k.one(), k.one())).unwrap();
        assert_eq!((r.case, r.verdict), (LeafCase::Translation, LeafVerdict::NoFixedLeaf));
        assert_eq!(leaf_intersection_solve(&ot, &GroupElement::identity(k)).unwrap_err(), OtError::Identity);
    }

    #[test]
    fn inadmissible_units_fail_validation() {
        let ot = plastic();
        let k = ot.field();
        assert!(OtData::new(UnitSystem::new(k, vec![k.one()]).unwrap()).is_err());
        let bad = OtData::unchecked(UnitSystem::new(k, vec![k.one()]).unwrap()).unwrap();
        let v = validate(&bad, 10, 10, 0).unwrap();
        assert_eq!(v.verdict, Verdict::Fail);
        let v = validate(&ot, 20, 20, 0).unwrap();
        assert_eq!(v.verdict, Verdict::Pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn associativity_and_inverse_action(seed in any::<u64>()) {
            let ot = plastic();
            let k = ot.field();
            let mut rng = Sampler::new(seed);
            let (a, b, c) = (rng.element(ot.units()), rng.element(ot.units()), rng.element(ot.units()));
            prop_assert_eq!(group_mul(&group_mul(&a, &b), &c), group_mul(&a, &group_mul(&b, &c)));
            let z = rng.point(k);
            let back = act(k, &a.inverse(), &act(k, &a, &z).unwrap()).unwrap();
            for (x, y) in back.coords.iter().zip(&z.coords) {
                prop_assert!(x.overlaps(y));
            }
            // Im scales by the positive real embedding.
            let w = act(k, &a, &z).unwrap();
            let su = k.embed(&a.u, 0).unwrap().re;
            prop_assert!(w.coords[0].im.overlaps(&(&su * &z.coords[0].im)));
        }
    }
}
