//! Sufficient irreducibility tests for monic integer polynomials.

use std::collections::BTreeSet;

use dashu::base::UnsignedAbs;
use dashu::integer::IBig;
use serde::{Deserialize, Serialize};

use crate::exact::IntPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Proven,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    /// No rational root and degree at most 3.
    RationalRoot,
    Eisenstein { prime: u64 },
    /// Factor-degree patterns modulo the listed primes leave no splitting.
    ModPPattern { primes: Vec<u64> },
    UserAsserted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibilityStatus {
    pub status: Status,
    pub method: Option<Method>,
    /// Free-form remark, e.g. an explicit rational root.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IrreducibilityStatus {
    fn proven(method: Method) -> Self {
        Self {
            status: Status::Proven,
            method: Some(method),
            note: None,
        }
    }

    fn unknown(note: impl Into<String>) -> Self {
        Self {
            status: Status::Unknown,
            method: None,
            note: Some(note.into()),
        }
    }

    /// The caller vouches for irreducibility. This is recorded, never promoted
    /// to `Proven`.
    pub fn user_asserted() -> Self {
        Self {
            status: Status::Unknown,
            method: Some(Method::UserAsserted),
            note: Some("irreducibility asserted by input, not verified".into()),
        }
    }

    pub fn is_proven(&self) -> bool {
        self.status == Status::Proven
    }
}

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

const DIVISOR_LIMIT: u64 = 1_000_000;

/// Runs the rational-root, Eisenstein and mod-p pattern tests in that order.
///
/// Expects a monic polynomial with integer coefficients; anything else is
/// reported as `Unknown`.
pub fn check_irreducible(p: &IntPolynomial) -> IrreducibilityStatus {
    let Some(c) = p.integer_coeffs() else {
        return IrreducibilityStatus::unknown("coefficients are not integers");
    };
    if !p.is_monic() {
        return IrreducibilityStatus::unknown("polynomial is not monic");
    }
    let n = p.degree();
    if n == 0 {
        return IrreducibilityStatus::unknown("constant polynomial");
    }
    if n == 1 {
        return IrreducibilityStatus::proven(Method::RationalRoot);
    }
    if c[0] == IBig::ZERO {
        return IrreducibilityStatus::unknown("reducible: x divides the polynomial");
    }
    if let Some(root) = integer_root(&c) {
        return IrreducibilityStatus::unknown(format!("reducible: rational root {root}"));
    }
    if n <= 3 && u64::try_from((&c[0]).unsigned_abs()).is_ok_and(|a| a <= DIVISOR_LIMIT) {
        return IrreducibilityStatus::proven(Method::RationalRoot);
    }
    if let Some(prime) = eisenstein_prime(&c) {
        return IrreducibilityStatus::proven(Method::Eisenstein { prime });
    }
    if let Some(primes) = mod_p_pattern(&c) {
        return IrreducibilityStatus::proven(Method::ModPPattern { primes });
    }
    IrreducibilityStatus::unknown("no sufficient criterion applied")
}

fn eval_int(c: &[IBig], x: &IBig) -> IBig {
    c.iter().rev().fold(IBig::ZERO, |acc, a| acc * x + a)
}

// Monic integer polynomial: rational roots are integer divisors of c[0].
fn integer_root(c: &[IBig]) -> Option<IBig> {
    let a0 = u64::try_from((&c[0]).unsigned_abs()).ok()?;
    if a0 > DIVISOR_LIMIT {
        return None;
    }
    (1..=a0)
        .filter(|d| a0 % d == 0)
        .flat_map(|d| [IBig::from(d), -IBig::from(d)])
        .find(|x| eval_int(c, x) == IBig::ZERO)
}

fn eisenstein_prime(c: &[IBig]) -> Option<u64> {
    let a0 = c[0].clone();
    SMALL_PRIMES.iter().copied().find(|&p| {
        let pb = IBig::from(p);
        let p2 = &pb * &pb;
        c[..c.len() - 1].iter().all(|a| a % &pb == IBig::ZERO) && &a0 % &p2 != IBig::ZERO
    })
}

// ---- polynomials over F_p, ascending u64 coefficients ----

type Fp = Vec<u64>;

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime.
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &Fp, m: &Fp, p: u64) -> Fp {
    let mut r = fp_trim(a.clone());
    let dm = m.len() - 1;
    let inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = r[r.len() - 1] * inv % p;
        for (j, &mj) in m.iter().enumerate() {
            r[k + j] = (r[k + j] + p - c * mj % p) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_mulmod(a: &Fp, b: &Fp, m: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_rem(&out, m, p)
}

fn fp_powmod(base: &Fp, mut e: u64, m: &Fp, p: u64) -> Fp {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &b, m, p);
        }
        b = fp_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|k| {
                let x = a.get(k).copied().unwrap_or(0);
                let y = b.get(k).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut r0, mut r1) = (fp_trim(a.clone()), fp_trim(b.clone()));
    while !r1.is_empty() {
        let r = fp_rem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
    }
    r0
}

fn fp_divexact(a: &Fp, b: &Fp, p: u64) -> Fp {
    let mut r = fp_trim(a.clone());
    let db = b.len() - 1;
    let inv = mod_inv(b[db], p);
    let mut q = vec![0u64; r.len().saturating_sub(db)];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r[r.len() - 1] * inv % p;
        q[k] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[k + j] = (r[k + j] + p - c * bj % p) % p;
        }
        r = fp_trim(r);
    }
    q
}

fn reduce_mod(c: &[IBig], p: u64) -> Fp {
    let pb = IBig::from(p);
    fp_trim(
        c.iter()
            .map(|a| {
                let r = ((a % &pb) + &pb) % &pb;
                u64::try_from(r).expect("reduced residue fits")
            })
            .collect(),
    )
}

/// Factor degrees (with multiplicity) of a squarefree monic polynomial mod p.
fn ddf_degrees(f: &Fp, p: u64) -> Vec<usize> {
    let mut degrees = Vec::new();
    let mut rest = f.clone();
    let x: Fp = vec![0, 1];
    let mut xq = x.clone();
    let mut d = 1;
    while rest.len() > 1 {
        if 2 * d > rest.len() - 1 {
            degrees.push(rest.len() - 1);
            break;
        }
        xq = fp_powmod(&xq, p, &rest, p);
        let g = fp_gcd(&rest, &fp_sub(&xq, &x, p), p);
        let dg = g.len() - 1;
        if dg > 0 {
            degrees.extend(std::iter::repeat_n(d, dg / d));
            rest = fp_divexact(&rest, &g, p);
            xq = fp_rem(&xq, &rest, p);
        }
        d += 1;
    }
    degrees
}

fn subset_sums(degrees: &[usize], n: usize) -> BTreeSet<usize> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degrees {
        for k in (d..=n).rev() {
            if reach[k - d] {
                reach[k] = true;
            }
        }
    }
    (1..n).filter(|&k| reach[k]).collect()
}

fn mod_p_pattern(c: &[IBig]) -> Option<Vec<u64>> {
    let n = c.len() - 1;
    let mut possible: BTreeSet<usize> = (1..n).collect();
    let mut used = Vec::new();
    for &p in SMALL_PRIMES.iter() {
        let f = reduce_mod(c, p);
        if f.len() != n + 1 {
            continue;
        }
        let df: Fp = fp_trim(
            f.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| (k as u64 % p) * a % p)
                .collect(),
        );
        if df.is_empty() || fp_gcd(&f, &df, p).len() != 1 {
            continue;
        }
        let sums = subset_sums(&ddf_degrees(&f, p), n);
        possible = possible.intersection(&sums).copied().collect();
        used.push(p);
        if possible.is_empty() {
            return Some(used);
        }
    }
    None
}
