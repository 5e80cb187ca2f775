//! Realizability over all finite rings, with certificates.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::AffineError;
use crate::identities::IdentitySystem;

use super::snf::{
    invariant_factors, prime_factors, primes_from, rank_mod_p, smith_normal_form, Matrix,
};
use super::system::{coefficient_system, CoefficientSystem};
use super::{affine_satisfies, AffineOperation};

pub const DEFAULT_BRUTE_BOUND: u64 = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeRank {
    pub p: u64,
    #[serde(rename = "rankA")]
    pub rank_a: usize,
    #[serde(rename = "rankAb")]
    pub rank_ab: usize,
}

/// Evidence that `A·c ≡ b` has no solution modulo any prime.
///
/// Over the rationals `rank [A|b] = rank A + 1`. Modulo `p` the rank of a
/// matrix is the number of its invariant factors not divisible by `p`, so the
/// ranks can only meet at primes dividing the last invariant factor of
/// `[A|b]`; each of those is listed with its ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub invariant_factors_a: Vec<BigInt>,
    pub invariant_factors_ab: Vec<BigInt>,
    pub rank_a: usize,
    pub rank_ab: usize,
    pub candidate_primes: Vec<u64>,
    pub primes_tested: Vec<PrimeRank>,
    /// Every modulus `2..=brute_bound` was searched exhaustively.
    pub brute_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Realizable {
        modulus: u64,
        symbols: Vec<String>,
        witness: Vec<AffineOperation>,
        primes_tested: Vec<PrimeRank>,
    },
    Unrealizable(Certificate),
}

impl Verdict {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Verdict::Realizable { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Unrealizable(c) => Some(c),
            Verdict::Realizable { .. } => None,
        }
    }
}

struct Factors<'a>(&'a [BigInt]);

impl Serialize for Factors<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let vals: Vec<serde_json::Value> = self
            .0
            .iter()
            .map(|d| match d.to_u64() {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        vals.serialize(s)
    }
}

struct Witness<'a>(&'a [String], &'a [AffineOperation]);

impl Serialize for Witness<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (name, op) in self.0.iter().zip(self.1) {
            m.serialize_entry(name, op.coeffs())?;
        }
        m.end()
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self {
            Verdict::Realizable {
                modulus,
                symbols,
                witness,
                ..
            } => {
                m.serialize_entry("status", "realizable")?;
                m.serialize_entry("modulus", modulus)?;
                m.serialize_entry("witness", &Witness(symbols, witness))?;
            }
            Verdict::Unrealizable(c) => {
                m.serialize_entry("status", "unrealizable")?;
                m.serialize_entry("invariant_factors_A", &Factors(&c.invariant_factors_a))?;
                m.serialize_entry("invariant_factors_Ab", &Factors(&c.invariant_factors_ab))?;
                m.serialize_entry("primes_tested", &c.primes_tested)?;
                m.serialize_entry("candidate_primes", &c.candidate_primes)?;
                m.serialize_entry("brute_bound", &c.brute_bound)?;
            }
        }
        m.end()
    }
}

fn realizable(
    sys: &IdentitySystem,
    cs: &CoefficientSystem,
    p: u64,
    primes_tested: Vec<PrimeRank>,
) -> Result<Verdict, AffineError> {
    let c = cs
        .solve_mod_prime(p)
        .ok_or_else(|| AffineError::Inconsistent(format!("ranks agree mod {p} but no solution")))?;
    let witness = cs.operations(&c, p);
    if !affine_satisfies(&witness, sys, p)? {
        return Err(AffineError::Inconsistent(format!(
            "witness mod {p} fails evaluation"
        )));
    }
    Ok(Verdict::Realizable {
        modulus: p,
        symbols: cs.symbols.clone(),
        witness,
        primes_tested,
    })
}

/// Decides whether `sys` holds in the full idempotent reduct of some module
/// over a finite ring.
///
/// The least prime with a solution is located by rank comparisons, and the
/// witness is the least solution modulo that prime. An unrealizable verdict
/// is cross-checked by exhaustive search modulo every `n ≤ brute_bound`.
pub fn finite_ring_verdict(sys: &IdentitySystem, brute_bound: u64) -> Result<Verdict, AffineError> {
    let cs = coefficient_system(sys);
    let a = cs.a();
    let ab = cs.augmented();
    let snf_a = smith_normal_form(&a);
    let snf_ab = smith_normal_form(&ab);
    let (rank_a, rank_ab) = (snf_a.rank(), snf_ab.rank());
    let test = |p: u64| PrimeRank {
        p,
        rank_a: rank_mod_p(&a, p),
        rank_ab: rank_mod_p(&ab, p),
    };

    let mut tested = Vec::new();
    let candidates = if rank_a == rank_ab {
        // terminates by the first prime not dividing the last invariant factor of A
        for p in primes_from(2) {
            let r = test(p);
            let hit = r.rank_a == r.rank_ab;
            tested.push(r);
            if hit {
                return realizable(sys, &cs, p, tested);
            }
        }
        unreachable!("infinitely many primes")
    } else {
        let last = snf_ab
            .invariant_factors()
            .last()
            .cloned()
            .expect("rank of [A|b] is positive");
        prime_factors(&last)?
    };
    for &p in &candidates {
        let r = test(p);
        let hit = r.rank_a == r.rank_ab;
        tested.push(r);
        if hit {
            return realizable(sys, &cs, p, tested);
        }
    }
    for n in 2..=brute_bound {
        if let Some(c) = cs.brute_solve(n) {
            return Err(AffineError::Inconsistent(format!(
                "certificate excludes every prime but {:?} solves the system mod {n}",
                c
            )));
        }
    }
    Ok(Verdict::Unrealizable(Certificate {
        invariant_factors_a: snf_a.invariant_factors(),
        invariant_factors_ab: snf_ab.invariant_factors(),
        rank_a,
        rank_ab,
        candidate_primes: candidates,
        primes_tested: tested,
        brute_bound,
    }))
}

/// Whether some finite ring admits a solution, decided from ranks alone.
///
/// Agrees with [`finite_ring_verdict`] but skips the witness search and the
/// brute cross-check, so it suits inner loops.
pub fn is_realizable(sys: &IdentitySystem) -> Result<bool, AffineError> {
    let cs = coefficient_system(sys);
    // repeated rows span nothing new, so the invariant factors are unchanged
    let mut ab = cs.augmented();
    ab.sort();
    ab.dedup();
    let a: Matrix = ab.iter().map(|r| r[..r.len() - 1].to_vec()).collect();
    let factors_ab = invariant_factors(&ab);
    if invariant_factors(&a).len() == factors_ab.len() {
        return Ok(true);
    }
    let last = factors_ab.last().expect("rank of [A|b] is positive");
    Ok(prime_factors(last)?
        .into_iter()
        .any(|p| rank_mod_p(&a, p) == rank_mod_p(&ab, p)))
}
