//! Idempotent affine operations over `Z_n` and realizability of identity
//! systems in full idempotent reducts of modules.
//!
//! An identity system is realizable by affine operations `Σ cᵢxᵢ` (with
//! `Σ cᵢ ≡ 1`) exactly when its coefficient system `A·c ≡ b` is solvable
//! modulo `n`. Solvability modulo some `n > 1` is equivalent to
//! solvability modulo some prime, which the Smith normal form of `A` and
//! `[A|b]` narrows to finitely many candidates.

mod snf;
mod system;
mod verdict;

use std::fmt;

use serde::Serialize;

use crate::algebra::{decode_index, table_len};
use crate::clone::variable_name;
use crate::error::AffineError;
use crate::identities::{IdentitySystem, LinearTerm};

pub use snf::{
    determinant, from_i64, identity_matrix, invariant_factors, is_prime, mul, prime_factors,
    primes_from, rank_mod_p, smith_normal_form, Matrix, Snf,
};
pub use system::{coefficient_system, CoefficientSystem, RowSource};
pub use verdict::{
    finite_ring_verdict, is_realizable, Certificate, PrimeRank, Verdict, DEFAULT_BRUTE_BOUND,
};

/// `(c₁, .., c_k) ↦ Σ cᵢxᵢ mod n` with `Σ cᵢ ≡ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineOperation {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl AffineOperation {
    pub fn new(modulus: u64, coeffs: impl Into<Vec<u64>>) -> Result<Self, AffineError> {
        if modulus < 2 {
            return Err(AffineError::BadModulus(modulus));
        }
        let coeffs: Vec<u64> = coeffs.into().into_iter().map(|c| c % modulus).collect();
        let sum = coeffs.iter().fold(0, |acc, &c| (acc + c) % modulus);
        if coeffs.is_empty() || sum != 1 {
            return Err(AffineError::NotIdempotent { modulus, coeffs });
        }
        Ok(Self { modulus, coeffs })
    }

    pub fn projection(modulus: u64, arity: usize, index: usize) -> Result<Self, AffineError> {
        let mut coeffs = vec![0; arity];
        coeffs[index] = 1;
        Self::new(modulus, coeffs)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn eval(&self, args: &[u64]) -> u64 {
        self.coeffs
            .iter()
            .zip(args)
            .fold(0, |acc, (&c, &a)| (acc + c * a) % self.modulus)
    }
}

/// Written as a linear form, e.g. `3x + 3y`.
impl fmt::Display for AffineOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match c {
                1 => variable_name(i),
                _ => format!("{c}{}", variable_name(i)),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// All idempotent affine operations of the given arity, in lexicographic
/// order of coefficients.
pub fn enumerate_idempotent_affine(
    modulus: u64,
    arity: usize,
) -> Result<Vec<AffineOperation>, AffineError> {
    if modulus < 2 {
        return Err(AffineError::BadModulus(modulus));
    }
    let n = usize::try_from(modulus).map_err(|_| AffineError::BadModulus(modulus))?;
    let total = table_len(n, arity).ok_or(AffineError::BadModulus(modulus))?;
    let mut digits = vec![0; arity];
    let mut out = Vec::new();
    for i in 0..total {
        decode_index(n, i, &mut digits);
        let coeffs: Vec<u64> = digits.iter().map(|&d| d as u64).collect();
        if let Ok(op) = AffineOperation::new(modulus, coeffs) {
            out.push(op);
        }
    }
    Ok(out)
}

fn eval_term(assignment: &[AffineOperation], t: &LinearTerm, env: &[u64]) -> u64 {
    match t {
        LinearTerm::Var(v) => env[usize::from(*v)],
        LinearTerm::App { sym, args } => {
            let vals: Vec<u64> = args.iter().map(|&a| env[usize::from(a)]).collect();
            assignment[*sym].eval(&vals)
        }
    }
}

/// Whether the operations satisfy every identity, checked at every point of
/// `Z_n`.
pub fn affine_satisfies(
    assignment: &[AffineOperation],
    sys: &IdentitySystem,
    modulus: u64,
) -> Result<bool, AffineError> {
    let sig = sys.signature();
    if assignment.len() != sig.len() {
        return Err(AffineError::AssignmentSize {
            expected: sig.len(),
            found: assignment.len(),
        });
    }
    for (i, op) in assignment.iter().enumerate() {
        if op.modulus != modulus {
            return Err(AffineError::ModulusMismatch(modulus, op.modulus));
        }
        if op.arity() != sig.arity(i) {
            return Err(AffineError::Arity {
                symbol: sig.name(i).to_string(),
                expected: sig.arity(i),
                found: op.arity(),
            });
        }
    }
    let n = usize::try_from(modulus).map_err(|_| AffineError::BadModulus(modulus))?;
    let mut env = [0u64; crate::identities::MAX_VARIABLES];
    for id in sys.identities() {
        let vars = id.vars();
        let mut vals = vec![0; vars.len()];
        let total = table_len(n, vars.len()).ok_or(AffineError::BadModulus(modulus))?;
        for i in 0..total {
            decode_index(n, i, &mut vals);
            for (&v, &a) in vars.iter().zip(&vals) {
                env[usize::from(v)] = a as u64;
            }
            if eval_term(assignment, id.lhs(), &env) != eval_term(assignment, id.rhs(), &env) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
