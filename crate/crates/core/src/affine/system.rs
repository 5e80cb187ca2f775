//! Translation of identity systems into integer congruence systems.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use crate::clone::variable_name;
use crate::identities::{IdentitySystem, LinearTerm};

use super::snf::{rank_mod_p, Matrix};
use super::AffineOperation;

/// Where a row of the coefficient matrix comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowSource {
    /// Coefficient of `variable` on both sides of identity `index`.
    Identity { index: usize, variable: u8 },
    /// Coefficients of `symbol` sum to one.
    Idempotency { symbol: usize },
}

/// Unknowns are the coefficients `(symbol, position)`; row `i` asserts
/// `Σⱼ matrix[i][j]·cⱼ ≡ rhs[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientSystem {
    pub symbols: Vec<String>,
    pub unknowns: Vec<(usize, usize)>,
    pub matrix: Vec<Vec<i64>>,
    pub rhs: Vec<i64>,
    pub sources: Vec<RowSource>,
}

fn coefficients(t: &LinearTerm, v: u8, offsets: &[usize], width: usize) -> (Vec<i64>, i64) {
    let mut row = vec![0; width];
    match t {
        LinearTerm::Var(w) => (row, i64::from(*w == v)),
        LinearTerm::App { sym, args } => {
            for (pos, &a) in args.iter().enumerate() {
                if a == v {
                    row[offsets[*sym] + pos] += 1;
                }
            }
            (row, 0)
        }
    }
}

/// One row per identity and variable, matching that variable's total
/// coefficient on both sides, then one idempotency row per symbol. Rows are
/// scaled by `±1` so the first nonzero entry is positive.
pub fn coefficient_system(sys: &IdentitySystem) -> CoefficientSystem {
    let sig = sys.signature();
    let mut offsets = Vec::with_capacity(sig.len());
    let mut unknowns = Vec::new();
    for (s, sym) in sig.symbols().iter().enumerate() {
        offsets.push(unknowns.len());
        unknowns.extend((0..sym.arity).map(|pos| (s, pos)));
    }
    let width = unknowns.len();
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    let mut sources = Vec::new();
    for (index, id) in sys.identities().iter().enumerate() {
        let vars: BTreeSet<u8> = id.vars().into_iter().collect();
        for &v in &vars {
            let (l, lc) = coefficients(id.lhs(), v, &offsets, width);
            let (r, rc) = coefficients(id.rhs(), v, &offsets, width);
            let mut row: Vec<i64> = l.iter().zip(&r).map(|(a, b)| a - b).collect();
            let mut b = rc - lc;
            let lead = row.iter().copied().find(|&x| x != 0).unwrap_or(b);
            if lead < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
                b = -b;
            }
            matrix.push(row);
            rhs.push(b);
            sources.push(RowSource::Identity { index, variable: v });
        }
    }
    for (s, sym) in sig.symbols().iter().enumerate() {
        let mut row = vec![0; width];
        row[offsets[s]..offsets[s] + sym.arity].fill(1);
        matrix.push(row);
        rhs.push(1);
        sources.push(RowSource::Idempotency { symbol: s });
    }
    CoefficientSystem {
        symbols: sig.symbols().iter().map(|s| s.name.clone()).collect(),
        unknowns,
        matrix,
        rhs,
        sources,
    }
}

impl CoefficientSystem {
    pub fn a(&self) -> Matrix {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    pub fn augmented(&self) -> Matrix {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(r, &b)| r.iter().chain([&b]).map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// `p1`, `p2`, ... for the coefficients of `p`.
    pub fn unknown_name(&self, j: usize) -> String {
        let (s, pos) = self.unknowns[j];
        format!("{}{}", self.symbols[s], pos + 1)
    }

    /// Where row `i` comes from, in words.
    pub fn source_string(&self, i: usize) -> String {
        match self.sources[i] {
            RowSource::Identity { index, variable } => format!(
                "identity {}, variable {}",
                index + 1,
                variable_name(usize::from(variable))
            ),
            RowSource::Idempotency { symbol } => {
                format!("idempotency of {}", self.symbols[symbol])
            }
        }
    }

    /// Row `i` written out, e.g. `p2 = 0`.
    pub fn row_string(&self, i: usize) -> String {
        let mut lhs = String::new();
        for (j, &a) in self.matrix[i].iter().enumerate() {
            if a == 0 {
                continue;
            }
            let name = self.unknown_name(j);
            let mag = a.unsigned_abs();
            let term = if mag == 1 {
                name
            } else {
                format!("{mag}{name}")
            };
            if lhs.is_empty() {
                lhs = if a < 0 { format!("-{term}") } else { term };
            } else {
                lhs.push_str(if a < 0 { " - " } else { " + " });
                lhs.push_str(&term);
            }
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        format!("{lhs} = {}", self.rhs[i])
    }

    pub fn is_solution(&self, c: &[u64], modulus: u64) -> bool {
        let n = i128::from(modulus);
        self.matrix.iter().zip(&self.rhs).all(|(row, &b)| {
            let s: i128 = row
                .iter()
                .zip(c)
                .map(|(&a, &x)| i128::from(a) * i128::from(x))
                .sum();
            (s - i128::from(b)).rem_euclid(n) == 0
        })
    }

    /// Splits a coefficient vector into one operation per symbol.
    pub fn operations(&self, c: &[u64], modulus: u64) -> Vec<AffineOperation> {
        let mut out = Vec::new();
        let mut start = 0;
        for s in 0..self.symbols.len() {
            let arity = self.unknowns.iter().filter(|u| u.0 == s).count();
            out.push(
                AffineOperation::new(modulus, c[start..start + arity].to_vec())
                    .expect("solutions satisfy the idempotency rows"),
            );
            start += arity;
        }
        out
    }

    /// Order in which searches fix unknowns: last symbol first, and within
    /// a symbol the last position first. Searching each value upward then
    /// yields the solution whose coefficient vector, read backwards, is
    /// lexicographically least, which favours projections onto early
    /// arguments.
    fn search_order(&self) -> Vec<usize> {
        (0..self.unknowns.len()).rev().collect()
    }

    /// Least solution modulo `modulus` by exhaustive search, pruning rows as
    /// soon as all their unknowns are fixed. The first coefficient of each
    /// symbol is derived from the idempotency row.
    pub fn brute_solve(&self, modulus: u64) -> Option<Vec<u64>> {
        let order = self.search_order();
        let k = order.len();
        let mut step_of = vec![0; k];
        for (step, &j) in order.iter().enumerate() {
            step_of[j] = step;
        }
        let mut due: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
        for (i, row) in self.matrix.iter().enumerate() {
            let last = row
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(j, _)| step_of[j] + 1)
                .max()
                .unwrap_or(0);
            due[last].push(i);
        }
        let n = i128::from(modulus);
        let row_ok = |i: usize, c: &[u64]| {
            let s: i128 = self.matrix[i]
                .iter()
                .zip(c)
                .map(|(&a, &x)| i128::from(a) * i128::from(x))
                .sum();
            (s - i128::from(self.rhs[i])).rem_euclid(n) == 0
        };
        if !due[0].iter().all(|&i| row_ok(i, &[])) {
            return None;
        }
        let mut c = vec![0u64; k];
        self.brute_step(0, &order, &due, &row_ok, modulus, &mut c)
            .then_some(c)
    }

    fn brute_step(
        &self,
        step: usize,
        order: &[usize],
        due: &[Vec<usize>],
        row_ok: &impl Fn(usize, &[u64]) -> bool,
        modulus: u64,
        c: &mut Vec<u64>,
    ) -> bool {
        if step == order.len() {
            return true;
        }
        let j = order[step];
        let (sym, pos) = self.unknowns[j];
        let values: Vec<u64> = if pos == 0 {
            let rest: u64 = self
                .unknowns
                .iter()
                .zip(c.iter())
                .filter(|((s, p), _)| *s == sym && *p > 0)
                .fold(0, |acc, (_, &x)| (acc + x) % modulus);
            vec![(1 + modulus - rest) % modulus]
        } else {
            (0..modulus).collect()
        };
        for v in values {
            c[j] = v;
            if due[step + 1].iter().all(|&i| row_ok(i, c))
                && self.brute_step(step + 1, order, due, row_ok, modulus, c)
            {
                return true;
            }
        }
        c[j] = 0;
        false
    }

    /// Least solution modulo a prime, in the same order as
    /// [`Self::brute_solve`], fixing one unknown at a time and keeping only
    /// values after which the remaining system is still consistent.
    pub fn solve_mod_prime(&self, p: u64) -> Option<Vec<u64>> {
        let k = self.unknowns.len();
        let mut fixed: Vec<Option<u64>> = vec![None; k];
        if !self.consistent_mod_prime(&fixed, p) {
            return None;
        }
        for j in self.search_order() {
            let v = (0..p).find(|&v| {
                fixed[j] = Some(v);
                self.consistent_mod_prime(&fixed, p)
            })?;
            fixed[j] = Some(v);
        }
        fixed.into_iter().collect()
    }

    fn consistent_mod_prime(&self, fixed: &[Option<u64>], p: u64) -> bool {
        let free: Vec<usize> = (0..fixed.len()).filter(|&j| fixed[j].is_none()).collect();
        let mut a: Matrix = Vec::with_capacity(self.matrix.len());
        let mut ab: Matrix = Vec::with_capacity(self.matrix.len());
        for (row, &b) in self.matrix.iter().zip(&self.rhs) {
            let shift: i128 = row
                .iter()
                .zip(fixed)
                .filter_map(|(&x, f)| f.map(|v| i128::from(x) * i128::from(v)))
                .sum();
            let r: Vec<BigInt> = free.iter().map(|&j| BigInt::from(row[j])).collect();
            let mut r2 = r.clone();
            r2.push(BigInt::from(i128::from(b) - shift));
            a.push(r);
            ab.push(r2);
        }
        rank_mod_p(&a, p) == rank_mod_p(&ab, p)
    }

    /// Least solution modulo any `n ≥ 2`.
    pub fn solve_mod(&self, modulus: u64) -> Option<Vec<u64>> {
        if super::is_prime(modulus) {
            self.solve_mod_prime(modulus)
        } else {
            self.brute_solve(modulus)
        }
    }
}
