//! Smith normal form over the integers, and ranks modulo primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AffineError;

pub type Matrix = Vec<Vec<BigInt>>;

/// `s = u * m * v` with `u`, `v` unimodular and `s` diagonal, its diagonal
/// entries non-negative and each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub s: Matrix,
    pub u: Matrix,
    pub v: Matrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.len().min(self.s.first().map_or(0, |r| r.len()));
        (0..n).map(|i| self.s[i][i].clone()).collect()
    }

    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Checks every defining property against the input matrix.
    pub fn verify(&self, m: &Matrix) -> bool {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        if self.s.len() != rows || self.u.len() != rows || self.v.len() != cols {
            return false;
        }
        if mul(&mul(&self.u, m, cols), &self.v, cols) != self.s {
            return false;
        }
        let unimodular = |x: &Matrix| determinant(x).abs().is_one();
        if !unimodular(&self.u) || !unimodular(&self.v) {
            return false;
        }
        for (i, row) in self.s.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if i != j && !e.is_zero() {
                    return false;
                }
            }
        }
        let d = self.diagonal();
        if d.iter().any(|x| x.is_negative()) {
            return false;
        }
        d.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        })
    }
}

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn from_i64(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Product `a * b`; `cols` is the column count of `b`, needed when `b` has
/// no rows.
pub fn mul(a: &Matrix, b: &Matrix, cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(BigInt::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) elimination.
pub fn determinant(m: &Matrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[dst] -= q * row[src]`
fn sub_row(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    let src_row = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(&src_row) {
        *d -= q * s;
    }
}

/// `col[dst] -= q * col[src]`
fn sub_col(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

/// Row and column operations recorded alongside the elimination.
struct Transforms<'a> {
    u: &'a mut Matrix,
    v: &'a mut Matrix,
}

/// Reduces `s` in place to Smith form, mirroring every row operation on `u`
/// and every column operation on `v` when asked to.
fn diagonalize(s: &mut Matrix, mut track: Option<Transforms<'_>>) {
    let rows = s.len();
    let cols = s.first().map_or(0, |r| r.len());
    for t in 0..rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !s[i][j].is_zero())
            .min_by(|&(a, b), &(c, d)| s[a][b].abs().cmp(&s[c][d].abs()));
        let Some((pi, pj)) = pivot else { break };
        s.swap(t, pi);
        swap_cols(s, t, pj);
        if let Some(tr) = track.as_mut() {
            tr.u.swap(t, pi);
            swap_cols(tr.v, t, pj);
        }

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = s[i][t].div_floor(&s[t][t]);
                sub_row(s, i, t, &q);
                if let Some(tr) = track.as_mut() {
                    sub_row(tr.u, i, t, &q);
                }
                if !s[i][t].is_zero() {
                    s.swap(t, i);
                    if let Some(tr) = track.as_mut() {
                        tr.u.swap(t, i);
                    }
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = s[t][j].div_floor(&s[t][t]);
                sub_col(s, j, t, &q);
                if let Some(tr) = track.as_mut() {
                    sub_col(tr.v, j, t, &q);
                }
                if !s[t][j].is_zero() {
                    swap_cols(s, t, j);
                    if let Some(tr) = track.as_mut() {
                        swap_cols(tr.v, t, j);
                    }
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let stray =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&s[i][j] % &s[t][t]).is_zero()));
            match stray {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    sub_row(s, t, i, &minus_one);
                    if let Some(tr) = track.as_mut() {
                        sub_row(tr.u, t, i, &minus_one);
                    }
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -&*x;
            }
            if let Some(tr) = track.as_mut() {
                for x in tr.u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
    }
}

pub fn smith_normal_form(m: &Matrix) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut s = m.clone();
    let mut u = identity_matrix(rows);
    let mut v = identity_matrix(cols);
    diagonalize(
        &mut s,
        Some(Transforms {
            u: &mut u,
            v: &mut v,
        }),
    );
    let out = Snf { s, u, v };
    debug_assert!(out.verify(m), "Smith normal form failed verification");
    out
}

/// The nonzero diagonal of the Smith form, without the transforms.
pub fn invariant_factors(m: &Matrix) -> Vec<BigInt> {
    let mut s = m.clone();
    diagonalize(&mut s, None);
    let n = s.len().min(s.first().map_or(0, |r| r.len()));
    (0..n)
        .map(|i| s[i][i].clone())
        .filter(|d| !d.is_zero())
        .collect()
}

/// Rank of `m` over the field with `p` elements.
pub fn rank_mod_p(m: &Matrix, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u128>> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x.mod_floor(&pb).to_u128().expect("reduced entry"))
                .collect()
        })
        .collect();
    let p = u128::from(p);
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = mod_inverse(a[rank][c], p);
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of `a` modulo prime `p` by Fermat.
fn mod_inverse(a: u128, p: u128) -> u128 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u128);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_from(start: u64) -> impl Iterator<Item = u64> {
    (start.max(2)..).filter(|&n| is_prime(n))
}

/// Largest value accepted by [`prime_factors`].
const FACTOR_LIMIT: u64 = 1 << 50;

/// Distinct prime divisors, ascending, by trial division.
pub fn prime_factors(n: &BigInt) -> Result<Vec<u64>, AffineError> {
    let mut n = n
        .abs()
        .to_u64()
        .filter(|&x| x <= FACTOR_LIMIT)
        .ok_or_else(|| AffineError::FactorTooLarge(n.to_string()))?;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    Ok(out)
}
