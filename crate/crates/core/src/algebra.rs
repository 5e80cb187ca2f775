//! Finite algebras stored as flat operation tables.
//!
//! The universe of an algebra of size `n` is always `0..n`. A `k`-ary table
//! is indexed in row-major mixed-radix order: the tuple `(a_0, .., a_{k-1})`
//! lives at `Σ a_i · n^(k-1-i)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// One named basic operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicOp {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// Wire form of an algebra, mirroring the JSON file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub name: String,
    pub size: usize,
    pub ops: Vec<BasicOp>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<BasicOp>,
}

/// Number of entries of a table of the given arity, or `None` on overflow.
pub fn table_len(size: usize, arity: usize) -> Option<usize> {
    size.checked_pow(u32::try_from(arity).ok()?)
}

/// Flat index of an argument tuple.
#[inline]
pub fn table_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// Inverse of [`table_index`]: writes the argument tuple of `index` into `out`.
#[inline]
pub fn decode_index(size: usize, mut index: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
}

impl FiniteAlgebra {
    /// Validates a spec and builds the algebra.
    pub fn new(spec: AlgebraSpec) -> Result<Self, AlgebraError> {
        let AlgebraSpec { name, size, ops } = spec;
        if size == 0 {
            return Err(AlgebraError::EmptyUniverse);
        }
        let mut seen = HashSet::new();
        for op in &ops {
            if !seen.insert(op.name.as_str()) {
                return Err(AlgebraError::DuplicateOp(op.name.clone()));
            }
            if op.arity == 0 {
                return Err(AlgebraError::NullaryOp(op.name.clone()));
            }
            let expected =
                table_len(size, op.arity).ok_or_else(|| AlgebraError::TableTooLarge {
                    op: op.name.clone(),
                    arity: op.arity,
                })?;
            if op.table.len() != expected {
                return Err(AlgebraError::TableLength {
                    op: op.name.clone(),
                    expected,
                    found: op.table.len(),
                });
            }
            if let Some((index, &value)) = op.table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(AlgebraError::EntryOutOfRange {
                    op: op.name.clone(),
                    index,
                    value,
                    size,
                });
            }
        }
        Ok(Self { name, size, ops })
    }

    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let spec: AlgebraSpec =
            serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        Self::new(spec)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            name: self.name.clone(),
            size: self.size,
            ops: self.ops.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("algebra spec serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[BasicOp] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&BasicOp> {
        self.ops.iter().find(|op| op.name == name)
    }

    /// Applies basic operation number `op` to `args`.
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let op = &self.ops[op];
        debug_assert_eq!(op.arity, args.len());
        op.table[table_index(self.size, args)]
    }

    /// Signature as `(name, arity)` pairs in declaration order.
    pub fn signature(&self) -> Vec<(&str, usize)> {
        self.ops
            .iter()
            .map(|op| (op.name.as_str(), op.arity))
            .collect()
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.ops.len()).all(|i| {
            let arity = self.ops[i].arity;
            (0..self.size).all(|a| self.apply(i, &vec![a; arity]) == a)
        })
    }
}

fn table_from_fn(size: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Vec<usize> {
    let len = table_len(size, arity).expect("small table");
    let mut args = vec![0; arity];
    (0..len)
        .map(|i| {
            decode_index(size, i, &mut args);
            f(&args)
        })
        .collect()
}

/// The 2-element meet semilattice `({0,1}, ∧)`.
pub fn make_semilattice() -> FiniteAlgebra {
    FiniteAlgebra {
        name: "B".into(),
        size: 2,
        ops: vec![BasicOp {
            name: "meet".into(),
            arity: 2,
            table: table_from_fn(2, 2, |a| a[0].min(a[1])),
        }],
    }
}

/// Majority on tuples with a repeated value, first argument on tuples of
/// pairwise distinct values. For `n = 2` this is the plain majority algebra.
pub fn make_majority_first(n: usize) -> Result<FiniteAlgebra, AlgebraError> {
    if n < 2 {
        return Err(AlgebraError::MajorityTooSmall(n));
    }
    let name = if n == 2 {
        "C".to_string()
    } else {
        format!("A{n}")
    };
    Ok(FiniteAlgebra {
        name,
        size: n,
        ops: vec![BasicOp {
            name: "f".into(),
            arity: 3,
            table: table_from_fn(n, 3, |a| {
                if a[1] == a[2] {
                    a[1]
                } else {
                    // a[0] is either repeated or all three differ
                    a[0]
                }
            }),
        }],
    })
}

/// `({0,1}, x ∧ y ∧ z)`.
pub fn make_meet3() -> FiniteAlgebra {
    FiniteAlgebra {
        name: "D".into(),
        size: 2,
        ops: vec![BasicOp {
            name: "f".into(),
            arity: 3,
            table: table_from_fn(2, 3, |a| a[0].min(a[1]).min(a[2])),
        }],
    }
}

/// Direct product. The pair `(i, j)` is encoded as `i * |rhs| + j`.
pub fn product(lhs: &FiniteAlgebra, rhs: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    if lhs.signature() != rhs.signature() {
        return Err(AlgebraError::SignatureMismatch {
            lhs: lhs.name.clone(),
            rhs: rhs.name.clone(),
        });
    }
    let size = lhs
        .size
        .checked_mul(rhs.size)
        .ok_or(AlgebraError::ProductTooLarge)?;
    let ops = lhs
        .ops
        .iter()
        .enumerate()
        .map(|(k, op)| {
            let mut left = vec![0; op.arity];
            let mut right = vec![0; op.arity];
            let table = table_from_fn(size, op.arity, |args| {
                for (i, &a) in args.iter().enumerate() {
                    left[i] = a / rhs.size;
                    right[i] = a % rhs.size;
                }
                lhs.apply(k, &left) * rhs.size + rhs.apply(k, &right)
            });
            BasicOp {
                name: op.name.clone(),
                arity: op.arity,
                table,
            }
        })
        .collect();
    Ok(FiniteAlgebra {
        name: format!("{}x{}", lhs.name, rhs.name),
        size,
        ops,
    })
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = ["B", "A2", "A3", "C", "D", "CxD"];

/// Resolves one of the built-in test algebras by name.
pub fn builtin(name: &str) -> Option<FiniteAlgebra> {
    let alg = match name {
        "B" => make_semilattice(),
        "A2" => rename(make_majority_first(2).ok()?, "A2"),
        "A3" => make_majority_first(3).ok()?,
        "C" => make_majority_first(2).ok()?,
        "D" => make_meet3(),
        "CxD" => product(&make_majority_first(2).ok()?, &make_meet3()).ok()?,
        _ => return None,
    };
    Some(alg)
}

fn rename(mut alg: FiniteAlgebra, name: &str) -> FiniteAlgebra {
    alg.name = name.to_string();
    alg
}
