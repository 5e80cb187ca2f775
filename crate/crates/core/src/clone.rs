//! Term operations and k-ary clone slices generated by closure.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::algebra::{decode_index, table_index, table_len, FiniteAlgebra};
use crate::error::CloneError;

/// Variable names used when printing terms and identities.
pub const VARIABLE_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

pub fn variable_name(index: usize) -> String {
    VARIABLE_NAMES
        .get(index)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("x{}", index + 1))
}

/// A term over the basic operations of an algebra, recorded as provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    Apply {
        op: usize,
        name: Arc<str>,
        args: Vec<Arc<Term>>,
    },
}

impl Term {
    pub fn eval(&self, alg: &FiniteAlgebra, env: &[usize]) -> usize {
        match self {
            Term::Var(i) => env[*i],
            Term::Apply { op, args, .. } => {
                let vals: Vec<usize> = args.iter().map(|t| t.eval(alg, env)).collect();
                alg.apply(*op, &vals)
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Apply { args, .. } => 1 + args.iter().map(|t| t.depth()).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => f.write_str(&variable_name(*i)),
            Term::Apply { name, args, .. } => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A k-ary operation on `0..size`, stored as a flat table.
///
/// Equality, ordering and hashing look at the table only; the generating
/// term is carried along for reporting.
#[derive(Clone, Debug)]
pub struct TermOperation {
    size: usize,
    arity: usize,
    table: Vec<usize>,
    term: Option<Arc<Term>>,
}

impl PartialEq for TermOperation {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.arity == other.arity && self.table == other.table
    }
}

impl Eq for TermOperation {}

impl Hash for TermOperation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.size.hash(state);
        self.arity.hash(state);
        self.table.hash(state);
    }
}

impl PartialOrd for TermOperation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TermOperation {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.arity, self.size, &self.table).cmp(&(other.arity, other.size, &other.table))
    }
}

impl Serialize for TermOperation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TermOperation", 3)?;
        st.serialize_field("arity", &self.arity)?;
        st.serialize_field("table", &self.table)?;
        st.serialize_field("term", &self.term.as_ref().map(|t| t.to_string()))?;
        st.end()
    }
}

impl TermOperation {
    /// Wraps a raw table. Panics if the length does not match `size^arity`.
    pub fn from_table(size: usize, arity: usize, table: Vec<usize>) -> Self {
        assert_eq!(Some(table.len()), table_len(size, arity), "table length");
        debug_assert!(table.iter().all(|&v| v < size));
        Self {
            size,
            arity,
            table,
            term: None,
        }
    }

    pub fn projection(size: usize, arity: usize, index: usize) -> Self {
        assert!(index < arity);
        let len = table_len(size, arity).expect("small table");
        let mut args = vec![0; arity];
        let table = (0..len)
            .map(|i| {
                decode_index(size, i, &mut args);
                args[index]
            })
            .collect();
        Self {
            size,
            arity,
            table,
            term: Some(Arc::new(Term::Var(index))),
        }
    }

    /// The basic operation `op` of `alg` as a term operation of its own arity.
    pub fn basic(alg: &FiniteAlgebra, op: usize) -> Self {
        let arity = alg.ops()[op].arity;
        let projections: Vec<_> = (0..arity)
            .map(|i| Self::projection(alg.size(), arity, i))
            .collect();
        let refs: Vec<&Self> = projections.iter().collect();
        Self::compose(alg, op, &refs)
    }

    /// `op(args[0], .., args[m-1])` evaluated pointwise.
    pub fn compose(alg: &FiniteAlgebra, op: usize, args: &[&TermOperation]) -> Self {
        let basic = &alg.ops()[op];
        assert_eq!(basic.arity, args.len(), "argument count");
        let first = args.first().expect("operations have arity >= 1");
        let (size, arity) = (first.size, first.arity);
        assert!(args.iter().all(|a| a.size == size && a.arity == arity));
        let mut table = Vec::with_capacity(first.table.len());
        for i in 0..first.table.len() {
            let idx = args.iter().fold(0, |acc, a| acc * size + a.table[i]);
            table.push(basic.table[idx]);
        }
        let term = args
            .iter()
            .map(|a| a.term.clone())
            .collect::<Option<Vec<_>>>()
            .map(|args| {
                Arc::new(Term::Apply {
                    op,
                    name: Arc::from(basic.name.as_str()),
                    args,
                })
            });
        Self {
            size,
            arity,
            table,
            term,
        }
    }

    /// Identification/permutation of variables:
    /// `result(y_0..y_{n-1}) = self(y_{map[0]}, .., y_{map[k-1]})`.
    pub fn minor(&self, map: &[usize], new_arity: usize) -> Self {
        assert_eq!(map.len(), self.arity);
        assert!(map.iter().all(|&m| m < new_arity));
        let len = table_len(self.size, new_arity).expect("small table");
        let mut args = vec![0; new_arity];
        let mut inner = vec![0; self.arity];
        let table = (0..len)
            .map(|i| {
                decode_index(self.size, i, &mut args);
                for (slot, &m) in inner.iter_mut().zip(map) {
                    *slot = args[m];
                }
                self.eval(&inner)
            })
            .collect();
        Self {
            size: self.size,
            arity: new_arity,
            table,
            term: None,
        }
    }

    #[inline]
    pub fn eval(&self, args: &[usize]) -> usize {
        self.table[table_index(self.size, args)]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn term(&self) -> Option<&Term> {
        self.term.as_deref()
    }

    pub fn with_term(mut self, term: Term) -> Self {
        self.term = Some(Arc::new(term));
        self
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.size).all(|a| self.eval(&vec![a; self.arity]) == a)
    }

    /// Printable name: the generating term if known, else the raw table.
    pub fn label(&self) -> String {
        match &self.term {
            Some(t) => t.to_string(),
            None => format!("{:?}", self.table),
        }
    }
}

/// The k-ary term operations of an algebra.
#[derive(Clone, Debug, Serialize)]
pub struct CloneSlice {
    pub algebra: String,
    pub size: usize,
    pub arity: usize,
    /// Deduplicated and sorted by table.
    pub members: Vec<TermOperation>,
    /// Number of composition rounds until the fixpoint.
    pub rounds: usize,
}

impl CloneSlice {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, op: &TermOperation) -> bool {
        self.members.binary_search(op).is_ok()
    }

    pub fn idempotent_members(&self) -> Vec<TermOperation> {
        self.members
            .iter()
            .filter(|m| m.is_idempotent())
            .cloned()
            .collect()
    }
}

/// Least set of `arity`-ary operations containing the projections and closed
/// under every basic operation, built breadth-first by term depth.
pub fn generate_term_operations(
    alg: &FiniteAlgebra,
    arity: usize,
    cap: usize,
) -> Result<CloneSlice, CloneError> {
    if arity == 0 {
        return Err(CloneError::ZeroArity);
    }
    if cap == 0 {
        return Err(CloneError::ZeroCap);
    }
    let size = alg.size();
    if table_len(size, arity).is_none_or(|len| len > 1 << 24) {
        return Err(CloneError::TableTooLarge { size, arity });
    }
    let cap_error = || CloneError::CapExceeded {
        algebra: alg.name().to_string(),
        arity,
        cap,
    };

    let mut members: Vec<TermOperation> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for i in 0..arity {
        let p = TermOperation::projection(size, arity, i);
        if !index.contains_key(&p.table) {
            index.insert(p.table.clone(), members.len());
            members.push(p);
        }
    }
    if members.len() > cap {
        return Err(cap_error());
    }

    let mut frontier_start = 0;
    let mut rounds = 0;
    loop {
        let old_len = members.len();
        let mut fresh: Vec<TermOperation> = Vec::new();
        for (op, basic) in alg.ops().iter().enumerate() {
            let m = basic.arity;
            let mut tuple = vec![0usize; m];
            // odometer over all m-tuples of current members
            'tuples: loop {
                if tuple.iter().any(|&t| t >= frontier_start) {
                    let args: Vec<&TermOperation> = tuple.iter().map(|&t| &members[t]).collect();
                    let candidate = TermOperation::compose(alg, op, &args);
                    if !index.contains_key(&candidate.table) {
                        index.insert(candidate.table.clone(), old_len + fresh.len());
                        fresh.push(candidate);
                        if old_len + fresh.len() > cap {
                            return Err(cap_error());
                        }
                    }
                }
                for slot in tuple.iter_mut().rev() {
                    *slot += 1;
                    if *slot < old_len {
                        continue 'tuples;
                    }
                    *slot = 0;
                }
                break;
            }
        }
        if fresh.is_empty() {
            break;
        }
        rounds += 1;
        frontier_start = old_len;
        members.extend(fresh);
    }

    members.sort();
    Ok(CloneSlice {
        algebra: alg.name().to_string(),
        size,
        arity,
        members,
        rounds,
    })
}

/// Structural flags of a single operation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OperationProfile {
    /// Index of the projected argument, if the operation is a projection.
    pub projection: Option<usize>,
    pub idempotent: bool,
    pub majority: bool,
    pub near_unanimity: bool,
    pub weak_near_unanimity: bool,
}

impl OperationProfile {
    pub fn is_projection(&self) -> bool {
        self.projection.is_some()
    }
}

/// Value of `op` at the one-off pattern: `y` in position `pos`, `x` elsewhere.
fn one_off(op: &TermOperation, pos: usize, x: usize, y: usize, buf: &mut [usize]) -> usize {
    buf.fill(x);
    buf[pos] = y;
    op.eval(buf)
}

pub fn classify_operation(op: &TermOperation) -> OperationProfile {
    let size = op.size();
    let k = op.arity();
    let projection = (0..k).find(|&i| *op == TermOperation::projection(size, k, i));
    let idempotent = op.is_idempotent();
    let mut buf = vec![0; k];

    let near_unanimity = k >= 2
        && (0..size)
            .all(|x| (0..size).all(|y| (0..k).all(|pos| one_off(op, pos, x, y, &mut buf) == x)));
    let weak_near_unanimity = k >= 2
        && idempotent
        && (0..size).all(|x| {
            (0..size).all(|y| {
                let first = one_off(op, 0, x, y, &mut buf);
                (1..k).all(|pos| one_off(op, pos, x, y, &mut buf) == first)
            })
        });
    OperationProfile {
        projection,
        idempotent,
        majority: k == 3 && near_unanimity,
        near_unanimity,
        weak_near_unanimity,
    }
}
