//! Linear identities over abstract operation symbols.
//!
//! A linear term is either a variable or one symbol applied to variables; an
//! identity equates two linear terms. Variables are drawn from the fixed
//! alphabet `x, y, z, u, v, w` and stored as indices `0..6`.

mod canon;
mod parse;
mod semantics;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::clone::{variable_name, VARIABLE_NAMES};
use crate::error::SystemError;

pub(crate) use canon::permutations;
pub use canon::{canonicalize, closure_classes, symmetry_group, SymbolMap};
pub use parse::parse_system;
pub(crate) use semantics::common_classes;
pub use semantics::{
    find_interpretations, find_interpretations_capped, satisfies, term_universe, theory_of,
    two_variable_consequence, Interpretation, DEFAULT_CLONE_CAP,
};

pub const MAX_VARIABLES: usize = VARIABLE_NAMES.len();

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SymbolSignature {
    symbols: Vec<Symbol>,
}

impl SymbolSignature {
    pub fn new<S: Into<String>>(
        symbols: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, SystemError> {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if !(1..=3).contains(&arity) {
                return Err(SystemError::BadArity(name));
            }
            if VARIABLE_NAMES.contains(&name.as_str()) {
                return Err(SystemError::SymbolIsVariable(name));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(SystemError::DuplicateSymbol(name));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Self { symbols: out })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.symbols[sym].arity
    }

    pub fn name(&self, sym: usize) -> &str {
        &self.symbols[sym].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arities(&self) -> BTreeSet<usize> {
        self.symbols.iter().map(|s| s.arity).collect()
    }
}

/// A variable, or a symbol applied to variables. Variables sort first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinearTerm {
    Var(u8),
    App { sym: usize, args: Vec<u8> },
}

impl LinearTerm {
    pub fn app(sym: usize, args: impl Into<Vec<u8>>) -> Self {
        LinearTerm::App {
            sym,
            args: args.into(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = u8> + '_ {
        let (single, many): (Option<u8>, &[u8]) = match self {
            LinearTerm::Var(v) => (Some(*v), &[]),
            LinearTerm::App { args, .. } => (None, args),
        };
        single.into_iter().chain(many.iter().copied())
    }

    pub fn rename(&self, f: impl Fn(u8) -> u8) -> Self {
        match self {
            LinearTerm::Var(v) => LinearTerm::Var(f(*v)),
            LinearTerm::App { sym, args } => LinearTerm::App {
                sym: *sym,
                args: args.iter().map(|&a| f(a)).collect(),
            },
        }
    }

    /// With idempotent symbols, `s(v,..,v)` is just `v`.
    pub fn idempotent_normal(&self) -> Self {
        match self {
            LinearTerm::App { args, .. } if args.windows(2).all(|w| w[0] == w[1]) => {
                LinearTerm::Var(args[0])
            }
            _ => self.clone(),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a SymbolSignature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }

    fn validate(&self, sig: &SymbolSignature) -> Result<(), SystemError> {
        if let Some(v) = self.vars().find(|&v| usize::from(v) >= MAX_VARIABLES) {
            return Err(SystemError::VariableOutOfRange(v));
        }
        if let LinearTerm::App { sym, args } = self {
            let symbol = sig
                .symbols
                .get(*sym)
                .ok_or(SystemError::UnknownSymbol(*sym))?;
            if symbol.arity != args.len() {
                return Err(SystemError::Arity {
                    name: symbol.name.clone(),
                    expected: symbol.arity,
                    found: args.len(),
                });
            }
        }
        Ok(())
    }
}

pub struct TermDisplay<'a> {
    term: &'a LinearTerm,
    sig: &'a SymbolSignature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            LinearTerm::Var(v) => f.write_str(&variable_name(usize::from(*v))),
            LinearTerm::App { sym, args } => {
                write!(f, "{}(", self.sig.name(*sym))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&variable_name(usize::from(*a)))?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An unordered pair of linear terms, stored with `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity {
    lhs: LinearTerm,
    rhs: LinearTerm,
}

impl Identity {
    /// Returns `None` for reflexive identities.
    pub fn new(a: LinearTerm, b: LinearTerm) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { lhs: a, rhs: b }),
            std::cmp::Ordering::Greater => Some(Self { lhs: b, rhs: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lhs(&self) -> &LinearTerm {
        &self.lhs
    }

    pub fn rhs(&self) -> &LinearTerm {
        &self.rhs
    }

    pub fn sides(&self) -> [&LinearTerm; 2] {
        [&self.lhs, &self.rhs]
    }

    /// Distinct variables, ascending.
    pub fn vars(&self) -> Vec<u8> {
        let set: BTreeSet<u8> = self.lhs.vars().chain(self.rhs.vars()).collect();
        set.into_iter().collect()
    }

    pub fn rename(&self, f: impl Fn(u8) -> u8 + Copy) -> Option<Self> {
        Self::new(self.lhs.rename(f), self.rhs.rename(f))
    }

    pub fn display<'a>(&'a self, sig: &'a SymbolSignature) -> IdentityDisplay<'a> {
        IdentityDisplay { id: self, sig }
    }
}

pub struct IdentityDisplay<'a> {
    id: &'a Identity,
    sig: &'a SymbolSignature,
}

impl fmt::Display for IdentityDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {}",
            self.id.lhs.display(self.sig),
            self.id.rhs.display(self.sig)
        )
    }
}

/// A finite set of linear identities over a signature.
///
/// Reflexive identities are dropped and duplicates collapse on insertion;
/// otherwise insertion order is kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdentitySystem {
    signature: SymbolSignature,
    identities: Vec<Identity>,
}

impl IdentitySystem {
    pub fn new(signature: SymbolSignature) -> Self {
        Self {
            signature,
            identities: Vec::new(),
        }
    }

    pub fn from_identities(
        signature: SymbolSignature,
        identities: impl IntoIterator<Item = Identity>,
    ) -> Result<Self, SystemError> {
        let mut sys = Self::new(signature);
        for id in identities {
            sys.insert(id)?;
        }
        Ok(sys)
    }

    /// Builds a system from equivalence classes of terms, chaining each
    /// class through its terms in the given order.
    pub fn from_classes(
        signature: SymbolSignature,
        classes: &[Vec<LinearTerm>],
    ) -> Result<Self, SystemError> {
        let mut sys = Self::new(signature);
        for class in classes {
            for pair in class.windows(2) {
                sys.add(pair[0].clone(), pair[1].clone())?;
            }
        }
        Ok(sys)
    }

    pub fn insert(&mut self, id: Identity) -> Result<bool, SystemError> {
        id.lhs.validate(&self.signature)?;
        id.rhs.validate(&self.signature)?;
        if self.identities.contains(&id) {
            return Ok(false);
        }
        self.identities.push(id);
        Ok(true)
    }

    /// Adds `a ≈ b`; returns `false` if it was reflexive or already present.
    pub fn add(&mut self, a: LinearTerm, b: LinearTerm) -> Result<bool, SystemError> {
        a.validate(&self.signature)?;
        b.validate(&self.signature)?;
        match Identity::new(a, b) {
            Some(id) => self.insert(id),
            None => Ok(false),
        }
    }

    pub fn signature(&self) -> &SymbolSignature {
        &self.signature
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    /// Number of distinct variables used across the whole system.
    pub fn variable_count(&self) -> usize {
        self.identities
            .iter()
            .flat_map(|id| id.vars())
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Largest number of distinct variables in a single identity.
    pub fn max_identity_variables(&self) -> usize {
        self.identities
            .iter()
            .map(|id| id.vars().len())
            .max()
            .unwrap_or(0)
    }

    /// Subsystem keeping the identities at the given positions.
    pub fn subsystem(&self, keep: impl IntoIterator<Item = usize>) -> Self {
        Self {
            signature: self.signature.clone(),
            identities: keep
                .into_iter()
                .map(|i| self.identities[i].clone())
                .collect(),
        }
    }

    /// Same system with `other`'s identities appended.
    pub fn union(&self, other: &Self) -> Result<Self, SystemError> {
        let mut out = self.clone();
        for id in &other.identities {
            out.insert(id.clone())?;
        }
        Ok(out)
    }

    /// Equivalence classes of literal terms under the identities, each
    /// sorted, singletons omitted, classes sorted.
    pub fn classes(&self) -> Vec<Vec<LinearTerm>> {
        classes_of(self.identities.iter().map(|id| (&id.lhs, &id.rhs)))
    }

    /// Every symbol is idempotent: rewrites `s(v,..,v)` to `v`.
    pub fn idempotent_normal(&self) -> Self {
        let mut out = Self::new(self.signature.clone());
        for id in &self.identities {
            out.add(id.lhs.idempotent_normal(), id.rhs.idempotent_normal())
                .expect("normalization keeps validity");
        }
        out
    }

    /// `p/3; q/3;` header followed by one identity per line.
    pub fn format(&self) -> String {
        let mut out = String::new();
        for s in &self.signature.symbols {
            out.push_str(&format!("{}/{}; ", s.name, s.arity));
        }
        if !out.is_empty() {
            out.pop();
            out.push('\n');
        }
        for id in &self.identities {
            out.push_str(&format!("{};\n", id.display(&self.signature)));
        }
        out
    }

    /// Identities grouped into chains `a = b = c`, one class per entry.
    pub fn chains(&self) -> Vec<String> {
        self.classes()
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|t| t.display(&self.signature).to_string())
                    .collect::<Vec<_>>()
                    .join(" = ")
            })
            .collect()
    }
}

impl fmt::Display for IdentitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

impl Serialize for IdentitySystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IdentitySystem", 3)?;
        st.serialize_field("signature", &self.signature.symbols)?;
        let ids: Vec<String> = self
            .identities
            .iter()
            .map(|id| id.display(&self.signature).to_string())
            .collect();
        st.serialize_field("identities", &ids)?;
        st.serialize_field("chains", &self.chains())?;
        st.end()
    }
}

/// Union-find over terms: returns the non-singleton classes, sorted.
pub(crate) fn classes_of<'a>(
    pairs: impl IntoIterator<Item = (&'a LinearTerm, &'a LinearTerm)>,
) -> Vec<Vec<LinearTerm>> {
    let mut uf = TermUnionFind::default();
    for (a, b) in pairs {
        uf.union(a, b);
    }
    uf.classes()
}

#[derive(Default)]
pub(crate) struct TermUnionFind {
    index: HashMap<LinearTerm, usize>,
    terms: Vec<LinearTerm>,
    parent: Vec<usize>,
}

impl TermUnionFind {
    fn id(&mut self, t: &LinearTerm) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.terms.len();
        self.index.insert(t.clone(), i);
        self.terms.push(t.clone());
        self.parent.push(i);
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: &LinearTerm, b: &LinearTerm) {
        let (a, b) = (self.id(a), self.id(b));
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub(crate) fn classes(mut self) -> Vec<Vec<LinearTerm>> {
        let mut groups: HashMap<usize, Vec<LinearTerm>> = HashMap::new();
        for i in 0..self.terms.len() {
            let r = self.find(i);
            groups.entry(r).or_default().push(self.terms[i].clone());
        }
        let mut out: Vec<Vec<LinearTerm>> = groups
            .into_values()
            .filter(|g| g.len() > 1)
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        out.sort();
        out
    }
}
