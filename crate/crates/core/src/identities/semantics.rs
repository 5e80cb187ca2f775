//! Interpretations of symbols as term operations, and satisfaction.

use std::collections::{BTreeMap, HashMap};

use serde::{Serialize, Serializer};

use crate::algebra::{decode_index, table_len, FiniteAlgebra};
use crate::clone::{generate_term_operations, TermOperation};
use crate::error::SystemError;

use super::{classes_of, Identity, IdentitySystem, LinearTerm, SymbolSignature};

/// Clone cap used by [`find_interpretations`].
pub const DEFAULT_CLONE_CAP: usize = 10_000;

/// Each symbol of a signature mapped to an operation on one universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interpretation {
    signature: SymbolSignature,
    size: usize,
    ops: Vec<TermOperation>,
}

impl Interpretation {
    pub fn new(signature: SymbolSignature, ops: Vec<TermOperation>) -> Result<Self, SystemError> {
        if ops.len() != signature.len() {
            return Err(SystemError::Interpretation(format!(
                "{} operations for {} symbols",
                ops.len(),
                signature.len()
            )));
        }
        let size = ops.first().map_or(1, |o| o.size());
        for (i, op) in ops.iter().enumerate() {
            if op.arity() != signature.arity(i) {
                return Err(SystemError::Interpretation(format!(
                    "symbol {} has arity {}, operation has arity {}",
                    signature.name(i),
                    signature.arity(i),
                    op.arity()
                )));
            }
            if op.size() != size {
                return Err(SystemError::Interpretation(
                    "operations live on different universes".into(),
                ));
            }
        }
        Ok(Self {
            signature,
            size,
            ops,
        })
    }

    pub fn signature(&self) -> &SymbolSignature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[TermOperation] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&TermOperation> {
        self.signature.index_of(name).map(|i| &self.ops[i])
    }

    pub fn eval(&self, t: &LinearTerm, env: &[usize]) -> usize {
        match t {
            LinearTerm::Var(v) => env[usize::from(*v)],
            LinearTerm::App { sym, args } => {
                let op = &self.ops[*sym];
                let idx = args
                    .iter()
                    .fold(0, |acc, &a| acc * self.size + env[usize::from(a)]);
                op.table()[idx]
            }
        }
    }

    /// The function `t` defines on `num_vars` variables, as a flat table.
    pub fn term_table(&self, t: &LinearTerm, num_vars: usize) -> Vec<usize> {
        let len = table_len(self.size, num_vars).expect("small table");
        let mut env = vec![0; num_vars.max(super::MAX_VARIABLES)];
        (0..len)
            .map(|i| {
                decode_index(self.size, i, &mut env[..num_vars]);
                self.eval(t, &env)
            })
            .collect()
    }

    pub fn satisfies_identity(&self, id: &Identity) -> bool {
        let vars = id.vars();
        let mut env = [0usize; super::MAX_VARIABLES];
        let mut vals = vec![0; vars.len()];
        let total = table_len(self.size, vars.len()).expect("small table");
        (0..total).all(|i| {
            decode_index(self.size, i, &mut vals);
            for (&v, &a) in vars.iter().zip(&vals) {
                env[usize::from(v)] = a;
            }
            self.eval(id.lhs(), &env) == self.eval(id.rhs(), &env)
        })
    }

    /// `name = term` for each symbol, using the provenance term when known.
    pub fn labels(&self) -> Vec<(String, String)> {
        self.signature
            .symbols()
            .iter()
            .zip(&self.ops)
            .map(|(s, op)| (s.name.clone(), op.label()))
            .collect()
    }
}

impl std::fmt::Display for Interpretation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .labels()
            .into_iter()
            .map(|(n, l)| format!("{n} = {l}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

impl Serialize for Interpretation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, &TermOperation> = self
            .signature
            .symbols()
            .iter()
            .map(|sym| sym.name.as_str())
            .zip(&self.ops)
            .collect();
        map.serialize(s)
    }
}

/// Whether every identity holds under every assignment of its variables.
pub fn satisfies(interp: &Interpretation, sys: &IdentitySystem) -> bool {
    debug_assert_eq!(
        interp.signature.symbols().len(),
        sys.signature().len(),
        "signature mismatch"
    );
    sys.identities()
        .iter()
        .all(|id| interp.satisfies_identity(id))
}

/// Every interpretation of `sys`'s symbols by term operations of `alg` that
/// satisfies it, in lexicographic order of the members chosen.
pub fn find_interpretations(
    alg: &FiniteAlgebra,
    sys: &IdentitySystem,
    idempotent_only: bool,
) -> Result<Vec<Interpretation>, SystemError> {
    find_interpretations_capped(alg, sys, idempotent_only, DEFAULT_CLONE_CAP)
}

pub fn find_interpretations_capped(
    alg: &FiniteAlgebra,
    sys: &IdentitySystem,
    idempotent_only: bool,
    cap: usize,
) -> Result<Vec<Interpretation>, SystemError> {
    let sig = sys.signature();
    let mut pools: HashMap<usize, Vec<TermOperation>> = HashMap::new();
    for arity in sig.arities() {
        let slice = generate_term_operations(alg, arity, cap)?;
        let members = if idempotent_only {
            slice.idempotent_members()
        } else {
            slice.members
        };
        pools.insert(arity, members);
    }
    let candidates: Vec<&[TermOperation]> = (0..sig.len())
        .map(|s| pools[&sig.arity(s)].as_slice())
        .collect();

    // identities become checkable once their highest symbol is assigned
    let mut due: Vec<Vec<&Identity>> = vec![Vec::new(); sig.len()];
    let mut always: Vec<&Identity> = Vec::new();
    for id in sys.identities() {
        let top = id
            .sides()
            .iter()
            .filter_map(|t| match t {
                LinearTerm::App { sym, .. } => Some(*sym),
                LinearTerm::Var(_) => None,
            })
            .max();
        match top {
            Some(s) => due[s].push(id),
            None => always.push(id),
        }
    }

    let mut out = Vec::new();
    let mut chosen: Vec<TermOperation> = Vec::with_capacity(sig.len());
    let probe =
        |chosen: &[TermOperation], ids: &[&Identity]| {
            let mut ops = chosen.to_vec();
            // unassigned symbols are never evaluated by the identities checked
            while ops.len() < sig.len() {
                ops.push(candidates[ops.len()].first().cloned().unwrap_or_else(|| {
                    TermOperation::projection(alg.size(), sig.arity(ops.len()), 0)
                }));
            }
            let interp = Interpretation {
                signature: sig.clone(),
                size: alg.size(),
                ops,
            };
            ids.iter().all(|id| interp.satisfies_identity(id))
        };
    if !probe(&chosen, &always) {
        return Ok(out);
    }
    search(&candidates, &due, &mut chosen, &probe, &mut |ops| {
        out.push(Interpretation {
            signature: sig.clone(),
            size: alg.size(),
            ops,
        })
    });
    Ok(out)
}

fn search(
    candidates: &[&[TermOperation]],
    due: &[Vec<&Identity>],
    chosen: &mut Vec<TermOperation>,
    probe: &impl Fn(&[TermOperation], &[&Identity]) -> bool,
    emit: &mut impl FnMut(Vec<TermOperation>),
) {
    let k = chosen.len();
    if k == candidates.len() {
        emit(chosen.clone());
        return;
    }
    for op in candidates[k] {
        chosen.push(op.clone());
        if probe(chosen, &due[k]) {
            search(candidates, due, chosen, probe, emit);
        }
        chosen.pop();
    }
}

/// All linear terms over the signature in the first `num_vars` variables,
/// sorted.
pub fn term_universe(sig: &SymbolSignature, num_vars: usize) -> Vec<LinearTerm> {
    let mut out: Vec<LinearTerm> = (0..num_vars as u8).map(LinearTerm::Var).collect();
    for (sym, s) in sig.symbols().iter().enumerate() {
        let count = table_len(num_vars, s.arity).expect("small arity");
        let mut args = vec![0usize; s.arity];
        for i in 0..count {
            decode_index(num_vars, i, &mut args);
            out.push(LinearTerm::app(
                sym,
                args.iter().map(|&a| a as u8).collect::<Vec<u8>>(),
            ));
        }
    }
    out.sort();
    out
}

/// Every linear identity in at most `num_vars` variables that holds under
/// `interp`. Reflexive identities are implicit.
pub fn theory_of(interp: &Interpretation, num_vars: usize) -> IdentitySystem {
    let mut groups: BTreeMap<Vec<usize>, Vec<LinearTerm>> = BTreeMap::new();
    for t in term_universe(&interp.signature, num_vars) {
        groups
            .entry(interp.term_table(&t, num_vars))
            .or_default()
            .push(t);
    }
    let mut sys = IdentitySystem::new(interp.signature.clone());
    for group in groups.values() {
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                sys.add(a.clone(), b.clone())
                    .expect("universe terms are valid");
            }
        }
    }
    sys
}

/// Replaces each identity mentioning `z` by its two instances `z := x` and
/// `z := y`. Identities already in `x, y` are kept.
pub fn two_variable_consequence(sys: &IdentitySystem) -> Result<IdentitySystem, SystemError> {
    let mut out = IdentitySystem::new(sys.signature().clone());
    for id in sys.identities() {
        let vars = id.vars();
        if vars.iter().any(|&v| v > 2) {
            return Err(SystemError::TooManyVariables);
        }
        if vars.contains(&2) {
            for target in [0u8, 1] {
                let f = |v: u8| if v == 2 { target } else { v };
                out.add(id.lhs().rename(f), id.rhs().rename(f))?;
            }
        } else {
            out.insert(id.clone())?;
        }
    }
    Ok(out)
}

/// Partition of the term universe into classes of equal functions, for
/// several interpretations at once (the intersection of their theories).
pub(crate) fn common_classes(
    interps: &[&Interpretation],
    universe: &[LinearTerm],
    num_vars: usize,
) -> Vec<Vec<LinearTerm>> {
    let mut groups: BTreeMap<Vec<Vec<usize>>, Vec<LinearTerm>> = BTreeMap::new();
    for t in universe {
        let key = interps.iter().map(|i| i.term_table(t, num_vars)).collect();
        groups.entry(key).or_default().push(t.clone());
    }
    let pairs: Vec<(LinearTerm, LinearTerm)> = groups
        .values()
        .flat_map(|g| g.windows(2).map(|w| (w[0].clone(), w[1].clone())))
        .collect();
    classes_of(pairs.iter().map(|(a, b)| (a, b)))
}
