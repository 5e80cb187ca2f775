//! Canonical forms of identity systems.
//!
//! Two systems are identified when one becomes the other after permuting
//! the argument positions of each symbol uniformly, renaming symbols of the
//! same arity, renaming the variables of individual identities, swapping
//! sides and reordering. The first two act on the whole system and are
//! quotiented by searching the symmetry group; the last three are absorbed
//! by working with the closure: the partition of terms generated by every
//! variable permutation of every identity, closed under transitivity.

use super::{IdentitySystem, LinearTerm, SymbolSignature, TermUnionFind, MAX_VARIABLES};

/// A signature automorphism: symbol `s` becomes `target[s]`, and argument
/// `i` of the image is argument `arg_perm[s][i]` of the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMap {
    pub target: Vec<usize>,
    pub arg_perm: Vec<Vec<usize>>,
}

impl SymbolMap {
    pub fn identity(sig: &SymbolSignature) -> Self {
        Self {
            target: (0..sig.len()).collect(),
            arg_perm: sig
                .symbols()
                .iter()
                .map(|s| (0..s.arity).collect())
                .collect(),
        }
    }

    pub fn apply(&self, t: &LinearTerm) -> LinearTerm {
        match t {
            LinearTerm::Var(v) => LinearTerm::Var(*v),
            LinearTerm::App { sym, args } => LinearTerm::App {
                sym: self.target[*sym],
                args: self.arg_perm[*sym].iter().map(|&i| args[i]).collect(),
            },
        }
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Every arity-preserving symbol renaming combined with every choice of
/// per-symbol argument permutation.
pub fn symmetry_group(sig: &SymbolSignature) -> Vec<SymbolMap> {
    let n = sig.len();
    let renamings: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .filter(|p| (0..n).all(|s| sig.arity(p[s]) == sig.arity(s)))
        .collect();
    let mut arg_choices: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for s in sig.symbols() {
        let perms = permutations(s.arity);
        arg_choices = arg_choices
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut next = prefix.clone();
                    next.push(p.clone());
                    next
                })
            })
            .collect();
    }
    let mut out = Vec::with_capacity(renamings.len() * arg_choices.len());
    for target in &renamings {
        for arg_perm in &arg_choices {
            out.push(SymbolMap {
                target: target.clone(),
                arg_perm: arg_perm.clone(),
            });
        }
    }
    out
}

/// Renames variables in order of first occurrence, so an identity on `k`
/// variables uses exactly `0..k`.
fn compress(a: &LinearTerm, b: &LinearTerm) -> (LinearTerm, LinearTerm) {
    let mut seen: Vec<u8> = Vec::new();
    for v in a.vars().chain(b.vars()) {
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    let f = |v: u8| seen.iter().position(|&s| s == v).unwrap() as u8;
    (a.rename(f), b.rename(f))
}

/// Number of variables the closure is taken over.
fn closure_width(sys: &IdentitySystem) -> usize {
    sys.max_identity_variables().clamp(2, MAX_VARIABLES)
}

/// Classes of the equivalence generated by all variable permutations of
/// all identities, over `max(2, k)` variables where `k` is the largest
/// number of variables in one identity. Classes are sorted, singletons
/// omitted.
pub fn closure_classes(sys: &IdentitySystem) -> Vec<Vec<LinearTerm>> {
    let width = closure_width(sys);
    let perms = permutations(width);
    let mut uf = TermUnionFind::default();
    for id in sys.identities() {
        let (a, b) = compress(id.lhs(), id.rhs());
        for p in &perms {
            let f = |v: u8| p[usize::from(v)] as u8;
            uf.union(&a.rename(f), &b.rename(f));
        }
    }
    uf.classes()
}

fn image(map: &SymbolMap, classes: &[Vec<LinearTerm>]) -> Vec<Vec<LinearTerm>> {
    let mut out: Vec<Vec<LinearTerm>> = classes
        .iter()
        .map(|c| {
            let mut c: Vec<LinearTerm> = c.iter().map(|t| map.apply(t)).collect();
            c.sort();
            c
        })
        .collect();
    out.sort();
    out
}

/// Least representative of the closure under the symmetry group, written
/// back as chains through each class.
pub fn canonicalize(sys: &IdentitySystem) -> IdentitySystem {
    let classes = closure_classes(sys);
    let best = symmetry_group(sys.signature())
        .iter()
        .map(|g| image(g, &classes))
        .min()
        .unwrap_or_default();
    IdentitySystem::from_classes(sys.signature().clone(), &best)
        .expect("symmetries preserve validity")
}
