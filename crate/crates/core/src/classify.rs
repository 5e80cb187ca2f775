//! The filter pipeline over whole signature classes.
//!
//! A linear system on a few idempotent symbols can only characterize
//! omitting types 1 and 2 if it holds in both test algebras (by default the
//! 2-element majority algebra `C` and the semilattice `B`) and fails in every
//! idempotent reduct of a module over a finite ring. For each pair of
//! interpretations in the two test algebras, the common theory over a
//! bounded number of variables is computed and, when unrealizable, cut down
//! to its minimal unrealizable refinements. Survivors are reported up to
//! canonical equivalence and finally tested against `C×D`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::affine::{finite_ring_verdict, is_realizable, Verdict, DEFAULT_BRUTE_BOUND};
use crate::algebra::{builtin, FiniteAlgebra};
use crate::clone::generate_term_operations;
use crate::error::ClassifyError;
use crate::identities::{
    canonicalize, common_classes, find_interpretations, find_interpretations_capped, permutations,
    term_universe, IdentitySystem, Interpretation, LinearTerm, SymbolSignature, DEFAULT_CLONE_CAP,
};
use crate::systems::{self, known_name};

/// Partitions of a term set, each given by its non-singleton blocks.
type Blocks = Vec<Vec<LinearTerm>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignatureClass {
    OneBinary,
    TwoBinary,
    OneTernary,
    BinaryTernary,
    TwoTernary,
}

impl SignatureClass {
    pub const ALL: [SignatureClass; 5] = [
        SignatureClass::OneBinary,
        SignatureClass::TwoBinary,
        SignatureClass::OneTernary,
        SignatureClass::BinaryTernary,
        SignatureClass::TwoTernary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignatureClass::OneBinary => "one-binary",
            SignatureClass::TwoBinary => "two-binary",
            SignatureClass::OneTernary => "one-ternary",
            SignatureClass::BinaryTernary => "binary-ternary",
            SignatureClass::TwoTernary => "two-ternary",
        }
    }

    pub fn signature(self) -> SymbolSignature {
        let symbols: &[(&str, usize)] = match self {
            SignatureClass::OneBinary => &[("t", 2)],
            SignatureClass::TwoBinary => &[("t", 2), ("s", 2)],
            SignatureClass::OneTernary => &[("p", 3)],
            SignatureClass::BinaryTernary => &[("t", 2), ("p", 3)],
            SignatureClass::TwoTernary => &[("p", 3), ("q", 3)],
        };
        SymbolSignature::new(symbols.iter().copied()).expect("fixed signatures are valid")
    }
}

impl fmt::Display for SignatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignatureClass {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = if s == "binary+ternary" {
            "binary-ternary"
        } else {
            s
        };
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ClassifyError::UnknownClass(s.to_string()))
    }
}

impl Serialize for SignatureClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Identities range over at most this many variables (2 or 3).
    pub variable_bound: usize,
    pub brute_bound: u64,
    /// Most refinements evaluated while searching for minimal subsystems.
    pub lattice_cap: usize,
    pub clone_cap: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            variable_bound: 2,
            brute_bound: DEFAULT_BRUTE_BOUND,
            lattice_cap: 200_000,
            clone_cap: DEFAULT_CLONE_CAP,
        }
    }
}

/// Outcome of searching `C×D` for an interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Example3Status {
    Realized(Vec<Interpretation>),
    NotRealized,
}

impl Example3Status {
    pub fn is_realized(&self) -> bool {
        matches!(self, Example3Status::Realized(_))
    }
}

impl Serialize for Example3Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            Example3Status::Realized(w) => {
                m.serialize_entry("status", "realized")?;
                m.serialize_entry("witnesses", w)?;
            }
            Example3Status::NotRealized => m.serialize_entry("status", "not-realized")?,
        }
        m.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Survivor {
    /// Canonical representative.
    pub system: IdentitySystem,
    pub known_as: Option<&'static str>,
    /// Number of interpretation pairs whose theory produced it.
    pub sources: usize,
    pub witness_a: Interpretation,
    pub witness_b: Interpretation,
    pub verdict: Verdict,
    /// Minimal unrealizable refinements, one per canonical class.
    pub minimal_subsystems: Vec<IdentitySystem>,
    pub example3: Option<Example3Status>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivorReport {
    pub class: SignatureClass,
    pub variable_bound: usize,
    pub test_a: String,
    pub test_b: String,
    pub interpretation_pairs: usize,
    pub unrealizable_theories: usize,
    pub survivors: Vec<Survivor>,
}

impl SurvivorReport {
    pub fn canonical_systems(&self) -> Vec<&IdentitySystem> {
        self.survivors.iter().map(|s| &s.system).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    UnexpectedSurvivor,
    MissingSurvivor,
    UnexpectedCandidate,
    MissingCandidate,
}

/// A departure from the expected classification. Witnesses and
/// certificates are in the referenced survivor entry.
#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub class: SignatureClass,
    pub system: IdentitySystem,
    pub survivor_index: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullReport {
    pub classes: Vec<SurvivorReport>,
    pub final_candidates: Vec<IdentitySystem>,
    pub findings: Vec<Finding>,
}

impl FullReport {
    pub fn class(&self, cls: SignatureClass) -> Option<&SurvivorReport> {
        self.classes.iter().find(|r| r.class == cls)
    }
}

fn normalize(blocks: impl IntoIterator<Item = Vec<LinearTerm>>) -> Blocks {
    let mut out: Blocks = blocks
        .into_iter()
        .filter(|b| b.len() > 1)
        .map(|mut b| {
            b.sort();
            b
        })
        .collect();
    out.sort();
    out
}

/// Refinements obtained by splitting one block in two.
fn children(r: &Blocks) -> Vec<Blocks> {
    let mut out = Vec::new();
    for (i, block) in r.iter().enumerate() {
        let m = block.len();
        for mask in 1..(1u64 << (m - 1)) {
            let (mut a, mut b) = (vec![block[0].clone()], Vec::new());
            for (j, t) in block.iter().enumerate().skip(1) {
                if mask >> (j - 1) & 1 == 1 {
                    b.push(t.clone());
                } else {
                    a.push(t.clone());
                }
            }
            let rest = r
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, c)| c.clone());
            out.push(normalize(rest.chain([a, b])));
        }
    }
    out
}

/// The minimal members of the upward-closed set of unrealizable
/// refinements of `classes`, found by descending from `classes` through
/// unrealizable one-block splits. At most `cap` refinements are evaluated.
fn minimal_refinements(
    sig: &SymbolSignature,
    classes: &Blocks,
    cap: usize,
) -> Result<Vec<Blocks>, ClassifyError> {
    let mut realizable: HashMap<Blocks, bool> = HashMap::new();
    let mut check = |r: &Blocks| -> Result<bool, ClassifyError> {
        if let Some(&v) = realizable.get(r) {
            return Ok(v);
        }
        if realizable.len() >= cap {
            return Err(ClassifyError::LatticeTooLarge(cap));
        }
        let v = is_realizable(&IdentitySystem::from_classes(sig.clone(), r)?)?;
        realizable.insert(r.clone(), v);
        Ok(v)
    };
    let root = normalize(classes.iter().cloned());
    if check(&root)? {
        return Ok(Vec::new());
    }
    let mut visited = HashSet::new();
    let mut minimal = BTreeSet::new();
    let mut stack = vec![root];
    while let Some(r) = stack.pop() {
        if !visited.insert(r.clone()) {
            continue;
        }
        let mut is_minimal = true;
        for c in children(&r) {
            if !check(&c)? {
                is_minimal = false;
                if !visited.contains(&c) {
                    stack.push(c);
                }
            }
        }
        if is_minimal {
            minimal.insert(r);
        }
    }
    Ok(minimal.into_iter().collect())
}

/// Every ⊆-minimal refinement of the term partition of `sys` that is still
/// unrealizable in every finite-ring affine reduct.
///
/// Each result splits some classes of `sys` and drops nothing else, so for
/// a system written as chains these include the minimal subsets of its
/// identities.
pub fn minimal_unrealizable_subsystems(
    sys: &IdentitySystem,
) -> Result<Vec<IdentitySystem>, ClassifyError> {
    minimal_unrealizable_subsystems_capped(sys, ClassifyOptions::default().lattice_cap)
}

pub fn minimal_unrealizable_subsystems_capped(
    sys: &IdentitySystem,
    cap: usize,
) -> Result<Vec<IdentitySystem>, ClassifyError> {
    if is_realizable(sys)? {
        return Err(ClassifyError::Realizable);
    }
    minimal_refinements(sys.signature(), &sys.classes(), cap)?
        .iter()
        .map(|r| Ok(IdentitySystem::from_classes(sys.signature().clone(), r)?))
        .collect()
}

/// One class from each orbit under permutations of the first `width`
/// variables. The rest follow by renaming.
fn orbit_representatives(classes: Blocks, width: usize) -> Blocks {
    let perms = permutations(width);
    let mut covered: HashSet<Vec<LinearTerm>> = HashSet::new();
    let mut out = Vec::new();
    for c in classes {
        if covered.contains(&c) {
            continue;
        }
        for p in &perms {
            let mut image: Vec<LinearTerm> = c
                .iter()
                .map(|t| t.rename(|v| p[usize::from(v)] as u8))
                .collect();
            image.sort();
            covered.insert(image);
        }
        out.push(c);
    }
    out
}

/// All interpretations by idempotent term operations of `alg`.
fn interpretations(
    alg: &FiniteAlgebra,
    sig: &SymbolSignature,
    cap: usize,
) -> Result<Vec<Interpretation>, ClassifyError> {
    let mut pools = BTreeMap::new();
    for arity in sig.arities() {
        pools.insert(
            arity,
            generate_term_operations(alg, arity, cap)?.idempotent_members(),
        );
    }
    let mut choices = vec![Vec::new()];
    for s in 0..sig.len() {
        let pool = &pools[&sig.arity(s)];
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |op| {
                    let mut next: Vec<_> = prefix.clone();
                    next.push(op.clone());
                    next
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .map(|ops| Ok(Interpretation::new(sig.clone(), ops)?))
        .collect()
}

/// Linear terms with `s(v,..,v)` identified with `v`.
fn idempotent_universe(sig: &SymbolSignature, num_vars: usize) -> Vec<LinearTerm> {
    let mut u: Vec<LinearTerm> = term_universe(sig, num_vars)
        .iter()
        .map(LinearTerm::idempotent_normal)
        .collect();
    u.sort();
    u.dedup();
    u
}

fn first_interpretation(
    alg: &FiniteAlgebra,
    sys: &IdentitySystem,
    cap: usize,
) -> Result<Interpretation, ClassifyError> {
    find_interpretations_capped(alg, sys, true, cap)?
        .into_iter()
        .next()
        .ok_or_else(|| {
            ClassifyError::Inconsistent(format!("survivor fails in {}:\n{sys}", alg.name()))
        })
}

fn survivor(
    sys: IdentitySystem,
    sources: usize,
    test_a: &FiniteAlgebra,
    test_b: &FiniteAlgebra,
    opts: &ClassifyOptions,
) -> Result<Survivor, ClassifyError> {
    let witness_a = first_interpretation(test_a, &sys, opts.clone_cap)?;
    let witness_b = first_interpretation(test_b, &sys, opts.clone_cap)?;
    let verdict = finite_ring_verdict(&sys, opts.brute_bound)?;
    if verdict.is_realizable() {
        return Err(ClassifyError::Inconsistent(format!(
            "survivor is affine-realizable:\n{sys}"
        )));
    }
    let mut seen = HashSet::new();
    let minimal_subsystems = minimal_unrealizable_subsystems_capped(&sys, opts.lattice_cap)?
        .into_iter()
        .filter(|m| seen.insert(canonicalize(m)))
        .collect();
    Ok(Survivor {
        known_as: known_name(&sys),
        system: sys,
        sources,
        witness_a,
        witness_b,
        verdict,
        minimal_subsystems,
        example3: None,
    })
}

/// Runs the three filters over every interpretation pair of the class, with
/// default options.
pub fn classify_signature(
    cls: SignatureClass,
    test_a: &FiniteAlgebra,
    test_b: &FiniteAlgebra,
) -> Result<SurvivorReport, ClassifyError> {
    classify_signature_with(cls, test_a, test_b, &ClassifyOptions::default())
}

pub fn classify_signature_with(
    cls: SignatureClass,
    test_a: &FiniteAlgebra,
    test_b: &FiniteAlgebra,
    opts: &ClassifyOptions,
) -> Result<SurvivorReport, ClassifyError> {
    let k = opts.variable_bound;
    if !(2..=3).contains(&k) {
        return Err(ClassifyError::VariableBound(k));
    }
    let sig = cls.signature();
    let in_a = interpretations(test_a, &sig, opts.clone_cap)?;
    let in_b = interpretations(test_b, &sig, opts.clone_cap)?;
    let universe = idempotent_universe(&sig, k);
    let pairs: Vec<(usize, usize)> = (0..in_a.len())
        .flat_map(|i| (0..in_b.len()).map(move |j| (i, j)))
        .collect();

    let theories: Vec<Option<Blocks>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let classes = common_classes(&[&in_a[i], &in_b[j]], &universe, k);
            let classes = orbit_representatives(classes, k);
            let theory = IdentitySystem::from_classes(sig.clone(), &classes)?;
            Ok((!is_realizable(&theory)?).then_some(classes))
        })
        .collect::<Result<_, ClassifyError>>()?;
    let found: Vec<Option<Vec<Blocks>>> = theories
        .par_iter()
        .map(|t| {
            t.as_ref()
                .map(|classes| minimal_refinements(&sig, classes, opts.lattice_cap))
                .transpose()
        })
        .collect::<Result<_, ClassifyError>>()?;

    let mut by_canon: BTreeMap<Blocks, (IdentitySystem, usize)> = BTreeMap::new();
    for r in found.iter().flatten().flatten() {
        let canon = canonicalize(&IdentitySystem::from_classes(sig.clone(), r)?);
        by_canon.entry(canon.classes()).or_insert((canon, 0)).1 += 1;
    }
    let survivors = by_canon
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(sys, sources)| survivor(sys, sources, test_a, test_b, opts))
        .collect::<Result<_, _>>()?;
    Ok(SurvivorReport {
        class: cls,
        variable_bound: k,
        test_a: test_a.name().to_string(),
        test_b: test_b.name().to_string(),
        interpretation_pairs: pairs.len(),
        unrealizable_theories: found.iter().filter(|f| f.is_some()).count(),
        survivors,
    })
}

/// Searches the ternary clone of `C×D` for interpretations of `sys`.
pub fn check_example3(sys: &IdentitySystem) -> Result<Example3Status, ClassifyError> {
    let sig = sys.signature();
    if sig.len() > 2 || sig.symbols().iter().any(|s| s.arity != 3) {
        return Err(ClassifyError::NotTernaryPair);
    }
    let cxd = builtin("CxD").expect("built-in algebra");
    let found = find_interpretations(&cxd, sys, false)?;
    Ok(if found.is_empty() {
        Example3Status::NotRealized
    } else {
        Example3Status::Realized(found)
    })
}

/// Every class with default options and test algebras `C` and `B`.
pub fn full_report() -> Result<FullReport, ClassifyError> {
    let c = builtin("C").expect("built-in algebra");
    let b = builtin("B").expect("built-in algebra");
    full_report_with(&c, &b, &ClassifyOptions::default())
}

pub fn full_report_with(
    test_a: &FiniteAlgebra,
    test_b: &FiniteAlgebra,
    opts: &ClassifyOptions,
) -> Result<FullReport, ClassifyError> {
    let mut classes = Vec::new();
    for cls in SignatureClass::ALL {
        let mut report = classify_signature_with(cls, test_a, test_b, opts)?;
        if cls == SignatureClass::TwoTernary {
            for s in &mut report.survivors {
                s.example3 = Some(check_example3(&s.system)?);
            }
        }
        classes.push(report);
    }

    let expected_survivors = |cls: SignatureClass| -> Vec<IdentitySystem> {
        match cls {
            SignatureClass::TwoTernary => ["candidate", "new", "maj"]
                .iter()
                .map(|n| canonicalize(&systems::golden(n)))
                .collect(),
            _ => Vec::new(),
        }
    };
    let mut findings = Vec::new();
    let mut final_candidates = Vec::new();
    for report in &classes {
        let expected = expected_survivors(report.class);
        for (i, s) in report.survivors.iter().enumerate() {
            if !expected.contains(&s.system) {
                findings.push(Finding {
                    kind: FindingKind::UnexpectedSurvivor,
                    class: report.class,
                    system: s.system.clone(),
                    survivor_index: Some(i),
                    detail: format!(
                        "holds in {} and {} but in no finite-ring affine reduct",
                        report.test_a, report.test_b
                    ),
                });
            }
            if !matches!(s.example3, Some(Example3Status::NotRealized)) {
                final_candidates.push(s.system.clone());
            }
        }
        for e in expected {
            if !report.survivors.iter().any(|s| s.system == e) {
                findings.push(Finding {
                    kind: FindingKind::MissingSurvivor,
                    class: report.class,
                    system: e,
                    survivor_index: None,
                    detail: "expected survivor was not produced".into(),
                });
            }
        }
    }
    let candidate = canonicalize(&systems::golden("candidate"));
    for sys in &final_candidates {
        if *sys != candidate {
            findings.push(Finding {
                kind: FindingKind::UnexpectedCandidate,
                class: SignatureClass::TwoTernary,
                system: sys.clone(),
                survivor_index: None,
                detail: "survives every filter including C×D".into(),
            });
        }
    }
    if !final_candidates.contains(&candidate) {
        findings.push(Finding {
            kind: FindingKind::MissingCandidate,
            class: SignatureClass::TwoTernary,
            system: candidate,
            survivor_index: None,
            detail: "expected final candidate was eliminated".into(),
        });
    }
    Ok(FullReport {
        classes,
        final_candidates,
        findings,
    })
}
