use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use maltsev_core::affine::{
    affine_satisfies, coefficient_system, determinant, enumerate_idempotent_affine,
    finite_ring_verdict, is_realizable, mul, smith_normal_form, AffineOperation, Matrix,
    DEFAULT_BRUTE_BOUND,
};
use maltsev_core::classify::{
    check_example3, full_report, minimal_unrealizable_subsystems, Example3Status, SignatureClass,
};
use maltsev_core::identities::{
    canonicalize, find_interpretations, parse_system, IdentitySystem, LinearTerm, SymbolSignature,
};
use maltsev_core::systems::{self, golden, GOLDEN};
use maltsev_core::{
    builtin, classify_operation, generate_term_operations, make_majority_first, make_semilattice,
    TermOperation,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t <= budget, || {
        format!("{what} took {t:.2?}, budget {budget:?}")
    })?;
    Ok(t)
}

fn sys(text: &str) -> IdentitySystem {
    parse_system(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn op(n: u64, coeffs: &[u64]) -> AffineOperation {
    AffineOperation::new(n, coeffs.to_vec()).expect("idempotent")
}

fn clone_facts() -> Outcome {
    let a2 = builtin("A2").unwrap();
    let a3 = builtin("A3").unwrap();
    let mut report = Vec::new();

    let start = Instant::now();
    let bin = generate_term_operations(&a3, 2, 10_000).map_err(|e| e.to_string())?;
    let projections: Vec<_> = (0..2).map(|i| TermOperation::projection(3, 2, i)).collect();
    ensure(bin.members == projections, || {
        format!("binary clone of A3 has {} members", bin.len())
    })?;
    report.push(format!(
        "A3 binary = {{π1, π2}} {:.2?}",
        within(start, Duration::from_secs(1), "A3 binary")?
    ));

    for (name, alg, budget) in [
        ("A2", &a2, Duration::from_secs(1)),
        ("A3", &a3, Duration::from_secs(60)),
    ] {
        let start = Instant::now();
        let ternary = generate_term_operations(alg, 3, 10_000).map_err(|e| e.to_string())?;
        let t = within(start, budget, name)?;
        for m in &ternary.members {
            let p = classify_operation(m);
            ensure(p.is_projection() || p.majority, || {
                format!("{name}: {} is neither projection nor majority", m.label())
            })?;
        }
        report.push(format!("{name} ternary: {} ops {t:.2?}", ternary.len()));
    }

    for (name, size) in [("B", 7), ("C", 4)] {
        let start = Instant::now();
        let n = generate_term_operations(&builtin(name).unwrap(), 3, 10_000)
            .map_err(|e| e.to_string())?
            .len();
        let t = within(start, Duration::from_secs(1), name)?;
        ensure(n == size, || {
            format!("{name} ternary clone has {n} members")
        })?;
        report.push(format!("|{name}| = {n} {t:.2?}"));
    }
    Ok(report.join("; "))
}

const LISTED_Z5: [&str; 22] = [
    "x",
    "y",
    "z",
    "4x + 2y",
    "4x + 2z",
    "4y + 2z",
    "2x + 4y",
    "2x + 4z",
    "2x + 4z",
    "3x + 3z",
    "3x + 3y",
    "3y + 3z",
    "x + 2y + 3z",
    "x + 3y + 2z",
    "2x + y + 3z",
    "2x + 3y + z",
    "3x + 2y + z",
    "3x + y + 2z",
    "4x + y + z",
    "x + y + 4z",
    "x + 4y + z",
    "2x + 2y + 2z",
];

fn affine_enumeration() -> Outcome {
    let all: Vec<String> = enumerate_idempotent_affine(5, 3)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|o| o.to_string())
        .collect();
    ensure(all.len() == 25, || format!("{} operations", all.len()))?;
    let enumerated: BTreeSet<&str> = all.iter().map(String::as_str).collect();
    ensure(enumerated.len() == 25, || "duplicate operations".into())?;

    let mut seen = BTreeSet::new();
    let mut duplicates = Vec::new();
    for e in LISTED_Z5 {
        if !seen.insert(e) {
            duplicates.push(e);
        }
    }
    let stray: Vec<_> = seen.difference(&enumerated).collect();
    ensure(stray.is_empty(), || {
        format!("listed but not enumerated: {stray:?}")
    })?;
    let missing: Vec<&str> = enumerated.difference(&seen).copied().collect();

    ensure(seen.len() == 21, || {
        format!("{} distinct listed", seen.len())
    })?;
    ensure(duplicates == ["2x + 4z"], || {
        format!("duplicates {duplicates:?}")
    })?;
    let expected_missing = ["2y + 4z", "3x + 4y + 4z", "4x + 3y + 4z", "4x + 4y + 3z"];
    let mut got = missing.clone();
    got.sort();
    ensure(got == expected_missing, || format!("missing {missing:?}"))?;
    Ok(format!(
        "25 ops, 21 listed distinct; finding: duplicate {duplicates:?}; finding: unlisted {got:?}"
    ))
}

fn certificates() -> Outcome {
    let start = Instant::now();
    let mut report = Vec::new();
    for name in ["candidate", "new", "maj", "pm-chain", "pm-full", "mm-full"] {
        let s = golden(name);
        let v = finite_ring_verdict(&s, DEFAULT_BRUTE_BOUND).map_err(|e| format!("{name}: {e}"))?;
        let cert = v
            .certificate()
            .ok_or_else(|| format!("{name} is realizable: {v:?}"))?;
        ensure(cert.rank_ab == cert.rank_a + 1, || format!("{name}: ranks"))?;
        ensure(cert.brute_bound == 50, || format!("{name}: brute bound"))?;
        let cs = coefficient_system(&s);
        if let Some(n) = (2..=50).find(|&n| cs.brute_solve(n).is_some()) {
            return Err(format!("{name} solvable mod {n}"));
        }
        let last = cert.invariant_factors_ab.last().ok_or("empty [A|b]")?;
        report.push(format!("{name} (last factor {last})"));
    }
    let t = within(start, Duration::from_secs(5), "certificates")?;
    Ok(format!(
        "unrealizable, no solution mod 2..50: {} {t:.2?}",
        report.join(", ")
    ))
}

fn witness_table() -> Outcome {
    let pi1 = [1, 0, 0];
    let pi2 = [0, 1, 0];
    let pi3 = [0, 0, 1];
    let rows: [(&str, [u64; 3], [u64; 3]); 9] = [
        (
            "p/3; q/3; p(x,y,x)=q(x,x,y)=q(x,y,x)=q(y,x,x)",
            [2, 2, 2],
            [2, 2, 2],
        ),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,y); q(x,x,y)=q(x,y,x)=q(y,x,x)",
            pi1,
            [2, 2, 2],
        ),
        (systems::SUBSET3, pi1, [3, 3, 0]),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,x,y)=q(y,x,x)",
            pi1,
            pi2,
        ),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,x,y)=q(x,y,x)",
            pi1,
            pi1,
        ),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,y,x); q(x,x,y)=q(y,x,x)",
            pi1,
            [3, 0, 3],
        ),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,y,x)=q(y,x,x)",
            pi1,
            pi3,
        ),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(y,x,x); q(x,x,y)=q(x,y,x)",
            pi1,
            [0, 3, 3],
        ),
        (
            "p/3; q/3; p(x,x,y)=p(x,y,x); p(x,y,y)=q(y,x,x)=q(x,y,x)=q(x,x,y)",
            [4, 1, 1],
            [2, 2, 2],
        ),
    ];
    for (text, p, q) in rows {
        let s = sys(text);
        let w = [op(5, &p), op(5, &q)];
        ensure(
            affine_satisfies(&w, &s, 5).map_err(|e| e.to_string())?,
            || format!("p = {}, q = {} fails {text}", w[0], w[1]),
        )?;
        let v = finite_ring_verdict(&s, DEFAULT_BRUTE_BOUND).map_err(|e| e.to_string())?;
        ensure(v.is_realizable(), || {
            format!("{text} reported unrealizable")
        })?;
    }
    Ok(format!(
        "{} subsystems realizable with their Z_5 witnesses",
        rows.len()
    ))
}

fn minimality() -> Outcome {
    let start = Instant::now();
    let mut report = Vec::new();
    for name in ["candidate", "maj"] {
        let s = golden(name);
        let k = s.len();
        for mask in 0..(1u32 << k) - 1 {
            let sub = s.subsystem((0..k).filter(|i| mask & (1 << i) != 0));
            ensure(is_realizable(&sub).map_err(|e| e.to_string())?, || {
                format!("{name}: proper subset {} unrealizable", sub.format())
            })?;
        }
        let mins = minimal_unrealizable_subsystems(&s).map_err(|e| e.to_string())?;
        let canon = canonicalize(&s);
        ensure(mins.len() == 1 && canonicalize(&mins[0]) == canon, || {
            format!("{name}: {} minimal refinements", mins.len())
        })?;
        report.push(format!(
            "{name}: {} proper subsets realizable",
            (1 << k) - 1
        ));
    }
    let t = within(start, Duration::from_secs(5), "minimality")?;
    Ok(format!("{} {t:.2?}", report.join(", ")))
}

fn example3() -> Outcome {
    let start = Instant::now();
    let cxd = builtin("CxD").unwrap();
    let proj: Vec<_> = (0..3).map(|i| TermOperation::projection(4, 3, i)).collect();
    let f = TermOperation::basic(&cxd, 0);
    let inner = TermOperation::compose(&cxd, 0, &[&proj[0], &proj[1], &proj[2]]);
    let p = TermOperation::compose(&cxd, 0, &[&proj[0], &proj[0], &inner]);

    let found = match check_example3(&golden("candidate")).map_err(|e| e.to_string())? {
        Example3Status::Realized(w) => w,
        Example3Status::NotRealized => return Err("candidate not realized in CxD".into()),
    };
    ensure(
        found.iter().any(|i| i.ops()[0] == p && i.ops()[1] == f),
        || "no witness p = f(x,x,f(x,y,z)), q = f".into(),
    )?;
    for name in ["new", "maj"] {
        let st = check_example3(&golden(name)).map_err(|e| e.to_string())?;
        ensure(st == Example3Status::NotRealized, || {
            format!("{name} realized in CxD")
        })?;
    }
    let t = within(start, Duration::from_secs(10), "C×D search")?;
    Ok(format!(
        "candidate: {} witnesses incl. p = f(x,x,f(x,y,z)), q = f; new, maj: none {t:.2?}",
        found.len()
    ))
}

fn classification() -> Outcome {
    let start = Instant::now();
    let report = full_report().map_err(|e| e.to_string())?;
    let t = within(start, Duration::from_secs(300), "full report")?;
    for f in &report.findings {
        println!(
            "  finding {:?} in {}: {}",
            f.kind,
            f.class,
            f.system.format()
        );
    }
    for cls in [
        SignatureClass::OneBinary,
        SignatureClass::TwoBinary,
        SignatureClass::OneTernary,
        SignatureClass::BinaryTernary,
    ] {
        let r = report.class(cls).ok_or_else(|| format!("{cls} missing"))?;
        ensure(r.survivors.is_empty(), || {
            format!("{cls}: {} survivors", r.survivors.len())
        })?;
    }
    let two = report
        .class(SignatureClass::TwoTernary)
        .ok_or("two-ternary missing")?;
    let got: BTreeSet<String> = two.canonical_systems().iter().map(|s| s.format()).collect();
    let want: BTreeSet<String> = ["candidate", "new", "maj"]
        .iter()
        .map(|n| canonicalize(&golden(n)).format())
        .collect();
    ensure(got == want, || format!("two-ternary survivors {got:?}"))?;
    ensure(
        report.final_candidates == [canonicalize(&golden("candidate"))],
        || format!("{} final candidates", report.final_candidates.len()),
    )?;
    ensure(report.findings.is_empty(), || {
        format!("{} findings", report.findings.len())
    })?;
    Ok(format!(
        "four classes empty; two-ternary {{candidate, new, maj}} from {} pairs; final [candidate] {t:.2?}",
        two.interpretation_pairs
    ))
}

fn wnu_witnesses() -> Outcome {
    let b = make_semilattice();
    let meet = |k: usize| {
        let proj: Vec<_> = (0..k).map(|i| TermOperation::projection(2, k, i)).collect();
        let mut acc = proj[k - 1].clone();
        for p in proj[..k - 1].iter().rev() {
            acc = TermOperation::compose(&b, 0, &[p, &acc]);
        }
        acc
    };
    for k in [3, 4] {
        ensure(classify_operation(&meet(k)).weak_near_unanimity, || {
            format!("{k}-ary meet in B is not WNU")
        })?;
    }

    let a3 = make_majority_first(3).map_err(|e| e.to_string())?;
    let proj: Vec<_> = (0..4).map(|i| TermOperation::projection(3, 4, i)).collect();
    let inner = TermOperation::compose(&a3, 0, &[&proj[0], &proj[2], &proj[3]]);
    let g = TermOperation::compose(&a3, 0, &[&proj[0], &proj[1], &inner]);
    ensure(classify_operation(&g).weak_near_unanimity, || {
        "g is not WNU in A3".into()
    })?;
    for x in 0..3 {
        for y in 0..3 {
            ensure(g.eval(&[y, x, x, x]) == a3.apply(0, &[y, x, x]), || {
                format!("g(y,x,x,x) != f(y,x,x) at x={x}, y={y}")
            })?;
        }
    }
    Ok("ternary and 4-ary meets in B; g(x,y,w,z) = f(x,y,f(x,w,z)) in A3 with g(y,x,x,x) = f(y,x,x)".into())
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn closure_suite() -> Result<(), String> {
    for name in maltsev_core::algebra::BUILTIN_NAMES {
        let alg = builtin(name).unwrap();
        for arity in 1..=3 {
            let slice = generate_term_operations(&alg, arity, 10_000).map_err(|e| e.to_string())?;
            let mut env = vec![0; arity];
            for m in &slice.members {
                let term = m
                    .term()
                    .ok_or_else(|| format!("{name}: member without term"))?;
                for (i, &v) in m.table().iter().enumerate() {
                    maltsev_core::algebra::decode_index(alg.size(), i, &mut env);
                    ensure(term.eval(&alg, &env) == v, || {
                        format!("{name}: {term} disagrees with its table")
                    })?;
                }
            }
            for (o, basic) in alg.ops().iter().enumerate() {
                let mut idx = vec![0; basic.arity];
                let total = slice.len().pow(basic.arity as u32);
                for k in 0..total {
                    maltsev_core::algebra::decode_index(slice.len(), k, &mut idx);
                    let args: Vec<_> = idx.iter().map(|&i| &slice.members[i]).collect();
                    let c = TermOperation::compose(&alg, o, &args);
                    ensure(slice.contains(&c), || format!("{name}/{arity} not closed"))?;
                }
            }
        }
    }
    Ok(())
}

fn affine_suite() -> Result<(), String> {
    for (name, text) in GOLDEN {
        let s = sys(text);
        let cs = coefficient_system(&s);
        let arities: Vec<usize> = s.signature().symbols().iter().map(|x| x.arity).collect();
        for n in 2..=7u64 {
            let pools: Vec<Vec<AffineOperation>> = arities
                .iter()
                .map(|&k| enumerate_idempotent_affine(n, k).unwrap())
                .collect();
            let mut any = false;
            let mut idx = vec![0; pools.len()];
            loop {
                let w: Vec<AffineOperation> =
                    idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                let c: Vec<u64> = w.iter().flat_map(|o| o.coeffs().to_vec()).collect();
                let sat = affine_satisfies(&w, &s, n).map_err(|e| e.to_string())?;
                ensure(sat == cs.is_solution(&c, n), || {
                    format!("{name} mod {n}: evaluation and congruences disagree at {c:?}")
                })?;
                any |= sat;
                let mut j = 0;
                while j < idx.len() {
                    idx[j] += 1;
                    if idx[j] < pools[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == idx.len() {
                    break;
                }
            }
            ensure(any == cs.solve_mod(n).is_some(), || {
                format!("{name} mod {n}: solve_mod disagrees with enumeration")
            })?;
        }
    }
    Ok(())
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

fn snf_suite() -> Result<(), String> {
    runner(200)
        .run(&matrix(), |rows| {
            let m: Matrix = rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let cols = rows[0].len();
            let snf = smith_normal_form(&m);
            prop_assert_eq!(mul(&mul(&snf.u, &m, cols), &snf.v, cols), snf.s.clone());
            prop_assert!(determinant(&snf.u).abs().is_one());
            prop_assert!(determinant(&snf.v).abs().is_one());
            for (i, row) in snf.s.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    prop_assert!(i == j || e.is_zero());
                }
            }
            let d = snf.diagonal();
            prop_assert!(d.iter().all(|x| !x.is_negative()));
            for w in d.windows(2) {
                prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn term(sig: Vec<usize>) -> impl Strategy<Value = LinearTerm> {
    prop_oneof![
        1 => (0u8..3).prop_map(LinearTerm::Var),
        3 => (0..sig.len()).prop_flat_map(move |s| {
            prop::collection::vec(0u8..3, sig[s]).prop_map(move |a| LinearTerm::app(s, a))
        }),
    ]
}

fn random_system() -> impl Strategy<Value = IdentitySystem> {
    prop_oneof![
        Just(vec![2]),
        Just(vec![3]),
        Just(vec![2, 3]),
        Just(vec![3, 3])
    ]
    .prop_flat_map(|arities| {
        let pair = (term(arities.clone()), term(arities.clone()));
        prop::collection::vec(pair, 1..=4).prop_map(move |ids| {
            let names = ["p", "q"];
            let sig = SymbolSignature::new(arities.iter().enumerate().map(|(i, &a)| (names[i], a)))
                .unwrap();
            let mut s = IdentitySystem::new(sig);
            for (a, b) in ids {
                s.add(a, b).unwrap();
            }
            s
        })
    })
}

fn canon_suite() -> Result<(), String> {
    let algebras = [builtin("B").unwrap(), builtin("C").unwrap()];
    runner(200)
        .run(&random_system(), |s| {
            let c = canonicalize(&s);
            prop_assert_eq!(canonicalize(&c), c.clone());
            for alg in &algebras {
                let sat = |x: &IdentitySystem| {
                    find_interpretations(alg, x, false)
                        .map(|v| !v.is_empty())
                        .map_err(|e| TestCaseError::fail(e.to_string()))
                };
                prop_assert_eq!(sat(&s)?, sat(&c)?, "{} in {}", s.format(), alg.name());
            }
            prop_assert_eq!(is_realizable(&s).unwrap(), is_realizable(&c).unwrap());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    closure_suite()?;
    affine_suite()?;
    snf_suite()?;
    canon_suite()?;
    let t = within(start, Duration::from_secs(120), "property suites")?;
    Ok(format!(
        "closure and provenance; affine ⇔ congruences n ≤ 7; 200 SNF; 200 canonical forms {t:.2?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("clone facts", clone_facts),
        ("affine enumeration", affine_enumeration),
        ("certificates", certificates),
        ("witness table", witness_table),
        ("minimality", minimality),
        ("C×D", example3),
        ("classification", classification),
        ("WNU witnesses", wnu_witnesses),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{}] {name}: {reason}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
