use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use maltsev_core::affine::{coefficient_system, finite_ring_verdict, Verdict, DEFAULT_BRUTE_BOUND};
use maltsev_core::classify::{
    check_example3, classify_signature_with, full_report_with, ClassifyOptions, FullReport,
    SignatureClass, SurvivorReport,
};
use maltsev_core::identities::{canonicalize, find_interpretations, parse_system, IdentitySystem};
use maltsev_core::{builtin, classify_operation, generate_term_operations, systems, FiniteAlgebra};
use serde::Serialize;

/// Linear Maltsev conditions on small finite algebras.
///
/// Algebras are given by built-in name (B, A2, A3, C, D, CxD) or a JSON
/// file; systems by a DSL file or the name of a golden system.
#[derive(Parser)]
#[command(name = "maltsev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the term operations of one arity.
    Clone(CloneArgs),
    /// Search an algebra for interpretations of a system.
    Check(CheckArgs),
    /// Realizability in idempotent reducts of modules.
    Affine(AffineArgs),
    /// Run the filter pipeline.
    Classify(ClassifyArgs),
    /// Pretty-print a system.
    Fmt(FmtArgs),
}

#[derive(Args)]
struct CloneArgs {
    algebra: String,
    #[arg(long, default_value_t = 3)]
    arity: usize,
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
    /// Show projection, majority, NU and WNU flags.
    #[arg(long)]
    classify: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    system: String,
    algebra: String,
    #[arg(long)]
    idempotent_only: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AffineArgs {
    system: String,
    #[arg(
        long,
        conflicts_with = "all_rings",
        required_unless_present = "all_rings"
    )]
    modulus: Option<u64>,
    #[arg(long)]
    all_rings: bool,
    #[arg(long, default_value_t = DEFAULT_BRUTE_BOUND)]
    brute_bound: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, conflicts_with = "full", required_unless_present = "full")]
    class: Option<String>,
    #[arg(long)]
    full: bool,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    bound: usize,
    #[arg(long, default_value = "C")]
    test_a: String,
    #[arg(long, default_value = "B")]
    test_b: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FmtArgs {
    system: String,
    #[arg(long)]
    canonical: bool,
}

fn load_algebra(name: &str) -> Result<FiniteAlgebra> {
    if let Some(alg) = builtin(name) {
        return Ok(alg);
    }
    let text = fs::read_to_string(name)
        .with_context(|| format!("{name:?} is neither a built-in algebra nor a readable file"))?;
    FiniteAlgebra::from_json(&text).with_context(|| format!("reading {name}"))
}

fn load_system(name: &str) -> Result<IdentitySystem> {
    if !Path::new(name).exists() {
        if let Some((_, text)) = systems::GOLDEN.iter().find(|(n, _)| *n == name) {
            return Ok(parse_system(text)?);
        }
    }
    let text = fs::read_to_string(name)
        .with_context(|| format!("{name:?} is neither a readable file nor a golden system"))?;
    parse_system(&text).with_context(|| format!("parsing {name}"))
}

fn push_json(out: &mut String, value: &impl Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn cmd_clone(args: CloneArgs, out: &mut String) -> Result<u8> {
    let alg = load_algebra(&args.algebra)?;
    let slice = generate_term_operations(&alg, args.arity, args.cap)?;
    if args.json {
        push_json(out, &slice)?;
        return Ok(0);
    }
    writeln!(
        out,
        "{}: {} operations of arity {} ({} rounds)",
        alg.name(),
        slice.len(),
        args.arity,
        slice.rounds
    )?;
    for op in &slice.members {
        let mut line = format!("  {:<28} {:?}", op.label(), op.table());
        if args.classify {
            let p = classify_operation(op);
            let mut flags = Vec::new();
            if let Some(i) = p.projection {
                flags.push(format!("projection {}", i + 1));
            }
            for (set, name) in [
                (p.idempotent, "idempotent"),
                (p.majority, "majority"),
                (p.near_unanimity, "nu"),
                (p.weak_near_unanimity, "wnu"),
            ] {
                if set {
                    flags.push(name.to_string());
                }
            }
            line.push_str(&format!("  [{}]", flags.join(", ")));
        }
        writeln!(out, "{line}")?;
    }
    Ok(0)
}

fn cmd_check(args: CheckArgs, out: &mut String) -> Result<u8> {
    let sys = load_system(&args.system)?;
    let alg = load_algebra(&args.algebra)?;
    let found = find_interpretations(&alg, &sys, args.idempotent_only)?;
    if args.json {
        push_json(
            out,
            &serde_json::json!({
                "satisfiable": !found.is_empty(),
                "interpretations": found,
            }),
        )?;
    } else if found.is_empty() {
        writeln!(out, "unsatisfiable in {}", alg.name())?;
    } else {
        writeln!(out, "{} interpretations in {}", found.len(), alg.name())?;
        for interp in &found {
            writeln!(out, "  {interp}")?;
        }
    }
    Ok(if found.is_empty() { 1 } else { 0 })
}

#[derive(Serialize)]
struct ModulusReport {
    status: &'static str,
    modulus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<BTreeMap<String, Vec<u64>>>,
}

fn cmd_affine(args: AffineArgs, out: &mut String) -> Result<u8> {
    let sys = load_system(&args.system)?;
    if let Some(n) = args.modulus {
        if n < 2 {
            bail!("modulus must be at least 2");
        }
        let cs = coefficient_system(&sys);
        let solution = cs.solve_mod(n);
        let ops = solution.as_ref().map(|c| cs.operations(c, n));
        if args.json {
            let witness = ops.as_ref().map(|ops| {
                cs.symbols
                    .iter()
                    .zip(ops)
                    .map(|(name, op)| (name.clone(), op.coeffs().to_vec()))
                    .collect()
            });
            let status = if ops.is_some() {
                "realizable"
            } else {
                "unrealizable"
            };
            push_json(
                out,
                &ModulusReport {
                    status,
                    modulus: n,
                    witness,
                },
            )?;
        } else {
            match &ops {
                Some(ops) => {
                    writeln!(out, "realizable mod {n}")?;
                    for (name, op) in cs.symbols.iter().zip(ops) {
                        writeln!(out, "  {name} = {op}  {:?}", op.coeffs())?;
                    }
                }
                None => writeln!(out, "no solution mod {n}")?,
            }
        }
        return Ok(if ops.is_some() { 0 } else { 1 });
    }

    let verdict = finite_ring_verdict(&sys, args.brute_bound)?;
    if args.json {
        push_json(out, &verdict)?;
    } else {
        match &verdict {
            Verdict::Realizable {
                modulus,
                symbols,
                witness,
                ..
            } => {
                writeln!(out, "realizable mod {modulus}")?;
                for (name, op) in symbols.iter().zip(witness) {
                    writeln!(out, "  {name} = {op}  {:?}", op.coeffs())?;
                }
            }
            Verdict::Unrealizable(c) => {
                writeln!(out, "unrealizable over every finite ring")?;
                let factors = |v: &[_]| {
                    v.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<String>>()
                        .join(" ")
                };
                writeln!(out, "  rank A = {}, rank [A|b] = {}", c.rank_a, c.rank_ab)?;
                writeln!(
                    out,
                    "  invariant factors of A:     {}",
                    factors(&c.invariant_factors_a)
                )?;
                writeln!(
                    out,
                    "  invariant factors of [A|b]: {}",
                    factors(&c.invariant_factors_ab)
                )?;
                for r in &c.primes_tested {
                    writeln!(
                        out,
                        "  mod {}: rank A = {}, rank [A|b] = {}",
                        r.p, r.rank_a, r.rank_ab
                    )?;
                }
                writeln!(out, "  no solution modulo 2..={}", c.brute_bound)?;
            }
        }
    }
    Ok(if verdict.is_realizable() { 0 } else { 1 })
}

fn print_class(out: &mut String, report: &SurvivorReport) -> Result<()> {
    writeln!(
        out,
        "{} (at most {} variables, tests {} and {}): {} pairs, {} unrealizable theories, {} survivors",
        report.class,
        report.variable_bound,
        report.test_a,
        report.test_b,
        report.interpretation_pairs,
        report.unrealizable_theories,
        report.survivors.len()
    )?;
    for s in &report.survivors {
        let name = s.known_as.map(|n| format!(" [{n}]")).unwrap_or_default();
        let example3 = match &s.example3 {
            Some(e) if e.is_realized() => "; holds in CxD",
            Some(_) => "; fails in CxD",
            None => "",
        };
        writeln!(out, "  {}{name}{example3}", s.system.chains().join("; "))?;
    }
    Ok(())
}

fn print_full(out: &mut String, report: &FullReport) -> Result<()> {
    for class in &report.classes {
        print_class(out, class)?;
    }
    writeln!(out, "final candidates:")?;
    for sys in &report.final_candidates {
        writeln!(out, "  {}", sys.chains().join("; "))?;
    }
    for f in &report.findings {
        writeln!(out, "FINDING ({:?}, {}): {}", f.kind, f.class, f.detail)?;
        writeln!(out, "  {}", f.system.chains().join("; "))?;
    }
    Ok(())
}

fn cmd_classify(args: ClassifyArgs, out: &mut String) -> Result<u8> {
    let opts = ClassifyOptions {
        variable_bound: args.bound,
        ..ClassifyOptions::default()
    };
    let test_a = load_algebra(&args.test_a)?;
    let test_b = load_algebra(&args.test_b)?;
    let json = if args.full {
        let report = full_report_with(&test_a, &test_b, &opts)?;
        if !args.json {
            print_full(out, &report)?;
        }
        serde_json::to_string_pretty(&report)?
    } else {
        let cls: SignatureClass = args.class.as_deref().unwrap_or_default().parse()?;
        let mut report = classify_signature_with(cls, &test_a, &test_b, &opts)?;
        if cls == SignatureClass::TwoTernary {
            for s in &mut report.survivors {
                s.example3 = Some(check_example3(&s.system)?);
            }
        }
        if !args.json {
            print_class(out, &report)?;
        }
        serde_json::to_string_pretty(&report)?
    };
    if args.json {
        writeln!(out, "{json}")?;
    }
    if let Some(path) = &args.out {
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn cmd_fmt(args: FmtArgs, out: &mut String) -> Result<u8> {
    let sys = load_system(&args.system)?;
    let sys = if args.canonical {
        canonicalize(&sys)
    } else {
        sys
    };
    out.push_str(&sys.format());
    Ok(0)
}

fn run(cli: Cli, out: &mut String) -> Result<u8> {
    match cli.command {
        Command::Clone(a) => cmd_clone(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Affine(a) => cmd_affine(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Fmt(a) => cmd_fmt(a, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    // a closed pipe (e.g. `| head`) is not an error
    let _ = io::stdout().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
