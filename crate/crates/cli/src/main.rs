use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use keller_core::experiments::{
    certificate_lines, conjecture_composition, conjecture_lift, equation_lines, generators_for, injectivity_scan,
    repro_degree2_with, repro_degree3_with, Degree3Options, ReproReport, TrialReport,
};
use keller_core::groebner::default_cache_dir;
use keller_core::polymap::DEFAULT_POINT_CAP;
use keller_core::{strong_keller_check, Error, Ideal, KellerSystem, Outcome, PolyMap, Polynomial, Ring, VariableSet};
use serde_json::{json, Value};

/// Version of the `gen` document layout.
const GEN_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "keller", version, about = "Keller-equation ideals and strong Keller checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Recompute Gröbner bases instead of reading the disk cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the (n, d) system and its certified generators as JSON.
    Gen {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Strong Keller check of a map over F_p.
    Check {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        map: String,
        #[arg(long)]
        vars: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Ideal and radical membership.
    Ideal {
        #[command(subcommand)]
        command: IdealCommand,
    },
    /// Operations on polynomial maps.
    Map {
        #[command(subcommand)]
        command: MapCommand,
    },
    /// Reproduce the degree-2 and degree-3 computations.
    Repro {
        #[command(subcommand)]
        command: ReproCommand,
    },
    /// Randomized trials of the conjectures.
    Conjecture {
        #[command(subcommand)]
        command: ConjectureCommand,
    },
    /// Scans over primes.
    Scan {
        #[command(subcommand)]
        command: ScanCommand,
    },
}

#[derive(Args)]
struct IdealArgs {
    /// Generators separated by `;`, optionally in brackets.
    #[arg(long)]
    gens: String,
    #[arg(long)]
    poly: String,
    /// Comma-separated variable names; inferred from the input when absent.
    #[arg(long)]
    vars: Option<String>,
    /// Work over F_p instead of Q.
    #[arg(long)]
    p: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum IdealCommand {
    Member(IdealArgs),
    RadicalMember(IdealArgs),
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    vars: Option<String>,
    /// Coefficient field F_p (Q when absent); the modulus for `mod-p`.
    #[arg(long)]
    p: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum MapCommand {
    /// `map ∘ inner`.
    Compose {
        #[command(flatten)]
        args: MapArgs,
        #[arg(long)]
        inner: String,
    },
    /// Inverse by formal power series, truncated at `--bound` (default deg^(n-1)).
    Invert {
        #[command(flatten)]
        args: MapArgs,
        #[arg(long)]
        bound: Option<u32>,
    },
    DetJac {
        #[command(flatten)]
        args: MapArgs,
    },
    /// Reduction of an integer map modulo `--p`.
    ModP {
        #[command(flatten)]
        args: MapArgs,
    },
    /// Injectivity on F_p^n by enumeration; needs `--p`.
    Injective {
        #[command(flatten)]
        args: MapArgs,
    },
}

#[derive(Subcommand)]
enum ReproCommand {
    Degree2 {
        #[command(flatten)]
        output: Output,
    },
    Degree3 {
        /// Primes for the exhaustive small-field check.
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3])]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coefficient bound C.
    #[arg(long, default_value_t = 50)]
    bound: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum ConjectureCommand {
    Composition(TrialArgs),
    Lift(TrialArgs),
}

#[derive(Subcommand)]
enum ScanCommand {
    /// Injectivity of `map mod p` for each prime.
    Injectivity {
        #[arg(long)]
        map: String,
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        cap: u128,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::BudgetExceeded(_) | Error::CapExceeded { .. } => Failure::Budget(msg),
            Error::Syntax { .. }
            | Error::UnknownVariable(_)
            | Error::DuplicateVariable(_)
            | Error::NotPrime(_)
            | Error::ArityMismatch { .. }
            | Error::DegreeExceeded { .. }
            | Error::CoefficientNotInRing(..)
            | Error::Unsupported(_)
            | Error::NonInvertibleAffinePart
            | Error::Invalid(_) => Failure::Usage(msg),
            _ => Failure::Other(msg),
        }
    }
}

/// Rendered result and whether it counts as success.
struct Report {
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<bool, Failure> {
    let (report, output) = match command {
        Command::Gen { n, d, output } => (gen(n, d, &output)?, output),
        Command::Check { p, n, d, map, vars, output } => (check(p, n, d, &map, vars.as_deref())?, output),
        Command::Ideal { command } => match command {
            IdealCommand::Member(a) => (ideal(&a, false)?, a.output),
            IdealCommand::RadicalMember(a) => (ideal(&a, true)?, a.output),
        },
        Command::Map { command } => map_command(command)?,
        Command::Repro { command } => match command {
            ReproCommand::Degree2 { output } => (repro(repro_degree2_with(cache_dir(&output))?, &output), output),
            ReproCommand::Degree3 { primes, seed, output } => {
                let options = Degree3Options { enumeration_primes: primes, seed, cache_dir: cache_dir(&output) };
                (repro(repro_degree3_with(&options)?, &output), output)
            }
        },
        Command::Conjecture { command } => match command {
            ConjectureCommand::Composition(a) => {
                let r = conjecture_composition(a.p, a.n, a.d, a.trials, a.seed, a.bound)?;
                let ok = r.counts.fail == 0;
                (trial(&r, ok, &a.output), a.output)
            }
            ConjectureCommand::Lift(a) => {
                let r = conjecture_lift(a.p, a.n, a.d, a.bound, a.trials, a.seed)?;
                (trial(&r, true, &a.output), a.output)
            }
        },
        Command::Scan { command: ScanCommand::Injectivity { map, vars, primes, cap, output } } => {
            let f = parse_map(&map, vars.as_deref(), Ring::Integers)?;
            let r = injectivity_scan(&f, &primes, cap)?;
            let text = if output.json {
                to_json(&r)
            } else {
                let mut s = format!("{}\n", r.map);
                for row in &r.rows {
                    let v = match (row.injective, &row.error) {
                        (Some(b), _) => if b { "injective" } else { "not injective" }.to_string(),
                        (None, Some(e)) => format!("error: {e}"),
                        (None, None) => "unknown".into(),
                    };
                    s.push_str(&format!("p = {}: {v}\n", row.p));
                }
                s
            };
            (Report { text, ok: true }, output)
        }
    };
    emit(&report.text, &output)?;
    Ok(report.ok)
}

fn emit(text: &str, output: &Output) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Other(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cache_dir(output: &Output) -> Option<PathBuf> {
    (!output.no_cache).then(default_cache_dir)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn ring_for(p: Option<u64>) -> Result<Ring, Failure> {
    match p {
        Some(p) => Ok(Ring::prime_field(p)?),
        None => Ok(Ring::Rationals),
    }
}

/// Strips optional brackets and splits on `;`.
fn split_list(text: &str) -> Vec<&str> {
    let t = text.trim();
    let t = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
    t.split(';').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Identifiers appearing in `texts`, in order of first appearance.
fn infer_vars(texts: &[&str]) -> Result<VariableSet, Failure> {
    let mut names: Vec<String> = Vec::new();
    for t in texts {
        let mut chars = t.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c.is_ascii_alphabetic() || c == '_' {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let name = &t[i..end];
                if !names.iter().any(|n| n == name) {
                    names.push(name.to_string());
                }
            }
        }
    }
    if names.is_empty() {
        names.push("x".into());
    }
    Ok(VariableSet::new(&names)?)
}

fn parse_map(text: &str, vars: Option<&str>, ring: Ring) -> Result<PolyMap, Failure> {
    let vars = match vars {
        Some(v) => VariableSet::parse_list(v)?,
        None => VariableSet::standard(split_list(text).len()),
    };
    Ok(PolyMap::parse(text, &vars, ring)?)
}

fn gen(n: usize, d: u32, output: &Output) -> Result<Report, Failure> {
    let system = KellerSystem::new(n, d)?.with_disk_cache(cache_dir(output))?;
    let set = generators_for(&system)?;
    let doc = json!({
        "version": GEN_VERSION,
        "n": n,
        "d": d,
        "coeff_dimension": system.coeff_dimension(),
        "variables": system.coeff_vars().names(),
        "display_variables": system.display_vars().names(),
        "equations": equation_lines(&system)?,
        "certificates": certificate_lines(&system, &set)?,
        "nd_lcm_lower_bound": set.nd_bound().to_string(),
        "generator_hash": set.hash(),
    });
    Ok(Report { text: to_json(&doc), ok: true })
}

fn check(p: u64, n: usize, d: u32, map: &str, vars: Option<&str>) -> Result<Report, Failure> {
    let ring = Ring::prime_field(p)?;
    let f = parse_map(map, vars, ring)?;
    let system = KellerSystem::new(n, d)?;
    let set = generators_for(&system)?;
    let v = strong_keller_check(&f, &system, &set)?;
    let used = system.equations().len() + set.len();
    let mut doc = json!({
        "outcome": "",
        "generators_used": used,
        "certified": matches!(v.outcome, Outcome::Certified { .. }),
        "p": v.p,
        "n": v.n,
        "d": v.d,
        "generator_hash": v.generator_hash,
        "nd_bound": v.nd_bound,
        "normalized_map": v.normalized_map,
    });
    let kind = match &v.outcome {
        Outcome::Fails { witness, value } => {
            doc["witness"] = Value::from(witness.clone());
            doc["value"] = Value::from(*value);
            "fails"
        }
        Outcome::PassesKnownGenerators { .. } => "passes_known_generators",
        Outcome::Certified { .. } => "certified",
    };
    doc["outcome"] = Value::from(kind);
    Ok(Report { text: to_json(&doc), ok: !v.fails() })
}

fn ideal(a: &IdealArgs, radical: bool) -> Result<Report, Failure> {
    let ring = ring_for(a.p)?;
    let gens_text = split_list(&a.gens);
    let vars = match &a.vars {
        Some(v) => VariableSet::parse_list(v)?,
        None => {
            let mut all = gens_text.clone();
            all.push(&a.poly);
            infer_vars(&all)?
        }
    };
    let gens = gens_text.iter().map(|g| Polynomial::parse(g, &vars, ring)).collect::<keller_core::Result<Vec<_>>>()?;
    let f = Polynomial::parse(&a.poly, &vars, ring)?;
    let ideal = Ideal::new(ring, &vars, gens)?.with_disk_cache(cache_dir(&a.output));
    let member = if radical { ideal.radical_member(&f)? } else { ideal.ideal_member(&f)? };
    let text = if a.output.json {
        to_json(&json!({ "poly": f.to_string(), "radical": radical, "member": member }))
    } else {
        member.to_string()
    };
    Ok(Report { text, ok: member })
}

fn map_command(command: MapCommand) -> Result<(Report, Output), Failure> {
    let render = |value: String, json: bool| if json { to_json(&json!({ "result": value })) } else { value };
    Ok(match command {
        MapCommand::Compose { args, inner } => {
            let ring = ring_for(args.p)?;
            let f = parse_map(&args.map, args.vars.as_deref(), ring)?;
            let g = PolyMap::parse(&inner, f.vars(), ring)?;
            let h = f.compose(&g)?;
            (Report { text: render(h.to_string(), args.output.json), ok: true }, args.output)
        }
        MapCommand::Invert { args, bound } => {
            let ring = ring_for(args.p)?;
            let f = parse_map(&args.map, args.vars.as_deref(), ring)?;
            let inverse = match bound {
                Some(b) => f.formal_inverse(b)?,
                None => f.is_invertible()?,
            };
            let (value, ok) = match inverse {
                Some(g) => (g.to_string(), true),
                None => ("not invertible within the degree bound".to_string(), false),
            };
            let text = if args.output.json {
                to_json(&json!({ "invertible": ok, "result": ok.then_some(value) }))
            } else {
                value
            };
            (Report { text, ok }, args.output)
        }
        MapCommand::DetJac { args } => {
            let ring = ring_for(args.p)?;
            let f = parse_map(&args.map, args.vars.as_deref(), ring)?;
            (Report { text: render(f.det_jacobian().to_string(), args.output.json), ok: true }, args.output)
        }
        MapCommand::ModP { args } => {
            let Some(p) = args.p else {
                return Err(Failure::Usage("map mod-p needs --p".into()));
            };
            let f = parse_map(&args.map, args.vars.as_deref(), Ring::Integers)?;
            let g = f.reduce_mod_p(p)?;
            (Report { text: render(g.to_string(), args.output.json), ok: true }, args.output)
        }
        MapCommand::Injective { args } => {
            let Some(p) = args.p else {
                return Err(Failure::Usage("map injective needs --p".into()));
            };
            let f = parse_map(&args.map, args.vars.as_deref(), Ring::prime_field(p)?)?;
            let injective = f.is_injective_on_points(DEFAULT_POINT_CAP)?;
            let text = if args.output.json {
                to_json(&json!({ "p": p, "injective": injective }))
            } else {
                injective.to_string()
            };
            (Report { text, ok: injective }, args.output)
        }
    })
}

fn repro(r: ReproReport, output: &Output) -> Report {
    let ok = r.all_passed();
    let text = if output.json {
        to_json(&r)
    } else {
        let mut s = format!("{} (n = {}, d = {}, {} coefficient variables)\n", r.experiment, r.n, r.d, r.coeff_dimension);
        for e in &r.equations {
            s.push_str(&format!("  [{}] {}\n", e.alpha, e.poly));
        }
        s.push_str(&format!("certificates: {}, lcm of denominators: {}\n", r.certificates.len(), r.nd_lcm_lower_bound));
        for c in &r.checks {
            s.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        s
    };
    Report { text, ok }
}

fn trial(r: &TrialReport, ok: bool, output: &Output) -> Report {
    let text = if output.json {
        to_json(r)
    } else {
        let c = &r.counts;
        let mut s = format!(
            "{} seed {}: pass {}, fail {}, error {}, skipped {}\n",
            r.experiment, r.seed, c.pass, c.fail, c.error, c.skipped
        );
        for w in &r.witnesses {
            s.push_str(&format!("  trial {} (seed {}): {} [{}]\n", w.trial, w.seed, w.detail, w.maps.join(", ")));
        }
        for note in &r.notes {
            s.push_str(&format!("  note: {note}\n"));
        }
        s
    };
    Report { text, ok }
}
