//! `tricobracket`: compute index polynomials and triple invariants of Gauss
//! diagrams, fuzz them for move invariance, and manage pattern files.
//!
//! Exit codes: 0 success, 1 property violation, 2 parse error, 3 shape error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tricobracket::diagram::{Diagram, Kind};
use tricobracket::error::{DiagramError, Error, PatternError};
use tricobracket::fuzz::{fuzz, FuzzConfig, FuzzSummary};
use tricobracket::gdf::{is_templated, Pattern, PatternLibrary, Perm};
use tricobracket::invariants::{Invariant, Reading, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "tricobracket", version, about = "Gauss diagram invariants of curves and virtual knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an invariant of one diagram, or of every diagram in a file.
    Compute(ComputeArgs),
    /// Check move invariance on seeded random diagrams and move walks.
    Fuzz(FuzzArgs),
    /// List or validate pattern files.
    Patterns(PatternArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InvariantName {
    AffineIndex,
    FlatIndex,
    Mu123,
    Triple,
    FlatTriple,
    Intersection,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Auto,
    Knotted,
    Flat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReadingArg {
    Diagram,
    Curve,
}

impl From<ReadingArg> for Reading {
    fn from(r: ReadingArg) -> Reading {
        match r {
            ReadingArg::Diagram => Reading::Diagram,
            ReadingArg::Curve => Reading::Curve,
        }
    }
}

/// Options shared by `compute` and `fuzz`.
#[derive(Args, Clone, Debug)]
struct InvariantArgs {
    #[arg(long, value_enum)]
    invariant: InvariantName,
    /// Pattern for mu123, triple and flat-triple (mu123, lambda, nu or any
    /// file in the pattern directory).
    #[arg(long)]
    pattern: Option<String>,
    /// Component permutation for templated patterns, e.g. 231.
    #[arg(long)]
    sigma: Option<Perm>,
    /// Swap the C1/C2 roles of single smoothings (t <-> 1/t).
    #[arg(long)]
    mirror: bool,
    /// How triple reads the smoothed diagrams.
    #[arg(long, value_enum, default_value = "diagram")]
    reading: ReadingArg,
    /// Components for intersection, 1-based, e.g. 1,2.
    #[arg(long, value_delimiter = ',')]
    between: Option<Vec<usize>>,
    /// Directory of .gdf files (overrides TRICOBRACKET_PATTERN_DIR).
    #[arg(long)]
    patterns: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    inv: InvariantArgs,
    #[arg(long, value_enum, default_value = "auto")]
    kind: KindArg,
    /// Read diagrams from a file, one per line; '#' starts a comment.
    #[arg(long, conflicts_with = "code")]
    file: Option<PathBuf>,
    /// Gauss code, e.g. "(circle) O1+ O2+ U1+ U2+".
    #[arg(required_unless_present = "file")]
    code: Option<String>,
}

#[derive(Args)]
struct FuzzArgs {
    #[command(flatten)]
    inv: InvariantArgs,
    #[arg(long, default_value_t = 100)]
    diagrams: usize,
    /// Upper bound on crossings of start diagrams.
    #[arg(long, default_value_t = 8)]
    crossings: usize,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mix self-crossing changes into the walks.
    #[arg(long)]
    self_crossing_changes: bool,
}

#[derive(Args)]
struct PatternArgs {
    /// Parse and validate every file under every permutation.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    dir: Option<PathBuf>,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn pattern_code(e: &PatternError) -> u8 {
    match e {
        PatternError::ComponentCount { .. } | PatternError::FlatDiagram => 3,
        _ => 2,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Diagram(DiagramError::Parse(_)) => 2,
            Error::Diagram(_) => 3,
            Error::Pattern(p) => pattern_code(p),
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<PatternError> for Failure {
    fn from(e: PatternError) -> Self {
        Failure { code: pattern_code(&e), message: e.to_string() }
    }
}

fn library(dir: Option<&Path>) -> Result<PatternLibrary, PatternError> {
    match dir {
        Some(d) => PatternLibrary::from_dir(d),
        None => PatternLibrary::from_env(),
    }
}

#[derive(Clone, Debug, Serialize)]
struct Params {
    pattern: Option<String>,
    sigma: Option<Perm>,
    reading: Option<Reading>,
    between: Option<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize)]
struct Flags {
    mirror: bool,
}

#[derive(Serialize)]
struct Report {
    input: String,
    invariant: InvariantName,
    params: Params,
    value: Value,
    flags: Flags,
    version: &'static str,
}

struct Selected {
    invariant: Invariant,
    params: Params,
}

fn load_pattern(lib: &PatternLibrary, name: &str, sigma: Option<Perm>) -> Result<Pattern, Failure> {
    if is_templated(name) && sigma.is_none() {
        // lambda and nu default to the identity permutation
        return Ok(lib.get(name, Some(Perm::identity()))?);
    }
    Ok(lib.get(name, sigma)?)
}

fn select(a: &InvariantArgs) -> Result<Selected, Failure> {
    let mut params = Params {
        pattern: None,
        sigma: None,
        reading: None,
        between: None,
    };
    let mut pattern = |default: &str| -> Result<Pattern, Failure> {
        let lib = library(a.patterns.as_deref())?;
        let name = a.pattern.clone().unwrap_or_else(|| default.to_string());
        let p = load_pattern(&lib, &name, a.sigma)?;
        params.sigma = is_templated(&name).then(|| a.sigma.unwrap_or_else(Perm::identity));
        params.pattern = Some(name);
        Ok(p)
    };
    let invariant = match a.invariant {
        InvariantName::AffineIndex => Invariant::AffineIndex { mirror: a.mirror },
        InvariantName::FlatIndex => Invariant::FlatIndex { mirror: a.mirror },
        InvariantName::Mu123 => Invariant::Formula(pattern("mu123")?),
        InvariantName::Triple => {
            let p = pattern("mu123")?;
            params.reading = Some(a.reading.into());
            Invariant::Triple(p, a.reading.into())
        }
        InvariantName::FlatTriple => Invariant::FlatTriple(pattern("mu123")?),
        InvariantName::Intersection => {
            let b = a
                .between
                .as_deref()
                .ok_or_else(|| Failure::parse("intersection needs --between A,B"))?;
            if b.len() != 2 || b.contains(&0) {
                return Err(Failure::parse("--between takes two 1-based component numbers, e.g. 1,2"));
            }
            params.between = Some([b[0], b[1]]);
            Invariant::Intersection(b[0] - 1, b[1] - 1)
        }
    };
    Ok(Selected { invariant, params })
}

fn parse_input(text: &str, kind: KindArg, inv: &Invariant) -> Result<Diagram, Failure> {
    let parsed = match kind {
        KindArg::Knotted => Diagram::parse(text, Kind::Knotted),
        KindArg::Flat => Diagram::parse(text, Kind::Flat),
        KindArg::Auto => Diagram::parse_auto(text, inv.kind().unwrap_or(Kind::Knotted)),
    };
    parsed.map_err(|e| Failure::parse(format!("{text:?}: {e}")))
}

fn read_inputs(args: &ComputeArgs) -> Result<Vec<String>, Failure> {
    match (&args.file, &args.code) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::parse(format!("reading {}: {e}", path.display())))?;
            Ok(text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect())
        }
        (None, Some(code)) => Ok(vec![code.clone()]),
        (None, None) => Err(Failure::parse("no input")),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn cmd_compute(args: &ComputeArgs) -> Result<u8, Failure> {
    let sel = select(&args.inv)?;
    for text in read_inputs(args)? {
        let d = parse_input(&text, args.kind, &sel.invariant)?;
        if let Some(b) = sel.params.between {
            if let Some(&x) = b.iter().find(|&&x| x > d.component_count()) {
                return Err(Failure {
                    code: 3,
                    message: format!("component {x} out of range (diagram has {})", d.component_count()),
                });
            }
        }
        let value = sel.invariant.compute(&d)?;
        if args.inv.json {
            let report = Report {
                input: d.serialize(),
                invariant: args.inv.invariant,
                params: sel.params.clone(),
                value,
                flags: Flags { mirror: args.inv.mirror },
                version: VERSION,
            };
            println!("{}", to_json(&report));
        } else {
            println!("{value}");
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct FuzzReport<'a> {
    invariant: InvariantName,
    params: &'a Params,
    flags: Flags,
    passed: bool,
    #[serde(flatten)]
    summary: &'a FuzzSummary,
    version: &'static str,
}

fn print_fuzz_text(s: &FuzzSummary) {
    let c = &s.config;
    println!(
        "{}: {} diagrams, <= {} crossings, {} steps, seed {}: {} evaluations, {} crossing changes, {} violations",
        s.invariant,
        c.diagrams,
        c.crossings,
        c.steps,
        c.seed,
        s.evaluations,
        s.crossing_changes,
        s.violations.len()
    );
    for v in s.violations.iter().take(3) {
        println!("violation in diagram {} (seed {}): {}", v.diagram_index, v.seed, v.reason);
        println!("  start:    {}", v.start);
        for (i, step) in v.trace.iter().enumerate() {
            println!("  step {:>3}: {}", i + 1, to_json(step));
        }
        println!("  before:   {}", v.before);
        println!("  after:    {}", v.after);
        println!("  expected: {}", v.expected);
        println!("  found:    {}", v.found);
    }
    if s.violations.len() > 3 {
        println!("({} more; use --json for all)", s.violations.len() - 3);
    }
}

fn cmd_fuzz(args: &FuzzArgs) -> Result<u8, Failure> {
    let sel = select(&args.inv)?;
    let cfg = FuzzConfig {
        diagrams: args.diagrams,
        crossings: args.crossings,
        steps: args.steps,
        seed: args.seed,
        self_crossing_changes: args.self_crossing_changes,
    };
    let summary = fuzz(&sel.invariant, &cfg)?;
    if args.inv.json {
        let report = FuzzReport {
            invariant: args.inv.invariant,
            params: &sel.params,
            flags: Flags { mirror: args.inv.mirror },
            passed: summary.passed(),
            summary: &summary,
            version: VERSION,
        };
        println!("{}", to_json(&report));
    } else {
        print_fuzz_text(&summary);
    }
    Ok(if summary.passed() { 0 } else { 1 })
}

fn cmd_patterns(args: &PatternArgs) -> Result<u8, Failure> {
    let lib = library(args.dir.as_deref())?;
    let mut code = 0;
    if !args.check {
        println!("{:<10} {:>10} {:>6} {:>6}  source", "name", "components", "terms", "arrows");
    }
    for (name, result) in lib.check() {
        let source = lib
            .path(&name)
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "built in".to_string());
        match result {
            Ok(p) if args.check => println!("ok {name} ({} components, {} arrows per term)", p.components, p.max_arity()),
            Ok(p) => println!(
                "{:<10} {:>10} {:>6} {:>6}  {}{}",
                name,
                p.components,
                p.terms.len(),
                p.max_arity(),
                source,
                if is_templated(&name) { " (templated over i,j,k)" } else { "" }
            ),
            Err(e) => {
                eprintln!("{name} ({source}): {e}");
                code = 2;
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Fuzz(a) => cmd_fuzz(a),
        Command::Patterns(a) => cmd_patterns(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
