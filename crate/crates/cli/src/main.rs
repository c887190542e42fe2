//! `nfold`: solve, brute-force, encode and check combinatorial n-fold
//! integer programs from the command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 infeasible, 3 refused (a size
//! bound overflowed or an encoder limit was hit), 4 unreadable or invalid
//! input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nfold_core::encoders::{
    self, encode_bribery_c1, encode_bribery_scoring, encode_huge_nfold, encode_multi_strings, encode_part, encode_wsm,
    string_presets, BriberyInstance, Copeland, HugeNFoldInstance, MultiStringsInstance, Rule, StringProblem,
    StringsInput, WsmInstance,
};
use nfold_core::format::{instance_to_json, parse_instance, to_pretty, ReportDoc};
use nfold_core::oracle::{self, brute_force_relational, corpus, CorpusParams};
use nfold_core::{
    solve_relational, AlphaStrategy, Answer, Caps, Decoder, Mode, NFoldError, RelationalInstance, SolveReport,
    SolveStatus, SolverConfig,
};
use num_rational::Ratio;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "nfold", version, about = "Combinatorial n-fold integer programming solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file with the augmentation algorithm
    Solve {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
        /// decoder sidecar written by `encode`; prints the decoded answer
        #[arg(long)]
        decoder: Option<PathBuf>,
    },
    /// Solve an instance file by exhaustive enumeration
    Oracle {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Encode an application problem as an instance file
    Encode {
        #[arg(value_enum)]
        problem: Problem,
        path: PathBuf,
        /// output instance file; schedules get one numbered file per member
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// string problem as JSON, e.g. '{"problem":"closest","d":2}'
        #[arg(long)]
        string_problem: Option<String>,
        /// alphabet for newline-separated string input (inferred if absent)
        #[arg(long)]
        alphabet: Option<String>,
        /// solve the encoding and print the decoded answer
        #[arg(long)]
        solve: bool,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Check that a report's point is feasible with the stated objective
    Certify {
        instance: PathBuf,
        report: PathBuf,
        /// also confirm optimality against the exhaustive oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Write a seeded corpus of small random instances
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct SolverFlags {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Graver-norm bound used in heuristic mode
    #[arg(long)]
    gbound: Option<i64>,
    #[arg(long, value_enum, default_value_t = AlphaArg::Full)]
    alpha: AlphaArg,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// include the augmentation trace in the report
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphaArg {
    Full,
    Pow2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Strings,
    Wsm,
    Bribery,
    Huge,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<NFoldError> for Failure {
    fn from(e: NFoldError) -> Self {
        let code = match e {
            NFoldError::BoundTooLarge(_) | NFoldError::EncoderCap(_) => 3,
            NFoldError::Parse(_)
            | NFoldError::Invalid(_)
            | NFoldError::Dimension(_)
            | NFoldError::Relation(_)
            | NFoldError::OracleTooLarge { .. } => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome = std::result::Result<u8, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(4, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(1, format!("cannot write {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| fail(4, format!("invalid {what}: {e}")))
}

fn load_instance(path: &Path) -> std::result::Result<RelationalInstance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn config(flags: &SolverFlags) -> std::result::Result<SolverConfig, Failure> {
    let mode = match (flags.mode, flags.gbound) {
        (ModeArg::Exact, None) => Mode::Exact,
        (ModeArg::Exact, Some(_)) => return Err(fail(4, "--gbound only applies to --mode heuristic")),
        (ModeArg::Heuristic, Some(g)) => Mode::Heuristic(g),
        (ModeArg::Heuristic, None) => return Err(fail(4, "--mode heuristic needs --gbound")),
    };
    let cfg = SolverConfig {
        mode,
        max_iterations: flags.max_iterations,
        alpha_strategy: match flags.alpha {
            AlphaArg::Full => AlphaStrategy::FullSweep,
            AlphaArg::Pow2 => AlphaStrategy::PowersOfTwoThenRefine,
        },
        trace_enabled: flags.trace,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn status_code(status: &SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal | SolveStatus::LocalOptimum => 0,
        SolveStatus::Infeasible => 2,
        SolveStatus::Error(_) => 1,
    }
}

fn join(v: &[nfold_core::format::Int]) -> String {
    v.iter().map(|i| i.0.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_report(doc: &ReportDoc, json: bool) -> std::result::Result<(), Failure> {
    if json {
        println!("{}", to_pretty(doc)?);
        return Ok(());
    }
    println!("status: {}", doc.status);
    if let Some(m) = &doc.message {
        println!("message: {m}");
    }
    if let Some(v) = doc.objective {
        println!("objective: {}", v.0);
    }
    if let Some(p) = &doc.point {
        println!("point: {}", join(p));
    }
    println!("iterations: {}", doc.iterations);
    if let Some(trace) = &doc.trace {
        for e in trace {
            println!("  step {}: alpha {} drop {} objective {}", e.iteration, e.alpha.0, e.drop.0, e.objective.0);
        }
    }
    Ok(())
}

fn print_value<T: Serialize + std::fmt::Debug>(v: &T, json: bool) -> std::result::Result<(), Failure> {
    if json {
        println!("{}", to_pretty(v)?);
    } else {
        println!("{v:#?}");
    }
    Ok(())
}

fn report_and_decode(report: &SolveReport, decoder: Option<&Decoder>, flags: &SolverFlags) -> Outcome {
    print_report(&ReportDoc::from_report(report, flags.trace), flags.json)?;
    if let (Some(d), Some(p)) = (decoder, &report.point) {
        print_value(&encoders::decode(d, p)?, flags.json)?;
    }
    Ok(status_code(&report.status))
}

fn cmd_solve(path: &Path, flags: &SolverFlags, decoder: Option<&Path>) -> Outcome {
    let rel = load_instance(path)?;
    let cfg = config(flags)?;
    let decoder: Option<Decoder> = match decoder {
        Some(p) => Some(parse_json(&read(p)?, "decoder sidecar")?),
        None => None,
    };
    let report = solve_relational(&rel, &cfg, None)?;
    report_and_decode(&report, decoder.as_ref(), flags)
}

fn oracle_cap() -> std::result::Result<u128, Failure> {
    match std::env::var("NFOLD_ORACLE_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| fail(4, format!("NFOLD_ORACLE_CAP is not a number: {v:?}"))),
        Err(_) => Ok(oracle::DEFAULT_CAP),
    }
}

fn cmd_oracle(path: &Path, json: bool) -> Outcome {
    let rel = load_instance(path)?;
    let report = brute_force_relational(&rel, oracle_cap()?)?;
    print_report(&ReportDoc::from_report(&report, false), json)?;
    Ok(status_code(&report.status))
}

/// Reads string input: column-multiplicity JSON, or one string per line.
enum StringsSource {
    Columns(MultiStringsInstance),
    Records(StringsInput),
}

fn load_strings(text: &str, alphabet: Option<&str>) -> std::result::Result<StringsSource, Failure> {
    if text.trim_start().starts_with('{') {
        return Ok(StringsSource::Columns(parse_json(text, "column-multiplicity input")?));
    }
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    Ok(StringsSource::Records(StringsInput::parse(&lines, alphabet)?))
}

fn encode_all(
    problem: Problem,
    text: &str,
    string_problem: Option<&str>,
    alphabet: Option<&str>,
    caps: &Caps,
) -> std::result::Result<Vec<(String, RelationalInstance, Decoder)>, Failure> {
    let single = |(rel, dec)| vec![("all".to_string(), rel, dec)];
    Ok(match problem {
        Problem::Wsm => single(encode_wsm(&parse_json::<WsmInstance>(text, "set multicover input")?, caps)?),
        Problem::Huge => single(encode_huge_nfold(&parse_json::<HugeNFoldInstance>(text, "huge n-fold input")?, caps)?),
        Problem::Bribery => {
            let br: BriberyInstance = parse_json(text, "bribery input")?;
            match br.rule {
                Rule::Scoring { .. } => single(encode_bribery_scoring(&br, caps)?),
                Rule::Copeland { alpha_num, alpha_den } => {
                    br.validate()?;
                    let rule = Copeland { alpha: Ratio::new(alpha_num, alpha_den) };
                    encode_bribery_c1(&br, &rule, caps)?
                        .into_iter()
                        .enumerate()
                        .map(|(i, (rel, dec))| (format!("scenario {i}"), rel, dec))
                        .collect()
                }
            }
        }
        Problem::Strings => match load_strings(text, alphabet)? {
            StringsSource::Columns(ms) => single(encode_multi_strings(&ms, caps)?),
            StringsSource::Records(input) => {
                let sp: StringProblem = parse_json(
                    string_problem.ok_or_else(|| fail(4, "string input needs --string-problem"))?,
                    "string problem",
                )?;
                let mut out = Vec::new();
                for member in string_presets(&sp, &input, caps)? {
                    for (j, part) in member.parts.iter().enumerate() {
                        let (rel, dec) = encode_part(&input, part, caps)?;
                        out.push((format!("{} part {j}", member.label), rel, dec));
                    }
                }
                out
            }
        },
    })
}

fn numbered(out: &Path, i: usize) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    out.with_file_name(format!("{stem}.{i}{ext}"))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".decoder.json");
    PathBuf::from(s)
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode(
    problem: Problem,
    path: &Path,
    out: Option<&Path>,
    string_problem: Option<&str>,
    alphabet: Option<&str>,
    solve: bool,
    flags: &SolverFlags,
) -> Outcome {
    let text = read(path)?;
    let caps = Caps::default();
    let cfg = config(flags)?;
    if solve {
        // whole-problem answers: schedules are resolved the same way as in the library
        return solve_application(problem, &text, string_problem, alphabet, &cfg, &caps, flags.json);
    }
    let encoded = encode_all(problem, &text, string_problem, alphabet, &caps)?;
    if encoded.is_empty() {
        return Err(fail(2, "no schedule member can succeed; nothing to encode"));
    }
    let many = encoded.len() > 1;
    for (i, (label, rel, dec)) in encoded.iter().enumerate() {
        let json = instance_to_json(rel)?;
        match out {
            Some(o) => {
                let target = if many { numbered(o, i) } else { o.to_path_buf() };
                write(&target, &json)?;
                write(&sidecar(&target), &to_pretty(dec)?)?;
                eprintln!("{label}: wrote {} (n={}, t={}, r={})", target.display(), rel.base.n, rel.base.t(), rel.base.r());
            }
            None => println!("{json}"),
        }
    }
    Ok(0)
}

fn solve_application(
    problem: Problem,
    text: &str,
    string_problem: Option<&str>,
    alphabet: Option<&str>,
    cfg: &SolverConfig,
    caps: &Caps,
    json: bool,
) -> Outcome {
    if let Problem::Strings = problem {
        if let StringsSource::Records(input) = load_strings(text, alphabet)? {
            let sp: StringProblem = parse_json(
                string_problem.ok_or_else(|| fail(4, "string input needs --string-problem"))?,
                "string problem",
            )?;
            return match encoders::solve_string_problem(&sp, &input, cfg, caps)? {
                Some(sol) => print_value(&sol, json).map(|_| 0),
                None => {
                    println!("infeasible");
                    Ok(2)
                }
            };
        }
    }
    let members: Vec<(RelationalInstance, Decoder)> =
        encode_all(problem, text, string_problem, alphabet, caps)?.into_iter().map(|(_, r, d)| (r, d)).collect();
    match encoders::solve_schedule(&members, cfg)? {
        Some((_, answer)) => {
            print_value::<Answer>(&answer, json)?;
            Ok(0)
        }
        None => {
            println!("infeasible");
            Ok(2)
        }
    }
}

fn cmd_certify(instance: &Path, report: &Path, use_oracle: bool) -> Outcome {
    let rel = load_instance(instance)?;
    let doc: ReportDoc = parse_json(&read(report)?, "report")?;
    let point: Vec<i64> = match &doc.point {
        Some(p) => p.iter().map(|i| i.0).collect(),
        None if doc.status == "infeasible" && use_oracle => {
            let truth = brute_force_relational(&rel, oracle_cap()?)?;
            return if truth.status == SolveStatus::Infeasible {
                println!("certified: infeasible");
                Ok(0)
            } else {
                println!("rejected: oracle found a feasible point");
                Ok(1)
            };
        }
        None => return Err(fail(1, "report has no point to certify")),
    };
    if point.len() != rel.base.dim() || !rel.is_feasible(&point) {
        println!("rejected: point is infeasible");
        return Ok(1);
    }
    let value = rel.evaluate(&point)?;
    if doc.objective.map(|o| o.0) != Some(value) {
        println!("rejected: objective is {value}, report says {:?}", doc.objective.map(|o| o.0));
        return Ok(1);
    }
    if use_oracle {
        let truth = brute_force_relational(&rel, oracle_cap()?)?;
        if truth.objective_value != Some(value) {
            println!("rejected: oracle optimum is {:?}", truth.objective_value);
            return Ok(1);
        }
    }
    println!("certified: objective {value}");
    Ok(0)
}

fn cmd_generate(seed: u64, count: usize, out: &Path) -> Outcome {
    fs::create_dir_all(out).map_err(|e| fail(1, format!("cannot create {}: {e}", out.display())))?;
    for (i, inst) in corpus(seed, count, &CorpusParams::default()).into_iter().enumerate() {
        let n = inst.n;
        let r = inst.r();
        let rel = RelationalInstance::new(inst, vec![nfold_core::Relation::Eq; r], vec![nfold_core::Relation::Eq; n])?;
        write(&out.join(format!("instance_{i:04}.json")), &instance_to_json(&rel)?)?;
    }
    println!("wrote {count} instances to {}", out.display());
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve { path, solver, decoder } => cmd_solve(&path, &solver, decoder.as_deref()),
        Command::Oracle { path, json } => cmd_oracle(&path, json),
        Command::Encode { problem, path, out, string_problem, alphabet, solve, solver } => cmd_encode(
            problem,
            &path,
            out.as_deref(),
            string_problem.as_deref(),
            alphabet.as_deref(),
            solve,
            &solver,
        ),
        Command::Certify { instance, report, oracle } => cmd_certify(&instance, &report, oracle),
        Command::Generate { seed, count, out } => cmd_generate(seed, count, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
