use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hyperhodge::closed_form::profile_closed;
use hyperhodge::recursion::{compare, profile_recursive, EngineReport};
use hyperhodge::sweep::{random_instances, run_default, Checks, Exhaustive, Failure};
use hyperhodge::{Error, HodgeProfile, HypergeometricParams, LocalHodgeTable, SingularPoint, TableKind};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "hyperhodge", version, about = "Local Hodge data of irreducible hypergeometric modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the profile of one (α, β).
    Compute {
        /// Comma-separated rationals, e.g. `0,1/2`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, value_enum, default_value_t = EngineChoice::Closed)]
        engine: EngineChoice,
        /// Shift Hodge indices so the smallest is 0.
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the consistency checks over a grid or a seeded sample.
    Verify {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        den_max: u64,
        /// Sample this many random instances instead of the exhaustive grid.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        sample: Option<u64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Read JSON lines `{"alpha": [...], "beta": [...]}` from stdin.
    Batch {
        #[arg(long, value_enum, default_value_t = EngineChoice::Closed)]
        engine: EngineChoice,
        #[arg(long)]
        normalize: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum EngineChoice {
    Closed,
    Recursive,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct OutputDocument {
    schema_version: String,
    params: HypergeometricParams,
    engine: EngineChoice,
    /// Keyed by engine name.
    profiles: BTreeMap<String, HodgeProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    report: Option<EngineReport>,
    /// Shift applied to every Hodge index (0 unless `--normalize`).
    normalization: i64,
}

#[derive(Serialize)]
struct VerifyDocument {
    schema_version: &'static str,
    mode: &'static str,
    n_max: u64,
    den_max: u64,
    seed: u64,
    instances: usize,
    checks: Checks,
    passed: bool,
    failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimal_reproducer: Option<String>,
}

#[derive(Serialize)]
struct ErrorDocument {
    schema_version: &'static str,
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchLine {
    alpha: Vec<String>,
    beta: Vec<String>,
}

fn error_kind(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Parse(_) | Error::LengthMismatch { .. } | Error::Empty => ("parse", 2),
        Error::Reducible { .. } => ("reducible", 3),
        _ => ("internal", 4),
    }
}

fn error_doc(kind: &'static str, message: String, line: Option<usize>) -> ErrorDocument {
    ErrorDocument {
        schema_version: SCHEMA_VERSION,
        error: ErrorBody { kind, message, line },
    }
}

fn split_list(text: &str) -> Vec<&str> {
    if text.trim().is_empty() {
        Vec::new()
    } else {
        text.split(',').map(str::trim).collect()
    }
}

fn compute(params: HypergeometricParams, engine: EngineChoice, normalize: bool) -> Result<OutputDocument, Error> {
    params.check_irreducible()?;
    let mut profiles = BTreeMap::new();
    let mut report = None;
    match engine {
        EngineChoice::Closed => {
            profiles.insert("closed".to_string(), profile_closed(&params)?);
        }
        EngineChoice::Recursive => {
            profiles.insert("recursive".to_string(), profile_recursive(&params)?);
        }
        EngineChoice::Both => {
            let closed = profile_closed(&params)?;
            let recursive = profile_recursive(&params)?;
            report = Some(compare(&params, Ok(recursive.clone()), Ok(closed.clone())));
            profiles.insert("closed".to_string(), closed);
            profiles.insert("recursive".to_string(), recursive);
        }
    }
    let mut normalization = 0;
    if normalize {
        // one shift for all engines, so agreeing profiles stay equal
        normalization = profiles.values().filter_map(HodgeProfile::min_p).min().map_or(0, |m| -m);
        for p in profiles.values_mut() {
            let mut shifted = p.shifted(normalization);
            shifted.normalization_note = format!("{} (normalized: p shifted by {normalization})", p.normalization_note);
            *p = shifted;
        }
    }
    Ok(OutputDocument {
        schema_version: SCHEMA_VERSION.into(),
        params,
        engine,
        profiles,
        report,
        normalization,
    })
}

fn tsv_table(out: &mut String, engine: &str, table: &LocalHodgeTable) {
    let kind = match table.kind() {
        TableKind::NearbyPrimitive => "nu",
        TableKind::VanishingPrimitive => "mu",
    };
    let point = match table.point() {
        SingularPoint::Zero => "0".to_string(),
        SingularPoint::Infinity => "inf".to_string(),
        // the only finite singular point of a hypergeometric module is 1
        SingularPoint::Finite(0) => "1".to_string(),
        SingularPoint::Finite(i) => format!("finite{i}"),
    };
    for (k, m) in table.entries() {
        out.push_str(&format!("{engine}\t{kind}\t{point}\t{}\t{}\t{}\t{m}\n", k.residue, k.ell, k.p));
    }
    for s in table.unknown_slots() {
        out.push_str(&format!("{engine}\t{kind}\t{point}\t{}\t{}\t-\tunknown\n", s.residue, s.ell));
    }
}

fn to_tsv(doc: &OutputDocument) -> String {
    let mut out = String::from("engine\tkind\tpoint\tresidue\tell\tp\tmult\n");
    for (engine, profile) in &doc.profiles {
        for table in profile.tables() {
            tsv_table(&mut out, engine, table);
        }
        for (p, m) in &profile.h {
            out.push_str(&format!("{engine}\th\tgeneric\t-\t-\t{p}\t{m}\n"));
        }
    }
    out
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("documents serialize"));
}

fn fail(e: &Error) -> ExitCode {
    let (kind, code) = error_kind(e);
    eprintln!("error: {e}");
    print_json(&error_doc(kind, e.to_string(), None));
    ExitCode::from(code)
}

fn cmd_compute(alpha: &str, beta: &str, engine: EngineChoice, normalize: bool, format: Format) -> ExitCode {
    let params = match HypergeometricParams::parse(&split_list(alpha), &split_list(beta)) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    match compute(params, engine, normalize) {
        Ok(doc) => {
            match format {
                Format::Json => print_json(&doc),
                Format::Tsv => print!("{}", to_tsv(&doc)),
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn cmd_verify(n_max: u64, den_max: u64, sample: Option<u64>, seed: u64) -> ExitCode {
    let (n, d) = (n_max as usize, den_max.min(u64::from(u32::MAX)) as u32);
    let checks = Checks::ALL;
    let (mode, report) = match sample {
        Some(count) => ("sample", run_default(random_instances(count as usize, n, d, seed), checks, seed)),
        None => ("exhaustive", run_default(Exhaustive::new(n, d), checks, seed)),
    };
    let minimal_reproducer = report.minimal_failure().map(Failure::reproducer);
    let doc = VerifyDocument {
        schema_version: SCHEMA_VERSION,
        mode,
        n_max,
        den_max,
        seed,
        instances: report.instances,
        checks,
        passed: report.passed(),
        failures: report.failures.clone(),
        minimal_reproducer,
    };
    print_json(&doc);
    if report.passed() {
        eprintln!("{} instances checked, all passed", report.instances);
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "{} of {} checks failed; minimal reproducer: {}",
            report.failures.len(),
            report.instances,
            doc.minimal_reproducer.as_deref().unwrap_or("-")
        );
        ExitCode::from(1)
    }
}

fn batch_line(text: &str, line: usize, engine: EngineChoice, normalize: bool) -> String {
    let result = serde_json::from_str::<BatchLine>(text)
        .map_err(|e| ("parse", e.to_string()))
        .and_then(|l| HypergeometricParams::parse(&l.alpha, &l.beta).map_err(|e| (error_kind(&e).0, e.to_string())))
        .and_then(|p| compute(p, engine, normalize).map_err(|e| (error_kind(&e).0, e.to_string())));
    match result {
        Ok(doc) => serde_json::to_string(&doc),
        Err((kind, message)) => serde_json::to_string(&error_doc(kind, message, Some(line))),
    }
    .expect("documents serialize")
}

fn cmd_batch(engine: EngineChoice, normalize: bool) -> ExitCode {
    let lines: Vec<(usize, String)> = match io::stdin().lock().lines().collect::<io::Result<Vec<_>>>() {
        Ok(lines) => lines
            .into_iter()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l))
            .collect(),
        Err(e) => {
            eprintln!("error: reading stdin: {e}");
            return ExitCode::from(2);
        }
    };
    // par_iter + collect keeps input order
    let outputs: Vec<String> = lines
        .par_iter()
        .map(|(i, l)| batch_line(l, *i, engine, normalize))
        .collect();
    let mut stdout = io::stdout().lock();
    for o in outputs {
        if writeln!(stdout, "{o}").is_err() {
            return ExitCode::from(4);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Compute {
            alpha,
            beta,
            engine,
            normalize,
            format,
        } => cmd_compute(&alpha, &beta, engine, normalize, format),
        Command::Verify {
            n_max,
            den_max,
            sample,
            seed,
        } => cmd_verify(n_max, den_max, sample, seed),
        Command::Batch { engine, normalize } => cmd_batch(engine, normalize),
    }
}
