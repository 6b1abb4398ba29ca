//! `ccode`: verify, canonicalize, search, and audit hypercube circuit codes.
//!
//! Exit status is a function of the outcome only:
//! 0 ok, 1 input error, 2 spread violation, 3 truncated search,
//! 4 internal-consistency failure.

pub mod records;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use circuit_codes::{
    audit_delta_inequalities, bit_runs, canonical_form, check_singleton_property, check_spread,
    classify, is_symmetric, normalize_to_bitrun_form, search, CodeParams, Error, SearchMode,
    SearchOptions, SpreadVerdict, TransitionSequence,
};

use records::{append_lines, CodeRecord, Source};
use table::KnownValues;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    InputError = 1,
    Violation = 2,
    Truncated = 3,
    InternalFailure = 4,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        ExitCode::from(o as u8)
    }
}

#[derive(Debug, Parser)]
#[command(name = "ccode", version, about = "Hypercube circuit codes of spread k")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether a transition sequence is a (d,k) circuit code.
    Verify(VerifyArgs),
    /// Find the maximum code length by exhaustive search.
    Search(SearchArgs),
    /// List all maximum codes up to isomorphism.
    Enumerate(EnumerateArgs),
    /// Print the canonical form of a sequence.
    Canon(CanonArgs),
    /// Run the structural audits over a file of codes.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    /// Comma-separated labels, e.g. 1,2,1,2.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub seq: Option<String>,
    /// File holding a sequence in the same syntax.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SearchArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    /// Restrict to symmetric codes (second half repeats the first).
    #[arg(long)]
    pub symmetric: bool,
    /// Restrict to symmetric codes with a bit run of length >= k + L
    /// (implies --symmetric).
    #[arg(long, value_name = "L")]
    pub family_l: Option<usize>,
    /// Only report codes of at least this length.
    #[arg(long, value_name = "N")]
    pub target: Option<usize>,
    /// Longest cycle length considered (default 2^d).
    #[arg(long, value_name = "N")]
    pub max_len: Option<usize>,
    #[arg(long, value_name = "W", default_value_t = 1)]
    pub threads: usize,
    /// Wall-clock limit in seconds.
    #[arg(long, value_name = "S")]
    pub time_limit: Option<f64>,
    #[arg(long, value_name = "NODES")]
    pub node_budget: Option<u64>,
    /// Append the search record to this JSONL file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub search: SearchArgs,
    /// Print one line per isomorphism class.
    #[arg(long)]
    pub classes: bool,
    /// Treat reversed traversal as an isomorphism too.
    #[arg(long)]
    pub with_reversal: bool,
    /// Write every maximum code found as a code record (JSONL, appended).
    #[arg(long, value_name = "FILE")]
    pub emit_records: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CanonArgs {
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub with_reversal: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// Code records (JSONL) or plain sequences, one per line.
    #[arg(long)]
    pub file: PathBuf,
    /// Dimension for plain-sequence lines.
    #[arg(long)]
    pub d: Option<usize>,
    /// Spread for plain-sequence lines.
    #[arg(long)]
    pub k: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            use clap::error::ErrorKind;
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if benign {
                let _ = write!(out, "{}", e.render());
                Outcome::Ok
            } else {
                let _ = write!(err, "{}", e.render());
                Outcome::InputError
            }
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Search(a) => cmd_search(&a, out, err),
        Command::Enumerate(a) => cmd_enumerate(&a, out, err),
        Command::Canon(a) => cmd_canon(&a, out),
        Command::Audit(a) => cmd_audit(&a, out, err),
    };
    match result {
        Ok(outcome) => outcome,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Outcome::InputError
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<records::RecordError> for CliError {
    fn from(e: records::RecordError) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult = Result<Outcome, CliError>;

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let params = CodeParams::new(args.d, args.k)?;
    let text = match (&args.seq, &args.file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => fs::read_to_string(path)?,
        (None, None) => return Err(CliError::Input("--seq or --file is required".into())),
    };
    let seq = TransitionSequence::parse(&text, params.d)?;
    match check_spread(&seq, params)? {
        SpreadVerdict::Valid => {
            writeln!(
                out,
                "valid n={} longest_bit_run={} symmetric={}",
                seq.len(),
                bit_runs(&seq).longest,
                is_symmetric(&seq)
            )?;
            Ok(Outcome::Ok)
        }
        SpreadVerdict::Violation(v) => {
            writeln!(out, "{v}")?;
            Ok(Outcome::Violation)
        }
    }
}

fn search_options(args: &SearchArgs) -> Result<SearchOptions, CliError> {
    let mode = match (args.symmetric, args.family_l) {
        (_, Some(_)) => SearchMode::Family,
        (true, None) => SearchMode::Symmetric,
        (false, None) => SearchMode::General,
    };
    let time_limit = match args.time_limit {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(CliError::Input(format!(
                "--time-limit must be positive, got {s}"
            )))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let opts = SearchOptions {
        mode,
        family_l: args.family_l,
        target: args.target,
        max_len: args.max_len,
        node_budget: args.node_budget,
        time_limit,
        workers: args.threads,
    };
    opts.validate()?;
    Ok(opts)
}

fn compare_with_table(
    record: &circuit_codes::SearchRecord,
    classes: Option<usize>,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let table = KnownValues::load();
    let claims = table.lookup(record.d, record.k, record.mode, record.l);
    if claims.is_empty() {
        return writeln!(out, "no published value covers these parameters");
    }
    for claim in claims {
        let name = &claim.entry.name;
        if !record.exhaustive {
            writeln!(
                out,
                "UNVERIFIED [{name}]: expected n={}, search truncated at n={}",
                claim.value, record.n
            )?;
            continue;
        }
        let verdict = if record.n == claim.value {
            "MATCH"
        } else {
            "MISMATCH"
        };
        writeln!(
            out,
            "{verdict} [{name}]: expected n={}, found n={}",
            claim.value, record.n
        )?;
        if let (true, Some(c), true) = (claim.unique, classes, record.n == claim.value) {
            let verdict = if c == 1 { "MATCH" } else { "MISMATCH" };
            writeln!(
                out,
                "{verdict} [{name}]: expected 1 isomorphism class, found {c}"
            )?;
        }
    }
    Ok(())
}

pub fn cmd_search(args: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let params = CodeParams::new(args.d, args.k)?;
    let opts = search_options(args)?;
    let outcome = search(params, &opts)?;
    let record = &outcome.record;
    let line = serde_json::to_string(record).expect("search records always serialize");
    writeln!(out, "{line}")?;
    if let Some(path) = &args.out {
        append_lines(path, [&line])?;
    }
    compare_with_table(record, None, out)?;
    if record.exhaustive {
        Ok(Outcome::Ok)
    } else {
        writeln!(
            err,
            "search truncated after {} nodes; n={} is not proved optimal",
            record.nodes, record.n
        )?;
        Ok(Outcome::Truncated)
    }
}

pub fn cmd_enumerate(args: &EnumerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let params = CodeParams::new(args.search.d, args.search.k)?;
    let opts = search_options(&args.search)?;
    let outcome = search(params, &opts)?;
    let record = &outcome.record;
    if let Some(path) = &args.search.out {
        append_lines(path, [serde_json::to_string(record).expect("serializable")])?;
    }
    if !record.exhaustive {
        writeln!(
            err,
            "enumeration incomplete: search truncated after {} nodes; no classes reported",
            record.nodes
        )?;
        return Ok(Outcome::Truncated);
    }
    let classes = classify(&outcome.codes, args.with_reversal);
    writeln!(
        out,
        "n={} classes={} codes={}",
        record.n,
        classes.len(),
        outcome.codes.len()
    )?;
    if args.classes {
        for class in &classes {
            writeln!(out, "{} {}", class.canonical(), class.count)?;
        }
    }
    if let Some(path) = &args.emit_records {
        let lines: Vec<String> = outcome
            .codes
            .iter()
            .map(|c| CodeRecord::from_sequence(c, params, Source::Searched).to_line())
            .collect();
        append_lines(path, lines)?;
    }
    compare_with_table(record, Some(classes.len()), out)?;
    Ok(Outcome::Ok)
}

pub fn cmd_canon(args: &CanonArgs, out: &mut dyn Write) -> CliResult {
    let seq: TransitionSequence = args.seq.parse()?;
    let form = canonical_form(&seq, args.with_reversal);
    writeln!(out, "{}", form.sequence)?;
    let map: Vec<String> = form
        .permutation
        .iter()
        .enumerate()
        .filter(|(_, &to)| to != 0)
        .map(|(i, to)| format!("{}->{}", i + 1, to))
        .collect();
    writeln!(
        out,
        "shift={} map={} reversed={}",
        form.shift,
        map.join(","),
        form.reversed
    )?;
    Ok(Outcome::Ok)
}

/// Per-record audit result; `failures` are internal-consistency breaches.
struct AuditLine {
    summary: Vec<String>,
    failures: Vec<String>,
    invalid: bool,
}

fn audit_one(seq: &TransitionSequence, params: CodeParams) -> Result<AuditLine, CliError> {
    let mut line = AuditLine {
        summary: vec![format!("n={}", seq.len())],
        failures: Vec::new(),
        invalid: false,
    };
    let n = seq.len();
    let k = params.k;
    match check_spread(seq, params)? {
        SpreadVerdict::Valid => line.summary.push("valid".into()),
        SpreadVerdict::Violation(v) => {
            line.invalid = true;
            line.summary.push(format!("invalid ({v})"));
        }
    }
    let symmetric = is_symmetric(seq);
    let longest = bit_runs(seq).longest;
    line.summary.push(format!("symmetric={symmetric}"));
    line.summary.push(format!("longest_bit_run={longest}"));

    if n > 2 * k {
        let findings = audit_delta_inequalities(seq, params)?;
        line.summary.push(format!(
            "delta_bounds={}",
            if findings.is_empty() { "ok" } else { "FAIL" }
        ));
        line.failures
            .extend(findings.iter().map(|f| format!("delta bound: {f}")));
    } else {
        line.summary.push("delta_bounds=n/a".into());
    }
    if n > 2 * (k + 1) {
        let bad = check_singleton_property(seq, params)?;
        line.summary.push(format!(
            "k+2_runs={}",
            if bad.is_empty() { "ok" } else { "FAIL" }
        ));
        line.failures.extend(bad.iter().map(|s| {
            format!(
                "segment start={} ({}) has no bit run of length k+2 at either end",
                s.start,
                TransitionSequence::new(seq.segment_labels(*s)).expect("labels in range")
            )
        }));
    } else {
        line.summary.push("k+2_runs=n/a".into());
    }

    let even_maximum = k >= 4 && k.is_multiple_of(2) && 2 * params.d == 3 * k + 4 && n == 4 * k + 6;
    if even_maximum && symmetric && !line.invalid {
        if longest < k + 3 {
            line.failures
                .push(format!("longest bit run {longest} < k+3 = {}", k + 3));
        }
        match normalize_to_bitrun_form(seq, params) {
            Ok(form) => {
                line.summary.push(format!(
                    "bitrun_form={} x={} betas={}",
                    form.sequence,
                    form.x,
                    TransitionSequence::new(form.betas.clone()).expect("labels in range")
                ));
                line.summary.push(format!(
                    "beta_order={}",
                    if form.breaches.is_empty() {
                        "ok"
                    } else {
                        "FAIL"
                    }
                ));
                line.failures
                    .extend(form.breaches.iter().map(|b| format!("beta order: {b}")));
            }
            Err(Error::Inapplicable(why)) => {
                line.failures.push(format!("no bit-run normal form: {why}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(line)
}

pub fn cmd_audit(args: &AuditArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(&args.file)?;
    let mut any_failure = false;
    let mut any_invalid = false;
    let mut audited = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let (seq, params) = if raw.starts_with('{') {
            let record = CodeRecord::parse_line(raw)
                .map_err(|e| CliError::Input(format!("line {line_no}: {e}")))?;
            let params = CodeParams::new(args.d.unwrap_or(record.d), args.k.unwrap_or(record.k))?;
            (record.sequence()?, params)
        } else {
            let (Some(d), Some(k)) = (args.d, args.k) else {
                return Err(CliError::Input(format!(
                    "line {line_no}: plain sequences need --d and --k"
                )));
            };
            let params = CodeParams::new(d, k)?;
            let seq = TransitionSequence::parse(raw, d)
                .map_err(|e| CliError::Input(format!("line {line_no}: {e}")))?;
            (seq, params)
        };
        let result =
            audit_one(&seq, params).map_err(|e| CliError::Input(format!("line {line_no}: {e}")))?;
        audited += 1;
        writeln!(
            out,
            "line {line_no}: {} {}",
            params,
            result.summary.join(" ")
        )?;
        any_invalid |= result.invalid;
        if !result.failures.is_empty() {
            any_failure = true;
            writeln!(err, "line {line_no}: internal-consistency failure in {seq}")?;
            for f in &result.failures {
                writeln!(err, "  {f}")?;
            }
        }
    }
    writeln!(out, "audited {audited} record(s)")?;
    Ok(if any_failure {
        Outcome::InternalFailure
    } else if any_invalid {
        Outcome::Violation
    } else {
        Outcome::Ok
    })
}
