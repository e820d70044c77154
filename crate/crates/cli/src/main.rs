//! `lee-survey`: check dimensions, scan ranges, reproduce count tables and
//! run the oracle and orbit searches from the command line.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lee_core::caps::Caps;
use lee_core::criteria::orbit::{search_r2, search_r3};
use lee_core::criteria::CriterionId;
use lee_core::oracle::{oracle_verdict, OracleVerdict};
use lee_core::selftest;
use lee_core::survey::{self, CheckOptions, Format, Report, SurveyError, Verdict};
use thiserror::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INCONSISTENT: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lee-survey", version, about = "Nonexistence criteria for linear perfect Lee codes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Caps file with `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    caps: Option<String>,
    /// Seed for the random irreducible polynomials; overrides the caps file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for scans; overrides the caps file.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fail with exit code 3 if any criterion was skipped for a cap.
    #[arg(long, global = true)]
    strict: bool,
    /// Extra radius-2 orbit instances as v:p pairs.
    #[arg(long, global = true, value_name = "V:P", value_parser = parse_instance)]
    experimental: Vec<(u64, u64)>,
    /// Output format (text by default).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every criterion on one dimension.
    Check {
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long)]
        n: u64,
        /// Stop at the first unconditional exclusion.
        #[arg(long)]
        early_exit: bool,
    },
    /// Verdicts for a range of dimensions.
    Scan {
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Record every criterion instead of stopping at the first exclusion.
        #[arg(long)]
        no_early_exit: bool,
    },
    /// Number of excluded dimensions up to a bound.
    Counts {
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long)]
        to: u64,
        /// Comma-separated criterion names; all criteria when absent.
        #[arg(long, value_delimiter = ',', value_parser = parse_criterion)]
        criteria: Vec<CriterionId>,
    },
    /// Exhaustive search for a code over every abelian group of the right order.
    Oracle {
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long)]
        n: usize,
    },
    /// Character-orbit search for one residue class.
    Orbit {
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 13)]
        v: u64,
        #[arg(long, default_value_t = 11)]
        p: u64,
    },
    /// Compare against the reference table for 3 <= n <= 100.
    ReproduceTable,
    /// Property suites and the criterion-versus-oracle coupling.
    Selftest,
}

fn parse_instance(s: &str) -> Result<(u64, u64), String> {
    let (v, p) = s.split_once(':').ok_or("expected v:p")?;
    Ok((v.trim().parse().map_err(|e| format!("{e}"))?, p.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_criterion(s: &str) -> Result<CriterionId, String> {
    CriterionId::parse(s).ok_or_else(|| {
        let names: Vec<_> = CriterionId::ALL.iter().map(|c| c.name()).collect();
        format!("unknown criterion `{s}`; expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Survey(#[from] SurveyError),
    #[error("skipped checks under --strict: {0}")]
    Incomplete(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Survey(SurveyError::Inconsistent { .. }) => EXIT_INCONSISTENT,
            CliError::Survey(SurveyError::Io { .. }) => EXIT_USAGE,
            CliError::Survey(_) => EXIT_USAGE,
            CliError::Incomplete(_) => EXIT_INCOMPLETE,
        }
    }
}

fn load_caps(global: &Global) -> Result<Caps, CliError> {
    let mut caps = match &global.caps {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            text.parse::<Caps>().map_err(|e| CliError::Usage(format!("{path}: {e}")))?
        }
        None => Caps::default(),
    };
    if let Some(seed) = global.seed {
        caps.seed = seed;
    }
    if let Some(threads) = global.threads {
        caps.thread_count = threads;
    }
    caps.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(caps)
}

fn deliver(global: &Global, text: String) -> Result<(), CliError> {
    match &global.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// A criterion must never exclude a dimension the oracle can realize.
fn couple_with_oracle(verdicts: &[Verdict], caps: &Caps) -> Result<(), CliError> {
    for v in verdicts.iter().filter(|v| v.n == 2 && v.overall.is_excluded()) {
        if let OracleVerdict::Exists { .. } = oracle_verdict(v.n as usize, v.r, caps) {
            let criterion = v.excluded_by()[0];
            return Err(SurveyError::Inconsistent { n: v.n, r: v.r, criterion }.into());
        }
    }
    Ok(())
}

fn demand_complete(global: &Global, verdicts: &[Verdict]) -> Result<(), CliError> {
    if !global.strict {
        return Ok(());
    }
    let incomplete: Vec<String> = verdicts
        .iter()
        .filter(|v| !v.skipped().is_empty())
        .map(|v| format!("n={} ({})", v.n, v.skipped().iter().map(|c| c.name()).collect::<Vec<_>>().join(",")))
        .collect();
    if incomplete.is_empty() {
        Ok(())
    } else {
        Err(CliError::Incomplete(incomplete.join("; ")))
    }
}

fn render_verdicts(global: &Global, caps: &Caps, verdicts: Vec<Verdict>) -> Result<String, CliError> {
    Ok(match global.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => verdicts.iter().map(|v| format!("{v}\n")).collect(),
        OutputFormat::Json => survey::emit(&Report::new(caps, verdicts), Format::Json)?,
        OutputFormat::Csv => survey::emit(&Report::new(caps, verdicts), Format::Csv)?,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let global = &cli.global;
    let caps = load_caps(global)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(caps.thread_count)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Check { r, n, early_exit } => {
            let opts = CheckOptions { early_exit, experimental_orbits: global.experimental.clone(), ..CheckOptions::audit() };
            let verdicts = vec![survey::check(n, r, &caps, &opts)?];
            couple_with_oracle(&verdicts, &caps)?;
            let strict = demand_complete(global, &verdicts);
            deliver(global, render_verdicts(global, &caps, verdicts)?)?;
            strict
        }
        Command::Scan { r, from, to, no_early_exit } => {
            let opts =
                CheckOptions { early_exit: !no_early_exit, experimental_orbits: global.experimental.clone(), ..CheckOptions::audit() };
            let verdicts = survey::scan(r, from, to, &caps, &opts)?;
            couple_with_oracle(&verdicts, &caps)?;
            let strict = demand_complete(global, &verdicts);
            deliver(global, render_verdicts(global, &caps, verdicts)?)?;
            strict
        }
        Command::Counts { r, to, criteria } => {
            let criteria = if criteria.is_empty() { CriterionId::ALL.to_vec() } else { criteria };
            let table = survey::counts(r, to, &criteria, &caps)?;
            let text = match global.format.unwrap_or(OutputFormat::Text) {
                OutputFormat::Json => to_json(&table),
                OutputFormat::Csv => return Err(CliError::Usage("counts supports text and json output".into())),
                OutputFormat::Text => {
                    let mut s = format!("r = {r}, n <= {to}: {} excluded\n", table.excluded);
                    s += "  first criterion to fire:\n";
                    for (c, k) in table.per_criterion.iter().filter(|(c, _)| c.radius() == r && criteria.contains(c)) {
                        s += &format!("    {:<16} {k}\n", c.name());
                    }
                    for (v, k) in table.small_divisor_by_v.iter().filter(|_| r == 2) {
                        s += &format!("  small divisor v = {v:<3} {k}\n");
                    }
                    if !table.capped.is_empty() {
                        s += &format!("  open with capped checks: {:?}\n", table.capped);
                    }
                    s
                }
            };
            deliver(global, text)?;
            if global.strict && !table.capped.is_empty() {
                return Err(CliError::Incomplete(format!("{:?}", table.capped)));
            }
            Ok(())
        }
        Command::Oracle { r, n } => {
            let verdict = oracle_verdict(n, r, &caps);
            let text = match global.format.unwrap_or(OutputFormat::Text) {
                OutputFormat::Json => to_json(&verdict),
                OutputFormat::Csv => return Err(CliError::Usage("oracle supports text and json output".into())),
                OutputFormat::Text => match &verdict {
                    OracleVerdict::Exists { witness } => {
                        format!("code exists over {} with generators {:?}\n", witness.group, witness.generators)
                    }
                    OracleVerdict::NotExists { groups } => format!("no code over any of {}\n", groups.join(", ")),
                    OracleVerdict::Skipped { reason } => format!("skipped: {reason}\n"),
                },
            };
            deliver(global, text)?;
            match verdict {
                OracleVerdict::Skipped { reason } if global.strict => Err(CliError::Incomplete(reason)),
                _ => Ok(()),
            }
        }
        Command::Orbit { r, n, v, p } => {
            let text = match r {
                2 => {
                    let search = search_r2(v, p, n, &caps).map_err(CliError::Usage)?;
                    match global.format.unwrap_or(OutputFormat::Text) {
                        OutputFormat::Json => to_json(&search),
                        _ => format!(
                            "v = {v}, p = {p}, n = {} (mod {p}): {} candidates, {} survivors, {} not quadratic-factor\n",
                            search.n_mod_p,
                            search.candidates,
                            search.survivors.len(),
                            search.unexplained()
                        ),
                    }
                }
                3 => {
                    let search = search_r3(n, &caps).map_err(CliError::Usage)?;
                    match global.format.unwrap_or(OutputFormat::Text) {
                        OutputFormat::Json => to_json(&search),
                        _ => format!(
                            "v = 7, p = 5, n = {} (mod 5): {} candidates, {} survivors, {} nontrivial\n",
                            search.n_mod_p,
                            search.candidates,
                            search.survivors.len(),
                            search.nontrivial()
                        ),
                    }
                }
                other => return Err(SurveyError::BadRadius(other).into()),
            };
            deliver(global, text)
        }
        Command::ReproduceTable => {
            let report = survey::reproduce_appendix_table(&caps)?;
            let text = match global.format.unwrap_or(OutputFormat::Text) {
                OutputFormat::Json => to_json(&report),
                _ => {
                    let mut s = String::new();
                    for row in &report.rows {
                        let mark = if row.matches { "ok " } else { "BAD" };
                        s += &format!("{mark} n={:<3} reference={:<4} computed={}\n", row.n, row.reference, row.computed);
                    }
                    s += &format!(
                        "open {:?}\nagreements {}, disagreements {:?}, cap skips {:?}\n",
                        report.open,
                        report.agreements.len(),
                        report.disagreements,
                        report.cap_skips
                    );
                    s
                }
            };
            deliver(global, text)?;
            if global.strict && !report.cap_skips.is_empty() {
                return Err(CliError::Incomplete(format!("{:?}", report.cap_skips)));
            }
            Ok(())
        }
        Command::Selftest => {
            let results = selftest::run_all(&caps);
            let mut text = String::new();
            for res in &results {
                let mark = if res.passed { "PASS" } else { "FAIL" };
                text += &format!("{mark} {} ({:.2?}): {}\n", res.name, res.elapsed, res.detail);
            }
            deliver(global, text)?;
            // Surface a coupling violation with its own exit code.
            survey::soundness_coupling(&caps)?;
            match results.iter().find(|r| !r.passed) {
                Some(failed) => Err(CliError::Usage(format!("suite failed: {}", failed.name))),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
