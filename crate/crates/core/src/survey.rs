//! Verdicts for single dimensions, range scans, count tables, the appendix
//! comparison and the JSON/CSV report formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caps::Caps;
use crate::criteria::orbit::DEFAULT_INSTANCES;
use crate::criteria::{
    field_check_with, four_power_check, lambda_check_with, lambda_params, orbit_check, orbit_check_r3, radius2::small_divisor_hits,
    seven_divisor_check, small_divisor_check, CriterionId, CriterionOutcome, Status, Tier,
};
use crate::integer::{distinct_primes_u64, factorize_u64};
use crate::lee::{group_order_r2, group_order_r3};
use crate::oracle::{oracle_verdict, OracleVerdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest dimensions whose group orders fit comfortably in 64 bits.
pub const MAX_N_R2: u64 = 1_000_000_000;
pub const MAX_N_R3: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("radius must be 2 or 3, got {0}")]
    BadRadius(u64),
    #[error("dimension {n} is outside {min}..={max} for radius {r}")]
    BadDimension { n: u64, r: u64, min: u64, max: u64 },
    #[error("empty range {from}..={to}")]
    EmptyRange { from: u64, to: u64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed report: {0}")]
    Parse(String),
    #[error("criterion {criterion} excludes n = {n}, r = {r} although a code exists")]
    Inconsistent { n: u64, r: u64, criterion: CriterionId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overall {
    Excluded { tier: Tier, by: CriterionId },
    Open,
    ExternallyKnown { citation: Citation },
}

/// Prior nonexistence results, serialized as their registry keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Citation {
    #[serde(rename = "H09E")]
    DimensionThree,
    #[serde(rename = "HG14")]
    DimensionTen,
}

impl Citation {
    pub fn key(self) -> &'static str {
        match self {
            Citation::DimensionThree => "H09E",
            Citation::DimensionTen => "HG14",
        }
    }
}

impl Overall {
    pub fn label(&self) -> &'static str {
        match self {
            Overall::Excluded { .. } => "excluded",
            Overall::Open => "open",
            Overall::ExternallyKnown { .. } => "externally_known",
        }
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, Overall::Excluded { .. })
    }
}

/// Prior nonexistence results that no criterion here reproduces.
pub const EXTERNAL_REGISTRY: [(u64, u64, Citation); 2] = [(3, 2, Citation::DimensionThree), (10, 2, Citation::DimensionTen)];

pub fn external_citation(n: u64, r: u64) -> Option<Citation> {
    EXTERNAL_REGISTRY.iter().find(|&&(m, s, _)| m == n && s == r).map(|&(_, _, c)| c)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub n: u64,
    pub r: u64,
    pub order: u64,
    pub factors: Vec<(u64, u32)>,
    pub outcomes: Vec<CriterionOutcome>,
    pub overall: Overall,
    /// Wall time per outcome; left out of reports so they stay reproducible.
    #[serde(skip)]
    pub timing: Vec<Duration>,
}

impl PartialEq for Verdict {
    fn eq(&self, other: &Self) -> bool {
        (self.n, self.r, self.order, &self.factors, &self.outcomes, self.overall)
            == (other.n, other.r, other.order, &other.factors, &other.outcomes, other.overall)
    }
}

impl Verdict {
    pub fn excluded_by(&self) -> Vec<CriterionId> {
        let set: BTreeSet<CriterionId> = self.outcomes.iter().filter(|o| o.status.is_excluded()).map(|o| o.criterion).collect();
        set.into_iter().collect()
    }

    pub fn skipped(&self) -> Vec<CriterionId> {
        let set: BTreeSet<CriterionId> =
            self.outcomes.iter().filter(|o| matches!(o.status, Status::Skipped(_))).map(|o| o.criterion).collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    /// Stop at the first unconditional exclusion.
    pub early_exit: bool,
    /// Restrict to these criteria; None runs everything.
    pub only: Option<BTreeSet<CriterionId>>,
    /// Also run orbit searches for (v, p) outside the checked defaults.
    pub experimental_orbits: Vec<(u64, u64)>,
}

impl CheckOptions {
    pub fn audit() -> Self {
        CheckOptions { early_exit: false, only: None, experimental_orbits: Vec::new() }
    }

    pub fn scanning() -> Self {
        CheckOptions { early_exit: true, ..CheckOptions::audit() }
    }

    pub fn restricted(criteria: impl IntoIterator<Item = CriterionId>) -> Self {
        CheckOptions { early_exit: false, only: Some(criteria.into_iter().collect()), experimental_orbits: Vec::new() }
    }

    fn enabled(&self, c: CriterionId) -> bool {
        self.only.as_ref().is_none_or(|s| s.contains(&c))
    }
}

struct Recorder<'a> {
    opts: &'a CheckOptions,
    outcomes: Vec<CriterionOutcome>,
    timing: Vec<Duration>,
}

impl Recorder<'_> {
    /// Run and record one criterion; true once the scan may stop.
    fn run(&mut self, id: CriterionId, f: impl FnOnce() -> CriterionOutcome) -> bool {
        if !self.opts.enabled(id) {
            return false;
        }
        let start = Instant::now();
        let outcome = f();
        self.timing.push(start.elapsed());
        self.outcomes.push(outcome);
        self.done()
    }

    fn done(&self) -> bool {
        self.opts.early_exit && self.outcomes.iter().any(|o| o.status == Status::Excluded(Tier::Unconditional))
    }
}

fn validate(n: u64, r: u64) -> Result<(), SurveyError> {
    let (min, max) = match r {
        2 => (2, MAX_N_R2),
        3 => (3, MAX_N_R3),
        _ => return Err(SurveyError::BadRadius(r)),
    };
    if n < min || n > max {
        return Err(SurveyError::BadDimension { n, r, min, max });
    }
    Ok(())
}

fn run_radius2(n: u64, caps: &Caps, rec: &mut Recorder<'_>) {
    if rec.run(CriterionId::FourPower, || four_power_check(n)) || rec.run(CriterionId::SmallDivisor, || small_divisor_check(n)) {
        return;
    }
    let order = group_order_r2(n);
    let primes_v = distinct_primes_u64(order);
    let wants_lambda = rec.opts.enabled(CriterionId::Lambda) || rec.opts.enabled(CriterionId::FieldConditions);
    if wants_lambda {
        for &v in &primes_v {
            for p in distinct_primes_u64(2 * n) {
                let start = Instant::now();
                let (outcome, cert) = lambda_check_with(lambda_params(n, v, p), caps);
                let undecided = outcome.status == Status::Undecided;
                if rec.opts.enabled(CriterionId::Lambda) {
                    rec.timing.push(start.elapsed());
                    rec.outcomes.push(outcome);
                    if rec.done() {
                        return;
                    }
                }
                if let (true, Some(cert)) = (undecided, cert) {
                    if rec.run(CriterionId::FieldConditions, || field_check_with(&cert, caps)) {
                        return;
                    }
                }
            }
        }
    }
    let instances = DEFAULT_INSTANCES.iter().map(|&i| (i, false)).chain(rec.opts.experimental_orbits.iter().map(|&i| (i, true)));
    for ((v, p), experimental) in instances.collect::<Vec<_>>() {
        if order.is_multiple_of(v) && rec.run(CriterionId::Orbit, || orbit_check(n, v, p, caps, experimental)) {
            return;
        }
    }
}

fn run_radius3(n: u64, caps: &Caps, rec: &mut Recorder<'_>) {
    if rec.run(CriterionId::SevenDivisor, || seven_divisor_check(n)) {
        return;
    }
    if group_order_r3(n).is_multiple_of(7) {
        rec.run(CriterionId::OrbitR3, || orbit_check_r3(n, caps));
    }
}

fn overall_of(outcomes: &[CriterionOutcome]) -> Overall {
    let best = |tier| outcomes.iter().find(|o| o.status == Status::Excluded(tier)).map(|o| Overall::Excluded { tier, by: o.criterion });
    best(Tier::Unconditional).or_else(|| best(Tier::FactorArgument)).unwrap_or(Overall::Open)
}

fn evaluate(n: u64, r: u64, caps: &Caps, opts: &CheckOptions) -> Verdict {
    let order = if r == 2 { group_order_r2(n) } else { group_order_r3(n) };
    let mut rec = Recorder { opts, outcomes: Vec::new(), timing: Vec::new() };
    if r == 2 {
        run_radius2(n, caps, &mut rec);
    } else {
        run_radius3(n, caps, &mut rec);
    }
    Verdict {
        n,
        r,
        order,
        factors: factorize_u64(order),
        overall: overall_of(&rec.outcomes),
        outcomes: rec.outcomes,
        timing: rec.timing,
    }
}

pub fn check(n: u64, r: u64, caps: &Caps, opts: &CheckOptions) -> Result<Verdict, SurveyError> {
    validate(n, r)?;
    Ok(evaluate(n, r, caps, opts))
}

/// Verdicts for from..=to, ordered by n whatever the scheduling.
pub fn scan(r: u64, from: u64, to: u64, caps: &Caps, opts: &CheckOptions) -> Result<Vec<Verdict>, SurveyError> {
    if from > to {
        return Err(SurveyError::EmptyRange { from, to });
    }
    validate(from, r)?;
    validate(to, r)?;
    let mut out: Vec<Verdict> = (from..=to).into_par_iter().map(|n| evaluate(n, r, caps, opts)).collect();
    out.sort_by_key(|v| v.n);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub r: u64,
    pub upto: u64,
    pub criteria: Vec<CriterionId>,
    /// n with at least one exclusion among the selected criteria.
    pub excluded: u64,
    pub per_criterion: BTreeMap<CriterionId, u64>,
    /// For the small-divisor test: how many n each of 5, 13, 17 excludes.
    pub small_divisor_by_v: BTreeMap<u64, u64>,
    /// n whose count could change if a capped criterion were evaluated.
    pub capped: Vec<u64>,
}

pub fn counts(r: u64, upto: u64, criteria: &[CriterionId], caps: &Caps) -> Result<CountTable, SurveyError> {
    let min = if r == 3 { 3 } else { 2 };
    let selected: BTreeSet<CriterionId> = criteria.iter().copied().collect();
    let opts = CheckOptions { early_exit: true, only: Some(selected.clone()), experimental_orbits: Vec::new() };
    let verdicts = scan(r, min, upto.max(min), caps, &opts)?;
    let mut table = CountTable {
        r,
        upto,
        criteria: selected.iter().copied().collect(),
        excluded: 0,
        per_criterion: selected.iter().map(|&c| (c, 0)).collect(),
        small_divisor_by_v: BTreeMap::new(),
        capped: Vec::new(),
    };
    for v in verdicts.iter().filter(|v| v.n <= upto) {
        let fired = v.excluded_by();
        table.excluded += u64::from(!fired.is_empty());
        for c in fired {
            *table.per_criterion.entry(c).or_default() += 1;
        }
        if !v.overall.is_excluded() && !v.skipped().is_empty() {
            table.capped.push(v.n);
        }
    }
    if r == 2 && selected.contains(&CriterionId::SmallDivisor) {
        for v in [5u64, 13, 17] {
            table.small_divisor_by_v.insert(v, 0);
        }
        for n in min..=upto {
            for v in small_divisor_hits(n) {
                *table.small_divisor_by_v.entry(v).or_default() += 1;
            }
        }
    }
    Ok(table)
}

/// Reference rows for 3 <= n <= 100: K four-power, S small divisor,
/// U lambda or field conditions, X prior result, ? open.
pub const APPENDIX_ROWS: [(u64, &str); 98] = [
    (3, "X"), (4, "K"), (5, "KU"), (6, "KU"), (7, "K"), (8, "S"), (9, "KU"), (10, "X"), (11, "KSU"), (12, "K"),
    (13, "KSU"), (14, "K"), (15, "U"), (16, "?"), (17, "KU"), (18, "SU"), (19, "K"), (20, "U"), (21, "?"), (22, "K"),
    (23, "SU"), (24, "K"), (25, "KU"), (26, "KSU"), (27, "KSU"), (28, "U"), (29, "KU"), (30, "KU"), (31, "K"), (32, "K"),
    (33, "KS"), (34, "K"), (35, "K"), (36, "?"), (37, "KU"), (38, "S"), (39, "K"), (40, "KS"), (41, "S"), (42, "KU"),
    (43, "KSU"), (44, "KSU"), (45, "U"), (46, "SU"), (47, "K"), (48, "KSU"), (49, "S"), (50, "K"), (51, "KU"), (52, "KU"),
    (53, "KS"), (54, "KS"), (55, "?"), (56, "KSU"), (57, "KSU"), (58, "S"), (59, "U"), (60, "K"), (61, "SU"), (62, "KSU"),
    (63, "KSU"), (64, "?"), (65, "KU"), (66, "?"), (67, "KSU"), (68, "KS"), (69, "K"), (70, "K"), (71, "KS"), (72, "K"),
    (73, "KSU"), (74, "KSU"), (75, "KSU"), (76, "K"), (77, "U"), (78, "?"), (79, "K"), (80, "K"), (81, "KSU"), (82, "K"),
    (83, "KS"), (84, "K"), (85, "KU"), (86, "S"), (87, "K"), (88, "KS"), (89, "K"), (90, "KU"), (91, "U"), (92, "?"),
    (93, "KSU"), (94, "KU"), (95, "SU"), (96, "S"), (97, "K"), (98, "S"), (99, "K"), (100, "K"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixRow {
    pub n: u64,
    pub reference: String,
    pub computed: String,
    pub overall: Overall,
    /// Overall status agrees and the K and S columns agree exactly.
    pub matches: bool,
    /// Differences confined to the U column (informational only).
    pub u_differs: bool,
    pub skipped: Vec<CriterionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub rows: Vec<AppendixRow>,
    pub open: Vec<u64>,
    pub agreements: Vec<u64>,
    pub disagreements: Vec<u64>,
    pub cap_skips: Vec<u64>,
}

fn row_code(v: &Verdict) -> String {
    let fired = v.excluded_by();
    let mut code = String::new();
    if fired.contains(&CriterionId::FourPower) {
        code.push('K');
    }
    if fired.contains(&CriterionId::SmallDivisor) {
        code.push('S');
    }
    if fired.contains(&CriterionId::Lambda) || fired.contains(&CriterionId::FieldConditions) {
        code.push('U');
    }
    if code.is_empty() {
        if let Overall::Excluded { .. } = v.overall {
            code.push('O');
        }
    }
    code
}

pub fn reproduce_appendix_table(caps: &Caps) -> Result<AppendixReport, SurveyError> {
    let verdicts = scan(2, 3, 100, caps, &CheckOptions::audit())?;
    let mut report = AppendixReport { rows: Vec::new(), open: Vec::new(), agreements: Vec::new(), disagreements: Vec::new(), cap_skips: Vec::new() };
    for (verdict, &(n, reference)) in verdicts.iter().zip(APPENDIX_ROWS.iter()) {
        debug_assert_eq!(verdict.n, n);
        let overall = match (verdict.overall, external_citation(n, 2)) {
            (Overall::Open, Some(citation)) => Overall::ExternallyKnown { citation },
            (o, _) => o,
        };
        let mut computed = row_code(verdict);
        match overall {
            Overall::Open => computed = "?".into(),
            Overall::ExternallyKnown { .. } => computed = "X".into(),
            Overall::Excluded { .. } => {}
        }
        let has = |s: &str, c: char| s.contains(c);
        let status_ok = match reference {
            "?" => overall == Overall::Open,
            "X" => matches!(overall, Overall::ExternallyKnown { .. }),
            _ => overall.is_excluded(),
        };
        let ks_ok = ['K', 'S'].iter().all(|&c| has(reference, c) == has(&computed, c));
        let u_differs = has(reference, 'U') != has(&computed, 'U');
        let matches = status_ok && ks_ok;
        if overall == Overall::Open {
            report.open.push(n);
        }
        if matches { &mut report.agreements } else { &mut report.disagreements }.push(n);
        let skipped = verdict.skipped();
        if !skipped.is_empty() {
            report.cap_skips.push(n);
        }
        report.rows.push(AppendixRow { n, reference: reference.into(), computed, overall, matches, u_differs, skipped });
    }
    Ok(report)
}

/// Exists-witness dimensions must never be excluded by any criterion.
pub fn soundness_coupling(caps: &Caps) -> Result<Vec<(u64, u64, String)>, SurveyError> {
    let mut log = Vec::new();
    for (n, r) in [(1u64, 2u64), (2, 2), (3, 2), (1, 3), (2, 3)] {
        let verdict = oracle_verdict(n as usize, r, caps);
        let label = match &verdict {
            OracleVerdict::Exists { .. } => "exists",
            OracleVerdict::NotExists { .. } => "not_exists",
            OracleVerdict::Skipped { .. } => "skipped",
        };
        if let OracleVerdict::Exists { .. } = verdict {
            let checked = evaluate(n, r, caps, &CheckOptions::audit());
            if let Some(bad) = checked.outcomes.iter().find(|o| o.status.is_excluded()) {
                return Err(SurveyError::Inconsistent { n, r, criterion: bad.criterion });
            }
        }
        log.push((n, r, label.to_string()));
    }
    Ok(log)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = SurveyError;
    fn from_str(s: &str) -> Result<Self, SurveyError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(SurveyError::Parse(format!("unknown format {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub caps: Caps,
    pub seed: u64,
    pub version: String,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(caps: &Caps, verdicts: Vec<Verdict>) -> Self {
        Report { caps: caps.clone(), seed: caps.seed, version: VERSION.to_string(), verdicts }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: u64,
    pub r: u64,
    pub order: u64,
    pub overall: String,
    pub tier: String,
    pub criteria_fired: String,
    pub skips: String,
}

fn joined(ids: &[CriterionId]) -> String {
    ids.iter().map(|c| c.name()).collect::<Vec<_>>().join(";")
}

impl From<&Verdict> for CsvRow {
    fn from(v: &Verdict) -> Self {
        let tier = match v.overall {
            Overall::Excluded { tier, .. } => tier.to_string(),
            _ => String::new(),
        };
        CsvRow {
            n: v.n,
            r: v.r,
            order: v.order,
            overall: v.overall.label().to_string(),
            tier,
            criteria_fired: joined(&v.excluded_by()),
            skips: joined(&v.skipped()),
        }
    }
}

pub fn emit(report: &Report, format: Format) -> Result<String, SurveyError> {
    match format {
        Format::Json => serde_json::to_string_pretty(report).map(|s| s + "\n").map_err(|e| SurveyError::Parse(e.to_string())),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            for v in &report.verdicts {
                w.serialize(CsvRow::from(v)).map_err(|e| SurveyError::Parse(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| SurveyError::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| SurveyError::Parse(e.to_string()))
        }
    }
}

pub fn parse_json(text: &str) -> Result<Report, SurveyError> {
    serde_json::from_str(text).map_err(|e| SurveyError::Parse(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, SurveyError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<CsvRow>, _>>()
        .map_err(|e| SurveyError::Parse(e.to_string()))
}

pub fn write_report(path: &str, report: &Report, format: Format) -> Result<(), SurveyError> {
    let text = emit(report, format)?;
    std::fs::write(path, text).map_err(|source| SurveyError::Io { path: path.to_string(), source })
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> =
            self.factors.iter().map(|&(q, e)| if e == 1 { q.to_string() } else { format!("{q}^{e}") }).collect();
        writeln!(f, "n = {}, r = {}, order = {} = {}", self.n, self.r, self.order, factors.join(" * "))?;
        for o in &self.outcomes {
            let params: Vec<String> = o.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let status = match &o.status {
                Status::Excluded(t) => format!("excluded ({t})"),
                Status::NotApplicable(why) => format!("not applicable: {why}"),
                Status::Undecided => "undecided".into(),
                Status::Skipped(why) => format!("skipped: {why}"),
            };
            writeln!(f, "  {:<17} {:<40} {}", o.criterion.name(), status, params.join(" "))?;
        }
        match self.overall {
            Overall::Excluded { tier, by } => write!(f, "overall: excluded by {by} ({tier})"),
            Overall::Open => write!(f, "overall: open"),
            Overall::ExternallyKnown { citation } => write!(f, "overall: known from prior work [{}]", citation.key()),
        }
    }
}
