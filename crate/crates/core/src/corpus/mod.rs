//! Dataset construction: scanning, admission, pruning and splitting.

mod dataset;
pub mod github;
mod scan;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cst::{self, NodeKind, SourceUnit};
use crate::linearizer;
use crate::mpiedit::{self, MpiEditError};

pub use dataset::{read_dataset, read_jsonl, write_dataset, write_jsonl, DatasetExample, Split};
pub use github::{fetch_repo_list, SearchOptions};
pub use scan::{c_files, relative_name, scan, Scan};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: not valid UTF-8")]
    Encoding { path: String },
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("rate limited; retry after {retry_after}s")]
    RateLimited { retry_after: u64 },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl CorpusError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub token_limit: usize,
    pub seed: u64,
    /// Train, valid and test shares.
    pub ratios: [f64; 3],
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { token_limit: 320, seed: 0, ratios: [0.8, 0.1, 0.1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    ParseFailure,
    NoMain,
    OverTokenLimit,
    NoMpiCalls,
    EmbeddedMpiCall,
    Duplicate,
}

impl Reason {
    pub const ALL: [Reason; 6] = [
        Reason::ParseFailure,
        Reason::NoMain,
        Reason::OverTokenLimit,
        Reason::NoMpiCalls,
        Reason::EmbeddedMpiCall,
        Reason::Duplicate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Reason::ParseFailure => "parse_failure",
            Reason::NoMain => "no_main",
            Reason::OverTokenLimit => "over_token_limit",
            Reason::NoMpiCalls => "no_mpi_calls",
            Reason::EmbeddedMpiCall => "embedded_mpi_call",
            Reason::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Included,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub path: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
    /// Extra context for exclusions, such as the offending call.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl InclusionReport {
    pub fn included(path: impl Into<String>) -> Self {
        InclusionReport { path: path.into(), verdict: Verdict::Included, reason: None, detail: None }
    }

    pub fn excluded(path: impl Into<String>, reason: Reason, detail: Option<String>) -> Self {
        InclusionReport { path: path.into(), verdict: Verdict::Excluded, reason: Some(reason), detail }
    }

    pub fn is_included(&self) -> bool {
        self.verdict == Verdict::Included
    }
}

/// A unit that passed every gate except deduplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub path: String,
    pub id: String,
    pub label_code: String,
    pub pruned: mpiedit::PruneResult,
}

/// Applies every admission gate except deduplication. Pure, so it can run
/// in parallel.
pub fn screen(unit: &SourceUnit, config: &CorpusConfig) -> Result<Candidate, InclusionReport> {
    let path = unit.path.clone();
    let excluded = |reason, detail| InclusionReport::excluded(path.clone(), reason, detail);
    let Some(ast) = unit.ast.as_ref().filter(|_| unit.parse_ok) else {
        return Err(excluded(Reason::ParseFailure, None));
    };
    let has_main = ast
        .children
        .iter()
        .any(|c| c.kind == NodeKind::FunctionDefinition && c.function_name() == Some("main"));
    if !has_main {
        return Err(excluded(Reason::NoMain, None));
    }
    let label_code = cst::render(ast);
    let tokens = cst::token_count(&label_code);
    if tokens > config.token_limit {
        return Err(excluded(Reason::OverTokenLimit, Some(format!("{tokens} tokens"))));
    }
    if mpiedit::find_mpi_calls(ast).is_empty() && mpiedit::extract_calls_lexical(&label_code).is_empty() {
        return Err(excluded(Reason::NoMpiCalls, None));
    }
    let standardized = SourceUnit::new(path.clone(), label_code.clone());
    let pruned = match mpiedit::prune(&standardized) {
        Ok(p) => p,
        Err(e @ (MpiEditError::EmbeddedCall { .. } | MpiEditError::Unrestorable { .. })) => {
            return Err(excluded(Reason::EmbeddedMpiCall, Some(e.to_string())));
        }
        Err(e) => return Err(excluded(Reason::ParseFailure, Some(e.to_string()))),
    };
    Ok(Candidate { path, id: content_id(&label_code), label_code, pruned })
}

/// Full admission chain; `seen` holds ids already admitted.
pub fn admit(
    unit: &SourceUnit,
    config: &CorpusConfig,
    seen: &mut HashSet<String>,
) -> (InclusionReport, Option<Candidate>) {
    match screen(unit, config) {
        Err(report) => (report, None),
        Ok(c) => dedup(c, seen),
    }
}

fn dedup(c: Candidate, seen: &mut HashSet<String>) -> (InclusionReport, Option<Candidate>) {
    if seen.insert(c.id.clone()) {
        (InclusionReport::included(c.path.clone()), Some(c))
    } else {
        let detail = Some(format!("same content as an earlier file ({})", &c.id[..12]));
        (InclusionReport::excluded(c.path, Reason::Duplicate, detail), None)
    }
}

/// Hex SHA-256 of the standardized text.
pub fn content_id(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Assigns a split from a seeded hash of the id, so an example keeps its
/// split when other files are added.
pub fn assign_split(id: &str, seed: u64, ratios: [f64; 3]) -> Split {
    let digest = Sha256::digest(format!("{seed}:{id}").as_bytes());
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    let x = u64::from_be_bytes(word) as f64 / (u64::MAX as f64 + 1.0);
    let total: f64 = ratios.iter().sum();
    let total = if total > 0.0 { total } else { 1.0 };
    let mut acc = 0.0;
    for (split, r) in Split::ALL.iter().zip(ratios) {
        acc += r / total;
        if x < acc {
            return *split;
        }
    }
    Split::Test
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub config: CorpusConfig,
    pub total_files: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub reasons: BTreeMap<String, usize>,
    pub splits: BTreeMap<String, usize>,
    /// External command used to clone the mined repositories, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clone_command: Option<String>,
}

impl CorpusManifest {
    fn new(config: &CorpusConfig) -> Self {
        CorpusManifest {
            config: config.clone(),
            total_files: 0,
            verdicts: [("excluded".to_string(), 0), ("included".to_string(), 0)].into(),
            reasons: Reason::ALL.iter().map(|r| (r.as_str().to_string(), 0)).collect(),
            splits: Split::ALL.iter().map(|s| (s.as_str().to_string(), 0)).collect(),
            clone_command: None,
        }
    }

    fn record(&mut self, report: &InclusionReport) {
        self.total_files += 1;
        let key = if report.is_included() { "included" } else { "excluded" };
        *self.verdicts.entry(key.to_string()).or_default() += 1;
        if let Some(r) = report.reason {
            *self.reasons.entry(r.as_str().to_string()).or_default() += 1;
        }
    }

    pub fn included(&self) -> usize {
        self.verdicts.get("included").copied().unwrap_or(0)
    }
}

pub fn write_manifest(path: &Path, manifest: &CorpusManifest) -> Result<(), CorpusError> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| CorpusError::Format { line: 0, message: e.to_string() })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CorpusError::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<CorpusManifest, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CorpusError::Format { line: e.line(), message: e.to_string() })
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub examples: Vec<DatasetExample>,
    pub manifest: CorpusManifest,
    pub reports: Vec<InclusionReport>,
}

/// Screens units in parallel, then deduplicates and splits them in input
/// order.
pub fn build_dataset(units: &[SourceUnit], config: &CorpusConfig) -> BuildOutput {
    let screened: Vec<Result<Candidate, InclusionReport>> = units.par_iter().map(|u| screen(u, config)).collect();
    let mut seen = HashSet::new();
    let mut manifest = CorpusManifest::new(config);
    let mut reports = Vec::with_capacity(units.len());
    let mut admitted = Vec::new();
    for s in screened {
        let (report, cand) = match s {
            Err(r) => (r, None),
            Ok(c) => dedup(c, &mut seen),
        };
        manifest.record(&report);
        reports.push(report);
        admitted.extend(cand);
    }
    let examples: Vec<DatasetExample> = admitted.into_par_iter().map(|c| to_example(c, config)).collect();
    for ex in &examples {
        *manifest.splits.entry(ex.split.as_str().to_string()).or_default() += 1;
    }
    BuildOutput { examples, manifest, reports }
}

fn to_example(c: Candidate, config: &CorpusConfig) -> DatasetExample {
    let input_xsbt = match cst::parse(&c.pruned.pruned_text) {
        Ok(ast) => linearizer::xsbt_text(&ast),
        Err(_) => String::new(),
    };
    let gold_calls = mpiedit::sites(&mpiedit::extract_calls_lexical(&c.label_code));
    DatasetExample {
        split: assign_split(&c.id, config.seed, config.ratios),
        id: c.id,
        input_code: c.pruned.pruned_text,
        input_xsbt,
        label_code: c.label_code,
        gold_calls,
    }
}

/// Scans `root` and builds the dataset. Files that are not valid UTF-8 are
/// reported as parse failures; other I/O errors are logged and skipped.
pub fn build_from_dir(root: &Path, config: &CorpusConfig) -> Result<BuildOutput, CorpusError> {
    let mut units = Vec::new();
    let mut unreadable = Vec::new();
    for (i, item) in scan(root)?.enumerate() {
        match item {
            Ok(u) => units.push(u),
            Err(CorpusError::Encoding { path }) => unreadable.push((i, path)),
            Err(e) => log::warn!("skipping: {e}"),
        }
    }
    let mut out = build_dataset(&units, config);
    for (_, path) in unreadable {
        let report = InclusionReport::excluded(path, Reason::ParseFailure, Some("not valid UTF-8".into()));
        out.manifest.record(&report);
        out.reports.push(report);
    }
    out.reports.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub line: usize,
    pub id: String,
    pub problem: String,
}

/// Full-scan schema check: every example invariant plus split partition.
pub fn check_dataset(examples: &[DatasetExample], token_limit: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, ex) in examples.iter().enumerate() {
        for problem in ex.problems(token_limit) {
            out.push(Violation { line: i + 1, id: ex.id.clone(), problem });
        }
        if !ids.insert(ex.id.as_str()) {
            out.push(Violation { line: i + 1, id: ex.id.clone(), problem: "id appears more than once".into() });
        }
    }
    out
}
