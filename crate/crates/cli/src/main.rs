mod config;

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use mpiassist_core::bench::{self, BenchPredictor, Toolchain};
use mpiassist_core::corpus::{self, github, CorpusConfig, SearchOptions, Split};
use mpiassist_core::cst::{self, SourceUnit};
use mpiassist_core::predictor::{self, PredictionRecord};
use mpiassist_core::{eval, linearizer, mpiedit, stats};

#[derive(Parser)]
#[command(name = "mpiassist", version, about = "Build MPI code-completion datasets and score predictions")]
struct Cli {
    /// key = value file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print human-readable tables instead of machine-readable output.
    #[arg(long, global = true)]
    pretty: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List clone URLs of repositories matching a search phrase.
    Repos {
        #[arg(long, default_value = "MPI")]
        query: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        max_pages: usize,
        #[arg(long, default_value = "https://api.github.com")]
        api_url: String,
    },
    /// Scan a source tree and write dataset.jsonl, manifest.json and reports.jsonl.
    Build {
        #[arg(long, required = true)]
        root: PathBuf,
        #[arg(long, required = true)]
        out: PathBuf,
        #[arg(long, default_value_t = 320)]
        token_limit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train, valid and test shares, e.g. 80,10,10.
        #[arg(long, default_value = "0.8,0.1,0.1", value_parser = parse_ratios)]
        ratios: [f64; 3],
        /// Command used to clone the scanned repositories, recorded in the manifest.
        #[arg(long)]
        clone_command: Option<String>,
    },
    /// Corpus statistics: function counts, code lengths, Init-Finalize span.
    Stats {
        #[arg(long, required = true)]
        root: PathBuf,
        #[arg(long, required = true)]
        out: PathBuf,
    },
    /// Remove MPI calls from one file.
    Prune {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linearize one file.
    Xsbt {
        file: PathBuf,
        /// Emit the full SBT sequence instead.
        #[arg(long)]
        sbt: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rule-based predictions for a dataset.
    Baseline {
        #[arg(long, required = true)]
        dataset: PathBuf,
        #[arg(long, required = true)]
        out: PathBuf,
        /// train, valid, test or all.
        #[arg(long, default_value = "all")]
        split: String,
    },
    /// Score predictions against a dataset.
    Evaluate {
        #[arg(long, required = true)]
        dataset: PathBuf,
        #[arg(long, required = true)]
        predictions: PathBuf,
        #[arg(long, default_value_t = eval::DEFAULT_TOLERANCE)]
        tolerance: usize,
        /// train, valid, test or all.
        #[arg(long, default_value = "test")]
        split: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-example scores as JSON Lines.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Score a predictor on the 11 benchmark programs.
    Bench {
        /// baseline, oracle, empty, or a command run as `CMD DATASET PREDICTIONS`.
        #[arg(long, default_value = "baseline")]
        predictor: String,
        #[arg(long, default_value_t = eval::DEFAULT_TOLERANCE)]
        tolerance: usize,
        #[arg(long)]
        mpicc_path: Option<PathBuf>,
        #[arg(long)]
        mpirun_path: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        nranks: usize,
        #[arg(long)]
        skip_execution: bool,
        /// Per-run limit in seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        /// CSV report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full report including execution results.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Validate every example of a dataset file.
    Check {
        #[arg(long, required = true)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 320)]
        token_limit: usize,
    },
}

fn parse_ratios(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split([',', ':'])
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] if parts.iter().all(|v| v.is_finite() && *v >= 0.0) && a + b + c > 0.0 => Ok([a, b, c]),
        _ => Err("expected three non-negative shares".into()),
    }
}

fn parse_split(s: &str) -> anyhow::Result<Option<Split>> {
    if s == "all" {
        return Ok(None);
    }
    s.parse::<Split>().map(Some).map_err(|_| anyhow::anyhow!("unknown split {s:?}"))
}

/// Marks `out` as in use for the lifetime of the guard.
struct Lock(PathBuf);

impl Lock {
    fn acquire(out: &Path) -> anyhow::Result<Lock> {
        let name = out.as_os_str().to_string_lossy();
        let path = PathBuf::from(format!("{}.lock", name.trim_end_matches('/')));
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Lock(path))
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                bail!("{} is locked by another run (remove {} if stale)", out.display(), path.display())
            }
            Err(e) => Err(e).with_context(|| format!("creating {}", path.display())),
        }
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn read_unit(path: &Path) -> anyhow::Result<SourceUnit> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = cst::decode(&bytes).with_context(|| path.display().to_string())?;
    Ok(SourceUnit::new(path.display().to_string(), text))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let pretty = cli.pretty;
    match cli.command {
        Cmd::Repos { query, out, max_pages, api_url } => {
            let token = std::env::var(github::TOKEN_ENV)
                .with_context(|| format!("{} is not set", github::TOKEN_ENV))?;
            let opts = SearchOptions { base_url: api_url, max_pages, ..SearchOptions::default() };
            let _lock = out.as_deref().map(Lock::acquire).transpose()?;
            let urls = corpus::fetch_repo_list(&query, &token, &opts)?;
            let mut text = urls.join("\n");
            if !text.is_empty() {
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
            log::info!("{} repositories", urls.len());
        }
        Cmd::Build { root, out, token_limit, seed, ratios, clone_command } => {
            let _lock = Lock::acquire(&out)?;
            let config = CorpusConfig { token_limit, seed, ratios };
            let mut built = corpus::build_from_dir(&root, &config)?;
            built.manifest.clone_command = clone_command;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            corpus::write_dataset(&out.join("dataset.jsonl"), &built.examples)?;
            corpus::write_manifest(&out.join("manifest.json"), &built.manifest)?;
            corpus::write_jsonl(&out.join("reports.jsonl"), &built.reports)?;
            if pretty {
                let m = &built.manifest;
                println!("files      {}", m.total_files);
                for (reason, n) in &m.reasons {
                    println!("  {reason:<20} {n}");
                }
                for (split, n) in &m.splits {
                    println!("{split:<10} {n}");
                }
            }
        }
        Cmd::Stats { root, out } => {
            let _lock = Lock::acquire(&out)?;
            let mut units = Vec::new();
            for unit in corpus::scan(&root)? {
                match unit {
                    Ok(u) => units.push(u),
                    Err(e) => log::warn!("{e}"),
                }
            }
            let s = stats::compute(&units);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            fs::write(out.join("function_counts.csv"), stats::function_counts_csv(&s.function_counts))?;
            fs::write(out.join("code_lengths.csv"), stats::length_csv(&s.length_histogram))?;
            fs::write(out.join("init_finalize_ratio.dat"), stats::ratio_dat(&s.ratio_histogram))?;
            fs::write(out.join("stats.json"), json(&s))?;
            if pretty {
                print!("{}", stats::length_csv(&s.length_histogram));
                print!("{}", stats::ratio_dat(&s.ratio_histogram));
            }
        }
        Cmd::Prune { file, out } => {
            let unit = read_unit(&file)?;
            let r = mpiedit::prune(&unit)?;
            let text = if pretty {
                let mut t = r.pruned_text.clone();
                for rc in &r.removed {
                    t.push_str(&format!("// removed line {}: {}\n", rc.call.line, rc.statement));
                }
                t
            } else {
                json(&serde_json::json!({ "pruned_code": r.pruned_text, "removed": r.removed }))
            };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Xsbt { file, sbt, out } => {
            let unit = read_unit(&file)?;
            let ast = cst::parse(&unit.text)?;
            let seq = if sbt { linearizer::sbt(&ast) } else { linearizer::xsbt(&ast) };
            let text = if pretty { seq.join(" ") + "\n" } else { serde_json::to_string(&seq)? + "\n" };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Baseline { dataset, out, split } => {
            let split = parse_split(&split)?;
            let _lock = Lock::acquire(&out)?;
            let examples = corpus::read_dataset(&dataset)?;
            let mut records = Vec::new();
            let mut failed = 0;
            for e in examples.iter().filter(|e| split.is_none_or(|s| e.split == s)) {
                let predicted_code = predictor::baseline_predict(&e.input_code).unwrap_or_else(|err| {
                    log::warn!("{}: {err}", e.id);
                    failed += 1;
                    e.input_code.clone()
                });
                records.push(PredictionRecord { id: e.id.clone(), predicted_code });
            }
            predictor::write_predictions(&out, &records)?;
            log::info!("{} predictions, {failed} fell back to the input", records.len());
        }
        Cmd::Evaluate { dataset, predictions, tolerance, split, out, scores } => {
            let split = parse_split(&split)?;
            let _lock = out.as_deref().map(Lock::acquire).transpose()?;
            let (report, per_example) = eval::evaluate(&dataset, &predictions, split, tolerance)?;
            if let Some(p) = &scores {
                corpus::write_jsonl(p, &per_example)?;
            }
            if pretty {
                print!("{}", report.table());
                if let Some(p) = &out {
                    fs::write(p, json(&report)).with_context(|| format!("writing {}", p.display()))?;
                }
            } else {
                emit(out.as_deref(), &json(&report))?;
            }
        }
        Cmd::Bench { predictor, tolerance, mpicc_path, mpirun_path, nranks, skip_execution, timeout, out, json: json_out } => {
            let predictor: BenchPredictor = predictor.parse().map_err(anyhow::Error::msg)?;
            let _lock = out.as_deref().map(Lock::acquire).transpose()?;
            let mut report = bench::run_benchmark(&predictor, tolerance);
            if !skip_execution {
                match Toolchain::detect(mpicc_path.as_deref(), mpirun_path.as_deref()) {
                    Ok(mut tc) => {
                        tc.timeout = Duration::from_secs(timeout);
                        bench::execute_predictions(&mut report, &tc, nranks);
                    }
                    Err(e) => log::warn!("skipping execution: {e}"),
                }
            }
            for row in report.rows.iter().filter(|r| r.error.is_some()) {
                log::warn!("{}: {}", row.name, row.error.as_deref().unwrap_or_default());
            }
            if let Some(p) = &json_out {
                fs::write(p, json(&report)).with_context(|| format!("writing {}", p.display()))?;
            }
            if pretty {
                print!("{}", report.table());
                if let Some(p) = &out {
                    fs::write(p, report.csv()).with_context(|| format!("writing {}", p.display()))?;
                }
            } else {
                emit(out.as_deref(), &report.csv())?;
            }
        }
        Cmd::Check { dataset, token_limit } => {
            let examples = corpus::read_dataset(&dataset)?;
            let violations = corpus::check_dataset(&examples, token_limit);
            for v in &violations {
                if pretty {
                    println!("line {} ({}): {}", v.line, v.id, v.problem);
                } else {
                    println!("{}", serde_json::to_string(v)?);
                }
            }
            if !violations.is_empty() {
                eprintln!("{} violations in {} examples", violations.len(), examples.len());
                return Ok(ExitCode::from(1));
            }
            log::info!("{} examples valid", examples.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse(args: Vec<OsString>) -> Result<Cli, ExitCode> {
    let mut cmd = Cli::command();
    if let (Some(path), Some(sub)) = (config::config_path(&args), config::subcommand_name(&cmd, &args)) {
        let entries = config::load(&path).and_then(|t| config::entries(&t, &sub));
        match entries {
            Ok(entries) => {
                let (c, unknown) = config::apply(cmd, &sub, &entries);
                cmd = c;
                for key in unknown {
                    eprintln!("warning: config key {key:?} does not apply to {sub}");
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                return Err(ExitCode::from(2));
            }
        }
    }
    cmd.try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
        .map_err(|e| {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        })
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
