//! The numerical-computation benchmark: eleven small MPI programs, their
//! serial twins, expected outputs and an optional compile-and-run check.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, DatasetExample, Split};
use crate::eval::{self, prf_from_counts, Counts, Prf};
use crate::mpiedit::{self, CallSite};
use crate::predictor::{self, PredictionRecord};
use crate::cst::SourceUnit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectedOutput {
    /// Every number printed, in order, each within `tol * max(1, |v|)`.
    Values { values: Vec<f64>, tol: f64 },
    /// Exactly `len` numbers printed in non-decreasing order.
    Sorted { len: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchProgram {
    pub name: &'static str,
    /// Row label in the results table.
    pub title: &'static str,
    pub label_code: &'static str,
    pub serial_code: &'static str,
    pub gold_calls: Vec<CallSite>,
    pub expected: ExpectedOutput,
}

macro_rules! sources {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../bench/", $name, ".c")), include_str!(concat!("../bench/", $name, "_serial.c")))),*]
    };
}

const SOURCES: &[(&str, &str, &str)] = sources!(
    "array_average",
    "vector_dot_product",
    "min_max",
    "matrix_vector_multiplication",
    "sum_reduce_gather",
    "merge_sort",
    "pi_monte_carlo",
    "pi_riemann_sum",
    "factorial",
    "fibonacci",
    "trapezoidal_rule",
);

fn spec(name: &str) -> (&'static str, ExpectedOutput) {
    use std::f64::consts::PI;
    let values = |values: Vec<f64>, tol: f64| ExpectedOutput::Values { values, tol };
    match name {
        "array_average" => ("Array Average", values(vec![250.75], 1e-6)),
        "vector_dot_product" => ("Vector Dot Product", values(vec![-44775.25], 1e-6)),
        "min_max" => ("Min-Max", values(vec![-50.0, 50.0], 1e-6)),
        "matrix_vector_multiplication" => {
            ("Matrix-Vector Multiplication", values((0..8).map(|i| 36.0 * i as f64 + 336.0).collect(), 1e-6))
        }
        "sum_reduce_gather" => ("Sum (Reduce & Gather)", values(vec![50005000.0, 50005000.0], 1e-6)),
        "merge_sort" => ("Merge Sort", ExpectedOutput::Sorted { len: 64 }),
        "pi_monte_carlo" => ("Pi Monte-Carlo", values(vec![PI], 1e-2)),
        "pi_riemann_sum" => ("Pi Riemann Sum", values(vec![PI], 1e-6)),
        "factorial" => ("Factorial", values(vec![20.0, 2432902008176640000.0], 1e-6)),
        "fibonacci" => ("Fibonacci", values(vec![40.0, 165580140.0], 1e-6)),
        "trapezoidal_rule" => ("Trapezoidal Rule (Integration)", values(vec![9.0], 1e-6)),
        _ => unreachable!("no expected output for {name}"),
    }
}

/// The eleven programs in results-table order.
pub fn programs() -> Vec<BenchProgram> {
    SOURCES
        .iter()
        .map(|&(name, label_code, serial_code)| {
            let (title, expected) = spec(name);
            BenchProgram {
                name,
                title,
                label_code,
                serial_code,
                gold_calls: mpiedit::sites(&mpiedit::extract_calls_lexical(label_code)),
                expected,
            }
        })
        .collect()
}

pub fn program(name: &str) -> Option<BenchProgram> {
    programs().into_iter().find(|p| p.name == name)
}

impl BenchProgram {
    /// The program as a dataset example, with MPI calls pruned from the
    /// input. Fails if the label cannot be pruned.
    pub fn example(&self) -> Result<DatasetExample, mpiedit::MpiEditError> {
        let unit = SourceUnit::new(format!("{}.c", self.name), self.label_code);
        let pruned = mpiedit::prune(&unit)?;
        let input_xsbt = crate::cst::parse(&pruned.pruned_text).map(|a| crate::linearizer::xsbt_text(&a)).unwrap_or_default();
        Ok(DatasetExample {
            id: self.name.to_string(),
            input_code: pruned.pruned_text,
            input_xsbt,
            label_code: self.label_code.to_string(),
            gold_calls: self.gold_calls.clone(),
            split: Split::Test,
        })
    }
}

/// Numbers appearing in program output, in order.
pub fn numbers_in(text: &str) -> Vec<f64> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let neg = b[i] == b'-' && b.get(i + 1).is_some_and(u8::is_ascii_digit);
        if !(b[i].is_ascii_digit() || neg) {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
            i += 1;
        }
        if i + 1 < b.len() && (b[i] == b'e' || b[i] == b'E') && (b[i + 1].is_ascii_digit() || b[i + 1] == b'-' || b[i + 1] == b'+') {
            i += 2;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        }
        if let Ok(v) = text[start..i].trim_end_matches('.').parse() {
            out.push(v);
        }
    }
    out
}

impl ExpectedOutput {
    pub fn check(&self, stdout: &str) -> Result<(), String> {
        let got = numbers_in(stdout);
        match self {
            ExpectedOutput::Values { values, tol } => {
                if got.len() != values.len() {
                    return Err(format!("expected {} numbers, got {}", values.len(), got.len()));
                }
                for (g, e) in got.iter().zip(values) {
                    if (g - e).abs() > tol * e.abs().max(1.0) {
                        return Err(format!("got {g}, expected {e} within {tol}"));
                    }
                }
                Ok(())
            }
            ExpectedOutput::Sorted { len } => {
                if got.len() != *len {
                    return Err(format!("expected {len} numbers, got {}", got.len()));
                }
                match got.windows(2).position(|w| w[0] > w[1]) {
                    Some(i) => Err(format!("not sorted at position {}", i + 1)),
                    None => Ok(()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchPredictor {
    Baseline,
    /// Echoes the label.
    Oracle,
    /// Echoes the pruned input.
    Empty,
    /// External program run as `cmd... <dataset.jsonl> <predictions.jsonl>`.
    Command(Vec<String>),
}

impl std::str::FromStr for BenchPredictor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "baseline" => Ok(BenchPredictor::Baseline),
            "oracle" => Ok(BenchPredictor::Oracle),
            "empty" => Ok(BenchPredictor::Empty),
            cmd => {
                let parts: Vec<String> = cmd.split_whitespace().map(String::from).collect();
                if parts.is_empty() {
                    Err("empty predictor command".into())
                } else {
                    Ok(BenchPredictor::Command(parts))
                }
            }
        }
    }
}

impl BenchPredictor {
    pub fn predict(&self, example: &DatasetExample) -> Result<String, String> {
        match self {
            BenchPredictor::Baseline => predictor::baseline_predict(&example.input_code).map_err(|e| e.to_string()),
            BenchPredictor::Oracle => Ok(example.label_code.clone()),
            BenchPredictor::Empty => Ok(example.input_code.clone()),
            BenchPredictor::Command(cmd) => run_command_predictor(cmd, example),
        }
    }
}

fn run_command_predictor(cmd: &[String], example: &DatasetExample) -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dataset = dir.path().join("dataset.jsonl");
    let out = dir.path().join("predictions.jsonl");
    corpus::write_dataset(&dataset, std::slice::from_ref(example)).map_err(|e| e.to_string())?;
    let status = Command::new(&cmd[0])
        .args(&cmd[1..])
        .arg(&dataset)
        .arg(&out)
        .stdin(Stdio::null())
        .status()
        .map_err(|e| format!("could not start {}: {e}", cmd[0]))?;
    if !status.success() {
        return Err(format!("predictor exited with {status}"));
    }
    let records = predictor::read_predictions(&out).map_err(|e| e.to_string())?;
    records
        .into_iter()
        .find(|r| r.id == example.id)
        .map(|r| r.predicted_code)
        .ok_or_else(|| format!("predictor wrote no prediction for {}", example.id))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub title: String,
    pub counts: Counts,
    pub core_counts: Counts,
    pub m: Prf,
    pub mcc: Prf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Whether the predicted program ran and printed the right answer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_detail: Option<String>,
    #[serde(skip)]
    pub prediction: Option<PredictionRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Totals {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub tolerance: usize,
    pub rows: Vec<BenchRow>,
    /// Row means.
    pub total_m: Totals,
    pub total_mcc: Totals,
    /// Micro-averaged over all calls in the suite.
    pub micro_m: Prf,
    pub micro_mcc: Prf,
}

/// Prunes each label, asks `predictor` for the full program and scores it.
/// A predictor failure scores that row as if nothing was predicted.
pub fn run_benchmark(predictor: &BenchPredictor, tolerance: usize) -> BenchReport {
    let rows: Vec<BenchRow> = programs().iter().map(|p| score_program(p, predictor, tolerance)).collect();
    let mean = |f: &dyn Fn(&BenchRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len().max(1) as f64;
    let total_m = Totals { f1: mean(&|r| r.m.f1), precision: mean(&|r| r.m.precision), recall: mean(&|r| r.m.recall) };
    let total_mcc =
        Totals { f1: mean(&|r| r.mcc.f1), precision: mean(&|r| r.mcc.precision), recall: mean(&|r| r.mcc.recall) };
    let micro_m = prf_from_counts(rows.iter().map(|r| r.counts).sum());
    let micro_mcc = prf_from_counts(rows.iter().map(|r| r.core_counts).sum());
    BenchReport { tolerance, rows, total_m, total_mcc, micro_m, micro_mcc }
}

fn score_program(p: &BenchProgram, predictor: &BenchPredictor, tolerance: usize) -> BenchRow {
    let (example, error) = match p.example() {
        Ok(ex) => (ex, None),
        Err(e) => {
            let ex = DatasetExample {
                id: p.name.to_string(),
                input_code: String::new(),
                input_xsbt: String::new(),
                label_code: p.label_code.to_string(),
                gold_calls: p.gold_calls.clone(),
                split: Split::Test,
            };
            (ex, Some(format!("could not prune label: {e}")))
        }
    };
    let (predicted, error) = match error {
        Some(e) => (String::new(), Some(e)),
        None => match predictor.predict(&example) {
            Ok(code) => (code, None),
            Err(e) => {
                log::warn!("{}: {e}", p.name);
                (example.input_code.clone(), Some(e))
            }
        },
    };
    let s = eval::score_example(p.name, &predicted, p.label_code, &p.gold_calls, tolerance);
    let counts = Counts { tp: s.tp, fp: s.fp, fn_: s.fn_ };
    let core_counts = Counts { tp: s.core_tp, fp: s.core_fp, fn_: s.core_fn };
    BenchRow {
        name: p.name.to_string(),
        title: p.title.to_string(),
        counts,
        core_counts,
        m: prf_from_counts(counts),
        mcc: prf_from_counts(core_counts),
        valid: None,
        run_detail: None,
        prediction: error.is_none().then(|| PredictionRecord { id: p.name.to_string(), predicted_code: predicted }),
        error,
    }
}

impl BenchReport {
    /// Columns: code, M-F1, M-Precision, M-Recall, plus a totals line.
    pub fn csv(&self) -> String {
        let mut s = String::from("code,m_f1,m_precision,m_recall\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.4},{:.4},{:.4}\n", r.name, r.m.f1, r.m.precision, r.m.recall));
        }
        s.push_str(&format!("total,{:.4},{:.4},{:.4}\n", self.total_m.f1, self.total_m.precision, self.total_m.recall));
        s
    }

    pub fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.title.len()).max().unwrap_or(5).max(5);
        let mut s = format!("{:<w$}  {:>6}  {:>11}  {:>8}  {:>6}  {:>6}  {:>6}\n", "Code", "M-F1", "M-Precision", "M-Recall", "MCC-F1", "MCC-P", "MCC-R");
        let line = |name: &str, m: (f64, f64, f64), c: (f64, f64, f64)| {
            format!("{name:<w$}  {:>6.2}  {:>11.2}  {:>8.2}  {:>6.2}  {:>6.2}  {:>6.2}\n", m.0, m.1, m.2, c.0, c.1, c.2)
        };
        for r in &self.rows {
            s.push_str(&line(&r.title, (r.m.f1, r.m.precision, r.m.recall), (r.mcc.f1, r.mcc.precision, r.mcc.recall)));
            if let Some(e) = &r.error {
                s.push_str(&format!("  error: {e}\n"));
            }
        }
        let (m, c) = (self.total_m, self.total_mcc);
        s.push_str(&line("Total", (m.f1, m.precision, m.recall), (c.f1, c.precision, c.recall)));
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("MPI toolchain not found: {0}")]
    ToolchainMissing(String),
    #[error("compilation failed:\n{0}")]
    CompileError(String),
    #[error("program exited with code {code:?}:\n{stderr}")]
    RunError { code: Option<i32>, stderr: String },
    #[error("program did not finish within {0:?}")]
    Timeout(Duration),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub struct Built {
    dir: tempfile::TempDir,
    bin: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Toolchain {
    pub mpicc: PathBuf,
    pub mpirun: PathBuf,
    pub open_mpi: bool,
    pub timeout: Duration,
}

fn find_on_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| p.is_file())
}

impl Toolchain {
    /// Uses the given paths or looks `mpicc` and `mpirun` up on PATH.
    pub fn detect(mpicc: Option<&Path>, mpirun: Option<&Path>) -> Result<Toolchain, ExecError> {
        let mpicc = match mpicc {
            Some(p) => p.to_path_buf(),
            None => find_on_path("mpicc").ok_or_else(|| ExecError::ToolchainMissing("mpicc not on PATH".into()))?,
        };
        let mpirun = match mpirun {
            Some(p) => p.to_path_buf(),
            None => find_on_path("mpirun")
                .or_else(|| find_on_path("mpiexec"))
                .ok_or_else(|| ExecError::ToolchainMissing("mpirun not on PATH".into()))?,
        };
        for p in [&mpicc, &mpirun] {
            if !p.is_file() {
                return Err(ExecError::ToolchainMissing(format!("{} does not exist", p.display())));
            }
        }
        let open_mpi = Command::new(&mpirun)
            .arg("--version")
            .output()
            .map(|o| {
                let text = String::from_utf8_lossy(&o.stdout).to_string() + &String::from_utf8_lossy(&o.stderr);
                text.contains("Open MPI") || text.contains("OpenRTE")
            })
            .unwrap_or(false);
        Ok(Toolchain { mpicc, mpirun, open_mpi, timeout: Duration::from_secs(60) })
    }

    /// Compiles `program_text` into a temporary directory.
    pub fn build(&self, program_text: &str) -> Result<Built, ExecError> {
        let dir = tempfile::tempdir()?;
        let src = dir.path().join("prog.c");
        let bin = dir.path().join("prog");
        fs::write(&src, program_text)?;
        let out = Command::new(&self.mpicc).arg("-O2").arg("-o").arg(&bin).arg(&src).arg("-lm").output()?;
        if !out.status.success() {
            return Err(ExecError::CompileError(String::from_utf8_lossy(&out.stderr).into_owned()));
        }
        Ok(Built { dir, bin })
    }

    /// Runs a built program on `nranks` processes; returns standard output.
    pub fn launch(&self, built: &Built, nranks: usize) -> Result<String, ExecError> {
        let mut cmd = Command::new(&self.mpirun);
        if self.open_mpi {
            cmd.arg("--oversubscribe").env("OMPI_ALLOW_RUN_AS_ROOT", "1").env("OMPI_ALLOW_RUN_AS_ROOT_CONFIRM", "1");
        }
        cmd.arg("-np").arg(nranks.to_string()).arg(&built.bin);
        self.run(cmd, built.dir.path())
    }

    pub fn compile_and_run(&self, program_text: &str, nranks: usize) -> Result<String, ExecError> {
        let built = self.build(program_text)?;
        self.launch(&built, nranks)
    }

    /// Compiles and runs a program without the launcher.
    pub fn compile_and_run_serial(&self, program_text: &str) -> Result<String, ExecError> {
        let built = self.build(program_text)?;
        self.run(Command::new(&built.bin), built.dir.path())
    }

    fn run(&self, mut cmd: Command, dir: &Path) -> Result<String, ExecError> {
        let out_path = dir.join("stdout");
        let err_path = dir.join("stderr");
        let mut child = cmd
            .current_dir(dir)
            .stdin(Stdio::null())
            .stdout(fs::File::create(&out_path)?)
            .stderr(fs::File::create(&err_path)?)
            .spawn()?;
        let start = Instant::now();
        let status = loop {
            if let Some(s) = child.try_wait()? {
                break s;
            }
            if start.elapsed() > self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(ExecError::Timeout(self.timeout));
            }
            std::thread::sleep(Duration::from_millis(20));
        };
        if !status.success() {
            let stderr = fs::read_to_string(&err_path).unwrap_or_default();
            return Err(ExecError::RunError { code: status.code(), stderr });
        }
        Ok(fs::read_to_string(&out_path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunCheck {
    pub name: String,
    pub nranks: usize,
    pub ok: bool,
    pub detail: String,
}

/// Builds `text` once, runs it at each rank count and checks the output
/// against `expected`.
pub fn validate(tc: &Toolchain, name: &str, text: &str, expected: &ExpectedOutput, ranks: &[usize]) -> Vec<RunCheck> {
    let check = |nranks: usize, result: Result<String, ExecError>| {
        let (ok, detail) = match result.map(|out| expected.check(&out).map(|_| out)) {
            Ok(Ok(out)) => (true, out.lines().last().unwrap_or("").to_string()),
            Ok(Err(e)) => (false, e),
            Err(e) => (false, e.to_string()),
        };
        RunCheck { name: name.to_string(), nranks, ok, detail }
    };
    match tc.build(text) {
        Ok(built) => ranks.iter().map(|&n| check(n, tc.launch(&built, n))).collect(),
        Err(e) => {
            let msg = e.to_string();
            ranks.iter().map(|&n| check(n, Err(ExecError::CompileError(msg.clone())))).collect()
        }
    }
}

/// Compiles and runs every successful prediction in `report` and records
/// whether its output is correct.
pub fn execute_predictions(report: &mut BenchReport, tc: &Toolchain, nranks: usize) {
    for row in &mut report.rows {
        let Some(pred) = &row.prediction else { continue };
        let Some(p) = program(&row.name) else { continue };
        let check = validate(tc, &row.name, &pred.predicted_code, &p.expected, &[nranks]).remove(0);
        row.valid = Some(check.ok);
        row.run_detail = Some(check.detail);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cst;

    #[test]
    fn eleven_programs_in_table_order() {
        let names: Vec<&str> = programs().iter().map(|p| p.name).collect();
        assert_eq!(names.len(), 11);
        assert_eq!(names[0], "array_average");
        assert_eq!(names[10], "trapezoidal_rule");
    }

    #[test]
    fn labels_are_admissible() {
        let cfg = corpus::CorpusConfig::default();
        for p in programs() {
            assert_eq!(cst::standardize(p.label_code).unwrap(), p.label_code, "{}", p.name);
            assert_eq!(cst::standardize(p.serial_code).unwrap(), p.serial_code, "{}", p.name);
            let unit = SourceUnit::new(p.name, p.label_code);
            assert!(corpus::screen(&unit, &cfg).is_ok(), "{}", p.name);
            assert!(!mpiedit::mentions_mpi_call(p.serial_code, mpiedit::MpiInventory::standard()));
            let k = p.gold_calls.len();
            assert!((5..=7).contains(&k), "{}: {k} calls", p.name);
        }
    }

    #[test]
    fn number_scanning() {
        assert_eq!(numbers_in("20! = 2432902008176640000\n"), vec![20.0, 2432902008176640000.0]);
        assert_eq!(numbers_in("min = -50 max = 50"), vec![-50.0, 50.0]);
        assert_eq!(numbers_in("x-1 1.5e-3 pi."), vec![-1.0, 1.5e-3]);
        assert_eq!(numbers_in("rank-count"), Vec::<f64>::new());
    }

    #[test]
    fn output_checks() {
        let pi = ExpectedOutput::Values { values: vec![std::f64::consts::PI], tol: 1e-6 };
        assert!(pi.check("pi = 3.141592653590\n").is_ok());
        assert!(pi.check("pi = 3.1416\n").is_err());
        assert!(pi.check("").is_err());
        let sorted = ExpectedOutput::Sorted { len: 3 };
        assert!(sorted.check("1\n2\n2\n").is_ok());
        assert!(sorted.check("1\n3\n2\n").is_err());
        assert!(sorted.check("1\n2\n").is_err());
    }

    #[test]
    fn expected_values_from_first_principles() {
        let avg = (0..1000).map(|i| 0.5 * i as f64 + 1.0).sum::<f64>() / 1000.0;
        let dot: f64 = (0..600).map(|i| 0.25 * i as f64 * (3.0 - 0.01 * i as f64)).sum();
        let vals: Vec<i64> = (0..500).map(|i| (i * 37 + 11) % 101 - 50).collect();
        let y: Vec<f64> = (0..8).map(|i| (0..8).map(|j| (i as f64 + 2.0 * j as f64) * (j as f64 + 1.0)).sum()).collect();
        let fact: f64 = (1..=20).map(|i| i as f64).product();
        let mut fib = (0i64, 1i64);
        let mut fib_sum = 0;
        for _ in 0..40 {
            fib_sum += fib.0;
            fib = (fib.1, fib.0 + fib.1);
        }
        let want: Vec<(&str, Vec<f64>)> = vec![
            ("array_average", vec![avg]),
            ("vector_dot_product", vec![dot]),
            ("min_max", vec![*vals.iter().min().unwrap() as f64, *vals.iter().max().unwrap() as f64]),
            ("matrix_vector_multiplication", y),
            ("sum_reduce_gather", vec![(10000 * 10001 / 2) as f64; 2]),
            ("factorial", vec![20.0, fact]),
            ("fibonacci", vec![40.0, fib_sum as f64]),
            ("trapezoidal_rule", vec![9.0]),
        ];
        for (name, values) in want {
            match program(name).unwrap().expected {
                ExpectedOutput::Values { values: v, .. } => {
                    assert_eq!(v.len(), values.len(), "{name}");
                    for (a, b) in v.iter().zip(&values) {
                        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{name}: {a} vs {b}");
                    }
                }
                other => panic!("{name}: {other:?}"),
            }
        }
    }

    #[test]
    fn oracle_and_empty_predictors() {
        let oracle = run_benchmark(&BenchPredictor::Oracle, 1);
        for r in &oracle.rows {
            assert_eq!((r.m.precision, r.m.recall, r.m.f1), (1.0, 1.0, 1.0), "{}", r.name);
        }
        let empty = run_benchmark(&BenchPredictor::Empty, 1);
        assert!(empty.rows.iter().all(|r| r.m.recall == 0.0));
    }

    #[test]
    fn failing_command_predictor_does_not_abort() {
        let report = run_benchmark(&BenchPredictor::Command(vec!["false".into()]), 1);
        assert_eq!(report.rows.len(), 11);
        assert!(report.rows.iter().all(|r| r.error.is_some() && r.m.recall == 0.0));
    }

    #[test]
    fn csv_shape() {
        let csv = run_benchmark(&BenchPredictor::Oracle, 1).csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "code,m_f1,m_precision,m_recall");
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[12], "total,1.0000,1.0000,1.0000");
    }
}
