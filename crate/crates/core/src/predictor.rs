//! Prediction exchange format and a rule-based baseline predictor.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusError};
use crate::cst::{self, AstNode, CstError, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub predicted_code: String,
}

#[derive(Debug, thiserror::Error)]
pub enum PredictError {
    #[error("no function named main")]
    NoMain,
    #[error(transparent)]
    Parse(#[from] CstError),
}

#[derive(Debug, thiserror::Error)]
pub enum PredictionFileError {
    #[error("{0}")]
    Io(CorpusError),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: String },
}

fn main_function(ast: &AstNode) -> Option<&AstNode> {
    ast.children
        .iter()
        .find(|c| c.kind == NodeKind::FunctionDefinition && c.function_name() == Some("main"))
}

fn main_has_params(main: &AstNode) -> bool {
    let mut list = None;
    for c in main.children.iter().take(main.children.len().saturating_sub(1)) {
        c.walk(&mut |n, _| {
            if list.is_none() && n.kind == NodeKind::ParameterList {
                list = Some(n);
            }
        });
    }
    list.is_some_and(|l| l.children.iter().any(|p| p.children.len() >= 2 || p.is_other("ellipsis")))
}

/// Inserts the MPI Common Core skeleton into `input_code`: setup calls at
/// the top of `main` and `MPI_Finalize` before every return from it and at
/// its end when control can fall off. The result is standardized.
pub fn baseline_predict(input_code: &str) -> Result<String, PredictError> {
    let text = cst::standardize(input_code)?;
    let ast = cst::parse(&text)?;
    let main = main_function(&ast).ok_or(PredictError::NoMain)?;
    let body = main.function_body().ok_or(PredictError::NoMain)?;
    let init_args = if main_has_params(main) { "&argc, &argv" } else { "NULL, NULL" };

    let mut returns = Vec::new();
    body.walk(&mut |n, _| {
        if n.kind == NodeKind::ReturnStatement {
            returns.push(n.span.start_line);
        }
    });
    let falls_through = body.children.last().is_none_or(|s| s.kind != NodeKind::ReturnStatement);

    // Line numbers are 1-based; inserts[i] goes before original line i + 1.
    let lines: Vec<&str> = text.lines().collect();
    let mut before: Vec<Vec<String>> = vec![Vec::new(); lines.len() + 1];
    let open = body.span.start_line;
    before[open].extend(
        [
            "int mpi_rank;".to_string(),
            "int mpi_size;".to_string(),
            format!("MPI_Init({init_args});"),
            "MPI_Comm_rank(MPI_COMM_WORLD, &mpi_rank);".to_string(),
            "MPI_Comm_size(MPI_COMM_WORLD, &mpi_size);".to_string(),
        ],
    );
    for r in returns {
        before[r - 1].push("MPI_Finalize();".to_string());
    }
    if falls_through {
        before[body.span.end_line - 1].push("MPI_Finalize();".to_string());
    }
    let mut out = String::new();
    for (i, line) in lines.iter().enumerate() {
        for ins in &before[i] {
            out.push_str(ins);
            out.push('\n');
        }
        out.push_str(line);
        out.push('\n');
    }
    Ok(cst::standardize(&out)?)
}

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<(), PredictionFileError> {
    corpus::write_jsonl(path, records).map_err(PredictionFileError::Io)
}

/// Reads a predictions file. Unknown fields are ignored; ids must be
/// non-empty and unique.
pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, PredictionFileError> {
    let raw: Vec<serde_json::Value> = corpus::read_jsonl(path).map_err(|e| match e {
        CorpusError::Format { line, message } => PredictionFileError::Format { line, message },
        other => PredictionFileError::Io(other),
    })?;
    // Blank lines are skipped by the reader, so recover physical line numbers.
    let text = std::fs::read_to_string(path).map_err(|e| PredictionFileError::Io(CorpusError::io(path, e)))?;
    let line_numbers: Vec<usize> =
        text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, _)| i + 1).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (value, line) in raw.into_iter().zip(line_numbers) {
        let rec: PredictionRecord = serde_json::from_value(value)
            .map_err(|e| PredictionFileError::Format { line, message: e.to_string() })?;
        if rec.id.is_empty() {
            return Err(PredictionFileError::Format { line, message: "empty id".into() });
        }
        if !seen.insert(rec.id.clone()) {
            return Err(PredictionFileError::DuplicateId { line, id: rec.id });
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpiedit::{extract_calls_lexical, is_core, sites, CallSite};

    fn names(text: &str) -> Vec<String> {
        extract_calls_lexical(text).into_iter().map(|c| c.name).collect()
    }

    #[test]
    fn minimal_main() {
        let out = baseline_predict("int main(int argc, char **argv) { return 0; }").unwrap();
        let expected = "int main(int argc, char **argv)\n{\n    int mpi_rank;\n    int mpi_size;\n    MPI_Init(&argc, &argv);\n    MPI_Comm_rank(MPI_COMM_WORLD, &mpi_rank);\n    MPI_Comm_size(MPI_COMM_WORLD, &mpi_size);\n    MPI_Finalize();\n    return 0;\n}\n";
        assert_eq!(out, expected);
        assert_eq!(
            sites(&extract_calls_lexical(&out)),
            vec![
                CallSite::new("MPI_Init", 5),
                CallSite::new("MPI_Comm_rank", 6),
                CallSite::new("MPI_Comm_size", 7),
                CallSite::new("MPI_Finalize", 8),
            ]
        );
    }

    #[test]
    fn two_returns() {
        let src = "int main(int argc, char **argv) { if (argc > 1) return 1; return 0; }";
        let out = baseline_predict(src).unwrap();
        assert_eq!(names(&out).len(), 5);
        assert_eq!(names(&out).iter().filter(|n| *n == "MPI_Finalize").count(), 2);
        assert!(out.contains("    {\n        MPI_Finalize();\n        return 1;\n    }\n"));
    }

    #[test]
    fn fall_through_and_no_params() {
        let out = baseline_predict("void f(int a) { }\nint main(void) { f(1); }").unwrap();
        assert!(out.contains("MPI_Init(NULL, NULL);"));
        assert!(out.ends_with("    f(1);\n    MPI_Finalize();\n}\n"));
        let out = baseline_predict("int main() { }").unwrap();
        assert_eq!(names(&out), vec!["MPI_Init", "MPI_Comm_rank", "MPI_Comm_size", "MPI_Finalize"]);
    }

    #[test]
    fn only_core_names_and_parses() {
        let src = "#include <stdio.h>\nint sq(int x) { return x * x; }\nint main(int argc, char **argv) { for (int i = 0; i < 3; i++) { if (i == 2) { return sq(i); } } printf(\"done\\n\"); }";
        let out = baseline_predict(src).unwrap();
        assert!(cst::parse(&out).is_ok());
        assert!(names(&out).iter().all(|n| is_core(n)));
        assert_eq!(names(&out).len(), 5);
    }

    #[test]
    fn errors() {
        assert!(matches!(baseline_predict("int f(void) { return 0; }"), Err(PredictError::NoMain)));
        assert!(matches!(baseline_predict("int main() {"), Err(PredictError::Parse(_))));
    }

    #[test]
    fn prediction_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        let recs: Vec<PredictionRecord> = (0..3)
            .map(|i| PredictionRecord { id: format!("id{i}"), predicted_code: format!("int x{i};\n") })
            .collect();
        write_predictions(&path, &recs).unwrap();
        assert_eq!(read_predictions(&path).unwrap(), recs);
    }

    #[test]
    fn prediction_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        std::fs::write(&path, "{\"id\":\"a\",\"predicted_code\":\"x\",\"extra\":1}\n\n{\"predicted_code\":\"y\"}\n").unwrap();
        assert!(matches!(read_predictions(&path), Err(PredictionFileError::Format { line: 3, .. })));
        std::fs::write(&path, "{\"id\":\"a\",\"predicted_code\":\"x\"}\n{\"id\":\"a\",\"predicted_code\":\"y\"}\n").unwrap();
        assert!(matches!(read_predictions(&path), Err(PredictionFileError::DuplicateId { line: 2, .. })));
    }
}
