use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cst;
use crate::mpiedit::{extract_calls_lexical, mentions_mpi_call, sites, CallSite, MpiInventory};

use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "valid" | "validation" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}` (expected train, valid or test)")),
        }
    }
}

/// One training triple. Field order is the on-disk order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetExample {
    pub id: String,
    pub input_code: String,
    pub input_xsbt: String,
    pub label_code: String,
    pub gold_calls: Vec<CallSite>,
    pub split: Split,
}

impl DatasetExample {
    /// Lists every violated invariant; empty when the example is valid.
    pub fn problems(&self, token_limit: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.id.is_empty() {
            out.push("empty id".to_string());
        }
        if sites(&extract_calls_lexical(&self.label_code)) != self.gold_calls {
            out.push("gold_calls do not match the calls in label_code".to_string());
        }
        if mentions_mpi_call(&self.input_code, MpiInventory::standard()) {
            out.push("input_code still contains MPI calls".to_string());
        }
        let n = cst::token_count(&self.label_code);
        if n > token_limit {
            out.push(format!("label_code has {n} tokens, over the limit of {token_limit}"));
        }
        if self.gold_calls.windows(2).any(|w| w[0].line > w[1].line) {
            out.push("gold_calls not sorted by line".to_string());
        }
        out
    }
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CorpusError> {
    let file = fs::File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| CorpusError::Format { line: 0, message: e.to_string() })?;
        w.write_all(b"\n").map_err(|e| CorpusError::io(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| CorpusError::Format { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_dataset(path: &Path, examples: &[DatasetExample]) -> Result<(), CorpusError> {
    write_jsonl(path, examples)
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetExample>, CorpusError> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> DatasetExample {
        let label = "#include <mpi.h>\nint main(int argc, char **argv)\n{\n    MPI_Init(&argc, &argv);\n    MPI_Finalize();\n    return 0;\n}\n";
        DatasetExample {
            id: "abc".into(),
            input_code: "#include <mpi.h>\nint main(int argc, char **argv)\n{\n    return 0;\n}\n".into(),
            input_xsbt: "<translation_unit/>".into(),
            label_code: label.into(),
            gold_calls: vec![CallSite::new("MPI_Init", 4), CallSite::new("MPI_Finalize", 5)],
            split: Split::Test,
        }
    }

    #[test]
    fn field_order_on_disk() {
        let json = serde_json::to_string(&example()).unwrap();
        let keys: Vec<usize> =
            ["\"id\"", "\"input_code\"", "\"input_xsbt\"", "\"label_code\"", "\"gold_calls\"", "\"split\""]
                .iter()
                .map(|k| json.find(k).unwrap())
                .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(json.contains("{\"name\":\"MPI_Init\",\"line\":4}"));
        assert!(json.ends_with("\"split\":\"test\"}"));
    }

    #[test]
    fn valid_example_has_no_problems() {
        assert!(example().problems(320).is_empty());
    }

    #[test]
    fn problems_detected() {
        let mut ex = example();
        ex.gold_calls.pop();
        ex.input_code = ex.label_code.clone();
        let p = ex.problems(5);
        assert_eq!(p.len(), 3, "{p:?}");
    }

    #[test]
    fn jsonl_round_trip_and_line_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        write_dataset(&path, &[example(), example()]).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), vec![example(), example()]);
        fs::write(&path, format!("{}\n{{\"id\": 1}}\n", serde_json::to_string(&example()).unwrap())).unwrap();
        assert!(matches!(read_dataset(&path), Err(CorpusError::Format { line: 2, .. })));
    }
}
