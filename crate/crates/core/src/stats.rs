//! Corpus statistics: function usage, code length and parallel-region share.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cst::{self, SourceUnit};
use crate::mpiedit::{self, MpiCall};

pub const LENGTH_BINS: [&str; 4] = ["<=10", "11-50", "51-99", ">=100"];

/// Standardized text when the unit parsed, raw text otherwise.
fn standardized(unit: &SourceUnit) -> String {
    match (&unit.ast, unit.parse_ok) {
        (Some(ast), true) => cst::render(ast),
        _ => unit.text.clone(),
    }
}

fn calls(text: &str) -> Vec<MpiCall> {
    mpiedit::extract_calls_lexical(text)
}

/// Number of files calling each MPI function, most common first.
pub fn function_file_counts(units: &[SourceUnit]) -> Vec<(String, usize)> {
    let merged = units
        .par_iter()
        .map(|u| {
            let names: BTreeSet<String> = calls(&standardized(u)).into_iter().map(|c| c.name).collect();
            names.into_iter().map(|n| (n, 1usize)).collect::<BTreeMap<_, _>>()
        })
        .reduce(BTreeMap::new, merge_counts);
    let mut out: Vec<(String, usize)> = merged.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

fn merge_counts(mut a: BTreeMap<String, usize>, b: BTreeMap<String, usize>) -> BTreeMap<String, usize> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

fn length_bin(lines: usize) -> usize {
    match lines {
        0..=10 => 0,
        11..=50 => 1,
        51..=99 => 2,
        _ => 3,
    }
}

pub fn line_count(text: &str) -> usize {
    text.lines().count()
}

/// Files per code-length bin, in [`LENGTH_BINS`] order.
pub fn length_histogram(units: &[SourceUnit]) -> [usize; 4] {
    units
        .par_iter()
        .map(|u| {
            let mut h = [0; 4];
            h[length_bin(line_count(&standardized(u)))] = 1;
            h
        })
        .reduce(|| [0; 4], add_arrays)
}

fn add_arrays<const N: usize>(mut a: [usize; N], b: [usize; N]) -> [usize; N] {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Share of the program between the first `MPI_Init` and the last
/// `MPI_Finalize`, as a 0.1-wide bin index. `None` unless both are present.
pub fn init_finalize_bin(text: &str) -> Option<usize> {
    let calls = calls(text);
    let init = calls.iter().find(|c| c.name == "MPI_Init")?.line;
    let fin = calls.iter().rev().find(|c| c.name == "MPI_Finalize")?.line;
    let total = line_count(text).max(1);
    let span = fin.saturating_sub(init).min(total);
    Some((10 * span / total).min(9))
}

/// Ratio histogram over [0, 1] with ten bins of width 0.1; the last bin is
/// closed on the right.
pub fn init_finalize_ratio(units: &[SourceUnit]) -> [usize; 10] {
    units
        .par_iter()
        .map(|u| {
            let mut h = [0; 10];
            if let Some(b) = init_finalize_bin(&standardized(u)) {
                h[b] = 1;
            }
            h
        })
        .reduce(|| [0; 10], add_arrays)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CoOccurrence {
    pub both: usize,
    pub init_only: usize,
    pub finalize_only: usize,
    pub neither: usize,
}

pub fn init_finalize_cooccurrence(units: &[SourceUnit]) -> CoOccurrence {
    units
        .par_iter()
        .map(|u| {
            let calls = calls(&standardized(u));
            let init = calls.iter().any(|c| c.name == "MPI_Init");
            let fin = calls.iter().any(|c| c.name == "MPI_Finalize");
            let mut c = CoOccurrence::default();
            match (init, fin) {
                (true, true) => c.both = 1,
                (true, false) => c.init_only = 1,
                (false, true) => c.finalize_only = 1,
                (false, false) => c.neither = 1,
            }
            c
        })
        .reduce(CoOccurrence::default, |a, b| CoOccurrence {
            both: a.both + b.both,
            init_only: a.init_only + b.init_only,
            finalize_only: a.finalize_only + b.finalize_only,
            neither: a.neither + b.neither,
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub files: usize,
    pub function_counts: Vec<(String, usize)>,
    pub length_histogram: [usize; 4],
    pub ratio_histogram: [usize; 10],
    pub cooccurrence: CoOccurrence,
}

pub fn compute(units: &[SourceUnit]) -> CorpusStats {
    CorpusStats {
        files: units.len(),
        function_counts: function_file_counts(units),
        length_histogram: length_histogram(units),
        ratio_histogram: init_finalize_ratio(units),
        cooccurrence: init_finalize_cooccurrence(units),
    }
}

pub fn function_counts_csv(counts: &[(String, usize)]) -> String {
    let mut s = String::from("function,files\n");
    for (name, n) in counts {
        s.push_str(&format!("{name},{n}\n"));
    }
    s
}

pub fn length_csv(hist: &[usize; 4]) -> String {
    let mut s = String::from("lines,files\n");
    for (label, n) in LENGTH_BINS.iter().zip(hist) {
        s.push_str(&format!("{label},{n}\n"));
    }
    s
}

/// Histogram data in gnuplot's whitespace-separated column format.
pub fn ratio_dat(hist: &[usize; 10]) -> String {
    let mut s = String::from("# bin_start bin_end files\n");
    for (i, n) in hist.iter().enumerate() {
        s.push_str(&format!("{:.1} {:.1} {n}\n", i as f64 / 10.0, (i + 1) as f64 / 10.0));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(text: &str) -> SourceUnit {
        SourceUnit::new("t.c", text)
    }

    fn program(lines: usize, body: &[&str]) -> String {
        let mut v: Vec<String> = vec!["int main()".into(), "{".into()];
        v.extend(body.iter().map(|s| format!("    {s}")));
        while v.len() + 2 < lines {
            v.push("    x = x + 1;".into());
        }
        v.push("    return 0;".into());
        v.push("}".into());
        v.join("\n") + "\n"
    }

    #[test]
    fn per_file_dedup() {
        let u = unit("int main()\n{\n    MPI_Send(a);\n    MPI_Send(b);\n}\n");
        assert_eq!(function_file_counts(&[u]), vec![("MPI_Send".to_string(), 1)]);
    }

    #[test]
    fn counts_across_files() {
        let a = unit(&program(8, &["MPI_Init(0, 0);", "MPI_Finalize();"]));
        let b = a.clone();
        let c = unit(&program(8, &["MPI_Init(0, 0);"]));
        let counts = function_file_counts(&[a, b, c]);
        assert_eq!(counts, vec![("MPI_Init".into(), 3), ("MPI_Finalize".into(), 2)]);
    }

    #[test]
    fn length_bins() {
        assert_eq!(length_histogram(&[unit(&program(5, &[]))]), [1, 0, 0, 0]);
        let units: Vec<_> = [10, 11, 99, 100].iter().map(|&n| unit(&program(n, &[]))).collect();
        for u in &units {
            assert_eq!(u.text, standardized(u));
        }
        assert_eq!(length_histogram(&units), [1, 1, 1, 1]);
    }

    #[test]
    fn ratio_arithmetic() {
        let text = "MPI_Init(0, 0);\na;\nb;\nc;\nd;\ne;\nf;\ng;\nh;\nMPI_Finalize();\n";
        assert_eq!(init_finalize_bin(text), Some(9));
        assert_eq!(init_finalize_bin("MPI_Init(0, 0);\n"), None);
        let u = unit(&program(20, &["MPI_Init(0, 0);", "MPI_Finalize();"]));
        let h = init_finalize_ratio(&[u]);
        assert_eq!(h.iter().sum::<usize>(), 1);
        assert_eq!(h[0], 1);
    }

    #[test]
    fn first_init_last_finalize() {
        let text = "MPI_Finalize();\nMPI_Init(0, 0);\na;\nMPI_Init(0, 0);\nMPI_Finalize();\n";
        assert_eq!(init_finalize_bin(text), Some(6));
    }

    #[test]
    fn totals_match_files() {
        let units = vec![
            unit(&program(12, &["MPI_Init(0, 0);", "MPI_Finalize();"])),
            unit(&program(12, &["MPI_Init(0, 0);"])),
            unit(&program(12, &["MPI_Finalize();"])),
            unit(&program(12, &[])),
        ];
        let s = compute(&units);
        assert_eq!(s.ratio_histogram.iter().sum::<usize>(), s.cooccurrence.both);
        assert_eq!(s.cooccurrence, CoOccurrence { both: 1, init_only: 1, finalize_only: 1, neither: 1 });
        assert!(s.function_counts.iter().all(|(_, n)| *n <= units.len()));
        assert_eq!(s.length_histogram.iter().sum::<usize>(), 4);
    }

    #[test]
    fn output_formats() {
        assert_eq!(length_csv(&[1, 2, 3, 4]), "lines,files\n<=10,1\n11-50,2\n51-99,3\n>=100,4\n");
        let dat = ratio_dat(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 5]);
        assert!(dat.ends_with("0.9 1.0 5\n"));
        assert_eq!(function_counts_csv(&[("MPI_Init".into(), 2)]), "function,files\nMPI_Init,2\n");
    }
}
