//! Scoring predicted code against labels: tolerant call alignment,
//! precision/recall/F1 and text similarity metrics.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, DatasetExample, Split};
use crate::cst;
use crate::mpiedit::{self, is_core, CallSite};
use crate::predictor::{self, PredictionFileError, PredictionRecord};

pub const DEFAULT_TOLERANCE: usize = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOutcome {
    /// Matched (predicted, gold) pairs.
    pub tp: Vec<(CallSite, CallSite)>,
    pub fp: Vec<CallSite>,
    #[serde(rename = "fn")]
    pub fn_: Vec<CallSite>,
}

impl MatchOutcome {
    pub fn counts(&self) -> Counts {
        Counts { tp: self.tp.len(), fp: self.fp.len(), fn_: self.fn_.len() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts { tp: self.tp + o.tp, fp: self.fp + o.fp, fn_: self.fn_ + o.fn_ }
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

/// Matches predicted calls to gold calls of the same name whose lines differ
/// by at most `tolerance`, maximizing the number of pairs.
///
/// Per name, both sides are swept in line order and each prediction takes
/// the earliest gold call still in reach, which is optimal for window
/// constraints of equal width.
pub fn align(pred: &[CallSite], gold: &[CallSite], tolerance: usize) -> MatchOutcome {
    let mut by_name: BTreeMap<&str, (Vec<&CallSite>, Vec<&CallSite>)> = BTreeMap::new();
    for p in pred {
        by_name.entry(&p.name).or_default().0.push(p);
    }
    for g in gold {
        by_name.entry(&g.name).or_default().1.push(g);
    }
    let mut out = MatchOutcome::default();
    for (_, (mut ps, mut gs)) in by_name {
        ps.sort_by_key(|c| c.line);
        gs.sort_by_key(|c| c.line);
        let mut gi = 0;
        for p in ps {
            while gi < gs.len() && gs[gi].line + tolerance < p.line {
                out.fn_.push(gs[gi].clone());
                gi += 1;
            }
            if gi < gs.len() && gs[gi].line <= p.line + tolerance {
                out.tp.push((p.clone(), gs[gi].clone()));
                gi += 1;
            } else {
                out.fp.push(p.clone());
            }
        }
        out.fn_.extend(gs[gi..].iter().map(|g| (*g).clone()));
    }
    out.tp.sort_by(|a, b| a.1.line.cmp(&b.1.line).then_with(|| a.1.name.cmp(&b.1.name)));
    out.fp.sort_by(|a, b| a.line.cmp(&b.line).then_with(|| a.name.cmp(&b.name)));
    out.fn_.sort_by(|a, b| a.line.cmp(&b.line).then_with(|| a.name.cmp(&b.name)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NameFilter {
    All,
    Core,
}

impl NameFilter {
    pub fn keeps(self, name: &str) -> bool {
        match self {
            NameFilter::All => true,
            NameFilter::Core => is_core(name),
        }
    }

    pub fn apply(self, calls: &[CallSite]) -> Vec<CallSite> {
        calls.iter().filter(|c| self.keeps(&c.name)).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// No predicted and no gold calls at all.
    pub vacuous: bool,
    pub precision_defined: bool,
    pub recall_defined: bool,
}

/// Micro-averaged precision, recall and F1. With no calls on either side the
/// result is a perfect score flagged as vacuous; any other zero denominator
/// yields 0.
pub fn prf_from_counts(c: Counts) -> Prf {
    if c.tp + c.fp + c.fn_ == 0 {
        return Prf { precision: 1.0, recall: 1.0, f1: 1.0, vacuous: true, precision_defined: false, recall_defined: false };
    }
    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Prf { precision, recall, f1, vacuous: false, precision_defined: c.tp + c.fp > 0, recall_defined: c.tp + c.fn_ > 0 }
}

pub fn prf(outcomes: &[MatchOutcome], filter: NameFilter) -> Prf {
    let counts = outcomes
        .iter()
        .map(|o| Counts {
            tp: o.tp.iter().filter(|(_, g)| filter.keeps(&g.name)).count(),
            fp: o.fp.iter().filter(|c| filter.keeps(&c.name)).count(),
            fn_: o.fn_.iter().filter(|c| filter.keeps(&c.name)).count(),
        })
        .sum();
    prf_from_counts(counts)
}

/// Token texts as the lexer sees them.
pub fn tokens(text: &str) -> Vec<String> {
    cst::tokenize(text).texts().into_iter().map(String::from).collect()
}

/// Clipped n-gram matches and candidate n-gram totals for n = 1..=4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: [usize; 4],
    pub totals: [usize; 4],
    pub pred_len: usize,
    pub ref_len: usize,
}

impl std::ops::Add for BleuStats {
    type Output = BleuStats;
    fn add(mut self, o: BleuStats) -> BleuStats {
        for n in 0..4 {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.pred_len += o.pred_len;
        self.ref_len += o.ref_len;
        self
    }
}

pub fn bleu_stats<T: AsRef<str>>(pred: &[T], reference: &[T]) -> BleuStats {
    let mut s = BleuStats { pred_len: pred.len(), ref_len: reference.len(), ..Default::default() };
    for n in 1..=4 {
        let mut ref_counts: HashMap<Vec<&str>, usize> = HashMap::new();
        for w in reference.windows(n) {
            *ref_counts.entry(w.iter().map(AsRef::as_ref).collect()).or_default() += 1;
        }
        let mut pred_counts: HashMap<Vec<&str>, usize> = HashMap::new();
        for w in pred.windows(n) {
            *pred_counts.entry(w.iter().map(AsRef::as_ref).collect()).or_default() += 1;
        }
        s.totals[n - 1] = pred.len().saturating_sub(n - 1);
        s.matches[n - 1] = pred_counts.iter().map(|(g, c)| (*c).min(ref_counts.get(g).copied().unwrap_or(0))).sum();
    }
    s
}

/// BLEU-4 with uniform weights and brevity penalty. An order with no
/// matches is smoothed to (0 + 1) / (total + 1); an order with no candidate
/// n-grams contributes 1.
pub fn bleu_from_stats(s: &BleuStats) -> f64 {
    if s.pred_len == 0 {
        return if s.ref_len == 0 { 1.0 } else { 0.0 };
    }
    let mut log_sum = 0.0;
    for n in 0..4 {
        let p = if s.totals[n] == 0 {
            1.0
        } else if s.matches[n] == 0 {
            1.0 / (s.totals[n] as f64 + 1.0)
        } else {
            s.matches[n] as f64 / s.totals[n] as f64
        };
        log_sum += p.ln() / 4.0;
    }
    let bp = if s.pred_len >= s.ref_len { 1.0 } else { (1.0 - s.ref_len as f64 / s.pred_len as f64).exp() };
    bp * log_sum.exp()
}

pub fn bleu<T: AsRef<str>>(pred: &[T], reference: &[T]) -> f64 {
    bleu_from_stats(&bleu_stats(pred, reference))
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

pub const ROUGE_BETA: f64 = 1.2;

pub fn rouge_l<T: PartialEq>(pred: &[T], reference: &[T]) -> f64 {
    if pred.is_empty() && reference.is_empty() {
        return 1.0;
    }
    let lcs = lcs_len(pred, reference);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / pred.len() as f64;
    let r = lcs as f64 / reference.len() as f64;
    let b2 = ROUGE_BETA * ROUGE_BETA;
    (1.0 + b2) * p * r / (r + b2 * p)
}

/// METEOR restricted to exact unigram matches: recall-weighted harmonic
/// mean with the fragmentation penalty 0.5 * (chunks / matches)^3.
/// Alignment takes, for each predicted token in order, the first unused
/// equal reference token.
pub fn meteor_simple<T: PartialEq>(pred: &[T], reference: &[T]) -> f64 {
    if pred.is_empty() && reference.is_empty() {
        return 1.0;
    }
    let mut used = vec![false; reference.len()];
    let mut pairs = Vec::new();
    for (i, t) in pred.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j] == *t) {
            used[j] = true;
            pairs.push((i, j));
        }
    }
    let m = pairs.len();
    if m == 0 {
        return 0.0;
    }
    let chunks = 1 + pairs.windows(2).filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1)).count();
    let p = m as f64 / pred.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    fmean * (1.0 - penalty)
}

pub fn exact_match(pred_text: &str, label_text: &str) -> bool {
    cst::tokenize(pred_text).texts() == cst::tokenize(label_text).texts()
}

/// Standardized when it parses, verbatim otherwise.
pub fn normalize_prediction(text: &str) -> String {
    cst::standardize(text).unwrap_or_else(|_| text.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScore {
    pub id: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub core_tp: usize,
    pub core_fp: usize,
    pub core_fn: usize,
    pub bleu: f64,
    pub rouge_l: f64,
    pub meteor_simple: f64,
    pub exact_match: bool,
    #[serde(skip)]
    pub bleu_stats: BleuStats,
    #[serde(skip)]
    pub outcome: MatchOutcome,
}

pub fn score_example(id: &str, predicted_code: &str, label_code: &str, gold: &[CallSite], tolerance: usize) -> ExampleScore {
    let pred_text = normalize_prediction(predicted_code);
    let pred_calls = mpiedit::sites(&mpiedit::extract_calls_lexical(&pred_text));
    let outcome = align(&pred_calls, gold, tolerance);
    let core = align(&NameFilter::Core.apply(&pred_calls), &NameFilter::Core.apply(gold), tolerance).counts();
    let (pt, lt) = (tokens(&pred_text), tokens(label_code));
    let stats = bleu_stats(&pt, &lt);
    let all = outcome.counts();
    ExampleScore {
        id: id.to_string(),
        tp: all.tp,
        fp: all.fp,
        fn_: all.fn_,
        core_tp: core.tp,
        core_fp: core.fp,
        core_fn: core.fn_,
        bleu: bleu_from_stats(&stats),
        rouge_l: rouge_l(&pt, &lt),
        meteor_simple: meteor_simple(&pt, &lt),
        exact_match: pt == lt,
        bleu_stats: stats,
        outcome,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub m_precision: f64,
    pub m_recall: f64,
    pub m_f1: f64,
    pub mcc_precision: f64,
    pub mcc_recall: f64,
    pub mcc_f1: f64,
    pub bleu: f64,
    pub rouge_l: f64,
    pub meteor_simple: f64,
    pub exact_match_acc: f64,
    pub n_examples: usize,
    pub tolerance: usize,
    /// Metrics whose denominator was zero and that were filled in by
    /// convention.
    pub undefined: Vec<String>,
    pub vacuous: bool,
}

impl MetricsReport {
    /// Rows in display order.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("M-F1", self.m_f1),
            ("M-Precision", self.m_precision),
            ("M-Recall", self.m_recall),
            ("MCC-F1", self.mcc_f1),
            ("MCC-Precision", self.mcc_precision),
            ("MCC-Recall", self.mcc_recall),
            ("BLEU", self.bleu),
            ("Meteor (simplified)", self.meteor_simple),
            ("Rouge-l", self.rouge_l),
            ("ACC", self.exact_match_acc),
        ]
    }

    pub fn table(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = format!("{:<width$}  {}\n", "Quality Measure", "Value", width = width.max(15));
        for (k, v) in rows {
            s.push_str(&format!("{:<width$}  {v:.4}\n", k, width = width.max(15)));
        }
        s.push_str(&format!("{:<width$}  {}\n", "Examples", self.n_examples, width = width.max(15)));
        if !self.undefined.is_empty() {
            s.push_str(&format!("undefined (set by convention): {}\n", self.undefined.join(", ")));
        }
        s
    }
}

pub fn aggregate(scores: &[ExampleScore], tolerance: usize) -> MetricsReport {
    let all: Counts = scores.iter().map(|s| Counts { tp: s.tp, fp: s.fp, fn_: s.fn_ }).sum();
    let core: Counts = scores.iter().map(|s| Counts { tp: s.core_tp, fp: s.core_fp, fn_: s.core_fn }).sum();
    let m = prf_from_counts(all);
    let mcc = prf_from_counts(core);
    let stats = scores.iter().map(|s| s.bleu_stats).fold(BleuStats::default(), |a, b| a + b);
    let n = scores.len();
    let mean = |f: &dyn Fn(&ExampleScore) -> f64| if n == 0 { 0.0 } else { scores.iter().map(f).sum::<f64>() / n as f64 };
    let mut undefined = Vec::new();
    for (prefix, p) in [("m", &m), ("mcc", &mcc)] {
        if !p.precision_defined {
            undefined.push(format!("{prefix}_precision"));
        }
        if !p.recall_defined {
            undefined.push(format!("{prefix}_recall"));
        }
    }
    if n == 0 {
        undefined.extend(["bleu", "rouge_l", "meteor_simple", "exact_match_acc"].map(String::from));
    }
    MetricsReport {
        m_precision: m.precision,
        m_recall: m.recall,
        m_f1: m.f1,
        mcc_precision: mcc.precision,
        mcc_recall: mcc.recall,
        mcc_f1: mcc.f1,
        bleu: if n == 0 { 0.0 } else { bleu_from_stats(&stats) },
        rouge_l: mean(&|s| s.rouge_l),
        meteor_simple: mean(&|s| s.meteor_simple),
        exact_match_acc: mean(&|s| if s.exact_match { 1.0 } else { 0.0 }),
        n_examples: n,
        tolerance,
        undefined,
        vacuous: m.vacuous,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no prediction for example {0}")]
    MissingPrediction(String),
    #[error("dataset: {0}")]
    Dataset(#[from] corpus::CorpusError),
    #[error("predictions: {0}")]
    Predictions(#[from] PredictionFileError),
}

/// Scores `predictions` against the examples of `split` (every example when
/// `None`). Results are in dataset order regardless of parallelism.
pub fn evaluate_records(
    examples: &[DatasetExample],
    predictions: &[PredictionRecord],
    split: Option<Split>,
    tolerance: usize,
) -> Result<(MetricsReport, Vec<ExampleScore>), EvalError> {
    let by_id: HashMap<&str, &str> = predictions.iter().map(|p| (p.id.as_str(), p.predicted_code.as_str())).collect();
    let selected: Vec<(&DatasetExample, &str)> = examples
        .iter()
        .filter(|e| split.is_none_or(|s| e.split == s))
        .map(|e| by_id.get(e.id.as_str()).map(|p| (e, *p)).ok_or_else(|| EvalError::MissingPrediction(e.id.clone())))
        .collect::<Result<_, _>>()?;
    let scores: Vec<ExampleScore> = selected
        .par_iter()
        .map(|(e, p)| score_example(&e.id, p, &e.label_code, &e.gold_calls, tolerance))
        .collect();
    Ok((aggregate(&scores, tolerance), scores))
}

pub fn evaluate(
    dataset_path: &Path,
    predictions_path: &Path,
    split: Option<Split>,
    tolerance: usize,
) -> Result<(MetricsReport, Vec<ExampleScore>), EvalError> {
    let examples = corpus::read_dataset(dataset_path)?;
    let predictions = predictor::read_predictions(predictions_path)?;
    evaluate_records(&examples, &predictions, split, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(v: &[(&str, usize)]) -> Vec<CallSite> {
        v.iter().map(|(n, l)| CallSite::new(*n, *l)).collect()
    }

    #[test]
    fn alignment_examples() {
        let o = align(&cs(&[("MPI_Init", 3), ("MPI_Finalize", 10)]), &cs(&[("MPI_Init", 3), ("MPI_Finalize", 11)]), 1);
        assert_eq!(o.counts(), Counts { tp: 2, fp: 0, fn_: 0 });
        let o = align(&cs(&[("MPI_Send", 5)]), &cs(&[("MPI_Recv", 5)]), 1);
        assert_eq!(o.counts(), Counts { tp: 0, fp: 1, fn_: 1 });
        let o = align(&cs(&[("MPI_Send", 5)]), &cs(&[("MPI_Send", 7)]), 1);
        assert_eq!(o.counts(), Counts { tp: 0, fp: 1, fn_: 1 });
    }

    #[test]
    fn greedy_needs_earliest_reachable_gold() {
        // Pairing 5 with 6 would strand the prediction at 7.
        let o = align(&cs(&[("a", 5), ("a", 7)]), &cs(&[("a", 4), ("a", 6)]), 1);
        assert_eq!(o.counts().tp, 2);
    }

    #[test]
    fn prf_examples() {
        let p = prf_from_counts(Counts { tp: 2, fp: 0, fn_: 0 });
        assert_eq!((p.precision, p.recall, p.f1), (1.0, 1.0, 1.0));
        let p = prf_from_counts(Counts { tp: 1, fp: 1, fn_: 1 });
        assert_eq!((p.precision, p.recall, p.f1), (0.5, 0.5, 0.5));
        let p = prf_from_counts(Counts::default());
        assert_eq!((p.precision, p.recall, p.f1, p.vacuous), (1.0, 1.0, 1.0, true));
        let p = prf_from_counts(Counts { tp: 0, fp: 0, fn_: 3 });
        assert_eq!((p.precision, p.recall, p.f1, p.precision_defined), (0.0, 0.0, 0.0, false));
    }

    #[test]
    fn core_filter() {
        let o = align(&cs(&[("MPI_Init", 1), ("MPI_Wtime", 2)]), &cs(&[("MPI_Init", 1), ("MPI_Barrier", 3)]), 1);
        let core = prf(std::slice::from_ref(&o), NameFilter::Core);
        assert_eq!((core.precision, core.recall), (1.0, 1.0));
        let all = prf(&[o], NameFilter::All);
        assert_eq!((all.precision, all.recall), (0.5, 0.5));
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn bleu_edges() {
        let r = toks("a b c d e f");
        assert_eq!(bleu(&r, &r), 1.0);
        assert_eq!(bleu(&[], &r), 0.0);
        let short = toks("a b");
        let s = bleu_stats(&short, &r);
        assert_eq!(s.totals, [2, 1, 0, 0]);
        let expected = (1.0f64 - 3.0).exp();
        assert!((bleu(&short, &r) - expected).abs() < 1e-12);
    }

    #[test]
    fn rouge_examples() {
        let r = toks("a b c");
        assert_eq!(rouge_l(&r, &r), 1.0);
        assert_eq!(rouge_l(&toks("x y"), &r), 0.0);
        let pred = toks("a x b x c x d x e x");
        let reference = toks("a b c d e y y y y y");
        assert_eq!(lcs_len(&pred, &reference), 5);
        let (p, rr, b2) = (0.5, 0.5, 1.44);
        assert!((rouge_l(&pred, &reference) - (1.0 + b2) * p * rr / (rr + b2 * p)).abs() < 1e-12);
    }

    #[test]
    fn meteor_examples() {
        let r = toks("a b c d e");
        assert!((meteor_simple(&r, &r) - (1.0 - 0.5 * (1.0f64 / 5.0).powi(3))).abs() < 1e-12);
        assert_eq!(meteor_simple(&toks("x y"), &r), 0.0);
        // a b | d e matched in two chunks; c missing from the prediction.
        let pred = toks("a b d e");
        let m = 4.0;
        let (p, rr) = (m / 4.0, m / 5.0);
        let fmean = 10.0 * p * rr / (rr + 9.0 * p);
        let expected = fmean * (1.0 - 0.5 * (2.0f64 / m).powi(3));
        assert!((meteor_simple(&pred, &r) - expected).abs() < 1e-12);
    }

    #[test]
    fn exact_match_examples() {
        let label = "int main()\n{\n    MPI_Init(0, 0);\n    return 0;\n}\n";
        assert!(exact_match(label, label));
        assert!(exact_match(&label.replace("{\n", "{\n\n"), label));
        assert!(!exact_match(&label.replace("    MPI_Init(0, 0);\n", ""), label));
    }

    #[test]
    fn missing_prediction() {
        let ex = DatasetExample {
            id: "a".into(),
            input_code: String::new(),
            input_xsbt: String::new(),
            label_code: "int x;\n".into(),
            gold_calls: vec![],
            split: Split::Test,
        };
        match evaluate_records(std::slice::from_ref(&ex), &[], None, 1) {
            Err(EvalError::MissingPrediction(id)) => assert_eq!(id, "a"),
            other => panic!("{other:?}"),
        }
        let valid = DatasetExample { split: Split::Train, ..ex };
        let (report, _) = evaluate_records(&[valid], &[], Some(Split::Test), 1).unwrap();
        assert_eq!(report.n_examples, 0);
    }

    #[test]
    fn table_row_order() {
        let r = aggregate(&[], 1);
        let t = r.table();
        let pos = |k: &str| t.find(k).unwrap();
        assert!(pos("M-F1") < pos("M-Precision") && pos("MCC-Recall") < pos("BLEU") && pos("Rouge-l") < pos("ACC"));
        assert!(r.vacuous);
    }
}
