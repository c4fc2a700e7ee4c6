//! Detection, pruning and restoration of MPI function calls.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cst::{self, AstNode, CstError, NodeKind, SourceUnit, TokenKind};

const MPI_FUNCTIONS: &str = include_str!("../data/mpi_functions.txt");

pub const CORE_NAMES: [&str; 8] = [
    "MPI_Finalize",
    "MPI_Comm_rank",
    "MPI_Comm_size",
    "MPI_Init",
    "MPI_Recv",
    "MPI_Send",
    "MPI_Reduce",
    "MPI_Bcast",
];

/// The MPI function-name universe and its Common Core subset.
#[derive(Debug, Clone)]
pub struct MpiInventory {
    pub all_names: BTreeSet<String>,
    pub core_names: BTreeSet<String>,
}

impl MpiInventory {
    /// Inventory backed by the vendored function index.
    pub fn standard() -> &'static MpiInventory {
        static INV: OnceLock<MpiInventory> = OnceLock::new();
        INV.get_or_init(|| MpiInventory::from_list(MPI_FUNCTIONS))
    }

    /// Parses a one-name-per-line list; blank lines and `#` comments are
    /// skipped. Core names are always part of the result.
    pub fn from_list(text: &str) -> MpiInventory {
        let mut all_names: BTreeSet<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        let core_names: BTreeSet<String> = CORE_NAMES.iter().map(|s| s.to_string()).collect();
        all_names.extend(core_names.iter().cloned());
        MpiInventory { all_names, core_names }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.all_names.contains(name)
    }

    pub fn is_core(&self, name: &str) -> bool {
        self.core_names.contains(name)
    }
}

pub fn is_core(name: &str) -> bool {
    CORE_NAMES.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CallContext {
    /// The call is the entire expression of its statement.
    Statement,
    /// The call is part of a larger expression or a control header.
    Embedded,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MpiCall {
    pub name: String,
    pub line: usize,
    pub col: usize,
    pub context: CallContext,
}

impl MpiCall {
    pub fn site(&self) -> CallSite {
        CallSite { name: self.name.clone(), line: self.line }
    }
}

/// Name and line of a call; the unit gold labels and predictions are
/// compared in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CallSite {
    pub name: String,
    pub line: usize,
}

impl CallSite {
    pub fn new(name: impl Into<String>, line: usize) -> Self {
        CallSite { name: name.into(), line }
    }
}

impl fmt::Display for CallSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.name, self.line)
    }
}

pub fn sites(calls: &[MpiCall]) -> Vec<CallSite> {
    calls.iter().map(MpiCall::site).collect()
}

/// A call removed by [`prune`], with the statement text needed to put it
/// back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedCall {
    pub call: MpiCall,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneResult {
    pub pruned_text: String,
    pub removed: Vec<RemovedCall>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MpiEditError {
    #[error("{name} at line {line} is not a standalone statement")]
    EmbeddedCall { name: String, line: usize },
    #[error("source unit did not parse")]
    NotParsed,
    #[error("source is not in standardized form")]
    NotStandardized,
    #[error("removing calls changed the surrounding code near line {line}")]
    Unrestorable { line: usize },
    #[error(transparent)]
    Cst(#[from] CstError),
}

fn is_mpi_name(name: &str) -> bool {
    name.starts_with("MPI_")
}

/// Every call whose callee identifier starts with `MPI_`, in source order.
pub fn find_mpi_calls(ast: &AstNode) -> Vec<MpiCall> {
    let mut calls = Vec::new();
    ast.walk(&mut |n, ancestors| {
        let Some(name) = n.callee_name().filter(|name| is_mpi_name(name)) else { return };
        let stmt = ancestors.iter().rev().find(|a| a.kind.is_statement());
        let context = match stmt {
            Some(s) if s.kind == NodeKind::ExpressionStatement && s.children.first().is_some_and(|c| std::ptr::eq(c, n)) => {
                CallContext::Statement
            }
            _ => CallContext::Embedded,
        };
        calls.push(MpiCall { name: name.to_string(), line: n.span.start_line, col: n.span.start_col, context });
    });
    calls.sort_by_key(|c| (c.line, c.col));
    calls
}

/// Token-level scan for `MPI_*(`, usable on text that does not parse.
/// Comments and string literals never match.
pub fn extract_calls_lexical(text: &str) -> Vec<MpiCall> {
    let toks = cst::tokenize(text);
    let mut calls = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokenKind::Identifier || !is_mpi_name(&t.text) {
            continue;
        }
        if !toks.get(i + 1).is_some_and(|n| n.is_punct("(")) {
            continue;
        }
        let first_on_line = i == 0 || toks[i - 1].end_line() < t.line;
        let context = if first_on_line { CallContext::Statement } else { CallContext::Embedded };
        calls.push(MpiCall { name: t.text.clone(), line: t.line, col: t.col, context });
    }
    calls
}

/// Removes every statement-level MPI call from standardized code.
///
/// Fails when any MPI call is embedded in a larger expression, or sits in a
/// construct the parser kept opaque, since deleting such a call cannot
/// leave valid code behind.
pub fn prune(unit: &SourceUnit) -> Result<PruneResult, MpiEditError> {
    let ast = unit.ast.as_ref().filter(|_| unit.parse_ok).ok_or(MpiEditError::NotParsed)?;
    if cst::render(ast) != unit.text {
        return Err(MpiEditError::NotStandardized);
    }
    let calls = find_mpi_calls(ast);
    if let Some(c) = calls.iter().find(|c| c.context == CallContext::Embedded) {
        return Err(MpiEditError::EmbeddedCall { name: c.name.clone(), line: c.line });
    }
    let lexical = extract_calls_lexical(&unit.text);
    if sites(&lexical) != sites(&calls) {
        let hidden = lexical.iter().find(|l| !calls.iter().any(|c| c.site() == l.site())).unwrap_or(&lexical[0]);
        return Err(MpiEditError::EmbeddedCall { name: hidden.name.clone(), line: hidden.line });
    }

    let lines: Vec<&str> = unit.text.lines().collect();
    let mut drop = vec![false; lines.len()];
    let mut removed = Vec::with_capacity(calls.len());
    for call in calls {
        let idx = call.line - 1;
        if drop[idx] {
            return Err(MpiEditError::Unrestorable { line: call.line });
        }
        drop[idx] = true;
        removed.push(RemovedCall { statement: lines[idx].trim().to_string(), call });
    }
    let kept: Vec<&str> = lines.iter().zip(&drop).filter(|(_, d)| !**d).map(|(l, _)| *l).collect();
    let mut joined = kept.join("\n");
    if !joined.is_empty() {
        joined.push('\n');
    }
    let pruned_text = cst::standardize(&joined)?;
    if restore(&pruned_text, &removed)? != unit.text {
        let line = removed.first().map_or(1, |r| r.call.line);
        return Err(MpiEditError::Unrestorable { line });
    }
    Ok(PruneResult { pruned_text, removed })
}

/// Re-inserts removed statements at their recorded lines and standardizes.
pub fn restore(pruned: &str, removed: &[RemovedCall]) -> Result<String, CstError> {
    let mut lines: Vec<String> = pruned.lines().map(String::from).collect();
    let mut ordered: Vec<&RemovedCall> = removed.iter().collect();
    ordered.sort_by_key(|r| r.call.line);
    for r in ordered {
        let idx = (r.call.line - 1).min(lines.len());
        lines.insert(idx, r.statement.clone());
    }
    let mut text = lines.join("\n");
    text.push('\n');
    cst::standardize(&text)
}

/// True if `text` contains an inventory function name followed by `(`.
pub fn mentions_mpi_call(text: &str, inventory: &MpiInventory) -> bool {
    extract_calls_lexical(text).iter().any(|c| inventory.contains(&c.name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(src: &str) -> SourceUnit {
        SourceUnit::new("t.c", cst::standardize(src).unwrap())
    }

    const HELLO: &str = "#include <mpi.h>\n#include <stdio.h>\nint main(int argc, char **argv)\n{\n    MPI_Init(&argc, &argv);\n    int rank;\n    MPI_Comm_rank(MPI_COMM_WORLD, &rank);\n    printf(\"%d\\n\", rank);\n    MPI_Finalize();\n    return 0;\n}\n";

    #[test]
    fn inventory_contents() {
        let inv = MpiInventory::standard();
        assert_eq!(inv.core_names.len(), 8);
        assert!(inv.core_names.is_subset(&inv.all_names));
        assert!(inv.contains("MPI_Allreduce"));
        assert!(!inv.contains("MPI_COMM_WORLD"));
        assert!(inv.all_names.len() > 300);
    }

    #[test]
    fn single_direct_call() {
        let src = "#include <mpi.h>\nint main(int argc, char **argv)\n{\n    MPI_Init(&argc, &argv);\n    return 0;\n}\n";
        let ast = cst::parse(src).unwrap();
        let calls = find_mpi_calls(&ast);
        assert_eq!(calls.len(), 1);
        assert_eq!((calls[0].name.as_str(), calls[0].line, calls[0].context), ("MPI_Init", 4, CallContext::Statement));
    }

    #[test]
    fn call_in_condition_is_embedded() {
        let src = "int main()\n{\n    if (MPI_Send(&x, 1, MPI_INT, 1, 0, MPI_COMM_WORLD) != 0)\n    {\n        return 1;\n    }\n    return 0;\n}\n";
        let calls = find_mpi_calls(&cst::parse(src).unwrap());
        assert_eq!(calls.len(), 1);
        assert_eq!((calls[0].name.as_str(), calls[0].line, calls[0].context), ("MPI_Send", 3, CallContext::Embedded));
    }

    #[test]
    fn serial_code_has_no_calls() {
        assert!(find_mpi_calls(&cst::parse("int main(){ int x = 1; return x; }").unwrap()).is_empty());
    }

    #[test]
    fn prune_removes_statement_lines() {
        // 11 lines; MPI calls on lines 5, 7 and 9
        let u = unit(HELLO);
        assert_eq!(u.text, HELLO);
        let r = prune(&u).unwrap();
        let removed: Vec<_> = r.removed.iter().map(|r| (r.call.name.as_str(), r.call.line)).collect();
        assert_eq!(removed, vec![("MPI_Init", 5), ("MPI_Comm_rank", 7), ("MPI_Finalize", 9)]);
        assert_eq!(r.pruned_text.lines().count(), 8);
        assert!(!r.pruned_text.contains("MPI_Init"));
        assert!(r.pruned_text.contains("#include <mpi.h>"));
        assert!(!mentions_mpi_call(&r.pruned_text, MpiInventory::standard()));
    }

    #[test]
    fn ten_line_program_prunes_to_eight() {
        let src = "#include <mpi.h>\nint main(int argc, char **argv)\n{\n    MPI_Init(&argc, &argv);\n    int x;\n    x = 1;\n    x = x + 1;\n    x = x * 2;\n    MPI_Finalize();\n}\n";
        let u = unit(src);
        assert_eq!(u.text, src);
        assert_eq!(u.text.lines().count(), 10);
        let r = prune(&u).unwrap();
        let removed: Vec<_> = r.removed.iter().map(|r| (r.call.name.as_str(), r.call.line)).collect();
        assert_eq!(removed, vec![("MPI_Init", 4), ("MPI_Finalize", 9)]);
        assert_eq!(r.pruned_text.lines().count(), 8);
    }

    #[test]
    fn prune_without_calls_is_identity() {
        let u = unit("int main(){ return 0; }");
        let r = prune(&u).unwrap();
        assert_eq!(r.pruned_text, u.text);
        assert!(r.removed.is_empty());
    }

    #[test]
    fn assignment_from_call_is_rejected() {
        let u = unit("int main(){ int err; err = MPI_Send(&x, 1, MPI_INT, 1, 0, MPI_COMM_WORLD); return 0; }");
        assert!(matches!(prune(&u), Err(MpiEditError::EmbeddedCall { ref name, .. }) if name == "MPI_Send"));
    }

    #[test]
    fn opaque_construct_hiding_call_is_rejected() {
        let u = unit("int main(){ goto l; l: ; __asm__ { MPI_Barrier(c); } return 0; }");
        assert!(matches!(prune(&u), Err(MpiEditError::EmbeddedCall { .. })));
    }

    #[test]
    fn unstandardized_input_rejected() {
        let u = SourceUnit::new("t.c", "int main(){return 0;}");
        assert_eq!(prune(&u), Err(MpiEditError::NotStandardized));
    }

    #[test]
    fn restore_round_trip() {
        let u = unit(HELLO);
        let r = prune(&u).unwrap();
        assert_eq!(restore(&r.pruned_text, &r.removed).unwrap(), u.text);
    }

    #[test]
    fn unbraced_body_call_is_pruned_inside_braces() {
        let u = unit("int main(int argc, char **argv){ int r; MPI_Init(&argc,&argv); MPI_Comm_rank(MPI_COMM_WORLD,&r); if (r == 0) MPI_Send(&r,1,MPI_INT,1,0,MPI_COMM_WORLD); MPI_Finalize(); return 0; }");
        let r = prune(&u).unwrap();
        assert_eq!(r.removed.len(), 4);
        assert!(r.pruned_text.contains("if (r == 0)\n    {\n    }\n"));
        assert_eq!(restore(&r.pruned_text, &r.removed).unwrap(), u.text);
    }

    #[test]
    fn lexical_scan() {
        let calls = extract_calls_lexical("MPI_Init(&argc,&argv);");
        assert_eq!(sites(&calls), vec![CallSite::new("MPI_Init", 1)]);
        assert!(extract_calls_lexical("printf(\"MPI_Init(\");").is_empty());
        assert!(extract_calls_lexical("/* MPI_Init(); */ // MPI_Finalize();\n").is_empty());
        assert!(extract_calls_lexical("x = MPI_COMM_WORLD;").is_empty());
        let c = extract_calls_lexical("x = MPI_Wtime();\n    MPI_Barrier(c);");
        assert_eq!(c[0].context, CallContext::Embedded);
        assert_eq!(c[1].context, CallContext::Statement);
    }

    #[test]
    fn lexical_agrees_with_tree_on_sample() {
        let u = unit(HELLO);
        let tree = find_mpi_calls(u.ast.as_ref().unwrap());
        assert_eq!(sites(&extract_calls_lexical(&u.text)), sites(&tree));
    }
}
