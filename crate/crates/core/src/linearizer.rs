//! Structure-based traversals of a parsed tree.
//!
//! [`sbt`] emits the full bracketed traversal, from which the tree shape and
//! every identifier/literal can be recovered. [`xsbt`] emits a compact
//! XML-like form that keeps only expression-level and statement-level nodes.

use crate::cst::{AstNode, NodeKind};

/// Kinds dropped from X-SBT sequences, together with their subtrees.
pub const XSBT_EXCLUDED: &[NodeKind] = &[
    NodeKind::Identifier,
    NodeKind::Literal,
    NodeKind::ArgumentList,
    NodeKind::ParameterList,
    NodeKind::PreprocessorDirective,
    NodeKind::Other,
];

pub fn xsbt_includes(kind: NodeKind) -> bool {
    !XSBT_EXCLUDED.contains(&kind)
}

/// Label of a node in an SBT sequence: the kind, or `kind_text` for
/// identifier and literal leaves.
pub fn sbt_label(n: &AstNode) -> String {
    match (n.kind, n.text()) {
        (NodeKind::Identifier | NodeKind::Literal, Some(text)) if n.is_leaf() => format!("{}_{}", n.kind, text),
        _ => n.kind.as_str().to_string(),
    }
}

pub fn sbt(ast: &AstNode) -> Vec<String> {
    let mut out = Vec::with_capacity(ast.node_count() * 4);
    sbt_into(ast, &mut out);
    out
}

fn sbt_into(n: &AstNode, out: &mut Vec<String>) {
    let label = sbt_label(n);
    out.push("(".into());
    out.push(label.clone());
    for c in &n.children {
        sbt_into(c, out);
    }
    out.push(")".into());
    out.push(label);
}

pub fn xsbt(ast: &AstNode) -> Vec<String> {
    let mut out = Vec::new();
    if xsbt_includes(ast.kind) {
        xsbt_into(ast, &mut out);
    }
    out
}

fn has_included_descendant(n: &AstNode) -> bool {
    n.children.iter().any(|c| xsbt_includes(c.kind))
}

fn xsbt_into(n: &AstNode, out: &mut Vec<String>) {
    let kind = n.kind.as_str();
    if !has_included_descendant(n) {
        out.push(format!("<{kind}/>"));
        return;
    }
    out.push(format!("<{kind}>"));
    for c in n.children.iter().filter(|c| xsbt_includes(c.kind)) {
        xsbt_into(c, out);
    }
    out.push(format!("</{kind}>"));
}

/// Text form used in dataset files: tokens joined by single spaces.
pub fn xsbt_text(ast: &AstNode) -> String {
    xsbt(ast).join(" ")
}

/// Verifies that every opening tag has a matching closing tag at the same
/// depth.
pub fn is_well_nested(seq: &[String]) -> bool {
    let mut stack: Vec<&str> = Vec::new();
    for tok in seq {
        if let Some(inner) = tok.strip_prefix("</").and_then(|t| t.strip_suffix('>')) {
            if stack.pop() != Some(inner) {
                return false;
            }
        } else if tok.starts_with('<') && tok.ends_with("/>") {
            continue;
        } else if let Some(inner) = tok.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            stack.push(inner);
        } else {
            return false;
        }
    }
    stack.is_empty()
}
