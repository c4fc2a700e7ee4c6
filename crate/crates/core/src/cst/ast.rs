use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! node_kinds {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// The fixed node vocabulary every parsed tree is expressed in.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum NodeKind {
            $($variant),*
        }

        impl NodeKind {
            pub const ALL: &'static [NodeKind] = &[$(NodeKind::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(NodeKind::$variant => $name),*
                }
            }
        }

        impl FromStr for NodeKind {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(NodeKind::$variant),)*
                    _ => Err(format!("unknown node kind `{s}`")),
                }
            }
        }
    };
}

node_kinds! {
    TranslationUnit => "translation_unit",
    FunctionDefinition => "function_definition",
    Declaration => "declaration",
    CompoundStatement => "compound_statement",
    IfStatement => "if_statement",
    ForStatement => "for_statement",
    WhileStatement => "while_statement",
    DoStatement => "do_statement",
    SwitchStatement => "switch_statement",
    ReturnStatement => "return_statement",
    BreakStatement => "break_statement",
    ContinueStatement => "continue_statement",
    ExpressionStatement => "expression_statement",
    LabeledStatement => "labeled_statement",
    CallExpression => "call_expression",
    BinaryExpression => "binary_expression",
    UnaryExpression => "unary_expression",
    AssignmentExpression => "assignment_expression",
    ConditionalExpression => "conditional_expression",
    CastExpression => "cast_expression",
    SubscriptExpression => "subscript_expression",
    FieldExpression => "field_expression",
    Identifier => "identifier",
    Literal => "literal",
    ArgumentList => "argument_list",
    ParameterList => "parameter_list",
    PreprocessorDirective => "preprocessor_directive",
    Other => "other",
}

impl NodeKind {
    pub fn is_statement(self) -> bool {
        use NodeKind::*;
        matches!(
            self,
            FunctionDefinition
                | Declaration
                | CompoundStatement
                | IfStatement
                | ForStatement
                | WhileStatement
                | DoStatement
                | SwitchStatement
                | ReturnStatement
                | BreakStatement
                | ContinueStatement
                | ExpressionStatement
                | LabeledStatement
                | PreprocessorDirective
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Source extent of a node. Lines and columns are 1-based, byte offsets are
/// half-open.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub start_byte: usize,
    pub end_byte: usize,
}

impl Span {
    pub fn contains(&self, other: &Span) -> bool {
        self.start_byte <= other.start_byte && other.end_byte <= self.end_byte
    }
}

/// Roles of `other` nodes and operator text of expression nodes live in
/// `op`. Postfix `++`/`--` are spelled `"x++"` / `"x--"` so the operator
/// alone identifies the fixity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: NodeKind,
    pub children: Vec<AstNode>,
    pub span: Span,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub leaf_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub op: Option<String>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Span) -> Self {
        AstNode { kind, children: Vec::new(), span, leaf_text: None, op: None }
    }

    pub fn leaf(kind: NodeKind, text: impl Into<String>, span: Span) -> Self {
        AstNode { kind, children: Vec::new(), span, leaf_text: Some(text.into()), op: None }
    }

    pub fn with_op(mut self, op: impl Into<String>) -> Self {
        self.op = Some(op.into());
        self
    }

    pub fn with_children(mut self, children: Vec<AstNode>) -> Self {
        self.children = children;
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn op(&self) -> Option<&str> {
        self.op.as_deref()
    }

    pub fn text(&self) -> Option<&str> {
        self.leaf_text.as_deref()
    }

    pub fn is_other(&self, role: &str) -> bool {
        self.kind == NodeKind::Other && self.op() == Some(role)
    }

    /// Number of nodes in this subtree, including itself.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AstNode::node_count).sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a AstNode, &[&'a AstNode])) {
        let mut stack = Vec::new();
        self.walk_inner(&mut stack, f);
    }

    fn walk_inner<'a>(&'a self, ancestors: &mut Vec<&'a AstNode>, f: &mut impl FnMut(&'a AstNode, &[&'a AstNode])) {
        f(self, ancestors);
        ancestors.push(self);
        for c in &self.children {
            c.walk_inner(ancestors, f);
        }
        ancestors.pop();
    }

    /// For call expressions, the callee's name when it is a plain identifier.
    pub fn callee_name(&self) -> Option<&str> {
        if self.kind != NodeKind::CallExpression {
            return None;
        }
        let callee = self.children.first()?;
        (callee.kind == NodeKind::Identifier).then(|| callee.text()).flatten()
    }

    /// Name declared by a function definition, if it can be found.
    pub fn function_name(&self) -> Option<&str> {
        if self.kind != NodeKind::FunctionDefinition {
            return None;
        }
        self.children.iter().find_map(declarator_name)
    }

    /// The body of a function definition.
    pub fn function_body(&self) -> Option<&AstNode> {
        if self.kind != NodeKind::FunctionDefinition {
            return None;
        }
        self.children.last().filter(|c| c.kind == NodeKind::CompoundStatement)
    }

    /// Checks the structural invariants: children are contained in their
    /// parent and ordered without overlap, leaves have no children, and
    /// identifier/literal leaves carry text.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut err = None;
        self.walk(&mut |n, _| {
            if err.is_some() {
                return;
            }
            if matches!(n.kind, NodeKind::Identifier | NodeKind::Literal) {
                if !n.is_leaf() {
                    err = Some(format!("{} node has children", n.kind));
                } else if n.text().is_none_or(str::is_empty) {
                    err = Some(format!("{} leaf without text at line {}", n.kind, n.span.start_line));
                }
            }
            let mut prev_end = n.span.start_byte;
            for c in &n.children {
                if !n.span.contains(&c.span) {
                    err = Some(format!("{} child {} escapes parent span at line {}", n.kind, c.kind, c.span.start_line));
                    return;
                }
                if c.span.start_byte < prev_end {
                    err = Some(format!("{} children overlap at line {}", n.kind, c.span.start_line));
                    return;
                }
                prev_end = c.span.end_byte;
            }
        });
        err.map_or(Ok(()), Err)
    }
}

fn declarator_name(node: &AstNode) -> Option<&str> {
    match node.kind {
        NodeKind::Identifier => node.text(),
        NodeKind::Other if matches!(node.op(), Some("ptr" | "func" | "paren" | "array")) => {
            node.children.first().and_then(declarator_name)
        }
        _ => None,
    }
}

/// A parsed (or unparseable) source file.
#[derive(Clone, Debug)]
pub struct SourceUnit {
    pub path: String,
    pub text: String,
    pub parse_ok: bool,
    pub ast: Option<AstNode>,
}

impl SourceUnit {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let ast = super::parse(&text).ok();
        SourceUnit { path: path.into(), text, parse_ok: ast.is_some(), ast }
    }
}
