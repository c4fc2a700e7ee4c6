use std::collections::HashSet;

use super::ast::{AstNode, NodeKind, Span};
use super::lexer::{tokenize, Token, TokenKind};
use super::render::join_tokens;
use super::CstError;

/// Parses C source into a tree over the fixed node vocabulary.
///
/// Constructs the grammar below does not understand become `other` nodes
/// (role `stmt`) carrying their normalized token text; only unbalanced
/// brackets make parsing fail.
pub fn parse(text: &str) -> Result<AstNode, CstError> {
    let toks = tokenize(text);
    check_balance(&toks)?;
    Ok(Parser::new(&toks, text).translation_unit())
}

fn check_balance(toks: &[Token]) -> Result<(), CstError> {
    let mut stack: Vec<&Token> = Vec::new();
    for t in toks.iter().filter(|t| t.kind == TokenKind::Punctuation) {
        let open = match t.text.as_str() {
            "(" | "[" | "{" => {
                stack.push(t);
                continue;
            }
            ")" => "(",
            "]" => "[",
            "}" => "{",
            _ => continue,
        };
        match stack.pop() {
            Some(o) if o.text == open => {}
            _ => {
                return Err(CstError::Parse {
                    line: t.line,
                    col: t.col,
                    message: format!("unmatched `{}`", t.text),
                })
            }
        }
    }
    match stack.last() {
        Some(o) => Err(CstError::Parse { line: o.line, col: o.col, message: format!("unclosed `{}`", o.text) }),
        None => Ok(()),
    }
}

const STORAGE_AND_QUALIFIERS: &[&str] = &[
    "typedef", "extern", "static", "auto", "register", "const", "volatile", "restrict", "inline",
    "_Noreturn", "_Thread_local", "_Atomic",
];

const TYPE_KEYWORDS: &[&str] =
    &["void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool", "_Complex", "_Imaginary"];

const GNU_SPEC_WORDS: &[&str] = &["__inline", "__inline__", "__restrict", "__restrict__", "__extension__", "__const"];

const KNOWN_TYPES: &[&str] = &[
    "FILE", "DIR", "bool", "va_list", "MPI_Comm", "MPI_Datatype", "MPI_Status", "MPI_Request", "MPI_Op",
    "MPI_Group", "MPI_Win", "MPI_File", "MPI_Info", "MPI_Aint", "MPI_Offset", "MPI_Fint", "MPI_Errhandler",
    "MPI_Message", "MPI_Count", "MPI_User_function",
];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "^=", "|="];

pub(crate) fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 4,
        "&&" => 5,
        "|" => 6,
        "^" => 7,
        "&" => 8,
        "==" | "!=" => 9,
        "<" | ">" | "<=" | ">=" => 10,
        "<<" | ">>" => 11,
        "+" | "-" => 12,
        "*" | "/" | "%" => 13,
        _ => return None,
    })
}

#[derive(Debug)]
struct Fail;

type PResult<T> = Result<T, Fail>;

struct Parser<'t> {
    toks: &'t [Token],
    text: &'t str,
    pos: usize,
    typedefs: HashSet<String>,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], text: &'t str) -> Self {
        Parser { toks, text, pos: 0, typedefs: HashSet::new() }
    }

    // ---- token helpers ----

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + n)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_kw(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(Fail)
        }
    }

    fn bump(&mut self) -> PResult<&'t Token> {
        let t = self.peek().ok_or(Fail)?;
        self.pos += 1;
        Ok(t)
    }

    fn at_closer(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Punctuation && matches!(t.text.as_str(), ")" | "]" | "}"))
    }

    fn span(&self, start: usize) -> Span {
        if self.pos <= start {
            return self.empty_span(start);
        }
        let (first, last) = (&self.toks[start], &self.toks[self.pos - 1]);
        Span {
            start_line: first.line,
            start_col: first.col,
            end_line: last.end_line(),
            start_byte: first.offset,
            end_byte: last.end_offset(),
        }
    }

    fn empty_span(&self, at: usize) -> Span {
        match self.toks.get(at) {
            Some(t) => Span { start_line: t.line, start_col: t.col, end_line: t.line, start_byte: t.offset, end_byte: t.offset },
            None => {
                let line = self.text.matches('\n').count() + 1;
                let col = self.text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
                Span { start_line: line, start_col: col, end_line: line, start_byte: self.text.len(), end_byte: self.text.len() }
            }
        }
    }

    fn node(&self, kind: NodeKind, start: usize, children: Vec<AstNode>) -> AstNode {
        AstNode::new(kind, self.span(start)).with_children(children)
    }

    fn none_node(&self) -> AstNode {
        AstNode::new(NodeKind::Other, self.empty_span(self.pos)).with_op("none")
    }

    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let save = self.pos;
        let r = f(self);
        if r.is_err() {
            self.pos = save;
        }
        r
    }

    fn is_known_type(&self, name: &str) -> bool {
        KNOWN_TYPES.contains(&name) || name.ends_with("_t") || self.typedefs.contains(name)
    }

    fn starts_type_name(&self, t: Option<&Token>) -> bool {
        match t {
            Some(t) if t.kind == TokenKind::Keyword => {
                TYPE_KEYWORDS.contains(&t.text.as_str())
                    || STORAGE_AND_QUALIFIERS.contains(&t.text.as_str())
                    || matches!(t.text.as_str(), "struct" | "union" | "enum")
            }
            Some(t) if t.kind == TokenKind::Identifier => self.is_known_type(&t.text),
            _ => false,
        }
    }

    fn is_declaration_start(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        match t.kind {
            TokenKind::Keyword => {
                self.starts_type_name(Some(t)) || matches!(t.text.as_str(), "_Static_assert" | "_Alignas")
            }
            TokenKind::Identifier => {
                let next = self.peek_at(1);
                let next_is_ident = next.is_some_and(|n| n.kind == TokenKind::Identifier);
                if GNU_SPEC_WORDS.contains(&t.text.as_str()) {
                    return true;
                }
                next_is_ident || (self.is_known_type(&t.text) && next.is_some_and(|n| n.is_punct("*")))
            }
            _ => false,
        }
    }

    // ---- top level ----

    fn translation_unit(&mut self) -> AstNode {
        let mut children = Vec::new();
        while self.pos < self.toks.len() {
            let start = self.pos;
            let item = if self.peek().is_some_and(|t| t.kind == TokenKind::Preprocessor) {
                self.directive()
            } else {
                match self.attempt(|p| p.declaration_or_function(true)) {
                    Ok(n) => n,
                    Err(Fail) => self.generic(start),
                }
            };
            children.push(item);
        }
        let end_line = self.text.matches('\n').count() + 1;
        AstNode::new(
            NodeKind::TranslationUnit,
            Span { start_line: 1, start_col: 1, end_line, start_byte: 0, end_byte: self.text.len() },
        )
        .with_children(children)
    }

    fn directive(&mut self) -> AstNode {
        let start = self.pos;
        let t = &self.toks[self.pos];
        self.pos += 1;
        AstNode::leaf(NodeKind::PreprocessorDirective, t.text.clone(), self.span(start))
    }

    /// Consumes one unparseable construct: up to a `;` at nesting depth
    /// zero, or through a balanced `{ ... }` group.
    fn generic(&mut self, start: usize) -> AstNode {
        self.pos = start;
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Preprocessor && depth == 0 && self.pos > start {
                break;
            }
            if t.kind == TokenKind::Punctuation {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        if t.text == "}" && depth == 0 {
                            self.pos += 1;
                            self.eat_punct(";");
                            break;
                        }
                    }
                    ";" if depth == 0 => {
                        self.pos += 1;
                        break;
                    }
                    _ => {}
                }
            }
            self.pos += 1;
        }
        debug_assert!(self.pos > start, "generic fallback must make progress");
        let text = join_tokens(&self.toks[start..self.pos]);
        AstNode::leaf(NodeKind::Other, text, self.span(start)).with_op("stmt")
    }

    fn declaration_or_function(&mut self, top_level: bool) -> PResult<AstNode> {
        let start = self.pos;
        let specs = self.decl_specifiers(true)?;
        if specs.is_empty() && !top_level {
            return Err(Fail);
        }
        let mut children = specs;
        if self.eat_punct(";") {
            return Ok(self.node(NodeKind::Declaration, start, children));
        }
        let first = self.declarator(false)?.ok_or(Fail)?;
        if top_level && is_function_declarator(&first) && (self.at_punct("{") || self.is_declaration_start()) {
            children.push(first);
            while !self.at_punct("{") {
                let d = self.declaration_or_function(false)?;
                if d.kind != NodeKind::Declaration {
                    return Err(Fail);
                }
                children.push(d);
            }
            children.push(self.compound()?);
            return Ok(self.node(NodeKind::FunctionDefinition, start, children));
        }
        let spec_count = children.len();
        children.push(self.finish_init_declarator(first)?);
        while self.eat_punct(",") {
            let d = self.declarator(false)?.ok_or(Fail)?;
            children.push(self.finish_init_declarator(d)?);
        }
        self.expect_punct(";")?;
        if children[..spec_count].iter().any(|s| s.text() == Some("typedef")) {
            for d in &children[spec_count..] {
                if let Some(name) = declared_name(d) {
                    self.typedefs.insert(name.to_string());
                }
            }
        }
        Ok(self.node(NodeKind::Declaration, start, children))
    }

    fn spec_leaf(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.bump()?;
        Ok(AstNode::leaf(NodeKind::Other, t.text.clone(), self.span(start)).with_op("spec"))
    }

    fn decl_specifiers(&mut self, allow_unknown: bool) -> PResult<Vec<AstNode>> {
        let mut specs = Vec::new();
        let mut saw_type = false;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Keyword if matches!(t.text.as_str(), "struct" | "union" | "enum") => {
                    specs.push(self.struct_specifier()?);
                    saw_type = true;
                }
                TokenKind::Keyword if TYPE_KEYWORDS.contains(&t.text.as_str()) => {
                    specs.push(self.spec_leaf()?);
                    saw_type = true;
                }
                TokenKind::Keyword if STORAGE_AND_QUALIFIERS.contains(&t.text.as_str()) => {
                    specs.push(self.spec_leaf()?);
                }
                TokenKind::Identifier if GNU_SPEC_WORDS.contains(&t.text.as_str()) => {
                    specs.push(self.spec_leaf()?);
                }
                TokenKind::Identifier if matches!(t.text.as_str(), "__attribute__" | "__declspec") => {
                    let start = self.pos;
                    self.pos += 1;
                    if self.at_punct("(") {
                        self.skip_balanced()?;
                    }
                    let text = join_tokens(&self.toks[start..self.pos]);
                    specs.push(AstNode::leaf(NodeKind::Other, text, self.span(start)).with_op("spec"));
                }
                TokenKind::Identifier if !saw_type => {
                    let next = self.peek_at(1);
                    let looks_typed = self.is_known_type(&t.text)
                        || (allow_unknown
                            && next.is_some_and(|n| n.kind == TokenKind::Identifier || n.is_punct("*")));
                    if !looks_typed {
                        break;
                    }
                    specs.push(self.spec_leaf()?);
                    saw_type = true;
                }
                _ => break,
            }
        }
        Ok(specs)
    }

    fn skip_balanced(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            let t = self.bump()?;
            match t.text.as_str() {
                "(" | "[" | "{" if t.kind == TokenKind::Punctuation => depth += 1,
                ")" | "]" | "}" if t.kind == TokenKind::Punctuation => {
                    depth = depth.checked_sub(1).ok_or(Fail)?;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
    }

    fn struct_specifier(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let keyword = self.bump()?.text.clone();
        let mut children = Vec::new();
        if let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Identifier) {
            let s = self.pos;
            self.pos += 1;
            children.push(AstNode::leaf(NodeKind::Identifier, t.text.clone(), self.span(s)));
        }
        if self.at_punct("{") {
            let body_start = self.pos;
            self.pos += 1;
            let mut items = Vec::new();
            let role = if keyword == "enum" {
                while !self.at_punct("}") {
                    items.push(self.enumerator()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                "enumerators"
            } else {
                while !self.at_punct("}") {
                    if self.peek().is_some_and(|t| t.kind == TokenKind::Preprocessor) {
                        items.push(self.directive());
                    } else {
                        items.push(self.member_declaration()?);
                    }
                }
                "fields"
            };
            self.expect_punct("}")?;
            children.push(self.node(NodeKind::Other, body_start, items).with_op(role));
        }
        if children.is_empty() {
            return Err(Fail);
        }
        Ok(self.node(NodeKind::Other, start, children).with_op(keyword))
    }

    fn enumerator(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.bump()?;
        if t.kind != TokenKind::Identifier {
            return Err(Fail);
        }
        let name = AstNode::leaf(NodeKind::Identifier, t.text.clone(), self.span(start));
        if self.eat_punct("=") {
            let value = self.conditional()?;
            return Ok(self.node(NodeKind::AssignmentExpression, start, vec![name, value]).with_op("="));
        }
        Ok(name)
    }

    fn member_declaration(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let mut children = self.decl_specifiers(true)?;
        if children.is_empty() {
            return Err(Fail);
        }
        if !self.at_punct(";") {
            loop {
                let d_start = self.pos;
                let d = self.declarator(false)?;
                let d = if self.eat_punct(":") {
                    let base = d.unwrap_or_else(|| self.none_node());
                    let width = self.conditional()?;
                    self.node(NodeKind::Other, d_start, vec![base, width]).with_op("bitfield")
                } else {
                    d.ok_or(Fail)?
                };
                children.push(d);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(";")?;
        Ok(self.node(NodeKind::Declaration, start, children))
    }

    /// Parses a (possibly abstract) declarator. Returns `None` when nothing
    /// declarator-like is present.
    fn declarator(&mut self, abstract_ok: bool) -> PResult<Option<AstNode>> {
        let start = self.pos;
        if self.eat_punct("*") {
            let mut children = Vec::new();
            while let Some(t) = self.peek() {
                let qualifier = (t.kind == TokenKind::Keyword && matches!(t.text.as_str(), "const" | "volatile" | "restrict" | "_Atomic"))
                    || (t.kind == TokenKind::Identifier && GNU_SPEC_WORDS.contains(&t.text.as_str()));
                if !qualifier {
                    break;
                }
                children.push(self.spec_leaf()?);
            }
            if let Some(inner) = self.declarator(abstract_ok)? {
                children.push(inner);
            }
            return Ok(Some(self.node(NodeKind::Other, start, children).with_op("ptr")));
        }
        let mut base = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Some(AstNode::leaf(NodeKind::Identifier, t.text.clone(), self.span(start)))
            }
            Some(t) if t.is_punct("(") => {
                let next = self.peek_at(1);
                let nested = next.is_some_and(|n| n.is_punct("*") || n.is_punct("^"))
                    || (!abstract_ok && next.is_some_and(|n| n.kind == TokenKind::Identifier || n.is_punct("(")));
                if nested {
                    self.pos += 1;
                    let inner = self.declarator(abstract_ok)?.ok_or(Fail)?;
                    self.expect_punct(")")?;
                    Some(self.node(NodeKind::Other, start, vec![inner]).with_op("paren"))
                } else {
                    None
                }
            }
            _ => None,
        };
        loop {
            if self.at_punct("[") {
                self.pos += 1;
                let size = if self.at_punct("]") { self.none_node() } else { self.assignment()? };
                self.expect_punct("]")?;
                let b = base.take().unwrap_or_else(|| self.none_node_at(start));
                base = Some(self.node(NodeKind::Other, start, vec![b, size]).with_op("array"));
            } else if self.at_punct("(") && (base.is_some() || abstract_ok) {
                let b = base.take().unwrap_or_else(|| self.none_node_at(start));
                let params = self.parameter_list()?;
                base = Some(self.node(NodeKind::Other, start, vec![b, params]).with_op("func"));
            } else {
                break;
            }
        }
        Ok(base)
    }

    fn none_node_at(&self, at: usize) -> AstNode {
        AstNode::new(NodeKind::Other, self.empty_span(at)).with_op("none")
    }

    fn parameter_list(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.at_punct(")") {
            loop {
                let p_start = self.pos;
                if self.eat_punct("...") {
                    params.push(AstNode::new(NodeKind::Other, self.span(p_start)).with_op("ellipsis"));
                } else {
                    let mut children = self.decl_specifiers(true)?;
                    if children.is_empty() {
                        if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                            children.push(self.spec_leaf()?);
                        } else {
                            return Err(Fail);
                        }
                    }
                    if let Some(d) = self.declarator(true)? {
                        children.push(d);
                    }
                    params.push(self.node(NodeKind::Declaration, p_start, children));
                }
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(self.node(NodeKind::ParameterList, start, params))
    }

    fn finish_init_declarator(&mut self, d: AstNode) -> PResult<AstNode> {
        let start_byte = d.span.start_byte;
        if !self.eat_punct("=") {
            return Ok(d);
        }
        let init = self.initializer()?;
        let start = self.toks.iter().position(|t| t.offset == start_byte).ok_or(Fail)?;
        Ok(self.node(NodeKind::Other, start, vec![d, init]).with_op("init"))
    }

    fn initializer(&mut self) -> PResult<AstNode> {
        if self.at_punct("{") {
            self.init_list()
        } else {
            self.assignment()
        }
    }

    fn init_list(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect_punct("{")?;
        let mut items = Vec::new();
        while !self.at_punct("}") {
            items.push(self.initializer()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(self.node(NodeKind::Other, start, items).with_op("init_list"))
    }

    fn type_name(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let mut children = self.decl_specifiers(false)?;
        if children.is_empty() {
            return Err(Fail);
        }
        if let Some(d) = self.declarator(true)? {
            if declared_name(&d).is_some() {
                return Err(Fail);
            }
            children.push(d);
        }
        Ok(self.node(NodeKind::Other, start, children).with_op("type"))
    }

    // ---- statements ----

    fn compound(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect_punct("{")?;
        let mut items = Vec::new();
        while !self.at_punct("}") {
            if self.peek().is_none() {
                return Err(Fail);
            }
            items.push(self.block_item());
        }
        self.expect_punct("}")?;
        Ok(self.node(NodeKind::CompoundStatement, start, items))
    }

    fn block_item(&mut self) -> AstNode {
        let start = self.pos;
        match self.attempt(Self::statement) {
            Ok(n) => n,
            Err(Fail) => self.generic(start),
        }
    }

    /// A statement in a position where one is grammatically required.
    fn sub_statement(&mut self) -> PResult<AstNode> {
        if self.peek().is_none() || self.at_closer() {
            return Err(Fail);
        }
        Ok(self.block_item())
    }

    fn statement(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.peek().ok_or(Fail)?;
        if t.kind == TokenKind::Preprocessor {
            return Ok(self.directive());
        }
        if t.is_punct("{") {
            return self.compound();
        }
        if t.is_punct(";") {
            self.pos += 1;
            return Ok(self.node(NodeKind::ExpressionStatement, start, vec![]));
        }
        if t.kind == TokenKind::Keyword {
            match t.text.as_str() {
                "if" => {
                    self.pos += 1;
                    let cond = self.paren_expression()?;
                    let then = self.sub_statement()?;
                    let mut children = vec![cond, then];
                    if self.at_kw("else") {
                        self.pos += 1;
                        children.push(self.sub_statement()?);
                    }
                    return Ok(self.node(NodeKind::IfStatement, start, children));
                }
                "while" => {
                    self.pos += 1;
                    let cond = self.paren_expression()?;
                    let body = self.sub_statement()?;
                    return Ok(self.node(NodeKind::WhileStatement, start, vec![cond, body]));
                }
                "switch" => {
                    self.pos += 1;
                    let cond = self.paren_expression()?;
                    let body = self.sub_statement()?;
                    return Ok(self.node(NodeKind::SwitchStatement, start, vec![cond, body]));
                }
                "do" => {
                    self.pos += 1;
                    let body = self.sub_statement()?;
                    if !self.at_kw("while") {
                        return Err(Fail);
                    }
                    self.pos += 1;
                    let cond = self.paren_expression()?;
                    self.expect_punct(";")?;
                    return Ok(self.node(NodeKind::DoStatement, start, vec![body, cond]));
                }
                "for" => return self.for_statement(),
                "return" => {
                    self.pos += 1;
                    let mut children = Vec::new();
                    if !self.at_punct(";") {
                        children.push(self.expression()?);
                    }
                    self.expect_punct(";")?;
                    return Ok(self.node(NodeKind::ReturnStatement, start, children));
                }
                "break" | "continue" => {
                    let kind = if t.text == "break" { NodeKind::BreakStatement } else { NodeKind::ContinueStatement };
                    self.pos += 1;
                    self.expect_punct(";")?;
                    return Ok(self.node(kind, start, vec![]));
                }
                "case" => {
                    self.pos += 1;
                    let value = self.conditional()?;
                    self.expect_punct(":")?;
                    let mut children = vec![value];
                    children.extend(self.case_body());
                    return Ok(self.node(NodeKind::LabeledStatement, start, children).with_op("case"));
                }
                "default" => {
                    self.pos += 1;
                    self.expect_punct(":")?;
                    let children = self.case_body();
                    return Ok(self.node(NodeKind::LabeledStatement, start, children).with_op("default"));
                }
                _ => {}
            }
        }
        if t.kind == TokenKind::Identifier && self.peek_at(1).is_some_and(|n| n.is_punct(":")) {
            self.pos += 1;
            let label = AstNode::leaf(NodeKind::Identifier, t.text.clone(), self.span(start));
            self.pos += 1;
            let body = self.sub_statement()?;
            return Ok(self.node(NodeKind::LabeledStatement, start, vec![label, body]).with_op("label"));
        }
        if self.is_declaration_start() {
            return self.declaration_or_function(false);
        }
        let e = self.expression()?;
        self.expect_punct(";")?;
        Ok(self.node(NodeKind::ExpressionStatement, start, vec![e]))
    }

    fn case_body(&mut self) -> Vec<AstNode> {
        let mut items = Vec::new();
        while self.peek().is_some() && !self.at_punct("}") && !self.at_kw("case") && !self.at_kw("default") {
            items.push(self.block_item());
        }
        items
    }

    fn paren_expression(&mut self) -> PResult<AstNode> {
        self.expect_punct("(")?;
        let e = self.expression()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    fn for_statement(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.pos += 1;
        self.expect_punct("(")?;
        let init = if self.at_punct(";") {
            let n = self.none_node();
            self.pos += 1;
            n
        } else if self.is_declaration_start() {
            self.declaration_or_function(false)?
        } else {
            let e = self.expression()?;
            self.expect_punct(";")?;
            e
        };
        let cond = if self.at_punct(";") { self.none_node() } else { self.expression()? };
        self.expect_punct(";")?;
        let step = if self.at_punct(")") { self.none_node() } else { self.expression()? };
        self.expect_punct(")")?;
        let body = self.sub_statement()?;
        Ok(self.node(NodeKind::ForStatement, start, vec![init, cond, step, body]))
    }

    // ---- expressions ----

    fn expression(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let mut left = self.assignment()?;
        while self.eat_punct(",") {
            let right = self.assignment()?;
            left = self.node(NodeKind::BinaryExpression, start, vec![left, right]).with_op(",");
        }
        Ok(left)
    }

    fn assignment(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let left = self.conditional()?;
        if let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Punctuation && ASSIGN_OPS.contains(&t.text.as_str())) {
            self.pos += 1;
            let right = self.assignment()?;
            return Ok(self.node(NodeKind::AssignmentExpression, start, vec![left, right]).with_op(t.text.clone()));
        }
        Ok(left)
    }

    fn conditional(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let cond = self.binary(4)?;
        if self.eat_punct("?") {
            let then = self.expression()?;
            self.expect_punct(":")?;
            let other = self.conditional()?;
            return Ok(self.node(NodeKind::ConditionalExpression, start, vec![cond, then, other]));
        }
        Ok(cond)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<AstNode> {
        let start = self.pos;
        let mut left = self.cast_expression()?;
        while let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Punctuation) {
            let Some(prec) = binary_precedence(&t.text) else { break };
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let right = self.binary(prec + 1)?;
            left = self.node(NodeKind::BinaryExpression, start, vec![left, right]).with_op(t.text.clone());
        }
        Ok(left)
    }

    fn cast_expression(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        if self.at_punct("(") && self.starts_type_name(self.peek_at(1)) {
            let cast = self.attempt(|p| {
                p.pos += 1;
                let ty = p.type_name()?;
                p.expect_punct(")")?;
                let operand = if p.at_punct("{") { p.init_list()? } else { p.cast_expression()? };
                Ok(p.node(NodeKind::CastExpression, start, vec![ty, operand]))
            });
            if cast.is_ok() {
                return cast;
            }
        }
        self.unary()
    }

    fn unary(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.peek().ok_or(Fail)?;
        if t.kind == TokenKind::Punctuation {
            match t.text.as_str() {
                "++" | "--" => {
                    self.pos += 1;
                    let operand = self.unary()?;
                    return Ok(self.node(NodeKind::UnaryExpression, start, vec![operand]).with_op(t.text.clone()));
                }
                "&" | "*" | "+" | "-" | "~" | "!" => {
                    self.pos += 1;
                    let operand = self.cast_expression()?;
                    return Ok(self.node(NodeKind::UnaryExpression, start, vec![operand]).with_op(t.text.clone()));
                }
                _ => {}
            }
        }
        if t.is_keyword("sizeof") || t.is_keyword("_Alignof") {
            self.pos += 1;
            if self.at_punct("(") && self.starts_type_name(self.peek_at(1)) {
                let ty = self.attempt(|p| {
                    p.pos += 1;
                    let ty = p.type_name()?;
                    p.expect_punct(")")?;
                    Ok(ty)
                });
                if let Ok(ty) = ty {
                    return Ok(self.node(NodeKind::UnaryExpression, start, vec![ty]).with_op(t.text.clone()));
                }
            }
            let operand = self.unary()?;
            return Ok(self.node(NodeKind::UnaryExpression, start, vec![operand]).with_op(t.text.clone()));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let mut base = self.primary()?;
        while let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Punctuation) {
            match t.text.as_str() {
                "[" => {
                    self.pos += 1;
                    let index = self.expression()?;
                    self.expect_punct("]")?;
                    base = self.node(NodeKind::SubscriptExpression, start, vec![base, index]);
                }
                "(" => {
                    let args = self.argument_list()?;
                    base = self.node(NodeKind::CallExpression, start, vec![base, args]);
                }
                "." | "->" => {
                    self.pos += 1;
                    let f_start = self.pos;
                    let field = self.bump()?;
                    if field.kind != TokenKind::Identifier {
                        return Err(Fail);
                    }
                    let field = AstNode::leaf(NodeKind::Identifier, field.text.clone(), self.span(f_start));
                    base = self.node(NodeKind::FieldExpression, start, vec![base, field]).with_op(t.text.clone());
                }
                "++" | "--" => {
                    self.pos += 1;
                    base = self.node(NodeKind::UnaryExpression, start, vec![base]).with_op(format!("x{}", t.text));
                }
                _ => break,
            }
        }
        Ok(base)
    }

    fn argument_list(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.at_punct(")") {
            loop {
                args.push(self.assignment()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(self.node(NodeKind::ArgumentList, start, args))
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let start = self.pos;
        let t = self.peek().ok_or(Fail)?;
        match t.kind {
            TokenKind::Identifier => {
                self.pos += 1;
                Ok(AstNode::leaf(NodeKind::Identifier, t.text.clone(), self.span(start)))
            }
            TokenKind::Literal => {
                self.pos += 1;
                let mut text = t.text.clone();
                if is_string_literal(&t.text) {
                    while let Some(n) = self.peek().filter(|n| n.kind == TokenKind::Literal && is_string_literal(&n.text)) {
                        text.push(' ');
                        text.push_str(&n.text);
                        self.pos += 1;
                    }
                }
                Ok(AstNode::leaf(NodeKind::Literal, text, self.span(start)))
            }
            TokenKind::Punctuation if t.text == "(" => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => Err(Fail),
        }
    }
}

fn is_string_literal(text: &str) -> bool {
    text.trim_start_matches(['u', 'U', 'L', '8']).starts_with('"')
}

fn is_function_declarator(d: &AstNode) -> bool {
    match d.op() {
        Some("ptr") => d.children.last().is_some_and(is_function_declarator),
        Some("func") => true,
        _ => false,
    }
}

/// The identifier a declarator (possibly with initializer) introduces.
pub(crate) fn declared_name(d: &AstNode) -> Option<&str> {
    match (d.kind, d.op()) {
        (NodeKind::Identifier, _) => d.text(),
        (NodeKind::Other, Some("ptr")) => d.children.last().and_then(declared_name),
        (NodeKind::Other, Some("func" | "array" | "paren" | "init" | "bitfield")) => {
            d.children.first().and_then(declared_name)
        }
        _ => None,
    }
}
