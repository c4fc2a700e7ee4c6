//! Standardized re-generation of C source from a parsed tree.
//!
//! Output rules: one statement per line, four spaces per block level, braces
//! on their own lines, every control-statement body braced, single spaces
//! around binary operators, no blank lines, no comments, and exactly one
//! trailing newline. Parentheses are re-derived from operator precedence, so
//! redundant ones disappear.

use super::ast::{AstNode, NodeKind};
use super::lexer::{tokenize, Token, TokenKind};
use super::parser::binary_precedence;

const INDENT: &str = "    ";

/// Renders a `translation_unit` tree as standardized source text.
pub fn render(ast: &AstNode) -> String {
    let mut p = Printer::default();
    for item in &ast.children {
        p.statement(item, 0);
    }
    let mut out = p.lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

#[derive(Default)]
struct Printer {
    lines: Vec<String>,
}

impl Printer {
    fn emit(&mut self, depth: usize, text: &str) {
        for piece in text.split('\n') {
            let piece = piece.trim_end();
            if piece.starts_with('#') {
                self.lines.push(piece.to_string());
            } else {
                self.lines.push(format!("{}{}", INDENT.repeat(depth), piece));
            }
        }
    }

    fn statement(&mut self, n: &AstNode, depth: usize) {
        use NodeKind::*;
        match n.kind {
            PreprocessorDirective => {
                let text = normalize_directive(n.text().unwrap_or_default());
                self.lines.push(text);
            }
            Declaration => self.declaration(n, depth),
            FunctionDefinition => {
                let (body, rest) = n.children.split_last().expect("function definition has a body");
                let split = rest.iter().position(|c| !is_specifier(c)).unwrap_or(rest.len());
                let (specs, tail) = rest.split_at(split);
                let (decl, old_style) = tail.split_first().expect("function definition has a declarator");
                self.emit(depth, &join_spec_and_declarator(&render_specs(specs), &declarator(decl)));
                for d in old_style {
                    self.declaration(d, depth);
                }
                self.statement(body, depth);
            }
            CompoundStatement => {
                self.emit(depth, "{");
                for c in &n.children {
                    self.statement(c, depth + 1);
                }
                self.emit(depth, "}");
            }
            IfStatement => self.if_chain(n, depth, ""),
            ForStatement => {
                let [init, cond, step, body] = &n.children[..] else { unreachable!("for statement shape") };
                let init = match init.kind {
                    Declaration => declaration_inline(init),
                    _ if init.is_other("none") => String::new(),
                    _ => expr(init),
                };
                let mut head = format!("for ({init};");
                if !cond.is_other("none") {
                    head.push(' ');
                    head.push_str(&expr(cond));
                }
                head.push(';');
                if !step.is_other("none") {
                    head.push(' ');
                    head.push_str(&expr(step));
                }
                head.push(')');
                self.emit(depth, &head);
                self.body(body, depth);
            }
            WhileStatement => {
                self.emit(depth, &format!("while ({})", expr(&n.children[0])));
                self.body(&n.children[1], depth);
            }
            SwitchStatement => {
                self.emit(depth, &format!("switch ({})", expr(&n.children[0])));
                self.body(&n.children[1], depth);
            }
            DoStatement => {
                self.emit(depth, "do");
                self.body(&n.children[0], depth);
                self.emit(depth, &format!("while ({});", expr(&n.children[1])));
            }
            ReturnStatement => match n.children.first() {
                Some(e) => self.emit(depth, &format!("return {};", expr(e))),
                None => self.emit(depth, "return;"),
            },
            BreakStatement => self.emit(depth, "break;"),
            ContinueStatement => self.emit(depth, "continue;"),
            ExpressionStatement => match n.children.first() {
                Some(e) => self.emit(depth, &format!("{};", expr(e))),
                None => self.emit(depth, ";"),
            },
            LabeledStatement => match n.op() {
                Some("case") => {
                    self.emit(depth, &format!("case {}:", expr(&n.children[0])));
                    for c in &n.children[1..] {
                        self.statement(c, depth + 1);
                    }
                }
                Some("default") => {
                    self.emit(depth, "default:");
                    for c in &n.children {
                        self.statement(c, depth + 1);
                    }
                }
                _ => {
                    self.emit(depth, &format!("{}:", n.children[0].text().unwrap_or_default()));
                    self.statement(&n.children[1], depth);
                }
            },
            _ => self.emit(depth, n.text().unwrap_or_default()),
        }
    }

    fn body(&mut self, n: &AstNode, depth: usize) {
        if n.kind == NodeKind::CompoundStatement {
            self.statement(n, depth);
        } else {
            self.emit(depth, "{");
            self.statement(n, depth + 1);
            self.emit(depth, "}");
        }
    }

    fn if_chain(&mut self, n: &AstNode, depth: usize, prefix: &str) {
        self.emit(depth, &format!("{prefix}if ({})", expr(&n.children[0])));
        self.body(&n.children[1], depth);
        if let Some(other) = n.children.get(2) {
            if other.kind == NodeKind::IfStatement {
                self.if_chain(other, depth, "else ");
            } else {
                self.emit(depth, "else");
                self.body(other, depth);
            }
        }
    }

    fn declaration(&mut self, n: &AstNode, depth: usize) {
        let split = n.children.iter().position(|c| !is_specifier(c)).unwrap_or(n.children.len());
        let (specs, decls) = n.children.split_at(split);
        let body_at = specs.iter().position(|s| matches!(s.op(), Some("struct" | "union")) && struct_body(s).is_some());
        let Some(body_at) = body_at else {
            self.emit(depth, &format!("{};", declaration_inline(n)));
            return;
        };
        let record = &specs[body_at];
        let mut head: Vec<String> = render_specs(&specs[..body_at]);
        head.push(struct_head(record));
        self.emit(depth, &head.join(" "));
        self.emit(depth, "{");
        for m in &struct_body(record).expect("checked above").children {
            self.statement(m, depth + 1);
        }
        let mut tail: Vec<String> = render_specs(&specs[body_at + 1..]);
        let names: Vec<String> = decls.iter().map(declarator).collect();
        if !names.is_empty() {
            tail.push(names.join(", "));
        }
        if tail.is_empty() {
            self.emit(depth, "};");
        } else {
            self.emit(depth, &format!("}} {};", tail.join(" ")));
        }
    }
}

fn is_specifier(n: &AstNode) -> bool {
    n.kind == NodeKind::Other && matches!(n.op(), Some("spec" | "struct" | "union" | "enum"))
}

fn struct_body(n: &AstNode) -> Option<&AstNode> {
    n.children.iter().find(|c| c.is_other("fields") || c.is_other("enumerators"))
}

fn struct_head(n: &AstNode) -> String {
    let mut s = n.op().unwrap_or("struct").to_string();
    if let Some(tag) = n.children.iter().find(|c| c.kind == NodeKind::Identifier) {
        s.push(' ');
        s.push_str(tag.text().unwrap_or_default());
    }
    s
}

fn render_specs(specs: &[AstNode]) -> Vec<String> {
    specs.iter().map(specifier).collect()
}

fn specifier(n: &AstNode) -> String {
    match n.op() {
        Some("spec") => n.text().unwrap_or_default().to_string(),
        _ => {
            let mut s = struct_head(n);
            if let Some(body) = struct_body(n) {
                if body.is_other("enumerators") {
                    let items: Vec<String> = body.children.iter().map(expr).collect();
                    s.push_str(&format!(" {{{}}}", items.join(", ")));
                } else {
                    let items: Vec<String> = body.children.iter().map(inline_member).collect();
                    s.push_str(&format!(" {{{}}}", items.join(" ")));
                }
            }
            s
        }
    }
}

fn inline_member(m: &AstNode) -> String {
    match m.kind {
        NodeKind::Declaration => format!("{};", declaration_inline(m)),
        _ => m.text().map(normalize_directive).unwrap_or_default(),
    }
}

fn join_spec_and_declarator(specs: &[String], decl: &str) -> String {
    let mut s = specs.join(" ");
    if !decl.is_empty() {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(decl);
    }
    s
}

/// A declaration on one line, without the terminating semicolon.
fn declaration_inline(n: &AstNode) -> String {
    let split = n.children.iter().position(|c| !is_specifier(c)).unwrap_or(n.children.len());
    let (specs, decls) = n.children.split_at(split);
    let decls: Vec<String> = decls.iter().map(declarator).collect();
    join_spec_and_declarator(&render_specs(specs), &decls.join(", "))
}

fn declarator(n: &AstNode) -> String {
    match (n.kind, n.op()) {
        (NodeKind::Identifier, _) => n.text().unwrap_or_default().to_string(),
        (NodeKind::Other, Some("none")) => String::new(),
        (NodeKind::Other, Some("ptr")) => {
            let quals: Vec<String> = n.children.iter().filter(|c| c.is_other("spec")).map(specifier).collect();
            let inner = n.children.iter().find(|c| !c.is_other("spec")).map(declarator).unwrap_or_default();
            let mut s = format!("*{}", quals.join(" "));
            if !quals.is_empty() && !inner.is_empty() {
                s.push(' ');
            }
            s + &inner
        }
        (NodeKind::Other, Some("array")) => {
            let size = &n.children[1];
            let size = if size.is_other("none") { String::new() } else { expr(size) };
            format!("{}[{}]", declarator(&n.children[0]), size)
        }
        (NodeKind::Other, Some("func")) => format!("{}({})", declarator(&n.children[0]), parameters(&n.children[1])),
        (NodeKind::Other, Some("paren")) => format!("({})", declarator(&n.children[0])),
        (NodeKind::Other, Some("init")) => format!("{} = {}", declarator(&n.children[0]), initializer(&n.children[1])),
        (NodeKind::Other, Some("bitfield")) => {
            let name = declarator(&n.children[0]);
            let width = expr(&n.children[1]);
            if name.is_empty() {
                format!(": {width}")
            } else {
                format!("{name} : {width}")
            }
        }
        _ => expr(n),
    }
}

fn parameters(list: &AstNode) -> String {
    let params: Vec<String> = list
        .children
        .iter()
        .map(|p| if p.is_other("ellipsis") { "...".to_string() } else { declaration_inline(p) })
        .collect();
    params.join(", ")
}

fn initializer(n: &AstNode) -> String {
    if n.is_other("init_list") {
        let items: Vec<String> = n.children.iter().map(initializer).collect();
        format!("{{{}}}", items.join(", "))
    } else {
        wrap(n, 2)
    }
}

fn type_name(n: &AstNode) -> String {
    declaration_inline(n)
}

/// Binding strength of an expression node, higher binds tighter.
fn precedence(n: &AstNode) -> u8 {
    use NodeKind::*;
    match n.kind {
        BinaryExpression if n.op() == Some(",") => 1,
        BinaryExpression => n.op().and_then(binary_precedence).unwrap_or(13),
        AssignmentExpression => 2,
        ConditionalExpression => 3,
        CastExpression => 14,
        UnaryExpression if n.op().is_some_and(|o| o.starts_with('x')) => 15,
        UnaryExpression => 14,
        CallExpression | SubscriptExpression | FieldExpression => 15,
        _ => 16,
    }
}

fn wrap(n: &AstNode, min: u8) -> String {
    if precedence(n) < min {
        format!("({})", expr(n))
    } else {
        expr(n)
    }
}

fn expr(n: &AstNode) -> String {
    use NodeKind::*;
    match n.kind {
        Identifier | Literal => n.text().unwrap_or_default().to_string(),
        BinaryExpression => {
            let op = n.op().unwrap_or("?");
            if op == "," {
                format!("{}, {}", wrap(&n.children[0], 1), wrap(&n.children[1], 2))
            } else {
                let p = precedence(n);
                format!("{} {} {}", wrap(&n.children[0], p), op, wrap(&n.children[1], p + 1))
            }
        }
        AssignmentExpression => {
            format!("{} {} {}", wrap(&n.children[0], 14), n.op().unwrap_or("="), wrap(&n.children[1], 2))
        }
        ConditionalExpression => format!(
            "{} ? {} : {}",
            wrap(&n.children[0], 4),
            wrap(&n.children[1], 1),
            wrap(&n.children[2], 3)
        ),
        CastExpression => {
            let operand = &n.children[1];
            let operand = if operand.is_other("init_list") { initializer(operand) } else { wrap(operand, 14) };
            format!("({}){}", type_name(&n.children[0]), operand)
        }
        UnaryExpression => {
            let op = n.op().unwrap_or("");
            let child = &n.children[0];
            if let Some(post) = op.strip_prefix('x') {
                return format!("{}{}", wrap(child, 15), post);
            }
            if op == "sizeof" || op == "_Alignof" {
                let inner = if child.is_other("type") { type_name(child) } else { expr(child) };
                return format!("{op}({inner})");
            }
            let inner = wrap(child, 14);
            let merges = matches!(op, "-" | "+" | "&") && inner.starts_with(op);
            if merges {
                format!("{op}({})", expr(child))
            } else {
                format!("{op}{inner}")
            }
        }
        CallExpression => {
            let args: Vec<String> = n.children[1].children.iter().map(|a| wrap(a, 2)).collect();
            format!("{}({})", wrap(&n.children[0], 15), args.join(", "))
        }
        SubscriptExpression => format!("{}[{}]", wrap(&n.children[0], 15), expr(&n.children[1])),
        FieldExpression => format!(
            "{}{}{}",
            wrap(&n.children[0], 15),
            n.op().unwrap_or("."),
            n.children[1].text().unwrap_or_default()
        ),
        Other if n.op() == Some("init_list") => initializer(n),
        Other if n.op() == Some("type") => type_name(n),
        _ => n.text().unwrap_or_default().to_string(),
    }
}

/// Canonical text of a preprocessor line: continuations joined, comments
/// dropped, whitespace runs outside quotes collapsed.
pub fn normalize_directive(raw: &str) -> String {
    let joined = raw.replace("\\\r\n", " ").replace("\\\n", " ");
    let bytes = joined.as_bytes();
    let mut out = String::with_capacity(joined.len());
    let mut i = 0;
    let mut pending_space = false;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            break;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            i = joined[i + 2..].find("*/").map_or(bytes.len(), |j| i + 2 + j + 2);
            pending_space = true;
            continue;
        }
        if c.is_ascii_whitespace() {
            pending_space = true;
            i += 1;
            continue;
        }
        if pending_space && !out.is_empty() {
            out.push(' ');
        }
        pending_space = false;
        if c == b'"' || c == b'\'' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j] != c {
                j += if bytes[j] == b'\\' { 2 } else { 1 };
            }
            let end = (j + 1).min(bytes.len());
            out.push_str(&joined[i..end]);
            i = end;
            continue;
        }
        let ch_len = joined[i..].chars().next().map_or(1, char::len_utf8);
        out.push_str(&joined[i..i + ch_len]);
        i += ch_len;
    }
    out
}

/// Joins raw tokens with canonical spacing. Used for constructs the parser
/// keeps opaque. Spacing never changes how the text re-lexes.
pub(crate) fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev: Option<&Token> = None;
    for t in tokens {
        if let Some(p) = prev {
            if p.kind == TokenKind::Preprocessor || t.kind == TokenKind::Preprocessor {
                out.push('\n');
            } else if needs_space(p, t) {
                out.push(' ');
            }
        }
        if t.kind == TokenKind::Preprocessor {
            out.push_str(&normalize_directive(&t.text));
        } else {
            out.push_str(&t.text);
        }
        prev = Some(t);
    }
    out
}

fn needs_space(a: &Token, b: &Token) -> bool {
    let a_punct = a.kind == TokenKind::Punctuation;
    let b_punct = b.kind == TokenKind::Punctuation;
    let tight = (a_punct && matches!(a.text.as_str(), "(" | "[" | "." | "->" | "!" | "~"))
        || (b_punct && matches!(b.text.as_str(), ")" | "]" | "," | ";" | "." | "->"))
        || (b_punct
            && matches!(b.text.as_str(), "(" | "[")
            && (a.kind == TokenKind::Identifier || (a_punct && matches!(a.text.as_str(), ")" | "]"))));
    if !tight {
        return true;
    }
    let glued = format!("{}{}", a.text, b.text);
    let relexed = tokenize(&glued);
    !(relexed.len() == 2 && relexed[0].text == a.text && relexed[1].text == b.text)
}

#[cfg(test)]
mod tests {
    use super::super::{parse, standardize};
    use super::*;

    fn std(src: &str) -> String {
        standardize(src).unwrap()
    }

    #[test]
    fn minimal_main() {
        assert_eq!(std("int  main( ){return 0; }"), "int main()\n{\n    return 0;\n}\n");
    }

    #[test]
    fn blank_lines_removed() {
        assert_eq!(std("int x ;\n\n\n int y ;"), "int x;\nint y;\n");
    }

    #[test]
    fn empty_program_renders_empty() {
        assert_eq!(std(""), "");
        assert_eq!(std("/* only a comment */\n"), "");
    }

    #[test]
    fn operators_spaced_and_parens_rederived() {
        assert_eq!(std("int f(){return (a+b)*c-(d*e)+(-x);}"), "int f()\n{\n    return (a + b) * c - d * e + -x;\n}\n");
        assert_eq!(std("void f(){x=a-(b-c);y=-(-z);p=&(&q)[0];}"), "void f()\n{\n    x = a - (b - c);\n    y = -(-z);\n    p = &(&q)[0];\n}\n");
    }

    #[test]
    fn bodies_are_braced() {
        let out = std("void f(){if(a)b();else if(c)d();else e(); for(;;)g(); while(x)x--; do y++; while(y<3);}");
        let expected = "void f()\n{\n    if (a)\n    {\n        b();\n    }\n    else if (c)\n    {\n        d();\n    }\n    else\n    {\n        e();\n    }\n    for (;;)\n    {\n        g();\n    }\n    while (x)\n    {\n        x--;\n    }\n    do\n    {\n        y++;\n    }\n    while (y < 3);\n}\n";
        assert_eq!(out, expected);
    }

    #[test]
    fn declarators_and_initializers() {
        assert_eq!(
            std("static const double  *p = &x , a[ 10 ]={1,2,} ; char**argv; int (*fp)(int, char*);"),
            "static const double *p = &x, a[10] = {1, 2};\nchar **argv;\nint (*fp)(int, char *);\n"
        );
    }

    #[test]
    fn struct_bodies_multiline() {
        let out = std("typedef struct point { int x; int y; } point_t; enum color {RED, GREEN=2};");
        assert_eq!(out, "typedef struct point\n{\n    int x;\n    int y;\n} point_t;\nenum color {RED, GREEN = 2};\n");
    }

    #[test]
    fn directives_normalized() {
        assert_eq!(std("#include  <mpi.h> // mpi\n#define  N \\\n  100\nint x;"), "#include <mpi.h>\n#define N 100\nint x;\n");
    }

    #[test]
    fn switch_layout() {
        let out = std("void f(int x){switch(x){case 1: a(); break; default: b();}}");
        assert_eq!(
            out,
            "void f(int x)\n{\n    switch (x)\n    {\n        case 1:\n            a();\n            break;\n        default:\n            b();\n    }\n}\n"
        );
    }

    #[test]
    fn casts_sizeof_fields() {
        assert_eq!(
            std("void f(){ y = (double) s->n / sizeof x + sizeof (int) * p.q[i++]; }"),
            "void f()\n{\n    y = (double)s->n / sizeof(x) + sizeof(int) * p.q[i++];\n}\n"
        );
    }

    #[test]
    fn opaque_constructs_keep_tokens() {
        let out = std("void f(){ goto  done ; done: return; }");
        assert_eq!(out, "void f()\n{\n    goto done;\n    done:\n    return;\n}\n");
    }

    #[test]
    fn join_tokens_never_merges() {
        let toks = tokenize("a - - b ! = c");
        let joined = join_tokens(&toks);
        assert_eq!(tokenize(&joined).texts(), toks.texts());
    }

    #[test]
    fn idempotent_on_sample() {
        let src = "#include <stdio.h>\nint g(int*a,int n){int s=0;for(int i=0;i<n;i++)s+=a[i];return s;}\nint main(int argc,char**argv){int v[4]={1,2,3,4};printf(\"%d\\n\",g(v,4));return 0;}";
        let once = std(src);
        assert_eq!(std(&once), once);
        assert!(!once.lines().any(|l| l.ends_with(' ')));
        assert!(parse(&once).is_ok());
    }
}
