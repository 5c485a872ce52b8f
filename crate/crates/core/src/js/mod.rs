//! Parser, printer and analyses for the JavaScript subset used by PoCs.

pub mod ast;
pub mod edit;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod scope;
pub mod visit;

use std::collections::BTreeSet;
use std::fmt::Write as _;

pub use ast::*;
pub use scope::{analyze, ScopeInfo, Undeclared};
use visit::{walk_program, ExprInfo, FnInfo, StmtInfo, Visitor};

/// First syntax error: byte offset plus a hint of what was expected there.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: expected {expected}")]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: String,
}

impl SyntaxError {
    pub fn new(offset: usize, expected: &str) -> Self {
        SyntaxError { offset, expected: expected.to_string() }
    }
}

pub fn parse(text: &str) -> Result<Ast, SyntaxError> {
    let program = parser::Parser::new(text)?.parse_program()?;
    Ok(Ast::new(program))
}

/// Parses a standalone expression (no trailing tokens).
pub fn parse_expression(text: &str) -> Result<Expr, SyntaxError> {
    parser::Parser::new(text)?.parse_lone_expression()
}

pub fn print(ast: &Ast) -> String {
    print_program(&ast.program)
}

pub fn print_program(p: &Program) -> String {
    let mut pr = printer::Printer::new();
    pr.program(p);
    pr.finish()
}

pub fn print_expr(e: &Expr) -> String {
    let mut pr = printer::Printer::new();
    pr.expr(e, 0);
    pr.finish()
}

pub fn print_stmt(s: &Stmt) -> String {
    print_program(&Program { body: vec![s.clone()] })
}

/// Reformats source text; `None` when it does not parse.
pub fn canonicalize(text: &str) -> Option<String> {
    parse(text).ok().map(|a| print(&a))
}

struct Enumerate {
    kind: NodeKind,
    out: Vec<usize>,
    functions: usize,
}

impl Visitor for Enumerate {
    fn enter_stmt(&mut self, s: &Stmt, info: StmtInfo) -> bool {
        match self.kind {
            NodeKind::Statement => self.out.push(info.index),
            NodeKind::Declaration if matches!(s.kind, StmtKind::Var(_) | StmtKind::Function(_)) => {
                self.out.push(info.index)
            }
            _ => {}
        }
        true
    }

    fn enter_expr(&mut self, _e: &Expr, info: ExprInfo) -> bool {
        if self.kind == NodeKind::Expression {
            self.out.push(info.index);
        }
        true
    }

    fn enter_function(&mut self, _f: FnInfo<'_>) {
        if self.kind == NodeKind::Function {
            self.out.push(self.functions);
        }
        self.functions += 1;
    }
}

/// Pre-order refs of every node of `kind`.
///
/// Statement, Declaration and Expression refs index the pre-order statement
/// or expression numbering; Function refs count function boundaries
/// (declarations, expressions, methods and arrows).
pub fn enumerate_nodes(ast: &Ast, kind: NodeKind) -> Vec<NodeRef> {
    if kind == NodeKind::Program {
        return vec![NodeRef { ast: ast.id(), index: 0, kind }];
    }
    let mut e = Enumerate { kind, out: Vec::new(), functions: 0 };
    walk_program(&mut e, &ast.program);
    e.out.into_iter().map(|index| NodeRef { ast: ast.id(), index, kind }).collect()
}

struct Find {
    stmt: Option<usize>,
    expr: Option<usize>,
    found_stmt: Option<(Stmt, StmtInfo)>,
    found_expr: Option<(Expr, ExprInfo)>,
}

impl Visitor for Find {
    fn enter_stmt(&mut self, s: &Stmt, info: StmtInfo) -> bool {
        if Some(info.index) == self.stmt {
            self.found_stmt = Some((s.clone(), info));
        }
        self.found_stmt.is_none() && self.found_expr.is_none()
    }

    fn enter_expr(&mut self, e: &Expr, info: ExprInfo) -> bool {
        if Some(info.index) == self.expr {
            self.found_expr = Some((e.clone(), info));
        }
        self.found_expr.is_none()
    }
}

/// Copy of statement number `index` (pre-order) and its walk context.
pub fn stmt_at(program: &Program, index: usize) -> Option<(Stmt, StmtInfo)> {
    let mut f = Find { stmt: Some(index), expr: None, found_stmt: None, found_expr: None };
    walk_program(&mut f, program);
    f.found_stmt
}

/// Copy of expression number `index` (pre-order) and its walk context.
pub fn expr_at(program: &Program, index: usize) -> Option<(Expr, ExprInfo)> {
    let mut f = Find { stmt: None, expr: Some(index), found_stmt: None, found_expr: None };
    walk_program(&mut f, program);
    f.found_expr
}

/// Resolves a statement or expression ref; `None` for stale refs.
pub fn node_text(ast: &Ast, r: NodeRef) -> Option<String> {
    if !r.belongs_to(ast) {
        return None;
    }
    match r.kind {
        NodeKind::Program => Some(print(ast)),
        NodeKind::Statement | NodeKind::Declaration => stmt_at(&ast.program, r.index).map(|(s, _)| print_stmt(&s)),
        NodeKind::Expression => expr_at(&ast.program, r.index).map(|(e, _)| print_expr(&e)),
        NodeKind::Function => None,
    }
}

/// Identifiers visible immediately before statement `position` (pre-order
/// statement index). A position one past the last statement means the end
/// of the program.
pub fn scope_at(ast: &Ast, position: usize) -> BTreeSet<String> {
    let info = analyze(&ast.program);
    match info.before_stmt(position) {
        Some(s) => s.clone(),
        None => info.at_boundary(0, ast.program.body.len()).cloned().unwrap_or_default(),
    }
}

/// Identifier references that resolve to no declaration, builtin or
/// implicitly created global.
pub fn undeclared_references(ast: &Ast) -> Vec<Undeclared> {
    analyze(&ast.program).undeclared
}

/// Indented one-node-per-line dump for golden tests.
pub fn debug_dump(ast: &Ast) -> String {
    struct Dump {
        out: String,
        depth: usize,
    }
    impl Dump {
        fn line(&mut self, text: &str) {
            for _ in 0..self.depth {
                self.out.push_str("  ");
            }
            self.out.push_str(text);
            self.out.push('\n');
        }
    }
    impl Visitor for Dump {
        fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
            let mut label = s.kind_name().to_string();
            match &s.kind {
                StmtKind::Var(v) => {
                    let names: Vec<_> = v.decls.iter().map(|d| d.name.as_str()).collect();
                    let _ = write!(label, " {} {}", v.kind.as_str(), names.join(","));
                }
                StmtKind::Function(f) => {
                    let _ = write!(label, " {}({})", f.name.as_deref().unwrap_or(""), f.params.join(","));
                }
                _ => {}
            }
            self.line(&label);
            self.depth += 1;
            true
        }
        fn leave_stmt(&mut self, _s: &Stmt, _info: StmtInfo) {
            self.depth -= 1;
        }
        fn enter_expr(&mut self, e: &Expr, _info: ExprInfo) -> bool {
            let label = match &e.kind {
                ExprKind::Ident(n) => format!("ident {n}"),
                ExprKind::Num(r) | ExprKind::Regex(r) => format!("{} {r}", e.kind.name()),
                ExprKind::Str { raw, .. } => format!("str {raw}"),
                ExprKind::Binary { op, .. } => format!("{} {}", e.kind.name(), op.as_str()),
                ExprKind::Assign { op, .. } => format!("assign {}", op.as_str()),
                ExprKind::Unary { op, .. } => format!("unary {}", op.as_str()),
                ExprKind::Member { prop: MemberProp::Name(n), .. } => format!("member .{n}"),
                _ => e.kind.name().to_string(),
            };
            self.line(&label);
            self.depth += 1;
            true
        }
        fn leave_expr(&mut self, _e: &Expr, _info: ExprInfo) {
            self.depth -= 1;
        }
    }
    let mut d = Dump { out: String::new(), depth: 0 };
    walk_program(&mut d, &ast.program);
    d.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_var() {
        let ast = parse("var a = 1;").unwrap();
        assert_eq!(ast.program.body.len(), 1);
        assert!(matches!(&ast.program.body[0].kind, StmtKind::Var(v) if v.decls[0].name == "a"));
    }

    #[test]
    fn unterminated_for_reports_offset_seven() {
        let err = parse("for (;;").unwrap_err();
        assert_eq!(err.offset, 7);
    }

    #[test]
    fn canonical_var() {
        assert_eq!(canonicalize("var  a=1 ;").unwrap(), "var a = 1;\n");
    }

    #[test]
    fn empty_program_prints_empty() {
        assert_eq!(print(&parse("").unwrap()), "");
        assert!(enumerate_nodes(&parse("").unwrap(), NodeKind::Expression).is_empty());
    }

    #[test]
    fn enumerates_assignment_expressions() {
        let ast = parse("x = a + b;").unwrap();
        let refs = enumerate_nodes(&ast, NodeKind::Expression);
        let texts: Vec<_> = refs.iter().map(|r| node_text(&ast, *r).unwrap()).collect();
        assert_eq!(texts, vec!["x = a + b", "x", "a + b", "a", "b"]);
    }

    #[test]
    fn enumerates_if_statements() {
        let ast = parse("if (c) { s(); }").unwrap();
        let refs = enumerate_nodes(&ast, NodeKind::Statement);
        let kinds: Vec<_> = refs.iter().map(|r| stmt_at(&ast.program, r.index()).unwrap().0.kind_name()).collect();
                assert_eq!(kinds, vec!["if", "block", "expr"]);
    }

    #[test]
    fn refs_go_stale_after_reparse() {
        let a = parse("f();").unwrap();
        let r = enumerate_nodes(&a, NodeKind::Statement)[0];
        let b = parse("f();").unwrap();
        assert!(r.belongs_to(&a));
        assert!(!r.belongs_to(&b));
        assert_eq!(node_text(&b, r), None);
    }

    #[test]
    fn scope_examples() {
        let ast = parse("var a = 1;").unwrap();
        assert_eq!(scope_at(&ast, 1), ["a".to_string()].into_iter().collect());
        let ast = parse("let b = 2;").unwrap();
        assert!(scope_at(&ast, 0).is_empty());
        let ast = parse("function f(p) { q(); }").unwrap();
        let got: Vec<_> = scope_at(&ast, 1).into_iter().collect();
        assert_eq!(got, vec!["f", "p"]);
    }

    #[test]
    fn dump_is_indented() {
        let d = debug_dump(&parse("x = 1;").unwrap());
        assert_eq!(d, "expr\n  assign =\n    ident x\n    num 1\n");
    }
}
