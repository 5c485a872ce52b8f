//! Index-addressed tree edits.
//!
//! Edits are keyed by the pre-order numbering of [`super::visit`] on the
//! unedited tree. They are applied in post-order hooks so that numbering is
//! not disturbed while the walk is in progress. Deletions put a sentinel in
//! place and [`cleanup`] then removes or neutralizes it depending on where it
//! sits.

use std::collections::HashMap;

use super::ast::*;
use super::visit::{walk_program_mut, ExprInfo, ListInfo, StmtInfo, VisitorMut};

/// Identifier name no parser can produce.
const SENTINEL: &str = "\u{0}deleted";

pub fn sentinel_expr() -> Expr {
    Expr::ident(SENTINEL)
}

pub fn sentinel_stmt() -> Stmt {
    Stmt::expr(sentinel_expr())
}

pub fn is_sentinel_expr(e: &Expr) -> bool {
    e.as_ident() == Some(SENTINEL)
}

pub fn is_sentinel_stmt(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::Expr(e) if is_sentinel_expr(e))
}

/// A batch of edits against one numbering of a program.
#[derive(Debug, Default, Clone)]
pub struct Edits {
    pub exprs: HashMap<usize, Expr>,
    pub stmts: HashMap<usize, Stmt>,
    /// list index -> (position, statement); positions refer to the unedited list.
    pub inserts: HashMap<usize, Vec<(usize, Stmt)>>,
}

impl Edits {
    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty() && self.stmts.is_empty() && self.inserts.is_empty()
    }

    pub fn replace_expr(&mut self, index: usize, with: Expr) {
        self.exprs.insert(index, with);
    }

    pub fn replace_stmt(&mut self, index: usize, with: Stmt) {
        self.stmts.insert(index, with);
    }

    pub fn delete_stmt(&mut self, index: usize) {
        self.stmts.insert(index, sentinel_stmt());
    }

    pub fn insert_stmt(&mut self, list: usize, pos: usize, stmt: Stmt) {
        self.inserts.entry(list).or_default().push((pos, stmt));
    }
}

struct Applier<'a> {
    edits: &'a mut Edits,
}

impl VisitorMut for Applier<'_> {
    fn leave_list(&mut self, list: &mut Vec<Stmt>, info: ListInfo) {
        if let Some(mut ins) = self.edits.inserts.remove(&info.index) {
            // Back to front so earlier positions stay valid; statements
            // sharing a position keep the order they were added in.
            let mut ins: Vec<(usize, usize, Stmt)> = ins.drain(..).enumerate().map(|(i, (pos, s))| (pos, i, s)).collect();
            ins.sort_by_key(|(pos, i, _)| std::cmp::Reverse((*pos, *i)));
            for (pos, _, s) in ins {
                list.insert(pos.min(list.len()), s);
            }
        }
    }

    fn leave_stmt(&mut self, s: &mut Stmt, info: StmtInfo) {
        if let Some(new) = self.edits.stmts.remove(&info.index) {
            *s = new;
        }
    }

    fn leave_expr(&mut self, e: &mut Expr, info: ExprInfo) {
        if let Some(new) = self.edits.exprs.remove(&info.index) {
            *e = new;
        }
    }
}

/// Applies `edits` then runs [`cleanup`]. Returns false if some edit
/// addressed a node that does not exist.
pub fn apply(program: &mut Program, mut edits: Edits) -> bool {
    walk_program_mut(&mut Applier { edits: &mut edits }, program);
    cleanup(program);
    edits.is_empty()
}

/// Removes sentinels: from statement lists and expression lists they
/// disappear, optional children become absent, everything else becomes `0`.
pub fn cleanup(program: &mut Program) {
    clean_list(&mut program.body);
}

fn zero() -> Expr {
    Expr::num("0")
}

fn clean_list(list: &mut Vec<Stmt>) {
    for s in list.iter_mut() {
        clean_stmt(s);
    }
    list.retain(|s| !is_sentinel_stmt(s));
}

fn clean_single(s: &mut Stmt) {
    clean_stmt(s);
    if is_sentinel_stmt(s) {
        *s = Stmt::new(StmtKind::Empty);
    }
}

fn clean_required(e: &mut Expr) {
    clean_expr(e);
    if is_sentinel_expr(e) {
        *e = zero();
    }
}

fn clean_optional(e: &mut Option<Expr>) {
    if let Some(x) = e {
        clean_expr(x);
        if is_sentinel_expr(x) {
            *e = None;
        }
    }
}

fn clean_items(items: &mut Vec<Expr>) {
    for x in items.iter_mut() {
        clean_expr(x);
    }
    items.retain(|x| !is_sentinel_expr(x));
}

fn clean_var(v: &mut VarDecl) {
    for d in &mut v.decls {
        if v.kind == VarKind::Const {
            if let Some(init) = &mut d.init {
                clean_required(init);
            }
        } else {
            clean_optional(&mut d.init);
        }
    }
}

fn clean_function(f: &mut Function) {
    clean_list(&mut f.body);
}

fn clean_stmt(s: &mut Stmt) {
    match &mut s.kind {
        StmtKind::Var(v) => clean_var(v),
        StmtKind::Function(f) => clean_function(f),
        StmtKind::Expr(e) => {
            // A deleted statement expression deletes the statement.
            clean_expr(e);
        }
        StmtKind::Block(b) => clean_list(b),
        StmtKind::Empty | StmtKind::Break | StmtKind::Continue => {}
        StmtKind::If { test, cons, alt } => {
            clean_required(test);
            clean_single(cons);
            if let Some(a) = alt {
                clean_single(a);
            }
        }
        StmtKind::For { init, test, update, body } => {
            match init {
                Some(ForInit::Var(v)) => clean_var(v),
                Some(ForInit::Expr(e)) => {
                    clean_expr(e);
                    if is_sentinel_expr(e) {
                        *init = None;
                    }
                }
                None => {}
            }
            clean_optional(test);
            clean_optional(update);
            clean_single(body);
        }
        StmtKind::ForIn { head, right, body, .. } => {
            if let ForHead::Expr(e) = head {
                clean_expr(e);
            }
            clean_required(right);
            clean_single(body);
        }
        StmtKind::While { test, body } => {
            clean_required(test);
            clean_single(body);
        }
        StmtKind::DoWhile { body, test } => {
            clean_single(body);
            clean_required(test);
        }
        StmtKind::Return(arg) => clean_optional(arg),
        StmtKind::Throw(e) => clean_required(e),
        StmtKind::Try { block, handler, finalizer } => {
            clean_list(block);
            if let Some(h) = handler {
                clean_list(&mut h.body);
            }
            if let Some(f) = finalizer {
                clean_list(f);
            }
        }
    }
}

fn clean_expr(e: &mut Expr) {
    match &mut e.kind {
        ExprKind::Num(_)
        | ExprKind::Str { .. }
        | ExprKind::Regex(_)
        | ExprKind::Bool(_)
        | ExprKind::Null
        | ExprKind::Ident(_)
        | ExprKind::This => {}
        ExprKind::Template { exprs, .. } => exprs.iter_mut().for_each(clean_required),
        ExprKind::Array(items) => clean_items(items),
        ExprKind::Seq(items) => {
            clean_items(items);
            match items.len() {
                0 => *e = sentinel_expr(),
                1 => *e = items.pop().expect("one item"),
                _ => {}
            }
        }
        ExprKind::Object(props) => {
            for p in props.iter_mut() {
                if let PropKey::Computed(k) = &mut p.key {
                    clean_required(k);
                }
                match p.kind {
                    PropKind::Method | PropKind::Get | PropKind::Set => {
                        if let ExprKind::Function(f) = &mut p.value.kind {
                            clean_function(f);
                        }
                    }
                    PropKind::Init => clean_required(&mut p.value),
                    PropKind::Shorthand => {
                        clean_required(&mut p.value);
                        // A replaced shorthand value needs the long form to print.
                        let same = matches!((&p.key, p.value.as_ident()), (PropKey::Ident(k), Some(v)) if k == v);
                        if !same {
                            p.kind = PropKind::Init;
                        }
                    }
                }
            }
        }
        ExprKind::Function(f) => clean_function(f),
        ExprKind::Arrow { body, .. } => match body {
            ArrowBody::Block(b) => clean_list(b),
            ArrowBody::Expr(x) => clean_required(x),
        },
        ExprKind::Member { object, prop } => {
            clean_required(object);
            if let MemberProp::Computed(p) = prop {
                clean_required(p);
            }
        }
        ExprKind::Call { callee, args } | ExprKind::New { callee, args } => {
            clean_required(callee);
            clean_items(args);
        }
        ExprKind::Unary { arg, .. } => clean_required(arg),
        ExprKind::Update { arg, .. } => clean_expr(arg),
        ExprKind::Binary { left, right, .. } => {
            clean_required(left);
            clean_required(right);
        }
        ExprKind::Assign { target, value, .. } => {
            clean_expr(target);
            clean_required(value);
        }
        ExprKind::Cond { test, cons, alt } => {
            clean_required(test);
            clean_required(cons);
            clean_required(alt);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::js::{parse, print};

    fn edited(src: &str, f: impl FnOnce(&mut Edits)) -> String {
        let mut ast = parse(src).unwrap();
        let mut e = Edits::default();
        f(&mut e);
        assert!(apply(&mut ast.program, e));
        print(&ast)
    }

    #[test]
    fn deleting_statement_expression_removes_statement() {
        // Expressions: 0 = f(), 1 = f, 2 = g(), 3 = g
        let out = edited("f();\ng();", |e| e.replace_expr(0, sentinel_expr()));
        assert_eq!(out, "g();\n");
    }

    #[test]
    fn deleting_list_items_and_optionals() {
        let out = edited("var a = [1, 2, 3];", |e| e.replace_expr(2, sentinel_expr()));
        assert_eq!(out, "var a = [1, 3];\n");
        let out = edited("var a = 1;", |e| e.replace_expr(0, sentinel_expr()));
        assert_eq!(out, "var a;\n");
        let out = edited("const a = 1;", |e| e.replace_expr(0, sentinel_expr()));
        assert_eq!(out, "const a = 0;\n");
    }

    #[test]
    fn deleting_required_child_yields_zero() {
        let out = edited("x = a + b;", |e| e.replace_expr(3, sentinel_expr()));
        assert_eq!(out, "x = 0 + b;\n");
    }

    #[test]
    fn sequences_collapse() {
        let out = edited("x = (a, b);", |e| e.replace_expr(3, sentinel_expr()));
        assert_eq!(out, "x = b;\n");
    }

    #[test]
    fn single_slot_statement_becomes_empty() {
        let out = edited("if (c) f();", |e| e.delete_stmt(1));
        assert_eq!(parse(&out).unwrap().program.body.len(), 1);
        assert!(out.contains(';'));
    }

    #[test]
    fn replaced_shorthand_property_gets_long_form() {
        // Expressions: 0 = x = {a}, 1 = x, 2 = {a}, 3 = a
        let out = edited("x = {a};", |e| e.replace_expr(3, Expr::num("1")));
        assert_eq!(out, "x = { a: 1 };\n");
        let out = edited("x = {a};", |e| e.replace_expr(3, sentinel_expr()));
        assert_eq!(out, "x = { a: 0 };\n");
    }

    #[test]
    fn inserts_use_original_positions() {
        let out = edited("a();\nb();", |e| {
            e.insert_stmt(0, 1, parse("x();").unwrap().program.body.remove(0));
            e.insert_stmt(0, 2, parse("y();").unwrap().program.body.remove(0));
            e.delete_stmt(0);
        });
        assert_eq!(out, "x();\nb();\ny();\n");
        let out = edited("a();", |e| {
            e.insert_stmt(0, 0, parse("x();").unwrap().program.body.remove(0));
            e.insert_stmt(0, 0, parse("y();").unwrap().program.body.remove(0));
        });
        assert_eq!(out, "x();\ny();\na();\n");
    }

    #[test]
    fn unknown_index_reports_failure() {
        let mut ast = parse("f();").unwrap();
        let mut e = Edits::default();
        e.replace_expr(99, Expr::num("1"));
        assert!(!apply(&mut ast.program, e));
    }
}
