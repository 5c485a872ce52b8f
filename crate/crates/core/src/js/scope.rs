//! Static scope analysis: which program identifiers are visible at each
//! statement position, and which references resolve to nothing.

use std::collections::BTreeSet;

use super::ast::*;
use super::visit::{walk_program, FnInfo, ListInfo, ListKind, StmtInfo, Visitor};
use super::visit::ExprInfo;

/// Globals every supported engine shell provides (plus `print`).
pub const BUILTINS: &[&str] = &[
    "print", "console", "gc", "Math", "JSON", "Reflect", "Proxy", "Symbol", "Object", "Function",
    "Array", "String", "Number", "Boolean", "BigInt", "Date", "RegExp", "Error", "TypeError",
    "RangeError", "SyntaxError", "ReferenceError", "EvalError", "URIError", "Map", "Set", "WeakMap",
    "WeakSet", "WeakRef", "Promise", "ArrayBuffer", "SharedArrayBuffer", "DataView", "Int8Array",
    "Uint8Array", "Uint8ClampedArray", "Int16Array", "Uint16Array", "Int32Array", "Uint32Array",
    "Float32Array", "Float64Array", "BigInt64Array", "BigUint64Array", "Atomics", "parseInt",
    "parseFloat", "isNaN", "isFinite", "eval", "undefined", "NaN", "Infinity", "globalThis",
    "arguments", "encodeURIComponent", "decodeURIComponent", "escape", "unescape",
];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Undeclared {
    pub name: String,
    /// Pre-order expression index of the reference.
    pub expr_index: usize,
    pub span: Span,
}

/// Visible-identifier sets per statement and per list boundary.
#[derive(Debug, Clone, Default)]
pub struct ScopeInfo {
    before_stmt: Vec<BTreeSet<String>>,
    boundaries: Vec<Vec<BTreeSet<String>>>,
    pub undeclared: Vec<Undeclared>,
}

impl ScopeInfo {
    /// Identifiers visible immediately before statement `index` (pre-order).
    pub fn before_stmt(&self, index: usize) -> Option<&BTreeSet<String>> {
        self.before_stmt.get(index)
    }

    /// Identifiers visible at position `pos` of statement list `list`
    /// (`pos == len` is the end of the list).
    pub fn at_boundary(&self, list: usize, pos: usize) -> Option<&BTreeSet<String>> {
        self.boundaries.get(list)?.get(pos)
    }

    pub fn stmt_count(&self) -> usize {
        self.before_stmt.len()
    }
}

#[derive(Debug, Default)]
struct Frame {
    /// Starts a function (or the program); lexical frames above it are closures.
    function: bool,
    declared: BTreeSet<String>,
    /// let/const names of this block not yet reached.
    pending: BTreeSet<String>,
}

/// Names bound by `var` anywhere in `body`, not descending into nested functions.
pub fn hoisted_vars(body: &[Stmt], out: &mut BTreeSet<String>) {
    for s in body {
        hoisted_vars_stmt(s, out);
    }
}

fn hoisted_vars_stmt(s: &Stmt, out: &mut BTreeSet<String>) {
    match &s.kind {
        StmtKind::Var(v) if v.kind == VarKind::Var => {
            out.extend(v.decls.iter().map(|d| d.name.clone()));
        }
        StmtKind::Block(b) => hoisted_vars(b, out),
        StmtKind::If { cons, alt, .. } => {
            hoisted_vars_stmt(cons, out);
            if let Some(a) = alt {
                hoisted_vars_stmt(a, out);
            }
        }
        StmtKind::For { init, body, .. } => {
            if let Some(ForInit::Var(v)) = init {
                if v.kind == VarKind::Var {
                    out.extend(v.decls.iter().map(|d| d.name.clone()));
                }
            }
            hoisted_vars_stmt(body, out);
        }
        StmtKind::ForIn { head, body, .. } => {
            if let ForHead::Var(VarKind::Var, n) = head {
                out.insert(n.clone());
            }
            hoisted_vars_stmt(body, out);
        }
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => hoisted_vars_stmt(body, out),
        StmtKind::Try { block, handler, finalizer } => {
            hoisted_vars(block, out);
            if let Some(h) = handler {
                hoisted_vars(&h.body, out);
            }
            if let Some(f) = finalizer {
                hoisted_vars(f, out);
            }
        }
        _ => {}
    }
}

/// Names a statement list binds directly: `(lexical, functions)`.
fn list_declarations(body: &[Stmt]) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut lexical = BTreeSet::new();
    let mut functions = BTreeSet::new();
    for s in body {
        match &s.kind {
            StmtKind::Var(v) if v.kind != VarKind::Var => {
                lexical.extend(v.decls.iter().map(|d| d.name.clone()));
            }
            StmtKind::Function(f) => {
                functions.extend(f.name.clone());
            }
            _ => {}
        }
    }
    (lexical, functions)
}

struct Analyzer {
    frames: Vec<Frame>,
    pending_catch: Vec<String>,
    /// Frames pushed by each enter_stmt, popped on leave.
    stmt_frames: Vec<bool>,
    implicit_globals: BTreeSet<String>,
    skip_expr: Option<usize>,
    info: ScopeInfo,
}

impl Analyzer {
    fn visible(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let innermost_fn = self.frames.iter().rposition(|f| f.function).unwrap_or(0);
        for (i, f) in self.frames.iter().enumerate() {
            out.extend(f.declared.iter().cloned());
            if i < innermost_fn {
                out.extend(f.pending.iter().cloned());
            }
        }
        out
    }

    fn resolves(&self, name: &str) -> bool {
        let innermost_fn = self.frames.iter().rposition(|f| f.function).unwrap_or(0);
        self.frames.iter().enumerate().any(|(i, f)| {
            f.declared.contains(name) || (i < innermost_fn && f.pending.contains(name))
        })
    }

    fn top(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("frame stack never empty")
    }
}

impl Visitor for Analyzer {
    fn enter_function(&mut self, f: FnInfo<'_>) {
        let mut frame = Frame { function: true, ..Frame::default() };
        if !f.is_declaration {
            // A named function expression sees its own name.
            frame.declared.extend(f.name.map(str::to_string));
        }
        frame.declared.extend(f.params.iter().cloned());
        self.frames.push(frame);
    }

    fn leave_function(&mut self) {
        self.frames.pop();
    }

    fn enter_list(&mut self, list: &Vec<Stmt>, info: ListInfo) {
        let (lexical, functions) = list_declarations(list);
        match info.kind {
            ListKind::Program | ListKind::FunctionBody => {
                let mut vars = BTreeSet::new();
                hoisted_vars(list, &mut vars);
                let top = self.top();
                top.declared.extend(vars);
                top.declared.extend(functions);
                top.pending.extend(lexical);
            }
            ListKind::Block | ListKind::TryBlock | ListKind::Finally | ListKind::CatchBody => {
                let mut frame = Frame { declared: functions, pending: lexical, ..Frame::default() };
                if info.kind == ListKind::CatchBody {
                    frame.declared.extend(self.pending_catch.pop());
                }
                self.frames.push(frame);
            }
        }
        while self.info.boundaries.len() <= info.index {
            self.info.boundaries.push(Vec::new());
        }
    }

    fn leave_list(&mut self, _list: &Vec<Stmt>, info: ListInfo) {
        let vis = self.visible();
        self.info.boundaries[info.index].push(vis);
        if !matches!(info.kind, ListKind::Program | ListKind::FunctionBody) {
            self.frames.pop();
        }
    }

    fn enter_stmt(&mut self, s: &Stmt, info: StmtInfo) -> bool {
        let vis = self.visible();
        if let Some(list) = info.list {
            self.info.boundaries[list].push(vis.clone());
        }
        debug_assert_eq!(self.info.before_stmt.len(), info.index);
        self.info.before_stmt.push(vis);
        let mut pushed = false;
        match &s.kind {
            StmtKind::For { init: Some(ForInit::Var(v)), .. } if v.kind != VarKind::Var => {
                let declared = v.decls.iter().map(|d| d.name.clone()).collect();
                self.frames.push(Frame { declared, ..Frame::default() });
                pushed = true;
            }
            StmtKind::ForIn { head: ForHead::Var(k, n), .. } if *k != VarKind::Var => {
                let declared = std::iter::once(n.clone()).collect();
                self.frames.push(Frame { declared, ..Frame::default() });
                pushed = true;
            }
            StmtKind::Try { handler: Some(h), .. } => {
                if let Some(p) = &h.param {
                    self.pending_catch.push(p.clone());
                } else {
                    self.pending_catch.push(String::new());
                }
            }
            _ => {}
        }
        self.stmt_frames.push(pushed);
        true
    }

    fn leave_stmt(&mut self, s: &Stmt, _info: StmtInfo) {
        if self.stmt_frames.pop() == Some(true) {
            self.frames.pop();
        }
        if let StmtKind::Var(v) = &s.kind {
            if v.kind != VarKind::Var {
                for d in &v.decls {
                    if let Some(f) = self.frames.iter_mut().rev().find(|f| f.pending.contains(&d.name)) {
                        f.pending.remove(&d.name);
                        f.declared.insert(d.name.clone());
                    }
                }
            }
        }
    }

    fn enter_expr(&mut self, e: &Expr, info: ExprInfo) -> bool {
        match &e.kind {
            ExprKind::Unary { op: UnaryOp::Typeof, arg } if arg.as_ident().is_some() => {
                self.skip_expr = Some(info.index + 1);
            }
            ExprKind::Ident(name) => {
                let skip = self.skip_expr == Some(info.index);
                if !skip && !is_builtin(name) && !self.implicit_globals.contains(name) && !self.resolves(name) {
                    self.info.undeclared.push(Undeclared { name: name.clone(), expr_index: info.index, span: e.span });
                }
            }
            _ => {}
        }
        true
    }
}

/// Simple identifiers assigned with plain `=` (or used as a `for-in` head)
/// anywhere; in sloppy mode these create globals.
struct ImplicitGlobals(BTreeSet<String>);

impl Visitor for ImplicitGlobals {
    fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
        if let StmtKind::ForIn { head: ForHead::Expr(e), .. } = &s.kind {
            self.0.extend(e.as_ident().map(str::to_string));
        }
        true
    }

    fn enter_expr(&mut self, e: &Expr, _info: ExprInfo) -> bool {
        if let ExprKind::Assign { op: AssignOp::Assign, target, .. } = &e.kind {
            self.0.extend(target.as_ident().map(str::to_string));
        }
        true
    }
}

fn run(program: &Program, allow_implicit_globals: bool) -> ScopeInfo {
    let implicit_globals = if allow_implicit_globals {
        let mut g = ImplicitGlobals(BTreeSet::new());
        walk_program(&mut g, program);
        g.0
    } else {
        BTreeSet::new()
    };
    let mut a = Analyzer {
        frames: vec![Frame { function: true, ..Frame::default() }],
        pending_catch: Vec::new(),
        stmt_frames: Vec::new(),
        implicit_globals,
        skip_expr: None,
        info: ScopeInfo::default(),
    };
    walk_program(&mut a, program);
    a.info
}

pub fn analyze(program: &Program) -> ScopeInfo {
    run(program, true)
}

/// Like [`analyze`] but every unresolved reference is reported, including
/// names that are only ever assigned. Used to find free identifiers of
/// detached fragments.
pub fn analyze_strict(program: &Program) -> ScopeInfo {
    run(program, false)
}

/// Every name the program binds: variables, functions, parameters, catch
/// parameters. Sorted and unique.
pub fn declared_names(program: &Program) -> Vec<String> {
    struct Names(BTreeSet<String>);
    impl Visitor for Names {
        fn enter_function(&mut self, f: FnInfo<'_>) {
            self.0.extend(f.name.map(str::to_string));
            self.0.extend(f.params.iter().cloned());
        }
        fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
            match &s.kind {
                StmtKind::Var(v) => self.0.extend(v.decls.iter().map(|d| d.name.clone())),
                StmtKind::For { init: Some(ForInit::Var(v)), .. } => {
                    self.0.extend(v.decls.iter().map(|d| d.name.clone()))
                }
                StmtKind::ForIn { head: ForHead::Var(_, n), .. } => {
                    self.0.insert(n.clone());
                }
                StmtKind::Try { handler: Some(CatchClause { param: Some(p), .. }), .. } => {
                    self.0.insert(p.clone());
                }
                _ => {}
            }
            true
        }
    }
    let mut n = Names(BTreeSet::new());
    walk_program(&mut n, program);
    n.0.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::js::parse;

    fn names(set: &BTreeSet<String>) -> Vec<&str> {
        set.iter().map(String::as_str).collect()
    }

    #[test]
    fn var_visible_after_declaration() {
        let ast = parse("var a = 1;\nf();").unwrap();
        let info = analyze(&ast.program);
        assert_eq!(names(info.before_stmt(1).unwrap()), vec!["a"]);
    }

    #[test]
    fn let_not_visible_before_declaration() {
        let ast = parse("let b = 2;").unwrap();
        let info = analyze(&ast.program);
        assert!(info.before_stmt(0).unwrap().is_empty());
        assert_eq!(names(info.at_boundary(0, 1).unwrap()), vec!["b"]);
    }

    #[test]
    fn parameter_and_function_name_visible_in_body() {
        let ast = parse("function f(p) { g(); }").unwrap();
        let info = analyze(&ast.program);
        // Statement 1 is `g();` inside the body.
        assert_eq!(names(info.before_stmt(1).unwrap()), vec!["f", "p"]);
    }

    #[test]
    fn hoisted_var_visible_from_function_start() {
        let ast = parse("function f() { g(); if (1) { var late = 1; } }").unwrap();
        let info = analyze(&ast.program);
        assert!(info.before_stmt(1).unwrap().contains("late"));
    }

    #[test]
    fn block_lexicals_do_not_escape() {
        let ast = parse("{ let x = 1; }\nf();").unwrap();
        let info = analyze(&ast.program);
        assert!(!info.before_stmt(2).unwrap().contains("x"));
    }

    #[test]
    fn closures_see_later_outer_lexicals() {
        let src = "function g() { return x; }\nlet x = 1;\ng();";
        let info = analyze(&parse(src).unwrap().program);
        assert!(info.undeclared.is_empty(), "{:?}", info.undeclared);
    }

    #[test]
    fn reports_undeclared_references() {
        let info = analyze(&parse("var a = b + 1;\n$vm.print(a);").unwrap().program);
        let found: Vec<_> = info.undeclared.iter().map(|u| u.name.as_str()).collect();
        assert_eq!(found, vec!["b", "$vm"]);
    }

    #[test]
    fn typeof_guard_is_not_a_reference() {
        let info = analyze(&parse("if (typeof zz === 'undefined') print(1);").unwrap().program);
        assert!(info.undeclared.is_empty());
    }

    #[test]
    fn loop_and_catch_bindings() {
        let src = "for (let i = 0; i < 3; i++) { print(i); }\ntry { f(); } catch (e) { print(e); }\nfunction f() {}";
        let info = analyze(&parse(src).unwrap().program);
        assert!(info.undeclared.is_empty(), "{:?}", info.undeclared);
    }

    #[test]
    fn implicit_globals_are_tolerated_only_in_lenient_mode() {
        let p = parse("y = 3;\nprint(y);").unwrap().program;
        assert!(analyze(&p).undeclared.is_empty());
        assert_eq!(analyze_strict(&p).undeclared.len(), 2);
    }

    #[test]
    fn declared_names_cover_all_binding_forms() {
        let src = "var a;\nfunction f(p, q) { let b = 1; }\ntry {} catch (e) {}\nfor (const k of []) {}";
        let p = parse(src).unwrap().program;
        assert_eq!(declared_names(&p), vec!["a", "b", "e", "f", "k", "p", "q"]);
    }
}
