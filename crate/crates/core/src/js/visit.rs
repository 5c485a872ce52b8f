//! Pre-order traversal shared by analysis and editing.
//!
//! The immutable and mutable walkers are generated from one macro so that
//! statement, expression and list numbering is identical between them: an
//! index computed during analysis addresses the same node during an edit.

use super::ast::*;

/// How an expression is attached to its parent. Decides what deleting it means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// The whole expression of an expression statement.
    StmtExpr,
    /// Element of a call argument list, array literal or sequence.
    ListItem,
    /// A child the parent can do without (`var` initializer, `return` value, `for` clauses).
    Optional,
    /// A child the parent cannot do without (binary operands, tests, callees...).
    Required,
    /// Assignment/update target or `for-in` head; must stay a reference.
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListKind {
    Program,
    Block,
    FunctionBody,
    TryBlock,
    CatchBody,
    Finally,
}

#[derive(Debug, Clone, Copy)]
pub struct ListInfo {
    pub index: usize,
    pub kind: ListKind,
    pub in_function: bool,
    pub in_loop: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct StmtInfo {
    pub index: usize,
    /// Lone body of `if`/`else`/loops rather than a member of a statement list.
    pub single_slot: bool,
    pub in_function: bool,
    pub in_loop: bool,
    /// Pre-order index of the list this statement belongs to, if any.
    pub list: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExprInfo {
    pub index: usize,
    pub slot: Slot,
    /// Innermost statement containing this expression.
    pub stmt: Option<usize>,
    /// Innermost statement-list member containing this expression.
    pub list_stmt: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct WalkState {
    pub stmts: usize,
    pub exprs: usize,
    pub lists: usize,
    in_function: bool,
    in_loop: bool,
    stmt_stack: Vec<usize>,
    list_stmt_stack: Vec<usize>,
}

/// Callback for a function boundary (declaration, expression, method or arrow).
#[derive(Debug, Clone, Copy)]
pub struct FnInfo<'a> {
    pub name: Option<&'a str>,
    pub params: &'a [String],
    pub is_declaration: bool,
}

macro_rules! define_walker {
    ($trait_name:ident, $walker:ident, $($m:ident)?) => {
        #[allow(unused_variables, clippy::ptr_arg)]
        pub trait $trait_name {
            fn enter_list(&mut self, list: & $($m)? Vec<Stmt>, info: ListInfo) {}
            fn leave_list(&mut self, list: & $($m)? Vec<Stmt>, info: ListInfo) {}
            /// Return false to skip the statement's children.
            fn enter_stmt(&mut self, s: & $($m)? Stmt, info: StmtInfo) -> bool {
                true
            }
            fn leave_stmt(&mut self, s: & $($m)? Stmt, info: StmtInfo) {}
            /// Return false to skip the expression's children.
            fn enter_expr(&mut self, e: & $($m)? Expr, info: ExprInfo) -> bool {
                true
            }
            fn leave_expr(&mut self, e: & $($m)? Expr, info: ExprInfo) {}
            fn enter_function(&mut self, f: FnInfo<'_>) {}
            fn leave_function(&mut self) {}
        }

        pub struct $walker<'v, V: ?Sized> {
            pub v: &'v mut V,
            pub st: WalkState,
        }

        impl<'v, V: $trait_name + ?Sized> $walker<'v, V> {
            pub fn new(v: &'v mut V) -> Self {
                $walker { v, st: WalkState::default() }
            }

            pub fn program(&mut self, p: & $($m)? Program) {
                self.list(& $($m)? p.body, ListKind::Program);
            }

            pub fn list(&mut self, list: & $($m)? Vec<Stmt>, kind: ListKind) {
                let info = ListInfo {
                    index: self.st.lists,
                    kind,
                    in_function: self.st.in_function,
                    in_loop: self.st.in_loop,
                };
                self.st.lists += 1;
                self.v.enter_list(list, info);
                // The visitor may have changed the list length.
                let mut i = 0;
                while i < list.len() {
                    self.stmt(& $($m)? list[i], false, Some(info.index));
                    i += 1;
                }
                self.v.leave_list(list, info);
            }

            fn function_body(&mut self, body: & $($m)? Vec<Stmt>) {
                let saved = (self.st.in_function, self.st.in_loop);
                self.st.in_function = true;
                self.st.in_loop = false;
                self.list(body, ListKind::FunctionBody);
                self.st.in_function = saved.0;
                self.st.in_loop = saved.1;
            }

            fn function(&mut self, f: & $($m)? Function, is_declaration: bool) {
                self.v.enter_function(FnInfo {
                    name: f.name.as_deref(),
                    params: &f.params,
                    is_declaration,
                });
                self.function_body(& $($m)? f.body);
                self.v.leave_function();
            }

            fn loop_body(&mut self, s: & $($m)? Stmt) {
                let saved = self.st.in_loop;
                self.st.in_loop = true;
                self.stmt(s, true, None);
                self.st.in_loop = saved;
            }

            pub fn stmt(&mut self, s: & $($m)? Stmt, single_slot: bool, list: Option<usize>) {
                let info = StmtInfo {
                    index: self.st.stmts,
                    single_slot,
                    in_function: self.st.in_function,
                    in_loop: self.st.in_loop,
                    list,
                };
                self.st.stmts += 1;
                if !self.v.enter_stmt(s, info) {
                    return;
                }
                self.st.stmt_stack.push(info.index);
                if list.is_some() {
                    self.st.list_stmt_stack.push(info.index);
                }
                match & $($m)? s.kind {
                    StmtKind::Var(v) => {
                        for d in & $($m)? v.decls {
                            if let Some(init) = & $($m)? d.init {
                                self.expr(init, Slot::Optional);
                            }
                        }
                    }
                    StmtKind::Function(f) => self.function(f, true),
                    StmtKind::Expr(e) => self.expr(e, Slot::StmtExpr),
                    StmtKind::Block(b) => self.list(b, ListKind::Block),
                    StmtKind::Empty | StmtKind::Break | StmtKind::Continue => {}
                    StmtKind::If { test, cons, alt } => {
                        self.expr(test, Slot::Required);
                        self.stmt(cons, true, None);
                        if let Some(alt) = alt {
                            self.stmt(alt, true, None);
                        }
                    }
                    StmtKind::For { init, test, update, body } => {
                        match init {
                            Some(ForInit::Var(v)) => {
                                for d in & $($m)? v.decls {
                                    if let Some(init) = & $($m)? d.init {
                                        self.expr(init, Slot::Optional);
                                    }
                                }
                            }
                            Some(ForInit::Expr(e)) => self.expr(e, Slot::Optional),
                            None => {}
                        }
                        if let Some(t) = test {
                            self.expr(t, Slot::Optional);
                        }
                        if let Some(u) = update {
                            self.expr(u, Slot::Optional);
                        }
                        self.loop_body(body);
                    }
                    StmtKind::ForIn { head, right, body, .. } => {
                        if let ForHead::Expr(e) = head {
                            self.expr(e, Slot::Target);
                        }
                        self.expr(right, Slot::Required);
                        self.loop_body(body);
                    }
                    StmtKind::While { test, body } => {
                        self.expr(test, Slot::Required);
                        self.loop_body(body);
                    }
                    StmtKind::DoWhile { body, test } => {
                        self.loop_body(body);
                        self.expr(test, Slot::Required);
                    }
                    StmtKind::Return(arg) => {
                        if let Some(a) = arg {
                            self.expr(a, Slot::Optional);
                        }
                    }
                    StmtKind::Throw(e) => self.expr(e, Slot::Required),
                    StmtKind::Try { block, handler, finalizer } => {
                        self.list(block, ListKind::TryBlock);
                        if let Some(h) = handler {
                            self.list(& $($m)? h.body, ListKind::CatchBody);
                        }
                        if let Some(f) = finalizer {
                            self.list(f, ListKind::Finally);
                        }
                    }
                }
                self.st.stmt_stack.pop();
                if list.is_some() {
                    self.st.list_stmt_stack.pop();
                }
                self.v.leave_stmt(s, info);
            }

            pub fn expr(&mut self, e: & $($m)? Expr, slot: Slot) {
                let info = ExprInfo {
                    index: self.st.exprs,
                    slot,
                    stmt: self.st.stmt_stack.last().copied(),
                    list_stmt: self.st.list_stmt_stack.last().copied(),
                };
                self.st.exprs += 1;
                if !self.v.enter_expr(e, info) {
                    return;
                }
                match & $($m)? e.kind {
                    ExprKind::Num(_)
                    | ExprKind::Str { .. }
                    | ExprKind::Regex(_)
                    | ExprKind::Bool(_)
                    | ExprKind::Null
                    | ExprKind::Ident(_)
                    | ExprKind::This => {}
                    ExprKind::Template { exprs, .. } => {
                        for x in exprs {
                            self.expr(x, Slot::Required);
                        }
                    }
                    ExprKind::Array(items) | ExprKind::Seq(items) => {
                        for x in items {
                            self.expr(x, Slot::ListItem);
                        }
                    }
                    ExprKind::Object(props) => {
                        for p in props {
                            if let PropKey::Computed(k) = & $($m)? p.key {
                                self.expr(k, Slot::Required);
                            }
                            match p.kind {
                                PropKind::Method | PropKind::Get | PropKind::Set => {
                                    if let ExprKind::Function(f) = & $($m)? p.value.kind {
                                        self.function(f, false);
                                    }
                                }
                                PropKind::Init | PropKind::Shorthand => self.expr(& $($m)? p.value, Slot::Required),
                            }
                        }
                    }
                    ExprKind::Function(f) => self.function(f, false),
                    ExprKind::Arrow { params, body } => {
                        self.v.enter_function(FnInfo { name: None, params, is_declaration: false });
                        match body {
                            ArrowBody::Block(b) => self.function_body(b),
                            ArrowBody::Expr(x) => {
                                let saved = (self.st.in_function, self.st.in_loop);
                                self.st.in_function = true;
                                self.st.in_loop = false;
                                self.expr(x, Slot::Required);
                                self.st.in_function = saved.0;
                                self.st.in_loop = saved.1;
                            }
                        }
                        self.v.leave_function();
                    }
                    ExprKind::Member { object, prop } => {
                        self.expr(object, Slot::Required);
                        if let MemberProp::Computed(p) = prop {
                            self.expr(p, Slot::Required);
                        }
                    }
                    ExprKind::Call { callee, args } | ExprKind::New { callee, args } => {
                        self.expr(callee, Slot::Required);
                        for a in args {
                            self.expr(a, Slot::ListItem);
                        }
                    }
                    ExprKind::Unary { arg, .. } => self.expr(arg, Slot::Required),
                    ExprKind::Update { arg, .. } => self.expr(arg, Slot::Target),
                    ExprKind::Binary { left, right, .. } => {
                        self.expr(left, Slot::Required);
                        self.expr(right, Slot::Required);
                    }
                    ExprKind::Assign { target, value, .. } => {
                        self.expr(target, Slot::Target);
                        self.expr(value, Slot::Required);
                    }
                    ExprKind::Cond { test, cons, alt } => {
                        self.expr(test, Slot::Required);
                        self.expr(cons, Slot::Required);
                        self.expr(alt, Slot::Required);
                    }
                }
                self.v.leave_expr(e, info);
            }
        }
    };
}

define_walker!(Visitor, Walker,);
define_walker!(VisitorMut, WalkerMut, mut);

pub fn walk_program<V: Visitor + ?Sized>(v: &mut V, p: &Program) -> WalkState {
    let mut w = Walker::new(v);
    w.program(p);
    w.st
}

pub fn walk_program_mut<V: VisitorMut + ?Sized>(v: &mut V, p: &mut Program) -> WalkState {
    let mut w = WalkerMut::new(v);
    w.program(p);
    w.st
}

/// Walks a detached expression (e.g. a donor fragment) with fresh numbering.
pub fn walk_expr<V: Visitor + ?Sized>(v: &mut V, e: &Expr) {
    Walker::new(v).expr(e, Slot::Required);
}

pub fn walk_expr_mut<V: VisitorMut + ?Sized>(v: &mut V, e: &mut Expr) {
    WalkerMut::new(v).expr(e, Slot::Required);
}

pub fn walk_stmt<V: Visitor + ?Sized>(v: &mut V, s: &Stmt) {
    Walker::new(v).stmt(s, false, None);
}

pub fn walk_stmt_mut<V: VisitorMut + ?Sized>(v: &mut V, s: &mut Stmt) {
    WalkerMut::new(v).stmt(s, false, None);
}
