//! Canonical pretty printer: one statement per line, two-space indent,
//! single spaces around binary operators, explicit semicolons.

use super::ast::*;

const PREC_SEQ: u8 = 1;
const PREC_ASSIGN: u8 = 2;
const PREC_COND: u8 = 3;
const PREC_UNARY: u8 = 15;
const PREC_POSTFIX: u8 = 16;
const PREC_CALL: u8 = 17;
const PREC_PRIMARY: u8 = 19;

pub(crate) fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Seq(_) => PREC_SEQ,
        ExprKind::Assign { .. } | ExprKind::Arrow { .. } => PREC_ASSIGN,
        ExprKind::Cond { .. } => PREC_COND,
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => PREC_UNARY,
        ExprKind::Update { prefix: true, .. } => PREC_UNARY,
        ExprKind::Update { prefix: false, .. } => PREC_POSTFIX,
        ExprKind::Call { .. } | ExprKind::New { .. } | ExprKind::Member { .. } => PREC_CALL,
        _ => PREC_PRIMARY,
    }
}

/// Leftmost leaf of an expression as it would be printed, used to decide
/// whether a statement would start with `{` or `function`.
fn starts_ambiguously(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Object(_) | ExprKind::Function(_) => true,
        ExprKind::Binary { left, .. } => !needs_parens_left_binary(e, left) && starts_ambiguously(left),
        ExprKind::Assign { target, .. } => starts_ambiguously(target),
        ExprKind::Cond { test, .. } => precedence(test) > PREC_COND && starts_ambiguously(test),
        ExprKind::Seq(items) => precedence(&items[0]) >= PREC_ASSIGN && starts_ambiguously(&items[0]),
        ExprKind::Call { callee, .. } => !callee_needs_parens(callee) && starts_ambiguously(callee),
        ExprKind::Member { object, .. } => !object_needs_parens(object) && starts_ambiguously(object),
        ExprKind::Update { prefix: false, arg, .. } => starts_ambiguously(arg),
        _ => false,
    }
}

fn needs_parens_left_binary(parent: &Expr, left: &Expr) -> bool {
    let ExprKind::Binary { op, .. } = &parent.kind else { return false };
    left_operand_needs_parens(*op, left)
}

fn mixes_nullish(op: BinOp, child: &Expr) -> bool {
    match &child.kind {
        ExprKind::Binary { op: c, .. } => {
            (op == BinOp::Nullish && matches!(c, BinOp::And | BinOp::Or))
                || (matches!(op, BinOp::And | BinOp::Or) && *c == BinOp::Nullish)
        }
        _ => false,
    }
}

fn left_operand_needs_parens(op: BinOp, left: &Expr) -> bool {
    let p = precedence(left);
    if op == BinOp::Exp {
        return p <= PREC_UNARY;
    }
    p < op.precedence() || mixes_nullish(op, left)
}

fn right_operand_needs_parens(op: BinOp, right: &Expr) -> bool {
    let p = precedence(right);
    if op == BinOp::Exp {
        return p < op.precedence();
    }
    p <= op.precedence() || mixes_nullish(op, right)
}

fn contains_call_in_chain(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Call { .. } => true,
        ExprKind::Member { object, .. } => contains_call_in_chain(object),
        _ => false,
    }
}

fn callee_needs_parens(callee: &Expr) -> bool {
    precedence(callee) < PREC_CALL
}

fn new_callee_needs_parens(callee: &Expr) -> bool {
    precedence(callee) < PREC_CALL || contains_call_in_chain(callee)
}

fn object_needs_parens(object: &Expr) -> bool {
    precedence(object) < PREC_CALL || matches!(object.kind, ExprKind::Num(_))
}

fn contains_in_operator(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Binary { op: BinOp::In, .. } => true,
        ExprKind::Binary { left, right, .. } => contains_in_operator(left) || contains_in_operator(right),
        ExprKind::Assign { target, value, .. } => contains_in_operator(target) || contains_in_operator(value),
        ExprKind::Cond { test, cons, alt } => {
            contains_in_operator(test) || contains_in_operator(cons) || contains_in_operator(alt)
        }
        ExprKind::Seq(items) => items.iter().any(contains_in_operator),
        ExprKind::Unary { arg, .. } | ExprKind::Update { arg, .. } => contains_in_operator(arg),
        ExprKind::Arrow { body: ArrowBody::Expr(b), .. } => contains_in_operator(b),
        _ => false,
    }
}

pub struct Printer {
    buf: String,
    indent: usize,
}

impl Printer {
    pub fn new() -> Self {
        Printer { buf: String::new(), indent: 0 }
    }

    pub fn finish(self) -> String {
        self.buf
    }

    fn line_start(&mut self) {
        for _ in 0..self.indent {
            self.buf.push_str("  ");
        }
    }

    fn push(&mut self, s: &str) {
        self.buf.push_str(s);
    }

    pub fn program(&mut self, p: &Program) {
        for s in &p.body {
            self.stmt(s);
        }
    }

    fn body_block(&mut self, body: &[Stmt]) {
        if body.is_empty() {
            self.push("{}");
            return;
        }
        self.push("{\n");
        self.indent += 1;
        for s in body {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line_start();
        self.push("}");
    }

    /// Body of an `if`/loop. Blocks stay on the header line; other
    /// statements go on their own indented line.
    fn sub_stmt(&mut self, s: &Stmt) {
        if let StmtKind::Block(b) = &s.kind {
            self.push(" ");
            self.body_block(b);
            self.push("\n");
        } else {
            self.push("\n");
            self.indent += 1;
            self.stmt(s);
            self.indent -= 1;
        }
    }

    fn var_decl(&mut self, v: &VarDecl, for_init: bool) {
        self.push(v.kind.as_str());
        self.push(" ");
        for (i, d) in v.decls.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.push(&d.name);
            if let Some(init) = &d.init {
                self.push(" = ");
                if for_init && contains_in_operator(init) {
                    self.push("(");
                    self.expr(init, PREC_SEQ);
                    self.push(")");
                } else {
                    self.expr(init, PREC_ASSIGN);
                }
            }
        }
    }

    pub fn stmt(&mut self, s: &Stmt) {
        self.line_start();
        self.stmt_inline(s);
    }

    /// Prints a statement assuming the indent for its first line is already
    /// emitted; always ends with a newline.
    fn stmt_inline(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Var(v) => {
                self.var_decl(v, false);
                self.push(";\n");
            }
            StmtKind::Function(f) => {
                self.function(f, true);
                self.push("\n");
            }
            StmtKind::Expr(e) => {
                if starts_ambiguously(e) {
                    self.push("(");
                    self.expr(e, PREC_SEQ);
                    self.push(")");
                } else {
                    self.expr(e, PREC_SEQ);
                }
                self.push(";\n");
            }
            StmtKind::Block(b) => {
                self.body_block(b);
                self.push("\n");
            }
            StmtKind::Empty => self.push(";\n"),
            StmtKind::If { test, cons, alt } => {
                self.push("if (");
                self.expr(test, PREC_SEQ);
                self.push(")");
                self.sub_stmt(cons);
                if let Some(alt) = alt {
                    let cons_is_block = matches!(cons.kind, StmtKind::Block(_));
                    if cons_is_block {
                        // "} else" on the closing line of the block.
                        self.buf.pop();
                        self.push(" else");
                    } else {
                        self.line_start();
                        self.push("else");
                    }
                    if let StmtKind::If { .. } = alt.kind {
                        self.push(" ");
                        self.stmt_inline(alt);
                    } else {
                        self.sub_stmt(alt);
                    }
                }
            }
            StmtKind::For { init, test, update, body } => {
                self.push("for (");
                match init {
                    Some(ForInit::Var(v)) => self.var_decl(v, true),
                    Some(ForInit::Expr(e)) => {
                        if contains_in_operator(e) {
                            self.push("(");
                            self.expr(e, PREC_SEQ);
                            self.push(")");
                        } else {
                            self.expr(e, PREC_SEQ);
                        }
                    }
                    None => {}
                }
                self.push(";");
                if let Some(t) = test {
                    self.push(" ");
                    self.expr(t, PREC_SEQ);
                }
                self.push(";");
                if let Some(u) = update {
                    self.push(" ");
                    self.expr(u, PREC_SEQ);
                }
                self.push(")");
                self.sub_stmt(body);
            }
            StmtKind::ForIn { head, right, body, of } => {
                self.push("for (");
                match head {
                    ForHead::Var(k, name) => {
                        self.push(k.as_str());
                        self.push(" ");
                        self.push(name);
                    }
                    ForHead::Expr(e) => self.expr(e, PREC_CALL),
                }
                self.push(if *of { " of " } else { " in " });
                self.expr(right, if *of { PREC_ASSIGN } else { PREC_SEQ });
                self.push(")");
                self.sub_stmt(body);
            }
            StmtKind::While { test, body } => {
                self.push("while (");
                self.expr(test, PREC_SEQ);
                self.push(")");
                self.sub_stmt(body);
            }
            StmtKind::DoWhile { body, test } => {
                self.push("do");
                self.sub_stmt(body);
                if matches!(body.kind, StmtKind::Block(_)) {
                    self.buf.pop();
                    self.push(" ");
                } else {
                    self.line_start();
                }
                self.push("while (");
                self.expr(test, PREC_SEQ);
                self.push(");\n");
            }
            StmtKind::Return(arg) => {
                self.push("return");
                if let Some(a) = arg {
                    self.push(" ");
                    self.expr(a, PREC_SEQ);
                }
                self.push(";\n");
            }
            StmtKind::Break => self.push("break;\n"),
            StmtKind::Continue => self.push("continue;\n"),
            StmtKind::Throw(e) => {
                self.push("throw ");
                self.expr(e, PREC_SEQ);
                self.push(";\n");
            }
            StmtKind::Try { block, handler, finalizer } => {
                self.push("try ");
                self.body_block(block);
                if let Some(h) = handler {
                    self.push(" catch ");
                    if let Some(p) = &h.param {
                        self.push("(");
                        self.push(p);
                        self.push(") ");
                    }
                    self.body_block(&h.body);
                }
                if let Some(f) = finalizer {
                    self.push(" finally ");
                    self.body_block(f);
                }
                self.push("\n");
            }
        }
    }

    fn params(&mut self, params: &[String]) {
        self.push("(");
        self.push(&params.join(", "));
        self.push(")");
    }

    fn function(&mut self, f: &Function, declaration: bool) {
        self.push("function");
        match &f.name {
            Some(n) => {
                self.push(" ");
                self.push(n);
            }
            None if !declaration => self.push(" "),
            None => {}
        }
        self.params(&f.params);
        self.push(" ");
        self.body_block(&f.body);
    }

    fn args(&mut self, args: &[Expr]) {
        self.push("(");
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.expr(a, PREC_ASSIGN);
        }
        self.push(")");
    }

    fn prop_key(&mut self, k: &PropKey) {
        match k {
            PropKey::Ident(n) => self.push(n),
            PropKey::Str { raw, quote } => {
                let q = quote.to_string();
                self.push(&q);
                self.push(raw);
                self.push(&q);
            }
            PropKey::Num(raw) => self.push(raw),
            PropKey::Computed(e) => {
                self.push("[");
                self.expr(e, PREC_ASSIGN);
                self.push("]");
            }
        }
    }

    fn method(&mut self, value: &Expr) {
        if let ExprKind::Function(f) = &value.kind {
            self.params(&f.params);
            self.push(" ");
            self.body_block(&f.body);
        }
    }

    /// Prints `e`, parenthesized when its precedence is below `min`.
    pub fn expr(&mut self, e: &Expr, min: u8) {
        if precedence(e) < min {
            self.push("(");
            self.expr_bare(e);
            self.push(")");
        } else {
            self.expr_bare(e);
        }
    }

    fn expr_bare(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Num(raw) => self.push(raw),
            ExprKind::Str { raw, quote } => {
                let q = quote.to_string();
                self.push(&q);
                self.push(raw);
                self.push(&q);
            }
            ExprKind::Template { quasis, exprs } => {
                self.push("`");
                for (i, q) in quasis.iter().enumerate() {
                    self.push(q);
                    if let Some(x) = exprs.get(i) {
                        self.push("${");
                        self.expr(x, PREC_SEQ);
                        self.push("}");
                    }
                }
                self.push("`");
            }
            ExprKind::Regex(raw) => self.push(raw),
            ExprKind::Bool(b) => self.push(if *b { "true" } else { "false" }),
            ExprKind::Null => self.push("null"),
            ExprKind::Ident(n) => self.push(n),
            ExprKind::This => self.push("this"),
            ExprKind::Array(items) => {
                self.push("[");
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        self.push(", ");
                    }
                    self.expr(a, PREC_ASSIGN);
                }
                self.push("]");
            }
            ExprKind::Object(props) => {
                if props.is_empty() {
                    self.push("{}");
                    return;
                }
                self.push("{");
                for (i, p) in props.iter().enumerate() {
                    if i > 0 {
                        self.push(",");
                    }
                    self.push(" ");
                    match p.kind {
                        PropKind::Init => {
                            self.prop_key(&p.key);
                            self.push(": ");
                            self.expr(&p.value, PREC_ASSIGN);
                        }
                        PropKind::Shorthand => self.prop_key(&p.key),
                        PropKind::Method => {
                            self.prop_key(&p.key);
                            self.method(&p.value);
                        }
                        PropKind::Get | PropKind::Set => {
                            self.push(if p.kind == PropKind::Get { "get " } else { "set " });
                            self.prop_key(&p.key);
                            self.method(&p.value);
                        }
                    }
                }
                self.push(" }");
            }
            ExprKind::Function(f) => self.function(f, false),
            ExprKind::Arrow { params, body } => {
                self.params(params);
                self.push(" => ");
                match body {
                    ArrowBody::Block(b) => self.body_block(b),
                    ArrowBody::Expr(x) => {
                        if starts_ambiguously(x) {
                            self.push("(");
                            self.expr(x, PREC_SEQ);
                            self.push(")");
                        } else {
                            self.expr(x, PREC_ASSIGN);
                        }
                    }
                }
            }
            ExprKind::Member { object, prop } => {
                if object_needs_parens(object) {
                    self.push("(");
                    self.expr_bare(object);
                    self.push(")");
                } else {
                    self.expr_bare(object);
                }
                match prop {
                    MemberProp::Name(n) => {
                        self.push(".");
                        self.push(n);
                    }
                    MemberProp::Computed(p) => {
                        self.push("[");
                        self.expr(p, PREC_SEQ);
                        self.push("]");
                    }
                }
            }
            ExprKind::Call { callee, args } => {
                if callee_needs_parens(callee) {
                    self.push("(");
                    self.expr_bare(callee);
                    self.push(")");
                } else {
                    self.expr_bare(callee);
                }
                self.args(args);
            }
            ExprKind::New { callee, args } => {
                self.push("new ");
                if new_callee_needs_parens(callee) {
                    self.push("(");
                    self.expr_bare(callee);
                    self.push(")");
                } else {
                    self.expr_bare(callee);
                }
                self.args(args);
            }
            ExprKind::Unary { op, arg } => {
                self.push(op.as_str());
                let word = matches!(op, UnaryOp::Typeof | UnaryOp::Void | UnaryOp::Delete);
                if word {
                    self.push(" ");
                }
                let clash = matches!(op, UnaryOp::Neg | UnaryOp::Plus)
                    && matches!(
                        &arg.kind,
                        ExprKind::Unary { op: UnaryOp::Neg | UnaryOp::Plus, .. } | ExprKind::Update { prefix: true, .. }
                    );
                if clash {
                    self.push("(");
                    self.expr_bare(arg);
                    self.push(")");
                } else {
                    self.expr(arg, PREC_UNARY);
                }
            }
            ExprKind::Update { incr, prefix, arg } => {
                let op = if *incr { "++" } else { "--" };
                if *prefix {
                    self.push(op);
                    self.expr(arg, PREC_CALL);
                } else {
                    self.expr(arg, PREC_CALL);
                    self.push(op);
                }
            }
            ExprKind::Binary { op, left, right } => {
                if left_operand_needs_parens(*op, left) {
                    self.push("(");
                    self.expr_bare(left);
                    self.push(")");
                } else {
                    self.expr_bare(left);
                }
                self.push(" ");
                self.push(op.as_str());
                self.push(" ");
                if right_operand_needs_parens(*op, right) {
                    self.push("(");
                    self.expr_bare(right);
                    self.push(")");
                } else {
                    self.expr_bare(right);
                }
            }
            ExprKind::Assign { op, target, value } => {
                self.expr(target, PREC_CALL);
                self.push(" ");
                self.push(op.as_str());
                self.push(" ");
                self.expr(value, PREC_ASSIGN);
            }
            ExprKind::Cond { test, cons, alt } => {
                self.expr(test, PREC_COND + 1);
                self.push(" ? ");
                self.expr(cons, PREC_ASSIGN);
                self.push(" : ");
                self.expr(alt, PREC_ASSIGN);
            }
            ExprKind::Seq(items) => {
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        self.push(", ");
                    }
                    self.expr(x, PREC_ASSIGN);
                }
            }
        }
    }
}

impl Default for Printer {
    fn default() -> Self {
        Self::new()
    }
}
