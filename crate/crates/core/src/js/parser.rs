use super::ast::*;
use super::lexer::{Lexer, Tok, Token};
use super::SyntaxError;

type PResult<T> = Result<T, SyntaxError>;

pub struct Parser<'a> {
    lx: Lexer<'a>,
    cur: Token,
    prev_end: usize,
    fn_depth: u32,
    loop_depth: u32,
}

#[derive(Clone)]
struct Checkpoint<'a> {
    lx: Lexer<'a>,
    cur: Token,
    prev_end: usize,
}

fn assign_op(p: &str) -> Option<AssignOp> {
    Some(match p {
        "=" => AssignOp::Assign,
        "+=" => AssignOp::Add,
        "-=" => AssignOp::Sub,
        "*=" => AssignOp::Mul,
        "/=" => AssignOp::Div,
        "%=" => AssignOp::Mod,
        "**=" => AssignOp::Exp,
        "<<=" => AssignOp::Shl,
        ">>=" => AssignOp::Shr,
        ">>>=" => AssignOp::UShr,
        "&=" => AssignOp::BitAnd,
        "|=" => AssignOp::BitOr,
        "^=" => AssignOp::BitXor,
        "&&=" => AssignOp::And,
        "||=" => AssignOp::Or,
        "??=" => AssignOp::Nullish,
        _ => return None,
    })
}

fn bin_op(tok: &Tok, no_in: bool) -> Option<BinOp> {
    use BinOp::*;
    Some(match tok {
        Tok::Punct(p) => match *p {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Mod,
            "**" => Exp,
            "<<" => Shl,
            ">>" => Shr,
            ">>>" => UShr,
            "&" => BitAnd,
            "|" => BitOr,
            "^" => BitXor,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "==" => Eq,
            "!=" => Ne,
            "===" => StrictEq,
            "!==" => StrictNe,
            "&&" => And,
            "||" => Or,
            "??" => Nullish,
            _ => return None,
        },
        Tok::Keyword("in") if !no_in => In,
        Tok::Keyword("instanceof") => InstanceOf,
        _ => return None,
    })
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> PResult<Self> {
        let mut lx = Lexer::new(src);
        let cur = lx.next_token()?;
        Ok(Parser { lx, cur, prev_end: 0, fn_depth: 0, loop_depth: 0 })
    }

    fn checkpoint(&self) -> Checkpoint<'a> {
        Checkpoint { lx: self.lx.clone(), cur: self.cur.clone(), prev_end: self.prev_end }
    }

    fn restore(&mut self, cp: Checkpoint<'a>) {
        self.lx = cp.lx;
        self.cur = cp.cur;
        self.prev_end = cp.prev_end;
    }

    fn advance(&mut self) -> PResult<Token> {
        let next = self.lx.next_token()?;
        self.prev_end = self.cur.end;
        Ok(std::mem::replace(&mut self.cur, next))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.cur.tok, Tok::Punct(q) if q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.cur.tok, Tok::Keyword(q) if q == k)
    }

    fn eat_punct(&mut self, p: &str) -> PResult<bool> {
        if self.is_punct(p) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn err<T>(&self, expected: &str) -> PResult<T> {
        Err(SyntaxError::new(self.cur.start, expected))
    }

    fn expect_punct(&mut self, p: &'static str) -> PResult<()> {
        if self.eat_punct(p)? {
            Ok(())
        } else {
            self.err(&format!("'{p}'"))
        }
    }

    fn expect_kw(&mut self, k: &'static str) -> PResult<()> {
        if self.is_kw(k) {
            self.advance()?;
            Ok(())
        } else {
            self.err(&format!("'{k}'"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.cur.tok {
            Tok::Ident(n) => {
                let n = n.clone();
                self.advance()?;
                Ok(n)
            }
            _ => self.err("identifier"),
        }
    }

    /// Statement terminator with newline-based semicolon insertion.
    fn semicolon(&mut self) -> PResult<()> {
        if self.eat_punct(";")? {
            return Ok(());
        }
        if self.is_punct("}") || self.cur.tok == Tok::Eof || self.cur.nl_before {
            return Ok(());
        }
        self.err("';'")
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.prev_end.max(start))
    }

    pub fn parse_program(&mut self) -> PResult<Program> {
        let mut body = Vec::new();
        while self.cur.tok != Tok::Eof {
            body.push(self.statement()?);
        }
        Ok(Program { body })
    }

    pub fn parse_lone_expression(&mut self) -> PResult<Expr> {
        let e = self.expression(false)?;
        if self.cur.tok != Tok::Eof {
            return self.err("end of input");
        }
        Ok(e)
    }

    fn block_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.is_punct("}") {
            if self.cur.tok == Tok::Eof {
                return self.err("'}'");
            }
            body.push(self.statement()?);
        }
        self.advance()?;
        Ok(body)
    }

    /// Body of `if`/loops: any statement except a declaration.
    fn sub_statement(&mut self) -> PResult<Stmt> {
        let start = self.cur.start;
        if self.is_kw("let") || self.is_kw("const") || self.is_kw("function") {
            return Err(SyntaxError::new(start, "statement (declarations need a block)"));
        }
        self.statement()
    }

    fn loop_body(&mut self) -> PResult<Stmt> {
        self.loop_depth += 1;
        let body = self.sub_statement();
        self.loop_depth -= 1;
        body
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.cur.start;
        let kind = match self.cur.tok.clone() {
            Tok::Punct("{") => StmtKind::Block(self.block_body()?),
            Tok::Punct(";") => {
                self.advance()?;
                StmtKind::Empty
            }
            Tok::Keyword(k @ ("var" | "let" | "const")) => {
                self.advance()?;
                let kind = match k {
                    "var" => VarKind::Var,
                    "let" => VarKind::Let,
                    _ => VarKind::Const,
                };
                let decl = self.var_decl_rest(kind, false)?;
                self.semicolon()?;
                StmtKind::Var(decl)
            }
            Tok::Keyword("function") => {
                self.advance()?;
                let name = self.ident()?;
                StmtKind::Function(self.function_rest(Some(name))?)
            }
            Tok::Keyword("if") => {
                self.advance()?;
                self.expect_punct("(")?;
                let test = self.expression(false)?;
                self.expect_punct(")")?;
                let cons = Box::new(self.sub_statement()?);
                let alt = if self.is_kw("else") {
                    self.advance()?;
                    Some(Box::new(self.sub_statement()?))
                } else {
                    None
                };
                StmtKind::If { test, cons, alt }
            }
            Tok::Keyword("for") => self.for_statement()?,
            Tok::Keyword("while") => {
                self.advance()?;
                self.expect_punct("(")?;
                let test = self.expression(false)?;
                self.expect_punct(")")?;
                let body = Box::new(self.loop_body()?);
                StmtKind::While { test, body }
            }
            Tok::Keyword("do") => {
                self.advance()?;
                let body = Box::new(self.loop_body()?);
                self.expect_kw("while")?;
                self.expect_punct("(")?;
                let test = self.expression(false)?;
                self.expect_punct(")")?;
                self.eat_punct(";")?;
                StmtKind::DoWhile { body, test }
            }
            Tok::Keyword("return") => {
                if self.fn_depth == 0 {
                    return self.err("statement ('return' outside of function)");
                }
                self.advance()?;
                let arg = if self.is_punct(";") || self.is_punct("}") || self.cur.tok == Tok::Eof || self.cur.nl_before {
                    None
                } else {
                    Some(self.expression(false)?)
                };
                self.semicolon()?;
                StmtKind::Return(arg)
            }
            Tok::Keyword(k @ ("break" | "continue")) => {
                if self.loop_depth == 0 {
                    return self.err(&format!("statement ('{k}' outside of loop)"));
                }
                self.advance()?;
                self.semicolon()?;
                if k == "break" {
                    StmtKind::Break
                } else {
                    StmtKind::Continue
                }
            }
            Tok::Keyword("throw") => {
                self.advance()?;
                if self.cur.nl_before {
                    return self.err("expression on the same line as 'throw'");
                }
                let e = self.expression(false)?;
                self.semicolon()?;
                StmtKind::Throw(e)
            }
            Tok::Keyword("try") => {
                self.advance()?;
                let block = self.block_body()?;
                let handler = if self.is_kw("catch") {
                    self.advance()?;
                    let param = if self.eat_punct("(")? {
                        let p = self.ident()?;
                        self.expect_punct(")")?;
                        Some(p)
                    } else {
                        None
                    };
                    Some(CatchClause { param, body: self.block_body()? })
                } else {
                    None
                };
                let finalizer = if self.is_kw("finally") {
                    self.advance()?;
                    Some(self.block_body()?)
                } else {
                    None
                };
                if handler.is_none() && finalizer.is_none() {
                    return self.err("'catch' or 'finally'");
                }
                StmtKind::Try { block, handler, finalizer }
            }
            _ => {
                let e = self.expression(false)?;
                self.semicolon()?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt { kind, span: self.span_from(start) })
    }

    fn var_decl_rest(&mut self, kind: VarKind, no_in: bool) -> PResult<VarDecl> {
        let mut decls = Vec::new();
        loop {
            let name = self.ident()?;
            let init = if self.eat_punct("=")? {
                Some(self.assignment(no_in)?)
            } else {
                if kind == VarKind::Const && !no_in {
                    return self.err("'=' (const needs an initializer)");
                }
                None
            };
            decls.push(Declarator { name, init });
            if !self.eat_punct(",")? {
                break;
            }
        }
        Ok(VarDecl { kind, decls })
    }

    fn is_of(&self) -> bool {
        matches!(&self.cur.tok, Tok::Ident(n) if n == "of")
    }

    fn for_statement(&mut self) -> PResult<StmtKind> {
        self.advance()?;
        self.expect_punct("(")?;
        let mut init = None;
        if !self.is_punct(";") {
            if let Tok::Keyword(k @ ("var" | "let" | "const")) = self.cur.tok {
                self.advance()?;
                let kind = match k {
                    "var" => VarKind::Var,
                    "let" => VarKind::Let,
                    _ => VarKind::Const,
                };
                let decl = self.var_decl_rest(kind, true)?;
                let single = decl.decls.len() == 1 && decl.decls[0].init.is_none();
                if single && (self.is_kw("in") || self.is_of()) {
                    let name = decl.decls.into_iter().next().unwrap().name;
                    return self.for_in_rest(ForHead::Var(kind, name));
                }
                if kind == VarKind::Const && decl.decls.iter().any(|d| d.init.is_none()) {
                    return self.err("'=' (const needs an initializer)");
                }
                init = Some(ForInit::Var(decl));
            } else {
                let e = self.expression(true)?;
                if (self.is_kw("in") || self.is_of()) && e.is_simple_target() {
                    return self.for_in_rest(ForHead::Expr(e));
                }
                init = Some(ForInit::Expr(e));
            }
        }
        self.expect_punct(";")?;
        let test = if self.is_punct(";") { None } else { Some(self.expression(false)?) };
        self.expect_punct(";")?;
        let update = if self.is_punct(")") { None } else { Some(self.expression(false)?) };
        self.expect_punct(")")?;
        let body = Box::new(self.loop_body()?);
        Ok(StmtKind::For { init, test, update, body })
    }

    fn for_in_rest(&mut self, head: ForHead) -> PResult<StmtKind> {
        let of = self.is_of();
        self.advance()?;
        let right = if of { self.assignment(false)? } else { self.expression(false)? };
        self.expect_punct(")")?;
        let body = Box::new(self.loop_body()?);
        Ok(StmtKind::ForIn { head, right, body, of })
    }

    fn params(&mut self) -> PResult<Vec<String>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.is_punct(")") {
            params.push(self.ident()?);
            if !self.eat_punct(",")? {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn function_body(&mut self) -> PResult<Vec<Stmt>> {
        let saved_loops = std::mem::replace(&mut self.loop_depth, 0);
        self.fn_depth += 1;
        let body = self.block_body();
        self.fn_depth -= 1;
        self.loop_depth = saved_loops;
        body
    }

    fn function_rest(&mut self, name: Option<String>) -> PResult<Function> {
        let params = self.params()?;
        let body = self.function_body()?;
        Ok(Function { name, params, body })
    }

    pub(crate) fn expression(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.cur.start;
        let first = self.assignment(no_in)?;
        if !self.is_punct(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_punct(",")? {
            items.push(self.assignment(no_in)?);
        }
        Ok(Expr { kind: ExprKind::Seq(items), span: self.span_from(start) })
    }

    fn assignment(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.cur.start;
        let lhs = self.conditional(no_in)?;
        if let Tok::Punct(p) = self.cur.tok {
            if let Some(op) = assign_op(p) {
                if !lhs.is_simple_target() {
                    return Err(SyntaxError::new(lhs.span.start as usize, "assignable expression"));
                }
                self.advance()?;
                let value = self.assignment(no_in)?;
                return Ok(Expr {
                    kind: ExprKind::Assign { op, target: Box::new(lhs), value: Box::new(value) },
                    span: self.span_from(start),
                });
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.cur.start;
        let test = self.binary(4, no_in)?;
        if !self.is_punct("?") {
            return Ok(test);
        }
        self.advance()?;
        let cons = self.assignment(false)?;
        self.expect_punct(":")?;
        let alt = self.assignment(no_in)?;
        Ok(Expr {
            kind: ExprKind::Cond { test: Box::new(test), cons: Box::new(cons), alt: Box::new(alt) },
            span: self.span_from(start),
        })
    }

    fn binary(&mut self, min: u8, no_in: bool) -> PResult<Expr> {
        let start = self.cur.start;
        let mut left = self.unary()?;
        while let Some(op) = bin_op(&self.cur.tok, no_in) {
            let prec = op.precedence();
            if prec < min {
                break;
            }
            self.advance()?;
            let right = if op == BinOp::Exp {
                self.binary(prec, no_in)?
            } else {
                self.binary(prec + 1, no_in)?
            };
            left = Expr {
                kind: ExprKind::Binary { op, left: Box::new(left), right: Box::new(right) },
                span: self.span_from(start),
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.cur.start;
        let op = match self.cur.tok {
            Tok::Punct("!") => Some(UnaryOp::Not),
            Tok::Punct("~") => Some(UnaryOp::BitNot),
            Tok::Punct("+") => Some(UnaryOp::Plus),
            Tok::Punct("-") => Some(UnaryOp::Neg),
            Tok::Keyword("typeof") => Some(UnaryOp::Typeof),
            Tok::Keyword("void") => Some(UnaryOp::Void),
            Tok::Keyword("delete") => Some(UnaryOp::Delete),
            _ => None,
        };
        if let Some(op) = op {
            self.advance()?;
            let arg = self.unary()?;
            return Ok(Expr { kind: ExprKind::Unary { op, arg: Box::new(arg) }, span: self.span_from(start) });
        }
        if self.is_punct("++") || self.is_punct("--") {
            let incr = self.is_punct("++");
            self.advance()?;
            let arg = self.unary()?;
            if !arg.is_simple_target() {
                return Err(SyntaxError::new(arg.span.start as usize, "assignable expression"));
            }
            return Ok(Expr {
                kind: ExprKind::Update { incr, prefix: true, arg: Box::new(arg) },
                span: self.span_from(start),
            });
        }
        let e = self.lhs()?;
        if (self.is_punct("++") || self.is_punct("--")) && !self.cur.nl_before {
            if !e.is_simple_target() {
                return self.err("assignable expression before postfix operator");
            }
            let incr = self.is_punct("++");
            self.advance()?;
            return Ok(Expr {
                kind: ExprKind::Update { incr, prefix: false, arg: Box::new(e) },
                span: self.span_from(start),
            });
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        while !self.is_punct(")") {
            args.push(self.assignment(false)?);
            if !self.eat_punct(",")? {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn member_name(&mut self) -> PResult<String> {
        match &self.cur.tok {
            Tok::Ident(n) => {
                let n = n.clone();
                self.advance()?;
                Ok(n)
            }
            Tok::Keyword(k) => {
                let k = k.to_string();
                self.advance()?;
                Ok(k)
            }
            _ => self.err("property name"),
        }
    }

    /// Member accesses following `object`; calls too unless `no_call`.
    fn member_tail(&mut self, start: usize, mut e: Expr, no_call: bool) -> PResult<Expr> {
        loop {
            if self.is_punct(".") {
                self.advance()?;
                let name = self.member_name()?;
                e = Expr {
                    kind: ExprKind::Member { object: Box::new(e), prop: MemberProp::Name(name) },
                    span: self.span_from(start),
                };
            } else if self.is_punct("[") {
                self.advance()?;
                let prop = self.expression(false)?;
                self.expect_punct("]")?;
                e = Expr {
                    kind: ExprKind::Member { object: Box::new(e), prop: MemberProp::Computed(Box::new(prop)) },
                    span: self.span_from(start),
                };
            } else if self.is_punct("(") && !no_call {
                let args = self.args()?;
                e = Expr { kind: ExprKind::Call { callee: Box::new(e), args }, span: self.span_from(start) };
            } else {
                return Ok(e);
            }
        }
    }

    fn lhs(&mut self) -> PResult<Expr> {
        let start = self.cur.start;
        let base = if self.is_kw("new") { self.new_expr()? } else { self.primary()? };
        self.member_tail(start, base, false)
    }

    fn new_expr(&mut self) -> PResult<Expr> {
        let start = self.cur.start;
        self.advance()?;
        let callee_start = self.cur.start;
        let callee = if self.is_kw("new") { self.new_expr()? } else { self.primary()? };
        let callee = self.member_tail(callee_start, callee, true)?;
        let args = if self.is_punct("(") { self.args()? } else { Vec::new() };
        Ok(Expr { kind: ExprKind::New { callee: Box::new(callee), args }, span: self.span_from(start) })
    }

    fn try_arrow_params(&mut self) -> PResult<Option<Vec<String>>> {
        let cp = self.checkpoint();
        self.advance()?;
        let mut params = Vec::new();
        let ok = loop {
            if self.is_punct(")") {
                break true;
            }
            match &self.cur.tok {
                Tok::Ident(n) => {
                    params.push(n.clone());
                    self.advance()?;
                }
                _ => break false,
            }
            if !self.is_punct(",") {
                break self.is_punct(")");
            }
            self.advance()?;
        };
        if ok {
            self.advance()?;
            if self.is_punct("=>") && !self.cur.nl_before {
                self.advance()?;
                return Ok(Some(params));
            }
        }
        self.restore(cp);
        Ok(None)
    }

    fn arrow_body(&mut self, start: usize, params: Vec<String>) -> PResult<Expr> {
        let body = if self.is_punct("{") {
            ArrowBody::Block(self.function_body()?)
        } else {
            ArrowBody::Expr(Box::new(self.assignment(false)?))
        };
        Ok(Expr { kind: ExprKind::Arrow { params, body }, span: self.span_from(start) })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.cur.start;
        let kind = match self.cur.tok.clone() {
            Tok::Ident(n) => {
                self.advance()?;
                if self.is_punct("=>") && !self.cur.nl_before {
                    self.advance()?;
                    return self.arrow_body(start, vec![n]);
                }
                ExprKind::Ident(n)
            }
            Tok::Keyword("this") => {
                self.advance()?;
                ExprKind::This
            }
            Tok::Keyword("null") => {
                self.advance()?;
                ExprKind::Null
            }
            Tok::Keyword(b @ ("true" | "false")) => {
                self.advance()?;
                ExprKind::Bool(b == "true")
            }
            Tok::Num(raw) => {
                self.advance()?;
                ExprKind::Num(raw)
            }
            Tok::Str { raw, quote } => {
                self.advance()?;
                ExprKind::Str { raw, quote }
            }
            Tok::Punct("/") | Tok::Punct("/=") => {
                let tok = self.lx.rescan_regex(self.cur.start, self.cur.nl_before)?;
                self.cur = tok;
                let Tok::Regex(raw) = self.advance()?.tok else { unreachable!() };
                ExprKind::Regex(raw)
            }
            Tok::Template { raw, tail } => {
                self.advance()?;
                let mut quasis = vec![raw];
                let mut exprs = Vec::new();
                let mut done = tail;
                while !done {
                    exprs.push(self.expression(false)?);
                    if !self.is_punct("}") {
                        return self.err("'}' closing template substitution");
                    }
                    let tok = self.lx.rescan_template(self.cur.start)?;
                    self.cur = tok;
                    let Tok::Template { raw, tail } = self.advance()?.tok else { unreachable!() };
                    quasis.push(raw);
                    done = tail;
                }
                ExprKind::Template { quasis, exprs }
            }
            Tok::Punct("(") => {
                if let Some(params) = self.try_arrow_params()? {
                    return self.arrow_body(start, params);
                }
                self.advance()?;
                let e = self.expression(false)?;
                self.expect_punct(")")?;
                // Parentheses leave no trace in the tree.
                return Ok(e);
            }
            Tok::Punct("[") => {
                self.advance()?;
                let mut items = Vec::new();
                while !self.is_punct("]") {
                    if self.is_punct(",") {
                        return self.err("array element (holes are not supported)");
                    }
                    items.push(self.assignment(false)?);
                    if !self.eat_punct(",")? {
                        break;
                    }
                }
                self.expect_punct("]")?;
                ExprKind::Array(items)
            }
            Tok::Punct("{") => ExprKind::Object(self.object_literal()?),
            Tok::Keyword("function") => {
                self.advance()?;
                let name = match &self.cur.tok {
                    Tok::Ident(_) => Some(self.ident()?),
                    _ => None,
                };
                ExprKind::Function(Box::new(self.function_rest(name)?))
            }
            _ => return self.err("expression"),
        };
        Ok(Expr { kind, span: self.span_from(start) })
    }

    fn prop_key(&mut self) -> PResult<PropKey> {
        Ok(match self.cur.tok.clone() {
            Tok::Ident(n) => {
                self.advance()?;
                PropKey::Ident(n)
            }
            Tok::Keyword(k) => {
                self.advance()?;
                PropKey::Ident(k.to_string())
            }
            Tok::Str { raw, quote } => {
                self.advance()?;
                PropKey::Str { raw, quote }
            }
            Tok::Num(raw) => {
                self.advance()?;
                PropKey::Num(raw)
            }
            Tok::Punct("[") => {
                self.advance()?;
                let e = self.assignment(false)?;
                self.expect_punct("]")?;
                PropKey::Computed(Box::new(e))
            }
            _ => return self.err("property key"),
        })
    }

    fn method_value(&mut self) -> PResult<Expr> {
        let start = self.cur.start;
        let f = self.function_rest(None)?;
        Ok(Expr { kind: ExprKind::Function(Box::new(f)), span: self.span_from(start) })
    }

    fn object_literal(&mut self) -> PResult<Vec<Prop>> {
        self.expect_punct("{")?;
        let mut props = Vec::new();
        while !self.is_punct("}") {
            let accessor = match &self.cur.tok {
                Tok::Ident(n) if n == "get" || n == "set" => Some(n == "get"),
                _ => None,
            };
            let prop = if let Some(is_get) = accessor {
                let cp = self.checkpoint();
                self.advance()?;
                if self.is_punct("(") || self.is_punct(":") || self.is_punct(",") || self.is_punct("}") {
                    self.restore(cp);
                    self.plain_prop()?
                } else {
                    let key = self.prop_key()?;
                    let value = self.method_value()?;
                    Prop { key, kind: if is_get { PropKind::Get } else { PropKind::Set }, value }
                }
            } else {
                self.plain_prop()?
            };
            props.push(prop);
            if !self.eat_punct(",")? {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(props)
    }

    fn plain_prop(&mut self) -> PResult<Prop> {
        let key_start = self.cur.start;
        let key = self.prop_key()?;
        if self.eat_punct(":")? {
            let value = self.assignment(false)?;
            return Ok(Prop { key, kind: PropKind::Init, value });
        }
        if self.is_punct("(") {
            let value = self.method_value()?;
            return Ok(Prop { key, kind: PropKind::Method, value });
        }
        match &key {
            PropKey::Ident(n) if super::lexer::keyword_str(n).is_none() => {
                let value = Expr { kind: ExprKind::Ident(n.clone()), span: self.span_from(key_start) };
                Ok(Prop { key, kind: PropKind::Shorthand, value })
            }
            _ => self.err("':'"),
        }
    }
}
