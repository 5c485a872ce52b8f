//! AST for the supported JavaScript subset.
//!
//! Every statement and expression carries a byte [`Span`] into the source it
//! was parsed from. Spans never take part in equality, so two trees compare
//! equal when they have the same shape regardless of formatting.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Clone, Copy, Default)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start: start as u32, end: end as u32 }
    }

    pub fn range(self) -> std::ops::Range<usize> {
        self.start as usize..self.end as usize
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Debug for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Var,
    Let,
    Const,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Var => "var",
            VarKind::Let => "let",
            VarKind::Const => "const",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub kind: VarKind,
    pub decls: Vec<Declarator>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: Option<String>,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    Var(VarDecl),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForHead {
    Var(VarKind, String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub param: Option<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Var(VarDecl),
    Function(Function),
    Expr(Expr),
    Block(Vec<Stmt>),
    Empty,
    If {
        test: Expr,
        cons: Box<Stmt>,
        alt: Option<Box<Stmt>>,
    },
    For {
        init: Option<ForInit>,
        test: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
    },
    ForIn {
        head: ForHead,
        right: Expr,
        body: Box<Stmt>,
        of: bool,
    },
    While {
        test: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        test: Expr,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    Throw(Expr),
    Try {
        block: Vec<Stmt>,
        handler: Option<CatchClause>,
        finalizer: Option<Vec<Stmt>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropKey {
    Ident(String),
    Str { raw: String, quote: char },
    Num(String),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropKind {
    Init,
    Shorthand,
    Method,
    Get,
    Set,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prop {
    pub key: PropKey,
    pub kind: PropKind,
    /// For methods and accessors this is a function expression.
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MemberProp {
    Name(String),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArrowBody {
    Expr(Box<Expr>),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    Typeof,
    Void,
    Delete,
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::Typeof => "typeof",
            UnaryOp::Void => "void",
            UnaryOp::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Exp,
    Shl,
    Shr,
    UShr,
    BitAnd,
    BitOr,
    BitXor,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    StrictEq,
    StrictNe,
    In,
    InstanceOf,
    And,
    Or,
    Nullish,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        use BinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Exp => "**",
            Shl => "<<",
            Shr => ">>",
            UShr => ">>>",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            StrictEq => "===",
            StrictNe => "!==",
            In => "in",
            InstanceOf => "instanceof",
            And => "&&",
            Or => "||",
            Nullish => "??",
        }
    }

    pub fn precedence(self) -> u8 {
        use BinOp::*;
        match self {
            Or | Nullish => 4,
            And => 5,
            BitOr => 6,
            BitXor => 7,
            BitAnd => 8,
            Eq | Ne | StrictEq | StrictNe => 9,
            Lt | Gt | Le | Ge | In | InstanceOf => 10,
            Shl | Shr | UShr => 11,
            Add | Sub => 12,
            Mul | Div | Mod => 13,
            Exp => 14,
        }
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Nullish)
    }

    /// Arithmetic, bitwise and shift operators coerce their operands to numbers.
    pub fn is_numeric(self) -> bool {
        use BinOp::*;
        matches!(
            self,
            Sub | Mul | Div | Mod | Exp | Shl | Shr | UShr | BitAnd | BitOr | BitXor
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Exp,
    Shl,
    Shr,
    UShr,
    BitAnd,
    BitOr,
    BitXor,
    And,
    Or,
    Nullish,
}

impl AssignOp {
    pub fn as_str(self) -> &'static str {
        use AssignOp::*;
        match self {
            Assign => "=",
            Add => "+=",
            Sub => "-=",
            Mul => "*=",
            Div => "/=",
            Mod => "%=",
            Exp => "**=",
            Shl => "<<=",
            Shr => ">>=",
            UShr => ">>>=",
            BitAnd => "&=",
            BitOr => "|=",
            BitXor => "^=",
            And => "&&=",
            Or => "||=",
            Nullish => "??=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(String),
    Str { raw: String, quote: char },
    Template { quasis: Vec<String>, exprs: Vec<Expr> },
    Regex(String),
    Bool(bool),
    Null,
    Ident(String),
    This,
    Array(Vec<Expr>),
    Object(Vec<Prop>),
    Function(Box<Function>),
    Arrow { params: Vec<String>, body: ArrowBody },
    Member { object: Box<Expr>, prop: MemberProp },
    Call { callee: Box<Expr>, args: Vec<Expr> },
    New { callee: Box<Expr>, args: Vec<Expr> },
    Unary { op: UnaryOp, arg: Box<Expr> },
    Update { incr: bool, prefix: bool, arg: Box<Expr> },
    Binary { op: BinOp, left: Box<Expr>, right: Box<Expr> },
    Assign { op: AssignOp, target: Box<Expr>, value: Box<Expr> },
    Cond { test: Box<Expr>, cons: Box<Expr>, alt: Box<Expr> },
    Seq(Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn ident(name: &str) -> Self {
        Expr::new(ExprKind::Ident(name.to_string()))
    }

    pub fn num(raw: &str) -> Self {
        Expr::new(ExprKind::Num(raw.to_string()))
    }

    /// A double-quoted string literal with the given (already escaped) body.
    pub fn str_lit(raw: &str) -> Self {
        Expr::new(ExprKind::Str { raw: raw.to_string(), quote: '"' })
    }

    pub fn call(callee: Expr, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Call { callee: Box::new(callee), args })
    }

    pub fn as_ident(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n),
            _ => None,
        }
    }

    /// Valid on the left of `=` or as the operand of `++`/`--`.
    pub fn is_simple_target(&self) -> bool {
        matches!(self.kind, ExprKind::Ident(_) | ExprKind::Member { .. })
    }

    /// Dotted rendering of identifier/member chains (`Math.abs`, `$vm.foo`).
    pub fn dotted_name(&self) -> Option<String> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n.clone()),
            ExprKind::This => Some("this".into()),
            ExprKind::Member { object, prop: MemberProp::Name(p) } => {
                object.dotted_name().map(|o| format!("{o}.{p}"))
            }
            _ => None,
        }
    }

    /// Identifier at the root of a member chain.
    pub fn chain_root(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ident(n) => Some(n),
            ExprKind::Member { object, .. } => object.chain_root(),
            _ => None,
        }
    }
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt { kind, span: Span::default() }
    }

    pub fn expr(e: Expr) -> Self {
        Stmt::new(StmtKind::Expr(e))
    }

    pub fn empty() -> Self {
        Stmt::new(StmtKind::Empty)
    }

    /// `let`, `const` and function declarations are only legal directly in a
    /// statement list, never as the lone body of `if`/loops.
    pub fn is_declaration(&self) -> bool {
        match &self.kind {
            StmtKind::Var(v) => v.kind != VarKind::Var,
            StmtKind::Function(_) => true,
            _ => false,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            StmtKind::Var(v) => v.kind.as_str(),
            StmtKind::Function(_) => "function",
            StmtKind::Expr(_) => "expr",
            StmtKind::Block(_) => "block",
            StmtKind::Empty => "empty",
            StmtKind::If { .. } => "if",
            StmtKind::For { .. } => "for",
            StmtKind::ForIn { of: false, .. } => "forin",
            StmtKind::ForIn { of: true, .. } => "forof",
            StmtKind::While { .. } => "while",
            StmtKind::DoWhile { .. } => "dowhile",
            StmtKind::Return(_) => "return",
            StmtKind::Break => "break",
            StmtKind::Continue => "continue",
            StmtKind::Throw(_) => "throw",
            StmtKind::Try { .. } => "try",
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(
            self.kind,
            StmtKind::For { .. } | StmtKind::ForIn { .. } | StmtKind::While { .. } | StmtKind::DoWhile { .. }
        )
    }
}

impl ExprKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExprKind::Num(_) => "num",
            ExprKind::Str { .. } => "str",
            ExprKind::Template { .. } => "template",
            ExprKind::Regex(_) => "regex",
            ExprKind::Bool(_) => "bool",
            ExprKind::Null => "null",
            ExprKind::Ident(_) => "ident",
            ExprKind::This => "this",
            ExprKind::Array(_) => "array",
            ExprKind::Object(_) => "object",
            ExprKind::Function(_) => "function",
            ExprKind::Arrow { .. } => "arrow",
            ExprKind::Member { .. } => "member",
            ExprKind::Call { .. } => "call",
            ExprKind::New { .. } => "new",
            ExprKind::Unary { .. } => "unary",
            ExprKind::Update { .. } => "update",
            ExprKind::Binary { op, .. } if op.is_logical() => "logical",
            ExprKind::Binary { .. } => "binary",
            ExprKind::Assign { .. } => "assign",
            ExprKind::Cond { .. } => "cond",
            ExprKind::Seq(_) => "seq",
        }
    }
}

static NEXT_AST_ID: AtomicU64 = AtomicU64::new(1);

/// A parsed program plus the version id that scopes its [`NodeRef`]s.
///
/// Asts are never edited in place by the mutation engine; every edit yields
/// a new `Ast` with a fresh id, so refs into the old tree stop resolving.
#[derive(Debug, Clone)]
pub struct Ast {
    pub program: Program,
    id: u64,
}

impl Ast {
    pub fn new(program: Program) -> Self {
        Ast { program, id: NEXT_AST_ID.fetch_add(1, Ordering::Relaxed) }
    }

    pub fn id(&self) -> u64 {
        self.id
    }
}

impl PartialEq for Ast {
    fn eq(&self, other: &Ast) -> bool {
        self.program == other.program
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Program,
    Statement,
    Declaration,
    Function,
    Expression,
}

/// Handle to a node of a specific [`Ast`] version, addressed by pre-order
/// position among nodes of the same category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRef {
    pub(crate) ast: u64,
    pub(crate) index: usize,
    pub kind: NodeKind,
}

impl NodeRef {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn belongs_to(&self, ast: &Ast) -> bool {
        self.ast == ast.id
    }
}
