//! Variable adaptation: rename the free identifiers of a donor fragment to
//! names visible at the insertion site.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::IteratorRandom;
use rand::Rng;

use crate::js::scope::{analyze_strict, declared_names};
use crate::js::visit::{walk_program, walk_program_mut, ExprInfo, StmtInfo, Visitor, VisitorMut};
use crate::js::{
    parse_expression, Declarator, Expr, ExprKind, ForHead, ForInit, Program, Stmt, StmtKind,
    UnaryOp, VarDecl, VarKind,
};

/// How a free identifier is used inside the fragment, weakest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Context {
    Any,
    Numeric,
    Member,
    Callee,
}

impl Context {
    /// Whether a runtime type name fits this use.
    pub fn accepts(self, ty: &str) -> bool {
        match self {
            Context::Any => true,
            Context::Numeric => ty == "Number",
            Context::Member => {
                !matches!(ty, "Number" | "String" | "Boolean" | "Symbol" | "BigInt" | "undefined" | "null")
            }
            Context::Callee => ty.ends_with("Function"),
        }
    }

    fn default_value(self) -> Expr {
        let src = match self {
            Context::Callee => "function () {}",
            Context::Member => "{}",
            Context::Numeric | Context::Any => "0",
        };
        parse_expression(src).expect("default literal parses")
    }
}

/// Result of adapting one fragment.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Adapted {
    pub renames: Vec<(String, String)>,
    /// `var` declarations that must precede the fragment.
    pub fresh: Vec<Stmt>,
}

/// Free identifiers of `fragment`, each with the strongest context it is
/// used in, plus the pre-order index of every free reference.
pub fn free_names(fragment: &Program) -> (BTreeMap<String, Context>, HashMap<usize, String>) {
    let info = analyze_strict(fragment);
    let roles = roles(fragment);
    let mut names = BTreeMap::new();
    let mut refs = HashMap::new();
    for u in &info.undeclared {
        let ctx = roles.get(&u.expr_index).copied().unwrap_or(Context::Any);
        let e = names.entry(u.name.clone()).or_insert(Context::Any);
        *e = (*e).max(ctx);
        refs.insert(u.expr_index, u.name.clone());
    }
    (names, refs)
}

/// Context of every expression that is a callee, member base or numeric operand.
fn roles(program: &Program) -> HashMap<usize, Context> {
    struct Roles {
        /// Child address -> role, filled in by the parent before the child is entered.
        pending: HashMap<usize, Context>,
        out: HashMap<usize, Context>,
    }
    fn addr(e: &Expr) -> usize {
        e as *const Expr as usize
    }
    impl Visitor for Roles {
        fn enter_expr(&mut self, e: &Expr, info: ExprInfo) -> bool {
            if let Some(c) = self.pending.remove(&addr(e)) {
                self.out.insert(info.index, c);
            }
            let mut mark = |child: &Expr, c: Context| {
                self.pending.insert(addr(child), c);
            };
            match &e.kind {
                ExprKind::Call { callee, .. } | ExprKind::New { callee, .. } => mark(callee, Context::Callee),
                ExprKind::Member { object, .. } => mark(object, Context::Member),
                ExprKind::Binary { op, left, right } if op.is_numeric() => {
                    mark(left, Context::Numeric);
                    mark(right, Context::Numeric);
                }
                ExprKind::Unary { op: UnaryOp::Neg | UnaryOp::Plus | UnaryOp::BitNot, arg } => {
                    mark(arg, Context::Numeric)
                }
                ExprKind::Update { arg, .. } => mark(arg, Context::Numeric),
                _ => {}
            }
            true
        }
    }
    let mut r = Roles { pending: HashMap::new(), out: HashMap::new() };
    walk_program(&mut r, program);
    r.out
}

/// First of `name0`, `name1`, ... not in `taken`.
pub fn fresh_name(name: &str, taken: &BTreeSet<String>) -> String {
    (0..).map(|i| format!("{name}{i}")).find(|n| !taken.contains(n)).expect("unbounded")
}

/// Renames free identifiers of `fragment` to members of `scope`.
///
/// A name already visible at the site keeps its name when it fits. With
/// `types`, candidates whose runtime type fits the identifier's use are
/// preferred; if none fits any visible name is used. A name with no visible
/// candidate at all gets a fresh `var` with a default value. `taken` holds
/// names fresh declarations must not collide with.
pub fn adapt_variables<R: Rng + ?Sized>(
    fragment: &mut Program,
    scope: &BTreeSet<String>,
    types: Option<&BTreeMap<String, String>>,
    taken: &BTreeSet<String>,
    rng: &mut R,
) -> Adapted {
    let (free, refs) = free_names(fragment);
    if free.is_empty() {
        return Adapted::default();
    }
    let bound: BTreeSet<String> = declared_names(fragment).into_iter().collect();
    let candidates: Vec<&String> = scope.iter().filter(|n| !bound.contains(*n)).collect();
    let mut taken: BTreeSet<String> = taken.iter().chain(scope).chain(&bound).cloned().collect();
    taken.extend(free.keys().cloned());

    let mut out = Adapted::default();
    let mut mapping = HashMap::new();
    for (name, ctx) in &free {
        let fits = |c: &str| types.is_none_or(|t| ctx.accepts(t.get(c).map(String::as_str).unwrap_or("")));
        if candidates.contains(&name) && fits(name) {
            mapping.insert(name.clone(), name.clone());
            continue;
        }
        let typed: Option<&String> = types.and_then(|t| {
            candidates
                .iter()
                .filter(|c| ctx.accepts(t.get(c.as_str()).map(String::as_str).unwrap_or("")))
                .copied()
                .choose(rng)
        });
        let to = match typed.or_else(|| candidates.iter().copied().choose(rng)) {
            Some(c) => c.clone(),
            None => {
                let fresh = fresh_name(name, &taken);
                taken.insert(fresh.clone());
                out.fresh.push(var_decl(&fresh, ctx.default_value()));
                fresh
            }
        };
        if &to != name {
            out.renames.push((name.clone(), to.clone()));
        }
        mapping.insert(name.clone(), to);
    }
    rename_refs(fragment, &refs, &mapping);
    out
}

fn var_decl(name: &str, init: Expr) -> Stmt {
    Stmt::new(StmtKind::Var(VarDecl {
        kind: VarKind::Var,
        decls: vec![Declarator { name: name.to_string(), init: Some(init) }],
    }))
}

fn rename_refs(fragment: &mut Program, refs: &HashMap<usize, String>, mapping: &HashMap<String, String>) {
    struct Rename<'a> {
        refs: &'a HashMap<usize, String>,
        mapping: &'a HashMap<String, String>,
    }
    impl VisitorMut for Rename<'_> {
        fn leave_expr(&mut self, e: &mut Expr, info: ExprInfo) {
            if let Some(to) = self.refs.get(&info.index).and_then(|n| self.mapping.get(n)) {
                e.kind = ExprKind::Ident(to.clone());
            }
        }
    }
    walk_program_mut(&mut Rename { refs, mapping }, fragment);
}

/// Names a statement binds in the list it sits in.
pub fn top_level_bindings(s: &Stmt) -> Vec<String> {
    match &s.kind {
        StmtKind::Var(v) => v.decls.iter().map(|d| d.name.clone()).collect(),
        StmtKind::Function(f) => f.name.iter().cloned().collect(),
        _ => Vec::new(),
    }
}

/// Renames every binding and reference of `from` inside `fragment`.
pub fn rename_binding(fragment: &mut Program, from: &str, to: &str) {
    struct Rename<'a> {
        from: &'a str,
        to: &'a str,
    }
    impl Rename<'_> {
        fn name(&self, n: &mut String) {
            if n == self.from {
                *n = self.to.to_string();
            }
        }
        fn function(&self, f: &mut crate::js::Function) {
            if let Some(n) = &mut f.name {
                self.name(n);
            }
            f.params.iter_mut().for_each(|p| self.name(p));
        }
        fn var(&self, v: &mut VarDecl) {
            v.decls.iter_mut().for_each(|d| self.name(&mut d.name));
        }
    }
    impl VisitorMut for Rename<'_> {
        fn enter_stmt(&mut self, s: &mut Stmt, _info: StmtInfo) -> bool {
            match &mut s.kind {
                StmtKind::Var(v) | StmtKind::For { init: Some(ForInit::Var(v)), .. } => self.var(v),
                StmtKind::Function(f) => self.function(f),
                StmtKind::ForIn { head: ForHead::Var(_, n), .. } => self.name(n),
                StmtKind::Try { handler: Some(h), .. } => {
                    if let Some(p) = &mut h.param {
                        self.name(p);
                    }
                }
                _ => {}
            }
            true
        }
        fn enter_expr(&mut self, e: &mut Expr, _info: ExprInfo) -> bool {
            match &mut e.kind {
                ExprKind::Ident(n) => self.name(n),
                ExprKind::Function(f) => self.function(f),
                ExprKind::Arrow { params, .. } => params.iter_mut().for_each(|p| self.name(p)),
                ExprKind::Object(props) => {
                    // Methods are not walked as expressions.
                    for p in props.iter_mut() {
                        if let ExprKind::Function(f) = &mut p.value.kind {
                            self.function(f);
                        }
                    }
                }
                _ => {}
            }
            true
        }
    }
    walk_program_mut(&mut Rename { from, to }, fragment);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::js::{parse, print_program};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn types(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn adapt(src: &str, scope: &[&str], ty: Option<&[(&str, &str)]>) -> (String, Adapted) {
        let mut p = parse(src).unwrap().program;
        let t = ty.map(types);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = adapt_variables(&mut p, &set(scope), t.as_ref(), &BTreeSet::new(), &mut rng);
        (print_program(&p), a)
    }

    #[test]
    fn member_base_renamed_to_sole_candidate() {
        let (out, a) = adapt("y.foo();", &["a"], Some(&[("a", "Object")]));
        assert_eq!(out, "a.foo();\n");
        assert_eq!(a.renames, [("y".to_string(), "a".to_string())]);
    }

    #[test]
    fn numeric_context_prefers_numbers() {
        for seed in 0..20 {
            let mut p = parse("y | 0;").unwrap().program;
            let t = types(&[("s", "String"), ("n", "Number")]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            adapt_variables(&mut p, &set(&["s", "n"]), Some(&t), &BTreeSet::new(), &mut rng);
            assert_eq!(print_program(&p), "n | 0;\n");
        }
    }

    #[test]
    fn empty_scope_declares_fresh_variable() {
        let (out, a) = adapt("y();", &[], None);
        assert_eq!(out, "y0();\n");
        assert_eq!(a.fresh.len(), 1);
        assert_eq!(crate::js::print_stmt(&a.fresh[0]), "var y0 = function () {};\n");
    }

    #[test]
    fn visible_names_are_kept() {
        let (out, a) = adapt("q.x + z;", &["q"], None);
        assert_eq!(out, "q.x + q;\n");
        assert_eq!(a.renames, [("z".to_string(), "q".to_string())]);
        let (out, _) = adapt("q + 1;", &["q", "f"], Some(&[("q", "Function"), ("f", "Function")]));
        assert_eq!(out, "q + 1;\n");
        let (out, _) = adapt("q();", &["q", "f"], Some(&[("q", "Number"), ("f", "Function")]));
        assert_eq!(out, "f();\n");
    }

    #[test]
    fn bound_names_are_left_alone() {
        let (out, a) = adapt("var q = 1;\nq + z;", &["a"], None);
        assert_eq!(out, "var q = 1;\nq + a;\n");
        assert_eq!(a.renames.len(), 1);
    }

    #[test]
    fn fragment_bindings_are_not_candidates() {
        // `a` is bound inside the fragment, so free `y` cannot become `a`.
        let (out, _) = adapt("(function (a) { return y + a; });", &["a"], None);
        assert!(out.contains("y0 + a"), "{out}");
    }

    #[test]
    fn contexts() {
        let (free, _) = free_names(&parse("f(x.p, -n, s);").unwrap().program);
        assert_eq!(free["f"], Context::Callee);
        assert_eq!(free["x"], Context::Member);
        assert_eq!(free["n"], Context::Numeric);
        assert_eq!(free["s"], Context::Any);
        assert!(Context::Member.accepts("Float64Array"));
        assert!(!Context::Member.accepts("Number"));
        assert!(Context::Callee.accepts("AsyncFunction"));
    }

    #[test]
    fn binding_rename_reaches_uses() {
        let mut p = parse("let t = 1;\nfunction g(t) { return t; }\nt++;").unwrap().program;
        rename_binding(&mut p, "t", "t0");
        assert_eq!(print_program(&p), "let t0 = 1;\nfunction g(t0) {\n  return t0;\n}\nt0++;\n");
    }

    #[test]
    fn defaults() {
        assert_eq!(fresh_name("y", &set(&["y0", "y1"])), "y2");
    }
}
