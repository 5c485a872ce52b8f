//! Donor fragments: expressions and statements harvested from seeds.

use std::sync::{Arc, OnceLock};

use crate::js::visit::{walk_program, walk_stmt, ExprInfo, FnInfo, Slot, StmtInfo, Visitor};
use crate::js::{Ast, Expr, Stmt, StmtKind};

/// What a donor statement needs from the place it lands.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Needs {
    /// Has a `break`/`continue` not enclosed by its own loop.
    pub loop_: bool,
    /// Has a `return` not enclosed by its own function.
    pub function: bool,
    /// `let`/`const`/function declaration: list positions only.
    pub list_only: bool,
}

impl Needs {
    pub fn of(s: &Stmt) -> Needs {
        struct Scan {
            loops: usize,
            functions: usize,
            saved_loops: Vec<usize>,
            needs: Needs,
        }
        impl Visitor for Scan {
            fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
                match s.kind {
                    StmtKind::Break | StmtKind::Continue if self.loops == 0 => self.needs.loop_ = true,
                    StmtKind::Return(_) if self.functions == 0 => self.needs.function = true,
                    _ => {}
                }
                if s.is_loop() {
                    self.loops += 1;
                }
                true
            }
            fn leave_stmt(&mut self, s: &Stmt, _info: StmtInfo) {
                if s.is_loop() {
                    self.loops -= 1;
                }
            }
            fn enter_function(&mut self, _f: FnInfo<'_>) {
                self.functions += 1;
                self.saved_loops.push(std::mem::take(&mut self.loops));
            }
            fn leave_function(&mut self) {
                self.functions -= 1;
                self.loops = self.saved_loops.pop().unwrap_or(0);
            }
        }
        let mut scan = Scan { loops: 0, functions: 0, saved_loops: Vec::new(), needs: Needs { list_only: s.is_declaration(), ..Needs::default() } };
        walk_stmt(&mut scan, s);
        scan.needs
    }

    /// Whether a statement with these needs is valid at a site.
    pub fn fits(&self, in_loop: bool, in_function: bool, single_slot: bool) -> bool {
        (!self.loop_ || in_loop) && (!self.function || in_function) && !(self.list_only && single_slot)
    }
}

#[derive(Debug)]
pub struct Fragments {
    pub exprs: Vec<Expr>,
    pub stmts: Vec<(Stmt, Needs)>,
}

impl Fragments {
    pub fn of(ast: &Ast) -> Fragments {
        struct Collect(Fragments);
        impl Visitor for Collect {
            fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
                if !matches!(s.kind, StmtKind::Empty) {
                    self.0.stmts.push((s.clone(), Needs::of(s)));
                }
                true
            }
            fn enter_expr(&mut self, e: &Expr, info: ExprInfo) -> bool {
                if info.slot != Slot::Target {
                    self.0.exprs.push(e.clone());
                }
                true
            }
        }
        let mut c = Collect(Fragments { exprs: Vec::new(), stmts: Vec::new() });
        walk_program(&mut c, &ast.program);
        c.0
    }
}

/// A corpus seed plus its lazily built fragment index.
#[derive(Debug)]
pub struct PoolSeed {
    pub id: String,
    pub ast: Ast,
    fragments: OnceLock<Fragments>,
}

impl PoolSeed {
    pub fn fragments(&self) -> &Fragments {
        self.fragments.get_or_init(|| Fragments::of(&self.ast))
    }
}

/// Shared, append-only pool of donor seeds.
#[derive(Debug, Default, Clone)]
pub struct DonorPool {
    seeds: Vec<Arc<PoolSeed>>,
}

impl DonorPool {
    pub fn new() -> Self {
        DonorPool::default()
    }

    pub fn add(&mut self, id: &str, ast: Ast) {
        self.seeds.push(Arc::new(PoolSeed { id: id.to_string(), ast, fragments: OnceLock::new() }));
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn get(&self, i: usize) -> &PoolSeed {
        &self.seeds[i]
    }

    pub fn by_id(&self, id: &str) -> Option<&PoolSeed> {
        self.seeds.iter().find(|s| s.id == id).map(|s| s.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::js::parse;

    fn needs(src: &str) -> Needs {
        let ast = parse(src).unwrap();
        Needs::of(&ast.program.body[0])
    }

    #[test]
    fn context_needs() {
        let ast = parse("while (1) { if (a) break; }").unwrap();
        let StmtKind::While { body, .. } = &ast.program.body[0].kind else { panic!() };
        let StmtKind::Block(b) = &body.kind else { panic!() };
        assert_eq!(Needs::of(&b[0]), Needs { loop_: true, ..Needs::default() });
        assert_eq!(needs("while (1) break;"), Needs::default());
        let ast = parse("function f() { if (a) return 1; }").unwrap();
        let StmtKind::Function(f) = &ast.program.body[0].kind else { panic!() };
        assert_eq!(Needs::of(&f.body[0]), Needs { function: true, ..Needs::default() });
        assert_eq!(needs("var f = function () { return 1; };"), Needs::default());
        assert_eq!(needs("let x = 1;"), Needs { list_only: true, ..Needs::default() });
        assert!(!needs("let x = 1;").fits(true, true, true));
        assert!(needs("var x = 1;").fits(false, false, true));
    }

    #[test]
    fn fragments_skip_assignment_targets() {
        let f = Fragments::of(&parse("x = a + 1;").unwrap());
        let texts: Vec<String> = f.exprs.iter().map(crate::js::print_expr).collect();
        assert_eq!(texts, ["x = a + 1", "a + 1", "a", "1"]);
        assert_eq!(f.stmts.len(), 1);
    }

    #[test]
    fn pool_indexes_lazily() {
        let mut pool = DonorPool::new();
        pool.add("s1", parse("f(1);").unwrap());
        assert_eq!(pool.by_id("s1").unwrap().fragments().exprs.len(), 3);
        assert!(pool.by_id("nope").is_none());
    }
}
