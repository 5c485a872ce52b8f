//! AST mutation: expression-level and statement-level delete, replace and
//! insert, with donor fragments taken from the seed itself or the corpus.

pub mod adapt;
pub mod donor;

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::js::edit::{self, sentinel_expr, Edits};
use crate::js::scope::declared_names;
use crate::js::visit::{walk_program, ExprInfo, ListInfo, ListKind, Slot, StmtInfo, Visitor};
use crate::js::{self, analyze, expr_at, stmt_at, Ast, BinOp, Expr, ExprKind, Program, ScopeInfo, Span, Stmt, StmtKind};
use crate::probe::TypeMap;

/// Donor bindings renamed on insertion, as (old, new).
pub type Renames = Vec<(String, String)>;

pub use adapt::adapt_variables;
pub use donor::{DonorPool, Fragments, Needs};

/// Attempts per call before giving up with a no-op.
pub const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intensity {
    Expression,
    Statement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Delete,
    Replace,
    Insert,
}

const ACTIONS: [Action; 3] = [Action::Delete, Action::Replace, Action::Insert];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DonorSource {
    #[serde(rename = "self")]
    SelfOnly,
    Corpus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adaptation {
    Typed,
    Untyped,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationConfig {
    /// Probability of an expression-level mutation.
    pub p_low: f64,
    /// Weights of delete, replace and insert.
    pub action_weights: [f64; 3],
    pub donor_source: DonorSource,
    /// With `donor_source = both`, chance the donor is the seed itself.
    pub self_donor_prob: f64,
    pub adaptation: Adaptation,
    pub rng_seed: u64,
}

impl Default for MutationConfig {
    fn default() -> Self {
        MutationConfig {
            p_low: 0.8,
            action_weights: [1.0; 3],
            donor_source: DonorSource::Both,
            self_donor_prob: 0.5,
            adaptation: Adaptation::Typed,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0} must be within [0, 1]")]
    Probability(&'static str),
    #[error("action weights must be positive")]
    Weights,
}

impl MutationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, p) in [("p_low", self.p_low), ("self_donor_prob", self.self_donor_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::Probability(name));
            }
        }
        if self.action_weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(ConfigError::Weights);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DonorOrigin {
    #[serde(rename = "self")]
    SelfSeed,
    Corpus(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationRecord {
    pub intensity: Intensity,
    pub action: Action,
    /// No attempt produced a valid mutant; the output is the seed.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub noop: bool,
    /// Byte range of the mutated node (or insertion point) in the parent.
    pub site: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub donor_origin: Option<DonorOrigin>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub renames: Renames,
}

/// The sample being mutated.
#[derive(Debug, Clone, Copy)]
pub struct Seed<'a> {
    pub id: &'a str,
    pub ast: &'a Ast,
    /// Runtime types from a probe run, if any.
    pub types: Option<&'a TypeMap>,
}

/// Independent rng stream for one mutation job.
pub fn job_rng(seed: u64, worker: u64, iteration: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&worker.to_le_bytes());
    key[16..24].copy_from_slice(&iteration.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, Copy)]
struct ExprSite {
    index: usize,
    span: Span,
    stmt: usize,
    list_stmt: usize,
}

#[derive(Debug, Clone, Copy)]
struct StmtSite {
    index: usize,
    span: Span,
    single_slot: bool,
    in_function: bool,
    in_loop: bool,
    /// (list index, position) for list members.
    slot: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
struct Boundary {
    list: usize,
    pos: usize,
    in_function: bool,
    in_loop: bool,
    at: u32,
}

#[derive(Debug, Default)]
struct Sites {
    exprs: Vec<ExprSite>,
    stmts: Vec<StmtSite>,
    boundaries: Vec<Boundary>,
    /// list index -> (kind, length)
    lists: Vec<(ListKind, usize)>,
    stmt_slot: HashMap<usize, (usize, usize)>,
}

impl Sites {
    fn of(program: &Program) -> Sites {
        struct Collect {
            sites: Sites,
            stack: Vec<(usize, usize)>,
        }
        impl Visitor for Collect {
            fn enter_list(&mut self, list: &Vec<Stmt>, info: ListInfo) {
                self.sites.lists.push((info.kind, list.len()));
                for pos in 0..=list.len() {
                    let at = match list.get(pos) {
                        Some(s) => s.span.start,
                        None => list.last().map_or(0, |s| s.span.end),
                    };
                    self.sites.boundaries.push(Boundary {
                        list: info.index,
                        pos,
                        in_function: info.in_function,
                        in_loop: info.in_loop,
                        at,
                    });
                }
                self.stack.push((info.index, 0));
            }
            fn leave_list(&mut self, _list: &Vec<Stmt>, _info: ListInfo) {
                self.stack.pop();
            }
            fn enter_stmt(&mut self, s: &Stmt, info: StmtInfo) -> bool {
                let mut slot = None;
                if let (Some(list), Some(top)) = (info.list, self.stack.last_mut()) {
                    if top.0 == list {
                        slot = Some((list, top.1));
                        self.sites.stmt_slot.insert(info.index, (list, top.1));
                        top.1 += 1;
                    }
                }
                self.sites.stmts.push(StmtSite {
                    index: info.index,
                    span: s.span,
                    single_slot: info.single_slot,
                    in_function: info.in_function,
                    in_loop: info.in_loop,
                    slot,
                });
                true
            }
            fn enter_expr(&mut self, e: &Expr, info: ExprInfo) -> bool {
                if info.slot != Slot::Target {
                    if let (Some(stmt), Some(list_stmt)) = (info.stmt, info.list_stmt) {
                        self.sites.exprs.push(ExprSite { index: info.index, span: e.span, stmt, list_stmt });
                    }
                }
                true
            }
        }
        let mut c = Collect { sites: Sites::default(), stack: Vec::new() };
        walk_program(&mut c, program);
        c.sites
    }
}

/// Operators used to splice a donor next to an expression.
const INSERT_OPS: &[BinOp] = &[
    BinOp::Add,
    BinOp::Sub,
    BinOp::Mul,
    BinOp::Div,
    BinOp::Mod,
    BinOp::BitAnd,
    BinOp::BitOr,
    BinOp::BitXor,
    BinOp::Shl,
    BinOp::Shr,
    BinOp::UShr,
    BinOp::Lt,
    BinOp::Gt,
    BinOp::Le,
    BinOp::Ge,
    BinOp::Eq,
    BinOp::StrictEq,
    BinOp::Ne,
    BinOp::And,
    BinOp::Or,
];

/// Wraps `site` into a binary or sequence expression with `donor` next to it.
fn extend_expr<R: Rng + ?Sized>(site: Expr, donor: Expr, rng: &mut R) -> Expr {
    if rng.gen_ratio(1, 4) {
        Expr::new(ExprKind::Seq(vec![site, donor]))
    } else {
        let op = *INSERT_OPS.choose(rng).expect("non-empty");
        Expr::new(ExprKind::Binary { op, left: Box::new(site), right: Box::new(donor) })
    }
}

/// Applies an expression mutation without adaptation. `donor` is required
/// for replace and insert. Returns None if `site` does not address a mutable
/// expression or the result does not parse.
pub fn mutate_expression(seed: &Ast, site: usize, action: Action, donor: Option<Expr>) -> Option<Ast> {
    let (expr, info) = expr_at(&seed.program, site)?;
    if info.slot == Slot::Target {
        return None;
    }
    let mut edits = Edits::default();
    let new = match (action, donor) {
        (Action::Delete, _) => sentinel_expr(),
        (Action::Replace, Some(d)) => d,
        (Action::Insert, Some(d)) => Expr::new(ExprKind::Binary { op: BinOp::Add, left: Box::new(expr), right: Box::new(d) }),
        _ => return None,
    };
    edits.replace_expr(site, new);
    finish(seed, edits)
}

/// Where a statement mutation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StmtTarget {
    /// Pre-order statement index (delete, replace).
    Stmt(usize),
    /// Position `pos` of statement list `list` (insert).
    Boundary { list: usize, pos: usize },
}

/// Applies a statement mutation without adaptation.
pub fn mutate_statement(seed: &Ast, target: StmtTarget, action: Action, donor: Option<Stmt>) -> Option<Ast> {
    let sites = Sites::of(&seed.program);
    let mut edits = Edits::default();
    match (target, action, donor) {
        (StmtTarget::Stmt(i), Action::Delete, _) => {
            let site = sites.stmts.iter().find(|s| s.index == i)?;
            delete_stmt(&sites, site, &mut edits);
        }
        (StmtTarget::Stmt(i), Action::Replace, Some(d)) => {
            stmt_at(&seed.program, i)?;
            edits.replace_stmt(i, d);
        }
        (StmtTarget::Boundary { list, pos }, Action::Insert, Some(d)) => edits.insert_stmt(list, pos, d),
        _ => return None,
    }
    finish(seed, edits)
}

fn delete_stmt(sites: &Sites, site: &StmtSite, edits: &mut Edits) {
    let sole_body = site
        .slot
        .is_some_and(|(list, _)| matches!(sites.lists.get(list), Some((ListKind::FunctionBody, 1))));
    if sole_body {
        edits.replace_stmt(site.index, Stmt::empty());
    } else {
        edits.delete_stmt(site.index);
    }
}

fn finish(seed: &Ast, edits: Edits) -> Option<Ast> {
    let mut program = seed.program.clone();
    if !edit::apply(&mut program, edits) {
        return None;
    }
    js::parse(&js::print_program(&program)).ok()
}

/// Per-call state shared by the attempts.
struct Job<'a, R: Rng + ?Sized> {
    seed: Seed<'a>,
    pool: &'a DonorPool,
    cfg: &'a MutationConfig,
    rng: &'a mut R,
    sites: Sites,
    scope: ScopeInfo,
    declared: BTreeSet<String>,
    function_names: BTreeMap<String, String>,
    own: OnceCell<Fragments>,
}

/// Edits for one attempt, before validation.
struct Plan {
    edits: Edits,
    site: Span,
    origin: Option<DonorOrigin>,
    renames: Renames,
}

impl<'a, R: Rng + ?Sized> Job<'a, R> {
    /// Picks the donor seed: None for the seed itself, else a pool index.
    fn pick_donor(&mut self) -> Option<usize> {
        let use_self = match self.cfg.donor_source {
            DonorSource::SelfOnly => true,
            DonorSource::Corpus => false,
            DonorSource::Both => self.rng.gen_bool(self.cfg.self_donor_prob),
        };
        (!use_self && !self.pool.is_empty()).then(|| self.rng.gen_range(0..self.pool.len()))
    }

    fn donor_fragments(&self, pick: Option<usize>) -> (&Fragments, DonorOrigin) {
        match pick {
            Some(i) => {
                let s = self.pool.get(i);
                (s.fragments(), DonorOrigin::Corpus(s.id.clone()))
            }
            None => {
                let own = match self.pool.by_id(self.seed.id) {
                    Some(s) => s.fragments(),
                    None => self.own.get_or_init(|| Fragments::of(self.seed.ast)),
                };
                (own, DonorOrigin::SelfSeed)
            }
        }
    }

    fn rng_index(&mut self, len: usize) -> Option<usize> {
        (len > 0).then(|| self.rng.gen_range(0..len))
    }

    /// Types visible at statement `stmt`: for each name, the latest probe
    /// result before it, else any probe result. Names of function
    /// declarations are known to be functions without probing.
    fn types_at(&self, stmt: usize) -> BTreeMap<String, String> {
        let mut out = self.function_names.clone();
        let Some(map) = self.seed.types else { return out };
        // Probes after the site only fill gaps; the nearest one wins on each side.
        for (_, vars) in map.range(stmt..).rev().chain(map.range(..stmt)) {
            for (n, t) in vars {
                out.insert(n.clone(), t.clone());
            }
        }
        out
    }

    /// Adapts a fragment for a site whose visible names are `scope`.
    fn adapt(&mut self, fragment: &mut Program, scope: Option<&BTreeSet<String>>, stmt: usize) -> adapt::Adapted {
        let types = match self.cfg.adaptation {
            Adaptation::Off => return adapt::Adapted::default(),
            Adaptation::Typed => Some(self.types_at(stmt)),
            Adaptation::Untyped => None,
        };
        let empty = BTreeSet::new();
        let scope = scope.unwrap_or(&empty);
        adapt_variables(fragment, scope, types.as_ref(), &self.declared, self.rng)
    }

    fn plan_expression(&mut self, action: Action) -> Option<Plan> {
        let site = *self.sites.exprs.choose(self.rng)?;
        let mut edits = Edits::default();
        if action == Action::Delete {
            edits.replace_expr(site.index, sentinel_expr());
            return Some(Plan { edits, site: site.span, origin: None, renames: Vec::new() });
        }
        let pick = self.pick_donor();
        let n = self.donor_fragments(pick).0.exprs.len();
        let chosen = self.rng_index(n)?;
        let (fragments, origin) = self.donor_fragments(pick);
        let fragment = fragments.exprs[chosen].clone();
        let mut program = Program { body: vec![Stmt::expr(fragment)] };
        let scope = self.scope.before_stmt(site.stmt).cloned();
        let adapted = self.adapt(&mut program, scope.as_ref(), site.stmt);
        let Some(StmtKind::Expr(fragment)) = program.body.pop().map(|s| s.kind) else { unreachable!() };
        let new = match action {
            Action::Replace => fragment,
            _ => {
                let (current, _) = expr_at(&self.seed.ast.program, site.index)?;
                extend_expr(current, fragment, self.rng)
            }
        };
        edits.replace_expr(site.index, new);
        let (list, pos) = *self.sites.stmt_slot.get(&site.list_stmt)?;
        for decl in adapted.fresh {
            edits.insert_stmt(list, pos, decl);
        }
        Some(Plan { edits, site: site.span, origin: Some(origin), renames: adapted.renames })
    }

    /// A donor statement fitting the context, with declarations that clash
    /// with the seed renamed.
    fn donor_stmt(&mut self, in_loop: bool, in_function: bool, single_slot: bool) -> Option<(Stmt, DonorOrigin, Renames)> {
        let pick = self.pick_donor();
        let fragments = self.donor_fragments(pick).0;
        let fitting: Vec<usize> = (0..fragments.stmts.len())
            .filter(|&i| fragments.stmts[i].1.fits(in_loop, in_function, single_slot))
            .collect();
        let chosen = fitting.get(self.rng_index(fitting.len())?).copied()?;
        let (fragments, origin) = self.donor_fragments(pick);
        let stmt = fragments.stmts[chosen].0.clone();
        let mut renames = Vec::new();
        let mut stmt = stmt;
        if stmt.is_declaration() {
            let mut program = Program { body: vec![stmt] };
            for name in adapt::top_level_bindings(&program.body[0]) {
                if self.declared.contains(&name) {
                    let mut taken = self.declared.clone();
                    taken.extend(declared_names(&program));
                    let to = adapt::fresh_name(&name, &taken);
                    adapt::rename_binding(&mut program, &name, &to);
                    renames.push((name, to));
                }
            }
            stmt = program.body.pop().expect("one statement");
        }
        Some((stmt, origin, renames))
    }

    fn plan_statement(&mut self, action: Action) -> Option<Plan> {
        let mut edits = Edits::default();
        match action {
            Action::Delete => {
                let site = *self.sites.stmts.choose(self.rng)?;
                delete_stmt(&self.sites, &site, &mut edits);
                Some(Plan { edits, site: site.span, origin: None, renames: Vec::new() })
            }
            Action::Replace => {
                let site = *self.sites.stmts.choose(self.rng)?;
                let (stmt, origin, mut renames) = self.donor_stmt(site.in_loop, site.in_function, site.single_slot)?;
                let mut program = Program { body: vec![stmt] };
                let scope = self.scope.before_stmt(site.index).cloned();
                let adapted = self.adapt(&mut program, scope.as_ref(), site.index);
                renames.extend(adapted.renames);
                let mut stmt = program.body.pop().expect("one statement");
                match site.slot {
                    Some((list, pos)) => {
                        for decl in adapted.fresh {
                            edits.insert_stmt(list, pos, decl);
                        }
                    }
                    None if !adapted.fresh.is_empty() => {
                        let mut block = adapted.fresh;
                        block.push(stmt);
                        stmt = Stmt::new(StmtKind::Block(block));
                    }
                    None => {}
                }
                edits.replace_stmt(site.index, stmt);
                Some(Plan { edits, site: site.span, origin: Some(origin), renames })
            }
            Action::Insert => {
                let b = *self.sites.boundaries.choose(self.rng)?;
                let (stmt, origin, mut renames) = self.donor_stmt(b.in_loop, b.in_function, false)?;
                let mut program = Program { body: vec![stmt] };
                let scope = self.scope.at_boundary(b.list, b.pos).cloned();
                let next_stmt = self.sites.stmt_slot.iter().find(|(_, slot)| **slot == (b.list, b.pos)).map(|(i, _)| *i);
                let adapted = self.adapt(&mut program, scope.as_ref(), next_stmt.unwrap_or(usize::MAX));
                renames.extend(adapted.renames);
                for decl in adapted.fresh {
                    edits.insert_stmt(b.list, b.pos, decl);
                }
                edits.insert_stmt(b.list, b.pos, program.body.pop().expect("one statement"));
                Some(Plan { edits, site: Span { start: b.at, end: b.at }, origin: Some(origin), renames })
            }
        }
    }
}

/// Every function declaration's name, typed as "Function".
fn function_names(program: &Program) -> BTreeMap<String, String> {
    struct Names(BTreeMap<String, String>);
    impl Visitor for Names {
        fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
            if let StmtKind::Function(f) = &s.kind {
                self.0.extend(f.name.clone().map(|n| (n, "Function".to_string())));
            }
            true
        }
    }
    let mut n = Names(BTreeMap::new());
    walk_program(&mut n, program);
    n.0
}

fn undeclared_names(program: &Program) -> BTreeSet<String> {
    analyze(program).undeclared.into_iter().map(|u| u.name).collect()
}

/// Produces one mutant of `seed`. The intensity is drawn once; each attempt
/// draws an action and a site. A mutant is accepted when it reprints to
/// parsable text and, with adaptation on, references no name the seed did
/// not already leave unresolved.
pub fn mutate<R: Rng + ?Sized>(seed: Seed<'_>, pool: &DonorPool, cfg: &MutationConfig, rng: &mut R) -> (Ast, MutationRecord) {
    let intensity = if rng.gen_bool(cfg.p_low) { Intensity::Expression } else { Intensity::Statement };
    let weights = WeightedIndex::new(cfg.action_weights).expect("validated action weights");
    let program = &seed.ast.program;
    let baseline = undeclared_names(program);
    let mut job = Job {
        seed,
        pool,
        cfg,
        rng,
        sites: Sites::of(program),
        scope: analyze(program),
        declared: declared_names(program).into_iter().collect(),
        function_names: function_names(program),
        own: OnceCell::new(),
    };
    let mut last_action = Action::Delete;
    for _ in 0..MAX_ATTEMPTS {
        let action = ACTIONS[weights.sample(job.rng)];
        last_action = action;
        let plan = match intensity {
            Intensity::Expression => job.plan_expression(action),
            Intensity::Statement => job.plan_statement(action),
        };
        let Some(plan) = plan else { continue };
        let mut out = program.clone();
        if !edit::apply(&mut out, plan.edits) {
            continue;
        }
        let Ok(mutant) = js::parse(&js::print_program(&out)) else { continue };
        if cfg.adaptation != Adaptation::Off && !undeclared_names(&mutant.program).is_subset(&baseline) {
            continue;
        }
        let record = MutationRecord {
            intensity,
            action,
            noop: false,
            site: (plan.site.start, plan.site.end),
            donor_origin: plan.origin,
            renames: plan.renames,
        };
        return (mutant, record);
    }
    let record = MutationRecord {
        intensity,
        action: last_action,
        noop: true,
        site: (0, 0),
        donor_origin: None,
        renames: Vec::new(),
    };
    (seed.ast.clone(), record)
}
