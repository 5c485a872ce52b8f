//! Deterministic stand-in for a JavaScript engine.
//!
//! It never executes anything: the input is parsed, syntactic features are
//! collected, and a rules file maps features to coverage edges and exit
//! behaviour. Parse failures and (optionally) unresolved references are
//! reported with the grammar-error exit code, like a real shell would.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::exec::{ExecError, Executor, RunOutput};
use crate::js::visit::{walk_program, ExprInfo, StmtInfo, Visitor};
use crate::js::{self, Expr, ExprKind, Stmt};

pub const DEFAULT_RULES: &str = include_str!("../../data/fake/default.json");

/// Exit behaviour triggered by a rule. `{"crash": 11}`, `{"exit": 2}` or `"timeout"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FakeAction {
    Crash(i32),
    Exit(i32),
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureRule {
    pub when: String,
    #[serde(default)]
    pub edges: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<FakeAction>,
}

fn grammar_default() -> i32 {
    3
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FakeRules {
    #[serde(default = "grammar_default")]
    pub grammar_exit_code: i32,
    /// Report references to undeclared names as grammar errors.
    #[serde(default)]
    pub check_references: bool,
    #[serde(default)]
    pub rules: Vec<FeatureRule>,
    /// Edge id -> name of the function the edge belongs to.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_functions: BTreeMap<u32, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Feature {
    Always,
    Stmt(String),
    Expr(String),
    Op(String),
    Call(String),
    /// Statement kind nested in itself at least this deep.
    Nest(String, usize),
    /// At least this many statements of a kind.
    Count(String, usize),
    Ident(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FakeError {
    #[error("bad fake-target rules: {0}")]
    Json(String),
    #[error("rule {index}: bad feature {text:?}")]
    Feature { index: usize, text: String },
}

impl Feature {
    pub fn parse(text: &str) -> Option<Feature> {
        let (head, rest) = text.split_once(':').unwrap_or((text, ""));
        let counted = |rest: &str| -> Option<(String, usize)> {
            let (kind, n) = rest.rsplit_once(':')?;
            Some((kind.to_string(), n.parse().ok()?))
        };
        let word = |rest: &str| (!rest.is_empty()).then(|| rest.to_string());
        Some(match head {
            "always" if rest.is_empty() => Feature::Always,
            "stmt" => Feature::Stmt(word(rest)?),
            "expr" => Feature::Expr(word(rest)?),
            "op" => Feature::Op(word(rest)?),
            "call" => Feature::Call(word(rest)?),
            "ident" => Feature::Ident(word(rest)?),
            "nest" => {
                let (k, n) = counted(rest)?;
                Feature::Nest(k, n)
            }
            "count" => {
                let (k, n) = counted(rest)?;
                Feature::Count(k, n)
            }
            _ => return None,
        })
    }

    fn holds(&self, f: &Features) -> bool {
        match self {
            Feature::Always => true,
            Feature::Stmt(k) => f.stmts.contains_key(k.as_str()),
            Feature::Expr(k) => f.exprs.contains(k.as_str()),
            Feature::Op(o) => f.ops.contains(o.as_str()),
            Feature::Call(c) => f.calls.contains(c),
            Feature::Ident(n) => f.idents.contains(n),
            Feature::Nest(k, d) => f.nesting.get(k.as_str()).is_some_and(|m| m >= d),
            Feature::Count(k, n) => f.stmts.get(k.as_str()).is_some_and(|c| c >= n),
        }
    }
}

/// Syntactic facts about one program.
#[derive(Debug, Default)]
pub struct Features {
    stmts: HashMap<&'static str, usize>,
    exprs: HashSet<&'static str>,
    ops: HashSet<&'static str>,
    calls: HashSet<String>,
    idents: HashSet<String>,
    nesting: HashMap<&'static str, usize>,
    stack: Vec<&'static str>,
}

impl Visitor for Features {
    fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
        let k = s.kind_name();
        *self.stmts.entry(k).or_default() += 1;
        let depth = 1 + self.stack.iter().filter(|x| **x == k).count();
        let m = self.nesting.entry(k).or_default();
        *m = (*m).max(depth);
        self.stack.push(k);
        true
    }

    fn leave_stmt(&mut self, _s: &Stmt, _info: StmtInfo) {
        self.stack.pop();
    }

    fn enter_expr(&mut self, e: &Expr, _info: ExprInfo) -> bool {
        self.exprs.insert(e.kind.name());
        match &e.kind {
            ExprKind::Binary { op, .. } => {
                self.ops.insert(op.as_str());
            }
            ExprKind::Unary { op, .. } => {
                self.ops.insert(op.as_str());
            }
            ExprKind::Assign { op, .. } => {
                self.ops.insert(op.as_str());
            }
            ExprKind::Update { incr, .. } => {
                self.ops.insert(if *incr { "++" } else { "--" });
            }
            ExprKind::Call { callee, .. } => {
                if let Some(n) = callee.dotted_name() {
                    self.calls.insert(n);
                }
            }
            ExprKind::Ident(n) => {
                self.idents.insert(n.clone());
            }
            _ => {}
        }
        true
    }
}

impl Features {
    pub fn of(program: &js::Program) -> Features {
        let mut f = Features::default();
        walk_program(&mut f, program);
        f
    }
}

#[derive(Debug, Clone)]
pub struct FakeTarget {
    config: FakeRules,
    features: Vec<Feature>,
}

impl FakeTarget {
    pub fn new(config: FakeRules) -> Result<FakeTarget, FakeError> {
        let features = config
            .rules
            .iter()
            .enumerate()
            .map(|(index, r)| Feature::parse(&r.when).ok_or(FakeError::Feature { index, text: r.when.clone() }))
            .collect::<Result<_, _>>()?;
        Ok(FakeTarget { config, features })
    }

    pub fn from_json(text: &str) -> Result<FakeTarget, FakeError> {
        FakeTarget::new(serde_json::from_str(text).map_err(|e| FakeError::Json(e.to_string()))?)
    }

    pub fn default_target() -> FakeTarget {
        FakeTarget::from_json(DEFAULT_RULES).expect("bundled fake rules are valid")
    }

    pub fn config(&self) -> &FakeRules {
        &self.config
    }

    /// Every edge some rule can emit.
    pub fn all_edges(&self) -> Vec<u32> {
        let mut e: Vec<u32> = self.config.rules.iter().flat_map(|r| r.edges.iter().copied()).collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn evaluate(&self, src: &str) -> RunOutput {
        let grammar = |stderr: String| RunOutput {
            exit_code: Some(self.config.grammar_exit_code),
            stderr,
            ..RunOutput::default()
        };
        let ast = match js::parse(src) {
            Ok(a) => a,
            Err(e) => return grammar(format!("SyntaxError: {e}\n")),
        };
        if self.config.check_references {
            if let Some(u) = js::analyze(&ast.program).undeclared.first() {
                return grammar(format!("ReferenceError: {} is not defined\n", u.name));
            }
        }
        let facts = Features::of(&ast.program);
        let mut out = RunOutput { exit_code: Some(0), ..RunOutput::default() };
        let mut action = None;
        for (rule, feature) in self.config.rules.iter().zip(&self.features) {
            if feature.holds(&facts) {
                out.edges.extend(&rule.edges);
                if action.is_none() {
                    action = rule.action;
                }
            }
        }
        out.edges.sort_unstable();
        out.edges.dedup();
        match action {
            Some(FakeAction::Crash(sig)) => {
                out.exit_code = None;
                out.signal = Some(sig);
                out.stderr = format!("fake-target: planted crash (signal {sig})\n");
            }
            Some(FakeAction::Exit(code)) => out.exit_code = Some(code),
            Some(FakeAction::Timeout) => {
                out.exit_code = None;
                out.timed_out = true;
            }
            None => {}
        }
        out
    }
}

/// Runs the fake target in process.
#[derive(Debug, Clone)]
pub struct FakeExecutor {
    target: FakeTarget,
}

impl FakeExecutor {
    pub fn new(target: FakeTarget) -> Self {
        FakeExecutor { target }
    }
}

impl Executor for FakeExecutor {
    fn run(&mut self, sample: &str) -> Result<RunOutput, ExecError> {
        let mut out = self.target.evaluate(sample);
        out.wall_time = Duration::ZERO;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(json: &str) -> FakeTarget {
        FakeTarget::from_json(json).unwrap()
    }

    #[test]
    fn feature_syntax() {
        assert_eq!(Feature::parse("always"), Some(Feature::Always));
        assert_eq!(Feature::parse("nest:for:2"), Some(Feature::Nest("for".into(), 2)));
        assert_eq!(Feature::parse("call:Math.abs"), Some(Feature::Call("Math.abs".into())));
        assert_eq!(Feature::parse("count:if:3"), Some(Feature::Count("if".into(), 3)));
        assert_eq!(Feature::parse("nest:for"), None);
        assert_eq!(Feature::parse("stmt:"), None);
        assert_eq!(Feature::parse("bogus:x"), None);
    }

    #[test]
    fn nested_for_crashes() {
        let t = target(r#"{"rules":[{"when":"always","edges":[1]},{"when":"nest:for:2","edges":[9],"action":{"crash":11}}]}"#);
        let flat = t.evaluate("for (;;) break;\nfor (;;) break;\n");
        assert_eq!((flat.exit_code, flat.signal, flat.edges.clone()), (Some(0), None, vec![1]));
        let nested = t.evaluate("for (;;) { for (;;) break; break; }\n");
        assert_eq!((nested.exit_code, nested.signal, nested.edges), (None, Some(11), vec![1, 9]));
    }

    #[test]
    fn grammar_errors() {
        let t = target(r#"{"check_references":true,"rules":[{"when":"always","edges":[1]}]}"#);
        let out = t.evaluate("var = ;");
        assert_eq!(out.exit_code, Some(3));
        assert!(out.stderr.starts_with("SyntaxError"));
        assert!(out.edges.is_empty());
        let out = t.evaluate("load('x');");
        assert_eq!(out.exit_code, Some(3));
        assert_eq!(out.stderr, "ReferenceError: load is not defined\n");
        assert_eq!(t.evaluate("print(1);").exit_code, Some(0));
    }

    #[test]
    fn first_action_wins() {
        let t = target(r#"{"rules":[{"when":"op:+","action":{"exit":2}},{"when":"always","action":"timeout"}]}"#);
        assert_eq!(t.evaluate("1 + 2;").exit_code, Some(2));
        assert!(t.evaluate("1 - 2;").timed_out);
    }

    #[test]
    fn bad_rules_are_rejected() {
        assert!(matches!(FakeTarget::from_json(r#"{"rules":[{"when":"nest:x"}]}"#), Err(FakeError::Feature { index: 0, .. })));
        assert!(matches!(FakeTarget::from_json("{"), Err(FakeError::Json(_))));
    }

    #[test]
    fn bundled_rules_load() {
        let t = FakeTarget::default_target();
        assert!(!t.all_edges().is_empty());
        assert_eq!(t.config().grammar_exit_code, 3);
    }
}
