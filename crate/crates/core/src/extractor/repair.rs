//! Rule-based repair of harness-dependent PoCs.
//!
//! Text that parses is repaired on the tree and printed canonically. Text
//! that does not parse (module syntax, mostly) is repaired on rough tokens
//! until it parses, then continues on the tree.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::PocRecord;
use crate::js::edit::{self, Edits};
use crate::js::lexer::{rough_tokens, Tok, Token};
use crate::js::scope::declared_names;
use crate::js::visit::{walk_expr_mut, walk_program, walk_stmt, ExprInfo, Slot, Visitor, VisitorMut};
use crate::js::{self, Expr, ExprKind, Program, Stmt, StmtKind};

const MAX_ROUNDS: usize = 64;
const ARGS_PLACEHOLDER: &str = "__repair_args__";
const ARG0_PLACEHOLDER: &str = "__repair_arg0__";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleAction {
    Remove,
    Rewrite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleScope {
    Token,
    Statement,
    Line,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairRule {
    /// Identifier, or prefix ending in `*`, matched against the root of a
    /// reference or callee chain.
    #[serde(rename = "match")]
    pub pattern: String,
    pub action: RuleAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replacement: Option<String>,
    pub scope: RuleScope,
}

impl RepairRule {
    pub fn matches(&self, name: &str) -> bool {
        match self.pattern.strip_suffix('*') {
            Some(prefix) => name.starts_with(prefix),
            None => name == self.pattern,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("rule line {line}: {message}")]
pub struct RuleError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    rules: Vec<RepairRule>,
    templates: Vec<Option<Expr>>,
}

fn parse_template(t: &str) -> Result<Expr, String> {
    let text = t.replace("{args}", ARGS_PLACEHOLDER).replace("{arg0}", ARG0_PLACEHOLDER);
    js::parse_expression(&text).map_err(|e| format!("replacement {t:?} is not an expression: {e}"))
}

impl RuleSet {
    pub fn new(rules: Vec<RepairRule>) -> Result<RuleSet, RuleError> {
        let mut templates = Vec::with_capacity(rules.len());
        for (i, r) in rules.iter().enumerate() {
            let err = |message: String| RuleError { line: i + 1, message };
            let name = r.pattern.strip_suffix('*').unwrap_or(&r.pattern);
            if name.is_empty() || name.contains('*') {
                return Err(err(format!("bad pattern {:?}", r.pattern)));
            }
            match (r.action, &r.replacement) {
                (RuleAction::Rewrite, Some(t)) => templates.push(Some(parse_template(t).map_err(err)?)),
                (RuleAction::Rewrite, None) => return Err(err("rewrite rule without replacement".into())),
                (RuleAction::Remove, Some(_)) => return Err(err("remove rule with a replacement".into())),
                (RuleAction::Remove, None) => templates.push(None),
            }
        }
        Ok(RuleSet { rules, templates })
    }

    /// Newline-delimited JSON records; blank lines and `#` comments are skipped.
    pub fn from_jsonl(text: &str) -> Result<RuleSet, RuleError> {
        let mut rules = Vec::new();
        let mut lines = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let r: RepairRule =
                serde_json::from_str(t).map_err(|e| RuleError { line: i + 1, message: e.to_string() })?;
            rules.push(r);
            lines.push(i + 1);
        }
        RuleSet::new(rules).map_err(|e| RuleError { line: lines[e.line - 1], ..e })
    }

    /// The default rules shipped for a profile.
    pub fn builtin(profile: &str) -> Option<RuleSet> {
        let text = match profile {
            "jsc" => include_str!("../../data/rules/jsc.jsonl"),
            "v8" => include_str!("../../data/rules/v8.jsonl"),
            "sm" => include_str!("../../data/rules/sm.jsonl"),
            "ch" => include_str!("../../data/rules/ch.jsonl"),
            "jerry" => include_str!("../../data/rules/jerry.jsonl"),
            "qjs" => include_str!("../../data/rules/qjs.jsonl"),
            "fake" => include_str!("../../data/rules/fake.jsonl"),
            _ => return None,
        };
        Some(RuleSet::from_jsonl(text).expect("bundled rule file is valid"))
    }

    pub fn rules(&self) -> &[RepairRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rewrites first, then removes; file order within each group.
    fn ordered(&self) -> impl Iterator<Item = (&RepairRule, Option<&Expr>)> {
        let pick = |action| {
            self.rules
                .iter()
                .zip(&self.templates)
                .filter(move |(r, _)| r.action == action)
                .map(|(r, t)| (r, t.as_ref()))
        };
        pick(RuleAction::Rewrite).chain(pick(RuleAction::Remove))
    }
}

/// Applies `rules` to the record's current text. Returns the record unchanged
/// when no rule fires.
pub fn repair(p: &PocRecord, rules: &RuleSet) -> PocRecord {
    match repair_text(p.text(), rules) {
        Some(text) => PocRecord { repaired_text: Some(text), ..p.clone() },
        None => p.clone(),
    }
}

/// Repaired text, or None if no rule fired.
pub fn repair_text(text: &str, rules: &RuleSet) -> Option<String> {
    let mut text = text.to_string();
    let mut fired = false;
    for _ in 0..MAX_ROUNDS {
        match js::parse(&text) {
            Ok(mut ast) => {
                if repair_program(&mut ast.program, rules) {
                    text = js::print_program(&ast.program);
                    fired = true;
                }
                break;
            }
            Err(_) => match repair_tokens(&text, rules) {
                Some(t) => {
                    text = t;
                    fired = true;
                }
                None => break,
            },
        }
    }
    if !fired {
        return None;
    }
    Some(js::canonicalize(&text).unwrap_or(text))
}

/// Tree repair to a fixpoint. Returns true if anything changed.
pub fn repair_program(program: &mut Program, rules: &RuleSet) -> bool {
    let mut changed = false;
    for _ in 0..MAX_ROUNDS {
        let mut round = false;
        for (rule, template) in rules.ordered() {
            round |= apply_rule(program, rule, template);
        }
        if !round {
            break;
        }
        changed = true;
    }
    changed
}

struct Occurrence {
    expr: usize,
    stmt: Option<usize>,
    args: Vec<Expr>,
}

/// Finds references and calls whose chain root matches the rule.
struct Finder<'a> {
    rule: &'a RepairRule,
    declared: &'a HashSet<String>,
    callees: HashSet<usize>,
    found: Vec<Occurrence>,
}

impl Finder<'_> {
    fn root_matches(&self, e: &Expr) -> bool {
        e.chain_root().is_some_and(|n| self.rule.matches(n) && !self.declared.contains(n))
    }
}

impl Visitor for Finder<'_> {
    fn enter_expr(&mut self, e: &Expr, info: ExprInfo) -> bool {
        if self.callees.contains(&info.index) {
            return false;
        }
        match &e.kind {
            ExprKind::Call { callee, args } | ExprKind::New { callee, args } if self.root_matches(callee) => {
                // The callee is the first child in pre-order.
                self.callees.insert(info.index + 1);
                self.found.push(Occurrence { expr: info.index, stmt: info.stmt, args: args.clone() });
                true
            }
            ExprKind::Ident(_) | ExprKind::Member { .. } if self.root_matches(e) => {
                if info.slot != Slot::Target {
                    self.found.push(Occurrence { expr: info.index, stmt: info.stmt, args: Vec::new() });
                }
                false
            }
            _ => true,
        }
    }
}

struct Substitute<'a> {
    args: &'a [Expr],
}

impl Substitute<'_> {
    fn splice(&self, items: &mut Vec<Expr>) {
        if items.iter().any(|x| x.as_ident() == Some(ARGS_PLACEHOLDER)) {
            let old = std::mem::take(items);
            for x in old {
                if x.as_ident() == Some(ARGS_PLACEHOLDER) {
                    items.extend(self.args.iter().cloned());
                } else {
                    items.push(x);
                }
            }
        }
    }
}

impl VisitorMut for Substitute<'_> {
    fn leave_expr(&mut self, e: &mut Expr, info: ExprInfo) {
        match &mut e.kind {
            ExprKind::Call { args, .. } | ExprKind::New { args, .. } | ExprKind::Array(args) => self.splice(args),
            ExprKind::Ident(n) if n == ARG0_PLACEHOLDER => {
                *e = self.args.first().cloned().unwrap_or_else(|| Expr::ident("undefined"));
            }
            ExprKind::Ident(n) if n == ARGS_PLACEHOLDER && info.slot != Slot::ListItem => {
                // `{args}` outside an argument list: keep the first one.
                *e = self.args.first().cloned().unwrap_or_else(|| Expr::ident("undefined"));
            }
            _ => {}
        }
    }
}

fn instantiate(template: &Expr, args: &[Expr]) -> Expr {
    let mut out = template.clone();
    walk_expr_mut(&mut Substitute { args }, &mut out);
    out
}

/// Counts identifier references by name.
#[derive(Default)]
struct RefCount(HashMap<String, usize>);

impl Visitor for RefCount {
    fn enter_expr(&mut self, e: &Expr, _info: ExprInfo) -> bool {
        if let Some(n) = e.as_ident() {
            *self.0.entry(n.to_string()).or_default() += 1;
        }
        true
    }
}

/// Names a simple statement introduces or overwrites: declared variables and
/// plain identifiers assigned at the top of an expression statement.
fn bindings(s: &Stmt) -> Option<Vec<String>> {
    fn assigned(e: &Expr, out: &mut Vec<String>) {
        match &e.kind {
            ExprKind::Assign { target, value, .. } => {
                if let Some(n) = target.as_ident() {
                    out.push(n.to_string());
                }
                assigned(value, out);
            }
            ExprKind::Seq(items) => items.iter().for_each(|x| assigned(x, out)),
            _ => {}
        }
    }
    match &s.kind {
        StmtKind::Var(v) => Some(v.decls.iter().map(|d| d.name.clone()).collect()),
        StmtKind::Expr(e) => {
            let mut out = Vec::new();
            assigned(e, &mut out);
            Some(out)
        }
        _ => None,
    }
}

/// True when removing statement `index` cannot break another statement:
/// it is a declaration or expression statement and nothing outside it
/// references the names it binds.
fn removable(program: &Program, index: usize, totals: &RefCount) -> bool {
    let Some((stmt, _)) = js::stmt_at(program, index) else { return false };
    let Some(names) = bindings(&stmt) else { return false };
    let mut inside = RefCount::default();
    walk_stmt(&mut inside, &stmt);
    names.iter().all(|n| totals.0.get(n).copied().unwrap_or(0) == inside.0.get(n).copied().unwrap_or(0))
}

fn apply_rule(program: &mut Program, rule: &RepairRule, template: Option<&Expr>) -> bool {
    let declared: HashSet<String> = declared_names(program).into_iter().collect();
    let mut finder = Finder { rule, declared: &declared, callees: HashSet::new(), found: Vec::new() };
    walk_program(&mut finder, program);
    if finder.found.is_empty() {
        return false;
    }
    let mut edits = Edits::default();
    match (rule.action, template) {
        (RuleAction::Rewrite, Some(t)) => {
            for occ in &finder.found {
                edits.replace_expr(occ.expr, instantiate(t, &occ.args));
            }
        }
        _ => {
            let mut totals = RefCount::default();
            walk_program(&mut totals, program);
            for occ in &finder.found {
                let stmt = occ.stmt.filter(|_| rule.scope != RuleScope::Token);
                match stmt {
                    Some(s) if removable(program, s, &totals) => edits.delete_stmt(s),
                    _ => edits.replace_expr(occ.expr, Expr::ident("undefined")),
                }
            }
        }
    }
    edit::apply(program, edits);
    true
}

// ---------------------------------------------------------------------------
// Token mode

fn is_ident(t: &Token) -> Option<&str> {
    match &t.tok {
        Tok::Ident(n) => Some(n),
        _ => None,
    }
}

fn is_punct(t: &Token, p: &str) -> bool {
    matches!(t.tok, Tok::Punct(q) if q == p)
}

/// Index of the bracket closing the one at `open`.
fn matching(toks: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0i32;
    for (i, t) in toks.iter().enumerate().skip(open) {
        match t.tok {
            Tok::Punct("(" | "[" | "{") => depth += 1,
            Tok::Punct(")" | "]" | "}") => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn token_declared(toks: &[Token]) -> HashSet<String> {
    toks.windows(2)
        .filter(|w| matches!(w[0].tok, Tok::Keyword("var" | "let" | "const" | "function")))
        .filter_map(|w| is_ident(&w[1]).map(str::to_string))
        .collect()
}

struct TokOccurrence {
    first: usize,
    last: usize,
    /// Byte range of the argument list contents, for calls.
    args: Option<Range<usize>>,
    arg_tokens: Range<usize>,
}

fn find_token_occurrences(toks: &[Token], rule: &RepairRule, declared: &HashSet<String>) -> Vec<TokOccurrence> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let hit = is_ident(&toks[i]).is_some_and(|n| rule.matches(n) && !declared.contains(n))
            && !(i > 0 && (is_punct(&toks[i - 1], ".") || is_punct(&toks[i - 1], "?.")));
        if !hit {
            i += 1;
            continue;
        }
        let mut last = i;
        loop {
            if last + 2 < toks.len() && is_punct(&toks[last + 1], ".") {
                last += 2;
            } else if last + 1 < toks.len() && is_punct(&toks[last + 1], "[") {
                match matching(toks, last + 1) {
                    Some(c) => last = c,
                    None => break,
                }
            } else {
                break;
            }
        }
        let mut args = None;
        let mut arg_tokens = 0..0;
        if last + 1 < toks.len() && is_punct(&toks[last + 1], "(") {
            if let Some(close) = matching(toks, last + 1) {
                args = Some(toks[last + 1].end..toks[close].start);
                arg_tokens = last + 2..close;
                last = close;
            }
        }
        out.push(TokOccurrence { first: i, last, args, arg_tokens });
        i = last + 1;
    }
    out
}

/// Source text of the first top-level argument.
fn first_arg(src: &str, toks: &[Token], range: Range<usize>) -> Option<String> {
    if range.is_empty() {
        return None;
    }
    let mut depth = 0i32;
    let mut end = range.end;
    for i in range.clone() {
        match toks[i].tok {
            Tok::Punct("(" | "[" | "{") => depth += 1,
            Tok::Punct(")" | "]" | "}") => depth -= 1,
            Tok::Punct(",") if depth == 0 => {
                end = i;
                break;
            }
            _ => {}
        }
    }
    if end == range.start {
        return None;
    }
    let text = &src[toks[range.start].start..toks[end - 1].end];
    Some(if end - range.start > 1 { format!("({text})") } else { text.to_string() })
}

fn line_start(src: &str, at: usize) -> usize {
    src[..at].rfind('\n').map_or(0, |i| i + 1)
}

fn line_end(src: &str, at: usize) -> usize {
    src[at..].find('\n').map_or(src.len(), |i| at + i + 1)
}

/// Widens a statement span to whole lines when nothing else shares them.
fn statement_span(src: &str, start: usize, end: usize) -> Range<usize> {
    let ls = line_start(src, start);
    let le = line_end(src, end);
    let before_blank = src[ls..start].trim().is_empty();
    let after_blank = src[end..le].trim().is_empty();
    if before_blank && after_blank {
        ls..le
    } else {
        start..end
    }
}

fn starts_statement(toks: &[Token], i: usize) -> bool {
    i == 0 || toks[i].nl_before || matches!(toks[i - 1].tok, Tok::Punct(";" | "{" | "}"))
}

/// One rule's worth of token edits, or None if no rule fires.
pub fn repair_tokens(src: &str, rules: &RuleSet) -> Option<String> {
    let toks = rough_tokens(src);
    let declared = token_declared(&toks);
    for (rule, _) in rules.ordered() {
        let occs = find_token_occurrences(&toks, rule, &declared);
        if occs.is_empty() {
            continue;
        }
        let mut edits: Vec<(Range<usize>, String)> = Vec::new();
        for o in &occs {
            let span = toks[o.first].start..toks[o.last].end;
            match rule.action {
                RuleAction::Rewrite => {
                    let template = rule.replacement.as_deref().unwrap_or("");
                    let args = o.args.clone().map(|r| src[r].trim().to_string()).unwrap_or_default();
                    let arg0 = first_arg(src, &toks, o.arg_tokens.clone()).unwrap_or_else(|| "undefined".into());
                    edits.push((span, template.replace("{args}", &args).replace("{arg0}", &arg0)));
                }
                RuleAction::Remove => edits.push(remove_edit(src, &toks, o, rule.scope)),
            }
        }
        return Some(apply_text_edits(src, edits));
    }
    None
}

fn remove_edit(src: &str, toks: &[Token], o: &TokOccurrence, scope: RuleScope) -> (Range<usize>, String) {
    let span = toks[o.first].start..toks[o.last].end;
    match scope {
        RuleScope::Token => {
            let mut last = o.last;
            // `export default function` loses both words.
            if o.args.is_none() && toks.get(last + 1).and_then(is_ident) == Some("default") {
                last += 1;
            }
            let mut end = toks[last].end;
            end += src[end..].len() - src[end..].trim_start_matches([' ', '\t']).len();
            (span.start..end, String::new())
        }
        RuleScope::Line => (line_start(src, span.start)..line_end(src, span.end), String::new()),
        RuleScope::Statement => {
            // `var x = load(...)` is removable when `x` is not used elsewhere.
            let mut first = o.first;
            if first >= 3
                && is_punct(&toks[first - 1], "=")
                && matches!(toks[first - 3].tok, Tok::Keyword("var" | "let" | "const"))
            {
                let name = is_ident(&toks[first - 2]);
                let used = toks.iter().enumerate().any(|(i, t)| i != first - 2 && is_ident(t).is_some() && is_ident(t) == name);
                if used {
                    return (span, "undefined".into());
                }
                first -= 3;
            }
            let mut last = o.last;
            if toks.get(last + 1).is_some_and(|t| is_punct(t, ";")) {
                last += 1;
            }
            let ends = toks.get(last + 1).is_none_or(|t| t.nl_before || is_punct(t, "}"));
            if starts_statement(toks, first) && ends {
                (statement_span(src, toks[first].start, toks[last].end), String::new())
            } else {
                (span, "undefined".into())
            }
        }
    }
}

fn apply_text_edits(src: &str, mut edits: Vec<(Range<usize>, String)>) -> String {
    edits.sort_by_key(|(r, _)| r.start);
    let mut out = String::with_capacity(src.len());
    let mut pos = 0;
    for (r, text) in edits {
        if r.start < pos {
            continue;
        }
        out.push_str(&src[pos..r.start]);
        out.push_str(&text);
        pos = r.end;
    }
    out.push_str(&src[pos..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules(lines: &[&str]) -> RuleSet {
        RuleSet::from_jsonl(&lines.join("\n")).unwrap()
    }

    const VM: &str = r#"{"match":"$vm","action":"rewrite","replacement":"print({args})","scope":"token"}"#;
    const LOAD: &str = r#"{"match":"load","action":"remove","scope":"statement"}"#;
    const ASSERT: &str = r#"{"match":"assert*","action":"rewrite","replacement":"{arg0}","scope":"token"}"#;
    const EXPORT: &str = r#"{"match":"export","action":"remove","scope":"token"}"#;

    #[test]
    fn vm_call_becomes_print() {
        let out = repair_text("var o = {};\n$vm.haveABadTime(o);\n", &rules(&[VM])).unwrap();
        assert_eq!(out, "var o = {};\nprint(o);\n");
        let out = repair_text("$vm.f(1, [2]);\n$vm.g;\n", &rules(&[VM])).unwrap();
        assert_eq!(out, "print(1, [2]);\nprint();\n");
    }

    #[test]
    fn standalone_load_line_is_deleted() {
        let out = repair_text("load(\"harness.js\");\nprint(1);\n", &rules(&[LOAD])).unwrap();
        assert_eq!(out, "print(1);\n");
    }

    #[test]
    fn no_match_is_identity() {
        let p = PocRecord::new("c", "t/a.js", "var x = 1;\nprint(x);\n");
        let r = repair(&p, &RuleSet::builtin("fake").unwrap());
        assert_eq!(r, p);
        assert!(r.repaired_text.is_none());
    }

    #[test]
    fn entangled_removal_neutralizes() {
        let out = repair_text("var h = load(\"h.js\");\nh.go();\n", &rules(&[LOAD])).unwrap();
        assert_eq!(out, "var h = undefined;\nh.go();\n");
        let out = repair_text("var h = load(\"h.js\");\nprint(2);\n", &rules(&[LOAD])).unwrap();
        assert_eq!(out, "print(2);\n");
    }

    #[test]
    fn compound_statements_are_not_removed() {
        let out = repair_text("if (load(\"a\")) print(1);\n", &rules(&[LOAD])).unwrap();
        assert_eq!(out, "if (undefined)\n  print(1);\n");
        let out = repair_text("if (c) load(\"a\");\n", &rules(&[LOAD])).unwrap();
        assert!(js::parse(&out).is_ok());
        assert!(!out.contains("load"));
    }

    #[test]
    fn assert_keeps_first_argument() {
        let out = repair_text("assertEquals(f(1), 2);\nassertTrue(a && b);\n", &rules(&[ASSERT])).unwrap();
        assert_eq!(out, "f(1);\na && b;\n");
    }

    #[test]
    fn nested_matches_reach_fixpoint() {
        let out = repair_text("assertEq($vm.x(assertEq(1, 2)), 3);\n", &rules(&[VM, ASSERT])).unwrap();
        assert_eq!(out, "print(1);\n");
    }

    #[test]
    fn declared_names_are_left_alone() {
        let src = "function load(x) { return x; }\nload(1);\n";
        assert_eq!(repair_text(src, &rules(&[LOAD])), None);
    }

    #[test]
    fn export_is_removed_on_tokens() {
        let src = "export function f() { return 1; }\nexport default function g() {}\nprint(f());\n";
        let out = repair_text(src, &rules(&[EXPORT])).unwrap();
        assert_eq!(out, "function f() {\n  return 1;\n}\nfunction g() {}\nprint(f());\n");
    }

    #[test]
    fn token_mode_handles_mixed_files() {
        let src = "load(\"x.js\");\nexport function f() { $vm.print(1); }\n";
        let out = repair_text(src, &rules(&[VM, LOAD, EXPORT])).unwrap();
        assert_eq!(out, "function f() {\n  print(1);\n}\n");
    }

    #[test]
    fn repair_is_idempotent() {
        let rs = RuleSet::builtin("fake").unwrap();
        let p = PocRecord::new("c", "t/a.js", "load('a');\nvar o = {};\nassertEq($vm.foo(o), 1);\n");
        let once = repair(&p, &rs);
        assert!(once.repaired_text.is_some());
        assert_eq!(repair(&once, &rs), once);
    }

    #[test]
    fn rule_validation() {
        let bad = r#"{"match":"x","action":"rewrite","scope":"token"}"#;
        assert_eq!(RuleSet::from_jsonl(&format!("# c\n\n{bad}")).unwrap_err().line, 3);
        let bad = r#"{"match":"x","action":"remove","replacement":"y","scope":"token"}"#;
        assert!(RuleSet::from_jsonl(bad).is_err());
        let bad = r#"{"match":"x","action":"rewrite","replacement":"print(","scope":"token"}"#;
        assert!(RuleSet::from_jsonl(bad).is_err());
        assert!(RuleSet::from_jsonl(r#"{"match":"*","action":"remove","scope":"line"}"#).is_err());
    }

    #[test]
    fn builtin_rule_sets_load() {
        for name in super::super::PROFILE_NAMES {
            assert!(!RuleSet::builtin(name).unwrap().is_empty(), "{name}");
        }
        let rewrites_first: Vec<_> = RuleSet::builtin("jsc").unwrap().ordered().map(|(r, _)| r.action).collect();
        assert_eq!(rewrites_first[0], RuleAction::Rewrite);
    }
}
