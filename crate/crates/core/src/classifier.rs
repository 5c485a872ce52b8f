//! Security-patch recognition from four commit signals: a linked security
//! issue, security keywords, the share of conditional lines, and the shape
//! of the attached test case.

use std::collections::HashMap;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::miner::{self, Commit, DiffStats, MinerConfig};

pub const DEFAULT_KEYWORDS: &str = include_str!("../data/keywords.txt");

/// Issue-reference patterns; the first capture group is the issue id.
pub const DEFAULT_ISSUE_PATTERNS: &[&str] = &[
    r"(?i)\bbug[=:]\s*(\d+)",
    r"(?i)show_bug\.cgi\?id=(\d+)",
    r"(?i)issues?/detail\?id=(\d+)",
    r"(?i)crbug\.com/(?:\w+/)?(\d+)",
    r"(?i)/issues/(\d+)",
    r"(?:^|[\s(])#(\d+)\b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalName {
    BugReport,
    Keywords,
    Conditionals,
    TestCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalScore {
    pub name: SignalName,
    pub value: f64,
    pub evidence: String,
}

impl SignalScore {
    fn zero(name: SignalName) -> Self {
        SignalScore { name, value: 0.0, evidence: String::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchVerdict {
    pub commit_id: String,
    pub is_security: bool,
    pub score: f64,
    pub signals: Vec<SignalScore>,
}

impl PatchVerdict {
    pub fn signal(&self, name: SignalName) -> &SignalScore {
        self.signals.iter().find(|s| s.name == name).expect("all four signals present")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueEntry {
    /// None when the tracker does not say.
    pub security: Option<bool>,
    pub title: String,
}

#[derive(Debug, Clone, Default)]
pub struct IssueStore {
    entries: HashMap<String, IssueEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("issue store line {line}: {message}")]
pub struct IssueStoreError {
    pub line: usize,
    pub message: String,
}

#[derive(Deserialize)]
struct RawIssue {
    issue_id: serde_json::Value,
    #[serde(default)]
    security: Option<bool>,
    #[serde(default)]
    title: String,
}

impl IssueStore {
    pub fn new() -> Self {
        IssueStore::default()
    }

    pub fn insert(&mut self, id: &str, security: Option<bool>, title: &str) {
        self.entries.insert(id.to_string(), IssueEntry { security, title: title.to_string() });
    }

    /// Reads `{issue_id, security, title}` records, one per line.
    pub fn from_jsonl(text: &str) -> Result<Self, IssueStoreError> {
        let mut store = IssueStore::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| IssueStoreError { line: i + 1, message };
            let raw: RawIssue = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            let id = match raw.issue_id {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(err(format!("issue_id must be a string or number, got {other}"))),
            };
            store.insert(&id, raw.security, &raw.title);
        }
        Ok(store)
    }

    /// Absent ids are unknown, same as an explicit null flag.
    pub fn security_flag(&self, id: &str) -> Option<bool> {
        self.entries.get(id).and_then(|e| e.security)
    }

    pub fn get(&self, id: &str) -> Option<&IssueEntry> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn parse_keywords(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub threshold: f64,
    /// Conditional-line ratio that already counts as a full signal.
    pub ratio_saturation: f64,
    pub conditionals_weight: f64,
    pub test_case_weight: f64,
    pub keywords: Vec<String>,
    pub issue_patterns: Vec<Regex>,
    pub miner: MinerConfig,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            threshold: 0.6,
            ratio_saturation: 0.3,
            conditionals_weight: 1.0,
            test_case_weight: 1.0,
            keywords: parse_keywords(DEFAULT_KEYWORDS),
            issue_patterns: DEFAULT_ISSUE_PATTERNS.iter().map(|p| Regex::new(p).expect("valid pattern")).collect(),
            miner: MinerConfig::default(),
        }
    }
}

/// Issue ids referenced by the message or by comments on added lines, in
/// order of first appearance.
pub fn referenced_issues(c: &Commit, patterns: &[Regex]) -> Vec<String> {
    let mut texts = vec![c.message.clone()];
    texts.extend(miner::added_comments(c));
    let mut ids: Vec<(usize, usize, String)> = Vec::new();
    for (t, text) in texts.iter().enumerate() {
        for p in patterns {
            for cap in p.captures_iter(text) {
                if let Some(m) = cap.get(1) {
                    ids.push((t, m.start(), m.as_str().to_string()));
                }
            }
        }
    }
    ids.sort();
    let mut out: Vec<String> = Vec::new();
    for (_, _, id) in ids {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

pub fn signal_bug_report(c: &Commit, issues: &IssueStore, cfg: &ClassifierConfig) -> SignalScore {
    let ids = referenced_issues(c, &cfg.issue_patterns);
    if let Some(id) = ids.iter().find(|id| issues.security_flag(id) == Some(true)) {
        return SignalScore { name: SignalName::BugReport, value: 1.0, evidence: id.clone() };
    }
    if let Some(id) = ids.iter().find(|id| issues.security_flag(id).is_none()) {
        return SignalScore { name: SignalName::BugReport, value: 0.5, evidence: id.clone() };
    }
    SignalScore::zero(SignalName::BugReport)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Byte offset of the first word-bounded, case-insensitive occurrence.
pub fn find_keyword(text: &str, keyword: &str) -> Option<usize> {
    let hay = text.to_lowercase();
    let needle = keyword.to_lowercase();
    if needle.is_empty() || hay.len() != text.len() {
        // Lowercasing changed byte lengths; fall back to a char-safe regex.
        let re = Regex::new(&format!(r"(?i)(?:^|[^\w]){}(?:$|[^\w])", regex::escape(keyword))).ok()?;
        return re.find(text).map(|m| m.start());
    }
    hay.match_indices(&needle).map(|(i, _)| i).find(|&i| {
        let before = hay[..i].chars().next_back();
        let after = hay[i + needle.len()..].chars().next();
        before.is_none_or(|c| !is_word_char(c)) && after.is_none_or(|c| !is_word_char(c))
    })
}

pub fn signal_keywords(c: &Commit, keywords: &[String]) -> SignalScore {
    let mut texts = vec![c.message.clone()];
    texts.extend(miner::added_comments(c));
    for text in &texts {
        // Earliest match wins; longer keywords win ties.
        let best = keywords
            .iter()
            .filter_map(|k| find_keyword(text, k).map(|pos| (pos, std::cmp::Reverse(k.len()), k)))
            .min();
        if let Some((_, _, k)) = best {
            return SignalScore { name: SignalName::Keywords, value: 1.0, evidence: k.clone() };
        }
    }
    SignalScore::zero(SignalName::Keywords)
}

pub fn signal_conditionals(s: &DiffStats, ratio_saturation: f64) -> SignalScore {
    let ratio = s.conditionals_changed as f64 / s.lines_changed.max(1) as f64;
    let value = (ratio / ratio_saturation).min(1.0);
    if value == 0.0 {
        return SignalScore::zero(SignalName::Conditionals);
    }
    SignalScore {
        name: SignalName::Conditionals,
        value,
        evidence: format!("{}/{}", s.conditionals_changed, s.lines_changed),
    }
}

const CRASH_MARKERS: &[&str] = &[
    "crash", "crashes", "crashed", "asan", "oob", "segv", "segfault", "sigsegv", "out-of-bounds",
    "out of bounds", "use-after-free", "uaf", "overflow", "heap-buffer-overflow", "assertion failure",
];

/// Calls to common harness assertion helpers (assert*, shouldBe*, etc.).
fn assertion_regex() -> Regex {
    Regex::new(r"\b(assert\w*|shouldBe\w*|shouldThrow|expect\w*|reportCompare)\s*\(").expect("valid")
}

/// How a test file reads: crash-oriented or a functional test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestShape {
    CrashMarker,
    /// Few value assertions relative to code.
    Sparse,
    Dense,
}

impl TestShape {
    pub fn score(self) -> f64 {
        match self {
            TestShape::CrashMarker => 1.0,
            TestShape::Sparse => 0.75,
            TestShape::Dense => 0.25,
        }
    }
}

/// Assertion calls per code line at or above which a test counts as functional.
pub const DENSE_ASSERTIONS: f64 = 0.2;
/// Fewer assertion calls than this never make a test dense.
pub const MIN_DENSE_ASSERTIONS: usize = 3;

pub fn test_shape(text: &str) -> TestShape {
    let mut in_block = false;
    let mut code_lines = 0usize;
    let mut marker = false;
    let assertions = assertion_regex();
    let mut n_assert = 0usize;
    for line in text.lines() {
        let (code, comment) = miner::split_code_line(line, &mut in_block);
        if CRASH_MARKERS.iter().any(|m| find_keyword(&comment, m).is_some()) {
            marker = true;
        }
        if !code.trim().is_empty() {
            code_lines += 1;
            n_assert += assertions.find_iter(&code).count();
        }
    }
    let density = n_assert as f64 / code_lines.max(1) as f64;
    let dense = n_assert >= MIN_DENSE_ASSERTIONS && density >= DENSE_ASSERTIONS;
    if marker && !dense {
        TestShape::CrashMarker
    } else if dense {
        TestShape::Dense
    } else {
        TestShape::Sparse
    }
}

pub fn signal_test_case(c: &Commit, cfg: &MinerConfig) -> SignalScore {
    let mut best = SignalScore::zero(SignalName::TestCase);
    for f in miner::list_added_js_files(c, cfg).into_iter().filter(|f| f.is_test_dir) {
        let value = test_shape(&miner::new_side_text(c, &f.path)).score();
        if value > best.value {
            best = SignalScore { name: SignalName::TestCase, value, evidence: f.path };
        }
    }
    best
}

/// `max(bug_report, keywords, weighted mean of conditionals and test_case)`.
pub fn combine(signals: &[SignalScore], cfg: &ClassifierConfig) -> f64 {
    let get = |n: SignalName| signals.iter().find(|s| s.name == n).map_or(0.0, |s| s.value);
    let wsum = cfg.conditionals_weight + cfg.test_case_weight;
    let weak = if wsum > 0.0 {
        (cfg.conditionals_weight * get(SignalName::Conditionals) + cfg.test_case_weight * get(SignalName::TestCase))
            / wsum
    } else {
        0.0
    };
    get(SignalName::BugReport).max(get(SignalName::Keywords)).max(weak)
}

pub fn classify(c: &Commit, issues: &IssueStore, cfg: &ClassifierConfig) -> PatchVerdict {
    let stats = miner::extract_diff_stats(c);
    let signals = vec![
        signal_bug_report(c, issues, cfg),
        signal_keywords(c, &cfg.keywords),
        signal_conditionals(&stats, cfg.ratio_saturation),
        signal_test_case(c, &cfg.miner),
    ];
    let score = combine(&signals, cfg);
    PatchVerdict { commit_id: c.id.clone(), is_security: score >= cfg.threshold, score, signals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::parse_commit_log;

    fn commit(msg: &str) -> Commit {
        let rec = serde_json::json!({"id": "c", "ts": 0, "msg": msg});
        parse_commit_log(&rec.to_string(), &MinerConfig::default()).unwrap().remove(0)
    }

    fn commit_with_test(path: &str, body: &str) -> Commit {
        let lines: Vec<_> = body.lines().map(|l| serde_json::json!(["+", l])).collect();
        let rec = serde_json::json!({
            "id": "t", "ts": 0, "msg": "m",
            "files": [{"path": path, "kind": "added"}],
            "hunks": [{"path": path, "old": [0, 0], "new": [1, lines.len()], "lines": lines}]
        });
        parse_commit_log(&rec.to_string(), &MinerConfig::default()).unwrap().remove(0)
    }

    fn sig(name: SignalName, value: f64) -> SignalScore {
        SignalScore { name, value, evidence: "e".into() }
    }

    #[test]
    fn bug_report_signal() {
        let cfg = ClassifierConfig::default();
        let mut store = IssueStore::new();
        store.insert("4242", Some(true), "oob");
        let s = signal_bug_report(&commit("Fix OOB read. bug=4242"), &store, &cfg);
        assert_eq!((s.value, s.evidence.as_str()), (1.0, "4242"));
        let s = signal_bug_report(&commit("Refactor. Bug: 99"), &store, &cfg);
        assert_eq!(s.value, 0.5);
        let s = signal_bug_report(&commit("Tidy up"), &store, &cfg);
        assert_eq!((s.value, s.evidence.as_str()), (0.0, ""));
    }

    #[test]
    fn known_non_security_issue_scores_zero() {
        let mut store = IssueStore::new();
        store.insert("7", Some(false), "docs");
        let s = signal_bug_report(&commit("Closes #7"), &store, &ClassifierConfig::default());
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn issue_store_reads_numbers_strings_and_nulls() {
        let s = IssueStore::from_jsonl(
            "{\"issue_id\": 1, \"security\": true, \"title\": \"a\"}\n{\"issue_id\": \"x-2\", \"security\": null, \"title\": \"\"}\n",
        )
        .unwrap();
        assert_eq!(s.security_flag("1"), Some(true));
        assert_eq!(s.security_flag("x-2"), None);
        assert_eq!(s.security_flag("missing"), None);
        assert_eq!(IssueStore::from_jsonl("{\"issue_id\": []}").unwrap_err().line, 1);
    }

    #[test]
    fn keyword_signal() {
        let kw = parse_keywords(DEFAULT_KEYWORDS);
        let s = signal_keywords(&commit("Fix heap buffer overflow in typed arrays"), &kw);
        assert_eq!((s.value, s.evidence.as_str()), (1.0, "buffer overflow"));
        assert_eq!(signal_keywords(&commit("Update README"), &kw).value, 0.0);
        let s = signal_keywords(&commit("No overflow-safe path"), &["overflow".to_string()]);
        assert_eq!(s.value, 1.0);
        assert_eq!(signal_keywords(&commit("Add crashpad uploader"), &kw).value, 0.0);
        assert_eq!(signal_keywords(&commit("Fix CVE-2018-0777"), &kw).evidence, "CVE");
    }

    #[test]
    fn keywords_ignore_string_literals_in_code() {
        let rec = serde_json::json!({
            "id": "k", "ts": 0, "msg": "Improve logging",
            "files": [{"path": "src/log.cpp", "kind": "modified"}],
            "hunks": [{"path": "src/log.cpp", "old": [1, 0], "new": [1, 2], "lines": [
                ["+", "log(\"crash handler installed\");"],
                ["+", "x = 1; // plain note"]
            ]}]
        });
        let c = parse_commit_log(&rec.to_string(), &MinerConfig::default()).unwrap().remove(0);
        assert_eq!(signal_keywords(&c, &parse_keywords(DEFAULT_KEYWORDS)).value, 0.0);
    }

    #[test]
    fn keywords_in_added_comments_count() {
        let rec = serde_json::json!({
            "id": "k", "ts": 0, "msg": "Adjust bounds",
            "files": [{"path": "src/a.cpp", "kind": "modified"}],
            "hunks": [{"path": "src/a.cpp", "old": [1, 0], "new": [1, 1], "lines": [
                ["+", "n = len - 1; // avoid integer overflow"]
            ]}]
        });
        let c = parse_commit_log(&rec.to_string(), &MinerConfig::default()).unwrap().remove(0);
        assert_eq!(signal_keywords(&c, &parse_keywords(DEFAULT_KEYWORDS)).evidence, "integer overflow");
    }

    #[test]
    fn conditional_signal() {
        let st = |c, l| DiffStats { conditionals_changed: c, lines_changed: l, ..DiffStats::default() };
        assert_eq!(signal_conditionals(&st(1, 1), 0.3).value, 1.0);
        assert_eq!(signal_conditionals(&st(0, 5), 0.3).value, 0.0);
        assert!((signal_conditionals(&st(3, 20), 0.3).value - 0.5).abs() < 1e-12);
        assert_eq!(signal_conditionals(&st(3, 20), 0.3).evidence, "3/20");
    }

    #[test]
    fn test_case_signal() {
        let cfg = MinerConfig::default();
        let crash = "// crashes with OOB write\nvar a = [];\nfor (var i = 0; i < 100; i++) a[i] = i;\n";
        let s = signal_test_case(&commit_with_test("test/regress-crash.js", crash), &cfg);
        assert_eq!((s.value, s.evidence.as_str()), (1.0, "test/regress-crash.js"));

        let dense: String = (0..20).map(|i| format!("assertEquals({i}, f({i}));\n")).collect();
        assert_eq!(signal_test_case(&commit_with_test("test/func.js", &dense), &cfg).value, 0.25);

        assert_eq!(signal_test_case(&commit("no files"), &cfg).value, 0.0);
        // Outside a test directory the file does not count.
        assert_eq!(signal_test_case(&commit_with_test("src/x.js", crash), &cfg).value, 0.0);
    }

    #[test]
    fn sparse_test_without_marker() {
        let body = "var ta = new Uint8Array(8);\nfor (var i = 0; i < 1e5; i++) ta[i & 7] = i;\nassertEquals(ta[0], 0);\n";
        assert_eq!(test_shape(body), TestShape::Sparse);
    }

    #[test]
    fn combination_rule() {
        let cfg = ClassifierConfig::default();
        let all = |b, k, c, t| {
            vec![sig(SignalName::BugReport, b), sig(SignalName::Keywords, k), sig(SignalName::Conditionals, c), sig(SignalName::TestCase, t)]
        };
        assert_eq!(combine(&all(0.0, 1.0, 0.0, 0.0), &cfg), 1.0);
        assert_eq!(combine(&all(0.0, 0.0, 0.0, 0.0), &cfg), 0.0);
        assert!((combine(&all(0.0, 0.0, 0.8, 1.0), &cfg) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn verdict_has_all_signals() {
        let mut store = IssueStore::new();
        store.insert("1", Some(true), "");
        let v = classify(&commit("Fix #1"), &store, &ClassifierConfig::default());
        assert!(v.is_security);
        assert_eq!(v.signals.len(), 4);
        assert_eq!(v.signal(SignalName::BugReport).value, 1.0);
        let v = classify(&commit("Update README"), &store, &ClassifierConfig::default());
        assert!(!v.is_security);
    }
}
