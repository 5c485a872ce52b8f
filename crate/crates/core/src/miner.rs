//! Commit stream ingestion and diff statistics.
//!
//! The stream is one JSON object per line:
//! `{"id", "ts", "msg", "files": [{path, kind}], "hunks": [{path, old: [s, n], new: [s, n], lines: [[tag, text]]}]}`.
//! Lines starting with `#` and blank lines are skipped.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub const DEFAULT_TEST_DIRS: &[&str] = &["JSTests", "test", "tests", "testsuite", "regress"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate commit id {id:?}")]
    Duplicate { line: usize, id: String },
}

impl MineError {
    pub fn line(&self) -> usize {
        match self {
            MineError::Parse { line, .. } | MineError::Duplicate { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Added,
    Modified,
    Deleted,
    Renamed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineTag {
    #[serde(rename = "+")]
    Added,
    #[serde(rename = "-")]
    Removed,
    #[serde(rename = " ")]
    Context,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    pub path: String,
    pub kind: ChangeKind,
    #[serde(default)]
    pub is_test_dir: bool,
    #[serde(default)]
    pub extension: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub path: String,
    /// (start line, count)
    pub old: (u32, u32),
    pub new: (u32, u32),
    pub lines: Vec<(LineTag, String)>,
}

impl Hunk {
    /// Old and new line numbers for every hunk line (None where absent).
    pub fn numbered_lines(&self) -> impl Iterator<Item = (Option<u32>, Option<u32>, &(LineTag, String))> {
        let (mut old, mut new) = (self.old.0, self.new.0);
        self.lines.iter().map(move |l| match l.0 {
            LineTag::Added => {
                new += 1;
                (None, Some(new - 1), l)
            }
            LineTag::Removed => {
                old += 1;
                (Some(old - 1), None, l)
            }
            LineTag::Context => {
                old += 1;
                new += 1;
                (Some(old - 1), Some(new - 1), l)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commit {
    pub id: String,
    #[serde(rename = "ts")]
    pub timestamp: i64,
    #[serde(rename = "msg")]
    pub message: String,
    pub files: Vec<FileChange>,
    pub hunks: Vec<Hunk>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffStats {
    pub lines_changed: usize,
    pub conditionals_changed: usize,
    pub files_changed: usize,
    pub js_files_added: usize,
}

impl DiffStats {
    pub fn conditional_ratio(&self) -> f64 {
        if self.lines_changed == 0 {
            0.0
        } else {
            self.conditionals_changed as f64 / self.lines_changed as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinerConfig {
    pub test_dirs: Vec<String>,
    /// Count files renamed into a test directory as added.
    pub renames_into_tests_as_added: bool,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            test_dirs: DEFAULT_TEST_DIRS.iter().map(|s| s.to_string()).collect(),
            renames_into_tests_as_added: true,
        }
    }
}

impl MinerConfig {
    pub fn is_test_path(&self, path: &str) -> bool {
        let mut segments: Vec<&str> = path.split('/').collect();
        segments.pop();
        segments.iter().any(|s| self.test_dirs.iter().any(|t| t == s))
    }
}

pub fn extension_of(path: &str) -> String {
    let name = path.rsplit('/').next().unwrap_or(path);
    match name.rfind('.') {
        Some(i) if i > 0 => name[i + 1..].to_ascii_lowercase(),
        _ => String::new(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    path: String,
    kind: ChangeKind,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHunk {
    path: String,
    old: (u32, u32),
    new: (u32, u32),
    lines: Vec<(String, String)>,
}

#[derive(Deserialize)]
struct RawCommit {
    id: String,
    ts: i64,
    msg: String,
    #[serde(default)]
    files: Vec<RawFile>,
    #[serde(default)]
    hunks: Vec<RawHunk>,
}

fn convert(raw: RawCommit, cfg: &MinerConfig) -> Result<Commit, String> {
    if raw.id.is_empty() {
        return Err("empty id".into());
    }
    let files: Vec<FileChange> = raw
        .files
        .into_iter()
        .map(|f| FileChange {
            is_test_dir: cfg.is_test_path(&f.path),
            extension: extension_of(&f.path),
            path: f.path,
            kind: f.kind,
        })
        .collect();
    let mut hunks = Vec::with_capacity(raw.hunks.len());
    for h in raw.hunks {
        if !files.iter().any(|f| f.path == h.path) {
            return Err(format!("hunk path {:?} not listed in files", h.path));
        }
        let mut lines = Vec::with_capacity(h.lines.len());
        let (mut old_n, mut new_n) = (0, 0);
        for (tag, text) in h.lines {
            let tag = match tag.as_str() {
                "+" => LineTag::Added,
                "-" => LineTag::Removed,
                " " => LineTag::Context,
                other => return Err(format!("bad line tag {other:?} in hunk for {}", h.path)),
            };
            match tag {
                LineTag::Added => new_n += 1,
                LineTag::Removed => old_n += 1,
                LineTag::Context => {
                    old_n += 1;
                    new_n += 1;
                }
            }
            lines.push((tag, text));
        }
        if old_n != h.old.1 || new_n != h.new.1 {
            return Err(format!(
                "hunk for {} declares -{},{} +{},{} but has {old_n} old and {new_n} new lines",
                h.path, h.old.0, h.old.1, h.new.0, h.new.1
            ));
        }
        hunks.push(Hunk { path: h.path, old: h.old, new: h.new, lines });
    }
    Ok(Commit { id: raw.id, timestamp: raw.ts, message: raw.msg, files, hunks })
}

/// One result per record line: a commit or a positioned error, never both.
pub fn parse_commit_records(stream: &str, cfg: &MinerConfig) -> Vec<Result<Commit, MineError>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in stream.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed = serde_json::from_str::<RawCommit>(trimmed)
            .map_err(|e| e.to_string())
            .and_then(|raw| convert(raw, cfg));
        out.push(match parsed {
            Err(message) => Err(MineError::Parse { line: line_no, message }),
            Ok(c) if !seen.insert(c.id.clone()) => Err(MineError::Duplicate { line: line_no, id: c.id }),
            Ok(c) => Ok(c),
        });
    }
    out
}

/// Strict variant: the first error aborts.
pub fn parse_commit_log(stream: &str, cfg: &MinerConfig) -> Result<Vec<Commit>, MineError> {
    parse_commit_records(stream, cfg).into_iter().collect()
}

/// Splits one line of C-like code into `(code, comments)`. String and char
/// literal contents are blanked out of `code` and appear in neither part.
/// `in_block` carries `/* */` state across lines.
pub fn split_code_line(line: &str, in_block: &mut bool) -> (String, String) {
    let mut code = String::with_capacity(line.len());
    let mut comments = String::new();
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        if *in_block {
            if c == '*' && chars.peek() == Some(&'/') {
                chars.next();
                *in_block = false;
                code.push(' ');
                comments.push(' ');
            } else {
                comments.push(c);
            }
            continue;
        }
        match c {
            '/' if chars.peek() == Some(&'/') => {
                chars.next();
                comments.extend(chars.by_ref());
                break;
            }
            '/' if chars.peek() == Some(&'*') => {
                chars.next();
                *in_block = true;
            }
            '"' | '\'' | '`' => {
                code.push(c);
                while let Some(d) = chars.next() {
                    if d == '\\' {
                        chars.next();
                    } else if d == c {
                        break;
                    }
                }
                code.push(c);
            }
            _ => code.push(c),
        }
    }
    (code, comments)
}

pub fn strip_code_line(line: &str, in_block: &mut bool) -> String {
    split_code_line(line, in_block).0
}

/// Comment text of the added lines of a commit, one entry per line that has any.
pub fn added_comments(c: &Commit) -> Vec<String> {
    let mut out = Vec::new();
    for h in &c.hunks {
        let mut in_block = false;
        for (tag, text) in &h.lines {
            if *tag == LineTag::Removed {
                continue;
            }
            let (_, comment) = split_code_line(text, &mut in_block);
            if *tag == LineTag::Added && !comment.trim().is_empty() {
                out.push(comment);
            }
        }
    }
    out
}

fn has_word(code: &str, word: &str) -> bool {
    code.match_indices(word).any(|(i, _)| {
        let before = code[..i].chars().next_back();
        let after = code[i + word.len()..].chars().next();
        let boundary = |c: Option<char>| c.is_none_or(|c| !(c.is_alphanumeric() || c == '_' || c == '$'));
        boundary(before) && boundary(after)
    })
}

fn has_ternary(code: &str) -> bool {
    let b = code.as_bytes();
    for (i, &c) in b.iter().enumerate() {
        if c != b'?' {
            continue;
        }
        let prev = if i > 0 { b[i - 1] } else { b' ' };
        let next = b.get(i + 1).copied().unwrap_or(b' ');
        if prev == b'?' || next == b'?' || next == b'.' {
            continue;
        }
        let rest = &code[i + 1..];
        let mut j = 0;
        let rb = rest.as_bytes();
        while j < rb.len() {
            if rb[j] == b':' {
                if rb.get(j + 1) == Some(&b':') {
                    j += 2;
                    continue;
                }
                return true;
            }
            j += 1;
        }
    }
    false
}

/// Conditional keyword (`if`, `while`, `switch`) or a `?:` ternary in
/// already-stripped code.
pub fn is_conditional_code(code: &str) -> bool {
    ["if", "while", "switch"].iter().any(|w| has_word(code, w)) || has_ternary(code)
}

pub fn extract_diff_stats(c: &Commit) -> DiffStats {
    let mut stats = DiffStats { files_changed: c.files.len(), ..DiffStats::default() };
    stats.js_files_added = c.files.iter().filter(|f| f.extension == "js" && f.kind == ChangeKind::Added).count();
    for h in &c.hunks {
        // Comment state is tracked over the new side only (context + added).
        let mut in_block = false;
        for (tag, text) in &h.lines {
            if *tag == LineTag::Removed {
                continue;
            }
            let code = strip_code_line(text, &mut in_block);
            if *tag == LineTag::Added {
                stats.lines_changed += 1;
                if is_conditional_code(&code) {
                    stats.conditionals_changed += 1;
                }
            }
        }
    }
    stats
}

/// JS files the commit adds or modifies (renames into a test directory
/// count as added when the config says so).
pub fn list_added_js_files(c: &Commit, cfg: &MinerConfig) -> Vec<FileChange> {
    c.files
        .iter()
        .filter(|f| f.extension == "js")
        .filter_map(|f| match f.kind {
            ChangeKind::Added | ChangeKind::Modified => Some(f.clone()),
            ChangeKind::Renamed if cfg.renames_into_tests_as_added && f.is_test_dir => {
                Some(FileChange { kind: ChangeKind::Added, ..f.clone() })
            }
            _ => None,
        })
        .collect()
}

/// Content of the new side of a file as far as the hunks show it: context
/// and added lines in order. For an added file this is the whole file.
pub fn new_side_text(c: &Commit, path: &str) -> String {
    let mut out = String::new();
    for h in c.hunks.iter().filter(|h| h.path == path) {
        for (tag, text) in &h.lines {
            if *tag != LineTag::Removed {
                out.push_str(text);
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(line: &str) -> Commit {
        parse_commit_log(line, &MinerConfig::default()).unwrap().remove(0)
    }

    fn commit_with_added(lines: &[&str]) -> Commit {
        let body: Vec<_> = lines.iter().map(|l| serde_json::json!(["+", l])).collect();
        let rec = serde_json::json!({
            "id": "c", "ts": 0, "msg": "m",
            "files": [{"path": "src/a.cpp", "kind": "modified"}],
            "hunks": [{"path": "src/a.cpp", "old": [1, 0], "new": [1, lines.len()], "lines": body}]
        });
        one(&rec.to_string())
    }

    #[test]
    fn parses_single_record() {
        let c = one(r#"{"id":"abc","ts":5,"msg":"fix","files":[{"path":"a.c","kind":"modified"}],"hunks":[{"path":"a.c","old":[1,1],"new":[1,1],"lines":[["-","x"],["+","y"]]}]}"#);
        assert_eq!(c.id, "abc");
        assert_eq!(c.message, "fix");
        assert_eq!(c.hunks.len(), 1);
        assert_eq!(c.hunks[0].lines[1], (LineTag::Added, "y".to_string()));
    }

    #[test]
    fn empty_stream_and_comments() {
        assert!(parse_commit_log("", &MinerConfig::default()).unwrap().is_empty());
        assert!(parse_commit_log("# header\n\n", &MinerConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn missing_id_names_line() {
        let err = parse_commit_log(r#"{"ts":1,"msg":"x"}"#, &MinerConfig::default()).unwrap_err();
        assert_eq!(err.line(), 1);
        assert!(err.to_string().contains("id"));
    }

    #[test]
    fn duplicate_id_is_an_error() {
        let s = "{\"id\":\"a\",\"ts\":1,\"msg\":\"\"}\n# c\n{\"id\":\"a\",\"ts\":2,\"msg\":\"\"}\n";
        assert_eq!(
            parse_commit_log(s, &MinerConfig::default()).unwrap_err(),
            MineError::Duplicate { line: 3, id: "a".into() }
        );
    }

    #[test]
    fn hunk_counts_must_match() {
        let s = r#"{"id":"a","ts":1,"msg":"","files":[{"path":"a.c","kind":"modified"}],"hunks":[{"path":"a.c","old":[1,2],"new":[1,1],"lines":[["+","y"]]}]}"#;
        assert!(parse_commit_log(s, &MinerConfig::default()).is_err());
    }

    #[test]
    fn hunk_path_must_be_listed() {
        let s = r#"{"id":"a","ts":1,"msg":"","files":[],"hunks":[{"path":"a.c","old":[1,0],"new":[1,1],"lines":[["+","y"]]}]}"#;
        assert!(parse_commit_log(s, &MinerConfig::default()).is_err());
    }

    #[test]
    fn single_if_line() {
        let s = extract_diff_stats(&commit_with_added(&["if (p == 0) return;"]));
        assert_eq!((s.lines_changed, s.conditionals_changed), (1, 1));
    }

    #[test]
    fn plain_assignments_have_zero_ratio() {
        let lines: Vec<String> = (0..10).map(|i| format!("x{i} = {i};")).collect();
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let s = extract_diff_stats(&commit_with_added(&refs));
        assert_eq!(s.conditionals_changed, 0);
        assert_eq!(s.conditional_ratio(), 0.0);
    }

    #[test]
    fn quarter_ratio() {
        let s = extract_diff_stats(&commit_with_added(&[
            "if (a) b();", "x = 1;", "while (n--) f();", "y = 2;", "z = 3;", "w = 4;", "v = 5;", "u = 6;",
        ]));
        assert_eq!(s.conditional_ratio(), 0.25);
    }

    #[test]
    fn comments_and_strings_do_not_count() {
        let s = extract_diff_stats(&commit_with_added(&[
            "// if this happens",
            "log(\"while waiting\");",
            "/* switch",
            "   if */ x = 1;",
            "y = a ? b : c;",
            "Foo::bar(opt?.x ?? 0);",
            "notify(elseif, ifdef);",
        ]));
        assert_eq!(s.conditionals_changed, 1);
        assert_eq!(s.lines_changed, 7);
    }

    #[test]
    fn splits_comments_from_code() {
        let mut b = false;
        let (code, comments) = split_code_line("x = \"// not\"; // real note", &mut b);
        assert_eq!(code.trim(), "x = \"\";");
        assert_eq!(comments.trim(), "real note");
        let (_, c) = split_code_line("a(); /* start", &mut b);
        assert!(b);
        assert_eq!(c.trim(), "start");
        let (code, c) = split_code_line("end */ b();", &mut b);
        assert!(!b);
        assert_eq!((code.trim(), c.trim()), ("b();", "end"));
    }

    #[test]
    fn lists_js_files_with_test_flag() {
        let c = one(r#"{"id":"a","ts":1,"msg":"","files":[{"path":"JSTests/stress/x.js","kind":"added"},{"path":"src/jit.cpp","kind":"modified"}]}"#);
        let js = list_added_js_files(&c, &MinerConfig::default());
        assert_eq!(js.len(), 1);
        assert!(js[0].is_test_dir);

        let c = one(r#"{"id":"b","ts":1,"msg":"","files":[{"path":"src/jit.cpp","kind":"modified"}]}"#);
        assert!(list_added_js_files(&c, &MinerConfig::default()).is_empty());

        let c = one(r#"{"id":"c","ts":1,"msg":"","files":[{"path":"test/regress-123.js","kind":"modified"}]}"#);
        let js = list_added_js_files(&c, &MinerConfig::default());
        assert_eq!(js[0].kind, ChangeKind::Modified);
    }

    #[test]
    fn renames_into_tests_are_configurable() {
        let rec = r#"{"id":"a","ts":1,"msg":"","files":[{"path":"test/moved.js","kind":"renamed"}]}"#;
        let c = one(rec);
        assert_eq!(list_added_js_files(&c, &MinerConfig::default())[0].kind, ChangeKind::Added);
        let cfg = MinerConfig { renames_into_tests_as_added: false, ..MinerConfig::default() };
        assert!(list_added_js_files(&c, &cfg).is_empty());
    }

    #[test]
    fn extension_and_test_dir() {
        assert_eq!(extension_of("a/b/C.JS"), "js");
        assert_eq!(extension_of("Makefile"), "");
        let cfg = MinerConfig::default();
        assert!(cfg.is_test_path("JSTests/stress/x.js"));
        assert!(!cfg.is_test_path("src/test.js"));
        assert!(!cfg.is_test_path("contest/x.js"));
    }

    #[test]
    fn numbered_lines_follow_both_sides() {
        let c = one(r#"{"id":"a","ts":1,"msg":"","files":[{"path":"a.c","kind":"modified"}],"hunks":[{"path":"a.c","old":[10,2],"new":[10,2],"lines":[[" ","a"],["-","b"],["+","c"]]}]}"#);
        let nums: Vec<_> = c.hunks[0].numbered_lines().map(|(o, n, _)| (o, n)).collect();
        assert_eq!(nums, vec![(Some(10), Some(10)), (Some(11), None), (None, Some(11))]);
    }
}
