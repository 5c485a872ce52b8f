//! PoC extraction from security commits, dry runs against an engine, and
//! error classification.

pub mod repair;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::exec::{ExecError, Executor, RunOutput};
use crate::miner::{self, ChangeKind, Commit, MinerConfig};

pub use repair::{repair, RepairRule, RuleAction, RuleError, RuleScope, RuleSet};

pub const PROFILE_NAMES: &[&str] = &["jsc", "v8", "sm", "ch", "jerry", "qjs", "fake"];

pub const DEFAULT_DRY_RUN_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineProfile {
    pub name: String,
    pub grammar_error_exit_code: i32,
    /// argv template; `{input}` is replaced by the sample path.
    pub run_command: Vec<String>,
    pub test_dirs: Vec<String>,
    #[serde(with = "secs", default = "default_timeout")]
    pub timeout: Duration,
}

fn default_timeout() -> Duration {
    DEFAULT_DRY_RUN_TIMEOUT
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        if !(v.is_finite() && v > 0.0) {
            return Err(serde::de::Error::custom("timeout must be positive"));
        }
        Ok(Duration::from_secs_f64(v))
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl EngineProfile {
    /// Built-in profile by name. The shell binaries are assumed on PATH.
    pub fn builtin(name: &str) -> Option<EngineProfile> {
        let (code, cmd, dirs): (i32, &[&str], &[&str]) = match name {
            "jsc" => (3, &["jsc", "{input}"], &["JSTests", "LayoutTests"]),
            "v8" => (1, &["d8", "{input}"], &["test"]),
            "sm" => (3, &["js", "{input}"], &["jit-test", "tests"]),
            "ch" => (1, &["ch", "{input}"], &["test"]),
            "jerry" => (1, &["jerry", "{input}"], &["tests", "regression-test"]),
            "qjs" => (1, &["qjs", "{input}"], &["tests"]),
            "fake" => (3, &["fake-target", "{input}"], miner::DEFAULT_TEST_DIRS),
            _ => return None,
        };
        Some(EngineProfile {
            name: name.to_string(),
            grammar_error_exit_code: code,
            run_command: strings(cmd),
            test_dirs: strings(dirs),
            timeout: DEFAULT_DRY_RUN_TIMEOUT,
        })
    }

    pub fn miner_config(&self) -> MinerConfig {
        MinerConfig { test_dirs: self.test_dirs.clone(), ..MinerConfig::default() }
    }

    pub fn classify(&self, exit_code: Option<i32>, signal: Option<i32>, timed_out: bool) -> Classification {
        classify_outcome(exit_code, signal, timed_out, self.grammar_error_exit_code)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Ok,
    GrammarError,
    RuntimeError,
    Crash,
    Timeout,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Ok => "ok",
            Classification::GrammarError => "grammar_error",
            Classification::RuntimeError => "runtime_error",
            Classification::Crash => "crash",
            Classification::Timeout => "timeout",
        }
    }
}

/// Exit-code table shared by every profile. A timeout wins over whatever the
/// killed process reported; a signal is a crash regardless of exit code.
pub fn classify_outcome(exit_code: Option<i32>, signal: Option<i32>, timed_out: bool, grammar_code: i32) -> Classification {
    if timed_out {
        return Classification::Timeout;
    }
    if signal.is_some() {
        return Classification::Crash;
    }
    match exit_code {
        Some(0) => Classification::Ok,
        Some(c) if c == grammar_code => Classification::GrammarError,
        _ => Classification::RuntimeError,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PocStatus {
    Unvalidated,
    Ok,
    GrammarError,
    RuntimeError,
    Crash,
    Timeout,
}

impl From<Classification> for PocStatus {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Ok => PocStatus::Ok,
            Classification::GrammarError => PocStatus::GrammarError,
            Classification::RuntimeError => PocStatus::RuntimeError,
            Classification::Crash => PocStatus::Crash,
            Classification::Timeout => PocStatus::Timeout,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PocRecord {
    pub origin_commit: String,
    pub path: String,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repaired_text: Option<String>,
    pub status: PocStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_class: Option<String>,
}

impl PocRecord {
    pub fn new(origin_commit: &str, path: &str, raw_text: &str) -> Self {
        PocRecord {
            origin_commit: origin_commit.to_string(),
            path: path.to_string(),
            raw_text: raw_text.to_string(),
            repaired_text: None,
            status: PocStatus::Unvalidated,
            error_class: None,
        }
    }

    /// The text that should be executed: the repair if there is one.
    pub fn text(&self) -> &str {
        self.repaired_text.as_deref().unwrap_or(&self.raw_text)
    }

    pub fn basename(&self) -> &str {
        self.path.rsplit('/').next().unwrap_or(&self.path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DryRunResult {
    pub exit_code: Option<i32>,
    pub term_signal: Option<i32>,
    pub stderr_head: String,
    pub classification: Classification,
}

impl DryRunResult {
    pub fn from_output(out: &RunOutput, profile: &EngineProfile) -> Self {
        DryRunResult {
            exit_code: out.exit_code,
            term_signal: out.signal,
            stderr_head: out.stderr.clone(),
            classification: profile.classify(out.exit_code, out.signal, out.timed_out),
        }
    }
}

/// One unvalidated record per added or modified JavaScript file under one of
/// the profile's test directories.
pub fn extract_pocs(c: &Commit, profile: &EngineProfile) -> Vec<PocRecord> {
    let cfg = profile.miner_config();
    miner::list_added_js_files(c, &cfg)
        .into_iter()
        .filter(|f| matches!(f.kind, ChangeKind::Added | ChangeKind::Modified) && cfg.is_test_path(&f.path))
        .map(|f| PocRecord::new(&c.id, &f.path, &miner::new_side_text(c, &f.path)))
        .collect()
}

pub fn dry_run(p: &PocRecord, profile: &EngineProfile, exec: &mut dyn Executor) -> Result<DryRunResult, ExecError> {
    let out = exec.run(p.text())?;
    Ok(DryRunResult::from_output(&out, profile))
}

fn error_patterns() -> &'static [(Regex, &'static str)] {
    static PATTERNS: OnceLock<Vec<(Regex, &'static str)>> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        let p = |re: &str, kind: &'static str| (Regex::new(re).expect("static regex"), kind);
        vec![
            p(r"ReferenceError: Can't find variable: ([\w$]+)", "ReferenceError"),
            p(r"ReferenceError: '([\w$]+)' is (?:not defined|undefined)", "ReferenceError"),
            p(r"ReferenceError: ([\w$]+) is not defined", "ReferenceError"),
            p(r"(SyntaxError|ReferenceError):[^\n]*\bexport\b", "export"),
        ]
    })
}

fn normalize_name(name: &str) -> String {
    if name.starts_with("assert") {
        "assert*".to_string()
    } else if name.starts_with("wasm") {
        "Wasm-related".to_string()
    } else {
        name.to_string()
    }
}

/// Maps the head of an engine's stderr to an error class such as
/// `ReferenceError: $vm`; anything unrecognised is `other`.
pub fn classify_error(stderr_head: &str) -> String {
    for (re, kind) in error_patterns() {
        let Some(m) = re.captures(stderr_head) else { continue };
        return match *kind {
            "export" => format!("{}: export", &m[1]),
            _ => format!("ReferenceError: {}", normalize_name(&m[1])),
        };
    }
    "other".to_string()
}

/// Dry-runs `p` and, on a grammar error, repairs it with `rules` and runs it
/// again. Returns the updated record and the last dry-run result.
pub fn validate(
    mut p: PocRecord,
    profile: &EngineProfile,
    rules: &RuleSet,
    exec: &mut dyn Executor,
) -> Result<(PocRecord, DryRunResult), ExecError> {
    let mut result = dry_run(&p, profile, exec)?;
    if result.classification == Classification::GrammarError {
        p.error_class = Some(classify_error(&result.stderr_head));
        let repaired = repair(&p, rules);
        if repaired.repaired_text.is_some() {
            p = repaired;
            result = dry_run(&p, profile, exec)?;
        }
    }
    p.status = result.classification.into();
    p.error_class = match result.classification {
        Classification::GrammarError | Classification::RuntimeError => Some(classify_error(&result.stderr_head)),
        _ => None,
    };
    Ok((p, result))
}

/// Validates records on `workers` threads, each with its own executor from
/// `make_executor`. Output order is by commit id, then path.
pub fn validate_all<F>(
    records: Vec<PocRecord>,
    profile: &EngineProfile,
    rules: &RuleSet,
    workers: usize,
    make_executor: F,
) -> Result<Vec<PocRecord>, ExecError>
where
    F: Fn() -> Result<Box<dyn Executor>, ExecError> + Sync,
{
    let (job_tx, job_rx) = crossbeam_channel::unbounded::<PocRecord>();
    for r in records {
        job_tx.send(r).expect("receiver alive");
    }
    drop(job_tx);
    let workers = workers.max(1);
    let results: Vec<Result<Vec<PocRecord>, ExecError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                let rx = job_rx.clone();
                let make = &make_executor;
                s.spawn(move || -> Result<Vec<PocRecord>, ExecError> {
                    let mut exec = make()?;
                    let mut done = Vec::new();
                    for r in rx.iter() {
                        done.push(validate(r, profile, rules, exec.as_mut())?.0);
                    }
                    Ok(done)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("validation worker panicked")).collect()
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    all.sort_by(|a, b| (&a.origin_commit, &a.path).cmp(&(&b.origin_commit, &b.path)));
    Ok(all)
}

#[derive(Debug, Serialize)]
struct ManifestLine<'a> {
    file: String,
    origin_commit: &'a str,
    path: &'a str,
    status: PocStatus,
    repaired: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_class: Option<&'a str>,
}

/// Writes `root/<commit>/<basename>.js` for each record plus
/// `root/manifest.jsonl`. Basename clashes within a commit get a `-N` suffix.
pub fn write_corpus(root: &Path, records: &[PocRecord]) -> std::io::Result<()> {
    fs::create_dir_all(root)?;
    let mut used: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut manifest = fs::File::create(root.join("manifest.jsonl"))?;
    for r in records {
        let stem = r.basename().strip_suffix(".js").unwrap_or(r.basename()).to_string();
        let n = used.entry((r.origin_commit.clone(), stem.clone())).or_insert(0);
        let name = if *n == 0 { format!("{stem}.js") } else { format!("{stem}-{n}.js") };
        *n += 1;
        let dir = root.join(&r.origin_commit);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(&name), r.text())?;
        let line = ManifestLine {
            file: format!("{}/{}", r.origin_commit, name),
            origin_commit: &r.origin_commit,
            path: &r.path,
            status: r.status,
            repaired: r.repaired_text.is_some(),
            error_class: r.error_class.as_deref(),
        };
        writeln!(manifest, "{}", serde_json::to_string(&line).expect("manifest line serializes"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::{FileChange, Hunk, LineTag};

    fn commit(files: &[(&str, ChangeKind)]) -> Commit {
        let mut c = Commit { id: "c1".into(), timestamp: 0, message: String::new(), files: vec![], hunks: vec![] };
        for (path, kind) in files {
            let extension = miner::extension_of(path);
            c.files.push(FileChange { path: path.to_string(), kind: *kind, is_test_dir: false, extension });
            c.hunks.push(Hunk {
                path: path.to_string(),
                old: (0, 0),
                new: (1, 1),
                lines: vec![(LineTag::Added, "print(1);".into())],
            });
        }
        c
    }

    #[test]
    fn one_record_per_test_dir_js_file() {
        let jsc = EngineProfile::builtin("jsc").unwrap();
        let c = commit(&[("JSTests/stress/a.js", ChangeKind::Added)]);
        let recs = extract_pocs(&c, &jsc);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].status, PocStatus::Unvalidated);
        assert_eq!(recs[0].raw_text, "print(1);\n");

        assert!(extract_pocs(&commit(&[("Source/JavaScriptCore/jit/JIT.cpp", ChangeKind::Modified)]), &jsc).is_empty());

        let c = commit(&[("JSTests/stress/b.js", ChangeKind::Added), ("Tools/gen.js", ChangeKind::Added)]);
        assert_eq!(extract_pocs(&c, &jsc).len(), 1);
    }

    #[test]
    fn deleted_files_are_not_extracted() {
        let fake = EngineProfile::builtin("fake").unwrap();
        let c = commit(&[("test/x.js", ChangeKind::Deleted)]);
        assert!(extract_pocs(&c, &fake).is_empty());
    }

    #[test]
    fn exit_code_examples() {
        let jsc = EngineProfile::builtin("jsc").unwrap();
        assert_eq!(jsc.classify(Some(3), None, false), Classification::GrammarError);
        assert_eq!(jsc.classify(Some(0), None, false), Classification::Ok);
        assert_eq!(jsc.classify(None, Some(11), false), Classification::Crash);
        assert_eq!(jsc.classify(None, None, true), Classification::Timeout);
        assert_eq!(jsc.classify(Some(1), None, false), Classification::RuntimeError);
    }

    #[test]
    fn real_profiles_use_one_or_three() {
        for name in PROFILE_NAMES {
            let p = EngineProfile::builtin(name).unwrap();
            assert!(matches!(p.grammar_error_exit_code, 1 | 3), "{name}");
            assert!(p.run_command.iter().any(|a| a.contains("{input}")));
        }
        assert!(EngineProfile::builtin("nashorn").is_none());
    }

    #[test]
    fn error_classes() {
        assert_eq!(classify_error("ReferenceError: Can't find variable: $vm"), "ReferenceError: $vm");
        assert_eq!(classify_error("ReferenceError: load is not defined"), "ReferenceError: load");
        assert_eq!(classify_error("TypeError: x is not a function"), "other");
        assert_eq!(classify_error("x.js:3: ReferenceError: assertEq is not defined\n"), "ReferenceError: assert*");
        assert_eq!(classify_error("ReferenceError: 'telemetryLog' is not defined"), "ReferenceError: telemetryLog");
        assert_eq!(classify_error("ReferenceError: wasmEvalText is not defined"), "ReferenceError: Wasm-related");
        assert_eq!(classify_error("SyntaxError: Unexpected keyword 'export'"), "SyntaxError: export");
        assert_eq!(classify_error("ReferenceError: export is not defined"), "ReferenceError: export");
        assert_eq!(classify_error(""), "other");
    }

    #[test]
    fn corpus_layout_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = PocRecord::new("c1", "JSTests/a.js", "raw();");
        a.repaired_text = Some("fixed();\n".into());
        a.status = PocStatus::Ok;
        let b = PocRecord::new("c1", "JSTests/other/a.js", "b();");
        write_corpus(dir.path(), &[a, b]).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("c1/a.js")).unwrap(), "fixed();\n");
        assert_eq!(fs::read_to_string(dir.path().join("c1/a-1.js")).unwrap(), "b();");
        let manifest = fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
        assert_eq!(manifest.lines().count(), 2);
        assert!(manifest.contains("\"status\":\"ok\""));
    }
}
