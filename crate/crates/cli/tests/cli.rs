use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use patchforge::fuzz::fake::FakeTarget;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel)
}

fn patchforge(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_patchforge"));
    c.args(args).env_remove("PATCHFORGE_CONFIG");
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn")
}

fn code(cmd: &mut Command) -> i32 {
    run(cmd).status.code().expect("exited normally")
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&mut patchforge(&["--help"])), 0);
    assert_eq!(code(&mut patchforge(&["fuzz", "--help"])), 0);
    assert_eq!(code(&mut patchforge(&["frobnicate"])), 1);
    assert_eq!(code(&mut patchforge(&[])), 1);
    assert_eq!(code(&mut patchforge(&["classify"])), 1);
    assert_eq!(code(&mut patchforge(&["classify", "--threshold", "abc"])), 1);
    assert_eq!(code(&mut patchforge(&["--profile", "nope", "mine", "--commits", "x"])), 1);
    assert_eq!(code(&mut patchforge(&["mine", "--commits", "/definitely/missing.jsonl"])), 2);
}

#[test]
fn unknown_subcommand_suggests_a_close_match() {
    let out = run(&mut patchforge(&["clasify"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("classify"));
}

#[test]
fn classify_writes_one_verdict_per_commit_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let commits = fixture("commits.jsonl");
    let issues = fixture("issues.jsonl");
    let mut outputs = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let out = dir.path().join(name);
        let mut cmd = patchforge(&["classify"]);
        cmd.arg("--commits").arg(&commits).arg("--issues").arg(&issues).arg("--out").arg(&out);
        assert_eq!(code(&mut cmd), 0);
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 60);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["is_security"].is_boolean());
        assert_eq!(v["signals"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pipeline.toml");
    fs::write(
        &cfg,
        format!(
            "profile = \"fake\"\n[classify]\ncommits = \"{}\"\nthreshold = 1.0\nout = \"verdicts.jsonl\"\n",
            fixture("commits.jsonl").display()
        ),
    )
    .unwrap();
    let mut cmd = patchforge(&["classify"]);
    cmd.env("PATCHFORGE_CONFIG", &cfg);
    assert_eq!(code(&mut cmd), 0);
    let strict = fs::read_to_string(dir.path().join("verdicts.jsonl")).unwrap();
    assert_eq!(strict.lines().count(), 60);
    for line in strict.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["is_security"].as_bool().unwrap(), v["score"].as_f64().unwrap() >= 1.0, "{line}");
    }

    let mut cmd = patchforge(&["classify", "--threshold", "0.0"]);
    cmd.env("PATCHFORGE_CONFIG", &cfg);
    assert_eq!(code(&mut cmd), 0);
    let loose = fs::read_to_string(dir.path().join("verdicts.jsonl")).unwrap();
    assert!(loose.lines().all(|l| l.contains("\"is_security\":true")));

    fs::write(&cfg, "[classify]\nthreshold = 2.0\n").unwrap();
    let mut cmd = patchforge(&["classify"]);
    cmd.env("PATCHFORGE_CONFIG", &cfg);
    assert_eq!(code(&mut cmd), 1);
}

#[test]
fn mine_emits_stats_per_commit() {
    let out = run(patchforge(&["mine"]).arg("--commits").arg(fixture("commits.jsonl")));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 60);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first["stats"]["lines_changed"].is_u64());
}

#[test]
fn plan_writes_allowlist_and_hot_stats() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = patchforge(&["plan", "--depth", "1"]);
    cmd.arg("--commits")
        .arg(fixture("engine/security.jsonl"))
        .arg("--source")
        .arg(fixture("engine"))
        .arg("--census")
        .arg(fixture("census/qjs_files.txt"))
        .arg("--out")
        .arg(dir.path());
    assert_eq!(code(&mut cmd), 0);
    assert_eq!(
        fs::read_to_string(dir.path().join("allowlist.txt")).unwrap(),
        "fun: emitLoopHeader\nfun: hoistBoundsCheck\nfun: insertCheck\nfun: loopInvariant\nfun: optimizeLoop\n"
    );
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("hot_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["total_files"], 30);
    // The engine patches touch no census file.
    assert_eq!(stats["changed_files"], 0);

    let mut cmd = patchforge(&["plan"]);
    cmd.arg("--commits").arg(fixture("engine/security.jsonl"));
    assert_eq!(code(&mut cmd), 1);
}

#[test]
fn fake_target_speaks_the_adapter_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let cov = dir.path().join("cov");
    let sample = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let fake = |input: &Path| Command::new(env!("CARGO_BIN_EXE_fake-target")).arg(input).env("COV_OUT", &cov).output().unwrap();

    let ok = fake(&sample("ok.js", "var a = 1;\nfor (var i = 0; i < 2; i++) {}\n"));
    assert_eq!(ok.status.code(), Some(0));
    let want: String = FakeTarget::default_target().evaluate(&fs::read_to_string(dir.path().join("ok.js")).unwrap()).edges.iter().map(|e| format!("{e}\n")).collect();
    assert!(!want.is_empty());
    assert_eq!(fs::read_to_string(&cov).unwrap(), want);

    let bad = fake(&sample("bad.js", "var = ;"));
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("SyntaxError"));

    let crash = fake(&sample("crash.js", "for (;;) {\n  for (;;) {}\n}\n"));
    #[cfg(unix)]
    {
        use std::os::unix::process::ExitStatusExt;
        assert_eq!(crash.status.signal(), Some(11));
    }
    let edges = fs::read_to_string(&cov).unwrap();
    assert!(edges.ends_with("99\n100\n"), "{edges}");
}

#[test]
fn fuzz_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir_all(&corpus).unwrap();
    fs::copy(fixture("js/valid/cve_2018_0777.js"), corpus.join("cve_2018_0777.js")).unwrap();
    let camp = dir.path().join("camp");
    let mut cmd = patchforge(&["fuzz", "--profile", "fake", "--budget-execs", "120", "--rng-seed", "2", "--stop-on-crash"]);
    cmd.arg("--corpus").arg(&corpus).arg("--out").arg(&camp);
    assert_eq!(code(&mut cmd), 0);
    let stats = fs::read_to_string(camp.join("stats.jsonl")).unwrap();
    let last: serde_json::Value = serde_json::from_str(stats.lines().last().unwrap()).unwrap();
    assert!(last["execs"].as_u64().unwrap() <= 120);

    let out = run(patchforge(&["report"]).arg(&camp));
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("execs"), "{table}");
    assert!(table.contains("sig11-"), "{table}");

    let mut empty = patchforge(&["fuzz", "--budget-execs", "0"]);
    empty.arg("--corpus").arg(&corpus).arg("--out").arg(dir.path().join("empty"));
    assert_eq!(code(&mut empty), 0);
    let report = fs::read_to_string(dir.path().join("empty/report.json")).unwrap();
    assert!(report.contains("\"execs\": 0"));

    let mut no_budget = patchforge(&["fuzz"]);
    no_budget.arg("--corpus").arg(&corpus).arg("--out").arg(dir.path().join("x"));
    assert_eq!(code(&mut no_budget), 1);

    let junk = dir.path().join("junk");
    fs::create_dir_all(&junk).unwrap();
    fs::write(junk.join("a.js"), "var = ;").unwrap();
    let mut invalid = patchforge(&["fuzz", "--budget-execs", "5"]);
    invalid.arg("--corpus").arg(&junk).arg("--out").arg(dir.path().join("y"));
    assert_eq!(code(&mut invalid), 2);
}
