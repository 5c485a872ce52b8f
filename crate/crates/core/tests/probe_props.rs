use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use patchforge::exec::SubprocessExecutor;
use patchforge::fuzz::fake::FakeTarget;
use patchforge::js;
use patchforge::probe::{instrument_probes, probe_types, strip_probes};

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/js/valid");
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn probes_preserve_fake_target_exit_codes() {
    let target = FakeTarget::default_target();
    for path in corpus() {
        let text = fs::read_to_string(&path).unwrap();
        let ast = js::parse(&text).unwrap();
        let inst = js::print(&instrument_probes(&ast));
        let (a, b) = (target.evaluate(&text), target.evaluate(&inst));
        assert_eq!((a.exit_code, a.signal), (b.exit_code, b.signal), "{}", path.display());
    }
}

#[test]
fn stripping_probes_restores_every_corpus_file() {
    for path in corpus() {
        let ast = js::parse(&fs::read_to_string(&path).unwrap()).unwrap();
        let mut inst = instrument_probes(&ast).program;
        strip_probes(&mut inst);
        assert_eq!(js::print_program(&inst), js::print(&ast), "{}", path.display());
    }
}

fn node() -> Option<SubprocessExecutor> {
    let ok = std::process::Command::new("node").arg("--version").output().is_ok_and(|o| o.status.success());
    if !ok {
        eprintln!("node not found; skipping engine-backed probe test");
        return None;
    }
    let script = "globalThis.print = console.log; (0, eval)(require('fs').readFileSync(process.argv[1], 'utf8'))";
    Some(SubprocessExecutor::new(vec!["node".into(), "-e".into(), script.into(), "{input}".into()], Duration::from_secs(10)).unwrap())
}

#[test]
fn constructor_names_from_a_real_engine() {
    let Some(mut exec) = node() else { return };
    let ast = js::parse("var a = 1;\nvar s = 'x', arr = [], o = {}, f = function () {}, n = null;\nvar late;\n").unwrap();
    let map = probe_types(&ast, &mut exec).unwrap();
    assert_eq!(map[&0]["a"], "Number");
    assert_eq!(map[&0]["s"], "undefined");
    assert_eq!(map[&1]["s"], "String");
    assert_eq!(map[&1]["arr"], "Array");
    assert_eq!(map[&1]["o"], "Object");
    assert_eq!(map[&1]["f"], "Function");
    assert_eq!(map[&1]["n"], "null");
    assert_eq!(map[&2]["late"], "undefined");
}

#[test]
fn loops_report_the_last_iteration() {
    let Some(mut exec) = node() else { return };
    let ast = js::parse("function f(x) {\n  var y = x;\n}\nf(1);\nf('s');\n").unwrap();
    let map = probe_types(&ast, &mut exec).unwrap();
    assert_eq!(map[&1]["y"], "String");
}
