use std::fs;
use std::path::PathBuf;

use patchforge::js::visit::{walk_program, ExprInfo, StmtInfo, Visitor};
use patchforge::js::{self, Expr, Stmt, StmtKind};

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/js/valid");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "js"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn corpus_has_at_least_100_files() {
    assert!(corpus().len() >= 100);
}

#[test]
fn every_file_round_trips() {
    for (name, text) in corpus() {
        let ast = js::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = js::print(&ast);
        let again = js::parse(&printed).unwrap_or_else(|e| panic!("{name} reprint: {e}\n{printed}"));
        assert_eq!(ast, again, "{name}: structure changed\n{printed}");
        assert_eq!(js::print(&again), printed, "{name}: printer not idempotent");
    }
}

#[test]
fn no_undeclared_references_in_valid_corpus() {
    for (name, text) in corpus() {
        let ast = js::parse(&text).unwrap();
        let found = js::undeclared_references(&ast);
        assert!(found.is_empty(), "{name}: {found:?}");
    }
}

struct Spans<'s> {
    src: &'s str,
    bad: Vec<String>,
}

impl Visitor for Spans<'_> {
    fn enter_stmt(&mut self, s: &Stmt, _info: StmtInfo) -> bool {
        let text = &self.src[s.span.range()];
        // Reparse inside a function and loop so `return`/`break` slices stay legal.
        let wrapped = format!("function w() {{ for (;;) {{\n{text}\n}} }}");
        let inner = js::parse(&wrapped).ok().and_then(|a| match a.program.body.into_iter().next()?.kind {
            StmtKind::Function(f) => match f.body.into_iter().next()?.kind {
                StmtKind::For { body, .. } => match body.kind {
                    StmtKind::Block(mut b) if b.len() == 1 => b.pop(),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        });
        if inner.as_ref() != Some(s) {
            self.bad.push(format!("stmt {text:?}"));
        }
        true
    }

    fn enter_expr(&mut self, e: &Expr, _info: ExprInfo) -> bool {
        let text = &self.src[e.span.range()];
        match js::parse_expression(text) {
            Ok(x) if x == *e => {}
            other => self.bad.push(format!("expr {text:?}: {other:?}")),
        }
        true
    }
}

#[test]
fn spans_reparse_to_the_same_node() {
    for (name, text) in corpus() {
        let ast = js::parse(&text).unwrap();
        let mut v = Spans { src: &text, bad: Vec::new() };
        walk_program(&mut v, &ast.program);
        assert!(v.bad.is_empty(), "{name}: {:#?}", &v.bad[..v.bad.len().min(5)]);
    }
}

#[test]
fn motivating_poc_has_expected_shape() {
    let (_, text) = corpus().into_iter().find(|(n, _)| n == "cve_2018_0777.js").unwrap();
    assert_eq!(text.lines().count(), 18);
    let ast = js::parse(&text).unwrap();
    let dump = js::debug_dump(&ast);
    assert_eq!(dump.lines().filter(|l| l.trim_start().starts_with("function ")).count(), 2);
    assert_eq!(dump.lines().filter(|l| l.trim_start() == "for").count(), 2);
    assert!(dump.contains("ident Float64Array"));
}

fn node_stdout(src: &str) -> Option<String> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.js");
    fs::write(&path, format!("globalThis.print = (...a) => console.log(...a);\n{src}")).unwrap();
    let out = std::process::Command::new("node").arg(&path).output().ok()?;
    Some(String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn printed_corpus_behaves_like_source_under_node() {
    if node_stdout("").is_none() {
        eprintln!("node not available; skipping");
        return;
    }
    // One file per template family keeps this quick.
    let sample = corpus().into_iter().filter(|(n, _)| n.ends_with("_00.js") || n.starts_with("cve_"));
    for (name, text) in sample {
        let printed = js::print(&js::parse(&text).unwrap());
        assert_eq!(node_stdout(&printed), node_stdout(&text), "{name}\n{printed}");
    }
}
