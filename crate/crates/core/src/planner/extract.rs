//! Naive function and call extraction for C-like sources.
//!
//! Comments and literal contents are blanked first. A `{` at file level whose
//! preceding text ends in `name(...)` opens a function body, which runs to
//! the matching `}`. Calls are identifiers followed by `(` inside a body.
//! No preprocessing, no macros, no overload or pointer resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use super::{CallGraph, FunctionIndex, FunctionSpan};
use crate::miner::split_code_line;

const NOT_FUNCTIONS: &[&str] = &[
    "if", "for", "while", "switch", "return", "sizeof", "catch", "do", "else", "case", "defined", "alignof",
    "decltype", "typeof", "static_assert", "_Static_assert",
];

/// Extensions treated as C-like sources.
pub const SOURCE_EXTENSIONS: &[&str] = &["c", "cc", "cpp", "cxx", "h", "hh", "hpp"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedFunction {
    pub name: String,
    pub start: u32,
    pub end: u32,
    /// Names called from the body, sorted and unique.
    pub calls: BTreeSet<String>,
}

fn header_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // name ( params ) [const] [noexcept] [: initializers...] at the end of the header.
    RE.get_or_init(|| {
        Regex::new(r"([A-Za-z_~][\w:~]*)\s*\([^;{}]*\)\s*(?:const\s*)?(?:noexcept\s*)?(?::[^;{}]*)?$").expect("valid")
    })
}

fn call_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"([A-Za-z_][\w:]*)\s*\(").expect("valid"))
}

fn last_segment(name: &str) -> &str {
    name.rsplit("::").next().unwrap_or(name)
}

/// Source with comments and literal contents blanked, preprocessor lines
/// dropped, and line breaks kept.
fn code_only(text: &str) -> String {
    let mut in_block = false;
    let mut out = String::with_capacity(text.len());
    let mut continued = false;
    for line in text.lines() {
        let (code, _) = split_code_line(line, &mut in_block);
        let directive = continued || code.trim_start().starts_with('#');
        continued = directive && line.trim_end().ends_with('\\');
        if !directive {
            out.push_str(&code);
        }
        out.push('\n');
    }
    out
}

/// Functions defined in one source file.
pub fn extract_functions(text: &str) -> Vec<ExtractedFunction> {
    let code = code_only(text);
    let bytes = code.as_bytes();
    let line_of = |offset: usize| 1 + bytes[..offset].iter().filter(|b| **b == b'\n').count() as u32;
    let mut out = Vec::new();
    // Start of the text that may hold the next definition's header.
    let mut header_start = 0;
    // Depth of braces that do not open a function (struct bodies, initializers).
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b';' if depth == 0 => header_start = i + 1,
            b'{' => {
                let header = &code[header_start..i];
                let transparent = depth == 0 && {
                    let h = header.trim();
                    h.starts_with("namespace") || h.starts_with("extern")
                };
                let func = if depth == 0 && !transparent { header_re().captures(header.trim_end()) } else { None };
                let func = func.filter(|c| !NOT_FUNCTIONS.contains(&last_segment(&c[1])));
                match func {
                    Some(c) => {
                        let Some(close) = matching_brace(bytes, i) else { break };
                        let m = c.get(1).expect("group");
                        let body = &code[i + 1..close];
                        let calls = call_re()
                            .captures_iter(body)
                            .map(|k| last_segment(&k[1]).to_string())
                            .filter(|n| !NOT_FUNCTIONS.contains(&n.as_str()))
                            .collect();
                        out.push(ExtractedFunction {
                            name: m.as_str().to_string(),
                            start: line_of(header_start + m.start()),
                            end: line_of(close),
                            calls,
                        });
                        i = close + 1;
                        header_start = i;
                        continue;
                    }
                    None if transparent => header_start = i + 1,
                    None => depth += 1,
                }
            }
            b'}' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    header_start = i + 1;
                }
            }
            _ => {}
        }
        i += 1;
    }
    out
}

fn matching_brace(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (k, b) in bytes.iter().enumerate().skip(open) {
        match b {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(k);
                }
            }
            _ => {}
        }
    }
    None
}

/// Builds a function index and an approximate call graph from in-memory
/// files keyed by path. A call resolves to the same-file definition when
/// there is one, else to every definition of that name; calls to unknown
/// names are dropped.
pub fn build(files: &BTreeMap<String, String>) -> (FunctionIndex, CallGraph) {
    let mut per_file: BTreeMap<&str, Vec<ExtractedFunction>> = BTreeMap::new();
    let mut defs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut spans = Vec::new();
    for (path, text) in files {
        let mut fns = extract_functions(text);
        // Overlapping spans (e.g. two definitions on one line) keep the first.
        fns.dedup_by(|b, a| b.start <= a.end);
        for f in &fns {
            defs.entry(last_segment(&f.name).to_string()).or_default().push(format!("{path}::{}", f.name));
            spans.push((path.clone(), FunctionSpan { name: f.name.clone(), start: f.start, end: f.end }));
        }
        per_file.insert(path, fns);
    }
    let index = FunctionIndex::new(spans).expect("extracted spans are disjoint");
    let mut graph = CallGraph::new();
    for (path, fns) in &per_file {
        for f in fns {
            let caller = format!("{path}::{}", f.name);
            graph.add_node(&caller);
            for callee in &f.calls {
                let Some(targets) = defs.get(callee) else { continue };
                let local: Vec<&String> = targets.iter().filter(|t| t.starts_with(&format!("{path}::"))).collect();
                let chosen: Vec<&String> = if local.is_empty() { targets.iter().collect() } else { local };
                for t in chosen {
                    graph.add_edge(&caller, t);
                }
            }
        }
    }
    (index, graph)
}

/// Reads every C-like source under `root`; paths are relative to it and use `/`.
pub fn build_from_dir(root: &Path) -> io::Result<(FunctionIndex, CallGraph)> {
    let mut files = BTreeMap::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(io::Error::other)?;
        let path = entry.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if !entry.file_type().is_file() || !SOURCE_EXTENSIONS.contains(&ext) {
            continue;
        }
        let rel = path.strip_prefix(root).expect("under root");
        let key = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        files.insert(key, String::from_utf8_lossy(&fs::read(path)?).into_owned());
    }
    Ok(build(&files))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_definitions_and_calls() {
        let src = "#include <x.h>\n#define M(a) \\\n  f(a)\nstruct S {\n  int x;\n};\nstatic int helper(int a)\n{\n  if (a) return g(a);\n  /* fake(){ */\n  return \"h(\";\n}\nint g(int b) { return helper(b - 1); }\n";
        let fns = extract_functions(src);
        let names: Vec<(&str, u32, u32)> = fns.iter().map(|f| (f.name.as_str(), f.start, f.end)).collect();
        assert_eq!(names, [("helper", 7, 12), ("g", 13, 13)]);
        assert_eq!(fns[0].calls, ["g".to_string()].into());
        assert_eq!(fns[1].calls, ["helper".to_string()].into());
    }

    #[test]
    fn initializers_and_namespaces() {
        let src = "static int table[] = { 1, 2 };\nnamespace js {\nvoid A::run() const\n{\n  step();\n}\n}\n";
        let fns = extract_functions(src);
        assert_eq!(fns.len(), 1);
        assert_eq!((fns[0].name.as_str(), fns[0].start, fns[0].end), ("A::run", 3, 6));
    }

    #[test]
    fn calls_resolve_locally_first() {
        let files: BTreeMap<String, String> = [
            ("a.c".to_string(), "void f() { g(); h(); }\nvoid g() {}\n".to_string()),
            ("b.c".to_string(), "void g() {}\nvoid h() { unknown(); }\n".to_string()),
        ]
        .into();
        let (idx, g) = build(&files);
        assert_eq!(idx.len(), 4);
        assert_eq!(g.edges(), [("a.c::f", "a.c::g"), ("a.c::f", "b.c::h")]);
    }
}
