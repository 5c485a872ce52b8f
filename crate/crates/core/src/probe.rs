//! Runtime type probes: instrument a program so that it prints the
//! constructor name of every visible variable after each straight-line
//! statement, then read those lines back into a type map.

use std::collections::BTreeMap;

use crate::exec::{ExecError, Executor};
use crate::js::edit::{self, Edits};
use crate::js::visit::{walk_program, ListInfo, ListKind, StmtInfo, Visitor};
use crate::js::{self, analyze, Ast, CatchClause, Program, Stmt, StmtKind};

/// Catch parameter that marks a statement as a probe.
const PROBE_MARK: &str = "__probe";

/// statement index -> identifier -> type name.
pub type TypeMap = BTreeMap<usize, BTreeMap<String, String>>;

/// Positions probes go after: (list index, position in list, statement index).
fn probe_sites(program: &Program) -> Vec<(usize, usize, usize)> {
    struct Sites {
        stack: Vec<(usize, bool, usize)>,
        out: Vec<(usize, usize, usize)>,
    }
    impl Visitor for Sites {
        fn enter_list(&mut self, _l: &Vec<Stmt>, info: ListInfo) {
            let probed = matches!(info.kind, ListKind::Program | ListKind::FunctionBody);
            self.stack.push((info.index, probed, 0));
        }
        fn leave_list(&mut self, _l: &Vec<Stmt>, _info: ListInfo) {
            self.stack.pop();
        }
        fn enter_stmt(&mut self, _s: &Stmt, info: StmtInfo) -> bool {
            if let (Some(list), Some(top)) = (info.list, self.stack.last_mut()) {
                if top.0 == list {
                    if top.1 {
                        self.out.push((list, top.2, info.index));
                    }
                    top.2 += 1;
                }
            }
            true
        }
    }
    let mut s = Sites { stack: Vec::new(), out: Vec::new() };
    walk_program(&mut s, program);
    s.out
}

fn probe_statement(index: usize, names: &[&String]) -> Stmt {
    let mut src = String::from("try {\n");
    for n in names {
        src.push_str(&format!(
            "  try {{ print(\"PROBE {index} {n} \" + (typeof {n} === \"undefined\" ? \"undefined\" : {n} === null ? \"null\" : {n}.constructor.name)); }} catch ({PROBE_MARK}) {{}}\n"
        ));
    }
    src.push_str(&format!("}} catch ({PROBE_MARK}) {{}}\n"));
    js::parse(&src).expect("probe template parses").program.body.remove(0)
}

pub fn is_probe(s: &Stmt) -> bool {
    matches!(&s.kind, StmtKind::Try { handler: Some(CatchClause { param: Some(p), .. }), .. } if p == PROBE_MARK)
}

/// Inserts a probe after every top-level and function-body statement. The
/// probe covers the program variables visible at that point.
pub fn instrument_probes(ast: &Ast) -> Ast {
    let program = &ast.program;
    let scope = analyze(program);
    let mut edits = Edits::default();
    for (list, pos, index) in probe_sites(program) {
        let Some(visible) = scope.at_boundary(list, pos + 1) else { continue };
        let names: Vec<&String> = visible.iter().filter(|n| n.as_str() != PROBE_MARK).collect();
        if names.is_empty() {
            continue;
        }
        edits.insert_stmt(list, pos + 1, probe_statement(index, &names));
    }
    let mut out = program.clone();
    edit::apply(&mut out, edits);
    Ast::new(out)
}

/// Removes every probe statement inserted by [`instrument_probes`].
pub fn strip_probes(program: &mut Program) {
    fn strip_list(list: &mut Vec<Stmt>) {
        list.retain(|s| !is_probe(s));
        list.iter_mut().for_each(strip_stmt);
    }
    fn strip_stmt(s: &mut Stmt) {
        match &mut s.kind {
            StmtKind::Function(f) => strip_list(&mut f.body),
            StmtKind::Var(v) => v.decls.iter_mut().filter_map(|d| d.init.as_mut()).for_each(strip_expr),
            StmtKind::Expr(e) | StmtKind::Throw(e) => strip_expr(e),
            StmtKind::Return(Some(e)) => strip_expr(e),
            StmtKind::Block(b) => strip_list(b),
            StmtKind::If { test, cons, alt } => {
                strip_expr(test);
                strip_stmt(cons);
                if let Some(a) = alt {
                    strip_stmt(a);
                }
            }
            StmtKind::For { body, .. } | StmtKind::ForIn { body, .. } | StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
                strip_stmt(body)
            }
            StmtKind::Try { block, handler, finalizer } => {
                strip_list(block);
                if let Some(h) = handler {
                    strip_list(&mut h.body);
                }
                if let Some(f) = finalizer {
                    strip_list(f);
                }
            }
            _ => {}
        }
    }
    // Function bodies inside expressions carry probes too.
    fn strip_expr(e: &mut js::Expr) {
        use js::ExprKind::*;
        match &mut e.kind {
            Function(f) => strip_list(&mut f.body),
            Arrow { body: js::ArrowBody::Block(b), .. } => strip_list(b),
            Arrow { body: js::ArrowBody::Expr(x), .. } => strip_expr(x),
            Array(xs) | Seq(xs) => xs.iter_mut().for_each(strip_expr),
            Template { exprs, .. } => exprs.iter_mut().for_each(strip_expr),
            Object(props) => props.iter_mut().for_each(|p| strip_expr(&mut p.value)),
            Member { object, .. } => strip_expr(object),
            Call { callee, args } | New { callee, args } => {
                strip_expr(callee);
                args.iter_mut().for_each(strip_expr);
            }
            Unary { arg, .. } | Update { arg, .. } => strip_expr(arg),
            Binary { left, right, .. } => {
                strip_expr(left);
                strip_expr(right);
            }
            Assign { target, value, .. } => {
                strip_expr(target);
                strip_expr(value);
            }
            Cond { test, cons, alt } => {
                strip_expr(test);
                strip_expr(cons);
                strip_expr(alt);
            }
            _ => {}
        }
    }
    strip_list(&mut program.body);
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c == '$' || c == '_' || c.is_alphabetic())
        && chars.all(|c| c == '$' || c == '_' || c.is_alphanumeric())
}

/// Reads `PROBE <index> <name> <type>` lines; later lines overwrite earlier
/// ones. Other output is ignored and malformed probe lines are skipped with
/// a warning.
pub fn parse_probe_output(stdout: &str) -> TypeMap {
    let mut map = TypeMap::new();
    for (i, line) in stdout.lines().enumerate() {
        let Some(rest) = line.strip_prefix("PROBE") else { continue };
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [idx, name, ty] if rest.starts_with(' ') && is_identifier(name) => {
                idx.parse::<usize>().ok().map(|idx| (idx, name, ty))
            }
            _ => None,
        };
        match parsed {
            Some((idx, name, ty)) => {
                map.entry(idx).or_default().insert(name.to_string(), ty.to_string());
            }
            None => log::warn!("skipping malformed probe line {}: {line:?}", i + 1),
        }
    }
    map
}

/// Renders a type map as probe lines, ordered by index then name.
pub fn to_probe_lines(map: &TypeMap) -> String {
    let mut out = String::new();
    for (idx, vars) in map {
        for (name, ty) in vars {
            out.push_str(&format!("PROBE {idx} {name} {ty}\n"));
        }
    }
    out
}

/// Runs the instrumented program once and collects its type map.
pub fn probe_types(ast: &Ast, exec: &mut dyn Executor) -> Result<TypeMap, ExecError> {
    let instrumented = instrument_probes(ast);
    let out = exec.run(&js::print(&instrumented))?;
    Ok(parse_probe_output(&out.stdout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::js::parse;

    fn probes(src: &str) -> Vec<String> {
        let ast = instrument_probes(&parse(src).unwrap());
        ast.program.body.iter().filter(|s| is_probe(s)).map(js::print_stmt).collect()
    }

    #[test]
    fn one_probe_after_one_statement() {
        let p = probes("var a = 1;");
        assert_eq!(p.len(), 1);
        assert!(p[0].contains("PROBE 0 a "));
    }

    #[test]
    fn empty_program_is_unchanged() {
        let ast = parse("").unwrap();
        assert_eq!(instrument_probes(&ast).program, ast.program);
    }

    #[test]
    fn probes_cover_function_bodies_only_in_straight_line_positions() {
        let src = "function f(x) {\n  var y = x;\n  if (y) {\n    y = 2;\n  }\n  return y;\n}\nf(1);\n";
        let ast = instrument_probes(&parse(src).unwrap());
        let text = js::print(&ast);
        // Top level: after `function f` (0) and `f(1)` (6); body: after var (1), if (2), return (5).
        for idx in [0, 1, 2, 5, 6] {
            assert!(text.contains(&format!("\"PROBE {idx} ")), "missing {idx}:\n{text}");
        }
        assert!(!text.contains("\"PROBE 3 ") && !text.contains("\"PROBE 4 "));
        assert!(parse(&text).is_ok());
    }

    #[test]
    fn only_visible_names_are_probed() {
        let p = probes("var a = 1;\nfunction g() { var inner = 2; }\n");
        assert!(p.iter().all(|s| !s.contains("inner")));
    }

    #[test]
    fn stripping_restores_the_input() {
        let src = "var a = [1];\nfunction f(b) {\n  let c = b;\n  return function () { var d = c; return d; };\n}\nf(a)();\n";
        let ast = parse(src).unwrap();
        let mut inst = instrument_probes(&ast).program;
        assert_ne!(inst, ast.program);
        strip_probes(&mut inst);
        assert_eq!(js::print_program(&inst), js::print(&ast));
    }

    #[test]
    fn output_parsing() {
        let map = parse_probe_output("PROBE 0 a Number\nhello\nPROBE 0 a String\nPROBE x a Number\nPROBE 1 b\n");
        assert_eq!(map.len(), 1);
        assert_eq!(map[&0]["a"], "String");
    }

    #[test]
    fn serialization_roundtrip() {
        let mut map = TypeMap::new();
        map.entry(3).or_default().insert("x".into(), "Array".into());
        map.entry(0).or_default().insert("$y".into(), "undefined".into());
        assert_eq!(parse_probe_output(&to_probe_lines(&map)), map);
    }
}
