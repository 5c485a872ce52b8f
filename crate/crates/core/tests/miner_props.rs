use patchforge::miner::{extract_diff_stats, parse_commit_log, Commit, MinerConfig};
use proptest::prelude::*;
use regex::Regex;

const POOL: &[&str] = &[
    "if (x) y();",
    "x = 1;",
    "} else if (b) {",
    "while (n--) step();",
    "switch (k) {",
    "r = a ? b : c;",
    "Foo::bar(baz);",
    "v = opt?.x ?? 0;",
    "log(\"if while switch\");",
    "c = '?'; d = ':';",
    "// if commented out",
    "/* start of block",
    "still in block while",
    "end of block */ z = 2;",
    "/* inline if */ q = 3;",
    "s = \"a \\\" if\";",
    "notify(elseif, ifdef, whileLoop);",
    "t = m ? n : o ? p : w;",
    "",
];

/// Independent scan: one left-to-right regex strips strings and comments
/// over the whole hunk, then per-line keyword and ternary regexes.
fn oracle(lines: &[(bool, &str)]) -> usize {
    let text: Vec<&str> = lines.iter().map(|(_, l)| *l).collect();
    let joined = text.join("\n");
    let lex = Regex::new(r#""(?:\\.|[^"\\\n])*"|'(?:\\.|[^'\\\n])*'|//[^\n]*|/\*[\s\S]*?\*/|/\*[\s\S]*$"#).unwrap();
    let stripped = lex.replace_all(&joined, |c: &regex::Captures| {
        let m = &c[0];
        if m.starts_with('"') || m.starts_with('\'') {
            let q = &m[..1];
            format!("{q}{q}")
        } else {
            m.chars().map(|ch| if ch == '\n' { '\n' } else { ' ' }).collect()
        }
    });
    let kw = Regex::new(r"(^|[^\w$])(if|while|switch)($|[^\w$])").unwrap();
    let tern = Regex::new(r"(^|[^?])\?([^?.:]|$)").unwrap();
    stripped
        .split('\n')
        .zip(lines)
        .filter(|(code, (added, _))| {
            let ternary = tern.is_match(code) && code.split("::").collect::<String>().contains(':');
            *added && (kw.is_match(code) || ternary)
        })
        .count()
}

fn build(lines: &[(bool, &str)]) -> Commit {
    let body: Vec<_> = lines.iter().map(|(a, l)| serde_json::json!([if *a { "+" } else { " " }, l])).collect();
    let added = lines.iter().filter(|(a, _)| *a).count();
    let rec = serde_json::json!({
        "id": "p", "ts": 0, "msg": "",
        "files": [{"path": "a.cpp", "kind": "modified"}],
        "hunks": [{"path": "a.cpp", "old": [1, lines.len() - added], "new": [1, lines.len()], "lines": body}]
    });
    parse_commit_log(&rec.to_string(), &MinerConfig::default()).unwrap().remove(0)
}

proptest! {
    #[test]
    fn conditionals_match_oracle(picks in prop::collection::vec((any::<bool>(), 0..POOL.len()), 0..30)) {
        let lines: Vec<(bool, &str)> = picks.iter().map(|(a, i)| (*a, POOL[*i])).collect();
        let stats = extract_diff_stats(&build(&lines));
        prop_assert_eq!(stats.conditionals_changed, oracle(&lines));
        prop_assert!(stats.conditionals_changed <= stats.lines_changed);
    }

    #[test]
    fn context_lines_do_not_change_counts(
        picks in prop::collection::vec((any::<bool>(), 0..POOL.len()), 1..20),
        filler in "[a-z =;]{0,12}",
    ) {
        // Comment-free context so block-comment state is not perturbed.
        let safe: Vec<&str> = POOL.iter().copied().filter(|l| !l.contains("/*") && !l.contains("*/")).collect();
        let lines: Vec<(bool, &str)> = picks.iter().map(|(a, i)| (*a, safe[*i % safe.len()])).collect();
        let swapped: Vec<(bool, &str)> = lines.iter().map(|(a, l)| if *a { (true, *l) } else { (false, filler.as_str()) }).collect();
        prop_assert_eq!(extract_diff_stats(&build(&lines)), extract_diff_stats(&build(&swapped)));
    }
}
