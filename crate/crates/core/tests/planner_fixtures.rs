use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use patchforge::miner::{parse_commit_log, MinerConfig};
use patchforge::planner::extract::build_from_dir;
use patchforge::planner::{changed_functions, emit_allowlist, hot_stats, select_functions, CallGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// Repeated one-step expansion over the raw edge list.
fn brute_force(edges: &[(String, String)], changed: &BTreeSet<String>, depth: usize) -> BTreeSet<String> {
    let mut s = changed.clone();
    for _ in 0..depth {
        let mut next = s.clone();
        for (a, b) in edges {
            if s.contains(a) {
                next.insert(b.clone());
            }
            if s.contains(b) {
                next.insert(a.clone());
            }
        }
        s = next;
    }
    s
}

#[test]
fn selection_matches_brute_force_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=200);
        let mut g = CallGraph::new();
        let mut edges = Vec::new();
        for u in 0..n {
            g.add_node(&format!("f.c::n{u}"));
            for v in 0..n {
                if u != v && rng.gen_bool(0.05) {
                    let (a, b) = (format!("f.c::n{u}"), format!("f.c::n{v}"));
                    g.add_edge(&a, &b);
                    edges.push((a, b));
                }
            }
        }
        let k = rng.gen_range(1..=5.min(n));
        let changed: BTreeSet<String> = (0..k).map(|_| format!("f.c::n{}", rng.gen_range(0..n))).collect();
        let mut previous = BTreeSet::new();
        for depth in 0..=3 {
            let plan = select_functions(&g, &changed, depth);
            let got: BTreeSet<String> = plan.selected.keys().cloned().collect();
            assert_eq!(got, brute_force(&edges, &changed, depth));
            assert!(changed.is_subset(&got));
            assert!(previous.is_subset(&got));
            previous = got;
        }
    }
}

#[test]
fn census_fixture_reproduces_hand_counts() {
    let census: Vec<String> = fs::read_to_string(fixture("census/qjs_files.txt")).unwrap().lines().map(String::from).collect();
    let patches = parse_commit_log(&fs::read_to_string(fixture("census/qjs_security.jsonl")).unwrap(), &MinerConfig::default()).unwrap();
    let s = hot_stats(&patches, &census);
    assert_eq!((s.total_files, s.changed_files), (30, 11));
    assert_eq!(s.ratio, 11.0 / 30.0);
    assert_eq!(format!("{:.1}%", s.ratio * 100.0), "36.7%");
    assert_eq!(s.times_patched.values().sum::<usize>(), 371);
    assert_eq!(s.average_patched_times, 371.0 / 11.0);
    assert_eq!(s.times_patched["quickjs.c"], 300);
}

#[test]
fn engine_fixture_plan() {
    let (index, graph) = build_from_dir(&fixture("engine")).unwrap();
    assert!(graph.contains("src/dfg.c::hoistBoundsCheck"));
    assert_eq!(index.function_at("src/dfg.c", 21).as_deref(), Some("src/dfg.c::hoistBoundsCheck"));

    let text = fs::read_to_string(fixture("engine/security.jsonl")).unwrap();
    let patches = parse_commit_log(&text, &MinerConfig::default()).unwrap();
    let changed = changed_functions(&patches, &index);
    assert_eq!(changed, ["src/dfg.c::hoistBoundsCheck".to_string()].into());

    let plan = select_functions(&graph, &changed, 1);
    assert_eq!(
        emit_allowlist(&plan),
        "fun: emitLoopHeader\nfun: hoistBoundsCheck\nfun: insertCheck\nfun: loopInvariant\nfun: optimizeLoop\n"
    );
    let round = CallGraph::from_tsv(&graph.to_tsv()).unwrap();
    assert_eq!(round.edges(), graph.edges());
}
