use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use patchforge::js::{self, Ast};
use patchforge::mutate::{job_rng, mutate, Adaptation, DonorPool, Intensity, MutationConfig, Seed};

fn corpus() -> Vec<(String, Ast)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/js/valid");
    let mut v: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v.iter()
        .map(|p| {
            let id = p.file_stem().unwrap().to_string_lossy().into_owned();
            (id, js::parse(&fs::read_to_string(p).unwrap()).unwrap())
        })
        .collect()
}

fn undeclared(ast: &Ast) -> BTreeSet<String> {
    js::analyze(&ast.program).undeclared.into_iter().map(|u| u.name).collect()
}

struct Tally {
    expression: usize,
    parsed: usize,
    new_undeclared: usize,
    noops: usize,
}

fn campaign(cfg: &MutationConfig, n: u64) -> Tally {
    let seeds = corpus();
    let mut pool = DonorPool::new();
    for (id, ast) in &seeds {
        pool.add(id, ast.clone());
    }
    let baselines: Vec<BTreeSet<String>> = seeds.iter().map(|(_, a)| undeclared(a)).collect();
    let mut t = Tally { expression: 0, parsed: 0, new_undeclared: 0, noops: 0 };
    for i in 0..n {
        let k = i as usize % seeds.len();
        let (id, ast) = &seeds[k];
        let mut rng = job_rng(cfg.rng_seed, 0, i);
        let (mutant, record) = mutate(Seed { id, ast, types: None }, &pool, cfg, &mut rng);
        t.expression += (record.intensity == Intensity::Expression) as usize;
        t.noops += record.noop as usize;
        if let Ok(reparsed) = js::parse(&js::print(&mutant)) {
            t.parsed += 1;
            if !undeclared(&reparsed).is_subset(&baselines[k]) {
                t.new_undeclared += 1;
            }
        }
    }
    t
}

#[test]
fn ten_thousand_mutations_meet_calibration() {
    let start = Instant::now();
    let cfg = MutationConfig { rng_seed: 2024, ..MutationConfig::default() };
    let t = campaign(&cfg, 10_000);
    assert!((7800..=8200).contains(&t.expression), "expression count {}", t.expression);
    assert!(t.parsed >= 9900, "parsed {}", t.parsed);
    assert_eq!(t.new_undeclared, 0);
    assert!(t.noops < 500, "{} no-ops", t.noops);
    eprintln!("10k mutations in {:?}, {} no-ops", start.elapsed(), t.noops);
}

#[test]
fn untyped_adaptation_never_leaves_undeclared_names() {
    let cfg = MutationConfig { rng_seed: 7, adaptation: Adaptation::Untyped, ..MutationConfig::default() };
    let t = campaign(&cfg, 2000);
    assert_eq!(t.new_undeclared, 0);
    assert_eq!(t.parsed, 2000);
}

#[test]
fn identical_inputs_give_identical_mutants() {
    let seeds = corpus();
    let mut pool = DonorPool::new();
    for (id, ast) in &seeds {
        pool.add(id, ast.clone());
    }
    let cfg = MutationConfig::default();
    for i in 0..200u64 {
        let (id, ast) = &seeds[i as usize % seeds.len()];
        let run = || {
            let (m, r) = mutate(Seed { id, ast, types: None }, &pool, &cfg, &mut job_rng(9, 1, i));
            (js::print(&m), r)
        };
        assert_eq!(run(), run());
    }
}
