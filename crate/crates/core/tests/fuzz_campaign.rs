use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use patchforge::exec::{ExecError, Executor};
use patchforge::extractor::EngineProfile;
use patchforge::fuzz::fake::{FakeExecutor, FakeRules, FakeTarget, FeatureRule};
use patchforge::fuzz::{edges_for_functions, run_campaign, CampaignConfig, SeedSource};
use patchforge::planner::parse_allowlist;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn planted_seed() -> Vec<(String, String)> {
    vec![("cve_2018_0777".into(), fs::read_to_string(fixture("js/valid/cve_2018_0777.js")).unwrap())]
}

fn engine_allowlist(target: &FakeTarget) -> BTreeSet<u32> {
    let names = parse_allowlist(
        "fun: emitLoopHeader\nfun: hoistBoundsCheck\nfun: insertCheck\nfun: loopInvariant\nfun: optimizeLoop\n",
    );
    edges_for_functions(&target.config().edge_functions, &names)
}

fn default_fake(_: usize) -> Result<Box<dyn Executor>, ExecError> {
    Ok(Box::new(FakeExecutor::new(FakeTarget::default_target())))
}

fn config(budget: u64, rng_seed: u64) -> CampaignConfig {
    let mut c = CampaignConfig::new(EngineProfile::builtin("fake").unwrap());
    c.budget_execs = Some(budget);
    c.rng_seed = rng_seed;
    c
}

#[test]
fn planted_crash_is_found_for_most_seeds() {
    let allow = engine_allowlist(&FakeTarget::default_target());
    assert_eq!(allow, [2, 3, 4, 60, 65, 99, 100].into());
    let mut found = 0;
    for rng_seed in 0..10 {
        let mut c = config(100_000, rng_seed);
        c.stop_on_crash = true;
        let r = run_campaign(&c, &planted_seed(), Some(allow.clone()), &default_fake).unwrap();
        if let Some(crash) = r.crashes.first() {
            assert_eq!(crash.signature.signal, 11);
            assert!(crash.signature.edges.ends_with(&[99, 100]));
            found += 1;
        }
    }
    assert!(found >= 8, "crash found for {found}/10 seeds");
}

#[test]
fn single_worker_outputs_are_byte_identical() {
    let allow = engine_allowlist(&FakeTarget::default_target());
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut prints = Vec::new();
    for d in &dirs {
        let mut c = config(3000, 7);
        c.out = Some(d.path().to_path_buf());
        prints.push(run_campaign(&c, &planted_seed(), Some(allow.clone()), &default_fake).unwrap().fingerprint());
    }
    assert_eq!(prints[0], prints[1]);
    for sub in ["queue", "crashes"] {
        let list = |root: &Path| -> Vec<(PathBuf, Vec<u8>)> {
            walkdir::WalkDir::new(root.join(sub))
                .sort_by_file_name()
                .into_iter()
                .map(Result::unwrap)
                .filter(|e| e.file_type().is_file())
                .map(|e| (e.path().strip_prefix(root).unwrap().to_path_buf(), fs::read(e.path()).unwrap()))
                .collect()
        };
        assert_eq!(list(dirs[0].path()), list(dirs[1].path()), "{sub} differs");
    }
    assert_eq!(fs::read(dirs[0].path().join("queue.jsonl")).unwrap(), fs::read(dirs[1].path().join("queue.jsonl")).unwrap());
}

const FEATURES: &[&str] = &[
    "stmt:for", "stmt:while", "stmt:if", "stmt:function", "stmt:let", "stmt:var", "stmt:return", "expr:call",
    "expr:member", "expr:array", "expr:assign", "expr:update", "expr:unary", "expr:seq", "expr:cond", "op:+", "op:-",
    "op:*", "op:<", "op:===", "op:&", "ident:Math", "call:print", "count:for:2", "count:if:2", "nest:if:2",
    "nest:block:3", "nest:function:2", "nest:for:2",
];

fn landscape(rng: &mut ChaCha8Rng) -> (FakeTarget, BTreeSet<u32>) {
    let mut rules = vec![FeatureRule { when: "always".into(), edges: vec![0], action: None }];
    let n = rng.gen_range(5..FEATURES.len());
    for f in FEATURES.choose_multiple(rng, n).copied().collect::<Vec<_>>() {
        let edges = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(1..80)).collect();
        rules.push(FeatureRule { when: f.to_string(), edges, action: None });
    }
    let target = FakeTarget::new(FakeRules {
        grammar_exit_code: 3,
        check_references: true,
        rules,
        edge_functions: Default::default(),
    })
    .unwrap();
    let allow = target.all_edges().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    (target, allow)
}

#[test]
fn gating_is_sound_on_random_landscapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let corpus_dir = fixture("js/valid");
    let mut names: Vec<_> = fs::read_dir(&corpus_dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for round in 0..200 {
        let (target, allow) = landscape(&mut rng);
        let seeds: Vec<(String, String)> = names
            .choose_multiple(&mut rng, 2)
            .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), fs::read_to_string(p).unwrap()))
            .collect();
        let t = target.clone();
        let factory = move |_: usize| -> Result<Box<dyn Executor>, ExecError> { Ok(Box::new(FakeExecutor::new(t.clone()))) };
        let dir = tempfile::tempdir().unwrap();
        let mut c = config(60, round);
        c.out = Some(dir.path().to_path_buf());
        let r = run_campaign(&c, &seeds, Some(allow.clone()), &factory).unwrap();
        let mut seen = BTreeSet::new();
        for entry in &r.queue {
            let new: BTreeSet<u32> = entry.coverage_new.iter().copied().collect();
            assert!(new.is_subset(&allow), "round {round}: non-allowlisted edge credited");
            assert!(new.is_disjoint(&seen));
            if entry.source == SeedSource::Mutant {
                assert!(!new.is_empty(), "round {round}: {} enqueued without new allowlisted edges", entry.id);
                let text = fs::read_to_string(dir.path().join("queue").join(format!("{}.js", entry.id))).unwrap();
                let edges: BTreeSet<u32> = target.evaluate(&text).edges.into_iter().collect();
                assert!(new.is_subset(&edges));
            }
            seen.extend(new);
        }
        assert!(seen.is_subset(&r.edges_seen.iter().copied().collect()));
        for w in r.coverage_curve.windows(2) {
            assert!(w[0].edges_seen <= w[1].edges_seen && w[0].execs <= w[1].execs);
        }
    }
}
