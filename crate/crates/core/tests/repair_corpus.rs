use std::fs;
use std::path::Path;

use patchforge::extractor::{repair, Classification, EngineProfile, PocRecord, RuleSet};
use patchforge::fuzz::fake::FakeTarget;
use patchforge::js;

fn seeded() -> Vec<(String, String, PocRecord)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/js/seeded");
    let manifest = fs::read_to_string(dir.join("manifest.tsv")).unwrap();
    manifest
        .lines()
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            let text = fs::read_to_string(dir.join(cols[0])).unwrap();
            (cols[0].to_string(), cols[2].to_string(), PocRecord::new("seeded", cols[0], &text))
        })
        .collect()
}

fn classify(target: &FakeTarget, profile: &EngineProfile, text: &str) -> Classification {
    let out = target.evaluate(text);
    profile.classify(out.exit_code, out.signal, out.timed_out)
}

#[test]
fn every_file_lands_in_its_expected_bucket() {
    let target = FakeTarget::default_target();
    let profile = EngineProfile::builtin("fake").unwrap();
    let rules = RuleSet::builtin("fake").unwrap();
    let records = seeded();
    assert_eq!(records.len(), 50);
    for (name, expected, p) in &records {
        let before = classify(&target, &profile, &p.raw_text);
        let fixed = repair(p, &rules);
        let after = classify(&target, &profile, fixed.text());
        match expected.as_str() {
            "clean" => {
                assert_eq!(before, Classification::Ok, "{name}");
                assert!(fixed.repaired_text.is_none(), "{name}");
            }
            "fixable" => {
                assert_eq!(before, Classification::GrammarError, "{name}");
                assert_ne!(after, Classification::GrammarError, "{name}: {}", fixed.text());
            }
            "other" => {
                assert_eq!(before, Classification::GrammarError, "{name}");
                assert_eq!(after, Classification::GrammarError, "{name}");
            }
            e => panic!("unknown bucket {e}"),
        }
    }
}

#[test]
fn repair_is_idempotent_on_seeded_files() {
    let rules = RuleSet::builtin("fake").unwrap();
    for (name, _, p) in seeded() {
        let once = repair(&p, &rules);
        assert_eq!(repair(&once, &rules), once, "{name}");
    }
}

#[test]
fn repair_keeps_parsable_files_parsable() {
    let rules = RuleSet::builtin("fake").unwrap();
    let mut texts: Vec<(String, String)> = seeded().into_iter().map(|(n, _, p)| (n, p.raw_text)).collect();
    let valid = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/js/valid");
    for e in fs::read_dir(valid).unwrap() {
        let path = e.unwrap().path();
        texts.push((path.display().to_string(), fs::read_to_string(&path).unwrap()));
    }
    for (name, text) in texts {
        if js::parse(&text).is_err() {
            continue;
        }
        let out = repair(&PocRecord::new("c", &name, &text), &rules);
        assert!(js::parse(out.text()).is_ok(), "{name}");
    }
}
