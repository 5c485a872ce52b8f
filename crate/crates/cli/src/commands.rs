use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use patchforge::classifier::{self, ClassifierConfig, IssueStore, PatchVerdict};
use patchforge::extractor::repair::RuleSet;
use patchforge::extractor::{extract_pocs, validate_all, write_corpus, PocStatus};
use patchforge::fuzz::{edges_for_functions, run_campaign, CampaignConfig, CampaignReport, SeedSource};
use patchforge::miner::{self, parse_commit_log, Commit};
use patchforge::planner::extract::build_from_dir;
use patchforge::planner::{
    changed_functions, emit_allowlist, hot_stats, parse_allowlist, select_functions, CallGraph, FunctionIndex,
};
use patchforge::{js, probe};
use serde::Serialize;

use crate::target::Target;
use crate::{ClassifyArgs, Context, ExtractArgs, FuzzArgs, MineArgs, PlanArgs, ProbeArgs, ReportArgs, UsageError};

const DEFAULT_DEPTH: usize = 1;

fn required(flag: Option<PathBuf>, config: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| config.clone()).ok_or_else(|| UsageError(format!("missing --{name}")).into())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// File at `path` (parents created) or stdout.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_jsonl<T: Serialize>(out: &mut dyn Write, items: impl IntoIterator<Item = T>) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut *out, &item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn load_commits(path: &Path, target: &Target) -> Result<Vec<Commit>> {
    let commits = parse_commit_log(&read(path)?, &target.profile.miner_config())
        .with_context(|| format!("commit stream {}", path.display()))?;
    Ok(commits)
}

/// Commits whose verdict says security, or all of them without verdicts.
fn security_commits(commits: Vec<Commit>, verdicts: Option<&Path>) -> Result<Vec<Commit>> {
    let Some(path) = verdicts else { return Ok(commits) };
    let mut security = BTreeSet::new();
    for (i, line) in read(path)?.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: PatchVerdict = serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        if v.is_security {
            security.insert(v.commit_id);
        }
    }
    Ok(commits.into_iter().filter(|c| security.contains(&c.id)).collect())
}

/// `.js` files under `root`, sorted, with `/`-joined relative ids.
fn js_files(root: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry?;
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|e| e != "js") {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("under root");
        let id = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        out.push((id, read(entry.path())?));
    }
    Ok(out)
}

#[derive(Serialize)]
struct MinedCommit<'a> {
    id: &'a str,
    ts: i64,
    files: &'a [miner::FileChange],
    stats: miner::DiffStats,
    js_files: Vec<String>,
}

pub fn mine(ctx: &Context, a: MineArgs) -> Result<()> {
    let target = Target::resolve(ctx)?;
    let commits_path = required(a.commits, &ctx.config.mine.commits, "commits")?;
    let commits = load_commits(&commits_path, &target)?;
    let cfg = target.profile.miner_config();
    let mut out = sink(a.out.or(ctx.config.mine.out.clone()).as_deref())?;
    write_jsonl(
        &mut out,
        commits.iter().map(|c| MinedCommit {
            id: &c.id,
            ts: c.timestamp,
            files: &c.files,
            stats: miner::extract_diff_stats(c),
            js_files: miner::list_added_js_files(c, &cfg).into_iter().map(|f| f.path).collect(),
        }),
    )
}

pub fn classify(ctx: &Context, a: ClassifyArgs) -> Result<()> {
    let target = Target::resolve(ctx)?;
    let sec = &ctx.config.classify;
    let commits = load_commits(&required(a.commits, &sec.commits, "commits")?, &target)?;
    let mut cfg = ClassifierConfig { miner: target.profile.miner_config(), ..ClassifierConfig::default() };
    if let Some(t) = a.threshold.or(sec.threshold) {
        if !(0.0..=1.0).contains(&t) {
            return Err(UsageError(format!("--threshold must be within [0, 1], got {t}")).into());
        }
        cfg.threshold = t;
    }
    if let Some(k) = a.keywords.or(sec.keywords.clone()) {
        cfg.keywords = classifier::parse_keywords(&read(&k)?);
    }
    let issues = match a.issues.or(sec.issues.clone()) {
        Some(p) => IssueStore::from_jsonl(&read(&p)?).with_context(|| format!("issue store {}", p.display()))?,
        None => IssueStore::new(),
    };
    let mut out = sink(a.out.or(sec.out.clone()).as_deref())?;
    write_jsonl(&mut out, commits.iter().map(|c| classifier::classify(c, &issues, &cfg)))
}

pub fn extract(ctx: &Context, a: ExtractArgs) -> Result<()> {
    let target = Target::resolve(ctx)?;
    let sec = &ctx.config.extract;
    let commits = load_commits(&required(a.commits, &sec.commits, "commits")?, &target)?;
    let out = required(a.out, &sec.out, "out")?;
    let commits = security_commits(commits, a.verdicts.or(sec.verdicts.clone()).as_deref())?;
    let rules = match a.rules.or(sec.rules.clone()) {
        Some(p) => RuleSet::from_jsonl(&read(&p)?).with_context(|| format!("rules {}", p.display()))?,
        None => RuleSet::builtin(&target.profile.name).expect("every profile has bundled rules"),
    };
    let records: Vec<_> = commits.iter().flat_map(|c| extract_pocs(c, &target.profile)).collect();
    let workers = a.workers.or(ctx.config.workers).unwrap_or(1);
    let validated = validate_all(records, &target.profile, &rules, workers, || target.executor())?;
    write_corpus(&out, &validated)?;
    let usable = validated.iter().filter(|r| matches!(r.status, PocStatus::Ok | PocStatus::RuntimeError)).count();
    log::info!("{} PoCs extracted, {usable} usable as seeds", validated.len());
    Ok(())
}

#[derive(Serialize)]
struct SelectedFunction<'a> {
    id: &'a str,
    provenance: patchforge::planner::Provenance,
}

pub fn plan(ctx: &Context, a: PlanArgs) -> Result<()> {
    let target = Target::resolve(ctx)?;
    let sec = &ctx.config.plan;
    let patches = load_commits(&required(a.commits, &sec.commits, "commits")?, &target)?;
    let patches = security_commits(patches, a.verdicts.or(sec.verdicts.clone()).as_deref())?;
    let source = a.source.or(sec.source.clone());
    let tables = (a.call_graph.or(sec.call_graph.clone()), a.function_index.or(sec.function_index.clone()));
    let (index, graph, built) = match (source, tables) {
        (Some(dir), _) => {
            let (i, g) = build_from_dir(&dir).with_context(|| format!("scanning {}", dir.display()))?;
            (i, g, true)
        }
        (None, (Some(g), Some(i))) => (FunctionIndex::from_tsv(&read(&i)?)?, CallGraph::from_tsv(&read(&g)?)?, false),
        _ => return Err(UsageError("plan needs --source or both --call-graph and --function-index".into()).into()),
    };
    let depth = a.depth.or(sec.depth).unwrap_or(DEFAULT_DEPTH);
    let changed = changed_functions(&patches, &index);
    let plan = select_functions(&graph, &changed, depth);
    let Some(out) = a.out.or(sec.out.clone()) else {
        let mut stdout = sink(None)?;
        stdout.write_all(emit_allowlist(&plan).as_bytes())?;
        return Ok(stdout.flush()?);
    };
    fs::create_dir_all(&out)?;
    fs::write(out.join("allowlist.txt"), emit_allowlist(&plan))?;
    let mut funcs = sink(Some(&out.join("functions.jsonl")))?;
    write_jsonl(&mut funcs, plan.selected.iter().map(|(id, p)| SelectedFunction { id, provenance: *p }))?;
    if built {
        fs::write(out.join("call_graph.tsv"), graph.to_tsv())?;
        fs::write(out.join("function_index.tsv"), index.to_tsv())?;
    }
    if let Some(census) = a.census.or(sec.census.clone()) {
        let files: Vec<String> = read(&census)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect();
        let stats = hot_stats(&patches, &files);
        let mut text = serde_json::to_string_pretty(&stats)?;
        text.push('\n');
        fs::write(out.join("hot_stats.json"), text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ProbeLine<'a> {
    file: &'a str,
    types: probe::TypeMap,
}

pub fn probe(ctx: &Context, a: ProbeArgs) -> Result<()> {
    let target = Target::resolve(ctx)?;
    let corpus = required(a.corpus, &ctx.config.probe.corpus, "corpus")?;
    let mut exec = target.executor()?;
    let mut lines = Vec::new();
    for (id, text) in js_files(&corpus)? {
        let ast = match js::parse(&text) {
            Ok(a) => a,
            Err(e) => {
                log::warn!("skipping {id}: {e}");
                continue;
            }
        };
        let types = probe::probe_types(&ast, exec.as_mut()).with_context(|| format!("probing {id}"))?;
        lines.push((id, types));
    }
    let mut out = sink(a.out.or(ctx.config.probe.out.clone()).as_deref())?;
    write_jsonl(&mut out, lines.into_iter().map(|(id, types)| serde_json::json!(ProbeLine { file: &id, types })))
}

pub fn fuzz(ctx: &Context, a: FuzzArgs) -> Result<()> {
    let target = Target::resolve(ctx)?;
    let sec = &ctx.config.fuzz;
    let corpus = required(a.corpus, &sec.corpus, "corpus")?;
    let out = required(a.out, &sec.out, "out")?;
    let mut cfg = CampaignConfig::new(target.profile.clone());
    if let Some(m) = &ctx.config.mutation {
        cfg.mutation = m.clone();
    }
    cfg.budget_execs = a.budget_execs.or(sec.budget_execs);
    cfg.budget_secs = a.budget_secs.or(sec.budget_secs);
    if cfg.budget_execs.is_none() && cfg.budget_secs.is_none() {
        return Err(UsageError("fuzz needs --budget-execs or --budget-secs".into()).into());
    }
    if cfg.budget_secs.is_some_and(|s| !(s.is_finite() && s >= 0.0)) {
        return Err(UsageError("--budget-secs must be a non-negative number".into()).into());
    }
    cfg.workers = a.workers.or(ctx.config.workers).unwrap_or(1);
    if cfg.workers == 0 {
        return Err(UsageError("--workers must be positive".into()).into());
    }
    cfg.rng_seed = a.rng_seed.or(sec.rng_seed).unwrap_or(0);
    cfg.stop_on_crash = a.stop_on_crash || sec.stop_on_crash.unwrap_or(false);
    cfg.out = Some(out);

    let allowlist = match a.allowlist.or(sec.allowlist.clone()) {
        None => None,
        Some(path) => {
            let names = parse_allowlist(&read(&path)?);
            match &target.fake {
                Some(fake) => Some(edges_for_functions(&fake.config().edge_functions, &names)),
                None => {
                    // Real engines are built with the allowlist, so every edge they report is in scope.
                    log::info!("{} functions allowlisted at build time", names.len());
                    None
                }
            }
        }
    };
    let seeds = js_files(&corpus)?;
    if seeds.is_empty() {
        bail!("no .js files under {}", corpus.display());
    }
    let report = run_campaign(&cfg, &seeds, allowlist, &|_| target.executor())?;
    for (id, why) in &report.rejected_seeds {
        log::warn!("seed {id} rejected: {why}");
    }
    eprintln!("{} executions, {} unique crashes, {} edges", report.execs, report.crashes.len(), report.edges_seen.len());
    Ok(())
}

pub fn report(ctx: &Context, a: ReportArgs) -> Result<()> {
    let dir = required(a.campaign, &ctx.config.report.campaign, "campaign")?;
    let path = dir.join("report.json");
    let r: CampaignReport = serde_json::from_str(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
    let mut out = sink(a.out.as_deref())?;
    out.write_all(render_report(&r).as_bytes())?;
    Ok(out.flush()?)
}

pub fn render_report(r: &CampaignReport) -> String {
    let mutants = r.queue.iter().filter(|q| q.source == SeedSource::Mutant).count();
    let mut s = String::new();
    let mut row = |k: &str, v: String| s.push_str(&format!("{k:<16}{v}\n"));
    row("execs", r.execs.to_string());
    row("edges_seen", r.edges_seen.len().to_string());
    row("queue", format!("{} ({} poc, {mutants} mutant)", r.queue.len(), r.queue.len() - mutants));
    row("unique_crashes", r.crashes.len().to_string());
    row("crash_execs", r.crash_execs.to_string());
    row("rejected_seeds", r.rejected_seeds.len().to_string());
    row("rng_seed", r.reproduction.rng_seed.to_string());
    row("config_hash", r.reproduction.config_hash.clone());
    if !r.crashes.is_empty() {
        s.push_str(&format!("\n{:<40}{:>12}{:>8}\n", "signature", "first_seen", "count"));
        for c in &r.crashes {
            s.push_str(&format!("{:<40}{:>12}{:>8}\n", c.signature.to_string(), c.first_seen, c.dedup_count));
        }
    }
    s
}
