//! Campaign loop: one coordinator owns the queue, coverage map and crash
//! table; workers mutate and execute. With a single worker exactly one job is
//! in flight, so a run is a pure function of its inputs and rng seed.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, unbounded};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::coverage::{CoverageMap, ExecResult};
use super::queue::{Queue, Seed, SeedSource};
use super::triage::{CrashRecord, CrashTable, Triage};
use crate::exec::{ExecError, Executor, RunOutput};
use crate::extractor::{Classification, EngineProfile};
use crate::js::{self, Ast};
use crate::mutate::{self, job_rng, ConfigError, DonorPool, MutationConfig, MutationRecord};

pub const DEFAULT_STATS_INTERVAL: f64 = 10.0;

fn default_workers() -> usize {
    1
}

fn default_stats_interval() -> f64 {
    DEFAULT_STATS_INTERVAL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub profile: EngineProfile,
    #[serde(default)]
    pub mutation: MutationConfig,
    #[serde(default)]
    pub budget_execs: Option<u64>,
    #[serde(default)]
    pub budget_secs: Option<f64>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub rng_seed: u64,
    /// End the campaign at the first unique crash.
    #[serde(default)]
    pub stop_on_crash: bool,
    #[serde(default = "default_stats_interval")]
    pub stats_interval_secs: f64,
    /// Output directory; nothing is written when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn new(profile: EngineProfile) -> Self {
        CampaignConfig {
            profile,
            mutation: MutationConfig::default(),
            budget_execs: None,
            budget_secs: None,
            workers: 1,
            rng_seed: 0,
            stop_on_crash: false,
            stats_interval_secs: DEFAULT_STATS_INTERVAL,
            out: None,
        }
    }

    /// sha256 of the configuration, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("no valid seeds ({} rejected)", rejected.len())]
    NoValidSeeds { rejected: Vec<(String, String)> },
    #[error("campaign needs an execution or time budget")]
    NoBudget,
    #[error("worker count must be positive")]
    NoWorkers,
    #[error(transparent)]
    Mutation(#[from] ConfigError),
    #[error("target failed on {sample_id}: {source}")]
    Target { sample_id: String, source: ExecError },
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSample {
    pub time: f64,
    pub execs: u64,
    pub edges_seen: usize,
    pub crashes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub id: String,
    pub source: SeedSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub coverage_new: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<MutationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reproduction {
    pub rng_seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub execs: u64,
    /// Executions classified as crashes, duplicates included.
    pub crash_execs: u64,
    pub crashes: Vec<CrashRecord>,
    pub queue: Vec<QueueEntry>,
    pub edges_seen: Vec<u32>,
    /// Periodic samples plus one per coverage increase.
    pub coverage_curve: Vec<StatsSample>,
    pub rejected_seeds: Vec<(String, String)>,
    pub reproduction: Reproduction,
    pub elapsed_secs: f64,
}

impl CampaignReport {
    /// The report with the coverage curve and elapsed time cleared.
    pub fn without_timings(&self) -> CampaignReport {
        CampaignReport { coverage_curve: Vec::new(), elapsed_secs: 0.0, ..self.clone() }
    }

    /// Digest of everything but timings.
    pub fn fingerprint(&self) -> String {
        let stable = serde_json::to_string(&self.without_timings()).expect("report serializes");
        hex::encode(Sha256::digest(stable.as_bytes()))
    }
}

/// Builds one executor per worker; worker 0 also runs the seed dry runs.
pub type ExecutorFactory<'a> = dyn Fn(usize) -> Result<Box<dyn Executor>, ExecError> + Sync + 'a;

struct Job {
    iteration: u64,
    parent: String,
    ast: Arc<Ast>,
}

struct Done {
    iteration: u64,
    parent: String,
    mutant: Ast,
    text: String,
    record: MutationRecord,
    output: Result<RunOutput, ExecError>,
}

struct Output {
    root: PathBuf,
    stats: File,
    manifest: File,
}

impl Output {
    fn create(root: &Path) -> io::Result<Output> {
        fs::create_dir_all(root.join("queue"))?;
        fs::create_dir_all(root.join("crashes"))?;
        let open = |name: &str| OpenOptions::new().create(true).write(true).truncate(true).open(root.join(name));
        Ok(Output { root: root.to_path_buf(), stats: open("stats.jsonl")?, manifest: open("queue.jsonl")? })
    }

    fn seed(&mut self, entry: &QueueEntry, text: &str) -> io::Result<()> {
        fs::write(self.root.join("queue").join(format!("{}.js", entry.id)), text)?;
        writeln!(self.manifest, "{}", serde_json::to_string(entry).expect("entry serializes"))
    }

    fn crash(&self, rec: &CrashRecord) -> io::Result<()> {
        let dir = self.root.join("crashes").join(rec.signature.to_string());
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("sample.js"), &rec.sample)
    }

    fn stats(&mut self, s: &StatsSample) -> io::Result<()> {
        writeln!(self.stats, "{}", serde_json::to_string(s).expect("sample serializes"))
    }

    fn finish(&self, report: &CampaignReport) -> io::Result<()> {
        for rec in &report.crashes {
            let dir = self.root.join("crashes").join(rec.signature.to_string());
            fs::write(dir.join("record.json"), serde_json::to_string_pretty(rec).expect("record serializes"))?;
        }
        let mut curve = File::create(self.root.join("coverage.jsonl"))?;
        for st in &report.coverage_curve {
            writeln!(curve, "{}", serde_json::to_string(st).expect("sample serializes"))?;
        }
        let mut stable = serde_json::to_string_pretty(&report.without_timings()).expect("report serializes");
        stable.push('\n');
        fs::write(self.root.join("report.json"), stable)
    }
}

fn file_safe(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect()
}

/// Runs a campaign over `seeds` (id, text). Seeds that fail to parse or whose
/// dry run is not ok or a runtime error are rejected; `allowlist` restricts
/// which edges count as coverage.
pub fn run_campaign(
    cfg: &CampaignConfig,
    seeds: &[(String, String)],
    allowlist: Option<BTreeSet<u32>>,
    executors: &ExecutorFactory<'_>,
) -> Result<CampaignReport, CampaignError> {
    cfg.mutation.validate()?;
    if cfg.budget_execs.is_none() && cfg.budget_secs.is_none() {
        return Err(CampaignError::NoBudget);
    }
    if cfg.workers == 0 {
        return Err(CampaignError::NoWorkers);
    }
    let start = Instant::now();
    let mut out = cfg.out.as_deref().map(Output::create).transpose()?;
    let mut execs: Vec<Box<dyn Executor>> =
        (0..cfg.workers).map(executors).collect::<Result<_, _>>().map_err(|source| CampaignError::Target { sample_id: "<startup>".into(), source })?;

    let mut cov = CoverageMap::new(allowlist);
    let mut queue = Queue::new();
    let mut entries = Vec::new();
    let mut pool = DonorPool::new();
    let mut rejected = Vec::new();
    for (id, text) in seeds {
        let ast = match js::parse(text) {
            Ok(a) => a,
            Err(e) => {
                rejected.push((id.clone(), format!("unparsable: {e}")));
                continue;
            }
        };
        let run = execs[0].run(text).map_err(|source| CampaignError::Target { sample_id: id.clone(), source })?;
        let r = ExecResult::from_output(&run, &cfg.profile);
        if !matches!(r.classification, Classification::Ok | Classification::RuntimeError) {
            rejected.push((id.clone(), r.classification.as_str().to_string()));
            continue;
        }
        let fresh = cov.observe(&r);
        let entry = QueueEntry { id: file_safe(id), source: SeedSource::Poc, parent: None, coverage_new: fresh.iter().copied().collect(), mutation: None };
        if let Some(o) = out.as_mut() {
            o.seed(&entry, text)?;
        }
        pool.add(&entry.id, ast.clone());
        queue.push(Seed::new(&entry.id, SeedSource::Poc, text.clone(), ast, None, fresh));
        entries.push(entry);
    }
    if queue.is_empty() {
        return Err(CampaignError::NoValidSeeds { rejected });
    }

    let mut crashes = CrashTable::new();
    let mut curve = Vec::new();
    let mut executed = 0u64;
    let mut crash_execs = 0u64;
    let mut failure = None;
    let budget_execs = cfg.budget_execs.unwrap_or(u64::MAX);
    let budget_time = cfg.budget_secs.map(Duration::from_secs_f64);
    let interval = Duration::from_secs_f64(cfg.stats_interval_secs.max(0.001));
    let mut next_stats = interval;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let pool = Arc::new(pool);

    let sample = |executed: u64, cov: &CoverageMap, crashes: &CrashTable| StatsSample {
        time: start.elapsed().as_secs_f64(),
        execs: executed,
        edges_seen: cov.seen().len(),
        crashes: crashes.len(),
    };

    thread::scope(|s| -> Result<(), CampaignError> {
        let (job_tx, job_rx) = bounded::<Job>(cfg.workers);
        let (done_tx, done_rx) = unbounded::<Done>();
        for (worker, mut exec) in execs.drain(..).enumerate() {
            let (job_rx, done_tx, pool) = (job_rx.clone(), done_tx.clone(), Arc::clone(&pool));
            let mcfg = &cfg.mutation;
            let rng_seed = cfg.rng_seed;
            s.spawn(move || {
                for job in job_rx {
                    let mut rng = job_rng(rng_seed, worker as u64, job.iteration);
                    let seed = mutate::Seed { id: &job.parent, ast: &job.ast, types: None };
                    let (mutant, record) = mutate::mutate(seed, &pool, mcfg, &mut rng);
                    let text = js::print(&mutant);
                    let output = exec.run(&text);
                    let done = Done { iteration: job.iteration, parent: job.parent, mutant, text, record, output };
                    if done_tx.send(done).is_err() {
                        break;
                    }
                }
            });
        }
        drop(done_tx);

        let mut dispatched = 0u64;
        let mut in_flight = 0usize;
        let mut stop = false;
        loop {
            while !stop && in_flight < cfg.workers && dispatched < budget_execs && budget_time.is_none_or(|t| start.elapsed() < t) {
                let i = queue.schedule_next(&mut rng).expect("queue is never empty");
                let seed = queue.get(i);
                dispatched += 1;
                job_tx.send(Job { iteration: dispatched, parent: seed.id.clone(), ast: Arc::clone(&seed.ast) }).expect("workers alive");
                in_flight += 1;
            }
            if in_flight == 0 {
                break;
            }
            let done = done_rx.recv().expect("workers alive while jobs are in flight");
            in_flight -= 1;
            let run = match done.output {
                Ok(run) => run,
                Err(source) => {
                    failure.get_or_insert(CampaignError::Target { sample_id: format!("iteration {}", done.iteration), source });
                    stop = true;
                    continue;
                }
            };
            executed += 1;
            let r = ExecResult::from_output(&run, &cfg.profile);
            if r.classification == Classification::Crash {
                crash_execs += 1;
                if crashes.triage(&r, &done.text, done.iteration, &cov) == Triage::New {
                    let sig = super::triage::CrashSignature::of(&r, &cov).expect("crash");
                    log::info!("new crash {sig} at execution {}", done.iteration);
                    if let Some(o) = out.as_ref() {
                        o.crash(crashes.get(&sig).expect("just recorded"))?;
                    }
                    stop |= cfg.stop_on_crash;
                }
            }
            let interesting = cov.is_interesting(&r);
            let fresh = cov.observe(&r);
            if interesting && matches!(r.classification, Classification::Ok | Classification::RuntimeError) {
                let entry = QueueEntry {
                    id: format!("id-{:06}", done.iteration),
                    source: SeedSource::Mutant,
                    parent: Some(done.parent.clone()),
                    coverage_new: fresh.iter().copied().collect(),
                    mutation: Some(done.record),
                };
                if let Some(o) = out.as_mut() {
                    o.seed(&entry, &done.text)?;
                }
                queue.push(Seed::new(&entry.id, SeedSource::Mutant, done.text, done.mutant, Some(done.parent), fresh.clone()));
                entries.push(entry);
            }
            if !fresh.is_empty() {
                curve.push(sample(executed, &cov, &crashes));
            }
            if start.elapsed() >= next_stats {
                let st = sample(executed, &cov, &crashes);
                if let Some(o) = out.as_mut() {
                    o.stats(&st)?;
                }
                curve.push(st);
                next_stats += interval;
            }
        }
        Ok(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let last = sample(executed, &cov, &crashes);
    if let Some(o) = out.as_mut() {
        o.stats(&last)?;
    }
    curve.push(last);
    let report = CampaignReport {
        execs: executed,
        crash_execs,
        crashes: crashes.records().cloned().collect(),
        queue: entries,
        edges_seen: cov.seen().iter().copied().collect(),
        coverage_curve: curve,
        rejected_seeds: rejected,
        reproduction: Reproduction { rng_seed: cfg.rng_seed, config_hash: cfg.hash() },
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    if let Some(o) = out.as_ref() {
        o.finish(&report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz::fake::{FakeExecutor, FakeTarget};

    fn fake(_: usize) -> Result<Box<dyn Executor>, ExecError> {
        Ok(Box::new(FakeExecutor::new(FakeTarget::default_target())))
    }

    fn cfg(execs: u64) -> CampaignConfig {
        let mut c = CampaignConfig::new(EngineProfile::builtin("fake").unwrap());
        c.budget_execs = Some(execs);
        c
    }

    fn seeds() -> Vec<(String, String)> {
        vec![("a".into(), "var a = [1, 2];\nfor (var i = 0; i < 2; i++) {\n  a[i] = i * 2;\n}\n".into())]
    }

    #[test]
    fn zero_budget_runs_nothing() {
        let r = run_campaign(&cfg(0), &seeds(), None, &fake).unwrap();
        assert_eq!(r.execs, 0);
        assert_eq!(r.queue.len(), 1);
        assert!(r.crashes.is_empty());
    }

    #[test]
    fn rejects_campaign_without_valid_seeds() {
        let bad = vec![("x".to_string(), "var = ;".to_string()), ("y".to_string(), "undefinedThing();".to_string())];
        match run_campaign(&cfg(10), &bad, None, &fake) {
            Err(CampaignError::NoValidSeeds { rejected }) => assert_eq!(rejected.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn requires_a_budget() {
        let mut c = cfg(1);
        c.budget_execs = None;
        assert!(matches!(run_campaign(&c, &seeds(), None, &fake), Err(CampaignError::NoBudget)));
    }

    #[test]
    fn executor_failure_aborts() {
        struct Broken;
        impl Executor for Broken {
            fn run(&mut self, _: &str) -> Result<RunOutput, ExecError> {
                Err(ExecError::EmptyCommand)
            }
        }
        let broken = |_: usize| -> Result<Box<dyn Executor>, ExecError> { Ok(Box::new(Broken)) };
        assert!(matches!(run_campaign(&cfg(5), &seeds(), None, &broken), Err(CampaignError::Target { .. })));
    }

    #[test]
    fn crash_counts_are_preserved() {
        let r = run_campaign(&cfg(2000), &seeds(), None, &fake).unwrap();
        assert_eq!(r.execs, 2000);
        assert_eq!(r.crashes.iter().map(|c| c.dedup_count).sum::<u64>(), r.crash_execs);
        for w in r.coverage_curve.windows(2) {
            assert!(w[0].edges_seen <= w[1].edges_seen);
        }
    }

    #[test]
    fn single_worker_is_reproducible() {
        let a = run_campaign(&cfg(500), &seeds(), None, &fake).unwrap();
        let b = run_campaign(&cfg(500), &seeds(), None, &fake).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let mut c = cfg(500);
        c.rng_seed = 1;
        assert_ne!(run_campaign(&c, &seeds(), None, &fake).unwrap().reproduction.config_hash, a.reproduction.config_hash);
    }

    #[test]
    fn parallel_workers_run_the_budget() {
        let mut c = cfg(300);
        c.workers = 4;
        let r = run_campaign(&c, &seeds(), None, &fake).unwrap();
        assert_eq!(r.execs, 300);
    }

    #[test]
    fn writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(50);
        c.out = Some(dir.path().to_path_buf());
        run_campaign(&c, &seeds(), None, &fake).unwrap();
        assert!(dir.path().join("queue/a.js").exists());
        assert!(dir.path().join("report.json").exists());
        let stats = fs::read_to_string(dir.path().join("stats.jsonl")).unwrap();
        assert!(stats.lines().last().unwrap().contains("\"execs\":50"));
    }
}
