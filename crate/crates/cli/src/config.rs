//! Pipeline configuration file (TOML). Top-level keys apply to every
//! subcommand; each subcommand reads its own table. Relative paths are
//! resolved against the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use patchforge::mutate::MutationConfig;
use serde::Deserialize;

pub const CONFIG_ENV: &str = "PATCHFORGE_CONFIG";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub profile: Option<String>,
    /// argv template overriding the profile's run command.
    pub target_command: Option<Vec<String>>,
    pub timeout_secs: Option<f64>,
    /// Rules file for the fake target.
    pub fake_rules: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub mine: MineSection,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default)]
    pub extract: ExtractSection,
    #[serde(default)]
    pub plan: PlanSection,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub fuzz: FuzzSection,
    #[serde(default)]
    pub report: ReportSection,
    pub mutation: Option<MutationConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MineSection {
    pub commits: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    pub commits: Option<PathBuf>,
    pub issues: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSection {
    pub commits: Option<PathBuf>,
    pub verdicts: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub commits: Option<PathBuf>,
    pub verdicts: Option<PathBuf>,
    pub source: Option<PathBuf>,
    pub call_graph: Option<PathBuf>,
    pub function_index: Option<PathBuf>,
    pub census: Option<PathBuf>,
    pub depth: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub corpus: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzSection {
    pub corpus: Option<PathBuf>,
    pub allowlist: Option<PathBuf>,
    pub budget_execs: Option<u64>,
    pub budget_secs: Option<f64>,
    pub rng_seed: Option<u64>,
    pub stop_on_crash: Option<bool>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub campaign: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn parse(text: &str, base: &Path) -> Result<PipelineConfig> {
        let mut cfg: PipelineConfig = toml::from_str(text)?;
        cfg.resolve(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::parse(&text, base).with_context(|| format!("config {}", path.display()))
    }

    /// Input paths that must exist when the file is loaded. Outputs are not
    /// listed.
    fn inputs(&self) -> Vec<&Path> {
        let all = [
            &self.fake_rules,
            &self.mine.commits,
            &self.classify.commits,
            &self.classify.issues,
            &self.classify.keywords,
            &self.extract.commits,
            &self.extract.verdicts,
            &self.extract.rules,
            &self.plan.commits,
            &self.plan.verdicts,
            &self.plan.source,
            &self.plan.call_graph,
            &self.plan.function_index,
            &self.plan.census,
            &self.probe.corpus,
            &self.fuzz.corpus,
            &self.fuzz.allowlist,
            &self.report.campaign,
        ];
        all.into_iter().flatten().map(PathBuf::as_path).collect()
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        for p in [
            &mut self.fake_rules,
            &mut self.mine.commits,
            &mut self.mine.out,
            &mut self.classify.commits,
            &mut self.classify.issues,
            &mut self.classify.keywords,
            &mut self.classify.out,
            &mut self.extract.commits,
            &mut self.extract.verdicts,
            &mut self.extract.rules,
            &mut self.extract.out,
            &mut self.plan.commits,
            &mut self.plan.verdicts,
            &mut self.plan.source,
            &mut self.plan.call_graph,
            &mut self.plan.function_index,
            &mut self.plan.census,
            &mut self.plan.out,
            &mut self.probe.corpus,
            &mut self.probe.out,
            &mut self.fuzz.corpus,
            &mut self.fuzz.allowlist,
            &mut self.fuzz.out,
            &mut self.report.campaign,
        ] {
            fix(p);
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.classify.threshold {
            if !(0.0..=1.0).contains(&t) {
                bail!("classify.threshold must be within [0, 1], got {t}");
            }
        }
        if let Some(m) = &self.mutation {
            m.validate()?;
        }
        for p in self.inputs() {
            if !p.exists() {
                bail!("{} does not exist", p.display());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("c.jsonl"), "").unwrap();
        let cfg = PipelineConfig::parse(
            "profile = \"fake\"\n[classify]\ncommits = \"c.jsonl\"\nthreshold = 0.5\n[mutation]\np_low = 0.7\n",
            dir.path(),
        )
        .unwrap();
        assert_eq!(cfg.profile.as_deref(), Some("fake"));
        assert_eq!(cfg.classify.commits, Some(dir.path().join("c.jsonl")));
        assert_eq!(cfg.mutation.unwrap().p_low, 0.7);
    }

    #[test]
    fn rejects_bad_values() {
        let base = Path::new(".");
        assert!(PipelineConfig::parse("[classify]\nthreshold = 1.5\n", base).is_err());
        assert!(PipelineConfig::parse("[classify]\ncommits = \"/no/such/file\"\n", base).is_err());
        assert!(PipelineConfig::parse("[fuzz]\nbogus = 1\n", base).is_err());
    }
}
