//! Profile and target-adapter resolution.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context as _, Result};
use patchforge::exec::{ExecError, Executor, SubprocessExecutor};
use patchforge::extractor::{EngineProfile, PROFILE_NAMES};
use patchforge::fuzz::fake::FakeTarget;

use crate::{Context, UsageError};

pub const DEFAULT_PROFILE: &str = "fake";
const FAKE_PROGRAM: &str = "fake-target";

pub struct Target {
    pub profile: EngineProfile,
    pub argv: Vec<String>,
    /// Rules of the fake target, for mapping allowlisted functions to edges.
    pub fake: Option<FakeTarget>,
}

impl Target {
    pub fn resolve(ctx: &Context) -> Result<Target> {
        let name = ctx.profile.as_deref().or(ctx.config.profile.as_deref()).unwrap_or(DEFAULT_PROFILE);
        let mut profile = EngineProfile::builtin(name)
            .ok_or_else(|| UsageError(format!("unknown profile {name:?}; expected one of {}", PROFILE_NAMES.join(", "))))?;
        if let Some(t) = ctx.config.timeout_secs {
            if !(t.is_finite() && t > 0.0) {
                return Err(UsageError(format!("timeout_secs must be positive, got {t}")).into());
            }
            profile.timeout = Duration::from_secs_f64(t);
        }
        let rules = ctx.config.fake_rules.as_deref();
        let mut argv = ctx.config.target_command.clone().unwrap_or_else(|| profile.run_command.clone());
        if argv.is_empty() {
            return Err(UsageError("target_command is empty".into()).into());
        }
        if argv[0] == FAKE_PROGRAM {
            argv[0] = sibling_fake_target().unwrap_or_else(|| FAKE_PROGRAM.into()).to_string_lossy().into_owned();
            if let Some(r) = rules {
                argv.splice(1..1, ["--rules".to_string(), r.to_string_lossy().into_owned()]);
            }
        }
        let fake = match (profile.name.as_str(), rules) {
            ("fake", Some(path)) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Some(FakeTarget::from_json(&text)?)
            }
            ("fake", None) => Some(FakeTarget::default_target()),
            _ => None,
        };
        profile.run_command = argv.clone();
        Ok(Target { profile, argv, fake })
    }

    pub fn executor(&self) -> Result<Box<dyn Executor>, ExecError> {
        Ok(Box::new(SubprocessExecutor::new(self.argv.clone(), self.profile.timeout)?))
    }
}

/// The `fake-target` binary installed next to this executable, if any.
fn sibling_fake_target() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?;
    // Test binaries live one level below the binaries they exercise.
    let found = [dir, dir.parent().unwrap_or(dir)]
        .into_iter()
        .map(|d: &Path| d.join(format!("{FAKE_PROGRAM}{}", std::env::consts::EXE_SUFFIX)))
        .find(|p| p.is_file());
    found
}
