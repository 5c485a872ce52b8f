//! Coverage-guided fuzzing restricted to allowlisted edges.

pub mod campaign;
pub mod coverage;
pub mod fake;
pub mod queue;
pub mod triage;

pub use campaign::{run_campaign, CampaignConfig, CampaignError, CampaignReport, ExecutorFactory};
pub use coverage::{edges_for_functions, CoverageMap, ExecResult};
pub use queue::{Queue, Seed, SeedSource};
pub use triage::{CrashRecord, CrashSignature, CrashTable, Triage};
