//! Coverage bookkeeping restricted to instrumented (allowlisted) edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::exec::RunOutput;
use crate::extractor::{Classification, EngineProfile};

/// One target execution as the fuzzer sees it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecResult {
    pub exit_code: Option<i32>,
    pub term_signal: Option<i32>,
    pub edges: BTreeSet<u32>,
    pub wall_time_ms: u64,
    pub classification: Classification,
}

impl ExecResult {
    pub fn from_output(out: &RunOutput, profile: &EngineProfile) -> Self {
        ExecResult {
            exit_code: out.exit_code,
            term_signal: out.signal,
            edges: out.edges.iter().copied().collect(),
            wall_time_ms: out.wall_time.as_millis() as u64,
            classification: profile.classify(out.exit_code, out.signal, out.timed_out),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CoverageMap {
    /// None: every edge counts (the target only instruments planned code).
    allowlist: Option<BTreeSet<u32>>,
    seen: BTreeSet<u32>,
}

impl CoverageMap {
    pub fn new(allowlist: Option<BTreeSet<u32>>) -> Self {
        CoverageMap { allowlist, seen: BTreeSet::new() }
    }

    pub fn is_allowlisted(&self, edge: u32) -> bool {
        self.allowlist.as_ref().is_none_or(|a| a.contains(&edge))
    }

    pub fn allowlisted<'a>(&'a self, edges: &'a BTreeSet<u32>) -> impl Iterator<Item = u32> + 'a {
        edges.iter().copied().filter(|e| self.is_allowlisted(*e))
    }

    /// True iff the run reached an allowlisted edge not seen before.
    pub fn is_interesting(&self, r: &ExecResult) -> bool {
        self.allowlisted(&r.edges).any(|e| !self.seen.contains(&e))
    }

    /// Records a run's allowlisted edges and returns the new ones.
    pub fn observe(&mut self, r: &ExecResult) -> BTreeSet<u32> {
        let fresh: BTreeSet<u32> = self.allowlisted(&r.edges).filter(|e| !self.seen.contains(e)).collect();
        self.seen.extend(&fresh);
        fresh
    }

    pub fn seen(&self) -> &BTreeSet<u32> {
        &self.seen
    }
}

/// Edge ids that belong to any of `functions`, given an edge -> function map.
pub fn edges_for_functions(edge_functions: &BTreeMap<u32, String>, functions: &BTreeSet<String>) -> BTreeSet<u32> {
    edge_functions.iter().filter(|(_, f)| functions.contains(*f)).map(|(e, _)| *e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(edges: &[u32]) -> ExecResult {
        ExecResult {
            exit_code: Some(0),
            term_signal: None,
            edges: edges.iter().copied().collect(),
            wall_time_ms: 0,
            classification: Classification::Ok,
        }
    }

    #[test]
    fn gating() {
        let mut cov = CoverageMap::new(Some([5].into()));
        assert!(cov.is_interesting(&run(&[5])));
        assert!(!cov.is_interesting(&run(&[9])));
        assert_eq!(cov.observe(&run(&[5, 9])), [5].into());
        assert!(!cov.is_interesting(&run(&[5])));
        assert_eq!(cov.seen(), &[5].into());
    }

    #[test]
    fn no_allowlist_counts_everything() {
        let mut cov = CoverageMap::new(None);
        assert!(cov.is_interesting(&run(&[9])));
        cov.observe(&run(&[9]));
        assert!(!cov.is_interesting(&run(&[9])));
    }

    #[test]
    fn function_edges() {
        let map: BTreeMap<u32, String> = [(1, "a".to_string()), (2, "b".to_string()), (3, "a".to_string())].into();
        assert_eq!(edges_for_functions(&map, &["a".to_string()].into()), [1, 3].into());
    }
}
