//! Crash deduplication by (signal, allowlisted edge suffix).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::coverage::{CoverageMap, ExecResult};
use crate::extractor::Classification;

/// Edges kept in a signature.
pub const SIGNATURE_EDGES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CrashSignature {
    pub signal: i32,
    /// The highest allowlisted edge ids of the run, ascending.
    pub edges: Vec<u32>,
}

impl CrashSignature {
    pub fn of(r: &ExecResult, cov: &CoverageMap) -> Option<CrashSignature> {
        if r.classification != Classification::Crash {
            return None;
        }
        let all: Vec<u32> = cov.allowlisted(&r.edges).collect();
        let edges = all[all.len().saturating_sub(SIGNATURE_EDGES)..].to_vec();
        Some(CrashSignature { signal: r.term_signal.unwrap_or(0), edges })
    }
}

/// Directory-safe rendering, e.g. `sig11-60-99-100`.
impl fmt::Display for CrashSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sig{}", self.signal)?;
        for e in &self.edges {
            write!(f, "-{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrashRecord {
    pub signature: CrashSignature,
    pub sample: String,
    /// Execution number of the first occurrence.
    pub first_seen: u64,
    pub dedup_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triage {
    NotACrash,
    New,
    Duplicate,
}

#[derive(Debug, Clone, Default)]
pub struct CrashTable {
    records: BTreeMap<CrashSignature, CrashRecord>,
}

impl CrashTable {
    pub fn new() -> Self {
        CrashTable::default()
    }

    pub fn triage(&mut self, r: &ExecResult, sample: &str, iteration: u64, cov: &CoverageMap) -> Triage {
        let Some(sig) = CrashSignature::of(r, cov) else { return Triage::NotACrash };
        match self.records.get_mut(&sig) {
            Some(rec) => {
                rec.dedup_count += 1;
                Triage::Duplicate
            }
            None => {
                let rec = CrashRecord { signature: sig.clone(), sample: sample.to_string(), first_seen: iteration, dedup_count: 1 };
                self.records.insert(sig, rec);
                Triage::New
            }
        }
    }

    pub fn get(&self, sig: &CrashSignature) -> Option<&CrashRecord> {
        self.records.get(sig)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records ordered by signature.
    pub fn records(&self) -> impl Iterator<Item = &CrashRecord> {
        self.records.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crash(signal: Option<i32>, edges: &[u32], class: Classification) -> ExecResult {
        ExecResult {
            exit_code: None,
            term_signal: signal,
            edges: edges.iter().copied().collect(),
            wall_time_ms: 0,
            classification: class,
        }
    }

    #[test]
    fn identical_crashes_share_a_record() {
        let cov = CoverageMap::new(None);
        let mut t = CrashTable::new();
        let r = crash(Some(11), &[1, 2], Classification::Crash);
        assert_eq!(t.triage(&r, "a", 1, &cov), Triage::New);
        assert_eq!(t.triage(&r, "b", 2, &cov), Triage::Duplicate);
        assert_eq!(t.len(), 1);
        let rec = t.records().next().unwrap();
        assert_eq!((rec.dedup_count, rec.first_seen, rec.sample.as_str()), (2, 1, "a"));
    }

    #[test]
    fn different_edges_make_different_records() {
        let cov = CoverageMap::new(None);
        let mut t = CrashTable::new();
        t.triage(&crash(Some(11), &[1], Classification::Crash), "a", 1, &cov);
        t.triage(&crash(Some(11), &[2], Classification::Crash), "b", 2, &cov);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn timeouts_are_not_crashes() {
        let mut t = CrashTable::new();
        let r = crash(None, &[1], Classification::Timeout);
        assert_eq!(t.triage(&r, "a", 1, &CoverageMap::new(None)), Triage::NotACrash);
        assert!(t.is_empty());
    }

    #[test]
    fn signature_keeps_highest_allowlisted_edges() {
        let cov = CoverageMap::new(Some((0..100).collect()));
        let r = crash(Some(6), &(0..20).chain([500]).collect::<Vec<_>>(), Classification::Crash);
        let s = CrashSignature::of(&r, &cov).unwrap();
        assert_eq!(s.edges, (12..20).collect::<Vec<_>>());
        assert_eq!(s.to_string(), "sig6-12-13-14-15-16-17-18-19");
    }
}
