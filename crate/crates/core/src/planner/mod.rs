//! Selective instrumentation planning: which engine functions to cover,
//! given a call graph and the functions security patches touched.

pub mod extract;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::Direction;
use serde::{Deserialize, Serialize};

use crate::miner::{Commit, LineTag};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct PlanError {
    pub line: usize,
    pub message: String,
}

fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// Directed caller -> callee graph over `path::name` identifiers.
#[derive(Debug, Clone, Default)]
pub struct CallGraph {
    graph: DiGraph<String, ()>,
    ids: HashMap<String, NodeIndex>,
}

impl CallGraph {
    pub fn new() -> Self {
        CallGraph::default()
    }

    pub fn add_node(&mut self, id: &str) -> NodeIndex {
        if let Some(&n) = self.ids.get(id) {
            return n;
        }
        let n = self.graph.add_node(id.to_string());
        self.ids.insert(id.to_string(), n);
        n
    }

    /// Adds `caller -> callee`; repeated edges are kept once.
    pub fn add_edge(&mut self, caller: &str, callee: &str) {
        let (a, b) = (self.add_node(caller), self.add_node(callee));
        self.graph.update_edge(a, b, ());
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids.contains_key(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.graph.node_weights().map(String::as_str)
    }

    /// Sorted (caller, callee) pairs.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        let mut e: Vec<(&str, &str)> = self
            .graph
            .edge_indices()
            .filter_map(|e| self.graph.edge_endpoints(e))
            .map(|(a, b)| (self.graph[a].as_str(), self.graph[b].as_str()))
            .collect();
        e.sort_unstable();
        e
    }

    fn neighbors(&self, id: &str, dir: Direction) -> Vec<&str> {
        let Some(&n) = self.ids.get(id) else { return Vec::new() };
        let mut v: Vec<&str> = self.graph.neighbors_directed(n, dir).map(|m| self.graph[m].as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn callers(&self, id: &str) -> Vec<&str> {
        self.neighbors(id, Direction::Incoming)
    }

    pub fn callees(&self, id: &str) -> Vec<&str> {
        self.neighbors(id, Direction::Outgoing)
    }

    /// Reads `caller<TAB>callee` lines; `#` lines and blank lines are skipped.
    pub fn from_tsv(text: &str) -> Result<CallGraph, PlanError> {
        let mut g = CallGraph::new();
        for (line, l) in records(text) {
            match l.split('\t').collect::<Vec<_>>().as_slice() {
                [a, b] if !a.trim().is_empty() && !b.trim().is_empty() => g.add_edge(a.trim(), b.trim()),
                _ => return Err(PlanError { line, message: format!("expected caller<TAB>callee, got {l:?}") }),
            }
        }
        Ok(g)
    }

    pub fn to_tsv(&self) -> String {
        self.edges().into_iter().map(|(a, b)| format!("{a}\t{b}\n")).collect()
    }
}

/// A function's line span, 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSpan {
    pub name: String,
    pub start: u32,
    pub end: u32,
}

/// Per-file function spans, sorted and non-overlapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunctionIndex {
    files: BTreeMap<String, Vec<FunctionSpan>>,
}

impl FunctionIndex {
    /// Builds an index, rejecting inverted or overlapping spans.
    pub fn new(entries: impl IntoIterator<Item = (String, FunctionSpan)>) -> Result<FunctionIndex, String> {
        let mut files: BTreeMap<String, Vec<FunctionSpan>> = BTreeMap::new();
        for (path, span) in entries {
            if span.start == 0 || span.end < span.start {
                return Err(format!("{path}::{}: bad span {}-{}", span.name, span.start, span.end));
            }
            files.entry(path).or_default().push(span);
        }
        for (path, spans) in &mut files {
            spans.sort_by_key(|s| (s.start, s.end));
            if let Some(w) = spans.windows(2).find(|w| w[1].start <= w[0].end) {
                return Err(format!("{path}: {} overlaps {}", w[0].name, w[1].name));
            }
        }
        Ok(FunctionIndex { files })
    }

    /// Reads `path<TAB>name<TAB>start<TAB>end` lines.
    pub fn from_tsv(text: &str) -> Result<FunctionIndex, PlanError> {
        let mut entries = Vec::new();
        let mut last = 0;
        for (line, l) in records(text) {
            last = line;
            let bad = || PlanError { line, message: format!("expected path<TAB>name<TAB>start<TAB>end, got {l:?}") };
            let [path, name, start, end] = l.split('\t').collect::<Vec<_>>()[..] else { return Err(bad()) };
            let (Ok(start), Ok(end)) = (start.trim().parse(), end.trim().parse()) else { return Err(bad()) };
            if path.is_empty() || name.is_empty() {
                return Err(bad());
            }
            entries.push((path.to_string(), FunctionSpan { name: name.to_string(), start, end }));
        }
        FunctionIndex::new(entries).map_err(|message| PlanError { line: last, message })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (path, spans) in &self.files {
            for s in spans {
                out.push_str(&format!("{path}\t{}\t{}\t{}\n", s.name, s.start, s.end));
            }
        }
        out
    }

    pub fn covers(&self, path: &str) -> bool {
        self.files.contains_key(path)
    }

    pub fn spans(&self, path: &str) -> &[FunctionSpan] {
        self.files.get(path).map_or(&[], Vec::as_slice)
    }

    /// `path::name` of the function containing `line`, if any.
    pub fn function_at(&self, path: &str, line: u32) -> Option<String> {
        let spans = self.spans(path);
        let i = spans.partition_point(|s| s.end < line);
        spans.get(i).filter(|s| s.start <= line).map(|s| format!("{path}::{}", s.name))
    }

    pub fn len(&self) -> usize {
        self.files.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Functions containing an added line (new numbering) or a removed line
/// (old numbering) of any hunk.
pub fn changed_functions(patches: &[Commit], index: &FunctionIndex) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut warned = BTreeSet::new();
    for c in patches {
        for h in &c.hunks {
            if !index.covers(&h.path) {
                if warned.insert(h.path.clone()) {
                    log::warn!("no function index for {}", h.path);
                }
                continue;
            }
            for (old, new, (tag, _)) in h.numbered_lines() {
                let line = match tag {
                    LineTag::Added => new,
                    LineTag::Removed => old,
                    LineTag::Context => None,
                };
                if let Some(f) = line.and_then(|l| index.function_at(&h.path, l)) {
                    out.insert(f);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Changed,
    Caller,
    Callee,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstrumentationPlan {
    pub selected: BTreeMap<String, Provenance>,
    pub depth: usize,
}

impl InstrumentationPlan {
    pub fn contains(&self, id: &str) -> bool {
        self.selected.contains_key(id)
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.selected.keys().map(String::as_str).collect()
    }
}

/// Changed functions plus everything within `depth` call edges of them,
/// ignoring edge direction. A node first reached through an incoming edge
/// is a caller, through an outgoing edge a callee.
pub fn select_functions(g: &CallGraph, changed: &BTreeSet<String>, depth: usize) -> InstrumentationPlan {
    let mut selected: BTreeMap<String, Provenance> = changed.iter().map(|c| (c.clone(), Provenance::Changed)).collect();
    let mut frontier: Vec<String> = changed.iter().cloned().collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for id in &frontier {
            for (dir, prov) in [(Direction::Incoming, Provenance::Caller), (Direction::Outgoing, Provenance::Callee)] {
                for n in g.neighbors(id, dir) {
                    if !selected.contains_key(n) {
                        selected.insert(n.to_string(), prov);
                        next.push(n.to_string());
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        frontier = next;
    }
    InstrumentationPlan { selected, depth }
}

/// Bare function name of a `path::name` identifier.
pub fn function_name(id: &str) -> &str {
    id.rsplit_once("::").map_or(id, |(_, n)| n)
}

/// One `fun: <name>` line per selected function, sorted. Functions that
/// share a name in different files share a line.
pub fn emit_allowlist(plan: &InstrumentationPlan) -> String {
    let names: BTreeSet<&str> = plan.selected.keys().map(|id| function_name(id)).collect();
    names.into_iter().map(|n| format!("fun: {n}\n")).collect()
}

/// Function names of an allowlist; other lines are ignored.
pub fn parse_allowlist(text: &str) -> BTreeSet<String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("fun:"))
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotStats {
    /// Census file -> number of patches touching it (touched files only).
    pub times_patched: BTreeMap<String, usize>,
    pub total_files: usize,
    pub changed_files: usize,
    pub ratio: f64,
    pub average_patched_times: f64,
}

/// How concentrated security patches are. A patch touches a file if it lists
/// it or has a hunk in it; each patch counts once per file. Files outside the
/// census are ignored.
pub fn hot_stats(patches: &[Commit], census: &[String]) -> HotStats {
    let census: BTreeSet<&str> = census.iter().map(String::as_str).collect();
    let mut times: BTreeMap<String, usize> = BTreeMap::new();
    for c in patches {
        let touched: BTreeSet<&str> =
            c.files.iter().map(|f| f.path.as_str()).chain(c.hunks.iter().map(|h| h.path.as_str())).collect();
        for p in touched.into_iter().filter(|p| census.contains(p)) {
            *times.entry(p.to_string()).or_default() += 1;
        }
    }
    let changed = times.len();
    let total: usize = times.values().sum();
    HotStats {
        total_files: census.len(),
        changed_files: changed,
        ratio: if census.is_empty() { 0.0 } else { changed as f64 / census.len() as f64 },
        average_patched_times: if changed == 0 { 0.0 } else { total as f64 / changed as f64 },
        times_patched: times,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::{ChangeKind, FileChange, Hunk};

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    fn commit(paths: &[&str], hunks: Vec<Hunk>) -> Commit {
        Commit {
            id: "c".into(),
            timestamp: 0,
            message: String::new(),
            files: paths
                .iter()
                .map(|p| FileChange { path: p.to_string(), kind: ChangeKind::Modified, is_test_dir: false, extension: "c".into() })
                .collect(),
            hunks,
        }
    }

    fn hunk(path: &str, new_start: u32, added: u32) -> Hunk {
        Hunk {
            path: path.into(),
            old: (new_start, 0),
            new: (new_start, added),
            lines: (0..added).map(|i| (LineTag::Added, format!("x{i};"))).collect(),
        }
    }

    #[test]
    fn call_graph_loading() {
        let g = CallGraph::from_tsv("A\tB\nB\tC\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(CallGraph::from_tsv("").unwrap().node_count(), 0);
        let g = CallGraph::from_tsv("# c\nA\tB\n\nA\tB\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(CallGraph::from_tsv("A\tB\nA B\n").unwrap_err().line, 2);
        let g = CallGraph::from_tsv("A\tA\nA\tA\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 1));
    }

    #[test]
    fn chain_selection() {
        let g = CallGraph::from_tsv("A\tB\nB\tC\nC\tD\n").unwrap();
        let p = select_functions(&g, &set(&["B"]), 1);
        assert_eq!(p.ids(), ["A", "B", "C"].into());
        assert_eq!(p.selected["A"], Provenance::Caller);
        assert_eq!(p.selected["C"], Provenance::Callee);
        assert_eq!(p.selected["B"], Provenance::Changed);
        assert_eq!(select_functions(&g, &set(&["B"]), 2).ids().len(), 4);
        assert_eq!(select_functions(&g, &set(&["B"]), 0).ids(), ["B"].into());
    }

    #[test]
    fn isolated_and_unknown_changed_nodes() {
        let mut g = CallGraph::from_tsv("A\tB\n").unwrap();
        g.add_node("Z");
        assert_eq!(select_functions(&g, &set(&["Z"]), 3).ids(), ["Z"].into());
        assert_eq!(select_functions(&g, &set(&["nowhere"]), 1).ids(), ["nowhere"].into());
    }

    #[test]
    fn function_index_lookup() {
        let idx = FunctionIndex::from_tsv("a.c\tfoo\t5\t20\na.c\tbar\t22\t30\n").unwrap();
        assert_eq!(idx.function_at("a.c", 10).as_deref(), Some("a.c::foo"));
        assert_eq!(idx.function_at("a.c", 21), None);
        assert_eq!(idx.function_at("b.c", 10), None);
        assert!(FunctionIndex::from_tsv("a.c\tfoo\t5\t20\na.c\tbar\t20\t30\n").is_err());
        assert!(FunctionIndex::from_tsv("a.c\tfoo\tfive\t20\n").is_err());
        assert_eq!(FunctionIndex::from_tsv(&idx.to_tsv()).unwrap(), idx);
    }

    #[test]
    fn changed_function_mapping() {
        let idx = FunctionIndex::from_tsv("a.c\tfoo\t5\t20\nb.c\tbaz\t1\t3\n").unwrap();
        let inside = commit(&["a.c"], vec![hunk("a.c", 10, 3)]);
        assert_eq!(changed_functions(std::slice::from_ref(&inside), &idx), set(&["a.c::foo"]));
        let outside = commit(&["a.c"], vec![hunk("a.c", 1, 2)]);
        assert!(changed_functions(&[outside], &idx).is_empty());
        let other = commit(&["b.c"], vec![hunk("b.c", 2, 1)]);
        assert_eq!(changed_functions(&[inside, other], &idx), set(&["a.c::foo", "b.c::baz"]));
        let uncovered = commit(&["c.c"], vec![hunk("c.c", 2, 1)]);
        assert!(changed_functions(&[uncovered], &idx).is_empty());
    }

    #[test]
    fn removed_lines_use_old_numbers() {
        let idx = FunctionIndex::from_tsv("a.c\tfoo\t5\t6\na.c\tbar\t40\t50\n").unwrap();
        let h = Hunk { path: "a.c".into(), old: (5, 1), new: (45, 0), lines: vec![(LineTag::Removed, "y;".into())] };
        assert_eq!(changed_functions(&[commit(&["a.c"], vec![h])], &idx), set(&["a.c::foo"]));
    }

    #[test]
    fn allowlist_format() {
        let plan = |ids: &[&str]| InstrumentationPlan {
            selected: ids.iter().map(|i| (i.to_string(), Provenance::Changed)).collect(),
            depth: 1,
        };
        assert_eq!(emit_allowlist(&plan(&["B::f"])), "fun: f\n");
        assert_eq!(emit_allowlist(&plan(&[])), "");
        assert_eq!(emit_allowlist(&plan(&["x::b", "y::a"])), "fun: a\nfun: b\n");
        assert_eq!(parse_allowlist("fun: a\n# c\nfun: b\n"), set(&["a", "b"]));
    }

    #[test]
    fn hot_stats_arithmetic() {
        let census: Vec<String> = (0..10).map(|i| format!("f{i}.c")).collect();
        let s = hot_stats(&[commit(&["f0.c"], vec![]), commit(&["f1.c"], vec![])], &census);
        assert_eq!((s.changed_files, s.ratio, s.average_patched_times), (2, 0.2, 1.0));
        let s = hot_stats(&[], &census);
        assert_eq!((s.ratio, s.average_patched_times), (0.0, 0.0));
        let patches = [
            commit(&["f0.c", "f1.c"], vec![]),
            commit(&["f0.c", "f2.c"], vec![hunk("f0.c", 1, 1)]),
            commit(&["f0.c", "docs/x.md"], vec![]),
        ];
        let s = hot_stats(&patches, &census);
        assert_eq!(s.times_patched["f0.c"], 3);
        assert_eq!(s.changed_files, 3);
        assert_eq!(s.average_patched_times, 5.0 / 3.0);
    }
}
