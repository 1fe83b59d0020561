//! Directed graphs over dense node ids and their unreciprocated arc sets.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense node index in `[0, n)`.
pub type NodeId = u32;

/// Compressed sparse rows with sorted, duplicate-free neighbor lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    /// Builds from `(row, col)` pairs already sorted and deduplicated.
    fn from_sorted_pairs(n: usize, pairs: impl ExactSizeIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(pairs.len());
        for (u, v) in pairs {
            offsets[u as usize + 1] += 1;
            targets.push(v);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, targets }
    }

    /// Transpose by counting sort; rows of the result stay sorted because the
    /// source rows are visited in increasing order.
    fn transpose(&self) -> Csr {
        let n = self.rows();
        let mut offsets = vec![0usize; n + 1];
        for &v in &self.targets {
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0 as NodeId; self.targets.len()];
        for u in 0..n {
            for &v in self.row(u) {
                targets[cursor[v as usize]] = u as NodeId;
                cursor[v as usize] += 1;
            }
        }
        Csr { offsets, targets }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    #[inline]
    fn contains(&self, u: usize, v: NodeId) -> bool {
        self.row(u).binary_search(&v).is_ok()
    }

    fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.rows()).flat_map(move |u| self.row(u).iter().map(move |&v| (u as NodeId, v)))
    }
}

/// Bijection between external labels and dense ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Labels {
    /// Node `v` is labelled by its decimal id.
    Identity(usize),
    Named {
        names: Vec<String>,
        index: HashMap<String, NodeId>,
    },
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Identity(n) => *n,
            Labels::Named { names, .. } => names.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self, v: NodeId) -> Cow<'_, str> {
        match self {
            Labels::Identity(_) => Cow::Owned(v.to_string()),
            Labels::Named { names, .. } => Cow::Borrowed(&names[v as usize]),
        }
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        match self {
            Labels::Identity(n) => label.parse::<NodeId>().ok().filter(|&v| (v as usize) < *n),
            Labels::Named { index, .. } => index.get(label).copied(),
        }
    }
}

/// Counts reported while building a graph from raw arcs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Non-comment, non-blank lines (0 when built from memory).
    pub lines: usize,
    pub arcs_read: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Simple directed graph: no self-loops, no parallel arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    out_adj: Csr,
    in_adj: Csr,
    labels: Labels,
}

impl DirectedGraph {
    /// Builds a graph on nodes `0..n` labelled by their ids. Self-loops are
    /// dropped and duplicate arcs collapsed.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::build(Labels::Identity(n), arcs)
    }

    fn build<I>(labels: Labels, arcs: I) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let n = labels.len();
        if n > NodeId::MAX as usize {
            return Err(Error::InvalidParam(format!(
                "{n} nodes exceed the id space"
            )));
        }
        let mut report = LoadReport::default();
        let mut keys: Vec<u64> = Vec::new();
        for (u, v) in arcs {
            report.arcs_read += 1;
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::OutOfRange {
                        index: w as usize,
                        len: n,
                    });
                }
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            keys.push(((u as u64) << 32) | v as u64);
        }
        keys.sort_unstable();
        let before = keys.len();
        keys.dedup();
        report.duplicates_collapsed = before - keys.len();
        let out_adj = Csr::from_sorted_pairs(
            n,
            keys.iter()
                .map(|&k| ((k >> 32) as NodeId, k as u32 as NodeId)),
        );
        drop(keys);
        let in_adj = out_adj.transpose();
        Ok((
            DirectedGraph {
                out_adj,
                in_adj,
                labels,
            },
            report,
        ))
    }

    /// Reads whitespace-separated `src dst` label pairs; `#` lines and blank
    /// lines are skipped. Ids are assigned in order of first appearance.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(Self, LoadReport)> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut arcs: Vec<(NodeId, NodeId)> = Vec::new();
        let mut lines = 0usize;
        let mut intern = |label: &str, names: &mut Vec<String>| -> NodeId {
            if let Some(&id) = index.get(label) {
                return id;
            }
            let id = names.len() as NodeId;
            names.push(label.to_owned());
            index.insert(label.to_owned(), id);
            id
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            lines += 1;
            let mut tokens = trimmed.split_whitespace();
            let (Some(src), Some(dst), None) = (tokens.next(), tokens.next(), tokens.next()) else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected `<src> <dst>`, got {trimmed:?}"),
                });
            };
            let u = intern(src, &mut names);
            let v = intern(dst, &mut names);
            arcs.push((u, v));
        }
        let (g, mut report) = Self::build(Labels::Named { names, index }, arcs)?;
        report.lines = lines;
        Ok((g, report))
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Self, LoadReport)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_edge_list(BufReader::new(file))
    }

    /// Writes one `src dst` line per arc, preceded by `# ` comment lines.
    pub fn write_edge_list<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        for (u, v) in self.out_adj.pairs() {
            writeln!(w, "{} {}", self.labels.label(u), self.labels.label(v))?;
        }
        Ok(())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out_adj.rows()
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.out_adj.nnz()
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        self.out_adj.row(u as usize)
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        self.in_adj.row(v as usize)
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj.contains(u as usize, v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj.pairs()
    }

    pub fn out_csr(&self) -> &Csr {
        &self.out_adj
    }

    pub fn in_csr(&self) -> &Csr {
        &self.in_adj
    }

    pub fn summary(&self) -> GraphSummary {
        let a = unreciprocated(self);
        GraphSummary {
            n: self.node_count(),
            m: self.arc_count(),
            unreciprocated: a.len(),
        }
    }
}

/// The arcs `(u, v)` of a graph whose reverse `(v, u)` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcSet {
    out_adj: Csr,
    in_adj: Csr,
}

impl ArcSet {
    /// Builds directly from arcs on `0..n`; the caller asserts no arc has its
    /// reverse in the list. Duplicates and self-loops are removed.
    pub fn from_unreciprocated_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let (g, _) = DirectedGraph::from_arcs(n, arcs)?;
        let a = unreciprocated(&g);
        if a.len() != g.arc_count() {
            return Err(Error::InvalidParam(
                "arc list contains reciprocated pairs".into(),
            ));
        }
        Ok(a)
    }

    /// An arc set with `n` nodes and no arcs.
    pub fn empty(n: usize) -> Self {
        let out_adj = Csr::from_sorted_pairs(n, Vec::<(NodeId, NodeId)>::new().into_iter());
        ArcSet {
            in_adj: out_adj.clone(),
            out_adj,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out_adj.rows()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.out_adj.nnz()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sources `u` with `(u, v)` in the set, sorted.
    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[NodeId] {
        self.in_adj.row(v)
    }

    /// Targets `u` with `(v, u)` in the set, sorted.
    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[NodeId] {
        self.out_adj.row(v)
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.degree(v)
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.degree(v)
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        self.in_adj.degrees()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_adj.degrees()
    }

    pub fn contains(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj.contains(u as usize, v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj.pairs()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|v| self.in_degree(v).max(self.out_degree(v)))
            .max()
            .unwrap_or(0)
    }

    /// The arc set re-read as a plain directed graph.
    pub fn to_graph(&self) -> DirectedGraph {
        DirectedGraph {
            out_adj: self.out_adj.clone(),
            in_adj: self.in_adj.clone(),
            labels: Labels::Identity(self.node_count()),
        }
    }
}

/// Extracts `{(u, v) ∈ E : (v, u) ∉ E}` by merging each node's sorted out-
/// and in-lists.
pub fn unreciprocated(g: &DirectedGraph) -> ArcSet {
    let n = g.node_count();
    let mut offsets = vec![0usize; n + 1];
    let mut targets = Vec::new();
    for u in 0..n {
        let outs = g.out_adj.row(u);
        let ins = g.in_adj.row(u);
        let mut j = 0;
        for &v in outs {
            while j < ins.len() && ins[j] < v {
                j += 1;
            }
            if j < ins.len() && ins[j] == v {
                continue;
            }
            targets.push(v);
        }
        offsets[u + 1] = targets.len();
    }
    let out_adj = Csr { offsets, targets };
    let in_adj = out_adj.transpose();
    ArcSet { out_adj, in_adj }
}

/// Unreciprocated degree arrays with summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
    pub max_in: usize,
    pub max_out: usize,
    /// `|A| / n`, equal for in- and out-degrees.
    pub mean: f64,
    /// `in_histogram[d]` = number of nodes with unreciprocated in-degree `d`.
    pub in_histogram: Vec<usize>,
    pub out_histogram: Vec<usize>,
}

pub fn degree_stats(a: &ArcSet) -> DegreeStats {
    fn histogram(d: &[usize], max: usize) -> Vec<usize> {
        let mut h = vec![0usize; max + 1];
        for &x in d {
            h[x] += 1;
        }
        h
    }
    let in_degree = a.in_degrees();
    let out_degree = a.out_degrees();
    let max_in = in_degree.iter().copied().max().unwrap_or(0);
    let max_out = out_degree.iter().copied().max().unwrap_or(0);
    let n = a.node_count();
    DegreeStats {
        in_histogram: histogram(&in_degree, max_in),
        out_histogram: histogram(&out_degree, max_out),
        in_degree,
        out_degree,
        max_in,
        max_out,
        mean: if n == 0 {
            0.0
        } else {
            a.len() as f64 / n as f64
        },
    }
}

/// One-line graph summary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub unreciprocated: usize,
}

impl GraphSummary {
    /// Fraction of arcs whose reverse arc also exists; 0 on an arcless graph.
    pub fn reciprocity(&self) -> f64 {
        if self.m == 0 {
            0.0
        } else {
            (self.m - self.unreciprocated) as f64 / self.m as f64
        }
    }
}

impl fmt::Display for GraphSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} m={} unreciprocated={} reciprocity={:.6}",
            self.n,
            self.m,
            self.unreciprocated,
            self.reciprocity()
        )
    }
}
