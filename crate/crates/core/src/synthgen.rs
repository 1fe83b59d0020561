//! Random directed graphs with planted celebrities and spammers.
//!
//! An undirected friendship graph `H` is drawn first (Erdős–Rényi or Chung–Lu
//! expected-degree). Each friendship becomes a reciprocated pair with
//! probability `1 - p` and a single arc in a random direction otherwise. On
//! top of that every spammer follows each other node independently with
//! probability `p_s`, and every node follows each celebrity independently with
//! probability `p_c`. Arcs produced by more than one mechanism are collapsed.
//!
//! Randomness comes from a ChaCha8 generator seeded with `seed`; `H` uses
//! stream 0 and planting uses stream 1, so the same parameters always produce
//! the same instance.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::graph::{ArcSet, DirectedGraph, NodeId};

/// Generator for the friendship graph `H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HModel {
    ErdosRenyi {
        prob: f64,
    },
    /// Weights `w_i ∝ (i+1)^(-exponent)` scaled to mean `avg_degree`; pair
    /// probability `min(1, w_i w_j / Σw)`.
    ChungLu {
        exponent: f64,
        avg_degree: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub n_c: usize,
    pub n_s: usize,
    /// Probability that a friendship edge is not reciprocated.
    pub p: f64,
    pub p_c: f64,
    pub p_s: f64,
    pub h_model: HModel,
    pub seed: u64,
}

impl GeneratorParams {
    /// N = 2,000,000, |C| = 1000, |S| = 5000, p = 0.2, p_c = p_s = 0.00025,
    /// Chung–Lu exponent 0.5 with average degree 100.
    pub fn paper_2m() -> Self {
        GeneratorParams {
            n: 2_000_000,
            n_c: 1000,
            n_s: 5000,
            p: 0.2,
            p_c: 0.00025,
            p_s: 0.00025,
            h_model: HModel::ChungLu {
                exponent: 0.5,
                avg_degree: 100.0,
            },
            seed: 1,
        }
    }

    /// Desk-scale version of [`paper_2m`](Self::paper_2m) with the same
    /// expected spam and celebrity arcs per planted node (500).
    pub fn desk() -> Self {
        GeneratorParams {
            n: 20_000,
            n_c: 100,
            n_s: 250,
            p: 0.2,
            p_c: 0.025,
            p_s: 0.025,
            h_model: HModel::ChungLu {
                exponent: 0.5,
                avg_degree: 100.0,
            },
            seed: 1,
        }
    }

    /// Desk preset with mostly unreciprocated friendships (p = 0.9), standing
    /// in for a crawled graph.
    pub fn crawl_like() -> Self {
        GeneratorParams {
            p: 0.9,
            ..Self::desk()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "desk" => Some(Self::desk()),
            "paper-2M" | "paper-2m" => Some(Self::paper_2m()),
            "crawl-like" => Some(Self::crawl_like()),
            _ => None,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GeneratorParams { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.n > NodeId::MAX as usize {
            return bad(format!("N = {} exceeds the id space", self.n));
        }
        if self.n_c + self.n_s > self.n {
            return bad(format!(
                "|C| + |S| = {} exceeds N = {}",
                self.n_c + self.n_s,
                self.n
            ));
        }
        for (name, v) in [("p", self.p), ("p_c", self.p_c), ("p_s", self.p_s)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        match self.h_model {
            HModel::ErdosRenyi { prob } if !(0.0..=1.0).contains(&prob) => {
                bad(format!("edge probability must lie in [0, 1], got {prob}"))
            }
            HModel::ChungLu {
                exponent,
                avg_degree,
            } => {
                if !(exponent >= 0.0 && exponent.is_finite()) {
                    return bad(format!("exponent must be non-negative, got {exponent}"));
                }
                if !(avg_degree >= 0.0) || avg_degree > self.n.saturating_sub(1) as f64 {
                    return bad(format!(
                        "average degree {avg_degree} infeasible for N = {}",
                        self.n
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `key=value` lines describing the parameters.
    pub fn describe(&self) -> Vec<String> {
        let mut lines = vec![
            format!("n={}", self.n),
            format!("n_c={}", self.n_c),
            format!("n_s={}", self.n_s),
            format!("p={}", self.p),
            format!("p_c={}", self.p_c),
            format!("p_s={}", self.p_s),
        ];
        match self.h_model {
            HModel::ErdosRenyi { prob } => lines.push(format!("er_prob={prob}")),
            HModel::ChungLu {
                exponent,
                avg_degree,
            } => {
                lines.push(format!("exponent={exponent}"));
                lines.push(format!("avg_degree={avg_degree}"));
            }
        }
        lines.push(format!("seed={}", self.seed));
        lines
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Simple undirected graph as an edge list with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl UndirectedGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    /// Neighbor lists in both directions.
    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }
}

/// Chung–Lu weights, non-increasing in the node index.
pub fn chung_lu_weights(n: usize, exponent: f64, avg_degree: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(-exponent)).collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return raw;
    }
    let scale = avg_degree * n as f64 / total;
    raw.into_iter().map(|w| w * scale).collect()
}

/// `Σ_{i<j} min(1, w_i w_j / Σw)` for non-increasing weights, in O(n).
pub fn chung_lu_expected_edges(weights: &[f64]) -> f64 {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    if n < 2 || total == 0.0 {
        return 0.0;
    }
    // suffix[j] = Σ_{k ≥ j} w_k
    let mut suffix = vec![0.0; n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] + weights[j];
    }
    let mut expected = 0.0;
    // capped pairs for row i are j in (i, bound); bound only shrinks as i grows
    let mut bound = n;
    for i in 0..n {
        while bound > i + 1 && weights[i] * weights[bound - 1] < total {
            bound -= 1;
        }
        let start = bound.max(i + 1);
        let capped = start - (i + 1);
        expected += capped as f64 + weights[i] * suffix[start] / total;
    }
    expected
}

fn erdos_renyi(n: usize, prob: f64, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    if prob <= 0.0 || n < 2 {
        return edges;
    }
    if prob >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w as NodeId, v as NodeId));
            }
        }
        return edges;
    }
    // Batagelj–Brandes geometric skipping over the lower triangle.
    let log_q = (-prob).ln_1p();
    let mut v = 1usize;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = 1.0 - rng.gen::<f64>();
        w += 1 + (r.ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as NodeId, v as NodeId));
        }
    }
    edges
}

/// Miller–Hagberg skipping for non-increasing weights.
fn chung_lu(weights: &[f64], rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    let mut edges = Vec::new();
    if total == 0.0 {
        return edges;
    }
    for u in 0..n.saturating_sub(1) {
        let mut v = u + 1;
        let mut p = (weights[u] * weights[v] / total).min(1.0);
        while v < n && p > 0.0 {
            if p < 1.0 {
                let r: f64 = 1.0 - rng.gen::<f64>();
                let skip = (r.ln() / (-p).ln_1p()).floor();
                if skip >= (n - v) as f64 {
                    break;
                }
                v += skip as usize;
            }
            if v < n {
                let q = (weights[u] * weights[v] / total).min(1.0);
                if rng.gen::<f64>() < q / p {
                    edges.push((u as NodeId, v as NodeId));
                }
                p = q;
                v += 1;
            }
        }
    }
    edges
}

/// Draws the friendship graph `H`.
pub fn generate_h(params: &GeneratorParams) -> Result<UndirectedGraph> {
    params.validate()?;
    let mut rng = params.rng(0);
    let edges = match params.h_model {
        HModel::ErdosRenyi { prob } => erdos_renyi(params.n, prob, &mut rng),
        HModel::ChungLu {
            exponent,
            avg_degree,
        } => chung_lu(&chung_lu_weights(params.n, exponent, avg_degree), &mut rng),
    };
    Ok(UndirectedGraph { n: params.n, edges })
}

/// Hidden planted sets, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub celebrities: Vec<NodeId>,
    pub spammers: Vec<NodeId>,
}

impl GroundTruth {
    pub fn new(mut celebrities: Vec<NodeId>, mut spammers: Vec<NodeId>) -> Result<Self> {
        celebrities.sort_unstable();
        celebrities.dedup();
        spammers.sort_unstable();
        spammers.dedup();
        if let Some(v) = celebrities
            .iter()
            .find(|v| spammers.binary_search(v).is_ok())
        {
            return Err(Error::InvalidParam(format!(
                "node {v} is both celebrity and spammer"
            )));
        }
        Ok(GroundTruth {
            celebrities,
            spammers,
        })
    }

    /// Membership mask over `n` nodes.
    pub fn celebrity_mask(&self, n: usize) -> Vec<bool> {
        mask(n, &self.celebrities)
    }

    pub fn spammer_mask(&self, n: usize) -> Vec<bool> {
        mask(n, &self.spammers)
    }
}

fn mask(n: usize, ids: &[NodeId]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in ids {
        m[v as usize] = true;
    }
    m
}

/// Arc counts drawn by each mechanism, before duplicates are collapsed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RealizedStats {
    pub h_edges: usize,
    pub reciprocated_pairs: usize,
    pub spam_arcs: usize,
    pub celebrity_arcs: usize,
    /// Arcs drawn more than once across mechanisms.
    pub collapsed: usize,
    /// Distinct arcs in the final graph.
    pub arcs: usize,
}

#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub graph: DirectedGraph,
    pub truth: GroundTruth,
    pub params: GeneratorParams,
    pub stats: RealizedStats,
}

/// Adds reciprocated/one-way friendship arcs and the planted spam and
/// celebrity arcs on top of `h`.
pub fn plant(h: &UndirectedGraph, params: &GeneratorParams) -> Result<PlantedInstance> {
    params.validate()?;
    if h.n != params.n {
        return Err(Error::InvalidParam(format!(
            "H has {} nodes, params say {}",
            h.n, params.n
        )));
    }
    let n = params.n;
    let mut rng = params.rng(1);
    let chosen = sample(&mut rng, n, params.n_c + params.n_s).into_vec();
    let celebrities: Vec<NodeId> = chosen[..params.n_c].iter().map(|&v| v as NodeId).collect();
    let spammers: Vec<NodeId> = chosen[params.n_c..].iter().map(|&v| v as NodeId).collect();

    let mut stats = RealizedStats {
        h_edges: h.edges.len(),
        ..Default::default()
    };
    let mut arcs: Vec<(NodeId, NodeId)> = Vec::with_capacity(2 * h.edges.len());
    for &(u, v) in &h.edges {
        if rng.gen::<f64>() >= params.p {
            arcs.push((u, v));
            arcs.push((v, u));
            stats.reciprocated_pairs += 1;
        } else if rng.gen::<bool>() {
            arcs.push((u, v));
        } else {
            arcs.push((v, u));
        }
    }

    // Per planted node: a binomial count of partners, then that many distinct
    // partners uniformly from the other n - 1 nodes.
    let others = n.saturating_sub(1) as u64;
    let partners = |rng: &mut ChaCha8Rng, prob: f64, own: NodeId| -> Result<Vec<NodeId>> {
        let k = Binomial::new(others, prob)
            .map_err(|e| Error::InvalidParam(e.to_string()))?
            .sample(rng) as usize;
        Ok(sample(rng, others as usize, k)
            .into_iter()
            .map(|i| {
                if i >= own as usize {
                    i as NodeId + 1
                } else {
                    i as NodeId
                }
            })
            .collect())
    };
    let mut sorted_spammers = spammers.clone();
    sorted_spammers.sort_unstable();
    for &u in &sorted_spammers {
        let targets = partners(&mut rng, params.p_s, u)?;
        stats.spam_arcs += targets.len();
        arcs.extend(targets.into_iter().map(|v| (u, v)));
    }
    let mut sorted_celebrities = celebrities.clone();
    sorted_celebrities.sort_unstable();
    for &v in &sorted_celebrities {
        let sources = partners(&mut rng, params.p_c, v)?;
        stats.celebrity_arcs += sources.len();
        arcs.extend(sources.into_iter().map(|u| (u, v)));
    }

    let (graph, report) = DirectedGraph::from_arcs(n, arcs)?;
    stats.collapsed = report.duplicates_collapsed;
    stats.arcs = graph.arc_count();
    Ok(PlantedInstance {
        graph,
        truth: GroundTruth::new(celebrities, spammers)?,
        params: *params,
        stats,
    })
}

/// `generate_h` followed by `plant`.
pub fn generate(params: &GeneratorParams) -> Result<PlantedInstance> {
    let h = generate_h(params)?;
    plant(&h, params)
}

/// Mean and variance of one arc-count category.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `|x - mean|` in standard deviations (0 when the variance vanishes and
    /// `x` equals the mean).
    pub fn z_score(&self, x: f64) -> f64 {
        let d = (x - self.mean).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_dev()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedStats {
    pub h_edges: Moments,
    pub reciprocated_pairs: Moments,
    pub spam_arcs: Moments,
    pub celebrity_arcs: Moments,
}

impl ExpectedStats {
    /// Expected arcs before collapsing: both directions for reciprocated
    /// friendships, one otherwise, plus planted arcs.
    pub fn total_arcs(&self) -> f64 {
        self.h_edges.mean
            + self.reciprocated_pairs.mean
            + self.spam_arcs.mean
            + self.celebrity_arcs.mean
    }

    /// Rough peak memory of building the graph: a sort key per drawn arc plus
    /// both adjacency directions.
    pub fn memory_estimate_bytes(&self, n: usize) -> f64 {
        let arcs = self.total_arcs();
        arcs * (8.0 + 8.0 + 4.0 + 4.0) + n as f64 * (2.0 * 8.0 + 2.0 * 8.0)
    }
}

/// Closed-form expectations of the realized statistics.
pub fn expected_stats(params: &GeneratorParams) -> Result<ExpectedStats> {
    params.validate()?;
    let n = params.n as f64;
    let pairs = n * (n - 1.0) / 2.0;
    let h_edges = match params.h_model {
        HModel::ErdosRenyi { prob } => Moments {
            mean: pairs * prob,
            variance: pairs * prob * (1.0 - prob),
        },
        HModel::ChungLu {
            exponent,
            avg_degree,
        } => {
            let w = chung_lu_weights(params.n, exponent, avg_degree);
            let mean = chung_lu_expected_edges(&w);
            // Poisson-binomial variance never exceeds the mean.
            Moments {
                mean,
                variance: mean,
            }
        }
    };
    let q = 1.0 - params.p;
    let reciprocated_pairs = Moments {
        mean: h_edges.mean * q,
        variance: h_edges.mean * q * params.p + q * q * h_edges.variance,
    };
    let binomial = |trials: f64, prob: f64| Moments {
        mean: trials * prob,
        variance: trials * prob * (1.0 - prob),
    };
    Ok(ExpectedStats {
        h_edges,
        reciprocated_pairs,
        spam_arcs: binomial(params.n_s as f64 * (n - 1.0), params.p_s),
        celebrity_arcs: binomial(params.n_c as f64 * (n - 1.0), params.p_c),
    })
}

/// Regular bipartite digraph: `side` sources each pointing at `degree`
/// targets (`side + (i + j) mod side`, `j < degree`). Nodes `0..side` form
/// part 1.
pub fn bipartite_regular(side: usize, degree: usize) -> Result<ArcSet> {
    if degree > side {
        return Err(Error::InvalidParam(format!(
            "degree {degree} exceeds part size {side}"
        )));
    }
    let arcs = (0..side).flat_map(move |i| {
        (0..degree).map(move |j| (i as NodeId, (side + (i + j) % side) as NodeId))
    });
    ArcSet::from_unreciprocated_arcs(2 * side, arcs)
}
