//! Monotone updates of symmetric linear combinations.
//!
//! A system has variables `x_i` in `[lo_i, hi_i]`, a symmetric weight matrix
//! `W` with zero diagonal, and a strictly increasing update function per
//! variable. One variable moves per step: `x_i ← F_i((Wx)_i)`. Every step
//! minimizes
//!
//! > P(x) = Σ_i G_i(x_i) - ½ xᵀWx,   G_i(z) = ∫_r^z F_i⁻¹,
//!
//! over `x_i` with the rest held fixed, so `P` never increases under any
//! activation order. The SCRank scores are the special case built by
//! [`embed_scrank`].

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{ArcSet, NodeId};
use crate::scrank::{splitmix64, ScoreState};
use crate::special::compensated_sum;
use crate::synthgen::UndirectedGraph;
use crate::transfer::{SoftStep, TransferMap};

/// Largest tolerated `|W_ij - W_ji|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Sparse symmetric weights with zero diagonal, stored as sorted rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Weights {
    rows: Vec<Vec<(NodeId, f64)>>,
}

impl Weights {
    pub fn zero(n: usize) -> Self {
        Weights {
            rows: vec![Vec::new(); n],
        }
    }

    /// Builds `W` from undirected triples `(i, j, w)`; each pair may appear
    /// once in either orientation. A repeated pair must carry the same weight.
    pub fn from_pairs<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut pairs: BTreeMap<(usize, usize), (usize, usize, f64)> = BTreeMap::new();
        for (i, j, w) in triples {
            for k in [i, j] {
                if k >= n {
                    return Err(Error::OutOfRange { index: k, len: n });
                }
            }
            if !w.is_finite() {
                return Err(Error::InvalidParam(format!(
                    "weight ({i}, {j}) is not finite"
                )));
            }
            if i == j {
                if w != 0.0 {
                    return Err(Error::NonzeroDiagonal(i));
                }
                continue;
            }
            let key = (i.min(j), i.max(j));
            if let Some(&(pi, pj, pw)) = pairs.get(&key) {
                if (pw - w).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::Asymmetric {
                        i: pi,
                        j: pj,
                        w_ij: pw,
                        w_ji: w,
                    });
                }
                continue;
            }
            pairs.insert(key, (i, j, w));
        }
        let mut rows = vec![Vec::new(); n];
        for (&(i, j), &(_, _, w)) in &pairs {
            if w != 0.0 {
                rows[i].push((j as NodeId, w));
                rows[j].push((i as NodeId, w));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(Weights { rows })
    }

    /// Builds `W` from a dense square matrix, rejecting asymmetry beyond
    /// [`SYMMETRY_TOLERANCE`] and nonzero diagonal entries.
    pub fn from_dense(matrix: &[Vec<f64>]) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            if row[i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
        }
        let mut triples = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (matrix[i][j], matrix[j][i]);
                if (a - b).abs() > SYMMETRY_TOLERANCE || a.is_nan() != b.is_nan() {
                    return Err(Error::Asymmetric {
                        i,
                        j,
                        w_ij: a,
                        w_ji: b,
                    });
                }
                if a != 0.0 {
                    triples.push((i, j, 0.5 * (a + b)));
                }
            }
        }
        Self::from_pairs(n, triples)
    }

    /// Unit weights on the edges of an undirected graph.
    pub fn adjacency(g: &UndirectedGraph) -> Result<Self> {
        Self::from_pairs(
            g.n,
            g.edges.iter().map(|&(u, v)| (u as usize, v as usize, 1.0)),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(NodeId, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        match row.binary_search_by_key(&(j as NodeId), |&(k, _)| k) {
            Ok(p) => row[p].1,
            Err(_) => 0.0,
        }
    }

    /// Number of stored off-diagonal entries (each pair counted twice).
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `(Wx)_i`, summed in column order.
    pub fn combination(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().map(|&(j, w)| w * x[j as usize]).sum()
    }

    /// `xᵀWx`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        compensated_sum((0..self.len()).map(|i| x[i] * self.combination(i, x)))
    }

    /// Each undirected pair once, `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| (j as usize) > i)
                .map(move |&(j, w)| (i, j as usize, w))
        })
    }
}

/// Rule choosing the variable activated at step `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum ActivationSequence {
    RoundRobin,
    /// The listed variables, repeated forever.
    Cycle(Vec<usize>),
    /// Independent uniform choices keyed by `(seed, t)`.
    Random {
        seed: u64,
    },
    /// Each variable activated `length` times in a row before moving on.
    Bursts {
        length: usize,
    },
}

impl ActivationSequence {
    pub fn index(&self, t: u64, n: usize) -> usize {
        match self {
            ActivationSequence::RoundRobin => (t % n as u64) as usize,
            ActivationSequence::Cycle(list) => list[(t % list.len() as u64) as usize],
            ActivationSequence::Random { seed } => {
                (splitmix64(seed ^ splitmix64(t)) % n as u64) as usize
            }
            ActivationSequence::Bursts { length } => ((t / *length as u64) % n as u64) as usize,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            ActivationSequence::Cycle(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidParam("activation cycle is empty".into()));
                }
                match list.iter().find(|&&i| i >= n) {
                    Some(&i) => Err(Error::OutOfRange { index: i, len: n }),
                    None => Ok(()),
                }
            }
            ActivationSequence::Bursts { length: 0 } => {
                Err(Error::InvalidParam("burst length must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// One applied step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub variable: usize,
    pub new_value: f64,
    /// Potential after the step, accumulated from the per-step changes.
    pub potential: f64,
    /// Exact potential change of the step (never positive).
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub converged: bool,
    pub steps: u64,
    pub initial_potential: f64,
    pub records: Vec<StepRecord>,
}

impl RunReport {
    pub fn final_potential(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_potential, |r| r.potential)
    }

    /// Potentials before the first step and after each step.
    pub fn potentials(&self) -> Vec<f64> {
        std::iter::once(self.initial_potential)
            .chain(self.records.iter().map(|r| r.potential))
            .collect()
    }

    /// Writes `step,variable,new_value,potential`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,variable,new_value,potential")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{:.17e},{:.17e}",
                r.step, r.variable, r.new_value, r.potential
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuesliSystem {
    weights: Weights,
    updates: Vec<SoftStep>,
    state: Vec<f64>,
}

impl MuesliSystem {
    /// Bounds of variable `i` are the range of its update function.
    pub fn new(weights: Weights, updates: Vec<SoftStep>, state: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        for len in [updates.len(), state.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        let mut sys = MuesliSystem {
            weights,
            updates,
            state: Vec::new(),
        };
        sys.set_state(state)?;
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn update_function(&self, i: usize) -> &SoftStep {
        &self.updates[i]
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (self.updates[i].lo, self.updates[i].hi)
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn set_state(&mut self, state: Vec<f64>) -> Result<()> {
        if state.len() != self.updates.len() {
            return Err(Error::LengthMismatch {
                expected: self.updates.len(),
                actual: state.len(),
            });
        }
        for (i, &x) in state.iter().enumerate() {
            let (lo, hi) = self.bounds(i);
            if !(lo..=hi).contains(&x) {
                return Err(Error::InvalidParam(format!(
                    "x_{i} = {x} outside [{lo}, {hi}]"
                )));
            }
        }
        self.state = state;
        Ok(())
    }

    /// Largest slope over all update functions.
    pub fn lipschitz_bound(&self) -> f64 {
        self.updates
            .iter()
            .map(SoftStep::max_slope)
            .fold(0.0, f64::max)
    }

    /// `(Wx)_i` at the current state.
    pub fn input(&self, i: usize) -> f64 {
        self.weights.combination(i, &self.state)
    }

    /// `Σ_i G_i(x_i) - ½ xᵀWx` evaluated from scratch.
    pub fn potential(&self) -> f64 {
        let g = compensated_sum(
            self.updates
                .iter()
                .zip(&self.state)
                .map(|(f, &x)| f.inverse_integral(x)),
        );
        g - 0.5 * self.weights.quadratic(&self.state)
    }

    /// Sets `x_i ← F_i((Wx)_i)`; returns the new value and the potential change.
    pub fn step(&mut self, i: usize) -> Result<(f64, f64)> {
        if i >= self.len() {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len(),
            });
        }
        let input = self.input(i);
        let f = &self.updates[i];
        let old = self.state[i];
        let new = f.eval(input);
        let delta = f.descent(old, new, input);
        self.state[i] = new;
        Ok((new, delta))
    }

    /// One round-robin pass; returns the largest move.
    pub fn sweep(&mut self) -> f64 {
        let mut largest = 0.0f64;
        for i in 0..self.len() {
            let old = self.state[i];
            let (new, _) = self.step(i).expect("index in range");
            largest = largest.max((new - old).abs());
        }
        largest
    }

    /// Applies steps until `n` consecutive steps each move by at most `eps`,
    /// or `max_steps` steps have been taken.
    pub fn run(&mut self, act: &ActivationSequence, eps: f64, max_steps: u64) -> Result<RunReport> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParam(format!(
                "eps must be positive, got {eps}"
            )));
        }
        let n = self.len();
        let initial_potential = self.potential();
        let mut report = RunReport {
            converged: n == 0,
            steps: 0,
            initial_potential,
            records: Vec::new(),
        };
        if n == 0 {
            return Ok(report);
        }
        act.validate(n)?;
        let mut potential = initial_potential;
        let mut quiet = 0usize;
        for t in 0..max_steps {
            let i = act.index(t, n);
            let old = self.state[i];
            let (new, delta) = self.step(i)?;
            potential += delta;
            report.records.push(StepRecord {
                step: t,
                variable: i,
                new_value: new,
                potential,
                delta,
            });
            report.steps = t + 1;
            if (new - old).abs() <= eps {
                quiet += 1;
                if quiet >= n {
                    report.converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Ok(report)
    }

    /// Samples in-bounds states and checks that every update lands in bounds.
    pub fn check_bounds_preserved(&self, samples: usize, seed: u64) -> bool {
        let n = self.len();
        let mut x = vec![0.0; n];
        for k in 0..samples as u64 {
            for (i, xi) in x.iter_mut().enumerate() {
                let (lo, hi) = self.bounds(i);
                let u = (splitmix64(seed ^ splitmix64(k * n as u64 + i as u64)) >> 11) as f64
                    / (1u64 << 53) as f64;
                *xi = lo + (hi - lo) * u;
            }
            for i in 0..n {
                let (lo, hi) = self.bounds(i);
                let y = self.updates[i].eval(self.weights.combination(i, &x));
                if !(lo..=hi).contains(&y) {
                    return false;
                }
            }
        }
        true
    }
}

/// `Σ_i G_i(x_i) - ½ xᵀWx` at the system's current state.
pub fn muesli_potential(sys: &MuesliSystem) -> f64 {
    sys.potential()
}

/// The `2n`-variable system whose round-robin dynamics reproduce the two-phase
/// score iteration: `c_v` is variable `v`, `s_u` is variable `n + u`, and
/// `W = -1` between `s_u` and `c_v` for each arc `(u, v)`.
///
/// The update of `c_v` is `L ↦ F_c(indeg(v) + L)`, a normal CDF re-centered
/// at `μ_c - indeg(v)`; likewise for `s_u` with the out-degree. The state
/// starts at zero.
pub fn embed_scrank(a: &ArcSet, f_c: &TransferMap, f_s: &TransferMap) -> Result<MuesliSystem> {
    let n = a.node_count();
    if let TransferMap::PerVertex(v) = f_c {
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    if let TransferMap::PerVertex(v) = f_s {
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    let weights = Weights::from_pairs(
        2 * n,
        a.arcs().map(|(u, v)| (n + u as usize, v as usize, -1.0)),
    )?;
    let mut updates = Vec::with_capacity(2 * n);
    for v in 0..n {
        let f = f_c.at(v).soft_step();
        updates.push(SoftStep {
            center: f.center - a.in_degree(v) as f64,
            ..*f
        });
    }
    for u in 0..n {
        let f = f_s.at(u).soft_step();
        updates.push(SoftStep {
            center: f.center - a.out_degree(u) as f64,
            ..*f
        });
    }
    MuesliSystem::new(weights, updates, vec![0.0; 2 * n])
}

/// Loads celebrity and spammer scores into an embedded system.
pub fn load_scores(sys: &mut MuesliSystem, state: &ScoreState) -> Result<()> {
    let mut x = state.c.clone();
    x.extend_from_slice(&state.s);
    sys.set_state(x)
}

/// Splits an embedded system's state back into scores.
pub fn extract_scores(sys: &MuesliSystem) -> ScoreState {
    let n = sys.len() / 2;
    ScoreState {
        c: sys.state[..n].to_vec(),
        s: sys.state[n..].to_vec(),
        iterations: 0,
    }
}

/// Reachability from `origin` in an undirected graph: each node switches on
/// when the sum of its neighbors crosses one half. The origin's update ignores
/// its input in practice (a logistic step far below zero) and stays within
/// 1e-12 of one; every other node starts at zero.
pub fn make_connectivity(
    g: &UndirectedGraph,
    origin: usize,
    steepness: f64,
) -> Result<MuesliSystem> {
    if origin >= g.n {
        return Err(Error::OutOfRange {
            index: origin,
            len: g.n,
        });
    }
    let weights = Weights::adjacency(g)?;
    let node = SoftStep::logistic(0.5, steepness, 0.0, 1.0)?;
    let pinned = SoftStep::logistic(-30.0 / steepness, steepness, 0.0, 1.0)?;
    let mut updates = vec![node; g.n];
    updates[origin] = pinned;
    let mut state = vec![0.0; g.n];
    state[origin] = 1.0;
    MuesliSystem::new(weights, updates, state)
}

/// Softened party-affiliation game: `x_i ∈ [-1, 1]` follows the sign of
/// `(Wx)_i`. The state starts at zero.
pub fn make_party_affiliation(weights: Weights, steepness: f64) -> Result<MuesliSystem> {
    let f = SoftStep::logistic(0.0, steepness, -1.0, 1.0)?;
    let n = weights.len();
    MuesliSystem::new(weights, vec![f; n], vec![0.0; n])
}

/// Technology diffusion: a user adopts (`x_i → 1`) once the minutes spent
/// talking to adopters exceed `free_limit`. The state starts at zero.
pub fn make_tech_diffusion(
    minutes: Weights,
    free_limit: f64,
    steepness: f64,
) -> Result<MuesliSystem> {
    if !(free_limit >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "free limit must be non-negative, got {free_limit}"
        )));
    }
    if let Some((i, j, w)) = minutes.pairs().find(|&(_, _, w)| w < 0.0) {
        return Err(Error::InvalidParam(format!(
            "negative minutes {w} between {i} and {j}"
        )));
    }
    let f = SoftStep::logistic(free_limit, steepness, 0.0, 1.0)?;
    let n = minutes.len();
    MuesliSystem::new(minutes, vec![f; n], vec![0.0; n])
}

fn parse_update(tokens: &[&str], lo: f64, hi: f64, line: usize) -> Result<SoftStep> {
    let perr = |message: String| Error::Parse { line, message };
    let kind = *tokens
        .first()
        .ok_or_else(|| perr("missing update function kind".into()))?;
    let mut params = BTreeMap::new();
    for t in &tokens[1..] {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| perr(format!("expected key=value, got '{t}'")))?;
        let v: f64 = v.parse().map_err(|_| perr(format!("bad number '{v}'")))?;
        params.insert(k, v);
    }
    let get = |k: &str| {
        params
            .get(k)
            .copied()
            .ok_or_else(|| perr(format!("missing '{k}'")))
    };
    let f = match kind {
        "normal" => SoftStep::normal(get("mu")?, get("sigma")?, lo, hi),
        "logistic" => SoftStep::logistic(get("center")?, get("steepness")?, lo, hi),
        other => return Err(perr(format!("unknown update function '{other}'"))),
    };
    f.map_err(|e| perr(e.to_string()))
}

/// Reads a system definition.
///
/// ```text
/// # comment
/// [system]
/// n = 3
/// [bounds]          # "default lo hi" or "i lo hi"; defaults to [0, 1]
/// default -1 1
/// [updates]         # "default <fn>" or "i <fn>"
/// default logistic center=0 steepness=10
/// 2 normal mu=0.5 sigma=0.1
/// [weights]         # "i j w", each pair once
/// 0 1 1.0
/// [init]            # "i x"; defaults to the reference point of F_i
/// 0 1
/// ```
pub fn read_system<R: BufRead>(reader: R) -> Result<MuesliSystem> {
    struct Pending {
        line: usize,
        tokens: Vec<String>,
    }
    let mut n: Option<usize> = None;
    let mut section = String::new();
    let mut bounds: Vec<(Option<usize>, f64, f64, usize)> = Vec::new();
    let mut updates: Vec<(Option<usize>, Pending)> = Vec::new();
    let mut triples = Vec::new();
    let mut init = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let perr = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        if let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| perr(format!("bad number '{t}'")))
        };
        let idx = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| perr(format!("bad index '{t}'")))
        };
        let target = |t: &str| {
            if t == "default" {
                Ok(None)
            } else {
                idx(t).map(Some)
            }
        };
        match section.as_str() {
            "system" => {
                let (key, value) = text
                    .split_once('=')
                    .ok_or_else(|| perr("expected n = <count>".into()))?;
                if key.trim() != "n" {
                    return Err(perr(format!("unknown key '{}'", key.trim())));
                }
                n = Some(idx(value.trim())?);
            }
            "bounds" => {
                if tokens.len() != 3 {
                    return Err(perr("expected '<i|default> lo hi'".into()));
                }
                bounds.push((target(tokens[0])?, num(tokens[1])?, num(tokens[2])?, lineno));
            }
            "updates" => {
                if tokens.len() < 2 {
                    return Err(perr("expected '<i|default> <kind> key=value...'".into()));
                }
                let pending = Pending {
                    line: lineno,
                    tokens: tokens[1..].iter().map(|s| s.to_string()).collect(),
                };
                updates.push((target(tokens[0])?, pending));
            }
            "weights" => {
                if tokens.len() != 3 {
                    return Err(perr("expected 'i j w'".into()));
                }
                triples.push((idx(tokens[0])?, idx(tokens[1])?, num(tokens[2])?));
            }
            "init" => {
                if tokens.len() != 2 {
                    return Err(perr("expected 'i x'".into()));
                }
                init.push((idx(tokens[0])?, num(tokens[1])?, lineno));
            }
            "" => return Err(perr("content before the first section".into())),
            other => return Err(perr(format!("unknown section '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::InvalidParam("missing [system] n".into()))?;
    let check = |i: usize, line: usize| {
        if i >= n {
            Err(Error::Parse {
                line,
                message: format!("index {i} out of range for {n} variables"),
            })
        } else {
            Ok(())
        }
    };
    let mut range = vec![(0.0, 1.0); n];
    for &(t, lo, hi, line) in bounds
        .iter()
        .filter(|b| b.0.is_none())
        .chain(bounds.iter().filter(|b| b.0.is_some()))
    {
        match t {
            None => range.iter_mut().for_each(|r| *r = (lo, hi)),
            Some(i) => {
                check(i, line)?;
                range[i] = (lo, hi);
            }
        }
    }
    for u in &updates {
        if let Some(i) = u.0 {
            check(i, u.1.line)?;
        }
    }
    let default = updates.iter().rev().find(|u| u.0.is_none());
    let mut fns = Vec::with_capacity(n);
    for (i, &(lo, hi)) in range.iter().enumerate() {
        let spec = updates
            .iter()
            .rev()
            .find(|u| u.0 == Some(i))
            .or(default)
            .ok_or_else(|| Error::InvalidParam(format!("no update function for variable {i}")))?;
        let tokens: Vec<&str> = spec.1.tokens.iter().map(String::as_str).collect();
        fns.push(parse_update(&tokens, lo, hi, spec.1.line)?);
    }
    let weights = Weights::from_pairs(n, triples)?;
    let mut state: Vec<f64> = fns.iter().map(SoftStep::reference).collect();
    for &(i, x, line) in &init {
        check(i, line)?;
        state[i] = x;
    }
    MuesliSystem::new(weights, fns, state)
}

/// Reads a system definition from a file.
pub fn load_system(path: impl AsRef<std::path::Path>) -> Result<MuesliSystem> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_system(std::io::BufReader::new(file))
}
