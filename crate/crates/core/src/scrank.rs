//! Celebrity and spammer scores by two-phase fixed-point iteration.
//!
//! Given the unreciprocated arc set `A`, the scores satisfy
//!
//! > c_v = F_c( Σ_{(u,v)∈A} (1 - s_u) ),   s_v = F_s( Σ_{(v,u)∈A} (1 - c_u) ).
//!
//! Each iteration first recomputes every `c_v` from the current spammer scores,
//! then every `s_v` from the *new* celebrity scores. Within a phase no score
//! reads another score of the same kind, so the per-node updates run on any
//! number of workers with bit-identical results.
//!
//! Every phase is an exact block minimization of
//!
//! > P(c,s) = Σ_{(u,v)∈A} (1-s_u)(1-c_v) + Σ_v G_c(c_v) + Σ_v G_s(s_v),
//!
//! with `G(x) = ∫_0^x F⁻¹`, so `P` never increases and the iteration cannot
//! cycle. Iteration records carry both the absolute potential and the
//! per-iteration change evaluated term by term, which stays accurate when the
//! change is far below the rounding error of the absolute value.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::ArcSet;
use crate::par::{Executor, Parallelism};
use crate::special::compensated_sum;
use crate::transfer::{ScoreKind, TransferFunction, TransferMap};

/// Initial score assignment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    Zero,
    One,
    Constant(f64),
    /// Independent uniform draws keyed by `(seed, node, score kind)`.
    Random {
        seed: u64,
    },
}

impl Init {
    /// The four initializations used in the convergence experiments.
    pub fn standard_set(seed: u64) -> [Init; 4] {
        [
            Init::Zero,
            Init::One,
            Init::Constant(0.5),
            Init::Random { seed },
        ]
    }

    pub fn label(&self) -> String {
        match self {
            Init::Zero => "init 0".into(),
            Init::One => "init 1".into(),
            Init::Constant(x) => format!("init {x}"),
            Init::Random { .. } => "init rand".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Init::Constant(x) if !(0.0..=1.0).contains(x) => Err(Error::InvalidParam(format!(
                "constant init must lie in [0, 1], got {x}"
            ))),
            _ => Ok(()),
        }
    }

    fn value(&self, v: usize, kind: ScoreKind) -> f64 {
        match *self {
            Init::Zero => 0.0,
            Init::One => 1.0,
            Init::Constant(x) => x,
            Init::Random { seed } => {
                let lane = match kind {
                    ScoreKind::Celebrity => 0,
                    ScoreKind::Spammer => 1,
                };
                let h = splitmix64(seed ^ splitmix64(2 * v as u64 + lane));
                (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
            }
        }
    }

    pub fn state(&self, n: usize) -> Result<ScoreState> {
        self.validate()?;
        Ok(ScoreState {
            c: (0..n)
                .map(|v| self.value(v, ScoreKind::Celebrity))
                .collect(),
            s: (0..n).map(|v| self.value(v, ScoreKind::Spammer)).collect(),
            iterations: 0,
        })
    }
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationConfig {
    /// Stop once the largest score change of an iteration falls below this.
    pub epsilon: f64,
    /// The loop also stops once the iteration counter exceeds this value.
    pub max_iterations: usize,
    pub init: Init,
    /// Evaluate the potential after every iteration (two quantiles per node).
    pub track_potential: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            epsilon: 1e-6,
            max_iterations: 50,
            init: Init::Zero,
            track_potential: true,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParam(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParam(
                "max_iterations must be at least 1".into(),
            ));
        }
        self.init.validate()
    }
}

/// Paired celebrity and spammer scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreState {
    pub c: Vec<f64>,
    pub s: Vec<f64>,
    pub iterations: usize,
}

impl ScoreState {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        for len in [self.c.len(), self.s.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: len,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `max(‖c - c_new‖∞, ‖s - s_new‖∞)`.
    pub delta_inf: f64,
    pub l1_c: f64,
    pub l1_s: f64,
    /// `P(c, s)` after the iteration; NaN when not tracked.
    pub potential: f64,
    /// `P_after - P_before` summed term by term over both phases; NaN when
    /// not tracked.
    pub potential_change: f64,
    pub millis: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    /// Potential of the initial state, when tracked.
    pub initial_potential: Option<f64>,
    pub records: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub state: ScoreState,
    pub trace: IterationTrace,
    /// `false` when the iteration cap was reached first.
    pub converged: bool,
}

/// One recomputed score vector together with its inputs and the resulting
/// potential change.
#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    pub values: Vec<f64>,
    /// Summed non-scores fed to the transfer function, per node.
    pub inputs: Vec<f64>,
    /// `P(after) - P(before)`; never positive up to rounding.
    pub potential_change: f64,
    /// Largest absolute change of a single score.
    pub max_move: f64,
}

/// Result of checking the ε-approximate fixed-point conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointCheck {
    pub within: bool,
    pub worst_residual: f64,
    pub worst_node: Option<usize>,
    pub worst_kind: ScoreKind,
}

/// Scoring engine bound to one arc set and one pair of transfer maps.
#[derive(Debug)]
pub struct ScRank<'a> {
    arcs: &'a ArcSet,
    fc: TransferMap,
    fs: TransferMap,
    exec: Executor,
}

impl<'a> ScRank<'a> {
    pub fn new(
        arcs: &'a ArcSet,
        fc: impl Into<TransferMap>,
        fs: impl Into<TransferMap>,
    ) -> Result<Self> {
        let fc = fc.into();
        let fs = fs.into();
        fc.check_len(arcs.node_count())?;
        fs.check_len(arcs.node_count())?;
        Ok(ScRank {
            arcs,
            fc,
            fs,
            exec: Executor::sequential(),
        })
    }

    pub fn with_parallelism(mut self, par: Parallelism) -> Result<Self> {
        self.exec = Executor::new(par)?;
        Ok(self)
    }

    pub fn arcs(&self) -> &ArcSet {
        self.arcs
    }

    pub fn celebrity_transfer(&self) -> &TransferMap {
        &self.fc
    }

    pub fn spammer_transfer(&self) -> &TransferMap {
        &self.fs
    }

    pub fn workers(&self) -> usize {
        self.exec.workers()
    }

    fn n(&self) -> usize {
        self.arcs.node_count()
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: v.len(),
            });
        }
        Ok(())
    }

    /// `Σ_{(u,v)∈A} (1 - s_u)`, summed in sorted-neighbor order.
    #[inline]
    pub fn celebrity_input(&self, v: usize, s: &[f64]) -> f64 {
        self.arcs
            .in_neighbors(v)
            .iter()
            .map(|&u| 1.0 - s[u as usize])
            .sum()
    }

    /// `Σ_{(v,u)∈A} (1 - c_u)`, summed in sorted-neighbor order.
    #[inline]
    pub fn spammer_input(&self, v: usize, c: &[f64]) -> f64 {
        self.arcs
            .out_neighbors(v)
            .iter()
            .map(|&u| 1.0 - c[u as usize])
            .sum()
    }

    fn inputs(&self, kind: ScoreKind, other: &[f64]) -> Vec<f64> {
        let mut inputs = vec![0.0; self.n()];
        match kind {
            ScoreKind::Celebrity => self
                .exec
                .fill(&mut inputs, |v| self.celebrity_input(v, other)),
            ScoreKind::Spammer => self
                .exec
                .fill(&mut inputs, |v| self.spammer_input(v, other)),
        }
        inputs
    }

    fn transfer(&self, kind: ScoreKind) -> &TransferMap {
        match kind {
            ScoreKind::Celebrity => &self.fc,
            ScoreKind::Spammer => &self.fs,
        }
    }

    fn apply(&self, kind: ScoreKind, inputs: &[f64]) -> Vec<f64> {
        let f = self.transfer(kind);
        let mut out = vec![0.0; self.n()];
        self.exec.fill(&mut out, |v| f.at(v).eval(inputs[v]));
        out
    }

    /// All celebrity scores recomputed from spammer scores `s`.
    pub fn celebrity_update(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.check_len(s)?;
        Ok(self.apply(ScoreKind::Celebrity, &self.inputs(ScoreKind::Celebrity, s)))
    }

    /// All spammer scores recomputed from celebrity scores `c`.
    pub fn spammer_update(&self, c: &[f64]) -> Result<Vec<f64>> {
        self.check_len(c)?;
        Ok(self.apply(ScoreKind::Spammer, &self.inputs(ScoreKind::Spammer, c)))
    }

    fn phase(&self, kind: ScoreKind, current: &[f64], other: &[f64], track: bool) -> Phase {
        let inputs = self.inputs(kind, other);
        let values = self.apply(kind, &inputs);
        let max_move = current
            .iter()
            .zip(&values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let potential_change = if track {
            let f = self.transfer(kind);
            let mut terms = vec![0.0; self.n()];
            self.exec.fill(&mut terms, |v| {
                f.at(v).descent(current[v], values[v], inputs[v])
            });
            compensated_sum(terms)
        } else {
            f64::NAN
        };
        Phase {
            values,
            inputs,
            potential_change,
            max_move,
        }
    }

    /// Phase 1: celebrity scores from `s`, with the potential change
    /// relative to `(c, s)`.
    pub fn celebrity_phase(&self, c: &[f64], s: &[f64]) -> Result<Phase> {
        self.check_len(c)?;
        self.check_len(s)?;
        Ok(self.phase(ScoreKind::Celebrity, c, s, true))
    }

    /// Phase 2: spammer scores from `c`, with the potential change relative
    /// to `(c, s)`.
    pub fn spammer_phase(&self, s: &[f64], c: &[f64]) -> Result<Phase> {
        self.check_len(c)?;
        self.check_len(s)?;
        Ok(self.phase(ScoreKind::Spammer, s, c, true))
    }

    /// `P(c, s)`. Bounded below by [`ScRank::potential_lower_bound`].
    pub fn potential(&self, state: &ScoreState) -> Result<f64> {
        state.check(self.n())?;
        let (c, s) = (&state.c, &state.s);
        for &x in c.iter().chain(s) {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParam(format!("score {x} outside [0, 1]")));
            }
        }
        let mut terms = vec![0.0; self.n()];
        self.exec.fill(&mut terms, |v| {
            (1.0 - c[v]) * self.celebrity_input(v, s)
                + self.fc.at(v).soft_step().inverse_integral(c[v])
                + self.fs.at(v).soft_step().inverse_integral(s[v])
        });
        Ok(compensated_sum(terms))
    }

    /// `Σ_v min G_c + min G_s`. `G` dips slightly below zero on `[0, F(0))`,
    /// so the potential is bounded below by this small negative number rather
    /// than by zero.
    pub fn potential_lower_bound(&self) -> f64 {
        self.fc.g_min_total(self.n()) + self.fs.g_min_total(self.n())
    }

    /// `max(α_c, α_s)`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.fc.lipschitz_bound().max(self.fs.lipschitz_bound())
    }

    /// Tolerance a state that stopped on `δ∞ < eps` is guaranteed to meet:
    /// the celebrity phase saw spammer scores one phase stale, which moves
    /// each celebrity residual by at most `α · degree · eps`.
    pub fn derived_tolerance(&self, eps: f64) -> f64 {
        eps * (1.0 + self.lipschitz_bound() * self.arcs.max_degree() as f64)
    }

    /// Largest residual of both fixed-point equations over all nodes.
    pub fn check_fixed_point(&self, state: &ScoreState, eps: f64) -> Result<FixedPointCheck> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParam(format!(
                "eps must be positive, got {eps}"
            )));
        }
        state.check(self.n())?;
        let mut worst = FixedPointCheck {
            within: true,
            worst_residual: 0.0,
            worst_node: None,
            worst_kind: ScoreKind::Celebrity,
        };
        for kind in [ScoreKind::Celebrity, ScoreKind::Spammer] {
            let (own, other) = match kind {
                ScoreKind::Celebrity => (&state.c, &state.s),
                ScoreKind::Spammer => (&state.s, &state.c),
            };
            let target = self.apply(kind, &self.inputs(kind, other));
            for (v, (a, b)) in own.iter().zip(&target).enumerate() {
                let r = (a - b).abs();
                if r > worst.worst_residual || worst.worst_node.is_none() {
                    worst.worst_residual = r;
                    worst.worst_node = Some(v);
                    worst.worst_kind = kind;
                }
            }
        }
        worst.within = worst.worst_residual <= eps;
        Ok(worst)
    }

    pub fn start(&self, cfg: IterationConfig) -> Result<Run<'_, 'a>> {
        self.start_from(cfg.init.state(self.n())?, cfg)
    }

    /// Starts from an explicit state; `cfg.init` is ignored.
    pub fn start_from(&self, state: ScoreState, cfg: IterationConfig) -> Result<Run<'_, 'a>> {
        cfg.validate()?;
        state.check(self.n())?;
        let initial_potential = if cfg.track_potential {
            Some(self.potential(&state)?)
        } else {
            None
        };
        Ok(Run {
            engine: self,
            cfg,
            state,
            trace: IterationTrace {
                initial_potential,
                records: Vec::new(),
            },
            last_delta: f64::INFINITY,
        })
    }

    /// Runs to convergence (`δ∞ < ε`) or until the counter exceeds `T`.
    pub fn iterate(&self, cfg: IterationConfig) -> Result<Outcome> {
        let mut run = self.start(cfg)?;
        while !run.is_done() {
            run.step();
        }
        Ok(run.finish())
    }
}

/// An iteration in progress; lets callers step several runs in lockstep.
#[derive(Debug)]
pub struct Run<'e, 'a> {
    engine: &'e ScRank<'a>,
    cfg: IterationConfig,
    state: ScoreState,
    trace: IterationTrace,
    last_delta: f64,
}

impl Run<'_, '_> {
    pub fn state(&self) -> &ScoreState {
        &self.state
    }

    pub fn trace(&self) -> &IterationTrace {
        &self.trace
    }

    pub fn converged(&self) -> bool {
        self.last_delta < self.cfg.epsilon
    }

    pub fn is_done(&self) -> bool {
        self.converged() || self.state.iterations > self.cfg.max_iterations
    }

    /// One full iteration: celebrity phase, then spammer phase.
    pub fn step(&mut self) -> IterationRecord {
        let started = Instant::now();
        let track = self.cfg.track_potential;
        let e = self.engine;
        let p1 = e.phase(ScoreKind::Celebrity, &self.state.c, &self.state.s, track);
        let p2 = e.phase(ScoreKind::Spammer, &self.state.s, &p1.values, track);
        let l1_c = l1(&self.state.c, &p1.values);
        let l1_s = l1(&self.state.s, &p2.values);
        let delta_inf = p1.max_move.max(p2.max_move);
        self.state.c = p1.values;
        self.state.s = p2.values;
        self.state.iterations += 1;
        self.last_delta = delta_inf;
        let (potential, potential_change) = if track {
            (
                e.potential(&self.state).unwrap_or(f64::NAN),
                p1.potential_change + p2.potential_change,
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        let record = IterationRecord {
            iteration: self.state.iterations,
            delta_inf,
            l1_c,
            l1_s,
            potential,
            potential_change,
            millis: started.elapsed().as_secs_f64() * 1e3,
        };
        self.trace.records.push(record);
        record
    }

    pub fn finish(self) -> Outcome {
        let converged = self.converged();
        Outcome {
            state: self.state,
            trace: self.trace,
            converged,
        }
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Celebrity scores `c_v = F_c(Σ_{(u,v)∈A} (1 - s_u))`.
pub fn celebrity_update(a: &ArcSet, s: &[f64], f_c: &TransferMap) -> Result<Vec<f64>> {
    ScRank::new(a, f_c.clone(), f_c.clone())?.celebrity_update(s)
}

/// Spammer scores `s_v = F_s(Σ_{(v,u)∈A} (1 - c_u))`.
pub fn spammer_update(a: &ArcSet, c: &[f64], f_s: &TransferMap) -> Result<Vec<f64>> {
    ScRank::new(a, f_s.clone(), f_s.clone())?.spammer_update(c)
}

pub fn iterate(
    a: &ArcSet,
    f_c: &TransferMap,
    f_s: &TransferMap,
    cfg: IterationConfig,
) -> Result<Outcome> {
    ScRank::new(a, f_c.clone(), f_s.clone())?.iterate(cfg)
}

pub fn potential(
    a: &ArcSet,
    state: &ScoreState,
    f_c: &TransferMap,
    f_s: &TransferMap,
) -> Result<f64> {
    ScRank::new(a, f_c.clone(), f_s.clone())?.potential(state)
}

pub fn is_eps_fixed_point(
    a: &ArcSet,
    state: &ScoreState,
    f_c: &TransferMap,
    f_s: &TransferMap,
    eps: f64,
) -> Result<FixedPointCheck> {
    ScRank::new(a, f_c.clone(), f_s.clone())?.check_fixed_point(state, eps)
}

pub fn lipschitz_bound(f: &TransferFunction) -> f64 {
    f.lipschitz_bound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;
    use proptest::prelude::*;

    fn tf(mu: f64, sigma: f64) -> (TransferMap, TransferMap) {
        (
            TransferFunction::celebrity(mu, sigma).unwrap().into(),
            TransferFunction::spammer(mu, sigma).unwrap().into(),
        )
    }

    fn arcs(n: usize, list: &[(u32, u32)]) -> ArcSet {
        ArcSet::from_unreciprocated_arcs(n, list.iter().copied()).unwrap()
    }

    #[test]
    fn empty_arc_set_updates_to_f_of_zero() {
        let a = ArcSet::empty(3);
        let (fc, fs) = tf(100.0, 25.0);
        let f0 = fc.at(0).eval(0.0);
        for s in [vec![0.0; 3], vec![0.3, 1.0, 0.9]] {
            assert_eq!(celebrity_update(&a, &s, &fc).unwrap(), vec![f0; 3]);
            assert_eq!(spammer_update(&a, &s, &fs).unwrap(), vec![f0; 3]);
        }
        assert!(matches!(
            celebrity_update(&a, &[0.0; 2], &fc),
            Err(Error::LengthMismatch {
                expected: 3,
                actual: 2
            })
        ));
    }

    #[test]
    fn single_arc_updates() {
        let a = arcs(2, &[(0, 1)]);
        let (fc, _) = tf(0.5, 0.1);
        let c = celebrity_update(&a, &[0.0, 0.0], &fc).unwrap();
        assert!((c[1] - 0.999_999_713_348_428).abs() < 1e-13);
        assert_eq!(c[0], fc.at(0).eval(0.0));
        let c = celebrity_update(&a, &[1.0, 0.0], &fc).unwrap();
        assert_eq!(c[1], fc.at(1).eval(0.0));
    }

    #[test]
    fn spammer_update_examples() {
        let k = 6u32;
        let a = arcs(k as usize + 1, &(1..=k).map(|u| (0, u)).collect::<Vec<_>>());
        let fs: TransferMap = TransferFunction::spammer(k as f64, 2.0).unwrap().into();
        let s = spammer_update(&a, &vec![0.0; k as usize + 1], &fs).unwrap();
        assert_eq!(s[0], 0.5);
        let s = spammer_update(&a, &vec![1.0; k as usize + 1], &fs).unwrap();
        assert_eq!(s[0], fs.at(0).eval(0.0));
    }

    #[test]
    fn empty_graph_converges_in_two_iterations() {
        let a = ArcSet::empty(4);
        let (fc, fs) = tf(100.0, 25.0);
        let out = iterate(&a, &fc, &fs, IterationConfig::default()).unwrap();
        assert!(out.converged);
        assert_eq!(out.state.iterations, 2);
        assert_eq!(out.trace.records.len(), 2);
        let f0 = fc.at(0).eval(0.0);
        assert!(out.state.c.iter().chain(&out.state.s).all(|&x| x == f0));
        let check = is_eps_fixed_point(&a, &out.state, &fc, &fs, 1e-12).unwrap();
        assert!(check.within);
        assert_eq!(check.worst_residual, 0.0);
    }

    #[test]
    fn iteration_cap_counts_like_algorithm_one() {
        let list: Vec<_> = (0..200u32)
            .map(|u| (u, (u * 7 + 3) % 200))
            .chain((0..200u32).map(|u| (u, (u * 13 + 5) % 200)))
            .collect();
        let (g, _) = DirectedGraph::from_arcs(200, list).unwrap();
        let a = crate::graph::unreciprocated(&g);
        let (fc, fs) = tf(1.5, 1.0);
        let cfg = IterationConfig {
            epsilon: 1e-300,
            max_iterations: 3,
            ..Default::default()
        };
        let out = iterate(&a, &fc, &fs, cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.state.iterations, 4);
    }

    #[test]
    fn potential_examples() {
        let (fc, fs) = tf(100.0, 25.0);
        let zero = |n| ScoreState {
            c: vec![0.0; n],
            s: vec![0.0; n],
            iterations: 0,
        };
        assert_eq!(
            potential(&ArcSet::empty(3), &zero(3), &fc, &fs).unwrap(),
            0.0
        );
        let a = arcs(2, &[(0, 1)]);
        assert_eq!(potential(&a, &zero(2), &fc, &fs).unwrap(), 1.0);
        let ones = ScoreState {
            c: vec![1.0; 2],
            s: vec![1.0; 2],
            iterations: 0,
        };
        assert!((potential(&a, &ones, &fc, &fs).unwrap() - 400.0).abs() < 1e-12);
        let bad = ScoreState {
            c: vec![1.5; 2],
            s: vec![0.0; 2],
            iterations: 0,
        };
        assert!(potential(&a, &bad, &fc, &fs).is_err());
    }

    #[test]
    fn random_init_is_reproducible_and_in_range() {
        let a = Init::Random { seed: 9 }.state(1000).unwrap();
        let b = Init::Random { seed: 9 }.state(1000).unwrap();
        assert_eq!(a, b);
        assert!(a.c.iter().chain(&a.s).all(|&x| (0.0..1.0).contains(&x)));
        assert_ne!(a.c, a.s);
        let mean: f64 = a.c.iter().sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05);
        // order independent: a prefix of a larger state matches
        let big = Init::Random { seed: 9 }.state(2000).unwrap();
        assert_eq!(&big.c[..1000], &a.c[..]);
        assert!(Init::Constant(1.5).state(2).is_err());
    }

    #[test]
    fn dense_random_half_state_is_not_fixed() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 300u32;
        let mut list = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(0.3) {
                    list.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
                }
            }
        }
        let a = arcs(n as usize, &list);
        let (fc, fs) = tf(5.0, 1.0);
        let half = Init::Constant(0.5).state(n as usize).unwrap();
        let check = is_eps_fixed_point(&a, &half, &fc, &fs, 1e-3).unwrap();
        assert!(!check.within);
        assert!(check.worst_residual > 0.4, "{}", check.worst_residual);
    }

    #[test]
    fn phases_are_worker_count_independent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 20_000u32;
        let list: Vec<_> = (0..200_000)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let (g, _) = DirectedGraph::from_arcs(n as usize, list).unwrap();
        let a = crate::graph::unreciprocated(&g);
        let (fc, fs) = tf(8.0, 2.0);
        let cfg = IterationConfig {
            init: Init::Random { seed: 1 },
            ..Default::default()
        };
        let seq = ScRank::new(&a, fc.clone(), fs.clone())
            .unwrap()
            .iterate(cfg)
            .unwrap();
        for t in [2, 4] {
            let par = ScRank::new(&a, fc.clone(), fs.clone())
                .unwrap()
                .with_parallelism(Parallelism::Threads(t))
                .unwrap()
                .iterate(cfg)
                .unwrap();
            assert_eq!(seq.state, par.state);
            let bits = |o: &Outcome| {
                o.trace
                    .records
                    .iter()
                    .map(|r| r.potential.to_bits())
                    .collect::<Vec<_>>()
            };
            assert_eq!(bits(&seq), bits(&par));
        }
    }

    #[test]
    fn per_vertex_transfer_overrides() {
        let a = arcs(3, &[(0, 1), (0, 2)]);
        let fc = TransferMap::PerVertex(vec![
            TransferFunction::celebrity(1.0, 1.0).unwrap(),
            TransferFunction::celebrity(0.0, 0.5).unwrap(),
            TransferFunction::celebrity(5.0, 2.0).unwrap(),
        ]);
        let (_, fs) = tf(1.0, 0.5);
        let engine = ScRank::new(&a, fc.clone(), fs.clone()).unwrap();
        assert!((engine.lipschitz_bound() - fs.at(0).lipschitz_bound()).abs() < 1e-15);
        let c = engine.celebrity_update(&[0.0; 3]).unwrap();
        assert_eq!(c[1], crate::special::normal_cdf(2.0));
        assert_eq!(c[2], crate::special::normal_cdf(-2.0));
        let short = TransferMap::PerVertex(vec![TransferFunction::celebrity(1.0, 1.0).unwrap()]);
        assert!(ScRank::new(&a, short, fs).is_err());
    }

    fn arb_instance() -> impl Strategy<Value = (usize, Vec<(u32, u32)>, f64, f64, f64, f64, u64)> {
        (2usize..60).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((0..n as u32, 0..n as u32), 0..400),
                0.0f64..20.0,
                0.2f64..10.0,
                0.0f64..20.0,
                0.2f64..10.0,
                any::<u64>(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn potential_never_increases((n, list, muc, sgc, mus, sgs, seed) in arb_instance()) {
            let (g, _) = DirectedGraph::from_arcs(n, list).unwrap();
            let a = crate::graph::unreciprocated(&g);
            let fc = TransferFunction::celebrity(muc, sgc).unwrap();
            let fs = TransferFunction::spammer(mus, sgs).unwrap();
            let engine = ScRank::new(&a, fc, fs).unwrap();
            for init in Init::standard_set(seed) {
                let out = engine.iterate(IterationConfig { init, ..Default::default() }).unwrap();
                let mut prev = out.trace.initial_potential.unwrap();
                for r in &out.trace.records {
                    prop_assert!(r.potential_change <= 1e-12, "{:?}", r);
                    if r.delta_inf > 1e-9 {
                        prop_assert!(r.potential_change < 0.0, "{:?}", r);
                    }
                    // absolute values agree with the term-by-term change
                    prop_assert!((r.potential - prev - r.potential_change).abs() <= 1e-9 * (1.0 + prev.abs()));
                    prop_assert!(r.potential >= engine.potential_lower_bound() - 1e-9);
                    prev = r.potential;
                }
                if out.converged {
                    let tol = engine.derived_tolerance(1e-6);
                    prop_assert!(engine.check_fixed_point(&out.state, tol).unwrap().within);
                }
                prop_assert!(out.state.c.iter().chain(&out.state.s).all(|x| (0.0..=1.0).contains(x)));
            }
        }

        #[test]
        fn updates_are_antitone((n, list, muc, sgc, _mus, _sgs, seed) in arb_instance(), bump in 0usize..60) {
            let (g, _) = DirectedGraph::from_arcs(n, list).unwrap();
            let a = crate::graph::unreciprocated(&g);
            let engine = ScRank::new(&a, TransferFunction::celebrity(muc, sgc).unwrap(), TransferFunction::spammer(muc, sgc).unwrap()).unwrap();
            let s = Init::Random { seed }.state(n).unwrap().s;
            let u = bump % n;
            let mut s2 = s.clone();
            s2[u] = (s2[u] + 0.5).min(1.0);
            let c1 = engine.celebrity_update(&s).unwrap();
            let c2 = engine.celebrity_update(&s2).unwrap();
            for v in 0..n {
                if a.contains(u as u32, v as u32) {
                    prop_assert!(c2[v] <= c1[v]);
                } else {
                    prop_assert_eq!(c2[v], c1[v]);
                }
            }
            // sequential per-node updates reproduce the simultaneous phase
            let mut seq = vec![0.0; n];
            for v in (0..n).rev() {
                seq[v] = engine.celebrity_transfer().at(v).eval(engine.celebrity_input(v, &s));
            }
            prop_assert_eq!(seq, c1);
        }
    }
}
