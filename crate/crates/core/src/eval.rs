//! Experiment harness: convergence traces, cross-initialization distances,
//! score histograms, and precision/recall against planted truth.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{unreciprocated, ArcSet, DirectedGraph};
use crate::par::Executor;
use crate::scrank::{Init, IterationConfig, IterationRecord, ScRank, ScoreState};
use crate::synthgen::{GroundTruth, PlantedInstance};
use crate::transfer::TransferFunction;

/// Borrowed `(graph, truth)` pairs of planted instances, for [`pr_sweep`].
pub fn labeled(instances: &[PlantedInstance]) -> Vec<(&DirectedGraph, &GroundTruth)> {
    instances.iter().map(|i| (&i.graph, &i.truth)).collect()
}

/// Iterations skipped before fitting a decay rate.
pub const DEFAULT_BURN_IN: usize = 2;

/// Least-squares fit of `log y_t = a + t log r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// Per-iteration ratio `r`.
    pub rate: f64,
    /// `a` in natural-log units.
    pub intercept: f64,
    /// Sum of squared residuals in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fits a geometric decay to `values[burn_in..]`, with `t` the index into
/// `values`. Stops at the first non-positive value; needs two points.
pub fn fit_geometric_decay(values: &[f64], burn_in: usize) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .skip(burn_in)
        .take_while(|(_, &y)| y > 0.0 && y.is_finite())
        .map(|(t, &y)| (t as f64, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Some(DecayFit {
        rate: slope.exp(),
        intercept,
        residual,
        points: pts.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub init: String,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    /// Fit over `l1_c + l1_s` after the burn-in.
    pub decay: Option<DecayFit>,
}

impl ConvergenceReport {
    pub fn l1_c(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.l1_c).collect()
    }

    pub fn l1_s(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.l1_s).collect()
    }

    /// `l1_c + l1_s` per iteration.
    pub fn l1_total(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.l1_c + r.l1_s).collect()
    }

    /// Ratios of successive totals from the burn-in on.
    pub fn ratios(&self, burn_in: usize) -> Vec<f64> {
        let t = self.l1_total();
        t.windows(2)
            .skip(burn_in.saturating_sub(1))
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Runs one iteration per init and records its l1 deltas.
pub fn convergence_experiment(
    engine: &ScRank<'_>,
    inits: &[Init],
    epsilon: f64,
    max_iterations: usize,
    burn_in: usize,
) -> Result<Vec<ConvergenceReport>> {
    if inits.is_empty() {
        return Err(Error::InvalidParam(
            "at least one initialization is required".into(),
        ));
    }
    inits
        .iter()
        .map(|&init| {
            let cfg = IterationConfig {
                epsilon,
                max_iterations,
                init,
                track_potential: false,
            };
            let out = engine.iterate(cfg)?;
            let mut report = ConvergenceReport {
                init: init.label(),
                records: out.trace.records,
                converged: out.converged,
                decay: None,
            };
            report.decay = fit_geometric_decay(&report.l1_total(), burn_in);
            Ok(report)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub pair: String,
    /// Entry `t` is the distance after `t` iterations; entry 0 is the
    /// distance between the initial states.
    pub l1_c: Vec<f64>,
    pub l1_s: Vec<f64>,
    pub linf: Vec<f64>,
    pub both_converged: bool,
}

impl UniquenessReport {
    pub fn l1_total(&self) -> Vec<f64> {
        self.l1_c
            .iter()
            .zip(&self.l1_s)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn final_linf(&self) -> f64 {
        *self.linf.last().unwrap_or(&0.0)
    }
}

fn distances(a: &ScoreState, b: &ScoreState) -> (f64, f64, f64) {
    let mut linf = 0.0f64;
    let mut part = |x: &[f64], y: &[f64]| {
        x.iter().zip(y).fold(0.0, |acc, (p, q)| {
            let d = (p - q).abs();
            linf = linf.max(d);
            acc + d
        })
    };
    let c = part(&a.c, &b.c);
    let s = part(&a.s, &b.s);
    (c, s, linf)
}

/// Runs both inits of each pair in lockstep and records their distance after
/// every iteration. A run that has stopped keeps its final state while the
/// other continues.
pub fn uniqueness_experiment(
    engine: &ScRank<'_>,
    pairs: &[(Init, Init)],
    epsilon: f64,
    max_iterations: usize,
) -> Result<Vec<UniquenessReport>> {
    pairs
        .iter()
        .map(|&(x, y)| {
            let cfg = |init| IterationConfig {
                epsilon,
                max_iterations,
                init,
                track_potential: false,
            };
            let mut a = engine.start(cfg(x))?;
            let mut b = engine.start(cfg(y))?;
            let mut report = UniquenessReport {
                pair: format!("{} vs {}", x.label(), y.label()),
                l1_c: Vec::new(),
                l1_s: Vec::new(),
                linf: Vec::new(),
                both_converged: false,
            };
            loop {
                let (c, s, m) = distances(a.state(), b.state());
                report.l1_c.push(c);
                report.l1_s.push(s);
                report.linf.push(m);
                if a.is_done() && b.is_done() {
                    break;
                }
                if !a.is_done() {
                    a.step();
                }
                if !b.is_done() {
                    b.step();
                }
            }
            report.both_converged = a.converged() && b.converged();
            Ok(report)
        })
        .collect()
}

/// Thresholded detection quality for one class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassMetrics {
    pub predicted: usize,
    pub true_positives: usize,
    pub truth_size: usize,
    /// `None` when nothing exceeds the threshold.
    pub precision: Option<f64>,
    pub recall: f64,
}

impl ClassMetrics {
    pub fn new(scores: &[f64], members: &[crate::graph::NodeId], threshold: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParam("empty truth set".into()));
        }
        let predicted = scores.iter().filter(|&&x| x > threshold).count();
        let mut true_positives = 0;
        for &v in members {
            let x = *scores.get(v as usize).ok_or(Error::OutOfRange {
                index: v as usize,
                len: scores.len(),
            })?;
            if x > threshold {
                true_positives += 1;
            }
        }
        Ok(ClassMetrics {
            predicted,
            true_positives,
            truth_size: members.len(),
            precision: (predicted > 0).then(|| true_positives as f64 / predicted as f64),
            recall: true_positives as f64 / members.len() as f64,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionRecall {
    pub threshold: f64,
    pub celebrity: ClassMetrics,
    pub spammer: ClassMetrics,
}

pub fn precision_recall(
    state: &ScoreState,
    truth: &GroundTruth,
    threshold: f64,
) -> Result<PrecisionRecall> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParam(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    Ok(PrecisionRecall {
        threshold,
        celebrity: ClassMetrics::new(&state.c, &truth.celebrities, threshold)?,
        spammer: ClassMetrics::new(&state.s, &truth.spammers, threshold)?,
    })
}

/// Transfer-function parameters for one point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub mu_c: f64,
    pub sigma_c: f64,
    pub mu_s: f64,
    pub sigma_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepResult {
    pub instance: usize,
    pub point: SweepPoint,
    pub pr: PrecisionRecall,
    pub converged: bool,
    pub iterations: usize,
}

/// Scores every `(graph, truth)` instance at every grid point and evaluates
/// at `threshold`. Jobs run on `exec`; each individual run is sequential.
pub fn pr_sweep(
    instances: &[(&DirectedGraph, &GroundTruth)],
    grid: &[SweepPoint],
    cfg: IterationConfig,
    threshold: f64,
    exec: &Executor,
) -> Result<Vec<SweepResult>> {
    if grid.is_empty() {
        return Err(Error::InvalidParam("empty parameter grid".into()));
    }
    let arcs: Vec<ArcSet> = exec.map(instances, |(g, _)| unreciprocated(g));
    let jobs: Vec<(usize, SweepPoint)> = (0..instances.len())
        .flat_map(|i| grid.iter().map(move |&p| (i, p)))
        .collect();
    exec.map(&jobs, |&(i, point)| {
        let fc = TransferFunction::celebrity(point.mu_c, point.sigma_c)?;
        let fs = TransferFunction::spammer(point.mu_s, point.sigma_s)?;
        let out = ScRank::new(&arcs[i], fc, fs)?.iterate(IterationConfig {
            track_potential: false,
            ..cfg
        })?;
        Ok(SweepResult {
            instance: i,
            point,
            pr: precision_recall(&out.state, instances[i].1, threshold)?,
            converged: out.converged,
            iterations: out.state.iterations,
        })
    })
    .into_iter()
    .collect()
}

/// Fixed-width histogram over `[0, 1]` for all vertices and a planted subset.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub all: Vec<usize>,
    pub planted: Vec<usize>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.all.len()
    }

    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        let w = 1.0 / self.bins() as f64;
        (k as f64 * w, (k + 1) as f64 * w)
    }

    /// Density of bin `k` (integrates to one over `[0, 1]`).
    pub fn density(counts: &[usize], k: usize) -> f64 {
        let total: usize = counts.iter().sum();
        if total == 0 {
            0.0
        } else {
            counts[k] as f64 * counts.len() as f64 / total as f64
        }
    }

    fn build(scores: &[f64], members: &[bool], bins: usize) -> Self {
        let mut h = Histogram {
            all: vec![0; bins],
            planted: vec![0; bins],
        };
        for (v, &x) in scores.iter().enumerate() {
            let k = ((x * bins as f64) as usize).min(bins - 1);
            h.all[k] += 1;
            if members[v] {
                h.planted[k] += 1;
            }
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramSet {
    pub celebrity: Histogram,
    pub spammer: Histogram,
}

/// Celebrity scores binned with `C` as the planted subset, spammer scores
/// with `S`.
pub fn score_histograms(
    state: &ScoreState,
    truth: &GroundTruth,
    bins: usize,
) -> Result<HistogramSet> {
    if bins < 2 {
        return Err(Error::InvalidParam(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let n = state.len();
    if let Some(&v) = truth
        .celebrities
        .iter()
        .chain(&truth.spammers)
        .find(|&&v| v as usize >= n)
    {
        return Err(Error::OutOfRange {
            index: v as usize,
            len: n,
        });
    }
    Ok(HistogramSet {
        celebrity: Histogram::build(&state.c, &truth.celebrity_mask(n), bins),
        spammer: Histogram::build(&state.s, &truth.spammer_mask(n), bins),
    })
}

fn log10_or_na(x: f64) -> String {
    if x > 0.0 {
        format!("{:.6}", x.log10())
    } else {
        "NA".into()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| format!("{v:.6}"))
}

pub fn write_convergence_csv<W: Write>(
    mut w: W,
    reports: &[ConvergenceReport],
) -> std::io::Result<()> {
    writeln!(w, "init,iteration,l1_c,l1_s,log10_l1_c,log10_l1_s")?;
    for r in reports {
        for rec in &r.records {
            writeln!(
                w,
                "{},{},{:e},{:e},{},{}",
                r.init,
                rec.iteration,
                rec.l1_c,
                rec.l1_s,
                log10_or_na(rec.l1_c),
                log10_or_na(rec.l1_s)
            )?;
        }
    }
    Ok(())
}

pub fn write_uniqueness_csv<W: Write>(
    mut w: W,
    reports: &[UniquenessReport],
) -> std::io::Result<()> {
    writeln!(w, "pair,iteration,l1_c,l1_s,linf,log10_l1_c,log10_l1_s")?;
    for r in reports {
        for t in 0..r.l1_c.len() {
            writeln!(
                w,
                "{},{},{:e},{:e},{:e},{},{}",
                r.pair,
                t,
                r.l1_c[t],
                r.l1_s[t],
                r.linf[t],
                log10_or_na(r.l1_c[t]),
                log10_or_na(r.l1_s[t])
            )?;
        }
    }
    Ok(())
}

pub fn write_pr_csv<W: Write>(mut w: W, results: &[SweepResult]) -> std::io::Result<()> {
    writeln!(
        w,
        "instance,mu_c,sigma_c,mu_s,sigma_s,threshold,precision_c,recall_c,precision_s,recall_s,\
         predicted_c,true_positive_c,predicted_s,true_positive_s,converged"
    )?;
    for r in results {
        let (c, s) = (&r.pr.celebrity, &r.pr.spammer);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.6},{},{:.6},{},{},{},{},{}",
            r.instance,
            r.point.mu_c,
            r.point.sigma_c,
            r.point.mu_s,
            r.point.sigma_s,
            r.pr.threshold,
            opt(c.precision),
            c.recall,
            opt(s.precision),
            s.recall,
            c.predicted,
            c.true_positives,
            s.predicted,
            s.true_positives,
            r.converged
        )?;
    }
    Ok(())
}

pub fn write_hist_csv<W: Write>(mut w: W, set: &HistogramSet) -> std::io::Result<()> {
    writeln!(
        w,
        "bin_lo,bin_hi,all_count,planted_count,score,all_density,planted_density,\
         log10_all_density,log10_planted_density"
    )?;
    for (name, h) in [("celebrity", &set.celebrity), ("spammer", &set.spammer)] {
        for k in 0..h.bins() {
            let (lo, hi) = h.bin_edges(k);
            let da = Histogram::density(&h.all, k);
            let dp = Histogram::density(&h.planted, k);
            writeln!(
                w,
                "{lo},{hi},{},{},{name},{da:.6},{dp:.6},{},{}",
                h.all[k],
                h.planted[k],
                log10_or_na(da),
                log10_or_na(dp)
            )?;
        }
    }
    Ok(())
}
