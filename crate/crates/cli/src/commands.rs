use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use scrank::eval::{self, SweepPoint};
use scrank::muesli::{self, ActivationSequence, MuesliSystem, Weights};
use scrank::synthgen::{self, HModel, UndirectedGraph};
use scrank::{
    io, unreciprocated, DirectedGraph, GeneratorParams, GroundTruth, Init, Parallelism, RunConfig,
    ScRank, ScoreState,
};

use crate::manifest::Manifest;
use crate::Status;

/// Peak memory above which `generate` warns.
const MEMORY_WARNING_BYTES: f64 = 4.0 * (1u64 << 30) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Convergence,
    Uniqueness,
    Pr,
    Hist,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Connectivity,
    Party,
    Tech,
}

pub struct EvalInputs<'a> {
    pub graph: Option<&'a Path>,
    pub scores: Option<&'a Path>,
    pub truth: Option<&'a Path>,
    pub mu_c_grid: &'a [f64],
    pub mu_s_grid: &'a [f64],
}

pub struct MuesliRun<'a> {
    pub system: Option<&'a Path>,
    pub builtin: Option<Builtin>,
    pub activation: &'a str,
    pub eps: f64,
    pub max_steps: u64,
    pub steepness: f64,
}

fn create(dir: &Path, name: &str) -> Result<(std::path::PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

/// Writes through `emit` into `dir/name` and records the file in `manifest`.
fn emit<F>(dir: &Path, name: &str, manifest: &mut Manifest, emit: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let (path, mut w) = create(dir, name)?;
    emit(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("cannot write {}", path.display()))?;
    manifest.output(&path)
}

pub fn generate(cfg: &RunConfig, out: &Path, dry_run: bool) -> Result<Status> {
    let params = cfg.generator_params()?;
    let expected = synthgen::expected_stats(&params)?;
    let memory = expected.memory_estimate_bytes(params.n);
    if memory > MEMORY_WARNING_BYTES {
        eprintln!(
            "warning: about {:.3e} arcs expected; building the graph needs roughly {:.1} GiB",
            expected.total_arcs(),
            memory / (1u64 << 30) as f64
        );
    }
    if dry_run {
        println!(
            "expected h_edges={:.1} reciprocated={:.1} spam_arcs={:.1} celebrity_arcs={:.1}",
            expected.h_edges.mean,
            expected.reciprocated_pairs.mean,
            expected.spam_arcs.mean,
            expected.celebrity_arcs.mean
        );
        return Ok(Status::Ok);
    }
    let inst = synthgen::generate(&params)?;
    let files = io::write_instance(out, &inst)?;
    let st = inst.stats;
    for (name, realized, m) in [
        ("h_edges", st.h_edges, expected.h_edges),
        (
            "reciprocated_pairs",
            st.reciprocated_pairs,
            expected.reciprocated_pairs,
        ),
        ("spam_arcs", st.spam_arcs, expected.spam_arcs),
        ("celebrity_arcs", st.celebrity_arcs, expected.celebrity_arcs),
    ] {
        println!(
            "{name}: realized={realized} expected={:.1} z={:.2}",
            m.mean,
            m.z_score(realized as f64)
        );
    }
    println!("{}", inst.graph.summary());
    let mut lines = params.describe();
    lines.extend(cfg.describe());
    let mut manifest = Manifest::new("generate", lines);
    manifest.output(&files.graph)?;
    manifest.output(&files.truth)?;
    manifest.write(out)?;
    Ok(Status::Ok)
}

fn engine<'a>(cfg: &RunConfig, a: &'a scrank::ArcSet) -> Result<ScRank<'a>> {
    Ok(
        ScRank::new(a, cfg.celebrity_transfer()?, cfg.spammer_transfer()?)?
            .with_parallelism(Parallelism::threads(cfg.threads))?,
    )
}

fn load_graph(path: &Path, manifest: &mut Manifest) -> Result<DirectedGraph> {
    let (g, report) = DirectedGraph::load_edge_list(path)?;
    manifest.input(path)?;
    eprintln!(
        "loaded {}: {} lines, {} self-loops dropped, {} duplicates collapsed; {}",
        path.display(),
        report.lines,
        report.self_loops_dropped,
        report.duplicates_collapsed,
        g.summary()
    );
    Ok(g)
}

pub fn rank(cfg: &RunConfig, graph: &Path, out: &Path) -> Result<Status> {
    let mut manifest = Manifest::new("rank", cfg.describe());
    let g = load_graph(graph, &mut manifest)?;
    let a = unreciprocated(&g);
    let engine = engine(cfg, &a)?;
    let outcome = engine.iterate(cfg.iteration()?)?;
    let check = engine.check_fixed_point(&outcome.state, engine.derived_tolerance(cfg.epsilon))?;
    emit(out, "scores.tsv", &mut manifest, |w| {
        io::write_scores(w, g.labels(), &outcome.state)
    })?;
    emit(out, "trace.csv", &mut manifest, |w| {
        io::write_trace(w, &outcome.trace)
    })?;
    manifest.write(out)?;
    println!(
        "iterations={} converged={} worst_residual={:e} within_tolerance={}",
        outcome.state.iterations, outcome.converged, check.worst_residual, check.within
    );
    Ok(if outcome.converged {
        Status::Ok
    } else {
        Status::NotConverged
    })
}

/// Scores from a file (labels matched against the truth) or by ranking.
fn scored(
    cfg: &RunConfig,
    inputs: &EvalInputs<'_>,
    manifest: &mut Manifest,
) -> Result<(ScoreState, Option<GroundTruth>)> {
    if let Some(path) = inputs.scores {
        let (labels, state) = io::read_scores(io::open(path)?)?;
        manifest.input(path)?;
        let truth = match inputs.truth {
            Some(t) => {
                let index: std::collections::HashMap<&str, u32> = labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.as_str(), i as u32))
                    .collect();
                manifest.input(t)?;
                Some(io::read_truth(io::open(t)?, |l| index.get(l).copied())?)
            }
            None => None,
        };
        return Ok((state, truth));
    }
    let Some(gp) = inputs.graph else {
        bail!(scrank::Error::InvalidParam(
            "--graph or --scores is required".into()
        ))
    };
    let g = load_graph(gp, manifest)?;
    let truth = match inputs.truth {
        Some(t) => {
            manifest.input(t)?;
            Some(io::read_truth(io::open(t)?, |l| g.labels().id(l))?)
        }
        None => None,
    };
    let a = unreciprocated(&g);
    let outcome = engine(cfg, &a)?.iterate(cfg.iteration()?)?;
    Ok((outcome.state, truth))
}

fn require<T>(x: Option<T>, what: &str) -> Result<T> {
    x.ok_or_else(|| {
        scrank::Error::InvalidParam(format!("{what} is required for this experiment")).into()
    })
}

pub fn eval(
    cfg: &RunConfig,
    experiment: Experiment,
    inputs: &EvalInputs<'_>,
    out: &Path,
) -> Result<Status> {
    let mut manifest = Manifest::new(
        &format!("eval {experiment:?}").to_lowercase(),
        cfg.describe(),
    );
    match experiment {
        Experiment::Convergence | Experiment::Uniqueness => {
            let g = load_graph(require(inputs.graph, "--graph")?, &mut manifest)?;
            let a = unreciprocated(&g);
            let engine = engine(cfg, &a)?;
            if experiment == Experiment::Convergence {
                let reports = eval::convergence_experiment(
                    &engine,
                    &Init::standard_set(cfg.seed),
                    cfg.epsilon,
                    cfg.max_iters,
                    cfg.burn_in,
                )?;
                for r in &reports {
                    let rate = r
                        .decay
                        .map_or_else(|| "NA".into(), |d| format!("{:.4}", d.rate));
                    println!(
                        "{}: iterations={} converged={} decay_rate={rate}",
                        r.init,
                        r.records.len(),
                        r.converged
                    );
                }
                emit(out, "convergence.csv", &mut manifest, |w| {
                    eval::write_convergence_csv(w, &reports)
                })?;
            } else {
                let pairs = [(Init::Zero, Init::One), (Init::Zero, Init::Constant(0.5))];
                let reports =
                    eval::uniqueness_experiment(&engine, &pairs, cfg.epsilon, cfg.max_iters)?;
                for r in &reports {
                    println!(
                        "{}: final_linf={:e} final_l1={:e}",
                        r.pair,
                        r.final_linf(),
                        r.l1_total().last().unwrap_or(&0.0)
                    );
                }
                emit(out, "uniqueness.csv", &mut manifest, |w| {
                    eval::write_uniqueness_csv(w, &reports)
                })?;
            }
        }
        Experiment::Pr | Experiment::Hist => {
            let (state, truth) = scored(cfg, inputs, &mut manifest)?;
            let truth = require(truth, "--truth")?;
            if experiment == Experiment::Pr {
                let pr = eval::precision_recall(&state, &truth, cfg.threshold)?;
                let point = SweepPoint {
                    mu_c: cfg.mu_c,
                    sigma_c: cfg.sigma_c,
                    mu_s: cfg.mu_s,
                    sigma_s: cfg.sigma_s,
                };
                let row = eval::SweepResult {
                    instance: 0,
                    point,
                    pr,
                    converged: true,
                    iterations: state.iterations,
                };
                emit(out, "pr.csv", &mut manifest, |w| {
                    eval::write_pr_csv(w, &[row])
                })?;
            } else {
                let h = eval::score_histograms(&state, &truth, cfg.bins)?;
                emit(out, "hist.csv", &mut manifest, |w| {
                    eval::write_hist_csv(w, &h)
                })?;
            }
        }
        Experiment::Sweep => {
            let gp = require(inputs.graph, "--graph")?;
            let tp = require(inputs.truth, "--truth")?;
            let g = load_graph(gp, &mut manifest)?;
            manifest.input(tp)?;
            let truth = io::read_truth(io::open(tp)?, |l| g.labels().id(l))?;
            let mu_c: Vec<f64> = if inputs.mu_c_grid.is_empty() {
                vec![cfg.mu_c]
            } else {
                inputs.mu_c_grid.to_vec()
            };
            let mu_s: Vec<f64> = if inputs.mu_s_grid.is_empty() {
                vec![cfg.mu_s]
            } else {
                inputs.mu_s_grid.to_vec()
            };
            let grid: Vec<SweepPoint> = mu_c
                .iter()
                .flat_map(|&c| mu_s.iter().map(move |&s| (c, s)))
                .map(|(c, s)| SweepPoint {
                    mu_c: c,
                    sigma_c: cfg.sigma_c,
                    mu_s: s,
                    sigma_s: cfg.sigma_s,
                })
                .collect();
            let exec = scrank::Executor::new(Parallelism::threads(cfg.threads))?;
            let results = eval::pr_sweep(
                &[(&g, &truth)],
                &grid,
                cfg.iteration()?,
                cfg.threshold,
                &exec,
            )?;
            emit(out, "pr.csv", &mut manifest, |w| {
                eval::write_pr_csv(w, &results)
            })?;
        }
    }
    manifest.write(out)?;
    Ok(Status::Ok)
}

fn parse_activation(text: &str, seed: u64) -> Result<ActivationSequence> {
    let bad = || scrank::Error::InvalidParam(format!("unknown activation '{text}'"));
    Ok(match text {
        "round-robin" => ActivationSequence::RoundRobin,
        "random" => ActivationSequence::Random { seed },
        t if t.starts_with("bursts:") => ActivationSequence::Bursts {
            length: t[7..].parse().map_err(|_| bad())?,
        },
        t => ActivationSequence::Cycle(
            t.split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?,
        ),
    })
}

fn bfs(g: &UndirectedGraph, origin: usize) -> Vec<bool> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([origin]);
    seen[origin] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                queue.push_back(v as usize);
            }
        }
    }
    seen
}

fn clique_pairs(offset: usize, k: usize, w: f64) -> impl Iterator<Item = (usize, usize, f64)> {
    (0..k).flat_map(move |i| ((i + 1)..k).map(move |j| (offset + i, offset + j, w)))
}

pub fn muesli(cfg: &RunConfig, run: &MuesliRun<'_>, out: &Path) -> Result<Status> {
    let mut lines = cfg.describe();
    lines.push(format!("activation={}", run.activation));
    lines.push(format!("eps={}", run.eps));
    lines.push(format!("max_steps={}", run.max_steps));
    let mut connectivity = None;
    let mut manifest;
    let mut sys: MuesliSystem = match (run.system, run.builtin) {
        (Some(path), _) => {
            let sys = muesli::load_system(path)?;
            manifest = Manifest::new("muesli", lines);
            manifest.input(path)?;
            sys
        }
        (None, Some(builtin)) => {
            lines.push(format!("builtin={builtin:?}").to_lowercase());
            lines.push(format!("steepness={}", run.steepness));
            manifest = Manifest::new("muesli", lines);
            match builtin {
                Builtin::Connectivity => {
                    let n: usize = cfg.generator.get("n").map_or(Ok(200), |v| v.parse())?;
                    let prob: f64 = cfg
                        .generator
                        .get("er_prob")
                        .map_or(Ok(1.5 / n.max(1) as f64), |v| v.parse())?;
                    let params = GeneratorParams {
                        n,
                        n_c: 0,
                        n_s: 0,
                        p: 0.0,
                        p_c: 0.0,
                        p_s: 0.0,
                        h_model: HModel::ErdosRenyi {
                            prob: prob.min(1.0),
                        },
                        seed: cfg.seed,
                    };
                    let g = synthgen::generate_h(&params)?;
                    let sys = muesli::make_connectivity(&g, 0, run.steepness)?;
                    connectivity = Some(bfs(&g, 0));
                    sys
                }
                Builtin::Party => {
                    let mut sys = muesli::make_party_affiliation(
                        Weights::from_pairs(2, [(0, 1, 1.0)])?,
                        run.steepness,
                    )?;
                    sys.set_state(vec![1.0, -1.0])?;
                    sys
                }
                Builtin::Tech => {
                    let w = Weights::from_pairs(
                        10,
                        clique_pairs(0, 5, 3.0).chain(clique_pairs(5, 5, 3.0)),
                    )?;
                    let mut sys = muesli::make_tech_diffusion(w, 4.0, run.steepness)?;
                    sys.set_state([vec![1.0; 5], vec![0.0; 5]].concat())?;
                    sys
                }
            }
        }
        (None, None) => bail!(scrank::Error::InvalidParam(
            "--system or --builtin is required".into()
        )),
    };
    let act = parse_activation(run.activation, cfg.seed)?;
    let report = sys.run(&act, run.eps, run.max_steps)?;
    if let Some(r) = report
        .records
        .iter()
        .find(|r| r.delta > 1e-12 * (1.0 + r.potential.abs()))
    {
        bail!("potential increased by {:e} at step {}", r.delta, r.step);
    }
    emit(out, "run.csv", &mut manifest, |w| report.write_csv(w))?;
    manifest.write(out)?;
    println!(
        "steps={} converged={} initial_potential={:.12e} final_potential={:.12e}",
        report.steps,
        report.converged,
        report.initial_potential,
        report.final_potential()
    );
    if let Some(reach) = connectivity {
        let mismatches = sys
            .state()
            .iter()
            .zip(&reach)
            .filter(|(&x, &r)| (x > 0.5) != r)
            .count();
        println!(
            "reachable={} bfs_mismatches={mismatches}",
            reach.iter().filter(|&&r| r).count()
        );
        if mismatches > 0 {
            bail!("connectivity result disagrees with breadth-first search at {mismatches} nodes");
        }
    }
    Ok(if report.converged {
        Status::Ok
    } else {
        Status::NotConverged
    })
}
