//! Score, trace, truth, and instance files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Labels, NodeId};
use crate::scrank::{IterationTrace, ScoreState};
use crate::synthgen::{GroundTruth, PlantedInstance};

pub const SCORES_HEADER: &str = "node_label\tcelebrity_score\tspammer_score";
pub const TRACE_HEADER: &str = "iteration,delta_inf,l1_c,l1_s,potential,millis,potential_change";

/// Writes one row per node with 17 significant digits.
pub fn write_scores<W: Write>(
    mut w: W,
    labels: &Labels,
    state: &ScoreState,
) -> std::io::Result<()> {
    writeln!(w, "{SCORES_HEADER}")?;
    for v in 0..state.len() {
        writeln!(
            w,
            "{}\t{:.16e}\t{:.16e}",
            labels.label(v as NodeId),
            state.c[v],
            state.s[v]
        )?;
    }
    Ok(())
}

/// Reads a scores file back into labels and a state.
pub fn read_scores<R: BufRead>(reader: R) -> Result<(Vec<String>, ScoreState)> {
    let mut labels = Vec::new();
    let mut state = ScoreState {
        c: Vec::new(),
        s: Vec::new(),
        iterations: 0,
    };
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if k == 0 {
            if line.trim_end() != SCORES_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing scores header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let num = |t: &str| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad score '{t}'"),
            })
        };
        labels.push(fields[0].to_string());
        state.c.push(num(fields[1])?);
        state.s.push(num(fields[2])?);
    }
    Ok((labels, state))
}

pub fn write_trace<W: Write>(mut w: W, trace: &IterationTrace) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in &trace.records {
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:.17e},{:.3},{:e}",
            r.iteration, r.delta_inf, r.l1_c, r.l1_s, r.potential, r.millis, r.potential_change
        )?;
    }
    Ok(())
}

/// `C <label>` and `S <label>` lines under a comment header.
pub fn write_truth<W: Write>(
    mut w: W,
    truth: &GroundTruth,
    labels: &Labels,
    comments: &[String],
) -> std::io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    for &v in &truth.celebrities {
        writeln!(w, "C {}", labels.label(v))?;
    }
    for &v in &truth.spammers {
        writeln!(w, "S {}", labels.label(v))?;
    }
    Ok(())
}

/// Reads a truth file, resolving labels through `resolve`.
pub fn read_truth<R, F>(reader: R, resolve: F) -> Result<GroundTruth>
where
    R: BufRead,
    F: Fn(&str) -> Option<NodeId>,
{
    let mut c = Vec::new();
    let mut s = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut it = text.split_whitespace();
        let (kind, label) = match (it.next(), it.next(), it.next()) {
            (Some(k), Some(l), None) => (k, l),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected '<C|S> <label>'".into(),
                })
            }
        };
        let v = resolve(label).ok_or_else(|| {
            Error::LabelMismatch(format!("unknown node '{label}' on line {line_no}"))
        })?;
        match kind {
            "C" => c.push(v),
            "S" => s.push(v),
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown class '{other}'"),
                })
            }
        }
    }
    GroundTruth::new(c, s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Paths written by [`write_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFiles {
    pub graph: PathBuf,
    pub truth: PathBuf,
}

/// Writes `graph.txt` and `truth.txt` into `dir`, both headed by the
/// generator parameters.
pub fn write_instance(dir: &Path, inst: &PlantedInstance) -> Result<InstanceFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = InstanceFiles {
        graph: dir.join("graph.txt"),
        truth: dir.join("truth.txt"),
    };
    let header = inst.params.describe();
    let mut w = create(&files.graph)?;
    inst.graph
        .write_edge_list(&mut w, &header)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&files.graph, e))?;
    let mut w = create(&files.truth)?;
    write_truth(&mut w, &inst.truth, inst.graph.labels(), &header)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&files.truth, e))?;
    Ok(files)
}

/// Loads a graph file and its truth sidecar.
pub fn read_instance(graph: &Path, truth: &Path) -> Result<(DirectedGraph, GroundTruth)> {
    let (g, _) = DirectedGraph::load_edge_list(graph)?;
    let t = read_truth(open(truth)?, |l| g.labels().id(l))?;
    Ok((g, t))
}
