//! Parameter sweeps over rewiring probability, policy and seed, with CSV
//! output and per-group confidence intervals.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{PolicyKind, SimConfig, Topology};
use crate::netgraph::graph_metrics;
use crate::simcore::{bunching_index, satisfaction, simulate, SimError};

pub const SWEEP_HEADER: &str = "p,policy,seed,clustering,path_length,overflow_minutes,peak_queue,mona_lisa,satisfaction";

pub const SUMMARY_HEADER: &str = "p,policy,n,clustering_mean,clustering_ci,path_length_mean,path_length_ci,\
overflow_minutes_mean,overflow_minutes_ci,peak_queue_mean,peak_queue_ci,mona_lisa_mean,mona_lisa_ci,\
satisfaction_mean,satisfaction_ci";

/// Rewiring probabilities of the default sweep grid.
pub const DEFAULT_P_VALUES: [f64; 5] = [0.0, 0.001, 0.01, 0.1, 1.0];
pub const DEFAULT_SEED_COUNT: u64 = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub policy: PolicyKind,
    pub seed: u64,
    pub clustering: f64,
    /// Absent for a disconnected painting graph.
    pub path_length: Option<f64>,
    pub overflow_minutes: u64,
    pub peak_queue: u32,
    pub mona_lisa: f64,
    pub satisfaction: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Runs every `(p, policy, seed)` combination on the lattice topology of
/// `base`. Graph, gallery and visitors are drawn once per `(p, seed)` and
/// shared by all policies. Rows come back sorted by `p`, then policy, then
/// seed, whatever order the inputs are in and however many threads run.
pub fn sweep(base: &SimConfig, p_values: &[f64], policies: &[PolicyKind], seeds: &[u64]) -> Result<SweepResult, SimError> {
    let Topology::Lattice { n, k, .. } = base.topology else {
        return Err(crate::config::ConfigError::Range {
            key: "topology.kind".into(),
            msg: "sweeps rewire a lattice topology".into(),
        }
        .into());
    };
    for &p in p_values {
        let mut cfg = base.clone();
        cfg.topology = Topology::Lattice { n, k, p };
        cfg.validate()?;
    }

    let cells: Vec<(f64, u64)> = p_values
        .iter()
        .flat_map(|&p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let groups: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(p, seed)| {
            let mut cfg = base.clone();
            cfg.topology = Topology::Lattice { n, k, p };
            let graph = cfg.painting_graph(seed)?;
            let metrics = graph_metrics(&graph);
            let scenario = cfg.instantiate_on(graph, seed)?;
            policies
                .iter()
                .map(|&kind| {
                    let r = simulate(
                        &scenario.gallery,
                        scenario.visitors.clone(),
                        cfg.population.dwell,
                        &cfg.policy.with_kind(kind),
                        cfg.horizon,
                        scenario.sim_seed,
                    )?;
                    let b = bunching_index(&r);
                    Ok(SweepRow {
                        p,
                        policy: kind,
                        seed,
                        clustering: metrics.clustering,
                        path_length: metrics.path_length,
                        overflow_minutes: b.overflow_minutes,
                        peak_queue: b.peak_queue,
                        mona_lisa: b.mona_lisa,
                        satisfaction: satisfaction(&r).unwrap_or(0.0),
                    })
                })
                .collect::<Result<Vec<_>, SimError>>()
        })
        .collect::<Result<_, _>>()?;

    let mut rows: Vec<SweepRow> = groups.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.p.total_cmp(&b.p)
            .then(a.policy.cmp(&b.policy))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(SweepResult { rows })
}

fn fixed(x: f64) -> String {
    // Keep "-0.000000" out of golden files.
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                fixed(r.p),
                r.policy.name(),
                r.seed,
                fixed(r.clustering),
                r.path_length.map_or_else(|| "NA".to_string(), fixed),
                r.overflow_minutes,
                r.peak_queue,
                fixed(r.mona_lisa),
                fixed(r.satisfaction),
            )
            .unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SweepParseError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| SweepParseError::new(1, e.to_string()))?;
        if header.iter().collect::<Vec<_>>().join(",") != SWEEP_HEADER {
            return Err(SweepParseError::new(1, format!("expected header `{SWEEP_HEADER}`")));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| SweepParseError::new(line, e.to_string()))?;
            let field = |j: usize| record.get(j).unwrap_or("");
            let num = |j: usize| -> Result<f64, SweepParseError> {
                field(j)
                    .parse()
                    .map_err(|_| SweepParseError::new(line, format!("bad number {:?}", field(j))))
            };
            let int = |j: usize| -> Result<u64, SweepParseError> {
                field(j)
                    .parse()
                    .map_err(|_| SweepParseError::new(line, format!("bad integer {:?}", field(j))))
            };
            rows.push(SweepRow {
                p: num(0)?,
                policy: field(1).parse().map_err(|e| SweepParseError::new(line, e))?,
                seed: int(2)?,
                clustering: num(3)?,
                path_length: if field(4) == "NA" { None } else { Some(num(4)?) },
                overflow_minutes: int(5)?,
                peak_queue: int(6)? as u32,
                mona_lisa: num(7)?,
                satisfaction: num(8)?,
            });
        }
        Ok(SweepResult { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), SimError> {
        write_file(path, &self.to_csv())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("sweep csv line {line}: {msg}")]
pub struct SweepParseError {
    pub line: usize,
    pub msg: String,
}

impl SweepParseError {
    fn new(line: usize, msg: impl Into<String>) -> Self {
        SweepParseError { line, msg: msg.into() }
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), SimError> {
    fs::write(path, contents).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Mean and 95% normal-approximation half-width `1.96·sd/√n` (sample sd; zero
/// for a single value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
}

pub fn mean_ci(values: &[f64]) -> Option<MeanCi> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some(MeanCi { mean, half_width: 0.0 });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some(MeanCi {
        mean,
        half_width: 1.96 * var.sqrt() / (n as f64).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub p: f64,
    pub policy: PolicyKind,
    pub n: usize,
    pub clustering: MeanCi,
    /// Over seeds whose graph was connected; absent if none was.
    pub path_length: Option<MeanCi>,
    pub overflow_minutes: MeanCi,
    pub peak_queue: MeanCi,
    pub mona_lisa: MeanCi,
    pub satisfaction: MeanCi,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot summarize an empty sweep")]
pub struct EmptySweep;

/// Per-`(p, policy)` means and confidence intervals over seeds, in sweep order.
pub fn summarize(s: &SweepResult) -> Result<Vec<SummaryRow>, EmptySweep> {
    if s.rows.is_empty() {
        return Err(EmptySweep);
    }
    let mut rows: Vec<&SweepRow> = s.rows.iter().collect();
    rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.policy.cmp(&b.policy)));
    let groups = rows.chunk_by(|a, b| a.p.total_cmp(&b.p).is_eq() && a.policy == b.policy);
    Ok(groups
        .map(|g| {
            let col = |f: fn(&SweepRow) -> f64| mean_ci(&g.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap();
            let paths: Vec<f64> = g.iter().filter_map(|r| r.path_length).collect();
            SummaryRow {
                p: g[0].p,
                policy: g[0].policy,
                n: g.len(),
                clustering: col(|r| r.clustering),
                path_length: mean_ci(&paths),
                overflow_minutes: col(|r| r.overflow_minutes as f64),
                peak_queue: col(|r| f64::from(r.peak_queue)),
                mona_lisa: col(|r| r.mona_lisa),
                satisfaction: col(|r| r.satisfaction),
            }
        })
        .collect())
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    let pair = |m: &MeanCi| format!("{},{}", fixed(m.mean), fixed(m.half_width));
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fixed(r.p),
            r.policy.name(),
            r.n,
            pair(&r.clustering),
            r.path_length.as_ref().map_or_else(|| "NA,NA".to_string(), pair),
            pair(&r.overflow_minutes),
            pair(&r.peak_queue),
            pair(&r.mona_lisa),
            pair(&r.satisfaction),
        )
        .unwrap();
    }
    out
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<(), SimError> {
    write_file(path, &summary_csv(rows))
}
