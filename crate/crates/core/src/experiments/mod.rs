//! Reproducible Monte Carlo experiments.
//!
//! Replicate `r` of a run owns its graph and a generator seeded with
//! `mix64(master_seed, r)`. Replicates run on the rayon pool and are
//! joined in index order, so outputs depend only on the configuration.
//!
//! Every experiment yields a table (written as CSV) and a summary
//! (written as JSON with keys `kind, d, n, replicates, master_seed,
//! stats`). The tolerances checked against these numbers are engineering
//! envelopes: the limit theorems come without finite-`n` error rates.

pub mod stats;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::coding::{chain_distance, code_distance, common_prefix_len, Code};
use crate::error::{Error, Result};
use crate::generator::{GraphState, Model, QSchedule, VertexId};
use crate::metrics::{self, Bfs};
use crate::rng::{replicate_rng, Rng};
use crate::theory;

use rand::Rng as _;

pub const ENVELOPE_NOTE: &str = "Monte Carlo tolerances are engineering envelopes; \
the limit theorems give no finite-n error rates";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hopclt,
    Degree,
    Depth,
    Clustering,
    EanHop,
    EanDegree,
    DistOracle,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Hopclt,
        ExperimentKind::Degree,
        ExperimentKind::Depth,
        ExperimentKind::Clustering,
        ExperimentKind::EanHop,
        ExperimentKind::EanDegree,
        ExperimentKind::DistOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Hopclt => "hopclt",
            ExperimentKind::Degree => "degree",
            ExperimentKind::Depth => "depth",
            ExperimentKind::Clustering => "clustering",
            ExperimentKind::EanHop => "ean_hop",
            ExperimentKind::EanDegree => "ean_degree",
            ExperimentKind::DistOracle => "dist_oracle",
        }
    }

    fn is_ean(self) -> bool {
        matches!(self, ExperimentKind::EanHop | ExperimentKind::EanDegree)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown experiment kind {s:?}")))
    }
}

/// How hop counts between two codes are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMethod {
    /// BFS over the ancestor chains of both codes ([`chain_distance`]).
    #[default]
    Exact,
    /// The block-count formula ([`code_distance`]).
    Formula,
}

impl DistanceMethod {
    pub fn distance(self, a: &Code, b: &Code) -> usize {
        match self {
            DistanceMethod::Exact => chain_distance(a, b),
            DistanceMethod::Formula => code_distance(a, b),
        }
    }
}

impl fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMethod::Exact => "exact",
            DistanceMethod::Formula => "formula",
        })
    }
}

impl FromStr for DistanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DistanceMethod::Exact),
            "formula" => Ok(DistanceMethod::Formula),
            other => Err(Error::invalid(format!("unknown distance method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub d: u8,
    /// Number of growth steps.
    pub n: u32,
    pub replicates: u32,
    pub master_seed: u64,
    /// Occupation parameters of the EAN kinds; `q_n = 1/(2n)` if unset.
    pub schedule: Option<QSchedule>,
    /// Hop computation for `hopclt` and `ean_hop`, and the method put to
    /// the test by `dist_oracle`.
    pub method: DistanceMethod,
    /// `dist_oracle`: number of random pairs per replicate; all pairs of
    /// inner vertices when unset.
    pub pairs: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, d: u8, n: u32, replicates: u32, master_seed: u64) -> Self {
        ExperimentConfig {
            kind,
            d,
            n,
            replicates,
            master_seed,
            schedule: None,
            method: match kind {
                ExperimentKind::DistOracle => DistanceMethod::Formula,
                _ => DistanceMethod::Exact,
            },
            pairs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::invalid("replicates must be at least 1"));
        }
        if self.n < 1 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if self.d < 2 || self.d > crate::coding::MAX_DIM {
            return Err(Error::invalid(format!("dimension {} unsupported", self.d)));
        }
        if let Some(s) = &self.schedule {
            s.validate()?;
        }
        if self.kind == ExperimentKind::DistOracle && self.pairs.is_none() {
            let v = self.n as usize + self.d as usize + 2;
            if v > metrics::DIAMETER_LIMIT {
                return Err(Error::SizeGuard {
                    vertices: v,
                    limit: metrics::DIAMETER_LIMIT,
                });
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> QSchedule {
        self.schedule
            .clone()
            .unwrap_or(QSchedule::Harmonic { c: 0.5 })
    }
}

/// Rows and summary of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
    /// Set when an exact identity under test was violated.
    pub failed: bool,
}

impl ExperimentOutput {
    pub fn stats(&self) -> &Map<String, Value> {
        self.summary["stats"].as_object().expect("stats object")
    }

    pub fn stat(&self, key: &str) -> Option<f64> {
        self.stats().get(key).and_then(Value::as_f64)
    }

    /// Column `name` parsed as numbers; blank cells are skipped.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(j) = self.header.iter().position(|h| *h == name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter_map(|r| r[j].parse::<f64>().ok())
            .collect()
    }

    pub fn csv_path(dir: &Path, kind: ExperimentKind) -> PathBuf {
        dir.join(format!("{kind}.csv"))
    }

    pub fn summary_path(dir: &Path, kind: ExperimentKind) -> PathBuf {
        dir.join(format!("{kind}_summary.json"))
    }

    /// Writes `<kind>.csv` and `<kind>_summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = Self::csv_path(dir, self.kind);
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::csv(&path, e))?;
        w.write_record(&self.header).map_err(|e| Error::csv(&path, e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| Error::csv(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        let path = Self::summary_path(dir, self.kind);
        let text = serde_json::to_string_pretty(&self.summary)
            .map_err(|e| Error::Internal(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
    }
}

/// Runs the experiment named in `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Hopclt | ExperimentKind::EanHop => run_hop(cfg),
        ExperimentKind::Degree | ExperimentKind::EanDegree => run_degree(cfg),
        ExperimentKind::Depth => run_depth(cfg),
        ExperimentKind::Clustering => run_clustering(cfg),
        ExperimentKind::DistOracle => run_dist_oracle(cfg),
    }
}

fn per_replicate<T: Send>(
    cfg: &ExperimentConfig,
    f: impl Fn(u64, &mut Rng) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| f(r, &mut replicate_rng(cfg.master_seed, r)))
        .collect()
}

fn grow(cfg: &ExperimentConfig, rng: &mut Rng) -> Result<GraphState> {
    let model = if cfg.kind.is_ean() { Model::Ean } else { Model::Ran };
    let mut g = GraphState::new(cfg.d, model)?;
    let schedule = cfg.schedule();
    g.grow(cfg.n, Some(&schedule), rng)?;
    Ok(g)
}

fn summary(cfg: &ExperimentConfig, stats: Map<String, Value>) -> Value {
    let mut extra = Map::new();
    if cfg.kind.is_ean() {
        extra.insert("schedule".into(), json!(cfg.schedule().to_string()));
    }
    json!({
        "kind": cfg.kind.name(),
        "d": cfg.d,
        "n": cfg.n,
        "replicates": cfg.replicates,
        "master_seed": cfg.master_seed,
        "stats": stats,
        "config": extra,
        "note": ENVELOPE_NOTE,
    })
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}

fn ks_or_null(sample: &[f64]) -> Value {
    if sample.is_empty() {
        Value::Null
    } else {
        num(stats::ks_statistic(sample).expect("nonempty"))
    }
}

/// Hopcount between two uniform active cliques, one pair per replicate
/// graph. Standardised with the theoretical centering and variance:
/// `(2/mu)((d+1)/d) ln n` for the random network, `(2/mu) sum q_i` for
/// the evolving one.
pub fn run_hop(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d as u32;
    let ean = cfg.kind.is_ean();
    let (center, var) = if ean {
        theory::ean_hop_clt(d, &cfg.schedule(), cfg.n as u64)?
    } else {
        let (m, v) = theory::hop_clt_constants(d);
        let ln_n = (cfg.n as f64).ln();
        (m * ln_n, v * ln_n)
    };
    let samples = per_replicate(cfg, |_, rng| {
        let g = grow(cfg, rng)?;
        let a = g.sample_uniform_active(rng).code;
        let b = g.sample_uniform_active(rng).code;
        Ok((cfg.method.distance(&a, &b), g.vertex_count()))
    })?;
    let standardize = |h: usize| {
        if var > 0.0 {
            (h as f64 - center) / var.sqrt()
        } else {
            f64::NAN
        }
    };
    let mut header = vec!["replicate", "n"];
    if ean {
        header.push("vertices");
    }
    header.extend(["hop", "standardized"]);
    let rows = samples
        .iter()
        .enumerate()
        .map(|(r, &(h, v))| {
            let mut row = vec![r.to_string(), cfg.n.to_string()];
            if ean {
                row.push(v.to_string());
            }
            row.extend([h.to_string(), cell(standardize(h))]);
            row
        })
        .collect();
    let hops: Vec<f64> = samples.iter().map(|&(h, _)| h as f64).collect();
    let z: Vec<f64> = samples
        .iter()
        .map(|&(h, _)| standardize(h))
        .filter(|x| x.is_finite())
        .collect();
    let mut s = Map::new();
    s.insert("method".into(), json!(cfg.method.to_string()));
    s.insert("mean_hop".into(), num(stats::mean(&hops)));
    s.insert("var_hop".into(), num(stats::variance(&hops)));
    s.insert("center".into(), num(center));
    s.insert("variance".into(), num(var));
    s.insert("ks".into(), ks_or_null(&z));
    if ean {
        let v: Vec<f64> = samples.iter().map(|&(_, v)| v as f64).collect();
        s.insert("median_vertices".into(), num(stats::median(&v)));
        s.insert("mean_over_center".into(), num(stats::mean(&hops) / center));
        let g = theory::ean_clique_generation(d, &cfg.schedule(), cfg.n as u64)?;
        s.insert("size_biased_center".into(), num(2.0 / theory::mu(d) * g));
    } else {
        let (m, v) = theory::hop_clt_constants(d);
        s.insert("mean_coeff".into(), num(m));
        s.insert("var_coeff".into(), num(v));
        s.insert(
            "mean_over_log_n".into(),
            num(stats::mean(&hops) / (cfg.n as f64).ln()),
        );
    }
    Ok(ExperimentOutput {
        kind: cfg.kind,
        header,
        rows,
        summary: summary(cfg, s),
        failed: false,
    })
}

/// `sqrt(ln m / m)`, or `None` when `m < 2`.
fn envelope(m: f64) -> Option<f64> {
    (m >= 2.0).then(|| (m.ln() / m).sqrt())
}

/// Largest deviation of the empirical degree law from `p_k`, against the
/// envelope `sqrt(ln n / n)` (random network) or `sqrt(ln |V| / |V|)`
/// (evolving network).
pub fn run_degree(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let d = cfg.d as u32;
    let samples = per_replicate(cfg, |_, rng| {
        let g = grow(cfg, rng)?;
        let hist = metrics::degree_histogram(&g);
        Ok((metrics::sup_deviation(&hist, d)?, g.vertex_count()))
    })?;
    let ean = cfg.kind.is_ean();
    let env = |v: usize| {
        if ean {
            envelope(v as f64)
        } else {
            envelope(cfg.n as f64)
        }
    };
    let rows = samples
        .iter()
        .enumerate()
        .map(|(r, &(sup, v))| {
            vec![
                r.to_string(),
                cfg.n.to_string(),
                v.to_string(),
                cell(sup),
                env(v).map_or(String::new(), cell),
            ]
        })
        .collect();
    let sups: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut s = Map::new();
    s.insert("median_sup_deviation".into(), num(stats::median(&sups)));
    s.insert("max_sup_deviation".into(), num(stats::max(&sups)));
    let envs: Vec<f64> = samples.iter().filter_map(|&(_, v)| env(v)).collect();
    s.insert(
        "envelope".into(),
        if envs.is_empty() {
            Value::Null
        } else {
            num(stats::median(&envs))
        },
    );
    Ok(ExperimentOutput {
        kind: cfg.kind,
        header: vec!["replicate", "n", "vertices", "sup_deviation", "envelope"],
        rows,
        summary: summary(cfg, s),
        failed: false,
    })
}

/// Deepest vertex and the depth of one uniform active clique, relative
/// to `ln n`.
pub fn run_depth(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let samples = per_replicate(cfg, |_, rng| {
        let g = grow(cfg, rng)?;
        let max_gen = g.vertices().iter().map(|v| v.generation).max().unwrap_or(0);
        let idx = g.sample_active_index(rng);
        Ok((max_gen, g.clique_generation(idx)))
    })?;
    let ln_n = (cfg.n as f64).ln();
    let rows = samples
        .iter()
        .enumerate()
        .map(|(r, &(m, c))| {
            vec![r.to_string(), cfg.n.to_string(), m.to_string(), c.to_string()]
        })
        .collect();
    let max_ratio: Vec<f64> = samples.iter().map(|&(m, _)| m as f64 / ln_n).collect();
    let clique_ratio: Vec<f64> = samples.iter().map(|&(_, c)| c as f64 / ln_n).collect();
    let d = cfg.d as f64;
    let mut s = Map::new();
    s.insert("median_max_ratio".into(), num(stats::median(&max_ratio)));
    s.insert("median_clique_ratio".into(), num(stats::median(&clique_ratio)));
    s.insert("c_tilde".into(), num(theory::c_tilde(cfg.d as u32)));
    s.insert("clique_limit".into(), num((d + 1.0) / d));
    let dominated = samples.iter().all(|&(m, c)| m + 1 >= c);
    s.insert("max_dominates".into(), json!(dominated));
    Ok(ExperimentOutput {
        kind: cfg.kind,
        header: vec!["replicate", "n", "max_generation", "clique_generation"],
        rows,
        summary: summary(cfg, s),
        failed: !dominated,
    })
}

/// Average clustering counted on the graph and from the degree law,
/// against the limiting series.
pub fn run_clustering(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let samples = per_replicate(cfg, |_, rng| {
        let g = grow(cfg, rng)?;
        metrics::clustering(&g, None)
    })?;
    let limit = metrics::clustering_limit(cfg.d as u32, metrics::CLUSTERING_TERMS)?;
    let rows = samples
        .iter()
        .enumerate()
        .map(|(r, c)| {
            vec![
                r.to_string(),
                cfg.n.to_string(),
                cell(c.direct),
                cell(c.formula),
            ]
        })
        .collect();
    let direct: Vec<f64> = samples.iter().map(|c| c.direct).collect();
    let gap = samples
        .iter()
        .map(|c| (c.direct - c.formula).abs())
        .fold(0.0, f64::max);
    let mut s = Map::new();
    s.insert("median_direct".into(), num(stats::median(&direct)));
    s.insert("max_direct_formula_gap".into(), num(gap));
    s.insert("series".into(), num(limit.value));
    s.insert("series_tail_bound".into(), num(limit.tail_bound));
    Ok(ExperimentOutput {
        kind: cfg.kind,
        header: vec!["replicate", "n", "direct", "formula"],
        rows,
        summary: summary(cfg, s),
        failed: gap > 1e-9,
    })
}

/// A pair on which code and graph distance disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub replicate: u64,
    pub u: String,
    pub v: String,
    pub code_dist: u32,
    pub bfs_dist: u32,
}

struct PairRecord {
    gen_u: u32,
    gen_v: u32,
    ancestor_gen: u32,
    code_dist: u32,
    bfs_dist: u32,
    witness: Option<Witness>,
}

/// Compares a code distance with BFS on the graph, over all pairs of
/// inner vertices or over `pairs` random ones.
pub fn run_dist_oracle(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let per = per_replicate(cfg, |r, rng| {
        let g = grow(cfg, rng)?;
        let first = cfg.d as VertexId + 2;
        let n = g.vertex_count() as VertexId;
        let codes: Vec<Option<Code>> = (0..n).map(|v| g.code_of(v)).collect();
        let mut bfs = Bfs::new(n as usize);
        let mut out = Vec::new();
        let mut record = |u: VertexId, v: VertexId, dist: u32| {
            let (a, b) = (
                codes[u as usize].as_ref().expect("inner"),
                codes[v as usize].as_ref().expect("inner"),
            );
            let code_dist = cfg.method.distance(a, b) as u32;
            out.push(PairRecord {
                gen_u: a.len() as u32,
                gen_v: b.len() as u32,
                ancestor_gen: common_prefix_len(a, b) as u32,
                code_dist,
                bfs_dist: dist,
                witness: (code_dist != dist).then(|| Witness {
                    replicate: r,
                    u: a.to_string(),
                    v: b.to_string(),
                    code_dist,
                    bfs_dist: dist,
                }),
            });
        };
        match cfg.pairs {
            None => {
                for u in first..n {
                    let dist = bfs.run(g.adjacency(), u, None);
                    let dist: Vec<u32> = dist[u as usize + 1..].to_vec();
                    for (i, &dv) in dist.iter().enumerate() {
                        record(u, u + 1 + i as VertexId, dv);
                    }
                }
            }
            Some(k) => {
                if n <= first {
                    return Ok(out);
                }
                for _ in 0..k {
                    let u = rng.gen_range(first..n);
                    let v = rng.gen_range(first..n);
                    let dist = bfs.run(g.adjacency(), u, Some(v))[v as usize];
                    record(u, v, dist);
                }
            }
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    let (mut agree, mut total, mut max_gap) = (0u64, 0u64, 0u32);
    let mut first_witness: Option<Witness> = None;
    for p in per.iter().flatten() {
        rows.push(vec![
            rows.len().to_string(),
            p.gen_u.to_string(),
            p.gen_v.to_string(),
            p.ancestor_gen.to_string(),
            p.code_dist.to_string(),
            p.bfs_dist.to_string(),
        ]);
        total += 1;
        if p.code_dist == p.bfs_dist {
            agree += 1;
        }
        max_gap = max_gap.max(p.code_dist.abs_diff(p.bfs_dist));
        if first_witness.is_none() {
            first_witness = p.witness.clone();
        }
    }
    let mut s = Map::new();
    s.insert("method".into(), json!(cfg.method.to_string()));
    s.insert("pairs".into(), json!(total));
    s.insert("agreements".into(), json!(agree));
    s.insert("max_abs_discrepancy".into(), json!(max_gap));
    s.insert("first_witness".into(), json!(first_witness));
    Ok(ExperimentOutput {
        kind: cfg.kind,
        header: vec!["pair_id", "gen_u", "gen_v", "ancestor_gen", "code_dist", "bfs_dist"],
        rows,
        summary: summary(cfg, s),
        failed: agree != total,
    })
}
