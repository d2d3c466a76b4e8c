//! Degree laws, clustering and graph distances.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::coding::code_distance;
use crate::error::{Error, Result};
use crate::generator::{GraphState, VertexId};
use crate::special::{ln_gamma_ratio, ln_gamma_ratio_offset};

/// Largest graph [`diameter`] accepts.
pub const DIAMETER_LIMIT: usize = 20_000;

/// Default truncation point of the clustering series.
pub const CLUSTERING_TERMS: u64 = 10_000_000;

/// Number of vertices of each degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DegreeHistogram {
    pub counts: BTreeMap<u32, u64>,
    pub total: u64,
}

impl DegreeHistogram {
    pub fn from_degrees(degrees: impl IntoIterator<Item = u32>) -> Self {
        let mut hist = DegreeHistogram::default();
        for k in degrees {
            *hist.counts.entry(k).or_insert(0) += 1;
            hist.total += 1;
        }
        hist
    }

    pub fn count(&self, k: u32) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn proportion(&self, k: u32) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(k) as f64 / self.total as f64
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }
}

pub fn degree_histogram(state: &GraphState) -> DegreeHistogram {
    DegreeHistogram::from_degrees(state.vertices().iter().map(|v| v.degree))
}

fn check_degree_dim(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!("the degree law needs d >= 2, got {d}")));
    }
    Ok(())
}

/// Exponents of the Gamma-ratio form `p_k = C Γ(k - d + a) / Γ(k - d + b)`.
fn gamma_exponents(d: u32) -> (f64, f64) {
    let dm = d as f64 - 1.0;
    (2.0 / dm, (2.0 * d as f64 + 1.0) / dm)
}

/// `ln C` in `p_k = C Γ(k - d + a) / Γ(k - d + b)`.
fn ln_pk_constant(d: u32) -> f64 {
    let (a, b) = gamma_exponents(d);
    (d as f64 / (2.0 * d as f64 + 1.0)).ln() + ln_gamma_ratio(1.0 + b, 1.0 + a)
}

/// Limiting probability that a vertex has degree `k`:
///
/// `p_k = d/(2d+1) · Γ(k-d+2/(d-1)) Γ(2+(d+2)/(d-1)) / (Γ(1+2/(d-1)) Γ(k+1-d+(d+2)/(d-1)))`.
pub fn theoretical_pk(d: u32, k: u32) -> Result<f64> {
    check_degree_dim(d)?;
    if k <= d {
        return Err(Error::invalid(format!("degree {k} is below d+1 = {}", d + 1)));
    }
    let (a, b) = gamma_exponents(d);
    let x = (k - d) as f64;
    Ok((ln_pk_constant(d) + ln_gamma_ratio_offset(x, a, b)).exp())
}

/// `p_k` for `k = d+1 ..= d+len`, by the stable forward recursion
/// `p_k = p_{k-1} A_{k-1} / (d + A_k)` with `A_k = 2 + (k-d)(d-1)`.
pub fn pk_table(d: u32, len: usize) -> Result<Vec<f64>> {
    check_degree_dim(d)?;
    let df = d as f64;
    let a_of = |k: u64| 2.0 + (k - d as u64) as f64 * (df - 1.0);
    let mut out = Vec::with_capacity(len);
    let mut p = df / (2.0 * df + 1.0);
    for i in 0..len as u64 {
        let k = d as u64 + 1 + i;
        if i > 0 {
            p *= a_of(k - 1) / (df + a_of(k));
        }
        out.push(p);
    }
    Ok(out)
}

/// Relative residual of `p_k (d + A_k) = p_{k-1} A_{k-1} + d·1{k = d+1}`.
pub fn pk_recursion_residual(d: u32, k: u32) -> Result<f64> {
    let p = theoretical_pk(d, k)?;
    let df = d as f64;
    let a = |k: u32| 2.0 + (k - d) as f64 * (df - 1.0);
    let lhs = p * (df + a(k));
    let rhs = if k == d + 1 {
        df
    } else {
        theoretical_pk(d, k - 1)? * a(k - 1)
    };
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// `sum_{k > big_k} p_k` in closed form, from the telescoping identity
/// `Γ(x+a)/Γ(x+b) = [Γ(x+a)/Γ(x+b-1) - Γ(x+1+a)/Γ(x+b)] / (b-a-1)`.
pub fn pk_tail_mass(d: u32, big_k: u32) -> Result<f64> {
    check_degree_dim(d)?;
    if big_k < d {
        return Ok(1.0);
    }
    let (a, b) = gamma_exponents(d);
    let x = (big_k - d) as f64 + 1.0;
    let scale = (d as f64 - 1.0) / d as f64;
    Ok(scale * (ln_pk_constant(d) + ln_gamma_ratio_offset(x, a, b - 1.0)).exp())
}

/// `max_k |p^_k - p_k|` over every degree carrying mass in either law.
///
/// Beyond the largest observed degree the deviation is `p_k` itself,
/// which decreases in `k`, so the scan stops there.
pub fn sup_deviation(hist: &DegreeHistogram, d: u32) -> Result<f64> {
    check_degree_dim(d)?;
    let mut sup = 0.0f64;
    for (&k, _) in hist.counts.range(..=d) {
        sup = sup.max(hist.proportion(k));
    }
    let top = hist.max_degree().unwrap_or(d).max(d) + 1;
    let table = pk_table(d, (top - d) as usize)?;
    for (i, p) in table.into_iter().enumerate() {
        let k = d + 1 + i as u32;
        sup = sup.max((hist.proportion(k) - p).abs());
    }
    Ok(sup)
}

/// One line of the degree table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeRow {
    pub k: u32,
    pub empirical: f64,
    pub theoretical: f64,
    pub abs_diff: f64,
}

/// Empirical and limiting law side by side for every observed degree.
pub fn degree_table(hist: &DegreeHistogram, d: u32) -> Result<Vec<DegreeRow>> {
    hist.counts
        .keys()
        .map(|&k| {
            let empirical = hist.proportion(k);
            let theoretical = if k > d { theoretical_pk(d, k)? } else { 0.0 };
            Ok(DegreeRow {
                k,
                empirical,
                theoretical,
                abs_diff: (empirical - theoretical).abs(),
            })
        })
        .collect()
}

/// Writes `k,empirical,theoretical,abs_diff`.
pub fn write_degree_table(rows: &[DegreeRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Clustering coefficient of a vertex of degree `k`:
/// `d (2k - d - 1) / (k (k - 1))`.
pub fn clustering_of_degree(d: u32, k: u32) -> f64 {
    let (d, k) = (d as f64, k as f64);
    d * (2.0 * k - d - 1.0) / (k * (k - 1.0))
}

/// A truncated series together with a bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: u64,
}

/// `Cl_d = sum_{k > d} p_k d(2k-d-1)/(k(k-1))` summed up to `k = big_k`.
///
/// Each coefficient is at most `2d/k`, so the tail is bounded by
/// `2d/(K+1) · sum_{k > K} p_k`.
pub fn clustering_limit(d: u32, big_k: u64) -> Result<SeriesValue> {
    check_degree_dim(d)?;
    if big_k <= d as u64 {
        return Err(Error::invalid("truncation point must exceed d"));
    }
    let big_k = big_k.min(u32::MAX as u64) as u32;
    let df = d as f64;
    let a_of = |k: u32| 2.0 + (k - d) as f64 * (df - 1.0);
    let mut p = df / (2.0 * df + 1.0);
    let mut terms = Vec::with_capacity((big_k - d) as usize);
    for k in d + 1..=big_k {
        if k > d + 1 {
            p *= a_of(k - 1) / (df + a_of(k));
        }
        terms.push(p * clustering_of_degree(d, k));
    }
    // Smallest terms first.
    let value = terms.iter().rev().sum();
    let tail_bound = 2.0 * df / (big_k as f64 + 1.0) * pk_tail_mass(d, big_k)?;
    Ok(SeriesValue {
        value,
        tail_bound,
        terms: (big_k - d) as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clustering {
    /// Mean over vertices of the fraction of neighbour pairs that are
    /// adjacent, counted on the graph.
    pub direct: f64,
    /// `sum_k p^_k d(2k-d-1)/(k(k-1))` from the degree histogram.
    pub formula: f64,
    pub theoretical: Option<SeriesValue>,
}

/// Local clustering coefficient of every vertex, counted on the graph.
pub fn local_clustering(state: &GraphState) -> Vec<f64> {
    let adj = state.adjacency();
    let mut mark = vec![false; adj.len()];
    adj.iter()
        .map(|nbrs| {
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            for &w in nbrs {
                mark[w as usize] = true;
            }
            let mut twice_links = 0u64;
            for &w in nbrs {
                twice_links += adj[w as usize].iter().filter(|&&x| mark[x as usize]).count() as u64;
            }
            for &w in nbrs {
                mark[w as usize] = false;
            }
            twice_links as f64 / (k as f64 * (k as f64 - 1.0))
        })
        .collect()
}

/// Average clustering measured both ways, plus the limiting constant
/// when `series_terms` is given.
pub fn clustering(state: &GraphState, series_terms: Option<u64>) -> Result<Clustering> {
    let d = state.dim() as u32;
    let mut local = local_clustering(state);
    local.sort_by(f64::total_cmp);
    let direct = local.iter().sum::<f64>() / local.len() as f64;
    let hist = degree_histogram(state);
    let formula = hist
        .counts
        .iter()
        .map(|(&k, &n)| n as f64 * clustering_of_degree(d, k))
        .sum::<f64>()
        / hist.total as f64;
    let theoretical = series_terms.map(|t| clustering_limit(d, t)).transpose()?;
    Ok(Clustering {
        direct,
        formula,
        theoretical,
    })
}

/// Reusable BFS scratch space.
#[derive(Clone, Debug, Default)]
pub struct Bfs {
    dist: Vec<u32>,
    queue: VecDeque<VertexId>,
}

impl Bfs {
    pub fn new(vertex_count: usize) -> Self {
        Bfs {
            dist: vec![u32::MAX; vertex_count],
            queue: VecDeque::new(),
        }
    }

    /// Distances from `src` to every vertex; `u32::MAX` when unreachable.
    /// With `target`, the search stops once it is reached.
    pub fn run(&mut self, adj: &[Vec<VertexId>], src: VertexId, target: Option<VertexId>) -> &[u32] {
        self.dist.clear();
        self.dist.resize(adj.len(), u32::MAX);
        self.queue.clear();
        self.dist[src as usize] = 0;
        self.queue.push_back(src);
        if target == Some(src) {
            return &self.dist;
        }
        while let Some(x) = self.queue.pop_front() {
            let next = self.dist[x as usize] + 1;
            for &y in &adj[x as usize] {
                if self.dist[y as usize] == u32::MAX {
                    self.dist[y as usize] = next;
                    if target == Some(y) {
                        return &self.dist;
                    }
                    self.queue.push_back(y);
                }
            }
        }
        &self.dist
    }

    /// Largest finite distance of the last run.
    pub fn eccentricity(&self) -> u32 {
        self.dist.iter().copied().filter(|&x| x != u32::MAX).max().unwrap_or(0)
    }
}

fn check_vertex(state: &GraphState, v: VertexId) -> Result<()> {
    if (v as usize) >= state.vertex_count() {
        return Err(Error::invalid(format!(
            "vertex {v} out of range (graph has {} vertices)",
            state.vertex_count()
        )));
    }
    Ok(())
}

pub fn bfs_from(adj: &[Vec<VertexId>], src: VertexId) -> Vec<u32> {
    Bfs::new(adj.len()).run(adj, src, None).to_vec()
}

/// Shortest-path length between `a` and `b`.
pub fn bfs_distance(state: &GraphState, a: VertexId, b: VertexId) -> Result<u32> {
    check_vertex(state, a)?;
    check_vertex(state, b)?;
    let mut bfs = Bfs::new(state.vertex_count());
    Ok(bfs.run(state.adjacency(), a, Some(b))[b as usize])
}

/// Largest distance from `a`.
pub fn flooding(state: &GraphState, a: VertexId) -> Result<u32> {
    check_vertex(state, a)?;
    let mut bfs = Bfs::new(state.vertex_count());
    bfs.run(state.adjacency(), a, None);
    Ok(bfs.eccentricity())
}

/// Largest distance over all pairs, by one BFS per vertex. Refuses graphs
/// above [`DIAMETER_LIMIT`] vertices.
pub fn diameter(state: &GraphState) -> Result<u32> {
    let n = state.vertex_count();
    if n > DIAMETER_LIMIT {
        return Err(Error::SizeGuard {
            vertices: n,
            limit: DIAMETER_LIMIT,
        });
    }
    let adj = state.adjacency();
    Ok((0..n as VertexId)
        .into_par_iter()
        .map_init(
            || Bfs::new(n),
            |bfs, src| {
                bfs.run(adj, src, None);
                bfs.eccentricity()
            },
        )
        .max()
        .unwrap_or(0))
}

/// Code-based and graph distance of one vertex pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub u: VertexId,
    pub v: VertexId,
    pub code_based: u32,
    pub bfs: Option<u32>,
}

impl DistanceReport {
    /// `None` when no BFS distance was computed.
    pub fn agreement(&self) -> Option<bool> {
        self.bfs.map(|b| b == self.code_based)
    }
}

/// Compares the block formula with BFS for two non-corner vertices.
pub fn distance_report(state: &GraphState, u: VertexId, v: VertexId, with_bfs: bool) -> Result<DistanceReport> {
    check_vertex(state, u)?;
    check_vertex(state, v)?;
    let code = |x| {
        state
            .code_of(x)
            .ok_or_else(|| Error::invalid(format!("vertex {x} is a corner and has no code")))
    };
    let code_based = code_distance(&code(u)?, &code(v)?) as u32;
    let bfs = if with_bfs {
        Some(bfs_distance(state, u, v)?)
    } else {
        None
    };
    Ok(DistanceReport { u, v, code_based, bfs })
}
