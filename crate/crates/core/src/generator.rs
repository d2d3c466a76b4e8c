//! Growth of random and evolving Apollonian networks.
//!
//! Vertex ids are dense: `0` is the root `O`, `1..=d+1` are the corners
//! of the initial simplex (corner `i` is the vertex that clique `i` of
//! the initial graph does not contain), and every later vertex gets the
//! next free id at birth.
//!
//! Codes are stored implicitly as a tree: every non-initial vertex keeps
//! its parent (the vertex whose code is its own code minus the last
//! symbol) and its last symbol. An active clique is stored as the pair
//! (parent vertex, symbol) plus its `d+1` members, where member slot `i`
//! holds the vertex `T_i` of the clique's code, with the corner
//! convention for absent symbols and the root for the empty cut.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::coding::{Code, Symbol};
use crate::error::{Error, Result};
use crate::rng::Rng;

pub type VertexId = u32;

pub const ROOT: VertexId = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ran,
    Ean,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Ran => "ran",
            Model::Ean => "ean",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ran" => Ok(Model::Ran),
            "ean" => Ok(Model::Ean),
            other => Err(Error::invalid(format!("unknown model {other:?}"))),
        }
    }
}

/// Occupation parameters `q_n`, `n >= 1`, of an evolving network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QSchedule {
    Constant { q: f64 },
    /// `q_n = min(1, c/n)`
    Harmonic { c: f64 },
    /// `q_n = min(1, c n^-gamma)`
    Power { c: f64, gamma: f64 },
    /// Explicit `q_1, q_2, ...`
    Custom { values: Vec<f64> },
}

impl QSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = |q: f64| (0.0..=1.0).contains(&q);
        match self {
            QSchedule::Constant { q } if !ok(*q) => {
                Err(Error::invalid(format!("constant q = {q} outside [0, 1]")))
            }
            QSchedule::Harmonic { c } if !(c.is_finite() && *c >= 0.0) => {
                Err(Error::invalid(format!("harmonic c = {c} must be nonnegative")))
            }
            QSchedule::Power { c, gamma }
                if !(c.is_finite() && *c >= 0.0 && gamma.is_finite()) =>
            {
                Err(Error::invalid(format!("power schedule ({c}, {gamma}) is invalid")))
            }
            QSchedule::Custom { values } if values.iter().any(|&q| !ok(q)) => {
                Err(Error::invalid("custom schedule has values outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// `q_n` for `n >= 1`.
    pub fn q(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("occupation parameters start at n = 1"));
        }
        let q = match self {
            QSchedule::Constant { q } => *q,
            QSchedule::Harmonic { c } => (c / n as f64).min(1.0),
            QSchedule::Power { c, gamma } => (c * (n as f64).powf(-gamma)).min(1.0),
            QSchedule::Custom { values } => *values.get(n as usize - 1).ok_or_else(|| {
                Error::invalid(format!(
                    "custom schedule has {} values, q_{n} requested",
                    values.len()
                ))
            })?,
        };
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid(format!("q_{n} = {q} outside [0, 1]")));
        }
        Ok(q)
    }
}

impl fmt::Display for QSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSchedule::Constant { q } => write!(f, "const:{q}"),
            QSchedule::Harmonic { c } => write!(f, "harmonic:{c}"),
            QSchedule::Power { c, gamma } => write!(f, "power:{c},{gamma}"),
            QSchedule::Custom { values } => {
                f.write_str("custom:")?;
                for (k, v) in values.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for QSchedule {
    type Err = Error;

    /// `const:Q`, `harmonic:C`, `power:C,G` or `custom:Q1,Q2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("schedule {s:?} lacks a ':'")))?;
        let nums = rest
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number {x:?} in schedule {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let sched = match (kind, nums.as_slice()) {
            ("const" | "constant", [q]) => QSchedule::Constant { q: *q },
            ("harmonic", [c]) => QSchedule::Harmonic { c: *c },
            ("power", [c, gamma]) => QSchedule::Power {
                c: *c,
                gamma: *gamma,
            },
            ("custom", values) => QSchedule::Custom {
                values: values.to_vec(),
            },
            _ => return Err(Error::invalid(format!("unrecognised schedule {s:?}"))),
        };
        sched.validate()?;
        Ok(sched)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Root,
    Corner(Symbol),
    Inner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRecord {
    pub id: VertexId,
    /// Vertex whose code is this code without its last symbol; `None`
    /// for the root and the corners.
    pub parent: Option<VertexId>,
    /// Last symbol of the code; 0 for initial vertices.
    pub symbol: Symbol,
    pub generation: u32,
    pub degree: u32,
    pub birth_step: u32,
}

/// An active clique with its code materialised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveClique {
    pub code: Code,
    /// Member `i - 1` is the vertex `T_i(code)`.
    pub members: Vec<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Initial,
    Forward,
    Shortcut,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Initial => "initial",
            EdgeKind::Forward => "forward",
            EdgeKind::Shortcut => "shortcut",
        })
    }
}

/// Number of active cliques containing a non-initial vertex of degree
/// `k`: `2 + (k - d)(d - 1)`.
pub fn cliques_per_degree(d: u32, k: u32) -> u64 {
    debug_assert!(k > d);
    2 + (k as u64 - d as u64) * (d as u64 - 1)
}

/// The evolving network.
#[derive(Clone, Debug)]
pub struct GraphState {
    d: u8,
    model: Model,
    step: u32,
    vertices: Vec<VertexRecord>,
    adjacency: Vec<Vec<VertexId>>,
    clique_parent: Vec<VertexId>,
    clique_symbol: Vec<Symbol>,
    clique_generation: Vec<u32>,
    /// Flat, stride `d+1`.
    clique_members: Vec<VertexId>,
    /// Empirical occupation parameter of every EAN step.
    qhat_history: Vec<f64>,
}

impl GraphState {
    /// The initial simplex with its interior vertex: `d+2` mutually
    /// adjacent vertices and `d+1` active cliques labelled `1..=d+1`.
    pub fn new(d: u8, model: Model) -> Result<Self> {
        if !(2..=crate::coding::MAX_DIM).contains(&d) {
            return Err(Error::invalid(format!(
                "dimension must be at least 2, got {d}"
            )));
        }
        let k = d as usize + 1;
        let vertices: Vec<VertexRecord> = (0..=k as u32)
            .map(|id| VertexRecord {
                id,
                parent: None,
                symbol: 0,
                generation: 0,
                degree: d as u32 + 1,
                birth_step: 0,
            })
            .collect();
        let adjacency = (0..=k as u32)
            .map(|id| (0..=k as u32).filter(|&o| o != id).collect())
            .collect();
        let mut state = GraphState {
            d,
            model,
            step: 0,
            vertices,
            adjacency,
            clique_parent: Vec::with_capacity(k),
            clique_symbol: Vec::with_capacity(k),
            clique_generation: Vec::with_capacity(k),
            clique_members: Vec::with_capacity(k * k),
            qhat_history: Vec::new(),
        };
        for label in 1..=k as u32 {
            state.clique_parent.push(ROOT);
            state.clique_symbol.push(label as Symbol);
            state.clique_generation.push(1);
            // T_label("label") is the root; every other T_i is corner i.
            for i in 1..=k as u32 {
                state
                    .clique_members
                    .push(if i == label { ROOT } else { i });
            }
        }
        Ok(state)
    }

    pub fn dim(&self) -> u8 {
        self.d
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    fn stride(&self) -> usize {
        self.d as usize + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `N(n)`: vertices added after the initial simplex.
    pub fn added_nodes(&self) -> usize {
        self.vertices.len() - self.stride() - 1
    }

    pub fn active_count(&self) -> usize {
        self.clique_parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> &VertexRecord {
        &self.vertices[id as usize]
    }

    pub fn neighbors(&self, id: VertexId) -> &[VertexId] {
        &self.adjacency[id as usize]
    }

    pub fn adjacency(&self) -> &[Vec<VertexId>] {
        &self.adjacency
    }

    pub fn qhat_history(&self) -> &[f64] {
        &self.qhat_history
    }

    pub fn kind(&self, id: VertexId) -> VertexKind {
        if id == ROOT {
            VertexKind::Root
        } else if (id as usize) <= self.stride() {
            VertexKind::Corner(id as Symbol)
        } else {
            VertexKind::Inner
        }
    }

    pub fn is_initial(&self, id: VertexId) -> bool {
        (id as usize) <= self.stride()
    }

    /// Code of a vertex; `None` for corners, the empty code for the root.
    pub fn code_of(&self, id: VertexId) -> Option<Code> {
        match self.kind(id) {
            VertexKind::Corner(_) => None,
            VertexKind::Root => Some(Code::root(self.d)),
            VertexKind::Inner => {
                let rec = &self.vertices[id as usize];
                let mut symbols = vec![0; rec.generation as usize];
                self.fill_code(id, &mut symbols);
                Some(Code::from_raw(self.d, symbols))
            }
        }
    }

    /// Writes the code of `id` into `out`, whose length must equal the
    /// vertex's generation.
    fn fill_code(&self, mut id: VertexId, out: &mut [Symbol]) {
        let mut pos = out.len();
        while pos > 0 {
            let rec = &self.vertices[id as usize];
            pos -= 1;
            out[pos] = rec.symbol;
            id = rec.parent.expect("inner vertices have parents");
        }
    }

    /// Ancestor chain of a code position: `chain[g]` is the vertex of
    /// generation `g` on the path from the root to `id`.
    fn ancestor_chain(&self, mut id: VertexId) -> Vec<VertexId> {
        let g = self.vertices[id as usize].generation as usize;
        let mut chain = vec![ROOT; g + 1];
        for slot in chain[1..].iter_mut().rev() {
            *slot = id;
            id = self.vertices[id as usize].parent.unwrap_or(ROOT);
        }
        chain
    }

    pub fn clique_code(&self, idx: usize) -> Code {
        let g = self.clique_generation[idx] as usize;
        let mut symbols = vec![0; g];
        symbols[g - 1] = self.clique_symbol[idx];
        self.fill_code(self.clique_parent[idx], &mut symbols[..g - 1]);
        Code::from_raw(self.d, symbols)
    }

    pub fn clique_generation(&self, idx: usize) -> u32 {
        self.clique_generation[idx]
    }

    pub fn clique_members(&self, idx: usize) -> &[VertexId] {
        let s = self.stride();
        &self.clique_members[idx * s..(idx + 1) * s]
    }

    pub fn active_clique(&self, idx: usize) -> ActiveClique {
        ActiveClique {
            code: self.clique_code(idx),
            members: self.clique_members(idx).to_vec(),
        }
    }

    /// Vertex `T_i(code)` for every `i`, resolved from the code and the
    /// ancestor chain of `parent` alone: the corner `i` when `i` is
    /// absent, otherwise the ancestor at depth `last_occurrence - 1`.
    fn members_from_code(&self, parent: VertexId, symbol: Symbol) -> Vec<VertexId> {
        let chain = self.ancestor_chain(parent);
        let g = chain.len();
        let mut symbols = vec![0; g];
        symbols[g - 1] = symbol;
        self.fill_code(parent, &mut symbols[..g - 1]);
        (1..=self.stride() as Symbol)
            .map(|i| match symbols.iter().rposition(|&s| s == i) {
                Some(p) => chain[p],
                None => i as VertexId,
            })
            .collect()
    }

    /// Number of active cliques each vertex belongs to, by direct count.
    pub fn clique_memberships(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.vertices.len()];
        for &v in &self.clique_members {
            counts[v as usize] += 1;
        }
        counts
    }

    /// Active-clique membership predicted from the degree alone:
    /// `2 + (k - d)(d - 1)`, one less for a corner (which is missing from
    /// one of the initial cliques).
    pub fn membership_from_degree(&self, id: VertexId) -> u64 {
        let a = cliques_per_degree(self.d as u32, self.vertices[id as usize].degree);
        match self.kind(id) {
            VertexKind::Corner(_) => a - 1,
            _ => a,
        }
    }

    /// Subdivides active clique `idx` (removed by the caller) and returns
    /// the new vertex. New cliques are appended to `out_*`.
    fn birth(&mut self, parent: VertexId, symbol: Symbol, generation: u32, members: &[VertexId]) -> VertexId {
        let id = self.vertices.len() as VertexId;
        debug_assert_eq!(
            members,
            self.members_from_code(parent, symbol).as_slice(),
            "clique members disagree with the cut operators of its code"
        );
        self.vertices.push(VertexRecord {
            id,
            parent: Some(parent),
            symbol,
            generation,
            degree: self.d as u32 + 1,
            birth_step: self.step,
        });
        self.adjacency.push(members.to_vec());
        for &m in members {
            self.adjacency[m as usize].push(id);
            self.vertices[m as usize].degree += 1;
        }
        for j in 1..=self.stride() {
            self.clique_parent.push(id);
            self.clique_symbol.push(j as Symbol);
            self.clique_generation.push(generation + 1);
            for (slot, &m) in members.iter().enumerate() {
                self.clique_members
                    .push(if slot + 1 == j { id } else { m });
            }
        }
        id
    }

    fn swap_remove_clique(&mut self, idx: usize) {
        let s = self.stride();
        let last = self.clique_parent.len() - 1;
        self.clique_parent.swap_remove(idx);
        self.clique_symbol.swap_remove(idx);
        self.clique_generation.swap_remove(idx);
        if idx != last {
            self.clique_members
                .copy_within(last * s..(last + 1) * s, idx * s);
        }
        self.clique_members.truncate(last * s);
    }

    /// One RAN step: a uniformly chosen active clique is subdivided.
    pub fn step_ran(&mut self, rng: &mut Rng) -> Result<VertexId> {
        if self.model != Model::Ran {
            return Err(Error::invalid("step_ran on an evolving network"));
        }
        self.step += 1;
        let idx = rng.gen_range(0..self.active_count());
        let s = self.stride();
        let mut members = [0 as VertexId; 256];
        members[..s].copy_from_slice(self.clique_members(idx));
        let (parent, symbol, generation) = (
            self.clique_parent[idx],
            self.clique_symbol[idx],
            self.clique_generation[idx],
        );
        self.swap_remove_clique(idx);
        Ok(self.birth(parent, symbol, generation, &members[..s]))
    }

    /// One EAN step with occupation parameter `q`: every clique active at
    /// entry is filled independently with probability `q`. The filled
    /// cliques are found in storage order by geometric gaps, so the cost
    /// is proportional to the number filled. Returns the number of new
    /// vertices.
    pub fn step_ean(&mut self, q: f64, rng: &mut Rng) -> Result<usize> {
        if self.model != Model::Ean {
            return Err(Error::invalid("step_ean on a random network"));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid(format!("occupation parameter {q} outside [0, 1]")));
        }
        self.step += 1;
        let entry = self.active_count();
        let mut filled = Vec::new();
        if q > 0.0 {
            let gap = Geometric::new(q).map_err(|e| Error::invalid(e.to_string()))?;
            let mut next = gap.sample(rng);
            while next < entry as u64 {
                filled.push(next as usize);
                next = next.saturating_add(1).saturating_add(gap.sample(rng));
            }
        }
        self.qhat_history.push(filled.len() as f64 / entry as f64);
        if filled.is_empty() {
            return Ok(0);
        }
        let s = self.stride();
        // Births append their cliques after the entry snapshot. Removing
        // the filled ones from the highest index down lets each swap pull
        // from the tail, which never holds a filled clique still pending.
        for &idx in &filled {
            let mut members = [0 as VertexId; 256];
            members[..s].copy_from_slice(self.clique_members(idx));
            let (parent, symbol, generation) = (
                self.clique_parent[idx],
                self.clique_symbol[idx],
                self.clique_generation[idx],
            );
            self.birth(parent, symbol, generation, &members[..s]);
        }
        for &idx in filled.iter().rev() {
            self.swap_remove_clique(idx);
        }
        Ok(filled.len())
    }

    /// Applies `steps` further steps. EAN steps use `q_i` from `schedule`
    /// for the global step index `i`.
    pub fn grow(&mut self, steps: u32, schedule: Option<&QSchedule>, rng: &mut Rng) -> Result<()> {
        match self.model {
            Model::Ran => {
                self.vertices.reserve(steps as usize);
                self.adjacency.reserve(steps as usize);
                for _ in 0..steps {
                    self.step_ran(rng)?;
                }
            }
            Model::Ean => {
                let schedule = schedule
                    .ok_or_else(|| Error::invalid("an evolving network needs a schedule"))?;
                for _ in 0..steps {
                    let q = schedule.q(self.step as u64 + 1)?;
                    self.step_ean(q, rng)?;
                }
            }
        }
        Ok(())
    }

    pub fn sample_active_index(&self, rng: &mut Rng) -> usize {
        rng.gen_range(0..self.active_count())
    }

    pub fn sample_uniform_active(&self, rng: &mut Rng) -> ActiveClique {
        self.active_clique(self.sample_active_index(rng))
    }

    /// A uniform member of a uniform active clique: the law of the result
    /// is proportional to the number of active cliques holding a vertex.
    pub fn sample_size_biased_vertex(&self, rng: &mut Rng) -> VertexId {
        let idx = self.sample_active_index(rng);
        let slot = rng.gen_range(0..self.stride());
        self.clique_members(idx)[slot]
    }

    pub fn edge_kind(&self, u: VertexId, v: VertexId) -> EdgeKind {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        if self.is_initial(v) {
            EdgeKind::Initial
        } else if self.vertices[v as usize].parent == Some(u) {
            EdgeKind::Forward
        } else {
            EdgeKind::Shortcut
        }
    }

    /// All edges as `(u, v, kind)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, EdgeKind)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            let u = u as VertexId;
            let mut higher: Vec<VertexId> = nbrs.iter().copied().filter(|&v| v > u).collect();
            higher.sort_unstable();
            out.extend(higher.into_iter().map(|v| (u, v, self.edge_kind(u, v))));
        }
        out
    }

    /// Code column of the vertex table: empty for the root, `#i` for
    /// corner `i`.
    pub fn code_label(&self, id: VertexId) -> String {
        match self.kind(id) {
            VertexKind::Corner(i) => format!("#{i}"),
            _ => self.code_of(id).map(|c| c.to_string()).unwrap_or_default(),
        }
    }

    /// Writes `vertices.csv` and `edges.csv` into `dir`.
    pub fn export(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.write_vertex_table(&dir.join("vertices.csv"))?;
        self.write_edge_list(&dir.join("edges.csv"))
    }

    pub fn write_vertex_table(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(["id", "code", "generation", "degree", "birth_step"])
            .map_err(|e| Error::csv(path, e))?;
        for rec in &self.vertices {
            w.write_record([
                rec.id.to_string(),
                self.code_label(rec.id),
                rec.generation.to_string(),
                rec.degree.to_string(),
                rec.birth_step.to_string(),
            ])
            .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "u,v,type").map_err(io)?;
        for (u, v, kind) in self.edges() {
            writeln!(w, "{u},{v},{kind}").map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct VertexRow {
    pub id: VertexId,
    pub code: String,
    pub generation: u32,
    pub degree: u32,
    pub birth_step: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct EdgeRow {
    pub u: VertexId,
    pub v: VertexId,
    #[serde(rename = "type")]
    pub kind: EdgeKind,
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let found = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("expected header {header:?}, found {found:?}"),
        });
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::csv(path, e)))
        .collect()
}

pub fn read_vertex_table(path: &Path) -> Result<Vec<VertexRow>> {
    read_rows(path, &["id", "code", "generation", "degree", "birth_step"])
}

pub fn read_edge_list(path: &Path) -> Result<Vec<EdgeRow>> {
    read_rows(path, &["u", "v", "type"])
}

/// Sorted adjacency lists rebuilt from an edge list.
pub fn adjacency_from_edges(vertex_count: usize, edges: &[EdgeRow]) -> Vec<Vec<VertexId>> {
    let mut adj = vec![Vec::new(); vertex_count];
    for e in edges {
        adj[e.u as usize].push(e.v);
        adj[e.v as usize].push(e.u);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}
