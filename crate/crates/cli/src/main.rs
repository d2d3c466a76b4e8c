//! `apollonian`: generate random and evolving Apollonian networks, measure
//! them, print limit constants and run the Monte Carlo experiments.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use apollonian_core::coding::common_prefix_len;
use apollonian_core::experiments::{self, DistanceMethod, ExperimentConfig, ExperimentKind};
use apollonian_core::generator::{adjacency_from_edges, read_edge_list, read_vertex_table};
use apollonian_core::metrics::{self, Bfs};
use apollonian_core::rng::{mix64, rng_from_seed};
use apollonian_core::{theory, Error, GraphState, Model, QSchedule, VertexId};

#[derive(Parser)]
#[command(name = "apollonian", version, about = "Random and evolving Apollonian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a network and write vertices.csv, edges.csv and summary.json.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grow a network and write its degree table (k,empirical,theoretical,abs_diff).
    Degrees {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grow a network and compare code-based distances with BFS.
    Distances {
        #[command(flatten)]
        graph: GraphArgs,
        /// Random vertex pairs to sample; all pairs of inner vertices if omitted.
        #[arg(long)]
        pairs: Option<u64>,
        /// Code distance to compare: the block formula or the exact chain BFS.
        #[arg(long, default_value = "formula")]
        method: DistanceMethod,
        /// Also compute the flooding time from the root and the diameter.
        #[arg(long)]
        diameter: bool,
        /// Output CSV file (pair_id,gen_u,gen_v,ancestor_gen,code_dist,bfs_dist).
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the limit constants of dimension D as JSON.
    Constants {
        /// Dimension d >= 2.
        #[arg(long = "dim")]
        dim: u32,
        /// Write the JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment and write <kind>.csv and <kind>_summary.json.
    Experiment {
        /// hopclt, degree, depth, clustering, ean_hop, ean_degree or dist_oracle.
        #[arg(long)]
        kind: ExperimentKind,
        /// Dimension d >= 2.
        #[arg(long = "dim", default_value_t = 2)]
        dim: u8,
        /// Growth steps per replicate.
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 100)]
        replicates: u32,
        /// Master seed; replicate r uses a stream derived from (seed, r).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Occupation schedule of the EAN kinds (default harmonic:0.5).
        #[arg(long)]
        q: Option<QSchedule>,
        /// Hop computation: exact (default) or formula; dist_oracle defaults to formula.
        #[arg(long)]
        method: Option<DistanceMethod>,
        /// dist_oracle: random pairs per replicate instead of all pairs.
        #[arg(long)]
        pairs: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a generated graph directory to another format.
    Export {
        /// Directory written by `generate`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// ran or ean.
    #[arg(long, default_value = "ran")]
    model: Model,
    /// Dimension d >= 2.
    #[arg(long = "dim", default_value_t = 2)]
    dim: u8,
    /// Growth steps.
    #[arg(long)]
    steps: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// EAN occupation schedule: const:Q, harmonic:C, power:C,G or custom:Q1,Q2,...
    #[arg(long)]
    q: Option<QSchedule>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// Graphviz undirected graph.
    Dot,
    /// One line per vertex: the vertex followed by its sorted neighbours.
    Adjlist,
}

/// Failure of a run, with the exit code it maps to.
enum Failure {
    Config(String),
    Runtime(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Domain(_) | Error::SizeGuard { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("Run `apollonian --help` for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) | Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Generate { graph, out } => generate(&graph, &out),
        Command::Degrees { graph, out } => degrees(&graph, &out),
        Command::Distances {
            graph,
            pairs,
            method,
            diameter,
            out,
        } => distances(&graph, pairs, method, diameter, &out),
        Command::Constants { dim, out } => constants(dim, out.as_deref()),
        Command::Experiment {
            kind,
            dim,
            steps,
            replicates,
            seed,
            q,
            method,
            pairs,
            out,
        } => {
            let mut cfg = ExperimentConfig::new(kind, dim, steps, replicates, seed);
            cfg.schedule = q;
            if let Some(m) = method {
                cfg.method = m;
            }
            cfg.pairs = pairs;
            experiment(&cfg, &out)
        }
        Command::Export { input, format, out } => export(&input, format, &out),
    }
}

fn build(args: &GraphArgs) -> Result<GraphState, Failure> {
    if args.model == Model::Ran && args.q.is_some() {
        return Err(Failure::Config("--q applies to the ean model only".into()));
    }
    let mut g = GraphState::new(args.dim, args.model)?;
    let schedule = args.q.clone().unwrap_or(QSchedule::Harmonic { c: 0.5 });
    g.grow(args.steps, Some(&schedule), &mut rng_from_seed(args.seed))?;
    Ok(g)
}

fn write_json(value: &Value, path: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("serialisable") + "\n";
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Runtime(e.to_string())),
    }
}

fn generate(args: &GraphArgs, out: &Path) -> Outcome {
    let g = build(args)?;
    g.export(out)?;
    let mut summary = json!({
        "model": args.model.to_string(),
        "d": args.dim,
        "steps": args.steps,
        "seed": args.seed,
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "active_cliques": g.active_count(),
        "max_generation": g.vertices().iter().map(|v| v.generation).max().unwrap_or(0),
    });
    if args.model == Model::Ean {
        let schedule = args.q.clone().unwrap_or(QSchedule::Harmonic { c: 0.5 });
        summary["schedule"] = json!(schedule.to_string());
    }
    write_json(&summary, Some(&out.join("summary.json")))
}

fn degrees(args: &GraphArgs, out: &Path) -> Outcome {
    let g = build(args)?;
    let d = args.dim as u32;
    let hist = metrics::degree_histogram(&g);
    metrics::write_degree_table(&metrics::degree_table(&hist, d)?, out)?;
    let c = metrics::clustering(&g, None)?;
    write_json(
        &json!({
            "vertices": hist.total,
            "sup_deviation": metrics::sup_deviation(&hist, d)?,
            "clustering_direct": c.direct,
            "clustering_formula": c.formula,
        }),
        None,
    )
}

fn distances(args: &GraphArgs, pairs: Option<u64>, method: DistanceMethod, diameter: bool, out: &Path) -> Outcome {
    let g = build(args)?;
    let n = g.vertex_count() as VertexId;
    if pairs.is_none() && n as usize > metrics::DIAMETER_LIMIT {
        return Err(Error::SizeGuard {
            vertices: n as usize,
            limit: metrics::DIAMETER_LIMIT,
        }
        .into());
    }
    let first = args.dim as VertexId + 2;
    let codes: Vec<_> = (0..n).map(|v| g.code_of(v)).collect();
    let mut bfs = Bfs::new(n as usize);
    let mut list: Vec<(VertexId, VertexId, u32)> = Vec::new();
    match pairs {
        None => {
            for u in first..n {
                let dist = bfs.run(g.adjacency(), u, None);
                list.extend((u + 1..n).map(|v| (u, v, dist[v as usize])));
            }
        }
        Some(k) => {
            use rand::Rng as _;
            let mut rng = rng_from_seed(mix64(args.seed, 1));
            if n > first {
                for _ in 0..k {
                    let u = rng.gen_range(first..n);
                    let v = rng.gen_range(first..n);
                    list.push((u, v, bfs.run(g.adjacency(), u, Some(v))[v as usize]));
                }
            }
        }
    }
    let mut w = csv::Writer::from_path(out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
    let csv_err = |e: csv::Error| Failure::Runtime(format!("{}: {e}", out.display()));
    w.write_record(["pair_id", "gen_u", "gen_v", "ancestor_gen", "code_dist", "bfs_dist"])
        .map_err(csv_err)?;
    let mut agree = 0u64;
    for (i, &(u, v, dist)) in list.iter().enumerate() {
        let (a, b) = (codes[u as usize].as_ref().unwrap(), codes[v as usize].as_ref().unwrap());
        let code = method.distance(a, b) as u32;
        agree += (code == dist) as u64;
        w.write_record([
            i.to_string(),
            a.len().to_string(),
            b.len().to_string(),
            common_prefix_len(a, b).to_string(),
            code.to_string(),
            dist.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut summary = Map::new();
    summary.insert("method".into(), json!(method.to_string()));
    summary.insert("pairs".into(), json!(list.len()));
    summary.insert("agreements".into(), json!(agree));
    if diameter {
        summary.insert("flooding_root".into(), json!(metrics::flooding(&g, 0)?));
        summary.insert("diameter".into(), json!(metrics::diameter(&g)?));
    }
    write_json(&Value::Object(summary), None)
}

/// Rounds to 12 significant digits.
fn sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float")
}

fn constants(dim: u32, out: Option<&Path>) -> Outcome {
    if dim < 2 {
        return Err(Failure::Config(format!("--dim must be at least 2, got {dim}")));
    }
    let b = theory::solve_diameter(dim)?;
    let value = json!({
        "d": b.d,
        "mu": sig12(b.mu),
        "sigma2": sig12(b.sigma2),
        "c_tilde": sig12(b.c_tilde),
        "alpha": sig12(b.alpha_tilde),
        "beta": sig12(b.beta_tilde),
        "diam_const": sig12(b.diam_const),
        "flood_const": sig12(b.flood_const),
        "hop_mean_coeff": sig12(b.hop_mean_coeff),
        "hop_var_coeff": sig12(b.hop_var_coeff),
    });
    write_json(&value, out)
}

fn experiment(cfg: &ExperimentConfig, out: &Path) -> Outcome {
    let result = experiments::run(cfg)?;
    result.write(out)?;
    write_json(&result.summary, None)?;
    if result.failed {
        return Err(Failure::Check(format!(
            "{} reported a violated identity; see {}",
            cfg.kind,
            experiments::ExperimentOutput::summary_path(out, cfg.kind).display()
        )));
    }
    Ok(())
}

fn export(input: &Path, format: ExportFormat, out: &Path) -> Outcome {
    let vertices = read_vertex_table(&input.join("vertices.csv"))?;
    let edges = read_edge_list(&input.join("edges.csv"))?;
    let adj = adjacency_from_edges(vertices.len(), &edges);
    let mut text = String::new();
    match format {
        ExportFormat::Dot => {
            text.push_str("graph apollonian {\n");
            for v in &vertices {
                text.push_str(&format!("  {} [label=\"{}\"];\n", v.id, v.code));
            }
            for e in &edges {
                text.push_str(&format!("  {} -- {} [type={}];\n", e.u, e.v, e.kind));
            }
            text.push_str("}\n");
        }
        ExportFormat::Adjlist => {
            for (v, nbrs) in adj.iter().enumerate() {
                text.push_str(&v.to_string());
                for w in nbrs {
                    text.push_str(&format!(" {w}"));
                }
                text.push('\n');
            }
        }
    }
    fs::write(out, text).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))
}
