use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::Value;

use cleb::exhaustion::GraphFamily;
use cleb::verify::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(
    name = "cleb",
    version,
    about = "Minimal spanning arborescences, loop-contracting walks and wired exhaustions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// `--config` file, then to the subcommand's default.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Graph file (JSON: vertices, boundary, edges with optional weights)
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Graph family: path | tree:<a> | lattice:<d> | gw:geom:<p>:<seed> | gw:fixed:<k>:<seed> | subdiv:<M>:<seed>:<base>
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Weight model: exp1 | unif01 | fixed:<path> | boltzmann:<path>:<beta>
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// Master seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Comma-separated increasing radii
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<u64>>,
    #[arg(long, global = true)]
    pub step_cap: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON config: {family, params, radii, model, probes, seeds, step_cap, ...}
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal spanning arborescence of a weighted graph
    Msa {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Algorithm::Original)]
        algorithm: Algorithm,
    },
    /// One CLEB walk and its exposure log
    ClebWalk {
        #[command(flatten)]
        common: Common,
        /// Start vertex label (default: first interior vertex)
        #[arg(long)]
        start: Option<u64>,
    },
    /// One loop-contracting random walk on a graph or a wired ball
    Lcrw {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        start: Option<u64>,
        /// Ball radius when walking on a family
        #[arg(long)]
        radius: Option<u64>,
    },
    /// LCRW from the centre of a square box of Z^2, as a plot-ready trace
    LcrwGrid {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 201)]
        side: u64,
    },
    /// Erased-edge frequencies of Boltzmann-weighted LERW against the CLEB walk
    WilsonSandwich {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20")]
        betas: Vec<f64>,
        #[arg(long)]
        start: Option<u64>,
    },
    /// Compares the CLEB walk with invasion percolation on a symmetric graph
    InvasionCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        start: Option<u64>,
    },
    /// Empirical MSA law under several weight models
    DistCompare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "exp1,unif01")]
        models: Vec<String>,
        /// Report only this arborescence (comma-separated edge labels)
        #[arg(long, value_delimiter = ',')]
        target: Option<Vec<u64>>,
    },
    /// Probe edges of the wired MSA across radii
    WiredLimit {
        #[command(flatten)]
        common: Common,
        /// Probe site labels (default: the family origin)
        #[arg(long, value_delimiter = ',')]
        probes: Option<Vec<u64>>,
        /// Number of replica seeds
        #[arg(long)]
        seeds: Option<u64>,
    },
    /// Checks that connections in the wired MSA never break as the radius grows
    Connectivity {
        #[command(flatten)]
        common: Common,
        /// Site pairs as a-b, comma-separated
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        #[arg(long)]
        seeds: Option<u64>,
    },
    /// Runs a named verification suite (or "all")
    Verify {
        #[command(flatten)]
        common: Common,
        suite: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Original,
    Sequential,
    Walk,
    Brute,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    graph: Option<PathBuf>,
    family: Option<Value>,
    params: Option<Value>,
    model: Option<String>,
    weights: Option<String>,
    seed: Option<u64>,
    seeds: Option<u64>,
    samples: Option<u64>,
    radii: Option<Vec<u64>>,
    probes: Option<Vec<u64>>,
    step_cap: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

/// Resolved settings for one run.
#[derive(Debug, Default)]
pub struct Settings {
    pub graph: Option<PathBuf>,
    pub family: Option<GraphFamily>,
    pub model: Option<String>,
    pub seed: u64,
    pub seeds: Option<u64>,
    pub samples: Option<u64>,
    pub radii: Option<Vec<u64>>,
    pub probes: Option<Vec<u64>>,
    pub step_cap: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn family_from_value(family: Value, params: Option<Value>) -> Result<GraphFamily> {
    match (family, params) {
        (Value::String(s), None) => Ok(GraphFamily::parse(&s)?),
        (Value::String(kind), Some(Value::Object(mut p))) => {
            p.insert("kind".into(), Value::String(kind));
            Ok(serde_json::from_value(Value::Object(p)).context("family params")?)
        }
        (v @ Value::Object(_), None) => Ok(serde_json::from_value(v).context("family")?),
        _ => bail!("family must be a spec string, an object, or a kind with a params object"),
    }
}

impl Settings {
    pub fn resolve(common: &Common) -> Result<Self> {
        let file = match &common.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => FileConfig::default(),
        };
        let family = match (&common.family, file.family) {
            (Some(s), _) => Some(GraphFamily::parse(s)?),
            (None, Some(v)) => Some(family_from_value(v, file.params)?),
            (None, None) => None,
        };
        if let Some(f) = &family {
            f.validate()?;
        }
        let radii = common.radii.clone().or(file.radii);
        if let Some(r) = &radii {
            if r.is_empty() || r.windows(2).any(|w| w[0] >= w[1]) {
                bail!("radii must be a nonempty increasing list");
            }
        }
        Ok(Settings {
            graph: common.graph.clone().or(file.graph),
            family,
            model: common.weights.clone().or(file.weights).or(file.model),
            seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            seeds: file.seeds,
            samples: common.samples.or(file.samples),
            radii,
            probes: file.probes,
            step_cap: common.step_cap.or(file.step_cap),
            out: common.out.clone().or(file.out),
            format: common.format.or(file.format).unwrap_or_default(),
        })
    }
}
