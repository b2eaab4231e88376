use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qgraph::commands::{self, Window};
use qgraph::config::{parse_config, ExperimentSpec, Family};
use qgraph::experiment::{self, GraphParams};
use qgraph::{Error, Result};
use qgraph_core::graph::LengthDistribution;
use qgraph_core::scattering::Boundary;

/// Quantum graph spectra, eigenvector entropies and the bounds they satisfy.
#[derive(Parser)]
#[command(name = "qgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a random regular graph or a star and save it as JSON.
    Generate(GenerateArgs),
    /// Find eigenvalues of a saved graph and write them as JSON lines.
    Spectrum(SpectrumArgs),
    /// Per-eigenvalue entropy CSV from a saved spectrum.
    Entropy(PairArgs),
    /// Check every entropy bound on a saved spectrum; exits 4 on a violation.
    Bounds(PairArgs),
    /// Average entropy of Neumann stars against the large-star prediction.
    StarAverage(SpecArgs),
    /// Ground state of a Neumann star with one long edge.
    Localize(SpecArgs),
    /// Print both m(ξ) variants of the star constant and which one is used.
    Constants {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment from a config file; flags override file keys.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        spec: SpecArgs,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "regular")]
    family: String,
    /// Vertex count (regular) or edge count (star).
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, default_value = "neumann")]
    boundary: String,
    #[arg(long, default_value_t = 1.0)]
    length_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    length_hi: f64,
    #[arg(long)]
    longest: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    k_min: f64,
    #[arg(long)]
    k_max: Option<f64>,
    #[arg(long)]
    n_eigen: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    output: PathBuf,
    /// Also write the entropy CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

/// Every config key as a flag.
#[derive(Args, Default)]
struct SpecArgs {
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    boundary: Option<String>,
    #[arg(long)]
    length_lo: Option<String>,
    #[arg(long)]
    length_hi: Option<String>,
    #[arg(long)]
    k_min: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    n_eigen: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    longest: Option<String>,
    #[arg(long)]
    m_variant: Option<String>,
    #[arg(long)]
    mass_per_edge: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl SpecArgs {
    fn overlay(self, map: &mut BTreeMap<String, String>) {
        let pairs = [
            ("kind", self.kind),
            ("family", self.family),
            ("sizes", self.sizes),
            ("degree", self.degree),
            ("boundary", self.boundary),
            ("length_lo", self.length_lo),
            ("length_hi", self.length_hi),
            ("k_min", self.k_min),
            ("k_max", self.k_max),
            ("n_eigen", self.n_eigen),
            ("seeds", self.seeds),
            ("tol", self.tol),
            ("longest", self.longest),
            ("m_variant", self.m_variant),
            ("mass_per_edge", self.mass_per_edge),
            ("output", self.output),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
    }
}

fn run_spec(map: BTreeMap<String, String>) -> Result<()> {
    let spec = ExperimentSpec::from_map(&map)?;
    let out = experiment::run(&spec)?;
    for f in &out.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn star_spec(kind: &str, args: SpecArgs) -> Result<()> {
    let mut map = BTreeMap::from([
        ("kind".to_string(), kind.to_string()),
        ("family".to_string(), "star".to_string()),
    ]);
    args.overlay(&mut map);
    run_spec(map)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let family = match a.family.as_str() {
                "regular" => Family::Regular,
                "star" => Family::Star,
                f => return Err(Error::Config(format!("unknown family {f:?}"))),
            };
            let boundary = match a.boundary.as_str() {
                "neumann" => Boundary::Neumann,
                "equitransmitting" => Boundary::EquiTransmitting,
                b => return Err(Error::Config(format!("unknown boundary {b:?}"))),
            };
            let params = GraphParams {
                family,
                degree: a.degree,
                boundary,
                lengths: LengthDistribution::uniform(a.length_lo, a.length_hi)?,
                longest: a.longest,
            };
            let qg = commands::generate(&params, a.size, a.seed, &a.output)?;
            println!("{}: {} vertices, {} bonds", a.output.display(), qg.graph().vertex_count(), qg.bond_count());
        }
        Command::Spectrum(a) => {
            let window = Window { k_min: a.k_min, k_max: a.k_max, n_eigen: a.n_eigen, tol: a.tol };
            let n = commands::spectrum(&a.graph, window, &a.output, a.csv.as_deref())?;
            println!("{}: {n} eigenvalues", a.output.display());
        }
        Command::Entropy(a) => {
            let n = commands::entropy(&a.graph, &a.spectrum, &a.output)?;
            println!("{}: {n} rows", a.output.display());
        }
        Command::Bounds(a) => {
            let table = commands::bounds(&a.graph, &a.spectrum, &a.output)?;
            for b in &table.bounds {
                match (&b.skipped, b.min_margin_over_spectrum) {
                    (Some(why), _) => println!("{:<24} skipped: {why}", b.bound_name),
                    (None, Some(m)) => println!("{:<24} min margin {m:.6e} over {} eigenvectors", b.bound_name, b.checked),
                    (None, None) => println!("{:<24} nothing checked", b.bound_name),
                }
            }
        }
        Command::StarAverage(a) => star_spec("star-average", a)?,
        Command::Localize(a) => star_spec("localization", a)?,
        Command::Constants { tol, json } => {
            let report = commands::constants(tol)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));
            } else {
                println!("{report}");
            }
        }
        Command::Run { config, spec } => {
            let mut map = match config {
                Some(p) => parse_config(&std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?)?,
                None => BTreeMap::new(),
            };
            spec.overlay(&mut map);
            run_spec(map)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
