use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drastic_cli::config::{LayerSource, ModelSpec};
use drastic_cli::pipeline::{load_layer, read_grid_file, read_wells, scheme_weights};
use drastic_cli::render::{encode_png, render_map, Palette};
use drastic_cli::report::roc_csv;
use drastic_cli::scenario::{scenario_config, write_scenario};
use drastic_cli::{run_pipeline, PipelineConfig, PipelineError};
use drastic_core::classification::{apply_rating, classify, jenks_breaks};
use drastic_core::grid::write_ascii_grid;
use drastic_core::index::{compute_index, IndexModel, Scheme, DEFAULT_CLASS_COUNT};
use drastic_core::interpolation::{VariogramShape, DEFAULT_NEIGHBORS, DEFAULT_POWER};
use drastic_core::synthetic::{SyntheticScenario, DEFAULT_SEED, DEFAULT_STEEPNESS};
use drastic_core::validation::{binarize, roc_auc, score_wells, zone_coincidence, NITRATE_THRESHOLD_MG_L};
use log::info;

#[derive(Parser)]
#[command(name = "drastic", version, about = "Groundwater vulnerability mapping with DRASTIC, land use and AHP weighting")]
struct Cli {
    /// Pipeline configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for artifacts
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for per-cell stages (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for synthetic data
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic basin and a ready-to-run config.json
    Generate(GenerateArgs),
    /// Interpolate sample points onto a grid
    Interpolate(InterpolateArgs),
    /// Rate a physical layer with its rating table
    Rate(RateArgs),
    /// Print the weights of a scheme
    Weights(SchemeArgs),
    /// Vulnerability index from rating grids
    Index(IndexArgs),
    /// Natural-breaks classification of an index grid
    Classify(ClassifyArgs),
    /// ROC and zone coincidence of an index grid against wells
    Validate(ValidateArgs),
    /// Render a class grid to PNG
    Render(RenderArgs),
    /// Run the full pipeline from --config
    Run,
}

#[derive(Args)]
struct GenerateArgs {
    /// Grid size in cells along each side
    #[arg(long, default_value_t = 200)]
    size: usize,
    #[arg(long, default_value_t = 70)]
    wells: usize,
    /// Logistic slope of the planted contamination; `inf` for a hard threshold
    #[arg(long, default_value_t = DEFAULT_STEEPNESS)]
    steepness: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Idw,
    Kriging,
}

#[derive(Args)]
struct InterpolateArgs {
    /// CSV with header x,y,value
    #[arg(long)]
    points: PathBuf,
    /// Grid whose header defines the output geometry
    #[arg(long)]
    template: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Idw)]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_POWER)]
    power: f64,
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    neighbors: usize,
    #[arg(long, default_value_t = VariogramShape::Spherical)]
    shape: VariogramShape,
    #[arg(long, default_value_t = drastic_cli::config::DEFAULT_LAGS)]
    lags: usize,
    #[arg(long)]
    max_distance: Option<f64>,
    /// Fixed variogram as nugget,sill,range instead of fitting one
    #[arg(long, value_delimiter = ',', num_args = 3)]
    model: Option<Vec<f64>>,
    /// Output file name inside --out-dir
    #[arg(long, default_value = "interpolated.asc")]
    name: String,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    input: PathBuf,
    /// D, R, A, S, T, I, C or LU
    #[arg(long)]
    parameter: String,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long, default_value = "fuzzy_ahp_lu")]
    scheme: Scheme,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    scheme: Scheme,
    /// Directory holding <P>_rating.asc (from `rate`) or <P>.asc rating grids
    #[arg(long)]
    ratings_dir: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CLASS_COUNT)]
    classes: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    vi: PathBuf,
    /// CSV with header x,y,nitrate_mg_l
    #[arg(long)]
    wells: PathBuf,
    /// Class grid for zone coincidence
    #[arg(long)]
    classes: Option<PathBuf>,
    #[arg(long, default_value_t = NITRATE_THRESHOLD_MG_L)]
    threshold: f64,
    /// Class ids in the high zone (default: the top two of five)
    #[arg(long, value_delimiter = ',', default_values_t = [4u32, 5])]
    high: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    low: Vec<u32>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    classes: PathBuf,
    /// Number of classes; inferred from the grid when absent
    #[arg(long)]
    k: Option<usize>,
    /// Output file name inside --out-dir
    #[arg(long, default_value = "map.png")]
    name: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::error!("cannot size worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn out_dir(cli: &Cli, fallback: &str) -> PathBuf {
    cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(fallback))
}

/// Configuration from --config, or the built-in defaults.
fn config_or_default(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    match &cli.config {
        Some(p) => PipelineConfig::from_path(p),
        None => Ok(scenario_config()),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| PipelineError::Write {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| PipelineError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    info!("wrote {}", path.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), PipelineError> {
    match &cli.command {
        Command::Generate(a) => {
            let mut s = SyntheticScenario {
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                wells: a.wells,
                steepness: a.steepness,
                ..SyntheticScenario::default()
            };
            s.geometry.ncols = a.size;
            s.geometry.nrows = a.size;
            let dir = out_dir(cli, "scenario");
            let files = write_scenario(&dir, &s)?;
            info!("wrote {} files to {}", files.len(), dir.display());
            Ok(())
        }
        Command::Run => {
            let path = cli
                .config
                .as_ref()
                .ok_or_else(|| PipelineError::Config("run needs --config".into()))?;
            let cfg = PipelineConfig::from_path(path)?;
            let dir = match (&cli.out_dir, &cfg.output.dir) {
                (Some(d), _) => d.clone(),
                (None, Some(d)) => cfg.resolve(d),
                (None, None) => PathBuf::from("out"),
            };
            let summary = run_pipeline(&cfg, &dir)?;
            info!(
                "{} schemes, {} artifacts in {}",
                summary.results.len(),
                summary.manifest.len() + 1,
                dir.display()
            );
            Ok(())
        }
        Command::Interpolate(a) => {
            let template = read_grid_file("interpolation", &a.template)?;
            let src = match a.method {
                Method::Idw => LayerSource::Idw {
                    points: a.points.clone(),
                    power: a.power,
                    neighbors: a.neighbors,
                },
                Method::Kriging => LayerSource::Kriging {
                    points: a.points.clone(),
                    shape: a.shape,
                    lags: a.lags,
                    max_distance: a.max_distance,
                    model: a.model.as_ref().map(|m| ModelSpec {
                        nugget: m[0],
                        sill: m[1],
                        range: m[2],
                    }),
                },
            };
            let cfg = scenario_config();
            let (grid, fit) = load_layer(&cfg, "interpolated", &src, Some(template.header()))?;
            if let Some(f) = fit {
                let m = f.model;
                println!("shape={} nugget={} sill={} range={}", m.shape, m.nugget, m.sill, m.range);
            }
            write(&out_dir(cli, ".").join(&a.name), write_ascii_grid(&grid).as_bytes())
        }
        Command::Rate(a) => {
            let tables = config_or_default(cli)?.rating_schemes()?;
            let table = tables
                .get(&a.parameter)
                .ok_or_else(|| PipelineError::Config(format!("unknown parameter {}", a.parameter)))?;
            let g = read_grid_file("ratings", &a.input)?;
            let r = apply_rating(&g, table).map_err(|e| PipelineError::compute("ratings", a.parameter.as_str(), e))?;
            if r.out_of_range > 0 {
                log::warn!("{} cells outside the rating table set to nodata", r.out_of_range);
            }
            let name = format!("{}_rating.asc", a.parameter);
            write(&out_dir(cli, ".").join(name), write_ascii_grid(&r.grid).as_bytes())
        }
        Command::Weights(a) => {
            let cfg = config_or_default(cli)?;
            let tables = cfg.rating_schemes()?;
            let (w, c) = scheme_weights(&cfg, a.scheme, &tables)?;
            println!("parameter,weight");
            for (p, x) in a.scheme.parameters().iter().zip(&w) {
                println!("{p},{x}");
            }
            if let Some(c) = c {
                println!("# lambda_max={} CI={} CR={} acceptable={}", c.lambda_max, c.ci, c.cr, c.acceptable);
            }
            Ok(())
        }
        Command::Index(a) => {
            let cfg = config_or_default(cli)?;
            let tables = cfg.rating_schemes()?;
            let (w, _) = scheme_weights(&cfg, a.scheme, &tables)?;
            let mut rated = BTreeMap::new();
            for p in a.scheme.parameters() {
                // `rate` output, or the `ratings/` directory of a full run
                let named = a.ratings_dir.join(format!("{p}_rating.asc"));
                let path = if named.exists() { named } else { a.ratings_dir.join(format!("{p}.asc")) };
                let g = read_grid_file("index", &path)?;
                rated.insert(p.to_string(), g);
            }
            let model = IndexModel::new(a.scheme, w, &rated)
                .map_err(|e| PipelineError::compute("index", a.scheme.name(), e))?;
            let vi = compute_index(&model).map_err(|e| PipelineError::compute("index", a.scheme.name(), e))?;
            let name = format!("{}_vi.asc", a.scheme.name());
            write(&out_dir(cli, ".").join(name), write_ascii_grid(&vi).as_bytes())
        }
        Command::Classify(a) => {
            let vi = read_grid_file("classification", &a.input)?;
            let values: Vec<f64> = vi.valid_values().collect();
            let compute = |e| PipelineError::compute("classification", a.input.display().to_string(), e);
            let breaks = jenks_breaks(&values, a.classes).map_err(compute)?;
            let classes = classify(&vi, &breaks).map_err(compute)?;
            println!("breaks: {:?}", breaks.breaks);
            write(&out_dir(cli, ".").join("classes.asc"), write_ascii_grid(&classes).as_bytes())
        }
        Command::Validate(a) => {
            let vi = read_grid_file("validation", &a.vi)?;
            let obs = read_wells(&a.wells)?;
            let labeled = binarize(&obs, a.threshold).map_err(|e| PipelineError::input("validation", "threshold", e))?;
            let scored = score_wells(&vi, &labeled)
                .map_err(|e| PipelineError::input("validation", a.wells.display().to_string(), e))?;
            let roc = roc_auc(&scored.pairs())
                .map_err(|e| PipelineError::compute("validation", a.wells.display().to_string(), e))?;
            println!("auc={} n_pos={} n_neg={} n_skipped={}", roc.auc, roc.n_pos, roc.n_neg, scored.skipped());
            if let Some(path) = &a.classes {
                let classes = read_grid_file("validation", path)?;
                let high: BTreeSet<u32> = a.high.iter().copied().collect();
                let low: BTreeSet<u32> = a.low.iter().copied().collect();
                let z = zone_coincidence(&classes, &obs, a.threshold, &high, &low)
                    .map_err(|e| PipelineError::input("validation", path.display().to_string(), e))?;
                let show = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                println!(
                    "pct_high_area={} pct_pos_in_high={} pct_neg_in_low={}",
                    z.pct_high_area,
                    show(z.pct_pos_in_high),
                    show(z.pct_neg_in_low)
                );
            }
            write(&out_dir(cli, ".").join("roc.csv"), roc_csv(&roc).as_bytes())
        }
        Command::Render(a) => {
            let classes = read_grid_file("render", &a.classes)?;
            let k = match a.k {
                Some(k) => k,
                None => classes.valid_values().fold(1.0f64, f64::max) as usize,
            };
            let palette = match &config_or_default(cli)?.output.palette {
                Some(c) if cli.config.is_some() => {
                    Palette::parse(c).map_err(|e| PipelineError::Config(format!("palette: {e}")))?
                }
                _ => Palette::default_for(k),
            };
            let img = render_map(&classes, &palette)
                .map_err(|e| PipelineError::compute("render", a.classes.display().to_string(), e))?;
            write(&out_dir(cli, ".").join(&a.name), &encode_png(&img))
        }
    }
}
