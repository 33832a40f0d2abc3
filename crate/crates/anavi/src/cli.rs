//! The `anavi` command-line tool: reproducible batch workflows over the
//! library, one subcommand per capability.
//!
//! Every run that produces files also writes a `run.json` echoing the fully
//! resolved configuration next to its primary output. All outputs are
//! deterministic given `--seed` (or the `ANAVI_SEED` environment variable).
//! Exit codes: 0 success, 2 usage, 3 data error, 4 no path.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::acousticmap::{fixed_listener_map, fixed_robot_map, oracle_map, RasterMode};
use crate::acoustics::AcousticConfig;
use crate::audiomeasure;
use crate::dataset::{self, DatasetManifest, Split};
use crate::fixtures;
use crate::gridmap::{load_map, save_map, GridMap, MaterialTable, Pose2};
use crate::metrics::{self, default_epsilons};
use crate::planner::{self, ActionProfile, Listener, PlanProblem};
use crate::predictor::{load_model, save_model, PredictorKind, TrainConfig};

/// Exit code for data/processing failures.
const EXIT_DATA: i32 = 3;
/// Exit code when the planner finds no path.
const EXIT_NO_PATH: i32 = 4;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Message(String),
    #[error(transparent)]
    Map(#[from] crate::gridmap::MapError),
    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),
    #[error(transparent)]
    Predictor(#[from] crate::predictor::PredictorError),
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error(transparent)]
    AcousticMap(#[from] crate::acousticmap::AcousticMapError),
    #[error(transparent)]
    Plan(#[from] crate::planner::PlanError),
    #[error(transparent)]
    Audio(#[from] crate::audiomeasure::AudioError),
    #[error(transparent)]
    Sensing(#[from] crate::sensing::SensingError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Plan(crate::planner::PlanError::NoPath) => EXIT_NO_PATH,
            _ => EXIT_DATA,
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Echo the resolved arguments of a run for auditability.
fn write_run_json<T: Serialize>(dir_or_sibling: &Path, subcommand: &str, args: &T) -> Result<(), CliError> {
    let path = if dir_or_sibling.extension().is_some() {
        dir_or_sibling.with_extension("run.json")
    } else {
        dir_or_sibling.join("run.json")
    };
    #[derive(Serialize)]
    struct RunRecord<'a, T> {
        subcommand: &'a str,
        config: &'a T,
    }
    let json = serde_json::to_string_pretty(&RunRecord { subcommand, config: args })
        .expect("run config serialization cannot fail");
    write_text(&path, &json)
}

#[derive(Parser, Debug)]
#[command(
    name = "anavi",
    about = "Acoustic noise simulation, loudness prediction, and noise-aware path planning on 2D indoor maps",
    version
)]
struct Cli {
    /// Worker thread cap for parallel stages.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the bundled benchmark maps and their split lists.
    GenMaps(GenMapsArgs),
    /// Generate a supervised dataset for one split.
    GenData(GenDataArgs),
    /// Train (or fit) a predictor.
    Train(TrainArgs),
    /// Evaluate a predictor: accuracy curve and distribution dump.
    Eval(EvalArgs),
    /// Dense prediction raster around a fixed robot or listener.
    AcousticMap(AcousticMapArgs),
    /// Plan a path trading travel time against listener noise.
    Plan(PlanArgs),
    /// Peak decibels of a WAV recording.
    Measure(MeasureArgs),
    /// Compare recorded loudness against model predictions.
    Compare(CompareArgs),
    /// End-to-end pipeline: maps, data, training, evaluation, plans.
    Repro(ReproArgs),
}

#[derive(Args, Debug, Serialize)]
struct GenMapsArgs {
    /// Output directory for map files and splits.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct GenDataArgs {
    /// Directory produced by gen-maps.
    #[arg(long)]
    maps: PathBuf,
    /// Which split of splits.json to generate for.
    #[arg(long, value_parser = parse_split)]
    split: Split,
    /// Samples per map; defaults to 2000 for train, 500 otherwise.
    #[arg(long)]
    per_map: Option<usize>,
    #[arg(long, env = "ANAVI_SEED", default_value_t = 0)]
    seed: u64,
    /// Stochastic rays per impulse trace.
    #[arg(long, default_value_t = AcousticConfig::default().n_rays)]
    n_rays: usize,
    /// Output dataset file (.jsonl); the manifest lands beside it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct TrainArgs {
    /// One of: heuristic, dislinreg, dirdismlp, vis_pano, vis_ego,
    /// binned16, binned64, binned128.
    #[arg(long)]
    model: String,
    /// Training dataset (.jsonl).
    #[arg(long)]
    train: PathBuf,
    /// Validation dataset (.jsonl).
    #[arg(long)]
    val: PathBuf,
    #[arg(long, env = "ANAVI_SEED", default_value_t = 0)]
    seed: u64,
    /// Training epochs.
    #[arg(long, default_value_t = 60)]
    epochs: usize,
    /// Output model file (.json); the train log CSV lands beside it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    /// Model file from `train`.
    #[arg(long)]
    model: PathBuf,
    /// Dataset to evaluate on (.jsonl).
    #[arg(long)]
    data: PathBuf,
    /// Accuracy curve CSV output.
    #[arg(long)]
    out_curve: PathBuf,
    /// Distribution dump CSV output.
    #[arg(long)]
    out_dist: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct AcousticMapArgs {
    /// fixed_robot or fixed_listener.
    #[arg(long)]
    mode: String,
    /// Anchor pose "X,Y" in meters.
    #[arg(long)]
    at: String,
    /// Model file; ignored with --oracle.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Map file.
    #[arg(long)]
    map: PathBuf,
    /// Raster JSON output; a CSV lands beside it.
    #[arg(long)]
    out: PathBuf,
    /// Trace ground truth instead of predicting.
    #[arg(long, default_value_t = false)]
    oracle: bool,
    #[arg(long, env = "ANAVI_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct PlanArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Start pose "X,Y" in meters.
    #[arg(long)]
    start: String,
    /// Goal pose "X,Y" in meters.
    #[arg(long)]
    goal: String,
    /// Listener "X,Y,WEIGHT,THRESHOLD_DB"; repeatable.
    #[arg(long = "listener")]
    listeners: Vec<String>,
    /// Noise-vs-time tradeoff weight.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Action profile JSON file; bundled defaults when omitted.
    #[arg(long)]
    actions: Option<PathBuf>,
    /// Also trace ground-truth listener audio along the plan.
    #[arg(long, default_value_t = false)]
    simulate: bool,
    #[arg(long, env = "ANAVI_SEED", default_value_t = 0)]
    seed: u64,
    /// Plan JSON output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct MeasureArgs {
    /// WAV file to measure.
    #[arg(long)]
    wav: PathBuf,
    /// Calibration offset added to the reading, dB.
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    /// Optional output directory for the reading and run.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CompareArgs {
    /// Measurement manifest JSON: [{label, distance, direction, wav}, ...].
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Panorama location "MAP.json:X,Y" — scan taken at X,Y on that map.
    #[arg(long)]
    pano_from: String,
    /// Source loudness at the origin, dB.
    #[arg(long)]
    source_db: f64,
    /// Calibration offset for the recordings, dB.
    #[arg(long, default_value_t = 0.0)]
    offset: f64,
    /// Comparison table CSV output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ReproArgs {
    #[arg(long, env = "ANAVI_SEED", default_value_t = 0)]
    seed: u64,
    /// Root output directory.
    #[arg(long)]
    out: PathBuf,
    /// Training samples per map.
    #[arg(long, default_value_t = 2000)]
    train_per_map: usize,
    /// Validation/test samples per map.
    #[arg(long, default_value_t = 500)]
    eval_per_map: usize,
    #[arg(long, default_value_t = 60)]
    epochs: usize,
    /// Stochastic rays per impulse trace.
    #[arg(long, default_value_t = AcousticConfig::default().n_rays)]
    n_rays: usize,
    /// Models to train and evaluate.
    #[arg(long, value_delimiter = ',',
          default_value = "dislinreg,dirdismlp,vis_pano,vis_ego")]
    models: Vec<String>,
}

fn parse_split(s: &str) -> Result<Split, String> {
    match s {
        "train" => Ok(Split::Train),
        "val" => Ok(Split::Val),
        "test" => Ok(Split::Test),
        other => Err(format!("unknown split '{other}' (train|val|test)")),
    }
}

fn parse_pose(s: &str) -> Result<Pose2, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Message(format!("expected \"X,Y\", got '{s}'")));
    }
    let x = parts[0].trim().parse::<f64>();
    let y = parts[1].trim().parse::<f64>();
    match (x, y) {
        (Ok(x), Ok(y)) => Ok(Pose2::new(x, y)),
        _ => Err(CliError::Message(format!("expected numeric \"X,Y\", got '{s}'"))),
    }
}

fn parse_listener(s: &str) -> Result<Listener, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Message(format!(
            "expected \"X,Y,WEIGHT,THRESHOLD_DB\", got '{s}'"
        )));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums
        .map_err(|_| CliError::Message(format!("expected four numbers in '{s}'")))?;
    Ok(Listener {
        pose: Pose2::new(nums[0], nums[1]),
        weight: nums[2],
        threshold_db: nums[3],
    })
}

/// Parse and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore the error when a pool already exists (e.g. repeated calls
        // in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let result = match &cli.command {
        Command::GenMaps(args) => gen_maps(args),
        Command::GenData(args) => gen_data(args),
        Command::Train(args) => train_cmd(args),
        Command::Eval(args) => eval_cmd(args),
        Command::AcousticMap(args) => acoustic_map_cmd(args),
        Command::Plan(args) => plan_cmd(args),
        Command::Measure(args) => measure_cmd(args),
        Command::Compare(args) => compare_cmd(args),
        Command::Repro(args) => repro_cmd(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Map ids per split, as written to splits.json.
#[derive(Serialize, serde::Deserialize)]
struct SplitsFile {
    train: Vec<String>,
    val: Vec<String>,
    test: Vec<String>,
}

fn gen_maps(args: &GenMapsArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.display().to_string(),
        source,
    })?;
    let set = fixtures::default_split();
    let ids = |maps: &[(GridMap, MaterialTable)]| {
        maps.iter().map(|(m, _)| m.id.clone()).collect::<Vec<_>>()
    };
    let splits = SplitsFile { train: ids(&set.train), val: ids(&set.val), test: ids(&set.test) };
    for (map, table) in set.train.iter().chain(&set.val).chain(&set.test) {
        save_map(map, table, &args.out.join(format!("{}.json", map.id)))?;
    }
    write_text(
        &args.out.join("splits.json"),
        &serde_json::to_string_pretty(&splits).expect("splits serialize"),
    )?;
    write_run_json(&args.out, "gen-maps", args)?;
    println!(
        "wrote {} maps to {}",
        splits.train.len() + splits.val.len() + splits.test.len(),
        args.out.display()
    );
    Ok(())
}

fn load_split_maps(
    maps_dir: &Path,
    split: Split,
) -> Result<Vec<(GridMap, MaterialTable)>, CliError> {
    let splits_path = maps_dir.join("splits.json");
    let text = std::fs::read_to_string(&splits_path).map_err(|source| CliError::Io {
        path: splits_path.display().to_string(),
        source,
    })?;
    let splits: SplitsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Message(format!("bad splits.json: {e}")))?;
    let ids = match split {
        Split::Train => &splits.train,
        Split::Val => &splits.val,
        Split::Test => &splits.test,
    };
    let mut maps = Vec::with_capacity(ids.len());
    for id in ids {
        maps.push(load_map(&maps_dir.join(format!("{id}.json")))?);
    }
    Ok(maps)
}

fn gen_data(args: &GenDataArgs) -> Result<(), CliError> {
    let maps = load_split_maps(&args.maps, args.split)?;
    let per_map = args.per_map.unwrap_or(match args.split {
        Split::Train => 2000,
        _ => 500,
    });
    let cfg = AcousticConfig { n_rays: args.n_rays, ..AcousticConfig::default() };
    let samples = dataset::generate(&maps, per_map, args.seed, &cfg)?;
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent).ok();
    }
    dataset::write_dataset(&args.out, &samples)?;
    let manifest = DatasetManifest {
        schema_version: dataset::SCHEMA_VERSION,
        split: args.split,
        map_ids: maps.iter().map(|(m, _)| m.id.clone()).collect(),
        samples_per_map: per_map,
        seed: args.seed,
        acoustic_cfg: cfg,
    };
    dataset::write_manifest(&args.out.with_extension("manifest.json"), &manifest)?;
    write_run_json(&args.out, "gen-data", args)?;
    println!("wrote {} samples to {}", samples.len(), args.out.display());
    Ok(())
}

fn train_cmd(args: &TrainArgs) -> Result<(), CliError> {
    let kind = PredictorKind::parse(&args.model)?;
    let train_set = dataset::read_dataset(&args.train)?;
    let val_set = dataset::read_dataset(&args.val)?;
    let cfg = TrainConfig { epochs: args.epochs, ..TrainConfig::for_kind(kind, args.seed) };
    let (model, log) = crate::predictor::train(kind, &cfg, &train_set, &val_set)?;
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent).ok();
    }
    save_model(&model, &args.out)?;
    write_text(&args.out.with_extension("log.csv"), &log.to_csv_string())?;
    write_run_json(&args.out, "train", args)?;
    let last = log.entries.last();
    println!(
        "trained {} ({} epochs, best epoch {}, final val loss {})",
        kind.tag(),
        log.entries.len(),
        log.best_epoch,
        last.map_or(f64::NAN, |e| e.val_loss)
    );
    Ok(())
}

fn eval_cmd(args: &EvalArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let samples = dataset::read_dataset(&args.data)?;
    let y_true: Vec<f64> = samples.iter().map(|s| s.y).collect();
    let y_pred = model.predict_samples(&samples)?;
    let curve = metrics::eps_accuracy(&y_true, &y_pred, &default_epsilons())?;
    let auc = metrics::curve_auc(&curve)?;
    write_text(&args.out_curve, &curve.to_csv_string())?;
    let rows = metrics::dump_distribution(&samples, &model)?;
    write_text(&args.out_dist, &metrics::distribution_to_csv(&rows))?;
    write_run_json(&args.out_curve, "eval", args)?;
    println!(
        "evaluated {} on {} samples: auc {auc}, acc@1/128 {}",
        model.kind().tag(),
        samples.len(),
        curve.accuracies[0]
    );
    Ok(())
}

fn acoustic_map_cmd(args: &AcousticMapArgs) -> Result<(), CliError> {
    let (map, materials) = load_map(&args.map)?;
    let anchor = parse_pose(&args.at)?;
    let mode = match args.mode.as_str() {
        "fixed_robot" => RasterMode::FixedRobot,
        "fixed_listener" => RasterMode::FixedListener,
        other => {
            return Err(CliError::Message(format!(
                "unknown mode '{other}' (fixed_robot|fixed_listener)"
            )))
        }
    };
    let raster = if args.oracle {
        oracle_map(&map, &materials, &anchor, mode, &AcousticConfig::default(), args.seed)?
    } else {
        let model_path = args.model.as_ref().ok_or_else(|| {
            CliError::Message("--model is required unless --oracle is set".into())
        })?;
        let model = load_model(model_path)?;
        match mode {
            RasterMode::FixedRobot => fixed_robot_map(&map, &materials, &anchor, &model)?,
            RasterMode::FixedListener => fixed_listener_map(&map, &materials, &anchor, &model)?,
        }
    };
    write_text(
        &args.out,
        &serde_json::to_string_pretty(&raster).expect("raster serialize"),
    )?;
    write_text(&args.out.with_extension("csv"), &raster.to_csv_string())?;
    write_run_json(&args.out, "acoustic-map", args)?;
    println!("wrote raster to {}", args.out.display());
    Ok(())
}

fn read_actions(path: &Path) -> Result<Vec<ActionProfile>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Message(format!("bad actions file {}: {e}", path.display())))
}

fn plan_cmd(args: &PlanArgs) -> Result<(), CliError> {
    let (map, materials) = load_map(&args.map)?;
    let model = load_model(&args.model)?;
    let actions = match &args.actions {
        Some(path) => read_actions(path)?,
        None => planner::default_actions(),
    };
    let listeners = args
        .listeners
        .iter()
        .map(|s| parse_listener(s))
        .collect::<Result<Vec<_>, _>>()?;
    let problem = PlanProblem {
        map: &map,
        materials: &materials,
        model: &model,
        start: parse_pose(&args.start)?,
        goal: parse_pose(&args.goal)?,
        listeners,
        actions,
        lambda: args.lambda,
    };
    let plan = planner::plan(&problem)?;

    #[derive(Serialize)]
    struct PlanOutput<'a> {
        lambda: f64,
        plan: &'a planner::Plan,
        #[serde(skip_serializing_if = "Option::is_none")]
        simulated_trace: Option<Vec<Vec<f64>>>,
    }
    let simulated_trace = if args.simulate {
        Some(planner::simulate_plan_audio(
            &problem,
            &plan,
            &AcousticConfig::default(),
            args.seed,
        )?)
    } else {
        None
    };
    write_text(
        &args.out,
        &serde_json::to_string_pretty(&PlanOutput {
            lambda: args.lambda,
            plan: &plan,
            simulated_trace,
        })
        .expect("plan serialize"),
    )?;
    write_run_json(&args.out, "plan", args)?;
    println!(
        "plan: {} steps, {}s travel, noise cost {}",
        plan.steps.len(),
        plan.total_time,
        plan.total_noise_cost
    );
    Ok(())
}

fn measure_cmd(args: &MeasureArgs) -> Result<(), CliError> {
    let waveform = audiomeasure::load_wav(&args.wav)?;
    let db = audiomeasure::waveform_db(&waveform, args.offset)?;
    println!("{db}");
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(|source| CliError::Io {
            path: out.display().to_string(),
            source,
        })?;
        write_text(&out.join("measure.json"), &format!("{{\"db_max\": {db}}}\n"))?;
        write_run_json(out, "measure", args)?;
    }
    Ok(())
}

fn compare_cmd(args: &CompareArgs) -> Result<(), CliError> {
    let (map_part, pose_part) = args.pano_from.rsplit_once(':').ok_or_else(|| {
        CliError::Message(format!("expected \"MAP.json:X,Y\", got '{}'", args.pano_from))
    })?;
    let (map, materials) = load_map(Path::new(map_part))?;
    let origin = parse_pose(pose_part)?;
    let scan =
        crate::sensing::scan_panorama(&map, &materials, &origin, crate::sensing::DEFAULT_SCAN_BINS)?;
    let model = load_model(&args.model)?;
    let text = std::fs::read_to_string(&args.manifest).map_err(|source| CliError::Io {
        path: args.manifest.display().to_string(),
        source,
    })?;
    let specs: Vec<audiomeasure::MeasurementSpec> = serde_json::from_str(&text)
        .map_err(|e| CliError::Message(format!("bad manifest: {e}")))?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let records =
        audiomeasure::compare_table(&specs, &model, &scan, args.source_db, args.offset, base)?;
    write_text(&args.out, &audiomeasure::records_to_csv(&records))?;
    write_run_json(&args.out, "compare", args)?;
    println!("compared {} measurements", records.len());
    Ok(())
}

fn repro_cmd(args: &ReproArgs) -> Result<(), CliError> {
    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.display().to_string(),
        source,
    })?;

    // Maps.
    gen_maps(&GenMapsArgs { out: out.join("maps") })?;

    // Datasets per split.
    for (split, per_map) in [
        (Split::Train, args.train_per_map),
        (Split::Val, args.eval_per_map),
        (Split::Test, args.eval_per_map),
    ] {
        gen_data(&GenDataArgs {
            maps: out.join("maps"),
            split,
            per_map: Some(per_map),
            seed: args.seed,
            n_rays: args.n_rays,
            out: out.join(format!("data/{}.jsonl", split.tag())),
        })?;
    }

    // Models and metrics. The heuristic needs no training but is evaluated
    // alongside the rest.
    let mut summary: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    let mut kinds = vec!["heuristic".to_string()];
    kinds.extend(args.models.iter().cloned());
    for tag in &kinds {
        let model_path = out.join(format!("models/{tag}.json"));
        train_cmd(&TrainArgs {
            model: tag.clone(),
            train: out.join("data/train.jsonl"),
            val: out.join("data/val.jsonl"),
            seed: args.seed,
            epochs: args.epochs,
            out: model_path.clone(),
        })?;
        eval_cmd(&EvalArgs {
            model: model_path.clone(),
            data: out.join("data/test.jsonl"),
            out_curve: out.join(format!("metrics/{tag}.curve.csv")),
            out_dist: out.join(format!("metrics/{tag}.dist.csv")),
        })?;
        let model = load_model(&model_path)?;
        let samples = dataset::read_dataset(&out.join("data/test.jsonl"))?;
        let y_true: Vec<f64> = samples.iter().map(|s| s.y).collect();
        let y_pred = model.predict_samples(&samples)?;
        let curve = metrics::eps_accuracy(&y_true, &y_pred, &default_epsilons())?;
        summary.insert(tag.clone(), (metrics::curve_auc(&curve)?, curve.accuracies[3]));
    }
    let mut summary_csv = String::from("model,auc,acc_at_4_128\n");
    for (tag, (auc, acc4)) in &summary {
        summary_csv.push_str(&format!("{tag},{auc},{acc4}\n"));
    }
    write_text(&out.join("metrics/summary.csv"), &summary_csv)?;

    // Demonstration plans on the two-room map with one listener guarding
    // the direct door: time-optimal versus noise-weighted.
    for (name, lambda) in [("direct", 0.0), ("quiet", 0.5)] {
        plan_cmd(&PlanArgs {
            map: out.join("maps/tworoom.json"),
            model: out.join("models/heuristic.json"),
            start: "0.625,1.125".into(),
            goal: "8.875,1.125".into(),
            listeners: vec!["6.125,1.125,1.0,60.0".into()],
            lambda,
            actions: None,
            simulate: true,
            seed: args.seed,
            out: out.join(format!("plans/{name}.json")),
        })?;
    }

    write_run_json(out, "repro", args)?;
    println!("repro complete under {}", out.display());
    Ok(())
}
