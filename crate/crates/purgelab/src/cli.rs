//! The `purgelab` command-line driver.
//!
//! Subcommands: `filter` (write a filtered dataset plus a removal report),
//! `run` (execute an experiment plan from a JSON config), `measures`
//! (per-instance hardness and per-dataset complexity CSVs), `cod` (learner
//! diversity clustering), and `noise` (seeded label-noise injection).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
//! Every randomized subcommand honors `--seed` (falling back to the
//! `PURGELAB_SEED` environment variable, then 0), prints the effective
//! master seed, and is bit-reproducible.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::cv::CvProtocol;
use crate::datakit::{
    inject_label_noise, load_arff, load_csv, save_arff, save_csv, Dataset, LabelColumn,
};
use crate::diversity::{agglomerate, cod_matrix, representatives, Linkage};
use crate::evalstats::{
    run_experiment, summarize, summary_json, AdaptiveConfig, Condition, ExperimentPlan,
    FlagModeCfg, SummaryTable,
};
use crate::filters::{
    adaptive_filter, apply_filter_set, biased_filter, ensemble_filter, flag_misclassified,
    FlagMode,
};
use crate::learners::{builtin_specs, LearnerSpec, BUILTIN_IDS};
use crate::measures::{complexity_measures, hardness_measures, instance_hardness, noisy_instances};
use crate::{Error, Result};

#[derive(Parser)]
#[command(name = "purgelab", version, about = "Label-noise filtering laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter a dataset and write the kept instances plus a removal report.
    Filter(FilterArgs),
    /// Run an experiment plan from a JSON config file.
    Run(RunArgs),
    /// Emit per-instance hardness and per-dataset complexity CSVs.
    Measures(MeasuresArgs),
    /// Cluster learners by classifier output difference.
    Cod(CodArgs),
    /// Inject seeded label noise into a dataset.
    Noise(NoiseArgs),
}

#[derive(Args)]
struct CommonIo {
    /// Output directory (created if absent).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Master seed; defaults to $PURGELAB_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct FilterArgs {
    /// Dataset path (.csv or .arff).
    #[arg(long)]
    data: PathBuf,
    /// Label column for CSV inputs: a name or an index.
    #[arg(long)]
    label: Option<String>,
    /// biased | ensemble | adaptive
    #[arg(long, default_value = "ensemble")]
    mode: String,
    /// Single learner: the biased filter, or the adaptive target.
    #[arg(long, default_value = "knn:k=5")]
    learner: String,
    /// Comma list of filter-set learners; `all` = the five built-ins.
    #[arg(long, default_value = "all")]
    learners: String,
    /// Ensemble removal threshold in (0,1].
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// all | cv:N — where misclassification flags come from.
    #[arg(long, alias = "flag-mode")]
    flag_mode: Option<String>,
    /// Internal holdout fraction for the adaptive search.
    #[arg(long, default_value_t = 0.2)]
    validation_fraction: f64,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's folds.
    #[arg(long)]
    folds: Option<usize>,
    /// Override the config's repeats.
    #[arg(long)]
    repeats: Option<usize>,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct MeasuresArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label: Option<String>,
    /// Learner set for instance hardness; `all` = the five built-ins.
    #[arg(long, default_value = "all")]
    learners: String,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Neighborhood size for kDN.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// IH cutoff above which an instance counts as noisy.
    #[arg(long, default_value_t = 0.9)]
    cutoff: f64,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct CodArgs {
    /// Comma list of dataset paths.
    #[arg(long, value_delimiter = ',')]
    data: Vec<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    /// Comma list of learner specs; `all` = the five built-ins.
    #[arg(long, default_value = "all")]
    learners: String,
    /// Dendrogram cut height.
    #[arg(long, default_value_t = 0.18)]
    cut: f64,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    label: Option<String>,
    /// Fraction of labels to corrupt, in [0,1].
    #[arg(long)]
    rate: f64,
    #[command(flatten)]
    io: CommonIo,
}

/// Entry point for the binary; returns the process exit code.
pub fn main_from_env() -> i32 {
    main_with_args(std::env::args_os())
}

pub fn main_with_args<I>(args: I) -> i32
where
    I: IntoIterator<Item = OsString>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Filter(args) => in_pool(args.io.jobs, || cmd_filter(&args)),
        Command::Run(args) => in_pool(args.io.jobs, || cmd_run(&args)),
        Command::Measures(args) => in_pool(args.io.jobs, || cmd_measures(&args)),
        Command::Cod(args) => in_pool(args.io.jobs, || cmd_cod(&args)),
        Command::Noise(args) => cmd_noise(&args),
    }
}

fn in_pool<T>(jobs: usize, body: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    if jobs < 1 {
        return Err(Error::InvalidArg("--jobs must be >= 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(body)
}

fn effective_seed(io: &CommonIo) -> u64 {
    let seed = io.seed.or_else(|| {
        std::env::var("PURGELAB_SEED").ok().and_then(|v| v.parse().ok())
    });
    seed.unwrap_or(0)
}

fn parse_label(label: &Option<String>) -> LabelColumn {
    match label {
        None => LabelColumn::Name("class".into()),
        Some(text) => match text.parse::<usize>() {
            Ok(idx) => LabelColumn::Index(idx),
            Err(_) => LabelColumn::Name(text.clone()),
        },
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DataFormat {
    Csv,
    Arff,
}

fn detect_format(path: &Path) -> Result<DataFormat> {
    match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
        Some(ext) if ext == "arff" => Ok(DataFormat::Arff),
        Some(ext) if ext == "csv" => Ok(DataFormat::Csv),
        _ => Err(Error::InvalidArg(format!(
            "cannot infer format of `{}`: expected .csv or .arff",
            path.display()
        ))),
    }
}

fn load_dataset(path: &Path, label: &Option<String>) -> Result<(Dataset, DataFormat)> {
    let format = detect_format(path)?;
    let ds = match format {
        DataFormat::Arff => load_arff(path)?,
        DataFormat::Csv => {
            let requested = parse_label(label);
            match load_csv(path, &requested, None) {
                Ok(ds) => ds,
                // Without an explicit label flag, fall back to the last column.
                Err(Error::Parse { ref message, .. })
                    if label.is_none() && message.contains("unknown label column") =>
                {
                    let header_len = csv::ReaderBuilder::new()
                        .from_path(path)
                        .map_err(|e| Error::Parse {
                            path: path.display().to_string(),
                            message: e.to_string(),
                        })?
                        .headers()
                        .map_err(|e| Error::Parse {
                            path: path.display().to_string(),
                            message: e.to_string(),
                        })?
                        .len();
                    load_csv(path, &LabelColumn::Index(header_len - 1), None)?
                }
                Err(e) => return Err(e),
            }
        }
    };
    Ok((ds, format))
}

fn save_dataset(ds: &Dataset, path: &Path, format: DataFormat) -> Result<()> {
    match format {
        DataFormat::Arff => save_arff(ds, path),
        DataFormat::Csv => save_csv(ds, path),
    }
}

fn parse_learner_list(text: &str, seed: u64) -> Result<Vec<LearnerSpec>> {
    if text.trim() == "all" {
        return Ok(builtin_specs(seed));
    }
    text.split(',')
        .map(|part| {
            let spec = LearnerSpec::parse(part.trim())?;
            Ok(if spec.seed() == 0 { spec.with_seed(seed) } else { spec })
        })
        .collect()
}

fn parse_flag_mode(text: &str, seed: u64) -> Result<FlagMode> {
    if text == "all" {
        return Ok(FlagMode::TrainOnAll);
    }
    if let Some(folds) = text.strip_prefix("cv:") {
        let folds: usize = folds
            .parse()
            .map_err(|_| Error::InvalidArg(format!("bad flag mode `{text}`")))?;
        return FlagMode::cross_validated(folds, seed);
    }
    Err(Error::InvalidArg(format!("flag mode must be `all` or `cv:N`, got `{text}`")))
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io { path: dir.display().to_string(), source: e })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_else(|| "dataset".into())
}

fn cmd_filter(args: &FilterArgs) -> Result<()> {
    if !(args.threshold > 0.0 && args.threshold <= 1.0) {
        return Err(Error::InvalidArg(format!(
            "threshold must be in (0,1], got {}",
            args.threshold
        )));
    }
    let seed = effective_seed(&args.io);
    println!("master seed: {seed}");
    let (ds, format) = load_dataset(&args.data, &args.label)?;

    let default_flag_mode = if args.mode == "adaptive" { "cv:3" } else { "all" };
    let mode = parse_flag_mode(
        args.flag_mode.as_deref().unwrap_or(default_flag_mode),
        crate::rng::mix_seed(&[seed, 1]),
    )?;

    let (outcome, flagged) = match args.mode.as_str() {
        "biased" => {
            let spec = LearnerSpec::parse(&args.learner)?;
            let spec = if spec.seed() == 0 { spec.with_seed(seed) } else { spec };
            let matrix = flag_misclassified(std::slice::from_ref(&spec), &ds, &mode)?;
            let outcome = biased_filter(&spec, &ds, &mode)?;
            (outcome, matrix)
        }
        "ensemble" => {
            let specs = parse_learner_list(&args.learners, seed)?;
            let matrix = flag_misclassified(&specs, &ds, &mode)?;
            let outcome = ensemble_filter(&matrix, args.threshold)?;
            (outcome, matrix)
        }
        "adaptive" => {
            let target = LearnerSpec::parse(&args.learner)?;
            let candidates = parse_learner_list(&args.learners, seed)?;
            let trace = adaptive_filter(
                &candidates,
                &target,
                &ds,
                args.threshold,
                &mode,
                args.validation_fraction,
                crate::rng::mix_seed(&[seed, 2]),
            )?;
            println!(
                "adaptive search: {} accepted, validation accuracies {:?}",
                trace.filter_set.len(),
                trace.accuracies
            );
            let outcome = apply_filter_set(&trace.filter_set, &ds, args.threshold, &mode)?;
            let matrix = if trace.filter_set.is_empty() {
                flag_misclassified(std::slice::from_ref(&target), &ds, &mode)?
            } else {
                flag_misclassified(&trace.filter_set, &ds, &mode)?
            };
            (outcome, matrix)
        }
        other => {
            return Err(Error::InvalidArg(format!(
                "mode must be biased, ensemble, or adaptive, got `{other}`"
            )))
        }
    };

    ensure_out_dir(&args.io.out)?;
    let base = stem(&args.data);
    let ext = if format == DataFormat::Arff { "arff" } else { "csv" };
    let kept_path = args.io.out.join(format!("{base}.filtered.{ext}"));
    save_dataset(&ds.subset(&outcome.kept), &kept_path, format)?;

    let mut report = String::from("index");
    for id in flagged.learner_ids() {
        report.push(',');
        report.push_str(id);
    }
    report.push('\n');
    for &i in &outcome.removed {
        report.push_str(&i.to_string());
        for l in 0..flagged.learner_count() {
            report.push(',');
            report.push(if flagged.flag(l, i) { '1' } else { '0' });
        }
        report.push('\n');
    }
    let report_path = args.io.out.join(format!("{base}.removed.csv"));
    write_text(&report_path, &report)?;

    println!(
        "kept {} of {} instances ({} removed) -> {}",
        outcome.kept.len(),
        ds.len(),
        outcome.removed.len(),
        kept_path.display()
    );
    println!("removal report -> {}", report_path.display());
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    schema: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    repeats: Option<usize>,
    #[serde(default)]
    folds: Option<usize>,
    datasets: Vec<DatasetEntry>,
    learners: Vec<String>,
    #[serde(default)]
    filter_learners: Option<Vec<String>>,
    conditions: Vec<String>,
    #[serde(default)]
    flag_mode: Option<String>,
    #[serde(default)]
    adaptive: Option<AdaptiveEntry>,
    #[serde(default)]
    report_pairs: Option<Vec<(String, String)>>,
}

#[derive(Deserialize)]
struct DatasetEntry {
    path: PathBuf,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Deserialize)]
struct AdaptiveEntry {
    #[serde(default)]
    threshold: Option<f64>,
    #[serde(default)]
    validation_fraction: Option<f64>,
    #[serde(default)]
    flag_folds: Option<usize>,
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io { path: args.config.display().to_string(), source: e })?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidArg(format!("{}: {e}", args.config.display()))
    })?;
    if let Some(schema) = &config.schema {
        if schema != "purgelab-run-config/1" {
            return Err(Error::InvalidArg(format!("unsupported config schema `{schema}`")));
        }
    }

    let seed = args.io.seed.or(config.seed).unwrap_or_else(|| effective_seed(&args.io));
    println!("master seed: {seed}");

    let mut datasets = Vec::new();
    for entry in &config.datasets {
        let (ds, _) = load_dataset(&entry.path, &entry.label)?;
        datasets.push(ds);
    }
    let parse_specs = |texts: &[String]| -> Result<Vec<LearnerSpec>> {
        let mut out = Vec::new();
        for text in texts {
            if text == "all" {
                out.extend(builtin_specs(seed));
            } else {
                let spec = LearnerSpec::parse(text)?;
                out.push(if spec.seed() == 0 { spec.with_seed(seed) } else { spec });
            }
        }
        Ok(out)
    };
    let learners = parse_specs(&config.learners)?;
    let filter_learners = match &config.filter_learners {
        Some(texts) => parse_specs(texts)?,
        None => learners.clone(),
    };
    let conditions: Result<Vec<Condition>> =
        config.conditions.iter().map(|c| Condition::parse(c)).collect();
    let conditions = conditions?;

    let flag_mode = match config.flag_mode.as_deref() {
        None | Some("all") => FlagModeCfg::TrainOnAll,
        Some(text) => {
            let folds = text
                .strip_prefix("cv:")
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Error::InvalidArg(format!("bad flag_mode `{text}`")))?;
            FlagModeCfg::CrossValidated { folds }
        }
    };
    let mut adaptive = AdaptiveConfig::default();
    if let Some(entry) = &config.adaptive {
        if let Some(t) = entry.threshold {
            adaptive.threshold = t;
        }
        if let Some(f) = entry.validation_fraction {
            adaptive.validation_fraction = f;
        }
        if let Some(v) = entry.flag_folds {
            adaptive.flag_folds = v;
        }
    }

    let mut plan = ExperimentPlan::new(datasets, learners, conditions, seed)?;
    plan.filter_learners = filter_learners;
    plan.repeats = args.repeats.or(config.repeats).unwrap_or(5);
    plan.folds = args.folds.or(config.folds).unwrap_or(10);
    plan.flag_mode = flag_mode;
    plan.adaptive = adaptive;
    plan.validate()?;

    let result = run_experiment(&plan)?;

    let pairs: Vec<(String, String)> = match &config.report_pairs {
        Some(pairs) => pairs.clone(),
        None => {
            let first = plan.conditions[0].id();
            plan.conditions[1..]
                .iter()
                .map(|c| (first.clone(), c.id()))
                .collect()
        }
    };
    let mut tables: Vec<SummaryTable> = Vec::new();
    for (baseline, comparison) in &pairs {
        let table = summarize(&result, baseline, comparison)?;
        print!("{}", table.to_text());
        tables.push(table);
    }
    let failed = result.cells.iter().filter(|c| c.error.is_some()).count();
    if failed > 0 {
        println!("{failed} cells failed; see summary.json");
    }
    if !result.warnings.is_empty() {
        println!("{} degenerate-filter fallbacks; see summary.json", result.warnings.len());
    }

    ensure_out_dir(&args.io.out)?;
    let csv_path = args.io.out.join("results.csv");
    write_text(&csv_path, &result.to_csv_string())?;
    let json_path = args.io.out.join("summary.json");
    write_text(&json_path, &summary_json(&result, &tables))?;
    println!("results -> {}", csv_path.display());
    println!("summary -> {}", json_path.display());
    Ok(())
}

fn cmd_measures(args: &MeasuresArgs) -> Result<()> {
    let seed = effective_seed(&args.io);
    println!("master seed: {seed}");
    let (ds, _) = load_dataset(&args.data, &args.label)?;
    let specs = parse_learner_list(&args.learners, seed)?;
    let protocol = CvProtocol::new(args.folds, args.repeats, seed)?;

    let ih = instance_hardness(&ds, &specs, &protocol)?;
    let profile = hardness_measures(&ds, args.k, seed)?;
    let complexity = complexity_measures(&ds)?;
    let (noisy, noisy_pct) = noisy_instances(&ih, args.cutoff)?;

    ensure_out_dir(&args.io.out)?;
    let base = stem(&args.data);

    let mut per_instance = String::from("index,IH,kDN,DS,DCP,TD,CL,CLD,MV,CB\n");
    for i in 0..ds.len() {
        per_instance.push_str(&format!(
            "{i},{},{},{},{},{},{},{},{},{}\n",
            ih[i],
            profile.kdn[i],
            profile.ds[i],
            profile.dcp[i],
            profile.td[i],
            profile.cl[i],
            profile.cld[i],
            profile.mv[i],
            profile.cb[i],
        ));
    }
    let instance_path = args.io.out.join(format!("{base}.instances.csv"));
    write_text(&instance_path, &per_instance)?;

    let per_dataset = format!(
        "F2,F3,F4,N1,N2,N3,T1,T2,noisy_pct\n{},{},{},{},{},{},{},{},{}\n",
        complexity.f2,
        complexity.f3,
        complexity.f4,
        complexity.n1,
        complexity.n2,
        complexity.n3,
        complexity.t1,
        complexity.t2,
        noisy_pct,
    );
    let dataset_path = args.io.out.join(format!("{base}.dataset.csv"));
    write_text(&dataset_path, &per_dataset)?;

    println!(
        "{} instances, {} noisy at cutoff {} ({:.2}%)",
        ds.len(),
        noisy.len(),
        args.cutoff,
        noisy_pct
    );
    println!("per-instance measures -> {}", instance_path.display());
    println!("per-dataset measures  -> {}", dataset_path.display());
    Ok(())
}

fn cmd_cod(args: &CodArgs) -> Result<()> {
    if args.data.is_empty() {
        return Err(Error::InvalidArg("cod needs at least one dataset".into()));
    }
    let seed = effective_seed(&args.io);
    println!("master seed: {seed}");
    let mut datasets = Vec::new();
    for path in &args.data {
        let (ds, _) = load_dataset(path, &args.label)?;
        datasets.push(ds);
    }
    let specs = parse_learner_list(&args.learners, seed)?;
    let protocol = CvProtocol::new(args.folds, args.repeats, seed)?;

    let matrix = cod_matrix(&specs, &datasets, &protocol)?;
    let dendrogram = agglomerate(&matrix, Linkage::Average)?;
    let partition = dendrogram.cut(args.cut);
    let reps = representatives(&partition, &matrix)?;

    println!("dendrogram:\n{}", dendrogram.to_text());
    println!("clusters at cut {}:", args.cut);
    for (cluster, rep) in partition.iter().zip(&reps) {
        let members: Vec<&str> =
            cluster.iter().map(|&i| matrix.learner_ids[i].as_str()).collect();
        println!("  [{}] representative: {rep}", members.join(", "));
    }

    ensure_out_dir(&args.io.out)?;
    let text_path = args.io.out.join("dendrogram.txt");
    write_text(&text_path, &dendrogram.to_text())?;
    let merge_path = args.io.out.join("merges.csv");
    write_text(&merge_path, &dendrogram.to_merge_csv())?;
    println!("dendrogram -> {}", text_path.display());
    println!("merge list -> {}", merge_path.display());
    Ok(())
}

fn cmd_noise(args: &NoiseArgs) -> Result<()> {
    let seed = effective_seed(&args.io);
    println!("master seed: {seed}");
    let (ds, format) = load_dataset(&args.data, &args.label)?;
    let (noisy, corrupted) = inject_label_noise(&ds, args.rate, seed)?;

    ensure_out_dir(&args.io.out)?;
    let base = stem(&args.data);
    let ext = if format == DataFormat::Arff { "arff" } else { "csv" };
    let noisy_path = args.io.out.join(format!("{base}.noisy.{ext}"));
    save_dataset(&noisy, &noisy_path, format)?;

    let mut report = String::from("index\n");
    for i in &corrupted {
        report.push_str(&format!("{i}\n"));
    }
    let report_path = args.io.out.join(format!("{base}.corrupted.csv"));
    write_text(&report_path, &report)?;

    println!("corrupted {} of {} labels -> {}", corrupted.len(), ds.len(), noisy_path.display());
    println!("corrupted indices -> {}", report_path.display());
    Ok(())
}

/// Build a minimal config map for tests and examples.
pub fn config_template(
    dataset_paths: &[&Path],
    learners: &[&str],
    conditions: &[&str],
    seed: u64,
) -> serde_json::Value {
    let datasets: Vec<serde_json::Value> = dataset_paths
        .iter()
        .map(|p| serde_json::json!({ "path": p.display().to_string() }))
        .collect();
    serde_json::json!({
        "schema": "purgelab-run-config/1",
        "seed": seed,
        "datasets": datasets,
        "learners": learners,
        "conditions": conditions,
    })
}

/// The learner ids the CLI expands `all` into.
pub fn builtin_learner_ids() -> &'static [&'static str] {
    &BUILTIN_IDS
}
