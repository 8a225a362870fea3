//! `ctg-boost` — command-line surface of the fetal-health classifier.
//!
//! Subcommands mirror the pipeline stages so every artifact is
//! independently reproducible: `validate` | `split` | `train` |
//! `evaluate` | `cv` | `compare` | `curve` | `pipeline`.
//!
//! Exit codes: 0 success, 1 usage, 2 data/schema, 3 training. Every
//! failure prints a single-line diagnostic to stderr. Re-running a
//! command with the same inputs rewrites byte-identical artifacts;
//! wall-clock timestamps live only in `run.log` and in the explicit
//! timing column of leaderboards.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ctg_boost::baselines::{BaselineError, CartConfig, KnnConfig, ModelSpec};
use ctg_boost::dataset::{
    class_counts, load_csv, stratified_split, write_csv, Dataset, DatasetError, FeatureSchema,
    SplitConfig, CLASS_NAMES,
};
use ctg_boost::gbdt::{train_traced, BoostedModel, GbdtConfig, GbdtError};
use ctg_boost::harness::{
    compare_models, kfold_cv, validation_curve, CurveParam, CvConfig, HarnessError, SmoteScope,
    ValidationCurve,
};
use ctg_boost::metrics::{
    roc_auc_ovr, summary, ConfusionMatrix, MetricsError, MetricsReport, RocCurve,
};
use ctg_boost::model_io::{load_model, save_model, ModelIoError};
use ctg_boost::report;
use ctg_boost::resample::{smote, ResampleError, SmoteConfig};

#[derive(Parser)]
#[command(name = "ctg-boost", version, about = "Gradient-boosted fetal-health classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a CSV against the 21-predictor schema and report class counts
    Validate(ValidateArgs),
    /// Write a seeded stratified train/test split as two CSV files
    Split(SplitArgs),
    /// Train a booster on a table (oversampled unless off) and save it
    Train(TrainArgs),
    /// Score a saved model on a table and write evaluation artifacts
    Evaluate(EvaluateArgs),
    /// Cross-validate the booster and write per-fold and summary reports
    Cv(CvArgs),
    /// Cross-validate several models on shared folds; write a leaderboard
    Compare(CompareArgs),
    /// Sweep one booster hyperparameter and write the validation curve
    Curve(CurveArgs),
    /// Run the hold-out pipeline: split, oversample, train, evaluate
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Input CSV
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    /// Input CSV
    #[arg(long)]
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Seed for the per-class shuffles
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Fraction of each class held out for testing
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
}

#[derive(Args)]
struct TrainArgs {
    /// Input CSV (typically the training half of a split)
    #[arg(long)]
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Seed shared by oversampling and training
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Minority oversampling: global applies it, off skips it
    #[arg(long, value_enum, default_value_t = Scope::Global)]
    smote_scope: Scope,
    #[command(flatten)]
    booster: BoosterArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Input CSV to score
    #[arg(long)]
    data: PathBuf,
    /// Saved model file
    #[arg(long)]
    model: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Artifact formats to write (default: all)
    #[arg(long, value_delimiter = ',')]
    format: Vec<Format>,
}

#[derive(Args)]
struct CvArgs {
    /// Input CSV
    #[arg(long)]
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Seed for fold assignment, oversampling and training
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Number of stratified folds
    #[arg(long, default_value_t = 20)]
    folds: usize,
    /// Where oversampling runs: per training fold, whole table, or off
    #[arg(long, value_enum, default_value_t = Scope::Fold)]
    smote_scope: Scope,
    #[command(flatten)]
    booster: BoosterArgs,
    /// Artifact formats to write (default: all)
    #[arg(long, value_delimiter = ',')]
    format: Vec<Format>,
}

#[derive(Args)]
struct CompareArgs {
    /// Input CSV
    #[arg(long)]
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Seed for fold assignment, oversampling and training
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Number of stratified folds
    #[arg(long, default_value_t = 20)]
    folds: usize,
    /// Where oversampling runs: per training fold, whole table, or off
    #[arg(long, value_enum, default_value_t = Scope::Fold)]
    smote_scope: Scope,
    /// Models to rank (default: gbdt,cart,knn,dummy)
    #[arg(long, value_delimiter = ',')]
    models: Vec<ModelName>,
    #[command(flatten)]
    booster: BoosterArgs,
    /// Artifact formats to write (default: all)
    #[arg(long, value_delimiter = ',')]
    format: Vec<Format>,
}

#[derive(Args)]
struct CurveArgs {
    /// Input CSV
    #[arg(long)]
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Hyperparameter to sweep: n_estimators, num_leaves or learning_rate
    #[arg(long)]
    param: String,
    /// Comma-separated sweep values
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Seed for fold assignment, oversampling and training
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Number of stratified folds per sweep point
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Where oversampling runs: per training fold, whole table, or off
    #[arg(long, value_enum, default_value_t = Scope::Fold)]
    smote_scope: Scope,
    #[command(flatten)]
    booster: BoosterArgs,
    /// Artifact formats to write (default: all)
    #[arg(long, value_delimiter = ',')]
    format: Vec<Format>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Input CSV
    #[arg(long)]
    data: PathBuf,
    /// Output directory (created if absent)
    #[arg(long)]
    out: PathBuf,
    /// Seed shared by the split, oversampling and training
    #[arg(long, default_value_t = 123)]
    seed: u64,
    /// Fraction of each class held out for testing
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Minority oversampling of the training half: global or off
    #[arg(long, value_enum, default_value_t = Scope::Global)]
    smote_scope: Scope,
    #[command(flatten)]
    booster: BoosterArgs,
    /// Artifact formats to write (default: all)
    #[arg(long, value_delimiter = ',')]
    format: Vec<Format>,
}

/// Booster hyperparameter overrides; unset flags keep the defaults.
#[derive(Args)]
struct BoosterArgs {
    /// Shrinkage applied to every leaf (default 0.1)
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Maximum leaves per tree (default 31)
    #[arg(long)]
    num_leaves: Option<usize>,
    /// Boosting rounds (default 100)
    #[arg(long)]
    n_estimators: Option<usize>,
    /// Minimum rows per leaf (default 20)
    #[arg(long)]
    min_samples_leaf: Option<u32>,
}

impl BoosterArgs {
    /// Defaults overridden by whichever flags were given.
    fn config(&self, seed: u64) -> Result<GbdtConfig, AppError> {
        let mut cfg = GbdtConfig { seed, ..GbdtConfig::default() };
        if let Some(v) = self.learning_rate {
            cfg.learning_rate = v;
        }
        if let Some(v) = self.num_leaves {
            cfg.num_leaves = v;
        }
        if let Some(v) = self.n_estimators {
            cfg.n_estimators = v;
        }
        if let Some(v) = self.min_samples_leaf {
            cfg.min_samples_leaf = v;
        }
        cfg.validate().map_err(|e| AppError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

/// Oversampling placement, as spelled on the command line.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scope {
    Fold,
    Global,
    Off,
}

impl Scope {
    fn to_lib(self) -> SmoteScope {
        match self {
            Scope::Fold => SmoteScope::Fold,
            Scope::Global => SmoteScope::Global,
            Scope::Off => SmoteScope::Off,
        }
    }
}

/// Report formats selectable with `--format`.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

/// Which artifact families to write; empty `--format` means all.
#[derive(Clone, Copy)]
struct Formats {
    csv: bool,
    json: bool,
    svg: bool,
}

fn formats(list: &[Format]) -> Formats {
    if list.is_empty() {
        return Formats { csv: true, json: true, svg: true };
    }
    Formats {
        csv: list.contains(&Format::Csv),
        json: list.contains(&Format::Json),
        svg: list.contains(&Format::Svg),
    }
}

/// Model identifiers accepted by `--models`.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Gbdt,
    Cart,
    Knn,
    Dummy,
}

impl ModelName {
    fn spec(self, gbdt: &GbdtConfig) -> ModelSpec {
        match self {
            ModelName::Gbdt => ModelSpec::Gbdt(gbdt.clone()),
            ModelName::Cart => ModelSpec::Cart(CartConfig::default()),
            ModelName::Knn => ModelSpec::Knn(KnnConfig::default()),
            ModelName::Dummy => ModelSpec::Dummy,
        }
    }
}

/// A failure classified by exit code: 1 usage, 2 data/schema, 3 training.
enum AppError {
    Usage(String),
    Data(String),
    Training(String),
}

impl AppError {
    fn code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Training(_) => 3,
        }
    }

    /// The diagnostic, flattened to one line.
    fn message(&self) -> String {
        let (AppError::Usage(m) | AppError::Data(m) | AppError::Training(m)) = self;
        m.replace('\n', "; ")
    }
}

impl From<DatasetError> for AppError {
    fn from(e: DatasetError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<ResampleError> for AppError {
    fn from(e: ResampleError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<ModelIoError> for AppError {
    fn from(e: ModelIoError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Data(format!("i/o error: {e}"))
    }
}

impl From<GbdtError> for AppError {
    fn from(e: GbdtError) -> Self {
        match e {
            // A model/table width disagreement is a schema problem.
            GbdtError::FeatureMismatch { .. } => AppError::Data(e.to_string()),
            _ => AppError::Training(e.to_string()),
        }
    }
}

impl From<BaselineError> for AppError {
    fn from(e: BaselineError) -> Self {
        AppError::Training(e.to_string())
    }
}

impl From<MetricsError> for AppError {
    fn from(e: MetricsError) -> Self {
        AppError::Training(e.to_string())
    }
}

impl From<HarnessError> for AppError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::UnknownParam(_) | HarnessError::InvalidParamValue { .. } => {
                AppError::Usage(e.to_string())
            }
            HarnessError::Data(inner) => inner.into(),
            HarnessError::Resample(inner) => inner.into(),
            _ => AppError::Training(e.to_string()),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return;
            }
            let _ = err.print();
            std::process::exit(1);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.code());
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    configure_threads()?;
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Split(args) => cmd_split(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    }
}

/// Applies the `CTG_BOOST_THREADS` cap to the global worker pool.
fn configure_threads() -> Result<(), AppError> {
    let raw = match std::env::var("CTG_BOOST_THREADS") {
        Ok(raw) => raw,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(AppError::Usage(format!("CTG_BOOST_THREADS: {e}"))),
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            AppError::Usage(format!("CTG_BOOST_THREADS must be a positive integer, got '{raw}'"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::Usage(format!("cannot configure {n} worker threads: {e}")))
}

fn load(path: &Path) -> Result<Dataset, AppError> {
    Ok(load_csv(path, &FeatureSchema::canonical())?)
}

fn ensure_out(dir: &Path) -> Result<(), AppError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// `Normal=1655 Suspect=295 Pathological=176`.
fn counts_line(ds: &Dataset) -> String {
    let names = class_names(ds.n_classes());
    class_counts(ds)
        .iter()
        .zip(&names)
        .map(|(n, name)| format!("{name}={n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The canonical three class names, or positional names otherwise.
fn class_names(k: usize) -> Vec<String> {
    if k == CLASS_NAMES.len() {
        CLASS_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..k).map(|i| format!("class_{i}")).collect()
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<(), AppError> {
    let ds = load(&args.data)?;
    println!("ok: {} rows, {} features", ds.n_rows(), ds.n_features());
    println!("class counts: {}", counts_line(&ds));
    Ok(())
}

fn cmd_split(args: SplitArgs) -> Result<(), AppError> {
    let ds = load(&args.data)?;
    let pair =
        stratified_split(&ds, &SplitConfig { test_fraction: args.test_fraction, seed: args.seed })?;
    ensure_out(&args.out)?;
    let schema = FeatureSchema::canonical();
    write_csv(&pair.train, &schema, &args.out.join("train.csv"))?;
    write_csv(&pair.test, &schema, &args.out.join("test.csv"))?;
    println!("train: {} rows ({})", pair.train.n_rows(), counts_line(&pair.train));
    println!("test: {} rows ({})", pair.test.n_rows(), counts_line(&pair.test));
    Ok(())
}

/// Per-iteration training loss as CSV; iteration 0 is the prior model.
fn loss_csv(losses: &[f64]) -> String {
    let mut out = String::from("iteration,train_loss\n");
    for (i, loss) in losses.iter().enumerate() {
        out.push_str(&format!("{i},{loss}\n"));
    }
    out
}

/// Applies the training-side oversampling choice; `fold` is rejected
/// because no folds exist outside cross-validation.
fn resample_for_training(
    ds: &Dataset,
    scope: Scope,
    seed: u64,
) -> Result<Dataset, AppError> {
    match scope {
        Scope::Fold => Err(AppError::Usage(
            "--smote-scope fold applies to cross-validation; use global or off".to_string(),
        )),
        Scope::Global => Ok(smote(ds, &SmoteConfig { seed, ..SmoteConfig::default() })?),
        Scope::Off => Ok(ds.clone()),
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), AppError> {
    let ds = load(&args.data)?;
    let cfg = args.booster.config(args.seed)?;
    let fit_on = resample_for_training(&ds, args.smote_scope, args.seed)?;
    let (model, trace) = train_traced(&fit_on, &cfg, false)?;
    ensure_out(&args.out)?;
    save_model(&model, &args.out.join("model.json"))?;
    fs::write(args.out.join("loss.csv"), loss_csv(&trace.train_loss))?;
    println!(
        "trained {} trees on {} rows; final train loss {:.6}",
        cfg.n_estimators * model.n_classes(),
        fit_on.n_rows(),
        trace.train_loss.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

/// Everything the evaluation artifacts are rendered from.
struct Evaluation {
    report: MetricsReport,
    cm: ConfusionMatrix,
    curves: Vec<Option<RocCurve>>,
}

fn evaluate_model(model: &BoostedModel, ds: &Dataset) -> Result<Evaluation, AppError> {
    let proba = model.predict_proba_batch(ds)?;
    let preds = model.predict_batch(ds)?;
    let report = summary(ds.labels(), &preds, &proba, ds.n_classes())?;
    let cm = ConfusionMatrix::from_labels(ds.labels(), &preds, ds.n_classes())?;
    let curves = roc_auc_ovr(ds.labels(), &proba, ds.n_classes())?;
    Ok(Evaluation { report, cm, curves })
}

/// One-vs-rest ROC chart: one polyline per class plus the chance line.
fn roc_svg(curves: &[Option<RocCurve>], names: &[String]) -> String {
    let mut data = String::from("class,fpr,tpr\n");
    let mut series = vec![svg::Series {
        name: "chance".to_string(),
        color: "#999999".to_string(),
        points: vec![(0.0, 0.0), (1.0, 1.0)],
        bars: None,
    }];
    for (k, curve) in curves.iter().enumerate() {
        let Some(curve) = curve else { continue };
        for (f, t) in curve.fpr.iter().zip(&curve.tpr) {
            data.push_str(&format!("{},{f},{t}\n", names[k]));
        }
        series.push(svg::Series {
            name: format!("{} (AUC {:.4})", names[k], curve.auc),
            color: svg::PALETTE[k % svg::PALETTE.len()].to_string(),
            points: curve.fpr.iter().copied().zip(curve.tpr.iter().copied()).collect(),
            bars: None,
        });
    }
    let frame = svg::ChartFrame {
        title: "One-vs-rest ROC".to_string(),
        x_label: "false positive rate".to_string(),
        y_label: "true positive rate".to_string(),
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
    };
    svg::line_chart(&frame, &series, &data)
}

/// Stacked per-class prediction error chart from the confusion counts.
fn class_error_svg(cm: &ConfusionMatrix, names: &[String]) -> String {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let counts: Vec<Vec<u64>> = (0..cm.n_classes())
        .map(|t| (0..cm.n_classes()).map(|p| cm.count(t, p)).collect())
        .collect();
    let data = report::class_error_csv(cm, &refs);
    svg::stacked_bars(
        "Class prediction error",
        "actual class",
        "rows",
        &refs,
        &refs,
        &counts,
        &data,
    )
}

/// Writes the evaluation artifact set and returns the files written.
fn write_eval_artifacts(
    out: &Path,
    eval: &Evaluation,
    fmt: Formats,
) -> Result<Vec<PathBuf>, AppError> {
    let names = class_names(eval.cm.n_classes());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut written = Vec::new();
    let emit = |name: String, text: String| -> Result<PathBuf, AppError> {
        let path = out.join(name);
        fs::write(&path, text)?;
        Ok(path)
    };
    if fmt.json {
        written.push(emit("metrics.json".to_string(), report::metrics_json(&eval.report))?);
    }
    if fmt.csv {
        written.push(emit("metrics.csv".to_string(), report::metrics_csv(&eval.report))?);
        written.push(emit("confusion.csv".to_string(), report::confusion_csv(&eval.cm, &refs))?);
        written
            .push(emit("class_error.csv".to_string(), report::class_error_csv(&eval.cm, &refs))?);
        for (k, curve) in eval.curves.iter().enumerate() {
            let Some(curve) = curve else { continue };
            let file = format!("roc_{}.csv", names[k].to_lowercase());
            written.push(emit(file, report::roc_csv(curve))?);
        }
    }
    if fmt.svg {
        written.push(emit("roc.svg".to_string(), roc_svg(&eval.curves, &names))?);
        written.push(emit("class_error.svg".to_string(), class_error_svg(&eval.cm, &names))?);
    }
    Ok(written)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), AppError> {
    let model = load_model(&args.model)?;
    let ds = load(&args.data)?;
    let eval = evaluate_model(&model, &ds)?;
    ensure_out(&args.out)?;
    write_eval_artifacts(&args.out, &eval, formats(&args.format))?;
    print!("{}", report::metrics_csv(&eval.report));
    Ok(())
}

fn cv_config(folds: usize, seed: u64, scope: Scope) -> CvConfig {
    CvConfig {
        folds,
        seed,
        smote_scope: scope.to_lib(),
        smote: SmoteConfig { seed, ..SmoteConfig::default() },
    }
}

fn cmd_cv(args: CvArgs) -> Result<(), AppError> {
    let ds = load(&args.data)?;
    let cfg = cv_config(args.folds, args.seed, args.smote_scope);
    let spec = ModelSpec::Gbdt(args.booster.config(args.seed)?);
    let rep = kfold_cv(&ds, &spec, &cfg)?;
    ensure_out(&args.out)?;
    let fmt = formats(&args.format);
    if fmt.json {
        fs::write(args.out.join("cv.json"), report::cv_json(&rep))?;
    }
    if fmt.csv {
        fs::write(args.out.join("cv.csv"), report::leaderboard_csv(std::slice::from_ref(&rep)))?;
    }
    print!("{}", report::leaderboard_csv(std::slice::from_ref(&rep)));
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), AppError> {
    let ds = load(&args.data)?;
    let cfg = cv_config(args.folds, args.seed, args.smote_scope);
    let gbdt_cfg = args.booster.config(args.seed)?;
    let names = if args.models.is_empty() {
        vec![ModelName::Gbdt, ModelName::Cart, ModelName::Knn, ModelName::Dummy]
    } else {
        args.models.clone()
    };
    let specs: Vec<ModelSpec> = names.iter().map(|m| m.spec(&gbdt_cfg)).collect();
    let reps = compare_models(&ds, &specs, &cfg)?;
    ensure_out(&args.out)?;
    let fmt = formats(&args.format);
    if fmt.csv {
        fs::write(args.out.join("leaderboard.csv"), report::leaderboard_csv(&reps))?;
    }
    if fmt.json {
        let mut text = serde_json::to_string_pretty(&reps).expect("reports serialize");
        text.push('\n');
        fs::write(args.out.join("compare.json"), text)?;
    }
    print!("{}", report::leaderboard_csv(&reps));
    Ok(())
}

/// Validation-curve chart: training and cross-validation accuracy with
/// one standard deviation bars.
fn curve_svg(curve: &ValidationCurve) -> String {
    let xs: Vec<f64> = curve.points.iter().map(|p| p.value).collect();
    let x_range = (
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &curve.points {
        lo = lo.min(p.train_mean - p.train_std).min(p.cv_mean - p.cv_std);
        hi = hi.max(p.train_mean + p.train_std).max(p.cv_mean + p.cv_std);
    }
    let pad = (0.05 * (hi - lo)).max(0.01);
    let frame = svg::ChartFrame {
        title: format!("Validation curve over {}", curve.param),
        x_label: curve.param.clone(),
        y_label: "accuracy".to_string(),
        x_range,
        y_range: ((lo - pad).max(0.0), (hi + pad).min(1.0)),
    };
    let series = vec![
        svg::Series {
            name: "training accuracy".to_string(),
            color: svg::PALETTE[0].to_string(),
            points: curve.points.iter().map(|p| (p.value, p.train_mean)).collect(),
            bars: Some(curve.points.iter().map(|p| p.train_std).collect()),
        },
        svg::Series {
            name: "cross-validation accuracy".to_string(),
            color: svg::PALETTE[1].to_string(),
            points: curve.points.iter().map(|p| (p.value, p.cv_mean)).collect(),
            bars: Some(curve.points.iter().map(|p| p.cv_std).collect()),
        },
    ];
    svg::line_chart(&frame, &series, &report::curve_csv(curve))
}

fn cmd_curve(args: CurveArgs) -> Result<(), AppError> {
    let ds = load(&args.data)?;
    let param = CurveParam::parse(&args.param)?;
    let base = args.booster.config(args.seed)?;
    let cfg = cv_config(args.folds, args.seed, args.smote_scope);
    let curve = validation_curve(&ds, &base, param, &args.values, &cfg)?;
    ensure_out(&args.out)?;
    let fmt = formats(&args.format);
    if fmt.csv {
        fs::write(args.out.join("curve.csv"), report::curve_csv(&curve))?;
    }
    if fmt.json {
        fs::write(args.out.join("curve.json"), report::curve_json(&curve))?;
    }
    if fmt.svg {
        fs::write(args.out.join("curve.svg"), curve_svg(&curve))?;
    }
    print!("{}", report::curve_csv(&curve));
    Ok(())
}

/// Append-only log of timestamped progress notes; the only artifact
/// that is not byte-identical across reruns.
struct RunLog {
    path: PathBuf,
}

impl RunLog {
    fn create(path: PathBuf) -> Result<Self, AppError> {
        fs::write(&path, "")?;
        Ok(RunLog { path })
    }

    /// Best effort: a log write failure never fails the run.
    fn note(&self, msg: &str) {
        use std::io::Write;
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        let line = format!("[{secs:.3}] {msg}\n");
        let _ = fs::OpenOptions::new()
            .append(true)
            .open(&self.path)
            .and_then(|mut f| f.write_all(line.as_bytes()));
    }
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), AppError> {
    ensure_out(&args.out)?;
    let log = RunLog::create(args.out.join("run.log"))?;
    let cfg = args.booster.config(args.seed)?;

    let ds = load(&args.data)?;
    log.note(&format!("loaded {} rows ({})", ds.n_rows(), counts_line(&ds)));

    let pair =
        stratified_split(&ds, &SplitConfig { test_fraction: args.test_fraction, seed: args.seed })?;
    log.note(&format!(
        "split: {} train / {} test rows (seed {}, test fraction {})",
        pair.train.n_rows(),
        pair.test.n_rows(),
        args.seed,
        args.test_fraction
    ));

    let fit_on = resample_for_training(&pair.train, args.smote_scope, args.seed)?;
    if fit_on.n_rows() != pair.train.n_rows() {
        log.note(&format!(
            "oversampled training half to {} rows ({})",
            fit_on.n_rows(),
            counts_line(&fit_on)
        ));
    } else {
        log.note("oversampling off");
    }

    let (model, trace) = train_traced(&fit_on, &cfg, false)?;
    log.note(&format!(
        "trained {} trees; final train loss {:.6}",
        cfg.n_estimators * model.n_classes(),
        trace.train_loss.last().copied().unwrap_or(f64::NAN)
    ));

    let eval = evaluate_model(&model, &pair.test)?;
    log.note(&format!(
        "evaluated {} held-out rows: accuracy {:.4}",
        pair.test.n_rows(),
        eval.report.accuracy
    ));

    let model_path = args.out.join("model.json");
    save_model(&model, &model_path)?;
    log.note(&format!("wrote {}", model_path.display()));
    for path in write_eval_artifacts(&args.out, &eval, formats(&args.format))? {
        log.note(&format!("wrote {}", path.display()));
    }

    print!("{}", report::metrics_csv(&eval.report));
    Ok(())
}
