//! Command-line interface. `main` only parses arguments and calls [`run`].

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mcce_core::ctree::CTreeConfig;
use mcce_core::metrics::{KnnIndex, DEFAULT_NEIGHBORS};
use mcce_core::predictor::{Mlp, MlpConfig, Predictor, DEFAULT_CUTOFF};
use mcce_core::{Dataset, Schema};

use crate::harness::{
    self, ExperimentConfig, ExperimentOutcome, ExperimentReport, Method, Workspace,
};
use crate::io::{self, LABEL_COLUMN};
use crate::synth::{self, SyntheticKind};

#[derive(Debug, Parser)]
#[command(
    name = "mcce",
    version,
    about = "Monte Carlo counterfactual explanations for tabular models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train the MLP predictor and save it as JSON.
    Fit(FitArgs),
    /// Explain the first undesirable rows and write their counterfactuals.
    Explain(ExplainArgs),
    /// Run MCCE and/or the baseline and write report files.
    Bench(BenchArgs),
    /// Refit on random training subsets of several sizes.
    Subsample(SubsampleArgs),
    /// Write a synthetic data set and its schema.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// JSON schema: an array of {name, kind, levels?, fixed}.
    #[arg(long)]
    pub schema: PathBuf,
    /// Name of the 0/1 label column, needed when training a predictor.
    #[arg(long, default_value = LABEL_COLUMN)]
    pub label: String,
    /// Treat discrete features as numeric in Gower distance.
    #[arg(long)]
    pub discrete_as_numeric: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MlpArgs {
    /// Comma-separated hidden layer sizes.
    #[arg(long, value_delimiter = ',', default_value = "18,9,3")]
    pub hidden: Vec<usize>,
    #[arg(long, default_value_t = 40)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.02)]
    pub learning_rate: f64,
    /// Seed for weight initialization and shuffling.
    #[arg(long, default_value_t = 0)]
    pub model_seed: u64,
}

impl MlpArgs {
    fn config(&self) -> MlpConfig {
        MlpConfig {
            hidden_sizes: self.hidden.clone(),
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            seed: self.model_seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub mlp: MlpArgs,
    /// Where to write the model JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Saved MLP; trained from the label column when absent.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub mlp: MlpArgs,
    /// Number of test individuals.
    #[arg(long, default_value_t = harness::DEFAULT_N_TEST)]
    pub n_test: usize,
    /// Candidate rows generated per individual.
    #[arg(long, default_value_t = harness::DEFAULT_BIG_K)]
    pub big_k: usize,
    /// Neighbours for yNN and feasibility.
    #[arg(long, default_value_t = DEFAULT_NEIGHBORS)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the test rows out of the generator's training data.
    #[arg(long)]
    pub hold_out_test: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 20)]
    pub min_split: usize,
    #[arg(long, default_value_t = 7)]
    pub min_bucket: usize,
    #[arg(long, default_value_t = 10)]
    pub max_depth: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value = "mcce")]
    pub method: Method,
    /// CSV of original and counterfactual rows.
    #[arg(long)]
    pub out: PathBuf,
    /// CSV of every valid candidate of one test individual.
    #[arg(long)]
    pub valid_set_dump: Option<PathBuf>,
    /// Which test individual the valid-set dump describes.
    #[arg(long, default_value_t = 0)]
    pub valid_set_individual: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// `mcce`, `baseline`, or both when omitted.
    #[arg(long)]
    pub method: Option<Method>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub valid_set_dump: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub valid_set_individual: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SubsampleArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub method: Option<Method>,
    /// Comma-separated training-set sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// independent-gaussian, dependent-pair or mixed-types.
    #[arg(long)]
    pub kind: SyntheticKind,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output, with a `y` label column.
    #[arg(long)]
    pub out: PathBuf,
    /// Schema JSON output.
    #[arg(long)]
    pub schema: PathBuf,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fit(a) => fit(&a),
        Command::Explain(a) => explain(&a),
        Command::Bench(a) => bench(&a),
        Command::Subsample(a) => subsample(&a),
        Command::Synth(a) => synth(&a),
    }
}

fn load(data: &DataArgs, with_labels: bool) -> anyhow::Result<(Dataset, Option<Vec<bool>>)> {
    let schema: Schema = io::read_schema(&data.schema)?;
    let (ds, labels) = if with_labels {
        let (ds, y) = io::read_labeled(&data.data, &schema, &data.label)?;
        (ds, Some(y))
    } else {
        (io::read_dataset(&data.data, &schema)?, None)
    };
    log::info!("loaded {} rows from {}", ds.n_rows(), data.data.display());
    Ok((
        ds.with_discrete_as_numeric(data.discrete_as_numeric),
        labels,
    ))
}

fn fit(a: &FitArgs) -> anyhow::Result<()> {
    let (ds, labels) = load(&a.data, true)?;
    let labels = labels.expect("labels requested");
    let mlp = Mlp::fit(&ds, &labels, &a.mlp.config())?;
    let correct = ds
        .rows()
        .zip(&labels)
        .filter(|(x, &y)| {
            let p = mlp.probability(&ds.normalize(x).expect("training rows conform"));
            (p > DEFAULT_CUTOFF) == y
        })
        .count();
    println!(
        "training accuracy {:.4} ({correct}/{})",
        correct as f64 / ds.n_rows() as f64,
        ds.n_rows()
    );
    io::write_mlp(&a.out, &mlp)?;
    Ok(())
}

struct Loaded {
    ds: Dataset,
    pred: Predictor,
}

impl RunArgs {
    fn load(&self) -> anyhow::Result<Loaded> {
        let (ds, labels) = load(&self.data, self.model.is_none())?;
        let mlp = match &self.model {
            Some(path) => {
                let mlp = io::read_mlp(path)?;
                if mlp.input_size() != ds.schema().encoded_width() {
                    bail!(
                        "model expects {} inputs but the schema encodes to {}",
                        mlp.input_size(),
                        ds.schema().encoded_width()
                    );
                }
                mlp
            }
            None => Mlp::fit(&ds, &labels.expect("labels requested"), &self.mlp.config())?,
        };
        let pred = Predictor::new(mlp, self.cutoff)?;
        Ok(Loaded { ds, pred })
    }

    fn config(&self, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            method,
            n_test: self.n_test,
            big_k: self.big_k,
            k_neighbors: self.k,
            seed: self.seed,
            ctree: CTreeConfig {
                alpha: self.alpha,
                min_split: self.min_split,
                min_bucket: self.min_bucket,
                max_depth: self.max_depth,
            },
            hold_out_test: self.hold_out_test,
            threads: self.threads,
            subsample_sizes: Vec::new(),
            repetitions: 1,
        }
    }
}

fn create_file(path: &Path) -> anyhow::Result<std::io::BufWriter<fs::File>> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(std::io::BufWriter::new(f))
}

fn dump_valid_set(
    l: &Loaded,
    cfg: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    individual: usize,
    path: &Path,
) -> anyhow::Result<()> {
    let knn = KnnIndex::build(&l.ds, cfg.k_neighbors)?;
    let ws = Workspace::new(&l.ds, &l.pred, &knn);
    let test_rows: Vec<usize> = outcome.individuals.iter().map(|o| o.row).collect();
    let train = harness::experiment_training_rows(&l.ds, &test_rows, cfg);
    let samples = harness::valid_set_for(&ws, outcome, &train, cfg, individual)?;
    harness::write_valid_set(create_file(path)?, &samples)?;
    log::info!(
        "wrote {} valid samples to {}",
        samples.len(),
        path.display()
    );
    Ok(())
}

fn explain(a: &ExplainArgs) -> anyhow::Result<()> {
    let l = a.run.load()?;
    let cfg = a.run.config(a.method);
    let outcome = harness::run_experiment(&l.ds, &l.pred, &cfg)?;
    harness::write_counterfactuals(create_file(&a.out)?, &l.ds, &l.pred, &outcome)?;
    if let Some(path) = &a.valid_set_dump {
        dump_valid_set(&l, &cfg, &outcome, a.valid_set_individual, path)?;
    }
    let report = ExperimentReport {
        rows: vec![outcome.report_row()],
    };
    print!("{}", report.to_table());
    Ok(())
}

fn methods(m: Option<Method>) -> Vec<Method> {
    m.map_or_else(|| vec![Method::Mcce, Method::Baseline], |m| vec![m])
}

/// Writes `report.csv`, `report.txt`, and per method `<method>_individuals.csv`
/// and `<method>_counterfactuals.csv`; these depend only on the inputs and
/// the seed. Wall-clock times go to `timing.csv` and standard output.
fn bench(a: &BenchArgs) -> anyhow::Result<()> {
    let l = a.run.load()?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut report = ExperimentReport::default();
    for method in methods(a.method) {
        let cfg = a.run.config(method);
        let outcome = harness::run_experiment(&l.ds, &l.pred, &cfg)?;
        harness::write_individuals(
            create_file(&a.out.join(format!("{method}_individuals.csv")))?,
            &outcome,
        )?;
        harness::write_counterfactuals(
            create_file(&a.out.join(format!("{method}_counterfactuals.csv")))?,
            &l.ds,
            &l.pred,
            &outcome,
        )?;
        if let Some(path) = &a.valid_set_dump {
            if a.method.is_some() || method == Method::Mcce {
                dump_valid_set(&l, &cfg, &outcome, a.valid_set_individual, path)?;
            }
        }
        report.rows.push(outcome.report_row());
    }
    write_reports(&a.out, &report)
}

fn write_reports(out: &Path, report: &ExperimentReport) -> anyhow::Result<()> {
    let plain = report.without_timing();
    plain.write_csv(create_file(&out.join("report.csv"))?)?;
    fs::write(out.join("report.txt"), plain.to_table())?;
    report.write_csv(create_file(&out.join("timing.csv"))?)?;
    print!("{}", report.to_table());
    Ok(())
}

fn subsample(a: &SubsampleArgs) -> anyhow::Result<()> {
    let l = a.run.load()?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut report = ExperimentReport::default();
    for method in methods(a.method) {
        let mut cfg = a.run.config(method);
        cfg.subsample_sizes = a.sizes.clone();
        cfg.repetitions = a.repetitions;
        for cell in harness::run_subsample_study(&l.ds, &l.pred, &cfg)? {
            report.rows.push(cell.row);
        }
    }
    write_reports(&a.out, &report)
}

fn synth(a: &SynthArgs) -> anyhow::Result<()> {
    if a.n < 10 {
        bail!("synthetic data sets need at least 10 rows");
    }
    let (ds, labels) = synth::make_synthetic(a.kind, a.n, a.seed);
    io::write_dataset(&a.out, &ds, Some((LABEL_COLUMN, &labels)))?;
    io::write_schema(&a.schema, ds.schema())?;
    Ok(())
}
