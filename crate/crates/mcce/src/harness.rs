//! Experiment runner: test-set selection, MCCE and baseline runs, report
//! aggregation and the subsample study.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use mcce_core::ctree::CTreeConfig;
use mcce_core::generator::{self, CandidateSet, ChainModel};
use mcce_core::metrics::{self, IndividualMetrics, KnnIndex, MetricsSummary, DEFAULT_NEIGHBORS};
use mcce_core::postprocess::{self, CounterfactualResult, ValidSample};
use mcce_core::predictor::Predictor;
use mcce_core::{Dataset, Instance};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::format_cell;

pub const DEFAULT_N_TEST: usize = 100;
pub const DEFAULT_BIG_K: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mcce,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mcce => "mcce",
            Method::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mcce" => Ok(Method::Mcce),
            "baseline" => Ok(Method::Baseline),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub n_test: usize,
    /// Candidate rows per individual (MCCE only).
    pub big_k: usize,
    pub k_neighbors: usize,
    pub seed: u64,
    pub ctree: CTreeConfig,
    /// Exclude the test rows from the data the generator learns from. By
    /// default the whole data set, test rows included, is used.
    pub hold_out_test: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub subsample_sizes: Vec<usize>,
    pub repetitions: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            method: Method::Mcce,
            n_test: DEFAULT_N_TEST,
            big_k: DEFAULT_BIG_K,
            k_neighbors: DEFAULT_NEIGHBORS,
            seed: 0,
            ctree: CTreeConfig::default(),
            hold_out_test: false,
            threads: None,
            subsample_sizes: Vec::new(),
            repetitions: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_test == 0 {
            return Err(Error::Config("n_test must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.big_k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if self.k_neighbors == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        self.ctree.validate()?;
        Ok(())
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// The first `n_test` rows, in data order, whose prediction is at most the
/// cutoff.
pub fn select_test_set(ds: &Dataset, pred: &Predictor, n_test: usize) -> Result<Vec<usize>> {
    let scores = pred.predict_all(ds);
    let undesirable: Vec<usize> = (0..ds.n_rows())
        .filter(|&i| !pred.is_positive(scores[i]))
        .collect();
    if undesirable.len() < n_test {
        return Err(Error::NotEnoughTestRows {
            available: undesirable.len(),
            requested: n_test,
        });
    }
    Ok(undesirable[..n_test].to_vec())
}

/// Mixes a base seed with extra keys (splitmix64 finalizer), so distinct
/// (size, repetition) cells get unrelated streams.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(seed, |acc, &k| {
        let mut z = acc ^ k.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndividualOutcome {
    /// Row of the individual in the data set.
    pub row: usize,
    pub result: CounterfactualResult,
    pub metrics: IndividualMetrics,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub method: Method,
    pub n_train: usize,
    pub individuals: Vec<IndividualOutcome>,
    pub fit_seconds: f64,
    pub total_seconds: f64,
    pub chain: Option<ChainModel>,
}

impl ExperimentOutcome {
    pub fn summary(&self) -> MetricsSummary {
        let records: Vec<IndividualMetrics> =
            self.individuals.iter().map(|o| o.metrics.clone()).collect();
        MetricsSummary::from_records(&records)
    }

    /// Seconds to explain one individual, the chain fit included.
    pub fn t_one(&self) -> f64 {
        self.fit_seconds + self.summary().time_seconds
    }

    pub fn report_row(&self) -> ReportRow {
        ReportRow::from_summaries(
            self.method,
            self.n_train,
            &[(self.summary(), self.t_one(), self.total_seconds)],
        )
    }
}

/// Shared, read-only inputs of a run.
pub struct Workspace<'a> {
    pub ds: &'a Dataset,
    pub pred: &'a Predictor,
    pub knn: &'a KnnIndex,
}

impl<'a> Workspace<'a> {
    pub fn new(ds: &'a Dataset, pred: &'a Predictor, knn: &'a KnnIndex) -> Self {
        Workspace { ds, pred, knn }
    }
}

fn candidates(
    ws: &Workspace<'_>,
    chain: Option<&ChainModel>,
    train_rows: &[usize],
    x: &Instance,
    big_k: usize,
    seed: u64,
) -> mcce_core::Result<CandidateSet> {
    match chain {
        Some(chain) => generator::generate(chain, ws.ds, ws.pred, x, big_k, seed),
        None => generator::generate_baseline_rows(ws.ds, train_rows, ws.pred, x),
    }
}

/// Runs one method on the given test rows. The generator learns from
/// `train_rows`; metrics use the whole data set. Individual `i` of
/// `test_rows` uses the seed `seed + i`.
pub fn run_on(
    ws: &Workspace<'_>,
    test_rows: &[usize],
    train_rows: &[usize],
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<ExperimentOutcome> {
    let start = Instant::now();
    let chain = match cfg.method {
        Method::Mcce => Some(generator::fit_chain_rows(
            ws.ds, train_rows, &cfg.ctree, None,
        )?),
        Method::Baseline => None,
    };
    let fit_seconds = start.elapsed().as_secs_f64();
    let individuals = cfg.install(|| {
        test_rows
            .par_iter()
            .enumerate()
            .map(|(i, &row)| {
                let x = ws.ds.row(row);
                let t0 = Instant::now();
                let found = candidates(
                    ws,
                    chain.as_ref(),
                    train_rows,
                    &x,
                    cfg.big_k,
                    seed.wrapping_add(i as u64),
                )
                .map(|cand| postprocess::select_ideal(&cand, ws.ds, ws.pred));
                let elapsed = t0.elapsed().as_secs_f64();
                let outcome = found.and_then(|mut result| {
                    result.elapsed_seconds = elapsed;
                    let mut m = metrics::evaluate(
                        ws.knn,
                        ws.ds,
                        ws.pred,
                        &x,
                        result.counterfactual.as_deref(),
                    )?;
                    m.time_seconds = elapsed;
                    Ok((result, m))
                });
                match outcome {
                    Ok((result, metrics)) => IndividualOutcome {
                        row,
                        result,
                        metrics,
                        error: None,
                    },
                    Err(source) => {
                        let err = Error::Individual { index: i, source };
                        log::warn!("{err}");
                        IndividualOutcome {
                            row,
                            result: CounterfactualResult {
                                individual: x,
                                counterfactual: None,
                                row_index: None,
                                n_valid: 0,
                                elapsed_seconds: elapsed,
                            },
                            metrics: IndividualMetrics::missing(elapsed),
                            error: Some(err.to_string()),
                        }
                    }
                }
            })
            .collect::<Vec<_>>()
    })?;
    Ok(ExperimentOutcome {
        method: cfg.method,
        n_train: train_rows.len(),
        individuals,
        fit_seconds,
        total_seconds: start.elapsed().as_secs_f64(),
        chain,
    })
}

fn training_rows(n: usize, test_rows: &[usize], hold_out: bool) -> Vec<usize> {
    if hold_out {
        let mut is_test = vec![false; n];
        for &r in test_rows {
            is_test[r] = true;
        }
        (0..n).filter(|&r| !is_test[r]).collect()
    } else {
        (0..n).collect()
    }
}

/// Selects the test set and runs the configured method on it.
pub fn run_experiment(
    ds: &Dataset,
    pred: &Predictor,
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let test_rows = select_test_set(ds, pred, cfg.n_test)?;
    let train_rows = training_rows(ds.n_rows(), &test_rows, cfg.hold_out_test);
    let knn = KnnIndex::build(ds, cfg.k_neighbors)?;
    run_on(
        &Workspace::new(ds, pred, &knn),
        &test_rows,
        &train_rows,
        cfg,
        cfg.seed,
    )
}

/// Results of the subsample study for one training-set size.
#[derive(Debug, Clone)]
pub struct SubsampleCell {
    pub size: usize,
    /// One summary per repetition.
    pub repetitions: Vec<MetricsSummary>,
    pub row: ReportRow,
}

/// For every size and repetition, draws a uniform subset (without
/// replacement) of the non-test rows, refits the generator on it and
/// explains the same test individuals. The predictor is not refitted.
pub fn run_subsample_study(
    ds: &Dataset,
    pred: &Predictor,
    cfg: &ExperimentConfig,
) -> Result<Vec<SubsampleCell>> {
    cfg.validate()?;
    if cfg.subsample_sizes.is_empty() {
        return Err(Error::Config("no subsample sizes given".into()));
    }
    let test_rows = select_test_set(ds, pred, cfg.n_test)?;
    let pool = training_rows(ds.n_rows(), &test_rows, true);
    if let Some(&too_big) = cfg
        .subsample_sizes
        .iter()
        .find(|&&s| s > pool.len() || s == 0)
    {
        return Err(Error::Config(format!(
            "subsample size {too_big} must be between 1 and the {} non-test rows",
            pool.len()
        )));
    }
    let knn = KnnIndex::build(ds, cfg.k_neighbors)?;
    let ws = Workspace::new(ds, pred, &knn);
    let mut cells = Vec::with_capacity(cfg.subsample_sizes.len());
    for &size in &cfg.subsample_sizes {
        if size < cfg.ctree.min_split {
            log::warn!(
                "subsample size {size} is below min_split {}; trees will not split",
                cfg.ctree.min_split
            );
        }
        let mut summaries = Vec::with_capacity(cfg.repetitions);
        let mut timed = Vec::with_capacity(cfg.repetitions);
        for rep in 0..cfg.repetitions {
            let seed = derive_seed(cfg.seed, &[size as u64, rep as u64]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows: Vec<usize> = index::sample(&mut rng, pool.len(), size)
                .into_iter()
                .map(|i| pool[i])
                .collect();
            rows.sort_unstable();
            let outcome = run_on(&ws, &test_rows, &rows, cfg, seed)?;
            let s = outcome.summary();
            timed.push((s, outcome.t_one(), outcome.total_seconds));
            summaries.push(s);
        }
        cells.push(SubsampleCell {
            size,
            repetitions: summaries,
            row: ReportRow::from_summaries(cfg.method, size, &timed),
        });
    }
    Ok(cells)
}

/// One line of a results table: per-method means over individuals, and
/// over repetitions when there are several.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub n_train: usize,
    pub repetitions: usize,
    pub n_test: usize,
    pub l0: Option<f64>,
    pub l1: Option<f64>,
    pub ynn: Option<f64>,
    pub feasibility: Option<f64>,
    pub redundancy: Option<f64>,
    pub violation: Option<f64>,
    pub success: f64,
    /// Seconds per individual, fit time included.
    pub t_one: Option<f64>,
    /// Seconds for the whole run.
    pub t_all: Option<f64>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl ReportRow {
    /// Averages `(summary, t_one, t_all)` triples from repeated runs.
    pub fn from_summaries(
        method: Method,
        n_train: usize,
        reps: &[(MetricsSummary, f64, f64)],
    ) -> Self {
        let col =
            |f: fn(&MetricsSummary) -> f64| mean_of(reps.iter().map(|(s, _, _)| finite(f(s))));
        ReportRow {
            method,
            n_train,
            repetitions: reps.len(),
            n_test: reps.first().map_or(0, |(s, _, _)| s.n_individuals),
            l0: col(|s| s.l0),
            l1: col(|s| s.l1),
            ynn: col(|s| s.ynn),
            feasibility: col(|s| s.feasibility),
            redundancy: col(|s| s.redundancy),
            violation: col(|s| s.violation),
            success: col(|s| s.success).unwrap_or(0.0),
            t_one: mean_of(reps.iter().map(|r| Some(r.1))),
            t_all: mean_of(reps.iter().map(|r| Some(r.2))),
        }
    }

    pub fn without_timing(&self) -> Self {
        ReportRow {
            t_one: None,
            t_all: None,
            ..self.clone()
        }
    }
}

/// Rows of a results table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

const REPORT_HEADER: [&str; 13] = [
    "method",
    "n_train",
    "repetitions",
    "n_test",
    "l0",
    "l1",
    "ynn",
    "feasibility",
    "redundancy",
    "violation",
    "success",
    "t_one_s",
    "t_all_s",
];

fn opt_text(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v}"))
}

impl ExperimentReport {
    pub fn without_timing(&self) -> Self {
        ExperimentReport {
            rows: self.rows.iter().map(ReportRow::without_timing).collect(),
        }
    }

    /// CSV with full-precision numbers; empty cells for missing values.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(REPORT_HEADER)?;
        for r in &self.rows {
            wtr.write_record([
                r.method.name().to_string(),
                r.n_train.to_string(),
                r.repetitions.to_string(),
                r.n_test.to_string(),
                opt_text(r.l0),
                opt_text(r.l1),
                opt_text(r.ynn),
                opt_text(r.feasibility),
                opt_text(r.redundancy),
                opt_text(r.violation),
                format!("{}", r.success),
                opt_text(r.t_one),
                opt_text(r.t_all),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let bad = |m: String| Error::Report(m);
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().ne(REPORT_HEADER) {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let field = |j: usize| rec.get(j).unwrap_or("");
            let err = |j: usize| {
                bad(format!(
                    "row {}, column `{}`: `{}`",
                    line + 1,
                    REPORT_HEADER[j],
                    field(j)
                ))
            };
            let num = |j: usize| field(j).parse::<f64>().map_err(|_| err(j));
            let count = |j: usize| field(j).parse::<usize>().map_err(|_| err(j));
            let opt = |j: usize| {
                if field(j).is_empty() {
                    Ok(None)
                } else {
                    num(j).map(Some)
                }
            };
            rows.push(ReportRow {
                method: field(0).parse().map_err(|_| err(0))?,
                n_train: count(1)?,
                repetitions: count(2)?,
                n_test: count(3)?,
                l0: opt(4)?,
                l1: opt(5)?,
                ynn: opt(6)?,
                feasibility: opt(7)?,
                redundancy: opt(8)?,
                violation: opt(9)?,
                success: num(10)?,
                t_one: opt(11)?,
                t_all: opt(12)?,
            });
        }
        Ok(ExperimentReport { rows })
    }

    /// Fixed-width text table with two decimals. Time columns appear when
    /// any row carries timing: seconds per individual and minutes overall.
    pub fn to_table(&self) -> String {
        let timed = self
            .rows
            .iter()
            .any(|r| r.t_one.is_some() || r.t_all.is_some());
        let mut header: Vec<&str> = vec![
            "method", "N_train", "rep", "N_test", "L0", "L1", "yNN", "feasib", "redund", "violat",
            "success",
        ];
        if timed {
            header.extend(["t(s) one", "t(m) all"]);
        }
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut c = vec![
                    r.method.name().to_string(),
                    r.n_train.to_string(),
                    r.repetitions.to_string(),
                    r.n_test.to_string(),
                    cell(r.l0),
                    cell(r.l1),
                    cell(r.ynn),
                    cell(r.feasibility),
                    cell(r.redundancy),
                    cell(r.violation),
                    cell(Some(r.success)),
                ];
                if timed {
                    c.push(cell(r.t_one));
                    c.push(cell(r.t_all.map(|s| s / 60.0)));
                }
                c
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|j| {
                body.iter()
                    .map(|r| r[j].len())
                    .chain([header[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: Vec<&str>| {
            let mut s = String::new();
            for (j, c) in cells.into_iter().enumerate() {
                if j == 0 {
                    s.push_str(&format!("{c:<w$}", w = widths[0]));
                } else {
                    s.push_str(&format!("  {c:>w$}", w = widths[j]));
                }
            }
            s.push('\n');
            s
        };
        let mut out = line(header.clone());
        for r in &body {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
        }
        out
    }
}

/// Original row followed by its counterfactual row, per individual, with
/// level labels spelled out. A missing counterfactual leaves its cells empty.
pub fn write_counterfactuals<W: Write>(
    w: W,
    ds: &Dataset,
    pred: &Predictor,
    outcome: &ExperimentOutcome,
) -> Result<()> {
    let schema = ds.schema();
    let mut wtr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    let mut header = vec![
        "individual".to_string(),
        "row".to_string(),
        "kind".to_string(),
    ];
    header.extend(schema.features().iter().map(|f| f.name.clone()));
    header.push("prediction".to_string());
    wtr.write_record(&header).map_err(csv_err)?;
    for (i, o) in outcome.individuals.iter().enumerate() {
        let x = &o.result.individual;
        let mut rec = vec![i.to_string(), o.row.to_string(), "original".to_string()];
        rec.extend((0..schema.len()).map(|j| format_cell(schema.feature(j), x[j])));
        rec.push(format!("{}", pred.predict(ds, x)?));
        wtr.write_record(&rec).map_err(csv_err)?;
        let mut rec = vec![
            i.to_string(),
            o.row.to_string(),
            "counterfactual".to_string(),
        ];
        match &o.result.counterfactual {
            Some(e) => {
                rec.extend((0..schema.len()).map(|j| format_cell(schema.feature(j), e[j])));
                rec.push(format!("{}", pred.predict(ds, e)?));
            }
            None => rec.extend(std::iter::repeat_n(String::new(), schema.len() + 1)),
        }
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Report(e.to_string()))?;
    Ok(())
}

/// One line per individual with its metrics. Times are left out so the
/// file is reproducible.
pub fn write_individuals<W: Write>(w: W, outcome: &ExperimentOutcome) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    wtr.write_record([
        "individual",
        "row",
        "n_valid",
        "candidate",
        "l0",
        "l1",
        "ynn",
        "feasibility",
        "redundancy",
        "violation",
        "success",
        "error",
    ])
    .map_err(csv_err)?;
    let int = |v: Option<usize>| v.map_or_else(String::new, |v| v.to_string());
    for (i, o) in outcome.individuals.iter().enumerate() {
        let m = &o.metrics;
        wtr.write_record([
            i.to_string(),
            o.row.to_string(),
            o.result.n_valid.to_string(),
            int(o.result.row_index),
            int(m.l0),
            opt_text(m.l1),
            opt_text(m.ynn),
            opt_text(m.feasibility),
            int(m.redundancy),
            int(m.violation),
            u8::from(m.success).to_string(),
            o.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Report(e.to_string()))?;
    Ok(())
}

/// Valid candidates of one individual: row id, sparsity, Gower distance
/// and feasibility.
pub fn write_valid_set<W: Write>(w: W, samples: &[ValidSample]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    wtr.write_record(["row_id", "sparsity", "gower", "feasibility"])
        .map_err(csv_err)?;
    for s in samples {
        wtr.write_record([
            s.row_index.to_string(),
            s.sparsity.to_string(),
            format!("{}", s.gower),
            format!("{}", s.feasibility),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Report(e.to_string()))?;
    Ok(())
}

/// Regenerates the candidate set of test individual `i` and lists its
/// valid rows.
pub fn valid_set_for(
    ws: &Workspace<'_>,
    outcome: &ExperimentOutcome,
    train_rows: &[usize],
    cfg: &ExperimentConfig,
    i: usize,
) -> Result<Vec<ValidSample>> {
    let o = outcome
        .individuals
        .get(i)
        .ok_or_else(|| Error::Config(format!("no test individual {i}")))?;
    let cand = candidates(
        ws,
        outcome.chain.as_ref(),
        train_rows,
        &o.result.individual,
        cfg.big_k,
        cfg.seed.wrapping_add(i as u64),
    )?;
    Ok(postprocess::valid_set(&cand, ws.ds, ws.pred, ws.knn)?)
}

/// Training rows used by [`run_experiment`] for the given configuration.
pub fn experiment_training_rows(
    ds: &Dataset,
    test_rows: &[usize],
    cfg: &ExperimentConfig,
) -> Vec<usize> {
    training_rows(ds.n_rows(), test_rows, cfg.hold_out_test)
}
