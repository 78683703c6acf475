//! Configuration-driven experiment runner: builds one problem instance per
//! seed, runs the configured algorithm, writes a CSV per seed and a JSON
//! summary that can be recomputed from those CSVs.
//!
//! Each seed `s` owns two streams, `RngState::new(s).split(0)` for the
//! problem instance and `.split(1)` for the algorithm, so results do not
//! depend on how seeds are scheduled across workers.

mod config;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

pub use config::{
    validate_config, BanditParams, BoParams, Candidates, ConcParams, ContinuousParams,
    ExperimentConfig, ExperimentKind, OutputOptions, Params, PlanParams, TreeSource, GRID_CAP_ENV,
};
pub use scenarios::{dominance_suite, ConcOutcome, ConcScenario, Sampler};

use crate::bandit::{run_explore_then_exploit, run_ucb};
use crate::bo::{
    run_gp_ts_discrete, run_gp_ucb_continuous, run_gp_ucb_discrete, BoOptions, BoTrace,
    ContinuousObjective, ContinuousSettings, DiscreteObjective,
};
use crate::error::{Error, Result};
use crate::planning::{
    astar, exhaustive_best, level_max_heuristic, mcts, SearchBudget, SearchLogRow, TreeMdp,
};
use crate::stochastics::RngState;

pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn seed_file(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

fn problem_rng(seed: u64) -> RngState {
    RngState::new(seed).split(0)
}

fn algorithm_rng(seed: u64) -> RngState {
    RngState::new(seed).split(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub final_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub kind: String,
    pub seeds: Vec<SeedSummary>,
    pub final_regret_mean: f64,
    pub final_regret_std: f64,
    /// Fraction of steps whose confidence intervals covered the objective
    /// (BO kinds only).
    pub coverage_rate: Option<f64>,
    /// Seed mean of final regret divided by the rate of its regret bound.
    pub bound_ratio: Option<f64>,
    pub wall_time_s: f64,
}

/// The tree searched for `seed`.
pub fn plan_tree(params: &PlanParams, seed: u64) -> Result<TreeMdp> {
    match &params.tree {
        TreeSource::Fixture { tree, .. } => Ok(tree.clone()),
        TreeSource::Random { branching, horizon } => {
            TreeMdp::random_uniform(*branching, *horizon, &mut problem_rng(seed))
        }
    }
}

/// The finite BO problem for `seed`: candidates and a prior-sample objective.
pub fn discrete_objective(params: &BoParams, seed: u64) -> Result<DiscreteObjective> {
    let mut rng = problem_rng(seed);
    let candidates = match &params.candidates {
        Candidates::Explicit(points) => points.clone(),
        Candidates::Random { count, dim } => (0..*count)
            .map(|_| (0..*dim).map(|_| rng.uniform()).collect())
            .collect(),
    };
    DiscreteObjective::from_prior(&params.kernel, candidates, params.noise, &mut rng)
}

pub fn continuous_objective(params: &ContinuousParams, seed: u64) -> Result<ContinuousObjective> {
    ContinuousObjective::from_prior_lattice(
        &params.kernel,
        params.dim,
        params.edge,
        params.lattice,
        params.noise,
        &mut problem_rng(seed),
    )
}

fn num(x: f64) -> String {
    x.to_string()
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn bo_rows(trace: &BoTrace) -> Vec<Vec<String>> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let x: Vec<String> = s.x.iter().map(|v| num(*v)).collect();
            vec![
                (i + 1).to_string(),
                x.join(";"),
                num(s.y_obs),
                num(s.inst_regret),
                num(s.cum_regret),
                num(s.beta),
                num(s.post_mean),
                num(s.post_sigma),
                flag(s.covered()),
            ]
        })
        .collect()
}

fn plan_rows(log: &[SearchLogRow]) -> Vec<Vec<String>> {
    log.iter()
        .map(|r| {
            vec![
                r.iter.to_string(),
                num(r.best_reward_so_far),
                r.expansions.to_string(),
            ]
        })
        .collect()
}

/// Runs one seed and returns its CSV rows.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<Vec<Vec<String>>> {
    let mut rng = algorithm_rng(seed);
    let rows = match (&config.kind, &config.params) {
        (ExperimentKind::ConcVerify, Params::Conc(p)) => {
            let mut rows = Vec::new();
            for (i, sc) in dominance_suite()?.iter().enumerate() {
                let out = sc.run(p.samples, &mut rng.split(i as u64))?;
                rows.push(vec![
                    sc.name.clone(),
                    sc.report.inequality.to_string(),
                    num(sc.threshold()),
                    num(out.empirical),
                    num(out.bound),
                    num(out.slack),
                    flag(out.holds()),
                ]);
            }
            rows
        }
        (kind @ (ExperimentKind::BanditEte | ExperimentKind::BanditUcb), Params::Bandit(p)) => {
            let trace = if *kind == ExperimentKind::BanditEte {
                let n = p
                    .exploration
                    .expect("validated explore-then-exploit config");
                run_explore_then_exploit(&p.env, p.horizon, n, &mut rng)?
            } else {
                run_ucb(&p.env, p.horizon, &mut rng)?
            };
            (0..trace.len())
                .map(|i| {
                    vec![
                        (i + 1).to_string(),
                        trace.actions[i].to_string(),
                        num(trace.rewards[i]),
                        num(trace.inst_regret[i]),
                        num(trace.cum_regret[i]),
                    ]
                })
                .collect()
        }
        (kind @ (ExperimentKind::BoUcbDiscrete | ExperimentKind::BoTsDiscrete), Params::Bo(p)) => {
            let oracle = discrete_objective(p, seed)?;
            let trace = if *kind == ExperimentKind::BoUcbDiscrete {
                let delta = p.delta.expect("validated GP-UCB config");
                run_gp_ucb_discrete(
                    &oracle,
                    &p.kernel,
                    p.horizon,
                    delta,
                    &mut rng,
                    BoOptions::default(),
                )?
            } else {
                run_gp_ts_discrete(
                    &oracle,
                    &p.kernel,
                    p.horizon,
                    &mut rng,
                    BoOptions::default(),
                )?
            };
            bo_rows(&trace)
        }
        (ExperimentKind::BoUcbContinuous, Params::BoContinuous(p)) => {
            let oracle = continuous_objective(p, seed)?;
            let settings = ContinuousSettings {
                horizon: p.horizon,
                delta: p.delta,
                lipschitz: p.lipschitz,
                grid_cap: p.grid_cap,
            };
            let trace = run_gp_ucb_continuous(
                &oracle,
                &p.kernel,
                settings,
                &mut rng,
                BoOptions::default(),
            )?;
            bo_rows(&trace)
        }
        (ExperimentKind::PlanAstar, Params::Plan(p)) => {
            let tree = plan_tree(p, seed)?;
            let h = level_max_heuristic(&tree)?;
            let budget = p
                .budget
                .map_or(SearchBudget::unlimited(), SearchBudget::new);
            plan_rows(&astar(&tree, |s: &[usize]| h.value(s), budget)?.log)
        }
        (ExperimentKind::PlanMcts, Params::Plan(p)) => {
            let tree = plan_tree(p, seed)?;
            let budget = SearchBudget::new(p.budget.expect("validated MCTS config"));
            plan_rows(&mcts(&tree, budget, p.c, &mut rng)?.log)
        }
        (kind, _) => {
            return Err(Error::domain(format!(
                "parameters do not match kind {}",
                kind.as_str()
            )));
        }
    };
    Ok(rows)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Runs every seed, writing `seed_<s>.csv`, `config.json` and
/// `summary.json` into `out`. `parallel > 1` fans seeds out over that many
/// worker threads; the files are identical either way.
pub fn run_experiment(
    config: &ExperimentConfig,
    out: &Path,
    parallel: usize,
) -> Result<RunSummary> {
    fs::create_dir_all(out)?;
    let summary_path = out.join(SUMMARY_FILE);
    if summary_path.exists() && !config.output.overwrite {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::AlreadyExists,
            format!(
                "{} already holds results; set output.overwrite or pick another directory",
                out.display()
            ),
        )));
    }
    write_json(&out.join(CONFIG_FILE), &config.document)?;
    let header = config.kind.csv_header();
    let one = |seed: u64| -> Result<()> {
        let rows = run_seed(config, seed).map_err(|e| Error::Run {
            kind: config.kind.as_str().to_string(),
            seed,
            source: Box::new(e),
        })?;
        write_csv(&out.join(seed_file(seed)), header, &rows)
    };
    let start = Instant::now();
    if parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
        pool.install(|| config.seeds.par_iter().try_for_each(|&s| one(s)))?;
    } else {
        config.seeds.iter().try_for_each(|&s| one(s))?;
    }
    let wall = start.elapsed().as_secs_f64();
    let mut summary = compute_summary(config, out)?;
    summary.wall_time_s = wall;
    write_json(&summary_path, &summary)?;
    Ok(summary)
}

struct CsvRows {
    path: PathBuf,
    rows: Vec<(usize, csv::StringRecord)>,
}

impl CsvRows {
    fn read(path: PathBuf, header: &[&str]) -> Result<Self> {
        let schema = |line: usize, message: String| Error::Schema {
            file: path.clone(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(&path)
            .map_err(|e| schema(0, e.to_string()))?;
        let mut rows = Vec::new();
        let mut first = true;
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                schema(line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if first {
                if rec.iter().ne(header.iter().copied()) {
                    return Err(schema(
                        line,
                        format!("expected header {}", header.join(",")),
                    ));
                }
                first = false;
                continue;
            }
            if rec.len() != header.len() {
                return Err(schema(
                    line,
                    format!("expected {} fields, found {}", header.len(), rec.len()),
                ));
            }
            rows.push((line, rec));
        }
        if first {
            return Err(schema(1, "missing header".into()));
        }
        Ok(Self { path, rows })
    }

    fn schema(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Schema {
            file: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn next_line(&self) -> usize {
        self.rows.last().map_or(2, |(l, _)| l + 1)
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.rows.len() != n {
            return Err(self.schema(
                self.next_line(),
                format!("expected {n} data rows, found {}", self.rows.len()),
            ));
        }
        Ok(())
    }

    fn expect_nonempty(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(self.schema(2, "no data rows"));
        }
        Ok(())
    }

    fn f64_at(&self, row: usize, col: usize) -> Result<f64> {
        let (line, rec) = &self.rows[row];
        rec[col].parse::<f64>().map_err(|_| {
            self.schema(
                *line,
                format!("field {} is not a number: {:?}", col + 1, &rec[col]),
            )
        })
    }

    fn flag_at(&self, row: usize, col: usize) -> Result<bool> {
        let (line, rec) = &self.rows[row];
        match &rec[col] {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(self.schema(
                *line,
                format!("field {} must be 0 or 1, got {other:?}", col + 1),
            )),
        }
    }

    /// Checks that the first column counts 1, 2, 3, ...
    fn check_counter(&self) -> Result<()> {
        for (i, (line, rec)) in self.rows.iter().enumerate() {
            if rec[0].parse::<usize>().ok() != Some(i + 1) {
                return Err(self.schema(
                    *line,
                    format!("expected counter {}, found {:?}", i + 1, &rec[0]),
                ));
            }
        }
        Ok(())
    }
}

struct SeedStats {
    final_regret: f64,
    coverage: Option<f64>,
    ratio: Option<f64>,
}

fn seed_stats(config: &ExperimentConfig, seed: u64, csv: &CsvRows) -> Result<SeedStats> {
    let last = csv.rows.len().saturating_sub(1);
    let stats = match &config.params {
        Params::Conc(_) => {
            csv.expect_len(dominance_suite()?.len())?;
            let mut violations = 0.0;
            let mut ratio = f64::NEG_INFINITY;
            for i in 0..csv.rows.len() {
                if !csv.flag_at(i, 6)? {
                    violations += 1.0;
                }
                let (emp, bound) = (csv.f64_at(i, 3)?, csv.f64_at(i, 4)?);
                if bound > 0.0 {
                    ratio = ratio.max(emp / bound);
                }
            }
            SeedStats {
                final_regret: violations,
                coverage: None,
                ratio: ratio.is_finite().then_some(ratio),
            }
        }
        Params::Bandit(p) => {
            csv.expect_len(p.horizon)?;
            csv.check_counter()?;
            let r = csv.f64_at(last, 4)?;
            let (k, t) = (p.env.num_arms() as f64, p.horizon as f64);
            let rate = if config.kind == ExperimentKind::BanditUcb {
                (k * t * t.ln()).sqrt()
            } else {
                (k * t * t * t.ln()).cbrt()
            };
            SeedStats {
                final_regret: r,
                coverage: None,
                ratio: Some(r / rate),
            }
        }
        Params::Bo(BoParams { horizon, .. })
        | Params::BoContinuous(ContinuousParams { horizon, .. }) => {
            csv.expect_len(*horizon)?;
            csv.check_counter()?;
            let mut covered = 0usize;
            for i in 0..csv.rows.len() {
                covered += csv.flag_at(i, 8)? as usize;
            }
            let r = csv.f64_at(last, 4)?;
            let beta = csv.f64_at(last, 5)?;
            SeedStats {
                final_regret: r,
                coverage: Some(covered as f64 / *horizon as f64),
                ratio: Some(r / (beta * (*horizon as f64).sqrt())),
            }
        }
        Params::Plan(p) => {
            csv.expect_nonempty()?;
            csv.check_counter()?;
            if let Some(budget) = p.budget.filter(|_| config.kind == ExperimentKind::PlanMcts) {
                csv.expect_len(budget as usize)?;
            }
            let best = csv.f64_at(last, 1)?;
            let oracle = exhaustive_best(&plan_tree(p, seed)?)?.reward;
            SeedStats {
                final_regret: oracle - best,
                coverage: None,
                ratio: None,
            }
        }
    };
    Ok(stats)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for a single value.
fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Summary statistics recomputed from the per-seed CSVs in `dir`.
/// `wall_time_s` is left at zero.
pub fn compute_summary(config: &ExperimentConfig, dir: &Path) -> Result<RunSummary> {
    let header = config.kind.csv_header();
    let mut seeds = Vec::with_capacity(config.seeds.len());
    let mut coverage = Vec::new();
    let mut ratios = Vec::new();
    for &seed in &config.seeds {
        let csv = CsvRows::read(dir.join(seed_file(seed)), header)?;
        let st = seed_stats(config, seed, &csv)?;
        seeds.push(SeedSummary {
            seed,
            final_regret: st.final_regret,
        });
        coverage.extend(st.coverage);
        ratios.extend(st.ratio);
    }
    let finals: Vec<f64> = seeds.iter().map(|s| s.final_regret).collect();
    Ok(RunSummary {
        kind: config.kind.as_str().to_string(),
        final_regret_mean: mean(&finals),
        final_regret_std: sample_std(&finals),
        coverage_rate: (!coverage.is_empty()).then(|| mean(&coverage)),
        bound_ratio: (!ratios.is_empty()).then(|| mean(&ratios)),
        seeds,
        wall_time_s: 0.0,
    })
}

/// Reads a configuration file and validates it.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Validation(vec![format!("{}: not valid JSON: {e}", path.display())]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    validate_config(&raw, base)
}

/// Recomputes the summary of a finished run and checks it against the
/// stored `summary.json`, carrying over the recorded wall time.
pub fn summarize(dir: &Path) -> Result<RunSummary> {
    let config = load_config(&dir.join(CONFIG_FILE))?;
    let mut summary = compute_summary(&config, dir)?;
    let stored_path = dir.join(SUMMARY_FILE);
    let stored: Value =
        serde_json::from_str(&fs::read_to_string(&stored_path)?).map_err(|e| Error::Schema {
            file: stored_path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
    summary.wall_time_s = stored
        .get("wall_time_s")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Schema {
            file: stored_path.clone(),
            line: 1,
            message: "missing wall_time_s".into(),
        })?;
    let fresh = serde_json::to_value(&summary)?;
    if fresh != stored {
        let fields: Vec<String> = fresh
            .as_object()
            .into_iter()
            .flatten()
            .filter(|(k, v)| stored.get(k.as_str()) != Some(v))
            .map(|(k, _)| k.clone())
            .collect();
        return Err(Error::Schema {
            file: stored_path,
            line: 1,
            message: format!(
                "stored summary differs from the CSVs in: {}",
                fields.join(", ")
            ),
        });
    }
    Ok(summary)
}
