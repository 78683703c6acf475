//! Experiment configuration: a single JSON document validated field by
//! field, reporting every violation at once.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::bandit::{recommended_exploration_n, Arm, BanditEnv};
use crate::bo::{first_grid_overflow, DEFAULT_GRID_CAP};
use crate::error::{Error, Result};
use crate::gp::{KernelSpec, Point};
use crate::planning::{TreeFixture, TreeMdp, MAX_LEAVES};

/// Environment variable overriding [`DEFAULT_GRID_CAP`].
pub const GRID_CAP_ENV: &str = "SDM_GRID_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    ConcVerify,
    BanditEte,
    BanditUcb,
    BoUcbDiscrete,
    BoTsDiscrete,
    BoUcbContinuous,
    PlanAstar,
    PlanMcts,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::ConcVerify,
        ExperimentKind::BanditEte,
        ExperimentKind::BanditUcb,
        ExperimentKind::BoUcbDiscrete,
        ExperimentKind::BoTsDiscrete,
        ExperimentKind::BoUcbContinuous,
        ExperimentKind::PlanAstar,
        ExperimentKind::PlanMcts,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::ConcVerify => "conc.verify",
            ExperimentKind::BanditEte => "bandit.ete",
            ExperimentKind::BanditUcb => "bandit.ucb",
            ExperimentKind::BoUcbDiscrete => "bo.ucb-discrete",
            ExperimentKind::BoTsDiscrete => "bo.ts-discrete",
            ExperimentKind::BoUcbContinuous => "bo.ucb-continuous",
            ExperimentKind::PlanAstar => "plan.astar",
            ExperimentKind::PlanMcts => "plan.mcts",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn csv_header(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::ConcVerify => &[
                "scenario",
                "inequality",
                "threshold",
                "empirical",
                "bound",
                "slack",
                "holds",
            ],
            ExperimentKind::BanditEte | ExperimentKind::BanditUcb => {
                &["step", "action", "reward", "inst_regret", "cum_regret"]
            }
            ExperimentKind::BoUcbDiscrete
            | ExperimentKind::BoTsDiscrete
            | ExperimentKind::BoUcbContinuous => &[
                "step",
                "x",
                "y_obs",
                "inst_regret",
                "cum_regret",
                "beta_t",
                "post_mean",
                "post_sigma",
                "covered",
            ],
            ExperimentKind::PlanAstar | ExperimentKind::PlanMcts => {
                &["iter", "best_reward_so_far", "expansions"]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcParams {
    /// Draws per scenario.
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditParams {
    pub env: BanditEnv,
    pub horizon: usize,
    /// Pulls per arm in the exploration phase (explore-then-exploit only).
    pub exploration: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Candidates {
    Explicit(Vec<Point>),
    /// `count` points drawn uniformly from `[0, 1]^dim` per seed.
    Random {
        count: usize,
        dim: usize,
    },
}

impl Candidates {
    pub fn len(&self) -> usize {
        match self {
            Candidates::Explicit(p) => p.len(),
            Candidates::Random { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoParams {
    pub kernel: KernelSpec,
    pub noise: f64,
    pub horizon: usize,
    /// Confidence level for GP-UCB; unused by Thompson sampling.
    pub delta: Option<f64>,
    pub candidates: Candidates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousParams {
    pub kernel: KernelSpec,
    pub noise: f64,
    pub horizon: usize,
    pub delta: f64,
    pub lipschitz: f64,
    pub edge: f64,
    pub dim: usize,
    /// Points per dimension of the lattice the objective is sampled on.
    pub lattice: usize,
    pub grid_cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeSource {
    /// Rewards drawn from U[0, 1) per seed.
    Random { branching: usize, horizon: usize },
    /// The same tree for every seed, loaded from a fixture file.
    Fixture { path: PathBuf, tree: TreeMdp },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanParams {
    pub tree: TreeSource,
    /// Expansions for A*, iterations for MCTS; `None` means unlimited.
    pub budget: Option<u64>,
    /// UCT exploration constant (MCTS only).
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Conc(ConcParams),
    Bandit(BanditParams),
    Bo(BoParams),
    BoContinuous(ContinuousParams),
    Plan(PlanParams),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutputOptions {
    /// Allow writing into a directory that already holds a summary.
    pub overwrite: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seeds: Vec<u64>,
    pub params: Params,
    pub output: OutputOptions,
    /// Normalized document as written next to the results.
    pub document: Value,
}

/// Collects violations while reading one JSON object.
struct Fields<'a, 'e> {
    path: &'a str,
    obj: &'a Map<String, Value>,
    seen: BTreeSet<&'a str>,
    errors: &'e mut Vec<String>,
}

impl<'a, 'e> Fields<'a, 'e> {
    fn new(path: &'a str, obj: &'a Map<String, Value>, errors: &'e mut Vec<String>) -> Self {
        Self {
            path,
            obj,
            seen: BTreeSet::new(),
            errors,
        }
    }

    fn err(&mut self, key: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("{}{key}: {msg}", self.path));
    }

    fn get(&mut self, key: &'a str) -> Option<&'a Value> {
        self.seen.insert(key);
        self.obj.get(key)
    }

    fn required(&mut self, key: &'a str) -> Option<&'a Value> {
        let v = self.get(key);
        if v.is_none() {
            self.err(key, "missing required field");
        }
        v
    }

    fn number(&mut self, key: &'a str, v: Option<&'a Value>) -> Option<f64> {
        match v? {
            Value::Number(n) => n.as_f64(),
            other => {
                self.err(key, format!("expected a number, got {other}"));
                None
            }
        }
    }

    fn natural(&mut self, key: &'a str, v: Option<&'a Value>) -> Option<u64> {
        let v = v?;
        match v.as_u64() {
            Some(n) => Some(n),
            None => {
                self.err(key, format!("expected a nonnegative integer, got {v}"));
                None
            }
        }
    }

    fn req_f64(&mut self, key: &'a str) -> Option<f64> {
        let v = self.required(key);
        self.number(key, v)
    }

    fn opt_f64(&mut self, key: &'a str) -> Option<f64> {
        let v = self.get(key);
        self.number(key, v)
    }

    fn req_count(&mut self, key: &'a str, min: u64) -> Option<usize> {
        let v = self.required(key);
        self.count(key, v, min)
    }

    fn opt_count(&mut self, key: &'a str, min: u64) -> Option<usize> {
        let v = self.get(key);
        self.count(key, v, min)
    }

    fn count(&mut self, key: &'a str, v: Option<&'a Value>, min: u64) -> Option<usize> {
        let n = self.natural(key, v)?;
        if n < min {
            self.err(key, format!("must be at least {min}, got {n}"));
            return None;
        }
        usize::try_from(n).ok()
    }

    fn positive(&mut self, key: &'a str, x: Option<f64>) -> Option<f64> {
        let x = x?;
        if x > 0.0 && x.is_finite() {
            Some(x)
        } else {
            self.err(key, format!("must be a positive finite number, got {x}"));
            None
        }
    }

    fn unit_open(&mut self, key: &'a str, x: Option<f64>) -> Option<f64> {
        let x = x?;
        if x > 0.0 && x < 1.0 {
            Some(x)
        } else {
            self.err(key, format!("must lie in (0, 1), got {x}"));
            None
        }
    }

    fn finish(self) {
        let unknown: Vec<String> = self
            .obj
            .keys()
            .filter(|k| !self.seen.contains(k.as_str()))
            .map(|k| format!("{}{k}: unknown field", self.path))
            .collect();
        self.errors.extend(unknown);
    }
}

fn grid_cap_from_env(errors: &mut Vec<String>) -> usize {
    match std::env::var(GRID_CAP_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                errors.push(format!(
                    "{GRID_CAP_ENV}: expected a positive integer, got {s:?}"
                ));
                DEFAULT_GRID_CAP
            }
        },
        Err(_) => DEFAULT_GRID_CAP,
    }
}

/// Checks a raw configuration document. Relative fixture paths are
/// resolved against `base_dir`.
pub fn validate_config(raw: &Value, base_dir: &Path) -> Result<ExperimentConfig> {
    let mut errors = Vec::new();
    let Some(root) = raw.as_object() else {
        return Err(Error::Validation(vec![
            "configuration must be a JSON object".into(),
        ]));
    };
    let mut document = raw.clone();
    let mut top = Fields::new("", root, &mut errors);

    let kind = match top.required("kind") {
        Some(Value::String(s)) => match ExperimentKind::parse(s) {
            Some(k) => Some(k),
            None => {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.as_str()).collect();
                top.err(
                    "kind",
                    format!("unknown kind {s:?}; expected one of {}", names.join(", ")),
                );
                None
            }
        },
        Some(other) => {
            top.err("kind", format!("expected a string, got {other}"));
            None
        }
        None => None,
    };

    let seeds = match top.required("seeds") {
        Some(Value::Array(items)) => {
            let mut seeds = Vec::with_capacity(items.len());
            for (i, v) in items.iter().enumerate() {
                match v.as_u64() {
                    Some(s) => seeds.push(s),
                    None => top.err(
                        "seeds",
                        format!("entry {i} is not a 64-bit unsigned integer: {v}"),
                    ),
                }
            }
            if items.is_empty() {
                top.err("seeds", "must list at least one seed");
            }
            let distinct: BTreeSet<u64> = seeds.iter().copied().collect();
            if distinct.len() != seeds.len() {
                top.err("seeds", "seeds must be distinct");
            }
            seeds
        }
        Some(other) => {
            top.err("seeds", format!("expected an array, got {other}"));
            Vec::new()
        }
        None => Vec::new(),
    };

    let output = match top.get("output") {
        None => OutputOptions::default(),
        Some(Value::Object(obj)) => {
            let mut f = Fields::new("output.", obj, &mut *top.errors);
            let overwrite = match f.get("overwrite") {
                None => false,
                Some(Value::Bool(b)) => *b,
                Some(other) => {
                    f.err("overwrite", format!("expected a boolean, got {other}"));
                    false
                }
            };
            f.finish();
            OutputOptions { overwrite }
        }
        Some(other) => {
            top.err("output", format!("expected an object, got {other}"));
            OutputOptions::default()
        }
    };

    let params_value = top.required("params");
    let params_obj = match params_value {
        Some(Value::Object(obj)) => Some(obj),
        Some(other) => {
            top.err("params", format!("expected an object, got {other}"));
            None
        }
        None => None,
    };
    top.finish();

    let params = match (kind, params_obj) {
        (Some(kind), Some(obj)) => {
            let mut f = Fields::new("params.", obj, &mut errors);
            let p = parse_params(kind, &mut f, base_dir);
            f.finish();
            p
        }
        _ => None,
    };

    if let Some(Params::Plan(PlanParams {
        tree: TreeSource::Fixture { path, .. },
        ..
    })) = &params
    {
        document["params"]["tree_fixture"] = Value::String(path.display().to_string());
    }

    match (kind, params) {
        (Some(kind), Some(params)) if errors.is_empty() => Ok(ExperimentConfig {
            kind,
            seeds,
            params,
            output,
            document,
        }),
        _ => {
            if errors.is_empty() {
                errors.push("configuration is incomplete".into());
            }
            Err(Error::Validation(errors))
        }
    }
}

fn parse_params(kind: ExperimentKind, f: &mut Fields<'_, '_>, base_dir: &Path) -> Option<Params> {
    match kind {
        ExperimentKind::ConcVerify => {
            let samples = f.opt_count("samples", 1).unwrap_or(100_000) as u64;
            Some(Params::Conc(ConcParams { samples }))
        }
        ExperimentKind::BanditEte | ExperimentKind::BanditUcb => {
            parse_bandit(kind, f).map(Params::Bandit)
        }
        ExperimentKind::BoUcbDiscrete | ExperimentKind::BoTsDiscrete => {
            parse_bo(kind, f).map(Params::Bo)
        }
        ExperimentKind::BoUcbContinuous => parse_continuous(f).map(Params::BoContinuous),
        ExperimentKind::PlanAstar | ExperimentKind::PlanMcts => {
            parse_plan(kind, f, base_dir).map(Params::Plan)
        }
    }
}

fn parse_bandit(kind: ExperimentKind, f: &mut Fields<'_, '_>) -> Option<BanditParams> {
    let means = f.get("means");
    let arms = f.get("arms");
    let env = match (means, arms) {
        (Some(_), Some(_)) => {
            f.err("means", "give either means or arms, not both");
            None
        }
        (None, None) => {
            f.err("means", "missing required field (or give arms)");
            None
        }
        (Some(v), None) => match serde_json::from_value::<Vec<f64>>(v.clone()) {
            Ok(m) => match BanditEnv::bernoulli(&m) {
                Ok(env) => Some(env),
                Err(e) => {
                    f.err("means", e);
                    None
                }
            },
            Err(e) => {
                f.err("means", format!("expected an array of numbers: {e}"));
                None
            }
        },
        (None, Some(v)) => match serde_json::from_value::<Vec<Arm>>(v.clone()) {
            Ok(a) => match BanditEnv::new(a) {
                Ok(env) => Some(env),
                Err(e) => {
                    f.err("arms", e);
                    None
                }
            },
            Err(e) => {
                f.err("arms", format!("malformed arm list: {e}"));
                None
            }
        },
    };
    let horizon = f.req_count("horizon", 1);
    let exploration = if kind == ExperimentKind::BanditEte {
        f.opt_count("exploration", 1)
    } else {
        None
    };
    let (env, horizon) = (env?, horizon?);
    let k = env.num_arms();
    let exploration = if kind == ExperimentKind::BanditEte {
        let n = match exploration {
            Some(n) => n,
            None => match recommended_exploration_n(horizon as u64, k as u64) {
                Ok(n) => n as usize,
                Err(e) => {
                    f.err("horizon", e);
                    return None;
                }
            },
        };
        if n.saturating_mul(k) > horizon {
            f.err(
                "exploration",
                format!(
                    "explore-then-exploit requires N·K ≤ T, but N={n}, K={k} gives N·K={} > T={horizon}",
                    n * k
                ),
            );
            return None;
        }
        Some(n)
    } else {
        None
    };
    Some(BanditParams {
        env,
        horizon,
        exploration,
    })
}

fn parse_kernel(f: &mut Fields<'_, '_>) -> Option<KernelSpec> {
    let v = f.required("kernel")?;
    let Some(obj) = v.as_object() else {
        f.err("kernel", format!("expected an object, got {v}"));
        return None;
    };
    let mut filled = obj.clone();
    filled.entry("variance").or_insert(Value::from(1.0));
    match serde_json::from_value::<KernelSpec>(Value::Object(filled)) {
        Ok(k) => match k.validate() {
            Ok(()) => Some(k),
            Err(e) => {
                f.err("kernel", e);
                None
            }
        },
        Err(e) => {
            f.err("kernel", e);
            None
        }
    }
}

fn parse_noise(f: &mut Fields<'_, '_>) -> Option<f64> {
    let noise = f.req_f64("noise")?;
    if noise > 0.0 && noise.is_finite() {
        Some(noise)
    } else {
        f.err(
            "noise",
            format!("noise variance must be positive, got {noise}"),
        );
        None
    }
}

fn parse_bo(kind: ExperimentKind, f: &mut Fields<'_, '_>) -> Option<BoParams> {
    let kernel = parse_kernel(f);
    let noise = parse_noise(f);
    let horizon = f.req_count("horizon", 1);
    let delta = if kind == ExperimentKind::BoUcbDiscrete {
        let d = f.req_f64("delta");
        f.unit_open("delta", d)
    } else {
        None
    };
    let explicit = f.get("candidates");
    let count = f.opt_count("num_candidates", 1);
    let dim = f.opt_count("dim", 1);
    let candidates = match (explicit, count) {
        (Some(_), Some(_)) => {
            f.err(
                "candidates",
                "give either candidates or num_candidates, not both",
            );
            None
        }
        (None, None) => {
            f.err(
                "candidates",
                "missing required field (or give num_candidates and dim)",
            );
            None
        }
        (Some(v), None) => match serde_json::from_value::<Vec<Point>>(v.clone()) {
            Ok(points) => {
                let d = points.first().map_or(0, Vec::len);
                if points.is_empty() || d == 0 {
                    f.err("candidates", "need at least one point of dimension >= 1");
                    None
                } else if points.iter().any(|p| p.len() != d) {
                    f.err("candidates", "all points must have the same dimension");
                    None
                } else if points.iter().flatten().any(|x| !x.is_finite()) {
                    f.err("candidates", "coordinates must be finite");
                    None
                } else {
                    if dim.is_some_and(|dim| dim != d) {
                        f.err("dim", format!("does not match the candidate dimension {d}"));
                    }
                    Some(Candidates::Explicit(points))
                }
            }
            Err(e) => {
                f.err("candidates", format!("expected an array of points: {e}"));
                None
            }
        },
        (None, Some(count)) => match dim {
            Some(dim) => Some(Candidates::Random { count, dim }),
            None => {
                f.err("dim", "required with num_candidates");
                None
            }
        },
    };
    if kind == ExperimentKind::BoUcbDiscrete && delta.is_none() {
        return None;
    }
    Some(BoParams {
        kernel: kernel?,
        noise: noise?,
        horizon: horizon?,
        delta,
        candidates: candidates?,
    })
}

fn parse_continuous(f: &mut Fields<'_, '_>) -> Option<ContinuousParams> {
    let kernel = parse_kernel(f);
    let noise = parse_noise(f);
    let horizon = f.req_count("horizon", 1);
    let delta = f.req_f64("delta");
    let delta = f.unit_open("delta", delta);
    let lipschitz = f.req_f64("lipschitz");
    let lipschitz = f.positive("lipschitz", lipschitz);
    let edge = f.opt_f64("edge").or(Some(1.0));
    let edge = f.positive("edge", edge);
    let dim = f.req_count("dim", 1);
    let lattice = f.opt_count("lattice", 2).unwrap_or(65);
    let grid_cap = grid_cap_from_env(f.errors);
    let (kernel, noise, horizon, delta, lipschitz, edge, dim) =
        (kernel?, noise?, horizon?, delta?, lipschitz?, edge?, dim?);
    if let Some((t, size)) = first_grid_overflow(horizon, lipschitz, edge, dim, grid_cap) {
        f.err(
            "horizon",
            format!(
                "grid of {size} points at t={t} exceeds the grid cap {grid_cap} ({GRID_CAP_ENV})"
            ),
        );
        return None;
    }
    let lattice_size = (lattice as f64).powi(dim as i32);
    if lattice_size > 4096.0 {
        f.err(
            "lattice",
            format!(
                "objective lattice of {lattice_size} points exceeds 4096; lower lattice or dim"
            ),
        );
        return None;
    }
    Some(ContinuousParams {
        kernel,
        noise,
        horizon,
        delta,
        lipschitz,
        edge,
        dim,
        lattice,
        grid_cap,
    })
}

fn load_fixture(path: &Path) -> std::result::Result<TreeMdp, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let fixture: TreeFixture = serde_json::from_str(&text)
        .map_err(|e| format!("malformed fixture {}: {e}", path.display()))?;
    TreeMdp::from_fixture(&fixture).map_err(|e| format!("invalid fixture {}: {e}", path.display()))
}

fn parse_plan(kind: ExperimentKind, f: &mut Fields<'_, '_>, base_dir: &Path) -> Option<PlanParams> {
    let fixture = f.get("tree_fixture");
    let branching = f.opt_count("branching", 1);
    let horizon = f.opt_count("horizon", 1);
    let tree = match fixture {
        Some(Value::String(p)) => {
            if branching.is_some() || horizon.is_some() {
                f.err(
                    "tree_fixture",
                    "give either tree_fixture or branching/horizon, not both",
                );
                None
            } else {
                let path = base_dir.join(p);
                let path = std::path::absolute(&path).unwrap_or(path);
                match load_fixture(&path) {
                    Ok(tree) => Some(TreeSource::Fixture { path, tree }),
                    Err(e) => {
                        f.err("tree_fixture", e);
                        None
                    }
                }
            }
        }
        Some(other) => {
            f.err(
                "tree_fixture",
                format!("expected a path string, got {other}"),
            );
            None
        }
        None => match (branching, horizon) {
            (Some(branching), Some(horizon)) => {
                let leaves = (branching as f64).powi(horizon as i32);
                if leaves > MAX_LEAVES as f64 {
                    f.err(
                        "horizon",
                        format!("tree with {leaves} leaves exceeds the cap of {MAX_LEAVES}"),
                    );
                    None
                } else {
                    Some(TreeSource::Random { branching, horizon })
                }
            }
            (b, h) => {
                if b.is_none() {
                    f.err("branching", "missing required field (or give tree_fixture)");
                }
                if h.is_none() {
                    f.err("horizon", "missing required field (or give tree_fixture)");
                }
                None
            }
        },
    };
    let budget = if kind == ExperimentKind::PlanMcts {
        f.req_count("budget", 1).map(|b| b as u64)
    } else {
        f.opt_count("budget", 0).map(|b| b as u64)
    };
    let c = if kind == ExperimentKind::PlanMcts {
        let c = f.opt_f64("c").unwrap_or(std::f64::consts::SQRT_2);
        if c >= 0.0 && c.is_finite() {
            Some(c)
        } else {
            f.err("c", format!("must be a nonnegative finite number, got {c}"));
            None
        }
    } else {
        Some(0.0)
    };
    if kind == ExperimentKind::PlanMcts && budget.is_none() {
        return None;
    }
    Some(PlanParams {
        tree: tree?,
        budget,
        c: c?,
    })
}
