//! Bayesian optimization with a GP surrogate: GP-UCB and GP Thompson
//! sampling on a finite candidate set, and GP-UCB on `[0, m]^d` through a
//! regular grid that is refined every step.
//!
//! Regret is always measured with the true objective; the algorithms only
//! see noisy evaluations.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gp::{GpPosterior, KernelSpec, Point};
use crate::stochastics::{cholesky_psd, sample_mvn, sample_mvn_factored, JitterPolicy, RngState};

/// Default limit on the number of points in one continuous-domain grid.
pub const DEFAULT_GRID_CAP: usize = 1_000_000;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )))
    }
}

/// `√(2 ln(t² π² |X| / (6δ)))`.
pub fn beta_discrete_ucb(t: usize, cardinality: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if t == 0 || cardinality == 0 {
        return Err(Error::domain("beta needs t >= 1 and a nonempty domain"));
    }
    let t = t as f64;
    Ok((2.0 * (t * t * PI * PI * cardinality as f64 / (6.0 * delta)).ln()).sqrt())
}

/// `√(2 ln((t² + 1)|X| / √(2π)))`.
pub fn beta_thompson(t: usize, cardinality: usize) -> Result<f64> {
    if t == 0 || cardinality == 0 {
        return Err(Error::domain("beta needs t >= 1 and a nonempty domain"));
    }
    let t = t as f64;
    Ok((2.0 * ((t * t + 1.0) * cardinality as f64 / (2.0 * PI).sqrt()).ln()).sqrt())
}

/// `√(2 ln(2π t² (L m d t²)^d / (6δ)))`.
pub fn beta_continuous(t: usize, delta: f64, lipschitz: f64, edge: f64, dim: usize) -> Result<f64> {
    check_delta(delta)?;
    if t == 0 || dim == 0 || !(lipschitz > 0.0) || !(edge > 0.0) {
        return Err(Error::domain(
            "beta needs t >= 1, d >= 1 and positive Lipschitz constant and edge length",
        ));
    }
    let t = t as f64;
    let d = dim as f64;
    // work in logs: (L m d t²)^d overflows quickly
    let log_arg = (2.0 * PI * t * t / (6.0 * delta)).ln() + d * (lipschitz * edge * d * t * t).ln();
    if !(log_arg > 0.0) {
        return Err(Error::domain(
            "beta² would be non-positive for these parameters",
        ));
    }
    Ok((2.0 * log_arg).sqrt())
}

/// Exploration schedule `β_t` for one of the three algorithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSchedule {
    DiscreteUcb {
        cardinality: usize,
        delta: f64,
    },
    Thompson {
        cardinality: usize,
    },
    ContinuousUcb {
        delta: f64,
        lipschitz: f64,
        edge: f64,
        dim: usize,
    },
}

impl BetaSchedule {
    pub fn beta(&self, t: usize) -> Result<f64> {
        match *self {
            BetaSchedule::DiscreteUcb { cardinality, delta } => {
                beta_discrete_ucb(t, cardinality, delta)
            }
            BetaSchedule::Thompson { cardinality } => beta_thompson(t, cardinality),
            BetaSchedule::ContinuousUcb {
                delta,
                lipschitz,
                edge,
                dim,
            } => beta_continuous(t, delta, lipschitz, edge, dim),
        }
    }
}

/// A finite search space with known objective values.
#[derive(Debug, Clone)]
pub struct DiscreteObjective {
    candidates: Vec<Point>,
    values: Vec<f64>,
    noise: f64,
}

impl DiscreteObjective {
    pub fn new(candidates: Vec<Point>, values: Vec<f64>, noise: f64) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::domain("the candidate set must be nonempty"));
        }
        if candidates.len() != values.len() {
            return Err(Error::Dimension {
                expected: candidates.len(),
                got: values.len(),
            });
        }
        if !(noise >= 0.0) {
            return Err(Error::domain("noise variance must be >= 0"));
        }
        Ok(Self {
            candidates,
            values,
            noise,
        })
    }

    /// Objective values drawn from the prior `GP(0, k)` on `candidates`.
    pub fn from_prior(
        kernel: &KernelSpec,
        candidates: Vec<Point>,
        noise: f64,
        rng: &mut RngState,
    ) -> Result<Self> {
        let values = crate::gp::sample_prior_path(kernel, &candidates, rng)?;
        Self::new(candidates, values, noise)
    }

    pub fn candidates(&self) -> &[Point] {
        &self.candidates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn best_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `f(x_i) + ε` with `ε ~ N(0, σ_n²)`.
    pub fn evaluate(&self, i: usize, rng: &mut RngState) -> f64 {
        self.values[i] + self.noise.sqrt() * rng.standard_normal()
    }
}

type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An objective on `[0, edge]^dim` with a known maximum value.
#[derive(Clone)]
pub struct ContinuousObjective {
    dim: usize,
    edge: f64,
    noise: f64,
    max_value: f64,
    lipschitz: Option<f64>,
    f: Objective,
}

impl fmt::Debug for ContinuousObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousObjective")
            .field("dim", &self.dim)
            .field("edge", &self.edge)
            .field("noise", &self.noise)
            .field("max_value", &self.max_value)
            .finish_non_exhaustive()
    }
}

impl ContinuousObjective {
    pub fn new(
        dim: usize,
        edge: f64,
        noise: f64,
        max_value: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 || !(edge > 0.0) || !(noise >= 0.0) {
            return Err(Error::domain("need d >= 1, edge > 0 and noise >= 0"));
        }
        Ok(Self {
            dim,
            edge,
            noise,
            max_value,
            lipschitz: None,
            f: Arc::new(f),
        })
    }

    /// A prior sample on a regular `resolution^dim` lattice over the
    /// domain (corners included), extended by multilinear interpolation.
    /// The maximum of the interpolant is attained at a lattice node.
    pub fn from_prior_lattice(
        kernel: &KernelSpec,
        dim: usize,
        edge: f64,
        resolution: usize,
        noise: f64,
        rng: &mut RngState,
    ) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::domain("lattice resolution must be at least 2"));
        }
        let nodes = lattice(resolution, dim, edge);
        let values = crate::gp::sample_prior_path(kernel, &nodes, rng)?;
        let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lipschitz = lattice_lipschitz(&values, resolution, dim, edge);
        let f = move |x: &[f64]| multilinear(&values, resolution, edge, x);
        let mut obj = Self::new(dim, edge, noise, max_value, f)?;
        obj.lipschitz = Some(lipschitz);
        Ok(obj)
    }

    /// A Lipschitz constant of the objective, when known.
    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    pub fn evaluate(&self, x: &[f64], rng: &mut RngState) -> f64 {
        self.value(x) + self.noise.sqrt() * rng.standard_normal()
    }
}

/// `resolution^dim` nodes `i·edge/(resolution−1)`, last coordinate fastest.
fn lattice(resolution: usize, dim: usize, edge: f64) -> Vec<Point> {
    let step = edge / (resolution - 1) as f64;
    product_grid(resolution, dim, |i| i as f64 * step)
}

fn product_grid(per_dim: usize, dim: usize, coord: impl Fn(usize) -> f64) -> Vec<Point> {
    let total = per_dim.pow(dim as u32);
    (0..total)
        .map(|mut flat| {
            let mut p = vec![0.0; dim];
            for slot in p.iter_mut().rev() {
                *slot = coord(flat % per_dim);
                flat /= per_dim;
            }
            p
        })
        .collect()
}

/// `√(Σ_k s_k²)` where `s_k` is the steepest lattice edge along axis `k`;
/// each partial derivative of the multilinear interpolant is a convex
/// combination of edge slopes along its axis.
fn lattice_lipschitz(values: &[f64], resolution: usize, dim: usize, edge: f64) -> f64 {
    let step = edge / (resolution - 1) as f64;
    let mut total = 0.0;
    for k in 0..dim {
        let stride = resolution.pow((dim - 1 - k) as u32);
        let mut steepest: f64 = 0.0;
        for (i, v) in values.iter().enumerate() {
            if (i / stride) % resolution + 1 < resolution {
                steepest = steepest.max((values[i + stride] - v).abs());
            }
        }
        total += (steepest / step).powi(2);
    }
    total.sqrt()
}

fn multilinear(values: &[f64], resolution: usize, edge: f64, x: &[f64]) -> f64 {
    let dim = x.len();
    let step = edge / (resolution - 1) as f64;
    let mut base = vec![0usize; dim];
    let mut frac = vec![0.0; dim];
    for k in 0..dim {
        let u = (x[k].clamp(0.0, edge) / step).min((resolution - 1) as f64);
        let i = (u.floor() as usize).min(resolution - 2);
        base[k] = i;
        frac[k] = u - i as f64;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut flat = 0;
        for k in 0..dim {
            let bit = (corner >> (dim - 1 - k)) & 1;
            w *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
            flat = flat * resolution + base[k] + bit;
        }
        if w != 0.0 {
            acc += w * values[flat];
        }
    }
    acc
}

/// Points per dimension at step `t`: `ceil(L m d t²)`.
pub fn grid_resolution(t: usize, lipschitz: f64, edge: f64, dim: usize) -> f64 {
    let t = t as f64;
    (lipschitz * edge * dim as f64 * t * t).ceil().max(1.0)
}

/// Regular grid of `tau^dim` cell centres on `[0, edge]^dim`.
///
/// Every point of the domain is within `edge/(2 tau)` of a grid point in
/// each coordinate, hence within `edge·d/tau` in Euclidean norm.
pub fn regular_grid(tau: usize, dim: usize, edge: f64) -> Vec<Point> {
    let h = edge / tau as f64;
    product_grid(tau, dim, |i| (i as f64 + 0.5) * h)
}

/// The grid point of [`regular_grid`] closest to `x`.
pub fn nearest_grid_point(x: &[f64], tau: usize, edge: f64) -> Point {
    let h = edge / tau as f64;
    x.iter()
        .map(|&v| {
            let i = ((v / h).floor().max(0.0) as usize).min(tau - 1);
            (i as f64 + 0.5) * h
        })
        .collect()
}

/// First `t ≤ horizon` whose grid would exceed `cap` points, if any.
pub fn first_grid_overflow(
    horizon: usize,
    lipschitz: f64,
    edge: f64,
    dim: usize,
    cap: usize,
) -> Option<(usize, f64)> {
    // the grid size is monotone in t; scan in order to report the first t
    (1..=horizon).find_map(|t| {
        let size = grid_resolution(t, lipschitz, edge, dim).powi(dim as i32);
        (size > cap as f64).then_some((t, size))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoStep {
    pub x: Point,
    pub y_obs: f64,
    /// `f(x_*) − f(x_t)`
    pub inst_regret: f64,
    pub cum_regret: f64,
    pub beta: f64,
    /// Posterior mean and standard deviation at `x_t` before observing it.
    pub post_mean: f64,
    pub post_sigma: f64,
    /// Number of checked points whose true value left `[μ_t ± β_t σ_t]`.
    pub outside: usize,
    pub checked: usize,
}

impl BoStep {
    /// Every checked point was inside its confidence interval.
    pub fn covered(&self) -> bool {
        self.outside == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoTrace {
    pub steps: Vec<BoStep>,
}

impl BoTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cum_regret)
    }

    pub fn queried(&self) -> Vec<Point> {
        self.steps.iter().map(|s| s.x.clone()).collect()
    }

    pub fn cum_regret_at(&self, t: usize) -> f64 {
        self.steps[t - 1].cum_regret
    }

    /// `(outside, checked)` summed over all steps.
    pub fn coverage_counts(&self) -> (usize, usize) {
        self.steps
            .iter()
            .fold((0, 0), |(o, c), s| (o + s.outside, c + s.checked))
    }

    fn push(&mut self, mut step: BoStep) {
        step.cum_regret = self.final_regret() + step.inst_regret;
        self.steps.push(step);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoOptions {
    /// After each observation, compare the incrementally updated posterior
    /// with a from-scratch refit and fail on a difference above 1e-10.
    pub debug_refit: bool,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Index of the largest score; ties go to the lexicographically smallest point.
fn argmax_lex(points: &[Point], scores: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        let better = scores[i] > scores[best]
            || (scores[i] == scores[best] && lex_cmp(&points[i], &points[best]).is_lt());
        if better {
            best = i;
        }
    }
    best
}

fn verify_refit(post: &GpPosterior, probes: &[Point]) -> Result<()> {
    let fresh = post.refit()?;
    for p in probes {
        let (m1, v1) = post.query(p)?;
        let (m2, v2) = fresh.query(p)?;
        if (m1 - m2).abs() > 1e-10 || (v1 - v2).abs() > 1e-10 {
            return Err(Error::domain(format!(
                "incremental posterior diverged from refit at {p:?}: ({m1}, {v1}) vs ({m2}, {v2})"
            )));
        }
    }
    Ok(())
}

fn check_kernel(kernel: &KernelSpec) -> Result<()> {
    kernel.validate()
}

/// Scores each point with the posterior; returns `(means, sigmas, outside)`,
/// counting points whose true value falls outside `μ ± βσ`.
fn score_points(
    post: &GpPosterior,
    points: &[Point],
    truth: impl Fn(usize) -> f64,
    beta: f64,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut means = Vec::with_capacity(points.len());
    let mut sigmas = Vec::with_capacity(points.len());
    let mut outside = 0;
    for (i, p) in points.iter().enumerate() {
        let (m, v) = post.query(p)?;
        let s = v.sqrt();
        if (truth(i) - m).abs() > beta * s {
            outside += 1;
        }
        means.push(m);
        sigmas.push(s);
    }
    Ok((means, sigmas, outside))
}

/// GP-UCB on a finite set: `x_t = argmax μ_t(x) + β_t σ_t(x)`.
pub fn run_gp_ucb_discrete(
    oracle: &DiscreteObjective,
    kernel: &KernelSpec,
    horizon: usize,
    delta: f64,
    rng: &mut RngState,
    opts: BoOptions,
) -> Result<BoTrace> {
    check_kernel(kernel)?;
    let schedule = BetaSchedule::DiscreteUcb {
        cardinality: oracle.candidates.len(),
        delta,
    };
    schedule.beta(1)?;
    let best = oracle.best_value();
    let mut post = GpPosterior::prior(*kernel, oracle.noise)?;
    let mut trace = BoTrace::default();
    for t in 1..=horizon {
        let beta = schedule.beta(t)?;
        let (means, sigmas, outside) =
            score_points(&post, &oracle.candidates, |i| oracle.values[i], beta)?;
        let ucb: Vec<f64> = means
            .iter()
            .zip(&sigmas)
            .map(|(m, s)| m + beta * s)
            .collect();
        let i = argmax_lex(&oracle.candidates, &ucb);
        let y = oracle.evaluate(i, rng);
        trace.push(BoStep {
            x: oracle.candidates[i].clone(),
            y_obs: y,
            inst_regret: best - oracle.values[i],
            cum_regret: 0.0,
            beta,
            post_mean: means[i],
            post_sigma: sigmas[i],
            outside,
            checked: oracle.candidates.len(),
        });
        post.observe(oracle.candidates[i].clone(), y)?;
        if opts.debug_refit {
            verify_refit(&post, &oracle.candidates)?;
        }
    }
    Ok(trace)
}

/// GP Thompson sampling on a finite set: query the argmax of one joint
/// posterior draw over all candidates.
///
/// The recorded `beta` and coverage use the Thompson schedule
/// [`beta_thompson`]; they do not influence the choice.
pub fn run_gp_ts_discrete(
    oracle: &DiscreteObjective,
    kernel: &KernelSpec,
    horizon: usize,
    rng: &mut RngState,
    opts: BoOptions,
) -> Result<BoTrace> {
    check_kernel(kernel)?;
    let schedule = BetaSchedule::Thompson {
        cardinality: oracle.candidates.len(),
    };
    let best = oracle.best_value();
    let mut post = GpPosterior::prior(*kernel, oracle.noise)?;
    let mut trace = BoTrace::default();
    for t in 1..=horizon {
        let beta = schedule.beta(t)?;
        let (means, cov) = post.joint(&oracle.candidates)?;
        let factor = cholesky_psd(&cov, JitterPolicy::SemiDefinite)?;
        let draw = sample_mvn_factored(&means, &factor, rng);
        let i = argmax_lex(&oracle.candidates, &draw);
        let mut outside = 0;
        for (j, &m) in means.iter().enumerate() {
            let s = cov.get(j, j).max(0.0).sqrt();
            if (oracle.values[j] - m).abs() > beta * s {
                outside += 1;
            }
        }
        let y = oracle.evaluate(i, rng);
        trace.push(BoStep {
            x: oracle.candidates[i].clone(),
            y_obs: y,
            inst_regret: best - oracle.values[i],
            cum_regret: 0.0,
            beta,
            post_mean: means[i],
            post_sigma: cov.get(i, i).max(0.0).sqrt(),
            outside,
            checked: oracle.candidates.len(),
        });
        post.observe(oracle.candidates[i].clone(), y)?;
        if opts.debug_refit {
            verify_refit(&post, &oracle.candidates)?;
        }
    }
    Ok(trace)
}

/// Settings for [`run_gp_ucb_continuous`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousSettings {
    pub horizon: usize,
    pub delta: f64,
    pub lipschitz: f64,
    pub grid_cap: usize,
}

/// GP-UCB on `[0, m]^d`. Step `t` maximizes the UCB over a fresh regular
/// grid with `ceil(L m d t²)` points per dimension together with all
/// previously queried points.
pub fn run_gp_ucb_continuous(
    oracle: &ContinuousObjective,
    kernel: &KernelSpec,
    settings: ContinuousSettings,
    rng: &mut RngState,
    opts: BoOptions,
) -> Result<BoTrace> {
    check_kernel(kernel)?;
    let ContinuousSettings {
        horizon,
        delta,
        lipschitz,
        grid_cap,
    } = settings;
    let (dim, edge) = (oracle.dim, oracle.edge);
    let schedule = BetaSchedule::ContinuousUcb {
        delta,
        lipschitz,
        edge,
        dim,
    };
    schedule.beta(1)?;
    if let Some((t, size)) = first_grid_overflow(horizon, lipschitz, edge, dim, grid_cap) {
        return Err(Error::GridCapExceeded {
            t,
            size,
            cap: grid_cap,
        });
    }
    let mut post = GpPosterior::prior(*kernel, oracle.noise)?;
    let mut trace = BoTrace::default();
    let mut visited: Vec<Point> = Vec::new();
    for t in 1..=horizon {
        let beta = schedule.beta(t)?;
        let tau = grid_resolution(t, lipschitz, edge, dim) as usize;
        let mut points = regular_grid(tau, dim, edge);
        points.extend(visited.iter().cloned());
        let truth: Vec<f64> = points.iter().map(|p| oracle.value(p)).collect();
        let (means, sigmas, outside) = score_points(&post, &points, |i| truth[i], beta)?;
        let ucb: Vec<f64> = means
            .iter()
            .zip(&sigmas)
            .map(|(m, s)| m + beta * s)
            .collect();
        let i = argmax_lex(&points, &ucb);
        let x = points[i].clone();
        let y = oracle.evaluate(&x, rng);
        trace.push(BoStep {
            x: x.clone(),
            y_obs: y,
            inst_regret: oracle.max_value - truth[i],
            cum_regret: 0.0,
            beta,
            post_mean: means[i],
            post_sigma: sigmas[i],
            outside,
            checked: points.len(),
        });
        post.observe(x.clone(), y)?;
        if opts.debug_refit {
            verify_refit(&post, &points)?;
        }
        if !visited.iter().any(|v| v == &x) {
            visited.push(x);
        }
    }
    Ok(trace)
}

/// Draws a prior sample over `points` for tests and harness scenarios.
pub fn prior_values(kernel: &KernelSpec, points: &[Point], rng: &mut RngState) -> Result<Vec<f64>> {
    sample_mvn(&vec![0.0; points.len()], &kernel.gram(points), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_discrete_values() {
        assert_relative_eq!(
            beta_discrete_ucb(2, 5, 0.05).unwrap(),
            3.602_544_892_039_161_6,
            max_relative = 1e-13
        );
        let b: Vec<f64> = (1..=3)
            .map(|t| beta_discrete_ucb(t, 10, 0.1).unwrap())
            .collect();
        assert!(b[0] < b[1] && b[1] < b[2]);
        // 30-digit oracle
        assert_relative_eq!(
            beta_discrete_ucb(1_000_000, 1_000_000, 0.01).unwrap(),
            9.648_772_166_690_605,
            max_relative = 1e-12
        );
        assert!(beta_discrete_ucb(1, 5, 1.0).is_err());
        assert!(beta_discrete_ucb(0, 5, 0.1).is_err());
    }

    #[test]
    fn beta_thompson_values() {
        assert_relative_eq!(
            beta_thompson(1, 10).unwrap(),
            2.038_035_201_045_025,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            beta_thompson(3, 100).unwrap(),
            3.460_871_782_016_047,
            max_relative = 1e-13
        );
        let mut prev = 0.0;
        for t in [1, 10, 100, 10_000, 1_000_000] {
            let b = beta_thompson(t, 10).unwrap();
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn beta_continuous_values() {
        assert_relative_eq!(
            beta_continuous(1, 0.1, 1.0, 1.0, 1).unwrap(),
            2.167_349_851_858_41,
            max_relative = 1e-13
        );
        // 30-digit oracle of the same expression
        assert_relative_eq!(
            beta_continuous(5, 0.05, 2.0, 1.0, 2).unwrap(),
            5.562_565_247_721_534,
            max_relative = 1e-13
        );
        for (t, d, l) in [(1, 1, 1.0), (3, 2, 0.5), (10, 3, 4.0)] {
            let b = beta_continuous(t, 0.1, l, 1.0, d).unwrap();
            let floor = (2.0 * (2.0 * PI * (t * t) as f64 / 0.6).ln()).sqrt();
            assert!(b >= floor - 1e-12);
        }
        assert!(beta_continuous(1, 0.1, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(grid_resolution(1, 1.0, 1.0, 2), 2.0);
        assert_eq!(regular_grid(2, 2, 1.0).len(), 4);
        for t in 1..=10 {
            let tau = grid_resolution(t, 1.0, 1.0, 1) as usize;
            assert_eq!(tau, t * t);
            let g = regular_grid(tau, 1, 1.0);
            assert_eq!(g.len(), t * t);
            assert!(g.iter().all(|p| (0.0..=1.0).contains(&p[0])));
        }
        assert_eq!(
            first_grid_overflow(10, 1.0, 1.0, 4, DEFAULT_GRID_CAP).map(|x| x.0),
            Some(3)
        );
        assert_eq!(first_grid_overflow(10, 1.0, 1.0, 1, DEFAULT_GRID_CAP), None);
    }

    #[test]
    fn nearest_grid_point_is_nearest() {
        let g = regular_grid(7, 2, 2.0);
        let mut rng = RngState::new(3);
        for _ in 0..200 {
            let x = [rng.uniform_range(0.0, 2.0), rng.uniform_range(0.0, 2.0)];
            let near = nearest_grid_point(&x, 7, 2.0);
            let d = |p: &[f64]| (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
            let best = g.iter().map(|p| d(p)).fold(f64::INFINITY, f64::min);
            assert!((d(&near) - best).abs() < 1e-12);
        }
    }

    #[test]
    fn single_candidate_never_regrets() {
        let oracle = DiscreteObjective::new(vec![vec![0.5]], vec![0.3], 0.01).unwrap();
        let k = KernelSpec::rbf(0.2);
        let mut rng = RngState::new(1);
        let ucb =
            run_gp_ucb_discrete(&oracle, &k, 10, 0.1, &mut rng, BoOptions::default()).unwrap();
        assert_eq!(ucb.final_regret(), 0.0);
        let ts = run_gp_ts_discrete(&oracle, &k, 10, &mut rng, BoOptions::default()).unwrap();
        assert_eq!(ts.final_regret(), 0.0);
    }

    #[test]
    fn first_ucb_pick_breaks_ties_lexicographically() {
        let cands = vec![vec![0.9], vec![0.1], vec![0.5]];
        let oracle = DiscreteObjective::new(cands, vec![0.0, 1.0, 0.5], 0.01).unwrap();
        let mut rng = RngState::new(1);
        let trace = run_gp_ucb_discrete(
            &oracle,
            &KernelSpec::rbf(0.2),
            1,
            0.1,
            &mut rng,
            BoOptions::default(),
        )
        .unwrap();
        assert_eq!(trace.steps[0].x, vec![0.1]);
    }

    #[test]
    fn debug_refit_passes_on_regular_runs() {
        let k = KernelSpec::rbf(0.2);
        let mut rng = RngState::new(5);
        let cands: Vec<Point> = (0..10).map(|i| vec![i as f64 / 9.0]).collect();
        let oracle = DiscreteObjective::from_prior(&k, cands, 0.01, &mut rng).unwrap();
        let opts = BoOptions { debug_refit: true };
        run_gp_ucb_discrete(&oracle, &k, 30, 0.1, &mut rng, opts).unwrap();
        run_gp_ts_discrete(&oracle, &k, 30, &mut rng, opts).unwrap();
    }

    #[test]
    fn continuous_queries_stay_in_domain() {
        let k = KernelSpec::rbf(0.2);
        let mut rng = RngState::new(12);
        let oracle =
            ContinuousObjective::from_prior_lattice(&k, 1, 1.0, 64, 0.01, &mut rng).unwrap();
        let settings = ContinuousSettings {
            horizon: 10,
            delta: 0.1,
            lipschitz: 1.0,
            grid_cap: DEFAULT_GRID_CAP,
        };
        let opts = BoOptions { debug_refit: true };
        let trace = run_gp_ucb_continuous(&oracle, &k, settings, &mut rng, opts).unwrap();
        assert_eq!(trace.len(), 10);
        for (t, s) in trace.steps.iter().enumerate() {
            assert!((0.0..=1.0).contains(&s.x[0]));
            assert!(s.inst_regret >= -1e-12);
            // grid of t² points plus the distinct points visited so far
            assert!(s.checked >= (t + 1) * (t + 1));
        }
    }

    #[test]
    fn continuous_grid_cap_is_enforced() {
        let k = KernelSpec::rbf(0.2);
        let oracle = ContinuousObjective::new(4, 1.0, 0.01, 0.0, |_| 0.0).unwrap();
        let settings = ContinuousSettings {
            horizon: 10,
            delta: 0.1,
            lipschitz: 1.0,
            grid_cap: DEFAULT_GRID_CAP,
        };
        let err = run_gp_ucb_continuous(
            &oracle,
            &k,
            settings,
            &mut RngState::new(0),
            BoOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::GridCapExceeded { t: 3, .. }), "{err}");
    }

    #[test]
    fn lattice_interpolation_hits_nodes() {
        let k = KernelSpec::rbf(0.3);
        let mut rng = RngState::new(2);
        let obj = ContinuousObjective::from_prior_lattice(&k, 2, 1.0, 5, 0.0, &mut rng).unwrap();
        let nodes = lattice(5, 2, 1.0);
        let best = nodes
            .iter()
            .map(|p| obj.value(p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, obj.max_value());
        let l = obj.lipschitz().unwrap();
        for _ in 0..200 {
            let x = [rng.uniform(), rng.uniform()];
            let y = [rng.uniform(), rng.uniform()];
            let dist = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            assert!((obj.value(&x) - obj.value(&y)).abs() <= l * dist + 1e-12);
        }
        for _ in 0..100 {
            let x = [rng.uniform(), rng.uniform()];
            assert!(obj.value(&x) <= obj.max_value() + 1e-12);
        }
    }
}
