//! K-armed stochastic bandits: environments, explore-then-exploit, UCB and
//! regret bookkeeping.
//!
//! Arms are indexed from zero. Algorithms only see sampled rewards; the true
//! means live in [`BanditEnv`] for regret accounting.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastics::RngState;

/// Reward distribution of one arm; every family has support in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Arm {
    Bernoulli {
        p: f64,
    },
    Deterministic {
        value: f64,
    },
    /// Uniform on `[lo, hi] ⊆ [0, 1]`.
    Uniform {
        lo: f64,
        hi: f64,
    },
}

impl Arm {
    pub fn mean(&self) -> f64 {
        match *self {
            Arm::Bernoulli { p } => p,
            Arm::Deterministic { value } => value,
            Arm::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let ok = match *self {
            Arm::Bernoulli { p } => unit(p),
            Arm::Deterministic { value } => unit(value),
            Arm::Uniform { lo, hi } => unit(lo) && unit(hi) && lo <= hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "arm {self:?} has support outside [0, 1]"
            )))
        }
    }

    pub fn sample(&self, rng: &mut RngState) -> f64 {
        match *self {
            Arm::Bernoulli { p } => {
                if rng.bernoulli(p) {
                    1.0
                } else {
                    0.0
                }
            }
            Arm::Deterministic { value } => value,
            Arm::Uniform { lo, hi } => rng.uniform_range(lo, hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditEnv {
    arms: Vec<Arm>,
}

impl BanditEnv {
    pub fn new(arms: Vec<Arm>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::domain("a bandit needs at least one arm"));
        }
        for arm in &arms {
            arm.validate()?;
        }
        Ok(Self { arms })
    }

    pub fn bernoulli(means: &[f64]) -> Result<Self> {
        Self::new(means.iter().map(|&p| Arm::Bernoulli { p }).collect())
    }

    pub fn deterministic(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&value| Arm::Deterministic { value })
                .collect(),
        )
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(Arm::mean).collect()
    }

    pub fn best_mean(&self) -> f64 {
        self.arms
            .iter()
            .map(Arm::mean)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn pull(&self, arm: usize, rng: &mut RngState) -> f64 {
        self.arms[arm].sample(rng)
    }
}

/// Step-by-step record of a bandit run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    /// `μ(a_*) − μ(a_t)`
    pub inst_regret: Vec<f64>,
    pub cum_regret: Vec<f64>,
    /// Pull counts per arm after the last step.
    pub counts: Vec<u64>,
}

impl RegretTrace {
    fn with_capacity(num_arms: usize, horizon: usize) -> Self {
        Self {
            actions: Vec::with_capacity(horizon),
            rewards: Vec::with_capacity(horizon),
            inst_regret: Vec::with_capacity(horizon),
            cum_regret: Vec::with_capacity(horizon),
            counts: vec![0; num_arms],
        }
    }

    fn record(&mut self, env: &BanditEnv, best: f64, action: usize, reward: f64) {
        let gap = best - env.arms[action].mean();
        let prev = self.cum_regret.last().copied().unwrap_or(0.0);
        self.actions.push(action);
        self.rewards.push(reward);
        self.inst_regret.push(gap);
        self.cum_regret.push(prev + gap);
        self.counts[action] += 1;
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }

    /// Per-arm sample means over `steps`; `None` for arms not pulled there.
    pub fn arm_means(&self, steps: Range<usize>) -> Vec<Option<f64>> {
        let k = self.counts.len();
        let mut sums = vec![0.0; k];
        let mut counts = vec![0u64; k];
        for t in steps {
            sums[self.actions[t]] += self.rewards[t];
            counts[self.actions[t]] += 1;
        }
        sums.iter()
            .zip(&counts)
            .map(|(&s, &n)| (n > 0).then(|| s / n as f64))
            .collect()
    }
}

/// Exploration length `ceil((T/K)^{2/3} (ln T)^{1/3})`, capped so `N·K ≤ T`.
pub fn recommended_exploration_n(horizon: u64, num_arms: u64) -> Result<u64> {
    if num_arms == 0 || horizon < num_arms || horizon < 3 {
        return Err(Error::domain(format!(
            "need T >= K >= 1 and T >= 3, got T={horizon}, K={num_arms}"
        )));
    }
    let t = horizon as f64;
    let raw = ((t / num_arms as f64).powf(2.0 / 3.0) * t.ln().powf(1.0 / 3.0)).ceil() as u64;
    Ok(raw.clamp(1, horizon / num_arms))
}

/// Lowest index among the maxima.
fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Explore every arm `exploration` times round-robin, then commit to the
/// best sample mean for the remaining `T − N·K` steps.
pub fn run_explore_then_exploit(
    env: &BanditEnv,
    horizon: usize,
    exploration: usize,
    rng: &mut RngState,
) -> Result<RegretTrace> {
    let k = env.num_arms();
    if exploration.checked_mul(k).is_none_or(|nk| nk > horizon) {
        return Err(Error::domain(format!(
            "explore-then-exploit needs N*K <= T, got N={exploration}, K={k}, T={horizon}"
        )));
    }
    let best = env.best_mean();
    let mut trace = RegretTrace::with_capacity(k, horizon);
    let mut sums = vec![0.0; k];
    for _ in 0..exploration {
        for (arm, sum) in sums.iter_mut().enumerate() {
            let r = env.pull(arm, rng);
            *sum += r;
            trace.record(env, best, arm, r);
        }
    }
    let committed = if exploration == 0 {
        0
    } else {
        argmax(sums.iter().map(|s| s / exploration as f64))
    };
    for _ in exploration * k..horizon {
        let r = env.pull(committed, rng);
        trace.record(env, best, committed, r);
    }
    Ok(trace)
}

/// `mean + √(2 ln T / n_pulls)`.
pub fn ucb_index(mean: f64, n_pulls: u64, horizon: f64) -> Result<f64> {
    if n_pulls == 0 {
        return Err(Error::domain("UCB index is undefined for an unpulled arm"));
    }
    Ok(mean + (2.0 * horizon.ln() / n_pulls as f64).sqrt())
}

/// UCB with horizon-dependent bonus. Each arm is pulled once first; ties go
/// to the lowest arm index.
pub fn run_ucb(env: &BanditEnv, horizon: usize, rng: &mut RngState) -> Result<RegretTrace> {
    let k = env.num_arms();
    if horizon < k {
        return Err(Error::domain(format!(
            "UCB needs T >= K, got T={horizon}, K={k}"
        )));
    }
    let best = env.best_mean();
    let mut trace = RegretTrace::with_capacity(k, horizon);
    let mut sums = vec![0.0; k];
    for (arm, sum) in sums.iter_mut().enumerate() {
        let r = env.pull(arm, rng);
        *sum += r;
        trace.record(env, best, arm, r);
    }
    let bonus_num = 2.0 * (horizon as f64).ln();
    for _ in k..horizon {
        let arm = argmax(
            sums.iter()
                .zip(&trace.counts)
                .map(|(s, &n)| s / n as f64 + (bonus_num / n as f64).sqrt()),
        );
        let r = env.pull(arm, rng);
        sums[arm] += r;
        trace.record(env, best, arm, r);
    }
    Ok(trace)
}
