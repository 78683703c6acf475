//! Built-in sampler/threshold scenarios for checking concentration bounds
//! against empirical tail frequencies.

use crate::concentration::{
    chebyshev_bound, chernoff_bernoulli_bound, empirical_tail_frequency, gaussian_tail_bound,
    hoeffding_bound, markov_bound, monte_carlo_slack, BoundReport, Direction, Side, TailQuery,
};
use crate::error::Result;
use crate::stochastics::RngState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    Exponential {
        rate: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    /// Number of successes in `n` Bernoulli(`p`) trials.
    Binomial {
        n: u32,
        p: f64,
    },
    /// Mean of `n` draws from U[0, 1].
    UniformMean {
        n: u32,
    },
    /// Mean of `n` Bernoulli(`p`) draws.
    BernoulliMean {
        n: u32,
        p: f64,
    },
}

impl Sampler {
    pub fn sample(&self, rng: &mut RngState) -> f64 {
        match *self {
            Sampler::Exponential { rate } => -(1.0 - rng.uniform()).ln() / rate,
            Sampler::Uniform { lo, hi } => rng.uniform_range(lo, hi),
            Sampler::Normal { mean, sd } => mean + sd * rng.standard_normal(),
            Sampler::Binomial { n, p } => (0..n).filter(|_| rng.bernoulli(p)).count() as f64,
            Sampler::UniformMean { n } => (0..n).map(|_| rng.uniform()).sum::<f64>() / n as f64,
            Sampler::BernoulliMean { n, p } => {
                (0..n).filter(|_| rng.bernoulli(p)).count() as f64 / n as f64
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcScenario {
    pub name: String,
    pub sampler: Sampler,
    pub query: TailQuery,
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcOutcome {
    pub empirical: f64,
    pub bound: f64,
    pub slack: f64,
}

impl ConcOutcome {
    pub fn holds(&self) -> bool {
        self.empirical <= self.bound + self.slack
    }
}

impl ConcScenario {
    pub fn threshold(&self) -> f64 {
        self.query.threshold
    }

    pub fn run(&self, n: u64, rng: &mut RngState) -> Result<ConcOutcome> {
        let empirical = empirical_tail_frequency(|r| self.sampler.sample(r), &self.query, n, rng)?;
        let bound = self.report.bound;
        Ok(ConcOutcome {
            empirical,
            bound,
            slack: monte_carlo_slack(bound, n),
        })
    }
}

fn scenario(name: String, sampler: Sampler, query: TailQuery, report: BoundReport) -> ConcScenario {
    ConcScenario {
        name,
        sampler,
        query,
        report,
    }
}

/// Ten scenarios for each of Markov, Chebyshev, Chernoff (Bernoulli sums),
/// Hoeffding and the Gaussian tail, each satisfying its inequality's
/// preconditions.
pub fn dominance_suite() -> Result<Vec<ConcScenario>> {
    let mut out = Vec::new();

    let markov: [(&str, Sampler, f64, &[f64]); 3] = [
        (
            "exp1",
            Sampler::Exponential { rate: 1.0 },
            1.0,
            &[1.0, 2.0, 3.0, 5.0],
        ),
        (
            "unif01",
            Sampler::Uniform { lo: 0.0, hi: 1.0 },
            0.5,
            &[0.5, 0.75, 0.9],
        ),
        (
            "binom10",
            Sampler::Binomial { n: 10, p: 0.5 },
            5.0,
            &[5.0, 8.0, 10.0],
        ),
    ];
    for (label, sampler, mean, thresholds) in markov {
        for &a in thresholds {
            out.push(scenario(
                format!("markov/{label}/a={a}"),
                sampler,
                TailQuery::raw(a, Direction::AtLeast),
                markov_bound(mean, a)?,
            ));
        }
    }

    let chebyshev: [(&str, Sampler, f64, f64, &[f64]); 3] = [
        (
            "normal",
            Sampler::Normal { mean: 0.0, sd: 1.0 },
            0.0,
            1.0,
            &[1.0, 1.5, 2.0, 3.0],
        ),
        (
            "unif01",
            Sampler::Uniform { lo: 0.0, hi: 1.0 },
            0.5,
            1.0 / 12.0,
            &[0.3, 0.4, 0.45],
        ),
        (
            "binom20",
            Sampler::Binomial { n: 20, p: 0.5 },
            10.0,
            5.0,
            &[3.0, 5.0, 7.0],
        ),
    ];
    for (label, sampler, mean, var, thresholds) in chebyshev {
        for &a in thresholds {
            out.push(scenario(
                format!("chebyshev/{label}/a={a}"),
                sampler,
                TailQuery::deviation(mean, a)?,
                chebyshev_bound(var, a)?,
            ));
        }
    }

    let chernoff: [(u32, f64, Side, f64); 10] = [
        (100, 0.5, Side::Upper, 0.1),
        (100, 0.5, Side::Upper, 0.2),
        (100, 0.5, Side::Upper, 0.3),
        (100, 0.5, Side::Lower, 0.1),
        (100, 0.5, Side::Lower, 0.2),
        (100, 0.5, Side::Lower, 0.3),
        (48, 0.5, Side::Upper, 0.5),
        (200, 0.1, Side::Upper, 0.5),
        (200, 0.1, Side::Upper, 1.0),
        (200, 0.1, Side::Lower, 0.5),
    ];
    for (n, p, side, delta) in chernoff {
        let mu = n as f64 * p;
        let query = match side {
            Side::Upper => TailQuery::raw((1.0 + delta) * mu, Direction::AtLeast),
            Side::Lower => TailQuery::raw((1.0 - delta) * mu, Direction::AtMost),
        };
        out.push(scenario(
            format!("chernoff/binom{n}p{p}/{side:?}/delta={delta}").to_lowercase(),
            Sampler::Binomial { n, p },
            query,
            chernoff_bernoulli_bound(mu, delta, side)?,
        ));
    }

    let hoeffding: [(Sampler, f64, u32, f64); 10] = [
        (Sampler::UniformMean { n: 10 }, 0.5, 10, 0.1),
        (Sampler::UniformMean { n: 10 }, 0.5, 10, 0.2),
        (Sampler::UniformMean { n: 10 }, 0.5, 10, 0.3),
        (Sampler::UniformMean { n: 50 }, 0.5, 50, 0.1),
        (Sampler::UniformMean { n: 50 }, 0.5, 50, 0.15),
        (Sampler::BernoulliMean { n: 20, p: 0.5 }, 0.5, 20, 0.1),
        (Sampler::BernoulliMean { n: 20, p: 0.5 }, 0.5, 20, 0.2),
        (Sampler::BernoulliMean { n: 20, p: 0.5 }, 0.5, 20, 0.3),
        (Sampler::BernoulliMean { n: 100, p: 0.2 }, 0.2, 100, 0.05),
        (Sampler::BernoulliMean { n: 100, p: 0.2 }, 0.2, 100, 0.1),
    ];
    for (sampler, mean, n, a) in hoeffding {
        let label = match sampler {
            Sampler::UniformMean { .. } => format!("unifmean{n}"),
            _ => format!("bernmean{n}"),
        };
        out.push(scenario(
            format!("hoeffding/{label}/a={a}"),
            sampler,
            TailQuery::deviation(mean, a)?,
            hoeffding_bound(n as u64, a, 0.0, 1.0)?,
        ));
    }

    let gaussian: [(f64, f64, f64); 10] = [
        (0.0, 1.0, 0.5),
        (0.0, 1.0, 1.0),
        (0.0, 1.0, 1.5),
        (0.0, 1.0, 2.0),
        (0.0, 1.0, 2.5),
        (0.0, 1.0, 3.0),
        (-1.0, 0.5, 1.0),
        (-1.0, 0.5, 1.5),
        (2.0, 3.0, 1.0),
        (2.0, 3.0, 2.0),
    ];
    for (mean, sd, beta) in gaussian {
        out.push(scenario(
            format!("gaussian-tail/n({mean},{sd})/beta={beta}"),
            Sampler::Normal { mean, sd },
            TailQuery::deviation(mean, beta * sd)?,
            gaussian_tail_bound(beta)?,
        ));
    }
    Ok(out)
}
