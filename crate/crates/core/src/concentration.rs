//! Closed-form tail bounds and a Monte-Carlo frequency estimator to check
//! them against.
//!
//! Every bound is reported twice: the raw expression, which may exceed one
//! when the inequality is vacuous, and the value clamped into `[0, 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastics::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `X ≥ a`
    AtLeast,
    /// `X ≤ a`
    AtMost,
}

/// The event whose probability is being bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    pub threshold: f64,
    pub direction: Direction,
    /// When set, the event is about the deviation `|X − center|` rather
    /// than about `X` itself; `direction` then compares that deviation.
    pub center: Option<f64>,
}

impl TailQuery {
    pub fn raw(threshold: f64, direction: Direction) -> Self {
        Self {
            threshold,
            direction,
            center: None,
        }
    }

    /// `|X − center| ≥ threshold`; requires `threshold > 0`.
    pub fn deviation(center: f64, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) {
            return Err(Error::domain("centered tail queries need a > 0"));
        }
        Ok(Self {
            threshold,
            direction: Direction::AtLeast,
            center: Some(center),
        })
    }

    pub fn holds(&self, x: f64) -> bool {
        let v = match self.center {
            Some(c) => (x - c).abs(),
            None => x,
        };
        match self.direction {
            Direction::AtLeast => v >= self.threshold,
            Direction::AtMost => v <= self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    /// The expression as written, possibly above one.
    pub raw: f64,
    pub bound: f64,
}

impl BoundReport {
    fn new(inequality: &'static str, inputs: Vec<(&'static str, f64)>, raw: f64) -> Self {
        Self {
            inequality,
            inputs,
            raw,
            bound: raw.clamp(0.0, 1.0),
        }
    }
}

/// `Pr(X ≥ a) ≤ E[X] / a` for nonnegative `X`.
pub fn markov_bound(expectation: f64, a: f64) -> Result<BoundReport> {
    if !(expectation >= 0.0) || !(a > 0.0) {
        return Err(Error::domain(format!(
            "markov needs E[X] >= 0 and a > 0, got E[X]={expectation}, a={a}"
        )));
    }
    Ok(BoundReport::new(
        "markov",
        vec![("expectation", expectation), ("a", a)],
        expectation / a,
    ))
}

/// `Pr(|X − E X| ≥ a) ≤ Var(X) / a²`.
pub fn chebyshev_bound(variance: f64, a: f64) -> Result<BoundReport> {
    if !(variance >= 0.0) || !(a > 0.0) {
        return Err(Error::domain(format!(
            "chebyshev needs Var >= 0 and a > 0, got Var={variance}, a={a}"
        )));
    }
    Ok(BoundReport::new(
        "chebyshev",
        vec![("variance", variance), ("a", a)],
        variance / (a * a),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `Pr(X ≥ (1+δ) E X)`, valid for `0 < δ ≤ 1`.
    Upper,
    /// `Pr(X ≤ (1−δ) E X)`, valid for `0 < δ < 1`.
    Lower,
}

/// Chernoff bound for a sum of independent Bernoulli variables with mean `mean_sum`.
pub fn chernoff_bernoulli_bound(mean_sum: f64, delta: f64, side: Side) -> Result<BoundReport> {
    if !(mean_sum > 0.0) {
        return Err(Error::domain("chernoff needs a positive mean"));
    }
    let (ok, denom) = match side {
        Side::Upper => (delta > 0.0 && delta <= 1.0, 3.0),
        Side::Lower => (delta > 0.0 && delta < 1.0, 2.0),
    };
    if !ok {
        return Err(Error::domain(format!(
            "delta={delta} outside the valid range for the {side:?} side"
        )));
    }
    Ok(BoundReport::new(
        "chernoff-bernoulli",
        vec![("mean_sum", mean_sum), ("delta", delta)],
        (-mean_sum * delta * delta / denom).exp(),
    ))
}

/// Generic Chernoff bound `E[e^{tX}] e^{−ta}`.
///
/// `t > 0` bounds `Pr(X ≥ a)`, `t < 0` bounds `Pr(X ≤ a)`.
pub fn chernoff_generic_bound(
    mgf: impl Fn(f64) -> f64,
    a: f64,
    t: f64,
    direction: Direction,
) -> Result<BoundReport> {
    let ok = match direction {
        Direction::AtLeast => t > 0.0,
        Direction::AtMost => t < 0.0,
    };
    if !ok {
        return Err(Error::Sign(format!(
            "t={t} has the wrong sign for the {direction:?} tail"
        )));
    }
    Ok(BoundReport::new(
        "chernoff",
        vec![("a", a), ("t", t)],
        mgf(t) * (-t * a).exp(),
    ))
}

/// Two-sided Hoeffding bound for the mean of `n` i.i.d. variables in `[lo, hi]`.
pub fn hoeffding_bound(n: u64, a: f64, lo: f64, hi: f64) -> Result<BoundReport> {
    if n == 0 || !(a > 0.0) || !(hi > lo) {
        return Err(Error::domain(format!(
            "hoeffding needs n >= 1, a > 0, hi > lo; got n={n}, a={a}, [{lo}, {hi}]"
        )));
    }
    let width = hi - lo;
    Ok(BoundReport::new(
        "hoeffding",
        vec![("n", n as f64), ("a", a), ("lo", lo), ("hi", hi)],
        2.0 * (-2.0 * n as f64 * a * a / (width * width)).exp(),
    ))
}

/// `Pr(|X − μ| ≥ βσ) ≤ exp(−β²/2)` for Gaussian `X`.
pub fn gaussian_tail_bound(beta: f64) -> Result<BoundReport> {
    if !(beta > 0.0) {
        return Err(Error::domain("gaussian tail needs beta > 0"));
    }
    Ok(BoundReport::new(
        "gaussian-tail",
        vec![("beta", beta)],
        (-beta * beta / 2.0).exp(),
    ))
}

/// `E[X·1(X ≥ 0)]` for `X ~ N(μ, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivePartMean {
    /// `μ Φ(μ/σ) + σ φ(μ/σ)`.
    pub exact: f64,
    /// `σ/√(2π) · exp(−μ²/2σ²)`, which dominates `exact` when `μ ≤ 0`.
    pub upper_bound: f64,
}

pub fn gaussian_positive_part_mean(mu: f64, sigma: f64) -> Result<PositivePartMean> {
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma must be positive"));
    }
    let z = mu / sigma;
    let pdf = (-z * z / 2.0).exp() / (2.0 * PI).sqrt();
    let exact = if z < -3.0 {
        // φ(z) + zΦ(z) = φ(x)(1 − x R(x)) with x = −z and Mills ratio
        // R(x) = 1/(x + c), so 1 − xR(x) = c/(x + c) without cancellation.
        let x = -z;
        let c = mills_tail(x);
        sigma * pdf * c / (x + c)
    } else {
        let cdf = 0.5 * libm::erfc(-z / std::f64::consts::SQRT_2);
        mu * cdf + sigma * pdf
    };
    Ok(PositivePartMean {
        exact,
        upper_bound: sigma * pdf,
    })
}

/// `c` in the continued fraction `R(x) = 1/(x + c)`, `c = 1/(x + 2/(x + 3/(x + …)))`.
fn mills_tail(x: f64) -> f64 {
    let mut acc = 0.0;
    for k in (1..=200).rev() {
        acc = k as f64 / (x + acc);
    }
    acc
}

/// Fraction of `n` draws from `sampler` for which `query` holds.
pub fn empirical_tail_frequency(
    mut sampler: impl FnMut(&mut RngState) -> f64,
    query: &TailQuery,
    n: u64,
    rng: &mut RngState,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let hits = (0..n).filter(|_| query.holds(sampler(rng))).count();
    Ok(hits as f64 / n as f64)
}

/// Three binomial standard errors around `p` with `n` draws.
pub fn monte_carlo_slack(p: f64, n: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn markov_examples() {
        assert_eq!(markov_bound(50.0, 80.0).unwrap().bound, 0.625);
        for n in [4.0, 48.0, 1000.0] {
            assert_relative_eq!(
                markov_bound(n / 2.0, 0.75 * n).unwrap().bound,
                2.0 / 3.0,
                max_relative = 1e-15
            );
        }
        assert_eq!(markov_bound(0.0, 5.0).unwrap().bound, 0.0);
        assert!(markov_bound(1.0, 0.0).is_err());
        assert!(markov_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn markov_clamps_but_keeps_raw() {
        let r = markov_bound(5.0, 1.0).unwrap();
        assert_eq!(r.raw, 5.0);
        assert_eq!(r.bound, 1.0);
    }

    #[test]
    fn chebyshev_examples() {
        assert_relative_eq!(chebyshev_bound(10.0, 30.0).unwrap().bound, 10.0 / 900.0);
        assert!((chebyshev_bound(10.0, 30.0).unwrap().bound - 0.0111).abs() < 1e-4);
        let n = 48.0;
        assert_relative_eq!(chebyshev_bound(n / 4.0, n / 4.0).unwrap().bound, 4.0 / n);
        assert_eq!(chebyshev_bound(0.0, 1.0).unwrap().bound, 0.0);
        assert!(chebyshev_bound(1.0, -1.0).is_err());
    }

    #[test]
    fn chernoff_bernoulli_examples() {
        let n = 100.0;
        assert_relative_eq!(
            chernoff_bernoulli_bound(n / 2.0, 0.5, Side::Upper)
                .unwrap()
                .bound,
            (-n / 24.0).exp()
        );
        assert!(
            (chernoff_bernoulli_bound(12.0, 0.5, Side::Upper)
                .unwrap()
                .bound
                - 0.3679)
                .abs()
                < 1e-4
        );
        assert!(
            (chernoff_bernoulli_bound(10.0, 0.5, Side::Lower)
                .unwrap()
                .bound
                - 0.2865)
                .abs()
                < 1e-4
        );
        assert!(chernoff_bernoulli_bound(10.0, 1.0, Side::Upper).is_ok());
        assert!(chernoff_bernoulli_bound(10.0, 1.0, Side::Lower).is_err());
        assert!(chernoff_bernoulli_bound(10.0, 0.0, Side::Upper).is_err());
        assert!(chernoff_bernoulli_bound(10.0, 1.5, Side::Upper).is_err());
    }

    #[test]
    fn chernoff_generic_examples() {
        let normal_mgf = |t: f64| (t * t / 2.0).exp();
        let r = chernoff_generic_bound(normal_mgf, 2.0, 2.0, Direction::AtLeast).unwrap();
        assert_relative_eq!(r.bound, (-2.0f64).exp(), max_relative = 1e-15);
        assert!((r.bound - 0.1353).abs() < 1e-4);
        // optimizing over t lands at t* = a
        for t in [0.5, 1.0, 1.5, 2.5, 3.0] {
            let other = chernoff_generic_bound(normal_mgf, 2.0, t, Direction::AtLeast).unwrap();
            assert!(other.raw >= r.raw);
        }
        assert!(matches!(
            chernoff_generic_bound(normal_mgf, 2.0, -1.0, Direction::AtLeast),
            Err(Error::Sign(_))
        ));
        assert!(matches!(
            chernoff_generic_bound(normal_mgf, 2.0, 1.0, Direction::AtMost),
            Err(Error::Sign(_))
        ));
        let c = 3.0;
        let r =
            chernoff_generic_bound(|t| (t * c).exp(), c + 1.0, 1.0, Direction::AtLeast).unwrap();
        assert_relative_eq!(r.bound, (-1.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn hoeffding_examples() {
        for t in [10.0f64, 100.0, 1e4] {
            let n = 50u64;
            let a = (2.0 * t.ln() / n as f64).sqrt();
            assert_relative_eq!(
                hoeffding_bound(n, a, 0.0, 1.0).unwrap().raw,
                2.0 / t.powi(4),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            hoeffding_bound(100, 0.2, 0.0, 1.0).unwrap().bound,
            2.0 * (-8.0f64).exp(),
            max_relative = 1e-12
        );
        assert!((hoeffding_bound(1, 1.0, 0.0, 1.0).unwrap().bound - 0.2707).abs() < 1e-4);
        assert!(hoeffding_bound(1, 1.0, 1.0, 1.0).is_err());
        assert!(hoeffding_bound(0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_tail_examples() {
        assert!((gaussian_tail_bound(2.0).unwrap().bound - 0.1353).abs() < 1e-4);
        let r = gaussian_tail_bound(1e-9).unwrap();
        assert!(r.bound <= 1.0 && r.bound > 0.999_999);
        assert!(gaussian_tail_bound(0.0).is_err());
        // beta chosen so the bound equals 6δ/(t²π²|X|)
        let (t, card, delta) = (7.0f64, 20.0, 0.1);
        let target = 6.0 * delta / (t * t * PI * PI * card);
        let beta = (2.0 * (t * t * PI * PI * card / (6.0 * delta)).ln()).sqrt();
        assert_relative_eq!(
            gaussian_tail_bound(beta).unwrap().bound,
            target,
            max_relative = 1e-12
        );
    }

    #[test]
    fn positive_part_mean_examples() {
        let p = gaussian_positive_part_mean(0.0, 1.0).unwrap();
        assert_relative_eq!(p.exact, 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-15);
        assert_eq!(p.exact, p.upper_bound);
        // quadrature oracle (mpmath, 30 digits)
        let p = gaussian_positive_part_mean(-1.0, 1.0).unwrap();
        assert_relative_eq!(p.exact, 0.083_315_470_587_686_3, max_relative = 1e-10);
        assert_relative_eq!(p.upper_bound, 0.241_970_724_519_143_3, max_relative = 1e-12);
        let p = gaussian_positive_part_mean(-10.0, 1.0).unwrap();
        assert_relative_eq!(p.exact, 7.474_560_254_589_328e-25, max_relative = 1e-6);
        assert!(gaussian_positive_part_mean(0.0, 0.0).is_err());
    }

    #[test]
    fn positive_part_mean_is_continuous_across_branches() {
        let below = gaussian_positive_part_mean(-3.0 - 1e-9, 1.0).unwrap().exact;
        let above = gaussian_positive_part_mean(-3.0 + 1e-9, 1.0).unwrap().exact;
        assert_relative_eq!(below, above, max_relative = 1e-7);
        // mpmath, 30 digits: φ(3) − 3·Q(3)
        assert_relative_eq!(
            gaussian_positive_part_mean(-3.0, 1.0).unwrap().exact,
            3.821_543_170_477_236e-4,
            max_relative = 1e-9
        );
    }

    #[test]
    fn empirical_frequency_examples() {
        let mut rng = RngState::new(1);
        let q = TailQuery::raw(4.0, Direction::AtLeast);
        assert_eq!(
            empirical_tail_frequency(|_| 5.0, &q, 100, &mut rng).unwrap(),
            1.0
        );
        let q0 = TailQuery::raw(0.0, Direction::AtLeast);
        let f = empirical_tail_frequency(|r| r.standard_normal(), &q0, 100_000, &mut rng).unwrap();
        assert!((f - 0.5).abs() < 0.005);
        assert!(empirical_tail_frequency(|_| 0.0, &q, 0, &mut rng).is_err());
        assert!(TailQuery::deviation(0.0, 0.0).is_err());
    }

    #[test]
    fn coin_tail_frequency_matches_binomial() {
        // exact: (C(10,8)+C(10,9)+C(10,10)) / 2^10
        let exact = 56.0 / 1024.0;
        assert_eq!(exact, 0.0546875);
        let n = 1_000_000;
        let mut rng = RngState::new(9);
        let q = TailQuery::raw(8.0, Direction::AtLeast);
        let coins = |r: &mut RngState| (0..10).filter(|_| r.bernoulli(0.5)).count() as f64;
        let f = empirical_tail_frequency(coins, &q, n, &mut rng).unwrap();
        assert!((f - exact).abs() <= monte_carlo_slack(exact, n));
    }

    #[test]
    fn frequency_is_seed_deterministic() {
        let q = TailQuery::raw(1.0, Direction::AtLeast);
        let run = |seed| {
            let mut rng = RngState::new(seed);
            empirical_tail_frequency(|r| r.standard_normal(), &q, 10_000, &mut rng).unwrap()
        };
        assert_eq!(run(3).to_bits(), run(3).to_bits());
    }
}
