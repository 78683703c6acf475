//! Exact Gaussian-process regression with a zero prior mean.
//!
//! The posterior keeps a Cholesky factor of `k(X,X) + σ_n² I` that grows one
//! row at a time as observations arrive, so sequential loops pay `O(n²)` per
//! step. [`GpPosterior::refit`] rebuilds it from scratch for comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastics::{cholesky_psd, sample_mvn, Cholesky, DenseMatrix, JitterPolicy, RngState};

pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Rbf,
    /// Matérn with ν = 1/2 (exponential kernel).
    Matern12,
    Matern32,
    Matern52,
}

/// Stationary covariance function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub lengthscale: f64,
    /// `k(x, x)`; must lie in `(0, 1]`.
    pub variance: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, lengthscale: f64, variance: f64) -> Result<Self> {
        let k = Self {
            family,
            lengthscale,
            variance,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn rbf(lengthscale: f64) -> Self {
        Self {
            family: KernelFamily::Rbf,
            lengthscale,
            variance: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lengthscale > 0.0 && self.lengthscale.is_finite()) {
            return Err(Error::domain(format!(
                "lengthscale must be positive, got {}",
                self.lengthscale
            )));
        }
        if !(self.variance > 0.0 && self.variance <= 1.0) {
            return Err(Error::domain(format!(
                "marginal variance must lie in (0, 1], got {}",
                self.variance
            )));
        }
        Ok(())
    }

    /// Kernel as a function of the distance `r = ‖x − x′‖`.
    pub fn of_distance(&self, r: f64) -> f64 {
        let m = self.variance;
        let s = r / self.lengthscale;
        match self.family {
            KernelFamily::Rbf => m * (-0.5 * s * s).exp(),
            KernelFamily::Matern12 => m * (-s).exp(),
            KernelFamily::Matern32 => {
                let u = 3f64.sqrt() * s;
                m * (1.0 + u) * (-u).exp()
            }
            KernelFamily::Matern52 => {
                let u = 5f64.sqrt() * s;
                m * (1.0 + u + u * u / 3.0) * (-u).exp()
            }
        }
    }

    fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        self.of_distance(r2.sqrt())
    }

    /// Gram matrix `K(X, X)`.
    pub fn gram(&self, points: &[Point]) -> DenseMatrix {
        let n = points.len();
        let mut k = DenseMatrix::zeros(n, n);
        for i in 0..n {
            k.set(i, i, self.variance);
            for j in 0..i {
                let v = self.eval_unchecked(&points[i], &points[j]);
                k.set(i, j, v);
                k.set(j, i, v);
            }
        }
        k
    }
}

pub fn kernel_eval(kernel: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(kernel.eval_unchecked(x, y))
}

fn check_dims(points: &[Point], dim: usize) -> Result<()> {
    match points.iter().find(|p| p.len() != dim) {
        Some(p) => Err(Error::Dimension {
            expected: dim,
            got: p.len(),
        }),
        None => Ok(()),
    }
}

/// GP posterior conditioned on noisy observations.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: KernelSpec,
    noise: f64,
    dim: Option<usize>,
    inputs: Vec<Point>,
    outputs: Vec<f64>,
    factor: Option<Cholesky>,
    /// `(K + σ_n² I)^{-1} Y`
    weights: Vec<f64>,
}

/// Conditions a zero-mean GP on `(inputs, outputs)` with noise variance `noise`.
pub fn fit_posterior(
    kernel: KernelSpec,
    inputs: Vec<Point>,
    outputs: Vec<f64>,
    noise: f64,
) -> Result<GpPosterior> {
    GpPosterior::fit(kernel, inputs, outputs, noise)
}

impl GpPosterior {
    pub fn prior(kernel: KernelSpec, noise: f64) -> Result<Self> {
        Self::fit(kernel, Vec::new(), Vec::new(), noise)
    }

    pub fn fit(
        kernel: KernelSpec,
        inputs: Vec<Point>,
        outputs: Vec<f64>,
        noise: f64,
    ) -> Result<Self> {
        kernel.validate()?;
        if !(noise >= 0.0) {
            return Err(Error::domain(format!(
                "noise variance must be >= 0, got {noise}"
            )));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::Dimension {
                expected: inputs.len(),
                got: outputs.len(),
            });
        }
        let dim = inputs.first().map(Vec::len);
        if let Some(d) = dim {
            check_dims(&inputs, d)?;
        }
        let mut post = Self {
            kernel,
            noise,
            dim,
            inputs,
            outputs,
            factor: None,
            weights: Vec::new(),
        };
        post.refactor()?;
        Ok(post)
    }

    fn refactor(&mut self) -> Result<()> {
        if self.inputs.is_empty() {
            self.factor = None;
            self.weights.clear();
            return Ok(());
        }
        let mut k = self.kernel.gram(&self.inputs);
        k.add_diagonal(self.noise);
        let factor = cholesky_psd(&k, JitterPolicy::Strict)?;
        self.weights = factor.solve(&self.outputs);
        self.factor = Some(factor);
        Ok(())
    }

    /// Adds one observation, extending the factor in place when possible.
    pub fn observe(&mut self, x: Point, y: f64) -> Result<()> {
        match self.dim {
            Some(d) if d != x.len() => {
                return Err(Error::Dimension {
                    expected: d,
                    got: x.len(),
                })
            }
            _ => self.dim = Some(x.len()),
        }
        let cross: Vec<f64> = self
            .inputs
            .iter()
            .map(|xi| self.kernel.eval_unchecked(xi, &x))
            .collect();
        let diag = self.kernel.variance + self.noise;
        self.inputs.push(x);
        self.outputs.push(y);
        let extended = match self.factor.as_mut() {
            Some(f) => f.append(&cross, diag),
            None => false,
        };
        if extended {
            self.weights = self
                .factor
                .as_ref()
                .expect("factor present")
                .solve(&self.outputs);
            Ok(())
        } else {
            self.refactor()
        }
    }

    /// A from-scratch refit on the same data.
    pub fn refit(&self) -> Result<GpPosterior> {
        Self::fit(
            self.kernel,
            self.inputs.clone(),
            self.outputs.clone(),
            self.noise,
        )
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn inputs(&self) -> &[Point] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    fn cross(&self, x: &[f64]) -> Vec<f64> {
        self.inputs
            .iter()
            .map(|xi| self.kernel.eval_unchecked(xi, x))
            .collect()
    }

    /// Posterior mean and variance of `f(x)`; the variance is clamped at 0.
    pub fn query(&self, x: &[f64]) -> Result<(f64, f64)> {
        if let Some(d) = self.dim {
            if d != x.len() {
                return Err(Error::Dimension {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        let Some(factor) = &self.factor else {
            return Ok((0.0, self.kernel.variance));
        };
        let kx = self.cross(x);
        let mean = kx.iter().zip(&self.weights).map(|(a, b)| a * b).sum();
        let v = factor.solve_lower(&kx);
        let var = self.kernel.variance - v.iter().map(|a| a * a).sum::<f64>();
        Ok((mean, var.max(0.0)))
    }

    /// Joint posterior mean vector and covariance matrix over `points`.
    pub fn joint(&self, points: &[Point]) -> Result<(Vec<f64>, DenseMatrix)> {
        if let Some(d) = self.dim {
            check_dims(points, d)?;
        }
        let prior = self.kernel.gram(points);
        let Some(factor) = &self.factor else {
            return Ok((vec![0.0; points.len()], prior));
        };
        let mut means = Vec::with_capacity(points.len());
        let mut vs = Vec::with_capacity(points.len());
        for p in points {
            let kx = self.cross(p);
            means.push(kx.iter().zip(&self.weights).map(|(a, b)| a * b).sum());
            vs.push(factor.solve_lower(&kx));
        }
        let n = points.len();
        let mut cov = prior;
        for i in 0..n {
            for j in 0..=i {
                let reduction: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                let v = cov.get(i, j) - reduction;
                cov.set(i, j, v);
                cov.set(j, i, v);
            }
        }
        Ok((means, cov))
    }
}

/// `posterior.query(x)` as a free function.
pub fn posterior_query(post: &GpPosterior, x: &[f64]) -> Result<(f64, f64)> {
    post.query(x)
}

/// `½ ln det(I + σ_n^{-2} K(X, X))`.
pub fn information_gain(kernel: &KernelSpec, points: &[Point], noise: f64) -> Result<f64> {
    if !(noise > 0.0) {
        return Err(Error::domain(
            "information gain needs positive noise variance",
        ));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    check_dims(points, points[0].len())?;
    let mut k = kernel.gram(points);
    k.add_diagonal(noise);
    let factor = cholesky_psd(&k, JitterPolicy::Strict)?;
    // det(K + σ²I) = σ^{2n} det(I + K/σ²)
    Ok(0.5 * (factor.log_det() - points.len() as f64 * noise.ln()))
}

/// Greedy surrogate for the information capacity: repeatedly pick the
/// candidate with the largest posterior variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyCapacity {
    /// Indices into the candidate set, in selection order.
    pub chosen: Vec<usize>,
    pub gamma: f64,
}

pub fn greedy_info_capacity(
    kernel: &KernelSpec,
    candidates: &[Point],
    steps: usize,
    noise: f64,
) -> Result<GreedyCapacity> {
    if steps > candidates.len() {
        return Err(Error::domain(format!(
            "cannot choose {steps} points from {} candidates",
            candidates.len()
        )));
    }
    if !(noise > 0.0) {
        return Err(Error::domain(
            "information gain needs positive noise variance",
        ));
    }
    let mut post = GpPosterior::prior(*kernel, noise)?;
    let mut chosen = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut best = None;
        let mut best_var = f64::NEG_INFINITY;
        for (i, c) in candidates.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let (_, var) = post.query(c)?;
            if var > best_var {
                best_var = var;
                best = Some(i);
            }
        }
        let i = best.expect("steps <= candidates");
        chosen.push(i);
        post.observe(candidates[i].clone(), 0.0)?;
    }
    let set: Vec<Point> = chosen.iter().map(|&i| candidates[i].clone()).collect();
    Ok(GreedyCapacity {
        gamma: information_gain(kernel, &set, noise)?,
        chosen,
    })
}

/// One draw of `f` on `grid` from the prior `GP(0, k)`.
pub fn sample_prior_path(
    kernel: &KernelSpec,
    grid: &[Point],
    rng: &mut RngState,
) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::domain("prior path needs a nonempty grid"));
    }
    check_dims(grid, grid[0].len())?;
    sample_mvn(&vec![0.0; grid.len()], &kernel.gram(grid), rng)
}
