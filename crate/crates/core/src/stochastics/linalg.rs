use crate::error::{Error, Result};

/// Diagonal inflations tried in order, in units of the mean diagonal magnitude.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-10, 1e-8, 1e-6];

/// Relative pivot tolerance under which a semi-definite factorization
/// treats a column as exactly degenerate.
const SEMIDEFINITE_TOL: f64 = 1e-12;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Symmetric to within `rel_tol` of the largest entry magnitude.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |a, &x| a.max(x.abs()))
            .max(1.0);
        (0..self.rows)
            .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= rel_tol * scale))
    }

    pub fn mean_abs_diagonal(&self) -> f64 {
        let n = self.rows.min(self.cols);
        if n == 0 {
            return 0.0;
        }
        (0..n).map(|i| self.get(i, i).abs()).sum::<f64>() / n as f64
    }

    /// `self · selfᵀ`.
    pub fn mul_self_transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.rows, |i, j| {
            self.row(i)
                .iter()
                .zip(self.row(j))
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.rows.min(self.cols) {
            let d = self.get(i, i);
            self.set(i, i, d + v);
        }
    }
}

/// How [`cholesky_psd`] treats singular or nearly singular input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JitterPolicy {
    /// Every pivot must be strictly positive; needed whenever the factor is
    /// used to solve linear systems.
    Strict,
    /// Zero pivots are allowed when the whole residual column vanishes,
    /// so rank-deficient covariances factor exactly. Only for sampling.
    SemiDefinite,
}

/// Lower Cholesky factor `L` with `L Lᵀ = m + jitter·I`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DenseMatrix,
    jitter: f64,
}

/// Factorizes a symmetric matrix, walking [`JITTER_LADDER`] until a
/// factorization succeeds.
pub fn cholesky_psd(m: &DenseMatrix, policy: JitterPolicy) -> Result<Cholesky> {
    if !m.is_square() {
        return Err(Error::Dimension {
            expected: m.rows(),
            got: m.cols(),
        });
    }
    if !m.is_symmetric(1e-12) {
        return Err(Error::domain("cholesky_psd requires a symmetric matrix"));
    }
    let unit = m.mean_abs_diagonal();
    let mut last = 0.0;
    for step in JITTER_LADDER {
        let jitter = step * unit;
        last = jitter;
        if let Some(l) = factor(m, jitter, policy) {
            return Ok(Cholesky { l, jitter });
        }
    }
    Err(Error::NotPsd { jitter: last })
}

fn factor(m: &DenseMatrix, jitter: f64, policy: JitterPolicy) -> Option<DenseMatrix> {
    let n = m.rows();
    let scale = (0..n).fold(0.0f64, |a, i| a.max(m.get(i, i).abs())) + jitter;
    let tol = SEMIDEFINITE_TOL * scale;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let d = m.get(j, j) + jitter - dot(&l.row(j)[..j], &l.row(j)[..j]);
        if d > 0.0 && (policy == JitterPolicy::Strict || d > tol) {
            let pivot = d.sqrt();
            l.set(j, j, pivot);
            for i in j + 1..n {
                let v = (m.get(i, j) - dot(&l.row(i)[..j], &l.row(j)[..j])) / pivot;
                l.set(i, j, v);
            }
        } else if policy == JitterPolicy::SemiDefinite && d >= -tol {
            // degenerate column: the residual must vanish as well
            for i in j + 1..n {
                let r = m.get(i, j) - dot(&l.row(i)[..j], &l.row(j)[..j]);
                if r.abs() > (tol * scale).sqrt() {
                    return None;
                }
            }
        } else {
            return None;
        }
        if !l.get(j, j).is_finite() {
            return None;
        }
    }
    Some(l)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Cholesky {
    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    /// Absolute diagonal inflation that was applied.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L x = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for i in 0..n {
            let s = b[i] - dot(&self.l.row(i)[..i], &x[..i]);
            x[i] = s / self.l.get(i, i);
        }
        x
    }

    /// Solves `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s = b[i] - (i + 1..n).map(|k| self.l.get(k, i) * x[k]).sum::<f64>();
            x[i] = s / self.l.get(i, i);
        }
        x
    }

    /// Solves `(L Lᵀ) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// `ln det(L Lᵀ)`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l.get(i, i).ln()).sum::<f64>()
    }

    /// Extends the factor by one row/column of the factored matrix.
    ///
    /// `cross` is the new column above the diagonal and `diag` the new
    /// diagonal entry, both without jitter; the existing jitter is reused.
    /// Returns `false` (leaving `self` untouched) when the new pivot is not
    /// strictly positive.
    pub fn append(&mut self, cross: &[f64], diag: f64) -> bool {
        let n = self.dim();
        assert_eq!(cross.len(), n);
        let row = self.solve_lower(cross);
        let d = diag + self.jitter - dot(&row, &row);
        if !(d > 0.0) || row.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let mut l = DenseMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            l.data[i * (n + 1)..i * (n + 1) + i + 1].copy_from_slice(&self.l.row(i)[..=i]);
        }
        l.data[n * (n + 1)..n * (n + 1) + n].copy_from_slice(&row);
        l.set(n, n, d.sqrt());
        self.l = l;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstructs(m: &DenseMatrix, c: &Cholesky) -> f64 {
        let mut target = m.clone();
        target.add_diagonal(c.jitter());
        c.lower().mul_self_transpose().max_abs_diff(&target)
    }

    #[test]
    fn identity_factor() {
        let c = cholesky_psd(&DenseMatrix::identity(3), JitterPolicy::Strict).unwrap();
        assert_eq!(c.lower(), &DenseMatrix::identity(3));
        assert_eq!(c.jitter(), 0.0);
    }

    #[test]
    fn two_by_two_factor() {
        let m = DenseMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]);
        let c = cholesky_psd(&m, JitterPolicy::Strict).unwrap();
        let l = c.lower();
        assert_eq!(l.get(0, 0), 2.0);
        assert_eq!(l.get(1, 0), 1.0);
        assert_eq!(l.get(0, 1), 0.0);
        assert!((l.get(1, 1) - 2f64.sqrt()).abs() < 1e-15);
        assert!(reconstructs(&m, &c) < 1e-12);
    }

    #[test]
    fn indefinite_fails_after_ladder() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        for policy in [JitterPolicy::Strict, JitterPolicy::SemiDefinite] {
            match cholesky_psd(&m, policy) {
                Err(Error::NotPsd { jitter }) => assert_eq!(jitter, 1e-6),
                other => panic!("expected NotPsd, got {other:?}"),
            }
        }
    }

    #[test]
    fn singular_needs_jitter_when_strict() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let strict = cholesky_psd(&m, JitterPolicy::Strict).unwrap();
        assert!(strict.jitter() > 0.0);
        assert!(reconstructs(&m, &strict) < 1e-8);
        let semi = cholesky_psd(&m, JitterPolicy::SemiDefinite).unwrap();
        assert_eq!(semi.jitter(), 0.0);
        assert_eq!(semi.lower().get(1, 1), 0.0);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert!(matches!(
            cholesky_psd(&m, JitterPolicy::Strict),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn append_matches_full_factor() {
        let m = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ]);
        let full = cholesky_psd(&m, JitterPolicy::Strict).unwrap();
        let head = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let mut inc = cholesky_psd(&head, JitterPolicy::Strict).unwrap();
        assert!(inc.append(&[0.5, 0.2], 2.0));
        assert!(inc.lower().max_abs_diff(full.lower()) < 1e-14);
        let b = [1.0, -2.0, 0.5];
        let x = full.solve(&b);
        let back: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| m.get(i, j) * x[j]).sum())
            .collect();
        for (u, v) in back.iter().zip(b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn append_rejects_dependent_column() {
        let mut c = cholesky_psd(&DenseMatrix::identity(1), JitterPolicy::Strict).unwrap();
        assert!(!c.append(&[1.0], 1.0));
        assert_eq!(c.dim(), 1);
    }
}
