//! Gaussian-plus-constant basis functions and the moment matrices consumed by
//! the density-ratio estimators.
//!
//! A basis with `b` centers evaluates to a `b + 1` vector whose entry 0 is the
//! constant function 1 and whose entry `l >= 1` is
//! `exp(-||x - x_l||^2 / (2 sigma^2))`.

use nalgebra::{DMatrix, DVector};

use crate::data::{LabeledDataset, RngSeed, UnlabeledDataset};
use crate::error::{Error, Result};

/// Kernel evaluations below this are flushed to zero to avoid subnormals.
const KERNEL_FLUSH: f64 = 1e-300;

/// Multipliers applied to the median pairwise training distance to form the
/// default width grid for cross-validation.
pub const SIGMA_GRID_MULTIPLIERS: [f64; 8] =
    [0.1, 0.2, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0, 5.0];

/// Default regularization grid for the analytic ratio estimator.
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];

/// Default ridge grid for kernel logistic regression and least squares.
pub const DEFAULT_RIDGE_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];

/// Gaussian centers plus the implicit constant basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    centers: DMatrix<f64>, // b x d
    sigma: f64,
}

impl BasisSpec {
    pub fn new(centers: DMatrix<f64>, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::validation(format!(
                "kernel width must be positive and finite, got {sigma}"
            )));
        }
        Ok(BasisSpec { centers, sigma })
    }

    /// All training points as centers; above `cap` a uniform subsample drawn
    /// with `seed` is used instead.
    pub fn from_train(train: &LabeledDataset, sigma: f64, cap: usize, seed: RngSeed) -> Result<Self> {
        let n = train.n();
        if n <= cap {
            return BasisSpec::new(train.features().clone(), sigma);
        }
        let mut rng = seed.rng();
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..cap {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        idx.truncate(cap);
        let centers = crate::data::select_rows(train.features(), &idx);
        BasisSpec::new(centers, sigma)
    }

    /// Number of Gaussian centers `b` (the basis has `b + 1` functions).
    pub fn count(&self) -> usize {
        self.centers.nrows()
    }

    pub fn dim(&self) -> usize {
        self.centers.ncols()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    /// Basis vector at a single point; entry 0 is 1.
    pub fn eval(&self, x: &[f64]) -> Result<DVector<f64>> {
        if self.count() > 0 && x.len() != self.dim() {
            return Err(Error::validation(format!(
                "point has dimension {}, basis expects {}",
                x.len(),
                self.dim()
            )));
        }
        let m = DMatrix::from_row_slice(1, x.len(), x);
        let design = self.design(&m);
        Ok(design.row(0).transpose())
    }

    /// Design matrix: one row per sample, `b + 1` columns, column 0 constant.
    pub fn design(&self, points: &DMatrix<f64>) -> DMatrix<f64> {
        let n = points.nrows();
        let b = self.count();
        let mut out = DMatrix::zeros(n, b + 1);
        out.column_mut(0).fill(1.0);
        if b == 0 {
            return out;
        }
        // ||x - c||^2 = ||x||^2 + ||c||^2 - 2 x.c via one gemm.
        let cross = points * self.centers.transpose(); // n x b
        let x_sq: Vec<f64> = points.row_iter().map(|r| r.iter().map(|v| v * v).sum()).collect();
        let c_sq: Vec<f64> = self
            .centers
            .row_iter()
            .map(|r| r.iter().map(|v| v * v).sum())
            .collect();
        let inv_two_sigma_sq = 1.0 / (2.0 * self.sigma * self.sigma);
        for i in 0..n {
            for l in 0..b {
                let d2 = (x_sq[i] + c_sq[l] - 2.0 * cross[(i, l)]).max(0.0);
                let v = (-d2 * inv_two_sigma_sq).exp();
                out[(i, l + 1)] = if v < KERNEL_FLUSH { 0.0 } else { v };
            }
        }
        out
    }
}

/// Linear density-ratio model `r(x) = sum_l alpha_l phi_l(x)`.
#[derive(Debug, Clone)]
pub struct RatioModel {
    basis: BasisSpec,
    alpha: DVector<f64>,
}

impl RatioModel {
    pub fn new(basis: BasisSpec, alpha: DVector<f64>) -> Result<Self> {
        if alpha.len() != basis.count() + 1 {
            return Err(Error::validation(format!(
                "{} coefficients for a basis of {} functions",
                alpha.len(),
                basis.count() + 1
            )));
        }
        Ok(RatioModel { basis, alpha })
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.basis.eval(x)?.dot(&self.alpha))
    }

    /// Ratio values for every row of `points`.
    pub fn eval_rows(&self, points: &DMatrix<f64>) -> DVector<f64> {
        &self.basis.design(points) * &self.alpha
    }
}

/// Empirical second moment of the basis over the test sample (`G`) and the
/// per-class basis means over the training sample (`H`, one column per class).
#[derive(Debug, Clone)]
pub struct MomentMatrices {
    g: DMatrix<f64>,
    h: DMatrix<f64>,
}

impl MomentMatrices {
    pub fn from_parts(g: DMatrix<f64>, h: DMatrix<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::validation("G must be square"));
        }
        if h.nrows() != g.nrows() {
            return Err(Error::validation("H row count must match G"));
        }
        let asym = (&g - g.transpose()).amax();
        if asym > 1e-8 {
            return Err(Error::validation(format!(
                "G asymmetry {asym} exceeds tolerance"
            )));
        }
        Ok(MomentMatrices { g, h })
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn basis_len(&self) -> usize {
        self.g.nrows()
    }

    pub fn class_count(&self) -> usize {
        self.h.ncols()
    }
}

/// G = mean over test points of phi phi^T; H column y = class-y mean of phi
/// over the training points.
pub fn build_moments(
    spec: &BasisSpec,
    train: &LabeledDataset,
    test: &UnlabeledDataset,
) -> Result<MomentMatrices> {
    if spec.count() > 0 && (train.dim() != spec.dim() || test.dim() != spec.dim()) {
        return Err(Error::validation(format!(
            "basis dimension {} does not match train {} / test {}",
            spec.dim(),
            train.dim(),
            test.dim()
        )));
    }
    train.require_all_classes()?;
    let phi_test = spec.design(test.features());
    let g = phi_test.transpose() * &phi_test / test.n() as f64;

    let phi_train = spec.design(train.features());
    let c = train.class_count();
    let mut h = DMatrix::zeros(spec.count() + 1, c);
    let counts = train.class_counts();
    for (i, &y) in train.labels().iter().enumerate() {
        let col = y - 1;
        for l in 0..h.nrows() {
            h[(l, col)] += phi_train[(i, l)];
        }
    }
    for col in 0..c {
        let scale = 1.0 / counts[col] as f64;
        h.column_mut(col).scale_mut(scale);
    }
    MomentMatrices::from_parts(g, h)
}

/// Median Euclidean distance between distinct point pairs; errors when every
/// pairwise distance is zero or fewer than two points are given.
pub fn median_pairwise_distance(points: &DMatrix<f64>) -> Result<f64> {
    let n = points.nrows();
    if n < 2 {
        return Err(Error::validation(
            "need at least two points for a pairwise distance scale",
        ));
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = (points.row(i) - points.row(j))
                .iter()
                .map(|v| v * v)
                .sum();
            dists.push(d2.sqrt());
        }
    }
    let mid = dists.len() / 2;
    let (_, median, _) = dists.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
    let median = *median;
    if median <= 0.0 {
        // More than half the pairs coincide; fall back to the largest distance.
        let max = dists.iter().cloned().fold(0.0f64, f64::max);
        if max <= 0.0 {
            return Err(Error::validation(
                "all pairwise distances are zero; kernel width scale unidentifiable",
            ));
        }
        return Ok(max);
    }
    Ok(median)
}

/// The default width grid: median distance times the standard multipliers.
pub fn sigma_grid(median_distance: f64) -> Vec<f64> {
    SIGMA_GRID_MULTIPLIERS
        .iter()
        .map(|m| m * median_distance)
        .collect()
}
