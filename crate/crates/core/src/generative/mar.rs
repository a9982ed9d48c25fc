use super::GenerationError;
use nalgebra::{DMatrix, RowDVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random generation order of the units, split into `K` steps.
///
/// Step `k` generates `π(k·m) … π((k+1)·m − 1)` with `m = ⌊N_u / K⌋`; the
/// last step also takes the remainder. Unit indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarSchedule {
    permutation: Vec<usize>,
    subsets: Vec<Vec<usize>>,
}

impl MarSchedule {
    /// Partition of a fixed permutation into `k` steps.
    pub fn from_permutation(permutation: Vec<usize>, k: usize) -> Result<Self, GenerationError> {
        let n = permutation.len();
        if k < 1 || k > n {
            return Err(GenerationError::InvalidK { k, n_units: n });
        }
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(GenerationError::InvalidPermutation);
            }
        }
        let m = n / k;
        let subsets = (0..k)
            .map(|step| {
                let end = if step + 1 == k { n } else { (step + 1) * m };
                permutation[step * m..end].to_vec()
            })
            .collect();
        Ok(MarSchedule {
            permutation,
            subsets,
        })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn k_steps(&self) -> usize {
        self.subsets.len()
    }

    pub fn n_units(&self) -> usize {
        self.permutation.len()
    }
}

/// Uniformly random permutation of `0..n_units` partitioned into `k` steps.
pub fn mar_schedule<R: Rng + ?Sized>(n_units: usize, k: usize, rng: &mut R) -> Result<MarSchedule, GenerationError> {
    if k < 1 || k > n_units {
        return Err(GenerationError::InvalidK { k, n_units });
    }
    let mut perm: Vec<usize> = (0..n_units).collect();
    perm.shuffle(rng);
    MarSchedule::from_permutation(perm, k)
}

/// Per-unit embedding rows (`N_u × D`).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix(DMatrix<f64>);

impl EmbeddingMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self, GenerationError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GenerationError::NonFinite);
        }
        Ok(EmbeddingMatrix(values))
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix(DMatrix::zeros(rows, dim))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, GenerationError> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(GenerationError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let rows: Vec<RowDVector<f64>> = rows.iter().map(|r| RowDVector::from_row_slice(r)).collect();
        if rows.is_empty() {
            return Ok(Self::zeros(0, 0));
        }
        Self::new(DMatrix::from_rows(&rows))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|i| self.row(i)).collect()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Zeroes the rows listed in `mask_set`; other rows are copied unchanged.
pub fn mask_rows(x: &EmbeddingMatrix, mask_set: &[usize]) -> Result<EmbeddingMatrix, GenerationError> {
    let mut out = x.0.clone();
    for &i in mask_set {
        if i >= x.rows() {
            return Err(GenerationError::IndexOutOfRange { index: i, rows: x.rows() });
        }
        out.row_mut(i).fill(0.0);
    }
    Ok(EmbeddingMatrix(out))
}

/// Mean of the rows, as a single-row matrix.
pub fn mean_pool(e: &EmbeddingMatrix) -> Result<EmbeddingMatrix, GenerationError> {
    if e.rows() == 0 {
        return Err(GenerationError::EmptyMatrix);
    }
    let mean = e.0.row_mean();
    Ok(EmbeddingMatrix(DMatrix::from_rows(&[mean])))
}
