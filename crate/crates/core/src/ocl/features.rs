use crate::error::{Error, Result};

/// Dense row-major matrix of finite feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::invalid(format!(
                "feature matrix shape {rows}x{dim} is empty"
            )));
        }
        if data.len() != rows * dim {
            return Err(Error::invalid(format!(
                "{} values do not fill a {rows}x{dim} matrix",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite feature at row {}, column {}",
                i / dim,
                i % dim
            )));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("feature rows have different lengths"));
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }
}

/// Averages per-point features over each shared instance.
///
/// One output row per id of `shared_ids`, in ascending id order. Points with
/// label 0 or with ids outside the shared set never contribute.
pub fn pool_by_instance(
    features: &FeatureMatrix,
    labels: &[u32],
    shared_ids: &[u32],
) -> Result<FeatureMatrix> {
    if features.rows() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature rows but {} labels",
            features.rows(),
            labels.len()
        )));
    }
    let mut ids = shared_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return Err(Error::invalid("no instances to pool"));
    }
    if ids[0] == 0 {
        return Err(Error::invalid("label 0 is reserved for confounders"));
    }
    let dim = features.dim();
    let mut sums = vec![0.0; ids.len() * dim];
    let mut counts = vec![0usize; ids.len()];
    for (row, &label) in features.iter_rows().zip(labels) {
        if label == 0 {
            continue;
        }
        if let Ok(k) = ids.binary_search(&label) {
            counts[k] += 1;
            for (s, v) in sums[k * dim..(k + 1) * dim].iter_mut().zip(row) {
                *s += v;
            }
        }
    }
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(Error::MissingInstance(ids[k]));
        }
        for s in &mut sums[k * dim..(k + 1) * dim] {
            *s /= c as f64;
        }
    }
    FeatureMatrix::new(ids.len(), dim, sums)
}
