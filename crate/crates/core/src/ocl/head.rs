use crate::error::{Error, Result};
use crate::ocl::mlp::{Linear, Mlp};
use crate::rng::Rng;

/// Below this pre-normalization norm a feature has no direction.
pub const MIN_FEATURE_NORM: f64 = 1e-12;

/// MLP followed by L2 normalization onto the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionHead {
    mlp: Mlp,
}

impl ProjectionHead {
    pub const DEFAULT_OUTPUT: usize = 128;

    pub fn new(mlp: Mlp) -> Self {
        Self { mlp }
    }

    /// Two layers: `input → input → 128`, seeded init.
    pub fn with_seed(input: usize, seed: u64) -> Result<Self> {
        let mut rng = Rng::new(seed);
        Ok(Self::new(Mlp::random(
            &[input, input, Self::DEFAULT_OUTPUT],
            &mut rng,
        )?))
    }

    /// Single identity layer: projection is plain normalization.
    pub fn identity(dim: usize) -> Self {
        Self::new(Mlp::new(vec![Linear::identity(dim)]).expect("one layer"))
    }

    pub fn input_dim(&self) -> usize {
        self.mlp.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.mlp.output_dim()
    }
}

/// Maps `h` through the head and normalizes to unit length.
pub fn project(h: &[f64], head: &ProjectionHead) -> Result<Vec<f64>> {
    if h.len() != head.input_dim() {
        return Err(Error::invalid(format!(
            "feature has {} dims, head expects {}",
            h.len(),
            head.input_dim()
        )));
    }
    let mut out = head.mlp.forward(h);
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm >= MIN_FEATURE_NORM) {
        return Err(Error::DegenerateFeature(norm));
    }
    for v in &mut out {
        *v /= norm;
    }
    Ok(out)
}
