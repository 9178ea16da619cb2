use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::Point3;
use crate::ocl::features::FeatureMatrix;
use crate::ocl::mlp::Mlp;
use crate::rng::Rng;
use crate::scene::RoomScene;

/// Shared per-point MLP over raw coordinates.
///
/// Each row depends only on its own point, so reordering points reorders the
/// output rows the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyEncoder {
    mlp: Mlp,
}

impl ToyEncoder {
    pub const DEFAULT_WIDTH: usize = 64;

    pub fn new(mlp: Mlp) -> Self {
        Self { mlp }
    }

    /// Three layers `3 → 64 → 64 → 64`.
    pub fn with_seed(seed: u64) -> Self {
        let w = Self::DEFAULT_WIDTH;
        let mut rng = Rng::new(seed);
        Self::new(Mlp::random(&[3, w, w, w], &mut rng).expect("valid widths"))
    }

    pub fn output_dim(&self) -> usize {
        self.mlp.output_dim()
    }

    pub fn encode_points(&self, points: &[Point3]) -> Result<FeatureMatrix> {
        let dim = self.output_dim();
        let mut data = vec![0.0; points.len() * dim];
        data.par_chunks_mut(dim)
            .zip(points.par_iter())
            .for_each(|(row, p)| row.copy_from_slice(&self.mlp.forward(p)));
        FeatureMatrix::new(points.len(), dim, data)
    }
}

/// Per-point features of a scene.
pub fn toy_encode(scene: &RoomScene, encoder: &ToyEncoder) -> Result<FeatureMatrix> {
    encoder.encode_points(scene.points.points())
}
