//! Object-level contrastive objective: per-instance pooling, projection onto
//! the unit sphere, symmetric InfoNCE with its analytic gradient, and a toy
//! per-point encoder to drive it end to end.

mod check;
mod encoder;
mod features;
mod head;
mod loss;
mod mlp;
pub mod oracle;

pub use check::{loss_check, LossCheckReport, LossCheckTolerances};
pub use encoder::{toy_encode, ToyEncoder};
pub use features::{pool_by_instance, FeatureMatrix};
pub use head::{project, ProjectionHead, MIN_FEATURE_NORM};
pub use loss::{ocl_batch_loss, ocl_grad, ocl_loss, OclConfig, OclGradient, PairFeatures};
pub use mlp::{Linear, Mlp};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::scene::ScenePair;

/// Encodes both rooms, pools over the shared instances and projects.
///
/// Row `i` of both outputs belongs to `pair.shared_ids[i]` (ascending).
pub fn pair_features(
    pair: &ScenePair,
    encoder: &ToyEncoder,
    head: &ProjectionHead,
) -> Result<PairFeatures> {
    room_features(
        (pair.room_a.points.points(), &pair.room_a.labels),
        (pair.room_b.points.points(), &pair.room_b.labels),
        &pair.shared_ids,
        encoder,
        head,
    )
}

/// [`pair_features`] over raw point/label arrays.
pub fn room_features(
    room_a: (&[Point3], &[u32]),
    room_b: (&[Point3], &[u32]),
    shared_ids: &[u32],
    encoder: &ToyEncoder,
    head: &ProjectionHead,
) -> Result<PairFeatures> {
    if shared_ids.is_empty() {
        return Err(Error::DegeneratePair("no shared instances".into()));
    }
    let pooled = |(points, labels): (&[Point3], &[u32])| -> Result<Vec<Vec<f64>>> {
        let f = encoder.encode_points(points)?;
        let h = pool_by_instance(&f, labels, shared_ids)?;
        h.iter_rows().map(|row| project(row, head)).collect()
    };
    Ok((pooled(room_a)?, pooled(room_b)?))
}

/// Scalar loss for one pair with no batch extras.
pub fn ocl_end_to_end(
    pair: &ScenePair,
    encoder: &ToyEncoder,
    head: &ProjectionHead,
    cfg: &OclConfig,
) -> Result<f64> {
    let (fa, fb) = pair_features(pair, encoder, head)?;
    ocl_loss(&fa, &fb, &[], cfg)
}
