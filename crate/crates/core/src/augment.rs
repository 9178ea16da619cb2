//! Object-level augmentation: resize into the room-scale size band, rotate
//! about the up axis, drop points, jitter.

use std::f64::consts::TAU;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::geometry::{rotate_points_z, Point3, PointCloud};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectAugmentConfig {
    /// Lower bound of the target max extent, meters.
    pub size_min: f64,
    /// Upper bound of the target max extent, meters.
    pub size_max: f64,
    /// Dropping ratio is drawn uniformly from `[0, drop_ratio_max]`.
    pub drop_ratio_max: f64,
    pub jitter_sigma: f64,
    pub jitter_clip: f64,
    pub rotation_enabled: bool,
}

impl Default for ObjectAugmentConfig {
    fn default() -> Self {
        Self {
            size_min: 0.5,
            size_max: 2.0,
            drop_ratio_max: 0.2,
            jitter_sigma: 0.01,
            jitter_clip: 0.05,
            rotation_enabled: true,
        }
    }
}

impl ObjectAugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.size_min > 0.0 && self.size_min <= self.size_max && self.size_max.is_finite()) {
            return Err(Error::invalid(format!(
                "size band [{}, {}] must satisfy 0 < size_min <= size_max",
                self.size_min, self.size_max
            )));
        }
        if !(0.0..1.0).contains(&self.drop_ratio_max) {
            return Err(Error::invalid(format!(
                "drop_ratio_max {} outside [0, 1)",
                self.drop_ratio_max
            )));
        }
        check_jitter(self.jitter_sigma, self.jitter_clip)
    }
}

/// Parameters sampled by one [`augment_object`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectAugmentRecord {
    pub target_size: f64,
    pub rotation: f64,
    pub drop_ratio: f64,
    /// Max extent after the whole chain.
    pub final_size: f64,
}

fn check_jitter(sigma: f64, clip: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("jitter sigma {sigma} must be >= 0")));
    }
    if !(clip >= sigma && clip.is_finite()) {
        return Err(Error::invalid(format!(
            "jitter clip {clip} must be >= sigma {sigma}"
        )));
    }
    Ok(())
}

/// Recentres the cloud at the origin and scales it uniformly so the maximum
/// bounding-box extent equals `target` (to the last ulp, never above it).
pub fn resize_to_extent(pc: &PointCloud, target: f64) -> Result<PointCloud> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::invalid(format!(
            "target size {target} must be positive"
        )));
    }
    let base = pc.recentred();
    let extent = base.aabb().max_extent();
    if !(extent > 0.0) {
        return Err(Error::DegenerateObject(format!(
            "all {} points coincide",
            pc.len()
        )));
    }
    scale_to(&base, extent, target, target)
}

/// Scales an origin-anchored cloud with max extent `extent` towards `target`,
/// guaranteeing the result does not exceed `ceiling`.
fn scale_to(base: &PointCloud, extent: f64, target: f64, ceiling: f64) -> Result<PointCloud> {
    let mut factor = target / extent;
    if factor == 1.0 {
        return Ok(base.clone());
    }
    // The minimum stays exactly at 0 under scaling, so only rounding in the
    // product can push the extent past the ceiling.
    for _ in 0..8 {
        let scaled = base.scale(factor)?;
        if scaled.aabb().max_extent() <= ceiling {
            return Ok(scaled);
        }
        factor *= 1.0 - f64::EPSILON;
    }
    Err(Error::DegenerateObject(format!(
        "could not scale extent {extent} under {ceiling}"
    )))
}

/// Uniform resize so the max extent is a uniform draw from the size band.
pub fn resize_to_target(
    pc: &PointCloud,
    rng: &mut Rng,
    cfg: &ObjectAugmentConfig,
) -> Result<PointCloud> {
    let target = rng.uniform_range(cfg.size_min, cfg.size_max);
    resize_to_extent(pc, target)
}

/// Number of points kept when dropping `ratio` of `count`.
pub fn retained_count(count: usize, ratio: f64) -> usize {
    ((count as f64 * (1.0 - ratio)).round() as usize).clamp(1, count.max(1))
}

/// Sorted indices of a uniformly random subset of `0..count` after dropping.
pub fn drop_indices(count: usize, rng: &mut Rng, ratio: f64) -> Result<Vec<usize>> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::invalid(format!("drop ratio {ratio} outside [0, 1)")));
    }
    if count == 0 {
        return Err(Error::invalid("cannot drop from an empty cloud"));
    }
    let keep = retained_count(count, ratio);
    if keep == count {
        return Ok((0..count).collect());
    }
    let mut idx = index::sample(rng, count, keep).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Keeps a uniformly random, order-preserving subset.
pub fn drop_points(pc: &PointCloud, rng: &mut Rng, ratio: f64) -> Result<PointCloud> {
    let idx = drop_indices(pc.len(), rng, ratio)?;
    let pts = pc.points();
    Ok(PointCloud::from_vec_unchecked(
        idx.into_iter().map(|i| pts[i]).collect(),
    ))
}

pub(crate) fn jitter_points(points: &mut [Point3], rng: &mut Rng, sigma: f64, clip: f64) {
    if sigma == 0.0 {
        return;
    }
    for p in points.iter_mut() {
        for c in p.iter_mut() {
            *c += (sigma * rng.gaussian()).clamp(-clip, clip);
        }
    }
}

/// Adds clipped Gaussian noise to every coordinate.
pub fn jitter(pc: &PointCloud, rng: &mut Rng, sigma: f64, clip: f64) -> Result<PointCloud> {
    check_jitter(sigma, clip)?;
    let mut pts = pc.points().to_vec();
    jitter_points(&mut pts, rng, sigma, clip);
    Ok(PointCloud::from_vec_unchecked(pts))
}

/// Full object augmentation chain; output is anchored at the origin.
pub fn augment_object(
    pc: &PointCloud,
    rng: &mut Rng,
    cfg: &ObjectAugmentConfig,
) -> Result<PointCloud> {
    augment_object_recorded(pc, rng, cfg).map(|(pc, _)| pc)
}

/// [`augment_object`] plus the sampled parameters.
///
/// Order: rotate about z, resize to the sampled target, drop, jitter, then a
/// final uniform fit into `[size_min, size_max]` and recentring. Rotating
/// first makes the sized extent the one the object actually occupies; the
/// final fit absorbs the few centimeters jitter and dropping can move it.
pub fn augment_object_recorded(
    pc: &PointCloud,
    rng: &mut Rng,
    cfg: &ObjectAugmentConfig,
) -> Result<(PointCloud, ObjectAugmentRecord)> {
    cfg.validate()?;
    let rotation = if cfg.rotation_enabled {
        rng.uniform_range(0.0, TAU)
    } else {
        0.0
    };
    let rotated = if rotation != 0.0 {
        PointCloud::from_vec_unchecked(rotate_points_z(pc.points(), rotation, [0.0, 0.0]))
    } else {
        pc.clone()
    };

    let target_size = rng.uniform_range(cfg.size_min, cfg.size_max);
    let resized = resize_to_extent(&rotated, target_size)?;

    let drop_ratio = rng.uniform_range(0.0, cfg.drop_ratio_max);
    let dropped = drop_points(&resized, rng, drop_ratio)?;
    let jittered = jitter(&dropped, rng, cfg.jitter_sigma, cfg.jitter_clip)?;

    let base = jittered.recentred();
    let extent = base.aabb().max_extent();
    let out = if extent > cfg.size_max {
        scale_to(&base, extent, cfg.size_max, cfg.size_max)?
    } else if extent < cfg.size_min {
        if !(extent > 0.0) {
            return Err(Error::DegenerateObject(
                "object collapsed to a point".into(),
            ));
        }
        let up = scale_to(&base, extent, cfg.size_min, f64::INFINITY)?;
        // round up onto the band if the product landed one ulp short
        nudge_up(up, cfg.size_min)?
    } else {
        base
    };
    let final_size = out.aabb().max_extent();
    Ok((
        out,
        ObjectAugmentRecord {
            target_size,
            rotation,
            drop_ratio,
            final_size,
        },
    ))
}

fn nudge_up(mut pc: PointCloud, floor: f64) -> Result<PointCloud> {
    for _ in 0..8 {
        if pc.aabb().max_extent() >= floor {
            return Ok(pc);
        }
        pc = pc.scale(1.0 + f64::EPSILON)?;
    }
    Ok(pc)
}
