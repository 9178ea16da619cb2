//! Point clouds, axis-aligned boxes and the rigid/scale transforms used by the
//! generator. Coordinates are meters, stored as `f64`.

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

/// Non-empty ordered list of finite points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("point cloud is empty"));
        }
        if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::invalid(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(Self { points })
    }

    /// Caller guarantees non-empty, finite input.
    pub(crate) fn from_vec_unchecked(points: Vec<Point3>) -> Self {
        debug_assert!(!points.is_empty());
        Self { points }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn aabb(&self) -> Aabb {
        // non-empty by construction
        Aabb::from_points(&self.points).expect("non-empty point cloud")
    }

    pub fn translate(&self, delta: Point3) -> Result<PointCloud> {
        check_finite(&delta, "translation")?;
        Ok(Self::from_vec_unchecked(translate_points(
            &self.points,
            delta,
        )))
    }

    /// Rotates about the z axis through the origin.
    pub fn rotate_z(&self, theta: f64) -> Result<PointCloud> {
        if !theta.is_finite() {
            return Err(Error::invalid("rotation angle is not finite"));
        }
        Ok(Self::from_vec_unchecked(rotate_points_z(
            &self.points,
            theta,
            [0.0, 0.0],
        )))
    }

    /// Uniform scale about the origin.
    pub fn scale(&self, factor: f64) -> Result<PointCloud> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(Error::invalid(format!(
                "scale factor {factor} must be finite and positive"
            )));
        }
        Ok(Self::from_vec_unchecked(
            self.points
                .iter()
                .map(|p| [p[0] * factor, p[1] * factor, p[2] * factor])
                .collect(),
        ))
    }

    /// Shifts the cloud so its bounding-box minimum sits at the origin.
    pub fn recentred(&self) -> PointCloud {
        let min = self.aabb().min;
        Self::from_vec_unchecked(translate_points(&self.points, [-min[0], -min[1], -min[2]]))
    }
}

/// Axis-aligned bounding box with `min <= max` component-wise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn from_points(points: &[Point3]) -> Result<Aabb> {
        let first = points
            .first()
            .ok_or_else(|| Error::invalid("cannot bound an empty point set"))?;
        let mut min = *first;
        let mut max = *first;
        for p in &points[1..] {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        Ok(Aabb { min, max })
    }

    pub fn extent(&self) -> Point3 {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }

    pub fn max_extent(&self) -> f64 {
        let e = self.extent();
        e[0].max(e[1]).max(e[2])
    }

    /// Footprint area in the X-Y plane.
    pub fn footprint_area(&self) -> f64 {
        let e = self.extent();
        e[0] * e[1]
    }
}

/// Tight bounding box of a cloud.
pub fn compute_aabb(pc: &PointCloud) -> Aabb {
    pc.aabb()
}

pub(crate) fn translate_points(points: &[Point3], d: Point3) -> Vec<Point3> {
    points
        .iter()
        .map(|p| [p[0] + d[0], p[1] + d[1], p[2] + d[2]])
        .collect()
}

/// Rotates `(x, y)` by `theta` about `pivot`, leaving `z` untouched.
pub(crate) fn rotate_points_z(points: &[Point3], theta: f64, pivot: [f64; 2]) -> Vec<Point3> {
    let (s, c) = theta.sin_cos();
    points
        .iter()
        .map(|p| {
            let x = p[0] - pivot[0];
            let y = p[1] - pivot[1];
            [c * x - s * y + pivot[0], s * x + c * y + pivot[1], p[2]]
        })
        .collect()
}

pub(crate) fn check_finite(v: &Point3, what: &str) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} {v:?} is not finite")))
    }
}
