//! Procedural stand-in objects (boxes, cylinders, spheres, tables, chairs,
//! shelves) for demos, benchmarks and tests when no real catalog is at hand.

use std::f64::consts::TAU;

use crate::geometry::{Point3, PointCloud};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Box,
    Cylinder,
    Sphere,
    Table,
    Chair,
    Shelf,
}

impl Shape {
    pub const ALL: [Shape; 6] = [
        Shape::Box,
        Shape::Cylinder,
        Shape::Sphere,
        Shape::Table,
        Shape::Chair,
        Shape::Shelf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Box => "box",
            Shape::Cylinder => "cylinder",
            Shape::Sphere => "sphere",
            Shape::Table => "table",
            Shape::Chair => "chair",
            Shape::Shelf => "shelf",
        }
    }
}

/// Samples `n` points on the surface of an axis-aligned box.
fn box_surface(out: &mut Vec<Point3>, rng: &mut Rng, origin: Point3, size: Point3, n: usize) {
    let [sx, sy, sz] = size;
    let faces = [sy * sz, sy * sz, sx * sz, sx * sz, sx * sy, sx * sy];
    let total: f64 = faces.iter().sum();
    for _ in 0..n {
        let mut t = rng.uniform() * total;
        let mut face = 5;
        for (k, a) in faces.iter().enumerate() {
            if t < *a {
                face = k;
                break;
            }
            t -= a;
        }
        let (u, v) = (rng.uniform(), rng.uniform());
        let p = match face {
            0 => [0.0, u * sy, v * sz],
            1 => [sx, u * sy, v * sz],
            2 => [u * sx, 0.0, v * sz],
            3 => [u * sx, sy, v * sz],
            4 => [u * sx, v * sy, 0.0],
            _ => [u * sx, v * sy, sz],
        };
        out.push([origin[0] + p[0], origin[1] + p[1], origin[2] + p[2]]);
    }
}

fn split(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut counts: Vec<usize> = weights
        .iter()
        .map(|w| ((w / total) * n as f64).floor() as usize)
        .collect();
    let used: usize = counts.iter().sum();
    counts[0] += n - used;
    counts
}

/// One random object of the given kind with exactly `n` points.
pub fn make_shape(shape: Shape, n: usize, rng: &mut Rng) -> PointCloud {
    let n = n.max(8);
    let mut pts = Vec::with_capacity(n);
    match shape {
        Shape::Box => {
            let size = [
                rng.uniform_range(0.3, 1.0),
                rng.uniform_range(0.3, 1.0),
                rng.uniform_range(0.2, 1.0),
            ];
            box_surface(&mut pts, rng, [0.0; 3], size, n);
        }
        Shape::Cylinder => {
            let r = rng.uniform_range(0.15, 0.5);
            let h = rng.uniform_range(0.3, 1.2);
            for _ in 0..n {
                let t = rng.uniform() * TAU;
                pts.push([r * t.cos(), r * t.sin(), rng.uniform() * h]);
            }
        }
        Shape::Sphere => {
            let r = rng.uniform_range(0.2, 0.5);
            for _ in 0..n {
                let z: f64 = rng.uniform_range(-1.0, 1.0);
                let t = rng.uniform() * TAU;
                let s = (1.0 - z * z).sqrt();
                pts.push([r * s * t.cos(), r * s * t.sin(), r * z]);
            }
        }
        Shape::Table => {
            let (w, d, h) = (
                rng.uniform_range(0.8, 1.6),
                rng.uniform_range(0.5, 1.0),
                rng.uniform_range(0.6, 0.8),
            );
            let leg = 0.05;
            let c = split(n, &[4.0, 1.0, 1.0, 1.0, 1.0]);
            box_surface(&mut pts, rng, [0.0, 0.0, h - 0.04], [w, d, 0.04], c[0]);
            for (k, (x, y)) in [
                (0.0, 0.0),
                (w - leg, 0.0),
                (0.0, d - leg),
                (w - leg, d - leg),
            ]
            .into_iter()
            .enumerate()
            {
                box_surface(&mut pts, rng, [x, y, 0.0], [leg, leg, h - 0.04], c[k + 1]);
            }
        }
        Shape::Chair => {
            let s = rng.uniform_range(0.4, 0.6);
            let seat = rng.uniform_range(0.4, 0.5);
            let back = rng.uniform_range(0.4, 0.6);
            let leg = 0.04;
            let c = split(n, &[3.0, 3.0, 0.5, 0.5, 0.5, 0.5]);
            box_surface(&mut pts, rng, [0.0, 0.0, seat - 0.04], [s, s, 0.04], c[0]);
            box_surface(&mut pts, rng, [0.0, s - 0.04, seat], [s, 0.04, back], c[1]);
            for (k, (x, y)) in [
                (0.0, 0.0),
                (s - leg, 0.0),
                (0.0, s - leg),
                (s - leg, s - leg),
            ]
            .into_iter()
            .enumerate()
            {
                box_surface(
                    &mut pts,
                    rng,
                    [x, y, 0.0],
                    [leg, leg, seat - 0.04],
                    c[k + 2],
                );
            }
        }
        Shape::Shelf => {
            let (w, d, h) = (
                rng.uniform_range(0.6, 1.2),
                rng.uniform_range(0.25, 0.4),
                rng.uniform_range(1.0, 1.9),
            );
            let boards = 4;
            let mut weights = vec![2.0, 2.0];
            weights.extend(std::iter::repeat_n(1.0, boards));
            let c = split(n, &weights);
            box_surface(&mut pts, rng, [0.0, 0.0, 0.0], [0.03, d, h], c[0]);
            box_surface(&mut pts, rng, [w - 0.03, 0.0, 0.0], [0.03, d, h], c[1]);
            for k in 0..boards {
                let z = (h - 0.03) * k as f64 / (boards - 1) as f64;
                box_surface(&mut pts, rng, [0.0, 0.0, z], [w, d, 0.03], c[k + 2]);
            }
        }
    }
    PointCloud::from_vec_unchecked(pts)
}

/// `count` objects cycling through every shape, `points` points each.
pub fn demo_catalog(count: usize, points: usize, seed: u64) -> Vec<PointCloud> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|i| make_shape(Shape::ALL[i % Shape::ALL.len()], points, &mut rng))
        .collect()
}
