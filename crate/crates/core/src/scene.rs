//! Scene assembly: confounders, scene-level augmentation, the fixed point
//! budget, and pairs of rooms built from one object set.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::seq::index;

use crate::augment::{
    augment_object_recorded, drop_indices, jitter_points, ObjectAugmentConfig, ObjectAugmentRecord,
};
use crate::error::{Error, Result};
use crate::geometry::{rotate_points_z, Point3, PointCloud};
use crate::layout::{generate_layout, Layout, LayoutConfig, Placement, RoomDims};
use crate::rng::{PairSeeds, Rng};

/// Label carried by floor and wall points.
pub const CONFOUNDER_LABEL: u32 = 0;

/// An object placed in a room.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneInstance {
    pub points: PointCloud,
    /// `source_index + 1`; 0 is reserved for confounders.
    pub instance_id: u32,
    pub placement: Placement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneAugmentConfig {
    pub rotation_enabled: bool,
    pub drop_ratio_max: f64,
    pub jitter_sigma: f64,
    pub jitter_clip: f64,
}

impl Default for SceneAugmentConfig {
    fn default() -> Self {
        Self {
            rotation_enabled: true,
            drop_ratio_max: 0.2,
            jitter_sigma: 0.01,
            jitter_clip: 0.05,
        }
    }
}

impl SceneAugmentConfig {
    /// No rotation, dropping or jitter.
    pub fn disabled() -> Self {
        Self {
            rotation_enabled: false,
            drop_ratio_max: 0.0,
            jitter_sigma: 0.0,
            jitter_clip: 0.0,
        }
    }
}

/// Everything needed to turn an object set into a pair of rooms.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub object: ObjectAugmentConfig,
    pub layout: LayoutConfig,
    pub scene: SceneAugmentConfig,
    /// Objects per pair drawn uniformly from `[min_objects, max_objects]`.
    pub min_objects: usize,
    pub max_objects: usize,
    pub floor_wall: bool,
    pub wall_height: f64,
    /// Confounder points per m².
    pub confounder_density: f64,
    pub point_budget: usize,
    /// Points an instance needs in both rooms to join the contrastive set.
    pub min_points: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            object: ObjectAugmentConfig::default(),
            layout: LayoutConfig::default(),
            scene: SceneAugmentConfig::default(),
            min_objects: 12,
            max_objects: 18,
            floor_wall: true,
            wall_height: 2.5,
            confounder_density: 500.0,
            point_budget: 40_000,
            min_points: 5,
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        self.object.validate()?;
        if self.layout.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if self.min_objects == 0 || self.min_objects > self.max_objects {
            return Err(Error::invalid(format!(
                "object count range [{}, {}] is empty",
                self.min_objects, self.max_objects
            )));
        }
        if self.point_budget == 0 {
            return Err(Error::invalid("point budget must be at least 1"));
        }
        if self.floor_wall && !(self.confounder_density > 0.0 && self.wall_height > 0.0) {
            return Err(Error::invalid(
                "confounder density and wall height must be positive",
            ));
        }
        let s = &self.scene;
        if !(0.0..1.0).contains(&s.drop_ratio_max) {
            return Err(Error::invalid("scene drop ratio must lie in [0, 1)"));
        }
        if !(s.jitter_sigma >= 0.0 && s.jitter_clip >= s.jitter_sigma) {
            return Err(Error::invalid("scene jitter needs clip >= sigma >= 0"));
        }
        Ok(())
    }
}

/// Parameters sampled while building one room, kept for replay and stats.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentationRecord {
    /// `(source index, sampled parameters)` in input order.
    pub objects: Vec<(usize, ObjectAugmentRecord)>,
    pub area_factor: f64,
    pub footprint_sum: f64,
    pub placed: usize,
    pub forced: usize,
    pub skipped: usize,
    pub scene_rotation: f64,
    pub scene_pivot: [f64; 2],
    pub scene_drop_ratio: f64,
    pub confounder_points: usize,
    /// Point count before subsampling to the budget.
    pub raw_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoomScene {
    pub points: PointCloud,
    pub labels: Vec<u32>,
    pub dims: RoomDims,
    pub seed: u64,
    pub record: AugmentationRecord,
}

impl RoomScene {
    /// Point count per nonzero label.
    pub fn instance_counts(&self) -> BTreeMap<u32, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.labels {
            if l != CONFOUNDER_LABEL {
                *m.entry(l).or_insert(0) += 1;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenePair {
    pub room_a: RoomScene,
    pub room_b: RoomScene,
    /// Ascending ids with at least `min_points` points in both rooms.
    pub shared_ids: Vec<u32>,
    /// Number of objects the pair was built from.
    pub object_count: usize,
}

/// Uniform samples on the floor rectangle and the four walls, labeled 0.
///
/// Coordinates are in the layout's centered frame: the room rectangle
/// `[0, a_m] × [0, b_m]` shifted by `-xy_offset`.
pub fn confounder_points(
    dims: RoomDims,
    density: f64,
    wall_height: f64,
    xy_offset: [f64; 2],
    rng: &mut Rng,
) -> Vec<Point3> {
    let (a, b) = (dims.a_m(), dims.b_m());
    let (ox, oy) = (xy_offset[0], xy_offset[1]);
    let count = |area: f64| (area * density).round() as usize;
    let mut pts = Vec::new();
    for _ in 0..count(a * b) {
        pts.push([rng.uniform() * a - ox, rng.uniform() * b - oy, 0.0]);
    }
    // walls at x = 0, x = a (length b) and y = 0, y = b (length a)
    for wall_x in [0.0, a] {
        for _ in 0..count(b * wall_height) {
            pts.push([
                wall_x - ox,
                rng.uniform() * b - oy,
                rng.uniform() * wall_height,
            ]);
        }
    }
    for wall_y in [0.0, b] {
        for _ in 0..count(a * wall_height) {
            pts.push([
                rng.uniform() * a - ox,
                wall_y - oy,
                rng.uniform() * wall_height,
            ]);
        }
    }
    pts
}

/// Concatenates instance points with floor/wall confounders.
pub fn add_floor_wall(
    instances: &[SceneInstance],
    dims: RoomDims,
    density: f64,
    wall_height: f64,
    xy_offset: [f64; 2],
    rng: &mut Rng,
) -> (Vec<Point3>, Vec<u32>) {
    let (mut points, mut labels) = flatten_instances(instances);
    let extra = confounder_points(dims, density, wall_height, xy_offset, rng);
    labels.resize(labels.len() + extra.len(), CONFOUNDER_LABEL);
    points.extend(extra);
    (points, labels)
}

pub fn flatten_instances(instances: &[SceneInstance]) -> (Vec<Point3>, Vec<u32>) {
    let n: usize = instances.iter().map(|i| i.points.len()).sum();
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for inst in instances {
        points.extend_from_slice(inst.points.points());
        labels.resize(labels.len() + inst.points.len(), inst.instance_id);
    }
    (points, labels)
}

/// Sampled scene-augmentation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SceneAugmentRecord {
    pub rotation: f64,
    pub pivot: [f64; 2],
    pub drop_ratio: f64,
}

/// Rotates the whole scene about its X-Y centroid, drops points and labels
/// jointly, then jitters.
pub fn scene_augment(
    points: Vec<Point3>,
    labels: Vec<u32>,
    rng: &mut Rng,
    cfg: &SceneAugmentConfig,
) -> Result<(Vec<Point3>, Vec<u32>, SceneAugmentRecord)> {
    check_aligned(&points, &labels)?;
    let mut rec = SceneAugmentRecord::default();
    let mut points = points;
    let mut labels = labels;
    if cfg.rotation_enabled {
        rec.rotation = rng.uniform_range(0.0, TAU);
        let n = points.len() as f64;
        let (sx, sy) = points
            .iter()
            .fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        rec.pivot = [sx / n, sy / n];
        points = rotate_points_z(&points, rec.rotation, rec.pivot);
    }
    rec.drop_ratio = rng.uniform_range(0.0, cfg.drop_ratio_max);
    let keep = drop_indices(points.len(), rng, rec.drop_ratio)?;
    if keep.len() != points.len() {
        points = keep.iter().map(|&i| points[i]).collect();
        labels = keep.iter().map(|&i| labels[i]).collect();
    }
    if !(cfg.jitter_sigma >= 0.0 && cfg.jitter_clip >= cfg.jitter_sigma) {
        return Err(Error::invalid("scene jitter needs clip >= sigma >= 0"));
    }
    jitter_points(&mut points, rng, cfg.jitter_sigma, cfg.jitter_clip);
    Ok((points, labels, rec))
}

/// Resamples to exactly `n_budget` points: without replacement when there
/// are enough, with replacement otherwise.
pub fn subsample(
    points: &[Point3],
    labels: &[u32],
    rng: &mut Rng,
    n_budget: usize,
) -> Result<(Vec<Point3>, Vec<u32>)> {
    check_aligned(points, labels)?;
    if n_budget == 0 {
        return Err(Error::invalid("point budget must be at least 1"));
    }
    let idx: Vec<usize> = if points.len() >= n_budget {
        let mut v = index::sample(rng, points.len(), n_budget).into_vec();
        v.sort_unstable();
        v
    } else {
        (0..n_budget).map(|_| rng.index(points.len())).collect()
    };
    Ok((
        idx.iter().map(|&i| points[i]).collect(),
        idx.iter().map(|&i| labels[i]).collect(),
    ))
}

fn check_aligned(points: &[Point3], labels: &[u32]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::invalid("scene has no points"));
    }
    if points.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        )));
    }
    Ok(())
}

/// Runs the whole single-room pipeline with a room-owned seed.
pub fn generate_room(objects: &[PointCloud], seed: u64, cfg: &SceneConfig) -> Result<RoomScene> {
    generate_room_with_layout(objects, seed, cfg).map(|(room, _)| room)
}

/// [`generate_room`], also returning the layout the room was built from.
pub fn generate_room_with_layout(
    objects: &[PointCloud],
    seed: u64,
    cfg: &SceneConfig,
) -> Result<(RoomScene, Layout)> {
    cfg.validate()?;
    let mut rng = Rng::new(seed);
    let mut record = AugmentationRecord::default();

    let mut augmented = Vec::with_capacity(objects.len());
    for (i, obj) in objects.iter().enumerate() {
        let (pc, rec) = augment_object_recorded(obj, &mut rng, &cfg.object)?;
        record.objects.push((i, rec));
        augmented.push(pc);
    }

    let layout = generate_layout(&augmented, &mut rng, &cfg.layout)?;
    record.area_factor = layout.sizing.area_factor;
    record.footprint_sum = layout.sizing.footprint_sum;
    record.placed = layout.instances.len();
    record.forced = layout.forced_count();
    record.skipped = layout.skipped.len();

    let (points, labels) = if cfg.floor_wall {
        add_floor_wall(
            &layout.instances,
            layout.dims(),
            cfg.confounder_density,
            cfg.wall_height,
            layout.xy_offset,
            &mut rng,
        )
    } else {
        flatten_instances(&layout.instances)
    };
    record.confounder_points = labels.iter().filter(|&&l| l == CONFOUNDER_LABEL).count();

    let (points, labels, srec) = scene_augment(points, labels, &mut rng, &cfg.scene)?;
    record.scene_rotation = srec.rotation;
    record.scene_pivot = srec.pivot;
    record.scene_drop_ratio = srec.drop_ratio;
    record.raw_points = points.len();

    let (points, labels) = subsample(&points, &labels, &mut rng, cfg.point_budget)?;
    let room = RoomScene {
        points: PointCloud::from_vec_unchecked(points),
        labels,
        dims: layout.dims(),
        seed,
        record,
    };
    Ok((room, layout))
}

/// Ids with at least `min_points` points in both rooms, ascending.
pub fn shared_ids(a: &RoomScene, b: &RoomScene, min_points: usize) -> Vec<u32> {
    let cb = b.instance_counts();
    a.instance_counts()
        .into_iter()
        .filter(|&(id, n)| n >= min_points && cb.get(&id).is_some_and(|&m| m >= min_points))
        .map(|(id, _)| id)
        .collect()
}

/// Builds two rooms from the same objects with the given room seeds.
pub fn generate_pair_with_seeds(
    objects: &[PointCloud],
    seed_a: u64,
    seed_b: u64,
    cfg: &SceneConfig,
) -> Result<ScenePair> {
    if objects.len() < 2 {
        return Err(Error::invalid(format!(
            "a pair needs at least 2 objects, got {}",
            objects.len()
        )));
    }
    let room_a = generate_room(objects, seed_a, cfg)?;
    let room_b = generate_room(objects, seed_b, cfg)?;
    let shared = shared_ids(&room_a, &room_b, cfg.min_points);
    if shared.is_empty() {
        return Err(Error::DegeneratePair(format!(
            "no instance has {} points in both rooms",
            cfg.min_points
        )));
    }
    Ok(ScenePair {
        room_a,
        room_b,
        shared_ids: shared,
        object_count: objects.len(),
    })
}

/// Builds two rooms from the same objects, child seeds drawn from `rng`.
pub fn generate_pair(
    objects: &[PointCloud],
    rng: &mut Rng,
    cfg: &SceneConfig,
) -> Result<ScenePair> {
    let seed_a = rng.next_seed();
    let seed_b = rng.next_seed();
    generate_pair_with_seeds(objects, seed_a, seed_b, cfg)
}

/// Picks `[min_objects, max_objects]` catalog indices; without replacement
/// when the catalog is large enough.
pub fn sample_object_set(
    catalog_len: usize,
    rng: &mut Rng,
    cfg: &SceneConfig,
) -> Result<Vec<usize>> {
    if catalog_len == 0 {
        return Err(Error::invalid("object catalog is empty"));
    }
    let n = rng.int_inclusive(cfg.min_objects as i64, cfg.max_objects as i64) as usize;
    if catalog_len >= n {
        Ok(index::sample(rng, catalog_len, n).into_vec())
    } else {
        Ok((0..n).map(|_| rng.index(catalog_len)).collect())
    }
}

/// Pair `pair_index` of a seed-addressed dataset drawn from `catalog`.
pub fn generate_catalog_pair(
    catalog: &[PointCloud],
    base_seed: u64,
    pair_index: u64,
    cfg: &SceneConfig,
) -> Result<ScenePair> {
    let seeds = PairSeeds::derive(base_seed, pair_index);
    let mut sel = Rng::new(seeds.select);
    let chosen = sample_object_set(catalog.len(), &mut sel, cfg)?;
    let objects: Vec<PointCloud> = chosen.iter().map(|&i| catalog[i].clone()).collect();
    generate_pair_with_seeds(&objects, seeds.room_a, seeds.room_b, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn instances(n: usize) -> Vec<SceneInstance> {
        let objs: Vec<PointCloud> = synth::demo_catalog(n, 256, 1);
        let mut rng = Rng::new(2);
        let aug: Vec<PointCloud> = objs
            .iter()
            .map(|o| {
                crate::augment::augment_object(o, &mut rng, &ObjectAugmentConfig::default())
                    .unwrap()
            })
            .collect();
        generate_layout(&aug, &mut rng, &LayoutConfig::default())
            .unwrap()
            .instances
    }

    #[test]
    fn floor_wall_counts() {
        let dims = RoomDims {
            a_cells: 200,
            b_cells: 200,
        };
        let pts = confounder_points(dims, 100.0, 2.5, [0.0, 0.0], &mut Rng::new(0));
        assert_eq!(pts.len(), 400 + 2000);
        let floor = pts.iter().filter(|p| p[2] == 0.0).count();
        assert!(floor >= 400);
        for p in &pts {
            assert!((0.0..=2.0).contains(&p[0]) && (0.0..=2.0).contains(&p[1]));
            assert!((0.0..=2.5).contains(&p[2]));
            let on_wall = p[0] == 0.0 || p[0] == 2.0 || p[1] == 0.0 || p[1] == 2.0;
            assert!(p[2] == 0.0 || on_wall);
        }
    }

    #[test]
    fn floor_wall_labels_are_zero() {
        let inst = instances(3);
        let dims = RoomDims {
            a_cells: 300,
            b_cells: 250,
        };
        let (pts, labels) = add_floor_wall(&inst, dims, 50.0, 2.5, [1.5, 1.25], &mut Rng::new(1));
        let n_obj: usize = inst.iter().map(|i| i.points.len()).sum();
        assert_eq!(pts.len(), labels.len());
        assert!(labels[n_obj..].iter().all(|&l| l == 0));
        assert!(labels[..n_obj].iter().all(|&l| l > 0));
        // shifted into the centered frame
        assert!(pts[n_obj..]
            .iter()
            .all(|p| p[0] >= -1.5 - 1e-12 && p[0] <= 1.5 + 1e-12));
    }

    #[test]
    fn scene_augment_identity_and_alignment() {
        let (pts, labels) = flatten_instances(&instances(4));
        let (p2, l2, _) = scene_augment(
            pts.clone(),
            labels.clone(),
            &mut Rng::new(3),
            &SceneAugmentConfig::disabled(),
        )
        .unwrap();
        assert_eq!((p2, l2), (pts.clone(), labels.clone()));

        let (p3, l3, rec) = scene_augment(
            pts.clone(),
            labels.clone(),
            &mut Rng::new(3),
            &SceneAugmentConfig::default(),
        )
        .unwrap();
        assert_eq!(p3.len(), l3.len());
        assert!(rec.rotation >= 0.0 && rec.rotation < TAU);

        // rotation alone keeps labels attached to the same points
        let rot = SceneAugmentConfig {
            rotation_enabled: true,
            ..SceneAugmentConfig::disabled()
        };
        let (p4, l4, rec) =
            scene_augment(pts.clone(), labels.clone(), &mut Rng::new(4), &rot).unwrap();
        assert_eq!(l4, labels);
        let back = rotate_points_z(&p4, -rec.rotation, rec.pivot);
        for (a, b) in back.iter().zip(&pts) {
            assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }

        assert!(scene_augment(
            pts,
            vec![1],
            &mut Rng::new(0),
            &SceneAugmentConfig::default()
        )
        .is_err());
    }

    #[test]
    fn subsample_contracts() {
        let pts: Vec<Point3> = (0..50_000).map(|i| [i as f64, 0.0, 0.0]).collect();
        let labels: Vec<u32> = (0..50_000).map(|i| (i % 7) as u32).collect();
        let (p, l) = subsample(&pts, &labels, &mut Rng::new(0), 40_000).unwrap();
        assert_eq!((p.len(), l.len()), (40_000, 40_000));
        let mut xs: Vec<u64> = p.iter().map(|q| q[0] as u64).collect();
        xs.dedup();
        assert_eq!(xs.len(), 40_000, "no duplicates without replacement");
        for (q, &lab) in p.iter().zip(&l) {
            assert_eq!(lab, (q[0] as u32) % 7);
        }

        let (p, _) = subsample(&pts[..15], &labels[..15], &mut Rng::new(0), 15).unwrap();
        let mut xs: Vec<u64> = p.iter().map(|q| q[0] as u64).collect();
        xs.sort();
        assert_eq!(xs, (0..15).collect::<Vec<u64>>());

        let (p, l) = subsample(&pts[..10], &labels[..10], &mut Rng::new(0), 15).unwrap();
        assert_eq!(p.len(), 15);
        for (q, &lab) in p.iter().zip(&l) {
            assert!(q[0] < 10.0);
            assert_eq!(lab, (q[0] as u32) % 7);
        }
        assert!(subsample(&[], &[], &mut Rng::new(0), 5).is_err());
    }

    fn small_cfg() -> SceneConfig {
        SceneConfig {
            point_budget: 4_000,
            confounder_density: 20.0,
            ..Default::default()
        }
    }

    #[test]
    fn pair_same_seed_is_identical() {
        let objs = synth::demo_catalog(6, 300, 3);
        let p = generate_pair_with_seeds(&objs, 5, 5, &small_cfg()).unwrap();
        assert_eq!(p.room_a, p.room_b);
        assert_eq!(p.shared_ids, (1..=6).collect::<Vec<u32>>());
    }

    #[test]
    fn pair_invariants() {
        let objs = synth::demo_catalog(8, 400, 4);
        let cfg = small_cfg();
        let p = generate_pair(&objs, &mut Rng::new(10), &cfg).unwrap();
        for room in [&p.room_a, &p.room_b] {
            assert_eq!(room.points.len(), cfg.point_budget);
            assert_eq!(room.labels.len(), cfg.point_budget);
            assert!(room.labels.iter().all(|&l| l <= 8));
            assert!(room.labels.contains(&0));
        }
        for id in &p.shared_ids {
            assert!(p.room_a.instance_counts()[id] >= cfg.min_points);
            assert!(p.room_b.instance_counts()[id] >= cfg.min_points);
        }
        assert_ne!(p.room_a.seed, p.room_b.seed);
        let again = generate_pair(&objs, &mut Rng::new(10), &cfg).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn no_floor_wall_means_no_zero_label() {
        let objs = synth::demo_catalog(5, 300, 5);
        let cfg = SceneConfig {
            floor_wall: false,
            ..small_cfg()
        };
        let room = generate_room(&objs, 3, &cfg).unwrap();
        assert!(!room.labels.contains(&0));
        assert_eq!(room.record.confounder_points, 0);
    }

    #[test]
    fn pair_needs_two_objects() {
        let objs = synth::demo_catalog(1, 100, 0);
        assert!(matches!(
            generate_pair(&objs, &mut Rng::new(0), &small_cfg()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn degenerate_pair_detected() {
        let objs = synth::demo_catalog(3, 100, 0);
        let cfg = SceneConfig {
            min_points: 1_000_000,
            ..small_cfg()
        };
        assert!(matches!(
            generate_pair_with_seeds(&objs, 1, 2, &cfg),
            Err(Error::DegeneratePair(_))
        ));
    }

    #[test]
    fn object_set_sizes() {
        let cfg = SceneConfig::default();
        let mut rng = Rng::new(0);
        for _ in 0..200 {
            let s = sample_object_set(100, &mut rng, &cfg).unwrap();
            assert!((12..=18).contains(&s.len()));
            let mut d = s.clone();
            d.sort();
            d.dedup();
            assert_eq!(d.len(), s.len());
            let s = sample_object_set(5, &mut rng, &cfg).unwrap();
            assert!((12..=18).contains(&s.len()) && s.iter().all(|&i| i < 5));
        }
    }
}
