//! Tetris-style room layout.
//!
//! Objects are sized into a rectangular room whose area scales with the total
//! object footprint, then dropped one by one (largest footprint first) onto a
//! centimeter height map. A candidate position is accepted when the current
//! surface under the footprint is bare floor, or low enough to stack on
//! without exceeding the height cap. Objects rest on the highest cell under
//! their footprint.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::geometry::{translate_points, PointCloud};
use crate::rng::{sample_beta_half, Rng};
use crate::scene::SceneInstance;

/// Height-map cells per meter.
pub const CELLS_PER_METER: f64 = 100.0;
/// A stacked object's top must stay below this height, meters.
pub const HEIGHT_CAP: f64 = 2.0;
/// Objects are only stacked onto surfaces lower than this, meters.
pub const STACK_LIMIT: f64 = 0.5;
/// Surfaces lower than this count as bare floor, meters.
pub const FLOOR_EPS: f64 = 1e-3;

/// How the footprint cells are updated after a placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightUpdate {
    /// Every footprint cell becomes the object's top (`base_z + z`).
    TopSurface,
    /// Every footprint cell grows by `z`, as in the reference pseudo-code.
    /// Over uneven footprints this can leave cells below the object's top,
    /// so later objects may intersect it.
    Additive,
}

/// What to do when no candidate passes the acceptance test within `max_iter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedPolicy {
    /// Place at the last sampled position and mark the placement forced.
    Keep,
    /// Leave the object out of the room.
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub max_iter: usize,
    /// Place objects in descending footprint-area order; input order otherwise.
    pub sort_by_area: bool,
    pub height_update: HeightUpdate,
    pub forced_policy: ForcedPolicy,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            sort_by_area: true,
            height_update: HeightUpdate::TopSurface,
            forced_policy: ForcedPolicy::Keep,
        }
    }
}

/// Room floor plan in centimeter cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoomDims {
    pub a_cells: u32,
    pub b_cells: u32,
}

impl RoomDims {
    pub fn a_m(&self) -> f64 {
        self.a_cells as f64 / CELLS_PER_METER
    }

    pub fn b_m(&self) -> f64 {
        self.b_cells as f64 / CELLS_PER_METER
    }

    pub fn area_m2(&self) -> f64 {
        self.a_m() * self.b_m()
    }
}

/// Room dimensions plus the quantities that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomSizing {
    pub dims: RoomDims,
    /// Sum of object footprint areas, m².
    pub footprint_sum: f64,
    /// Random factor in `[0.6, 1.0)`.
    pub area_factor: f64,
    /// Target floor area in cm².
    pub overall_area: f64,
}

/// Evaluates the room-sizing formula for a given factor and side length.
pub fn room_sizing_from(footprint_sum: f64, area_factor: f64, a_cells: u32) -> Result<RoomSizing> {
    if a_cells == 0 {
        return Err(Error::invalid("room side must be at least one cell"));
    }
    let overall_area = footprint_sum * 2.0 * 10_000.0 * area_factor;
    let b_cells = (overall_area.floor() as u64 / a_cells as u64) as u32;
    if b_cells == 0 {
        return Err(Error::invalid(format!(
            "room area {overall_area} cm² too small for a side of {a_cells} cells"
        )));
    }
    Ok(RoomSizing {
        dims: RoomDims { a_cells, b_cells },
        footprint_sum,
        area_factor,
        overall_area,
    })
}

/// Draws room dimensions from the total footprint area (m²).
pub fn compute_room_dims(areas: &[f64], rng: &mut Rng) -> Result<RoomSizing> {
    let sum: f64 = areas.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return Err(Error::invalid(format!(
            "total footprint area {sum} must be positive"
        )));
    }
    let area_factor = rng.uniform() * 0.4 + 0.6;
    let overall_area = sum * 2.0 * 10_000.0 * area_factor;
    let side = overall_area.sqrt();
    let lo = ((side * 0.75) as i64).max(1);
    let hi = ((side * 1.25) as i64).max(lo);
    let a_cells = rng.int_inclusive(lo, hi) as u32;
    room_sizing_from(sum, area_factor, a_cells)
}

/// Centimeter height map, `a × b` cells, row-major along `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap {
    a: usize,
    b: usize,
    cells: Vec<f64>,
}

/// Half-open cell rectangle covered by a footprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRect {
    pub x: Range<usize>,
    pub y: Range<usize>,
}

impl CellRect {
    pub fn intersects(&self, other: &CellRect) -> bool {
        self.x.start < other.x.end
            && other.x.start < self.x.end
            && self.y.start < other.y.end
            && other.y.start < self.y.end
    }

    pub fn cell_count(&self) -> usize {
        self.x.len() * self.y.len()
    }
}

fn cell_span(pos: f64, extent: f64, cells: usize) -> Range<usize> {
    let start = ((pos * CELLS_PER_METER) as usize).min(cells - 1);
    let end = (((pos + extent) * CELLS_PER_METER) as usize).clamp(start + 1, cells);
    start..end
}

impl HeightMap {
    pub fn new(dims: RoomDims) -> Self {
        let (a, b) = (dims.a_cells as usize, dims.b_cells as usize);
        Self {
            a,
            b,
            cells: vec![0.0; a * b],
        }
    }

    pub fn dims(&self) -> RoomDims {
        RoomDims {
            a_cells: self.a as u32,
            b_cells: self.b as u32,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.b + j]
    }

    /// Sets every cell of `rect` to `h`.
    pub fn fill(&mut self, rect: &CellRect, h: f64) {
        for i in rect.x.clone() {
            self.cells[i * self.b + rect.y.start..i * self.b + rect.y.end].fill(h);
        }
    }

    /// Cells covered by an object at `(pos_x, pos_y)` with extents `(x, y)`.
    ///
    /// `[⌊pos·100⌋, ⌊(pos+extent)·100⌋)` per axis, widened to one cell when a
    /// footprint is thinner than a centimeter.
    pub fn footprint(&self, pos_x: f64, pos_y: f64, x: f64, y: f64) -> CellRect {
        CellRect {
            x: cell_span(pos_x, x, self.a),
            y: cell_span(pos_y, y, self.b),
        }
    }

    pub fn max_over(&self, rect: &CellRect) -> f64 {
        let mut m = 0.0f64;
        for i in rect.x.clone() {
            for &h in &self.cells[i * self.b + rect.y.start..i * self.b + rect.y.end] {
                m = m.max(h);
            }
        }
        m
    }

    pub fn raise(&mut self, rect: &CellRect, base_z: f64, z: f64, mode: HeightUpdate) {
        let top = base_z + z;
        for i in rect.x.clone() {
            for h in &mut self.cells[i * self.b + rect.y.start..i * self.b + rect.y.end] {
                *h = match mode {
                    HeightUpdate::TopSurface => top,
                    HeightUpdate::Additive => *h + z,
                };
            }
        }
    }

    pub fn max_height(&self) -> f64 {
        self.cells.iter().copied().fold(0.0, f64::max)
    }
}

/// Whether an object of height `z` may rest on a surface at `max_height`.
pub fn accepts(max_height: f64, z: f64) -> bool {
    (max_height + z < HEIGHT_CAP && max_height < STACK_LIMIT) || max_height < FLOOR_EPS
}

/// Where one object ended up.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// Position in placement order.
    pub object_index: usize,
    /// Position in the input object list.
    pub source_index: usize,
    /// `(pos_x, pos_y, base_z)` in room coordinates, meters.
    pub position: [f64; 3],
    /// Bounding-box extents `(x, y, z)`, meters.
    pub footprint: [f64; 3],
    pub cells: CellRect,
    /// Accepted only because the retry budget ran out.
    pub forced: bool,
    pub attempts: usize,
}

/// Drops one object of extents `size` onto the height map.
///
/// The returned placement has `object_index` and `source_index` set to zero;
/// [`generate_layout`] fills them in.
pub fn place_object(
    hm: &mut HeightMap,
    size: [f64; 3],
    rng: &mut Rng,
    max_iter: usize,
    update: HeightUpdate,
) -> Result<Placement> {
    let spot = find_spot(hm, size, rng, max_iter)?;
    hm.raise(&spot.cells, spot.position[2], size[2], update);
    Ok(spot)
}

fn find_spot(hm: &HeightMap, size: [f64; 3], rng: &mut Rng, max_iter: usize) -> Result<Placement> {
    let [x, y, z] = size;
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    if !(z > 0.0) || !(x >= 0.0) || !(y >= 0.0) {
        return Err(Error::invalid(format!(
            "object size {size:?} must be positive"
        )));
    }
    let dims = hm.dims();
    let (a_m, b_m) = (dims.a_m(), dims.b_m());
    if x > a_m || y > b_m {
        return Err(Error::DoesNotFit {
            x,
            y,
            room_x: a_m,
            room_y: b_m,
        });
    }
    let mut last = None;
    for attempt in 1..=max_iter {
        let pos_x = sample_beta_half(rng) * (a_m - x);
        let pos_y = sample_beta_half(rng) * (b_m - y);
        let cells = hm.footprint(pos_x, pos_y, x, y);
        let max_height = hm.max_over(&cells);
        let accepted = accepts(max_height, z);
        let p = Placement {
            object_index: 0,
            source_index: 0,
            position: [pos_x, pos_y, max_height],
            footprint: size,
            cells,
            forced: !accepted,
            attempts: attempt,
        };
        if accepted {
            return Ok(p);
        }
        last = Some(p);
    }
    Ok(last.expect("max_iter >= 1"))
}

/// Orders objects by descending footprint area, ties by input position.
///
/// Returns the reordered objects, their source indices and their areas.
pub fn sort_by_area(objects: &[PointCloud]) -> Result<(Vec<PointCloud>, Vec<usize>, Vec<f64>)> {
    if objects.is_empty() {
        return Err(Error::invalid("no objects to sort"));
    }
    let areas: Vec<f64> = objects.iter().map(|o| o.aabb().footprint_area()).collect();
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by(|&i, &j| areas[j].total_cmp(&areas[i]).then(i.cmp(&j)));
    Ok((
        order.iter().map(|&i| objects[i].clone()).collect(),
        order.clone(),
        order.iter().map(|&i| areas[i]).collect(),
    ))
}

/// A generated room before confounders and scene augmentation.
#[derive(Debug, Clone)]
pub struct Layout {
    /// Placed objects in placement order, X-Y centered.
    pub instances: Vec<SceneInstance>,
    pub sizing: RoomSizing,
    pub height_map: HeightMap,
    /// Amount subtracted from X and Y to center the objects.
    pub xy_offset: [f64; 2],
    /// Source indices left out under [`ForcedPolicy::Skip`].
    pub skipped: Vec<usize>,
    /// Room-size draws rejected because the largest object did not fit.
    pub resized_rooms: usize,
}

impl Layout {
    pub fn dims(&self) -> RoomDims {
        self.sizing.dims
    }

    pub fn forced_count(&self) -> usize {
        self.instances.iter().filter(|i| i.placement.forced).count()
    }
}

/// Bounded number of room-size redraws when an object is too long for the
/// sampled floor plan.
const ROOM_DRAWS: usize = 64;

/// Places every object (already augmented, anchored at the origin) into a
/// freshly sized room.
pub fn generate_layout(
    objects: &[PointCloud],
    rng: &mut Rng,
    cfg: &LayoutConfig,
) -> Result<Layout> {
    let (ordered, source, areas) = if cfg.sort_by_area {
        sort_by_area(objects)?
    } else {
        if objects.is_empty() {
            return Err(Error::invalid("no objects to place"));
        }
        (
            objects.to_vec(),
            (0..objects.len()).collect(),
            objects.iter().map(|o| o.aabb().footprint_area()).collect(),
        )
    };
    let sizes: Vec<[f64; 3]> = ordered.iter().map(|o| o.aabb().extent()).collect();

    let mut resized_rooms = 0;
    let sizing = loop {
        let s = compute_room_dims(&areas, rng)?;
        let fits = sizes
            .iter()
            .all(|e| e[0] <= s.dims.a_m() && e[1] <= s.dims.b_m());
        if fits {
            break s;
        }
        resized_rooms += 1;
        if resized_rooms >= ROOM_DRAWS {
            let e = sizes
                .iter()
                .find(|e| e[0] > s.dims.a_m() || e[1] > s.dims.b_m())
                .copied()
                .unwrap_or_default();
            return Err(Error::DoesNotFit {
                x: e[0],
                y: e[1],
                room_x: s.dims.a_m(),
                room_y: s.dims.b_m(),
            });
        }
    };

    let mut hm = HeightMap::new(sizing.dims);
    let mut instances = Vec::with_capacity(ordered.len());
    let mut skipped = Vec::new();
    for (k, obj) in ordered.iter().enumerate() {
        let mut p = find_spot(&hm, sizes[k], rng, cfg.max_iter)?;
        if p.forced && cfg.forced_policy == ForcedPolicy::Skip {
            skipped.push(source[k]);
            continue;
        }
        hm.raise(&p.cells, p.position[2], sizes[k][2], cfg.height_update);
        p.object_index = instances.len();
        p.source_index = source[k];
        let points = PointCloud::from_vec_unchecked(translate_points(obj.points(), p.position));
        instances.push(SceneInstance {
            points,
            instance_id: source[k] as u32 + 1,
            placement: p,
        });
    }
    if instances.is_empty() {
        return Err(Error::invalid("every object was skipped"));
    }

    let mut sum = [0.0f64; 2];
    let mut n = 0usize;
    for inst in &instances {
        for p in inst.points.points() {
            sum[0] += p[0];
            sum[1] += p[1];
        }
        n += inst.points.len();
    }
    let xy_offset = [sum[0] / n as f64, sum[1] / n as f64];
    for inst in &mut instances {
        inst.points = PointCloud::from_vec_unchecked(translate_points(
            inst.points.points(),
            [-xy_offset[0], -xy_offset[1], 0.0],
        ));
    }

    Ok(Layout {
        instances,
        sizing,
        height_map: hm,
        xy_offset,
        skipped,
        resized_rooms,
    })
}

/// Outcome of replaying a layout's placements on an empty height map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LayoutAudit {
    pub placements: usize,
    pub forced: usize,
    /// Non-forced objects whose base is not the footprint maximum.
    pub gravity_violations: usize,
    /// Non-forced objects whose base fails the acceptance test.
    pub predicate_violations: usize,
    /// Pairs of objects sharing a cell with intersecting vertical intervals.
    pub overlaps: usize,
    /// Consecutive placements with increasing footprint area.
    pub order_violations: usize,
}

impl LayoutAudit {
    pub fn is_clean(&self) -> bool {
        self.gravity_violations == 0
            && self.predicate_violations == 0
            && self.overlaps == 0
            && self.order_violations == 0
    }
}

/// Replays placements in order and checks gravity, the acceptance test,
/// per-cell vertical disjointness and (when `sorted`) descending area.
pub fn audit_layout(layout: &Layout, update: HeightUpdate, sorted: bool) -> LayoutAudit {
    let mut hm = HeightMap::new(layout.dims());
    let mut audit = LayoutAudit::default();
    let placements: Vec<&Placement> = layout.instances.iter().map(|i| &i.placement).collect();
    for (k, p) in placements.iter().enumerate() {
        audit.placements += 1;
        let [_, _, base] = p.position;
        let z = p.footprint[2];
        if p.forced {
            audit.forced += 1;
        } else {
            if hm.max_over(&p.cells) != base {
                audit.gravity_violations += 1;
            }
            if !accepts(base, z) {
                audit.predicate_violations += 1;
            }
        }
        for q in &placements[..k] {
            if q.cells.intersects(&p.cells) {
                let (qb, qt) = (q.position[2], q.position[2] + q.footprint[2]);
                let (pb, pt) = (base, base + z);
                if pb < qt && qb < pt {
                    audit.overlaps += 1;
                }
            }
        }
        if sorted && k > 0 {
            let prev = placements[k - 1].footprint;
            if p.footprint[0] * p.footprint[1] > prev[0] * prev[1] {
                audit.order_violations += 1;
            }
        }
        hm.raise(&p.cells, base, z, update);
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(a: u32, b: u32) -> RoomDims {
        RoomDims {
            a_cells: a,
            b_cells: b,
        }
    }

    fn box_cloud(x: f64, y: f64, z: f64) -> PointCloud {
        let mut pts = Vec::new();
        for i in 0..=4 {
            for j in 0..=4 {
                for k in 0..=4 {
                    pts.push([x * i as f64 / 4.0, y * j as f64 / 4.0, z * k as f64 / 4.0]);
                }
            }
        }
        PointCloud::new(pts).unwrap()
    }

    #[test]
    fn sort_examples() {
        let objs = [
            box_cloud(1.0, 1.0, 1.0),
            box_cloud(2.0, 2.0, 1.0),
            box_cloud(2.0, 1.0, 1.0),
        ];
        let (_, src, areas) = sort_by_area(&objs).unwrap();
        assert_eq!(src, vec![1, 2, 0]);
        assert_eq!(areas, vec![4.0, 2.0, 1.0]);

        let objs = [box_cloud(2.0, 1.0, 1.0), box_cloud(1.0, 2.0, 0.5)];
        assert_eq!(sort_by_area(&objs).unwrap().1, vec![0, 1]);

        let (o, src, _) = sort_by_area(&objs[..1]).unwrap();
        assert_eq!((o.len(), src), (1, vec![0]));
        assert!(sort_by_area(&[]).is_err());
    }

    #[test]
    fn sizing_examples() {
        let s = room_sizing_from(3.0, 1.0, 245).unwrap();
        assert_eq!(s.overall_area, 60_000.0);
        assert_eq!(s.dims, dims(245, 244));
        assert!((s.dims.a_m() - 2.45).abs() < 1e-12 && (s.dims.b_m() - 2.44).abs() < 1e-12);

        let s = room_sizing_from(3.0, 0.6, 200).unwrap();
        assert!((s.overall_area - 36_000.0).abs() < 1e-9);

        assert!(compute_room_dims(&[0.0, 0.0], &mut Rng::new(0)).is_err());
        assert!(compute_room_dims(&[], &mut Rng::new(0)).is_err());
    }

    #[test]
    fn sizing_bounds_hold_for_random_draws() {
        let mut rng = Rng::new(9);
        for k in 0..2000 {
            let areas = vec![0.25 + (k % 17) as f64 * 0.2; 1 + k % 18];
            let s = compute_room_dims(&areas, &mut rng).unwrap();
            let (a, b) = (s.dims.a_cells as f64, s.dims.b_cells as f64);
            assert!(a * b <= s.overall_area && s.overall_area < a * (b + 1.0));
            assert!((0.6..1.0).contains(&s.area_factor));
            let side = s.overall_area.sqrt();
            assert!(a >= (0.75 * side).floor() && a <= (1.25 * side).floor());
        }
    }

    #[test]
    fn place_on_empty_map() {
        let mut hm = HeightMap::new(dims(300, 300));
        let mut rng = Rng::new(1);
        let p = place_object(
            &mut hm,
            [1.0, 0.5, 0.7],
            &mut rng,
            100,
            HeightUpdate::TopSurface,
        )
        .unwrap();
        assert_eq!(p.position[2], 0.0);
        assert!(!p.forced);
        assert_eq!(p.attempts, 1);
        assert!(p.position[0] >= 0.0 && p.position[0] <= 2.0);
        assert!(p.position[1] >= 0.0 && p.position[1] <= 2.5);
        assert!((hm.max_height() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn place_on_low_plateau() {
        let mut hm = HeightMap::new(dims(200, 200));
        hm.fill(
            &CellRect {
                x: 0..200,
                y: 0..200,
            },
            0.4,
        );
        let p = place_object(
            &mut hm,
            [0.5, 0.5, 1.0],
            &mut Rng::new(2),
            100,
            HeightUpdate::TopSurface,
        )
        .unwrap();
        assert_eq!(p.position[2], 0.4);
        assert!(!p.forced);
        assert_eq!(hm.max_over(&p.cells), 0.4 + 1.0);
    }

    #[test]
    fn forced_on_high_plateau() {
        let mut hm = HeightMap::new(dims(200, 200));
        hm.fill(
            &CellRect {
                x: 0..200,
                y: 0..200,
            },
            0.6,
        );
        let p = place_object(
            &mut hm,
            [0.5, 0.5, 0.5],
            &mut Rng::new(3),
            5,
            HeightUpdate::TopSurface,
        )
        .unwrap();
        assert!(p.forced);
        assert_eq!(p.attempts, 5);
        assert_eq!(p.position[2], 0.6);
    }

    #[test]
    fn too_large_object() {
        let mut hm = HeightMap::new(dims(100, 100));
        let r = place_object(
            &mut hm,
            [1.5, 0.5, 0.5],
            &mut Rng::new(0),
            10,
            HeightUpdate::TopSurface,
        );
        assert!(matches!(r, Err(Error::DoesNotFit { .. })));
    }

    #[test]
    fn footprint_slicing() {
        let hm = HeightMap::new(dims(250, 120));
        let r = hm.footprint(0.123, 0.5, 1.0, 0.2);
        assert_eq!(r.x, 12..112);
        assert_eq!(r.y, 50..70);
        // sub-centimeter sliver still covers one cell
        let r = hm.footprint(1.0, 0.0, 0.001, 0.001);
        assert_eq!((r.x, r.y), (100..101, 0..1));
        // far edge clamps to the map
        let r = hm.footprint(1.5, 0.2, 1.0, 1.0);
        assert_eq!((r.x, r.y), (150..250, 20..120));
    }

    #[test]
    fn additive_update_can_overlap() {
        // Object A occupies cell 1 only, B bridges cells 0..2 on top of A,
        // then C lands on cell 0 which additive update left below B's top.
        let mut hm = HeightMap::new(dims(3, 1));
        let a = CellRect { x: 1..2, y: 0..1 };
        hm.raise(&a, 0.0, 0.4, HeightUpdate::Additive);
        let b = CellRect { x: 0..2, y: 0..1 };
        let b_base = hm.max_over(&b);
        hm.raise(&b, b_base, 0.3, HeightUpdate::Additive);
        let c = CellRect { x: 0..1, y: 0..1 };
        let c_base = hm.max_over(&c);
        assert!((c_base - 0.3).abs() < 1e-12);
        // C with height 0.5 spans [0.3, 0.8], B spans [0.4, 0.7] at cell 0.
        assert!(c_base < b_base + 0.3 && b_base < c_base + 0.5);

        let mut hm = HeightMap::new(dims(3, 1));
        hm.raise(&a, 0.0, 0.4, HeightUpdate::TopSurface);
        let b_base = hm.max_over(&b);
        hm.raise(&b, b_base, 0.3, HeightUpdate::TopSurface);
        assert_eq!(hm.max_over(&c), b_base + 0.3);
    }

    #[test]
    fn single_object_layout() {
        let objs = [box_cloud(0.8, 0.8, 0.8)];
        let layout = generate_layout(&objs, &mut Rng::new(4), &LayoutConfig::default()).unwrap();
        assert_eq!(layout.instances.len(), 1);
        let inst = &layout.instances[0];
        assert_eq!(inst.instance_id, 1);
        assert_eq!(inst.placement.position[2], 0.0);
        let n = inst.points.len() as f64;
        let cx = inst.points.points().iter().map(|p| p[0]).sum::<f64>() / n;
        let cy = inst.points.points().iter().map(|p| p[1]).sum::<f64>() / n;
        assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9);
    }

    #[test]
    fn layout_audit_and_determinism() {
        let objs: Vec<PointCloud> = (0..15)
            .map(|k| {
                box_cloud(
                    0.5 + 0.1 * k as f64,
                    0.6 + 0.05 * k as f64,
                    0.3 + 0.1 * (k % 5) as f64,
                )
            })
            .collect();
        let cfg = LayoutConfig::default();
        for seed in 0..50 {
            let l = generate_layout(&objs, &mut Rng::new(seed), &cfg).unwrap();
            let audit = audit_layout(&l, cfg.height_update, true);
            assert!(audit.is_clean(), "seed {seed}: {audit:?}");
            let (a, b) = (l.dims().a_cells as f64, l.dims().b_cells as f64);
            assert!(a * b <= l.sizing.overall_area);
            let mut ids: Vec<u32> = l.instances.iter().map(|i| i.instance_id).collect();
            ids.sort();
            assert_eq!(ids, (1..=15).collect::<Vec<u32>>());
        }
        let l1 = generate_layout(&objs, &mut Rng::new(77), &cfg).unwrap();
        let l2 = generate_layout(&objs, &mut Rng::new(77), &cfg).unwrap();
        assert_eq!(l1.instances, l2.instances);
        assert_eq!(l1.height_map, l2.height_map);
    }

    #[test]
    fn unsorted_keeps_input_order() {
        let objs = [
            box_cloud(0.5, 0.5, 0.5),
            box_cloud(1.5, 1.5, 0.5),
            box_cloud(1.0, 1.0, 0.5),
        ];
        let cfg = LayoutConfig {
            sort_by_area: false,
            ..Default::default()
        };
        let l = generate_layout(&objs, &mut Rng::new(5), &cfg).unwrap();
        let src: Vec<usize> = l
            .instances
            .iter()
            .map(|i| i.placement.source_index)
            .collect();
        assert_eq!(src, vec![0, 1, 2]);
        let l = generate_layout(&objs, &mut Rng::new(5), &LayoutConfig::default()).unwrap();
        let src: Vec<usize> = l
            .instances
            .iter()
            .map(|i| i.placement.source_index)
            .collect();
        assert_eq!(src, vec![1, 2, 0]);
    }

    #[test]
    fn skip_policy_drops_forced_objects() {
        // many tall objects in a cramped room force fallbacks
        let objs: Vec<PointCloud> = (0..18).map(|_| box_cloud(1.0, 1.0, 1.9)).collect();
        let keep = LayoutConfig {
            max_iter: 1,
            ..Default::default()
        };
        let skip = LayoutConfig {
            forced_policy: ForcedPolicy::Skip,
            ..keep.clone()
        };
        let mut saw_skip = false;
        for seed in 0..20 {
            let lk = generate_layout(&objs, &mut Rng::new(seed), &keep).unwrap();
            let ls = generate_layout(&objs, &mut Rng::new(seed), &skip).unwrap();
            assert_eq!(ls.forced_count(), 0);
            assert_eq!(ls.instances.len() + ls.skipped.len(), 18);
            if lk.forced_count() > 0 {
                saw_skip |= !ls.skipped.is_empty();
            }
        }
        assert!(saw_skip);
    }
}
