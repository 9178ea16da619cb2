//! Seed-addressed, parallel dataset generation and container assembly.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::PointCloud;
use crate::io::config::RunConfig;
use crate::io::container::{SceneContainer, StoredPair, FORMAT_VERSION};
use crate::scene::{generate_catalog_pair, SceneConfig, ScenePair};
use crate::stats::{PairSummary, RoomSummary};

/// Generates pairs `0..count` in parallel. Pair `k` depends only on
/// `(catalog, base_seed, k, cfg)`, so the result is independent of thread
/// count and scheduling.
pub fn generate_pairs(
    catalog: &[PointCloud],
    count: usize,
    base_seed: u64,
    cfg: &SceneConfig,
) -> Result<Vec<ScenePair>> {
    cfg.validate()?;
    (0..count as u64)
        .into_par_iter()
        .map(|k| generate_catalog_pair(catalog, base_seed, k, cfg))
        .collect()
}

fn room_key(pair: usize, room: usize) -> String {
    format!("pair.{pair}.{}", if room == 0 { "a" } else { "b" })
}

/// Effective config followed by per-room generation notes.
pub fn container_metadata(pairs: &[ScenePair], run: &RunConfig) -> String {
    let mut s = run.to_text();
    for (k, p) in pairs.iter().enumerate() {
        for (r, room) in [&p.room_a, &p.room_b].into_iter().enumerate() {
            let key = room_key(k, r);
            let rec = &room.record;
            let _ = writeln!(s, "{key}.objects = {}", p.object_count);
            let _ = writeln!(s, "{key}.placed = {}", rec.placed);
            let _ = writeln!(s, "{key}.forced = {}", rec.forced);
            let _ = writeln!(s, "{key}.footprint_sum = {}", rec.footprint_sum);
        }
    }
    s
}

pub fn build_container(pairs: &[ScenePair], base_seed: u64, run: &RunConfig) -> SceneContainer {
    SceneContainer {
        version: FORMAT_VERSION,
        point_budget: run.scene.point_budget as u32,
        base_seed,
        pairs: pairs
            .iter()
            .enumerate()
            .map(|(k, p)| StoredPair::from_pair(k as u32, p))
            .collect(),
        metadata: container_metadata(pairs, run),
    }
}

/// Rebuilds stats inputs from a container. Generation notes come from the
/// metadata block; rooms without notes fall back to what the labels show.
pub fn summaries_from_container(c: &SceneContainer) -> Vec<PairSummary> {
    let meta = c.metadata_map();
    let get = |key: String| meta.get(&key).and_then(|v| v.parse::<f64>().ok());
    c.pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let rooms: Vec<RoomSummary> = p
                .rooms
                .iter()
                .enumerate()
                .map(|(r, room)| {
                    let key = room_key(k, r);
                    let counts = room.instance_counts();
                    let seen = counts.len();
                    RoomSummary {
                        object_count: get(format!("{key}.objects")).map_or(seen, |v| v as usize),
                        placed: get(format!("{key}.placed")).map_or(seen, |v| v as usize),
                        forced: get(format!("{key}.forced")).map_or(0, |v| v as usize),
                        area_m2: room.area_m2(),
                        footprint_sum: get(format!("{key}.footprint_sum")).unwrap_or(0.0),
                        instance_points: counts,
                    }
                })
                .collect();
            let object_count = rooms[0].object_count;
            let [a, b]: [RoomSummary; 2] = rooms.try_into().expect("two rooms");
            PairSummary {
                rooms: [a, b],
                object_count,
                shared: p.shared_ids.len(),
            }
        })
        .collect()
}
