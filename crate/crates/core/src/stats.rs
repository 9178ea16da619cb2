//! Dataset summary statistics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scene::{RoomScene, ScenePair};

/// What the report needs from one room.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomSummary {
    pub object_count: usize,
    pub placed: usize,
    pub forced: usize,
    pub area_m2: f64,
    pub footprint_sum: f64,
    pub instance_points: BTreeMap<u32, usize>,
}

impl RoomSummary {
    pub fn from_room(room: &RoomScene, object_count: usize) -> Self {
        Self {
            object_count,
            placed: room.record.placed,
            forced: room.record.forced,
            area_m2: room.dims.area_m2(),
            footprint_sum: room.record.footprint_sum,
            instance_points: room.instance_counts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSummary {
    pub rooms: [RoomSummary; 2],
    pub object_count: usize,
    pub shared: usize,
}

impl PairSummary {
    pub fn from_pair(pair: &ScenePair) -> Self {
        Self {
            rooms: [
                RoomSummary::from_room(&pair.room_a, pair.object_count),
                RoomSummary::from_room(&pair.room_b, pair.object_count),
            ],
            object_count: pair.object_count,
            shared: pair.shared_ids.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let mut n = 0usize;
        let mut s = Summary {
            min: f64::INFINITY,
            mean: 0.0,
            max: f64::NEG_INFINITY,
        };
        for v in values {
            n += 1;
            s.min = s.min.min(v);
            s.max = s.max.max(v);
            s.mean += v;
        }
        if n == 0 {
            return Summary::default();
        }
        s.mean /= n as f64;
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub pairs: usize,
    pub rooms: usize,
    /// Object count → number of rooms built from that many objects.
    pub object_counts: BTreeMap<usize, usize>,
    pub room_area_m2: Summary,
    pub footprint_sum_m2: Summary,
    /// Per-room floor area divided by its footprint sum.
    pub area_ratio: Summary,
    pub placements: usize,
    pub forced: usize,
    pub instance_points: Summary,
    /// Pairs whose shared ids cover every object.
    pub full_coverage_pairs: usize,
    /// Mean of `|shared_ids| / object_count`.
    pub shared_fraction: f64,
}

impl StatsReport {
    pub fn forced_rate(&self) -> f64 {
        if self.placements == 0 {
            0.0
        } else {
            self.forced as f64 / self.placements as f64
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("pairs", self.pairs.to_string());
        kv("rooms", self.rooms.to_string());
        if let (Some(lo), Some(hi)) = (
            self.object_counts.keys().next(),
            self.object_counts.keys().next_back(),
        ) {
            kv("object_count_min", lo.to_string());
            kv("object_count_max", hi.to_string());
        }
        for (c, n) in &self.object_counts {
            kv(&format!("object_count.{c}"), n.to_string());
        }
        for (name, v) in [
            ("room_area_m2", self.room_area_m2),
            ("footprint_sum_m2", self.footprint_sum_m2),
            ("area_ratio", self.area_ratio),
            ("instance_points", self.instance_points),
        ] {
            kv(&format!("{name}_min"), format!("{:.4}", v.min));
            kv(&format!("{name}_mean"), format!("{:.4}", v.mean));
            kv(&format!("{name}_max"), format!("{:.4}", v.max));
        }
        kv("placements", self.placements.to_string());
        kv("forced_placements", self.forced.to_string());
        kv("forced_rate", format!("{:.6}", self.forced_rate()));
        kv("full_coverage_pairs", self.full_coverage_pairs.to_string());
        kv("shared_fraction", format!("{:.6}", self.shared_fraction));
        s
    }
}

pub fn stats_from_summaries(pairs: &[PairSummary]) -> Result<StatsReport> {
    if pairs.is_empty() {
        return Err(Error::invalid("no pairs to summarize"));
    }
    let rooms: Vec<&RoomSummary> = pairs.iter().flat_map(|p| p.rooms.iter()).collect();
    let mut object_counts = BTreeMap::new();
    for r in &rooms {
        *object_counts.entry(r.object_count).or_insert(0) += 1;
    }
    Ok(StatsReport {
        pairs: pairs.len(),
        rooms: rooms.len(),
        object_counts,
        room_area_m2: Summary::of(rooms.iter().map(|r| r.area_m2)),
        footprint_sum_m2: Summary::of(rooms.iter().map(|r| r.footprint_sum)),
        area_ratio: Summary::of(
            rooms
                .iter()
                .filter(|r| r.footprint_sum > 0.0)
                .map(|r| r.area_m2 / r.footprint_sum),
        ),
        placements: rooms.iter().map(|r| r.placed).sum(),
        forced: rooms.iter().map(|r| r.forced).sum(),
        instance_points: Summary::of(
            rooms
                .iter()
                .flat_map(|r| r.instance_points.values().map(|&n| n as f64)),
        ),
        full_coverage_pairs: pairs.iter().filter(|p| p.shared == p.object_count).count(),
        shared_fraction: pairs
            .iter()
            .map(|p| p.shared as f64 / p.object_count.max(1) as f64)
            .sum::<f64>()
            / pairs.len() as f64,
    })
}

/// Summary statistics over generated pairs.
pub fn scene_stats(pairs: &[ScenePair]) -> Result<StatsReport> {
    let s: Vec<PairSummary> = pairs.iter().map(PairSummary::from_pair).collect();
    stats_from_summaries(&s)
}
