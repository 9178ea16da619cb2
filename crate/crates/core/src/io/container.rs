//! Binary scene container.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic        8 bytes  "RROOMS01"
//! version      u32
//! pair count   u32
//! point budget u32
//! base seed    u64
//! per pair:
//!   pair index u32
//!   room A, room B:
//!     point count u32, a_cells u32, b_cells u32, child seed u64
//!     points     point count × (x, y, z) f32
//!     labels     point count × u32
//!   shared ids  u32 count, then count × u32
//! metadata     u32 byte length, then UTF-8 "key = value" lines
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scene::{RoomScene, ScenePair};

pub const MAGIC: &[u8; 8] = b"RROOMS01";
pub const FORMAT_VERSION: u32 = 1;
/// Magic plus the fixed header fields.
pub const HEADER_BYTES: usize = 8 + 4 + 4 + 4 + 8;
/// Per-room fields before the point records.
pub const ROOM_HEADER_BYTES: usize = 4 + 4 + 4 + 8;
/// Bytes per point: three f32 coordinates plus a u32 label.
pub const POINT_BYTES: usize = 12 + 4;

/// One room as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredRoom {
    pub a_cells: u32,
    pub b_cells: u32,
    pub seed: u64,
    pub points: Vec<[f32; 3]>,
    pub labels: Vec<u32>,
}

impl StoredRoom {
    pub fn from_scene(room: &RoomScene) -> Self {
        Self {
            a_cells: room.dims.a_cells,
            b_cells: room.dims.b_cells,
            seed: room.seed,
            points: room
                .points
                .points()
                .iter()
                .map(|p| [p[0] as f32, p[1] as f32, p[2] as f32])
                .collect(),
            labels: room.labels.clone(),
        }
    }

    pub fn points_f64(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|p| [p[0] as f64, p[1] as f64, p[2] as f64])
            .collect()
    }

    pub fn area_m2(&self) -> f64 {
        self.a_cells as f64 * self.b_cells as f64 / 10_000.0
    }

    pub fn instance_counts(&self) -> BTreeMap<u32, usize> {
        let mut m = BTreeMap::new();
        for &l in &self.labels {
            if l != 0 {
                *m.entry(l).or_insert(0) += 1;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredPair {
    pub index: u32,
    pub rooms: [StoredRoom; 2],
    pub shared_ids: Vec<u32>,
}

impl StoredPair {
    pub fn from_pair(index: u32, pair: &ScenePair) -> Self {
        Self {
            index,
            rooms: [
                StoredRoom::from_scene(&pair.room_a),
                StoredRoom::from_scene(&pair.room_b),
            ],
            shared_ids: pair.shared_ids.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneContainer {
    pub version: u32,
    pub point_budget: u32,
    pub base_seed: u64,
    pub pairs: Vec<StoredPair>,
    /// Effective configuration and per-room generation notes.
    pub metadata: String,
}

impl SceneContainer {
    /// Parses the metadata block's `key = value` lines.
    pub fn metadata_map(&self) -> BTreeMap<String, String> {
        self.metadata
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    }
}

/// Exact encoded size of a container.
pub fn encoded_len(c: &SceneContainer) -> usize {
    HEADER_BYTES
        + c.pairs
            .iter()
            .map(|p| {
                4 + p
                    .rooms
                    .iter()
                    .map(|r| ROOM_HEADER_BYTES + r.points.len() * POINT_BYTES)
                    .sum::<usize>()
                    + 4
                    + 4 * p.shared_ids.len()
            })
            .sum::<usize>()
        + 4
        + c.metadata.len()
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::invalid(format!("{what} {v} exceeds u32")))
}

fn validate(c: &SceneContainer) -> Result<()> {
    for p in &c.pairs {
        for r in &p.rooms {
            if r.points.len() != c.point_budget as usize || r.labels.len() != r.points.len() {
                return Err(Error::invalid(format!(
                    "pair {}: room has {} points and {} labels, budget {}",
                    p.index,
                    r.points.len(),
                    r.labels.len(),
                    c.point_budget
                )));
            }
        }
        let (ca, cb) = (p.rooms[0].instance_counts(), p.rooms[1].instance_counts());
        for id in &p.shared_ids {
            if *id == 0 || !ca.contains_key(id) || !cb.contains_key(id) {
                return Err(Error::invalid(format!(
                    "pair {}: shared id {id} not present in both rooms",
                    p.index
                )));
            }
        }
    }
    Ok(())
}

pub fn encode(c: &SceneContainer) -> Result<Vec<u8>> {
    validate(c)?;
    let mut buf = Vec::with_capacity(encoded_len(c));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&c.version.to_le_bytes());
    buf.extend_from_slice(&to_u32(c.pairs.len(), "pair count")?.to_le_bytes());
    buf.extend_from_slice(&c.point_budget.to_le_bytes());
    buf.extend_from_slice(&c.base_seed.to_le_bytes());
    for p in &c.pairs {
        buf.extend_from_slice(&p.index.to_le_bytes());
        for r in &p.rooms {
            buf.extend_from_slice(&to_u32(r.points.len(), "point count")?.to_le_bytes());
            buf.extend_from_slice(&r.a_cells.to_le_bytes());
            buf.extend_from_slice(&r.b_cells.to_le_bytes());
            buf.extend_from_slice(&r.seed.to_le_bytes());
            for pt in &r.points {
                for v in pt {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
            for l in &r.labels {
                buf.extend_from_slice(&l.to_le_bytes());
            }
        }
        buf.extend_from_slice(&to_u32(p.shared_ids.len(), "shared id count")?.to_le_bytes());
        for id in &p.shared_ids {
            buf.extend_from_slice(&id.to_le_bytes());
        }
    }
    buf.extend_from_slice(&to_u32(c.metadata.len(), "metadata length")?.to_le_bytes());
    buf.extend_from_slice(c.metadata.as_bytes());
    Ok(buf)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn corrupt(&self, msg: impl Into<String>) -> Error {
        Error::CorruptContainer {
            offset: self.pos as u64,
            msg: msg.into(),
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.corrupt(format!(
                "truncated {what}: need {n} bytes, {} left",
                self.buf.len() - self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn decode(buf: &[u8]) -> Result<SceneContainer> {
    if buf.len() < MAGIC.len() || &buf[..MAGIC.len()] != MAGIC {
        let found = &buf[..buf.len().min(MAGIC.len())];
        return Err(Error::WrongFormat {
            expected: String::from_utf8_lossy(MAGIC).into_owned(),
            found: String::from_utf8_lossy(found).into_owned(),
        });
    }
    let mut r = Reader {
        buf,
        pos: MAGIC.len(),
    };
    let version = r.u32("version")?;
    if version != FORMAT_VERSION {
        r.pos -= 4;
        return Err(r.corrupt(format!("unsupported version {version}")));
    }
    let pair_count = r.u32("pair count")?;
    let point_budget = r.u32("point budget")?;
    let base_seed = r.u64("base seed")?;

    let mut pairs = Vec::new();
    for _ in 0..pair_count {
        let index = r.u32("pair index")?;
        let mut rooms = Vec::with_capacity(2);
        for _ in 0..2 {
            let at = r.pos;
            let count = r.u32("point count")?;
            if count != point_budget {
                r.pos = at;
                return Err(r.corrupt(format!(
                    "pair {index}: point count {count} differs from budget {point_budget}"
                )));
            }
            let a_cells = r.u32("a_cells")?;
            let b_cells = r.u32("b_cells")?;
            let seed = r.u64("room seed")?;
            let n = count as usize;
            // fail before allocating when the payload cannot be there
            if r.buf.len() - r.pos < n * POINT_BYTES {
                return Err(r.corrupt(format!(
                    "truncated room payload: need {} bytes, {} left",
                    n * POINT_BYTES,
                    r.buf.len() - r.pos
                )));
            }
            let mut points = Vec::with_capacity(n);
            for _ in 0..n {
                points.push([r.f32("x")?, r.f32("y")?, r.f32("z")?]);
            }
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                labels.push(r.u32("label")?);
            }
            rooms.push(StoredRoom {
                a_cells,
                b_cells,
                seed,
                points,
                labels,
            });
        }
        let at = r.pos;
        let k = r.u32("shared id count")? as usize;
        if r.buf.len() - r.pos < 4 * k {
            return Err(r.corrupt("truncated shared id list"));
        }
        let shared_ids = (0..k)
            .map(|_| r.u32("shared id"))
            .collect::<Result<Vec<_>>>()?;
        let [ra, rb]: [StoredRoom; 2] = rooms.try_into().expect("two rooms");
        let (ca, cb) = (ra.instance_counts(), rb.instance_counts());
        if let Some(bad) = shared_ids
            .iter()
            .find(|id| **id == 0 || !ca.contains_key(id) || !cb.contains_key(id))
        {
            r.pos = at;
            return Err(r.corrupt(format!(
                "pair {index}: shared id {bad} not present in both rooms"
            )));
        }
        pairs.push(StoredPair {
            index,
            rooms: [ra, rb],
            shared_ids,
        });
    }
    let len = r.u32("metadata length")? as usize;
    let meta = r.take(len, "metadata")?;
    let metadata = std::str::from_utf8(meta)
        .map_err(|e| Error::CorruptContainer {
            offset: (r.pos - len + e.valid_up_to()) as u64,
            msg: "metadata is not UTF-8".into(),
        })?
        .to_string();
    if r.pos != buf.len() {
        return Err(r.corrupt(format!("{} trailing bytes", buf.len() - r.pos)));
    }
    Ok(SceneContainer {
        version,
        point_budget,
        base_seed,
        pairs,
        metadata,
    })
}

/// Writes the container, returning the byte count.
pub fn write_scene_container(c: &SceneContainer, path: &Path) -> Result<u64> {
    let bytes = encode(c)?;
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    Ok(bytes.len() as u64)
}

pub fn read_scene_container(path: &Path) -> Result<SceneContainer> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
