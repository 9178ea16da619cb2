//! ASCII PLY export with per-instance colors, for eyeballing rooms.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::container::StoredRoom;
use crate::scene::RoomScene;

pub const CONFOUNDER_RGB: [u8; 3] = [128, 128, 128];

/// Deterministic color for an instance id; gray for confounders.
pub fn instance_color(id: u32) -> [u8; 3] {
    if id == 0 {
        return CONFOUNDER_RGB;
    }
    // golden-ratio hue walk, saturated enough to never read as gray
    let hue = (id as f64 * 0.618_033_988_749_895).fract() * 6.0;
    let (s, v) = (0.75, 0.95);
    let sector = hue.floor() as u32 % 6;
    let f = hue - hue.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let c = |x: f64| (x * 255.0).round() as u8;
    [c(r), c(g), c(b)]
}

/// PLY text for a stored room.
pub fn ply_text(room: &StoredRoom) -> String {
    let mut s = String::with_capacity(room.points.len() * 40 + 256);
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(
        s,
        "comment room seed {} dims {}x{} cm",
        room.seed, room.a_cells, room.b_cells
    );
    let _ = writeln!(s, "element vertex {}", room.points.len());
    s.push_str(
        "property float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\n\
         property uint label\nend_header\n",
    );
    for (p, &l) in room.points.iter().zip(&room.labels) {
        let [r, g, b] = instance_color(l);
        let _ = writeln!(s, "{} {} {} {r} {g} {b} {l}", p[0], p[1], p[2]);
    }
    s
}

pub fn export_ply_room(room: &StoredRoom, path: &Path) -> Result<()> {
    fs::write(path, ply_text(room)).map_err(|e| Error::io(path, e))
}

/// Writes a scene at storage precision (f32 coordinates).
pub fn export_ply(scene: &RoomScene, path: &Path) -> Result<()> {
    export_ply_room(&StoredRoom::from_scene(scene), path)
}
