//! Object model ingestion: ASCII XYZ and ASCII PLY, plus catalog directories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};

/// Name of the optional manifest inside a catalog directory.
pub const MANIFEST: &str = "manifest.txt";
pub const DEFAULT_MIN_OBJECT_POINTS: usize = 16;

fn format_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_coord(tok: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| format_err(path, line, format!("cannot parse {tok:?} as a number")))?;
    if !v.is_finite() {
        return Err(format_err(
            path,
            line,
            format!("non-finite coordinate {tok}"),
        ));
    }
    Ok(v)
}

fn parse_xyz(text: &str, path: &Path) -> Result<Vec<Point3>> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(format_err(
                path,
                i + 1,
                format!("expected \"x y z\", found {} field(s)", toks.len()),
            ));
        }
        pts.push([
            parse_coord(toks[0], path, i + 1)?,
            parse_coord(toks[1], path, i + 1)?,
            parse_coord(toks[2], path, i + 1)?,
        ]);
    }
    Ok(pts)
}

fn parse_ply(text: &str, path: &Path) -> Result<Vec<Point3>> {
    let mut lines = text.lines().enumerate();
    let mut vertex_count = None;
    let mut in_vertex = false;
    let mut vertex_before = 0usize;
    let mut props: Vec<String> = Vec::new();
    let mut header_done = false;
    for (i, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["ply"] if i == 0 => {}
            _ if i == 0 => return Err(format_err(path, 1, "missing \"ply\" magic line")),
            ["format", "ascii", _] => {}
            ["format", kind, ..] => {
                return Err(format_err(
                    path,
                    i + 1,
                    format!("unsupported PLY format {kind}"),
                ))
            }
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| format_err(path, i + 1, format!("bad element count {count}")))?;
                in_vertex = *name == "vertex";
                if in_vertex {
                    vertex_count = Some(count);
                } else if vertex_count.is_none() {
                    vertex_before += count;
                }
            }
            ["property", "list", ..] if in_vertex => {
                return Err(format_err(
                    path,
                    i + 1,
                    "list properties on vertices are not supported",
                ))
            }
            ["property", _ty, name] => {
                if in_vertex {
                    props.push(name.to_string());
                }
            }
            ["property", ..] => {}
            ["end_header"] => {
                header_done = true;
                break;
            }
            _ => {
                return Err(format_err(
                    path,
                    i + 1,
                    format!("unexpected header line {line:?}"),
                ))
            }
        }
    }
    if !header_done {
        return Err(format_err(
            path,
            text.lines().count(),
            "header has no end_header",
        ));
    }
    let count = vertex_count.ok_or_else(|| format_err(path, 1, "no vertex element"))?;
    let col = |name: &str| {
        props
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| format_err(path, 1, format!("vertex has no {name} property")))
    };
    let (xi, yi, zi) = (col("x")?, col("y")?, col("z")?);
    if vertex_before > 0 {
        // elements declared ahead of the vertex block occupy the first lines
        for _ in 0..vertex_before {
            lines.next();
        }
    }
    let mut pts = Vec::with_capacity(count);
    let mut last_line = 0;
    for (i, line) in lines {
        if pts.len() == count {
            break;
        }
        last_line = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() < props.len() {
            return Err(format_err(
                path,
                i + 1,
                format!(
                    "vertex has {} values, header declares {}",
                    toks.len(),
                    props.len()
                ),
            ));
        }
        pts.push([
            parse_coord(toks[xi], path, i + 1)?,
            parse_coord(toks[yi], path, i + 1)?,
            parse_coord(toks[zi], path, i + 1)?,
        ]);
    }
    if pts.len() < count {
        return Err(format_err(
            path,
            last_line,
            format!("expected {count} vertices, file ends after {}", pts.len()),
        ));
    }
    Ok(pts)
}

/// Reads an ASCII XYZ or ASCII PLY file (detected by the `ply` magic line).
pub fn read_object(path: &Path, min_points: usize) -> Result<PointCloud> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        format_err(path, line, "file is not ASCII/UTF-8 text")
    })?;
    let pts = if text.trim_start().starts_with("ply") {
        parse_ply(text, path)?
    } else {
        parse_xyz(text, path)?
    };
    if pts.len() < min_points.max(1) {
        return Err(Error::TooFewPoints {
            path: path.to_path_buf(),
            count: pts.len(),
            min: min_points.max(1),
        });
    }
    PointCloud::new(pts)
}

/// Writes an ASCII XYZ file.
pub fn write_xyz(path: &Path, pc: &PointCloud) -> Result<()> {
    let mut s = String::with_capacity(pc.len() * 24);
    for p in pc.points() {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub path: PathBuf,
    pub category: Option<String>,
    pub cloud: PointCloud,
}

/// Loaded object models.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectCatalog {
    pub root: PathBuf,
    pub entries: Vec<CatalogEntry>,
}

impl ObjectCatalog {
    pub fn clouds(&self) -> Vec<PointCloud> {
        self.entries.iter().map(|e| e.cloud.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct ManifestLine {
    rel: String,
    id: String,
    category: Option<String>,
}

fn parse_manifest(path: &Path) -> Result<Vec<ManifestLine>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(format_err(
                path,
                i + 1,
                "expected \"<path> <id> [category]\"",
            ));
        }
        out.push(ManifestLine {
            rel: toks[0].to_string(),
            id: toks[1].to_string(),
            category: toks.get(2).map(|s| s.to_string()),
        });
    }
    Ok(out)
}

/// Loads every object of a catalog directory.
///
/// With a `manifest.txt` the listed files are loaded in manifest order;
/// otherwise every `.xyz` and `.ply` file, sorted by name, with the file
/// stem as id.
pub fn load_catalog(dir: &Path, min_points: usize) -> Result<ObjectCatalog> {
    let manifest = dir.join(MANIFEST);
    let lines = if manifest.is_file() {
        parse_manifest(&manifest)?
    } else {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("xyz") | Some("ply")
                    )
            })
            .collect();
        files.sort();
        files
            .into_iter()
            .map(|p| ManifestLine {
                id: p
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned(),
                rel: p
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned(),
                category: None,
            })
            .collect()
    };
    if lines.is_empty() {
        return Err(Error::invalid(format!(
            "catalog {} has no objects",
            dir.display()
        )));
    }
    let entries = lines
        .into_par_iter()
        .map(|l| {
            let path = dir.join(&l.rel);
            let cloud = read_object(&path, min_points)?;
            Ok(CatalogEntry {
                id: l.id,
                path,
                category: l.category,
                cloud,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ObjectCatalog {
        root: dir.to_path_buf(),
        entries,
    })
}
