//! Flat `key = value` run configuration.
//!
//! Every tunable has a key; [`RunConfig::to_text`] lists all of them with
//! their effective values and is what gets echoed into containers.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::object::DEFAULT_MIN_OBJECT_POINTS;
use crate::layout::{ForcedPolicy, HeightUpdate};
use crate::ocl::OclConfig;
use crate::scene::SceneConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scene: SceneConfig,
    pub ocl: OclConfig,
    pub encoder_seed: u64,
    pub head_seed: u64,
    pub min_object_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scene: SceneConfig::default(),
            ocl: OclConfig::default(),
            encoder_seed: 0,
            head_seed: 1,
            min_object_points: DEFAULT_MIN_OBJECT_POINTS,
        }
    }
}

fn parse<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse::<T>().map_err(|_| format!("cannot parse {v:?}"))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("expected a boolean, found {v:?}")),
    }
}

impl RunConfig {
    /// Applies one key. Unknown keys are an error.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.scene;
        match key {
            "object.size_min" => s.object.size_min = parse(value)?,
            "object.size_max" => s.object.size_max = parse(value)?,
            "object.drop_ratio_max" => s.object.drop_ratio_max = parse(value)?,
            "object.jitter_sigma" => s.object.jitter_sigma = parse(value)?,
            "object.jitter_clip" => s.object.jitter_clip = parse(value)?,
            "object.rotation" => s.object.rotation_enabled = parse_bool(value)?,
            "layout.max_iter" => s.layout.max_iter = parse(value)?,
            "layout.gravity_sort" => s.layout.sort_by_area = parse_bool(value)?,
            "layout.height_update" => {
                s.layout.height_update = match value {
                    "top" => HeightUpdate::TopSurface,
                    "additive" => HeightUpdate::Additive,
                    _ => return Err(format!("expected top|additive, found {value:?}")),
                }
            }
            "layout.forced_policy" => {
                s.layout.forced_policy = match value {
                    "keep" => ForcedPolicy::Keep,
                    "skip" => ForcedPolicy::Skip,
                    _ => return Err(format!("expected keep|skip, found {value:?}")),
                }
            }
            "scene.min_objects" => s.min_objects = parse(value)?,
            "scene.max_objects" => s.max_objects = parse(value)?,
            "scene.floor_wall" => s.floor_wall = parse_bool(value)?,
            "scene.wall_height" => s.wall_height = parse(value)?,
            "scene.confounder_density" => s.confounder_density = parse(value)?,
            "scene.rotation" => s.scene.rotation_enabled = parse_bool(value)?,
            "scene.drop_ratio_max" => s.scene.drop_ratio_max = parse(value)?,
            "scene.jitter_sigma" => s.scene.jitter_sigma = parse(value)?,
            "scene.jitter_clip" => s.scene.jitter_clip = parse(value)?,
            "scene.point_budget" => s.point_budget = parse(value)?,
            "scene.min_points" => s.min_points = parse(value)?,
            "catalog.min_object_points" => self.min_object_points = parse(value)?,
            "ocl.temperature" => self.ocl.temperature = parse(value)?,
            "ocl.exclude_self" => self.ocl.exclude_self = parse_bool(value)?,
            "ocl.encoder_seed" => self.encoder_seed = parse(value)?,
            "ocl.head_seed" => self.head_seed = parse(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn parse_text(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config {
                path: origin.to_path_buf(),
                line: i + 1,
                msg,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected \"key = value\", found {line:?}")))?;
            cfg.set(k.trim(), v.trim()).map_err(err)?;
        }
        cfg.validate().map_err(|e| Error::Config {
            path: origin.to_path_buf(),
            line: 0,
            msg: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        if !(self.ocl.temperature > 0.0 && self.ocl.temperature.is_finite()) {
            return Err(Error::invalid("ocl.temperature must be positive"));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let s = &self.scene;
        let b = |v: bool| if v { "true" } else { "false" };
        let lines = [
            ("object.size_min", s.object.size_min.to_string()),
            ("object.size_max", s.object.size_max.to_string()),
            ("object.drop_ratio_max", s.object.drop_ratio_max.to_string()),
            ("object.jitter_sigma", s.object.jitter_sigma.to_string()),
            ("object.jitter_clip", s.object.jitter_clip.to_string()),
            ("object.rotation", b(s.object.rotation_enabled).into()),
            ("layout.max_iter", s.layout.max_iter.to_string()),
            ("layout.gravity_sort", b(s.layout.sort_by_area).into()),
            (
                "layout.height_update",
                match s.layout.height_update {
                    HeightUpdate::TopSurface => "top",
                    HeightUpdate::Additive => "additive",
                }
                .into(),
            ),
            (
                "layout.forced_policy",
                match s.layout.forced_policy {
                    ForcedPolicy::Keep => "keep",
                    ForcedPolicy::Skip => "skip",
                }
                .into(),
            ),
            ("scene.min_objects", s.min_objects.to_string()),
            ("scene.max_objects", s.max_objects.to_string()),
            ("scene.floor_wall", b(s.floor_wall).into()),
            ("scene.wall_height", s.wall_height.to_string()),
            ("scene.confounder_density", s.confounder_density.to_string()),
            ("scene.rotation", b(s.scene.rotation_enabled).into()),
            ("scene.drop_ratio_max", s.scene.drop_ratio_max.to_string()),
            ("scene.jitter_sigma", s.scene.jitter_sigma.to_string()),
            ("scene.jitter_clip", s.scene.jitter_clip.to_string()),
            ("scene.point_budget", s.point_budget.to_string()),
            ("scene.min_points", s.min_points.to_string()),
            (
                "catalog.min_object_points",
                self.min_object_points.to_string(),
            ),
            ("ocl.temperature", self.ocl.temperature.to_string()),
            ("ocl.exclude_self", b(self.ocl.exclude_self).into()),
            ("ocl.encoder_seed", self.encoder_seed.to_string()),
            ("ocl.head_seed", self.head_seed.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
