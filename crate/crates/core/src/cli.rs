//! The `rroom` command line.
//!
//! Exit codes: 0 success, 1 failure (I/O, bad input, violated check),
//! 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::container::{read_scene_container, write_scene_container, SceneContainer};
use crate::io::object::{load_catalog, write_xyz, MANIFEST};
use crate::io::ply::export_ply_room;
use crate::io::RunConfig;
use crate::ocl::{loss_check, room_features, LossCheckTolerances, ProjectionHead, ToyEncoder};
use crate::pipeline::{build_container, generate_pairs, summaries_from_container};
use crate::stats::stats_from_summaries;
use crate::synth::{make_shape, Shape};
use crate::Rng;

#[derive(Debug, Parser)]
#[command(
    name = "rroom",
    version,
    about = "Random-room scene pairs and contrastive loss checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate scene pairs into a container file.
    GenPairs {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Place objects in input order instead of by decreasing footprint.
        #[arg(long)]
        no_gravity_sort: bool,
        /// Leave out floor and wall points.
        #[arg(long)]
        no_floor_wall: bool,
    },
    /// Print statistics for a container.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Evaluate the contrastive loss on the first pair and check it against
    /// the reference evaluations.
    LossCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        /// Keep the anchor's own room in the denominator.
        #[arg(long)]
        include_self: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Pair to check.
        #[arg(long, default_value_t = 0)]
        pair: usize,
    },
    /// Write one room of a container as colored ASCII PLY.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pair: usize,
        #[arg(long, value_enum)]
        room: RoomSide,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time pair generation.
    Bench {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a procedural object catalog (.xyz files plus manifest).
    SynthCatalog {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 60)]
        objects: usize,
        #[arg(long, default_value_t = 2048)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RoomSide {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Reports go to `out`, errors to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok((report, ok)) => {
            let _ = out.write_all(report.as_bytes());
            let _ = out.flush();
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("rroom: {e}");
            1
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

/// Config echoed into a container, with per-pair notes skipped.
fn config_from_container(c: &SceneContainer) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (k, v) in c.metadata_map() {
        if k.starts_with("pair.") {
            continue;
        }
        cfg.set(&k, &v)
            .map_err(|msg| Error::invalid(format!("container metadata {k}: {msg}")))?;
    }
    Ok(cfg)
}

fn execute(cmd: Command) -> Result<(String, bool)> {
    let mut s = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(s, "{k} = {v}");
    };
    match cmd {
        Command::GenPairs {
            catalog,
            out,
            pairs,
            seed,
            config,
            no_gravity_sort,
            no_floor_wall,
        } => {
            let mut run = load_config(config.as_deref())?;
            if no_gravity_sort {
                run.scene.layout.sort_by_area = false;
            }
            if no_floor_wall {
                run.scene.floor_wall = false;
            }
            let cat = load_catalog(&catalog, run.min_object_points)?;
            let generated = generate_pairs(&cat.clouds(), pairs, seed, &run.scene)?;
            let container = build_container(&generated, seed, &run);
            let bytes = write_scene_container(&container, &out)?;
            kv("pairs", &pairs);
            kv("seed", &seed);
            kv("catalog_objects", &cat.len());
            kv("bytes", &bytes);
            kv("out", &out.display());
        }
        Command::Stats { input } => {
            let c = read_scene_container(&input)?;
            let report = stats_from_summaries(&summaries_from_container(&c))?;
            kv("point_budget", &c.point_budget);
            kv("base_seed", &c.base_seed);
            s.push_str(&report.to_text());
        }
        Command::LossCheck {
            input,
            tau,
            include_self,
            config,
            pair,
        } => {
            let c = read_scene_container(&input)?;
            let mut run = match config {
                Some(p) => RunConfig::load(&p)?,
                None => config_from_container(&c)?,
            };
            if let Some(t) = tau {
                run.ocl.temperature = t;
            }
            if include_self {
                run.ocl.exclude_self = false;
            }
            run.validate()?;
            let p = c.pairs.get(pair).ok_or_else(|| {
                Error::invalid(format!(
                    "pair {pair} out of range ({} pairs)",
                    c.pairs.len()
                ))
            })?;
            let encoder = ToyEncoder::with_seed(run.encoder_seed);
            let head = ProjectionHead::with_seed(encoder.output_dim(), run.head_seed)?;
            let [ra, rb] = &p.rooms;
            let (pa, pb) = (ra.points_f64(), rb.points_f64());
            let (fa, fb) = room_features(
                (&pa, &ra.labels),
                (&pb, &rb.labels),
                &p.shared_ids,
                &encoder,
                &head,
            )?;
            let report = loss_check(&fa, &fb, &run.ocl, &LossCheckTolerances::default())?;
            kv("pair", &pair);
            s.push_str(&report.to_text());
            return Ok((s, report.passed()));
        }
        Command::Export {
            input,
            pair,
            room,
            out,
        } => {
            let c = read_scene_container(&input)?;
            let p = c.pairs.get(pair).ok_or_else(|| {
                Error::invalid(format!(
                    "pair {pair} out of range ({} pairs)",
                    c.pairs.len()
                ))
            })?;
            let r = &p.rooms[room as usize];
            export_ply_room(r, &out)?;
            kv("points", &r.points.len());
            kv("out", &out.display());
        }
        Command::Bench {
            catalog,
            pairs,
            seed,
            config,
        } => {
            let run = load_config(config.as_deref())?;
            let cat = load_catalog(&catalog, run.min_object_points)?.clouds();
            let t0 = Instant::now();
            let generated = generate_pairs(&cat, pairs, seed, &run.scene)?;
            let secs = t0.elapsed().as_secs_f64().max(1e-9);
            let points: usize = generated
                .iter()
                .map(|p| p.room_a.points.len() + p.room_b.points.len())
                .sum();
            kv("pairs", &pairs);
            kv("threads", &rayon::current_num_threads());
            kv("seconds", &format!("{secs:.3}"));
            kv("pairs_per_second", &format!("{:.2}", pairs as f64 / secs));
            kv("points_per_second", &format!("{:.0}", points as f64 / secs));
        }
        Command::SynthCatalog {
            out,
            objects,
            points,
            seed,
        } => {
            if objects == 0 || points == 0 {
                return Err(Error::invalid("objects and points must be positive"));
            }
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            let mut rng = Rng::new(seed);
            let mut manifest = String::new();
            for i in 0..objects {
                let shape = Shape::ALL[i % Shape::ALL.len()];
                let name = format!("{i:04}_{}.xyz", shape.name());
                write_xyz(&out.join(&name), &make_shape(shape, points, &mut rng))?;
                let _ = writeln!(manifest, "{name} obj{i:04} {}", shape.name());
            }
            let mpath = out.join(MANIFEST);
            std::fs::write(&mpath, manifest).map_err(|e| Error::io(&mpath, e))?;
            kv("objects", &objects);
            kv("out", &out.display());
        }
    }
    Ok((s, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(
            std::iter::once("rroom").chain(args.iter().copied()),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&[]).0, 2);
        assert_eq!(run_args(&["gen-pairs", "--out", "x"]).0, 2);
        assert_eq!(
            run_args(&["export", "--in", "a", "--pair", "0", "--room", "C", "--out", "b"]).0,
            2
        );
    }

    #[test]
    fn missing_input_exits_1() {
        let (code, out) = run_args(&["stats", "--in", "/nonexistent/rooms.bin"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
    }

    #[test]
    fn room_side_parses_either_case() {
        let cli = Cli::try_parse_from([
            "rroom", "export", "--in", "a", "--pair", "1", "--room", "b", "--out", "o",
        ])
        .unwrap();
        assert!(matches!(
            cli.command,
            Command::Export {
                room: RoomSide::B,
                pair: 1,
                ..
            }
        ));
    }
}
