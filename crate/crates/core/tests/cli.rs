use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rroom");

fn rroom(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn rroom")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let cat = dir.path().join("cat");
        let o = rroom(&[
            "synth-catalog",
            "--out",
            cat.to_str().unwrap(),
            "--objects",
            "24",
            "--points",
            "256",
        ]);
        assert!(o.status.success());
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn catalog(&self) -> String {
        self.path("cat").to_string_lossy().into_owned()
    }

    fn small_config(&self) -> String {
        let p = self.path("small.cfg");
        std::fs::write(
            &p,
            "scene.point_budget = 4000\nscene.confounder_density = 40\n",
        )
        .unwrap();
        p.to_string_lossy().into_owned()
    }

    fn gen(&self, out: &Path, extra: &[&str]) -> Output {
        let cfg = self.small_config();
        let mut args = vec![
            "gen-pairs",
            "--catalog",
            &self.catalog(),
            "--out",
            out.to_str().unwrap(),
            "--pairs",
            "2",
            "--seed",
            "7",
            "--config",
            &cfg,
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        args.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        rroom(&refs)
    }
}

#[test]
fn gen_pairs_is_byte_identical() {
    let f = Fixture::new();
    let (a, b) = (f.path("a.bin"), f.path("b.bin"));
    assert!(f.gen(&a, &[]).status.success());
    assert!(f.gen(&b, &[]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn stats_reports_the_container() {
    let f = Fixture::new();
    let p = f.path("p.bin");
    assert!(f.gen(&p, &[]).status.success());
    let o = rroom(&["stats", "--in", p.to_str().unwrap()]);
    assert!(o.status.success());
    let r = stdout(&o);
    assert_eq!(value(&r, "pairs"), Some("2"));
    assert_eq!(value(&r, "rooms"), Some("4"));
    assert_eq!(value(&r, "point_budget"), Some("4000"));
    assert!(value(&r, "forced_rate").is_some());
    let lo: usize = value(&r, "object_count_min").unwrap().parse().unwrap();
    let hi: usize = value(&r, "object_count_max").unwrap().parse().unwrap();
    assert!(12 <= lo && hi <= 18);
}

#[test]
fn loss_check_passes_on_a_healthy_container() {
    let f = Fixture::new();
    let p = f.path("p.bin");
    assert!(f.gen(&p, &[]).status.success());
    for extra in [&[][..], &["--tau", "0.07", "--include-self"][..]] {
        let mut args = vec!["loss-check", "--in", p.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = rroom(&args);
        let r = stdout(&o);
        assert!(o.status.success(), "{r}");
        assert_eq!(value(&r, "status"), Some("ok"));
        let err: f64 = value(&r, "grad_check_rel_err").unwrap().parse().unwrap();
        assert!(err < 1e-4);
    }
    let o = rroom(&["loss-check", "--in", p.to_str().unwrap(), "--tau", "0.07"]);
    assert_eq!(value(&stdout(&o), "tau"), Some("0.07"));
}

#[test]
fn loss_check_rejects_bad_input() {
    let f = Fixture::new();
    let p = f.path("p.bin");
    assert!(f.gen(&p, &[]).status.success());
    assert_eq!(
        rroom(&["loss-check", "--in", p.to_str().unwrap(), "--tau", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        rroom(&["loss-check", "--in", p.to_str().unwrap(), "--pair", "9"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn export_writes_identical_ply() {
    let f = Fixture::new();
    let p = f.path("p.bin");
    assert!(f.gen(&p, &[]).status.success());
    let (a, b) = (f.path("a.ply"), f.path("b.ply"));
    for out in [&a, &b] {
        let o = rroom(&[
            "export",
            "--in",
            p.to_str().unwrap(),
            "--pair",
            "1",
            "--room",
            "B",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert_eq!(value(&stdout(&o), "points"), Some("4000"));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("ply\nformat ascii 1.0\n"));
    assert!(text.contains("element vertex 4000\n"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn ablation_flags_change_output() {
    let f = Fixture::new();
    let (base, ng, nf) = (f.path("base.bin"), f.path("ng.bin"), f.path("nf.bin"));
    assert!(f.gen(&base, &[]).status.success());
    assert!(f.gen(&ng, &["--no-gravity-sort"]).status.success());
    assert!(f.gen(&nf, &["--no-floor-wall"]).status.success());
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_ne!(read(&base), read(&ng));
    assert_ne!(read(&base), read(&nf));
    let c = random_rooms::io::read_scene_container(&nf).unwrap();
    assert_eq!(c.metadata_map()["scene.floor_wall"], "false");
    assert!(c
        .pairs
        .iter()
        .all(|p| p.rooms.iter().all(|r| !r.labels.contains(&0))));
    let c = random_rooms::io::read_scene_container(&ng).unwrap();
    assert_eq!(c.metadata_map()["layout.gravity_sort"], "false");
}

#[test]
fn bench_reports_rates() {
    let f = Fixture::new();
    let cfg = f.small_config();
    let o = rroom(&[
        "bench",
        "--catalog",
        &f.catalog(),
        "--pairs",
        "3",
        "--config",
        &cfg,
    ]);
    assert!(o.status.success());
    let r = stdout(&o);
    assert!(
        value(&r, "pairs_per_second")
            .unwrap()
            .parse::<f64>()
            .unwrap()
            > 0.0
    );
    assert!(
        value(&r, "points_per_second")
            .unwrap()
            .parse::<f64>()
            .unwrap()
            > 0.0
    );
}

#[test]
fn failures_and_usage_errors() {
    let f = Fixture::new();
    assert_eq!(rroom(&[]).status.code(), Some(2));
    assert_eq!(rroom(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        rroom(&["gen-pairs", "--catalog", "x"]).status.code(),
        Some(2)
    );

    let missing = rroom(&["stats", "--in", f.path("nope.bin").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.bin"));

    let junk = f.path("junk.bin");
    std::fs::write(&junk, b"not a container at all").unwrap();
    assert_eq!(
        rroom(&["stats", "--in", junk.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let bad_cfg = f.path("bad.cfg");
    std::fs::write(&bad_cfg, "layout.max_iter = lots\n").unwrap();
    let o = rroom(&[
        "gen-pairs",
        "--catalog",
        &f.catalog(),
        "--out",
        f.path("x.bin").to_str().unwrap(),
        "--pairs",
        "1",
        "--config",
        bad_cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.cfg"));
}
