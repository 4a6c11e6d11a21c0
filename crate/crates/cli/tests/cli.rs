use std::path::Path;
use std::process::{Command, Output};

use ghostdisk::{DiskLayout, OrderMode, PartitionSpec, PatternSet, ScanSchedule};

fn ghostdisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghostdisk")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bad_partition_exits_2_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    for cmd in ["patterns", "schedule", "layout", "simulate", "report"] {
        let o = ghostdisk(&[cmd, "--n", "35", "--k", "4", "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("does not divide"), "{}", stderr(&o));
        assert!(!out.exists());
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    std::fs::write(&cfg, "n = 35\nspeed = 3\n").unwrap();
    let o = ghostdisk(&["simulate", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key"));

    let o_dir = tmp.path().join("o");
    for args in [
        &["simulate", "--window", "0"][..],
        &["simulate", "--letter", "Q"],
        &["simulate", "--order", "diagonal"],
        &["simulate", "--n", "24", "--k", "3"],
        &["layout", "--track-pitch", "3"],
    ] {
        let mut a = args.to_vec();
        a.extend(["--out", path(&o_dir)]);
        assert_eq!(ghostdisk(&a).status.code(), Some(2), "{args:?}");
    }
    assert!(!o_dir.exists());
}

#[test]
fn missing_files_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ghostdisk(&["simulate", "--config", path(&tmp.path().join("nope.conf"))]);
    assert_eq!(o.status.code(), Some(3));
    let o = ghostdisk(&["report", "--run", path(&tmp.path().join("nope"))]);
    assert_eq!(o.status.code(), Some(3));
    let o = ghostdisk(&["simulate", "--object", path(&tmp.path().join("x.ppm")), "--out", path(tmp.path())]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn patterns_for_seven_and_three() {
    let tmp = tempfile::tempdir().unwrap();
    for (n, count) in [(7usize, 7usize), (3, 3)] {
        let out = tmp.path().join(n.to_string());
        let o = ghostdisk(&["patterns", "--n", &n.to_string(), "--k", "1", "--out", path(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let pgms = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "pgm").count();
        assert_eq!(pgms, count);
        let header = format!("P5\n{n} 1\n255\n");
        assert!(std::fs::read(out.join("pattern_0.pgm")).unwrap().starts_with(header.as_bytes()));
        let set = PatternSet::read_pgms(&out).unwrap();
        assert_eq!(set, PatternSet::read_text(&out.join("patterns.txt")).unwrap());
        assert_eq!(set.count(), count);
    }
}

#[test]
fn layout_and_schedule_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ghostdisk(&["layout", "--n", "21", "--k", "3", "--order", "part_major", "--out", path(tmp.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let spec = PartitionSpec::new(21, 3).unwrap();
    let from_svg = DiskLayout::read_schedule_from_svg(&tmp.path().join("layout.svg")).unwrap();
    let from_csv = ScanSchedule::read_csv(&tmp.path().join("schedule.csv"), spec).unwrap();
    assert_eq!(from_svg, from_csv);
    assert_eq!(from_csv, ScanSchedule::build(spec, OrderMode::PartMajor));
}

#[test]
fn simulate_outputs_and_manifest_reuse() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let o = ghostdisk(&[
        "simulate", "--letter", "T", "--color", "blue", "--window-mode", "sliding", "--duration", "0.4", "--out", path(&a),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    // sliding windows of one revolution, stepping one slot, over two revolutions
    let frames = std::fs::read_dir(&a).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".ppm")).count();
    assert_eq!(frames, 1226);
    let bucket = std::fs::read_to_string(a.join("bucket.csv")).unwrap();
    assert_eq!(bucket.lines().count(), 1 + 2450);
    let ppm = std::fs::read(a.join("frame_0.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n35 35\n255\n"));
    assert_eq!(ppm.len(), 13 + 35 * 35 * 3);

    let b = tmp.path().join("b");
    let o = ghostdisk(&["simulate", "--config", path(&a.join("manifest.txt")), "--out", path(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["bucket.csv", "frame_0.ppm", "frame_600_blue.txt", "frame_1225.ppm"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn report_from_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert!(ghostdisk(&["simulate", "--letter", "X", "--color", "red", "--out", path(&run)]).status.success());
    let o = ghostdisk(&["report", "--run", path(&run)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(run.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("region,channel,n_obj,predicted_num,predicted_den,measured_num,measured_den"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 35 * 5 * 3);
    for r in &rows {
        assert_eq!((r[3], r[4]), (r[5], r[6]), "{r:?}");
    }
    // glyph pixels are 5×5 blocks at n=35: the top-left stroke lights 5 of 7 pixels
    assert_eq!(rows[0], ["r0c0", "red", "5", "1", "6", "1", "6"]);

    let in_memory = tmp.path().join("mem");
    let o = ghostdisk(&["report", "--letter", "X", "--color", "red", "--out", path(&in_memory)]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(in_memory.join("report.csv")).unwrap(), csv);
}

#[test]
fn gray_object_file_round_trips_through_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let obj = tmp.path().join("obj.pgm");
    let mut pgm = b"P5\n7 7\n255\n".to_vec();
    pgm.extend((0..49u8).map(|i| i * 5));
    std::fs::write(&obj, pgm).unwrap();
    let run = tmp.path().join("run");
    let o = ghostdisk(&["simulate", "--n", "7", "--k", "1", "--object", path(&obj), "--out", path(&run)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let frame = ghostdisk::optics::read_raw_frame(&run, 0, 7).unwrap();
    let spec = PartitionSpec::new(7, 1).unwrap();
    let back = ghostdisk::affine_invert(&frame, &spec).unwrap();
    assert_eq!(back, ghostdisk::load_object(&obj, 7).unwrap());

    let o = ghostdisk(&["simulate", "--n", "14", "--k", "2", "--object", path(&obj), "--out", path(&tmp.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension mismatch"), "{}", stderr(&o));
}

#[test]
fn seeded_noise_is_reproducible_and_seed_sensitive() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let out = tmp.path().join(name);
        let o = ghostdisk(&["simulate", "--noise-sigma", "25", "--seed", seed, "--out", path(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out.join("bucket.csv")).unwrap()
    };
    assert_eq!(run("3", "a"), run("3", "b"));
    assert_ne!(run("3", "a"), run("4", "c"));
}

#[test]
fn shipped_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().unwrap();
    for (name, frames) in [("default.conf", 1), ("moving_letter.conf", 10)] {
        let out = tmp.path().join(name);
        let o = ghostdisk(&["simulate", "--config", path(&dir.join(name)), "--out", path(&out)]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        assert!(out.join(format!("frame_{}.ppm", frames - 1)).exists());
        assert!(!out.join(format!("frame_{frames}.ppm")).exists());
    }
}
