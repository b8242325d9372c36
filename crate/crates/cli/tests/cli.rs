use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy")
}

fn duetkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duetkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        let name = e.file_name();
        if name == "out" {
            continue;
        }
        if e.file_type().unwrap().is_dir() {
            copy_dir(&e.path(), &to.join(&name));
        } else {
            fs::copy(e.path(), to.join(&name)).unwrap();
        }
    }
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn pipeline_runs_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture().join("pipeline.cfg");
    let mut trees = Vec::new();
    for run in ["one", "two"] {
        let out = tmp.path().join(run);
        let o = duetkit(&["pipeline", "--config", s(&cfg), "--mock", "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("collided_frames="));
        trees.push(tree(&out));
    }
    assert!(trees[0].contains_key("11_metrics.txt"));
    assert_eq!(trees[0], trees[1]);
}

#[test]
fn seed_override_changes_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture().join("pipeline.cfg");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(duetkit(&["pipeline", "--config", s(&cfg), "--mock", "--out", s(&a)]).status.success());
    let o = duetkit(&["pipeline", "--config", s(&cfg), "--mock", "--seed", "8", "--out", s(&b)]);
    assert!(o.status.success());
    assert_ne!(
        fs::read(a.join("06_segments.txt")).unwrap(),
        fs::read(b.join("06_segments.txt")).unwrap()
    );
}

#[test]
fn corrupted_grid_fails_at_metrics_with_earlier_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("toy");
    copy_dir(&fixture(), &dir);
    let grid = dir.join("grid.sdfg");
    let bytes = fs::read(&grid).unwrap();
    fs::write(&grid, &bytes[..bytes.len() / 2]).unwrap();
    let out = tmp.path().join("out");
    let o = duetkit(&[
        "pipeline",
        "--config",
        s(&dir.join("pipeline.cfg")),
        "--mock",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(9));
    assert!(String::from_utf8_lossy(&o.stderr).contains("metrics"));
    let names: Vec<String> = tree(&out).into_keys().collect();
    for prefix in ["01", "02", "03", "04", "05", "06", "07", "08", "09", "10"] {
        assert!(
            names.iter().any(|n| n.starts_with(prefix)),
            "missing {prefix} in {names:?}"
        );
    }
    assert!(!names.iter().any(|n| n.starts_with("11")));
}

#[test]
fn missing_config_input_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("toy");
    copy_dir(&fixture(), &dir);
    fs::remove_file(dir.join("motion_b.motion")).unwrap();
    let o = duetkit(&["pipeline", "--config", s(&dir.join("pipeline.cfg")), "--mock"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn metrics_on_the_fixture_are_zero() {
    let f = fixture();
    let o = duetkit(&[
        "metrics",
        "--motion-a",
        s(&f.join("motion_a.motion")),
        "--motion-b",
        s(&f.join("motion_b.motion")),
        "--grid",
        s(&f.join("grid.sdfg")),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for key in ["fs=", "fp=", "hsp=", "hhp="] {
        let line = text
            .lines()
            .find(|l| l.starts_with(key))
            .unwrap_or_else(|| panic!("no {key} in\n{text}"));
        let v: f64 = line[key.len()..].split_whitespace().next().unwrap().parse().unwrap();
        assert_eq!(v, 0.0, "{line}");
    }
}

#[test]
fn sync_align_reproduces_the_worked_example() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.txt");
    let b = tmp.path().join("b.txt");
    fs::write(&a, "Orders A: [None, sofa, HHI: They hug]\n").unwrap();
    fs::write(&b, "[None, None, [chair, sit], table, HHI: They hug]\n").unwrap();
    let o = duetkit(&["sync", "align", "--orders-a", s(&a), "--orders-b", s(&b)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.contains("orders_a=2"), "{first}");
    assert!(first.contains("orders_b=4"), "{first}");
    assert!(first.contains("target_frames=200"), "{first}");
    assert!(first.contains("pad_a=100"), "{first}");
    assert!(first.contains("pad_b=0"), "{first}");
}

#[test]
fn retrieve_hands_writes_a_fitted_clip() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixture();
    let out = tmp.path().join("hands.hand");
    let o = duetkit(&[
        "retrieve-hands",
        "--index",
        s(&f.join("hand_index.tsv")),
        "--query-vec",
        s(&f.join("query.txt")),
        "--clips",
        s(&f.join("clips")),
        "--target-len",
        "37",
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("frames=37"));
    assert!(out.exists());
}

#[test]
fn plot_distribute_prints_queues() {
    let tmp = tempfile::tempdir().unwrap();
    let orders = tmp.path().join("orders.txt");
    fs::write(
        &orders,
        "Orders A: [None, [sofa, sit], HHI: They hug]\nOrders B: [table, HHI: They hug]\n",
    )
    .unwrap();
    let o = duetkit(&["plot", "distribute", "--orders", s(&orders)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("hhi.0"));
}

#[test]
fn plot_stages_work_offline() {
    let tmp = tempfile::tempdir().unwrap();
    let f = fixture();
    let (scene, nav) = (f.join("scene.txt"), f.join("navgrid.pbm"));
    let plot = tmp.path().join("plot.txt");
    let orders = tmp.path().join("orders.txt");
    let revised = tmp.path().join("revised.txt");
    let base = ["--scene", s(&scene), "--navgrid", s(&nav), "--mock"];
    let run = |extra: &[&str]| {
        let mut args: Vec<&str> = vec!["plot"];
        args.extend_from_slice(&extra[..1]);
        args.extend_from_slice(&base);
        args.extend_from_slice(&extra[1..]);
        duetkit(&args)
    };
    assert!(run(&["generate", "--out", s(&plot)]).status.success());
    assert!(run(&["extract", "--plot", s(&plot), "--out", s(&orders)]).status.success());
    assert!(run(&["revise", "--orders", s(&orders), "--out", s(&revised)]).status.success());
    assert!(fs::read_to_string(&revised).unwrap().contains("Orders A:"));
}

#[test]
fn scene_synth_writes_a_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g.sdfg");
    let o = duetkit(&[
        "scene-synth",
        "--motion",
        s(&fixture().join("motion_a.motion")),
        "--dims",
        "16",
        "--seed",
        "5",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("free_nodes="));
    assert_eq!(&fs::read(&out).unwrap()[..4], b"SDFG");
}

#[test]
fn bad_arguments_fail() {
    let o = duetkit(&["revise", "--motion-a", "/nonexistent.motion"]);
    assert!(!o.status.success());
    let o = duetkit(&[
        "metrics",
        "--motion-a",
        "/nonexistent.motion",
        "--grid",
        "/nonexistent.sdfg",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
