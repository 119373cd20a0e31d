use std::path::Path;
use std::process::{Command, Output};

fn hlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlab"))
        .args(args)
        .output()
        .expect("hlab runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        "seed = 3\ngrid = 8\n[samples]\ninterior = 256\nboundary = 64\n\
         [sharpness]\nepsilons = [0.001, 0.01, 0.1]\n\
         [suite]\ninstances = 10\nflows = 2\ncoercive_fields = 20\n",
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn distance_prints_the_vertical_loop_length() {
    let out = hlab(&["distance", "0,0,4", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9, "{text}");
}

#[test]
fn usage_and_io_errors_exit_with_two() {
    assert_eq!(hlab(&["suite", "nope"]).status.code(), Some(2));
    assert_eq!(hlab(&["--config", "/nonexistent/x.toml", "fit"]).status.code(), Some(2));
    assert_eq!(hlab(&["--grid", "1", "fit"]).status.code(), Some(2));
    assert_eq!(hlab(&[]).status.code(), Some(2));
}

#[test]
fn chain_outside_the_domain_is_an_error() {
    assert_eq!(hlab(&["chain", "5,0,0"]).status.code(), Some(2));
    let out = hlab(&["chain", "0.5,0.1,0.2", "--kappa", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}

#[test]
fn suite_output_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut runs = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let out = hlab(&[
            "--config",
            &cfg,
            "--workers",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
            "suite",
            "lemma2",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push(std::fs::read(out_dir.join("lemma2.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    assert!(String::from_utf8_lossy(&runs[0]).contains("suite,case,status,value,bound,margin,detail"));
}

#[test]
fn sharpness_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = hlab(&["--config", &cfg, "--out", out_dir.to_str().unwrap(), "sharpness"]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let slopes = std::fs::read_to_string(out_dir.join("slopes.csv")).unwrap();
    assert_eq!(slopes.lines().count(), 4);
    let table = std::fs::read_to_string(out_dir.join("sharpness.csv")).unwrap();
    assert!(table.contains("epsilon,sup_d,sup_dH,sobolev_dev"));
}

#[test]
fn fit_round_trips_a_map_file() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("map.txt");
    let grid = heisenberg_rigidity::field::Grid::cube(2.0, 17).unwrap();
    let f = heisenberg_rigidity::field::SampledMap::dilation(grid, 1.01).unwrap();
    let mut buf = Vec::new();
    heisenberg_rigidity::field::write_map(&f, &mut buf).unwrap();
    std::fs::write(&map_path, buf).unwrap();
    let out = hlab(&["--grid", "6", "fit", "--map", map_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains('='));
}
