use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dimlab::dataset::{read_csv, CsvOptions};
use dimlab::geometry::{lookup, sample_manifold, SampleConfig};
use dimlab::numerics::fmt::fmt_sig;
use dimlab::tuning::tuned_estimate;
use dimlab::{EstimatorConfig, Method, RngStream};

fn dimlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimlab")).args(args).output().expect("spawn dimlab")
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/swiss_roll_300.csv")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        stdout(&dimlab(&["sample", "--manifold", "M11", "--n", "10", "--seed", "1", "--out", path_str(p)]));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sphere_rows_have_unit_norm() {
    let text = stdout(&dimlab(&["sample", "--manifold", "M11", "--n", "1000", "--sigma", "0"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 1000);
    for row in rows {
        let v: Vec<f64> = row.split(',').map(|t| t.parse().unwrap()).collect();
        assert_eq!(v.len(), 10);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-9, "norm {norm}");
    }
}

#[test]
fn deformed_sphere_width() {
    let text = stdout(&dimlab(&["sample", "--manifold", "M43", "--n", "100"]));
    assert_eq!(text.lines().count(), 100);
    assert!(text.lines().all(|l| l.split(',').count() == 6));
}

#[test]
fn sample_matches_library() {
    let text = stdout(&dimlab(&["sample", "--manifold", "M9", "--n", "50", "--seed", "4", "--dist", "beta:2,5"]));
    let cfg = SampleConfig { distribution: "beta:2,5".parse().unwrap(), ..SampleConfig::uniform(50, 4) };
    let cloud = sample_manifold(&lookup("M9").unwrap(), &cfg).unwrap();
    let parsed: Vec<f64> = text.lines().flat_map(|l| l.split(',')).map(|t| t.parse().unwrap()).collect();
    assert_eq!(parsed, cloud.data());
}

#[test]
fn bad_inputs_exit_codes() {
    assert_eq!(dimlab(&["sample", "--manifold", "M99"]).status.code(), Some(2));
    assert_eq!(dimlab(&["sample", "--manifold", "M11", "--dist", "beta:0,1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("missing/out.csv");
    assert_eq!(
        dimlab(&["sample", "--manifold", "M11", "--n", "5", "--out", path_str(&unwritable)]).status.code(),
        Some(3)
    );
    let absent = dir.path().join("absent.csv");
    assert_eq!(dimlab(&["estimate", "--input", path_str(&absent)]).status.code(), Some(3));
    assert_eq!(dimlab(&["suite", "--preset", "suite-9000z"]).status.code(), Some(2));
    assert_eq!(dimlab(&["sweep", "--preset", "table-zz"]).status.code(), Some(2));
}

#[test]
fn ragged_csv_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ragged.csv");
    std::fs::write(&p, "1,2,3\n4,5,6\n7,8\n").unwrap();
    let o = dimlab(&["estimate", "--input", path_str(&p), "--method", "mle", "--K", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 3"), "{err}");

    std::fs::write(&p, "1,2\n3,x\n").unwrap();
    let o = dimlab(&["estimate", "--input", path_str(&p)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2") && err.contains("column 2"), "{err}");
}

#[test]
fn grid_too_large_for_n_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("small.csv");
    let text: String = (0..12).map(|i| format!("{i},{}\n", i * i)).collect();
    std::fs::write(&p, text).unwrap();
    let o = dimlab(&["estimate", "--input", path_str(&p), "--method", "mle", "--tune"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let o = dimlab(&["estimate", "--input", path_str(&p), "--method", "mle", "--K", "50"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn twonn_on_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("line.csv");
    let mut rng = RngStream::new(5, 0);
    let text: String = (0..500)
        .map(|_| {
            let t = rng.uniform_range(-3.0, 3.0);
            format!("{},{},{}\n", t, 2.0 * t, -t)
        })
        .collect();
    std::fs::write(&p, text).unwrap();
    let out = stdout(&dimlab(&["estimate", "--input", path_str(&p), "--method", "twonn", "--csv"]));
    let row = out.lines().nth(1).unwrap();
    let d: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((0.8..=1.2).contains(&d), "{d}");
}

#[test]
fn delimiter_and_header_options() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("tabbed.tsv");
    let mut text = String::from("x\ty\n");
    for i in 0..40 {
        let t = i as f64 * 0.1;
        text.push_str(&format!("{}\t{}\n", t.cos(), t.sin()));
    }
    std::fs::write(&p, text).unwrap();
    let out = stdout(&dimlab(&[
        "estimate", "--input", path_str(&p), "--method", "mle", "--K", "5", "--delimiter", "tab", "--header", "--csv",
    ]));
    assert!(out.starts_with("method,d_hat"));
    assert!(out.lines().nth(1).unwrap().starts_with("mle,"));
}

/// `--method all --tune` on the fixture must equal the library pipeline.
#[test]
fn tuned_pipeline_matches_library() {
    let fx = fixture();
    let out = stdout(&dimlab(&["estimate", "--input", path_str(&fx), "--method", "all", "--tune", "--csv"]));
    let cloud = read_csv(&fx, &CsvOptions::default()).unwrap();
    assert_eq!((cloud.n(), cloud.p()), (300, 4));

    // the fixture is the catalog swiss roll at seed 0
    let regenerated = sample_manifold(&lookup("M7").unwrap(), &SampleConfig::uniform(300, 0)).unwrap();
    assert_eq!(regenerated.data(), cloud.data());

    let lines: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(lines.len(), Method::ALL.len());
    for (line, m) in lines.iter().zip(Method::ALL) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], m.name());
        let t = tuned_estimate(&cloud, &EstimatorConfig::new(m), None).unwrap();
        assert_eq!(fields[1], fmt_sig(t.d_hat(), 17), "{m}");
        if let (Some(g), Some((lo, hi))) = (&t.grid, t.window) {
            assert_eq!(fields[4], fmt_sig(g.values[lo - 1], 17));
            assert_eq!(fields[5], fmt_sig(g.values[hi - 1], 17));
        }
    }
}

#[test]
fn danco_gated_above_p_100() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("wide.csv");
    let mut text = String::new();
    for i in 0..30 {
        let row: Vec<String> = (0..101).map(|j| (((i * 31 + j * 17) % 23) as f64 / 7.0).to_string()).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&p, text).unwrap();
    let out = stdout(&dimlab(&["estimate", "--input", path_str(&p), "--method", "all", "--K", "5", "--alpha", "2", "--csv"]));
    assert!(!out.contains("danco"));
    assert_eq!(out.lines().count(), Method::ALL.len());
    let out = stdout(&dimlab(&[
        "estimate", "--input", path_str(&p), "--method", "all", "--K", "5", "--alpha", "2", "--csv", "--with-danco",
    ]));
    assert!(out.contains("\ndanco,"));
}

#[test]
fn table_p_preset_is_constant_across_p() {
    let out = stdout(&dimlab(&[
        "sweep", "--preset", "table-p", "--replicates", "2", "--estimators", "mle,twonn,ca_pca",
    ]));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 30);
    for m in ["mle", "twonn", "ca_pca"] {
        let means: Vec<f64> = rows.iter().filter(|r| r[1] == m).map(|r| r[5].parse().unwrap()).collect();
        assert_eq!(means.len(), 10);
        assert!(means.iter().all(|&x| (x - means[0]).abs() <= 1e-9), "{m}: {means:?}");
    }
}

#[test]
fn manual_sweep_and_suite_subset() {
    let out = stdout(&dimlab(&[
        "sweep", "--manifold", "M9", "--factor", "K", "--values", "5,10", "--n", "200", "--estimators", "mle",
        "--replicates", "2",
    ]));
    assert_eq!(out.lines().count(), 3);
    assert!(out.starts_with("manifold,method,factor"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.csv");
    let args = [
        "suite", "--preset", "suite-500u", "--manifolds", "M5,M9", "--estimators", "twonn", "--replicates", "2",
        "--seed", "3", "--out", path_str(&path),
    ];
    stdout(&dimlab(&args));
    let first = std::fs::read_to_string(&path).unwrap();
    assert_eq!(first.lines().count(), 3);
    stdout(&dimlab(&args));
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    assert_eq!(dimlab(&["suite", "--preset", "table-n"]).status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_dimlab"))
            .env("DIMLAB_THREADS", threads)
            .args(["sweep", "--manifold", "M5", "--factor", "n", "--values", "100", "--estimators", "twonn", "--replicates", "3"])
            .output()
            .unwrap();
        stdout(&o)
    };
    assert_eq!(run("1"), run("2"));
    let bad = Command::new(env!("CARGO_BIN_EXE_dimlab"))
        .env("DIMLAB_THREADS", "zero")
        .args(["sample", "--manifold", "M5", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
