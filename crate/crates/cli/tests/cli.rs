use std::path::Path;
use std::process::{Command, Output};

fn heisenlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heisenlab"))
        .args(args)
        .env_remove("HEISENLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn lift_of_unit_square_ends_at_minus_four() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "square.json", r#"{"samples": [[0,0],[1,0],[1,1],[0,1]], "closed": true}"#);
    let o = heisenlab(&["lift", "--curve", &curve, "--t0", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x1,y1,t");
    assert_eq!(*lines.last().unwrap(), "0,0,-4");
}

#[test]
fn lift_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "path.json", "[[0,0],[3,4]]");
    let out = dir.path().join("lift.csv");
    let o = heisenlab(&["lift", "--curve", &curve, "--t0", "-1.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "x1,y1,t\n0,0,-1.5\n3,4,-1.5\n");
    let side = json(&dir.path().join("lift.json"));
    assert_eq!(side["length"], 5.0);
}

#[test]
fn decay_table_has_slope_near_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay.csv");
    let o = heisenlab(&["decay", "--k", "2", "--n", "1", "--j", "1", "--mdiv", "2,4,8,16", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().count(), 5);
    let side = json(&dir.path().join("decay.json"));
    let slope = side["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() <= 0.3, "{slope}");
    assert_eq!(side["config"]["mdivs"], serde_json::json!([2, 4, 8, 16]));
}

#[test]
fn decay_rejects_k_not_above_n() {
    let o = heisenlab(&["decay", "--k", "2", "--n", "2", "--j", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k > n"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["lift", "--bogus"][..],
        &["no-such-command"],
        &["decay", "--k", "0"],
        &["contact-report", "--generator", "nope"],
        &["lift"],
    ] {
        let o = heisenlab(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(heisenlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn thread_variable_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_heisenlab"))
            .args(["decay", "--mdiv", "2,4"])
            .env("HEISENLAB_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
    assert!(run("1").status.success());
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"k": 2, "n": 1, "j": 1, "mdiv": [2, 4, 8], "size": 33}"#);
    let o = heisenlab(&["decay", "--config", &cfg, "--mdiv", "2,4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(stderr(&o).contains(r#""size":33"#), "{}", stderr(&o));

    let bad = write(dir.path(), "bad.json", r#"{"kk": 2}"#);
    assert_eq!(heisenlab(&["decay", "--config", &bad]).status.code(), Some(1));
    let guarded = write(dir.path(), "guarded.json", r#"{"k": 1, "n": 1}"#);
    let o = heisenlab(&["decay", "--config", &guarded]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k > n"));
}

#[test]
fn geodesic_reports_the_arc_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("geo.csv");
    let o = heisenlab(&["geodesic", "--from", "0,0,0", "--to", r#"{"n":1,"z":[1,0],"t":4}"#, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = json(&dir.path().join("geo.json"));
    let d = side["distance"].as_f64().unwrap();
    assert!((d - 2.6831297778598486).abs() <= 1e-9, "{d}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().last().unwrap(), "1,0,4");
}

#[test]
fn extend_checks_the_declared_constant() {
    let dir = tempfile::tempdir().unwrap();
    let knots = r#"{"domain": {"kind": "interval", "a": 0, "b": 1},
        "knots": [{"param": 0, "value": {"n": 1, "z": [0, 0], "t": 0}},
                  {"param": 1, "value": {"n": 1, "z": [0, 0], "t": 4}}],
        "lipschitz": LIP}"#;
    let ok = write(dir.path(), "ok.json", &knots.replace("LIP", "3.6"));
    let out = dir.path().join("ext.csv");
    let o = heisenlab(&["extend", "--knots", &ok, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = json(&dir.path().join("ext.json"));
    assert!(side["measured_lipschitz"].as_f64().unwrap() <= 3.6 * (1.0 + 1e-6));

    let tight = write(dir.path(), "tight.json", &knots.replace("LIP", "3"));
    let o = heisenlab(&["extend", "--knots", &tight]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Lipschitz"), "{}", stderr(&o));
}

#[test]
fn isometry_output_is_exact() {
    let o = heisenlab(&["isometry", "--n", "3", "--j", "2", "--seed", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["orthogonality_defect", "symplectic_defect", "image_residual"] {
        assert!(v[key].as_f64().unwrap() <= 1e-12, "{key} = {}", v[key]);
    }
    assert_eq!(v["source"]["basis"].as_array().unwrap().len(), 2);
}

#[test]
fn map_analyses_run_on_generators() {
    let o = heisenlab(&["contact-report", "--generator", "quadratic", "--size", "17"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next().unwrap(), "idx,residual,rank,isotropy_defect");
    assert_eq!(stdout(&o).lines().count(), 1 + 15 * 15);
    assert!(stderr(&o).contains(r#""flagged":0"#));

    let o = heisenlab(&["loop-residual", "--generator", "twisted"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row: Vec<String> = stdout(&o).lines().nth(1).unwrap().split(',').map(String::from).collect();
    assert!(row[6].parse::<f64>().unwrap() <= 0.05);

    let o = heisenlab(&["holder", "--generator", "pure-t"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert!((side["alpha_hat"].as_f64().unwrap() - 0.5).abs() <= 0.02);

    let o = heisenlab(&["collide", "--generator", "isotropic-lift"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().count() > 1);

    let o = heisenlab(&["content", "--generator", "lagrangian-graph", "--mdiv", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 4);

    let o = heisenlab(&["content", "--generator", "isotropic-axis", "--r-max", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn sampled_map_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..25)
        .map(|f| {
            let (a, b) = ((f / 5) as f64 / 4.0, (f % 5) as f64 / 4.0);
            format!("[{a}, 0, {b}]")
        })
        .collect();
    let map = format!(
        r#"{{"k": 2, "n": 1, "box": [[0, 1], [0, 1]], "shape": [5, 5], "values": [{}]}}"#,
        values.join(",")
    );
    let path = write(dir.path(), "map.json", &map);
    let o = heisenlab(&["contact-report", "--map", &path]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = heisenlab(&["contact-report", "--map", &path, "--generator", "quadratic"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["contact-report", "--generator", "isotropic-lift", "--k", "3", "--n", "2", "--j", "2", "--size", "17", "--seed", "9"],
        &["collide", "--generator", "quadratic", "--size", "33", "--seed", "4"],
        &["content", "--generator", "quadratic", "--size", "33", "--seed", "4"],
    ];
    for (c, args) in cases.iter().enumerate() {
        let mut outputs = Vec::new();
        for (r, extra) in [&[][..], &[], &["--sequential"]].iter().enumerate() {
            let out = dir.path().join(format!("{c}_{r}.csv"));
            let mut full: Vec<&str> = args.to_vec();
            full.extend_from_slice(extra);
            full.extend(["--out", out.to_str().unwrap()]);
            let o = heisenlab(&full);
            assert!(o.status.success(), "{}", stderr(&o));
            outputs.push((std::fs::read(&out).unwrap(), std::fs::read(out.with_extension("json")).unwrap()));
        }
        assert!(outputs.iter().all(|o| *o == outputs[0]), "case {c} differs");
    }
}

#[test]
fn trace_lists_every_anchor_as_passing() {
    let o = heisenlab(&["trace"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut rdr = csv_rows(&out);
    assert_eq!(rdr.remove(0), ["anchor", "statement", "module", "test", "status", "detail"]);
    let anchors: Vec<&str> = rdr.iter().map(|r| r[0].as_str()).collect();
    for a in [
        "left-invariant-frame",
        "contact-form",
        "group-law",
        "koranyi-metric",
        "metric-comparison",
        "cc-length-of-lift",
        "closed-curve-zero-area",
        "interval-extension",
        "circle-extension",
        "horizontal-derivative",
        "symplectic-form",
        "complement-dimension",
        "isotropic-isometry",
        "isotropic-koranyi-euclidean",
        "rank-bound",
        "loop-integral",
        "affine-normalization",
        "cube-covering",
        "hausdorff-content",
        "content-decay",
        "t-component-differentiable",
        "lipschitz-class-comparison",
        "no-injective-map",
    ] {
        assert!(anchors.contains(&a), "missing {a}");
    }
    for r in &rdr {
        assert_eq!(r[4], "pass", "{r:?}");
    }
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}
