use std::process::{Command, Output};

fn annulus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annulus"))
        .args(args)
        .env_remove("ANNULUS_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn completeness_table_for_power_two() {
    let o = annulus(&["completeness", "--map", "power", "--params", r#"{"d":2}"#, "--nmax", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<Vec<String>> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().map(str::to_owned).collect())
        .collect();
    let realized: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(realized, ["1", "3", "7"]);
    assert!(rows.iter().all(|r| r[4] == "COMPLETE"));
}

#[test]
fn index_on_outer_circle_is_the_degree() {
    let o = annulus(&["index", "--map", "power", "--params", r#"{"d":2}"#, "--curve", "circle:r=2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2");
    let o = annulus(&["index", "--map", "power", "--params", r#"{"d":3}"#, "--curve", "circle:r=0.5,n=100"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn index_from_a_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    std::fs::write(&path, "[[-2,-2],[2,-2],[2,2],[-2,2]]").unwrap();
    let o = annulus(&["index", "--map", "power", "--params", r#"{"d":5}"#, "--curve", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn lemmas_all_pass() {
    let o = annulus(&["lemmas"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn json_output_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (i, workers) in ["1", "3", "8"].iter().enumerate() {
        let path = dir.path().join(format!("r{i}.json"));
        let o = Command::new(env!("CARGO_BIN_EXE_annulus"))
            .args(["completeness", "--map", "perturbed_power", "--nmax", "3", "--json", path.to_str().unwrap()])
            .env("ANNULUS_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success());
        texts.push(std::fs::read(&path).unwrap());
    }
    assert!(texts.windows(2).all(|w| w[0] == w[1]));
    let v: serde_json::Value = serde_json::from_slice(&texts[0]).unwrap();
    assert_eq!(v[2]["verdict"], "COMPLETE");
}

#[test]
fn csv_rows_match_certified_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("boxes.csv");
    let o = annulus(&[
        "completeness",
        "--map",
        "power",
        "--params",
        r#"{"d":3}"#,
        "--nmax",
        "2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,k,x_lo,x_hi,y_lo,y_hi,degree,residue");
    assert_eq!(lines.count(), 2 + 8);
}

#[test]
fn fixed_points_emits_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("fp.json");
    let o = annulus(&[
        "fixed-points",
        "--map",
        "power",
        "--lift-k",
        "1",
        "--region=-1.3,-0.7,-0.5,0.5",
        "--resolution",
        "1e-3",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["certified"].as_array().unwrap().len(), 1);
}

#[test]
fn growth_reports_rate_against_log_degree() {
    let o = annulus(&["growth", "--map", "power", "--nmax", "3"]);
    assert!(o.status.success());
    let last = stdout(&o).lines().last().unwrap().to_owned();
    assert!(last.starts_with("rate 0.648"), "{last}");
    assert!(last.contains("ln|d| 0.693147"));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("annulus.toml");
    std::fs::write(&cfg, "resolution = 0.5\n").unwrap();
    let json = dir.path().join("fp.json");
    let args = |extra: &[&str]| {
        let mut a = vec![
            "fixed-points",
            "--config",
            cfg.to_str().unwrap(),
            "--map",
            "power",
            "--region=-0.3,0.3,-0.3,0.3",
            "--json",
            json.to_str().unwrap(),
        ];
        a.extend_from_slice(extra);
        a.into_iter().map(str::to_owned).collect::<Vec<_>>()
    };
    let leaf = |args: Vec<String>| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert!(annulus(&refs).status.success());
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        let b = &v["certified"][0]["box"];
        b["x_hi"].as_f64().unwrap() - b["x_lo"].as_f64().unwrap()
    };
    assert!(leaf(args(&[])) > 0.1);
    assert!(leaf(args(&["--resolution", "0.01"])) < 0.01);
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let refs: Vec<String> = args(&[]);
    let o = annulus(&refs.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn errors_are_json_with_exit_codes() {
    let o = annulus(&["completeness", "--map", "nope", "--nmax", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "usage");

    assert_eq!(annulus(&["frobnicate"]).status.code(), Some(2));

    // Even periods of a degree -1 map have no class modulus.
    let o = annulus(&[
        "completeness",
        "--map",
        "counterexample_deg_minus1",
        "--nmax",
        "2",
        "--region=0,1,-0.05,0.05",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn zoo_list_names_every_entry() {
    let o = annulus(&["zoo", "list"]);
    let out = stdout(&o);
    for id in ["power", "perturbed_power", "ends_attracting", "ends_repelling", "end_swap", "counterexample_deg_minus1"] {
        assert!(out.lines().any(|l| l.starts_with(id)), "{id}");
    }
}
