use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn turan(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turan"))
        .args(args)
        .env("TURAN_CACHE", cache)
        .output()
        .expect("run turan")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn construct_prefix_writes_system_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let out = dir.path().join("p.json");
    let run = turan(
        &[
            "construct",
            "prefix",
            "--n",
            "5",
            "--s",
            "4",
            "--r",
            "3",
            "--out",
            out.to_str().unwrap(),
        ],
        &cache,
    );
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(json(&run)["edges"], 4);
    let system: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(system["edges"].as_array().unwrap().len(), 4);

    let manifest_path = dir.path().join("p.json.manifest.json");
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "construct prefix");
    assert_eq!(manifest["parameters"]["s"], 4);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn construct_recursive_is_deterministic_and_verified() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let args = |out: &str| {
        vec![
            "construct",
            "recursive",
            "--n",
            "8",
            "--r",
            "3",
            "--big-r",
            "1",
            "--k",
            "2",
            "--c",
            "1.0",
            "--seed",
            "11",
            "--out",
        ]
        .into_iter()
        .map(String::from)
        .chain([out.to_string()])
        .collect::<Vec<_>>()
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let argv = args(path.to_str().unwrap());
        let run = turan(&argv.iter().map(String::as_str).collect::<Vec<_>>(), &cache);
        assert_eq!(
            run.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
        assert_eq!(json(&run)["verified"], true);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let verify = turan(
        &["verify", "--input", a.to_str().unwrap(), "--s", "4"],
        &cache,
    );
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(json(&verify)["is_turan"], true);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"n":6,"r":3,"edges":[]}"#).unwrap();
    let run = turan(
        &["verify", "--input", empty.to_str().unwrap(), "--s", "4"],
        &cache,
    );
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(json(&run)["witness"], serde_json::json!([0, 1, 2, 3]));

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ nope").unwrap();
    let run = turan(
        &["verify", "--input", junk.to_str().unwrap(), "--s", "4"],
        &cache,
    );
    assert_eq!(run.status.code(), Some(2));

    let run = turan(
        &[
            "verify",
            "--input",
            empty.to_str().unwrap(),
            "--s",
            "4",
            "--budget",
            "3",
        ],
        &cache,
    );
    assert_eq!(run.status.code(), Some(4));
}

#[test]
fn sampled_verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let input = dir.path().join("h.txt");
    std::fs::write(&input, "# n=7 r=2\n0 1\n2 3\n4 5\n").unwrap();
    let args = [
        "verify",
        "--input",
        input.to_str().unwrap(),
        "--s",
        "3",
        "--mode",
        "sample",
        "--trials",
        "50",
        "--seed",
        "9",
    ];
    let a = turan(&args, &cache);
    let b = turan(&args, &cache);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["mode"], "sampled");
}

#[test]
fn solve_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let run = turan(&["solve", "--n", "5", "--s", "4", "--r", "3"], &cache);
    assert_eq!(run.status.code(), Some(0));
    let first = json(&run);
    assert_eq!(first["optimum"], 3);
    assert_eq!(first["proven_optimal"], true);
    assert!(first["nodes_explored"].as_u64().unwrap() > 0);
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&cache).unwrap()).unwrap();
    assert_eq!(stored["5,4,3"]["optimum"], 3);

    let again = json(&turan(
        &["solve", "--n", "5", "--s", "4", "--r", "3"],
        &cache,
    ));
    assert_eq!(again["nodes_explored"], 0);
    assert_eq!(again["witness"], first["witness"]);
}

#[test]
fn bounds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let run = turan(&["bounds", "--big-r", "1"], &cache);
    assert_eq!(run.status.code(), Some(0));
    let cell = json(&run);
    let alpha = cell["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["name"] == "alpha")
        .unwrap();
    assert!((alpha["value"].as_f64().unwrap() - 4.911).abs() <= 1e-3);

    let run = turan(
        &[
            "bounds", "--r", "1000000", "--big-r", "1000", "--format", "csv",
        ],
        &cache,
    );
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with("r,R,bound_name,kind,value,assumptions\n"));
    assert!(text.contains(",sidorenko,"));
    assert!(text.contains(",thm12i_chain_ratio,"));
}

#[test]
fn table_is_ordered_by_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let run = turan(
        &["table", "--grid", "r=1000,100;R=3,1", "--format", "json"],
        &cache,
    );
    assert_eq!(run.status.code(), Some(0));
    let cells: Vec<(u64, u64)> = String::from_utf8(run.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["r"].as_u64().unwrap(), v["big_r"].as_u64().unwrap())
        })
        .collect();
    assert_eq!(cells, vec![(1000, 3), (1000, 1), (100, 3), (100, 1)]);

    let bad = turan(&["table", "--grid", "r=5"], &cache);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn certify_and_construction_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let run = turan(&["certify-lll", "--r", "1000", "--big-r", "10"], &cache);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(json(&run)["certificate"]["condition_holds"], true);
    let run = turan(&["certify-lll", "--big-r", "10"], &cache);
    assert_eq!(run.status.code(), Some(2));

    let out = dir.path().join("f.json");
    let run = turan(
        &[
            "construct",
            "frankl-rodl",
            "--n",
            "6",
            "--s",
            "4",
            "--r",
            "3",
            "--ell",
            "5",
            "--seed",
            "1",
            "--max-rounds",
            "10",
            "--out",
            out.to_str().unwrap(),
        ],
        &cache,
    );
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn blowup_of_solved_system() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let base = dir.path().join("base.json");
    std::fs::write(&base, r#"{"n":4,"r":2,"edges":[[0,1],[2,3]]}"#).unwrap();
    let out = dir.path().join("b.json");
    let run = turan(
        &[
            "construct",
            "blowup",
            "--input",
            base.to_str().unwrap(),
            "--m",
            "2",
            "--out",
            out.to_str().unwrap(),
        ],
        &cache,
    );
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let summary = json(&run);
    assert_eq!(summary["s"], 3);
    assert_eq!(summary["verified"], true);
    assert_eq!(summary["details"]["cap_holds"], true);
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("b.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
}

fn schema(name: &str) -> jsonschema::Validator {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    let load = |file: &str| -> Value {
        serde_json::from_str(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap()
    };
    jsonschema::options()
        .with_resource(
            "system.schema.json",
            jsonschema::Resource::from_contents(load("system.schema.json")).unwrap(),
        )
        .build(&load(name))
        .unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{doc}");
}

#[test]
fn outputs_match_shipped_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let read =
        |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };

    let out = dir.path().join("g.json");
    let run = turan(
        &[
            "construct",
            "recursive",
            "--n",
            "8",
            "--r",
            "3",
            "--big-r",
            "1",
            "--k",
            "2",
            "--c",
            "1.0",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ],
        &cache,
    );
    assert_valid("construct_summary.schema.json", &json(&run));
    assert_valid("system.schema.json", &read(&out));
    assert_valid(
        "manifest.schema.json",
        &read(&dir.path().join("g.json.manifest.json")),
    );

    let run = turan(
        &["verify", "--input", out.to_str().unwrap(), "--s", "4"],
        &cache,
    );
    assert_valid("verify_report.schema.json", &json(&run));
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"n":6,"r":3,"edges":[]}"#).unwrap();
    let run = turan(
        &[
            "verify",
            "--input",
            empty.to_str().unwrap(),
            "--s",
            "4",
            "--mode",
            "sample",
            "--trials",
            "5",
            "--seed",
            "1",
        ],
        &cache,
    );
    assert_valid("verify_report.schema.json", &json(&run));

    let run = turan(&["solve", "--n", "6", "--s", "4", "--r", "3"], &cache);
    assert_valid("solve_result.schema.json", &json(&run));
    assert_valid("value_cache.schema.json", &read(&cache));

    for args in [
        &["bounds", "--r", "1000", "--big-r", "3", "--eps1", "0.1"][..],
        &["bounds", "--r", "10000000", "--big-r", "10000"][..],
    ] {
        assert_valid("bounds_cell.schema.json", &json(&turan(args, &cache)));
    }
    let run = turan(
        &["table", "--grid", "r=100,1000;R=1,2", "--format", "json"],
        &cache,
    );
    for line in String::from_utf8(run.stdout).unwrap().lines() {
        assert_valid(
            "bounds_cell.schema.json",
            &serde_json::from_str(line).unwrap(),
        );
    }

    for args in [
        &["certify-lll", "--r", "1000000", "--big-r", "1000"][..],
        &["certify-lll", "--r", "1000", "--big-r", "10"][..],
        &[
            "certify-lll",
            "--n",
            "50",
            "--s",
            "6",
            "--r",
            "3",
            "--ell",
            "2",
        ][..],
    ] {
        assert_valid("certify.schema.json", &json(&turan(args, &cache)));
    }
}
