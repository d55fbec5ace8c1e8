use std::path::Path;
use std::process::Command;

use gl2ind_cli::{emit, preset, run, Format, PartialConfig, RunOptions, Status, Suite};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gl2ind"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn ramified_config_passes_with_witness() {
    let config = PartialConfig::parse("p = 3\nf = 1\ne = 2\nr = [0]\nnu = [1]\ntrunc = 2\n")
        .unwrap()
        .resolve()
        .unwrap();
    let report = run(&config, &RunOptions::default()).unwrap();
    assert!(report.passed());
    let witness = report.record("mainlemma.witness").unwrap();
    assert_eq!(witness.status, Status::Pass);
    for key in ["R1", "R1'", "Q", "V", "W"] {
        assert!(witness.dims.contains_key(key), "missing {key}");
    }
}

#[test]
fn qp_negative_suite_passes() {
    let config = PartialConfig::parse("p = 3\nf = 1\ne = 1\nr = [0]\nsuites = [\"negative\"]\n")
        .unwrap()
        .resolve()
        .unwrap();
    let report = run(&config, &RunOptions::default()).unwrap();
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.records[0].status, Status::Pass);
}

#[test]
fn empty_suite_list_passes_with_no_records() {
    let config = PartialConfig::parse("p = 2\nr = [1]\nsuites = []\n").unwrap().resolve().unwrap();
    let report = run(&config, &RunOptions::default()).unwrap();
    assert!(report.records.is_empty());
    assert!(report.passed());
}

#[test]
fn structured_reports_are_reproducible() {
    let config = preset("unramified-maximal")
        .unwrap()
        .overlay(PartialConfig {
            suites: Some(vec![Suite::Arith, Suite::Hecke, Suite::Mainlemma]),
            seed: Some(7),
            ..PartialConfig::default()
        })
        .resolve()
        .unwrap();
    let one = emit(&run(&config, &RunOptions { jobs: 1, ..RunOptions::default() }).unwrap(), Format::Json);
    let two = emit(&run(&config, &RunOptions { jobs: 4, ..RunOptions::default() }).unwrap(), Format::Json);
    assert_eq!(one, two);
    let names: Vec<String> = serde_json::from_slice::<serde_json::Value>(&one).unwrap()["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn binary_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}.json"));
        let status = bin()
            .args(["verify", "--preset", "ramified-dim-gt1", "--suites", "arith,mainlemma", "--format", "json", "--jobs", "2"])
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin().args(["verify", "--preset", "qp-control", "--suites", "negative"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let failing = bin()
        .args(["verify", "--preset", "qp-control", "--suites", "negative", "--inject-failure"])
        .output()
        .unwrap();
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stdout).contains("fail     injected.failure"));

    let bad = write_config(dir.path(), "bad.toml", "p = 3\ne = 0\nr = [0]\n");
    let out = bin().args(["verify", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at e:"));

    let typo = write_config(dir.path(), "typo.toml", "p = 3\nrr = [0]\n");
    let out = bin().args(["verify", "--config"]).arg(&typo).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = bin().args(["verify", "--preset", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["verify"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_validation_names_the_field() {
    let cases = [
        ("p = 4\nr = [0]\n", "p"),
        ("p = 3\nr = [3]\n", "r"),
        ("p = 3\nr = [0]\nchi = 5\n", "chi"),
        ("p = 3\nr = [0]\nnu = [0]\n", "nu"),
        ("p = 3\ne = 2\nr = [0]\neisenstein = [-9, 0]\n", "eisenstein"),
    ];
    for (text, key) in cases {
        let err = PartialConfig::parse(text).unwrap().resolve().unwrap_err();
        assert_eq!(err.location, key, "{text}");
    }
}

#[test]
fn preset_file_overrides() {
    let file = PartialConfig::parse("chi = 1\nnu = [2]\n").unwrap();
    let config = preset("ramified-dim-gt1").unwrap().overlay(file).resolve().unwrap();
    assert_eq!((config.p, config.e, config.chi, config.nu.clone()), (3, 2, 1, vec![2]));
}

#[test]
fn text_format_has_one_line_per_record() {
    let config = preset("qp-control")
        .unwrap()
        .overlay(PartialConfig {
            suites: Some(vec![Suite::Arith]),
            ..PartialConfig::default()
        })
        .resolve()
        .unwrap();
    let report = run(&config, &RunOptions::default()).unwrap();
    let text = String::from_utf8(emit(&report, Format::Text)).unwrap();
    assert_eq!(text.lines().count(), report.records.len() + 1);
    assert!(text.ends_with("verdict: pass (5 records)\n"));
}
