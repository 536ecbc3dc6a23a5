use clap::Parser;

use molloc::cli::{main_with_args, run, Invocation};
use molloc::crb::crb;
use molloc::harness::{read_json, ScenarioConfig, SweepResult};

fn invoke(args: &[&str]) -> molloc::Result<String> {
    let inv = Invocation::try_parse_from(std::iter::once("molloc").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    run(&inv, &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn code(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("molloc").chain(args.iter().copied()))
}

#[test]
fn sweep_emits_snr_mse_crb_columns() {
    let out = invoke(&["sweep", "--set", "trials=50"]).unwrap();
    let header = out.lines().next().unwrap();
    for col in ["snr_raw", "snr_db", "mse_m2", "crb_m2"] {
        assert!(header.split(',').any(|h| h == col), "{header}");
    }
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn crb_subcommand_matches_module() {
    let out = invoke(&["crb", "--format", "json"]).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let s = ScenarioConfig::acceptance().validate().unwrap();
    let direct = crb(&s.source, &s.anchors, &s.channel).unwrap();
    assert_eq!(doc["result"]["crb"].as_f64().unwrap(), direct.crb);

    let csv = invoke(&["crb"]).unwrap();
    assert_eq!(column(&csv, "crb_m2")[0].parse::<f64>().unwrap(), direct.crb);
}

#[test]
fn seed_changes_draws_but_not_bound() {
    let a = invoke(&["sweep", "--set", "trials=100", "--seed", "5"]).unwrap();
    let b = invoke(&["sweep", "--set", "trials=100", "--seed", "6"]).unwrap();
    assert_eq!(column(&a, "crb_m2"), column(&b, "crb_m2"));
    assert_ne!(column(&a, "mse_m2"), column(&b, "mse_m2"));
}

#[test]
fn other_subcommands_run() {
    let sim = invoke(&["simulate"]).unwrap();
    assert_eq!(sim.lines().count(), 4);
    let tri = invoke(&["triangulate", "--noise-free"]).unwrap();
    let err: f64 = column(&tri, "squared_error_m2")[0].parse().unwrap();
    assert!(err < 1e-24, "{err}");
    let conv = invoke(&["convergence", "--noise-free"]).unwrap();
    let last: f64 = column(&conv, "squared_error_m2").last().unwrap().parse().unwrap();
    assert!(last <= 1e-18);
    assert!(invoke(&["gradient-descent"]).is_ok());
}

#[test]
fn config_file_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("scenario.toml");
    let mut cfg = ScenarioConfig::acceptance();
    cfg.trials = 40;
    cfg.seed = 9;
    std::fs::write(&cfg_path, cfg.to_toml_string()).unwrap();
    let out = dir.path().join("out.json");
    let args = ["sweep", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "json"];
    assert_eq!(code(&args), 0);
    let doc = read_json::<SweepResult>(&out).unwrap();
    assert_eq!(doc.config, cfg);
    assert_eq!(doc.seed, 9);
}

#[test]
fn peak_model_flag_reaches_config() {
    let inv = Invocation::try_parse_from(["molloc", "crb", "--peak-model", "paper-literal", "--noise-free"]).unwrap();
    let cfg = inv.resolve().unwrap();
    assert_eq!(cfg.channel.peak_model, molloc::channel::PeakModel::PaperLiteral);
    assert!(cfg.channel.noise_free);
    // α underflows under the literal model at these parameters
    assert_eq!(code(&["crb", "--peak-model", "paper-literal"]), 3);
}

#[test]
fn exit_codes_by_category() {
    assert_eq!(code(&["crb"]), 0);
    assert_eq!(code(&["crb", "--set", "channel.bogus=1"]), 2);
    assert_eq!(code(&["crb", "--set", "trials"]), 2);
    assert_eq!(code(&["crb", "--set", "channel.diffusion_m2_per_s=-1"]), 2);
    assert_eq!(code(&["crb", "--set", "geometry.source_m=[5e-5, 0.0]"]), 2);
    assert_eq!(code(&["bogus-subcommand"]), 2);
    assert_eq!(code(&["crb", "--config", "/nonexistent/scenario.toml"]), 4);
    assert_eq!(code(&["crb", "--out", "/nonexistent/dir/out.csv"]), 4);
    assert_eq!(
        code(&[
            "sweep",
            "--set",
            "trials=5",
            "--set",
            "failure_policy=\"count-as-failure\"",
            "--set",
            "sweep.molecules=[1.0]"
        ]),
        3
    );
}

#[test]
fn unknown_keys_in_file_are_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    let text = ScenarioConfig::acceptance().to_toml_string() + "\nextra_key = 1\n";
    std::fs::write(&p, text).unwrap();
    assert_eq!(code(&["crb", "--config", p.to_str().unwrap()]), 2);
}
