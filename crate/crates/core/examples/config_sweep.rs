//! Load a scenario file, apply dotted overrides and export CSV and JSON.
//!
//! `cargo run --example config_sweep -- configs/acceptance.toml out/`

use std::path::PathBuf;

use molloc::harness::{export_results, run_mse_sweep, Format, ResultDocument, ScenarioConfig};

fn main() -> molloc::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg_path = PathBuf::from(args.next().unwrap_or_else(|| "configs/acceptance.toml".into()));
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));

    let mut cfg = ScenarioConfig::load(&cfg_path)?;
    cfg.set("trials", "500")?;
    cfg.set("sweep.molecules", "[5e5, 5e6, 5e7]")?;
    println!("{}", cfg.to_toml_string());

    let doc = ResultDocument::new(&cfg, run_mse_sweep(&cfg.validate()?)?);
    std::fs::create_dir_all(&out_dir)?;
    for (name, format) in [("sweep.csv", Format::Csv), ("sweep.json", Format::Json)] {
        let path = out_dir.join(name);
        export_results(&doc, &path, format)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
