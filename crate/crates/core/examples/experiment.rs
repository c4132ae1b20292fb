//! Builds an experiment from a JSON document and prints CSV, as the CLI does.
//!
//! Pass a config path to run it instead of the built-in one:
//! `cargo run --example experiment -- examples/configs/sweep_radius.json`

use normset::cli::{render, run, ExperimentConfig, Format};
use serde_json::{json, Value};

fn main() -> normset::Result<()> {
    let doc: Value = match std::env::args().nth(1) {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(&path).expect("readable config"))
            .expect("valid JSON"),
        None => json!({
            "command": "equivalence",
            "k": [4, 8, 16],
            "region": {"type": "stripes", "count": "k", "fraction": 0.5},
            "probes": 80,
            "seed": 1
        }),
    };
    let cfg = ExperimentConfig::from_json(&doc)?;
    let rows = run(&cfg)?;
    print!("{}", render(&rows, Format::Csv));
    Ok(())
}
