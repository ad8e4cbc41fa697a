//! Runs the default four-scheme sweep at reduced statistics and writes the
//! CSV, plot, log and manifest files.
//!
//! `cargo run --release --example ber_sweep -- [realizations] [out_dir]`

use std::path::PathBuf;

use muprecode::cli::{format_rate, write_outputs};
use muprecode::{run_sweep, SimulationConfig};

fn main() -> muprecode::Result<()> {
    let mut args = std::env::args().skip(1);
    let realizations = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "results/example_sweep".into()));

    let config = SimulationConfig {
        n_realizations: realizations,
        ..SimulationConfig::default()
    };
    let table = run_sweep(&config)?;
    for r in &table.records {
        println!(
            "{:>5} dB  {:<8} {:>9}  (se {}){}",
            r.snr_db,
            r.scheme,
            format_rate(r.ber()),
            format_rate(r.standard_error()),
            if r.low_confidence() { " low confidence" } else { "" }
        );
    }
    let manifest = write_outputs(&table, &out, None)?;
    println!("config hash {}", manifest.config_hash);
    println!("wrote {}", out.display());
    Ok(())
}
