//! BER gaps between paired schemes, including the zero gap between each
//! unified scheme at `u = 0` and its conventional counterpart.

use muprecode::harness::gap_rows;
use muprecode::{run_sweep, SchemeMode, SimulationConfig};

fn main() -> muprecode::Result<()> {
    let mut schemes = SchemeMode::standard_set(1.0, 1.0)?;
    schemes.push(SchemeMode::unified(0.0, 0.0)?);
    schemes.push(SchemeMode::unified(0.0, 1.0)?);
    let config = SimulationConfig {
        schemes,
        n_realizations: 100,
        ..SimulationConfig::default()
    };

    let table = run_sweep(&config)?;
    for g in gap_rows(&table.records) {
        println!(
            "{:>5} dB  {:>9} - {:<9} = {:+.3e}",
            g.snr_db, g.scheme_a, g.scheme_b, g.gap
        );
    }
    Ok(())
}
