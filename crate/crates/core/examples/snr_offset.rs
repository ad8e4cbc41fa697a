//! An SNR offset shifts every curve horizontally: a point run at
//! `snr + offset` with no offset has the same counts as `snr` with it.

use muprecode::{run_point, SchemeMode, SimulationConfig};

fn main() -> muprecode::Result<()> {
    let base = SimulationConfig {
        n_realizations: 100,
        ..SimulationConfig::default()
    };
    let offset = -6.0;
    let shifted = SimulationConfig {
        snr_offset_db: offset,
        ..base.clone()
    };

    for snr in [14.0, 20.0, 30.0] {
        let a = run_point(&shifted, SchemeMode::lzfp(), snr)?;
        let b = run_point(&base, SchemeMode::lzfp(), snr + offset)?;
        println!(
            "nominal {snr} dB with offset {offset}: {} errors; {} dB without: {} errors",
            a.bit_errors,
            snr + offset,
            b.bit_errors
        );
    }
    Ok(())
}
