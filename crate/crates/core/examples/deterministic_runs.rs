//! Results depend only on the configuration, not on the thread count.

use muprecode::harness::run_sweep_with_workers;
use muprecode::SimulationConfig;

fn main() -> muprecode::Result<()> {
    let config = SimulationConfig {
        n_realizations: 50,
        master_seed: 2024,
        ..SimulationConfig::default()
    };
    let reference = run_sweep_with_workers(&config, 1)?;
    for workers in [2, 4, 8] {
        let table = run_sweep_with_workers(&config, workers)?;
        println!("{workers} workers identical to 1 worker: {}", table == reference);
    }
    println!("config hash {}", reference.metadata.config_hash);
    Ok(())
}
