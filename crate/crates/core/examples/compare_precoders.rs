//! Builds the four precoders on one selected channel and compares their
//! power scaling and residual inter-user interference.

use muprecode::channel::{draw_user_pool, select_users};
use muprecode::numerics::ComplexMatrix;
use muprecode::precoder::{build, effective_gain, PowerNormalization, SchemeMode};
use muprecode::rng::stream_from_seed;

fn main() -> muprecode::Result<()> {
    let pool = draw_user_pool(&mut stream_from_seed(11), 20, 8);
    let channel = select_users(&pool, 8)?;
    let snr_db = 14.0;
    let sigma2 = 10f64.powf(-snr_db / 10.0);

    println!("channel at {snr_db} dB, users {:?}", channel.selected_user_indices());
    println!(
        "{:<8} {:>8} {:>10} {:>12} {:>14}",
        "scheme", "cols", "beta", "tr(FF^H)", "interference"
    );
    for scheme in SchemeMode::standard_set(1.0, 1.0)? {
        let p = build(&channel, scheme, sigma2, PowerNormalization::FullMatrix)?;
        let g = effective_gain(&channel, &p)?;
        let residual = g.sub(&ComplexMatrix::identity(8))?.energy();
        println!(
            "{:<8} {:>8} {:>10.4} {:>12.6} {:>14.3e}",
            scheme.name(),
            p.matrix().cols(),
            p.beta(),
            p.matrix().energy(),
            residual
        );
    }
    Ok(())
}
