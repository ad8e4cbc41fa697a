//! One precoded downlink transmission: bits to QPSK, precoder, fading
//! channel, noise, receiver gain control and hard decisions.

use muprecode::channel::{draw_user_pool, select_users};
use muprecode::modem::{draw_awgn, draw_bits, qpsk_demodulate, qpsk_modulate, Link};
use muprecode::precoder::{build, PowerNormalization, SchemeMode};
use muprecode::rng::stream_from_seed;

fn main() -> muprecode::Result<()> {
    let mut rng = stream_from_seed(21);
    let channel = select_users(&draw_user_pool(&mut rng, 20, 8), 8)?;
    let n0 = 10f64.powf(-1.0);

    for scheme in [SchemeMode::lzfp(), SchemeMode::lmmsep(1.0)?] {
        let precoder = build(&channel, scheme, n0, PowerNormalization::FullMatrix)?;
        let link = Link::new(&channel, &precoder)?;
        let mut errors = 0;
        let vectors = 2000;
        for _ in 0..vectors {
            let bits = draw_bits(&mut rng, 16);
            let noise = draw_awgn(&mut rng, 8, n0)?;
            let estimate = link.receive(&qpsk_modulate(&bits)?, &noise)?;
            errors += qpsk_demodulate(&estimate)
                .iter()
                .zip(&bits)
                .filter(|(a, b)| a != b)
                .count();
        }
        println!(
            "{:<7} beta = {:.3}, {errors} bit errors in {} bits ({:.2e})",
            scheme.name(),
            precoder.beta(),
            vectors * 16,
            errors as f64 / (vectors * 16) as f64
        );
    }
    Ok(())
}
