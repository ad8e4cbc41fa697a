//! Parses a `key = value` configuration and prints its canonical form and hash.

use muprecode::cli::parse_config_str;

const TEXT: &str = "\
# 4x4 system with two unified weights
m_t = 4
k_t = 10
k_at = 4
snr_db_list = [10, 20]
schemes = LZFP, ULZFP, ULMMSEP
u = 0.5
n_realizations = 50
";

fn main() -> muprecode::Result<()> {
    let config = parse_config_str(TEXT)?;
    print!("{}", config.canonical_string());
    println!("hash = {}", config.config_hash());
    println!("bits per point = {}", config.bits_per_point());

    match parse_config_str("k_at = 9\n") {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("rejected: {e} (exit code {})", e.exit_code()),
    }
    Ok(())
}
