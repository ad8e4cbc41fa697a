//! The unified zero-forcing precoder is the pseudo-inverse of the augmented
//! channel `[H; u·I]`, and its data block equals ridge zero-forcing.

use muprecode::channel::{augment, draw_user_pool, select_users};
use muprecode::numerics::{pseudo_inverse, solve_hermitian};
use muprecode::precoder::unified_column_form;
use muprecode::rng::stream_from_seed;

fn main() -> muprecode::Result<()> {
    let channel = select_users(&draw_user_pool(&mut stream_from_seed(3), 20, 8), 8)?;
    let h = channel.matrix();
    for u in [0.5, 1.0, 2.0] {
        let hu = augment(&channel, u)?;
        let f_u = unified_column_form(h, u, 0.0)?;
        let pinv = pseudo_inverse(hu.matrix())?;

        let hh = h.hermitian();
        let ridge_zf = solve_hermitian(&hh.matmul(h)?, &hh, u * u)?;
        let data = f_u.columns(0..8)?;
        println!(
            "u = {u}: H_u is {:?}, |F_u - pinv(H_u)| = {:.1e}, |F_data - ridge ZF| = {:.1e}",
            hu.matrix().shape(),
            f_u.max_abs_diff(&pinv)?,
            data.max_abs_diff(&ridge_zf)?
        );
    }
    Ok(())
}
