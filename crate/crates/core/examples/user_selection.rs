//! Draws a pool of single-antenna users and keeps the strongest ones.

use muprecode::channel::{draw_user_pool, select_users};
use muprecode::rng::stream_from_seed;

fn main() -> muprecode::Result<()> {
    let pool = draw_user_pool(&mut stream_from_seed(5), 20, 8);
    let norms = pool.matrix().row_norms();
    let mut ranked: Vec<usize> = (0..norms.len()).collect();
    ranked.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    for (rank, &user) in ranked.iter().enumerate() {
        println!("rank {rank:>2}: user {user:>2}, |h| = {:.3}", norms[user]);
    }

    let channel = select_users(&pool, 8)?;
    println!("active users (pool order): {:?}", channel.selected_user_indices());
    println!("active channel shape: {:?}", channel.matrix().shape());
    Ok(())
}
