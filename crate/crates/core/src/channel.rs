//! Rayleigh-fading user pools, norm-based user selection and the augmented
//! (unified) channel `[H; u·I]`.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::rng::complex_gaussian;

/// Candidate users, one single-antenna user per row, entries i.i.d. `CN(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPool {
    rows: ComplexMatrix,
}

impl UserPool {
    /// Wraps an existing `K_t × M_T` matrix as a pool.
    pub fn from_matrix(rows: ComplexMatrix) -> Self {
        Self { rows }
    }

    pub fn num_users(&self) -> usize {
        self.rows.rows()
    }

    pub fn num_tx_antennas(&self) -> usize {
        self.rows.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rows
    }
}

/// Downlink channel of the active users.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    h: ComplexMatrix,
    selected: Vec<usize>,
}

impl ChannelMatrix {
    /// Channel for the given matrix with every row treated as selected.
    pub fn from_matrix(h: ComplexMatrix) -> Self {
        let selected = (0..h.rows()).collect();
        Self { h, selected }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    /// Original pool indices of the rows of `H`, ascending.
    pub fn selected_user_indices(&self) -> &[usize] {
        &self.selected
    }

    pub fn num_active_users(&self) -> usize {
        self.h.rows()
    }

    pub fn num_tx_antennas(&self) -> usize {
        self.h.cols()
    }
}

/// `H_u = [H; u·I_{M_T}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedChannel {
    h_u: ComplexMatrix,
    u: f64,
}

impl UnifiedChannel {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h_u
    }

    pub fn weight(&self) -> f64 {
        self.u
    }
}

/// Draws a `K_t × M_T` pool with entries `(g1 + i·g2)/√2`.
pub fn draw_user_pool<R: RngCore + ?Sized>(rng: &mut R, num_users: usize, num_tx: usize) -> UserPool {
    let rows = ComplexMatrix::from_fn(num_users, num_tx, |_, _| complex_gaussian(rng, 1.0));
    UserPool { rows }
}

/// Keeps the `num_active` rows with the largest Euclidean norm.
///
/// Ties go to the smaller pool index; the kept rows stay in pool order.
pub fn select_users(pool: &UserPool, num_active: usize) -> Result<ChannelMatrix> {
    let k_t = pool.num_users();
    if num_active == 0 || num_active > k_t {
        return Err(Error::config(
            "k_at",
            format!("an active-user count in 1..={k_t}"),
            num_active,
        ));
    }
    let norms = pool.rows.row_norms();
    let mut order: Vec<usize> = (0..k_t).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let mut selected = order[..num_active].to_vec();
    selected.sort_unstable();
    let h = pool.rows.select_rows(&selected)?;
    Ok(ChannelMatrix { h, selected })
}

/// Stacks `u·I_{M_T}` under `H`.
pub fn augment(channel: &ChannelMatrix, u: f64) -> Result<UnifiedChannel> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::config("u", "a finite value >= 0", u));
    }
    let lower = ComplexMatrix::identity(channel.num_tx_antennas()).scale(u);
    Ok(UnifiedChannel {
        h_u: channel.h.vstack(&lower)?,
        u,
    })
}
