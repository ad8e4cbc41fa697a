//! Linear precoding for multi-user MIMO downlink.
//!
//! Conventional zero-forcing and MMSE precoders, their unified counterparts
//! built on the augmented channel `[H; u·I]`, and a deterministic Monte Carlo
//! harness that measures QPSK bit-error rates over Rayleigh fading.
//!
//! ```
//! use muprecode::channel::{draw_user_pool, select_users};
//! use muprecode::precoder::{build_unified, PowerNormalization};
//! use muprecode::rng::stream_from_seed;
//!
//! let pool = draw_user_pool(&mut stream_from_seed(7), 20, 8);
//! let channel = select_users(&pool, 8).unwrap();
//! let p = build_unified(&channel, 1.0, 1.0, 0.04, PowerNormalization::FullMatrix).unwrap();
//! assert_eq!(p.matrix().shape(), (8, 16));
//! assert!((p.matrix().energy() - 8.0).abs() < 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod harness;
pub mod modem;
pub mod numerics;
pub mod precoder;
pub mod rng;

pub use error::{Error, Result};
pub use harness::{run_point, run_sweep, BerRecord, BerTable, SimulationConfig};
pub use numerics::ComplexMatrix;
pub use precoder::{PowerNormalization, Precoder, SchemeMode};
