//! Conventional and unified linear precoders.
//!
//! The conventional family is regularized channel inversion
//! `F = β H^H (H H^H + m·σ²·I)^{-1}`: zero-forcing for `m = 0`, MMSE for
//! `m > 0`. The unified family applies the same formula to the augmented
//! channel `H_u = [H; u·I]`. For `u > 0` the Gram matrix `H_u H_u^H` is rank
//! deficient, so the unified precoder is evaluated in its column-space form
//!
//! ```text
//! F_u ∝ (H_u^H H_u + m·σ²·I)^{-1} H_u^H = (H^H H + (u² + m·σ²)·I)^{-1} [H^H  u·I]
//! ```
//!
//! which coincides with the row-space form whenever that exists and with the
//! Moore–Penrose pseudo-inverse of `H_u` when `m = 0`.
//!
//! Only the first `K_at` columns of a unified precoder multiply data; the
//! trailing `M_T` columns still count towards the power constant unless
//! [`PowerNormalization::DataBlock`] is requested.

use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::{solve_hermitian, ComplexMatrix};

/// Which formula family builds the precoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    /// Regularized inversion of `H` itself.
    Conventional,
    /// Regularized inversion of the augmented channel `[H; u·I]`.
    Unified,
}

/// Scheme family implied by `(u, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeLabel {
    Lzfp,
    Lmmsep,
    Ulzfp,
    Ulmmsep,
}

impl SchemeLabel {
    pub fn from_weights(u: f64, m: f64) -> Self {
        match (u > 0.0, m > 0.0) {
            (false, false) => SchemeLabel::Lzfp,
            (false, true) => SchemeLabel::Lmmsep,
            (true, false) => SchemeLabel::Ulzfp,
            (true, true) => SchemeLabel::Ulmmsep,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeLabel::Lzfp => "LZFP",
            SchemeLabel::Lmmsep => "LMMSEP",
            SchemeLabel::Ulzfp => "ULZFP",
            SchemeLabel::Ulmmsep => "ULMMSEP",
        }
    }
}

impl fmt::Display for SchemeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A precoding scheme: route plus the augmentation weight `u` and the
/// regularization multiplier `m`.
///
/// Names: conventional schemes are `LZFP`/`LMMSEP`; unified schemes are
/// `ULZFP`/`ULMMSEP` for `u > 0` and `LZFP-u0`/`LMMSEP-u0` for `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeMode {
    route: Route,
    u: f64,
    m: f64,
}

impl SchemeMode {
    pub fn conventional(m: f64) -> Result<Self> {
        check_weight("m", m)?;
        Ok(Self {
            route: Route::Conventional,
            u: 0.0,
            m,
        })
    }

    pub fn unified(u: f64, m: f64) -> Result<Self> {
        check_weight("u", u)?;
        check_weight("m", m)?;
        Ok(Self {
            route: Route::Unified,
            u,
            m,
        })
    }

    pub fn lzfp() -> Self {
        Self {
            route: Route::Conventional,
            u: 0.0,
            m: 0.0,
        }
    }

    /// Conventional MMSE with multiplier `m`.
    pub fn lmmsep(m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::config("m", "a value > 0 for LMMSEP", m));
        }
        Self::conventional(m)
    }

    pub fn ulzfp(u: f64) -> Result<Self> {
        if !(u > 0.0) {
            return Err(Error::config("u", "a value > 0 for ULZFP", u));
        }
        Self::unified(u, 0.0)
    }

    pub fn ulmmsep(u: f64, m: f64) -> Result<Self> {
        if !(u > 0.0) || !(m > 0.0) {
            return Err(Error::config("u, m", "values > 0 for ULMMSEP", format!("{u}, {m}")));
        }
        Self::unified(u, m)
    }

    /// Parses a scheme name, filling in the weights it leaves free.
    ///
    /// `u` applies to `ULZFP`/`ULMMSEP`, `m` to the MMSE variants.
    pub fn from_name(name: &str, u: f64, m: f64) -> Result<Self> {
        match name.trim().to_ascii_uppercase().as_str() {
            "LZFP" => Ok(Self::lzfp()),
            "LMMSEP" => Self::lmmsep(m),
            "ULZFP" => Self::ulzfp(u),
            "ULMMSEP" => Self::ulmmsep(u, m),
            "LZFP-U0" => Self::unified(0.0, 0.0),
            "LMMSEP-U0" => {
                if !(m > 0.0) {
                    return Err(Error::config("m", "a value > 0 for LMMSEP-u0", m));
                }
                Self::unified(0.0, m)
            }
            other => Err(Error::config(
                "scheme",
                "one of LZFP, LMMSEP, ULZFP, ULMMSEP, LZFP-u0, LMMSEP-u0",
                other,
            )),
        }
    }

    /// The four schemes of the default sweep.
    pub fn standard_set(u: f64, m: f64) -> Result<Vec<Self>> {
        Ok(vec![
            Self::lzfp(),
            Self::lmmsep(m)?,
            Self::ulzfp(u)?,
            Self::ulmmsep(u, m)?,
        ])
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn label(&self) -> SchemeLabel {
        SchemeLabel::from_weights(self.u, self.m)
    }

    /// Unique display name, see the type docs.
    pub fn name(&self) -> String {
        match (self.route, self.u > 0.0) {
            (Route::Unified, false) => format!("{}-u0", self.label()),
            _ => self.label().to_string(),
        }
    }
}

impl fmt::Display for SchemeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SchemeMode {
    type Err = Error;

    /// Parses with the default weights `u = 1`, `m = 1`.
    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s, 1.0, 1.0)
    }
}

fn check_weight(key: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, "a finite value >= 0", v))
    }
}

/// Which part of `F` the power constant normalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerNormalization {
    /// `β = sqrt(M_T / trace(F F^H))` over every column.
    #[default]
    FullMatrix,
    /// Same, restricted to the data columns.
    DataBlock,
}

/// A power-normalized precoding matrix.
#[derive(Debug, Clone)]
pub struct Precoder {
    f: ComplexMatrix,
    beta: f64,
    mode: SchemeMode,
    sigma2: f64,
    data_cols: usize,
}

impl Precoder {
    /// Scaled precoding matrix (`M_T × N_in`).
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mode(&self) -> SchemeMode {
        self.mode
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Number of leading columns that multiply data symbols.
    pub fn num_data_columns(&self) -> usize {
        self.data_cols
    }

    /// Leading `K_at` columns of `F`.
    pub fn data_block(&self) -> ComplexMatrix {
        self.f.columns(0..self.data_cols).expect("data columns are within F")
    }
}

/// Scales `F_raw` so that `trace(F F^H) = num_tx`, returning `(F, β)`.
pub fn power_scale(f_raw: &ComplexMatrix, num_tx: usize) -> Result<(ComplexMatrix, f64)> {
    let beta = power_constant(f_raw.energy(), num_tx)?;
    Ok((f_raw.scale(beta), beta))
}

fn power_constant(energy: f64, num_tx: usize) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::DegeneratePrecoder { trace: energy });
    }
    let beta = (num_tx as f64 / energy).sqrt();
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::DegeneratePrecoder { trace: energy });
    }
    Ok(beta)
}

fn check_regularization(m: f64, sigma2: f64) -> Result<f64> {
    check_weight("m", m)?;
    check_weight("sigma2", sigma2)?;
    Ok(m * sigma2)
}

/// Unscaled `H^H (H H^H + reg·I)^{-1}`.
pub fn regularized_inverse(h: &ComplexMatrix, reg: f64) -> Result<ComplexMatrix> {
    let gram = h.matmul(&h.hermitian())?;
    // (G + rI)^{-1} H, then the adjoint, since G is Hermitian.
    Ok(solve_hermitian(&gram, h, reg)?.hermitian())
}

/// Unscaled column-space unified precoder
/// `(H^H H + (u² + reg)·I)^{-1} [H^H  u·I]`, `M_T × (K_at + M_T)`.
pub fn unified_column_form(h: &ComplexMatrix, u: f64, reg: f64) -> Result<ComplexMatrix> {
    let hh = h.hermitian();
    let gram = hh.matmul(h)?;
    let rhs = hh.hstack(&ComplexMatrix::identity(h.cols()).scale(u))?;
    solve_hermitian(&gram, &rhs, u * u + reg)
}

/// Conventional precoder `β H^H (H H^H + m·σ²·I)^{-1}`.
pub fn build_conventional(channel: &ChannelMatrix, m: f64, sigma2: f64) -> Result<Precoder> {
    let reg = check_regularization(m, sigma2)?;
    let h = channel.matrix();
    let f_raw = regularized_inverse(h, reg)?;
    let (f, beta) = power_scale(&f_raw, h.cols())?;
    Ok(Precoder {
        f,
        beta,
        mode: SchemeMode::conventional(m)?,
        sigma2,
        data_cols: h.rows(),
    })
}

/// Unified precoder `β_u H_u^H (H_u H_u^H + m·σ²·I)^{-1}`.
///
/// With `u = 0` the augmentation rows are zero and the trailing columns of
/// `F_u` vanish; the conventional-width matrix is returned, computed by the
/// same route as [`build_conventional`]. With `u > 0` the column-space form
/// is used and all `K_at + M_T` columns are kept.
pub fn build_unified(
    channel: &ChannelMatrix,
    u: f64,
    m: f64,
    sigma2: f64,
    normalization: PowerNormalization,
) -> Result<Precoder> {
    let reg = check_regularization(m, sigma2)?;
    let mode = SchemeMode::unified(u, m)?;
    let h = channel.matrix();
    let k_at = h.rows();
    let num_tx = h.cols();
    let f_raw = if u == 0.0 {
        regularized_inverse(h, reg)?
    } else {
        unified_column_form(h, u, reg)?
    };
    let energy = match normalization {
        PowerNormalization::FullMatrix => f_raw.energy(),
        PowerNormalization::DataBlock => f_raw.columns(0..k_at)?.energy(),
    };
    let beta = power_constant(energy, num_tx)?;
    Ok(Precoder {
        f: f_raw.scale(beta),
        beta,
        mode,
        sigma2,
        data_cols: k_at,
    })
}

/// Builds whichever precoder `mode` describes.
pub fn build(
    channel: &ChannelMatrix,
    mode: SchemeMode,
    sigma2: f64,
    normalization: PowerNormalization,
) -> Result<Precoder> {
    match mode.route() {
        Route::Conventional => build_conventional(channel, mode.m(), sigma2),
        Route::Unified => build_unified(channel, mode.u(), mode.m(), sigma2, normalization),
    }
}

/// `β^{-1} H F_data`: the end-to-end gain seen by the data symbols after AGC.
pub fn effective_gain(channel: &ChannelMatrix, precoder: &Precoder) -> Result<ComplexMatrix> {
    Ok(channel
        .matrix()
        .matmul(&precoder.data_block())?
        .scale(1.0 / precoder.beta()))
}
