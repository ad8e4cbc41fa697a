//! QPSK mapping, AWGN and the precoded downlink transmit/receive chain.
//!
//! Bits are `u8` values in `{0, 1}`. A bit pair `(b0, b1)` maps to
//! `((1 - 2·b0) + i·(1 - 2·b1)) / √2`, with `b0` on the in-phase rail.

use num_complex::Complex64;
use rand::RngCore;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::precoder::{effective_gain, Precoder};
use crate::rng::complex_gaussian;

pub const BITS_PER_SYMBOL: usize = 2;

#[inline]
pub fn qpsk_symbol(b0: u8, b1: u8) -> Complex64 {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(if b0 == 0 { a } else { -a }, if b1 == 0 { a } else { -a })
}

/// Maps bit pairs to unit-energy Gray-labelled QPSK symbols.
pub fn qpsk_modulate(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(BITS_PER_SYMBOL) {
        return Err(Error::Framing(format!(
            "{} bits do not fill whole QPSK symbols",
            bits.len()
        )));
    }
    if let Some(pos) = bits.iter().position(|&b| b > 1) {
        return Err(Error::Framing(format!("value {} at bit {pos} is not a bit", bits[pos])));
    }
    Ok(bits
        .chunks_exact(BITS_PER_SYMBOL)
        .map(|pair| qpsk_symbol(pair[0], pair[1]))
        .collect())
}

/// Hard decisions: a bit is 1 when its rail is strictly negative.
#[inline]
pub fn qpsk_decide(z: Complex64) -> (u8, u8) {
    ((z.re < 0.0) as u8, (z.im < 0.0) as u8)
}

pub fn qpsk_demodulate(symbols: &[Complex64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|&z| {
            let (b0, b1) = qpsk_decide(z);
            [b0, b1]
        })
        .collect()
}

/// Uniform random bits, drawn 64 per stream word.
pub fn draw_bits<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> Vec<u8> {
    let mut bits = vec![0; n];
    fill_bits(rng, &mut bits);
    bits
}

/// Fills `bits` from consecutive stream words, least significant bit first.
pub fn fill_bits<R: RngCore + ?Sized>(rng: &mut R, bits: &mut [u8]) {
    for chunk in bits.chunks_mut(64) {
        let word = rng.next_u64();
        for (k, b) in chunk.iter_mut().enumerate() {
            *b = ((word >> k) & 1) as u8;
        }
    }
}

/// `n` i.i.d. `CN(0, N0)` samples.
///
/// Two uniforms are consumed per sample regardless of `N0`.
pub fn draw_awgn<R: RngCore + ?Sized>(rng: &mut R, n: usize, n0: f64) -> Result<Vec<Complex64>> {
    if !(n0 >= 0.0) || !n0.is_finite() {
        return Err(Error::config("noise_variance", "a finite value >= 0", n0));
    }
    Ok((0..n).map(|_| complex_gaussian(rng, n0)).collect())
}

/// A fixed channel/precoder pair, with the post-AGC gain precomputed.
///
/// Receives `x̂ = β^{-1}(H F_data x̃ + z)`, evaluated as
/// `(β^{-1} H F_data) x̃ + β^{-1} z`.
#[derive(Debug, Clone)]
pub struct Link {
    gain: ComplexMatrix,
    inv_beta: f64,
}

impl Link {
    pub fn new(channel: &ChannelMatrix, precoder: &Precoder) -> Result<Self> {
        if precoder.matrix().rows() != channel.num_tx_antennas() {
            return Err(Error::shape(
                "Link::new",
                format!(
                    "precoder has {} rows for {} transmit antennas",
                    precoder.matrix().rows(),
                    channel.num_tx_antennas()
                ),
            ));
        }
        Ok(Self {
            gain: effective_gain(channel, precoder)?,
            inv_beta: 1.0 / precoder.beta(),
        })
    }

    /// Number of receive streams (`K_at`).
    pub fn num_streams(&self) -> usize {
        self.gain.rows()
    }

    /// `β^{-1} H F_data`.
    pub fn gain(&self) -> &ComplexMatrix {
        &self.gain
    }

    /// Writes the AGC-compensated estimate into `out`.
    pub fn receive_into(&self, symbols: &[Complex64], noise: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        if noise.len() != self.gain.rows() {
            return Err(Error::shape(
                "transmit_receive",
                format!("noise length {} for {} receivers", noise.len(), self.gain.rows()),
            ));
        }
        self.gain.matvec_into(symbols, out)?;
        for (o, z) in out.iter_mut().zip(noise) {
            *o += z * self.inv_beta;
        }
        Ok(())
    }

    pub fn receive(&self, symbols: &[Complex64], noise: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.gain.rows()];
        self.receive_into(symbols, noise, &mut out)?;
        Ok(out)
    }
}

/// One channel use: `x̂ = β^{-1} (H F_data x̃ + z)`.
pub fn transmit_receive(
    channel: &ChannelMatrix,
    precoder: &Precoder,
    symbols: &[Complex64],
    noise: &[Complex64],
) -> Result<Vec<Complex64>> {
    Link::new(channel, precoder)?.receive(symbols, noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_user_pool, select_users};
    use crate::precoder::build_conventional;
    use crate::rng::stream_from_seed;

    #[test]
    fn mapping_table() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let s = qpsk_modulate(&[0, 0, 1, 1, 1, 0, 0, 1]).unwrap();
        assert_eq!(s[0], Complex64::new(a, a));
        assert_eq!(s[1], Complex64::new(-a, -a));
        assert_eq!(s[2], Complex64::new(-a, a));
        assert_eq!(s[3], Complex64::new(a, -a));
        assert!(s.iter().all(|z| (z.norm_sqr() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn neighbours_differ_in_one_bit() {
        let pairs = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)];
        for &(a0, a1) in &pairs {
            for &(b0, b1) in &pairs {
                let d = (qpsk_symbol(a0, a1) - qpsk_symbol(b0, b1)).norm();
                let hamming = (a0 ^ b0) + (a1 ^ b1);
                // Nearest neighbours sit at distance √2, the opposite point at 2.
                match hamming {
                    0 => assert_eq!(d, 0.0),
                    1 => assert!((d - 2f64.sqrt()).abs() < 1e-12),
                    _ => assert!((d - 2.0).abs() < 1e-12),
                }
            }
        }
    }

    #[test]
    fn modulate_rejects_bad_blocks() {
        assert!(matches!(qpsk_modulate(&[0, 1, 1]), Err(Error::Framing(_))));
        assert!(matches!(qpsk_modulate(&[0, 2]), Err(Error::Framing(_))));
    }

    #[test]
    fn decisions() {
        assert_eq!(qpsk_demodulate(&[Complex64::new(0.9, 0.1)]), vec![0, 0]);
        assert_eq!(qpsk_demodulate(&[Complex64::new(0.0, -0.3)]), vec![0, 1]);
        assert_eq!(qpsk_demodulate(&[Complex64::new(-0.0, 0.0)]), vec![0, 0]);
        for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert_eq!(qpsk_demodulate(&qpsk_modulate(&bits).unwrap()), bits);
        }
    }

    #[test]
    fn awgn_zero_and_determinism() {
        let z = draw_awgn(&mut stream_from_seed(1), 16, 0.0).unwrap();
        assert!(z.iter().all(|v| v.norm() == 0.0));
        let a = draw_awgn(&mut stream_from_seed(2), 16, 0.3).unwrap();
        let b = draw_awgn(&mut stream_from_seed(2), 16, 0.3).unwrap();
        assert_eq!(a, b);
        assert!(draw_awgn(&mut stream_from_seed(2), 1, -1.0).is_err());
    }

    #[test]
    fn bits_are_balanced_and_reproducible() {
        let bits = draw_bits(&mut stream_from_seed(3), 10_000);
        assert_eq!(bits, draw_bits(&mut stream_from_seed(3), 10_000));
        let ones = bits.iter().filter(|&&b| b == 1).count() as f64;
        // 5 sigma of a fair binomial.
        assert!((ones - 5000.0).abs() < 5.0 * 50.0);
    }

    #[test]
    fn noiseless_zf_recovers_symbols() {
        let pool = draw_user_pool(&mut stream_from_seed(4), 20, 8);
        let ch = select_users(&pool, 8).unwrap();
        let p = build_conventional(&ch, 0.0, 0.0).unwrap();
        let bits = draw_bits(&mut stream_from_seed(5), 16);
        let x = qpsk_modulate(&bits).unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); 8];
        let est = transmit_receive(&ch, &p, &x, &zero).unwrap();
        for (a, b) in est.iter().zip(&x) {
            assert!((a - b).norm() < 1e-9);
        }
        assert_eq!(qpsk_demodulate(&est), bits);
    }

    #[test]
    fn receive_rejects_wrong_noise_length() {
        let ch = ChannelMatrix::from_matrix(ComplexMatrix::identity(2));
        let p = build_conventional(&ch, 0.0, 0.0).unwrap();
        let x = qpsk_modulate(&[0, 0, 1, 1]).unwrap();
        let err = transmit_receive(&ch, &p, &x, &[Complex64::new(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::Shape { .. }));
    }
}
