//! Bit packing into `M`-ary symbols and Gray-mapped PSK.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Bit, Error, Result};

/// `log2(order)`, rejecting orders that are not a power of two `>= 2`.
pub fn bits_per_symbol(order: usize) -> Result<usize> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::invalid(format!(
            "modulation order must be a power of two >= 2, got {order}"
        )));
    }
    Ok(order.trailing_zeros() as usize)
}

/// Number of symbols needed for `n_bits` bits, padding the last group.
pub fn symbols_for_bits(n_bits: usize, order: usize) -> Result<usize> {
    Ok(n_bits.div_ceil(bits_per_symbol(order)?))
}

/// Packs groups of `log2(M)` bits MSB first, zero-padding the tail.
pub fn bits_to_symbols(bits: &[Bit], order: usize) -> Result<Vec<usize>> {
    let width = bits_per_symbol(order)?;
    Ok(bits
        .chunks(width)
        .map(|group| {
            let mut d = 0usize;
            for i in 0..width {
                d = (d << 1) | group.get(i).map_or(0, |&b| (b & 1) as usize);
            }
            d
        })
        .collect())
}

/// Expands symbols back to bits, MSB first, keeping the first `n_bits`
/// (pass `None` to keep the padding).
pub fn symbols_to_bits(symbols: &[usize], order: usize, n_bits: Option<usize>) -> Result<Vec<Bit>> {
    let width = bits_per_symbol(order)?;
    let mut out = Vec::with_capacity(symbols.len() * width);
    for &d in symbols {
        if d >= order {
            return Err(Error::SymbolOutOfRange { symbol: d, order });
        }
        for i in (0..width).rev() {
            out.push(((d >> i) & 1) as Bit);
        }
    }
    if let Some(n) = n_bits {
        if n > out.len() {
            return Err(Error::DimensionMismatch {
                what: "unpacked bit count",
                expected: n,
                got: out.len(),
            });
        }
        out.truncate(n);
    }
    Ok(out)
}

#[inline]
pub fn gray(d: usize) -> usize {
    d ^ (d >> 1)
}

/// Inverse of [`gray`].
#[inline]
pub fn gray_inverse(mut g: usize) -> usize {
    let mut d = 0;
    while g != 0 {
        d ^= g;
        g >>= 1;
    }
    d
}

/// Unit-energy constellation point for symbol `d`, placed at angular slot
/// `gray_inverse(d)` so that neighbouring slots carry labels one bit apart:
/// `exp(i (2 pi gray_inverse(d) / M + pi / M))`.
pub fn psk_point(d: usize, order: usize) -> Complex64 {
    let m = order as f64;
    Complex64::from_polar(1.0, 2.0 * PI * gray_inverse(d) as f64 / m + PI / m)
}

pub fn psk_modulate(symbols: &[usize], order: usize) -> Result<Vec<Complex64>> {
    bits_per_symbol(order)?;
    symbols
        .iter()
        .map(|&d| {
            if d >= order {
                Err(Error::SymbolOutOfRange { symbol: d, order })
            } else {
                Ok(psk_point(d, order))
            }
        })
        .collect()
}

/// Minimum-distance hard decision; ties go to the smaller symbol.
pub fn psk_demodulate(x: Complex64, order: usize) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for d in 0..order {
        let dist = (x - psk_point(d, order)).norm_sqr();
        if dist < best_d {
            best_d = dist;
            best = d;
        }
    }
    best
}
