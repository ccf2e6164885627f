//! Direct symbol-to-codeword spreading and the conventional
//! modulate-then-spread baseline.

use num_complex::Complex64;

use super::SpreadFrame;
use crate::codebook::{Codebook, SpreadSequence};
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Column `l` of the frame is codeword `symbols[l]` of `cb`.
pub fn spread_direct(symbols: &[usize], cb: &Codebook) -> Result<SpreadFrame> {
    let n = cb.seq_len();
    let mut data = Vec::with_capacity(n * symbols.len());
    for &d in symbols {
        if d >= cb.order() {
            return Err(Error::SymbolOutOfRange {
                symbol: d,
                order: cb.order(),
            });
        }
        data.extend_from_slice(cb.codeword(d));
    }
    Ok(SpreadFrame::new(CMatrix::from_vec(n, symbols.len(), data)))
}

/// Column `l` of the frame is `psk_symbols[l] * s`.
pub fn spread_conventional(psk_symbols: &[Complex64], s: &SpreadSequence) -> SpreadFrame {
    let n = s.len();
    let mut data = Vec::with_capacity(n * psk_symbols.len());
    for &x in psk_symbols {
        data.extend(s.entries().iter().map(|&c| c * x));
    }
    SpreadFrame::new(CMatrix::from_vec(n, psk_symbols.len(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build_codebook, generate_base_sequences, ShiftPattern};
    use crate::linalg::{cdot, norm};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_symbols_give_base_sequence() {
        let s = generate_base_sequences(1, 16, 3).unwrap().sequence(0);
        let cb = build_codebook(&s, &ShiftPattern::new(vec![0, 5, 9, 2]).unwrap()).unwrap();
        let f = spread_direct(&[0, 0, 0], &cb).unwrap();
        for l in 0..3 {
            assert_eq!(f.column(l), s.entries());
        }
    }

    #[test]
    fn symbol_three_uses_fourth_pattern_entry() {
        let s = generate_base_sequences(1, 16, 3).unwrap().sequence(0);
        let cb = build_codebook(&s, &ShiftPattern::new(vec![0, 3, 15, 6]).unwrap()).unwrap();
        let f = spread_direct(&[3], &cb).unwrap();
        let expected = crate::codebook::circular_shift(&s, 6);
        assert_eq!(f.column(0), expected.entries());
        assert!(spread_direct(&[4], &cb).is_err());
    }

    #[test]
    fn orthogonal_codebook_gives_orthogonal_columns() {
        let s = SpreadSequence::new(vec![c(0.5, 0.), c(0.5, 0.), c(0.5, 0.), c(-0.5, 0.)]).unwrap();
        let cb = build_codebook(&s, &ShiftPattern::new(vec![0, 1, 2, 3]).unwrap()).unwrap();
        let f = spread_direct(&[0, 1], &cb).unwrap();
        assert_abs_diff_eq!(cdot(f.column(0), f.column(1)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conventional_columns_scale_the_sequence() {
        let s = generate_base_sequences(1, 8, 1).unwrap().sequence(0);
        let theta = 0.3;
        let x = c(0.0, 1.0);
        let y = x * Complex64::from_polar(1.0, theta);
        let f = spread_conventional(&[c(1.0, 0.0), x, y], &s);
        assert_eq!(f.column(0), s.entries());
        for l in 0..3 {
            assert_abs_diff_eq!(norm(f.column(l)), 1.0, epsilon = 1e-12);
        }
        let rot = Complex64::from_polar(1.0, theta);
        for (a, b) in f.column(1).iter().zip(f.column(2)) {
            assert_abs_diff_eq!((a * rot - b).norm(), 0.0, epsilon = 1e-15);
        }
    }
}
