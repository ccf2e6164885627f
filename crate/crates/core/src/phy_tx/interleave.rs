//! Seeded random block interleaver.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Uniformly random permutation of `0..len` determined by `seed`.
pub fn permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

/// `out[i] = input[perm[i]]`.
pub fn interleave<T: Copy>(input: &[T], seed: u64) -> Result<Vec<T>> {
    if input.is_empty() {
        return Err(Error::invalid("cannot interleave an empty block"));
    }
    Ok(permutation(input.len(), seed)
        .into_iter()
        .map(|p| input[p])
        .collect())
}

/// Inverse of [`interleave`] for the same seed and block length.
pub fn deinterleave<T: Copy + Default>(input: &[T], seed: u64, expected_len: usize) -> Result<Vec<T>> {
    if input.len() != expected_len {
        return Err(Error::DimensionMismatch {
            what: "deinterleaver block length",
            expected: expected_len,
            got: input.len(),
        });
    }
    if input.is_empty() {
        return Err(Error::invalid("cannot deinterleave an empty block"));
    }
    let mut out = vec![T::default(); input.len()];
    for (i, p) in permutation(input.len(), seed).into_iter().enumerate() {
        out[p] = input[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn same_seed_same_permutation() {
        assert_eq!(permutation(212, 4), permutation(212, 4));
        assert_ne!(permutation(212, 4), permutation(212, 5));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(deinterleave(&[0u8; 10], 1, 11).is_err());
        assert!(interleave::<u8>(&[], 1).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_preserves_bits(bits in prop::collection::vec(0u8..2, 212), seed in any::<u64>()) {
            let mixed = interleave(&bits, seed).unwrap();
            let ones = |v: &[u8]| v.iter().filter(|&&b| b == 1).count();
            prop_assert_eq!(ones(&mixed), ones(&bits));
            prop_assert_eq!(deinterleave(&mixed, seed, bits.len()).unwrap(), bits);
        }
    }
}
