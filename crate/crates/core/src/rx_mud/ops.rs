use serde::{Deserialize, Serialize};

use crate::phy_tx::Scheme;

/// Receiver operation counts under the per-kernel cost model.
///
/// Direct scheme, per iteration and OFDM symbol: `M * N * K`
/// multiplications for the codebook correlations, `K` additions to
/// accumulate them over symbols, `M * N` subtractions for the codeword
/// distances and `N` for the residual update.
///
/// Conventional scheme, per iteration and OFDM symbol: `N * K`
/// multiplications for the correlations, `K` + `N` additions as above,
/// and `N * (K + K_a)` multiplications for the least-squares residual
/// update, where `K_a` is the final size of the detected set. Each
/// iteration also costs one pseudoinverse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationCounters {
    pub multiplications: u64,
    pub additions: u64,
    pub pseudoinverses: u64,
}

impl std::ops::AddAssign for OperationCounters {
    fn add_assign(&mut self, o: Self) {
        self.multiplications += o.multiplications;
        self.additions += o.additions;
        self.pseudoinverses += o.pseudoinverses;
    }
}

/// Closed-form totals for `active` detected users.
pub fn count_expected_ops(
    order: usize,
    symbols: usize,
    active: usize,
    seq_len: usize,
    users: usize,
    scheme: Scheme,
) -> OperationCounters {
    let (m, ld, ka, n, k) = (order as u64, symbols as u64, active as u64, seq_len as u64, users as u64);
    match scheme {
        Scheme::Direct => OperationCounters {
            multiplications: m * ld * ka * n * k,
            additions: ka * ld * (k + n + m * n),
            pseudoinverses: 0,
        },
        Scheme::Conventional => OperationCounters {
            multiplications: ld * ka * n * (2 * k + ka),
            additions: ka * ld * (k + n),
            pseudoinverses: ka,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let d = count_expected_ops(8, 1, 1, 4, 2, Scheme::Direct);
        assert_eq!((d.multiplications, d.additions, d.pseudoinverses), (64, 38, 0));
        let c = count_expected_ops(8, 1, 1, 4, 2, Scheme::Conventional);
        assert_eq!((c.multiplications, c.additions, c.pseudoinverses), (20, 6, 1));
        for s in [Scheme::Direct, Scheme::Conventional] {
            assert_eq!(count_expected_ops(8, 71, 0, 32, 320, s), OperationCounters::default());
        }
    }
}
