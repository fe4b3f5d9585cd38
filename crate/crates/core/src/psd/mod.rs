//! Positive semidefinite factorizations: exact verification, support
//! realization, the square-root sign-enumeration bound with its order-3
//! exclusion certificate, the `S_n` family, and numerical rank reduction of
//! psd solutions to linear systems.

mod factorization;
mod reduce;
mod sqrt;

pub use factorization::{
    is_psd, realize_support, sample_bound, verify_psd_factorization, PsdFactorization, PsdReport, Realization,
};
pub use reduce::{
    barvinok_reduce, rank_bound, reduce_factor_ranks, FactorReduction, FloatPsdMatrix, ReduceOptions, Reduction,
};
pub use sqrt::{
    min_sqrt_rank, order3_exclusion, ColCheck, ExclusionStatus, Order3Certificate, RowCheck, SignAssignment,
    SqrtOptions, SqrtRank, DEFAULT_SIGN_CAP,
};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{QMatrix, Rational};

/// The `n x n` matrix with entries `(i - j - 1)(i - j - 2) / 2` (1-based),
/// which has rank 3 for every `n ≥ 3`.
pub fn generate_sn(n: usize) -> Result<QMatrix> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    Ok(QMatrix::from_fn(n, n, |i, j| {
        let d = i as i64 - j as i64;
        Rational::from_integer(BigInt::from((d - 1) * (d - 2) / 2))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn s6_matches_display() {
        let expected: [[i64; 6]; 6] = [
            [1, 3, 6, 10, 15, 21],
            [0, 1, 3, 6, 10, 15],
            [0, 0, 1, 3, 6, 10],
            [1, 0, 0, 1, 3, 6],
            [3, 1, 0, 0, 1, 3],
            [6, 3, 1, 0, 0, 1],
        ];
        let s = generate_sn(6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(s.get(i, j), &int(expected[i][j]));
            }
        }
        assert_eq!(generate_sn(1).unwrap().get(0, 0), &int(1));
        assert!(generate_sn(0).is_err());
    }

    #[test]
    fn sn_has_rank_three() {
        for n in 3..=12 {
            assert_eq!(generate_sn(n).unwrap().rank(), 3, "n = {n}");
        }
    }
}
