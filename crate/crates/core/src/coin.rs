//! 2×2 unitary coin operators.

use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum entrywise deviation of `C†C` from the identity accepted for a coin.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// A unitary 2×2 coin acting on the (↑, ↓) chirality pair.
///
/// `matrix[row][col]`; applying the coin to `(up, down)` gives
/// `(m00·up + m01·down, m10·up + m11·down)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "[[Complex64; 2]; 2]", into = "[[Complex64; 2]; 2]")
)]
pub struct CoinSpec {
    matrix: [[Complex64; 2]; 2],
}

impl CoinSpec {
    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            matrix: [[h, h], [h, -h]],
        }
    }

    pub fn new(matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitaryCoin { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.matrix
    }

    #[inline(always)]
    pub fn apply(&self, [up, down]: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.matrix;
        [m[0][0] * up + m[0][1] * down, m[1][0] * up + m[1][1] * down]
    }

    /// Whether all entries are real; lets the hot loops skip imaginary cross terms.
    pub(crate) fn is_real(&self) -> bool {
        self.matrix.iter().flatten().all(|c| c.im == 0.0)
    }
}

impl Default for CoinSpec {
    fn default() -> Self {
        Self::hadamard()
    }
}

impl TryFrom<[[Complex64; 2]; 2]> for CoinSpec {
    type Error = Error;

    fn try_from(matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::new(matrix)
    }
}

impl From<CoinSpec> for [[Complex64; 2]; 2] {
    fn from(coin: CoinSpec) -> Self {
        coin.matrix
    }
}

/// Largest entrywise modulus of `M†M − I`.
pub fn unitarity_deviation(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in m {
                acc += row[i].conj() * row[j];
            }
            if i == j {
                acc -= 1.0;
            }
            let dev = acc.norm();
            if dev.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(dev);
        }
    }
    worst
}
