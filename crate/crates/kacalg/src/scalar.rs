//! Scalar conventions shared across the crate.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Absolute tolerance for coefficient equality.
pub const TOL: f64 = 1e-9;
/// Tolerance used when clustering eigenvalues of generic central elements.
pub const EIG_CLUSTER_TOL: f64 = 1e-7;
/// Relative rank cutoff for singular values in nullspace/rank computations.
pub const RANK_TOL: f64 = 1e-8;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Round a float to 15 significant digits, used when serialising reports so
/// that repeated runs are byte-identical and diffable.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(14 - exp);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round15_is_stable() {
        let x = 0.1 + 0.2;
        assert_eq!(round15(x), round15(round15(x)));
        assert_eq!(round15(0.0), 0.0);
        assert_eq!(round15(1.0), 1.0);
        assert_eq!(round15(16.000000000000004), 16.0);
    }
}
