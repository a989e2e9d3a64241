//! Normalized oscillator eigenfunctions
//!
//! ```text
//! ψ_n(ξ) = e^{-ξ²/2} H_n(ξ) / C_n,   C_n = (2ⁿ n! √π)^{1/2}
//! ```
//!
//! evaluated with the upward recurrence on the normalized functions
//! themselves, so no factorial or Hermite polynomial is ever formed.

use crate::scalar::{from_usize, lit, Scalar};

/// Fills `out[n] = ψ_n(ξ)` for `n < out.len()`.
pub fn functions_into<T: Scalar>(xi: T, out: &mut [T]) {
    functions_scaled_into(xi, T::zero(), out)
}

/// Fills `out[n] = ψ_n(ξ) · e^{log_scale}`.
///
/// The extra factor is folded into the starting value, which lets callers
/// combine the Gaussian of ψ_n with other exponentials before evaluating.
pub fn functions_scaled_into<T: Scalar>(xi: T, log_scale: T, out: &mut [T]) {
    let pi_quarter: T = lit(std::f64::consts::PI.powf(-0.25));
    recurrence_from(xi, pi_quarter * (log_scale - xi * xi / lit(2.0)).exp(), out)
}

/// Runs the recurrence from a caller-supplied `out[0]`, i.e. fills
/// `out[n] = ψ_n(ξ) · start / ψ_0(ξ)`.
pub fn recurrence_from<T: Scalar>(xi: T, start: T, out: &mut [T]) {
    if out.is_empty() {
        return;
    }
    out[0] = start;
    if out.len() == 1 {
        return;
    }
    out[1] = T::SQRT_2() * xi * out[0];
    for n in 1..out.len() - 1 {
        let np1: T = from_usize(n + 1);
        let nn: T = from_usize(n);
        out[n + 1] = (lit::<T>(2.0) / np1).sqrt() * xi * out[n] - (nn / np1).sqrt() * out[n - 1];
    }
}

pub fn functions<T: Scalar>(xi: T, count: usize) -> Vec<T> {
    let mut out = vec![T::zero(); count];
    functions_into(xi, &mut out);
    out
}

/// Single value ψ_n(ξ).
pub fn function<T: Scalar>(n: usize, xi: T) -> T {
    functions(xi, n + 1)[n]
}

/// C_n = (2ⁿ n! √π)^{1/2} via logarithms; finite for any n that fits in f64 exponent range.
pub fn normalization(n: usize) -> f64 {
    let mut log_c = 0.5 * (std::f64::consts::PI.sqrt().ln());
    for k in 1..=n {
        log_c += 0.5 * (2.0 * k as f64).ln();
    }
    log_c.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Physicists' Hermite polynomial by the textbook recurrence (small n only).
    fn hermite_poly(n: usize, x: f64) -> f64 {
        let (mut h0, mut h1) = (1.0, 2.0 * x);
        if n == 0 {
            return h0;
        }
        for k in 1..n {
            let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    }

    #[test]
    fn matches_textbook_definition_for_small_n() {
        for &x in &[-2.3, -0.4, 0.0, 0.7, 1.9] {
            let psi = functions::<f64>(x, 12);
            for (n, &value) in psi.iter().enumerate() {
                let expected = (-x * x / 2.0f64).exp() * hermite_poly(n, x) / normalization(n);
                assert!((value - expected).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn orthonormal_on_fine_grid() {
        // trapezoid on a wide uniform grid is spectrally accurate here
        let h = 0.01;
        let xs: Vec<f64> = (-2400..=2400).map(|i| i as f64 * h).collect();
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| functions(x, 30)).collect();
        for m in 0..30 {
            for n in m..30 {
                let s: f64 = table.iter().map(|row| row[m] * row[n]).sum::<f64>() * h;
                let target = if m == n { 1.0 } else { 0.0 };
                assert!((s - target).abs() < 1e-12, "<{m}|{n}> = {s}");
            }
        }
    }

    #[test]
    fn large_index_stays_finite() {
        let psi = functions::<f64>(3.0, 600);
        assert!(psi.iter().all(|v| v.is_finite()));
        // Hermite functions are bounded by ~1 for all n
        assert!(psi.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn scaled_variant_multiplies_through() {
        let plain = functions::<f64>(1.3, 8);
        let mut scaled = vec![0.0; 8];
        functions_scaled_into(1.3, 0.75, &mut scaled);
        for (a, b) in plain.iter().zip(&scaled) {
            assert!((a * 0.75f64.exp() - b).abs() < 1e-14);
        }
    }
}
