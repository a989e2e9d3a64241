//! Quadrature rules used by the packet decomposition and the k_z integrals.

use crate::error::{Result, ZbError};
use crate::scalar::{lit, Scalar};

/// Gauss–Hermite rule for ∫ e^{-x²} p(x) dx.
///
/// Nodes are found by Newton iteration on the normalized Hermite function
/// recurrence with running rescaling, so rules with thousands of nodes do not
/// overflow. Weights come from `w_j e^{x_j²} = 1 / (K ψ_{K-1}(x_j)²)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `w_j e^{x_j²}`, the weights for an unweighted integrand.
    scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(ZbError::Domain(
                "Gauss-Hermite order must be positive".into(),
            ));
        }
        let k = order;
        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        let mut scaled = vec![0.0; k];
        let half = k.div_ceil(2);
        let kf = k as f64;
        let mut z = 0.0f64;
        for i in 0..half {
            // asymptotic starting guesses for the largest roots first
            z = match i {
                0 => (2.0 * kf + 1.0).sqrt() - 1.85575 * (2.0 * kf + 1.0).powf(-0.16667),
                1 => z - 1.14 * kf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut converged = false;
            let mut eval = recurrence(z, k);
            for _ in 0..100 {
                let derivative = (2.0 * kf).sqrt() * eval.prev - z * eval.last;
                let step = eval.last / derivative;
                z -= step;
                eval = recurrence(z, k);
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(ZbError::Convergence(format!(
                    "Gauss-Hermite root {i} of order {k} did not converge"
                )));
            }
            // ψ_{K-1}(z) = prev · exp(-z²/2 + log_scale)
            let log_psi_prev_sq = 2.0 * (eval.prev.abs().ln() + eval.log_scale) - z * z;
            let ln_w = -(kf.ln()) - log_psi_prev_sq - z * z;
            let ln_scaled = ln_w + z * z;
            nodes[i] = z;
            nodes[k - 1 - i] = -z;
            weights[i] = ln_w.exp();
            weights[k - 1 - i] = weights[i];
            scaled[i] = ln_scaled.exp();
            scaled[k - 1 - i] = scaled[i];
        }
        if k % 2 == 1 {
            nodes[half - 1] = 0.0;
        }
        // ascending order
        nodes.reverse();
        weights.reverse();
        scaled.reverse();
        Ok(Self {
            nodes,
            weights,
            scaled_weights: scaled,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for the e^{-x²}-weighted integral.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights for the plain integral ∫ h(x) dx of a Gaussian-decaying `h`.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// Points and weights for ∫ h(x) dx where `h` decays like e^{-(x-center)²/scale²}.
    ///
    /// Exact when h(x) = e^{-(x-center)²/scale²} · polynomial of degree < 2K.
    pub fn scaled_rule<T: Scalar>(&self, center: T, scale: T) -> (Vec<T>, Vec<T>) {
        let xs = self
            .nodes
            .iter()
            .map(|&u| center + scale * lit::<T>(u))
            .collect();
        let ws = self
            .scaled_weights
            .iter()
            .map(|&w| scale * lit::<T>(w))
            .collect();
        (xs, ws)
    }
}

struct Recurrence {
    last: f64,
    prev: f64,
    log_scale: f64,
}

/// ψ_K(z) and ψ_{K-1}(z) without the Gaussian factor, rescaled as needed.
fn recurrence(z: f64, k: usize) -> Recurrence {
    let mut p1 = std::f64::consts::PI.powf(-0.25);
    let mut p2 = 0.0;
    let mut log_scale = 0.0;
    for j in 1..=k {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
        let magnitude = p1.abs().max(p2.abs());
        if magnitude > 1e150 {
            p1 /= magnitude;
            p2 /= magnitude;
            log_scale += magnitude.ln();
        }
    }
    Recurrence {
        last: p1,
        prev: p2,
        log_scale,
    }
}

/// Trapezoid rule on `[0, cutoff]` for an even integrand, doubled to cover the real line.
///
/// For analytic integrands with Gaussian decay this converges exponentially
/// in the node count, including when the integrand oscillates.
pub fn even_trapezoid<T: Scalar>(cutoff: T, intervals: usize) -> (Vec<T>, Vec<T>) {
    let h = cutoff / lit(intervals as f64);
    let two: T = lit(2.0);
    (0..=intervals)
        .map(|i| {
            let x = h * lit(i as f64);
            let w = if i == 0 || i == intervals { h } else { two * h };
            (x, w)
        })
        .unzip()
}
