//! Gaussian spinor packet and its projection onto the Landau basis.
//!
//! The packet is `(0, f, 0, 0)` (or the same profile in another spinor slot)
//! with
//!
//! ```text
//! f(r) = (π d_x²)^{-1/4} (π d_y²)^{-1/4} (π d_z²)^{-1/4}
//!        · exp(-x²/2d_x² - y²/2d_y² - z²/2d_z² + i k0x x)
//! ```
//!
//! Projecting on e^{i k_x x} ψ_n(ξ)/√L with ξ = y/L − k_x L gives the real
//! coefficients `F_n(k_x)`. Each `F_n` is a Gaussian in k_x times a degree-n
//! polynomial, so Gauss–Hermite rules matched to that Gaussian integrate the
//! y-overlap and the k_x-overlap `U_{m,n}` exactly once the node counts
//! exceed n/2 and n respectively.

use rayon::prelude::*;

use crate::error::{Result, ZbError};
use crate::hermite;
use crate::params::{Dimensionality, SimParams};
use crate::quadrature::{even_trapezoid, GaussHermite};
use crate::scalar::{from_usize, lit, Scalar};

/// Ellipsoidal Gaussian packet with a k_x kick, occupying one spinor component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket<T: Scalar> {
    pub d_x: T,
    pub d_y: T,
    /// Needed only in 3+1 mode.
    pub d_z: Option<T>,
    pub k0x: T,
    /// Spinor slot, 1-based as in the Dirac representation.
    pub component: usize,
}

impl<T: Scalar> GaussianPacket<T> {
    pub fn new(d_x: T, d_y: T, d_z: Option<T>, k0x: T) -> Result<Self> {
        let packet = Self {
            d_x,
            d_y,
            d_z,
            k0x,
            component: 2,
        };
        packet.validate()?;
        Ok(packet)
    }

    pub fn with_component(mut self, component: usize) -> Result<Self> {
        self.component = component;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(ZbError::Domain(format!(
                    "packet width {name} must be positive, got {v}"
                )))
            }
        };
        positive(self.d_x, "d_x")?;
        positive(self.d_y, "d_y")?;
        if let Some(dz) = self.d_z {
            positive(dz, "d_z")?;
        }
        if !self.k0x.is_finite() {
            return Err(ZbError::Domain("k0x must be finite".into()));
        }
        if !(1..=4).contains(&self.component) {
            return Err(ZbError::Domain(format!(
                "spinor component must be 1..=4, got {}",
                self.component
            )));
        }
        Ok(())
    }

    pub fn require_dz(&self) -> Result<T> {
        self.d_z
            .ok_or_else(|| ZbError::Domain("3+1 mode requires the packet width d_z".into()))
    }

    /// Normalized y-profile f_y(y).
    pub fn profile_y(&self, y: T) -> T {
        gaussian_profile(self.d_y, y)
    }

    /// Normalized x-profile without the kick phase.
    pub fn profile_x(&self, x: T) -> T {
        gaussian_profile(self.d_x, x)
    }

    /// Normalized z-profile.
    pub fn profile_z(&self, z: T) -> Result<T> {
        Ok(gaussian_profile(self.require_dz()?, z))
    }

    /// (1/√2π) ∫ f_x(x) e^{-i k_x x} dx, real for this family.
    pub fn g_x(&self, kx: T) -> T {
        gaussian_transform(self.d_x, kx - self.k0x)
    }

    /// g_xy(k_x, y) = g_x(k_x) f_y(y).
    pub fn g_xy(&self, kx: T, y: T) -> T {
        self.g_x(kx) * self.profile_y(y)
    }
}

fn gaussian_profile<T: Scalar>(width: T, x: T) -> T {
    let pi = T::PI();
    (pi * width * width).powf(lit(-0.25)) * (-(x * x) / (lit::<T>(2.0) * width * width)).exp()
}

fn gaussian_transform<T: Scalar>(width: T, k: T) -> T {
    let pi = T::PI();
    (width * width / pi).powf(lit(0.25)) * (-(width * width * k * k) / lit(2.0)).exp()
}

/// Fourier amplitude g_z(k_z) of the z-profile (3+1 only).
pub fn g_z<T: Scalar>(packet: &GaussianPacket<T>, kz: T) -> Result<T> {
    Ok(gaussian_transform(packet.require_dz()?, kz))
}

/// Geometry of one k_x slice: the y-overlap is a Gaussian centred at ξ0 with
/// scale σ in ξ, times a polynomial.
struct SliceGeometry<T> {
    ratio: T,
    xi_center: T,
    xi_scale: T,
}

impl<T: Scalar> SliceGeometry<T> {
    fn new(packet: &GaussianPacket<T>, params: &SimParams<T>, kx: T) -> Self {
        let l = params.magnetic_length();
        let ratio = l * l / (packet.d_y * packet.d_y);
        let s = kx * l;
        let one = T::one();
        Self {
            ratio,
            xi_center: -ratio * s / (one + ratio),
            xi_scale: (lit::<T>(2.0) / (one + ratio)).sqrt(),
        }
    }
}

/// Fills `out[n]` with `e^{log_factor} · I_n(k_x)` where
/// `I_n(k_x) = ∫ f_y(y) ψ_n(y/L − k_x L) / √L dy`, leaving out the slice's
/// Gaussian `exp(-r s² / 2(1+r))`, which the caller folds into `log_factor`.
fn y_overlaps_into<T: Scalar>(
    packet: &GaussianPacket<T>,
    params: &SimParams<T>,
    kx: T,
    y_rule: &GaussHermite,
    log_factor: T,
    scratch: &mut [T],
    out: &mut [T],
) {
    let geo = SliceGeometry::new(packet, params, kx);
    let l = params.magnetic_length();
    let pi = T::PI();
    // √L · σ · (π d_y²)^{-1/4} · π^{-1/4}
    let log_prefactor = l.ln() / lit(2.0) + geo.xi_scale.ln()
        - (pi * packet.d_y * packet.d_y).ln() / lit(4.0)
        - pi.ln() / lit(4.0);
    out.iter_mut().for_each(|v| *v = T::zero());
    for (&u, &w) in y_rule.nodes().iter().zip(y_rule.weights()) {
        let xi = geo.xi_center + geo.xi_scale * lit::<T>(u);
        // e^{-ξ²/2} e^{-r(ξ+s)²/2} = e^{-u²} e^{-rs²/2(1+r)}; the u² cancels the weight.
        let start = (log_prefactor + log_factor + lit::<T>(w.ln())).exp();
        hermite::recurrence_from(xi, start, scratch);
        for (acc, &psi) in out.iter_mut().zip(scratch.iter()) {
            *acc = *acc + psi;
        }
    }
}

/// Exponent `-r s²/(2(1+r))` of the slice Gaussian at this k_x.
fn slice_log_gaussian<T: Scalar>(packet: &GaussianPacket<T>, params: &SimParams<T>, kx: T) -> T {
    let geo = SliceGeometry::new(packet, params, kx);
    let s = kx * params.magnetic_length();
    -geo.ratio * s * s / (lit::<T>(2.0) * (T::one() + geo.ratio))
}

/// F_n(k_x) for a single level and wavenumber.
pub fn f_coeff<T: Scalar>(
    packet: &GaussianPacket<T>,
    n: usize,
    kx: T,
    params: &SimParams<T>,
) -> Result<T> {
    packet.validate()?;
    let y_rule = GaussHermite::new(n / 2 + 32)?;
    let log_factor = slice_log_gaussian(packet, params, kx);
    let mut scratch = vec![T::zero(); n + 1];
    let mut out = vec![T::zero(); n + 1];
    y_overlaps_into(
        packet,
        params,
        kx,
        &y_rule,
        log_factor,
        &mut scratch,
        &mut out,
    );
    let value = packet.g_x(kx) * out[n];
    if !value.is_finite() {
        return Err(ZbError::Convergence(format!(
            "F_{n}({kx}) quadrature produced a non-finite value"
        )));
    }
    Ok(value)
}

/// Knobs for building a [`PacketDecomposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionConfig {
    /// Largest Landau level ever considered.
    pub n_max_cap: usize,
    /// Target for `1 − Σ_{n ≤ N_max} U_{n,n}`.
    pub tail_tol: f64,
    /// N_max is raised to at least this level.
    pub n_max_floor: usize,
    /// Gauss–Hermite order for k_x; defaults to `n_max_cap + 16`.
    pub kx_nodes: Option<usize>,
    /// Gauss–Hermite order for y; defaults to `n_max_cap / 2 + 24`.
    pub y_nodes: Option<usize>,
    /// Trapezoid intervals on `[0, kz_cutoff / d_z]` (3+1 only).
    pub kz_intervals: usize,
    /// Cut-off of the k_z grid in units of 1/d_z.
    pub kz_cutoff: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            n_max_cap: 120,
            tail_tol: 1e-10,
            n_max_floor: 0,
            kx_nodes: None,
            y_nodes: None,
            kz_intervals: 256,
            kz_cutoff: 6.5,
        }
    }
}

impl DecompositionConfig {
    pub fn kx_order(&self) -> usize {
        self.kx_nodes.unwrap_or(self.n_max_cap + 16)
    }

    pub fn y_order(&self) -> usize {
        self.y_nodes.unwrap_or(self.n_max_cap / 2 + 24)
    }

    /// Every node count and the level cap doubled (convergence studies).
    pub fn refined(&self) -> Self {
        Self {
            n_max_cap: 2 * self.n_max_cap,
            tail_tol: self.tail_tol,
            n_max_floor: self.n_max_floor,
            kx_nodes: Some(2 * self.kx_order()),
            y_nodes: Some(2 * self.y_order()),
            kz_intervals: 2 * self.kz_intervals,
            kz_cutoff: self.kz_cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max_cap < 1 {
            return Err(ZbError::Domain("n_max_cap must be at least 1".into()));
        }
        if !(self.tail_tol > 0.0) {
            return Err(ZbError::Domain("tail_tol must be positive".into()));
        }
        if self.n_max_floor > self.n_max_cap {
            return Err(ZbError::Domain(format!(
                "n_max_floor = {} exceeds n_max_cap = {}",
                self.n_max_floor, self.n_max_cap
            )));
        }
        if self.kx_order() <= self.n_max_cap {
            return Err(ZbError::Domain(format!(
                "kx_nodes = {} cannot integrate U up to n = {} exactly",
                self.kx_order(),
                self.n_max_cap
            )));
        }
        if 2 * self.y_order() <= self.n_max_cap {
            return Err(ZbError::Domain(format!(
                "y_nodes = {} cannot integrate F up to n = {} exactly",
                self.y_order(),
                self.n_max_cap
            )));
        }
        if self.kz_intervals < 8 || !(self.kz_cutoff > 0.0) {
            return Err(ZbError::Domain(
                "k_z grid needs >= 8 intervals and a positive cut-off".into(),
            ));
        }
        Ok(())
    }
}

/// |g_z(k_z)|² either as the 2+1 delta or as a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub enum KzProfile<T: Scalar> {
    Delta,
    /// Nodes on k_z ≥ 0 with weights already containing |g_z|² and the even fold.
    Grid {
        nodes: Vec<T>,
        weights: Vec<T>,
    },
}

impl<T: Scalar> KzProfile<T> {
    pub fn build(
        packet: &GaussianPacket<T>,
        mode: Dimensionality,
        cfg: &DecompositionConfig,
    ) -> Result<Self> {
        match mode {
            Dimensionality::TwoPlusOne => Ok(KzProfile::Delta),
            Dimensionality::ThreePlusOne => {
                let dz = packet.require_dz()?;
                let (nodes, base) = even_trapezoid(lit::<T>(cfg.kz_cutoff) / dz, cfg.kz_intervals);
                let weights = nodes
                    .iter()
                    .zip(&base)
                    .map(|(&k, &w)| {
                        let g = gaussian_transform(dz, k);
                        w * g * g
                    })
                    .collect();
                Ok(KzProfile::Grid { nodes, weights })
            }
        }
    }

    /// Iterates `(k_z, weight)` pairs; the delta is a single node at 0.
    pub fn points(&self) -> Vec<(T, T)> {
        match self {
            KzProfile::Delta => vec![(T::zero(), T::one())],
            KzProfile::Grid { nodes, weights } => {
                nodes.iter().copied().zip(weights.iter().copied()).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            KzProfile::Delta => 1,
            KzProfile::Grid { nodes, .. } => nodes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// ∫ |g_z|² dk_z under this rule (1 for the delta).
    pub fn mass(&self) -> T {
        self.points().into_iter().map(|(_, w)| w).sum()
    }
}

/// Landau-basis content of one packet.
#[derive(Debug, Clone)]
pub struct PacketDecomposition<T: Scalar> {
    packet: GaussianPacket<T>,
    params: SimParams<T>,
    n_max: usize,
    n_computed: usize,
    kx_nodes: Vec<T>,
    kx_log_weights: Vec<T>,
    /// `F_n(k_x,j) · √W_j`, row-major by n.
    f_weighted: Vec<T>,
    u_diag: Vec<T>,
    u_upper: Vec<T>,
    kz: KzProfile<T>,
    tail_mass: T,
}

impl<T: Scalar> PacketDecomposition<T> {
    pub fn build(
        packet: &GaussianPacket<T>,
        params: &SimParams<T>,
        cfg: &DecompositionConfig,
    ) -> Result<Self> {
        packet.validate()?;
        cfg.validate()?;
        if packet.component != 2 {
            return Err(ZbError::Domain(format!(
                "the Landau-basis engine handles packets in spinor component 2, got {}",
                packet.component
            )));
        }
        let cap = cfg.n_max_cap;
        let count = cap + 1;
        let kx_rule = GaussHermite::new(cfg.kx_order())?;
        let y_rule = GaussHermite::new(cfg.y_order())?;

        // Combined k_x Gaussian of F_m F_n: exp(-a (k_x - k_c)²).
        let l = params.magnetic_length();
        let r = l * l / (packet.d_y * packet.d_y);
        let beta = r * l * l / (T::one() + r);
        let dx2 = packet.d_x * packet.d_x;
        let a = dx2 + beta;
        let kc = dx2 * packet.k0x / a;
        let scale = T::one() / a.sqrt();
        let pi = T::PI();
        let log_gx_norm = (dx2 / pi).ln() / lit(4.0);

        let rows: Vec<(T, T, Vec<T>)> = kx_rule
            .nodes()
            .par_iter()
            .zip(kx_rule.weights().par_iter())
            .map(|(&u, &w)| {
                let u_t: T = lit(u);
                let kx = kc + scale * u_t;
                let log_w_scaled = lit::<T>(w.ln()) + u_t * u_t + scale.ln();
                // g_x(k_x) · exp(-r s²/2(1+r)) · √W = exp(-u²/2 - const) · √(scale·w·e^{u²})
                let dk = kx - packet.k0x;
                let log_gauss =
                    -(dx2 * dk * dk) / lit(2.0) + slice_log_gaussian(packet, params, kx);
                let log_factor = log_gx_norm + log_gauss + log_w_scaled / lit(2.0);
                let mut scratch = vec![T::zero(); count];
                let mut out = vec![T::zero(); count];
                y_overlaps_into(
                    packet,
                    params,
                    kx,
                    &y_rule,
                    log_factor,
                    &mut scratch,
                    &mut out,
                );
                (kx, log_w_scaled, out)
            })
            .collect();

        let nk = rows.len();
        let mut f_weighted = vec![T::zero(); count * nk];
        for (j, (_, _, col)) in rows.iter().enumerate() {
            for (n, &v) in col.iter().enumerate() {
                f_weighted[n * nk + j] = v;
            }
        }
        if f_weighted.iter().any(|v| !v.is_finite()) {
            return Err(ZbError::Convergence(
                "packet overlaps are not finite".into(),
            ));
        }
        let kx_nodes = rows.iter().map(|(k, _, _)| *k).collect();
        let kx_log_weights = rows.iter().map(|(_, w, _)| *w).collect();

        let dot = |m: usize, n: usize| -> T {
            let (rm, rn) = (
                &f_weighted[m * nk..(m + 1) * nk],
                &f_weighted[n * nk..(n + 1) * nk],
            );
            rm.iter().zip(rn).map(|(&x, &y)| x * y).sum()
        };
        let u_diag_all: Vec<T> = (0..count).map(|n| dot(n, n)).collect();

        let tol: T = lit(cfg.tail_tol);
        let mut cumulative = T::zero();
        let mut n_max = None;
        for (n, &d) in u_diag_all.iter().enumerate() {
            cumulative = cumulative + d;
            if T::one() - cumulative < tol {
                n_max = Some(n);
                break;
            }
        }
        let Some(n_max) = n_max else {
            return Err(ZbError::Convergence(format!(
                "tail mass {:.3e} exceeds {:e} at the level cap {cap}",
                crate::scalar::to_f64(T::one() - cumulative),
                cfg.tail_tol
            )));
        };
        let n_max = n_max.max(cfg.n_max_floor);
        let retained: T = u_diag_all[..=n_max].iter().copied().sum();
        // Keep one level past N_max so U_{N_max, N_max+1} is available.
        let n_computed = (n_max + 1).min(cap);
        let u_upper = (0..n_computed).map(|n| dot(n, n + 1)).collect();
        let kz = KzProfile::build(packet, params.dimensionality, cfg)?;

        Ok(Self {
            packet: *packet,
            params: *params,
            n_max,
            n_computed,
            kx_nodes,
            kx_log_weights,
            f_weighted,
            u_diag: u_diag_all,
            u_upper,
            kz,
            tail_mass: T::one() - retained,
        })
    }

    pub fn packet(&self) -> &GaussianPacket<T> {
        &self.packet
    }

    pub fn params(&self) -> &SimParams<T> {
        &self.params
    }

    /// Smallest level cut-off meeting the tail tolerance.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `1 − Σ_{n ≤ N_max} U_{n,n}`.
    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    pub fn kx_nodes(&self) -> &[T] {
        &self.kx_nodes
    }

    pub fn kz_profile(&self) -> &KzProfile<T> {
        &self.kz
    }

    pub fn with_kz_profile(mut self, kz: KzProfile<T>) -> Self {
        self.kz = kz;
        self
    }

    fn rows(&self) -> usize {
        self.u_diag.len()
    }

    fn row(&self, n: usize) -> &[T] {
        let nk = self.kx_nodes.len();
        &self.f_weighted[n * nk..(n + 1) * nk]
    }

    /// F_n at the j-th k_x node.
    pub fn f_value(&self, n: usize, j: usize) -> Result<T> {
        if n >= self.rows() {
            return Err(ZbError::Truncation {
                index: n,
                n_max: self.rows() - 1,
            });
        }
        Ok(self.row(n)[j] * (-self.kx_log_weights[j] / lit(2.0)).exp())
    }

    /// U_{m,n} = ∫ F_m F_n dk_x; symmetric since every F_n is real.
    pub fn u_overlap(&self, m: usize, n: usize) -> Result<T> {
        let top = self.rows() - 1;
        if m > top || n > top {
            return Err(ZbError::Truncation {
                index: m.max(n),
                n_max: top,
            });
        }
        if m == n {
            return Ok(self.u_diag[n]);
        }
        if m.abs_diff(n) == 1 && m.min(n) < self.u_upper.len() {
            return Ok(self.u_upper[m.min(n)]);
        }
        let (lo, hi) = (m.min(n), m.max(n));
        Ok(self
            .row(lo)
            .iter()
            .zip(self.row(hi))
            .map(|(&x, &y)| x * y)
            .sum())
    }

    /// U_{n,n} for n ≤ N_max.
    pub fn occupations(&self) -> &[T] {
        &self.u_diag[..=self.n_max]
    }

    /// U_{n,n+1} for n < N_max (plus the edge element when available).
    pub fn upper_band(&self) -> &[T] {
        &self.u_upper
    }

    /// Σ_{n ≤ cap} ∫ |F_n|² dk_x over every computed level.
    pub fn total_weight(&self) -> T {
        self.u_diag.iter().copied().sum()
    }

    /// Static ⟨f|â|f⟩ = Σ_n √(n+1) U_{n,n+1}.
    pub fn lowering_expectation(&self) -> T {
        self.u_upper
            .iter()
            .enumerate()
            .map(|(n, &u)| from_usize::<T>(n + 1).sqrt() * u)
            .sum()
    }

    /// Levels whose occupation exceeds `threshold`.
    pub fn occupied_levels(&self, threshold: T) -> Vec<usize> {
        self.occupations()
            .iter()
            .enumerate()
            .filter(|(_, &u)| u > threshold)
            .map(|(n, _)| n)
            .collect()
    }

    /// Rows `(n, k_x, re, im)` of the F table, for inspection dumps.
    pub fn f_table(&self) -> Vec<(usize, T, T, T)> {
        let mut out = Vec::with_capacity((self.n_computed + 1) * self.kx_nodes.len());
        for n in 0..=self.n_computed {
            for (j, &kx) in self.kx_nodes.iter().enumerate() {
                let v = self.f_value(n, j).unwrap_or(T::zero());
                out.push((n, kx, v, T::zero()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_like(b: f64) -> (GaussianPacket<f64>, SimParams<f64>) {
        let params = SimParams::from_b(b).unwrap();
        let l = params.magnetic_length();
        let packet = GaussianPacket::new(0.9 * l, l, None, 2f64.sqrt() / l).unwrap();
        (packet, params)
    }

    /// Brute-force oracle: trapezoid in y on a wide uniform grid.
    fn f_coeff_trapezoid(
        p: &GaussianPacket<f64>,
        n: usize,
        kx: f64,
        params: &SimParams<f64>,
    ) -> f64 {
        let l = params.magnetic_length();
        let center = kx * l * l;
        let span = 14.0 * l.max(p.d_y) + center.abs();
        let steps = 4000;
        let h = 2.0 * span / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let y = -span + h * i as f64;
            let xi = y / l - kx * l;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            acc += w * p.profile_y(y) * hermite::function(n, xi) / l.sqrt();
        }
        p.g_x(kx) * acc * h
    }

    #[test]
    fn gz_is_normalized_and_even() {
        let p = GaussianPacket::new(1.0, 1.0, Some(1.0), 0.0).unwrap();
        let h = 1e-3;
        let total: f64 = (-10000..=10000)
            .map(|i| g_z(&p, i as f64 * h).unwrap().powi(2))
            .sum::<f64>()
            * h;
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(g_z(&p, 0.7).unwrap(), g_z(&p, -0.7).unwrap());
        assert!(g_z(&GaussianPacket::new(1.0, 1.0, None, 0.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn gz_matches_direct_fourier_quadrature() {
        let p = GaussianPacket::new(1.0, 1.0, Some(1.3), 0.0).unwrap();
        let kz = 1.0 / 1.3;
        // (1/√2π) ∫ f_z(z) cos(kz z) dz by trapezoid
        let h = 1e-3;
        let direct: f64 = (-15000..=15000)
            .map(|i| {
                let z = i as f64 * h;
                p.profile_z(z).unwrap() * (kz * z).cos()
            })
            .sum::<f64>()
            * h
            / (2.0 * std::f64::consts::PI).sqrt();
        assert!((direct - g_z(&p, kz).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn ground_state_profile_occupies_only_n0_at_kx0() {
        let params = SimParams::<f64>::from_b(1.0).unwrap();
        let l = params.magnetic_length();
        let p = GaussianPacket::new(1.0, l, None, 0.0).unwrap();
        let f0 = f_coeff(&p, 0, 0.0, &params).unwrap();
        assert!((f0 - p.g_x(0.0)).abs() < 1e-14);
        for n in 1..10 {
            assert!(f_coeff(&p, n, 0.0, &params).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn f_coefficients_match_trapezoid_oracle() {
        // d_y = √2Δ, k0x = 1/Δ, L = √2Δ; evaluated at k_x = k0x
        let (p, params) = fig2_like(2.0 * 1.05f64.sqrt());
        let kx = p.k0x;
        for n in 0..=8 {
            let gh = f_coeff(&p, n, kx, &params).unwrap();
            let oracle = f_coeff_trapezoid(&p, n, kx, &params);
            assert!((gh - oracle).abs() < 1e-12, "n={n}: {gh} vs {oracle}");
        }
    }

    #[test]
    fn decomposition_is_complete() {
        for b in [0.3, 0.952, 2.05, 8.16] {
            let (p, params) = fig2_like(b);
            let d =
                PacketDecomposition::build(&p, &params, &DecompositionConfig::default()).unwrap();
            assert!((d.total_weight() - 1.0).abs() < 1e-12, "b={b}");
            let occupied: f64 = d.occupations().iter().sum();
            assert!((occupied - 1.0).abs() < 1e-8);
            assert!(d.tail_mass() < 1e-10);
        }
    }

    #[test]
    fn table_values_agree_with_single_point_evaluation() {
        let (p, params) = fig2_like(1.3);
        let d = PacketDecomposition::build(&p, &params, &DecompositionConfig::default()).unwrap();
        for n in [0, 3, 7] {
            for j in [10, 60, 90] {
                let kx = d.kx_nodes()[j];
                let direct = f_coeff(&p, n, kx, &params).unwrap();
                let table = d.f_value(n, j).unwrap();
                assert!((direct - table).abs() < 1e-13 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn overlap_band_matches_two_dimensional_oracle() {
        // Brute-force double trapezoid over (k_x, y) for U_{n,n+1}.
        let (p, params) = fig2_like(2.0 * 16.65f64.sqrt());
        let d = PacketDecomposition::build(&p, &params, &DecompositionConfig::default()).unwrap();
        let l = params.magnetic_length();
        let dk = 8.0 / p.d_x.min(l);
        let steps = 400;
        let h = 2.0 * dk / steps as f64;
        let mut band = [0.0f64; 4];
        for i in 0..=steps {
            let kx = p.k0x * 0.5 - dk + h * i as f64;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            let f: Vec<f64> = (0..5)
                .map(|n| f_coeff_trapezoid(&p, n, kx, &params))
                .collect();
            for n in 0..4 {
                band[n] += w * h * f[n] * f[n + 1];
            }
        }
        for (n, &expected) in band.iter().enumerate() {
            let got = d.u_overlap(n, n + 1).unwrap();
            assert!(
                (got - expected).abs() < 1e-10,
                "U_{n},{}: {got} vs {expected}",
                n + 1
            );
            assert_eq!(got, d.u_overlap(n + 1, n).unwrap());
        }
    }

    #[test]
    fn static_lowering_expectation_is_minus_k0x_l_over_root2() {
        // ⟨ξ⟩ = ⟨y⟩/L − ⟨k_x⟩L and ⟨∂_ξ⟩ = 0, so ⟨â⟩ = −k0x L / √2.
        let cfg = DecompositionConfig {
            tail_tol: 1e-14,
            ..Default::default()
        };
        for b in [0.5, 1.0, 4.0] {
            let (p, params) = fig2_like(b);
            let d = PacketDecomposition::build(&p, &params, &cfg).unwrap();
            let expected = -p.k0x * params.magnetic_length() / 2f64.sqrt();
            let got = d.lowering_expectation();
            assert!((got - expected).abs() < 1e-12, "b={b}: {got} vs {expected}");
        }
    }

    #[test]
    fn refinement_changes_overlaps_negligibly() {
        let (p, params) = fig2_like(2.0);
        let cfg = DecompositionConfig::default();
        let coarse = PacketDecomposition::build(&p, &params, &cfg).unwrap();
        let fine = PacketDecomposition::build(&p, &params, &cfg.refined()).unwrap();
        for n in 0..coarse.n_max() {
            assert!((coarse.u_overlap(n, n).unwrap() - fine.u_overlap(n, n).unwrap()).abs() < 1e-9);
            assert!(
                (coarse.u_overlap(n, n + 1).unwrap() - fine.u_overlap(n, n + 1).unwrap()).abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn level_floor_raises_n_max() {
        let (p, params) = fig2_like(2.0);
        let base =
            PacketDecomposition::build(&p, &params, &DecompositionConfig::default()).unwrap();
        let cfg = DecompositionConfig {
            n_max_floor: 2 * base.n_max(),
            ..Default::default()
        };
        let wide = PacketDecomposition::build(&p, &params, &cfg).unwrap();
        assert_eq!(wide.n_max(), 2 * base.n_max());
        assert!(wide.tail_mass() < base.tail_mass());
        let bad = DecompositionConfig {
            n_max_floor: 500,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn tail_mass_decreases_with_cutoff() {
        let (p, params) = fig2_like(1.0);
        let mut previous = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
            let cfg = DecompositionConfig {
                tail_tol: tol,
                ..Default::default()
            };
            let d = PacketDecomposition::build(&p, &params, &cfg).unwrap();
            assert!(d.tail_mass() < tol);
            assert!(d.tail_mass() <= previous);
            previous = d.tail_mass();
        }
    }

    #[test]
    fn cap_too_small_is_a_convergence_error() {
        let (p, params) = fig2_like(1.0);
        let cfg = DecompositionConfig {
            n_max_cap: 3,
            ..Default::default()
        };
        assert!(matches!(
            PacketDecomposition::build(&p, &params, &cfg),
            Err(ZbError::Convergence(_))
        ));
    }

    #[test]
    fn index_past_cutoff_is_a_truncation_error() {
        let (p, params) = fig2_like(1.0);
        let cfg = DecompositionConfig {
            n_max_cap: 40,
            ..Default::default()
        };
        let d = PacketDecomposition::build(&p, &params, &cfg).unwrap();
        assert!(matches!(
            d.u_overlap(0, 41),
            Err(ZbError::Truncation { .. })
        ));
    }

    #[test]
    fn kz_grid_carries_unit_mass() {
        let p = GaussianPacket::<f64>::new(1.0, 1.0, Some(0.8), 0.0).unwrap();
        let prof = KzProfile::build(
            &p,
            Dimensionality::ThreePlusOne,
            &DecompositionConfig::default(),
        )
        .unwrap();
        assert!((prof.mass() - 1.0).abs() < 1e-14);
        assert_eq!(KzProfile::<f64>::Delta.mass(), 1.0);
    }

    #[test]
    fn parseval_holds_in_position_and_momentum_space() {
        let (p, _) = fig2_like(1.0);
        let h = 2e-3;
        let pos: f64 = (-20000..=20000)
            .map(|i| p.profile_x(i as f64 * h).powi(2))
            .sum::<f64>()
            * h;
        let mom: f64 = (-20000..=20000)
            .map(|i| p.g_x(p.k0x + i as f64 * h).powi(2))
            .sum::<f64>()
            * h;
        assert!((pos - 1.0).abs() < 1e-12);
        assert!((mom - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_packets() {
        assert!(GaussianPacket::new(0.0, 1.0, None, 0.0).is_err());
        assert!(GaussianPacket::new(1.0, -1.0, None, 0.0).is_err());
        assert!(GaussianPacket::new(1.0, 1.0, Some(0.0), 0.0).is_err());
        assert!(GaussianPacket::new(1.0, 1.0, None, 0.0)
            .unwrap()
            .with_component(5)
            .is_err());
        let params = SimParams::from_b(1.0).unwrap();
        let p = GaussianPacket::new(1.0, 1.0, None, 0.0)
            .unwrap()
            .with_component(1)
            .unwrap();
        assert!(PacketDecomposition::build(&p, &params, &DecompositionConfig::default()).is_err());
    }

    #[test]
    fn single_precision_decomposition() {
        let params = SimParams::from_b(1.0f32).unwrap();
        let l = params.magnetic_length();
        let p = GaussianPacket::new(0.9 * l, l, None, 2f32.sqrt() / l).unwrap();
        let cfg = DecompositionConfig {
            n_max_cap: 40,
            tail_tol: 1e-5,
            ..Default::default()
        };
        let d = PacketDecomposition::build(&p, &params, &cfg).unwrap();
        assert!((d.total_weight() - 1.0).abs() < 1e-5);
        assert!((d.lowering_expectation() + 1.0).abs() < 1e-4);
    }
}
