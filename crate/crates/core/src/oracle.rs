//! Brute-force reference path: truncated Hamiltonian matrices, dense
//! eigensolves and Schrödinger-picture evolution of the projected packet.
//!
//! Basis order: index `c·(N+1) + n` for spinor component `c ∈ 0..4`
//! (Dirac representation) and oscillator level `n ≤ N`. In the k_x basis the
//! Hamiltonian is real symmetric,
//!
//! ```text
//! H = ⎡ 1   h ⎤     h = ⎡ k_z   −b â  ⎤
//!     ⎣ h  −1 ⎦         ⎣ −b â†  −k_z ⎦
//! ```
//!
//! and it decouples into 4×4 blocks per Landau level, so levels below the
//! cut are represented exactly; only the top block is distorted.

use nalgebra::{DMatrix, DVector, Matrix4, RealField, SymmetricEigen};
use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;

use crate::dynamics::{PositionSample, Provenance, TimeGrid, Trajectory};
use crate::error::{Result, ZbError};
use crate::hermite;
use crate::landau::energy;
use crate::params::{Dimensionality, SimParams};
use crate::quadrature::even_trapezoid;
use crate::scalar::{from_usize, lit, to_f64, Scalar};
use crate::wavepacket::{g_z, GaussianPacket};

/// Scalars usable by the dense linear algebra.
pub trait OracleScalar: Scalar + RealField {}
impl<T: Scalar + RealField> OracleScalar for T {}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian<T: OracleScalar> {
    pub n_trunc: usize,
    pub kx: T,
    pub kz: T,
    /// Real symmetric in this basis; see [`TruncatedHamiltonian::to_complex`].
    pub matrix: DMatrix<T>,
}

impl<T: OracleScalar> TruncatedHamiltonian<T> {
    pub fn dimension(&self) -> usize {
        4 * (self.n_trunc + 1)
    }

    pub fn index(&self, component: usize, n: usize) -> usize {
        component * (self.n_trunc + 1) + n
    }

    pub fn to_complex(&self) -> DMatrix<Complex<T>> {
        self.matrix.map(|v| Complex::new(v, T::zero()))
    }

    /// max |H − Hᵀ|.
    pub fn hermiticity_defect(&self) -> T {
        let t = self.matrix.transpose();
        max_abs(&(&self.matrix - t))
    }

    pub fn eigen(&self) -> Eigensystem<T> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values = DVector::from_iterator(order.len(), order.iter().map(|&j| eig.eigenvalues[j]));
        let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Eigensystem {
            n_trunc: self.n_trunc,
            values,
            vectors,
        }
    }
}

/// Sorted eigenvalues with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem<T: OracleScalar> {
    pub n_trunc: usize,
    pub values: DVector<T>,
    pub vectors: DMatrix<T>,
}

impl<T: OracleScalar> Eigensystem<T> {
    /// `e^{-iHt} ψ` via the eigen-decomposition.
    pub fn evolve(&self, coeffs: &DVector<Complex<T>>, t: T) -> Result<DVector<Complex<T>>> {
        if coeffs.len() != self.values.len() {
            return Err(ZbError::Domain(format!(
                "coefficient vector has length {}, basis has {}",
                coeffs.len(),
                self.values.len()
            )));
        }
        let norm: T = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if Float::abs(norm - T::one()) > lit(1e-10) {
            return Err(ZbError::Domain(format!(
                "coefficients not normalized (norm² = {norm})"
            )));
        }
        let v = &self.vectors;
        let mut out = DVector::from_element(coeffs.len(), Complex::new(T::zero(), T::zero()));
        for j in 0..self.values.len() {
            let mut proj = Complex::new(T::zero(), T::zero());
            for r in 0..coeffs.len() {
                proj += coeffs[r] * v[(r, j)];
            }
            let (s, c) = Float::sin_cos(self.values[j] * t);
            proj *= Complex::new(c, -s);
            for r in 0..coeffs.len() {
                out[r] += proj * v[(r, j)];
            }
        }
        Ok(out)
    }

    /// Oscillator-weight fraction of eigenvector `j` above level `cut`.
    pub fn weight_above(&self, j: usize, cut: usize) -> T {
        let stride = self.n_trunc + 1;
        let mut w = T::zero();
        for c in 0..4 {
            for n in cut..stride {
                let v = self.vectors[(c * stride + n, j)];
                w += v * v;
            }
        }
        w
    }
}

fn max_abs<T: OracleScalar>(m: &DMatrix<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, &v| Float::max(acc, Float::abs(v)))
}

fn max_abs_complex<T: OracleScalar>(m: &DMatrix<Complex<T>>) -> T {
    m.iter().fold(T::zero(), |acc, v| Float::max(acc, v.norm()))
}

/// Dense truncated Hamiltonian at one (k_x, k_z); `k_x` only labels the guiding centre.
pub fn build_matrix<T: OracleScalar>(
    kx: T,
    kz: T,
    n_trunc: usize,
    params: &SimParams<T>,
) -> TruncatedHamiltonian<T> {
    let stride = n_trunc + 1;
    let dim = 4 * stride;
    let b = params.b();
    let mut m = DMatrix::zeros(dim, dim);
    let idx = |c: usize, n: usize| c * stride + n;
    for n in 0..stride {
        m[(idx(0, n), idx(0, n))] = T::one();
        m[(idx(1, n), idx(1, n))] = T::one();
        m[(idx(2, n), idx(2, n))] = -T::one();
        m[(idx(3, n), idx(3, n))] = -T::one();
        for (u, l, v) in [(0, 2, kz), (1, 3, -kz)] {
            m[(idx(u, n), idx(l, n))] = v;
            m[(idx(l, n), idx(u, n))] = v;
        }
    }
    // ⟨n−1|â|n⟩ = √n
    for n in 1..stride {
        let v = -b * Float::sqrt(from_usize::<T>(n));
        for (r, c) in [(idx(0, n - 1), idx(3, n)), (idx(2, n - 1), idx(1, n))] {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    TruncatedHamiltonian {
        n_trunc,
        kx,
        kz,
        matrix: m,
    }
}

/// Eigenvalues in ascending order, e.g. for a spectrum dump.
pub fn eigenvalues<T: OracleScalar>(h: &TruncatedHamiltonian<T>) -> Vec<T> {
    h.eigen().values.iter().copied().collect()
}

/// `e^{-iHt} ψ` for a single call; use [`Eigensystem::evolve`] for repeated times.
pub fn evolve<T: OracleScalar>(
    h: &TruncatedHamiltonian<T>,
    coeffs: &DVector<Complex<T>>,
    t: T,
) -> Result<DVector<Complex<T>>> {
    h.eigen().evolve(coeffs, t)
}

/// Comparison of truncated-matrix eigenvalues against the closed-form levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCheck {
    /// Largest relative deviation among the compared eigenvalues.
    pub max_rel_deviation: f64,
    pub compared: usize,
    /// Eigenvectors concentrated above the compared level range.
    pub edge_flagged: usize,
    /// Every compared level carries the expected multiplicity (1 for n = 0, 2 otherwise, per sign).
    pub multiplicities_ok: bool,
}

/// Checks eigenvalues of levels `n ≤ ⌊fraction · N⌋` against `±E_n(k_z)`.
pub fn check_spectrum<T: OracleScalar>(
    n_trunc: usize,
    kz: T,
    params: &SimParams<T>,
    fraction: f64,
) -> SpectrumCheck {
    let h = build_matrix(T::zero(), kz, n_trunc, params);
    let eig = h.eigen();
    let top = (fraction * n_trunc as f64).floor() as usize;
    let edge_cut = (top + 1).min(n_trunc).max(1);
    let levels: Vec<f64> = (0..=n_trunc)
        .map(|n| to_f64(energy(n, kz, params)))
        .collect();
    let mut counts = vec![[0usize; 2]; top + 1];
    let mut max_dev = 0.0f64;
    let (mut compared, mut flagged) = (0, 0);
    for j in 0..eig.values.len() {
        if to_f64(eig.weight_above(j, edge_cut)) > 0.5 {
            flagged += 1;
            continue;
        }
        let lambda = to_f64(eig.values[j]);
        let (n, dev) = levels
            .iter()
            .enumerate()
            .map(|(n, &e)| (n, (lambda.abs() - e).abs() / e))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if n <= top {
            max_dev = max_dev.max(dev);
            compared += 1;
            counts[n][usize::from(lambda > 0.0)] += 1;
        }
    }
    let multiplicities_ok = counts
        .iter()
        .enumerate()
        .all(|(n, c)| *c == if n == 0 { [1, 1] } else { [2, 2] });
    SpectrumCheck {
        max_rel_deviation: max_dev,
        compared,
        edge_flagged: flagged,
        multiplicities_ok,
    }
}

// ---------------------------------------------------------------- transform

/// Standard-representation Dirac matrices (β, α_x, α_y, α_z).
pub fn dirac_matrices<T: OracleScalar>() -> [Matrix4<Complex<T>>; 4] {
    let z = Complex::new(T::zero(), T::zero());
    let o = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let beta = Matrix4::from_diagonal(&nalgebra::Vector4::new(o, o, -o, -o));
    let off = |s: [[Complex<T>; 2]; 2]| {
        let mut m = Matrix4::from_element(z);
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c + 2)] = s[r][c];
                m[(r + 2, c)] = s[r][c];
            }
        }
        m
    };
    [
        beta,
        off([[z, o], [o, z]]),
        off([[z, -i], [i, z]]),
        off([[o, z], [z, -o]]),
    ]
}

/// Outcome of the unitary-equivalence check of the transformed Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    pub n_trunc: usize,
    /// max |δ² − 1|.
    pub delta_square: f64,
    /// max |P P† − 1|.
    pub unitarity: f64,
    /// max |P H P† − H′| with H′ assembled from its off-diagonal block form.
    pub block_form: f64,
    /// max |λ_H − λ_H′| over the sorted spectra.
    pub spectrum: f64,
    /// max |H′ − H′†|.
    pub hermiticity: f64,
}

impl TransformReport {
    pub fn passes(&self, unitarity_tol: f64, spectrum_tol: f64) -> bool {
        self.delta_square <= unitarity_tol
            && self.unitarity <= unitarity_tol
            && self.block_form <= spectrum_tol
            && self.spectrum <= spectrum_tol
            && self.hermiticity <= unitarity_tol
    }
}

/// P = δ(δ + β)/√2 with δ = α_x α_y α_z β.
pub fn transform_operator<T: OracleScalar>() -> (Matrix4<Complex<T>>, Matrix4<Complex<T>>) {
    let [beta, ax, ay, az] = dirac_matrices::<T>();
    let delta = ax * ay * az * beta;
    let s = Complex::new(Float::sqrt(lit::<T>(2.0)), T::zero());
    let p = delta * (delta + beta) / s;
    (delta, p)
}

/// Builds H′ = [[0, h′], [h′†, 0]], h′ = [[k_z − i, −b â], [−b â†, −k_z − i]].
pub fn transformed_matrix<T: OracleScalar>(
    kz: T,
    n_trunc: usize,
    params: &SimParams<T>,
) -> DMatrix<Complex<T>> {
    let stride = n_trunc + 1;
    let dim = 4 * stride;
    let idx = |c: usize, n: usize| c * stride + n;
    let i = Complex::new(T::zero(), T::one());
    let re = |v: T| Complex::new(v, T::zero());
    let mut m = DMatrix::from_element(dim, dim, re(T::zero()));
    let mut set = |r: usize, c: usize, v: Complex<T>| {
        m[(r, c)] = v;
        m[(c, r)] = v.conj();
    };
    for n in 0..stride {
        set(idx(0, n), idx(2, n), re(kz) - i);
        set(idx(1, n), idx(3, n), re(-kz) - i);
    }
    let b = params.b();
    for n in 1..stride {
        let v = re(-b * Float::sqrt(from_usize::<T>(n)));
        set(idx(0, n - 1), idx(3, n), v);
        set(idx(2, n - 1), idx(1, n), v);
    }
    m
}

pub fn check_transform<T: OracleScalar>(
    params: &SimParams<T>,
    n_trunc: usize,
    kz: T,
) -> TransformReport {
    let (delta, p4) = transform_operator::<T>();
    let id4 = Matrix4::<Complex<T>>::identity();
    let m4_dev =
        |m: Matrix4<Complex<T>>| to_f64(m.iter().fold(T::zero(), |a, v| Float::max(a, v.norm())));
    let delta_square = m4_dev(delta * delta - id4);
    let unitarity = m4_dev(p4 * p4.adjoint() - id4);

    let h = build_matrix(T::zero(), kz, n_trunc, params);
    let stride = n_trunc + 1;
    let dim = h.dimension();
    let p = DMatrix::from_fn(dim, dim, |r, c| {
        if r % stride == c % stride {
            p4[(r / stride, c / stride)]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let rotated = &p * h.to_complex() * p.adjoint();
    let h_prime = transformed_matrix(kz, n_trunc, params);
    let block_form = to_f64(max_abs_complex(&(&rotated - &h_prime)));
    let hermiticity = to_f64(max_abs_complex(&(&h_prime - h_prime.adjoint())));

    let mut lam_h: Vec<T> = eigenvalues(&h);
    let mut lam_p: Vec<T> = SymmetricEigen::new(h_prime)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    lam_h.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lam_p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let spectrum = lam_h
        .iter()
        .zip(&lam_p)
        .map(|(a, b)| to_f64(Float::abs(*a - *b)))
        .fold(0.0, f64::max);
    TransformReport {
        n_trunc,
        delta_square,
        unitarity,
        block_form,
        spectrum,
        hermiticity,
    }
}

// --------------------------------------------------------------- trajectory

/// Resolution of the brute-force reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Fixed truncation; `None` picks the smallest level count meeting `tail_tol`.
    pub n_trunc: Option<usize>,
    pub n_trunc_cap: usize,
    pub tail_tol: f64,
    /// Projections with more tail mass than this are rejected.
    pub max_tail: f64,
    pub kx_points: usize,
    pub y_points: usize,
    /// Half-width of the k_x and y grids in packet widths.
    pub span: f64,
    pub kz_intervals: usize,
    pub kz_cutoff: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_trunc: None,
            n_trunc_cap: 160,
            tail_tol: 1e-12,
            max_tail: 1e-8,
            kx_points: 801,
            y_points: 1201,
            span: 10.0,
            kz_intervals: 96,
            kz_cutoff: 6.5,
        }
    }
}

/// Packet amplitudes `c_n(k_x)` in spinor component 2 on a uniform k_x grid.
#[derive(Debug, Clone)]
pub struct Projection<T: Scalar> {
    pub kx: Vec<T>,
    pub kx_weights: Vec<T>,
    /// `coeffs[j][n]`, levels `n ≤ n_trunc`.
    pub coeffs: Vec<Vec<T>>,
    pub n_trunc: usize,
    pub tail_mass: T,
}

impl<T: Scalar> Projection<T> {
    /// ρ_{mn} = ∫ c_m(k_x) c_n(k_x) dk_x.
    pub fn density(&self) -> Vec<Vec<T>> {
        let size = self.n_trunc + 1;
        let mut rho = vec![vec![T::zero(); size]; size];
        for (row, &w) in self.coeffs.iter().zip(&self.kx_weights) {
            for m in 0..size {
                let wm = w * row[m];
                for n in 0..size {
                    rho[m][n] = rho[m][n] + wm * row[n];
                }
            }
        }
        rho
    }
}

/// Trapezoid-rule projection of the packet onto `ψ_n(y/L − k_x L)/√L` e^{i k_x x}.
pub fn project_packet<T: Scalar>(
    packet: &GaussianPacket<T>,
    params: &SimParams<T>,
    cfg: &OracleConfig,
) -> Result<Projection<T>> {
    packet.validate()?;
    if packet.component != 2 {
        return Err(ZbError::Domain(
            "oracle expects a packet in spinor component 2".into(),
        ));
    }
    if cfg.kx_points < 3 || cfg.y_points < 3 {
        return Err(ZbError::Domain(
            "oracle grids need at least 3 points".into(),
        ));
    }
    let cap = cfg.n_trunc.unwrap_or(cfg.n_trunc_cap);
    let l = params.magnetic_length();
    let span: T = lit(cfg.span);
    let uniform = |center: T, half: T, count: usize| -> (Vec<T>, T) {
        let h = lit::<T>(2.0) * half / from_usize(count - 1);
        (
            (0..count)
                .map(|k| center - half + h * from_usize(k))
                .collect(),
            h,
        )
    };
    let (kxs, hk) = uniform(packet.k0x, span / packet.d_x, cfg.kx_points);
    let (ys, hy) = uniform(T::zero(), span * packet.d_y, cfg.y_points);
    let fy: Vec<T> = ys.iter().map(|&y| packet.profile_y(y)).collect();
    let inv_sqrt_l = T::one() / l.sqrt();
    let coeffs: Vec<Vec<T>> = kxs
        .par_iter()
        .map(|&kx| {
            let mut acc = vec![T::zero(); cap + 1];
            let mut psi = vec![T::zero(); cap + 1];
            for (&y, &f) in ys.iter().zip(&fy) {
                hermite::functions_into(y / l - kx * l, &mut psi);
                for (a, &p) in acc.iter_mut().zip(&psi) {
                    *a = *a + f * p;
                }
            }
            let gx = packet.g_x(kx);
            acc.iter().map(|&a| a * hy * inv_sqrt_l * gx).collect()
        })
        .collect();
    let weights: Vec<T> = (0..kxs.len()).map(|_| hk).collect();
    let mut occupation = vec![T::zero(); cap + 1];
    for row in &coeffs {
        for (o, &c) in occupation.iter_mut().zip(row) {
            *o = *o + hk * c * c;
        }
    }
    let mut cumulative = T::zero();
    let mut chosen = None;
    for (n, &o) in occupation.iter().enumerate() {
        cumulative = cumulative + o;
        if cfg.n_trunc.is_none() && to_f64(T::one() - cumulative) < cfg.tail_tol {
            chosen = Some((n, T::one() - cumulative));
            break;
        }
    }
    let (n_trunc, tail) = match (cfg.n_trunc, chosen) {
        (Some(n), _) => (n, T::one() - cumulative),
        (None, Some(found)) => found,
        (None, None) => (cap, T::one() - cumulative),
    };
    if to_f64(Float::abs(tail)) > cfg.max_tail {
        return Err(ZbError::Convergence(format!(
            "oracle projection leaves tail mass {tail} above {} at N_trunc = {n_trunc}",
            cfg.max_tail
        )));
    }
    let coeffs = coeffs.into_iter().map(|mut row| {
        row.truncate(n_trunc + 1);
        row
    });
    Ok(Projection {
        kx: kxs,
        kx_weights: weights,
        coeffs: coeffs.collect(),
        n_trunc,
        tail_mass: tail,
    })
}

/// Time-independent pieces of ⟨Â(t)⟩ = Σ_jk M_jk e^{-i(E_j − E_k)t} for one k_z.
struct Kernel<T> {
    energies: Vec<T>,
    /// (j, k, M_jk, interband)
    terms: Vec<(usize, usize, T, bool)>,
}

fn kernel<T: OracleScalar>(rho: &DMatrix<T>, kz: T, weight: T, params: &SimParams<T>) -> Kernel<T> {
    let n_trunc = rho.nrows() - 1;
    let stride = n_trunc + 1;
    let h = build_matrix(T::zero(), kz, n_trunc, params);
    let eig = h.eigen();
    let dim = h.dimension();
    // Packet lives in component 2 (index 1).
    let v2 = eig.vectors.rows(stride, stride).into_owned();
    let rho_t = v2.transpose() * rho * &v2;
    // Â = 1₄ ⊗ â in the eigenbasis.
    let mut lowered = DMatrix::zeros(dim, dim);
    for c in 0..4 {
        for n in 1..stride {
            let s = Float::sqrt(from_usize::<T>(n));
            for k in 0..dim {
                lowered[(c * stride + n - 1, k)] += s * eig.vectors[(c * stride + n, k)];
            }
        }
    }
    let a_t = eig.vectors.transpose() * lowered;
    let mut terms = Vec::new();
    let mut largest = T::zero();
    let mut raw = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        for k in 0..dim {
            let m = weight * rho_t[(j, k)] * a_t[(k, j)];
            largest = Float::max(largest, Float::abs(m));
            raw.push((j, k, m));
        }
    }
    let floor = largest * lit(1e-15);
    for (j, k, m) in raw {
        if Float::abs(m) > floor {
            let inter = (eig.values[j] > T::zero()) != (eig.values[k] > T::zero());
            terms.push((j, k, m, inter));
        }
    }
    Kernel {
        energies: eig.values.iter().copied().collect(),
        terms,
    }
}

/// Reference trajectory from the truncated-matrix evolution.
pub fn oracle_trajectory<T: OracleScalar>(
    packet: &GaussianPacket<T>,
    params: &SimParams<T>,
    grid: &TimeGrid<T>,
    cfg: &OracleConfig,
) -> Result<Trajectory<T>> {
    let projection = project_packet(packet, params, cfg)?;
    let size = projection.n_trunc + 1;
    let rho_rows = projection.density();
    let rho = DMatrix::from_fn(size, size, |r, c| rho_rows[r][c]);
    let kz_points: Vec<(T, T)> = match params.dimensionality {
        Dimensionality::TwoPlusOne => vec![(T::zero(), T::one())],
        Dimensionality::ThreePlusOne => {
            let dz = packet.require_dz()?;
            let (nodes, w) = even_trapezoid(lit::<T>(cfg.kz_cutoff) / dz, cfg.kz_intervals);
            nodes
                .into_iter()
                .zip(w)
                .map(|(k, w)| {
                    let g = g_z(packet, k)?;
                    Ok((k, w * g * g))
                })
                .collect::<Result<_>>()?
        }
    };
    let kernels: Vec<Kernel<T>> = kz_points
        .par_iter()
        .map(|&(kz, w)| kernel(&rho, kz, w, params))
        .collect();
    let l = params.magnetic_length();
    let scale = Float::sqrt(lit::<T>(2.0)) * l;
    let samples: Vec<PositionSample<T>> = (0..grid.count)
        .into_par_iter()
        .map(|step| {
            let t = grid.time(step);
            let zero = Complex::new(T::zero(), T::zero());
            let (mut intra, mut inter) = (zero, zero);
            for kern in &kernels {
                let phases: Vec<Complex<T>> = kern
                    .energies
                    .iter()
                    .map(|&e| {
                        let (s, c) = Float::sin_cos(e * t);
                        Complex::new(c, -s)
                    })
                    .collect();
                for &(j, k, m, is_inter) in &kern.terms {
                    let term = phases[j] * phases[k].conj() * m;
                    if is_inter {
                        inter += term;
                    } else {
                        intra += term;
                    }
                }
            }
            let a = intra + inter;
            // ⟨Â†⟩ = conj⟨Â⟩ for a Hermitian density matrix
            PositionSample {
                x: scale * a.im,
                y: scale * a.re,
                x_inter: scale * inter.im,
                y_inter: scale * inter.re,
                x_intra: scale * intra.im,
                y_intra: scale * intra.re,
                imag_residue: T::zero(),
            }
        })
        .collect();
    let provenance = Provenance {
        params: *params,
        packet: *packet,
        n_max: projection.n_trunc,
        tail_mass: projection.tail_mass,
        kz_nodes: kz_points.len(),
    };
    Ok(Trajectory::from_samples(grid, &samples, provenance))
}
