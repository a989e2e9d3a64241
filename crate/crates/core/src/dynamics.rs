//! Closed-form time dependence of the packet position.
//!
//! With the packet in spinor component 2 only s = −1 states are populated,
//! and the Heisenberg-picture lowering operator averages to
//!
//! ```text
//! ⟨Â(t)⟩ = ½ Σ_n √(n+1) U_{n,n+1} ( I⁺_c + I⁻_c − i I⁺_s + i I⁻_s )
//! I^±_c = ∫ |g_z|² (1 ± E_n/E_{n+1}) cos[(E_{n+1} ∓ E_n) t] dk_z
//! I^±_s = ∫ |g_z|² (1/E_n ± 1/E_{n+1}) sin[(E_{n+1} ∓ E_n) t] dk_z
//! ```
//!
//! (natural units, mc² = ħ = c = 1). The I⁺ terms oscillate at the
//! intraband (cyclotron) frequencies, the I⁻ terms at the interband
//! (Zitterbewegung) ones. The sign of the sine terms follows from
//! e^{-iHt} evolution; the matrix oracle in [`crate::oracle`] checks it.
//!
//! Positions are the ladder-operator combinations
//! `Y = L(⟨Â⟩ + ⟨Â†⟩)/√2` and `X = L(⟨Â⟩ − ⟨Â†⟩)/(i√2)`, i.e. the packet
//! coordinate relative to the guiding centre of each k_x component.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Result, ZbError};
use crate::landau::energy;
use crate::params::{Dimensionality, SimParams};
use crate::scalar::{from_usize, lit, to_f64, Scalar};
use crate::wavepacket::{DecompositionConfig, GaussianPacket, KzProfile, PacketDecomposition};

/// The four k_z integrals of one level pair (n, n+1) at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeIntegrals<T: Scalar> {
    pub ic_plus: T,
    pub ic_minus: T,
    pub is_plus: T,
    pub is_minus: T,
}

pub fn time_integrals<T: Scalar>(
    n: usize,
    t: T,
    decomp: &PacketDecomposition<T>,
) -> TimeIntegrals<T> {
    let params = decomp.params();
    let mut out = TimeIntegrals::default();
    for (kz, w) in decomp.kz_profile().points() {
        let line = LinePair::new(n, kz, params);
        let (s_minus, c_minus) = (line.omega_intra * t).sin_cos();
        let (s_plus, c_plus) = (line.omega_inter * t).sin_cos();
        out.ic_plus = out.ic_plus + w * line.cos_intra * c_minus;
        out.ic_minus = out.ic_minus + w * line.cos_inter * c_plus;
        out.is_plus = out.is_plus + w * line.sin_intra * s_minus;
        out.is_minus = out.is_minus + w * line.sin_inter * s_plus;
    }
    out
}

/// Amplitudes and frequencies of the n → n+1 lines at one k_z.
#[derive(Debug, Clone, Copy)]
struct LinePair<T> {
    omega_intra: T,
    omega_inter: T,
    cos_intra: T,
    cos_inter: T,
    sin_intra: T,
    sin_inter: T,
}

impl<T: Scalar> LinePair<T> {
    fn new(n: usize, kz: T, params: &SimParams<T>) -> Self {
        let e = energy(n, kz, params);
        let e1 = energy(n + 1, kz, params);
        let one = T::one();
        let b2 = params.b() * params.b();
        let ratio = e / e1;
        // E_{n+1} − E_n without cancellation
        let omega_intra = b2 / (e + e1);
        Self {
            omega_intra,
            omega_inter: e + e1,
            cos_intra: one + ratio,
            // 1 − E_n/E_{n+1} = (E_{n+1} − E_n)/E_{n+1}
            cos_inter: omega_intra / e1,
            sin_intra: one / e + one / e1,
            sin_inter: omega_intra / (e * e1),
        }
    }
}

/// ⟨Â(t)⟩ and ⟨Â†(t)⟩ split into intraband and interband parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderExpectation<T: Scalar> {
    pub a_intra: Complex<T>,
    pub a_inter: Complex<T>,
    pub adag_intra: Complex<T>,
    pub adag_inter: Complex<T>,
}

impl<T: Scalar> LadderExpectation<T> {
    pub fn a(&self) -> Complex<T> {
        self.a_intra + self.a_inter
    }

    pub fn adag(&self) -> Complex<T> {
        self.adag_intra + self.adag_inter
    }
}

/// Position sample (X, Y) plus the imaginary residue of the operator sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSample<T: Scalar> {
    pub x: T,
    pub y: T,
    pub x_inter: T,
    pub y_inter: T,
    pub x_intra: T,
    pub y_intra: T,
    pub imag_residue: T,
}

/// Precomputed per-(n, k_z) amplitudes; evaluating a time is then a fixed-order sum.
#[derive(Debug, Clone)]
pub struct Engine<T: Scalar> {
    magnetic_length: T,
    /// (ω_intra, ω_inter, c_intra, c_inter, s_intra, s_inter) with U, √(n+1)/2 and the k_z weight folded in.
    lines: Vec<[T; 6]>,
    mode: Dimensionality,
}

impl<T: Scalar> Engine<T> {
    pub fn new(decomp: &PacketDecomposition<T>) -> Self {
        let params = decomp.params();
        let half: T = lit(0.5);
        let points = decomp.kz_profile().points();
        let mut lines = Vec::with_capacity(decomp.upper_band().len() * points.len());
        for (n, &u) in decomp.upper_band().iter().enumerate() {
            let amp = half * from_usize::<T>(n + 1).sqrt() * u;
            for &(kz, w) in &points {
                let l = LinePair::new(n, kz, params);
                let a = amp * w;
                lines.push([
                    l.omega_intra,
                    l.omega_inter,
                    a * l.cos_intra,
                    a * l.cos_inter,
                    a * l.sin_intra,
                    a * l.sin_inter,
                ]);
            }
        }
        Self {
            magnetic_length: params.magnetic_length(),
            lines,
            mode: params.dimensionality,
        }
    }

    pub fn mode(&self) -> Dimensionality {
        self.mode
    }

    /// ⟨Â(t)⟩, ⟨Â†(t)⟩ from the closed-form sums.
    pub fn ladder(&self, t: T) -> LadderExpectation<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let (mut a_intra, mut a_inter, mut d_intra, mut d_inter) = (zero, zero, zero, zero);
        for &[w_intra, w_inter, c_intra, c_inter, s_intra, s_inter] in &self.lines {
            let (sm, cm) = (w_intra * t).sin_cos();
            let (sp, cp) = (w_inter * t).sin_cos();
            // U_{n,n+1} = U_{n+1,n} for the real coefficients of this packet family
            a_intra = a_intra + Complex::new(c_intra * cm, -s_intra * sm);
            a_inter = a_inter + Complex::new(c_inter * cp, s_inter * sp);
            d_intra = d_intra + Complex::new(c_intra * cm, s_intra * sm);
            d_inter = d_inter + Complex::new(c_inter * cp, -s_inter * sp);
        }
        LadderExpectation {
            a_intra,
            a_inter,
            adag_intra: d_intra,
            adag_inter: d_inter,
        }
    }

    pub fn position(&self, t: T) -> PositionSample<T> {
        self.to_position(&self.ladder(t))
    }

    fn to_position(&self, ladder: &LadderExpectation<T>) -> PositionSample<T> {
        let scale = self.magnetic_length / T::SQRT_2();
        let i = Complex::new(T::zero(), T::one());
        let y_of = |a: Complex<T>, d: Complex<T>| (a + d) * scale;
        let x_of = |a: Complex<T>, d: Complex<T>| (a - d) * scale / i;
        let y = y_of(ladder.a(), ladder.adag());
        let x = x_of(ladder.a(), ladder.adag());
        PositionSample {
            x: x.re,
            y: y.re,
            x_inter: x_of(ladder.a_inter, ladder.adag_inter).re,
            y_inter: y_of(ladder.a_inter, ladder.adag_inter).re,
            x_intra: x_of(ladder.a_intra, ladder.adag_intra).re,
            y_intra: y_of(ladder.a_intra, ladder.adag_intra).re,
            imag_residue: x.im.abs().max(y.im.abs()),
        }
    }

    /// Samples on a uniform grid.
    ///
    /// The grid is cut into fixed blocks of [`CHUNK`] samples; each block
    /// starts from exact phases and advances them by complex rotation, so
    /// the result does not depend on the number of threads.
    pub fn trajectory(&self, grid: &TimeGrid<T>) -> Vec<PositionSample<T>> {
        let steps: Vec<(Complex<T>, Complex<T>)> = self
            .lines
            .iter()
            .map(|l| (phasor(l[0] * grid.step), phasor(l[1] * grid.step)))
            .collect();
        let chunks: Vec<usize> = (0..grid.count).step_by(CHUNK).collect();
        chunks
            .into_par_iter()
            .flat_map_iter(|first| {
                let len = CHUNK.min(grid.count - first);
                let ladders = self.ladder_block(grid.time(first), &steps, len);
                ladders.into_iter().map(|l| self.to_position(&l))
            })
            .collect()
    }

    fn ladder_block(
        &self,
        t0: T,
        steps: &[(Complex<T>, Complex<T>)],
        len: usize,
    ) -> Vec<LadderExpectation<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut acc = vec![[zero; 4]; len];
        for (line, &(step_intra, step_inter)) in self.lines.iter().zip(steps) {
            let [w_intra, w_inter, c_intra, c_inter, s_intra, s_inter] = *line;
            let mut p_intra = phasor(w_intra * t0);
            let mut p_inter = phasor(w_inter * t0);
            for slot in acc.iter_mut() {
                let (cm, sm) = (p_intra.re, p_intra.im);
                let (cp, sp) = (p_inter.re, p_inter.im);
                slot[0] = slot[0] + Complex::new(c_intra * cm, -s_intra * sm);
                slot[1] = slot[1] + Complex::new(c_inter * cp, s_inter * sp);
                slot[2] = slot[2] + Complex::new(c_intra * cm, s_intra * sm);
                slot[3] = slot[3] + Complex::new(c_inter * cp, -s_inter * sp);
                p_intra = p_intra * step_intra;
                p_inter = p_inter * step_inter;
            }
        }
        acc.into_iter()
            .map(
                |[a_intra, a_inter, adag_intra, adag_inter]| LadderExpectation {
                    a_intra,
                    a_inter,
                    adag_intra,
                    adag_inter,
                },
            )
            .collect()
    }
}

/// Samples per block of the phase recurrence in [`Engine::trajectory`].
pub const CHUNK: usize = 64;

fn phasor<T: Scalar>(angle: T) -> Complex<T> {
    let (s, c) = angle.sin_cos();
    Complex::new(c, s)
}

/// Uniform time grid `start + k·step`, `k < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T: Scalar> {
    pub start: T,
    pub step: T,
    pub count: usize,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(start: T, step: T, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(ZbError::Domain("time grid must be non-empty".into()));
        }
        if count > 1 && !(step > T::zero()) {
            return Err(ZbError::Domain("time step must be positive".into()));
        }
        Ok(Self { start, step, count })
    }

    /// `count` samples covering `[0, end]` inclusive.
    pub fn span(end: T, count: usize) -> Result<Self> {
        if count < 2 {
            return Self::new(T::zero(), T::one(), count);
        }
        Self::new(T::zero(), end / from_usize(count - 1), count)
    }

    pub fn time(&self, k: usize) -> T {
        self.start + self.step * from_usize(k)
    }

    pub fn end(&self) -> T {
        self.time(self.count - 1)
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.count).map(|k| self.time(k)).collect()
    }

    /// Every other node of a grid twice as dense, sharing all points with `self`.
    pub fn refined(&self) -> Self {
        Self {
            start: self.start,
            step: self.step / lit(2.0),
            count: 2 * self.count - 1,
        }
    }
}

/// Parameters and packet that produced a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance<T: Scalar> {
    pub params: SimParams<T>,
    pub packet: GaussianPacket<T>,
    pub n_max: usize,
    pub tail_mass: T,
    pub kz_nodes: usize,
}

/// Sampled ⟨X(t)⟩, ⟨Y(t)⟩ in λ_c, with the interband/intraband split.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub times: Vec<T>,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub x_inter: Vec<T>,
    pub y_inter: Vec<T>,
    pub x_intra: Vec<T>,
    pub y_intra: Vec<T>,
    pub mode: Dimensionality,
    pub provenance: Provenance<T>,
    pub max_imag_residue: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn from_samples(
        grid: &TimeGrid<T>,
        samples: &[PositionSample<T>],
        provenance: Provenance<T>,
    ) -> Self {
        let pick = |f: fn(&PositionSample<T>) -> T| samples.iter().map(f).collect::<Vec<_>>();
        Self {
            times: grid.times(),
            x: pick(|s| s.x),
            y: pick(|s| s.y),
            x_inter: pick(|s| s.x_inter),
            y_inter: pick(|s| s.y_inter),
            x_intra: pick(|s| s.x_intra),
            y_intra: pick(|s| s.y_intra),
            mode: provenance.params.dimensionality,
            max_imag_residue: samples
                .iter()
                .map(|s| s.imag_residue)
                .fold(T::zero(), T::max),
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn magnetic_length(&self) -> T {
        self.provenance.params.magnetic_length()
    }

    /// |r_inter(t)|: modulus of the interband-only displacement.
    pub fn interband_envelope(&self) -> Vec<T> {
        self.x_inter
            .iter()
            .zip(&self.y_inter)
            .map(|(&x, &y)| x.hypot(y))
            .collect()
    }

    /// Largest |X − X′|, |Y − Y′| against another trajectory on the same grid.
    pub fn max_deviation(&self, other: &Trajectory<T>) -> Result<T> {
        if self.len() != other.len() {
            return Err(ZbError::Domain(
                "trajectories sampled on different grids".into(),
            ));
        }
        let dx = self.x.iter().zip(&other.x).map(|(&a, &b)| (a - b).abs());
        let dy = self.y.iter().zip(&other.y).map(|(&a, &b)| (a - b).abs());
        Ok(dx.chain(dy).fold(T::zero(), T::max))
    }
}

/// Packet decomposition plus k_z grid self-check.
///
/// In 3+1 mode the k_z grid is doubled until the ladder expectations at
/// late sample times move by less than `kz_tol · L`.
pub fn decompose(
    packet: &GaussianPacket<f64>,
    params: &SimParams<f64>,
    cfg: &DecompositionConfig,
    t_max: f64,
    kz_tol: f64,
    max_kz_intervals: usize,
) -> Result<PacketDecomposition<f64>> {
    decompose_generic(packet, params, cfg, t_max, kz_tol, max_kz_intervals)
}

pub fn decompose_generic<T: Scalar>(
    packet: &GaussianPacket<T>,
    params: &SimParams<T>,
    cfg: &DecompositionConfig,
    t_max: T,
    kz_tol: f64,
    max_kz_intervals: usize,
) -> Result<PacketDecomposition<T>> {
    let decomp = PacketDecomposition::build(packet, params, cfg)?;
    if params.dimensionality == Dimensionality::TwoPlusOne {
        return Ok(decomp);
    }
    let probes: Vec<T> = (0..8)
        .map(|k| t_max * (lit::<T>(0.5) + lit::<T>(k as f64) / lit(14.0)))
        .collect();
    let evaluate = |d: &PacketDecomposition<T>| -> Vec<Complex<T>> {
        let engine = Engine::new(d);
        probes.iter().map(|&t| engine.ladder(t).a()).collect()
    };
    let mut intervals = cfg.kz_intervals;
    let mut current = decomp;
    let mut values = evaluate(&current);
    loop {
        let next_cfg = DecompositionConfig {
            kz_intervals: 2 * intervals,
            ..cfg.clone()
        };
        let profile = KzProfile::build(packet, params.dimensionality, &next_cfg)?;
        let candidate = current.clone().with_kz_profile(profile);
        let next_values = evaluate(&candidate);
        // |ΔA|·√2 bounds the position change in units of L
        let change = values
            .iter()
            .zip(&next_values)
            .map(|(a, b)| to_f64((*a - *b).norm()) * std::f64::consts::SQRT_2)
            .fold(0.0, f64::max);
        if change < kz_tol {
            // keep the coarser grid: it already meets the tolerance
            return Ok(current);
        }
        intervals *= 2;
        current = candidate;
        values = next_values;
        if intervals > max_kz_intervals {
            return Err(ZbError::Convergence(format!(
                "k_z grid not converged at {intervals} intervals (last change {change:.3e} L)"
            )));
        }
    }
}

/// Full analytic trajectory for a packet: decomposition, k_z check, time sweep.
pub fn trajectory<T: Scalar>(
    packet: &GaussianPacket<T>,
    params: &SimParams<T>,
    grid: &TimeGrid<T>,
    cfg: &DecompositionConfig,
) -> Result<Trajectory<T>> {
    let decomp = decompose_generic(packet, params, cfg, grid.end(), 1e-9, 1 << 16)?;
    Ok(trajectory_from(&decomp, grid))
}

pub fn trajectory_from<T: Scalar>(
    decomp: &PacketDecomposition<T>,
    grid: &TimeGrid<T>,
) -> Trajectory<T> {
    let engine = Engine::new(decomp);
    let samples = engine.trajectory(grid);
    Trajectory::from_samples(grid, &samples, provenance_of(decomp))
}

pub fn provenance_of<T: Scalar>(decomp: &PacketDecomposition<T>) -> Provenance<T> {
    Provenance {
        params: *decomp.params(),
        packet: *decomp.packet(),
        n_max: decomp.n_max(),
        tail_mass: decomp.tail_mass(),
        kz_nodes: decomp.kz_profile().len(),
    }
}

/// Non-relativistic reference: ω_c = (E₁ − E₀)/ħ at k_z = 0 and r = k0x L².
pub fn cyclotron_reference<T: Scalar>(packet: &GaussianPacket<T>, params: &SimParams<T>) -> (T, T) {
    let e0 = energy(0, T::zero(), params);
    let e1 = energy(1, T::zero(), params);
    let b2 = params.b() * params.b();
    let l = params.magnetic_length();
    (b2 / (e0 + e1), packet.k0x * l * l)
}

/// Late-window to early-window ratio of the interband envelope maximum.
///
/// Windows are given in multiples of `period`: `[early.0, early.1)` and
/// `[late.0, late.1]`.
pub fn envelope_ratio<T: Scalar>(
    traj: &Trajectory<T>,
    period: T,
    early: (f64, f64),
    late: (f64, f64),
) -> Result<T> {
    let env = traj.interband_envelope();
    let window_max = |lo: f64, hi: f64, inclusive: bool| -> Option<T> {
        let (lo, hi) = (period * lit(lo), period * lit(hi));
        traj.times
            .iter()
            .zip(&env)
            .filter(|(&t, _)| t >= lo && (t < hi || (inclusive && t <= hi)))
            .map(|(_, &e)| e)
            .reduce(T::max)
    };
    let early_max = window_max(early.0, early.1, false)
        .ok_or_else(|| ZbError::Domain("early window holds no samples".into()))?;
    let late_max = window_max(late.0, late.1, true)
        .ok_or_else(|| ZbError::Domain("late window holds no samples".into()))?;
    if !(early_max > T::zero()) {
        return Err(ZbError::Domain(
            "interband envelope vanishes in the early window".into(),
        ));
    }
    Ok(late_max / early_max)
}
