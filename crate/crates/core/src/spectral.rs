//! Frequency content of trajectories and assignment of lines to transitions.
//!
//! Frequencies are angular, in units of 1/t_c, so they compare directly with
//! energy differences in units of mc².

use std::fmt;

use num_traits::Float;
use rustfft::{num_complex::Complex, FftNum, FftPlanner};

use crate::dynamics::Trajectory;
use crate::error::{Result, ZbError};
use crate::landau::{transition_frequency, Sign};
use crate::params::SimParams;
use crate::scalar::{from_usize, lit, to_f64, Scalar};

pub const MIN_SAMPLES: usize = 256;
pub const ZERO_PADDING: usize = 4;
pub const DEFAULT_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    fn weight<T: Scalar>(self, k: usize, len: usize) -> T {
        match self {
            Window::Rectangular => T::one(),
            Window::Hann => {
                let phase = lit::<T>(2.0) * T::PI() * from_usize(k) / from_usize(len - 1);
                lit::<T>(0.5) * (T::one() - phase.cos())
            }
        }
    }
}

impl std::str::FromStr for Window {
    type Err = ZbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hann" => Ok(Window::Hann),
            "rectangular" | "none" => Ok(Window::Rectangular),
            other => Err(ZbError::Domain(format!("unknown window `{other}`"))),
        }
    }
}

/// Which part of the trajectory to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Part {
    #[default]
    Total,
    Interband,
    Intraband,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakLabel {
    /// n → n+1 within one energy branch.
    Intraband(usize),
    /// n ↔ n+1 across branches.
    Interband(usize),
    Dc,
    Unassigned,
}

impl fmt::Display for PeakLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeakLabel::Intraband(n) => write!(f, "intraband({n}->{})", n + 1),
            PeakLabel::Interband(n) => write!(f, "interband({n}<->{})", n + 1),
            PeakLabel::Dc => f.write_str("dc"),
            PeakLabel::Unassigned => f.write_str("unassigned"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T: Scalar> {
    pub freq: T,
    /// Refined peak power of `P_x + P_y`.
    pub power: T,
    pub power_x: T,
    pub power_y: T,
    pub label: PeakLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport<T: Scalar> {
    pub freqs: Vec<T>,
    pub power_x: Vec<T>,
    pub power_y: Vec<T>,
    /// Peaks in descending power.
    pub peaks: Vec<Peak<T>>,
    /// Resolution 2π/T of the unpadded record.
    pub bin_width: T,
    pub window: Window,
}

impl<T: Scalar> SpectrumReport<T> {
    pub fn strongest(&self, pred: impl Fn(&PeakLabel) -> bool) -> Option<&Peak<T>> {
        self.peaks.iter().find(|p| pred(&p.label))
    }
}

/// Spectrum of one part of a trajectory.
pub fn spectrum<T: Scalar + FftNum>(
    traj: &Trajectory<T>,
    window: Window,
    part: Part,
) -> Result<SpectrumReport<T>> {
    let (x, y) = match part {
        Part::Total => (&traj.x, &traj.y),
        Part::Interband => (&traj.x_inter, &traj.y_inter),
        Part::Intraband => (&traj.x_intra, &traj.y_intra),
    };
    spectrum_of(&traj.times, x, y, window)
}

/// Spectrum of two sampled signals on a shared uniform grid.
///
/// A unit-amplitude cosine yields peak power 1; a constant `c` yields `c²` at zero frequency.
pub fn spectrum_of<T: Scalar + FftNum>(
    times: &[T],
    x: &[T],
    y: &[T],
    window: Window,
) -> Result<SpectrumReport<T>> {
    let len = times.len();
    if len < MIN_SAMPLES {
        return Err(ZbError::Domain(format!(
            "spectrum needs at least {MIN_SAMPLES} samples, got {len}"
        )));
    }
    if x.len() != len || y.len() != len {
        return Err(ZbError::Domain(
            "signal and time grid lengths differ".into(),
        ));
    }
    let dt = (times[len - 1] - times[0]) / from_usize(len - 1);
    if !(dt > T::zero()) {
        return Err(ZbError::Domain("time grid must increase".into()));
    }
    let tol = dt * lit(1e-6);
    for (k, &t) in times.iter().enumerate() {
        if Float::abs(t - (times[0] + dt * from_usize(k))) > tol {
            return Err(ZbError::Domain(format!(
                "time grid is not uniform at sample {k}"
            )));
        }
    }
    let weights: Vec<T> = (0..len).map(|k| window.weight(k, len)).collect();
    let weight_sum: T = weights.iter().copied().sum();
    let padded = ZERO_PADDING * len;
    let fft = FftPlanner::new().plan_fft_forward(padded);
    // The weighted mean is removed first and reported as the zero-frequency
    // power; otherwise its main lobe, doubled on the one-sided axis, would
    // outweigh the DC bin itself.
    let power_of = |signal: &[T]| -> Vec<T> {
        let mean = signal.iter().zip(&weights).map(|(&s, &w)| s * w).sum::<T>() / weight_sum;
        let mut buf: Vec<Complex<T>> = signal
            .iter()
            .zip(&weights)
            .map(|(&s, &w)| Complex::new((s - mean) * w, T::zero()))
            .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
            .take(padded)
            .collect();
        fft.process(&mut buf);
        buf[..=padded / 2]
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let amp = if k == 0 {
                    mean
                } else {
                    c.norm() * lit(2.0) / weight_sum
                };
                amp * amp
            })
            .collect()
    };
    let power_x = power_of(x);
    let power_y = power_of(y);
    let df = lit::<T>(2.0) * T::PI() / (dt * from_usize(padded));
    let freqs: Vec<T> = (0..power_x.len()).map(|k| df * from_usize(k)).collect();
    let bin_width = df * from_usize(ZERO_PADDING);
    let peaks = find_peaks(&freqs, &power_x, &power_y, df);
    Ok(SpectrumReport {
        freqs,
        power_x,
        power_y,
        peaks,
        bin_width,
        window,
    })
}

fn find_peaks<T: Scalar>(freqs: &[T], px: &[T], py: &[T], df: T) -> Vec<Peak<T>> {
    let total: Vec<T> = px.iter().zip(py).map(|(&a, &b)| a + b).collect();
    let max = total.iter().copied().fold(T::zero(), T::max);
    if !(max > T::zero()) {
        return Vec::new();
    }
    // ignore round-off ripples far below anything reportable
    let floor = max * lit(1e-9);
    let last = total.len() - 1;
    let mut peaks = Vec::new();
    for k in 0..=last {
        let p0 = total[k];
        let left = if k == 0 {
            T::neg_infinity()
        } else {
            total[k - 1]
        };
        let right = if k == last {
            T::neg_infinity()
        } else {
            total[k + 1]
        };
        if !(p0 > left && p0 >= right && p0 > floor) {
            continue;
        }
        let (shift, power) = if k == 0 || k == last {
            (T::zero(), p0)
        } else {
            let (a, c) = (total[k - 1], total[k + 1]);
            let denom = a - lit::<T>(2.0) * p0 + c;
            if denom < T::zero() {
                let d = lit::<T>(0.5) * (a - c) / denom;
                (d, p0 - lit::<T>(0.25) * (a - c) * d)
            } else {
                (T::zero(), p0)
            }
        };
        peaks.push(Peak {
            freq: freqs[k] + shift * df,
            power,
            power_x: px[k],
            power_y: py[k],
            label: PeakLabel::Unassigned,
        });
    }
    peaks.sort_by(|a, b| {
        b.power
            .partial_cmp(&a.power)
            .unwrap()
            .then(a.freq.partial_cmp(&b.freq).unwrap())
    });
    peaks
}

/// Candidate line of the selection rule n′ = n ± 1 at k_z = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line<T: Scalar> {
    pub freq: T,
    pub label: PeakLabel,
}

/// All intraband and interband lines between consecutive occupied levels.
pub fn allowed_lines<T: Scalar>(params: &SimParams<T>, occupied: &[usize]) -> Vec<Line<T>> {
    let mut lines = Vec::new();
    for &n in occupied {
        if !occupied.contains(&(n + 1)) {
            continue;
        }
        for (eps_prime, label) in [
            (Sign::Minus, PeakLabel::Intraband(n)),
            (Sign::Plus, PeakLabel::Interband(n)),
        ] {
            let (freq, _) =
                transition_frequency(n, n + 1, Sign::Minus, eps_prime, T::zero(), params)
                    .expect("|Δn| = 1 by construction");
            lines.push(Line { freq, label });
        }
    }
    lines
}

/// Labels each peak with the nearest allowed line within one bin.
pub fn classify_peaks<T: Scalar>(
    mut report: SpectrumReport<T>,
    params: &SimParams<T>,
    occupied: &[usize],
) -> SpectrumReport<T> {
    let lines = allowed_lines(params, occupied);
    let tol = report.bin_width;
    for peak in &mut report.peaks {
        if peak.freq < tol {
            peak.label = PeakLabel::Dc;
            continue;
        }
        peak.label = lines
            .iter()
            .map(|l| (Float::abs(l.freq - peak.freq), l.label))
            .filter(|(d, _)| *d <= tol)
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map_or(PeakLabel::Unassigned, |(_, label)| label);
    }
    report
}

/// Number of peaks with at least `rel_threshold` of the strongest peak's power.
pub fn richness<T: Scalar>(report: &SpectrumReport<T>, rel_threshold: f64) -> usize {
    let Some(max) = report.peaks.first().map(|p| p.power) else {
        return 0;
    };
    let cut = max * lit(rel_threshold);
    report.peaks.iter().filter(|p| p.power >= cut).count()
}

/// Significant peaks carrying a given kind of label.
pub fn count_labelled<T: Scalar>(
    report: &SpectrumReport<T>,
    rel_threshold: f64,
    pred: impl Fn(&PeakLabel) -> bool,
) -> usize {
    let Some(max) = report.peaks.first().map(|p| p.power) else {
        return 0;
    };
    let cut = max * lit(rel_threshold);
    report
        .peaks
        .iter()
        .filter(|p| p.power >= cut && pred(&p.label))
        .count()
}

/// Frequency of the strongest non-DC peak, if any.
pub fn dominant_frequency<T: Scalar>(report: &SpectrumReport<T>) -> Option<f64> {
    report
        .peaks
        .iter()
        .find(|p| p.freq >= report.bin_width)
        .map(|p| to_f64(p.freq))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn single_cosine_gives_single_peak() {
        let t = grid(4096, 0.25);
        let x: Vec<f64> = t.iter().map(|&t| (0.4142 * t).cos()).collect();
        let zero = vec![0.0; t.len()];
        let r = spectrum_of(&t, &x, &zero, Window::Hann).unwrap();
        assert!((r.peaks[0].freq - 0.4142).abs() < r.bin_width);
        assert!((r.peaks[0].power - 1.0).abs() < 0.02);
        assert_eq!(richness(&r, DEFAULT_THRESHOLD), 1);
    }

    #[test]
    fn constant_gives_dc_only() {
        let t = grid(512, 0.1);
        let x = vec![2.0; 512];
        let r = spectrum_of(&t, &x, &x, Window::Hann).unwrap();
        let r = classify_peaks(r, &SimParams::from_b(1.0).unwrap(), &[0, 1]);
        assert_eq!(richness(&r, DEFAULT_THRESHOLD), 1);
        assert_eq!(r.peaks[0].label, PeakLabel::Dc);
        assert!((r.peaks[0].power - 8.0).abs() < 1e-9, "{:?}", r.peaks[0]);
    }

    #[test]
    fn zero_signal_has_no_peaks() {
        let t = grid(300, 1.0);
        let z = vec![0.0; 300];
        let r = spectrum_of(&t, &z, &z, Window::Hann).unwrap();
        assert_eq!(richness(&r, DEFAULT_THRESHOLD), 0);
        assert!(dominant_frequency(&r).is_none());
    }

    #[test]
    fn rejects_short_and_irregular_grids() {
        let t = grid(100, 1.0);
        let z = vec![0.0; 100];
        assert!(spectrum_of(&t, &z, &z, Window::Hann).is_err());
        let mut t = grid(300, 1.0);
        t[150] += 0.3;
        let z = vec![0.0; 300];
        assert!(spectrum_of(&t, &z, &z, Window::Hann).is_err());
    }

    #[test]
    fn labels_follow_selection_rules() {
        let params = SimParams::from_b(1.0).unwrap();
        let s2 = 2f64.sqrt();
        let t = grid(8192, 0.1);
        let x: Vec<f64> = t
            .iter()
            .map(|&t| ((s2 + 1.0) * t).cos() + 0.5 * ((s2 - 1.0) * t).sin() + 0.2 * (3.1 * t).cos())
            .collect();
        let r = spectrum_of(&t, &x, &vec![0.0; t.len()], Window::Hann).unwrap();
        let r = classify_peaks(r, &params, &[0, 1]);
        assert_eq!(richness(&r, DEFAULT_THRESHOLD), 3);
        let label_near = |f: f64| {
            r.peaks
                .iter()
                .find(|p| (p.freq - f).abs() < 0.01)
                .unwrap()
                .label
        };
        assert_eq!(label_near(s2 + 1.0), PeakLabel::Interband(0));
        assert_eq!(label_near(s2 - 1.0), PeakLabel::Intraband(0));
        assert_eq!(label_near(3.1), PeakLabel::Unassigned);
        assert_eq!(PeakLabel::Interband(0).to_string(), "interband(0<->1)");
    }

    #[test]
    fn rectangular_window_is_selectable() {
        assert_eq!("hann".parse::<Window>().unwrap(), Window::Hann);
        assert_eq!(
            "rectangular".parse::<Window>().unwrap(),
            Window::Rectangular
        );
        assert!("kaiser".parse::<Window>().is_err());
        let t = grid(1024, 0.5);
        let x: Vec<f64> = t.iter().map(|&t| (0.9 * t).cos()).collect();
        let r = spectrum_of(&t, &x, &x, Window::Rectangular).unwrap();
        assert!((r.peaks[0].freq - 0.9).abs() < r.bin_width);
    }

    #[test]
    fn f32_spectrum() {
        let t: Vec<f32> = (0..512).map(|k| k as f32 * 0.2).collect();
        let x: Vec<f32> = t.iter().map(|&t| (1.3 * t).cos()).collect();
        let r = spectrum_of(&t, &x, &x, Window::Hann).unwrap();
        assert!((r.peaks[0].freq - 1.3).abs() < r.bin_width);
    }
}
