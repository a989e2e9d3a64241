//! Trapped-ion realisation of the 2+1 and 3+1 Dirac Hamiltonian.
//!
//! Correspondences: `Δ ↔ L/√2`, `c ↔ 2ηΔΩ̃`, `mc² ↔ ħΩ`, giving
//! `κ = (ηΩ̃/Ω)²` and `b = 2ηΩ̃/Ω`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;

use crate::constants::{ATOMIC_MASS_UNIT, ELECTRON_MASS, HBAR};
use crate::error::{Result, ZbError};
use crate::params::{Dimensionality, SimParams};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ion {
    #[default]
    Ca40,
    Mg25,
}

impl Ion {
    /// Singly charged ion mass in kg.
    pub fn mass(self) -> f64 {
        let atomic = match self {
            Ion::Ca40 => 39.962_590_86,
            Ion::Mg25 => 24.985_836_97,
        };
        atomic * ATOMIC_MASS_UNIT - ELECTRON_MASS
    }

    pub fn label(self) -> &'static str {
        match self {
            Ion::Ca40 => "40Ca+",
            Ion::Mg25 => "25Mg+",
        }
    }
}

impl std::str::FromStr for Ion {
    type Err = ZbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ca40" | "40ca+" | "40ca" | "ca" => Ok(Ion::Ca40),
            "mg25" | "25mg+" | "25mg" | "mg" => Ok(Ion::Mg25),
            other => Err(ZbError::Domain(format!("unknown ion `{other}`"))),
        }
    }
}

/// Ground-state spread Δ = √(ħ/2Mν).
pub fn ground_state_spread(mass: f64, trap_freq: f64) -> f64 {
    (HBAR / (2.0 * mass * trap_freq)).sqrt()
}

/// Trap frequency ν = ħ/(2MΔ²).
pub fn trap_frequency(mass: f64, delta: f64) -> f64 {
    HBAR / (2.0 * mass * delta * delta)
}

/// Angular frequencies in rad/s, lengths in m, mass in kg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig {
    pub eta: f64,
    pub omega_carrier: f64,
    pub omega_tilde: f64,
    pub delta: f64,
    pub ion_mass: f64,
    pub trap_freq: f64,
}

impl TrapConfig {
    pub fn from_delta(
        eta: f64,
        omega_carrier: f64,
        omega_tilde: f64,
        delta: f64,
        ion: Ion,
    ) -> Result<Self> {
        let trap = Self {
            eta,
            omega_carrier,
            omega_tilde,
            delta,
            ion_mass: ion.mass(),
            trap_freq: trap_frequency(ion.mass(), delta),
        };
        trap.validate()?;
        Ok(trap)
    }

    pub fn from_trap_freq(
        eta: f64,
        omega_carrier: f64,
        omega_tilde: f64,
        trap_freq: f64,
        ion: Ion,
    ) -> Result<Self> {
        let trap = Self {
            eta,
            omega_carrier,
            omega_tilde,
            delta: ground_state_spread(ion.mass(), trap_freq),
            ion_mass: ion.mass(),
            trap_freq,
        };
        trap.validate()?;
        Ok(trap)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta", self.eta),
            ("omega_carrier", self.omega_carrier),
            ("omega_tilde", self.omega_tilde),
            ("delta", self.delta),
            ("ion_mass", self.ion_mass),
            ("trap_freq", self.trap_freq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ZbError::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let expected = ground_state_spread(self.ion_mass, self.trap_freq);
        if ((self.delta - expected) / expected).abs() > 1e-12 {
            return Err(ZbError::Constraint(format!(
                "delta {} m inconsistent with trap frequency (expected {expected} m)",
                self.delta
            )));
        }
        Ok(())
    }
}

/// κ = (ηΩ̃/Ω)².
pub fn kappa_of(trap: &TrapConfig) -> Result<f64> {
    if !(trap.omega_carrier > 0.0) {
        return Err(ZbError::Domain(
            "carrier Rabi frequency must be positive".into(),
        ));
    }
    let r = trap.eta * trap.omega_tilde / trap.omega_carrier;
    Ok(r * r)
}

/// Simulated Dirac scales of a trap, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedScales {
    /// c ↔ 2ηΔΩ̃ in m/s.
    pub speed_of_light: f64,
    /// mc² ↔ ħΩ in J.
    pub rest_energy: f64,
    /// λ_c = c/Ω in m.
    pub compton_wavelength: f64,
    /// t_c = 1/Ω in s.
    pub compton_time: f64,
    /// L = √2 Δ in m.
    pub magnetic_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracMapping<T: Scalar> {
    pub params: SimParams<T>,
    pub scales: SimulatedScales,
}

pub fn trap_to_dirac<T: Scalar>(trap: &TrapConfig) -> Result<DiracMapping<T>> {
    trap.validate()?;
    kappa_of(trap)?;
    let b = 2.0 * trap.eta * trap.omega_tilde / trap.omega_carrier;
    let c = 2.0 * trap.eta * trap.delta * trap.omega_tilde;
    Ok(DiracMapping {
        params: SimParams::from_b(lit::<T>(b))?,
        scales: SimulatedScales {
            speed_of_light: c,
            rest_energy: HBAR * trap.omega_carrier,
            compton_wavelength: c / trap.omega_carrier,
            compton_time: 1.0 / trap.omega_carrier,
            magnetic_length: SQRT_2 * trap.delta,
        },
    })
}

/// Trap quantities held fixed when solving for the rest.
///
/// Exactly two of `eta`, `omega_tilde`, `omega_carrier` and exactly one of
/// `delta`, `trap_freq` must be given.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrapConstraints {
    pub eta: Option<f64>,
    pub omega_tilde: Option<f64>,
    pub omega_carrier: Option<f64>,
    pub delta: Option<f64>,
    pub trap_freq: Option<f64>,
    pub ion: Ion,
}

pub fn dirac_to_trap<T: Scalar>(
    params: &SimParams<T>,
    fixed: &TrapConstraints,
) -> Result<TrapConfig> {
    let b = crate::scalar::to_f64(params.b());
    let (eta, omega_tilde, omega_carrier) =
        match (fixed.eta, fixed.omega_tilde, fixed.omega_carrier) {
            (Some(e), Some(t), None) => (e, t, 2.0 * e * t / b),
            (Some(e), None, Some(w)) => (e, b * w / (2.0 * e), w),
            (None, Some(t), Some(w)) => (b * w / (2.0 * t), t, w),
            (Some(_), Some(_), Some(_)) => {
                return Err(ZbError::Constraint(
                    "eta, omega_tilde and omega_carrier all fixed: over-determined".into(),
                ))
            }
            _ => {
                return Err(ZbError::Constraint(
                    "fix exactly two of eta, omega_tilde, omega_carrier".into(),
                ))
            }
        };
    match (fixed.delta, fixed.trap_freq) {
        (Some(d), None) => TrapConfig::from_delta(eta, omega_carrier, omega_tilde, d, fixed.ion),
        (None, Some(nu)) => {
            TrapConfig::from_trap_freq(eta, omega_carrier, omega_tilde, nu, fixed.ion)
        }
        (Some(_), Some(_)) => Err(ZbError::Constraint(
            "delta and trap_freq both fixed: over-determined".into(),
        )),
        (None, None) => Err(ZbError::Constraint("fix one of delta, trap_freq".into())),
    }
}

// ------------------------------------------------------------ excitations

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionKind {
    /// σ_x p_q term, built from one JC and one AJC excitation.
    SigmaXMomentum,
    Jc,
    Ajc,
    /// σ_y carrier for the mass term.
    Carrier,
}

impl InteractionKind {
    /// Laser-excitation pairs needed for one such term.
    pub fn laser_pairs(self) -> usize {
        match self {
            InteractionKind::SigmaXMomentum => 2,
            _ => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InteractionKind::SigmaXMomentum => "sigma_x momentum",
            InteractionKind::Jc => "JC",
            InteractionKind::Ajc => "AJC",
            InteractionKind::Carrier => "carrier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelPair {
    Ad,
    Bc,
    Ac,
    Bd,
}

impl fmt::Display for LevelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LevelPair::Ad => "ad",
            LevelPair::Bc => "bc",
            LevelPair::Ac => "ac",
            LevelPair::Bd => "bd",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    pub kind: InteractionKind,
    pub pair: LevelPair,
    /// Simulated Dirac term, e.g. `c p_x` or `mc^2`.
    pub term: &'static str,
    /// Laser phases (φ_r, φ_b, or φ_c) in radians, one per excitation pair.
    pub phases: Vec<f64>,
    pub sign: i8,
}

impl Excitation {
    fn momentum(pair: LevelPair, term: &'static str, sign: i8) -> Self {
        Self {
            kind: InteractionKind::SigmaXMomentum,
            pair,
            term,
            phases: vec![-FRAC_PI_2, FRAC_PI_2],
            sign,
        }
    }

    pub fn laser_pairs(&self) -> usize {
        self.kind.laser_pairs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationPlan {
    pub dimensionality: Dimensionality,
    pub interactions: Vec<Excitation>,
    pub pair_count: usize,
}

pub fn excitation_plan(dimensionality: Dimensionality) -> ExcitationPlan {
    let mut interactions = vec![
        Excitation::momentum(LevelPair::Ad, "c p_x", 1),
        Excitation::momentum(LevelPair::Bc, "c p_x", 1),
        Excitation {
            kind: InteractionKind::Jc,
            pair: LevelPair::Ad,
            term: "-hbar omega a_y",
            phases: vec![PI],
            sign: 1,
        },
        Excitation {
            kind: InteractionKind::Ajc,
            pair: LevelPair::Bc,
            term: "-hbar omega a_y^dagger",
            phases: vec![PI],
            sign: 1,
        },
    ];
    if dimensionality == Dimensionality::ThreePlusOne {
        interactions.push(Excitation::momentum(LevelPair::Ac, "c p_z", 1));
        interactions.push(Excitation::momentum(LevelPair::Bd, "c p_z", -1));
    }
    for pair in [LevelPair::Ac, LevelPair::Bd] {
        interactions.push(Excitation {
            kind: InteractionKind::Carrier,
            pair,
            term: "mc^2",
            phases: vec![-FRAC_PI_2],
            sign: 1,
        });
    }
    let pair_count = interactions.iter().map(Excitation::laser_pairs).sum();
    ExcitationPlan {
        dimensionality,
        interactions,
        pair_count,
    }
}
