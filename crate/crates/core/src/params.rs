//! Units and the derived magnetic-field quantities.
//!
//! Internally everything is in natural units: mc² = 1, c = 1, ħ = 1, so
//! lengths are measured in reduced Compton wavelengths λ_c = ħ/mc and times
//! in t_c = ħ/mc². The field enters through a single dimensionless number
//!
//! ```text
//! b = ħω / mc²,   ω = √2 c / L,   L = √(ħ / eB)
//! ```
//!
//! from which the magnetic length (L = √2 / b in λ_c) and the cyclotron to
//! gap ratio κ = ħω_c / 2mc² = b² / 4 follow.

use crate::constants::{self, ParticleConstants};
use crate::error::{Result, ZbError};
use crate::scalar::{lit, Scalar};

/// Spatial dimensionality of the simulated Dirac equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Dimensionality {
    /// Motion confined to the plane: |g_z(k_z)|² = δ(k_z).
    #[default]
    TwoPlusOne,
    /// Full 3+1 problem with a Gaussian k_z distribution.
    ThreePlusOne,
}

impl Dimensionality {
    pub fn label(self) -> &'static str {
        match self {
            Dimensionality::TwoPlusOne => "2+1",
            Dimensionality::ThreePlusOne => "3+1",
        }
    }
}

impl std::str::FromStr for Dimensionality {
    type Err = ZbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2+1" | "2d" | "two-plus-one" => Ok(Dimensionality::TwoPlusOne),
            "3+1" | "3d" | "three-plus-one" => Ok(Dimensionality::ThreePlusOne),
            other => Err(ZbError::Domain(format!("unknown dimensionality `{other}`"))),
        }
    }
}

/// SI scale factors attached when parameters were built from a physical field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiScale {
    /// Magnetic flux density [T].
    pub field_tesla: f64,
    /// Magnetic length L [m].
    pub magnetic_length_m: f64,
    /// λ_c [m].
    pub compton_wavelength_m: f64,
    /// t_c [s].
    pub compton_time_s: f64,
    /// mc² [J].
    pub rest_energy_j: f64,
}

impl SiScale {
    /// ħω_c = ħeB/m in joules.
    pub fn cyclotron_energy_j(&self) -> f64 {
        self.rest_energy_j * (self.compton_wavelength_m / self.magnetic_length_m).powi(2)
    }
}

/// Parameters of the Dirac-in-a-field problem in natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams<T: Scalar> {
    field_ratio_b: T,
    magnetic_length: T,
    kappa: T,
    pub dimensionality: Dimensionality,
    pub si: Option<SiScale>,
}

impl<T: Scalar> SimParams<T> {
    /// Natural-unit entry point: `b = ħω/mc²`.
    pub fn from_b(b: T) -> Result<Self> {
        if !(b > T::zero()) || !b.is_finite() {
            return Err(ZbError::Domain(format!(
                "field ratio b must be positive, got {b}"
            )));
        }
        Ok(Self {
            field_ratio_b: b,
            magnetic_length: T::SQRT_2() / b,
            kappa: b * b / lit(4.0),
            dimensionality: Dimensionality::TwoPlusOne,
            si: None,
        })
    }

    /// Builds parameters from a physical field for the given particle.
    ///
    /// The SI arithmetic is carried out in `f64` and converted once.
    pub fn from_field(field_tesla: f64, particle: ParticleConstants) -> Result<Self> {
        if !(field_tesla > 0.0) || !field_tesla.is_finite() {
            return Err(ZbError::Domain(format!(
                "magnetic field must be positive, got {field_tesla} T"
            )));
        }
        let si = si_scale(field_tesla, particle);
        let b = std::f64::consts::SQRT_2 * si.compton_wavelength_m / si.magnetic_length_m;
        let mut params = Self::from_b(lit(b))?;
        params.si = Some(si);
        Ok(params)
    }

    pub fn with_dimensionality(mut self, dimensionality: Dimensionality) -> Self {
        self.dimensionality = dimensionality;
        self
    }

    /// b = ħω/mc², which also equals ω·t_c.
    #[inline]
    pub fn b(&self) -> T {
        self.field_ratio_b
    }

    /// ω in units of 1/t_c.
    #[inline]
    pub fn omega(&self) -> T {
        self.field_ratio_b
    }

    /// L in units of λ_c.
    #[inline]
    pub fn magnetic_length(&self) -> T {
        self.magnetic_length
    }

    /// κ = ħω_c / 2mc².
    #[inline]
    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// mc² in internal units.
    #[inline]
    pub fn mass_energy(&self) -> T {
        T::one()
    }

    /// c in internal units.
    #[inline]
    pub fn speed(&self) -> T {
        T::one()
    }

    /// Converts between scalar types.
    pub fn cast<U: Scalar>(&self) -> SimParams<U> {
        SimParams {
            field_ratio_b: lit(crate::scalar::to_f64(self.field_ratio_b)),
            magnetic_length: lit(crate::scalar::to_f64(self.magnetic_length)),
            kappa: lit(crate::scalar::to_f64(self.kappa)),
            dimensionality: self.dimensionality,
            si: self.si,
        }
    }
}

/// `make_params` for the electron at the SI boundary.
pub fn make_params<T: Scalar>(
    field_tesla: f64,
    particle: ParticleConstants,
) -> Result<SimParams<T>> {
    SimParams::from_field(field_tesla, particle)
}

pub fn make_params_dimensionless<T: Scalar>(b: T) -> Result<SimParams<T>> {
    SimParams::from_b(b)
}

fn si_scale(field_tesla: f64, particle: ParticleConstants) -> SiScale {
    let c = constants::SPEED_OF_LIGHT;
    let compton = constants::HBAR / (particle.mass * c);
    SiScale {
        field_tesla,
        magnetic_length_m: (constants::HBAR / (particle.charge * field_tesla)).sqrt(),
        compton_wavelength_m: compton,
        compton_time_s: compton / c,
        rest_energy_j: particle.mass * c * c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gigantic_field_gives_fig1_ratio() {
        let p = make_params::<f64>(2e9, ParticleConstants::ELECTRON).unwrap();
        // κ = ħeB / (m · 2mc²) straight from the constants table
        let kappa = constants::HBAR * constants::ELEMENTARY_CHARGE * 2e9
            / constants::ELECTRON_MASS
            / (2.0 * constants::ELECTRON_REST_ENERGY);
        assert_relative_eq!(p.kappa(), kappa, max_relative = 1e-12);
        assert!((p.kappa() - 0.2266).abs() < 5e-4);
        assert!((p.b() - 0.952).abs() < 5e-4);
        assert_relative_eq!(p.kappa(), p.b() * p.b() / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn hundred_tesla_magnetic_length_and_cyclotron_energy() {
        let p = make_params::<f64>(100.0, ParticleConstants::ELECTRON).unwrap();
        let si = p.si.unwrap();
        assert!((si.magnetic_length_m - 2.566e-9).abs() < 0.005e-9);
        let ev = si.cyclotron_energy_j() / constants::JOULE_PER_EV;
        assert!((ev - 0.01158).abs() < 5e-5, "ħω_c = {ev} eV");
        // b identity: b = √2 λ_c / L
        assert_relative_eq!(
            p.b(),
            std::f64::consts::SQRT_2 * si.compton_wavelength_m / si.magnetic_length_m,
            max_relative = 1e-14
        );
    }

    #[test]
    fn field_with_unit_ratio() {
        // L = √2 λ_c  <=>  eB = ħ / L² = ħ / (2 λ_c²)
        let lc = constants::COMPTON_WAVELENGTH;
        let field = constants::HBAR / (constants::ELEMENTARY_CHARGE * 2.0 * lc * lc);
        let p = make_params::<f64>(field, ParticleConstants::ELECTRON).unwrap();
        assert_relative_eq!(p.b(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn dimensionless_examples() {
        let p = make_params_dimensionless(1.0f64).unwrap();
        assert_relative_eq!(p.magnetic_length(), 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(p.kappa(), 0.25);
        let p = make_params_dimensionless(2.0f64).unwrap();
        assert_relative_eq!(p.magnetic_length(), 2f64.sqrt() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(p.kappa(), 1.0);
        let p = make_params_dimensionless(0.952f64).unwrap();
        assert!((p.kappa() - 0.2266).abs() < 1e-4);
    }

    #[test]
    fn round_trip_through_b() {
        let si = make_params::<f64>(3.3e8, ParticleConstants::ELECTRON).unwrap();
        let nat = make_params_dimensionless(si.b()).unwrap();
        assert!((si.kappa() - nat.kappa()).abs() < 1e-12);
        // ω t_c = b
        assert_eq!(si.omega(), si.b());
    }

    #[test]
    fn rejects_non_positive_input() {
        assert!(make_params::<f64>(0.0, ParticleConstants::ELECTRON).is_err());
        assert!(make_params::<f64>(-1.0, ParticleConstants::ELECTRON).is_err());
        assert!(make_params_dimensionless(0.0f64).is_err());
        assert!(make_params_dimensionless(-0.5f32).is_err());
        assert!(make_params_dimensionless(f64::NAN).is_err());
    }

    #[test]
    fn single_precision_matches() {
        let p = make_params_dimensionless(0.952f32).unwrap();
        assert!((p.kappa() - 0.226576).abs() < 1e-5);
    }
}
