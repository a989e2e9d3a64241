//! CODATA 2018 constants (SI). The only place SI numbers enter the crate.

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge [C].
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass [kg].
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Atomic mass constant [kg].
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Electron rest energy mc² [J].
pub const ELECTRON_REST_ENERGY: f64 = ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
/// Reduced Compton wavelength ħ/mc [m].
pub const COMPTON_WAVELENGTH: f64 = HBAR / (ELECTRON_MASS * SPEED_OF_LIGHT);
/// Compton time ħ/mc² [s].
pub const COMPTON_TIME: f64 = HBAR / ELECTRON_REST_ENERGY;

/// Joules per electron-volt.
pub const JOULE_PER_EV: f64 = ELEMENTARY_CHARGE;

/// Particle data used at the SI boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleConstants {
    pub mass: f64,
    pub charge: f64,
}

impl ParticleConstants {
    pub const ELECTRON: Self = Self {
        mass: ELECTRON_MASS,
        charge: ELEMENTARY_CHARGE,
    };
}
