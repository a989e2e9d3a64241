//! Zitterbewegung of a Dirac wave packet in a uniform magnetic field.
//!
//! The crate computes exact Landau-basis expectation values of the packet
//! position in 2+1 and 3+1 dimensions, checks them against a brute-force
//! truncated-matrix evolution, classifies the spectral lines of the motion,
//! and maps trapped-ion parameters onto the simulated Dirac equation.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the double-precision versions used by the CLI.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod hermite;
pub mod ion;
pub mod landau;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod scalar;
pub mod spectral;
pub mod wavepacket;

pub use dynamics::{Engine, TimeGrid, Trajectory};
pub use error::{Result, ZbError};
pub use landau::{LandauLabel, Sign, SpectrumPoint, TransitionKind};
pub use params::{Dimensionality, SimParams};
pub use scalar::Scalar;
pub use wavepacket::{DecompositionConfig, GaussianPacket, KzProfile, PacketDecomposition};

pub type SimParams64 = SimParams<f64>;
pub type SimParams32 = SimParams<f32>;
pub type GaussianPacket64 = GaussianPacket<f64>;
pub type PacketDecomposition64 = PacketDecomposition<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type TimeGrid64 = TimeGrid<f64>;
pub type SpectrumReport64 = spectral::SpectrumReport<f64>;
