//! Run configuration: TOML schema, validation and resolution into core types.
//!
//! ```toml
//! scenario = "fig2b"
//! mode = "2+1"                 # or "3+1"
//!
//! [packet]
//! length_unit = "magnetic"     # "magnetic" (L) or "compton" (λ_c)
//! d_x = 0.9
//! d_y = 1.0
//! d_z = 0.7                    # required in 3+1 mode
//! k0x = 1.4142135623730951     # in 1/length_unit
//!
//! [field]                      # exactly one of: tesla, b, [field.trap]
//! b = 2.0
//!
//! [field.trap]
//! eta = 0.06
//! omega_tilde_hz = 68e3        # Ω̃/2π
//! delta_m = 96e-10             # or trap_freq_hz = ν/2π
//! ion = "ca40"                 # or "mg25"
//! kappa = 1.05                 # or omega_carrier_hz = Ω/2π
//!
//! [time]
//! t_end = 100.0
//! samples = 4096
//! unit = "compton"             # or "cyclotron" (t_end in cyclotron periods)
//!
//! [numerics]                   # all optional
//! n_max_cap = 120
//! tail_tol = 1e-10
//! kz_intervals = 256
//! kz_cutoff = 6.5
//! kz_tol = 1e-9
//! max_kz_intervals = 65536
//! threads = 4
//!
//! [output]
//! position_unit = "magnetic"   # or "compton"
//! plots = true
//!
//! [spectrum]
//! window = "hann"
//! threshold = 0.01
//! occupancy_threshold = 1e-6
//!
//! [oracle]
//! tolerance = 1e-6             # in units of L
//! ```

use std::f64::consts::PI;

use serde::Deserialize;
use zitter::constants::ParticleConstants;
use zitter::dynamics::{cyclotron_reference, TimeGrid};
use zitter::ion::{
    dirac_to_trap, trap_to_dirac, Ion, SimulatedScales, TrapConfig, TrapConstraints,
};
use zitter::oracle::OracleConfig;
use zitter::spectral::Window;
use zitter::{DecompositionConfig, Dimensionality, GaussianPacket, SimParams};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default = "default_mode")]
    pub mode: String,
    pub packet: PacketSection,
    pub field: FieldSection,
    pub time: TimeSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

fn default_mode() -> String {
    "2+1".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    #[default]
    Magnetic,
    Compton,
}

impl LengthUnit {
    pub fn symbol(self) -> &'static str {
        match self {
            LengthUnit::Magnetic => "L",
            LengthUnit::Compton => "lambda_c",
        }
    }

    /// Size of the unit in Compton wavelengths.
    pub fn in_compton(self, params: &SimParams<f64>) -> f64 {
        match self {
            LengthUnit::Magnetic => params.magnetic_length(),
            LengthUnit::Compton => 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    #[serde(default)]
    pub length_unit: LengthUnit,
    pub d_x: f64,
    pub d_y: f64,
    #[serde(default)]
    pub d_z: Option<f64>,
    pub k0x: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    #[serde(default)]
    pub tesla: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub trap: Option<TrapSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub eta: f64,
    pub omega_tilde_hz: f64,
    #[serde(default)]
    pub delta_m: Option<f64>,
    #[serde(default)]
    pub trap_freq_hz: Option<f64>,
    #[serde(default)]
    pub ion: Option<String>,
    #[serde(default)]
    pub omega_carrier_hz: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    #[default]
    Compton,
    Cyclotron,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    pub samples: usize,
    #[serde(default)]
    pub unit: TimeUnit,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub n_max_cap: usize,
    pub tail_tol: f64,
    pub kx_nodes: Option<usize>,
    pub y_nodes: Option<usize>,
    pub kz_intervals: usize,
    pub kz_cutoff: f64,
    pub kz_tol: f64,
    pub max_kz_intervals: usize,
    pub threads: Option<usize>,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let d = DecompositionConfig::default();
        Self {
            n_max_cap: d.n_max_cap,
            tail_tol: d.tail_tol,
            kx_nodes: None,
            y_nodes: None,
            kz_intervals: d.kz_intervals,
            kz_cutoff: d.kz_cutoff,
            kz_tol: 1e-9,
            max_kz_intervals: 1 << 16,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub position_unit: LengthUnit,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            position_unit: LengthUnit::Magnetic,
            plots: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub window: String,
    pub threshold: f64,
    pub occupancy_threshold: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            window: "hann".into(),
            threshold: zitter::spectral::DEFAULT_THRESHOLD,
            occupancy_threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub tolerance: f64,
    pub n_trunc_cap: usize,
    pub tail_tol: f64,
    pub max_tail: f64,
    pub kx_points: usize,
    pub y_points: usize,
    pub span: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        let d = OracleConfig::default();
        Self {
            tolerance: 1e-6,
            n_trunc_cap: d.n_trunc_cap,
            tail_tol: d.tail_tol,
            max_tail: d.max_tail,
            kx_points: d.kx_points,
            y_points: d.y_points,
            span: d.span,
        }
    }
}

/// Trap provenance carried into the report.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapInfo {
    pub trap: TrapConfig,
    pub ion: Ion,
    pub scales: SimulatedScales,
    /// The carrier frequency was solved from κ rather than given.
    pub carrier_derived: bool,
}

/// Validated configuration in simulation units (λ_c, t_c).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub params: SimParams<f64>,
    pub packet: GaussianPacket<f64>,
    pub grid: TimeGrid<f64>,
    pub decomposition: DecompositionConfig,
    pub kz_tol: f64,
    pub max_kz_intervals: usize,
    pub threads: Option<usize>,
    pub trap: Option<TrapInfo>,
    pub position_unit: LengthUnit,
    pub plots: bool,
    pub window: Window,
    pub spectrum_threshold: f64,
    pub occupancy_threshold: f64,
    pub oracle: OracleConfig,
    pub oracle_tolerance: f64,
    /// 2π/(E₁ − E₀) at k_z = 0, in t_c.
    pub cyclotron_period: f64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let cfg_err = |msg: String| CliError::Config(msg);
        let mode: Dimensionality = self
            .mode
            .parse()
            .map_err(|e: zitter::ZbError| cfg_err(e.to_string()))?;
        let (params, trap) = self.field.resolve()?;
        let params = params.with_dimensionality(mode);

        let unit = self.packet.length_unit.in_compton(&params);
        let d_z = match (mode, self.packet.d_z) {
            (Dimensionality::ThreePlusOne, None) => {
                return Err(cfg_err("packet.d_z is required in 3+1 mode".into()))
            }
            (_, d) => d.map(|d| d * unit),
        };
        let packet = GaussianPacket::new(
            self.packet.d_x * unit,
            self.packet.d_y * unit,
            d_z,
            self.packet.k0x / unit,
        )
        .map_err(|e| cfg_err(format!("packet: {e}")))?;

        let n = &self.numerics;
        positive("numerics.tail_tol", n.tail_tol)?;
        positive("numerics.kz_cutoff", n.kz_cutoff)?;
        positive("numerics.kz_tol", n.kz_tol)?;
        if n.threads == Some(0) {
            return Err(cfg_err("numerics.threads must be at least 1".into()));
        }
        let decomposition = DecompositionConfig {
            n_max_cap: n.n_max_cap,
            tail_tol: n.tail_tol,
            n_max_floor: 0,
            kx_nodes: n.kx_nodes,
            y_nodes: n.y_nodes,
            kz_intervals: n.kz_intervals,
            kz_cutoff: n.kz_cutoff,
        };
        decomposition
            .validate()
            .map_err(|e| cfg_err(format!("numerics: {e}")))?;

        let (omega_c, _) = cyclotron_reference(&packet, &params);
        let cyclotron_period = 2.0 * PI / omega_c;
        positive("time.t_end", self.time.t_end)?;
        if self.time.samples < 2 {
            return Err(cfg_err("time.samples must be at least 2".into()));
        }
        let t_end = match self.time.unit {
            TimeUnit::Compton => self.time.t_end,
            TimeUnit::Cyclotron => self.time.t_end * cyclotron_period,
        };
        let grid = TimeGrid::span(t_end, self.time.samples).map_err(|e| cfg_err(e.to_string()))?;

        let s = &self.spectrum;
        let window: Window = s
            .window
            .parse()
            .map_err(|e: zitter::ZbError| cfg_err(e.to_string()))?;
        positive("spectrum.threshold", s.threshold)?;
        positive("spectrum.occupancy_threshold", s.occupancy_threshold)?;

        let o = &self.oracle;
        for (name, v) in [
            ("oracle.tolerance", o.tolerance),
            ("oracle.tail_tol", o.tail_tol),
            ("oracle.max_tail", o.max_tail),
            ("oracle.span", o.span),
        ] {
            positive(name, v)?;
        }
        if o.kx_points < 3 || o.y_points < 3 {
            return Err(cfg_err("oracle grids need at least 3 points".into()));
        }
        let oracle = OracleConfig {
            n_trunc: None,
            n_trunc_cap: o.n_trunc_cap,
            tail_tol: o.tail_tol,
            max_tail: o.max_tail,
            kx_points: o.kx_points,
            y_points: o.y_points,
            span: o.span,
            kz_intervals: n.kz_intervals,
            kz_cutoff: n.kz_cutoff,
        };

        Ok(Scenario {
            name: self.scenario.clone().unwrap_or_else(|| "custom".into()),
            params,
            packet,
            grid,
            decomposition,
            kz_tol: n.kz_tol,
            max_kz_intervals: n.max_kz_intervals,
            threads: n.threads,
            trap,
            position_unit: self.output.position_unit,
            plots: self.output.plots,
            window,
            spectrum_threshold: s.threshold,
            occupancy_threshold: s.occupancy_threshold,
            oracle,
            oracle_tolerance: o.tolerance,
            cyclotron_period,
        })
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl FieldSection {
    fn resolve(&self) -> Result<(SimParams<f64>, Option<TrapInfo>), CliError> {
        let cfg_err = |msg: String| CliError::Config(msg);
        let given = [self.tesla.is_some(), self.b.is_some(), self.trap.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(cfg_err(
                "field: give exactly one of `tesla`, `b` or a [field.trap] table".into(),
            ));
        }
        if let Some(tesla) = self.tesla {
            let p = SimParams::from_field(tesla, ParticleConstants::ELECTRON)
                .map_err(|e| cfg_err(format!("field.tesla: {e}")))?;
            return Ok((p, None));
        }
        if let Some(b) = self.b {
            let p = SimParams::from_b(b).map_err(|e| cfg_err(format!("field.b: {e}")))?;
            return Ok((p, None));
        }
        let t = self.trap.as_ref().expect("checked above");
        t.resolve().map(|(p, info)| (p, Some(info)))
    }
}

impl TrapSection {
    fn resolve(&self) -> Result<(SimParams<f64>, TrapInfo), CliError> {
        let cfg_err = |msg: String| CliError::Config(format!("field.trap: {msg}"));
        let ion: Ion = match &self.ion {
            Some(s) => s
                .parse()
                .map_err(|e: zitter::ZbError| cfg_err(e.to_string()))?,
            None => Ion::default(),
        };
        let two_pi = 2.0 * PI;
        let delta = self.delta_m;
        let trap_freq = self.trap_freq_hz.map(|f| two_pi * f);
        let (trap, carrier_derived) = match (self.omega_carrier_hz, self.kappa) {
            (Some(f), None) => {
                let carrier = two_pi * f;
                let trap = match (delta, trap_freq) {
                    (Some(d), None) => TrapConfig::from_delta(
                        self.eta,
                        carrier,
                        two_pi * self.omega_tilde_hz,
                        d,
                        ion,
                    ),
                    (None, Some(nu)) => TrapConfig::from_trap_freq(
                        self.eta,
                        carrier,
                        two_pi * self.omega_tilde_hz,
                        nu,
                        ion,
                    ),
                    _ => return Err(cfg_err("give exactly one of delta_m, trap_freq_hz".into())),
                }
                .map_err(|e| cfg_err(e.to_string()))?;
                (trap, false)
            }
            (None, Some(kappa)) => {
                positive("field.trap.kappa", kappa)?;
                let target =
                    SimParams::from_b(2.0 * kappa.sqrt()).map_err(|e| cfg_err(e.to_string()))?;
                let fixed = TrapConstraints {
                    eta: Some(self.eta),
                    omega_tilde: Some(two_pi * self.omega_tilde_hz),
                    omega_carrier: None,
                    delta,
                    trap_freq,
                    ion,
                };
                (
                    dirac_to_trap(&target, &fixed).map_err(|e| cfg_err(e.to_string()))?,
                    true,
                )
            }
            _ => {
                return Err(cfg_err(
                    "give exactly one of omega_carrier_hz, kappa".into(),
                ))
            }
        };
        let mapping = trap_to_dirac::<f64>(&trap).map_err(|e| cfg_err(e.to_string()))?;
        Ok((
            mapping.params,
            TrapInfo {
                trap,
                ion,
                scales: mapping.scales,
                carrier_derived,
            },
        ))
    }
}
