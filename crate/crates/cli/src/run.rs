//! Scenario orchestration: decomposition, time sweep, spectrum, optional
//! oracle comparison and artefact output.

use std::path::{Path, PathBuf};

use zitter::dynamics::{decompose, trajectory_from};
use zitter::oracle::{
    build_matrix, check_spectrum, check_transform, eigenvalues, oracle_trajectory, SpectrumCheck,
    TransformReport,
};
use zitter::spectral::{classify_peaks, spectrum, Part, SpectrumReport, MIN_SAMPLES};
use zitter::{Dimensionality, Trajectory};

use crate::config::{RunConfig, Scenario};
use crate::error::CliError;
use crate::output::{self, Header};
use crate::presets;
use crate::report;
use crate::svg::{self, Plot, Series, PALETTE};

/// Truncation for the spectrum and transform checks run alongside the oracle.
const SPECTRUM_CHECK_N: usize = 40;
const TRANSFORM_CHECK_N: usize = 20;

/// Configuration text plus where it came from.
#[derive(Debug, Clone)]
pub struct ConfigSource {
    pub text: String,
    pub origin: String,
}

impl ConfigSource {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(Self {
            text,
            origin: path.display().to_string(),
        })
    }

    pub fn preset(name: &str) -> Result<Self, CliError> {
        Ok(Self {
            text: presets::preset(name)?.to_string(),
            origin: format!("preset {name}"),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub check_oracle: bool,
    pub dump_decomposition: bool,
    /// Overrides `numerics.threads`.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            check_oracle: false,
            dump_decomposition: false,
            threads: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleSummary {
    /// max |Δ⟨X⟩|, |Δ⟨Y⟩| in units of L.
    pub deviation: f64,
    pub tolerance: f64,
    pub n_trunc: usize,
    pub tail_mass: f64,
    pub kz_nodes: usize,
    pub spectrum: SpectrumCheck,
    pub transform: TransformReport,
    pub eigenvalues: Vec<f64>,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub origin: String,
    pub config_hash: String,
    pub trajectory: Trajectory<f64>,
    pub occupations: Vec<f64>,
    pub occupied: Vec<usize>,
    pub spectrum: Option<SpectrumReport<f64>>,
    pub oracle: Option<OracleSummary>,
    /// `(n, k_x, re F, im F)` rows, kept when a dump was requested.
    pub f_table: Option<Vec<(usize, f64, f64, f64)>>,
    pub files: Vec<PathBuf>,
}

/// Runs one scenario and writes its artefacts into `opts.out_dir`.
///
/// An oracle mismatch is reported as an error after all files are written.
pub fn run(source: &ConfigSource, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let scenario = RunConfig::from_toml(&source.text)?.resolve()?;
    let threads = opts.threads.or(scenario.threads);
    let mut outcome = match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| simulate(scenario, opts))?
        }
        None => simulate(scenario, opts)?,
    };
    outcome.origin = source.origin.clone();
    outcome.config_hash = output::config_hash(&source.text);
    write_artefacts(&mut outcome, opts)?;
    if let Some(o) = &outcome.oracle {
        if !o.passed() {
            return Err(CliError::OracleMismatch {
                deviation: o.deviation,
                tolerance: o.tolerance,
            });
        }
    }
    Ok(outcome)
}

/// Numerical part of a run, without touching the filesystem.
pub fn simulate(scenario: Scenario, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let decomp = decompose(
        &scenario.packet,
        &scenario.params,
        &scenario.decomposition,
        scenario.grid.end(),
        scenario.kz_tol,
        scenario.max_kz_intervals,
    )?;
    let trajectory = trajectory_from(&decomp, &scenario.grid);
    let occupations = decomp.occupations().to_vec();
    let occupied = decomp.occupied_levels(scenario.occupancy_threshold);

    let spectrum = if trajectory.len() >= MIN_SAMPLES {
        let raw = spectrum(&trajectory, scenario.window, Part::Total)?;
        Some(classify_peaks(raw, &scenario.params, &occupied))
    } else {
        None
    };

    let oracle = if opts.check_oracle {
        let mut cfg = scenario.oracle.clone();
        if scenario.params.dimensionality == Dimensionality::ThreePlusOne {
            cfg.kz_intervals = decomp.kz_profile().len() - 1;
        }
        let reference =
            oracle_trajectory(&scenario.packet, &scenario.params, &scenario.grid, &cfg)?;
        let deviation = trajectory.max_deviation(&reference)? / scenario.params.magnetic_length();
        let n_trunc = reference.provenance.n_max;
        let h = build_matrix(scenario.packet.k0x, 0.0, n_trunc, &scenario.params);
        Some(OracleSummary {
            deviation,
            tolerance: scenario.oracle_tolerance,
            n_trunc,
            tail_mass: reference.provenance.tail_mass,
            kz_nodes: reference.provenance.kz_nodes,
            spectrum: check_spectrum(SPECTRUM_CHECK_N, 0.0, &scenario.params, 0.9),
            transform: check_transform(&scenario.params, TRANSFORM_CHECK_N, 0.0),
            eigenvalues: eigenvalues(&h),
        })
    } else {
        None
    };

    Ok(RunOutcome {
        scenario,
        origin: String::new(),
        config_hash: String::new(),
        trajectory,
        occupations,
        occupied,
        spectrum,
        oracle,
        f_table: opts.dump_decomposition.then(|| decomp.f_table()),
        files: Vec::new(),
    })
}

fn write_artefacts(outcome: &mut RunOutcome, opts: &RunOptions) -> Result<(), CliError> {
    let dir = &opts.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let header = Header {
        config_hash: outcome.config_hash.clone(),
        scenario: outcome.scenario.name.clone(),
    };
    let unit = outcome.scenario.position_unit;
    let scale = unit.in_compton(&outcome.scenario.params);
    let mut files = Vec::new();

    let path = dir.join("trajectory.csv");
    output::write_trajectory(&path, &header, &outcome.trajectory, scale, unit.symbol())?;
    files.push(path);

    if let Some(report) = &outcome.spectrum {
        let path = dir.join("spectrum.csv");
        output::write_spectrum(
            &path,
            &header,
            report,
            outcome.scenario.spectrum_threshold,
            scale,
            unit.symbol(),
        )?;
        files.push(path);
    }

    if let Some(table) = &outcome.f_table {
        let path = dir.join("decomposition.csv");
        output::write_decomposition(&path, &header, table)?;
        files.push(path);
    }

    if let Some(o) = &outcome.oracle {
        let path = dir.join("eigenvalues.csv");
        output::write_eigenvalues(&path, &header, &o.eigenvalues)?;
        files.push(path);
    }

    if outcome.scenario.plots {
        for (name, text) in plots(outcome, scale, unit.symbol()) {
            let path = dir.join(name);
            output::write_text(&path, &text)?;
            files.push(path);
        }
    }

    let path = dir.join("report.md");
    files.push(path.clone());
    outcome.files = files;
    output::write_text(&path, &report::render(outcome))?;
    Ok(())
}

fn plots(outcome: &RunOutcome, scale: f64, unit: &str) -> Vec<(&'static str, String)> {
    let traj = &outcome.trajectory;
    let x: Vec<f64> = traj.x.iter().map(|v| v / scale).collect();
    let y: Vec<f64> = traj.y.iter().map(|v| v / scale).collect();
    let x_label = "t [t_c]".to_string();
    let y_label = format!("position [{unit}]");
    let title = format!("{}: position expectation", outcome.scenario.name);
    let mut out = vec![(
        "trajectory.svg",
        svg::render(&Plot {
            title: &title,
            x_label: &x_label,
            y_label: &y_label,
            series: vec![
                Series {
                    label: "<X(t)>",
                    x: &traj.times,
                    y: &x,
                    color: PALETTE[0],
                },
                Series {
                    label: "<Y(t)>",
                    x: &traj.times,
                    y: &y,
                    color: PALETTE[1],
                },
            ],
            ..Default::default()
        }),
    )];

    let orbit_title = format!("{}: orbit", outcome.scenario.name);
    let ox = format!("<X> [{unit}]");
    let oy = format!("<Y> [{unit}]");
    out.push((
        "orbit.svg",
        svg::render(&Plot {
            title: &orbit_title,
            x_label: &ox,
            y_label: &oy,
            series: vec![Series {
                label: "orbit",
                x: &x,
                y: &y,
                color: PALETTE[2],
            }],
            equal_aspect: true,
            ..Default::default()
        }),
    ));

    if let Some(report) = &outcome.spectrum {
        let max = report
            .peaks
            .first()
            .map_or(1.0, |p| p.power)
            .max(f64::MIN_POSITIVE);
        let floor = -9.0;
        let level = |p: f64| (p / max).max(1e-300).log10().max(floor);
        let f_cut = report
            .peaks
            .iter()
            .filter(|p| p.power >= max * outcome.scenario.spectrum_threshold)
            .map(|p| p.freq)
            .fold(0.0, f64::max);
        let f_max = (1.5 * f_cut).max(20.0 * report.bin_width);
        let keep = report
            .freqs
            .iter()
            .take_while(|&&f| f <= f_max)
            .count()
            .max(2);
        let freqs = &report.freqs[..keep];
        let total: Vec<f64> = (0..keep)
            .map(|k| level(report.power_x[k] + report.power_y[k]))
            .collect();
        let annotations = report
            .peaks
            .iter()
            .filter(|p| p.power >= max * outcome.scenario.spectrum_threshold)
            .map(|p| (p.freq, level(p.power), p.label.to_string()))
            .collect();
        let spec_title = format!("{}: spectrum", outcome.scenario.name);
        out.push((
            "spectrum.svg",
            svg::render(&Plot {
                title: &spec_title,
                x_label: "angular frequency [1/t_c]",
                y_label: "log10 relative power",
                series: vec![Series {
                    label: "P_x + P_y",
                    x: freqs,
                    y: &total,
                    color: PALETTE[3],
                }],
                annotations,
                equal_aspect: false,
            }),
        ));
    }
    out
}
