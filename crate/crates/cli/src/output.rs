//! CSV artefacts. Every file opens with `#` comment lines naming the crate
//! version and the SHA-256 of the configuration text.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};
use zitter::spectral::SpectrumReport;
use zitter::Trajectory;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Float format with 17 significant digits.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone)]
pub struct Header {
    pub config_hash: String,
    pub scenario: String,
}

impl Header {
    fn lines(&self, extra: &[(&str, String)]) -> String {
        let mut s = format!(
            "# zitter {VERSION}\n# config_sha256={}\n# scenario={}\n",
            self.config_hash, self.scenario
        );
        for (k, v) in extra {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s
    }
}

fn writer(path: &Path, preamble: &str) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut buf = BufWriter::new(file);
    buf.write_all(preamble.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(buf))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

/// Trajectory table; positions divided by `length_unit` (in λ_c).
pub fn write_trajectory(
    path: &Path,
    header: &Header,
    traj: &Trajectory<f64>,
    length_unit: f64,
    unit_symbol: &str,
) -> Result<(), CliError> {
    let pre = header.lines(&[
        ("time_unit", "t_c".into()),
        ("position_unit", unit_symbol.into()),
    ]);
    let mut w = writer(path, &pre)?;
    w.write_record([
        "t",
        "x",
        "y",
        "x_interband",
        "y_interband",
        "x_intraband",
        "y_intraband",
    ])
    .map_err(|e| csv_err(path, e))?;
    for k in 0..traj.len() {
        let row = [
            fmt(traj.times[k]),
            fmt(traj.x[k] / length_unit),
            fmt(traj.y[k] / length_unit),
            fmt(traj.x_inter[k] / length_unit),
            fmt(traj.y_inter[k] / length_unit),
            fmt(traj.x_intra[k] / length_unit),
            fmt(traj.y_intra[k] / length_unit),
        ];
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    finish(w, path)
}

/// Power per frequency bin; bins closest to a detected peak carry its label.
pub fn write_spectrum(
    path: &Path,
    header: &Header,
    report: &SpectrumReport<f64>,
    threshold: f64,
    length_unit: f64,
    unit_symbol: &str,
) -> Result<(), CliError> {
    let pre = header.lines(&[
        ("freq_unit", "rad/t_c".into()),
        ("power_unit", format!("{unit_symbol}^2")),
        ("window", format!("{:?}", report.window).to_lowercase()),
    ]);
    let mut labels = vec![String::new(); report.freqs.len()];
    let df = report.freqs.get(1).copied().unwrap_or(1.0);
    let cut = report
        .peaks
        .first()
        .map_or(f64::INFINITY, |p| p.power * threshold);
    for peak in report.peaks.iter().filter(|p| p.power >= cut) {
        let bin = ((peak.freq / df).round() as usize).min(labels.len() - 1);
        labels[bin] = peak.label.to_string();
    }
    let scale = length_unit * length_unit;
    let mut w = writer(path, &pre)?;
    w.write_record(["freq", "power_x", "power_y", "label"])
        .map_err(|e| csv_err(path, e))?;
    for (k, label) in labels.iter().enumerate() {
        let row = [
            fmt(report.freqs[k]),
            fmt(report.power_x[k] / scale),
            fmt(report.power_y[k] / scale),
            label.clone(),
        ];
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    finish(w, path)
}

/// Landau-level coefficient table F_n(k_x) on the k_x quadrature nodes.
pub fn write_decomposition(
    path: &Path,
    header: &Header,
    table: &[(usize, f64, f64, f64)],
) -> Result<(), CliError> {
    let pre = header.lines(&[("kx_unit", "1/lambda_c".into())]);
    let mut w = writer(path, &pre)?;
    w.write_record(["n", "kx", "re", "im"])
        .map_err(|e| csv_err(path, e))?;
    for &(n, kx, re, im) in table {
        w.write_record(&[n.to_string(), fmt(kx), fmt(re), fmt(im)])
            .map_err(|e| csv_err(path, e))?;
    }
    finish(w, path)
}

/// Truncated-matrix eigenvalues in ascending order.
pub fn write_eigenvalues(path: &Path, header: &Header, values: &[f64]) -> Result<(), CliError> {
    let pre = header.lines(&[("energy_unit", "mc^2".into())]);
    let mut w = writer(path, &pre)?;
    w.write_record(["index", "energy"])
        .map_err(|e| csv_err(path, e))?;
    for (k, &e) in values.iter().enumerate() {
        w.write_record(&[k.to_string(), fmt(e)])
            .map_err(|e| csv_err(path, e))?;
    }
    finish(w, path)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
