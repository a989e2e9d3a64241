//! Markdown run summary.

use std::fmt::Write;

use zitter::dynamics::envelope_ratio;
use zitter::ion::excitation_plan;
use zitter::spectral::richness;

use crate::output::VERSION;
use crate::run::RunOutcome;

/// Peaks listed in the table at most.
const MAX_PEAKS: usize = 24;

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

pub fn render(outcome: &RunOutcome) -> String {
    let sc = &outcome.scenario;
    let p = &sc.params;
    let traj = &outcome.trajectory;
    let prov = &traj.provenance;
    let l = p.magnetic_length();
    let mut s = String::new();

    let _ = writeln!(s, "# zitter run: {}\n", sc.name);
    let _ = writeln!(s, "- version: {VERSION}");
    let _ = writeln!(s, "- configuration: {}", outcome.origin);
    let _ = writeln!(s, "- config_sha256: `{}`", outcome.config_hash);
    let _ = writeln!(s, "- mode: {}\n", p.dimensionality.label());

    let _ = writeln!(s, "## Parameters\n");
    let _ = writeln!(s, "| quantity | value |\n|---|---|");
    let _ = writeln!(s, "| b = ħω/mc² | {} |", sci(p.b()));
    let _ = writeln!(s, "| κ = b²/4 | {} |", sci(p.kappa()));
    let _ = writeln!(s, "| L [λ_c] | {} |", sci(l));
    if let Some(si) = &p.si {
        let _ = writeln!(s, "| B [T] | {} |", sci(si.field_tesla));
        let _ = writeln!(s, "| L [m] | {} |", sci(si.magnetic_length_m));
    }
    let pk = &sc.packet;
    let _ = writeln!(s, "| d_x [L] | {} |", sci(pk.d_x / l));
    let _ = writeln!(s, "| d_y [L] | {} |", sci(pk.d_y / l));
    if let Some(dz) = pk.d_z {
        let _ = writeln!(s, "| d_z [λ_c] | {} |", sci(dz));
    }
    let _ = writeln!(s, "| k0x [1/L] | {} |", sci(pk.k0x * l));
    let _ = writeln!(
        s,
        "| cyclotron period [t_c] | {} |",
        sci(sc.cyclotron_period)
    );
    let _ = writeln!(
        s,
        "| time grid [t_c] | 0 to {} in {} samples |\n",
        sci(sc.grid.end()),
        sc.grid.count
    );

    if let Some(trap) = &sc.trap {
        let t = &trap.trap;
        let sc_ = &trap.scales;
        let _ = writeln!(s, "## Trapped-ion realisation\n");
        let _ = writeln!(s, "| quantity | value |\n|---|---|");
        let _ = writeln!(s, "| ion | {} |", trap.ion.label());
        let _ = writeln!(s, "| η | {} |", sci(t.eta));
        let derived = if trap.carrier_derived {
            " (solved from κ)"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "| Ω/2π [Hz] | {}{derived} |",
            sci(t.omega_carrier / std::f64::consts::TAU)
        );
        let _ = writeln!(
            s,
            "| Ω̃/2π [Hz] | {} |",
            sci(t.omega_tilde / std::f64::consts::TAU)
        );
        let _ = writeln!(s, "| Δ [m] | {} |", sci(t.delta));
        let _ = writeln!(
            s,
            "| ν/2π [Hz] | {} |",
            sci(t.trap_freq / std::f64::consts::TAU)
        );
        let _ = writeln!(s, "| simulated c [m/s] | {} |", sci(sc_.speed_of_light));
        let _ = writeln!(s, "| simulated mc² [J] | {} |", sci(sc_.rest_energy));
        let _ = writeln!(s, "| simulated λ_c [m] | {} |", sci(sc_.compton_wavelength));
        let _ = writeln!(s, "| simulated t_c [s] | {} |", sci(sc_.compton_time));
        let _ = writeln!(s, "| simulated L [m] | {} |\n", sci(sc_.magnetic_length));
    }

    let _ = writeln!(s, "## Decomposition\n");
    let _ = writeln!(s, "- N_max: {}", prov.n_max);
    let _ = writeln!(s, "- tail mass: {}", sci(prov.tail_mass));
    let _ = writeln!(s, "- Σ U_nn: {}", sci(outcome.occupations.iter().sum()));
    let _ = writeln!(s, "- k_z nodes: {}", prov.kz_nodes);
    let _ = writeln!(
        s,
        "- occupied levels (U_nn > {}): {:?}",
        sci(sc.occupancy_threshold),
        outcome.occupied
    );
    let _ = writeln!(
        s,
        "- max imaginary residue [λ_c]: {}",
        sci(traj.max_imag_residue)
    );
    if let Ok(ratio) = envelope_ratio(traj, sc.cyclotron_period, (0.0, 50.0), (50.0, 100.0)) {
        if traj
            .times
            .last()
            .is_some_and(|&t| t >= 100.0 * sc.cyclotron_period)
        {
            let _ = writeln!(
                s,
                "- interband envelope ratio (periods 50-100 vs 0-50): {}",
                sci(ratio)
            );
        }
    }
    s.push('\n');

    if let Some(report) = &outcome.spectrum {
        let _ = writeln!(s, "## Spectrum\n");
        let _ = writeln!(s, "- window: {:?}", report.window);
        let _ = writeln!(s, "- bin width [1/t_c]: {}", sci(report.bin_width));
        let _ = writeln!(
            s,
            "- richness (peaks above {} of the strongest): {}\n",
            sc.spectrum_threshold,
            richness(report, sc.spectrum_threshold)
        );
        let _ = writeln!(s, "| ω [1/t_c] | relative power | label |\n|---|---|---|");
        let max = report.peaks.first().map_or(1.0, |p| p.power);
        for peak in report
            .peaks
            .iter()
            .filter(|p| p.power >= max * sc.spectrum_threshold)
            .take(MAX_PEAKS)
        {
            let _ = writeln!(
                s,
                "| {} | {} | {} |",
                sci(peak.freq),
                sci(peak.power / max),
                peak.label
            );
        }
        s.push('\n');
    }

    let plan = excitation_plan(p.dimensionality);
    let _ = writeln!(s, "## Excitation plan\n");
    let _ = writeln!(
        s,
        "| interaction | levels | term | phases [rad] | pairs |\n|---|---|---|---|---|"
    );
    for ex in &plan.interactions {
        let phases: Vec<String> = ex.phases.iter().map(|v| format!("{v:.4}")).collect();
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            ex.kind.label(),
            ex.pair,
            ex.term,
            phases.join(", "),
            ex.kind.laser_pairs()
        );
    }
    let _ = writeln!(s, "\nTotal laser-excitation pairs: {}\n", plan.pair_count);

    if let Some(o) = &outcome.oracle {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "## Oracle comparison\n");
        let _ = writeln!(
            s,
            "- oracle: {verdict} max deviation {} L (tolerance {} L)",
            sci(o.deviation),
            sci(o.tolerance)
        );
        let _ = writeln!(
            s,
            "- truncation N: {}, tail mass {}",
            o.n_trunc,
            sci(o.tail_mass)
        );
        let _ = writeln!(s, "- k_z nodes: {}", o.kz_nodes);
        let _ = writeln!(
            s,
            "- spectrum check (N = 40, k_z = 0): max relative deviation {}, {} eigenvalues compared, multiplicities {}",
            sci(o.spectrum.max_rel_deviation),
            o.spectrum.compared,
            if o.spectrum.multiplicities_ok { "ok" } else { "wrong" }
        );
        let t = &o.transform;
        let _ = writeln!(
            s,
            "- transform check (N = {}): |PP† − 1| {}, |P H P† − H′| {}, spectrum {}\n",
            t.n_trunc,
            sci(t.unitarity),
            sci(t.block_form),
            sci(t.spectrum)
        );
    }

    let _ = writeln!(s, "## Files\n");
    for f in &outcome.files {
        if let Some(name) = f.file_name() {
            let _ = writeln!(s, "- {}", name.to_string_lossy());
        }
    }
    s
}
