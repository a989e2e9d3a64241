use nalgebra::DVector;
use num_complex::Complex;
use proptest::prelude::*;
use zitter::constants::ParticleConstants;
use zitter::dynamics::{decompose, trajectory_from};
use zitter::ion::{
    dirac_to_trap, ground_state_spread, kappa_of, trap_to_dirac, Ion, TrapConfig, TrapConstraints,
};
use zitter::landau::{energy, transition_frequency};
use zitter::oracle::build_matrix;
use zitter::{
    DecompositionConfig, Dimensionality, GaussianPacket, PacketDecomposition, Sign, SimParams,
    SpectrumPoint, TimeGrid, ZbError,
};

fn packet(params: &SimParams<f64>, dx: f64, dy: f64, k0x_l: f64) -> GaussianPacket<f64> {
    let l = params.magnetic_length();
    GaussianPacket::new(dx * l, dy * l, None, k0x_l / l).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kappa_and_length_identities(b in 1e-3f64..20.0) {
        let p = SimParams::from_b(b).unwrap();
        prop_assert!((p.kappa() / (b * b / 4.0) - 1.0).abs() < 1e-12);
        prop_assert!((p.b() * p.magnetic_length() / 2f64.sqrt() - 1.0).abs() < 1e-12);
        // ω t_c = b with t_c = 1
        prop_assert_eq!(p.omega(), p.b());
    }

    #[test]
    fn field_and_dimensionless_routes_agree(log_b in 3.0f64..11.0) {
        let si = SimParams::<f64>::from_field(10f64.powf(log_b), ParticleConstants::ELECTRON).unwrap();
        let plain = SimParams::from_b(si.b()).unwrap();
        prop_assert!((si.kappa() - plain.kappa()).abs() <= 1e-12 * plain.kappa());
    }

    #[test]
    fn spectrum_points_are_physical(b in 1e-2f64..10.0, kz in -4.0f64..4.0, n in 0usize..300, minus in any::<bool>()) {
        let p = SimParams::from_b(b).unwrap();
        let eps = if minus { Sign::Minus } else { Sign::Plus };
        match SpectrumPoint::evaluate(n, eps, kz, &p) {
            Ok(sp) => {
                prop_assert!(sp.energy >= 1.0);
                prop_assert!(sp.norm >= 0.0 && sp.chi.is_finite());
                prop_assert!((sp.omega_n - b * (n as f64).sqrt()).abs() <= 1e-12 * (1.0 + sp.omega_n));
            }
            Err(ZbError::NonexistentState { .. }) => prop_assert!(n == 0 && kz == 0.0 && minus),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn weak_field_limit_is_quartic(b in 1e-4f64..1e-3) {
        let p = SimParams::from_b(b).unwrap();
        let (w, _) = transition_frequency(0, 1, Sign::Plus, Sign::Plus, 0.0, &p).unwrap();
        // b²/2 − (√(1+b²) − 1) = b⁴/8 + O(b⁶)
        let c4 = (b * b / 2.0 - w) / b.powi(4);
        prop_assert!((c4 - 0.125).abs() < 1e-3, "{c4}");
    }

    #[test]
    fn truncated_hamiltonian_is_symmetric_with_paired_spectrum(b in 0.05f64..4.0, kz in -2.0f64..2.0, kx in -3.0f64..3.0, n in 1usize..12) {
        let p = SimParams::from_b(b).unwrap();
        let h = build_matrix(kx, kz, n, &p);
        prop_assert!(h.hermiticity_defect() <= 1e-14);
        let eig = h.eigen();
        let mut values: Vec<f64> = eig.values.iter().copied().collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let len = values.len();
        for k in 0..len {
            prop_assert!((values[k] + values[len - 1 - k]).abs() < 1e-10 * (1.0 + values[k].abs()));
        }
    }

    #[test]
    fn evolution_conserves_norm(b in 0.1f64..3.0, kz in -1.0f64..1.0, t in 0.0f64..500.0, seed in prop::collection::vec(-1.0f64..1.0, 2 * 4 * 9)) {
        let p = SimParams::from_b(b).unwrap();
        let eig = build_matrix(0.0, kz, 8, &p).eigen();
        let raw: Vec<Complex<f64>> = seed.chunks(2).map(|c| Complex::new(c[0], c[1])).collect();
        let norm: f64 = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let psi = DVector::from_iterator(raw.len(), raw.iter().map(|c| c / norm));
        let out = eig.evolve(&psi, t).unwrap();
        let after: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((after - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_is_scale_invariant(eta in 0.01f64..0.3, w in 1e2f64..1e6, wt in 1e2f64..1e6, s in 1e-3f64..1e3) {
        let base = TrapConfig::from_delta(eta, w, wt, 1e-8, Ion::Ca40).unwrap();
        let scaled = TrapConfig::from_delta(eta, s * w, s * wt, 1e-8, Ion::Ca40).unwrap();
        let (a, b) = (kappa_of(&base).unwrap(), kappa_of(&scaled).unwrap());
        prop_assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trap_round_trip(eta in 0.01f64..0.3, w in 1e2f64..1e6, wt in 1e2f64..1e6, delta in 1e-9f64..1e-7, mg in any::<bool>()) {
        let ion = if mg { Ion::Mg25 } else { Ion::Ca40 };
        let trap = TrapConfig::from_delta(eta, w, wt, delta, ion).unwrap();
        prop_assert!((trap.delta / ground_state_spread(ion.mass(), trap.trap_freq) - 1.0).abs() < 1e-12);
        let mapping = trap_to_dirac::<f64>(&trap).unwrap();
        let fixed = TrapConstraints {
            eta: Some(eta),
            omega_tilde: Some(wt),
            delta: Some(delta),
            ion,
            ..Default::default()
        };
        let back = dirac_to_trap(&mapping.params, &fixed).unwrap();
        prop_assert!((back.omega_carrier / w - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn occupations_are_complete(b in 0.2f64..5.0, dx in 0.5f64..1.5, dy in 0.5f64..1.5, k0x_l in 0.0f64..2.0) {
        let p = SimParams::from_b(b).unwrap();
        let d = PacketDecomposition::build(&packet(&p, dx, dy, k0x_l), &p, &DecompositionConfig::default()).unwrap();
        let sum: f64 = d.occupations().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-8, "{sum}");
        prop_assert!(d.tail_mass() < 1e-10);
        prop_assert!((d.total_weight() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn positions_are_real_and_finite(b in 0.2f64..5.0, dx in 0.6f64..1.4, k0x_l in 0.3f64..2.0, t_end in 5.0f64..200.0) {
        let p = SimParams::from_b(b).unwrap();
        let d = PacketDecomposition::build(&packet(&p, dx, 1.0, k0x_l), &p, &DecompositionConfig::default()).unwrap();
        let traj = trajectory_from(&d, &TimeGrid::span(t_end, 200).unwrap());
        prop_assert!(traj.max_imag_residue < 1e-10);
        prop_assert!(traj.x.iter().chain(&traj.y).all(|v| v.is_finite()));
        // k0x ≠ 0 breaks the x/y symmetry
        let differ = traj.x.iter().zip(&traj.y).any(|(x, y)| (x - y).abs() > 1e-6 * p.magnetic_length());
        prop_assert!(differ);
    }
}

#[test]
fn energies_are_even_and_increasing() {
    let p = SimParams::from_b(1.3).unwrap();
    for n in 0..50 {
        for kz in [0.0, 0.3, 2.0] {
            assert_eq!(energy(n, kz, &p), energy(n, -kz, &p));
            assert!(energy(n + 1, kz, &p) > energy(n, kz, &p));
        }
    }
}

#[test]
fn spatial_mode_matches_planar_limit_for_wide_dz() {
    // a very long packet along z has |g_z|² concentrated at k_z = 0
    let planar = SimParams::from_b(1.0).unwrap();
    let spatial = planar.with_dimensionality(Dimensionality::ThreePlusOne);
    let l = planar.magnetic_length();
    let flat = GaussianPacket::new(0.9 * l, l, None, 2f64.sqrt() / l).unwrap();
    let long = GaussianPacket::new(0.9 * l, l, Some(400.0), 2f64.sqrt() / l).unwrap();
    let grid = TimeGrid::span(10.0, 101).unwrap();
    let cfg = DecompositionConfig::default();
    let a = trajectory_from(
        &decompose(&flat, &planar, &cfg, 10.0, 1e-9, 1 << 14).unwrap(),
        &grid,
    );
    let b = trajectory_from(
        &decompose(&long, &spatial, &cfg, 10.0, 1e-9, 1 << 14).unwrap(),
        &grid,
    );
    assert!(a.max_deviation(&b).unwrap() / l < 1e-3);
}

#[test]
fn single_precision_tracks_double() {
    let p64 = SimParams::from_b(1.5).unwrap();
    let p32 = p64.cast::<f32>();
    let l = p64.magnetic_length();
    let k64 = GaussianPacket::new(0.9 * l, l, None, 2f64.sqrt() / l).unwrap();
    let l32 = l as f32;
    let k32 = GaussianPacket::new(0.9 * l32, l32, None, 2f32.sqrt() / l32).unwrap();
    let cfg = DecompositionConfig {
        tail_tol: 1e-6,
        n_max_cap: 40,
        ..Default::default()
    };
    let a = trajectory_from(
        &PacketDecomposition::build(&k64, &p64, &cfg).unwrap(),
        &TimeGrid::span(20.0, 64).unwrap(),
    );
    let b = trajectory_from(
        &PacketDecomposition::build(&k32, &p32, &cfg).unwrap(),
        &TimeGrid::span(20.0f32, 64).unwrap(),
    );
    for k in 0..a.len() {
        assert!((a.x[k] - b.x[k] as f64).abs() < 1e-3 * l);
        assert!((a.y[k] - b.y[k] as f64).abs() < 1e-3 * l);
    }
}
