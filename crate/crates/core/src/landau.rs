//! Closed-form Landau-level spectrum of the Dirac Hamiltonian in a uniform field.

use crate::error::{Result, ZbError};
use crate::params::SimParams;
use crate::scalar::{from_usize, lit, to_f64, Scalar};

/// A ±1 quantum number (energy branch ε or spin index s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The five quantum numbers (n, k_x, k_z, ε, s) of one eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauLabel<T: Scalar> {
    n: usize,
    kx: T,
    kz: T,
    eps: Sign,
    spin: Sign,
}

impl<T: Scalar> LandauLabel<T> {
    /// Rejects labels whose spinor vanishes identically: the s = +1 state at
    /// n = 0 (it needs |n-1⟩) and ε = -1 at n = 0, k_z = 0 (zero norm).
    pub fn new(
        n: usize,
        kx: T,
        kz: T,
        eps: Sign,
        spin: Sign,
        params: &SimParams<T>,
    ) -> Result<Self> {
        if n == 0 && spin == Sign::Plus {
            return Err(ZbError::NonexistentState {
                n,
                eps: eps.as_i8(),
                kz: to_f64(kz),
            });
        }
        norm_and_chi(n, eps, kz, params)?;
        Ok(Self {
            n,
            kx,
            kz,
            eps,
            spin,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn kx(&self) -> T {
        self.kx
    }
    pub fn kz(&self) -> T {
        self.kz
    }
    pub fn eps(&self) -> Sign {
        self.eps
    }
    pub fn spin(&self) -> Sign {
        self.spin
    }

    /// Projector s_u = (s+1)/2.
    pub fn s_upper(&self) -> T {
        (self.spin.value::<T>() + T::one()) / lit(2.0)
    }

    /// Projector s_l = (s-1)/2.
    pub fn s_lower(&self) -> T {
        (self.spin.value::<T>() - T::one()) / lit(2.0)
    }

    /// Signed eigenvalue εE.
    pub fn eigenvalue(&self, params: &SimParams<T>) -> T {
        self.eps.value::<T>() * energy(self.n, self.kz, params)
    }

    /// Spinor amplitudes (component, oscillator index, value) of the normalized state.
    ///
    /// Components are ordered 1..4 as in the standard Dirac representation and
    /// returned 0-based.
    pub fn spinor(&self, params: &SimParams<T>) -> Vec<(usize, usize, T)> {
        let (norm, _) = norm_and_chi(self.n, self.eps, self.kz, params)
            .expect("label validated at construction");
        let e = energy(self.n, self.kz, params);
        let eps = self.eps.value::<T>();
        let (su, sl) = (self.s_upper(), self.s_lower());
        let landau = params.b() * from_usize::<T>(self.n).sqrt();
        let upper = eps * e + T::one();
        let mut out = Vec::with_capacity(4);
        let lower_n = self.n.checked_sub(1);
        if let Some(m) = lower_n {
            out.push((0, m, su * upper / norm));
            out.push((2, m, (su * self.kz - sl * landau) / norm));
        }
        out.push((1, self.n, sl * upper / norm));
        out.push((3, self.n, -(su * landau + sl * self.kz) / norm));
        out.retain(|&(_, _, v)| v != T::zero());
        out
    }
}

/// Energy, frequency, norm and weight factor at one (n, ε, k_z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T: Scalar> {
    pub energy: T,
    pub omega_n: T,
    pub norm: T,
    pub chi: T,
}

impl<T: Scalar> SpectrumPoint<T> {
    pub fn evaluate(n: usize, eps: Sign, kz: T, params: &SimParams<T>) -> Result<Self> {
        let (norm, chi) = norm_and_chi(n, eps, kz, params)?;
        Ok(Self {
            energy: energy(n, kz, params),
            omega_n: params.omega() * from_usize::<T>(n).sqrt(),
            norm,
            chi,
        })
    }
}

/// E_{n,k_z} = √((mc²)² + n(ħω)² + (ħk_z c)²), evaluated with nested `hypot`.
pub fn energy<T: Scalar>(n: usize, kz: T, params: &SimParams<T>) -> T {
    let landau = params.b() * from_usize::<T>(n).sqrt();
    params.mass_energy().hypot(landau).hypot(kz)
}

/// Fallible form of [`energy`] for callers holding a signed level index.
pub fn energy_checked<T: Scalar>(n: i64, kz: T, params: &SimParams<T>) -> Result<T> {
    if n < 0 {
        return Err(ZbError::Domain(format!(
            "Landau index must be non-negative, got {n}"
        )));
    }
    Ok(energy(n as usize, kz, params))
}

/// N = √(2E² + 2ε mc² E) and χ = (εE + mc²) / N.
///
/// A vanishing norm (n = 0, k_z = 0, ε = -1) is reported as a nonexistent state.
pub fn norm_and_chi<T: Scalar>(
    n: usize,
    eps: Sign,
    kz: T,
    params: &SimParams<T>,
) -> Result<(T, T)> {
    let e = energy(n, kz, params);
    let mc2 = params.mass_energy();
    let eps_v = eps.value::<T>();
    // 2E(E + ε) written as 2E·(E - 1) + ... would cancel; use E² - 1 = nb² + kz² instead
    let norm_sq = match eps {
        Sign::Plus => lit::<T>(2.0) * e * (e + mc2),
        Sign::Minus => {
            let landau_sq = params.b() * params.b() * from_usize::<T>(n);
            // E - 1 = (E² - 1) / (E + 1)
            lit::<T>(2.0) * e * (landau_sq + kz * kz) / (e + mc2)
        }
    };
    if !(norm_sq > T::zero()) {
        return Err(ZbError::NonexistentState {
            n,
            eps: eps.as_i8(),
            kz: to_f64(kz),
        });
    }
    let norm = norm_sq.sqrt();
    Ok((norm, (eps_v * e + mc2) / norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    /// ε = ε′, the cyclotron-type lines.
    Intraband,
    /// ε ≠ ε′, the Zitterbewegung lines.
    Interband,
}

/// Angular frequency |ε′E_{n′} − εE_n| of an allowed (|n − n′| = 1) line.
pub fn transition_frequency<T: Scalar>(
    n: usize,
    n_prime: usize,
    eps: Sign,
    eps_prime: Sign,
    kz: T,
    params: &SimParams<T>,
) -> Result<(T, TransitionKind)> {
    if n.abs_diff(n_prime) != 1 {
        return Err(ZbError::ForbiddenTransition { n, n_prime });
    }
    let e = energy(n, kz, params);
    let e_prime = energy(n_prime, kz, params);
    let kind = if eps == eps_prime {
        TransitionKind::Intraband
    } else {
        TransitionKind::Interband
    };
    let freq = match kind {
        // E′ − E = (E′² − E²)/(E′ + E) avoids the cancellation in the cyclotron limit
        TransitionKind::Intraband => {
            let b2 = params.b() * params.b();
            b2 / (e + e_prime)
        }
        TransitionKind::Interband => e + e_prime,
    };
    Ok((freq, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(b: f64) -> SimParams<f64> {
        SimParams::from_b(b).unwrap()
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(0, 0.0, &params(0.3)), 1.0);
        assert_relative_eq!(
            energy(1, 0.0, &params(1.0)),
            2f64.sqrt(),
            max_relative = 1e-15
        );
        let e = energy(2, 1.0, &params(0.952));
        assert_relative_eq!(
            e,
            (1.0 + 2.0 * 0.952f64 * 0.952 + 1.0).sqrt(),
            max_relative = 1e-15
        );
        assert!((e - 1.9527).abs() < 2e-4);
        assert!(energy_checked(-1, 0.0, &params(1.0)).is_err());
    }

    #[test]
    fn energy_does_not_overflow_for_large_levels() {
        let p = params(1e150);
        let e = energy(400, 0.0, &p);
        assert!(e.is_finite());
        assert_relative_eq!(e, 1e150 * 20.0, max_relative = 1e-14);
    }

    #[test]
    fn norm_examples() {
        let p = params(1.0);
        let (n, chi) = norm_and_chi(0, Sign::Plus, 0.0, &p).unwrap();
        assert_relative_eq!(n, 2.0);
        assert_relative_eq!(chi, 1.0);
        assert!(matches!(
            norm_and_chi(0, Sign::Minus, 0.0, &p),
            Err(ZbError::NonexistentState { n: 0, eps: -1, .. })
        ));
        let (n, chi) = norm_and_chi(1, Sign::Minus, 0.0, &p).unwrap();
        let expected = (4.0 - 2.0 * 2f64.sqrt()).sqrt();
        assert_relative_eq!(n, expected, max_relative = 1e-14);
        assert!((n - 1.0824).abs() < 1e-4);
        assert_relative_eq!(chi, (1.0 - 2f64.sqrt()) / expected, max_relative = 1e-14);
        assert!((chi + 0.38268).abs() < 1e-5);
        // n = 0 with kz ≠ 0 exists on both branches
        assert!(norm_and_chi(0, Sign::Minus, 0.2, &p).is_ok());
    }

    #[test]
    fn chi_weights_sum_to_one() {
        let p = params(0.7);
        for n in 1..20 {
            for &kz in &[0.0, 0.3, 2.0] {
                let (_, cp) = norm_and_chi(n, Sign::Plus, kz, &p).unwrap();
                let (_, cm) = norm_and_chi(n, Sign::Minus, kz, &p).unwrap();
                assert!((cp * cp + cm * cm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn transition_examples() {
        let p = params(1.0);
        let (f, k) = transition_frequency(0, 1, Sign::Plus, Sign::Plus, 0.0, &p).unwrap();
        assert_relative_eq!(f, 2f64.sqrt() - 1.0, max_relative = 1e-14);
        assert_eq!(k, TransitionKind::Intraband);
        let (f, k) = transition_frequency(0, 1, Sign::Plus, Sign::Minus, 0.0, &p).unwrap();
        assert_relative_eq!(f, 2f64.sqrt() + 1.0, max_relative = 1e-14);
        assert_eq!(k, TransitionKind::Interband);
        assert!(matches!(
            transition_frequency(0, 2, Sign::Plus, Sign::Plus, 0.0, &p),
            Err(ZbError::ForbiddenTransition { .. })
        ));
        assert!(transition_frequency(3, 3, Sign::Plus, Sign::Minus, 0.0, &p).is_err());
    }

    #[test]
    fn cyclotron_limit_of_lowest_line() {
        // (E1 - E0) = √(1+b²) - 1 = b²/2 - b⁴/8 + O(b⁶)
        for &b in &[1e-3, 5e-4, 1e-4] {
            let p = params(b);
            let (f, _) = transition_frequency(0, 1, Sign::Plus, Sign::Plus, 0.0, &p).unwrap();
            let dev = (f - b * b / 2.0).abs();
            assert!(dev <= 0.13 * b.powi(4), "b={b}: deviation {dev}");
        }
    }

    #[test]
    fn spinor_is_normalized_eigenvector() {
        let p = params(0.9);
        for n in 0..5 {
            for eps in [Sign::Plus, Sign::Minus] {
                for spin in [Sign::Plus, Sign::Minus] {
                    let Ok(label) = LandauLabel::new(n, 0.0, 0.4, eps, spin, &p) else {
                        assert!(n == 0 && spin == Sign::Plus);
                        continue;
                    };
                    let norm: f64 = label.spinor(&p).iter().map(|(_, _, v)| v * v).sum();
                    assert!((norm - 1.0).abs() < 1e-14);
                }
            }
        }
        assert!(LandauLabel::new(0, 0.0, 0.0, Sign::Minus, Sign::Minus, &p).is_err());
    }

    #[test]
    fn spin_projectors() {
        let p = params(1.0);
        let up = LandauLabel::new(2, 0.0, 0.0, Sign::Plus, Sign::Plus, &p).unwrap();
        let down = LandauLabel::new(2, 0.0, 0.0, Sign::Plus, Sign::Minus, &p).unwrap();
        assert_eq!((up.s_upper(), up.s_lower()), (1.0, 0.0));
        assert_eq!((down.s_upper(), down.s_lower()), (0.0, -1.0));
    }

    #[test]
    fn spectrum_point_fields() {
        let p = params(1.5);
        let sp = SpectrumPoint::evaluate(4, Sign::Plus, 0.0, &p).unwrap();
        assert_relative_eq!(sp.omega_n, 3.0);
        assert!(sp.energy >= 1.0 && sp.norm > 0.0 && sp.chi.is_finite());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn even_in_kz_and_monotone(b in 1e-3f64..10.0, kz in -5.0f64..5.0, n in 0usize..200) {
                let p = params(b);
                prop_assert_eq!(energy(n, kz, &p), energy(n, -kz, &p));
                prop_assert!(energy(n + 1, kz, &p) > energy(n, kz, &p));
                prop_assert!(energy(n, kz.abs() + 0.1, &p) > energy(n, kz, &p));
            }
        }
    }
}
