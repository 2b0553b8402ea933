//! Bulk material dispersion from a Sellmeier oscillator sum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts;
use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("wavelength {wavelength_um} um outside Sellmeier validity range [{min_um}, {max_um}] um")]
    OutOfRange {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },
    #[error("wavelength {wavelength_um} um coincides with Sellmeier resonance")]
    Pole { wavelength_um: f64 },
    #[error("invalid Sellmeier model: {0}")]
    Invalid(String),
}

/// One oscillator `B λ² / (λ² − λ₀²)`, resonance in µm.
///
/// A zero resonance wavelength contributes the constant `B`, which is how a
/// dispersionless medium is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierTerm<T> {
    pub strength: T,
    pub resonance_um: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel<T> {
    terms: Vec<SellmeierTerm<T>>,
    valid_range_um: (T, T),
}

impl<T: Real> SellmeierModel<T> {
    pub fn new(terms: Vec<SellmeierTerm<T>>, valid_range_um: (T, T)) -> Result<Self, MaterialError> {
        let (lo, hi) = valid_range_um;
        if !(lo >= T::zero() && hi > lo) {
            return Err(MaterialError::Invalid(format!("valid range [{lo}, {hi}] um is empty")));
        }
        for t in &terms {
            if !(t.strength >= T::zero()) || !(t.resonance_um >= T::zero()) {
                return Err(MaterialError::Invalid(format!(
                    "term (B={}, resonance={} um) must be non-negative",
                    t.strength, t.resonance_um
                )));
            }
        }
        Ok(Self { terms, valid_range_um })
    }

    /// Malitson (1965) room-temperature fused silica, 0.21–6.7 µm.
    pub fn fused_silica_malitson() -> Self {
        let raw = [
            (0.696_166_3, 0.068_404_3),
            (0.407_942_6, 0.116_241_4),
            (0.897_479_4, 9.896_161),
        ];
        Self {
            terms: raw
                .iter()
                .map(|&(b, l)| SellmeierTerm {
                    strength: lit(b),
                    resonance_um: lit(l),
                })
                .collect(),
            valid_range_um: (lit(0.21), lit(6.7)),
        }
    }

    /// A medium with wavelength-independent index `n >= 1`.
    pub fn constant(n: T) -> Result<Self, MaterialError> {
        if !(n >= T::one()) {
            return Err(MaterialError::Invalid(format!("constant index {n} < 1")));
        }
        Self::new(
            vec![SellmeierTerm {
                strength: n * n - T::one(),
                resonance_um: T::zero(),
            }],
            (T::zero(), T::infinity()),
        )
    }

    pub fn terms(&self) -> &[SellmeierTerm<T>] {
        &self.terms
    }

    pub fn valid_range_um(&self) -> (T, T) {
        self.valid_range_um
    }

    fn check_wavelength(&self, lambda_um: T) -> Result<(), MaterialError> {
        let (lo, hi) = self.valid_range_um;
        if !(lambda_um >= lo && lambda_um <= hi) {
            return Err(MaterialError::OutOfRange {
                wavelength_um: lambda_um.as_f64(),
                min_um: lo.as_f64(),
                max_um: hi.as_f64(),
            });
        }
        for t in &self.terms {
            if t.resonance_um > T::zero() && (lambda_um - t.resonance_um).abs() <= lit::<T>(1e-12) * t.resonance_um {
                return Err(MaterialError::Pole {
                    wavelength_um: lambda_um.as_f64(),
                });
            }
        }
        Ok(())
    }

    // S(u) and its first two derivatives in u = λ² (µm²).
    fn oscillator_sum(&self, u: T) -> (T, T, T) {
        let two = lit::<T>(2.0);
        self.terms
            .iter()
            .fold((T::zero(), T::zero(), T::zero()), |(s, s1, s2), t| {
                let ur = t.resonance_um * t.resonance_um;
                let d = u - ur;
                (
                    s + t.strength * u / d,
                    s1 - t.strength * ur / (d * d),
                    s2 + two * t.strength * ur / (d * d * d),
                )
            })
    }

    /// Refractive index at vacuum wavelength `lambda` in metres.
    pub fn refractive_index(&self, lambda: T) -> Result<T, MaterialError> {
        let lambda_um = lambda * lit(1e6);
        self.check_wavelength(lambda_um)?;
        let (s, _, _) = self.oscillator_sum(lambda_um * lambda_um);
        Ok((T::one() + s).sqrt())
    }

    /// Index at angular frequency `omega` (rad/s).
    pub fn index_at_omega(&self, omega: T) -> Result<T, MaterialError> {
        self.refractive_index(consts::wavelength_from_omega(omega))
    }

    /// Analytic `(dn/dω, d²n/dω²)` at angular frequency `omega`.
    pub fn index_derivatives(&self, omega: T) -> Result<(T, T), MaterialError> {
        let lambda_um = consts::wavelength_from_omega(omega) * lit(1e6);
        self.check_wavelength(lambda_um)?;
        let u = lambda_um * lambda_um;
        let (s, s1, s2) = self.oscillator_sum(u);
        let n = (T::one() + s).sqrt();
        // u(ω) = (2πc/ω)²  ⇒  u' = −2u/ω,  u'' = 6u/ω²
        let du = -lit::<T>(2.0) * u / omega;
        let d2u = lit::<T>(6.0) * u / (omega * omega);
        let ds = s1 * du;
        let d2s = s2 * du * du + s1 * d2u;
        let two = lit::<T>(2.0);
        let dn = ds / (two * n);
        let d2n = d2s / (two * n) - ds * ds / (lit::<T>(4.0) * n * n * n);
        Ok((dn, d2n))
    }
}

impl<T: Real> Default for SellmeierModel<T> {
    fn default() -> Self {
        Self::fused_silica_malitson()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::omega_from_wavelength;
    use approx::assert_relative_eq;

    fn silica() -> SellmeierModel<f64> {
        SellmeierModel::fused_silica_malitson()
    }

    // Five-point central difference of the index, step h = 1e-6·ω.
    fn fd(model: &SellmeierModel<f64>, omega: f64) -> (f64, f64) {
        let h = 1e-6 * omega;
        let n = |w: f64| model.index_at_omega(w).unwrap();
        let (m2, m1, z, p1, p2) = (
            n(omega - 2.0 * h),
            n(omega - h),
            n(omega),
            n(omega + h),
            n(omega + 2.0 * h),
        );
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn silica_index_at_working_wavelengths() {
        // independently evaluated Malitson sum (mpmath, 30 digits)
        assert_relative_eq!(
            silica().refractive_index(532e-9).unwrap(),
            1.460_706_344_892_133,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            silica().refractive_index(1596e-9).unwrap(),
            1.443_467_788_983_968,
            max_relative = 1e-13
        );
    }

    #[test]
    fn empty_oscillator_strength_gives_vacuum() {
        let m = SellmeierModel::new(
            vec![SellmeierTerm {
                strength: 0.0,
                resonance_um: 0.1,
            }],
            (0.2, 5.0),
        )
        .unwrap();
        assert_eq!(m.refractive_index(1e-6).unwrap(), 1.0);
        assert_eq!(m.index_derivatives(omega_from_wavelength(1e-6)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn out_of_range_and_pole_are_errors() {
        assert!(matches!(
            silica().refractive_index(10e-6),
            Err(MaterialError::OutOfRange { .. })
        ));
        let m = SellmeierModel::new(
            vec![SellmeierTerm {
                strength: 1.0,
                resonance_um: 1.0,
            }],
            (0.5, 2.0),
        )
        .unwrap();
        assert!(matches!(m.refractive_index(1e-6), Err(MaterialError::Pole { .. })));
        assert!(SellmeierModel::new(
            vec![SellmeierTerm {
                strength: -1.0,
                resonance_um: 1.0
            }],
            (0.5, 2.0)
        )
        .is_err());
    }

    #[test]
    fn first_derivative_matches_finite_difference_at_seed() {
        let w = omega_from_wavelength(1596e-9);
        let (d1, _) = silica().index_derivatives(w).unwrap();
        let (f1, _) = fd(&silica(), w);
        assert_relative_eq!(d1, f1, max_relative = 1e-6);
    }

    #[test]
    fn second_derivative_matches_finite_difference_at_pump() {
        let w = omega_from_wavelength(532e-9);
        let (_, d2) = silica().index_derivatives(w).unwrap();
        let (_, f2) = fd(&silica(), w);
        assert_relative_eq!(d2, f2, max_relative = 1e-5);
    }

    #[test]
    fn derivative_sweep_agrees_with_finite_differences() {
        for i in 0..100 {
            let lam = 0.45e-6 + (1.7e-6 - 0.45e-6) * i as f64 / 99.0;
            let w = omega_from_wavelength(lam);
            let (d1, d2) = silica().index_derivatives(w).unwrap();
            let (f1, f2) = fd(&silica(), w);
            assert_relative_eq!(d1, f1, max_relative = 1e-5);
            assert_relative_eq!(d2, f2, max_relative = 1e-5);
        }
    }

    #[test]
    fn silica_is_normally_dispersive_in_the_visible_and_near_infrared() {
        let m = silica();
        let mut prev = f64::INFINITY;
        for i in 0..=140 {
            let n = m.refractive_index((0.4 + 0.01 * i as f64) * 1e-6).unwrap();
            assert!(n > 1.0 && n < prev);
            prev = n;
        }
    }

    #[test]
    fn evaluation_is_bit_reproducible() {
        let a = silica().refractive_index(777e-9).unwrap();
        let b = silica().refractive_index(777e-9).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn constant_model_is_dispersionless() {
        let m = SellmeierModel::constant(1.45).unwrap();
        assert_relative_eq!(m.refractive_index(3e-7).unwrap(), 1.45, max_relative = 1e-15);
        let (d1, d2) = m.index_derivatives(1e15).unwrap();
        assert_eq!((d1, d2), (0.0, 0.0));
    }
}
