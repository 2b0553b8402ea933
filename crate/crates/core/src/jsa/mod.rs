//! Biphoton state of seeded three-photon down-conversion: joint spectral
//! amplitude, pair probability, Schmidt number and bandwidth.

mod compute;
mod dispersion;
mod schmidt;

pub use compute::{
    amplitude_on_grid, compute_jsa, estimate_half_span, AreaSpec, GridSpec, InverseAreaFn, JsaGrid, JsaOutcome,
    JsaProblem, PairMetrics, RawAmplitude,
};
pub use dispersion::{BandDispersion, PhaseModel};
pub use schmidt::{generation_bandwidth, schmidt_number, schmidt_number_purity, weighted_matrix};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chebyshev::OutOfInterval;
use crate::consts::{hbar, omega_from_wavelength};
use crate::modes::ModeError;
use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JsaError {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dispersion table lookup failed: {0}")]
    OutOfTable(#[from] OutOfInterval),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(
        "grid truncation: marginal at the grid edge is {edge_ratio:.2e} of its peak; increase the span beyond {span_thz:.3} THz"
    )]
    Truncation { edge_ratio: f64, span_thz: f64 },
    #[error(
        "grid under-resolved: step {step_ghz:.2} GHz exceeds the pump ridge limit {limit_ghz:.2} GHz; use at least {cells_needed} cells"
    )]
    UnderResolved {
        step_ghz: f64,
        limit_ghz: f64,
        cells_needed: usize,
    },
    #[error("first-order expansion invalid: pair probability {eta2:.3} per pulse exceeds 0.5")]
    FirstOrderInvalid { eta2: f64 },
    #[error("marginal does not fall below half maximum inside the grid")]
    BandwidthTruncated,
    #[error("JSA is not normalized: discrete norm {0}")]
    NotNormalized(f64),
    #[error("closed-form rate diverges for vanishing group velocity dispersion")]
    ZeroDispersion,
    #[error("Schmidt number {0} is below one")]
    SchmidtBelowOne(f64),
    #[error("effective area evaluation failed: {0}")]
    Area(String),
}

/// Gaussian pulse described by its centre wavelength, duration and power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec<T> {
    /// m
    pub wavelength: T,
    /// s
    pub duration: T,
    /// W
    pub power: T,
}

impl<T: Real> PulseSpec<T> {
    pub fn new(wavelength: T, duration: T, power: T) -> Result<Self, JsaError> {
        if !(wavelength > T::zero()) {
            return Err(JsaError::InvalidPulse(format!(
                "wavelength {wavelength} must be positive"
            )));
        }
        if !(duration > T::zero()) {
            return Err(JsaError::InvalidPulse(format!("duration {duration} must be positive")));
        }
        if !(power >= T::zero()) || !power.is_finite() {
            return Err(JsaError::InvalidPulse(format!("power {power} must be non-negative")));
        }
        Ok(Self {
            wavelength,
            duration,
            power,
        })
    }

    pub fn omega0(&self) -> T {
        omega_from_wavelength(self.wavelength)
    }

    /// Mean photon number `P τ / (ħω₀)`.
    pub fn photon_number(&self) -> T {
        self.power * self.duration / (hbar::<T>() * self.omega0())
    }

    /// Unit-norm spectral amplitude `√τ π^{-1/4} exp(−τ²(ω−ω₀)²/2)`.
    pub fn spectral_profile(&self, omega: T) -> T {
        let x = self.duration * (omega - self.omega0());
        self.duration.sqrt() / T::PI().powf(lit(0.25)) * (-x * x / lit(2.0)).exp()
    }
}

/// `sin(x)/x`.
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / lit(6.0) + x2 * x2 / lit(120.0)
    } else {
        x.sin() / x
    }
}

/// Longitudinal transform of a uniform nonlinear section of length `L`
/// centred at the origin: `L sinc(ΔkL/2)`.
pub fn phasematch_factor<T: Real>(delta_k: T, length: T) -> T {
    length * sinc(delta_k * length / lit(2.0))
}

/// Coarse analytic pair probability per pulse,
/// `(4γ²L²/3π) √(2τ_s²τ_p² / (|β₂| L (τ_s²+τ_p²))) P_p P_s`.
pub fn pair_probability_closed_form<T: Real>(
    gamma: T,
    length: T,
    tau_s: T,
    tau_p: T,
    beta2: T,
    pump_power: T,
    seed_power: T,
) -> Result<T, JsaError> {
    if beta2 == T::zero() {
        return Err(JsaError::ZeroDispersion);
    }
    let (ts2, tp2) = (tau_s * tau_s, tau_p * tau_p);
    let root = (lit::<T>(2.0) * ts2 * tp2 / (beta2.abs() * length * (ts2 + tp2))).sqrt();
    Ok(lit::<T>(4.0) * gamma * gamma * length * length / (lit::<T>(3.0) * T::PI()) * root * pump_power * seed_power)
}

/// Unheralded `g²(0) = 1 + 1/K`.
pub fn g2_zero<T: Real>(schmidt_number: T) -> Result<T, JsaError> {
    if !(schmidt_number >= T::one() - lit(1e-9)) {
        return Err(JsaError::SchmidtBelowOne(schmidt_number.as_f64()));
    }
    Ok(T::one() + T::one() / schmidt_number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Rule;
    use approx::assert_relative_eq;

    fn seed() -> PulseSpec<f64> {
        PulseSpec::new(1.596e-6, 1e-9, 1.0).unwrap()
    }

    #[test]
    fn profile_peak_and_norm() {
        let p = seed();
        let w0 = p.omega0();
        assert_relative_eq!(
            p.spectral_profile(w0),
            (1e-9f64).sqrt() / std::f64::consts::PI.powf(0.25)
        );
        let r = Rule::gauss_legendre(128, w0 - 8.0 / p.duration, w0 + 8.0 / p.duration);
        let norm = r.integrate(|w| p.spectral_profile(w).powi(2));
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn longer_pulse_is_narrower() {
        let a = seed();
        let b = PulseSpec::new(1.596e-6, 4e-9, 1.0).unwrap();
        let half_width = |p: &PulseSpec<f64>| {
            let peak = p.spectral_profile(p.omega0());
            // exp(−τ²δ²/2) = 1/2
            let d = (2.0 * 2f64.ln()).sqrt() / p.duration;
            // absolute frequency rounding limits the offset to ~1e-10 relative
            assert_relative_eq!(p.spectral_profile(p.omega0() + d), peak / 2.0, max_relative = 1e-8);
            d
        };
        assert_relative_eq!(half_width(&a) / half_width(&b), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn photon_number_matches_energy_balance() {
        let p = seed();
        assert_relative_eq!(
            p.photon_number() * crate::consts::HBAR * p.omega0() / p.duration,
            1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn invalid_pulses_are_rejected() {
        assert!(PulseSpec::new(1e-6, 0.0, 1.0).is_err());
        assert!(PulseSpec::new(1e-6, 1e-9, -1.0).is_err());
        assert!(PulseSpec::new(0.0, 1e-9, 1.0).is_err());
    }

    #[test]
    fn phasematch_factor_limits() {
        assert_eq!(phasematch_factor(0.0, 0.01), 0.01);
        let null = 2.0 * std::f64::consts::PI / 0.01;
        assert!(phasematch_factor(null, 0.01).abs() < 1e-17);
        assert_eq!(phasematch_factor(123.0, 0.01), phasematch_factor(-123.0, 0.01));
    }

    #[test]
    fn phasematch_factor_matches_direct_fourier_integral() {
        let l = 0.01;
        for dk in [3.7f64, 150.0, 911.0, -420.0] {
            let r = Rule::<f64>::gauss_legendre(200, -l / 2.0, l / 2.0);
            let re = r.integrate(|z| (dk * z).cos());
            let im = r.integrate(|z| -(dk * z).sin());
            assert!((phasematch_factor(dk, l) - re).abs() < 1e-8 * l);
            assert!(im.abs() < 1e-12);
        }
    }

    #[test]
    fn g2_from_schmidt_number() {
        assert_eq!(g2_zero(1.0).unwrap(), 2.0);
        assert!(g2_zero(0.5).is_err());
        assert!((g2_zero(106.3f64).unwrap() - 1.0094).abs() < 5e-5);
        assert!((g2_zero(66.9f64).unwrap() - 1.015).abs() < 5e-4);
    }

    #[test]
    fn closed_form_scalings() {
        let f = |b2: f64, ps: f64| pair_probability_closed_form(0.02, 0.01, 1e-9, 1e-11, b2, 1e4, ps).unwrap();
        assert_relative_eq!(f(4.0 * 2.344e-24, 1.0), f(2.344e-24, 1.0) / 2.0, max_relative = 1e-14);
        assert_eq!(f(2.344e-24, 0.0), 0.0);
        assert_eq!(
            pair_probability_closed_form(0.02, 0.01, 1e-9, 1e-11, 0.0, 1e4, 1.0),
            Err(JsaError::ZeroDispersion)
        );
    }
}
