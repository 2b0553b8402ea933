//! Spontaneous Raman noise and the pair spectral densities it competes
//! with, in the quasi-CW limit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::{BOLTZMANN, PLANCK};
use crate::jsa::sinc;
use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RamanError {
    #[error("Raman detuning must be positive, got {0} Hz")]
    ZeroDetuning(f64),
    #[error("negative temperature {0} K")]
    NegativeTemperature(f64),
    #[error("invalid Raman model: {0}")]
    Invalid(String),
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
}

/// Spectral shape of the Raman gain as a function of detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RamanShape<T> {
    /// Response `h(t) ∝ e^{−t/τ₂} sin(t/τ₁)`; the gain follows `Im H(2πΔ)`.
    DampedOscillator { tau1: T, tau2: T },
    /// Measured `(Δ in Hz, relative gain)` pairs, ascending in Δ, linearly
    /// interpolated and zero outside the table.
    Tabulated(Vec<(T, T)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanModel<T> {
    pub shape: RamanShape<T>,
    /// Peak bulk gain (m/W) for a pump at `reference_wavelength`.
    pub g_peak: T,
    /// m
    pub reference_wavelength: T,
    /// Area (m²) against which the bulk gain is quoted.
    pub reference_area: T,
    /// K
    pub temperature: T,
    /// Detuning (Hz) at which the vibrational band ends; the gain is rolled
    /// off with a raised cosine over ±5 THz around it.
    pub band_edge: T,
    peak_detuning: T,
    peak_value: T,
}

const TAPER_HALF_WIDTH: f64 = 5e12;

impl<T: Real> RamanModel<T> {
    pub fn new(
        shape: RamanShape<T>,
        g_peak: T,
        reference_wavelength: T,
        reference_area: T,
        temperature: T,
        band_edge: T,
    ) -> Result<Self, RamanError> {
        if !(g_peak >= T::zero()) {
            return Err(RamanError::Invalid(format!("peak gain {g_peak}")));
        }
        if !(reference_wavelength > T::zero() && reference_area > T::zero()) {
            return Err(RamanError::Invalid(
                "reference wavelength and area must be positive".into(),
            ));
        }
        if !(temperature >= T::zero()) {
            return Err(RamanError::NegativeTemperature(temperature.as_f64()));
        }
        if !(band_edge > lit(TAPER_HALF_WIDTH)) {
            return Err(RamanError::Invalid(format!("band edge {band_edge} Hz too small")));
        }
        match &shape {
            RamanShape::DampedOscillator { tau1, tau2 } => {
                if !(*tau1 > T::zero() && *tau2 > T::zero()) {
                    return Err(RamanError::Invalid("oscillator times must be positive".into()));
                }
            }
            RamanShape::Tabulated(rows) => {
                if rows.len() < 2
                    || rows.windows(2).any(|w| !(w[1].0 > w[0].0))
                    || rows.iter().any(|r| !(r.0 >= T::zero() && r.1 >= T::zero()))
                {
                    return Err(RamanError::Invalid(
                        "table needs >= 2 rows, ascending detuning, non-negative gain".into(),
                    ));
                }
            }
        }
        let mut model = Self {
            shape,
            g_peak,
            reference_wavelength,
            reference_area,
            temperature,
            band_edge,
            peak_detuning: T::zero(),
            peak_value: T::one(),
        };
        let (d, v) = model.locate_peak();
        if !(v > T::zero()) {
            return Err(RamanError::Invalid("shape has no positive gain".into()));
        }
        model.peak_detuning = d;
        model.peak_value = v;
        Ok(model)
    }

    /// Fused silica: τ₁ = 12.2 fs, τ₂ = 32 fs, 1e−13 m/W at 1.55 µm quoted
    /// for an 84 µm² area, 300 K, band ending at 40 THz.
    pub fn silica() -> Self {
        Self::new(
            RamanShape::DampedOscillator {
                tau1: lit(12.2e-15),
                tau2: lit(32e-15),
            },
            lit(1e-13),
            lit(1.55e-6),
            lit(84e-12),
            lit(300.0),
            lit(40e12),
        )
        .expect("valid constants")
    }

    pub fn with_temperature(mut self, kelvin: T) -> Result<Self, RamanError> {
        if !(kelvin >= T::zero()) {
            return Err(RamanError::NegativeTemperature(kelvin.as_f64()));
        }
        self.temperature = kelvin;
        Ok(self)
    }

    /// Detuning (Hz) of the gain maximum.
    pub fn peak_detuning(&self) -> T {
        self.peak_detuning
    }

    fn raw_shape(&self, delta: T) -> T {
        let delta = delta.abs();
        let raw = match &self.shape {
            RamanShape::DampedOscillator { tau1, tau2 } => {
                let w = T::TAU() * delta;
                let (a, b) = (T::one() / *tau2, T::one() / *tau1);
                let w0sq = a * a + b * b;
                let d = w0sq - w * w;
                b * (lit::<T>(2.0) * a * w) / (d * d + lit::<T>(4.0) * a * a * w * w)
            }
            RamanShape::Tabulated(rows) => interpolate(rows, delta),
        };
        raw * self.taper(delta)
    }

    fn taper(&self, delta: T) -> T {
        let hw = lit::<T>(TAPER_HALF_WIDTH);
        let x = (delta - (self.band_edge - hw)) / (hw + hw);
        if x <= T::zero() {
            T::one()
        } else if x >= T::one() {
            T::zero()
        } else {
            (T::one() + (T::PI() * x).cos()) / lit(2.0)
        }
    }

    // Dense scan, then golden-section refinement around the best sample.
    fn locate_peak(&self) -> (T, T) {
        let hi = self.band_edge + lit(TAPER_HALF_WIDTH);
        let n = 2000;
        let step = hi / T::from_usize_lossy(n);
        let mut best = (T::zero(), T::zero());
        for i in 1..=n {
            let d = step * T::from_usize_lossy(i);
            let v = self.raw_shape(d);
            if v > best.1 {
                best = (d, v);
            }
        }
        if let RamanShape::Tabulated(rows) = &self.shape {
            // piecewise linear, so the maximum sits on a node or the taper
            for &(d, _) in rows {
                let v = self.raw_shape(d);
                if v > best.1 {
                    best = (d, v);
                }
            }
            return best;
        }
        let (mut a, mut b) = ((best.0 - step).max(T::zero()), best.0 + step);
        let g = lit::<T>(0.618_033_988_749_895);
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if self.raw_shape(c) > self.raw_shape(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let d = (a + b) / lit(2.0);
        (d, self.raw_shape(d))
    }

    /// Normalized gain shape, 1 at the peak.
    pub fn shape_at(&self, delta: T) -> T {
        self.raw_shape(delta) / self.peak_value
    }
}

fn interpolate<T: Real>(rows: &[(T, T)], x: T) -> T {
    if x < rows[0].0 || x > rows[rows.len() - 1].0 {
        return T::zero();
    }
    let k = rows.partition_point(|r| r.0 <= x).clamp(1, rows.len() - 1);
    let (x0, y0) = rows[k - 1];
    let (x1, y1) = rows[k];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Area-scaled gain `g_peak · shape(Δ) · (𝒜_ref/𝒜) · (λ_ref/λ_pump)` (m/W).
pub fn raman_gain<T: Real>(model: &RamanModel<T>, delta: T, area: T, pump_wavelength: T) -> T {
    model.g_peak
        * model.shape_at(delta)
        * (model.reference_area / area)
        * (model.reference_wavelength / pump_wavelength)
}

/// Bose occupation `1/(e^{hΔ/k_BT} − 1)`; zero at `T = 0`.
pub fn thermal_occupation<T: Real>(delta: T, temperature: T) -> T {
    if temperature == T::zero() {
        return T::zero();
    }
    let x = lit::<T>(PLANCK) * delta.abs() / (lit::<T>(BOLTZMANN) * temperature);
    T::one() / x.exp_m1()
}

/// Raman photon flux (photons/s) into a filter of width `filter_bandwidth`
/// at detuning `delta` from the field of power `power`:
/// `Δν P L |g| [ρ + n_th] / 𝒜` with `ρ = 1` for Stokes and 0 for anti-Stokes.
#[allow(clippy::too_many_arguments)]
pub fn raman_flux<T: Real>(
    model: &RamanModel<T>,
    filter_bandwidth: T,
    power: T,
    length: T,
    delta: T,
    area: T,
    pump_wavelength: T,
    stokes: bool,
) -> Result<T, RamanError> {
    if delta == T::zero() {
        return Err(RamanError::ZeroDetuning(0.0));
    }
    if !(area > T::zero()) {
        return Err(RamanError::NonPositive("area", area.as_f64()));
    }
    let rho = if stokes { T::one() } else { T::zero() };
    let g = raman_gain(model, delta, area, pump_wavelength).abs();
    // the area scaling is carried by g; dividing by the reference area
    // leaves a single 1/𝒜
    Ok(
        filter_bandwidth * power * length * g * (rho + thermal_occupation(delta, model.temperature))
            / model.reference_area,
    )
}

fn sinc_sq<T: Real>(beta2: T, length: T, delta: T) -> T {
    let s = sinc(T::PI() * beta2 * length * delta);
    s * s
}

/// `(γ_SFWM P_sp L)² sinc²(π β₂ L Δ)` (photons/s/Hz).
pub fn sfwm_density<T: Real>(gamma_sfwm: T, single_pump_power: T, length: T, beta2: T, delta: T) -> T {
    let a = gamma_sfwm * single_pump_power * length;
    a * a * sinc_sq(beta2, length, delta)
}

/// `4 (γ √(P_p P_s) L)² sinc²(π β₂ L Δ)` (photons/s/Hz).
pub fn sstpdc_density<T: Real>(gamma: T, pump_power: T, seed_power: T, length: T, beta2: T, delta: T) -> T {
    let a = gamma * (pump_power * seed_power).sqrt() * length;
    lit::<T>(4.0) * a * a * sinc_sq(beta2, length, delta)
}

/// `ℱ ≈ 4 (𝒜_SFWM/𝒜) √(P_p/P_s)`.
pub fn figure_of_merit<T: Real>(area: T, area_sfwm: T, pump_power: T, seed_power: T) -> T {
    lit::<T>(4.0) * (area_sfwm / area) * (pump_power / seed_power).sqrt()
}

/// Single-pump power of the comparison SFWM source, `√(P_s P_p)`.
pub fn single_pump_power<T: Real>(pump_power: T, seed_power: T) -> T {
    (pump_power * seed_power).sqrt()
}

/// `P_sp 𝒜 / (P_s 𝒜_SFWM)`, the Raman suppression relative to SFWM.
pub fn suppression_ratio<T: Real>(area: T, area_sfwm: T, pump_power: T, seed_power: T) -> T {
    single_pump_power(pump_power, seed_power) * area / (seed_power * area_sfwm)
}

/// Everything needed to compare the two sources at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseInputs<T> {
    pub gamma: T,
    pub gamma_sfwm: T,
    pub area: T,
    pub area_sfwm: T,
    pub beta2: T,
    pub beta2_sfwm: T,
    pub pump_power: T,
    pub length: T,
    pub filter_bandwidth: T,
    /// Wavelength of the fields driving the Raman noise (the seed band).
    pub noise_wavelength: T,
}

/// One row of a noise sweep; densities in photons/s/Hz, Raman on the Stokes
/// side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseRow<T> {
    pub seed_power: T,
    pub detuning_hz: T,
    pub sfwm_signal: T,
    pub sstpdc_signal: T,
    pub raman_sfwm: T,
    pub raman_sstpdc: T,
    pub raman_sfwm_antistokes: T,
    pub raman_sstpdc_antistokes: T,
    pub snr_sfwm: T,
    pub snr_sstpdc: T,
    pub fom: T,
    pub fom_exact: T,
}

/// Evaluates both sources and their Raman floors at one seed power and
/// detuning.
pub fn noise_point<T: Real>(
    model: &RamanModel<T>,
    x: &NoiseInputs<T>,
    seed_power: T,
    delta: T,
) -> Result<NoiseRow<T>, RamanError> {
    if !(seed_power > T::zero()) {
        return Err(RamanError::NonPositive("seed power", seed_power.as_f64()));
    }
    let p_sp = single_pump_power(x.pump_power, seed_power);
    let sfwm = sfwm_density(x.gamma_sfwm, p_sp, x.length, x.beta2_sfwm, delta);
    let sstpdc = sstpdc_density(x.gamma, x.pump_power, seed_power, x.length, x.beta2, delta);
    let per_hz = |power: T, area: T, stokes: bool| {
        raman_flux(
            model,
            x.filter_bandwidth,
            power,
            x.length,
            delta,
            area,
            x.noise_wavelength,
            stokes,
        )
        .map(|f| f / x.filter_bandwidth)
    };
    let raman_sfwm = per_hz(p_sp, x.area_sfwm, true)?;
    let raman_sstpdc = per_hz(seed_power, x.area, true)?;
    let snr_sfwm = sfwm / raman_sfwm;
    let snr_sstpdc = sstpdc / raman_sstpdc;
    Ok(NoiseRow {
        seed_power,
        detuning_hz: delta,
        sfwm_signal: sfwm,
        sstpdc_signal: sstpdc,
        raman_sfwm,
        raman_sstpdc,
        raman_sfwm_antistokes: per_hz(p_sp, x.area_sfwm, false)?,
        raman_sstpdc_antistokes: per_hz(seed_power, x.area, false)?,
        snr_sfwm,
        snr_sstpdc,
        fom: figure_of_merit(x.area, x.area_sfwm, x.pump_power, seed_power),
        fom_exact: snr_sstpdc / snr_sfwm,
    })
}

/// Tabulates [`noise_point`] over every seed power and detuning, seed power
/// major.
pub fn noise_sweep<T: Real>(
    model: &RamanModel<T>,
    x: &NoiseInputs<T>,
    seed_powers: &[T],
    detunings: &[T],
) -> Result<Vec<NoiseRow<T>>, RamanError> {
    for w in seed_powers.windows(2).chain(detunings.windows(2)) {
        if !(w[1] > w[0]) {
            return Err(RamanError::Invalid("sweep ranges must be strictly increasing".into()));
        }
    }
    let mut rows = Vec::with_capacity(seed_powers.len() * detunings.len());
    for &p in seed_powers {
        for &d in detunings {
            rows.push(noise_point(model, x, p, d)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn silica_peak_near_thirteen_terahertz() {
        let m = RamanModel::<f64>::silica();
        assert!((m.peak_detuning() - 13.2e12).abs() < 0.5e12, "{}", m.peak_detuning());
        assert_relative_eq!(m.shape_at(m.peak_detuning()), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gain_vanishes_at_zero_and_far_detuning() {
        let m = RamanModel::<f64>::silica();
        assert_eq!(raman_gain(&m, 0.0, 84e-12, 1.55e-6), 0.0);
        assert_eq!(m.shape_at(375e12), 0.0);
        assert_eq!(m.shape_at(46e12), 0.0);
        assert!(m.shape_at(30e12) > 0.0);
    }

    #[test]
    fn smaller_area_raises_gain_proportionally() {
        let m = RamanModel::<f64>::silica();
        let d = 5e12;
        assert_relative_eq!(
            raman_gain(&m, d, 84e-12 / 17.0, 1.55e-6),
            17.0 * raman_gain(&m, d, 84e-12, 1.55e-6),
            max_relative = 1e-14
        );
    }

    #[test]
    fn thermal_ratio_matches_bose_factor() {
        let m = RamanModel::<f64>::silica();
        let d = 5e12;
        let s = raman_flux(&m, 1e11, 1.0, 0.01, d, 5e-12, 1.596e-6, true).unwrap();
        let a = raman_flux(&m, 1e11, 1.0, 0.01, d, 5e-12, 1.596e-6, false).unwrap();
        let n = 1.0 / ((PLANCK * d / (BOLTZMANN * 300.0)).exp() - 1.0);
        assert_relative_eq!(s / a, (1.0 + n) / n, max_relative = 1e-12);
    }

    #[test]
    fn zero_temperature_leaves_only_spontaneous_stokes() {
        let m = RamanModel::<f64>::silica().with_temperature(0.0).unwrap();
        let d = 10e12;
        assert_eq!(raman_flux(&m, 1e11, 1.0, 0.01, d, 5e-12, 1.55e-6, false).unwrap(), 0.0);
        let s = raman_flux(&m, 1e11, 1.0, 0.01, d, 5e-12, 1.55e-6, true).unwrap();
        let g = raman_gain(&m, d, 5e-12, 1.55e-6);
        assert_relative_eq!(s, 1e11 * 1.0 * 0.01 * g / m.reference_area, max_relative = 1e-14);
        assert!(raman_flux(&m, 1e11, 1.0, 0.01, 0.0, 5e-12, 1.55e-6, true).is_err());
    }

    #[test]
    fn densities_at_zero_detuning() {
        assert_relative_eq!(
            sfwm_density(0.5, 100.0, 0.01, -26.18e-27, 0.0),
            (0.5f64 * 100.0 * 0.01).powi(2)
        );
        assert_relative_eq!(
            sstpdc_density(0.5, 1e4, 1.0, 0.01, 2.344e-24, 0.0),
            4.0 * (0.5f64 * 100.0 * 0.01).powi(2)
        );
        assert_eq!(sstpdc_density(0.5, 1e4, 0.0, 0.01, 2.344e-24, 1e12), 0.0);
        // first null of the printed argument
        let b2 = 2.344e-24;
        assert!(sfwm_density(0.5, 100.0, 0.01, b2, 1.0 / (b2 * 0.01)) < 1e-30);
    }

    #[test]
    fn figure_of_merit_floor_and_power_law() {
        assert_eq!(figure_of_merit(84e-12, 84e-12, 1.0, 1.0), 4.0);
        let f1 = figure_of_merit(4.9e-12, 84e-12, 1e4, 1.0);
        let f4 = figure_of_merit(4.9e-12, 84e-12, 1e4, 4.0);
        assert_relative_eq!(f1 / f4, 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            suppression_ratio(4.9e-12, 84e-12, 1e4, 1.0),
            100.0 * 4.9 / 84.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn tabulated_shape_interpolates() {
        let m = RamanModel::new(
            RamanShape::Tabulated(vec![(0.0, 0.0), (10e12, 2.0), (20e12, 1.0)]),
            1e-13,
            1.55e-6,
            84e-12,
            300.0,
            40e12,
        )
        .unwrap();
        assert_relative_eq!(m.shape_at(5e12), 0.5);
        assert_eq!(m.shape_at(25e12), 0.0);
        assert!(RamanModel::new(
            RamanShape::Tabulated(vec![(1.0, 1.0)]),
            1e-13,
            1.55e-6,
            84e-12,
            300.0,
            40e12
        )
        .is_err());
    }
}
