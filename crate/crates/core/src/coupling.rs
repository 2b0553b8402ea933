//! Nonlinear overlap of four guided modes and the derived coupling
//! strengths.
//!
//! The inverse effective area is the vector overlap
//!
//! ```text
//! 1/𝒜 = ∫ n̄⁴ / (4χ̄ ε₀² n₁²n₂²n₃²n₄²) { w₁ (d₁·d₂)* (d₃*·f₄)
//!                                       + w₂ (d₁·d₃)* (d₂*·f₄)
//!                                       + w₃ (d₂·d₃)* (d₁*·f₄) } dA
//! ```
//!
//! with `w₁ = 2χ₁₁₂₂ + χ₁₂₁₂ + χ₁₂₂₁` and cyclic permutations. The
//! nonlinearity is confined to the core, so only core cells are visited.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::eps0;
use crate::modes::{GuidedMode, ModeId};
use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("{mode} is not normalized: ∫|d|²/(ε₀n²) dA = {integral}")]
    Unnormalized { mode: ModeId, integral: f64 },
    #[error("modes disagree on the core radius ({0} m vs {1} m)")]
    GeometryMismatch(f64, f64),
    #[error("overlap integral not converged at {cells}×{cells} cells (last change {change:.3e})")]
    NotConverged { cells: usize, change: f64 },
    #[error("invalid χ(3) model: {0}")]
    InvalidChi(String),
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
}

/// Third-order susceptibility of the core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi3Model<T> {
    /// Typical component magnitude χ̄ (m²/V²).
    pub chi_bar: T,
    /// χ₁₁₂₂ / χ̄
    pub xxyy: T,
    /// χ₁₂₁₂ / χ̄
    pub xyxy: T,
    /// χ₁₂₂₁ / χ̄
    pub xyyx: T,
    /// Typical refractive index n̄.
    pub n_bar: T,
}

impl<T: Real> Chi3Model<T> {
    /// Kleinman-symmetric isotropic medium, each independent component χ̄/3.
    pub fn isotropic(chi_bar: T, n_bar: T) -> Result<Self, CouplingError> {
        let third = T::one() / lit(3.0);
        Self::new(chi_bar, [third; 3], n_bar)
    }

    pub fn new(chi_bar: T, components: [T; 3], n_bar: T) -> Result<Self, CouplingError> {
        if !(chi_bar >= T::zero()) || !chi_bar.is_finite() {
            return Err(CouplingError::InvalidChi(format!("chi_bar = {chi_bar}")));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(CouplingError::InvalidChi("non-finite tensor component".into()));
        }
        if !(n_bar > T::zero()) {
            return Err(CouplingError::InvalidChi(format!("n_bar = {n_bar}")));
        }
        Ok(Self {
            chi_bar,
            xxyy: components[0],
            xyxy: components[1],
            xyyx: components[2],
            n_bar,
        })
    }

    /// Fused silica, χ̄ = 2.5e−22 m²/V², n̄ = 1.45.
    pub fn silica() -> Self {
        Self::isotropic(lit(2.5e-22), lit(1.45)).expect("valid constants")
    }

    /// Weights of the three pairings, in units of χ̄.
    pub fn pairing_weights(&self) -> [T; 3] {
        let two = lit::<T>(2.0);
        [
            two * self.xxyy + self.xyxy + self.xyyx,
            self.xxyy + two * self.xyxy + self.xyyx,
            self.xxyy + self.xyxy + two * self.xyyx,
        ]
    }
}

/// Result of one overlap evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveArea<T> {
    /// `1/|1/𝒜|` in m²; infinite when the overlap vanishes.
    pub value: T,
    /// Complex inverse area (1/m²).
    pub inverse_re: T,
    pub inverse_im: T,
    pub frequencies: [T; 4],
    pub modes: [ModeId; 4],
    /// Cells per side of the final Cartesian grid.
    pub cells: usize,
    pub half_width: T,
}

impl<T: Real> EffectiveArea<T> {
    pub fn inverse(&self) -> Complex<T> {
        Complex::new(self.inverse_re, self.inverse_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaOptions<T> {
    /// Cells per side of the first grid over the sampling window.
    pub initial_cells: usize,
    /// Relative change under doubling accepted as converged.
    pub tolerance: T,
    pub max_cells: usize,
}

impl<T: Real> Default for AreaOptions<T> {
    fn default() -> Self {
        Self {
            initial_cells: 256,
            tolerance: lit(1e-3),
            max_cells: 8192,
        }
    }
}

/// Square sampling window shared by all four modes.
pub fn common_half_width<T: Real>(modes: [&GuidedMode<T>; 4]) -> T {
    modes.iter().map(|m| m.sampling_half_width()).fold(T::zero(), T::max)
}

fn check_inputs<T: Real>(modes: [&GuidedMode<T>; 4]) -> Result<T, CouplingError> {
    let a = modes[0].radius();
    for m in modes {
        if (m.radius() - a).abs() > lit::<T>(1e-12) * a {
            return Err(CouplingError::GeometryMismatch(a.as_f64(), m.radius().as_f64()));
        }
        let integral = m.normalization_integral();
        if (integral - T::one()).abs() > lit(1e-6) {
            return Err(CouplingError::Unnormalized {
                mode: m.mode(),
                integral: integral.as_f64(),
            });
        }
    }
    Ok(a)
}

/// Inverse area on a fixed midpoint grid of `cells × cells` over
/// `[−half_width, half_width]²`.
pub fn inverse_area_on_grid<T: Real>(
    modes: [&GuidedMode<T>; 4],
    chi: &Chi3Model<T>,
    half_width: T,
    cells: usize,
) -> Result<Complex<T>, CouplingError> {
    let a = check_inputs(modes)?;
    Ok(inverse_area_unchecked(modes, chi, a, half_width, cells))
}

fn inverse_area_unchecked<T: Real>(
    modes: [&GuidedMode<T>; 4],
    chi: &Chi3Model<T>,
    a: T,
    half_width: T,
    cells: usize,
) -> Complex<T> {
    let h = lit::<T>(2.0) * half_width / T::from_usize_lossy(cells);
    let centre = |i: usize| -half_width + h * (T::from_usize_lossy(i) + lit(0.5));
    // only rows that can intersect the core
    let first = ((half_width - a) / h).floor().to_usize().unwrap_or(0);
    let last = (((half_width + a) / h).ceil().to_usize().unwrap_or(cells)).min(cells);
    let [w1, w2, w3] = chi.pairing_weights();
    let rows: Vec<Complex<T>> = (first..last)
        .into_par_iter()
        .map(|iy| {
            let y = centre(iy);
            let mut acc = Complex::new(T::zero(), T::zero());
            for ix in first..last {
                let x = centre(ix);
                if x * x + y * y >= a * a {
                    continue;
                }
                let d1 = modes[0].d_field(x, y);
                let d2 = modes[1].d_field(x, y);
                let d3 = modes[2].d_field(x, y);
                let f4 = modes[3].d_field(x, y);
                let t1 = dot(&d1, &d2).conj() * cdot(&d3, &f4);
                let t2 = dot(&d1, &d3).conj() * cdot(&d2, &f4);
                let t3 = dot(&d2, &d3).conj() * cdot(&d1, &f4);
                acc = acc + t1 * w1 + t2 * w2 + t3 * w3;
            }
            acc
        })
        .collect();
    let sum = rows.into_iter().fold(Complex::new(T::zero(), T::zero()), |s, r| s + r);
    let e0 = eps0::<T>();
    let mut denom = lit::<T>(4.0) * e0 * e0;
    for m in modes {
        let n = m.solution().core_index;
        denom = denom * n * n;
    }
    sum * (h * h * chi.n_bar.powi(4) / denom)
}

fn dot<T: Real>(a: &[Complex<T>; 3], b: &[Complex<T>; 3]) -> Complex<T> {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cdot<T: Real>(a: &[Complex<T>; 3], b: &[Complex<T>; 3]) -> Complex<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

/// Effective coupling area of three fundamental-band modes and one pump-band
/// mode, refining the grid by doubling until converged.
pub fn effective_area<T: Real>(
    modes: [&GuidedMode<T>; 4],
    chi: &Chi3Model<T>,
    opts: &AreaOptions<T>,
) -> Result<EffectiveArea<T>, CouplingError> {
    let a = check_inputs(modes)?;
    let half_width = common_half_width(modes);
    let mut cells = opts.initial_cells.max(2);
    let mut prev = inverse_area_unchecked(modes, chi, a, half_width, cells);
    let mut change = T::infinity();
    loop {
        if cells * 2 > opts.max_cells {
            return Err(CouplingError::NotConverged {
                cells,
                change: change.as_f64(),
            });
        }
        cells *= 2;
        let next = inverse_area_unchecked(modes, chi, a, half_width, cells);
        let scale = next.norm();
        change = if scale > T::zero() {
            (next - prev).norm() / scale
        } else {
            T::zero()
        };
        prev = next;
        if change <= opts.tolerance {
            break;
        }
    }
    Ok(finish(modes, prev, cells, half_width))
}

/// Single evaluation at a prescribed resolution, for callers that already
/// know a converged grid (e.g. interpolation sub-grids).
pub fn effective_area_fixed<T: Real>(
    modes: [&GuidedMode<T>; 4],
    chi: &Chi3Model<T>,
    half_width: T,
    cells: usize,
) -> Result<EffectiveArea<T>, CouplingError> {
    let inv = inverse_area_on_grid(modes, chi, half_width, cells)?;
    Ok(finish(modes, inv, cells, half_width))
}

fn finish<T: Real>(modes: [&GuidedMode<T>; 4], inv: Complex<T>, cells: usize, half_width: T) -> EffectiveArea<T> {
    let value = if inv.norm() > T::zero() {
        T::one() / inv.norm()
    } else {
        T::infinity()
    };
    // anything beyond a square millimetre means the fields barely touch
    if !(value < lit(1e-6)) {
        log::warn!("effective area {value} m² is vanishingly weak coupling; check mode orientation");
    }
    EffectiveArea {
        value,
        inverse_re: inv.re,
        inverse_im: inv.im,
        frequencies: modes.map(|m| m.omega()),
        modes: modes.map(|m| m.mode()),
        cells,
        half_width,
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<(), CouplingError> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(CouplingError::NonPositive(name, v.as_f64()))
    }
}

/// `γ = 3χ̄ω_s / (4ε₀ √(v_s³ v_p) n̄⁴ 𝒜)`.
pub fn gamma_sstpdc<T: Real>(
    chi: &Chi3Model<T>,
    omega_s: T,
    vg_seed: T,
    vg_pump: T,
    area: T,
) -> Result<T, CouplingError> {
    positive("seed frequency", omega_s)?;
    positive("seed group velocity", vg_seed)?;
    positive("pump group velocity", vg_pump)?;
    positive("effective area", area)?;
    let v = (vg_seed.powi(3) * vg_pump).sqrt();
    Ok(lit::<T>(3.0) * chi.chi_bar * omega_s / (lit::<T>(4.0) * eps0::<T>() * v * chi.n_bar.powi(4) * area))
}

/// `γ_SFWM = 3χ̄ω_s / (4ε₀ v_s² n̄⁴ 𝒜_SFWM)`.
pub fn gamma_sfwm<T: Real>(chi: &Chi3Model<T>, omega_s: T, vg_seed: T, area: T) -> Result<T, CouplingError> {
    gamma_sstpdc(chi, omega_s, vg_seed, vg_seed, area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::{omega_from_wavelength, SPEED_OF_LIGHT};
    use crate::modes::{mode_fields, FiberSpec, Orientation};
    use approx::assert_relative_eq;

    fn seed_mode() -> GuidedMode<f64> {
        let f = FiberSpec::silica_in_air(0.790e-6).unwrap();
        mode_fields(&f, ModeId::HE11, omega_from_wavelength(1.596e-6), Orientation::Even).unwrap()
    }

    #[test]
    fn isotropic_weights_are_equal() {
        let w = Chi3Model::<f64>::silica().pairing_weights();
        for v in w {
            assert_relative_eq!(v, 4.0 / 3.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn gamma_scalings() {
        let chi = Chi3Model::<f64>::silica();
        let ws = omega_from_wavelength(1.596e-6);
        let (vs, vp) = (SPEED_OF_LIGHT / 1.396, SPEED_OF_LIGHT / 1.695);
        let g = gamma_sstpdc(&chi, ws, vs, vp, 4.9e-12).unwrap();
        assert_relative_eq!(
            gamma_sstpdc(&chi, ws, vs, vp, 9.8e-12).unwrap(),
            g / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gamma_sstpdc(&chi, ws, 4.0 * vs, vp, 4.9e-12).unwrap(),
            g / 8.0,
            max_relative = 1e-14
        );
        assert_eq!(
            gamma_sfwm(&chi, ws, vs, 4.9e-12).unwrap(),
            gamma_sstpdc(&chi, ws, vs, vs, 4.9e-12).unwrap()
        );
        let zero = Chi3Model::isotropic(0.0, 1.45).unwrap();
        assert_eq!(gamma_sfwm(&zero, ws, vs, 84e-12).unwrap(), 0.0);
        assert!(gamma_sstpdc(&chi, ws, vs, vp, 0.0).is_err());
    }

    #[test]
    fn vanishing_susceptibility_gives_infinite_area() {
        let m = seed_mode();
        let chi = Chi3Model::new(2.5e-22, [0.0; 3], 1.45).unwrap();
        let a = effective_area_fixed([&m, &m, &m, &m], &chi, m.radius() * 1.1, 64).unwrap();
        assert_eq!(a.inverse(), Complex::new(0.0, 0.0));
        assert!(a.value.is_infinite());
    }

    #[test]
    fn unnormalized_field_is_rejected() {
        let m = seed_mode();
        let bad = m.scaled(1.01);
        let e = effective_area([&m, &m, &bad, &m], &Chi3Model::silica(), &AreaOptions::default()).unwrap_err();
        assert!(matches!(e, CouplingError::Unnormalized { .. }));
    }

    #[test]
    fn orthogonal_polarizations_do_not_couple() {
        let f = FiberSpec::silica_in_air(0.790e-6).unwrap();
        let w = omega_from_wavelength(1.596e-6);
        let even = mode_fields(&f, ModeId::HE11, w, Orientation::Even).unwrap();
        let odd = mode_fields(&f, ModeId::HE11, w, Orientation::Odd).unwrap();
        let same = inverse_area_on_grid([&even, &even, &even, &even], &Chi3Model::silica(), 0.5e-6, 128).unwrap();
        let cross = inverse_area_on_grid([&even, &even, &even, &odd], &Chi3Model::silica(), 0.5e-6, 128).unwrap();
        assert!(cross.norm() < 1e-12 * same.norm());
    }
}
