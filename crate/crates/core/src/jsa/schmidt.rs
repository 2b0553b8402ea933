//! Schmidt decomposition and spectral width of a sampled JSA.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::compute::JsaGrid;
use super::JsaError;
use crate::scalar::{lit, Real};

const NORM_TOLERANCE: f64 = 1e-6;

fn check_norm<T: Real>(grid: &JsaGrid<T>) -> Result<(), JsaError> {
    let n = grid.norm();
    if (n - T::one()).abs() > lit(NORM_TOLERANCE) {
        return Err(JsaError::NotNormalized(n.as_f64()));
    }
    Ok(())
}

/// `M_ij = √w_i Φ_ij √w_j` in double precision.
pub fn weighted_matrix<T: Real>(grid: &JsaGrid<T>) -> DMatrix<Complex<f64>> {
    let n = grid.cells();
    let w = grid.step.as_f64();
    DMatrix::from_fn(n, n, |i, j| {
        let a = grid.at(i, j);
        Complex::new(a.re.as_f64() * w, a.im.as_f64() * w)
    })
}

/// `K = 1/Σλ²` with `λ_n = σ_n²/Σσ²` from the singular values of the
/// weighted amplitude matrix.
pub fn schmidt_number<T: Real>(grid: &JsaGrid<T>) -> Result<T, JsaError> {
    check_norm(grid)?;
    let sv = weighted_matrix(grid).singular_values();
    let total: f64 = sv.iter().map(|s| s * s).sum();
    let purity: f64 = sv.iter().map(|s| (s * s / total).powi(2)).sum();
    Ok(lit(1.0 / purity))
}

/// Same quantity from the purity of the reduced state, `K = (tr ρ)²/tr ρ²`
/// with `ρ = M M†`; independent of the SVD.
pub fn schmidt_number_purity<T: Real>(grid: &JsaGrid<T>) -> Result<T, JsaError> {
    check_norm(grid)?;
    let m = weighted_matrix(grid);
    let rho = &m * m.adjoint();
    let trace: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
    let tr2: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    Ok(lit(trace * trace / tr2))
}

/// FWHM (Hz) of the single-photon marginal, with linear interpolation
/// between cells.
pub fn generation_bandwidth<T: Real>(grid: &JsaGrid<T>) -> Result<T, JsaError> {
    check_norm(grid)?;
    let rho = grid.marginal();
    let n = rho.len();
    let peak = rho.iter().copied().fold(T::zero(), T::max);
    let half = peak / lit(2.0);
    let first = rho
        .iter()
        .position(|&r| r >= half)
        .ok_or(JsaError::BandwidthTruncated)?;
    let last = rho
        .iter()
        .rposition(|&r| r >= half)
        .ok_or(JsaError::BandwidthTruncated)?;
    if first == 0 || last == n - 1 {
        return Err(JsaError::BandwidthTruncated);
    }
    let cross = |a: usize, b: usize| {
        let (wa, wb) = (grid.axis[a], grid.axis[b]);
        wa + (half - rho[a]) * (wb - wa) / (rho[b] - rho[a])
    };
    let lo = cross(first - 1, first);
    let hi = cross(last, last + 1);
    Ok((hi - lo) / T::TAU())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss(x: f64, s: f64) -> f64 {
        (-x * x / (2.0 * s * s)).exp()
    }

    #[test]
    fn separable_state_has_unit_schmidt_number() {
        let g = JsaGrid::from_fn(0.0, 5.0, 96, |a: f64, b: f64| {
            Complex::new(gauss(a, 1.0) * gauss(b, 1.0), 0.0)
        })
        .unwrap();
        assert!((schmidt_number(&g).unwrap() - 1.0).abs() < 1e-9);
        assert!((schmidt_number_purity(&g).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_orthogonal_terms_give_two() {
        // f0 even, f1 odd: orthogonal on a symmetric grid
        let f0 = |x: f64| gauss(x, 1.0);
        let f1 = |x: f64| x * gauss(x, 1.0);
        let n0: f64 = 1.0;
        let n1: f64 = 1.0 / 2f64.sqrt(); // ∫x²e^{-x²} / ∫e^{-x²} = 1/2
        let g = JsaGrid::from_fn(0.0, 8.0, 128, |a: f64, b: f64| {
            Complex::new(f0(a) * f0(b) / (n0 * n0) + f1(a) * f1(b) / (n1 * n1), 0.0)
        })
        .unwrap();
        assert!((schmidt_number(&g).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_marginal_width() {
        // |Φ|² ∝ exp(−a²/σ²) exp(−b²/σ²) gives a marginal of width σ/√2
        let sigma = 2.0 * std::f64::consts::PI * 0.7;
        let g = JsaGrid::from_fn(0.0, 6.0 * sigma, 200, |a: f64, b: f64| {
            Complex::new((-(a * a + b * b) / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .unwrap();
        let s_marginal = sigma / 2f64.sqrt();
        let want = 2.0 * (2.0 * 2f64.ln()).sqrt() * s_marginal / std::f64::consts::TAU;
        let got = generation_bandwidth(&g).unwrap();
        assert!((got - want).abs() < g.step / std::f64::consts::TAU);
        assert_relative_eq!(got, want, max_relative = 1e-3);
    }

    #[test]
    fn unnormalized_grid_is_rejected() {
        let mut g = JsaGrid::from_fn(0.0, 5.0, 64, |a: f64, b: f64| {
            Complex::new(gauss(a, 1.0) * gauss(b, 1.0), 0.0)
        })
        .unwrap();
        g.amplitude.iter_mut().for_each(|a| *a *= 1.1);
        assert!(matches!(schmidt_number(&g), Err(JsaError::NotNormalized(_))));
    }

    #[test]
    fn truncated_marginal_is_reported() {
        let g = JsaGrid::from_fn(0.0, 1.0, 64, |a: f64, b: f64| {
            Complex::new(gauss(a, 5.0) * gauss(b, 5.0), 0.0)
        })
        .unwrap();
        assert_eq!(generation_bandwidth(&g), Err(JsaError::BandwidthTruncated));
    }
}
