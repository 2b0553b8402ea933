//! Joint spectral amplitude on a square frequency grid.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::dispersion::PhaseModel;
use super::schmidt::{generation_bandwidth, schmidt_number};
use super::{g2_zero, sinc, JsaError, PulseSpec};
use crate::consts::{eps0, hbar};
use crate::coupling::Chi3Model;
use crate::quadrature::Rule;
use crate::scalar::{lit, Real};

/// Sampling of the two generated-photon axes and the seed integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    /// Cells per axis; a lower bound when the span is chosen automatically.
    pub cells: usize,
    /// Half-width of each axis about the degenerate frequency (rad/s), or
    /// `None` to size it from the phasematching and pump bandwidths.
    pub half_span: Option<T>,
    /// Gauss–Legendre nodes of the seed integral.
    pub inner_nodes: usize,
    /// Half-width of the seed integral in units of `1/τ_s`.
    pub inner_width: T,
    /// Sub-grid size per axis on which a sampled area is evaluated.
    pub area_nodes: usize,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            cells: 1024,
            half_span: None,
            inner_nodes: 64,
            inner_width: lit(6.0),
            area_nodes: 8,
        }
    }
}

/// Inverse effective area `1/𝒜(ω₁, ω₂)` (1/m²) with the seed photon at its
/// centre frequency and the pump photon at `ω₁ + ω₂ + ω_s`.
pub type InverseAreaFn<'a, T> = dyn Fn(T, T) -> Result<Complex<T>, JsaError> + Sync + 'a;

pub enum AreaSpec<'a, T> {
    /// Frequency-independent area (m²).
    Constant(T),
    /// Sampled on a coarse sub-grid and bilinearly interpolated.
    Sampled(&'a InverseAreaFn<'a, T>),
}

pub struct JsaProblem<'a, T> {
    pub seed: PulseSpec<T>,
    pub pump: PulseSpec<T>,
    /// Interaction length (m).
    pub length: T,
    pub chi: Chi3Model<T>,
    pub phase: &'a PhaseModel<T>,
    pub area: AreaSpec<'a, T>,
    pub grid: GridSpec<T>,
    /// Freeze √ω, v_g and 𝒜 at the band centres.
    pub frozen_factors: bool,
}

/// Normalized JSA sampled at cell midpoints of a uniform square grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid<T> {
    /// Frequency at the middle of each axis (rad/s).
    pub center: T,
    /// Cell width (rad/s); also the quadrature weight of every node.
    pub step: T,
    /// Absolute frequencies of the cell midpoints (rad/s).
    pub axis: Vec<T>,
    /// Row-major `Φ(ω₁ = axis[i], ω₂ = axis[j])`.
    pub amplitude: Vec<Complex<T>>,
    /// Pair probability per pulse.
    pub eta2: T,
}

impl<T: Real> JsaGrid<T> {
    /// Samples `f` on `cells` midpoints of `[center − half_span, center + half_span]`
    /// and normalizes; `eta2` records the discrete norm before scaling.
    pub fn from_fn<F: Fn(T, T) -> Complex<T>>(center: T, half_span: T, cells: usize, f: F) -> Result<Self, JsaError> {
        let (axis, step) = midpoint_axis(center, half_span, cells);
        let mut amplitude = Vec::with_capacity(cells * cells);
        for &w1 in &axis {
            for &w2 in &axis {
                amplitude.push(f(w1, w2));
            }
        }
        let eta2 = discrete_norm(&amplitude, step);
        if !(eta2 > T::zero()) {
            return Err(JsaError::NotNormalized(eta2.as_f64()));
        }
        let s = T::one() / eta2.sqrt();
        amplitude.iter_mut().for_each(|a| *a = *a * s);
        Ok(Self {
            center,
            step,
            axis,
            amplitude,
            eta2,
        })
    }

    pub fn cells(&self) -> usize {
        self.axis.len()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.amplitude[i * self.cells() + j]
    }

    /// `Σ w_i w_j |Φ_ij|²`.
    pub fn norm(&self) -> T {
        discrete_norm(&self.amplitude, self.step)
    }

    pub fn max_abs(&self) -> T {
        self.amplitude.iter().map(|a| a.norm()).fold(T::zero(), T::max)
    }

    /// `max |Φ_ij − Φ_ji|`.
    pub fn symmetry_defect(&self) -> T {
        let n = self.cells();
        let mut worst = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.at(i, j) - self.at(j, i)).norm());
            }
        }
        worst
    }

    /// `ρ(ω₁) = Σ_j w_j |Φ(ω₁, ω₂_j)|²`.
    pub fn marginal(&self) -> Vec<T> {
        marginal(&self.amplitude, self.cells(), self.step)
    }
}

fn midpoint_axis<T: Real>(center: T, half_span: T, cells: usize) -> (Vec<T>, T) {
    let step = lit::<T>(2.0) * half_span / T::from_usize_lossy(cells);
    let axis = (0..cells)
        .map(|i| center + (-half_span + step * (T::from_usize_lossy(i) + lit(0.5))))
        .collect();
    (axis, step)
}

fn discrete_norm<T: Real>(a: &[Complex<T>], step: T) -> T {
    a.iter().fold(T::zero(), |s, v| s + v.norm_sqr()) * step * step
}

fn marginal<T: Real>(a: &[Complex<T>], n: usize, step: T) -> Vec<T> {
    a.chunks(n)
        .map(|row| row.iter().fold(T::zero(), |s, v| s + v.norm_sqr()) * step)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMetrics<T> {
    pub eta2: T,
    pub schmidt_number: T,
    pub g2: T,
    pub bandwidth_hz: T,
}

#[derive(Debug, Clone)]
pub struct JsaOutcome<T> {
    pub grid: JsaGrid<T>,
    pub metrics: PairMetrics<T>,
    /// Axis half-width actually used (rad/s).
    pub half_span: T,
    /// Marginal at the grid edge relative to its peak.
    pub edge_ratio: T,
    /// Set when η² exceeds 0.1 and first-order theory is strained.
    pub first_order_warning: bool,
}

const TRUNCATION_LIMIT: f64 = 1e-3;
const RIDGE_CELLS: f64 = 1.5;
const MAX_SPAN_GROWTH: usize = 8;

/// Row-major amplitudes, axis frequencies and axis step.
pub type RawAmplitude<T> = (Vec<Complex<T>>, Vec<T>, T);

/// Unnormalized amplitude `Φ̃` on a fixed grid, together with its axis and
/// step. Exposed for diagnostics; [`compute_jsa`] is the normal entry point.
pub fn amplitude_on_grid<T: Real>(
    p: &JsaProblem<'_, T>,
    half_span: T,
    cells: usize,
) -> Result<RawAmplitude<T>, JsaError> {
    let center = degenerate_frequency(p);
    let (axis, step) = midpoint_axis(center, half_span, cells);
    let phase = p.phase;
    let (ws, wp) = (p.seed.omega0(), p.pump.omega0());

    let sqrt_ratio = |w: T, k1: T| (w * k1).sqrt();
    let mut ks = Vec::with_capacity(cells);
    let mut fac = Vec::with_capacity(cells);
    let frozen_axis = sqrt_ratio(center, phase.k1_seed(center)?);
    for &w in &axis {
        ks.push(phase.k_seed(w)?);
        fac.push(if p.frozen_factors {
            frozen_axis
        } else {
            sqrt_ratio(w, phase.k1_seed(w)?)
        });
    }

    let inner_half = p.grid.inner_width / p.seed.duration;
    let rule = Rule::gauss_legendre(p.grid.inner_nodes, ws - inner_half, ws + inner_half);
    let m = rule.len();
    let frozen_seed = sqrt_ratio(ws, phase.k1_seed(ws)?);
    let mut kq = Vec::with_capacity(m);
    let mut gq = Vec::with_capacity(m);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        kq.push(phase.k_seed(x)?);
        let s = if p.frozen_factors {
            frozen_seed
        } else {
            sqrt_ratio(x, phase.k1_seed(x)?)
        };
        gq.push(w * p.seed.spectral_profile(x) * s);
    }

    // Pump quantities depend on i + j only.
    let sums = 2 * cells - 1;
    let frozen_pump = sqrt_ratio(wp, phase.pump_band.k1(wp)?);
    let mut kp = Vec::with_capacity(sums * m);
    let mut pg = Vec::with_capacity(sums * m);
    let two_center = center + center;
    for s in 0..sums {
        let offset = -(half_span + half_span) + step * T::from_usize_lossy(s + 1);
        for (&node, &weight) in rule.nodes.iter().zip(&gq) {
            let big = (two_center + node) + offset;
            kp.push(phase.k_pump(big)?);
            let sr = if p.frozen_factors {
                frozen_pump
            } else {
                sqrt_ratio(big, phase.pump_band.k1(big)?)
            };
            pg.push(p.pump.spectral_profile(big) * sr * weight);
        }
    }

    let inverse_area = AreaTable::build(p, center, half_span, &axis)?;

    let alpha = p.seed.photon_number().sqrt();
    let beta = p.pump.photon_number().sqrt();
    let prefactor = lit::<T>(3.0) * lit::<T>(2.0).sqrt() * alpha * beta * hbar::<T>()
        / (lit::<T>(8.0) * T::PI() * eps0::<T>())
        * p.chi.chi_bar
        / p.chi.n_bar.powi(4)
        * p.length;
    let half_l = p.length / lit(2.0);

    let upper: Vec<Vec<Complex<T>>> = (0..cells)
        .into_par_iter()
        .map(|i| {
            (i..cells)
                .map(|j| {
                    let s = i + j;
                    let ksum = ks[i] + ks[j];
                    let row_k = &kp[s * m..(s + 1) * m];
                    let row_w = &pg[s * m..(s + 1) * m];
                    let mut acc = T::zero();
                    for q in 0..m {
                        let dk = row_k[q] - ksum - kq[q];
                        acc = acc + row_w[q] * sinc(dk * half_l);
                    }
                    let v = prefactor * fac[i] * fac[j] * acc;
                    Complex::new(T::zero(), v) * inverse_area.at(i, j)
                })
                .collect()
        })
        .collect();

    let mut amplitude = vec![Complex::new(T::zero(), T::zero()); cells * cells];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            amplitude[i * cells + j] = v;
            amplitude[j * cells + i] = v;
        }
    }
    Ok((amplitude, axis, step))
}

fn degenerate_frequency<T: Real>(p: &JsaProblem<'_, T>) -> T {
    (p.pump.omega0() - p.seed.omega0()) / lit(2.0)
}

enum AreaTable<T> {
    Uniform(Complex<T>),
    Bilinear {
        nodes: usize,
        /// fractional sub-grid coordinate of each axis cell
        coord: Vec<(usize, T)>,
        values: Vec<Complex<T>>,
    },
}

impl<T: Real> AreaTable<T> {
    fn build(p: &JsaProblem<'_, T>, center: T, half_span: T, axis: &[T]) -> Result<Self, JsaError> {
        match &p.area {
            AreaSpec::Constant(a) => {
                if !(*a > T::zero()) {
                    return Err(JsaError::Area(format!("area {a} must be positive")));
                }
                Ok(Self::Uniform(Complex::new(T::one() / *a, T::zero())))
            }
            AreaSpec::Sampled(f) if p.frozen_factors => Ok(Self::Uniform(f(center, center)?)),
            AreaSpec::Sampled(f) => {
                let n = p.grid.area_nodes.max(2);
                let lo = center - half_span;
                let h = (half_span + half_span) / T::from_usize_lossy(n - 1);
                let node = |a: usize| lo + h * T::from_usize_lossy(a);
                let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
                let vals = pairs
                    .par_iter()
                    .map(|&(a, b)| f(node(a), node(b)))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut values = vec![Complex::new(T::zero(), T::zero()); n * n];
                for (&(a, b), v) in pairs.iter().zip(vals) {
                    values[a * n + b] = v;
                    values[b * n + a] = v;
                }
                let coord = axis
                    .iter()
                    .map(|&w| {
                        let x = ((w - lo) / h).max(T::zero()).min(T::from_usize_lossy(n - 1));
                        let k = x.floor().to_usize().unwrap_or(0).min(n - 2);
                        (k, x - T::from_usize_lossy(k))
                    })
                    .collect();
                Ok(Self::Bilinear {
                    nodes: n,
                    coord,
                    values,
                })
            }
        }
    }

    // Called with i <= j only; the caller mirrors.
    fn at(&self, i: usize, j: usize) -> Complex<T> {
        match self {
            Self::Uniform(v) => *v,
            Self::Bilinear { nodes, coord, values } => {
                let (a, ta) = coord[i];
                let (b, tb) = coord[j];
                let v = |x: usize, y: usize| values[x * nodes + y];
                let one = T::one();
                v(a, b) * ((one - ta) * (one - tb))
                    + v(a + 1, b) * (ta * (one - tb))
                    + v(a, b + 1) * ((one - ta) * tb)
                    + v(a + 1, b + 1) * (ta * tb)
            }
        }
    }
}

/// Axis half-width expected to contain the phasematched band: the sinc
/// argument reaches ~32 at the edge, with the pump-limited walk-off term
/// included.
pub fn estimate_half_span<T: Real>(p: &JsaProblem<'_, T>) -> Result<T, JsaError> {
    let phase = p.phase;
    let (ws, wp) = (p.seed.omega0(), p.pump.omega0());
    let walk_off = (phase.pump_band.k1(wp)? - phase.k1_seed(ws)?).abs();
    let beta2 = phase.beta2_seed()?.abs();
    let pump_band = lit::<T>(3.0) / p.pump.duration;
    let fallback = T::TAU() * lit(6e12);
    if !(beta2 > T::zero()) {
        return Ok(fallback);
    }
    let x = lit::<T>(32.0);
    let delta = ((lit::<T>(2.0) * x / p.length + walk_off * pump_band) / beta2).sqrt();
    Ok(delta.max(lit::<T>(4.0) / p.pump.duration))
}

/// Cells needed to resolve the pump ridge, whose intensity FWHM along either
/// axis is `2√ln2/τ_p`, with 1.5 cells per width.
fn cells_for_ridge<T: Real>(p: &JsaProblem<'_, T>, half_span: T) -> usize {
    let limit = ridge_limit(p);
    let n = (lit::<T>(2.0) * half_span / limit)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX);
    n.div_ceil(2) * 2
}

fn ridge_limit<T: Real>(p: &JsaProblem<'_, T>) -> T {
    lit::<T>(2.0) * lit::<T>(2.0).ln().sqrt() / p.pump.duration / lit(RIDGE_CELLS)
}

fn validate<T: Real>(p: &JsaProblem<'_, T>) -> Result<(), JsaError> {
    if p.grid.cells < 64 {
        return Err(JsaError::InvalidGrid(format!(
            "{} cells per axis; at least 64 required",
            p.grid.cells
        )));
    }
    if p.grid.inner_nodes == 0 {
        return Err(JsaError::InvalidGrid("inner integral needs at least one node".into()));
    }
    if !(p.grid.inner_width > T::zero()) {
        return Err(JsaError::InvalidGrid("inner integral width must be positive".into()));
    }
    if let Some(s) = p.grid.half_span {
        if !(s > T::zero()) {
            return Err(JsaError::InvalidGrid(format!("half span {s} must be positive")));
        }
    }
    if !(p.length > T::zero()) {
        return Err(JsaError::InvalidGrid(format!(
            "interaction length {} must be positive",
            p.length
        )));
    }
    Ok(())
}

/// Full numerical JSA, normalized, with its pair metrics.
pub fn compute_jsa<T: Real>(p: &JsaProblem<'_, T>) -> Result<JsaOutcome<T>, JsaError> {
    validate(p)?;
    let auto = p.grid.half_span.is_none();
    let mut half_span = match p.grid.half_span {
        Some(s) => s,
        None => estimate_half_span(p)?,
    };
    let mut attempt = 0;
    loop {
        let needed = cells_for_ridge(p, half_span);
        let cells = if auto { p.grid.cells.max(needed) } else { p.grid.cells };
        if cells < needed {
            let step = lit::<T>(2.0) * half_span / T::from_usize_lossy(cells);
            return Err(JsaError::UnderResolved {
                step_ghz: (step / T::TAU()).as_f64() * 1e-9,
                limit_ghz: (ridge_limit(p) / T::TAU()).as_f64() * 1e-9,
                cells_needed: needed,
            });
        }
        let (raw, axis, step) = amplitude_on_grid(p, half_span, cells)?;
        let rho = marginal(&raw, cells, step);
        let peak = rho.iter().copied().fold(T::zero(), T::max);
        let eta2 = discrete_norm(&raw, step);
        if !(eta2 > T::zero()) {
            return Err(JsaError::NotNormalized(0.0));
        }
        let edge_ratio = rho[0].max(rho[cells - 1]) / peak;
        if edge_ratio > lit(TRUNCATION_LIMIT) {
            attempt += 1;
            if auto && attempt <= MAX_SPAN_GROWTH {
                half_span = half_span * lit(4.0 / 3.0);
                continue;
            }
            return Err(JsaError::Truncation {
                edge_ratio: edge_ratio.as_f64(),
                span_thz: (half_span / T::TAU()).as_f64() * 1e-12,
            });
        }
        if eta2 > lit(0.5) {
            return Err(JsaError::FirstOrderInvalid { eta2: eta2.as_f64() });
        }
        let first_order_warning = eta2 > lit(0.1);
        if first_order_warning {
            log::warn!("pair probability {eta2} per pulse: first-order theory is strained");
        }
        let scale = T::one() / eta2.sqrt();
        let grid = JsaGrid {
            center: degenerate_frequency(p),
            step,
            axis,
            amplitude: raw.into_iter().map(|a| a * scale).collect(),
            eta2,
        };
        let k = schmidt_number(&grid)?;
        let metrics = PairMetrics {
            eta2,
            schmidt_number: k,
            g2: g2_zero(k)?,
            bandwidth_hz: generation_bandwidth(&grid)?,
        };
        return Ok(JsaOutcome {
            grid,
            metrics,
            half_span,
            edge_ratio,
            first_order_warning,
        });
    }
}
