//! Design, JSA and noise computations driven by a [`Config`].

use num_complex::Complex;
use pairgen::consts::{c, omega_from_wavelength, wavelength_from_omega};
use pairgen::coupling::{
    effective_area, gamma_sfwm, gamma_sstpdc, inverse_area_on_grid, AreaOptions, CouplingError, EffectiveArea,
};
use pairgen::jsa::{
    compute_jsa, pair_probability_closed_form, AreaSpec, BandDispersion, GridSpec, JsaError, JsaOutcome, JsaProblem,
    PhaseModel, PulseSpec,
};
use pairgen::modes::{
    dispersion_at, find_phasematch_diameter, mode_fields, solve_neff, FiberSpec, GuidedMode, ModeDispersion, ModeError,
    ModeId, Orientation, PhasematchModes,
};
use pairgen::raman::{noise_point, noise_sweep, raman_gain, suppression_ratio, NoiseInputs, NoiseRow, RamanError};
use serde::Serialize;
use thiserror::Error;

use crate::config::{AreaConfig, Config, DispersionModel};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Jsa(#[from] JsaError),
    #[error(transparent)]
    Raman(#[from] RamanError),
    #[error("dispersion table: {0}")]
    Table(#[from] pairgen::chebyshev::OutOfInterval),
}

/// Solved geometry with the mode properties at the band centres.
#[derive(Debug, Clone)]
pub struct Design {
    pub fiber: FiberSpec<f64>,
    pub modes: PhasematchModes,
    pub omega_seed: f64,
    pub omega_pump: f64,
    pub seed: ModeDispersion<f64>,
    pub pump: ModeDispersion<f64>,
    pub seed_field: GuidedMode<f64>,
    pub pump_field: GuidedMode<f64>,
    pub area: EffectiveArea<f64>,
    /// Bulk core index at the seed and pump centres.
    pub bulk_seed: f64,
    pub bulk_pump: f64,
    /// Nonlinear coefficient from the solved group velocities and area.
    pub gamma: f64,
    /// Same for the conventional SFWM reference fiber.
    pub gamma_sfwm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub diameter_um: f64,
    pub pump_mode: String,
    pub seed_mode: String,
    pub neff_pump: f64,
    pub neff_seed: f64,
    pub n_bulk_pump: f64,
    pub n_bulk_seed: f64,
    pub ng_seed: f64,
    pub ng_pump: f64,
    pub beta2_seed_ps2km: f64,
    pub beta2_pump_ps2km: f64,
    #[serde(rename = "A_um2")]
    pub a_um2: f64,
    pub gamma: f64,
    pub gamma_sfwm: f64,
}

impl Design {
    pub fn report(&self) -> DesignReport {
        DesignReport {
            diameter_um: self.fiber.diameter() * 1e6,
            pump_mode: self.modes.pump.to_string(),
            seed_mode: self.modes.seed.to_string(),
            neff_pump: self.pump.n_eff,
            neff_seed: self.seed.n_eff,
            n_bulk_pump: self.bulk_pump,
            n_bulk_seed: self.bulk_seed,
            ng_seed: self.seed.group_index,
            ng_pump: self.pump.group_index,
            beta2_seed_ps2km: self.seed.beta2 * 1e27,
            beta2_pump_ps2km: self.pump.beta2 * 1e27,
            a_um2: self.area.value * 1e12,
            gamma: self.gamma,
            gamma_sfwm: self.gamma_sfwm,
        }
    }
}

/// Phasematches (unless the diameter is fixed), then evaluates dispersion,
/// the overlap area and the nonlinear coefficients.
pub fn design(cfg: &Config) -> Result<Design, PipelineError> {
    let omega_seed = omega_from_wavelength(cfg.seed.wavelength);
    let omega_pump = omega_from_wavelength(cfg.pump.wavelength);
    let modes = PhasematchModes {
        pump: cfg.fiber.pump_mode,
        seed: cfg.fiber.seed_mode,
    };
    let diameter = match cfg.fiber.diameter {
        Some(d) => d,
        None => find_phasematch_diameter(
            &cfg.core,
            cfg.cladding_index,
            omega_pump,
            omega_seed,
            cfg.fiber.search,
            modes,
        )?,
    };
    let fiber = FiberSpec::new(diameter, cfg.core.clone(), cfg.cladding_index)?;
    let seed = dispersion_at(&fiber, modes.seed, omega_seed)?;
    let pump = dispersion_at(&fiber, modes.pump, omega_pump)?;
    let seed_field = mode_fields(&fiber, modes.seed, omega_seed, Orientation::Even)?;

    // which pump orientation couples to an even seed depends on the mode
    // family; pick it on a coarse grid, then converge that one
    let half_width = pairgen::coupling::common_half_width([&seed_field, &seed_field, &seed_field, &seed_field]);
    let mut best: Option<(GuidedMode<f64>, f64)> = None;
    for o in [Orientation::Even, Orientation::Odd] {
        let p = mode_fields(&fiber, modes.pump, omega_pump, o)?;
        let strength =
            inverse_area_on_grid([&seed_field, &seed_field, &seed_field, &p], &cfg.chi, half_width, 256)?.norm();
        if best.as_ref().is_none_or(|(_, b)| strength > *b) {
            best = Some((p, strength));
        }
    }
    let (pump_field, _) = best.expect("two orientations tried");
    let area = effective_area(
        [&seed_field, &seed_field, &seed_field, &pump_field],
        &cfg.chi,
        &AreaOptions::default(),
    )?;
    let gamma = gamma_sstpdc(
        &cfg.chi,
        omega_seed,
        seed.group_velocity,
        pump.group_velocity,
        area.value,
    )?;
    let gamma_sfwm = reference_gamma(cfg, omega_seed)?;
    let bulk_seed = fiber.core_index(omega_seed)?;
    let bulk_pump = fiber.core_index(omega_pump)?;
    Ok(Design {
        fiber,
        modes,
        omega_seed,
        omega_pump,
        seed,
        pump,
        seed_field,
        pump_field,
        area,
        bulk_seed,
        bulk_pump,
        gamma,
        gamma_sfwm,
    })
}

/// One sample of an effective-index curve around a band centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCurveRow {
    pub band: &'static str,
    pub mode: String,
    pub wavelength_nm: f64,
    pub n_eff: f64,
    pub n_bulk: f64,
}

/// Points per band in the effective-index dump.
pub const CURVE_POINTS: usize = 41;

/// Effective and bulk indices of both modes across the band tables used in
/// exact dispersion mode, for inspecting the solver.
pub fn mode_curves(cfg: &Config, d: &Design) -> Result<Vec<ModeCurveRow>, PipelineError> {
    let f = cfg.dispersion.table_fraction;
    let mut rows = Vec::with_capacity(2 * CURVE_POINTS);
    for (band, mode, w0) in [
        ("seed", d.modes.seed, d.omega_seed),
        ("pump", d.modes.pump, d.omega_pump),
    ] {
        for i in 0..CURVE_POINTS {
            let w = w0 * (1.0 - f + 2.0 * f * i as f64 / (CURVE_POINTS - 1) as f64);
            rows.push(ModeCurveRow {
                band,
                mode: mode.to_string(),
                wavelength_nm: wavelength_from_omega(w) * 1e9,
                n_eff: solve_neff(&d.fiber, mode, w)?,
                n_bulk: d.fiber.core_index(w)?,
            });
        }
    }
    Ok(rows)
}

fn reference_gamma(cfg: &Config, omega_seed: f64) -> Result<f64, CouplingError> {
    let r = &cfg.sfwm_reference;
    gamma_sfwm(&cfg.chi, omega_seed, c::<f64>() / r.group_index, r.area)
}

/// Band model used for the JSA: Taylor expansions (with any configured
/// coefficients) or solver tables.
pub fn phase_model(cfg: &Config, d: &Design) -> Result<PhaseModel<f64>, PipelineError> {
    let disp = &cfg.dispersion;
    let phase = match disp.model {
        DispersionModel::Taylor => {
            let seed = BandDispersion::taylor(
                d.omega_seed,
                d.seed.n_eff,
                disp.seed_group_index.unwrap_or(d.seed.group_index),
                disp.seed_beta2.unwrap_or(d.seed.beta2),
            );
            let pump = BandDispersion::taylor(
                d.omega_pump,
                d.pump.n_eff,
                disp.pump_group_index.unwrap_or(d.pump.group_index),
                disp.pump_beta2.unwrap_or(d.pump.beta2),
            );
            PhaseModel::taylor_phasematched(seed, pump, d.omega_seed)?
        }
        DispersionModel::Exact => {
            let f = disp.table_fraction;
            let band = |mode: ModeId, w: f64| {
                BandDispersion::from_solver(&d.fiber, mode, w * (1.0 - f), w * (1.0 + f), disp.table_nodes)
            };
            PhaseModel::new(
                band(d.modes.seed, d.omega_seed)?,
                band(d.modes.pump, d.omega_pump)?,
                d.omega_seed,
            )
        }
    };
    Ok(phase.with_beta2_scale(disp.beta2_scale))
}

/// Area at the band centres as used by the JSA and the closed forms.
pub fn central_area(cfg: &Config, d: &Design) -> f64 {
    match cfg.area {
        AreaConfig::Fixed(a) => a,
        AreaConfig::Solver | AreaConfig::Central => d.area.value,
    }
}

#[derive(Debug, Clone)]
pub struct JsaRun {
    pub outcome: JsaOutcome<f64>,
    pub eta2_closed_form: f64,
    /// m²
    pub area: f64,
    /// Nonlinear coefficient with the band group velocities actually used.
    pub gamma: f64,
}

/// Inverse area with the two generated photons at `w1`, `w2`, the seed at
/// its centre and the pump photon at `w1 + w2 + ω_s`, on the grid the
/// central area converged on.
fn sampled_inverse_area(cfg: &Config, d: &Design, w1: f64, w2: f64) -> Result<Complex<f64>, JsaError> {
    let fields = |mode, w, o| mode_fields(&d.fiber, mode, w, o);
    let m1 = fields(d.modes.seed, w1, Orientation::Even)?;
    let m2 = fields(d.modes.seed, w2, Orientation::Even)?;
    let mp = fields(d.modes.pump, w1 + w2 + d.omega_seed, d.pump_field.orientation())?;
    inverse_area_on_grid(
        [&m1, &m2, &d.seed_field, &mp],
        &cfg.chi,
        d.area.half_width,
        d.area.cells,
    )
    .map_err(|e| JsaError::Area(e.to_string()))
}

pub fn run_jsa(cfg: &Config, d: &Design) -> Result<JsaRun, PipelineError> {
    let phase = phase_model(cfg, d)?;
    let sampler = |w1: f64, w2: f64| sampled_inverse_area(cfg, d, w1, w2);
    let area = match cfg.area {
        AreaConfig::Fixed(a) => AreaSpec::Constant(a),
        AreaConfig::Central => AreaSpec::Constant(d.area.value),
        AreaConfig::Solver => AreaSpec::Sampled(&sampler),
    };
    let g = &cfg.grid;
    let problem = JsaProblem {
        seed: PulseSpec::new(cfg.seed.wavelength, cfg.seed.duration, cfg.seed.power)?,
        pump: PulseSpec::new(cfg.pump.wavelength, cfg.pump.duration, cfg.pump.power)?,
        length: cfg.length,
        chi: cfg.chi,
        phase: &phase,
        area,
        grid: GridSpec {
            cells: g.cells,
            half_span: g.half_span,
            inner_nodes: g.inner_nodes,
            inner_width: g.inner_width,
            area_nodes: g.area_nodes,
        },
        frozen_factors: g.frozen_factors,
    };
    let outcome = compute_jsa(&problem)?;
    let a = central_area(cfg, d);
    let gamma = gamma_sstpdc(
        &cfg.chi,
        d.omega_seed,
        phase.vg_seed(d.omega_seed)?,
        phase.vg_pump(d.omega_pump)?,
        a,
    )?;
    let eta2_closed_form = pair_probability_closed_form(
        gamma,
        cfg.length,
        cfg.seed.duration,
        cfg.pump.duration,
        phase.beta2_seed()?,
        cfg.pump.power,
        cfg.seed.power,
    )?;
    Ok(JsaRun {
        outcome,
        eta2_closed_form,
        area: a,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKey {
    PumpDuration,
    SeedDuration,
    Length,
    Beta2Scale,
    PumpPower,
    SeedPower,
}

impl SweepKey {
    pub const NAMES: [&'static str; 6] = ["tau_p", "tau_s", "L", "beta2_scale", "P_p", "P_s"];

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "tau_p" => Self::PumpDuration,
            "tau_s" => Self::SeedDuration,
            "L" => Self::Length,
            "beta2_scale" => Self::Beta2Scale,
            "P_p" => Self::PumpPower,
            "P_s" => Self::SeedPower,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PumpDuration => "tau_p",
            Self::SeedDuration => "tau_s",
            Self::Length => "L",
            Self::Beta2Scale => "beta2_scale",
            Self::PumpPower => "P_p",
            Self::SeedPower => "P_s",
        }
    }

    /// Unit of the value column in sweep output.
    pub fn unit(self) -> &'static str {
        match self {
            Self::PumpDuration | Self::SeedDuration => "s",
            Self::Length => "m",
            Self::Beta2Scale => "1",
            Self::PumpPower | Self::SeedPower => "W",
        }
    }

    pub fn dimension(self) -> Option<crate::units::Dimension> {
        use crate::units::Dimension;
        match self {
            Self::PumpDuration | Self::SeedDuration => Some(Dimension::Time),
            Self::Length => Some(Dimension::Length),
            Self::Beta2Scale => None,
            Self::PumpPower | Self::SeedPower => Some(Dimension::Power),
        }
    }

    pub fn apply(self, cfg: &mut Config, value: f64) {
        match self {
            Self::PumpDuration => cfg.pump.duration = value,
            Self::SeedDuration => cfg.seed.duration = value,
            Self::Length => cfg.length = value,
            Self::Beta2Scale => cfg.dispersion.beta2_scale = value,
            Self::PumpPower => cfg.pump.power = value,
            Self::SeedPower => cfg.seed.power = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub key: &'static str,
    pub value: f64,
    pub unit: &'static str,
    pub eta2: f64,
    pub eta2_closed_form: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub g2: f64,
    #[serde(rename = "bandwidth_THz")]
    pub bandwidth_thz: f64,
}

/// One JSA per value; none of the sweep keys move the design, so it is
/// solved once.
pub fn run_sweep(cfg: &Config, d: &Design, key: SweepKey, values: &[f64]) -> Result<Vec<SweepRow>, PipelineError> {
    values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            key.apply(&mut c, v);
            let r = run_jsa(&c, d)?;
            let m = r.outcome.metrics;
            Ok(SweepRow {
                key: key.name(),
                value: v,
                unit: key.unit(),
                eta2: m.eta2,
                eta2_closed_form: r.eta2_closed_form,
                k: m.schmidt_number,
                g2: m.g2,
                bandwidth_thz: m.bandwidth_hz * 1e-12,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSummary {
    pub representative_seed_power_w: f64,
    pub single_pump_power_w: f64,
    pub suppression_ratio: f64,
    pub area_ratio: f64,
    pub fom: f64,
    /// Ratio of the two SNRs from the densities and fluxes, one per
    /// configured detuning.
    pub fom_exact: Vec<f64>,
    pub detunings_thz: Vec<f64>,
    /// Δ = 0 pair densities, photons/s/Hz
    pub sfwm_peak_density: f64,
    pub sstpdc_peak_density: f64,
    /// SSTPDC signal above its Raman floor at every configured detuning
    pub sstpdc_above_raman: bool,
    /// SFWM signal below its Raman floor at every configured detuning
    pub sfwm_below_raman: bool,
    pub raman_peak_thz: f64,
    /// Gain at the pump-band detuning relative to the peak
    pub pump_band_gain_ratio: f64,
    pub gamma: f64,
    pub gamma_sfwm: f64,
    #[serde(rename = "A_um2")]
    pub a_um2: f64,
    #[serde(rename = "A_sfwm_um2")]
    pub a_sfwm_um2: f64,
}

pub struct NoiseRun {
    pub rows: Vec<NoiseRow<f64>>,
    pub summary: NoiseSummary,
}

/// Quasi-CW comparison inputs: nonlinear coefficients with the band group
/// velocities of the JSA model, seed-band GVD, the central area.
pub fn noise_inputs(cfg: &Config, d: &Design) -> Result<NoiseInputs<f64>, PipelineError> {
    let phase = phase_model(cfg, d)?;
    let area = central_area(cfg, d);
    let gamma = gamma_sstpdc(
        &cfg.chi,
        d.omega_seed,
        phase.vg_seed(d.omega_seed)?,
        phase.vg_pump(d.omega_pump)?,
        area,
    )?;
    Ok(NoiseInputs {
        gamma,
        gamma_sfwm: d.gamma_sfwm,
        area,
        area_sfwm: cfg.sfwm_reference.area,
        beta2: phase.beta2_seed()?,
        beta2_sfwm: cfg.sfwm_reference.beta2,
        pump_power: cfg.pump.power,
        length: cfg.length,
        filter_bandwidth: cfg.raman.filter_bandwidth,
        noise_wavelength: cfg.seed.wavelength,
    })
}

pub fn run_raman(cfg: &Config, d: &Design) -> Result<NoiseRun, PipelineError> {
    let x = noise_inputs(cfg, d)?;
    let model = &cfg.raman.model;
    let rows = noise_sweep(model, &x, &cfg.sweep.seed_powers, &cfg.sweep.detunings)?;
    let ps = cfg.sweep.representative_seed_power;
    let at_rep = cfg
        .sweep
        .detunings
        .iter()
        .map(|&delta| noise_point(model, &x, ps, delta))
        .collect::<Result<Vec<_>, _>>()?;
    let p_sp = pairgen::raman::single_pump_power(x.pump_power, ps);
    let peak_sfwm = pairgen::raman::sfwm_density(x.gamma_sfwm, p_sp, x.length, x.beta2_sfwm, 0.0);
    let peak_sstpdc = pairgen::raman::sstpdc_density(x.gamma, x.pump_power, ps, x.length, x.beta2, 0.0);
    // pair photons near ω_s sit about 2ω_s below the pump
    let pump_detuning = (d.omega_pump - d.omega_seed) / std::f64::consts::TAU;
    let gain_ratio = raman_gain(model, pump_detuning, x.area, cfg.pump.wavelength)
        / raman_gain(model, model.peak_detuning(), x.area, cfg.pump.wavelength);
    let summary = NoiseSummary {
        representative_seed_power_w: ps,
        single_pump_power_w: p_sp,
        suppression_ratio: suppression_ratio(x.area, x.area_sfwm, x.pump_power, ps),
        area_ratio: x.area_sfwm / x.area,
        fom: pairgen::raman::figure_of_merit(x.area, x.area_sfwm, x.pump_power, ps),
        fom_exact: at_rep.iter().map(|r| r.fom_exact).collect(),
        detunings_thz: cfg.sweep.detunings.iter().map(|d| d * 1e-12).collect(),
        sfwm_peak_density: peak_sfwm,
        sstpdc_peak_density: peak_sstpdc,
        sstpdc_above_raman: at_rep.iter().all(|r| r.sstpdc_signal > r.raman_sstpdc),
        sfwm_below_raman: at_rep.iter().all(|r| r.sfwm_signal < r.raman_sfwm),
        raman_peak_thz: model.peak_detuning() * 1e-12,
        pump_band_gain_ratio: gain_ratio,
        gamma: x.gamma,
        gamma_sfwm: x.gamma_sfwm,
        a_um2: x.area * 1e12,
        a_sfwm_um2: x.area_sfwm * 1e12,
    };
    Ok(NoiseRun { rows, summary })
}
