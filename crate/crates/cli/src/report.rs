//! Result files: JSON documents, CSV tables and the run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pairgen::jsa::JsaGrid;
use pairgen::raman::NoiseRow;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::pipeline::{JsaRun, ModeCurveRow, SweepRow};

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> WriteError + '_ {
    move |source| WriteError {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> WriteError + '_ {
    move |e| WriteError {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), WriteError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| WriteError {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

fn write_rows<S: Serialize>(path: &Path, header: &[&str], rows: impl Iterator<Item = S>) -> Result<(), WriteError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(file));
    w.write_record(header).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub eta2: f64,
    pub eta2_closed_form: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub g2: f64,
    #[serde(rename = "bandwidth_THz")]
    pub bandwidth_thz: f64,
    #[serde(rename = "A_um2")]
    pub a_um2: f64,
    pub diameter_um: f64,
    pub gamma: f64,
    pub cells: usize,
    #[serde(rename = "half_span_THz")]
    pub half_span_thz: f64,
    pub edge_ratio: f64,
    pub first_order_warning: bool,
    pub frozen_factors: bool,
    /// Detuning axis of the heatmap, `(ω − ω_s)/2π` in THz, low to high.
    #[serde(rename = "jsi_extent_THz")]
    pub jsi_extent_thz: [f64; 2],
}

impl Metrics {
    pub fn new(run: &JsaRun, diameter: f64, seed_omega: f64, frozen_factors: bool) -> Self {
        let m = &run.outcome.metrics;
        let g = &run.outcome.grid;
        let to_thz = |w: f64| (w - seed_omega) / std::f64::consts::TAU * 1e-12;
        let half = g.step / 2.0;
        Self {
            eta2: m.eta2,
            eta2_closed_form: run.eta2_closed_form,
            k: m.schmidt_number,
            g2: m.g2,
            bandwidth_thz: m.bandwidth_hz * 1e-12,
            a_um2: run.area * 1e12,
            diameter_um: diameter * 1e6,
            gamma: run.gamma,
            cells: g.cells(),
            half_span_thz: run.outcome.half_span / std::f64::consts::TAU * 1e-12,
            edge_ratio: run.outcome.edge_ratio,
            first_order_warning: run.outcome.first_order_warning,
            frozen_factors,
            jsi_extent_thz: [to_thz(g.axis[0] - half), to_thz(g.axis[g.cells() - 1] + half)],
        }
    }
}

/// Normalized JSA on every `stride`-th cell, frequencies in THz.
pub fn write_jsa_csv(path: &Path, grid: &JsaGrid<f64>, stride: usize) -> Result<(), WriteError> {
    let n = grid.cells();
    let stride = stride.max(1);
    let thz = |w: f64| w / std::f64::consts::TAU * 1e-12;
    let rows = (0..n).step_by(stride).flat_map(|i| {
        (0..n).step_by(stride).map(move |j| {
            let a = grid.at(i, j);
            (thz(grid.axis[i]), thz(grid.axis[j]), a.re, a.im, a.norm_sqr())
        })
    });
    write_rows(path, &["ω₁_THz", "ω₂_THz", "re", "im", "abs2"], rows)
}

pub fn write_mode_curves_csv(path: &Path, rows: &[ModeCurveRow]) -> Result<(), WriteError> {
    write_rows(
        path,
        &["band", "mode", "wavelength_nm", "n_eff", "n_bulk"],
        rows.iter()
            .map(|r| (r.band, &r.mode, r.wavelength_nm, r.n_eff, r.n_bulk)),
    )
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), WriteError> {
    write_rows(
        path,
        &[
            "key",
            "value",
            "unit",
            "eta2",
            "eta2_closed_form",
            "K",
            "g2",
            "bandwidth_THz",
        ],
        rows.iter().map(|r| {
            (
                r.key,
                r.value,
                r.unit,
                r.eta2,
                r.eta2_closed_form,
                r.k,
                r.g2,
                r.bandwidth_thz,
            )
        }),
    )
}

pub fn write_noise_csv(path: &Path, rows: &[NoiseRow<f64>]) -> Result<(), WriteError> {
    write_rows(
        path,
        &[
            "P_s_W",
            "Delta_THz",
            "sfwm_signal",
            "sstpdc_signal",
            "raman_sfwm",
            "raman_sstpdc",
            "snr_sfwm",
            "snr_sstpdc",
            "fom",
        ],
        rows.iter().map(|r| {
            (
                r.seed_power,
                r.detuning_hz * 1e-12,
                r.sfwm_signal,
                r.sstpdc_signal,
                r.raman_sfwm,
                r.raman_sstpdc,
                r.snr_sfwm,
                r.snr_sstpdc,
                r.fom,
            )
        }),
    )
}

/// SHA-256 of the resolved config in canonical JSON.
pub fn config_hash(cfg: &Config) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    format!("{:x}", Sha256::digest(&canonical))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub config_path: Option<String>,
    pub threads: usize,
    pub started_utc: String,
    pub finished_utc: String,
    pub outputs: Vec<String>,
}

/// Writes `out` into `dir` as UTF-8, creating the directory.
pub fn ensure_dir(dir: &Path) -> Result<(), WriteError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), WriteError> {
    let mut f = File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}
