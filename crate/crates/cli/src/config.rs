//! Run configuration: a TOML tree whose physical values carry units.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::Path;

use pairgen::coupling::Chi3Model;
use pairgen::material::{SellmeierModel, SellmeierTerm};
use pairgen::modes::ModeId;
use pairgen::raman::{RamanModel, RamanShape};
use serde::Serialize;
use thiserror::Error;
use toml::{Table, Value};

use crate::units::{parse_quantity, Dimension};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("`{key}`: {message}")]
    Key { key: String, message: String },
    #[error("unknown key `{0}`")]
    Unknown(String),
}

fn key_error(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Key {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pulse {
    /// m
    pub wavelength: f64,
    /// s, intensity 1/e half-width in time
    pub duration: f64,
    /// W, peak
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberConfig {
    /// Fixed diameter (m), or `None` to solve for phasematching.
    pub diameter: Option<f64>,
    pub search: (f64, f64),
    pub pump_mode: ModeId,
    pub seed_mode: ModeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersionModel {
    Taylor,
    Exact,
}

/// Band dispersion. Any Taylor coefficient left unset is taken from the
/// mode solver at the band centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionConfig {
    pub model: DispersionModel,
    pub seed_group_index: Option<f64>,
    pub pump_group_index: Option<f64>,
    /// s²/m
    pub seed_beta2: Option<f64>,
    /// s²/m
    pub pump_beta2: Option<f64>,
    pub beta2_scale: f64,
    /// Solver evaluations per band table in exact mode.
    pub table_nodes: usize,
    /// Half-width of each band table relative to its centre frequency.
    pub table_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum AreaConfig {
    /// Overlap recomputed from the solved modes across the pair band.
    Solver,
    /// Solver value at the band centres, held fixed.
    Central,
    /// Prescribed value (m²).
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub cells: usize,
    /// rad/s, `None` for automatic sizing
    pub half_span: Option<f64>,
    pub inner_nodes: usize,
    pub inner_width: f64,
    pub area_nodes: usize,
    pub frozen_factors: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RamanConfig {
    pub model: RamanModel<f64>,
    /// Hz
    pub filter_bandwidth: f64,
}

/// The conventional fiber the SFWM comparison source is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SfwmReference {
    /// m²
    pub area: f64,
    pub group_index: f64,
    /// s²/m
    pub beta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    /// W, ascending
    pub seed_powers: Vec<f64>,
    /// Hz, ascending and positive
    pub detunings: Vec<f64>,
    /// W, the seed power the noise summary is quoted at
    pub representative_seed_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub core: SellmeierModel<f64>,
    pub cladding_index: f64,
    pub fiber: FiberConfig,
    pub chi: Chi3Model<f64>,
    pub pump: Pulse,
    pub seed: Pulse,
    /// m
    pub length: f64,
    pub dispersion: DispersionConfig,
    pub area: AreaConfig,
    pub grid: GridConfig,
    pub raman: RamanConfig,
    pub sfwm_reference: SfwmReference,
    pub sweep: SweepConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            core: SellmeierModel::fused_silica_malitson(),
            cladding_index: 1.0,
            fiber: FiberConfig {
                diameter: None,
                search: (0.5e-6, 1.2e-6),
                pump_mode: ModeId::HE12,
                seed_mode: ModeId::HE11,
            },
            chi: Chi3Model::silica(),
            pump: Pulse {
                wavelength: 532e-9,
                duration: 10e-12,
                power: 10e3,
            },
            seed: Pulse {
                wavelength: 1596e-9,
                duration: 1e-9,
                power: 1.0,
            },
            length: 10e-3,
            dispersion: DispersionConfig {
                model: DispersionModel::Taylor,
                seed_group_index: Some(1.396),
                pump_group_index: Some(1.695),
                seed_beta2: Some(2344e-27),
                pump_beta2: Some(-10e-27),
                beta2_scale: 1.0,
                table_nodes: 64,
                table_fraction: 0.1,
            },
            area: AreaConfig::Solver,
            grid: GridConfig {
                cells: 1024,
                half_span: None,
                inner_nodes: 64,
                inner_width: 6.0,
                area_nodes: 8,
                frozen_factors: false,
            },
            raman: RamanConfig {
                model: RamanModel::silica(),
                filter_bandwidth: 100e9,
            },
            sfwm_reference: SfwmReference {
                area: 84e-12,
                group_index: 1.463,
                beta2: -26.18e-27,
            },
            sweep: SweepConfig {
                seed_powers: log_space(0.01, 10.0, 31),
                detunings: vec![0.5e12, 1e12, 1.5e12, 2e12],
                representative_seed_power: 1.0,
            },
        }
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    // exact endpoints rather than exp(ln(x))
    v[0] = lo;
    v[n - 1] = hi;
    v
}

/// A section of the tree that remembers which keys were read so the rest
/// can be reported as unknown.
struct Section<'a> {
    path: String,
    table: &'a Table,
    seen: RefCell<BTreeSet<String>>,
}

impl<'a> Section<'a> {
    fn new(path: &str, table: &'a Table) -> Self {
        Self {
            path: path.to_string(),
            table,
            seen: RefCell::new(BTreeSet::new()),
        }
    }

    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    fn get(&self, k: &str) -> Option<&'a Value> {
        self.seen.borrow_mut().insert(k.to_string());
        self.table.get(k)
    }

    fn sub(&self, k: &str) -> Result<Option<Section<'a>>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(Section::new(&self.key(k), t))),
            Some(_) => Err(key_error(&self.key(k), "expected a table")),
        }
    }

    fn quantity(&self, k: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => parse_quantity(s, dim)
                .map(Some)
                .map_err(|e| key_error(&self.key(k), e.to_string())),
            Some(v) => Err(key_error(
                &self.key(k),
                format!("expected a {dim} with units such as \"{}\", found {v}", dim.example()),
            )),
        }
    }

    fn positive(&self, k: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        let v = self.quantity(k, dim)?;
        if let Some(x) = v {
            if !(x > 0.0) {
                return Err(key_error(&self.key(k), format!("must be positive, got {x}")));
            }
        }
        Ok(v)
    }

    fn number(&self, k: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(key_error(&self.key(k), format!("expected a plain number, found {v}"))),
        }
    }

    fn count(&self, k: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= min as i64 => Ok(Some(*i as usize)),
            Some(v) => Err(key_error(
                &self.key(k),
                format!("expected an integer >= {min}, found {v}"),
            )),
        }
    }

    fn boolean(&self, k: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(key_error(&self.key(k), format!("expected true or false, found {v}"))),
        }
    }

    fn string(&self, k: &str) -> Result<Option<&'a str>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(v) => Err(key_error(&self.key(k), format!("expected a string, found {v}"))),
        }
    }

    fn quantities(&self, k: &str, dim: Dimension) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::String(s) => {
                        parse_quantity(s, dim).map_err(|e| key_error(&format!("{}[{i}]", self.key(k)), e.to_string()))
                    }
                    other => Err(key_error(
                        &format!("{}[{i}]", self.key(k)),
                        format!("expected a {dim} with units, found {other}"),
                    )),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(v) => Err(key_error(&self.key(k), format!("expected an array, found {v}"))),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        let seen = self.seen.into_inner();
        match self.table.keys().find(|k| !seen.contains(*k)) {
            Some(k) => Err(ConfigError::Unknown(if self.path.is_empty() {
                k.clone()
            } else {
                format!("{}.{k}", self.path)
            })),
            None => Ok(()),
        }
    }
}

fn ascending(key: &str, v: &[f64], positive: bool) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(key_error(key, "must not be empty"));
    }
    if positive && v.iter().any(|x| !(*x > 0.0)) {
        return Err(key_error(key, "values must be positive"));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(key_error(key, "values must be strictly increasing"));
    }
    Ok(())
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses a config, starting from the defaults; every key is optional.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
        let root = Section::new("", &table);
        let mut c = Config::default();

        if let Some(s) = root.sub("material")? {
            c.read_material(&s)?;
            s.finish()?;
        }
        if let Some(s) = root.sub("fiber")? {
            if let Some(v) = s.get("diameter") {
                c.fiber.diameter = match v {
                    Value::String(t) if t == "auto" => None,
                    _ => s.positive("diameter", Dimension::Length)?,
                };
            }
            let lo = s.positive("search_min", Dimension::Length)?.unwrap_or(c.fiber.search.0);
            let hi = s.positive("search_max", Dimension::Length)?.unwrap_or(c.fiber.search.1);
            if !(hi > lo) {
                return Err(key_error("fiber.search_max", "must exceed fiber.search_min"));
            }
            c.fiber.search = (lo, hi);
            for (k, slot) in [
                ("pump_mode", &mut c.fiber.pump_mode),
                ("seed_mode", &mut c.fiber.seed_mode),
            ] {
                if let Some(m) = s.string(k)? {
                    *slot = m
                        .parse()
                        .map_err(|e: pairgen::modes::ModeError| key_error(&s.key(k), e.to_string()))?;
                }
            }
            s.finish()?;
        }
        if let Some(s) = root.sub("nonlinearity")? {
            let chi = s.quantity("chi3", Dimension::Susceptibility)?.unwrap_or(c.chi.chi_bar);
            let n_bar = s.number("n_bar")?.unwrap_or(c.chi.n_bar);
            let comps = match s.get("components") {
                None => [c.chi.xxyy, c.chi.xyxy, c.chi.xyyx],
                Some(Value::Array(a)) if a.len() == 3 => {
                    let mut out = [0.0; 3];
                    for (o, v) in out.iter_mut().zip(a) {
                        *o = v
                            .as_float()
                            .or_else(|| v.as_integer().map(|i| i as f64))
                            .ok_or_else(|| key_error("nonlinearity.components", "expected three numbers"))?;
                    }
                    out
                }
                Some(_) => return Err(key_error("nonlinearity.components", "expected three numbers")),
            };
            c.chi = Chi3Model::new(chi, comps, n_bar).map_err(|e| key_error("nonlinearity", e.to_string()))?;
            s.finish()?;
        }
        for (name, pulse) in [("pump", &mut c.pump), ("seed", &mut c.seed)] {
            if let Some(s) = root.sub(name)? {
                pulse.wavelength = s.positive("wavelength", Dimension::Length)?.unwrap_or(pulse.wavelength);
                pulse.duration = s.positive("duration", Dimension::Time)?.unwrap_or(pulse.duration);
                if let Some(p) = s.quantity("power", Dimension::Power)? {
                    if !(p >= 0.0) {
                        return Err(key_error(&s.key("power"), "must not be negative"));
                    }
                    pulse.power = p;
                }
                s.finish()?;
            }
        }
        if let Some(s) = root.sub("interaction")? {
            c.length = s.positive("length", Dimension::Length)?.unwrap_or(c.length);
            s.finish()?;
        }
        if let Some(s) = root.sub("dispersion")? {
            c.read_dispersion(&s)?;
            s.finish()?;
        }
        if let Some(s) = root.sub("area")? {
            c.area = match s.string("mode")? {
                None | Some("solver") => AreaConfig::Solver,
                Some("central") => AreaConfig::Central,
                Some("fixed") => AreaConfig::Fixed(
                    s.positive("value", Dimension::Area)?
                        .ok_or_else(|| key_error("area.value", "required when area.mode = \"fixed\""))?,
                ),
                Some(other) => {
                    return Err(key_error(
                        "area.mode",
                        format!("`{other}` is not one of solver, central, fixed"),
                    ))
                }
            };
            s.finish()?;
        }
        if let Some(s) = root.sub("grid")? {
            let g = &mut c.grid;
            g.cells = s.count("cells", 64)?.unwrap_or(g.cells);
            if let Some(v) = s.get("half_span") {
                g.half_span = match v {
                    Value::String(t) if t == "auto" => None,
                    _ => s
                        .positive("half_span", Dimension::Frequency)?
                        .map(|f| f * std::f64::consts::TAU),
                };
            }
            g.inner_nodes = s.count("inner_nodes", 1)?.unwrap_or(g.inner_nodes);
            if let Some(w) = s.number("inner_width")? {
                if !(w > 0.0) {
                    return Err(key_error("grid.inner_width", "must be positive"));
                }
                g.inner_width = w;
            }
            g.area_nodes = s.count("area_nodes", 2)?.unwrap_or(g.area_nodes);
            g.frozen_factors = s.boolean("frozen_factors")?.unwrap_or(g.frozen_factors);
            s.finish()?;
        }
        if let Some(s) = root.sub("raman")? {
            c.read_raman(&s)?;
            s.finish()?;
        }
        if let Some(s) = root.sub("sfwm_reference")? {
            let r = &mut c.sfwm_reference;
            r.area = s.positive("area", Dimension::Area)?.unwrap_or(r.area);
            if let Some(n) = s.number("group_index")? {
                if !(n > 0.0) {
                    return Err(key_error("sfwm_reference.group_index", "must be positive"));
                }
                r.group_index = n;
            }
            r.beta2 = s.quantity("beta2", Dimension::Dispersion)?.unwrap_or(r.beta2);
            s.finish()?;
        }
        if let Some(s) = root.sub("sweep")? {
            let w = &mut c.sweep;
            if let Some(v) = s.quantities("seed_powers", Dimension::Power)? {
                ascending("sweep.seed_powers", &v, true)?;
                w.seed_powers = v;
            }
            if let Some(v) = s.quantities("detunings", Dimension::Frequency)? {
                ascending("sweep.detunings", &v, true)?;
                w.detunings = v;
            }
            w.representative_seed_power = s
                .positive("representative_seed_power", Dimension::Power)?
                .unwrap_or(w.representative_seed_power);
            s.finish()?;
        }
        root.finish()?;
        Ok(c)
    }

    fn read_material(&mut self, s: &Section<'_>) -> Result<(), ConfigError> {
        match s.get("sellmeier") {
            None => {}
            Some(Value::String(name)) if name == "fused_silica" => self.core = SellmeierModel::fused_silica_malitson(),
            Some(Value::Array(items)) => {
                let mut terms = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    let key = format!("material.sellmeier[{i}]");
                    let t = item
                        .as_table()
                        .ok_or_else(|| key_error(&key, "expected { strength, resonance }"))?;
                    let term = Section::new(&key, t);
                    let strength = term
                        .number("strength")?
                        .ok_or_else(|| key_error(&format!("{key}.strength"), "required"))?;
                    let resonance = term
                        .quantity("resonance", Dimension::Length)?
                        .ok_or_else(|| key_error(&format!("{key}.resonance"), "required"))?;
                    term.finish()?;
                    terms.push(SellmeierTerm {
                        strength,
                        resonance_um: resonance * 1e6,
                    });
                }
                let lo = s.positive("valid_min", Dimension::Length)?.unwrap_or(0.21e-6);
                let hi = s.positive("valid_max", Dimension::Length)?.unwrap_or(6.7e-6);
                self.core = SellmeierModel::new(terms, (lo * 1e6, hi * 1e6))
                    .map_err(|e| key_error("material.sellmeier", e.to_string()))?;
            }
            Some(v) => {
                return Err(key_error(
                    "material.sellmeier",
                    format!("expected \"fused_silica\" or an array of terms, found {v}"),
                ))
            }
        }
        if let Some(n) = s.number("cladding_index")? {
            if !(n >= 1.0) {
                return Err(key_error("material.cladding_index", "must be at least 1"));
            }
            self.cladding_index = n;
        }
        Ok(())
    }

    fn read_dispersion(&mut self, s: &Section<'_>) -> Result<(), ConfigError> {
        let d = &mut self.dispersion;
        d.model = match s.string("model")? {
            None | Some("taylor") => DispersionModel::Taylor,
            Some("exact") => DispersionModel::Exact,
            Some(other) => {
                return Err(key_error(
                    "dispersion.model",
                    format!("`{other}` is not one of taylor, exact"),
                ))
            }
        };
        // "solver" clears a default so the solved value is used
        let index = |k: &str, cur: Option<f64>| -> Result<Option<f64>, ConfigError> {
            match s.get(k) {
                None => Ok(cur),
                Some(Value::String(t)) if t == "solver" => Ok(None),
                Some(_) => match s.number(k)? {
                    Some(n) if n > 0.0 => Ok(Some(n)),
                    _ => Err(key_error(&s.key(k), "must be a positive number or \"solver\"")),
                },
            }
        };
        d.seed_group_index = index("seed_group_index", d.seed_group_index)?;
        d.pump_group_index = index("pump_group_index", d.pump_group_index)?;
        let gvd = |k: &str, cur: Option<f64>| -> Result<Option<f64>, ConfigError> {
            match s.get(k) {
                None => Ok(cur),
                Some(Value::String(t)) if t == "solver" => Ok(None),
                Some(_) => s.quantity(k, Dimension::Dispersion),
            }
        };
        d.seed_beta2 = gvd("seed_beta2", d.seed_beta2)?;
        d.pump_beta2 = gvd("pump_beta2", d.pump_beta2)?;
        if let Some(x) = s.number("beta2_scale")? {
            if !(x > 0.0) {
                return Err(key_error("dispersion.beta2_scale", "must be positive"));
            }
            d.beta2_scale = x;
        }
        d.table_nodes = s.count("table_nodes", 8)?.unwrap_or(d.table_nodes);
        if let Some(f) = s.number("table_fraction")? {
            if !(f > 0.0 && f < 0.5) {
                return Err(key_error("dispersion.table_fraction", "must lie in (0, 0.5)"));
            }
            d.table_fraction = f;
        }
        Ok(())
    }

    fn read_raman(&mut self, s: &Section<'_>) -> Result<(), ConfigError> {
        let m = &self.raman.model;
        let shape = match s.get("table") {
            Some(Value::String(path)) => RamanShape::Tabulated(read_gain_table(Path::new(path))?),
            Some(_) => return Err(key_error("raman.table", "expected a file path")),
            None => {
                let (t1, t2) = match m.shape {
                    RamanShape::DampedOscillator { tau1, tau2 } => (tau1, tau2),
                    RamanShape::Tabulated(_) => unreachable!("defaults use the oscillator"),
                };
                RamanShape::DampedOscillator {
                    tau1: s.positive("tau1", Dimension::Time)?.unwrap_or(t1),
                    tau2: s.positive("tau2", Dimension::Time)?.unwrap_or(t2),
                }
            }
        };
        let model = RamanModel::new(
            shape,
            s.positive("g_peak", Dimension::Gain)?.unwrap_or(m.g_peak),
            s.positive("reference_wavelength", Dimension::Length)?
                .unwrap_or(m.reference_wavelength),
            s.positive("reference_area", Dimension::Area)?
                .unwrap_or(m.reference_area),
            s.quantity("temperature", Dimension::Temperature)?
                .unwrap_or(m.temperature),
            s.positive("band_edge", Dimension::Frequency)?.unwrap_or(m.band_edge),
        )
        .map_err(|e| key_error("raman", e.to_string()))?;
        self.raman.model = model;
        self.raman.filter_bandwidth = s
            .positive("filter_bandwidth", Dimension::Frequency)?
            .unwrap_or(self.raman.filter_bandwidth);
        Ok(())
    }
}

/// Two-column CSV of detuning (THz) and relative gain, with a header row.
fn read_gain_table(path: &Path) -> Result<Vec<(f64, f64)>, ConfigError> {
    let key = "raman.table";
    let mut reader = csv::Reader::from_path(path).map_err(|e| key_error(key, format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| key_error(key, e.to_string()))?;
        let field = |j: usize| -> Result<f64, ConfigError> {
            rec.get(j)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| key_error(key, format!("row {}: column {} is not a number", i + 1, j + 1)))
        };
        rows.push((field(0)? * 1e12, field(1)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn overrides_are_converted_to_si() {
        let c = Config::parse(
            r#"
            [pump]
            wavelength = "525 nm"
            duration = "1ps"
            [interaction]
            length = "2 cm"
            [grid]
            half_span = "8 THz"
            "#,
        )
        .unwrap();
        assert!((c.pump.wavelength - 525e-9).abs() < 1e-21);
        assert_eq!(c.pump.duration, 1e-12);
        assert!((c.length - 0.02).abs() < 1e-15);
        assert!((c.grid.half_span.unwrap() - std::f64::consts::TAU * 8e12).abs() < 1.0);
    }

    #[test]
    fn errors_name_the_offending_key() {
        let msg = |t: &str| Config::parse(t).unwrap_err().to_string();
        assert!(msg("[pump]\nduration = 10\n").contains("pump.duration"));
        assert!(msg("[seed]\nwavelength = \"1596 ps\"\n").contains("seed.wavelength"));
        assert!(msg("[fiber]\ncolour = \"red\"\n").contains("fiber.colour"));
        assert!(msg("[dispersion]\nmodel = \"magic\"\n").contains("dispersion.model"));
        assert!(msg("[sweep]\ndetunings = [\"2 THz\", \"1 THz\"]\n").contains("sweep.detunings"));
        assert!(msg("[grid]\ncells = 8\n").contains("grid.cells"));
        assert!(msg("[fiber]\npump_mode = \"XY3\"\n").contains("fiber.pump_mode"));
    }

    #[test]
    fn solver_keyword_clears_taylor_override() {
        let c = Config::parse("[dispersion]\npump_group_index = \"solver\"\npump_beta2 = \"solver\"\n").unwrap();
        assert_eq!(c.dispersion.pump_group_index, None);
        assert_eq!(c.dispersion.pump_beta2, None);
        assert_eq!(c.dispersion.seed_group_index, Some(1.396));
    }
}
