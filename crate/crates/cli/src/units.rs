//! Physical quantities written as `"<number> <unit>"` strings.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Power,
    Frequency,
    Area,
    Dispersion,
    Temperature,
    Gain,
    Susceptibility,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Self::Length => &[
                ("m", 1.0),
                ("km", 1e3),
                ("cm", 1e-2),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("μm", 1e-6),
                ("nm", 1e-9),
            ],
            Self::Time => &[
                ("s", 1.0),
                ("ms", 1e-3),
                ("us", 1e-6),
                ("µs", 1e-6),
                ("ns", 1e-9),
                ("ps", 1e-12),
                ("fs", 1e-15),
            ],
            Self::Power => &[("W", 1.0), ("uW", 1e-6), ("mW", 1e-3), ("kW", 1e3), ("MW", 1e6)],
            Self::Frequency => &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9), ("THz", 1e12)],
            Self::Area => &[
                ("m^2", 1.0),
                ("mm^2", 1e-6),
                ("um^2", 1e-12),
                ("µm^2", 1e-12),
                ("μm^2", 1e-12),
                ("nm^2", 1e-18),
            ],
            Self::Dispersion => &[
                ("s^2/m", 1.0),
                ("ps^2/km", 1e-27),
                ("ps^2/m", 1e-24),
                ("fs^2/mm", 1e-27),
                ("fs^2/m", 1e-30),
            ],
            Self::Temperature => &[("K", 1.0)],
            Self::Gain => &[("m/W", 1.0), ("cm/W", 1e-2)],
            Self::Susceptibility => &[("m^2/V^2", 1.0)],
        }
    }

    /// An example unit for error messages.
    pub fn example(self) -> &'static str {
        match self {
            Self::Length => "1596 nm",
            Self::Time => "10 ps",
            Self::Power => "10 kW",
            Self::Frequency => "100 GHz",
            Self::Area => "4.9 um^2",
            Self::Dispersion => "2344 ps^2/km",
            Self::Temperature => "300 K",
            Self::Gain => "1e-13 m/W",
            Self::Susceptibility => "2.5e-22 m^2/V^2",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Length => "length",
            Self::Time => "time",
            Self::Power => "power",
            Self::Frequency => "frequency",
            Self::Area => "area",
            Self::Dispersion => "group-velocity dispersion",
            Self::Temperature => "temperature",
            Self::Gain => "gain coefficient",
            Self::Susceptibility => "third-order susceptibility",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("`{0}` has no number")]
    NoNumber(String),
    #[error("`{text}` has no unit; write a {dimension} such as \"{example}\"")]
    MissingUnit {
        text: String,
        dimension: Dimension,
        example: &'static str,
    },
    #[error("unit `{unit}` is not a {dimension}; expected one of {accepted}")]
    WrongUnit {
        unit: String,
        dimension: Dimension,
        accepted: String,
    },
    #[error("`{0}` is not finite")]
    NotFinite(String),
}

/// Parses `"10 ps"` or `"10ps"` into SI units.
pub fn parse_quantity(text: &str, dimension: Dimension) -> Result<f64, UnitError> {
    let s = text.trim();
    let numeric = s
        .char_indices()
        .take_while(|(_, c)| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
        .map(|(i, c)| i + c.len_utf8())
        .last()
        .unwrap_or(0);
    // back off until the prefix is a number, so "5e" in "5em" is not eaten
    let (value, rest) = (1..=numeric)
        .rev()
        .find_map(|end| s[..end].parse::<f64>().ok().map(|v| (v, &s[end..])))
        .ok_or_else(|| UnitError::NoNumber(text.to_string()))?;
    if !value.is_finite() {
        return Err(UnitError::NotFinite(text.to_string()));
    }
    let unit = rest.trim();
    if unit.is_empty() {
        return Err(UnitError::MissingUnit {
            text: text.to_string(),
            dimension,
            example: dimension.example(),
        });
    }
    let table = dimension.units();
    table
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, scale)| value * scale)
        .ok_or_else(|| UnitError::WrongUnit {
            unit: unit.to_string(),
            dimension,
            accepted: table.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", "),
        })
}
