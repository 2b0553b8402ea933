//! Exact vector modes of a circular step-index waveguide.
//!
//! The core is a Sellmeier material and the cladding a uniform medium
//! (air by default). Eigenvalues come from the full hybrid-mode
//! characteristic equation, written in the pole-free form
//!
//! ```text
//! J'_ν(U)/U − J_ν(U)·R±(U, W) = 0
//! R± = −(n₁²+n₂²)/(2n₁²)·K'_ν/(W K_ν) ± √[(Δ K'_ν/(W K_ν))² + (ν n_eff/n₁)²(1/U² + 1/W²)²]
//! ```
//!
//! with the upper sign selecting EH and the lower HE modes, and the
//! corresponding TE/TM equations for ν = 0. Fields follow the standard
//! (Snyder–Love) expressions and are scaled so that the displacement field
//! `d = ε₀n²e` satisfies `∫ d*·d / (ε₀ n²) dA = 1`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::RwLock;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::{self, eps0};
use crate::material::{MaterialError, SellmeierModel};
use crate::quadrature::Rule;
use crate::roots::brent;
use crate::scalar::{lit, Real};
use crate::special::{bessel_j, bessel_k_scaled};

/// Number of interior points used to bracket characteristic-equation roots.
pub const SCAN_POINTS: usize = 400;

/// Relative frequency step of the five-point dispersion stencil.
pub const DISPERSION_STEP: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("{mode} is not guided at V = {v_number:.6}; cutoff near V = {}", fmt_cutoff(*.cutoff_v))]
    NotGuided {
        mode: ModeId,
        v_number: f64,
        cutoff_v: Option<f64>,
    },
    #[error("no guidance: core index {core:.6} does not exceed cladding index {cladding:.6}")]
    NoGuidance { core: f64, cladding: f64 },
    #[error("invalid mode label: {0}")]
    InvalidMode(String),
    #[error("invalid fiber: {0}")]
    InvalidFiber(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("root refinement failed for {mode} between U = {u_lo} and U = {u_hi}")]
    Refinement { mode: ModeId, u_lo: f64, u_hi: f64 },
    #[error("{mode}: dispersion stencil around {omega:.6e} rad/s crosses cutoff")]
    StencilCrossesCutoff { mode: ModeId, omega: f64 },
    #[error(
        "no phasematch in diameter bracket [{d_lo:.6e}, {d_hi:.6e}] m: Δn = {dn_lo:.3e} and {dn_hi:.3e} at the ends"
    )]
    NoPhasematch {
        d_lo: f64,
        d_hi: f64,
        dn_lo: f64,
        dn_hi: f64,
    },
    #[error("{mode}: dispersion at {omega:.6e} rad/s changes by more than 0.5% when the stencil step is halved")]
    UnstableStencil { mode: ModeId, omega: f64 },
    #[error("degenerate phasematch: Δn vanishes identically across the bracket")]
    DegenerateBracket,
}

fn fmt_cutoff(v: Option<f64>) -> String {
    v.map_or_else(|| "unknown".to_string(), |v| format!("{v:.6}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeFamily {
    HE,
    EH,
    TE,
    TM,
}

/// Mode label such as HE₁₁ or TM₀₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ModeId {
    family: ModeFamily,
    azimuthal_order: u32,
    radial_order: u32,
}

impl ModeId {
    pub const HE11: ModeId = ModeId::hybrid_unchecked(ModeFamily::HE, 1, 1);
    pub const HE12: ModeId = ModeId::hybrid_unchecked(ModeFamily::HE, 1, 2);
    pub const HE21: ModeId = ModeId::hybrid_unchecked(ModeFamily::HE, 2, 1);
    pub const EH11: ModeId = ModeId::hybrid_unchecked(ModeFamily::EH, 1, 1);

    const fn hybrid_unchecked(family: ModeFamily, azimuthal_order: u32, radial_order: u32) -> Self {
        Self {
            family,
            azimuthal_order,
            radial_order,
        }
    }

    pub fn new(family: ModeFamily, azimuthal_order: u32, radial_order: u32) -> Result<Self, ModeError> {
        if radial_order == 0 {
            return Err(ModeError::InvalidMode("radial order must be >= 1".into()));
        }
        match family {
            ModeFamily::HE | ModeFamily::EH if azimuthal_order == 0 => {
                Err(ModeError::InvalidMode("HE/EH modes need azimuthal order >= 1".into()))
            }
            ModeFamily::TE | ModeFamily::TM if azimuthal_order != 0 => {
                Err(ModeError::InvalidMode("TE/TM modes have azimuthal order 0".into()))
            }
            _ => Ok(Self {
                family,
                azimuthal_order,
                radial_order,
            }),
        }
    }

    pub fn family(&self) -> ModeFamily {
        self.family
    }

    pub fn azimuthal_order(&self) -> u32 {
        self.azimuthal_order
    }

    pub fn radial_order(&self) -> u32 {
        self.radial_order
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            ModeFamily::HE => "HE",
            ModeFamily::EH => "EH",
            ModeFamily::TE => "TE",
            ModeFamily::TM => "TM",
        };
        if self.azimuthal_order < 10 && self.radial_order < 10 {
            write!(f, "{fam}{}{}", self.azimuthal_order, self.radial_order)
        } else {
            write!(f, "{fam}{},{}", self.azimuthal_order, self.radial_order)
        }
    }
}

impl FromStr for ModeId {
    type Err = ModeError;

    /// Accepts `HE12`, `TE01`, or `HE10,2` for multi-digit orders.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ModeError::InvalidMode(format!("cannot parse mode label {s:?}"));
        if s.len() < 4 || !s.is_char_boundary(2) {
            return Err(bad());
        }
        let family = match &s[..2].to_ascii_uppercase()[..] {
            "HE" => ModeFamily::HE,
            "EH" => ModeFamily::EH,
            "TE" => ModeFamily::TE,
            "TM" => ModeFamily::TM,
            _ => return Err(bad()),
        };
        let rest = &s[2..];
        let (nu, m) = if let Some((a, b)) = rest.split_once(',') {
            (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
        } else if rest.len() == 2 && rest.bytes().all(|b| b.is_ascii_digit()) {
            ((rest.as_bytes()[0] - b'0') as u32, (rest.as_bytes()[1] - b'0') as u32)
        } else {
            return Err(bad());
        };
        ModeId::new(family, nu, m)
    }
}

impl TryFrom<String> for ModeId {
    type Error = ModeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ModeId> for String {
    fn from(m: ModeId) -> String {
        m.to_string()
    }
}

/// Circular step-index waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec<T> {
    diameter: T,
    core: SellmeierModel<T>,
    cladding_index: T,
}

impl<T: Real> FiberSpec<T> {
    pub fn new(diameter: T, core: SellmeierModel<T>, cladding_index: T) -> Result<Self, ModeError> {
        if !(diameter > T::zero()) || !diameter.is_finite() {
            return Err(ModeError::InvalidFiber(format!("diameter {diameter} must be positive")));
        }
        if !(cladding_index >= T::one()) {
            return Err(ModeError::InvalidFiber(format!(
                "cladding index {cladding_index} must be >= 1"
            )));
        }
        Ok(Self {
            diameter,
            core,
            cladding_index,
        })
    }

    /// Silica microfiber suspended in air.
    pub fn silica_in_air(diameter: T) -> Result<Self, ModeError> {
        Self::new(diameter, SellmeierModel::fused_silica_malitson(), T::one())
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn radius(&self) -> T {
        self.diameter / lit(2.0)
    }

    pub fn core(&self) -> &SellmeierModel<T> {
        &self.core
    }

    pub fn cladding_index(&self) -> T {
        self.cladding_index
    }

    pub fn with_diameter(&self, diameter: T) -> Result<Self, ModeError> {
        Self::new(diameter, self.core.clone(), self.cladding_index)
    }

    /// Core index at `omega`, checked against the guidance condition.
    pub fn core_index(&self, omega: T) -> Result<T, ModeError> {
        let n1 = self.core.index_at_omega(omega)?;
        if !(n1 > self.cladding_index) {
            return Err(ModeError::NoGuidance {
                core: n1.as_f64(),
                cladding: self.cladding_index.as_f64(),
            });
        }
        Ok(n1)
    }

    /// Normalized frequency `V = k₀ a √(n₁² − n₂²)`.
    pub fn v_number(&self, omega: T) -> Result<T, ModeError> {
        let n1 = self.core_index(omega)?;
        let n2 = self.cladding_index;
        Ok(omega / consts::c::<T>() * self.radius() * (n1 * n1 - n2 * n2).sqrt())
    }

    fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.diameter.as_f64().to_bits().hash(&mut h);
        self.cladding_index.as_f64().to_bits().hash(&mut h);
        for t in self.core.terms() {
            t.strength.as_f64().to_bits().hash(&mut h);
            t.resonance_um.as_f64().to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// Eigenvalue of one guided mode at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution<T> {
    pub mode: ModeId,
    pub omega: T,
    pub n_eff: T,
    /// Core transverse parameter `U = a k₀ √(n₁² − n_eff²)`.
    pub u: T,
    /// Cladding decay parameter `W = a k₀ √(n_eff² − n₂²)`.
    pub w: T,
    pub v: T,
    pub core_index: T,
    pub cladding_index: T,
    pub radius: T,
}

impl<T: Real> ModeSolution<T> {
    /// Propagation constant β (rad/m).
    pub fn beta(&self) -> T {
        self.n_eff * self.omega / consts::c::<T>()
    }
}

struct Waveguide<T> {
    n1: T,
    n2: T,
    v: T,
}

impl<T: Real> Waveguide<T> {
    fn n_eff(&self, u: T) -> T {
        let (n1s, n2s) = (self.n1 * self.n1, self.n2 * self.n2);
        (n1s - (n1s - n2s) * u * u / (self.v * self.v)).sqrt()
    }

    fn w(&self, u: T) -> T {
        (self.v * self.v - u * u).max(T::zero()).sqrt()
    }

    /// Pole-free characteristic function and the magnitude of its terms.
    fn characteristic(&self, mode: ModeId, u: T) -> (T, T) {
        let w = self.w(u);
        let (n1s, n2s) = (self.n1 * self.n1, self.n2 * self.n2);
        let two = lit::<T>(2.0);
        match mode.family {
            ModeFamily::TE | ModeFamily::TM => {
                let (j0, j1) = (bessel_j(0, u), bessel_j(1, u));
                let (k0, k1) = (bessel_k_scaled(0, w), bessel_k_scaled(1, w));
                let (ca, cb) = if mode.family == ModeFamily::TE {
                    (T::one(), T::one())
                } else {
                    (n1s, n2s)
                };
                let a = ca * w * j1 * k0;
                let b = cb * u * j0 * k1;
                (a + b, a.abs() + b.abs())
            }
            ModeFamily::HE | ModeFamily::EH => {
                let nu = T::from_u32(mode.azimuthal_order).unwrap();
                let jm = bessel_j(mode.azimuthal_order as i32 - 1, u);
                let j = bessel_j(mode.azimuthal_order as i32, u);
                let jp = two * nu / u * j - jm;
                let jprime = (jm - jp) / two;
                let km = bessel_k_scaled(mode.azimuthal_order as i32 - 1, w);
                let k = bessel_k_scaled(mode.azimuthal_order as i32, w);
                let kp = km + two * nu / w * k;
                let kr = -(km + kp) / (two * k * w);
                let delta = (n1s - n2s) / (two * n1s);
                let n_eff = self.n_eff(u);
                let geom = T::one() / (u * u) + T::one() / (w * w);
                let root = ((delta * kr).powi(2) + (nu * n_eff / self.n1).powi(2) * geom * geom).sqrt();
                let lead = -(n1s + n2s) / (two * n1s) * kr;
                let r = if mode.family == ModeFamily::EH {
                    lead + root
                } else {
                    lead - root
                };
                let g = jprime / u - j * r;
                (g, (jprime / u).abs() + j.abs() * (lead.abs() + root))
            }
        }
    }

    fn scan_points(&self) -> Vec<T> {
        let n = SCAN_POINTS;
        let mut us: Vec<T> = (1..=n)
            .map(|i| self.v * T::from_usize_lossy(i) / T::from_usize_lossy(n + 1))
            .collect();
        // Near-cutoff modes sit within a sliver of U = V.
        for k in 3..=10 {
            us.push(self.v * (T::one() - lit::<T>(10f64.powi(-k))));
        }
        us.insert(0, self.v * lit(1e-4));
        us
    }

    fn roots(&self, mode: ModeId, wanted: usize) -> Result<Vec<T>, ModeError> {
        let us = self.scan_points();
        let vals: Vec<T> = us.iter().map(|&u| self.characteristic(mode, u).0).collect();
        let mut found = Vec::new();
        for i in 0..us.len() - 1 {
            let (fa, fb) = (vals[i], vals[i + 1]);
            if !(fa.is_finite() && fb.is_finite()) || (fa > T::zero()) == (fb > T::zero()) {
                continue;
            }
            let xtol = self.v * T::epsilon();
            let root = brent(|u| self.characteristic(mode, u).0, us[i], us[i + 1], xtol, 200).map_err(|_| {
                ModeError::Refinement {
                    mode,
                    u_lo: us[i].as_f64(),
                    u_hi: us[i + 1].as_f64(),
                }
            })?;
            found.push(root);
            if found.len() >= wanted {
                break;
            }
        }
        Ok(found)
    }
}

fn waveguide<T: Real>(fiber: &FiberSpec<T>, omega: T) -> Result<Waveguide<T>, ModeError> {
    let n1 = fiber.core_index(omega)?;
    Ok(Waveguide {
        n1,
        n2: fiber.cladding_index,
        v: fiber.v_number(omega)?,
    })
}

/// Solves for the eigenvalue of `mode` at angular frequency `omega`.
pub fn solve_mode<T: Real>(fiber: &FiberSpec<T>, mode: ModeId, omega: T) -> Result<ModeSolution<T>, ModeError> {
    let wg = waveguide(fiber, omega)?;
    let m = mode.radial_order as usize;
    let roots = wg.roots(mode, m)?;
    if roots.len() < m {
        return Err(ModeError::NotGuided {
            mode,
            v_number: wg.v.as_f64(),
            cutoff_v: cutoff_v_number(&wg, mode),
        });
    }
    let u = roots[m - 1];
    Ok(ModeSolution {
        mode,
        omega,
        n_eff: wg.n_eff(u),
        u,
        w: wg.w(u),
        v: wg.v,
        core_index: wg.n1,
        cladding_index: wg.n2,
        radius: fiber.radius(),
    })
}

/// Effective index of `mode` at `omega`.
pub fn solve_neff<T: Real>(fiber: &FiberSpec<T>, mode: ModeId, omega: T) -> Result<T, ModeError> {
    solve_mode(fiber, mode, omega).map(|s| s.n_eff)
}

// Smallest V (same indices) at which `mode` has a root, by doubling then
// bisection on the root count.
fn cutoff_v_number<T: Real>(wg: &Waveguide<T>, mode: ModeId) -> Option<f64> {
    let m = mode.radial_order as usize;
    let guided = |v: T| {
        let probe = Waveguide {
            n1: wg.n1,
            n2: wg.n2,
            v,
        };
        probe.roots(mode, m).map(|r| r.len() >= m).unwrap_or(false)
    };
    let mut lo = wg.v;
    let mut hi = wg.v * lit(2.0);
    let mut tries = 0;
    while !guided(hi) {
        lo = hi;
        hi = hi * lit(2.0);
        tries += 1;
        if tries > 12 {
            return None;
        }
    }
    for _ in 0..40 {
        let mid = (lo + hi) / lit(2.0);
        if guided(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi.as_f64())
}

/// Normalized residual `|G| / Σ|terms|` of the characteristic equation at
/// a candidate effective index.
pub fn characteristic_residual<T: Real>(
    fiber: &FiberSpec<T>,
    mode: ModeId,
    omega: T,
    n_eff: T,
) -> Result<T, ModeError> {
    let wg = waveguide(fiber, omega)?;
    let (n1s, n2s) = (wg.n1 * wg.n1, wg.n2 * wg.n2);
    let u = wg.v * ((n1s - n_eff * n_eff) / (n1s - n2s)).sqrt();
    let (g, scale) = wg.characteristic(mode, u);
    Ok(g.abs() / scale)
}

/// Which of the two degenerate azimuthal orientations a hybrid mode takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `e_r ∝ cos νφ`
    Even,
    /// `e_r ∝ sin νφ`
    Odd,
}

/// A solved mode with its normalized transverse field profile.
#[derive(Debug, Clone)]
pub struct GuidedMode<T> {
    solution: ModeSolution<T>,
    orientation: Orientation,
    a1: T,
    a2: T,
    amplitude: T,
}

/// Radial parts of the unnormalized electric field:
/// `E_r = r(ρ)·f(φ)`, `E_φ = φ(ρ)·g(φ)`, `E_z = i z(ρ)·f(φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialField<T> {
    pub radial: T,
    pub azimuthal: T,
    pub longitudinal: T,
}

impl<T: Real> GuidedMode<T> {
    pub fn solution(&self) -> &ModeSolution<T> {
        &self.solution
    }

    pub fn mode(&self) -> ModeId {
        self.solution.mode
    }

    pub fn omega(&self) -> T {
        self.solution.omega
    }

    pub fn n_eff(&self) -> T {
        self.solution.n_eff
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn radius(&self) -> T {
        self.solution.radius
    }

    /// Material index at radial position `r`.
    pub fn index_at(&self, r: T) -> T {
        if r < self.solution.radius {
            self.solution.core_index
        } else {
            self.solution.cladding_index
        }
    }

    /// Unnormalized radial profile at radius `r` (m).
    pub fn radial_field(&self, r: T) -> RadialField<T> {
        let s = &self.solution;
        let a = s.radius;
        let big_r = r / a;
        let (u, w) = (s.u, s.w);
        let beta = s.beta();
        let core = big_r < T::one();
        match s.mode.family {
            ModeFamily::TE => {
                let az = if core {
                    -bessel_j(1, u * big_r) / bessel_j(1, u)
                } else {
                    -k_ratio(1, 1, w, big_r)
                };
                RadialField {
                    radial: T::zero(),
                    azimuthal: az,
                    longitudinal: T::zero(),
                }
            }
            ModeFamily::TM => {
                let ratio = (s.core_index * s.core_index) / (s.cladding_index * s.cladding_index);
                if core {
                    let j1u = bessel_j(1, u);
                    RadialField {
                        radial: bessel_j(1, u * big_r) / j1u,
                        azimuthal: T::zero(),
                        longitudinal: -u / (a * beta) * bessel_j(0, u * big_r) / j1u,
                    }
                } else {
                    RadialField {
                        radial: ratio * k_ratio(1, 1, w, big_r),
                        azimuthal: T::zero(),
                        longitudinal: ratio * w / (a * beta) * k_ratio(0, 1, w, big_r),
                    }
                }
            }
            ModeFamily::HE | ModeFamily::EH => {
                let nu = s.mode.azimuthal_order as i32;
                let (a1, a2) = (self.a1, self.a2);
                if core {
                    let jn = bessel_j(nu, u);
                    let (jm, j, jp) = (
                        bessel_j(nu - 1, u * big_r),
                        bessel_j(nu, u * big_r),
                        bessel_j(nu + 1, u * big_r),
                    );
                    RadialField {
                        radial: -(a1 * jm + a2 * jp) / jn,
                        azimuthal: -(a1 * jm - a2 * jp) / jn,
                        longitudinal: -u / (a * beta) * j / jn,
                    }
                } else {
                    let (km, k, kp) = (
                        k_ratio(nu - 1, nu, w, big_r),
                        k_ratio(nu, nu, w, big_r),
                        k_ratio(nu + 1, nu, w, big_r),
                    );
                    let uw = u / w;
                    RadialField {
                        radial: -uw * (a1 * km - a2 * kp),
                        azimuthal: -uw * (a1 * km + a2 * kp),
                        longitudinal: -u / (a * beta) * k,
                    }
                }
            }
        }
    }

    fn angular(&self, phi: T) -> (T, T) {
        let nu = T::from_u32(self.solution.mode.azimuthal_order).unwrap();
        match self.solution.mode.family {
            ModeFamily::TE | ModeFamily::TM => (T::one(), T::one()),
            _ => match self.orientation {
                Orientation::Even => ((nu * phi).cos(), -(nu * phi).sin()),
                Orientation::Odd => ((nu * phi).sin(), (nu * phi).cos()),
            },
        }
    }

    /// Normalized electric field `(E_x, E_y, E_z)` at `(x, y)`.
    pub fn e_field(&self, x: T, y: T) -> [Complex<T>; 3] {
        let r = (x * x + y * y).sqrt();
        let phi = y.atan2(x);
        let rf = self.radial_field(r);
        let (f, g) = self.angular(phi);
        let er = rf.radial * f * self.amplitude;
        let ep = rf.azimuthal * g * self.amplitude;
        let ez = rf.longitudinal * f * self.amplitude;
        let (c, s) = (phi.cos(), phi.sin());
        [
            Complex::new(er * c - ep * s, T::zero()),
            Complex::new(er * s + ep * c, T::zero()),
            Complex::new(T::zero(), ez),
        ]
    }

    /// Normalized displacement field `d = ε₀ n² e` at `(x, y)`.
    pub fn d_field(&self, x: T, y: T) -> [Complex<T>; 3] {
        let n = self.index_at((x * x + y * y).sqrt());
        let scale = eps0::<T>() * n * n;
        self.e_field(x, y).map(|c| c * scale)
    }

    /// `∫ d*·d / (ε₀ n²) dA` from radial Gauss–Legendre quadrature; unity for
    /// a freshly constructed mode.
    pub fn normalization_integral(&self) -> T {
        self.raw_power() * self.amplitude * self.amplitude
    }

    // ε₀ ∫ n²|e|² dA for the unnormalized profile.
    fn raw_power(&self) -> T {
        let s = &self.solution;
        let a = s.radius;
        let (cf, cg) = match s.mode.family {
            ModeFamily::TE | ModeFamily::TM => (T::TAU(), T::TAU()),
            _ => (T::PI(), T::PI()),
        };
        let density = |r: T| {
            let f = self.radial_field(r);
            let n = self.index_at(r);
            r * n
                * n
                * (cf * f.radial * f.radial + cg * f.azimuthal * f.azimuthal + cf * f.longitudinal * f.longitudinal)
        };
        let core = Rule::gauss_legendre(64, T::zero(), a).integrate(density);
        let mut clad = T::zero();
        let w = s.w.max(lit(1e-3));
        let s_max = lit::<T>(50.0) / w;
        let mut lo = T::zero();
        let mut hi = lit::<T>(0.25) / w.max(T::one());
        while lo < s_max {
            clad = clad + Rule::gauss_legendre(24, a * (T::one() + lo), a * (T::one() + hi)).integrate(density);
            lo = hi;
            hi = hi * lit(2.0);
        }
        eps0::<T>() * (core + clad)
    }

    /// Copy with the field amplitude multiplied by `factor`; the result no
    /// longer satisfies the unit normalization.
    pub fn scaled(&self, factor: T) -> Self {
        let mut m = self.clone();
        m.amplitude = m.amplitude * factor;
        m
    }

    /// Largest |component| of the normalized field along the radial profile.
    pub fn peak_magnitude(&self) -> T {
        let a = self.solution.radius;
        (0..=200)
            .map(|i| {
                let f = self.radial_field(a * lit::<T>(1.2) * T::from_usize_lossy(i) / lit(200.0));
                f.radial.abs().max(f.azimuthal.abs()).max(f.longitudinal.abs())
            })
            .fold(T::zero(), T::max)
            * self.amplitude.abs()
    }

    /// Radius beyond which every field component is below `tol` times the
    /// peak magnitude.
    pub fn decay_radius(&self, tol: T) -> T {
        let a = self.solution.radius;
        let peak = self.peak_magnitude();
        let mag = |r: T| {
            let f = self.radial_field(r);
            f.radial.abs().max(f.azimuthal.abs()).max(f.longitudinal.abs()) * self.amplitude.abs()
        };
        let mut lo = a;
        let mut hi = a * lit(1.5);
        while mag(hi) > tol * peak {
            lo = hi;
            hi = hi * lit(1.5);
            if hi > a * lit(1e4) {
                return hi;
            }
        }
        for _ in 0..60 {
            let mid = (lo + hi) / lit(2.0);
            if mag(mid) > tol * peak {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Half-width of the square sampling window: three core radii, extended
    /// until the field has decayed below 1e-6 of its peak.
    pub fn sampling_half_width(&self) -> T {
        (lit::<T>(3.0) * self.solution.radius).max(self.decay_radius(lit(1e-6)))
    }
}

// K_n(W R) / K_m(W), computed from scaled functions.
fn k_ratio<T: Real>(n: i32, m: i32, w: T, big_r: T) -> T {
    bessel_k_scaled(n, w * big_r) / bessel_k_scaled(m, w) * (-(w * (big_r - T::one()))).exp()
}

/// Solves `mode` and builds its normalized field profile.
pub fn mode_fields<T: Real>(
    fiber: &FiberSpec<T>,
    mode: ModeId,
    omega: T,
    orientation: Orientation,
) -> Result<GuidedMode<T>, ModeError> {
    let solution = solve_mode(fiber, mode, omega)?;
    Ok(guided_mode_from(solution, orientation))
}

/// Builds the field profile for an already solved eigenvalue.
pub fn guided_mode_from<T: Real>(solution: ModeSolution<T>, orientation: Orientation) -> GuidedMode<T> {
    let (a1, a2) = match solution.mode.family {
        ModeFamily::HE | ModeFamily::EH => hybrid_coefficients(&solution),
        _ => (T::zero(), T::zero()),
    };
    let orientation = match solution.mode.family {
        ModeFamily::TE | ModeFamily::TM => Orientation::Even,
        _ => orientation,
    };
    let mut m = GuidedMode {
        solution,
        orientation,
        a1,
        a2,
        amplitude: T::one(),
    };
    m.amplitude = T::one() / m.raw_power().sqrt();
    m
}

fn hybrid_coefficients<T: Real>(s: &ModeSolution<T>) -> (T, T) {
    let nu = s.mode.azimuthal_order as i32;
    let nuf = T::from_i32(nu).unwrap();
    let (u, w, v) = (s.u, s.w, s.v);
    let two = lit::<T>(2.0);
    let jn = bessel_j(nu, u);
    let b1 = (bessel_j(nu - 1, u) - bessel_j(nu + 1, u)) / (two * u * jn);
    let kn = bessel_k_scaled(nu, w);
    let b2 = -(bessel_k_scaled(nu - 1, w) + bessel_k_scaled(nu + 1, w)) / (two * w * kn);
    let f2 = (v / (u * w)).powi(2) * nuf / (b1 + b2);
    ((f2 - T::one()) / two, (f2 + T::one()) / two)
}

/// Group index, group velocity and GVD of one mode at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDispersion<T> {
    pub mode: ModeId,
    pub omega0: T,
    pub n_eff: T,
    pub group_index: T,
    /// m/s
    pub group_velocity: T,
    /// s²/m
    pub beta2: T,
}

/// Dispersion from a five-point central stencil with the default step,
/// checked against the same stencil at half the step.
pub fn dispersion_at<T: Real>(fiber: &FiberSpec<T>, mode: ModeId, omega: T) -> Result<ModeDispersion<T>, ModeError> {
    let coarse = dispersion_with_step(fiber, mode, omega, lit(DISPERSION_STEP))?;
    let fine = dispersion_with_step(fiber, mode, omega, lit(DISPERSION_STEP / 2.0))?;
    let tol = lit::<T>(5e-3);
    // 1 ps²/km floor keeps near-zero GVD from tripping a relative test
    let beta2_floor = lit::<T>(1e-27);
    let ng_ok = (coarse.group_index - fine.group_index).abs() <= tol * fine.group_index;
    let b2_ok = (coarse.beta2 - fine.beta2).abs() <= tol * fine.beta2.abs().max(beta2_floor);
    if !(ng_ok && b2_ok) {
        return Err(ModeError::UnstableStencil {
            mode,
            omega: omega.as_f64(),
        });
    }
    Ok(fine)
}

/// Dispersion from a five-point central stencil with relative step `rel_step`.
pub fn dispersion_with_step<T: Real>(
    fiber: &FiberSpec<T>,
    mode: ModeId,
    omega: T,
    rel_step: T,
) -> Result<ModeDispersion<T>, ModeError> {
    let h = rel_step * omega;
    let mut n = [T::zero(); 5];
    for (k, slot) in n.iter_mut().enumerate() {
        let w = omega + h * T::from_i32(k as i32 - 2).unwrap();
        *slot = match solve_neff(fiber, mode, w) {
            Ok(v) => v,
            Err(ModeError::NotGuided { .. }) => {
                return Err(ModeError::StencilCrossesCutoff {
                    mode,
                    omega: omega.as_f64(),
                })
            }
            Err(e) => return Err(e),
        };
    }
    let (eight, twelve, sixteen, thirty) = (lit::<T>(8.0), lit::<T>(12.0), lit::<T>(16.0), lit::<T>(30.0));
    let d1 = (n[0] - eight * n[1] + eight * n[3] - n[4]) / (twelve * h);
    let d2 = (-n[0] + sixteen * n[1] - thirty * n[2] + sixteen * n[3] - n[4]) / (twelve * h * h);
    let c = consts::c::<T>();
    let group_index = n[2] + omega * d1;
    Ok(ModeDispersion {
        mode,
        omega0: omega,
        n_eff: n[2],
        group_index,
        group_velocity: c / group_index,
        beta2: (lit::<T>(2.0) * d1 + omega * d2) / c,
    })
}

/// Pump and fundamental-band mode pairing for the phasematch search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhasematchModes {
    pub pump: ModeId,
    pub seed: ModeId,
}

impl Default for PhasematchModes {
    fn default() -> Self {
        Self {
            pump: ModeId::HE12,
            seed: ModeId::HE11,
        }
    }
}

/// `n_eff(pump) − n_eff(seed)` at diameter `d`; a mode below cutoff is
/// assigned the cladding index, which is its limit at cutoff.
pub fn phasematch_mismatch<T: Real>(
    core: &SellmeierModel<T>,
    cladding_index: T,
    omega_p: T,
    omega_s: T,
    diameter: T,
    modes: PhasematchModes,
) -> Result<T, ModeError> {
    let fiber = FiberSpec::new(diameter, core.clone(), cladding_index)?;
    let neff = |mode, omega| match solve_neff(&fiber, mode, omega) {
        Ok(n) => Ok(n),
        Err(ModeError::NotGuided { .. }) => Ok(cladding_index),
        Err(e) => Err(e),
    };
    Ok(neff(modes.pump, omega_p)? - neff(modes.seed, omega_s)?)
}

/// Diameter at which the pump-band and fundamental-band effective indices
/// coincide, refined until `|Δn| < 1e-9`.
pub fn find_phasematch_diameter<T: Real>(
    core: &SellmeierModel<T>,
    cladding_index: T,
    omega_p: T,
    omega_s: T,
    bracket: (T, T),
    modes: PhasematchModes,
) -> Result<T, ModeError> {
    let (lo, hi) = bracket;
    let dn = |d: T| phasematch_mismatch(core, cladding_index, omega_p, omega_s, d, modes);
    let (dn_lo, dn_hi) = (dn(lo)?, dn(hi)?);
    let tiny = lit::<T>(1e-13);
    if dn_lo.abs() < tiny && dn_hi.abs() < tiny && dn((lo + hi) / lit(2.0))?.abs() < tiny {
        return Err(ModeError::DegenerateBracket);
    }
    let mut failure = None;
    let root = brent(
        |d| match dn(d) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        },
        lo,
        hi,
        hi * lit(1e-15),
        200,
    )
    .map_err(|e| ModeError::NoPhasematch {
        d_lo: lo.as_f64(),
        d_hi: hi.as_f64(),
        dn_lo: e.f_lo.as_f64(),
        dn_hi: e.f_hi.as_f64(),
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root)
}

/// Effective-index memo keyed by fiber, mode and frequency.
///
/// Readers share a read lock; a miss solves outside the lock and inserts
/// under the write lock.
#[derive(Debug, Default)]
pub struct NeffCache {
    entries: RwLock<HashMap<(u64, ModeId, u64), f64>>,
}

impl NeffCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_solve<T: Real>(&self, fiber: &FiberSpec<T>, mode: ModeId, omega: T) -> Result<T, ModeError> {
        let key = (fiber.fingerprint(), mode, omega.as_f64().to_bits());
        if let Some(&v) = self.entries.read().expect("cache lock").get(&key) {
            return Ok(lit(v));
        }
        let n = solve_neff(fiber, mode, omega)?;
        self.entries.write().expect("cache lock").insert(key, n.as_f64());
        Ok(n)
    }
}
