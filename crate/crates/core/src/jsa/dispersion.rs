//! Propagation constants of the fundamental and pump bands.

use crate::chebyshev::{Chebyshev, OutOfInterval};
use crate::consts;
use crate::modes::{solve_neff, FiberSpec, ModeError, ModeId};
use crate::scalar::{lit, Real};

/// Wavenumber `k(ω)` of one band.
#[derive(Debug, Clone, PartialEq)]
pub enum BandDispersion<T> {
    /// Second-order expansion about `omega0`.
    Taylor { omega0: T, k0: T, k1: T, k2: T },
    /// Interpolated effective index from the mode solver.
    Table { n_eff: Chebyshev<T>, dn_eff: Chebyshev<T> },
}

impl<T: Real> BandDispersion<T> {
    /// Expansion from an effective index, group index and GVD (s²/m).
    pub fn taylor(omega0: T, n_eff: T, group_index: T, beta2: T) -> Self {
        let c = consts::c::<T>();
        Self::Taylor {
            omega0,
            k0: n_eff * omega0 / c,
            k1: group_index / c,
            k2: beta2,
        }
    }

    /// Chebyshev table of `n_eff` for `mode` on `[lo, hi]` with `nodes`
    /// solver evaluations.
    pub fn from_solver(fiber: &FiberSpec<T>, mode: ModeId, lo: T, hi: T, nodes: usize) -> Result<Self, ModeError> {
        let n_eff = Chebyshev::from_fn(nodes, lo, hi, |w| solve_neff(fiber, mode, w))?;
        let dn_eff = n_eff.derivative();
        Ok(Self::Table { n_eff, dn_eff })
    }

    pub fn k(&self, omega: T) -> Result<T, OutOfInterval> {
        match self {
            Self::Taylor { omega0, k0, k1, k2 } => {
                let d = omega - *omega0;
                Ok(*k0 + *k1 * d + *k2 * d * d / lit(2.0))
            }
            Self::Table { n_eff, .. } => Ok(n_eff.eval(omega)? * omega / consts::c::<T>()),
        }
    }

    /// `dk/dω = 1/v_g`.
    pub fn k1(&self, omega: T) -> Result<T, OutOfInterval> {
        match self {
            Self::Taylor { omega0, k1, k2, .. } => Ok(*k1 + *k2 * (omega - *omega0)),
            Self::Table { n_eff, dn_eff } => Ok((n_eff.eval(omega)? + omega * dn_eff.eval(omega)?) / consts::c::<T>()),
        }
    }

    pub fn group_velocity(&self, omega: T) -> Result<T, OutOfInterval> {
        Ok(T::one() / self.k1(omega)?)
    }

    /// Interpolated effective index (Taylor bands report `k c / ω`).
    pub fn n_eff(&self, omega: T) -> Result<T, OutOfInterval> {
        match self {
            Self::Table { n_eff, .. } => n_eff.eval(omega),
            _ => Ok(self.k(omega)? * consts::c::<T>() / omega),
        }
    }

    fn with_offset(self, dk0: T) -> Self {
        match self {
            Self::Taylor { omega0, k0, k1, k2 } => Self::Taylor {
                omega0,
                k0: k0 + dk0,
                k1,
                k2,
            },
            table => table,
        }
    }
}

/// Phase mismatch `Δk = k_p(ω₄) − k(ω₃) − k(ω₂) − k(ω₁)` with the three
/// low-frequency photons on one band and the pump on another.
///
/// `beta2_scale` multiplies the curvature of the fundamental band about
/// `seed_center`, leaving its value and slope there unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseModel<T> {
    pub seed_band: BandDispersion<T>,
    pub pump_band: BandDispersion<T>,
    pub seed_center: T,
    pub beta2_scale: T,
}

impl<T: Real> PhaseModel<T> {
    pub fn new(seed_band: BandDispersion<T>, pump_band: BandDispersion<T>, seed_center: T) -> Self {
        Self {
            seed_band,
            pump_band,
            seed_center,
            beta2_scale: T::one(),
        }
    }

    /// Two Taylor bands with the pump offset chosen so that
    /// `Δk(ω_s, ω_s, ω_s, 3ω_s) = 0`.
    pub fn taylor_phasematched(
        seed: BandDispersion<T>,
        pump: BandDispersion<T>,
        seed_center: T,
    ) -> Result<Self, OutOfInterval> {
        let three = lit::<T>(3.0);
        let offset = three * seed.k(seed_center)? - pump.k(three * seed_center)?;
        Ok(Self::new(seed, pump.with_offset(offset), seed_center))
    }

    pub fn with_beta2_scale(mut self, scale: T) -> Self {
        self.beta2_scale = scale;
        self
    }

    pub fn k_seed(&self, omega: T) -> Result<T, OutOfInterval> {
        let k = self.seed_band.k(omega)?;
        if self.beta2_scale == T::one() {
            return Ok(k);
        }
        let w0 = self.seed_center;
        let linear = self.seed_band.k(w0)? + self.seed_band.k1(w0)? * (omega - w0);
        Ok(linear + self.beta2_scale * (k - linear))
    }

    pub fn k1_seed(&self, omega: T) -> Result<T, OutOfInterval> {
        let k1 = self.seed_band.k1(omega)?;
        if self.beta2_scale == T::one() {
            return Ok(k1);
        }
        let k1c = self.seed_band.k1(self.seed_center)?;
        Ok(k1c + self.beta2_scale * (k1 - k1c))
    }

    pub fn vg_seed(&self, omega: T) -> Result<T, OutOfInterval> {
        Ok(T::one() / self.k1_seed(omega)?)
    }

    pub fn k_pump(&self, omega: T) -> Result<T, OutOfInterval> {
        self.pump_band.k(omega)
    }

    pub fn vg_pump(&self, omega: T) -> Result<T, OutOfInterval> {
        self.pump_band.group_velocity(omega)
    }

    pub fn phase_mismatch(&self, w1: T, w2: T, w3: T, w4: T) -> Result<T, OutOfInterval> {
        Ok(self.k_pump(w4)? - self.k_seed(w3)? - self.k_seed(w2)? - self.k_seed(w1)?)
    }

    /// Effective GVD of the fundamental band at its centre.
    pub fn beta2_seed(&self) -> Result<T, OutOfInterval> {
        let w0 = self.seed_center;
        let h = w0 * lit(1e-4);
        let d = (self.k1_seed(w0 + h)? - self.k1_seed(w0 - h)?) / (lit::<T>(2.0) * h);
        Ok(d)
    }
}
