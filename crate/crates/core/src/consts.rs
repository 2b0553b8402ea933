//! CODATA physical constants in SI units.

use crate::scalar::{lit, Real};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;

#[inline]
pub fn c<T: Real>() -> T {
    lit(SPEED_OF_LIGHT)
}

#[inline]
pub fn eps0<T: Real>() -> T {
    lit(VACUUM_PERMITTIVITY)
}

#[inline]
pub fn hbar<T: Real>() -> T {
    lit(HBAR)
}

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
#[inline]
pub fn omega_from_wavelength<T: Real>(lambda: T) -> T {
    T::TAU() * c::<T>() / lambda
}

/// Vacuum wavelength (m) for angular frequency `omega` (rad/s).
#[inline]
pub fn wavelength_from_omega<T: Real>(omega: T) -> T {
    T::TAU() * c::<T>() / omega
}
