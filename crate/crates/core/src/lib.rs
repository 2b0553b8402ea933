//! Design of photon-pair sources driven by a strong pump and a weak seed in
//! a third-order nonlinear fiber: exact vector modes of a step-index fiber,
//! nonlinear overlap areas, joint spectral amplitudes with their Schmidt
//! decomposition, and spontaneous Raman noise.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the double-precision types most callers want.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod consts;
pub mod coupling;
pub mod jsa;
pub mod material;
pub mod modes;
pub mod quadrature;
pub mod raman;
pub mod roots;
pub mod scalar;
pub mod special;

pub type Sellmeier = material::SellmeierModel<f64>;
pub type Fiber = modes::FiberSpec<f64>;
pub type Mode = modes::GuidedMode<f64>;
pub type Dispersion = modes::ModeDispersion<f64>;
pub type Chi3 = coupling::Chi3Model<f64>;
pub type Area = coupling::EffectiveArea<f64>;
pub type Pulse = jsa::PulseSpec<f64>;
pub type Band = jsa::BandDispersion<f64>;
pub type Phase = jsa::PhaseModel<f64>;
pub type Jsa = jsa::JsaGrid<f64>;
pub type Metrics = jsa::PairMetrics<f64>;
pub type Raman = raman::RamanModel<f64>;
