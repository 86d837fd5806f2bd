//! Dressed zero-range potential scattering.
//!
//! Generalized zero-range potentials and their S-matrices, Darboux/Crum dressing of
//! partial phases, a Numerov radial integrator used as an independent check, multi-center
//! `X_n` / `YX_n` phase equations with a determinant-based root finder, and the silane
//! model built on top of them.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases below
//! name the `f64` instantiations used by the command line tool.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod darboux;
pub mod error;
pub mod gzrp;
pub mod io;
pub mod linalg;
pub mod model;
pub mod multicenter;
pub mod radial_oracle;
pub mod scalar;
pub mod specfun;

pub use error::{Result, ZrpError};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type PhaseShift64 = gzrp::PhaseShift<f64>;
pub type GzrpChannel64 = gzrp::GzrpChannel<f64>;
pub type PropFunction64 = darboux::PropFunction<f64>;
pub type DressingChain64 = darboux::DressingChain<f64>;
pub type RadialGrid64 = darboux::RadialGrid<f64>;
pub type XnGeometry64 = multicenter::XnGeometry<f64>;
pub type YxnGeometry64 = multicenter::YxnGeometry<f64>;
pub type CrossSectionSeries64 = multicenter::CrossSectionSeries<f64>;
pub type SilaneModel64 = model::SilaneModel<f64>;
pub type EnergyGrid64 = model::EnergyGrid<f64>;
