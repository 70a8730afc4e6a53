//! Moyal-deformed 2-sphere: star products, deformed geometry, auto-parallel
//! flow and its Fourier p-mode system.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod jet;
pub mod modes;
pub mod par;
pub mod starprod;

pub use analytic::AnalyticFn1D;
pub use error::{Error, Result};
pub use jet::Jet;
pub use starprod::{Deformation, DeformationMode, TrigPoly};
