//! Mean interference at the typical node of Matérn hard-core point processes.
//!
//! The crate covers three processes: Matérn type I, Matérn type II and a
//! Poisson process with a hole of radius δ around the typical point (the
//! reference used for the excess interference ratio). Every quantity is
//! available analytically, from closed forms and quadrature, and by
//! Palm-conditioned Monte Carlo simulation.
//!
//! ```
//! use hardcore::{HardCoreParams, PathLossModel, ProcessKind, QuadratureConfig};
//! use hardcore::interference::{eir, EirMethod};
//!
//! let params = HardCoreParams::new(2.0, 2.0, ProcessKind::MaternI).unwrap();
//! let pathloss = PathLossModel::power_law(3.0, 0.0).unwrap();
//! let report = eir(&params, &pathloss, EirMethod::Quadrature, &QuadratureConfig::default()).unwrap();
//! assert!(report.eir_db > 28.0 && report.eir_db < 32.0);
//! ```

pub mod analytic;
pub mod cli;
mod error;
pub mod format;
pub mod interference;
pub mod model;
pub mod numerics;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{
    intensity, FadingModel, HardCoreParams, InterferenceEstimate, PathLossModel, PathLossShape,
    PointPattern, ProcessKind, QuadratureConfig,
};
