//! Walsh–Fourier analysis on the dyadic group at finite resolution, with
//! Fejér and Nörlund summation and numerical checks of their approximation
//! bounds in `L^p`.
//!
//! All objects live at a fixed resolution `M`: functions are constant on the
//! `2^M` cosets of `I_M`, so everything supported on frequencies below `2^M`
//! is computed without discretization error.

pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kernels;
pub mod means;
pub mod metrics;
pub mod par;
pub mod transform;
pub mod weights;

pub use dyadic::{DyadicInterval, GroupElement, Resolution, StepFunction};
pub use error::{Error, Result};
pub use experiments::{BoundReport, MeanSpec, RateReport, Subject, Theorem};
pub use means::{MeanMethod, MeanResult};
pub use metrics::{LipVariant, ModulusProfile};
pub use transform::Spectrum;
pub use weights::{Monotonicity, WeightSequence, WeightSpec};
