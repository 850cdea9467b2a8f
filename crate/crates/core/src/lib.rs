//! Counting integral points of bounded log-anticanonical height on the
//! singular quartic del Pezzo surface
//! `x0² + x0 x3 + x2 x4 = x1 x3 - x2² = 0` of type `A1 + A3`, and the
//! constants that predict their growth.

pub mod arith;
pub mod census;
pub mod constants;
pub mod picard;
pub mod surface;
pub mod torsor;

pub use census::CensusError;
pub use constants::{ConstantsError, Prediction, PredictionReport};
pub use picard::{CurveSet, DivisorClass};
pub use surface::{BoundaryCase, ClemensFace, SurfaceError, SurfacePoint};
pub use torsor::{TorsorError, TorsorPoint};
