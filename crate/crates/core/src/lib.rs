pub mod error;
pub mod geometry;
pub mod hands;
pub mod math;
pub mod metrics;
pub mod motion;
pub mod pipeline;
pub mod plot;
pub mod revision;
pub mod sdf;
pub mod sync;
pub mod synthetic;

pub use error::{Error, Result};
