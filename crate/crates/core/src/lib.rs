pub mod catalog;
pub mod classify;
pub mod cli;
pub mod curvature;
pub mod dsl;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod metric;
pub mod point;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod schwarz;
pub mod spectra;
pub mod wirtinger;

pub use error::{GeomError, Result};
pub use point::ChartPoint;
