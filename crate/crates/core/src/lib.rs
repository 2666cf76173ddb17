pub mod bounds;
pub mod corrector;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
mod gram;
pub mod lp;
pub mod seed;
pub mod separability;
pub mod whitening;

pub use error::{Error, Result};
