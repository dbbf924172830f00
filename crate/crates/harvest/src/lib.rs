pub mod config;
pub mod correlations;
pub mod elements;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
