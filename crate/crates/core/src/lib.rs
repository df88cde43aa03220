pub mod cli;
pub mod crc;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod factor_graph;
pub mod polar;
pub mod scheme;
pub mod sim;

pub use error::{Error, Result};
