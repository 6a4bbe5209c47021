pub mod angular;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod json;
pub mod maxent;
pub mod quantum;
pub mod reur;
pub mod special;

pub use error::{Error, Result};
