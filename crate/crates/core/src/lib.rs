pub mod anisotropic;
pub mod cli;
pub mod error;
pub mod io;
pub mod norms;
pub mod schrodinger;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
