pub mod exactla;
pub mod blended;
pub mod cli;
pub mod error;
pub mod extmod;
pub mod genext;
pub mod motivic;
pub mod mtdemo;
pub mod oracle;
pub mod random;
pub mod repcat;

pub use error::{Error, Result};
