pub mod cli;
pub mod cnotcase;
pub mod discord;
pub mod error;
pub mod gates;
pub mod qmat;
pub mod qstate;

pub use error::{Error, Result};
