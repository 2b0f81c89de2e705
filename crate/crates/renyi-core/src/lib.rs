//! Sandwiched Rényi divergences and the entropic quantities built on them,
//! for small finite-dimensional quantum states.

pub mod accumulation;
pub mod chain;
pub mod channel;
pub mod channel_opt;
pub mod divergence;
pub mod entropic;
pub mod error;
pub mod gradient;
pub mod io;
pub mod layout;
pub mod linalg;
pub mod operator;
pub mod random;
pub mod search;

pub use error::{Error, Result};
