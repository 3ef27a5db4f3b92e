//! Zeta functions of varieties over finite fields from point counts, their weight
//! decompositions, even/odd spectra, and the L-function layer over Q.

pub mod arith;
pub mod counting;
pub mod error;
pub mod lfun;
pub mod ncspec;
pub mod report;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
