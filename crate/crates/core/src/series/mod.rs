//! Exact power series and polynomials over Q, Padé reconstruction, and complex roots.

pub mod mp;
mod pade;
mod poly;
mod power;
mod rational;
mod roots;

pub use pade::pade_reconstruct;
pub use poly::Poly;
pub use power::{log_det_series, PowerSeries};
pub use rational::RationalFunction;
pub use roots::{roots_with_moduli, roots_with_options, Root, RootCluster, DEFAULT_DIGITS, DEFAULT_RESIDUAL};
pub(crate) use poly::to_f64;
pub(crate) use roots::{expand_inverse_factor, round_float};
