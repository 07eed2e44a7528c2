//! Continuous quaternion shearlet transform on sampled grids over R^(2n).

pub mod atoms;
pub mod battery;
pub mod digamma;
pub mod error;
pub mod fft;
pub mod group;
pub mod io;
pub mod qft;
pub mod quaternion;
pub mod signal;
pub mod sum;
pub mod transform;
pub mod uncertainty;

pub use error::{Error, IoError, Result};
pub use quaternion::Quaternion;
pub use signal::{inner_q, inner_sc, lp_norm, Grid, QSignal};
