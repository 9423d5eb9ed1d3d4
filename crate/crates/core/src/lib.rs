//! Hecke eigenvalues of weight-2 and weight-3 newforms, their Sato-Tate
//! classes in `U(2)_m`, and numerical checks of what equidistribution of
//! those classes implies.

pub mod equidist;
pub mod error;
pub mod forms;
pub mod lfunc;
pub mod numtheory;
pub mod ordinarity;
pub mod run;
pub mod satake;
pub mod stgroup;
pub mod weightlat;

pub use error::{Error, Result};
