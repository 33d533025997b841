//! Large-degree evaluation of Gegenbauer polynomials and their companion
//! solutions through Bessel-type uniform asymptotic expansions, with
//! computable error bounds and an extended-precision reference oracle.

pub mod bigreal;
pub mod coeff;
pub mod domain;
pub mod error;
pub mod harness;
pub mod lg;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod uniform;

pub use domain::{make_params, map_point, map_theta, Params, PlanePoint, Region};
pub use error::{Error, Result};
