//! Construction and certification of witness points that stay far from the
//! zero sets of given polynomials, together with numerical checks of the
//! related quantitative bounds (Gaussian-weighted products on complex balls,
//! weighted products on the real sphere, a Bernstein-type lemma for
//! trigonometric polynomials, cylinder coverings, and several unit-vector
//! configuration bounds).

pub mod bernstein;
pub mod corollaries;
pub mod covering;
pub mod distance;
pub mod error;
pub mod homogenization;
pub mod maximizer;
pub mod num;
pub mod objective;
pub mod poly;
pub mod schema;
pub mod trig;

pub(crate) mod linalg;

pub use error::{Error, Result};
pub use num::C64;
pub use objective::{Domain, PlankInstance, PlankItem};
pub use poly::{Field, MultiPoly};
pub use trig::TrigPoly;
