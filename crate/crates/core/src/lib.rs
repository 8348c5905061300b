//! Blaschke zero sets with a prescribed invertibility threshold, certified
//! evaluation of periodic Blaschke products, covering checks, finite sections
//! of the model operator and restricted-invertibility searches.
//!
//! Everything numerical is generic over [`Real`] (`f32`, `f64`); the `*64`
//! aliases below are the double-precision instantiations used by the CLI.

// `!(x > 0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod cache;
pub mod construction;
pub mod covering;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model_op;
pub mod ric;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{Chart, Point};
pub use scalar::Real;

pub type Point64 = geometry::Point<f64>;
pub type RowSpec64 = blaschke::RowSpec<f64>;
pub type ProductSpec64 = blaschke::ProductSpec<f64>;
pub type CertifiedValue64 = blaschke::CertifiedValue<f64>;
