//! Exact reconstruction of D-dimensional vertex algebras from chiral data.

pub mod chiral;
pub mod conflie;
pub mod error;
pub mod exactnum;
pub mod gradedlinalg;
pub mod io;
pub mod models;
pub mod polyharm;
pub mod reconstruct;
pub mod report;

pub use error::{Error, Result};
pub use exactnum::{Rational, Scalar};
