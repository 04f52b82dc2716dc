//! Max-sum trees and matchings of Euclidean point sets, and certificates
//! that the balls induced by their edges share a common point.

pub mod cli;
pub mod error;
pub mod geometry;
mod linalg;
pub mod graphs;
pub mod hunt;
pub mod improve;
pub mod io;
pub mod minimax;
pub mod svg;
pub mod tverberg;

pub use error::{Error, Result};
