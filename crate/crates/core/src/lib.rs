//! Layered contraction decompositions of planar graphs and the
//! enumerate-contract-DP framework for odd cycle transversal and edge
//! bipartization.

pub mod contraction;
pub mod embedding;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod layering;
mod planarity;
pub mod solvers;
pub mod treedec;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Bipartition, Edge, Graph, QuotientGraph, Vertex};
