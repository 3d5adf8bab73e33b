//! Hyperplane, order and boundary combinatorics on finite balls of paraclique
//! graphs, with Coxeter groups as the main source of examples.

pub mod boundary;
pub mod coxeter;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod graph;
pub mod order;
pub mod par;
pub mod scenario;
pub mod walls;

pub use error::{Error, Result};
