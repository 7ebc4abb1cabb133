//! Realizable dimension of one-dimensionally periodic graphs.
//!
//! The crate works with quotient Z-labelled graphs ([`gain_graph`]), tests
//! Z-labelled and finite minors ([`minor`]), decides 1- and 2-realizability
//! with certificates ([`realize`]), and analyses periodic frameworks through
//! rigidity matrices and equilibrium stresses ([`numeric`]). Text and JSON
//! documents live in [`io`].

pub mod gain_graph;
pub mod simple_graph;

pub use gain_graph::{EdgeId, GainEdge, GainGraph, GraphError, Piece, Vertex};
pub use simple_graph::SimpleGraph;
pub mod minor;
pub mod io;
pub mod numeric;
pub mod realize;
