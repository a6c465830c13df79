//! Design toolkit for inductive (near-field) wireless power links to
//! implants: two-port algebra, coil-pair optimization, planar spiral
//! synthesis, tissue embedding, L-section matching, efficiency and SAR
//! budgets, rectifier exploration and the end-to-end design pipeline.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coil;
pub mod design;
pub mod error;
pub mod harvester;
pub mod imn;
pub mod link_eval;
pub mod netcore;
pub mod spiral;
pub mod sweep;
pub mod tissue;
pub mod touchstone;

pub use error::{Error, Result};
pub use netcore::{ComplexValue, PortPair, Representation, TwoPortMatrix};
