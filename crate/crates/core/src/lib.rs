//! Random Apollonian networks (RAN) and evolving Apollonian networks (EAN)
//! in `d` dimensions.
//!
//! The crate is organised around the vertex coding of the network: every
//! vertex and every active clique carries a word over the alphabet
//! `{1, ..., d+1}` recording its subdivision ancestry. Neighbourhoods,
//! shortcut hops and graph distances can all be read off these words.
//!
//! - [`coding`]: cut operators, block decompositions and code distances.
//! - [`generator`]: step-by-step growth of RAN and EAN graphs.
//! - [`metrics`]: degree laws, clustering and BFS distances.
//! - [`theory`]: limit constants, the coupon-collector law, the rate
//!   function and the diameter optimisation.
//! - [`experiments`]: the reproducible Monte Carlo harness.

pub mod coding;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod metrics;
pub mod rng;
pub mod special;
pub mod theory;

pub use coding::{Code, Symbol};
pub use error::{Error, Result};
pub use generator::{GraphState, Model, QSchedule, VertexId, VertexRecord};
pub use theory::TheoryBundle;
