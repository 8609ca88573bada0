//! Kochen-Specker sets and gadgets: construction, exact verification and the
//! quantities built on them (zero-error capacities, binary consistent boxes).
//!
//! Graphs are labelled and kept in label order; vector sets carry their own
//! tolerance. Everything is deterministic.

pub mod binary_box;
pub mod coloring;
pub mod constructions;
pub mod error;
pub mod graph;
pub mod manifest;
pub mod orthorep;
pub mod sat;
pub mod zero_error;

pub use coloring::{Coloring, GadgetCertificate, GadgetKind};
pub use constructions::GadgetBlueprint;
pub use error::{Error, Result};
pub use graph::{CliqueCover, Graph};
pub use orthorep::{FaithfulnessReport, VectorSet};
pub use sat::CnfInstance;
