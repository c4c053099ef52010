//! Exact sequence-counting model of two sequential Stern-Gerlach
//! measurements, its beam-splitter form, the Wigner reference and a
//! brute-force enumeration oracle.

pub mod beamsplitter;
pub mod cli;
pub mod enumeration;
pub mod error;
pub mod exactmath;
pub mod sgmodel;
pub mod statespace;
pub mod wignerqm;

pub use error::{Error, Result};
pub use exactmath::{ExactRatio, ExactWeight, Natural};
pub use sgmodel::{probability, LCondition, Mode, ModelQuery, ProbabilityTable, Side};
pub use statespace::{Base4Counts, Base8Counts, QuantumConfig, Role};
