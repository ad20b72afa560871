pub mod cli;
pub mod cocycle;
pub mod config;
pub mod coupling;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod graph;
pub mod group;
pub mod interval;
pub mod lemma;
pub mod metric;
pub mod quadratic;
pub mod stats;

pub use error::{Error, Result};
