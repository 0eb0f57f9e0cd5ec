//! File formats and the command line for `jdebloat-core`: JAR containers,
//! the vulnerability knowledge base, JSON reports and run configuration.

pub mod commands;
pub mod config;
pub mod kb;
pub mod pipeline;
pub mod zip;

pub use jdebloat_core as core;
