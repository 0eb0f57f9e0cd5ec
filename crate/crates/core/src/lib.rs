//! Class-level debloating of Java archives.
//!
//! The pipeline: parse class files ([`classfile`]), collect the closed world
//! of application and dependency classes ([`refgraph::build_universe`]),
//! build a provenance-tagged reference graph, compute the used-class fixed
//! point from entry points ([`reach`]), then derive the debloated archive
//! contents, size report and vulnerability delta ([`debloat`], [`vuln`]).
//!
//! This crate is `no_std` and needs only `alloc`. Zip containers, JSON
//! formats and the command line live in the `jdebloat` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod archive;
pub mod classfile;
pub mod debloat;
pub mod fixtures;
mod name;
pub mod reach;
pub mod refgraph;
pub mod vuln;

pub use name::{ClassName, ClassNameError};
