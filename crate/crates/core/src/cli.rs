//! Experiment plumbing behind the `l1pc` binary: file formats, data
//! generators, noise, metrics and the parameter sweep.

pub mod data;
pub mod io;
pub mod metrics;
pub mod noise;
pub mod sweep;
