//! Support library for the `mil` binary: the map config format and the
//! plain-text report renderers.

pub mod config;
pub mod report;
