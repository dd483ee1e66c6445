//! Library surface of the CLI: the spacetime configuration loader and the
//! report document builder. The binary in `main.rs` is a thin wrapper over
//! these.

pub mod config;
pub mod report;
