//! File formats, sparse direct solves, parallel pipelines and the command
//! line front end for [`vemsupg_core`].

pub mod cli;
pub mod config;
pub mod csvout;
pub mod expr;
pub mod meshio;
pub mod pipeline;
pub mod solve;

pub use vemsupg_core as core;
