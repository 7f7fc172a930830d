//! Command-line interface and JSON HTTP service over `mutwb-core`.
//!
//! [`state`] holds the session state and its JSON form, [`service`] the
//! axum router and [`cli`] the `mutwb` command.

pub mod cli;
pub mod service;
pub mod state;
