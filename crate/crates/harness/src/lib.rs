//! Scenario configuration, run orchestration, parameter sweeps and the
//! acceptance suite for the `dp2c` solver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod runner;
pub mod scenarios;
pub mod sweep;
