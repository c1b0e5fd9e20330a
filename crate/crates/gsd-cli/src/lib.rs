//! Batch driver for `gsd-core`: configuration ingestion, report emission and
//! the self-test runner.

pub mod commands;
pub mod config;
pub mod output;
pub mod selftest;
