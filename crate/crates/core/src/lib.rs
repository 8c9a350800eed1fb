//! Deterministic simulation kernel for infrastructure-centric cooperative
//! driving: intersection and sensor modeling, replay and tracking, pre-crash
//! scenario injection, V2X late fusion, and agent/traffic-level evaluation.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coop_perception;
pub mod data_pipeline;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod infrastructure;
pub mod rng;
pub mod sim_kernel;
pub mod world_model;

pub use error::{Error, Result};
