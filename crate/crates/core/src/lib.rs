//! Budgeted protection of linear opinion dynamics against a worst-case
//! exogenous attacker.
//!
//! A network `x(t+1) = A x(t) + B u` settles at `x = Mu` with
//! `M = (I - A)⁻¹B`. The defender spends a budget `c` on a protection vector
//! `ν ≥ d` that attenuates the sources as `u = [ν]^{-1/2} ω`; the attacker picks
//! the unit-norm `ω` that maximizes `‖x‖²`. This crate computes the input
//! centrality `π` that governs the answer, the exact optimal allocation
//! `ν*(c)` across every budget regime, and independent numerical oracles that
//! certify it.
//!
//! ```
//! use opinion_shield::network::{build_friedkin_johnsen, cycle, StubbornnessProfile};
//! use opinion_shield::spectral::ResponseModel;
//! use opinion_shield::solver::waterfill;
//!
//! let graph = cycle(6).unwrap();
//! let sys = build_friedkin_johnsen(&graph, &StubbornnessProfile::uniform(6, 0.5).unwrap()).unwrap();
//! let model = ResponseModel::from_system(&sys).unwrap();
//! let report = waterfill(&[1.0; 6], 9.0, &model).unwrap();
//! assert!(report.nu.iter().all(|v| (v - 1.5).abs() < 1e-12));
//! ```

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod io;
pub mod matrix;
pub mod network;
pub mod oracle;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
