// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! HHL linear-system solver with Gray-code eigenvalue inversion, digital-analog
//! lowering, and architecture-aware routing.

// `!(x >= 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aqe;
pub mod circuit;
pub mod codesign;
pub mod daqc;
pub mod error;
pub mod hhl;
pub mod qsim;

pub use error::{Error, Result};
