// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! Ancilla quantum encoding: a register-controlled `Ry`-type rotation of the
//! ancilla, synthesized as a Gray-code chain of `Rz` and CNOT conjugated by `V`.
//!
//! For register value `p` the ancilla ends in
//! `cos(φ(p)/2)|0⟩ − i·sin(φ(p)/2)|1⟩` with `φ(p) = 2·arcsin f(p/2^{n_R})`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::circuit::{Circuit, Instruction, QubitLayout, SingleGate};
use crate::error::{Error, Result};

/// Binary-reflected Gray codeword `j ⊕ (j >> 1)`.
pub fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

#[derive(Clone)]
enum Kind {
    /// `f(x) = C/x`; `C = 2^{-n_R}` unless fixed.
    Inverse {
        c: Option<f64>,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Samples on the grid `p/2^{n_R}`; only valid for the matching register size.
    Table(Vec<f64>),
}

/// The function `f` whose values are encoded into the ancilla amplitude.
#[derive(Clone)]
pub struct MatrixFunctionSpec {
    kind: Kind,
    /// Bound constant for the smoothness condition.
    pub eta: f64,
    pub description: String,
}

impl fmt::Debug for MatrixFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixFunctionSpec").field("description", &self.description).field("eta", &self.eta).finish()
    }
}

/// Names accepted by [`MatrixFunctionSpec::by_name`].
pub const FUNCTION_NAMES: [&str; 5] = ["inverse", "identity", "half", "sqrt", "zero"];

impl MatrixFunctionSpec {
    /// `f(λ) = C/λ` with `C = 2^{-n_R}`, so `f(p/2^{n_R}) = 1/p`.
    pub fn inverse() -> Self {
        Self { kind: Kind::Inverse { c: None }, eta: 1.0, description: "C/x with C = 2^-n_R".into() }
    }

    /// `f(λ) = c/λ` with a fixed constant.
    pub fn inverse_with(c: f64) -> Self {
        Self { kind: Kind::Inverse { c: Some(c) }, eta: 1.0, description: format!("{c}/x") }
    }

    pub fn custom(description: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { kind: Kind::Custom(Arc::new(f)), eta: 1.0, description: description.into() }
    }

    /// Sampled values `f(p/2^{n_R})`, `p = 0..len`; `len` must be a power of two.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(Error::Validation(format!("function table length {} is not a power of two >= 2", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("function table holds non-finite value {v}")));
        }
        let description = format!("table of {} samples", values.len());
        Ok(Self { kind: Kind::Table(values), eta: 1.0, description })
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "inverse" => Self::inverse(),
            "identity" => Self::custom("x", |x| x),
            "half" => Self::custom("x/2", |x| x / 2.0),
            "sqrt" => Self::custom("sqrt(x)", f64::sqrt),
            "zero" => Self::custom("0", |_| 0.0),
            other => {
                return Err(Error::Validation(format!("unknown function '{other}' (supported: {})", FUNCTION_NAMES.join(", "))))
            }
        })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn is_inverse(&self) -> bool {
        matches!(self.kind, Kind::Inverse { .. })
    }

    /// Normalization constant `C` for the inverse function at this register size.
    pub fn normalization(&self, n_r: usize) -> Option<f64> {
        match self.kind {
            Kind::Inverse { c } => Some(c.unwrap_or((-(n_r as f64)).exp2())),
            _ => None,
        }
    }

    /// `f(x)` for a register of `n_R` qubits.
    pub fn value(&self, x: f64, n_r: usize) -> Result<f64> {
        match &self.kind {
            Kind::Inverse { .. } => Ok(self.normalization(n_r).unwrap() / x),
            Kind::Custom(f) => Ok(f(x)),
            Kind::Table(values) => {
                if values.len() != 1 << n_r {
                    return Err(Error::Dimension { expected: 1 << n_r, got: values.len() });
                }
                let idx = (x * values.len() as f64).round() as usize;
                Ok(values[idx.min(values.len() - 1)])
            }
        }
    }
}

fn check_register(n_r: usize) -> Result<()> {
    if n_r == 0 || n_r > 20 {
        return Err(Error::Precondition(format!("register size {n_r} outside 1..=20")));
    }
    Ok(())
}

/// Target angle `φ(p) = 2·arcsin f(p/2^{n_R})`; zero for the inverse function at `p = 0`.
pub fn phi(p: usize, f: &MatrixFunctionSpec, n_r: usize) -> Result<f64> {
    check_register(n_r)?;
    if p >= 1 << n_r {
        return Err(Error::Precondition(format!("p = {p} outside 0..{}", 1usize << n_r)));
    }
    if p == 0 && f.is_inverse() {
        return Ok(0.0);
    }
    let x = p as f64 / (1usize << n_r) as f64;
    let value = f.value(x, n_r)?;
    if !value.is_finite() || value.abs() > 1.0 + 1e-12 {
        return Err(Error::Domain { p, x, value });
    }
    Ok(2.0 * value.clamp(-1.0, 1.0).asin())
}

/// Sign matrix `M_ij = (−1)^{popcount(i & gray(j))}`.
pub fn build_m(n_r: usize) -> DMatrix<f64> {
    let n = 1usize << n_r;
    DMatrix::from_fn(n, n, |i, j| if (i & gray(j)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 })
}

/// Solves `M·θ = φ` as `θ = Mᵀφ / 2^{n_R}`.
pub fn solve_thetas(phi: &[f64], n_r: usize) -> Result<Vec<f64>> {
    check_register(n_r)?;
    let n = 1usize << n_r;
    if phi.len() != n {
        return Err(Error::Dimension { expected: n, got: phi.len() });
    }
    Ok((0..n)
        .map(|j| {
            let g = gray(j);
            let s: f64 = phi.iter().enumerate().map(|(i, &v)| if (i & g).count_ones().is_multiple_of(2) { v } else { -v }).sum();
            s / n as f64
        })
        .collect())
}

/// The published closed form `θ_i = 2^{-n_R}·Σ_b (−1)^{b·g(i)}·arcsin f(b)`.
/// It lacks the factor 2 of `φ = 2·arcsin f`, so it returns half of [`solve_thetas`].
pub fn explicit_theta_formula(f: &MatrixFunctionSpec, n_r: usize) -> Result<Vec<f64>> {
    let half: Vec<f64> = (0..1usize << n_r).map(|p| phi(p, f, n_r).map(|v| v / 2.0)).collect::<Result<_>>()?;
    solve_thetas(&half, n_r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleTable {
    #[serde(rename = "n_R")]
    pub n_r: usize,
    /// `C` for the inverse function.
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
}

impl AngleTable {
    pub fn new(n_r: usize, f: &MatrixFunctionSpec) -> Result<Self> {
        let phi: Vec<f64> = (0..1usize << n_r).map(|p| phi(p, f, n_r)).collect::<Result<_>>()?;
        let theta = solve_thetas(&phi, n_r)?;
        Ok(Self { n_r, c: f.normalization(n_r), phi, theta })
    }

    /// `‖Mθ − φ‖∞`.
    pub fn residual(&self) -> f64 {
        let m = build_m(self.n_r);
        let th = nalgebra::DVector::from_column_slice(&self.theta);
        let back = m * th;
        back.iter().zip(&self.phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("angle table serializes")
    }
}

/// `(θ_i, control)` pairs; `control` is 1-based from the most significant register qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationSchedule {
    pub steps: Vec<(f64, usize)>,
}

impl RotationSchedule {
    pub fn from_table(table: &AngleTable) -> Self {
        let n = 1usize << table.n_r;
        let steps = (0..n)
            .map(|i| {
                let diff = gray(i) ^ gray((i + 1) % n);
                let bit = diff.trailing_zeros() as usize;
                (table.theta[i], table.n_r - bit)
            })
            .collect();
        Self { steps }
    }
}

/// AQE circuit on the default layout with one memory qubit.
pub fn synthesize(n_r: usize, f: &MatrixFunctionSpec) -> Result<Circuit> {
    synthesize_on(QubitLayout::new(n_r, 1)?, f)
}

/// `V(anc) · Π_i [Rz(−θ_i)(anc) · CNOT(R_{c_i} → anc)] · V†(anc)`.
pub fn synthesize_on(layout: QubitLayout, f: &MatrixFunctionSpec) -> Result<Circuit> {
    let table = AngleTable::new(layout.n_register(), f)?;
    Ok(circuit_from_table(layout, &table))
}

pub fn circuit_from_table(layout: QubitLayout, table: &AngleTable) -> Circuit {
    let anc = layout.ancilla();
    let mut c = Circuit::new(layout);
    let mut insts = vec![Instruction::single(SingleGate::V, anc)];
    for (theta, control) in RotationSchedule::from_table(table).steps {
        insts.push(Instruction::single(SingleGate::Rz(-theta), anc));
        insts.push(Instruction::cnot(layout.register(control - 1), anc));
    }
    insts.push(Instruction::single(SingleGate::Vdg, anc));
    c.extend(insts).expect("AQE operands lie inside the layout");
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FConditionReport {
    pub satisfied: bool,
    pub worst_x: f64,
    pub worst_value: f64,
    /// Some grid point had `f(x)² = 1`.
    pub singular: bool,
    pub eta: f64,
}

/// Checks `|f'(x)²·(1 + 1/(1 − f(x)²))| < η²` on `x = k/grid_points`, `k < grid_points`,
/// with central differences of step `1/(10·grid_points)`. The inverse function is
/// evaluated with `C = 1/grid_points` (its smallest non-zero grid value is then 1).
pub fn check_f_condition(f: &MatrixFunctionSpec, grid_points: usize) -> Result<FConditionReport> {
    if grid_points < 2 {
        return Err(Error::Precondition(format!("grid_points = {grid_points} must be >= 2")));
    }
    let h = 1.0 / (10.0 * grid_points as f64);
    let eval: Box<dyn Fn(f64) -> f64> = match &f.kind {
        Kind::Inverse { c } => {
            let c = c.unwrap_or(1.0 / grid_points as f64);
            Box::new(move |x| c / x)
        }
        Kind::Custom(func) => {
            let func = func.clone();
            Box::new(move |x| func(x))
        }
        Kind::Table(_) => return Err(Error::Unsupported("smoothness check needs a continuous function".into())),
    };
    let mut worst_x = 0.0;
    let mut worst_value = f64::NEG_INFINITY;
    let mut singular = false;
    for k in 0..grid_points {
        let x = k as f64 / grid_points as f64;
        let fx = eval(x);
        let d = (eval(x + h) - eval(x - h)) / (2.0 * h);
        let denom = 1.0 - fx * fx;
        let value = if denom.abs() < 1e-15 {
            singular = true;
            f64::INFINITY
        } else {
            (d * d * (1.0 + 1.0 / denom)).abs()
        };
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if value > worst_value {
            worst_value = value;
            worst_x = x;
        }
    }
    Ok(FConditionReport { satisfied: worst_value < f.eta * f.eta, worst_x, worst_value, singular, eta: f.eta })
}
