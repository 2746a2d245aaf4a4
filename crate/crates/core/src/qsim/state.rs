// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::matrix::{c, CMatrix, Observable, UnitaryMatrix};
use crate::error::{Error, Result};

/// Tolerance on `‖ψ‖ = 1` after every operation.
pub const NORM_TOL: f64 = 1e-12;
const IMPOSSIBLE_TOL: f64 = 1e-15;

/// Dense state of `n_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the basis index, so the layout
/// `ancilla ⊗ register ⊗ memory` maps to `index = a·2^{n-1} + k·2^{n_M} + m`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zero basis state.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![c(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = c(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Precondition(format!("state length {len} is not a power of two")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Precondition("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self { n_qubits: len.trailing_zeros() as usize, amplitudes: amplitudes.into_iter().map(|a| a / norm).collect() })
    }

    /// `self ⊗ other`, with `self` on the more significant qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        Self { n_qubits: self.n_qubits + other.n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability of measuring `outcome` on `qubit`.
    pub fn probability(&self, qubit: usize, outcome: u8) -> f64 {
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        self.amplitudes.iter().enumerate().filter(|(i, _)| ((i & bit) != 0) == (outcome == 1)).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Marginal distribution over the contiguous block of qubits `first..first+count`.
    pub fn marginal(&self, first: usize, count: usize) -> Vec<f64> {
        let shift = self.n_qubits - first - count;
        let mask = (1usize << count) - 1;
        let mut out = vec![0.0; 1 << count];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[(i >> shift) & mask] += a.norm_sqr();
        }
        out
    }

    pub fn apply_gate(&self, gate: &UnitaryMatrix, targets: &[usize], controls: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate, targets, controls)?;
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: &UnitaryMatrix, targets: &[usize], controls: &[usize]) -> Result<()> {
        check_operands(self.n_qubits, targets, controls)?;
        if gate.dim() != 1 << targets.len() {
            return Err(Error::Dimension { expected: 1 << targets.len(), got: gate.dim() });
        }
        apply_matrix(&mut self.amplitudes, self.n_qubits, gate.entries(), targets, controls);
        Ok(())
    }

    /// `exp(i·t·H)·ψ`.
    pub fn evolve(&self, hamiltonian: &Observable, time: f64) -> Result<Self> {
        if hamiltonian.dim() != self.amplitudes.len() {
            return Err(Error::Dimension { expected: self.amplitudes.len(), got: hamiltonian.dim() });
        }
        let u = hamiltonian.exp_i(time);
        let amplitudes = mat_vec(u.entries(), &self.amplitudes);
        Ok(Self { n_qubits: self.n_qubits, amplitudes })
    }

    /// Projects `qubit` onto `outcome`, returning the renormalized state and
    /// the probability of that branch.
    pub fn post_select(&self, qubit: usize, outcome: u8) -> Result<(Self, f64)> {
        if qubit >= self.n_qubits || outcome > 1 {
            return Err(Error::Precondition(format!("invalid post-selection qubit {qubit} / outcome {outcome}")));
        }
        let p = self.probability(qubit, outcome);
        if p < IMPOSSIBLE_TOL {
            return Err(Error::ImpossibleOutcome { qubit, outcome });
        }
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        let scale = 1.0 / p.sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if ((i & bit) != 0) == (outcome == 1) { a * scale } else { c(0.0, 0.0) })
            .collect();
        Ok((Self { n_qubits: self.n_qubits, amplitudes }, p))
    }

    /// `⟨ψ|Ω|ψ⟩`.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        if obs.dim() != self.amplitudes.len() {
            return Err(Error::Dimension { expected: self.amplitudes.len(), got: obs.dim() });
        }
        let w = mat_vec(obs.entries(), &self.amplitudes);
        let value: Complex64 = self.amplitudes.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        Ok(value.re)
    }
}

pub(crate) fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

pub(crate) fn check_operands(n: usize, targets: &[usize], controls: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::Precondition("gate needs at least one target".into()));
    }
    let mut seen = vec![false; n];
    for &q in targets.iter().chain(controls) {
        if q >= n {
            return Err(Error::Precondition(format!("qubit {q} out of range for {n} qubits")));
        }
        if seen[q] {
            return Err(Error::Precondition(format!("qubit {q} used twice in one gate")));
        }
        seen[q] = true;
    }
    Ok(())
}

/// Applies the controlled embedding of `m` in place. Operands must already be validated.
pub(crate) fn apply_matrix(amps: &mut [Complex64], n: usize, m: &CMatrix, targets: &[usize], controls: &[usize]) {
    let bit = |q: usize| 1usize << (n - 1 - q);
    let k = targets.len();
    let dim = 1usize << k;
    let target_mask: usize = targets.iter().map(|&q| bit(q)).sum();
    let control_mask: usize = controls.iter().map(|&q| bit(q)).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|j| targets.iter().enumerate().filter(|(i, _)| j & (1 << (k - 1 - i)) != 0).map(|(_, &q)| bit(q)).sum())
        .collect();
    let mut gathered = vec![c(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & control_mask != control_mask {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            amps[base | off] = (0..dim).map(|col| m[(row, col)] * gathered[col]).sum();
        }
    }
}
