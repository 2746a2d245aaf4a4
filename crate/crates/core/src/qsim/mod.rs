// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense state-vector simulation and full-unitary extraction.

pub mod matrix;
mod state;

pub use matrix::{kron, paulis, phase_aligned_distance, CMatrix, CVector, Eigensystem, Observable, UnitaryMatrix};
pub use state::{StateVector, NORM_TOL};

use num_complex::Complex64;

use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use matrix::c;

/// Default qubit cap for [`circuit_unitary`].
pub const DEFAULT_ORACLE_LIMIT: usize = 10;

/// Environment variable overriding [`DEFAULT_ORACLE_LIMIT`].
pub const ORACLE_LIMIT_ENV: &str = "HHL_ORACLE_LIMIT";

/// Oracle cap from `HHL_ORACLE_LIMIT`, falling back to the default when unset or unparsable.
pub fn oracle_limit_from_env() -> usize {
    std::env::var(ORACLE_LIMIT_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ORACLE_LIMIT)
}

/// Applies one instruction to raw amplitudes over `n` qubits.
pub(crate) fn apply_instruction(amps: &mut [Complex64], n: usize, inst: &Instruction) {
    match inst {
        Instruction::Single { gate, qubit } => state::apply_matrix(amps, n, &gate.matrix(), &[*qubit], &[]),
        Instruction::Two { gate, a, b } => state::apply_matrix(amps, n, &gate.matrix(), &[*a, *b], &[]),
        Instruction::Controlled { controls, targets, matrix } => state::apply_matrix(amps, n, matrix, targets, controls),
        Instruction::Analog(block) => {
            let diag = block.graph.ising_diagonal();
            let t = block.signed_time();
            for (a, e) in amps.iter_mut().zip(diag) {
                *a *= Complex64::from_polar(1.0, t * e);
            }
        }
    }
}

impl StateVector {
    /// Runs every instruction of `circuit` on this state.
    pub fn run(&self, circuit: &Circuit) -> Result<StateVector> {
        if circuit.n_qubits() != self.n_qubits() {
            return Err(Error::Dimension { expected: self.n_qubits(), got: circuit.n_qubits() });
        }
        let mut out = self.clone();
        for inst in circuit.instructions() {
            apply_instruction(out.amplitudes_mut(), circuit.n_qubits(), inst);
        }
        Ok(out)
    }
}

/// Full `2^n × 2^n` unitary of `circuit`, capped at [`DEFAULT_ORACLE_LIMIT`] qubits.
pub fn circuit_unitary(circuit: &Circuit) -> Result<UnitaryMatrix> {
    circuit_unitary_with_limit(circuit, DEFAULT_ORACLE_LIMIT)
}

pub fn circuit_unitary_with_limit(circuit: &Circuit, limit: usize) -> Result<UnitaryMatrix> {
    let n = circuit.n_qubits();
    if n > limit {
        return Err(Error::OracleLimit { qubits: n, limit });
    }
    instructions_unitary(n, circuit.instructions())
}

/// Unitary of a bare instruction sequence on `n` qubits (no limit check).
pub(crate) fn instructions_unitary(n: usize, instructions: &[Instruction]) -> Result<UnitaryMatrix> {
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    let mut column = vec![c(0.0, 0.0); dim];
    for j in 0..dim {
        column.iter_mut().for_each(|a| *a = c(0.0, 0.0));
        column[j] = c(1.0, 0.0);
        for inst in instructions {
            apply_instruction(&mut column, n, inst);
        }
        for (i, a) in column.iter().enumerate() {
            out[(i, j)] = *a;
        }
    }
    Ok(UnitaryMatrix::from_matrix_unchecked(out))
}

/// Directly assembles `Σ_p W_p ⊗ |p⟩⟨p|`: `blocks[p]` acts on `target` when the
/// `controls` (most significant first) spell the integer `p`. Other qubits see the identity.
pub fn multiplexed_unitary(n: usize, target: usize, controls: &[usize], blocks: &[CMatrix]) -> Result<UnitaryMatrix> {
    state::check_operands(n, &[target], controls)?;
    if blocks.len() != 1 << controls.len() {
        return Err(Error::Dimension { expected: 1 << controls.len(), got: blocks.len() });
    }
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let tbit = bit(target);
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let p = controls.iter().fold(0usize, |acc, &q| (acc << 1) | usize::from(col & bit(q) != 0));
        let t_in = usize::from(col & tbit != 0);
        for t_out in 0..2 {
            let row = (col & !tbit) | if t_out == 1 { tbit } else { 0 };
            out[(row, col)] = blocks[p][(t_out, t_in)];
        }
    }
    UnitaryMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{QubitLayout, SingleGate};

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(QubitLayout::new(1, 1).unwrap());
        assert_eq!(circuit_unitary(&c).unwrap(), UnitaryMatrix::identity(8));
    }

    #[test]
    fn oracle_limit_enforced() {
        let c = Circuit::new(QubitLayout::new(8, 4).unwrap());
        assert!(matches!(circuit_unitary(&c), Err(Error::OracleLimit { qubits: 13, limit: 10 })));
        assert!(circuit_unitary_with_limit(&Circuit::new(QubitLayout::new(1, 1).unwrap()), 2).is_err());
    }

    #[test]
    fn single_cnot_matrix() {
        let mut c = Circuit::new(QubitLayout::new(1, 1).unwrap());
        c.append(Instruction::cnot(0, 1)).unwrap();
        let u = circuit_unitary(&c).unwrap();
        // CNOT on qubits 0,1 tensored with identity on qubit 2.
        let expected = crate::circuit::TwoQubitGate::Cnot.matrix().kronecker(&CMatrix::identity(2, 2));
        assert_eq!(u.entries(), &expected);
    }

    #[test]
    fn multiplexor_matches_controlled_blocks() {
        let blocks: Vec<CMatrix> = [0.1, 0.7].iter().map(|&t| SingleGate::Ry(t).matrix()).collect();
        let direct = multiplexed_unitary(3, 0, &[1], &blocks).unwrap();
        let mut c = Circuit::new(QubitLayout::new(1, 1).unwrap());
        c.extend([
            Instruction::single(SingleGate::X, 1),
            Instruction::Controlled { controls: vec![1], targets: vec![0], matrix: blocks[0].clone() },
            Instruction::single(SingleGate::X, 1),
            Instruction::Controlled { controls: vec![1], targets: vec![0], matrix: blocks[1].clone() },
        ])
        .unwrap();
        assert!(circuit_unitary(&c).unwrap().phase_aligned_distance(&direct) < 1e-14);
    }
}
