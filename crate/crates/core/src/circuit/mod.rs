// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! Circuit IR shared by digital gates and analog Ising blocks.
//!
//! Qubit 0 is the ancilla, qubits `1..=n_R` hold the eigenvalue register
//! (qubit 1 is its most significant bit), and the remaining qubits are memory.

mod text;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::daqc::CouplingGraph;
use crate::error::{Error, Result};
use crate::qsim::matrix::{c, paulis, CMatrix};

pub use text::{parse_circuit, parse_circuit_with};

/// Role-tagged qubit layout: one ancilla, `n_R` register and `n_M` memory qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QubitLayout {
    n_register: usize,
    n_memory: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Ancilla,
    /// Register qubit with 0-based position (0 = most significant bit).
    Register(usize),
    Memory(usize),
}

impl QubitLayout {
    pub fn new(n_register: usize, n_memory: usize) -> Result<Self> {
        if n_register == 0 || n_memory == 0 {
            return Err(Error::Validation(format!(
                "layout needs at least one register and one memory qubit (got n_R={n_register}, n_M={n_memory})"
            )));
        }
        Ok(Self { n_register, n_memory })
    }

    pub fn n_register(&self) -> usize {
        self.n_register
    }

    pub fn n_memory(&self) -> usize {
        self.n_memory
    }

    pub fn total(&self) -> usize {
        1 + self.n_register + self.n_memory
    }

    pub fn ancilla(&self) -> usize {
        0
    }

    /// Index of register qubit `i` (0-based, most significant first).
    pub fn register(&self, i: usize) -> usize {
        1 + i
    }

    pub fn memory(&self, i: usize) -> usize {
        1 + self.n_register + i
    }

    pub fn register_qubits(&self) -> std::ops::Range<usize> {
        1..1 + self.n_register
    }

    pub fn memory_qubits(&self) -> std::ops::Range<usize> {
        1 + self.n_register..self.total()
    }

    pub fn role(&self, q: usize) -> Option<Role> {
        match q {
            0 => Some(Role::Ancilla),
            q if q <= self.n_register => Some(Role::Register(q - 1)),
            q if q < self.total() => Some(Role::Memory(q - 1 - self.n_register)),
            _ => None,
        }
    }
}

/// Named and parametric single-qubit gates. Angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SingleGate {
    X,
    Y,
    Z,
    H,
    V,
    Vdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
}

impl SingleGate {
    pub fn matrix(&self) -> CMatrix {
        let s = FRAC_1_SQRT_2;
        match *self {
            SingleGate::X => paulis::x(),
            SingleGate::Y => paulis::y(),
            SingleGate::Z => paulis::z(),
            SingleGate::H => CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
            // V = (1/√2)[[-i, i], [1, 1]]
            SingleGate::V => CMatrix::from_row_slice(2, 2, &[c(0.0, -s), c(0.0, s), c(s, 0.0), c(s, 0.0)]),
            SingleGate::Vdg => SingleGate::V.matrix().adjoint(),
            SingleGate::Rx(t) => {
                let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
                CMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)])
            }
            SingleGate::Ry(t) => {
                let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
                CMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)])
            }
            SingleGate::Rz(t) => CMatrix::from_row_slice(
                2,
                2,
                &[Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
            ),
        }
    }

    pub fn adjoint(&self) -> Self {
        match *self {
            SingleGate::V => SingleGate::Vdg,
            SingleGate::Vdg => SingleGate::V,
            SingleGate::Rx(t) => SingleGate::Rx(-t),
            SingleGate::Ry(t) => SingleGate::Ry(-t),
            SingleGate::Rz(t) => SingleGate::Rz(-t),
            g => g,
        }
    }

    /// Diagonal in the computational basis (commutes with any Ising block).
    pub fn is_diagonal(&self) -> bool {
        matches!(self, SingleGate::Z | SingleGate::Rz(_))
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            SingleGate::Rx(t) | SingleGate::Ry(t) | SingleGate::Rz(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoQubitGate {
    /// Operands are (control, target).
    Cnot,
    Cz,
    Swap,
}

impl TwoQubitGate {
    pub fn matrix(&self) -> CMatrix {
        let o = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        let m = match self {
            TwoQubitGate::Cnot => [o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z],
            TwoQubitGate::Cz => [o, z, z, z, z, o, z, z, z, z, o, z, z, z, z, -o],
            TwoQubitGate::Swap => [o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o],
        };
        CMatrix::from_row_slice(4, 4, &m)
    }
}

/// Evolution `exp(±i·g·t·H_I)` under the Ising Hamiltonian of a coupling graph.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalogBlock {
    pub graph: Arc<CouplingGraph>,
    /// Global coupling strength, angular-frequency units.
    pub strength: f64,
    /// Duration, time units.
    pub duration: f64,
    /// Set on the adjoint of a block: the Hamiltonian sign is flipped.
    pub negated: bool,
}

impl AnalogBlock {
    pub fn new(graph: Arc<CouplingGraph>, strength: f64, duration: f64) -> Self {
        Self { graph, strength, duration, negated: false }
    }

    /// Signed phase factor multiplying `H_I` in the exponent.
    pub fn signed_time(&self) -> f64 {
        let t = self.strength * self.duration;
        if self.negated {
            -t
        } else {
            t
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Single {
        gate: SingleGate,
        qubit: usize,
    },
    Two {
        gate: TwoQubitGate,
        a: usize,
        b: usize,
    },
    /// Explicit-matrix unitary on `targets`, applied when every control is |1⟩.
    Controlled {
        controls: Vec<usize>,
        targets: Vec<usize>,
        matrix: CMatrix,
    },
    Analog(AnalogBlock),
}

impl Instruction {
    pub fn single(gate: SingleGate, qubit: usize) -> Self {
        Instruction::Single { gate, qubit }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Instruction::Two { gate: TwoQubitGate::Cnot, a: control, b: target }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Instruction::Two { gate: TwoQubitGate::Cz, a, b }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Instruction::Two { gate: TwoQubitGate::Swap, a, b }
    }

    /// A single-qubit gate given by an explicit 2×2 unitary.
    pub fn unitary(qubit: usize, matrix: CMatrix) -> Self {
        Instruction::Controlled { controls: vec![], targets: vec![qubit], matrix }
    }

    /// Qubits touched by this instruction. For analog blocks, every qubit with a coupling.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Single { qubit, .. } => vec![*qubit],
            Instruction::Two { a, b, .. } => vec![*a, *b],
            Instruction::Controlled { controls, targets, .. } => controls.iter().chain(targets).copied().collect(),
            Instruction::Analog(block) => block.graph.active_qubits(),
        }
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Instruction::Single { gate, qubit } => Instruction::Single { gate: gate.adjoint(), qubit: *qubit },
            Instruction::Two { .. } => self.clone(),
            Instruction::Controlled { controls, targets, matrix } => {
                Instruction::Controlled { controls: controls.clone(), targets: targets.clone(), matrix: matrix.adjoint() }
            }
            Instruction::Analog(block) => Instruction::Analog(AnalogBlock { negated: !block.negated, ..block.clone() }),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let operands = match self {
            Instruction::Analog(block) => {
                if block.graph.n_qubits() != n_qubits {
                    return Err(Error::Validation(format!(
                        "analog block graph '{}' spans {} qubits, circuit has {n_qubits}",
                        block.graph.name(),
                        block.graph.n_qubits()
                    )));
                }
                if !(block.duration >= 0.0) || !block.duration.is_finite() {
                    return Err(Error::Validation(format!("analog duration {} must be finite and >= 0", block.duration)));
                }
                if !block.strength.is_finite() || block.strength <= 0.0 {
                    return Err(Error::Validation(format!("analog strength {} must be positive", block.strength)));
                }
                return Ok(());
            }
            Instruction::Single { gate, .. } => {
                if let Some(t) = gate.angle() {
                    if !t.is_finite() {
                        return Err(Error::Validation(format!("rotation angle {t} is not finite")));
                    }
                }
                self.qubits()
            }
            Instruction::Controlled { targets, matrix, .. } => {
                let dim = 1usize << targets.len();
                if targets.is_empty() || matrix.nrows() != dim || matrix.ncols() != dim {
                    return Err(Error::Validation(format!(
                        "controlled block on {} targets needs a {dim}x{dim} matrix",
                        targets.len()
                    )));
                }
                crate::qsim::UnitaryMatrix::new(matrix.clone())?;
                self.qubits()
            }
            Instruction::Two { .. } => self.qubits(),
        };
        let mut seen = vec![false; n_qubits];
        for q in operands {
            if q >= n_qubits {
                return Err(Error::Validation(format!("operand q{q} out of range for {n_qubits} qubits")));
            }
            if seen[q] {
                return Err(Error::Validation(format!("operand q{q} repeated in {self}")));
            }
            seen[q] = true;
        }
        Ok(())
    }

    /// Number of qubits the gate acts on; `None` for analog blocks.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Instruction::Analog(_) => None,
            other => Some(other.qubits().len()),
        }
    }

    /// Same instruction with operands renamed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        match self {
            Instruction::Single { gate, qubit } => Instruction::Single { gate: *gate, qubit: map(*qubit) },
            Instruction::Two { gate, a, b } => Instruction::Two { gate: *gate, a: map(*a), b: map(*b) },
            Instruction::Controlled { controls, targets, matrix } => Instruction::Controlled {
                controls: controls.iter().map(|&q| map(q)).collect(),
                targets: targets.iter().map(|&q| map(q)).collect(),
                matrix: matrix.clone(),
            },
            Instruction::Analog(_) => self.clone(),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_instruction(f, self)
    }
}

/// Gate and analog-block tallies for a circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ResourceCount {
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    /// Explicit-matrix blocks acting on three or more qubits.
    pub multi_qubit_gates: usize,
    pub cnot_count: usize,
    pub cz_count: usize,
    pub analog_blocks: usize,
    pub total_analog_time: f64,
    pub swap_count: usize,
}

impl ResourceCount {
    pub fn total_gates(&self) -> usize {
        self.single_qubit_gates + self.two_qubit_gates + self.multi_qubit_gates
    }
}

impl Add for ResourceCount {
    type Output = ResourceCount;

    fn add(self, o: Self) -> Self {
        ResourceCount {
            single_qubit_gates: self.single_qubit_gates + o.single_qubit_gates,
            two_qubit_gates: self.two_qubit_gates + o.two_qubit_gates,
            multi_qubit_gates: self.multi_qubit_gates + o.multi_qubit_gates,
            cnot_count: self.cnot_count + o.cnot_count,
            cz_count: self.cz_count + o.cz_count,
            analog_blocks: self.analog_blocks + o.analog_blocks,
            total_analog_time: self.total_analog_time + o.total_analog_time,
            swap_count: self.swap_count + o.swap_count,
        }
    }
}

/// An ordered instruction list over a fixed layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    layout: QubitLayout,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(layout: QubitLayout) -> Self {
        Self { layout, instructions: Vec::new() }
    }

    pub fn layout(&self) -> QubitLayout {
        self.layout
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn append(&mut self, instruction: Instruction) -> Result<&mut Self> {
        instruction.validate(self.n_qubits())?;
        self.instructions.push(instruction);
        Ok(self)
    }

    pub fn extend(&mut self, instructions: impl IntoIterator<Item = Instruction>) -> Result<&mut Self> {
        for inst in instructions {
            self.append(inst)?;
        }
        Ok(self)
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if self.layout != other.layout {
            return Err(Error::Validation("cannot concatenate circuits with different layouts".into()));
        }
        let mut out = self.clone();
        out.instructions.extend(other.instructions.iter().cloned());
        Ok(out)
    }

    /// Reversed order with every instruction replaced by its adjoint.
    pub fn inverse(&self) -> Circuit {
        Circuit { layout: self.layout, instructions: self.instructions.iter().rev().map(Instruction::adjoint).collect() }
    }

    /// Exact tally per instruction kind. With `native_swaps`, each SWAP also
    /// contributes three CNOTs to the two-qubit and CNOT counts.
    pub fn count_resources(&self, native_swaps: bool) -> ResourceCount {
        let mut r = ResourceCount::default();
        for inst in &self.instructions {
            match inst {
                Instruction::Single { .. } => r.single_qubit_gates += 1,
                Instruction::Two { gate, .. } => match gate {
                    TwoQubitGate::Cnot => {
                        r.two_qubit_gates += 1;
                        r.cnot_count += 1;
                    }
                    TwoQubitGate::Cz => {
                        r.two_qubit_gates += 1;
                        r.cz_count += 1;
                    }
                    TwoQubitGate::Swap => {
                        r.swap_count += 1;
                        if native_swaps {
                            r.two_qubit_gates += 3;
                            r.cnot_count += 3;
                        } else {
                            r.two_qubit_gates += 1;
                        }
                    }
                },
                Instruction::Controlled { .. } => match inst.qubits().len() {
                    1 => r.single_qubit_gates += 1,
                    2 => r.two_qubit_gates += 1,
                    _ => r.multi_qubit_gates += 1,
                },
                Instruction::Analog(block) => {
                    r.analog_blocks += 1;
                    r.total_analog_time += block.duration;
                }
            }
        }
        r
    }

    /// Rewrites every CNOT as `H(target)·cZ·H(target)`.
    pub fn cnot_to_cz(&self) -> Circuit {
        let mut instructions = Vec::with_capacity(self.instructions.len());
        for inst in &self.instructions {
            match inst {
                Instruction::Two { gate: TwoQubitGate::Cnot, a, b } => {
                    instructions.push(Instruction::single(SingleGate::H, *b));
                    instructions.push(Instruction::cz(*a, *b));
                    instructions.push(Instruction::single(SingleGate::H, *b));
                }
                other => instructions.push(other.clone()),
            }
        }
        Circuit { layout: self.layout, instructions }
    }

    pub fn to_text(&self) -> String {
        text::circuit_to_text(self)
    }
}

/// Decomposes a singly-controlled 2×2 unitary into 2 CNOTs and 3 single-qubit
/// gates on the target plus a phase gate on the control (`U = e^{iα}·A·X·B·X·C`, `ABC = I`).
pub fn decompose_controlled_single(control: usize, target: usize, u: &CMatrix) -> Vec<Instruction> {
    let (alpha, beta, gamma, delta) = zyz_angles(u);
    let a = SingleGate::Rz(beta).matrix() * SingleGate::Ry(gamma / 2.0).matrix();
    let b = SingleGate::Ry(-gamma / 2.0).matrix() * SingleGate::Rz(-(delta + beta) / 2.0).matrix();
    let cm = SingleGate::Rz((delta - beta) / 2.0).matrix();
    let phase = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, alpha)]);
    vec![
        Instruction::unitary(target, cm),
        Instruction::cnot(control, target),
        Instruction::unitary(target, b),
        Instruction::cnot(control, target),
        Instruction::unitary(target, a),
        Instruction::unitary(control, phase),
    ]
}

/// `U = e^{iα}·Rz(β)·Ry(γ)·Rz(δ)`.
pub(crate) fn zyz_angles(u: &CMatrix) -> (f64, f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let su = u * Complex64::from_polar(1.0, -alpha);
    // su = [[e^{-i(β+δ)/2} cos(γ/2), -e^{-i(β-δ)/2} sin(γ/2)], [e^{i(β-δ)/2} sin(γ/2), e^{i(β+δ)/2} cos(γ/2)]]
    let gamma = 2.0 * su[(1, 0)].norm().atan2(su[(0, 0)].norm());
    let sum = if su[(1, 1)].norm() > 1e-12 { 2.0 * su[(1, 1)].arg() } else { 0.0 };
    let diff = if su[(1, 0)].norm() > 1e-12 { 2.0 * su[(1, 0)].arg() } else { 0.0 };
    let beta = (sum + diff) / 2.0;
    let delta = (sum - diff) / 2.0;
    (alpha, beta, gamma, delta)
}
