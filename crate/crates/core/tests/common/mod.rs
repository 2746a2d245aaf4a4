// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use kitehhl::circuit::{Circuit, Instruction, QubitLayout, SingleGate};
use kitehhl::qsim::{CMatrix, Observable};
use num_complex::Complex64;
use proptest::prelude::*;

/// `(kind, qubit, offset, angle)`; `offset` picks a distinct second operand.
pub type GateSeed = (u8, usize, usize, f64);

pub fn gate_seeds(max_len: usize) -> impl Strategy<Value = Vec<GateSeed>> {
    prop::collection::vec((0u8..10, 0usize..16, 0usize..16, -4.0f64..4.0), 0..max_len)
}

pub fn layouts() -> impl Strategy<Value = QubitLayout> {
    (1usize..=3, 1usize..=2).prop_map(|(r, m)| QubitLayout::new(r, m).unwrap())
}

fn second(n: usize, q: usize, off: usize) -> usize {
    (q + 1 + off % (n - 1)) % n
}

/// Gate `kind` 0..=6 is single-qubit; 7..=9 are CNOT, CZ, SWAP.
pub fn instruction(n: usize, (kind, q, off, angle): GateSeed) -> Instruction {
    let q = q % n;
    match kind {
        0 => Instruction::single(SingleGate::H, q),
        1 => Instruction::single(SingleGate::X, q),
        2 => Instruction::single(SingleGate::Rz(angle), q),
        3 => Instruction::single(SingleGate::Ry(angle), q),
        4 => Instruction::single(SingleGate::Rx(angle), q),
        5 => Instruction::single(SingleGate::V, q),
        6 => Instruction::single(SingleGate::Vdg, q),
        7 => Instruction::cnot(q, second(n, q, off)),
        8 => Instruction::cz(q, second(n, q, off)),
        _ => Instruction::swap(q, second(n, q, off)),
    }
}

pub fn circuit(layout: QubitLayout, seeds: &[GateSeed]) -> Circuit {
    let mut c = Circuit::new(layout);
    let n = layout.total();
    c.extend(seeds.iter().map(|&s| instruction(n, s))).unwrap();
    c
}

/// Hermitian `(M + M†)/2` from `dim²` complex entries.
pub fn hermitian(dim: usize, entries: &[(f64, f64)]) -> Observable {
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        let (re, im) = entries[i * dim + j];
        Complex64::new(re, im)
    });
    Observable::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

pub fn entries(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
}
