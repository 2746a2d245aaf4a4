// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

use kitehhl::aqe::{self, MatrixFunctionSpec};
use kitehhl::circuit::{Instruction, QubitLayout, SingleGate, TwoQubitGate};
use kitehhl::qsim::{circuit_unitary, CMatrix, StateVector};
use proptest::prelude::*;

fn reflected_gray(j: usize) -> usize {
    j ^ (j >> 1)
}

fn table_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0f64..=1.0, 1 << n)))
}

/// Block-diagonal oracle: on register value `p` the ancilla sees `V†·Rz(−2·asin f_p)·V`.
fn multiplexor(layout: QubitLayout, values: &[f64]) -> CMatrix {
    let n = layout.total();
    let n_r = layout.n_register();
    let dim = 1usize << n;
    let (v, vdg) = (SingleGate::V.matrix(), SingleGate::Vdg.matrix());
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let p = (col >> (n - 1 - n_r)) & ((1 << n_r) - 1);
        let block = &vdg * SingleGate::Rz(-2.0 * values[p].asin()).matrix() * &v;
        let a_in = col >> (n - 1);
        for a_out in 0..2 {
            let row = (col & !(1 << (n - 1))) | (a_out << (n - 1));
            out[(row, col)] = block[(a_out, a_in)];
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn synthesized_circuit_is_the_multiplexor((n_r, values) in table_strategy()) {
        let layout = QubitLayout::new(n_r, 1).unwrap();
        let f = MatrixFunctionSpec::table(values.clone()).unwrap();
        let circ = aqe::synthesize_on(layout, &f).unwrap();
        let d = kitehhl::qsim::phase_aligned_distance(circuit_unitary(&circ).unwrap().entries(), &multiplexor(layout, &values));
        prop_assert!(d < 1e-9, "distance {d}");
    }

    #[test]
    fn ancilla_probability_is_f_squared((n_r, values) in table_strategy()) {
        let layout = QubitLayout::new(n_r, 1).unwrap();
        let circ = aqe::synthesize_on(layout, &MatrixFunctionSpec::table(values.clone()).unwrap()).unwrap();
        for (p, v) in values.iter().enumerate() {
            let out = StateVector::basis(layout.total(), p << 1).run(&circ).unwrap();
            prop_assert!((out.probability(0, 1) - v * v).abs() < 1e-10);
        }
    }

    #[test]
    fn angles_solve_the_sign_system((n_r, values) in table_strategy()) {
        let n = 1usize << n_r;
        let phi: Vec<f64> = values.iter().map(|v| 2.0 * v.asin()).collect();
        let theta = aqe::solve_thetas(&phi, n_r).unwrap();
        for (i, target) in phi.iter().enumerate() {
            let s: f64 = (0..n)
                .map(|j| if (i & reflected_gray(j)).count_ones().is_multiple_of(2) { theta[j] } else { -theta[j] })
                .sum();
            prop_assert!((s - target).abs() < 1e-10);
        }
    }

    #[test]
    fn explicit_formula_is_half_the_solution((n_r, values) in table_strategy()) {
        let f = MatrixFunctionSpec::table(values.clone()).unwrap();
        let table = aqe::AngleTable::new(n_r, &f).unwrap();
        let explicit = aqe::explicit_theta_formula(&f, n_r).unwrap();
        for (a, b) in explicit.iter().zip(&table.theta) {
            prop_assert!((2.0 * a - b).abs() < 1e-12);
        }
        prop_assert!(table.residual() < 1e-10);
    }
}

#[test]
fn gray_code_neighbours_differ_in_one_bit() {
    for j in 0..1024 {
        assert_eq!(aqe::gray(j), reflected_gray(j));
        assert_eq!((aqe::gray(j) ^ aqe::gray(j + 1)).count_ones(), 1);
    }
}

#[test]
fn circuit_shape_matches_gray_controls() {
    for n_r in 1..=5 {
        let layout = QubitLayout::new(n_r, 1).unwrap();
        let circ = aqe::synthesize_on(layout, &MatrixFunctionSpec::inverse()).unwrap();
        let insts = circ.instructions();
        assert_eq!(insts.len(), 2 + 2 * (1 << n_r));
        let n = 1usize << n_r;
        for i in 0..n {
            let flipped = reflected_gray(i) ^ reflected_gray((i + 1) % n);
            let control = layout.register(n_r - 1 - flipped.trailing_zeros() as usize);
            assert!(matches!(insts[2 + 2 * i], Instruction::Two { gate: TwoQubitGate::Cnot, a, b: 0 } if a == control));
        }
    }
}

#[test]
fn inverse_function_rejects_values_above_one() {
    let f = MatrixFunctionSpec::inverse_with(0.9);
    assert!(aqe::AngleTable::new(2, &f).is_err());
    assert!(aqe::AngleTable::new(2, &MatrixFunctionSpec::inverse_with(0.25)).is_ok());
}
