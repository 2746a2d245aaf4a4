// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! Line-oriented circuit text format.
//!
//! ```text
//! # layout n_R=2 n_M=1
//! V q0
//! RZ q0 -1.5707963267948966
//! CNOT q1 q0
//! ANALOG graph=star g=1 t=0.39269908169872414
//! CU c=q1 t=q3 m=1:0,0:0,0:0,0.5:0.8660254037844386
//! ```
//!
//! Real numbers use the shortest decimal form that round-trips exactly.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{AnalogBlock, Circuit, Instruction, QubitLayout, SingleGate, TwoQubitGate};
use crate::daqc::CouplingGraph;
use crate::error::{Error, Result};
use crate::qsim::matrix::CMatrix;

fn qubit_list(qs: &[usize]) -> String {
    qs.iter().map(|q| format!("q{q}")).collect::<Vec<_>>().join(",")
}

pub(super) fn write_instruction(f: &mut impl fmt::Write, inst: &Instruction) -> fmt::Result {
    match inst {
        Instruction::Single { gate, qubit } => match gate {
            SingleGate::X => write!(f, "X q{qubit}"),
            SingleGate::Y => write!(f, "Y q{qubit}"),
            SingleGate::Z => write!(f, "Z q{qubit}"),
            SingleGate::H => write!(f, "H q{qubit}"),
            SingleGate::V => write!(f, "V q{qubit}"),
            SingleGate::Vdg => write!(f, "VDG q{qubit}"),
            SingleGate::Rx(t) => write!(f, "RX q{qubit} {t}"),
            SingleGate::Ry(t) => write!(f, "RY q{qubit} {t}"),
            SingleGate::Rz(t) => write!(f, "RZ q{qubit} {t}"),
        },
        Instruction::Two { gate, a, b } => {
            let name = match gate {
                TwoQubitGate::Cnot => "CNOT",
                TwoQubitGate::Cz => "CZ",
                TwoQubitGate::Swap => "SWAP",
            };
            write!(f, "{name} q{a} q{b}")
        }
        Instruction::Controlled { controls, targets, matrix } => {
            write!(f, "CU ")?;
            if !controls.is_empty() {
                write!(f, "c={} ", qubit_list(controls))?;
            }
            write!(f, "t={} m=", qubit_list(targets))?;
            let n = matrix.nrows();
            for i in 0..n {
                for j in 0..n {
                    if i + j > 0 {
                        f.write_char(',')?;
                    }
                    let z = matrix[(i, j)];
                    write!(f, "{}:{}", z.re, z.im)?;
                }
            }
            Ok(())
        }
        Instruction::Analog(block) => {
            write!(f, "ANALOG graph={} g={} t={}", block.graph.name(), block.strength, block.duration)?;
            if block.negated {
                write!(f, " sign=-1")?;
            }
            Ok(())
        }
    }
}

pub(super) fn circuit_to_text(circuit: &Circuit) -> String {
    let layout = circuit.layout();
    let mut out = format!("# layout n_R={} n_M={}\n", layout.n_register(), layout.n_memory());
    for inst in circuit.instructions() {
        write_instruction(&mut out, inst).expect("writing to a String cannot fail");
        out.push('\n');
    }
    out
}

/// Parses circuit text, resolving `ANALOG graph=<name>` through the built-in
/// graph constructors for the parsed layout.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_circuit_with(text, |name, layout| CouplingGraph::named(name, layout).ok().map(Arc::new))
}

pub fn parse_circuit_with(text: &str, resolve: impl Fn(&str, &QubitLayout) -> Option<Arc<CouplingGraph>>) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(spec) = rest.strip_prefix("layout") {
                let n_r = key_value(spec, "n_R").ok_or_else(|| err("layout header needs n_R".into()))?;
                let n_m = key_value(spec, "n_M").ok_or_else(|| err("layout header needs n_M".into()))?;
                let n_r = n_r.parse().map_err(|_| err(format!("bad n_R '{n_r}'")))?;
                let n_m = n_m.parse().map_err(|_| err(format!("bad n_M '{n_m}'")))?;
                circuit = Some(Circuit::new(QubitLayout::new(n_r, n_m).map_err(|e| err(e.to_string()))?));
            }
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err("instruction before '# layout' header".into()))?;
        let inst = parse_instruction(line, &c.layout(), &resolve).map_err(err)?;
        c.append(inst).map_err(|e| err(e.to_string()))?;
    }
    circuit.ok_or(Error::Parse { line: 0, message: "missing '# layout' header".into() })
}

fn key_value<'a>(spec: &'a str, key: &str) -> Option<&'a str> {
    spec.split_whitespace().find_map(|tok| tok.strip_prefix(key)?.strip_prefix('='))
}

fn parse_qubit(tok: &str) -> std::result::Result<usize, String> {
    tok.strip_prefix('q').and_then(|s| s.parse().ok()).ok_or_else(|| format!("bad qubit operand '{tok}'"))
}

fn parse_real(tok: &str) -> std::result::Result<f64, String> {
    tok.parse::<f64>().map_err(|_| format!("bad number '{tok}'"))
}

fn parse_instruction(
    line: &str,
    layout: &QubitLayout,
    resolve: &impl Fn(&str, &QubitLayout) -> Option<Arc<CouplingGraph>>,
) -> std::result::Result<Instruction, String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let op = toks[0].to_ascii_uppercase();
    let arg = |i: usize| toks.get(i).copied().ok_or_else(|| format!("{op} is missing operand {i}"));
    let single =
        |gate| -> std::result::Result<Instruction, String> { Ok(Instruction::Single { gate, qubit: parse_qubit(arg(1)?)? }) };
    match op.as_str() {
        "X" => single(SingleGate::X),
        "Y" => single(SingleGate::Y),
        "Z" => single(SingleGate::Z),
        "H" => single(SingleGate::H),
        "V" => single(SingleGate::V),
        "VDG" => single(SingleGate::Vdg),
        "RX" => single(SingleGate::Rx(parse_real(arg(2)?)?)),
        "RY" => single(SingleGate::Ry(parse_real(arg(2)?)?)),
        "RZ" => single(SingleGate::Rz(parse_real(arg(2)?)?)),
        "CNOT" | "CZ" | "SWAP" => {
            let gate = match op.as_str() {
                "CNOT" => TwoQubitGate::Cnot,
                "CZ" => TwoQubitGate::Cz,
                _ => TwoQubitGate::Swap,
            };
            Ok(Instruction::Two { gate, a: parse_qubit(arg(1)?)?, b: parse_qubit(arg(2)?)? })
        }
        "CU" => {
            let mut controls = Vec::new();
            let mut targets = Vec::new();
            let mut entries = Vec::new();
            for tok in &toks[1..] {
                if let Some(v) = tok.strip_prefix("c=") {
                    controls = v.split(',').map(parse_qubit).collect::<std::result::Result<_, _>>()?;
                } else if let Some(v) = tok.strip_prefix("t=") {
                    targets = v.split(',').map(parse_qubit).collect::<std::result::Result<_, _>>()?;
                } else if let Some(v) = tok.strip_prefix("m=") {
                    for pair in v.split(',') {
                        let (re, im) = pair.split_once(':').ok_or_else(|| format!("bad matrix entry '{pair}'"))?;
                        entries.push(Complex64::new(parse_real(re)?, parse_real(im)?));
                    }
                } else {
                    return Err(format!("unexpected CU field '{tok}'"));
                }
            }
            let dim = 1usize << targets.len();
            if entries.len() != dim * dim {
                return Err(format!("CU on {} targets needs {} matrix entries, got {}", targets.len(), dim * dim, entries.len()));
            }
            Ok(Instruction::Controlled { controls, targets, matrix: CMatrix::from_row_slice(dim, dim, &entries) })
        }
        "ANALOG" => {
            let rest = toks[1..].join(" ");
            let name = key_value(&rest, "graph").ok_or("ANALOG needs graph=<name>")?;
            let graph = resolve(name, layout).ok_or_else(|| format!("unknown coupling graph '{name}'"))?;
            let g = parse_real(key_value(&rest, "g").ok_or("ANALOG needs g=<strength>")?)?;
            let t = parse_real(key_value(&rest, "t").ok_or("ANALOG needs t=<duration>")?)?;
            let negated = match key_value(&rest, "sign") {
                None | Some("1") | Some("+1") => false,
                Some("-1") => true,
                Some(other) => return Err(format!("bad sign '{other}'")),
            };
            Ok(Instruction::Analog(AnalogBlock { graph, strength: g, duration: t, negated }))
        }
        other => Err(format!("unknown instruction '{other}'")),
    }
}
