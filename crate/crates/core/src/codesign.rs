// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! Processor connectivity models and a greedy SWAP router.

use std::collections::VecDeque;

use serde::Serialize;

use crate::aqe::MatrixFunctionSpec;
use crate::circuit::{decompose_controlled_single, Circuit, Instruction, QubitLayout, TwoQubitGate};
use crate::daqc::CouplingGraph;
use crate::error::{Error, Result};
use crate::hhl::build_hhl_circuit;
use crate::qsim::matrix::CMatrix;

pub const ARCHITECTURE_NAMES: [&str; 5] = ["kite", "line", "ring", "star", "complete"];

#[derive(Clone, Debug, PartialEq)]
pub struct Architecture {
    pub name: String,
    pub graph: CouplingGraph,
    pub layout: QubitLayout,
}

impl Architecture {
    /// Wraps a graph after checking it spans the layout and is connected.
    pub fn new(name: impl Into<String>, graph: CouplingGraph, layout: QubitLayout) -> Result<Self> {
        if graph.n_qubits() != layout.total() {
            return Err(Error::Dimension { expected: layout.total(), got: graph.n_qubits() });
        }
        let dist = bfs_distances(&graph, 0);
        if let Some(q) = dist.iter().position(Option::is_none) {
            return Err(Error::Disconnected(0, q));
        }
        Ok(Self { name: name.into(), graph, layout })
    }
}

/// `kite`, `line`, `ring`, `complete`, or `star` (ancilla joined to every other qubit).
pub fn make_architecture(name: &str, n_r: usize, n_m: usize) -> Result<Architecture> {
    let layout = QubitLayout::new(n_r, n_m)?;
    let graph = match name {
        "star" => CouplingGraph::unweighted("star", layout.total(), (1..layout.total()).map(|q| (layout.ancilla(), q)))?,
        "kite" | "line" | "ring" | "complete" => CouplingGraph::named(name, &layout)?,
        other => {
            return Err(Error::Validation(format!(
                "unknown architecture '{other}' (supported: {})",
                ARCHITECTURE_NAMES.join(", ")
            )))
        }
    };
    Architecture::new(name, graph, layout)
}

fn bfs_distances(graph: &CouplingGraph, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.n_qubits()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for v in graph.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Lexicographically smallest shortest path from `from` to `to`, endpoints included.
pub fn shortest_path(graph: &CouplingGraph, from: usize, to: usize) -> Result<Vec<usize>> {
    let dist = bfs_distances(graph, to);
    let mut d = dist[from].ok_or(Error::Disconnected(from, to))?;
    let mut path = vec![from];
    let mut cur = from;
    while d > 0 {
        cur = graph
            .neighbors(cur)
            .into_iter()
            .find(|&v| dist[v] == Some(d - 1))
            .expect("a BFS predecessor exists on every shortest path");
        path.push(cur);
        d -= 1;
    }
    Ok(path)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    pub swap_count: usize,
    /// `final_positions[l]` is the physical qubit holding logical qubit `l` at the end.
    pub final_positions: Vec<usize>,
}

impl RoutedCircuit {
    /// The routed circuit followed by SWAPs returning every logical qubit to its
    /// starting position; its unitary equals the original circuit's.
    pub fn restored(&self) -> Circuit {
        let mut pos = self.final_positions.clone();
        let mut occ = vec![0; pos.len()];
        for (l, &p) in pos.iter().enumerate() {
            occ[p] = l;
        }
        let mut out = self.circuit.clone();
        for l in 0..pos.len() {
            let p = pos[l];
            if p != l {
                let other = occ[l];
                out.append(Instruction::swap(p, l)).expect("restoring SWAPs stay inside the layout");
                pos[other] = p;
                occ[p] = other;
                pos[l] = l;
                occ[l] = l;
            }
        }
        out
    }
}

fn two_qubit_operands(inst: &Instruction) -> Result<Option<(usize, usize)>> {
    match inst {
        Instruction::Single { .. } => Ok(None),
        Instruction::Two { a, b, .. } => Ok(Some((*a, *b))),
        Instruction::Controlled { controls, targets, .. } => match (controls.as_slice(), targets.as_slice()) {
            ([], [_]) => Ok(None),
            ([c], [t]) => Ok(Some((*c, *t))),
            ([], [a, b]) => Ok(Some((*a, *b))),
            _ => Err(Error::Unsupported(format!("router needs gates on at most two qubits, got '{inst}'"))),
        },
        Instruction::Analog(_) => Err(Error::Unsupported("router does not place analog blocks".into())),
    }
}

/// Greedy router: a gate on non-adjacent qubits first walks its first operand
/// along the lexicographically smallest shortest path until it neighbours the second.
/// Qubits stay where the SWAPs leave them.
pub fn route(circuit: &Circuit, arch: &Architecture) -> Result<RoutedCircuit> {
    let n = circuit.n_qubits();
    if n != arch.graph.n_qubits() {
        return Err(Error::Dimension { expected: arch.graph.n_qubits(), got: n });
    }
    let mut pos: Vec<usize> = (0..n).collect();
    let mut occ: Vec<usize> = (0..n).collect();
    let mut out = Circuit::new(circuit.layout());
    let mut swap_count = 0;
    for inst in circuit.instructions() {
        if let Some((a, b)) = two_qubit_operands(inst)? {
            let path = shortest_path(&arch.graph, pos[a], pos[b])?;
            for w in path.windows(2).take(path.len().saturating_sub(2)) {
                let (p, q) = (w[0], w[1]);
                out.append(Instruction::swap(p, q))?;
                swap_count += 1;
                let (lp, lq) = (occ[p], occ[q]);
                occ.swap(p, q);
                pos[lp] = q;
                pos[lq] = p;
            }
        }
        out.append(inst.remapped(|q| pos[q]))?;
    }
    Ok(RoutedCircuit { circuit: out, swap_count, final_positions: pos })
}

/// ASAP layered depth; a SWAP occupies three layers.
pub fn depth_proxy(circuit: &Circuit) -> usize {
    let mut busy = vec![0usize; circuit.n_qubits()];
    for inst in circuit.instructions() {
        let qs = inst.qubits();
        let w = if matches!(inst, Instruction::Two { gate: TwoQubitGate::Swap, .. }) { 3 } else { 1 };
        let start = qs.iter().map(|&q| busy[q]).max().unwrap_or(0);
        for q in qs {
            busy[q] = start + w;
        }
    }
    busy.into_iter().max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub arch: String,
    pub swap_count: Option<usize>,
    pub depth_proxy: Option<usize>,
    pub failure: Option<String>,
}

/// Routes `circuit` on each named architecture; failures are kept per row.
pub fn compare(circuit: &Circuit, arch_names: &[&str]) -> Vec<CompareRow> {
    let layout = circuit.layout();
    arch_names
        .iter()
        .map(|&name| match make_architecture(name, layout.n_register(), layout.n_memory()).and_then(|a| route(circuit, &a)) {
            Ok(r) => CompareRow {
                arch: name.to_string(),
                swap_count: Some(r.swap_count),
                depth_proxy: Some(depth_proxy(&r.circuit)),
                failure: None,
            },
            Err(e) => CompareRow { arch: name.to_string(), swap_count: None, depth_proxy: None, failure: Some(e.to_string()) },
        })
        .collect()
}

pub fn compare_to_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from("arch,swap_count,depth_proxy\n");
    for r in rows {
        match (r.swap_count, r.depth_proxy) {
            (Some(s), Some(d)) => out.push_str(&format!("{},{},{}\n", r.arch, s, d)),
            _ => out.push_str(&format!("{},FAILED,FAILED\n", r.arch)),
        }
    }
    out
}

/// Rewrites every singly-controlled single-qubit block into CNOTs and single-qubit gates.
pub fn decompose_for_routing(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.layout());
    for inst in circuit.instructions() {
        match inst {
            Instruction::Controlled { controls, targets, matrix } if controls.len() == 1 && targets.len() == 1 => {
                out.extend(decompose_controlled_single(controls[0], targets[0], matrix))?;
            }
            other => {
                out.append(other.clone())?;
            }
        }
    }
    Ok(out)
}

/// The HHL circuit for a one-qubit memory with every controlled block decomposed.
pub fn hhl_routing_workload(n_r: usize, a_scaled: &CMatrix) -> Result<Circuit> {
    let layout = QubitLayout::new(n_r, 1)?;
    decompose_for_routing(&build_hhl_circuit(layout, a_scaled, &MatrixFunctionSpec::inverse())?)
}
