// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! Digital-analog lowering onto a homogeneous Ising processor.
//!
//! Every cZ becomes two analog blocks of `exp(i·π/8·H_I)` separated by an X
//! layer on all other coupled qubits, followed by `Rz(π/2)` on both pair
//! qubits. The X sandwich cancels every coupling between the pair and the
//! rest of the device; couplings among the remaining qubits are not cancelled
//! and are rejected at compile time.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};
use std::sync::Arc;

use serde::Serialize;

use crate::circuit::{AnalogBlock, Circuit, Instruction, QubitLayout, SingleGate, TwoQubitGate};
use crate::error::{Error, Result};
use crate::qsim::matrix::{c, paulis, CMatrix};
use crate::qsim::{circuit_unitary_with_limit, Observable, UnitaryMatrix};

/// Weighted qubit-interaction graph. Its Ising Hamiltonian is `H_I = Σ g_ij Z_i Z_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingGraph {
    name: String,
    n_qubits: usize,
    /// Sorted `(i, j, g_ij)` with `i < j`.
    edges: Vec<(usize, usize, f64)>,
}

impl CouplingGraph {
    pub fn new(name: impl Into<String>, n_qubits: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b, g) in edges {
            if a == b {
                return Err(Error::Validation(format!("self-edge on qubit {a}")));
            }
            if a >= n_qubits || b >= n_qubits {
                return Err(Error::Validation(format!("edge ({a},{b}) out of range for {n_qubits} qubits")));
            }
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::Validation(format!("edge ({a},{b}) strength {g} must be positive")));
            }
            norm.push((a.min(b), a.max(b), g));
        }
        norm.sort_by_key(|x| (x.0, x.1));
        if norm.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Validation("duplicate edge".into()));
        }
        Ok(Self { name: name.into(), n_qubits, edges: norm })
    }

    /// Unit-strength graph from an edge list.
    pub fn unweighted(name: impl Into<String>, n_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(name, n_qubits, edges.into_iter().map(|(a, b)| (a, b, 1.0)).collect())
    }

    /// Built-in graphs over an HHL layout:
    /// `star` (ancilla–register only), `kite`, `line`, `ring`, `complete`.
    pub fn named(name: &str, layout: &QubitLayout) -> Result<Self> {
        let n = layout.total();
        let a = layout.ancilla();
        let reg: Vec<usize> = layout.register_qubits().collect();
        let mem: Vec<usize> = layout.memory_qubits().collect();
        let edges: Vec<(usize, usize)> = match name {
            "star" => reg.iter().map(|&r| (a, r)).collect(),
            "kite" => {
                let mut e = Vec::new();
                for (i, &r) in reg.iter().enumerate() {
                    e.extend(reg[i + 1..].iter().map(|&s| (r, s)));
                }
                e.extend(reg.iter().map(|&r| (a, r)));
                for &r in &reg {
                    e.extend(mem.iter().map(|&m| (r, m)));
                }
                e
            }
            "line" => (0..n - 1).map(|q| (q, q + 1)).collect(),
            "ring" => {
                let mut e: Vec<_> = (0..n - 1).map(|q| (q, q + 1)).collect();
                if n > 2 {
                    e.push((0, n - 1));
                }
                e
            }
            "complete" => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            other => {
                return Err(Error::Validation(format!(
                    "unknown coupling graph '{other}' (expected star, kite, line, ring or complete)"
                )))
            }
        };
        Self::unweighted(name, n, edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_strength(&self, a: usize, b: usize) -> Option<f64> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().find(|e| (e.0, e.1) == key).map(|e| e.2)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_strength(a, b).is_some()
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(i, j, _)| {
                if i == q {
                    Some(j)
                } else if j == q {
                    Some(i)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Common strength when every edge has the same weight.
    pub fn homogeneous_strength(&self) -> Option<f64> {
        let first = self.edges.first()?.2;
        self.edges.iter().all(|e| (e.2 - first).abs() <= 1e-12 * first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_strength().is_some()
    }

    /// Qubits with at least one coupling, ascending.
    pub fn active_qubits(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges.iter().flat_map(|e| [e.0, e.1]).collect();
        set.into_iter().collect()
    }

    /// Diagonal of `H_I` in the computational basis.
    pub fn ising_diagonal(&self) -> Vec<f64> {
        let n = self.n_qubits;
        (0..1usize << n)
            .map(|idx| {
                let z = |q: usize| if idx & (1 << (n - 1 - q)) == 0 { 1.0 } else { -1.0 };
                self.edges.iter().map(|&(i, j, g)| g * z(i) * z(j)).sum()
            })
            .collect()
    }

    pub fn ising_hamiltonian(&self) -> Observable {
        Observable::diagonal(&self.ising_diagonal())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleItem {
    /// Simultaneous single-qubit gates on disjoint qubits.
    Digital(Vec<Instruction>),
    /// `exp(±i·t·H_I)`; `negated` selects the minus sign.
    Analog { duration: f64, negated: bool },
}

impl ScheduleItem {
    fn signed_duration(&self) -> Option<f64> {
        match self {
            ScheduleItem::Analog { duration, negated } => Some(if *negated { -duration } else { *duration }),
            ScheduleItem::Digital(_) => None,
        }
    }

    fn analog_from_signed(t: f64) -> Self {
        ScheduleItem::Analog { duration: t.abs(), negated: t < 0.0 }
    }
}

/// Alternating digital layers and analog blocks over one coupling graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    layout: QubitLayout,
    graph: Arc<CouplingGraph>,
    items: Vec<ScheduleItem>,
    /// Register size of the circuit the schedule was compiled from, when known.
    pub n_register: Option<usize>,
}

fn digital_qubit(inst: &Instruction) -> Option<usize> {
    match inst {
        Instruction::Single { qubit, .. } => Some(*qubit),
        Instruction::Controlled { controls, targets, .. } if controls.is_empty() && targets.len() == 1 => Some(targets[0]),
        _ => None,
    }
}

fn is_diagonal_gate(inst: &Instruction) -> bool {
    match inst {
        Instruction::Single { gate, .. } => gate.is_diagonal(),
        Instruction::Controlled { matrix, .. } => matrix[(0, 1)].norm() == 0.0 && matrix[(1, 0)].norm() == 0.0,
        _ => false,
    }
}

fn single_matrix(inst: &Instruction) -> CMatrix {
    match inst {
        Instruction::Single { gate, .. } => gate.matrix(),
        Instruction::Controlled { matrix, .. } => matrix.clone(),
        _ => unreachable!("digital layers hold single-qubit gates only"),
    }
}

impl Schedule {
    pub fn new(layout: QubitLayout, graph: Arc<CouplingGraph>) -> Result<Self> {
        if graph.n_qubits() != layout.total() {
            return Err(Error::Validation(format!(
                "graph '{}' spans {} qubits, layout has {}",
                graph.name(),
                graph.n_qubits(),
                layout.total()
            )));
        }
        Ok(Self { layout, graph, items: Vec::new(), n_register: None })
    }

    pub fn layout(&self) -> QubitLayout {
        self.layout
    }

    pub fn graph(&self) -> &Arc<CouplingGraph> {
        &self.graph
    }

    pub fn items(&self) -> &[ScheduleItem] {
        &self.items
    }

    /// Adds a single-qubit gate to the trailing digital layer, opening a new
    /// layer when the qubit is already busy there.
    pub fn push_gate(&mut self, inst: Instruction) -> Result<()> {
        let q = digital_qubit(&inst)
            .ok_or_else(|| Error::Precondition(format!("digital layers accept single-qubit gates only, got {inst}")))?;
        inst.validate(self.layout.total())?;
        match self.items.last_mut() {
            Some(ScheduleItem::Digital(layer)) if layer.iter().all(|g| digital_qubit(g) != Some(q)) => layer.push(inst),
            _ => self.items.push(ScheduleItem::Digital(vec![inst])),
        }
        Ok(())
    }

    pub fn push_analog(&mut self, duration: f64) -> Result<()> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::Validation(format!("analog duration {duration} must be finite and >= 0")));
        }
        self.items.push(ScheduleItem::Analog { duration, negated: false });
        Ok(())
    }

    /// Pushes a raw item; digital layers must have disjoint single-qubit operands.
    pub fn push_item(&mut self, item: ScheduleItem) -> Result<()> {
        match &item {
            ScheduleItem::Digital(layer) => {
                let mut seen = BTreeSet::new();
                for g in layer {
                    g.validate(self.layout.total())?;
                    let q = digital_qubit(g).ok_or_else(|| Error::Precondition(format!("not a single-qubit gate: {g}")))?;
                    if !seen.insert(q) {
                        return Err(Error::Precondition(format!("digital layer uses q{q} twice")));
                    }
                }
            }
            ScheduleItem::Analog { duration, .. } => {
                if !(*duration >= 0.0) || !duration.is_finite() {
                    return Err(Error::Validation(format!("analog duration {duration} must be finite and >= 0")));
                }
            }
        }
        self.items.push(item);
        Ok(())
    }

    fn append_schedule(&mut self, other: Schedule) -> Result<()> {
        for item in other.items {
            match item {
                ScheduleItem::Digital(layer) => {
                    for g in layer {
                        self.push_gate(g)?;
                    }
                }
                analog => self.items.push(analog),
            }
        }
        Ok(())
    }

    /// Flattens into a circuit: digital gates in layer order, analog items as `ANALOG` blocks.
    pub fn to_circuit(&self) -> Circuit {
        let mut circuit = Circuit::new(self.layout);
        for item in &self.items {
            match item {
                ScheduleItem::Digital(layer) => {
                    circuit.extend(layer.iter().cloned()).expect("layer gates were validated on insertion");
                }
                ScheduleItem::Analog { duration, negated } => {
                    let block = AnalogBlock { graph: self.graph.clone(), strength: 1.0, duration: *duration, negated: *negated };
                    circuit.append(Instruction::Analog(block)).expect("analog items were validated on insertion");
                }
            }
        }
        circuit
    }

    pub fn unitary(&self, oracle_limit: usize) -> Result<UnitaryMatrix> {
        circuit_unitary_with_limit(&self.to_circuit(), oracle_limit)
    }

    pub fn analog_count(&self) -> usize {
        self.items.iter().filter(|i| matches!(i, ScheduleItem::Analog { .. })).count()
    }

    pub fn digital_gate_count(&self) -> usize {
        self.items
            .iter()
            .map(|i| match i {
                ScheduleItem::Digital(l) => l.len(),
                _ => 0,
            })
            .sum()
    }
}

fn require_homogeneous(graph: &CouplingGraph) -> Result<f64> {
    graph
        .homogeneous_strength()
        .ok_or_else(|| Error::Validation(format!("coupling graph '{}' is empty or not homogeneous", graph.name())))
}

/// Lowers `cZ(a, b)` into `[X on rest] · A(π/8g) · [X on rest] · A(π/8g) · [Rz(π/2) a, Rz(π/2) b]`.
pub fn compile_cz(a: usize, b: usize, graph: &Arc<CouplingGraph>, layout: QubitLayout) -> Result<Schedule> {
    let g = require_homogeneous(graph)?;
    if !graph.has_edge(a, b) {
        return Err(Error::Validation(format!("no coupling between q{a} and q{b} in graph '{}'", graph.name())));
    }
    let outside: Vec<usize> = graph.active_qubits().into_iter().filter(|&q| q != a && q != b).collect();
    if let Some(&(i, j, _)) = graph.edges().iter().find(|e| outside.contains(&e.0) && outside.contains(&e.1)) {
        return Err(Error::ResidualCoupling(i, j));
    }
    let t = FRAC_PI_8 / g;
    let x_layer: Vec<Instruction> = outside.iter().map(|&q| Instruction::single(SingleGate::X, q)).collect();
    let mut s = Schedule::new(layout, graph.clone())?;
    if !x_layer.is_empty() {
        s.push_item(ScheduleItem::Digital(x_layer.clone()))?;
    }
    s.push_analog(t)?;
    if !x_layer.is_empty() {
        s.push_item(ScheduleItem::Digital(x_layer))?;
    }
    s.push_analog(t)?;
    s.push_item(ScheduleItem::Digital(vec![
        Instruction::single(SingleGate::Rz(FRAC_PI_2), a),
        Instruction::single(SingleGate::Rz(FRAC_PI_2), b),
    ]))?;
    Ok(s)
}

/// Step-wise lowering of a circuit built from single-qubit gates, CNOT and cZ.
/// Runs [`merge_analog`] on the result.
pub fn compile_sdaqc(circuit: &Circuit, graph: &Arc<CouplingGraph>) -> Result<Schedule> {
    compile_sdaqc_with(circuit, graph, true)
}

pub fn compile_sdaqc_with(circuit: &Circuit, graph: &Arc<CouplingGraph>, merge: bool) -> Result<Schedule> {
    let layout = circuit.layout();
    let mut s = Schedule::new(layout, graph.clone())?;
    s.n_register = Some(layout.n_register());
    for inst in circuit.instructions() {
        match inst {
            Instruction::Two { gate: TwoQubitGate::Cnot, a, b } => {
                s.push_gate(Instruction::single(SingleGate::H, *b))?;
                s.append_schedule(compile_cz(*a, *b, graph, layout)?)?;
                s.push_gate(Instruction::single(SingleGate::H, *b))?;
            }
            Instruction::Two { gate: TwoQubitGate::Cz, a, b } => s.append_schedule(compile_cz(*a, *b, graph, layout)?)?,
            other if digital_qubit(other).is_some() => s.push_gate(other.clone())?,
            other => return Err(Error::Unsupported(format!("sDAQC lowering does not handle '{other}'"))),
        }
    }
    Ok(if merge { merge_analog(&s) } else { s })
}

/// Fuses adjacent analog blocks, packs adjacent disjoint digital layers, and
/// moves all-diagonal layers out from between two analog blocks (Z commutes with ZZ).
pub fn merge_analog(schedule: &Schedule) -> Schedule {
    let mut items = schedule.items.clone();
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < items.len() {
            match (&items[i], &items[i + 1]) {
                (ScheduleItem::Analog { .. }, ScheduleItem::Analog { .. }) => {
                    let t = items[i].signed_duration().unwrap() + items[i + 1].signed_duration().unwrap();
                    items.splice(i..i + 2, [ScheduleItem::analog_from_signed(t)]);
                    changed = true;
                    continue;
                }
                (ScheduleItem::Digital(l1), ScheduleItem::Digital(l2)) => {
                    let disjoint = l1.iter().all(|g| l2.iter().all(|h| digital_qubit(g) != digital_qubit(h)));
                    if disjoint {
                        let mut merged = l1.clone();
                        merged.extend(l2.iter().cloned());
                        items.splice(i..i + 2, [ScheduleItem::Digital(merged)]);
                        changed = true;
                        continue;
                    }
                }
                (ScheduleItem::Analog { .. }, ScheduleItem::Digital(layer))
                    if layer.iter().all(is_diagonal_gate) && matches!(items.get(i + 2), Some(ScheduleItem::Analog { .. })) =>
                {
                    items.swap(i, i + 1);
                    changed = true;
                    continue;
                }
                _ => {}
            }
            i += 1;
        }
        items.retain(|it| !matches!(it, ScheduleItem::Analog { duration, .. } if *duration == 0.0));
        if !changed {
            break;
        }
    }
    Schedule { items, ..schedule.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BangParams {
    /// Single-qubit pulse duration in time units.
    pub delta_t: f64,
}

impl BangParams {
    pub fn new(delta_t: f64) -> Result<Self> {
        if !(delta_t > 0.0) || !delta_t.is_finite() {
            return Err(Error::Validation(format!("bang duration {delta_t} must be positive")));
        }
        Ok(Self { delta_t })
    }
}

#[derive(Clone, Debug)]
pub struct BangResult {
    pub unitary: UnitaryMatrix,
    /// Set when some pulse needed more interaction time than its neighbouring blocks had.
    pub overlap_warning: bool,
}

/// `(θ, n)` with `U ∝ exp(−i·θ/2·n·σ)` and `θ ∈ [0, π]`.
pub(crate) fn rotation_axis_angle(u: &CMatrix) -> (f64, [f64; 3]) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let mut su = u / det.sqrt();
    if (su[(0, 0)] + su[(1, 1)]).re < 0.0 {
        su = -su;
    }
    let cos = (su[(0, 0)] + su[(1, 1)]).re / 2.0;
    let v = [-(su[(0, 1)] + su[(1, 0)]).im / 2.0, (su[(1, 0)] - su[(0, 1)]).re / 2.0, -(su[(0, 0)] - su[(1, 1)]).im / 2.0];
    let sin = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let theta = 2.0 * sin.atan2(cos);
    if sin < 1e-15 {
        return (0.0, [0.0, 0.0, 1.0]);
    }
    (theta, [v[0] / sin, v[1] / sin, v[2] / sin])
}

/// Banged simulation: each digital layer runs for `Δt` on top of the always-on
/// interaction, and the interaction time is taken back from the neighbouring
/// analog blocks (`Δt/2` per side, all of it from one side when only one exists).
pub fn simulate_bdaqc(schedule: &Schedule, params: BangParams) -> Result<BangResult> {
    let n = schedule.layout.total();
    let dt = params.delta_t;
    let items = &schedule.items;
    if items.iter().any(|i| matches!(i, ScheduleItem::Analog { negated: true, .. })) {
        return Err(Error::Precondition("banged simulation needs forward-time analog blocks".into()));
    }
    let mut durations: Vec<f64> = items
        .iter()
        .map(|i| match i {
            ScheduleItem::Analog { duration, .. } => *duration,
            ScheduleItem::Digital(_) => 0.0,
        })
        .collect();
    let is_analog = |k: usize| matches!(items.get(k), Some(ScheduleItem::Analog { .. }));
    let mut overlap_warning = false;
    for (k, item) in items.iter().enumerate() {
        if !matches!(item, ScheduleItem::Digital(_)) {
            continue;
        }
        let left = k > 0 && is_analog(k - 1);
        let right = is_analog(k + 1);
        let takes: Vec<(usize, f64)> = match (left, right) {
            (true, true) => vec![(k - 1, dt / 2.0), (k + 1, dt / 2.0)],
            (true, false) => vec![(k - 1, dt)],
            (false, true) => vec![(k + 1, dt)],
            (false, false) => vec![],
        };
        for (idx, amount) in takes {
            if durations[idx] < amount {
                overlap_warning = true;
                durations[idx] = 0.0;
            } else {
                durations[idx] -= amount;
            }
        }
    }

    let h_int = schedule.graph.ising_hamiltonian();
    let mut total = UnitaryMatrix::identity(1 << n);
    for (k, item) in items.iter().enumerate() {
        let step = match item {
            ScheduleItem::Analog { .. } => h_int.exp_i(durations[k]),
            ScheduleItem::Digital(layer) => {
                let mut drive = CMatrix::zeros(1 << n, 1 << n);
                for g in layer {
                    let q = digital_qubit(g).expect("digital layer gate");
                    let (theta, axis) = rotation_axis_angle(&single_matrix(g));
                    let gen = paulis::x() * c(axis[0], 0.0) + paulis::y() * c(axis[1], 0.0) + paulis::z() * c(axis[2], 0.0);
                    drive += paulis::on_qubit(&gen, q, n) * c(theta / (2.0 * dt), 0.0);
                }
                let h = Observable::new(h_int.entries() - drive)?;
                h.exp_i(dt)
            }
        };
        total = step.compose(&total)?;
    }
    Ok(BangResult { unitary: total, overlap_warning })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DaqcBounds {
    pub analog_blocks: usize,
    pub single_qubit_gates: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundFlags {
    pub analog_within: bool,
    pub single_within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DaqcResourceReport {
    pub analog_blocks: usize,
    pub total_analog_time: f64,
    pub single_qubit_gates: usize,
    pub digital_layers: usize,
    pub n_register: Option<usize>,
    /// `2^{n_R}` analog blocks and `(n_R+1)·2^{n_R}+1` single-qubit gates.
    pub published_bounds: Option<DaqcBounds>,
    pub within_bounds: Option<BoundFlags>,
}

/// Counts for a schedule plus the comparison against the published AQE figures
/// (reported, never enforced).
pub fn resource_report(schedule: &Schedule) -> DaqcResourceReport {
    let analog_blocks = schedule.analog_count();
    let single_qubit_gates = schedule.digital_gate_count();
    let total_analog_time = schedule
        .items
        .iter()
        .filter_map(|i| match i {
            ScheduleItem::Analog { duration, .. } => Some(*duration),
            _ => None,
        })
        .sum();
    let digital_layers = schedule.items.len() - analog_blocks;
    let published_bounds =
        schedule.n_register.map(|n| DaqcBounds { analog_blocks: 1 << n, single_qubit_gates: (n + 1) * (1 << n) + 1 });
    let within_bounds = published_bounds.map(|b| BoundFlags {
        analog_within: analog_blocks <= b.analog_blocks,
        single_within: single_qubit_gates <= b.single_qubit_gates,
    });
    DaqcResourceReport {
        analog_blocks,
        total_analog_time,
        single_qubit_gates,
        digital_layers,
        n_register: schedule.n_register,
        published_bounds,
        within_bounds,
    }
}
