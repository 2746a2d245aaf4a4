// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

//! HHL pipeline: rescaling, QPE, AQE, inverse QPE and post-selection, plus the
//! classical reference solver and the register-size / shot-count error sweep.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::aqe::{self, MatrixFunctionSpec};
use crate::circuit::{Circuit, Instruction, QubitLayout, SingleGate};
use crate::error::{Error, Result};
use crate::qsim::matrix::{c, paulis, CMatrix, CVector, HERMITIAN_TOL};
use crate::qsim::{Observable, StateVector};

/// Smallest accepted singular value of `A`.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Post-selection probabilities below this are treated as degenerate.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

/// `A·x = b` with Hermitian `A` of size `2^{n_M}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    a: CMatrix,
    b: CVector,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    #[serde(rename = "A_re")]
    a_re: Vec<Vec<f64>>,
    #[serde(rename = "A_im", default)]
    a_im: Option<Vec<Vec<f64>>>,
    b_re: Vec<f64>,
    #[serde(default)]
    b_im: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ProblemFileOut {
    #[serde(rename = "A_re")]
    a_re: Vec<Vec<f64>>,
    #[serde(rename = "A_im")]
    a_im: Vec<Vec<f64>>,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(a: CMatrix, b: CVector) -> Result<Self> {
        let n = a.nrows();
        if n < 2 || !n.is_power_of_two() || a.ncols() != n {
            return Err(Error::Validation(format!("A is {}x{}, expected a square power-of-two size >= 2", n, a.ncols())));
        }
        if b.len() != n {
            return Err(Error::Dimension { expected: n, got: b.len() });
        }
        let defect = (&a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > HERMITIAN_TOL {
            return Err(Error::Validation(format!("A is not Hermitian (max |A - A†| = {defect:e})")));
        }
        if a.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("A or b holds a non-finite entry".into()));
        }
        if b.norm() == 0.0 {
            return Err(Error::Validation("b is the zero vector".into()));
        }
        Ok(Self { a, b })
    }

    pub fn from_real(a: &[&[f64]], b: &[f64]) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("A rows have unequal lengths".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, j| c(a[i][j], 0.0));
        Self::new(m, CVector::from_iterator(b.len(), b.iter().map(|&v| c(v, 0.0))))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let n = file.a_re.len();
        let a_im = file.a_im.unwrap_or_else(|| vec![vec![0.0; n]; n]);
        let b_im = file.b_im.unwrap_or_else(|| vec![0.0; file.b_re.len()]);
        if a_im.len() != n || file.a_re.iter().chain(&a_im).any(|r| r.len() != n) {
            return Err(Error::Validation("A_re and A_im must be square with equal shapes".into()));
        }
        if b_im.len() != file.b_re.len() {
            return Err(Error::Validation("b_re and b_im have different lengths".into()));
        }
        let a = CMatrix::from_fn(n, n, |i, j| c(file.a_re[i][j], a_im[i][j]));
        let b = CVector::from_iterator(file.b_re.len(), file.b_re.iter().zip(&b_im).map(|(&r, &i)| c(r, i)));
        Self::new(a, b)
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        let out = ProblemFileOut {
            a_re: (0..n).map(|i| (0..n).map(|j| self.a[(i, j)].re).collect()).collect(),
            a_im: (0..n).map(|i| (0..n).map(|j| self.a[(i, j)].im).collect()).collect(),
            b_re: self.b.iter().map(|z| z.re).collect(),
            b_im: self.b.iter().map(|z| z.im).collect(),
        };
        serde_json::to_string_pretty(&out).expect("problem serializes")
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_memory(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rescaled {
    pub a_scaled: CMatrix,
    pub t0: f64,
    pub kappa: f64,
    /// Ascending eigenvalues of `a_scaled`.
    pub eigenvalues: Vec<f64>,
}

fn hermitian_spectrum(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(Observable::new(a.clone())?.eigen().values)
}

fn check_invertible(values: &[f64]) -> Result<()> {
    let sigma_min = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if sigma_min < SINGULAR_TOL {
        return Err(Error::Singular { sigma_min });
    }
    Ok(())
}

/// Scales a positive-definite `A` by `t0 = 1/(2·λ_max)` so the spectrum lies in `(0, 1/2]`.
pub fn rescale(a: &CMatrix) -> Result<Rescaled> {
    let values = hermitian_spectrum(a)?;
    rescale_with(a, 1.0 / (2.0 * values.last().copied().unwrap_or(0.0)), &values)
}

fn rescale_with(a: &CMatrix, t0: f64, values: &[f64]) -> Result<Rescaled> {
    check_invertible(values)?;
    if values[0] < 0.0 {
        return Err(Error::Unsupported(format!("A is not positive definite (smallest eigenvalue {})", values[0])));
    }
    let scaled: Vec<f64> = values.iter().map(|v| v * t0).collect();
    if !(t0 > 0.0) || !t0.is_finite() || scaled.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        return Err(Error::Validation(format!("t0 = {t0} puts the spectrum outside (0, 1)")));
    }
    let kappa = values.last().unwrap() / values[0];
    Ok(Rescaled { a_scaled: a * c(t0, 0.0), t0, kappa, eigenvalues: scaled })
}

/// `β_{k|λ} = 2^{-n}·Σ_y e^{2πi·y·(λ − k/2^n)}` in closed form.
pub fn qpe_amplitude(lambda: f64, k: usize, n_r: usize) -> Complex64 {
    let n = (1usize << n_r) as f64;
    let delta = lambda - k as f64 / n;
    let denom = c(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * delta);
    if denom.norm() < 1e-12 {
        return c(1.0, 0.0);
    }
    (c(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * n * delta)) / (denom * n)
}

fn phase_gate(alpha: f64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), Complex64::from_polar(1.0, alpha)]))
}

/// Textbook QFT on `qubits` (most significant first): `|x⟩ → 2^{-n/2}·Σ_y e^{2πi·xy/2^n}|y⟩`.
pub fn build_qft(layout: QubitLayout, qubits: &[usize]) -> Result<Circuit> {
    let n = qubits.len();
    let mut circ = Circuit::new(layout);
    for j in 0..n {
        circ.append(Instruction::single(SingleGate::H, qubits[j]))?;
        for m in j + 1..n {
            let alpha = 2.0 * PI / (1u64 << (m - j + 1)) as f64;
            circ.append(Instruction::Controlled {
                controls: vec![qubits[m]],
                targets: vec![qubits[j]],
                matrix: phase_gate(alpha),
            })?;
        }
    }
    for j in 0..n / 2 {
        circ.append(Instruction::swap(qubits[j], qubits[n - 1 - j]))?;
    }
    Ok(circ)
}

/// Powers `e^{2πi·A·2^k}` for `k = 0..n_R`, by eigendecomposition.
fn controlled_powers(a_scaled: &CMatrix, n_r: usize) -> Result<Vec<CMatrix>> {
    let h = Observable::new(a_scaled.clone())?;
    Ok((0..n_r).map(|k| h.exp_i(2.0 * PI * (1u64 << k) as f64).into_entries()).collect())
}

/// Register Hadamards, register qubit `j` controlling `U^{2^{n_R−1−j}}` on memory, inverse QFT.
pub fn build_qpe(layout: QubitLayout, a_scaled: &CMatrix) -> Result<Circuit> {
    let n_r = layout.n_register();
    if a_scaled.nrows() != 1 << layout.n_memory() {
        return Err(Error::Dimension { expected: 1 << layout.n_memory(), got: a_scaled.nrows() });
    }
    let powers = controlled_powers(a_scaled, n_r)?;
    let reg: Vec<usize> = layout.register_qubits().collect();
    let mem: Vec<usize> = layout.memory_qubits().collect();
    let mut circ = Circuit::new(layout);
    for &q in &reg {
        circ.append(Instruction::single(SingleGate::H, q))?;
    }
    for (j, &q) in reg.iter().enumerate() {
        circ.append(Instruction::Controlled { controls: vec![q], targets: mem.clone(), matrix: powers[n_r - 1 - j].clone() })?;
    }
    circ.concat(&build_qft(layout, &reg)?.inverse())
}

/// QPE, AQE for `f`, inverse QPE. The `|b⟩` load is left to the caller.
pub fn build_hhl_circuit(layout: QubitLayout, a_scaled: &CMatrix, f: &MatrixFunctionSpec) -> Result<Circuit> {
    let qpe = build_qpe(layout, a_scaled)?;
    qpe.concat(&aqe::synthesize_on(layout, f)?)?.concat(&qpe.inverse())
}

#[derive(Clone, Debug)]
pub struct HHLConfig {
    pub n_r: usize,
    /// Fixed time scale; `None` applies [`rescale`].
    pub t0: Option<f64>,
    /// Shots for the observable estimate; 0 skips sampling.
    pub shots: usize,
    pub seed: u64,
    pub function: MatrixFunctionSpec,
    /// Observable on the memory qubits; defaults to `Z` on the first memory qubit.
    pub observable: Option<Observable>,
}

impl HHLConfig {
    pub fn new(n_r: usize) -> Self {
        Self { n_r, t0: None, shots: 0, seed: 0, function: MatrixFunctionSpec::inverse(), observable: None }
    }

    pub fn with_shots(mut self, shots: usize, seed: u64) -> Self {
        self.shots = shots;
        self.seed = seed;
        self
    }

    pub fn with_function(mut self, f: MatrixFunctionSpec) -> Self {
        self.function = f;
        self
    }
}

/// `Z` on memory qubit 0, identity elsewhere.
pub fn default_observable(n_m: usize) -> Observable {
    Observable::new(paulis::on_qubit(&paulis::z(), 0, n_m)).expect("Pauli Z is Hermitian")
}

fn serialize_complex_vec<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableEstimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionReport {
    /// Normalized post-selected memory state as `[re, im]` pairs.
    #[serde(serialize_with = "serialize_complex_vec")]
    pub solution: CVector,
    pub post_select_probability: f64,
    pub fidelity_vs_classical: f64,
    pub residual_norm: f64,
    pub condition_number: f64,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    #[serde(rename = "n_R")]
    pub n_r: usize,
    pub t0: f64,
    /// Register population left outside `|0…0⟩` after uncomputation, given ancilla = 1.
    pub register_leakage: f64,
    pub observable_exact: f64,
    pub observable_estimate: Option<ObservableEstimate>,
}

impl SolutionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `A⁻¹b`, normalized.
pub fn classical_solve(instance: &ProblemInstance) -> Result<CVector> {
    check_invertible(&hermitian_spectrum(&instance.a)?)?;
    let x = instance.a.clone().lu().solve(&instance.b).ok_or(Error::Singular { sigma_min: 0.0 })?;
    Ok(&x / c(x.norm(), 0.0))
}

fn normalized(v: &CVector) -> CVector {
    v / c(v.norm(), 0.0)
}

/// Removes the global phase so the largest-magnitude entry is real and positive.
fn phase_fixed(v: &CVector) -> CVector {
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(c(1.0, 0.0));
    if pivot.norm() == 0.0 {
        return v.clone();
    }
    v * (pivot.conj() / pivot.norm())
}

/// `(|⟨x|y⟩|², min_θ ‖x − e^{iθ}y‖)` for unit vectors.
pub fn compare_states(x: &CVector, y: &CVector) -> (f64, f64) {
    let overlap = x.dotc(y);
    let fidelity = overlap.norm_sqr().min(1.0);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    let residual = (x - y * phase.conj()).norm();
    (fidelity, residual)
}

/// Runs the post-selected pipeline and returns the full state after post-selection
/// together with the ancilla-1 probability.
pub fn run_state(instance: &ProblemInstance, config: &HHLConfig) -> Result<(StateVector, f64, Rescaled)> {
    let scaled = match config.t0 {
        None => rescale(&instance.a)?,
        Some(t0) => rescale_with(&instance.a, t0, &hermitian_spectrum(&instance.a)?)?,
    };
    let layout = QubitLayout::new(config.n_r, instance.n_memory())?;
    let circuit = build_hhl_circuit(layout, &scaled.a_scaled, &config.function)?;
    let b = StateVector::from_amplitudes(instance.b.iter().copied().collect())?;
    let init = StateVector::zero(1 + config.n_r).tensor(&b);
    let out = init.run(&circuit)?;
    let (post, p) = out.post_select(layout.ancilla(), 1).map_err(|e| match e {
        Error::ImpossibleOutcome { .. } => Error::Degenerate("post-selection probability is zero".into()),
        other => other,
    })?;
    if p < DEGENERATE_PROBABILITY {
        return Err(Error::Degenerate(format!("post-selection probability {p:e} below {DEGENERATE_PROBABILITY:e}")));
    }
    Ok((post, p, scaled))
}

/// Memory amplitudes with ancilla = 1 and register = `|0…0⟩`, unnormalized.
fn register_zero_branch(post: &StateVector, n_m: usize) -> CVector {
    let n = post.n_qubits();
    let anc_bit = 1usize << (n - 1);
    CVector::from_iterator(1 << n_m, (0..1usize << n_m).map(|m| post.amplitudes()[anc_bit | m]))
}

pub fn run(instance: &ProblemInstance, config: &HHLConfig) -> Result<SolutionReport> {
    let (post, p, scaled) = run_state(instance, config)?;
    let n_m = instance.n_memory();
    let branch = register_zero_branch(&post, n_m);
    let kept = branch.norm_squared();
    if kept < DEGENERATE_PROBABILITY {
        return Err(Error::Degenerate("register did not return to |0...0> in the post-selected branch".into()));
    }
    let solution = phase_fixed(&normalized(&branch));
    let classical = classical_solve(instance)?;
    let (fidelity, residual) = compare_states(&classical, &solution);
    let omega = config.observable.clone().unwrap_or_else(|| default_observable(n_m));
    let observable_exact = expectation(&solution, &omega)?;
    let observable_estimate = if config.shots > 0 {
        let s = StateVector::from_amplitudes(solution.iter().copied().collect())?;
        Some(estimate_observable(&s, &omega, config.shots, config.seed)?)
    } else {
        None
    };
    Ok(SolutionReport {
        solution,
        post_select_probability: p,
        fidelity_vs_classical: fidelity,
        residual_norm: residual,
        condition_number: scaled.kappa,
        c: config.function.normalization(config.n_r),
        n_r: config.n_r,
        t0: scaled.t0,
        register_leakage: (1.0 - kept).max(0.0),
        observable_exact,
        observable_estimate,
    })
}

fn expectation(v: &CVector, omega: &Observable) -> Result<f64> {
    if omega.dim() != v.len() {
        return Err(Error::Dimension { expected: v.len(), got: omega.dim() });
    }
    Ok(v.dotc(&(omega.entries() * v)).re)
}

/// Born-rule sampling of `obs` eigenvalues with a seeded generator; mean and standard error.
pub fn estimate_observable(state: &StateVector, obs: &Observable, shots: usize, seed: u64) -> Result<ObservableEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = OutcomeSampler::new(state, obs)?;
    sampler.estimate(shots, &mut rng)
}

/// Eigenvalues of an observable with their Born probabilities in a given state.
struct OutcomeSampler {
    values: Vec<f64>,
    dist: WeightedIndex<f64>,
}

impl OutcomeSampler {
    fn new(state: &StateVector, obs: &Observable) -> Result<Self> {
        if obs.dim() != state.amplitudes().len() {
            return Err(Error::Dimension { expected: state.amplitudes().len(), got: obs.dim() });
        }
        let eig = obs.eigen();
        let psi = CVector::from_column_slice(state.amplitudes());
        let probs: Vec<f64> = (0..eig.values.len()).map(|i| eig.vectors.column(i).dotc(&psi).norm_sqr()).collect();
        let dist = WeightedIndex::new(&probs).map_err(|e| Error::Validation(format!("outcome distribution: {e}")))?;
        Ok(Self { values: eig.values, dist })
    }

    fn estimate(&self, shots: usize, rng: &mut ChaCha8Rng) -> Result<ObservableEstimate> {
        if shots == 0 {
            return Err(Error::Precondition("shot count must be >= 1".into()));
        }
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..shots {
            let v = self.values[self.dist.sample(rng)];
            sum += v;
            sum_sq += v * v;
        }
        let n = shots as f64;
        let mean = sum / n;
        let var = if shots > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        Ok(ObservableEstimate { mean, stderr: (var / n).sqrt() })
    }
}

/// `ceil(log2(κ·√N_s))`, at least 1.
pub fn recommended_register_size(kappa: f64, shots: usize) -> usize {
    let v = (kappa * (shots.max(1) as f64).sqrt()).log2().ceil();
    if v.is_finite() && v >= 1.0 {
        v as usize
    } else {
        1
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n_r_values: Vec<usize>,
    pub shots_values: Vec<usize>,
    pub base_seed: u64,
    /// Independent estimates per row; the row reports their root-mean-square error.
    pub repeats: usize,
    pub observable: Option<Observable>,
}

impl SweepConfig {
    pub fn new(n_r_values: Vec<usize>, shots_values: Vec<usize>, base_seed: u64) -> Self {
        Self { n_r_values, shots_values, base_seed, repeats: 1, observable: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_r: usize,
    pub shots: usize,
    pub residual_norm: f64,
    /// RMS of `|estimate − ⟨x|Ω|x⟩|` against the classical solution.
    pub observable_error: f64,
    /// RMS of `|estimate − ⟨x̃|Ω|x̃⟩|`: the sampling part alone.
    pub sampling_error: f64,
    /// `|⟨x̃|Ω|x̃⟩ − ⟨x|Ω|x⟩|`: the register-size part alone.
    pub bias: f64,
    pub post_select_probability: f64,
    pub recommended_n_r: usize,
    pub failure: Option<String>,
}

/// One row per `(n_R, N_s)` in input order; row `i` samples with seed `base_seed + i`.
/// A failing row is marked and the sweep continues.
pub fn error_sweep(instance: &ProblemInstance, config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.n_r_values.is_empty() || config.shots_values.is_empty() {
        return Err(Error::Validation("sweep ranges must be non-empty".into()));
    }
    if config.repeats == 0 {
        return Err(Error::Validation("repeats must be >= 1".into()));
    }
    let kappa = rescale(&instance.a)?.kappa;
    let classical = classical_solve(instance)?;
    let omega = config.observable.clone().unwrap_or_else(|| default_observable(instance.n_memory()));
    let truth = expectation(&classical, &omega)?;
    let grid: Vec<(usize, usize)> =
        config.n_r_values.iter().flat_map(|&n| config.shots_values.iter().map(move |&s| (n, s))).collect();
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(idx, &(n_r, shots))| {
            let seed = config.base_seed.wrapping_add(idx as u64);
            let recommended_n_r = recommended_register_size(kappa, shots);
            let mut hcfg = HHLConfig::new(n_r);
            hcfg.observable = Some(omega.clone());
            match sweep_row(instance, &hcfg, &omega, truth, shots, seed, config.repeats) {
                Ok((report, obs_err, samp_err)) => SweepRow {
                    n_r,
                    shots,
                    residual_norm: report.residual_norm,
                    observable_error: obs_err,
                    sampling_error: samp_err,
                    bias: (report.observable_exact - truth).abs(),
                    post_select_probability: report.post_select_probability,
                    recommended_n_r,
                    failure: None,
                },
                Err(e) => SweepRow {
                    n_r,
                    shots,
                    residual_norm: f64::NAN,
                    observable_error: f64::NAN,
                    sampling_error: f64::NAN,
                    bias: f64::NAN,
                    post_select_probability: f64::NAN,
                    recommended_n_r,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(rows)
}

fn sweep_row(
    instance: &ProblemInstance,
    config: &HHLConfig,
    omega: &Observable,
    truth: f64,
    shots: usize,
    seed: u64,
    repeats: usize,
) -> Result<(SolutionReport, f64, f64)> {
    let report = run(instance, config)?;
    if shots == 0 {
        let e = (report.observable_exact - truth).abs();
        return Ok((report, e, 0.0));
    }
    let state = StateVector::from_amplitudes(report.solution.iter().copied().collect())?;
    let sampler = OutcomeSampler::new(&state, omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut total_sq, mut sampling_sq) = (0.0, 0.0);
    for _ in 0..repeats {
        let est = sampler.estimate(shots, &mut rng)?;
        total_sq += (est.mean - truth).powi(2);
        sampling_sq += (est.mean - report.observable_exact).powi(2);
    }
    let r = repeats as f64;
    Ok((report, (total_sq / r).sqrt(), (sampling_sq / r).sqrt()))
}

pub const SWEEP_CSV_HEADER: &str = "n_R,N_s,residual_norm,observable_error,post_select_probability,recommended_n_R";

/// CSV with 12 significant digits; failed rows carry `FAILED` in the numeric columns.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let line = match r.failure {
            None => format!(
                "{},{},{:.11e},{:.11e},{:.11e},{}",
                r.n_r, r.shots, r.residual_norm, r.observable_error, r.post_select_probability, r.recommended_n_r
            ),
            Some(_) => format!("{},{},FAILED,FAILED,FAILED,{}", r.n_r, r.shots, r.recommended_n_r),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::circuit_unitary;

    fn worked() -> ProblemInstance {
        ProblemInstance::from_real(&[&[0.375, 0.125], &[0.125, 0.375]], &[1.0, 0.0]).unwrap()
    }

    #[test]
    fn rescale_examples() {
        let r = rescale(&CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]))).unwrap();
        assert!((r.t0 - 0.25).abs() < 1e-15);
        assert!((r.eigenvalues[0] - 0.25).abs() < 1e-15 && (r.eigenvalues[1] - 0.5).abs() < 1e-15);
        assert!((rescale(&CMatrix::identity(2, 2)).unwrap().kappa - 1.0).abs() < 1e-15);
        let singular = CMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert!(matches!(rescale(&singular), Err(Error::Singular { .. })));
        let indefinite = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.0)]));
        assert!(matches!(rescale(&indefinite), Err(Error::Unsupported(_))));
    }

    #[test]
    fn qpe_amplitude_examples() {
        for k in 0..8 {
            let b = qpe_amplitude(3.0 / 8.0, k, 3);
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert!((b.norm() - expect).abs() < 1e-12);
        }
        let total: f64 = (0..16).map(|k| qpe_amplitude(0.3141, k, 4).norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mid = qpe_amplitude(2.5 / 8.0, 2, 3).norm();
        assert!((mid - qpe_amplitude(2.5 / 8.0, 3, 3).norm()).abs() < 1e-12);
    }

    #[test]
    fn qft_matches_dft() {
        let layout = QubitLayout::new(3, 1).unwrap();
        let reg: Vec<usize> = layout.register_qubits().collect();
        let qft = build_qft(layout, &reg).unwrap();
        // Register occupies qubits 1..=3; ancilla and memory stay |0⟩.
        for x in 0..8usize {
            let s = StateVector::basis(5, x << 1).run(&qft).unwrap();
            for y in 0..8usize {
                let expect = Complex64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * (x * y) as f64 / 8.0);
                assert!((s.amplitudes()[y << 1] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qpe_single_bit() {
        let layout = QubitLayout::new(1, 1).unwrap();
        let a = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let circ = build_qpe(layout, &a).unwrap();
        let out = StateVector::zero(3).run(&circ).unwrap();
        assert!((out.probability(1, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn worked_instance() {
        let rep = run(&worked(), &HHLConfig::new(2)).unwrap();
        assert!((rep.post_select_probability - 0.625).abs() < 1e-9);
        let x = CVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0)]) / c(10f64.sqrt(), 0.0);
        assert!(compare_states(&x, &rep.solution).0 > 1.0 - 1e-8);
        assert!(rep.residual_norm < 1e-8);
        assert_eq!(rep.c, Some(0.25));
    }

    #[test]
    fn eigenvector_input() {
        let inst = ProblemInstance::from_real(&[&[0.5, 0.0], &[0.0, 0.25]], &[1.0, 0.0]).unwrap();
        let rep = run(&inst, &HHLConfig::new(2)).unwrap();
        assert!((rep.fidelity_vs_classical - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_examples() {
        let id = ProblemInstance::from_real(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 1.0]).unwrap();
        let x = classical_solve(&id).unwrap();
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-15 && x[0].norm() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = ProblemInstance::from_real(&[&[2.0, 0.0], &[0.0, 1.0]], &[s, s]).unwrap();
        let x = classical_solve(&d).unwrap();
        assert!((x[0].re - 1.0 / 5f64.sqrt()).abs() < 1e-14 && (x[1].re - 2.0 / 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn estimates() {
        let id = Observable::identity(2);
        let plus = StateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let e = estimate_observable(&plus, &id, 17, 3).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let z = Observable::diagonal(&[1.0, -1.0]);
        assert_eq!(estimate_observable(&StateVector::zero(1), &z, 50, 0).unwrap().mean, 1.0);
        let e = estimate_observable(&plus, &z, 10_000, 42).unwrap();
        assert!(e.mean.abs() < 0.04);
        assert_eq!(e, estimate_observable(&plus, &z, 10_000, 42).unwrap());
        assert!(estimate_observable(&plus, &z, 0, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let inst = worked();
        assert_eq!(ProblemInstance::from_json(&inst.to_json()).unwrap(), inst);
        let minimal = r#"{"A_re": [[1, 0], [0, 2]], "b_re": [1, 1]}"#;
        assert_eq!(ProblemInstance::from_json(minimal).unwrap().dim(), 2);
        assert!(matches!(ProblemInstance::from_json("{\"A_re\": [[1]],\n \"oops\": 1}"), Err(Error::Parse { line: 2, .. })));
        assert!(ProblemInstance::from_json(r#"{"A_re": [[1, 2], [0, 1]], "b_re": [1, 0]}"#).is_err());
    }

    #[test]
    fn hhl_circuit_is_unitary() {
        let layout = QubitLayout::new(2, 1).unwrap();
        let circ = build_hhl_circuit(layout, worked().a(), &MatrixFunctionSpec::inverse()).unwrap();
        assert!(circuit_unitary(&circ).unwrap().unitarity_defect() < 1e-10);
    }

    #[test]
    fn sweep_rows_and_csv() {
        let cfg = SweepConfig::new(vec![2, 3], vec![0, 100], 7);
        let rows = error_sweep(&worked(), &cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].n_r, rows[1].shots), (2, 100));
        assert!(rows.iter().all(|r| r.failure.is_none() && r.residual_norm < 1e-8));
        let csv = sweep_to_csv(&rows);
        assert!(csv.starts_with(SWEEP_CSV_HEADER));
        assert_eq!(csv.lines().count(), 5);
        assert!(error_sweep(&worked(), &SweepConfig::new(vec![], vec![1], 0)).is_err());
    }

    #[test]
    fn recommended_size() {
        assert_eq!(recommended_register_size(4.0, 10_000), 9);
        assert_eq!(recommended_register_size(1.0, 1), 1);
    }
}
