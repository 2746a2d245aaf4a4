// Copyright 2026 The kitehhl Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const UNITARY_TOL: f64 = 1e-10;
pub(crate) const HERMITIAN_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn unitarity_defect(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    max_abs(&(prod - CMatrix::identity(m.nrows(), m.ncols())))
}

/// Kronecker product with `a` acting on the more significant qubits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// A unitary on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    /// Wraps `entries` after checking squareness, power-of-two size and
    /// `U·U† = I` within `1e-10`.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let dim = entries.nrows();
        if dim != entries.ncols() || !dim.is_power_of_two() {
            return Err(Error::Validation(format!(
                "unitary must be square with power-of-two size, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let defect = unitarity_defect(&entries);
        if defect > UNITARY_TOL {
            return Err(Error::Validation(format!("matrix is not unitary (max |UU†-I| = {defect:e})")));
        }
        Ok(Self { entries })
    }

    /// Skips the unitarity check. Used for products of already-validated factors.
    pub(crate) fn from_matrix_unchecked(entries: CMatrix) -> Self {
        debug_assert!(unitarity_defect(&entries) < 1e-8);
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dagger(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    /// `self · other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(Self { entries: &self.entries * &other.entries })
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { entries: kron(&self.entries, &other.entries) }
    }

    /// Frobenius distance `‖U − e^{iθ}V‖` with θ chosen so the entry of
    /// largest magnitude in `other` lines up with the same entry of `self`.
    pub fn phase_aligned_distance(&self, other: &Self) -> f64 {
        phase_aligned_distance(&self.entries, &other.entries)
    }

    /// Largest deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.entries)
    }
}

pub fn phase_aligned_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    if u.shape() != v.shape() {
        return f64::INFINITY;
    }
    let (idx, _) = v.iter().enumerate().fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
    let (a, b) = (u.as_slice()[idx], v.as_slice()[idx]);
    let phase = if a.norm() == 0.0 || b.norm() == 0.0 {
        c(1.0, 0.0)
    } else {
        let r = a / b;
        r / r.norm()
    };
    (u - v * phase).norm()
}

/// A Hermitian operator: observables and Hamiltonians share this type.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    entries: CMatrix,
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Observable {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Validation("observable must be square".into()));
        }
        let defect = max_abs(&(&entries - entries.adjoint()));
        if defect > HERMITIAN_TOL {
            return Err(Error::Validation(format!("operator is not Hermitian (max |H-H†| = {defect:e})")));
        }
        Ok(Self { entries })
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn zero(dim: usize) -> Self {
        Self { entries: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: CMatrix::identity(dim, dim) }
    }

    /// A diagonal operator with the given real spectrum.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self { entries: CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) }) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { entries: &self.entries * c(factor, 0.0) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(Self { entries: &self.entries + &other.entries })
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { entries: kron(&self.entries, &other.entries) }
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == c(0.0, 0.0)))
    }

    pub fn eigen(&self) -> Eigensystem {
        let n = self.dim();
        if self.is_diagonal() {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| self.entries[(a, a)].re.total_cmp(&self.entries[(b, b)].re));
            let values = order.iter().map(|&i| self.entries[(i, i)].re).collect();
            let vectors = CMatrix::from_fn(n, n, |r, col| if r == order[col] { c(1.0, 0.0) } else { c(0.0, 0.0) });
            return Eigensystem { values, vectors };
        }
        let eig = SymmetricEigen::new(self.entries.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
        Eigensystem { values, vectors }
    }

    /// `exp(i·t·H)` from the exact eigendecomposition.
    pub fn exp_i(&self, t: f64) -> UnitaryMatrix {
        let n = self.dim();
        if self.is_diagonal() {
            let entries = CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, t * self.entries[(i, i)].re)
                } else {
                    c(0.0, 0.0)
                }
            });
            return UnitaryMatrix::from_matrix_unchecked(entries);
        }
        let Eigensystem { values, vectors } = self.eigen();
        let phases = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::from_polar(1.0, t * values[i]) } else { c(0.0, 0.0) });
        UnitaryMatrix::from_matrix_unchecked(&vectors * phases * vectors.adjoint())
    }
}

/// Pauli and rotation primitives used across the crate.
pub mod paulis {
    use super::{c, CMatrix};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    /// Operator acting as `op` on qubit `q` of an `n`-qubit register (qubit 0 most significant).
    pub fn on_qubit(op: &CMatrix, q: usize, n: usize) -> CMatrix {
        let mut out = CMatrix::identity(1, 1);
        for k in 0..n {
            let factor = if k == q { op.clone() } else { identity() };
            out = out.kronecker(&factor);
        }
        out
    }
}
