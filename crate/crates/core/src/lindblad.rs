// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad models, density operators, and time propagation.
//!
//! The master equation generator is
//!
//!   L[rho] = -i [H, rho] + sum_k ( c_k rho c_k^dag - 1/2 {c_k^dag c_k, rho} )
//!
//! and states evolve as rho(t) = exp(L t)[rho(0)], evaluated through the
//! matrix exponential of the vectorized generator. Vectorization is
//! column-stacking, so A rho B maps to (B^T (x) A) vec(rho).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_square_finite, dagger, expm, hermitian_eigenvalues, identity, kron, max_abs, trace,
    unvec_matrix, vec_matrix, ComplexMatrix, C_I, C_ONE, C_ZERO,
};

/// Tolerance on Hermiticity and unit trace of a density operator.
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues of a density operator may undershoot zero by this much.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Basis index of the ground state in the two-level model.
pub const GROUND: usize = 0;
/// Basis index of the excited state in the two-level model.
pub const EXCITED: usize = 1;

/// A validated density operator: Hermitian, unit trace, positive
/// semidefinite within [`DENSITY_TOL`] / [`EIGENVALUE_FLOOR`].
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates and wraps a matrix. The matrix is stored as given;
    /// defects within tolerance are accepted, not repaired.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square_finite(&matrix, "density operator")?;
        let herm_defect = max_abs(&(&matrix - &dagger(&matrix)));
        if herm_defect > DENSITY_TOL {
            return Err(Error::NotDensity(format!(
                "Hermiticity defect {herm_defect:.3e} exceeds {DENSITY_TOL:.0e}"
            )));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!(
                "trace {tr} differs from 1 by more than {DENSITY_TOL:.0e}"
            )));
        }
        let eigs = hermitian_eigenvalues(&matrix)?;
        if let Some(lowest) = eigs.first() {
            if *lowest < EIGENVALUE_FLOOR {
                return Err(Error::NotDensity(format!(
                    "eigenvalue {lowest:.3e} below floor {EIGENVALUE_FLOOR:.0e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Pure state |i><i| in a `dim`-dimensional Hilbert space.
    pub fn basis_state(index: usize, dim: usize) -> Result<Self> {
        if index >= dim || dim == 0 {
            return Err(Error::InvalidParameter {
                name: "basis_state index",
                reason: format!("index {index} outside dimension {dim}"),
            });
        }
        let mut m = Array2::from_elem((dim, dim), C_ZERO);
        m[[index, index]] = C_ONE;
        Ok(Self { matrix: m })
    }

    /// Pure state |psi><psi| from an amplitude vector (normalized here).
    pub fn from_ket(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || norm_sqr <= 0.0 || !norm_sqr.is_finite() {
            return Err(Error::InvalidParameter {
                name: "ket amplitudes",
                reason: "empty or zero-norm amplitude vector".into(),
            });
        }
        let dim = amplitudes.len();
        let mut m = Array2::from_elem((dim, dim), C_ZERO);
        for i in 0..dim {
            for j in 0..dim {
                m[[i, j]] = amplitudes[i] * amplitudes[j].conj() / Complex64::from(norm_sqr);
            }
        }
        Ok(Self { matrix: m })
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Population of basis state `i` (the real diagonal entry).
    pub fn population(&self, i: usize) -> f64 {
        self.matrix[[i, i]].re
    }

    /// Tr(rho^2); equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        trace(&self.matrix.dot(&self.matrix)).re
    }
}

/// Hamiltonian plus collapse operators, all on one Hilbert space.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    collapse_ops: Vec<ComplexMatrix>,
}

impl LindbladModel {
    /// Validates dimensional consistency and Hermiticity of H.
    pub fn new(hamiltonian: ComplexMatrix, collapse_ops: Vec<ComplexMatrix>) -> Result<Self> {
        check_square_finite(&hamiltonian, "Hamiltonian")?;
        let defect = max_abs(&(&hamiltonian - &dagger(&hamiltonian)));
        if defect > DENSITY_TOL {
            return Err(Error::InvalidParameter {
                name: "hamiltonian",
                reason: format!("Hermiticity defect {defect:.3e}"),
            });
        }
        let dim = hamiltonian.nrows();
        for (k, c) in collapse_ops.iter().enumerate() {
            check_square_finite(c, "collapse operator")?;
            if c.nrows() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "collapse operator {k} is {}x{}, Hamiltonian is {dim}x{dim}",
                    c.nrows(),
                    c.ncols()
                )));
            }
        }
        Ok(Self {
            hamiltonian,
            collapse_ops,
        })
    }

    /// Hamiltonian.
    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    /// Collapse operators.
    pub fn collapse_ops(&self) -> &[ComplexMatrix] {
        &self.collapse_ops
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }
}

/// Driven two-level system in the rotating frame.
///
/// Basis order is fixed: index 0 = |g>, index 1 = |e>. The Hamiltonian is
/// H = -delta |e><e| + (omega/2)(|e><g| + |g><e|); dephasing enters as
/// sqrt(gamma) sigma_z and spontaneous decay as sqrt(gamma_spont) sigma_-,
/// each included only when its rate is positive.
pub fn two_level_model(
    omega: f64,
    delta: f64,
    gamma: f64,
    gamma_spont: f64,
) -> Result<LindbladModel> {
    for (name, value) in [("omega", omega), ("delta", delta)] {
        if !value.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("{value} is not finite"),
            });
        }
    }
    for (name, rate) in [("gamma", gamma), ("gamma_spont", gamma_spont)] {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("rate {rate} must be finite and non-negative"),
            });
        }
    }
    let mut h = Array2::from_elem((2, 2), C_ZERO);
    h[[EXCITED, EXCITED]] = Complex64::from(-delta);
    h[[GROUND, EXCITED]] = Complex64::from(omega / 2.0);
    h[[EXCITED, GROUND]] = Complex64::from(omega / 2.0);

    let mut collapse = Vec::new();
    if gamma > 0.0 {
        // sqrt(gamma) sigma_z with sigma_z = |g><g| - |e><e|.
        let mut sz = Array2::from_elem((2, 2), C_ZERO);
        sz[[GROUND, GROUND]] = Complex64::from(gamma.sqrt());
        sz[[EXCITED, EXCITED]] = Complex64::from(-gamma.sqrt());
        collapse.push(sz);
    }
    if gamma_spont > 0.0 {
        // sqrt(gamma_spont) sigma_- with sigma_- = |g><e|.
        let mut sm = Array2::from_elem((2, 2), C_ZERO);
        sm[[GROUND, EXCITED]] = Complex64::from(gamma_spont.sqrt());
        collapse.push(sm);
    }
    LindbladModel::new(h, collapse)
}

/// Generator applied directly to a matrix (no exponentiation):
/// -i[H, rho] + sum_k (c_k rho c_k^dag - 1/2 {c_k^dag c_k, rho}).
pub fn apply_generator(model: &LindbladModel, rho: &ComplexMatrix) -> ComplexMatrix {
    let h = &model.hamiltonian;
    let mut out = (h.dot(rho) - rho.dot(h)).mapv(|z| -C_I * z);
    for c in &model.collapse_ops {
        let cdag = dagger(c);
        let cdc = cdag.dot(c);
        out = out + c.dot(rho).dot(&cdag)
            - (cdc.dot(rho) + rho.dot(&cdc)).mapv(|z| z * Complex64::from(0.5));
    }
    out
}

/// Vectorized generator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    dim: usize,
}

impl Superoperator {
    /// The dim^2 x dim^2 matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension the superoperator acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Builds the vectorized Liouvillian of a model:
/// L = -i (I (x) H - H^T (x) I)
///     + sum_k [ conj(c_k) (x) c_k
///               - 1/2 I (x) (c_k^dag c_k) - 1/2 (c_k^dag c_k)^T (x) I ].
pub fn build_liouvillian(model: &LindbladModel) -> Superoperator {
    let dim = model.dim();
    let eye = identity(dim);
    let h = &model.hamiltonian;
    let ht = h.t().to_owned();
    let mut l = (kron(&eye, h) - kron(&ht, &eye)).mapv(|z| -C_I * z);
    for c in &model.collapse_ops {
        let c_conj = c.mapv(|z| z.conj());
        let cdc = dagger(c).dot(c);
        let cdc_t = cdc.t().to_owned();
        let half = Complex64::from(0.5);
        l = l + kron(&c_conj, c)
            - kron(&eye, &cdc).mapv(|z| z * half)
            - kron(&cdc_t, &eye).mapv(|z| z * half);
    }
    Superoperator { matrix: l, dim }
}

/// Evolves a state for time t >= 0: rho(t) = exp(L t)[rho].
pub fn propagate(
    rho: &DensityOperator,
    liouvillian: &Superoperator,
    t: f64,
) -> Result<DensityOperator> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("propagation time {t} must be finite and non-negative"),
        });
    }
    if rho.dim() != liouvillian.dim {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs superoperator dimension {}",
            rho.dim(),
            liouvillian.dim
        )));
    }
    let lt = liouvillian.matrix.mapv(|z| z * Complex64::from(t));
    let et = expm(&lt)?;
    let v = vec_matrix(rho.matrix());
    let n2 = v.len();
    let mut out = vec![C_ZERO; n2];
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = C_ZERO;
        for (j, vj) in v.iter().enumerate() {
            acc += et[[i, j]] * *vj;
        }
        *slot = acc;
    }
    DensityOperator::new(unvec_matrix(&out)?)
}

/// Propagator exp(L tau) as a dense matrix, reusable across initial states.
pub fn propagator_matrix(liouvillian: &Superoperator, tau: f64) -> Result<ComplexMatrix> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("propagation time {tau} must be finite and non-negative"),
        });
    }
    expm(&liouvillian.matrix.mapv(|z| z * Complex64::from(tau)))
}
