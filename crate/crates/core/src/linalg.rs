// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for superoperator-sized problems.
//!
//! Everything here targets matrices no larger than dim^2 x dim^2 with
//! dim <= 4, so plain O(n^3) algorithms are used throughout. All
//! routines are dimension-agnostic.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for operators, superoperators, and states.
pub type ComplexMatrix = Array2<Complex64>;

/// Complex zero.
pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Complex one.
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
/// Imaginary unit.
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// n x n identity.
pub fn identity(n: usize) -> ComplexMatrix {
    Array2::eye(n)
}

/// Rejects empty, non-square, or non-finite matrices.
pub fn check_square_finite(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

/// Conjugate transpose.
pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.t().mapv(|z| z.conj())
}

/// Trace.
pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diag().sum()
}

/// Max column sum of absolute values (induced 1-norm).
pub fn one_norm(m: &ComplexMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::from_elem((ar * br, ac * bc), C_ZERO);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization: entry (i, j) of an n x n matrix lands at
/// index i + n*j, so vec(A X B) = (B^T (x) A) vec(X).
pub fn vec_matrix(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(m[[i, j]]);
        }
    }
    v
}

/// Inverse of [`vec_matrix`].
pub fn unvec_matrix(v: &[Complex64]) -> Result<ComplexMatrix> {
    let n2 = v.len();
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {n2} is not a stacked square matrix"
        )));
    }
    let mut m = Array2::from_elem((n, n), C_ZERO);
    for j in 0..n {
        for i in 0..n {
            m[[i, j]] = v[i + n * j];
        }
    }
    Ok(m)
}

/// Solves A X = B for square complex A by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve: A is {}x{}, B has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = x.ncols();
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, lu[[r, col]].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty pivot range");
        if pivot_mag < f64::EPSILON * one_norm(a).max(1.0) * n as f64 {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix is singular to working precision at column {col}"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap([col, j], [pivot_row, j]);
            }
            for j in 0..m {
                x.swap([col, j], [pivot_row, j]);
            }
        }
        let pivot = lu[[col, col]];
        for r in col + 1..n {
            let factor = lu[[r, col]] / pivot;
            if factor == C_ZERO {
                continue;
            }
            for j in col..n {
                let sub = factor * lu[[col, j]];
                lu[[r, j]] -= sub;
            }
            for j in 0..m {
                let sub = factor * x[[col, j]];
                x[[r, j]] -= sub;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[[col, col]];
        for j in 0..m {
            let mut acc = x[[col, j]];
            for k in col + 1..n {
                acc -= lu[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = acc / pivot;
        }
    }
    Ok(x)
}

/// Pade coefficients for the degree-13 approximant.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm thresholds theta_m for Pade orders 3, 5, 7, 9, 13.
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coefficients(order: usize) -> Vec<f64> {
    match order {
        3 => vec![120.0, 60.0, 12.0, 1.0],
        5 => vec![30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => vec![17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => vec![
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => unreachable!("unsupported Pade order"),
    }
}

/// Matrix exponential by scaling and squaring with diagonal Pade
/// approximants (orders 3/5/7/9/13 chosen from the 1-norm).
///
/// Backward error is below double-precision unit roundoff for any
/// argument, comfortably inside the 1e-13 accuracy target used by the
/// propagation layer.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square_finite(a, "expm argument")?;
    let n = a.nrows();
    let norm = one_norm(a);
    let eye = identity(n);

    for &(order, theta) in &THETA[..4] {
        if norm <= theta {
            let b = pade_coefficients(order);
            let a2 = a.dot(a);
            // U = A * sum b[2k+1] A^(2k), V = sum b[2k] A^(2k).
            let mut even = &eye * Complex64::from(b[0]);
            let mut odd = &eye * Complex64::from(b[1]);
            let mut power = eye.clone();
            for k in 1..=order / 2 {
                power = power.dot(&a2);
                even = even + &power * Complex64::from(b[2 * k]);
                odd = odd + &power * Complex64::from(b[2 * k + 1]);
            }
            let u = a.dot(&odd);
            return solve(&(&even - &u), &(&even + &u));
        }
    }

    let theta13 = THETA[4].1;
    let squarings = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / Complex64::from(2f64.powi(squarings as i32)));
    let b = &PADE13;
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let u_inner = &a6 * Complex64::from(b[13]) + &a4 * Complex64::from(b[11]) + &a2 * Complex64::from(b[9]);
    let u_poly = a6.dot(&u_inner)
        + &a6 * Complex64::from(b[7])
        + &a4 * Complex64::from(b[5])
        + &a2 * Complex64::from(b[3])
        + &eye * Complex64::from(b[1]);
    let u = scaled.dot(&u_poly);
    let v_inner = &a6 * Complex64::from(b[12]) + &a4 * Complex64::from(b[10]) + &a2 * Complex64::from(b[8]);
    let v = a6.dot(&v_inner)
        + &a6 * Complex64::from(b[6])
        + &a4 * Complex64::from(b[4])
        + &a2 * Complex64::from(b[2])
        + &eye * Complex64::from(b[0]);
    let mut result = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi rotations.
///
/// The input is symmetrized as (A + A^dagger)/2 before iterating, so
/// callers may pass matrices that are Hermitian only up to roundoff.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_square_finite(a, "eigenvalue argument")?;
    let n = a.nrows();
    let mut m = (a + &dagger(a)).mapv(|z| z * Complex64::from(0.5));
    let scale = frobenius_norm(&m).max(1.0);
    let tol = 1e-15 * scale;
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            let mut eigs: Vec<f64> = m.diag().iter().map(|z| z.re).collect();
            eigs.sort_by(f64::total_cmp);
            return Ok(eigs);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq.norm() <= tol / (n * n) as f64 {
                    continue;
                }
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                // Phase factor turns the 2x2 block real symmetric.
                let phase = apq / Complex64::from(apq.norm());
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns: [p q] <- [p q] * [[c, s*phase], [-s*conj(phase), c]]
                for i in 0..n {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = mip * Complex64::from(c) - miq * Complex64::from(s) * phase.conj();
                    m[[i, q]] = mip * Complex64::from(s) * phase + miq * Complex64::from(c);
                }
                // Rows: conjugate-transposed update.
                for j in 0..n {
                    let mpj = m[[p, j]];
                    let mqj = m[[q, j]];
                    m[[p, j]] = mpj * Complex64::from(c) - mqj * Complex64::from(s) * phase;
                    m[[q, j]] = mpj * Complex64::from(s) * phase.conj() + mqj * Complex64::from(c);
                }
            }
        }
    }
    Err(Error::NoConvergence {
        what: "Jacobi eigenvalue iteration",
        limit: max_sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_matches_hand_expansion() {
        let a = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let b = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 1]], c(1.0, 0.0));
        assert_eq!(k[[0, 3]], c(2.0, 0.0));
        assert_eq!(k[[2, 1]], c(0.0, 1.0));
        assert_eq!(k[[3, 2]], c(0.0, 0.0));
    }

    #[test]
    fn vec_uses_column_stacking() {
        let m = ndarray::array![[c(1.0, 0.0), c(3.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let v = vec_matrix(&m);
        let flat: Vec<f64> = v.iter().map(|z| z.re).collect();
        assert_eq!(flat, vec![1.0, 2.0, 3.0, 4.0]);
        let back = unvec_matrix(&v).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn vec_identity_relates_products_to_kron() {
        // vec(A X B) = (B^T (x) A) vec(X) for random-ish fixed matrices.
        let a = ndarray::array![[c(0.3, 0.1), c(-1.0, 0.4)], [c(0.0, 0.9), c(2.0, -0.2)]];
        let b = ndarray::array![[c(1.0, -1.0), c(0.5, 0.0)], [c(0.2, 0.3), c(-0.4, 0.8)]];
        let x = ndarray::array![[c(0.7, 0.2), c(0.1, 0.0)], [c(-0.3, 0.5), c(1.1, -0.6)]];
        let lhs = vec_matrix(&a.dot(&x).dot(&b));
        let op = kron(&b.t().to_owned(), &a);
        let vx = vec_matrix(&x);
        for (i, l) in lhs.iter().enumerate() {
            let r: Complex64 = (0..4).map(|j| op[[i, j]] * vx[j]).sum();
            assert_relative_eq!(l.re, r.re, max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(l.im, r.im, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = ndarray::array![
            [c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0)],
            [c(1.0, 1.0), c(3.0, 0.0), c(0.5, 0.0)],
            [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]
        ];
        let x_true = ndarray::array![[c(1.0, 2.0)], [c(-0.5, 0.0)], [c(0.25, -0.75)]];
        let b = a.dot(&x_true);
        let x = solve(&a, &b).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert_relative_eq!(got.re, want.re, epsilon = 1e-12);
            assert_relative_eq!(got.im, want.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let a = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let b = identity(2);
        assert!(solve(&a, &b).is_err());
    }

    #[test]
    fn expm_zero_is_identity() {
        let z = Array2::from_elem((3, 3), C_ZERO);
        let e = expm(&z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(e[[i, j]].re, want, epsilon = 1e-15);
                assert_relative_eq!(e[[i, j]].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn expm_diagonal_matches_scalar_exp() {
        let d = ndarray::array![
            [c(0.3, 1.7), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-2.0, -40.0)]
        ];
        let e = expm(&d).unwrap();
        for i in 0..2 {
            let want = d[[i, i]].exp();
            assert_relative_eq!(e[[i, i]].re, want.re, max_relative = 1e-13);
            assert_relative_eq!(e[[i, i]].im, want.im, max_relative = 1e-13);
        }
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn expm_antihermitian_rotation_matches_closed_form() {
        // exp(-i theta sigma_x) = cos(theta) I - i sin(theta) sigma_x.
        for &theta in &[1e-3, 0.4, 2.0, 7.0, 61.3] {
            let a = ndarray::array![
                [c(0.0, 0.0), c(0.0, -theta)],
                [c(0.0, -theta), c(0.0, 0.0)]
            ];
            let e = expm(&a).unwrap();
            assert_relative_eq!(e[[0, 0]].re, theta.cos(), epsilon = 1e-13, max_relative = 1e-12);
            assert_relative_eq!(e[[0, 1]].im, -theta.sin(), epsilon = 1e-13, max_relative = 1e-12);
        }
    }

    #[test]
    fn expm_inverse_is_exp_of_negation() {
        let a = ndarray::array![
            [c(0.2, -0.3), c(1.5, 0.7), c(-0.4, 0.0)],
            [c(0.0, 2.2), c(-1.0, 0.1), c(0.8, -0.9)],
            [c(3.0, 0.0), c(0.1, 0.1), c(0.5, 1.0)]
        ];
        let e_plus = expm(&a).unwrap();
        let e_minus = expm(&a.mapv(|z| -z)).unwrap();
        let product = e_plus.dot(&e_minus);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(product[[i, j]].re, want, epsilon = 1e-11);
                assert_relative_eq!(product[[i, j]].im, 0.0, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn expm_semigroup_property() {
        let a = ndarray::array![
            [c(-0.3, 0.9), c(0.4, 0.0)],
            [c(0.0, -1.2), c(-0.1, 0.3)]
        ];
        let e1 = expm(&a).unwrap();
        let e2 = expm(&a.mapv(|z| z * Complex64::from(2.0))).unwrap();
        let sq = e1.dot(&e1);
        for (got, want) in sq.iter().zip(e2.iter()) {
            assert_relative_eq!(got.re, want.re, epsilon = 1e-12, max_relative = 1e-11);
            assert_relative_eq!(got.im, want.im, epsilon = 1e-12, max_relative = 1e-11);
        }
    }

    #[test]
    fn expm_rejects_non_finite() {
        let a = ndarray::array![[c(f64::NAN, 0.0)]];
        assert!(expm(&a).is_err());
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_x() {
        let sx = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let eigs = hermitian_eigenvalues(&sx).unwrap();
        assert_relative_eq!(eigs[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(eigs[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_match_moments_on_fixed_4x4() {
        let b = ndarray::array![
            [c(0.9, 0.0), c(0.2, 0.7), c(-0.5, 0.1), c(0.0, 0.3)],
            [c(0.2, -0.7), c(-1.1, 0.0), c(0.6, 0.0), c(0.4, -0.2)],
            [c(-0.5, -0.1), c(0.6, 0.0), c(0.3, 0.0), c(-0.8, 0.5)],
            [c(0.0, -0.3), c(0.4, 0.2), c(-0.8, -0.5), c(2.0, 0.0)]
        ];
        let eigs = hermitian_eigenvalues(&b).unwrap();
        let m1: f64 = eigs.iter().sum();
        let m2: f64 = eigs.iter().map(|e| e * e).sum();
        let m3: f64 = eigs.iter().map(|e| e * e * e).sum();
        let t1 = trace(&b).re;
        let t2 = trace(&b.dot(&b)).re;
        let t3 = trace(&b.dot(&b).dot(&b)).re;
        assert_relative_eq!(m1, t1, epsilon = 1e-12);
        assert_relative_eq!(m2, t2, max_relative = 1e-12);
        assert_relative_eq!(m3, t3, max_relative = 1e-11);
    }
}
