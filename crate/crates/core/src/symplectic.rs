//! Structural matrices of two-mode phase space and the Williamson
//! (symplectic-eigenvalue) machinery used as an independent oracle.
//!
//! Coordinate ordering is (x1, p1, x2, p2) everywhere. Two antisymmetric
//! forms show up and must not be confused:
//!
//! * `j4()`: the block form [[0, I2], [-I2, 0]], as conventionally written
//!   for the column (x1, x2, p1, p2);
//! * `omega_c()`: the mode-ordered commutator metric diag(j2, j2), the one
//!   consistent with [X_a, X_b] = i (omega_c)_ab for the (x1, p1, x2, p2)
//!   column. This is the metric every spectral computation here uses.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type R2 = Matrix2<f64>;
pub type R4 = Matrix4<f64>;
pub type C4 = Matrix4<C64>;

/// 2x2 symplectic unit [[0, 1], [-1, 0]].
pub fn j2() -> R2 {
    R2::new(0.0, 1.0, -1.0, 0.0)
}

/// 4x4 symplectic form [[0, I], [-I, 0]].
pub fn j4() -> R4 {
    R4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// Mode-ordered commutator metric diag(j2, j2): [X_a, X_b] = i (omega_c)_ab.
pub fn omega_c() -> R4 {
    R4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Sigma_y = diag(sigma_y, sigma_y), Hermitian, with omega_c = i Sigma_y.
pub fn sigma_y() -> C4 {
    let i = C64::i();
    let mut m = C4::zeros();
    m[(0, 1)] = -i;
    m[(1, 0)] = i;
    m[(2, 3)] = -i;
    m[(3, 2)] = i;
    m
}

/// Sigma_z = diag(1, -1, 1, -1).
pub fn sigma_z() -> R4 {
    R4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, -1.0))
}

/// S_x = antidiag(sigma_x, sigma_x): swaps the two modes inside each block.
pub fn s_x() -> R4 {
    R4::new(
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0,
    )
}

/// Canonical commutator [X_a, X_b] = -(Sigma_y)_ab, with 1-based indices.
pub fn canonical_commutator(alpha: usize, beta: usize) -> Result<C64> {
    if !(1..=4).contains(&alpha) || !(1..=4).contains(&beta) {
        return Err(Error::Index(format!(
            "commutator indices must be in 1..=4, got ({alpha}, {beta})"
        )));
    }
    Ok(-sigma_y()[(alpha - 1, beta - 1)])
}

/// Promote a real matrix to complex entries.
pub fn to_c4(m: &R4) -> C4 {
    C4::from_fn(|r, c| C64::new(m[(r, c)], 0.0))
}

/// Max-abs norm of a real matrix.
pub fn max_abs(m: &R4) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// Max-abs norm of a complex matrix.
pub fn max_abs_c(m: &C4) -> f64 {
    m.iter().fold(0.0_f64, |a, x| a.max(x.norm()))
}

/// True iff S J4 + J4 S^T vanishes to `tol`, i.e. S is in sp(4, R).
pub fn is_hamiltonian_matrix(s: &R4, tol: f64) -> bool {
    let j = j4();
    max_abs(&(s * j + j * s.transpose())) <= tol
}

/// Same predicate with an explicit antisymmetric form, for the mode-ordered
/// metric used by the invariant's Omega matrix.
pub fn is_hamiltonian_wrt(s: &R4, form: &R4, tol: f64) -> bool {
    max_abs(&(s * form + form * s.transpose())) <= tol
}

/// Williamson symplectic eigenvalues of a positive-definite covariance
/// matrix, ordered descending. Computed as the positive imaginary parts of
/// the eigenvalues of omega_c * V.
pub fn symplectic_eigenvalues(v: &R4) -> Result<(f64, f64)> {
    let sym_defect = max_abs(&(v - v.transpose()));
    if sym_defect > 1e-10 {
        return Err(Error::Numerical(format!(
            "covariance matrix not symmetric (defect {sym_defect:.2e})"
        )));
    }
    let chol = v.clone_owned();
    if nalgebra::Cholesky::new(chol).is_none() {
        return Err(Error::Regime(
            "covariance matrix not positive definite".into(),
        ));
    }
    let eigs = (omega_c() * v).complex_eigenvalues();
    let mut pos: Vec<f64> = eigs.iter().map(|l| l.im).filter(|&x| x > 0.0).collect();
    if pos.len() != 2 {
        return Err(Error::Numerical(format!(
            "expected two positive-imaginary eigenvalues, got {}",
            pos.len()
        )));
    }
    pos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((pos[0], pos[1]))
}

/// Quantum uncertainty test: V + (i/2) omega_c >= 0 as a Hermitian matrix.
/// Equivalent to the Sigma_y form since omega_c = i Sigma_y.
pub fn uncertainty_ok(v: &R4, tol: f64) -> bool {
    let mut h = C4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            h[(r, c)] = C64::new(v[(r, c)], 0.5 * omega_c()[(r, c)]);
        }
    }
    // Hermitian by construction; check its smallest eigenvalue.
    let eig = nalgebra::SymmetricEigen::new(h);
    eig.eigenvalues.iter().all(|&l| l >= -tol)
}

/// Real 4x4 matrix exponential by scaling and squaring (Taylor core).
/// Used to build test symplectics S = exp(omega_c A); plenty accurate at
/// this size for matrices of moderate norm.
pub fn expm4(a: &R4) -> R4 {
    let norm = max_abs(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a / 2f64.powi(s);
    let mut term = R4::identity();
    let mut sum = R4::identity();
    for k in 1..24 {
        term = term * b / (k as f64);
        sum += term;
    }
    let mut r = sum;
    for _ in 0..s {
        r = r * r;
    }
    r
}
