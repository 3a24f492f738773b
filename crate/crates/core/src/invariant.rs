//! The ten-coefficient quadratic ansatz for the Lewis-Riesenfeld invariant
//! and its equation of motion.
//!
//! The invariant is I = X^T F X with the symmetric matrix F assembled by
//! `to_quadratic_form` (blocks C, B, A of the u/v/w coefficients).
//! Invariance dI/dt = dI/dt|_explicit + (1/i)[I, H] = 0 closes at the
//! matrix level: Fdot = H S' F - F S' H with S' = 2 omega_c, the constant
//! fixed by expanding one monomial pair (see `monomial_pair_fixes_metric`
//! in the tests). The grouped first-order system
//!
//!   wdot = nu v,   udot = 2 alpha v,   vdot = beta u + mu w
//!
//! with w = (w12, w21), u = (u11, v11, u22, v22), v = (v12, w22, w11, u12)
//! is the component form of the same bracket; `rhs` implements it and the
//! matrix bracket stays available as an independent oracle.

use nalgebra::{Matrix2, Matrix2x4, Matrix4x2, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_params, DerivedParams, PhysicalParams};
use crate::ode::{self, IntegratorOptions};
use crate::symplectic::{max_abs, omega_c, s_x, R4};

/// Coefficients of the invariant ansatz, in the canonical order
/// (u11, u22, v11, v22, w11, w22, u12, v12, w21, w12).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantCoefficients {
    pub u11: f64,
    pub u22: f64,
    pub v11: f64,
    pub v22: f64,
    pub w11: f64,
    pub w22: f64,
    pub u12: f64,
    pub v12: f64,
    pub w21: f64,
    pub w12: f64,
}

impl InvariantCoefficients {
    pub fn zero() -> Self {
        InvariantCoefficients {
            u11: 0.0,
            u22: 0.0,
            v11: 0.0,
            v22: 0.0,
            w11: 0.0,
            w22: 0.0,
            u12: 0.0,
            v12: 0.0,
            w21: 0.0,
            w12: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 10] {
        [
            self.u11, self.u22, self.v11, self.v22, self.w11, self.w22, self.u12, self.v12,
            self.w21, self.w12,
        ]
    }

    pub fn from_array(a: [f64; 10]) -> Self {
        InvariantCoefficients {
            u11: a[0],
            u22: a[1],
            v11: a[2],
            v22: a[3],
            w11: a[4],
            w22: a[5],
            u12: a[6],
            v12: a[7],
            w21: a[8],
            w12: a[9],
        }
    }

    /// Grouped 2-vector w = (w12, w21).
    pub fn w_group(&self) -> Vector2<f64> {
        Vector2::new(self.w12, self.w21)
    }

    /// Grouped 4-vector u = (u11, v11, u22, v22).
    pub fn u_group(&self) -> Vector4<f64> {
        Vector4::new(self.u11, self.v11, self.u22, self.v22)
    }

    /// Grouped 4-vector v = (v12, w22, w11, u12).
    pub fn v_group(&self) -> Vector4<f64> {
        Vector4::new(self.v12, self.w22, self.w11, self.u12)
    }

    /// The symmetric matrix F of I = X^T F X, block layout
    /// [C A^T; A B] with C = (u11 w11; w11 v11), B = (u22 w22; w22 v22),
    /// A = (u12 w21; w12 v12).
    pub fn to_quadratic_form(&self) -> R4 {
        R4::new(
            self.u11, self.w11, self.u12, self.w12, //
            self.w11, self.v11, self.w21, self.v12, //
            self.u12, self.w21, self.u22, self.w22, //
            self.w12, self.v12, self.w22, self.v22,
        )
    }

    /// Read coefficients back off a symmetric matrix.
    pub fn from_quadratic_form(f: &R4) -> Result<Self> {
        let defect = max_abs(&(f - f.transpose()));
        if defect > 1e-12 * max_abs(f).max(1.0) {
            return Err(Error::Numerical(format!(
                "quadratic form not symmetric (defect {defect:.2e})"
            )));
        }
        Ok(InvariantCoefficients {
            u11: f[(0, 0)],
            u22: f[(2, 2)],
            v11: f[(1, 1)],
            v22: f[(3, 3)],
            w11: f[(0, 1)],
            w22: f[(2, 3)],
            u12: f[(0, 2)],
            v12: f[(1, 3)],
            w21: f[(1, 2)],
            w12: f[(0, 3)],
        })
    }

    /// Positive definiteness of F, needed for a discrete invariant spectrum.
    pub fn is_positive_definite(&self) -> bool {
        nalgebra::Cholesky::new(self.to_quadratic_form()).is_some()
    }
}

/// The four coefficient matrices of the grouped first-order system.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrices {
    pub mu: Matrix4x2<f64>,
    pub alpha: R4,
    pub nu: Matrix2x4<f64>,
    pub beta: R4,
}

fn sigma_x2() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, 1.0, 0.0)
}

/// Assemble mu, alpha, beta from the derived parameters and nu through the
/// defining relation nu = sigma_x mu^T S_x.
pub fn coefficient_matrices_from(d: &DerivedParams) -> CoefficientMatrices {
    let im1 = 1.0 / d.mu1;
    let im2 = 1.0 / d.mu2;
    let (n1, n2) = (d.nu1, d.nu2);
    let (a1, a2) = (d.alpha1, d.alpha2);

    let mu = Matrix4x2::new(
        -im1, -im2, //
        -2.0 * n1, -2.0 * n2, //
        2.0 * n1, 2.0 * n2, //
        a2, a1,
    );
    let alpha = R4::new(
        0.0, 0.0, a1, 2.0 * n2, //
        2.0 * n1, 0.0, -im1, 0.0, //
        0.0, a2, 0.0, -2.0 * n1, //
        -2.0 * n2, -im2, 0.0, 0.0,
    );
    let beta = R4::new(
        0.0, -2.0 * n2, 0.0, 2.0 * n1, //
        0.0, 0.0, -im2, a2, //
        -im1, a1, 0.0, 0.0, //
        -2.0 * n1, 0.0, 2.0 * n2, 0.0,
    );
    let nu = sigma_x2() * mu.transpose() * s_x();
    CoefficientMatrices {
        mu,
        alpha,
        nu,
        beta,
    }
}

pub fn coefficient_matrices(p: &PhysicalParams, t: f64) -> Result<CoefficientMatrices> {
    Ok(coefficient_matrices_from(&derive_params(p, t)?))
}

/// Grouped-system derivative of the ten coefficients.
pub fn rhs_from(c: &InvariantCoefficients, d: &DerivedParams) -> InvariantCoefficients {
    let m = coefficient_matrices_from(d);
    let wdot = m.nu * c.v_group();
    let udot = 2.0 * m.alpha * c.v_group();
    let vdot = m.beta * c.u_group() + m.mu * c.w_group();
    InvariantCoefficients {
        u11: udot[0],
        v11: udot[1],
        u22: udot[2],
        v22: udot[3],
        v12: vdot[0],
        w22: vdot[1],
        w11: vdot[2],
        u12: vdot[3],
        w12: wdot[0],
        w21: wdot[1],
    }
}

pub fn rhs(c: &InvariantCoefficients, p: &PhysicalParams, t: f64) -> Result<InvariantCoefficients> {
    Ok(rhs_from(c, &derive_params(p, t)?))
}

/// Independent matrix-level derivative: Fdot = H S' F - F S' H with
/// S' = 2 omega_c and H the display Hamiltonian matrix.
pub fn rhs_matrix_bracket(c: &InvariantCoefficients, d: &DerivedParams) -> R4 {
    let f = c.to_quadratic_form();
    let h = d.hamiltonian_display();
    let sp = 2.0 * omega_c();
    h * sp * f - f * sp * h
}

/// sup-norm of Fdot + F S' H - H S' F; vanishes along exact invariant flow.
pub fn invariance_residual(
    c: &InvariantCoefficients,
    cdot: &InvariantCoefficients,
    p: &PhysicalParams,
    t: f64,
) -> Result<f64> {
    let d = derive_params(p, t)?;
    let fdot = cdot.to_quadratic_form();
    Ok(max_abs(&(fdot - rhs_matrix_bracket(c, &d))))
}

/// Default initial condition: the invariant starts as the Hamiltonian
/// itself, I(t0) = H(t0), i.e. F(t0) = 2 H_display(t0).
pub fn default_initial(p: &PhysicalParams, t0: f64) -> Result<InvariantCoefficients> {
    let f = 2.0 * derive_params(p, t0)?.hamiltonian_display();
    InvariantCoefficients::from_quadratic_form(&f)
}

/// Integrate the coefficient flow from t0 to t1, reporting at `samples`.
pub fn integrate(
    c0: &InvariantCoefficients,
    p: &PhysicalParams,
    t0: f64,
    t1: f64,
    samples: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<(f64, InvariantCoefficients)>> {
    if !c0.as_array().iter().all(|x| x.is_finite()) {
        return Err(Error::Config("initial coefficients must be finite".into()));
    }
    let traj = ode::integrate(
        |t, y: &[f64; 10]| {
            let c = InvariantCoefficients::from_array(*y);
            Ok(rhs(&c, p, t)?.as_array())
        },
        c0.as_array(),
        t0,
        t1,
        samples,
        opts,
    )?;
    Ok(traj
        .into_iter()
        .map(|(t, y)| (t, InvariantCoefficients::from_array(y)))
        .collect())
}
