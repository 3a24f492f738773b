//! Symplectic diagonalization of the invariant: the Omega matrix, its
//! purely imaginary spectrum, left/right eigenvectors, and the Q matrix
//! that carries X to ladder variables.
//!
//! Two eigenvector paths exist. The closed form evaluates four cubic
//! component polynomials (a row of the adjugate of Omega + i sigma,
//! scaled by -u11); it is fast and used when healthy. The numerical path
//! extracts the null space of (Omega^T + i sigma) by full-pivot
//! elimination and is authoritative: every closed-form result is gated by
//! its own residual and falls back when degraded. Degenerate sigma1 =
//! sigma2 always takes the numerical path with metric Gram-Schmidt inside
//! the two-dimensional eigenspace.

use nalgebra::{RowVector4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::invariant::InvariantCoefficients;
use crate::symplectic::{max_abs, max_abs_c, sigma_y, sigma_z, to_c4, C4, R4};

pub type CRow4 = RowVector4<C64>;
pub type CVec4 = Vector4<C64>;

/// The real matrix generating the ladder flow: (1/i)[I, X] relations give
/// dX ~ Omega X with Omega = omega_c * F.
pub type OmegaMatrix = R4;

/// Omega assembled directly from the coefficients; equals omega_c times
/// the quadratic form of `c`.
pub fn omega_from_coefficients(c: &InvariantCoefficients) -> OmegaMatrix {
    R4::new(
        c.w11, c.v11, c.w21, c.v12, //
        -c.u11, -c.w11, -c.u12, -c.w12, //
        c.w12, c.v12, c.w22, c.v22, //
        -c.u12, -c.w21, -c.u22, -c.w22,
    )
}

/// Deviation of Omega from normality, ||Omega^T Omega - Omega Omega^T||.
/// Zero only for special coefficient sets (e.g. isotropic ones); exposed
/// as a diagnostic, never assumed.
pub fn normality_defect(omega: &OmegaMatrix) -> f64 {
    max_abs(&(omega.transpose() * omega - omega * omega.transpose()))
}

#[derive(Debug, Clone, Copy)]
pub struct CharInvariants {
    /// Coefficient of lambda^2 in p(lambda) = lambda^4 + Delta lambda^2 + DeltaOmega.
    pub delta: f64,
    /// Constant term, det(Omega).
    pub delta_omega: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

/// Delta, DeltaOmega and the mode frequencies sigma1 >= sigma2 > 0.
///
/// Delta is computed two ways, as the block-determinant sum and as
/// -tr(Omega^2)/2 from the characteristic polynomial; disagreement beyond
/// 1e-10 is a hard numerical error. Complex frequencies (sigma_j^2 < 0)
/// are a regime error carrying the discriminant values.
pub fn characteristic_invariants(omega: &OmegaMatrix) -> Result<CharInvariants> {
    // block determinants: det A1 = det C, det D1 = det B, det B1 = det C1 = det A
    let o = omega;
    let d_a1 = det2(o[(0, 0)], o[(0, 1)], o[(1, 0)], o[(1, 1)]);
    let d_b1 = det2(o[(0, 2)], o[(0, 3)], o[(1, 2)], o[(1, 3)]);
    let d_c1 = det2(o[(2, 0)], o[(2, 1)], o[(3, 0)], o[(3, 1)]);
    let d_d1 = det2(o[(2, 2)], o[(2, 3)], o[(3, 2)], o[(3, 3)]);
    let delta_blocks = d_a1 + d_d1 + d_b1 + d_c1;
    let delta_poly = -0.5 * (omega * omega).trace();
    let scale = delta_blocks.abs().max(delta_poly.abs()).max(1.0);
    if (delta_blocks - delta_poly).abs() > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "Delta disagreement: blocks {delta_blocks:.17e} vs trace {delta_poly:.17e}"
        )));
    }
    let delta = delta_blocks;
    let delta_omega = omega.determinant();

    let disc = delta * delta - 4.0 * delta_omega;
    let tol = 1e-12 * (delta * delta).max(delta_omega.abs()).max(1.0);
    if disc < -tol {
        return Err(Error::Regime(format!(
            "complex mode frequencies: Delta^2 - 4 DeltaOmega = {disc:.6e} < 0 \
             (Delta = {delta:.6e}, DeltaOmega = {delta_omega:.6e})"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let s1sq = 0.5 * (delta + root);
    let s2sq = 0.5 * (delta - root);
    let tol2 = 1e-12 * s1sq.abs().max(1.0);
    if s2sq <= tol2 {
        return Err(Error::Regime(format!(
            "non-positive mode frequency: sigma1^2 = {s1sq:.6e}, sigma2^2 = {s2sq:.6e} \
             (Delta = {delta:.6e}, DeltaOmega = {delta_omega:.6e})"
        )));
    }
    Ok(CharInvariants {
        delta,
        delta_omega,
        sigma1: s1sq.sqrt(),
        sigma2: s2sq.max(0.0).sqrt(),
    })
}

/// Closed-form (unnormalized) left eigenvector for eigenvalue -i sigma:
/// chi Omega = -i sigma chi. Components are cubic polynomials in the
/// coefficients; the third is real by construction. In the
/// time-independent case (w11 = w22 = u12 = v12 = 0) the real part of
/// component 1, the imaginary part of component 2 and the real part of
/// component 4 vanish term by term.
pub fn left_eigenvector_closed_form(c: &InvariantCoefficients, sigma: f64) -> CRow4 {
    let InvariantCoefficients {
        u11,
        u22,
        v11,
        v22: _,
        w11,
        w22,
        u12,
        v12,
        w21,
        w12,
    } = *c;
    let s = sigma;
    let s2 = s * s;

    let c1_re = -s2 * u12 - u11 * u22 * v12 + u11 * w21 * w22 + u12 * u12 * v12
        - u12 * w11 * w22
        - u12 * w12 * w21
        + u22 * w11 * w12;
    let c1_im = s * (u11 * w21 - u12 * w11 + u12 * w22 - u22 * w12);

    let c2_re = -s2 * w21 - u12 * v11 * w22 + u12 * v12 * w21 + u22 * v11 * w12
        - u22 * v12 * w11
        + w11 * w21 * w22
        - w12 * w21 * w21;
    let c2_im = -s * (u12 * v11 + u22 * v12 - w11 * w21 - w21 * w22);

    let c3_re = -s2 * u22 + u11 * u22 * v11 - u11 * w21 * w21 - u12 * u12 * v11
        + 2.0 * u12 * w11 * w21
        - u22 * w11 * w11;

    let c4_re = -s2 * w22 + u11 * v11 * w22 - u11 * v12 * w21 - u12 * v11 * w12
        + u12 * v12 * w11
        - w11 * w11 * w22
        + w11 * w12 * w21;
    let c4_im = s * (-s2 + u11 * v11 + u12 * v12 - w11 * w11 - w12 * w21);

    let f = C64::new(-u11, 0.0);
    CRow4::new(
        f * C64::new(c1_re, c1_im),
        f * C64::new(c2_re, c2_im),
        f * C64::new(c3_re, 0.0),
        f * C64::new(c4_re, c4_im),
    )
}

/// Null space of a complex 4x4 matrix by full-pivot Gaussian elimination.
/// Returns one basis vector per dimension below the effective rank, where
/// pivots smaller than `rel_tol` times the largest pivot count as zero.
fn null_space(m: &C4, rel_tol: f64) -> Vec<CVec4> {
    let mut a = *m;
    let mut colp = [0usize, 1, 2, 3];
    let mut rank = 0usize;
    let mut first_pivot = 0.0_f64;
    for k in 0..4 {
        // largest remaining entry
        let (mut pi, mut pj, mut pm) = (k, k, 0.0);
        for i in k..4 {
            for j in k..4 {
                let v = a[(i, j)].norm();
                if v > pm {
                    (pi, pj, pm) = (i, j, v);
                }
            }
        }
        if k == 0 {
            first_pivot = pm;
        }
        if pm <= rel_tol * first_pivot || pm == 0.0 {
            break;
        }
        a.swap_rows(k, pi);
        a.swap_columns(k, pj);
        colp.swap(k, pj);
        for i in (k + 1)..4 {
            let f = a[(i, k)] / a[(k, k)];
            a[(i, k)] = C64::new(0.0, 0.0);
            for j in (k + 1)..4 {
                let v = a[(k, j)];
                a[(i, j)] -= f * v;
            }
        }
        rank += 1;
    }

    let mut basis = Vec::new();
    for free in rank..4 {
        let mut x = [C64::new(0.0, 0.0); 4];
        x[free] = C64::new(1.0, 0.0);
        for i in (0..rank).rev() {
            let mut srow = C64::new(0.0, 0.0);
            for j in (i + 1)..4 {
                srow += a[(i, j)] * x[j];
            }
            x[i] = -srow / a[(i, i)];
        }
        let mut v = CVec4::zeros();
        for i in 0..4 {
            v[colp[i]] = x[i];
        }
        basis.push(v.normalize());
    }
    basis
}

/// Numerical left eigenvector for -i sigma: the null vector of
/// (Omega^T + i sigma I), independent of the closed-form polynomials.
pub fn left_eigenvector_numerical(omega: &OmegaMatrix, sigma: f64) -> Result<CRow4> {
    let mut m = to_c4(&omega.transpose());
    for i in 0..4 {
        m[(i, i)] += C64::new(0.0, sigma);
    }
    let ns = null_space(&m, 1e-7);
    match ns.len() {
        1 => Ok(ns[0].transpose()),
        0 => Err(Error::Numerical(format!(
            "no null vector at sigma = {sigma}: not an eigenvalue of Omega"
        ))),
        n => Err(Error::Numerical(format!(
            "{n}-dimensional eigenspace at sigma = {sigma}: degenerate"
        ))),
    }
}

/// Relative eigen-residual ||chi (Omega + i sigma)|| / (||chi|| ||Omega||).
pub fn eigen_residual(chi: &CRow4, omega: &OmegaMatrix, sigma: f64) -> f64 {
    let mut m = to_c4(omega);
    for i in 0..4 {
        m[(i, i)] += C64::new(0.0, sigma);
    }
    let num = (chi * m).norm();
    num / (chi.norm() * max_abs(omega).max(1e-300))
}

/// Symplectic norm n = -chi Sigma_y chi^dagger; real, positive for
/// annihilation-type rows.
pub fn symplectic_norm(chi: &CRow4) -> f64 {
    let n = -(chi * sigma_y() * chi.adjoint())[(0, 0)];
    n.re
}

/// Scale to unit symplectic norm and fix the U(1) phase so the third
/// component is real positive (largest-modulus component as fallback when
/// it vanishes).
pub fn normalize_left(chi: &CRow4) -> Result<CRow4> {
    let n = symplectic_norm(chi);
    if !(n > 0.0) {
        return Err(Error::Numerical(format!(
            "non-positive symplectic norm {n:.6e}; wrong eigenvector branch"
        )));
    }
    let mut out = chi / C64::new(n.sqrt(), 0.0);
    let maxmod = out.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let mut p = out[2];
    if p.norm() < 1e-12 * maxmod {
        // first component attaining the maximal modulus, for determinism
        p = *out
            .iter()
            .find(|z| z.norm() >= (1.0 - 1e-9) * maxmod)
            .unwrap();
    }
    out *= p.conj() / p.norm();
    Ok(out)
}

/// sin of the principal angle between the rays of a and b; stable near 0
/// (the naive sqrt(1 - |<a,b>|^2) loses half the digits there).
pub fn projective_distance(a: &CRow4, b: &CRow4) -> f64 {
    let an = a / C64::new(a.norm(), 0.0);
    let bn = b / C64::new(b.norm(), 0.0);
    // <b, a> with conjugation on b
    let ov = (bn.conjugate() * an.transpose())[(0, 0)];
    (an - bn * ov).norm()
}

/// Right eigenvector paired to a left one: chi_r = -Sigma_y chi_l^dagger.
pub fn right_from_left(chi_l: &CRow4) -> CVec4 {
    -(sigma_y() * chi_l.adjoint())
}

/// Assemble Q = (chi_r1, chi_r1*, chi_r2, chi_r2*) and its inverse from
/// rows (chi_l1; chi_l1*; chi_l2; chi_l2*); verifies Q Qinv = I.
pub fn build_q(chi_l1: &CRow4, chi_l2: &CRow4) -> Result<(C4, C4)> {
    let r1 = right_from_left(chi_l1);
    let r2 = right_from_left(chi_l2);
    let mut q = C4::zeros();
    q.set_column(0, &r1);
    q.set_column(1, &r1.conjugate());
    q.set_column(2, &r2);
    q.set_column(3, &r2.conjugate());
    let mut qinv = C4::zeros();
    qinv.set_row(0, chi_l1);
    qinv.set_row(1, &chi_l1.conjugate());
    qinv.set_row(2, chi_l2);
    qinv.set_row(3, &chi_l2.conjugate());

    let resid = max_abs_c(&(q * qinv - C4::identity()));
    if resid > 1e-10 {
        return Err(Error::Numerical(format!(
            "Q Qinv deviates from identity by {resid:.3e}; eigenvectors not biorthonormal"
        )));
    }
    let cond = q.norm() * qinv.norm();
    if cond > 1e8 {
        return Err(Error::Numerical(format!(
            "Q badly conditioned: ||Q|| ||Qinv|| = {cond:.3e}"
        )));
    }
    Ok((q, qinv))
}

/// Deviation of the ladder commutators from canonical:
/// ||Qinv (-Sigma_y) Qinv^dagger - Sigma_z||, where Sigma_z encodes
/// [a_k, a_l^dagger] = delta_kl for zeta = (a1, a1^dag, a2, a2^dag).
pub fn ladder_metric_residual(qinv: &C4) -> f64 {
    let metric = qinv * (-sigma_y()) * qinv.adjoint();
    max_abs_c(&(metric - to_c4(&sigma_z())))
}

/// Same check entered through Q itself.
pub fn ladder_algebra_check(q: &C4) -> Result<f64> {
    let qinv = q
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Q not invertible".into()))?;
    Ok(ladder_metric_residual(&qinv))
}

/// Full spectral data of one invariant: frequencies, eigenvector pairs,
/// and the diagonalizing Q.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub sigma1: f64,
    pub sigma2: f64,
    pub delta: f64,
    pub delta_omega: f64,
    pub omega: OmegaMatrix,
    pub chi_l1: CRow4,
    pub chi_l2: CRow4,
    pub chi_r1: CVec4,
    pub chi_r2: CVec4,
    pub q: C4,
    pub qinv: C4,
    /// Which modes used the closed-form fast path.
    pub closed_form: [bool; 2],
}

impl SpectralDecomposition {
    /// ||Q^dagger + Sigma_z Qinv Sigma_y||, zero by the structure identity.
    pub fn q_dagger_residual(&self) -> f64 {
        let sz = to_c4(&sigma_z());
        max_abs_c(&(self.q.adjoint() + sz * self.qinv * sigma_y()))
    }

    /// ||Qinv Omega Q - diag(-i s1, i s1, -i s2, i s2)||.
    pub fn diagonalization_residual(&self) -> f64 {
        let d = self.qinv * to_c4(&self.omega) * self.q;
        let mut expect = C4::zeros();
        expect[(0, 0)] = C64::new(0.0, -self.sigma1);
        expect[(1, 1)] = C64::new(0.0, self.sigma1);
        expect[(2, 2)] = C64::new(0.0, -self.sigma2);
        expect[(3, 3)] = C64::new(0.0, self.sigma2);
        max_abs_c(&(d - expect))
    }

    /// max_jk |chi_lj chi_rk - delta_jk|.
    pub fn biorthonormality_residual(&self) -> f64 {
        let pairs = [
            ((&self.chi_l1, &self.chi_r1), 1.0),
            ((&self.chi_l1, &self.chi_r2), 0.0),
            ((&self.chi_l2, &self.chi_r1), 0.0),
            ((&self.chi_l2, &self.chi_r2), 1.0),
        ];
        pairs
            .iter()
            .map(|((l, r), want)| ((**l * **r)[(0, 0)] - C64::new(*want, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn ladder_residual(&self) -> f64 {
        ladder_metric_residual(&self.qinv)
    }
}

/// Relative frequency gap below which the two modes are treated as
/// degenerate and solved jointly.
const DEGENERACY_GAP: f64 = 1e-10;
/// Closed-form acceptance threshold on the relative eigen-residual.
const CLOSED_FORM_RESID: f64 = 1e-9;

fn metric_inner(a: &CRow4, b: &CRow4) -> C64 {
    // <a, b> = -a Sigma_y b^dagger (Hermitian form, positive on the
    // annihilation subspace)
    -(*a * sigma_y() * b.adjoint())[(0, 0)]
}

/// Two orthonormal left eigenvectors inside a degenerate 2-dimensional
/// eigenspace, via Gram-Schmidt in the symplectic metric.
fn degenerate_left_pair(omega: &OmegaMatrix, sigma: f64) -> Result<(CRow4, CRow4)> {
    let mut m = to_c4(&omega.transpose());
    for i in 0..4 {
        m[(i, i)] += C64::new(0.0, sigma);
    }
    let ns = null_space(&m, 1e-6);
    if ns.len() != 2 {
        return Err(Error::Numerical(format!(
            "expected 2-dimensional degenerate eigenspace, found {}",
            ns.len()
        )));
    }
    let x1 = ns[0].transpose();
    let x2 = ns[1].transpose();
    let v1 = normalize_left(&x1)?;
    // project out v1 (conjugate-linear slot is the second argument)
    let c = metric_inner(&v1, &x2).conj();
    let v2raw = x2 - v1 * c;
    let v2 = normalize_left(&v2raw)?;
    Ok((v1, v2))
}

/// Diagonalize the invariant given by `c`: frequencies, eigenvectors, Q.
pub fn decompose(c: &InvariantCoefficients) -> Result<SpectralDecomposition> {
    let omega = omega_from_coefficients(c);
    let ci = characteristic_invariants(&omega)?;
    let (s1, s2) = (ci.sigma1, ci.sigma2);

    let mut closed_form = [false; 2];
    let (chi_l1, chi_l2) = if (s1 - s2) <= DEGENERACY_GAP * s1 {
        degenerate_left_pair(&omega, 0.5 * (s1 + s2))?
    } else {
        let mut pick = |sigma: f64, slot: usize| -> Result<CRow4> {
            let cf = left_eigenvector_closed_form(c, sigma);
            let scale = c
                .as_array()
                .iter()
                .fold(sigma, |a, x| a.max(x.abs()))
                .powi(3);
            if cf.norm() > 1e-8 * scale && eigen_residual(&cf, &omega, sigma) < CLOSED_FORM_RESID
            {
                closed_form[slot] = true;
                normalize_left(&cf)
            } else {
                normalize_left(&left_eigenvector_numerical(&omega, sigma)?)
            }
        };
        (pick(s1, 0)?, pick(s2, 1)?)
    };

    let (q, qinv) = build_q(&chi_l1, &chi_l2)?;
    Ok(SpectralDecomposition {
        sigma1: s1,
        sigma2: s2,
        delta: ci.delta,
        delta_omega: ci.delta_omega,
        omega,
        chi_r1: right_from_left(&chi_l1),
        chi_r2: right_from_left(&chi_l2),
        chi_l1,
        chi_l2,
        q,
        qinv,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_params, PhysicalParams, Schedule};
    use crate::symplectic::omega_c;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coeffs(a: [f64; 10]) -> InvariantCoefficients {
        InvariantCoefficients::from_array(a)
    }

    fn random_physical_coeffs(rng: &mut impl Rng) -> InvariantCoefficients {
        // Hamiltonian-derived coefficients plus a small generic perturbation,
        // redrawn until positive definite
        loop {
            let p = PhysicalParams {
                mu1: Schedule::constant(rng.random_range(0.3..3.0)),
                mu2: Schedule::constant(rng.random_range(0.3..3.0)),
                k1: Schedule::constant(rng.random_range(0.1..4.0)),
                k2: Schedule::constant(rng.random_range(0.1..4.0)),
                alpha01: Schedule::constant(rng.random_range(-2.0..2.0)),
                alpha02: Schedule::constant(rng.random_range(-2.0..2.0)),
                e: 1.0,
            };
            let f = 2.0 * derive_params(&p, 0.0).unwrap().hamiltonian_display();
            let mut c = InvariantCoefficients::from_quadratic_form(&f).unwrap();
            let mut a = c.as_array();
            for x in &mut a {
                *x += rng.random_range(-0.05..0.05);
            }
            c = InvariantCoefficients::from_array(a);
            if !c.is_positive_definite() {
                continue;
            }
            let om = omega_from_coefficients(&c);
            match characteristic_invariants(&om) {
                Ok(ci) if ci.sigma1 - ci.sigma2 > 0.05 * ci.sigma1 => return c,
                _ => continue,
            }
        }
    }

    #[test]
    fn omega_entry_placement() {
        assert_eq!(
            omega_from_coefficients(&InvariantCoefficients::zero()),
            R4::zeros()
        );
        let mut c = InvariantCoefficients::zero();
        c.v11 = 1.0;
        let om = omega_from_coefficients(&c);
        assert_eq!(om[(0, 1)], 1.0);
        assert_eq!(om.iter().map(|x| x.abs()).sum::<f64>(), 1.0);
    }

    #[test]
    fn omega_is_metric_times_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let c = coeffs(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
            let om = omega_from_coefficients(&c);
            let oracle = omega_c() * c.to_quadratic_form();
            assert!(max_abs(&(om - oracle)) == 0.0);
            assert_eq!(om.trace(), 0.0);
        }
    }

    #[test]
    fn block_identities_and_det_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = coeffs(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
        let om = omega_from_coefficients(&c);
        let f = c.to_quadratic_form();
        let j2 = crate::symplectic::j2();
        // A1 = j2 C, B1 = j2 A^T, C1 = j2 A, D1 = j2 B
        let blk = |m: &R4, r: usize, col: usize| {
            nalgebra::Matrix2::new(m[(r, col)], m[(r, col + 1)], m[(r + 1, col)], m[(r + 1, col + 1)])
        };
        let (a1, b1, c1, d1) = (blk(&om, 0, 0), blk(&om, 0, 2), blk(&om, 2, 0), blk(&om, 2, 2));
        let cblk = blk(&f, 0, 0);
        let bblk = blk(&f, 2, 2);
        let ablk = blk(&f, 2, 0);
        assert!((a1 - j2 * cblk).abs().max() < 1e-15);
        assert!((c1 - j2 * ablk).abs().max() < 1e-15);
        assert!((d1 - j2 * bblk).abs().max() < 1e-15);
        assert!((b1 - j2 * ablk.transpose()).abs().max() < 1e-15);
        // determinant bookkeeping
        assert_relative_eq!(a1.determinant(), cblk.determinant(), epsilon = 1e-13);
        assert_relative_eq!(d1.determinant(), bblk.determinant(), epsilon = 1e-13);
        assert_relative_eq!(b1.determinant(), ablk.determinant(), epsilon = 1e-13);
        assert_relative_eq!(c1.determinant(), ablk.determinant(), epsilon = 1e-13);
    }

    #[test]
    fn normality_holds_isotropic_but_not_generic() {
        // isotropic single-scale invariant: Omega is normal
        let mut c = InvariantCoefficients::zero();
        c.u11 = 1.0;
        c.v11 = 1.0;
        c.u22 = 1.0;
        c.v22 = 1.0;
        assert!(normality_defect(&omega_from_coefficients(&c)) < 1e-15);
        // generic anisotropic: demonstrably not normal
        let c = coeffs([1.0, 3.0, 2.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(normality_defect(&omega_from_coefficients(&c)) > 1.0);
    }

    #[test]
    fn invariants_decoupled_and_isotropic() {
        // decoupled: sigma_j = sqrt(u_jj v_jj)
        let c = coeffs([2.0, 3.0, 0.5, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let ci = characteristic_invariants(&omega_from_coefficients(&c)).unwrap();
        let (sa, sb) = ((2.0_f64 * 0.5).sqrt(), (3.0_f64 * 0.7).sqrt());
        assert_relative_eq!(ci.sigma1, sa.max(sb), epsilon = 1e-12);
        assert_relative_eq!(ci.sigma2, sa.min(sb), epsilon = 1e-12);

        // zero-field isotropic Hamiltonian display coefficients: sigma = 1/2
        let p = PhysicalParams {
            mu1: Schedule::constant(1.0),
            mu2: Schedule::constant(1.0),
            k1: Schedule::constant(1.0),
            k2: Schedule::constant(1.0),
            alpha01: Schedule::constant(0.0),
            alpha02: Schedule::constant(0.0),
            e: 1.0,
        };
        let h = derive_params(&p, 0.0).unwrap().hamiltonian_display();
        let c = InvariantCoefficients::from_quadratic_form(&h).unwrap();
        let ci = characteristic_invariants(&omega_from_coefficients(&c)).unwrap();
        assert_relative_eq!(ci.sigma1, 0.5, epsilon = 1e-12);
        assert_relative_eq!(ci.sigma2, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalues_are_conjugate_imaginary_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let c = random_physical_coeffs(&mut rng);
            let om = omega_from_coefficients(&c);
            let ci = characteristic_invariants(&om).unwrap();
            let eigs = om.complex_eigenvalues();
            let mut ims: Vec<f64> = eigs.iter().map(|l| l.im).collect();
            ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for l in eigs.iter() {
                assert!(l.re.abs() < 1e-9 * ci.sigma1, "real part {}", l.re);
            }
            let want = [-ci.sigma1, -ci.sigma2, ci.sigma2, ci.sigma1];
            for (got, want) in ims.iter().zip(want) {
                assert_relative_eq!(*got, want, epsilon = 1e-9 * ci.sigma1.max(1.0));
            }
        }
    }

    #[test]
    fn complex_frequency_regime_rejected() {
        // indefinite form: u22 v22 < 0 drives sigma2^2 negative
        let c = coeffs([1.0, 1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let err = characteristic_invariants(&omega_from_coefficients(&c)).unwrap_err();
        assert!(matches!(err, Error::Regime(_)), "{err}");
    }

    #[test]
    fn closed_form_time_independent_structure() {
        // static magnetic-field invariant: w11 = w22 = u12 = v12 = 0,
        // w12 and w21 alive; components 1 and 4 purely imaginary, 2 real
        let p = PhysicalParams {
            mu1: Schedule::constant(1.0),
            mu2: Schedule::constant(1.3),
            k1: Schedule::constant(1.1),
            k2: Schedule::constant(0.9),
            alpha01: Schedule::constant(0.6),
            alpha02: Schedule::constant(-0.4),
            e: 1.0,
        };
        let f = 2.0 * derive_params(&p, 0.0).unwrap().hamiltonian_display();
        let c = InvariantCoefficients::from_quadratic_form(&f).unwrap();
        assert_eq!(c.w11, 0.0);
        assert_eq!(c.w22, 0.0);
        assert_eq!(c.u12, 0.0);
        assert_eq!(c.v12, 0.0);
        assert!(c.w12 != 0.0 && c.w21 != 0.0);
        let ci = characteristic_invariants(&omega_from_coefficients(&c)).unwrap();
        for s in [ci.sigma1, ci.sigma2] {
            let chi = left_eigenvector_closed_form(&c, s);
            assert_eq!(chi[0].re, 0.0, "s_j1 must vanish exactly");
            assert_eq!(chi[1].im, 0.0, "q_j2 must vanish exactly");
            assert_eq!(chi[3].re, 0.0, "s_j4 must vanish exactly");
            assert_eq!(chi[2].im, 0.0, "third component is real");
        }
    }

    #[test]
    fn closed_form_matches_numerical() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let c = random_physical_coeffs(&mut rng);
            let om = omega_from_coefficients(&c);
            let ci = characteristic_invariants(&om).unwrap();
            for s in [ci.sigma1, ci.sigma2] {
                let cf = left_eigenvector_closed_form(&c, s);
                let nu = left_eigenvector_numerical(&om, s).unwrap();
                worst = worst.max(projective_distance(&cf, &nu));
            }
        }
        assert!(worst < 1e-8, "worst projective distance {worst:.3e}");
    }

    #[test]
    fn normalization_and_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let c = random_physical_coeffs(&mut rng);
            let om = omega_from_coefficients(&c);
            let ci = characteristic_invariants(&om).unwrap();
            for s in [ci.sigma1, ci.sigma2] {
                let chi = normalize_left(&left_eigenvector_closed_form(&c, s)).unwrap();
                assert_relative_eq!(symplectic_norm(&chi), 1.0, epsilon = 1e-12);
                assert!(chi[2].im.abs() < 1e-12 * chi.norm());
                assert!(chi[2].re > 0.0);
                // arbitrary pre-phase lands on the same representative
                let spun = chi * C64::from_polar(1.0, 1.234);
                let back = normalize_left(&spun).unwrap();
                assert!((back - chi).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn decompose_satisfies_structure_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let c = random_physical_coeffs(&mut rng);
            let dec = decompose(&c).unwrap();
            assert!(dec.sigma1 >= dec.sigma2);
            assert!(dec.biorthonormality_residual() < 1e-10);
            assert!(dec.q_dagger_residual() < 1e-10, "{}", dec.q_dagger_residual());
            assert!(
                dec.diagonalization_residual() < 1e-10 * dec.sigma1.max(1.0),
                "{}",
                dec.diagonalization_residual()
            );
            assert!(dec.ladder_residual() < 1e-10);
            assert_relative_eq!(
                dec.delta,
                dec.sigma1 * dec.sigma1 + dec.sigma2 * dec.sigma2,
                max_relative = 1e-10
            );
            assert_relative_eq!(
                dec.delta_omega,
                (dec.sigma1 * dec.sigma2).powi(2),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn decoupled_modes_give_textbook_ladders() {
        // mode 2 scaled by 4: sigma1 = 4 belongs to the (x2, p2) plane
        let c = coeffs([1.0, 4.0, 1.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let dec = decompose(&c).unwrap();
        assert_relative_eq!(dec.sigma1, 4.0, epsilon = 1e-12);
        assert_relative_eq!(dec.sigma2, 1.0, epsilon = 1e-12);
        let r = 1.0 / 2.0_f64.sqrt();
        let want1 = CRow4::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(r, 0.0),
            C64::new(0.0, r),
        );
        let want2 = CRow4::new(
            C64::new(r, 0.0),
            C64::new(0.0, r),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        );
        assert!((dec.chi_l1 - want1).norm() < 1e-12, "{}", dec.chi_l1);
        assert!((dec.chi_l2 - want2).norm() < 1e-12, "{}", dec.chi_l2);
    }

    #[test]
    fn degenerate_isotropic_path() {
        let c = coeffs([1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let dec = decompose(&c).unwrap();
        assert_relative_eq!(dec.sigma1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(dec.sigma2, 1.0, epsilon = 1e-12);
        assert!(!dec.closed_form[0] && !dec.closed_form[1]);
        assert!(dec.biorthonormality_residual() < 1e-10);
        assert!(dec.ladder_residual() < 1e-10);
        assert!(dec.diagonalization_residual() < 1e-10);
        assert!(dec.q_dagger_residual() < 1e-10);
    }

    #[test]
    fn ladder_check_detects_bad_normalization() {
        let c = coeffs([1.0, 4.0, 1.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let dec = decompose(&c).unwrap();
        assert!(ladder_algebra_check(&dec.q).unwrap() < 1e-12);
        let mut bad = dec.qinv;
        let row = bad.row(0) * C64::new(2.0, 0.0);
        bad.set_row(0, &row);
        assert_relative_eq!(ladder_metric_residual(&bad), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn wrong_branch_norm_rejected() {
        // conjugate of an annihilation row has negative symplectic norm
        let c = coeffs([1.0, 4.0, 1.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let dec = decompose(&c).unwrap();
        let conj = dec.chi_l1.conjugate();
        assert!(normalize_left(&conj).is_err());
    }

    #[test]
    fn sigma_conserved_along_invariant_flow() {
        let p = PhysicalParams {
            mu1: Schedule::constant(1.0),
            mu2: Schedule::constant(1.2),
            k1: Schedule::Sinusoid {
                offset: 1.0,
                amplitude: 0.2,
                frequency: 0.05,
                phase: 0.0,
            },
            k2: Schedule::Sinusoid {
                offset: 1.4,
                amplitude: 0.1,
                frequency: 0.05,
                phase: 1.0,
            },
            alpha01: Schedule::constant(0.3),
            alpha02: Schedule::constant(0.25),
            e: 1.0,
        };
        let c0 = crate::invariant::default_initial(&p, 0.0).unwrap();
        let ts: Vec<f64> = (0..=30).map(|i| i as f64).collect();
        let traj = crate::invariant::integrate(
            &c0,
            &p,
            0.0,
            30.0,
            &ts,
            &crate::ode::IntegratorOptions::default(),
        )
        .unwrap();
        let ci0 = characteristic_invariants(&omega_from_coefficients(&c0)).unwrap();
        for (t, c) in traj {
            let ci = characteristic_invariants(&omega_from_coefficients(&c)).unwrap();
            assert!(
                (ci.sigma1 - ci0.sigma1).abs() < 1e-9 && (ci.sigma2 - ci0.sigma2).abs() < 1e-9,
                "t={t}: sigma drifted to ({}, {})",
                ci.sigma1,
                ci.sigma2
            );
        }
    }
}
