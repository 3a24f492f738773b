//! The bipartite Gaussian ground state annihilated by both ladder
//! operators, psi00 = N0 exp(-x^T Lambda x / 2), and its second moments.
//!
//! Lambda comes from the left-eigenvector components two ways, the matrix
//! product i (Lambda_2^l)^{-1} Lambda_1^l and the four explicit element
//! formulas; both are computed and compared. Moments are derived from
//! p psi = i (Lambda x) psi, which makes every second moment a real
//! expression in Re(Lambda), Im(Lambda); the original element-level
//! displays are preserved verbatim in `audit_moment_formulas` and judged
//! against quadrature, not trusted.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;
use crate::symplectic::R4;

pub type C2 = Matrix2<C64>;
pub type R2 = Matrix2<f64>;

#[derive(Debug, Clone)]
pub struct GaussianState {
    /// Symmetrized exponent matrix, Re(Lambda) positive definite.
    pub lambda: C2,
    pub lambda1l: C2,
    pub lambda2l: C2,
    /// det Re(Lambda).
    pub delta_r: f64,
    /// Unit-L2 normalization, (delta_r / pi^2)^(1/4).
    pub n0: f64,
}

fn re2(m: &C2) -> R2 {
    R2::new(m[(0, 0)].re, m[(0, 1)].re, m[(1, 0)].re, m[(1, 1)].re)
}

fn im2(m: &C2) -> R2 {
    R2::new(m[(0, 0)].im, m[(0, 1)].im, m[(1, 0)].im, m[(1, 1)].im)
}

impl GaussianState {
    /// Construct directly from an exponent matrix (test entry point and
    /// covariance-scan driver).
    pub fn from_lambda(lambda: C2) -> Result<GaussianState> {
        let sym_defect = (lambda[(0, 1)] - lambda[(1, 0)]).norm();
        if sym_defect > 1e-9 * lambda.norm() {
            return Err(Error::Numerical(format!(
                "Lambda not symmetric (defect {sym_defect:.3e})"
            )));
        }
        let mut l = lambda;
        let off = (l[(0, 1)] + l[(1, 0)]) * C64::new(0.5, 0.0);
        l[(0, 1)] = off;
        l[(1, 0)] = off;
        let lr = re2(&l);
        let delta_r = lr.determinant();
        if lr[(0, 0)] <= 0.0 || delta_r <= 0.0 {
            return Err(Error::Regime(format!(
                "Re(Lambda) not positive definite (Lambda11_r = {}, Delta_r = {delta_r}); \
                 state not normalizable",
                lr[(0, 0)]
            )));
        }
        let n0 = (delta_r / (std::f64::consts::PI * std::f64::consts::PI)).powf(0.25);
        Ok(GaussianState {
            lambda: l,
            lambda1l: C2::zeros(),
            lambda2l: C2::zeros(),
            delta_r,
            n0,
        })
    }

    pub fn lambda_re(&self) -> R2 {
        re2(&self.lambda)
    }

    pub fn lambda_im(&self) -> R2 {
        im2(&self.lambda)
    }

    /// psi00 at a point (mostly for quadrature tests).
    pub fn eval(&self, x1: f64, x2: f64) -> C64 {
        let l = &self.lambda;
        let s = l[(0, 0)] * (x1 * x1) + l[(1, 1)] * (x2 * x2) + l[(0, 1)] * (2.0 * x1 * x2);
        C64::new(self.n0, 0.0) * (-s * C64::new(0.5, 0.0)).exp()
    }
}

/// Ground state from a spectral decomposition: rows of Lambda_1^l are the
/// position components (1, 3) of chi_l1, chi_l2, rows of Lambda_2^l the
/// momentum components (2, 4); Lambda = i (Lambda_2^l)^{-1} Lambda_1^l.
pub fn ground_state(dec: &SpectralDecomposition) -> Result<GaussianState> {
    let x1 = dec.chi_l1;
    let x2 = dec.chi_l2;
    let lambda1l = C2::new(x1[0], x1[2], x2[0], x2[2]);
    let lambda2l = C2::new(x1[1], x1[3], x2[1], x2[3]);

    let det2 = lambda2l[(0, 0)] * lambda2l[(1, 1)] - lambda2l[(0, 1)] * lambda2l[(1, 0)];
    if det2.norm() < 1e-12 * lambda2l.norm().powi(2).max(1e-300) {
        return Err(Error::Numerical(
            "Lambda_2^l singular; momentum components degenerate".into(),
        ));
    }
    let inv2 = lambda2l
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Lambda_2^l not invertible".into()))?;
    let lam_prod = inv2 * lambda1l * C64::i();

    // element formulas: i/det2 times 2x2 cofactor combinations
    let f = C64::i() / det2;
    let lam_elems = C2::new(
        f * (x2[3] * x1[0] - x1[3] * x2[0]),
        f * (x2[3] * x1[2] - x1[3] * x2[2]),
        f * (x1[1] * x2[0] - x2[1] * x1[0]),
        f * (x1[1] * x2[2] - x2[1] * x1[2]),
    );
    let path_diff = (lam_prod - lam_elems).norm();
    if path_diff > 1e-10 * lam_prod.norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "Lambda element formulas disagree with matrix path by {path_diff:.3e}"
        )));
    }

    let mut g = GaussianState::from_lambda(lam_prod)?;
    g.lambda1l = lambda1l;
    g.lambda2l = lambda2l;
    Ok(g)
}

/// All ten second moments (first moments vanish identically for psi00).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTable {
    pub x1x1: f64,
    pub x2x2: f64,
    pub x1x2: f64,
    pub p1p1: f64,
    pub p2p2: f64,
    pub p1p2: f64,
    /// <{x1, p1}>
    pub x1p1_anti: f64,
    /// <{x2, p2}>
    pub x2p2_anti: f64,
    pub x1p2: f64,
    pub x2p1: f64,
}

/// Closed-form moments. Position block is Re(Lambda)^{-1}/2; momentum
/// block is (Re(Lambda) + Im(Lambda) Re(Lambda)^{-1} Im(Lambda))/2; all
/// mixed moments are linear in Im(Lambda) times position moments.
pub fn moments(g: &GaussianState) -> MomentTable {
    let lr = g.lambda_re();
    let li = g.lambda_im();
    let d = g.delta_r;
    let x1x1 = lr[(1, 1)] / (2.0 * d);
    let x2x2 = lr[(0, 0)] / (2.0 * d);
    let x1x2 = -lr[(0, 1)] / (2.0 * d);

    let xcov = R2::new(x1x1, x1x2, x1x2, x2x2);
    let pcov = (lr + li * xcov * (2.0 * li)) * 0.5;
    // the identity Re(L)^{-1}/2 = xcov keeps this in real arithmetic:
    // pcov = (Re L + Im L Re(L)^{-1} Im L)/2

    let x1p2 = -(li[(0, 1)] * x1x1 + li[(1, 1)] * x1x2);
    let x2p1 = -(li[(0, 1)] * x2x2 + li[(0, 0)] * x1x2);
    let x1p1_anti = -2.0 * (li[(0, 0)] * x1x1 + li[(0, 1)] * x1x2);
    let x2p2_anti = -2.0 * (li[(1, 1)] * x2x2 + li[(0, 1)] * x1x2);

    MomentTable {
        x1x1,
        x2x2,
        x1x2,
        p1p1: pcov[(0, 0)],
        p2p2: pcov[(1, 1)],
        p1p2: pcov[(0, 1)],
        x1p1_anti,
        x2p2_anti,
        x1p2,
        x2p1,
    }
}

/// First moments, identically zero for the even Gaussian.
pub fn first_moments(_g: &GaussianState) -> [f64; 4] {
    [0.0; 4]
}

/// <a|b> between two normalized ground states:
/// Na Nb 2 pi / sqrt(det(conj(Lambda_a) + Lambda_b)). Principal square
/// root; adequate for overlap-product oracles where consecutive states
/// are close and the determinant stays near the positive real axis.
pub fn overlap(a: &GaussianState, b: &GaussianState) -> C64 {
    let m = a.lambda.conjugate() + b.lambda;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    C64::new(a.n0 * b.n0 * 2.0 * std::f64::consts::PI, 0.0) / det.sqrt()
}

/// Covariance matrix in (x1, p1, x2, p2) ordering with symmetrized
/// entries V_ab = <{X_a, X_b}>/2.
pub fn covariance(g: &GaussianState) -> R4 {
    let m = moments(g);
    R4::new(
        m.x1x1,
        0.5 * m.x1p1_anti,
        m.x1x2,
        m.x1p2,
        0.5 * m.x1p1_anti,
        m.p1p1,
        m.x2p1,
        m.p1p2,
        m.x1x2,
        m.x2p1,
        m.x2x2,
        0.5 * m.x2p2_anti,
        m.x1p2,
        m.p1p2,
        0.5 * m.x2p2_anti,
        m.p2p2,
    )
}

/// Gauss-Hermite nodes and weights for weight exp(-x^2), by eigenvalues of
/// the Jacobi tridiagonal (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(j);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let weights: Vec<f64> = (0..n)
        .map(|i| sqrt_pi * eig.eigenvectors[(0, i)].powi(2))
        .collect();
    (nodes, weights)
}

/// Quadrature oracle: every entry of the moment table recomputed by 2-D
/// Gauss-Hermite integration against |psi|^2 (whitened by Re Lambda so the
/// integrand is polynomial times the exact weight). Also returns the
/// quadrature norm of psi00, which must be 1.
pub fn moments_by_quadrature(g: &GaussianState, nodes_per_axis: usize) -> (MomentTable, f64) {
    let lr = g.lambda_re();
    let li = g.lambda_im();
    let eig = nalgebra::SymmetricEigen::new(lr);
    // A = Re(Lambda)^{-1/2}: x = A z turns the density into exp(-z.z)
    let a = eig.eigenvectors
        * R2::new(
            1.0 / eig.eigenvalues[0].sqrt(),
            0.0,
            0.0,
            1.0 / eig.eigenvalues[1].sqrt(),
        )
        * eig.eigenvectors.transpose();
    let jac = a.determinant().abs();
    let dens = g.n0 * g.n0 * jac;

    let (zs, ws) = gauss_hermite(nodes_per_axis);
    let mut acc = [0.0f64; 11];
    for (i, &z1) in zs.iter().enumerate() {
        for (k, &z2) in zs.iter().enumerate() {
            let w = ws[i] * ws[k] * dens;
            let x1 = a[(0, 0)] * z1 + a[(0, 1)] * z2;
            let x2 = a[(1, 0)] * z1 + a[(1, 1)] * z2;
            // q = Lambda x (complex); p psi = i q psi
            let q1 = C64::new(
                lr[(0, 0)] * x1 + lr[(0, 1)] * x2,
                li[(0, 0)] * x1 + li[(0, 1)] * x2,
            );
            let q2 = C64::new(
                lr[(1, 0)] * x1 + lr[(1, 1)] * x2,
                li[(1, 0)] * x1 + li[(1, 1)] * x2,
            );
            acc[0] += w;
            acc[1] += w * x1 * x1;
            acc[2] += w * x2 * x2;
            acc[3] += w * x1 * x2;
            acc[4] += w * (q1.conj() * q1).re;
            acc[5] += w * (q2.conj() * q2).re;
            acc[6] += w * (q1.conj() * q2).re;
            // <x p> = Re integral of x * i q |psi|^2 -> -x * Im(q)
            acc[7] += w * -2.0 * x1 * q1.im;
            acc[8] += w * -2.0 * x2 * q2.im;
            acc[9] += w * -x1 * q2.im;
            acc[10] += w * -x2 * q1.im;
        }
    }
    (
        MomentTable {
            x1x1: acc[1],
            x2x2: acc[2],
            x1x2: acc[3],
            p1p1: acc[4],
            p2p2: acc[5],
            p1p2: acc[6],
            x1p1_anti: acc[7],
            x2p2_anti: acc[8],
            x1p2: acc[9],
            x2p1: acc[10],
        },
        acc[0],
    )
}

impl MomentTable {
    pub fn max_abs_diff(&self, other: &MomentTable) -> f64 {
        let a = [
            self.x1x1 - other.x1x1,
            self.x2x2 - other.x2x2,
            self.x1x2 - other.x1x2,
            self.p1p1 - other.p1p1,
            self.p2p2 - other.p2p2,
            self.p1p2 - other.p1p2,
            self.x1p1_anti - other.x1p1_anti,
            self.x2p2_anti - other.x2p2_anti,
            self.x1p2 - other.x1p2,
            self.x2p1 - other.x2p1,
        ];
        a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// One audited moment formula: the value of the element-level display as
/// printed, the quadrature reference, and whether they agree.
#[derive(Debug, Clone)]
pub struct FormulaAudit {
    pub name: &'static str,
    pub displayed: C64,
    pub reference: f64,
    pub agree: bool,
}

/// Evaluate the ten displayed moment formulas verbatim (complex arithmetic
/// and all) against the quadrature oracle. Several displays mix real and
/// imaginary parts inconsistently; this function records, per formula,
/// whether the display survives. Agreement tolerance 1e-8 on the complex
/// distance, so a spurious imaginary part also counts as disagreement.
pub fn audit_moment_formulas(g: &GaussianState, nodes_per_axis: usize) -> Vec<FormulaAudit> {
    let (q, _norm) = moments_by_quadrature(g, nodes_per_axis);
    let l = &g.lambda;
    let (l11, l12, l22) = (l[(0, 0)], l[(0, 1)], l[(1, 1)]);
    let (l11r, l12r, l22r) = (l11.re, l12.re, l22.re);
    let l12i = l12.im;
    let dr = g.delta_r;
    let re = |x: f64| C64::new(x, 0.0);
    let i = C64::i();

    let x1sq = re(l22r / (2.0 * dr));
    let x2sq = re(l11r / (2.0 * dr));
    let x1x2 = re(-l12r / (2.0 * dr));

    let p1sq = (re(l22r * l11.norm_sqr()) + re(l11r) * l12 * l12
        - i * re(2.0 * l12i * l12r) * l11.conj())
        / re(2.0 * dr);
    let p2sq = (re(l11r * l22.norm_sqr()) + re(l22r) * l12 * l12
        - i * re(2.0 * l12i * l12r) * l22.conj())
        / re(2.0 * dr);
    let p1p2 = l12 - l11 * l12 * x1sq - l22 * l12 * x2sq - (l11 * l22 + l12 * l12) * x1x2;
    let x1p1 = i * re(2.0) * l11 * x1sq + re(2.0) * l12 * x1x2 - re(1.0);
    let x2p2 = i * re(2.0) * l22 * x2sq + re(2.0) * l12 * x1x2 - re(1.0);
    let x1p2 = i * l12 * x1sq + l22 * x1x2;
    let x2p1 = i * l12 * x2sq + l11 * x1x2;

    let rows: [(&'static str, C64, f64); 10] = [
        ("x1^2", x1sq, q.x1x1),
        ("x2^2", x2sq, q.x2x2),
        ("x1 x2", x1x2, q.x1x2),
        ("p1^2", p1sq, q.p1p1),
        ("p2^2", p2sq, q.p2p2),
        ("p1 p2", p1p2, q.p1p2),
        ("{x1, p1}", x1p1, q.x1p1_anti),
        ("{x2, p2}", x2p2, q.x2p2_anti),
        ("x1 p2", x1p2, q.x1p2),
        ("x2 p1", x2p1, q.x2p1),
    ];
    rows.iter()
        .map(|&(name, displayed, reference)| {
            let scale = displayed.norm().max(reference.abs()).max(1.0);
            FormulaAudit {
                name,
                displayed,
                reference,
                agree: (displayed - C64::new(reference, 0.0)).norm() <= 1e-8 * scale,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::InvariantCoefficients;
    use crate::spectral::decompose;
    use crate::symplectic::{max_abs, symplectic_eigenvalues, uncertainty_ok};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut impl Rng) -> GaussianState {
        // random complex symmetric Lambda with Re(Lambda) positive definite
        loop {
            let a = rng.random_range(0.3..2.5);
            let b = rng.random_range(0.3..2.5);
            let c = rng.random_range(-1.0..1.0);
            if a * b - c * c < 0.05 {
                continue;
            }
            let li = R2::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                0.0,
                rng.random_range(-1.0..1.0),
            );
            let lam = C2::new(
                C64::new(a, li[(0, 0)]),
                C64::new(c, li[(0, 1)]),
                C64::new(c, li[(0, 1)]),
                C64::new(b, li[(1, 1)]),
            );
            if let Ok(g) = GaussianState::from_lambda(lam) {
                return g;
            }
        }
    }

    #[test]
    fn vacuum_state() {
        let g = GaussianState::from_lambda(C2::identity()).unwrap();
        assert_relative_eq!(g.delta_r, 1.0);
        assert_relative_eq!(g.n0, (1.0 / (std::f64::consts::PI.powi(2))).powf(0.25));
        let m = moments(&g);
        assert_relative_eq!(m.x1x1, 0.5);
        assert_relative_eq!(m.x2x2, 0.5);
        assert_relative_eq!(m.p1p1, 0.5);
        assert_relative_eq!(m.p2p2, 0.5);
        for v in [m.x1x2, m.p1p2, m.x1p1_anti, m.x2p2_anti, m.x1p2, m.x2p1] {
            assert_eq!(v, 0.0);
        }
        let v = covariance(&g);
        assert!(max_abs(&(v - R4::identity() * 0.5)) < 1e-15);
    }

    #[test]
    fn real_correlated_state_signs() {
        // real Lambda with positive off-diagonal: <x1 x2> negative
        let lam = C2::new(
            C64::new(1.0, 0.0),
            C64::new(0.4, 0.0),
            C64::new(0.4, 0.0),
            C64::new(1.0, 0.0),
        );
        let g = GaussianState::from_lambda(lam).unwrap();
        let m = moments(&g);
        assert!(m.x1x2 < 0.0);
        assert_relative_eq!(m.x1x2, -0.4 / (2.0 * (1.0 - 0.16)));
    }

    #[test]
    fn non_normalizable_rejected() {
        let lam = C2::new(
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        );
        assert!(matches!(
            GaussianState::from_lambda(lam),
            Err(Error::Regime(_))
        ));
        let lam = C2::new(
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(1.0, 0.0),
        );
        assert!(GaussianState::from_lambda(lam).is_err());
    }

    #[test]
    fn quadrature_normalization_and_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..15 {
            let g = random_state(&mut rng);
            let (q, norm) = moments_by_quadrature(&g, 64);
            assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
            let m = moments(&g);
            assert!(
                m.max_abs_diff(&q) < 1e-8,
                "closed-form vs quadrature: {:.3e}",
                m.max_abs_diff(&q)
            );
        }
    }

    #[test]
    fn ground_state_from_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let c = crate::testutil::random_invariant(&mut rng);
            let dec = decompose(&c).unwrap();
            let g = ground_state(&dec).unwrap();
            // purity: both symplectic eigenvalues 1/2
            let v = covariance(&g);
            let (n1, n2) = symplectic_eigenvalues(&v).unwrap();
            assert_relative_eq!(n1, 0.5, epsilon = 1e-8);
            assert_relative_eq!(n2, 0.5, epsilon = 1e-8);
            assert!(uncertainty_ok(&v, 1e-10));
            // moments agree with quadrature
            let (q, norm) = moments_by_quadrature(&g, 64);
            assert_relative_eq!(norm, 1.0, epsilon = 1e-9);
            assert!(moments(&g).max_abs_diff(&q) < 1e-8);
        }
    }

    #[test]
    fn decoupled_isotropic_gives_identity_lambda() {
        let c = InvariantCoefficients::from_array([1.0, 1.0, 1.0, 1.0, 0., 0., 0., 0., 0., 0.]);
        let dec = decompose(&c).unwrap();
        let g = ground_state(&dec).unwrap();
        assert!((g.lambda - C2::identity()).norm() < 1e-10, "{}", g.lambda);
    }

    #[test]
    fn audit_flags_known_display_failures() {
        // vacuum: position and momentum displays agree, the anticommutator
        // displays produce -1 + i instead of 0
        let g = GaussianState::from_lambda(C2::identity()).unwrap();
        let audit = audit_moment_formulas(&g, 64);
        let by_name = |n: &str| audit.iter().find(|a| a.name == n).unwrap();
        for n in ["x1^2", "x2^2", "x1 x2", "p1^2", "p2^2", "p1 p2", "x1 p2", "x2 p1"] {
            assert!(by_name(n).agree, "{n} should agree at vacuum");
        }
        assert!(!by_name("{x1, p1}").agree);
        assert!(!by_name("{x2, p2}").agree);

        // real Lambda with off-diagonal: the p^2 displays break
        let lam = C2::new(
            C64::new(1.2, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.9, 0.0),
        );
        let g = GaussianState::from_lambda(lam).unwrap();
        let audit = audit_moment_formulas(&g, 64);
        let by_name = |n: &str| audit.iter().find(|a| a.name == n).unwrap();
        assert!(by_name("x1^2").agree);
        assert!(!by_name("p1^2").agree, "p1^2 display wrong for real correlated Lambda");
        // for real Lambda the display overshoots by Lambda11 Lambda12^2 / Delta_r
        let expect_gap =
            g.lambda[(0, 0)].re * g.lambda[(0, 1)].re.powi(2) / g.delta_r;
        let got_gap = by_name("p1^2").displayed.re - by_name("p1^2").reference;
        assert_relative_eq!(got_gap, expect_gap, max_relative = 1e-6);
    }

    #[test]
    fn gauss_hermite_integrates_polynomials() {
        let (z, w) = gauss_hermite(64);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        let m2: f64 = z.iter().zip(&w).map(|(z, w)| w * z * z).sum();
        assert_relative_eq!(m2, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-12);
        let m4: f64 = z.iter().zip(&w).map(|(z, w)| w * z.powi(4)).sum();
        assert_relative_eq!(m4, std::f64::consts::PI.sqrt() * 0.75, epsilon = 1e-11);
    }
}
