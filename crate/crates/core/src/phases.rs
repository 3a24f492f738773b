//! Spectrum of the invariant, stability classification of the frozen
//! Hamiltonian, and the dynamical and geometric phases that complete the
//! Schrodinger solution psi = |n1,n2> e^{i theta}.
//!
//! Sign convention: `dynamical_phase_rate` returns the positive magnitude
//! (2 n1 + 1) sigma_t1 + (2 n2 + 1) sigma_t2. The accumulated dynamical
//! phase integrates the *negative* of the exact <H>, so the static limit
//! reproduces psi  ~ e^{-i E t} for positive-definite H. The two agree for
//! I(t0) = H(t0) at the initial instant; the accumulated phase is checked
//! end to end against truncated-Fock propagation in the acceptance suite.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gaussian::{ground_state, moments, GaussianState, C2};
use crate::invariant::InvariantCoefficients;
use crate::model::{derive_params, DerivedParams, PhysicalParams};
use crate::spectral::{decompose, SpectralDecomposition};
use crate::symplectic::{omega_c, to_c4, R4};

/// One level E = (n1 + 1/2) sigma1 + (n2 + 1/2) sigma2 of the invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub n1: usize,
    pub n2: usize,
    pub e: f64,
}

/// All levels with n1, n2 <= nmax, ascending in E, ties broken by (n1, n2).
pub fn spectrum_from_sigmas(sigma1: f64, sigma2: f64, nmax: usize) -> Result<Vec<SpectrumEntry>> {
    if !(sigma1 > 0.0 && sigma2 > 0.0) {
        return Err(Error::Regime(format!(
            "spectrum needs positive frequencies, got sigma1={sigma1}, sigma2={sigma2}"
        )));
    }
    let mut out = Vec::with_capacity((nmax + 1) * (nmax + 1));
    for n1 in 0..=nmax {
        for n2 in 0..=nmax {
            out.push(SpectrumEntry {
                n1,
                n2,
                e: (n1 as f64 + 0.5) * sigma1 + (n2 as f64 + 0.5) * sigma2,
            });
        }
    }
    out.sort_by(|a, b| {
        a.e.partial_cmp(&b.e)
            .unwrap()
            .then(a.n1.cmp(&b.n1))
            .then(a.n2.cmp(&b.n2))
    });
    Ok(out)
}

pub fn spectrum(dec: &SpectralDecomposition, nmax: usize) -> Result<Vec<SpectrumEntry>> {
    spectrum_from_sigmas(dec.sigma1, dec.sigma2, nmax)
}

/// Stability data of the frozen Hamiltonian at one instant.
///
/// `sigma_t2` is real on the stable side and purely imaginary on the
/// unstable side; the split is the sign of
/// (alpha1 - 4 mu2 nu2^2)(alpha2 - 4 mu1 nu1^2), which reduces to k1 k2.
#[derive(Debug, Clone, Copy)]
pub struct TildeSpectral {
    pub tilde_delta: f64,
    pub tilde_delta_omega: f64,
    /// Discriminant D = tilde_delta^2 - 4 tilde_delta_omega, >= 0.
    pub d: f64,
    pub sigma_t1: f64,
    pub sigma_t2: C64,
    pub stable: bool,
}

/// The exact sign expression deciding stability.
pub fn stability_product(d: &DerivedParams) -> f64 {
    (d.alpha1 - 4.0 * d.mu2 * d.nu2 * d.nu2) * (d.alpha2 - 4.0 * d.mu1 * d.nu1 * d.nu1)
}

fn tilde_closed_forms(d: &DerivedParams) -> (f64, f64, f64) {
    let a = d.alpha1 / (4.0 * d.mu1);
    let b = d.alpha2 / (4.0 * d.mu2);
    let tilde_delta = -a - b - 2.0 * d.nu1 * d.nu2;
    let tilde_delta_omega = d.alpha1 * d.alpha2 / (16.0 * d.mu1 * d.mu2)
        - d.nu2 * d.nu2 * d.alpha2 / (4.0 * d.mu1)
        - d.nu1 * d.nu1 * d.alpha1 / (4.0 * d.mu2)
        + d.nu1 * d.nu1 * d.nu2 * d.nu2;
    let disc = (a - b) * (a - b)
        + (d.alpha1 * d.nu1 + d.alpha2 * d.nu2) * (d.nu1 / d.mu2 + d.nu2 / d.mu1);
    (tilde_delta, tilde_delta_omega, disc)
}

/// Frozen-Hamiltonian normal frequencies at time `t`, computed from the
/// closed forms and cross-checked against the eigenvalues of Omega_c H
/// (equivalently Sigma_y H up to a factor of i; with the display-normalized
/// H the relating constant is one). Instability is a classification, not
/// an error.
pub fn tilde_spectral(p: &PhysicalParams, t: f64) -> Result<TildeSpectral> {
    tilde_spectral_from(&derive_params(p, t)?)
}

pub fn tilde_spectral_from(d: &DerivedParams) -> Result<TildeSpectral> {
    let (tilde_delta, tilde_delta_omega, disc) = tilde_closed_forms(d);
    let scale = (1.0 + tilde_delta.abs()).powi(2);

    // eigenvalue route: w = Omega_c H has eigenvalues +-i sigma_t1, +-i
    // sigma_t2, so tr(w^2) = -2(s1^2 + s2^2) = 2 tilde_delta and
    // det w = tilde_delta_omega. Both identities hold in either regime.
    let w = omega_c() * d.hamiltonian_display();
    let delta_eig = (w * w).trace() / 2.0;
    let domega_eig = w.determinant();
    if (delta_eig - tilde_delta).abs() > 1e-10 * scale
        || (domega_eig - tilde_delta_omega).abs() > 1e-10 * scale
    {
        return Err(Error::Numerical(format!(
            "closed-form/eigenvalue mismatch: delta {tilde_delta} vs {delta_eig}, \
             delta_omega {tilde_delta_omega} vs {domega_eig}"
        )));
    }

    if disc < -1e-12 * scale {
        return Err(Error::Numerical(format!(
            "discriminant D = {disc} negative beyond roundoff"
        )));
    }
    let sqrt_d = disc.max(0.0).sqrt();
    let sq1 = 0.5 * (-tilde_delta + sqrt_d);
    let sq2 = 0.5 * (-tilde_delta - sqrt_d);
    if sq1 < -1e-12 * scale {
        return Err(Error::Regime(format!(
            "sigma_t1^2 = {sq1} < 0: both modes unstable, outside the classification"
        )));
    }
    let stable = stability_product(d) >= 0.0;
    let sigma_t2 = if stable {
        C64::new(sq2.max(0.0).sqrt(), 0.0)
    } else {
        C64::new(0.0, (-sq2).max(0.0).sqrt())
    };
    Ok(TildeSpectral {
        tilde_delta,
        tilde_delta_omega,
        d: disc,
        sigma_t1: sq1.max(0.0).sqrt(),
        sigma_t2,
        stable,
    })
}

/// Displayed dynamical-phase magnitude (2 n1 + 1) sigma_t1 + (2 n2 + 1)
/// sigma_t2 for the frozen Hamiltonian. For the ground level the alternative
/// display sqrt(-tilde_delta + 2 sqrt(tilde_delta_omega)) is evaluated too
/// and must agree to 1e-12.
pub fn dynamical_phase_rate(ts: &TildeSpectral, n1: usize, n2: usize) -> Result<f64> {
    if !ts.stable {
        return Err(Error::Regime(format!(
            "dynamical phase undefined in the unstable regime (sigma_t2 = {:.6e} i)",
            ts.sigma_t2.im
        )));
    }
    let rate = (2 * n1 + 1) as f64 * ts.sigma_t1 + (2 * n2 + 1) as f64 * ts.sigma_t2.re;
    if n1 == 0 && n2 == 0 {
        let alt = (-ts.tilde_delta + 2.0 * ts.tilde_delta_omega.max(0.0).sqrt())
            .max(0.0)
            .sqrt();
        if (alt - rate).abs() > 1e-12 * (1.0 + rate.abs()) {
            return Err(Error::Numerical(format!(
                "ground dynamical rate forms disagree: {rate} vs {alt}"
            )));
        }
    }
    Ok(rate)
}

/// Exact <H> in the invariant eigenstate |n1, n2>. With X = Q zeta for
/// zeta = (a1, a1+, a2, a2+) and M = Q^T H Q, only the number-conserving
/// pairs survive the expectation:
/// <H> = M_12 (2 n1 + 1) + M_34 (2 n2 + 1).
pub fn energy_expectation(
    dec: &SpectralDecomposition,
    h_display: &R4,
    n1: usize,
    n2: usize,
) -> Result<f64> {
    let m = dec.q.transpose() * to_c4(h_display) * dec.q;
    let e = m[(0, 1)] * C64::new((2 * n1 + 1) as f64, 0.0)
        + m[(2, 3)] * C64::new((2 * n2 + 1) as f64, 0.0);
    if e.im.abs() > 1e-9 * (1.0 + e.re.abs()) {
        return Err(Error::Numerical(format!(
            "energy expectation acquired imaginary part {:.3e}",
            e.im
        )));
    }
    Ok(e.re)
}

/// i <0,0| d/dt |0,0> for the Gaussian ground state:
/// (1/2)[dLambda11_i <x1^2> + dLambda22_i <x2^2> + (dLambda12_i +
/// dLambda21_i) <x1 x2>]. The companion real part dN0/N0 - (1/2) Re(...)
/// must cancel by normalization; its residue is the returned error path.
pub fn geometric_phase_rate(g: &GaussianState, lambda_dot: &C2) -> Result<f64> {
    let m = moments(g);
    let (m11, m22, m12) = (m.x1x1, m.x2x2, m.x1x2);
    let ld11 = lambda_dot[(0, 0)];
    let ld22 = lambda_dot[(1, 1)];
    let ld12 = lambda_dot[(0, 1)] + lambda_dot[(1, 0)];

    let rate = 0.5 * (ld11.im * m11 + ld22.im * m22 + ld12.im * m12);

    // dN0/N0 = dDelta_r / (4 Delta_r) by N0 = (Delta_r / pi^2)^(1/4)
    let lr = g.lambda_re();
    let ddelta_r = ld11.re * lr[(1, 1)] + ld22.re * lr[(0, 0)] - 2.0 * lr[(0, 1)] * 0.5 * ld12.re;
    let n0dot_over_n0 = ddelta_r / (4.0 * g.delta_r);
    let defect = n0dot_over_n0 - 0.5 * (ld11.re * m11 + ld22.re * m22 + ld12.re * m12);
    let scale = 1.0 + lambda_dot.norm() * (m11.abs() + m22.abs() + m12.abs());
    if defect.abs() > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "geometric-phase realness defect {defect:.3e}; state not normalized along flow"
        )));
    }
    Ok(rate)
}

/// Accumulated phases of the level (n1, n2) along an invariant trajectory.
/// theta = theta_g + theta_d; both stored unwrapped from theta(t0) = 0.
#[derive(Debug, Clone)]
pub struct PhaseTrajectory {
    pub n1: usize,
    pub n2: usize,
    pub times: Vec<f64>,
    /// E_{n1,n2}(t) from the invariant's frequencies at each sample
    /// (constant along an exact invariant flow).
    pub e: Vec<f64>,
    pub theta_d: Vec<f64>,
    pub theta_g: Vec<f64>,
    /// Ground-state exponent matrix and normalization at each sample.
    pub lambda: Vec<C2>,
    pub n0: Vec<f64>,
}

/// Labeled Schrodinger solution psi = |n1,n2> e^{i theta} at one sample.
#[derive(Debug, Clone)]
pub struct TdseSolution {
    pub n1: usize,
    pub n2: usize,
    pub t: f64,
    pub e: f64,
    pub theta_g: f64,
    pub theta_d: f64,
    pub theta: f64,
    pub lambda: C2,
    pub n0: f64,
}

/// Nonuniform three-point derivative at the middle node.
fn fd3(h1: f64, h2: f64, fm: C64, f0: C64, fp: C64) -> C64 {
    let cm = -h2 / (h1 * (h1 + h2));
    let c0 = (h2 - h1) / (h1 * h2);
    let cp = h1 / (h2 * (h1 + h2));
    fm * C64::new(cm, 0.0) + f0 * C64::new(c0, 0.0) + fp * C64::new(cp, 0.0)
}

fn lambda_dot_samples(times: &[f64], lambdas: &[C2]) -> Vec<C2> {
    let n = times.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut dl = C2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                dl[(r, c)] = if i == 0 {
                    (lambdas[1][(r, c)] - lambdas[0][(r, c)]) / C64::new(times[1] - times[0], 0.0)
                } else if i == n - 1 {
                    (lambdas[n - 1][(r, c)] - lambdas[n - 2][(r, c)])
                        / C64::new(times[n - 1] - times[n - 2], 0.0)
                } else {
                    fd3(
                        times[i] - times[i - 1],
                        times[i + 1] - times[i],
                        lambdas[i - 1][(r, c)],
                        lambdas[i][(r, c)],
                        lambdas[i + 1][(r, c)],
                    )
                };
            }
        }
        out.push(dl);
    }
    out
}

/// Integrate the dynamical and geometric phases of level (n1, n2) along a
/// sampled invariant trajectory. The dynamical rate is the exact -<H(t)>;
/// the geometric rate uses finite differences of Lambda between samples.
///
/// The geometric closed form exists for the ground level only; for excited
/// levels the trajectory must be static (then theta_g = 0 exactly).
pub fn phase_trajectory(
    p: &PhysicalParams,
    samples: &[(f64, InvariantCoefficients)],
    n1: usize,
    n2: usize,
) -> Result<PhaseTrajectory> {
    if samples.len() < 2 {
        return Err(Error::Config("phase trajectory needs >= 2 samples".into()));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Config(
            "phase trajectory sample times must be strictly increasing".into(),
        ));
    }
    let n = samples.len();
    let times: Vec<f64> = samples.iter().map(|s| s.0).collect();

    let mut e = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    let mut n0s = Vec::with_capacity(n);
    let mut d_rates = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    for (t, c) in samples {
        let dec = decompose(c)?;
        let g = ground_state(&dec)?;
        let h = derive_params(p, *t)?.hamiltonian_display();
        e.push((n1 as f64 + 0.5) * dec.sigma1 + (n2 as f64 + 0.5) * dec.sigma2);
        d_rates.push(-energy_expectation(&dec, &h, n1, n2)?);
        lambdas.push(g.lambda);
        n0s.push(g.n0);
        states.push(g);
    }

    let ldots = lambda_dot_samples(&times, &lambdas);
    let lscale: f64 = lambdas.iter().map(|l| l.norm()).fold(1.0, f64::max);
    if (n1, n2) != (0, 0) {
        let drift = ldots.iter().map(|l| l.norm()).fold(0.0, f64::max);
        if drift > 1e-9 * lscale {
            return Err(Error::Config(format!(
                "geometric phase is closed-form for the ground level only; \
                 level ({n1},{n2}) requested on a driven trajectory (|dLambda/dt| = {drift:.3e})"
            )));
        }
    }
    let mut g_rates = Vec::with_capacity(n);
    for (g, ld) in states.iter().zip(&ldots) {
        g_rates.push(geometric_phase_rate(g, ld)?);
    }

    let trapezoid = |rates: &[f64]| -> Vec<f64> {
        let mut acc = Vec::with_capacity(n);
        acc.push(0.0);
        for i in 1..n {
            let dt = times[i] - times[i - 1];
            let prev = acc[i - 1];
            acc.push(prev + 0.5 * dt * (rates[i - 1] + rates[i]));
        }
        acc
    };

    let theta_d = trapezoid(&d_rates);
    let theta_g = trapezoid(&g_rates);
    Ok(PhaseTrajectory {
        n1,
        n2,
        times,
        e,
        theta_d,
        theta_g,
        lambda: lambdas,
        n0: n0s,
    })
}

/// The labeled solution record at a sampled time of the trajectory.
pub fn tdse_solution(traj: &PhaseTrajectory, t: f64) -> Result<TdseSolution> {
    let tol = 1e-9 * (1.0 + t.abs());
    let idx = traj
        .times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .ok_or_else(|| Error::Config(format!("t = {t} is not a sample of the trajectory")))?;
    Ok(TdseSolution {
        n1: traj.n1,
        n2: traj.n2,
        t: traj.times[idx],
        e: traj.e[idx],
        theta_g: traj.theta_g[idx],
        theta_d: traj.theta_d[idx],
        theta: traj.theta_g[idx] + traj.theta_d[idx],
        lambda: traj.lambda[idx],
        n0: traj.n0[idx],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::overlap;
    use crate::invariant::{default_initial, integrate};
    use crate::model::Schedule;
    use crate::ode::IntegratorOptions;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_params(e: f64) -> PhysicalParams {
        PhysicalParams {
            mu1: Schedule::constant(1.0),
            mu2: Schedule::constant(1.0),
            k1: Schedule::constant(1.0),
            k2: Schedule::constant(1.0),
            alpha01: Schedule::constant(1.0),
            alpha02: Schedule::constant(1.0),
            e,
        }
    }

    fn random_params(rng: &mut ChaCha8Rng) -> PhysicalParams {
        PhysicalParams {
            mu1: Schedule::constant(rng.random_range(0.3..3.0)),
            mu2: Schedule::constant(rng.random_range(0.3..3.0)),
            k1: Schedule::constant(rng.random_range(0.1..4.0)),
            k2: Schedule::constant(rng.random_range(0.1..4.0)),
            alpha01: Schedule::constant(rng.random_range(-2.0..2.0)),
            alpha02: Schedule::constant(rng.random_range(-2.0..2.0)),
            e: rng.random_range(0.2..2.0),
        }
    }

    #[test]
    fn spectrum_examples_and_ordering() {
        let s = spectrum_from_sigmas(0.5, 0.5, 1).unwrap();
        let es: Vec<f64> = s.iter().map(|x| x.e).collect();
        assert_eq!(es, vec![0.5, 1.0, 1.0, 1.5]);
        // lexicographic tie-break puts (0,1) before (1,0)
        assert_eq!((s[1].n1, s[1].n2), (0, 1));
        assert_eq!((s[2].n1, s[2].n2), (1, 0));

        let s = spectrum_from_sigmas(1.0, 1.0 / 3.0, 0).unwrap();
        assert_eq!(s.len(), 1);
        assert_relative_eq!(s[0].e, 2.0 / 3.0, max_relative = 1e-15);

        assert!(spectrum_from_sigmas(-1.0, 1.0, 0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dec = decompose(&crate::testutil::random_invariant(&mut rng)).unwrap();
        let sp = spectrum(&dec, 3).unwrap();
        assert_eq!(sp.len(), 16);
        assert!(sp.windows(2).all(|w| w[0].e <= w[1].e + 1e-15));
        assert_relative_eq!(
            sp[0].e,
            0.5 * (dec.sigma1 + dec.sigma2),
            max_relative = 1e-14
        );
    }

    #[test]
    fn tilde_unit_parameters_match_hand_values() {
        let ts = tilde_spectral(&unit_params(0.0), 0.0).unwrap();
        assert_relative_eq!(ts.tilde_delta, -0.5, max_relative = 1e-15);
        assert_relative_eq!(ts.tilde_delta_omega, 1.0 / 16.0, max_relative = 1e-15);
        assert!(ts.d.abs() < 1e-15);
        assert_relative_eq!(ts.sigma_t1, 0.5, max_relative = 1e-12);
        assert_relative_eq!(ts.sigma_t2.re, 0.5, max_relative = 1e-12);
        assert!(ts.stable);
    }

    #[test]
    fn tilde_matches_dense_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let d = derive_params(&p, 0.0).unwrap();
            let ts = tilde_spectral_from(&d).unwrap();
            assert!(ts.stable, "k1, k2 > 0 draws are stable");
            // eigenvalues of Omega_c H are +-i sigma_tj
            let w = omega_c() * d.hamiltonian_display();
            let mut ims: Vec<f64> = w.complex_eigenvalues().iter().map(|l| l.im.abs()).collect();
            for l in w.complex_eigenvalues().iter() {
                assert!(l.re.abs() < 1e-8 * (1.0 + ts.sigma_t1));
            }
            ims.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert_relative_eq!(ims[0], ts.sigma_t1, max_relative = 1e-8);
            assert_relative_eq!(ims[3], ts.sigma_t2.re, max_relative = 1e-8);
        }
    }

    #[test]
    fn isotropic_field_always_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let mu = rng.random_range(0.2..4.0);
            let k = rng.random_range(0.0..5.0);
            let a0 = rng.random_range(-3.0..3.0);
            let p = PhysicalParams {
                mu1: Schedule::constant(mu),
                mu2: Schedule::constant(mu),
                k1: Schedule::constant(k),
                k2: Schedule::constant(k),
                alpha01: Schedule::constant(a0),
                alpha02: Schedule::constant(a0),
                e: rng.random_range(0.0..3.0),
            };
            assert!(tilde_spectral(&p, 0.0).unwrap().stable);
        }
    }

    #[test]
    fn stability_flips_with_spring_sign() {
        let mut p = unit_params(1.0);
        p.k2 = Schedule::constant(-0.4);
        let d = derive_params(&p, 0.0).unwrap();
        assert!(stability_product(&d) < 0.0);
        let ts = tilde_spectral(&p, 0.0).unwrap();
        assert!(!ts.stable);
        assert_eq!(ts.sigma_t2.re, 0.0);
        assert!(ts.sigma_t2.im > 0.0);
        assert!(dynamical_phase_rate(&ts, 0, 0).is_err());

        // boundary k2 = 0 sits on the stable side of the split
        p.k2 = Schedule::constant(0.0);
        let ts = tilde_spectral(&p, 0.0).unwrap();
        assert!(ts.stable);
        assert!(ts.sigma_t2.re.abs() < 1e-7);
    }

    #[test]
    fn dynamical_rate_examples_and_identity() {
        let ts = tilde_spectral(&unit_params(0.0), 0.0).unwrap();
        assert_relative_eq!(dynamical_phase_rate(&ts, 0, 0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(dynamical_phase_rate(&ts, 1, 0).unwrap(), 2.0, max_relative = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let p = random_params(&mut rng);
            let ts = tilde_spectral(&p, 0.0).unwrap();
            let s_sum = ts.sigma_t1 + ts.sigma_t2.re;
            let rhs = -ts.tilde_delta + 2.0 * ts.tilde_delta_omega.max(0.0).sqrt();
            assert!(
                (s_sum * s_sum - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()),
                "(s1+s2)^2 = {} vs -delta + 2 sqrt(delta_omega) = {}",
                s_sum * s_sum,
                rhs
            );
            // ground rate agrees with the alternative display inside the op
            dynamical_phase_rate(&ts, 0, 0).unwrap();
        }
    }

    #[test]
    fn energy_expectation_matches_spectrum_when_invariant_is_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..20 {
            let p = random_params(&mut rng);
            let c = default_initial(&p, 0.0).unwrap();
            let dec = decompose(&c).unwrap();
            let h = derive_params(&p, 0.0).unwrap().hamiltonian_display();
            let ts = tilde_spectral(&p, 0.0).unwrap();
            for (n1, n2) in [(0, 0), (1, 0), (0, 1), (2, 3)] {
                let e_exact = energy_expectation(&dec, &h, n1, n2).unwrap();
                let e_spec = (n1 as f64 + 0.5) * dec.sigma1 + (n2 as f64 + 0.5) * dec.sigma2;
                let e_tilde = dynamical_phase_rate(&ts, n1, n2).unwrap();
                assert_relative_eq!(e_exact, e_spec, max_relative = 1e-9);
                assert_relative_eq!(e_exact, e_tilde, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn geometric_rate_hand_value_and_static_zero() {
        let g = GaussianState::from_lambda(C2::identity()).unwrap();
        // dLambda/dt = i e11: rate = (1/2) <x1^2> = 1/4
        let mut ld = C2::zeros();
        ld[(0, 0)] = C64::new(0.0, 1.0);
        assert_relative_eq!(geometric_phase_rate(&g, &ld).unwrap(), 0.25, max_relative = 1e-14);
        assert_eq!(geometric_phase_rate(&g, &C2::zeros()).unwrap(), 0.0);
    }

    #[test]
    fn static_trajectory_accumulates_minus_e_t() {
        let p = unit_params(0.8);
        let c0 = default_initial(&p, 0.0).unwrap();
        let t1 = 3.0;
        let samples: Vec<f64> = (0..=60).map(|i| t1 * i as f64 / 60.0).collect();
        let traj = integrate(&c0, &p, 0.0, t1, &samples, &IntegratorOptions::default()).unwrap();

        for (n1, n2) in [(0, 0), (1, 2)] {
            let pt = phase_trajectory(&p, &traj, n1, n2).unwrap();
            let sol0 = tdse_solution(&pt, 0.0).unwrap();
            assert_eq!(sol0.theta, 0.0);
            let sol = tdse_solution(&pt, t1).unwrap();
            let dec = decompose(&c0).unwrap();
            let h = derive_params(&p, 0.0).unwrap().hamiltonian_display();
            let e = energy_expectation(&dec, &h, n1, n2).unwrap();
            assert_relative_eq!(sol.theta_d, -e * t1, max_relative = 1e-7);
            assert!(sol.theta_g.abs() < 1e-9);
            assert_relative_eq!(sol.theta, sol.theta_g + sol.theta_d, max_relative = 1e-14);
        }
        assert!(tdse_solution(&phase_trajectory(&p, &traj, 0, 0).unwrap(), 0.123).is_err());
    }

    #[test]
    fn excited_level_rejected_on_driven_trajectory() {
        let mut p = unit_params(1.0);
        p.k1 = Schedule::Sinusoid {
            offset: 1.0,
            amplitude: 0.3,
            frequency: 0.05,
            phase: 0.0,
        };
        let c0 = default_initial(&p, 0.0).unwrap();
        let samples: Vec<f64> = (0..=40).map(|i| 2.0 * i as f64 / 40.0).collect();
        let traj = integrate(&c0, &p, 0.0, 2.0, &samples, &IntegratorOptions::default()).unwrap();
        assert!(phase_trajectory(&p, &traj, 0, 0).is_ok());
        match phase_trajectory(&p, &traj, 1, 0) {
            Err(Error::Config(_)) => {}
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn geometric_phase_matches_overlap_product_oracle() {
        // slow drive of the spring constants and the field
        let p = PhysicalParams {
            mu1: Schedule::constant(1.0),
            mu2: Schedule::constant(1.2),
            k1: Schedule::Sinusoid {
                offset: 1.5,
                amplitude: 0.4,
                frequency: 0.02,
                phase: 0.0,
            },
            k2: Schedule::constant(2.0),
            alpha01: Schedule::Sinusoid {
                offset: 0.8,
                amplitude: 0.3,
                frequency: 0.02,
                phase: 1.0,
            },
            alpha02: Schedule::constant(0.5),
            e: 1.0,
        };
        let c0 = default_initial(&p, 0.0).unwrap();
        let t1 = 10.0;
        let n = 2000;
        let samples: Vec<f64> = (0..=n).map(|i| t1 * i as f64 / n as f64).collect();
        let traj = integrate(&c0, &p, 0.0, t1, &samples, &IntegratorOptions::default()).unwrap();
        let pt = phase_trajectory(&p, &traj, 0, 0).unwrap();

        // discretized Berry phase: theta_g = -sum arg <psi_k | psi_k+1>
        let states: Vec<GaussianState> = pt
            .lambda
            .iter()
            .map(|l| GaussianState::from_lambda(*l).unwrap())
            .collect();
        let mut berry = 0.0;
        for w in states.windows(2) {
            berry -= overlap(&w[0], &w[1]).arg();
        }
        let total = *pt.theta_g.last().unwrap();
        assert!(
            (total - berry).abs() < 1e-5 * (1.0 + total.abs()),
            "rate integral {total} vs overlap product {berry}"
        );
        // the geometric piece is genuinely nonzero on this drive
        assert!(total.abs() > 1e-4);
    }
}
