//! Physical model: time-dependent parameters, the quadratic Hamiltonian
//! matrix, and the noncommutative-space (Bopp shift) equivalence.
//!
//! Units: hbar = c = 1. Coordinate ordering (x1, p1, x2, p2).
//!
//! Convention note (this is the factor-2 trap of the whole problem):
//! `hamiltonian_matrix` returns the display matrix H with entries
//! alpha_j/2, 1/(2 mu_j), +-nu_j. The physical Hamiltonian operator is
//! H_op = X^T H X, *without* a 1/2 prefactor. Code that works in the
//! "operator of a quadratic form" convention op(F) = (1/2) X^T F X must
//! therefore pass 2H; `hamiltonian_form` does exactly that.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::R4;

/// A scalar schedule t -> value. Analytic variants are exact; tabulated
/// schedules interpolate with a C1 Catmull-Rom cubic.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Schedule {
    Constant {
        value: f64,
    },
    /// coeffs[0] + coeffs[1] t + coeffs[2] t^2 + ...
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// offset + amplitude * sin(2 pi frequency t + phase)
    Sinusoid {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// offset + amplitude * exp(rate t)
    Exponential {
        offset: f64,
        amplitude: f64,
        rate: f64,
    },
    /// Catmull-Rom cubic through (times[i], values[i]); clamped outside.
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            Schedule::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (2.0 * std::f64::consts::PI * frequency * t + phase).sin(),
            Schedule::Exponential {
                offset,
                amplitude,
                rate,
            } => offset + amplitude * (rate * t).exp(),
            Schedule::Table { times, values } => catmull_rom(times, values, t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::Table { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::Config(
                        "table schedule: times and values length mismatch".into(),
                    ));
                }
                if times.len() < 2 {
                    return Err(Error::Config("table schedule needs >= 2 points".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config(
                        "table schedule times must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            Schedule::Polynomial { coeffs } if coeffs.is_empty() => {
                Err(Error::Config("polynomial schedule needs coefficients".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Centripetal-free uniform Catmull-Rom interpolation with clamped ends.
fn catmull_rom(ts: &[f64], vs: &[f64], t: f64) -> f64 {
    let n = ts.len();
    if t <= ts[0] {
        return vs[0];
    }
    if t >= ts[n - 1] {
        return vs[n - 1];
    }
    let k = ts.partition_point(|&x| x <= t) - 1;
    let k = k.min(n - 2);
    let (t0, t1) = (ts[k], ts[k + 1]);
    let h = t1 - t0;
    let s = (t - t0) / h;
    let p1 = vs[k];
    let p2 = vs[k + 1];
    // one-sided tangents at the ends, centered inside
    let m1 = if k == 0 {
        (vs[1] - vs[0]) / (ts[1] - ts[0])
    } else {
        (vs[k + 1] - vs[k - 1]) / (ts[k + 1] - ts[k - 1])
    } * h;
    let m2 = if k + 2 >= n {
        (vs[n - 1] - vs[n - 2]) / (ts[n - 1] - ts[n - 2])
    } else {
        (vs[k + 2] - vs[k]) / (ts[k + 2] - ts[k])
    } * h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * p1
        + (s3 - 2.0 * s2 + s) * m1
        + (-2.0 * s3 + 3.0 * s2) * p2
        + (s3 - s2) * m2
}

/// Time-dependent parameters of the commutative-space Hamiltonian: effective
/// masses mu_j(t), oscillator constants k_j(t), field strengths alpha_0j(t),
/// and the (constant) charge e.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhysicalParams {
    pub mu1: Schedule,
    pub mu2: Schedule,
    pub k1: Schedule,
    pub k2: Schedule,
    pub alpha01: Schedule,
    pub alpha02: Schedule,
    pub e: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("mu1", &self.mu1),
            ("mu2", &self.mu2),
            ("k1", &self.k1),
            ("k2", &self.k2),
            ("alpha01", &self.alpha01),
            ("alpha02", &self.alpha02),
        ] {
            s.validate()
                .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        Ok(())
    }
}

/// Snapshot of all schedule values and the derived couplings at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub mu1: f64,
    pub mu2: f64,
    pub k1: f64,
    pub k2: f64,
    pub alpha01: f64,
    pub alpha02: f64,
    pub e: f64,
    /// nu_j = e alpha_0j / (2 mu_j)
    pub nu1: f64,
    pub nu2: f64,
    /// alpha_1 = k_1 + 4 mu_2 nu_2^2, alpha_2 = k_2 + 4 mu_1 nu_1^2
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Evaluate schedules at `t` and fold in the diamagnetic contributions.
pub fn derive_params(p: &PhysicalParams, t: f64) -> Result<DerivedParams> {
    let mu1 = p.mu1.eval(t);
    let mu2 = p.mu2.eval(t);
    if mu1 <= 0.0 || mu2 <= 0.0 {
        return Err(Error::Regime(format!(
            "effective masses must be positive, got mu1={mu1}, mu2={mu2} at t={t}"
        )));
    }
    let k1 = p.k1.eval(t);
    let k2 = p.k2.eval(t);
    let alpha01 = p.alpha01.eval(t);
    let alpha02 = p.alpha02.eval(t);
    let e = p.e;
    let nu1 = e * alpha01 / (2.0 * mu1);
    let nu2 = e * alpha02 / (2.0 * mu2);
    let alpha1 = k1 + 4.0 * mu2 * nu2 * nu2;
    let alpha2 = k2 + 4.0 * mu1 * nu1 * nu1;
    Ok(DerivedParams {
        mu1,
        mu2,
        k1,
        k2,
        alpha01,
        alpha02,
        e,
        nu1,
        nu2,
        alpha1,
        alpha2,
    })
}

impl DerivedParams {
    /// The display matrix H: H_op = X^T H X.
    pub fn hamiltonian_display(&self) -> R4 {
        let d = self;
        R4::new(
            d.alpha1 / 2.0,
            0.0,
            0.0,
            -d.nu2,
            0.0,
            1.0 / (2.0 * d.mu1),
            d.nu1,
            0.0,
            0.0,
            d.nu1,
            d.alpha2 / 2.0,
            0.0,
            -d.nu2,
            0.0,
            0.0,
            1.0 / (2.0 * d.mu2),
        )
    }
}

/// Display-convention Hamiltonian matrix at time `t`: H_op = X^T H X.
pub fn hamiltonian_matrix(p: &PhysicalParams, t: f64) -> Result<R4> {
    Ok(derive_params(p, t)?.hamiltonian_display())
}

/// Quadratic form F with H_op = (1/2) X^T F X, i.e. twice the display matrix.
pub fn hamiltonian_form(p: &PhysicalParams, t: f64) -> Result<R4> {
    Ok(2.0 * hamiltonian_matrix(p, t)?)
}

/// Noncommutative-space oscillator parameters. theta (position-position NC)
/// and eta (momentum-momentum NC) are constants; masses and frequencies may
/// be time dependent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NCParams {
    pub m1: Schedule,
    pub m2: Schedule,
    pub omega1: Schedule,
    pub omega2: Schedule,
    pub theta: f64,
    pub eta: f64,
}

impl NCParams {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("m1", &self.m1),
            ("m2", &self.m2),
            ("omega1", &self.omega1),
            ("omega2", &self.omega2),
        ] {
            s.validate()
                .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        Ok(())
    }

    /// Effective Planck constant hbar_e = 1 + theta eta / 4.
    pub fn hbar_e(&self) -> f64 {
        1.0 + self.theta * self.eta / 4.0
    }
}

/// The Bopp shift as a linear map on (x1, p1, x2, p2): rows give
/// (X~1, P~1, X~2, P~2) in terms of the canonical column.
pub fn bopp_shift_map(nc: &NCParams) -> R4 {
    let th = nc.theta;
    let et = nc.eta;
    R4::new(
        1.0,
        0.0,
        0.0,
        -th / 2.0,
        0.0,
        1.0,
        et / 2.0,
        0.0,
        0.0,
        th / 2.0,
        1.0,
        0.0,
        -et / 2.0,
        0.0,
        0.0,
        1.0,
    )
}

/// Constant-parameter snapshot of the equivalent commutative model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSnapshot {
    pub mu1: f64,
    pub mu2: f64,
    pub k1: f64,
    pub k2: f64,
    pub alpha01: f64,
    pub alpha02: f64,
    pub e: f64,
}

impl PhysicalSnapshot {
    /// Promote to constant schedules, so NC configs drive the same pipeline.
    pub fn into_params(self) -> PhysicalParams {
        PhysicalParams {
            mu1: Schedule::constant(self.mu1),
            mu2: Schedule::constant(self.mu2),
            k1: Schedule::constant(self.k1),
            k2: Schedule::constant(self.k2),
            alpha01: Schedule::constant(self.alpha01),
            alpha02: Schedule::constant(self.alpha02),
            e: self.e,
        }
    }
}

/// Map NC parameters at time `t` to the equivalent magnetic-field model
/// (charge fixed to 1):
///
///   1/mu_1 = 1/m_1 + m_2 w2^2 theta^2 / 4      alpha_1 = m_1 w1^2 + eta^2/(4 m_2)
///   1/mu_2 = 1/m_2 + m_1 w1^2 theta^2 / 4      alpha_2 = m_2 w2^2 + eta^2/(4 m_1)
///   nu_1 = (eta + m_1 m_2 w2^2 theta)/(4 m_1)  nu_2 = (eta + m_1 m_2 w1^2 theta)/(4 m_2)
///
/// then alpha_0j = 2 mu_j nu_j and k_j = alpha_j - 4 mu_{3-j} nu_{3-j}^2.
/// The identification is validated against M^T G M with M the Bopp map in
/// the test suite.
pub fn nc_to_physical(nc: &NCParams, t: f64) -> Result<PhysicalSnapshot> {
    let m1 = nc.m1.eval(t);
    let m2 = nc.m2.eval(t);
    if m1 <= 0.0 || m2 <= 0.0 {
        return Err(Error::Regime(format!(
            "NC masses must be positive, got m1={m1}, m2={m2} at t={t}"
        )));
    }
    let w1sq = nc.omega1.eval(t).powi(2);
    let w2sq = nc.omega2.eval(t).powi(2);
    let th = nc.theta;
    let et = nc.eta;

    let mu1 = 1.0 / (1.0 / m1 + m2 * w2sq * th * th / 4.0);
    let mu2 = 1.0 / (1.0 / m2 + m1 * w1sq * th * th / 4.0);
    let alpha1 = m1 * w1sq + et * et / (4.0 * m2);
    let alpha2 = m2 * w2sq + et * et / (4.0 * m1);
    let nu1 = (et + m1 * m2 * w2sq * th) / (4.0 * m1);
    let nu2 = (et + m1 * m2 * w1sq * th) / (4.0 * m2);

    let e = 1.0;
    let alpha01 = 2.0 * mu1 * nu1 / e;
    let alpha02 = 2.0 * mu2 * nu2 / e;
    let k1 = alpha1 - 4.0 * mu2 * nu2 * nu2;
    let k2 = alpha2 - 4.0 * mu1 * nu1 * nu1;

    Ok(PhysicalSnapshot {
        mu1,
        mu2,
        k1,
        k2,
        alpha01,
        alpha02,
        e,
    })
}

/// The NC Hamiltonian's quadratic matrix in the canonical column, computed
/// the direct way: M^T G M with G = diag(m1 w1^2/2, 1/(2 m1), m2 w2^2/2,
/// 1/(2 m2)) the display matrix of H_nc in the NC column. Oracle for
/// `nc_to_physical`.
pub fn nc_hamiltonian_display(nc: &NCParams, t: f64) -> Result<R4> {
    let m1 = nc.m1.eval(t);
    let m2 = nc.m2.eval(t);
    if m1 <= 0.0 || m2 <= 0.0 {
        return Err(Error::Regime("NC masses must be positive".into()));
    }
    let w1sq = nc.omega1.eval(t).powi(2);
    let w2sq = nc.omega2.eval(t).powi(2);
    let g = R4::from_diagonal(&nalgebra::Vector4::new(
        m1 * w1sq / 2.0,
        1.0 / (2.0 * m1),
        m2 * w2sq / 2.0,
        1.0 / (2.0 * m2),
    ));
    let m = bopp_shift_map(nc);
    Ok(m.transpose() * g * m)
}
