//! Run configuration: a single TOML document with named sections. Exactly
//! one parameter block (physical or noncommutative) drives the pipeline.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::invariant::InvariantCoefficients;
use crate::model::{nc_to_physical, NCParams, PhysicalParams, Schedule};
use crate::ode::IntegratorOptions;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noncommutative: Option<NCParams>,
    pub time: TimeDomain,
    #[serde(default)]
    pub initial: InitialInvariant,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub outputs: OutputRequests,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeDomain {
    pub t0: f64,
    pub t1: f64,
    /// Number of report samples including both endpoints.
    pub samples: usize,
}

impl TimeDomain {
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| self.t0 + (self.t1 - self.t0) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Initial invariant: the Hamiltonian at t0, or ten explicit coefficients
/// in the order (u11, u22, v11, v22, w11, w22, u12, v12, w21, w12).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialInvariant {
    #[default]
    HamiltonianAtT0,
    Explicit {
        coefficients: [f64; 10],
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let d = IntegratorOptions::default();
        IntegratorConfig {
            rtol: d.rtol,
            atol: d.atol,
            max_step: None,
        }
    }
}

impl IntegratorConfig {
    pub fn options(&self) -> IntegratorOptions {
        let mut o = IntegratorOptions {
            rtol: self.rtol,
            atol: self.atol,
            ..IntegratorOptions::default()
        };
        if let Some(h) = self.max_step {
            o.max_step = h;
        }
        o
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputRequests {
    /// Highest quantum number per mode in the spectrum table.
    pub spectrum_nmax: usize,
    /// Levels (n1, n2) whose phases are integrated.
    pub phase_levels: Vec<(usize, usize)>,
    /// Emit the ground-state separability table.
    pub separability: bool,
}

impl Default for OutputRequests {
    fn default() -> Self {
        OutputRequests {
            spectrum_nmax: 3,
            phase_levels: vec![(0, 0)],
            separability: true,
        }
    }
}

/// One axis of a 2-D sweep: a named scalar parameter replaced by a
/// uniformly spaced constant on [start, stop].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    /// Evaluation time for the frozen-Hamiltonian scan.
    #[serde(default)]
    pub t: f64,
    pub rows: SweepAxis,
    pub cols: SweepAxis,
}

const PHYSICAL_AXES: [&str; 7] = ["mu1", "mu2", "k1", "k2", "alpha01", "alpha02", "e"];
const NC_AXES: [&str; 6] = ["m1", "m2", "omega1", "omega2", "theta", "eta"];

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(s).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("config serialize: {e}")))
    }

    /// SHA-256 of the canonical re-serialization, so equivalent documents
    /// hash identically regardless of formatting.
    pub fn sha256(&self) -> Result<String> {
        let canon = self.to_toml_string()?;
        let mut h = Sha256::new();
        h.update(canon.as_bytes());
        let digest = h.finalize();
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.physical, &self.noncommutative) {
            (Some(p), None) => p.validate()?,
            (None, Some(nc)) => nc.validate()?,
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either [physical] or [noncommutative], not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "one parameter block required: [physical] or [noncommutative]".into(),
                ))
            }
        }
        if !(self.time.t0 < self.time.t1) {
            return Err(Error::Config(format!(
                "time domain needs t0 < t1, got [{}, {}]",
                self.time.t0, self.time.t1
            )));
        }
        if self.time.samples < 2 {
            return Err(Error::Config("time.samples must be >= 2".into()));
        }
        if let InitialInvariant::Explicit { coefficients } = &self.initial {
            if coefficients.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(
                    "explicit initial coefficients must be finite".into(),
                ));
            }
        }
        if !(self.integrator.rtol > 0.0 && self.integrator.atol > 0.0) {
            return Err(Error::Config("integrator tolerances must be positive".into()));
        }
        if let Some(sw) = &self.sweep {
            let axes: &[&str] = if self.physical.is_some() {
                &PHYSICAL_AXES
            } else {
                &NC_AXES
            };
            for ax in [&sw.rows, &sw.cols] {
                if !axes.contains(&ax.parameter.as_str()) {
                    return Err(Error::Config(format!(
                        "unknown sweep parameter '{}'; expected one of {:?}",
                        ax.parameter, axes
                    )));
                }
                if ax.count == 0 {
                    return Err(Error::Config("sweep axis count must be >= 1".into()));
                }
            }
            if sw.rows.count.saturating_mul(sw.cols.count) > 1_000_000 {
                return Err(Error::Config("sweep grid exceeds 10^6 points".into()));
            }
        }
        Ok(())
    }

    /// The physical parameters that drive the pipeline. NC blocks translate
    /// through the Bopp-shift equivalence; that map is evaluated pointwise
    /// in time, so NC schedules must be constant here (time-dependent NC
    /// data has no single equivalent schedule set).
    pub fn effective_physical(&self) -> Result<PhysicalParams> {
        if let Some(p) = &self.physical {
            return Ok(p.clone());
        }
        let nc = self.noncommutative.as_ref().expect("validated");
        for (name, s) in [
            ("m1", &nc.m1),
            ("m2", &nc.m2),
            ("omega1", &nc.omega1),
            ("omega2", &nc.omega2),
        ] {
            if !matches!(s, Schedule::Constant { .. }) {
                return Err(Error::Config(format!(
                    "noncommutative solve supports constant schedules only; {name} is not"
                )));
            }
        }
        Ok(nc_to_physical(nc, self.time.t0)?.into_params())
    }

    pub fn initial_coefficients(&self, p: &PhysicalParams) -> Result<InvariantCoefficients> {
        match &self.initial {
            InitialInvariant::HamiltonianAtT0 => crate::invariant::default_initial(p, self.time.t0),
            InitialInvariant::Explicit { coefficients } => {
                Ok(InvariantCoefficients::from_array(*coefficients))
            }
        }
    }

    /// Apply one sweep-axis value, replacing the named scalar with a
    /// constant.
    pub fn apply_axis(&self, cfg: &mut RunConfig, parameter: &str, value: f64) -> Result<()> {
        let _ = self;
        if let Some(p) = cfg.physical.as_mut() {
            match parameter {
                "mu1" => p.mu1 = Schedule::constant(value),
                "mu2" => p.mu2 = Schedule::constant(value),
                "k1" => p.k1 = Schedule::constant(value),
                "k2" => p.k2 = Schedule::constant(value),
                "alpha01" => p.alpha01 = Schedule::constant(value),
                "alpha02" => p.alpha02 = Schedule::constant(value),
                "e" => p.e = value,
                other => return Err(Error::Config(format!("unknown physical axis '{other}'"))),
            }
            return Ok(());
        }
        if let Some(nc) = cfg.noncommutative.as_mut() {
            match parameter {
                "m1" => nc.m1 = Schedule::constant(value),
                "m2" => nc.m2 = Schedule::constant(value),
                "omega1" => nc.omega1 = Schedule::constant(value),
                "omega2" => nc.omega2 = Schedule::constant(value),
                "theta" => nc.theta = value,
                "eta" => nc.eta = value,
                other => return Err(Error::Config(format!("unknown NC axis '{other}'"))),
            }
            return Ok(());
        }
        Err(Error::Config("no parameter block to sweep".into()))
    }
}
