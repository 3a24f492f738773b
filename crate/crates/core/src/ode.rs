//! Adaptive Dormand-Prince 5(4) integrator over fixed-size real state.
//!
//! Small, self-contained, and tuned for the smooth linear systems in this
//! crate; sample times are hit exactly by clamping the step, so no
//! interpolation error enters the reported states.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    /// Relative tolerance of the embedded error estimate.
    pub rtol: f64,
    /// Absolute tolerance floor.
    pub atol: f64,
    /// Cap on the step magnitude; defaults to the full interval.
    pub max_step: f64,
    /// Abort threshold on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

fn axpyn<const N: usize>(out: &mut [f64; N], h: f64, ks: &[([f64; N], f64)], y: &[f64; N]) {
    for i in 0..N {
        let mut acc = 0.0;
        for (k, c) in ks {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrate dy/dt = f(t, y) from t0 toward t1 (either direction),
/// returning the state at each requested sample time. `samples` must be
/// monotone from t0 to t1 inclusive of any interior points; t0 and t1 are
/// implicit bounds and need not be listed.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    samples: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<(f64, [f64; N])>> {
    if !(t1 - t0).is_finite() || t1 == t0 {
        return Err(Error::Config(format!("bad integration span [{t0}, {t1}]")));
    }
    let dir = (t1 - t0).signum();
    for w in samples.windows(2) {
        if (w[1] - w[0]) * dir <= 0.0 {
            return Err(Error::Config("sample times must be monotone".into()));
        }
    }
    if samples
        .iter()
        .any(|&s| (s - t0) * dir < 0.0 || (s - t1) * dir > 0.0)
    {
        return Err(Error::Config("sample times outside [t0, t1]".into()));
    }

    // Dormand-Prince coefficients, FSAL pair 5(4).
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // embedded 4th-order weights
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    let span = (t1 - t0).abs();
    let mut h = (span / 100.0).min(opts.max_step) * dir;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;

    let mut out = Vec::with_capacity(samples.len());
    let mut next_sample = 0usize;
    // t0 itself may be requested
    while next_sample < samples.len() && samples[next_sample] == t0 {
        out.push((t0, y));
        next_sample += 1;
    }

    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Numerical(format!(
                "integrator exceeded {} steps at t={t}",
                opts.max_steps
            )));
        }
        // clamp to the nearest boundary: next sample time or t1
        let target = if next_sample < samples.len() {
            samples[next_sample]
        } else {
            t1
        };
        if (t + h - target) * dir > 0.0 {
            h = target - t;
        }
        if h.abs() < 1e-14 * span.max(1.0) {
            return Err(Error::Numerical(format!(
                "step size underflow at t={t} (h={h:.3e})"
            )));
        }

        let mut ytmp = [0.0; N];
        axpyn(&mut ytmp, h, &[(k1, A21)], &y);
        let k2 = f(t + h / 5.0, &ytmp)?;
        axpyn(&mut ytmp, h, &[(k1, A31), (k2, A32)], &y);
        let k3 = f(t + 3.0 * h / 10.0, &ytmp)?;
        axpyn(&mut ytmp, h, &[(k1, A41), (k2, A42), (k3, A43)], &y);
        let k4 = f(t + 4.0 * h / 5.0, &ytmp)?;
        axpyn(&mut ytmp, h, &[(k1, A51), (k2, A52), (k3, A53), (k4, A54)], &y);
        let k5 = f(t + 8.0 * h / 9.0, &ytmp)?;
        axpyn(
            &mut ytmp,
            h,
            &[(k1, A61), (k2, A62), (k3, A63), (k4, A64), (k5, A65)],
            &y,
        );
        let k6 = f(t + h, &ytmp)?;
        let mut ynew = [0.0; N];
        axpyn(
            &mut ynew,
            h,
            &[(k1, B1), (k3, B3), (k4, B4), (k5, B5), (k6, B6)],
            &y,
        );
        let k7 = f(t + h, &ynew)?;

        // embedded error estimate
        let mut err = 0.0_f64;
        for i in 0..N {
            let y4 = y[i]
                + h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                    + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * ynew[i].abs().max(y[i].abs());
            let d = (ynew[i] - y4) / sc;
            err += d * d;
        }
        err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = ynew;
            k1 = k7; // FSAL
            while next_sample < samples.len()
                && (samples[next_sample] - t) * dir <= 1e-14 * span.max(1.0)
            {
                out.push((samples[next_sample], y));
                next_sample += 1;
            }
        }
        let fac = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * fac).clamp(-opts.max_step, opts.max_step);
        if h == 0.0 {
            h = 1e-14 * dir;
        }
    }
    // t1 may also be a requested sample not yet emitted (float fuzz)
    while next_sample < samples.len() {
        out.push((samples[next_sample], y));
        next_sample += 1;
    }
    Ok(out)
}
