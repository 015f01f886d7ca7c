//! Time-domain check of U(ω).
//!
//! Integrates dF/dt = MF + Γf(t) with a single complex tone f_j(t) = A·e^{−iωt}
//! injected into one component, then projects each output
//! o_i(t) = Γ_ii·F_i(t) − f_i(t) onto e^{−iωt}. In steady state the projection
//! of channel i equals U_ij(ω)·A.

use nalgebra::Vector6;
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{CMatrix6, DriftModel};
use crate::response::scattering_matrix;
use crate::stability::eigen_report;

type CVector6 = Vector6<Complex64>;

/// dt·max(|λ|, |ω|) must not exceed this.
pub const STEP_RESOLUTION: f64 = 0.05;
/// The default step is this fraction of the largest admissible one.
pub const DEFAULT_STEP_FRACTION: f64 = 0.25;
pub const SETTLE_DECAY_TIMES: f64 = 20.0;
pub const DEFAULT_MEASURE_PERIODS: usize = 10;
pub const SETTLE_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ToneOptions {
    /// Defaults to 20/|max Re λ|.
    pub t_settle: Option<f64>,
    /// Number of whole drive periods demodulated; defaults to 10.
    pub measure_periods: Option<usize>,
    /// Upper bound on the step, at most 0.05/max(|λ|, |ω|); defaults to a
    /// quarter of that. The step actually used divides the drive period evenly.
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToneResponse {
    pub channel: usize,
    pub omega: f64,
    pub amplitude: Complex64,
    /// Demodulated output amplitude of each of the six channels.
    pub outputs: [Complex64; 6],
    pub dt: f64,
    pub t_settle: f64,
    /// Largest change of a per-period amplitude across the measurement window,
    /// relative to |A|.
    pub drift: f64,
    times: Vec<f64>,
    samples: Vec<[Complex64; 6]>,
}

impl ToneResponse {
    /// Projects the recorded outputs onto e^{−i·freq·t}.
    pub fn demodulate(&self, freq: f64) -> [Complex64; 6] {
        demodulate(&self.times, &self.samples, freq)
    }
}

fn demodulate(times: &[f64], samples: &[[Complex64; 6]], freq: f64) -> [Complex64; 6] {
    let mut acc = [Complex64::new(0.0, 0.0); 6];
    for (t, s) in times.iter().zip(samples) {
        let rot = Complex64::from_polar(1.0, freq * t);
        for (a, v) in acc.iter_mut().zip(s) {
            *a += v * rot;
        }
    }
    let n = samples.len() as f64;
    acc.map(|a| a / n)
}

struct ToneSystem<'a> {
    m: &'a CMatrix6,
    gamma_j: f64,
    channel: usize,
    omega: f64,
    amplitude: Complex64,
}

impl ToneSystem<'_> {
    fn drive(&self, t: f64) -> Complex64 {
        self.amplitude * Complex64::from_polar(1.0, -self.omega * t)
    }

    fn rhs(&self, t: f64, f: &CVector6) -> CVector6 {
        let mut d = self.m * f;
        d[self.channel] += self.drive(t) * self.gamma_j;
        d
    }

    fn rk4_step(&self, t: f64, f: &CVector6, h: f64) -> CVector6 {
        let k1 = self.rhs(t, f);
        let k2 = self.rhs(t + 0.5 * h, &(f + k1 * Complex64::from(0.5 * h)));
        let k3 = self.rhs(t + 0.5 * h, &(f + k2 * Complex64::from(0.5 * h)));
        let k4 = self.rhs(t + h, &(f + k3 * Complex64::from(h)));
        f + (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(h / 6.0)
    }
}

pub fn simulate_tone_response(
    model: &DriftModel,
    channel: usize,
    omega: f64,
    amplitude: Complex64,
    opts: &ToneOptions,
) -> Result<ToneResponse> {
    if channel >= 6 {
        return Err(Error::InvalidParameter(format!("channel must be 0..5, got {channel}")));
    }
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tone frequency must be finite and nonzero, got {omega}"
        )));
    }
    let report = eigen_report(&model.m, 0.0)?;
    if !report.stable {
        return Err(Error::Unstable {
            max_real: report.max_real,
        });
    }
    let lambda_max = report.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dt_bound = STEP_RESOLUTION / lambda_max.max(omega.abs());
    let dt_req = match opts.dt {
        Some(dt) if !(dt > 0.0) || dt > dt_bound => {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt} does not resolve the dynamics (need 0 < dt <= {dt_bound:.4e})"
            )))
        }
        Some(dt) => dt,
        None => dt_bound * DEFAULT_STEP_FRACTION,
    };
    let period = TAU / omega.abs();
    let steps_per_period = (period / dt_req).ceil() as usize;
    let dt = period / steps_per_period as f64;

    let t_settle = opts.t_settle.unwrap_or(SETTLE_DECAY_TIMES / report.max_real.abs());
    if !(t_settle >= 0.0) || !t_settle.is_finite() {
        return Err(Error::InvalidParameter(format!("t_settle must be finite and nonnegative, got {t_settle}")));
    }
    let periods = opts.measure_periods.unwrap_or(DEFAULT_MEASURE_PERIODS);
    if periods == 0 {
        return Err(Error::InvalidParameter("need at least one measurement period".into()));
    }

    let sys = ToneSystem {
        m: &model.m,
        gamma_j: model.gamma_diag[channel],
        channel,
        omega,
        amplitude,
    };

    let settle_steps = (t_settle / dt).ceil() as usize;
    let mut f = CVector6::zeros();
    let mut step = 0usize;
    let time = |k: usize| k as f64 * dt;
    for _ in 0..settle_steps {
        f = sys.rk4_step(time(step), &f, dt);
        step += 1;
    }

    let n = periods * steps_per_period;
    let mut times = Vec::with_capacity(n);
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let t = time(step);
        let mut out = [Complex64::new(0.0, 0.0); 6];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f[i] * model.gamma_diag[i];
        }
        out[channel] -= sys.drive(t);
        times.push(t);
        samples.push(out);
        f = sys.rk4_step(t, &f, dt);
        step += 1;
    }

    let per_period: Vec<[Complex64; 6]> = times
        .chunks(steps_per_period)
        .zip(samples.chunks(steps_per_period))
        .map(|(t, s)| demodulate(t, s, omega))
        .collect();
    let scale = if amplitude.norm() > 0.0 { amplitude.norm() } else { 1.0 };
    let drift = per_period
        .windows(2)
        .flat_map(|w| (0..6).map(move |i| (w[1][i] - w[0][i]).norm()))
        .fold(0.0, f64::max)
        / scale;
    if drift > SETTLE_DRIFT_TOL {
        return Err(Error::NotSettled { drift });
    }

    Ok(ToneResponse {
        channel,
        omega,
        amplitude,
        outputs: demodulate(&times, &samples, omega),
        dt,
        t_settle,
        drift,
        times,
        samples,
    })
}

/// max_i |demod_i − U_ij(ω)·A| / |A| for a unit tone.
pub fn oracle_check(model: &DriftModel, omega: f64, channel: usize) -> Result<f64> {
    oracle_check_with(model, omega, channel, &ToneOptions::default())
}

pub fn oracle_check_with(model: &DriftModel, omega: f64, channel: usize, opts: &ToneOptions) -> Result<f64> {
    let amplitude = Complex64::new(1.0, 0.0);
    let tone = simulate_tone_response(model, channel, omega, amplitude, opts)?;
    let u = scattering_matrix(model, omega)?;
    Ok((0..6)
        .map(|i| (tone.outputs[i] - u[(i, channel)] * amplitude).norm() / amplitude.norm())
        .fold(0.0, f64::max))
}
