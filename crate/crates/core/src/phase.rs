//! Relative phase θ = φ − arg(G) between the two paths that feed the
//! mechanics, and the drive phases φ that put θ at π/2 or 3π/2.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::{effective_coupling, LinearizedParams};

pub const SCAN_POINTS: usize = 1024;
const MAX_BISECTIONS: usize = 200;

/// The subset of parameters that θ depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSetup {
    pub g: f64,
    pub j: f64,
    pub mu_abs: f64,
    pub gamma: f64,
    pub delta_a: f64,
}

impl PhaseSetup {
    pub fn from_linearized(p: &LinearizedParams) -> Self {
        PhaseSetup {
            g: p.g.re,
            j: p.j,
            mu_abs: p.mu.norm(),
            gamma: p.gamma,
            delta_a: p.delta_a,
        }
    }

    pub fn effective_coupling(&self, phi: f64) -> Complex64 {
        effective_coupling(
            Complex64::new(self.g, 0.0),
            self.j,
            Complex64::from_polar(self.mu_abs, phi),
            self.delta_a,
            self.gamma,
        )
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle difference into `(−π, π]`.
fn wrap_signed(x: f64) -> f64 {
    let w = wrap_angle(x);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

pub fn relative_phase(s: &PhaseSetup, phi: f64) -> Result<f64> {
    let g = s.effective_coupling(phi);
    let scale = s.g.abs() + (s.j * s.mu_abs).abs() / s.gamma.hypot(s.delta_a);
    if g.norm() <= f64::EPSILON * scale || g.norm() == 0.0 {
        return Err(Error::DegeneratePhase);
    }
    Ok(wrap_angle(phi - g.arg()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCurvePoint {
    pub phi: f64,
    pub theta: f64,
    /// |θ − π/2|/π
    pub d_half: f64,
    /// |θ − 3π/2|/π
    pub d_three_half: f64,
}

pub fn phase_curve_point(s: &PhaseSetup, phi: f64) -> Result<PhaseCurvePoint> {
    let theta = relative_phase(s, phi)?;
    Ok(PhaseCurvePoint {
        phi,
        theta,
        d_half: (theta - PI / 2.0).abs() / PI,
        d_three_half: (theta - 1.5 * PI).abs() / PI,
    })
}

/// θ(φ) on φ_k = 2πk/n, k = 0..n.
pub fn phase_curve(s: &PhaseSetup, n: usize) -> Result<Vec<PhaseCurvePoint>> {
    (0..n)
        .map(|k| phase_curve_point(s, k as f64 * TAU / n as f64))
        .collect()
}

/// φ with θ(φ) = target, by uniform scan then bisection on the wrapped
/// difference θ − target.
pub fn solve_phase(s: &PhaseSetup, target: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let f = |phi: f64| relative_phase(s, phi).map(|t| wrap_signed(t - target));
    let no_root = Error::NoRoot {
        target_over_pi: target / PI,
    };

    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|k| k as f64 * TAU / SCAN_POINTS as f64).collect();
    let mut prev = (grid[0], f(grid[0])?);
    if prev.1 == 0.0 {
        return Ok(prev.0);
    }
    for &phi in &grid[1..] {
        let cur = (phi, f(phi)?);
        if cur.1 == 0.0 {
            return Ok(wrap_angle(cur.0));
        }
        // A genuine crossing; the branch cut of the wrap shows up as a jump near ±π.
        if prev.1.signum() != cur.1.signum() && prev.1.abs() < PI / 2.0 && cur.1.abs() < PI / 2.0 {
            return bisect(&f, prev, cur, tol).map(wrap_angle);
        }
        prev = cur;
    }
    Err(no_root)
}

fn bisect<F>(f: &F, mut lo: (f64, f64), mut hi: (f64, f64), tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo.0 + hi.0);
        let fm = f(mid)?;
        if fm.abs() < tol {
            return Ok(mid);
        }
        if fm.signum() == lo.1.signum() {
            lo = (mid, fm);
        } else {
            hi = (mid, fm);
        }
        if hi.0 - lo.0 <= f64::EPSILON * hi.0.abs().max(1.0) {
            break;
        }
    }
    let best = if lo.1.abs() <= hi.1.abs() { lo } else { hi };
    if best.1.abs() < tol {
        Ok(best.0)
    } else {
        Err(Error::Numerical(format!(
            "bisection stalled with residual {:.3e} above tol {tol:.3e}",
            best.1.abs()
        )))
    }
}

/// The pair (φ at θ = π/2, φ at θ = 3π/2).
pub fn optimal_phases(s: &PhaseSetup, tol: f64) -> Result<(f64, f64)> {
    Ok((solve_phase(s, PI / 2.0, tol)?, solve_phase(s, 1.5 * PI, tol)?))
}
