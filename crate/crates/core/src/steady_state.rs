//! Self-consistent mean amplitudes of the driven system and the linearization
//! around them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{effective_coupling, LinearizedParams, PhysicalParams};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
const RELAXATION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Cavity amplitude ξ.
    pub xi: Complex64,
    /// Dopant amplitude α.
    pub alpha: Complex64,
    /// Mechanical amplitude β.
    pub beta: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// Left-hand sides of the three mean-value equations; all vanish at a fixed point.
pub fn mean_field_residuals(
    p: &PhysicalParams,
    xi: Complex64,
    alpha: Complex64,
    beta: Complex64,
) -> [Complex64; 3] {
    let i = Complex64::i();
    let x = 2.0 * beta.re;
    let coupling = p.j0 + p.mu0 * x;
    let delta_c_eff = p.delta_c() + p.g0 * x;
    [
        -Complex64::new(p.kappa, delta_c_eff) * xi - i * coupling * alpha + p.epsilon,
        -Complex64::new(p.gamma, p.delta_a()) * alpha - i * coupling * xi,
        -Complex64::new(p.gamma_m, p.omega_m) * beta
            - i * p.g0 * xi.norm_sqr()
            - i * p.mu0 * (alpha.conj() * xi + xi.conj() * alpha),
    ]
}

fn max_residual(r: &[Complex64; 3]) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solves the optical pair for fixed β (the mechanics only enter through 2Re β).
fn optical_amplitudes(p: &PhysicalParams, beta: Complex64) -> Result<(Complex64, Complex64)> {
    let i = Complex64::i();
    let x = 2.0 * beta.re;
    let coupling = p.j0 + p.mu0 * x;
    let a11 = Complex64::new(p.kappa, p.delta_c() + p.g0 * x);
    let a22 = Complex64::new(p.gamma, p.delta_a());
    let a12 = i * coupling;
    // [a11 a12; a12 a22] (ξ, α) = (ε, 0)
    let det = a11 * a22 - a12 * a12;
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::Numerical("singular optical mean-field system".into()));
    }
    let xi = a22 * p.epsilon / det;
    let alpha = -a12 * p.epsilon / det;
    Ok((xi, alpha))
}

fn mechanical_amplitude(p: &PhysicalParams, xi: Complex64, alpha: Complex64) -> Complex64 {
    let i = Complex64::i();
    let force = -i * p.g0 * xi.norm_sqr() - i * p.mu0 * (alpha.conj() * xi + xi.conj() * alpha);
    force / Complex64::new(p.gamma_m, p.omega_m)
}

/// Damped fixed-point iteration on β; (ξ, α) are solved exactly at each step.
pub fn solve_steady_state(p: &PhysicalParams, tol: f64, max_iter: usize) -> Result<SteadyState> {
    p.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }

    let mut beta = Complex64::new(0.0, 0.0);
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let (xi, alpha) = optical_amplitudes(p, beta)?;
        let target = mechanical_amplitude(p, xi, alpha);
        beta = beta * (1.0 - RELAXATION) + target * RELAXATION;

        // (ξ, α) must match the relaxed β before measuring the residual.
        let (xi, alpha) = optical_amplitudes(p, beta)?;
        residual = max_residual(&mean_field_residuals(p, xi, alpha, beta));
        if !residual.is_finite() {
            break;
        }
        if residual <= tol {
            return Ok(SteadyState {
                xi,
                alpha,
                beta,
                residual,
                iterations: iter,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
    })
}

pub fn linearize(p: &PhysicalParams, s: &SteadyState) -> LinearizedParams {
    let x = 2.0 * s.beta.re;
    let j = p.j0 + p.mu0 * x;
    let g = p.g0 * s.xi;
    let mu = p.mu0 * s.xi;
    LinearizedParams {
        delta_c_eff: p.delta_c() + p.g0 * x,
        delta_a: p.delta_a(),
        omega_m: p.omega_m,
        kappa: p.kappa,
        gamma: p.gamma,
        gamma_m: p.gamma_m,
        g,
        j,
        mu,
        big_g: effective_coupling(g, j, mu, p.delta_a(), p.gamma),
    }
}
