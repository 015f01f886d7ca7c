//! Parameter types and the linearized drift model.
//!
//! All rates and frequencies are in units of the cavity decay rate κ. The
//! fluctuation vector is ordered `(c, a, b, c†, a†, b†)`, indices 0..5.

use nalgebra::{Matrix6, Vector6};
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub type CMatrix6 = Matrix6<Complex64>;

/// Index of each bosonic mode inside the first half of the fluctuation vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Cavity,
    Dopant,
    Mechanics,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Cavity, Mode::Dopant, Mode::Mechanics];

    pub fn index(self) -> usize {
        match self {
            Mode::Cavity => 0,
            Mode::Dopant => 1,
            Mode::Mechanics => 2,
        }
    }

    pub fn label(self) -> char {
        match self {
            Mode::Cavity => 'c',
            Mode::Dopant => 'a',
            Mode::Mechanics => 'b',
        }
    }
}

/// Bare constants of the driven three-mode Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub omega_c: f64,
    pub omega_a: f64,
    pub omega_m: f64,
    pub g0: f64,
    pub j0: f64,
    pub mu0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    pub epsilon: f64,
    pub omega_d: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_c", self.omega_c),
            ("omega_a", self.omega_a),
            ("omega_m", self.omega_m),
            ("g0", self.g0),
            ("J0", self.j0),
            ("mu0", self.mu0),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_m", self.gamma_m),
            ("epsilon", self.epsilon),
            ("omega_d", self.omega_d),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        check_decay_rates(self.kappa, self.gamma, self.gamma_m)
    }

    /// Cavity detuning from the drive, Δ_c = ω_c − ω_d.
    pub fn delta_c(&self) -> f64 {
        self.omega_c - self.omega_d
    }

    /// Dopant detuning from the drive, Δ_a = ω_a − ω_d.
    pub fn delta_a(&self) -> f64 {
        self.omega_a - self.omega_d
    }
}

/// Inputs for specifying the linearized model directly, the way the figure
/// operating points are stated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectParams {
    pub delta_c_eff: f64,
    pub delta_a: f64,
    pub omega_m: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    pub g: f64,
    pub j: f64,
    pub mu_abs: f64,
    /// Argument of μ, in `[0, 2π)`.
    pub phi: f64,
}

impl DirectParams {
    /// The operating point used throughout the figures:
    /// Δ′_c = Δ_a = ω_m = 10κ, g = J = |μ| = γ = γ_m = κ.
    pub fn figure_point(phi: f64) -> Self {
        DirectParams {
            delta_c_eff: 10.0,
            delta_a: 10.0,
            omega_m: 10.0,
            kappa: 1.0,
            gamma: 1.0,
            gamma_m: 1.0,
            g: 1.0,
            j: 1.0,
            mu_abs: 1.0,
            phi,
        }
    }
}

/// Effective constants of the linearized fluctuation equations.
///
/// `g` is complex because in physical mode it equals g₀ξ; in direct mode it is
/// real and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedParams {
    pub delta_c_eff: f64,
    pub delta_a: f64,
    pub omega_m: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_m: f64,
    pub g: Complex64,
    pub j: f64,
    pub mu: Complex64,
    pub big_g: Complex64,
}

/// G = g − iJμ/(iΔ_a + γ).
pub fn effective_coupling(g: Complex64, j: f64, mu: Complex64, delta_a: f64, gamma: f64) -> Complex64 {
    let i = Complex64::i();
    g - i * j * mu / Complex64::new(gamma, delta_a)
}

fn check_decay_rates(kappa: f64, gamma: f64, gamma_m: f64) -> Result<()> {
    for (name, v) in [("kappa", kappa), ("gamma", gamma), ("gamma_m", gamma_m)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

pub fn build_linearized_from_direct(d: &DirectParams) -> Result<LinearizedParams> {
    check_decay_rates(d.kappa, d.gamma, d.gamma_m)?;
    let finite = [d.delta_c_eff, d.delta_a, d.omega_m, d.g, d.j, d.mu_abs, d.phi];
    if finite.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite direct parameter".into()));
    }
    if d.g < 0.0 {
        return Err(Error::InvalidParameter(format!("g must be nonnegative, got {}", d.g)));
    }
    if d.mu_abs < 0.0 {
        return Err(Error::InvalidParameter(format!("mu_abs must be nonnegative, got {}", d.mu_abs)));
    }
    if !(0.0..TAU).contains(&d.phi) {
        return Err(Error::InvalidParameter(format!("phi must lie in [0, 2pi), got {}", d.phi)));
    }
    let g = Complex64::new(d.g, 0.0);
    let mu = Complex64::from_polar(d.mu_abs, d.phi);
    Ok(LinearizedParams {
        delta_c_eff: d.delta_c_eff,
        delta_a: d.delta_a,
        omega_m: d.omega_m,
        kappa: d.kappa,
        gamma: d.gamma,
        gamma_m: d.gamma_m,
        g,
        j: d.j,
        mu,
        big_g: effective_coupling(g, d.j, mu, d.delta_a, d.gamma),
    })
}

impl LinearizedParams {
    pub fn validate(&self) -> Result<()> {
        check_decay_rates(self.kappa, self.gamma, self.gamma_m)?;
        let reals = [self.delta_c_eff, self.delta_a, self.omega_m, self.j];
        let cplx = [self.g, self.mu, self.big_g];
        if reals.iter().any(|v| !v.is_finite()) || cplx.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite linearized parameter".into()));
        }
        Ok(())
    }

    /// Replace g and re-derive G.
    pub fn with_g(mut self, g: f64) -> Self {
        self.g = Complex64::new(g, 0.0);
        self.refresh_big_g();
        self
    }

    /// Replace J and re-derive G.
    pub fn with_j(mut self, j: f64) -> Self {
        self.j = j;
        self.refresh_big_g();
        self
    }

    pub fn with_gamma_m(mut self, gamma_m: f64) -> Self {
        self.gamma_m = gamma_m;
        self
    }

    /// Replace the phase of μ (keeping |μ|) and re-derive G.
    pub fn with_phi(mut self, phi: f64) -> Self {
        self.mu = Complex64::from_polar(self.mu.norm(), phi);
        self.refresh_big_g();
        self
    }

    fn refresh_big_g(&mut self) {
        self.big_g = effective_coupling(self.g, self.j, self.mu, self.delta_a, self.gamma);
    }

    /// φ = arg(μ).
    pub fn phi(&self) -> f64 {
        self.mu.arg()
    }

    /// φ′ = arg(G).
    pub fn phi_prime(&self) -> f64 {
        self.big_g.arg()
    }
}

/// Drift matrix M and noise-coupling diagonal Γ of dF/dt = MF + ΓF_in.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    pub m: CMatrix6,
    pub gamma_diag: Vector6<f64>,
}

impl DriftModel {
    /// Wraps an externally assembled drift matrix. No structural checks are made.
    pub fn from_parts(m: CMatrix6, gamma_diag: Vector6<f64>) -> Self {
        DriftModel { m, gamma_diag }
    }

    /// Γ as a dense real matrix.
    pub fn gamma_mat(&self) -> Matrix6<f64> {
        Matrix6::from_diagonal(&self.gamma_diag)
    }

    pub fn gamma_mat_complex(&self) -> CMatrix6 {
        Matrix6::from_diagonal(&self.gamma_diag.map(|v| Complex64::new(v, 0.0)))
    }
}

/// Fills M row by row from the linearized equations; no parameter checks.
pub fn drift_matrix(p: &LinearizedParams) -> CMatrix6 {
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let jj = Complex64::new(p.j, 0.0);
    let (gg, mu) = (p.big_g, p.mu);
    let (gc, muc) = (gg.conj(), mu.conj());

    let dc = Complex64::new(p.kappa, p.delta_c_eff);
    let da = Complex64::new(p.gamma, p.delta_a);
    let dm = Complex64::new(p.gamma_m, p.omega_m);

    #[rustfmt::skip]
    let m = Matrix6::new(
        -dc,     -i * jj,  -i * gg,  zero,     zero,     -i * gg,
        -i * jj, -da,      -i * mu,  zero,     zero,     -i * mu,
        -i * gc, -i * muc, -dm,      -i * gg,  -i * mu,  zero,
        zero,    zero,     i * gc,   -dc.conj(), i * jj, i * gc,
        zero,    zero,     i * muc,  i * jj,   -da.conj(), i * muc,
        i * gc,  i * muc,  zero,     i * gg,   i * mu,   -dm.conj(),
    );
    m
}

pub fn noise_coupling(p: &LinearizedParams) -> Vector6<f64> {
    let (k, g, gm) = ((2.0 * p.kappa).sqrt(), (2.0 * p.gamma).sqrt(), (2.0 * p.gamma_m).sqrt());
    Vector6::new(k, g, gm, k, g, gm)
}

pub fn build_model(p: &LinearizedParams) -> Result<DriftModel> {
    p.validate()?;
    Ok(DriftModel {
        m: drift_matrix(p),
        gamma_diag: noise_coupling(p),
    })
}

/// Checks m[3+i][3+j] = conj(m[i][j]) and m[3+i][j] = conj(m[i][3+j]);
/// returns the largest deviation.
pub fn conjugate_block_defect(m: &CMatrix6) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            worst = worst.max((m[(3 + r, 3 + c)] - m[(r, c)].conj()).norm());
            worst = worst.max((m[(3 + r, c)] - m[(r, 3 + c)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn second_term_vanishes_without_dopant_coupling() {
        let mut d = DirectParams::figure_point(0.3 * PI);
        d.j = 0.0;
        let p = build_linearized_from_direct(&d).unwrap();
        assert_eq!(p.big_g, Complex64::new(1.0, 0.0));
        assert_eq!(p.phi_prime(), 0.0);
    }

    #[test]
    fn effective_coupling_by_hand() {
        let p = build_linearized_from_direct(&DirectParams::figure_point(0.0)).unwrap();
        let expected = Complex64::new(91.0, -1.0) / 101.0;
        assert!(close(p.big_g, expected, 1e-15), "{}", p.big_g);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut d = DirectParams::figure_point(0.0);
        d.gamma_m = 0.0;
        assert!(matches!(build_linearized_from_direct(&d), Err(Error::InvalidParameter(_))));
        let mut d = DirectParams::figure_point(0.0);
        d.kappa = -1.0;
        assert!(build_linearized_from_direct(&d).is_err());
        let mut d = DirectParams::figure_point(TAU);
        assert!(build_linearized_from_direct(&d).is_err());
        d.phi = 0.1;
        d.mu_abs = -0.5;
        assert!(build_linearized_from_direct(&d).is_err());
    }

    #[test]
    fn decoupled_model_is_diagonal() {
        let mut d = DirectParams::figure_point(0.0);
        d.g = 0.0;
        d.j = 0.0;
        d.mu_abs = 0.0;
        d.delta_c_eff = 3.0;
        d.delta_a = 5.0;
        d.omega_m = 7.0;
        let p = build_linearized_from_direct(&d).unwrap();
        let model = build_model(&p).unwrap();
        let diag = [
            Complex64::new(-1.0, -3.0),
            Complex64::new(-1.0, -5.0),
            Complex64::new(-1.0, -7.0),
            Complex64::new(-1.0, 3.0),
            Complex64::new(-1.0, 5.0),
            Complex64::new(-1.0, 7.0),
        ];
        for r in 0..6 {
            for c in 0..6 {
                let want = if r == c { diag[r] } else { Complex64::new(0.0, 0.0) };
                assert_eq!(model.m[(r, c)], want, "entry ({r},{c})");
            }
        }
    }

    #[test]
    fn couplings_read_off_drift_matrix() {
        let p = build_linearized_from_direct(&DirectParams::figure_point(0.47 * PI)).unwrap();
        let m = build_model(&p).unwrap().m;
        let i = Complex64::i();
        assert_eq!(m[(0, 1)], -i);
        assert!(close(m[(1, 2)], -i * p.mu, 1e-15));
        assert!(close(m[(2, 0)], -i * p.big_g.conj(), 1e-15));
        assert_eq!(conjugate_block_defect(&m), 0.0);
    }

    #[test]
    fn gamma_ignores_couplings() {
        let a = build_linearized_from_direct(&DirectParams::figure_point(0.2)).unwrap();
        let b = a.with_g(3.0).with_j(0.1).with_phi(4.0);
        assert_eq!(build_model(&a).unwrap().gamma_diag, build_model(&b).unwrap().gamma_diag);
        let gd = noise_coupling(&a.with_gamma_m(0.5));
        assert_eq!(gd[2], 1.0);
        assert_eq!(gd[2], gd[5]);
        assert_eq!(gd[0], 2f64.sqrt());
    }
}
