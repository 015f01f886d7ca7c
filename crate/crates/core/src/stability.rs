//! Dynamical stability of the drift matrix: every eigenvalue of M must have a
//! negative real part. Two routes are provided, a direct complex Schur
//! decomposition and a Hurwitz-determinant test on the characteristic
//! polynomial.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CMatrix6, DriftModel};

/// Characteristic-polynomial coefficients whose imaginary part exceeds this
/// (after normalization) are treated as non-real and the eigenvalue route is used.
pub const COEFF_IMAG_TOL: f64 = 1e-10;

/// A Hurwitz minor smaller than this fraction of its Hadamard bound is
/// treated as zero.
pub const MARGINAL_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub max_real: f64,
    pub eigenvalues: Vec<Complex64>,
}

pub fn eigenvalues(m: &CMatrix6) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(*m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))?;
    Ok(ev.iter().copied().collect())
}

pub fn eigen_report(m: &CMatrix6, margin: f64) -> Result<StabilityReport> {
    if !(margin >= 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be nonnegative, got {margin}")));
    }
    let eigenvalues = eigenvalues(m)?;
    let max_real = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        stable: max_real < -margin,
        max_real,
        eigenvalues,
    })
}

pub fn is_stable_eigen(model: &DriftModel, margin: f64) -> Result<StabilityReport> {
    eigen_report(&model.m, margin)
}

/// Coefficients of det(λI − A), highest power first (`c[0] = 1`), via the
/// Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &CMatrix6) -> [Complex64; 7] {
    let n = 6;
    let eye = CMatrix6::identity();
    let mut coeffs = [Complex64::new(0.0, 0.0); 7];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let mut mk = CMatrix6::zeros();
    for k in 1..=n {
        mk = a * mk + eye * coeffs[k - 1];
        coeffs[k] = -(a * mk).trace() / k as f64;
    }
    coeffs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    /// A Hurwitz minor is numerically zero and none is clearly negative.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HurwitzReport {
    pub verdict: Verdict,
    /// Real characteristic-polynomial coefficients of the rescaled matrix
    /// M/ρ, highest power first.
    pub coefficients: [f64; 7],
    pub scale: f64,
    /// Leading principal Hurwitz minors Δ₁..Δ₆.
    pub minors: Vec<f64>,
    /// Set when the coefficients were not real and the eigenvalue route decided.
    pub used_eigen_fallback: bool,
}

impl HurwitzReport {
    pub fn is_stable(&self) -> Option<bool> {
        match self.verdict {
            Verdict::Stable => Some(true),
            Verdict::Unstable => Some(false),
            Verdict::Indeterminate => None,
        }
    }
}

/// H[i][j] = a_{2j−i} (1-based), zero outside 0..=n.
fn hurwitz_matrix(a: &[f64]) -> DMatrix<f64> {
    let n = a.len() - 1;
    DMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (j as isize + 1) - (i as isize + 1);
        if (0..=n as isize).contains(&k) {
            a[k as usize]
        } else {
            0.0
        }
    })
}

/// Hurwitz determinant test on a real polynomial with positive leading coefficient.
pub fn hurwitz_verdict(a: &[f64]) -> (Verdict, Vec<f64>) {
    let h = hurwitz_matrix(a);
    let n = h.nrows();
    let mut minors = Vec::with_capacity(n);
    let mut any_marginal = false;
    let mut any_negative = false;
    for k in 1..=n {
        let sub = h.view((0, 0), (k, k)).into_owned();
        let det = sub.clone().determinant();
        let bound: f64 = sub.row_iter().map(|r| r.norm()).product();
        if det.abs() <= MARGINAL_REL_TOL * bound {
            any_marginal = true;
        } else if det < 0.0 {
            any_negative = true;
        }
        minors.push(det);
    }
    let verdict = if any_negative {
        Verdict::Unstable
    } else if any_marginal {
        Verdict::Indeterminate
    } else {
        Verdict::Stable
    };
    (verdict, minors)
}

pub fn is_stable_routh_hurwitz(model: &DriftModel) -> Result<HurwitzReport> {
    let m = &model.m;
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::Numerical("drift matrix has non-finite entries".into()));
    }
    let scale = m.norm();
    if scale == 0.0 {
        return Ok(HurwitzReport {
            verdict: Verdict::Indeterminate,
            coefficients: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            scale,
            minors: vec![0.0; 6],
            used_eigen_fallback: false,
        });
    }

    // Rescaling the roots by 1/ρ keeps the coefficients O(1) and leaves the
    // sign pattern of the minors unchanged.
    let c = characteristic_polynomial(&(m / Complex64::new(scale, 0.0)));
    let coefficients = c.map(|z| z.re);
    let max_abs = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let real = c.iter().all(|z| z.im.abs() <= COEFF_IMAG_TOL * max_abs);

    if !real {
        let report = eigen_report(m, 0.0)?;
        return Ok(HurwitzReport {
            verdict: if report.stable { Verdict::Stable } else { Verdict::Unstable },
            coefficients,
            scale,
            minors: Vec::new(),
            used_eigen_fallback: true,
        });
    }

    let (verdict, minors) = hurwitz_verdict(&coefficients);
    Ok(HurwitzReport {
        verdict,
        coefficients,
        scale,
        minors,
        used_eigen_fallback: false,
    })
}
