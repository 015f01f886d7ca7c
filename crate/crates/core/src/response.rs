//! Frequency-domain input-output response.
//!
//! Fluctuations oscillating as e^{−iωt} satisfy F(ω) = −(M + iωI)⁻¹ΓF_in(ω);
//! with o_out = √(2κ_o)·o − o_in this gives U(ω) = −Γ(M + iωI)⁻¹Γ − I.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CMatrix6, DriftModel, Mode};

/// Largest accepted 2-norm condition number of M + iωI.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrices {
    pub omega: f64,
    pub u: CMatrix6,
    /// T[i][j]: scattering probability from input mode j to output mode i,
    /// rows and columns ordered (c, a, b).
    pub t: Matrix3<f64>,
    pub s_v: Vector3<f64>,
}

impl ResponseMatrices {
    pub fn transmission(&self, from: Mode, to: Mode) -> f64 {
        self.t[(to.index(), from.index())]
    }
}

/// Input photon/phonon number spectra (s_c, s_a, s_b) at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSpectrum(Vector3<f64>);

impl InputSpectrum {
    pub fn new(c: f64, a: f64, b: f64) -> Result<Self> {
        let v = Vector3::new(c, a, b);
        if v.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "input spectrum entries must be finite and nonnegative, got ({c}, {a}, {b})"
            )));
        }
        Ok(InputSpectrum(v))
    }

    pub fn vacuum() -> Self {
        InputSpectrum(Vector3::zeros())
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }
}

/// 2-norm condition number of M + iωI from its singular values.
pub fn condition_number(model: &DriftModel, omega: f64) -> f64 {
    let a = shifted(model, omega);
    let sv = a.singular_values();
    let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn shifted(model: &DriftModel, omega: f64) -> CMatrix6 {
    model.m + CMatrix6::identity() * Complex64::new(0.0, omega)
}

/// U(ω) by LU solve against the columns of Γ.
pub fn scattering_matrix(model: &DriftModel, omega: f64) -> Result<CMatrix6> {
    if !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("omega must be finite, got {omega}")));
    }
    let condition = condition_number(model, omega);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { omega, condition });
    }
    let gamma = model.gamma_mat_complex();
    let x = shifted(model, omega)
        .lu()
        .solve(&gamma)
        .ok_or(Error::IllConditioned {
            omega,
            condition: f64::INFINITY,
        })?;
    Ok(-(gamma * x) - CMatrix6::identity())
}

/// T_ij = |U_ij|² + |U_i,j+3|² for i, j over (c, a, b).
pub fn transmission_matrix(u: &CMatrix6) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| u[(i, j)].norm_sqr() + u[(i, j + 3)].norm_sqr())
}

/// s_i^v = Σ_k |U_i,k+3|², the output produced by vacuum input.
pub fn vacuum_spectrum(u: &CMatrix6) -> Vector3<f64> {
    Vector3::from_fn(|i, _| (3..6).map(|k| u[(i, k)].norm_sqr()).sum())
}

pub fn response_at(model: &DriftModel, omega: f64) -> Result<ResponseMatrices> {
    let u = scattering_matrix(model, omega)?;
    Ok(ResponseMatrices {
        omega,
        t: transmission_matrix(&u),
        s_v: vacuum_spectrum(&u),
        u,
    })
}

/// S_out = T·S_in + S_v.
pub fn output_spectrum(r: &ResponseMatrices, s_in: &InputSpectrum) -> Vector3<f64> {
    r.t * s_in.as_vector() + r.s_v
}
