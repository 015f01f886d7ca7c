//! Test-only helpers: random parameter draws and independent linear-algebra
//! oracles that share no code with the library's solve paths.

#![allow(dead_code)]

use nalgebra::Matrix6;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use tcom::model::CMatrix6;
use tcom::stability::is_stable_eigen;
use tcom::{build_linearized_from_direct, build_model, DirectParams, LinearizedParams, PhysicalParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn figure(phi_over_pi: f64) -> LinearizedParams {
    build_linearized_from_direct(&DirectParams::figure_point(phi_over_pi * PI)).unwrap()
}

pub fn random_direct(rng: &mut impl Rng) -> DirectParams {
    DirectParams {
        delta_c_eff: rng.random_range(5.0..15.0),
        delta_a: rng.random_range(5.0..15.0),
        omega_m: rng.random_range(5.0..15.0),
        kappa: 1.0,
        gamma: rng.random_range(0.3..2.0),
        gamma_m: rng.random_range(0.3..2.0),
        g: rng.random_range(0.0..1.5),
        j: rng.random_range(0.0..1.5),
        mu_abs: rng.random_range(0.0..1.5),
        phi: rng.random_range(0.0..TAU),
    }
}

/// Draws until the model is stable with max Re(λ) < −margin.
pub fn random_stable(rng: &mut impl Rng, margin: f64) -> LinearizedParams {
    loop {
        let p = build_linearized_from_direct(&random_direct(rng)).unwrap();
        let model = build_model(&p).unwrap();
        if is_stable_eigen(&model, margin).unwrap().stable {
            return p;
        }
    }
}

pub fn random_physical(rng: &mut impl Rng) -> PhysicalParams {
    let omega_d = 100.0;
    PhysicalParams {
        omega_c: omega_d + rng.random_range(5.0..15.0),
        omega_a: omega_d + rng.random_range(5.0..15.0),
        omega_m: rng.random_range(5.0..15.0),
        g0: rng.random_range(0.0..0.02),
        j0: rng.random_range(0.0..1.5),
        mu0: rng.random_range(0.0..0.01),
        kappa: 1.0,
        gamma: rng.random_range(0.3..2.0),
        gamma_m: rng.random_range(0.3..2.0),
        epsilon: rng.random_range(0.0..10.0),
        omega_d,
    }
}

/// Gauss-Jordan inverse with full pivoting.
pub fn gauss_jordan_inverse(a: &CMatrix6) -> CMatrix6 {
    let n = 6;
    let mut m: Vec<Vec<Complex64>> = (0..n).map(|r| (0..n).map(|c| a[(r, c)]).collect()).collect();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|r| (0..n).map(|c| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for r in k..n {
            for c in k..n {
                if m[r][c].norm() > best {
                    best = m[r][c].norm();
                    pr = r;
                    pc = c;
                }
            }
        }
        assert!(best > 0.0, "singular matrix");
        m.swap(k, pr);
        inv.swap(k, pr);
        for row in m.iter_mut() {
            row.swap(k, pc);
        }
        col_perm.swap(k, pc);
        let piv = m[k][k];
        for c in 0..n {
            m[k][c] /= piv;
            inv[k][c] /= piv;
        }
        for r in 0..n {
            if r != k {
                let f = m[r][k];
                for c in 0..n {
                    let (mk, ik) = (m[k][c], inv[k][c]);
                    m[r][c] -= f * mk;
                    inv[r][c] -= f * ik;
                }
            }
        }
    }
    // column swaps of A become row swaps of A⁻¹
    let mut out = CMatrix6::zeros();
    for (k, &orig) in col_perm.iter().enumerate() {
        for c in 0..n {
            out[(orig, c)] = inv[k][c];
        }
    }
    out
}

/// U(ω) = −Γ(M + iωI)⁻¹Γ − I through the explicit inverse.
pub fn u_by_explicit_inverse(p: &LinearizedParams, omega: f64) -> CMatrix6 {
    let model = build_model(p).unwrap();
    let shifted = model.m + CMatrix6::identity() * Complex64::new(0.0, omega);
    let gamma = model.gamma_mat_complex();
    -(gamma * gauss_jordan_inverse(&shifted) * gamma) - CMatrix6::identity()
}

/// M assembled from the annihilation-operator equations only; the creation
/// half follows by conjugation with the (c,a,b) ↔ (c†,a†,b†) swap.
pub fn hand_filled_drift(p: &LinearizedParams) -> CMatrix6 {
    let i = Complex64::i();
    let z = Complex64::new(0.0, 0.0);
    let (gg, mu, j) = (p.big_g, p.mu, Complex64::new(p.j, 0.0));
    // coefficients of (δc, δa, δb, δc†, δa†, δb†)
    let dc = [-(i * p.delta_c_eff + p.kappa), -i * j, -i * gg, z, z, -i * gg];
    let da = [-i * j, -(i * p.delta_a + p.gamma), -i * mu, z, z, -i * mu];
    let db = [-i * gg.conj(), -i * mu.conj(), -(i * p.omega_m + p.gamma_m), -i * gg, -i * mu, z];
    let top = [dc, da, db];
    let mut m = Matrix6::zeros();
    for r in 0..3 {
        for c in 0..6 {
            m[(r, c)] = top[r][c];
            m[(r + 3, (c + 3) % 6)] = top[r][c].conj();
        }
    }
    m
}

/// det(zI − A) by LU with partial pivoting on a plain array.
fn det_shifted(a: &CMatrix6, z: Complex64) -> Complex64 {
    let mut m: Vec<Vec<Complex64>> = (0..6)
        .map(|r| (0..6).map(|c| if r == c { z - a[(r, c)] } else { -a[(r, c)] }).collect())
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..6 {
        let p = (k..6).max_by(|&x, &y| m[x][k].norm().total_cmp(&m[y][k].norm())).unwrap();
        if p != k {
            m.swap(k, p);
            det = -det;
        }
        let piv = m[k][k];
        det *= piv;
        if piv.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        for r in k + 1..6 {
            let f = m[r][k] / piv;
            for c in k..6 {
                let v = m[k][c];
                m[r][c] -= f * v;
            }
        }
    }
    det
}

/// Characteristic polynomial coefficients (highest power first) by
/// interpolating det(zI − A) on 7 points of a circle of radius `radius`.
pub fn charpoly_by_interpolation(a: &CMatrix6, radius: f64) -> [Complex64; 7] {
    let n = 7;
    let samples: Vec<Complex64> = (0..n)
        .map(|k| det_shifted(a, Complex64::from_polar(radius, TAU * k as f64 / n as f64)))
        .collect();
    // p(z) = Σ c_m z^m  ⇒  c_m = (1/n r^m) Σ_k p(z_k) e^{−2πi km/n}
    let mut low_first = [Complex64::new(0.0, 0.0); 7];
    for (m, c) in low_first.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, s) in samples.iter().enumerate() {
            acc += s * Complex64::from_polar(1.0, -TAU * (k * m) as f64 / n as f64);
        }
        *c = acc / (n as f64 * radius.powi(m as i32));
    }
    let mut out = low_first;
    out.reverse();
    out
}

/// Roots of a monic polynomial (highest power first) by Durand–Kerner.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let c: Vec<Complex64> = coeffs.iter().map(|z| z / lead).collect();
    let eval = |x: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * x + k);
    let bound = 1.0 + c[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for k in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for m in 0..n {
                if m != k {
                    denom *= roots[k] - roots[m];
                }
            }
            let step = eval(roots[k]) / denom;
            roots[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * bound {
            break;
        }
    }
    roots
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
