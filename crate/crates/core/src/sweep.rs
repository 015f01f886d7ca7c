//! Frequency and parameter sweeps plus the isolator and circulator figures
//! of merit built from T(ω).

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{build_model, DriftModel, LinearizedParams, Mode};
use crate::response::response_at;
use crate::stability::{is_stable_eigen, StabilityReport};

pub const ISOLATION_FLOOR: f64 = 1e-12;
pub const DEFAULT_CIRCULATOR_THRESHOLD: f64 = 0.5;
pub const DEFAULT_BAND: (f64, f64) = (9.5, 10.5);
pub const DEFAULT_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n_points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("need omega_lo < omega_hi, got [{lo}, {hi}]")));
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!("need n_points >= 2, got {n_points}")));
        }
        Ok(Grid { lo, hi, n_points })
    }

    /// k-th node; the last node is `hi` exactly.
    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.n_points {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * k as f64 / (self.n_points - 1) as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.node(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub t: Matrix3<f64>,
    pub s_v: Vector3<f64>,
}

impl SweepRow {
    pub fn transmission(&self, from: Mode, to: Mode) -> f64 {
        self.t[(to.index(), from.index())]
    }

    /// omega, Tcc, Tca, Tcb, Tac, Taa, Tab, Tbc, Tba, Tbb, svc, sva, svb
    pub fn columns(&self) -> [f64; 13] {
        let mut out = [0.0; 13];
        out[0] = self.omega;
        for i in 0..3 {
            for j in 0..3 {
                out[1 + 3 * i + j] = self.t[(i, j)];
            }
            out[10 + i] = self.s_v[i];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub params: LinearizedParams,
    pub grid: Grid,
    pub stability: StabilityReport,
}

fn stable_model(p: &LinearizedParams) -> Result<(DriftModel, StabilityReport)> {
    let model = build_model(p)?;
    let report = is_stable_eigen(&model, 0.0)?;
    if !report.stable {
        return Err(Error::Unstable {
            max_real: report.max_real,
        });
    }
    Ok((model, report))
}

pub fn frequency_sweep(p: &LinearizedParams, omega_lo: f64, omega_hi: f64, n_points: usize) -> Result<SweepResult> {
    let grid = Grid::new(omega_lo, omega_hi, n_points)?;
    let (model, stability) = stable_model(p)?;
    let rows = (0..grid.n_points)
        .into_par_iter()
        .map(|k| {
            let r = response_at(&model, grid.node(k))?;
            Ok(SweepRow {
                omega: r.omega,
                t: r.t,
                s_v: r.s_v,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        rows,
        params: *p,
        grid,
        stability,
    })
}

/// 10·log10 of forward (from → to) over reverse (to → from) transmission.
pub fn isolation_db(t: &Matrix3<f64>, from: Mode, to: Mode) -> Result<f64> {
    if from == to {
        return Err(Error::InvalidParameter("isolation needs two distinct modes".into()));
    }
    let forward = t[(to.index(), from.index())];
    let reverse = t[(from.index(), to.index())];
    Ok(10.0 * ((forward + ISOLATION_FLOOR) / (reverse + ISOLATION_FLOOR)).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    G,
    J,
    GammaM,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweptParameter::G => "g",
            SweptParameter::J => "J",
            SweptParameter::GammaM => "gamma_m",
        }
    }

    pub fn apply(self, base: &LinearizedParams, value: f64) -> LinearizedParams {
        match self {
            SweptParameter::G => base.with_g(value),
            SweptParameter::J => base.with_j(value),
            SweptParameter::GammaM => base.with_gamma_m(value),
        }
    }
}

impl std::str::FromStr for SweptParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(SweptParameter::G),
            "J" => Ok(SweptParameter::J),
            "gamma_m" => Ok(SweptParameter::GammaM),
            other => Err(Error::InvalidParameter(format!(
                "cannot sweep '{other}' (expected g, J or gamma_m)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRow {
    pub value: f64,
    pub stable: bool,
    pub max_real: f64,
    /// `None` for unstable points.
    pub t: Option<Matrix3<f64>>,
}

impl ParamRow {
    pub fn t_ac(&self) -> Option<f64> {
        self.t.map(|t| t[(Mode::Dopant.index(), Mode::Cavity.index())])
    }

    pub fn t_ca(&self) -> Option<f64> {
        self.t.map(|t| t[(Mode::Cavity.index(), Mode::Dopant.index())])
    }

    pub fn contrast(&self) -> Option<f64> {
        Some(self.t_ac()? - self.t_ca()?)
    }
}

/// Evaluates T(omega_eval) with one parameter replaced by each value in turn.
/// Unstable points are reported in-row without transmission data.
pub fn parameter_sweep(
    base: &LinearizedParams,
    which: SweptParameter,
    values: &[f64],
    omega_eval: f64,
) -> Result<Vec<ParamRow>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("parameter sweep needs at least one value".into()));
    }
    values
        .par_iter()
        .map(|&value| {
            let p = which.apply(base, value);
            let model = build_model(&p)?;
            let report = is_stable_eigen(&model, 0.0)?;
            let t = if report.stable {
                Some(response_at(&model, omega_eval)?.t)
            } else {
                None
            };
            Ok(ParamRow {
                value,
                stable: report.stable,
                max_real: report.max_real,
                t,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// c → a → b → c
    Clockwise,
    /// c → b → a → c
    Counterclockwise,
    None,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Clockwise => "clockwise",
            Direction::Counterclockwise => "counterclockwise",
            Direction::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirculatorReport {
    pub omega_eval: f64,
    /// (T_ac, T_ba, T_cb)
    pub forward: [f64; 3],
    /// (T_ca, T_ab, T_bc)
    pub backward: [f64; 3],
    pub fidelity_cw: f64,
    pub fidelity_ccw: f64,
    pub direction: Direction,
}

pub fn circulator_from_t(t: &Matrix3<f64>, omega_eval: f64, threshold: f64) -> CirculatorReport {
    use Mode::*;
    let tr = |from: Mode, to: Mode| t[(to.index(), from.index())];
    let forward = [tr(Cavity, Dopant), tr(Dopant, Mechanics), tr(Mechanics, Cavity)];
    let backward = [tr(Dopant, Cavity), tr(Mechanics, Dopant), tr(Cavity, Mechanics)];
    let fidelity_cw = forward.iter().sum::<f64>() / 3.0;
    let fidelity_ccw = backward.iter().sum::<f64>() / 3.0;
    let direction = if fidelity_cw - fidelity_ccw > threshold {
        Direction::Clockwise
    } else if fidelity_ccw - fidelity_cw > threshold {
        Direction::Counterclockwise
    } else {
        Direction::None
    };
    CirculatorReport {
        omega_eval,
        forward,
        backward,
        fidelity_cw,
        fidelity_ccw,
        direction,
    }
}

pub fn circulator_report(p: &LinearizedParams, omega_eval: f64, threshold: f64) -> Result<CirculatorReport> {
    let (model, _) = stable_model(p)?;
    let r = response_at(&model, omega_eval)?;
    Ok(circulator_from_t(&r.t, omega_eval, threshold))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransducerPoint {
    pub omega: f64,
    pub t_cb: f64,
    pub t_bc: f64,
}

/// Phonon-photon conversion columns of a frequency sweep.
pub fn transducer_curve(p: &LinearizedParams, omega_lo: f64, omega_hi: f64, n_points: usize) -> Result<Vec<TransducerPoint>> {
    let sweep = frequency_sweep(p, omega_lo, omega_hi, n_points)?;
    Ok(sweep
        .rows
        .iter()
        .map(|r| TransducerPoint {
            omega: r.omega,
            t_cb: r.transmission(Mode::Mechanics, Mode::Cavity),
            t_bc: r.transmission(Mode::Cavity, Mode::Mechanics),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_linearized_from_direct, DirectParams};
    use std::f64::consts::PI;

    fn figure(phi_over_pi: f64) -> LinearizedParams {
        build_linearized_from_direct(&DirectParams::figure_point(phi_over_pi * PI)).unwrap()
    }

    fn uncoupled() -> LinearizedParams {
        let mut d = DirectParams::figure_point(0.0);
        d.g = 0.0;
        d.j = 0.0;
        d.mu_abs = 0.0;
        build_linearized_from_direct(&d).unwrap()
    }

    #[test]
    fn grid_hits_both_endpoints() {
        let g = Grid::new(9.5, 10.5, 1001).unwrap();
        assert_eq!(g.node(0), 9.5);
        assert_eq!(g.node(1000), 10.5);
        assert_eq!(g.node(500), 10.0);
        assert!(Grid::new(1.0, 1.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn uncoupled_sweep_reflects_everything() {
        let s = frequency_sweep(&uncoupled(), 9.0, 11.0, 41).unwrap();
        assert!(s.rows.iter().all(|r| (r.t[(0, 0)] - 1.0).abs() < 1e-12));
        let tc = transducer_curve(&uncoupled(), 9.0, 11.0, 11).unwrap();
        assert!(tc.iter().all(|p| p.t_cb == 0.0 && p.t_bc == 0.0));
    }

    #[test]
    fn omega_strictly_increasing() {
        let s = frequency_sweep(&figure(0.47), 9.5, 10.5, 101).unwrap();
        assert!(s.rows.windows(2).all(|w| w[0].omega < w[1].omega));
        assert_eq!(s.rows[0].columns().len(), 13);
    }

    #[test]
    fn unstable_sweep_is_refused() {
        // blue-sideband parametric drive with weak mechanical damping
        let mut d = DirectParams::figure_point(0.0);
        d.delta_c_eff = -10.0;
        d.g = 2.0;
        d.j = 0.0;
        d.mu_abs = 0.0;
        d.gamma_m = 0.01;
        let p = build_linearized_from_direct(&d).unwrap();
        match frequency_sweep(&p, 9.0, 11.0, 3) {
            Err(Error::Unstable { max_real }) => assert!(max_real > 0.0),
            other => panic!("expected instability, got {other:?}"),
        }
        assert!(matches!(circulator_report(&p, 10.0, 0.5), Err(Error::Unstable { .. })));

        let rows = parameter_sweep(&figure(0.47), SweptParameter::G, &[1.0, 6.0], 10.0).unwrap();
        assert!(rows[0].stable && rows[0].t_ac().is_some());
        assert!(!rows[1].stable);
        assert_eq!(rows[1].t, None);
        assert_eq!(rows[1].contrast(), None);
    }

    #[test]
    fn isolation_signs() {
        let t = Matrix3::from_row_slice(&[1.0, 0.3, 0.0, 0.3, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(isolation_db(&t, Mode::Cavity, Mode::Dopant).unwrap(), 0.0);
        assert!(isolation_db(&t, Mode::Cavity, Mode::Cavity).is_err());

        let fwd = frequency_sweep(&figure(0.47), 10.0, 10.5, 2).unwrap().rows[0].t;
        let bwd = frequency_sweep(&figure(1.53), 10.0, 10.5, 2).unwrap().rows[0].t;
        let a = isolation_db(&fwd, Mode::Cavity, Mode::Dopant).unwrap();
        let b = isolation_db(&bwd, Mode::Cavity, Mode::Dopant).unwrap();
        assert!(a > 20.0, "{a}");
        assert!(b < -20.0, "{b}");
    }

    #[test]
    fn circulator_directions() {
        let cw = circulator_report(&figure(0.47), 10.0, DEFAULT_CIRCULATOR_THRESHOLD).unwrap();
        assert_eq!(cw.direction, Direction::Clockwise);
        let ccw = circulator_report(&figure(1.53), 10.0, DEFAULT_CIRCULATOR_THRESHOLD).unwrap();
        assert_eq!(ccw.direction, Direction::Counterclockwise);
        let none = circulator_report(&uncoupled(), 10.0, DEFAULT_CIRCULATOR_THRESHOLD).unwrap();
        assert_eq!(none.direction, Direction::None);
        assert_eq!((none.fidelity_cw, none.fidelity_ccw), (0.0, 0.0));
    }

    #[test]
    fn swept_parameter_parsing() {
        assert_eq!("gamma_m".parse::<SweptParameter>().unwrap(), SweptParameter::GammaM);
        assert!("kappa".parse::<SweptParameter>().is_err());
        assert!(parameter_sweep(&figure(0.47), SweptParameter::J, &[], 10.0).is_err());
    }
}
