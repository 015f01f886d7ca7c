//! Flat `key = value` run configuration and the CSV-producing commands.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{build_linearized_from_direct, build_model, DirectParams, LinearizedParams, PhysicalParams};
use crate::oracle::oracle_check;
use crate::phase::{optimal_phases, phase_curve, PhaseSetup};
use crate::stability::{is_stable_eigen, is_stable_routh_hurwitz, Verdict};
use crate::steady_state::{linearize, solve_steady_state, SteadyState, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::sweep::{
    circulator_report, frequency_sweep, parameter_sweep, Grid, SweptParameter, DEFAULT_BAND,
    DEFAULT_CIRCULATOR_THRESHOLD, DEFAULT_POINTS,
};

const DIRECT_KEYS: &[&str] = &[
    "delta_c_eff", "delta_a", "omega_m", "kappa", "gamma", "gamma_m", "g", "J", "mu_abs", "phi_over_pi",
];
const PHYSICAL_KEYS: &[&str] = &[
    "omega_c", "omega_a", "omega_m", "g0", "J0", "mu0", "kappa", "gamma", "gamma_m", "epsilon", "omega_d",
];
const PHYSICAL_OPTIONAL: &[&str] = &["tol", "max_iter"];
const SHARED_OPTIONAL: &[&str] = &[
    "mode",
    "omega_lo",
    "omega_hi",
    "n_points",
    "margin",
    "omega_eval",
    "threshold",
    "sweep_param",
    "sweep_values",
    "phase_points",
    "phase_tol",
    "oracle_points",
    "oracle_channel",
];

pub const DEFAULT_SWEEP_VALUES: [f64; 4] = [0.01, 0.5, 1.0, 1.5];
pub const DEFAULT_PHASE_POINTS: usize = 1024;
pub const DEFAULT_PHASE_TOL: f64 = 1e-10;
pub const DEFAULT_ORACLE_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Physical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Direct(DirectParams),
    Physical {
        params: PhysicalParams,
        tol: f64,
        max_iter: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub n_points: usize,
    pub margin: f64,
    /// Defaults to ω_m.
    pub omega_eval: Option<f64>,
    pub threshold: f64,
    pub sweep_param: SweptParameter,
    pub sweep_values: Vec<f64>,
    pub phase_points: usize,
    pub phase_tol: f64,
    pub oracle_points: usize,
    /// `None` checks all six channels.
    pub oracle_channel: Option<usize>,
}

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_num<T: FromStr>(key: &str, e: &Entry<'_>) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| config_err(e.line, format!("cannot parse '{}' as a number for key {key}", e.value)))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<&str, Entry<'_>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected 'key = value', got '{content}'")))?;
        let key = key.trim();
        let value = value.trim();
        if entries.contains_key(key) {
            return Err(config_err(line, format!("duplicate key {key}")));
        }
        entries.insert(key, Entry { line, value });
    }

    let mode = match entries.get("mode") {
        None => Mode::Direct,
        Some(e) => match e.value {
            "direct" => Mode::Direct,
            "physical" => Mode::Physical,
            other => return Err(config_err(e.line, format!("mode must be direct or physical, got '{other}'"))),
        },
    };

    let (required, mode_optional): (&[&str], &[&str]) = match mode {
        Mode::Direct => (DIRECT_KEYS, &[]),
        Mode::Physical => (PHYSICAL_KEYS, PHYSICAL_OPTIONAL),
    };
    let allowed: BTreeSet<&str> = required
        .iter()
        .chain(mode_optional)
        .chain(SHARED_OPTIONAL)
        .copied()
        .collect();
    let known_elsewhere: BTreeSet<&str> = DIRECT_KEYS
        .iter()
        .chain(PHYSICAL_KEYS)
        .chain(PHYSICAL_OPTIONAL)
        .copied()
        .collect();

    // report offending keys in file order
    let mut by_line: Vec<(&str, &Entry<'_>)> = entries.iter().map(|(k, e)| (*k, e)).collect();
    by_line.sort_by_key(|(_, e)| e.line);
    for (key, e) in by_line {
        if !allowed.contains(key) {
            let message = if known_elsewhere.contains(key) {
                format!("key {key} is not valid in {} mode", if mode == Mode::Direct { "direct" } else { "physical" })
            } else {
                format!("unknown key {key}")
            };
            return Err(config_err(e.line, message));
        }
    }

    let missing: Vec<String> = required
        .iter()
        .filter(|k| !entries.contains_key(*k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingKeys(missing));
    }

    let num = |key: &str| -> Result<f64> { parse_num(key, &entries[key]) };
    let opt_f64 = |key: &str| -> Result<Option<f64>> { entries.get(key).map(|e| parse_num(key, e)).transpose() };
    let opt_usize = |key: &str| -> Result<Option<usize>> { entries.get(key).map(|e| parse_num(key, e)).transpose() };

    let model = match mode {
        Mode::Direct => ModelSpec::Direct(DirectParams {
            delta_c_eff: num("delta_c_eff")?,
            delta_a: num("delta_a")?,
            omega_m: num("omega_m")?,
            kappa: num("kappa")?,
            gamma: num("gamma")?,
            gamma_m: num("gamma_m")?,
            g: num("g")?,
            j: num("J")?,
            mu_abs: num("mu_abs")?,
            phi: num("phi_over_pi")? * PI,
        }),
        Mode::Physical => ModelSpec::Physical {
            params: PhysicalParams {
                omega_c: num("omega_c")?,
                omega_a: num("omega_a")?,
                omega_m: num("omega_m")?,
                g0: num("g0")?,
                j0: num("J0")?,
                mu0: num("mu0")?,
                kappa: num("kappa")?,
                gamma: num("gamma")?,
                gamma_m: num("gamma_m")?,
                epsilon: num("epsilon")?,
                omega_d: num("omega_d")?,
            },
            tol: opt_f64("tol")?.unwrap_or(DEFAULT_TOL),
            max_iter: opt_usize("max_iter")?.unwrap_or(DEFAULT_MAX_ITER),
        },
    };

    let sweep_param = match entries.get("sweep_param") {
        None => SweptParameter::G,
        Some(e) => e
            .value
            .parse()
            .map_err(|_| config_err(e.line, format!("sweep_param must be g, J or gamma_m, got '{}'", e.value)))?,
    };
    let sweep_values = match entries.get("sweep_values") {
        None => DEFAULT_SWEEP_VALUES.to_vec(),
        Some(e) => e
            .value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| config_err(e.line, format!("cannot parse '{}' in sweep_values", s.trim())))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let oracle_channel = match entries.get("oracle_channel") {
        None => None,
        Some(e) => {
            let c: usize = parse_num("oracle_channel", e)?;
            if c >= 6 {
                return Err(config_err(e.line, format!("oracle_channel must be 0..5, got {c}")));
            }
            Some(c)
        }
    };

    Ok(RunConfig {
        model,
        omega_lo: opt_f64("omega_lo")?.unwrap_or(DEFAULT_BAND.0),
        omega_hi: opt_f64("omega_hi")?.unwrap_or(DEFAULT_BAND.1),
        n_points: opt_usize("n_points")?.unwrap_or(DEFAULT_POINTS),
        margin: opt_f64("margin")?.unwrap_or(0.0),
        omega_eval: opt_f64("omega_eval")?,
        threshold: opt_f64("threshold")?.unwrap_or(DEFAULT_CIRCULATOR_THRESHOLD),
        sweep_param,
        sweep_values,
        phase_points: opt_usize("phase_points")?.unwrap_or(DEFAULT_PHASE_POINTS),
        phase_tol: opt_f64("phase_tol")?.unwrap_or(DEFAULT_PHASE_TOL),
        oracle_points: opt_usize("oracle_points")?.unwrap_or(DEFAULT_ORACLE_POINTS),
        oracle_channel,
    })
}

impl RunConfig {
    /// Linearized parameters, solving for the steady state first in physical mode.
    pub fn linearized(&self) -> Result<(LinearizedParams, Option<SteadyState>)> {
        match &self.model {
            ModelSpec::Direct(d) => Ok((build_linearized_from_direct(d)?, None)),
            ModelSpec::Physical { params, tol, max_iter } => {
                let s = solve_steady_state(params, *tol, *max_iter)?;
                Ok((linearize(params, &s), Some(s)))
            }
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.omega_lo, self.omega_hi, self.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SteadyState,
    Stability,
    Sweep,
    PhaseCurve,
    ParamSweep,
    Circulator,
    OracleCheck,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::SteadyState,
        Command::Stability,
        Command::Sweep,
        Command::PhaseCurve,
        Command::ParamSweep,
        Command::Circulator,
        Command::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SteadyState => "steady-state",
            Command::Stability => "stability",
            Command::Sweep => "sweep",
            Command::PhaseCurve => "phase-curve",
            Command::ParamSweep => "param-sweep",
            Command::Circulator => "circulator",
            Command::OracleCheck => "oracle-check",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown command '{s}'")))
    }
}

/// Formats like C's `%.12g`: 12 significant digits, no locale.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

struct Csv(String);

impl Csv {
    fn new(header: &[&str]) -> Self {
        Csv(header.join(",") + "\n")
    }

    fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.0.push(',');
            }
            first = false;
            self.0.push_str(f.as_ref());
        }
        self.0.push('\n');
    }
}

/// Runs one command and returns the CSV text.
pub fn run_command(command: Command, cfg: &RunConfig) -> Result<String> {
    match command {
        Command::SteadyState => steady_state_csv(cfg),
        Command::Stability => stability_csv(cfg),
        Command::Sweep => sweep_csv(cfg),
        Command::PhaseCurve => phase_curve_csv(cfg),
        Command::ParamSweep => param_sweep_csv(cfg),
        Command::Circulator => circulator_csv(cfg),
        Command::OracleCheck => oracle_csv(cfg),
    }
}

fn steady_state_csv(cfg: &RunConfig) -> Result<String> {
    let (lin, state) = cfg.linearized()?;
    let s = state.ok_or_else(|| Error::InvalidParameter("steady-state requires mode = physical".into()))?;
    let mut csv = Csv::new(&[
        "xi_re", "xi_im", "alpha_re", "alpha_im", "beta_re", "beta_im", "residual", "iterations",
        "delta_c_eff", "J", "G_re", "G_im", "mu_re", "mu_im",
    ]);
    let mut fields: Vec<String> = [s.xi.re, s.xi.im, s.alpha.re, s.alpha.im, s.beta.re, s.beta.im, s.residual]
        .iter()
        .map(|&v| format_number(v))
        .collect();
    fields.push(s.iterations.to_string());
    fields.extend(
        [lin.delta_c_eff, lin.j, lin.big_g.re, lin.big_g.im, lin.mu.re, lin.mu.im]
            .iter()
            .map(|&v| format_number(v)),
    );
    csv.row(fields);
    Ok(csv.0)
}

fn stability_csv(cfg: &RunConfig) -> Result<String> {
    let (lin, _) = cfg.linearized()?;
    let model = build_model(&lin)?;
    let eig = is_stable_eigen(&model, cfg.margin)?;
    let rh = is_stable_routh_hurwitz(&model)?;
    let verdict = match rh.verdict {
        Verdict::Stable => "stable",
        Verdict::Unstable => "unstable",
        Verdict::Indeterminate => "indeterminate",
    };
    let mut csv = Csv::new(&["stable_eigen", "max_re_lambda", "margin", "routh_hurwitz", "eigen_fallback"]);
    csv.row([
        eig.stable.to_string(),
        format_number(eig.max_real),
        format_number(cfg.margin),
        verdict.to_string(),
        rh.used_eigen_fallback.to_string(),
    ]);
    Ok(csv.0)
}

fn sweep_csv(cfg: &RunConfig) -> Result<String> {
    let (lin, _) = cfg.linearized()?;
    let sweep = frequency_sweep(&lin, cfg.omega_lo, cfg.omega_hi, cfg.n_points)?;
    let mut csv = Csv::new(&[
        "omega", "Tcc", "Tca", "Tcb", "Tac", "Taa", "Tab", "Tbc", "Tba", "Tbb", "svc", "sva", "svb",
    ]);
    for row in &sweep.rows {
        csv.row(row.columns().iter().map(|&v| format_number(v)));
    }
    Ok(csv.0)
}

fn direct_params(cfg: &RunConfig, what: &str) -> Result<DirectParams> {
    match &cfg.model {
        ModelSpec::Direct(d) => Ok(*d),
        ModelSpec::Physical { .. } => Err(Error::InvalidParameter(format!("{what} requires mode = direct"))),
    }
}

fn phase_curve_csv(cfg: &RunConfig) -> Result<String> {
    let d = direct_params(cfg, "phase-curve")?;
    let setup = PhaseSetup {
        g: d.g,
        j: d.j,
        mu_abs: d.mu_abs,
        gamma: d.gamma,
        delta_a: d.delta_a,
    };
    if cfg.phase_points == 0 {
        return Err(Error::InvalidParameter("phase_points must be positive".into()));
    }
    let mut csv = Csv::new(&["phi_over_pi", "theta_over_pi", "d_half", "d_three_half"]);
    for p in phase_curve(&setup, cfg.phase_points)? {
        csv.row([p.phi / PI, p.theta / PI, p.d_half, p.d_three_half].map(format_number));
    }
    Ok(csv.0)
}

/// Drive phases (in units of π) where θ = π/2 and θ = 3π/2.
pub fn optimal_phases_over_pi(cfg: &RunConfig) -> Result<(f64, f64)> {
    let d = direct_params(cfg, "optimal phases")?;
    let setup = PhaseSetup {
        g: d.g,
        j: d.j,
        mu_abs: d.mu_abs,
        gamma: d.gamma,
        delta_a: d.delta_a,
    };
    let (a, b) = optimal_phases(&setup, cfg.phase_tol)?;
    Ok((a / PI, b / PI))
}

fn param_sweep_csv(cfg: &RunConfig) -> Result<String> {
    let (lin, _) = cfg.linearized()?;
    let omega = cfg.omega_eval.unwrap_or(lin.omega_m);
    let rows = parameter_sweep(&lin, cfg.sweep_param, &cfg.sweep_values, omega)?;
    let mut csv = Csv::new(&[cfg.sweep_param.name(), "omega_eval", "stable", "max_re_lambda", "Tac", "Tca"]);
    for r in rows {
        csv.row([
            format_number(r.value),
            format_number(omega),
            r.stable.to_string(),
            format_number(r.max_real),
            opt_number(r.t_ac()),
            opt_number(r.t_ca()),
        ]);
    }
    Ok(csv.0)
}

fn circulator_csv(cfg: &RunConfig) -> Result<String> {
    let (lin, _) = cfg.linearized()?;
    let omega = cfg.omega_eval.unwrap_or(lin.omega_m);
    let r = circulator_report(&lin, omega, cfg.threshold)?;
    let mut csv = Csv::new(&[
        "omega_eval", "Tac", "Tba", "Tcb", "Tca", "Tab", "Tbc", "fidelity_cw", "fidelity_ccw", "direction",
    ]);
    let mut fields: Vec<String> = std::iter::once(r.omega_eval)
        .chain(r.forward)
        .chain(r.backward)
        .chain([r.fidelity_cw, r.fidelity_ccw])
        .map(format_number)
        .collect();
    fields.push(r.direction.as_str().to_string());
    csv.row(fields);
    Ok(csv.0)
}

fn oracle_csv(cfg: &RunConfig) -> Result<String> {
    let (lin, _) = cfg.linearized()?;
    let model = build_model(&lin)?;
    let grid = Grid::new(cfg.omega_lo, cfg.omega_hi, cfg.oracle_points.max(2))?;
    let channels: Vec<usize> = match cfg.oracle_channel {
        Some(c) => vec![c],
        None => (0..6).collect(),
    };
    let mut csv = Csv::new(&["omega", "channel", "max_rel_error"]);
    for omega in grid.nodes() {
        for &c in &channels {
            let err = oracle_check(&model, omega, c)?;
            csv.row([format_number(omega), c.to_string(), format_number(err)]);
        }
    }
    Ok(csv.0)
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("output path {} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::Config { .. } | Error::MissingKeys(_) => 2,
            Error::Unstable { .. } => 3,
            Error::NotConverged { .. } => 4,
            Error::Numerical(_) | Error::IllConditioned { .. } => 5,
            Error::NotSettled { .. } => 6,
            Error::DegeneratePhase | Error::NoRoot { .. } => 7,
            Error::InvalidParameter(_) => 8,
        }
    }
}
