//! Front end shared by the `polarq` binary: state loading, `eval`, `check`
//! and `figure`, and the CSV/JSON exports.
//!
//! Exit statuses: 0 success, 1 a check failed, 2 the state spec or arguments
//! could not be used, 3 the required truncation exceeds the cap, 4 I/O
//! failure, 5 the requested quantity is undefined for the state (for example
//! `f` of the vacuum, or a double sum on the equator).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::grid::{SphericalGrid, DEFAULT_AZIMUTHAL, DEFAULT_POLAR};
use crate::kernel::quasidist_via_kernel;
use crate::quasidist::{
    coherent_wigner_closed, evaluate_field_with, integrate, normalized_field, q_value,
    tmsv_wigner_closed, wigner_value, DistributionField, FieldKind, FieldOptions, WignerMethod,
    EQUATOR_GUARD,
};
use crate::state::{
    mean_excitation, PolarizationState, StateFamily, StateSpec, Truncation, DEFAULT_N_MAX_CAP,
};
use crate::su2::oracle_cap;

/// Seed for the pseudo-random angles used by oracle cross-checks.
pub const CHECK_SEED: u64 = 0x005E_ED0F_D157;
pub const ORACLE_SAMPLES: usize = 20;
/// Tail tolerance used for figure presets.
pub const FIGURE_EPSILON: f64 = 1e-10;

pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const Q_FLOOR: f64 = -1e-12;
pub const METHOD_AGREEMENT_TOL: f64 = 1e-9;
pub const CLOSED_FORM_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitStatus {
    Success = 0,
    CheckFailed = 1,
    SpecError = 2,
    TruncationCap = 3,
    Io = 4,
    Undefined = 5,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Check,
    Figure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Q,
    Wigner,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    /// The captioned states: coherent pair `r = 5, phi_rel = pi/2`; squeezed pair
    /// `alpha = 5, |xi| = 0.3, arg xi = 0` in both modes; two-mode squeezed vacuum
    /// `|xi| = 0.9`; Kerr evolution of the `r = 5` coherent pair to `tau = pi/2`.
    pub fn spec(self) -> StateSpec {
        use std::f64::consts::{FRAC_PI_2, SQRT_2};
        let trunc = Truncation::Epsilon {
            epsilon: FIGURE_EPSILON,
        };
        let re = |x: f64| Complex64::new(x, 0.0);
        let family = match self {
            Preset::Fig1 => StateFamily::CoherentPair {
                r: 5.0,
                phi_rel: FRAC_PI_2,
            },
            Preset::Fig2 => StateFamily::SqueezedPair {
                alpha_h: re(5.0),
                xi_h: re(0.3),
                alpha_v: re(5.0),
                xi_v: re(0.3),
            },
            Preset::Fig3 => StateFamily::TwoModeSqueezedVacuum { xi: re(0.9) },
            Preset::Fig4 => StateFamily::KerrEvolved {
                alpha_h: re(5.0 / SQRT_2),
                alpha_v: re(5.0 / SQRT_2),
                tau: FRAC_PI_2,
            },
        };
        StateSpec::new(family, trunc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Path to a JSON state spec, or the JSON itself.
    pub state: Option<String>,
    pub kind: Kind,
    pub grid: (usize, usize),
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub method: WignerMethod,
    pub oracle: bool,
    pub preset: Option<Preset>,
    pub n_max_cap: usize,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Eval,
            state: None,
            kind: Kind::Wigner,
            grid: (DEFAULT_POLAR, DEFAULT_AZIMUTHAL),
            output: None,
            format: OutputFormat::Csv,
            method: WignerMethod::TripleSum,
            oracle: false,
            preset: None,
            n_max_cap: DEFAULT_N_MAX_CAP,
            parallel: true,
        }
    }
}

/// Failure carrying the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: ExitStatus,
    pub message: String,
}

impl Failure {
    fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TruncationCap { .. } | Error::OracleCap { .. } => ExitStatus::TruncationCap,
            Error::ZeroMeanExcitation(_) | Error::EquatorGuard { .. } => ExitStatus::Undefined,
            _ => ExitStatus::SpecError,
        };
        Failure::new(status, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(ExitStatus::Io, format!("{}: {e}", path.display()))
}

/// Reads a spec from a file, or parses it directly when the argument is inline JSON.
pub fn load_spec(source: &str) -> Result<StateSpec, Failure> {
    let text = if source.trim_start().starts_with('{') {
        source.to_owned()
    } else {
        let path = Path::new(source);
        std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?
    };
    StateSpec::from_json(&text)
        .map_err(|e| Failure::new(ExitStatus::SpecError, format!("state spec: {e}")))
}

pub fn load_state(source: &str, cap: usize) -> Result<(StateSpec, PolarizationState), Failure> {
    let spec = load_spec(source)?;
    let state = spec.build_with_cap(cap)?;
    Ok((spec, state))
}

fn finish(result: Result<ExitStatus, Failure>, err: &mut dyn Write) -> ExitStatus {
    match result {
        Ok(status) => status,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.status
        }
    }
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

/// `theta,phi,value[,f]` with 17 significant digits.
pub fn field_to_csv(values: &DistributionField, f: Option<&DistributionField>) -> String {
    let mut out = String::with_capacity(values.values.len() * 72);
    out.push_str(if f.is_some() {
        "theta,phi,value,f\n"
    } else {
        "theta,phi,value\n"
    });
    for (i, node) in values.grid.nodes().enumerate() {
        let _ = write!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            node.theta, node.phi, values.values[i]
        );
        if let Some(f) = f {
            let _ = write!(out, ",{:.16e}", f.values[i]);
        }
        out.push('\n');
    }
    out
}

/// Parses a CSV written by [`field_to_csv`] into rows of numbers.
pub fn read_csv_rows(text: &str) -> Result<Vec<Vec<f64>>, String> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("{line:?}: {e}"))
                })
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct JsonExport<'a> {
    #[serde(flatten)]
    field: &'a DistributionField,
    #[serde(skip_serializing_if = "Option::is_none")]
    wigner_values: Option<&'a [f64]>,
    integral: f64,
    n_max: usize,
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub fn run_eval(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let result = eval_inner(config, out);
    finish(result, err)
}

fn eval_inner(config: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, Failure> {
    let source = config
        .state
        .as_deref()
        .ok_or_else(|| Failure::new(ExitStatus::SpecError, "--state is required"))?;
    let (_, state) = load_state(source, config.n_max_cap)?;
    let grid = SphericalGrid::new(config.grid.0, config.grid.1)?;
    let options = FieldOptions {
        method: config.method,
        parallel: config.parallel,
    };

    let (primary, f_field) = match config.kind {
        Kind::Q => (
            evaluate_field_with(&state, &grid, FieldKind::Q, options)?,
            None,
        ),
        Kind::Wigner => (
            evaluate_field_with(&state, &grid, FieldKind::Wigner, options)?,
            None,
        ),
        Kind::F => {
            let w = evaluate_field_with(&state, &grid, FieldKind::Wigner, options)?;
            let f = normalized_field(&w, mean_excitation(&state))?;
            (w, Some(f))
        }
    };
    let integral = integrate(&primary);

    if let Some(path) = &config.output {
        let text = match config.format {
            OutputFormat::Csv => field_to_csv(&primary, f_field.as_ref()),
            OutputFormat::Json => {
                let export = match &f_field {
                    Some(f) => JsonExport {
                        field: f,
                        wigner_values: Some(&primary.values),
                        integral,
                        n_max: state.n_max(),
                    },
                    None => JsonExport {
                        field: &primary,
                        wigner_values: None,
                        integral,
                        n_max: state.n_max(),
                    },
                };
                serde_json::to_string(&export).expect("field serializes")
            }
        };
        write_file(path, &text)?;
    }

    let _ = writeln!(out, "state {} n_max {}", state.digest(), state.n_max());
    let _ = writeln!(out, "integral {}", fmt(integral));
    if let Some(f) = &f_field {
        let (_, theta, phi, value) = f.maximum();
        let _ = writeln!(
            out,
            "max theta {} phi {} f {}",
            fmt(theta),
            fmt(phi),
            fmt(value)
        );
    }

    if config.oracle {
        let report = oracle_check(&state);
        let _ = writeln!(out, "{}", report.line());
        if !report.pass {
            return Ok(ExitStatus::CheckFailed);
        }
    }
    Ok(ExitStatus::Success)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl CheckResult {
    fn within(name: &str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            deviation,
            tolerance,
            pass: deviation <= tolerance,
            note: String::new(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{:<4}  {:<28} deviation {:.3e}  tolerance {:.1e}{}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.deviation,
            self.tolerance,
            if self.note.is_empty() {
                String::new()
            } else {
                format!("  ({})", self.note)
            }
        )
    }
}

/// Pseudo-random points on the sphere from [`CHECK_SEED`].
pub fn check_angles(count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            ((1.0 - 2.0 * u).acos(), 2.0 * std::f64::consts::PI * v)
        })
        .collect()
}

/// Agreement of the sums with the kernel oracle at the seeded angles.
pub fn oracle_check(state: &PolarizationState) -> CheckResult {
    let cap = oracle_cap();
    if state.n_max() > cap {
        let mut r = CheckResult::within("kernel oracle", 0.0, ORACLE_TOL);
        r.note = format!("skipped: n_max {} above oracle cap {cap}", state.n_max());
        return r;
    }
    let mut worst: f64 = 0.0;
    for (theta, phi) in check_angles(ORACLE_SAMPLES) {
        let w =
            wigner_value(state, theta, phi, WignerMethod::TripleSum).expect("triple sum is total");
        let q = q_value(state, theta, phi);
        let kw = quasidist_via_kernel(state, 0.0, theta, phi).expect("within cap");
        let kq = quasidist_via_kernel(state, -1.0, theta, phi).expect("within cap");
        worst = worst.max((w - kw).abs()).max((q - kq).abs());
    }
    CheckResult::within("kernel oracle", worst, ORACLE_TOL)
}

/// Every diagnostic `check` runs, in print order.
pub fn run_checks(
    spec: Option<&StateSpec>,
    state: &PolarizationState,
    grid: &SphericalGrid,
    oracle: bool,
    parallel: bool,
) -> Result<Vec<CheckResult>, Failure> {
    let triple = FieldOptions {
        method: WignerMethod::TripleSum,
        parallel,
    };
    let w = evaluate_field_with(state, grid, FieldKind::Wigner, triple)?;
    let q = evaluate_field_with(state, grid, FieldKind::Q, triple)?;
    let mut results = vec![
        CheckResult::within(
            "normalization W",
            (integrate(&w) - 1.0).abs(),
            NORMALIZATION_TOL,
        ),
        CheckResult::within(
            "normalization Q",
            (integrate(&q) - 1.0).abs(),
            NORMALIZATION_TOL,
        ),
    ];
    let q_min = q.minimum();
    results.push(CheckResult {
        name: "Q nonnegativity".into(),
        deviation: (-q_min).max(0.0),
        tolerance: -Q_FLOOR,
        pass: q_min >= Q_FLOOR,
        note: format!("min {q_min:.3e}"),
    });

    let double = FieldOptions {
        method: WignerMethod::DoubleSum,
        parallel,
    };
    let (worst, skipped) = match evaluate_field_with(state, grid, FieldKind::Wigner, double) {
        Ok(d) => (
            d.values
                .iter()
                .zip(&w.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            0,
        ),
        Err(Error::EquatorGuard { .. }) => {
            let mut worst: f64 = 0.0;
            let mut skipped = 0;
            for (i, node) in grid.nodes().enumerate() {
                if node.theta.cos().abs() < EQUATOR_GUARD {
                    skipped += 1;
                    continue;
                }
                let d = wigner_value(state, node.theta, node.phi, WignerMethod::DoubleSum)?;
                worst = worst.max((d - w.values[i]).abs());
            }
            (worst, skipped)
        }
        Err(e) => return Err(e.into()),
    };
    let mut agree = CheckResult::within("triple/double agreement", worst, METHOD_AGREEMENT_TOL);
    if skipped > 0 {
        agree.note = format!("{skipped} equatorial nodes skipped");
    }
    results.push(agree);

    if let Some(spec) = spec {
        let closed: Option<Box<dyn Fn(f64, f64) -> f64>> = match spec.family {
            StateFamily::CoherentPair { r, phi_rel } => Some(Box::new(move |t, p| {
                coherent_wigner_closed(r, phi_rel, t, p)
            })),
            StateFamily::TwoModeSqueezedVacuum { xi } => {
                Some(Box::new(move |t, _| tmsv_wigner_closed(xi, t)))
            }
            _ => None,
        };
        if let Some(closed) = closed {
            let dev = grid
                .nodes()
                .zip(&w.values)
                .map(|(n, v)| (v - closed(n.theta, n.phi)).abs())
                .fold(0.0, f64::max);
            results.push(CheckResult::within("closed form", dev, CLOSED_FORM_TOL));
        }
    }
    if oracle {
        results.push(oracle_check(state));
    }
    Ok(results)
}

pub fn run_check(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let result = (|| {
        let source = config
            .state
            .as_deref()
            .ok_or_else(|| Failure::new(ExitStatus::SpecError, "--state is required"))?;
        let (spec, state) = load_state(source, config.n_max_cap)?;
        let grid = SphericalGrid::new(config.grid.0, config.grid.1)?;
        let results = run_checks(Some(&spec), &state, &grid, config.oracle, config.parallel)?;
        let _ = writeln!(out, "state {} n_max {}", state.digest(), state.n_max());
        for r in &results {
            let _ = writeln!(out, "{}", r.line());
        }
        Ok(if results.iter().all(|r| r.pass) {
            ExitStatus::Success
        } else {
            ExitStatus::CheckFailed
        })
    })();
    finish(result, err)
}

// ---------------------------------------------------------------------------
// figure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureMeta {
    pub preset: String,
    pub n_max: usize,
    pub grid: (usize, usize),
    pub mean_excitation: f64,
    pub integral: f64,
    pub max_theta: f64,
    pub max_phi: f64,
    pub max_f: f64,
    pub state_digest: String,
}

/// Output of a preset run, before anything is written.
#[derive(Debug, Clone)]
pub struct FigureData {
    pub wigner: DistributionField,
    pub f: DistributionField,
    pub meta: FigureMeta,
}

pub fn figure_data(preset: Preset, cap: usize, parallel: bool) -> Result<FigureData, Failure> {
    let state = preset.spec().build_with_cap(cap)?;
    let grid = SphericalGrid::default();
    let options = FieldOptions {
        method: WignerMethod::TripleSum,
        parallel,
    };
    let wigner = evaluate_field_with(&state, &grid, FieldKind::Wigner, options)?;
    let mean = mean_excitation(&state);
    let f = normalized_field(&wigner, mean)?;
    let (_, max_theta, max_phi, max_f) = f.maximum();
    let meta = FigureMeta {
        preset: preset.name().into(),
        n_max: state.n_max(),
        grid: (grid.n_polar(), grid.n_azimuthal()),
        mean_excitation: mean,
        integral: integrate(&wigner),
        max_theta,
        max_phi,
        max_f,
        state_digest: state.digest(),
    };
    Ok(FigureData { wigner, f, meta })
}

/// Sidecar path for a figure export: `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn run_figure(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let result = (|| {
        let preset = config
            .preset
            .ok_or_else(|| Failure::new(ExitStatus::SpecError, "--preset is required"))?;
        let path = config
            .output
            .as_deref()
            .ok_or_else(|| Failure::new(ExitStatus::SpecError, "--out is required"))?;
        let data = figure_data(preset, config.n_max_cap, config.parallel)?;
        let body = match config.format {
            OutputFormat::Csv => field_to_csv(&data.wigner, Some(&data.f)),
            OutputFormat::Json => serde_json::to_string(&JsonExport {
                field: &data.f,
                wigner_values: Some(&data.wigner.values),
                integral: data.meta.integral,
                n_max: data.meta.n_max,
            })
            .expect("field serializes"),
        };
        write_file(path, &body)?;
        write_file(
            &sidecar_path(path),
            &serde_json::to_string_pretty(&data.meta).expect("meta serializes"),
        )?;
        let m = &data.meta;
        let _ = writeln!(
            out,
            "{} n_max {} mean_excitation {}",
            m.preset,
            m.n_max,
            fmt(m.mean_excitation)
        );
        let _ = writeln!(out, "integral {}", fmt(m.integral));
        let _ = writeln!(
            out,
            "max theta {} phi {} f {}",
            fmt(m.max_theta),
            fmt(m.max_phi),
            fmt(m.max_f)
        );
        Ok(ExitStatus::Success)
    })();
    finish(result, err)
}

pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    match config.command {
        Command::Eval => run_eval(config, out, err),
        Command::Check => run_check(config, out, err),
        Command::Figure => run_figure(config, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_angles_are_reproducible() {
        assert_eq!(check_angles(5), check_angles(5));
        assert!(check_angles(50)
            .iter()
            .all(|&(t, p)| (0.0..=std::f64::consts::PI).contains(&t)
                && (0.0..std::f64::consts::TAU).contains(&p)));
    }

    #[test]
    fn csv_roundtrip_is_lossless() {
        let grid = SphericalGrid::new(4, 6).unwrap();
        let field = DistributionField {
            grid,
            kind: FieldKind::Wigner,
            values: (0..24).map(|i| (i as f64 * 0.37).sin() / 3.0).collect(),
            state_digest: "t".into(),
        };
        let rows = read_csv_rows(&field_to_csv(&field, None)).unwrap();
        for (row, v) in rows.iter().zip(&field.values) {
            assert_eq!(row[2], *v);
        }
    }

    #[test]
    fn failure_status_mapping() {
        assert_eq!(
            Failure::from(Error::TruncationCap {
                required: 600,
                cap: 512
            })
            .status,
            ExitStatus::TruncationCap
        );
        assert_eq!(
            Failure::from(Error::ZeroMeanExcitation(0.0)).status,
            ExitStatus::Undefined
        );
        assert_eq!(
            Failure::from(Error::InvalidTolerance(3.0)).status,
            ExitStatus::SpecError
        );
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/fig1.csv")),
            PathBuf::from("/tmp/fig1.csv.meta.json")
        );
    }
}
