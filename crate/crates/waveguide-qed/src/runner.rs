//! Executes experiment configurations and writes results to disk.
//!
//! [`run`] reads one JSON configuration, dispatches on its kind, and
//! writes the result files into the output directory, returning their
//! paths. [`validate`] performs every check `run` would perform before
//! computing, without touching the output directory, and never fails:
//! problems are returned inside the report.
//!
//! Output conventions: CSV files use a comma separator, a header row,
//! `\n` line endings and scientific notation with fifteen significant
//! digits; JSON files are pretty-printed with stable key order. Repeated
//! runs of the same configuration produce byte-identical files
//! regardless of the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::cloning::{
    asymmetric_fidelities, asymmetric_success_rate, simulate_asymmetric_cloning,
    simulate_symmetric_cloning, symmetric_fidelity_formula, symmetric_one_shot_formula,
    symmetric_probability_formula, AsymmetricSetup, CloneBranch,
};
use crate::collision::evolve_collision;
use crate::config::{
    resolved_envelope, CloneAsymmetricConfig, CloneSweepConfig, CloneSymmetricConfig,
    EntangleLinearConfig, EntangleRingConfig, ExperimentConfig, MethodConfig, OracleCheckConfig,
    ScatterConfig,
};
use crate::error::{Result, SimError};
use crate::network::{
    simulate_linear_entanglement, simulate_ring_entanglement, HeraldedOutcome, LinearSetup,
};
use crate::qstate::{BellKind, TwoQubitState};
use crate::scatter::{scatter, transfer_probability_adiabatic};

/// Environment variable consulted for the worker count when no explicit
/// thread count is given.
pub const THREADS_ENV_VAR: &str = "SIM_THREADS";

/// One problem found while validating a configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationIssue {
    /// Stable machine-readable code of the underlying error.
    pub code: String,
    /// Human-readable description.
    pub message: String,
}

/// Outcome of [`validate`]: the issues found and the exit code a [`run`]
/// of the same file would have produced.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// Experiment kind, when the file parsed far enough to tell.
    pub kind: Option<String>,
    /// True when a run would proceed to computation.
    pub valid: bool,
    /// Exit code a run would produce: 0, 2 or 3.
    pub exit_code: i32,
    /// Every problem found, in detection order.
    pub issues: Vec<ValidationIssue>,
}

fn issue_from(error: &SimError) -> ValidationIssue {
    ValidationIssue {
        code: error.code().to_string(),
        message: error.to_string(),
    }
}

/// Checks a configuration file without running it.
///
/// Mirrors the three exit conditions of [`run`]: an unreadable or
/// unparsable file reports exit code 2, a parsed configuration whose
/// preconditions fail reports the exit code of the first failure, and a
/// clean configuration reports 0.
pub fn validate(config_path: &Path) -> ValidationReport {
    let config = fs::read_to_string(config_path)
        .map_err(SimError::from)
        .and_then(|text| ExperimentConfig::from_json(&text));
    match config {
        Err(e) => ValidationReport {
            kind: None,
            valid: false,
            exit_code: e.exit_code(),
            issues: vec![issue_from(&e)],
        },
        Ok(config) => {
            let errors = config.check();
            ValidationReport {
                kind: Some(config.kind_name().to_string()),
                valid: errors.is_empty(),
                exit_code: errors.first().map(SimError::exit_code).unwrap_or(0),
                issues: errors.iter().map(issue_from).collect(),
            }
        }
    }
}

fn resolve_threads(threads: Option<usize>) -> Result<Option<usize>> {
    if threads.is_some() {
        return Ok(threads);
    }
    match std::env::var(THREADS_ENV_VAR) {
        Err(_) => Ok(None),
        Ok(text) => text.trim().parse::<usize>().map(Some).map_err(|_| {
            SimError::InvalidConfig(format!(
                "{THREADS_ENV_VAR} must be a non-negative integer, got {text:?}"
            ))
        }),
    }
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolve_threads(threads)? {
        // Zero keeps the library default, mirroring an unset variable.
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| SimError::InvalidConfig(format!("cannot build thread pool: {e}")))
}

/// Runs the configuration in `config_path` and writes the result files
/// into `out_dir`, creating it if needed. Returns the written paths.
///
/// `threads` caps the worker count; when `None`, the `SIM_THREADS`
/// environment variable is consulted, then the library default.
pub fn run(config_path: &Path, out_dir: &Path, threads: Option<usize>) -> Result<Vec<PathBuf>> {
    let text = fs::read_to_string(config_path)?;
    let config = ExperimentConfig::from_json(&text)?;
    if let Some(error) = config.check().into_iter().next() {
        return Err(error);
    }
    fs::create_dir_all(out_dir)?;
    let pool = build_pool(threads)?;
    pool.install(|| execute(&config, out_dir))
}

fn execute(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    match config {
        ExperimentConfig::Scatter(c) => run_scatter(c, out_dir),
        ExperimentConfig::EntangleLinear(c) => run_entangle_linear(c, out_dir),
        ExperimentConfig::EntangleRing(c) => run_entangle_ring(c, out_dir),
        ExperimentConfig::CloneSymmetric(c) => run_clone_symmetric(c, out_dir),
        ExperimentConfig::CloneAsymmetric(c) => run_clone_asymmetric(c, out_dir),
        ExperimentConfig::CloneSweep(c) => run_clone_sweep(c, out_dir),
        ExperimentConfig::OracleCheck(c) => run_oracle_check(c, out_dir),
    }
}

/// Formats a float with fifteen significant digits, the CSV-wide rule.
fn fmt(x: f64) -> String {
    format!("{x:.14e}")
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct BellFidelities {
    phi_plus: f64,
    psi_plus: f64,
    psi_minus: f64,
}

impl BellFidelities {
    fn of(state: &TwoQubitState) -> Self {
        BellFidelities {
            phi_plus: state.bell_fidelity(BellKind::PhiPlus),
            psi_plus: state.bell_fidelity(BellKind::PsiPlus),
            psi_minus: state.bell_fidelity(BellKind::PsiMinus),
        }
    }
}

#[derive(Serialize)]
struct OutcomeOut {
    detector: &'static str,
    probability: f64,
    bell_fidelities: BellFidelities,
    /// Density matrix rows; each entry is `[re, im]`.
    rho: Vec<Vec<[f64; 2]>>,
}

impl OutcomeOut {
    fn of(outcome: &HeraldedOutcome) -> Self {
        OutcomeOut {
            detector: outcome.detector.label(),
            probability: outcome.probability,
            bell_fidelities: BellFidelities::of(&outcome.conditional_state),
            rho: outcome.conditional_state.rho().to_rows(),
        }
    }
}

fn run_scatter(c: &ScatterConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let gamma = c.emitter.gamma_total();
    let scales = match &c.sweep {
        Some(sweep) => sweep.values()?,
        None => vec![c.pulse.time_scale()],
    };

    struct Row {
        time_scale: f64,
        delta_omega: f64,
        p_transfer: f64,
        extra: String,
    }

    let rows: Vec<Row> = scales
        .par_iter()
        .map(|&scale| -> Result<Row> {
            let shape = c.pulse.with_time_scale(scale);
            let env = resolved_envelope(&shape, gamma, c.points_per_scale)?.normalized()?;
            let delta_omega = env.bandwidth()?;
            match c.method {
                MethodConfig::Direct => {
                    let result = scatter(&env, &c.emitter)?;
                    let defect = (result.p_res.total() - 1.0).abs();
                    Ok(Row {
                        time_scale: scale,
                        delta_omega,
                        p_transfer: result.p_transfer,
                        extra: fmt(defect),
                    })
                }
                MethodConfig::Adiabatic { order } => {
                    let p = transfer_probability_adiabatic(&env, &c.emitter, order)?;
                    let kept = env.moments(gamma, order)?.truncation_order;
                    Ok(Row {
                        time_scale: scale,
                        delta_omega,
                        p_transfer: p,
                        extra: kept.to_string(),
                    })
                }
            }
        })
        .collect::<Result<_>>()?;

    let header = match c.method {
        MethodConfig::Direct => "time_scale,delta_omega,p_transfer,conservation_defect",
        MethodConfig::Adiabatic { .. } => "time_scale,delta_omega,p_transfer,series_order",
    };
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt(r.time_scale),
                fmt(r.delta_omega),
                fmt(r.p_transfer),
                r.extra.clone(),
            ]
        })
        .collect();
    let csv_path = out_dir.join("scatter.csv");
    write_csv(&csv_path, header, &csv_rows)?;
    let mut written = vec![csv_path];

    // A single direct run also records the excited-state amplitude so the
    // dynamics can be plotted.
    if c.sweep.is_none() && c.method == MethodConfig::Direct {
        let env = resolved_envelope(&c.pulse, gamma, c.points_per_scale)?.normalized()?;
        let result = scatter(&env, &c.emitter)?;
        let grid = result.trajectory.grid().clone();
        let traj_rows: Vec<Vec<String>> = result
            .trajectory
            .psi_e()
            .iter()
            .enumerate()
            .map(|(k, psi)| vec![fmt(grid.t(k)), fmt(psi.re), fmt(psi.im)])
            .collect();
        let traj_path = out_dir.join("scatter_trajectory.csv");
        write_csv(&traj_path, "t,re_psi_e,im_psi_e", &traj_rows)?;
        written.push(traj_path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct MomentsOut {
    s: f64,
    r: f64,
    truncation_order: usize,
}

#[derive(Serialize)]
struct LinearOut {
    kind: &'static str,
    success_rate: f64,
    success_rate_formula: f64,
    s_perp: f64,
    moments: MomentsOut,
    non_herald_probability: f64,
    outcome: OutcomeOut,
    warnings: Vec<String>,
}

fn run_entangle_linear(c: &EntangleLinearConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let setup = LinearSetup {
        emitter_a: c.emitter_a,
        emitter_b: c.emitter_b,
        l_ab: c.l_ab,
        l_bd: c.l_bd,
    };
    let gamma = c.emitter_a.gamma_total().max(c.emitter_b.gamma_total());
    let env = resolved_envelope(&c.pulse, gamma, c.points_per_scale)?;
    let result = simulate_linear_entanglement(&setup, &env)?;
    let out = LinearOut {
        kind: "entangle-linear",
        success_rate: result.success_rate,
        success_rate_formula: result.success_rate_formula,
        s_perp: result.s_perp,
        moments: MomentsOut {
            s: result.moments.s,
            r: result.moments.r,
            truncation_order: result.moments.truncation_order,
        },
        non_herald_probability: result.non_herald_probability,
        outcome: OutcomeOut::of(&result.outcome),
        warnings: result.warnings.clone(),
    };
    let path = out_dir.join("entangle_linear.json");
    write_json(&path, &out)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct RingOut {
    kind: &'static str,
    success_rate: f64,
    success_rate_formula: f64,
    survivor_probability: f64,
    difference_probability: f64,
    loss_probability: f64,
    total_probability: f64,
    outcomes: Vec<OutcomeOut>,
}

fn run_entangle_ring(c: &EntangleRingConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let setup = c.setup();
    let env = resolved_envelope(&c.pulse, setup.emitter_a.gamma_total(), c.points_per_scale)?;
    let result = simulate_ring_entanglement(&setup, &env)?;
    let out = RingOut {
        kind: "entangle-ring",
        success_rate: result.success_rate,
        success_rate_formula: result.success_rate_formula,
        survivor_probability: result.survivor_probability,
        difference_probability: result.difference_probability,
        loss_probability: result.loss_probability,
        total_probability: result.total_probability(),
        outcomes: result.outcomes.iter().map(OutcomeOut::of).collect(),
    };
    let path = out_dir.join("entangle_ring.json");
    write_json(&path, &out)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct CloneBranchOut {
    detector: &'static str,
    probability: f64,
    fidelity_a: f64,
    fidelity_b: f64,
    /// Reduced density matrix of clone A; entries are `[re, im]`.
    rho_a: Vec<Vec<[f64; 2]>>,
    /// Reduced density matrix of clone B; entries are `[re, im]`.
    rho_b: Vec<Vec<[f64; 2]>>,
}

impl CloneBranchOut {
    fn of(branch: &CloneBranch) -> Self {
        CloneBranchOut {
            detector: branch.detector.label(),
            probability: branch.probability,
            fidelity_a: branch.fidelity_a,
            fidelity_b: branch.fidelity_b,
            rho_a: branch.rho_a.to_rows(),
            rho_b: branch.rho_b.to_rows(),
        }
    }
}

#[derive(Serialize)]
struct SymmetricFormulaOut {
    s: f64,
    success_probability: f64,
    fidelity: f64,
    one_shot_fidelity: f64,
}

#[derive(Serialize)]
struct CloneSymmetricOut {
    kind: &'static str,
    loss_probability: f64,
    one_shot_fidelity: f64,
    total_probability: f64,
    branches: Vec<CloneBranchOut>,
    /// Narrowband closed forms; present only for a lossless ring, where
    /// they apply.
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<SymmetricFormulaOut>,
}

fn run_clone_symmetric(c: &CloneSymmetricConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let setup = c.setup();
    let env = resolved_envelope(&c.pulse, setup.emitter_a.gamma_total(), c.points_per_scale)?;
    let qubit = c.qubit.to_qubit()?;
    let result = simulate_symmetric_cloning(&setup, &env, &qubit)?;
    let closed_form = if c.gamma_other == 0.0 {
        env.clone()
            .normalized()?
            .moments(setup.emitter_a.gamma_total(), 5)
            .ok()
            .map(|m| SymmetricFormulaOut {
                s: m.s,
                success_probability: symmetric_probability_formula(m.s),
                fidelity: symmetric_fidelity_formula(m.s),
                one_shot_fidelity: symmetric_one_shot_formula(m.s),
            })
    } else {
        None
    };
    let out = CloneSymmetricOut {
        kind: "clone-symmetric",
        loss_probability: result.loss_probability,
        one_shot_fidelity: result.one_shot_fidelity,
        total_probability: result.total_probability(),
        branches: result.branches.iter().map(CloneBranchOut::of).collect(),
        closed_form,
    };
    let path = out_dir.join("clone_symmetric.json");
    write_json(&path, &out)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct AsymmetricFormulaOut {
    fidelity_a: f64,
    fidelity_b: f64,
    success_rate: f64,
}

#[derive(Serialize)]
struct CloneAsymmetricOut {
    kind: &'static str,
    eta_bar_a: f64,
    eta_bar_b: f64,
    loss_probability: f64,
    one_shot_fidelity: f64,
    total_probability: f64,
    branches: Vec<CloneBranchOut>,
    /// Narrowband closed forms for this input state; exact for the
    /// ideal route, a reference value for the pulsed route.
    closed_form: AsymmetricFormulaOut,
}

fn run_clone_asymmetric(c: &CloneAsymmetricConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let setup = match &c.pulse {
        None => AsymmetricSetup::ideal(c.gamma_w),
        Some(shape) => AsymmetricSetup::with_input(c.gamma_w, shape.clone()),
    };
    let qubit = c.qubit.to_qubit()?;
    let result = simulate_asymmetric_cloning(&setup, &qubit, c.eta_bar_a, c.eta_bar_b)?;
    let (fidelity_a, fidelity_b) =
        asymmetric_fidelities(c.eta_bar_a, c.eta_bar_b, qubit.bloch_m());
    let out = CloneAsymmetricOut {
        kind: "clone-asymmetric",
        eta_bar_a: c.eta_bar_a,
        eta_bar_b: c.eta_bar_b,
        loss_probability: result.loss_probability,
        one_shot_fidelity: result.one_shot_fidelity,
        total_probability: result.total_probability(),
        branches: result.branches.iter().map(CloneBranchOut::of).collect(),
        closed_form: AsymmetricFormulaOut {
            fidelity_a,
            fidelity_b,
            success_rate: asymmetric_success_rate(c.eta_bar_a, c.eta_bar_b),
        },
    };
    let path = out_dir.join("clone_asymmetric.json");
    write_json(&path, &out)?;
    Ok(vec![path])
}

fn run_clone_sweep(c: &CloneSweepConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let a_values = c.eta_bar_a.values()?;
    let b_values = c.eta_bar_b.values()?;
    let points = crate::cloning::cloning_sweep(&a_values, &b_values, &c.sampler)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                fmt(p.eta_bar_a),
                fmt(p.eta_bar_b),
                fmt(p.f_a_avg),
                fmt(p.f_b_avg),
                fmt(p.success_rate),
            ]
        })
        .collect();
    let path = out_dir.join("clone_sweep.csv");
    write_csv(&path, "eta_bar_a,eta_bar_b,F_a,F_b,R", &rows)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct ReservoirsOut {
    w_es: f64,
    w_ef: f64,
    b_es: f64,
    b_ef: f64,
    other: f64,
    total: f64,
}

#[derive(Serialize)]
struct OracleCheckOut {
    kind: &'static str,
    dt_gamma: f64,
    p_transfer_amplitude: f64,
    p_transfer_binned: f64,
    p_transfer_difference: f64,
    reservoirs_amplitude: ReservoirsOut,
    reservoirs_binned: ReservoirsOut,
    max_norm_deviation: f64,
}

fn run_oracle_check(c: &OracleCheckConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let gamma = c.emitter.gamma_total();
    let env = resolved_envelope(&c.pulse, gamma, c.points_per_scale)?.normalized()?;
    let amplitude = scatter(&env, &c.emitter)?;
    let binned = evolve_collision(&env, &c.emitter, c.dt_gamma / gamma)?;
    let res_a = amplitude.p_res;
    let res_b = binned.reservoir_probabilities();
    let out = OracleCheckOut {
        kind: "oracle-check",
        dt_gamma: c.dt_gamma,
        p_transfer_amplitude: amplitude.p_transfer,
        p_transfer_binned: binned.p_transfer(),
        p_transfer_difference: (amplitude.p_transfer - binned.p_transfer()).abs(),
        reservoirs_amplitude: ReservoirsOut {
            w_es: res_a.w_es,
            w_ef: res_a.w_ef,
            b_es: res_a.b_es,
            b_ef: res_a.b_ef,
            other: res_a.other,
            total: res_a.total(),
        },
        reservoirs_binned: ReservoirsOut {
            w_es: res_b.w_es,
            w_ef: res_b.w_ef,
            b_es: res_b.b_es,
            b_ef: res_b.b_ef,
            other: res_b.other,
            total: res_b.total(),
        },
        max_norm_deviation: binned.max_norm_deviation(),
    };
    let path = out_dir.join("oracle_check.json");
    write_json(&path, &out)?;
    Ok(vec![path])
}
