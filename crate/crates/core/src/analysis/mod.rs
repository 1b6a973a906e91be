//! Diagnostics of the gate: branch separation, averaged fidelity and
//! purity, the anharmonic correction, and parameter scans.

pub mod anharmonic;
pub mod channel;
pub mod process;
pub mod scan;
pub mod separation;

use serde::{Deserialize, Serialize};

pub use anharmonic::{anharmonic_fidelity, anharmonic_fidelity_exact, AnharmonicFidelity, VarianceState};
pub use channel::{average_fidelity, average_purity, Channel};
pub use process::{internal_channel, Engine, ProcessOptions, ProcessResult};
pub use scan::{scan, RowFailure, ScanRow};
pub use separation::{separation_analytic, separation_numeric, SeparationCurve};

use crate::error::{Error, Result};
use crate::fock::{linalg, CMatrix, FockDim};
use crate::gate::conditions::{condition_solver_with, ConditionReport, ConditionThresholds};
use crate::gate::engine::{CompiledGate, MotionalState, DENSE_MOTIONAL_LIMIT};
use crate::gate::{ideal_gate, FlipModel, GateSchedule, KickDirection, KickPulse};
use crate::trap::{anharmonic_expansion, relative_mode_occupation, ModeBasis, TrapSpec};

/// Step (ii) variant used by [`evaluate_gate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipMode {
    Gaussian,
    Idealized,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnharmonicSettings {
    pub order: u32,
    pub quadrature_points: usize,
    pub variance_state: VarianceState,
    /// Factor applied to every coefficient.
    pub scale: f64,
    /// Also propagate the gate under the full anharmonic Hamiltonian when the
    /// motional space is small enough.
    pub full_dynamics: bool,
}

impl Default for AnharmonicSettings {
    fn default() -> Self {
        Self {
            order: 4,
            quadrature_points: 256,
            variance_state: VarianceState::Initial,
            scale: 1.0,
            full_dynamics: false,
        }
    }
}

/// Everything needed to simulate one gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateSettings {
    pub eta: f64,
    pub n_pulses: u32,
    pub n_bar_c: f64,
    pub n_cycles: u32,
    pub flip: FlipMode,
    /// Addressed pulse duration as a fraction of the gate period.
    pub t1_fraction: f64,
    pub thresholds: ConditionThresholds,
    /// Explicit `(N_c, N_r)`; default truncation when absent.
    pub dims: Option<(usize, usize)>,
    pub drop_tol: f64,
    pub anharmonic: Option<AnharmonicSettings>,
    pub check_convergence: bool,
    pub convergence_tol: f64,
}

impl Default for GateSettings {
    fn default() -> Self {
        Self {
            eta: 7.0,
            n_pulses: 1,
            n_bar_c: 0.0,
            n_cycles: 3,
            flip: FlipMode::Gaussian,
            t1_fraction: 0.01,
            thresholds: ConditionThresholds::default(),
            dims: None,
            drop_tol: 1e-6,
            anharmonic: None,
            check_convergence: false,
            convergence_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationInfo {
    pub dim_c: usize,
    pub dim_r: usize,
    pub engine: Engine,
    pub components: usize,
    /// Change of the fidelity when both dimensions are doubled.
    pub doubling_change: Option<f64>,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub eta: f64,
    pub n_bar_c: f64,
    pub n_bar_r: f64,
    pub flip: FlipMode,
    pub fidelity: f64,
    pub purity: f64,
    pub f_cor: Option<f64>,
    pub f_cor_converged: Option<bool>,
    /// Whether both free evolutions included the anharmonic terms.
    pub anharmonic_dynamics: bool,
    pub restoration: Option<f64>,
    pub phase_correction: [f64; 2],
    pub condition_report: Option<ConditionReport>,
    pub truncation: TruncationInfo,
}

/// Target of a gate run: the conditional flip, or the identity when no
/// addressed pulse is applied.
pub fn target_for(flip: FlipMode) -> CMatrix {
    match flip {
        FlipMode::Off => linalg::identity(4),
        _ => ideal_gate(),
    }
}

struct CoreRun {
    fidelity: f64,
    purity: f64,
    process: ProcessResult,
    schedule: GateSchedule,
    report: Option<ConditionReport>,
    anharmonic_dynamics: bool,
}

fn run_core(spec: &TrapSpec, s: &GateSettings, basis: &ModeBasis, restoration: bool) -> Result<CoreRun> {
    let mut report = None;
    let flip = match s.flip {
        FlipMode::Gaussian => {
            let duration = s.t1_fraction * basis.gate_time();
            let (pulse, r) = condition_solver_with(basis, s.n_bar_c, s.n_cycles, duration, s.thresholds)?;
            report = Some(r);
            FlipModel::Gaussian(pulse)
        }
        FlipMode::Idealized => FlipModel::Idealized,
        FlipMode::Off => FlipModel::Off,
    };
    let kick = KickPulse { eta_effective: s.eta, n_pulses: s.n_pulses, direction: KickDirection::Positive };
    let schedule = GateSchedule::standard(basis, kick, flip)?;
    let expansion = match &s.anharmonic {
        Some(a) if a.full_dynamics && a.order > 0 => {
            if basis.motional_dim() > DENSE_MOTIONAL_LIMIT {
                log::warn!(
                    "motional dimension {} too large for full anharmonic dynamics; using harmonic propagation",
                    basis.motional_dim()
                );
                None
            } else {
                Some(anharmonic_expansion(spec, a.order)?.scaled(a.scale))
            }
        }
        _ => None,
    };
    let gate = CompiledGate::compile(basis, &schedule, expansion.as_ref())?;
    let motion = MotionalState::thermal(basis, s.n_bar_c, relative_mode_occupation(s.n_bar_c))?;
    let opts = ProcessOptions { drop_tol: s.drop_tol, restoration };
    let process = internal_channel(&gate, &motion, &opts)?;
    let target = target_for(s.flip);
    Ok(CoreRun {
        fidelity: average_fidelity(&process.channel, &target)?,
        purity: average_purity(&process.channel),
        process,
        schedule,
        report,
        anharmonic_dynamics: expansion.is_some(),
    })
}

/// Builds the basis, solves the addressing conditions, runs the gate on the
/// thermal state and evaluates every figure of merit.
pub fn evaluate_gate(spec: &TrapSpec, s: &GateSettings) -> Result<GateReport> {
    if !(s.eta > 0.0) && s.flip == FlipMode::Gaussian {
        return Err(Error::InvalidParameter("Gaussian addressing needs eta > 0".into()));
    }
    let basis = match s.dims {
        Some((dc, dr)) => ModeBasis::new(spec, s.eta, FockDim::new(dc)?, FockDim::new(dr)?)?,
        None => ModeBasis::with_default_truncation(spec, s.eta, s.n_bar_c)?,
    };
    let core = run_core(spec, s, &basis, true)?;
    let (doubling_change, converged) = if s.check_convergence {
        let fine = basis.with_dims(basis.dim_c.doubled(), basis.dim_r.doubled());
        let f = run_core(spec, s, &fine, false)?.fidelity;
        let change = (f - core.fidelity).abs();
        (Some(change), Some(change <= s.convergence_tol))
    } else {
        (None, None)
    };
    let (f_cor, f_cor_converged) = match &s.anharmonic {
        Some(a) => {
            let expansion = anharmonic_expansion(spec, a.order)?.scaled(a.scale);
            let motion = MotionalState::thermal(&basis, s.n_bar_c, relative_mode_occupation(s.n_bar_c))?
                .to_ensemble(s.drop_tol)?;
            let state = anharmonic::variance_state(&basis, &motion, a.variance_state)?;
            let r = anharmonic_fidelity(&basis, &expansion, &state, a.quadrature_points)?;
            (Some(r.f_cor), Some(r.converged))
        }
        None => (None, None),
    };
    Ok(GateReport {
        eta: s.eta,
        n_bar_c: s.n_bar_c,
        n_bar_r: relative_mode_occupation(s.n_bar_c),
        flip: s.flip,
        fidelity: core.fidelity,
        purity: core.purity,
        f_cor,
        f_cor_converged,
        anharmonic_dynamics: core.anharmonic_dynamics,
        restoration: core.process.restoration,
        phase_correction: core.schedule.phase_correction,
        condition_report: core.report,
        truncation: TruncationInfo {
            dim_c: basis.dim_c.get(),
            dim_r: basis.dim_r.get(),
            engine: core.process.engine,
            components: core.process.components,
            doubling_change,
            converged,
        },
    })
}
