//! The three-step gate: state-dependent kicks on ion 2, free harmonic
//! evolution, and a position-conditional flip of ion 1.

pub mod conditions;
pub mod engine;

use std::f64::consts::PI;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{CMatrix, C64, ONE, ZERO};
use crate::trap::{AnharmonicExpansion, ModeBasis};

pub use conditions::{condition_solver, ConditionReport, ConditionThresholds};
pub use engine::{CompiledGate, CompositeVector, MotionalEnsemble, MotionalState, SystemState};

/// Direction of the first pulse's wavevector along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KickDirection {
    Positive,
    Negative,
}

impl KickDirection {
    fn sign(self) -> f64 {
        match self {
            KickDirection::Positive => 1.0,
            KickDirection::Negative => -1.0,
        }
    }

    fn reversed(self) -> Self {
        match self {
            KickDirection::Positive => KickDirection::Negative,
            KickDirection::Negative => KickDirection::Positive,
        }
    }
}

/// Instantaneous state-dependent kick on ion 2, possibly a train of
/// alternating π pulses acting as one kick of amplified strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KickPulse {
    pub eta_effective: f64,
    pub n_pulses: u32,
    pub direction: KickDirection,
}

impl KickPulse {
    pub fn single(eta: f64) -> Self {
        Self { eta_effective: eta, n_pulses: 1, direction: KickDirection::Positive }
    }

    pub fn train(eta_single: f64, n_pulses: u32) -> Result<Self> {
        Ok(Self {
            eta_effective: pulse_train(eta_single, n_pulses)?,
            n_pulses,
            direction: KickDirection::Positive,
        })
    }

    /// An odd number of π pulses leaves qubit 2 flipped.
    pub fn flips_qubit(&self) -> bool {
        self.n_pulses % 2 == 1
    }

    /// Signed momentum transfer (in units of k) for qubit-2 value `s` before
    /// the kick.
    pub fn kick_sign(&self, s: usize) -> f64 {
        self.direction.sign() * if s == 0 { 1.0 } else { -1.0 }
    }

    /// The kick that undoes this one after a full motional period.
    pub fn closing_partner(&self) -> Self {
        let direction = if self.flips_qubit() { self.direction } else { self.direction.reversed() };
        Self { direction, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta_effective >= 0.0) || !self.eta_effective.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kick strength must be nonnegative, got {}",
                self.eta_effective
            )));
        }
        if self.n_pulses == 0 {
            return Err(Error::InvalidParameter("a kick needs at least one pulse".into()));
        }
        Ok(())
    }
}

/// Effective Lamb-Dicke parameter of `n_pulses` alternating π pulses.
pub fn pulse_train(eta_single: f64, n_pulses: u32) -> Result<f64> {
    if n_pulses == 0 {
        return Err(Error::InvalidParameter("pulse train needs at least one pulse".into()));
    }
    Ok(n_pulses as f64 * eta_single)
}

/// Number of single pulses needed to reach `eta_target`. Ratios within
/// 1e-9 (relative) of an integer count as that integer.
pub fn pulses_for_eta(eta_single: f64, eta_target: f64) -> u32 {
    let x = eta_target / eta_single;
    let n = x.round();
    if (x - n).abs() <= 1e-9 * x.abs() {
        n as u32
    } else {
        x.ceil() as u32
    }
}

/// Gaussian-profile pulse on ion 1, `Ω(x) = Ω₀ exp(−(x−l)²/(2W²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AddressedPulse {
    pub omega0: f64,
    pub center: f64,
    pub width: f64,
    pub duration: f64,
}

impl AddressedPulse {
    pub fn rabi_frequency(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        self.omega0 * (-0.5 * u * u).exp()
    }

    /// Rotation angle `Ω(x) t₁ / 2` of the qubit-1 rotation `exp(−iθσˣ)`.
    pub fn rotation_angle(&self, x: f64) -> f64 {
        0.5 * self.rabi_frequency(x) * self.duration
    }

    fn validate(&self, gate_time: f64) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::InvalidParameter(format!("beam width must be positive, got {}", self.width)));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse duration must be positive, got {}",
                self.duration
            )));
        }
        if !self.omega0.is_finite() || !self.center.is_finite() {
            return Err(Error::InvalidParameter("non-finite pulse parameters".into()));
        }
        if self.duration >= gate_time / 20.0 {
            log::warn!(
                "addressed pulse lasts {} of a gate period; the instantaneous treatment assumes t1 << t_g",
                self.duration / gate_time
            );
        }
        Ok(())
    }
}

/// How step (ii) acts on ion 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FlipModel {
    /// Position-dependent rotation from a Gaussian beam.
    Gaussian(AddressedPulse),
    /// σˣ₁ applied exactly on the right-moving branch, read off qubit 2.
    Idealized,
    /// No pulse at all.
    Off,
}

/// Timing and pulses of one gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateSchedule {
    pub t0: f64,
    pub t_g: f64,
    pub kick_open: KickPulse,
    pub kick_close: KickPulse,
    pub flip: FlipModel,
    /// Phases removed from qubit-2 states |0⟩ and |1⟩ after the closing kick.
    pub phase_correction: [f64; 2],
}

impl GateSchedule {
    /// Standard timing `t0 = 2π/(3ν_c)`, `t_g = 2π/ν_c`, with the kick built
    /// for `basis.eta` and the local phase correction matched to `flip`.
    pub fn standard(basis: &ModeBasis, kick: KickPulse, flip: FlipModel) -> Result<Self> {
        let mut schedule = Self {
            t0: basis.split_time(),
            t_g: basis.gate_time(),
            kick_open: kick,
            kick_close: kick.closing_partner(),
            flip,
            phase_correction: [0.0; 2],
        };
        schedule.phase_correction = branch_phase_correction(basis, &schedule);
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0 < self.t_g) {
            return Err(Error::InvalidParameter(format!(
                "flip time {} must lie strictly inside the gate period {}",
                self.t0, self.t_g
            )));
        }
        self.kick_open.validate()?;
        self.kick_close.validate()?;
        if let FlipModel::Gaussian(p) = &self.flip {
            p.validate(self.t_g)?;
        }
        Ok(())
    }

    /// Qubit-2 value carried by the right-moving branch between the kicks.
    pub fn right_branch_qubit2(&self) -> usize {
        let initial = if self.kick_open.kick_sign(0) > 0.0 { 0 } else { 1 };
        if self.kick_open.flips_qubit() {
            1 - initial
        } else {
            initial
        }
    }
}

/// Phases that align each branch's nominal qubit-1 action with the nearest
/// phase-free Pauli operator.
///
/// The branch starting in qubit-2 state `s` sits at `x_e/2 ± D/2` at the flip
/// time and receives `cos θ − i sin θ σˣ`; the dominant term's phase is
/// removed from qubit-2 state `s` at the end of the gate.
pub fn branch_phase_correction(basis: &ModeBasis, schedule: &GateSchedule) -> [f64; 2] {
    let FlipModel::Gaussian(pulse) = schedule.flip else {
        return [0.0; 2];
    };
    let d_max = 3.0 * 3f64.sqrt() / 2.0 * basis.x0 * schedule.kick_open.eta_effective;
    let mut out = [0.0; 2];
    for (s, slot) in out.iter_mut().enumerate() {
        let x = basis.x_e / 2.0 + schedule.kick_open.kick_sign(s) * d_max / 2.0;
        let theta = pulse.rotation_angle(x);
        let (c, sn) = (theta.cos(), theta.sin());
        *slot = if sn.abs() >= c.abs() {
            C64::new(0.0, -sn).arg()
        } else {
            C64::new(c, 0.0).arg()
        };
    }
    out
}

/// Target gate `P₂(|1⟩) ⊗ I₁ + P₂(|0⟩) ⊗ σˣ₁` in the order qubit₁ ⊗ qubit₂:
/// qubit 1 flips exactly when qubit 2 is |0⟩.
pub fn ideal_gate() -> CMatrix {
    let mut u = Array2::from_elem((4, 4), ZERO);
    for q1 in 0..2 {
        for q2 in 0..2 {
            let input = 2 * q1 + q2;
            let output = if q2 == 0 { 2 * (1 - q1) + q2 } else { input };
            u[[output, input]] = ONE;
        }
    }
    u
}

/// Dense kick unitary on the full composite space.
pub fn kick_unitary(basis: &ModeBasis, pulse: &KickPulse) -> Result<CMatrix> {
    pulse.validate()?;
    CompiledGate::from_steps(basis, vec![engine::kick_step(basis, pulse)?]).to_dense()
}

/// Dense harmonic propagator `exp(−iH_ho t)`, identity on the qubits.
pub fn free_propagator(basis: &ModeBasis, t: f64) -> Result<CMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("evolution time must be nonnegative, got {t}")));
    }
    CompiledGate::from_steps(basis, vec![engine::harmonic_step(basis, t)]).to_dense()
}

/// Dense position-conditional rotation of qubit 1,
/// `exp[−i (t₁/2) Ω(x̂₁) σˣ₁]` with `x̂₁ = x̂_c + (x̂_r + x_e)/2`.
pub fn addressed_flip_unitary(basis: &ModeBasis, pulse: &AddressedPulse) -> Result<CMatrix> {
    pulse.validate(basis.gate_time())?;
    CompiledGate::from_steps(basis, vec![engine::rotation_step(basis, pulse)?]).to_dense()
}

/// Runs the full schedule on `initial`.
///
/// With `anharmonic`, both free evolutions use `exp(−i(H_ho + V_cor)t)` built
/// densely on the motional space.
pub fn run_gate(
    basis: &ModeBasis,
    schedule: &GateSchedule,
    initial: &SystemState,
    anharmonic: Option<&AnharmonicExpansion>,
) -> Result<SystemState> {
    let gate = CompiledGate::compile(basis, schedule, anharmonic)?;
    gate.run(initial)
}

/// Angle `(2N + 1/4)π` targeted at the beam's steepest point.
pub fn central_pulse_area(n_cycles: u32) -> f64 {
    (2.0 * n_cycles as f64 + 0.25) * PI
}
