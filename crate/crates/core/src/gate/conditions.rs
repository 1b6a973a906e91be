//! Laser parameters for the position-conditional flip, and the checks that
//! decide whether a parameter set can work at a given temperature.

use std::f64::consts::PI;

use serde::Serialize;

use super::{central_pulse_area, AddressedPulse};
use crate::error::{Error, Result};
use crate::trap::{relative_mode_occupation, ModeBasis};

/// How strictly the "much greater than" requirements are read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionThresholds {
    /// Factor standing in for `≫`.
    pub margin: f64,
    /// Smallest cycle count accepted as `4N ≫ 1`.
    pub min_cycles: u32,
    /// Allowed deviation (rad) of either branch's angle from its target.
    pub rabi_tolerance: f64,
}

impl Default for ConditionThresholds {
    fn default() -> Self {
        Self { margin: 3.0, min_cycles: 3, rabi_tolerance: 1e-2 }
    }
}

/// Pass/fail of each requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionFlags {
    /// `W ≫ D ≫ Δ`.
    pub scale_hierarchy: bool,
    /// Right branch rotated by `(2N+½)π`, left by `2Nπ`, with the full profile.
    pub rabi_matching: bool,
    /// Rotation angle nearly constant across one wavepacket.
    pub uniform_over_packet: bool,
    /// `4N ≫ 1`.
    pub many_cycles: bool,
    /// `η ≫ √(4n̄_c + 2n̄_r + 3)/(3√3)`.
    pub eta_large: bool,
}

impl ConditionFlags {
    pub fn all(&self) -> bool {
        self.scale_hierarchy && self.rabi_matching && self.uniform_over_packet && self.many_cycles && self.eta_large
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub eta: f64,
    pub n_bar_c: f64,
    pub n_bar_r: f64,
    pub n_cycles: u32,
    /// Maximal branch separation.
    pub d: f64,
    /// Thermal wavepacket size of ion 1.
    pub delta: f64,
    pub w: f64,
    pub l: f64,
    pub w_over_d: f64,
    pub d_over_delta: f64,
    pub omega0: f64,
    pub duration: f64,
    /// `Ω(x_e/2)·t₁/2`.
    pub pulse_area: f64,
    pub theta_right: f64,
    pub theta_left: f64,
    pub rabi_residual: f64,
    /// Angle change across one packet width, `(t₁/2)|Ω'|Δ`.
    pub angle_spread: f64,
    pub eta_bound: f64,
    /// `η` divided by its lower bound.
    pub eta_bound_ratio: f64,
    pub thresholds: ConditionThresholds,
    pub flags: ConditionFlags,
    pub satisfied: bool,
}

/// Maximal separation `3√3·x0·η/2` of the two branches of ion 1.
pub fn max_separation(x0: f64, eta: f64) -> f64 {
    1.5 * 3f64.sqrt() * x0 * eta
}

/// Wavepacket size `√(n̄_c + n̄_r/2 + 3/4)·x0`.
pub fn packet_size(x0: f64, n_bar_c: f64) -> f64 {
    (n_bar_c + relative_mode_occupation(n_bar_c) / 2.0 + 0.75).sqrt() * x0
}

/// Lower bound on η for a thermal state of occupation `n_bar_c`.
pub fn eta_lower_bound(n_bar_c: f64) -> f64 {
    let n_bar_r = relative_mode_occupation(n_bar_c);
    (4.0 * n_bar_c + 2.0 * n_bar_r + 3.0).sqrt() / (3.0 * 3f64.sqrt())
}

/// Pulse with default thresholds and `t₁ = t_g/100`.
pub fn condition_solver(basis: &ModeBasis, n_bar_c: f64, n_cycles: u32) -> Result<(AddressedPulse, ConditionReport)> {
    condition_solver_with(basis, n_bar_c, n_cycles, basis.gate_time() / 100.0, ConditionThresholds::default())
}

/// Builds the Gaussian pulse for `basis.eta` and `N = n_cycles`:
/// `W = (4N+½)D`, `l = x_e/2 + W`, and `Ω(x_e/2)t₁/2 = (2N+¼)π`.
pub fn condition_solver_with(
    basis: &ModeBasis,
    n_bar_c: f64,
    n_cycles: u32,
    duration: f64,
    thresholds: ConditionThresholds,
) -> Result<(AddressedPulse, ConditionReport)> {
    if n_cycles < 1 {
        return Err(Error::InvalidParameter("the number of Rabi cycles must be at least 1".into()));
    }
    if !(basis.eta > 0.0) {
        return Err(Error::InvalidParameter(format!("addressing needs a positive kick, got eta = {}", basis.eta)));
    }
    if !(n_bar_c >= 0.0) || !n_bar_c.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid mean occupation {n_bar_c}")));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid pulse duration {duration}")));
    }
    let n = n_cycles as f64;
    let d = max_separation(basis.x0, basis.eta);
    let w = (4.0 * n + 0.5) * d;
    let l = basis.x_e / 2.0 + w;
    let pulse_area = central_pulse_area(n_cycles);
    // Ω(x_e/2) = Ω₀ e^{-1/2} at the steepest point
    let omega0 = 2.0 * pulse_area / duration * 0.5f64.exp();
    let pulse = AddressedPulse { omega0, center: l, width: w, duration };

    let n_bar_r = relative_mode_occupation(n_bar_c);
    let delta = packet_size(basis.x0, n_bar_c);
    let theta_right = pulse.rotation_angle(basis.x_e / 2.0 + d / 2.0);
    let theta_left = pulse.rotation_angle(basis.x_e / 2.0 - d / 2.0);
    let rabi_residual =
        (theta_right - (2.0 * n + 0.5) * PI).abs().max((theta_left - 2.0 * n * PI).abs());
    let angle_spread = pulse_area * delta / w;
    let eta_bound = eta_lower_bound(n_bar_c);
    let m = thresholds.margin;
    let flags = ConditionFlags {
        scale_hierarchy: w / d >= m && d / delta >= m,
        rabi_matching: rabi_residual <= thresholds.rabi_tolerance,
        uniform_over_packet: angle_spread <= (PI / 2.0) / m,
        many_cycles: n_cycles >= thresholds.min_cycles,
        eta_large: basis.eta >= eta_bound * m,
    };
    let report = ConditionReport {
        eta: basis.eta,
        n_bar_c,
        n_bar_r,
        n_cycles,
        d,
        delta,
        w,
        l,
        w_over_d: w / d,
        d_over_delta: d / delta,
        omega0,
        duration,
        pulse_area,
        theta_right,
        theta_left,
        rabi_residual,
        angle_spread,
        eta_bound,
        eta_bound_ratio: basis.eta / eta_bound,
        thresholds,
        satisfied: flags.all(),
        flags,
    };
    Ok((pulse, report))
}
