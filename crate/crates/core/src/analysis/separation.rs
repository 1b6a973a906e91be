//! Distance between the two wavepacket branches of ion 1 after the first
//! kick, in closed form and from propagation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::linalg::{dagger, CMatrix, C64};
use crate::fock::{self, DensityOp, FockDim};
use crate::trap::{relative_mode_occupation, ModeBasis};

/// `2x0η[sin(ν_c t) − (ν_c/ν_r) sin(ν_r t)]`; reduces to
/// `2x0η[sin(ν_c t) − ½ sin(2ν_c t)]` when `ν_r = 2ν_c`.
pub fn separation_analytic(basis: &ModeBasis, eta_eff: f64, t: f64) -> f64 {
    let (nc, nr) = (basis.nu_c, basis.nu_r);
    2.0 * basis.x0 * eta_eff * ((nc * t).sin() - nc / nr * (nr * t).sin())
}

/// Signed centroid distance `⟨x̂₁⟩_R − ⟨x̂₁⟩_L` at each time, for branches
/// kicked by `±k` from a thermal state of occupation `n_bar_c`.
pub fn separation_numeric(basis: &ModeBasis, eta_eff: f64, n_bar_c: f64, times: &[f64]) -> Result<Vec<f64>> {
    let b = basis.with_eta(eta_eff);
    let rho_c = fock::thermal_state(n_bar_c, b.dim_c)?;
    let rho_r = fock::thermal_state(relative_mode_occupation(n_bar_c), b.dim_r)?;
    let branch = |sign: f64| -> Result<(ModeTrack, ModeTrack)> {
        Ok((
            ModeTrack::kicked(&rho_c, C64::new(0.0, sign * b.eta_c), b.dim_c, b.width_c)?,
            ModeTrack::kicked(&rho_r, C64::new(0.0, -sign * b.eta_r), b.dim_r, b.width_r)?,
        ))
    };
    let (rc, rr) = branch(1.0)?;
    let (lc, lr) = branch(-1.0)?;
    Ok(times
        .iter()
        .map(|&t| {
            let x_r = rc.mean_position(b.nu_c, t) + 0.5 * rr.mean_position(b.nu_r, t);
            let x_l = lc.mean_position(b.nu_c, t) + 0.5 * lr.mean_position(b.nu_r, t);
            x_r - x_l
        })
        .collect())
}

/// First off-diagonal of a displaced single-mode state, which is all the
/// centroid of a free oscillator depends on.
struct ModeTrack {
    /// `Σ_n √n ρ_{n, n−1}` = `⟨a⟩` at t = 0.
    mean_a: C64,
    width: f64,
}

impl ModeTrack {
    fn kicked(rho: &DensityOp, alpha: C64, dim: FockDim, width: f64) -> Result<Self> {
        let d = fock::displacement(alpha, dim)?;
        let kicked: CMatrix = d.dot(rho.matrix()).dot(&dagger(&d));
        // ⟨a⟩ = Tr(ρ a) = Σ_n √n ρ_{n,n−1}
        let mean_a = (1..dim.get()).map(|n| kicked[[n, n - 1]] * (n as f64).sqrt()).sum();
        Ok(Self { mean_a, width })
    }

    /// `⟨x(t)⟩ = 2w Re(⟨a⟩ e^{−iνt})` under free harmonic evolution.
    fn mean_position(&self, nu: f64, t: f64) -> f64 {
        2.0 * self.width * (self.mean_a * C64::from_polar(1.0, -nu * t)).re
    }
}

/// Sampled branch separation with a truncation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationCurve {
    pub times: Vec<f64>,
    pub d_analytic: Vec<f64>,
    pub d_numeric: Vec<f64>,
    /// Largest change of `d_numeric` when both dimensions are doubled.
    pub doubling_change: f64,
    pub converged: bool,
}

impl SeparationCurve {
    /// `samples` equally spaced times over `[0, t_g]`.
    pub fn compute(basis: &ModeBasis, eta_eff: f64, n_bar_c: f64, samples: usize, tol: f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidParameter("a separation curve needs at least two samples".into()));
        }
        let tg = basis.gate_time();
        let times: Vec<f64> = (0..samples).map(|i| tg * i as f64 / (samples - 1) as f64).collect();
        let d_analytic = times.iter().map(|&t| separation_analytic(basis, eta_eff, t)).collect();
        let d_numeric = separation_numeric(basis, eta_eff, n_bar_c, &times)?;
        let doubled = basis.with_dims(basis.dim_c.doubled(), basis.dim_r.doubled());
        let d_fine = separation_numeric(&doubled, eta_eff, n_bar_c, &times)?;
        let doubling_change = d_numeric.iter().zip(&d_fine).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        Ok(Self { times, d_analytic, d_numeric, doubling_change, converged: doubling_change <= tol })
    }

    pub fn max_abs_error(&self) -> f64 {
        self.d_analytic.iter().zip(&self.d_numeric).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}
