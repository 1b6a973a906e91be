//! Gate error from the cubic and higher terms of the trap potential.
//!
//! To lowest order the anharmonic remainder acts through its time integral
//! in the interaction picture, `Ṽ = ∫₀^{t_g} e^{iH_ho τ} V_cor e^{−iH_ho τ} dτ`,
//! and the fidelity is `1 − (⟨Ṽ²⟩ − ⟨Ṽ⟩²)`.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::linalg::{self, CMatrix, C64, ZERO};
use crate::gate::engine::{kick_step_operators, MotionalEnsemble};
use crate::gate::KickPulse;
use crate::trap::{self, matrix_power, AnharmonicExpansion, ModeBasis};

/// Terms whose integral is below this fraction of `t_g` are dropped.
const INTEGRAL_CUTOFF: f64 = 1e-12;

/// Which motional state the variance is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VarianceState {
    /// The motional state before the first kick.
    #[default]
    Initial,
    /// Equal mixture of the two branches right after the first kick.
    Kicked,
}

/// `∫₀^{t_g} e^{iωτ} dτ` by composite Simpson with `points` intervals.
pub fn simpson_phase_integral(omega: f64, t_g: f64, points: usize) -> C64 {
    let n = points + points % 2;
    let h = t_g / n as f64;
    let mut acc = ZERO;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += C64::from_polar(w, omega * h * i as f64);
    }
    acc * (h / 3.0)
}

/// One `(s, u)` band product of `x_c^a ⊗ x_r^b`.
struct BandTerm {
    weight: C64,
    c: CMatrix,
    r_t: CMatrix,
}

/// Matrix-free `Ṽ` on `N_c × N_r` motional arrays.
pub struct InteractionIntegral {
    terms: Vec<BandTerm>,
    dims: (usize, usize),
}

/// Part of `m` on the diagonal `row − col = s`.
fn band(m: &CMatrix, s: i64) -> CMatrix {
    let mut out = CMatrix::zeros(m.dim());
    for ((i, j), z) in m.indexed_iter() {
        if i as i64 - j as i64 == s {
            out[[i, j]] = *z;
        }
    }
    out
}

impl InteractionIntegral {
    pub fn new(basis: &ModeBasis, expansion: &AnharmonicExpansion, points: usize) -> Result<Self> {
        let dims = (basis.dim_c.get(), basis.dim_r.get());
        let xc = basis.position_c()?;
        let xr = basis.position_r()?;
        let tg = basis.gate_time();
        let mut cache: BTreeMap<(i64, i64), C64> = BTreeMap::new();
        let mut terms = Vec::new();
        for (&(a, b), &coef) in &expansion.coefficients {
            let (pc, pr) = (matrix_power(&xc, a), matrix_power(&xr, b));
            for s in (-(a as i64)..=a as i64).step_by(2) {
                for u in (-(b as i64)..=b as i64).step_by(2) {
                    let integral = *cache.entry((s, u)).or_insert_with(|| {
                        simpson_phase_integral(s as f64 * basis.nu_c + u as f64 * basis.nu_r, tg, points)
                    });
                    if integral.norm() < INTEGRAL_CUTOFF * tg {
                        continue;
                    }
                    terms.push(BandTerm {
                        weight: integral * coef,
                        c: band(&pc, s),
                        r_t: band(&pr, u).t().to_owned(),
                    });
                }
            }
        }
        Ok(Self { terms, dims })
    }

    pub fn apply(&self, psi: &Array2<C64>) -> Array2<C64> {
        let mut out = Array2::zeros(self.dims);
        for t in &self.terms {
            out.scaled_add(t.weight, &t.c.dot(psi).dot(&t.r_t));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variance of `Ṽ` over a mixture.
    pub fn variance(&self, state: &MotionalEnsemble) -> f64 {
        let mut mean = ZERO;
        let mut second = 0.0;
        for (p, phi) in state.components() {
            let v = self.apply(phi);
            mean += *p * phi.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum::<C64>();
            second += *p * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        second - mean.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnharmonicFidelity {
    pub f_cor: f64,
    pub points: usize,
    /// Change of `f_cor` when the quadrature points are doubled.
    pub doubling_change: f64,
    pub converged: bool,
}

/// Quadrature is converged when doubling the points moves the result by at
/// most this much.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Perturbative fidelity over `state`, with a quadrature doubling check.
pub fn anharmonic_fidelity(
    basis: &ModeBasis,
    expansion: &AnharmonicExpansion,
    state: &MotionalEnsemble,
    points: usize,
) -> Result<AnharmonicFidelity> {
    if points < 64 {
        return Err(Error::InvalidParameter(format!("need at least 64 quadrature points, got {points}")));
    }
    if state.dims() != (basis.dim_c.get(), basis.dim_r.get()) {
        return Err(Error::Shape("motional state does not match the basis".into()));
    }
    let f = |n: usize| -> Result<f64> {
        Ok(1.0 - InteractionIntegral::new(basis, expansion, n)?.variance(state))
    };
    let f_cor = f(points)?;
    let doubling_change = (f(2 * points)? - f_cor).abs();
    Ok(AnharmonicFidelity { f_cor, points, doubling_change, converged: doubling_change <= QUADRATURE_TOL })
}

/// `|Tr(ρ e^{iH_ho t_g} e^{−i(H_ho + V_cor) t_g})|²` by dense propagation.
pub fn anharmonic_fidelity_exact(
    basis: &ModeBasis,
    expansion: &AnharmonicExpansion,
    state: &MotionalEnsemble,
) -> Result<f64> {
    let dim = basis.motional_dim();
    if dim > crate::gate::engine::DENSE_MOTIONAL_LIMIT {
        return Err(Error::InvalidDimension(format!("exact propagation limited to small dimensions, got {dim}")));
    }
    let energies = basis.harmonic_energies();
    let mut h = trap::v_cor_operator(expansion, basis)?;
    for (i, e) in energies.iter().enumerate() {
        h[[i, i]] += C64::new(*e, 0.0);
    }
    let tg = basis.gate_time();
    let mut u: CMatrix = linalg::hermitian_expm(&h, tg)?;
    for (i, e) in energies.iter().enumerate() {
        let ph = C64::from_polar(1.0, e * tg);
        u.row_mut(i).mapv_inplace(|z| z * ph);
    }
    let mut overlap = ZERO;
    for (p, phi) in state.components() {
        let flat = phi.view().into_shape_with_order(dim).expect("contiguous state").to_owned();
        let v = u.dot(&flat);
        overlap += *p * flat.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum::<C64>();
    }
    Ok(overlap.norm_sqr())
}

/// `state` itself, or the equal mixture of its two kicked images.
pub fn variance_state(basis: &ModeBasis, state: &MotionalEnsemble, mode: VarianceState) -> Result<MotionalEnsemble> {
    match mode {
        VarianceState::Initial => Ok(state.clone()),
        VarianceState::Kicked => {
            let ops = kick_step_operators(basis, &KickPulse::single(basis.eta))?;
            let mut comps = Vec::with_capacity(2 * state.len());
            for (p, phi) in state.components() {
                for op in &ops {
                    comps.push((0.5 * p, op.apply(phi)));
                }
            }
            MotionalEnsemble::new(comps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_matches_closed_form() {
        let tg = 2.0 * PI;
        for omega in [0.0, 1.0, 2.0, 3.0, 0.5] {
            let exact = if omega == 0.0 {
                C64::new(tg, 0.0)
            } else {
                (C64::from_polar(1.0, omega * tg) - 1.0) / C64::new(0.0, omega)
            };
            assert!((simpson_phase_integral(omega, tg, 256) - exact).norm() < 1e-5);
        }
    }
}
