//! Two ions in a symmetric power-law trap: equilibrium, normal modes, and the
//! cubic-and-higher Taylor remainder of the potential.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{self, kron, CMatrix, FockDim};

/// Physical definition of the trap and the addressing laser's recoil.
///
/// The confining potential is `V(x) = K |x|^p`; the ions repel with
/// `C / |x₁ − x₂|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapSpec {
    pub exponent: f64,
    pub stiffness: f64,
    pub coulomb: f64,
    pub mass: f64,
    pub lamb_dicke: f64,
}

/// Exponent that makes the stretch mode exactly twice the centre-of-mass mode.
pub const COMMENSURATE_EXPONENT: f64 = 5.0 / 3.0;

/// Coulomb constant e²/4πε₀ for ⁴⁰Ca⁺ at ν_c = 2π × 50 kHz, expressed in
/// units of ħν_c · √(ħ/(m ν_c)).
pub fn calcium_coulomb_constant() -> f64 {
    const E: f64 = 1.602_176_634e-19;
    const EPS0: f64 = 8.854_187_812_8e-12;
    const HBAR: f64 = 1.054_571_817e-34;
    const AMU: f64 = 1.660_539_066_60e-27;
    let mass = 39.962_590_863 * AMU;
    let nu = 2.0 * std::f64::consts::PI * 50e3;
    let coulomb = E * E / (4.0 * std::f64::consts::PI * EPS0);
    let length = (HBAR / (mass * nu)).sqrt();
    coulomb / (HBAR * nu * length)
}

impl TrapSpec {
    pub fn new(exponent: f64, stiffness: f64, coulomb: f64, mass: f64, lamb_dicke: f64) -> Result<Self> {
        let spec = Self { exponent, stiffness, coulomb, mass, lamb_dicke };
        spec.validate()?;
        Ok(spec)
    }

    /// Chooses the stiffness so that ν_c = 1 for the given exponent, Coulomb
    /// constant and mass.
    ///
    /// Force balance and the curvature condition give
    /// `x_e³ = 2C(p−1)/(m ν_c²)` and `K = C 2^{p−1} / (p x_e^{p+1})`.
    pub fn with_unit_com_frequency(exponent: f64, coulomb: f64, mass: f64, lamb_dicke: f64) -> Result<Self> {
        if !(exponent > 1.0) || !(coulomb > 0.0) || !(mass > 0.0) {
            return Err(Error::InvalidParameter(
                "exponent must exceed 1 and Coulomb constant and mass must be positive".into(),
            ));
        }
        let x_e = (2.0 * coulomb * (exponent - 1.0) / mass).cbrt();
        let stiffness = coulomb * 2f64.powf(exponent - 1.0) / (exponent * x_e.powf(exponent + 1.0));
        Self::new(exponent, stiffness, coulomb, mass, lamb_dicke)
    }

    /// ⁴⁰Ca⁺ at ν_c = 2π × 50 kHz in the commensurate |x|^{5/3} trap.
    pub fn calcium(lamb_dicke: f64) -> Result<Self> {
        Self::with_unit_com_frequency(COMMENSURATE_EXPONENT, calcium_coulomb_constant(), 1.0, lamb_dicke)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v} is out of range")));
        if !(self.exponent > 1.0) || !self.exponent.is_finite() {
            return bad("exponent (must exceed 1)", self.exponent);
        }
        if !(self.stiffness > 0.0) || !self.stiffness.is_finite() {
            return bad("stiffness", self.stiffness);
        }
        if !(self.coulomb > 0.0) || !self.coulomb.is_finite() {
            return bad("coulomb constant", self.coulomb);
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return bad("mass", self.mass);
        }
        if !(self.lamb_dicke >= 0.0) || !self.lamb_dicke.is_finite() {
            return bad("Lamb-Dicke parameter", self.lamb_dicke);
        }
        Ok(())
    }

    /// `V(x) = K |x|^p`.
    pub fn potential(&self, x: f64) -> f64 {
        self.stiffness * x.abs().powf(self.exponent)
    }

    /// n-th derivative of `V` at `x > 0`.
    pub fn potential_derivative(&self, n: u32, x: f64) -> f64 {
        debug_assert!(x > 0.0);
        let p = self.exponent;
        let falling: f64 = (0..n).map(|k| p - k as f64).product();
        self.stiffness * falling * x.powf(p - n as f64)
    }
}

/// Separation `x_e` of the ions at rest, solving `V′(x_e/2) = C/x_e²`.
pub fn equilibrium_separation(spec: &TrapSpec) -> Result<f64> {
    spec.validate()?;
    let residual = |x: f64| spec.potential_derivative(1, x / 2.0) - spec.coulomb / (x * x);
    let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
    let mut expansions = 0;
    while residual(lo) >= 0.0 {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2000 || lo == 0.0 {
            return Err(Error::NoEquilibrium("force balance not bracketed from below".into()));
        }
    }
    while residual(hi) <= 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2000 || !hi.is_finite() {
            return Err(Error::NoEquilibrium("force balance not bracketed from above".into()));
        }
    }
    bisect(residual, lo, hi, 1e-15)
}

/// Bisection on a bracketed sign change; stops when the bracket is below
/// `rel_tol` relative to its midpoint.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64> {
    let f_lo = f(lo);
    if f_lo.signum() == f(hi).signum() {
        return Err(Error::Numeric("root not bracketed".into()));
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Centre-of-mass and stretch frequencies `(ν_c, ν_r)` in the harmonic
/// approximation: `ν_c² = V″(x_e/2)/m` and `ν_r² = ν_c² + 4C/(m x_e³)`.
pub fn mode_frequencies(spec: &TrapSpec) -> Result<(f64, f64)> {
    let x_e = equilibrium_separation(spec)?;
    Ok(mode_frequencies_at(spec, x_e))
}

fn mode_frequencies_at(spec: &TrapSpec, x_e: f64) -> (f64, f64) {
    let nu_c2 = spec.potential_derivative(2, x_e / 2.0) / spec.mass;
    let nu_r2 = nu_c2 + 4.0 * spec.coulomb / (spec.mass * x_e.powi(3));
    (nu_c2.sqrt(), nu_r2.sqrt())
}

fn frequency_ratio(exponent: f64, stiffness: f64) -> Result<f64> {
    let spec = TrapSpec::new(exponent, stiffness, 1.0, 1.0, 0.0)?;
    let (nu_c, nu_r) = mode_frequencies(&spec)?;
    Ok(nu_r / nu_c)
}

/// Power-law exponent whose stretch/centre-of-mass frequency ratio equals
/// `target_ratio`.
pub fn solve_exponent_for_ratio(target_ratio: f64) -> Result<f64> {
    const P_MIN: f64 = 1.0 + 1e-6;
    const P_MAX: f64 = 1e3;
    if !target_ratio.is_finite() || target_ratio <= 1.0 {
        return Err(Error::InfeasibleRatio { ratio: target_ratio });
    }
    // The ratio must fall monotonically with p across the bracket.
    let samples = 64;
    let mut prev = f64::INFINITY;
    for k in 0..=samples {
        let p = P_MIN * (P_MAX / P_MIN).powf(k as f64 / samples as f64);
        let r = frequency_ratio(p, 1.0)?;
        if !(r < prev) {
            return Err(Error::Numeric(format!("frequency ratio not monotone in p near p = {p}")));
        }
        prev = r;
    }
    let (r_hi, r_lo) = (frequency_ratio(P_MIN, 1.0)?, frequency_ratio(P_MAX, 1.0)?);
    if target_ratio >= r_hi || target_ratio <= r_lo {
        return Err(Error::InfeasibleRatio { ratio: target_ratio });
    }
    let p = bisect(
        |p| frequency_ratio(p, 1.0).map(|r| r - target_ratio).unwrap_or(f64::NAN),
        P_MIN,
        P_MAX,
        1e-15,
    )?;
    let (r1, r7) = (frequency_ratio(p, 1.0)?, frequency_ratio(p, 7.0)?);
    if (r1 - r7).abs() > 1e-9 * r1 {
        return Err(Error::Numeric(format!("ratio depends on stiffness: {r1} vs {r7}")));
    }
    Ok(p)
}

/// Mean stretch-mode occupation for a thermal state at the same temperature
/// as a centre-of-mass mode of occupation `n_bar_c`, with ν_r = 2ν_c.
pub fn relative_mode_occupation(n_bar_c: f64) -> f64 {
    n_bar_c * n_bar_c / (2.0 * n_bar_c + 1.0)
}

/// Default truncation for one mode:
/// `⌈n̄ + 6√(n̄+1) + 4(η_mode + √n̄)² + 10⌉`, raised if needed so that the
/// truncated thermal distribution keeps its mean within 1e-10.
pub fn default_truncation(n_bar: f64, eta_mode: f64) -> usize {
    let policy = n_bar + 6.0 * (n_bar + 1.0).sqrt() + 4.0 * (eta_mode + n_bar.sqrt()).powi(2) + 10.0;
    (policy.ceil() as usize).max(fock::thermal_tail_dim(n_bar, 1e-10))
}

/// Derived two-mode description used by every simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeBasis {
    pub nu_c: f64,
    pub nu_r: f64,
    pub m_c: f64,
    pub m_r: f64,
    pub x_e: f64,
    /// Ground-state size of a single ion at the centre-of-mass frequency.
    pub x0: f64,
    pub width_c: f64,
    pub width_r: f64,
    /// Effective Lamb-Dicke parameter of the kicks this basis is built for.
    pub eta: f64,
    /// Kick wavenumber `k = η / x0`.
    pub k: f64,
    pub eta_c: f64,
    pub eta_r: f64,
    pub dim_c: FockDim,
    pub dim_r: FockDim,
}

impl ModeBasis {
    pub fn new(spec: &TrapSpec, eta_eff: f64, dim_c: FockDim, dim_r: FockDim) -> Result<Self> {
        spec.validate()?;
        if !(eta_eff >= 0.0) || !eta_eff.is_finite() {
            return Err(Error::InvalidParameter(format!("effective eta must be nonnegative, got {eta_eff}")));
        }
        let x_e = equilibrium_separation(spec)?;
        let (nu_c, nu_r) = mode_frequencies_at(spec, x_e);
        let m = spec.mass;
        let (m_c, m_r) = (2.0 * m, m / 2.0);
        let x0 = 1.0 / (2.0 * m * nu_c).sqrt();
        let width_c = 1.0 / (2.0 * m_c * nu_c).sqrt();
        let width_r = 1.0 / (2.0 * m_r * nu_r).sqrt();
        let k = eta_eff / x0;
        let eta_c = k * width_c;
        let eta_r = 0.5 * k * width_r;
        if !(nu_r > nu_c && nu_c > 0.0) {
            return Err(Error::Numeric(format!("mode ordering violated: nu_c={nu_c}, nu_r={nu_r}")));
        }
        if (eta_c - eta_eff / 2f64.sqrt()).abs() > 1e-12 * (1.0 + eta_eff) {
            return Err(Error::Numeric("centre-of-mass kick parameter inconsistent".into()));
        }
        Ok(Self { nu_c, nu_r, m_c, m_r, x_e, x0, width_c, width_r, eta: eta_eff, k, eta_c, eta_r, dim_c, dim_r })
    }

    /// Basis with the default truncation for a thermal state of the given
    /// centre-of-mass occupation.
    pub fn with_default_truncation(spec: &TrapSpec, eta_eff: f64, n_bar_c: f64) -> Result<Self> {
        let probe = Self::new(spec, eta_eff, FockDim::new(2)?, FockDim::new(2)?)?;
        let n_bar_r = relative_mode_occupation(n_bar_c);
        let dc = FockDim::new(default_truncation(n_bar_c, probe.eta_c))?;
        let dr = FockDim::new(default_truncation(n_bar_r, probe.eta_r))?;
        Ok(probe.with_dims(dc, dr))
    }

    pub fn with_dims(&self, dim_c: FockDim, dim_r: FockDim) -> Self {
        Self { dim_c, dim_r, ..self.clone() }
    }

    /// Same trap and dimensions, different kick strength.
    pub fn with_eta(&self, eta_eff: f64) -> Self {
        let k = eta_eff / self.x0;
        Self { eta: eta_eff, k, eta_c: k * self.width_c, eta_r: 0.5 * k * self.width_r, ..self.clone() }
    }

    pub fn motional_dim(&self) -> usize {
        self.dim_c.get() * self.dim_r.get()
    }

    /// Gate period `2π/ν_c`.
    pub fn gate_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.nu_c
    }

    /// Time of maximal branch separation, `2π/(3ν_c)`.
    pub fn split_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / (3.0 * self.nu_c)
    }

    pub fn position_c(&self) -> Result<CMatrix> {
        fock::position_operator(self.dim_c, self.width_c)
    }

    pub fn position_r(&self) -> Result<CMatrix> {
        fock::position_operator(self.dim_r, self.width_r)
    }

    pub fn momentum_c(&self) -> Result<CMatrix> {
        fock::momentum_operator(self.dim_c, self.width_c)
    }

    pub fn momentum_r(&self) -> Result<CMatrix> {
        fock::momentum_operator(self.dim_r, self.width_r)
    }

    /// Harmonic Hamiltonian on `mode_c ⊗ mode_r`, zero-point energies included.
    pub fn harmonic_energies(&self) -> Vec<f64> {
        let (nc, nr) = (self.dim_c.get(), self.dim_r.get());
        let mut e = Vec::with_capacity(nc * nr);
        for a in 0..nc {
            for b in 0..nr {
                e.push(self.nu_c * (a as f64 + 0.5) + self.nu_r * (b as f64 + 0.5));
            }
        }
        e
    }
}

/// Cubic-and-higher Taylor coefficients of the two-ion potential in the mode
/// coordinates, keyed by the monomial exponents `(a, b)` of `x_c^a x_r^b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnharmonicExpansion {
    pub order: u32,
    pub coefficients: BTreeMap<(u32, u32), f64>,
}

impl AnharmonicExpansion {
    pub fn empty(order: u32) -> Self {
        Self { order, coefficients: BTreeMap::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.values().all(|c| *c == 0.0)
    }

    pub fn coefficient(&self, a: u32, b: u32) -> f64 {
        self.coefficients.get(&(a, b)).copied().unwrap_or(0.0)
    }

    /// Every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            order: self.order,
            coefficients: self.coefficients.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }
}

/// Taylor coefficient of `x_c^a x_r^b` in `V(x₁) + V(x₂) + C/|x₁ − x₂|` about
/// equilibrium, with `x₁ = x_c + (x_r + x_e)/2` and `x₂ = x_c − (x_r + x_e)/2`.
///
/// With `u = (x_r + x_e)/2` the confining part is `V(x_c + u) + V(u − x_c)`,
/// even in `x_c`; the Coulomb part depends on `x_r` alone.
pub fn taylor_coefficient(spec: &TrapSpec, x_e: f64, a: u32, b: u32) -> f64 {
    let n = a + b;
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let mut value = 0.0;
    if a.is_multiple_of(2) && n > 0 {
        value += 2.0 * 0.5f64.powi(b as i32) * spec.potential_derivative(n, x_e / 2.0);
    }
    if a == 0 {
        // d^b/dx_r^b of C/(x_r + x_e), already divided by b!
        let sign = if b.is_multiple_of(2) { 1.0 } else { -1.0 };
        return value / (fact(a) * fact(b)) + sign * spec.coulomb / x_e.powi(b as i32 + 1);
    }
    value / (fact(a) * fact(b))
}

/// Taylor remainder of degrees `3..=order`.
pub fn anharmonic_expansion(spec: &TrapSpec, order: u32) -> Result<AnharmonicExpansion> {
    if !(3..=6).contains(&order) {
        return Err(Error::OrderOutOfRange(order));
    }
    let x_e = equilibrium_separation(spec)?;
    let mut coefficients = BTreeMap::new();
    for degree in 3..=order {
        for a in 0..=degree {
            let c = taylor_coefficient(spec, x_e, a, degree - a);
            if !c.is_finite() {
                return Err(Error::Numeric(format!("non-finite coefficient for ({a},{})", degree - a)));
            }
            if c != 0.0 {
                coefficients.insert((a, degree - a), c);
            }
        }
    }
    Ok(AnharmonicExpansion { order, coefficients })
}

/// Integer power of a square matrix.
pub(crate) fn matrix_power(m: &CMatrix, k: u32) -> CMatrix {
    let mut out = fock::identity(m.nrows());
    for _ in 0..k {
        out = out.dot(m);
    }
    out
}

/// Dense `V_cor = Σ c_ab x̂_c^a ⊗ x̂_r^b` on `mode_c ⊗ mode_r`.
pub fn v_cor_operator(exp: &AnharmonicExpansion, basis: &ModeBasis) -> Result<CMatrix> {
    let (nc, nr) = (basis.dim_c.get(), basis.dim_r.get());
    let mut v = CMatrix::zeros((nc * nr, nc * nr));
    if exp.is_empty() {
        return Ok(v);
    }
    let xc = basis.position_c()?;
    let xr = basis.position_r()?;
    for (&(a, b), &c) in &exp.coefficients {
        let term = kron(&matrix_power(&xc, a), &matrix_power(&xr, b));
        v.scaled_add(fock::C64::new(c, 0.0), &term);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_unit() -> TrapSpec {
        TrapSpec::new(2.0, 0.5, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn harmonic_equilibrium_closed_form() {
        let x_e = equilibrium_separation(&harmonic_unit()).unwrap();
        assert!((x_e - 2f64.cbrt()).abs() < 1e-12);
        assert!((x_e - 1.259921).abs() < 1e-6);
    }

    #[test]
    fn force_balance_residual_for_commensurate_trap() {
        let spec = TrapSpec::new(COMMENSURATE_EXPONENT, 3.0, 2.0, 1.0, 0.0).unwrap();
        let x_e = equilibrium_separation(&spec).unwrap();
        let force = spec.potential_derivative(1, x_e / 2.0);
        assert!((force - spec.coulomb / (x_e * x_e)).abs() <= 1e-10 * force.abs());
    }

    #[test]
    fn doubling_coulomb_scales_separation() {
        for p in [1.4, 2.0, 3.0] {
            let s1 = TrapSpec::new(p, 1.0, 1.0, 1.0, 0.0).unwrap();
            let s2 = TrapSpec { coulomb: 2.0, ..s1 };
            let ratio = equilibrium_separation(&s2).unwrap() / equilibrium_separation(&s1).unwrap();
            assert!((ratio - 2f64.powf(1.0 / (p + 1.0))).abs() < 1e-11, "p={p}");
        }
    }

    #[test]
    fn frequency_ratios() {
        let spec = TrapSpec::new(COMMENSURATE_EXPONENT, 1.0, 1.0, 1.0, 0.0).unwrap();
        let (c, r) = mode_frequencies(&spec).unwrap();
        assert!((r / c - 2.0).abs() < 1e-10);
        let (c, r) = mode_frequencies(&harmonic_unit()).unwrap();
        assert!((r / c - 3f64.sqrt()).abs() < 1e-10);
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_solver() {
        assert!((solve_exponent_for_ratio(2.0).unwrap() - 5.0 / 3.0).abs() < 1e-9);
        assert!((solve_exponent_for_ratio(3f64.sqrt()).unwrap() - 2.0).abs() < 1e-9);
        assert!(matches!(solve_exponent_for_ratio(0.5), Err(Error::InfeasibleRatio { .. })));
        assert!(matches!(solve_exponent_for_ratio(1.0), Err(Error::InfeasibleRatio { .. })));
    }

    #[test]
    fn unit_frequency_constructor() {
        let spec = TrapSpec::calcium(0.45).unwrap();
        let (c, r) = mode_frequencies(&spec).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
        assert!((r - 2.0).abs() < 1e-9);
        // two Ca+ ions at 50 kHz sit tens of microns apart: x_e/ℓ of several hundred
        let x_e = equilibrium_separation(&spec).unwrap();
        assert!(x_e > 300.0 && x_e < 800.0, "x_e = {x_e}");
    }

    #[test]
    fn quadratic_coefficients_reproduce_mode_frequencies() {
        let spec = TrapSpec::new(COMMENSURATE_EXPONENT, 2.0, 5.0, 1.3, 0.0).unwrap();
        let b = ModeBasis::new(&spec, 1.0, FockDim::new(2).unwrap(), FockDim::new(2).unwrap()).unwrap();
        let c20 = taylor_coefficient(&spec, b.x_e, 2, 0);
        let c02 = taylor_coefficient(&spec, b.x_e, 0, 2);
        assert!((c20 - 0.5 * b.m_c * b.nu_c.powi(2)).abs() < 1e-12 * c20);
        assert!((c02 - 0.5 * b.m_r * b.nu_r.powi(2)).abs() < 1e-12 * c02);
        // force balance kills the linear term
        assert!(taylor_coefficient(&spec, b.x_e, 0, 1).abs() < 1e-10 * c02 * b.x_e);
    }

    #[test]
    fn expansion_order_bounds() {
        let spec = harmonic_unit();
        assert!(matches!(anharmonic_expansion(&spec, 2), Err(Error::OrderOutOfRange(2))));
        assert!(matches!(anharmonic_expansion(&spec, 7), Err(Error::OrderOutOfRange(7))));
        let exp = anharmonic_expansion(&spec, 6).unwrap();
        assert!(exp.coefficients.keys().all(|(a, b)| a + b >= 3 && a + b <= 6));
        // harmonic confinement: only the Coulomb x_r^n terms survive
        assert!(exp.coefficients.keys().all(|(a, _)| *a == 0));
    }

    #[test]
    fn odd_powers_of_com_coordinate_vanish() {
        let spec = TrapSpec::calcium(1.0).unwrap();
        let exp = anharmonic_expansion(&spec, 4).unwrap();
        assert_eq!(exp.coefficient(1, 2), 0.0);
        assert_eq!(exp.coefficient(3, 0), 0.0);
        let x_e = equilibrium_separation(&spec).unwrap();
        let c21 = exp.coefficient(2, 1);
        assert!(c21 != 0.0);
        assert!((c21 - spec.potential_derivative(3, x_e / 2.0) / 2.0).abs() < 1e-12 * c21.abs());
    }

    #[test]
    fn basis_invariants() {
        let spec = TrapSpec::calcium(7.0).unwrap();
        let b = ModeBasis::with_default_truncation(&spec, 7.0, 0.0).unwrap();
        assert!((b.eta_c - 7.0 / 2f64.sqrt()).abs() < 1e-9);
        assert!((b.eta_r - 3.5).abs() < 1e-9);
        assert!((b.width_c - b.x0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((b.width_r - b.x0).abs() < 1e-9);
        assert_eq!(b.dim_c.get(), default_truncation(0.0, b.eta_c));
    }

    #[test]
    fn empty_expansion_is_zero_operator() {
        let spec = harmonic_unit();
        let b = ModeBasis::new(&spec, 1.0, FockDim::new(4).unwrap(), FockDim::new(3).unwrap()).unwrap();
        let v = v_cor_operator(&AnharmonicExpansion::empty(3), &b).unwrap();
        assert!(v.iter().all(|z| *z == fock::ZERO));
    }
}
