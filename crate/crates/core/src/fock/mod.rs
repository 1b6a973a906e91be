//! Truncated Fock-space linear algebra.
//!
//! Composite spaces are always ordered `qubit₁ ⊗ qubit₂ ⊗ mode_c ⊗ mode_r`
//! with the leftmost factor as the slowest-varying index; every mask and
//! reshape in the crate relies on this.

pub mod linalg;
pub mod state;

use ndarray::{Array1, Array2};

pub use linalg::{
    dagger, hermitian_expm, identity, kron, max_abs_diff, CMatrix, C64, I, ONE, ZERO,
};
pub use state::{DensityOp, PureState, QuantumState};

use crate::error::{Error, Result};
use crate::tol;

/// Dimension of one truncated oscillator mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct FockDim(usize);

impl FockDim {
    pub fn new(n_levels: usize) -> Result<Self> {
        if n_levels < 2 {
            return Err(Error::InvalidDimension(format!(
                "a truncated mode needs at least 2 levels, got {n_levels}"
            )));
        }
        Ok(Self(n_levels))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Levels treated as trustworthy for unitarity checks: ⌈d/2⌉.
    pub fn inner(self) -> usize {
        self.0.div_ceil(2)
    }

    pub fn doubled(self) -> Self {
        Self(self.0 * 2)
    }
}

impl std::fmt::Display for FockDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lowering operator with `√n` on the first superdiagonal.
pub fn annihilation(d: FockDim) -> CMatrix {
    let n = d.get();
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(d: FockDim) -> CMatrix {
    dagger(&annihilation(d))
}

pub fn number_operator(d: FockDim) -> CMatrix {
    Array2::from_diag(&(0..d.get()).map(|k| C64::new(k as f64, 0.0)).collect::<Array1<_>>())
}

fn check_width(ground_width: f64) -> Result<()> {
    if !(ground_width > 0.0) || !ground_width.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ground-state width must be positive, got {ground_width}"
        )));
    }
    Ok(())
}

/// `x̂ = w (a + a†)`, so that the vacuum variance is `w²`.
pub fn position_operator(d: FockDim, ground_width: f64) -> Result<CMatrix> {
    check_width(ground_width)?;
    let a = annihilation(d);
    Ok((&a + &dagger(&a)).mapv(|z| z * ground_width))
}

/// Conjugate momentum `p̂ = i(a† − a)/(2w)` with `[x̂, p̂] = i` away from the
/// truncation edge.
pub fn momentum_operator(d: FockDim, ground_width: f64) -> Result<CMatrix> {
    check_width(ground_width)?;
    let a = annihilation(d);
    let scale = I / (2.0 * ground_width);
    Ok((&dagger(&a) - &a).mapv(|z| z * scale))
}

/// `D(α) = exp(α a† − α* a)` on the truncated space.
///
/// The truncated generator is still anti-Hermitian, so the result is exactly
/// unitary; it departs from the infinite-dimensional operator only near the
/// truncation edge.
pub fn displacement(alpha: C64, d: FockDim) -> Result<CMatrix> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite displacement {alpha}")));
    }
    if alpha == ZERO {
        return Ok(identity(d.get()));
    }
    let a = annihilation(d);
    // exp(G) with G anti-Hermitian equals exp(-i H) for H = iG.
    let generator = &dagger(&a).mapv(|z| z * alpha) - &a.mapv(|z| z * alpha.conj());
    let h = generator.mapv(|z| z * I);
    hermitian_expm(&h, 1.0)
}

/// Boltzmann weights `p_n ∝ (n̄/(n̄+1))^n` over `d` levels, renormalized.
pub fn thermal_probabilities(n_bar: f64, d: FockDim) -> Result<Vec<f64>> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean occupation must be finite and nonnegative, got {n_bar}"
        )));
    }
    let q = n_bar / (n_bar + 1.0);
    let mut probs = Vec::with_capacity(d.get());
    let mut w = 1.0;
    for _ in 0..d.get() {
        probs.push(w);
        w *= q;
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

pub fn thermal_state(n_bar: f64, d: FockDim) -> Result<DensityOp> {
    DensityOp::from_diagonal(&thermal_probabilities(n_bar, d)?)
}

/// Smallest dimension whose truncated thermal distribution has mean
/// occupation within `tol` of `n_bar`.
///
/// The renormalized truncation lowers the mean by `d q^d / (1 − q^d)` with
/// `q = n̄/(n̄+1)`.
pub fn thermal_tail_dim(n_bar: f64, tol: f64) -> usize {
    if n_bar <= 0.0 {
        return 2;
    }
    let q = n_bar / (n_bar + 1.0);
    let mut d = 2usize;
    loop {
        let qd = q.powi(d as i32);
        if (d as f64) * qd / (1.0 - qd) <= tol || d > 1_000_000 {
            return d;
        }
        d += 1;
    }
}

/// One factor of a tensor product.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Operator(CMatrix),
    Pure(PureState),
    Mixed(DensityOp),
}

/// Kronecker product of an ordered list, leftmost factor slowest.
///
/// Operators combine with operators only. Pure and mixed states combine into
/// a pure result when every factor is pure, otherwise a density operator.
pub fn tensor(factors: &[Factor]) -> Result<Factor> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidDimension("tensor product of an empty list".into()))?;
    let all_ops = factors.iter().all(|f| matches!(f, Factor::Operator(_)));
    let any_ops = factors.iter().any(|f| matches!(f, Factor::Operator(_)));
    if any_ops && !all_ops {
        return Err(Error::KindMismatch("cannot tensor operators with states".into()));
    }
    if all_ops {
        let mut acc = match first {
            Factor::Operator(m) => m.clone(),
            _ => unreachable!(),
        };
        for f in &factors[1..] {
            if let Factor::Operator(m) = f {
                acc = kron(&acc, m);
            }
        }
        return Ok(Factor::Operator(acc));
    }
    if factors.iter().all(|f| matches!(f, Factor::Pure(_))) {
        let mut acc: Option<Array1<C64>> = None;
        for f in factors {
            if let Factor::Pure(p) = f {
                acc = Some(match acc {
                    None => p.amplitudes().clone(),
                    Some(v) => linalg::kron_vec(&v, p.amplitudes()),
                });
            }
        }
        return Ok(Factor::Pure(PureState::normalize(acc.expect("nonempty"))?));
    }
    let mut acc: Option<CMatrix> = None;
    for f in factors {
        let m = match f {
            Factor::Pure(p) => p.to_density().into_matrix(),
            Factor::Mixed(d) => d.matrix().clone(),
            Factor::Operator(_) => unreachable!(),
        };
        acc = Some(match acc {
            None => m,
            Some(a) => kron(&a, &m),
        });
    }
    Ok(Factor::Mixed(DensityOp::repaired(acc.expect("nonempty"))?))
}

/// Reduced density operator over the factors flagged in `keep`.
///
/// `dims` lists the factor dimensions in the fixed ordering; their product
/// must equal the dimension of `rho`.
pub fn partial_trace(rho: &DensityOp, dims: &[usize], keep: &[bool]) -> Result<DensityOp> {
    if dims.len() != keep.len() || dims.is_empty() {
        return Err(Error::Shape("subsystem mask and dimension list differ in length".into()));
    }
    if dims.contains(&0) {
        return Err(Error::Shape("zero subsystem dimension".into()));
    }
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Shape(format!(
            "subsystem dimensions multiply to {total}, state has dimension {}",
            rho.dim()
        )));
    }
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len() - 1).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&k| keep[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|&k| !keep[k]).collect();
    let kept_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // full-space offset contributed by a multi-index over a subset of factors
    let offset = |subset: &[usize], mut flat: usize| -> usize {
        let mut off = 0;
        for &k in subset.iter().rev() {
            off += (flat % dims[k]) * strides[k];
            flat /= dims[k];
        }
        off
    };
    let kept_off: Vec<usize> = (0..kept_dim).map(|i| offset(&kept, i)).collect();
    let traced_off: Vec<usize> = (0..traced_dim).map(|i| offset(&traced, i)).collect();

    let m = rho.matrix();
    let mut out = Array2::<C64>::zeros((kept_dim, kept_dim));
    for (i, &oi) in kept_off.iter().enumerate() {
        for (j, &oj) in kept_off.iter().enumerate() {
            out[[i, j]] = traced_off.iter().map(|&t| m[[oi + t, oj + t]]).sum();
        }
    }
    DensityOp::repaired(out)
}

/// `UρU†` or `U|ψ⟩`.
///
/// Pure results are renormalized and mixed results re-hermitized; unitarity
/// on the populated support is the caller's contract.
pub fn unitary_evolve(state: &QuantumState, u: &CMatrix) -> Result<QuantumState> {
    let n = state.dim();
    if u.dim() != (n, n) {
        return Err(Error::Shape(format!(
            "operator is {:?}, state has dimension {n}",
            u.dim()
        )));
    }
    match state {
        QuantumState::Pure(p) => {
            let v = u.dot(p.amplitudes());
            let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if (norm2 - 1.0).abs() > 1e3 * tol::UNIT {
                return Err(Error::Numeric(format!(
                    "evolution changed the norm to {norm2}; operator is not unitary on the state's support"
                )));
            }
            Ok(QuantumState::Pure(PureState::normalize(v)?))
        }
        QuantumState::Mixed(rho) => {
            let out = u.dot(rho.matrix()).dot(&dagger(u));
            let tr = linalg::trace(&out).re;
            if (tr - 1.0).abs() > 1e3 * tol::UNIT {
                return Err(Error::Numeric(format!(
                    "evolution changed the trace to {tr}; operator is not unitary on the state's support"
                )));
            }
            let out = out.mapv(|z| z / tr);
            Ok(QuantumState::Mixed(DensityOp::repaired(out)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn d(n: usize) -> FockDim {
        FockDim::new(n).unwrap()
    }

    #[test]
    fn annihilation_smallest() {
        let a = annihilation(d(2));
        assert_eq!(a[[0, 1]], ONE);
        assert_eq!(a[[0, 0]], ZERO);
        assert_eq!(a[[1, 0]], ZERO);
        assert_eq!(a[[1, 1]], ZERO);
        assert!((annihilation(d(3))[[1, 2]].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(matches!(FockDim::new(1), Err(Error::InvalidDimension(_))));
        assert!(matches!(FockDim::new(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn commutator_is_identity_below_the_edge() {
        let n = 7;
        let a = annihilation(d(n));
        let ad = creation(d(n));
        let comm = &a.dot(&ad) - &ad.dot(&a);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((comm[[i, j]] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn position_vacuum_moments() {
        let w = 0.8;
        let x = position_operator(d(10), w).unwrap();
        let vac = PureState::basis(10, 0).unwrap();
        assert!(vac.expectation(&x).norm() < 1e-15);
        assert!((vac.expectation(&x.dot(&x)).re - w * w).abs() < 1e-14);
        assert!(position_operator(d(10), 0.0).is_err());
        assert!(position_operator(d(10), -1.0).is_err());
    }

    #[test]
    fn coherent_centroid() {
        let w = 0.7;
        let alpha = 0.9;
        let dim = d(40);
        let disp = displacement(C64::new(alpha, 0.0), dim).unwrap();
        let psi = PureState::normalize(disp.column(0).to_owned()).unwrap();
        let x = position_operator(dim, w).unwrap();
        let got = psi.expectation(&x).re;
        assert!((got - 2.0 * w * alpha).abs() < 1e-10, "{got}");
    }

    /// Power-series oracle: ⟨0|D(α)|0⟩ = Σ_n (−|α|²/2)^n/n!.
    #[test]
    fn displacement_vacuum_element_matches_series() {
        let alpha: f64 = 1.0;
        let mut series = 0.0;
        let mut term = 1.0;
        for n in 0..60 {
            series += term;
            term *= -alpha * alpha / 2.0 / (n as f64 + 1.0);
        }
        for dim in [30, 45] {
            let disp = displacement(C64::new(alpha, 0.0), d(dim)).unwrap();
            assert!((disp[[0, 0]].norm() - series).abs() < 1e-10, "dim {dim}");
        }
    }

    #[test]
    fn displacement_inverse() {
        let dim = d(30);
        let a = displacement(C64::new(0.0, 0.7), dim).unwrap();
        let b = displacement(C64::new(0.0, -0.7), dim).unwrap();
        assert!(max_abs_diff(&a.dot(&b), &identity(30)) < 1e-10);
        assert!(linalg::unitarity_defect(&a, dim.inner()) < 1e-9);
        assert_eq!(displacement(ZERO, dim).unwrap(), identity(30));
    }

    #[test]
    fn thermal_state_moments() {
        let vac = thermal_state(0.0, d(5)).unwrap();
        assert_eq!(vac.matrix()[[0, 0]], ONE);
        assert!((vac.purity() - 1.0).abs() < 1e-15);

        let rho = thermal_state(1.0, d(60)).unwrap();
        let mean = rho.expectation(&number_operator(d(60))).re;
        assert!((mean - 1.0).abs() < 1e-8);
        // Σ p_n² with p_n = 2^{-(n+1)} sums to 1/3
        let direct: f64 = (0..60).map(|n| 0.25f64.powi(n + 1)).sum();
        assert!((rho.purity() - direct).abs() < 1e-14);
        assert!((rho.purity() - 1.0 / 3.0).abs() < 1e-8);
        assert!(thermal_state(-0.1, d(5)).is_err());
    }

    #[test]
    fn thermal_mean_improves_with_dimension() {
        let err = |n: usize| {
            let rho = thermal_state(3.0, d(n)).unwrap();
            (rho.expectation(&number_operator(d(n))).re - 3.0).abs()
        };
        let (e1, e2) = (err(30), err(60));
        assert!(e2 < e1);
        let dim = thermal_tail_dim(3.0, 1e-10);
        assert!(err(dim) <= 1e-10);
        assert!(err(dim - 1) > 1e-10);
    }

    #[test]
    fn tensor_kind_mismatch() {
        let op = Factor::Operator(identity(2));
        let st = Factor::Pure(PureState::basis(2, 0).unwrap());
        assert!(matches!(tensor(&[op, st]), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = 0.5f64.sqrt();
        let bell = PureState::new(Array1::from_vec(vec![
            C64::new(s, 0.0),
            ZERO,
            ZERO,
            C64::new(s, 0.0),
        ]))
        .unwrap()
        .to_density();
        for keep in [[true, false], [false, true]] {
            let red = partial_trace(&bell, &[2, 2], &keep).unwrap();
            let half = DensityOp::maximally_mixed(2).unwrap();
            assert!(max_abs_diff(red.matrix(), half.matrix()) < 1e-15);
        }
        assert!(matches!(partial_trace(&bell, &[3, 2], &[true, false]), Err(Error::Shape(_))));
    }

    #[test]
    fn free_oscillator_centroid_law() {
        // displacement(iβ) on vacuum, then free evolution at frequency ν:
        // ⟨x̂⟩(t) = 2 w β sin(νt)
        let (w, beta, nu) = (0.6, 1.3, 1.7);
        let dim = d(50);
        let kicked = displacement(C64::new(0.0, beta), dim).unwrap().column(0).to_owned();
        let x = position_operator(dim, w).unwrap();
        for k in 0..16 {
            let t = k as f64 * 2.0 * PI / 16.0 / nu;
            let phases: Array1<C64> =
                (0..50).map(|n| C64::from_polar(1.0, -nu * (n as f64 + 0.5) * t)).collect();
            let psi = PureState::normalize(&phases * &kicked).unwrap();
            let got = psi.expectation(&x).re;
            assert!((got - 2.0 * w * beta * (nu * t).sin()).abs() < 1e-8, "t={t}");
        }
    }
}
