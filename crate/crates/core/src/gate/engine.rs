//! Structured propagation of the gate.
//!
//! Composite vectors are kept as four motional blocks, one per qubit basis
//! state `2·q₁ + q₂`, each an `N_c × N_r` array. A mode-c operator `A` acts
//! as `A·Ψ` and a mode-r operator `B` as `Ψ·Bᵀ`, so nothing of size
//! `(N_c N_r)²` is ever formed unless a dense free evolution is requested.

use ndarray::{Array1, Array2, Zip};

use super::{FlipModel, GateSchedule, KickPulse};
use crate::error::{Error, Result};
use crate::fock::linalg::{self, dagger, hermitian_eigh, hermitian_expm, CMatrix, C64, ONE, ZERO};
use crate::fock::{self, DensityOp, FockDim};
use crate::trap::{self, AnharmonicExpansion, ModeBasis};

/// Largest motional dimension for which a dense free propagator is built.
pub const DENSE_MOTIONAL_LIMIT: usize = 4096;

/// Pure state of `qubit₁ ⊗ qubit₂ ⊗ mode_c ⊗ mode_r`; absent blocks are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeVector {
    blocks: [Option<Array2<C64>>; 4],
    dim_c: usize,
    dim_r: usize,
}

impl CompositeVector {
    pub fn zeros(dim_c: usize, dim_r: usize) -> Self {
        Self { blocks: [None, None, None, None], dim_c, dim_r }
    }

    /// `|q⟩ ⊗ Ψ` for a qubit basis index `q = 2·q₁ + q₂`.
    pub fn basis_product(q: usize, motion: Array2<C64>) -> Result<Self> {
        if q >= 4 {
            return Err(Error::InvalidDimension(format!("qubit index {q} out of range")));
        }
        let (dim_c, dim_r) = motion.dim();
        let mut v = Self::zeros(dim_c, dim_r);
        v.blocks[q] = Some(motion);
        Ok(v)
    }

    /// `(Σ_q a_q |q⟩) ⊗ Ψ`.
    pub fn product(qubits: [C64; 4], motion: &Array2<C64>) -> Self {
        let (dim_c, dim_r) = motion.dim();
        let mut v = Self::zeros(dim_c, dim_r);
        for (q, &a) in qubits.iter().enumerate() {
            if a != ZERO {
                v.blocks[q] = Some(motion.mapv(|z| z * a));
            }
        }
        v
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_c, self.dim_r)
    }

    pub fn block(&self, q: usize) -> Option<&Array2<C64>> {
        self.blocks[q].as_ref()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flatten().map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        (0..4).map(|q| block_inner(self.block(q), other.block(q))).sum()
    }

    /// Flattened amplitudes, index `q·N_c N_r + n·N_r + m`.
    pub fn to_dense(&self) -> Array1<C64> {
        let m = self.dim_c * self.dim_r;
        let mut out = Array1::zeros(4 * m);
        for (q, b) in self.blocks.iter().enumerate() {
            if let Some(b) = b {
                for (i, z) in b.iter().enumerate() {
                    out[q * m + i] = *z;
                }
            }
        }
        out
    }

    pub fn from_dense(v: &Array1<C64>, dim_c: usize, dim_r: usize) -> Result<Self> {
        let m = dim_c * dim_r;
        if v.len() != 4 * m {
            return Err(Error::Shape(format!("vector of length {} does not match 4x{dim_c}x{dim_r}", v.len())));
        }
        let mut out = Self::zeros(dim_c, dim_r);
        for q in 0..4 {
            let slice = v.slice(ndarray::s![q * m..(q + 1) * m]);
            if slice.iter().any(|z| *z != ZERO) {
                out.blocks[q] = Some(slice.to_owned().into_shape_with_order((dim_c, dim_r)).expect("block shape"));
            }
        }
        Ok(out)
    }

    /// Applies σˣ on qubit 1, which swaps blocks `q ↔ q ^ 2`.
    pub fn flip_qubit1(mut self) -> Self {
        self.blocks.swap(0, 2);
        self.blocks.swap(1, 3);
        self
    }

    /// Unnormalized 4×4 reduced internal state `Tr_motion |Ψ⟩⟨Ψ|`.
    pub fn internal_density(&self) -> CMatrix {
        let mut rho = CMatrix::zeros((4, 4));
        for j in 0..4 {
            for jp in 0..4 {
                rho[[j, jp]] = block_inner(self.block(jp), self.block(j));
            }
        }
        rho
    }

    /// Unnormalized reduced states of mode c and mode r.
    pub fn mode_densities(&self) -> (CMatrix, CMatrix) {
        let mut rc = CMatrix::zeros((self.dim_c, self.dim_c));
        let mut rr = CMatrix::zeros((self.dim_r, self.dim_r));
        for b in self.blocks.iter().flatten() {
            rc = rc + b.dot(&dagger(b));
            rr = rr + b.t().dot(&b.mapv(|z| z.conj()));
        }
        (rc, rr)
    }
}

/// `Σ conj(a)·b`, treating a missing block as zero.
fn block_inner(a: Option<&Array2<C64>>, b: Option<&Array2<C64>>) -> C64 {
    match (a, b) {
        (Some(a), Some(b)) => a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum(),
        _ => ZERO,
    }
}

/// Mixture of motional pure states `Σ p_k |φ_k⟩⟨φ_k|`, each `N_c × N_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionalEnsemble {
    components: Vec<(f64, Array2<C64>)>,
}

impl MotionalEnsemble {
    pub fn pure(motion: Array2<C64>) -> Result<Self> {
        Self::new(vec![(1.0, motion)])
    }

    /// Normalizes the weights; every component must be a unit vector.
    pub fn new(components: Vec<(f64, Array2<C64>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidState("empty motional ensemble".into()));
        }
        let dim = components[0].1.dim();
        let mut total = 0.0;
        for (p, v) in &components {
            if v.dim() != dim {
                return Err(Error::Shape("ensemble components differ in shape".into()));
            }
            if !(*p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidState(format!("invalid weight {p}")));
            }
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if (n - 1.0).abs() > crate::tol::RENORM_FACTOR * crate::tol::NORM {
                return Err(Error::InvalidState(format!("component norm² {n} is not 1")));
            }
            total += p;
        }
        if total <= 0.0 {
            return Err(Error::InvalidState("ensemble weights sum to zero".into()));
        }
        Ok(Self { components: components.into_iter().map(|(p, v)| (p / total, v)).collect() })
    }

    /// Product of two mode states, decomposed spectrally. Components are
    /// taken in decreasing weight until the discarded weight is at most
    /// `drop_tol`, then renormalized.
    pub fn from_product(rho_c: &DensityOp, rho_r: &DensityOp, drop_tol: f64) -> Result<Self> {
        let ec = rho_c.spectral_ensemble(0.0)?;
        let er = rho_r.spectral_ensemble(0.0)?;
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(ec.len() * er.len());
        for (i, (pc, _)) in ec.iter().enumerate() {
            for (j, (pr, _)) in er.iter().enumerate() {
                pairs.push((pc * pr, i, j));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let total: f64 = pairs.iter().map(|p| p.0).sum();
        let mut kept = 0.0;
        let mut components = Vec::new();
        for (p, i, j) in pairs {
            if total - kept <= drop_tol && !components.is_empty() {
                break;
            }
            kept += p;
            let (vc, vr) = (&ec[i].1, &er[j].1);
            let outer = Array2::from_shape_fn((vc.len(), vr.len()), |(n, m)| vc[n] * vr[m]);
            components.push((p, outer));
        }
        Self::new(components)
    }

    /// Thermal product state of both modes in `basis`.
    pub fn thermal(basis: &ModeBasis, n_bar_c: f64, n_bar_r: f64, drop_tol: f64) -> Result<Self> {
        let rc = fock::thermal_state(n_bar_c, basis.dim_c)?;
        let rr = fock::thermal_state(n_bar_r, basis.dim_r)?;
        Self::from_product(&rc, &rr, drop_tol)
    }

    pub fn components(&self) -> &[(f64, Array2<C64>)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.components[0].1.dim()
    }
}

/// Initial motional state of a channel computation.
#[derive(Debug, Clone, PartialEq)]
pub enum MotionalState {
    /// `ρ_c ⊗ ρ_r`.
    Product { c: DensityOp, r: DensityOp },
    Ensemble(MotionalEnsemble),
}

impl MotionalState {
    pub fn thermal(basis: &ModeBasis, n_bar_c: f64, n_bar_r: f64) -> Result<Self> {
        Ok(Self::Product {
            c: fock::thermal_state(n_bar_c, basis.dim_c)?,
            r: fock::thermal_state(n_bar_r, basis.dim_r)?,
        })
    }

    pub fn vacuum(basis: &ModeBasis) -> Result<Self> {
        Self::thermal(basis, 0.0, 0.0)
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            Self::Product { c, r } => (c.dim(), r.dim()),
            Self::Ensemble(e) => e.dims(),
        }
    }

    pub fn to_ensemble(&self, drop_tol: f64) -> Result<MotionalEnsemble> {
        match self {
            Self::Product { c, r } => MotionalEnsemble::from_product(c, r, drop_tol),
            Self::Ensemble(e) => Ok(e.clone()),
        }
    }
}

/// State of the full system as seen by [`CompiledGate::run`].
#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    Pure(CompositeVector),
    Ensemble(Vec<(f64, CompositeVector)>),
    /// Dense density operator on the full composite space.
    Dense { rho: DensityOp, dim_c: usize, dim_r: usize },
}

impl SystemState {
    /// Internal state times motional ensemble.
    pub fn product(qubits: [C64; 4], motion: &MotionalEnsemble) -> Self {
        SystemState::Ensemble(
            motion.components().iter().map(|(p, v)| (*p, CompositeVector::product(qubits, v))).collect(),
        )
    }

    fn components(&self) -> Result<Vec<(f64, CompositeVector)>> {
        match self {
            SystemState::Pure(v) => Ok(vec![(1.0, v.clone())]),
            SystemState::Ensemble(e) => Ok(e.clone()),
            SystemState::Dense { rho, dim_c, dim_r } => rho
                .spectral_ensemble(0.0)?
                .into_iter()
                .map(|(p, v)| Ok((p, CompositeVector::from_dense(&v, *dim_c, *dim_r)?)))
                .collect(),
        }
    }

    /// Reduced 4×4 internal density operator.
    pub fn internal_density(&self) -> Result<CMatrix> {
        let mut rho = CMatrix::zeros((4, 4));
        for (p, v) in self.components()? {
            rho.scaled_add(C64::new(p, 0.0), &v.internal_density());
        }
        Ok(rho)
    }

    /// Reduced states of mode c and mode r.
    pub fn mode_densities(&self) -> Result<(CMatrix, CMatrix)> {
        let mut acc: Option<(CMatrix, CMatrix)> = None;
        for (p, v) in self.components()? {
            let (c, r) = v.mode_densities();
            let w = C64::new(p, 0.0);
            acc = Some(match acc {
                None => (c.mapv(|z| z * w), r.mapv(|z| z * w)),
                Some((ac, ar)) => (ac + c.mapv(|z| z * w), ar + r.mapv(|z| z * w)),
            });
        }
        acc.ok_or_else(|| Error::InvalidState("empty system state".into()))
    }
}

/// Mode-c matrix and transposed mode-r matrix of a product operator.
#[derive(Debug, Clone)]
pub(crate) struct ProductOp {
    c: CMatrix,
    r_t: CMatrix,
    scale: C64,
}

impl ProductOp {
    pub(crate) fn apply(&self, psi: &Array2<C64>) -> Array2<C64> {
        let s = self.scale;
        self.c.dot(psi).dot(&self.r_t).mapv(|z| z * s)
    }
}

/// Qubit-1 rotation diagonal in the product eigenbasis of `x̂_c` and `x̂_r`.
#[derive(Debug, Clone)]
pub(crate) struct Rotation {
    vc: CMatrix,
    vc_h: CMatrix,
    vr_conj: CMatrix,
    vr_t: CMatrix,
    cos: Array2<f64>,
    sin: Array2<f64>,
}

#[derive(Debug, Clone)]
pub(crate) enum Step {
    /// Input qubit-2 value `s` goes to `out[s]` with motional factor `ops[s]`.
    Kick { out: [usize; 2], ops: [ProductOp; 2] },
    Harmonic { phase_c: Array1<C64>, phase_r: Array1<C64> },
    /// Dense motional unitary on the flattened `n·N_r + m` index.
    Dense(CMatrix),
    Rotation(Rotation),
    /// σˣ on qubit 1 when qubit 2 holds the given value.
    ConditionalFlip { q2: usize },
    /// Phase factors on qubit-2 states |0⟩ and |1⟩.
    Phase([C64; 2]),
}

pub(crate) fn kick_step(basis: &ModeBasis, pulse: &KickPulse) -> Result<Step> {
    let out = if pulse.flips_qubit() { [1, 0] } else { [0, 1] };
    Ok(Step::Kick { out, ops: kick_step_operators(basis, pulse)? })
}

/// Motional factors `E₊`, `E₋` (with their constant phases) applied to
/// qubit-2 inputs |0⟩ and |1⟩.
pub(crate) fn kick_step_operators(basis: &ModeBasis, pulse: &KickPulse) -> Result<[ProductOp; 2]> {
    let k = pulse.eta_effective / basis.x0;
    let (eta_c, eta_r) = (k * basis.width_c, 0.5 * k * basis.width_r);
    let make = |s: usize| -> Result<ProductOp> {
        let sign = pulse.kick_sign(s);
        let c = fock::displacement(C64::new(0.0, sign * eta_c), basis.dim_c)?;
        let r = fock::displacement(C64::new(0.0, -sign * eta_r), basis.dim_r)?;
        Ok(ProductOp { c, r_t: r.t().to_owned(), scale: C64::from_polar(1.0, -sign * k * basis.x_e / 2.0) })
    };
    Ok([make(0)?, make(1)?])
}

pub(crate) fn harmonic_step(basis: &ModeBasis, t: f64) -> Step {
    let phases = |nu: f64, d: FockDim| -> Array1<C64> {
        (0..d.get()).map(|n| C64::from_polar(1.0, -nu * (n as f64 + 0.5) * t)).collect()
    };
    Step::Harmonic { phase_c: phases(basis.nu_c, basis.dim_c), phase_r: phases(basis.nu_r, basis.dim_r) }
}

fn dense_step(basis: &ModeBasis, expansion: &AnharmonicExpansion, t: f64) -> Result<Step> {
    let dim = basis.motional_dim();
    if dim > DENSE_MOTIONAL_LIMIT {
        return Err(Error::InvalidDimension(format!(
            "dense anharmonic propagation needs motional dimension <= {DENSE_MOTIONAL_LIMIT}, got {dim}"
        )));
    }
    let mut h = trap::v_cor_operator(expansion, basis)?;
    for (i, e) in basis.harmonic_energies().into_iter().enumerate() {
        h[[i, i]] += C64::new(e, 0.0);
    }
    Ok(Step::Dense(hermitian_expm(&h, t)?))
}

pub(crate) fn rotation_step(basis: &ModeBasis, pulse: &super::AddressedPulse) -> Result<Step> {
    let (lc, vc) = hermitian_eigh(&basis.position_c()?)?;
    let (lr, vr) = hermitian_eigh(&basis.position_r()?)?;
    let theta = Array2::from_shape_fn((lc.len(), lr.len()), |(a, b)| {
        pulse.rotation_angle(lc[a] + 0.5 * (lr[b] + basis.x_e))
    });
    Ok(Step::Rotation(Rotation {
        vc_h: dagger(&vc),
        vc,
        vr_conj: vr.mapv(|z| z.conj()),
        vr_t: vr.t().to_owned(),
        cos: theta.mapv(f64::cos),
        sin: theta.mapv(f64::sin),
    }))
}

impl Step {
    fn apply(&self, mut v: CompositeVector) -> CompositeVector {
        match self {
            Step::Kick { out, ops } => {
                let mut next = CompositeVector::zeros(v.dim_c, v.dim_r);
                for q in 0..4 {
                    if let Some(b) = v.blocks[q].take() {
                        let s = q & 1;
                        next.blocks[(q & 2) | out[s]] = Some(ops[s].apply(&b));
                    }
                }
                next
            }
            Step::Harmonic { phase_c, phase_r } => {
                for b in v.blocks.iter_mut().flatten() {
                    for ((n, m), z) in b.indexed_iter_mut() {
                        *z *= phase_c[n] * phase_r[m];
                    }
                }
                v
            }
            Step::Dense(u) => {
                let (dc, dr) = (v.dim_c, v.dim_r);
                for b in v.blocks.iter_mut().flatten() {
                    let flat = b.view().into_shape_with_order(dc * dr).expect("contiguous block").to_owned();
                    *b = u.dot(&flat).into_shape_with_order((dc, dr)).expect("block shape");
                }
                v
            }
            Step::Rotation(rot) => {
                for q2 in 0..2 {
                    let (b0, b1) = (v.blocks[q2].take(), v.blocks[2 + q2].take());
                    if b0.is_none() && b1.is_none() {
                        continue;
                    }
                    let to_eig = |b: Option<Array2<C64>>| b.map(|b| rot.vc_h.dot(&b).dot(&rot.vr_conj));
                    let (t0, t1) = (to_eig(b0), to_eig(b1));
                    let mut n0 = Array2::<C64>::zeros((v.dim_c, v.dim_r));
                    let mut n1 = Array2::<C64>::zeros((v.dim_c, v.dim_r));
                    let minus_i = C64::new(0.0, -1.0);
                    if let Some(t0) = &t0 {
                        Zip::from(&mut n0).and(t0).and(&rot.cos).for_each(|o, &x, &c| *o += x * c);
                        Zip::from(&mut n1).and(t0).and(&rot.sin).for_each(|o, &x, &s| *o += minus_i * x * s);
                    }
                    if let Some(t1) = &t1 {
                        Zip::from(&mut n0).and(t1).and(&rot.sin).for_each(|o, &x, &s| *o += minus_i * x * s);
                        Zip::from(&mut n1).and(t1).and(&rot.cos).for_each(|o, &x, &c| *o += x * c);
                    }
                    v.blocks[q2] = Some(rot.vc.dot(&n0).dot(&rot.vr_t));
                    v.blocks[2 + q2] = Some(rot.vc.dot(&n1).dot(&rot.vr_t));
                }
                v
            }
            Step::ConditionalFlip { q2 } => {
                v.blocks.swap(*q2, 2 + *q2);
                v
            }
            Step::Phase(ph) => {
                for (q, b) in v.blocks.iter_mut().enumerate() {
                    if let Some(b) = b {
                        let f = ph[q & 1];
                        b.mapv_inplace(|z| z * f);
                    }
                }
                v
            }
        }
    }
}

/// One input's motional path when every step is a product operator.
#[derive(Debug, Clone)]
pub struct ProductPath {
    pub output: usize,
    pub scale: C64,
    pub c: CMatrix,
    pub r: CMatrix,
}

/// Ordered list of steps ready to be applied to states.
#[derive(Debug, Clone)]
pub struct CompiledGate {
    dim_c: usize,
    dim_r: usize,
    steps: Vec<Step>,
}

impl CompiledGate {
    pub(crate) fn from_steps(basis: &ModeBasis, steps: Vec<Step>) -> Self {
        Self { dim_c: basis.dim_c.get(), dim_r: basis.dim_r.get(), steps }
    }

    /// Kick, evolve to `t0`, flip, evolve to `t_g`, kick, local phase fix.
    pub fn compile(
        basis: &ModeBasis,
        schedule: &GateSchedule,
        anharmonic: Option<&AnharmonicExpansion>,
    ) -> Result<Self> {
        schedule.validate()?;
        let evolve = |t: f64| -> Result<Step> {
            match anharmonic {
                Some(exp) => dense_step(basis, exp, t),
                None => Ok(harmonic_step(basis, t)),
            }
        };
        let mut steps = vec![kick_step(basis, &schedule.kick_open)?, evolve(schedule.t0)?];
        match &schedule.flip {
            FlipModel::Gaussian(p) => steps.push(rotation_step(basis, p)?),
            FlipModel::Idealized => steps.push(Step::ConditionalFlip { q2: schedule.right_branch_qubit2() }),
            FlipModel::Off => {}
        }
        steps.push(evolve(schedule.t_g - schedule.t0)?);
        steps.push(kick_step(basis, &schedule.kick_close)?);
        if schedule.phase_correction.iter().any(|p| *p != 0.0) {
            let [p0, p1] = schedule.phase_correction;
            steps.push(Step::Phase([C64::from_polar(1.0, -p0), C64::from_polar(1.0, -p1)]));
        }
        Ok(Self::from_steps(basis, steps))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_c, self.dim_r)
    }

    pub fn apply(&self, v: CompositeVector) -> Result<CompositeVector> {
        if v.dims() != self.dims() {
            return Err(Error::Shape(format!(
                "state dims {:?} do not match gate dims {:?}",
                v.dims(),
                self.dims()
            )));
        }
        Ok(self.steps.iter().fold(v, |acc, s| s.apply(acc)))
    }

    pub fn run(&self, initial: &SystemState) -> Result<SystemState> {
        match initial {
            SystemState::Pure(v) => Ok(SystemState::Pure(self.apply(v.clone())?)),
            other => Ok(SystemState::Ensemble(
                other
                    .components()?
                    .into_iter()
                    .map(|(p, v)| Ok((p, self.apply(v)?)))
                    .collect::<Result<_>>()?,
            )),
        }
    }

    /// Full unitary on the composite space; intended for small dimensions.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let m = self.dim_c * self.dim_r;
        let n = 4 * m;
        let mut u = CMatrix::zeros((n, n));
        for col in 0..n {
            let mut e = Array1::zeros(n);
            e[col] = ONE;
            let out = self.apply(CompositeVector::from_dense(&e, self.dim_c, self.dim_r)?)?;
            u.column_mut(col).assign(&out.to_dense());
        }
        Ok(u)
    }

    /// Per-input product operators, or `None` when a step couples the modes
    /// or mixes qubit-1 amplitudes with position-dependent weights.
    pub fn product_paths(&self) -> Option<[ProductPath; 4]> {
        let start = |q: usize| ProductPath {
            output: q,
            scale: ONE,
            c: linalg::identity(self.dim_c),
            r: linalg::identity(self.dim_r),
        };
        let mut paths = [start(0), start(1), start(2), start(3)];
        for step in &self.steps {
            for path in paths.iter_mut() {
                match step {
                    Step::Kick { out, ops } => {
                        let s = path.output & 1;
                        let op = &ops[s];
                        path.c = op.c.dot(&path.c);
                        path.r = op.r_t.t().dot(&path.r);
                        path.scale *= op.scale;
                        path.output = (path.output & 2) | out[s];
                    }
                    Step::Harmonic { phase_c, phase_r } => {
                        scale_rows(&mut path.c, phase_c);
                        scale_rows(&mut path.r, phase_r);
                    }
                    Step::ConditionalFlip { q2 } => {
                        if path.output & 1 == *q2 {
                            path.output ^= 2;
                        }
                    }
                    Step::Phase(ph) => path.scale *= ph[path.output & 1],
                    Step::Dense(_) | Step::Rotation(_) => return None,
                }
            }
        }
        Some(paths)
    }
}

fn scale_rows(m: &mut CMatrix, phases: &Array1<C64>) {
    for (mut row, p) in m.rows_mut().into_iter().zip(phases.iter()) {
        row.mapv_inplace(|z| z * p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{AddressedPulse, KickPulse};
    use crate::trap::TrapSpec;

    fn small_basis(eta: f64) -> ModeBasis {
        let spec = TrapSpec::with_unit_com_frequency(5.0 / 3.0, 1.0, 1.0, eta).unwrap();
        ModeBasis::new(&spec, eta, FockDim::new(6).unwrap(), FockDim::new(5).unwrap()).unwrap()
    }

    #[test]
    fn dense_roundtrip() {
        let v = Array1::from_shape_fn(4 * 30, |i| C64::new(i as f64, -(i as f64) / 3.0));
        let c = CompositeVector::from_dense(&v, 6, 5).unwrap();
        assert_eq!(c.to_dense(), v);
    }

    #[test]
    fn structured_kick_matches_kron() {
        let basis = small_basis(0.8);
        let pulse = KickPulse::single(0.8);
        let u = CompiledGate::from_steps(&basis, vec![kick_step(&basis, &pulse).unwrap()]).to_dense().unwrap();
        let k = basis.k;
        let ep = linalg::kron(
            &fock::displacement(C64::new(0.0, basis.eta_c), basis.dim_c).unwrap(),
            &fock::displacement(C64::new(0.0, -basis.eta_r), basis.dim_r).unwrap(),
        )
        .mapv(|z| z * C64::from_polar(1.0, -k * basis.x_e / 2.0));
        let m = 30;
        // |0⟩₂ goes to |1⟩₂ with E₊
        let block = u.slice(ndarray::s![m..2 * m, 0..m]).to_owned();
        assert!(linalg::max_abs_diff(&block, &ep) < 1e-12);
        assert!(linalg::unitarity_defect(&u, u.ncols()) < 1e-10);
    }

    #[test]
    fn rotation_is_unitary_and_commutes_with_qubit1_flip() {
        let basis = small_basis(0.5);
        let pulse = AddressedPulse { omega0: 3.0, center: basis.x_e / 2.0 + 0.4, width: 0.7, duration: 0.05 };
        let u = CompiledGate::from_steps(&basis, vec![rotation_step(&basis, &pulse).unwrap()]).to_dense().unwrap();
        assert!(linalg::unitarity_defect(&u, u.ncols()) < 1e-10);
        let m = 30;
        let a = u.slice(ndarray::s![0..m, 0..m]).to_owned();
        let b = u.slice(ndarray::s![2 * m..3 * m, 2 * m..3 * m]).to_owned();
        assert!(linalg::max_abs_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn thermal_ensemble_drops_tail() {
        let basis = small_basis(0.5).with_dims(FockDim::new(40).unwrap(), FockDim::new(20).unwrap());
        let e = MotionalEnsemble::thermal(&basis, 1.0, 0.5, 1e-6).unwrap();
        let w: f64 = e.components().iter().map(|c| c.0).sum();
        assert!((w - 1.0).abs() < 1e-12);
        assert!(e.len() < 800);
        assert!(e.components().windows(2).all(|p| p[0].0 >= p[1].0));
    }
}
