//! Reduced internal channel of a compiled gate for a given motional state.

use serde::Serialize;

use super::channel::{Channel, D};
use crate::error::{Error, Result};
use crate::fock::linalg::{self, dagger, CMatrix, C64, ZERO};
use crate::fock::DensityOp;
use crate::gate::engine::{CompiledGate, CompositeVector, MotionalState, ProductPath};

/// Which propagation strategy produced a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Per-mode operator products, exact for product motional states.
    Product,
    /// One propagation per motional ensemble component.
    Trajectory,
}

#[derive(Debug, Clone)]
pub struct ProcessOptions {
    /// Discarded weight allowed when splitting a mixed motional state.
    pub drop_tol: f64,
    /// Compute motional restoration distances.
    pub restoration: bool,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        Self { drop_tol: 1e-6, restoration: true }
    }
}

#[derive(Debug, Clone)]
pub struct ProcessResult {
    pub channel: Channel,
    pub engine: Engine,
    /// Number of motional components propagated.
    pub components: usize,
    /// Largest, over basis inputs, of the summed per-mode trace distances
    /// between the final and initial motional states. For the product engine
    /// this bounds the full motional trace distance.
    pub restoration: Option<f64>,
}

/// Runs `gate` on every internal basis input combined with `motion` and
/// traces out the motion.
pub fn internal_channel(gate: &CompiledGate, motion: &MotionalState, opts: &ProcessOptions) -> Result<ProcessResult> {
    if motion.dims() != gate.dims() {
        return Err(Error::Shape(format!(
            "motional dims {:?} do not match gate dims {:?}",
            motion.dims(),
            gate.dims()
        )));
    }
    match (gate.product_paths(), motion) {
        (Some(paths), MotionalState::Product { c, r }) => product_channel(&paths, c, r, opts),
        _ => trajectory_channel(gate, motion, opts),
    }
}

/// `Tr(A ρ B†)`.
fn sandwich_trace(a: &CMatrix, rho: &CMatrix, b: &CMatrix) -> C64 {
    a.dot(rho).iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

fn product_channel(paths: &[ProductPath; 4], rc: &DensityOp, rr: &DensityOp, opts: &ProcessOptions) -> Result<ProcessResult> {
    let mut choi = CMatrix::zeros((D * D, D * D));
    for (i, pi) in paths.iter().enumerate() {
        for (ip, pip) in paths.iter().enumerate() {
            let tc = sandwich_trace(&pi.c, rc.matrix(), &pip.c);
            let tr = sandwich_trace(&pi.r, rr.matrix(), &pip.r);
            choi[[i * D + pi.output, ip * D + pip.output]] = pi.scale * pip.scale.conj() * tc * tr;
        }
    }
    let restoration = if opts.restoration {
        let mut worst = 0.0_f64;
        for p in paths {
            let sc = p.c.dot(rc.matrix()).dot(&dagger(&p.c));
            let sr = p.r.dot(rr.matrix()).dot(&dagger(&p.r));
            let (tc, tr) = (linalg::trace(&sc).re, linalg::trace(&sr).re);
            let d = trace_distance(&sc, rc.matrix())? + trace_distance(&sr, rr.matrix())? + (tc * tr - 1.0).abs();
            worst = worst.max(d);
        }
        Some(worst)
    } else {
        None
    };
    Ok(ProcessResult {
        channel: Channel::from_choi(choi)?,
        engine: Engine::Product,
        components: 1,
        restoration,
    })
}

fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(0.5 * linalg::trace_norm_hermitian(&linalg::hermitize(&(a - b)))?)
}

fn trajectory_channel(gate: &CompiledGate, motion: &MotionalState, opts: &ProcessOptions) -> Result<ProcessResult> {
    let ensemble = motion.to_ensemble(opts.drop_tol)?;
    let (dc, dr) = gate.dims();
    let mut choi = CMatrix::zeros((D * D, D * D));
    let mut initial_c = CMatrix::zeros((dc, dc));
    let mut initial_r = CMatrix::zeros((dr, dr));
    let mut final_c = [CMatrix::zeros((dc, dc)), CMatrix::zeros((dc, dc))];
    let mut final_r = [CMatrix::zeros((dr, dr)), CMatrix::zeros((dr, dr))];
    for (p, phi) in ensemble.components() {
        let w = C64::new(*p, 0.0);
        // the gate commutes with σˣ on qubit 1, so inputs 2 and 3 follow from 0 and 1
        let out0 = gate.apply(CompositeVector::basis_product(0, phi.clone())?)?;
        let out1 = gate.apply(CompositeVector::basis_product(1, phi.clone())?)?;
        let outs = [out0.clone(), out1.clone(), out0.flip_qubit1(), out1.flip_qubit1()];
        for i in 0..D {
            for ip in 0..D {
                for j in 0..D {
                    for jp in 0..D {
                        let v = match (outs[i].block(j), outs[ip].block(jp)) {
                            (Some(a), Some(b)) => a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum(),
                            _ => ZERO,
                        };
                        choi[[i * D + j, ip * D + jp]] += w * v;
                    }
                }
            }
        }
        if opts.restoration {
            let init = CompositeVector::basis_product(0, phi.clone())?;
            let (ic, ir) = init.mode_densities();
            initial_c.scaled_add(w, &ic);
            initial_r.scaled_add(w, &ir);
            for (s, out) in outs.iter().take(2).enumerate() {
                let (fc, fr) = out.mode_densities();
                final_c[s].scaled_add(w, &fc);
                final_r[s].scaled_add(w, &fr);
            }
        }
    }
    let restoration = if opts.restoration {
        let mut worst = 0.0_f64;
        for s in 0..2 {
            worst = worst.max(trace_distance(&final_c[s], &initial_c)? + trace_distance(&final_r[s], &initial_r)?);
        }
        Some(worst)
    } else {
        None
    };
    Ok(ProcessResult {
        channel: Channel::from_choi(choi)?,
        engine: Engine::Trajectory,
        components: ensemble.len(),
        restoration,
    })
}
