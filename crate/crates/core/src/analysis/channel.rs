//! Two-qubit quantum channels in Choi form, with the fidelity and purity
//! figures of merit.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::fock::linalg::{self, dagger, CMatrix, C64, ONE, ZERO};
use crate::tol;

/// Dimension of the internal two-qubit space.
pub const D: usize = 4;

/// Channel `ε` on two qubits, stored as
/// `J[(i·4 + j), (i'·4 + j')] = ⟨j| ε(|i⟩⟨i'|) |j'⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    choi: CMatrix,
}

impl Channel {
    /// Wraps a Choi matrix after checking Hermiticity, positivity and trace
    /// preservation.
    pub fn from_choi(choi: CMatrix) -> Result<Self> {
        if choi.dim() != (D * D, D * D) {
            return Err(Error::Shape(format!("Choi matrix must be 16x16, got {:?}", choi.dim())));
        }
        let ch = Self { choi: linalg::hermitize(&choi) };
        let defect = linalg::hermiticity_defect(&choi);
        if defect > tol::RENORM_FACTOR * tol::HERM {
            return Err(Error::NotCptp(format!("Choi matrix not Hermitian, defect {defect:.3e}")));
        }
        let (min_eig, tp) = ch.cptp_defects()?;
        if min_eig < -tol::PSD {
            return Err(Error::NotCptp(format!("Choi eigenvalue {min_eig:.3e} is negative")));
        }
        if tp > tol::RENORM_FACTOR * tol::TRACE.max(1e-9) {
            return Err(Error::NotCptp(format!("trace preservation violated by {tp:.3e}")));
        }
        Ok(ch)
    }

    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        Self::from_kraus(std::slice::from_ref(u))
    }

    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let mut choi = CMatrix::zeros((D * D, D * D));
        for k in kraus {
            if k.dim() != (D, D) {
                return Err(Error::Shape(format!("Kraus operators must be 4x4, got {:?}", k.dim())));
            }
            // ε(|i⟩⟨i'|) = K|i⟩⟨i'|K†
            for i in 0..D {
                for ip in 0..D {
                    for j in 0..D {
                        for jp in 0..D {
                            choi[[i * D + j, ip * D + jp]] += k[[j, i]] * k[[jp, ip]].conj();
                        }
                    }
                }
            }
        }
        Self::from_choi(choi)
    }

    pub fn identity() -> Self {
        Self::from_unitary(&linalg::identity(D)).expect("identity is a channel")
    }

    /// `ε(X) = Tr(X)·I/4`.
    pub fn depolarizing() -> Self {
        let mut choi = CMatrix::zeros((D * D, D * D));
        for i in 0..D {
            for j in 0..D {
                choi[[i * D + j, i * D + j]] = C64::new(1.0 / D as f64, 0.0);
            }
        }
        Self { choi }
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    /// Smallest Choi eigenvalue and the largest deviation of `Tr_out J` from
    /// the identity.
    pub fn cptp_defects(&self) -> Result<(f64, f64)> {
        let (vals, _) = linalg::hermitian_eigh(&self.choi)?;
        let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut tp = 0.0_f64;
        for i in 0..D {
            for ip in 0..D {
                let s: C64 = (0..D).map(|j| self.choi[[i * D + j, ip * D + j]]).sum();
                let target = if i == ip { ONE } else { ZERO };
                tp = tp.max((s - target).norm());
            }
        }
        Ok((min_eig, tp))
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros((D, D));
        for i in 0..D {
            for ip in 0..D {
                let r = rho[[i, ip]];
                if r == ZERO {
                    continue;
                }
                for j in 0..D {
                    for jp in 0..D {
                        out[[j, jp]] += r * self.choi[[i * D + j, ip * D + jp]];
                    }
                }
            }
        }
        out
    }

    /// `ρ ↦ V ε(ρ) V†`.
    pub fn then_unitary(&self, v: &CMatrix) -> Self {
        let mut choi = CMatrix::zeros((D * D, D * D));
        for i in 0..D {
            for ip in 0..D {
                let mut block = CMatrix::zeros((D, D));
                for j in 0..D {
                    for jp in 0..D {
                        block[[j, jp]] = self.choi[[i * D + j, ip * D + jp]];
                    }
                }
                let out = v.dot(&block).dot(&dagger(v));
                for j in 0..D {
                    for jp in 0..D {
                        choi[[i * D + j, ip * D + jp]] = out[[j, jp]];
                    }
                }
            }
        }
        Self { choi }
    }

    /// `ρ ↦ ε(V ρ V†)`.
    pub fn after_unitary(&self, v: &CMatrix) -> Self {
        let mut choi = CMatrix::zeros((D * D, D * D));
        for i in 0..D {
            for ip in 0..D {
                let mut e = CMatrix::zeros((D, D));
                e[[i, ip]] = ONE;
                let out = self.apply(&v.dot(&e).dot(&dagger(v)));
                for j in 0..D {
                    for jp in 0..D {
                        choi[[i * D + j, ip * D + jp]] = out[[j, jp]];
                    }
                }
            }
        }
        Self { choi }
    }
}

/// Haar-averaged fidelity `(d·F_e + 1)/(d + 1)` of `channel` against the
/// unitary `target`, with `F_e` the entanglement fidelity of `target† ∘ ε`.
pub fn average_fidelity(channel: &Channel, target: &CMatrix) -> Result<f64> {
    if target.dim() != (D, D) {
        return Err(Error::Shape(format!("target must be 4x4, got {:?}", target.dim())));
    }
    let (min_eig, _) = channel.cptp_defects()?;
    if min_eig < -tol::PSD {
        return Err(Error::NotCptp(format!("Choi eigenvalue {min_eig:.3e} is negative")));
    }
    let j = &channel.choi;
    let mut fe = ZERO;
    for i in 0..D {
        for jj in 0..D {
            let a = target[[jj, i]].conj();
            if a == ZERO {
                continue;
            }
            for ip in 0..D {
                for jp in 0..D {
                    fe += a * j[[i * D + jj, ip * D + jp]] * target[[jp, ip]];
                }
            }
        }
    }
    let fe = fe.re / (D * D) as f64;
    Ok((D as f64 * fe + 1.0) / (D as f64 + 1.0))
}

/// Single-qubit frame `|0⟩, |1⟩, |±⟩, |±i⟩`.
fn six_states() -> [[C64; 2]; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [ONE, ZERO],
        [ZERO, ONE],
        [C64::new(h, 0.0), C64::new(h, 0.0)],
        [C64::new(h, 0.0), C64::new(-h, 0.0)],
        [C64::new(h, 0.0), C64::new(0.0, h)],
        [C64::new(h, 0.0), C64::new(0.0, -h)],
    ]
}

/// The 36 product inputs of the six-state frame on both qubits.
pub fn product_frame() -> Vec<Array1<C64>> {
    let frame = six_states();
    let mut out = Vec::with_capacity(36);
    for a in &frame {
        for b in &frame {
            out.push(Array1::from_vec(vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]));
        }
    }
    out
}

/// Mean output purity `Tr ε(ρ)²` over the 36 product frame states.
pub fn average_purity(channel: &Channel) -> f64 {
    let frame = product_frame();
    let total: f64 = frame
        .iter()
        .map(|psi| {
            let rho = CMatrix::from_shape_fn((D, D), |(a, b)| psi[a] * psi[b].conj());
            channel.apply(&rho).iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum();
    total / frame.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::ideal_gate;

    fn x1() -> CMatrix {
        let mut m = CMatrix::zeros((4, 4));
        for q in 0..4 {
            m[[q ^ 2, q]] = ONE;
        }
        m
    }

    #[test]
    fn unitary_channel_has_unit_fidelity_and_purity() {
        let u = ideal_gate();
        let ch = Channel::from_unitary(&u).unwrap();
        assert!((average_fidelity(&ch, &u).unwrap() - 1.0).abs() < 1e-14);
        assert!((average_purity(&ch) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn depolarizing_values() {
        let ch = Channel::depolarizing();
        assert!((average_fidelity(&ch, &ideal_gate()).unwrap() - 0.25).abs() < 1e-14);
        assert!((average_purity(&ch) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn pauli_mismatch_gives_one_fifth() {
        let u = ideal_gate();
        let ch = Channel::from_unitary(&x1().dot(&u)).unwrap();
        assert!((average_fidelity(&ch, &u).unwrap() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn composition_matches_product_unitary() {
        let u = ideal_gate();
        let a = Channel::from_unitary(&u).unwrap().then_unitary(&x1());
        let b = Channel::from_unitary(&x1().dot(&u)).unwrap();
        assert!(linalg::max_abs_diff(a.choi(), b.choi()) < 1e-14);
        let c = Channel::from_unitary(&u).unwrap().after_unitary(&x1());
        let d = Channel::from_unitary(&u.dot(&x1())).unwrap();
        assert!(linalg::max_abs_diff(c.choi(), d.choi()) < 1e-14);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let half = ideal_gate().mapv(|z| z * 0.5);
        assert!(matches!(Channel::from_unitary(&half), Err(Error::NotCptp(_))));
    }
}
