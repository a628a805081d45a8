//! The four-qubit singlet states, the eight-qubit source state and the two
//! local observables built on them.
//!
//! All states are assembled from closed-form coefficients. `|φ0⟩, |φ1⟩` span
//! the total-spin-zero (decoherence-free) subspace of four qubits; `|ψ0⟩, |ψ1⟩`
//! are the same states with qubits 2 and 3 exchanged.

use std::f64::consts::FRAC_PI_3;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::qcore::{
    apply_collective, permute_qubits, qubit_mask, re, swap_permutation, tensor, Projector, QuantumState, Unitary2,
    Wing, C64, TOL, ZERO,
};

/// Residual norm above which a state is considered outside span{φ0, φ1}.
pub const SUBSPACE_TOL: f64 = 1e-8;

/// Mixing angle of the G eigenbasis relative to F inside the singlet subspace.
pub const G_ANGLE: f64 = FRAC_PI_3;

pub fn make_phi0() -> QuantumState {
    QuantumState::from_terms(4, 0.5, &[(1.0, "0101"), (-1.0, "0110"), (-1.0, "1001"), (1.0, "1010")])
        .expect("closed-form state is normalized")
}

pub fn make_phi1() -> QuantumState {
    QuantumState::from_terms(
        4,
        1.0 / (2.0 * 3f64.sqrt()),
        &[
            (2.0, "0011"),
            (-1.0, "0101"),
            (-1.0, "0110"),
            (-1.0, "1001"),
            (-1.0, "1010"),
            (2.0, "1100"),
        ],
    )
    .expect("closed-form state is normalized")
}

/// `|φ0⟩` with qubits 2 and 3 exchanged.
pub fn make_psi0() -> QuantumState {
    permute_qubits(&make_phi0(), &swap_permutation(4, 2, 3)).expect("valid transposition")
}

/// `|φ1⟩` with qubits 2 and 3 exchanged.
pub fn make_psi1() -> QuantumState {
    permute_qubits(&make_phi1(), &swap_permutation(4, 2, 3)).expect("valid transposition")
}

/// Eight-qubit source state `(|φ0φ0⟩ + √3|φ0φ1⟩ + √3|φ1φ0⟩)/√7`; Alice holds
/// qubits 1–4 and Bob qubits 5–8.
pub fn make_eta() -> QuantumState {
    let (p0, p1) = (make_phi0(), make_phi1());
    let s3 = 3f64.sqrt();
    let t00 = tensor(&p0, &p0).unwrap();
    let t01 = tensor(&p0, &p1).unwrap();
    let t10 = tensor(&p1, &p0).unwrap();
    let amps = (0..256)
        .map(|i| (t00.amplitude(i) + re(s3) * (t01.amplitude(i) + t10.amplitude(i))) / 7f64.sqrt())
        .collect();
    QuantumState::new(8, amps).expect("closed-form state is normalized")
}

/// Coefficients `⟨l_i ⊗ r_j | s⟩` of an eight-qubit state in a product of two
/// four-qubit bases (only the listed basis vectors; no completeness implied).
pub fn product_coefficients(
    s: &QuantumState,
    left: [&QuantumState; 2],
    right: [&QuantumState; 2],
) -> Result<[[C64; 2]; 2]> {
    if s.n_qubits() != 8 {
        return Err(argument("product coefficients need an 8-qubit state"));
    }
    let mut out = [[ZERO; 2]; 2];
    for (i, l) in left.iter().enumerate() {
        for (j, r) in right.iter().enumerate() {
            out[i][j] = tensor(l, r)?.inner(s);
        }
    }
    Ok(out)
}

/// Spin axis for [`collective_spin`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

/// `(Σ_k σ_k) |s⟩` for the chosen Pauli axis, summed over every qubit.
pub fn collective_spin(s: &QuantumState, axis: SpinAxis) -> Vec<C64> {
    let n = s.n_qubits();
    let a = s.amplitudes();
    let mut out = vec![ZERO; a.len()];
    for q in 1..=n {
        let mask = qubit_mask(n, q);
        for (i, o) in out.iter_mut().enumerate() {
            let bit = i & mask != 0;
            *o += match axis {
                SpinAxis::Z => a[i] * if bit { -1.0 } else { 1.0 },
                SpinAxis::X => a[i ^ mask],
                // σy|0⟩ = i|1⟩, σy|1⟩ = −i|0⟩
                SpinAxis::Y => a[i ^ mask] * if bit { C64::i() } else { -C64::i() },
            };
        }
    }
    out
}

/// A four-qubit state in the `(|φ0⟩, |φ1⟩)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfsVector {
    pub c0: C64,
    pub c1: C64,
}

impl DfsVector {
    pub fn new(c0: C64, c1: C64) -> Self {
        Self { c0, c1 }
    }

    /// `cos ω |φ0⟩ + sin ω |φ1⟩`.
    pub fn from_angle(omega: f64) -> Self {
        Self::new(re(omega.cos()), re(omega.sin()))
    }

    /// `sin ω |φ0⟩ − cos ω |φ1⟩`, orthogonal to [`DfsVector::from_angle`].
    pub fn orthogonal_from_angle(omega: f64) -> Self {
        Self::new(re(omega.sin()), re(-omega.cos()))
    }

    pub fn norm(&self) -> f64 {
        (self.c0.norm_sqr() + self.c1.norm_sqr()).sqrt()
    }
}

/// `c0 |φ0⟩ + c1 |φ1⟩` as a four-qubit state.
pub fn dfs_embed(v: DfsVector) -> Result<QuantumState> {
    let (p0, p1) = (make_phi0(), make_phi1());
    let amps = p0
        .amplitudes()
        .iter()
        .zip(p1.amplitudes())
        .map(|(a, b)| v.c0 * a + v.c1 * b)
        .collect();
    QuantumState::new(4, amps)
}

/// Coordinates of a four-qubit state in the `(|φ0⟩, |φ1⟩)` basis. Fails when
/// the component outside that span exceeds [`SUBSPACE_TOL`].
pub fn dfs_project(s: &QuantumState) -> Result<DfsVector> {
    if s.n_qubits() != 4 {
        return Err(argument("dfs_project needs a 4-qubit state"));
    }
    let (p0, p1) = (make_phi0(), make_phi1());
    let v = DfsVector::new(p0.inner(s), p1.inner(s));
    let residual = s
        .amplitudes()
        .iter()
        .zip(p0.amplitudes().iter().zip(p1.amplitudes()))
        .map(|(a, (x, y))| (a - v.c0 * x - v.c1 * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > SUBSPACE_TOL {
        return Err(Error::Subspace { residual });
    }
    Ok(v)
}

/// Label of an [`Observable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableLabel {
    F,
    G,
    Custom,
}

/// Hermitian observable stored as its eigenpairs. Anything orthogonal to the
/// listed eigenvectors is the null outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub label: ObservableLabel,
    eigenpairs: Vec<(f64, QuantumState)>,
}

impl Observable {
    pub fn new(label: ObservableLabel, eigenpairs: Vec<(f64, QuantumState)>) -> Result<Self> {
        for (i, (_, a)) in eigenpairs.iter().enumerate() {
            if (a.norm() - 1.0).abs() > TOL {
                return Err(argument("eigenvector is not normalized"));
            }
            for (_, b) in &eigenpairs[i + 1..] {
                if a.inner(b).norm() > TOL {
                    return Err(argument("eigenvectors are not orthogonal"));
                }
            }
        }
        Ok(Self { label, eigenpairs })
    }

    /// `F = −|φ0⟩⟨φ0| + |φ1⟩⟨φ1|`.
    pub fn f() -> Self {
        Self {
            label: ObservableLabel::F,
            eigenpairs: vec![(-1.0, make_phi0()), (1.0, make_phi1())],
        }
    }

    /// `G = −|ψ0⟩⟨ψ0| + |ψ1⟩⟨ψ1|`.
    pub fn g() -> Self {
        Self {
            label: ObservableLabel::G,
            eigenpairs: vec![(-1.0, make_psi0()), (1.0, make_psi1())],
        }
    }

    /// Observable with eigenvalue −1 on `cos α|φ0⟩ + sin α|φ1⟩` and +1 on
    /// `sin α|φ0⟩ − cos α|φ1⟩`. `α = 0` gives F (up to the sign of the +1
    /// eigenvector) and `α = π/3` gives G.
    pub fn in_singlet_plane(alpha: f64) -> Self {
        Self {
            label: ObservableLabel::Custom,
            eigenpairs: vec![
                (-1.0, dfs_embed(DfsVector::from_angle(alpha)).unwrap()),
                (1.0, dfs_embed(DfsVector::orthogonal_from_angle(alpha)).unwrap()),
            ],
        }
    }

    pub fn eigenpairs(&self) -> &[(f64, QuantumState)] {
        &self.eigenpairs
    }

    pub fn n_qubits(&self) -> usize {
        self.eigenpairs.first().map_or(0, |(_, v)| v.n_qubits())
    }

    /// Projector onto the eigenspace of `value`.
    pub fn projector(&self, value: f64) -> Projector {
        let vecs = self
            .eigenpairs
            .iter()
            .filter(|(l, _)| (*l - value).abs() < TOL)
            .map(|(_, v)| v.clone())
            .collect();
        Projector::new(vecs).expect("eigenvectors are orthonormal")
    }

    /// The observable whose eigenvectors are `(U^{⊗n})|v⟩`.
    pub fn rotated(&self, u: &Unitary2) -> Self {
        Self {
            label: self.label,
            eigenpairs: self
                .eigenpairs
                .iter()
                .map(|(l, v)| (*l, apply_collective(v, u, Wing::All).expect("full register")))
                .collect(),
        }
    }

    /// Dense matrix `Σ λ |v⟩⟨v|`.
    pub fn matrix(&self) -> DMatrix<C64> {
        let d = 1 << self.n_qubits();
        let mut m = DMatrix::zeros(d, d);
        for (l, v) in &self.eigenpairs {
            let col = nalgebra::DVector::from_column_slice(v.amplitudes());
            m += &col * col.adjoint() * re(*l);
        }
        m
    }
}
