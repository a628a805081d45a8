//! Collective decoherence modelled as an unknown common unitary.
//!
//! The channel averages `(U⊗k) ρ (U⊗k)†` over Haar-random `U`. Immunity is
//! judged per sample: a state is immune when every sampled collective
//! rotation leaves it unchanged (fidelity above `1 − 1e-9`).

use serde::{Deserialize, Serialize};

use crate::dfs_states::{make_eta, make_phi0, make_phi1};
use crate::error::{argument, Result};
use crate::qcore::{apply_collective, haar_su2, partial_trace, DensityOperator, QuantumState, Unitary2, Wing};
use crate::seeding::{child_stream, named_stream, stream_rng, StreamRng};

/// Minimum fidelity for an "immune" verdict.
pub const IMMUNITY_THRESHOLD: f64 = 1.0 - 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// One unitary on every qubit.
    Global,
    /// Independent unitaries on qubits 1–4 and 5–8.
    PerWing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectiveChannel {
    pub n_samples: usize,
    pub scope: Scope,
}

impl CollectiveChannel {
    fn check(&self, n_qubits: usize) -> Result<()> {
        if self.scope == Scope::PerWing && n_qubits != 8 {
            return Err(argument(format!("per-wing scope needs 8 qubits, got {n_qubits}")));
        }
        if self.n_samples == 0 {
            return Err(argument("channel needs at least one sample"));
        }
        Ok(())
    }

    /// Per-sample rotations: one unitary (global) or one per wing.
    fn draw(&self, rng: &mut StreamRng) -> Vec<(Unitary2, Wing)> {
        match self.scope {
            Scope::Global => vec![(haar_su2(rng), Wing::All)],
            Scope::PerWing => vec![(haar_su2(rng), Wing::Alice), (haar_su2(rng), Wing::Bob)],
        }
    }
}

fn sample_rng(seed: u64, k: usize) -> StreamRng {
    stream_rng(seed, child_stream(named_stream("decoherence"), k as u64))
}

/// Monte-Carlo average of the collective channel.
pub fn apply_channel(rho: &DensityOperator, ch: &CollectiveChannel, seed: u64) -> Result<DensityOperator> {
    ch.check(rho.n_qubits())?;
    let mut acc = nalgebra::DMatrix::zeros(rho.matrix().nrows(), rho.matrix().ncols());
    for k in 0..ch.n_samples {
        let mut rng = sample_rng(seed, k);
        let mut out = rho.clone();
        for (u, wing) in ch.draw(&mut rng) {
            out = out.conjugate_collective(&u, wing)?;
        }
        acc += out.matrix();
    }
    acc /= crate::qcore::re(ch.n_samples as f64);
    DensityOperator::new(rho.n_qubits(), acc)
}

/// What [`immunity_report`] checks.
#[derive(Clone, Copy, Debug)]
pub enum ImmunityInput<'a> {
    Pure(&'a QuantumState),
    Mixed(&'a DensityOperator),
}

impl ImmunityInput<'_> {
    fn n_qubits(&self) -> usize {
        match self {
            ImmunityInput::Pure(s) => s.n_qubits(),
            ImmunityInput::Mixed(r) => r.n_qubits(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmunityReport {
    pub samples: usize,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub immune: bool,
}

/// Fidelity between the input and its image under each sampled collective
/// rotation. Pure states use `|⟨ψ|U ψ⟩|²`; mixed states the Uhlmann fidelity.
pub fn immunity_report(input: ImmunityInput<'_>, ch: &CollectiveChannel, seed: u64) -> Result<ImmunityReport> {
    ch.check(input.n_qubits())?;
    let mut min_fidelity = f64::INFINITY;
    let mut sum = 0.0;
    for k in 0..ch.n_samples {
        let mut rng = sample_rng(seed, k);
        let rotations = ch.draw(&mut rng);
        let f = match input {
            ImmunityInput::Pure(s) => {
                let mut out = s.clone();
                for (u, wing) in &rotations {
                    out = apply_collective(&out, u, *wing)?;
                }
                s.inner(&out).norm_sqr()
            }
            ImmunityInput::Mixed(rho) => {
                let mut out = rho.clone();
                for (u, wing) in &rotations {
                    out = out.conjugate_collective(u, *wing)?;
                }
                rho.fidelity(&out)
            }
        };
        min_fidelity = min_fidelity.min(f);
        sum += f;
    }
    Ok(ImmunityReport {
        samples: ch.n_samples,
        min_fidelity,
        mean_fidelity: sum / ch.n_samples as f64,
        immune: min_fidelity > IMMUNITY_THRESHOLD,
    })
}

/// `|χ±⟩ = [(1 ± √13)|φ0⟩ + 2√3|φ1⟩] / √(26 ± 2√13)`.
pub fn chi_states() -> (QuantumState, QuantumState) {
    let s13 = 13f64.sqrt();
    let s3 = 3f64.sqrt();
    let (p0, p1) = (make_phi0(), make_phi1());
    let build = |sign: f64| {
        let n = (26.0 + sign * 2.0 * s13).sqrt();
        let amps = p0
            .amplitudes()
            .iter()
            .zip(p1.amplitudes())
            .map(|(a, b)| (a * (1.0 + sign * s13) + b * (2.0 * s3)) / n)
            .collect();
        QuantumState::new(4, amps).expect("closed-form state is normalized")
    };
    (build(1.0), build(-1.0))
}

/// Eigenvalues `(7 ± √13)/14` of each wing's reduced state.
pub fn reduced_state_eigenvalues() -> (f64, f64) {
    let s13 = 13f64.sqrt();
    ((7.0 + s13) / 14.0, (7.0 - s13) / 14.0)
}

/// Spectral comparison of Alice's reduced state with its closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedStateReport {
    /// Two largest eigenvalues, descending.
    pub eigenvalues: [f64; 2],
    pub expected_eigenvalues: [f64; 2],
    /// Largest magnitude among the remaining 14 eigenvalues.
    pub residual_spectrum: f64,
    /// Phase-insensitive distance of each computed eigenvector to `|χ±⟩`.
    pub eigenvector_distance: [f64; 2],
    /// Max-entry distance to the closed-form mixture of `|χ±⟩`.
    pub reconstruction_error: f64,
}

/// Reduced state of the source state on qubits 1–4, compared with its
/// closed-form spectral decomposition.
pub fn reduced_state_report() -> Result<ReducedStateReport> {
    let rho = partial_trace(&make_eta(), &[1, 2, 3, 4])?;
    let eig = rho.eigen();
    let (lp, lm) = reduced_state_eigenvalues();
    let (chi_p, chi_m) = chi_states();
    let vec_dist = |v: &[num_complex::Complex64], chi: &QuantumState| {
        QuantumState::from_raw(4, v.to_vec()).distance_up_to_phase(chi)
    };
    let closed = DensityOperator::mixture(&[(lp, &chi_p), (lm, &chi_m)])?;
    Ok(ReducedStateReport {
        eigenvalues: [eig[0].0, eig[1].0],
        expected_eigenvalues: [lp, lm],
        residual_spectrum: eig[2..].iter().map(|(l, _)| l.abs()).fold(0.0, f64::max),
        eigenvector_distance: [vec_dist(&eig[0].1, &chi_p), vec_dist(&eig[1].1, &chi_m)],
        reconstruction_error: rho.max_abs_diff(&closed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_wing_scope_needs_eight_qubits() {
        let ch = CollectiveChannel {
            n_samples: 2,
            scope: Scope::PerWing,
        };
        assert!(apply_channel(&make_phi0().to_density(), &ch, 0).is_err());
        assert!(immunity_report(ImmunityInput::Pure(&make_phi0()), &ch, 0).is_err());
    }

    #[test]
    fn chi_states_are_orthonormal() {
        let (p, m) = chi_states();
        assert!(p.inner(&m).norm() < 1e-15);
    }

    #[test]
    fn reduced_state_matches_closed_form() {
        let r = reduced_state_report().unwrap();
        assert!((r.eigenvalues[0] - r.expected_eigenvalues[0]).abs() < 1e-12);
        assert!((r.eigenvalues[1] - r.expected_eigenvalues[1]).abs() < 1e-12);
        assert!((r.eigenvalues[0] - 0.757_54).abs() < 1e-5);
        assert!(r.residual_spectrum < 1e-12);
        assert!(r.eigenvector_distance.iter().all(|d| *d < 1e-10));
        assert!(r.reconstruction_error < 1e-12);
    }
}
