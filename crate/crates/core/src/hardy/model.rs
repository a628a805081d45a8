//! Effective two-qubit model of the argument and its optimization.
//!
//! Each wing's state lives in span{φ0, φ1}, so the source state is a vector
//! `c = (c00, c01, c10, c11)` over `|φ_i φ_j⟩`. F is diagonal in that basis
//! (−1 on φ0, +1 on φ1); the second observable of a wing is F rotated by an
//! angle α inside the subspace, with eigenvalue −1 on `cos α φ0 + sin α φ1`
//! and +1 on `sin α φ0 − cos α φ1`. The published observable G is α = π/3.
//!
//! Only states in the singlet product subspace and observables of this form
//! are searched: those are the only local observables that are invariant
//! under collective rotations and readable with fixed single-qubit
//! measurements.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::correlations::product_amplitude;
use crate::dfs_states::{make_phi0, make_phi1, Observable};
use crate::error::{argument, Error, Result};
use crate::optim::NelderMead;
use crate::qcore::{re, tensor, QuantumState, C64, TOL, ZERO};
use crate::seeding::{child_stream, named_stream, stream_rng};

/// `((√5 − 1)/2)⁵`, the best coincidence probability when the second
/// observable of each wing may be rotated freely.
pub const GOLDEN_HARDY_PROBABILITY: f64 = 0.090_169_943_749_474_24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyInstance {
    /// `(c00, c01, c10, c11)` over `|φ_i φ_j⟩`.
    pub coefficients: [C64; 4],
    pub alpha_a: f64,
    pub alpha_b: f64,
}

/// Coincidence probability and the three quantities that must vanish.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyEvaluation {
    /// `P(G_A = +1, G_B = +1)`
    pub probability: f64,
    /// `[P(F_A=+1, F_B=+1), P(F_A=−1, G_B=+1), P(G_A=+1, F_B=−1)]`
    pub residuals: [f64; 3],
}

impl HardyEvaluation {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn plus_vec(alpha: f64) -> [f64; 2] {
    [alpha.sin(), -alpha.cos()]
}

const F_MINUS: [f64; 2] = [1.0, 0.0];
const F_PLUS: [f64; 2] = [0.0, 1.0];

fn kron(a: [f64; 2], b: [f64; 2]) -> [f64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

fn overlap_sq(v: [f64; 4], c: &[C64; 4]) -> f64 {
    v.iter().zip(c).map(|(x, y)| y * *x).sum::<C64>().norm_sqr()
}

/// Vectors whose overlap with the state must vanish.
fn constraint_vectors(alpha_a: f64, alpha_b: f64) -> [[f64; 4]; 3] {
    [
        kron(F_PLUS, F_PLUS),
        kron(F_MINUS, plus_vec(alpha_b)),
        kron(plus_vec(alpha_a), F_MINUS),
    ]
}

fn target_vector(alpha_a: f64, alpha_b: f64) -> [f64; 4] {
    kron(plus_vec(alpha_a), plus_vec(alpha_b))
}

/// Evaluates the instance in the effective two-qubit model.
pub fn hardy_probability(inst: &HardyInstance) -> Result<HardyEvaluation> {
    let n: f64 = inst.coefficients.iter().map(|c| c.norm_sqr()).sum();
    if (n - 1.0).abs() > TOL {
        return Err(argument(format!("coefficients have squared norm {n}, expected 1")));
    }
    let cons = constraint_vectors(inst.alpha_a, inst.alpha_b);
    Ok(HardyEvaluation {
        probability: overlap_sq(target_vector(inst.alpha_a, inst.alpha_b), &inst.coefficients),
        residuals: cons.map(|v| overlap_sq(v, &inst.coefficients)),
    })
}

/// The same four quantities computed on the full eight-qubit state with the
/// 16-dimensional observables.
pub fn full_model_evaluation(inst: &HardyInstance) -> Result<HardyEvaluation> {
    let (p0, p1) = (make_phi0(), make_phi1());
    let basis = [
        tensor(&p0, &p0)?,
        tensor(&p0, &p1)?,
        tensor(&p1, &p0)?,
        tensor(&p1, &p1)?,
    ];
    let amps: Vec<C64> = (0..256)
        .map(|i| {
            basis
                .iter()
                .zip(&inst.coefficients)
                .fold(ZERO, |acc, (b, c)| acc + c * b.amplitude(i))
        })
        .collect();
    let state = QuantumState::new(8, amps)?;
    let f = Observable::f();
    let f_minus = &f.eigenpairs()[0].1;
    let f_plus = &f.eigenpairs()[1].1;
    let ga = Observable::in_singlet_plane(inst.alpha_a);
    let gb = Observable::in_singlet_plane(inst.alpha_b);
    let (ga_plus, gb_plus) = (&ga.eigenpairs()[1].1, &gb.eigenpairs()[1].1);
    let p = |a: &QuantumState, b: &QuantumState| product_amplitude(&state, a, b).norm_sqr();
    Ok(HardyEvaluation {
        probability: p(ga_plus, gb_plus),
        residuals: [p(f_plus, f_plus), p(f_minus, gb_plus), p(ga_plus, f_minus)],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    pub best: HardyInstance,
    pub evaluation: HardyEvaluation,
    pub starts: usize,
    pub converged_starts: usize,
    /// Largest gap between a converged start's value and the best value.
    pub start_spread: f64,
    /// Best value when the state coefficients are restricted to reals.
    pub best_real_probability: f64,
    /// Whether complex phases improve on real coefficients by more than 1e-12.
    pub phases_matter: bool,
}

/// Orthonormal basis of the complement of `constraints` in C⁴. The
/// constraint vectors are real, so the complement is spanned by real vectors.
fn feasible_basis(constraints: &[[f64; 4]]) -> Vec<[f64; 4]> {
    let mut ortho: Vec<[f64; 4]> = Vec::new();
    let push = |v: [f64; 4], ortho: &mut Vec<[f64; 4]>| -> bool {
        let mut w = v;
        for _ in 0..2 {
            for u in ortho.iter() {
                let d: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-9 {
            ortho.push(w.map(|a| a / n));
            true
        } else {
            false
        }
    };
    for c in constraints {
        push(*c, &mut ortho);
    }
    let rank = ortho.len();
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        push(e, &mut ortho);
    }
    ortho.split_off(rank)
}

/// Best feasible value at fixed angles: the squared norm of the target
/// projected onto the feasible subspace.
fn feasible_optimum(alpha_a: f64, alpha_b: f64) -> f64 {
    let t = target_vector(alpha_a, alpha_b);
    feasible_basis(&constraint_vectors(alpha_a, alpha_b))
        .iter()
        .map(|n| n.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>().powi(2))
        .sum()
}

struct AscentOutcome {
    z: Vec<C64>,
    value: f64,
    converged: bool,
}

/// Projected gradient ascent of `|⟨w|z⟩|²` on the unit sphere of C^d.
fn ascend(w: &[f64], mut z: Vec<C64>, max_iter: usize) -> AscentOutcome {
    let normalize = |z: &mut Vec<C64>| {
        let n = z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        z.iter_mut().for_each(|a| *a /= n);
    };
    normalize(&mut z);
    let value = |z: &[C64]| w.iter().zip(z).map(|(a, b)| b * *a).sum::<C64>().norm_sqr();
    let mut current = value(&z);
    for _ in 0..max_iter {
        let g: C64 = w.iter().zip(&z).map(|(a, b)| b * *a).sum();
        let mut next: Vec<C64> = z.iter().zip(w).map(|(zi, wi)| zi + g * *wi).collect();
        normalize(&mut next);
        let v = value(&next);
        let step = next.iter().zip(&z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        z = next;
        current = v;
        if step < 1e-15 {
            return AscentOutcome {
                z,
                value: current,
                converged: true,
            };
        }
    }
    AscentOutcome {
        z,
        value: current,
        converged: false,
    }
}

/// Maximizes the coincidence probability over feasible state coefficients at
/// fixed angles, from `cfg.starts` random starting states.
fn optimize_state(alpha_a: f64, alpha_b: f64, cfg: &OptimizerConfig, stream: u64) -> Result<OptimumReport> {
    let basis = feasible_basis(&constraint_vectors(alpha_a, alpha_b));
    let t = target_vector(alpha_a, alpha_b);
    let w: Vec<f64> = basis
        .iter()
        .map(|n| n.iter().zip(&t).map(|(a, b)| a * b).sum())
        .collect();
    let d = basis.len();
    let embed = |z: &[C64]| -> [C64; 4] {
        std::array::from_fn(|k| basis.iter().zip(z).fold(ZERO, |acc, (n, zi)| acc + zi * n[k]))
    };

    let mut best: Option<AscentOutcome> = None;
    let mut best_real = 0.0f64;
    let mut values = Vec::new();
    let mut converged_starts = 0;
    for k in 0..cfg.starts.max(1) {
        let mut rng = stream_rng(cfg.seed, child_stream(stream, k as u64));
        let z0: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let real0: Vec<C64> = z0.iter().map(|c| re(c.re)).collect();
        let run = ascend(&w, z0, cfg.max_iter);
        let run_real = ascend(&w, real0, cfg.max_iter);
        best_real = best_real.max(run_real.value);
        if run.converged {
            converged_starts += 1;
            values.push(run.value);
        }
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    if converged_starts == 0 {
        return Err(Error::NonConvergence {
            iterations: cfg.max_iter,
            best: best.value,
        });
    }
    // fix the global phase so the largest coefficient is real and positive
    let mut c = embed(&best.z);
    if let Some(big) = c.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        let phase = big.conj() / big.norm();
        c.iter_mut().for_each(|x| *x *= phase);
    }
    let inst = HardyInstance {
        coefficients: c,
        alpha_a,
        alpha_b,
    };
    let evaluation = hardy_probability(&inst)?;
    let start_spread = values.iter().map(|v| evaluation.probability - v).fold(0.0, f64::max);
    Ok(OptimumReport {
        best: inst,
        evaluation,
        starts: cfg.starts.max(1),
        converged_starts,
        start_spread,
        best_real_probability: best_real,
        phases_matter: evaluation.probability - best_real > 1e-12,
    })
}

/// Maximizes `P(G_A=+1, G_B=+1)` over the state subject to the three
/// vanishing conditions, with both wings' second observable at angle `alpha`.
/// The conditions are imposed by restricting the search to their orthogonal
/// complement, so they hold to rounding error.
pub fn optimize_constrained(alpha: f64, cfg: &OptimizerConfig) -> Result<OptimumReport> {
    optimize_state(alpha, alpha, cfg, named_stream("hardy-constrained"))
}

/// Maximizes over the state and both angles. Angles are searched with
/// multi-start Nelder–Mead on `[0, π)²`; `pinned` fixes them instead.
pub fn optimize_unconstrained_measurements(cfg: &OptimizerConfig, pinned: Option<(f64, f64)>) -> Result<OptimumReport> {
    let stream = named_stream("hardy-free-angles");
    let (alpha_a, alpha_b) = match pinned {
        Some(angles) => angles,
        None => {
            let nm = NelderMead {
                max_iter: cfg.max_iter,
                xtol: 1e-12,
                ftol: 1e-16,
                initial_step: 0.2,
            };
            let mut best: Option<(f64, f64, f64)> = None;
            let mut converged = 0;
            for k in 0..cfg.starts.max(1) {
                let mut rng = stream_rng(cfg.seed, child_stream(stream, k as u64));
                let x0 = [rng.gen_range(0.0..PI), rng.gen_range(0.0..PI)];
                let m = nm.minimize(|x| -feasible_optimum(x[0], x[1]), &x0);
                if m.converged {
                    converged += 1;
                }
                if best.is_none_or(|(v, _, _)| -m.value > v) {
                    best = Some((-m.value, m.x[0], m.x[1]));
                }
            }
            let (v, a, b) = best.expect("at least one start");
            if converged == 0 {
                return Err(Error::NonConvergence {
                    iterations: cfg.max_iter,
                    best: v,
                });
            }
            (a.rem_euclid(PI), b.rem_euclid(PI))
        }
    };
    optimize_state(alpha_a, alpha_b, cfg, child_stream(stream, u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    fn real4(v: [f64; 4]) -> [C64; 4] {
        v.map(re)
    }

    #[test]
    fn published_instance() {
        let s = 3f64.sqrt();
        let n = 7f64.sqrt();
        let inst = HardyInstance {
            coefficients: real4([1.0 / n, s / n, s / n, 0.0]),
            alpha_a: FRAC_PI_3,
            alpha_b: FRAC_PI_3,
        };
        let e = hardy_probability(&inst).unwrap();
        assert!((e.probability - 9.0 / 112.0).abs() < 1e-15);
        assert!(e.max_residual() < 1e-30);
    }

    #[test]
    fn phi0_phi0_instance() {
        for alpha in [0.0, 0.3, 1.1, 2.5] {
            let inst = HardyInstance {
                coefficients: real4([1.0, 0.0, 0.0, 0.0]),
                alpha_a: alpha,
                alpha_b: alpha,
            };
            let e = hardy_probability(&inst).unwrap();
            let s2 = alpha.sin().powi(2);
            assert!((e.probability - s2 * s2).abs() < 1e-15);
            assert!(e.residuals[0].abs() < 1e-30);
            assert!((e.residuals[1] - s2).abs() < 1e-15);
            assert!((e.residuals[2] - s2).abs() < 1e-15);
        }
    }

    #[test]
    fn phi1_phi1_violates_first_condition() {
        let inst = HardyInstance {
            coefficients: real4([0.0, 0.0, 0.0, 1.0]),
            alpha_a: FRAC_PI_3,
            alpha_b: FRAC_PI_3,
        };
        assert!((hardy_probability(&inst).unwrap().residuals[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_coefficients_are_rejected() {
        let inst = HardyInstance {
            coefficients: real4([1.0, 1.0, 0.0, 0.0]),
            alpha_a: 0.0,
            alpha_b: 0.0,
        };
        assert!(hardy_probability(&inst).is_err());
    }

    #[test]
    fn feasible_subspace_is_one_dimensional_for_generic_angles() {
        assert_eq!(feasible_basis(&constraint_vectors(0.7, 1.9)).len(), 1);
        assert!((feasible_optimum(FRAC_PI_3, FRAC_PI_3) - 9.0 / 112.0).abs() < 1e-15);
    }

    #[test]
    fn golden_constant() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((g.powi(5) - GOLDEN_HARDY_PROBABILITY).abs() < 1e-15);
        assert!(((5.0 * 5f64.sqrt() - 11.0) / 2.0 - GOLDEN_HARDY_PROBABILITY).abs() < 1e-15);
    }
}
