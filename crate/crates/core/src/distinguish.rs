//! Which pairs of orthogonal singlet-subspace states can be told apart with
//! certainty by one fixed spin measurement per qubit.
//!
//! The pair is `|ψ⟩ = cos ω|φ0⟩ + sin ω|φ1⟩`, `|ψ⊥⟩ = sin ω|φ0⟩ − cos ω|φ1⟩`
//! and the measurement basis is a product of x–z plane bases with angles
//! `(θa, θb, θc, θd)`. A basis separates the pair iff, for every product basis
//! vector, at most one of the two states has a nonzero component there.
//!
//! Bases outside the x–z plane are not searched. The singlet states are
//! invariant under common rotations, which is taken as the justification, but
//! the toolkit records this as an assumption rather than checking it.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dfs_states::{make_phi0, make_phi1};
use crate::error::{argument, Result};
use crate::optim::LevenbergMarquardt;

/// Magnitude below which a component counts as zero.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Cosecant singularity threshold of [`omega_from_thetas`].
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Reported ω values closer than this are merged.
pub const OMEGA_MERGE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishInstance {
    pub omega: f64,
    pub thetas: [f64; 4],
}

impl DistinguishInstance {
    pub fn new(omega: f64, thetas: [f64; 4]) -> Self {
        Self { omega, thetas }
    }
}

fn real_amplitudes(s: &crate::qcore::QuantumState) -> [f64; 16] {
    std::array::from_fn(|i| s.amplitude(i).re)
}

fn singlet_amplitudes() -> ([f64; 16], [f64; 16]) {
    (real_amplitudes(&make_phi0()), real_amplitudes(&make_phi1()))
}

/// Applies the real basis map of angle `theta` to qubit `q` (1-based).
#[inline]
fn basis_map(v: &mut [f64; 16], q: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    let mask = 1 << (4 - q);
    for i in 0..16 {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (v[i], v[j]);
            v[i] = c * a + s * b;
            v[j] = s * a - c * b;
        }
    }
}

/// Components of a real four-qubit vector in the product basis; index bit 3
/// is qubit a and a 0 bit selects `|0_θ⟩`.
pub fn product_components(amps: &[f64; 16], thetas: &[f64; 4]) -> [f64; 16] {
    let mut v = *amps;
    for (q, t) in thetas.iter().enumerate() {
        basis_map(&mut v, q + 1, *t);
    }
    v
}

/// Components of `(|ψ⟩, |ψ⊥⟩)` for each of the 16 product basis vectors.
pub fn component_table(inst: &DistinguishInstance) -> [(f64, f64); 16] {
    let (p0, p1) = singlet_amplitudes();
    let a = product_components(&p0, &inst.thetas);
    let b = product_components(&p1, &inst.thetas);
    let (s, c) = inst.omega.sin_cos();
    std::array::from_fn(|j| (c * a[j] + s * b[j], s * a[j] - c * b[j]))
}

/// Sign relating component `15 − j` to component `j` of any singlet-subspace
/// state: `c[15 − j] = mirror_sign(j) · c[j]`, with `mirror_sign(j) =
/// (−1)^popcount(j)`. Flipping every bit maps `|0_θ⟩ → |1_θ⟩` and
/// `|1_θ⟩ → −|0_θ⟩`, i.e. applies `(iσy)⊗4` up to that sign, and the states
/// are invariant under `(iσy)⊗4`.
pub fn mirror_sign(j: usize) -> f64 {
    if j.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// True iff no basis vector carries weight from both states.
pub fn is_distinguishing(inst: &DistinguishInstance) -> bool {
    component_table(inst)
        .iter()
        .all(|(p, q)| p.abs() <= SUPPORT_TOL || q.abs() <= SUPPORT_TOL)
}

/// Number of vanishing components of `(|ψ⟩, |ψ⊥⟩)`.
pub fn zero_counts(inst: &DistinguishInstance) -> (usize, usize) {
    let t = component_table(inst);
    (
        t.iter().filter(|(p, _)| p.abs() <= SUPPORT_TOL).count(),
        t.iter().filter(|(_, q)| q.abs() <= SUPPORT_TOL).count(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OmegaCondition {
    /// `cot ω` required for the first component of `|ψ⟩` to vanish.
    Cot(f64),
    /// `θa = θb` or `θc = θd` (mod π): the cosecant diverges.
    Degenerate,
}

impl OmegaCondition {
    /// The ω in `(0, π)` with this cotangent.
    pub fn omega(&self) -> Option<f64> {
        match *self {
            OmegaCondition::Cot(c) => Some(1f64.atan2(c)),
            OmegaCondition::Degenerate => None,
        }
    }
}

/// `cot ω = csc(θa−θb) csc(θc−θd) [cos(θa+θb−θc−θd) − cos(θa−θb) cos(θc−θd)] / √3`.
pub fn omega_from_thetas(thetas: [f64; 4]) -> OmegaCondition {
    let [a, b, c, d] = thetas;
    let (s1, s2) = ((a - b).sin(), (c - d).sin());
    if s1.abs() < DEGENERACY_TOL || s2.abs() < DEGENERACY_TOL {
        return OmegaCondition::Degenerate;
    }
    let bracket = (a + b - c - d).cos() - (a - b).cos() * (c - d).cos();
    OmegaCondition::Cot(bracket / (3f64.sqrt() * s1 * s2))
}

/// Reduces an angle to `[0, π)`, folding values within `OMEGA_MERGE_TOL` of π
/// back to 0.
pub fn omega_mod_pi(omega: f64) -> f64 {
    let w = omega.rem_euclid(PI);
    if PI - w < OMEGA_MERGE_TOL {
        0.0
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Grid points per angle over `[0, π)`.
    pub resolution: usize,
    /// Step-size tolerance of the local refinement.
    pub refine_tol: f64,
    /// Optional closed range of reported ω values (after reduction mod π).
    pub omega_range: Option<(f64, f64)>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            resolution: 200,
            refine_tol: 1e-12,
            omega_range: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: DistinguishInstance,
    /// Vanishing components of `|ψ⟩` and `|ψ⊥⟩`.
    pub zeros: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Distinct ω in `[0, π)` admitting a separating product basis, ascending.
    pub omegas: Vec<f64>,
    /// One separating instance per reported ω.
    pub witnesses: Vec<Witness>,
    pub grid_points: usize,
    pub candidates_refined: usize,
}

/// Bins over ω mod π/2 in which the best grid point is kept for refinement.
const OMEGA_BINS: usize = 360;

/// Coarse loss above which a bin's best grid point is not refined.
const CANDIDATE_LOSS: f64 = 0.25;

/// Grid search plus local refinement for every ω whose pair is separated by
/// some x–z product basis.
///
/// A common x–z rotation shifts all four angles by the same amount without
/// changing any component, so `θa = 0` is fixed and the grid runs over
/// `(θb, θc, θd) ∈ [0, π)³`. For each grid point the components
/// `(a_j, b_j)` of `(|φ0⟩, |φ1⟩)` are combined as `z_j = a_j + i b_j`; the
/// basis separates the pair at angle ω iff every nonzero `z_j` points along
/// ω or ω + π/2, i.e. iff all `z_j⁴` are parallel. The loss
/// `Σ|z_j|⁴ − |Σ z_j⁴|` vanishes exactly there and `arg(Σ z_j⁴)/4` estimates ω.
pub fn scan_distinguishable_omegas(cfg: &ScanConfig) -> Result<ScanResult> {
    if cfg.resolution < 100 {
        return Err(argument("scan resolution must be at least 100 points per angle"));
    }
    let r = cfg.resolution;
    let (p0, p1) = singlet_amplitudes();
    let mut bins: Vec<Option<(f64, [f64; 4])>> = vec![None; OMEGA_BINS];
    let grid = |k: usize| k as f64 * PI / r as f64;
    // qubit a is fixed at θ = 0
    let (mut a0, mut a1) = (p0, p1);
    basis_map(&mut a0, 1, 0.0);
    basis_map(&mut a1, 1, 0.0);
    for ib in 0..r {
        let (mut b0, mut b1) = (a0, a1);
        basis_map(&mut b0, 2, grid(ib));
        basis_map(&mut b1, 2, grid(ib));
        for ic in 0..r {
            let (mut c0, mut c1) = (b0, b1);
            basis_map(&mut c0, 3, grid(ic));
            basis_map(&mut c1, 3, grid(ic));
            for id in 0..r {
                let (mut d0, mut d1) = (c0, c1);
                basis_map(&mut d0, 4, grid(id));
                basis_map(&mut d1, 4, grid(id));
                let (loss, omega) = quartic_loss(&d0, &d1);
                if loss > CANDIDATE_LOSS {
                    continue;
                }
                let bin = ((omega / FRAC_PI_2) * OMEGA_BINS as f64) as usize % OMEGA_BINS;
                if bins[bin].is_none_or(|(l, _)| loss < l) {
                    bins[bin] = Some((loss, [0.0, grid(ib), grid(ic), grid(id)]));
                }
            }
        }
    }

    let lm = LevenbergMarquardt {
        step_tol: cfg.refine_tol,
        ..Default::default()
    };
    let mut candidates_refined = 0;
    let mut found: Vec<Witness> = Vec::new();
    for (_, thetas) in bins.iter().flatten() {
        candidates_refined += 1;
        let (_, omega0) = {
            let a = product_components(&p0, thetas);
            let b = product_components(&p1, thetas);
            quartic_loss(&a, &b)
        };
        let x0 = [thetas[1], thetas[2], thetas[3], omega0];
        let sol = lm.solve(|x| pair_residuals(&[0.0, x[0], x[1], x[2]], x[3]), &x0);
        let thetas = [0.0, sol.x[0], sol.x[1], sol.x[2]];
        for omega in [sol.x[3], sol.x[3] + FRAC_PI_2] {
            let inst = DistinguishInstance::new(omega_mod_pi(omega), thetas);
            if is_distinguishing(&inst) {
                found.push(Witness {
                    instance: inst,
                    zeros: zero_counts(&inst),
                });
            }
        }
    }

    found.sort_by(|a, b| a.instance.omega.total_cmp(&b.instance.omega));
    let mut witnesses: Vec<Witness> = Vec::new();
    for w in found {
        if let Some((lo, hi)) = cfg.omega_range {
            if w.instance.omega < lo || w.instance.omega > hi {
                continue;
            }
        }
        match witnesses.last() {
            Some(prev) if (w.instance.omega - prev.instance.omega).abs() < OMEGA_MERGE_TOL => {}
            _ => witnesses.push(w),
        }
    }
    Ok(ScanResult {
        omegas: witnesses.iter().map(|w| w.instance.omega).collect(),
        witnesses,
        grid_points: r * r * r,
        candidates_refined,
    })
}

/// `(Σ|z|⁴ − |Σ z⁴|, arg(Σ z⁴)/4 ∈ [0, π/2))` for `z_j = a_j + i b_j`.
fn quartic_loss(a: &[f64; 16], b: &[f64; 16]) -> (f64, f64) {
    let (mut sr, mut si, mut q) = (0.0, 0.0, 0.0);
    for j in 0..16 {
        let (x, y) = (a[j], b[j]);
        // z² = (x² − y²) + 2ixy
        let (r2, i2) = (x * x - y * y, 2.0 * x * y);
        sr += r2 * r2 - i2 * i2;
        si += 2.0 * r2 * i2;
        let m = x * x + y * y;
        q += m * m;
    }
    let loss = (q - sr.hypot(si)).max(0.0);
    let omega = (si.atan2(sr) / 4.0).rem_euclid(FRAC_PI_2);
    (loss, omega)
}

/// `ψ_j ψ⊥_j` for every basis vector; all vanish iff the basis separates.
fn pair_residuals(thetas: &[f64; 4], omega: f64) -> Vec<f64> {
    component_table(&DistinguishInstance::new(omega, *thetas))
        .iter()
        .map(|(p, q)| p * q)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedOmegaSearch {
    pub omega: f64,
    /// Best basis found after refinement.
    pub best: DistinguishInstance,
    /// `‖(ψ_j ψ⊥_j)_j‖` at the best basis.
    pub residual: f64,
    pub distinguishing: bool,
}

/// Searches the same `(θb, θc, θd)` grid for a separating basis at a fixed ω,
/// refining the best `refine_top` grid points.
pub fn search_fixed_omega(omega: f64, resolution: usize, refine_top: usize) -> Result<FixedOmegaSearch> {
    if resolution < 100 {
        return Err(argument("scan resolution must be at least 100 points per angle"));
    }
    let r = resolution;
    let (p0, p1) = singlet_amplitudes();
    let (s, c) = omega.sin_cos();
    let psi: [f64; 16] = std::array::from_fn(|j| c * p0[j] + s * p1[j]);
    let perp: [f64; 16] = std::array::from_fn(|j| s * p0[j] - c * p1[j]);
    let grid = |k: usize| k as f64 * PI / r as f64;
    let mut best: Vec<(f64, [f64; 4])> = Vec::with_capacity(refine_top + 1);
    for ib in 0..r {
        let (mut b0, mut b1) = (psi, perp);
        basis_map(&mut b0, 1, 0.0);
        basis_map(&mut b1, 1, 0.0);
        basis_map(&mut b0, 2, grid(ib));
        basis_map(&mut b1, 2, grid(ib));
        for ic in 0..r {
            let (mut c0, mut c1) = (b0, b1);
            basis_map(&mut c0, 3, grid(ic));
            basis_map(&mut c1, 3, grid(ic));
            for id in 0..r {
                let (mut d0, mut d1) = (c0, c1);
                basis_map(&mut d0, 4, grid(id));
                basis_map(&mut d1, 4, grid(id));
                let loss: f64 = (0..16).map(|j| (d0[j] * d1[j]).powi(2)).sum();
                if best.len() < refine_top.max(1) || loss < best.last().unwrap().0 {
                    let pos = best.partition_point(|(l, _)| *l <= loss);
                    best.insert(pos, (loss, [0.0, grid(ib), grid(ic), grid(id)]));
                    best.truncate(refine_top.max(1));
                }
            }
        }
    }
    let lm = LevenbergMarquardt::default();
    let mut out: Option<FixedOmegaSearch> = None;
    for (_, thetas) in &best {
        let sol = lm.solve(|x| pair_residuals(&[0.0, x[0], x[1], x[2]], omega), &thetas[1..]);
        let inst = DistinguishInstance::new(omega, [0.0, sol.x[0], sol.x[1], sol.x[2]]);
        let cand = FixedOmegaSearch {
            omega,
            best: inst,
            residual: sol.value,
            distinguishing: is_distinguishing(&inst),
        };
        if out.is_none_or(|o| cand.residual < o.residual) {
            out = Some(cand);
        }
    }
    Ok(out.expect("at least one candidate"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    const F_BASIS: [f64; 4] = [0.0, 0.0, FRAC_PI_4, FRAC_PI_4];
    const G_BASIS: [f64; 4] = [0.0, FRAC_PI_4, 0.0, FRAC_PI_4];

    #[test]
    fn phi0_has_four_components_in_z_z_x_x() {
        let t = component_table(&DistinguishInstance::new(0.0, F_BASIS));
        assert_eq!(t.iter().filter(|(p, _)| p.abs() > SUPPORT_TOL).count(), 4);
        assert_eq!(t.iter().filter(|(_, q)| q.abs() > SUPPORT_TOL).count(), 12);
        let t = component_table(&DistinguishInstance::new(FRAC_PI_2, F_BASIS));
        assert_eq!(t.iter().filter(|(p, _)| p.abs() > SUPPORT_TOL).count(), 12);
    }

    #[test]
    fn known_separating_bases() {
        assert!(is_distinguishing(&DistinguishInstance::new(0.0, F_BASIS)));
        assert!(is_distinguishing(&DistinguishInstance::new(FRAC_PI_3, G_BASIS)));
        assert!(!is_distinguishing(&DistinguishInstance::new(FRAC_PI_3, F_BASIS)));
        assert!(!is_distinguishing(&DistinguishInstance::new(PI / 5.0, F_BASIS)));
    }

    #[test]
    fn degenerate_angles_are_flagged() {
        assert_eq!(omega_from_thetas([0.3, 0.3, 0.1, 0.9]), OmegaCondition::Degenerate);
        assert_eq!(omega_from_thetas([0.3, 0.9, 0.2, 0.2 + PI]), OmegaCondition::Degenerate);
    }

    #[test]
    fn cot_condition_zeroes_first_component() {
        let thetas = [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4];
        let cond = omega_from_thetas(thetas);
        let omega = cond.omega().unwrap();
        let t = component_table(&DistinguishInstance::new(omega, thetas));
        assert!(t[0].0.abs() < 1e-10);
        assert!(t[15].0.abs() < 1e-10);
    }

    #[test]
    fn mirror_relation_on_random_angles() {
        let thetas = [0.31, 1.7, 2.2, 0.05];
        let t = component_table(&DistinguishInstance::new(0.77, thetas));
        for j in 0..16 {
            assert!((t[15 - j].0 - mirror_sign(j) * t[j].0).abs() < 1e-14);
            assert!((t[15 - j].1 - mirror_sign(j) * t[j].1).abs() < 1e-14);
        }
    }

    #[test]
    fn quartic_loss_vanishes_on_separating_basis() {
        let (p0, p1) = singlet_amplitudes();
        let (l, w) = quartic_loss(&product_components(&p0, &G_BASIS), &product_components(&p1, &G_BASIS));
        assert!(l < 1e-14);
        assert!((w - (FRAC_PI_3 - FRAC_PI_2).rem_euclid(FRAC_PI_2)).abs() < 1e-12);
    }

    #[test]
    fn coarse_resolution_is_rejected() {
        let cfg = ScanConfig {
            resolution: 50,
            ..Default::default()
        };
        assert!(scan_distinguishable_omegas(&cfg).is_err());
    }

    #[test]
    fn omega_reduction() {
        assert_eq!(omega_mod_pi(PI - 1e-9), 0.0);
        assert!((omega_mod_pi(-FRAC_PI_3) - 2.0 * FRAC_PI_3).abs() < 1e-15);
    }
}
