//! Exact outcome probabilities for rotated F/G measurements on an
//! eight-qubit state.
//!
//! A rotated setting `R F` is the observable whose eigenvectors are
//! `(U⊗4)|v⟩` for the eigenvectors `|v⟩` of F. The null outcome (the state
//! has weight outside both eigenvectors) is carried through every table.

use serde::{Deserialize, Serialize};

use crate::dfs_states::{make_eta, Observable};
use crate::error::{argument, Error, Result};
use crate::qcore::{contract_wing, haar_su2, norm, QuantumState, Unitary2, Wing, C64, ZERO};
use crate::seeding::{child_stream, named_stream, stream_rng};

/// Value 9/112 of the both-G coincidence on the source state.
pub const GG_PROBABILITY: f64 = 9.0 / 112.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Minus,
    Plus,
    Null,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Minus, Outcome::Plus, Outcome::Null];

    fn index(self) -> usize {
        match self {
            Outcome::Minus => 0,
            Outcome::Plus => 1,
            Outcome::Null => 2,
        }
    }

    pub fn value(self) -> Option<i8> {
        match self {
            Outcome::Minus => Some(-1),
            Outcome::Plus => Some(1),
            Outcome::Null => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableKind {
    F,
    G,
}

impl ObservableKind {
    pub fn observable(self) -> Observable {
        match self {
            ObservableKind::F => Observable::f(),
            ObservableKind::G => Observable::g(),
        }
    }
}

/// A collective rotation applied to one wing's setup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalRotation {
    pub u: Unitary2,
    pub wing: Wing,
}

impl LocalRotation {
    pub fn rotate(&self, obs: &Observable) -> Observable {
        obs.rotated(&self.u)
    }
}

/// Which observable a wing measures and how its setup is rotated relative to
/// the source frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Setting {
    pub observable: ObservableKind,
    pub rotation: Unitary2,
}

impl Setting {
    pub fn new(observable: ObservableKind) -> Self {
        Self {
            observable,
            rotation: Unitary2::identity(),
        }
    }

    pub fn f() -> Self {
        Self::new(ObservableKind::F)
    }

    pub fn g() -> Self {
        Self::new(ObservableKind::G)
    }

    pub fn rotated(mut self, u: Unitary2) -> Self {
        self.rotation = u;
        self
    }

    /// Eigenvectors for outcomes (−1, +1) after rotation.
    fn eigenvectors(&self) -> [Vec<C64>; 2] {
        let obs = self.observable.observable().rotated(&self.rotation);
        let pairs = obs.eigenpairs();
        [pairs[0].1.amplitudes().to_vec(), pairs[1].1.amplitudes().to_vec()]
    }
}

/// One wing's measurement result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub wing: Wing,
    pub setting: Setting,
    pub outcome: Outcome,
}

impl Event {
    pub fn new(wing: Wing, setting: Setting, outcome: Outcome) -> Self {
        Self { wing, setting, outcome }
    }
}

/// Joint outcome table indexed `[alice][bob]` in the order (−1, +1, null).
pub type JointTable = [[f64; 3]; 3];

/// Full 3×3 joint distribution of Alice's and Bob's outcomes.
pub fn joint_table(state: &QuantumState, a: &Setting, b: &Setting) -> Result<JointTable> {
    if state.n_qubits() != 8 {
        return Err(argument("joint probabilities need an 8-qubit state"));
    }
    let amps = state.amplitudes();
    let va = a.eigenvectors();
    let vb = b.eigenvectors();
    let mut t = [[0.0; 3]; 3];
    let mut marg_a = [0.0; 2];
    let mut marg_b = [0.0; 2];
    for i in 0..2 {
        let rest = contract_wing(amps, 8, Wing::Alice, &va[i]);
        marg_a[i] = norm(&rest).powi(2);
        for j in 0..2 {
            let amp: C64 = vb[j].iter().zip(&rest).map(|(v, r)| v.conj() * r).sum();
            t[i][j] = amp.norm_sqr();
        }
    }
    for j in 0..2 {
        marg_b[j] = norm(&contract_wing(amps, 8, Wing::Bob, &vb[j])).powi(2);
    }
    for i in 0..2 {
        t[i][2] = (marg_a[i] - t[i][0] - t[i][1]).max(0.0);
        t[2][i] = (marg_b[i] - t[0][i] - t[1][i]).max(0.0);
    }
    let covered: f64 = t.iter().flatten().sum();
    t[2][2] = (1.0 - covered).max(0.0);
    Ok(t)
}

/// Born-rule probability that Alice (setting `a`) sees `outcome_a` and Bob
/// (setting `b`) sees `outcome_b`.
pub fn joint_probability(
    state: &QuantumState,
    a: &Setting,
    b: &Setting,
    outcome_a: Outcome,
    outcome_b: Outcome,
) -> Result<f64> {
    Ok(joint_table(state, a, b)?[outcome_a.index()][outcome_b.index()])
}

/// Marginal distribution (−1, +1, null) of one wing.
pub fn marginal(state: &QuantumState, wing: Wing, setting: &Setting) -> Result<[f64; 3]> {
    if state.n_qubits() != 8 || wing == Wing::All {
        return Err(argument("marginals need an 8-qubit state and a single wing"));
    }
    let v = setting.eigenvectors();
    let m0 = norm(&contract_wing(state.amplitudes(), 8, wing, &v[0])).powi(2);
    let m1 = norm(&contract_wing(state.amplitudes(), 8, wing, &v[1])).powi(2);
    Ok([m0, m1, (1.0 - m0 - m1).max(0.0)])
}

/// `P(target | given)` for events on opposite wings.
pub fn conditional_probability(state: &QuantumState, target: &Event, given: &Event) -> Result<f64> {
    let (alice, bob) = match (target.wing, given.wing) {
        (Wing::Alice, Wing::Bob) => (target, given),
        (Wing::Bob, Wing::Alice) => (given, target),
        _ => return Err(argument("conditional events must be on opposite wings")),
    };
    let table = joint_table(state, &alice.setting, &bob.setting)?;
    let joint = table[alice.outcome.index()][bob.outcome.index()];
    let p_given = match given.wing {
        Wing::Alice => table[given.outcome.index()].iter().sum::<f64>(),
        _ => table.iter().map(|row| row[given.outcome.index()]).sum::<f64>(),
    };
    if p_given < 1e-12 {
        return Err(Error::UndefinedConditional { probability: p_given });
    }
    Ok(joint / p_given)
}

/// The four quantities of the nonlocality argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyQuantities {
    /// `P(R_A F = 1, R_B F = 1)`
    pub ff_both_plus: f64,
    /// `P(R_A F = 1 | 𝓡_B G = 1)`
    pub alice_f_given_bob_g: f64,
    /// `P(R_B F = 1 | 𝓡_A G = 1)`
    pub bob_f_given_alice_g: f64,
    /// `P(𝓡_A G = 1, 𝓡_B G = 1)`
    pub gg_both_plus: f64,
}

impl HardyQuantities {
    pub const EXPECTED: HardyQuantities = HardyQuantities {
        ff_both_plus: 0.0,
        alice_f_given_bob_g: 1.0,
        bob_f_given_alice_g: 1.0,
        gg_both_plus: GG_PROBABILITY,
    };

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.ff_both_plus,
            self.alice_f_given_bob_g,
            self.bob_f_given_alice_g,
            self.gg_both_plus,
        ]
    }
}

/// Rotations `(R_A, 𝓡_A, R_B, 𝓡_B)` of the four setups.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SetupRotations {
    pub f_alice: Unitary2,
    pub g_alice: Unitary2,
    pub f_bob: Unitary2,
    pub g_bob: Unitary2,
}

impl SetupRotations {
    pub fn identity() -> Self {
        let id = Unitary2::identity();
        Self {
            f_alice: id,
            g_alice: id,
            f_bob: id,
            g_bob: id,
        }
    }
}

/// Evaluates the four quantities on `state` for the given setup rotations.
pub fn hardy_quantities(state: &QuantumState, rot: &SetupRotations) -> Result<HardyQuantities> {
    let fa = Setting::f().rotated(rot.f_alice);
    let ga = Setting::g().rotated(rot.g_alice);
    let fb = Setting::f().rotated(rot.f_bob);
    let gb = Setting::g().rotated(rot.g_bob);
    Ok(HardyQuantities {
        ff_both_plus: joint_probability(state, &fa, &fb, Outcome::Plus, Outcome::Plus)?,
        alice_f_given_bob_g: conditional_probability(
            state,
            &Event::new(Wing::Alice, fa, Outcome::Plus),
            &Event::new(Wing::Bob, gb, Outcome::Plus),
        )?,
        bob_f_given_alice_g: conditional_probability(
            state,
            &Event::new(Wing::Bob, fb, Outcome::Plus),
            &Event::new(Wing::Alice, ga, Outcome::Plus),
        )?,
        gg_both_plus: joint_probability(state, &ga, &gb, Outcome::Plus, Outcome::Plus)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSuiteReport {
    pub samples: usize,
    pub seed: u64,
    /// Values with every setup aligned to the source frame.
    pub identity: HardyQuantities,
    /// Largest |value − expected| over the identity row and every sample.
    pub max_deviation: [f64; 4],
    /// Sample standard deviation of each quantity across rotation tuples.
    pub std_dev: [f64; 4],
    /// Largest null-outcome probability seen in any wing.
    pub max_null: f64,
    /// Largest |Σ table − 1| seen.
    pub max_completeness_error: f64,
}

/// Recomputes the four quantities for `n_samples` independent Haar-random
/// tuples `(R_A, 𝓡_A, R_B, 𝓡_B)` on the source state.
pub fn verify_correlation_suite(n_samples: usize, seed: u64) -> Result<CorrelationSuiteReport> {
    let eta = make_eta();
    let expected = HardyQuantities::EXPECTED.as_array();
    let identity = hardy_quantities(&eta, &SetupRotations::identity())?;
    let mut max_deviation = [0.0f64; 4];
    let mut track = |q: &HardyQuantities| {
        for (k, v) in q.as_array().iter().enumerate() {
            max_deviation[k] = max_deviation[k].max((v - expected[k]).abs());
        }
    };
    track(&identity);

    let stream = named_stream("correlations");
    let mut max_null = 0.0f64;
    let mut max_completeness_error = 0.0f64;
    let mut values = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let mut rng = stream_rng(seed, child_stream(stream, k as u64));
        let rot = SetupRotations {
            f_alice: haar_su2(&mut rng),
            g_alice: haar_su2(&mut rng),
            f_bob: haar_su2(&mut rng),
            g_bob: haar_su2(&mut rng),
        };
        let q = hardy_quantities(&eta, &rot)?;
        track(&q);
        values.push(q.as_array());
        let fa = Setting::f().rotated(rot.f_alice);
        let ga = Setting::g().rotated(rot.g_alice);
        let fb = Setting::f().rotated(rot.f_bob);
        let gb = Setting::g().rotated(rot.g_bob);
        for (sa, sb) in [(fa, fb), (fa, gb), (ga, fb), (ga, gb)] {
            let t = joint_table(&eta, &sa, &sb)?;
            let total: f64 = t.iter().flatten().sum();
            max_completeness_error = max_completeness_error.max((total - 1.0).abs());
            let null = t[2].iter().sum::<f64>().max(t.iter().map(|r| r[2]).sum());
            max_null = max_null.max(null);
        }
    }
    let mut std_dev = [0.0; 4];
    if values.len() > 1 {
        for (k, sd) in std_dev.iter_mut().enumerate() {
            let mean = values.iter().map(|v| v[k]).sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v[k] - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
            *sd = var.sqrt();
        }
    }
    Ok(CorrelationSuiteReport {
        samples: n_samples,
        seed,
        identity,
        max_deviation,
        std_dev,
        max_null,
        max_completeness_error,
    })
}

/// `⟨v_A ⊗ v_B | s⟩` helper used by tests and the effective-model cross-check.
pub fn product_amplitude(state: &QuantumState, alice: &QuantumState, bob: &QuantumState) -> C64 {
    let rest = contract_wing(state.amplitudes(), 8, Wing::Alice, alice.amplitudes());
    bob.amplitudes()
        .iter()
        .zip(&rest)
        .fold(ZERO, |acc, (v, r)| acc + v.conj() * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs_states::{make_phi0, make_phi1};
    use crate::qcore::tensor;
    use approx::assert_abs_diff_eq;

    #[test]
    fn aligned_values_are_exact() {
        let q = hardy_quantities(&make_eta(), &SetupRotations::identity()).unwrap();
        assert_abs_diff_eq!(q.ff_both_plus, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.alice_f_given_bob_g, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.bob_f_given_alice_g, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.gg_both_plus, 9.0 / 112.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.gg_both_plus, 0.080_357_142_857_142_86, epsilon = 1e-15);
    }

    #[test]
    fn gg_conditional_is_one_quarter() {
        let eta = make_eta();
        let p = conditional_probability(
            &eta,
            &Event::new(Wing::Bob, Setting::g(), Outcome::Plus),
            &Event::new(Wing::Alice, Setting::g(), Outcome::Plus),
        )
        .unwrap();
        // (9/112) / (9/28)
        assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn null_outcome_never_occurs_on_eta() {
        let eta = make_eta();
        for a in [Setting::f(), Setting::g()] {
            for b in [Setting::f(), Setting::g()] {
                let t = joint_table(&eta, &a, &b).unwrap();
                for o in Outcome::ALL {
                    assert!(t[2][o.index()] < 1e-14);
                    assert!(t[o.index()][2] < 1e-14);
                }
            }
        }
    }

    #[test]
    fn alice_marginal_of_f_is_three_sevenths() {
        let m = marginal(&make_eta(), Wing::Alice, &Setting::f()).unwrap();
        assert_abs_diff_eq!(m[0], 4.0 / 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[1], 3.0 / 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[2], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn null_is_reported_outside_the_singlet_sector() {
        let p0 = make_phi0();
        let up = QuantumState::from_bits("0000").unwrap();
        let s = tensor(&up, &p0).unwrap();
        let t = joint_table(&s, &Setting::f(), &Setting::f()).unwrap();
        assert_abs_diff_eq!(t[2][0], 1.0, epsilon = 1e-14);
        let total: f64 = t.iter().flatten().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn conditioning_on_impossible_event_is_an_error() {
        let p1 = make_phi1();
        let s = tensor(&p1, &p1).unwrap();
        let r = conditional_probability(
            &s,
            &Event::new(Wing::Alice, Setting::f(), Outcome::Plus),
            &Event::new(Wing::Bob, Setting::f(), Outcome::Minus),
        );
        assert!(matches!(r, Err(Error::UndefinedConditional { .. })));
        let same_wing = conditional_probability(
            &s,
            &Event::new(Wing::Alice, Setting::f(), Outcome::Plus),
            &Event::new(Wing::Alice, Setting::g(), Outcome::Plus),
        );
        assert!(matches!(same_wing, Err(Error::Argument(_))));
    }

    #[test]
    fn rejects_four_qubit_state() {
        assert!(joint_table(&make_phi0(), &Setting::f(), &Setting::f()).is_err());
    }

    #[test]
    fn suite_with_zero_samples_checks_identity_only() {
        let r = verify_correlation_suite(0, 1).unwrap();
        assert_eq!(r.samples, 0);
        assert!(r.max_deviation.iter().all(|d| *d < 1e-12));
    }
}
