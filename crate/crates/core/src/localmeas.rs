//! Realizing F and G with one spin measurement per qubit.
//!
//! F is measured by reading qubits 1 and 2 along one direction and qubits 3
//! and 4 along a perpendicular one (σz σz σx σx); G pairs qubits (1, 3) and
//! (2, 4) instead. The 16 outcome words split 4/12 between the two
//! eigenstates, so the observable's value is a function of the word.
//!
//! Single-qubit bases live in the x–z plane: `|0_θ⟩ = cos θ|0⟩ + sin θ|1⟩`,
//! `|1_θ⟩ = sin θ|0⟩ − cos θ|1⟩`. θ = 0 reads σz and θ = π/4 reads σx with
//! `|0̄⟩ = (|0⟩+|1⟩)/√2`, `|1̄⟩ = (|0⟩−|1⟩)/√2`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::correlations::{ObservableKind, Outcome};
use crate::dfs_states::make_eta;
use crate::error::{argument, Result};
use crate::qcore::{apply_single_qubit, haar_su2, mat2_mul, re, Mat2, QuantumState, Unitary2};
use crate::seeding::{child_stream, named_stream, stream_rng, StreamRng};

/// Measurement protocol realizing F or G.
pub type Protocol = ObservableKind;

/// Rows are `⟨0_θ|` and `⟨1_θ|` (the basis is real).
pub fn qubit_basis(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[re(c), re(s)], [re(s), re(-c)]]
}

/// Per-qubit measurement angles of a fixed product basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBasisSpec {
    pub thetas: [f64; 4],
}

impl ProductBasisSpec {
    pub fn new(thetas: [f64; 4]) -> Self {
        Self { thetas }
    }

    /// σz σz σx σx for F, σz σx σz σx for G.
    pub fn for_protocol(p: Protocol) -> Self {
        match p {
            Protocol::F => Self::new([0.0, 0.0, FRAC_PI_4, FRAC_PI_4]),
            Protocol::G => Self::new([0.0, FRAC_PI_4, 0.0, FRAC_PI_4]),
        }
    }

    /// Matrices mapping a state to its components in the basis rotated by
    /// `U⊗4`: `B_θ U†` for each qubit.
    pub fn component_maps(&self, rotation: &Unitary2) -> [Mat2; 4] {
        let ud = *rotation.adjoint().entries();
        self.thetas.map(|t| mat2_mul(&qubit_basis(t), &ud))
    }
}

/// Four single-qubit results; bit 3 is qubit 1. A 0 bit means `|0_θ⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutcomeWord(pub u8);

impl OutcomeWord {
    pub fn all() -> impl Iterator<Item = OutcomeWord> {
        (0..16).map(OutcomeWord)
    }

    pub fn bit(self, qubit: usize) -> u8 {
        (self.0 >> (4 - qubit)) & 1
    }

    /// Word from four bits in qubit order.
    pub fn from_bits(bits: [u8; 4]) -> Self {
        Self(bits.iter().fold(0, |acc, b| (acc << 1) | (b & 1)))
    }
}

impl fmt::Display for OutcomeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

/// Observable value carried by an outcome word: −1 iff the two
/// same-direction pairs each disagree.
pub fn classify_outcome(word: OutcomeWord, protocol: Protocol) -> Outcome {
    let (a, b, c, d) = match protocol {
        Protocol::F => (1, 2, 3, 4),
        Protocol::G => (1, 3, 2, 4),
    };
    if word.bit(a) != word.bit(b) && word.bit(c) != word.bit(d) {
        Outcome::Minus
    } else {
        Outcome::Plus
    }
}

/// Exact probability of each of the 16 words for a four-qubit state measured
/// in the protocol's basis rotated by `U⊗4`.
pub fn word_distribution(state: &QuantumState, protocol: Protocol, rotation: &Unitary2) -> Result<[f64; 16]> {
    if state.n_qubits() != 4 {
        return Err(argument("wing measurement needs a 4-qubit state"));
    }
    let maps = ProductBasisSpec::for_protocol(protocol).component_maps(rotation);
    let mut amps = state.amplitudes().to_vec();
    for (q, m) in maps.iter().enumerate() {
        apply_single_qubit(&mut amps, 4, q + 1, m);
    }
    Ok(std::array::from_fn(|w| amps[w].norm_sqr()))
}

/// Distribution of the classified outcome (−1, +1).
pub fn induced_distribution(state: &QuantumState, protocol: Protocol, rotation: &Unitary2) -> Result<[f64; 2]> {
    let dist = word_distribution(state, protocol, rotation)?;
    let mut out = [0.0; 2];
    for w in OutcomeWord::all() {
        match classify_outcome(w, protocol) {
            Outcome::Minus => out[0] += dist[w.0 as usize],
            _ => out[1] += dist[w.0 as usize],
        }
    }
    Ok(out)
}

/// Draws one outcome word for a four-qubit state.
pub fn sample_wing<R: Rng + ?Sized>(
    state: &QuantumState,
    protocol: Protocol,
    rotation: &Unitary2,
    rng: &mut R,
) -> Result<OutcomeWord> {
    let dist = word_distribution(state, protocol, rotation)?;
    Ok(OutcomeWord(sample_index(&dist, rng) as u8))
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            last = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last
}

/// Joint probabilities of the 256 word pairs `(alice << 4) | bob` on an
/// eight-qubit state.
pub fn joint_word_distribution(
    state: &QuantumState,
    alice: (Protocol, &Unitary2),
    bob: (Protocol, &Unitary2),
) -> Result<Vec<f64>> {
    if state.n_qubits() != 8 {
        return Err(argument("joint sampling needs an 8-qubit state"));
    }
    let ma = ProductBasisSpec::for_protocol(alice.0).component_maps(alice.1);
    let mb = ProductBasisSpec::for_protocol(bob.0).component_maps(bob.1);
    let mut amps = state.amplitudes().to_vec();
    for (q, m) in ma.iter().chain(mb.iter()).enumerate() {
        apply_single_qubit(&mut amps, 8, q + 1, m);
    }
    Ok(amps.iter().map(|a| a.norm_sqr()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingsPolicy {
    /// Each wing picks F or G uniformly and independently every round.
    Random,
    Fixed {
        alice: Protocol,
        bob: Protocol,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationsPolicy {
    Identity,
    /// Independent Haar rotation of each wing's setup, redrawn every round.
    FreshRandomPerRound,
}

/// Rounds simulated per random stream; block `k` uses child stream `k`.
pub const ROUNDS_PER_BLOCK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub minus_minus: u64,
    pub minus_plus: u64,
    pub plus_minus: u64,
    pub plus_plus: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.minus_minus + self.minus_plus + self.plus_minus + self.plus_plus
    }

    fn add(&mut self, alice: Outcome, bob: Outcome) {
        match (alice, bob) {
            (Outcome::Minus, Outcome::Minus) => self.minus_minus += 1,
            (Outcome::Minus, _) => self.minus_plus += 1,
            (_, Outcome::Minus) => self.plus_minus += 1,
            _ => self.plus_plus += 1,
        }
    }

    fn merge(&mut self, other: &OutcomeCounts) {
        self.minus_minus += other.minus_minus;
        self.minus_plus += other.minus_plus;
        self.plus_minus += other.plus_minus;
        self.plus_plus += other.plus_plus;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingPairTally {
    pub alice: Protocol,
    pub bob: Protocol,
    pub counts: OutcomeCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub rounds: u64,
    pub seed: u64,
    pub settings_policy: SettingsPolicy,
    pub rotations_policy: RotationsPolicy,
    pub rounds_per_block: u64,
    /// Order: (F,F), (F,G), (G,F), (G,G).
    pub tallies: [SettingPairTally; 4],
}

const PAIRS: [(Protocol, Protocol); 4] = [
    (Protocol::F, Protocol::F),
    (Protocol::F, Protocol::G),
    (Protocol::G, Protocol::F),
    (Protocol::G, Protocol::G),
];

fn pair_index(alice: Protocol, bob: Protocol) -> usize {
    PAIRS.iter().position(|&p| p == (alice, bob)).unwrap()
}

impl ExperimentRecord {
    pub fn tally(&self, alice: Protocol, bob: Protocol) -> &OutcomeCounts {
        &self.tallies[pair_index(alice, bob)].counts
    }

    /// Fraction of (G,G) rounds with both outcomes +1, and its standard error
    /// under the expected probability 9/112.
    pub fn gg_both_plus(&self) -> Option<(f64, f64)> {
        let t = self.tally(Protocol::G, Protocol::G);
        let n = t.total();
        (n > 0).then(|| {
            let p0 = crate::correlations::GG_PROBABILITY;
            (t.plus_plus as f64 / n as f64, (p0 * (1.0 - p0) / n as f64).sqrt())
        })
    }

    /// (F,F) rounds where both wings got +1.
    pub fn ff_both_plus(&self) -> u64 {
        self.tally(Protocol::F, Protocol::F).plus_plus
    }

    /// Rounds where Bob's G = +1 but Alice's F = −1.
    pub fn alice_conditional_counterexamples(&self) -> u64 {
        self.tally(Protocol::F, Protocol::G).minus_plus
    }

    /// Rounds where Alice's G = +1 but Bob's F = −1.
    pub fn bob_conditional_counterexamples(&self) -> u64 {
        self.tally(Protocol::G, Protocol::F).plus_minus
    }

    /// `P(F_A = +1 | G_B = +1)` estimated from (F,G) rounds.
    pub fn alice_conditional_frequency(&self) -> Option<f64> {
        let t = self.tally(Protocol::F, Protocol::G);
        let given = t.plus_plus + t.minus_plus;
        (given > 0).then(|| t.plus_plus as f64 / given as f64)
    }

    /// `P(F_B = +1 | G_A = +1)` estimated from (G,F) rounds.
    pub fn bob_conditional_frequency(&self) -> Option<f64> {
        let t = self.tally(Protocol::G, Protocol::F);
        let given = t.plus_plus + t.plus_minus;
        (given > 0).then(|| t.plus_plus as f64 / given as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub rounds: u64,
    pub settings: SettingsPolicy,
    pub rotations: RotationsPolicy,
    pub seed: u64,
}

/// Simulates `rounds` preparations of the source state, each measured on both
/// wings with single-qubit spin measurements and sampled jointly from the
/// 256-outcome Born distribution.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    if cfg.rounds == 0 {
        return Err(argument("an experiment needs at least one round"));
    }
    let eta = make_eta();
    let id = Unitary2::identity();
    let aligned: Vec<Vec<f64>> = PAIRS
        .iter()
        .map(|&(a, b)| joint_word_distribution(&eta, (a, &id), (b, &id)))
        .collect::<Result<_>>()?;
    let stream = named_stream("experiment");
    let mut totals = [OutcomeCounts::default(); 4];
    let blocks = cfg.rounds.div_ceil(ROUNDS_PER_BLOCK);
    for block in 0..blocks {
        let start = block * ROUNDS_PER_BLOCK;
        let len = ROUNDS_PER_BLOCK.min(cfg.rounds - start);
        let mut rng = stream_rng(cfg.seed, child_stream(stream, block));
        let counts = run_block(&eta, &aligned, cfg, len, &mut rng)?;
        for (t, c) in totals.iter_mut().zip(&counts) {
            t.merge(c);
        }
    }
    Ok(ExperimentRecord {
        rounds: cfg.rounds,
        seed: cfg.seed,
        settings_policy: cfg.settings,
        rotations_policy: cfg.rotations,
        rounds_per_block: ROUNDS_PER_BLOCK,
        tallies: std::array::from_fn(|k| SettingPairTally {
            alice: PAIRS[k].0,
            bob: PAIRS[k].1,
            counts: totals[k],
        }),
    })
}

fn run_block(
    eta: &QuantumState,
    aligned: &[Vec<f64>],
    cfg: &ExperimentConfig,
    rounds: u64,
    rng: &mut StreamRng,
) -> Result<[OutcomeCounts; 4]> {
    let mut counts = [OutcomeCounts::default(); 4];
    let pick = |rng: &mut StreamRng| if rng.gen::<bool>() { Protocol::G } else { Protocol::F };
    for _ in 0..rounds {
        let (pa, pb) = match cfg.settings {
            SettingsPolicy::Random => (pick(rng), pick(rng)),
            SettingsPolicy::Fixed { alice, bob } => (alice, bob),
        };
        let k = pair_index(pa, pb);
        let idx = match cfg.rotations {
            RotationsPolicy::Identity => sample_index(&aligned[k], rng),
            RotationsPolicy::FreshRandomPerRound => {
                let ua = haar_su2(rng);
                let ub = haar_su2(rng);
                let dist = joint_word_distribution(eta, (pa, &ua), (pb, &ub))?;
                sample_index(&dist, rng)
            }
        };
        let wa = OutcomeWord((idx >> 4) as u8);
        let wb = OutcomeWord((idx & 15) as u8);
        counts[k].add(classify_outcome(wa, pa), classify_outcome(wb, pb));
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs_states::{make_phi0, make_phi1};
    use approx::assert_abs_diff_eq;

    fn word(s: &str) -> OutcomeWord {
        OutcomeWord(u8::from_str_radix(s, 2).unwrap())
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_outcome(word("0101"), Protocol::F), Outcome::Minus);
        assert_eq!(classify_outcome(word("0000"), Protocol::F), Outcome::Plus);
        assert_eq!(classify_outcome(word("0011"), Protocol::F), Outcome::Plus);
        // G pairs (1,3) and (2,4)
        assert_eq!(classify_outcome(word("0011"), Protocol::G), Outcome::Minus);
        assert_eq!(classify_outcome(word("0101"), Protocol::G), Outcome::Plus);
    }

    #[test]
    fn classification_is_a_four_twelve_partition() {
        for p in [Protocol::F, Protocol::G] {
            let minus = OutcomeWord::all()
                .filter(|w| classify_outcome(*w, p) == Outcome::Minus)
                .count();
            assert_eq!(minus, 4);
        }
    }

    #[test]
    fn phi0_words_in_z_z_x_x_basis() {
        let d = word_distribution(&make_phi0(), Protocol::F, &Unitary2::identity()).unwrap();
        for w in OutcomeWord::all() {
            let expected = if classify_outcome(w, Protocol::F) == Outcome::Minus {
                0.25
            } else {
                0.0
            };
            assert_abs_diff_eq!(d[w.0 as usize], expected, epsilon = 1e-14);
        }
        let d = word_distribution(&make_phi1(), Protocol::F, &Unitary2::identity()).unwrap();
        for w in OutcomeWord::all() {
            let expected = if classify_outcome(w, Protocol::F) == Outcome::Plus {
                1.0 / 12.0
            } else {
                0.0
            };
            assert_abs_diff_eq!(d[w.0 as usize], expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_rounds_is_rejected() {
        let cfg = ExperimentConfig {
            rounds: 0,
            settings: SettingsPolicy::Random,
            rotations: RotationsPolicy::Identity,
            seed: 0,
        };
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn single_round_record() {
        let cfg = ExperimentConfig {
            rounds: 1,
            settings: SettingsPolicy::Random,
            rotations: RotationsPolicy::FreshRandomPerRound,
            seed: 9,
        };
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.tallies.iter().map(|t| t.counts.total()).sum::<u64>(), 1);
    }

    #[test]
    fn sample_index_skips_zero_weight_entries() {
        let mut rng = stream_rng(0, 0);
        for _ in 0..1000 {
            let i = sample_index(&[0.0, 0.5, 0.0, 0.5, 0.0], &mut rng);
            assert!(i == 1 || i == 3);
        }
    }
}
