//! One function per verification suite, each producing a report section.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

use alignfree_core::correlations::{verify_correlation_suite, HardyQuantities, Outcome, GG_PROBABILITY};
use alignfree_core::decohere::{
    immunity_report, reduced_state_report, CollectiveChannel, ImmunityInput, Scope, IMMUNITY_THRESHOLD,
};
use alignfree_core::dfs_states::{make_eta, make_phi0, make_phi1};
use alignfree_core::distinguish::{scan_distinguishable_omegas, search_fixed_omega, ScanConfig};
use alignfree_core::hardy::{
    lhv_feasibility, optimize_constrained, optimize_unconstrained_measurements, ratio, verify_witness, Feasibility,
    LhvScenario, OptimizerConfig, GOLDEN_HARDY_PROBABILITY,
};
use alignfree_core::localmeas::{
    classify_outcome, run_experiment, sample_wing, word_distribution, ExperimentConfig, ExperimentRecord, OutcomeWord,
    Protocol, RotationsPolicy, SettingsPolicy,
};
use alignfree_core::qcore::{partial_trace, QuantumState, Unitary2, C64};
use alignfree_core::seeding::{named_stream, stream_rng};
use alignfree_core::Result;

use crate::report::{Check, Provenance, Section};

/// Tolerance for the exact correlation values on the unrotated setup.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for the same values under random setup rotations.
pub const ROTATED_TOL: f64 = 1e-9;

const CLAIMS: [(&str, &str); 4] = [
    ("ff-both-plus", "P(F_A=+1, F_B=+1) vanishes"),
    ("alice-f-given-bob-g", "P(F_A=+1 | G_B=+1) is one"),
    ("bob-f-given-alice-g", "P(F_B=+1 | G_A=+1) is one"),
    ("gg-both-plus", "P(G_A=+1, G_B=+1) is 9/112"),
];

/// Four correlation values on the source state, unrotated and under
/// `rotations` Haar-random setup tuples. `tol`, when given, overrides both
/// default tolerances.
pub fn correlations(rotations: usize, seed: u64, tol: Option<f64>) -> Result<Section> {
    let r = verify_correlation_suite(rotations, seed)?;
    let exact_tol = tol.unwrap_or(EXACT_TOL);
    let rot_tol = tol.unwrap_or(ROTATED_TOL);
    let expected = HardyQuantities::EXPECTED.as_array();
    let identity = r.identity.as_array();
    let mut s = Section::new("correlations");
    for (k, (id, anchor)) in CLAIMS.iter().enumerate() {
        s.push(Check::within(
            id,
            anchor,
            identity[k],
            expected[k],
            exact_tol,
            Provenance::Published,
        ));
    }
    if rotations > 0 {
        for (k, (id, anchor)) in CLAIMS.iter().enumerate() {
            s.push(Check::within(
                &format!("{id}-rotated-max-deviation"),
                &format!("{anchor} for any setup rotations"),
                r.max_deviation[k],
                0.0,
                rot_tol,
                Provenance::Published,
            ));
        }
        s.push(Check::within(
            "null-outcome-probability",
            "rotated setups never give the null outcome",
            r.max_null,
            0.0,
            rot_tol,
            Provenance::Definitional,
        ));
        s.push(Check::within(
            "joint-table-completeness",
            "joint outcome probabilities sum to one",
            r.max_completeness_error,
            0.0,
            rot_tol,
            Provenance::Definitional,
        ));
    }
    Ok(s)
}

fn policy_name(rotate: bool) -> &'static str {
    if rotate {
        "fresh Haar rotation of every setup in every round"
    } else {
        "setups aligned with the source frame"
    }
}

/// Simulated rounds with random settings on both wings.
pub fn experiment(rounds: u64, seed: u64, rotate_each_round: bool) -> Result<(Section, ExperimentRecord)> {
    let rec = run_experiment(&ExperimentConfig {
        rounds,
        settings: SettingsPolicy::Random,
        rotations: if rotate_each_round {
            RotationsPolicy::FreshRandomPerRound
        } else {
            RotationsPolicy::Identity
        },
        seed,
    })?;
    let mut s = Section::new("experiment");
    if let Some((freq, se)) = rec.gg_both_plus() {
        s.push(Check::within(
            "gg-both-plus-frequency",
            "frequency of (G_A, G_B) = (+1, +1) within five standard errors of 9/112",
            freq,
            GG_PROBABILITY,
            5.0 * se,
            Provenance::Published,
        ));
    }
    s.push(Check::exact(
        "ff-both-plus-count",
        "no (F_A, F_B) = (+1, +1) coincidence",
        rec.ff_both_plus(),
        0,
        Provenance::Published,
    ));
    s.push(Check::exact(
        "alice-conditional-counterexamples",
        "G_B = +1 always comes with F_A = +1",
        rec.alice_conditional_counterexamples(),
        0,
        Provenance::Published,
    ));
    s.push(Check::exact(
        "bob-conditional-counterexamples",
        "G_A = +1 always comes with F_B = +1",
        rec.bob_conditional_counterexamples(),
        0,
        Provenance::Published,
    ));
    s.notes
        .push(format!("rounds: {}; {}", rec.rounds, policy_name(rotate_each_round)));
    for t in &rec.tallies {
        let c = &t.counts;
        s.notes.push(format!(
            "({:?},{:?}): --={} -+={} +-={} ++={}",
            t.alice, t.bob, c.minus_minus, c.minus_plus, c.plus_minus, c.plus_plus
        ));
    }
    Ok((s, rec))
}

fn word_label(w: usize) -> String {
    OutcomeWord(w as u8).to_string()
}

/// Outcome words of the first protocol on `|φ0⟩` and `|φ1⟩`: exact
/// probabilities and a sampled check.
pub fn protocol_split(shots: usize, seed: u64) -> Result<Section> {
    let mut s = Section::new("protocol-split");
    let id = Unitary2::identity();
    let mut rng = stream_rng(seed, named_stream("protocol-split"));
    let cases = [
        (
            "phi0",
            make_phi0(),
            Outcome::Minus,
            0.25,
            vec!["0101", "0110", "1001", "1010"],
        ),
        (
            "phi1",
            make_phi1(),
            Outcome::Plus,
            1.0 / 12.0,
            vec![
                "0000", "0001", "0010", "0011", "0100", "0111", "1000", "1011", "1100", "1101", "1110", "1111",
            ],
        ),
    ];
    for (name, state, eigenvalue, p, expected_words) in cases {
        let dist = word_distribution(&state, Protocol::F, &id)?;
        let support: Vec<String> = (0..16).filter(|&w| dist[w] > 1e-12).map(word_label).collect();
        let expected_words: Vec<String> = expected_words.into_iter().map(String::from).collect();
        s.push(Check::exact(
            &format!("{name}-f-support"),
            "outcome words with nonzero probability",
            support,
            expected_words.clone(),
            Provenance::Published,
        ));
        let max_dev = (0..16)
            .filter(|&w| dist[w] > 1e-12)
            .map(|w| (dist[w] - p).abs())
            .fold(0.0, f64::max);
        s.push(Check::within(
            &format!("{name}-f-word-probability"),
            "each supported word is equally likely",
            max_dev,
            0.0,
            EXACT_TOL,
            Provenance::Published,
        ));
        let mut counts = [0u64; 16];
        let mut misclassified = 0u64;
        for _ in 0..shots {
            let w = sample_wing(&state, Protocol::F, &id, &mut rng)?;
            counts[w.0 as usize] += 1;
            if classify_outcome(w, Protocol::F) != eigenvalue {
                misclassified += 1;
            }
        }
        if shots > 0 {
            let sd = (p * (1.0 - p) / shots as f64).sqrt();
            let max_z = (0..16)
                .filter(|&w| dist[w] > 1e-12)
                .map(|w| (counts[w] as f64 / shots as f64 - p).abs() / sd)
                .fold(0.0, f64::max);
            s.push(Check::below(
                &format!("{name}-f-sampled-max-z"),
                "sampled word frequencies within five standard errors",
                max_z,
                5.0,
                Provenance::Published,
            ));
            s.push(Check::exact(
                &format!("{name}-f-misclassified"),
                "every sampled word yields the state's eigenvalue",
                misclassified,
                0,
                Provenance::Published,
            ));
        }
    }
    Ok(s)
}

fn ghz4() -> QuantumState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    amps[0] = C64::new(h, 0.0);
    amps[15] = C64::new(h, 0.0);
    QuantumState::new(4, amps).expect("normalized")
}

/// Spectrum of the reduced state and immunity under collective unitaries.
pub fn decoherence(samples: usize, seed: u64) -> Result<Section> {
    let mut s = Section::new("decoherence");
    let r = reduced_state_report()?;
    for (k, sign) in ["plus", "minus"].iter().enumerate() {
        s.push(Check::within(
            &format!("reduced-eigenvalue-{sign}"),
            "reduced state eigenvalue (7 ± √13)/14",
            r.eigenvalues[k],
            r.expected_eigenvalues[k],
            1e-10,
            Provenance::Published,
        ));
        s.push(Check::below(
            &format!("reduced-eigenvector-{sign}"),
            "eigenvector equals χ± up to phase",
            r.eigenvector_distance[k],
            1e-8,
            Provenance::Published,
        ));
    }
    s.push(Check::below(
        "reduced-state-reconstruction",
        "reduced state equals the χ± mixture",
        r.reconstruction_error,
        1e-10,
        Provenance::Published,
    ));

    let global = CollectiveChannel {
        n_samples: samples,
        scope: Scope::Global,
    };
    let per_wing = CollectiveChannel {
        n_samples: samples,
        scope: Scope::PerWing,
    };
    let rho = partial_trace(&make_eta(), &[1, 2, 3, 4])?;
    let (phi0, phi1, eta) = (make_phi0(), make_phi1(), make_eta());
    let immune_cases: [(&str, ImmunityInput<'_>, &CollectiveChannel); 4] = [
        ("phi0", ImmunityInput::Pure(&phi0), &global),
        ("phi1", ImmunityInput::Pure(&phi1), &global),
        ("rho", ImmunityInput::Mixed(&rho), &global),
        ("eta-per-wing", ImmunityInput::Pure(&eta), &per_wing),
    ];
    for (name, input, ch) in immune_cases {
        let rep = immunity_report(input, ch, seed)?;
        s.push(Check::above(
            &format!("immunity-{name}"),
            "minimum fidelity under collective unitaries",
            rep.min_fidelity,
            IMMUNITY_THRESHOLD,
            Provenance::Published,
        ));
    }

    let basis = QuantumState::from_bits("0101")?;
    let rep = immunity_report(ImmunityInput::Pure(&basis), &global, seed)?;
    s.push(Check::below(
        "fragile-0101-min-fidelity",
        "a computational basis state is not immune",
        rep.min_fidelity,
        0.99,
        Provenance::Oracle,
    ));
    // fidelity is |U00|⁸ with |U00|² uniform: mean 1/5, standard deviation 4/15
    s.push(Check::within(
        "fragile-0101-mean-fidelity",
        "mean fidelity of |0101⟩ within five standard errors of 1/5",
        rep.mean_fidelity,
        0.2,
        5.0 * (4.0 / 15.0) / (samples as f64).sqrt(),
        Provenance::Oracle,
    ));
    let ghz = ghz4();
    let rep = immunity_report(ImmunityInput::Pure(&ghz), &global, seed)?;
    s.push(Check::below(
        "fragile-ghz-min-fidelity",
        "a four-qubit GHZ state is not immune",
        rep.min_fidelity,
        0.99,
        Provenance::Oracle,
    ));
    Ok(s)
}

/// Which singlet-plane pairs a fixed x–z product basis can tell apart.
pub fn distinguish(grid: usize, refine_tol: f64) -> Result<(Section, usize)> {
    let res = scan_distinguishable_omegas(&ScanConfig {
        resolution: grid,
        refine_tol,
        omega_range: None,
    })?;
    let mut s = Section::new("distinguish");
    s.push(Check::exact(
        "distinguishable-omega-count",
        "separable pairs occur at the six multiples of π/6",
        res.omegas.len(),
        6,
        Provenance::Published,
    ));
    for (n, w) in res.omegas.iter().enumerate() {
        s.push(Check::within(
            &format!("distinguishable-omega-{n}"),
            "separable pair angle",
            *w,
            n as f64 * PI / 6.0,
            1e-3,
            Provenance::Published,
        ));
    }
    for (label, omega) in [("pi-over-5", PI / 5.0), ("pi-over-4", FRAC_PI_4)] {
        let r = search_fixed_omega(omega, grid, 32)?;
        s.push(Check::exact(
            &format!("no-basis-at-{label}"),
            "no separating product basis off the π/6 lattice",
            r.distinguishing,
            false,
            Provenance::Published,
        ));
    }
    for w in &res.witnesses {
        let t = w.instance.thetas;
        s.notes.push(format!(
            "ω={:.9} θ=({:.6}, {:.6}, {:.6}, {:.6}) zeros={}/{}",
            w.instance.omega, t[0], t[1], t[2], t[3], w.zeros.0, w.zeros.1
        ));
    }
    Ok((s, res.grid_points))
}

/// Optimal coincidence probability under the three vanishing conditions.
pub fn hardy(free_angles: bool, starts: usize, seed: u64) -> Result<Section> {
    let cfg = OptimizerConfig {
        starts,
        seed,
        ..OptimizerConfig::default()
    };
    let mut s = Section::new("hardy");
    let r = optimize_constrained(FRAC_PI_3, &cfg)?;
    s.push(Check::within(
        "constrained-optimum",
        "largest P(G_A=+1, G_B=+1) with observables F and G is 9/112",
        r.evaluation.probability,
        GG_PROBABILITY,
        1e-9,
        Provenance::Published,
    ));
    s.push(Check::below(
        "constrained-optimum-residual",
        "the three vanishing conditions hold at the optimum",
        r.evaluation.max_residual(),
        1e-12,
        Provenance::Definitional,
    ));
    let n = 7f64.sqrt();
    let source = [1.0 / n, 3f64.sqrt() / n, 3f64.sqrt() / n, 0.0];
    let overlap: C64 = r.best.coefficients.iter().zip(source).map(|(c, t)| c.conj() * t).sum();
    s.push(Check::within(
        "constrained-optimizer-state",
        "the optimal state is the source state up to phase",
        overlap.norm(),
        1.0,
        1e-6,
        Provenance::Published,
    ));
    s.push(Check::exact(
        "constrained-converged-starts",
        "every multi-start converged",
        r.converged_starts,
        r.starts,
        Provenance::Definitional,
    ));
    s.push(Check::below(
        "constrained-start-spread",
        "every converged start reaches the same optimum",
        r.start_spread,
        1e-9,
        Provenance::Definitional,
    ));
    s.notes.push(format!(
        "complex phases {} (best real {:.15}, best complex {:.15})",
        if r.phases_matter {
            "improve the optimum"
        } else {
            "do not improve the optimum"
        },
        r.best_real_probability,
        r.evaluation.probability
    ));
    if free_angles {
        let f = optimize_unconstrained_measurements(&cfg, None)?;
        s.push(Check::within(
            "free-angle-optimum",
            "largest probability over both second observables is ((√5−1)/2)^5",
            f.evaluation.probability,
            GOLDEN_HARDY_PROBABILITY,
            1e-6,
            Provenance::Published,
        ));
        s.push(Check::below(
            "free-angle-optimum-residual",
            "the three vanishing conditions hold at the optimum",
            f.evaluation.max_residual(),
            1e-12,
            Provenance::Definitional,
        ));
        s.notes.push(format!(
            "free-angle optimum at α_A={:.9}, α_B={:.9}",
            f.best.alpha_a, f.best.alpha_b
        ));
    }
    Ok(s)
}

/// Exact feasibility of the four probability statements for local models.
pub fn lhv() -> Result<Section> {
    let mut s = Section::new("lhv");
    s.notes
        .push("outcomes restricted to ±1: the null outcome has probability zero on the source state".into());
    let scen = LhvScenario::hardy(ratio(9, 112))?;
    match lhv_feasibility(&scen)? {
        Feasibility::Infeasible(cert) => {
            s.push(Check::exact(
                "lhv-verdict",
                "no local model reproduces the four statements",
                "infeasible",
                "infeasible",
                Provenance::Published,
            ));
            s.push(Check::exact(
                "lhv-certificate-verified",
                "Farkas certificate re-checked in exact arithmetic",
                cert.verify(&scen),
                true,
                Provenance::Definitional,
            ));
            let mult: Vec<String> = cert.multipliers.iter().map(|m| m.to_string()).collect();
            s.notes.push(format!(
                "multipliers [{}], normalization {}, bound {}",
                mult.join(", "),
                cert.normalization,
                cert.bound
            ));
            s.notes.extend(cert.narrative);
        }
        Feasibility::Feasible(_) => s.push(Check::exact(
            "lhv-verdict",
            "no local model reproduces the four statements",
            "feasible",
            "infeasible",
            Provenance::Published,
        )),
    }
    let zero = LhvScenario::hardy(ratio(0, 1))?;
    let verdict = match lhv_feasibility(&zero)? {
        Feasibility::Feasible(w) if verify_witness(&zero, &w) => "feasible",
        Feasibility::Feasible(_) => "unverified",
        Feasibility::Infeasible(_) => "infeasible",
    };
    s.push(Check::exact(
        "lhv-zero-coincidence",
        "with the coincidence probability set to zero a local model exists",
        verdict,
        "feasible",
        Provenance::Definitional,
    ));
    Ok(s)
}
