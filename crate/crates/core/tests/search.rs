use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

use alignfree_core::correlations::Outcome;
use alignfree_core::dfs_states::{dfs_embed, DfsVector};
use alignfree_core::distinguish::{
    component_table, is_distinguishing, mirror_sign, omega_from_thetas, product_components,
    scan_distinguishable_omegas, search_fixed_omega, DistinguishInstance, OmegaCondition, ScanConfig,
};
use alignfree_core::hardy::{lhv_feasibility, optimize_constrained, ratio, Feasibility, LhvScenario, OptimizerConfig};
use alignfree_core::localmeas::{classify_outcome, sample_wing, Protocol};
use alignfree_core::qcore::{QuantumState, Unitary2, C64};
use alignfree_core::seeding::stream_rng;
use rand::Rng;

#[test]
fn omega_condition_matches_components_for_random_angles() {
    let mut rng = stream_rng(99, 0);
    let mut checked = 0;
    for _ in 0..1000 {
        let thetas: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>() * PI);
        let t = component_table(&DistinguishInstance::new(0.3, thetas));
        for j in 0..16 {
            assert!((t[15 - j].0 - mirror_sign(j) * t[j].0).abs() < 1e-12);
        }
        if let OmegaCondition::Cot(_) = omega_from_thetas(thetas) {
            let omega = omega_from_thetas(thetas).omega().unwrap();
            let t = component_table(&DistinguishInstance::new(omega, thetas));
            assert!(t[0].0.abs() < 1e-9, "thetas {thetas:?}");
            checked += 1;
        }
    }
    assert!(checked > 990);
}

#[test]
fn scan_finds_multiples_of_pi_over_six() {
    let res = scan_distinguishable_omegas(&ScanConfig::default()).unwrap();
    assert_eq!(res.omegas.len(), 6, "{:?}", res.omegas);
    for (n, w) in res.omegas.iter().enumerate() {
        assert!((w - n as f64 * PI / 6.0).abs() < 1e-3, "{w}");
    }
    for w in &res.witnesses {
        assert!(is_distinguishing(&w.instance));
    }
}

#[test]
fn scan_respects_omega_range() {
    let res = scan_distinguishable_omegas(&ScanConfig {
        omega_range: Some((0.4, 0.9)),
        ..ScanConfig::default()
    })
    .unwrap();
    assert_eq!(res.omegas.len(), 1);
    assert!((res.omegas[0] - PI / 6.0).abs() < 1e-3);
}

#[test]
fn no_separating_basis_off_the_lattice() {
    for omega in [PI / 5.0, FRAC_PI_4] {
        let r = search_fixed_omega(omega, 200, 32).unwrap();
        assert!(!r.distinguishing, "ω = {omega}: residual {}", r.residual);
    }
    assert!(search_fixed_omega(FRAC_PI_3, 200, 32).unwrap().distinguishing);
}

#[test]
fn witnesses_separate_every_sampled_shot() {
    let res = scan_distinguishable_omegas(&ScanConfig::default()).unwrap();
    let mut rng = stream_rng(4, 4);
    let components =
        |s: &QuantumState, thetas: &[f64; 4]| product_components(&std::array::from_fn(|i| s.amplitude(i).re), thetas);
    for w in &res.witnesses {
        let thetas = w.instance.thetas;
        let psi = dfs_embed(DfsVector::from_angle(w.instance.omega)).unwrap();
        let perp = dfs_embed(DfsVector::orthogonal_from_angle(w.instance.omega)).unwrap();
        let (cp, cq) = (components(&psi, &thetas), components(&perp, &thetas));
        // decide "ψ" iff the word has weight on |ψ⟩
        for (source, amps) in [(true, cp), (false, cq)] {
            for _ in 0..10_000 {
                let u = rng.gen::<f64>();
                let mut acc = 0.0;
                let mut word = 15;
                for (j, a) in amps.iter().enumerate() {
                    acc += a * a;
                    if u < acc {
                        word = j;
                        break;
                    }
                }
                assert_eq!(cp[word].abs() > 1e-8, source, "witness {:?}", w.instance);
            }
        }
    }
}

#[test]
fn protocol_classification_is_exact_on_basis_states() {
    let mut rng = stream_rng(8, 8);
    for (s, p, e) in [
        (alignfree_core::dfs_states::make_phi0(), Protocol::F, Outcome::Minus),
        (alignfree_core::dfs_states::make_psi1(), Protocol::G, Outcome::Plus),
    ] {
        for _ in 0..10_000 {
            let w = sample_wing(&s, p, &Unitary2::identity(), &mut rng).unwrap();
            assert_eq!(classify_outcome(w, p), e);
        }
    }
}

#[test]
fn constrained_optimum_recovers_source_state() {
    let r = optimize_constrained(FRAC_PI_3, &OptimizerConfig::default()).unwrap();
    assert!((r.evaluation.probability - 9.0 / 112.0).abs() < 1e-9);
    let target = [
        C64::new(1.0, 0.0),
        C64::new(3f64.sqrt(), 0.0),
        C64::new(3f64.sqrt(), 0.0),
        C64::new(0.0, 0.0),
    ]
    .map(|z| z / 7f64.sqrt());
    let overlap: C64 = r.best.coefficients.iter().zip(&target).map(|(a, b)| a.conj() * b).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-6);
    assert!(!r.phases_matter);
}

#[test]
fn lhv_monotone_in_target_probability() {
    for (num, den, feasible) in [(0, 1, true), (1, 1000, false), (9, 112, false), (1, 2, false)] {
        let scen = LhvScenario::hardy(ratio(num, den)).unwrap();
        let f = lhv_feasibility(&scen).unwrap();
        assert_eq!(f.is_feasible(), feasible, "p = {num}/{den}");
        if let Feasibility::Infeasible(cert) = f {
            assert!(cert.bound < ratio(0, 1));
        }
    }
}
