use alignfree_core::correlations::{
    hardy_quantities, joint_table, marginal, product_amplitude, Setting, SetupRotations,
};
use alignfree_core::dfs_states::{dfs_embed, make_eta, make_phi0, make_phi1, DfsVector};
use alignfree_core::hardy::{full_model_evaluation, hardy_probability, HardyInstance};
use alignfree_core::qcore::{
    apply_collective, haar_su2, partial_trace, permute_qubits, tensor, QuantumState, Wing, C64,
};
use alignfree_core::seeding::stream_rng;
use proptest::prelude::*;

fn random_state(n: usize, seed: u64) -> QuantumState {
    use rand::Rng;
    let mut rng = stream_rng(seed, 7);
    let amps = (0..1usize << n)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    QuantumState::normalized(n, amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collective_rotation_preserves_norm(seed in any::<u64>(), n in 1usize..=6) {
        let s = random_state(n, seed);
        let u = haar_su2(&mut stream_rng(seed, 1));
        let out = apply_collective(&s, &u, Wing::All).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_plane_is_fixed_by_every_collective_rotation(seed in any::<u64>(), omega in 0.0f64..std::f64::consts::PI) {
        let s = dfs_embed(DfsVector::from_angle(omega)).unwrap();
        let u = haar_su2(&mut stream_rng(seed, 2));
        let out = apply_collective(&s, &u, Wing::All).unwrap();
        prop_assert!(out.distance(&s) < 1e-10);
    }

    #[test]
    fn source_state_is_fixed_by_per_wing_rotations(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let eta = make_eta();
        let a = apply_collective(&eta, &haar_su2(&mut rng), Wing::Alice).unwrap();
        let b = apply_collective(&a, &haar_su2(&mut rng), Wing::Bob).unwrap();
        prop_assert!(b.distance(&eta) < 1e-10);
    }

    #[test]
    fn permutation_then_inverse_is_identity(seed in any::<u64>(), n in 2usize..=5) {
        use rand::seq::SliceRandom;
        let s = random_state(n, seed);
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(&mut stream_rng(seed, 4));
        let mut inv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p - 1] = k + 1;
        }
        let back = permute_qubits(&permute_qubits(&s, &perm).unwrap(), &inv).unwrap();
        prop_assert!(back.distance(&s) < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor(seed in any::<u64>()) {
        let a = random_state(2, seed);
        let b = random_state(3, seed.wrapping_add(1));
        let rho = partial_trace(&tensor(&a, &b).unwrap(), &[1, 2]).unwrap();
        prop_assert!(rho.max_abs_diff(&a.to_density()) < 1e-12);
        let rho_b = partial_trace(&tensor(&a, &b).unwrap(), &[3, 4, 5]).unwrap();
        prop_assert!(rho_b.max_abs_diff(&b.to_density()) < 1e-12);
    }

    #[test]
    fn marginals_do_not_depend_on_remote_setting(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 5);
        let eta = make_eta();
        let local = Setting::f().rotated(haar_su2(&mut rng));
        let far_f = Setting::f().rotated(haar_su2(&mut rng));
        let far_g = Setting::g().rotated(haar_su2(&mut rng));
        let m = marginal(&eta, Wing::Alice, &local).unwrap();
        for far in [far_f, far_g] {
            let t = joint_table(&eta, &local, &far).unwrap();
            for i in 0..3 {
                let row: f64 = t[i].iter().sum();
                prop_assert!((row - m[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hardy_quantities_are_rotation_invariant(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 6);
        let rot = SetupRotations {
            f_alice: haar_su2(&mut rng),
            g_alice: haar_su2(&mut rng),
            f_bob: haar_su2(&mut rng),
            g_bob: haar_su2(&mut rng),
        };
        let q = hardy_quantities(&make_eta(), &rot).unwrap().as_array();
        let e = hardy_quantities(&make_eta(), &SetupRotations::identity()).unwrap().as_array();
        for k in 0..4 {
            prop_assert!((q[k] - e[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn wing_swap_symmetry_of_source_state() {
    let perm = [5, 6, 7, 8, 1, 2, 3, 4];
    let eta = make_eta();
    assert!(permute_qubits(&eta, &perm).unwrap().distance(&eta) < 1e-14);
}

#[test]
fn reduced_model_agrees_with_full_space() {
    use rand::Rng;
    let mut rng = stream_rng(11, 0);
    for _ in 0..100 {
        let c: Vec<C64> = (0..4)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let inst = HardyInstance {
            coefficients: [c[0] / n, c[1] / n, c[2] / n, c[3] / n],
            alpha_a: rng.gen::<f64>() * std::f64::consts::PI,
            alpha_b: rng.gen::<f64>() * std::f64::consts::PI,
        };
        let small = hardy_probability(&inst).unwrap();
        let full = full_model_evaluation(&inst).unwrap();
        assert!((small.probability - full.probability).abs() < 1e-12);
        for k in 0..3 {
            assert!((small.residuals[k] - full.residuals[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn product_amplitude_matches_inner_product() {
    let eta = make_eta();
    let (p0, p1) = (make_phi0(), make_phi1());
    let direct = tensor(&p1, &p0).unwrap();
    let z = product_amplitude(&eta, &p1, &p0);
    assert!((z - direct.inner(&eta)).norm() < 1e-14);
    assert!((z.re - (3f64 / 7.0).sqrt()).abs() < 1e-12);
}
