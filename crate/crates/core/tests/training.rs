use linsep_core::bounds::{max_nonzero_updates, min_nonzero_updates, relu_iteration_bound, UpdateBoundInputs};
use linsep_core::constructions::*;
use linsep_core::data::{generate_separable, SeparableSpec};
use linsep_core::network::subgradient;
use linsep_core::trainer::*;
use linsep_core::types::norm;
use linsep_core::*;

fn leaky(alpha: f64) -> Activation {
    Activation::leaky_relu(alpha).unwrap()
}

#[test]
fn leaky_runs_stay_within_update_cap_for_both_orders() {
    for seed in 0..12u64 {
        let norm_wstar = 1.5 + (seed % 3) as f64;
        let data = generate_separable(&SeparableSpec { d: 6, n: 80, norm_wstar, seed }).unwrap();
        for (k, order) in [(1, SamplingOrder::Cyclic), (7, SamplingOrder::UniformWithReplacement), (40, SamplingOrder::Cyclic)] {
            let (alpha, eta) = (0.2, 0.3);
            let mut rng = seeded_rng(seed);
            let scheme = InitScheme::BoundedRows { r: 0.4, v: 0.3 };
            let p = initialize(&scheme, k, 6, leaky(alpha), &mut rng).unwrap();
            let cfg = TrainConfig::new(eta).with_seed(seed).with_order(order);
            let rec = train(p, &data, &cfg, None).unwrap();
            let cap = max_nonzero_updates(&UpdateBoundInputs { norm_wstar, alpha, eta, k, v: 0.3, r: 0.4 }).unwrap();
            assert_eq!(rec.status, RunStatus::GlobalMin);
            assert!(rec.nonzero_updates <= cap.ceil() as u64, "{} > {cap}", rec.nonzero_updates);
            assert_eq!(rec.final_stats().hinge_loss, 0.0);
            assert_eq!(rec.final_stats().train_error, 0.0);
        }
    }
}

#[test]
fn proof_quantities_hold_per_update() {
    let data = generate_separable(&SeparableSpec { d: 5, n: 60, norm_wstar: 2.5, seed: 4 }).unwrap();
    let (k, eta, alpha) = (9, 0.7, 0.15);
    let p = initialize(&InitScheme::Default, k, 5, leaky(alpha), &mut seeded_rng(1)).unwrap();
    let v = p.v();
    let cfg = TrainConfig::new(eta).with_seed(2).with_trajectory(true);
    let rec = train(p, &data, &cfg, None).unwrap();
    let traj = rec.trajectory.as_ref().unwrap();
    assert_eq!(traj.len() as u64, rec.nonzero_updates + 1);
    for w in traj.windows(2) {
        assert!(w[1].f - w[0].f >= 2.0 * k as f64 * eta * v * alpha - 1e-9);
        assert!(w[1].g * w[1].g - w[0].g * w[0].g <= 2.0 * eta + 2.0 * k as f64 * eta * eta * v * v + 1e-9);
        assert!(w[1].cosine <= 1.0 + 1e-12);
    }
}

#[test]
fn nonzero_update_count_matches_independent_recount() {
    let data = generate_separable(&SeparableSpec { d: 4, n: 40, norm_wstar: 2.0, seed: 8 }).unwrap();
    let p = initialize(&InitScheme::Default, 3, 4, leaky(0.3), &mut seeded_rng(8)).unwrap();
    let mut prev = p.clone();
    let mut recount = 0u64;
    let cfg = TrainConfig::new(0.5).with_seed(8);
    let out = train_observed(p, &data, &cfg, None, |ev| {
        let g = subgradient(&prev, &data.examples()[ev.example_index]).unwrap();
        assert_eq!(!g.grad.is_zero(), ev.nonzero);
        if ev.nonzero {
            recount += 1;
        }
        prev = ev.params.clone();
    })
    .unwrap();
    assert_eq!(out.record.nonzero_updates, recount);
    assert!(recount > 0);
}

#[test]
fn runs_are_reproducible() {
    let data = generate_separable(&SeparableSpec { d: 7, n: 100, norm_wstar: 2.0, seed: 3 }).unwrap();
    let run = || {
        let p = initialize(&InitScheme::Default, 11, 7, leaky(0.25), &mut seeded_rng(77)).unwrap();
        let cfg = TrainConfig::new(0.1).with_seed(77).with_trajectory(true);
        train(p, &data, &cfg, Some(&data)).unwrap()
    };
    assert_eq!(format!("{:?}", run()), format!("{:?}", run()));
}

#[test]
fn relu_orthogonal_outcome_follows_dead_set() {
    let d = 16;
    let data = orthogonal_dataset(d).unwrap();
    let (c, eta) = (1.0, 0.5);
    let bound = relu_iteration_bound(d, c, eta).unwrap();
    let mut seen = [false, false];
    for seed in 0..300u64 {
        let k = 1 + (seed % 6) as usize;
        let p = initialize(&InitScheme::SymmetricBox { c }, k, d, Activation::Relu, &mut seeded_rng(seed)).unwrap();
        let k0 = dead_set(&p);
        let predicted = predict_relu_outcome(&p);
        let cfg = TrainConfig::new(eta).with_seed(seed);
        let out = train_observed(p, &data, &cfg, None, |ev| assert_eq!(dead_set(ev.params), k0)).unwrap();
        match predicted {
            ReluOutcome::Global => {
                seen[0] = true;
                assert_eq!(out.record.status, RunStatus::GlobalMin);
                assert!(out.record.nonzero_updates <= bound);
            }
            ReluOutcome::NonGlobal => {
                seen[1] = true;
                assert_eq!(out.record.status, RunStatus::NonglobalStall);
                assert!(out.record.final_stats().hinge_loss > 0.0);
            }
        }
    }
    assert_eq!(seen, [true, true]);
}

#[test]
fn adversarial_sequence_needs_at_least_the_lower_bound() {
    for d in [1usize, 3, 9, 25] {
        for eta in [0.05, 0.5, 5.0] {
            for k in [1usize, 4] {
                let alpha = 0.3;
                let s = default_scale(k);
                let data = adversarial_sequence(d).unwrap();
                let p = adversarial_init(k, d, s, s, leaky(alpha)).unwrap();
                let cfg = TrainConfig::new(eta).with_order(SamplingOrder::Cyclic).with_max_epochs(1_000_000);
                let out = train_observed(p, &data, &cfg, None, |ev| {
                    // rows stay identical within each half
                    for i in 1..k {
                        assert_eq!(ev.params.w_row(i), ev.params.w_row(0));
                        assert_eq!(ev.params.u_row(i), ev.params.u_row(0));
                    }
                })
                .unwrap();
                let rec = out.record;
                assert_eq!(rec.status, RunStatus::GlobalMin);
                let lo = min_nonzero_updates(&UpdateBoundInputs::default_init((d as f64).sqrt(), alpha, eta, k)).unwrap();
                assert!(rec.nonzero_updates as f64 >= lo, "d={d} eta={eta} k={k}: {} < {lo}", rec.nonzero_updates);
                assert!(rec.nonzero_updates >= d as u64);
            }
        }
    }
}

#[test]
fn bad_local_minimum_is_locally_flat() {
    for seed in 0..5u64 {
        let data = generate_separable(&SeparableSpec { d: 6, n: 25, norm_wstar: 3.0, seed }).unwrap();
        let mut rng = seeded_rng(seed + 100);
        let b = relu_bad_local_min(&data, 3, &mut rng).unwrap();
        let base = network::hinge_loss(&b.params, &data).unwrap();
        assert!(base > 0.5);
        assert!(network::full_batch_subgradient(&b.params, &data).unwrap().is_zero());
        for _ in 0..200 {
            let mut dir = Matrix::zeros(6, 6);
            for x in dir.as_mut_slice() {
                *x = rng.standard_normal();
            }
            let scale = rng.uniform(0.0, 1.0) * b.safe_eps / dir.frobenius_norm();
            let mut w = b.params.weights().clone();
            w.add_scaled(scale, &dir);
            let moved = b.params.with_weights(w).unwrap();
            assert_eq!(network::hinge_loss(&moved, &data).unwrap(), base);
        }
    }
}

#[test]
fn dead_coordinate_probability_matches_half_power_k() {
    let k = 3;
    let trials = 100_000;
    let mut rng = seeded_rng(2024);
    let mut dead = 0;
    for _ in 0..trials {
        let p = initialize(&InitScheme::SymmetricBox { c: 1.0 }, k, 1, Activation::Relu, &mut rng).unwrap();
        if dead_set(&p).indices.contains(&0) {
            dead += 1;
        }
    }
    let freq = dead as f64 / trials as f64;
    assert!((freq - 0.125).abs() <= 0.01, "freq = {freq}");
}

#[test]
fn default_init_rows_respect_radius() {
    let p = initialize(&InitScheme::Default, 50, 30, leaky(0.1), &mut seeded_rng(0)).unwrap();
    let r = default_scale(50);
    assert!((0..100).all(|i| norm(p.weights().row(i)) <= r));
}
