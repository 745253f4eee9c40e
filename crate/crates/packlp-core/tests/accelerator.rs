//! Pipeline tests: sampling, sample-LP construction, thresholding, the
//! margin-schedule search, and the margin bound formula.

use packlp_core::accel::{
    accelerate, accelerate_once, build_sample_lp, default_ef_schedule, sample_variables,
    theoretical_ef, threshold, threshold_with_loads, AcceleratorConfig,
};
use packlp_core::gen::{generate_random, BRule, RandomSpec};
use packlp_core::rng::SplitMix64;
use packlp_core::solver::{perturb_costs, simplex_solve, SimplexSolver};
use packlp_core::{is_binary, PackingLp};

fn lp(m: usize, n: usize, entries: &[(usize, usize, f64)], b: &[f64], c: &[f64]) -> PackingLp {
    PackingLp::from_entries(m, n, entries, b.to_vec(), c.to_vec()).unwrap()
}

fn random_instance(m: usize, n: usize, density: f64, b_frac: f64, seed: u64) -> PackingLp {
    generate_random(&RandomSpec {
        m,
        n,
        density,
        b_rule: BRule::FractionOfN(b_frac),
        c_range: (1.0, 100.0),
        seed,
    })
    .unwrap()
}

#[test]
fn sample_sizes() {
    let mut rng = SplitMix64::new(1);
    // eps_s = 1 takes everything.
    assert_eq!(sample_variables(8, 1.0, &mut rng), (0..8).collect::<Vec<_>>());
    // Ceiling: 10 * 0.25 = 2.5 -> 3.
    assert_eq!(sample_variables(10, 0.25, &mut rng).len(), 3);
    // Tiny eps still samples at least one.
    assert_eq!(sample_variables(10, 0.001, &mut rng).len(), 1);
}

#[test]
fn sample_lp_rhs_scaling() {
    let base = lp(1, 4, &[(0, 0, 0.5), (0, 2, 1.0)], &[1000.0], &[1.0, 2.0, 3.0, 4.0]);

    // Identity scaling: eps_s = 1, eps_f = 0, alpha_d = 1 keeps b unchanged.
    let s = build_sample_lp(&base, &[0, 1, 2, 3], 1.0, 0.0, 1.0).unwrap();
    assert_eq!(s.lp.b(), &[1000.0]);
    assert_eq!(s.lp.c(), base.c());

    // (1 - 0.1) * 0.01 / 1 * 1000 = 9.
    let s = build_sample_lp(&base, &[1], 0.01, 0.1, 1.0).unwrap();
    assert!((s.lp.b()[0] - 9.0).abs() < 1e-12);
    assert_eq!(s.index_map, vec![1]);
    assert_eq!(s.lp.c(), &[2.0]);

    // alpha_d = 2 halves it again.
    let s = build_sample_lp(&base, &[1], 0.01, 0.1, 2.0).unwrap();
    assert!((s.lp.b()[0] - 4.5).abs() < 1e-12);

    // Columns carry over unchanged (column 2 has the 1.0 entry).
    let s = build_sample_lp(&base, &[2], 0.25, 0.0, 1.0).unwrap();
    assert_eq!(s.lp.col(0), base.col(2));
}

#[test]
fn sample_lp_monotone_in_parameters() {
    let base = random_instance(3, 40, 0.8, 0.1, 5);
    let sample: Vec<usize> = (0..10).collect();
    let rhs =
        |eps_s: f64, eps_f: f64, a: f64| build_sample_lp(&base, &sample, eps_s, eps_f, a).unwrap().lp.b()[0];
    assert!(rhs(0.25, 0.3, 1.0) < rhs(0.25, 0.2, 1.0), "decreasing in eps_f");
    assert!(rhs(0.25, 0.2, 2.0) < rhs(0.25, 0.2, 1.0), "decreasing in alpha_d");
    // eps_s also fixes the expected sample size, so compare via a full set.
    let all: Vec<usize> = (0..40).collect();
    let r1 = build_sample_lp(&base, &all, 1.0, 0.2, 1.0).unwrap().lp.b()[0];
    let half: Vec<usize> = (0..20).collect();
    let r2 = build_sample_lp(&base, &half, 0.5, 0.2, 1.0).unwrap().lp.b()[0];
    assert!(r2 < r1, "increasing in eps_s");
}

#[test]
fn sample_lp_rejects_bad_sets() {
    let base = random_instance(2, 10, 1.0, 0.1, 8);
    assert!(build_sample_lp(&base, &[0, 1, 2], 0.2, 0.0, 1.0).is_err()); // wrong size
    assert!(build_sample_lp(&base, &[3, 1], 0.2, 0.0, 1.0).is_err()); // unsorted
    assert!(build_sample_lp(&base, &[1, 99], 0.2, 0.0, 1.0).is_err()); // out of range
    assert!(build_sample_lp(&base, &[1, 2], 0.2, 1.0, 1.0).is_err()); // eps_f = 1
}

#[test]
fn threshold_rule_and_ties() {
    // phi = 0: positive costs win, zero cost is a tie and goes to 0.
    let base = lp(1, 3, &[(0, 0, 1.0), (0, 1, 1.0)], &[1.0], &[5.0, 0.0, 0.0]);
    assert_eq!(threshold(&base, &[0.0]), vec![1.0, 0.0, 0.0]);

    // Exact tie at priced == cost goes to 0.
    let base = lp(1, 2, &[(0, 0, 0.5), (0, 1, 0.5)], &[1.0], &[1.0, 1.1]);
    assert_eq!(threshold(&base, &[2.0]), vec![0.0, 1.0]);
}

#[test]
fn threshold_matches_dense_oracle_with_solver_prices() {
    let base = lp(
        2,
        4,
        &[(0, 0, 0.9), (1, 0, 0.4), (0, 1, 0.3), (1, 2, 0.8), (0, 3, 0.6), (1, 3, 0.6)],
        &[1.0, 0.8],
        &[3.0, 1.0, 2.0, 4.0],
    );
    let out = simplex_solve(&base, 1e-9).unwrap();
    let x_hat = threshold(&base, &out.dual.phi);

    // Dense per-column evaluation of the rule.
    let mut dense = vec![vec![0.0; 4]; 2];
    for j in 0..4 {
        let (rows, vals) = base.col(j);
        for (&i, &a) in rows.iter().zip(vals) {
            dense[i as usize][j] = a;
        }
    }
    for j in 0..4 {
        let priced: f64 = (0..2).map(|i| dense[i][j] * out.dual.phi[i]).sum();
        let expect = if priced < base.c()[j] { 1.0 } else { 0.0 };
        assert_eq!(x_hat[j], expect, "column {j}");
    }
}

#[test]
fn threshold_scale_invariance() {
    let base = random_instance(4, 30, 0.7, 0.1, 13);
    let mut rng = SplitMix64::new(14);
    let phi: Vec<f64> = (0..4).map(|_| rng.uniform(0.0, 10.0)).collect();
    let x = threshold(&base, &phi);
    for lambda in [0.125, 0.5, 2.0, 64.0] {
        // Scaling (c, phi) together by a power of two leaves every strict
        // comparison unchanged even in floating point.
        let scaled_c: Vec<f64> = base.c().iter().map(|&c| c * lambda).collect();
        let scaled_lp = base.with_costs(scaled_c).unwrap();
        let scaled_phi: Vec<f64> = phi.iter().map(|&p| p * lambda).collect();
        assert_eq!(threshold(&scaled_lp, &scaled_phi), x, "lambda {lambda}");
    }
}

#[test]
fn fused_loads_match_generic_loads_bitwise() {
    let base = random_instance(6, 120, 0.6, 0.08, 21);
    let out = simplex_solve(&base, 1e-9).unwrap();
    let (x_hat, loads) = threshold_with_loads(&base, &out.dual.phi);
    assert_eq!(loads, base.loads(&x_hat).unwrap());
}

#[test]
fn accelerate_once_worthless_items() {
    // c = 0: thresholding never selects anything; 0 is optimal.
    let base = lp(1, 5, &[(0, 0, 1.0)], &[2.0], &[0.0; 5]);
    let mut rng = SplitMix64::new(3);
    let once = accelerate_once(&base, &SimplexSolver::default(), 0.4, 0.0, &mut rng).unwrap();
    assert_eq!(once.x_hat, vec![0.0; 5]);
}

#[test]
fn accelerate_once_unconstrained() {
    // A = 0: sample duals are zero, thresholding selects everything.
    let base = lp(2, 6, &[], &[1.0, 1.0], &[2.0, 1.0, 3.0, 4.0, 5.0, 6.0]);
    let mut rng = SplitMix64::new(4);
    let once = accelerate_once(&base, &SimplexSolver::default(), 0.5, 0.0, &mut rng).unwrap();
    assert_eq!(once.x_hat, vec![1.0; 6]);
    assert_eq!(once.sample.lp.n(), 3);
}

#[test]
fn accelerate_once_quality_when_feasible() {
    // Seeded 2x20 instance: when the thresholded point is feasible at
    // margin eps_f, its objective is at least (1 - 3 eps_f) of optimal.
    let eps_f = 0.2;
    let mut checked = 0;
    for seed in 0..40 {
        let base = random_instance(2, 20, 0.9, 0.25, 500 + seed);
        let mut rng = SplitMix64::new(seed);
        let once =
            accelerate_once(&base, &SimplexSolver::default(), 0.5, eps_f, &mut rng).unwrap();
        assert!(is_binary(&once.x_hat));
        if base.check_feasible(&once.x_hat, 1e-7).unwrap().feasible {
            let obj = base.objective(&once.x_hat).unwrap();
            let opt = simplex_solve(&base, 1e-9).unwrap().primal.objective;
            assert!(
                obj / opt >= 1.0 - 3.0 * eps_f,
                "seed {seed}: ratio {} below {}",
                obj / opt,
                1.0 - 3.0 * eps_f
            );
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} feasible outcomes to check");
}

#[test]
fn accelerate_stops_at_first_feasible_margin() {
    // One constraint, ones row, c = [1, 5, 6, 6], b = 2.5, sample {0, 1}.
    // At small margins the sample RHS exceeds 1, the cheap column prices the
    // constraint at phi = 1 and thresholding overselects (load 3 > 2.5).
    // At eps_f = 0.25 the RHS drops below 1, phi jumps to 5 and the
    // selection shrinks to the two expensive columns (load 2, feasible).
    let entries: Vec<(usize, usize, f64)> = (0..4).map(|j| (0usize, j, 1.0)).collect();
    let base = lp(1, 4, &entries, &[2.5], &[1.0, 5.0, 6.0, 6.0]);
    let seed = (0..)
        .find(|&s| {
            sample_variables(4, 0.5, &mut SplitMix64::new(s)) == vec![0, 1]
        })
        .unwrap();

    let config = AcceleratorConfig {
        eps_s: 0.5,
        ef_schedule: vec![0.0, 0.1, 0.25],
        seed,
        resample_per_ef: false,
        ..AcceleratorConfig::default()
    };
    let out = accelerate(&base, &SimplexSolver::default(), &config).unwrap();
    assert_eq!(out.eps_f_used, 0.25);
    assert!(!out.fallback);
    assert_eq!(out.x_hat, vec![0.0, 0.0, 1.0, 1.0]);
    assert_eq!(out.attempts.len(), 3);

    // Direct enumeration of the schedule confirms the loop's choice.
    for (k, &ef) in config.ef_schedule.iter().enumerate() {
        let sample = build_sample_lp(&base, &[0, 1], 0.5, ef, 1.0).unwrap();
        let solved = simplex_solve(&sample.lp, 1e-9).unwrap();
        let x = threshold(&base, &solved.dual.phi);
        let feasible = base.check_feasible(&x, 1e-7).unwrap().feasible;
        assert_eq!(feasible, k == 2, "margin {ef}");
    }
}

#[test]
fn accelerate_trivial_cases() {
    // Feasible immediately at the default first margin of zero.
    let base = random_instance(2, 30, 0.5, 0.4, 70);
    let config = AcceleratorConfig { eps_s: 0.5, seed: 1, ..AcceleratorConfig::default() };
    let out = accelerate(&base, &SimplexSolver::default(), &config).unwrap();
    if !out.fallback {
        assert!(base.check_feasible(&out.x_hat, 1e-7).unwrap().feasible);
    }

    // c = 0 thresholds to zero, which is feasible at eps_f = 0.
    let zero_c = lp(1, 4, &[(0, 1, 0.5)], &[1.0], &[0.0; 4]);
    let out = accelerate(&zero_c, &SimplexSolver::default(), &config).unwrap();
    assert_eq!(out.eps_f_used, 0.0);
    assert_eq!(out.x_hat, vec![0.0; 4]);
    assert!(!out.fallback);
}

#[test]
fn accelerate_fallback_when_schedule_exhausted() {
    // The sampled cheap column always prices the constraint below the
    // unsampled columns' costs, so thresholding always overselects: with a
    // truncated schedule the loop must fall back to zeros.
    let entries: Vec<(usize, usize, f64)> = (0..4).map(|j| (0usize, j, 1.0)).collect();
    let base = lp(1, 4, &entries, &[1.0], &[1.0, 1.0, 10.0, 10.0]);
    let seed = (0..)
        .find(|&s| {
            sample_variables(4, 0.5, &mut SplitMix64::new(s)) == vec![0, 1]
        })
        .unwrap();
    let config = AcceleratorConfig {
        eps_s: 0.5,
        ef_schedule: vec![0.0, 0.2, 0.4],
        seed,
        resample_per_ef: false,
        ..AcceleratorConfig::default()
    };
    let out = accelerate(&base, &SimplexSolver::default(), &config).unwrap();
    assert!(out.fallback);
    assert_eq!(out.eps_f_used, 1.0);
    assert_eq!(out.x_hat, vec![0.0; 4]);
    assert!(base.check_feasible(&out.x_hat, 0.0).unwrap().feasible);
}

#[test]
fn accelerate_is_deterministic() {
    let base = random_instance(5, 200, 0.7, 0.1, 90);
    let config = AcceleratorConfig { eps_s: 0.1, seed: 123, ..AcceleratorConfig::default() };
    let a = accelerate(&base, &SimplexSolver::default(), &config).unwrap();
    let b = accelerate(&base, &SimplexSolver::default(), &config).unwrap();
    assert_eq!(a.x_hat, b.x_hat);
    assert_eq!(a.eps_f_used, b.eps_f_used);
    assert_eq!(a.objective, b.objective);
}

#[test]
fn accelerate_output_contract_across_mixed_instances() {
    // Binary + feasible at 1e-7, resampling and fixed-sample modes alike.
    for seed in 0..30 {
        let m = 1 + (seed as usize % 6);
        let n = 10 + 13 * (seed as usize % 7);
        let base = random_instance(m, n, 0.3 + 0.1 * (seed % 8) as f64, 0.1, 7000 + seed);
        for resample in [true, false] {
            let config = AcceleratorConfig {
                eps_s: 0.2,
                seed,
                resample_per_ef: resample,
                ..AcceleratorConfig::default()
            };
            let out = accelerate(&base, &SimplexSolver::default(), &config).unwrap();
            assert!(is_binary(&out.x_hat), "seed {seed}");
            assert!(
                base.check_feasible(&out.x_hat, 1e-7).unwrap().feasible,
                "seed {seed} resample {resample}"
            );
        }
    }
}

#[test]
fn config_validation() {
    let ok = AcceleratorConfig::default();
    assert!(ok.validate().is_ok());
    assert_eq!(ok.ef_schedule[0], 0.0);
    assert_eq!(ok.ef_schedule.len(), 100);
    assert_eq!(default_ef_schedule()[99], 0.99);

    let bad = AcceleratorConfig { eps_s: 0.0, ..AcceleratorConfig::default() };
    assert!(bad.validate().is_err());
    let bad = AcceleratorConfig { ef_schedule: vec![0.2, 0.1], ..AcceleratorConfig::default() };
    assert!(bad.validate().is_err());
    let bad = AcceleratorConfig { ef_schedule: vec![0.5, 1.0], ..AcceleratorConfig::default() };
    assert!(bad.validate().is_err());
    let bad = AcceleratorConfig { alpha_d: 0.5, ..AcceleratorConfig::default() };
    assert!(bad.validate().is_err());
}

#[test]
fn margin_bound_formula() {
    // Independently computed: 3 * sqrt(6 * 102 * ln(1e6) / (0.01 * 1e5)).
    let t = theoretical_ef(100, 1_000_000, 0.01, 1e5);
    assert!((t.value - 8.723292506460346).abs() < 1e-9);
    assert!(t.out_of_regime, "bound above 1 is vacuous");

    // Quadrupling eps_s halves the bound exactly (power-of-two scaling).
    let quarter = theoretical_ef(100, 1_000_000, 0.04, 1e5);
    assert_eq!(quarter.value, t.value / 2.0);

    // Large B drives the bound toward zero and into the valid regime.
    let tight = theoretical_ef(100, 1_000_000, 0.01, 1e12);
    assert!(tight.value < 3e-3);
    assert!(!tight.out_of_regime);
}

#[test]
fn thresholded_and_sampled_solutions_rarely_disagree() {
    // With perturbed costs and an exact solver, the thresholded values on
    // the sampled set differ from the sample-LP primal on at most m
    // coordinates (the basic ones).
    for seed in 0..20 {
        let m = 2 + (seed as usize % 7);
        let n = 60 + 20 * (seed as usize % 5);
        let base = random_instance(m, n, 0.7, 0.1, 9000 + seed);
        let perturbed = perturb_costs(&base, seed ^ 0xFACE);
        let mut rng = SplitMix64::new(seed);
        let sample_idx = sample_variables(n, 0.25, &mut rng);
        let sample = build_sample_lp(&perturbed, &sample_idx, 0.25, 0.0, 1.0).unwrap();
        let solved = simplex_solve(&sample.lp, 1e-9).unwrap();
        let x_hat = threshold(&perturbed, &solved.dual.phi);
        let diffs = sample
            .index_map
            .iter()
            .enumerate()
            .filter(|&(k, &j)| x_hat[j] != solved.primal.x[k])
            .count();
        assert!(diffs <= m, "seed {seed}: {diffs} diffs > m = {m}");
    }
}
