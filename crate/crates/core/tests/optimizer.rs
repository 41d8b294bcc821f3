use gic_ldpc_core::ensemble::{DegreeDistribution, OPTIMIZER_DEGREES};
use gic_ldpc_core::optimizer::{
    retarget_target, sample_perturbation, sample_perturbation_to, step_target, PerturbationConfig,
};
use proptest::prelude::*;

fn lambda_strategy() -> impl Strategy<Value = Vec<(u32, f64)>> {
    // Sparse supports exercise the zero-mass degrees.
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 9).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| OPTIMIZER_DEGREES.iter().copied().zip(w.iter().map(|x| x / s)).collect())
    })
}

fn check_constraints(lambda: &[(u32, f64)], e: &[(u32, f64)], target: f64) -> Result<(), TestCaseError> {
    let sum: f64 = e.iter().map(|x| x.1).sum();
    let weighted: f64 = e.iter().map(|&(d, x)| x / d as f64).sum();
    prop_assert!(sum.abs() < 1e-12, "sum {sum}");
    prop_assert!((weighted - target).abs() < 1e-12, "weighted {weighted} vs {target}");
    for (&(_, l), &(_, x)) in lambda.iter().zip(e) {
        prop_assert!(l + x >= -1e-12 && l + x <= 1.0 + 1e-12);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rate_steps_satisfy_all_constraints(
        lambda in lambda_strategy(),
        dc in 3u32..=10,
        delta in 0.0f64..0.01,
        seed in any::<u64>(),
    ) {
        let d = DegreeDistribution::with_check_degree(lambda, dc).unwrap();
        let r0 = d.design_rate().unwrap();
        prop_assume!(r0 > 0.0 && r0 + delta < 0.95);
        match sample_perturbation(d.lambda(), dc, r0, delta, &PerturbationConfig::default(), seed) {
            Ok(e) => {
                check_constraints(d.lambda(), &e.e, step_target(dc, r0, delta))?;
                let next = d.with_lambda(e.apply(d.lambda())).unwrap();
                prop_assert!((next.design_rate().unwrap() - r0 - delta).abs() < 1e-9);
            }
            Err(_) => {
                // Only allowed when the inverse-degree sum is out of reach.
                let goal = d.lambda_inverse_sum() + step_target(dc, r0, delta);
                prop_assert!(!(1.0 / 50.0..=0.5).contains(&goal));
            }
        }
    }

    #[test]
    fn retargets_hit_the_requested_rate(
        lambda in lambda_strategy(),
        dc in 3u32..=10,
        rate in 0.05f64..0.5,
        seed in any::<u64>(),
    ) {
        let d = DegreeDistribution::with_check_degree(lambda, dc).unwrap();
        let target = retarget_target(d.lambda(), dc, rate);
        if let Ok(e) = sample_perturbation_to(d.lambda(), target, &PerturbationConfig::default(), seed) {
            check_constraints(d.lambda(), &e.e, target)?;
            let next = d.with_lambda(e.apply(d.lambda())).unwrap();
            prop_assert!((next.design_rate().unwrap() - rate).abs() < 1e-9);
        }
    }
}

#[test]
fn worked_example() {
    assert!((step_target(5, 0.25, 0.01) - 3.6036e-3).abs() < 1e-7);
    assert!((step_target(5, 0.25, 0.01) - 0.0036036036036).abs() < 1e-9);
}
