use gic_ldpc_core::ensemble::{
    initial_distribution, sample_code, DegreeDistribution, SystematicEncoder, OPTIMIZER_DEGREES,
};
use proptest::prelude::*;

fn row(masses: [f64; 9], dc: u32) -> DegreeDistribution {
    DegreeDistribution::with_check_degree(OPTIMIZER_DEGREES.iter().copied().zip(masses).collect(), dc).unwrap()
}

fn w1_strong_optimized() -> DegreeDistribution {
    row(
        [0.3106, 0.1901, 0.1065, 0.1691, 0.0809, 0.0337, 0.0297, 0.0033, 0.0761],
        5,
    )
}

#[test]
fn regular_code_of_length_1000() {
    let d = DegreeDistribution::regular(3, 6).unwrap();
    let h = sample_code(&d, 1000, 7).unwrap();
    assert_eq!(h.m(), 500);
    assert!(h.variable_degrees().iter().all(|&k| k == 3));
    assert!(h.check_degrees().iter().all(|&k| k == 6));
    let again = sample_code(&d, 1000, 7).unwrap();
    assert!(h.edges().eq(again.edges()));
}

#[test]
fn irregular_code_realizes_its_design_rate() {
    let d = w1_strong_optimized();
    let h = sample_code(&d, 50_000, 3).unwrap();
    assert!((h.rate() - d.design_rate().unwrap()).abs() < 0.005);
    assert!((h.rate() - 0.278).abs() < 0.005);
    // Histogram against the node-perspective fractions.
    let node = d.to_node();
    let degs = h.variable_degrees();
    for &(k, f) in &node.variable {
        let count = degs.iter().filter(|&&x| x == k as usize).count() as f64;
        assert!((count - f * 50_000.0).abs() <= 50.0, "degree {k}");
    }
    assert_eq!(h.four_cycles(), 0);
}

#[test]
fn degree_histogram_chi_square_at_large_n() {
    let d = row(
        [0.2759, 0.2502, 0.1001, 0.1089, 0.0502, 0.1706, 0.0086, 0.0247, 0.0108],
        5,
    );
    let n = 100_000;
    let h = sample_code(&d, n, 11).unwrap();
    let node = d.to_node();
    let degs = h.variable_degrees();
    let mut chi = 0.0;
    for &(k, f) in &node.variable {
        let expect = f * n as f64;
        let got = degs.iter().filter(|&&x| x == k as usize).count() as f64;
        chi += (got - expect).powi(2) / expect;
    }
    // Largest-remainder counts differ from expectation by under one node.
    assert!(chi < 1e-3, "chi-square {chi}");
}

#[test]
fn encoder_produces_codewords_for_an_irregular_code() {
    let d = initial_distribution(0.3, 5, &OPTIMIZER_DEGREES).unwrap();
    let h = sample_code(&d, 2000, 1).unwrap();
    let enc = SystematicEncoder::new(&h);
    let info: Vec<u8> = (0..enc.dimension()).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
    let c = enc.encode(&info).unwrap();
    assert!(h.is_codeword(&c));
    assert_eq!(enc.extract(&c), info);
}

fn lambda_strategy() -> impl Strategy<Value = Vec<(u32, f64)>> {
    prop::collection::vec(0.0f64..1.0, 9).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| OPTIMIZER_DEGREES.iter().copied().zip(w.iter().map(|x| x / s)).collect())
    })
}

proptest! {
    #[test]
    fn perspective_round_trip(lambda in lambda_strategy(), dc in 3u32..12) {
        let d = DegreeDistribution::with_check_degree(lambda, dc).unwrap();
        let back = d.to_node().to_edge().unwrap();
        for (a, b) in d.lambda().iter().zip(back.lambda()) {
            prop_assert!((a.1 - b.1).abs() < 1e-12);
        }
        prop_assert!((d.design_rate().unwrap() - back.design_rate().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn singleton_check_identity(lambda in lambda_strategy(), dc in 3u32..12) {
        let d = DegreeDistribution::with_check_degree(lambda, dc).unwrap();
        let lhs = 1.0 - d.design_rate().unwrap();
        let rhs = 1.0 / (dc as f64 * d.lambda_inverse_sum());
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}
