use gic_ldpc_core::gic::{ChannelGains, GicParameters, InterferenceClass, User};
use gic_ldpc_core::region::{
    alpha_grid, hk_subregion, mac_mutual_informations, mac_mutual_informations_mc, ts_regions, RatePoint, Signaling,
    SplitRatePolytope, SubregionOptions, TsMode,
};

/// `I(X; Y)` for equiprobable points in Gaussian noise, by trapezoid rule.
fn constellation_mi(points: &[f64], sigma: f64) -> f64 {
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min) - 12.0 * sigma;
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 12.0 * sigma;
    let steps = 40_000;
    let h = (hi - lo) / steps as f64;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut hy = 0.0;
    for k in 0..=steps {
        let y = lo + k as f64 * h;
        let f: f64 = points
            .iter()
            .map(|&x| norm * (-(y - x).powi(2) / (2.0 * sigma * sigma)).exp())
            .sum::<f64>()
            / points.len() as f64;
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        if f > 0.0 {
            hy -= w * h * f * f.log2();
        }
    }
    let hn = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).log2();
    hy - hn
}

fn bpsk(a: f64, sigma: f64) -> f64 {
    constellation_mi(&[a, -a], sigma)
}

fn pair(a: f64, b: f64, sigma: f64) -> f64 {
    constellation_mi(&[a + b, a - b, -a + b, -a - b], sigma)
}

#[test]
fn zero_cross_gains_give_a_rectangle() {
    let p = GicParameters::new(
        ChannelGains {
            h11: 1.0,
            h12: 0.0,
            h21: 0.0,
            h22: 0.8,
        },
        [1.5, 1.0],
        1.0,
        [0.0, 0.0],
    )
    .unwrap();
    let sigma = p.noise_variance().sqrt();
    let c1 = bpsk(1.5f64.sqrt(), sigma);
    let c2 = bpsk(0.8, sigma);
    let curve = hk_subregion(&p, &[[0.0, 0.0]], SubregionOptions::default()).unwrap();
    assert!((curve.max_r1() - c1).abs() < 0.005);
    assert!((curve.max_r2() - c2).abs() < 0.005);
    assert!(curve.contains(RatePoint::new(c1, c2), 0.005));
    assert!(!curve.contains(RatePoint::new(c1 + 0.02, c2), 0.005));
    assert!(!curve.contains(RatePoint::new(c1, c2 + 0.02), 0.005));
}

#[test]
fn strong_channel_reaches_the_compound_mac_corners() {
    let p = GicParameters::from_db([3.0, 2.0], [7.0, 6.5], [0.0, 0.0]).unwrap();
    assert_eq!(p.classify().class, InterferenceClass::Strong);
    let sigma = p.noise_variance().sqrt();
    let g = p.gains();
    let (a1, a2) = (p.power(User::One).sqrt(), p.power(User::Two).sqrt());
    // Receiver 1 sees (h11 a1, h21 a2); receiver 2 sees (h12 a1, h22 a2).
    let r1_max = bpsk(g.h11 * a1, sigma).min(bpsk(g.h12 * a1, sigma));
    let r2_max = bpsk(g.h21 * a2, sigma).min(bpsk(g.h22 * a2, sigma));
    let sum = pair(g.h11 * a1, g.h21 * a2, sigma).min(pair(g.h12 * a1, g.h22 * a2, sigma));
    let corners = [
        RatePoint::new(r1_max, (sum - r1_max).min(r2_max)),
        RatePoint::new((sum - r2_max).min(r1_max), r2_max),
    ];
    let curve = hk_subregion(&p, &[[0.0, 0.0]], SubregionOptions::default()).unwrap();
    for c in corners {
        assert!(curve.contains(c, 0.005), "{c:?}");
        assert!(
            !curve.contains(RatePoint::new(c.r1 + 0.01, c.r2 + 0.01), 0.002),
            "{c:?}"
        );
    }
}

#[test]
fn union_dominates_each_allocation() {
    let p = GicParameters::from_db([4.0, 4.0], [1.0, 1.0], [0.0, 0.0]).unwrap();
    let grid = alpha_grid(&[0.0, 0.25, 0.5, 0.75, 1.0]);
    let union = hk_subregion(&p, &grid, SubregionOptions::default()).unwrap();
    assert!(union.is_monotone());
    for &a in &grid {
        let q = p.with_alphas(a).unwrap();
        let slice = SplitRatePolytope::new(&q, SubregionOptions::default()).projected_boundary();
        for pt in slice {
            assert!(union.contains(pt, 1e-9), "{a:?} {pt:?}");
        }
    }
}

#[test]
fn dropping_the_interferer_public_bound_only_enlarges() {
    let p = GicParameters::from_db([4.0, 4.0], [2.0, 2.0], [0.0, 0.0]).unwrap();
    let grid = alpha_grid(&[0.0, 0.5, 1.0]);
    let kept = hk_subregion(&p, &grid, SubregionOptions::default()).unwrap();
    let dropped = hk_subregion(
        &p,
        &grid,
        SubregionOptions {
            keep_interferer_public: false,
        },
    )
    .unwrap();
    assert!(dropped.dominates(&kept, 1e-9));
}

#[test]
fn sampled_mac_constants_agree_with_quadrature() {
    let p = GicParameters::from_db([3.0, 5.0], [1.0, 2.0], [0.4, 0.6]).unwrap();
    for rx in User::BOTH {
        let q = mac_mutual_informations(&p, rx);
        let mc = mac_mutual_informations_mc(&p, rx, 200_000, 9);
        for (a, b) in q.values.iter().zip(&mc.values) {
            assert!((a - b).abs() < 0.005, "{a} vs {b}");
        }
    }
}

#[test]
fn time_sharing_lies_inside_the_subregion() {
    let p = GicParameters::from_db([3.0, 3.0], [6.0, 6.0], [0.0, 0.0]).unwrap();
    let hk = hk_subregion(&p, &alpha_grid(&[0.0, 0.5, 1.0]), SubregionOptions::default()).unwrap();
    let naive = ts_regions(&p, TsMode::Naive, Signaling::Bpsk, 50);
    assert!(hk.dominates(&naive, 0.005));
    let pooled = ts_regions(&p, TsMode::NonNaive, Signaling::Bpsk, 25);
    assert!(pooled.dominates(&naive, 1e-9));
}
