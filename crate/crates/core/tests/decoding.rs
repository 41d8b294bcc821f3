use gic_ldpc_core::decoder::{
    bpsk_llr, decode_p2p, joint_decode, joint_decode_with_tap, BpDecoder, FiniteCodes, JointDecoderConfig,
    ReceiverView, StateNode, TapStage,
};
use gic_ldpc_core::ensemble::{sample_code, DegreeDistribution, SystematicEncoder};
use gic_ldpc_core::gic::{transmit, ChannelGains, GicParameters, Message, User};
use rand::Rng;

fn random_codeword(enc: &SystematicEncoder, seed: u64) -> Vec<u8> {
    let mut rng = gic_ldpc_core::rng::substream(seed, &[1]);
    let info: Vec<u8> = (0..enc.dimension()).map(|_| rng.random_range(0..2)).collect();
    enc.encode(&info).unwrap()
}

#[test]
fn regular_code_is_error_free_well_above_threshold() {
    let h = sample_code(&DegreeDistribution::regular(3, 6).unwrap(), 10_000, 2).unwrap();
    let enc = SystematicEncoder::new(&h);
    // Threshold is near -1.9 dB; run at +0.5 dB.
    let p = GicParameters::new(
        ChannelGains {
            h11: 1.0,
            h12: 0.0,
            h21: 0.0,
            h22: 1.0,
        },
        [1.0, 1.0],
        1.0 / gic_ldpc_core::gic::db_to_linear(0.5),
        [0.0, 0.0],
    )
    .unwrap();
    let amp = p.message_amplitude(Message::W1);
    let mut errors = 0;
    for b in 0..100 {
        let c = random_codeword(&enc, b);
        let block = transmit(&p, [None, Some(&c), None, Some(&c)], 1000 + b).unwrap();
        let ch: Vec<f64> = block.y[0].iter().map(|&y| bpsk_llr(y, amp, p.n0())).collect();
        let (hard, _) = decode_p2p(&h, &ch, 100);
        errors += hard.iter().zip(&c).filter(|(a, b)| a != b).count();
    }
    assert_eq!(errors, 0);
}

#[test]
fn zero_cross_gains_decouple_both_receivers() {
    let h = sample_code(&DegreeDistribution::regular(3, 6).unwrap(), 2000, 8).unwrap();
    let enc = SystematicEncoder::new(&h);
    let p = GicParameters::new(
        ChannelGains {
            h11: 0.9,
            h12: 0.0,
            h21: 0.0,
            h22: 1.1,
        },
        [1.0, 1.0],
        1.4,
        [0.0, 0.0],
    )
    .unwrap();
    let c1 = random_codeword(&enc, 1);
    let c2 = random_codeword(&enc, 2);
    let block = transmit(&p, [None, Some(&c1), None, Some(&c2)], 3).unwrap();
    let cfg = JointDecoderConfig {
        early_stop: false,
        rounds_max: 20,
        ..Default::default()
    };
    for (rx, m) in [(User::One, Message::W1), (User::Two, Message::W2)] {
        let mut codes: FiniteCodes = [None; 4];
        codes[m.index()] = Some(&h);
        let out = joint_decode(ReceiverView::from_block(&block, rx), &codes, &p, rx, &cfg).unwrap();
        let node = StateNode::new(&p, rx);
        let ch: Vec<f64> = block.received(rx).iter().map(|&y| node.llr(y, &[0.0; 4], m)).collect();
        let mut solo = BpDecoder::new(&h);
        let res = solo.round(&ch, out.iterations);
        assert_eq!(out.posteriors[0].1, res.posterior);
        assert_eq!(out.decision(m).unwrap(), res.hard.as_slice());
    }
}

#[test]
fn noiseless_weak_channel_recovers_all_three_messages() {
    let h = sample_code(&DegreeDistribution::regular(3, 6).unwrap(), 600, 4).unwrap();
    let enc = SystematicEncoder::new(&h);
    let p = GicParameters::from_db([6.0, 6.0], [3.0, 3.0], [0.2, 0.2])
        .unwrap()
        .with_n0(1e-7)
        .unwrap();
    let words: Vec<Vec<u8>> = (0..4).map(|k| random_codeword(&enc, 20 + k)).collect();
    let block = transmit(
        &p,
        [Some(&words[0]), Some(&words[1]), Some(&words[2]), Some(&words[3])],
        5,
    )
    .unwrap();
    let codes: FiniteCodes = [Some(&h), Some(&h), None, Some(&h)];
    let out = joint_decode(
        ReceiverView::from_block(&block, User::One),
        &codes,
        &p,
        User::One,
        &Default::default(),
    )
    .unwrap();
    assert!(out.converged && out.rounds <= 2);
    for m in [Message::U1, Message::W1, Message::W2] {
        assert_eq!(out.decision(m).unwrap(), words[m.index()].as_slice());
    }
}

#[test]
fn trace_is_mostly_monotone_on_converging_blocks() {
    // Independent graphs per message; a shared matrix creates 4-cycles
    // through the state nodes.
    let h = sample_code(&DegreeDistribution::regular(3, 6).unwrap(), 4000, 6).unwrap();
    let h2 = sample_code(&DegreeDistribution::regular(3, 6).unwrap(), 4000, 16).unwrap();
    let enc = SystematicEncoder::new(&h);
    let enc2 = SystematicEncoder::new(&h2);
    let p = GicParameters::symmetric(1.0, 2.0, 0.0)
        .unwrap()
        .with_snr1_db(0.5)
        .unwrap();
    let cfg = JointDecoderConfig {
        inner_iters: 1,
        rounds_max: 200,
        ..Default::default()
    };
    let (mut converging, mut monotone) = (0, 0);
    for b in 0..20 {
        let c1 = random_codeword(&enc, 100 + b);
        let c2 = random_codeword(&enc2, 200 + b);
        let block = transmit(&p, [None, Some(&c1), None, Some(&c2)], 300 + b).unwrap();
        let codes: FiniteCodes = [None, Some(&h), None, Some(&h2)];
        let out = joint_decode(ReceiverView::from_block(&block, User::One), &codes, &p, User::One, &cfg).unwrap();
        if !out.converged {
            continue;
        }
        converging += 1;
        let ok = [Message::W1, Message::W2].iter().all(|&m| {
            let mi: Vec<f64> = out
                .trace
                .iter()
                .filter(|r| r.message == m)
                .map(|r| r.i_vnd_to_state.unwrap())
                .collect();
            mi.windows(2).all(|w| w[1] >= w[0] - 1e-3)
        });
        monotone += ok as usize;
    }
    assert!(converging >= 10, "{converging}");
    assert!(monotone as f64 >= 0.95 * converging as f64, "{monotone}/{converging}");
}

#[test]
fn tap_reports_every_stage_each_round() {
    let h = sample_code(&DegreeDistribution::regular(3, 6).unwrap(), 300, 9).unwrap();
    let enc = SystematicEncoder::new(&h);
    let p = GicParameters::symmetric(1.0, 2.0, 0.0).unwrap();
    let c = random_codeword(&enc, 1);
    let block = transmit(&p, [None, Some(&c), None, Some(&c)], 2).unwrap();
    let codes: FiniteCodes = [None, Some(&h), None, Some(&h)];
    let mut seen = Vec::new();
    let cfg = JointDecoderConfig {
        rounds_max: 3,
        early_stop: false,
        ..Default::default()
    };
    joint_decode_with_tap(
        ReceiverView::from_block(&block, User::One),
        &codes,
        &p,
        User::One,
        &cfg,
        &mut |e| {
            let len = match e.stage {
                TapStage::VariableToCheck | TapStage::CheckToVariable => h.num_edges(),
                _ => h.n(),
            };
            assert_eq!(e.llrs.len(), len);
            seen.push((e.round, e.message, e.stage));
        },
    )
    .unwrap();
    assert_eq!(seen.len(), 3 * 2 * 4);
}
