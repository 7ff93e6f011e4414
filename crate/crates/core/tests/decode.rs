use obdp_core::decode::{
    bistack_decode, correlation, stack_decode, viterbi, BistackConfig, Direction, MergeScope, Schedule,
    SoftFrame,
};
use obdp_core::trellis::encode;
use obdp_core::GeneratorMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn g(line: &str) -> GeneratorMatrix {
    line.parse().unwrap()
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.random_range(0..2u8)).collect()
}

fn noisy(code_bits: &[u8], sigma: f64, info_len: usize, rng: &mut ChaCha8Rng) -> SoftFrame<f64> {
    let normal = Normal::new(0.0, sigma).unwrap();
    let r = code_bits
        .iter()
        .map(|&b| if b == 0 { 1.0 } else { -1.0 } + normal.sample(rng))
        .collect();
    SoftFrame { r, sigma, info_len }
}

#[test]
fn viterbi_is_maximum_likelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for code in ["1 2 2 : 5 7", "1 2 3 : 54 64", "2 3 1 : 2 6 4 4 2 6"] {
        let code = g(code);
        let k_bits = 8;
        let codewords: Vec<(Vec<u8>, Vec<u8>)> = (0u32..1 << k_bits)
            .map(|w| {
                let info: Vec<u8> = (0..k_bits).map(|i| ((w >> i) & 1) as u8).collect();
                let cw = encode(&code, &info).unwrap().code_bits;
                (info, cw)
            })
            .collect();
        for _ in 0..50 {
            let info = random_bits(&mut rng, k_bits);
            let cw = encode(&code, &info).unwrap().code_bits;
            let frame = noisy(&cw, 0.9, k_bits, &mut rng);
            let out = viterbi(&code, &frame).unwrap();
            let best = codewords
                .iter()
                .map(|(_, c)| correlation(c, &frame.r))
                .fold(f64::NEG_INFINITY, f64::max);
            let decoded = encode(&code, out.info_bits.as_ref().unwrap()).unwrap().code_bits;
            assert!((correlation(&decoded, &frame.r) - best).abs() < 1e-9);
            assert!((out.metric - best).abs() < 1e-9);
        }
    }
}

#[test]
fn noiseless_frames_decode_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for code in [
        "1 2 6 : 554 744",
        "1 2 31 : 51703207732 66455246536",
        "2 3 9 : 0070 5664 7244 4624 3344 7700",
    ] {
        let code = g(code);
        let info = random_bits(&mut rng, 224);
        let cw = encode(&code, &info).unwrap().code_bits;
        let frame = SoftFrame::noiseless(&cw, 0.5, 224);
        let blocks = (224 / code.k() + code.m()) as u64;
        let sa = stack_decode(&code, &frame, 1 << 26).unwrap();
        assert_eq!(sa.info_bits.as_ref(), Some(&info));
        assert_eq!(sa.extended, blocks);
        for schedule in [Schedule::LargerTop, Schedule::Alternate] {
            for merge in [MergeScope::Inserted, MergeScope::Extended] {
                let cfg = BistackConfig {
                    max_nodes: 1 << 26,
                    schedule,
                    merge,
                    first: Direction::Forward,
                };
                let bsa = bistack_decode(&code, &frame, &cfg).unwrap();
                assert_eq!(bsa.info_bits.as_ref(), Some(&info), "{schedule:?} {merge:?}");
                // matching extended nodes only needs one extra node per tree
                let slack = if merge == MergeScope::Extended { 2 } else { 0 };
                assert!(bsa.extended <= sa.extended + slack, "{} vs {}", bsa.extended, sa.extended);
                assert!(bsa.extended <= bsa.inserted);
            }
        }
    }
}

#[test]
fn tree_cap_is_enforced() {
    let code = g("1 2 2 : 5 7");
    let cw = encode(&code, &[1, 0, 1, 1]).unwrap().code_bits;
    let frame = SoftFrame::noiseless(&cw, 0.5, 4);
    let out = stack_decode(&code, &frame, 1).unwrap();
    assert!(out.failed && out.info_bits.is_none());
    assert_eq!(out.inserted, 1);
    let out = bistack_decode(&code, &frame, &BistackConfig::new(2)).unwrap();
    assert!(out.failed);
    assert!(bistack_decode(&code, &frame, &BistackConfig::new(1)).is_err());
}

#[test]
fn sequential_decoders_return_codewords_under_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let code = g("1 2 12 : 53734 72304");
    for _ in 0..30 {
        let info = random_bits(&mut rng, 64);
        let cw = encode(&code, &info).unwrap().code_bits;
        let frame = noisy(&cw, 0.8, 64, &mut rng);
        for out in [
            stack_decode(&code, &frame, 1 << 20).unwrap(),
            bistack_decode(&code, &frame, &BistackConfig::new(1 << 20)).unwrap(),
        ] {
            assert!(out.extended <= out.inserted && out.inserted <= 1 << 20);
            if let Some(bits) = out.info_bits {
                // the reported metric is that of the re-encoded path
                let recw = encode(&code, &bits).unwrap().code_bits;
                let m = obdp_core::decode::BranchMetrics::fano(&frame.r, 2, frame.sigma, 0.5);
                let total: f64 = recw
                    .chunks(2)
                    .enumerate()
                    .map(|(t, v)| m.get(t, u64::from(v[0]) | u64::from(v[1]) << 1))
                    .sum();
                assert!((total - out.metric).abs() < 1e-6, "{total} vs {}", out.metric);
            }
        }
    }
}
