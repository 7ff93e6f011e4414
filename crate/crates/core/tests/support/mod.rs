//! Brute-force oracles and property checks shared by the invariant tests and
//! the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use obdp_core::decode::{
    bistack_decode, correlation, stack_decode, viterbi, BistackConfig, BranchMetrics, Direction,
    MergeScope, Schedule,
};
use obdp_core::distance::{bdp, cdf, column_distances, griesmer_bound, is_catastrophic};
use obdp_core::polymat::concat_halves;
use obdp_core::search::{canonical_form, search, SearchConfig};
use obdp_core::simulate::{run, PointReport};
use obdp_core::spectrum::{free_distance, spectra};
use obdp_core::trellis::{encode, pack_block, Encoder};
use obdp_core::{
    DecoderKind, GeneratorMatrix, Permutation, Shortening, SimConfig, SoftFrame, Spectrum128,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 1000;

// ---------------------------------------------------------------- oracles

/// Column distances by enumerating every input sequence with a nonzero
/// first block.
pub fn brute_column_distances(g: &GeneratorMatrix, depth: usize) -> Vec<u32> {
    let enc = Encoder::new(g).unwrap();
    let k = g.k();
    let mut best = vec![u32::MAX; depth + 1];
    let total = 1u64 << (k * (depth + 1));
    for word in 0..total {
        let first = word & ((1 << k) - 1);
        if first == 0 {
            continue;
        }
        let mut s = 0;
        let mut w = 0;
        for (l, b) in best.iter_mut().enumerate() {
            let u = (word >> (l * k)) & ((1 << k) - 1);
            let (next, v) = enc.step(s, u);
            w += v.count_ones();
            s = next;
            *b = (*b).min(w);
        }
    }
    best
}

/// Least output weight needed to reach the zero state from each state, by
/// plain relaxation until nothing changes.
pub fn brute_return_weights(g: &GeneratorMatrix) -> Vec<u32> {
    let enc = Encoder::new(g).unwrap();
    let states = 1usize << enc.state_bits();
    let mut h = vec![u32::MAX; states];
    h[0] = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..states {
            for u in 0..1u64 << g.k() {
                let (next, v) = enc.step(s as u64, u);
                let via = h[next as usize].saturating_add(v.count_ones());
                if via < h[s] {
                    h[s] = via;
                    changed = true;
                }
            }
        }
    }
    h
}

/// Error events leaving the zero state at time 0 and returning within
/// `window` blocks, counted by output weight up to `cap`: `(a, c)` indexed
/// by weight. `None` when a path that could still close with weight
/// `<= cap` is open at the window edge, so the window cannot settle the
/// counts.
pub fn brute_events(g: &GeneratorMatrix, window: usize, cap: u32) -> Option<(Vec<u64>, Vec<u64>)> {
    let enc = Encoder::new(g).unwrap();
    let h = brute_return_weights(g);
    let mut a = vec![0u64; cap as usize + 1];
    let mut c = vec![0u64; cap as usize + 1];
    let inputs = 1u64 << g.k();
    // (state, weight, info weight, depth)
    let mut stack: Vec<(u64, u32, u32, usize)> = Vec::new();
    for u in 1..inputs {
        let (s, v) = enc.step(0, u);
        stack.push((s, v.count_ones(), u.count_ones(), 1));
    }
    while let Some((s, w, iw, depth)) = stack.pop() {
        if w.saturating_add(h[s as usize]) > cap {
            continue;
        }
        if s == 0 {
            a[w as usize] += 1;
            c[w as usize] += u64::from(iw);
            continue;
        }
        if depth == window {
            return None;
        }
        for u in 0..inputs {
            let (ns, v) = enc.step(s, u);
            stack.push((ns, w + v.count_ones(), iw + u.count_ones(), depth + 1));
        }
    }
    Some((a, c))
}

/// Exhaustive maximum-correlation decision over all `2^K` information words.
pub fn exhaustive_ml(g: &GeneratorMatrix, r: &[f64], info_len: usize) -> (Vec<u8>, f64) {
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for word in 0u64..1 << info_len {
        let info: Vec<u8> = (0..info_len).map(|i| ((word >> i) & 1) as u8).collect();
        let cw = encode(g, &info).unwrap().code_bits;
        let score = correlation(&cw, r);
        if score > best.1 {
            best = (info, score);
        }
    }
    best
}

/// Sum of branch metrics of the path with the given code bits.
pub fn path_metric(m: &BranchMetrics<f64>, code_bits: &[u8], n: usize) -> f64 {
    code_bits
        .chunks(n)
        .enumerate()
        .map(|(t, v)| m.get(t, pack_block(v)))
        .sum()
}

/// Observations with the `n`-blocks in reverse order.
pub fn mirror_blocks(r: &[f64], n: usize) -> Vec<f64> {
    r.chunks(n).rev().flat_map(|c| c.iter().copied()).collect()
}

// ------------------------------------------------------------- strategies

fn degree_mask(m: usize) -> u64 {
    (1u64 << (m + 1)) - 1
}

/// Matrices without zero rows for the given shape ranges.
pub fn matrix(
    k: std::ops::RangeInclusive<usize>,
    extra_n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = GeneratorMatrix> {
    (k, extra_n, m)
        .prop_flat_map(|(k, e, m)| {
            let n = k + e;
            (Just((k, n, m)), prop::collection::vec(any::<u64>(), k * n))
        })
        .prop_filter_map("zero row", |((k, n, m), raw)| {
            let polys: Vec<u64> = raw.iter().map(|w| w & degree_mask(m)).collect();
            let g = GeneratorMatrix::new(k, n, m, polys).ok()?;
            (!g.has_zero_row()).then_some(g)
        })
}

pub fn noncatastrophic(
    k: std::ops::RangeInclusive<usize>,
    extra_n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = GeneratorMatrix> {
    matrix(k, extra_n, m).prop_filter("catastrophic", |g| !is_catastrophic(g).unwrap())
}

fn permutation(len: usize) -> impl Strategy<Value = Permutation> {
    Just((0..len).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn permuted(g: GeneratorMatrix) -> impl Strategy<Value = (GeneratorMatrix, Permutation, Permutation)> {
    let (k, n) = (g.k(), g.n());
    (Just(g), permutation(k), permutation(n))
}

fn bits(len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, len)
}

// ----------------------------------------------------------------- runner

pub fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: cases * 50,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

// ------------------------------------------------------------- properties

pub fn text_round_trip(cases: u32) -> Result<(), String> {
    run_property(cases, matrix(1..=3, 1..=3, 0..=20), |g| {
        let text = g.to_string();
        let back: GeneratorMatrix = text.parse().map_err(err)?;
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_string(), text);
        let spectrum = Spectrum128 {
            d_free: g.m() as u32 + 1,
            a: g.polys().iter().map(|&p| u128::from(p)).collect(),
            c: g.polys().iter().map(|&p| u128::from(p) * 3).collect(),
        };
        let parsed: Spectrum128 = spectrum.to_string().parse().map_err(err)?;
        prop_assert_eq!(parsed, spectrum);
        Ok(())
    })
}

pub fn reversal_involution(cases: u32) -> Result<(), String> {
    run_property(cases, matrix(1..=3, 1..=3, 0..=30).prop_flat_map(permuted), |(g, rows, cols)| {
        prop_assert_eq!(&g.reverse().reverse(), &g);
        let a = g.permute(&rows, &cols).map_err(err)?.reverse();
        let b = g.reverse().permute(&rows, &cols).map_err(err)?;
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn concat_prefix(cases: u32) -> Result<(), String> {
    let halves = (1usize..=3, 1usize..=3, 0usize..=6).prop_flat_map(|(k, e, p)| {
        let n = k + e;
        let half = move || {
            prop::collection::vec(any::<u64>(), k * n).prop_map(move |raw| {
                let polys = raw.iter().map(|w| w & degree_mask(p)).collect();
                GeneratorMatrix::new(k, n, p, polys).unwrap()
            })
        };
        (half(), half())
    });
    run_property(cases, halves, |(f, b)| {
        let p = f.m();
        let m = 2 * p + 1;
        let id_r = Permutation::identity(f.k());
        let id_c = Permutation::identity(f.n());
        let g = concat_halves(&f, &b, m, None, &id_r, &id_c).map_err(err)?;
        prop_assert_eq!(g.prefix(p).map_err(err)?, f);
        // the backward half reappears as the prefix of the reverse
        prop_assert_eq!(g.reverse().prefix(p).map_err(err)?, b);
        Ok(())
    })
}

pub fn canonicalizer_idempotent(cases: u32) -> Result<(), String> {
    run_property(cases, matrix(1..=3, 1..=3, 0..=12).prop_flat_map(permuted), |(g, rows, cols)| {
        let s = g.sorted_form();
        prop_assert!(s.has_sorted_rows_cols());
        prop_assert_eq!(&s.sorted_form(), &s);
        let canon = canonical_form(&g);
        prop_assert_eq!(&canonical_form(&canon), &canon);
        prop_assert_eq!(&canonical_form(&g.permute(&rows, &cols).map_err(err)?), &canon);
        prop_assert_eq!(&canonical_form(&g.reverse()), &canon);
        Ok(())
    })
}

pub fn encoder_linearity(cases: u32) -> Result<(), String> {
    let s = matrix(1..=3, 1..=3, 0..=16).prop_flat_map(|g| {
        let k = g.k();
        (Just(g), 0usize..=12).prop_flat_map(move |(g, blocks)| (Just(g), bits(blocks * k), bits(blocks * k)))
    });
    run_property(cases, s, |(g, u, w)| {
        let enc = Encoder::new(&g).map_err(err)?;
        let x: Vec<u8> = u.iter().zip(&w).map(|(a, b)| a ^ b).collect();
        let cu = enc.encode(&u).map_err(err)?.code_bits;
        let cw = enc.encode(&w).map_err(err)?.code_bits;
        let cx = enc.encode(&x).map_err(err)?.code_bits;
        let sum: Vec<u8> = cu.iter().zip(&cw).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(cx, sum);
        // walking the register by hand ends in the zero state
        let k = g.k();
        let mut state = 0;
        for t in 0..u.len() / k + g.m() {
            let block = if t < u.len() / k { pack_block(&u[t * k..(t + 1) * k]) } else { 0 };
            prop_assert_eq!(enc.step(state, block), enc.step(state, block));
            state = enc.next_state(state, block);
        }
        prop_assert_eq!(state, 0);
        Ok(())
    })
}

pub fn profile_monotone(cases: u32) -> Result<(), String> {
    run_property(cases, (matrix(1..=2, 1..=3, 0..=12), 0usize..=24), |(g, depth)| {
        let full = cdf(&g, depth).map_err(err)?.values;
        prop_assert!(full.windows(2).all(|w| w[0] <= w[1]), "{:?}", full);
        for l in 0..=depth {
            prop_assert_eq!(&column_distances(&g, l).map_err(err)?[..], &full[..=l]);
        }
        prop_assert_eq!(&cdf(&g.reverse().reverse(), depth).map_err(err)?.values, &full);
        Ok(())
    })
}

pub fn profile_brute_force(cases: u32) -> Result<(), String> {
    run_property(cases, (matrix(1..=1, 1..=1, 0..=4), 0usize..=3), |(g, extra)| {
        let depth = g.m() + extra;
        let fwd = brute_column_distances(&g, depth);
        prop_assert_eq!(&cdf(&g, depth).map_err(err)?.values, &fwd);
        let rev = brute_column_distances(&g.reverse(), g.m());
        let both: Vec<u32> = fwd[..=g.m()].iter().zip(&rev).map(|(a, b)| *a.min(b)).collect();
        prop_assert_eq!(bdp(&g, 0).map_err(err)?.values, both);
        Ok(())
    })
}

pub fn griesmer_monotone(cases: u32) -> Result<(), String> {
    run_property(cases, (1usize..=4, 1usize..=6, 0usize..=40), |(k, e, m)| {
        let n = k + e;
        let d = griesmer_bound(k, n, m);
        prop_assert!(d <= griesmer_bound(k, n, m + 1));
        prop_assert!(d <= griesmer_bound(k, n + 1, m));
        Ok(())
    })
}

pub fn spectrum_invariance(cases: u32) -> Result<(), String> {
    let s = prop_oneof![noncatastrophic(1..=1, 1..=3, 0..=7), noncatastrophic(2..=2, 1..=2, 0..=3)]
        .prop_flat_map(permuted);
    run_property(cases, s, |(g, rows, cols)| {
        let terms = 6;
        let spec = spectra::<u128>(&g, terms).map_err(err)?;
        prop_assert_eq!(&spectra::<u128>(&g.reverse(), terms).map_err(err)?, &spec);
        let p = g.permute(&rows, &cols).map_err(err)?;
        prop_assert_eq!(&spectra::<u128>(&p, terms).map_err(err)?, &spec);
        prop_assert_eq!(free_distance(&g).map_err(err)?, spec.d_free);
        prop_assert!(u64::from(spec.d_free) <= griesmer_bound(g.k(), g.n(), g.m()));
        prop_assert!(spec.a[0] > 0);
        for (a, c) in spec.a.iter().zip(&spec.c) {
            if *a > 0 {
                prop_assert!(c >= a);
            }
        }
        Ok(())
    })
}

pub fn spectrum_brute_force(cases: u32) -> Result<(), String> {
    run_property(cases, noncatastrophic(1..=2, 1..=2, 0..=4), |g| {
        let terms = 4;
        let spec = spectra::<u128>(&g, terms).map_err(err)?;
        let cap = spec.d_free + terms as u32 - 1;
        // long light events make a finite window inconclusive; those codes
        // are covered by the reversal and permutation checks instead
        if let Some((a, c)) = brute_events(&g, 12, cap) {
            for i in 0..terms {
                let w = spec.d_free as usize + i;
                prop_assert_eq!(spec.a[i], u128::from(a[w]), "a at weight {}", w);
                prop_assert_eq!(spec.c[i], u128::from(c[w]), "c at weight {}", w);
            }
            prop_assert!(a[..spec.d_free as usize].iter().all(|&x| x == 0));
        }
        Ok(())
    })
}

pub fn search_parallel_determinism(cases: u32) -> Result<(), String> {
    let one = pool(1);
    let many = pool(4);
    let params = prop_oneof![
        (Just(1usize), Just(2usize), 1usize..=5),
        (Just(1usize), Just(3usize), 1usize..=3),
        (Just(1usize), Just(4usize), 1usize..=2),
        (Just(2usize), Just(3usize), 1usize..=2),
    ]
    .prop_flat_map(|(k, n, m)| {
        let s = prop_oneof![
            Just(Shortening::Unbounded),
            (0usize..=m.div_ceil(2)).prop_filter_map("range", move |s| {
                (m >= (2 * s).saturating_sub(1).max(1)).then_some(Shortening::By(s))
            }),
        ];
        (Just((k, n, m)), s)
    });
    run_property(cases, params, |((k, n, m), s)| {
        let cfg = SearchConfig::default();
        let a = one.install(|| search::<u128>(k, n, m, s, &cfg)).map_err(err)?;
        let b = many.install(|| search::<u128>(k, n, m, s, &cfg)).map_err(err)?;
        prop_assert_eq!(&a.0, &b.0);
        prop_assert_eq!(&a.1, &b.1);
        prop_assert!(!a.1.is_empty());
        prop_assert!(a.0.members.windows(2).all(|w| w[0].lex_cmp(&w[1]).is_lt()));
        Ok(())
    })
}

pub fn viterbi_ml(cases: u32) -> Result<(), String> {
    let s = matrix(1..=2, 1..=2, 0..=3).prop_flat_map(|g| {
        let k = g.k();
        let blocks = 1..=10 / k;
        (Just(g), blocks, 0.2f64..1.5, any::<u64>())
    });
    run_property(cases, s, |(g, blocks, sigma, seed)| {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let info_len = blocks * g.k();
        let info: Vec<u8> = (0..info_len).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
        let cw = encode(&g, &info).map_err(err)?.code_bits;
        let noise = Normal::new(0.0, sigma).unwrap();
        let r: Vec<f64> = cw.iter().map(|&b| 1.0 - 2.0 * f64::from(b) + noise.sample(&mut rng)).collect();
        let frame = SoftFrame { r, sigma, info_len };
        let out = viterbi(&g, &frame).map_err(err)?;
        prop_assert!(out.metric >= correlation(&cw, &frame.r) - 1e-9);
        let (_, best) = exhaustive_ml(&g, &frame.r, info_len);
        prop_assert!((out.metric - best).abs() < 1e-9);
        let decoded = encode(&g, out.info_bits.as_ref().unwrap()).map_err(err)?.code_bits;
        prop_assert!((correlation(&decoded, &frame.r) - best).abs() < 1e-9);
        Ok(())
    })
}

pub fn sequential_counters(cases: u32) -> Result<(), String> {
    let s = (noncatastrophic(1..=2, 1..=2, 0..=8), 0.3f64..1.0, 2u32..=14, any::<u64>(), any::<bool>());
    run_property(cases, s, |(g, sigma, log_cap, seed, alternate)| {
        use rand::{Rng, SeedableRng};
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let info_len = 16 * g.k();
        let info: Vec<u8> = (0..info_len).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&g, &info).map_err(err)?.code_bits;
        let noise = Normal::new(0.0, sigma).unwrap();
        let r: Vec<f64> = cw.iter().map(|&b| 1.0 - 2.0 * f64::from(b) + noise.sample(&mut rng)).collect();
        let frame = SoftFrame { r, sigma, info_len };
        let cap = 1u64 << log_cap;
        let cfg = BistackConfig {
            max_nodes: cap,
            schedule: if alternate { Schedule::Alternate } else { Schedule::LargerTop },
            merge: MergeScope::Inserted,
            first: if seed & 1 == 0 { Direction::Forward } else { Direction::Backward },
        };
        let rate = g.k() as f64 / g.n() as f64;
        let metrics = BranchMetrics::fano(&frame.r, g.n(), sigma, rate);
        for out in [stack_decode(&g, &frame, cap).map_err(err)?, bistack_decode(&g, &frame, &cfg).map_err(err)?] {
            prop_assert!(out.extended <= out.inserted && out.inserted <= cap);
            prop_assert_eq!(out.failed, out.info_bits.is_none());
            if let Some(bits) = &out.info_bits {
                prop_assert_eq!(bits.len(), info_len);
                let path = encode(&g, bits).map_err(err)?.code_bits;
                let m = path_metric(&metrics, &path, g.n());
                prop_assert!((m - out.metric).abs() < 1e-6, "{} vs {}", m, out.metric);
            }
        }
        Ok(())
    })
}

/// Palindromic rate `1/n` codes equal their own reverse, so decoding the
/// block-reversed observations with the tie preference swapped must give
/// the reversed information word after the same amount of work.
pub fn bistack_mirror_symmetry(cases: u32) -> Result<(), String> {
    let code = (1usize..=3, 1usize..=8)
        .prop_flat_map(|(e, m)| (Just((e + 1, m)), prop::collection::vec(any::<u64>(), e + 1)))
        .prop_filter_map("palindrome", |((n, m), raw)| {
            let polys = raw
                .iter()
                .map(|&w| {
                    let mut p = 1 | 1 << m;
                    for l in 1..=m / 2 {
                        if (w >> l) & 1 == 1 {
                            p |= 1 << l | 1 << (m - l);
                        }
                    }
                    p
                })
                .collect();
            let g = GeneratorMatrix::new(1, n, m, polys).ok()?;
            (g.reverse() == g && !is_catastrophic(&g).ok()?).then_some(g)
        });
    let config = (
        prop::sample::select(vec![Schedule::LargerTop, Schedule::Alternate]),
        prop::sample::select(vec![MergeScope::Inserted, MergeScope::Extended]),
    );
    run_property(cases, (code, 0.3f64..0.8, any::<u64>(), config), |(g, sigma, seed, (schedule, merge))| {
        use rand::{Rng, SeedableRng};
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u8> = (0..24).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&g, &info).map_err(err)?.code_bits;
        let noise = Normal::new(0.0, sigma).unwrap();
        let r: Vec<f64> = cw.iter().map(|&b| 1.0 - 2.0 * f64::from(b) + noise.sample(&mut rng)).collect();
        let frame = SoftFrame { r: r.clone(), sigma, info_len: 24 };
        let mirrored = SoftFrame { r: mirror_blocks(&r, g.n()), sigma, info_len: 24 };
        let cfg = BistackConfig { max_nodes: 1 << 12, schedule, merge, first: Direction::Forward };
        let swapped = BistackConfig { first: Direction::Backward, ..cfg };
        let a = bistack_decode(&g, &frame, &cfg).map_err(err)?;
        let b = bistack_decode(&g, &mirrored, &swapped).map_err(err)?;
        prop_assert_eq!(a.failed, b.failed);
        prop_assert_eq!((a.inserted, a.extended), (b.inserted, b.extended));
        if let (Some(x), Some(y)) = (&a.info_bits, &b.info_bits) {
            let flipped: Vec<u8> = x.iter().rev().copied().collect();
            prop_assert_eq!(&flipped, y);
            prop_assert!((a.metric - b.metric).abs() < 1e-9);
        }
        Ok(())
    })
}

pub fn simulation_parallel_determinism(cases: u32) -> Result<(), String> {
    let one = pool(1);
    let many = pool(3);
    let s = (
        prop::sample::select(vec!["1 2 2 : 5 7", "1 2 3 : 54 64", "1 3 2 : 5 7 7", "2 3 1 : 2 6 4 4 2 6"]),
        0usize..3,
        -1.0f64..5.0,
        any::<u64>(),
        1u64..40,
    );
    run_property(cases, s, |(code, dec, snr, seed, frames)| {
        let g: GeneratorMatrix = code.parse().map_err(err)?;
        let decoder = match dec {
            0 => DecoderKind::Viterbi,
            1 => DecoderKind::Stack { max_nodes: 1 << 9 },
            _ => DecoderKind::Bistack(BistackConfig::new(1 << 9)),
        };
        let mut cfg = SimConfig::new(g, decoder, vec![snr, snr + 1.0]);
        cfg.info_len = 32;
        cfg.max_frames = frames;
        cfg.seed = seed;
        cfg.chunk = 7;
        let a = one.install(|| run::<f64>(&cfg)).map_err(err)?;
        let b = many.install(|| run::<f64>(&cfg)).map_err(err)?;
        prop_assert_eq!(&a, &b);
        cfg.chunk = 64;
        let c = many.install(|| run::<f64>(&cfg)).map_err(err)?;
        prop_assert_eq!(&a, &c);
        Ok(())
    })
}

pub fn tail_monotone(cases: u32) -> Result<(), String> {
    let hist = || prop::collection::btree_map(1u64..500, 1u64..20, 0..12);
    run_property(cases, (hist(), hist(), 0u64..5), |(correct_x, truncated_x, wrong)| {
        let frames = correct_x.values().sum::<u64>() + truncated_x.values().sum::<u64>() + wrong;
        let failures = truncated_x.values().sum::<u64>();
        let p = PointReport {
            snr_db: 0.0,
            sigma: 1.0,
            frames,
            errors: failures + wrong,
            failures,
            correct_x: correct_x.clone(),
            truncated_x: truncated_x.clone(),
        };
        let tail = p.tail();
        for w in tail.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
            prop_assert!(w[1].1 <= w[0].1 && w[1].2 <= w[0].2);
        }
        for &(_, lo, hi) in &tail {
            prop_assert!((0.0..=1.0).contains(&lo) && lo <= hi && hi <= 1.0);
        }
        if let Some(&(_, _, hi)) = tail.first() {
            prop_assert!((hi - 1.0).abs() < 1e-12);
        }
        let keys: BTreeMap<u64, ()> = correct_x.keys().chain(truncated_x.keys()).map(|&x| (x, ())).collect();
        prop_assert_eq!(tail.len(), keys.len());
        Ok(())
    })
}

pub type Property = (&'static str, fn(u32) -> Result<(), String>);

pub const PROPERTIES: &[Property] = &[
    ("text round trip", text_round_trip),
    ("reversal involution", reversal_involution),
    ("half concatenation prefix", concat_prefix),
    ("canonicalizer idempotence", canonicalizer_idempotent),
    ("encoder linearity and termination", encoder_linearity),
    ("profile monotonicity and stability", profile_monotone),
    ("profile brute force", profile_brute_force),
    ("griesmer monotonicity", griesmer_monotone),
    ("spectrum reversal and permutation invariance", spectrum_invariance),
    ("spectrum brute force", spectrum_brute_force),
    ("search parallel determinism", search_parallel_determinism),
    ("viterbi maximum likelihood", viterbi_ml),
    ("sequential decoder counters", sequential_counters),
    ("bistack mirror symmetry", bistack_mirror_symmetry),
    ("simulation parallel determinism", simulation_parallel_determinism),
    ("complexity tail monotonicity", tail_monotone),
];
