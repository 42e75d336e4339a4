use marc_core::infotheory::{JointPmf, Variable};
use marc_core::network::*;
use marc_core::sim::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Probability that `n` i.i.d. draws from `p` are strongly typical, by
/// summing the multinomial over every count vector.
fn typical_probability(p: &[f64], n: usize, tol: f64) -> f64 {
    fn go(p: &[f64], n: usize, tol: f64, left: usize, counts: &mut Vec<usize>, acc: &mut f64) {
        if counts.len() == p.len() - 1 {
            counts.push(left);
            let ok = counts.iter().zip(p).all(|(&k, &q)| (k as f64 / n as f64 - q).abs() <= tol && (k > 0 || q <= tol));
            if ok {
                let lp = ln_factorial(n)
                    + counts.iter().zip(p).map(|(&k, &q)| k as f64 * q.ln() - ln_factorial(k)).sum::<f64>();
                *acc += lp.exp();
            }
            counts.pop();
            return;
        }
        for k in 0..=left {
            counts.push(k);
            go(p, n, tol, left - k, counts, acc);
            counts.pop();
        }
    }
    let mut acc = 0.0;
    go(p, n, tol, n, &mut Vec::new(), &mut acc);
    acc
}

#[test]
fn typicality_rate_matches_multinomial() {
    let probs = vec![0.37, 0.13, 0.21, 0.29];
    let reference = JointPmf::new(vec![Variable::new("A", 2), Variable::new("B", 2)], probs.clone()).unwrap();
    let (n, eps, draws) = (12, 0.2, 10_000);
    let exact = typical_probability(&probs, n, eps / 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut hits = 0;
    for _ in 0..draws {
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let cell = probs.iter().position(|&q| {
                acc += q;
                u < acc
            });
            let cell = cell.unwrap_or(3);
            a.push(cell / 2);
            b.push(cell % 2);
        }
        if is_jointly_typical(&[&a, &b], &reference, eps).unwrap() {
            hits += 1;
        }
    }
    let rate = hits as f64 / draws as f64;
    assert!((rate - exact).abs() <= 0.02, "empirical {rate}, exact {exact}");
    assert!(exact > 0.05);
}

fn thm2_chain() -> Thm2Chain {
    Thm2Chain::from_tables(
        [2, 2],
        [3, 2, 2],
        vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.1, 0.8]],
        vec![vec![0.6, 0.4], vec![0.25, 0.75]],
        vec![vec![0.5, 0.5]; 4],
    )
    .unwrap()
}

#[test]
fn codeword_letters_follow_the_kernel() {
    let chain = thm2_chain();
    let books = Codebooks::new(&chain, [4, 4]);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut counts = [[0usize; 3]; 2];
    let mut letters = 0;
    while letters < 100_000 {
        let book = books.keyed(rng.gen());
        let s1: Vec<usize> = (0..50).map(|_| rng.gen_range(0..2)).collect();
        let word = book.x1_word(rng.gen_range(0..4), &s1);
        for (s, x) in s1.iter().zip(&word) {
            counts[*s][*x] += 1;
        }
        letters += s1.len();
    }
    let rows = [[0.5, 0.3, 0.2], [0.1, 0.1, 0.8]];
    for (row, count) in rows.iter().zip(&counts) {
        let total: usize = count.iter().sum();
        let tv: f64 = row.iter().zip(count).map(|(p, &c)| (c as f64 / total as f64 - p).abs()).sum::<f64>() / 2.0;
        assert!(tv <= 0.01, "{tv}");
    }
}

#[test]
fn bin_occupancy_is_uniform() {
    let bins = 16;
    let books = Codebooks::new(&thm2_chain(), [bins, bins]);
    let book = books.keyed(0xDEAD_BEEF);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut occupancy = vec![0usize; bins];
    let draws = 100_000;
    for _ in 0..draws {
        // 40-letter sequences: repeats are vanishingly rare
        let s: Vec<usize> = (0..40).map(|_| rng.gen_range(0..2)).collect();
        occupancy[book.bin1(&s)] += 1;
    }
    let expected = draws as f64 / bins as f64;
    let stat: f64 = occupancy.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
    assert!(stat < critical, "chi-square {stat} >= {critical}");
}

fn perfect_binary_channel() -> ChannelModel {
    let inputs = [2, 2, 2];
    deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 8, |a, b, c| a * 4 + b * 2 + c),
        &SymbolMap::from_fn(inputs, 4, |a, b, _| a * 2 + b),
    )
    .unwrap()
}

fn uniform_chain() -> Thm2Chain {
    let half = vec![0.5, 0.5];
    Thm2Chain::from_tables([2, 2], [2, 2, 2], vec![half.clone(); 2], vec![half.clone(); 2], vec![half; 4]).unwrap()
}

#[test]
fn point_mass_sources_never_fail() {
    let source = SourceModel::point_mass([2, 2, 1, 1], [1, 0, 0, 0]).unwrap();
    // a single bin per source; n is long enough that the uniform inputs
    // are typical in practically every block
    let cfg = SimConfig { n: 48, rate1: 0.0, rate2: 0.0, trials: 50, ..SimConfig::default() };
    let r = run_thm2_sim(&source, &perfect_binary_channel(), &uniform_chain(), cfg).unwrap();
    assert_eq!(r.session_errors, 0);
    assert_eq!(r.relay_block_errors + r.dest_block_errors, 0);
}

#[test]
fn zero_capacity_channel_fails_at_least_half_the_time() {
    let (source, _) = somarc_example::<f64>();
    let inputs = [2, 2, 2];
    let zero = SymbolMap::from_fn(inputs, 1, |_, _, _| 0);
    let channel = deterministic_channel(inputs, &zero, &zero).unwrap();
    for n in [4, 8] {
        let cfg = SimConfig { n, trials: 60, ..SimConfig::default() };
        let r = run_thm2_sim(&source, &channel, &uniform_chain(), cfg).unwrap();
        assert!(r.session_error_rate() >= 0.5, "n = {n}: {}", r.session_error_rate());
    }
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let (source, channel) = somarc_example::<f64>();
    let chain = Thm2Chain::cpm_identity([2, 2], 2).unwrap();
    let cfg = SimConfig { n: 6, trials: 40, seed: 99, ..SimConfig::default() };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_thm2_sim_traced(&source, &channel, &chain, cfg).unwrap())
    };
    let (a, ta) = run(1);
    let (b, tb) = run(4);
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    assert_eq!(a.trials, 40);
}

#[test]
fn rate_hint_examples() {
    // W3 = S1 leaves only S2 for the relay's source decoder
    let source = SourceModel::from_entries(
        [2, 2, 1, 2],
        &[([0, 0, 0, 0], 0.25), ([0, 1, 0, 0], 0.25), ([1, 0, 0, 1], 0.25), ([1, 1, 0, 1], 0.25)],
    )
    .unwrap();
    let h = sw_rate_hint(&source, 0.05).unwrap();
    assert!((h.rate1 - 0.05).abs() < 1e-12);
    assert!((h.rate2 - 1.05).abs() < 1e-12);
    assert!((h.sum_required - 1.1).abs() < 1e-12);
    assert!(h.sum_ok);
}

#[test]
fn config_validation() {
    let ok = SimConfig::default();
    assert!(ok.validate().is_ok());
    for bad in [
        SimConfig { n: 0, ..ok },
        SimConfig { blocks: 0, ..ok },
        SimConfig { epsilon: 0.0, ..ok },
        SimConfig { rate1: -1.0, ..ok },
        SimConfig { trials: 0, ..ok },
    ] {
        assert!(matches!(bad.validate(), Err(marc_core::Error::InvalidConfig(_))), "{bad:?}");
    }
    let big = SimConfig { n: 20, rate1: 1.0, rate2: 1.0, ..ok };
    assert!(matches!(big.validate(), Err(marc_core::Error::BudgetExceeded(_))));
}

#[test]
fn uncoded_cpm_is_error_free() {
    let r = run_uncoded_cpm_somarc(200_000, DEFAULT_SEED);
    assert_eq!(r.errors, 0);
    assert_eq!(r.wilson_interval().0, 0.0);
}

#[test]
#[ignore = "measures about 0.64: at n = 8 atypical source blocks and bin collisions dominate"]
fn perfect_channels_reach_low_error_at_short_blocks() {
    let (source, _) = somarc_example::<f64>();
    let inputs = [4, 4, 4];
    let channel = deterministic_channel(
        inputs,
        &SymbolMap::from_fn(inputs, 64, |a, b, c| a * 16 + b * 4 + c),
        &SymbolMap::from_fn(inputs, 16, |a, b, _| a * 4 + b),
    )
    .unwrap();
    let q = vec![0.25; 4];
    let chain = Thm2Chain::from_tables([2, 2], inputs, vec![q.clone(); 2], vec![q.clone(); 2], vec![q; 4]).unwrap();
    let cfg = SimConfig { n: 8, blocks: 2, rate1: 1.0, rate2: 1.0, epsilon: 0.3, trials: 200, ..SimConfig::default() };
    let r = run_thm2_sim(&source, &channel, &chain, cfg).unwrap();
    assert!(r.session_error_rate() <= 0.2, "{}", r.session_error_rate());
}
