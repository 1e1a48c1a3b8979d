//! Independent oracles for the sampling, augmentation and scoring code.

use augforge::analysis::Method;
use augforge::augment::{sample_beta, sample_gamma, splice_out, SeededSource, SpliceConfig};
use augforge::bench::augment_corpus;
use augforge::evalstats::{align_wer, ErrorCounts};
use augforge::signal_io::Matrix;
use augforge::synth::random_walk_corpus;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (((i + 1) as f64 / n) - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

#[test]
fn beta_one_is_uniform() {
    let mut rng = SeededSource::new(2718);
    let xs: Vec<f64> = (0..100_000).map(|_| sample_beta(&mut rng, 1.0)).collect();
    let d = ks_uniform(xs);
    assert!(d < 0.01, "KS statistic {d}");
}

#[test]
fn beta_moments_for_small_alpha() {
    for alpha in [0.2f64, 0.4, 2.0] {
        let mut rng = SeededSource::new(alpha.to_bits());
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_beta(&mut rng, alpha)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let expect_var = 1.0 / (4.0 * (2.0 * alpha + 1.0));
        assert!((mean - 0.5).abs() < 0.005, "alpha {alpha}: mean {mean}");
        assert!((var / expect_var - 1.0).abs() < 0.02, "alpha {alpha}: var {var} vs {expect_var}");
    }
}

#[test]
fn gamma_moments() {
    for shape in [0.3, 1.0, 4.5] {
        let mut rng = SeededSource::new(99);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_gamma(&mut rng, shape)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean / shape - 1.0).abs() < 0.02, "shape {shape}: mean {mean}");
        assert!((var / shape - 1.0).abs() < 0.04, "shape {shape}: var {var}");
    }
}

/// Exact expected retained length, summing per-frame survival probabilities
/// over the interval law (ignores the retention floor, unreachable here).
fn expected_retained(tau: usize, n: usize, t: usize) -> f64 {
    let width = t.min(tau);
    (0..tau)
        .map(|f| {
            let q: f64 = (0..width)
                .map(|len| {
                    let room = tau - len;
                    let lo = (f + 1).saturating_sub(len);
                    let hi = f.min(room - 1);
                    let covering = if len == 0 || lo > hi { 0 } else { hi - lo + 1 };
                    1.0 - covering as f64 / room as f64
                })
                .sum::<f64>()
                / width as f64;
            q.powi(n as i32)
        })
        .sum()
}

fn monte_carlo_retained(rng: &mut StdRng, tau: usize, n: usize, t: usize, trials: usize) -> f64 {
    let width = t.min(tau);
    let mut total = 0usize;
    for _ in 0..trials {
        let mut removed = vec![false; tau];
        for _ in 0..n {
            let len = rng.gen_range(0..width);
            let start = rng.gen_range(0..tau - len);
            removed[start..start + len].iter_mut().for_each(|r| *r = true);
        }
        total += removed.iter().filter(|r| !**r).count();
    }
    total as f64 / trials as f64
}

#[test]
fn splice_mean_length_small() {
    let (tau, n, t) = (100, 2, 40);
    let m = Matrix::zeros(tau, 2);
    let cfg = SpliceConfig::new(n, t);
    let ours = (0..10_000u64)
        .map(|seed| splice_out(&mut SeededSource::new(seed), &m, &cfg).unwrap().n_frames())
        .sum::<usize>() as f64
        / 1e4;
    let mc = monte_carlo_retained(&mut StdRng::seed_from_u64(5), tau, n, t, 100_000);
    let exact = expected_retained(tau, n, t);
    assert!((ours / mc - 1.0).abs() < 0.01, "{ours} vs Monte Carlo {mc}");
    assert!((mc / exact - 1.0).abs() < 0.005, "Monte Carlo {mc} vs exact {exact}");
}

#[test]
fn corpus_length_decreases_with_n() {
    let corpus = random_walk_corpus(4, 64, 1000, 2);
    let mut prev = u64::MAX;
    for n in [2, 4, 8, 16, 32, 64] {
        let out = augment_corpus(&corpus, Method::SpliceOut, n, 40, 13).unwrap();
        let sum: u64 = out.iter().map(|m| m.n_frames() as u64).sum();
        assert!(sum < prev, "N={n}: {sum} !< {prev}");
        prev = sum;
        let mean = sum as f64 / 64.0;
        let exact = expected_retained(1000, n, 40);
        // 64 items: allow a few standard errors
        assert!((mean / exact - 1.0).abs() < 0.04, "N={n}: {mean} vs {exact}");
    }
}

/// Minimum edit cost over every alignment path (no dynamic programming).
fn brute_min_cost(r: &[u8], h: &[u8]) -> usize {
    match (r.split_first(), h.split_first()) {
        (None, _) => h.len(),
        (_, None) => r.len(),
        (Some((a, rr)), Some((b, hh))) => {
            let diag = usize::from(a != b) + brute_min_cost(rr, hh);
            let del = 1 + brute_min_cost(rr, h);
            let ins = 1 + brute_min_cost(r, hh);
            diag.min(del).min(ins)
        }
    }
}

fn strings(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for len in 1..=max_len {
        for code in 0..(1u32 << len) {
            out.push((0..len).map(|i| ((code >> i) & 1) as u8).collect());
        }
    }
    out
}

#[test]
fn alignment_counts_are_consistent_with_brute_force() {
    let all = strings(4);
    for r in &all {
        for h in &all {
            let c = align_wer(r, h);
            assert_eq!(c.errors() as usize, brute_min_cost(r, h), "{r:?} / {h:?}");
            assert_eq!(c.ref_len() as usize, r.len());
            assert_eq!(c.hyp_len() as usize, h.len());
        }
    }
}

#[test]
fn alignment_hand_case() {
    fn w(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }
    let c = align_wer(&w("a b c"), &w("a x c d"));
    assert_eq!(c, ErrorCounts::new(2, 1, 1, 0));
    assert!((c.errors() as f64 / c.ref_len() as f64 - 2.0 / 3.0).abs() < 1e-15);
}
