//! Acceptance suite. Runs every criterion in sequence (timing checks must not
//! share the machine with other tests) and prints one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use augforge::analysis::{distortion, distortion_sweep, Method};
use augforge::augment::{
    apply_mask, apply_splice, splice_out, Axis, FillPolicy, Interval, IntervalSet, SeededSource,
    SpliceConfig,
};
use augforge::augment::rng::RandomSource;
use augforge::bench::{run_benchmark, BenchConfig, CostModel};
use augforge::evalstats::{align_wer, bootstrap_wer, mapsswe, ErrorCounts};
use augforge::signal_io::{write_spgm, Matrix};
use augforge::synth::random_walk_corpus;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const NS: [usize; 6] = [2, 4, 8, 16, 32, 64];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Independent reference for interval sampling and union removal, driven by a
/// different generator than the library. Returns the retained length.
fn oracle_splice_len(rng: &mut StdRng, tau: usize, n: usize, t: usize) -> usize {
    let width = t.min(tau);
    let mut ivs = Vec::with_capacity(n);
    for _ in 0..n {
        let len = rng.gen_range(0..width);
        let room = tau - len;
        let start = if room == 0 { 0 } else { rng.gen_range(0..room) };
        ivs.push((start, start + len));
    }
    loop {
        let mut removed = vec![false; tau];
        for &(s, e) in &ivs {
            removed[s..e].iter_mut().for_each(|r| *r = true);
        }
        let kept = removed.iter().filter(|r| !**r).count();
        if kept >= 1 || ivs.is_empty() {
            return kept;
        }
        ivs.pop();
    }
}

fn splice_oracle_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut failures = 0;
    for _ in 0..1000 {
        let frames = rng.gen_range(0..120);
        let bins = rng.gen_range(1..9);
        let data: Vec<f32> = (0..frames * bins).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = Matrix::new(frames, bins, data).unwrap();
        let pairs: Vec<(usize, usize)> = (0..rng.gen_range(0..12))
            .map(|_| {
                let s = rng.gen_range(0..=frames);
                let e = rng.gen_range(s..=frames);
                (s, e)
            })
            .collect();
        let got = apply_splice(&m, &IntervalSet::from_pairs(&pairs)).unwrap();

        let mut keep = vec![true; frames];
        for &(s, e) in &pairs {
            keep[s..e].iter_mut().for_each(|k| *k = false);
        }
        let expect: Vec<u32> = (0..frames)
            .filter(|&f| keep[f])
            .flat_map(|f| m.row(f).iter().map(|v| v.to_bits()))
            .collect();
        let got_bits: Vec<u32> = got.data().iter().map(|v| v.to_bits()).collect();
        let kept = keep.iter().filter(|k| **k).count();
        if got_bits != expect || got.shape() != (kept, bins) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures}/1000 mismatches"))
}

fn length_law() -> Outcome {
    let tau = 1000;
    let t = 40;
    let m = Matrix::zeros(tau, 1);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in NS {
        let cfg = SpliceConfig::new(n, t);
        let total: usize = (0..10_000u64)
            .map(|seed| splice_out(&mut SeededSource::new(seed), &m, &cfg).unwrap().n_frames())
            .sum();
        let ours = total as f64 / 1e4;
        let mut orng = StdRng::seed_from_u64(1_000 + n as u64);
        let trials = 40_000;
        let oracle = (0..trials)
            .map(|_| oracle_splice_len(&mut orng, tau, n, t))
            .sum::<usize>() as f64
            / trials as f64;
        let rel = (ours / oracle - 1.0).abs();
        worst = worst.max(rel);
        parts.push(format!("N={n}: {ours:.1} vs {oracle:.1}"));
    }
    outcome(
        worst <= 0.01,
        format!("max rel err {:.4}%; {}", 100.0 * worst, parts.join(", ")),
    )
}

fn efficiency_benchmark() -> Outcome {
    let tau = 1000;
    let batch = 32;
    let corpus = random_walk_corpus(21, batch * 4, tau, 80);
    let cfg = BenchConfig {
        ns: NS.to_vec(),
        t: 40,
        batch_size: batch,
        // extra repetitions keep the medians stable on a shared, noisy host
        reps: 25,
        cost: CostModel::quadratic_dominant(),
        seed: 5,
    };
    let report = run_benchmark(&corpus, &[Method::SpliceOut, Method::TmZero], &cfg).unwrap();
    let so = report.row(Method::SpliceOut, 64).unwrap();
    let tm = report.row(Method::TmZero, 64).unwrap();
    let time_ratio = so.time_ms_median / tm.time_ms_median;

    let tm_times: Vec<f64> = NS
        .iter()
        .map(|&n| report.row(Method::TmZero, n).unwrap().time_ms_median)
        .collect();
    let tm_mean = tm_times.iter().sum::<f64>() / tm_times.len() as f64;
    let tm_spread = tm_times.iter().map(|x| (x / tm_mean - 1.0).abs()).fold(0.0, f64::max);

    let mem_ratio = so.padded_bytes as f64 / tm.padded_bytes as f64;
    let mut orng = StdRng::seed_from_u64(77);
    let sims = 3_000;
    let mean_max = (0..sims)
        .map(|_| {
            (0..batch)
                .map(|_| oracle_splice_len(&mut orng, tau, 64, 40))
                .max()
                .unwrap()
        })
        .sum::<usize>() as f64
        / sims as f64;
    let predicted = mean_max / tau as f64;
    let mem_err = (mem_ratio / predicted - 1.0).abs();

    let pass = time_ratio <= 0.6 && tm_spread <= 0.05 && mem_ratio <= 0.8 && mem_err <= 0.05;
    outcome(
        pass,
        format!(
            "time ratio {time_ratio:.3} (<= 0.6), tm_zero spread {:.2}% (<= 5%), \
             memory ratio {mem_ratio:.3} (<= 0.8) vs predicted {predicted:.3} (err {:.2}% <= 5%)",
            100.0 * tm_spread,
            100.0 * mem_err
        ),
    )
}

fn distortion_reproduction() -> Outcome {
    let corpus = random_walk_corpus(2024, 50, 1000, 80);
    let methods = [Method::SpliceOut, Method::TmZero, Method::TmMean];
    let rows = distortion_sweep(&corpus, &methods, &NS, 40, 100, 9).unwrap();
    let get = |m: Method, n: usize| rows.iter().find(|r| r.method == m && r.n == n).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in NS {
        let so = get(Method::SpliceOut, n);
        let tz = get(Method::TmZero, n);
        let tmn = get(Method::TmMean, n);
        pass &= so.mean_distortion_pct < tz.mean_distortion_pct;
        if n >= 8 {
            pass &= so.var_distortion_pct <= tmn.var_distortion_pct;
        }
        parts.push(format!(
            "N={n}: mean {:.3}/{:.3}, var {:.3}/{:.3}",
            so.mean_distortion_pct,
            tz.mean_distortion_pct,
            so.var_distortion_pct,
            tmn.var_distortion_pct
        ));
    }
    outcome(pass, format!("splice/tm_zero mean, splice/tm_mean var: {}", parts.join("; ")))
}

fn constant_input_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, c) in [-7.25f32, -0.1, 0.3, 1.0, 12.5].into_iter().enumerate() {
        let m = Matrix::filled(400, 16, c);
        for n in NS {
            let d = distortion(
                &m,
                |rng, x| Method::SpliceOut.apply(rng, x, n, 40),
                30,
                i as u64 * 100 + n as u64,
            )
            .unwrap();
            worst = worst.max(d.mean_pct.abs()).max(d.var_pct.abs());
        }
    }
    outcome(worst == 0.0, format!("max distortion {worst:e}"))
}

fn two_sentence_corpus() -> Vec<ErrorCounts> {
    vec![ErrorCounts::new(10, 0, 0, 0), ErrorCounts::new(0, 10, 0, 0)]
}

fn bootstrap_oracle() -> Outcome {
    // resample WER is 0, 0.5 or 1 with probabilities 1/4, 1/2, 1/4
    let exact = 0.125f64.sqrt();
    let counts = two_sentence_corpus();
    let small = bootstrap_wer(&counts, 1_000, &mut SeededSource::new(1)).unwrap();
    let large = bootstrap_wer(&counts, 100_000, &mut SeededSource::new(2)).unwrap();
    let degenerate = [
        vec![ErrorCounts::new(7, 2, 1, 0)],
        vec![ErrorCounts::new(5, 0, 0, 0); 4],
        vec![ErrorCounts::new(3, 1, 0, 1); 6],
    ];
    let degen_ok = degenerate.iter().all(|c| {
        bootstrap_wer(c, 500, &mut SeededSource::new(3)).unwrap().std_error == 0.0
    });
    let pass = (small.std_error - exact).abs() <= 0.03 && (large.std_error - exact).abs() <= 0.005 && degen_ok;
    outcome(
        pass,
        format!(
            "SE(B=1e3) {:.4}, SE(B=1e5) {:.4}, exact {exact:.4}, degenerate SE=0: {degen_ok}",
            small.std_error, large.std_error
        ),
    )
}

fn errs(e: &[u64]) -> Vec<ErrorCounts> {
    e.iter().map(|&k| ErrorCounts::new(10, k, 0, 0)).collect()
}

fn mapsswe_oracle() -> Outcome {
    // two-sided normal tail at sqrt(6), from an external erfc reference
    let p_ref = 0.014305878435429648;
    let r = mapsswe(&errs(&[2, 0, 1, 1]), &errs(&[0, 0, 0, 0])).unwrap();
    let point = (r.z - 2.449490).abs() <= 1e-6 && (r.p - p_ref).abs() <= 1e-6;
    let mut rng = StdRng::seed_from_u64(4);
    let mut antisym = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..40);
        let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..8)).collect();
        let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..8)).collect();
        let ab = mapsswe(&errs(&a), &errs(&b)).unwrap();
        let ba = mapsswe(&errs(&b), &errs(&a)).unwrap();
        if ab.z == -ba.z && ab.p == ba.p {
            antisym += 1;
        }
    }
    outcome(
        point && antisym == 100,
        format!("z {:.6}, p {:.10} (ref {p_ref:.10}), antisymmetric {antisym}/100", r.z, r.p),
    )
}

/// Reference Levenshtein DP; ties prefer diagonal, then deletion, then insertion.
fn oracle_counts(r: &[u8], h: &[u8]) -> ErrorCounts {
    let (n, m) = (r.len(), h.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    d[0] = (0..=m).collect();
    for i in 1..=n {
        for j in 1..=m {
            let sub = d[i - 1][j - 1] + usize::from(r[i - 1] != h[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    let (mut c, mut s, mut ins, mut del) = (0, 0, 0, 0);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + usize::from(r[i - 1] != h[j - 1]) {
            if r[i - 1] == h[j - 1] {
                c += 1;
            } else {
                s += 1;
            }
            i -= 1;
            j -= 1;
        } else if i > 0 && d[i][j] == d[i - 1][j] + 1 {
            del += 1;
            i -= 1;
        } else {
            ins += 1;
            j -= 1;
        }
    }
    ErrorCounts::new(c, s, ins, del)
}

fn all_strings(max_len: usize, alphabet: u8) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s: &Vec<u8>| {
                (0..alphabet).map(move |a| {
                    let mut t = s.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn wer_alignment() -> Outcome {
    let strings = all_strings(6, 3);
    let mut mismatches = 0usize;
    for r in &strings {
        for h in &strings {
            if align_wer(r, h) != oracle_counts(r, h) {
                mismatches += 1;
            }
        }
    }
    let total = strings.len() * strings.len();
    outcome(mismatches == 0, format!("{mismatches}/{total} pairs disagree"))
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn run_cli(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = augforge::cli::run(
        std::iter::once("augforge").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code != 0 {
        eprint!("{}", String::from_utf8_lossy(&err));
    }
    code
}

fn augment_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    std::fs::create_dir(&input).unwrap();
    for (i, m) in random_walk_corpus(8, 20, 120, 24).iter().enumerate() {
        let p = input.join(format!("utt{i:02}.spgm"));
        write_spgm(&p, m).unwrap();
        let label = if i % 2 == 0 { "[1.0, 0.0]" } else { "[0.0, 1.0]" };
        std::fs::write(input.join(format!("utt{i:02}.spgm.label.json")), label).unwrap();
        let spans = r#"[{"start_frame":0,"end_frame":20,"token_id":1},
                        {"start_frame":30,"end_frame":55,"token_id":2},
                        {"start_frame":60,"end_frame":100,"token_id":3}]"#;
        std::fs::write(input.join(format!("utt{i:02}.spgm.spans.json")), spans).unwrap();
    }
    let config = dir.path().join("pipe.json");
    std::fs::write(
        &config,
        r#"{"seed": 3, "pipeline": [
            {"op": "mixup", "alpha": 0.4},
            {"op": "time_warp", "w": 5},
            {"op": "semantic_mask", "ratio": 0.3, "fill": "mean"},
            {"op": "splice_out", "n": 4, "t": 20},
            {"op": "freq_mask", "n": 2, "t": 6}
        ]}"#,
    )
    .unwrap();
    let outs = [dir.path().join("a"), dir.path().join("b")];
    let mut codes = Vec::new();
    for o in &outs {
        codes.push(run_cli(&[
            "augment",
            "--config",
            config.to_str().unwrap(),
            "--in",
            input.to_str().unwrap(),
            "--out",
            o.to_str().unwrap(),
            "--seed",
            "17",
        ]));
    }
    let (a, b) = (read_tree(&outs[0]), read_tree(&outs[1]));
    let spgm_files = a.keys().filter(|k| k.ends_with(".spgm")).count();
    let pass = codes == [0, 0] && spgm_files == 20 && a == b;
    outcome(
        pass,
        format!("exit codes {codes:?}, {} files ({spgm_files} spectrograms), identical: {}", a.len(), a == b),
    )
}

fn mean_imputation() -> Outcome {
    let tau = 50;
    let mut vrng = StdRng::seed_from_u64(6);
    let m = Matrix::from_fn(tau, 16, |_, _| vrng.gen_range(0.5..2.0));
    let mu = m.global_mean();
    let trials = 100_000;
    let mut rng = SeededSource::new(12);
    let (mut sum_mean, mut sum_zero) = (0.0, 0.0);
    for _ in 0..trials {
        let f = rng.next_below(tau as u64) as usize;
        let iv = IntervalSet::new(vec![Interval::with_len(f, 1)]);
        sum_mean += apply_mask(&m, &iv, FillPolicy::GlobalMean, Axis::Time).unwrap().global_mean();
        sum_zero += apply_mask(&m, &iv, FillPolicy::Zero, Axis::Time).unwrap().global_mean();
    }
    let dev_mean = (sum_mean / trials as f64 - mu).abs() / mu.abs();
    let dev_zero = (mu - sum_zero / trials as f64) / mu;
    let closed = 1.0 / tau as f64;
    let zero_err = (dev_zero / closed - 1.0).abs();
    outcome(
        dev_mean <= 0.01 && zero_err <= 0.01,
        format!(
            "tm_mean deviation {:.4}% (<= 1%), tm_zero deviation {dev_zero:.5} vs k/tau {closed:.5} (err {:.3}%)",
            100.0 * dev_mean,
            100.0 * zero_err
        ),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let checks: [(&str, Check, Duration); 10] = [
        ("splice oracle equivalence", splice_oracle_equivalence, Duration::from_secs(10)),
        ("length law", length_law, Duration::from_secs(60)),
        ("efficiency benchmark", efficiency_benchmark, Duration::from_secs(300)),
        ("distortion reproduction", distortion_reproduction, Duration::from_secs(600)),
        ("constant-input exactness", constant_input_exactness, Duration::from_secs(60)),
        ("bootstrap oracle", bootstrap_oracle, Duration::from_secs(60)),
        ("mapsswe oracle", mapsswe_oracle, Duration::from_secs(60)),
        ("wer alignment", wer_alignment, Duration::from_secs(30)),
        ("augment determinism", augment_determinism, Duration::from_secs(60)),
        ("mean-imputation expectation", mean_imputation, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, check, limit) in checks {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < limit;
        failed += usize::from(!pass);
        println!(
            "{} {name}: {} [{:.1}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
