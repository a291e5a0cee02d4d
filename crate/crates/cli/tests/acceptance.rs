//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances are fixed below and never relaxed.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ndarray::Array2;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tempfile::TempDir;

use gblearn::algebra::{Exponent, Rational};
use gblearn::encoding::euclidean_distance;
use gblearn::features::{hilbert_numerator, krull_dimension};
use gblearn::groebner::{buchberger, normal_form, verify_groebner, BuchbergerOptions, GeneratorSet};
use gblearn::learning::{nn_init, r_squared, EvalReport, NetworkConfig};
use gblearn::rng::SplitMix64;
use gblearn::sampler::{count_monomials, sample_ideal, sample_monomial, unrank_monomial, RandomModel, SamplingMode};

const BIN: &str = env!("CARGO_BIN_EXE_gblearn");

const GB_SUITE_SIZE: u64 = 1000;
const GB_SUITE_SECONDS: u64 = 600;
const MONOMIAL_IDEALS: usize = 200;
const SERIES_DEGREE: u32 = 10;
const CHI_DRAWS: usize = 100_000;
const CHI_P_MIN: f64 = 0.001;
const FD_STEP: f64 = 1e-5;
const GRAD_REL_TOL: f64 = 1e-4;
const DETERMINISM_COUNT: &str = "10000";
const DIRECTIONAL_COUNT: &str = "20000";
const R2_MARGIN: f64 = 0.02;
const METRIC_TOL: f64 = 1e-12;

const FIVE_VAR: [u32; 50] = [
    0, 0, 7, 0, 8, 2, 0, 2, 1, 2, //
    0, 0, 13, 2, 0, 3, 3, 5, 0, 1, //
    6, 4, 1, 3, 0, 0, 3, 2, 4, 3, //
    0, 2, 5, 2, 2, 0, 1, 2, 1, 6, //
    3, 2, 0, 5, 1, 3, 1, 1, 3, 2,
];
const TABLE_I: [u32; 30] = [3, 3, 1, 1, 3, 3, 6, 1, 0, 2, 1, 4, 1, 5, 1, 4, 1, 2, 0, 6, 1, 3, 2, 2, 6, 1, 0, 1, 3, 3];
const TABLE_J: [u32; 30] = [6, 0, 1, 3, 2, 2, 1, 3, 3, 1, 0, 6, 0, 7, 0, 0, 4, 3, 4, 1, 2, 1, 1, 5, 1, 6, 0, 0, 3, 4];
const TABLE_K: [u32; 30] = [5, 2, 0, 0, 1, 6, 6, 1, 0, 2, 2, 3, 3, 4, 0, 3, 1, 3, 0, 3, 4, 1, 0, 6, 3, 4, 0, 0, 7, 0];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gblearn(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("GBLEARN_WORKERS")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("gblearn {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write_ideals(dir: &Path, name: &str, n: usize, s: usize, rows: &[&[u32]]) {
    let mut text = format!(
        "# gblearn ideals v1\n# n={n} d=none s={s} mode=none seed=none count={} tool=acceptance layout=given\n",
        rows.len()
    );
    for r in rows {
        let vals: Vec<String> = r.iter().map(u32::to_string).collect();
        text.push_str(&vals.join(","));
        text.push('\n');
    }
    fs::write(dir.join(name), text).unwrap();
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(2).map(str::to_string).collect()
}

fn field(line: &str, key: &str) -> Result<f64, String> {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(&format!("{key}=")))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("no {key} in `{line}`"))
}

fn worked_example() -> Outcome {
    let dir = TempDir::new().unwrap();
    write_ideals(dir.path(), "five.txt", 5, 5, &[&FIVE_VAR]);
    let start = Instant::now();
    gblearn(dir.path(), &["label", "--ideals", "five.txt", "-o", "five.csv"])?;
    let rows = data_rows(&dir.path().join("five.csv"));
    check(rows == ["226,29"], format!("labels {rows:?}, expected 226,29"))?;
    Ok(format!("226 elements, max degree 29 in {:.2?}", start.elapsed()))
}

fn table_one() -> Outcome {
    let dir = TempDir::new().unwrap();
    write_ideals(dir.path(), "t.txt", 3, 5, &[&TABLE_I, &TABLE_J, &TABLE_K]);
    gblearn(dir.path(), &["label", "--ideals", "t.txt", "-o", "t.csv"])?;
    let sizes: Vec<String> = data_rows(&dir.path().join("t.csv"))
        .iter()
        .map(|r| r.split(',').next().unwrap_or("").to_string())
        .collect();
    check(sizes == ["7", "13", "14"], format!("sizes {sizes:?}"))?;
    Ok("sizes 7, 13, 14".into())
}

fn distance_pathology() -> Outcome {
    let ik = euclidean_distance(&TABLE_I, &TABLE_K).map_err(|e| e.to_string())?;
    let jk = euclidean_distance(&TABLE_J, &TABLE_K).map_err(|e| e.to_string())?;
    let ij = euclidean_distance(&TABLE_I, &TABLE_J).map_err(|e| e.to_string())?;
    check(ik < jk && jk < ij, format!("d(I,K)={ik} d(J,K)={jk} d(I,J)={ij}"))?;
    // the CLI reports the same numbers
    let dir = TempDir::new().unwrap();
    write_ideals(dir.path(), "t.txt", 3, 5, &[&TABLE_I, &TABLE_J, &TABLE_K]);
    let cli: f64 = gblearn(dir.path(), &["distance", "--ideals", "t.txt", "--i", "0", "--j", "2"])?
        .trim()
        .parse()
        .map_err(|_| "unparsable distance".to_string())?;
    check(cli == ik, format!("cli distance {cli} vs {ik}"))?;
    Ok(format!("d(I,K)={ik:.3} < d(J,K)={jk:.3} < d(I,J)={ij:.3}"))
}

fn groebner_suite() -> Outcome {
    let start = Instant::now();
    let opts = BuchbergerOptions::default();
    let one = Rational::from_integer(1.into());
    let model = RandomModel::new(3, 5, 3, SamplingMode::Exact, 20_240_601).map_err(|e| e.to_string())?;
    for i in 0..GB_SUITE_SIZE {
        let sample = sample_ideal(&model, i);
        let r = buchberger(&GeneratorSet::from_binomials(&sample.gens).unwrap(), &opts).map_err(|e| e.to_string())?;
        check(verify_groebner(&r.basis), format!("sample {i}: not a Gröbner basis"))?;
        for g in &sample.gens {
            let nf = normal_form(&g.to_polynomial(), &r.basis).map_err(|e| e.to_string())?;
            check(nf.is_zero(), format!("sample {i}: generator does not reduce to 0"))?;
        }
        for (a, g) in r.basis.iter().enumerate() {
            check(g.lead_coeff() == Some(&one), format!("sample {i}: element {a} not monic"))?;
            for (b, h) in r.basis.iter().enumerate() {
                let lead = h.lead_monomial().unwrap();
                let clash = a != b && g.terms().iter().any(|t| lead.divides(&t.monomial).unwrap_or(false));
                check(!clash, format!("sample {i}: element {a} reducible by {b}"))?;
            }
        }
        let mut permuted = sample.gens.clone();
        permuted.reverse();
        permuted.rotate_left(1);
        let p = buchberger(&GeneratorSet::from_binomials(&permuted).unwrap(), &opts).map_err(|e| e.to_string())?;
        check(p.basis == r.basis, format!("sample {i}: basis depends on generator order"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed.as_secs() < GB_SUITE_SECONDS, format!("took {elapsed:.2?}"))?;
    Ok(format!("{GB_SUITE_SIZE} ideals verified in {elapsed:.2?}"))
}

fn subset_dimension(gens: &[Exponent], n: usize) -> i32 {
    (0u32..1 << n)
        .filter(|set| {
            gens.iter()
                .all(|g| g.entries().iter().enumerate().any(|(i, &e)| e > 0 && set & (1 << i) == 0))
        })
        .map(|set| set.count_ones() as i32)
        .max()
        .unwrap_or(-1)
}

fn standard_monomials(gens: &[Exponent], n: usize, k: u32) -> i64 {
    (0..count_monomials(n, k))
        .map(|r| unrank_monomial(n, k, r).unwrap())
        .filter(|m| !gens.iter().any(|g| g.divides(m).unwrap()))
        .count() as i64
}

fn monomial_oracles() -> Outcome {
    let mut rng = SplitMix64::new(0x5EED_0005);
    for case in 0..MONOMIAL_IDEALS {
        let n = 1 + rng.below(4) as usize;
        let gens: Vec<Exponent> = (0..1 + rng.below(5))
            .map(|_| {
                let mut e: Vec<u32> = (0..n).map(|_| if rng.below(2) == 0 { 0 } else { rng.below(5) as u32 }).collect();
                if e.iter().all(|&x| x == 0) {
                    e[rng.below(n as u64) as usize] = 1;
                }
                Exponent::new(e)
            })
            .collect();
        let dim = krull_dimension(&gens, n);
        check(dim == subset_dimension(&gens, n), format!("case {case}: dimension {dim}"))?;
        let series = hilbert_numerator(&gens, n).series(n, SERIES_DEGREE as usize + 1);
        let counts: Vec<i64> = (0..=SERIES_DEGREE).map(|k| standard_monomials(&gens, n, k)).collect();
        check(series == counts, format!("case {case}: series {series:?} vs counts {counts:?}"))?;
    }
    Ok(format!("{MONOMIAL_IDEALS} ideals, series to degree {SERIES_DEGREE}"))
}

fn sampler_uniformity() -> Outcome {
    let model = RandomModel::new(3, 3, 1, SamplingMode::UpTo, 0).map_err(|e| e.to_string())?;
    let mut rng = SplitMix64::new(6);
    let mut counts = std::collections::HashMap::new();
    for _ in 0..CHI_DRAWS {
        *counts.entry(sample_monomial(&model, &mut rng)).or_insert(0u64) += 1;
    }
    check(counts.len() == 19, format!("{} distinct outcomes", counts.len()))?;
    let expected = CHI_DRAWS as f64 / 19.0;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(18.0).unwrap().cdf(stat);
    check(p > CHI_P_MIN, format!("chi-square {stat:.2}, p = {p:.5}"))?;

    // exact mode: every rank is a degree-d monomial and draws stay on degree d
    for (n, d) in [(3usize, 7u32), (5, 15)] {
        for r in 0..count_monomials(n, d) {
            check(unrank_monomial(n, d, r).unwrap().degree() == d, format!("rank {r} off degree"))?;
        }
        let exact = RandomModel::new(n, d, 1, SamplingMode::Exact, 1).unwrap();
        check((0..10_000).all(|_| sample_monomial(&exact, &mut rng).degree() == d), "exact draw off degree")?;
    }
    Ok(format!("chi-square {stat:.2} on 18 df, p = {p:.4}"))
}

fn gradient_fidelity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (dropout, seed) in [(0.0, 31u64), (0.5, 32)] {
        let config = NetworkConfig {
            conv_filters: 2,
            dense: vec![8, 8],
            dropout_rate: dropout,
            seed,
            ..NetworkConfig::new(5, 6)
        };
        let (mut net, _) = nn_init(&config).map_err(|e| e.to_string())?;
        let mut rng = SplitMix64::new(seed + 100);
        for p in net.params.iter_mut().filter(|p| p.ndim() == 1) {
            p.mapv_inplace(|_| rng.unit_f64() * 0.2 - 0.1);
        }
        let x = Array2::from_shape_simple_fn((4, 30), || rng.unit_f64());
        let y: Vec<f64> = (0..4).map(|_| rng.unit_f64() * 4.0 - 2.0).collect();
        let mask_seed = seed * 7;
        let loss_at = |net: &gblearn::learning::NeuralNet| {
            net.loss_and_gradient(x.view(), &y, &mut SplitMix64::new(mask_seed)).unwrap()
        };
        let (_, grads) = loss_at(&net);
        for (t, g) in grads.0.iter().enumerate() {
            for (i, &analytic) in g.iter().enumerate() {
                let mut plus = net.clone();
                plus.params[t].as_slice_mut().unwrap()[i] += FD_STEP;
                let mut minus = net.clone();
                minus.params[t].as_slice_mut().unwrap()[i] -= FD_STEP;
                let numeric = (loss_at(&plus).0 - loss_at(&minus).0) / (2.0 * FD_STEP);
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
                worst = worst.max(rel);
            }
        }
    }
    check(worst < GRAD_REL_TOL, format!("worst relative error {worst:.2e}"))?;
    Ok(format!("worst relative error {worst:.2e}"))
}

fn determinism() -> Outcome {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    for w in ["1", "8"] {
        gblearn(d, &[
            "generate", "--n", "3", "--d", "7", "--s", "5", "--count", DETERMINISM_COUNT, "--seed", "8", "--workers", w,
            "-o", &format!("ideals{w}.txt"),
        ])?;
        gblearn(d, &[
            "label", "--ideals", &format!("ideals{w}.txt"), "--workers", w, "-o", &format!("labels{w}.csv"),
            "--features", &format!("features{w}.csv"),
        ])?;
    }
    for stem in ["ideals1.txt", "labels1.csv", "labels1.csv.quarantine.csv", "features1.csv"] {
        let other = stem.replace('1', "8");
        let same = fs::read(d.join(stem)).unwrap() == fs::read(d.join(&other)).unwrap();
        check(same, format!("{stem} differs from {other}"))?;
    }
    Ok(format!("{DETERMINISM_COUNT} ideals: ideals, labels, quarantine and features byte-identical"))
}

fn directional_reproduction() -> Outcome {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let start = Instant::now();
    gblearn(d, &["generate", "--n", "3", "--d", "7", "--s", "5", "--mode", "exact", "--count", DIRECTIONAL_COUNT, "--seed", "2024", "-o", "i.txt"])?;
    gblearn(d, &["label", "--ideals", "i.txt", "-o", "l.csv"])?;
    gblearn(d, &["split", "--data", "i.txt", "--test-fraction", "0.2", "--seed", "7", "-o", "s.csv"])?;
    let data = ["--input", "i.txt", "--labels", "l.csv", "--split", "s.csv"];
    let train = |model: &str, out: &str| {
        let mut args = vec!["train", "--model", model, "--target", "size", "--seed", "11", "--quiet", "-o", out];
        args.extend(data);
        gblearn(d, &args)
    };
    let score = |out: &str| -> Result<f64, String> {
        let mut args = vec!["eval", "--model", out];
        args.extend(data);
        field(&gblearn(d, &args)?, "r_squared")
    };
    train("linreg", "lin.txt")?;
    let lin = score("lin.txt")?;
    train("nn", "nn.txt")?;
    let nn = score("nn.txt")?;
    let detail = format!("linreg r2 = {lin:.4}, nn r2 = {nn:.4} ({:.0?})", start.elapsed());
    check(lin.is_finite() && lin > 0.0, format!("linear regression not positive: {detail}"))?;
    check(nn >= lin - R2_MARGIN, format!("network below margin: {detail}"))?;
    Ok(detail)
}

fn metric_identities() -> Outcome {
    let actual = [12.0, 7.0, 9.0, 14.0, 7.0, 10.0];
    let self_r2 = r_squared(&actual, &actual).map_err(|e| e.to_string())?;
    check((self_r2 - 1.0).abs() <= METRIC_TOL, format!("r2(actual, actual) = {self_r2}"))?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let mean_r2 = r_squared(&[mean; 6], &actual).map_err(|e| e.to_string())?;
    check(mean_r2.abs() <= METRIC_TOL, format!("r2(mean) = {mean_r2}"))?;
    let shifted: Vec<f64> = actual.iter().map(|a| a + 0.6).collect();
    let report = EvalReport::from_predictions(&shifted, &actual).map_err(|e| e.to_string())?;
    check(report.overshoot_rate == 1.0, format!("overshoot {}", report.overshoot_rate))?;
    Ok(format!("r2 self = {self_r2}, r2 mean = {mean_r2:e}, overshoot = {}", report.overshoot_rate))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked example: 226 elements, max degree 29", worked_example),
        ("three-variable table: basis sizes 7, 13, 14", table_one),
        ("distance ordering on printed vectors", distance_pathology),
        ("Gröbner correctness on 1000 sampled ideals", groebner_suite),
        ("monomial dimension and Hilbert series oracles", monomial_oracles),
        ("sampler uniformity and exact degree", sampler_uniformity),
        ("network gradients vs finite differences", gradient_fidelity),
        ("1 vs 8 workers byte-identical outputs", determinism),
        ("directional r2: network vs linear regression", directional_reproduction),
        ("metric identities", metric_identities),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (status, detail) = match outcome {
            Ok(detail) => ("PASS", detail),
            Err(detail) => {
                failed += 1;
                ("FAIL", detail)
            }
        };
        println!("criterion {:>2} {status}: {name} [{detail}] ({:.1?})", i + 1, start.elapsed());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
