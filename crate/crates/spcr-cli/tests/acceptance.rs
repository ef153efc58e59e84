//! Acceptance suite: one test per release criterion, each printing a
//! single `A<n> PASS` line with the measured evidence (visible under
//! `cargo test --test acceptance -- --nocapture`).

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use spcr::dimension::{maximize_kurtosis, projection_kurtosis, sphere_pcs, ub_k, KurtosisOptions};
use spcr::numerics::{center_columns, spectral_decompose, thin_svd, CenteredMatrix};
use spcr::pcr::{
    fit, predict, predict_spc_baseline, predict_via_components, sweep, EvalMode, FitConfig,
    HPolicy, Method, SweepResult, SweepRow,
};
use spcr::ranking::{
    canonical_system, canonical_system_with_svd, rank_with_scheme, ranking_vector_b1,
    take_ranked_subset, tau_prerank, RankingScheme, TauRankConfig,
};
use spcr::simgen::{derive_seed, multivariate_benchmark, univariate_benchmark};

fn rng_for(tag: u64, tail: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(tag, tail))
}

fn usize_in(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.random::<u64>() % (hi - lo + 1) as u64) as usize
}

fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, p), |_| StandardNormal.sample(rng))
}

/// Random regression instance `y = x w + noise` with per-column scales.
fn regression_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    p: usize,
    q: usize,
) -> (Array2<f64>, Array2<f64>) {
    let mut x = normal_matrix(rng, n, p);
    for j in 0..p {
        let scale = 0.5 + 1.5 * rng.random::<f64>();
        let shift = 4.0 * rng.random::<f64>() - 2.0;
        x.column_mut(j).mapv_inplace(|v| scale * v + shift);
    }
    let w = normal_matrix(rng, p, q);
    let noise = normal_matrix(rng, n, q);
    let y = x.dot(&w) + 0.5 * &noise;
    (x, y)
}

fn argsort_desc_abs(v: &Array1<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        v[b].abs()
            .partial_cmp(&v[a].abs())
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    order
}

/// Least-squares coefficients of the centered system, one column per response.
fn ols_coefficients(x: &CenteredMatrix, y: &CenteredMatrix) -> Array2<f64> {
    let xv = x.values();
    let xtx = xv.t().dot(xv);
    let mut beta = Array2::zeros((x.n_cols(), y.n_cols()));
    for c in 0..y.n_cols() {
        let rhs = xv.t().dot(&y.values().column(c));
        beta.column_mut(c).assign(&xtx.solve(&rhs).expect("full-rank system"));
    }
    beta
}

fn assert_within(elapsed: Duration, budget: Duration, label: &str) {
    assert!(
        elapsed < budget,
        "{label} took {:.1} s, budget {:.0} s",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}

#[test]
fn a1_ranking_matches_least_squares_order() {
    let start = Instant::now();
    let mut min_cosine = f64::INFINITY;
    for i in 0..200 {
        let mut rng = rng_for(0xA1, &[i]);
        let n = usize_in(&mut rng, 30, 200);
        let p = usize_in(&mut rng, 3, 12);
        let (x_raw, y_raw) = regression_instance(&mut rng, n, p, 1);
        let x = center_columns(&x_raw).unwrap();
        let y = center_columns(&y_raw).unwrap();

        let svd = thin_svd(&x, None).unwrap();
        assert_eq!(svd.rank, p, "instance {i} lost rank");
        let sys = canonical_system_with_svd(&svd, &y).unwrap();
        let b1 = ranking_vector_b1(&sys, &svd, &y).unwrap();
        let beta = ols_coefficients(&x, &y).column(0).to_owned();

        assert_eq!(
            argsort_desc_abs(&b1),
            argsort_desc_abs(&beta),
            "instance {i}: variable order differs from least squares"
        );
        let ranking = rank_with_scheme(&x, &y, RankingScheme::B1).unwrap();
        assert_eq!(ranking.order, argsort_desc_abs(&b1), "instance {i}: public ranking disagrees");

        let cosine = b1.dot(&beta)
            / (b1.dot(&b1).sqrt() * beta.dot(&beta).sqrt());
        min_cosine = min_cosine.min(cosine);
        assert!(
            cosine >= 1.0 - 1e-10,
            "instance {i}: cosine to least squares was {cosine}"
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(10), "A1");
    println!(
        "A1 PASS: 200/200 instances matched the least-squares order; min cosine {min_cosine:.15}; {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn a2_prediction_route_identities() {
    let start = Instant::now();
    let mut max_rel_pair = 0.0f64;
    let mut max_rel_ols = 0.0f64;
    for i in 0..100 {
        let mut rng = rng_for(0xA2, &[i]);
        let n = usize_in(&mut rng, 30, 120);
        let p = usize_in(&mut rng, 4, 15);
        let q = usize_in(&mut rng, 1, 4);
        let (x_raw, y_raw) = regression_instance(&mut rng, n, p, q);
        let x = center_columns(&x_raw).unwrap();
        let y_c = center_columns(&y_raw).unwrap();
        let ranking = rank_with_scheme(&x, &y_c, RankingScheme::B1).unwrap();
        let m = usize_in(&mut rng, 2, p.min(n / 2));
        let h = usize_in(&mut rng, 1, m.min(4));
        let z_raw: Array1<f64> = Array1::from_shape_fn(p, |_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            2.0 * v
        });

        let config = FitConfig {
            h_policy: HPolicy::Fixed(h),
            ..FitConfig::default()
        };
        let model = fit(&x, &y_raw, &ranking, m, &config).unwrap().model;
        let z2 = z_raw.view().insert_axis(ndarray::Axis(0)).to_owned();
        let direct = predict(&model, &z2).unwrap().row(0).to_owned();

        let (x_m, idx) = take_ranked_subset(&x, &ranking, m).unwrap();
        let z_m: Array1<f64> =
            Array1::from_iter(idx.iter().map(|&j| z_raw[j] - x.column_means()[j]));
        let summed = predict_via_components(&x_m, &y_c, h, &z_m).unwrap();

        let scale = direct.dot(&direct).sqrt().max(1.0);
        let diff = (&direct - &summed).mapv(f64::abs).iter().cloned().fold(0.0, f64::max);
        max_rel_pair = max_rel_pair.max(diff / scale);
        assert!(diff <= 1e-8 * scale, "instance {i}: prediction routes differ by {diff}");

        // With every component of a full-rank subset retained, the model is
        // plain least squares on that subset.
        let full = fit(
            &x,
            &y_raw,
            &ranking,
            m,
            &FitConfig {
                h_policy: HPolicy::Fixed(m),
                ..FitConfig::default()
            },
        )
        .unwrap()
        .model;
        let via_model = predict(&full, &z2).unwrap().row(0).to_owned();
        let beta = ols_coefficients(&x_m, &y_c);
        let ols_pred = z_m.dot(&beta) + &y_c.column_means().to_owned();
        let scale = via_model.dot(&via_model).sqrt().max(1.0);
        let diff = (&via_model - &ols_pred)
            .mapv(f64::abs)
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        max_rel_ols = max_rel_ols.max(diff / scale);
        assert!(diff <= 1e-8 * scale, "instance {i}: full-component fit differs from least squares by {diff}");
    }

    // A single retained component reproduces the one-component baseline on
    // the same per-column ranking.
    let mut max_rel_base = 0.0f64;
    for i in 0..100 {
        let mut rng = rng_for(0xA2B, &[i]);
        let n = usize_in(&mut rng, 30, 120);
        let p = usize_in(&mut rng, 4, 15);
        let (x_raw, y_raw) = regression_instance(&mut rng, n, p, 1);
        let x = center_columns(&x_raw).unwrap();
        let y_c = center_columns(&y_raw).unwrap();
        let ranking = rank_with_scheme(&x, &y_c, RankingScheme::Bair).unwrap();
        let m = usize_in(&mut rng, 2, p);
        let z_raw: Array1<f64> = Array1::from_shape_fn(p, |_| StandardNormal.sample(&mut rng));

        let model = fit(
            &x,
            &y_raw,
            &ranking,
            m,
            &FitConfig {
                h_policy: HPolicy::Fixed(1),
                ..FitConfig::default()
            },
        )
        .unwrap()
        .model;
        let z2 = z_raw.view().insert_axis(ndarray::Axis(0)).to_owned();
        let a = predict(&model, &z2).unwrap()[[0, 0]];
        let b = predict_spc_baseline(&x, &y_c, &ranking, m, &z_raw).unwrap();
        let diff = (a - b).abs();
        let scale = b.abs().max(1.0);
        max_rel_base = max_rel_base.max(diff / scale);
        assert!(diff <= 1e-10 * scale, "instance {i}: one-component routes differ by {diff}");
    }

    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(10), "A2");
    println!(
        "A2 PASS: route pair within {max_rel_pair:.2e}, full-component vs least squares within {max_rel_ols:.2e}, one-component vs baseline within {max_rel_base:.2e}; {:.1} s",
        elapsed.as_secs_f64()
    );
}

/// One non-Gaussian column; the kind cycles so datasets differ in shape.
fn skewed_column(rng: &mut ChaCha8Rng, n: usize, kind: usize) -> Array1<f64> {
    let exp = Exp::new(1.0).unwrap();
    Array1::from_shape_fn(n, |_| match kind % 5 {
        0 => exp.sample(rng) - 1.0,
        1 => 2.0 * rng.random::<f64>() - 1.0,
        2 => {
            let v: f64 = StandardNormal.sample(rng);
            v * v * v
        }
        3 => {
            let v: f64 = StandardNormal.sample(rng);
            v.abs()
        }
        _ => exp.sample(rng) - exp.sample(rng),
    })
}

#[test]
fn a3_kurtosis_optimizer_matches_grid_search() {
    let start = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..50 {
        let mut rng = rng_for(0xA3, &[i as u64]);
        let n = 500;
        let mut x_raw = Array2::zeros((n, 2));
        x_raw.column_mut(0).assign(&skewed_column(&mut rng, n, i));
        x_raw.column_mut(1).assign(&skewed_column(&mut rng, n, i + 1));
        // Mix the columns so optima are not axis-aligned.
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let (s, c) = theta.sin_cos();
        let rot = ndarray::array![[c, -s], [s, c]];
        let x_raw = x_raw.dot(&rot);

        let x = center_columns(&x_raw).unwrap();
        let z = sphere_pcs(&x).unwrap().scores;

        let mut grid_max = f64::NEG_INFINITY;
        for t in 0..3600 {
            let angle = std::f64::consts::TAU * t as f64 / 3600.0;
            let alpha = ndarray::array![angle.cos(), angle.sin()];
            grid_max = grid_max.max(projection_kurtosis(&z, &alpha).unwrap());
        }

        let opts = KurtosisOptions {
            seed: derive_seed(0xA3, &[i as u64, 1]),
            ..KurtosisOptions::default()
        };
        let found = maximize_kurtosis(&z, &opts).unwrap().beta_hat;
        let gap = grid_max - found;
        worst_gap = worst_gap.max(gap);
        assert!(
            gap <= 1e-3,
            "dataset {i}: optimizer reached {found}, grid reached {grid_max}"
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(30), "A3");
    println!(
        "A3 PASS: optimizer within {worst_gap:.2e} of the 3600-point grid maximum on 50 datasets; {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn a4_null_kurtosis_within_adjusted_bound() {
    let start = Instant::now();
    let n = 500usize;
    let mut worst_z = f64::NEG_INFINITY;
    for k in 2..=10usize {
        let mut stats = Vec::with_capacity(50);
        for seed in 0..50u64 {
            let mut rng = rng_for(0xA4, &[k as u64, seed]);
            let x_raw = normal_matrix(&mut rng, n, k);
            let x = center_columns(&x_raw).unwrap();
            let sphered = sphere_pcs(&x).unwrap();
            assert_eq!(sphered.k_max, k);
            let opts = KurtosisOptions {
                seed: derive_seed(0xA4, &[k as u64, seed, 1]),
                ..KurtosisOptions::default()
            };
            let beta = maximize_kurtosis(&sphered.scores, &opts).unwrap().beta_hat;
            stats.push((n as f64 / 24.0).sqrt() * beta);
        }
        let mean = stats.iter().sum::<f64>() / stats.len() as f64;
        let var = stats.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            / (stats.len() - 1) as f64;
        let se = (var / stats.len() as f64).sqrt();
        let bound = ub_k(k).unwrap();
        let z = (mean - bound) / se;
        worst_z = worst_z.max(z);
        assert!(
            mean <= bound + 3.0 * se,
            "k = {k}: mean null statistic {mean} exceeds {bound} + 3 * {se}"
        );
    }
    let elapsed = start.elapsed();
    println!(
        "A4 PASS: null mean within the adjusted bound for k = 2..10; worst standardized excess {worst_z:.2}; {:.1} s",
        elapsed.as_secs_f64()
    );
}

/// Lowest-error row per method, smaller subset size winning ties.
fn best_by_method(result: &SweepResult) -> Vec<&SweepRow> {
    let mut best: Vec<&SweepRow> = Vec::new();
    for row in &result.rows {
        match best.iter_mut().find(|b| b.method == row.method) {
            Some(b) => {
                if row.lse < b.lse {
                    *b = row;
                }
            }
            None => best.push(row),
        }
    }
    best
}

#[test]
fn a5_univariate_benchmark_pattern() {
    let start = Instant::now();
    let base = 0x51;
    let m_values: Vec<usize> = (2..=13).collect();
    let methods = [Method::Knb1PcH, Method::BhptPc1];
    let mut knb_wins = 0;
    let mut h_small = 0;
    for j in 0..100u64 {
        let data = univariate_benchmark(derive_seed(base, &[j]));
        let x = center_columns(&data.x).unwrap();
        let result = sweep(
            &x,
            &data.y,
            &methods,
            &m_values,
            EvalMode::InSample,
            derive_seed(base, &[j, 1]),
            None,
        )
        .unwrap();
        let best = best_by_method(&result);
        let knb = best.iter().find(|b| b.method == Method::Knb1PcH).unwrap();
        let pc1 = best.iter().find(|b| b.method == Method::BhptPc1).unwrap();
        if knb.lse <= pc1.lse {
            knb_wins += 1;
        }
        if knb.h == 2 || knb.h == 3 {
            h_small += 1;
        }
    }
    assert!(
        knb_wins >= 90,
        "multi-component prediction beat the one-component baseline in only {knb_wins}/100 replicates"
    );
    assert!(
        h_small >= 50,
        "best component count fell in {{2, 3}} in only {h_small}/100 replicates"
    );
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(600), "A5");
    println!(
        "A5 PASS: multi-component won {knb_wins}/100; best H in {{2, 3}} in {h_small}/100; {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn a6_multivariate_benchmark_pattern() {
    let start = Instant::now();
    let base = 0x52;
    let m_values: Vec<usize> = (2..=50).collect();
    let methods = [Method::Knb1PcH, Method::Knb2PcH];
    let mut low_h = [0usize; 2];
    let mut last: Option<(CenteredMatrix, Array2<f64>)> = None;
    for j in 0..25u64 {
        let data = multivariate_benchmark(derive_seed(base, &[j]));
        let x = center_columns(&data.x).unwrap();
        let result = sweep(
            &x,
            &data.y,
            &methods,
            &m_values,
            EvalMode::InSample,
            derive_seed(base, &[j, 1]),
            None,
        )
        .unwrap();
        for b in best_by_method(&result) {
            let slot = methods.iter().position(|&mt| mt == b.method).unwrap();
            if b.h <= 8 {
                low_h[slot] += 1;
            }
        }
        last = Some((x, data.y));
    }
    for (slot, &count) in low_h.iter().enumerate() {
        assert!(
            count >= 20,
            "{}: best H <= 8 in only {count}/25 replicates",
            methods[slot].tag()
        );
    }

    let (x, y) = last.unwrap();
    for mt in [Method::BhptPcH, Method::BhptPc1] {
        let err = sweep(
            &x,
            &y,
            &[mt],
            &m_values,
            EvalMode::InSample,
            0,
            None,
        )
        .unwrap_err();
        assert!(
            matches!(err, spcr::Error::UnsupportedResponse(_)),
            "{} accepted a 7-column response: {err}",
            mt.tag()
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(600), "A6");
    println!(
        "A6 PASS: best H <= 8 in {}/25 ({}) and {}/25 ({}); one-component methods refused the 7-column response; {:.1} s",
        low_h[0],
        methods[0].tag(),
        low_h[1],
        methods[1].tag(),
        elapsed.as_secs_f64()
    );
}

#[test]
fn a7_sphering_and_canonical_bounds() {
    let start = Instant::now();
    let mut worst_cov = 0.0f64;
    let mut worst_sigma = f64::NEG_INFINITY;
    for i in 0..500 {
        let mut rng = rng_for(0xA7, &[i]);
        let n = usize_in(&mut rng, 15, 80);
        let p = usize_in(&mut rng, 2, 30);
        let q = usize_in(&mut rng, 1, 5);
        let (x_raw, y_raw) = regression_instance(&mut rng, n, p, q);
        let x = center_columns(&x_raw).unwrap();
        let y = center_columns(&y_raw).unwrap();

        let sphered = sphere_pcs(&x).unwrap();
        let cov = sphered.scores.t().dot(&sphered.scores) / n as f64;
        for r in 0..sphered.k_max {
            for c in 0..sphered.k_max {
                let target = if r == c { 1.0 } else { 0.0 };
                let dev = (cov[[r, c]] - target).abs();
                worst_cov = worst_cov.max(dev);
                assert!(
                    dev <= 1e-8,
                    "instance {i}: sphered covariance entry ({r}, {c}) off by {dev}"
                );
            }
        }

        let sys = canonical_system(&x, &y).unwrap();
        let s_y = sys.c_hat.t().dot(&sys.c_hat);
        let spectral = spectral_decompose(&s_y).unwrap();
        for &lambda in &spectral.eigenvalues {
            assert!(lambda >= -1e-10, "instance {i}: negative squared correlation {lambda}");
            let sigma = lambda.max(0.0).sqrt();
            worst_sigma = worst_sigma.max(sigma);
            assert!(
                sigma <= 1.0 + 1e-10,
                "instance {i}: canonical correlation {sigma} above one"
            );
        }
    }
    let elapsed = start.elapsed();
    println!(
        "A7 PASS: 500 instances; max covariance deviation {worst_cov:.2e}; max canonical correlation {worst_sigma:.12}; {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn a8_block_prerank_recovers_planted_columns() {
    let start = Instant::now();
    let n = 78usize;
    let p = 24481usize;
    let planted = [
        411usize, 3200, 5400, 9990, 10007, 14500, 15003, 19999, 20010, 24480,
    ];
    let config = TauRankConfig {
        n_blocks: 5,
        block_size: 5000,
        tau: 200,
        scheme: RankingScheme::B1,
        shuffle_seed: None,
    };
    let mut full_recoveries = 0;
    for run in 0..100u64 {
        let mut rng = rng_for(0xA8, &[run]);
        let source: Array1<f64> = Array1::from_shape_fn(n, |_| StandardNormal.sample(&mut rng));
        let mut x = normal_matrix(&mut rng, n, p);
        for &j in &planted {
            for i in 0..n {
                let eta: f64 = StandardNormal.sample(&mut rng);
                x[[i, j]] = source[i] + 0.3 * eta;
            }
        }
        let y = Array2::from_shape_fn((n, 1), |(i, _)| {
            let delta: f64 = StandardNormal.sample(&mut rng);
            source[i] + 0.3 * delta
        });

        let x_c = center_columns(&x).unwrap();
        let y_c = center_columns(&y).unwrap();
        let out = tau_prerank(&x_c, &y_c, &config).unwrap();
        assert_eq!(out.matrix.n_rows(), n);
        assert_eq!(out.matrix.n_cols(), 1000, "run {run}: unexpected output width");
        if planted.iter().all(|j| out.kept_indices.contains(j)) {
            full_recoveries += 1;
        }
    }
    assert!(
        full_recoveries >= 95,
        "all planted columns survived in only {full_recoveries}/100 runs"
    );
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(300), "A8");
    println!(
        "A8 PASS: all 10 planted columns kept in {full_recoveries}/100 runs; output 78 x 1000; {:.1} s",
        elapsed.as_secs_f64()
    );
}

fn spcr_bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spcr"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_dir_of(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    text.lines()
        .rev()
        .find(|l| l.starts_with("run directory: "))
        .expect("run directory line present")
        .trim_start_matches("run directory: ")
        .to_string()
}

/// Runs the same invocation twice and checks the listed outputs match byte
/// for byte across the two run directories.
fn rerun_matches(dir: &Path, args: &[&str], files: &[&str]) -> String {
    let first = spcr_bin(dir, args);
    assert!(
        first.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = spcr_bin(dir, args);
    assert!(second.status.success());
    let d1 = run_dir_of(&first);
    let d2 = run_dir_of(&second);
    assert_ne!(d1, d2, "reruns must land in fresh directories");
    for name in files {
        let a = std::fs::read(dir.join(&d1).join(name)).unwrap();
        let b = std::fs::read(dir.join(&d2).join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs of {args:?}");
    }
    d1
}

#[test]
fn a9_reruns_are_byte_identical() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let sim = rerun_matches(
        dir,
        &[
            "simulate", "--spec-name", "uni", "--seed", "6", "--out", "runs",
        ],
        &["x-r000.csv", "y-r000.csv", "manifest.json"],
    );
    let x = format!("{sim}/x-r000.csv");
    let y = format!("{sim}/y-r000.csv");

    rerun_matches(
        dir,
        &[
            "rank", "--x", &x, "--y", &y, "--method", "knb1-pcH", "--method", "bhpt-pcH",
            "--seed", "6", "--out", "runs",
        ],
        &["ranking-b1.csv", "ranking-bair.csv", "summary.txt", "manifest.json"],
    );
    rerun_matches(
        dir,
        &[
            "select-dim", "--x", &x, "--y", &y, "--m", "6", "--seed", "6", "--out", "runs",
        ],
        &["selection.csv", "summary.txt", "manifest.json"],
    );
    let fit_dir = rerun_matches(
        dir,
        &[
            "fit", "--x", &x, "--y", &y, "--m", "6", "--seed", "6", "--out", "runs",
        ],
        &["model.json", "fitted.csv", "selection.csv", "manifest.json"],
    );
    let model = format!("{fit_dir}/model.json");
    rerun_matches(
        dir,
        &["predict", "--model", &model, "--x", &x, "--out", "runs"],
        &["predictions.csv", "manifest.json"],
    );
    rerun_matches(
        dir,
        &[
            "sweep", "--x", &x, "--y", &y, "--m-range", "2..6", "--seed", "6", "--out", "runs",
        ],
        &["results.csv", "summary.txt", "manifest.json"],
    );
    rerun_matches(
        dir,
        &[
            "bench", "--spec-name", "uni", "--replicates", "2", "--m-range", "2..5",
            "--seed", "6", "--out", "runs",
        ],
        &[
            "best.csv",
            "best_h_hist.csv",
            "best_method_counts.csv",
            "summary.txt",
            "manifest.json",
        ],
    );

    println!(
        "A9 PASS: all seven commands byte-identical across reruns; {:.1} s",
        start.elapsed().as_secs_f64()
    );
}
