//! Choice of the number of principal components via projection kurtosis.
//!
//! The principal component scores are first sphered so every direction has
//! unit sample variance. For each candidate count k the absolute excess
//! kurtosis `B(a) = |mean((a'z / sqrt(a'Sa))^4) - 3|` is maximized over unit
//! directions `a` of the first k sphered components. The achieved maximum
//! `beta_k`, scaled by `sqrt(N/4!)`, is compared against the expected maximum
//! `UB_k` that pure Gaussian data would produce, and the chosen count is the
//! k with the largest bias-adjusted score.
//!
//! The optimizer runs the classic fourth-moment fixed point
//! `a <- normalize(E[(a'z)^3 z] - 3a)` from several deterministic and seeded
//! random starts. Each start is also driven toward the kurtosis minimum with
//! a shifted power map that provably descends (the quartic form is convex),
//! because the criterion takes an absolute value and sub-Gaussian directions
//! can carry the extremum. The best |kurtosis - 3| over every evaluated
//! iterate wins, so supplying the previous maximizer as a warm start can
//! never make the result worse.

use std::collections::BTreeMap;

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numerics::{gram_rank, gram_spectral, CenteredMatrix, Spectral};
use crate::simgen::derive_seed;

/// Directions with projected variance below this are degenerate.
const VARIANCE_TOL: f64 = 1e-14;

/// Sphered principal component scores of a predictor subset.
#[derive(Debug, Clone)]
pub struct SpheredPcs {
    /// N x k_max matrix whose sample covariance is the identity.
    pub scores: Array2<f64>,
    /// Spectral decomposition of `(1/N) X'X` (all m eigenpairs).
    pub spectral: Spectral,
    /// Number of eigenvalues above the rank tolerance.
    pub k_max: usize,
}

/// Options of the kurtosis optimizer.
#[derive(Debug, Clone)]
pub struct KurtosisOptions {
    /// Number of seeded random restarts (canonical axes are always probed too).
    pub n_restarts: usize,
    /// Iteration cap per run.
    pub max_iter: usize,
    /// Convergence threshold on the change of direction per iteration.
    pub tol: f64,
    /// Seed of the restart stream.
    pub seed: u64,
    /// Optional starting direction, e.g. the maximizer from k-1 padded with a zero.
    pub warm_start: Option<Array1<f64>>,
}

impl Default for KurtosisOptions {
    fn default() -> Self {
        KurtosisOptions {
            n_restarts: 10,
            max_iter: 200,
            tol: 1e-6,
            seed: 0,
            warm_start: None,
        }
    }
}

/// Outcome of the kurtosis maximization.
#[derive(Debug, Clone)]
pub struct KurtosisResult {
    /// Best direction found (unit norm).
    pub alpha: Array1<f64>,
    /// Absolute excess kurtosis at `alpha`; equals
    /// `projection_kurtosis(data, alpha)` exactly.
    pub beta_hat: f64,
    /// Whether at least one run met the direction tolerance.
    pub converged: bool,
    /// Number of starting directions probed.
    pub n_restarts_used: usize,
}

/// User-supplied override table for the Gaussian-maximum adjustment.
#[derive(Debug, Clone, Default)]
pub struct UbTable {
    map: BTreeMap<usize, f64>,
}

impl UbTable {
    /// Parses a two-column whitespace-separated table of `k value` lines.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<UbTable> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "adjustment table line {}: expected `k value`, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            let k: usize = fields[0].parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "adjustment table line {}: bad component count {:?}",
                    lineno + 1,
                    fields[0]
                ))
            })?;
            let v: f64 = fields[1].parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "adjustment table line {}: bad value {:?}",
                    lineno + 1,
                    fields[1]
                ))
            })?;
            if !(2..=50).contains(&k) {
                return Err(Error::InvalidArgument(format!(
                    "adjustment table line {}: k = {k} outside [2, 50]",
                    lineno + 1
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "adjustment table line {}: value must be finite",
                    lineno + 1
                )));
            }
            if map.insert(k, v).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "adjustment table line {}: duplicate entry for k = {k}",
                    lineno + 1
                )));
            }
        }
        Ok(UbTable { map })
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.map.get(&k).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Options of the component-count selection.
#[derive(Debug, Clone, Default)]
pub struct SelectionOptions {
    pub kurtosis: KurtosisOptions,
    /// Overrides of the Gaussian-maximum adjustment, keyed by k.
    pub ub_table: Option<UbTable>,
}

/// Result of the component-count selection over k = 2..=k_max.
#[derive(Debug, Clone)]
pub struct DimensionSelection {
    /// Number of predictor columns the selection ran on.
    pub m: usize,
    /// Candidate component counts, ascending.
    pub ks: Vec<usize>,
    /// Maximized absolute excess kurtosis per candidate.
    pub beta_hats: Vec<f64>,
    /// Gaussian-maximum adjustment per candidate.
    pub ub_values: Vec<f64>,
    /// Bias-adjusted scores `sqrt(N/4!) * beta_k - UB_k`.
    pub scores: Vec<f64>,
    /// Candidates whose optimizer failed to converge even after the retry.
    pub non_converged: Vec<usize>,
    /// Selected component count.
    pub chosen_h: usize,
}

/// Sphered principal component scores `S = X Gamma Lambda^(-1/2)`.
///
/// Directions whose eigenvalue falls below the rank tolerance are dropped,
/// so the returned scores always have unit sample covariance.
pub fn sphere_pcs(x_m: &CenteredMatrix) -> Result<SpheredPcs> {
    let spectral = gram_spectral(x_m)?;
    let k_max = gram_rank(&spectral, x_m.n_rows(), x_m.n_cols());
    if k_max == 0 {
        return Err(Error::DegenerateData(
            "predictor subset has no variance".to_string(),
        ));
    }
    let gamma_k = spectral.eigenvectors.slice(s![.., ..k_max]);
    let mut scores = x_m.values().dot(&gamma_k);
    for j in 0..k_max {
        let scale = spectral.eigenvalues[j].sqrt();
        scores.column_mut(j).mapv_inplace(|v| v / scale);
    }
    Ok(SpheredPcs {
        scores,
        spectral,
        k_max,
    })
}

/// Projection moments used by both the public evaluation and the optimizer:
/// returns `(|m4 / var^2 - 3|, var)` or None for a degenerate direction.
fn eval_direction(data: &Array2<f64>, alpha: &Array1<f64>) -> Option<(f64, f64)> {
    let proj = data.dot(alpha);
    let n = proj.len() as f64;
    let var = proj.mapv(|v| v * v).sum() / n;
    if !(var > VARIANCE_TOL) || !var.is_finite() {
        return None;
    }
    let m4 = proj.mapv(|v| v * v * v * v).sum() / n;
    let beta = (m4 / (var * var) - 3.0).abs();
    if !beta.is_finite() {
        return None;
    }
    Some((beta, var))
}

/// Absolute excess kurtosis of the projection of `data` onto `alpha`,
/// standardized by the projected sample variance (divisor N).
///
/// The value is invariant under rescaling of `alpha`; a direction with
/// numerically zero projected variance is an error.
pub fn projection_kurtosis(data: &Array2<f64>, alpha: &Array1<f64>) -> Result<f64> {
    if alpha.len() != data.ncols() {
        return Err(Error::InvalidArgument(format!(
            "direction has {} entries but data has {} columns",
            alpha.len(),
            data.ncols()
        )));
    }
    if data.nrows() < 2 {
        return Err(Error::InvalidData(
            "kurtosis needs at least 2 observations".to_string(),
        ));
    }
    eval_direction(data, alpha)
        .map(|(beta, _)| beta)
        .ok_or(Error::DegenerateDirection)
}

fn normalize(v: &mut Array1<f64>) -> f64 {
    let norm = v.dot(v).sqrt();
    if norm > 0.0 {
        v.mapv_inplace(|x| x / norm);
    }
    norm
}

/// Maximizes the absolute excess kurtosis over unit directions of `data`.
///
/// `data` should be sphered (unit sample covariance): the fixed point assumes
/// it for its Newton behavior, although the criterion itself is evaluated
/// with the true projected variance throughout.
pub fn maximize_kurtosis(data: &Array2<f64>, opts: &KurtosisOptions) -> Result<KurtosisResult> {
    let (n, k) = data.dim();
    if k == 0 {
        return Err(Error::InvalidArgument("data has no columns".to_string()));
    }
    if n < 4 {
        return Err(Error::InvalidData(format!(
            "kurtosis maximization needs at least 4 observations, got {n}"
        )));
    }
    if let Some(w) = &opts.warm_start {
        if w.len() != k {
            return Err(Error::InvalidArgument(format!(
                "warm start has {} entries but data has {k} columns",
                w.len()
            )));
        }
    }

    if k == 1 {
        let alpha = Array1::ones(1);
        let beta_hat = projection_kurtosis(data, &alpha)?;
        return Ok(KurtosisResult {
            alpha,
            beta_hat,
            converged: true,
            n_restarts_used: 1,
        });
    }

    // Shift that makes the descent map monotone: g >= 3 * lambda_max(M2)
    // with M2 = (1/N) sum ||z_i||^2 z_i z_i' bounding the quartic Hessian.
    let row_sq: Array1<f64> = data.map_axis(ndarray::Axis(1), |r| r.dot(&r));
    let weighted = data * &row_sq.view().insert_axis(ndarray::Axis(1));
    let mut m2 = data.t().dot(&weighted);
    m2.mapv_inplace(|v| v / n as f64);
    let m2 = (&m2 + &m2.t()) * 0.5;
    let (m2_eigs, _) = m2.eigh(UPLO::Lower)?;
    let lambda_max = m2_eigs.iter().cloned().fold(0.0_f64, f64::max);
    let shift = 3.0 * lambda_max * 1.01 + 1e-6;

    // Starting directions: warm start, canonical axes, seeded random units.
    let mut starts: Vec<Array1<f64>> = Vec::with_capacity(opts.n_restarts + k + 1);
    if let Some(w) = &opts.warm_start {
        let mut w = w.clone();
        if normalize(&mut w) > 0.0 {
            starts.push(w);
        }
    }
    for j in 0..k {
        let mut e = Array1::zeros(k);
        e[j] = 1.0;
        starts.push(e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.n_restarts {
        let mut v: Array1<f64> = Array1::zeros(k);
        loop {
            for x in v.iter_mut() {
                *x = StandardNormal.sample(&mut rng);
            }
            if normalize(&mut v) > 1e-8 {
                break;
            }
        }
        starts.push(v.clone());
    }
    let n_restarts_used = starts.len();

    let nf = n as f64;
    let mut best: Option<(f64, Array1<f64>)> = None;
    let mut any_converged = false;

    for start in &starts {
        // First pass chases the kurtosis maximum with the classic fixed
        // point; second pass descends to the minimum with the shifted map.
        for seek_min in [false, true] {
            let mut alpha = start.clone();
            let mut iter = 0usize;
            loop {
                let proj = data.dot(&alpha);
                let var = proj.mapv(|v| v * v).sum() / nf;
                if !(var > VARIANCE_TOL) || !var.is_finite() {
                    break;
                }
                let m4 = proj.mapv(|v| v * v * v * v).sum() / nf;
                let beta = (m4 / (var * var) - 3.0).abs();
                if beta.is_finite()
                    && best.as_ref().map_or(true, |(b, _)| beta > *b)
                {
                    best = Some((beta, alpha.clone()));
                }
                if iter >= opts.max_iter {
                    break;
                }
                let cubes = proj.mapv(|v| v * v * v);
                let mut t = data.t().dot(&cubes);
                t.mapv_inplace(|v| v / nf);
                let mut cand = if seek_min {
                    alpha.mapv(|v| v * shift) - &t
                } else {
                    &t - &alpha.mapv(|v| v * 3.0)
                };
                if normalize(&mut cand) <= 1e-14 {
                    break;
                }
                let align = cand.dot(&alpha).abs();
                alpha = cand;
                iter += 1;
                if 1.0 - align < opts.tol {
                    if let Some((beta, _)) = eval_direction(data, &alpha) {
                        if best.as_ref().map_or(true, |(b, _)| beta > *b) {
                            best = Some((beta, alpha.clone()));
                        }
                    }
                    any_converged = true;
                    break;
                }
            }
        }
    }

    let (_, mut alpha) = best.ok_or(Error::DegenerateData(
        "no projection direction has usable variance".to_string(),
    ))?;
    normalize(&mut alpha);
    let beta_hat = projection_kurtosis(data, &alpha)?;
    Ok(KurtosisResult {
        alpha,
        beta_hat,
        converged: any_converged,
        n_restarts_used,
    })
}

/// Expected maximum of the scaled kurtosis deviation under Gaussian data:
/// `UB_k = sqrt(0.6) * E[chi_rho]` with `rho = C(k+3, 4)` and
/// `E[chi_rho] = sqrt(2) Gamma((rho+1)/2) / Gamma(rho/2)`.
pub fn ub_k(k: usize) -> Result<f64> {
    if !(2..=50).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "component count k = {k} outside the supported range [2, 50]"
        )));
    }
    let k = k as u64;
    let rho = (k * (k + 1) * (k + 2) * (k + 3) / 24) as f64;
    let e_chi = std::f64::consts::SQRT_2 * (ln_gamma((rho + 1.0) / 2.0) - ln_gamma(rho / 2.0)).exp();
    Ok(0.6_f64.sqrt() * e_chi)
}

/// Picks the candidate with the largest score, ties resolved toward the
/// smallest k; `excluded` candidates only win when every k is excluded.
fn choose_h(ks: &[usize], scores: &[f64], excluded: &[usize]) -> usize {
    let eligible: Vec<usize> = (0..ks.len())
        .filter(|i| !excluded.contains(&ks[*i]))
        .collect();
    let pool = if eligible.is_empty() {
        (0..ks.len()).collect()
    } else {
        eligible
    };
    let mut best = pool[0];
    for &i in &pool[1..] {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    ks[best]
}

/// Selects the number of components for a predictor subset.
///
/// Candidates run from 2 to `min(k_max, 50)`. Each candidate's optimizer is
/// warm-started with the previous maximizer padded by a zero, which makes the
/// achieved `beta_k` nondecreasing in k. A candidate that fails to converge
/// is retried once with four times the iteration budget; if it still fails it
/// is reported and dropped from the argmax (unless every candidate failed).
pub fn select_dimension(
    x_m: &CenteredMatrix,
    opts: &SelectionOptions,
) -> Result<DimensionSelection> {
    let sphere = sphere_pcs(x_m)?;
    let upper = sphere.k_max.min(50);
    if upper < 2 {
        return Err(Error::DegenerateData(format!(
            "subset admits only {upper} usable component(s); selection needs at least 2"
        )));
    }
    let n = x_m.n_rows();
    let scale = (n as f64 / 24.0).sqrt();

    let mut ks = Vec::new();
    let mut beta_hats = Vec::new();
    let mut ub_values = Vec::new();
    let mut scores = Vec::new();
    let mut non_converged = Vec::new();
    let mut warm: Option<Array1<f64>> = None;

    for k in 2..=upper {
        let data_k = sphere.scores.slice(s![.., ..k]).to_owned();
        let warm_start = warm.take().map(|prev| {
            let mut padded = Array1::zeros(k);
            padded.slice_mut(s![..k - 1]).assign(&prev);
            padded
        });
        let kopts = KurtosisOptions {
            n_restarts: opts.kurtosis.n_restarts,
            max_iter: opts.kurtosis.max_iter,
            tol: opts.kurtosis.tol,
            seed: derive_seed(opts.kurtosis.seed, &[k as u64]),
            warm_start,
        };
        let mut res = maximize_kurtosis(&data_k, &kopts)?;
        if !res.converged {
            let retry = KurtosisOptions {
                max_iter: opts.kurtosis.max_iter.saturating_mul(4),
                warm_start: Some(res.alpha.clone()),
                ..kopts
            };
            res = maximize_kurtosis(&data_k, &retry)?;
            if !res.converged {
                non_converged.push(k);
            }
        }
        let ub = match opts.ub_table.as_ref().and_then(|t| t.get(k)) {
            Some(v) => v,
            None => ub_k(k)?,
        };
        ks.push(k);
        beta_hats.push(res.beta_hat);
        ub_values.push(ub);
        scores.push(scale * res.beta_hat - ub);
        warm = Some(res.alpha);
    }

    let chosen_h = choose_h(&ks, &scores, &non_converged);
    Ok(DimensionSelection {
        m: x_m.n_cols(),
        ks,
        beta_hats,
        ub_values,
        scores,
        non_converged,
        chosen_h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::center_columns;
    use rand::Rng;

    fn sphered_from_raw(raw: &Array2<f64>) -> Array2<f64> {
        let c = center_columns(raw).unwrap();
        sphere_pcs(&c).unwrap().scores
    }

    fn random_mixed_data(seed: u64, n: usize) -> Array2<f64> {
        // Two non-Gaussian sources through a random rotation.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let (c, s) = (theta.cos(), theta.sin());
        let mut raw = Array2::zeros((n, 2));
        let exp = rand_distr::Exp::new(1.0).unwrap();
        for i in 0..n {
            let u: f64 = rng.random::<f64>() - 0.5;
            let e: f64 = exp.sample(&mut rng) - 1.0;
            raw[[i, 0]] = c * u - s * e;
            raw[[i, 1]] = s * u + c * e;
        }
        raw
    }

    #[test]
    fn ub_values_match_independent_computation() {
        // Frozen from an independent evaluation of
        // sqrt(0.6) * sqrt(2) * exp(lgamma((rho+1)/2) - lgamma(rho/2)).
        let expected = [
            (2, 1.648103261966),
            (3, 2.950450594848),
            (4, 4.549964053430),
            (5, 6.457637262271),
            (6, 8.677591692873),
            (10, 20.705074377278),
            (50, 419.159516078429),
        ];
        for (k, want) in expected {
            let got = ub_k(k).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "k = {k}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn ub_k_rejects_out_of_range() {
        assert!(ub_k(1).is_err());
        assert!(ub_k(51).is_err());
    }

    #[test]
    fn ub_table_parses_and_validates() {
        let t = UbTable::from_text("# comment\n2 1.5\n\n10 20.0\n").unwrap();
        assert_eq!(t.get(2), Some(1.5));
        assert_eq!(t.get(10), Some(20.0));
        assert_eq!(t.get(3), None);

        assert!(UbTable::from_text("2 1.5 extra").is_err());
        assert!(UbTable::from_text("1 0.5").is_err());
        assert!(UbTable::from_text("2 abc").is_err());
        assert!(UbTable::from_text("2 1.0\n2 2.0").is_err());
    }

    #[test]
    fn sphered_scores_have_identity_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut raw = Array2::zeros((60, 8));
        for v in raw.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        // Stretch some columns so the eigenvalues vary.
        for i in 0..60 {
            raw[[i, 0]] *= 9.0;
            raw[[i, 1]] *= 0.2;
        }
        let c = center_columns(&raw).unwrap();
        let sp = sphere_pcs(&c).unwrap();
        assert_eq!(sp.k_max, 8);
        let n = sp.scores.nrows() as f64;
        let cov = sp.scores.t().dot(&sp.scores) / n;
        let dev = (&cov - &Array2::<f64>::eye(8))
            .mapv(f64::abs)
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        assert!(dev < 1e-8, "covariance deviates from identity by {dev}");
    }

    #[test]
    fn sphere_pcs_drops_dependent_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut raw = Array2::zeros((40, 5));
        for v in raw.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        for i in 0..40 {
            raw[[i, 4]] = raw[[i, 1]]; // duplicate column
        }
        let c = center_columns(&raw).unwrap();
        let sp = sphere_pcs(&c).unwrap();
        assert_eq!(sp.k_max, 4);
    }

    #[test]
    fn projection_kurtosis_known_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 40_000;
        let mut raw = Array2::zeros((n, 2));
        for i in 0..n {
            raw[[i, 0]] = rng.random::<f64>(); // uniform: excess -1.2
            raw[[i, 1]] = StandardNormal.sample(&mut rng); // excess 0
        }
        let c = center_columns(&raw).unwrap();
        let data = c.values().clone();
        let e0 = Array1::from_vec(vec![1.0, 0.0]);
        let e1 = Array1::from_vec(vec![0.0, 1.0]);
        let b_u = projection_kurtosis(&data, &e0).unwrap();
        let b_g = projection_kurtosis(&data, &e1).unwrap();
        assert!((b_u - 1.2).abs() < 0.1, "uniform |excess| = {b_u}");
        assert!(b_g < 0.15, "gaussian |excess| = {b_g}");
    }

    #[test]
    fn projection_kurtosis_is_sign_and_scale_invariant() {
        let raw = random_mixed_data(6, 500);
        let data = sphered_from_raw(&raw);
        let alpha = Array1::from_vec(vec![0.6, -0.8]);
        let b = projection_kurtosis(&data, &alpha).unwrap();
        let b_neg = projection_kurtosis(&data, &alpha.mapv(|v| -v)).unwrap();
        let b_scaled = projection_kurtosis(&data, &alpha.mapv(|v| 2.5 * v)).unwrap();
        assert_eq!(b, b_neg);
        assert!((b - b_scaled).abs() < 1e-12);
    }

    #[test]
    fn projection_kurtosis_degenerate_direction_errors() {
        let mut data = Array2::zeros((30, 2));
        for i in 0..30 {
            data[[i, 0]] = (i as f64) - 14.5;
        }
        let alpha = Array1::from_vec(vec![0.0, 1.0]);
        assert!(matches!(
            projection_kurtosis(&data, &alpha),
            Err(Error::DegenerateDirection)
        ));
    }

    #[test]
    fn optimizer_matches_grid_search_in_two_dimensions() {
        for seed in 0..5u64 {
            let raw = random_mixed_data(100 + seed, 300);
            let data = sphered_from_raw(&raw);
            let opts = KurtosisOptions {
                seed,
                ..KurtosisOptions::default()
            };
            let res = maximize_kurtosis(&data, &opts).unwrap();

            let mut grid_best = 0.0_f64;
            for g in 0..3600 {
                let theta = g as f64 * std::f64::consts::PI / 3600.0;
                let alpha = Array1::from_vec(vec![theta.cos(), theta.sin()]);
                grid_best = grid_best.max(projection_kurtosis(&data, &alpha).unwrap());
            }
            assert!(
                (res.beta_hat - grid_best).abs() <= 1e-3,
                "seed {seed}: optimizer {} vs grid {grid_best}",
                res.beta_hat
            );
        }
    }

    #[test]
    fn optimizer_finds_sub_gaussian_extremum() {
        // Uniform sources only: every direction is sub-Gaussian, the axes are
        // the extrema with |excess| = 1.2.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 5000;
        let mut raw = Array2::zeros((n, 2));
        for i in 0..n {
            raw[[i, 0]] = rng.random::<f64>();
            raw[[i, 1]] = rng.random::<f64>();
        }
        let data = sphered_from_raw(&raw);
        let res = maximize_kurtosis(&data, &KurtosisOptions::default()).unwrap();
        assert!(res.converged);
        assert!((res.beta_hat - 1.2).abs() < 0.15, "found {}", res.beta_hat);
    }

    #[test]
    fn warm_start_at_optimum_is_never_lost() {
        let raw = random_mixed_data(9, 400);
        let data = sphered_from_raw(&raw);
        let first = maximize_kurtosis(&data, &KurtosisOptions::default()).unwrap();
        let warm = KurtosisOptions {
            n_restarts: 0,
            max_iter: 2,
            warm_start: Some(first.alpha.clone()),
            ..KurtosisOptions::default()
        };
        let second = maximize_kurtosis(&data, &warm).unwrap();
        assert!(second.beta_hat >= first.beta_hat - 1e-12);
    }

    #[test]
    fn result_beta_equals_direct_recomputation() {
        let raw = random_mixed_data(10, 350);
        let data = sphered_from_raw(&raw);
        let res = maximize_kurtosis(&data, &KurtosisOptions::default()).unwrap();
        let direct = projection_kurtosis(&data, &res.alpha).unwrap();
        assert_eq!(res.beta_hat, direct);
    }

    #[test]
    fn selection_beta_is_monotone_in_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut raw = Array2::zeros((150, 5));
        for v in raw.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let exp = rand_distr::Exp::new(1.0).unwrap();
        for i in 0..150 {
            raw[[i, 2]] = exp.sample(&mut rng);
        }
        let c = center_columns(&raw).unwrap();
        let sel = select_dimension(&c, &SelectionOptions::default()).unwrap();
        for w in sel.beta_hats.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-12,
                "beta sequence not monotone: {:?}",
                sel.beta_hats
            );
        }
        assert!(sel.chosen_h >= 2 && sel.chosen_h <= sel.ks.len() + 1);
    }

    #[test]
    fn selection_recovers_two_non_gaussian_directions() {
        // Two strongly non-Gaussian sources and three Gaussian ones: the
        // bias-adjusted score should peak at 2 components.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 500;
        let exp = rand_distr::Exp::new(1.0).unwrap();
        let mut raw = Array2::zeros((n, 5));
        for i in 0..n {
            let u: f64 = rng.random::<f64>() - 0.5;
            let e: f64 = exp.sample(&mut rng) - 1.0;
            let g0: f64 = StandardNormal.sample(&mut rng);
            let g1: f64 = StandardNormal.sample(&mut rng);
            let g2: f64 = StandardNormal.sample(&mut rng);
            raw[[i, 0]] = 3.0 * u + 0.1 * g0;
            raw[[i, 1]] = 2.0 * e + 0.1 * g1;
            raw[[i, 2]] = g0;
            raw[[i, 3]] = g1 + 0.5 * g2;
            raw[[i, 4]] = g2;
        }
        let c = center_columns(&raw).unwrap();
        let sel = select_dimension(&c, &SelectionOptions::default()).unwrap();
        assert_eq!(sel.chosen_h, 2, "scores: {:?}", sel.scores);
    }

    #[test]
    fn selection_honors_ub_override() {
        let raw = random_mixed_data(13, 200);
        let c = center_columns(&raw).unwrap();
        let table = UbTable::from_text("2 100.0").unwrap();
        let opts = SelectionOptions {
            ub_table: Some(table),
            ..SelectionOptions::default()
        };
        let sel = select_dimension(&c, &opts).unwrap();
        assert_eq!(sel.ub_values[0], 100.0);
        assert!(sel.scores[0] < 0.0);
    }

    #[test]
    fn choose_h_prefers_smallest_on_ties_and_respects_exclusions() {
        assert_eq!(choose_h(&[2, 3, 4], &[1.0, 1.0, 0.5], &[]), 2);
        assert_eq!(choose_h(&[2, 3, 4], &[0.1, 1.0, 1.0], &[]), 3);
        assert_eq!(choose_h(&[2, 3, 4], &[0.1, 1.0, 0.9], &[3]), 4);
        // All excluded: fall back to the full pool.
        assert_eq!(choose_h(&[2, 3], &[0.2, 0.9], &[2, 3]), 3);
    }

    #[test]
    fn selection_rejects_rank_one_data() {
        let mut raw = Array2::zeros((20, 3));
        for i in 0..20 {
            let t = i as f64;
            raw[[i, 0]] = t;
            raw[[i, 1]] = 2.0 * t;
            raw[[i, 2]] = -t;
        }
        let c = center_columns(&raw).unwrap();
        assert!(matches!(
            select_dimension(&c, &SelectionOptions::default()),
            Err(Error::DegenerateData(_))
        ));
    }
}
