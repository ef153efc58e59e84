//! Principal component regression on a ranked predictor subset.
//!
//! A fitted model keeps the top `m` ranked columns, projects them onto the
//! leading `h` eigenvectors of their scaled Gram matrix, and regresses the
//! centered responses on those component scores. Prediction centers a new
//! observation with the stored training means, projects it the same way and
//! adds the response means back.
//!
//! The module also provides the equivalent eigenvector-sum form of the
//! prediction, the single-component baseline built on per-column scores, the
//! root-mean-square error criterion, and a sweep that evaluates every
//! configured method over a range of subset sizes.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{s, Array1, Array2, Axis};
use ndarray_linalg::Solve;
use rayon::prelude::*;

use crate::dimension::{
    select_dimension, DimensionSelection, KurtosisOptions, SelectionOptions, UbTable,
};
use crate::error::{Error, Result};
use crate::numerics::{center_columns, gram_rank, gram_spectral, CenteredMatrix};
use crate::ranking::{rank_with_scheme, take_ranked_subset, RankingResult, RankingScheme};
use crate::simgen::derive_seed;

/// A named method: a ranking scheme combined with a component-count policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Rank with `b1`, select the component count automatically.
    Knb1PcH,
    /// Rank with `b2`, select the component count automatically.
    Knb2PcH,
    /// Rank with per-column scores, select the component count automatically.
    BhptPcH,
    /// Rank with per-column scores, always use one component.
    BhptPc1,
    /// No ranking (original column order), select the count automatically.
    NrPcH,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Knb1PcH,
        Method::Knb2PcH,
        Method::BhptPcH,
        Method::BhptPc1,
        Method::NrPcH,
    ];

    /// The command-line tag of the method.
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Knb1PcH => "knb1-pcH",
            Method::Knb2PcH => "knb2-pcH",
            Method::BhptPcH => "bhpt-pcH",
            Method::BhptPc1 => "bhpt-pc1",
            Method::NrPcH => "nr-pcH",
        }
    }

    /// Ranking scheme the method uses to order variables.
    pub fn ranking_scheme(&self) -> RankingScheme {
        match self {
            Method::Knb1PcH => RankingScheme::B1,
            Method::Knb2PcH => RankingScheme::B2,
            Method::BhptPcH | Method::BhptPc1 => RankingScheme::Bair,
            Method::NrPcH => RankingScheme::Natural,
        }
    }

    /// Whether the component count is selected from the data (as opposed to
    /// being fixed at one).
    pub fn selects_dimension(&self) -> bool {
        !matches!(self, Method::BhptPc1)
    }

    /// Whether the ranking scheme needs a univariate response.
    pub fn needs_univariate(&self) -> bool {
        matches!(self, Method::BhptPcH | Method::BhptPc1)
    }

    /// Stable identifier used for seed derivation and row ordering; it does
    /// not depend on the order methods were requested in.
    fn stable_id(&self) -> u64 {
        match self {
            Method::Knb1PcH => 0,
            Method::Knb2PcH => 1,
            Method::BhptPcH => 2,
            Method::BhptPc1 => 3,
            Method::NrPcH => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.tag() == s)
            .ok_or_else(|| {
                let tags: Vec<&str> = Method::ALL.iter().map(|m| m.tag()).collect();
                Error::InvalidArgument(format!(
                    "unknown method {s:?}; expected one of {}",
                    tags.join(", ")
                ))
            })
    }
}

/// How the number of components is chosen when fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HPolicy {
    /// Pick the count that maximizes the bias-adjusted kurtosis score.
    #[default]
    Auto,
    /// Use exactly this many components.
    Fixed(usize),
}

/// Fit-time configuration.
#[derive(Debug, Clone, Default)]
pub struct FitConfig {
    pub h_policy: HPolicy,
    /// Options of the automatic component-count selection; ignored when the
    /// count is fixed.
    pub selection: SelectionOptions,
}

/// A fitted principal component regression model, self-contained for
/// prediction on new data of the original width.
#[derive(Debug, Clone)]
pub struct PcrModel {
    /// Column indices of the kept variables, in rank order.
    pub selected_indices: Vec<usize>,
    /// Training means of all original columns.
    pub x_column_means: Array1<f64>,
    /// The m x h eigenvector basis of the subset's scaled Gram matrix.
    pub loadings: Array2<f64>,
    /// The h x q regression coefficients of the component scores.
    pub coefficients: Array2<f64>,
    /// Training means of the responses, added back at prediction.
    pub y_means: Array1<f64>,
    /// Number of kept variables.
    pub m: usize,
    /// Number of components.
    pub h: usize,
}

/// A fitted model plus the selection diagnostics when the component count
/// was chosen automatically.
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub model: PcrModel,
    pub selection: Option<DimensionSelection>,
}

/// Fits the regression of `y_raw` on the `h` leading components of the top
/// `m` ranked columns of `x`.
///
/// Responses are centered internally and their means stored on the model, so
/// training responses may be passed raw. With [`HPolicy::Auto`] the component
/// count comes from the kurtosis-based selection; a fixed count must lie in
/// `[1, rank]` of the subset's Gram matrix.
pub fn fit(
    x: &CenteredMatrix,
    y_raw: &Array2<f64>,
    ranking: &RankingResult,
    m: usize,
    config: &FitConfig,
) -> Result<FitOutput> {
    if y_raw.nrows() != x.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "predictors have {} rows but responses have {}",
            x.n_rows(),
            y_raw.nrows()
        )));
    }
    let y = center_columns(y_raw)?;
    let (x_m, selected_indices) = take_ranked_subset(x, ranking, m)?;
    let spectral = gram_spectral(&x_m)?;
    let rank = gram_rank(&spectral, x_m.n_rows(), x_m.n_cols());
    if rank == 0 {
        return Err(Error::DegenerateData(
            "ranked subset has no variance".to_string(),
        ));
    }

    let (h, selection) = match config.h_policy {
        HPolicy::Fixed(h) => {
            if h < 1 || h > rank {
                return Err(Error::InvalidArgument(format!(
                    "component count h = {h} must lie in [1, {rank}] for this subset"
                )));
            }
            (h, None)
        }
        HPolicy::Auto => {
            let sel = select_dimension(&x_m, &config.selection)?;
            (sel.chosen_h, Some(sel))
        }
    };

    let loadings = spectral.eigenvectors.slice(s![.., ..h]).to_owned();
    let scores = x_m.values().dot(&loadings);
    let a = scores.t().dot(&scores);
    let b = scores.t().dot(y.values());
    let q = y.n_cols();
    let mut coefficients = Array2::zeros((h, q));
    for j in 0..q {
        let rhs = b.column(j).to_owned();
        let sol = a.solve(&rhs)?;
        coefficients.column_mut(j).assign(&sol);
    }

    Ok(FitOutput {
        model: PcrModel {
            selected_indices,
            x_column_means: x.column_means().clone(),
            loadings,
            coefficients,
            y_means: y.column_means().clone(),
            m,
            h,
        },
        selection,
    })
}

/// Predicts responses for new observations given with the full original
/// column width, one observation per row.
pub fn predict(model: &PcrModel, z: &Array2<f64>) -> Result<Array2<f64>> {
    if z.ncols() != model.x_column_means.len() {
        return Err(Error::InvalidArgument(format!(
            "new data has {} columns but the model was trained on {}",
            z.ncols(),
            model.x_column_means.len()
        )));
    }
    let mut z_m = z.select(Axis(1), &model.selected_indices);
    for (j, &orig) in model.selected_indices.iter().enumerate() {
        let mean = model.x_column_means[orig];
        z_m.column_mut(j).mapv_inplace(|v| v - mean);
    }
    let mut y_hat = z_m.dot(&model.loadings).dot(&model.coefficients);
    y_hat += &model.y_means;
    Ok(y_hat)
}

/// Predicts the response for a single observation.
pub fn predict_row(model: &PcrModel, z: &Array1<f64>) -> Result<Array1<f64>> {
    let z2 = z
        .view()
        .insert_axis(Axis(0))
        .to_owned();
    let y = predict(model, &z2)?;
    Ok(y.row(0).to_owned())
}

/// In-sample fitted values of a model on the centered matrix it was trained
/// on. Equivalent to [`predict`] on the raw training rows, without
/// rebuilding them.
pub fn fitted_values(model: &PcrModel, x: &CenteredMatrix) -> Result<Array2<f64>> {
    if x.n_cols() != model.x_column_means.len() {
        return Err(Error::InvalidArgument(format!(
            "training matrix has {} columns but the model was trained on {}",
            x.n_cols(),
            model.x_column_means.len()
        )));
    }
    let z_m = x.values().select(Axis(1), &model.selected_indices);
    let mut y_hat = z_m.dot(&model.loadings).dot(&model.coefficients);
    y_hat += &model.y_means;
    Ok(y_hat)
}

/// Prediction through the component sum
/// `y_hat = y_means + sum_j (1/(N lambda_j)) Y' X_m g_j g_j' z_m` over the
/// first `h` eigenpairs of the subset's scaled Gram matrix.
///
/// Algebraically identical to [`predict`] on the same subset; it exists as an
/// independent route so the two implementations can check each other.
/// `z_m` must already be centered and restricted to the ranked subset.
pub fn predict_via_components(
    x_m: &CenteredMatrix,
    y: &CenteredMatrix,
    h: usize,
    z_m: &Array1<f64>,
) -> Result<Array1<f64>> {
    if z_m.len() != x_m.n_cols() {
        return Err(Error::InvalidArgument(format!(
            "observation has {} entries but the subset has {} columns",
            z_m.len(),
            x_m.n_cols()
        )));
    }
    if y.n_rows() != x_m.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "predictors have {} rows but responses have {}",
            x_m.n_rows(),
            y.n_rows()
        )));
    }
    let spectral = gram_spectral(x_m)?;
    let rank = gram_rank(&spectral, x_m.n_rows(), x_m.n_cols());
    if h < 1 || h > rank {
        return Err(Error::InvalidArgument(format!(
            "component count h = {h} must lie in [1, {rank}] for this subset"
        )));
    }
    let n = x_m.n_rows() as f64;
    let mut y_hat = y.column_means().clone();
    for j in 0..h {
        let gamma = spectral.eigenvectors.column(j);
        let weight = gamma.dot(z_m) / (n * spectral.eigenvalues[j]);
        let scores = x_m.values().dot(&gamma);
        let contrib = y.values().t().dot(&scores);
        y_hat.zip_mut_with(&contrib, |acc, &c| *acc += c * weight);
    }
    Ok(y_hat)
}

/// Single-component baseline: ranks with per-column scores and predicts a
/// univariate response from the leading component of the top `m` columns,
/// `y_hat = y_mean + (1/(N lambda_1)) y' X_m g_1 g_1' z_m`.
///
/// `z` is a raw observation of the full original width.
pub fn predict_spc_baseline(
    x: &CenteredMatrix,
    y: &CenteredMatrix,
    ranking: &RankingResult,
    m: usize,
    z: &Array1<f64>,
) -> Result<f64> {
    if y.n_cols() != 1 {
        return Err(Error::UnsupportedResponse(format!(
            "the single-component baseline needs a univariate response, got {} columns",
            y.n_cols()
        )));
    }
    if ranking.scheme != RankingScheme::Bair {
        return Err(Error::InvalidArgument(format!(
            "the single-component baseline expects the per-column ranking, got {}",
            ranking.scheme.label()
        )));
    }
    if z.len() != x.n_cols() {
        return Err(Error::InvalidArgument(format!(
            "observation has {} entries but the data has {} columns",
            z.len(),
            x.n_cols()
        )));
    }
    let (x_m, idx) = take_ranked_subset(x, ranking, m)?;
    let z_m = Array1::from_iter(idx.iter().map(|&j| z[j] - x.column_means()[j]));
    let spectral = gram_spectral(&x_m)?;
    if gram_rank(&spectral, x_m.n_rows(), x_m.n_cols()) == 0 {
        return Err(Error::DegenerateData(
            "leading component of the subset has no variance".to_string(),
        ));
    }
    let n = x_m.n_rows() as f64;
    let gamma1 = spectral.eigenvectors.column(0);
    let scores = x_m.values().dot(&gamma1);
    let yv = y.values().column(0);
    let value = yv.dot(&scores) * gamma1.dot(&z_m) / (n * spectral.eigenvalues[0]);
    Ok(y.column_means()[0] + value)
}

/// Root-mean-square Euclidean prediction error:
/// `sqrt(mean_i ||y_hat_i - y_i||^2)`.
pub fn lse(y_hat: &Array2<f64>, y: &Array2<f64>) -> Result<f64> {
    if y_hat.dim() != y.dim() {
        return Err(Error::InvalidArgument(format!(
            "prediction is {:?} but reference is {:?}",
            y_hat.dim(),
            y.dim()
        )));
    }
    if y.nrows() == 0 {
        return Err(Error::InvalidArgument(
            "error criterion needs at least one row".to_string(),
        ));
    }
    let n = y.nrows() as f64;
    let sq = (y_hat - y).mapv(|v| v * v).sum();
    Ok((sq / n).sqrt())
}

/// How sweep rows are evaluated.
#[derive(Debug, Clone, Copy)]
pub enum EvalMode<'a> {
    /// Error of the in-sample fitted values.
    InSample,
    /// Error on held-out raw data of the same column widths.
    Holdout {
        x: &'a Array2<f64>,
        y: &'a Array2<f64>,
    },
}

/// Evaluation mode recorded on a sweep result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalKind {
    InSample,
    Holdout,
}

impl EvalKind {
    pub fn label(&self) -> &'static str {
        match self {
            EvalKind::InSample => "in-sample",
            EvalKind::Holdout => "holdout",
        }
    }
}

/// One evaluated (method, subset size) cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub method: Method,
    pub m: usize,
    /// Component count the cell used (selected or fixed).
    pub h: usize,
    pub lse: f64,
    /// Wall-clock time of the cell, for reporting only.
    pub wall_time_ms: f64,
}

/// All rows of a sweep, sorted by method tag order then subset size.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub eval: EvalKind,
    pub seed: u64,
}

/// Evaluates every requested method over the subset sizes in `m_values`.
///
/// Rankings are computed once per scheme. Methods that select the component
/// count automatically skip subset sizes above 50, the ceiling of the
/// selection procedure. Cells run in parallel; each derives its own seed from
/// `(seed, method, m)`, so results do not depend on scheduling.
pub fn sweep(
    x: &CenteredMatrix,
    y_raw: &Array2<f64>,
    methods: &[Method],
    m_values: &[usize],
    eval: EvalMode<'_>,
    seed: u64,
    ub_table: Option<&UbTable>,
) -> Result<SweepResult> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods requested".to_string()));
    }
    for (i, a) in methods.iter().enumerate() {
        if methods[..i].contains(a) {
            return Err(Error::InvalidArgument(format!("method {a} listed twice")));
        }
    }
    if m_values.is_empty() {
        return Err(Error::InvalidArgument(
            "no subset sizes requested".to_string(),
        ));
    }
    let m_cap = x.n_rows().min(x.n_cols());
    for (i, &m) in m_values.iter().enumerate() {
        if m < 2 || m > m_cap {
            return Err(Error::InvalidArgument(format!(
                "subset size m = {m} outside [2, {m_cap}] for this dataset"
            )));
        }
        if m_values[..i].contains(&m) {
            return Err(Error::InvalidArgument(format!(
                "subset size m = {m} listed twice"
            )));
        }
    }
    if y_raw.nrows() != x.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "predictors have {} rows but responses have {}",
            x.n_rows(),
            y_raw.nrows()
        )));
    }
    let q = y_raw.ncols();
    if let Some(bad) = methods.iter().find(|mt| mt.needs_univariate() && q != 1) {
        return Err(Error::UnsupportedResponse(format!(
            "method {bad} needs a univariate response, got {q} columns"
        )));
    }
    let eval_kind = match eval {
        EvalMode::InSample => EvalKind::InSample,
        EvalMode::Holdout { x: hx, y: hy } => {
            if hx.ncols() != x.n_cols() {
                return Err(Error::InvalidArgument(format!(
                    "holdout predictors have {} columns but training has {}",
                    hx.ncols(),
                    x.n_cols()
                )));
            }
            if hy.ncols() != q {
                return Err(Error::InvalidArgument(format!(
                    "holdout responses have {} columns but training has {q}",
                    hy.ncols()
                )));
            }
            if hx.nrows() != hy.nrows() || hx.nrows() == 0 {
                return Err(Error::InvalidArgument(
                    "holdout predictor and response row counts must match and be positive"
                        .to_string(),
                ));
            }
            EvalKind::Holdout
        }
    };

    let y_centered = center_columns(y_raw)?;
    let mut rankings: Vec<(RankingScheme, RankingResult)> = Vec::new();
    for mt in methods {
        let scheme = mt.ranking_scheme();
        if !rankings.iter().any(|(s, _)| *s == scheme) {
            rankings.push((scheme, rank_with_scheme(x, &y_centered, scheme)?));
        }
    }

    let mut cells: Vec<(Method, usize)> = Vec::new();
    for mt in methods {
        for &m in m_values {
            if mt.selects_dimension() && m > 50 {
                continue;
            }
            cells.push((*mt, m));
        }
    }
    if cells.is_empty() {
        return Err(Error::InvalidArgument(
            "every requested cell exceeds the selection ceiling of 50 variables".to_string(),
        ));
    }

    let row_results: Vec<Result<SweepRow>> = cells
        .par_iter()
        .map(|&(mt, m)| {
            let started = Instant::now();
            let ranking = rankings
                .iter()
                .find(|(s, _)| *s == mt.ranking_scheme())
                .map(|(_, r)| r)
                .expect("ranking precomputed for every requested scheme");
            let config = FitConfig {
                h_policy: if mt.selects_dimension() {
                    HPolicy::Auto
                } else {
                    HPolicy::Fixed(1)
                },
                selection: SelectionOptions {
                    kurtosis: KurtosisOptions {
                        seed: derive_seed(seed, &[mt.stable_id(), m as u64]),
                        ..KurtosisOptions::default()
                    },
                    ub_table: ub_table.cloned(),
                },
            };
            let out = fit(x, y_raw, ranking, m, &config)?;
            let (y_hat, y_ref) = match eval {
                EvalMode::InSample => (fitted_values(&out.model, x)?, y_raw),
                EvalMode::Holdout { x: hx, y: hy } => (predict(&out.model, hx)?, hy),
            };
            let err = lse(&y_hat, y_ref)?;
            Ok(SweepRow {
                method: mt,
                m,
                h: out.model.h,
                lse: err,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect();

    let mut rows = Vec::with_capacity(row_results.len());
    for r in row_results {
        rows.push(r?);
    }
    rows.sort_by_key(|r| (r.method.stable_id(), r.m));
    Ok(SweepResult {
        rows,
        eval: eval_kind,
        seed,
    })
}
