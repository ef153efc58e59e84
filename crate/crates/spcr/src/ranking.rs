//! Variable ranking driven by the association between predictors and response.
//!
//! The central object is the canonical-correlation matrix
//! `C = V U' Y (Y'Y)^(-1/2)` built from the thin SVD `X = U L V'` of the
//! centered predictors. Its leading singular triple yields two ranking
//! vectors: `b1` rotates the leading direction back through `V L^(-1)` (for a
//! univariate response it is proportional to the least-squares coefficients),
//! while `b2` is the leading direction itself. Both are well defined when the
//! number of variables exceeds the number of observations.
//!
//! For very wide data a preliminary pass ranks contiguous column blocks
//! separately and keeps the strongest columns of each block, shrinking the
//! matrix to a width the main ranking handles comfortably.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{
    inv_sqrt_gram, spectral_decompose, thin_svd, CenteredMatrix, ThinSvd,
};

/// Below this value the leading canonical correlation is treated as zero.
const KAPPA_TOL: f64 = 1e-12;

/// Which score vector orders the variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankingScheme {
    /// Canonical direction rotated back through `V L^(-1)`.
    B1,
    /// Leading canonical direction itself.
    B2,
    /// Per-column correlation-style scores `x_j' y / ||x_j||` (univariate response).
    Bair,
    /// No ranking: columns keep their original order.
    Natural,
}

impl RankingScheme {
    pub fn label(&self) -> &'static str {
        match self {
            RankingScheme::B1 => "b1",
            RankingScheme::B2 => "b2",
            RankingScheme::Bair => "bair",
            RankingScheme::Natural => "natural",
        }
    }
}

/// Leading canonical structure between predictors and response.
#[derive(Debug, Clone)]
pub struct CanonicalSystem {
    /// The p x q canonical-correlation matrix.
    pub c_hat: Array2<f64>,
    /// Leading singular value of `c_hat`; lies in [0, 1] up to roundoff.
    pub kappa1: f64,
    /// Leading left singular vector of `c_hat` (unit norm, length p).
    pub h1: Array1<f64>,
    /// Leading right singular vector of `c_hat` (unit norm, length q).
    pub g1: Array1<f64>,
}

/// Scores for every variable plus the order they induce.
#[derive(Debug, Clone)]
pub struct RankingResult {
    pub scheme: RankingScheme,
    /// Signed scores, one per variable; ordering uses their magnitudes.
    pub scores: Array1<f64>,
    /// Column indices sorted by decreasing |score|, ties broken by index.
    pub order: Vec<usize>,
}

/// Configuration of the block-wise preliminary ranking.
#[derive(Debug, Clone)]
pub struct TauRankConfig {
    /// Number of contiguous column blocks.
    pub n_blocks: usize,
    /// Columns per block (the last block may be shorter).
    pub block_size: usize,
    /// Columns kept per block.
    pub tau: usize,
    /// Ranking scheme applied inside each block (B1 or B2).
    pub scheme: RankingScheme,
    /// When set, columns are shuffled with this seed before blocking, for
    /// partition-sensitivity experiments. Kept indices always refer to the
    /// original column positions.
    pub shuffle_seed: Option<u64>,
}

/// Result of the preliminary block ranking.
#[derive(Debug, Clone)]
pub struct TauRankOutput {
    /// The kept columns, still centered, in block order.
    pub matrix: CenteredMatrix,
    /// Original column index of every kept column.
    pub kept_indices: Vec<usize>,
    /// Blocks whose leading canonical correlation was numerically zero; their
    /// columns were kept by original order with zero scores.
    pub degenerate_blocks: Vec<usize>,
}

/// Core of the canonical computation, shared by the one-shot entry point and
/// the block-wise preliminary ranking (which hoists `Y (Y'Y)^(-1/2)`).
///
/// `ym` is the centered response multiplied by the inverse square root of its
/// Gram matrix, so `ym` has orthonormal columns.
fn canonical_core(svd: &ThinSvd, ym: &Array2<f64>) -> Result<CanonicalSystem> {
    let t = svd.u.t().dot(ym);
    let c_hat = svd.v.dot(&t);
    let s_y = c_hat.t().dot(&c_hat);
    let spectral = spectral_decompose(&s_y)?;
    let g1 = spectral.eigenvectors.column(0).to_owned();
    let cv = c_hat.dot(&g1);
    let kappa1 = cv.mapv(|v| v * v).sum().sqrt();
    if kappa1 < KAPPA_TOL {
        return Err(Error::NoAssociation);
    }
    let h1 = cv.mapv(|v| v / kappa1);
    Ok(CanonicalSystem {
        c_hat,
        kappa1,
        h1,
        g1,
    })
}

/// Builds the canonical system from centered predictors and response.
///
/// Computes the thin SVD of `x` internally; use [`canonical_system_with_svd`]
/// when the decomposition is already available.
pub fn canonical_system(x: &CenteredMatrix, y: &CenteredMatrix) -> Result<CanonicalSystem> {
    let svd = thin_svd(x, None)?;
    canonical_system_with_svd(&svd, y)
}

/// Builds the canonical system from a precomputed thin SVD of the predictors.
pub fn canonical_system_with_svd(svd: &ThinSvd, y: &CenteredMatrix) -> Result<CanonicalSystem> {
    if svd.u.nrows() != y.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "predictors have {} rows but response has {}",
            svd.u.nrows(),
            y.n_rows()
        )));
    }
    let m_y = inv_sqrt_gram(y)?;
    let ym = y.values().dot(&m_y);
    canonical_core(svd, &ym)
}

/// Ranking vector `b1 = (1/kappa1) V L^(-1) U' Y (Y'Y)^(-1/2) g1`.
///
/// For a univariate response this is proportional to the least-squares
/// coefficient vector whenever the latter exists.
pub fn ranking_vector_b1(
    sys: &CanonicalSystem,
    svd: &ThinSvd,
    y: &CenteredMatrix,
) -> Result<Array1<f64>> {
    if sys.kappa1 < KAPPA_TOL {
        return Err(Error::NoAssociation);
    }
    if svd.v.nrows() != sys.h1.len() {
        return Err(Error::InvalidArgument(
            "canonical system and SVD refer to different predictor sets".to_string(),
        ));
    }
    let m_y = inv_sqrt_gram(y)?;
    let w = m_y.dot(&sys.g1);
    let yw = y.values().dot(&w);
    let mut u_coord = svd.u.t().dot(&yw);
    for (c, &l) in u_coord.iter_mut().zip(svd.singular_values.iter()) {
        *c /= l;
    }
    let mut b = svd.v.dot(&u_coord);
    b.mapv_inplace(|v| v / sys.kappa1);
    Ok(b)
}

/// Ranking vector `b2`: the leading canonical direction (unit norm).
pub fn ranking_vector_b2(sys: &CanonicalSystem) -> Array1<f64> {
    sys.h1.clone()
}

/// Per-column scores `s_j = x_j' y / ||x_j||` for a univariate response.
///
/// Columns with numerically zero norm receive score zero and are reported in
/// the second return value so callers can surface a warning.
pub fn bair_scores(
    x: &CenteredMatrix,
    y_centered: &Array1<f64>,
) -> Result<(Array1<f64>, Vec<usize>)> {
    if y_centered.len() != x.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "response vector has {} entries but predictors have {} rows",
            y_centered.len(),
            x.n_rows()
        )));
    }
    let n = x.n_rows() as f64;
    let mut scores = Array1::zeros(x.n_cols());
    let mut zero_norm = Vec::new();
    for (j, col) in x.values().axis_iter(Axis(1)).enumerate() {
        let norm = col.mapv(|v| v * v).sum().sqrt();
        let scale_floor = 1e-12 * n.sqrt() * x.column_means()[j].abs().max(1.0);
        if norm <= scale_floor {
            zero_norm.push(j);
            scores[j] = 0.0;
        } else {
            scores[j] = col.dot(y_centered) / norm;
        }
    }
    Ok((scores, zero_norm))
}

/// Orders variables by decreasing score magnitude, ties broken by index.
pub fn rank_variables(scheme: RankingScheme, scores: &Array1<f64>) -> RankingResult {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .abs()
            .total_cmp(&scores[a].abs())
            .then(a.cmp(&b))
    });
    RankingResult {
        scheme,
        scores: scores.clone(),
        order,
    }
}

/// Computes the ranking for `x` against `y` under the requested scheme.
///
/// `Bair` requires a univariate response; `Natural` keeps the column order
/// and assigns zero scores.
pub fn rank_with_scheme(
    x: &CenteredMatrix,
    y: &CenteredMatrix,
    scheme: RankingScheme,
) -> Result<RankingResult> {
    match scheme {
        RankingScheme::Natural => {
            let scores = Array1::zeros(x.n_cols());
            Ok(RankingResult {
                scheme,
                scores,
                order: (0..x.n_cols()).collect(),
            })
        }
        RankingScheme::Bair => {
            if y.n_cols() != 1 {
                return Err(Error::UnsupportedResponse(format!(
                    "per-column scores need a univariate response, got {} columns",
                    y.n_cols()
                )));
            }
            let yv = y.values().column(0).to_owned();
            let (scores, _) = bair_scores(x, &yv)?;
            Ok(rank_variables(scheme, &scores))
        }
        RankingScheme::B1 | RankingScheme::B2 => {
            let svd = thin_svd(x, None)?;
            let sys = canonical_system_with_svd(&svd, y)?;
            let scores = match scheme {
                RankingScheme::B1 => ranking_vector_b1(&sys, &svd, y)?,
                _ => ranking_vector_b2(&sys),
            };
            Ok(rank_variables(scheme, &scores))
        }
    }
}

/// Keeps the `m` best-ranked columns, returning the subset (still centered)
/// and the original indices of the kept columns in rank order.
pub fn take_ranked_subset(
    x: &CenteredMatrix,
    ranking: &RankingResult,
    m: usize,
) -> Result<(CenteredMatrix, Vec<usize>)> {
    let p = x.n_cols();
    if ranking.order.len() != p {
        return Err(Error::InvalidArgument(format!(
            "ranking covers {} columns but the matrix has {p}",
            ranking.order.len()
        )));
    }
    if m < 2 || m > p {
        return Err(Error::InvalidArgument(format!(
            "subset size m = {m} must lie in [2, {p}]"
        )));
    }
    let idx: Vec<usize> = ranking.order[..m].to_vec();
    let values = x.values().select(Axis(1), &idx);
    let means = Array1::from_iter(idx.iter().map(|&j| x.column_means()[j]));
    Ok((CenteredMatrix::from_parts(values, means), idx))
}

/// Block-wise preliminary ranking for very wide matrices.
///
/// The columns are split into `n_blocks` contiguous blocks of `block_size`
/// (the last block takes the remainder). Each block is ranked against the
/// full response with the configured scheme and its `tau` strongest columns
/// are kept; the survivors are concatenated in block order. A block whose
/// leading canonical correlation is numerically zero contributes its first
/// `tau` columns with zero scores and is reported as degenerate.
pub fn tau_prerank(
    x: &CenteredMatrix,
    y: &CenteredMatrix,
    cfg: &TauRankConfig,
) -> Result<TauRankOutput> {
    let p = x.n_cols();
    let (l, s_w, tau) = (cfg.n_blocks, cfg.block_size, cfg.tau);
    if !matches!(cfg.scheme, RankingScheme::B1 | RankingScheme::B2) {
        return Err(Error::InvalidArgument(
            "block ranking supports the b1 and b2 schemes only".to_string(),
        ));
    }
    if l == 0 || s_w == 0 || tau == 0 {
        return Err(Error::InvalidArgument(
            "block count, block size and tau must all be positive".to_string(),
        ));
    }
    if tau > s_w {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} exceeds the block size {s_w}"
        )));
    }
    if l * tau >= p {
        return Err(Error::InvalidArgument(format!(
            "keeping {l} x {tau} columns does not reduce a {p}-column matrix"
        )));
    }
    if (l - 1) * s_w >= p || l * s_w < p {
        return Err(Error::InvalidArgument(format!(
            "{l} blocks of {s_w} columns do not partition {p} columns"
        )));
    }
    if x.n_rows() != y.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "predictors have {} rows but response has {}",
            x.n_rows(),
            y.n_rows()
        )));
    }

    let mut positions: Vec<usize> = (0..p).collect();
    if let Some(seed) = cfg.shuffle_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        positions.shuffle(&mut rng);
    }

    let m_y = inv_sqrt_gram(y)?;
    let ym = y.values().dot(&m_y);

    let blocks: Vec<&[usize]> = positions.chunks(s_w).collect();
    let per_block: Vec<Result<(Vec<usize>, bool)>> = blocks
        .par_iter()
        .map(|block| {
            let values = x.values().select(Axis(1), block);
            let means = Array1::from_iter(block.iter().map(|&j| x.column_means()[j]));
            let sub = CenteredMatrix::from_parts(values, means);
            let svd = thin_svd(&sub, None)?;
            let (scores, degenerate) = match canonical_core(&svd, &ym) {
                Ok(sys) => {
                    let v = match cfg.scheme {
                        RankingScheme::B1 => ranking_vector_b1(&sys, &svd, y)?,
                        _ => ranking_vector_b2(&sys),
                    };
                    (v, false)
                }
                Err(Error::NoAssociation) => (Array1::zeros(block.len()), true),
                Err(e) => return Err(e),
            };
            let ranked = rank_variables(cfg.scheme, &scores);
            let keep = tau.min(block.len());
            let kept: Vec<usize> = ranked.order[..keep].iter().map(|&j| block[j]).collect();
            Ok((kept, degenerate))
        })
        .collect();

    let mut kept_indices = Vec::with_capacity(l * tau);
    let mut degenerate_blocks = Vec::new();
    for (b, item) in per_block.into_iter().enumerate() {
        let (kept, degenerate) = item?;
        kept_indices.extend(kept);
        if degenerate {
            degenerate_blocks.push(b);
        }
    }

    let values = x.values().select(Axis(1), &kept_indices);
    let means = Array1::from_iter(kept_indices.iter().map(|&j| x.column_means()[j]));
    Ok(TauRankOutput {
        matrix: CenteredMatrix::from_parts(values, means),
        kept_indices,
        degenerate_blocks,
    })
}
