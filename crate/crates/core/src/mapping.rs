//! Semi-supervised self-learning: alternate orthogonal Procrustes mapping
//! and CSLS dictionary induction, starting from a seed lexicon.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::csls::{argmax, csls_from_sims, dot, knn_means, map_rows, topk_mean, Rows};
use crate::embeddings::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::{oov_report, SeedLexicon};
use crate::rng::keyed_rng;

/// Singular values below this fraction of the largest mark a rank-deficient
/// cross-covariance.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Union,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Union => "union",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            "union" => Ok(Direction::Union),
            other => Err(Error::Config(format!("unknown direction {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MappingConfig {
    pub csls_k: usize,
    /// Words per side taking part in dictionary induction.
    pub vocab_cutoff: usize,
    pub convergence_threshold: f64,
    pub max_iterations: usize,
    pub stochastic_keep_initial: f64,
    pub stochastic_multiplier: f64,
    pub direction: Direction,
    /// Taken from the run configuration rather than this section.
    #[serde(skip)]
    pub seed: u64,
    /// Whiten, re-weight and de-whiten after convergence.
    pub advanced_transform: bool,
    /// Singular value exponent used by the advanced transform.
    pub reweight: f64,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            csls_k: 10,
            vocab_cutoff: 20_000,
            convergence_threshold: 1e-6,
            max_iterations: 500,
            stochastic_keep_initial: 0.1,
            stochastic_multiplier: 2.0,
            direction: Direction::Union,
            seed: 0,
            advanced_transform: false,
            reweight: 0.5,
        }
    }
}

impl MappingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.csls_k == 0 {
            return fail("csls_k must be at least 1".into());
        }
        if self.vocab_cutoff == 0 {
            return fail("vocab_cutoff must be at least 1".into());
        }
        if !(self.convergence_threshold.is_finite() && self.convergence_threshold >= 0.0) {
            return fail(format!("convergence_threshold must be >= 0, got {}", self.convergence_threshold));
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be at least 1".into());
        }
        if !(self.stochastic_keep_initial > 0.0 && self.stochastic_keep_initial <= 1.0) {
            return fail(format!(
                "stochastic_keep_initial must be in (0, 1], got {}",
                self.stochastic_keep_initial
            ));
        }
        if !(self.stochastic_multiplier.is_finite() && self.stochastic_multiplier > 1.0) {
            return fail(format!("stochastic_multiplier must be > 1, got {}", self.stochastic_multiplier));
        }
        if !(self.reweight.is_finite() && self.reweight >= 0.0) {
            return fail(format!("reweight must be >= 0, got {}", self.reweight));
        }
        Ok(())
    }
}

/// SVD `m = U diag(s) Vt` with each column of U signed so that its
/// largest-magnitude entry is positive (the matching row of Vt follows).
pub fn canonical_svd(m: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = m.svd(true, true);
    let mut u = svd.u.expect("left singular vectors requested");
    let mut vt = svd.v_t.expect("right singular vectors requested");
    for j in 0..u.ncols() {
        let mut best = 0;
        for i in 1..u.nrows() {
            if u[(i, j)].abs() > u[(best, j)].abs() {
                best = i;
            }
        }
        if u[(best, j)] < 0.0 {
            u.column_mut(j).neg_mut();
            vt.row_mut(j).neg_mut();
        }
    }
    (u, svd.singular_values, vt)
}

/// `max |W^T W - I|`.
pub fn orthogonality_error(w: &DMatrix<f64>) -> f64 {
    let g = w.tr_mul(w);
    let mut err: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((g[(i, j)] - target).abs());
        }
    }
    err
}

#[derive(Clone, Debug)]
pub struct Procrustes {
    /// Orthogonal map applied to source rows: `x -> x W`.
    pub w: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub rank_deficient: bool,
}

fn check_dict(dict: &[(usize, usize)], n_src: usize, n_trg: usize) -> Result<()> {
    if dict.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    for &(s, t) in dict {
        if s >= n_src {
            return Err(Error::IdOutOfRange { id: s, len: n_src });
        }
        if t >= n_trg {
            return Err(Error::IdOutOfRange { id: t, len: n_trg });
        }
    }
    Ok(())
}

fn gather(space: &EmbeddingSpace, ids: impl ExactSizeIterator<Item = usize>) -> DMatrix<f64> {
    let n = ids.len();
    let mut data = Vec::with_capacity(n * space.dim());
    for i in ids {
        data.extend_from_slice(space.vector(i));
    }
    // column-major d x n, transposed to n x d
    DMatrix::from_vec(space.dim(), n, data).transpose()
}

/// Orthogonal `W` maximizing `sum_i <x_i W, z_i>` over the dictionary:
/// `W = U V^T` from the SVD of `sum_i x_i^T z_i`.
pub fn procrustes(space_src: &EmbeddingSpace, space_trg: &EmbeddingSpace, dict: &[(usize, usize)]) -> Result<Procrustes> {
    if space_src.dim() != space_trg.dim() {
        return Err(Error::DimensionMismatch(space_src.dim(), space_trg.dim()));
    }
    check_dict(dict, space_src.len(), space_trg.len())?;
    let x = gather(space_src, dict.iter().map(|p| p.0));
    let z = gather(space_trg, dict.iter().map(|p| p.1));
    let m = x.tr_mul(&z);
    let (u, s, vt) = canonical_svd(m);
    let largest = s.max();
    let rank_deficient = largest <= 0.0 || s.min() <= RANK_TOL * largest;
    Ok(Procrustes {
        w: u * vt,
        singular_values: s,
        rank_deficient,
    })
}

/// Whitening map for row samples `X` and its inverse:
/// `(X W)^T (X W) = I` and `W W_inv = I`.
#[derive(Clone, Debug)]
pub struct Whitening {
    pub forward: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
}

pub fn whitening(samples: &DMatrix<f64>) -> Result<Whitening> {
    let cov = samples.tr_mul(samples);
    let eig = cov.symmetric_eigen();
    let largest = eig.eigenvalues.max();
    if largest.is_nan() || largest <= 0.0 || eig.eigenvalues.min() <= 1e-12 * largest {
        return Err(Error::Singular("covariance of dictionary rows"));
    }
    let v = &eig.eigenvectors;
    let scaled = |f: fn(f64) -> f64| {
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
        v * d * v.transpose()
    };
    Ok(Whitening {
        forward: scaled(|l| 1.0 / l.sqrt()),
        inverse: scaled(f64::sqrt),
    })
}

/// Per-side linear maps built from whitening, orthogonal mapping,
/// singular value re-weighting and de-whitening.
#[derive(Clone, Debug)]
pub struct AdvancedTransform {
    pub src: DMatrix<f64>,
    pub trg: DMatrix<f64>,
}

impl AdvancedTransform {
    pub fn fit(
        space_src: &EmbeddingSpace,
        space_trg: &EmbeddingSpace,
        dict: &[(usize, usize)],
        reweight: f64,
    ) -> Result<AdvancedTransform> {
        check_dict(dict, space_src.len(), space_trg.len())?;
        let x = gather(space_src, dict.iter().map(|p| p.0));
        let z = gather(space_trg, dict.iter().map(|p| p.1));
        let wx1 = whitening(&x)?;
        let wz1 = whitening(&z)?;
        let xw = &x * &wx1.forward;
        let zw = &z * &wz1.forward;
        let (u, s, vt) = canonical_svd(xw.tr_mul(&zw));
        let wx2 = u;
        let wz2 = vt.transpose();
        let weights = DMatrix::from_diagonal(&s.map(|v| v.max(0.0).powf(reweight)));
        let dewhiten_x = wx2.tr_mul(&wx1.inverse) * &wx2;
        let dewhiten_z = wz2.tr_mul(&wz1.inverse) * &wz2;
        Ok(AdvancedTransform {
            src: &wx1.forward * &wx2 * &weights * dewhiten_x,
            trg: &wz1.forward * &wz2 * &weights * dewhiten_z,
        })
    }
}

/// Source of the stochastic masking decisions for one induction step.
#[derive(Clone, Copy, Debug)]
pub struct MaskStream {
    pub seed: u64,
    pub iteration: u64,
}

fn pick(scores: &[f64], keep_prob: f64, stream: MaskStream, row: usize, direction: u64) -> usize {
    if keep_prob < 1.0 {
        let mut rng = keyed_rng(stream.seed, &[stream.iteration, row as u64, direction]);
        let mut best: Option<usize> = None;
        for (j, &v) in scores.iter().enumerate() {
            let keep = rng.random::<f64>() < keep_prob;
            if keep && !v.is_nan() && best.is_none_or(|b| v > scores[b]) {
                best = Some(j);
            }
        }
        if let Some(b) = best {
            return b;
        }
    }
    argmax(scores).expect("non-empty score row")
}

/// CSLS dictionary induction over the first `vocab_cutoff` rows of each side.
/// Each retrieval only sees every candidate with probability `keep_prob`.
/// Returns sorted, distinct (src, trg) pairs.
pub fn induce_dictionary(
    mapped_src: Rows<'_>,
    mapped_trg: Rows<'_>,
    config: &MappingConfig,
    keep_prob: f64,
    stream: MaskStream,
) -> Vec<(usize, usize)> {
    let src = mapped_src.head(config.vocab_cutoff);
    let trg = mapped_trg.head(config.vocab_cutoff);
    if src.is_empty() || trg.is_empty() {
        return Vec::new();
    }
    let k = config.csls_k;
    let r_src = knn_means(src, trg, k);
    let backward = config.direction != Direction::Forward;
    let per_trg: Vec<(f64, Option<usize>)> = map_rows(trg, src, |j, sims| {
        let r = topk_mean(sims, k);
        let best = backward.then(|| {
            csls_from_sims(sims, r, &r_src);
            pick(sims, keep_prob, stream, j, 1)
        });
        (r, best)
    });
    let r_trg: Vec<f64> = per_trg.iter().map(|p| p.0).collect();

    let mut dict = BTreeSet::new();
    if config.direction != Direction::Backward {
        let fwd = map_rows(src, trg, |i, sims| {
            csls_from_sims(sims, r_src[i], &r_trg);
            pick(sims, keep_prob, stream, i, 0)
        });
        dict.extend(fwd.into_iter().enumerate());
    }
    if backward {
        dict.extend(per_trg.iter().enumerate().map(|(j, p)| (p.1.expect("backward pick"), j)));
    }
    dict.into_iter().collect()
}

/// Mean dot product over dictionary pairs.
pub fn dictionary_objective(src: Rows<'_>, trg: Rows<'_>, dict: &[(usize, usize)]) -> f64 {
    if dict.is_empty() {
        return 0.0;
    }
    let mut s = 0.0;
    for &(i, j) in dict {
        s += dot(src.row(i), trg.row(j));
    }
    s / dict.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub dict_size: usize,
    pub keep_prob: f64,
    pub orthogonality_error: f64,
    pub rank_deficient: bool,
}

#[derive(Clone, Debug)]
pub struct MappingResult {
    pub w_src: DMatrix<f64>,
    /// Identity unless the advanced transform is enabled.
    pub w_trg: DMatrix<f64>,
    pub advanced: Option<AdvancedTransform>,
    /// Induced dictionary of the best iteration, as (src rank, trg rank).
    pub induced_dict: Vec<(usize, usize)>,
    pub trace: Vec<TraceRecord>,
    pub best_iteration: usize,
    pub best_objective: f64,
    /// False when the loop stopped at `max_iterations`.
    pub converged: bool,
    pub seed_pairs: usize,
}

impl MappingResult {
    /// Maps both spaces with the final transforms.
    pub fn apply(&self, space_src: &EmbeddingSpace, space_trg: &EmbeddingSpace) -> Result<(EmbeddingSpace, EmbeddingSpace)> {
        match &self.advanced {
            Some(adv) => {
                let src = space_src.transformed(&self.w_src)?;
                Ok((src.transformed(&adv.src)?, space_trg.transformed(&adv.trg)?))
            }
            None => Ok((space_src.transformed(&self.w_src)?, space_trg.transformed(&self.w_trg)?)),
        }
    }
}

/// Self-learning from a seed lexicon. Only pairs with both words in
/// vocabulary are used.
pub fn self_learn(
    space_src: &EmbeddingSpace,
    space_trg: &EmbeddingSpace,
    seed_lex: &SeedLexicon,
    config: &MappingConfig,
) -> Result<MappingResult> {
    let ids = seed_lex.to_ids(space_src, space_trg);
    if ids.is_empty() {
        return Err(Error::NoUsableSeed(oov_report(seed_lex, space_src, space_trg)));
    }
    self_learn_ids(space_src, space_trg, &ids, config)
}

/// Objective, iteration, transform and induced dictionary.
type Best = (f64, usize, DMatrix<f64>, Vec<(usize, usize)>);

pub fn self_learn_ids(
    space_src: &EmbeddingSpace,
    space_trg: &EmbeddingSpace,
    seed: &[(usize, usize)],
    config: &MappingConfig,
) -> Result<MappingResult> {
    config.validate()?;
    if space_src.dim() != space_trg.dim() {
        return Err(Error::DimensionMismatch(space_src.dim(), space_trg.dim()));
    }
    check_dict(seed, space_src.len(), space_trg.len())?;

    let src_cut = space_src.truncated(config.vocab_cutoff);
    let trg_cut = space_trg.truncated(config.vocab_cutoff);
    let mut dict: Vec<(usize, usize)> = seed.to_vec();
    let mut keep = config.stochastic_keep_initial;
    let mut best: Option<Best> = None;
    let mut trace = Vec::new();
    let mut converged = false;

    for iteration in 1..=config.max_iterations {
        // the seed may reach beyond the cutoff; later dictionaries never do
        let proc = if iteration == 1 {
            procrustes(space_src, space_trg, &dict)?
        } else {
            procrustes(&src_cut, &trg_cut, &dict)?
        };
        let mapped = src_cut.transformed(&proc.w)?;
        let stream = MaskStream {
            seed: config.seed,
            iteration: iteration as u64,
        };
        let induced = induce_dictionary(mapped.rows(), trg_cut.rows(), config, keep, stream);
        let objective = dictionary_objective(mapped.rows(), trg_cut.rows(), &induced);
        let record = TraceRecord {
            iteration,
            objective,
            dict_size: induced.len(),
            keep_prob: keep,
            orthogonality_error: orthogonality_error(&proc.w),
            rank_deficient: proc.rank_deficient,
        };
        debug!(
            "iteration {iteration}: objective {objective:.6}, dictionary {}, keep {keep}",
            induced.len()
        );
        trace.push(record);

        let best_objective = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.0);
        if objective - best_objective >= config.convergence_threshold {
            best = Some((objective, iteration, proc.w, induced.clone()));
        } else if keep < 1.0 {
            keep = (keep * config.stochastic_multiplier).min(1.0);
        } else {
            converged = true;
            break;
        }
        dict = induced;
    }

    let (best_objective, best_iteration, w_src, induced_dict) = best.expect("at least one iteration ran");
    info!(
        "self-learning finished after {} iterations (best {best_iteration}, objective {best_objective:.6})",
        trace.len()
    );
    let advanced = if config.advanced_transform {
        let mapped = space_src.transformed(&w_src)?;
        Some(AdvancedTransform::fit(&mapped, space_trg, &induced_dict, config.reweight)?)
    } else {
        None
    };
    let d = space_src.dim();
    Ok(MappingResult {
        w_src,
        w_trg: DMatrix::identity(d, d),
        advanced,
        induced_dict,
        trace,
        best_iteration,
        best_objective,
        converged,
        seed_pairs: seed.len(),
    })
}
