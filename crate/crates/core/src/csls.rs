//! Dense similarity kernels and CSLS retrieval.
//!
//! Dot products accumulate left to right in plain `f64` arithmetic, so the
//! values are identical to a naive double loop and do not depend on the
//! number of worker threads.

use rayon::prelude::*;

/// Borrowed row-major matrix.
#[derive(Clone, Copy, Debug)]
pub struct Rows<'a> {
    data: &'a [f64],
    dim: usize,
}

impl<'a> Rows<'a> {
    pub fn new(data: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim), "data length must be a multiple of dim");
        Rows { data, dim }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// The first `n` rows (all rows if there are fewer).
    pub fn head(&self, n: usize) -> Rows<'a> {
        let n = n.min(self.len());
        Rows {
            data: &self.data[..n * self.dim],
            dim: self.dim,
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// `out[j] = dot(query, keys.row(j))`. Four rows are processed together for
/// instruction-level parallelism; each sum keeps its own sequential order.
pub fn similarities(query: &[f64], keys: Rows<'_>, out: &mut [f64]) {
    let d = keys.dim();
    let n = keys.len();
    debug_assert_eq!(out.len(), n);
    let data = keys.data;
    let mut j = 0;
    while j + 4 <= n {
        let (r0, r1, r2, r3) = (
            &data[j * d..(j + 1) * d],
            &data[(j + 1) * d..(j + 2) * d],
            &data[(j + 2) * d..(j + 3) * d],
            &data[(j + 3) * d..(j + 4) * d],
        );
        let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
        for t in 0..d {
            let q = query[t];
            s0 += q * r0[t];
            s1 += q * r1[t];
            s2 += q * r2[t];
            s3 += q * r3[t];
        }
        out[j] = s0;
        out[j + 1] = s1;
        out[j + 2] = s2;
        out[j + 3] = s3;
        j += 4;
    }
    while j < n {
        out[j] = dot(query, keys.row(j));
        j += 1;
    }
}

/// Mean of the `k` largest values (all values if fewer than `k`), summed in
/// descending order.
pub fn topk_mean(values: &[f64], k: usize) -> f64 {
    let k = k.min(values.len());
    if k == 0 {
        return 0.0;
    }
    let mut v = values.to_vec();
    if k < v.len() {
        v.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        v.truncate(k);
    }
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut s = 0.0;
    for x in &v {
        s += x;
    }
    s / k as f64
}

/// For every query row, the mean similarity to its `k` nearest keys.
pub fn knn_means(queries: Rows<'_>, keys: Rows<'_>, k: usize) -> Vec<f64> {
    map_rows(queries, keys, |_, sims| topk_mean(sims, k))
}

/// Applies `f(row index, similarities to all keys)` to every query row in
/// parallel, returning results in row order. `f` may overwrite the buffer.
pub fn map_rows<R, F>(queries: Rows<'_>, keys: Rows<'_>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut [f64]) -> R + Sync,
{
    assert_eq!(queries.dim(), keys.dim(), "dimension mismatch");
    (0..queries.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; keys.len()],
            |buf, i| {
                similarities(queries.row(i), keys, buf);
                f(i, buf)
            },
        )
        .collect()
}

/// `score[j] = 2 * dot(query, targets[j]) - r_src - r_trg[j]`.
pub fn csls_score(query: &[f64], targets: Rows<'_>, r_src: f64, r_trg: &[f64]) -> Vec<f64> {
    let mut sims = vec![0.0; targets.len()];
    similarities(query, targets, &mut sims);
    csls_from_sims(&mut sims, r_src, r_trg);
    sims
}

pub(crate) fn csls_from_sims(sims: &mut [f64], r_src: f64, r_trg: &[f64]) {
    for (s, r) in sims.iter_mut().zip(r_trg) {
        *s = 2.0 * *s - r_src - r;
    }
}

/// Index of the largest value; the lowest index wins ties. NaN is never
/// selected unless every value is NaN.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None if !v.is_nan() => best = Some(i),
            Some(b) if v > values[b] => best = Some(i),
            _ => {}
        }
    }
    if best.is_none() && !values.is_empty() {
        best = Some(0);
    }
    best
}
