//! Index-aware sequences and the rescaled difference calculus.
//!
//! A [`Seq`] stores `f_k` for a contiguous integer range `k = start .. end`,
//! so every operator keeps the chain's own index labels. The difference
//! operators are length-reducing and never pad: `(∇₊f)_k = n (f_{k+1} - f_k)`
//! is defined for `k = start .. end-1`, and `(∇₋f)_k = n (f_k - f_{k-1})` for
//! `k = start+1 .. end`.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};

/// A run of `dim`-vectors `f_k`, `k = start, ..., start + len - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seq {
    start: i64,
    dim: usize,
    data: Vec<f64>,
}

impl Seq {
    pub fn new(start: i64, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(ChainError::Size("sequence dimension must be positive".into()));
        }
        if data.len() % dim != 0 {
            return Err(ChainError::Size(format!(
                "data length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { start, dim, data })
    }

    pub fn zeros(start: i64, dim: usize, len: usize) -> Self {
        Self {
            start,
            dim: dim.max(1),
            data: vec![0.0; len * dim.max(1)],
        }
    }

    /// Scalar sequence (`dim = 1`).
    pub fn scalars(start: i64, values: Vec<f64>) -> Self {
        Self {
            start,
            dim: 1,
            data: values,
        }
    }

    pub fn from_points(start: i64, points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(1);
        if points.iter().any(|p| p.len() != dim) {
            return Err(ChainError::Size("points have mixed dimensions".into()));
        }
        Self::new(start, dim, points.iter().flatten().copied().collect())
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last index.
    pub fn end(&self) -> i64 {
        self.start + self.len() as i64
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

    pub fn indices(&self) -> std::ops::Range<i64> {
        self.start..self.end()
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.start && k < self.end()
    }

    fn offset(&self, k: i64) -> usize {
        assert!(
            self.contains(k),
            "index {k} outside sequence range {}..{}",
            self.start,
            self.end()
        );
        (k - self.start) as usize * self.dim
    }

    pub fn get(&self, k: i64) -> &[f64] {
        let o = self.offset(k);
        &self.data[o..o + self.dim]
    }

    pub fn try_get(&self, k: i64) -> Option<&[f64]> {
        self.contains(k).then(|| self.get(k))
    }

    pub fn get_mut(&mut self, k: i64) -> &mut [f64] {
        let o = self.offset(k);
        let dim = self.dim;
        &mut self.data[o..o + dim]
    }

    pub fn set(&mut self, k: i64, value: &[f64]) {
        self.get_mut(k).copy_from_slice(value);
    }

    /// Scalar value at `k` (first component).
    pub fn value(&self, k: i64) -> f64 {
        self.get(k)[0]
    }

    pub fn norm_sq(&self, k: i64) -> f64 {
        self.get(k).iter().map(|x| x * x).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Restrict to `lo .. hi` (exclusive).
    pub fn window(&self, lo: i64, hi: i64) -> Result<Seq> {
        if lo < self.start || hi > self.end() || lo > hi {
            return Err(ChainError::Size(format!(
                "window {lo}..{hi} outside {}..{}",
                self.start,
                self.end()
            )));
        }
        let a = (lo - self.start) as usize * self.dim;
        let b = (hi - self.start) as usize * self.dim;
        Ok(Seq {
            start: lo,
            dim: self.dim,
            data: self.data[a..b].to_vec(),
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(∇₊f)_k = n (f_{k+1} - f_k)`.
pub fn forward_diff(f: &Seq, n: usize) -> Result<Seq> {
    if f.len() < 2 {
        return Err(ChainError::Size(format!(
            "forward difference needs at least 2 entries, got {}",
            f.len()
        )));
    }
    let nf = n as f64;
    let d = f.dim;
    let data = f
        .data
        .windows(2 * d)
        .step_by(d)
        .flat_map(|w| (0..d).map(move |c| nf * (w[d + c] - w[c])))
        .collect();
    Ok(Seq {
        start: f.start,
        dim: d,
        data,
    })
}

/// `(∇₋f)_k = n (f_k - f_{k-1})`; same numbers as [`forward_diff`], labelled one index later.
pub fn backward_diff(f: &Seq, n: usize) -> Result<Seq> {
    let mut out = forward_diff(f, n)?;
    out.start += 1;
    Ok(out)
}

/// `∇₊^m f`.
pub fn forward_diff_pow(f: &Seq, n: usize, m: usize) -> Result<Seq> {
    if f.len() < m + 1 {
        return Err(ChainError::Size(format!(
            "{m}-th difference needs at least {} entries, got {}",
            m + 1,
            f.len()
        )));
    }
    let mut out = f.clone();
    for _ in 0..m {
        out = forward_diff(&out, n)?;
    }
    Ok(out)
}

/// Shift `E^j`: `(E^j f)_k = f_{k+j}`. Negative `j` gives the backward shift.
pub fn shift(f: &Seq, j: i64) -> Seq {
    Seq {
        start: f.start - j,
        dim: f.dim,
        data: f.data.clone(),
    }
}

/// Pointwise product of a scalar sequence with a vector sequence on their common range.
pub fn scale_by(weights: &Seq, f: &Seq) -> Result<Seq> {
    if weights.dim != 1 {
        return Err(ChainError::Size("weight sequence must be scalar".into()));
    }
    let lo = weights.start.max(f.start);
    let hi = weights.end().min(f.end());
    if lo >= hi {
        return Err(ChainError::Size("sequences have no common range".into()));
    }
    let mut out = Seq::zeros(lo, f.dim, (hi - lo) as usize);
    for k in lo..hi {
        let w = weights.value(k);
        for (o, x) in out.get_mut(k).iter_mut().zip(f.get(k)) {
            *o = w * x;
        }
    }
    Ok(out)
}

/// Componentwise inner product `⟨f_k, g_k⟩` on the common range.
pub fn inner(f: &Seq, g: &Seq) -> Result<Seq> {
    if f.dim != g.dim {
        return Err(ChainError::Size("inner product of mismatched dimensions".into()));
    }
    let lo = f.start.max(g.start);
    let hi = f.end().min(g.end());
    if lo >= hi {
        return Err(ChainError::Size("sequences have no common range".into()));
    }
    Ok(Seq::scalars(
        lo,
        (lo..hi).map(|k| dot(f.get(k), g.get(k))).collect(),
    ))
}
