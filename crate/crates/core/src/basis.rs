//! Domain-independent machinery over an orthogonal basis: Gram matrices,
//! Fourier coefficients by quadrature, partial sums and Cesàro means.

use std::ops::Range;

use rayon::prelude::*;

use crate::quadrature::{pairwise_sum, ProductRule};
use crate::specfun::CesaroSpec;

/// An orthogonal polynomial basis, ordered by total degree.
pub trait OrthogonalBasis: Sync {
    type Point: Sync;

    /// Flat index ranges of the basis elements of each degree `0..=n_max`.
    fn degree_ranges(&self, n_max: usize) -> Vec<Range<usize>>;

    /// Values of every basis element of degree `≤ n_max` at `p`, in flat order.
    fn eval_all(&self, n_max: usize, p: &Self::Point, out: &mut Vec<f64>);

    /// Squared norms of every basis element of degree `≤ n_max`, in flat order.
    fn norms(&self, n_max: usize) -> Vec<f64>;

    fn count(&self, n_max: usize) -> usize {
        self.degree_ranges(n_max).last().map_or(0, |r| r.end)
    }
}

// Points are processed in fixed-size chunks whose partial results are combined
// in chunk order, so the outcome does not depend on the thread count.
const CHUNK: usize = 256;

fn accumulate<B, F>(basis: &B, n_max: usize, rule: &ProductRule<B::Point>, width: usize, fold: F) -> Vec<f64>
where
    B: OrthogonalBasis,
    F: Fn(&[f64], f64, &B::Point, &mut [f64]) + Sync,
{
    let chunks: Vec<Vec<f64>> = rule
        .points
        .par_chunks(CHUNK)
        .zip(rule.weights.par_chunks(CHUNK))
        .map(|(pts, ws)| {
            let mut acc = vec![0.0; width];
            let mut vals = Vec::new();
            for (p, &w) in pts.iter().zip(ws) {
                basis.eval_all(n_max, p, &mut vals);
                fold(&vals, w, p, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for j in 0..width {
        let column: Vec<f64> = chunks.iter().map(|c| c[j]).collect();
        total[j] = pairwise_sum(&column);
    }
    total
}

/// Gram matrix `⟨φ_i, φ_j⟩` of all elements of degree `≤ n_max`, row-major.
pub fn gram_matrix<B: OrthogonalBasis>(basis: &B, n_max: usize, rule: &ProductRule<B::Point>) -> Vec<f64> {
    let count = basis.count(n_max);
    accumulate(basis, n_max, rule, count * count, |vals, w, _, acc| {
        for i in 0..count {
            let wi = w * vals[i];
            let row = &mut acc[i * count..(i + 1) * count];
            for (a, v) in row.iter_mut().zip(vals) {
                *a += wi * v;
            }
        }
    })
}

/// Largest deviation of a Gram matrix from `diag(norms)`.
pub fn gram_deviation(gram: &[f64], norms: &[f64]) -> f64 {
    let n = norms.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { norms[i] } else { 0.0 };
            worst = worst.max((gram[i * n + j] - want).abs());
        }
    }
    worst
}

/// Fourier coefficients `⟨f, φ⟩ / ‖φ‖²` for every element of degree `≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub n_max: usize,
    pub coeff: Vec<f64>,
    pub ranges: Vec<Range<usize>>,
}

impl Expansion {
    /// Computes the coefficients of `f` with the given rule.
    pub fn new<B: OrthogonalBasis>(
        basis: &B,
        n_max: usize,
        rule: &ProductRule<B::Point>,
        f: impl Fn(&B::Point) -> f64 + Sync,
    ) -> Self {
        let count = basis.count(n_max);
        let sums = accumulate(basis, n_max, rule, count, |vals, w, p, acc| {
            let fw = w * f(p);
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += fw * v;
            }
        });
        Self::from_moments(basis, n_max, sums)
    }

    /// Divides inner products `⟨f, φ⟩` by the squared norms.
    pub fn from_moments<B: OrthogonalBasis>(basis: &B, n_max: usize, mut moments: Vec<f64>) -> Self {
        for (c, h) in moments.iter_mut().zip(basis.norms(n_max)) {
            *c /= h;
        }
        Self {
            n_max,
            coeff: moments,
            ranges: basis.degree_ranges(n_max),
        }
    }

    /// `proj_n f` at a point whose basis values are `vals`.
    pub fn projection_from_values(&self, n: usize, vals: &[f64]) -> f64 {
        let r = self.ranges[n].clone();
        self.coeff[r.clone()].iter().zip(&vals[r]).map(|(c, v)| c * v).sum()
    }

    /// Cesàro mean `S_n^δ f` at a point whose basis values are `vals`;
    /// requires `spec.n ≤ n_max`.
    pub fn cesaro_from_values(&self, spec: CesaroSpec, vals: &[f64]) -> f64 {
        let w = spec.projection_weights();
        (0..=spec.n).map(|k| w[k] * self.projection_from_values(k, vals)).sum()
    }

    pub fn cesaro_mean<B: OrthogonalBasis>(&self, basis: &B, spec: CesaroSpec, p: &B::Point) -> f64 {
        let mut vals = Vec::new();
        basis.eval_all(spec.n, p, &mut vals);
        self.cesaro_from_values(spec, &vals)
    }

    pub fn partial_sum<B: OrthogonalBasis>(&self, basis: &B, n: usize, p: &B::Point) -> f64 {
        self.cesaro_mean(basis, CesaroSpec { n, delta: 0.0 }, p)
    }

    /// Largest coefficient magnitude outside the given flat index.
    pub fn max_abs_except(&self, index: usize) -> f64 {
        self.coeff
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .fold(0.0, |acc: f64, (_, c)| acc.max(c.abs()))
    }
}

/// Reproducing kernel `P_n(x, y) = Σ φ(x) φ(y) / ‖φ‖²` over degree `n`, by direct summation.
pub fn kernel_direct<B: OrthogonalBasis>(basis: &B, n: usize, x: &B::Point, y: &B::Point) -> f64 {
    let (mut vx, mut vy) = (Vec::new(), Vec::new());
    basis.eval_all(n, x, &mut vx);
    basis.eval_all(n, y, &mut vy);
    let norms = basis.norms(n);
    let r = basis.degree_ranges(n)[n].clone();
    r.map(|i| vx[i] * vy[i] / norms[i]).sum()
}

/// Per-degree kernels `P_0(x,y), …, P_n(x,y)` by direct summation.
pub fn kernels_direct<B: OrthogonalBasis>(basis: &B, n: usize, x: &B::Point, y: &B::Point) -> Vec<f64> {
    let (mut vx, mut vy) = (Vec::new(), Vec::new());
    basis.eval_all(n, x, &mut vx);
    basis.eval_all(n, y, &mut vy);
    let norms = basis.norms(n);
    basis
        .degree_ranges(n)
        .into_iter()
        .map(|r| r.map(|i| vx[i] * vy[i] / norms[i]).sum())
        .collect()
}

/// Cesàro kernel from per-degree kernels, through the partial-sum
/// representation `Σ_m binom(n-m+δ-1, n-m) K_m / binom(n+δ, n)`.
pub fn cesaro_from_kernels(spec: CesaroSpec, per_degree: &[f64]) -> f64 {
    let w = spec.partial_sum_weights();
    let mut partial = 0.0;
    let mut total = 0.0;
    for m in 0..=spec.n {
        partial += per_degree[m];
        total += w[m] * partial;
    }
    total
}
