//! The paraboloid surface `V₀^{d+1} = {(x,t): ‖x‖ = √t, 0 ≤ t ≤ 1}` with
//! weight `ϖ_{β,γ}(t) = t^β (1-t)^γ`.
//!
//! Points are stored as `(ξ, t)` with `x = √t ξ`, so the apex needs no
//! special handling.

use std::ops::Range;

use rayon::prelude::*;

use crate::basis::{Expansion, OrthogonalBasis};
use crate::domain_u::{cesaro_kernel_at_one, kernel_K_at_one, kernel_P_boundary, UPoint, WeightU};
use crate::error::{check_gt, Error, Result};
use crate::quadrature::{gauss_jacobi_normalized, pairwise_sum, ProductRule, Rule1D, SurfaceTensorRule};
use crate::specfun::{
    beta_const, ensure_index, jacobi_all_into, jacobi_deriv, jacobi_deriv2, jacobi_eval, jacobi_norm, sphere_area,
    CesaroSpec, JacobiParams,
};
use crate::sphere::{check_explicit_dim, degree_offset, harmonics_upto, zonal_kernel, HarmonicIndex, UNIT_TOL};

/// A point `(√t ξ, t)` of the surface paraboloid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub xi: Vec<f64>,
    pub t: f64,
}

impl SurfacePoint {
    pub fn new(xi: Vec<f64>, t: f64) -> Result<Self> {
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xi.len() < 2 || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::PointOutsideDomain {
                domain: "V0",
                detail: format!("|xi| = {norm} in dimension {}", xi.len()),
            });
        }
        if !(-UNIT_TOL..=1.0 + UNIT_TOL).contains(&t) {
            return Err(Error::PointOutsideDomain {
                domain: "V0",
                detail: format!("t = {t} outside [0, 1]"),
            });
        }
        Ok(Self { xi, t })
    }

    /// Unchecked constructor for points produced by rules.
    pub fn from_parts(xi: Vec<f64>, t: f64) -> Self {
        Self { xi, t }
    }

    /// Cartesian coordinates `x = √t ξ`.
    pub fn x(&self) -> Vec<f64> {
        let r = self.t.max(0.0).sqrt();
        self.xi.iter().map(|v| r * v).collect()
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Parameters of `ϖ_{β,γ}` on `V₀^{d+1}` and `𝖻_{β,γ} = c_{β+(d-1)/2,γ}/ω_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightV0 {
    pub d: usize,
    pub beta: f64,
    pub gamma: f64,
    pub b_bg: f64,
}

impl WeightV0 {
    pub fn new(d: usize, beta: f64, gamma: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        check_gt("beta", beta, -(d as f64 + 1.0) / 2.0, "beta must exceed -(d+1)/2")?;
        check_gt("gamma", gamma, -1.0, "gamma must exceed -1")?;
        let alpha = beta + (d as f64 - 1.0) / 2.0;
        Ok(Self {
            d,
            beta,
            gamma,
            b_bg: beta_const(alpha, gamma) / sphere_area(d),
        })
    }

    /// `α = β + (d-1)/2`.
    pub fn alpha(&self) -> f64 {
        self.beta + (self.d as f64 - 1.0) / 2.0
    }

    fn radial(&self, m: usize) -> JacobiParams {
        JacobiParams {
            alpha: self.alpha() + m as f64,
            beta: self.gamma,
        }
    }

    /// The weight `U_{γ, β+(d-1)/2}` whose kernels feed the transfer operator.
    pub fn u_weight(&self) -> Result<WeightU> {
        WeightU::new(self.gamma, self.alpha())
    }

    /// Explicit basis; available for `d ∈ {2, 3}`.
    pub fn basis(&self) -> Result<V0Basis> {
        check_explicit_dim(self.d)?;
        Ok(V0Basis(*self))
    }

    fn require_transfer(&self) -> Result<()> {
        crate::error::check_ge("beta", self.beta, -0.5, "the transfer operator needs beta >= -1/2")
    }
}

/// Number of basis elements of degree `< n`.
fn block_offset(d: usize, n: usize) -> usize {
    (0..n).map(|k| degree_offset(d, k + 1)).sum()
}

/// Flat index of `𝖰_{m,ℓ}^n` (with `ℓ ≥ 1`) in degree order.
pub fn flat_index(d: usize, n: usize, m: usize, ell: usize) -> usize {
    block_offset(d, n) + degree_offset(d, m) + ell - 1
}

/// `𝖰_{m,ℓ}^n(x,t) = P_{n-m}^{(β+m+(d-1)/2,γ)}(1-2t) t^{m/2} Y_ℓ^m(ξ)`.
pub fn basis_Q_eval(n: usize, m: usize, ell: usize, w: &WeightV0, p: &SurfacePoint) -> Result<f64> {
    ensure_index(m <= n, || format!("m = {m} exceeds n = {n}"))?;
    let idx = HarmonicIndex::new(w.d, m, ell)?;
    let y = crate::sphere::sph_eval(idx, &p.xi)?;
    Ok(jacobi_eval(n - m, w.radial(m), 1.0 - 2.0 * p.t) * p.t.max(0.0).sqrt().powi(m as i32) * y)
}

/// `𝗁_{m,n}^{β,γ} = (c_{α,γ}/c_{α+m,γ}) h_{n-m}^{(α+m,γ)}`.
pub fn basis_Q_norm(n: usize, m: usize, w: &WeightV0) -> Result<f64> {
    ensure_index(m <= n, || format!("m = {m} exceeds n = {n}"))?;
    Ok(norm_unchecked(n, m, w))
}

fn norm_unchecked(n: usize, m: usize, w: &WeightV0) -> f64 {
    let a = w.alpha();
    beta_const(a, w.gamma) / beta_const(a + m as f64, w.gamma) * jacobi_norm(n - m, w.radial(m))
}

/// The explicit basis `{𝖰_{m,ℓ}^n}` for `d ∈ {2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V0Basis(pub WeightV0);

impl OrthogonalBasis for V0Basis {
    type Point = SurfacePoint;

    fn degree_ranges(&self, n_max: usize) -> Vec<Range<usize>> {
        let d = self.0.d;
        (0..=n_max)
            .map(|n| block_offset(d, n)..block_offset(d, n + 1))
            .collect()
    }

    fn eval_all(&self, n_max: usize, p: &SurfacePoint, out: &mut Vec<f64>) {
        let w = &self.0;
        let mut harm = Vec::new();
        harmonics_upto(w.d, n_max, &p.xi, &mut harm);
        radial_times_harmonics(w, n_max, p.t, &harm, out);
    }

    fn norms(&self, n_max: usize) -> Vec<f64> {
        let d = self.0.d;
        let mut out = Vec::with_capacity(block_offset(d, n_max + 1));
        for n in 0..=n_max {
            for m in 0..=n {
                let h = norm_unchecked(n, m, &self.0);
                out.extend(std::iter::repeat_n(h, degree_offset(d, m + 1) - degree_offset(d, m)));
            }
        }
        out
    }
}

fn radial_times_harmonics(w: &WeightV0, n_max: usize, t: f64, harm: &[f64], out: &mut Vec<f64>) {
    let d = w.d;
    out.clear();
    out.resize(block_offset(d, n_max + 1), 0.0);
    let s = t.max(0.0).sqrt();
    let mut radial = Vec::with_capacity(n_max + 1);
    let mut s_m = 1.0;
    for m in 0..=n_max {
        jacobi_all_into(n_max - m, w.radial(m), 1.0 - 2.0 * t, &mut radial);
        let hs = degree_offset(d, m)..degree_offset(d, m + 1);
        for (j, r) in radial.iter().enumerate() {
            let base = block_offset(d, m + j) + degree_offset(d, m);
            for (i, h) in harm[hs.clone()].iter().enumerate() {
                out[base + i] = r * s_m * h;
            }
        }
        s_m *= s;
    }
}

/// Nodes for the `(z₁, z₂)` integral of the transfer operator.
#[derive(Debug, Clone)]
pub struct TransferRule {
    pub z1: Rule1D,
    pub z2: Rule1D,
}

impl TransferRule {
    /// Rules with weights `(1-z₁)^{(d-2)/2}(1+z₁)^{β-1/2}` and `(1-z₂²)^β`,
    /// exact for integrands of degree `degree` in `(z₁, z₂)`; `None` when `β = -1/2`.
    pub fn new(w: &WeightV0, degree: usize) -> Result<Option<Self>> {
        w.require_transfer()?;
        if w.beta == -0.5 {
            return Ok(None);
        }
        let k = degree / 2 + 5;
        Ok(Some(Self {
            z1: gauss_jacobi_normalized(k, (w.d as f64 - 2.0) / 2.0, w.beta - 0.5)?,
            z2: gauss_jacobi_normalized(k, w.beta, w.beta)?,
        }))
    }
}

/// `𝖳_{β,γ} g((x,t),(y,s))` for `g(x₂, y) = g((√x₂, x₂), y)`.
///
/// For `β > -1/2` the `(z₁, z₂)` integral is evaluated with `rule`; for
/// `β = -1/2` the definition is a direct substitution and `rule` is ignored.
pub fn transfer_T(
    g: impl Fn(f64, &UPoint) -> f64,
    w: &WeightV0,
    rule: Option<&TransferRule>,
    p: &SurfacePoint,
    q: &SurfacePoint,
) -> Result<f64> {
    w.require_transfer()?;
    let c = dot(&p.xi, &q.xi);
    let rs = q.t.max(0.0).sqrt();
    let rule = match (w.beta == -0.5, rule) {
        (true, _) => return Ok(g(p.t, &UPoint::from_parts(rs * c, q.t))),
        (false, Some(r)) => r,
        (false, None) => {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: w.beta,
                reason: "beta > -1/2 needs a transfer rule",
            })
        }
    };
    let mut terms = Vec::with_capacity(rule.z1.len() * rule.z2.len());
    for (&z1, &w1) in rule.z1.nodes.iter().zip(&rule.z1.weights) {
        for (&z2, &w2) in rule.z2.nodes.iter().zip(&rule.z2.weights) {
            let y1 = rs * (0.5 * (1.0 - z1) * c + 0.5 * (1.0 + z1) * z2);
            debug_assert!(y1 * y1 <= q.t + 1e-12);
            terms.push(w1 * w2 * g(p.t, &UPoint::from_parts(y1, q.t)));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Reproducing kernel `𝖯_n(ϖ_{β,γ}; p, q)` through the transfer operator
/// applied to the boundary kernel of `U_{γ, β+(d-1)/2}`; any `d ≥ 2`, `β ≥ -1/2`.
pub fn kernel_P_v0(n: usize, w: &WeightV0, p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    let wu = w.u_weight()?;
    let rule = TransferRule::new(w, n)?;
    transfer_T(|x2, y| kernel_P_boundary(n, &wu, x2, y), w, rule.as_ref(), p, q)
}

/// `𝖯_n` from the zonal form
/// `Σ_m P_{n-m}(1-2t) P_{n-m}(1-2s) t^{m/2} s^{m/2} Z_m^{(d-2)/2}(⟨ξ,η⟩) / 𝗁_{m,n}`.
pub fn kernel_P_v0_zonal(n: usize, w: &WeightV0, p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    let c = dot(&p.xi, &q.xi).clamp(-1.0, 1.0);
    let ts = (p.t * q.t).max(0.0).sqrt();
    let mut total = 0.0;
    for m in 0..=n {
        let r = w.radial(m);
        let radial = jacobi_eval(n - m, r, 1.0 - 2.0 * p.t) * jacobi_eval(n - m, r, 1.0 - 2.0 * q.t);
        total += radial * ts.powi(m as i32) * zonal_kernel(w.d, m, c)? / norm_unchecked(n, m, w);
    }
    Ok(total)
}

/// Partial-sum kernel `𝖪_n(ϖ_{-1/2,γ}; (ξ,1), q)` from its closed one-dimensional
/// form with `z'(ξ,y,v) = 1 - (1-v²)(1-⟨ξ,y⟩) - (1-v)²(1-s)/2`.
pub fn kernel_K_boundary(n: usize, w: &WeightV0, xi: &[f64], q: &SurfacePoint) -> Result<f64> {
    if w.beta != -0.5 {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: w.beta,
            reason: "the closed boundary formula is stated for beta = -1/2",
        });
    }
    let wu = w.u_weight()?;
    let y1 = q.t.max(0.0).sqrt() * dot(xi, &q.xi);
    kernel_K_at_one(n, &wu, &UPoint::from_parts(y1, q.t))
}

/// Cesàro kernel `𝖪_n^δ((ξ,1), q)` as the transfer of the closed corner kernel on `U`.
pub fn cesaro_kernel_boundary(spec: CesaroSpec, w: &WeightV0, xi: &[f64], q: &SurfacePoint) -> Result<f64> {
    let wu = w.u_weight()?;
    let rule = TransferRule::new(w, spec.n)?;
    let p = SurfacePoint::from_parts(xi.to_vec(), 1.0);
    let err = std::cell::Cell::new(None);
    let v = transfer_T(
        |_, y| match cesaro_kernel_at_one(spec, &wu, y) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        },
        w,
        rule.as_ref(),
        &p,
        q,
    )?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Eigenvalue `-(n(n+α+γ+1) - m(2n+2α+γ+1)/2)` of the radial operator, `α = (d-2)/2`.
pub fn ode_eigenvalue(n: usize, m: usize, w: &WeightV0) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let a = (w.d as f64 - 2.0) / 2.0;
    -(nf * (nf + a + w.gamma + 1.0) - 0.5 * mf * (2.0 * nf + 2.0 * a + w.gamma + 1.0))
}

/// `t(1-t)f'' + (1+α-(2+α+γ)t)f' - m(m+2α)(1-t)/(4t) f` for
/// `f(t) = P_{n-m}^{(m+α,γ)}(1-2t) t^{m/2}`, with analytic derivatives.
pub fn ode_operator(n: usize, m: usize, w: &WeightV0, t: f64) -> Result<(f64, f64)> {
    if w.beta != -0.5 {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: w.beta,
            reason: "the surface differential equation holds for beta = -1/2",
        });
    }
    ensure_index(m <= n, || format!("m = {m} exceeds n = {n}"))?;
    if !(t > 0.0 && t < 1.0) && !(m == 0 && (0.0..=1.0).contains(&t)) {
        return Err(Error::PointOutsideDomain {
            domain: "V0",
            detail: format!("t = {t} must lie in (0, 1)"),
        });
    }
    let a = (w.d as f64 - 2.0) / 2.0;
    let p = JacobiParams {
        alpha: a + m as f64,
        beta: w.gamma,
    };
    let k = n - m;
    let u = 1.0 - 2.0 * t;
    let (j0, j1, j2) = (
        jacobi_eval(k, p, u),
        -2.0 * jacobi_deriv(k, p, u),
        4.0 * jacobi_deriv2(k, p, u),
    );
    let h = m as f64 / 2.0;
    let (g0, g1, g2) = if m == 0 {
        (1.0, 0.0, 0.0)
    } else {
        (t.powf(h), h * t.powf(h - 1.0), h * (h - 1.0) * t.powf(h - 2.0))
    };
    let f = j0 * g0;
    let f1 = j1 * g0 + j0 * g1;
    let f2 = j2 * g0 + 2.0 * j1 * g1 + j0 * g2;
    let mf = m as f64;
    let sing = if m == 0 {
        0.0
    } else {
        mf * (mf + 2.0 * a) * (1.0 - t) / (4.0 * t) * f
    };
    let lhs = t * (1.0 - t) * f2 + (1.0 + a - (2.0 + a + w.gamma) * t) * f1 - sing;
    Ok((lhs, f))
}

/// Residual of the radial equation: operator value minus eigenvalue times `f`.
pub fn ode_residual(n: usize, m: usize, w: &WeightV0, t: f64) -> Result<f64> {
    let (lhs, f) = ode_operator(n, m, w, t)?;
    Ok(lhs - ode_eigenvalue(n, m, w) * f)
}

/// Fourier coefficients on `V₀^{d+1}`, indexed by `(n, m, ℓ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct V0Expansion {
    pub weight: WeightV0,
    pub series: Expansion,
}

impl V0Expansion {
    pub fn n_max(&self) -> usize {
        self.series.n_max
    }

    pub fn coeff(&self, n: usize, m: usize, ell: usize) -> f64 {
        self.series.coeff[flat_index(self.weight.d, n, m, ell)]
    }
}

/// Coefficients by a factorized rule: harmonic moments on each sphere slice,
/// then the radial Jacobi sums.
pub fn expand_v0(
    f: impl Fn(&SurfacePoint) -> f64 + Sync,
    n_max: usize,
    w: &WeightV0,
    rule: &SurfaceTensorRule,
) -> Result<V0Expansion> {
    let basis = w.basis()?;
    let d = w.d;
    let nh = degree_offset(d, n_max + 1);
    let harm: Vec<Vec<f64>> = rule
        .sphere
        .points
        .iter()
        .map(|xi| {
            let mut h = Vec::new();
            harmonics_upto(d, n_max, xi, &mut h);
            h
        })
        .collect();
    let slices: Vec<Vec<f64>> = rule
        .t_rule
        .nodes
        .par_iter()
        .zip(rule.t_rule.weights.par_iter())
        .map(|(&t, &wt)| {
            let mut moments = vec![0.0; nh];
            for ((xi, &ws), h) in rule.sphere.points.iter().zip(&rule.sphere.weights).zip(&harm) {
                let fv = ws * f(&SurfacePoint::from_parts(xi.clone(), t));
                for (acc, y) in moments.iter_mut().zip(h) {
                    *acc += fv * y;
                }
            }
            let mut out = Vec::new();
            radial_times_harmonics(w, n_max, t, &moments, &mut out);
            out.iter_mut().for_each(|v| *v *= wt);
            out
        })
        .collect();
    let count = basis.count(n_max);
    let moments: Vec<f64> = (0..count)
        .map(|j| pairwise_sum(&slices.iter().map(|s| s[j]).collect::<Vec<_>>()))
        .collect();
    Ok(V0Expansion {
        weight: *w,
        series: Expansion::from_moments(&basis, n_max, moments),
    })
}

/// `S_n^δ(ϖ_{β,γ}; f, p)` from the coefficients.
pub fn cesaro_mean_v0(exp: &V0Expansion, spec: CesaroSpec, p: &SurfacePoint) -> Result<f64> {
    ensure_index(spec.n <= exp.n_max(), || {
        format!("order {} exceeds expansion degree {}", spec.n, exp.n_max())
    })?;
    Ok(exp.series.cesaro_mean(&exp.weight.basis()?, spec, p))
}

/// `S_n^δ f(ξ,1)` by integrating `f` against the boundary Cesàro kernel.
pub fn cesaro_mean_v0_kernel(
    f: impl Fn(&SurfacePoint) -> f64 + Sync,
    spec: CesaroSpec,
    w: &WeightV0,
    xi: &[f64],
    rule: &ProductRule<SurfacePoint>,
) -> Result<f64> {
    let terms: Vec<Result<f64>> = rule
        .points
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(q, &wq)| Ok(wq * f(q) * cesaro_kernel_boundary(spec, w, xi, q)?))
        .collect();
    let terms: Result<Vec<f64>> = terms.into_iter().collect();
    Ok(pairwise_sum(&terms?))
}

/// Ratio of `∫_{V₀} |𝖳 g(p, ·)|` to `∫_U |g((√t,t), ·)|`, both against
/// normalized measures; bounded by a constant depending on `(β, γ, d)`.
pub fn transfer_bound_ratio(
    g: impl Fn(f64, &UPoint) -> f64 + Sync,
    w: &WeightV0,
    p: &SurfacePoint,
    v0_rule: &ProductRule<SurfacePoint>,
    u_rule: &ProductRule<UPoint>,
    transfer_degree: usize,
) -> Result<f64> {
    let rule = TransferRule::new(w, transfer_degree)?;
    let lhs: Result<Vec<f64>> = v0_rule
        .points
        .par_iter()
        .zip(v0_rule.weights.par_iter())
        .map(|(q, &wq)| Ok(wq * transfer_T(&g, w, rule.as_ref(), p, q)?.abs()))
        .collect();
    let lhs = pairwise_sum(&lhs?);
    let rhs = u_rule.par_integrate(|z| g(p.t, z).abs());
    Ok(lhs / rhs)
}
