//! The solid paraboloid `V^{d+1} = {(x,t): ‖x‖² ≤ t ≤ 1}` with weight
//! `W_{β,γ,μ}(x,t) = t^β (1-t)^γ (t-‖x‖²)^{μ-1/2}`, and the classical ball
//! polynomials it is built from.

use std::ops::Range;

use rayon::prelude::*;

use crate::basis::{Expansion, OrthogonalBasis};
use crate::domain_u::{cesaro_kernel_at_one, kernel_K_at_one, kernel_P_boundary, UPoint, WeightU};
use crate::error::{check_ge, check_gt, Error, Result};
use crate::quadrature::{
    gauss_jacobi_normalized, pairwise_sum, symmetric_measure, ProductRule, Rule1D, SolidTensorRule,
};
use crate::specfun::{
    ball_const, beta_const, ensure_index, jacobi_all_into, jacobi_norm, jacobi_scaled, zonal_homog, CesaroSpec,
    JacobiParams,
};
use crate::sphere::{binom, check_explicit_dim, degree_offset, harmonics_upto};

/// Tolerance on `‖x‖² ≤ t ≤ 1` at construction.
pub const SOLID_TOL: f64 = 1e-12;

/// A point `(x, t)` of the solid paraboloid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl SolidPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Result<Self> {
        let r2 = norm2(&x);
        let ok = x.len() >= 2 && t.is_finite() && r2 <= t + SOLID_TOL && t <= 1.0 + SOLID_TOL;
        if !ok {
            return Err(Error::PointOutsideDomain {
                domain: "V",
                detail: format!("|x|^2 = {r2}, t = {t} in dimension {}", x.len()),
            });
        }
        Ok(Self { x, t })
    }

    /// Unchecked constructor for points produced by rules.
    pub fn from_parts(x: Vec<f64>, t: f64) -> Self {
        Self { x, t }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Number of ball polynomials of degree `m` in `d` variables.
pub fn ball_dim(d: usize, m: usize) -> usize {
    binom(m + d - 1, m)
}

/// Number of ball polynomials of degree `< m`.
fn ball_offset(d: usize, m: usize) -> usize {
    binom(m + d - 1, d)
}

/// Label of a ball polynomial of degree `m`: `P_j^{(μ-1/2, k+(d-2)/2)}(2‖x‖²-1) H_{k,ℓ}(x)`
/// with `k = m - 2j`, `ℓ` running over a harmonic basis of degree `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallIndex {
    pub j: usize,
    pub ell: usize,
}

/// Labels of degree `m` in flat order: `j` ascending, then `ℓ`.
pub fn ball_labels(d: usize, m: usize) -> Vec<BallIndex> {
    (0..=m / 2)
        .flat_map(|j| {
            let k = m - 2 * j;
            let dim = degree_offset(d, k + 1) - degree_offset(d, k);
            (1..=dim).map(move |ell| BallIndex { j, ell })
        })
        .collect()
}

fn ball_radial(d: usize, mu: f64, k: usize) -> JacobiParams {
    JacobiParams {
        alpha: mu - 0.5,
        beta: k as f64 + (d as f64 - 2.0) / 2.0,
    }
}

// 1 / ‖P_j(2‖x‖²-1) H_k(x)‖ under the normalized ball measure.
fn ball_scale(d: usize, mu: f64, j: usize, k: usize) -> f64 {
    let h = (d as f64 - 2.0) / 2.0;
    let p = ball_radial(d, mu, k);
    (beta_const(k as f64 + h, mu - 0.5) / (beta_const(h, mu - 0.5) * jacobi_norm(j, p))).sqrt()
}

/// Values of `t^{m/2} P_κ^m(x/√t)` for every ball polynomial of degree `≤ m_max`,
/// in flat order, evaluated as polynomials in `(x, t)`. With `t = 1` these are
/// the orthonormal ball polynomials at `x`.
pub fn ball_values_homog(d: usize, mu: f64, m_max: usize, x: &[f64], t: f64, out: &mut Vec<f64>) {
    let mut harm = Vec::new();
    harmonics_upto(d, m_max, x, &mut harm);
    out.clear();
    out.resize(ball_offset(d, m_max + 1), 0.0);
    let r2 = norm2(x);
    for m in 0..=m_max {
        let mut pos = ball_offset(d, m);
        for j in 0..=m / 2 {
            let k = m - 2 * j;
            let radial = ball_scale(d, mu, j, k) * jacobi_scaled(j, ball_radial(d, mu, k), 2.0 * r2 - t, t);
            for h in &harm[degree_offset(d, k)..degree_offset(d, k + 1)] {
                out[pos] = radial * h;
                pos += 1;
            }
        }
    }
}

/// Orthonormal ball polynomial of degree `m` with label `kappa` at `x ∈ B^d`, `d ∈ {2,3}`.
pub fn ball_basis_eval(d: usize, mu: f64, m: usize, kappa: BallIndex, x: &[f64]) -> Result<f64> {
    check_explicit_dim(d)?;
    check_gt("mu", mu, -0.5, "mu must exceed -1/2")?;
    let labels = ball_labels(d, m);
    let pos = labels
        .iter()
        .position(|l| *l == kappa)
        .ok_or_else(|| Error::IndexOutOfRange(format!("{kappa:?} is not a degree-{m} label")))?;
    if x.len() != d || norm2(x) > 1.0 + SOLID_TOL {
        return Err(Error::PointOutsideDomain {
            domain: "ball",
            detail: format!("{x:?}"),
        });
    }
    let mut buf = Vec::new();
    ball_values_homog(d, mu, m, x, 1.0, &mut buf);
    Ok(buf[ball_offset(d, m) + pos])
}

/// Ball polynomials of degree `≤ n` as an [`OrthogonalBasis`] (all norms 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallBasis {
    pub d: usize,
    pub mu: f64,
}

impl BallBasis {
    pub fn new(d: usize, mu: f64) -> Result<Self> {
        check_explicit_dim(d)?;
        check_gt("mu", mu, -0.5, "mu must exceed -1/2")?;
        Ok(Self { d, mu })
    }
}

impl OrthogonalBasis for BallBasis {
    type Point = Vec<f64>;

    fn degree_ranges(&self, n_max: usize) -> Vec<Range<usize>> {
        (0..=n_max)
            .map(|m| ball_offset(self.d, m)..ball_offset(self.d, m + 1))
            .collect()
    }

    fn eval_all(&self, n_max: usize, x: &Vec<f64>, out: &mut Vec<f64>) {
        ball_values_homog(self.d, self.mu, n_max, x, 1.0, out);
    }

    fn norms(&self, n_max: usize) -> Vec<f64> {
        vec![1.0; ball_offset(self.d, n_max + 1)]
    }
}

/// Reproducing kernel of `V_n(B^d, ϖ_μ)` from the addition formula
/// `c_{μ-1/2} ∫ Z_n^{μ+(d-1)/2}(⟨x,y⟩ + u √(1-‖x‖²) √(1-‖y‖²)) (1-u²)^{μ-1} du`;
/// `μ = 0` uses the endpoint average. Any `d ≥ 2`.
pub fn ball_kernel(d: usize, mu: f64, n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    check_ge("mu", mu, 0.0, "the addition formula needs mu >= 0")?;
    let rule = symmetric_measure(mu, n / 2 + 3)?;
    let lambda = mu + (d as f64 - 1.0) / 2.0;
    let c = dot(x, y);
    let r = ((1.0 - norm2(x)).max(0.0) * (1.0 - norm2(y)).max(0.0)).sqrt();
    let terms: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| w * zonal_homog(n, lambda, c + u * r, 1.0))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Parameters of `W_{β,γ,μ}` and `𝐛_{β,γ,μ} = b_μ c_{β+μ+(d-1)/2,γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightV {
    pub d: usize,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub b_bgm: f64,
}

impl WeightV {
    pub fn new(d: usize, beta: f64, gamma: f64, mu: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        check_gt("beta", beta, -(d as f64 + 1.0) / 2.0, "beta must exceed -(d+1)/2")?;
        check_gt("gamma", gamma, -1.0, "gamma must exceed -1")?;
        check_gt("mu", mu, -0.5, "mu must exceed -1/2")?;
        let alpha = beta + mu + (d as f64 - 1.0) / 2.0;
        Ok(Self {
            d,
            beta,
            gamma,
            mu,
            b_bgm: ball_const(d, mu) * beta_const(alpha, gamma),
        })
    }

    /// `α = β + μ + (d-1)/2`.
    pub fn alpha(&self) -> f64 {
        self.beta + self.mu + (self.d as f64 - 1.0) / 2.0
    }

    fn radial(&self, m: usize) -> JacobiParams {
        JacobiParams {
            alpha: self.alpha() + m as f64,
            beta: self.gamma,
        }
    }

    /// The weight `U_{γ, β+μ+(d-1)/2}` whose kernels feed the transfer operator.
    pub fn u_weight(&self) -> Result<WeightU> {
        WeightU::new(self.gamma, self.alpha())
    }

    pub fn basis(&self) -> Result<VBasis> {
        check_explicit_dim(self.d)?;
        Ok(VBasis(*self))
    }

    fn require_transfer(&self) -> Result<()> {
        check_ge("beta", self.beta, 0.0, "the transfer operator needs beta >= 0")?;
        check_ge("mu", self.mu, 0.0, "the transfer operator needs mu >= 0")
    }
}

fn block_offset(d: usize, n: usize) -> usize {
    // Σ_{n' < n} binom(n'+d, n') = binom(n+d, d+1)
    binom(n + d, d + 1)
}

/// Flat index of `𝐐_{m,κ}^n`, where `pos` is the position of `κ` in [`ball_labels`].
pub fn flat_index(d: usize, n: usize, m: usize, pos: usize) -> usize {
    block_offset(d, n) + ball_offset(d, m) + pos
}

/// `𝐐_{m,κ}^n(x,t) = P_{n-m}^{(m+α,γ)}(1-2t) t^{m/2} P_κ^m(x/√t)`, as a polynomial in `(x,t)`.
pub fn basis_bQ_eval(n: usize, m: usize, kappa: BallIndex, w: &WeightV, p: &SolidPoint) -> Result<f64> {
    check_explicit_dim(w.d)?;
    ensure_index(m <= n, || format!("m = {m} exceeds n = {n}"))?;
    let pos = ball_labels(w.d, m)
        .iter()
        .position(|l| *l == kappa)
        .ok_or_else(|| Error::IndexOutOfRange(format!("{kappa:?} is not a degree-{m} label")))?;
    let mut buf = Vec::new();
    ball_values_homog(w.d, w.mu, m, &p.x, p.t, &mut buf);
    Ok(crate::specfun::jacobi_eval(n - m, w.radial(m), 1.0 - 2.0 * p.t) * buf[ball_offset(w.d, m) + pos])
}

/// `𝐡_{m,n}^{β,γ,μ} = (c_{α,γ}/c_{α+m,γ}) h_{n-m}^{(α+m,γ)}`.
pub fn basis_bQ_norm(n: usize, m: usize, w: &WeightV) -> Result<f64> {
    ensure_index(m <= n, || format!("m = {m} exceeds n = {n}"))?;
    Ok(norm_unchecked(n, m, w))
}

fn norm_unchecked(n: usize, m: usize, w: &WeightV) -> f64 {
    let a = w.alpha();
    beta_const(a, w.gamma) / beta_const(a + m as f64, w.gamma) * jacobi_norm(n - m, w.radial(m))
}

/// The explicit basis `{𝐐_{m,κ}^n}` for `d ∈ {2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VBasis(pub WeightV);

impl OrthogonalBasis for VBasis {
    type Point = SolidPoint;

    fn degree_ranges(&self, n_max: usize) -> Vec<Range<usize>> {
        let d = self.0.d;
        (0..=n_max)
            .map(|n| block_offset(d, n)..block_offset(d, n + 1))
            .collect()
    }

    fn eval_all(&self, n_max: usize, p: &SolidPoint, out: &mut Vec<f64>) {
        let w = &self.0;
        let mut ball = Vec::new();
        ball_values_homog(w.d, w.mu, n_max, &p.x, p.t, &mut ball);
        radial_times_ball(w, n_max, p.t, 1.0, &ball, out);
    }

    fn norms(&self, n_max: usize) -> Vec<f64> {
        let d = self.0.d;
        let mut out = Vec::with_capacity(block_offset(d, n_max + 1));
        for n in 0..=n_max {
            for m in 0..=n {
                out.extend(std::iter::repeat_n(norm_unchecked(n, m, &self.0), ball_dim(d, m)));
            }
        }
        out
    }
}

// Combines radial Jacobi factors with ball values; `scale_step` multiplies the
// degree-m block by scale_step^m (√t when the ball values are taken at x/√t).
fn radial_times_ball(w: &WeightV, n_max: usize, t: f64, scale_step: f64, ball: &[f64], out: &mut Vec<f64>) {
    let d = w.d;
    out.clear();
    out.resize(block_offset(d, n_max + 1), 0.0);
    let mut radial = Vec::with_capacity(n_max + 1);
    let mut s_m = 1.0;
    for m in 0..=n_max {
        jacobi_all_into(n_max - m, w.radial(m), 1.0 - 2.0 * t, &mut radial);
        let bs = ball_offset(d, m)..ball_offset(d, m + 1);
        for (j, r) in radial.iter().enumerate() {
            let base = block_offset(d, m + j) + ball_offset(d, m);
            for (i, b) in ball[bs.clone()].iter().enumerate() {
                out[base + i] = r * s_m * b;
            }
        }
        s_m *= scale_step;
    }
}

/// `ξ₀(x,t,y,s;u) = (⟨x,y⟩ + u √(t-‖x‖²) √(s-‖y‖²)) / √(st)`, and 0 when `st = 0`.
pub fn xi0(x: &[f64], t: f64, y: &[f64], s: f64, u: f64) -> f64 {
    let st = s * t;
    if st <= 0.0 {
        return 0.0;
    }
    let r = ((t - norm2(x)).max(0.0) * (s - norm2(y)).max(0.0)).sqrt();
    ((dot(x, y) + u * r) / st.sqrt()).clamp(-1.0, 1.0)
}

/// `ξ(x,t,y,s;z,u) = (1-z₁)/2 ξ₀(x,t,y,s;u) + (1+z₁)/2 z₂`.
pub fn xi(x: &[f64], t: f64, y: &[f64], s: f64, z1: f64, z2: f64, u: f64) -> f64 {
    0.5 * (1.0 - z1) * xi0(x, t, y, s, u) + 0.5 * (1.0 + z1) * z2
}

/// Nodes for the transfer operator `𝐓_{β,γ,μ}`: `(z₁, z₂)` rules when `β > 0`,
/// and the `u` rule (endpoint average at `μ = 0`).
#[derive(Debug, Clone)]
pub struct SolidTransferRule {
    pub z: Option<(Rule1D, Rule1D)>,
    pub u: Rule1D,
}

impl SolidTransferRule {
    pub fn new(w: &WeightV, degree: usize) -> Result<Self> {
        w.require_transfer()?;
        let k = degree / 2 + 5;
        let z = if w.beta > 0.0 {
            Some((
                gauss_jacobi_normalized(k, w.mu + (w.d as f64 - 1.0) / 2.0, w.beta - 1.0)?,
                gauss_jacobi_normalized(k, w.beta - 0.5, w.beta - 0.5)?,
            ))
        } else {
            None
        };
        Ok(Self {
            z,
            u: symmetric_measure(w.mu, k)?,
        })
    }
}

/// `𝐓_{β,γ,μ} g(p, q)` for `g(x₂, y) = g((√x₂, x₂), y)`.
pub fn transfer_T_solid(
    g: impl Fn(f64, &UPoint) -> f64,
    rule: &SolidTransferRule,
    p: &SolidPoint,
    q: &SolidPoint,
) -> f64 {
    let rs = q.s_sqrt();
    let mut terms = Vec::new();
    for (&u, &wu) in rule.u.nodes.iter().zip(&rule.u.weights) {
        let x0 = xi0(&p.x, p.t, &q.x, q.t, u);
        match &rule.z {
            None => terms.push(wu * g(p.t, &UPoint::from_parts(rs * x0, q.t))),
            Some((r1, r2)) => {
                for (&z1, &w1) in r1.nodes.iter().zip(&r1.weights) {
                    for (&z2, &w2) in r2.nodes.iter().zip(&r2.weights) {
                        let v = 0.5 * (1.0 - z1) * x0 + 0.5 * (1.0 + z1) * z2;
                        terms.push(wu * w1 * w2 * g(p.t, &UPoint::from_parts(rs * v, q.t)));
                    }
                }
            }
        }
    }
    pairwise_sum(&terms)
}

impl SolidPoint {
    fn s_sqrt(&self) -> f64 {
        self.t.max(0.0).sqrt()
    }
}

/// Reproducing kernel `𝐏_n(W_{β,γ,μ}; p, q)` through the transfer operator
/// (`β ≥ 0`, `μ ≥ 0`, any `d ≥ 2`).
pub fn kernel_P_v(n: usize, w: &WeightV, p: &SolidPoint, q: &SolidPoint) -> Result<f64> {
    let wu = w.u_weight()?;
    let rule = SolidTransferRule::new(w, n)?;
    Ok(transfer_T_solid(|x2, y| kernel_P_boundary(n, &wu, x2, y), &rule, p, q))
}

/// Partial-sum kernel `𝐊_n(W_{0,γ,μ}; (x,1), q)` from the closed `(u, v)` integral
/// with `τ = μ + (d-1)/2` and parameters `(γ+τ+1, τ)`.
pub fn kernel_K_top(n: usize, w: &WeightV, x: &[f64], q: &SolidPoint) -> Result<f64> {
    if w.beta != 0.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: w.beta,
            reason: "the closed top formula is stated for beta = 0",
        });
    }
    check_ge("mu", w.mu, 0.0, "the closed top formula needs mu >= 0")?;
    let wu = w.u_weight()?;
    let rule = symmetric_measure(w.mu, n / 2 + 5)?;
    let rs = q.s_sqrt();
    let mut terms = Vec::with_capacity(rule.len());
    for (&u, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let y1 = rs * xi0(x, 1.0, &q.x, q.t, u);
        terms.push(wt * kernel_K_at_one(n, &wu, &UPoint::from_parts(y1, q.t))?);
    }
    Ok(pairwise_sum(&terms))
}

/// Cesàro kernel `𝐊_n^δ((x,1), q)` as the transfer of the closed corner kernel on `U`.
pub fn cesaro_kernel_top(spec: CesaroSpec, w: &WeightV, x: &[f64], q: &SolidPoint) -> Result<f64> {
    let wu = w.u_weight()?;
    let rule = SolidTransferRule::new(w, spec.n)?;
    let p = SolidPoint::from_parts(x.to_vec(), 1.0);
    let err = std::cell::Cell::new(None);
    let v = transfer_T_solid(
        |_, y| {
            cesaro_kernel_at_one(spec, &wu, y).unwrap_or_else(|e| {
                err.set(Some(e));
                0.0
            })
        },
        &rule,
        &p,
        q,
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `-(n(n+μ+γ+(d+1)/2) - m(n+μ+(γ+d)/2))`.
pub fn ode_eigenvalue_solid(n: usize, m: usize, w: &WeightV) -> f64 {
    let (nf, mf, d) = (n as f64, m as f64, w.d as f64);
    -(nf * (nf + w.mu + w.gamma + (d + 1.0) / 2.0) - mf * (nf + w.mu + (w.gamma + d) / 2.0))
}

/// Finite-difference derivatives of a function of `(x, t)` at a point.
struct FdDerivs {
    u: f64,
    ut: f64,
    utt: f64,
    // ⟨x, ∇ₓ u⟩, ⟨x, ∇ₓ ∂ₜ u⟩, Δₓ u
    euler: f64,
    euler_t: f64,
    lap: f64,
}

fn fd_derivs(f: &dyn Fn(&[f64], f64) -> f64, x: &[f64], t: f64, h: f64) -> FdDerivs {
    let u = f(x, t);
    let (up, um) = (f(x, t + h), f(x, t - h));
    let mut euler = 0.0;
    let mut euler_t = 0.0;
    let mut lap = 0.0;
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let (fp, fpp, fpm) = (f(&xp, t), f(&xp, t + h), f(&xp, t - h));
        xp[i] = x[i] - h;
        let (fm, fmp, fmm) = (f(&xp, t), f(&xp, t + h), f(&xp, t - h));
        xp[i] = x[i];
        euler += x[i] * (fp - fm) / (2.0 * h);
        euler_t += x[i] * (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        lap += (fp - 2.0 * u + fm) / (h * h);
    }
    FdDerivs {
        u,
        ut: (up - um) / (2.0 * h),
        utt: (up - 2.0 * u + um) / (h * h),
        euler,
        euler_t,
        lap,
    }
}

fn require_interior(p: &SolidPoint, h: f64) -> Result<()> {
    let margin = 10.0 * h;
    if p.t > margin && p.t < 1.0 - margin && norm2(&p.x) < p.t - margin {
        Ok(())
    } else {
        Err(Error::PointOutsideDomain {
            domain: "V",
            detail: format!("finite differences need an interior point, got t = {}", p.t),
        })
    }
}

/// Value of the second-order operator of the `β = 0` solid equation applied to
/// `𝐐_{m,κ}^n` at `p`, by centered differences with step `h`; returns
/// `(operator value, 𝐐 value)`.
pub fn ode_operator_solid(
    n: usize,
    m: usize,
    kappa: BallIndex,
    w: &WeightV,
    p: &SolidPoint,
    h: f64,
) -> Result<(f64, f64)> {
    if w.beta != 0.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: w.beta,
            reason: "the solid differential equation holds for beta = 0",
        });
    }
    require_interior(p, h)?;
    basis_bQ_eval(n, m, kappa, w, p)?;
    let f =
        |x: &[f64], t: f64| basis_bQ_eval(n, m, kappa, w, &SolidPoint::from_parts(x.to_vec(), t)).unwrap_or(f64::NAN);
    let dv = fd_derivs(&f, &p.x, p.t, h);
    let t = p.t;
    let d = w.d as f64;
    let value = t * (1.0 - t) * dv.utt
        + (1.0 - t) * dv.euler_t
        + 0.25 * (1.0 - t) * dv.lap
        + (w.mu + (d + 1.0) / 2.0) * (1.0 - t) * dv.ut
        - 0.5 * (w.gamma + 1.0) * (2.0 * t * dv.ut + dv.euler);
    Ok((value, dv.u))
}

/// Residual of the solid equation at `p` with finite-difference step `h`.
pub fn ode_residual_solid(n: usize, m: usize, kappa: BallIndex, w: &WeightV, p: &SolidPoint, h: f64) -> Result<f64> {
    let (value, u) = ode_operator_solid(n, m, kappa, w, p, h)?;
    Ok(value - ode_eigenvalue_solid(n, m, w) * u)
}

/// Residuals of `(2t∂ₜ + ⟨x,∇ₓ⟩)H = mH` and `2t∂ₜ²H + ⟨x,∇ₓ⟩∂ₜH = (m-2)∂ₜH`
/// for `H(x,t) = t^{m/2} P_κ^m(x/√t)`, by centered differences.
pub fn euler_identities_check(
    m: usize,
    kappa: BallIndex,
    mu: f64,
    d: usize,
    p: &SolidPoint,
    h: f64,
) -> Result<(f64, f64)> {
    ball_basis_eval(d, mu, m, kappa, &vec![0.0; d])?;
    require_interior(p, h)?;
    let pos = ball_labels(d, m).iter().position(|l| *l == kappa).unwrap_or(0);
    let f = |x: &[f64], t: f64| {
        let mut buf = Vec::new();
        ball_values_homog(d, mu, m, x, t, &mut buf);
        buf[ball_offset(d, m) + pos]
    };
    let dv = fd_derivs(&f, &p.x, p.t, h);
    let mf = m as f64;
    let first = 2.0 * p.t * dv.ut + dv.euler - mf * dv.u;
    let second = 2.0 * p.t * dv.utt + dv.euler_t - (mf - 2.0) * dv.ut;
    Ok((first, second))
}

/// Fourier coefficients on `V^{d+1}`, indexed by `(n, m, κ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VExpansion {
    pub weight: WeightV,
    pub series: Expansion,
}

impl VExpansion {
    pub fn n_max(&self) -> usize {
        self.series.n_max
    }

    pub fn coeff(&self, n: usize, m: usize, kappa: BallIndex) -> Option<f64> {
        let pos = ball_labels(self.weight.d, m).iter().position(|l| *l == kappa)?;
        self.series.coeff.get(flat_index(self.weight.d, n, m, pos)).copied()
    }
}

/// Coefficients by a factorized rule: ball moments on each `t`-slice, then
/// the radial Jacobi sums.
pub fn expand_v(
    f: impl Fn(&SolidPoint) -> f64 + Sync,
    n_max: usize,
    w: &WeightV,
    rule: &SolidTensorRule,
) -> Result<VExpansion> {
    let basis = w.basis()?;
    let d = w.d;
    let nb = ball_offset(d, n_max + 1);
    let nh = degree_offset(d, n_max + 1);
    let harm: Vec<Vec<f64>> = rule
        .sphere
        .points
        .iter()
        .map(|y| {
            let mut h = Vec::new();
            harmonics_upto(d, n_max, y, &mut h);
            h
        })
        .collect();
    // w_ρ N_{j,k} P_j(2ρ-1) r^k for each radial node, in (m, j) order
    let radial: Vec<Vec<f64>> = rule
        .radial
        .nodes
        .iter()
        .zip(&rule.radial.weights)
        .map(|(&rho, &wr)| {
            let r = rho.max(0.0).sqrt();
            let mut out = Vec::new();
            for m in 0..=n_max {
                for j in 0..=m / 2 {
                    let k = m - 2 * j;
                    let p = crate::specfun::jacobi_eval(j, ball_radial(d, w.mu, k), 2.0 * rho - 1.0);
                    out.push(wr * ball_scale(d, w.mu, j, k) * p * r.powi(k as i32));
                }
            }
            out
        })
        .collect();
    let slices: Vec<Vec<f64>> = rule
        .t_rule
        .nodes
        .par_iter()
        .zip(rule.t_rule.weights.par_iter())
        .map(|(&t, &wt)| {
            let st = t.max(0.0).sqrt();
            let mut moments = vec![0.0; nb];
            let mut sph = vec![0.0; nh];
            for (&rho, rad) in rule.radial.nodes.iter().zip(&radial) {
                let s = st * rho.max(0.0).sqrt();
                sph.iter_mut().for_each(|v| *v = 0.0);
                for ((y, &wy), h) in rule.sphere.points.iter().zip(&rule.sphere.weights).zip(&harm) {
                    let fv = wy * f(&SolidPoint::from_parts(y.iter().map(|v| s * v).collect(), t));
                    for (acc, v) in sph.iter_mut().zip(h) {
                        *acc += fv * v;
                    }
                }
                let mut c = rad.iter();
                for m in 0..=n_max {
                    let mut pos = ball_offset(d, m);
                    for j in 0..=m / 2 {
                        let k = m - 2 * j;
                        let coef = c.next().copied().unwrap_or(0.0);
                        for v in &sph[degree_offset(d, k)..degree_offset(d, k + 1)] {
                            moments[pos] += coef * v;
                            pos += 1;
                        }
                    }
                }
            }
            let mut out = Vec::new();
            radial_times_ball(w, n_max, t, st, &moments, &mut out);
            out.iter_mut().for_each(|v| *v *= wt);
            out
        })
        .collect();
    let count = basis.count(n_max);
    let moments: Vec<f64> = (0..count)
        .map(|j| pairwise_sum(&slices.iter().map(|s| s[j]).collect::<Vec<_>>()))
        .collect();
    Ok(VExpansion {
        weight: *w,
        series: Expansion::from_moments(&basis, n_max, moments),
    })
}

/// `S_n^δ(W_{β,γ,μ}; f, p)` from the coefficients.
pub fn cesaro_mean_v(exp: &VExpansion, spec: CesaroSpec, p: &SolidPoint) -> Result<f64> {
    ensure_index(spec.n <= exp.n_max(), || {
        format!("order {} exceeds expansion degree {}", spec.n, exp.n_max())
    })?;
    Ok(exp.series.cesaro_mean(&exp.weight.basis()?, spec, p))
}

/// `S_n^δ f(x,1)` by integrating `f` against the top Cesàro kernel.
pub fn cesaro_mean_v_kernel(
    f: impl Fn(&SolidPoint) -> f64 + Sync,
    spec: CesaroSpec,
    w: &WeightV,
    x: &[f64],
    rule: &ProductRule<SolidPoint>,
) -> Result<f64> {
    let terms: Result<Vec<f64>> = rule
        .points
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(q, &wq)| Ok(wq * f(q) * cesaro_kernel_top(spec, w, x, q)?))
        .collect();
    Ok(pairwise_sum(&terms?))
}

/// Ratio of `∫_V |𝐓 g(p, ·)|` to `∫_U |g((√t,t), ·)|` under normalized measures.
pub fn transfer_bound_ratio_solid(
    g: impl Fn(f64, &UPoint) -> f64 + Sync,
    w: &WeightV,
    p: &SolidPoint,
    v_rule: &ProductRule<SolidPoint>,
    u_rule: &ProductRule<UPoint>,
    transfer_degree: usize,
) -> Result<f64> {
    let rule = SolidTransferRule::new(w, transfer_degree)?;
    let lhs = v_rule.par_integrate(|q| transfer_T_solid(&g, &rule, p, q).abs());
    let rhs = u_rule.par_integrate(|z| g(p.t, z).abs());
    Ok(lhs / rhs)
}
