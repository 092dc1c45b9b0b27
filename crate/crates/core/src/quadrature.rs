//! Gauss–Jacobi rules (Golub–Welsch with Newton polishing) and the product
//! rules for the parabolic domain, the sphere, the ball, and both paraboloids.
//!
//! Every product rule carries the normalized measure of its domain, so that
//! `rule.integrate(|_| 1.0) == 1`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::domain_u::UPoint;
use crate::error::{check_gt, Error, Result};
use crate::solid_v::SolidPoint;
use crate::specfun::{beta_const_sym, jacobi_deriv, jacobi_eval, ln_gamma, JacobiParams};
use crate::surface_v0::SurfacePoint;

/// The weight a [`Rule1D`] integrates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDesc {
    /// `(1-t)^α (1+t)^β` on `[-1,1]`.
    Jacobi { alpha: f64, beta: f64 },
    /// `t^p (1-t)^q` on `[0,1]`.
    UnitInterval { p: f64, q: f64 },
    /// The `μ → 0` limit of the normalized `(1-u²)^{μ-1}`: mass 1/2 at each of `±1`.
    EndpointAverage,
    /// Piecewise rule for integrands with a kink at the origin; no polynomial
    /// exactness beyond constants is claimed.
    Split { alpha: f64 },
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Largest polynomial degree integrated exactly.
    pub exactness: usize,
    pub weight_desc: WeightDesc,
}

/// Number of Gauss nodes used for a requested exactness degree: `⌈(D+1)/2⌉ + 2`.
pub fn points_for_exactness(degree: usize) -> usize {
    (degree + 2) / 2 + 2
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Scales the weights to unit mass, using the exact mass of the weight when known.
    pub fn normalized(mut self) -> Self {
        let mass = match self.weight_desc {
            WeightDesc::Jacobi { alpha, beta } => 1.0 / beta_const_sym(alpha, beta),
            WeightDesc::UnitInterval { p, q } => 1.0 / crate::specfun::beta_const(p, q),
            _ => self.mass(),
        };
        for w in &mut self.weights {
            *w /= mass;
        }
        self
    }

    /// Maps a Jacobi rule on `[-1,1]` to `[0,1]` by `t = (1+x)/2`; `(α, β)`
    /// become the exponents of `(1-t)` and `t`. Weights are rescaled by the
    /// Jacobian, so a normalized input stays normalized only after
    /// [`Self::normalized`].
    pub fn to_unit_interval(mut self) -> Self {
        if let WeightDesc::Jacobi { alpha, beta } = self.weight_desc {
            for x in &mut self.nodes {
                *x = 0.5 * (1.0 + *x);
            }
            let scale = (-(alpha + beta + 1.0) * std::f64::consts::LN_2).exp();
            for w in &mut self.weights {
                *w *= scale;
            }
            self.weight_desc = WeightDesc::UnitInterval { p: beta, q: alpha };
        }
        self
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

// Three-term coefficients of the monic Jacobi recurrence: diagonal a_k, squared off-diagonal b_k.
#[allow(clippy::needless_range_loop)]
fn jacobi_matrix(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let ab2 = (alpha + 1.0) + (beta + 1.0);
    let mut diag = Vec::with_capacity(n);
    let mut off = vec![0.0; n];
    for k in 0..n {
        let kf = k as f64;
        let a = if k == 0 {
            (beta - alpha) / ab2
        } else {
            let s = 2.0 * kf + ab;
            (beta * beta - alpha * alpha) / (s * ((2.0 * kf) + ab2))
        };
        diag.push(a);
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s = 2.0 * k1 + ab;
            let b = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / (ab2.powi(2) * (1.0 + ab2))
            } else {
                4.0 * k1 * (k1 + alpha) * (k1 + beta) * ((k1 - 2.0) + ab2) / (s * s * (s + 1.0) * (s - 1.0))
            };
            off[k] = b.sqrt();
        }
    }
    (diag, off)
}

/// Implicit QL on a symmetric tridiagonal matrix. `off[i]` couples rows `i`
/// and `i+1`. On return `diag` holds the eigenvalues and the result holds the
/// first component of each normalized eigenvector.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<Vec<f64>> {
    const MAX_SWEEPS: usize = 60;
    let n = diag.len();
    let mut z = vec![0.0; n];
    if n == 0 {
        return Ok(z);
    }
    z[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: iter,
                    size: n,
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(z)
}

/// Gauss–Jacobi rule with `n_points` nodes for `(1-t)^α (1+t)^β` on `[-1,1]`.
/// Weights sum to the total mass `2^{α+β+1} Γ(α+1)Γ(β+1)/Γ(α+β+2)`.
pub fn gauss_jacobi(n_points: usize, alpha: f64, beta: f64) -> Result<Rule1D> {
    if n_points == 0 {
        return Err(Error::InvalidParameter {
            name: "n_points",
            value: 0.0,
            reason: "a rule needs at least one node",
        });
    }
    let p = JacobiParams::new(alpha, beta)?;
    let (mut diag, mut off) = jacobi_matrix(n_points, alpha, beta);
    let first = tridiagonal_ql(&mut diag, &mut off)?;
    let mu0 = 1.0 / beta_const_sym(alpha, beta);

    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(first.iter().map(|v| mu0 * v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = n_points as f64;
    let ln_c = (alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(n + alpha + 1.0) + ln_gamma(n + beta + 1.0)
        - ln_gamma((n - 1.0) + (alpha + 1.0) + (beta + 1.0))
        - ln_gamma(n + 1.0);
    let c = ln_c.exp();
    // Near an exponent of -1 the endpoint root is ill-conditioned in the
    // recurrence and eigenvector weights are the more accurate ones.
    let eigen_weights = alpha.min(beta) < -0.5;
    let mut nodes = Vec::with_capacity(n_points);
    let mut weights = Vec::with_capacity(n_points);
    for (x0, w0) in pairs {
        let mut x = x0;
        for _ in 0..2 {
            let dx = jacobi_eval(n_points, p, x) / jacobi_deriv(n_points, p, x);
            if dx.is_finite() && dx.abs() < 1e-6 {
                x -= dx;
            }
        }
        let dp = jacobi_deriv(n_points, p, x);
        let w = c / ((1.0 - x) * (1.0 + x) * dp * dp);
        nodes.push(x);
        weights.push(if eigen_weights || !(w.is_finite() && w > 0.0) {
            w0
        } else {
            w
        });
    }
    Ok(Rule1D {
        nodes,
        weights,
        exactness: 2 * n_points - 1,
        weight_desc: WeightDesc::Jacobi { alpha, beta },
    })
}

/// Gauss–Jacobi rule normalized to unit mass.
pub fn gauss_jacobi_normalized(n_points: usize, alpha: f64, beta: f64) -> Result<Rule1D> {
    Ok(gauss_jacobi(n_points, alpha, beta)?.normalized())
}

/// Normalized Gauss rule on `[0,1]` for the weight `t^p (1-t)^q`.
pub fn unit_interval_rule(n_points: usize, p: f64, q: f64) -> Result<Rule1D> {
    Ok(gauss_jacobi(n_points, q, p)?.to_unit_interval().normalized())
}

/// Normalized rule for `c_{μ-1/2} (1-u²)^{μ-1}` on `[-1,1]`, `μ ≥ 0`. At `μ = 0`
/// the limiting endpoint average `(f(1)+f(-1))/2` is returned.
pub fn symmetric_measure(mu: f64, n_points: usize) -> Result<Rule1D> {
    crate::error::check_ge("mu", mu, 0.0, "the endpoint-limit measure needs mu >= 0")?;
    if mu == 0.0 {
        return Ok(Rule1D {
            nodes: vec![-1.0, 1.0],
            weights: vec![0.5, 0.5],
            exactness: 1,
            weight_desc: WeightDesc::EndpointAverage,
        });
    }
    gauss_jacobi_normalized(n_points, mu - 1.0, mu - 1.0)
}

/// Normalized rule for `(1-u²)^α` on `[-1,1]` split at `u = 0`, for integrands
/// with a kink there. Each half uses a Gauss–Jacobi rule absorbing the
/// `(1∓u)^α` endpoint factor; the smooth `(1±u)^α` factor goes into the weights.
pub fn split_symmetric_rule(n_half: usize, alpha: f64) -> Result<Rule1D> {
    let half = unit_interval_rule(n_half, 0.0, alpha)?;
    let mut nodes = Vec::with_capacity(2 * n_half);
    let mut weights = Vec::with_capacity(2 * n_half);
    for (&u, &w) in half.nodes.iter().zip(&half.weights).rev() {
        nodes.push(-u);
        weights.push(w * (1.0 + u).powf(alpha));
    }
    for (&u, &w) in half.nodes.iter().zip(&half.weights) {
        nodes.push(u);
        weights.push(w * (1.0 + u).powf(alpha));
    }
    let mut rule = Rule1D {
        nodes,
        weights,
        exactness: 0,
        weight_desc: WeightDesc::Split { alpha },
    };
    rule = rule.normalized();
    Ok(rule)
}

/// Sum in a fixed pairwise order, so that results do not depend on threading.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    U,
    Sphere,
    Ball,
    V0,
    V,
}

/// Points and weights of a rule on a multivariate domain.
#[derive(Debug, Clone)]
pub struct ProductRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub exactness: usize,
    pub domain_tag: DomainTag,
}

impl<P: Sync> ProductRule<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Reference summation: ascending node index, pairwise reduction.
    pub fn integrate(&self, f: impl Fn(&P) -> f64) -> f64 {
        let terms: Vec<f64> = self.points.iter().zip(&self.weights).map(|(p, &w)| w * f(p)).collect();
        pairwise_sum(&terms)
    }

    /// Parallel evaluation with the same summation order as [`Self::integrate`].
    pub fn par_integrate(&self, f: impl Fn(&P) -> f64 + Sync) -> f64 {
        let terms: Vec<f64> = self
            .points
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(p, &w)| w * f(p))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Rule for the normalized measure `d_{a,b} U_{a,b}` on the parabolic domain,
/// exact for total degree `2·level - 1`.
pub fn rule_u(a: f64, b: f64, level: usize) -> Result<ProductRule<UPoint>> {
    check_gt("a", a, -1.0, "weight parameter a must exceed -1")?;
    check_gt("b", b, -0.5, "weight parameter b must exceed -1/2")?;
    let level = level.max(1);
    let ru = gauss_jacobi_normalized(level, b - 0.5, b - 0.5)?;
    let rx = unit_interval_rule(level, b, a)?;
    Ok(tensor_u(&ru, &rx, 2 * level - 1))
}

/// Like [`rule_u`] but with the `u = x₁/√x₂` factor split at 0, for
/// integrands such as `|x₁|`.
pub fn rule_u_split(a: f64, b: f64, level: usize) -> Result<ProductRule<UPoint>> {
    check_gt("a", a, -1.0, "weight parameter a must exceed -1")?;
    check_gt("b", b, -0.5, "weight parameter b must exceed -1/2")?;
    let level = level.max(1);
    let ru = split_symmetric_rule(level, b - 0.5)?;
    let rx = unit_interval_rule(level, b, a)?;
    Ok(tensor_u(&ru, &rx, 0))
}

fn tensor_u(ru: &Rule1D, rx: &Rule1D, exactness: usize) -> ProductRule<UPoint> {
    let mut points = Vec::with_capacity(ru.len() * rx.len());
    let mut weights = Vec::with_capacity(ru.len() * rx.len());
    for (&x2, &wx) in rx.nodes.iter().zip(&rx.weights) {
        let r = x2.sqrt();
        for (&u, &wu) in ru.nodes.iter().zip(&ru.weights) {
            points.push(UPoint::from_parts(u * r, x2));
            weights.push(wx * wu);
        }
    }
    ProductRule {
        points,
        weights,
        exactness,
        domain_tag: DomainTag::U,
    }
}

fn check_sphere_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Rule for the normalized surface measure `σ/ω_d` of `S^{d-1}`, `d ∈ {2,3}`.
/// For `d = 3` the polar axis is `x₁`.
pub fn rule_sphere(d: usize, degree: usize) -> Result<ProductRule<Vec<f64>>> {
    sphere_rule_impl(d, degree, false)
}

/// Sphere rule whose nodes are split at the great circle `x₁ = 0`, for integrands with a kink there.
pub fn rule_sphere_split(d: usize, degree: usize) -> Result<ProductRule<Vec<f64>>> {
    sphere_rule_impl(d, degree, true)
}

fn sphere_rule_impl(d: usize, degree: usize, split: bool) -> Result<ProductRule<Vec<f64>>> {
    check_sphere_dim(d)?;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match (d, split) {
        (2, false) => {
            let n = degree + 3;
            for j in 0..n {
                let th = 2.0 * PI * j as f64 / n as f64;
                points.push(vec![th.cos(), th.sin()]);
                weights.push(1.0 / n as f64);
            }
        }
        (2, true) => {
            // Gauss–Legendre in the angle on the two arcs x₁ ≥ 0 and x₁ ≤ 0.
            let g = gauss_jacobi(degree + 6, 0.0, 0.0)?;
            for arc in 0..2 {
                let centre = arc as f64 * PI;
                for (&x, &w) in g.nodes.iter().zip(&g.weights) {
                    let th = centre + 0.5 * PI * x;
                    points.push(vec![th.cos(), th.sin()]);
                    weights.push(0.25 * w);
                }
            }
        }
        _ => {
            let nphi = degree + 3;
            let z_rule = if split {
                let h = gauss_jacobi(points_for_exactness(degree), 0.0, 0.0)?;
                let mut nodes = Vec::new();
                let mut ws = Vec::new();
                for shift in [-0.5, 0.5] {
                    for (&x, &w) in h.nodes.iter().zip(&h.weights) {
                        nodes.push(shift + 0.5 * x);
                        ws.push(0.25 * w);
                    }
                }
                (nodes, ws)
            } else {
                let g = gauss_jacobi(points_for_exactness(degree), 0.0, 0.0)?;
                let ws = g.weights.iter().map(|w| 0.5 * w).collect();
                (g.nodes, ws)
            };
            for (&z, &wz) in z_rule.0.iter().zip(&z_rule.1) {
                let r = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..nphi {
                    let ph = 2.0 * PI * j as f64 / nphi as f64;
                    points.push(vec![z, r * ph.cos(), r * ph.sin()]);
                    weights.push(wz / nphi as f64);
                }
            }
        }
    }
    Ok(ProductRule {
        points,
        weights,
        exactness: degree,
        domain_tag: DomainTag::Sphere,
    })
}

/// Rule for `b_μ (1-‖x‖²)^{μ-1/2}` on the unit ball `B^d`, via `ρ = ‖x‖²`.
pub fn rule_ball(d: usize, mu: f64, degree: usize) -> Result<ProductRule<Vec<f64>>> {
    check_gt("mu", mu, -0.5, "ball parameter must exceed -1/2")?;
    let sphere = rule_sphere(d, degree)?;
    let radial = unit_interval_rule(points_for_exactness(degree / 2), (d as f64 - 2.0) / 2.0, mu - 0.5)?;
    let mut rule = ball_product(&radial, &sphere);
    rule.exactness = degree;
    Ok(rule)
}

/// Factorized rule on the surface paraboloid: `t`-rule times sphere rule.
#[derive(Debug, Clone)]
pub struct SurfaceTensorRule {
    pub t_rule: Rule1D,
    pub sphere: ProductRule<Vec<f64>>,
}

impl SurfaceTensorRule {
    pub fn new(d: usize, beta: f64, gamma: f64, degree: usize, split: bool) -> Result<Self> {
        check_gt("beta", beta, -(d as f64 + 1.0) / 2.0, "beta must exceed -(d+1)/2")?;
        check_gt("gamma", gamma, -1.0, "gamma must exceed -1")?;
        let alpha = beta + (d as f64 - 1.0) / 2.0;
        let t_rule = unit_interval_rule(points_for_exactness(degree), alpha, gamma)?;
        let sphere = if split {
            rule_sphere_split(d, degree)?
        } else {
            rule_sphere(d, degree)?
        };
        Ok(Self { t_rule, sphere })
    }

    pub fn flatten(&self) -> ProductRule<SurfacePoint> {
        let mut points = Vec::with_capacity(self.t_rule.len() * self.sphere.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (&t, &wt) in self.t_rule.nodes.iter().zip(&self.t_rule.weights) {
            for (xi, &ws) in self.sphere.points.iter().zip(&self.sphere.weights) {
                points.push(SurfacePoint::from_parts(xi.clone(), t));
                weights.push(wt * ws);
            }
        }
        ProductRule {
            points,
            weights,
            exactness: self.sphere.exactness.min(self.t_rule.exactness),
            domain_tag: DomainTag::V0,
        }
    }
}

/// Rule for `𝖻_{β,γ} ϖ_{β,γ} dσ` on the surface paraboloid `V₀^{d+1}`.
pub fn rule_v0(d: usize, beta: f64, gamma: f64, degree: usize) -> Result<ProductRule<SurfacePoint>> {
    Ok(SurfaceTensorRule::new(d, beta, gamma, degree, false)?.flatten())
}

/// Factorized rule on the solid paraboloid: `t`-rule times a ball rule, the
/// latter itself a radial rule in `ρ = ‖y‖²` times a sphere rule.
#[derive(Debug, Clone)]
pub struct SolidTensorRule {
    pub t_rule: Rule1D,
    /// Nodes in `ρ = ‖y‖²` for the normalized weight `ρ^{(d-2)/2} (1-ρ)^{μ-1/2}`.
    pub radial: Rule1D,
    pub sphere: ProductRule<Vec<f64>>,
}

impl SolidTensorRule {
    pub fn new(d: usize, beta: f64, gamma: f64, mu: f64, degree: usize, split: bool) -> Result<Self> {
        check_gt("beta", beta, -(d as f64 + 1.0) / 2.0, "beta must exceed -(d+1)/2")?;
        check_gt("gamma", gamma, -1.0, "gamma must exceed -1")?;
        check_gt("mu", mu, -0.5, "mu must exceed -1/2")?;
        let alpha = beta + mu + (d as f64 - 1.0) / 2.0;
        let t_rule = unit_interval_rule(points_for_exactness(degree), alpha, gamma)?;
        let extra = if split { 2 } else { 0 };
        let radial = unit_interval_rule(
            points_for_exactness(degree / 2) + extra,
            (d as f64 - 2.0) / 2.0,
            mu - 0.5,
        )?;
        let sphere = if split {
            rule_sphere_split(d, degree)?
        } else {
            rule_sphere(d, degree)?
        };
        Ok(Self { t_rule, radial, sphere })
    }

    /// The ball factor as a flat rule on `B^d`.
    pub fn ball(&self) -> ProductRule<Vec<f64>> {
        ball_product(&self.radial, &self.sphere)
    }

    pub fn flatten(&self) -> ProductRule<SolidPoint> {
        let ball = self.ball();
        let mut points = Vec::with_capacity(self.t_rule.len() * ball.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (&t, &wt) in self.t_rule.nodes.iter().zip(&self.t_rule.weights) {
            let r = t.sqrt();
            for (y, &wb) in ball.points.iter().zip(&ball.weights) {
                points.push(SolidPoint::from_parts(y.iter().map(|v| r * v).collect(), t));
                weights.push(wt * wb);
            }
        }
        ProductRule {
            points,
            weights,
            exactness: ball.exactness.min(self.t_rule.exactness),
            domain_tag: DomainTag::V,
        }
    }
}

fn ball_product(radial: &Rule1D, sphere: &ProductRule<Vec<f64>>) -> ProductRule<Vec<f64>> {
    let mut points = Vec::with_capacity(sphere.len() * radial.len());
    let mut weights = Vec::with_capacity(sphere.len() * radial.len());
    for (&rho, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let r = rho.sqrt();
        for (y, &ws) in sphere.points.iter().zip(&sphere.weights) {
            points.push(y.iter().map(|v| r * v).collect());
            weights.push(wr * ws);
        }
    }
    ProductRule {
        points,
        weights,
        exactness: sphere.exactness.min(2 * radial.exactness + 1),
        domain_tag: DomainTag::Ball,
    }
}

/// Rule for `𝐛_{β,γ,μ} W_{β,γ,μ}` on the solid paraboloid `V^{d+1}`.
pub fn rule_v(d: usize, beta: f64, gamma: f64, mu: f64, degree: usize) -> Result<ProductRule<SolidPoint>> {
    Ok(SolidTensorRule::new(d, beta, gamma, mu, degree, false)?.flatten())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{beta_const, c_lambda, jacobi_norm};
    use approx::assert_relative_eq;

    // ∫_0^1 t^p (1-t)^q dt
    fn beta_fn(p: f64, q: f64) -> f64 {
        1.0 / beta_const(p, q)
    }

    #[test]
    fn gauss_jacobi_examples() {
        let r = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert!(r.nodes[0].abs() < 1e-15);
        assert_relative_eq!(r.weights[0], 2.0, epsilon = 1e-14);
        let r = gauss_jacobi(2, 0.0, 0.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], -s, epsilon = 1e-15);
        assert_relative_eq!(r.nodes[1], s, epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(r.weights[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn second_moment_matches_beta_integrals() {
        let (a, b) = (0.5, -0.3);
        let r = gauss_jacobi(4, a, b).unwrap();
        let got = r.integrate(|t| t * t);
        // t = 2s - 1 turns the moment into Beta integrals.
        let scale = 2f64.powf(a + b + 1.0);
        let exact = scale * (4.0 * beta_fn(b + 2.0, a) - 4.0 * beta_fn(b + 1.0, a) + beta_fn(b, a));
        assert_relative_eq!(got, exact, max_relative = 1e-14);
    }

    #[test]
    fn masses_match_normalization_constants() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, -0.5), (2.5, -0.7), (-0.9, 4.0)] {
            let r = gauss_jacobi(9, a, b).unwrap();
            assert_relative_eq!(r.mass(), 1.0 / beta_const_sym(a, b), max_relative = 1e-12);
        }
        let lam = 1.7;
        let r = gauss_jacobi(6, lam - 0.5, lam - 0.5).unwrap();
        assert_relative_eq!(r.mass(), 1.0 / c_lambda(lam), max_relative = 1e-12);
    }

    #[test]
    fn exactness_on_unit_interval_moments() {
        for &(p, q) in &[(0.0, 0.0), (0.5, 1.5), (-0.6, 2.0), (3.0, -0.4)] {
            let n = 8;
            let r = unit_interval_rule(n, p, q).unwrap();
            for j in 0..2 * n {
                let got = r.integrate(|t| t.powi(j as i32));
                let exact = beta_fn(p + j as f64, q) / beta_fn(p, q);
                assert_relative_eq!(got, exact, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn large_rules_converge() {
        let r = gauss_jacobi(200, 1.5, -0.5).unwrap();
        assert_eq!(r.len(), 200);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert_relative_eq!(r.mass(), 1.0 / beta_const_sym(1.5, -0.5), max_relative = 1e-12);
    }

    #[test]
    fn jacobi_orthogonality() {
        let p = JacobiParams::new(0.5, 1.5).unwrap();
        let r = gauss_jacobi_normalized(12, 0.5, 1.5).unwrap();
        for n in 0..=10 {
            for m in 0..=10 {
                let v = r.integrate(|t| jacobi_eval(n, p, t) * jacobi_eval(m, p, t));
                let want = if n == m { jacobi_norm(n, p) } else { 0.0 };
                assert!((v - want).abs() <= 1e-11, "{n} {m}: {v}");
            }
        }
    }

    #[test]
    fn endpoint_average_limit() {
        let r = symmetric_measure(0.0, 5).unwrap();
        assert_eq!(r.integrate(|u| u * u + u), 1.0);
        // small μ approaches the endpoint average
        let r = symmetric_measure(1e-3, 20).unwrap();
        assert!((r.integrate(|u| u.powi(4)) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn split_rule_integrates_kink() {
        let b: f64 = 0.7;
        let r = split_symmetric_rule(30, b - 0.5).unwrap();
        let got = r.integrate(|u| u.abs());
        // c_b ∫|u|(1-u²)^{b-1/2} = c_b / (b + 1/2)
        assert_relative_eq!(got, c_lambda(b) / (b + 0.5), max_relative = 1e-12);
    }

    #[test]
    fn pairwise_sum_is_order_fixed() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let r = rule_v0(3, 0.0, 1.0, 12).unwrap();
        let f = |p: &SurfacePoint| (p.t * 3.0 + p.xi[0]).sin();
        assert_eq!(r.integrate(f).to_bits(), r.par_integrate(f).to_bits());
    }

    #[test]
    fn constants_integrate_to_one() {
        let ones = |w: &[f64]| pairwise_sum(w);
        assert_relative_eq!(ones(&rule_u(0.3, 0.8, 7).unwrap().weights), 1.0, epsilon = 1e-13);
        assert_relative_eq!(ones(&rule_u_split(0.3, 0.8, 7).unwrap().weights), 1.0, epsilon = 1e-13);
        for d in [2, 3] {
            assert_relative_eq!(ones(&rule_sphere(d, 9).unwrap().weights), 1.0, epsilon = 1e-13);
            assert_relative_eq!(ones(&rule_sphere_split(d, 9).unwrap().weights), 1.0, epsilon = 1e-13);
            assert_relative_eq!(ones(&rule_ball(d, 0.7, 9).unwrap().weights), 1.0, epsilon = 1e-13);
            assert_relative_eq!(ones(&rule_v0(d, -0.5, 1.0, 9).unwrap().weights), 1.0, epsilon = 1e-13);
            assert_relative_eq!(
                ones(&rule_v(d, 0.0, 1.0, 0.5, 9).unwrap().weights),
                1.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn sphere_rule_rejects_other_dimensions() {
        assert!(matches!(rule_sphere(4, 3), Err(Error::UnsupportedDimension(4))));
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi(3, -1.0, 0.0).is_err());
        assert!(rule_u(0.0, -0.5, 3).is_err());
    }
}
