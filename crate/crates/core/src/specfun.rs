//! Scalar special functions: Jacobi and Gegenbauer polynomials, their
//! derivatives and norms, the Beta-type normalization constants, and the
//! generalized binomial weights of Cesàro means.
//!
//! Norms are those of the *normalized* Jacobi weight: with
//! `w(t) = (1-t)^α (1+t)^β` and `c' = 2^{-α-β-1} c_{α,β}`,
//! `c' ∫ P_n P_m w = h_n δ_{nm}` and `h_0 = 1`.

use std::f64::consts::PI;

use crate::error::{check_gt, Error, Result};

/// Parameters `(α, β)` of the Jacobi weight `(1-t)^α (1+t)^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_gt("alpha", alpha, -1.0, "Jacobi parameter must exceed -1")?;
        check_gt("beta", beta, -1.0, "Jacobi parameter must exceed -1")?;
        Ok(Self { alpha, beta })
    }

    /// Symmetric parameters `(λ-1/2, λ-1/2)`, the Gegenbauer family of index λ.
    pub fn gegenbauer(lambda: f64) -> Result<Self> {
        Self::new(lambda - 0.5, lambda - 0.5)
    }

    #[inline]
    fn ab2(&self) -> f64 {
        (self.alpha + 1.0) + (self.beta + 1.0)
    }

    // Coefficients of P_n = (a t + b) P_{n-1} - c P_{n-2}, valid for n >= 2.
    #[inline]
    fn recurrence(&self, n: usize) -> (f64, f64, f64) {
        let (a, b) = (self.alpha, self.beta);
        // α+β+2 formed from α+1, β+1 so that it stays accurate near α+β = -2
        let ab2 = self.ab2();
        let n = n as f64;
        let nab = (n - 2.0) + ab2;
        let s = (2.0 * n - 2.0) + ab2;
        let den = 2.0 * n * nab * ((2.0 * n - 4.0) + ab2);
        let ca = (s - 1.0) * s / (2.0 * n * nab);
        let cb = (s - 1.0) * (a - b) * (a + b) / den;
        let cc = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s / den;
        (ca, cb, cc)
    }
}

/// `den^n · P_n^{(α,β)}(num/den)`, evaluated by the homogenized three-term
/// recurrence. With `den = √x₂` and symmetric parameters this is the
/// polynomial `x₂^{n/2} P_n(x₁/√x₂)`, regular at `x₂ = 0`.
pub fn jacobi_scaled(n: usize, p: JacobiParams, num: f64, den: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let a = p.alpha;
    let mut prev = 1.0;
    let mut cur = (a + 1.0) * den + 0.5 * p.ab2() * (num - den);
    let den2 = den * den;
    for k in 2..=n {
        let (ca, cb, cc) = p.recurrence(k);
        let next = (ca * num + cb * den) * cur - cc * den2 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `s^n · P_n^{(α,α)}(num/s)` for symmetric parameters, where only `s² = den_sq`
/// enters the recurrence. This is a polynomial in `(num, s²)`; with
/// `num = x₁`, `den_sq = x₂` it gives `x₂^{n/2} P_n(x₁/√x₂)` without a square root.
pub fn jacobi_symmetric_homog(n: usize, alpha: f64, num: f64, den_sq: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let p = JacobiParams { alpha, beta: alpha };
    let mut prev = 1.0;
    let mut cur = (alpha + 1.0) * num;
    for k in 2..=n {
        let (ca, _, cc) = p.recurrence(k);
        let next = ca * num * cur - cc * den_sq * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_n^{(α,β)}(t)` by the three-term recurrence; defined for all real `t`.
pub fn jacobi_eval(n: usize, p: JacobiParams, t: f64) -> f64 {
    jacobi_scaled(n, p, t, 1.0)
}

/// Values `P_0(t), …, P_n(t)` in one recurrence pass.
pub fn jacobi_all(n: usize, p: JacobiParams, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    jacobi_all_into(n, p, t, &mut out);
    out
}

pub(crate) fn jacobi_all_into(n: usize, p: JacobiParams, t: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push((p.alpha + 1.0) + 0.5 * p.ab2() * (t - 1.0));
    for k in 2..=n {
        let (ca, cb, cc) = p.recurrence(k);
        let v = (ca * t + cb) * out[k - 1] - cc * out[k - 2];
        out.push(v);
    }
}

/// `d/dt P_n^{(α,β)}(t) = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}(t)`.
pub fn jacobi_deriv(n: usize, p: JacobiParams, t: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let shifted = JacobiParams {
        alpha: p.alpha + 1.0,
        beta: p.beta + 1.0,
    };
    0.5 * ((n as f64 - 1.0) + p.ab2()) * jacobi_eval(n - 1, shifted, t)
}

/// Second derivative of `P_n^{(α,β)}`.
pub fn jacobi_deriv2(n: usize, p: JacobiParams, t: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let shifted = JacobiParams {
        alpha: p.alpha + 2.0,
        beta: p.beta + 2.0,
    };
    let nf = n as f64;
    0.25 * ((nf - 1.0) + p.ab2()) * (nf + p.ab2()) * jacobi_eval(n - 2, shifted, t)
}

/// `P_n^{(α,β)}(1) = (α+1)_n / n!`.
pub fn jacobi_at_one(n: usize, p: JacobiParams) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (p.alpha + 1.0 + k as f64) / (k as f64 + 1.0))
}

/// Norm `h_n^{(α,β)}` of `P_n^{(α,β)}` under the normalized Jacobi weight.
pub fn jacobi_norm(n: usize, p: JacobiParams) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (a1, b1, ab2) = (p.alpha + 1.0, p.beta + 1.0, p.ab2());
    let mut h = 1.0;
    for k in 0..n {
        let k = k as f64;
        h *= (a1 + k) * (b1 + k) / ((k + 1.0) * (ab2 + k));
    }
    let nf = n as f64;
    h * ((nf - 1.0) + ab2) / ((2.0 * nf - 1.0) + ab2)
}

/// Table of Jacobi norms `h_0..=h_n` together with `c_{α,β}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTable {
    pub h: Vec<f64>,
    pub c_ab: f64,
}

impl NormTable {
    pub fn new(max_degree: usize, p: JacobiParams) -> Self {
        Self {
            h: (0..=max_degree).map(|n| jacobi_norm(n, p)).collect(),
            c_ab: beta_const(p.alpha, p.beta),
        }
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `c_{a,b} = Γ(a+b+2) / (Γ(a+1) Γ(b+1))`, the reciprocal of `∫₀¹ t^a (1-t)^b dt`.
pub fn beta_const(a: f64, b: f64) -> f64 {
    (ln_gamma((a + 1.0) + (b + 1.0)) - ln_gamma(a + 1.0) - ln_gamma(b + 1.0)).exp()
}

/// `c'_{a,b} = 2^{-a-b-1} c_{a,b}`, the reciprocal mass of `(1-t)^a (1+t)^b` on `[-1,1]`.
pub fn beta_const_sym(a: f64, b: f64) -> f64 {
    beta_const(a, b) * (-(a + b + 1.0) * std::f64::consts::LN_2).exp()
}

/// `c_λ = Γ(λ+1) / (Γ(1/2) Γ(λ+1/2))`, the reciprocal mass of `(1-t²)^{λ-1/2}`.
pub fn c_lambda(lambda: f64) -> f64 {
    (ln_gamma(lambda + 1.0) - 0.5 * PI.ln() - ln_gamma(lambda + 0.5)).exp()
}

/// Surface area `ω_d = 2 π^{d/2} / Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

/// `b_μ = Γ(μ+(d+1)/2) / (π^{d/2} Γ(μ+1/2))`, normalizing `(1-‖x‖²)^{μ-1/2}` on the unit ball.
pub fn ball_const(d: usize, mu: f64) -> f64 {
    let h = d as f64 / 2.0;
    (ln_gamma(mu + h + 0.5) - h * PI.ln() - ln_gamma(mu + 0.5)).exp()
}

/// Gegenbauer polynomial `C_n^λ(t)` for `λ ≠ 0`.
pub fn gegenbauer_c(n: usize, lambda: f64, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * t;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda - 1.0) * t * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the first kind.
pub fn chebyshev_t(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for _ in 2..=n {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Zonal polynomial `Z_n^λ(t) = (n+λ)/λ · C_n^λ(t)`.
///
/// At `λ = 0` the limit is used: `Z_0^0 = 1`, `Z_n^0 = 2 T_n` for `n ≥ 1`.
/// Negative `λ > -1/2` is accepted; it arises for parabolic-domain weights
/// with `b < 0`.
pub fn gegenbauer_z(n: usize, lambda: f64, t: f64) -> Result<f64> {
    check_gt("lambda", lambda, -0.5, "Gegenbauer index must exceed -1/2")?;
    if n == 0 {
        return Ok(1.0);
    }
    if lambda == 0.0 {
        return Ok(2.0 * chebyshev_t(n, t));
    }
    Ok((n as f64 + lambda) / lambda * gegenbauer_c(n, lambda, t))
}

/// `s^n Z_n^λ(num/s)` with `s² = den_sq`, written through the symmetric Jacobi
/// kernel `P_n(1) P_n(·) / h_n` with parameters `(λ-1/2, λ-1/2)`; regular at
/// `s = 0` and at `λ = 0`, and valid for `λ > -1/2`.
pub fn zonal_homog(n: usize, lambda: f64, num: f64, den_sq: f64) -> f64 {
    let p = JacobiParams {
        alpha: lambda - 0.5,
        beta: lambda - 0.5,
    };
    jacobi_at_one(n, p) / jacobi_norm(n, p) * jacobi_symmetric_homog(n, p.alpha, num, den_sq)
}

/// Sign-aware `(x)_j / j!` computed through `ln Γ`.
pub fn rising_over_factorial(x: f64, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if x <= 0.0 && x.fract() == 0.0 {
        // Non-positive integers: Γ(x) has a pole but the product is finite.
        return (0..j).fold(1.0, |acc, k| acc * (x + k as f64) / (k as f64 + 1.0));
    }
    let (lg_top, s_top) = libm::lgamma_r(x + j as f64);
    let (lg_bot, s_bot) = libm::lgamma_r(x);
    let mag = (lg_top - lg_bot - ln_gamma(j as f64 + 1.0)).exp();
    if s_top * s_bot < 0 {
        -mag
    } else {
        mag
    }
}

/// Generalized binomial `binom(j + x, j)` for integer `j ≥ 0` and real `x`.
pub fn binom_shifted(x: f64, j: usize) -> f64 {
    rising_over_factorial(x + 1.0, j)
}

/// Order `n` and index `δ > -1` of a Cesàro `(C, δ)` mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroSpec {
    pub n: usize,
    pub delta: f64,
}

impl CesaroSpec {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        check_gt("delta", delta, -1.0, "Cesaro index must exceed -1")?;
        Ok(Self { n, delta })
    }

    /// Weights on the partial-sum kernels `K_0..=K_n`:
    /// `binom(n-m+δ-1, n-m) / binom(n+δ, n)`.
    pub fn partial_sum_weights(&self) -> Vec<f64> {
        let n = self.n;
        let norm = binom_shifted(self.delta, n);
        (0..=n).map(|m| binom_shifted(self.delta - 1.0, n - m) / norm).collect()
    }

    /// Weights on the projection kernels `P_0..=P_n`:
    /// `binom(n-k+δ, n-k) / binom(n+δ, n)`.
    pub fn projection_weights(&self) -> Vec<f64> {
        let n = self.n;
        let norm = binom_shifted(self.delta, n);
        (0..=n).map(|k| binom_shifted(self.delta, n - k) / norm).collect()
    }
}

/// Weights of the `(C, δ)` mean in the partial-sum representation.
pub fn cesaro_weights(spec: CesaroSpec) -> Vec<f64> {
    spec.partial_sum_weights()
}

/// Cesàro kernel of the Fourier–Jacobi series evaluated at `(1, t)`:
/// `k_n^δ(w_{α,β}; 1, t)`. Requires `δ > -1`.
pub fn jacobi_cesaro_kernel_at_one(spec: CesaroSpec, p: JacobiParams, t: f64) -> f64 {
    let w = spec.projection_weights();
    let vals = jacobi_all(spec.n, p, t);
    (0..=spec.n)
        .map(|k| w[k] * jacobi_at_one(k, p) * vals[k] / jacobi_norm(k, p))
        .sum()
}

pub(crate) fn ensure_index(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(msg()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn jp(a: f64, b: f64) -> JacobiParams {
        JacobiParams::new(a, b).unwrap()
    }

    // Hypergeometric series of P_n^{(α,β)}; independent of the recurrence.
    fn jacobi_2f1(n: usize, a: f64, b: f64, t: f64) -> f64 {
        jacobi_2f1_with_size(n, a, b, t).0
    }

    // Also returns Σ|terms|, which bounds the rounding error of the series.
    fn jacobi_2f1_with_size(n: usize, a: f64, b: f64, t: f64) -> (f64, f64) {
        let x = (1.0 - t) / 2.0;
        let mut term: f64 = 1.0;
        let mut sum = 1.0;
        let mut size = 1.0;
        for k in 0..n {
            let kf = k as f64;
            term *= (kf - n as f64) * (n as f64 + a + b + 1.0 + kf) / ((a + 1.0 + kf) * (kf + 1.0)) * x;
            sum += term;
            size += term.abs();
        }
        let lead = (0..n).fold(1.0, |acc, k| acc * (a + 1.0 + k as f64) / (k as f64 + 1.0));
        (lead * sum, lead.abs() * size)
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_eval(0, jp(0.3, 0.1), 7.0), 1.0);
        assert_relative_eq!(jacobi_eval(2, jp(1.0, 0.0), 1.0), 3.0, epsilon = 1e-15);
        assert_eq!(jacobi_eval(1, jp(0.0, 0.0), 0.0), 0.0);
        let v = jacobi_eval(5, jp(0.7, -0.3), 0.42);
        assert_relative_eq!(v, jacobi_2f1(5, 0.7, -0.3, 0.42), max_relative = 1e-13);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(JacobiParams::new(0.0, f64::NAN).is_err());
        assert!(CesaroSpec::new(3, -1.0).is_err());
        assert!(gegenbauer_z(2, -0.5, 0.1).is_err());
    }

    #[test]
    fn recurrence_matches_hypergeometric_grid() {
        let params = [
            (0.0, 0.0),
            (-0.5, -0.5),
            (0.7, -0.3),
            (2.5, 1.5),
            (-0.9, 3.0),
            (5.0, -0.95),
        ];
        for &(a, b) in &params {
            for n in 0..=12 {
                for i in 0..=20 {
                    let t = -1.0 + 0.1 * i as f64;
                    let r = jacobi_eval(n, jp(a, b), t);
                    let (s, size) = jacobi_2f1_with_size(n, a, b, t);
                    let scale = s.abs().max(size).max(1e-3);
                    assert!((r - s).abs() / scale <= 1e-12, "n={n} a={a} b={b} t={t}: {r} vs {s}");
                }
            }
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(jacobi_deriv(0, jp(0.2, 0.3), 0.5), 0.0);
        for t in [-0.7, 0.0, 0.9] {
            assert_relative_eq!(jacobi_deriv(1, jp(0.0, 0.0), t), 1.0, epsilon = 1e-15);
        }
        let p = jp(1.2, 0.4);
        let h = 1e-5;
        let fd = (jacobi_eval(4, p, 0.3 + h) - jacobi_eval(4, p, 0.3 - h)) / (2.0 * h);
        let an = jacobi_deriv(4, p, 0.3);
        assert!((fd - an).abs() / an.abs() <= 1e-7, "{fd} vs {an}");
    }

    #[test]
    fn second_derivative_matches_fd() {
        let p = jp(0.6, -0.4);
        let h = 1e-4;
        for n in 0..8 {
            let t = 0.17;
            let fd = (jacobi_deriv(n, p, t + h) - jacobi_deriv(n, p, t - h)) / (2.0 * h);
            assert!((fd - jacobi_deriv2(n, p, t)).abs() <= 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn jacobi_ode_on_unit_interval() {
        // t(1-t) y'' + (1+α-(α+γ+2)t) y' + n(n+α+γ+1) y = 0 for y = P_n^{(α,γ)}(1-2t)
        for &(a, g) in &[(0.0, 0.0), (1.5, 0.5), (-0.5, 2.0), (3.0, -0.7)] {
            let p = jp(a, g);
            for n in 0..=10 {
                let mut sup: f64 = 0.0;
                for i in 0..=50 {
                    let t = i as f64 / 50.0;
                    let x = 1.0 - 2.0 * t;
                    let y = jacobi_eval(n, p, x);
                    let y1 = -2.0 * jacobi_deriv(n, p, x);
                    let y2 = 4.0 * jacobi_deriv2(n, p, x);
                    let nf = n as f64;
                    let r = t * (1.0 - t) * y2 + (1.0 + a - (a + g + 2.0) * t) * y1 + nf * (nf + a + g + 1.0) * y;
                    sup = sup.max(r.abs());
                }
                assert!(sup <= 1e-8, "n={n} a={a} g={g}: {sup}");
            }
        }
    }

    #[test]
    fn norm_examples() {
        assert_eq!(jacobi_norm(0, jp(0.3, -0.2)), 1.0);
        assert_eq!(jacobi_norm(0, jp(-0.5, -0.5)), 1.0);
        assert_relative_eq!(jacobi_norm(1, jp(0.0, 0.0)), 1.0 / 3.0, epsilon = 1e-15);
        // h_1^{(1/2,0)} = 3/7
        assert_relative_eq!(jacobi_norm(1, jp(0.5, 0.0)), 3.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn beta_const_examples() {
        assert_relative_eq!(beta_const(0.0, 0.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(beta_const(1.0, 0.0), 2.0, epsilon = 1e-14);
        // Γ(3)/Γ(1.5)^2 with Γ(1.5) = √π/2
        assert_relative_eq!(beta_const(0.5, 0.5), 2.0 / (PI / 4.0), max_relative = 1e-14);
        assert_relative_eq!(c_lambda(0.5), 0.5, max_relative = 1e-14);
        assert_relative_eq!(c_lambda(1.0), 2.0 / PI, max_relative = 1e-14);
    }

    #[test]
    fn c_lambda_matches_trapezoid_oracle() {
        // ∫_{-1}^1 (1-t²)^{λ-1/2} dt = ∫_{-π/2}^{π/2} cos^{2λ} θ dθ, periodic trapezoid.
        let lambda = 2.3;
        let n = 4000;
        let h = PI / n as f64;
        let s: f64 = (0..n)
            .map(|i| (-PI / 2.0 + (i as f64 + 0.5) * h).cos().powf(2.0 * lambda))
            .sum::<f64>()
            * h;
        assert_relative_eq!(c_lambda(lambda), 1.0 / s, max_relative = 1e-12);
    }

    #[test]
    fn gegenbauer_examples() {
        assert_eq!(gegenbauer_z(0, 0.7, 3.0).unwrap(), 1.0);
        assert_relative_eq!(gegenbauer_z(2, 1.0, 1.0).unwrap(), 9.0, epsilon = 1e-14);
        let t: f64 = 0.1;
        let legendre3 = (5.0 * t.powi(3) - 3.0 * t) / 2.0;
        assert_relative_eq!(gegenbauer_z(3, 0.5, t).unwrap(), 7.0 * legendre3, epsilon = 1e-14);
        assert_relative_eq!(
            gegenbauer_z(3, 0.0, 0.3).unwrap(),
            2.0 * chebyshev_t(3, 0.3),
            epsilon = 1e-15
        );
    }

    #[test]
    fn zonal_through_jacobi_kernel_and_homog() {
        for &lambda in &[0.0, 0.5, 1.0, 2.7] {
            for n in 0..10 {
                for &t in &[-1.0, -0.3, 0.2, 0.95] {
                    let z = gegenbauer_z(n, lambda, t).unwrap();
                    let s = zonal_homog(n, lambda, t, 1.0);
                    assert!((z - s).abs() <= 1e-11 * (1.0 + z.abs()), "{n} {lambda} {t}");
                }
            }
        }
        // value at 1 for λ > 0
        let (n, l) = (5usize, 1.3);
        let c1 = (0..n).fold(1.0, |acc, k| acc * (2.0 * l + k as f64) / (k as f64 + 1.0));
        assert_relative_eq!(
            gegenbauer_z(n, l, 1.0).unwrap(),
            (n as f64 + l) / l * c1,
            max_relative = 1e-13
        );
    }

    #[test]
    fn cesaro_weight_examples() {
        assert_eq!(CesaroSpec::new(0, 1.0).unwrap().partial_sum_weights(), vec![1.0]);
        let w = CesaroSpec::new(2, 0.0).unwrap().partial_sum_weights();
        assert_eq!(w, vec![0.0, 0.0, 1.0]);
        let w = CesaroSpec::new(3, 1.0).unwrap().projection_weights();
        let expect = [1.0, 0.75, 0.5, 0.25];
        for (a, b) in w.iter().zip(expect) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn cesaro_representations_agree() {
        // arbitrary projection sequence
        let proj: Vec<f64> = (0..40).map(|k| ((k as f64) * 0.7).sin() * (1.0 + k as f64)).collect();
        for &delta in &[-0.5, 0.0, 0.3, 1.0, 2.5, 7.0] {
            for n in [0usize, 1, 5, 17, 39] {
                let spec = CesaroSpec::new(n, delta).unwrap();
                let partial: Vec<f64> = proj[..=n]
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect();
                let a: f64 = spec
                    .partial_sum_weights()
                    .iter()
                    .zip(&partial)
                    .map(|(w, s)| w * s)
                    .sum();
                let b: f64 = spec.projection_weights().iter().zip(&proj).map(|(w, p)| w * p).sum();
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "n={n} δ={delta}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn large_order_weights_stay_finite() {
        let w = CesaroSpec::new(400, 3.5).unwrap().projection_weights();
        assert!(w.iter().all(|v| v.is_finite() && *v >= 0.0 && *v <= 1.0));
        assert_relative_eq!(w[400], 1.0 / binom_shifted(3.5, 400), max_relative = 1e-12);
    }
}
