//! The parabolic domain `U = {x₁² ≤ x₂ ≤ 1}` with weight
//! `U_{a,b}(x) = (1-x₂)^a (x₂-x₁²)^{b-1/2}`.

use std::ops::Range;

use crate::basis::{cesaro_from_kernels, kernels_direct, Expansion, OrthogonalBasis};
use crate::error::{check_gt, Error, Result};
use crate::quadrature::{gauss_jacobi_normalized, pairwise_sum, ProductRule};
use crate::specfun::{
    beta_const, beta_const_sym, ensure_index, jacobi_all_into, jacobi_at_one, jacobi_eval, jacobi_norm,
    jacobi_symmetric_homog, zonal_homog, CesaroSpec, JacobiParams,
};

/// Tolerance on the constraints `x₁² ≤ x₂ ≤ 1` at construction.
pub const U_TOL: f64 = 1e-12;

/// A point of the parabolic domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UPoint {
    pub x1: f64,
    pub x2: f64,
}

impl UPoint {
    /// The corner `(1, 1)`.
    pub const ONE: UPoint = UPoint { x1: 1.0, x2: 1.0 };

    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let ok = x1.is_finite() && x2.is_finite() && x1 * x1 <= x2 + U_TOL && x2 <= 1.0 + U_TOL;
        if !ok {
            return Err(Error::PointOutsideDomain {
                domain: "U",
                detail: format!("({x1}, {x2}) violates x1^2 <= x2 <= 1"),
            });
        }
        Ok(Self { x1, x2 })
    }

    /// Unchecked constructor for points produced by rules and maps.
    pub fn from_parts(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// The boundary point `(√x₂, x₂)` of the parabola.
    pub fn on_boundary(x2: f64) -> Self {
        Self { x1: x2.sqrt(), x2 }
    }

    pub fn on_parabola(&self) -> bool {
        self.x2 - self.x1 * self.x1 <= U_TOL
    }
}

/// Parameters of `U_{a,b}` and the constant `d_{a,b} = c'_{b-1/2,b-1/2} c_{b,a}`
/// that makes `d_{a,b} U_{a,b}` a probability density on `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightU {
    pub a: f64,
    pub b: f64,
    pub d_ab: f64,
}

impl WeightU {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_gt("a", a, -1.0, "weight parameter a must exceed -1")?;
        check_gt("b", b, -0.5, "weight parameter b must exceed -1/2")?;
        Ok(Self {
            a,
            b,
            d_ab: beta_const_sym(b - 0.5, b - 0.5) * beta_const(b, a),
        })
    }

    fn radial(&self, k: usize) -> JacobiParams {
        JacobiParams {
            alpha: self.b + k as f64,
            beta: self.a,
        }
    }

    fn angular(&self) -> JacobiParams {
        JacobiParams {
            alpha: self.b - 0.5,
            beta: self.b - 0.5,
        }
    }

    /// Parameters of the one-variable closed formula at the corner, `(a+b+1, b)`.
    pub fn corner_params(&self) -> JacobiParams {
        JacobiParams {
            alpha: self.a + self.b + 1.0,
            beta: self.b,
        }
    }
}

/// Flat index of `P_{k,n}` in degree order.
pub fn flat_index(k: usize, n: usize) -> usize {
    n * (n + 1) / 2 + k
}

/// `P_{k,n}^{a,b}(x) = P_{n-k}^{(b+k,a)}(1-2x₂) x₂^{k/2} P_k^{(b-1/2,b-1/2)}(x₁/√x₂)`,
/// evaluated as a polynomial in `(x₁, x₂)`.
pub fn basis_eval(k: usize, n: usize, w: &WeightU, x: &UPoint) -> Result<f64> {
    ensure_index(k <= n, || format!("k = {k} exceeds n = {n}"))?;
    let radial = jacobi_eval(n - k, w.radial(k), 1.0 - 2.0 * x.x2);
    Ok(radial * jacobi_symmetric_homog(k, w.b - 0.5, x.x1, x.x2))
}

/// `h_{k,n}^{a,b} = (c_{b,a}/c_{b+k,a}) h_{n-k}^{(b+k,a)} h_k^{(b-1/2,b-1/2)}`.
pub fn basis_norm(k: usize, n: usize, w: &WeightU) -> Result<f64> {
    ensure_index(k <= n, || format!("k = {k} exceeds n = {n}"))?;
    Ok(norm_unchecked(k, n, w))
}

fn norm_unchecked(k: usize, n: usize, w: &WeightU) -> f64 {
    let kf = k as f64;
    beta_const(w.b, w.a) / beta_const(w.b + kf, w.a) * jacobi_norm(n - k, w.radial(k)) * jacobi_norm(k, w.angular())
}

impl OrthogonalBasis for WeightU {
    type Point = UPoint;

    fn degree_ranges(&self, n_max: usize) -> Vec<Range<usize>> {
        (0..=n_max).map(|n| flat_index(0, n)..flat_index(0, n + 1)).collect()
    }

    fn eval_all(&self, n_max: usize, x: &UPoint, out: &mut Vec<f64>) {
        out.clear();
        out.resize(flat_index(0, n_max + 1), 0.0);
        let t = 1.0 - 2.0 * x.x2;
        let mut radial = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            let ang = jacobi_symmetric_homog(k, self.b - 0.5, x.x1, x.x2);
            jacobi_all_into(n_max - k, self.radial(k), t, &mut radial);
            for (j, r) in radial.iter().enumerate() {
                out[flat_index(k, k + j)] = r * ang;
            }
        }
    }

    fn norms(&self, n_max: usize) -> Vec<f64> {
        (0..=n_max)
            .flat_map(|n| (0..=n).map(move |k| (k, n)))
            .map(|(k, n)| norm_unchecked(k, n, self))
            .collect()
    }
}

/// Reproducing kernel `P_n(U_{a,b}; x, y)` by direct summation over the basis.
pub fn kernel_P(n: usize, w: &WeightU, x: &UPoint, y: &UPoint) -> f64 {
    (0..=n)
        .map(|k| {
            let hx = basis_eval(k, n, w, x).unwrap_or(0.0);
            let hy = basis_eval(k, n, w, y).unwrap_or(0.0);
            hx * hy / norm_unchecked(k, n, w)
        })
        .sum()
}

/// `P_n(U_{a,b}; (√x₂, x₂), y)` through the zonal form
/// `Σ_m (c_{b+m,a}/c_{b,a}) P_{n-m}(1-2x₂) P_{n-m}(1-2y₂) / h_{n-m} · x₂^{m/2} y₂^{m/2} Z_m^b(y₁/√y₂)`.
pub fn kernel_P_boundary(n: usize, w: &WeightU, x2: f64, y: &UPoint) -> f64 {
    let sx = x2.max(0.0).sqrt();
    let (tx, ty) = (1.0 - 2.0 * x2, 1.0 - 2.0 * y.x2);
    let c0 = beta_const(w.b, w.a);
    let mut total = 0.0;
    let mut sx_m = 1.0;
    for m in 0..=n {
        let p = w.radial(m);
        let radial = jacobi_eval(n - m, p, tx) * jacobi_eval(n - m, p, ty) / jacobi_norm(n - m, p);
        let c = beta_const(w.b + m as f64, w.a) / c0;
        total += c * radial * sx_m * zonal_homog(m, w.b, y.x1, y.x2);
        sx_m *= sx;
    }
    total
}

/// `z(x,t) = 1 - (1-t²)(1-x₁) - (1-t)²(1-x₂)/2`.
pub fn z_map(x: &UPoint, t: f64) -> f64 {
    1.0 - (1.0 - t * t) * (1.0 - x.x1) - 0.5 * (1.0 - t) * (1.0 - t) * (1.0 - x.x2)
}

fn corner_rule(n: usize, w: &WeightU) -> Result<crate::quadrature::Rule1D> {
    let p = w.corner_params();
    gauss_jacobi_normalized((3 * n + 2) / 2 + 4, p.alpha, p.beta)
}

/// Partial-sum kernel `K_n(U_{a,b}; 1, x)` from the one-dimensional integral
/// of `P_n^{(a+b+1,b)}(z(x,t))` against the normalized weight `w_{a+b+1,b}`.
pub fn kernel_K_at_one(n: usize, w: &WeightU, x: &UPoint) -> Result<f64> {
    let p = w.corner_params();
    let rule = corner_rule(n, w)?;
    let scale = jacobi_at_one(n, p) / jacobi_norm(n, p);
    let terms: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &wt)| wt * jacobi_eval(n, p, z_map(x, t)))
        .collect();
    Ok(scale * pairwise_sum(&terms))
}

/// Cesàro kernel `K_n^δ(U_{a,b}; x, y)` by direct summation.
pub fn cesaro_kernel(spec: CesaroSpec, w: &WeightU, x: &UPoint, y: &UPoint) -> f64 {
    cesaro_from_kernels(spec, &kernels_direct(w, spec.n, x, y))
}

/// `K_n^δ(U_{a,b}; 1, x)` from the corner closed formula. The integrand is
/// `Σ_m binom(n-m+δ-1, n-m)/binom(n+δ, n) · P_m(1) P_m(z)/h_m`, which equals
/// `δ/(n+δ) k_n^{δ-1}(1, z)` when `δ > 0` and stays valid for `δ > -1`.
pub fn cesaro_kernel_at_one(spec: CesaroSpec, w: &WeightU, x: &UPoint) -> Result<f64> {
    let p = w.corner_params();
    let rule = corner_rule(spec.n, w)?;
    let weights = spec.partial_sum_weights();
    let coef: Vec<f64> = (0..=spec.n)
        .map(|m| weights[m] * jacobi_at_one(m, p) / jacobi_norm(m, p))
        .collect();
    let mut vals = Vec::with_capacity(spec.n + 1);
    let terms: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &wt)| {
            jacobi_all_into(spec.n, p, z_map(x, t), &mut vals);
            wt * coef.iter().zip(&vals).map(|(c, v)| c * v).sum::<f64>()
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Fourier coefficients on `U`, indexed by `(n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UExpansion {
    pub weight: WeightU,
    pub series: Expansion,
}

impl UExpansion {
    pub fn n_max(&self) -> usize {
        self.series.n_max
    }

    pub fn coeff(&self, k: usize, n: usize) -> f64 {
        self.series.coeff[flat_index(k, n)]
    }
}

/// Coefficients `⟨f, P_{k,n}⟩ / h_{k,n}` for `n ≤ n_max` by the given rule.
pub fn expand(f: impl Fn(&UPoint) -> f64 + Sync, n_max: usize, w: &WeightU, rule: &ProductRule<UPoint>) -> UExpansion {
    UExpansion {
        weight: *w,
        series: Expansion::new(w, n_max, rule, f),
    }
}

/// `S_n^δ(U_{a,b}; f, x)` from the coefficients.
pub fn cesaro_mean(exp: &UExpansion, spec: CesaroSpec, x: &UPoint) -> Result<f64> {
    ensure_index(spec.n <= exp.n_max(), || {
        format!("order {} exceeds expansion degree {}", spec.n, exp.n_max())
    })?;
    Ok(exp.series.cesaro_mean(&exp.weight, spec, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{gram_deviation, gram_matrix};
    use crate::quadrature::{rule_u, rule_u_split};
    use crate::rng::SplitMix64;
    use crate::specfun::binom_shifted;
    use approx::assert_relative_eq;

    fn random_point(g: &mut SplitMix64) -> UPoint {
        let x2 = g.uniform();
        UPoint::from_parts(x2.sqrt() * g.range(-1.0, 1.0), x2)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn point_validation() {
        assert!(UPoint::new(0.5, 0.25).is_ok());
        assert!(UPoint::new(0.6, 0.25).is_err());
        assert!(UPoint::new(0.0, 1.1).is_err());
        assert!(UPoint::ONE.on_parabola());
        assert!(!UPoint::new(0.0, 0.5).unwrap().on_parabola());
        assert!(WeightU::new(-1.0, 0.0).is_err());
        assert!(WeightU::new(0.0, -0.5).is_err());
    }

    #[test]
    fn basis_examples() {
        let w = WeightU::new(0.5, 0.5).unwrap();
        assert_eq!(basis_eval(0, 0, &w, &UPoint::new(0.1, 0.3).unwrap()).unwrap(), 1.0);
        for k in 0..6 {
            let want = jacobi_at_one(k, w.angular());
            assert_relative_eq!(basis_eval(k, k, &w, &UPoint::ONE).unwrap(), want, max_relative = 1e-14);
        }
        // naive formula with the √x₂ division
        let x = UPoint::new(0.2, 0.5).unwrap();
        let naive = jacobi_eval(0, w.radial(1), 0.0) * x.x2.sqrt() * jacobi_eval(1, w.angular(), x.x1 / x.x2.sqrt());
        assert_relative_eq!(basis_eval(1, 1, &w, &x).unwrap(), naive, max_relative = 1e-14);
        assert!(basis_eval(3, 2, &w, &x).is_err());
    }

    #[test]
    fn norm_examples() {
        let w = WeightU::new(0.0, 0.5).unwrap();
        assert_eq!(basis_norm(0, 0, &w).unwrap(), 1.0);
        assert_relative_eq!(basis_norm(0, 1, &w).unwrap(), 3.0 / 7.0, max_relative = 1e-14);
    }

    #[test]
    fn weight_constant_normalizes() {
        let w = WeightU::new(0.7, 1.3).unwrap();
        // ∫_U U_{a,b} = ∫(1-u²)^{b-1/2} du · ∫ x₂^b (1-x₂)^a dx₂ after x₁ = u√x₂
        let mass_u = crate::quadrature::gauss_jacobi(3, w.b - 0.5, w.b - 0.5).unwrap().mass();
        let mass_x = crate::quadrature::gauss_jacobi(3, w.a, w.b).unwrap().mass() / 2f64.powf(w.a + w.b + 1.0);
        assert_relative_eq!(w.d_ab * mass_u * mass_x, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn gram_is_diagonal() {
        for &(a, b) in &[(0.0, 0.5), (1.0, 0.5), (2.0, 1.0), (0.5, 0.7), (-0.5, -0.3)] {
            let w = WeightU::new(a, b).unwrap();
            let rule = rule_u(a, b, 10).unwrap();
            let g = gram_matrix(&w, 8, &rule);
            let dev = gram_deviation(&g, &w.norms(8));
            assert!(dev <= 1e-10, "({a},{b}): {dev}");
        }
    }

    #[test]
    fn boundary_kernel_matches_direct_sum() {
        let mut g = SplitMix64::new(11);
        for &(a, b) in &[(0.5, 0.5), (1.5, -0.2), (0.0, 0.0)] {
            let w = WeightU::new(a, b).unwrap();
            for _ in 0..30 {
                let x2 = g.uniform();
                let y = random_point(&mut g);
                for n in 0..=8 {
                    let direct = kernel_P(n, &w, &UPoint::on_boundary(x2), &y);
                    let zonal = kernel_P_boundary(n, &w, x2, &y);
                    assert!(rel(direct, zonal) <= 1e-11, "n={n}: {direct} vs {zonal}");
                }
            }
        }
        let w = WeightU::new(1.0, 0.5).unwrap();
        assert_eq!(kernel_P_boundary(0, &w, 0.3, &UPoint::ONE), 1.0);
        // vertex y = 0 is regular
        let v = kernel_P_boundary(5, &w, 0.4, &UPoint::from_parts(0.0, 0.0));
        assert_relative_eq!(
            v,
            kernel_P(5, &w, &UPoint::on_boundary(0.4), &UPoint::from_parts(0.0, 0.0)),
            max_relative = 1e-12
        );
    }

    #[test]
    fn reproducing_property() {
        let w = WeightU::new(0.5, 1.0).unwrap();
        let rule = rule_u(0.5, 1.0, 8).unwrap();
        let x = UPoint::new(0.3, 0.6).unwrap();
        let n = 4;
        // arbitrary degree-n element: combination of basis polynomials of degree n
        let f = |y: &UPoint| {
            (0..=n)
                .map(|k| (k as f64 + 1.0) * basis_eval(k, n, &w, y).unwrap())
                .sum::<f64>()
        };
        let got = rule.integrate(|y| kernel_P(n, &w, &x, y) * f(y));
        assert!((got - f(&x)).abs() <= 1e-10);
        let lower = |y: &UPoint| basis_eval(1, 2, &w, y).unwrap();
        assert!(rule.integrate(|y| kernel_P(n, &w, &x, y) * lower(y)).abs() <= 1e-10);
    }

    #[test]
    fn z_map_examples() {
        let mut g = SplitMix64::new(3);
        for _ in 0..20 {
            let t = g.range(-1.0, 1.0);
            assert_eq!(z_map(&UPoint::ONE, t), 1.0);
            let x = random_point(&mut g);
            assert_eq!(z_map(&x, 1.0), 1.0);
            let z = z_map(&x, t);
            assert!((-1.0 - 1e-14..=1.0 + 1e-14).contains(&z));
        }
        assert_eq!(z_map(&UPoint::from_parts(0.0, 0.0), 0.0), -0.5);
    }

    #[test]
    fn closed_formula_matches_direct_sum() {
        let mut g = SplitMix64::new(5);
        for &(a, b) in &[(1.0, 0.5), (0.0, 0.0), (-0.4, 1.2), (2.5, -0.3)] {
            let w = WeightU::new(a, b).unwrap();
            for _ in 0..10 {
                let x = random_point(&mut g);
                let mut partial = 0.0;
                for n in 0..=20 {
                    partial += kernel_P_boundary(n, &w, 1.0, &x);
                    let closed = kernel_K_at_one(n, &w, &x).unwrap();
                    assert!(rel(closed, partial) <= 1e-9, "({a},{b}) n={n}: {closed} vs {partial}");
                }
            }
        }
    }

    #[test]
    fn cesaro_closed_form_matches_direct() {
        let mut g = SplitMix64::new(9);
        let w = WeightU::new(0.5, 0.5).unwrap();
        for _ in 0..10 {
            let x = random_point(&mut g);
            for n in 0..=10 {
                for delta in [0.0, 1.0, 2.5] {
                    let spec = CesaroSpec::new(n, delta).unwrap();
                    let direct = cesaro_kernel(spec, &w, &UPoint::ONE, &x);
                    let closed = cesaro_kernel_at_one(spec, &w, &x).unwrap();
                    assert!(rel(direct, closed) <= 1e-9, "n={n} δ={delta}: {direct} {closed}");
                }
            }
        }
    }

    #[test]
    fn cesaro_closed_form_through_jacobi_kernel() {
        // δ/(n+δ) ∫ k_n^{δ-1}(1, z(x,t)) dt, with k the Fourier–Jacobi Cesàro kernel.
        let w = WeightU::new(1.0, 0.5).unwrap();
        let p = w.corner_params();
        let x = UPoint::new(-0.3, 0.5).unwrap();
        let (n, delta) = (7, 2.0);
        let rule = gauss_jacobi_normalized(20, p.alpha, p.beta).unwrap();
        let inner = CesaroSpec::new(n, delta - 1.0).unwrap();
        let via_k = delta / (n as f64 + delta)
            * rule.integrate(|t| crate::specfun::jacobi_cesaro_kernel_at_one(inner, p, z_map(&x, t)));
        let got = cesaro_kernel_at_one(CesaroSpec::new(n, delta).unwrap(), &w, &x).unwrap();
        assert_relative_eq!(got, via_k, max_relative = 1e-12);
        assert_relative_eq!(binom_shifted(delta, 0), 1.0);
    }

    #[test]
    fn expansion_examples() {
        let w = WeightU::new(0.5, 0.7).unwrap();
        let rule = rule_u(0.5, 0.7, 8).unwrap();
        let e = expand(|x| basis_eval(2, 3, &w, x).unwrap(), 6, &w, &rule);
        assert_relative_eq!(e.coeff(2, 3), 1.0, epsilon = 1e-11);
        assert!(e.series.max_abs_except(flat_index(2, 3)) <= 1e-11);
        let e = expand(|_| 1.0, 4, &w, &rule);
        assert_relative_eq!(e.coeff(0, 0), 1.0, epsilon = 1e-13);
        let x = UPoint::new(0.1, 0.4).unwrap();
        for n in 0..=4 {
            assert_relative_eq!(
                cesaro_mean(&e, CesaroSpec::new(n, 1.3).unwrap(), &x).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        let quad = |x: &UPoint| 1.0 + x.x1 - 2.0 * x.x2 * x.x1 + 0.5 * x.x1 * x.x1;
        let e = expand(quad, 4, &w, &rule);
        let s = cesaro_mean(&e, CesaroSpec::new(3, 0.0).unwrap(), &x).unwrap();
        assert!((s - quad(&x)).abs() <= 1e-11);
        assert!(cesaro_mean(&e, CesaroSpec::new(5, 0.0).unwrap(), &x).is_err());
    }

    #[test]
    fn split_rule_expansion_of_kink() {
        let w = WeightU::new(0.0, 0.5).unwrap();
        let plain = expand(|x| x.x1.abs(), 4, &w, &rule_u(0.0, 0.5, 40).unwrap());
        let split = expand(|x| x.x1.abs(), 4, &w, &rule_u_split(0.0, 0.5, 40).unwrap());
        // the split rule resolves the kink; the plain rule is only close
        assert!((plain.coeff(0, 0) - split.coeff(0, 0)).abs() < 1e-3);
    }
}
