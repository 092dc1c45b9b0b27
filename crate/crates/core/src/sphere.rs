//! Spherical harmonics: dimensions, explicit real orthonormal bases for
//! `d ∈ {2,3}`, zonal kernels for every `d`, and the integral transform that
//! raises the Gegenbauer index of a zonal kernel.
//!
//! Orthonormality is with respect to the normalized measure `σ/ω_d`.
//! For `d = 3` the basis is built from fully normalized associated Legendre
//! functions with polar axis `x₃`; evaluation is homogeneous, so the same
//! routine returns solid harmonics `‖x‖^m Y(x/‖x‖)` off the sphere.

use std::f64::consts::SQRT_2;

use crate::error::{check_gt, Error, Result};
use crate::quadrature::gauss_jacobi_normalized;
use crate::specfun::{gegenbauer_z, zonal_homog};

/// Tolerance on `‖ξ‖ - 1` accepted by [`sph_eval`].
pub const UNIT_TOL: f64 = 1e-12;

/// `dim H_n^d = binom(n+d-1, n) - binom(n+d-3, n-2)`.
pub fn dim_harmonics(d: usize, n: usize) -> usize {
    let first = binom(n + d - 1, n);
    let second = if n >= 2 { binom(n + d - 3, n - 2) } else { 0 };
    first - second
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Label `Y_ℓ^m` of an element of the explicit basis of `H_m^d`.
///
/// For `d = 3`, `ℓ = 1` is the zonal element, `ℓ = 2j` carries `cos jφ` and
/// `ℓ = 2j+1` carries `sin jφ`. For `d = 2`, `ℓ = 1, 2` are `√2 cos mθ` and
/// `√2 sin mθ` (only `ℓ = 1` at `m = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    pub d: usize,
    pub m: usize,
    pub ell: usize,
}

impl HarmonicIndex {
    pub fn new(d: usize, m: usize, ell: usize) -> Result<Self> {
        check_explicit_dim(d)?;
        let dim = dim_harmonics(d, m);
        if ell == 0 || ell > dim {
            return Err(Error::IndexOutOfRange(format!(
                "harmonic label {ell} outside 1..={dim} for degree {m}, d = {d}"
            )));
        }
        Ok(Self { d, m, ell })
    }

    /// Position of this element in the flat ordering used by [`harmonics_upto`].
    pub fn flat(&self) -> usize {
        degree_offset(self.d, self.m) + self.ell - 1
    }
}

pub(crate) fn check_explicit_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Number of harmonics of degree `< m` in the flat ordering.
pub fn degree_offset(d: usize, m: usize) -> usize {
    match d {
        2 => {
            if m == 0 {
                0
            } else {
                2 * m - 1
            }
        }
        _ => m * m,
    }
}

/// Values of all basis harmonics of degree `≤ max_degree`, evaluated
/// homogeneously at `x` (so `‖x‖^m Y_ℓ^m(x/‖x‖)`), in flat order.
pub fn harmonics_upto(d: usize, max_degree: usize, x: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.resize(degree_offset(d, max_degree + 1), 0.0);
    if d == 2 {
        out[0] = 1.0;
        let (mut c, mut s) = (1.0, 0.0);
        for m in 1..=max_degree {
            let nc = c * x[0] - s * x[1];
            s = c * x[1] + s * x[0];
            c = nc;
            let off = degree_offset(2, m);
            out[off] = SQRT_2 * c;
            out[off + 1] = SQRT_2 * s;
        }
        return;
    }
    let (x1, x2, z) = (x[0], x[1], x[2]);
    let r2 = x1 * x1 + x2 * x2 + z * z;
    let (mut c, mut s) = (1.0, 0.0);
    let mut cmm = 1.0;
    for j in 0..=max_degree {
        if j > 0 {
            let nc = c * x1 - s * x2;
            s = c * x2 + s * x1;
            c = nc;
            let jf = j as f64;
            cmm *= if j == 1 {
                3f64.sqrt()
            } else {
                ((2.0 * jf + 1.0) / (2.0 * jf)).sqrt()
            };
        }
        let jf = j as f64;
        let mut prev2 = 0.0;
        let mut prev = cmm;
        for l in j..=max_degree {
            let val = if l == j {
                cmm
            } else if l == j + 1 {
                (2.0 * jf + 3.0).sqrt() * z * cmm
            } else {
                let lf = l as f64;
                let a = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - jf) * (lf + jf))).sqrt();
                let b = ((2.0 * lf + 1.0) * (lf + jf - 1.0) * (lf - jf - 1.0)
                    / ((lf - jf) * (lf + jf) * (2.0 * lf - 3.0)))
                    .sqrt();
                a * z * prev - b * r2 * prev2
            };
            if l > j {
                prev2 = prev;
                prev = val;
            }
            let off = l * l;
            if j == 0 {
                out[off] = val;
            } else {
                out[off + 2 * j - 1] = val * c;
                out[off + 2 * j] = val * s;
            }
        }
    }
}

/// Evaluates `Y_ℓ^m(ξ)` for a unit vector `ξ`.
pub fn sph_eval(idx: HarmonicIndex, xi: &[f64]) -> Result<f64> {
    check_explicit_dim(idx.d)?;
    if xi.len() != idx.d {
        return Err(Error::PointOutsideDomain {
            domain: "sphere",
            detail: format!("expected {} coordinates, got {}", idx.d, xi.len()),
        });
    }
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::PointOutsideDomain {
            domain: "sphere",
            detail: format!("|xi| = {norm}"),
        });
    }
    let mut buf = Vec::new();
    harmonics_upto(idx.d, idx.m, xi, &mut buf);
    Ok(buf[idx.flat()])
}

/// Rescales a nonzero vector to unit length.
pub fn normalize(xi: &[f64]) -> Vec<f64> {
    let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    xi.iter().map(|v| v / norm).collect()
}

/// Reproducing kernel of `H_m^d`: `Z_m^{(d-2)/2}(c)`, `c = ⟨ξ,η⟩`.
pub fn zonal_kernel(d: usize, m: usize, c: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    gegenbauer_z(m, (d as f64 - 2.0) / 2.0, c)
}

/// Recovers `Z_m^λ(t)` from `Z_m^{λ+σ}` by the two-dimensional integral
/// against `(1-z₁)^λ (1+z₁)^{σ-1} (1-z₂²)^{σ-1/2}` (normalized), evaluated by
/// a Gauss–Jacobi product rule.
pub fn raise_index_z(lambda: f64, sigma: f64, m: usize, t: f64) -> Result<f64> {
    crate::error::check_ge("lambda", lambda, 0.0, "index must be nonnegative")?;
    check_gt("sigma", sigma, 0.0, "index increment must be positive")?;
    let n = m / 2 + 5;
    let r1 = gauss_jacobi_normalized(n, lambda, sigma - 1.0)?;
    let r2 = gauss_jacobi_normalized(n, sigma - 0.5, sigma - 0.5)?;
    let top = lambda + sigma;
    let mut terms = Vec::with_capacity(n * n);
    for (&z1, &w1) in r1.nodes.iter().zip(&r1.weights) {
        for (&z2, &w2) in r2.nodes.iter().zip(&r2.weights) {
            let arg = 0.5 * (1.0 - z1) * t + 0.5 * (1.0 + z1) * z2;
            terms.push(w1 * w2 * zonal_homog(m, top, arg, 1.0));
        }
    }
    Ok(crate::quadrature::pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{rule_sphere, rule_sphere_split};
    use crate::specfun::{c_lambda, gegenbauer_c};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn dimension_examples() {
        assert_eq!(dim_harmonics(3, 0), 1);
        assert_eq!(dim_harmonics(3, 2), 5);
        assert_eq!(dim_harmonics(2, 4), 2);
        assert_eq!(dim_harmonics(2, 0), 1);
        for n in 0..10 {
            assert_eq!(dim_harmonics(3, n), 2 * n + 1);
            assert_eq!(degree_offset(3, n + 1) - degree_offset(3, n), dim_harmonics(3, n));
            assert_eq!(degree_offset(2, n + 1) - degree_offset(2, n), dim_harmonics(2, n));
        }
        assert_eq!(dim_harmonics(5, 3), 30);
    }

    #[test]
    fn evaluation_examples() {
        let one = sph_eval(HarmonicIndex::new(2, 0, 1).unwrap(), &[0.6, 0.8]).unwrap();
        assert_eq!(one, 1.0);
        let v = sph_eval(HarmonicIndex::new(2, 1, 1).unwrap(), &[1.0, 0.0]).unwrap();
        assert_relative_eq!(v, SQRT_2, epsilon = 1e-15);
        assert!(HarmonicIndex::new(3, 2, 6).is_err());
        assert!(matches!(
            HarmonicIndex::new(4, 1, 1),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(sph_eval(HarmonicIndex::new(3, 1, 1).unwrap(), &[1.0, 0.1, 0.0]).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for d in [2, 3] {
            let rule = rule_sphere(d, 12).unwrap();
            let count = degree_offset(d, 7);
            let mut gram = vec![0.0; count * count];
            let mut buf = Vec::new();
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                harmonics_upto(d, 6, p, &mut buf);
                for i in 0..count {
                    for j in 0..count {
                        gram[i * count + j] += w * buf[i] * buf[j];
                    }
                }
            }
            for i in 0..count {
                for j in 0..count {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((gram[i * count + j] - want).abs() <= 1e-12, "d={d} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn zonal_examples() {
        assert_eq!(zonal_kernel(3, 0, 0.3).unwrap(), 1.0);
        assert_relative_eq!(zonal_kernel(3, 2, 1.0).unwrap(), 5.0, epsilon = 1e-14);
        let g: f64 = 0.7;
        assert_relative_eq!(
            zonal_kernel(2, 3, g.cos()).unwrap(),
            2.0 * (3.0 * g).cos(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sphere_integral_reduces_to_interval() {
        // (1/ω_d)∫ f(⟨ξ,η⟩)dσ(ξ) = c_{(d-2)/2} ∫ f(u)(1-u²)^{(d-3)/2} du, f(u) = u⁴ and friends
        let eta3 = normalize(&[0.3, -0.5, 0.8]);
        let eta2 = normalize(&[0.3, -0.5]);
        for (d, eta) in [(2usize, eta2), (3, eta3)] {
            let rule = rule_sphere(d, 10).unwrap();
            let lam = (d as f64 - 2.0) / 2.0;
            let line = crate::quadrature::gauss_jacobi_normalized(8, lam - 0.5, lam - 0.5).unwrap();
            for f in [
                |u: f64| u.powi(4),
                |u: f64| 1.0 + u - 3.0 * u.powi(6),
                |u: f64| u.powi(3) * (1.0 - u),
            ] {
                let lhs = rule.integrate(|x| f(x.iter().zip(&eta).map(|(a, b)| a * b).sum()));
                let rhs = line.integrate(f);
                assert!((lhs - rhs).abs() <= 1e-13, "d={d}: {lhs} vs {rhs}");
            }
        }
        assert_relative_eq!(c_lambda(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn split_sphere_rules_are_accurate() {
        for d in [2, 3] {
            let rule = rule_sphere_split(d, 20).unwrap();
            let count = degree_offset(d, 5);
            let mut buf = Vec::new();
            let mut gram = vec![0.0; count * count];
            for (p, &w) in rule.points.iter().zip(&rule.weights) {
                harmonics_upto(d, 4, p, &mut buf);
                for i in 0..count {
                    for j in 0..count {
                        gram[i * count + j] += w * buf[i] * buf[j];
                    }
                }
            }
            for i in 0..count {
                assert!(
                    (gram[i * count + i] - 1.0).abs() < 1e-12,
                    "d={d} i={i}: {}",
                    gram[i * count + i]
                );
            }
            // ∫|x₁| over the sphere: 2/π for d = 2, 1/2 for d = 3
            let want = if d == 2 { 2.0 / PI } else { 0.5 };
            assert_relative_eq!(rule.integrate(|x| x[0].abs()), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn laplace_beltrami_eigenvalues_d3() {
        // Δ₀ in spherical coordinates with polar angle θ and azimuth φ, by central differences.
        let h = 1e-4;
        let y = |m: usize, ell: usize, th: f64, ph: f64| {
            let xi = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            sph_eval(HarmonicIndex::new(3, m, ell).unwrap(), &normalize(&xi)).unwrap()
        };
        for m in 0..=5 {
            for ell in 1..=2 * m + 1 {
                let mut worst: f64 = 0.0;
                for &(th, ph) in &[(0.7, 0.4), (1.3, 2.2), (2.1, -1.0), (1.0, 3.0)] {
                    let f0 = y(m, ell, th, ph);
                    if f0.abs() < 0.1 {
                        continue;
                    }
                    let ft = (y(m, ell, th + h, ph) - y(m, ell, th - h, ph)) / (2.0 * h);
                    let ftt = (y(m, ell, th + h, ph) - 2.0 * f0 + y(m, ell, th - h, ph)) / (h * h);
                    let fpp = (y(m, ell, th, ph + h) - 2.0 * f0 + y(m, ell, th, ph - h)) / (h * h);
                    let lap = ftt + th.cos() / th.sin() * ft + fpp / th.sin().powi(2);
                    let want = -((m * (m + 1)) as f64) * f0;
                    worst = worst.max((lap - want).abs() / f0.abs().max(1.0));
                }
                assert!(worst <= 1e-4, "m={m} ell={ell}: {worst}");
            }
        }
    }

    #[test]
    fn raise_index_examples() {
        assert_relative_eq!(raise_index_z(0.5, 1.0, 0, 0.4).unwrap(), 1.0, epsilon = 1e-14);
        let t: f64 = 0.3;
        let p2 = 0.5 * (3.0 * t * t - 1.0);
        assert_relative_eq!(raise_index_z(0.5, 1.0, 2, t).unwrap(), 5.0 * p2, epsilon = 1e-13);
        let want = 5.0 * gegenbauer_c(4, 1.0, -0.6);
        assert_relative_eq!(raise_index_z(1.0, 0.5, 4, -0.6).unwrap(), want, max_relative = 1e-12);
        assert!(raise_index_z(0.5, 0.0, 2, 0.1).is_err());
    }

    #[test]
    fn raise_index_grid() {
        for &lam in &[0.0, 0.5, 1.0, 2.5] {
            for &sigma in &[0.25, 0.5, 1.0, 3.0] {
                for m in 0..=10 {
                    for &t in &[-1.0, -0.4, 0.1, 0.8, 1.0] {
                        let want = gegenbauer_z(m, lam, t).unwrap();
                        let got = raise_index_z(lam, sigma, m, t).unwrap();
                        assert!(
                            (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                            "{lam} {sigma} {m} {t}"
                        );
                    }
                }
            }
        }
    }
}
