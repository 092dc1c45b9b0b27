//! Built-in test functions addressed by stable string ids.

use std::fmt;
use std::str::FromStr;

use crate::domain_u::{basis_eval, UPoint, WeightU};
use crate::error::{Error, Result};
use crate::solid_v::{basis_bQ_eval, BallIndex, SolidPoint, WeightV};
use crate::surface_v0::{basis_Q_eval, SurfacePoint, WeightV0};

/// The three domains of the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    U,
    V0,
    V,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::U => "U",
            Domain::V0 => "V0",
            Domain::V => "V",
        })
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" | "u" => Ok(Domain::U),
            "V0" | "v0" => Ok(Domain::V0),
            "V" | "v" => Ok(Domain::V),
            _ => Err(Error::InvalidConfig(format!(
                "unknown domain `{s}` (expected U, V0 or V)"
            ))),
        }
    }
}

/// A test function. Coordinates are `(x₁, x₂)` on `U` and `(x, t)` on the
/// paraboloids, with `x = √t ξ` on the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Const,
    X1,
    /// `x₂` on `U`, `t` on the paraboloids.
    Height,
    AbsX1,
    /// Distance-like gap to the boundary: `min(x₂-x₁², 1-x₂)` on `U`,
    /// `1-t` on `V0`, `min(t-‖x‖², 1-t)` on `V`.
    DistBoundary,
    /// Smooth bump supported in the ball of radius 1/2 around `(0, 1/2)`.
    Bump,
    BasisU {
        n: usize,
        k: usize,
    },
    BasisV0 {
        n: usize,
        m: usize,
        ell: usize,
    },
    BasisV {
        n: usize,
        m: usize,
        kappa: BallIndex,
    },
}

/// `(id, domains, description)` for every catalog entry.
pub fn catalog() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("const", "U,V0,V", "f = 1"),
        ("x1", "U,V0,V", "first coordinate x1"),
        ("x2", "U,V0,V", "x2 on U, t on V0 and V"),
        ("abs-x1", "U,V0,V", "|x1|, continuous with a kink at x1 = 0"),
        (
            "dist-boundary",
            "U,V0,V",
            "min(x2-x1^2, 1-x2) on U, 1-t on V0, min(t-|x|^2, 1-t) on V",
        ),
        (
            "bump",
            "U,V0,V",
            "exp(1 - 1/(1-s)) with s = 4|(x, t) - (0, 1/2)|^2, zero for s >= 1",
        ),
        ("basis:U:n:k", "U", "basis polynomial P_{k,n}"),
        ("basis:V0:n:m:l", "V0", "basis polynomial Q_{m,l}^n"),
        (
            "basis:V:n:m:j:l",
            "V",
            "basis polynomial Q_{m,(j,l)}^n with ball label (j, l)",
        ),
    ]
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown test function `{s}`"));
        let num = |p: &str| p.parse::<usize>().map_err(|_| bad());
        Ok(match s {
            "const" => TestFunction::Const,
            "x1" => TestFunction::X1,
            "x2" | "t" => TestFunction::Height,
            "abs-x1" => TestFunction::AbsX1,
            "dist-boundary" => TestFunction::DistBoundary,
            "bump" => TestFunction::Bump,
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                match parts.as_slice() {
                    ["basis", "U", n, k] => TestFunction::BasisU { n: num(n)?, k: num(k)? },
                    ["basis", "V0", n, m, l] => TestFunction::BasisV0 {
                        n: num(n)?,
                        m: num(m)?,
                        ell: num(l)?,
                    },
                    ["basis", "V", n, m, j, l] => TestFunction::BasisV {
                        n: num(n)?,
                        m: num(m)?,
                        kappa: BallIndex {
                            j: num(j)?,
                            ell: num(l)?,
                        },
                    },
                    _ => return Err(bad()),
                }
            }
        })
    }
}

fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s)).exp()
    }
}

fn wrong_domain(f: &TestFunction, domain: Domain) -> Error {
    Error::InvalidConfig(format!("{f:?} is not defined on {domain}"))
}

impl TestFunction {
    /// Checks that the function can be evaluated on `domain`.
    pub fn supports(&self, domain: Domain) -> bool {
        !matches!(
            (self, domain),
            (TestFunction::BasisU { .. }, Domain::V0 | Domain::V)
                | (TestFunction::BasisV0 { .. }, Domain::U | Domain::V)
                | (TestFunction::BasisV { .. }, Domain::U | Domain::V0)
        )
    }

    pub fn eval_u(&self, w: &WeightU, p: &UPoint) -> Result<f64> {
        Ok(match *self {
            TestFunction::Const => 1.0,
            TestFunction::X1 => p.x1,
            TestFunction::Height => p.x2,
            TestFunction::AbsX1 => p.x1.abs(),
            TestFunction::DistBoundary => (p.x2 - p.x1 * p.x1).min(1.0 - p.x2),
            TestFunction::Bump => bump(4.0 * (p.x1 * p.x1 + (p.x2 - 0.5).powi(2))),
            TestFunction::BasisU { n, k } => basis_eval(k, n, w, p)?,
            _ => return Err(wrong_domain(self, Domain::U)),
        })
    }

    pub fn eval_v0(&self, w: &WeightV0, p: &SurfacePoint) -> Result<f64> {
        let r = p.t.max(0.0).sqrt();
        Ok(match *self {
            TestFunction::Const => 1.0,
            TestFunction::X1 => r * p.xi[0],
            TestFunction::Height => p.t,
            TestFunction::AbsX1 => (r * p.xi[0]).abs(),
            TestFunction::DistBoundary => 1.0 - p.t,
            TestFunction::Bump => bump(4.0 * (p.t + (p.t - 0.5).powi(2))),
            TestFunction::BasisV0 { n, m, ell } => basis_Q_eval(n, m, ell, w, p)?,
            _ => return Err(wrong_domain(self, Domain::V0)),
        })
    }

    pub fn eval_v(&self, w: &WeightV, p: &SolidPoint) -> Result<f64> {
        let r2: f64 = p.x.iter().map(|v| v * v).sum();
        Ok(match *self {
            TestFunction::Const => 1.0,
            TestFunction::X1 => p.x[0],
            TestFunction::Height => p.t,
            TestFunction::AbsX1 => p.x[0].abs(),
            TestFunction::DistBoundary => (p.t - r2).min(1.0 - p.t),
            TestFunction::Bump => bump(4.0 * (r2 + (p.t - 0.5).powi(2))),
            TestFunction::BasisV { n, m, kappa } => basis_bQ_eval(n, m, kappa, w, p)?,
            _ => return Err(wrong_domain(self, Domain::V)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_catalog_ids() {
        assert_eq!("abs-x1".parse::<TestFunction>().unwrap(), TestFunction::AbsX1);
        assert_eq!(
            "basis:U:3:2".parse::<TestFunction>().unwrap(),
            TestFunction::BasisU { n: 3, k: 2 }
        );
        assert!("basis:U:3".parse::<TestFunction>().is_err());
        assert!("sin".parse::<TestFunction>().is_err());
        assert!(!TestFunction::BasisU { n: 1, k: 0 }.supports(Domain::V));
        assert_eq!("v0".parse::<Domain>().unwrap(), Domain::V0);
    }

    #[test]
    fn catalog_examples() {
        let w = WeightU::new(0.5, 0.5).unwrap();
        let p = UPoint::new(-0.3, 0.4).unwrap();
        assert_eq!(TestFunction::Const.eval_u(&w, &p).unwrap(), 1.0);
        assert_eq!(TestFunction::AbsX1.eval_u(&w, &p).unwrap(), 0.3);
        let f: TestFunction = "basis:U:3:2".parse().unwrap();
        assert_eq!(f.eval_u(&w, &p).unwrap(), basis_eval(2, 3, &w, &p).unwrap());
        assert_eq!(
            TestFunction::Bump.eval_u(&w, &UPoint::new(0.0, 0.5).unwrap()).unwrap(),
            1.0
        );
        assert_eq!(
            TestFunction::Bump.eval_u(&w, &UPoint::new(0.0, 1.0).unwrap()).unwrap(),
            0.0
        );
        for id in catalog().iter().map(|c| c.0).filter(|id| !id.starts_with("basis")) {
            assert!(id.parse::<TestFunction>().is_ok());
        }
    }
}
