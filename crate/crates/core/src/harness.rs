//! Verification suites and Cesàro experiments behind the `parab` CLI.
//!
//! Every suite returns a [`Report`] of [`CheckRow`]s; a row passes when
//! `measured ≤ tolerance`. Rows are sorted by id before they are written,
//! and all reductions are order-independent, so a fixed configuration
//! produces byte-identical CSV regardless of the thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::basis::{gram_matrix, kernels_direct, OrthogonalBasis};
use crate::domain_u::{self, UPoint, WeightU};
use crate::error::{Error, Result};
use crate::functions::{Domain, TestFunction};
use crate::quadrature::{rule_u, rule_u_split, rule_v, rule_v0, SolidTensorRule, SurfaceTensorRule};
use crate::rng::SplitMix64;
use crate::solid_v::{self, ball_labels, SolidPoint, WeightV};
use crate::specfun::CesaroSpec;
use crate::surface_v0::{self, SurfacePoint, WeightV0};

/// Tolerances of the built-in suites.
pub mod tol {
    pub const GRAM: f64 = 1e-10;
    pub const NORM: f64 = 1e-10;
    pub const KERNEL_U: f64 = 1e-10;
    pub const KERNEL_V0: f64 = 1e-8;
    pub const KERNEL_V: f64 = 1e-7;
    pub const CLOSED_U: f64 = 1e-9;
    pub const CLOSED_V0: f64 = 1e-8;
    pub const CLOSED_V: f64 = 1e-7;
    pub const ODE_V0: f64 = 1e-9;
    pub const ODE_V: f64 = 1e-5;
    pub const EIGEN_V: f64 = 1e-4;
    pub const POSITIVITY: f64 = 1e-9;
    /// Rounding allowance when comparing consecutive errors of a Cesàro table.
    pub const TREND_FLOOR: f64 = 1e-12;
    /// Finite-difference step of the solid differential equation.
    pub const FD_STEP: f64 = 1e-4;
}

/// The suites the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    OrthoCheck,
    NormCheck,
    KernelCheck,
    ClosedformCheck,
    OdeCheck,
    CesaroTable,
    PositivityScan,
    Expand,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::OrthoCheck,
        Command::NormCheck,
        Command::KernelCheck,
        Command::ClosedformCheck,
        Command::OdeCheck,
        Command::CesaroTable,
        Command::PositivityScan,
        Command::Expand,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::OrthoCheck => "ortho-check",
            Command::NormCheck => "norm-check",
            Command::KernelCheck => "kernel-check",
            Command::ClosedformCheck => "closedform-check",
            Command::OdeCheck => "ode-check",
            Command::CesaroTable => "cesaro-table",
            Command::PositivityScan => "positivity-scan",
            Command::Expand => "expand",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown command `{s}`")))
    }
}

/// One experiment: a command, a domain with its weight parameters, degree
/// ranges, Cesàro orders, a test function, rule level and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub domain: Domain,
    pub a: f64,
    pub b: f64,
    pub d: usize,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    /// Largest degree; falls back to the largest of `n_list`, then to a per-suite default.
    pub n_max: Option<usize>,
    pub n_list: Vec<usize>,
    pub deltas: Vec<f64>,
    pub function: String,
    /// Polynomial exactness of the quadrature rules.
    pub level: Option<usize>,
    pub pairs: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(command: Command, domain: Domain) -> Self {
        Self {
            command,
            domain,
            a: 0.5,
            b: 0.5,
            d: 2,
            beta: 0.0,
            gamma: 1.0,
            mu: 0.5,
            n_max: None,
            n_list: Vec::new(),
            deltas: Vec::new(),
            function: "abs-x1".into(),
            level: None,
            pairs: 50,
            seed: 7,
        }
    }

    /// Sets one field from its flag name, as used in `key=value` config files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::InvalidConfig(format!("`{key}`: cannot parse `{value}` as {what}"));
        let float = || value.parse::<f64>().map_err(|_| bad("a number"));
        let int = || value.parse::<usize>().map_err(|_| bad("a non-negative integer"));
        match key.trim() {
            "command" => self.command = value.parse()?,
            "domain" => self.domain = value.parse()?,
            "a" => self.a = float()?,
            "b" => self.b = float()?,
            "d" => self.d = int()?,
            "beta" => self.beta = float()?,
            "gamma" => self.gamma = float()?,
            "mu" => self.mu = float()?,
            "N" => self.n_max = Some(int()?),
            "n" => self.n_list = parse_list(value).map_err(|_| bad("a list of integers"))?,
            "delta" => self.deltas = parse_list(value).map_err(|_| bad("a list of numbers"))?,
            "f" => self.function = value.to_string(),
            "level" => self.level = Some(int()?),
            "pairs" => self.pairs = int()?,
            "seed" => self.seed = value.parse().map_err(|_| bad("a 64-bit seed"))?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key=value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    fn n_or(&self, default: usize) -> usize {
        self.n_max
            .or_else(|| self.n_list.iter().copied().max())
            .unwrap_or(default)
    }

    pub fn params_string(&self) -> String {
        match self.domain {
            Domain::U => format!("a={};b={}", self.a, self.b),
            Domain::V0 => format!("d={};beta={};gamma={}", self.d, self.beta, self.gamma),
            Domain::V => format!("d={};beta={};gamma={};mu={}", self.d, self.beta, self.gamma, self.mu),
        }
    }

    fn weight(&self) -> Result<Weight> {
        Ok(match self.domain {
            Domain::U => Weight::U(WeightU::new(self.a, self.b)?),
            Domain::V0 => Weight::V0(WeightV0::new(self.d, self.beta, self.gamma)?),
            Domain::V => Weight::V(WeightV::new(self.d, self.beta, self.gamma, self.mu)?),
        })
    }

    fn test_function(&self) -> Result<TestFunction> {
        let f: TestFunction = self.function.parse()?;
        if !f.supports(self.domain) {
            return Err(Error::InvalidConfig(format!(
                "`{}` is not defined on {}",
                self.function, self.domain
            )));
        }
        Ok(f)
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse())
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Weight {
    U(WeightU),
    V0(WeightV0),
    V(WeightV),
}

// Parses the test function and evaluates it once, so that bad basis labels
// are reported instead of turning into NaN coefficients.
fn checked_function(cfg: &ExperimentConfig, weight: Weight) -> Result<TestFunction> {
    let f = cfg.test_function()?;
    match weight {
        Weight::U(w) => f.eval_u(&w, &UPoint::ONE)?,
        Weight::V0(w) => {
            let mut xi = vec![0.0; w.d];
            xi[0] = 1.0;
            f.eval_v0(&w, &SurfacePoint::from_parts(xi, 1.0))?
        }
        Weight::V(w) => f.eval_v(&w, &SolidPoint::from_parts(vec![0.0; w.d], 1.0))?,
    };
    Ok(f)
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check_id: String,
    pub domain: Domain,
    pub params: String,
    pub n: usize,
    pub delta: Option<f64>,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Rows of one harness run, sorted by check id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<CheckRow>,
}

pub const CSV_HEADER: [&str; 8] = [
    "check_id",
    "domain",
    "params",
    "n",
    "delta",
    "measured",
    "tolerance",
    "pass",
];

impl Report {
    fn from_rows(mut rows: Vec<CheckRow>) -> Self {
        rows.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        Self { rows }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Largest measured value, the usual summary of a suite.
    pub fn max_measured(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.measured))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.check_id.clone(),
                r.domain.to_string(),
                r.params.clone(),
                r.n.to_string(),
                r.delta.map(|d| format!("{d:e}")).unwrap_or_default(),
                format!("{:e}", r.measured),
                format!("{:e}", r.tolerance),
                r.pass.to_string(),
            ])?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

struct RowBuilder<'a> {
    cfg: &'a ExperimentConfig,
    params: String,
    rows: Vec<CheckRow>,
}

impl<'a> RowBuilder<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self {
            cfg,
            params: cfg.params_string(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, id: String, n: usize, delta: Option<f64>, measured: f64, tolerance: f64) {
        self.rows.push(CheckRow {
            check_id: id,
            domain: self.cfg.domain,
            params: self.params.clone(),
            n,
            delta,
            measured,
            tolerance,
            pass: measured <= tolerance,
        });
    }

    fn finish(self) -> Report {
        Report::from_rows(self.rows)
    }
}

/// Runs the configured suite.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let weight = cfg.weight()?;
    match cfg.command {
        Command::OrthoCheck => ortho(cfg, weight, false),
        Command::NormCheck => ortho(cfg, weight, true),
        Command::KernelCheck => kernel_check(cfg, weight),
        Command::ClosedformCheck => closedform_check(cfg, weight),
        Command::OdeCheck => ode_check(cfg, weight),
        Command::CesaroTable => cesaro_table(cfg, weight),
        Command::PositivityScan => positivity_scan(cfg, weight),
        Command::Expand => expand(cfg, weight),
    }
}

fn default_n(cfg: &ExperimentConfig) -> usize {
    match (cfg.command, cfg.domain) {
        (Command::OrthoCheck | Command::NormCheck, Domain::U) => 8,
        (Command::OrthoCheck | Command::NormCheck, Domain::V0) => 5,
        (Command::OrthoCheck | Command::NormCheck, Domain::V) => 4,
        (Command::KernelCheck, Domain::U) => 8,
        (Command::KernelCheck, Domain::V0) => 6,
        (Command::KernelCheck, Domain::V) => 5,
        (Command::ClosedformCheck, Domain::U) => 20,
        (Command::ClosedformCheck, Domain::V0) => 15,
        (Command::ClosedformCheck, Domain::V) => 10,
        (Command::OdeCheck, Domain::V) => 4,
        (Command::OdeCheck, _) => 8,
        (Command::PositivityScan, _) => 12,
        _ => 8,
    }
}

// Gram matrix over a rule exact for degree 2N; with `per_degree` the rows
// compare each diagonal entry with its closed-form norm instead.
fn ortho(cfg: &ExperimentConfig, weight: Weight, per_degree: bool) -> Result<Report> {
    let n = cfg.n_or(default_n(cfg));
    let level = cfg.level.unwrap_or(2 * n + 2);
    let (gram, norms, ranges) = match weight {
        Weight::U(w) => (
            gram_matrix(&w, n, &rule_u(w.a, w.b, level)?),
            w.norms(n),
            w.degree_ranges(n),
        ),
        Weight::V0(w) => {
            let b = w.basis()?;
            (
                gram_matrix(&b, n, &rule_v0(w.d, w.beta, w.gamma, level)?),
                b.norms(n),
                b.degree_ranges(n),
            )
        }
        Weight::V(w) => {
            let b = w.basis()?;
            (
                gram_matrix(&b, n, &rule_v(w.d, w.beta, w.gamma, w.mu, level)?),
                b.norms(n),
                b.degree_ranges(n),
            )
        }
    };
    let mut rows = RowBuilder::new(cfg);
    let dom = cfg.domain;
    let count = norms.len();
    if per_degree {
        for (deg, r) in ranges.into_iter().enumerate() {
            let worst = r
                .map(|i| (gram[i * count + i] - norms[i]).abs() / norms[i])
                .fold(0.0, f64::max);
            rows.push(format!("norm:{dom}:n={deg:03}"), deg, None, worst, tol::NORM);
        }
    } else {
        rows.push(
            format!("ortho:{dom}:N={n:03}"),
            n,
            None,
            crate::basis::gram_deviation(&gram, &norms),
            tol::GRAM,
        );
    }
    Ok(rows.finish())
}

fn random_u(g: &mut SplitMix64) -> UPoint {
    let x2 = g.uniform();
    UPoint::from_parts(g.range(-1.0, 1.0) * x2.sqrt(), x2)
}

fn random_surface(g: &mut SplitMix64, d: usize) -> SurfacePoint {
    let xi = g.unit_vector(d);
    SurfacePoint::from_parts(xi, g.uniform())
}

fn random_solid(g: &mut SplitMix64, d: usize) -> SolidPoint {
    let t = g.uniform();
    let y = g.ball_point(d);
    SolidPoint::from_parts(y.iter().map(|v| t.sqrt() * v).collect(), t)
}

// Worst error per degree over a set of pairs, computed in parallel.
fn worst_per_degree<P: Sync>(pairs: &[P], n: usize, err: impl Fn(&P) -> Result<Vec<f64>> + Sync) -> Result<Vec<f64>> {
    let per_pair: Result<Vec<Vec<f64>>> = pairs.par_iter().map(&err).collect();
    let mut worst = vec![0.0f64; n + 1];
    for e in per_pair? {
        for (w, v) in worst.iter_mut().zip(e) {
            *w = w.max(v);
        }
    }
    Ok(worst)
}

fn kernel_check(cfg: &ExperimentConfig, weight: Weight) -> Result<Report> {
    let n = cfg.n_or(default_n(cfg));
    let mut g = SplitMix64::new(cfg.seed);
    let (worst, tolerance) = match weight {
        Weight::U(w) => {
            let pairs: Vec<(f64, UPoint)> = (0..cfg.pairs).map(|_| (g.uniform(), random_u(&mut g))).collect();
            let worst = worst_per_degree(&pairs, n, |(x2, y)| {
                let direct = kernels_direct(&w, n, &UPoint::on_boundary(*x2), y);
                Ok((0..=n)
                    .map(|k| (direct[k] - domain_u::kernel_P_boundary(k, &w, *x2, y)).abs())
                    .collect())
            })?;
            (worst, tol::KERNEL_U)
        }
        Weight::V0(w) => {
            let basis = w.basis()?;
            let pairs: Vec<_> = (0..cfg.pairs)
                .map(|_| (random_surface(&mut g, w.d), random_surface(&mut g, w.d)))
                .collect();
            let worst = worst_per_degree(&pairs, n, |(p, q)| {
                let direct = kernels_direct(&basis, n, p, q);
                (0..=n)
                    .map(|k| Ok((direct[k] - surface_v0::kernel_P_v0(k, &w, p, q)?).abs()))
                    .collect()
            })?;
            (worst, tol::KERNEL_V0)
        }
        Weight::V(w) => {
            let basis = w.basis()?;
            let pairs: Vec<_> = (0..cfg.pairs)
                .map(|_| (random_solid(&mut g, w.d), random_solid(&mut g, w.d)))
                .collect();
            let worst = worst_per_degree(&pairs, n, |(p, q)| {
                let direct = kernels_direct(&basis, n, p, q);
                (0..=n)
                    .map(|k| Ok((direct[k] - solid_v::kernel_P_v(k, &w, p, q)?).abs()))
                    .collect()
            })?;
            (worst, tol::KERNEL_V)
        }
    };
    let mut rows = RowBuilder::new(cfg);
    let dom = cfg.domain;
    for (k, e) in worst.into_iter().enumerate() {
        rows.push(format!("kernel:{dom}:n={k:03}"), k, None, e, tolerance);
    }
    Ok(rows.finish())
}

fn cumulative(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |s, x| {
            *s += x;
            Some(*s)
        })
        .collect()
}

fn closedform_check(cfg: &ExperimentConfig, weight: Weight) -> Result<Report> {
    let n = cfg.n_or(default_n(cfg));
    let mut g = SplitMix64::new(cfg.seed);
    let (worst, tolerance) = match weight {
        Weight::U(w) => {
            let pts: Vec<UPoint> = (0..cfg.pairs).map(|_| random_u(&mut g)).collect();
            let worst = worst_per_degree(&pts, n, |x| {
                let partial = cumulative(&kernels_direct(&w, n, &UPoint::ONE, x));
                (0..=n)
                    .map(|k| Ok(rel_err(partial[k], domain_u::kernel_K_at_one(k, &w, x)?)))
                    .collect()
            })?;
            (worst, tol::CLOSED_U)
        }
        Weight::V0(w) => {
            let basis = w.basis()?;
            let pairs: Vec<_> = (0..cfg.pairs)
                .map(|_| (g.unit_vector(w.d), random_surface(&mut g, w.d)))
                .collect();
            let worst = worst_per_degree(&pairs, n, |(xi, q)| {
                let p = SurfacePoint::from_parts(xi.clone(), 1.0);
                let partial = cumulative(&kernels_direct(&basis, n, &p, q));
                (0..=n)
                    .map(|k| Ok(rel_err(partial[k], surface_v0::kernel_K_boundary(k, &w, xi, q)?)))
                    .collect()
            })?;
            (worst, tol::CLOSED_V0)
        }
        Weight::V(w) => {
            let basis = w.basis()?;
            let pairs: Vec<_> = (0..cfg.pairs)
                .map(|_| (g.ball_point(w.d), random_solid(&mut g, w.d)))
                .collect();
            let worst = worst_per_degree(&pairs, n, |(x, q)| {
                let p = SolidPoint::from_parts(x.clone(), 1.0);
                let partial = cumulative(&kernels_direct(&basis, n, &p, q));
                (0..=n)
                    .map(|k| Ok(rel_err(partial[k], solid_v::kernel_K_top(k, &w, x, q)?)))
                    .collect()
            })?;
            (worst, tol::CLOSED_V)
        }
    };
    let mut rows = RowBuilder::new(cfg);
    let dom = cfg.domain;
    for (k, e) in worst.into_iter().enumerate() {
        rows.push(format!("closedform:{dom}:n={k:03}"), k, None, e, tolerance);
    }
    Ok(rows.finish())
}

/// Interior points of `V^{d+1}` used by the finite-difference check.
fn ode_points(d: usize) -> Vec<SolidPoint> {
    let mut out = Vec::new();
    for t in [0.3, 0.5, 0.7] {
        for r in [0.2, 0.5, 0.8] {
            for dir in directions(d, 5) {
                out.push(SolidPoint::from_parts(
                    dir.iter().map(|v| r * f64::sqrt(t) * v).collect(),
                    t,
                ));
            }
        }
    }
    out
}

fn ode_check(cfg: &ExperimentConfig, weight: Weight) -> Result<Report> {
    let n_max = cfg.n_or(default_n(cfg));
    let mut rows = RowBuilder::new(cfg);
    match weight {
        Weight::U(_) => {
            return Err(Error::InvalidConfig("ode-check is available on V0 and V".into()));
        }
        Weight::V0(w) => {
            let ts: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
            for n in 0..=n_max {
                let mut worst = 0.0f64;
                for m in 0..=n {
                    for &t in &ts {
                        worst = worst.max(surface_v0::ode_residual(n, m, &w, t)?.abs());
                    }
                }
                rows.push(format!("ode:V0:n={n:03}"), n, None, worst, tol::ODE_V0);
            }
        }
        Weight::V(w) => {
            w.basis()?;
            let pts = ode_points(w.d);
            for n in 0..=n_max {
                let (mut worst, mut worst_eig) = (0.0f64, 0.0f64);
                for m in 0..=n {
                    for kappa in ball_labels(w.d, m) {
                        let vals: Result<Vec<(f64, f64)>> = pts
                            .par_iter()
                            .map(|p| solid_v::ode_operator_solid(n, m, kappa, &w, p, tol::FD_STEP))
                            .collect();
                        let vals = vals?;
                        let lambda = solid_v::ode_eigenvalue_solid(n, m, &w);
                        for &(lhs, u) in &vals {
                            worst = worst.max((lhs - lambda * u).abs());
                        }
                        // least-squares eigenvalue estimate over the point set
                        let (num, den) = vals
                            .iter()
                            .fold((0.0, 0.0), |(a, b), &(lhs, u)| (a + lhs * u, b + u * u));
                        worst_eig = worst_eig.max((num / den - lambda).abs());
                    }
                }
                rows.push(format!("ode:V:n={n:03}"), n, None, worst, tol::ODE_V);
                rows.push(format!("eigen:V:n={n:03}"), n, None, worst_eig, tol::EIGEN_V);
            }
        }
    }
    Ok(rows.finish())
}

/// Fixed unit vectors: `k` per half-turn in the plane for `d = 2`, a
/// latitude-longitude net for `d = 3`.
pub fn directions(d: usize, k: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match d {
        2 => (0..2 * k)
            .map(|j| {
                let th = PI * (j as f64 + 0.25) / k as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut out = Vec::new();
            for i in 0..k {
                let z = -1.0 + (2.0 * i as f64 + 1.0) / k as f64;
                let r = (1.0 - z * z).sqrt();
                for j in 0..2 * k {
                    let ph = PI * (j as f64 + 0.25) / k as f64;
                    let mut v = vec![z, r * ph.cos(), r * ph.sin()];
                    v.resize(d, 0.0);
                    out.push(v);
                }
            }
            out
        }
    }
}

fn grid_u(k: usize) -> Vec<UPoint> {
    let mut out = Vec::new();
    for i in 0..k {
        let x2 = i as f64 / (k - 1) as f64;
        for j in 0..k {
            let s = -1.0 + 2.0 * j as f64 / (k - 1) as f64;
            out.push(UPoint::from_parts(s * x2.sqrt(), x2));
        }
    }
    out
}

fn grid_surface(d: usize, nt: usize, k: usize) -> Vec<SurfacePoint> {
    let dirs = directions(d, k);
    let mut out = Vec::new();
    for i in 0..nt {
        let t = i as f64 / (nt - 1) as f64;
        out.extend(dirs.iter().map(|xi| SurfacePoint::from_parts(xi.clone(), t)));
    }
    out
}

fn grid_solid(d: usize, nt: usize, k: usize) -> Vec<SolidPoint> {
    let dirs = directions(d, k);
    let mut out = vec![];
    for i in 0..nt {
        let t = i as f64 / (nt - 1) as f64;
        out.push(SolidPoint::from_parts(vec![0.0; d], t));
        for r in [0.5, 1.0] {
            let s = r * t.sqrt();
            out.extend(
                dirs.iter()
                    .map(|v| SolidPoint::from_parts(v.iter().map(|c| s * c).collect(), t)),
            );
        }
    }
    out
}

fn sorted_n_list(cfg: &ExperimentConfig) -> Vec<usize> {
    let mut ns = if cfg.n_list.is_empty() {
        vec![4, 8, 16, 32]
    } else {
        cfg.n_list.clone()
    };
    ns.sort_unstable();
    ns.dedup();
    ns
}

fn require_deltas(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.deltas.is_empty() {
        return Err(Error::InvalidConfig("`delta` must list at least one order".into()));
    }
    Ok(())
}

// Values of S_n^δ f - f on a fixed grid for every (δ, n).
fn cesaro_errors(cfg: &ExperimentConfig, weight: Weight, ns: &[usize]) -> Result<Vec<Vec<f64>>> {
    let f = checked_function(cfg, weight)?;
    let n_max = *ns.last().expect("non-empty degree list");
    let level = cfg.level.unwrap_or(2 * n_max + 12);
    let specs: Result<Vec<Vec<CesaroSpec>>> = cfg
        .deltas
        .iter()
        .map(|&delta| ns.iter().map(|&n| CesaroSpec::new(n, delta)).collect())
        .collect();
    let specs = specs?;
    // sup over the grid of |S_n^δ f - f|, one entry per (δ, n)
    fn sup<B: OrthogonalBasis>(
        basis: &B,
        series: &crate::basis::Expansion,
        grid: &[B::Point],
        f: impl Fn(&B::Point) -> Result<f64> + Sync,
        specs: &[Vec<CesaroSpec>],
        n_max: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let per_point: Result<Vec<Vec<f64>>> = grid
            .par_iter()
            .map(|p| {
                let mut vals = Vec::new();
                basis.eval_all(n_max, p, &mut vals);
                let fv = f(p)?;
                Ok(specs
                    .iter()
                    .flatten()
                    .map(|&s| (series.cesaro_from_values(s, &vals) - fv).abs())
                    .collect())
            })
            .collect();
        let per_point = per_point?;
        let width = specs.iter().map(Vec::len).sum();
        let mut flat = vec![0.0f64; width];
        for row in per_point {
            for (m, v) in flat.iter_mut().zip(row) {
                *m = m.max(v);
            }
        }
        let mut it = flat.into_iter();
        Ok(specs.iter().map(|s| it.by_ref().take(s.len()).collect()).collect())
    }
    match weight {
        Weight::U(w) => {
            let rule = rule_u_split(w.a, w.b, level)?;
            let exp = domain_u::expand(|p| f.eval_u(&w, p).unwrap_or(f64::NAN), n_max, &w, &rule);
            sup(&w, &exp.series, &grid_u(11), |p| f.eval_u(&w, p), &specs, n_max)
        }
        Weight::V0(w) => {
            let basis = w.basis()?;
            let rule = SurfaceTensorRule::new(w.d, w.beta, w.gamma, level, true)?;
            let exp = surface_v0::expand_v0(|p| f.eval_v0(&w, p).unwrap_or(f64::NAN), n_max, &w, &rule)?;
            sup(
                &basis,
                &exp.series,
                &grid_surface(w.d, 11, 4),
                |p| f.eval_v0(&w, p),
                &specs,
                n_max,
            )
        }
        Weight::V(w) => {
            let basis = w.basis()?;
            let rule = SolidTensorRule::new(w.d, w.beta, w.gamma, w.mu, level, true)?;
            let exp = solid_v::expand_v(|p| f.eval_v(&w, p).unwrap_or(f64::NAN), n_max, &w, &rule)?;
            sup(
                &basis,
                &exp.series,
                &grid_solid(w.d, 9, 3),
                |p| f.eval_v(&w, p),
                &specs,
                n_max,
            )
        }
    }
}

fn cesaro_table(cfg: &ExperimentConfig, weight: Weight) -> Result<Report> {
    require_deltas(cfg)?;
    let ns = sorted_n_list(cfg);
    let errors = cesaro_errors(cfg, weight, &ns)?;
    let mut rows = RowBuilder::new(cfg);
    let dom = cfg.domain;
    for (&delta, errs) in cfg.deltas.iter().zip(errors) {
        let mut prev = f64::INFINITY;
        for (&n, e) in ns.iter().zip(errs) {
            rows.push(
                format!("cesaro:{dom}:delta={delta}:n={n:03}"),
                n,
                Some(delta),
                e,
                prev + tol::TREND_FLOOR,
            );
            prev = e;
        }
    }
    Ok(rows.finish())
}

/// Cesàro order at which the scanned kernels are nonnegative.
pub fn positivity_threshold(cfg: &ExperimentConfig) -> f64 {
    let d = cfg.d as f64;
    match cfg.domain {
        Domain::U => cfg.a + 2.0 * cfg.b + 4.0,
        Domain::V0 => 2.0 * cfg.beta + cfg.gamma + d + 3.0,
        Domain::V => 2.0 * cfg.beta + 2.0 * cfg.mu + cfg.gamma + d + 3.0,
    }
}

fn positivity_scan(cfg: &ExperimentConfig, weight: Weight) -> Result<Report> {
    let n_max = cfg.n_or(default_n(cfg));
    let deltas = if cfg.deltas.is_empty() {
        vec![positivity_threshold(cfg)]
    } else {
        cfg.deltas.clone()
    };
    let mut rows = RowBuilder::new(cfg);
    let dom = cfg.domain;
    for &delta in &deltas {
        for n in 0..=n_max {
            let spec = CesaroSpec::new(n, delta)?;
            let values: Result<Vec<f64>> = match weight {
                Weight::U(w) => grid_u(40)
                    .par_iter()
                    .map(|x| domain_u::cesaro_kernel_at_one(spec, &w, x))
                    .collect(),
                Weight::V0(w) => {
                    let xi = directions(w.d, 1)[0].clone();
                    grid_surface(w.d, 20, 6)
                        .par_iter()
                        .map(|q| surface_v0::cesaro_kernel_boundary(spec, &w, &xi, q))
                        .collect()
                }
                Weight::V(w) => {
                    let tops: Vec<Vec<f64>> = [0.0, 0.5, 1.0]
                        .iter()
                        .map(|&r| directions(w.d, 1)[0].iter().map(|v| r * v).collect())
                        .collect();
                    let grid = grid_solid(w.d, 10, 4);
                    tops.iter()
                        .flat_map(|x| grid.iter().map(move |q| (x, q)))
                        .collect::<Vec<_>>()
                        .par_iter()
                        .map(|(x, q)| solid_v::cesaro_kernel_top(spec, &w, x, q))
                        .collect()
                }
            };
            let min = values?.into_iter().fold(f64::INFINITY, f64::min);
            rows.push(
                format!("positivity:{dom}:delta={delta}:n={n:03}"),
                n,
                Some(delta),
                (-min).max(0.0),
                tol::POSITIVITY,
            );
        }
    }
    Ok(rows.finish())
}

fn expand(cfg: &ExperimentConfig, weight: Weight) -> Result<Report> {
    let f = checked_function(cfg, weight)?;
    let n_max = cfg.n_or(default_n(cfg));
    let level = cfg.level.unwrap_or(2 * n_max + 12);
    let (coeff, ranges) = match weight {
        Weight::U(w) => {
            let rule = rule_u_split(w.a, w.b, level)?;
            let e = domain_u::expand(|p| f.eval_u(&w, p).unwrap_or(f64::NAN), n_max, &w, &rule);
            (e.series.coeff, e.series.ranges)
        }
        Weight::V0(w) => {
            let rule = SurfaceTensorRule::new(w.d, w.beta, w.gamma, level, true)?;
            let e = surface_v0::expand_v0(|p| f.eval_v0(&w, p).unwrap_or(f64::NAN), n_max, &w, &rule)?;
            (e.series.coeff, e.series.ranges)
        }
        Weight::V(w) => {
            let rule = SolidTensorRule::new(w.d, w.beta, w.gamma, w.mu, level, true)?;
            let e = solid_v::expand_v(|p| f.eval_v(&w, p).unwrap_or(f64::NAN), n_max, &w, &rule)?;
            (e.series.coeff, e.series.ranges)
        }
    };
    let mut rows = RowBuilder::new(cfg);
    let dom = cfg.domain;
    for (deg, r) in ranges.into_iter().enumerate() {
        for i in r {
            rows.push(format!("coeff:{dom}:{i:06}"), deg, None, coeff[i], f64::INFINITY);
        }
    }
    Ok(rows.finish())
}

/// Writes the nodes and weights of the domain's product rule as CSV
/// (`x1,x2,weight` on `U`; `x_1..x_d,t,weight` on the paraboloids).
pub fn dump_rule<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<()> {
    let level = cfg.level.unwrap_or(2 * cfg.n_or(4));
    let io = |e: std::io::Error| Error::InvalidConfig(format!("write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut record = |fields: Vec<String>| w.write_record(&fields).map_err(|e| io(e.into()));
    let coord_header = |d: usize| -> Vec<String> {
        let mut h: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        h.push("t".into());
        h.push("weight".into());
        h
    };
    match cfg.weight()? {
        Weight::U(wt) => {
            record(vec!["x1".into(), "x2".into(), "weight".into()])?;
            let rule = rule_u(wt.a, wt.b, level)?;
            for (p, &wgt) in rule.points.iter().zip(&rule.weights) {
                record(vec![format!("{:e}", p.x1), format!("{:e}", p.x2), format!("{wgt:e}")])?;
            }
        }
        Weight::V0(wt) => {
            record(coord_header(wt.d))?;
            let rule = rule_v0(wt.d, wt.beta, wt.gamma, level)?;
            for (p, &wgt) in rule.points.iter().zip(&rule.weights) {
                let mut f: Vec<String> = p.x().iter().map(|v| format!("{v:e}")).collect();
                f.push(format!("{:e}", p.t));
                f.push(format!("{wgt:e}"));
                record(f)?;
            }
        }
        Weight::V(wt) => {
            record(coord_header(wt.d))?;
            let rule = rule_v(wt.d, wt.beta, wt.gamma, wt.mu, level)?;
            for (p, &wgt) in rule.points.iter().zip(&rule.weights) {
                let mut f: Vec<String> = p.x.iter().map(|v| format!("{v:e}")).collect();
                f.push(format!("{:e}", p.t));
                f.push(format!("{wgt:e}"));
                record(f)?;
            }
        }
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_keys_and_files() {
        let mut c = ExperimentConfig::new(Command::OrthoCheck, Domain::U);
        c.apply_config_text("# comment\na = 1.5\nn = 4, 8\ndelta=2.5\ndomain=V0\n\n")
            .unwrap();
        assert_eq!((c.a, c.domain), (1.5, Domain::V0));
        assert_eq!(c.n_list, vec![4, 8]);
        assert_eq!(c.deltas, vec![2.5]);
        assert!(c.set("nope", "1").is_err());
        assert!(c.set("a", "x").is_err());
        assert!(c.apply_config_text("a").is_err());
        assert_eq!("cesaro-table".parse::<Command>().unwrap(), Command::CesaroTable);
    }

    #[test]
    fn invalid_parameters_are_rejected_before_work() {
        let mut c = ExperimentConfig::new(Command::OrthoCheck, Domain::U);
        c.b = -0.5;
        assert!(matches!(run(&c), Err(Error::InvalidParameter { .. })));
        let mut c = ExperimentConfig::new(Command::OdeCheck, Domain::U);
        c.n_max = Some(2);
        assert!(matches!(run(&c), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn ortho_check_on_u() {
        let mut c = ExperimentConfig::new(Command::OrthoCheck, Domain::U);
        c.n_max = Some(8);
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.all_pass(), "{:?}", r.rows);
    }

    #[test]
    fn csv_layout() {
        let mut c = ExperimentConfig::new(Command::NormCheck, Domain::U);
        c.n_max = Some(2);
        let s = run(&c).unwrap().to_csv_string();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert!(lines.next().unwrap().starts_with("norm:U:n=000,U,a=0.5;b=0.5,0,,"));
    }

    #[test]
    fn directions_are_unit() {
        for d in [2, 3] {
            for v in directions(d, 4) {
                assert!((v.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-14);
            }
        }
    }
}
