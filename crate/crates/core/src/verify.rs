//! Experiment suites: Gamma and kernel identities, one-sided derivative
//! convergence of `(-Δ)^s` at s = 0, and kernel-space versus multiplier-space
//! agreement. Every suite is deterministic given its [`VerifyConfig`].

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, LatticePoint};
use crate::heat::{conservation_defect, heat_semigroup_apply};
use crate::kernel1d::{
    identity_weight_1d, kernel_1d, normalization_c, riesz_zero_kernel, tail_sum_closed_form,
    Kernel1DParams,
};
use crate::kernelnd::{
    build_kernel_table, corrector_rho, corrector_rho_lattice_sum, kernel_nd, zero_order_kernel,
    KernelOrder, KernelTable,
};
use crate::operators::{
    difference_quotient_with, discrete_laplacian, fractional_laplacian, log_laplacian,
    KernelSource, Window,
};
use crate::quadrature::QuadratureConfig;
use crate::special::{digamma, euler_gamma, gamma_ratio, hurwitz_zeta};
use crate::spectral::{multiplier_apply, SymbolKind, SymbolSpec};

/// Final-error threshold of the derivative checks at |s| = 1e-3.
pub const DERIVATIVE_THRESHOLD: f64 = 1e-2;
/// Accepted window for the fitted convergence rate.
pub const RATE_WINDOW: (f64, f64) = (0.7, 1.3);
/// Orders used by the derivative suites, by magnitude.
pub const DERIVATIVE_ORDERS: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Regression values of the corrector for N = 2 and N = 3.
pub const PINNED_RHO: [(usize, f64); 2] =
    [(2, 1.166_243_616_123_275_1), (3, 1.673_389_302_970_196_7)];
/// Brute-force tail sums are truncated at this lag.
pub const TAIL_SUM_CUTOFF: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    DerivativePlus,
    DerivativeMinus,
    Spectral,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::DerivativePlus => "derivative-plus",
            Suite::DerivativeMinus => "derivative-minus",
            Suite::Spectral => "spectral",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "derivative-plus" => Suite::DerivativePlus,
            "derivative-minus" => Suite::DerivativeMinus,
            "spectral" => Suite::Spectral,
            "all" => Suite::All,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown suite '{other}'; expected identities, derivative-plus, derivative-minus, spectral or all"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub quad: QuadratureConfig,
    /// Seed of the random test functions.
    pub seed: u64,
    /// Run independent experiments on separate threads.
    pub parallel: bool,
    /// Zero all runtimes so reports are byte-stable.
    pub deterministic: bool,
    /// Output window radius of the derivative checks, N = 1 and N >= 2.
    pub window_radius: [u64; 2],
    /// Midpoint nodes per axis for the singular spectral symbols.
    pub spectral_grid: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            quad: QuadratureConfig::default(),
            seed: 2024,
            parallel: false,
            deterministic: false,
            window_radius: [16, 6],
            spectral_grid: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub s: f64,
    pub sup_error: f64,
    /// Informational only.
    pub l2_error: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub id: String,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln sup_error` against `ln |s|`; absent when every error is 0.
    pub fitted_rate: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub id: String,
    pub worst_error: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub id: String,
    pub discrepancy: f64,
    pub error_estimate: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Entry {
    Identity(IdentityCheck),
    Convergence(ConvergenceReport),
    Spectral(SpectralReport),
    /// An experiment that could not be run.
    Failure {
        id: String,
        error: String,
    },
}

impl Entry {
    pub fn id(&self) -> &str {
        match self {
            Entry::Identity(e) => &e.id,
            Entry::Convergence(e) => &e.id,
            Entry::Spectral(e) => &e.id,
            Entry::Failure { id, .. } => id,
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            Entry::Identity(e) => e.passed,
            Entry::Convergence(e) => e.passed,
            Entry::Spectral(e) => e.passed,
            Entry::Failure { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub timestamp: String,
    pub config: VerifyConfig,
    pub entries: Vec<Entry>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// Aligned-column summary, one line per entry plus convergence rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {} at {}", self.suite.name(), self.timestamp);
        let width = self.entries.iter().map(|e| e.id().len()).max().unwrap_or(0);
        for entry in &self.entries {
            let status = if entry.passed() { "pass" } else { "FAIL" };
            let detail = match entry {
                Entry::Identity(e) => {
                    format!("error {:.3e}  tol {:.1e}", e.worst_error, e.tolerance)
                }
                Entry::Spectral(e) => format!(
                    "gap {:.3e}  est {:.3e}  tol {:.1e}",
                    e.discrepancy, e.error_estimate, e.tolerance
                ),
                Entry::Convergence(e) => match e.fitted_rate {
                    Some(r) => format!("rate {r:.3}  threshold {:.1e}", e.threshold),
                    None => format!("rate -  threshold {:.1e}", e.threshold),
                },
                Entry::Failure { error, .. } => error.clone(),
            };
            let _ = writeln!(out, "  {status}  {:<width$}  {detail}", entry.id());
            if let Entry::Convergence(e) = entry {
                for row in &e.rows {
                    let _ = writeln!(
                        out,
                        "        {:<width$}  s {:>+9.1e}  sup {:.3e}  l2 {:.3e}  {:.1} ms",
                        "", row.s, row.sup_error, row.l2_error, row.runtime_ms
                    );
                }
            }
        }
        let _ = writeln!(out, "{}", if self.passed { "PASSED" } else { "FAILED" });
        out
    }
}

/// UTC timestamp in RFC 3339 form, taken from `SOURCE_DATE_EPOCH` when set.
pub fn report_timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(|secs| UNIX_EPOCH + std::time::Duration::from_secs(secs))
        .unwrap_or_else(SystemTime::now);
    humantime::format_rfc3339_seconds(now).to_string()
}

struct Clock {
    start: Instant,
    zero: bool,
}

impl Clock {
    fn start(cfg: &VerifyConfig) -> Self {
        Clock {
            start: Instant::now(),
            zero: cfg.deterministic,
        }
    }

    fn ms(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.start.elapsed().as_secs_f64() * 1e3
        }
    }
}

/// Five distinct points of `[-2, 2]^N` with values in `[-1, 1]`.
pub fn random_five_point(dimension: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<(LatticePoint, f64)> = Vec::with_capacity(5);
    while entries.len() < 5 {
        let p = LatticePoint::new((0..dimension).map(|_| rng.gen_range(-2..=2)).collect());
        let v: f64 = rng.gen_range(-1.0..=1.0);
        if v != 0.0 && entries.iter().all(|(q, _)| *q != p) {
            entries.push((p, v));
        }
    }
    GridFunction::from_entries(dimension, 1.0, entries).expect("distinct finite entries")
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn fitted_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn kernel_tables(
    dimension: usize,
    order: KernelOrder,
    radius: u64,
    quad: &QuadratureConfig,
) -> Result<Option<KernelTable>> {
    if dimension == 1 {
        Ok(None)
    } else {
        build_kernel_table(dimension, order, radius, quad).map(Some)
    }
}

fn source(table: &Option<KernelTable>) -> KernelSource<'_> {
    match table {
        Some(t) => KernelSource::Table(t),
        None => KernelSource::ClosedForm,
    }
}

/// Sup-norm distance between `[(-Δ)^s f - f]/s` and `log(-Δ) f` on a common
/// window, for each order `side * |s|`. Closed-form kernels are used in 1D and
/// quadrature tables otherwise.
pub fn run_derivative_check(
    id: &str,
    f: &GridFunction,
    side: Side,
    s_values: &[f64],
    cfg: &VerifyConfig,
) -> Result<ConvergenceReport> {
    if s_values.windows(2).any(|w| !(w[1].abs() < w[0].abs())) {
        return Err(Error::Invalid(
            "orders must decrease strictly in magnitude".into(),
        ));
    }
    let dimension = f.dimension();
    let radius = cfg.window_radius[usize::from(dimension > 1)];
    let window = Window::radius(radius);
    let table_radius = radius + f.support_diameter();
    let ctx = |e: Error| e.with_context(id);

    let log_table =
        kernel_tables(dimension, KernelOrder::Zero, table_radius, &cfg.quad).map_err(ctx)?;
    let log = log_laplacian(f, &source(&log_table), &window)
        .map_err(ctx)?
        .function;

    let mut rows = Vec::with_capacity(s_values.len());
    for &magnitude in s_values {
        let clock = Clock::start(cfg);
        let s = side.sign() * magnitude.abs();
        let table = kernel_tables(
            dimension,
            KernelOrder::Fractional(s),
            table_radius,
            &cfg.quad,
        )
        .map_err(ctx)?;
        let q = difference_quotient_with(f, s, &source(&table), &window)
            .map_err(ctx)?
            .function;
        let diff = q.subtract(&log)?;
        rows.push(ConvergenceRow {
            s,
            sup_error: diff.linf_norm(),
            l2_error: diff.l2_norm(),
            runtime_ms: clock.ms(),
        });
    }
    let all_zero = rows.iter().all(|r| r.sup_error == 0.0);
    let fitted_rate = fitted_log_slope(
        &rows
            .iter()
            .map(|r| (r.s.abs(), r.sup_error))
            .collect::<Vec<_>>(),
    );
    let decreasing = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    let final_ok = rows
        .last()
        .is_some_and(|r| r.sup_error <= DERIVATIVE_THRESHOLD);
    let rate_ok = fitted_rate.is_some_and(|r| r >= RATE_WINDOW.0 && r <= RATE_WINDOW.1);
    Ok(ConvergenceReport {
        id: id.to_string(),
        rows,
        fitted_rate,
        threshold: DERIVATIVE_THRESHOLD,
        passed: all_zero || (decreasing && final_ok && rate_ok),
    })
}

fn identity(id: &str, clock: &Clock, worst_error: f64, tolerance: f64) -> Entry {
    Entry::Identity(IdentityCheck {
        id: id.to_string(),
        worst_error,
        tolerance,
        runtime_ms: clock.ms(),
        passed: worst_error <= tolerance,
    })
}

fn failure(id: &str, e: Error) -> Entry {
    Entry::Failure {
        id: id.to_string(),
        error: e.to_string(),
    }
}

/// `Σ_{|m| >= k} Γ(|m|-s)/Γ(|m|+1+s)`: the terms up to the cutoff summed from
/// the smallest upward by the ratio recurrence, plus the asymptotic remainder
/// `2[ζ(1+2s, M+1) + s(1+s)(1+2s)/6 · ζ(3+2s, M+1)]`.
pub fn tail_sum_brute_force(k: u64, s: f64, cutoff: u64) -> Result<f64> {
    let mut term = gamma_ratio(k as f64 - s, k as f64 + 1.0 + s)?;
    let mut terms = Vec::with_capacity((cutoff - k + 1) as usize);
    for m in k..=cutoff {
        terms.push(term);
        let m = m as f64;
        term *= (m - s) / (m + 1.0 + s);
    }
    let head: f64 = terms.iter().rev().sum();
    let a = cutoff as f64 + 1.0;
    let remainder = hurwitz_zeta(1.0 + 2.0 * s, a)?
        + s * (1.0 + s) * (1.0 + 2.0 * s) / 6.0 * hurwitz_zeta(3.0 + 2.0 * s, a)?;
    Ok(2.0 * (head + remainder))
}

fn check<F: FnOnce() -> Result<f64>>(id: &str, cfg: &VerifyConfig, tolerance: f64, f: F) -> Entry {
    let clock = Clock::start(cfg);
    match f() {
        Ok(err) => identity(id, &clock, err, tolerance),
        Err(e) => failure(id, e),
    }
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, e| Ok(acc.max(e?)))
}

/// Every Gamma, kernel, corrector and conservation identity with its tolerance.
pub fn run_identity_suite(cfg: &VerifyConfig) -> Vec<Entry> {
    let quad = cfg.quad;
    let mut checks: Vec<Box<dyn FnOnce() -> Entry + Send>> = Vec::new();
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("tail-sum-closed-form", &c, 1e-6, || {
            worst([1u64, 2, 4, 8].iter().flat_map(|&k| {
                [0.1, 0.25, 0.4].map(move |s| -> Result<f64> {
                    let closed = tail_sum_closed_form(k, s)?;
                    Ok((closed - tail_sum_brute_force(k, s, TAIL_SUM_CUTOFF)?).abs() / closed)
                })
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("gamma-ratio-bound", &c, 0.0, || {
            worst((1..=200u32).flat_map(|k| {
                [0.05, 0.1, 0.25, 0.4, 0.49].map(move |s| -> Result<f64> {
                    let k = f64::from(k);
                    let excess = gamma_ratio(k - s, k + 1.0 + s)? - (k - s).powf(-(1.0 + 2.0 * s));
                    Ok(excess.max(0.0))
                })
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("gamma-ratio-slope", &c, 1e-6, || {
            worst(
                [1.0, 2.0, 3.0, 5.0, 10.0, 50.0].map(|k: f64| -> Result<f64> {
                    let d = 1e-5;
                    let slope =
                        (gamma_ratio(k - d, k + d)? - gamma_ratio(k + d, k - d)?) / (2.0 * d);
                    Ok((slope + 2.0 * digamma(k)?).abs())
                }),
            )
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("normalization-derivative", &c, 1e-6, || {
            worst([0.5, 1.0, 2.0].map(|h: f64| -> Result<f64> {
                let d = 1e-5;
                let slope = (normalization_c(d, h)? - normalization_c(-d, h)?) / (2.0 * d);
                Ok((slope + 2.0 * euler_gamma() + (h * h).ln()).abs())
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("identity-weight-derivative", &c, 1e-6, || {
            worst([0.5, 1.0, 2.0].map(|h: f64| -> Result<f64> {
                let d = 1e-5;
                let slope = (identity_weight_1d(d, h)? - identity_weight_1d(-d, h)?) / (2.0 * d);
                Ok((slope + (h * h).ln()).abs())
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("kernel-1d-quadrature", &c, 1e-8, || {
            worst([-0.25, 0.1, 0.5, 0.9].iter().flat_map(|&s| {
                (1..=20i64).map(move |m| -> Result<f64> {
                    let closed = kernel_1d(Kernel1DParams::new(s, 1.0)?, m)?;
                    let quadrature = kernel_nd(s, &LatticePoint::new(vec![m]), &quad)?;
                    Ok((closed - quadrature).abs())
                })
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("zero-order-1d-quadrature", &c, 1e-8, || {
            worst((1..=20i64).map(|m| -> Result<f64> {
                Ok(
                    (zero_order_kernel(&LatticePoint::new(vec![m]), &quad)? - riesz_zero_kernel(m))
                        .abs(),
                )
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("small-order-kernel", &c, 1e-4, || {
            let s = 1e-4;
            worst([2usize, 3].iter().flat_map(|&n| {
                [
                    vec![1i64, 0, 0],
                    vec![1, 1, 0],
                    vec![2, 1, 1],
                    vec![3, 0, 2],
                ]
                .map(move |m| -> Result<f64> {
                    let m = LatticePoint::new(m[..n].to_vec());
                    Ok((kernel_nd(s, &m, &quad)? / s - zero_order_kernel(&m, &quad)?).abs())
                })
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("rho-1-vanishes", &c, 1e-8, || {
            Ok(corrector_rho(1, &quad)?.abs())
        })
    }));
    for (n, pinned) in PINNED_RHO {
        let c = cfg.clone();
        checks.push(Box::new(move || {
            check(&format!("rho-{n}-two-paths"), &c, 1e-7, || {
                Ok((corrector_rho(n, &quad)? - corrector_rho_lattice_sum(n, &quad)?).abs())
            })
        }));
        let c = cfg.clone();
        checks.push(Box::new(move || {
            check(&format!("rho-{n}-pinned"), &c, 1e-9, || {
                Ok((corrector_rho(n, &quad)? - pinned).abs())
            })
        }));
    }
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("heat-conservation", &c, 1e-10, || {
            worst([0.1, 1.0, 10.0].iter().flat_map(|&t| {
                (1..=3usize).map(move |n| {
                    conservation_defect(t, n, crate::special::bessel_tail_order(t)).map(f64::abs)
                })
            }))
        })
    }));
    let c = cfg.clone();
    checks.push(Box::new(move || {
        check("log-laplacian-bound", &c, 0.0, || {
            log_bound_excess(c.seed, 200)
        })
    }));
    run_all(checks, cfg.parallel)
}

/// Largest excess of `linf(log(-Δ_h) f)` over `l1(f) + |ln h²| linf(f)` across
/// `count` random functions on `hZ`.
pub fn log_bound_excess(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut excess = 0.0f64;
    for _ in 0..count {
        let len = rng.gen_range(1..=12usize);
        let mut coords: Vec<i64> = (0..len).map(|_| rng.gen_range(-30..=30)).collect();
        coords.sort_unstable();
        coords.dedup();
        let h = 10f64.powf(rng.gen_range(-1.0..=1.0));
        let f = GridFunction::from_entries(
            1,
            h,
            coords
                .into_iter()
                .map(|c| (LatticePoint::new(vec![c]), rng.gen_range(-5.0..=5.0))),
        )?;
        if f.is_zero() {
            continue;
        }
        let out = log_laplacian(&f, &KernelSource::ClosedForm, &Window::radius(40))?;
        let bound = f.l1_norm() + (h * h).ln().abs() * f.linf_norm();
        excess = excess.max(out.function.linf_norm() - bound * (1.0 + 4.0 * f64::EPSILON));
    }
    Ok(excess.max(0.0))
}

fn run_all(checks: Vec<Box<dyn FnOnce() -> Entry + Send>>, parallel: bool) -> Vec<Entry> {
    if !parallel {
        return checks.into_iter().map(|c| c()).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = checks.into_iter().map(|c| scope.spawn(c)).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect()
    })
}

/// Derivative checks on δ_0 and a random 5-point function in N = 1 and N = 2.
pub fn run_derivative_suite(side: Side, cfg: &VerifyConfig) -> Vec<Entry> {
    let side_name = match side {
        Side::Plus => "plus",
        Side::Minus => "minus",
    };
    let mut checks: Vec<Box<dyn FnOnce() -> Entry + Send>> = Vec::new();
    for n in [1usize, 2] {
        let cases = [
            ("delta", GridFunction::delta(n, LatticePoint::origin(n))),
            (
                "random",
                random_five_point(n, cfg.seed.wrapping_add(n as u64)),
            ),
        ];
        for (name, f) in cases {
            let id = format!("derivative-{side_name}-{name}-{n}d");
            let c = cfg.clone();
            checks.push(Box::new(move || {
                match run_derivative_check(&id, &f, side, &DERIVATIVE_ORDERS, &c) {
                    Ok(r) => Entry::Convergence(r),
                    Err(e) => failure(&id, e),
                }
            }));
        }
    }
    run_all(checks, cfg.parallel)
}

/// Maximum gap between kernel-space and multiplier-space application of `spec`
/// to `f` on all points within `radius` of the support.
pub fn run_spectral_check(
    id: &str,
    f: &GridFunction,
    spec: &SymbolSpec,
    grid_points: usize,
    radius: u64,
    tolerance: f64,
    cfg: &VerifyConfig,
) -> Result<SpectralReport> {
    let clock = Clock::start(cfg);
    let window = Window::radius(radius);
    let table_radius = radius + f.support_diameter();
    let kernel = match spec.kind {
        SymbolKind::Laplacian => discrete_laplacian(f),
        SymbolKind::Fractional(s) if s > 0.0 && s < 1.0 => {
            let table = kernel_tables(
                f.dimension(),
                KernelOrder::Fractional(s),
                table_radius,
                &cfg.quad,
            )?;
            fractional_laplacian(f, s, &source(&table), &window)?.function
        }
        SymbolKind::Fractional(s) if s < 0.0 => {
            let table = kernel_tables(
                f.dimension(),
                KernelOrder::Fractional(s),
                table_radius,
                &cfg.quad,
            )?;
            crate::operators::riesz_potential(f, s, &source(&table), &window)?.function
        }
        SymbolKind::Fractional(_) => discrete_laplacian(f),
        SymbolKind::Log => {
            let table = kernel_tables(f.dimension(), KernelOrder::Zero, table_radius, &cfg.quad)?;
            log_laplacian(f, &source(&table), &window)?.function
        }
        SymbolKind::Heat(t) => heat_semigroup_apply(f, t)?.function,
    };
    let spectral = multiplier_apply(f, spec, grid_points, radius, tolerance)?;
    let mut discrepancy = 0.0f64;
    for (p, v) in spectral.function.iter() {
        discrepancy = discrepancy.max((v - kernel.get(p)).abs());
    }
    for (p, v) in kernel.iter() {
        if spectral_window_contains(f, p, radius) {
            discrepancy = discrepancy.max((v - spectral.function.get(p)).abs());
        }
    }
    Ok(SpectralReport {
        id: id.to_string(),
        discrepancy,
        error_estimate: spectral.error_estimate,
        tolerance,
        runtime_ms: clock.ms(),
        passed: discrepancy <= tolerance,
    })
}

fn spectral_window_contains(f: &GridFunction, p: &LatticePoint, radius: u64) -> bool {
    f.support().any(|q| p.sub(q).norm_inf() <= radius)
}

/// Dual-path checks in 1D on |n| <= 20: Laplacian, s = 1/2, log and heat symbols.
pub fn run_spectral_suite(cfg: &VerifyConfig) -> Vec<Entry> {
    let delta = GridFunction::delta(1, LatticePoint::origin(1));
    let random = random_five_point(1, cfg.seed);
    let spec = |kind| SymbolSpec::new(kind, 1, 1.0).expect("valid symbol");
    let grid = cfg.spectral_grid;
    let cases: Vec<(&str, GridFunction, SymbolSpec, usize, u64, f64)> = vec![
        (
            "spectral-laplacian-random",
            random,
            spec(SymbolKind::Laplacian),
            64,
            20,
            1e-12,
        ),
        (
            "spectral-fractional-half-delta",
            delta.clone(),
            spec(SymbolKind::Fractional(0.5)),
            grid,
            20,
            1e-8,
        ),
        (
            "spectral-log-delta",
            delta.clone(),
            spec(SymbolKind::Log),
            grid,
            20,
            1e-6,
        ),
        (
            "spectral-heat-t1-delta",
            delta.clone(),
            spec(SymbolKind::Heat(1.0)),
            256,
            20,
            1e-9,
        ),
        (
            "spectral-heat-t10-delta",
            delta,
            spec(SymbolKind::Heat(10.0)),
            256,
            40,
            1e-9,
        ),
    ];
    let mut checks: Vec<Box<dyn FnOnce() -> Entry + Send>> = Vec::new();
    for (id, f, s, g, r, tol) in cases {
        let c = cfg.clone();
        checks.push(Box::new(move || {
            match run_spectral_check(id, &f, &s, g, r, tol, &c) {
                Ok(rep) => Entry::Spectral(rep),
                Err(e) => failure(id, e),
            }
        }));
    }
    run_all(checks, cfg.parallel)
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    let entries = match suite {
        Suite::Identities => run_identity_suite(cfg),
        Suite::DerivativePlus => run_derivative_suite(Side::Plus, cfg),
        Suite::DerivativeMinus => run_derivative_suite(Side::Minus, cfg),
        Suite::Spectral => run_spectral_suite(cfg),
        Suite::All => {
            let mut all = run_identity_suite(cfg);
            all.extend(run_derivative_suite(Side::Plus, cfg));
            all.extend(run_derivative_suite(Side::Minus, cfg));
            all.extend(run_spectral_suite(cfg));
            all
        }
    };
    let passed = entries.iter().all(Entry::passed);
    SuiteReport {
        suite,
        timestamp: report_timestamp(),
        config: cfg.clone(),
        entries,
        passed,
    }
}
