//! Fourier symbols on the torus `[-1/2, 1/2]^N` and operator application by
//! Fourier multipliers, an independent path to the kernel-space operators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{box_points, GridFunction, LatticePoint};
use crate::parallel::par_map;

/// Smallest admissible number of midpoint nodes per axis.
pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolKind {
    /// `σ(ξ) = Σ_k (2/h)² sin²(πξ_k)`.
    Laplacian,
    /// `σ(ξ)^s` for s in (0, 1] or (-N/2, 0).
    Fractional(f64),
    /// `ln σ(ξ)`, singular at the origin.
    Log,
    /// `e^{-t σ(ξ)}`, the heat semigroup at time t.
    Heat(f64),
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Laplacian => f.write_str("laplacian"),
            SymbolKind::Fractional(s) => write!(f, "fractional(s={s})"),
            SymbolKind::Log => f.write_str("log"),
            SymbolKind::Heat(t) => write!(f, "heat(t={t})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub dimension: usize,
    pub mesh: f64,
}

impl SymbolSpec {
    pub fn new(kind: SymbolKind, dimension: usize, mesh: f64) -> Result<Self> {
        let spec = SymbolSpec {
            kind,
            dimension,
            mesh,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if !(self.mesh > 0.0 && self.mesh.is_finite()) {
            return Err(Error::domain("mesh size must be positive", self.mesh));
        }
        if self.dimension > 1 && self.mesh != 1.0 {
            return Err(Error::domain(
                "mesh size is fixed to 1 when N >= 2",
                self.mesh,
            ));
        }
        match self.kind {
            SymbolKind::Fractional(s) => {
                let ok = (s > 0.0 && s <= 1.0) || (s < 0.0 && s > -(self.dimension as f64) / 2.0);
                if !ok {
                    return Err(Error::domain(
                        "symbol order must lie in (-N/2, 0) or (0, 1]",
                        s,
                    ));
                }
            }
            SymbolKind::Heat(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(Error::domain("heat time must be positive", t));
            }
            _ => {}
        }
        Ok(())
    }

    /// Exponent of the leading midpoint-rule error term, if the symbol is singular at 0.
    fn singular_order(&self) -> Option<f64> {
        let n = self.dimension as f64;
        match self.kind {
            SymbolKind::Fractional(s) if s != 1.0 => Some(n + 2.0 * s),
            SymbolKind::Log => Some(n),
            _ => None,
        }
    }
}

fn laplacian_symbol(mesh: f64, xi: &[f64]) -> f64 {
    let a = 2.0 / mesh;
    xi.iter().map(|x| (a * (PI * x).sin()).powi(2)).sum()
}

/// Evaluate the symbol at a point of `[-1/2, 1/2]^N`.
pub fn symbol_eval(spec: &SymbolSpec, xi: &[f64]) -> Result<f64> {
    spec.validate()?;
    if xi.len() != spec.dimension {
        return Err(Error::DimensionMismatch {
            left: spec.dimension,
            right: xi.len(),
        });
    }
    if let Some(x) = xi.iter().find(|x| !(x.abs() <= 0.5)) {
        return Err(Error::domain("frequency must lie in [-1/2, 1/2]", *x));
    }
    let lap = laplacian_symbol(spec.mesh, xi);
    match spec.kind {
        SymbolKind::Laplacian => Ok(lap),
        SymbolKind::Fractional(s) => {
            if s < 0.0 && lap == 0.0 {
                return Err(Error::domain(
                    "negative-order symbol is singular at frequency 0",
                    0.0,
                ));
            }
            Ok(lap.powf(s))
        }
        SymbolKind::Log => {
            if lap == 0.0 {
                return Err(Error::domain("log symbol is singular at frequency 0", 0.0));
            }
            Ok(lap.ln())
        }
        SymbolKind::Heat(t) => Ok((-t * lap).exp()),
    }
}

/// `f̂(ξ) = Σ_n f(n) e^{2πi n·ξ}` as `(re, im)`.
pub fn torus_transform(f: &GridFunction, xi: &[f64]) -> Result<(f64, f64)> {
    if xi.len() != f.dimension() {
        return Err(Error::DimensionMismatch {
            left: f.dimension(),
            right: xi.len(),
        });
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (n, v) in f.iter() {
        let phase: f64 = 2.0
            * PI
            * n.coords()
                .iter()
                .zip(xi)
                .map(|(&c, x)| c as f64 * x)
                .sum::<f64>();
        re += v * phase.cos();
        im += v * phase.sin();
    }
    Ok((re, im))
}

/// Multiplier output with an estimate of its quadrature error.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralApplied {
    pub function: GridFunction,
    /// Midpoint nodes per axis of the finest grid used.
    pub grid_points: usize,
    pub error_estimate: f64,
}

fn midpoint_nodes(g: usize) -> Vec<f64> {
    (0..g).map(|j| -0.5 + (j as f64 + 0.5) / g as f64).collect()
}

/// `∫ σ(ξ) Π_k cos(2π d_k ξ_k) dξ` for every lag `d` by the midpoint rule with
/// `g` nodes per axis. Odd parts cancel exactly on the symmetric node set.
fn spectral_kernel(spec: &SymbolSpec, g: usize, lags: &[LatticePoint]) -> Result<Vec<f64>> {
    let n = spec.dimension;
    let nodes = midpoint_nodes(g);
    let max_lag = lags.iter().map(|d| d.norm_inf()).max().unwrap_or(0) as usize;
    let cos_table: Vec<Vec<f64>> = (0..=max_lag)
        .map(|d| {
            nodes
                .iter()
                .map(|x| (2.0 * PI * d as f64 * x).cos())
                .collect()
        })
        .collect();
    let total = g.pow(n as u32);
    let mut symbol = Vec::with_capacity(total);
    let mut xi = vec![0.0; n];
    for idx in 0..total {
        let mut r = idx;
        for k in (0..n).rev() {
            xi[k] = nodes[r % g];
            r /= g;
        }
        symbol.push(symbol_eval(spec, &xi)?);
    }
    let weight = (g as f64).powi(n as i32).recip();
    Ok(par_map(lags, |d| {
        let axes: Vec<&[f64]> = d
            .coords()
            .iter()
            .map(|c| cos_table[c.unsigned_abs() as usize].as_slice())
            .collect();
        let mut acc = 0.0;
        for (idx, sigma) in symbol.iter().enumerate() {
            let mut r = idx;
            let mut prod = 1.0;
            for k in (0..n).rev() {
                prod *= axes[k][r % g];
                r /= g;
            }
            acc += sigma * prod;
        }
        acc * weight
    }))
}

fn convolve(
    f: &GridFunction,
    targets: &[LatticePoint],
    lags: &BTreeMap<LatticePoint, usize>,
    kernel: &[f64],
) -> Vec<f64> {
    targets
        .iter()
        .map(|t| f.iter().map(|(m, v)| v * kernel[lags[&t.sub(m)]]).sum())
        .collect()
}

/// Apply the multiplier `σ` to `f` on all points within sup-distance `radius` of
/// its support.
///
/// The torus integral is computed by the midpoint rule on `G`, `2G` and `4G`
/// nodes per axis. Symbols with a singularity at 0 are Richardson-extrapolated in
/// the order of that singularity; the estimate is the change between the two
/// extrapolants (or between the two finest grids for smooth symbols). Fails with
/// [`Error::Resolution`] if the estimate exceeds `tolerance`.
pub fn multiplier_apply(
    f: &GridFunction,
    spec: &SymbolSpec,
    grid_points: usize,
    radius: u64,
    tolerance: f64,
) -> Result<SpectralApplied> {
    spec.validate()?;
    if f.dimension() != spec.dimension {
        return Err(Error::DimensionMismatch {
            left: spec.dimension,
            right: f.dimension(),
        });
    }
    if f.mesh() != spec.mesh {
        return Err(Error::MeshMismatch {
            left: spec.mesh,
            right: f.mesh(),
        });
    }
    if grid_points < MIN_GRID_POINTS || !grid_points.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "grid_points must be even and at least {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    if f.is_zero() {
        return Ok(SpectralApplied {
            function: f.clone(),
            grid_points: 4 * grid_points,
            error_estimate: 0.0,
        });
    }
    let mut targets = std::collections::BTreeSet::new();
    for p in f.support() {
        for d in box_points(f.dimension(), radius) {
            targets.insert(p.add(&d));
        }
    }
    let targets: Vec<LatticePoint> = targets.into_iter().collect();
    let lag_radius = radius + f.support_diameter();
    let lags: Vec<LatticePoint> = box_points(f.dimension(), lag_radius).collect();
    let index: BTreeMap<LatticePoint, usize> = lags
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, d)| (d, i))
        .collect();

    let levels = [grid_points, 2 * grid_points, 4 * grid_points];
    let mut estimates = Vec::with_capacity(3);
    for g in levels {
        let kernel = spectral_kernel(spec, g, &lags)?;
        estimates.push(convolve(f, &targets, &index, &kernel));
    }
    let (values, diffs): (Vec<f64>, Vec<f64>) = match spec.singular_order() {
        Some(p) => {
            let q = 2f64.powf(p);
            let extrapolate = |a: f64, b: f64| (q * b - a) / (q - 1.0);
            (0..targets.len())
                .map(|i| {
                    let coarse = extrapolate(estimates[0][i], estimates[1][i]);
                    let fine = extrapolate(estimates[1][i], estimates[2][i]);
                    (fine, (fine - coarse).abs())
                })
                .unzip()
        }
        None => (0..targets.len())
            .map(|i| (estimates[2][i], (estimates[2][i] - estimates[1][i]).abs()))
            .unzip(),
    };
    let roundoff = 64.0 * f64::EPSILON * f.l1_norm() * symbol_scale(spec);
    let error_estimate = diffs.into_iter().fold(0.0f64, f64::max).max(roundoff);
    if error_estimate > tolerance {
        return Err(Error::Resolution {
            estimate: error_estimate,
            tolerance,
        });
    }
    let map = targets.into_iter().zip(values).collect();
    Ok(SpectralApplied {
        function: GridFunction::from_map(f.dimension(), f.mesh(), map),
        grid_points: 4 * grid_points,
        error_estimate,
    })
}

/// Rough size of the symbol, used to set a floor on the error estimate.
fn symbol_scale(spec: &SymbolSpec) -> f64 {
    let top = 4.0 * spec.dimension as f64 / (spec.mesh * spec.mesh);
    match spec.kind {
        SymbolKind::Laplacian => top,
        SymbolKind::Fractional(s) => top.powf(s.max(0.0)).max(1.0),
        SymbolKind::Log => top.ln().abs().max(1.0),
        SymbolKind::Heat(_) => 1.0,
    }
}
