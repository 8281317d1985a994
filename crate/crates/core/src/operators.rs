//! Application of the discrete Laplacian, its fractional powers of either sign,
//! the order-zero Riesz potential and the logarithmic Laplacian.
//!
//! Every nonlocal operator has the form `n ↦ w f(n) + σ Σ_{m≠n} K(n-m) f(m)` for
//! a lattice kernel `K`, a diagonal weight `w` and a sign `σ`. Since `f` has finite
//! support the sum at any point is finite and exact; the only truncation is the
//! choice of output points, governed by a [`Window`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{box_points, GridFunction, LatticePoint};
use crate::kernel1d::{identity_weight_1d, kernel_1d, riesz_zero_kernel, Kernel1DParams};
use crate::kernelnd::{
    build_kernel_table, check_order, corrector_rho, identity_weight, KernelOrder, KernelTable,
};
use crate::parallel::par_map;
use crate::quadrature::QuadratureConfig;

/// Default output windows target a tail bound of this multiple of `l1_norm(f)`.
pub const DEFAULT_TAIL_FACTOR: f64 = 1e-8;

/// Largest default window radius for N = 1, 2, 3 and above.
pub const DEFAULT_RADIUS_CAP: [u64; 3] = [4096, 64, 16];

fn radius_cap(dimension: usize) -> u64 {
    DEFAULT_RADIUS_CAP[dimension.min(3) - 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Laplacian,
    Fractional,
    RieszNegative,
    LogLaplacian,
    RieszZero,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OperatorKind::Laplacian => "laplacian",
            OperatorKind::Fractional => "fractional",
            OperatorKind::RieszNegative => "riesz-negative",
            OperatorKind::LogLaplacian => "log-laplacian",
            OperatorKind::RieszZero => "riesz-zero",
        };
        f.write_str(name)
    }
}

/// Where kernel values come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSourceKind {
    /// Gamma-function formulas; N = 1 only.
    ClosedForm,
    /// Heat-kernel quadrature, tabulated on demand.
    Quadrature(QuadratureConfig),
}

/// A fully specified operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub order: Option<f64>,
    pub dimension: usize,
    pub mesh: f64,
    pub kernel_source: KernelSourceKind,
}

impl OperatorSpec {
    pub fn new(
        kind: OperatorKind,
        order: Option<f64>,
        dimension: usize,
        mesh: f64,
        kernel_source: KernelSourceKind,
    ) -> Result<Self> {
        let spec = OperatorSpec {
            kind,
            order,
            dimension,
            mesh,
            kernel_source,
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
        if self.dimension > 1
            && self.kernel_source == KernelSourceKind::ClosedForm
            && self.kind != OperatorKind::Laplacian
        {
            return Err(Error::Invalid(
                "closed-form kernels exist only for N = 1".into(),
            ));
        }
        if let KernelSourceKind::Quadrature(q) = self.kernel_source {
            q.validate()?;
        }
        let needs_order = matches!(
            self.kind,
            OperatorKind::Fractional | OperatorKind::RieszNegative
        );
        match (needs_order, self.order) {
            (true, None) => {
                return Err(Error::Invalid(format!(
                    "operator {} needs an order",
                    self.kind
                )))
            }
            (false, Some(_)) => {
                return Err(Error::Invalid(format!(
                    "operator {} takes no order",
                    self.kind
                )))
            }
            _ => {}
        }
        match (self.kind, self.order) {
            (OperatorKind::Fractional, Some(s)) if !(s > 0.0 && s < 1.0) => {
                Err(Error::domain("fractional order must lie in (0, 1)", s))
            }
            (OperatorKind::RieszNegative, Some(s))
                if !(s < 0.0 && s > -(self.dimension as f64) / 2.0) =>
            {
                Err(Error::domain("negative order must lie in (-N/2, 0)", s))
            }
            _ => Ok(()),
        }
    }
}

/// Output points: every n within sup-distance `radius` of the support of f.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Window {
    /// Dilation radius; chosen from the kernel tail when absent.
    pub radius: Option<u64>,
    /// Fail unless the bound on omitted values is at most this.
    pub tail_tol: Option<f64>,
}

impl Window {
    pub fn radius(radius: u64) -> Self {
        Window {
            radius: Some(radius),
            tail_tol: None,
        }
    }
}

/// Operator output with its window radius and a bound on every omitted value.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub function: GridFunction,
    pub radius: u64,
    pub tail_bound: f64,
}

/// `-Δ f` (the positive operator), with `1/h²` scaling on `hZ`.
pub fn discrete_laplacian(f: &GridFunction) -> GridFunction {
    let n = f.dimension();
    let scale = 1.0 / (f.mesh() * f.mesh());
    let mut out: BTreeMap<LatticePoint, f64> = BTreeMap::new();
    for (p, v) in f.iter() {
        *out.entry(p.clone()).or_insert(0.0) += 2.0 * n as f64 * v * scale;
        for k in 0..n {
            for step in [-1i64, 1] {
                let mut c = p.coords().to_vec();
                c[k] += step;
                *out.entry(LatticePoint::new(c)).or_insert(0.0) -= v * scale;
            }
        }
    }
    GridFunction::from_map(n, f.mesh(), out)
}

/// Kernel values for one nonlocal operator.
#[derive(Debug, Clone)]
pub enum KernelSource<'a> {
    /// Gamma-function kernels on `hZ` (the mesh is taken from the input function).
    ClosedForm,
    /// A precomputed table on the unit lattice.
    Table(&'a KernelTable),
}

enum Lookup<'a> {
    Fractional1D(Kernel1DParams),
    Zero1D,
    Table(&'a KernelTable, f64),
}

impl Lookup<'_> {
    fn value(&self, d: &LatticePoint) -> Result<f64> {
        match self {
            Lookup::Fractional1D(p) => kernel_1d(*p, d.coords()[0]),
            Lookup::Zero1D => Ok(riesz_zero_kernel(d.coords()[0])),
            Lookup::Table(t, scale) => t.get(d).map(|v| scale * v).ok_or(Error::KernelCoverage {
                needed: d.norm_inf() as usize,
                available: t.max_radius() as usize,
            }),
        }
    }

    /// Largest kernel value at sup-distance greater than `r`.
    fn beyond(&self, r: u64) -> Result<f64> {
        match self {
            Lookup::Fractional1D(p) => kernel_1d(*p, r as i64 + 1),
            Lookup::Zero1D => Ok(riesz_zero_kernel(r as i64 + 1)),
            Lookup::Table(t, scale) => Ok(scale * t.max_beyond(r + 1)),
        }
    }

    /// Largest usable window radius for a support of the given diameter.
    fn coverage(&self, diameter: u64) -> Option<u64> {
        match self {
            Lookup::Table(t, _) => t.max_radius().checked_sub(diameter),
            _ => Some(u64::MAX),
        }
    }
}

struct Prepared<'a> {
    lookup: Lookup<'a>,
    weight: f64,
    sign: f64,
}

fn check_function(f: &GridFunction, dimension: usize) -> Result<()> {
    if f.dimension() != dimension {
        return Err(Error::DimensionMismatch {
            left: dimension,
            right: f.dimension(),
        });
    }
    Ok(())
}

fn table_for<'a>(
    source: &KernelSource<'a>,
    f: &GridFunction,
    expected: KernelOrder,
) -> Result<&'a KernelTable> {
    let KernelSource::Table(t) = source else {
        unreachable!("caller matched the table source");
    };
    check_function(f, t.dimension())?;
    if t.order() != expected {
        return Err(Error::Invalid(format!(
            "kernel table has order {} but the operator needs {}",
            t.order(),
            expected
        )));
    }
    if f.dimension() > 1 && f.mesh() != 1.0 {
        return Err(Error::domain(
            "mesh size is fixed to 1 when N >= 2",
            f.mesh(),
        ));
    }
    Ok(t)
}

fn prepare_power<'a>(f: &GridFunction, s: f64, source: &KernelSource<'a>) -> Result<Prepared<'a>> {
    let h = f.mesh();
    let sign = if s > 0.0 { -1.0 } else { 1.0 };
    match source {
        KernelSource::ClosedForm => {
            if f.dimension() != 1 {
                return Err(Error::Invalid(
                    "closed-form kernels exist only for N = 1".into(),
                ));
            }
            Ok(Prepared {
                lookup: Lookup::Fractional1D(Kernel1DParams::new(s, h)?),
                weight: identity_weight_1d(s, h)?,
                sign,
            })
        }
        KernelSource::Table(_) => {
            let t = table_for(source, f, KernelOrder::Fractional(s))?;
            let scale = h.powf(-2.0 * s);
            Ok(Prepared {
                lookup: Lookup::Table(t, scale),
                weight: scale * identity_weight(t.dimension(), s, t.quad())?,
                sign,
            })
        }
    }
}

fn prepare_zero<'a>(
    f: &GridFunction,
    source: &KernelSource<'a>,
    log: bool,
) -> Result<Prepared<'a>> {
    let h = f.mesh();
    match source {
        KernelSource::ClosedForm => {
            if f.dimension() != 1 {
                return Err(Error::Invalid(
                    "closed-form kernels exist only for N = 1".into(),
                ));
            }
            Ok(Prepared {
                lookup: Lookup::Zero1D,
                weight: if log { -(h * h).ln() } else { 0.0 },
                sign: if log { -1.0 } else { 1.0 },
            })
        }
        KernelSource::Table(_) => {
            let t = table_for(source, f, KernelOrder::Zero)?;
            let weight = if log {
                corrector_rho(t.dimension(), t.quad())? - (h * h).ln()
            } else {
                0.0
            };
            Ok(Prepared {
                lookup: Lookup::Table(t, 1.0),
                weight,
                sign: if log { -1.0 } else { 1.0 },
            })
        }
    }
}

fn choose_radius(f: &GridFunction, lookup: &Lookup<'_>, window: &Window) -> Result<(u64, f64)> {
    let l1 = f.l1_norm();
    let diameter = f.support_diameter();
    let coverage = lookup.coverage(diameter);
    let radius = match window.radius {
        Some(r) => {
            if let Some(c) = coverage {
                if r > c {
                    return Err(Error::KernelCoverage {
                        needed: (r + diameter) as usize,
                        available: (c + diameter) as usize,
                    });
                }
            } else {
                return Err(Error::KernelCoverage {
                    needed: (r + diameter) as usize,
                    available: 0,
                });
            }
            r
        }
        None => {
            let limit = radius_cap(f.dimension()).min(coverage.ok_or(Error::KernelCoverage {
                needed: diameter as usize,
                available: 0,
            })?);
            let target = DEFAULT_TAIL_FACTOR;
            let mut lo = 0u64;
            let mut hi = limit;
            if lookup.beyond(hi)? > target {
                lo = hi;
            }
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if lookup.beyond(mid)? <= target {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            lo
        }
    };
    let bound = l1 * lookup.beyond(radius)?;
    if let Some(tol) = window.tail_tol {
        if bound > tol {
            return Err(Error::WindowTooSmall {
                radius: radius as usize,
                bound,
                requested: tol,
            });
        }
    }
    Ok((radius, bound))
}

/// Every point within sup-distance `radius` of the support, in lexicographic order.
fn window_points(f: &GridFunction, radius: u64) -> Vec<LatticePoint> {
    let mut set = std::collections::BTreeSet::new();
    for p in f.support() {
        for d in box_points(f.dimension(), radius) {
            set.insert(p.add(&d));
        }
    }
    set.into_iter().collect()
}

fn apply_prepared(f: &GridFunction, op: &Prepared<'_>, window: &Window) -> Result<Applied> {
    if f.is_zero() {
        return Ok(Applied {
            function: f.clone(),
            radius: window.radius.unwrap_or(0),
            tail_bound: 0.0,
        });
    }
    let (radius, tail_bound) = choose_radius(f, &op.lookup, window)?;
    let support: Vec<(LatticePoint, f64)> = f.iter().map(|(p, v)| (p.clone(), v)).collect();
    let targets = window_points(f, radius);
    let values = par_map(&targets, |n| -> Result<f64> {
        let mut terms: Vec<(i64, &LatticePoint, f64)> = support
            .iter()
            .filter(|(m, _)| m != n)
            .map(|(m, v)| (n.sub(m).norm_sq(), m, *v))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        let mut acc = 0.0;
        for (_, m, v) in terms {
            acc += op.lookup.value(&n.sub(m))? * v;
        }
        Ok(op.weight * f.get(n) + op.sign * acc)
    });
    let mut map = BTreeMap::new();
    for (n, v) in targets.into_iter().zip(values) {
        map.insert(n, v?);
    }
    Ok(Applied {
        function: GridFunction::from_map(f.dimension(), f.mesh(), map),
        radius,
        tail_bound,
    })
}

/// `n ↦ Σ_{m≠n} K_s(n-m)(f(n) - f(m))` for s in (0, 1).
pub fn fractional_laplacian(
    f: &GridFunction,
    s: f64,
    source: &KernelSource<'_>,
    window: &Window,
) -> Result<Applied> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain("fractional order must lie in (0, 1)", s));
    }
    let op = prepare_power(f, s, source)?;
    apply_prepared(f, &op, window)
}

/// `(-Δ)^s f` for s in (-N/2, 0): convolution with the Riesz kernel, whose value
/// at the origin is the identity weight.
pub fn riesz_potential(
    f: &GridFunction,
    s: f64,
    source: &KernelSource<'_>,
    window: &Window,
) -> Result<Applied> {
    if !(s < 0.0) {
        return Err(Error::domain("negative order must be below 0", s));
    }
    check_order(f.dimension(), s)?;
    let op = prepare_power(f, s, source)?;
    apply_prepared(f, &op, window)
}

/// `n ↦ -Σ_{m≠n} K(n-m) f(m) + ρ f(n)` with `ρ = ρ_N - ln h²`.
pub fn log_laplacian(
    f: &GridFunction,
    source: &KernelSource<'_>,
    window: &Window,
) -> Result<Applied> {
    let op = prepare_zero(f, source, true)?;
    apply_prepared(f, &op, window)
}

/// The order-zero Riesz potential `n ↦ Σ_{m≠n} K(n-m) f(m)`.
pub fn riesz_zero(f: &GridFunction, source: &KernelSource<'_>, window: &Window) -> Result<Applied> {
    let op = prepare_zero(f, source, false)?;
    apply_prepared(f, &op, window)
}

/// Kernel table radius that covers every default window for this function.
pub fn default_table_radius(f: &GridFunction) -> u64 {
    radius_cap(f.dimension()) + f.support_diameter()
}

fn table_radius(f: &GridFunction, window: &Window) -> u64 {
    window
        .radius
        .map_or_else(|| default_table_radius(f), |r| r + f.support_diameter())
        .max(1)
}

/// Apply the operator described by `spec`, building a kernel table if needed.
pub fn apply(f: &GridFunction, spec: &OperatorSpec, window: &Window) -> Result<Applied> {
    spec.validate()?;
    check_function(f, spec.dimension)?;
    if f.mesh() != spec.mesh {
        return Err(Error::MeshMismatch {
            left: spec.mesh,
            right: f.mesh(),
        });
    }
    if spec.kind == OperatorKind::Laplacian {
        return Ok(Applied {
            function: discrete_laplacian(f),
            radius: 1,
            tail_bound: 0.0,
        });
    }
    let table_order = match spec.kind {
        OperatorKind::Fractional | OperatorKind::RieszNegative => {
            KernelOrder::Fractional(spec.order.expect("validated"))
        }
        _ => KernelOrder::Zero,
    };
    let table;
    let source = match spec.kernel_source {
        KernelSourceKind::ClosedForm => KernelSource::ClosedForm,
        KernelSourceKind::Quadrature(quad) => {
            table = build_kernel_table(f.dimension(), table_order, table_radius(f, window), &quad)?;
            KernelSource::Table(&table)
        }
    };
    apply_with(f, spec, &source, window)
}

/// Apply the operator described by `spec` with kernel values from `source`.
pub fn apply_with(
    f: &GridFunction,
    spec: &OperatorSpec,
    source: &KernelSource<'_>,
    window: &Window,
) -> Result<Applied> {
    spec.validate()?;
    match spec.kind {
        OperatorKind::Laplacian => Ok(Applied {
            function: discrete_laplacian(f),
            radius: 1,
            tail_bound: 0.0,
        }),
        OperatorKind::Fractional => {
            fractional_laplacian(f, spec.order.expect("validated"), source, window)
        }
        OperatorKind::RieszNegative => {
            riesz_potential(f, spec.order.expect("validated"), source, window)
        }
        OperatorKind::LogLaplacian => log_laplacian(f, source, window),
        OperatorKind::RieszZero => riesz_zero(f, source, window),
    }
}

/// `[(-Δ)^s f - f] / s`, through the fractional Laplacian for s > 0 and the Riesz
/// potential for s < 0. The kind and order of `spec` are ignored; its dimension,
/// mesh and kernel source are used.
pub fn difference_quotient(
    f: &GridFunction,
    s: f64,
    spec: &OperatorSpec,
    window: &Window,
) -> Result<Applied> {
    if s == 0.0 {
        return Err(Error::domain(
            "difference quotient needs a non-zero order",
            s,
        ));
    }
    let kind = if s > 0.0 {
        OperatorKind::Fractional
    } else {
        OperatorKind::RieszNegative
    };
    let power = OperatorSpec::new(kind, Some(s), spec.dimension, spec.mesh, spec.kernel_source)?;
    let applied = apply(f, &power, window)?;
    Ok(quotient(applied, f, s))
}

/// As [`difference_quotient`] with a caller-supplied kernel table or closed form.
pub fn difference_quotient_with(
    f: &GridFunction,
    s: f64,
    source: &KernelSource<'_>,
    window: &Window,
) -> Result<Applied> {
    let applied = if s > 0.0 {
        fractional_laplacian(f, s, source, window)?
    } else if s < 0.0 {
        riesz_potential(f, s, source, window)?
    } else {
        return Err(Error::domain(
            "difference quotient needs a non-zero order",
            s,
        ));
    };
    Ok(quotient(applied, f, s))
}

fn quotient(applied: Applied, f: &GridFunction, s: f64) -> Applied {
    let mut map = BTreeMap::new();
    for (n, v) in applied.function.iter() {
        map.insert(n.clone(), (v - f.get(n)) / s);
    }
    for (n, v) in f.iter() {
        map.entry(n.clone()).or_insert(-v / s);
    }
    Applied {
        function: GridFunction::from_map(f.dimension(), f.mesh(), map),
        radius: applied.radius,
        tail_bound: applied.tail_bound / s.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel1d::normalization_c;
    use crate::special::gamma_ratio;
    use proptest::prelude::*;

    fn pt(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec())
    }

    fn delta1() -> GridFunction {
        GridFunction::delta(1, pt(&[0]))
    }

    #[test]
    fn laplacian_of_delta() {
        let l = discrete_laplacian(&delta1());
        assert_eq!(l.get(&pt(&[0])), 2.0);
        assert_eq!(l.get(&pt(&[1])), -1.0);
        assert_eq!(l.get(&pt(&[-1])), -1.0);
        assert_eq!(l.support_len(), 3);
        let l2 = discrete_laplacian(&GridFunction::delta(2, pt(&[0, 0])));
        assert_eq!(l2.get(&pt(&[0, 0])), 4.0);
        for p in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            assert_eq!(l2.get(&pt(&p)), -1.0);
        }
        let coarse = delta1().with_mesh(0.5).unwrap();
        assert_eq!(discrete_laplacian(&coarse).get(&pt(&[0])), 8.0);
    }

    #[test]
    fn laplacian_kills_constants_inside_a_box() {
        let f = GridFunction::from_entries(2, 1.0, box_points(2, 5).map(|p| (p, 1.0))).unwrap();
        let l = discrete_laplacian(&f);
        for p in box_points(2, 4) {
            assert_eq!(l.get(&p), 0.0);
        }
    }

    #[test]
    fn fractional_delta_anchor() {
        for s in [0.1, 0.25, 0.5, 0.75] {
            let out =
                fractional_laplacian(&delta1(), s, &KernelSource::ClosedForm, &Window::radius(3))
                    .unwrap();
            let c = normalization_c(s, 1.0).unwrap();
            let want = s * c * gamma_ratio(1.0 - s, 1.0 + s).unwrap() / s;
            assert!((out.function.get(&pt(&[0])) - want).abs() < 1e-10 * want);
        }
        let out = fractional_laplacian(
            &delta1(),
            0.5,
            &KernelSource::ClosedForm,
            &Window::radius(3),
        )
        .unwrap();
        let c = normalization_c(0.5, 1.0).unwrap();
        assert!((out.function.get(&pt(&[0])) - 2.0 * c).abs() < 1e-14);
        assert!((out.function.get(&pt(&[1])) + 4.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn fractional_tends_to_laplacian() {
        let lap = discrete_laplacian(&delta1());
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let out = fractional_laplacian(
                &delta1(),
                1.0 - eps,
                &KernelSource::ClosedForm,
                &Window::radius(200),
            )
            .unwrap();
            let err = out.function.sup_distance(&lap).unwrap();
            assert!(err < 3.0 * eps, "1-s={eps}: {err}");
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn log_laplacian_of_delta() {
        let out = log_laplacian(&delta1(), &KernelSource::ClosedForm, &Window::radius(10)).unwrap();
        assert_eq!(out.function.get(&pt(&[0])), 0.0);
        for n in 1..=10i64 {
            assert_eq!(out.function.get(&pt(&[n])), -1.0 / n as f64);
            assert_eq!(out.function.get(&pt(&[-n])), -1.0 / n as f64);
        }
        assert!((out.tail_bound - 1.0 / 11.0).abs() < 1e-15);
        let e = delta1().with_mesh(std::f64::consts::E).unwrap();
        let out = log_laplacian(&e, &KernelSource::ClosedForm, &Window::radius(1)).unwrap();
        assert!((out.function.get(&pt(&[0])) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn riesz_of_delta_is_the_kernel() {
        let s = -0.3;
        let out =
            riesz_potential(&delta1(), s, &KernelSource::ClosedForm, &Window::radius(5)).unwrap();
        let p = Kernel1DParams::new(s, 1.0).unwrap();
        for n in 1..=5i64 {
            assert_eq!(out.function.get(&pt(&[n])), kernel_1d(p, n).unwrap());
        }
        assert_eq!(
            out.function.get(&pt(&[0])),
            identity_weight_1d(s, 1.0).unwrap()
        );
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let z = GridFunction::zero(1, 1.0).unwrap();
        assert!(
            fractional_laplacian(&z, 0.5, &KernelSource::ClosedForm, &Window::default())
                .unwrap()
                .function
                .is_zero()
        );
        assert!(
            log_laplacian(&z, &KernelSource::ClosedForm, &Window::default())
                .unwrap()
                .function
                .is_zero()
        );
        let spec = OperatorSpec::new(
            OperatorKind::LogLaplacian,
            None,
            1,
            1.0,
            KernelSourceKind::ClosedForm,
        )
        .unwrap();
        for s in [0.1, -0.1] {
            assert!(difference_quotient(&z, s, &spec, &Window::default())
                .unwrap()
                .function
                .is_zero());
        }
    }

    #[test]
    fn windows() {
        let out = fractional_laplacian(
            &delta1(),
            0.9,
            &KernelSource::ClosedForm,
            &Window::default(),
        )
        .unwrap();
        assert!(out.tail_bound <= DEFAULT_TAIL_FACTOR);
        assert!(out.radius < DEFAULT_RADIUS_CAP[0]);
        assert_eq!(out.function.support_len() as u64, 2 * out.radius + 1);
        let small = Window {
            radius: Some(3),
            tail_tol: Some(1e-6),
        };
        assert!(matches!(
            fractional_laplacian(&delta1(), 0.5, &KernelSource::ClosedForm, &small),
            Err(Error::WindowTooSmall { .. })
        ));
        let capped = fractional_laplacian(
            &delta1(),
            0.1,
            &KernelSource::ClosedForm,
            &Window::default(),
        )
        .unwrap();
        assert_eq!(capped.radius, DEFAULT_RADIUS_CAP[0]);
        assert!(capped.tail_bound > DEFAULT_TAIL_FACTOR);
    }

    #[test]
    fn table_coverage_is_checked() {
        let quad = QuadratureConfig::default();
        let table = build_kernel_table(1, KernelOrder::Fractional(0.5), 5, &quad).unwrap();
        let f = GridFunction::from_entries(1, 1.0, vec![(pt(&[0]), 1.0), (pt(&[2]), 1.0)]).unwrap();
        assert!(
            fractional_laplacian(&f, 0.5, &KernelSource::Table(&table), &Window::radius(3)).is_ok()
        );
        assert!(matches!(
            fractional_laplacian(&f, 0.5, &KernelSource::Table(&table), &Window::radius(4)),
            Err(Error::KernelCoverage { .. })
        ));
        assert!(
            fractional_laplacian(&f, 0.4, &KernelSource::Table(&table), &Window::radius(1))
                .is_err()
        );
    }

    #[test]
    fn table_and_closed_form_agree_on_a_coarse_mesh() {
        let quad = QuadratureConfig::default();
        let f =
            GridFunction::from_entries(1, 0.5, vec![(pt(&[0]), 1.0), (pt(&[3]), -2.0)]).unwrap();
        let window = Window::radius(6);
        for s in [0.3, -0.2] {
            let table = build_kernel_table(1, KernelOrder::Fractional(s), 9, &quad).unwrap();
            let a = difference_quotient_with(&f, s, &KernelSource::ClosedForm, &window).unwrap();
            let b = difference_quotient_with(&f, s, &KernelSource::Table(&table), &window).unwrap();
            assert!(a.function.sup_distance(&b.function).unwrap() < 1e-8);
        }
        let table = build_kernel_table(1, KernelOrder::Zero, 9, &quad).unwrap();
        let a = log_laplacian(&f, &KernelSource::ClosedForm, &window).unwrap();
        let b = log_laplacian(&f, &KernelSource::Table(&table), &window).unwrap();
        assert!(a.function.sup_distance(&b.function).unwrap() < 1e-8);
    }

    #[test]
    fn spec_validation() {
        let q = KernelSourceKind::Quadrature(QuadratureConfig::default());
        assert!(OperatorSpec::new(OperatorKind::Fractional, Some(1.2), 1, 1.0, q).is_err());
        assert!(OperatorSpec::new(OperatorKind::Fractional, None, 1, 1.0, q).is_err());
        assert!(OperatorSpec::new(OperatorKind::RieszNegative, Some(-0.7), 1, 1.0, q).is_err());
        assert!(OperatorSpec::new(OperatorKind::RieszNegative, Some(-0.7), 2, 1.0, q).is_ok());
        assert!(OperatorSpec::new(OperatorKind::LogLaplacian, Some(0.1), 1, 1.0, q).is_err());
        assert!(OperatorSpec::new(
            OperatorKind::LogLaplacian,
            None,
            2,
            1.0,
            KernelSourceKind::ClosedForm
        )
        .is_err());
        assert!(OperatorSpec::new(OperatorKind::LogLaplacian, None, 2, 0.5, q).is_err());
    }

    fn arb_function() -> impl Strategy<Value = GridFunction> {
        prop::collection::btree_map(-6i64..6, -3.0f64..3.0, 1..6).prop_map(|m| {
            GridFunction::from_entries(1, 1.0, m.into_iter().map(|(k, v)| (pt(&[k]), v))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn translation_equivariance(f in arb_function(), shift in -20i64..20, s in 0.05f64..0.95) {
            let w = Window::radius(8);
            let shift = pt(&[shift]);
            let a = fractional_laplacian(&f.translate(&shift), s, &KernelSource::ClosedForm, &w).unwrap().function;
            let b = fractional_laplacian(&f, s, &KernelSource::ClosedForm, &w).unwrap().function.translate(&shift);
            prop_assert_eq!(a, b);
            let a = riesz_potential(&f.translate(&shift), -s / 2.0, &KernelSource::ClosedForm, &w).unwrap().function;
            let b = riesz_potential(&f, -s / 2.0, &KernelSource::ClosedForm, &w).unwrap().function.translate(&shift);
            prop_assert_eq!(a, b);
            let a = log_laplacian(&f.translate(&shift), &KernelSource::ClosedForm, &w).unwrap().function;
            let b = log_laplacian(&f, &KernelSource::ClosedForm, &w).unwrap().function.translate(&shift);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn reflection_commutes(f in arb_function(), s in 0.05f64..0.95) {
            let w = Window::radius(8);
            let tol = 1e-14 * (1.0 + f.l1_norm());
            let a = fractional_laplacian(&f.reflect(), s, &KernelSource::ClosedForm, &w).unwrap().function;
            let b = fractional_laplacian(&f, s, &KernelSource::ClosedForm, &w).unwrap().function.reflect();
            prop_assert!(a.sup_distance(&b).unwrap() <= tol);
            let a = log_laplacian(&f.reflect(), &KernelSource::ClosedForm, &w).unwrap().function;
            let b = log_laplacian(&f, &KernelSource::ClosedForm, &w).unwrap().function.reflect();
            prop_assert!(a.sup_distance(&b).unwrap() <= tol);
        }

        #[test]
        fn linearity(f in arb_function(), g in arb_function(), s in -0.45f64..-0.05) {
            let w = Window::radius(14);
            let sum = f.add(&g).unwrap();
            prop_assume!(!sum.is_zero());
            let lhs = riesz_potential(&sum, s, &KernelSource::ClosedForm, &w).unwrap().function;
            let rf = riesz_potential(&f, s, &KernelSource::ClosedForm, &w).unwrap().function;
            let rg = riesz_potential(&g, s, &KernelSource::ClosedForm, &w).unwrap().function;
            let rhs = rf.add(&rg).unwrap();
            let scale = 1.0 + f.l1_norm() + g.l1_norm();
            for (p, v) in lhs.iter().filter(|(p, _)| p.norm_inf() <= 8) {
                prop_assert!((v - rhs.get(p)).abs() <= 1e-12 * scale, "{} vs {}", v, rhs.get(p));
            }
        }

        #[test]
        fn log_bound(f in arb_function(), h in 0.2f64..5.0) {
            let f = f.with_mesh(h).unwrap();
            let out = log_laplacian(&f, &KernelSource::ClosedForm, &Window::radius(20)).unwrap();
            let bound = f.l1_norm() + (h * h).ln().abs() * f.linf_norm();
            prop_assert!(out.function.linf_norm() <= bound * (1.0 + 1e-14));
        }
    }
}
