//! Lattice kernels defined by heat-kernel integrals over (0, ∞).
//!
//! All integrals `∫ φ(t) t^{-s-1} dt` are split into three pieces:
//!
//! * `(0, t_lo]`: termwise integration of the power series of `φ`,
//! * `[t_lo, T]`: adaptive Gauss–Kronrod in `u = ln t`,
//! * `[T, ∞)`: termwise integration of the large-argument Bessel expansion.
//!
//! Kernel tables are computed one orbit (under coordinate permutations and
//! sign flips) at a time, in fixed-size batches that share Bessel evaluations.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{box_points, LatticePoint};
use crate::json::{EntryOut, Sig17};
use crate::parallel::par_map;
use crate::quadrature::{break_points, integrate_vec_located, QuadratureConfig};
use crate::special::{euler_gamma, exp_checked, log_gamma, scaled_bessel_i_sequence};

const SERIES_DEGREE: usize = 30;
const ASYMPTOTIC_TERMS: usize = 12;
const BATCH: usize = 64;

/// Sup-norm radius of the lattice sum in [`corrector_rho_lattice_sum`].
pub const LATTICE_SUM_RADIUS: u64 = 24;

/// Order of a tabulated kernel: the zero-order kernel or `K_s` for a non-zero s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelOrder {
    Zero,
    Fractional(f64),
}

impl fmt::Display for KernelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelOrder::Zero => write!(f, "zero"),
            KernelOrder::Fractional(s) => write!(f, "{s}"),
        }
    }
}

/// `s` must lie in `(-N/2, 0) ∪ (0, 1)`.
pub fn check_order(dimension: usize, s: f64) -> Result<()> {
    if dimension == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    if s == 0.0 {
        return Err(Error::domain("kernel order must be non-zero", s));
    }
    if s > -(dimension as f64) / 2.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("kernel order must lie in (-N/2, 1)", s))
    }
}

enum Integrand {
    /// `G_{t,N}(m)` for an orbit representative with sorted non-negative coordinates.
    Heat(Vec<u64>),
    /// `1 - G_{t,N}(0)`.
    Complement,
}

/// Power series data for `φ(t) = exp(ln_pref) t^lead Σ_p coef[p] t^p` near t = 0.
struct SmallSeries {
    lead: f64,
    ln_pref: f64,
    coef: Vec<f64>,
}

fn poly_mul(a: &[f64], b: &[f64], degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn exp_series(rate: f64, degree: usize) -> Vec<f64> {
    let mut out = vec![1.0; degree + 1];
    for p in 1..=degree {
        out[p] = out[p - 1] * rate / p as f64;
    }
    out
}

/// `Σ_j t^{2j} m! / (j! (j + m)!)`, i.e. `I_m(2t) m! / t^m`.
fn bessel_series(m: u64, degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    let mut c = 1.0;
    let mut j = 0usize;
    while 2 * j <= degree {
        out[2 * j] = c;
        j += 1;
        c /= j as f64 * (m as f64 + j as f64);
    }
    out
}

fn small_series(dimension: usize, integrand: &Integrand) -> Result<SmallSeries> {
    let decay = exp_series(-2.0 * dimension as f64, SERIES_DEGREE + 1);
    match integrand {
        Integrand::Heat(m) => {
            let mut poly = decay;
            poly.truncate(SERIES_DEGREE + 1);
            let mut ln_pref = 0.0;
            for &mk in m {
                poly = poly_mul(&poly, &bessel_series(mk, SERIES_DEGREE), SERIES_DEGREE);
                ln_pref -= log_gamma(mk as f64 + 1.0)?;
            }
            Ok(SmallSeries {
                lead: m.iter().sum::<u64>() as f64,
                ln_pref,
                coef: poly,
            })
        }
        Integrand::Complement => {
            let mut g_pow = decay;
            let i0 = bessel_series(0, SERIES_DEGREE + 1);
            for _ in 0..dimension {
                g_pow = poly_mul(&g_pow, &i0, SERIES_DEGREE + 1);
            }
            Ok(SmallSeries {
                lead: 1.0,
                ln_pref: 0.0,
                coef: g_pow[1..].iter().map(|c| -c).collect(),
            })
        }
    }
}

/// `Σ_j (-1)^j a_j(m) w^j` with `e^{-2t} I_m(2t) ≈ (4πt)^{-1/2} Σ_j (-1)^j a_j(m) (2t)^{-j}`.
fn asymptotic_series(m: u64) -> Vec<f64> {
    let nu2 = 4.0 * (m as f64) * (m as f64);
    let mut out = vec![1.0; ASYMPTOTIC_TERMS];
    for j in 1..ASYMPTOTIC_TERMS {
        let odd = (2 * j - 1) as f64;
        out[j] = -out[j - 1] * (nu2 - odd * odd) / (8.0 * j as f64);
    }
    out
}

/// `∫_0^{t_lo} φ(t) t^{-s-1} dt` from the series.
fn small_part(series: &SmallSeries, s: f64, t_lo: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut pow = 1.0;
    for (p, c) in series.coef.iter().enumerate() {
        sum += c * pow / (series.lead + p as f64 - s);
        pow *= t_lo;
    }
    let ln_scale = series.ln_pref + (series.lead - s) * t_lo.ln();
    Ok(exp_checked(ln_scale, "small-time kernel series")? * sum)
}

/// `∫_T^∞ G_{t,N}(m) t^{-s-1} dt` from the asymptotic expansion.
fn large_part(dimension: usize, m: &[u64], s: f64, big_t: f64) -> f64 {
    let mut poly = vec![1.0];
    for &mk in m {
        poly = poly_mul(&poly, &asymptotic_series(mk), ASYMPTOTIC_TERMS - 1);
    }
    let half_n = dimension as f64 / 2.0;
    let mut sum = 0.0;
    for (j, c) in poly.iter().enumerate() {
        let e = half_n + s + j as f64;
        sum += c * 0.5f64.powi(j as i32) * big_t.powf(-e) / e;
    }
    (4.0 * PI).powf(-half_n) * sum
}

#[derive(Clone, Copy)]
enum Range {
    Full,
    Below(f64),
    Above(f64),
}

fn describe(integrand: &Integrand) -> String {
    match integrand {
        Integrand::Heat(m) => format!(
            "m = {}",
            LatticePoint::new(m.iter().map(|&c| c as i64).collect())
        ),
        Integrand::Complement => "the origin complement".into(),
    }
}

/// `∫ φ_i(t) t^{-s-1} dt` over the given range for every integrand.
fn heat_integrals(
    dimension: usize,
    integrands: &[Integrand],
    s: f64,
    range: Range,
    quad: &QuadratureConfig,
) -> Result<Vec<f64>> {
    quad.validate()?;
    if integrands.is_empty() {
        return Ok(Vec::new());
    }
    let max_order = integrands
        .iter()
        .map(|g| match g {
            Integrand::Heat(m) => m.iter().copied().max().unwrap_or(0),
            Integrand::Complement => 0,
        })
        .max()
        .unwrap_or(0);
    let t_lo = (1.0f64 / 16.0).min(quad.split / 4.0);
    let big_t = (500.0f64)
        .max(100.0 * (max_order as f64 + 1.0).powi(2))
        .max(4.0 * quad.split);
    let (a, b) = match range {
        Range::Full => (t_lo, big_t),
        Range::Below(c) => (t_lo, c),
        Range::Above(c) => (c, big_t),
    };
    let breaks = break_points(a.ln(), b.ln(), 1.0, &[quad.split.ln()]);
    let n = dimension as i32;
    let integrand = |u: f64, out: &mut [f64]| {
        let t = u.exp();
        let weight = (-s * u).exp();
        let seq = scaled_bessel_i_sequence(max_order as usize, t).expect("t > 0");
        for (o, g) in out.iter_mut().zip(integrands) {
            let phi = match g {
                Integrand::Heat(m) => m.iter().map(|&k| seq[k as usize]).product::<f64>(),
                Integrand::Complement => 1.0 - seq[0].powi(n),
            };
            *o = phi * weight;
        }
    };
    let mut values = integrate_vec_located(integrand, &breaks, integrands.len(), quad)
        .map_err(|(i, e)| e.with_context(describe(&integrands[i])))?
        .values;
    if matches!(range, Range::Full | Range::Below(_)) {
        for (v, g) in values.iter_mut().zip(integrands) {
            *v += small_part(&small_series(dimension, g)?, s, t_lo)?;
        }
    }
    if matches!(range, Range::Full | Range::Above(_)) {
        for (v, g) in values.iter_mut().zip(integrands) {
            match g {
                Integrand::Heat(m) => *v += large_part(dimension, m, s, big_t),
                Integrand::Complement => {
                    unreachable!("the complement is only integrated below the split")
                }
            }
        }
    }
    Ok(values)
}

/// `|s| / Γ(1 - s)`, which is `1/|Γ(-s)|` for s in (0, 1) and `1/Γ(-s)` for s < 0.
fn prefactor(s: f64) -> Result<f64> {
    exp_checked(s.abs().ln() - log_gamma(1.0 - s)?, "kernel prefactor")
}

fn representative(m: &LatticePoint) -> Vec<u64> {
    m.canonical().coords().iter().map(|&c| c as u64).collect()
}

/// `K_s(m) = (1/|Γ(-s)|) ∫_0^∞ G_{t,N}(m) t^{-s-1} dt` for m ≠ 0, and 0 at the origin.
pub fn kernel_nd(s: f64, m: &LatticePoint, quad: &QuadratureConfig) -> Result<f64> {
    check_order(m.dimension(), s)?;
    if m.is_origin() {
        return Ok(0.0);
    }
    let v = heat_integrals(
        m.dimension(),
        &[Integrand::Heat(representative(m))],
        s,
        Range::Full,
        quad,
    )?;
    Ok(prefactor(s)? * v[0])
}

/// `K(m) = ∫_0^∞ G_{t,N}(m) dt / t` for m ≠ 0, and 0 at the origin.
pub fn zero_order_kernel(m: &LatticePoint, quad: &QuadratureConfig) -> Result<f64> {
    if m.is_origin() {
        return Ok(0.0);
    }
    let v = heat_integrals(
        m.dimension(),
        &[Integrand::Heat(representative(m))],
        0.0,
        Range::Full,
        quad,
    )?;
    Ok(v[0])
}

/// Diagonal weight of `(-Δ_N)^s` in kernel form, for s in `(-N/2, 1)`.
///
/// For s > 0 this is the kernel mass `Σ_{m≠0} K_s(m)`, so that
/// `(-Δ)^s f(n) = F(s) f(n) - Σ_{m≠n} K_s(n-m) f(m)`. For s < 0 it is the value of
/// the Riesz kernel at the origin. F(0) = 1, and F'(0) is the corrector `ρ_N`.
pub fn identity_weight(dimension: usize, s: f64, quad: &QuadratureConfig) -> Result<f64> {
    if s == 0.0 {
        if dimension == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        return Ok(1.0);
    }
    check_order(dimension, s)?;
    let c = quad.split;
    let below = heat_integrals(
        dimension,
        &[Integrand::Complement],
        s,
        Range::Below(c),
        quad,
    )?[0];
    let above = heat_integrals(
        dimension,
        &[Integrand::Heat(vec![0; dimension])],
        s,
        Range::Above(c),
        quad,
    )?[0];
    let num = (-s * c.ln()).exp() + s * (below - above);
    Ok(num * exp_checked(-log_gamma(1.0 - s)?, "identity weight")?)
}

/// `ρ_N = ∫_0^1 (1 - G_{t,N}(0)) dt/t - ∫_1^∞ G_{t,N}(0) dt/t - γ`, with the split
/// point taken from the configuration.
pub fn corrector_rho(dimension: usize, quad: &QuadratureConfig) -> Result<f64> {
    if dimension == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let c = quad.split;
    let below = heat_integrals(
        dimension,
        &[Integrand::Complement],
        0.0,
        Range::Below(c),
        quad,
    )?[0];
    let above = heat_integrals(
        dimension,
        &[Integrand::Heat(vec![0; dimension])],
        0.0,
        Range::Above(c),
        quad,
    )?[0];
    Ok(below - above - c.ln() - euler_gamma())
}

/// The same constant from `Σ_{m≠0} ∫_0^1 G_{t,N}(m) dt/t`, summed over the box of
/// radius [`LATTICE_SUM_RADIUS`].
pub fn corrector_rho_lattice_sum(dimension: usize, quad: &QuadratureConfig) -> Result<f64> {
    if dimension == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let c = quad.split;
    let reps = orbit_representatives(dimension, LATTICE_SUM_RADIUS);
    let batches: Vec<&[LatticePoint]> = reps.chunks(BATCH).collect();
    let partial = par_map(&batches, |batch| -> Result<f64> {
        let integrands: Vec<Integrand> = batch
            .iter()
            .map(|p| Integrand::Heat(representative(p)))
            .collect();
        let v = heat_integrals(dimension, &integrands, 0.0, Range::Below(c), quad)?;
        Ok(batch
            .iter()
            .zip(v)
            .map(|(p, x)| orbit_size(p) as f64 * x)
            .sum())
    });
    let mut sum = 0.0;
    for p in partial.into_iter().rev() {
        sum += p?;
    }
    let above = heat_integrals(
        dimension,
        &[Integrand::Heat(vec![0; dimension])],
        0.0,
        Range::Above(c),
        quad,
    )?[0];
    Ok(sum - above - c.ln() - euler_gamma())
}

/// Sorted non-negative representatives of the non-zero orbits in the box of the given radius.
pub fn orbit_representatives(dimension: usize, radius: u64) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; dimension];
    fn rec(k: usize, lo: i64, radius: i64, cur: &mut Vec<i64>, out: &mut Vec<LatticePoint>) {
        if k == cur.len() {
            if cur.iter().any(|&c| c != 0) {
                out.push(LatticePoint::new(cur.clone()));
            }
            return;
        }
        for v in lo..=radius {
            cur[k] = v;
            rec(k + 1, v, radius, cur, out);
        }
    }
    rec(0, 0, radius as i64, &mut cur, &mut out);
    out
}

/// Number of lattice points in the orbit of `p` under permutations and sign flips.
pub fn orbit_size(p: &LatticePoint) -> u64 {
    let c = p.canonical();
    let n = c.dimension() as u64;
    let mut perms: u64 = (1..=n).product();
    let mut run = 1u64;
    for w in c.coords().windows(2) {
        if w[0] == w[1] {
            run += 1;
            perms /= run;
        } else {
            run = 1;
        }
    }
    perms << c.coords().iter().filter(|&&x| x != 0).count()
}

/// Kernel values on the box `{m : |m|_inf <= max_radius}`, stored once per orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    dimension: usize,
    order: KernelOrder,
    max_radius: u64,
    quad: QuadratureConfig,
    orbits: BTreeMap<LatticePoint, f64>,
}

/// Tabulate `K_s` (or the zero-order kernel) on the box of radius `max_radius`.
pub fn build_kernel_table(
    dimension: usize,
    order: KernelOrder,
    max_radius: u64,
    quad: &QuadratureConfig,
) -> Result<KernelTable> {
    if dimension == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    if max_radius == 0 {
        return Err(Error::Invalid("table radius must be at least 1".into()));
    }
    quad.validate()?;
    let (s, scale) = match order {
        KernelOrder::Zero => (0.0, 1.0),
        KernelOrder::Fractional(s) => {
            check_order(dimension, s)?;
            (s, prefactor(s)?)
        }
    };
    let reps = orbit_representatives(dimension, max_radius);
    let batches: Vec<&[LatticePoint]> = reps.chunks(BATCH).collect();
    let values = par_map(&batches, |batch| {
        let integrands: Vec<Integrand> = batch
            .iter()
            .map(|p| Integrand::Heat(representative(p)))
            .collect();
        heat_integrals(dimension, &integrands, s, Range::Full, quad)
    });
    let mut orbits = BTreeMap::new();
    orbits.insert(LatticePoint::origin(dimension), 0.0);
    for (batch, v) in batches.iter().zip(values) {
        for (p, x) in batch.iter().zip(v?) {
            orbits.insert(p.clone(), scale * x);
        }
    }
    Ok(KernelTable {
        dimension,
        order,
        max_radius,
        quad: *quad,
        orbits,
    })
}

impl KernelTable {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> KernelOrder {
        self.order
    }

    pub fn max_radius(&self) -> u64 {
        self.max_radius
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    /// Kernel value at `m`, or `None` outside the tabulated box.
    pub fn get(&self, m: &LatticePoint) -> Option<f64> {
        if m.dimension() != self.dimension || m.norm_inf() > self.max_radius {
            return None;
        }
        self.orbits.get(&m.canonical()).copied()
    }

    /// Every tabulated point with its value, in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (LatticePoint, f64)> + '_ {
        box_points(self.dimension, self.max_radius).map(move |p| {
            let v = self.orbits[&p.canonical()];
            (p, v)
        })
    }

    pub fn len(&self) -> usize {
        (2 * self.max_radius as usize + 1).pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_value(&self) -> f64 {
        self.orbits.values().fold(0.0, |m, &v| m.max(v))
    }

    /// Largest value with `|m|_inf >= r`.
    pub fn max_beyond(&self, r: u64) -> f64 {
        self.orbits
            .iter()
            .filter(|(p, _)| p.norm_inf() >= r)
            .fold(0.0, |m, (_, &v)| m.max(v))
    }

    /// Largest value on the outermost shell, an estimate of the kernel beyond the table.
    pub fn tail_estimate(&self) -> f64 {
        self.max_beyond(self.max_radius)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel table serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("kernel table JSON: {e}")))
    }

    /// `m_1,...,m_N,value` with a header row, in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.dimension {
            out.push_str(&format!("m_{k},"));
        }
        out.push_str("value\n");
        for (p, v) in self.entries() {
            for c in p.coords() {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&Sig17(v).text());
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OrderField {
    Tag(String),
    Value(f64),
}

impl Serialize for KernelTable {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum OrderOut {
            Tag(&'static str),
            Value(Sig17),
        }
        #[derive(Serialize)]
        struct Out<'a> {
            dimension: usize,
            order: OrderOut,
            max_radius: u64,
            quad: &'a QuadratureConfig,
            entries: Vec<EntryOut<'a>>,
        }
        let points: Vec<(LatticePoint, f64)> = self.entries().collect();
        Out {
            dimension: self.dimension,
            order: match self.order {
                KernelOrder::Zero => OrderOut::Tag("zero"),
                KernelOrder::Fractional(s) => OrderOut::Value(Sig17(s)),
            },
            max_radius: self.max_radius,
            quad: &self.quad,
            entries: points
                .iter()
                .map(|(p, v)| EntryOut {
                    coords: p.coords(),
                    value: Sig17(*v),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KernelTable {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct In {
            dimension: usize,
            order: OrderField,
            max_radius: u64,
            quad: QuadratureConfig,
            entries: Vec<EntryIn>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct EntryIn {
            coords: Vec<i64>,
            value: f64,
        }

        let raw = In::deserialize(deserializer)?;
        if raw.dimension == 0 || raw.max_radius == 0 {
            return Err(D::Error::custom(
                "dimension and max_radius must be at least 1",
            ));
        }
        raw.quad.validate().map_err(D::Error::custom)?;
        let order = match raw.order {
            OrderField::Tag(t) if t == "zero" => KernelOrder::Zero,
            OrderField::Tag(t) => {
                return Err(D::Error::custom(format!("unknown kernel order {t:?}")))
            }
            OrderField::Value(s) => {
                check_order(raw.dimension, s).map_err(D::Error::custom)?;
                KernelOrder::Fractional(s)
            }
        };
        let expected = (2 * raw.max_radius as usize + 1).pow(raw.dimension as u32);
        if raw.entries.len() != expected {
            return Err(D::Error::custom(format!(
                "expected {expected} entries for radius {}, found {}",
                raw.max_radius,
                raw.entries.len()
            )));
        }
        let mut orbits = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for e in raw.entries {
            if e.coords.len() != raw.dimension {
                return Err(D::Error::custom(
                    "entry has the wrong number of coordinates",
                ));
            }
            let p = LatticePoint::new(e.coords);
            if p.norm_inf() > raw.max_radius || !seen.insert(p.clone()) {
                return Err(D::Error::custom(format!(
                    "entry {p} is outside the box or repeated"
                )));
            }
            if !(e.value >= 0.0 && e.value.is_finite()) {
                return Err(D::Error::custom(format!(
                    "entry {p} must be a finite non-negative value"
                )));
            }
            if p.is_origin() && e.value != 0.0 {
                return Err(D::Error::custom("the origin entry must be 0"));
            }
            match orbits.insert(p.canonical(), e.value) {
                Some(prev) if prev != e.value => {
                    return Err(D::Error::custom(format!(
                        "entry {p} breaks the lattice symmetry"
                    )));
                }
                _ => {}
            }
        }
        Ok(KernelTable {
            dimension: raw.dimension,
            order,
            max_radius: raw.max_radius,
            quad: raw.quad,
            orbits,
        })
    }
}
