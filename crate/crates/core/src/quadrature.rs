//! Adaptive Gauss–Kronrod (10/21 point) quadrature for vector-valued integrands.
//!
//! Every component shares the same panel tree so an expensive integrand (a Bessel
//! sequence per node) is evaluated once for all of them. A component has converged
//! when its summed error estimate is below `max(abs_tol, rel_tol * |I|)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::Sig17;

/// Kronrod abscissae on [-1, 1], descending; odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_937,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Hard cap on the number of live panels in one integration.
const MAX_PANELS: usize = 4000;

/// Settings for every improper integral over (0, ∞) in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Point in t where the integration range is split.
    pub split: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            split: 1.0,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 60,
        }
    }
}

impl QuadratureConfig {
    /// Defaults with the relative tolerance replaced.
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureConfig {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split.is_finite()) {
            return Err(Error::domain(
                "quadrature split must be positive",
                self.split,
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain(
                "relative tolerance must be positive",
                self.rel_tol,
            ));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(
                "absolute tolerance must be positive",
                self.abs_tol,
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Invalid("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

impl Serialize for QuadratureConfig {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            split: Sig17,
            rel_tol: Sig17,
            abs_tol: Sig17,
            max_subdivisions: usize,
        }
        Out {
            split: Sig17(self.split),
            rel_tol: Sig17(self.rel_tol),
            abs_tol: Sig17(self.abs_tol),
            max_subdivisions: self.max_subdivisions,
        }
        .serialize(serializer)
    }
}

/// Integral values with their error estimates, one per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

struct Panel {
    a: f64,
    b: f64,
    depth: usize,
    values: Vec<f64>,
    errors: Vec<f64>,
    score: f64,
}

/// One Gauss–Kronrod panel; `scratch` must hold 21 * dim values.
fn gk21<F>(f: &mut F, a: f64, b: f64, dim: usize, scratch: &mut [f64]) -> (Vec<f64>, Vec<f64>)
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    f(center, &mut scratch[..dim]);
    for j in 0..10 {
        let dx = half * XGK[j];
        let (lo, hi) = scratch[dim * (1 + 2 * j)..dim * (3 + 2 * j)].split_at_mut(dim);
        f(center - dx, lo);
        f(center + dx, hi);
    }
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    for i in 0..dim {
        let fc = scratch[i];
        let mut resk = WGK[10] * fc;
        let mut resg = 0.0;
        let mut resabs = WGK[10] * fc.abs();
        for j in 0..10 {
            let f1 = scratch[dim * (1 + 2 * j) + i];
            let f2 = scratch[dim * (2 + 2 * j) + i];
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            let f1 = scratch[dim * (1 + 2 * j) + i];
            let f2 = scratch[dim * (2 + 2 * j) + i];
            resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let (resk, resg, resabs, resasc) = (
            resk * half,
            resg * half,
            resabs * half.abs(),
            resasc * half.abs(),
        );
        let mut err = (resk - resg).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        values[i] = resk;
        errors[i] = err;
    }
    (values, errors)
}

fn tolerances(totals: &[f64], cfg: &QuadratureConfig) -> Vec<f64> {
    totals
        .iter()
        .map(|v| cfg.abs_tol.max(cfg.rel_tol * v.abs()))
        .collect()
}

fn score(errors: &[f64], tol: &[f64]) -> f64 {
    errors.iter().zip(tol).fold(0.0, |m, (e, t)| m.max(e / t))
}

/// Integrate a vector-valued function over `[breaks[0], breaks.last()]`, starting from
/// one panel per consecutive pair of break points.
pub fn integrate_vec<F>(
    f: F,
    breaks: &[f64],
    dim: usize,
    cfg: &QuadratureConfig,
) -> Result<Integral>
where
    F: FnMut(f64, &mut [f64]),
{
    integrate_vec_located(f, breaks, dim, cfg).map_err(|(_, e)| e)
}

/// As [`integrate_vec`], but a convergence failure also reports the worst component.
pub(crate) fn integrate_vec_located<F>(
    mut f: F,
    breaks: &[f64],
    dim: usize,
    cfg: &QuadratureConfig,
) -> std::result::Result<Integral, (usize, Error)>
where
    F: FnMut(f64, &mut [f64]),
{
    cfg.validate().map_err(|e| (0, e))?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err((
            0,
            Error::Invalid("quadrature break points must be strictly increasing".into()),
        ));
    }
    let mut scratch = vec![0.0; 21 * dim];
    let mut panels = Vec::with_capacity(breaks.len() * 4);
    let mut totals = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    for w in breaks.windows(2) {
        let (values, errors) = gk21(&mut f, w[0], w[1], dim, &mut scratch);
        for i in 0..dim {
            totals[i] += values[i];
            total_err[i] += errors[i];
        }
        panels.push(Panel {
            a: w[0],
            b: w[1],
            depth: 0,
            values,
            errors,
            score: 0.0,
        });
    }
    let mut tol = tolerances(&totals, cfg);
    for p in panels.iter_mut() {
        p.score = score(&p.errors, &tol);
    }
    loop {
        if total_err.iter().zip(&tol).all(|(e, t)| e <= t) {
            return Ok(Integral {
                values: totals,
                errors: total_err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < cfg.max_subdivisions)
            .max_by(|x, y| x.1.score.total_cmp(&y.1.score))
            .map(|(k, _)| k);
        let k = match worst {
            Some(k) if panels.len() < MAX_PANELS && panels[k].score > 0.0 => k,
            _ => {
                let (i, _) = total_err
                    .iter()
                    .zip(&tol)
                    .enumerate()
                    .max_by(|x, y| (x.1 .0 / x.1 .1).total_cmp(&(y.1 .0 / y.1 .1)))
                    .expect("at least one component");
                return Err((
                    i,
                    Error::Quadrature {
                        estimate: total_err[i],
                        tolerance: tol[i],
                        context: String::new(),
                    },
                ));
            }
        };
        let parent = panels.swap_remove(k);
        let mid = 0.5 * (parent.a + parent.b);
        for i in 0..dim {
            totals[i] -= parent.values[i];
            total_err[i] -= parent.errors[i];
        }
        let children = [(parent.a, mid), (mid, parent.b)];
        let mut fresh = Vec::with_capacity(2);
        for (a, b) in children {
            let (values, errors) = gk21(&mut f, a, b, dim, &mut scratch);
            for i in 0..dim {
                totals[i] += values[i];
                total_err[i] += errors[i];
            }
            fresh.push(Panel {
                a,
                b,
                depth: parent.depth + 1,
                values,
                errors,
                score: 0.0,
            });
        }
        for e in total_err.iter_mut() {
            *e = e.max(0.0);
        }
        tol = tolerances(&totals, cfg);
        for mut p in fresh {
            p.score = score(&p.errors, &tol);
            panels.push(p);
        }
    }
}

/// Scalar convenience wrapper around [`integrate_vec`] on a single interval.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), &[a, b], 1, cfg)?;
    Ok((r.values[0], r.errors[0]))
}

/// Break points from `a` to `b` no more than `max_width` apart, with `extra` points inserted.
pub(crate) fn break_points(a: f64, b: f64, max_width: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    pts.sort_by(f64::total_cmp);
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let n = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * k as f64 / n as f64
            });
        }
    }
    out.dedup();
    out
}
