//! Gamma-family functions and exponentially scaled modified Bessel functions.
//!
//! Everything here works in double precision and never lets a NaN or an
//! infinity escape: Gamma quotients are formed from a cancellation-free
//! log-difference, and the Bessel values come out of a normalized backward
//! recurrence so no `exp(2t)` is ever formed.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_4;

#[allow(clippy::excessive_precision)]
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

/// Below this argument the Stirling series is not used directly.
const STIRLING_MIN: f64 = 15.0;
const DIGAMMA_ASYMPTOTIC_MIN: f64 = 10.0;

/// B_{2k} for k = 1..=8.
const BERNOULLI_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// zeta(k) - 1 for k = 2..=40.
#[allow(clippy::excessive_precision)]
const ZETA_MINUS_ONE: [f64; 39] = [
    0.644_934_066_848_226_436_47,
    0.202_056_903_159_594_285_4,
    0.082_323_233_711_138_191_516,
    0.036_927_755_143_369_926_331,
    0.017_343_061_984_449_139_715,
    0.008_349_277_381_922_826_839_8,
    0.004_077_356_197_944_339_378_7,
    0.002_008_392_826_082_214_417_9,
    0.000_994_575_127_818_085_337_15,
    0.000_494_188_604_119_464_558_7,
    0.000_246_086_553_308_048_298_64,
    0.000_122_713_347_578_489_146_75,
    6.124_813_505_870_482_925_9e-5,
    3.058_823_630_702_049_355_2e-5,
    1.528_225_940_865_187_173_3e-5,
    7.637_197_637_899_762_273_6e-6,
    3.817_293_264_999_839_856_5e-6,
    1.908_212_716_553_938_925_7e-6,
    9.539_620_338_727_961_131_5e-7,
    4.769_329_867_878_064_631_2e-7,
    2.384_505_027_277_329_9e-7,
    1.192_199_259_653_110_730_7e-7,
    5.960_818_905_125_947_961_2e-8,
    2.980_350_351_465_228_018_6e-8,
    1.490_155_482_836_504_123_5e-8,
    7.450_711_789_835_429_492e-9,
    3.725_334_024_788_457_054_8e-9,
    1.862_659_723_513_049_006_4e-9,
    9.313_274_324_196_681_828_7e-10,
    4.656_629_065_033_784_073e-10,
    2.328_311_833_676_505_492e-10,
    1.164_155_017_270_051_977_6e-10,
    5.820_772_087_902_700_889_2e-11,
    2.910_385_044_497_099_686_9e-11,
    1.455_192_189_104_198_423_6e-11,
    7.275_959_835_057_481_014_5e-12,
    3.637_979_547_378_651_190_2e-12,
    1.818_989_650_307_065_947_6e-12,
    9.094_947_840_263_889_282_5e-13,
];

#[inline]
pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

fn check_positive(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, x))
    }
}

/// Stirling correction `ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)]` for x >= 15.
fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut sum = 0.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        sum += b / (n * (n - 1.0)) * pow;
        pow *= inv2;
    }
    sum
}

/// ln Γ(1 + z) for |z| <= 1/2.
fn log_gamma_1p(z: f64) -> f64 {
    // pow carries (-z)^k
    let mut sum = 0.0;
    let mut pow = -z;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate() {
        pow *= -z;
        let k = (i + 2) as f64;
        sum += c * pow / k;
    }
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + sum
}

/// Natural log of the Gamma function for positive arguments.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma requires x > 0", x)?;
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        log_gamma_1p(x) - x.ln()
    } else if x <= 1.5 {
        log_gamma_1p(x - 1.0)
    } else if x <= 2.5 {
        let z = x - 2.0;
        log_gamma_1p(z) + z.ln_1p()
    } else if x < STIRLING_MIN {
        let n = (x - 2.5).ceil();
        let y = x - n;
        let mut prod = 1.0;
        let mut k = 0.0;
        while k < n {
            prod *= y + k;
            k += 1.0;
        }
        log_gamma_unchecked(y) + prod.ln()
    } else {
        (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_correction(x)
    }
}

/// Logarithmic derivative of Gamma.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma requires x > 0", x)?;
    let mut shift = 0.0;
    let mut y = x;
    while y < DIGAMMA_ASYMPTOTIC_MIN {
        shift += 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut pow = inv2;
    let mut series = 0.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        series += b / (2.0 * (k as f64 + 1.0)) * pow;
        pow *= inv2;
    }
    Ok(y.ln() - 0.5 / y - series - shift)
}

/// `ln Γ(x + d) - ln Γ(x)` without forming either log-Gamma when both
/// arguments are large; `d` enters only through `ln_1p(d / x)` and linear
/// terms, so the result keeps relative accuracy even for x ~ 1e6.
pub fn ln_gamma_ratio_shift(x: f64, d: f64) -> Result<f64> {
    check_positive("gamma ratio requires a positive denominator argument", x)?;
    if !d.is_finite() {
        return Err(Error::domain("gamma ratio offset must be finite", d));
    }
    check_positive("gamma ratio requires a positive numerator argument", x + d)?;
    Ok(ln_gamma_ratio_shift_unchecked(x, d))
}

fn ln_gamma_ratio_shift_unchecked(x: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let lo = x.min(x + d);
    if lo >= STIRLING_MIN {
        let a = x + d;
        return (a - 0.5) * (d / x).ln_1p() + d * (x.ln() - 1.0) + stirling_correction(a)
            - stirling_correction(x);
    }
    let n = (STIRLING_MIN - lo).ceil();
    let mut acc = 0.0;
    let mut k = 0.0;
    while k < n {
        acc += (d / (x + k)).ln_1p();
        k += 1.0;
    }
    ln_gamma_ratio_shift_unchecked(x + n, d) - acc
}

/// Γ(a) / Γ(b) evaluated in the log domain.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    check_positive("gamma_ratio requires a > 0", a)?;
    check_positive("gamma_ratio requires b > 0", b)?;
    let ln = ln_gamma_ratio_shift_unchecked(b, a - b);
    exp_checked(ln, "gamma_ratio")
}

/// Hurwitz zeta `Σ_{k>=0} (a + k)^{-σ}` for σ > 1 and a > 0.
pub fn hurwitz_zeta(sigma: f64, a: f64) -> Result<f64> {
    if !(sigma > 1.0 && sigma.is_finite()) {
        return Err(Error::domain("hurwitz_zeta requires sigma > 1", sigma));
    }
    check_positive("hurwitz_zeta requires a > 0", a)?;
    let shift = (20.0 - a).max(0.0).ceil() as usize;
    let mut sum = 0.0;
    for k in 0..shift {
        sum += (a + k as f64).powf(-sigma);
    }
    let b = a + shift as f64;
    sum += b.powf(1.0 - sigma) / (sigma - 1.0) + 0.5 * b.powf(-sigma);
    let mut rising = sigma;
    let mut pow = b.powf(-sigma - 1.0);
    let mut fact = 2.0;
    for (k, bern) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2 * (k + 1);
        sum += bern / fact * rising * pow;
        rising *= (sigma + n as f64 - 1.0) * (sigma + n as f64);
        pow /= b * b;
        fact *= ((n + 1) * (n + 2)) as f64;
    }
    Ok(sum)
}

pub(crate) fn exp_checked(ln: f64, what: &str) -> Result<f64> {
    let v = ln.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!(
            "{what}: exp({ln}) is not representable"
        )))
    }
}

/// Number of Bessel orders to keep when summing `e^{-2t} I_n(2t)` over n.
pub fn bessel_tail_order(t: f64) -> usize {
    let x = 2.0 * t;
    (x + 12.0 * x.sqrt() + 20.0).ceil() as usize
}

/// Below this time the power series is used instead of the recurrence.
const SERIES_T_MAX: f64 = 1e-6;
const RESCALE_AT: f64 = 1e250;

/// `e^{-2t} I_n(2t)` for n = 0..=max_order in one backward sweep.
pub fn scaled_bessel_i_sequence(max_order: usize, t: f64) -> Result<Vec<f64>> {
    check_positive("scaled Bessel function requires t > 0", t)?;
    if t < SERIES_T_MAX {
        return Ok((0..=max_order).map(|n| small_t_series(n, t)).collect());
    }
    Ok(miller(max_order, t))
}

/// `e^{-2t} I_n(2t)`; negative orders are folded by `I_{-n} = I_n`.
pub fn scaled_bessel_i(order: i64, t: f64) -> Result<f64> {
    let n = order.unsigned_abs() as usize;
    check_positive("scaled Bessel function requires t > 0", t)?;
    if t < SERIES_T_MAX {
        return Ok(small_t_series(n, t));
    }
    Ok(miller_single(n, t))
}

fn small_t_series(n: usize, t: f64) -> f64 {
    // e^{-2t} sum_j t^{2j+n} / (j! (j+n)!), log-domain leading factor
    let lead = n as f64 * t.ln() - log_gamma_unchecked(n as f64 + 1.0) - 2.0 * t;
    let t2 = t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..6 {
        let j = j as f64;
        term *= t2 / (j * (j + n as f64));
        sum += term;
    }
    lead.exp() * sum
}

fn recurrence_start(max_order: usize, t: f64) -> usize {
    let x = 2.0 * t + max_order as f64;
    max_order + (12.0 * x.sqrt()).ceil() as usize + 30
}

/// Backward recurrence `y_{k-1} = (k/t) y_k + y_{k+1}` normalized by
/// `y_0 + 2 sum y_k`, which equals `e^{2t}` times the scaled values.
fn miller(max_order: usize, t: f64) -> Vec<f64> {
    let start = recurrence_start(max_order, t);
    let mut stored = vec![0.0; max_order + 1];
    let mut stored_scale = vec![0u32; max_order + 1];
    let mut rescales = 0u32;
    let mut y_next = 0.0;
    let mut y = 1e-280;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= max_order {
            stored[k] = y;
            stored_scale[k] = rescales;
        }
        norm += 2.0 * y;
        let y_prev = (k as f64 / t) * y + y_next;
        y_next = y;
        y = y_prev;
        if y > RESCALE_AT {
            y /= RESCALE_AT;
            y_next /= RESCALE_AT;
            norm /= RESCALE_AT;
            rescales += 1;
        }
    }
    stored[0] = y;
    stored_scale[0] = rescales;
    norm += y;
    stored
        .iter()
        .zip(&stored_scale)
        .map(|(&v, &sc)| {
            let lag = rescales - sc;
            let mut v = v / norm;
            for _ in 0..lag {
                v /= RESCALE_AT;
                if v == 0.0 {
                    break;
                }
            }
            v
        })
        .collect()
}

fn miller_single(n: usize, t: f64) -> f64 {
    let start = recurrence_start(n, t);
    let mut rescales_at_n = 0u32;
    let mut at_n = 0.0;
    let mut rescales = 0u32;
    let mut y_next = 0.0;
    let mut y = 1e-280;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k == n {
            at_n = y;
            rescales_at_n = rescales;
        }
        norm += 2.0 * y;
        let y_prev = (k as f64 / t) * y + y_next;
        y_next = y;
        y = y_prev;
        if y > RESCALE_AT {
            y /= RESCALE_AT;
            y_next /= RESCALE_AT;
            norm /= RESCALE_AT;
            rescales += 1;
        }
    }
    norm += y;
    if n == 0 {
        return y / norm;
    }
    let mut v = at_n / norm;
    for _ in 0..(rescales - rescales_at_n) {
        v /= RESCALE_AT;
        if v == 0.0 {
            break;
        }
    }
    v
}
