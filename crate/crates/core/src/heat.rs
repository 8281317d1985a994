//! The semidiscrete heat kernel `G_{t,N}(m) = Π_k e^{-2t} I_{m_k}(2t)` and the
//! semigroup it generates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::{box_points, GridFunction, LatticePoint};
use crate::parallel::par_map;
use crate::special::{bessel_tail_order, scaled_bessel_i, scaled_bessel_i_sequence};

/// Values below this multiple of `linf_norm(f)` are dropped from semigroup output.
pub const SEMIGROUP_FLOOR: f64 = 1e-16;

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("heat kernel time must be positive", t))
    }
}

pub fn heat_kernel(t: f64, m: &LatticePoint) -> Result<f64> {
    check_time(t)?;
    m.coords()
        .iter()
        .try_fold(1.0, |acc, &c| Ok(acc * scaled_bessel_i(c, t)?))
}

/// Result of applying `W_t` together with the per-axis truncation radius used.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub function: GridFunction,
    pub radius: usize,
}

/// `W_t f(n) = Σ_m G_{t,N}(n - m) f(m)` by direct summation.
///
/// Output points lie within the tail-rule radius of the support (per axis);
/// values below `SEMIGROUP_FLOOR * linf_norm(f)` are omitted.
pub fn heat_semigroup_apply(f: &GridFunction, t: f64) -> Result<Evolved> {
    check_time(t)?;
    if f.mesh() != 1.0 {
        return Err(Error::domain(
            "the heat semigroup is defined on the unit lattice",
            f.mesh(),
        ));
    }
    let radius = bessel_tail_order(t);
    if f.is_zero() {
        return Ok(Evolved {
            function: f.clone(),
            radius,
        });
    }
    let seq = scaled_bessel_i_sequence(radius + f.support_diameter() as usize, t)?;
    let floor = SEMIGROUP_FLOOR * f.linf_norm();
    let support: Vec<(LatticePoint, f64)> = f.iter().map(|(p, v)| (p.clone(), v)).collect();

    let mut targets: Vec<LatticePoint> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (p, _) in &support {
        for d in box_points(f.dimension(), radius as u64) {
            let n = p.add(&d);
            if seen.insert(n.clone()) {
                targets.push(n);
            }
        }
    }
    drop(seen);

    let values = par_map(&targets, |n| {
        support.iter().fold(0.0, |acc, (m, v)| {
            let w: f64 = n
                .coords()
                .iter()
                .zip(m.coords())
                .map(|(a, b)| {
                    let d = (a - b).unsigned_abs() as usize;
                    if d <= radius {
                        seq[d]
                    } else {
                        0.0
                    }
                })
                .product();
            acc + w * v
        })
    });
    let map: BTreeMap<LatticePoint, f64> = targets
        .into_iter()
        .zip(values)
        .filter(|(_, v)| v.abs() >= floor)
        .collect();
    Ok(Evolved {
        function: GridFunction::from_map(f.dimension(), 1.0, map),
        radius,
    })
}

/// `|1 - Σ_{|m|_inf <= radius} G_{t,N}(m)|`, using the product structure of the kernel.
pub fn conservation_defect(t: f64, dimension: usize, radius: usize) -> Result<f64> {
    check_time(t)?;
    if dimension == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let seq = scaled_bessel_i_sequence(radius, t)?;
    let axis: f64 = seq[0] + 2.0 * seq[1..].iter().sum::<f64>();
    Ok((1.0 - axis.powi(dimension as i32)).abs())
}
