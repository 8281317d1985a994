//! Finitely supported real functions on the integer lattice.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{EntryOut, Sig17};

/// A point of Z^N.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(
            !coords.is_empty(),
            "lattice points need at least one coordinate"
        );
        LatticePoint(coords)
    }

    pub fn origin(dimension: usize) -> Self {
        Self::new(vec![0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm_inf(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn norm_l1(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dimension(), other.dimension());
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.dimension(), other.dimension());
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|c| -c).collect())
    }

    /// Representative of the orbit under coordinate permutations and sign flips:
    /// absolute values sorted ascending.
    pub fn canonical(&self) -> LatticePoint {
        let mut c: Vec<i64> = self.0.iter().map(|c| c.abs()).collect();
        c.sort_unstable();
        LatticePoint(c)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint::new(v)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Every point of the box `{m : |m|_inf <= radius}` in lexicographic order.
pub fn box_points(dimension: usize, radius: u64) -> impl Iterator<Item = LatticePoint> {
    let r = radius as i64;
    let side = 2 * radius + 1;
    let total = side.pow(dimension as u32);
    (0..total).map(move |mut idx| {
        let mut c = vec![0i64; dimension];
        for k in (0..dimension).rev() {
            c[k] = (idx % side) as i64 - r;
            idx /= side;
        }
        LatticePoint(c)
    })
}

/// A real function on Z^N (or on the mesh hZ when N = 1) with finite support.
///
/// Only non-zero values are stored; every other point evaluates to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dimension: usize,
    mesh: f64,
    values: BTreeMap<LatticePoint, f64>,
}

fn check_mesh(dimension: usize, mesh: f64) -> Result<()> {
    if dimension == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    if !(mesh > 0.0 && mesh.is_finite()) {
        return Err(Error::domain("mesh size must be positive", mesh));
    }
    if dimension > 1 && mesh != 1.0 {
        return Err(Error::domain("mesh size is fixed to 1 when N >= 2", mesh));
    }
    Ok(())
}

impl GridFunction {
    pub fn zero(dimension: usize, mesh: f64) -> Result<Self> {
        check_mesh(dimension, mesh)?;
        Ok(GridFunction {
            dimension,
            mesh,
            values: BTreeMap::new(),
        })
    }

    /// Build from (point, value) pairs. Repeated points are rejected.
    pub fn from_entries<I>(dimension: usize, mesh: f64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LatticePoint, f64)>,
    {
        let mut f = Self::zero(dimension, mesh)?;
        for (p, v) in entries {
            if p.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    left: dimension,
                    right: p.dimension(),
                });
            }
            if !v.is_finite() {
                return Err(Error::Invalid(format!("non-finite value {v} at {p}")));
            }
            if f.values.contains_key(&p) {
                return Err(Error::Invalid(format!("duplicate entry at {p}")));
            }
            if v != 0.0 {
                f.values.insert(p, v);
            }
        }
        Ok(f)
    }

    /// Internal constructor for operator outputs; drops zeros, values must be finite.
    pub(crate) fn from_map(
        dimension: usize,
        mesh: f64,
        mut values: BTreeMap<LatticePoint, f64>,
    ) -> Self {
        values.retain(|_, v| *v != 0.0);
        debug_assert!(values.values().all(|v| v.is_finite()));
        GridFunction {
            dimension,
            mesh,
            values,
        }
    }

    /// Indicator of a single point (unit mesh).
    pub fn delta(dimension: usize, point: LatticePoint) -> Self {
        assert_eq!(point.dimension(), dimension);
        let mut values = BTreeMap::new();
        values.insert(point, 1.0);
        GridFunction {
            dimension,
            mesh: 1.0,
            values,
        }
    }

    pub fn with_mesh(mut self, mesh: f64) -> Result<Self> {
        check_mesh(self.dimension, mesh)?;
        self.mesh = mesh;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn get(&self, p: &LatticePoint) -> f64 {
        self.values.get(p).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, f64)> {
        self.values.iter().map(|(p, v)| (p, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = &LatticePoint> {
        self.values.keys()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.values().map(|v| v.abs()).sum()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sum of `|f(n)| / (1 + |n|)^{N + 2s}` (exponent `1 + 2s` on Z).
    pub fn weighted_norm(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain("weighted norm order must lie in [0, 1]", s));
        }
        let exponent = self.dimension as f64 + 2.0 * s;
        Ok(self
            .values
            .iter()
            .map(|(p, v)| v.abs() / (1.0 + p.norm()).powf(exponent))
            .sum())
    }

    /// Largest sup-norm radius of the support, 0 for the zero function.
    pub fn support_radius(&self) -> u64 {
        self.values.keys().map(|p| p.norm_inf()).max().unwrap_or(0)
    }

    /// Largest sup-norm distance between two support points.
    pub fn support_diameter(&self) -> u64 {
        let mut lo = vec![i64::MAX; self.dimension];
        let mut hi = vec![i64::MIN; self.dimension];
        for p in self.values.keys() {
            for (k, &c) in p.coords().iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        lo.iter()
            .zip(&hi)
            .map(|(l, h)| if h >= l { (h - l) as u64 } else { 0 })
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        if self.mesh != other.mesh {
            return Err(Error::MeshMismatch {
                left: self.mesh,
                right: other.mesh,
            });
        }
        Ok(())
    }

    fn combine(&self, other: &GridFunction, sign: f64) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let mut values = self.values.clone();
        for (p, v) in &other.values {
            *values.entry(p.clone()).or_insert(0.0) += sign * v;
        }
        Ok(GridFunction::from_map(self.dimension, self.mesh, values))
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.combine(other, 1.0)
    }

    pub fn subtract(&self, other: &GridFunction) -> Result<GridFunction> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, c: f64) -> Result<GridFunction> {
        if !c.is_finite() {
            return Err(Error::Invalid(format!("non-finite scale factor {c}")));
        }
        let values = self
            .values
            .iter()
            .map(|(p, v)| (p.clone(), c * v))
            .collect();
        Ok(GridFunction::from_map(self.dimension, self.mesh, values))
    }

    pub fn translate(&self, shift: &LatticePoint) -> GridFunction {
        let values = self
            .values
            .iter()
            .map(|(p, v)| (p.add(shift), *v))
            .collect();
        GridFunction::from_map(self.dimension, self.mesh, values)
    }

    /// n -> f(-n)
    pub fn reflect(&self) -> GridFunction {
        let values = self.values.iter().map(|(p, v)| (p.neg(), *v)).collect();
        GridFunction::from_map(self.dimension, self.mesh, values)
    }

    /// max_n |f(n) - g(n)| over the union of supports.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        Ok(self.subtract(other)?.linf_norm())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid function serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("grid function JSON: {e}")))
    }

    /// `n_1,...,n_N,value` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.dimension {
            out.push_str(&format!("n_{k},"));
        }
        out.push_str("value\n");
        for (p, v) in &self.values {
            for c in p.coords() {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&Sig17(*v).text());
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct GridOut<'a> {
    dimension: usize,
    mesh: Sig17,
    entries: Vec<EntryOut<'a>>,
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        GridOut {
            dimension: self.dimension,
            mesh: Sig17(self.mesh),
            entries: self
                .values
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

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridIn {
    dimension: usize,
    #[serde(default = "unit_mesh")]
    mesh: f64,
    entries: Vec<EntryIn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryIn {
    coords: Vec<i64>,
    value: f64,
}

fn unit_mesh() -> f64 {
    1.0
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = GridIn::deserialize(deserializer)?;
        let entries = raw.entries.into_iter().map(|e| {
            if e.coords.is_empty() {
                Err(serde::de::Error::custom("entry with empty coords"))
            } else {
                Ok((LatticePoint(e.coords), e.value))
            }
        });
        let entries: std::result::Result<Vec<_>, D::Error> = entries.collect();
        GridFunction::from_entries(raw.dimension, raw.mesh, entries?)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec())
    }

    fn three_point() -> GridFunction {
        GridFunction::from_entries(
            1,
            1.0,
            vec![(pt(&[-1]), 1.0), (pt(&[0]), -2.0), (pt(&[4]), 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn delta_basics() {
        let d = GridFunction::delta(1, pt(&[0]));
        assert_eq!(d.get(&pt(&[0])), 1.0);
        assert_eq!(d.get(&pt(&[1])), 0.0);
        let d2 = GridFunction::delta(2, pt(&[1, -1]));
        assert_eq!(d2.get(&pt(&[1, -1])), 1.0);
        assert_eq!(d2.support_len(), 1);
        assert_eq!(d2.l1_norm(), 1.0);
        assert_eq!(d2.linf_norm(), 1.0);
    }

    #[test]
    fn norms() {
        let f = three_point();
        assert_eq!(f.l1_norm(), 6.0);
        assert_eq!(f.linf_norm(), 3.0);
        let d = GridFunction::delta(1, pt(&[0]));
        for s in [0.0, 0.3, 1.0] {
            assert_eq!(d.weighted_norm(s).unwrap(), 1.0);
        }
        let one = GridFunction::delta(1, pt(&[1]));
        assert_eq!(one.weighted_norm(0.5).unwrap(), 0.25);
        assert!(f.weighted_norm(0.2).unwrap() <= f.l1_norm());
        assert!(f.weighted_norm(1.5).is_err());
        assert!(f.weighted_norm(-0.1).is_err());
    }

    #[test]
    fn arithmetic() {
        let f = three_point();
        assert!(f.subtract(&f).unwrap().is_zero());
        assert!(f.scale(0.0).unwrap().is_zero());
        let two = GridFunction::delta(1, pt(&[0]))
            .add(&GridFunction::delta(1, pt(&[1])))
            .unwrap();
        assert_eq!(two.support_len(), 2);
        let pos =
            GridFunction::from_entries(1, 1.0, vec![(pt(&[3]), 0.5), (pt(&[7]), 2.0)]).unwrap();
        assert_eq!(pos.add(&pos).unwrap().l1_norm(), 2.0 * pos.l1_norm());
        let other = GridFunction::delta(2, pt(&[0, 0]));
        assert!(matches!(
            f.add(&other),
            Err(Error::DimensionMismatch { .. })
        ));
        let coarse = f.clone().with_mesh(0.5).unwrap();
        assert!(matches!(f.add(&coarse), Err(Error::MeshMismatch { .. })));
    }

    #[test]
    fn construction_validation() {
        assert!(GridFunction::zero(0, 1.0).is_err());
        assert!(GridFunction::zero(2, 0.5).is_err());
        assert!(GridFunction::zero(1, -1.0).is_err());
        assert!(GridFunction::from_entries(1, 1.0, vec![(pt(&[0]), f64::NAN)]).is_err());
        assert!(
            GridFunction::from_entries(1, 1.0, vec![(pt(&[0]), 1.0), (pt(&[0]), 2.0)]).is_err()
        );
        assert!(GridFunction::from_entries(1, 1.0, vec![(pt(&[0, 1]), 1.0)]).is_err());
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let f = GridFunction::from_entries(
            2,
            1.0,
            vec![
                (pt(&[1, 0]), 0.1),
                (pt(&[-1, 5]), 1.0 / 3.0),
                (pt(&[0, -2]), -7.5),
            ],
        )
        .unwrap();
        let text = f.to_json();
        let a = text.find("[\n        -1").unwrap();
        let b = text.find("[\n        0").unwrap();
        let c = text.find("[\n        1").unwrap();
        assert!(a < b && b < c, "{text}");
        assert_eq!(GridFunction::from_json(&text).unwrap(), f);
        assert!(GridFunction::from_json("{\"dimension\": 1, \"entries\": [").is_err());
        let csv = f.to_csv();
        assert!(csv.starts_with("n_1,n_2,value\n-1,5,"));
    }

    #[test]
    fn box_enumeration() {
        let pts: Vec<_> = box_points(2, 1).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], pt(&[-1, -1]));
        assert_eq!(pts[8], pt(&[1, 1]));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    fn arb_function() -> impl Strategy<Value = GridFunction> {
        prop::collection::btree_map(-20i64..20, -5.0f64..5.0, 0..12).prop_map(|m| {
            GridFunction::from_entries(1, 1.0, m.into_iter().map(|(k, v)| (pt(&[k]), v))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn norm_homogeneity(f in arb_function(), c in -4.0f64..4.0, s in 0.0f64..1.0) {
            let g = f.scale(c).unwrap();
            prop_assert!((g.l1_norm() - c.abs() * f.l1_norm()).abs() <= 1e-12 * (1.0 + f.l1_norm()));
            prop_assert!((g.linf_norm() - c.abs() * f.linf_norm()).abs() <= 1e-12 * (1.0 + f.linf_norm()));
            let (wg, wf) = (g.weighted_norm(s).unwrap(), f.weighted_norm(s).unwrap());
            prop_assert!((wg - c.abs() * wf).abs() <= 1e-12 * (1.0 + wf));
        }

        #[test]
        fn triangle_inequality(f in arb_function(), g in arb_function(), s in 0.0f64..1.0) {
            let h = f.add(&g).unwrap();
            let eps = 1e-12;
            prop_assert!(h.l1_norm() <= f.l1_norm() + g.l1_norm() + eps);
            prop_assert!(h.linf_norm() <= f.linf_norm() + g.linf_norm() + eps);
            prop_assert!(h.weighted_norm(s).unwrap() <= f.weighted_norm(s).unwrap() + g.weighted_norm(s).unwrap() + eps);
        }

        #[test]
        fn weighted_norm_non_increasing_in_order(f in arb_function(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f.weighted_norm(hi).unwrap() <= f.weighted_norm(lo).unwrap() + 1e-15);
        }

        #[test]
        fn json_round_trip(f in arb_function()) {
            prop_assert_eq!(GridFunction::from_json(&f.to_json()).unwrap(), f);
        }
    }
}
