//! Exact planar point–line incidences, rich lines, and the
//! Szemerédi–Trotter expression used as a reporting baseline.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{Float, FromPrimitive};

use crate::error::{Error, Result};
use crate::scalar::Exact;
use crate::sets::GroundSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarPoint<T> {
    pub x: T,
    pub y: T,
    pub weight: u64,
}

impl<T: Exact> PlanarPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        PlanarPoint { x, y, weight: 1 }
    }

    pub fn weighted(x: T, y: T, weight: u64) -> Self {
        PlanarPoint { x, y, weight }
    }
}

/// A line `a·x + b·y = c` in canonical form: `(a, b, c)` coprime integers
/// (in the scalar type) with the first nonzero of `(a, b)` positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanarLine<T> {
    coef: [T; 3],
    pub weight: u64,
}

impl<T: Exact> PlanarLine<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Domain("line needs (a, b) != (0, 0)".into()));
        }
        Ok(PlanarLine {
            coef: T::canonical_line([a, b, c]),
            weight: 1,
        })
    }

    pub fn with_weight(mut self, weight: u64) -> Self {
        self.weight = weight;
        self
    }

    /// The line through two distinct points.
    pub fn through(p: &PlanarPoint<T>, q: &PlanarPoint<T>) -> Result<Self> {
        let a = q.y.clone() - p.y.clone();
        let b = p.x.clone() - q.x.clone();
        let c = a.clone() * p.x.clone() + b.clone() * p.y.clone();
        Self::new(a, b, c)
    }

    pub fn coefficients(&self) -> &[T; 3] {
        &self.coef
    }

    pub fn key(&self) -> &[T; 3] {
        &self.coef
    }

    pub fn contains(&self, p: &PlanarPoint<T>) -> bool {
        let [a, b, c] = &self.coef;
        a.clone() * p.x.clone() + b.clone() * p.y.clone() == *c
    }
}

fn check_distinct<T: Exact>(points: &[PlanarPoint<T>], lines: &[PlanarLine<T>]) -> Result<()> {
    let mut seen = HashSet::with_capacity(points.len());
    for p in points {
        if !seen.insert((&p.x, &p.y)) {
            return Err(Error::Input(format!("duplicate point ({}, {})", p.x, p.y)));
        }
    }
    let mut seen = HashSet::with_capacity(lines.len());
    for l in lines {
        if !seen.insert(l.key()) {
            return Err(Error::Input(format!("duplicate line {:?}", l.key())));
        }
    }
    Ok(())
}

/// Counts incident pairs, either plainly or with weight `w(p)·w(l)`.
///
/// Points are bucketed by abscissa; each non-vertical line is evaluated once
/// per occupied column and each vertical line reads one column.
pub fn count_incidences<T: Exact>(
    points: &[PlanarPoint<T>],
    lines: &[PlanarLine<T>],
    weighted: bool,
) -> Result<u64> {
    check_distinct(points, lines)?;
    let mut columns: BTreeMap<&T, HashMap<&T, u64>> = BTreeMap::new();
    for p in points {
        let w = if weighted { p.weight } else { 1 };
        columns.entry(&p.x).or_default().insert(&p.y, w);
    }
    let mut total = 0u64;
    for l in lines {
        let lw = if weighted { l.weight } else { 1 };
        let [a, b, c] = l.coefficients();
        if b.is_zero() {
            if let Some(col) = c.try_divide(a).and_then(|x0| columns.get(&x0)) {
                total += lw * col.values().sum::<u64>();
            }
        } else {
            for (x, col) in &columns {
                let rhs = c.clone() - a.clone() * (*x).clone();
                if let Some(w) = rhs.try_divide(b).and_then(|y| col.get(&y)) {
                    total += lw * w;
                }
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichLine<T> {
    pub line: PlanarLine<T>,
    /// Number of input points on the line.
    pub count: usize,
}

/// All distinct lines spanned by at least `k ≥ 2` of the points, sorted by
/// canonical key.
pub fn rich_lines<T: Exact>(points: &[PlanarPoint<T>], k: usize) -> Result<Vec<RichLine<T>>> {
    if k < 2 {
        return Err(Error::Domain("rich lines need k >= 2".into()));
    }
    check_distinct(points, &[])?;
    let mut members: HashMap<[T; 3], Vec<usize>> = HashMap::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let l = PlanarLine::through(&points[i], &points[j])?;
            let e = members.entry(l.coef).or_default();
            e.push(i);
            e.push(j);
        }
    }
    let mut out: Vec<RichLine<T>> = members
        .into_iter()
        .filter_map(|(coef, mut idx)| {
            idx.sort_unstable();
            idx.dedup();
            (idx.len() >= k).then(|| RichLine {
                line: PlanarLine { coef, weight: 1 },
                count: idx.len(),
            })
        })
        .collect();
    out.sort_by(|a, b| a.line.coef.cmp(&b.line.coef));
    Ok(out)
}

/// Number of points of `X²` on a slope-one line `y − x = s` carrying at least
/// `k` points of `X²`.
pub fn fixed_direction_rich_count<T: Exact>(x: &GroundSet<T>, k: u64) -> u64 {
    let mut per_line: HashMap<T, u64> = HashMap::new();
    for a in x.iter() {
        for b in x.iter() {
            *per_line.entry(b.clone() - a.clone()).or_insert(0) += 1;
        }
    }
    per_line.values().filter(|&&c| c >= k).sum()
}

/// `M^{2/3}N^{2/3} + M + N`, computed as `cbrt(MN)² + M + N`.
pub fn st_bound<F: Float + FromPrimitive>(m: u64, n: u64) -> F {
    let m = F::from_u64(m).expect("representable");
    let n = F::from_u64(n).expect("representable");
    let c = (m * n).cbrt();
    c * c + m + n
}

/// `M²/k³ + M/k`: the bound on `k`-rich lines, constant 1.
pub fn st_rich_bound<F: Float + FromPrimitive>(m: u64, k: u64) -> F {
    let m = F::from_u64(m).expect("representable");
    let k = F::from_u64(k).expect("representable");
    m * m / (k * k * k) + m / k
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn grid3() -> Vec<PlanarPoint<i64>> {
        let mut v = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                v.push(PlanarPoint::new(x, y));
            }
        }
        v
    }

    fn naive<T: Exact>(points: &[PlanarPoint<T>], lines: &[PlanarLine<T>], weighted: bool) -> u64 {
        let mut t = 0;
        for p in points {
            for l in lines {
                if l.contains(p) {
                    t += if weighted { p.weight * l.weight } else { 1 };
                }
            }
        }
        t
    }

    #[test]
    fn grid_incidences() {
        let pts = grid3();
        let lines: Vec<_> = rich_lines(&pts, 3).unwrap().into_iter().map(|r| r.line).collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(count_incidences(&pts, &lines, false).unwrap(), 24);
        assert_eq!(naive(&pts, &lines, false), 24);
    }

    #[test]
    fn empty_inputs() {
        let pts = grid3();
        assert_eq!(count_incidences::<i64>(&pts, &[], false).unwrap(), 0);
        let l = PlanarLine::new(1i64, 0, 0).unwrap();
        assert_eq!(count_incidences(&[], &[l], true).unwrap(), 0);
    }

    #[test]
    fn weighted_single_incidence() {
        let p = PlanarPoint::weighted(1i64, 1, 3);
        let l = PlanarLine::new(1i64, -1, 0).unwrap().with_weight(2);
        assert_eq!(count_incidences(&[p.clone()], &[l.clone()], true).unwrap(), 6);
        assert_eq!(count_incidences(&[p], &[l], false).unwrap(), 1);
    }

    #[test]
    fn duplicates_rejected() {
        let p = PlanarPoint::new(0i64, 0);
        assert!(matches!(
            count_incidences(&[p.clone(), p], &[], false),
            Err(Error::Input(_))
        ));
        let l1 = PlanarLine::new(2i64, 4, 6).unwrap();
        let l2 = PlanarLine::new(-1i64, -2, -3).unwrap();
        assert_eq!(l1, l2);
        assert!(count_incidences(&[], &[l1, l2], false).is_err());
    }

    #[test]
    fn rich_line_counts() {
        let pts = grid3();
        assert_eq!(rich_lines(&pts, 3).unwrap().len(), 8);
        let all = rich_lines(&pts, 2).unwrap();
        assert_eq!(all.len(), 20);
        let pairs: usize = all.iter().map(|r| r.count * (r.count - 1) / 2).sum();
        assert_eq!(pairs, 36);
        assert!(rich_lines(&pts, 4).unwrap().is_empty());
        assert!(rich_lines(&pts, 1).is_err());
    }

    #[test]
    fn rational_lines_are_canonical() {
        type Q = BigRational;
        let q = |n: i64, d: i64| Q::new(n.into(), d.into());
        let l1 = PlanarLine::new(q(1, 2), q(1, 3), q(1, 1)).unwrap();
        let l2 = PlanarLine::new(q(-3, 1), q(-2, 1), q(-6, 1)).unwrap();
        assert_eq!(l1, l2);
        let p = PlanarPoint::new(q(2, 1), q(0, 1));
        assert!(l1.contains(&p));
        assert_eq!(count_incidences(&[p], &[l1], false).unwrap(), 1);
    }

    #[test]
    fn fixed_direction_examples() {
        let x = GroundSet::<i64>::from_ints(&[0, 1, 3]).unwrap();
        assert_eq!(fixed_direction_rich_count(&x, 1), 9);
        assert_eq!(fixed_direction_rich_count(&x, 3), 3);
        assert_eq!(fixed_direction_rich_count(&x, 4), 0);
    }

    #[test]
    fn st_bound_examples() {
        assert!((st_bound::<f64>(1, 1) - 3.0).abs() < 1e-12);
        assert!((st_bound::<f64>(8, 8) - 32.0).abs() < 1e-12);
        assert!((st_bound::<f64>(27, 8) - 71.0).abs() < 1e-12);
        assert!((st_bound::<f32>(8, 8) - 32.0).abs() < 1e-4);
    }
}
