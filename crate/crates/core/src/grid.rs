//! Cartesian grids `A×B`, exact triangle areas, the plane family `H` with
//! multiplicities, rich/poor classification, horizontal slices and the
//! projection along `(1,1,1)`.
//!
//! A triangle with vertices `(a,x), (b,y), (c,z)` has twice-signed-area
//! `(c−b)x + (a−c)y + (b−a)z`. For a fixed abscissa triple `p = (a,b,c)` the
//! ordinate triples realising area `s` with positive orientation are the
//! points of `B³` on the plane `h(p): (c−b)x + (a−c)y + (b−a)z = 2s`. Every
//! plane contains the direction `(1,1,1)` and `h(p) = h(p')` exactly when
//! `p' − p ∈ (1,1,1)ℝ`, so a plane is keyed by the difference pair
//! `(b−a, c−a)`, and the number of triples sharing a key is the multiplicity
//! `w(p) = |(A−a) ∩ (A−b) ∩ (A−c)|`.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::emit::Tabular;
use crate::incidence::{PlanarLine, PlanarPoint};
use crate::scalar::Exact;
use crate::sets::GroundSet;

/// Default point-count limit for the cubic brute-force counter.
pub const BRUTE_FORCE_GUARD: usize = 1500;

/// Default limit on `|A|³·|B|²`, the work estimate of the incidence counter.
pub const INCIDENCE_GUARD: u128 = 1 << 34;

/// Largest coordinate magnitude admitted by the `i64` fast path.
const INT_COORD_LIMIT: i64 = 1 << 28;
const INT_AREA_LIMIT: i64 = 1 << 60;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid<T> {
    pub a: GroundSet<T>,
    pub b: GroundSet<T>,
    /// Twice the target area; the right-hand side of every plane equation.
    area2: T,
}

impl<T: Exact> Grid<T> {
    /// Grid with target area `s > 0`; `2s` must be representable in `T`.
    pub fn new(a: GroundSet<T>, b: GroundSet<T>, target_area: &BigRational) -> Result<Self> {
        let area2 = T::from_rational(&(target_area * BigRational::from_integer(2.into())))
            .ok_or_else(|| {
                Error::Config(format!(
                    "twice the target area {target_area} is not representable in this scalar type"
                ))
            })?;
        Self::with_area2(a, b, area2)
    }

    pub fn with_area2(a: GroundSet<T>, b: GroundSet<T>, area2: T) -> Result<Self> {
        if !area2.is_positive() {
            return Err(Error::Domain("target area must be positive".into()));
        }
        Ok(Grid { a, b, area2 })
    }

    pub fn unit(a: GroundSet<T>, b: GroundSet<T>) -> Self {
        Grid {
            a,
            b,
            area2: T::from_i64(2),
        }
    }

    pub fn area2(&self) -> &T {
        &self.area2
    }

    pub fn target_area(&self) -> BigRational {
        self.area2.to_rational() / BigRational::from_integer(2.into())
    }

    /// Number of grid points `|A|·|B|`.
    pub fn n(&self) -> usize {
        self.a.len() * self.b.len()
    }

    pub fn points(&self) -> Vec<(T, T)> {
        self.a
            .iter()
            .flat_map(|x| self.b.iter().map(move |y| (x.clone(), y.clone())))
            .collect()
    }

    /// An equivalent integer grid: each axis translated to start at 0 and
    /// scaled by the lcm of its denominators, with the target scaled to match.
    /// Unit-area counts, multiplicities and the rich/poor classes are
    /// invariant under these maps.
    pub fn integer_image(&self) -> IntegerImage {
        fn normalize<T: Exact>(s: &GroundSet<T>) -> (Vec<BigInt>, BigInt) {
            let q: Vec<BigRational> = s.iter().map(|x| x.to_rational()).collect();
            let lcm = q.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let lo = q[0].clone();
            let scale = BigRational::from_integer(lcm.clone());
            let ints = q.iter().map(|v| ((v - &lo) * &scale).to_integer()).collect();
            (ints, lcm)
        }
        let (ia, la) = normalize(&self.a);
        let (ib, lb) = normalize(&self.b);
        let area2 = self.area2.to_rational() * BigRational::from_integer(la * lb);
        if !area2.is_integer() {
            return IntegerImage::NoSolutions;
        }
        let to_i64 = |v: &[BigInt]| -> Option<Vec<i64>> {
            v.iter()
                .map(|x| x.to_i64().filter(|&x| x <= INT_COORD_LIMIT))
                .collect()
        };
        let (Some(ia), Some(ib)) = (to_i64(&ia), to_i64(&ib)) else {
            return IntegerImage::Overflow;
        };
        let Some(area2) = area2.to_integer().to_i64().filter(|&x| x <= INT_AREA_LIMIT) else {
            return IntegerImage::Overflow;
        };
        let a = GroundSet::new(ia).expect("order preserved");
        let b = GroundSet::new(ib).expect("order preserved");
        IntegerImage::Grid(Grid { a, b, area2 })
    }
}

pub enum IntegerImage {
    Grid(Grid<i64>),
    /// The scaled target is not an integer, so no lattice triangle attains it.
    NoSolutions,
    Overflow,
}

/// Twice the signed area of the triangle `p1 p2 p3`; zero iff collinear.
pub fn triangle_area2<T: Exact>(p1: &(T, T), p2: &(T, T), p3: &(T, T)) -> T {
    (p2.0.clone() - p1.0.clone()) * (p3.1.clone() - p1.1.clone())
        - (p3.0.clone() - p1.0.clone()) * (p2.1.clone() - p1.1.clone())
}

/// Counts unordered point triples with `|2·area| = 2s` by direct enumeration.
/// `guard` caps the number of grid points (`None` disables the cap).
pub fn count_unit_triangles_bruteforce<T: Exact>(g: &Grid<T>, guard: Option<usize>) -> Result<u64> {
    let pts = g.points();
    if let Some(limit) = guard {
        if pts.len() > limit {
            return Err(Error::Resource(format!(
                "brute-force counter limited to {limit} points, grid has {}",
                pts.len()
            )));
        }
    }
    let target = g.area2();
    let mut count = 0u64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for l in j + 1..pts.len() {
                if triangle_area2(&pts[i], &pts[j], &pts[l]).abs() == *target {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Multiplicity of every difference key `(b−a, c−a)` of `X³`, sorted by key.
/// The diagonal key `(0, 0)` is included with multiplicity `|X|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityTable<T> {
    entries: Vec<((T, T), u64)>,
}

impl<T: Exact> MultiplicityTable<T> {
    pub fn build(x: &GroundSet<T>) -> Self {
        let mut map: HashMap<(T, T), u64> = HashMap::new();
        for a in x.iter() {
            for b in x.iter() {
                let u = b.clone() - a.clone();
                for c in x.iter() {
                    *map.entry((u.clone(), c.clone() - a.clone())).or_insert(0) += 1;
                }
            }
        }
        let mut entries: Vec<_> = map.into_iter().collect();
        entries.sort_by(|p, q| p.0.cmp(&q.0));
        MultiplicityTable { entries }
    }

    pub fn get(&self, key: &(T, T)) -> u64 {
        self.entries
            .binary_search_by(|e| e.0.cmp(key))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &((T, T), u64)> {
        self.entries.iter()
    }

    /// Keys other than the diagonal `(0, 0)`.
    pub fn planes(&self) -> impl Iterator<Item = &((T, T), u64)> {
        self.entries
            .iter()
            .filter(|((u, v), _)| !(u.is_zero() && v.is_zero()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `h(p)`: the plane `(c−b)x + (a−c)y + (b−a)z = 2s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneH<T> {
    key: (T, T),
    coef: [T; 3],
    rhs: T,
}

impl<T: Exact> PlaneH<T> {
    fn from_key(u: T, v: T, rhs: T) -> Self {
        let coef = [v.clone() - u.clone(), -v.clone(), u.clone()];
        PlaneH {
            key: (u, v),
            coef,
            rhs,
        }
    }

    pub fn coefficients(&self) -> &[T; 3] {
        &self.coef
    }

    pub fn rhs(&self) -> &T {
        &self.rhs
    }

    /// `(b−a, c−a)` of any representative triple.
    pub fn key(&self) -> &(T, T) {
        &self.key
    }

    /// Diagonal triples give `0 = 2s`, which no point satisfies.
    pub fn is_degenerate(&self) -> bool {
        self.coef.iter().all(Zero::is_zero)
    }

    pub fn contains(&self, q: &[T; 3]) -> bool {
        !self.is_degenerate()
            && self.coef[0].clone() * q[0].clone()
                + self.coef[1].clone() * q[1].clone()
                + self.coef[2].clone() * q[2].clone()
                == self.rhs
    }
}

pub fn plane_of<T: Exact>(p: &[T; 3], area2: &T) -> PlaneH<T> {
    PlaneH::from_key(
        p[1].clone() - p[0].clone(),
        p[2].clone() - p[0].clone(),
        area2.clone(),
    )
}

/// `|(p + (1,1,1)ℝ) ∩ X³| = |(X−p₁) ∩ (X−p₂) ∩ (X−p₃)|`.
pub fn multiplicity<T: Exact>(p: &[T; 3], x: &GroundSet<T>) -> Result<u64> {
    if let Some(bad) = p.iter().find(|c| !x.contains(c)) {
        return Err(Error::Domain(format!("coordinate {bad} is not in the ground set")));
    }
    Ok(x.iter()
        .filter(|e| {
            let t = (*e).clone() - p[0].clone();
            x.contains(&(p[1].clone() + t.clone())) && x.contains(&(p[2].clone() + t))
        })
        .count() as u64)
}

/// Distinct non-degenerate planes of `H` for the abscissa set of `g`, with
/// multiplicities, sorted by key.
pub fn plane_family<T: Exact>(g: &Grid<T>) -> Vec<(PlaneH<T>, u64)> {
    MultiplicityTable::build(&g.a)
        .planes()
        .map(|((u, v), w)| (PlaneH::from_key(u.clone(), v.clone(), g.area2.clone()), *w))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichPoints<T> {
    pub count: u64,
    pub points: Option<Vec<[T; 3]>>,
}

/// Triples of `X³` with multiplicity at least `k`.
pub fn rich_points<T: Exact>(x: &GroundSet<T>, k: u64, enumerate: bool) -> RichPoints<T> {
    let table = MultiplicityTable::build(x);
    let count = table.iter().filter(|(_, w)| *w >= k).map(|(_, w)| w).sum();
    let points = enumerate.then(|| {
        let mut v: Vec<[T; 3]> = table
            .iter()
            .filter(|(_, w)| *w >= k)
            .flat_map(|((u, v), _)| {
                x.iter().filter_map(move |a| {
                    let b = a.clone() + u.clone();
                    let c = a.clone() + v.clone();
                    (x.contains(&b) && x.contains(&c)).then(|| [a.clone(), b, c])
                })
            })
            .collect();
        v.sort();
        v
    });
    RichPoints { count, points }
}

/// `|{(p₁, p₂) : (p₁, p₂, p₃) is k-rich for some p₃}|`.
pub fn project_rich<T: Exact>(x: &GroundSet<T>, k: u64) -> u64 {
    let table = MultiplicityTable::build(x);
    let mut seen: HashSet<(T, T)> = HashSet::new();
    for ((u, v), w) in table.iter() {
        if *w < k {
            continue;
        }
        for a in x.iter() {
            let b = a.clone() + u.clone();
            if x.contains(&b) && x.contains(&(a.clone() + v.clone())) {
                seen.insert((a.clone(), b));
            }
        }
    }
    seen.len() as u64
}

/// Enumerates the solutions in `B³` of `c₀x + c₁y + c₂z = rhs`, where not all
/// coefficients vanish, passing index triples into `B`.
///
/// One variable with a nonzero coefficient is solved for; for each value of
/// the outer variable the inner variable is swept in order while a pointer
/// tracks the solved variable, which moves monotonically.
fn for_each_solution<T: Exact>(coef: &[T; 3], rhs: &T, b: &[T], mut visit: impl FnMut([usize; 3])) {
    let s = if !coef[1].is_zero() {
        1
    } else if !coef[0].is_zero() {
        0
    } else {
        2
    };
    debug_assert!(!coef[s].is_zero());
    let (o, i) = match s {
        0 => (2, 1),
        1 => (2, 0),
        _ => (1, 0),
    };
    let flip = coef[s].is_negative();
    let norm = |c: &T| if flip { -c.clone() } else { c.clone() };
    let (cs, ci, co, rhs) = (norm(&coef[s]), norm(&coef[i]), norm(&coef[o]), norm(rhs));
    let scaled = |c: &T| -> Vec<T> { b.iter().map(|v| c.clone() * v.clone()).collect() };
    let (cs_b, ci_b, co_b) = (scaled(&cs), scaled(&ci), scaled(&co));
    let len = b.len();
    let forward = !ci.is_positive();
    let mut idx = [0usize; 3];
    for (oz, co_v) in co_b.iter().enumerate() {
        idx[o] = oz;
        let t = rhs.clone() - co_v.clone();
        if forward {
            let mut j = 0usize;
            for (ix, ci_v) in ci_b.iter().enumerate() {
                let target = t.clone() - ci_v.clone();
                while j < len && cs_b[j] < target {
                    j += 1;
                }
                if j == len {
                    break;
                }
                if cs_b[j] == target {
                    idx[i] = ix;
                    idx[s] = j;
                    visit(idx);
                }
            }
        } else {
            let mut j = len;
            for (ix, ci_v) in ci_b.iter().enumerate() {
                let target = t.clone() - ci_v.clone();
                while j > 0 && cs_b[j - 1] > target {
                    j -= 1;
                }
                if j == 0 {
                    break;
                }
                if cs_b[j - 1] == target {
                    idx[i] = ix;
                    idx[s] = j - 1;
                    visit(idx);
                }
            }
        }
    }
}

/// Number of points of `B³` on `plane`.
pub fn plane_point_count<T: Exact>(plane: &PlaneH<T>, b: &GroundSet<T>) -> u64 {
    if plane.is_degenerate() {
        return 0;
    }
    let mut n = 0;
    for_each_solution(plane.coefficients(), plane.rhs(), b.as_slice(), |_| n += 1);
    n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IncidenceCount {
    /// Ordered solutions `((a,b,c), (x,y,z)) ∈ A³×B³` of the plane equation.
    pub ordered: u64,
    /// Unordered unit-area triangles, `ordered / 3`.
    pub triangles: u64,
}

fn work_estimate<T: Exact>(g: &Grid<T>) -> u128 {
    let (a, b) = (g.a.len() as u128, g.b.len() as u128);
    a * a * a * b * b
}

fn check_incidence_guard<T: Exact>(g: &Grid<T>, guard: Option<u128>) -> Result<()> {
    if let Some(limit) = guard {
        let w = work_estimate(g);
        if w > limit {
            return Err(Error::Resource(format!(
                "incidence counter work |A|^3|B|^2 = {w} exceeds guard {limit}"
            )));
        }
    }
    Ok(())
}

fn thirds(label: &str, v: u64) -> Result<u64> {
    if v % 3 != 0 {
        return Err(Error::Assertion(format!(
            "{label}: ordered solution count {v} is not divisible by 3"
        )));
    }
    Ok(v / 3)
}

/// Counts unit-area triangles through incidences between `B³` and the planes
/// of `H`, each distinct plane counted once and weighted by its multiplicity.
pub fn count_unit_triangles_incidence<T: Exact>(g: &Grid<T>) -> Result<IncidenceCount> {
    let table = MultiplicityTable::build(&g.a);
    let planes: Vec<_> = table.planes().collect();
    let b = g.b.as_slice();
    let ordered: u64 = planes
        .par_iter()
        .map(|((u, v), w)| {
            let plane = PlaneH::from_key(u.clone(), v.clone(), g.area2.clone());
            let mut n = 0u64;
            for_each_solution(plane.coefficients(), plane.rhs(), b, |_| n += 1);
            n * w
        })
        .sum();
    Ok(IncidenceCount {
        ordered,
        triangles: thirds("incidence counter", ordered)?,
    })
}

/// Unit-area triangle count through the incidence counter, using the `i64`
/// integer image when it exists.
pub fn count_unit_triangles<T: Exact>(g: &Grid<T>, guard: Option<u128>) -> Result<IncidenceCount> {
    check_incidence_guard(g, guard)?;
    match g.integer_image() {
        IntegerImage::Grid(ig) => count_unit_triangles_incidence(&ig),
        IntegerImage::NoSolutions => Ok(IncidenceCount {
            ordered: 0,
            triangles: 0,
        }),
        IntegerImage::Overflow => count_unit_triangles_incidence(g),
    }
}

/// Unit-area triangles having two vertices with a common abscissa.
pub fn count_equal_abscissa_triangles<T: Exact>(g: &Grid<T>) -> Result<u64> {
    let table = MultiplicityTable::build(&g.a);
    let b = g.b.as_slice();
    let mut ordered = 0;
    for ((u, v), w) in table.planes() {
        if !(u.is_zero() || v.is_zero() || u == v) {
            continue;
        }
        let plane = PlaneH::from_key(u.clone(), v.clone(), g.area2.clone());
        let mut n = 0u64;
        for_each_solution(plane.coefficients(), plane.rhs(), b, |_| n += 1);
        ordered += n * w;
    }
    thirds("equal-abscissa counter", ordered)
}

/// Unit-area triangle counts split by the richness of the abscissa triple
/// (first letter) and the ordinate triple (second letter).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecompositionCounts {
    pub rr: u64,
    pub rp: u64,
    pub pr: u64,
    pub pp: u64,
    pub total: u64,
    pub k: u64,
}

impl Tabular for DecompositionCounts {
    fn header(&self) -> Vec<&'static str> {
        vec!["k", "rr", "rp", "pr", "pp", "total"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        vec![[self.k, self.rr, self.rp, self.pr, self.pp, self.total]
            .iter()
            .map(u64::to_string)
            .collect()]
    }
}

/// Dense multiplicity lookup for index triples of `X³`.
struct DenseMultiplicity {
    len: usize,
    w: Vec<u32>,
}

impl DenseMultiplicity {
    fn build<T: Exact>(x: &GroundSet<T>) -> Self {
        let table = MultiplicityTable::build(x);
        let e = x.as_slice();
        let len = e.len();
        let mut w = vec![0u32; len * len * len];
        for (ia, a) in e.iter().enumerate() {
            for (ib, b) in e.iter().enumerate() {
                let u = b.clone() - a.clone();
                for (ic, c) in e.iter().enumerate() {
                    let key = (u.clone(), c.clone() - a.clone());
                    w[(ia * len + ib) * len + ic] = table.get(&key) as u32;
                }
            }
        }
        DenseMultiplicity { len, w }
    }

    fn get(&self, idx: [usize; 3]) -> u64 {
        self.w[(idx[0] * self.len + idx[1]) * self.len + idx[2]] as u64
    }
}

/// Assigns every unit-area triangle to one of the four richness classes.
pub fn classify_triangles<T: Exact>(g: &Grid<T>, k: u64) -> Result<DecompositionCounts> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let table = MultiplicityTable::build(&g.a);
    let planes: Vec<_> = table.planes().collect();
    let wb = DenseMultiplicity::build(&g.b);
    let b = g.b.as_slice();
    let ordered = planes
        .par_iter()
        .map(|((u, v), w)| {
            let plane = PlaneH::from_key(u.clone(), v.clone(), g.area2.clone());
            let a_rich = *w >= k;
            let mut acc = [0u64; 4];
            for_each_solution(plane.coefficients(), plane.rhs(), b, |idx| {
                let b_rich = wb.get(idx) >= k;
                let slot = match (a_rich, b_rich) {
                    (true, true) => 0,
                    (true, false) => 1,
                    (false, true) => 2,
                    (false, false) => 3,
                };
                acc[slot] += *w;
            });
            acc
        })
        .reduce(|| [0u64; 4], |x, y| [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]);
    let rr = thirds("rich-rich", ordered[0])?;
    let rp = thirds("rich-poor", ordered[1])?;
    let pr = thirds("poor-rich", ordered[2])?;
    let pp = thirds("poor-poor", ordered[3])?;
    Ok(DecompositionCounts {
        rr,
        rp,
        pr,
        pp,
        total: rr + rp + pr + pp,
        k,
    })
}

/// Ordered rich-rich solutions `(p, q)` with `p₁ ≠ p₂`.
pub fn rich_rich_distinct_abscissae<T: Exact>(g: &Grid<T>, k: u64) -> u64 {
    let table = MultiplicityTable::build(&g.a);
    let planes: Vec<_> = table
        .planes()
        .filter(|((u, _), w)| !u.is_zero() && *w >= k)
        .collect();
    let wb = DenseMultiplicity::build(&g.b);
    let b = g.b.as_slice();
    planes
        .par_iter()
        .map(|((u, v), w)| {
            let plane = PlaneH::from_key(u.clone(), v.clone(), g.area2.clone());
            let mut n = 0u64;
            for_each_solution(plane.coefficients(), plane.rhs(), b, |idx| {
                if wb.get(idx) >= k {
                    n += 1;
                }
            });
            n * w
        })
        .sum()
}

/// [`classify_triangles`] on the integer image when it exists.
pub fn classify<T: Exact>(g: &Grid<T>, k: u64, guard: Option<u128>) -> Result<DecompositionCounts> {
    check_incidence_guard(g, guard)?;
    match g.integer_image() {
        IntegerImage::Grid(ig) => classify_triangles(&ig, k),
        IntegerImage::NoSolutions => Ok(DecompositionCounts {
            k,
            ..Default::default()
        }),
        IntegerImage::Overflow => classify_triangles(g, k),
    }
}

/// Dyadic index `i` with `2^{i−1} ≤ w < 2^i`.
pub fn dyadic_index(w: u64) -> u32 {
    debug_assert!(w > 0);
    64 - w.leading_zeros()
}

/// Number of dyadic classes covering multiplicities below `k`: `⌈log₂ k⌉`.
pub fn dyadic_class_count(k: u64) -> u32 {
    if k <= 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicClass<T> {
    pub i: u32,
    /// Members with their multiplicities.
    pub members: Vec<(T, u64)>,
}

impl<T> DyadicClass<T> {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.members.iter().map(|m| m.1).sum()
    }
}

impl<T: Exact> DyadicClass<[T; 3]> {
    /// Number of distinct `(1,1,1)`-lines through the member triples.
    pub fn line_count(&self) -> usize {
        self.members
            .iter()
            .map(|(q, _)| (q[1].clone() - q[0].clone(), q[2].clone() - q[0].clone()))
            .collect::<HashSet<_>>()
            .len()
    }
}

/// The `k`-poor distinct planes of `H` split into `H_i`, `i = 1..⌈log₂k⌉`.
/// Checks `|H_i| ≤ |A|³/2^{i−1}` exactly.
pub fn dyadic_plane_classes<T: Exact>(g: &Grid<T>, k: u64) -> Result<Vec<DyadicClass<PlaneH<T>>>> {
    if k < 2 {
        return Err(Error::Domain("dyadic classes need k >= 2".into()));
    }
    let count = dyadic_class_count(k);
    let mut classes: Vec<DyadicClass<PlaneH<T>>> = (1..=count)
        .map(|i| DyadicClass {
            i,
            members: Vec::new(),
        })
        .collect();
    for (plane, w) in plane_family(g) {
        if w < k {
            classes[dyadic_index(w) as usize - 1].members.push((plane, w));
        }
    }
    let cube = (g.a.len() as u128).pow(3);
    for c in &classes {
        if (c.size() as u128) << (c.i - 1) > cube {
            return Err(Error::Assertion(format!(
                "|H_{}| = {} exceeds |A|^3/2^{}",
                c.i,
                c.size(),
                c.i - 1
            )));
        }
    }
    Ok(classes)
}

/// The `k`-poor triples of `X³` split into `S_i` by multiplicity.
pub fn dyadic_point_classes<T: Exact>(x: &GroundSet<T>, k: u64) -> Result<Vec<DyadicClass<[T; 3]>>> {
    if k < 2 {
        return Err(Error::Domain("dyadic classes need k >= 2".into()));
    }
    let count = dyadic_class_count(k);
    let mut classes: Vec<DyadicClass<[T; 3]>> = (1..=count)
        .map(|i| DyadicClass {
            i,
            members: Vec::new(),
        })
        .collect();
    let table = MultiplicityTable::build(x);
    for ((u, v), w) in table.iter() {
        if *w >= k {
            continue;
        }
        let class = &mut classes[dyadic_index(*w) as usize - 1];
        for a in x.iter() {
            let b = a.clone() + u.clone();
            let c = a.clone() + v.clone();
            if x.contains(&b) && x.contains(&c) {
                class.members.push(([a.clone(), b, c], *w));
            }
        }
    }
    let cube = (x.len() as u128).pow(3);
    for c in &mut classes {
        c.members.sort();
        let lines = c.line_count();
        if (lines as u128) << (c.i - 1) > cube {
            return Err(Error::Assertion(format!(
                "S_{} meets {lines} diagonal lines, more than |X|^3/2^{}",
                c.i,
                c.i - 1
            )));
        }
    }
    Ok(classes)
}

/// Restricts planes to the horizontal plane `z = z₀` (`z₀ ∈ B`), giving the
/// lines `c₀x + c₁y = 2s − c₂z₀`. Distinct planes must give distinct lines.
pub fn slice_lines<T: Exact>(g: &Grid<T>, z: &T, planes: &[PlaneH<T>]) -> Result<Vec<PlanarLine<T>>> {
    if !g.b.contains(z) {
        return Err(Error::Domain(format!("slice height {z} is not in B")));
    }
    let mut seen: HashMap<[T; 3], &PlaneH<T>> = HashMap::new();
    let mut out = Vec::with_capacity(planes.len());
    for h in planes {
        if h.is_degenerate() {
            continue;
        }
        let [c0, c1, c2] = h.coefficients().clone();
        let line = PlanarLine::new(c0, c1, h.rhs().clone() - c2 * z.clone())?;
        match seen.get(line.key()) {
            Some(prev) if *prev != h => {
                return Err(Error::Assertion(format!(
                    "planes {:?} and {:?} meet z = {z} in the same line",
                    prev.key(),
                    h.key()
                )))
            }
            Some(_) => continue,
            None => {
                seen.insert(line.key().clone(), h);
            }
        }
        out.push(line);
    }
    Ok(out)
}

/// Coordinates of the orthogonal projection of `q` onto `x + y + z = 1`,
/// in the frame with origin `(1,1,1)/3` and axes `(1,−1,0)/2`, `(1,1,−2)/6`:
/// `(x − y, x + y − 2z)`.
pub fn eta_coordinates<T: Exact>(q: &[T; 3]) -> (T, T) {
    (
        q[0].clone() - q[1].clone(),
        q[0].clone() + q[1].clone() - q[2].clone() - q[2].clone(),
    )
}

/// Projects weighted points and planes onto `η: x + y + z = 1`.
///
/// Points landing on the same projected point have their weights summed.
/// A plane `αx + βy + γz = r` (with `α + β + γ = 0`) becomes the line
/// `(2α + γ)u − γv = 2r` in η's frame. Distinct planes must map to distinct
/// lines; repeated identical planes have their weights summed.
#[allow(clippy::type_complexity)]
pub fn eta_projection<T: Exact>(
    points: &[([T; 3], u64)],
    planes: &[(PlaneH<T>, u64)],
) -> Result<(Vec<PlanarPoint<T>>, Vec<PlanarLine<T>>)> {
    let mut pts: BTreeMap<(T, T), u64> = BTreeMap::new();
    for (q, w) in points {
        *pts.entry(eta_coordinates(q)).or_insert(0) += w;
    }
    let mut lines: BTreeMap<[T; 3], (&PlaneH<T>, u64)> = BTreeMap::new();
    for (h, w) in planes {
        if h.is_degenerate() {
            return Err(Error::Domain("degenerate plane has no projection".into()));
        }
        let [a, _, c] = h.coefficients().clone();
        let two = T::from_i64(2);
        let line = PlanarLine::new(two.clone() * a + c.clone(), -c, two * h.rhs().clone())?;
        match lines.get_mut(line.key()) {
            Some((prev, acc)) => {
                if *prev != h {
                    return Err(Error::Assertion(format!(
                        "planes {:?} and {:?} project to the same line",
                        prev.key(),
                        h.key()
                    )));
                }
                *acc += w;
            }
            None => {
                lines.insert(line.key().clone(), (h, *w));
            }
        }
    }
    let points = pts
        .into_iter()
        .map(|((x, y), w)| PlanarPoint::weighted(x, y, w))
        .collect();
    let lines = lines
        .into_iter()
        .map(|(k, (_, w))| {
            let [a, b, c] = k;
            PlanarLine::new(a, b, c).map(|l| l.with_weight(w))
        })
        .collect::<Result<_>>()?;
    Ok((points, lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[i64]) -> GroundSet<i64> {
        GroundSet::from_ints(v).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn area_examples() {
        assert_eq!(triangle_area2(&(0i64, 0), &(1, 0), &(0, 1)), 1);
        assert_eq!(triangle_area2(&(0i64, 0), &(2, 0), &(0, 1)), 2);
        assert_eq!(triangle_area2(&(0i64, 0), &(1, 1), &(2, 2)), 0);
    }

    #[test]
    fn brute_force_examples() {
        let g = Grid::unit(s(&[0, 1]), s(&[0, 1, 2]));
        assert_eq!(count_unit_triangles_bruteforce(&g, None).unwrap(), 6);
        let g = Grid::new(s(&[0, 1]), s(&[0, 1]), &q(1, 1)).unwrap();
        assert_eq!(count_unit_triangles_bruteforce(&g, None).unwrap(), 0);
        let g = Grid::new(s(&[0, 1]), s(&[0, 1]), &q(1, 2)).unwrap();
        assert_eq!(count_unit_triangles_bruteforce(&g, None).unwrap(), 4);
        let g = Grid::unit(s(&[0]), s(&[0, 1, 2, 5]));
        assert_eq!(count_unit_triangles_bruteforce(&g, None).unwrap(), 0);
    }

    #[test]
    fn brute_force_guard() {
        let g = Grid::unit(s(&[0, 1, 2]), s(&[0, 1, 2]));
        assert!(matches!(
            count_unit_triangles_bruteforce(&g, Some(8)),
            Err(Error::Resource(_))
        ));
        assert!(count_unit_triangles_bruteforce(&g, Some(9)).is_ok());
    }

    #[test]
    fn incidence_examples() {
        let g = Grid::unit(s(&[0, 1]), s(&[0, 1, 2]));
        let c = count_unit_triangles_incidence(&g).unwrap();
        assert_eq!((c.ordered, c.triangles), (18, 6));
        let g = Grid::unit(s(&[0]), s(&[0, 1, 2]));
        assert_eq!(count_unit_triangles_incidence(&g).unwrap().triangles, 0);
    }

    #[test]
    fn rational_target_needs_representable_area() {
        assert!(Grid::new(s(&[0, 1]), s(&[0, 1]), &q(1, 3)).is_err());
        assert!(Grid::new(s(&[0, 1]), s(&[0, 1]), &q(-1, 2)).is_err());
        let qa = GroundSet::<BigRational>::from_ints(&[0, 1]).unwrap();
        let g = Grid::new(qa.clone(), qa, &q(1, 3)).unwrap();
        assert_eq!(count_unit_triangles_incidence(&g).unwrap().triangles, 0);
        assert!(matches!(g.integer_image(), IntegerImage::NoSolutions));
    }

    #[test]
    fn integer_image_preserves_counts() {
        let a = GroundSet::<BigRational>::parse("1/2\n1\n2\n7/2\n").unwrap();
        let b = GroundSet::<BigRational>::parse("-1\n0\n1/3\n2\n").unwrap();
        for area in [q(1, 1), q(1, 2), q(1, 12), q(1, 4)] {
            let g = Grid::new(a.clone(), b.clone(), &area).unwrap();
            let brute = count_unit_triangles_bruteforce(&g, None).unwrap();
            assert_eq!(count_unit_triangles(&g, None).unwrap().triangles, brute);
            assert_eq!(count_unit_triangles_incidence(&g).unwrap().triangles, brute);
            for k in 1..=4 {
                assert_eq!(classify(&g, k, None).unwrap(), classify_triangles(&g, k).unwrap());
            }
        }
    }

    #[test]
    fn plane_examples() {
        let h = plane_of(&[0i64, 1, 3], &2);
        assert_eq!(h.coefficients(), &[2, -3, 1]);
        assert_eq!(h.rhs(), &2);
        assert_eq!(h, plane_of(&[1, 2, 4], &2));
        let other = plane_of(&[0, 3, 1], &2);
        assert_eq!(other.coefficients(), &[-2, -1, 3]);
        assert_ne!(h, other);
        let diag = plane_of(&[5i64, 5, 5], &2);
        assert!(diag.is_degenerate());
        assert!(!diag.contains(&[0, 0, 0]));
    }

    #[test]
    fn multiplicity_examples() {
        let x = s(&[1, 2, 4, 8]);
        assert_eq!(multiplicity(&[2, 2, 2], &x).unwrap(), 4);
        assert_eq!(multiplicity(&[1, 2, 4], &x).unwrap(), 1);
        assert_eq!(multiplicity(&[0, 1, 3], &s(&[0, 1, 3])).unwrap(), 1);
        assert!(matches!(multiplicity(&[0, 1, 3], &x), Err(Error::Domain(_))));
    }

    #[test]
    fn rich_point_examples() {
        let x = s(&[0, 1, 3]);
        assert_eq!(rich_points(&x, 1, false).count, 27);
        assert_eq!(rich_points(&x, 3, false).count, 3);
        let r = rich_points(&x, 2, true);
        assert_eq!(r.count, 3);
        assert_eq!(r.points.unwrap(), vec![[0, 0, 0], [1, 1, 1], [3, 3, 3]]);
        assert_eq!(project_rich(&x, 1), 9);
        assert_eq!(project_rich(&x, 3), 3);
        assert_eq!(project_rich(&x, 2), 3);
    }

    #[test]
    fn classification_examples() {
        let g = Grid::unit(s(&[0, 1]), s(&[0, 1, 2]));
        let d = classify_triangles(&g, 2).unwrap();
        assert_eq!((d.rr, d.rp, d.pr, d.pp, d.total), (0, 0, 0, 6, 6));
        let d = classify_triangles(&g, 1).unwrap();
        assert_eq!((d.rr, d.total), (6, 6));
        let d = classify_triangles(&g, 4).unwrap();
        assert_eq!(d.pp, 6);
        assert!(classify_triangles(&g, 0).is_err());
    }

    #[test]
    fn dyadic_helpers() {
        assert_eq!(dyadic_index(1), 1);
        assert_eq!(dyadic_index(2), 2);
        assert_eq!(dyadic_index(3), 2);
        assert_eq!(dyadic_index(4), 3);
        assert_eq!(dyadic_class_count(2), 1);
        assert_eq!(dyadic_class_count(4), 2);
        assert_eq!(dyadic_class_count(5), 3);
    }

    #[test]
    fn dyadic_plane_examples() {
        let g = Grid::unit(s(&[0, 1, 3]), s(&[0, 1]));
        let classes = dyadic_plane_classes(&g, 2).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].size(), 24);
        assert_eq!(classes[0].total_weight(), 24);
        let classes = dyadic_plane_classes(&g, 4).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].size(), 24);
        assert_eq!(classes[1].size(), 0);
        assert!(dyadic_plane_classes(&g, 1).is_err());

        let g = Grid::unit(s(&[0, 1, 2, 3]), s(&[0, 1]));
        let classes = dyadic_plane_classes(&g, 8).unwrap();
        assert!(classes[2].members.is_empty());
        let weight: u64 = classes.iter().map(DyadicClass::total_weight).sum();
        assert_eq!(weight, 64 - 4);
    }

    #[test]
    fn slice_examples() {
        let g = Grid::unit(s(&[0, 1, 3]), s(&[0, 1, 2]));
        let h = plane_of(&[0, 1, 3], &2);
        let lines = slice_lines(&g, &0, &[h.clone()]).unwrap();
        assert_eq!(lines[0], PlanarLine::new(2, -3, 2).unwrap());
        let same = plane_of(&[1, 2, 4], &2);
        assert_eq!(slice_lines(&g, &0, &[h.clone(), same]).unwrap().len(), 1);
        assert!(slice_lines(&g, &7, &[h]).is_err());
        let planes: Vec<_> = plane_family(&g).into_iter().map(|p| p.0).collect();
        for z in g.b.iter() {
            assert_eq!(slice_lines(&g, z, &planes).unwrap().len(), planes.len());
        }
    }

    #[test]
    fn eta_projection_examples() {
        let b = s(&[0, 2, 5, 6]);
        let diag: Vec<_> = b.iter().map(|&v| ([v, v, v], 1)).collect();
        let (pts, _) = eta_projection::<i64>(&diag, &[]).unwrap();
        assert_eq!(pts, vec![PlanarPoint::weighted(0, 0, 4)]);

        let mut all = Vec::new();
        for &x in b.iter() {
            for &y in b.iter() {
                for &z in b.iter() {
                    all.push(([x, y, z], 1));
                }
            }
        }
        let (pts, _) = eta_projection::<i64>(&all, &[]).unwrap();
        let mut diffs: HashSet<(i64, i64)> = HashSet::new();
        for (p, _) in &all {
            diffs.insert((p[1] - p[0], p[2] - p[0]));
        }
        assert_eq!(pts.len(), diffs.len());
        for p in &pts {
            let rep = all.iter().find(|(q, _)| eta_coordinates(q) == (p.x, p.y)).unwrap();
            assert_eq!(p.weight, multiplicity(&rep.0, &b).unwrap());
        }

        let h = plane_of(&[0, 1, 3], &2);
        let (_, lines) = eta_projection(&[], &[(h.clone(), 3)]).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].weight, 3);
        for q in [[1i64, 0, 0], [0, 0, 2], [3, 2, 4]] {
            let on_plane = h.contains(&q);
            let (u, v) = eta_coordinates(&q);
            assert_eq!(lines[0].contains(&PlanarPoint::new(u, v)), on_plane, "{q:?}");
        }
    }
}
