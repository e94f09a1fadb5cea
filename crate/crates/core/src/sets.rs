//! Ground sets, generators, the convexity predicate, representation functions
//! and estimators for the Szemerédi–Trotter-type parameter `d(X)` and the
//! doubling quantities `q(A)`, `q~(A)`, `|AA|/|A|`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Exact};

/// Identifier of the pseudo-random generator used by every seeded operation.
pub const RNG_ALGORITHM: &str = "chacha8";

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonempty, strictly increasing finite set of scalars.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundSet<T> {
    elems: Vec<T>,
}

impl<T: Exact> GroundSet<T> {
    /// Builds a set from a strictly increasing sequence.
    pub fn new(elems: Vec<T>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::Input("ground set must be nonempty".into()));
        }
        if let Some(w) = elems.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Input(format!(
                "ground set not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(GroundSet { elems })
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut elems: Vec<T>) -> Result<Self> {
        elems.sort();
        elems.dedup();
        Self::new(elems)
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::from_unsorted(v.iter().map(|&x| T::from_i64(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[T] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.elems.iter()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.elems.binary_search(x).is_ok()
    }

    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.elems.binary_search(x).ok()
    }

    pub fn min(&self) -> &T {
        &self.elems[0]
    }

    pub fn max(&self) -> &T {
        &self.elems[self.elems.len() - 1]
    }

    /// `c·X`; `c` must be positive.
    pub fn dilate(&self, c: &T) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Domain("dilation factor must be positive".into()));
        }
        Ok(GroundSet {
            elems: self.elems.iter().map(|x| x.clone() * c.clone()).collect(),
        })
    }

    pub fn translate(&self, t: &T) -> Self {
        GroundSet {
            elems: self.elems.iter().map(|x| x.clone() + t.clone()).collect(),
        }
    }

    /// Converts every element into another exact type, if representable.
    pub fn convert<U: Exact>(&self) -> Option<GroundSet<U>> {
        let elems = self
            .elems
            .iter()
            .map(|x| U::from_rational(&x.to_rational()))
            .collect::<Option<Vec<_>>>()?;
        Some(GroundSet { elems })
    }

    /// Parses the line-oriented text format: one `p/q` or `p` per line,
    /// `#` starts a comment, blank lines ignored. Order must be strictly
    /// increasing.
    pub fn parse(text: &str) -> Result<Self> {
        let mut elems = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v = scalar::parse_scalar::<T>(line)
                .map_err(|e| Error::Input(format!("line {}: {e}", lineno + 1)))?;
            elems.push(v);
        }
        Self::new(elems)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for x in &self.elems {
            let _ = writeln!(out, "{}", scalar::format_rational(&x.to_rational()));
        }
        out
    }
}

/// Sorted, deduplicated `{x + y}`.
pub fn sumset<T: Exact>(x: &GroundSet<T>, y: &GroundSet<T>) -> Vec<T> {
    let mut v: Vec<T> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| a.clone() + b.clone()))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Sorted, deduplicated `{x · y}`.
pub fn product_set<T: Exact>(x: &GroundSet<T>, y: &GroundSet<T>) -> Vec<T> {
    let mut v: Vec<T> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| a.clone() * b.clone()))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Consecutive gaps strictly increase. Sets with at most two elements are convex.
pub fn is_convex<T: Exact>(x: &GroundSet<T>) -> bool {
    let e = x.as_slice();
    e.windows(3)
        .all(|w| w[2].clone() - w[1].clone() > w[1].clone() - w[0].clone())
}

/// The representation function `s ↦ δ_{X,Y}(s) = |{(x, y) : x − y = s}|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffProfile<T> {
    entries: BTreeMap<T, u64>,
    x_len: usize,
    y_len: usize,
}

impl<T: Exact> DiffProfile<T> {
    pub fn get(&self, s: &T) -> u64 {
        self.entries.get(s).copied().unwrap_or(0)
    }

    /// `|X − Y|`.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> {
        self.entries.iter().map(|(s, &c)| (s, c))
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn source_sizes(&self) -> (usize, usize) {
        (self.x_len, self.y_len)
    }

    pub fn max_count(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }
}

pub fn rep_function<T: Exact>(x: &GroundSet<T>, y: &GroundSet<T>) -> DiffProfile<T> {
    let mut entries = BTreeMap::new();
    for a in x.iter() {
        for b in y.iter() {
            *entries.entry(a.clone() - b.clone()).or_insert(0u64) += 1;
        }
    }
    DiffProfile {
        entries,
        x_len: x.len(),
        y_len: y.len(),
    }
}

/// `|{s : δ_{X,Y}(s) ≥ τ}|`.
pub fn rich_diff_count<T: Exact>(profile: &DiffProfile<T>, tau: u64) -> u64 {
    profile.entries.values().filter(|&&c| c >= tau).count() as u64
}

/// One `(Y, τ)` pair attaining the calibrated value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DWitness {
    /// Index of `Y` in the calibration family.
    pub family_index: usize,
    pub tau: u64,
    pub count: u64,
}

/// Calibrated Szemerédi–Trotter parameter of a set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DParam {
    #[serde(with = "scalar::rational_str")]
    pub value: BigRational,
    pub alpha: u32,
    pub witnesses: Vec<DWitness>,
}

/// Largest ratio `count·τ³ / (|X|·|Y|²)` over the tested `(Y, τ)` pairs,
/// which is the smallest `d` for which the defining inequality (with α = 2)
/// holds on all of them. When every count is zero the value is clamped to
/// `min_Y 1/(|X|·|Y|²)`.
pub fn calibrate_d<T: Exact>(
    x: &GroundSet<T>,
    family: &[GroundSet<T>],
    taus: &[u64],
) -> Result<DParam> {
    if family.is_empty() {
        return Err(Error::Config("calibration family is empty".into()));
    }
    if taus.is_empty() {
        return Err(Error::Config("calibration tau list is empty".into()));
    }
    if taus.contains(&0) {
        return Err(Error::Config("tau must be at least 1".into()));
    }
    let xl = BigInt::from(x.len());
    let mut best: Option<BigRational> = None;
    let mut witnesses = Vec::new();
    let mut floor: Option<BigRational> = None;
    for (idx, y) in family.iter().enumerate() {
        let profile = rep_function(x, y);
        let yl = BigInt::from(y.len());
        let denom = &xl * &yl * &yl;
        let unit = BigRational::new(BigInt::one(), denom.clone());
        if floor.as_ref().is_none_or(|f| unit < *f) {
            floor = Some(unit);
        }
        for &tau in taus {
            let count = rich_diff_count(&profile, tau);
            if count == 0 {
                continue;
            }
            let ratio = BigRational::new(
                BigInt::from(count) * BigInt::from(tau).pow(3u32),
                denom.clone(),
            );
            let w = DWitness {
                family_index: idx,
                tau,
                count,
            };
            match &best {
                Some(b) if ratio < *b => {}
                Some(b) if ratio == *b => witnesses.push(w),
                _ => {
                    best = Some(ratio);
                    witnesses = vec![w];
                }
            }
        }
    }
    let value = best.unwrap_or_else(|| floor.expect("family nonempty"));
    Ok(DParam {
        value,
        alpha: 2,
        witnesses,
    })
}

/// Default calibration family for `X`: `X`, `2·X`, a random convex set and a
/// random uniform set, both of size `|X|`.
pub fn default_family<T: Exact>(x: &GroundSet<T>, seed: u64) -> Result<Vec<GroundSet<T>>> {
    let m = x.len();
    Ok(vec![
        x.clone(),
        x.dilate(&T::from_i64(2))?,
        gen_set(&GenKind::RandomConvex, m, seed.wrapping_add(0x9e37_79b9))?,
        gen_set(
            &GenKind::UniformRandom { range: None },
            m,
            seed.wrapping_add(0x7f4a_7c15),
        )?,
    ])
}

pub fn default_taus<T: Exact>(x: &GroundSet<T>) -> Vec<u64> {
    (1..=x.len() as u64).collect()
}

fn ratio_of(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `min_C |A + C|² / (|A|·|C|)` over the given family.
pub fn q_estimate<T: Exact>(a: &GroundSet<T>, family: &[GroundSet<T>]) -> Result<BigRational> {
    family
        .iter()
        .map(|c| {
            let s = sumset(a, c).len();
            ratio_of(s * s, a.len() * c.len())
        })
        .min()
        .ok_or_else(|| Error::Config("q estimate needs a nonempty family".into()))
}

/// `min_{a, C} |(A + a)·C|² / (|A|·|C|)` over the given shifts and family.
pub fn qtilde_estimate<T: Exact>(
    a: &GroundSet<T>,
    shifts: &[T],
    family: &[GroundSet<T>],
) -> Result<BigRational> {
    if !a.min().is_positive() {
        return Err(Error::Domain("q~ requires a set of positive reals".into()));
    }
    if shifts.iter().any(Zero::is_zero) {
        return Err(Error::Domain("q~ shifts must be nonzero".into()));
    }
    if shifts.is_empty() || family.is_empty() {
        return Err(Error::Config("q~ needs nonempty shifts and family".into()));
    }
    let mut best: Option<BigRational> = None;
    for s in shifts {
        let shifted = a.translate(s);
        for c in family {
            let p = product_set(&shifted, c).len();
            let r = ratio_of(p * p, a.len() * c.len());
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
    }
    Ok(best.expect("nonempty"))
}

/// `|A·A| / |A|`.
pub fn mult_doubling<T: Exact>(a: &GroundSet<T>) -> BigRational {
    ratio_of(product_set(a, a).len(), a.len())
}

/// Ground-set generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenKind {
    /// `{i² : 0 ≤ i < m}`.
    Squares,
    /// `{f(i) : 0 ≤ i < m}` with `f(i) = Σ_j c_j i^j`; the image must be
    /// strictly increasing and convex.
    PolyConvex {
        #[serde(with = "scalar::rational_vec_str")]
        coefficients: Vec<BigRational>,
    },
    /// Integer set with random, strictly increasing gaps.
    RandomConvex,
    /// `{r^i : 0 ≤ i < m}`, `r > 1`.
    Geometric {
        #[serde(with = "scalar::rational_str")]
        ratio: BigRational,
    },
    /// `{start + i·step}`, `step > 0`.
    Arithmetic {
        #[serde(default = "zero_q", with = "scalar::rational_str")]
        start: BigRational,
        #[serde(default = "one_q", with = "scalar::rational_str")]
        step: BigRational,
    },
    /// `m` distinct integers drawn uniformly from `[0, range)`; the default
    /// range is `max(4m², m)`.
    UniformRandom {
        #[serde(default)]
        range: Option<u64>,
    },
}

fn zero_q() -> BigRational {
    BigRational::zero()
}

fn one_q() -> BigRational {
    BigRational::one()
}

impl GenKind {
    pub fn name(&self) -> &'static str {
        match self {
            GenKind::Squares => "squares",
            GenKind::PolyConvex { .. } => "poly-convex",
            GenKind::RandomConvex => "random-convex",
            GenKind::Geometric { .. } => "geometric",
            GenKind::Arithmetic { .. } => "arithmetic",
            GenKind::UniformRandom { .. } => "uniform-random",
        }
    }

    /// Whether every generated set is guaranteed convex.
    pub fn is_convex_kind(&self) -> bool {
        matches!(
            self,
            GenKind::Squares
                | GenKind::PolyConvex { .. }
                | GenKind::RandomConvex
                | GenKind::Geometric { .. }
        )
    }
}

/// Generates a ground set of size `m`; deterministic in `(kind, m, seed)`.
pub fn gen_set<T: Exact>(kind: &GenKind, m: usize, seed: u64) -> Result<GroundSet<T>> {
    if m == 0 {
        return Err(Error::Config("generator size must be at least 1".into()));
    }
    let values: Vec<BigRational> = match kind {
        GenKind::Squares => (0..m)
            .map(|i| BigRational::from_integer(BigInt::from(i) * BigInt::from(i)))
            .collect(),
        GenKind::PolyConvex { coefficients } => {
            if coefficients.is_empty() {
                return Err(Error::Config("poly-convex needs coefficients".into()));
            }
            (0..m)
                .map(|i| {
                    let x = BigRational::from_integer(BigInt::from(i));
                    coefficients
                        .iter()
                        .rev()
                        .fold(BigRational::zero(), |acc, c| acc * &x + c)
                })
                .collect()
        }
        GenKind::RandomConvex => {
            let mut r = rng(seed);
            let spread = m as i64;
            let mut cur: i64 = r.gen_range(0..spread.max(1));
            let mut gap: i64 = 0;
            let mut v = Vec::with_capacity(m);
            v.push(BigRational::from_integer(cur.into()));
            for _ in 1..m {
                gap += 1 + r.gen_range(0..=spread);
                cur += gap;
                v.push(BigRational::from_integer(cur.into()));
            }
            v
        }
        GenKind::Geometric { ratio } => {
            if *ratio <= BigRational::one() {
                return Err(Error::Config("geometric ratio must exceed 1".into()));
            }
            let mut v = Vec::with_capacity(m);
            let mut cur = BigRational::one();
            for _ in 0..m {
                v.push(cur.clone());
                cur *= ratio;
            }
            v
        }
        GenKind::Arithmetic { start, step } => {
            if !step.is_positive() {
                return Err(Error::Config("arithmetic step must be positive".into()));
            }
            (0..m)
                .map(|i| start + step * BigRational::from_integer(BigInt::from(i)))
                .collect()
        }
        GenKind::UniformRandom { range } => {
            let range = range.unwrap_or((4 * m * m).max(m) as u64);
            if range < m as u64 {
                return Err(Error::Config(format!(
                    "uniform range {range} smaller than set size {m}"
                )));
            }
            let mut r = rng(seed);
            let mut v: Vec<u64> = sample(&mut r, range as usize, m)
                .into_iter()
                .map(|i| i as u64)
                .collect();
            v.sort_unstable();
            v.into_iter()
                .map(|i| BigRational::from_integer(BigInt::from(i)))
                .collect()
        }
    };
    let elems = values
        .iter()
        .map(|q| {
            T::from_rational(q).ok_or_else(|| {
                Error::Config(format!(
                    "{} generator value {} not representable in the scalar type",
                    kind.name(),
                    scalar::format_rational(q)
                ))
            })
        })
        .collect::<Result<Vec<T>>>()?;
    let set = GroundSet::new(elems).map_err(|e| match kind {
        GenKind::PolyConvex { .. } => {
            Error::Config(format!("polynomial is not increasing on 0..{m}: {e}"))
        }
        _ => e,
    })?;
    if matches!(kind, GenKind::PolyConvex { .. }) && !is_convex(&set) {
        return Err(Error::Config(format!(
            "polynomial image on 0..{m} is not convex"
        )));
    }
    Ok(set)
}
