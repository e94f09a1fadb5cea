//! Shifted intersections `A_x⃗`, the energies `E_k` and `E_{k,l}`, and counts
//! of tuples whose translates have a large common intersection.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Pow;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::report::RatioRow;
use crate::scalar::Exact;
use crate::sets::{rep_function, GroundSet};

/// Orders above this are rejected; tuple enumeration grows like `|A−A|^{k−1}`.
pub const MAX_ORDER: usize = 6;

/// A shift vector `(x_1, …, x_{k−1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftVector<T>(Vec<T>);

impl<T: Exact> ShiftVector<T> {
    pub fn new(components: Vec<T>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("shift vector needs at least one component".into()));
        }
        Ok(ShiftVector(components))
    }

    pub fn components(&self) -> &[T] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyValue {
    #[serde(serialize_with = "crate::harness::emit::ser_display")]
    pub value: BigUint,
    pub k: usize,
    pub l: usize,
}

fn check_order(name: &str, v: usize) -> Result<()> {
    if v < 2 {
        return Err(Error::Domain(format!("{name} must be at least 2, got {v}")));
    }
    if v > MAX_ORDER {
        return Err(Error::Config(format!(
            "{name} = {v} exceeds the configured maximum order {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `A ∩ (A − x_1) ∩ … ∩ (A − x_{k−1})`, sorted; may be empty.
pub fn shifted_intersection<T: Exact>(a: &GroundSet<T>, xs: &ShiftVector<T>) -> Vec<T> {
    a.iter()
        .filter(|z| {
            xs.components()
                .iter()
                .all(|x| a.contains(&((*z).clone() + x.clone())))
        })
        .cloned()
        .collect()
}

/// `E_k(A) = Σ_x |A_x|^k`, read off the self-difference profile.
pub fn energy_k<T: Exact>(a: &GroundSet<T>, k: usize) -> Result<EnergyValue> {
    check_order("k", k)?;
    let profile = rep_function(a, a);
    let value = profile
        .iter()
        .map(|(_, c)| BigUint::from(c).pow(k as u32))
        .sum();
    Ok(EnergyValue { value, k, l: 2 })
}

/// Histogram `|A_x⃗| ↦ number of (k−1)-tuples x⃗ with that nonempty intersection`.
///
/// Tuples are grown one coordinate at a time; a new coordinate `x` keeps the
/// running intersection `S` nonempty only if `x ∈ A − S`, so only those
/// candidates are explored.
fn tuple_size_histogram<T: Exact>(a: &GroundSet<T>, depth: usize) -> BTreeMap<usize, u64> {
    fn recurse<T: Exact>(
        a: &GroundSet<T>,
        current: &[T],
        remaining: usize,
        hist: &mut BTreeMap<usize, u64>,
    ) {
        if remaining == 0 {
            *hist.entry(current.len()).or_insert(0) += 1;
            return;
        }
        let mut candidates: Vec<T> = a
            .iter()
            .flat_map(|y| current.iter().map(move |s| y.clone() - s.clone()))
            .collect();
        candidates.sort();
        candidates.dedup();
        for x in candidates {
            let next: Vec<T> = current
                .iter()
                .filter(|s| a.contains(&((*s).clone() + x.clone())))
                .cloned()
                .collect();
            debug_assert!(!next.is_empty());
            recurse(a, &next, remaining - 1, hist);
        }
    }
    let mut hist = BTreeMap::new();
    recurse(a, a.as_slice(), depth, &mut hist);
    hist
}

/// `E_{k,l}(A) = Σ_{x⃗ ∈ ℝ^{k−1}} |A_x⃗|^l`, by tuple enumeration.
pub fn energy_kl<T: Exact>(a: &GroundSet<T>, k: usize, l: usize) -> Result<EnergyValue> {
    check_order("k", k)?;
    check_order("l", l)?;
    let hist = tuple_size_histogram(a, k - 1);
    let value = hist
        .iter()
        .map(|(&size, &count)| BigUint::from(size).pow(l as u32) * BigUint::from(count))
        .sum();
    Ok(EnergyValue { value, k, l })
}

/// `E_k(A)` through its second form `Σ_{x⃗ ∈ ℝ^{k−1}} |A_x⃗|²`.
pub fn energy_k_tuple<T: Exact>(a: &GroundSet<T>, k: usize) -> Result<EnergyValue> {
    let mut e = energy_kl(a, k, 2)?;
    e.l = 2;
    Ok(e)
}

/// Number of `(a_1, …, a_m) ∈ A^m` with `|(A − a_1) ∩ … ∩ (A − a_m)| ≥ τ`.
pub fn rich_tuple_count<T: Exact>(a: &GroundSet<T>, m: usize, tau: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::Domain(format!("m must be at least 2, got {m}")));
    }
    if m > MAX_ORDER {
        return Err(Error::Config(format!(
            "m = {m} exceeds the configured maximum order {MAX_ORDER}"
        )));
    }
    if tau == 0 {
        return Err(Error::Domain("tau must be at least 1".into()));
    }
    // `current` holds the running intersection, translated so that it is a
    // subset of A − a_1; an empty prefix is represented by `None`.
    fn recurse<T: Exact>(
        a: &GroundSet<T>,
        current: Option<&[T]>,
        remaining: usize,
        tau: usize,
    ) -> u64 {
        if remaining == 0 {
            return 1;
        }
        let mut total = 0;
        for ai in a.iter() {
            let next: Vec<T> = match current {
                None => a.iter().map(|y| y.clone() - ai.clone()).collect(),
                Some(cur) => cur
                    .iter()
                    .filter(|t| a.contains(&((*t).clone() + ai.clone())))
                    .cloned()
                    .collect(),
            };
            if next.len() >= tau {
                total += recurse(a, Some(&next), remaining - 1, tau);
            }
        }
        total
    }
    if tau > a.len() as u64 {
        return Ok(0);
    }
    Ok(recurse(a, None, m, tau as usize))
}

/// Checks `#rich tuples ≤ d·|A|·E_{m−1,3}(A)/τ³` with the always-valid
/// parameter `d = |A|`. A violation is reported as [`Error::Assertion`].
pub fn verify_rich_tuple_bound<T: Exact>(a: &GroundSet<T>, m: usize, tau: u64) -> Result<RatioRow> {
    if m < 3 {
        return Err(Error::Domain(format!("m must be at least 3, got {m}")));
    }
    let lhs = rich_tuple_count(a, m, tau)?;
    let e = energy_kl(a, m - 1, 3)?;
    let n = BigInt::from(a.len());
    let bound = BigRational::new(
        &n * &n * BigInt::from(e.value),
        BigInt::from(tau).pow(3u32),
    );
    RatioRow::asserted(
        "rich-tuple",
        format!("|A|={} m={m} tau={tau} d=|A|", a.len()),
        BigRational::from_integer(BigInt::from(lhs)),
        bound,
    )
}

/// All nonzero differences of `A` are distinct; then `E_2(A) = 2|A|² − |A|`.
pub fn is_sidon<T: Exact>(a: &GroundSet<T>) -> bool {
    rep_function(a, a)
        .iter()
        .all(|(s, c)| s.is_zero() || c == 1)
}
