//! Closed-form evaluation of the upper-bound expressions: the five-term
//! summary, the balancing choice of `k`, the main theorem's bound and
//! hypothesis, and the reference exponents.
//!
//! Every big-O constant is taken to be 1 and logarithms are base 2. Generic
//! over the float type.

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::emit::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogMode {
    /// `log₂ x`, with `log₂ n` replaced by 1 when `n ≤ 2`.
    Base2,
    /// Every log factor is 1.
    Suppressed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInput<F> {
    /// Grid size `|A|·|B|`.
    pub n: u64,
    /// `d(A) ≤ d(B)` after construction.
    pub da: F,
    pub db: F,
    pub log_mode: LogMode,
}

impl<F: Float + FromPrimitive> BoundInput<F> {
    /// Orders the parameters so that `d(A) ≤ d(B)`.
    pub fn new(n: u64, da: F, db: F, log_mode: LogMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !(da > F::zero() && db > F::zero()) {
            return Err(Error::Domain("d parameters must be positive".into()));
        }
        let (da, db) = if da <= db { (da, db) } else { (db, da) };
        Ok(BoundInput { n, da, db, log_mode })
    }

    fn nf(&self) -> F {
        F::from_u64(self.n).expect("representable")
    }

    /// `log₂ n` under the configured convention.
    pub fn log_n(&self) -> F {
        match self.log_mode {
            LogMode::Suppressed => F::one(),
            LogMode::Base2 if self.n <= 2 => F::one(),
            LogMode::Base2 => self.nf().log2(),
        }
    }

    /// `log₂ k` under the configured convention (`k = 1` gives 0).
    pub fn log_k(&self, k: u64) -> F {
        match self.log_mode {
            LogMode::Suppressed => F::one(),
            LogMode::Base2 => F::from_u64(k).expect("representable").log2(),
        }
    }
}

fn c<F: FromPrimitive>(v: f64) -> F {
    F::from_f64(v).expect("representable")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiveTermBound<F> {
    /// `d²(A)d(B)n^{7/2}log n / k⁵`, `(d(A)^{4/3}+d(B)^{4/3})n^{5/2}log^{2/3}n / k^{5/3}`,
    /// `(d²(A)+d²(B))n² log n / k²`, `n²k^{2/3}`, `n^{3/2}k log k`.
    pub terms: [F; 5],
    pub k: u64,
}

impl<F: Float> FiveTermBound<F> {
    pub fn total(&self) -> F {
        self.terms.iter().fold(F::zero(), |a, &t| a + t)
    }
}

pub fn five_term_bound<F: Float + FromPrimitive>(inp: &BoundInput<F>, k: u64) -> Result<FiveTermBound<F>> {
    if k < 1 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let n = inp.nf();
    let kf = F::from_u64(k).expect("representable");
    let ln = inp.log_n();
    let (da, db) = (inp.da, inp.db);
    let four_thirds = c::<F>(4.0) / c(3.0);
    let two_thirds = c::<F>(2.0) / c(3.0);
    let five_thirds = c::<F>(5.0) / c(3.0);
    let t1 = da * da * db * n.powf(c(3.5)) * ln / kf.powi(5);
    let t2 = (da.powf(four_thirds) + db.powf(four_thirds)) * n.powf(c(2.5)) * ln.powf(two_thirds)
        / kf.powf(five_thirds);
    let t3 = (da * da + db * db) * n * n * ln / (kf * kf);
    let t4 = n * n * kf.powf(two_thirds);
    let t5 = n.powf(c(1.5)) * kf * inp.log_k(k);
    Ok(FiveTermBound {
        terms: [t1, t2, t3, t4, t5],
        k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OptimalK {
    /// `⌊n^{9/34}(d²(A)d(B) log n)^{3/17}⌋`, at least 1.
    pub formula: u64,
    /// Integer argmin of the five-term total over `[1, n]`, ties to the smaller k.
    pub search: u64,
}

/// Snaps `v` to the nearest integer when within a relative `1e-9`, so that
/// exact powers are not lost to rounding; otherwise floors.
fn floor_snapped<F: Float + FromPrimitive>(v: F) -> u64 {
    let r = v.round();
    let tol = c::<F>(1e-9) * r.abs().max(F::one());
    let f = if (v - r).abs() <= tol { r } else { v.floor() };
    f.to_u64().unwrap_or(u64::MAX)
}

/// The formula choice of `k` and the exact integer minimiser of the total.
///
/// Multiplying the derivative of the total by `k` gives a sum of increasing
/// functions of `k`, so the total decreases then increases; the minimiser is
/// the first `k` whose forward difference is nonnegative, found by bisection.
pub fn optimal_k<F: Float + FromPrimitive>(inp: &BoundInput<F>) -> Result<OptimalK> {
    if inp.n < 2 {
        return Err(Error::Domain("optimal k needs n >= 2".into()));
    }
    let base = inp.da * inp.da * inp.db * inp.log_n();
    let log2k = c::<F>(9.0) / c(34.0) * inp.nf().log2() + c::<F>(3.0) / c(17.0) * base.log2();
    let formula = floor_snapped(c::<F>(2.0).powf(log2k)).max(1);
    let total = |k: u64| five_term_bound(inp, k).map(|b| b.total());
    let (mut lo, mut hi) = (1u64, inp.n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if total(mid + 1)? >= total(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(OptimalK {
        formula,
        search: lo,
    })
}

/// `n^{37/17}(d²(A)d(B) log n)^{2/17}`.
pub fn theorem_bound<F: Float + FromPrimitive>(inp: &BoundInput<F>) -> F {
    let base = inp.da * inp.da * inp.db * inp.log_n();
    inp.nf().powf(c::<F>(37.0) / c(17.0)) * base.powf(c::<F>(2.0) / c(17.0))
}

/// `d(A) ≤ d(B) ≤ n^{6/47} d(A)^{42/47} (log n)^{−13/47}`.
pub fn hypothesis_check<F: Float + FromPrimitive>(inp: &BoundInput<F>) -> bool {
    let rhs = inp.nf().powf(c::<F>(6.0) / c(47.0))
        * inp.da.powf(c::<F>(42.0) / c(47.0))
        * inp.log_n().powf(c::<F>(-13.0) / c(47.0));
    inp.da <= inp.db && inp.db <= rhs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceExponent {
    pub name: &'static str,
    pub exponent: Ratio<i64>,
}

impl ReferenceExponent {
    pub fn to_f64(&self) -> f64 {
        *self.exponent.numer() as f64 / *self.exponent.denom() as f64
    }
}

/// Exponents of `n` in the known upper bounds on unit-area triangles.
pub fn reference_exponents() -> Vec<ReferenceExponent> {
    vec![
        ReferenceExponent {
            name: "general",
            exponent: Ratio::new(20, 9),
        },
        ReferenceExponent {
            name: "convex",
            exponent: Ratio::new(37, 17),
        },
        ReferenceExponent {
            name: "prior-convex",
            exponent: Ratio::new(31, 14),
        },
    ]
}

/// Serializable summary used by the `bounds` command.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsSummary {
    pub n: u64,
    pub da: Real,
    pub db: Real,
    pub log_mode: LogMode,
    pub k: u64,
    pub terms: [Real; 5],
    pub total: Real,
    pub k_formula: u64,
    pub k_search: u64,
    pub theorem_bound: Real,
    pub hypothesis: bool,
}

impl BoundsSummary {
    pub fn evaluate(inp: &BoundInput<f64>, k: Option<u64>) -> Result<Self> {
        let opt = optimal_k(inp)?;
        let k = k.unwrap_or(opt.search);
        let b = five_term_bound(inp, k)?;
        Ok(BoundsSummary {
            n: inp.n,
            da: Real(inp.da),
            db: Real(inp.db),
            log_mode: inp.log_mode,
            k,
            terms: b.terms.map(Real),
            total: Real(b.total()),
            k_formula: opt.formula,
            k_search: opt.search,
            theorem_bound: Real(theorem_bound(inp)),
            hypothesis: hypothesis_check(inp),
        })
    }
}

impl crate::harness::emit::Tabular for BoundsSummary {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "n", "da", "db", "k", "t1", "t2", "t3", "t4", "t5", "total", "k_formula", "k_search",
            "theorem_bound", "hypothesis",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        let mut r = vec![
            self.n.to_string(),
            self.da.to_string(),
            self.db.to_string(),
            self.k.to_string(),
        ];
        r.extend(self.terms.iter().map(Real::to_string));
        r.extend([
            self.total.to_string(),
            self.k_formula.to_string(),
            self.k_search.to_string(),
            self.theorem_bound.to_string(),
            self.hypothesis.to_string(),
        ]);
        vec![r]
    }
}
