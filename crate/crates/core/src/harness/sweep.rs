use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{reference_exponents, theorem_bound, BoundInput, LogMode};
use crate::error::{Error, Result};
use crate::grid::{count_unit_triangles, count_unit_triangles_bruteforce, Grid, INCIDENCE_GUARD};
use crate::harness::emit::{format_real, Real, Tabular};
use crate::harness::manifest::{ExperimentManifest, SetSource};
use crate::sets::gen_set;

/// Sizes at or below this are cross-checked against the brute-force counter.
pub const ORACLE_MAX_M: usize = 8;

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepOptions {
    /// Record wall-clock time per row (makes output run-dependent).
    pub timing: bool,
    /// Work limit on `|A|³|B|²`; `None` disables the guard.
    pub guard: Option<u128>,
}

impl SweepOptions {
    pub fn guarded() -> Self {
        SweepOptions {
            timing: false,
            guard: Some(INCIDENCE_GUARD),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub n: u64,
    pub count: u64,
    pub theorem_bound: Real,
    pub ratio: Real,
    pub oracle_checked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceRow {
    pub name: &'static str,
    pub exponent: Real,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub id: String,
    pub generator: String,
    #[serde(with = "crate::scalar::rational_str")]
    pub target_area: BigRational,
    pub rows: Vec<SweepRow>,
    pub slope: Option<Real>,
    pub reference_exponents: Vec<ReferenceRow>,
}

impl Tabular for SweepResult {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["m", "n", "count", "theorem_bound", "ratio", "oracle_checked", "fitted_slope"];
        if self.rows.iter().any(|r| r.elapsed_ms.is_some()) {
            h.push("elapsed_ms");
        }
        h
    }

    fn records(&self) -> Vec<Vec<String>> {
        let slope = self.slope.map(|s| s.to_string()).unwrap_or_default();
        self.rows
            .iter()
            .map(|r| {
                let mut rec = vec![
                    r.m.to_string(),
                    r.n.to_string(),
                    r.count.to_string(),
                    format_real(r.theorem_bound.0),
                    format_real(r.ratio.0),
                    r.oracle_checked.to_string(),
                    slope.clone(),
                ];
                if let Some(t) = r.elapsed_ms {
                    rec.push(t.to_string());
                }
                rec
            })
            .collect()
    }
}

/// Least-squares slope of `ln U` against `ln n` over the rows with `U > 0`.
pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, u)| *u > 0.0 && *n > 0.0)
        .map(|(n, u)| (n.ln(), u.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain(format!(
            "slope needs at least 2 rows with U > 0, got {}",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("slope needs at least two distinct n".into()));
    }
    Ok(sxy / sxx)
}

/// Counts unit-area triangles on `A×A` for each sweep size, `A` drawn from the
/// manifest's convex generator.
pub fn run_sweep(manifest: &ExperimentManifest, opts: &SweepOptions) -> Result<SweepResult> {
    let mut sizes = manifest.sweep_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(Error::Config("sweep sizes are empty".into()));
    }
    if sizes[0] == 0 {
        return Err(Error::Config("sweep sizes must be positive".into()));
    }
    let kind = match &manifest.a {
        SetSource::Generator(g) if g.kind.is_convex_kind() => g.kind.clone(),
        _ => {
            return Err(Error::Config(
                "sweeps need a convex generator for A".into(),
            ))
        }
    };
    if let Some(limit) = opts.guard {
        let over: Vec<String> = sizes
            .iter()
            .filter(|&&m| (m as u128).pow(5) > limit)
            .map(|m| m.to_string())
            .collect();
        if !over.is_empty() {
            return Err(Error::Resource(format!(
                "sweep sizes m = {} exceed the work guard {limit}",
                over.join(", ")
            )));
        }
    }
    let rows = sizes
        .par_iter()
        .map(|&m| -> Result<SweepRow> {
            let start = Instant::now();
            let a = gen_set::<BigRational>(&kind, m, manifest.seed)?;
            let g = Grid::new(a.clone(), a, &manifest.target_area)?;
            let count = count_unit_triangles(&g, None)?.triangles;
            let oracle_checked = m <= ORACLE_MAX_M;
            if oracle_checked {
                let brute = count_unit_triangles_bruteforce(&g, None)?;
                if brute != count {
                    return Err(Error::Assertion(format!(
                        "m = {m}: incidence counter gives {count}, brute force {brute}"
                    )));
                }
            }
            let n = (m * m) as u64;
            let bound = theorem_bound(&BoundInput::new(n, 1.0, 1.0, LogMode::Base2)?);
            Ok(SweepRow {
                m,
                n,
                count,
                theorem_bound: Real(bound),
                ratio: Real(count as f64 / bound),
                oracle_checked,
                elapsed_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.count as f64)).collect();
    let slope = fit_exponent(&pairs).ok().map(Real);
    Ok(SweepResult {
        id: manifest.id.clone(),
        generator: kind.name().to_string(),
        target_area: manifest.target_area.clone(),
        rows,
        slope,
        reference_exponents: reference_exponents()
            .into_iter()
            .map(|r| ReferenceRow {
                name: r.name,
                exponent: Real(r.to_f64()),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::manifest::GeneratorSpec;

    #[test]
    fn exact_power_laws() {
        let s = fit_exponent(&[(4.0, 16.0), (8.0, 64.0), (16.0, 256.0)]).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        let rows: Vec<_> = [3.0f64, 10.0, 50.0, 400.0]
            .iter()
            .map(|&n| (n, 7.5 * n.powf(2.2)))
            .collect();
        assert!((fit_exponent(&rows).unwrap() - 2.2).abs() < 1e-9);
        assert!(matches!(fit_exponent(&[(4.0, 16.0)]), Err(Error::Domain(_))));
        assert!(fit_exponent(&[(4.0, 16.0), (8.0, 0.0)]).is_err());
    }

    fn manifest(sizes: Vec<usize>) -> ExperimentManifest {
        let mut m = ExperimentManifest::new("t", SetSource::Generator("squares".parse::<GeneratorSpec>().unwrap()));
        m.sweep_sizes = sizes;
        m
    }

    #[test]
    fn small_sweep_matches_oracle() {
        let r = run_sweep(&manifest(vec![6, 4, 5]), &SweepOptions::guarded()).unwrap();
        let ms: Vec<usize> = r.rows.iter().map(|r| r.m).collect();
        assert_eq!(ms, vec![4, 5, 6]);
        assert!(r.rows.iter().all(|r| r.oracle_checked && r.elapsed_ms.is_none()));
    }

    #[test]
    fn sweep_preconditions() {
        assert!(matches!(
            run_sweep(&manifest(vec![]), &SweepOptions::default()),
            Err(Error::Config(_))
        ));
        let opts = SweepOptions {
            timing: false,
            guard: Some(1000),
        };
        match run_sweep(&manifest(vec![3, 5]), &opts) {
            Err(Error::Resource(msg)) => assert!(msg.contains("m = 5")),
            other => panic!("{other:?}"),
        }
        let mut m = manifest(vec![4]);
        m.a = SetSource::Generator("uniform-random".parse().unwrap());
        assert!(matches!(run_sweep(&m, &SweepOptions::default()), Err(Error::Config(_))));
    }
}
