//! Lemma-verification suites: each computes the exact left-hand side of one
//! inequality and compares it with the bound (constant 1).

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::grid::{
    classify, count_equal_abscissa_triangles, dyadic_plane_classes, dyadic_point_classes,
    eta_projection, project_rich, rich_points, rich_rich_distinct_abscissae, slice_lines, Grid,
    IntegerImage, INCIDENCE_GUARD,
};
use crate::harness::manifest::ExperimentManifest;
use crate::harness::report::{RatioReport, RatioRow, Value};
use crate::incidence::{count_incidences, fixed_direction_rich_count, st_bound, PlanarPoint};
use crate::energy::{energy_k, energy_kl, rich_tuple_count, verify_rich_tuple_bound};
use crate::scalar::Exact;
use crate::sets::{calibrate_d, default_family, default_taus, rep_function, rich_diff_count, GroundSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaId {
    SchoenShkredov,
    E3,
    RichTuple,
    KRich,
    KProj,
    RichRich,
    PoorRich,
    PoorPoor,
}

impl LemmaId {
    pub const ALL: [LemmaId; 8] = [
        LemmaId::SchoenShkredov,
        LemmaId::E3,
        LemmaId::RichTuple,
        LemmaId::KRich,
        LemmaId::KProj,
        LemmaId::RichRich,
        LemmaId::PoorRich,
        LemmaId::PoorPoor,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LemmaId::SchoenShkredov => "schoen-shkredov",
            LemmaId::E3 => "e3",
            LemmaId::RichTuple => "rich-tuple",
            LemmaId::KRich => "krich",
            LemmaId::KProj => "kproj",
            LemmaId::RichRich => "rich-rich",
            LemmaId::PoorRich => "poor-rich",
            LemmaId::PoorPoor => "poor-poor",
        }
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = LemmaId::ALL.iter().map(|l| l.name()).collect();
                Error::Usage(format!("unknown lemma {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Work limit on `|A|³|B|²` for the grid suites.
    pub guard: Option<u128>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            guard: Some(INCIDENCE_GUARD),
        }
    }
}

/// `log₂ n`, replaced by 1 for `n ≤ 2`.
fn log_n(n: f64) -> f64 {
    if n <= 2.0 {
        1.0
    } else {
        n.log2()
    }
}

fn log_k(k: u64) -> f64 {
    (k as f64).log2()
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn frac(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn calibrated<T: Exact>(x: &GroundSet<T>, seed: u64) -> Result<BigRational> {
    Ok(calibrate_d(x, &default_family(x, seed)?, &default_taus(x))?.value)
}

fn to_f64(q: &BigRational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Shared inputs of the grid suites.
struct GridCtx {
    k: u64,
    da: f64,
    db: f64,
    guard: Option<u128>,
}

/// `verify_lemma` with the default work guard.
pub fn verify_lemma(name: &str, manifest: &ExperimentManifest) -> Result<RatioReport> {
    verify(name.parse()?, manifest, &VerifyOptions::default())
}

pub fn verify(lemma: LemmaId, manifest: &ExperimentManifest, opts: &VerifyOptions) -> Result<RatioReport> {
    let a = manifest.set_a::<BigRational>()?;
    let mut report = RatioReport::new(lemma.name());
    match lemma {
        LemmaId::SchoenShkredov => schoen_shkredov(&a, manifest.seed, &mut report)?,
        LemmaId::E3 => e3(&a, manifest.seed, &mut report)?,
        LemmaId::RichTuple => {
            for m in [3, 4] {
                for tau in 1..=a.len() as u64 {
                    report.push(verify_rich_tuple_bound(&a, m, tau)?);
                }
            }
        }
        LemmaId::KRich | LemmaId::KProj => {
            let da = calibrated(&a, manifest.seed)?;
            let n = (a.len() * a.len()) as u64;
            let k = manifest.k_policy.resolve(n, to_f64(&da), to_f64(&da))?;
            if lemma == LemmaId::KRich {
                krich(&a, k, to_f64(&da), &mut report)?;
            } else {
                kproj(&a, k, to_f64(&da), &mut report)?;
            }
        }
        LemmaId::RichRich | LemmaId::PoorRich | LemmaId::PoorPoor => {
            let b = manifest.set_b::<BigRational>()?;
            let da = to_f64(&calibrated(&a, manifest.seed)?);
            let db = to_f64(&calibrated(&b, manifest.seed.wrapping_add(1))?);
            let n = (a.len() * b.len()) as u64;
            let ctx = GridCtx {
                k: manifest.k_policy.resolve(n, da, db)?,
                da,
                db,
                guard: opts.guard,
            };
            let g = Grid::new(a, b, &manifest.target_area)?;
            match g.integer_image() {
                IntegerImage::Grid(ig) => grid_suite(lemma, &ig, &ctx, &mut report)?,
                _ => grid_suite(lemma, &g, &ctx, &mut report)?,
            }
        }
    }
    Ok(report)
}

const FAMILY_NAMES: [&str; 4] = ["self", "dilate-2", "random-convex", "uniform-random"];

fn schoen_shkredov<T: Exact>(x: &GroundSet<T>, seed: u64, report: &mut RatioReport) -> Result<()> {
    let family = default_family(x, seed)?;
    let xl = x.len() as u128;
    for (name, y) in FAMILY_NAMES.iter().zip(&family) {
        let profile = rep_function(x, y);
        let yl = y.len() as u128;
        for tau in 1..=x.len() as u64 + 1 {
            let count = rich_diff_count(&profile, tau);
            let params = format!("|X|={} Y={name} |Y|={} tau={tau}", x.len(), y.len());
            report.push(RatioRow::asserted(
                "trivial",
                params.clone(),
                int(count),
                frac(xl * yl, tau as u128),
            )?);
            let t = tau as f64;
            report.push(RatioRow::report(
                "szt-constant",
                params,
                Value::int(count),
                (xl * yl * yl) as f64 / (t * t * t),
            ));
        }
    }
    let d = calibrate_d(x, &family, &default_taus(x))?;
    report.push(RatioRow::asserted(
        "d-calibrated",
        format!("|X|={}", x.len()),
        d.value,
        int(x.len() as u64),
    )?);
    Ok(())
}

fn e3<T: Exact>(a: &GroundSet<T>, seed: u64, report: &mut RatioReport) -> Result<()> {
    let d = to_f64(&calibrated(a, seed)?);
    let e = energy_k(a, 3)?;
    let m = a.len() as f64;
    report.push(RatioRow::report(
        "e3",
        format!("|A|={} d={}", a.len(), crate::harness::emit::format_real(d)),
        Value::Exact(BigRational::from_integer(e.value.into())),
        d * m * m * m * log_n(m),
    ));
    Ok(())
}

fn krich<T: Exact>(a: &GroundSet<T>, k: u64, d: f64, report: &mut RatioReport) -> Result<()> {
    let count = rich_points(a, k, false).count;
    let via_tuples = rich_tuple_count(a, 3, k)?;
    if count != via_tuples {
        return Err(Error::Assertion(format!(
            "k-rich points {count} differ from rich 3-tuples {via_tuples} at k={k}"
        )));
    }
    let n = (a.len() * a.len()) as f64;
    let kf = k as f64;
    report.push(RatioRow::report(
        "krich",
        format!("|A|={} n={n} k={k}", a.len()),
        Value::int(count),
        d * d * n * n * log_n(n) / (kf * kf * kf),
    ));
    let e = energy_kl(a, 2, 3)?;
    let al = a.len() as u128;
    report.push(RatioRow::report(
        "krich-via-tuples",
        format!("|A|={} k={k} d=|A|", a.len()),
        Value::int(count),
        to_f64(&BigRational::new(
            BigInt::from(al * al) * BigInt::from(e.value),
            BigInt::from(k).pow(3u32),
        )),
    ));
    Ok(())
}

fn kproj<T: Exact>(a: &GroundSet<T>, k: u64, d: f64, report: &mut RatioReport) -> Result<()> {
    let count = project_rich(a, k);
    let on_rich_diagonals = fixed_direction_rich_count(a, k);
    if count > on_rich_diagonals {
        return Err(Error::Assertion(format!(
            "projected k-rich points {count} exceed points on k-rich diagonals {on_rich_diagonals}"
        )));
    }
    let n = (a.len() * a.len()) as f64;
    let kf = k as f64;
    report.push(RatioRow::report(
        "kproj",
        format!("|A|={} n={n} k={k}", a.len()),
        Value::int(count),
        d * n.powf(1.5) / (kf * kf),
    ));
    Ok(())
}

fn grid_suite<T: Exact>(lemma: LemmaId, g: &Grid<T>, ctx: &GridCtx, report: &mut RatioReport) -> Result<()> {
    let counts = classify(g, ctx.k, ctx.guard)?;
    let n = g.n() as f64;
    let ln = log_n(n);
    let kf = ctx.k as f64;
    let (da, db) = (ctx.da, ctx.db);
    let params = format!("|A|={} |B|={} n={} k={}", g.a.len(), g.b.len(), g.n(), ctx.k);
    match lemma {
        LemmaId::RichRich => {
            report.push(RatioRow::report(
                "rich-rich",
                params.clone(),
                Value::int(counts.rr),
                da * da * db * n.powf(3.5) * ln / kf.powi(5) + n * n,
            ));
            let distinct = rich_rich_distinct_abscissae(g, ctx.k);
            let cap = rich_points(&g.a, ctx.k, false).count as u128 * project_rich(&g.b, ctx.k) as u128;
            if distinct as u128 > cap {
                return Err(Error::Assertion(format!(
                    "rich-rich solutions with distinct abscissae {distinct} exceed {cap}"
                )));
            }
            let equal = count_equal_abscissa_triangles(g)?;
            let (al, bl) = (g.a.len() as u128, g.b.len() as u128);
            let equal_cap = al * (bl * (bl - 1) / 2) * 2 * bl;
            if equal as u128 > equal_cap {
                return Err(Error::Assertion(format!(
                    "equal-abscissa triangles {equal} exceed {equal_cap}"
                )));
            }
            report.push(RatioRow::report("equal-abscissa", params, Value::int(equal), n * n));
        }
        LemmaId::PoorRich => {
            let bound = (da.powf(4.0 / 3.0) + db.powf(4.0 / 3.0)) * n.powf(2.5) * ln.powf(2.0 / 3.0)
                / kf.powf(5.0 / 3.0)
                + (da * da + db * db) * n * n * ln / (kf * kf)
                + n * n * log_k(ctx.k);
            report.push(RatioRow::report("poor-rich", params.clone(), Value::int(counts.pr), bound));
            report.push(RatioRow::report("rich-poor", params.clone(), Value::int(counts.rp), bound));
            if ctx.k >= 2 {
                sliced_incidences(g, ctx.k, counts.pr, &params, report)?;
            }
        }
        LemmaId::PoorPoor => {
            report.push(RatioRow::report(
                "poor-poor",
                params.clone(),
                Value::int(counts.pp),
                n * n * kf.powf(2.0 / 3.0) + n.powf(1.5) * kf * log_k(ctx.k),
            ));
            if ctx.k >= 2 {
                projected_incidences(g, ctx.k, counts.pp, &params, report)?;
            }
        }
        _ => unreachable!("not a grid lemma"),
    }
    Ok(())
}

fn class_size_row(label: &str, params: &str, i: u32, size: usize, cube: u128) -> Result<RatioRow> {
    RatioRow::asserted(
        label,
        format!("{params} i={i}"),
        int(size as u64),
        frac(cube, 1u128 << (i - 1)),
    )
}

/// Poor planes against rich points, one horizontal slice `z = z₀` at a time.
fn sliced_incidences<T: Exact>(
    g: &Grid<T>,
    k: u64,
    pr: u64,
    params: &str,
    report: &mut RatioReport,
) -> Result<()> {
    let classes = dyadic_plane_classes(g, k)?;
    let cube = (g.a.len() as u128).pow(3);
    for c in &classes {
        report.push(class_size_row("plane-class-size", params, c.i, c.size(), cube)?);
    }
    let rich = rich_points(&g.b, k, true).points.unwrap_or_default();
    let mut weighted = 0u128;
    let mut dyadic = 0u128;
    let mut st = 0f64;
    for z in g.b.iter() {
        let pts: Vec<PlanarPoint<T>> = rich
            .iter()
            .filter(|q| q[2] == *z)
            .map(|q| PlanarPoint::new(q[0].clone(), q[1].clone()))
            .collect();
        for c in &classes {
            let planes: Vec<_> = c.members.iter().map(|(h, _)| h.clone()).collect();
            let lines = slice_lines(g, z, &planes)?;
            if lines.len() != planes.len() {
                return Err(Error::Assertion("slice dropped a plane".into()));
            }
            let lines: Vec<_> = lines
                .into_iter()
                .zip(&c.members)
                .map(|(l, (_, w))| l.with_weight(*w))
                .collect();
            weighted += count_incidences(&pts, &lines, true)? as u128;
            let plain = count_incidences(&pts, &lines, false)? as u128;
            dyadic += plain << c.i;
            st += (1u64 << c.i) as f64 * st_bound::<f64>(pts.len() as u64, lines.len() as u64);
        }
    }
    if weighted != 3 * pr as u128 {
        return Err(Error::Assertion(format!(
            "weighted sliced incidences {weighted} != 3 x poor-rich {pr}"
        )));
    }
    if weighted > dyadic {
        return Err(Error::Assertion(format!(
            "weighted sliced incidences {weighted} exceed dyadic majorant {dyadic}"
        )));
    }
    report.push(RatioRow::report(
        "sliced-incidences",
        params.to_string(),
        Value::Exact(frac(dyadic, 1)),
        st,
    ));
    Ok(())
}

/// Poor points against poor planes after projecting both onto `x + y + z = 1`.
fn projected_incidences<T: Exact>(
    g: &Grid<T>,
    k: u64,
    pp: u64,
    params: &str,
    report: &mut RatioReport,
) -> Result<()> {
    let planes = dyadic_plane_classes(g, k)?;
    let points = dyadic_point_classes(&g.b, k)?;
    let (ca, cb) = ((g.a.len() as u128).pow(3), (g.b.len() as u128).pow(3));
    for c in &points {
        report.push(class_size_row("point-class-lines", params, c.i, c.line_count(), cb)?);
    }
    for c in &planes {
        report.push(class_size_row("plane-class-size", params, c.i, c.size(), ca)?);
    }
    let mut weighted = 0u128;
    let mut dyadic = 0u128;
    let mut st = 0f64;
    for s in &points {
        let unit: Vec<_> = s.members.iter().map(|(q, _)| (q.clone(), 1u64)).collect();
        for h in &planes {
            let (pts, lines) = eta_projection(&unit, &h.members)?;
            weighted += count_incidences(&pts, &lines, true)? as u128;
            let plain = count_incidences(&pts, &lines, false)? as u128;
            dyadic += plain << (s.i + h.i);
            st += (1u64 << (s.i + h.i)) as f64 * st_bound::<f64>(pts.len() as u64, lines.len() as u64);
        }
    }
    if weighted != 3 * pp as u128 {
        return Err(Error::Assertion(format!(
            "weighted projected incidences {weighted} != 3 x poor-poor {pp}"
        )));
    }
    if weighted > dyadic {
        return Err(Error::Assertion(format!(
            "weighted projected incidences {weighted} exceed dyadic majorant {dyadic}"
        )));
    }
    report.push(RatioRow::report(
        "projected-incidences",
        params.to_string(),
        Value::Exact(frac(dyadic, 1)),
        st,
    ));
    Ok(())
}
