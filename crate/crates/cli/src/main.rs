use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use unitri::bounds::{BoundInput, BoundsSummary, LogMode};
use unitri::energy::{energy_k, energy_kl};
use unitri::grid::{classify, count_unit_triangles, count_unit_triangles_bruteforce, Grid, BRUTE_FORCE_GUARD, INCIDENCE_GUARD};
use unitri::harness::emit::{self, Format, Tabular};
use unitri::harness::manifest::{ExperimentManifest, KPolicy, SetSource};
use unitri::harness::sweep::{run_sweep, SweepOptions};
use unitri::harness::verify::{verify, LemmaId, VerifyOptions};
use unitri::scalar::{format_rational, parse_rational, Exact};
use unitri::sets::{calibrate_d, default_family, default_taus, GroundSet};
use unitri::{Error, Rational, Result};

#[derive(Parser, Debug)]
#[command(name = "unitri", version, about = "Exact unit-area triangle counts on grids A x B")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Experiment manifest (JSON); command-line flags override its fields.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Target triangle area as `p/q`.
    #[arg(long, global = true)]
    area: Option<String>,
    /// Richness threshold: an integer, `formula` or `search`.
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Disable the work guards of the exact counters.
    #[arg(long, global = true)]
    guard_override: bool,
    /// Output file; defaults to the manifest outputs, then stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock times (output is then run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Debug, Clone)]
struct Sets {
    /// Abscissa set: a ground-set file, a generator spec such as `squares:8`, or elements such as `0,1,3`.
    #[arg(long)]
    a: Option<String>,
    /// Ordinate set; defaults to A.
    #[arg(long)]
    b: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a generated ground set, one element per line.
    GenSet {
        /// Generator spec, e.g. `geometric:8:2`.
        spec: String,
    },
    /// Count unit-area triangles.
    Count {
        #[command(flatten)]
        sets: Sets,
        /// `incidence` or `brute-force`.
        #[arg(long, default_value = "incidence")]
        method: String,
    },
    /// Split the count into rich/poor classes.
    Decompose {
        #[command(flatten)]
        sets: Sets,
    },
    /// Higher energies E_k or E_{k,l} of A.
    Energy {
        #[command(flatten)]
        sets: Sets,
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Exponent l of E_{k,l}; omitted means E_k.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Calibrate the Szemeredi-Trotter parameter d(A) on the default family.
    CalibrateD {
        #[command(flatten)]
        sets: Sets,
    },
    /// Run a lemma-verification suite.
    Verify {
        lemma: String,
        #[command(flatten)]
        sets: Sets,
    },
    /// Unit-area counts on A = B for a range of sizes, with a fitted exponent.
    Sweep {
        #[command(flatten)]
        sets: Sets,
        /// Comma-separated sizes m.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Evaluate the upper-bound expressions.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        da: f64,
        #[arg(long, default_value_t = 1.0)]
        db: f64,
        /// Treat every logarithm as 1.
        #[arg(long)]
        suppress_logs: bool,
    },
}

/// One single-command result row with a fixed column order.
struct Row(Vec<(&'static str, serde_json::Value)>);

impl serde::Serialize for Row {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Tabular for Row {
    fn header(&self) -> Vec<&'static str> {
        self.0.iter().map(|(k, _)| *k).collect()
    }

    fn records(&self) -> Vec<Vec<String>> {
        vec![self
            .0
            .iter()
            .map(|(_, v)| match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect()]
    }
}

struct Ctx {
    global: Global,
    format: Format,
}

impl Ctx {
    fn manifest(&self, sets: Option<&Sets>) -> Result<ExperimentManifest> {
        let g = &self.global;
        let mut m = match &g.manifest {
            Some(p) => ExperimentManifest::load(p)?,
            None => {
                let a = sets
                    .and_then(|s| s.a.as_deref())
                    .ok_or_else(|| Error::Usage("--a or --manifest is required".into()))?;
                ExperimentManifest::new("cli", SetSource::from_arg(a)?)
            }
        };
        if let Some(s) = sets {
            if g.manifest.is_some() {
                if let Some(a) = &s.a {
                    m.a = SetSource::from_arg(a)?;
                }
            }
            if let Some(b) = &s.b {
                m.b = Some(SetSource::from_arg(b)?);
            }
        }
        if let Some(seed) = g.seed {
            m.seed = seed;
        }
        if let Some(area) = &g.area {
            m.target_area = parse_rational(area).map_err(|e| Error::Usage(e.to_string()))?;
        }
        if let Some(k) = &g.k {
            m.k_policy = k.parse::<KPolicy>()?;
        }
        m.validate()?;
        Ok(m)
    }

    fn guard(&self) -> Option<u128> {
        (!self.global.guard_override).then_some(INCIDENCE_GUARD)
    }

    fn elapsed(&self, start: Instant) -> Option<u64> {
        self.global.timing.then(|| start.elapsed().as_millis() as u64)
    }

    /// Writes to `--out`, else the manifest's outputs, else stdout.
    fn output<R: Tabular + serde::Serialize>(&self, report: &R, manifest: Option<&ExperimentManifest>) -> Result<()> {
        if let Some(out) = &self.global.out {
            return emit::emit(report, self.format, out);
        }
        if let Some(m) = manifest {
            let mut wrote = false;
            if let Some(p) = &m.outputs.csv {
                emit::emit(report, Format::Csv, m.output_path(p))?;
                wrote = true;
            }
            if let Some(p) = &m.outputs.json {
                emit::emit(report, Format::Json, m.output_path(p))?;
                wrote = true;
            }
            if wrote {
                return Ok(());
            }
        }
        print!("{}", emit::render(report, self.format)?);
        Ok(())
    }
}

fn grid(m: &ExperimentManifest) -> Result<Grid<Rational>> {
    Grid::new(m.set_a()?, m.set_b()?, &m.target_area)
}

fn with_elapsed(mut row: Row, ms: Option<u64>) -> Row {
    if let Some(ms) = ms {
        row.0.push(("elapsed_ms", ms.into()));
    }
    row
}

fn run(cli: Cli) -> Result<()> {
    let format: Format = cli.global.format.parse()?;
    let ctx = Ctx {
        global: cli.global,
        format,
    };
    match cli.command {
        Command::GenSet { spec } => {
            let m = ctx.manifest(Some(&Sets {
                a: Some(spec),
                b: None,
            }))?;
            let set: GroundSet<Rational> = m.set_a()?;
            match &ctx.global.out {
                Some(p) => std::fs::write(p, set.to_text()).map_err(|e| Error::io(p, e))?,
                None => print!("{}", set.to_text()),
            }
        }
        Command::Count { sets, method } => {
            let m = ctx.manifest(Some(&sets))?;
            let g = grid(&m)?;
            let start = Instant::now();
            let count = match method.as_str() {
                "incidence" => count_unit_triangles(&g, ctx.guard())?.triangles,
                "brute-force" => count_unit_triangles_bruteforce(
                    &g,
                    (!ctx.global.guard_override).then_some(BRUTE_FORCE_GUARD),
                )?,
                other => return Err(Error::Usage(format!("unknown method {other:?}"))),
            };
            let r = Row(vec![
                ("nA", g.a.len().into()),
                ("nB", g.b.len().into()),
                ("n", g.n().into()),
                ("s", format_rational(&m.target_area).into()),
                ("count", count.into()),
                ("method", method.into()),
            ]);
            ctx.output(&with_elapsed(r, ctx.elapsed(start)), Some(&m))?;
        }
        Command::Decompose { sets } => {
            let m = ctx.manifest(Some(&sets))?;
            let g = grid(&m)?;
            let da = calibrate_d(&g.a, &default_family(&g.a, m.seed)?, &default_taus(&g.a))?;
            let db = calibrate_d(&g.b, &default_family(&g.b, m.seed.wrapping_add(1))?, &default_taus(&g.b))?;
            let k = m.k_policy.resolve(g.n() as u64, da.value.approx_f64(), db.value.approx_f64())?;
            ctx.output(&classify(&g, k, ctx.guard())?, Some(&m))?;
        }
        Command::Energy { sets, order, l } => {
            let m = ctx.manifest(Some(&sets))?;
            let a: GroundSet<Rational> = m.set_a()?;
            let e = match l {
                None => energy_k(&a, order)?,
                Some(l) => energy_kl(&a, order, l)?,
            };
            let r = Row(vec![
                ("size", a.len().into()),
                ("k", e.k.into()),
                ("l", e.l.into()),
                ("value", e.value.to_string().into()),
            ]);
            ctx.output(&r, Some(&m))?;
        }
        Command::CalibrateD { sets } => {
            let m = ctx.manifest(Some(&sets))?;
            let a: GroundSet<Rational> = m.set_a()?;
            let d = calibrate_d(&a, &default_family(&a, m.seed)?, &default_taus(&a))?;
            let witnesses: Vec<String> = d
                .witnesses
                .iter()
                .map(|w| format!("{}:{}:{}", w.family_index, w.tau, w.count))
                .collect();
            let r = Row(vec![
                ("size", a.len().into()),
                ("d", format_rational(&d.value).into()),
                ("alpha", d.alpha.into()),
                ("witnesses", witnesses.join(" ").into()),
            ]);
            ctx.output(&r, Some(&m))?;
        }
        Command::Verify { lemma, sets } => {
            let lemma: LemmaId = lemma.parse()?;
            let m = ctx.manifest(Some(&sets))?;
            let report = verify(lemma, &m, &VerifyOptions { guard: ctx.guard() })?;
            ctx.output(&report, Some(&m))?;
        }
        Command::Sweep { sets, sizes } => {
            let mut m = ctx.manifest(Some(&sets))?;
            if !sizes.is_empty() {
                m.sweep_sizes = sizes;
            }
            let opts = SweepOptions {
                timing: ctx.global.timing,
                guard: ctx.guard(),
            };
            ctx.output(&run_sweep(&m, &opts)?, Some(&m))?;
        }
        Command::Bounds {
            n,
            da,
            db,
            suppress_logs,
        } => {
            let mode = if suppress_logs {
                LogMode::Suppressed
            } else {
                LogMode::Base2
            };
            let inp = BoundInput::new(n, da, db, mode)?;
            let k = match ctx.global.k.as_deref() {
                None | Some("search") => None,
                Some(s) => Some(s.parse::<KPolicy>()?.resolve(n, da, db)?),
            };
            ctx.output(&BoundsSummary::evaluate(&inp, k)?, None)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.global.jobs;
    let result = match jobs {
        Some(0) => Err(Error::Usage("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))
            .and_then(|pool| pool.install(|| run(cli))),
        None => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
