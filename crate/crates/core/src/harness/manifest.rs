use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bounds::{optimal_k, BoundInput, LogMode};
use crate::error::{Error, Result};
use crate::scalar::{self, Exact};
use crate::sets::{gen_set, GenKind, GroundSet, RNG_ALGORITHM};

/// A generator with an optional size (sweeps supply the size themselves).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GenKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl GeneratorSpec {
    pub fn generate<T: Exact>(&self, seed: u64) -> Result<GroundSet<T>> {
        let m = self
            .m
            .ok_or_else(|| Error::Config(format!("{} generator needs a size m", self.kind.name())))?;
        gen_set(&self.kind, m, seed)
    }
}

/// Compact form `kind:m[:param]`, e.g. `squares:8`, `geometric:6:2`,
/// `poly-convex:8:0,1,1`, `arithmetic:5:1/2:1/3`, `uniform-random:10:500`.
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or("");
        let m = parts
            .next()
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Usage(format!("bad generator size in {s:?}")))
            })
            .transpose()?;
        let rest: Vec<&str> = parts.collect();
        let rat = |v: &str| scalar::parse_rational(v).map_err(|e| Error::Usage(e.to_string()));
        let kind = match (kind, rest.as_slice()) {
            ("squares", []) => GenKind::Squares,
            ("random-convex", []) => GenKind::RandomConvex,
            ("geometric", [r]) => GenKind::Geometric { ratio: rat(r)? },
            ("geometric", []) => GenKind::Geometric {
                ratio: BigRational::from_integer(2.into()),
            },
            ("poly-convex", [c]) => GenKind::PolyConvex {
                coefficients: c.split(',').map(rat).collect::<Result<_>>()?,
            },
            ("arithmetic", []) => GenKind::Arithmetic {
                start: BigRational::from_integer(0.into()),
                step: BigRational::one(),
            },
            ("arithmetic", [a, d]) => GenKind::Arithmetic {
                start: rat(a)?,
                step: rat(d)?,
            },
            ("uniform-random", []) => GenKind::UniformRandom { range: None },
            ("uniform-random", [r]) => GenKind::UniformRandom {
                range: Some(
                    r.parse()
                        .map_err(|_| Error::Usage(format!("bad range in {s:?}")))?,
                ),
            },
            _ => return Err(Error::Usage(format!("unrecognized generator spec {s:?}"))),
        };
        Ok(GeneratorSpec { kind, m })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetSource {
    Generator(GeneratorSpec),
    /// Ground-set file; relative paths resolve against the manifest directory.
    File(PathBuf),
    /// Inline `p/q` literals.
    Elements(Vec<String>),
}

impl SetSource {
    /// Interprets a command-line argument: an existing file, or a compact
    /// generator spec.
    pub fn from_arg(arg: &str) -> Result<Self> {
        if Path::new(arg).is_file() {
            return Ok(SetSource::File(arg.into()));
        }
        if let Ok(g) = arg.parse::<GeneratorSpec>() {
            return Ok(SetSource::Generator(g));
        }
        // Inline elements: "0,1,3" or "1/2,2".
        let elems: Vec<String> = arg.split(',').map(|t| t.trim().to_string()).collect();
        if elems.iter().all(|t| t.parse::<crate::Rational>().is_ok()) {
            return Ok(SetSource::Elements(elems));
        }
        Err(Error::Usage(format!(
            "{arg:?} is neither a ground-set file, a generator spec nor an element list"
        )))
    }

    pub fn resolve<T: Exact>(&self, seed: u64, base_dir: Option<&Path>) -> Result<GroundSet<T>> {
        match self {
            SetSource::Generator(g) => g.generate(seed),
            SetSource::File(p) => {
                let path = match base_dir {
                    Some(d) if p.is_relative() => d.join(p),
                    _ => p.clone(),
                };
                GroundSet::load(path)
            }
            SetSource::Elements(v) => GroundSet::from_unsorted(
                v.iter()
                    .map(|s| scalar::parse_scalar(s))
                    .collect::<Result<Vec<T>>>()?,
            ),
        }
    }
}

/// How the richness threshold `k` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KPolicy {
    Explicit(u64),
    /// `⌊n^{9/34}(d²(A)d(B) log n)^{3/17}⌋`.
    #[default]
    Formula,
    /// Integer minimiser of the five-term bound.
    Search,
}

impl FromStr for KPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "formula" => Ok(KPolicy::Formula),
            "search" => Ok(KPolicy::Search),
            v => v
                .parse::<u64>()
                .ok()
                .filter(|&k| k >= 1)
                .map(KPolicy::Explicit)
                .ok_or_else(|| Error::Usage(format!("k must be a positive integer, formula or search; got {v:?}"))),
        }
    }
}

impl KPolicy {
    pub fn resolve(&self, n: u64, da: f64, db: f64) -> Result<u64> {
        match self {
            KPolicy::Explicit(k) => Ok(*k),
            KPolicy::Formula | KPolicy::Search => {
                let inp = BoundInput::new(n.max(2), da, db, LogMode::Base2)?;
                let o = optimal_k(&inp)?;
                Ok(if *self == KPolicy::Formula {
                    o.formula
                } else {
                    o.search
                })
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

fn default_area() -> BigRational {
    BigRational::one()
}

fn default_rng() -> String {
    RNG_ALGORITHM.to_string()
}

/// Everything needed to reproduce an experiment bit for bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rng")]
    pub rng: String,
    pub a: SetSource,
    /// Defaults to the same source as `a` (with the same seed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<SetSource>,
    #[serde(default = "default_area", with = "scalar::rational_str")]
    pub target_area: BigRational,
    #[serde(default)]
    pub k_policy: KPolicy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_sizes: Vec<usize>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentManifest {
    pub fn new(id: impl Into<String>, a: SetSource) -> Self {
        ExperimentManifest {
            id: id.into(),
            seed: 0,
            rng: default_rng(),
            a,
            b: None,
            target_area: default_area(),
            k_policy: KPolicy::default(),
            sweep_sizes: Vec::new(),
            outputs: Outputs::default(),
            base_dir: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: ExperimentManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m = Self::parse(&text)?;
        m.base_dir = path.parent().map(Path::to_path_buf);
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rng != RNG_ALGORITHM {
            return Err(Error::Config(format!(
                "manifest requests rng {:?}, only {RNG_ALGORITHM:?} is available",
                self.rng
            )));
        }
        if self.target_area <= BigRational::from_integer(0.into()) {
            return Err(Error::Config("target area must be positive".into()));
        }
        Ok(())
    }

    pub fn set_a<T: Exact>(&self) -> Result<GroundSet<T>> {
        self.a.resolve(self.seed, self.base_dir.as_deref())
    }

    pub fn set_b<T: Exact>(&self) -> Result<GroundSet<T>> {
        match &self.b {
            Some(b) => b.resolve(self.seed.wrapping_add(1), self.base_dir.as_deref()),
            None => self.set_a(),
        }
    }

    /// Resolves an output path against the manifest directory.
    pub fn output_path(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_generator_specs() {
        let g: GeneratorSpec = "squares:4".parse().unwrap();
        assert_eq!(g.generate::<i64>(0).unwrap().as_slice(), &[0, 1, 4, 9]);
        let g: GeneratorSpec = "geometric:4:3".parse().unwrap();
        assert_eq!(g.generate::<i64>(0).unwrap().as_slice(), &[1, 3, 9, 27]);
        let g: GeneratorSpec = "poly-convex:3:1,0,2".parse().unwrap();
        assert_eq!(g.generate::<i64>(0).unwrap().as_slice(), &[1, 3, 9]);
        let g: GeneratorSpec = "uniform-random:5:100".parse().unwrap();
        assert_eq!(g.generate::<i64>(4).unwrap().len(), 5);
        assert!("bogus:3".parse::<GeneratorSpec>().is_err());
        assert!("squares:x".parse::<GeneratorSpec>().is_err());
        let g: GeneratorSpec = "squares".parse().unwrap();
        assert!(g.generate::<i64>(0).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let text = r#"{
            "id": "t",
            "seed": 5,
            "a": {"generator": {"kind": "geometric", "ratio": "3/2", "m": 4}},
            "b": {"elements": ["0", "1/2", "2"]},
            "target_area": "1/2",
            "k_policy": {"explicit": 3},
            "sweep_sizes": [4, 8]
        }"#;
        let m = ExperimentManifest::parse(text).unwrap();
        assert_eq!(m.k_policy, KPolicy::Explicit(3));
        assert_eq!(m.set_a::<BigRational>().unwrap().len(), 4);
        assert_eq!(m.set_b::<BigRational>().unwrap().len(), 3);
        let again = ExperimentManifest::parse(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn manifest_rejects_unknown_rng_and_fields() {
        let bad = r#"{"id": "t", "rng": "pcg", "a": {"elements": ["1"]}}"#;
        assert!(matches!(ExperimentManifest::parse(bad), Err(Error::Config(_))));
        let bad = r#"{"id": "t", "a": {"elements": ["1"]}, "colour": 1}"#;
        assert!(ExperimentManifest::parse(bad).is_err());
    }

    #[test]
    fn k_policy_parsing() {
        assert_eq!("4".parse::<KPolicy>().unwrap(), KPolicy::Explicit(4));
        assert_eq!("formula".parse::<KPolicy>().unwrap(), KPolicy::Formula);
        assert!("0".parse::<KPolicy>().is_err());
        assert_eq!(KPolicy::Explicit(7).resolve(100, 1.0, 1.0).unwrap(), 7);
        assert!(KPolicy::Formula.resolve(1 << 20, 1.0, 1.0).unwrap() >= 1);
    }
}
