//! Run configuration: an optional TOML file overlaid by command-line flags,
//! validated into a [`RunConfig`] before anything is computed.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use dunkl_core::{parse_rational, Family, SystemSpec, MAX_RANK};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;

/// Digits accepted in `DUNKL_PRECISION`.
pub const PRECISION_RANGE: std::ops::RangeInclusive<u32> = 16..=4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A multiplicity as written in a config file: `1`, `0.5` or `"5/2"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatText {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RatText {
    fn to_rational(&self) -> Result<BigRational, String> {
        let text = match self {
            RatText::Int(i) => i.to_string(),
            RatText::Float(f) => f.to_string(),
            RatText::Text(s) => s.clone(),
        };
        parse_rational(&text).map_err(|e| e.to_string())
    }
}

/// Everything a config file may set. Every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub system: Option<String>,
    pub rank: Option<usize>,
    pub order: Option<usize>,
    pub mu: Option<Vec<RatText>>,
    pub k0: Option<RatText>,
    pub k1: Option<RatText>,
    pub alpha: Option<RatText>,
    pub nmax: Option<usize>,
    pub qpoints: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// TOML file with any of the keys below (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Reflection group family: z2 (Z2^N), a (S_N), b (hyperoctahedral), dihedral.
    #[arg(long, global = true)]
    pub system: Option<String>,
    /// Rank N (dimension of the ambient space).
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Dihedral order m of I2(m).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Z2 multiplicities: one shared value or one per axis, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<String>>,
    /// Multiplicity of the first orbit (B: long roots, A and dihedral: k).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k0: Option<String>,
    /// Multiplicity of the second orbit (B: short roots, dihedral: odd roots).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k1: Option<String>,
    /// Jack parameter for family a; sets k = 1/alpha.
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Largest total degree of the Hermite basis.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Quadrature points per axis.
    #[arg(long, global = true)]
    pub qpoints: Option<usize>,
    /// Absolute tolerance for the certified kernel tail.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for sampled points and random polynomials.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Output format for tables.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: SystemSpec,
    pub n_max: usize,
    /// `None` picks a default by rank.
    pub qpoints: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Value of `DUNKL_PRECISION`, if set. Quadrature recurrences are built
    /// in exact arithmetic, which already exceeds any digit count.
    pub precision: Option<u32>,
}

pub const DEFAULT_NMAX: usize = 6;
pub const DEFAULT_TOL: f64 = 1e-16;
pub const DEFAULT_SEED: u64 = 20;

fn rational(flag: &str, text: &str) -> Result<BigRational, String> {
    parse_rational(text).map_err(|e| format!("--{flag}: {e}"))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, precision: Option<&str>) -> Result<Self, String> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let family_text = args.system.clone().or(file.system).unwrap_or_else(|| "z2".into());
        let family = Family::from_str(&family_text).map_err(|e| e.to_string())?;

        let flag_or_file = |flag: &Option<String>, file: &Option<RatText>, name: &str| -> Result<Option<BigRational>, String> {
            match (flag, file) {
                (Some(s), _) => rational(name, s).map(Some),
                (None, Some(v)) => v.to_rational().map(Some),
                (None, None) => Ok(None),
            }
        };
        let k0 = flag_or_file(&args.k0, &file.k0, "k0")?;
        let k1 = flag_or_file(&args.k1, &file.k1, "k1")?;
        let alpha = flag_or_file(&args.alpha, &file.alpha, "alpha")?;
        let mu: Option<Vec<BigRational>> = match (&args.mu, &file.mu) {
            (Some(v), _) => Some(v.iter().map(|s| rational("mu", s)).collect::<Result<_, _>>()?),
            (None, Some(v)) => Some(v.iter().map(RatText::to_rational).collect::<Result<_, _>>()?),
            (None, None) => None,
        };
        let order = args.order.or(file.order);
        let one = BigRational::one();

        let (rank, k) = match family {
            Family::Z2Product => {
                let mu = mu.unwrap_or_else(|| vec![one.clone()]);
                let rank = args.rank.or(file.rank).unwrap_or(mu.len());
                (rank, mu)
            }
            Family::A => {
                let k = match (alpha, k0) {
                    (Some(_), Some(_)) => return Err("give either --alpha or --k0 for family a, not both".into()),
                    (Some(a), None) if a.is_zero() => return Err("--alpha must be nonzero".into()),
                    (Some(a), None) => a.recip(),
                    (None, Some(k)) => k,
                    (None, None) => one.clone(),
                };
                (args.rank.or(file.rank).unwrap_or(3), vec![k])
            }
            Family::B => {
                let k0 = k0.unwrap_or_else(|| one.clone());
                let k1 = k1.unwrap_or_else(|| k0.clone());
                (args.rank.or(file.rank).unwrap_or(2), vec![k0, k1])
            }
            Family::Dihedral => {
                let mut k = vec![k0.unwrap_or_else(|| one.clone())];
                k.extend(k1);
                (2, k)
            }
        };
        if rank == 0 || rank > MAX_RANK {
            return Err(format!("rank must lie in 1..={MAX_RANK}, got {rank}"));
        }
        if family != Family::Dihedral && order.is_some() {
            return Err("--order only applies to the dihedral family".into());
        }
        let order = match family {
            Family::Dihedral => Some(order.ok_or("the dihedral family needs --order")?),
            _ => None,
        };
        let spec = SystemSpec::new(family, rank, order, &k).map_err(|e| e.to_string())?;
        spec.build().map_err(|e| e.to_string())?;

        let n_max = args.nmax.or(file.nmax).unwrap_or(DEFAULT_NMAX);
        let qpoints = args.qpoints.or(file.qpoints);
        if qpoints == Some(0) {
            return Err("--qpoints must be positive".into());
        }
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(format!("--tol must be positive, got {tol}"));
        }
        let precision = match precision {
            None => None,
            Some(text) => {
                let digits: u32 = text
                    .trim()
                    .parse()
                    .map_err(|_| format!("DUNKL_PRECISION must be a digit count, got `{text}`"))?;
                if !PRECISION_RANGE.contains(&digits) {
                    return Err(format!(
                        "DUNKL_PRECISION must lie in {}..={}, got {digits}",
                        PRECISION_RANGE.start(),
                        PRECISION_RANGE.end()
                    ));
                }
                Some(digits)
            }
        };
        Ok(RunConfig {
            spec,
            n_max,
            qpoints,
            tol,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
            precision,
        })
    }

    pub fn rank(&self) -> usize {
        self.spec.rank
    }

    pub fn points(&self) -> usize {
        self.qpoints.unwrap_or_else(|| dunkl_core::suite::default_points(self.rank()))
    }
}
