//! Flag definitions. Rational flags are validated at parse time and stored in
//! canonical `num/den` text so the manifest echoes exactly what was used.

use clap::{Args, ValueEnum};
use serde::Serialize;

use somos::identities::{Fault, IdentityId};
use somos::kernel::{format_rational, parse_rational, Rational};

pub fn rational_arg(s: &str) -> Result<String, String> {
    parse_rational(s).map(|r| format_rational(&r)).map_err(|e| e.to_string())
}

pub fn rat(s: &str) -> Rational {
    parse_rational(s).expect("validated by clap")
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct RatList(pub Vec<String>);

impl RatList {
    pub fn values(&self) -> Vec<Rational> {
        self.0.iter().map(|s| rat(s)).collect()
    }
}

pub fn rat_list_arg(s: &str) -> Result<RatList, String> {
    s.split(',').map(rational_arg).collect::<Result<_, _>>().map(RatList)
}

/// `lo..hi`, both ends included.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

pub fn range_arg(s: &str) -> Result<IndexRange, String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected lo..hi, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad bound `{t}`: {e}"));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(IndexRange { lo, hi })
}

pub fn identity_arg(s: &str) -> Result<IdentityId, String> {
    s.parse()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum EqKind {
    #[value(name = "somos4")]
    #[serde(rename = "somos4")]
    Somos4,
    #[value(name = "somosN")]
    #[serde(rename = "somosN")]
    SomosN,
    #[value(name = "gale-robinson")]
    #[serde(rename = "gale-robinson")]
    GaleRobinson,
    #[value(name = "linear")]
    #[serde(rename = "linear")]
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultArg {
    VajdaSignFlip,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::VajdaSignFlip => Fault::VajdaSignFlip,
        }
    }
}

/// Coefficients and seeds of a three-term recurrence.
#[derive(Args, Clone, Debug, Serialize)]
pub struct RecurrenceArgs {
    #[arg(long = "N", help = "order N of Somos-N / Gale-Robinson")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    #[arg(long, help = "Gale-Robinson shift p")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[arg(long, help = "Gale-Robinson shift q")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[arg(long, default_value = "1", value_parser = rational_arg, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "1", value_parser = rational_arg, allow_hyphen_values = true)]
    pub beta: String,
    #[arg(long, value_parser = rat_list_arg, allow_hyphen_values = true, help = "seeds c1,c2,... (default all ones)")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<RatList>,
}

/// `T_{n+2} = P·T_{n+1} − Q·T_n` with seeds `T₀, T₁`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct LinearArgs {
    #[arg(long = "P", default_value = "1", value_parser = rational_arg, allow_hyphen_values = true)]
    #[serde(rename = "P")]
    pub big_p: String,
    #[arg(long = "Q", default_value = "-1", value_parser = rational_arg, allow_hyphen_values = true)]
    #[serde(rename = "Q")]
    pub big_q: String,
    #[arg(long, default_value = "0", value_parser = rational_arg, allow_hyphen_values = true)]
    pub t0: String,
    #[arg(long, default_value = "1", value_parser = rational_arg, allow_hyphen_values = true)]
    pub t1: String,
}

impl LinearArgs {
    pub fn params(&self) -> somos::LinearParams {
        somos::LinearParams::new(rat(&self.big_p), rat(&self.big_q), rat(&self.t0), rat(&self.t1))
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct TrialArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct FormatArg {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}
