//! Command-line flags and the JSON config file that can supply their
//! defaults.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "jetcircle", version, about = "Jet-space point counts, circle-method checks and bound certificates over F_p[t]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact counts #M_m, #M_{1,m}, or a normalised trend over primes.
    Count,
    /// Exponential-sum identities and inequalities on small instances.
    Circle,
    /// Certificates for the final rational inequalities.
    Bounds,
    /// Smoothness of the form over extensions of F_p.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKindArg {
    Mm,
    M1m,
    LwTrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleCheck {
    Orthogonality,
    MajorIdentity,
    Weyl,
    Shrink,
    TVanishing,
    NCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Spectrum,
    Collapsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsAction {
    Certify,
    PaperIdentities,
    Eval,
}

/// Every flag is optional here so that a config file can fill the gaps.
#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct Opts {
    /// JSON file with default values for any of the flags below.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// The prime p.
    #[arg(long, visible_alias = "p", global = true)]
    pub q: Option<u32>,
    /// Comma-separated primes; produces a CSV sweep.
    #[arg(long, value_delimiter = ',', global = true)]
    pub primes: Option<Vec<u32>>,
    /// conic, fermat, random, or a path to a form file.
    #[arg(long, global = true)]
    pub form: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub d: Option<usize>,
    #[arg(long, global = true)]
    pub e: Option<usize>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Genus, for the bounds subcommand.
    #[arg(long, global = true)]
    pub g: Option<usize>,

    #[arg(long, value_enum, global = true)]
    pub kind: Option<CountKindArg>,
    #[arg(long, value_enum, global = true)]
    pub check: Option<CircleCheck>,
    #[arg(long, value_enum, global = true)]
    pub route: Option<RouteArg>,
    /// Use the pair sums S(alpha, beta) where a check has a pair version.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub pairs: bool,
    #[arg(long, value_enum, global = true)]
    pub action: Option<BoundsAction>,
    /// canonical or terminal.
    #[arg(long, global = true)]
    pub mode: Option<String>,

    #[arg(long, global = true)]
    pub e_from: Option<i64>,
    #[arg(long, global = true)]
    pub e_to: Option<i64>,
    #[arg(long, global = true)]
    pub m_from: Option<i64>,
    #[arg(long, global = true)]
    pub m_to: Option<i64>,
    /// Overrides the threshold n+1 taken from the theorem rows.
    #[arg(long = "n-plus-1", global = true)]
    #[serde(rename = "n-plus-1")]
    pub n_plus_1: Option<i64>,
    #[arg(long, global = true)]
    pub d_alpha: Option<i64>,
    #[arg(long, global = true)]
    pub d_beta: Option<i64>,
    #[arg(long, global = true)]
    pub g_max: Option<i64>,
    #[arg(long, global = true)]
    pub d_max: Option<i64>,

    /// Functionals alpha with deg(alpha mod t) at most this are all checked.
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    /// Extra seeded random functionals.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub y_samples: Option<usize>,
    #[arg(long, global = true)]
    pub slices: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub s: Option<usize>,
    /// Largest extension degree searched by `smooth`.
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    #[arg(long, global = true)]
    pub precision_cap: Option<u32>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ceiling on enumerated operations.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Raise the ceiling to 1e11.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub force: bool,
    #[arg(long, env = "JETCIRCLE_WORKERS", global = true)]
    #[serde(skip)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Leave the timestamp out of reports.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timestamp: bool,
}

macro_rules! fill {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.take(); } )*
    };
}

impl Opts {
    /// Flags win; the config file fills whatever was not given.
    pub fn merge(mut self, mut cfg: Opts) -> Opts {
        fill!(self, cfg; q, primes, form, n, d, e, m, g, kind, check, route, action, mode,
            e_from, e_to, m_from, m_to, n_plus_1, d_alpha, d_beta, g_max, d_max,
            max_degree, samples, y_samples, slices, k, s, k_max, precision_cap, seed, budget);
        self.pairs |= cfg.pairs;
        self.force |= cfg.force;
        self
    }

    pub fn load_config(path: &Path) -> Result<Opts> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cli = Opts { q: Some(5), ..Default::default() };
        let cfg: Opts = serde_json::from_str(r#"{"q": 3, "e": 2, "form": "conic", "pairs": true}"#).unwrap();
        let m = cli.merge(cfg);
        assert_eq!(m.q, Some(5));
        assert_eq!(m.e, Some(2));
        assert_eq!(m.form.as_deref(), Some("conic"));
        assert!(m.pairs);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<Opts>(r#"{"qq": 3}"#).is_err());
    }

    #[test]
    fn cli_parses_documented_invocations() {
        let cli = Cli::try_parse_from(["jetcircle", "count", "--q", "3", "--form", "conic", "--e", "2", "--m", "0"]).unwrap();
        assert_eq!(cli.command, Command::Count);
        assert_eq!(cli.opts.q, Some(3));
        let cli = Cli::try_parse_from(["jetcircle", "bounds", "--mode", "canonical", "--d", "2", "--g", "1", "--n-plus-1", "7"]).unwrap();
        assert_eq!(cli.opts.n_plus_1, Some(7));
    }
}
