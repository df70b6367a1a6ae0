//! Command-line arguments and the validated run configuration.

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use radext::family::AmbientSign;
use radext::ratlaurent::{parse_rational, Interval, Rational};
use radext::resolvability::DEFAULT_KMAX;

use crate::params::ParamsSource;

#[derive(Debug, Parser)]
#[command(name = "radext", version, about = "Radial extremal Kähler metrics: classification, obstructions, profiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Parameters as inline JSON or a path to a JSON file.
    #[arg(long, global = true, conflicts_with = "example")]
    pub params: Option<String>,

    /// Registry example id (see `list-examples`).
    #[arg(long, global = true)]
    pub example: Option<String>,

    /// Largest index K scanned (matrix size for det1).
    #[arg(long, global = true, env = "RADEXT_KMAX", default_value_t = DEFAULT_KMAX, value_parser = parse_kmax)]
    pub kmax: usize,

    /// Ambient sign: -1 hyperbolic, 0 flat, 1 projective.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true, value_parser = parse_eps)]
    pub eps: AmbientSign,

    /// Integration tolerance for profiles.
    #[arg(long, global = true, env = "RADEXT_TOL", default_value_t = 1e-9)]
    pub tol: f64,

    /// `auto`, or an explicit open interval `lo,hi` (`hi` may be `inf`).
    #[arg(long, global = true, default_value = "auto", allow_hyphen_values = true, value_parser = parse_domain)]
    pub domain: DomainSpec,

    /// Point `y0` with `ψ(y0) > 0` used to locate the domain.
    #[arg(long, global = true, value_parser = parse_positive)]
    pub anchor: Option<Rational>,

    /// Radius `r0` paired with the anchor (series, profile).
    #[arg(long, global = true, value_parser = parse_positive)]
    pub r0: Option<Rational>,

    /// Range `lo,hi` of `r` for profiles.
    #[arg(long, global = true, value_parser = parse_range)]
    pub r_range: Option<(Rational, Rational)>,

    /// Comma-separated scale factors for `stability`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_positive)]
    pub alphas: Vec<Rational>,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Curvature class, Einstein constant and scalar curvature.
    Classify,
    /// The sequence Q_k with predicted and actual extreme terms.
    Qtable,
    /// Smallest k with Q_k negative on the domain.
    Obstruct,
    /// Determinant test for curves (n = 1).
    Det1,
    /// Numerical profile y(t), f(t), s(t).
    Profile,
    /// Taylor coefficients g_k of F_ε at r0.
    Series,
    /// Kähler–Einstein diagnostics and the predicted obstruction index.
    Ke,
    /// Projective scans of αg over the `--alphas` grid.
    Stability,
    /// Re-check every claim attached to a registry example.
    Reproduce { id: String },
    /// Registry ids and titles.
    ListExamples,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Qtable => "qtable",
            Command::Obstruct => "obstruct",
            Command::Det1 => "det1",
            Command::Profile => "profile",
            Command::Series => "series",
            Command::Ke => "ke",
            Command::Stability => "stability",
            Command::Reproduce { .. } => "reproduce",
            Command::ListExamples => "list-examples",
        }
    }

    fn needs_params(&self) -> bool {
        !matches!(self, Command::Reproduce { .. } | Command::ListExamples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    Auto,
    Explicit(Interval),
}

fn parse_kmax(text: &str) -> Result<usize, String> {
    match text.trim().parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(format!("expected an integer K >= 1, got {text:?}")),
    }
}

fn parse_eps(text: &str) -> Result<AmbientSign, String> {
    let v: i8 = text.trim().parse().map_err(|_| format!("expected -1, 0 or 1, got {text:?}"))?;
    AmbientSign::try_from(v)
}

fn parse_positive(text: &str) -> Result<Rational, String> {
    let v = parse_rational(text).map_err(|e| e.to_string())?;
    if v <= Rational::from_integer(0.into()) {
        return Err(format!("must be positive, got {text}"));
    }
    Ok(v)
}

fn parse_range(text: &str) -> Result<(Rational, Rational), String> {
    let (lo, hi) = text.split_once(',').ok_or_else(|| format!("expected lo,hi, got {text:?}"))?;
    let (lo, hi) = (parse_positive(lo)?, parse_positive(hi)?);
    if lo >= hi {
        return Err(format!("empty range {text}"));
    }
    Ok((lo, hi))
}

fn parse_domain(text: &str) -> Result<DomainSpec, String> {
    if text.trim() == "auto" {
        return Ok(DomainSpec::Auto);
    }
    let (lo, hi) = text.split_once(',').ok_or_else(|| format!("expected auto or lo,hi, got {text:?}"))?;
    let lo = parse_rational(lo).map_err(|e| e.to_string())?;
    let hi = match hi.trim() {
        "inf" => None,
        h => Some(parse_rational(h).map_err(|e| e.to_string())?),
    };
    Interval::new(Some(lo), hi).map(DomainSpec::Explicit).map_err(|e| e.to_string())
}

/// A validated run: at most one parameter source and checked options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// `None` only for `list-examples`.
    pub source: Option<ParamsSource>,
    pub kmax: usize,
    pub eps: AmbientSign,
    pub tol: f64,
    pub domain: DomainSpec,
    pub anchor: Option<Rational>,
    pub r0: Option<Rational>,
    pub r_range: Option<(Rational, Rational)>,
    pub alphas: Vec<Rational>,
    pub output: Option<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let source = match (&cli.command, cli.params, cli.example) {
            (Command::Reproduce { id }, None, None) => Some(ParamsSource::Example(id.clone())),
            (Command::ListExamples, None, None) => None,
            (c, _, _) if !c.needs_params() => bail!("`{}` takes no --params or --example", c.name()),
            (_, Some(p), None) => Some(ParamsSource::from_flag(&p)),
            (_, None, Some(id)) => Some(ParamsSource::Example(id)),
            (c, None, None) => bail!("`{}` needs --params or --example", c.name()),
            (_, Some(_), Some(_)) => bail!("--params and --example are mutually exclusive"),
        };
        if !(cli.tol > 0.0 && cli.tol.is_finite()) {
            bail!("--tol must be positive, got {}", cli.tol);
        }
        if cli.command == Command::Stability && cli.alphas.is_empty() {
            bail!("`stability` needs --alphas");
        }
        Ok(Self {
            command: cli.command,
            source,
            kmax: cli.kmax,
            eps: cli.eps,
            tol: cli.tol,
            domain: cli.domain,
            anchor: cli.anchor,
            r0: cli.r0,
            r_range: cli.r_range,
            alphas: cli.alphas,
            output: cli.output,
            format: cli.format,
        })
    }
}
