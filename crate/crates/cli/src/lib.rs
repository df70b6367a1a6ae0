//! Command-line front end for `radext`.
//!
//! Every command reads one parameter set, runs the matching library
//! operation and emits a report as JSON, CSV or text. Exit codes: 0 success
//! or clear, 2 obstruction found, 3 claim discrepancy, 1 error.

pub mod args;
pub mod params;
pub mod report;

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use radext::family::{build_psi, positivity_domain, ExtremalParams};
use radext::profile::registry::lookup_example;
use radext::ratlaurent::{int, isolate_positive_roots, refine_root, Interval, Rational, RootInterval};

pub use args::{Cli, Command, DomainSpec, Format, RunConfig};
pub use params::{parse_params, parse_params_json, ParamsSource, ParseError};
pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_OBSTRUCTED: i32 = 2;
pub const EXIT_DISCREPANCY: i32 = 3;

/// Anchor for `--domain auto`: a point between the two smallest positive
/// roots of `ψ` when there are two, one past the only root, else `y = 1`.
pub fn auto_anchor(p: &ExtremalParams) -> Rational {
    let psi = build_psi(p);
    let roots = isolate_positive_roots(&psi).unwrap_or_default();
    match roots.as_slice() {
        [] => int(1),
        [only] => only.approx() + int(1),
        [r1, r2, ..] => {
            // Shrink both enclosures so they are disjoint with room to spare,
            // then take the midpoint of the gap between them.
            let width = (r2.approx() - r1.approx()) / int(4);
            let upper = |r: &RootInterval| r.exact.clone().unwrap_or_else(|| r.hi.clone());
            let lower = |r: &RootInterval| r.exact.clone().unwrap_or_else(|| r.lo.clone());
            let a = upper(&refine_root(&psi, r1, &width));
            let b = lower(&refine_root(&psi, r2, &width));
            (a + b) / int(2)
        }
    }
}

/// The anchor used by a run: `--anchor`, else the registry anchor of
/// `--example`, else [`auto_anchor`].
pub fn resolve_anchor(cfg: &RunConfig, p: &ExtremalParams) -> Result<Rational> {
    if let Some(a) = &cfg.anchor {
        return Ok(a.clone());
    }
    if let Some(ParamsSource::Example(id)) = &cfg.source {
        return Ok(lookup_example(id)?.anchor_y);
    }
    Ok(auto_anchor(p))
}

/// The scan interval: explicit, or the positivity domain through the anchor.
pub fn resolve_domain(cfg: &RunConfig, p: &ExtremalParams) -> Result<(Interval, Option<Rational>)> {
    match &cfg.domain {
        DomainSpec::Explicit(iv) => Ok((iv.clone(), None)),
        DomainSpec::Auto => {
            let anchor = resolve_anchor(cfg, p)?;
            let dom = positivity_domain(p, &anchor)
                .context("no positivity domain around the anchor; pass --anchor or --domain lo,hi")?;
            Ok((dom.inner_interval(), Some(anchor)))
        }
    }
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// so a reader never sees a partial file.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Runs one command and emits its report. Returns the exit code.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    let report = report::execute(cfg)?;
    let text = match cfg.format {
        Format::Json => {
            let mut s = report.to_json()?;
            s.push('\n');
            s
        }
        Format::Text => report.to_text(),
        Format::Csv => match report.to_csv()? {
            Some(csv) => csv,
            None => bail!("CSV output is not available for `{}`", cfg.command.name()),
        },
    };
    match &cfg.output {
        Some(path) => write_atomic(Path::new(path), &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(report.exit_code())
}
