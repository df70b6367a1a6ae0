//! Report types, command dispatch and rendering.

use std::fmt::Write as _;

use anyhow::Result;
use radext::family::{build_psi, classify, einstein_constant, scalar_curvature, AmbientSign, Endpoint, ExtremalParams, MetricClass};
use radext::ke::{check_prediction, falling_factorial_check, ke_invariants, stability_scan, KeDiagnostics, PredictionCheck, StabilityEntry};
use radext::profile::registry::{builtin_profile, lookup_example, ClaimRecord, ClaimStatus, REGISTRY_IDS};
use radext::profile::{integrate_profile, interior_series, MetricProfile};
use radext::ratlaurent::rational::{serde_rational, to_f64};
use radext::ratlaurent::{format_rational, int, LaurentPoly, Rational};
use radext::resolvability::{
    actual_extreme, det_test_dim1, extremes_closed_form, obstruction_scan, q_sequence, DetReport, Extreme, ExtremeTerm,
    ObstructionReport, ScanVerdict,
};
use serde::{Deserialize, Serialize};

use crate::args::{Command, RunConfig};
use crate::params::{parse_params, ParamsSource};
use crate::{resolve_anchor, resolve_domain, EXIT_DISCREPANCY, EXIT_OBSTRUCTED, EXIT_OK};

/// A list of rationals as `"p/q"` strings.
mod rational_vec {
    use radext::ratlaurent::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        values.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub params: ExtremalParams,
    pub class: MetricClass,
    pub psi: LaurentPoly,
    /// `s(y) = γ₁y + γ₂`.
    pub scalar: LaurentPoly,
    #[serde(with = "serde_rational")]
    pub gamma1: Rational,
    #[serde(with = "serde_rational")]
    pub gamma2: Rational,
}

/// Actual and predicted extreme term of one `Q_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeCheck {
    pub degree: Option<i64>,
    #[serde(with = "serde_rational::option", default)]
    pub coeff: Option<Rational>,
    /// Absent for `k = 1` and `n = 1`, where no closed form applies.
    pub predicted: Option<ExtremeTerm>,
    /// Absent when there is no non-degenerate prediction.
    pub matches: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QRow {
    pub k: usize,
    pub q: LaurentPoly,
    pub leading: ExtremeCheck,
    pub lower: ExtremeCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QTableReport {
    pub params: ExtremalParams,
    pub eps: AmbientSign,
    pub rows: Vec<QRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructReport {
    pub params: ExtremalParams,
    pub eps: AmbientSign,
    /// Anchor of the positivity domain; absent for an explicit domain.
    #[serde(with = "serde_rational::option", default)]
    pub anchor: Option<Rational>,
    pub scan: ObstructionReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Det1Report {
    pub params: ExtremalParams,
    pub eps: AmbientSign,
    #[serde(with = "serde_rational::option", default)]
    pub anchor: Option<Rational>,
    pub scan: DetReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub params: ExtremalParams,
    pub eps: AmbientSign,
    #[serde(with = "serde_rational")]
    pub r0: Rational,
    #[serde(with = "serde_rational")]
    pub y0: Rational,
    /// `g_1, …, g_K`.
    #[serde(with = "rational_vec")]
    pub coefficients: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeReport {
    pub params: ExtremalParams,
    #[serde(with = "serde_rational")]
    pub anchor: Rational,
    pub diagnostics: KeDiagnostics,
    pub prediction: Option<PredictionCheck>,
    pub prediction_holds: Option<bool>,
    /// Both falling-factorial identities for `k ≤ K`, when `y_inf` is rational.
    pub falling_factorial_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub params: ExtremalParams,
    #[serde(with = "serde_rational")]
    pub anchor: Rational,
    pub kmax: usize,
    pub entries: Vec<StabilityEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub id: String,
    pub title: String,
    pub params: ExtremalParams,
    pub claims: Vec<ClaimRecord>,
}

impl ReproduceReport {
    pub fn discrepancies(&self) -> impl Iterator<Item = &ClaimRecord> {
        self.claims.iter().filter(|c| !c.is_confirmed())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSummary {
    pub id: String,
    pub title: String,
    pub params: ExtremalParams,
    pub class: MetricClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleList {
    pub examples: Vec<ExampleSummary>,
}

#[derive(Debug, Clone)]
pub enum Report {
    Classify(ClassifyReport),
    QTable(QTableReport),
    Obstruct(Box<ObstructReport>),
    Det1(Box<Det1Report>),
    Profile(Box<MetricProfile>),
    Series(SeriesReport),
    Ke(Box<KeReport>),
    Stability(StabilityReport),
    Reproduce(ReproduceReport),
    Examples(ExampleList),
}

fn extreme_check(q: &LaurentPoly, predicted: Option<ExtremeTerm>, which: Extreme) -> ExtremeCheck {
    let actual = actual_extreme(q, which);
    let matches = match &predicted {
        Some(ExtremeTerm::Predicted { degree, coeff }) => Some(actual.as_ref() == Some(&(*degree, coeff.clone()))),
        _ => None,
    };
    ExtremeCheck {
        degree: actual.as_ref().map(|a| a.0),
        coeff: actual.map(|a| a.1),
        predicted,
        matches,
    }
}

fn qtable(p: &ExtremalParams, eps: AmbientSign, kmax: usize) -> QTableReport {
    let seq = q_sequence(p, eps, kmax);
    let rows = (1..=kmax)
        .map(|k| {
            let q = seq.get(k);
            let predict = |which| (k >= 2).then(|| extremes_closed_form(p, eps, k, which).ok()).flatten();
            QRow {
                k,
                q: q.clone(),
                leading: extreme_check(q, predict(Extreme::Leading), Extreme::Leading),
                lower: extreme_check(q, predict(Extreme::Lower), Extreme::Lower),
            }
        })
        .collect();
    QTableReport {
        params: p.clone(),
        eps,
        rows,
    }
}

fn profile(cfg: &RunConfig, p: &ExtremalParams) -> Result<MetricProfile> {
    let example = match (&cfg.source, &cfg.anchor) {
        (Some(ParamsSource::Example(id)), None) => Some(lookup_example(id)?),
        _ => None,
    };
    let (r0, y0) = match &example {
        Some(e) => (e.anchor_r, e.anchor_y.clone()),
        None => (cfg.r0.as_ref().map_or(1.0, to_f64), resolve_anchor(cfg, p)?),
    };
    let (lo, hi) = match (&cfg.r_range, &example) {
        (Some((lo, hi)), _) => (to_f64(lo), to_f64(hi)),
        (None, Some(e)) => e.r_range,
        (None, None) => (r0 / 10.0, r0 * 10.0),
    };
    Ok(integrate_profile(p, to_f64(&y0), r0.ln(), (lo.ln(), hi.ln()), cfg.tol)?)
}

fn ke_report(cfg: &RunConfig, p: &ExtremalParams) -> Result<KeReport> {
    let anchor = resolve_anchor(cfg, p)?;
    let diagnostics = ke_invariants(p, &anchor)?;
    let prediction = check_prediction(p, &diagnostics)?;
    let prediction_holds = match (&prediction, diagnostics.route) {
        (Some(check), Some(route)) => Some(check.holds(route)),
        _ => None,
    };
    let falling_factorial_holds = match &diagnostics.y_inf {
        Endpoint::Exact { value } => Some(falling_factorial_check(p, value, cfg.kmax)?),
        _ => None,
    };
    Ok(KeReport {
        params: p.clone(),
        anchor,
        diagnostics,
        prediction,
        prediction_holds,
        falling_factorial_holds,
    })
}

fn reproduce(id: &str) -> Result<ReproduceReport> {
    let e = builtin_profile(id)?;
    Ok(ReproduceReport {
        id: e.id.to_owned(),
        title: e.title.to_owned(),
        params: e.params,
        claims: e.claims,
    })
}

fn examples() -> ExampleList {
    let examples = REGISTRY_IDS
        .iter()
        .map(|id| {
            let e = lookup_example(id).expect("registry ids resolve");
            ExampleSummary {
                id: e.id.to_owned(),
                title: e.title.to_owned(),
                class: classify(&e.params),
                params: e.params,
            }
        })
        .collect();
    ExampleList { examples }
}

/// Dispatches `cfg.command` to the library.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    if let Command::Reproduce { id } = &cfg.command {
        return Ok(Report::Reproduce(reproduce(id)?));
    }
    let Some(source) = &cfg.source else {
        return Ok(Report::Examples(examples()));
    };
    let p = parse_params(source)?;
    let eps = cfg.eps;
    Ok(match &cfg.command {
        Command::Classify => {
            let sc = scalar_curvature(&p)?;
            Report::Classify(ClassifyReport {
                class: classify(&p),
                psi: build_psi(&p),
                scalar: sc.s,
                gamma1: sc.gamma1,
                gamma2: sc.gamma2,
                params: p,
            })
        }
        Command::Qtable => Report::QTable(qtable(&p, eps, cfg.kmax)),
        Command::Obstruct => {
            let (domain, anchor) = resolve_domain(cfg, &p)?;
            let scan = obstruction_scan(&p, eps, &domain, cfg.kmax)?;
            Report::Obstruct(Box::new(ObstructReport { params: p, eps, anchor, scan }))
        }
        Command::Det1 => {
            let (domain, anchor) = resolve_domain(cfg, &p)?;
            let scan = det_test_dim1(&p, eps, cfg.kmax, &domain)?;
            Report::Det1(Box::new(Det1Report { params: p, eps, anchor, scan }))
        }
        Command::Profile => Report::Profile(Box::new(profile(cfg, &p)?)),
        Command::Series => {
            let y0 = resolve_anchor(cfg, &p)?;
            let r0 = cfg.r0.clone().unwrap_or_else(|| int(1));
            let coefficients = interior_series(&p, eps, &r0, &y0, cfg.kmax)?;
            Report::Series(SeriesReport {
                params: p,
                eps,
                r0,
                y0,
                coefficients,
            })
        }
        Command::Ke => Report::Ke(Box::new(ke_report(cfg, &p)?)),
        Command::Stability => {
            let anchor = resolve_anchor(cfg, &p)?;
            let entries = stability_scan(&p, &cfg.alphas, &anchor, cfg.kmax)?;
            Report::Stability(StabilityReport {
                params: p,
                anchor,
                kmax: cfg.kmax,
                entries,
            })
        }
        Command::Reproduce { .. } | Command::ListExamples => unreachable!("handled above"),
    })
}

fn verdict_text(v: &ScanVerdict) -> String {
    match v {
        ScanVerdict::Clear { k } => format!("clear up to k = {k}"),
        ScanVerdict::Obstructed { k, witness, value } => format!(
            "obstructed at k = {k}: Q_{k}({}) = {} < 0",
            format_rational(witness),
            format_rational(value)
        ),
        ScanVerdict::IdenticallyZero { k } => format!("Q_k vanishes identically from k = {k}"),
    }
}

fn verdict_name(v: &ScanVerdict) -> &'static str {
    match v {
        ScanVerdict::Clear { .. } => "clear",
        ScanVerdict::Obstructed { .. } => "obstructed",
        ScanVerdict::IdenticallyZero { .. } => "identically_zero",
    }
}

fn opt_rational(v: &Option<Rational>) -> String {
    v.as_ref().map(format_rational).unwrap_or_default()
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self {
            Report::Obstruct(r) if r.scan.verdict.is_obstructed() => EXIT_OBSTRUCTED,
            Report::Det1(r) if r.scan.first_violation.is_some() => EXIT_OBSTRUCTED,
            Report::Stability(r) if r.entries.iter().any(|e| e.report.verdict.is_obstructed()) => EXIT_OBSTRUCTED,
            Report::Reproduce(r) if r.discrepancies().next().is_some() => EXIT_DISCREPANCY,
            _ => EXIT_OK,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(match self {
            Report::Classify(r) => serde_json::to_string_pretty(r)?,
            Report::QTable(r) => serde_json::to_string_pretty(r)?,
            Report::Obstruct(r) => serde_json::to_string_pretty(r)?,
            Report::Det1(r) => serde_json::to_string_pretty(r)?,
            Report::Profile(r) => serde_json::to_string_pretty(r)?,
            Report::Series(r) => serde_json::to_string_pretty(r)?,
            Report::Ke(r) => serde_json::to_string_pretty(r)?,
            Report::Stability(r) => serde_json::to_string_pretty(r)?,
            Report::Reproduce(r) => serde_json::to_string_pretty(r)?,
            Report::Examples(r) => serde_json::to_string_pretty(r)?,
        })
    }

    /// CSV for tabular reports; `None` for the others.
    pub fn to_csv(&self) -> Result<Option<String>> {
        let fr = format_rational;
        Ok(Some(match self {
            Report::Profile(r) => r.to_csv(),
            Report::QTable(r) => csv_string(
                &["k", "degree", "leading_coeff", "leading_matches", "valuation", "lower_coeff", "lower_matches", "terms"],
                r.rows.iter().map(|row| {
                    let m = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
                    vec![
                        row.k.to_string(),
                        row.leading.degree.map(|d| d.to_string()).unwrap_or_default(),
                        opt_rational(&row.leading.coeff),
                        m(row.leading.matches),
                        row.lower.degree.map(|d| d.to_string()).unwrap_or_default(),
                        opt_rational(&row.lower.coeff),
                        m(row.lower.matches),
                        row.q.num_terms().to_string(),
                    ]
                }),
            )?,
            Report::Series(r) => csv_string(
                &["k", "g_k"],
                r.coefficients.iter().enumerate().map(|(i, g)| vec![(i + 1).to_string(), fr(g)]),
            )?,
            Report::Stability(r) => csv_string(
                &["alpha", "lambda_alpha", "verdict", "k", "witness"],
                r.entries.iter().map(|e| {
                    let witness = match &e.report.verdict {
                        ScanVerdict::Obstructed { witness, .. } => fr(witness),
                        _ => String::new(),
                    };
                    vec![
                        fr(&e.alpha),
                        opt_rational(&e.lambda_alpha),
                        verdict_name(&e.report.verdict).to_owned(),
                        e.report.verdict.k().to_string(),
                        witness,
                    ]
                }),
            )?,
            Report::Reproduce(r) => csv_string(
                &["claim", "status", "stated", "computed"],
                r.claims.iter().map(|c| {
                    let status = if c.is_confirmed() { "confirmed" } else { "discrepant" };
                    vec![c.claim.clone(), status.to_owned(), c.stated.clone(), c.computed.clone()]
                }),
            )?,
            Report::Examples(r) => csv_string(
                &["id", "title", "n", "A", "B", "C", "D"],
                r.examples.iter().map(|e| {
                    let p = &e.params;
                    vec![e.id.clone(), e.title.clone(), p.n.to_string(), fr(&p.a), fr(&p.b), fr(&p.c), fr(&p.d)]
                }),
            )?,
            _ => return Ok(None),
        }))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        match self {
            Report::Classify(r) => {
                writeln!(w, "params: {}", r.params).unwrap();
                writeln!(w, "psi = {}", r.psi).unwrap();
                writeln!(w, "s(y) = {}", r.scalar).unwrap();
                let class = match &r.class {
                    MetricClass::ConstHolSecCurv => "ConstHolSecCurv".to_owned(),
                    MetricClass::KahlerEinstein { lambda } => format!("KahlerEinstein (lambda = {})", format_rational(lambda)),
                    MetricClass::CscK { s } => format!("CscK (s = {})", format_rational(s)),
                    MetricClass::ExtremalProper { gamma1, gamma2 } => {
                        format!("ExtremalProper (s = {}·y + {})", format_rational(gamma1), format_rational(gamma2))
                    }
                };
                writeln!(w, "class: {class}").unwrap();
                if r.params.b == int(0) && r.params.d == int(0) {
                    writeln!(w, "einstein constant: {}", format_rational(&einstein_constant(&r.params))).unwrap();
                }
            }
            Report::QTable(r) => {
                writeln!(w, "params: {}  eps = {}", r.params, r.eps).unwrap();
                for row in &r.rows {
                    writeln!(w, "Q_{} = {}", row.k, row.q).unwrap();
                    for (name, c) in [("leading", &row.leading), ("lower", &row.lower)] {
                        if let Some(m) = c.matches {
                            writeln!(w, "    {name} term {} the closed form", if m { "matches" } else { "DIFFERS FROM" }).unwrap();
                        }
                    }
                }
            }
            Report::Obstruct(r) => {
                writeln!(w, "params: {}  eps = {}", r.params, r.eps).unwrap();
                writeln!(w, "domain: {}", r.scan.domain).unwrap();
                writeln!(w, "{}", verdict_text(&r.scan.verdict)).unwrap();
            }
            Report::Det1(r) => {
                writeln!(w, "params: {}  eps = {}", r.params, r.eps).unwrap();
                writeln!(w, "domain: {}", r.scan.domain).unwrap();
                for e in &r.scan.entries {
                    let verdict = if e.certificate.is_negative() { "negative somewhere" } else { "nonnegative" };
                    writeln!(w, "I = {}: det M {verdict}", e.size).unwrap();
                }
            }
            Report::Profile(r) => {
                writeln!(w, "params: {}  y0 = {}  t0 = {}", r.params, r.y0, r.t0).unwrap();
                writeln!(w, "{} samples, stops: {:?} / {:?}", r.samples.len(), r.lower_stop, r.upper_stop).unwrap();
                for s in &r.samples {
                    writeln!(w, "r = {:.6e}  y = {:.10e}  f = {:.10e}", s.r, s.y, s.f).unwrap();
                }
            }
            Report::Series(r) => {
                writeln!(w, "params: {}  eps = {}  r0 = {}  y0 = {}", r.params, r.eps, format_rational(&r.r0), format_rational(&r.y0)).unwrap();
                for (i, g) in r.coefficients.iter().enumerate() {
                    writeln!(w, "g_{} = {}", i + 1, format_rational(g)).unwrap();
                }
            }
            Report::Ke(r) => {
                let d = &r.diagnostics;
                writeln!(w, "params: {}  lambda = {}", r.params, format_rational(&d.lambda)).unwrap();
                writeln!(w, "y_inf = {}  (integral: {})", d.y_inf, d.y_inf_integral).unwrap();
                writeln!(w, "n_tilde integral: {}", d.n_tilde_integral).unwrap();
                match (d.predicted_obstruction_k, d.route) {
                    (Some(k), Some(route)) => writeln!(w, "predicted obstruction at k = {k} ({route:?})").unwrap(),
                    _ => writeln!(w, "no predicted obstruction").unwrap(),
                }
                if let Some(h) = r.prediction_holds {
                    writeln!(w, "prediction confirmed exactly: {h}").unwrap();
                }
                if let Some(h) = r.falling_factorial_holds {
                    writeln!(w, "falling-factorial identities: {h}").unwrap();
                }
            }
            Report::Stability(r) => {
                writeln!(w, "params: {}  anchor = {}", r.params, format_rational(&r.anchor)).unwrap();
                for e in &r.entries {
                    writeln!(w, "alpha = {}: {}", format_rational(&e.alpha), verdict_text(&e.report.verdict)).unwrap();
                }
            }
            Report::Reproduce(r) => {
                writeln!(w, "{} ({})  {}", r.id, r.title, r.params).unwrap();
                for c in &r.claims {
                    match &c.status {
                        ClaimStatus::Confirmed => writeln!(w, "  confirmed   {}: {}", c.claim, c.computed).unwrap(),
                        ClaimStatus::Discrepant { details } => writeln!(w, "  DISCREPANT  {}: {details}", c.claim).unwrap(),
                    }
                }
            }
            Report::Examples(r) => {
                for e in &r.examples {
                    writeln!(w, "{:<16} {}  [{}]", e.id, e.title, e.params).unwrap();
                }
            }
        }
        out
    }
}
