//! Numerical reconstruction of radial metrics from `ψ`.
//!
//! With `t = log r` the function `y(t) = r f'(r)` solves `dy/dt = ψ(y)` and
//! the potential satisfies `df/dt = y`. Floating point is confined to this
//! module; every sign decision elsewhere is exact.

pub mod ode;
pub mod registry;

use std::fmt::Write as _;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    build_psi, positivity_domain, AmbientSign, Endpoint, ExtremalParams, FamilyError, PositivityDomain,
};
use crate::ratlaurent::rational::to_f64;
use crate::ratlaurent::{format_rational, Rational};
use crate::resolvability::q_sequence;

pub use ode::{OdeError, OdeOptions, StopReason};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("y0 = {0} is not inside the positivity domain of psi")]
    NotInDomain(String),
    #[error("t0 = {t0} is not inside the requested range [{lo}, {hi}]")]
    InvalidRange { t0: f64, lo: f64, hi: f64 },
    #[error("integration tolerance could not be met near t = {0}")]
    StepFailure(f64),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

impl From<FamilyError> for ProfileError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::NotInteriorPoint(y) => ProfileError::NotInDomain(y),
            other => ProfileError::NotInDomain(other.to_string()),
        }
    }
}

/// One point of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub r: f64,
    pub y: f64,
    pub f: f64,
    pub s: f64,
}

/// Why one end of a profile stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileStop {
    RangeEnd,
    /// `y` came within tolerance of an end of the positivity domain.
    DomainBoundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricProfile {
    pub params: ExtremalParams,
    pub t0: f64,
    pub y0: f64,
    pub tol: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Ordered by increasing `t`; `f = 0` at `t0`.
    pub samples: Vec<Sample>,
    pub lower_stop: ProfileStop,
    pub upper_stop: ProfileStop,
}

#[derive(Debug, Clone)]
pub struct ProfileOptions {
    pub tol: f64,
    pub max_step: Option<f64>,
    /// Times the integrator must land on exactly.
    pub checkpoints: Vec<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_step: None,
            checkpoints: Vec::new(),
        }
    }
}

/// `ψ`, `ψ'`, `ψ''` in binary64 as exponent/coefficient lists.
#[derive(Debug, Clone)]
pub(crate) struct PsiF64 {
    n: f64,
    terms: Vec<(i32, f64)>,
}

impl PsiF64 {
    pub(crate) fn new(p: &ExtremalParams) -> Self {
        let psi = build_psi(p);
        Self {
            n: p.n as f64,
            terms: psi.terms().map(|(e, c)| (e as i32, to_f64(c))).collect(),
        }
    }

    pub(crate) fn eval(&self, y: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c * y.powi(*e)).sum()
    }

    fn d1(&self, y: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c * *e as f64 * y.powi(e - 1)).sum()
    }

    fn d2(&self, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * (*e as f64) * (*e as f64 - 1.0) * y.powi(e - 2))
            .sum()
    }

    /// `s = n(n−1)/y − y^(1−n)·(y^(n−1)ψ)''` expanded by the product rule.
    fn scalar(&self, y: f64) -> f64 {
        let n = self.n;
        n * (n - 1.0) / y
            - (n - 1.0) * (n - 2.0) * self.eval(y) / (y * y)
            - 2.0 * (n - 1.0) * self.d1(y) / y
            - self.d2(y)
    }
}

const Y_CLIP: f64 = 1e12;

/// `(t, [y, f])` along one direction of integration.
type Branch = Vec<(f64, [f64; 2])>;

/// Integrates the profile through `(t0, y0)` over `t_range`, clipped where
/// `y` reaches the boundary of the positivity domain.
pub fn integrate_profile(
    p: &ExtremalParams,
    y0: f64,
    t0: f64,
    t_range: (f64, f64),
    tol: f64,
) -> Result<MetricProfile, ProfileError> {
    integrate_profile_with(
        p,
        y0,
        t0,
        t_range,
        &ProfileOptions {
            tol,
            ..ProfileOptions::default()
        },
    )
}

pub fn integrate_profile_with(
    p: &ExtremalParams,
    y0: f64,
    t0: f64,
    t_range: (f64, f64),
    opts: &ProfileOptions,
) -> Result<MetricProfile, ProfileError> {
    let psi = PsiF64::new(p);
    if !(y0 > 0.0 && psi.eval(y0) > 0.0) {
        return Err(ProfileError::NotInDomain(y0.to_string()));
    }
    let (lo, hi) = t_range;
    if !(lo <= t0 && t0 <= hi) {
        return Err(ProfileError::InvalidRange { t0, lo, hi });
    }
    let tol = opts.tol;
    let ode_opts = OdeOptions {
        rtol: tol,
        atol: tol,
        max_step: opts.max_step,
        ..OdeOptions::default()
    };
    let rhs = |_: f64, s: &[f64; 2]| {
        if s[0] > 0.0 {
            [psi.eval(s[0]), s[0]]
        } else {
            [f64::NAN, f64::NAN]
        }
    };
    let halt = |_: f64, s: &[f64; 2]| psi.eval(s[0]) < tol || s[0] > Y_CLIP || !s[1].is_finite();
    let near_boundary = |y: f64| y < 1e-3 * y0.min(1.0) || psi.eval(y).abs() < 1e-4 || y > 1e8;

    let run = |t_end: f64| -> Result<(Branch, ProfileStop), ProfileError> {
        let traj = ode::integrate(rhs, t0, [y0, 0.0], t_end, &ode_opts, halt, &opts.checkpoints)?;
        let stop = match traj.stop {
            StopReason::End => ProfileStop::RangeEnd,
            StopReason::Halted => ProfileStop::DomainBoundary,
            StopReason::Underflow => {
                let (t_last, last) = (*traj.ts.last().unwrap(), traj.states.last().unwrap()[0]);
                if near_boundary(last) {
                    ProfileStop::DomainBoundary
                } else {
                    return Err(ProfileError::StepFailure(t_last));
                }
            }
        };
        Ok((traj.ts.into_iter().zip(traj.states).collect(), stop))
    };
    let (mut back, lower_stop) = run(lo)?;
    let (fwd, upper_stop) = run(hi)?;
    back.reverse();
    back.pop();
    back.extend(fwd);

    let gamma1 = to_f64(&p.d) * ((p.n + 1) * (p.n + 2)) as f64;
    let gamma2 = to_f64(&p.c) * (p.n * (p.n + 1)) as f64;
    let samples = back
        .into_iter()
        .map(|(t, s)| Sample {
            t,
            r: t.exp(),
            y: s[0],
            f: s[1],
            s: psi.scalar(s[0]),
        })
        .collect();
    Ok(MetricProfile {
        params: p.clone(),
        t0,
        y0,
        tol,
        gamma1,
        gamma2,
        samples,
        lower_stop,
        upper_stop,
    })
}

impl MetricProfile {
    /// CSV with columns `t,r,y,f,s`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,r,y,f,s\n");
        for s in &self.samples {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.t, s.r, s.y, s.f, s.s).unwrap();
        }
        out
    }

    /// The sample recorded at exactly time `t`, if any.
    pub fn sample_at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| s.t == t)
    }
}

/// `max |s − (γ₁y + γ₂)|` over the samples.
pub fn extremality_residual(profile: &MetricProfile) -> f64 {
    profile
        .samples
        .iter()
        .map(|s| (s.s - (profile.gamma1 * s.y + profile.gamma2)).abs())
        .fold(0.0, f64::max)
}

/// `g_k^ε(r0) = Q_k^ε(y0)/r0^k` for `k = 1..K`.
pub fn interior_series(
    p: &ExtremalParams,
    eps: AmbientSign,
    r0: &Rational,
    y0: &Rational,
    kmax: usize,
) -> Result<Vec<Rational>, ProfileError> {
    let psi = build_psi(p);
    let inside = r0.is_positive() && y0.is_positive() && psi.eval(y0).map(|v| v.is_positive()).unwrap_or(false);
    if !inside {
        return Err(ProfileError::NotInDomain(format_rational(y0)));
    }
    let seq = q_sequence(p, eps, kmax);
    let mut rk = Rational::from_integer(1.into());
    Ok(seq
        .entries()
        .iter()
        .map(|q| {
            rk = &rk * r0;
            q.eval(y0).expect("y0 > 0") / &rk
        })
        .collect())
}

/// Coefficients `a_k = 4^k·|C(1/2, k)|/2` of `1 − e^(−f) = Σ a_k r^k` for the
/// potential `f = log[(1 − √(1−4r))/(2r)]`.
pub fn exfond_coefficients(kmax: usize) -> Vec<Rational> {
    let half = Rational::new(1.into(), 2.into());
    let four = Rational::from_integer(4.into());
    let mut binom = Rational::from_integer(1.into());
    let mut power = Rational::from_integer(1.into());
    (1..=kmax as i64)
        .map(|k| {
            binom = binom.clone() * (&half - Rational::from_integer((k - 1).into())) / Rational::from_integer(k.into());
            power = &power * &four;
            &power * binom.abs() * &half
        })
        .collect()
}

/// What happens at one end of the domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryNote {
    pub endpoint: Endpoint,
    /// The endpoint is a root of `ψ`; a finite nonzero end always is.
    pub psi_vanishes: bool,
    /// Whether `t = log r` stays finite there, i.e. `∫ dy/ψ` converges.
    pub t_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainReport {
    pub domain: PositivityDomain,
    pub well_behaved: bool,
    pub lower: BoundaryNote,
    pub upper: BoundaryNote,
}

/// Domain `(y_inf, y_sup)` through `y0`, well-behavedness (`y_inf = 0`) and
/// the behaviour of `t` at both ends.
pub fn domain_endpoints(p: &ExtremalParams, y0: &Rational) -> Result<DomainReport, ProfileError> {
    let domain = positivity_domain(p, y0)?;
    let psi = build_psi(p);
    let note = |endpoint: &Endpoint| {
        let psi_vanishes = endpoint.is_root();
        // Near 0, ψ ~ c·y^v and ∫ dy/ψ converges iff v < 1; near ∞, iff deg ψ > 1.
        // At a root the integral always diverges.
        let t_finite = match endpoint {
            Endpoint::Zero => psi.valuation().is_some_and(|v| v < 1),
            Endpoint::Infinity => psi.degree().is_some_and(|d| d > 1),
            _ => false,
        };
        BoundaryNote {
            endpoint: endpoint.clone(),
            psi_vanishes,
            t_finite,
        }
    };
    Ok(DomainReport {
        well_behaved: domain.lo == Endpoint::Zero,
        lower: note(&domain.lo),
        upper: note(&domain.hi),
        domain,
    })
}

/// `F_ε = εe^(εf) + (1 − ε²)f`.
pub fn f_eps(eps: AmbientSign, f: f64) -> f64 {
    match eps {
        AmbientSign::Flat => f,
        e => {
            let s = e.value() as f64;
            s * (s * f).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlaurent::{int, rat};

    fn params(n: u32, a: Rational, b: Rational, c: Rational, d: Rational) -> ExtremalParams {
        ExtremalParams::new(n, a, b, c, d).unwrap()
    }

    #[test]
    fn burns_simanca_profile() {
        let bs = params(2, int(0), int(1), int(0), int(0));
        let prof = integrate_profile(&bs, 2.0, 0.0, (-2.0, 1.5), 1e-9).unwrap();
        assert_eq!(prof.lower_stop, ProfileStop::RangeEnd);
        for s in &prof.samples {
            assert!((s.y - (s.r + 1.0)).abs() < 1e-8 * s.y);
            assert!((s.f - (s.r + s.r.ln() - 1.0)).abs() < 1e-8);
            assert_eq!(s.s, 0.0);
        }
        assert!(prof.samples.windows(2).all(|w| w[0].t < w[1].t && w[0].y < w[1].y));
        assert_eq!(extremality_residual(&prof), 0.0);
    }

    #[test]
    fn clipped_at_root() {
        // Backward in t, y decreases to the root of ψ = y − 1.
        let bs = params(2, int(0), int(1), int(0), int(0));
        let prof = integrate_profile(&bs, 2.0, 0.0, (-40.0, 0.0), 1e-9).unwrap();
        assert_eq!(prof.lower_stop, ProfileStop::DomainBoundary);
        assert!(prof.samples[0].y - 1.0 < 1e-8);
    }

    #[test]
    fn profile_errors() {
        let bs = params(2, int(0), int(1), int(0), int(0));
        assert!(matches!(
            integrate_profile(&bs, 0.5, 0.0, (-1.0, 1.0), 1e-9),
            Err(ProfileError::NotInDomain(_))
        ));
        assert!(matches!(
            integrate_profile(&bs, 2.0, 2.0, (-1.0, 1.0), 1e-9),
            Err(ProfileError::InvalidRange { .. })
        ));
    }

    #[test]
    fn series_examples() {
        let flat = ExtremalParams::flat(2);
        let g = interior_series(&flat, AmbientSign::Flat, &rat(1, 3), &int(2), 4).unwrap();
        assert_eq!(g, vec![int(6), int(0), int(0), int(0)]);
        let bs = params(2, int(0), int(1), int(0), int(0));
        let g = interior_series(&bs, AmbientSign::Flat, &int(1), &int(2), 2).unwrap();
        assert_eq!(g[1], int(-1));
        assert!(interior_series(&bs, AmbientSign::Flat, &int(1), &rat(1, 2), 2).is_err());
    }

    #[test]
    fn exfond_first_terms() {
        assert_eq!(exfond_coefficients(4), vec![int(1), int(1), int(2), int(5)]);
    }

    #[test]
    fn endpoints() {
        let bs = params(2, int(0), int(1), int(0), int(0));
        let rep = domain_endpoints(&bs, &int(2)).unwrap();
        assert!(!rep.well_behaved);
        assert!(rep.lower.psi_vanishes && !rep.lower.t_finite);
        assert!(!rep.upper.t_finite);
        let exfond = params(2, int(0), int(0), int(-3), int(-2));
        let rep = domain_endpoints(&exfond, &int(1)).unwrap();
        assert!(rep.well_behaved);
        assert!(!rep.lower.t_finite && rep.upper.t_finite);
        let exrinf = params(2, int(-1), int(0), int(2), int(0));
        let rep = domain_endpoints(&exrinf, &rat(1, 2)).unwrap();
        assert!(rep.well_behaved && rep.lower.t_finite);
        assert_eq!(rep.upper.endpoint, Endpoint::Exact { value: int(1) });
    }

    #[test]
    fn csv_shape() {
        let prof = integrate_profile(&ExtremalParams::flat(2), 1.0, 0.0, (0.0, 0.5), 1e-9).unwrap();
        let csv = prof.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,r,y,f,s"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 1.0, 1.0, 0.0, 0.0]);
    }
}
