//! Diagnostics specific to Kähler–Einstein members (`B = D = 0`).
//!
//! At a root `y_r` of `ψ` the projective sequence takes falling-factorial
//! values, `Q¹_k(y_r) = y_r(y_r−1)⋯(y_r−k+1)`, and with `ñ = ψ'(y_r)` also
//! `Q¹_k + ñ·Q¹_k' = (y_r+ñ)(y_r+ñ−1)⋯(y_r+ñ−k+1)` there. When `y_inf` or
//! `ñ` is not an integer these products turn negative at a computable index.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    build_psi, einstein_constant, positivity_domain, scale_params, AmbientSign, Endpoint, ExtremalParams,
    FamilyError,
};
use crate::profile::{domain_endpoints, ProfileError};
use crate::ratlaurent::rational::{floor, is_integer, serde_rational};
use crate::ratlaurent::{
    format_rational, refine_root, right_neighborhood, IntervalError, Rational, RightNeighborhood, RootInterval,
};
use crate::resolvability::{obstruction_scan, q_sequence, ObstructionReport, ResolvabilityError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KeError {
    #[error("not a Kähler–Einstein member: B and D must vanish")]
    NotKe,
    #[error("psi does not vanish at y = {0}")]
    NotARoot(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Resolvability(#[from] ResolvabilityError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// `ñ = n − (λ/2)·y_inf`, exact or enclosed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NTilde {
    Exact {
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    Isolated {
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
    },
}

/// Which identity makes `Q¹_k̂` negative just right of `y_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionRoute {
    /// `y_inf ∉ ℤ`: `Q¹_k̂(y_inf) < 0` with `k̂ = ⌊y_inf⌋ + 2`.
    NonIntegralRoot,
    /// `y_inf ∈ ℤ`, `ñ ∉ ℤ`: `Q¹_k̂(y_inf) = 0`, `Q¹_k̂'(y_inf) < 0` with
    /// `k̂ = y_inf + ⌊ñ⌋ + 2`.
    NonIntegralSlope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeDiagnostics {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub y_inf: Endpoint,
    pub n_tilde: NTilde,
    pub y_inf_integral: bool,
    pub n_tilde_integral: bool,
    pub predicted_obstruction_k: Option<usize>,
    pub route: Option<PredictionRoute>,
}

fn require_ke(p: &ExtremalParams) -> Result<(), KeError> {
    if p.b.is_zero() && p.d.is_zero() {
        Ok(())
    } else {
        Err(KeError::NotKe)
    }
}

fn to_index(v: BigInt) -> usize {
    v.to_usize().expect("index fits in usize")
}

pub fn ke_invariants(p: &ExtremalParams, y0: &Rational) -> Result<KeDiagnostics, KeError> {
    require_ke(p)?;
    let lambda = einstein_constant(p);
    let n = Rational::from_integer(p.n.into());
    let half_lambda = &lambda / Rational::from_integer(2.into());
    let report = domain_endpoints(p, y0)?;
    let psi = build_psi(p);
    let two = Rational::from_integer(2.into());

    let (y_inf, n_tilde, y_int, n_int, prediction) = match report.domain.lo {
        Endpoint::Zero => {
            let nt = NTilde::Exact { value: n.clone() };
            (Endpoint::Zero, nt, true, true, None)
        }
        Endpoint::Exact { value } => {
            let nt = &n - &half_lambda * &value;
            let slope = psi.differentiate().eval(&value).expect("root is positive");
            assert_eq!(nt, slope, "n − (λ/2)y_inf must equal ψ'(y_inf)");
            let (yi, ni) = (is_integer(&value), is_integer(&nt));
            let prediction = if !yi {
                Some((to_index(floor(&value)) + 2, PredictionRoute::NonIntegralRoot))
            } else if !ni {
                Some((
                    to_index(value.to_integer() + floor(&nt)) + 2,
                    PredictionRoute::NonIntegralSlope,
                ))
            } else {
                None
            };
            (Endpoint::Exact { value: value.clone() }, NTilde::Exact { value: nt }, yi, ni, prediction)
        }
        Endpoint::Isolated { lo, hi } => {
            // Shrink until the floor is determined; the root is irrational.
            let mut root = RootInterval { lo, hi, exact: None };
            while floor(&root.lo) != floor(&root.hi) {
                let half = root.width() / &two;
                root = refine_root(&psi, &root, &half);
            }
            let a = &n - &half_lambda * &root.lo;
            let b = &n - &half_lambda * &root.hi;
            let (nlo, nhi) = if a <= b { (a, b) } else { (b, a) };
            let k = to_index(floor(&root.lo)) + 2;
            (
                Endpoint::Isolated {
                    lo: root.lo,
                    hi: root.hi,
                },
                NTilde::Isolated { lo: nlo, hi: nhi },
                false,
                false,
                Some((k, PredictionRoute::NonIntegralRoot)),
            )
        }
        Endpoint::Infinity => unreachable!("lower end is finite"),
    };
    Ok(KeDiagnostics {
        lambda,
        y_inf,
        n_tilde,
        y_inf_integral: y_int,
        n_tilde_integral: n_int,
        predicted_obstruction_k: prediction.map(|(k, _)| k),
        route: prediction.map(|(_, r)| r),
    })
}

/// Exact confirmation of a prediction at a rational `y_inf`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionCheck {
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    #[serde(with = "serde_rational")]
    pub slope: Rational,
    pub neighborhood: RightNeighborhood,
}

impl PredictionCheck {
    /// Whether the exact data support the prediction: the route's sign
    /// condition holds and `Q¹_k̂` is certified negative on `(y_inf, y_inf + δ)`.
    pub fn holds(&self, route: PredictionRoute) -> bool {
        let route_ok = match route {
            PredictionRoute::NonIntegralRoot => self.value < Rational::zero(),
            PredictionRoute::NonIntegralSlope => self.value.is_zero() && self.slope < Rational::zero(),
        };
        route_ok && self.neighborhood.sign < 0 && self.neighborhood.certificate.is_negative()
    }
}

/// Evaluates `Q¹_k̂` and its derivative at `y_inf` and certifies its sign on
/// a right neighbourhood. `None` when there is no prediction or `y_inf` is
/// not rational.
pub fn check_prediction(p: &ExtremalParams, diag: &KeDiagnostics) -> Result<Option<PredictionCheck>, KeError> {
    let (Some(k), Endpoint::Exact { value: y_inf }) = (diag.predicted_obstruction_k, &diag.y_inf) else {
        return Ok(None);
    };
    let seq = q_sequence(p, AmbientSign::Projective, k);
    let q = seq.get(k);
    Ok(Some(PredictionCheck {
        k,
        value: q.eval(y_inf).expect("root is positive"),
        slope: q.differentiate().eval(y_inf).expect("root is positive"),
        neighborhood: right_neighborhood(q, y_inf)?,
    }))
}

fn falling(x: &Rational, k: usize) -> Rational {
    (0..k as i64).fold(Rational::from_integer(1.into()), |acc, j| acc * (x - Rational::from_integer(j.into())))
}

/// Checks both falling-factorial identities at a root of `ψ` for `2 ≤ k ≤ K`.
pub fn falling_factorial_check(p: &ExtremalParams, y_root: &Rational, kmax: usize) -> Result<bool, KeError> {
    let psi = build_psi(p);
    let is_root = *y_root > Rational::zero() && psi.eval(y_root).is_ok_and(|v| v.is_zero());
    if !is_root {
        return Err(KeError::NotARoot(format_rational(y_root)));
    }
    let n_tilde = psi.differentiate().eval(y_root).expect("root is positive");
    let shifted = y_root + &n_tilde;
    let seq = q_sequence(p, AmbientSign::Projective, kmax);
    Ok((2..=kmax).all(|k| {
        let q = seq.get(k);
        let value = q.eval(y_root).expect("root is positive");
        let slope = q.differentiate().eval(y_root).expect("root is positive");
        value == falling(y_root, k) && &value + &n_tilde * slope == falling(&shifted, k)
    }))
}

/// Result of scanning `αg` for one `α`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityEntry {
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    /// `λ/α` for Kähler–Einstein members.
    #[serde(with = "serde_rational::option", default, skip_serializing_if = "Option::is_none")]
    pub lambda_alpha: Option<Rational>,
    #[serde(flatten)]
    pub report: ObstructionReport,
}

/// Projective (`ε = +1`) obstruction scans of `αg` over a finite grid of `α`.
/// The domain is the positivity domain through `anchor`, scaled by `α`.
pub fn stability_scan(
    p: &ExtremalParams,
    alphas: &[Rational],
    anchor: &Rational,
    kmax: usize,
) -> Result<Vec<StabilityEntry>, KeError> {
    if let Some(bad) = alphas.iter().find(|a| **a <= Rational::zero()) {
        return Err(FamilyError::NonPositiveScale(format_rational(bad)).into());
    }
    let domain = positivity_domain(p, anchor)?;
    let ke = p.b.is_zero() && p.d.is_zero();
    let lambda = einstein_constant(p);
    alphas
        .par_iter()
        .map(|alpha| {
            let scaled = scale_params(p, alpha)?;
            let interval = domain.scaled(alpha).inner_interval();
            let report = obstruction_scan(&scaled, AmbientSign::Projective, &interval, kmax)?;
            Ok(StabilityEntry {
                alpha: alpha.clone(),
                lambda_alpha: ke.then(|| &lambda / alpha),
                report,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlaurent::{int, rat};
    use crate::resolvability::ScanVerdict;

    fn ke(n: u32, a: Rational, c: Rational) -> ExtremalParams {
        ExtremalParams::new(n, a, int(0), c, int(0)).unwrap()
    }

    fn kenwb() -> ExtremalParams {
        ke(2, rat(4, 3), rat(-1, 3))
    }

    /// n = 2 member with a root forced at `y0`: `A = y0²(1 − C·y0)`.
    fn forced(y0: Rational, c: Rational) -> ExtremalParams {
        let a = &y0 * &y0 * (int(1) - &c * &y0);
        ke(2, a, c)
    }

    #[test]
    fn kenwb_invariants() {
        let d = ke_invariants(&kenwb(), &int(2)).unwrap();
        assert_eq!(d.lambda, int(-2));
        assert_eq!(d.y_inf, Endpoint::Exact { value: int(1) });
        assert_eq!(d.n_tilde, NTilde::Exact { value: int(3) });
        assert!(d.y_inf_integral && d.n_tilde_integral);
        assert_eq!(d.predicted_obstruction_k, None);
    }

    #[test]
    fn well_behaved_is_trivial() {
        let d = ke_invariants(&ke(2, int(0), int(-1)), &int(1)).unwrap();
        assert_eq!(d.y_inf, Endpoint::Zero);
        assert_eq!(d.predicted_obstruction_k, None);
        assert!(matches!(
            ke_invariants(&ExtremalParams::new(2, int(0), int(1), int(0), int(0)).unwrap(), &int(2)),
            Err(KeError::NotKe)
        ));
    }

    #[test]
    fn non_integral_root_prediction() {
        let p = forced(rat(3, 2), rat(1, 3));
        let d = ke_invariants(&p, &rat(7, 4)).unwrap();
        assert_eq!(d.y_inf, Endpoint::Exact { value: rat(3, 2) });
        assert_eq!(d.predicted_obstruction_k, Some(3));
        let check = check_prediction(&p, &d).unwrap().unwrap();
        assert_eq!(check.value, rat(-3, 8));
        assert!(check.holds(PredictionRoute::NonIntegralRoot));
    }

    #[test]
    fn non_integral_slope_prediction() {
        // Root at 1 with C = 1/4, so λ = 3/2 and ñ = 2 − 3/4.
        let p = forced(int(1), rat(1, 4));
        let d = ke_invariants(&p, &rat(3, 2)).unwrap();
        assert_eq!(d.n_tilde, NTilde::Exact { value: rat(5, 4) });
        assert_eq!(d.route, Some(PredictionRoute::NonIntegralSlope));
        assert_eq!(d.predicted_obstruction_k, Some(4));
        assert!(check_prediction(&p, &d).unwrap().unwrap().holds(PredictionRoute::NonIntegralSlope));
    }

    #[test]
    fn falling_factorials() {
        assert!(falling_factorial_check(&kenwb(), &int(1), 11).unwrap());
        let q11 = q_sequence(&kenwb(), AmbientSign::Projective, 11);
        assert!(q11.get(11).eval(&int(1)).unwrap().is_zero());
        assert!(falling_factorial_check(&forced(rat(3, 2), rat(1, 3)), &rat(3, 2), 6).unwrap());
        assert!(matches!(
            falling_factorial_check(&ke(2, rat(5, 4), rat(-1, 3)), &int(1), 5),
            Err(KeError::NotARoot(_))
        ));
    }

    #[test]
    fn constant_curvature_grid() {
        let fs = ke(2, int(0), int(1));
        let alphas = [rat(1, 2), rat(2, 3), int(1)];
        let out = stability_scan(&fs, &alphas, &rat(1, 2), 10).unwrap();
        assert!(matches!(out[0].report.verdict, ScanVerdict::Obstructed { k: 2, .. }));
        assert!(matches!(out[1].report.verdict, ScanVerdict::Obstructed { k: 2, .. }));
        assert_eq!(out[2].report.verdict, ScanVerdict::IdenticallyZero { k: 2 });
        assert_eq!(out[1].lambda_alpha, Some(int(9)));
        let hyp = ke(2, int(0), int(-1));
        let out = stability_scan(&hyp, &[rat(9, 10), int(1), rat(11, 10)], &int(1), 15).unwrap();
        assert!(out.iter().all(|e| e.report.verdict == ScanVerdict::Clear { k: 15 }));
        assert!(stability_scan(&hyp, &[int(0)], &int(1), 3).is_err());
    }

    #[test]
    fn stability_json() {
        let fs = ke(2, int(0), int(1));
        let out = stability_scan(&fs, &[rat(2, 3)], &rat(1, 2), 3).unwrap();
        let text = serde_json::to_string(&out).unwrap();
        assert!(text.starts_with(r#"[{"alpha":"2/3","lambda_alpha":"9","verdict":"obstructed","k":2"#), "{text}");
        let back: Vec<StabilityEntry> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out);
    }
}
