//! The four-parameter extremal family
//! `ψ(y) = y − A·y^(1−n) − B·y^(2−n) − C·y² − D·y³`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratlaurent::rational::{pow, serde_rational};
use crate::ratlaurent::{
    isolate_positive_roots, refine_root, Interval, LaurentPoly, Rational, RootInterval,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("complex dimension must be at least 1")]
    DimensionZero,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("psi is not positive at y0 = {0}")]
    NotInteriorPoint(String),
    #[error("scalar curvature is not affine in y: {0}")]
    NonAffineScalar(String),
}

/// Parameters `(A, B, C, D)` and complex dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ExtremalParams {
    pub n: u32,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    n: u32,
    #[serde(rename = "A", with = "serde_rational")]
    a: Rational,
    #[serde(rename = "B", with = "serde_rational")]
    b: Rational,
    #[serde(rename = "C", with = "serde_rational")]
    c: Rational,
    #[serde(rename = "D", with = "serde_rational")]
    d: Rational,
}

impl TryFrom<RawParams> for ExtremalParams {
    type Error = FamilyError;

    fn try_from(raw: RawParams) -> Result<Self, FamilyError> {
        ExtremalParams::new(raw.n, raw.a, raw.b, raw.c, raw.d)
    }
}

impl From<ExtremalParams> for RawParams {
    fn from(p: ExtremalParams) -> Self {
        RawParams {
            n: p.n,
            a: p.a,
            b: p.b,
            c: p.c,
            d: p.d,
        }
    }
}

impl ExtremalParams {
    pub fn new(n: u32, a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self, FamilyError> {
        if n == 0 {
            return Err(FamilyError::DimensionZero);
        }
        Ok(Self { n, a, b, c, d })
    }

    /// The flat member `ψ = y`.
    pub fn flat(n: u32) -> Self {
        Self::new(n, Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero())
            .expect("n >= 1")
    }

    pub fn dim(&self) -> i64 {
        self.n as i64
    }
}

impl fmt::Display for ExtremalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::ratlaurent::format_rational as fr;
        write!(
            f,
            "n={} A={} B={} C={} D={}",
            self.n,
            fr(&self.a),
            fr(&self.b),
            fr(&self.c),
            fr(&self.d)
        )
    }
}

/// The sign `ε` of the ambient complex space form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum AmbientSign {
    Hyperbolic,
    Flat,
    Projective,
}

impl AmbientSign {
    pub const ALL: [AmbientSign; 3] = [AmbientSign::Hyperbolic, AmbientSign::Flat, AmbientSign::Projective];

    pub fn value(self) -> i8 {
        match self {
            AmbientSign::Hyperbolic => -1,
            AmbientSign::Flat => 0,
            AmbientSign::Projective => 1,
        }
    }

    pub fn as_rational(self) -> Rational {
        Rational::from_integer(self.value().into())
    }
}

impl TryFrom<i8> for AmbientSign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            -1 => Ok(AmbientSign::Hyperbolic),
            0 => Ok(AmbientSign::Flat),
            1 => Ok(AmbientSign::Projective),
            other => Err(format!("ambient sign must be -1, 0 or 1, got {other}")),
        }
    }
}

impl From<AmbientSign> for i8 {
    fn from(e: AmbientSign) -> i8 {
        e.value()
    }
}

impl fmt::Display for AmbientSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Most specific curvature class of a family member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum MetricClass {
    ConstHolSecCurv,
    KahlerEinstein {
        #[serde(with = "serde_rational")]
        lambda: Rational,
    },
    CscK {
        #[serde(with = "serde_rational")]
        s: Rational,
    },
    ExtremalProper {
        #[serde(with = "serde_rational")]
        gamma1: Rational,
        #[serde(with = "serde_rational")]
        gamma2: Rational,
    },
}

impl MetricClass {
    pub fn is_csck(&self) -> bool {
        !matches!(self, MetricClass::ExtremalProper { .. })
    }

    pub fn is_kahler_einstein(&self) -> bool {
        matches!(self, MetricClass::ConstHolSecCurv | MetricClass::KahlerEinstein { .. })
    }
}

fn small(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub fn build_psi(p: &ExtremalParams) -> LaurentPoly {
    let n = p.dim();
    LaurentPoly::normalize([
        (1, Rational::one()),
        (1 - n, -p.a.clone()),
        (2 - n, -p.b.clone()),
        (2, -p.c.clone()),
        (3, -p.d.clone()),
    ])
}

/// Einstein constant of a member with `B = D = 0`: `λ = 2(n+1)C`.
pub fn einstein_constant(p: &ExtremalParams) -> Rational {
    small(2 * (p.dim() + 1)) * &p.c
}

pub fn classify(p: &ExtremalParams) -> MetricClass {
    let n = p.dim();
    if p.b.is_zero() && p.d.is_zero() {
        if p.a.is_zero() {
            MetricClass::ConstHolSecCurv
        } else {
            MetricClass::KahlerEinstein {
                lambda: einstein_constant(p),
            }
        }
    } else if p.d.is_zero() {
        MetricClass::CscK {
            s: small(n * (n + 1)) * &p.c,
        }
    } else {
        MetricClass::ExtremalProper {
            gamma1: small((n + 1) * (n + 2)) * &p.d,
            gamma2: small(n * (n + 1)) * &p.c,
        }
    }
}

/// Scalar curvature data along `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarCurvature {
    pub gamma1: Rational,
    pub gamma2: Rational,
    pub s: LaurentPoly,
    pub sigma: LaurentPoly,
}

/// `s = n(n−1)/y − y^(1−n)·(y^(n−1)ψ)''`, read off symbolically; `γ₁, γ₂`
/// are taken from the computed `s`, not from the parameters.
pub fn scalar_curvature(p: &ExtremalParams) -> Result<ScalarCurvature, FamilyError> {
    let n = p.dim();
    let psi = build_psi(p);
    let second = psi.shift(n - 1).differentiate().differentiate().shift(1 - n);
    let s = LaurentPoly::monomial(small(n * (n - 1)), -1) - second;
    if s.terms().any(|(e, _)| e != 0 && e != 1) {
        return Err(FamilyError::NonAffineScalar(s.to_string()));
    }
    let sigma = psi.shift(-1).scale(&small(n - 1)) + psi.differentiate();
    Ok(ScalarCurvature {
        gamma1: s.coeff(1),
        gamma2: s.coeff(0),
        s,
        sigma,
    })
}

/// Parameters of `αg`: `(αⁿA, α^(n−1)B, C/α, D/α²)`.
pub fn scale_params(p: &ExtremalParams, alpha: &Rational) -> Result<ExtremalParams, FamilyError> {
    if !alpha.is_positive() {
        return Err(FamilyError::NonPositiveScale(crate::ratlaurent::format_rational(alpha)));
    }
    let n = p.dim();
    Ok(ExtremalParams {
        n: p.n,
        a: pow(alpha, n) * &p.a,
        b: pow(alpha, n - 1) * &p.b,
        c: &p.c / alpha,
        d: &p.d / (alpha * alpha),
    })
}

/// One end of a positivity domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Endpoint {
    Zero,
    Infinity,
    /// A rational root of ψ.
    Exact {
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    /// An irrational root of ψ inside `(lo, hi)`.
    Isolated {
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
    },
}

impl Endpoint {
    fn from_root(root: &RootInterval) -> Self {
        match &root.exact {
            Some(v) => Endpoint::Exact { value: v.clone() },
            None => Endpoint::Isolated {
                lo: root.lo.clone(),
                hi: root.hi.clone(),
            },
        }
    }

    pub fn is_root(&self) -> bool {
        matches!(self, Endpoint::Exact { .. } | Endpoint::Isolated { .. })
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            Endpoint::Zero => Some(Rational::zero()),
            Endpoint::Exact { value } => Some(value.clone()),
            _ => None,
        }
    }

    /// A rational stand-in: the value itself, or the midpoint of the
    /// isolating interval. `None` for infinity.
    pub fn approx(&self) -> Option<Rational> {
        match self {
            Endpoint::Zero => Some(Rational::zero()),
            Endpoint::Infinity => None,
            Endpoint::Exact { value } => Some(value.clone()),
            Endpoint::Isolated { lo, hi } => Some((lo + hi) / small(2)),
        }
    }

    pub fn scaled(&self, alpha: &Rational) -> Self {
        match self {
            Endpoint::Exact { value } => Endpoint::Exact { value: value * alpha },
            Endpoint::Isolated { lo, hi } => Endpoint::Isolated {
                lo: lo * alpha,
                hi: hi * alpha,
            },
            other => other.clone(),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::ratlaurent::format_rational as fr;
        match self {
            Endpoint::Zero => write!(f, "0"),
            Endpoint::Infinity => write!(f, "inf"),
            Endpoint::Exact { value } => write!(f, "{}", fr(value)),
            Endpoint::Isolated { lo, hi } => write!(f, "[{} .. {}]", fr(lo), fr(hi)),
        }
    }
}

/// Maximal open interval around an anchor on which `ψ > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityDomain {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl PositivityDomain {
    /// The largest rational open interval certainly inside the domain.
    /// Isolated endpoints are replaced by the inner end of their interval.
    pub fn inner_interval(&self) -> Interval {
        let lo = match &self.lo {
            Endpoint::Zero => Rational::zero(),
            Endpoint::Exact { value } => value.clone(),
            Endpoint::Isolated { hi, .. } => hi.clone(),
            Endpoint::Infinity => unreachable!("lower end is never infinite"),
        };
        let hi = match &self.hi {
            Endpoint::Infinity => None,
            Endpoint::Exact { value } => Some(value.clone()),
            Endpoint::Isolated { lo, .. } => Some(lo.clone()),
            Endpoint::Zero => unreachable!("upper end is never zero"),
        };
        Interval::new(Some(lo), hi).expect("domain endpoints are ordered")
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.lo, Endpoint::Isolated { .. }) && !matches!(self.hi, Endpoint::Isolated { .. })
    }

    pub fn scaled(&self, alpha: &Rational) -> Self {
        Self {
            lo: self.lo.scaled(alpha),
            hi: self.hi.scaled(alpha),
        }
    }
}

impl fmt::Display for PositivityDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Shrinks an isolating interval until it no longer contains `y0`.
fn exclude_point(psi: &LaurentPoly, mut root: RootInterval, y0: &Rational) -> RootInterval {
    while root.exact.is_none() && root.contains(y0) {
        let half = root.width() / small(2);
        root = refine_root(psi, &root, &half);
    }
    root
}

pub fn positivity_domain(p: &ExtremalParams, y0: &Rational) -> Result<PositivityDomain, FamilyError> {
    let psi = build_psi(p);
    let not_interior = || FamilyError::NotInteriorPoint(crate::ratlaurent::format_rational(y0));
    if !y0.is_positive() {
        return Err(not_interior());
    }
    match psi.eval(y0) {
        Ok(v) if v.is_positive() => {}
        _ => return Err(not_interior()),
    }
    let roots = isolate_positive_roots(&psi).expect("psi is nonzero where it is positive");
    let mut below = None;
    let mut above = None;
    for root in roots {
        let root = exclude_point(&psi, root, y0);
        if root.approx() < *y0 {
            below = Some(root);
        } else if above.is_none() {
            above = Some(root);
        }
    }
    Ok(PositivityDomain {
        lo: below.as_ref().map_or(Endpoint::Zero, Endpoint::from_root),
        hi: above.as_ref().map_or(Endpoint::Infinity, Endpoint::from_root),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlaurent::{int, rat};

    fn params(n: u32, a: Rational, b: Rational, c: Rational, d: Rational) -> ExtremalParams {
        ExtremalParams::new(n, a, b, c, d).unwrap()
    }

    fn lp(raw: &[(i64, Rational)]) -> LaurentPoly {
        LaurentPoly::normalize(raw.iter().cloned())
    }

    #[test]
    fn psi_examples() {
        let exfond = params(2, int(0), int(0), int(-3), int(-2));
        assert_eq!(build_psi(&exfond), lp(&[(1, int(1)), (2, int(3)), (3, int(2))]));
        assert_eq!(build_psi(&ExtremalParams::flat(5)), LaurentPoly::var());
        let exrinf = params(2, int(-1), int(0), int(2), int(0));
        assert_eq!(build_psi(&exrinf), lp(&[(1, int(1)), (-1, int(1)), (2, int(-2))]));
        // n = 2 puts the B term in the constant slot.
        let bs = params(2, int(0), int(1), int(0), int(0));
        assert_eq!(build_psi(&bs), lp(&[(1, int(1)), (0, int(-1))]));
    }

    #[test]
    fn psi_derivative_at_root() {
        let p = params(2, rat(4, 3), int(0), rat(-1, 3), int(0));
        assert_eq!(build_psi(&p).differentiate().eval(&int(1)).unwrap(), int(3));
        assert_eq!(build_psi(&p).eval(&int(1)).unwrap(), int(0));
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify(&params(2, int(0), int(1), int(0), int(0))),
            MetricClass::CscK { s: int(0) }
        );
        assert_eq!(
            classify(&params(2, rat(4, 3), int(0), rat(-1, 3), int(0))),
            MetricClass::KahlerEinstein { lambda: int(-2) }
        );
        assert_eq!(classify(&params(3, int(0), int(0), int(1), int(0))), MetricClass::ConstHolSecCurv);
        assert_eq!(
            classify(&params(2, int(0), int(0), int(-3), int(-2))),
            MetricClass::ExtremalProper {
                gamma1: int(-24),
                gamma2: int(-18)
            }
        );
    }

    #[test]
    fn scalar_examples() {
        let bs = scalar_curvature(&params(2, int(0), int(1), int(0), int(0))).unwrap();
        assert!(bs.s.is_zero());
        let partbal = scalar_curvature(&params(2, int(0), int(2), int(-1), int(0))).unwrap();
        assert_eq!(partbal.s, LaurentPoly::constant(int(-6)));
        let d1 = scalar_curvature(&params(1, int(0), int(0), int(0), int(1))).unwrap();
        assert_eq!((d1.gamma1, d1.gamma2), (int(6), int(0)));
    }

    #[test]
    fn sigma_flat() {
        // ψ = y: σ = (n−1) + 1 = n.
        let sc = scalar_curvature(&ExtremalParams::flat(3)).unwrap();
        assert_eq!(sc.sigma, LaurentPoly::constant(int(3)));
    }

    #[test]
    fn scaling() {
        let p = params(2, int(1), int(1), int(1), int(1));
        let q = scale_params(&p, &int(2)).unwrap();
        assert_eq!(q, params(2, int(4), int(2), rat(1, 2), rat(1, 4)));
        assert_eq!(scale_params(&p, &int(1)).unwrap(), p);
        assert!(matches!(scale_params(&p, &int(0)), Err(FamilyError::NonPositiveScale(_))));
        // α·ψ(ỹ/α) = ψ_α(ỹ), checked in binary64 at a few points.
        let (psi, psi2) = (build_psi(&p), build_psi(&q));
        for i in 1..=10 {
            let yt = 0.37 * i as f64;
            let lhs = 2.0 * psi.eval_f64(yt / 2.0);
            assert!((lhs - psi2.eval_f64(yt)).abs() < 1e-9 * (1.0 + lhs.abs()));
        }
        let fs = params(3, int(0), int(0), int(1), int(0));
        assert_eq!(classify(&scale_params(&fs, &rat(7, 3)).unwrap()), MetricClass::ConstHolSecCurv);
    }

    #[test]
    fn domains() {
        let flat = positivity_domain(&ExtremalParams::flat(2), &int(1)).unwrap();
        assert_eq!((flat.lo, flat.hi), (Endpoint::Zero, Endpoint::Infinity));
        let bs = positivity_domain(&params(2, int(0), int(1), int(0), int(0)), &int(2)).unwrap();
        assert_eq!(bs.lo, Endpoint::Exact { value: int(1) });
        assert_eq!(bs.hi, Endpoint::Infinity);
        let exrinf = params(2, int(-1), int(0), int(2), int(0));
        let d = positivity_domain(&exrinf, &rat(1, 2)).unwrap();
        assert_eq!((d.lo, d.hi), (Endpoint::Zero, Endpoint::Exact { value: int(1) }));
        assert!(matches!(
            positivity_domain(&exrinf, &int(2)),
            Err(FamilyError::NotInteriorPoint(_))
        ));
    }

    #[test]
    fn irrational_endpoint() {
        // ψ = y − y³/2 vanishes at √2.
        let p = params(2, int(0), int(0), int(0), rat(1, 2));
        let d = positivity_domain(&p, &int(1)).unwrap();
        match &d.hi {
            Endpoint::Isolated { lo, hi } => {
                assert!(lo * lo < int(2) && int(2) < hi * hi);
            }
            other => panic!("expected isolated endpoint, got {other:?}"),
        }
        assert!(d.inner_interval().hi().unwrap() < &rat(3, 2));
    }

    #[test]
    fn params_json() {
        let p = params(2, rat(4, 3), int(0), rat(-1, 3), int(0));
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"n":2,"A":"4/3","B":"0","C":"-1/3","D":"0"}"#);
        assert_eq!(serde_json::from_str::<ExtremalParams>(&text).unwrap(), p);
        assert!(serde_json::from_str::<ExtremalParams>(r#"{"n":2,"A":"0.5","B":"0","C":"0","D":"0"}"#).is_err());
        assert!(serde_json::from_str::<ExtremalParams>(r#"{"n":0,"A":"0","B":"0","C":"0","D":"0"}"#).is_err());
        let class = serde_json::to_string(&MetricClass::KahlerEinstein { lambda: int(-2) }).unwrap();
        assert_eq!(class, r#"{"tag":"KahlerEinstein","lambda":"-2"}"#);
        assert_eq!(serde_json::to_string(&AmbientSign::Hyperbolic).unwrap(), "-1");
    }
}
