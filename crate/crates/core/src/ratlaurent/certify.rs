//! Exact sign certificates for Laurent polynomials on open intervals of the
//! positive half-line.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::laurent::LaurentPoly;
use super::rational::{format_rational, parse_rational, serde_rational, Rational};
use super::roots::{bisect_once, exact_enclosure, isolate_raw, RootInterval, SturmChain, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("empty interval: lower end {lo} is not below upper end {hi}")]
    Empty { lo: String, hi: String },
    #[error("interval {0} is not contained in (0, +inf)")]
    NotPositive(String),
}

/// Open interval with rational or infinite ends. `None` stands for `-∞` on
/// the left and `+∞` on the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
}

impl Interval {
    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Result<Self, IntervalError> {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l >= h {
                return Err(IntervalError::Empty {
                    lo: format_rational(l),
                    hi: format_rational(h),
                });
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn bounded(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        Self::new(Some(lo), Some(hi))
    }

    /// `(lo, +∞)`
    pub fn above(lo: Rational) -> Self {
        Self { lo: Some(lo), hi: None }
    }

    /// `(0, +∞)`
    pub fn positive() -> Self {
        Self::above(Rational::zero())
    }

    pub fn lo(&self) -> Option<&Rational> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&Rational> {
        self.hi.as_ref()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| l < x) && self.hi.as_ref().is_none_or(|h| x < h)
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match (&other.lo, &self.lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => o <= s,
        };
        let hi_ok = match (&other.hi, &self.hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => s <= o,
        };
        lo_ok && hi_ok
    }

    /// Image under `y ↦ αy` for `α > 0`.
    pub fn scaled(&self, alpha: &Rational) -> Self {
        Self {
            lo: self.lo.as_ref().map(|l| l * alpha),
            hi: self.hi.as_ref().map(|h| h * alpha),
        }
    }

    /// Some rational strictly inside.
    pub fn interior_point(&self) -> Rational {
        let two = Rational::from_integer(2.into());
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => (l + h) / two,
            (Some(l), None) => l + Rational::one(),
            (None, Some(h)) => h - Rational::one(),
            (None, None) => Rational::zero(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), format_rational);
        let hi = self.hi.as_ref().map_or("inf".to_string(), format_rational);
        write!(f, "({lo}, {hi})")
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo.as_ref().map_or("-inf".to_string(), format_rational),
            hi: self.hi.as_ref().map_or("inf".to_string(), format_rational),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(d)?;
        let end = |text: &str, inf: &str| -> Result<Option<Rational>, D::Error> {
            if text.trim() == inf {
                Ok(None)
            } else {
                parse_rational(text).map(Some).map_err(serde::de::Error::custom)
            }
        };
        let lo = end(&repr.lo, "-inf")?;
        let hi = end(&repr.hi, "inf")?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Exact verdict on the sign of a polynomial over an open interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PositivityCertificate {
    NonnegativeOn {
        interval: Interval,
    },
    NegativeWitness {
        #[serde(with = "serde_rational")]
        point: Rational,
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    IdenticallyZero,
}

impl PositivityCertificate {
    pub fn is_negative(&self) -> bool {
        matches!(self, Self::NegativeWitness { .. })
    }
}

/// Moves the left end of the first isolating interval strictly past `lo`
/// and the right end of the last one strictly before `hi`.
fn detach_from_ends(chain: &SturmChain, roots: &mut [RootInterval], lo: &Rational, hi: &Rational) {
    let width = Rational::one();
    if let Some(first) = roots.first_mut() {
        while first.exact.is_none() && &first.lo == lo {
            let (mut a, mut b) = (first.lo.clone(), first.hi.clone());
            match bisect_once(chain, &mut a, &mut b) {
                Some(r) => *first = exact_enclosure(r, &first.lo, &first.hi, &width),
                None => {
                    first.lo = a;
                    first.hi = b;
                }
            }
        }
    }
    if let Some(last) = roots.last_mut() {
        while last.exact.is_none() && &last.hi == hi {
            let (mut a, mut b) = (last.lo.clone(), last.hi.clone());
            match bisect_once(chain, &mut a, &mut b) {
                Some(r) => *last = exact_enclosure(r, &last.lo, &last.hi, &width),
                None => {
                    last.lo = a;
                    last.hi = b;
                }
            }
        }
    }
}

/// One rational sample strictly between each pair of consecutive distinct
/// roots of `p` inside `(lo, hi)`, plus one before the first and one after
/// the last. `p` has constant nonzero sign on each such gap.
fn gap_samples(p: &LaurentPoly, lo: &Rational, hi: Option<&Rational>) -> Vec<Rational> {
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    let two = Rational::from_integer(2.into());
    let upper = match hi {
        Some(h) => h.clone(),
        None => chain.root_bound().max(lo.clone()) + Rational::one(),
    };
    let mut roots = isolate_raw(&chain, lo, &upper);
    detach_from_ends(&chain, &mut roots, lo, &upper);
    let mut samples = Vec::with_capacity(roots.len() + 1);
    let mut left = lo.clone();
    for iv in &roots {
        samples.push((&left + &iv.lo) / &two);
        left = iv.hi.clone();
    }
    samples.push((&left + &upper) / &two);
    samples
}

/// Decides whether `p ≥ 0` throughout the open interval `interval ⊆ (0, +∞)`.
///
/// On failure returns the leftmost gap midpoint where `p` is negative, with
/// its exact value.
pub fn certify_sign_on_interval(
    p: &LaurentPoly,
    interval: &Interval,
) -> Result<PositivityCertificate, IntervalError> {
    let lo = match interval.lo() {
        Some(l) if !l.is_negative() => l.clone(),
        _ => return Err(IntervalError::NotPositive(interval.to_string())),
    };
    if p.is_zero() {
        return Ok(PositivityCertificate::IdenticallyZero);
    }
    for point in gap_samples(p, &lo, interval.hi()) {
        let value = p.eval(&point).expect("sample points are positive");
        if value.is_negative() {
            return Ok(PositivityCertificate::NegativeWitness { point, value });
        }
    }
    Ok(PositivityCertificate::NonnegativeOn {
        interval: interval.clone(),
    })
}

/// Whether `p > 0` everywhere on the interval (no roots inside, positive sign).
pub fn strictly_positive_on(p: &LaurentPoly, interval: &Interval) -> Result<bool, IntervalError> {
    let lo = match interval.lo() {
        Some(l) if !l.is_negative() => l.clone(),
        _ => return Err(IntervalError::NotPositive(interval.to_string())),
    };
    if p.is_zero() {
        return Ok(false);
    }
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    if chain.count_open(&lo, interval.hi()) > 0 {
        return Ok(false);
    }
    let x = interval.interior_point();
    Ok(p.eval(&x).expect("interior point is positive").is_positive())
}

/// Sign of `p` just to the right of `a`, with a `δ > 0` such that `p` has no
/// root in `(a, a + δ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightNeighborhood {
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    /// -1, 0 or +1; 0 only for the zero polynomial.
    pub sign: i8,
    pub certificate: PositivityCertificate,
}

/// Certifies the sign of `p` on a right neighbourhood `(a, a + δ)` of `a ≥ 0`.
///
/// `δ` starts at one eighth of the gap to the next root above `a` (or 1 when
/// there is none within distance 1) and is halved until the certificate on
/// `(a, a + δ)` is definite.
pub fn right_neighborhood(p: &LaurentPoly, a: &Rational) -> Result<RightNeighborhood, IntervalError> {
    if a.is_negative() {
        return Err(IntervalError::NotPositive(format_rational(a)));
    }
    if p.is_zero() {
        return Ok(RightNeighborhood {
            delta: Rational::one(),
            sign: 0,
            certificate: PositivityCertificate::IdenticallyZero,
        });
    }
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    let reach = a + Rational::one();
    let mut roots = isolate_raw(&chain, a, &reach);
    detach_from_ends(&chain, &mut roots, a, &reach);
    let eighth = Rational::new(1.into(), 8.into());
    let mut delta = match roots.first() {
        Some(iv) => (&iv.lo - a) * &eighth,
        None => Rational::one(),
    };
    loop {
        let iv = Interval::bounded(a.clone(), a + &delta)?;
        if chain.count_open(a, Some(&(a + &delta))) == 0 {
            let mid = iv.interior_point();
            // The chain is built from the square-free part, whose sign can
            // differ from that of `p`; evaluate `p` itself.
            let sign = if p.eval(&mid).expect("interior point is positive").is_negative() { -1 } else { 1 };
            let certificate = certify_sign_on_interval(p, &iv)?;
            return Ok(RightNeighborhood { delta, sign, certificate });
        }
        delta /= Rational::from_integer(2.into());
    }
}
