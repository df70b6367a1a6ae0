//! Real-root isolation on `(0, +∞)` by Sturm sequences and exact bisection.
//!
//! A Laurent polynomial is first multiplied by `y^(-valuation)`, which leaves
//! its positive roots unchanged and yields an ordinary polynomial with a
//! nonzero constant term. Counting and refinement work on the square-free
//! part, so every isolated root is simple.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::laurent::LaurentPoly;
use super::rational::{serde_rational, simplest_between, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
}

/// Default isolation width, `2^-20`.
pub fn default_width() -> Rational {
    BigRational::new(BigInt::one(), BigInt::one() << 20u32)
}

/// Dense univariate polynomial over Q, ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `y^(-valuation) · p` as an ordinary polynomial.
    pub fn from_laurent(p: &LaurentPoly) -> Self {
        Self::new(p.clear_valuation().1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let db = divisor.degree();
        let lead = divisor.leading();
        if rem.len() <= db {
            return (Self::new(Vec::new()), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - db];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + db] / &lead;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &q * d;
                }
            }
            quot[i] = q;
        }
        rem.truncate(db);
        (Self::new(quot), Self::new(rem))
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let den_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den_lcm / c.denom()))
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        Self::new(
            ints.into_iter()
                .map(|c| BigRational::from_integer(c / &content))
                .collect(),
        )
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        while !b.is_zero() {
            let r = a.div_rem(&b).1.primitive();
            a = b;
            b = r;
        }
        a
    }

    /// `p / gcd(p, p')`, made primitive.
    pub fn squarefree(&self) -> Self {
        if self.degree() == 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.primitive();
        }
        self.div_rem(&g).0.primitive()
    }

    fn to_int_coeffs(&self) -> Vec<BigInt> {
        // Only called on primitive polynomials.
        self.coeffs.iter().map(|c| c.numer().clone()).collect()
    }
}

/// Integer polynomial evaluated by sign only, homogenised so that no
/// rational normalisation happens per step.
#[derive(Debug, Clone)]
struct SignPoly {
    coeffs: Vec<BigInt>,
}

impl SignPoly {
    fn sign_at(&self, x: &Rational) -> Sign {
        // q^deg · p(p/q) = Σ c_i p^i q^(deg-i); q > 0 so the sign is unchanged.
        let (num, den) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &qpow;
            qpow *= den;
        }
        acc.sign()
    }

    fn sign_at_infinity(&self) -> Sign {
        self.coeffs.last().map(|c| c.sign()).unwrap_or(Sign::NoSign)
    }
}

/// Sturm chain of a square-free polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain {
    base: UniPoly,
    chain: Vec<SignPoly>,
}

impl SturmChain {
    /// Chain for the square-free part of `p` (which must be nonzero).
    pub fn new(p: &UniPoly) -> Self {
        let base = p.squarefree();
        let mut polys = vec![base.clone()];
        let d = base.derivative().primitive();
        if !d.is_zero() {
            polys.push(d);
            loop {
                let n = polys.len();
                let r = polys[n - 2].div_rem(&polys[n - 1]).1;
                if r.is_zero() {
                    break;
                }
                polys.push(UniPoly::new(r.coeffs.iter().map(|c| -c).collect()).primitive());
            }
        }
        let chain = polys.iter().map(|q| SignPoly { coeffs: q.to_int_coeffs() }).collect();
        Self { base, chain }
    }

    /// The square-free primitive polynomial the chain was built from.
    pub fn base(&self) -> &UniPoly {
        &self.base
    }

    fn count_changes(signs: impl Iterator<Item = Sign>) -> usize {
        let mut changes = 0;
        let mut last = Sign::NoSign;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::count_changes(self.chain.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_infinity(&self) -> usize {
        Self::count_changes(self.chain.iter().map(|p| p.sign_at_infinity()))
    }

    pub fn sign_at(&self, x: &Rational) -> Sign {
        self.chain[0].sign_at(x)
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub fn count_half_open(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    /// Number of distinct roots in the open interval `(a, b)`; `b = None` is `+∞`.
    pub fn count_open(&self, a: &Rational, b: Option<&Rational>) -> usize {
        match b {
            Some(b) => {
                let c = self.count_half_open(a, b);
                if self.sign_at(b) == Sign::NoSign {
                    c - 1
                } else {
                    c
                }
            }
            None => self.variations_at(a) - self.variations_at_infinity(),
        }
    }

    /// Strict upper bound on the absolute value of every root (Cauchy).
    pub fn root_bound(&self) -> Rational {
        let lead = self.base.leading().abs();
        let max = self
            .base
            .coeffs
            .iter()
            .take(self.base.degree())
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        max + Rational::one()
    }

    /// Largest absolute leading coefficient of the primitive base; every rational
    /// root has a denominator dividing it.
    fn denominator_bound(&self) -> BigInt {
        self.base.leading().numer().abs()
    }
}

/// An open interval `(lo, hi)` holding exactly one simple positive root.
/// `exact` carries the root itself when it is rational and was identified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    #[serde(with = "serde_rational::option", default)]
    pub exact: Option<Rational>,
}

impl RootInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// A representative point: the exact root or the midpoint.
    pub fn approx(&self) -> Rational {
        self.exact
            .clone()
            .unwrap_or_else(|| (&self.lo + &self.hi) / Rational::from_integer(2.into()))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }
}

fn half() -> Rational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// One bisection step on an interval with exactly one root inside.
/// Returns the exact root if the midpoint hits it.
pub(crate) fn bisect_once(chain: &SturmChain, lo: &mut Rational, hi: &mut Rational) -> Option<Rational> {
    let mid = (&*lo + &*hi) * half();
    let sm = chain.sign_at(&mid);
    if sm == Sign::NoSign {
        return Some(mid);
    }
    let sl = chain.sign_at(lo);
    let sh = chain.sign_at(hi);
    let root_left = if sl != Sign::NoSign {
        sl != sm
    } else if sh != Sign::NoSign {
        sh == sm
    } else {
        chain.count_open(lo, Some(&mid)) == 1
    };
    if root_left {
        *hi = mid;
    } else {
        *lo = mid;
    }
    None
}

/// Shrinks an exact root's enclosure to width at most `width`, keeping it
/// isolating.
pub(crate) fn exact_enclosure(root: Rational, lo: &Rational, hi: &Rational, width: &Rational) -> RootInterval {
    let mut r = width * half();
    let room = (&root - lo).min(hi - &root);
    while r >= room {
        r *= half();
    }
    RootInterval {
        lo: &root - &r,
        hi: &root + &r,
        exact: Some(root),
    }
}

/// Refines an isolating interval to width ≤ `width`, identifying a rational
/// root along the way when `detect_rational` is set.
fn refine(
    chain: &SturmChain,
    mut lo: Rational,
    mut hi: Rational,
    width: &Rational,
    detect_rational: bool,
) -> RootInterval {
    let den_bound = chain.denominator_bound();
    // Two distinct rationals with denominators ≤ L differ by at least 1/L².
    let separation = BigRational::new(BigInt::one(), &den_bound * &den_bound);
    let mut rational_settled = !detect_rational;
    loop {
        if !rational_settled {
            let s = simplest_between(&lo, &hi);
            if chain.sign_at(&s) == Sign::NoSign {
                return exact_enclosure(s, &lo, &hi, width);
            }
            if &hi - &lo < separation {
                rational_settled = true;
            }
        }
        if rational_settled && &(&hi - &lo) <= width {
            return RootInterval { lo, hi, exact: None };
        }
        if let Some(root) = bisect_once(chain, &mut lo, &mut hi) {
            let (l, h) = (lo.clone(), hi.clone());
            return exact_enclosure(root, &l, &h, width);
        }
    }
}

/// Raw isolation of the roots of the chain's base inside `(lo, hi)`.
/// Endpoints of returned non-exact intervals are never roots, and every
/// returned interval lies inside `[lo, hi]`.
pub(crate) fn isolate_raw(chain: &SturmChain, lo: &Rational, hi: &Rational) -> Vec<RootInterval> {
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let count = chain.count_open(&a, Some(&b));
        match count {
            0 => {}
            1 => out.push(RootInterval { lo: a, hi: b, exact: None }),
            _ => {
                let mid = (&a + &b) * half();
                if chain.sign_at(&mid) == Sign::NoSign {
                    // Step off the root to non-root splitting points.
                    let mut r = (&b - &a) * half() * half();
                    loop {
                        let l = &mid - &r;
                        let h = &mid + &r;
                        if chain.sign_at(&l) != Sign::NoSign
                            && chain.sign_at(&h) != Sign::NoSign
                            && chain.count_open(&l, Some(&h)) == 1
                        {
                            out.push(RootInterval {
                                lo: l.clone(),
                                hi: h.clone(),
                                exact: Some(mid.clone()),
                            });
                            stack.push((h, b.clone()));
                            stack.push((a.clone(), l));
                            break;
                        }
                        r *= half();
                    }
                } else {
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Options for [`isolate_positive_roots_with`].
#[derive(Debug, Clone)]
pub struct IsolationOptions {
    pub width: Rational,
    pub detect_rational: bool,
}

impl Default for IsolationOptions {
    fn default() -> Self {
        Self {
            width: default_width(),
            detect_rational: true,
        }
    }
}

/// Isolates every positive real root of `p`, in increasing order, to width
/// `2^-20`, collapsing rational roots to exact values.
pub fn isolate_positive_roots(p: &LaurentPoly) -> Result<Vec<RootInterval>, RootError> {
    isolate_positive_roots_with(p, &IsolationOptions::default())
}

pub fn isolate_positive_roots_with(
    p: &LaurentPoly,
    opts: &IsolationOptions,
) -> Result<Vec<RootInterval>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    Ok(isolate_with_chain(&chain, opts))
}

pub(crate) fn isolate_with_chain(chain: &SturmChain, opts: &IsolationOptions) -> Vec<RootInterval> {
    if chain.base().degree() == 0 {
        return Vec::new();
    }
    let bound = chain.root_bound();
    isolate_raw(chain, &Rational::zero(), &bound)
        .into_iter()
        .map(|iv| match iv.exact {
            Some(r) => exact_enclosure(r, &iv.lo, &iv.hi, &opts.width),
            None => refine(chain, iv.lo, iv.hi, &opts.width, opts.detect_rational),
        })
        .collect()
}

/// Refines one root of `p` (as returned by [`isolate_positive_roots`]) to
/// width at most `width`.
pub fn refine_root(p: &LaurentPoly, root: &RootInterval, width: &Rational) -> RootInterval {
    if let Some(r) = &root.exact {
        return exact_enclosure(r.clone(), &root.lo, &root.hi, width);
    }
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    refine(&chain, root.lo.clone(), root.hi.clone(), width, false)
}

/// Number of distinct positive roots by the Sturm variation count
/// `V(0) - V(+∞)`.
pub fn sturm_positive_root_count(p: &LaurentPoly) -> Result<usize, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    Ok(chain.count_open(&Rational::zero(), None))
}

/// Number of distinct roots of `p` in the open interval `(lo, hi)`, `hi = None`
/// meaning `+∞`. Requires `lo ≥ 0`.
pub fn count_roots_between(p: &LaurentPoly, lo: &Rational, hi: Option<&Rational>) -> Result<usize, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let chain = SturmChain::new(&UniPoly::from_laurent(p));
    Ok(chain.count_open(lo, hi))
}
