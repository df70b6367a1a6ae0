//! Laurent polynomials in one variable `y` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::rational::{format_rational, parse_rational, pow, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("evaluation at y = 0 of a polynomial with negative valuation {valuation}")]
    EvalAtPole { valuation: i64 },
    #[error("division is not exact")]
    InexactDivision,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

/// Finite sum `Σ c_e y^e` over integer exponents. Zero coefficients are never
/// stored, so the zero polynomial is the empty map.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `y`
    pub fn var() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// Builds a polynomial from raw `(exponent, coefficient)` pairs, summing
    /// duplicates and dropping zeros.
    pub fn normalize<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e, c) in raw {
            *terms.entry(e).or_insert_with(Rational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    /// Ordinary polynomial from ascending coefficients `c_0, c_1, ...`.
    pub fn from_coeffs(coeffs: &[Rational]) -> Self {
        Self::normalize(coeffs.iter().cloned().enumerate().map(|(i, c)| (i as i64, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest exponent, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest exponent, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn trailing_coeff(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    /// Multiplies by `y^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    pub fn add_poly(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(*e).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Self { terms }
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *terms.entry(ea + eb).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_poly(self);
        }
        acc
    }

    /// Termwise `d/dy`.
    pub fn differentiate(&self) -> Self {
        Self::normalize(
            self.terms
                .iter()
                .filter(|(e, _)| **e != 0)
                .map(|(e, c)| (e - 1, c * Rational::from_integer(BigInt::from(*e)))),
        )
    }

    pub fn eval(&self, y: &Rational) -> Result<Rational, LaurentError> {
        if y.is_zero() {
            return match self.valuation() {
                Some(v) if v < 0 => Err(LaurentError::EvalAtPole { valuation: v }),
                _ => Ok(self.coeff(0)),
            };
        }
        // Horner over the dense span from the valuation upward.
        let (Some(lo), Some(hi)) = (self.valuation(), self.degree()) else {
            return Ok(Rational::zero());
        };
        let mut acc = Rational::zero();
        for e in (lo..=hi).rev() {
            acc *= y;
            if let Some(c) = self.terms.get(&e) {
                acc += c;
            }
        }
        Ok(acc * pow(y, lo))
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| to_f64(c) * y.powi(*e as i32))
            .sum()
    }

    /// `(valuation, ascending coefficients)` of `y^(-valuation) · self`.
    pub fn clear_valuation(&self) -> (i64, Vec<Rational>) {
        let (Some(lo), Some(hi)) = (self.valuation(), self.degree()) else {
            return (0, Vec::new());
        };
        let mut coeffs = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            coeffs[(e - lo) as usize] = c.clone();
        }
        (lo, coeffs)
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, LaurentError> {
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (va, mut rem) = self.clear_valuation();
        let (vb, den) = divisor.clear_valuation();
        let db = den.len() - 1;
        if rem.len() < den.len() {
            return Err(LaurentError::InexactDivision);
        }
        let lead = den[db].clone();
        let mut quot = vec![Rational::zero(); rem.len() - db];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + db] / &lead;
            if !q.is_zero() {
                for (j, d) in den.iter().enumerate() {
                    rem[i + j] -= &q * d;
                }
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(LaurentError::InexactDivision);
        }
        Ok(Self::from_coeffs(&quot).shift(va - vb))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == 0)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let show_coeff = !mag.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            match *e {
                0 => {}
                1 => write!(f, "{}y", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}y^{}", if show_coeff { "*" } else { "" }, e)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_poly(rhs)
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        self.add_poly(&rhs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_poly(&-rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.mul_poly(rhs)
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        self.mul_poly(&rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

// JSON form: {"<exponent>": "p/q", ...}
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&e.to_string(), &format_rational(c))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct LaurentVisitor;

        impl<'de> Visitor<'de> for LaurentVisitor {
            type Value = LaurentPoly;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a map from integer exponents to rational strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<LaurentPoly, A::Error> {
                let mut raw = Vec::new();
                while let Some((key, value)) = access.next_entry::<String, String>()? {
                    let e: i64 = key
                        .trim()
                        .parse()
                        .map_err(|_| serde::de::Error::custom(format!("bad exponent `{key}`")))?;
                    let c = parse_rational(&value).map_err(serde::de::Error::custom)?;
                    raw.push((e, c));
                }
                Ok(LaurentPoly::normalize(raw))
            }
        }

        d.deserialize_map(LaurentVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::super::rational::{int, rat};
    use super::*;

    fn p(raw: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::normalize(raw.iter().map(|(e, c)| (*e, int(*c))))
    }

    #[test]
    fn normalize_cases() {
        assert!(LaurentPoly::normalize(Vec::new()).is_zero());
        assert!(p(&[(1, 1), (1, -1)]).is_zero());
        let q = p(&[(3, 2), (1, 1), (2, 3)]);
        assert_eq!(q.to_string(), "2*y^3 + 3*y^2 + y");
        assert_eq!(q.degree(), Some(3));
        assert_eq!(q.valuation(), Some(1));
    }

    #[test]
    fn arithmetic_examples() {
        let y = LaurentPoly::var();
        let y_minus_1 = p(&[(1, 1), (0, -1)]);
        assert_eq!(&y * &y_minus_1, p(&[(2, 1), (1, -1)]));
        let prod = &(&y * &p(&[(1, 1), (0, 1)])) * &p(&[(1, 2), (0, 1)]);
        assert_eq!(prod, p(&[(3, 2), (2, 3), (1, 1)]));
        let sum = &p(&[(1, 1), (-1, 1)]) + &p(&[(-1, -1)]);
        assert_eq!(sum, y);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p(&[(3, 1)]).differentiate(), p(&[(2, 3)]));
        assert_eq!(p(&[(-1, 1)]).differentiate(), p(&[(-2, -1)]));
        assert!(LaurentPoly::one().differentiate().is_zero());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[(2, 1), (1, -1)]).eval(&int(1)).unwrap(), int(0));
        // y + 1/y - 2y^2 at 1/2
        let psi = p(&[(1, 1), (-1, 1), (2, -2)]);
        assert_eq!(psi.eval(&rat(1, 2)).unwrap(), int(2));
        assert_eq!(
            p(&[(-1, 1)]).eval(&int(0)),
            Err(LaurentError::EvalAtPole { valuation: -1 })
        );
        assert_eq!(p(&[(0, 5), (2, 1)]).eval(&int(0)).unwrap(), int(5));
    }

    #[test]
    fn exact_division() {
        let a = p(&[(1, 1), (0, -1)]);
        let b = p(&[(-2, 1), (0, 3), (1, 1)]);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(p(&[(2, 1), (0, 1)]).div_exact(&a), Err(LaurentError::InexactDivision));
    }

    #[test]
    fn json_shape() {
        let q = LaurentPoly::normalize(vec![(-1, rat(4, 3)), (2, int(-1))]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"-1":"4/3","2":"-1"}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }
}
