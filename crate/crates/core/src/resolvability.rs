//! The obstruction sequence `Q_k^ε` and the resolvability tests built on it.
//!
//! `Q_1 = y` and `Q_{k+1} = (εy − k)·Q_k + Q_k'·ψ`. For `n ≥ 2` a metric that
//! is ε-resolvable has `Q_k^ε ≥ 0` on its domain for every `k`; for `n = 1`
//! the condition is on the determinants of a matrix built from the `Q_k`.
//! Both are necessary conditions only.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{build_psi, AmbientSign, ExtremalParams};
use crate::ratlaurent::rational::{pow, serde_rational};
use crate::ratlaurent::{
    certify_sign_on_interval, strictly_positive_on, Interval, IntervalError, LaurentPoly,
    PositivityCertificate, Rational,
};

pub const DEFAULT_KMAX: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolvabilityError {
    #[error("complex dimension {0} is below 2")]
    DimensionTooSmall(u32),
    #[error("determinant test needs n = 1, got n = {0}")]
    WrongDimension(u32),
    #[error("psi is not positive throughout {0}")]
    DomainNotPositive(String),
    #[error("P_{0} does not reconcile with Q_{0}")]
    ReconciliationFailure(usize),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

fn small(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Cached `Q_1^ε, …, Q_K^ε` for one parameter set.
#[derive(Debug, Clone)]
pub struct QSequence {
    params: ExtremalParams,
    eps: AmbientSign,
    psi: LaurentPoly,
    entries: Vec<LaurentPoly>,
}

impl QSequence {
    pub fn new(params: &ExtremalParams, eps: AmbientSign, kmax: usize) -> Self {
        let mut seq = Self {
            params: params.clone(),
            eps,
            psi: build_psi(params),
            entries: vec![LaurentPoly::var()],
        };
        seq.extend_to(kmax);
        seq
    }

    pub fn extend_to(&mut self, kmax: usize) {
        let ey = LaurentPoly::monomial(self.eps.as_rational(), 1);
        while self.entries.len() < kmax {
            let k = self.entries.len();
            let q = self.entries.last().expect("Q_1 is always present");
            let next = &(&ey - &LaurentPoly::constant(small(k as i64))) * q + &q.differentiate() * &self.psi;
            self.entries.push(next);
        }
    }

    /// `Q_k`, 1-based.
    pub fn get(&self, k: usize) -> &LaurentPoly {
        &self.entries[k - 1]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn params(&self) -> &ExtremalParams {
        &self.params
    }

    pub fn eps(&self) -> AmbientSign {
        self.eps
    }

    pub fn psi(&self) -> &LaurentPoly {
        &self.psi
    }
}

pub fn q_sequence(p: &ExtremalParams, eps: AmbientSign, kmax: usize) -> QSequence {
    QSequence::new(p, eps, kmax.max(1))
}

/// `y·∏_{j=1}^{k−1}(εy − j)`.
pub fn falling_part(eps: AmbientSign, k: usize) -> LaurentPoly {
    let ey = LaurentPoly::monomial(eps.as_rational(), 1);
    (1..k as i64).fold(LaurentPoly::var(), |acc, j| &acc * &(&ey - &LaurentPoly::constant(small(j))))
}

/// `P_1, …, P_K` from the companion recursion, independent of the `Q` recursion.
pub fn p_sequence(p: &ExtremalParams, eps: AmbientSign, kmax: usize) -> Vec<LaurentPoly> {
    let n = p.dim();
    let psi = build_psi(p);
    let ey = LaurentPoly::monomial(eps.as_rational(), 1);
    let yn_psi = psi.shift(n - 1);
    let d_yn_psi = yn_psi.differentiate();
    let mut out = vec![LaurentPoly::zero()];
    for k in 1..kmax {
        let pk = &out[k - 1];
        let ki = k as i64;
        let lin = &ey - &LaurentPoly::constant(small(ki));
        let head = (&lin * pk).shift(n);
        let source = falling_part(eps, k).differentiate().shift((ki - 1) * n);
        let rest = d_yn_psi.shift(1) * pk.clone() + (&psi * &pk.differentiate()).shift(n)
            - (&yn_psi * pk).scale(&small((ki - 1) * n - 1));
        out.push(head + source + rest);
    }
    out
}

/// `P_k^ε`, checked against `Q_k = y∏(εy−j) + ψ·P_k / y^((k−2)n)`.
pub fn p_from_q(p: &ExtremalParams, eps: AmbientSign, k: usize) -> Result<LaurentPoly, ResolvabilityError> {
    let k = k.max(1);
    let pk = p_sequence(p, eps, k).pop().expect("k >= 1");
    let q = q_sequence(p, eps, k);
    if reconstruct_q(p, eps, k, &pk) != *q.get(k) {
        return Err(ResolvabilityError::ReconciliationFailure(k));
    }
    Ok(pk)
}

pub fn reconstruct_q(p: &ExtremalParams, eps: AmbientSign, k: usize, pk: &LaurentPoly) -> LaurentPoly {
    let psi = build_psi(p);
    falling_part(eps, k) + (&psi * pk).shift(-((k as i64) - 2) * p.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extreme {
    Leading,
    Lower,
}

/// A predicted extreme term `coeff·y^degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "prediction", rename_all = "snake_case")]
pub enum ExtremeTerm {
    Predicted {
        degree: i64,
        #[serde(with = "serde_rational")]
        coeff: Rational,
    },
    Degenerate,
}

fn factorial(m: i64) -> Rational {
    (1..=m).fold(Rational::one(), |acc, j| acc * small(j))
}

/// Closed forms for the highest and lowest terms of `Q_k^ε` when `n ≥ 2`.
///
/// Returns `Degenerate` when the formula's coefficient vanishes or no formula
/// applies (lower term with `A = B = 0`).
pub fn extremes_closed_form(
    p: &ExtremalParams,
    eps: AmbientSign,
    k: usize,
    which: Extreme,
) -> Result<ExtremeTerm, ResolvabilityError> {
    if p.n < 2 {
        return Err(ResolvabilityError::DimensionTooSmall(p.n));
    }
    let k = k as i64;
    let n = p.dim();
    let e = eps.as_rational();
    let predicted = |degree: i64, coeff: Rational| {
        if coeff.is_zero() {
            ExtremeTerm::Degenerate
        } else {
            ExtremeTerm::Predicted { degree, coeff }
        }
    };
    Ok(match which {
        Extreme::Leading if !p.d.is_zero() => {
            let prod = (2..k).fold(Rational::one(), |acc, j| acc * small(1 - 2 * j));
            predicted(2 * k - 1, -pow(&p.d, k - 1) * prod)
        }
        Extreme::Leading => {
            let prod = (1..k).fold(Rational::one(), |acc, j| acc * (&p.c - &e / small(j)));
            let sign = if (k - 1) % 2 == 0 { small(1) } else { small(-1) };
            predicted(k, sign * factorial(k - 1) * prod)
        }
        Extreme::Lower if !p.a.is_zero() => {
            let prod = (1..k - 1).fold(Rational::one(), |acc, j| acc * (small(n) - Rational::new(1.into(), j.into())));
            predicted(n * (1 - k) + 1, -pow(&p.a, k - 1) * factorial(k - 2) * prod)
        }
        Extreme::Lower if !p.b.is_zero() => {
            let prod = (1..k - 1).fold(Rational::one(), |acc, j| {
                acc * (small(n) - Rational::new((j + 1).into(), j.into()))
            });
            predicted(n + k - n * k, -pow(&p.b, k - 1) * factorial(k - 2) * prod)
        }
        Extreme::Lower => ExtremeTerm::Degenerate,
    })
}

/// The actual extreme term of a Laurent polynomial, `None` for zero.
pub fn actual_extreme(q: &LaurentPoly, which: Extreme) -> Option<(i64, Rational)> {
    match which {
        Extreme::Leading => q.degree().map(|d| (d, q.coeff(d))),
        Extreme::Lower => q.valuation().map(|v| (v, q.coeff(v))),
    }
}

/// Outcome of a positivity scan of `Q_1, …, Q_K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ScanVerdict {
    /// No `Q_k` with `k ≤ K` is negative on the domain.
    Clear { k: usize },
    Obstructed {
        k: usize,
        #[serde(with = "serde_rational")]
        witness: Rational,
        #[serde(with = "serde_rational")]
        value: Rational,
    },
    IdenticallyZero { k: usize },
}

impl ScanVerdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, ScanVerdict::Obstructed { .. })
    }

    pub fn k(&self) -> usize {
        match self {
            ScanVerdict::Clear { k } | ScanVerdict::Obstructed { k, .. } | ScanVerdict::IdenticallyZero { k } => *k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    #[serde(flatten)]
    pub verdict: ScanVerdict,
    pub domain: Interval,
}

/// Checks that `ψ > 0` on the whole open interval.
fn check_domain(psi: &LaurentPoly, domain: &Interval) -> Result<(), ResolvabilityError> {
    if strictly_positive_on(psi, domain)? {
        Ok(())
    } else {
        Err(ResolvabilityError::DomainNotPositive(domain.to_string()))
    }
}

/// Smallest `k ≤ K` with `Q_k^ε` negative somewhere on `domain`.
pub fn obstruction_scan(
    p: &ExtremalParams,
    eps: AmbientSign,
    domain: &Interval,
    kmax: usize,
) -> Result<ObstructionReport, ResolvabilityError> {
    if p.n < 2 {
        return Err(ResolvabilityError::DimensionTooSmall(p.n));
    }
    let kmax = kmax.max(1);
    let mut seq = q_sequence(p, eps, 1);
    check_domain(seq.psi(), domain)?;
    let report = |verdict| ObstructionReport {
        verdict,
        domain: domain.clone(),
    };
    for k in 1..=kmax {
        seq.extend_to(k);
        match certify_sign_on_interval(seq.get(k), domain)? {
            PositivityCertificate::NonnegativeOn { .. } => {}
            PositivityCertificate::NegativeWitness { point, value } => {
                return Ok(report(ScanVerdict::Obstructed {
                    k,
                    witness: point,
                    value,
                }));
            }
            PositivityCertificate::IdenticallyZero => {
                seq.extend_to(kmax);
                assert!(
                    seq.entries()[k..].iter().all(LaurentPoly::is_zero),
                    "the recursion keeps zero at zero"
                );
                return Ok(report(ScanVerdict::IdenticallyZero { k }));
            }
        }
    }
    Ok(report(ScanVerdict::Clear { k: kmax }))
}

/// True iff `Q_2^ε ≡ 0`, i.e. `ψ = y − εy²`.
pub fn detect_space_form(p: &ExtremalParams, eps: AmbientSign) -> bool {
    q_sequence(p, eps, 2).get(2).is_zero()
}

/// Smallest `k ≤ K` with `Q_k^ε ≡ 0`.
pub fn zero_index(p: &ExtremalParams, eps: AmbientSign, kmax: usize) -> Option<usize> {
    let seq = q_sequence(p, eps, kmax);
    let first = seq.entries().iter().position(LaurentPoly::is_zero)?;
    assert!(
        seq.entries()[first..].iter().all(LaurentPoly::is_zero),
        "the recursion keeps zero at zero"
    );
    Some(first + 1)
}

/// Binomial coefficient as an exact integer-valued rational.
fn binomial(a: usize, i: usize) -> Rational {
    if i > a {
        return Rational::zero();
    }
    (0..i).fold(Rational::one(), |acc, j| acc * small((a - j) as i64) / small(j as i64 + 1))
}

/// `β!/(β−i)!`, zero for `i > β`.
fn falling_factorial(beta: usize, i: usize) -> Rational {
    if i > beta {
        return Rational::zero();
    }
    (0..i).fold(Rational::one(), |acc, j| acc * small((beta - j) as i64))
}

/// The `I×I` matrix `M_{αβ} = Σ_i C(α,i)·β!/(β−i)!·Q_{α+β−i}`, `1 ≤ α, β ≤ I`.
pub fn dim1_matrix(seq: &QSequence, size: usize) -> Vec<Vec<LaurentPoly>> {
    (1..=size)
        .map(|alpha| {
            (1..=size)
                .map(|beta| {
                    (0..=alpha.min(beta)).fold(LaurentPoly::zero(), |acc, i| {
                        let w = binomial(alpha, i) * falling_factorial(beta, i);
                        acc + seq.get(alpha + beta - i).scale(&w)
                    })
                })
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) determinant over the Laurent ring.
pub fn bareiss_det(mut m: Vec<Vec<LaurentPoly>>) -> LaurentPoly {
    let size = m.len();
    if size == 0 {
        return LaurentPoly::one();
    }
    let mut negate = false;
    let mut prev = LaurentPoly::one();
    for k in 0..size - 1 {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return LaurentPoly::zero(),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = num.div_exact(&prev).expect("Bareiss quotients are exact");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[size - 1][size - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetEntry {
    pub size: usize,
    pub det: LaurentPoly,
    pub certificate: PositivityCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetReport {
    pub entries: Vec<DetEntry>,
    /// Smallest `I` whose signed determinant is negative somewhere.
    pub first_violation: Option<usize>,
    pub domain: Interval,
}

/// Determinant test for curves (`n = 1`), `I = 1, …, Imax`.
///
/// The Hermitian matrix of `F_ε` factors as `(εF_ε)^I·|z|^(−2Σα)·det M` and
/// `εF_ε = e^(εf) > 0` for `ε = ±1`, so the sign condition is `det M ≥ 0`
/// for every `ε`.
pub fn det_test_dim1(
    p: &ExtremalParams,
    eps: AmbientSign,
    imax: usize,
    domain: &Interval,
) -> Result<DetReport, ResolvabilityError> {
    if p.n != 1 {
        return Err(ResolvabilityError::WrongDimension(p.n));
    }
    let imax = imax.max(1);
    let seq = q_sequence(p, eps, 2 * imax);
    check_domain(seq.psi(), domain)?;
    let mut entries = Vec::with_capacity(imax);
    let mut first_violation = None;
    for size in 1..=imax {
        let det = bareiss_det(dim1_matrix(&seq, size));
        let certificate = certify_sign_on_interval(&det, domain)?;
        if certificate.is_negative() && first_violation.is_none() {
            first_violation = Some(size);
        }
        entries.push(DetEntry { size, det, certificate });
    }
    Ok(DetReport {
        entries,
        first_violation,
        domain: domain.clone(),
    })
}
