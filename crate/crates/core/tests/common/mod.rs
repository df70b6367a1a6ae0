#![allow(dead_code)]

use proptest::prelude::*;
use radext::family::ExtremalParams;
use radext::ratlaurent::{LaurentPoly, Rational};

pub fn rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

pub fn nonzero_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (1..=max_num, 1..=max_den, any::<bool>())
        .prop_map(|(p, q, neg)| Rational::new(if neg { -p } else { p }.into(), q.into()))
}

pub fn positive_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (1..=max_num, 1..=max_den).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

pub fn laurent(min_exp: i64, max_exp: i64, max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((min_exp..=max_exp, rational(9, 6)), 0..=max_terms)
        .prop_map(LaurentPoly::normalize)
}

pub fn params(n: std::ops::RangeInclusive<u32>) -> impl Strategy<Value = ExtremalParams> {
    (n, rational(6, 4), rational(6, 4), rational(6, 4), rational(6, 4))
        .prop_map(|(n, a, b, c, d)| ExtremalParams::new(n, a, b, c, d).unwrap())
}

/// `p` with one coefficient forced nonzero (0 = A, 1 = B, 2 = C, 3 = D) and
/// the listed ones forced to zero.
pub fn params_with(
    n: std::ops::RangeInclusive<u32>,
    nonzero: usize,
    zero: &'static [usize],
) -> impl Strategy<Value = ExtremalParams> {
    (n, prop::array::uniform4(rational(6, 4)), nonzero_rational(6, 4)).prop_map(move |(n, mut c, nz)| {
        c[nonzero] = nz;
        for &z in zero {
            c[z] = Rational::from_integer(0.into());
        }
        let [a, b, cc, d] = c;
        ExtremalParams::new(n, a, b, cc, d).unwrap()
    })
}
