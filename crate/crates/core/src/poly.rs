//! Sparse Laurent polynomials in `t` with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Invariant: no zero coefficient is ever stored, so structural equality is
/// polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(coeff, exp);
        p
    }

    /// `t^exp - 1`
    pub fn t_pow_minus_one(exp: i64) -> Self {
        let mut p = Self::monomial(1, exp);
        p.add_term(-1, 0);
        p
    }

    pub fn add_term(&mut self, coeff: i64, exp: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.coeffs.entry(exp).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.coeffs.get(&exp).copied().unwrap_or(0)
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e, c * k)).collect(),
        }
    }

    /// The image under `t -> t^-1`.
    pub fn mirror(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (-e, c)).collect(),
        }
    }
}

impl FromIterator<(i64, i64)> for LaurentPoly {
    fn from_iter<I: IntoIterator<Item = (i64, i64)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (exp, coeff) in iter {
            p.add_term(coeff, exp);
        }
        p
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(c, e);
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        iter.fold(Self::zero(), |mut acc, p| {
            acc += &p;
            acc
        })
    }
}

/// Text form with ascending exponents, e.g. `t^-1 - 2 + t`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let mag = c.unsigned_abs();
            match (i, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (e, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => f.write_str("t")?,
                (1, m) => write!(f, "{m}t")?,
                (e, 1) => write!(f, "t^{e}")?,
                (e, m) => write!(f, "{m}t^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (e, c) in self.terms() {
            map.serialize_entry(&e.to_string(), &c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PolyVisitor;
        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = LaurentPoly;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from integer exponents to integer coefficients")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<LaurentPoly, A::Error> {
                let mut p = LaurentPoly::zero();
                while let Some((k, c)) = access.next_entry::<String, i64>()? {
                    let e: i64 = k
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad exponent {k:?}")))?;
                    p.add_term(c, e);
                }
                Ok(p)
            }
        }
        deserializer.deserialize_map(PolyVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trefoil() -> LaurentPoly {
        [(-1, 1), (0, -2), (1, 1)].into_iter().collect()
    }

    #[test]
    fn display() {
        assert_eq!(trefoil().to_string(), "t^-1 - 2 + t");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        let p: LaurentPoly = [(-3, -2), (2, 1), (5, 4)].into_iter().collect();
        assert_eq!(p.to_string(), "-2t^-3 + t^2 + 4t^5");
        assert_eq!(LaurentPoly::t_pow_minus_one(1).to_string(), "-1 + t");
    }

    #[test]
    fn json_form() {
        let json = serde_json::to_string(&trefoil()).unwrap();
        assert_eq!(json, r#"{"-1":1,"0":-2,"1":1}"#);
        let back: LaurentPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trefoil());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut p = LaurentPoly::t_pow_minus_one(0);
        assert!(p.is_zero());
        p.add_term(3, 2);
        p.add_term(-3, 2);
        assert_eq!(p, LaurentPoly::zero());
    }

    proptest! {
        #[test]
        fn t_pow_minus_one_vanishes_at_one(terms in prop::collection::vec((-6i64..6, -3i64..4), 0..8)) {
            let p: LaurentPoly = terms
                .iter()
                .map(|&(e, c)| LaurentPoly::t_pow_minus_one(e).scale(c))
                .sum();
            prop_assert_eq!(p.eval_at_one(), 0);
            prop_assert_eq!(p.mirror().mirror(), p.clone());
            prop_assert_eq!(p.mirror().eval_at_one(), 0);
            prop_assert!((&p - &p).is_zero());
        }
    }
}
