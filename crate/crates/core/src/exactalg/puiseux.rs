use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cyclotomic::{CycRational, CyclotomicField};
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Exponent of an equivariant parameter. Denominators stay within `2 * l_i`.
pub type Exponent = Ratio<i64>;

/// `prod_i w_i^{q_i}` with exact rational exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PuiseuxMonomial {
    exps: Vec<Exponent>,
}

impl PuiseuxMonomial {
    pub fn one(rank: usize) -> Self {
        PuiseuxMonomial {
            exps: vec![Exponent::zero(); rank],
        }
    }

    pub fn new(exps: Vec<Exponent>) -> Self {
        PuiseuxMonomial { exps }
    }

    /// `w_i^e`.
    pub fn var(rank: usize, i: usize, e: Exponent) -> Self {
        let mut m = Self::one(rank);
        m.exps[i] = e;
        m
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank(), other.rank(), "monomial rank mismatch");
        PuiseuxMonomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn pow(&self, e: Exponent) -> Self {
        PuiseuxMonomial {
            exps: self.exps.iter().map(|a| a * e).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        PuiseuxMonomial {
            exps: self.exps.iter().map(|a| -a).collect(),
        }
    }

    /// Total degree `sum_i q_i`.
    pub fn degree(&self) -> Exponent {
        self.exps.iter().fold(Exponent::zero(), |acc, e| acc + e)
    }
}

impl fmt::Debug for PuiseuxMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PuiseuxMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| {
                if e.is_one() {
                    format!("w{}", i + 1)
                } else {
                    format!("w{}^({})", i + 1, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// One serialized term: exponents and cyclotomic coordinates as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<String>,
    pub coeff: Vec<String>,
}

/// Finite sum of Puiseux monomials with cyclotomic coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PuiseuxPoly {
    terms: BTreeMap<PuiseuxMonomial, CycRational>,
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly::default()
    }

    pub fn constant(c: CycRational, rank: usize) -> Self {
        Self::term(PuiseuxMonomial::one(rank), c)
    }

    pub fn one(field: &Arc<CyclotomicField>, rank: usize) -> Self {
        Self::constant(CycRational::one(field), rank)
    }

    pub fn rational(field: &Arc<CyclotomicField>, rank: usize, x: Rational) -> Self {
        Self::constant(CycRational::from_rational(field, x), rank)
    }

    pub fn term(m: PuiseuxMonomial, c: CycRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        PuiseuxPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PuiseuxMonomial, &CycRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &PuiseuxMonomial) -> Option<&CycRational> {
        self.terms.get(m)
    }

    /// True when every coefficient lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(CycRational::is_rational)
    }

    pub fn add_term(&mut self, m: PuiseuxMonomial, c: CycRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &PuiseuxPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_fields(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_fields(other)?;
        let mut out = PuiseuxPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    fn check_fields(&self, other: &Self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.terms.values().next(), other.terms.values().next()) {
            if a.conductor() != b.conductor() {
                return Err(Error::ConductorMismatch {
                    left: a.conductor(),
                    right: b.conductor(),
                });
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: &CycRational) -> Self {
        if c.is_zero() {
            return PuiseuxPoly::zero();
        }
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x * c))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    pub fn scale_rational(&self, x: &Rational) -> Self {
        if x.is_zero() {
            return PuiseuxPoly::zero();
        }
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.scale(x)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &PuiseuxMonomial) -> Self {
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c.clone()))
                .collect(),
        }
    }

    /// Canonical serialization, ordered by exponent vector.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| TermRecord {
                exponents: m.exps.iter().map(|e| e.to_string()).collect(),
                coeff: c.coords().iter().map(format_rational).collect(),
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord], field: &Arc<CyclotomicField>) -> Result<Self> {
        let mut out = PuiseuxPoly::zero();
        for rec in records {
            let exps = rec
                .exponents
                .iter()
                .map(|s| parse_exponent(s))
                .collect::<Result<Vec<_>>>()?;
            let coords = rec
                .coeff
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(
                PuiseuxMonomial::new(exps),
                CycRational::from_coords(field, coords)?,
            );
        }
        Ok(out)
    }
}

pub(crate) fn parse_exponent(s: &str) -> Result<Exponent> {
    let r = parse_rational(s)?;
    let convert = |x: &num_bigint::BigInt| {
        i64::try_from(x).map_err(|_| Error::Parse(format!("exponent {s:?} out of range")))
    };
    Ok(Exponent::new(convert(r.numer())?, convert(r.denom())?))
}

impl fmt::Debug for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("({c})")
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn add(self, rhs: &'a PuiseuxPoly) -> PuiseuxPoly {
        self.checked_add(rhs).expect("cyclotomic conductor mismatch")
    }
}

impl<'a> Sub<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn sub(self, rhs: &'a PuiseuxPoly) -> PuiseuxPoly {
        self.checked_add(&-rhs).expect("cyclotomic conductor mismatch")
    }
}

impl<'a> Mul<&'a PuiseuxPoly> for &'a PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn mul(self, rhs: &'a PuiseuxPoly) -> PuiseuxPoly {
        self.checked_mul(rhs).expect("cyclotomic conductor mismatch")
    }
}

impl Neg for &PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        PuiseuxPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for PuiseuxPoly {
    type Output = PuiseuxPoly;
    fn neg(self) -> PuiseuxPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn w(i: usize, num: i64, den: i64) -> PuiseuxPoly {
        let f = CyclotomicField::get(1);
        PuiseuxPoly::term(
            PuiseuxMonomial::var(2, i, Exponent::new(num, den)),
            CycRational::one(&f),
        )
    }

    #[test]
    fn half_powers_multiply() {
        let s = w(0, 1, 2);
        assert_eq!(&s * &s, w(0, 1, 1));
        let inv = w(0, -1, 2);
        let f = CyclotomicField::get(1);
        assert_eq!(&s * &inv, PuiseuxPoly::one(&f, 2));
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = w(1, 1, 3);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).len(), 0);
    }

    #[test]
    fn records_sorted_and_round_trip() {
        let f = CyclotomicField::get(3);
        let mut p = PuiseuxPoly::zero();
        p.add_term(
            PuiseuxMonomial::new(vec![Exponent::new(1, 3), Exponent::new(-1, 1)]),
            CycRational::root_power(&f, 1),
        );
        p.add_term(
            PuiseuxMonomial::new(vec![Exponent::new(-2, 1), Exponent::new(0, 1)]),
            CycRational::from_rational(&f, rat(-1, 24)),
        );
        let recs = p.to_records();
        assert_eq!(recs[0].exponents, vec!["-2", "0"]);
        assert_eq!(recs[0].coeff, vec!["-1/24", "0"]);
        assert_eq!(recs[1].exponents, vec!["1/3", "-1"]);
        assert_eq!(PuiseuxPoly::from_records(&recs, &f).unwrap(), p);
    }
}
