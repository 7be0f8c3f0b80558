use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::cyclotomic::{CycRational, CyclotomicField};
use super::puiseux::PuiseuxPoly;
use super::rational::{rat, Rational};
use crate::error::{Error, Result};

/// Which formal variables a [`TruncSeries`] is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVars {
    /// One variable `z`; exponents are stored as `(i, 0)`.
    Z,
    /// Two variables `z, zeta`; truncation is by total degree.
    ZZeta,
}

/// Power series truncated at total degree `order`, with Puiseux coefficients.
#[derive(Clone)]
pub struct TruncSeries {
    field: Arc<CyclotomicField>,
    rank: usize,
    vars: SeriesVars,
    order: u32,
    coeffs: BTreeMap<(u32, u32), PuiseuxPoly>,
}

impl TruncSeries {
    pub fn zero(field: &Arc<CyclotomicField>, rank: usize, vars: SeriesVars, order: u32) -> Self {
        TruncSeries {
            field: field.clone(),
            rank,
            vars,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(field: &Arc<CyclotomicField>, rank: usize, vars: SeriesVars, order: u32) -> Self {
        let mut s = Self::zero(field, rank, vars, order);
        s.set(0, 0, PuiseuxPoly::one(field, rank));
        s
    }

    pub fn vars(&self) -> SeriesVars {
        self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sets the coefficient of `z^i zeta^j`; terms above the order are dropped.
    pub fn set(&mut self, i: u32, j: u32, c: PuiseuxPoly) {
        debug_assert!(self.vars == SeriesVars::ZZeta || j == 0);
        if i + j > self.order || c.is_zero() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), c);
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> PuiseuxPoly {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, i: u32, j: u32) -> Option<&PuiseuxPoly> {
        self.coeffs.get(&(i, j))
    }

    /// `[z^i]` of a univariate series.
    pub fn at(&self, i: u32) -> PuiseuxPoly {
        self.coeff(i, 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &PuiseuxPoly)> {
        self.coeffs.iter()
    }

    fn add_into(&mut self, i: u32, j: u32, c: &PuiseuxPoly) {
        if i + j > self.order || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry((i, j)).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch);
        }
        if self.field.conductor() != other.field.conductor() {
            return Err(Error::ConductorMismatch {
                left: self.field.conductor(),
                right: other.field.conductor(),
            });
        }
        Ok(())
    }

    /// Sum, truncated at the smaller of the two orders.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.truncated(self.order.min(other.order));
        for (&(i, j), c) in &other.coeffs {
            out.add_into(i, j, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }

    /// Product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let mut out = TruncSeries::zero(&self.field, self.rank, self.vars, order);
        for (&(i1, j1), a) in &self.coeffs {
            for (&(i2, j2), b) in &other.coeffs {
                if i1 + i2 + j1 + j2 <= order {
                    out.add_into(i1 + i2, j1 + j2, &(a * b));
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &PuiseuxPoly) -> Self {
        let mut out = TruncSeries::zero(&self.field, self.rank, self.vars, self.order);
        for (&(i, j), x) in &self.coeffs {
            out.set(i, j, x * c);
        }
        out
    }

    pub fn scale_cyc(&self, c: &CycRational) -> Self {
        let mut out = TruncSeries::zero(&self.field, self.rank, self.vars, self.order);
        for (&(i, j), x) in &self.coeffs {
            out.set(i, j, x.scale(c));
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        let mut out = TruncSeries::zero(&self.field, self.rank, self.vars, self.order);
        for (&(i, j), x) in &self.coeffs {
            out.set(i, j, x.scale_rational(c));
        }
        out
    }

    pub fn truncated(&self, order: u32) -> Self {
        let mut out = self.clone();
        out.order = order.min(self.order);
        out.coeffs.retain(|&(i, j), _| i + j <= order);
        out
    }

    /// Substitutes `z -> -z` (and `zeta -> -zeta` for bivariate series).
    pub fn negate_vars(&self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in out.coeffs.iter_mut() {
            if (i + j) % 2 == 1 {
                *c = -&*c;
            }
        }
        out
    }

    /// Views a univariate series in `z` as a bivariate one.
    pub fn as_z(&self) -> Self {
        debug_assert_eq!(self.vars, SeriesVars::Z);
        let mut out = self.clone();
        out.vars = SeriesVars::ZZeta;
        out
    }

    /// Views a univariate series in `z` as a bivariate one in `zeta`.
    pub fn as_zeta(&self) -> Self {
        debug_assert_eq!(self.vars, SeriesVars::Z);
        TruncSeries {
            field: self.field.clone(),
            rank: self.rank,
            vars: SeriesVars::ZZeta,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(i, _), c)| ((0, i), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> PuiseuxPoly {
        self.coeff(0, 0)
    }

    /// `sum_j s^j / j!`, for `s` without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = TruncSeries::one(&self.field, self.rank, self.vars, self.order);
        let mut power = out.clone();
        for j in 1..=self.order {
            power = power.mul(self)?.scale_rational(&rat(1, j as i64));
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// The unique `q` with `q * (z + zeta) = self` through the truncation order.
    ///
    /// The quotient is truncated one degree lower. A nonzero remainder is
    /// reported with the monomial it sits on.
    pub fn divide_by_z_plus_zeta(&self) -> Result<Self> {
        if self.vars != SeriesVars::ZZeta {
            return Err(Error::VariableMismatch);
        }
        let remainder_err = |i: u32, j: u32, c: &PuiseuxPoly| Error::NotDivisible {
            z_exp: i,
            zeta_exp: j,
            remainder: c.to_string(),
        };
        let c00 = self.coeff(0, 0);
        if !c00.is_zero() {
            return Err(remainder_err(0, 0, &c00));
        }
        let qorder = self.order.saturating_sub(1);
        let mut q = TruncSeries::zero(&self.field, self.rank, self.vars, qorder);
        for d in 1..=self.order {
            // coefficient of z^i zeta^(d-i) in (z+zeta) q_{d-1} is
            // q[i-1, d-i] + q[i, d-1-i]
            let mut prev = PuiseuxPoly::zero();
            for i in 0..d {
                let qi = &self.coeff(i, d - i) - &prev;
                q.set(i, d - 1 - i, qi.clone());
                prev = qi;
            }
            let rem = &self.coeff(d, 0) - &prev;
            if !rem.is_zero() {
                return Err(remainder_err(d, 0, &rem));
            }
        }
        Ok(q)
    }
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor() == other.field.conductor()
            && self.rank == other.rank
            && self.vars == other.vars
            && self.order == other.order
            && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| match self.vars {
                SeriesVars::Z => format!("[{c}] z^{i}"),
                SeriesVars::ZZeta => format!("[{c}] z^{i} zeta^{j}"),
            })
            .collect();
        write!(f, "{} + O({})", parts.join(" + "), self.order + 1)
    }
}
