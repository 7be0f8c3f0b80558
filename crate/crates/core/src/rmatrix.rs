//! The R-matrix of `[C^r/G]`, kept in diagonal form on the `{1_h}` basis.
//!
//! On `1_h` the matrix acts by the scalar series
//! `R_h(z) = exp(sum_m (-1)^m/(m(m+1)) sum_i B_{m+1}(c_i(h)) (z/w_i)^m)`;
//! canonical-basis entries are character transforms of these and are only
//! materialized on demand.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactalg::{
    bernoulli_eval, rat, CycRational, Exponent, PuiseuxMonomial, PuiseuxPoly, Rational,
    SeriesVars, TruncSeries,
};
use crate::groupchar::OrbifoldData;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `s^i_k = (k-1)! (-w_i)^{-k}`, for `k >= 1`.
pub fn s_coefficient(orb: &OrbifoldData, i: usize, k: u32) -> Result<PuiseuxPoly> {
    if k == 0 {
        return Err(Error::ZeroSIndex);
    }
    let mut c = Rational::from_integer(factorial(k - 1));
    if k % 2 == 1 {
        c = -c;
    }
    let mono = PuiseuxMonomial::var(orb.rank(), i, Exponent::from_integer(-(k as i64)));
    Ok(PuiseuxPoly::term(mono, CycRational::from_rational(orb.field(), c)))
}

/// `R_h(z)` truncated at `z^order`.
pub fn diagonal_entry(orb: &OrbifoldData, h: usize, order: u32) -> TruncSeries {
    let r = orb.rank();
    let field = orb.field();
    let mut log = TruncSeries::zero(field, r, SeriesVars::Z, order);
    for m in 1..=order {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let pref = rat(sign, (m * (m + 1)) as i64);
        let mut coeff = PuiseuxPoly::zero();
        for i in 0..r {
            let b = bernoulli_eval(m + 1, &orb.rotation(h, i).into_rational());
            let mono = PuiseuxMonomial::var(r, i, Exponent::from_integer(-(m as i64)));
            coeff.add_term(mono, CycRational::from_rational(field, &pref * b));
        }
        log.set(m, 0, coeff);
    }
    log.exp().expect("log R has no constant term")
}

trait IntoRational {
    fn into_rational(self) -> Rational;
}

impl IntoRational for Exponent {
    fn into_rational(self) -> Rational {
        Rational::new((*self.numer()).into(), (*self.denom()).into())
    }
}

/// The R-matrix truncated at `z^order`.
pub struct RMatrix {
    orb: Arc<OrbifoldData>,
    order: u32,
    diagonal: Vec<TruncSeries>,
    entries: OnceLock<Vec<Vec<TruncSeries>>>,
    neg_entries: OnceLock<Vec<Vec<TruncSeries>>>,
    edges: OnceLock<std::result::Result<Vec<TruncSeries>, Error>>,
    edge_table: OnceLock<std::result::Result<Vec<Vec<TruncSeries>>, Error>>,
}

impl std::fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RMatrix")
            .field("group_order", &self.orb.group_order())
            .field("rank", &self.orb.rank())
            .field("order", &self.order)
            .finish()
    }
}

impl RMatrix {
    pub fn new(orb: Arc<OrbifoldData>, order: u32) -> Self {
        let diagonal = (0..orb.group_order())
            .map(|h| diagonal_entry(&orb, h, order))
            .collect();
        RMatrix {
            orb,
            order,
            diagonal,
            entries: OnceLock::new(),
            neg_entries: OnceLock::new(),
            edges: OnceLock::new(),
            edge_table: OnceLock::new(),
        }
    }

    pub fn orb(&self) -> &Arc<OrbifoldData> {
        &self.orb
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `R_h(z)`
    pub fn diagonal(&self, h: usize) -> &TruncSeries {
        &self.diagonal[h]
    }

    fn transform(&self, neg: bool) -> Vec<Vec<TruncSeries>> {
        let n = self.orb.group_order();
        let inv_g = self.orb.inv_order();
        let diag: Vec<TruncSeries> = if neg {
            self.diagonal.iter().map(TruncSeries::negate_vars).collect()
        } else {
            self.diagonal.clone()
        };
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut acc = TruncSeries::zero(
                            self.orb.field(),
                            self.orb.rank(),
                            SeriesVars::Z,
                            self.order,
                        );
                        for (h, d) in diag.iter().enumerate() {
                            let c = &self.orb.chi(a, h) * &self.orb.chi(b, self.orb.inverse(h));
                            acc = acc.add(&d.scale_cyc(&c.scale(&inv_g))).unwrap();
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// `R(z)^alpha_beta = (1/|G|) sum_h chi_alpha(h) chi_beta(h^-1) R_h(z)`
    pub fn entry(&self, alpha: usize, beta: usize) -> &TruncSeries {
        &self.entries.get_or_init(|| self.transform(false))[alpha][beta]
    }

    /// `R(-z)^alpha_beta`
    pub fn entry_neg(&self, alpha: usize, beta: usize) -> &TruncSeries {
        &self.neg_entries.get_or_init(|| self.transform(true))[alpha][beta]
    }

    /// `sum_beta R(-z)^beta_alpha = R_1(-z)`, independent of `alpha`.
    pub fn column_sum_neg(&self) -> TruncSeries {
        self.diagonal[self.orb.identity()].negate_vars()
    }

    /// `(1 - R_h(-z) R_{h^-1}(-zeta)) / (z + zeta)`, truncated at total degree `order - 1`.
    fn diagonal_edge(&self, h: usize) -> Result<TruncSeries> {
        let a = self.diagonal[h].negate_vars().as_z();
        let b = self.diagonal[self.orb.inverse(h)].negate_vars().as_zeta();
        let one = TruncSeries::one(self.orb.field(), self.orb.rank(), SeriesVars::ZZeta, self.order);
        one.sub(&a.mul(&b)?)?.divide_by_z_plus_zeta()
    }

    fn diagonal_edges(&self) -> Result<&Vec<TruncSeries>> {
        self.edges
            .get_or_init(|| (0..self.orb.group_order()).map(|h| self.diagonal_edge(h)).collect())
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `(delta_{ab} - sum_g R(-z)^g_a R(-zeta)^g_b) / (z + zeta)`, without the `|G|^2` factor.
    ///
    /// Assembled from the diagonal quotients; truncated at total degree `order - 1`.
    pub fn edge_series(&self, alpha: usize, beta: usize) -> Result<TruncSeries> {
        let edges = self.diagonal_edges()?;
        let inv_g = self.orb.inv_order();
        let mut acc = TruncSeries::zero(
            self.orb.field(),
            self.orb.rank(),
            SeriesVars::ZZeta,
            self.order.saturating_sub(1),
        );
        for (h, e) in edges.iter().enumerate() {
            let c = &self.orb.chi(alpha, self.orb.inverse(h)) * &self.orb.chi(beta, h);
            acc = acc.add(&e.scale_cyc(&c.scale(&inv_g)))?;
        }
        Ok(acc)
    }

    /// `[z^k zeta^l]` of [`RMatrix::edge_series`].
    pub fn edge_coefficient(&self, alpha: usize, beta: usize, k: u32, l: u32) -> Result<PuiseuxPoly> {
        if k + l + 1 > self.order {
            return Err(Error::TruncationTooSmall {
                order: self.order,
                needed: k + l + 1,
            });
        }
        let n = self.orb.group_order();
        let table = self
            .edge_table
            .get_or_init(|| {
                (0..n)
                    .map(|a| (0..n).map(|b| self.edge_series(a, b)).collect())
                    .collect()
            })
            .as_ref()
            .map_err(Clone::clone)?;
        Ok(table[alpha][beta].coeff(k, l))
    }

    /// The edge numerator built from canonical entries, before division.
    pub fn edge_numerator_canonical(&self, alpha: usize, beta: usize) -> Result<TruncSeries> {
        let n = self.orb.group_order();
        let mut acc = if alpha == beta {
            TruncSeries::one(self.orb.field(), self.orb.rank(), SeriesVars::ZZeta, self.order)
        } else {
            TruncSeries::zero(self.orb.field(), self.orb.rank(), SeriesVars::ZZeta, self.order)
        };
        for g in 0..n {
            let p = self.entry_neg(g, alpha).as_z().mul(&self.entry_neg(g, beta).as_zeta())?;
            acc = acc.sub(&p)?;
        }
        Ok(acc)
    }

    /// `sum_g R(z)^g_a R(-z)^g_b` from canonical entries.
    pub fn symplectic_product(&self, alpha: usize, beta: usize) -> Result<TruncSeries> {
        let mut acc =
            TruncSeries::zero(self.orb.field(), self.orb.rank(), SeriesVars::Z, self.order);
        for g in 0..self.orb.group_order() {
            acc = acc.add(&self.entry(g, alpha).mul(self.entry_neg(g, beta))?)?;
        }
        Ok(acc)
    }

    /// Checks `sum_g R(z)^g_a R(-z)^g_b = delta_ab` for all `a, b`.
    ///
    /// Returns the first failing pair and its product on failure.
    pub fn check_symplectic(&self) -> std::result::Result<(), (usize, usize, String)> {
        let n = self.orb.group_order();
        for a in 0..n {
            for b in 0..n {
                let p = self.symplectic_product(a, b).map_err(|e| (a, b, e.to_string()))?;
                let expected = if a == b {
                    TruncSeries::one(self.orb.field(), self.orb.rank(), SeriesVars::Z, self.order)
                } else {
                    TruncSeries::zero(self.orb.field(), self.orb.rank(), SeriesVars::Z, self.order)
                };
                if p != expected {
                    return Err((a, b, format!("{p:?}")));
                }
            }
        }
        Ok(())
    }
}
