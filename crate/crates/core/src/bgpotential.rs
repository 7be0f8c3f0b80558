//! Descendant correlators of `BG` and its truncated log-potential.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactalg::{PuiseuxPoly, Rational};
use crate::groupchar::OrbifoldData;
use crate::psiint::{is_stable, psi_integral};

/// The variable `u^gamma_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub level: u32,
    pub class: u32,
}

impl Var {
    pub fn new(class: usize, level: u32) -> Self {
        Var {
            level,
            class: class as u32,
        }
    }
}

/// `hbar^{g-1} prod u^{gamma_j}_{a_j}`, with the variables kept sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PotentialKey {
    pub genus: u32,
    pub vars: Vec<Var>,
}

impl PotentialKey {
    pub fn new(genus: u32, mut vars: Vec<Var>) -> Self {
        vars.sort_unstable();
        PotentialKey { genus, vars }
    }

    pub fn points(&self) -> usize {
        self.vars.len()
    }

    pub fn descendant_sum(&self) -> u32 {
        self.vars.iter().map(|v| v.level).sum()
    }

    /// `2g - 2 + n`
    pub fn euler(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.vars.len() as i64
    }

    /// `3g - 3 + n - sum a`, the degree in `1/w` of a twisted coefficient.
    pub fn defect(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.vars.len() as i64 - self.descendant_sum() as i64
    }

    /// `prod_j m_j!` over the multiplicities of repeated variables.
    pub fn automorphism_factor(&self) -> BigInt {
        let mut acc = BigInt::one();
        let mut run = 0u32;
        for (i, v) in self.vars.iter().enumerate() {
            run = if i > 0 && self.vars[i - 1] == *v { run + 1 } else { 1 };
            acc *= run;
        }
        acc
    }
}

impl fmt::Debug for PotentialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hbar^{}", self.genus as i64 - 1)?;
        for v in &self.vars {
            write!(f, " u{}_{}", v.class, v.level)?;
        }
        Ok(())
    }
}

/// Truncation bounds for the `BG` potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_genus: u32,
    pub max_points: usize,
    pub max_descendant: u32,
}

/// A truncated log-potential: coefficient of each monomial key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TruncatedPotential {
    pub terms: BTreeMap<PotentialKey, PuiseuxPoly>,
}

impl TruncatedPotential {
    pub fn coefficient(&self, key: &PotentialKey) -> PuiseuxPoly {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, key: PotentialKey, c: &PuiseuxPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Terms at genus `g` with exactly `n` variables.
    pub fn restricted(&self, g: u32, n: usize) -> TruncatedPotential {
        TruncatedPotential {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.genus == g && k.points() == n)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn group_power(orb: &OrbifoldData, exp: i64) -> Rational {
    let n = BigInt::from(orb.group_order());
    if exp >= 0 {
        Rational::from_integer(n.pow(exp as u32))
    } else {
        Rational::new(BigInt::one(), n.pow((-exp) as u32))
    }
}

/// `<tau_{a_1}(1_{h_1}) .. tau_{a_n}(1_{h_n})>_g` for `BG`.
pub fn bg_correlator_units(orb: &OrbifoldData, g: u32, insertions: &[(u32, usize)]) -> Rational {
    let product = insertions
        .iter()
        .fold(orb.identity(), |acc, &(_, h)| orb.multiply(acc, h));
    if product != orb.identity() {
        return Rational::zero();
    }
    let a: Vec<u32> = insertions.iter().map(|&(a, _)| a).collect();
    group_power(orb, 2 * g as i64 - 1) * psi_integral(g, &a)
}

/// `<tau_{a_1}(phi_{gamma_1}) .. tau_{a_n}(phi_{gamma_n})>_g` for `BG`.
pub fn bg_correlator_canonical(orb: &OrbifoldData, g: u32, insertions: &[(u32, usize)]) -> Rational {
    if insertions.windows(2).any(|w| w[0].1 != w[1].1) {
        return Rational::zero();
    }
    let a: Vec<u32> = insertions.iter().map(|&(a, _)| a).collect();
    group_power(orb, 2 * g as i64 - 2) * psi_integral(g, &a)
}

/// Non-increasing sequences of length `len` with entries `<= max` summing to `total`.
pub(crate) fn partitions_into(total: u32, len: usize, max: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=max.min(total)).rev() {
        if (first as u64) * (len as u64) < total as u64 {
            break;
        }
        for mut rest in partitions_into(total - first, len - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `log D^BG` truncated to the given bounds, in the `u^gamma_a` variables.
pub fn bg_log_potential(orb: &OrbifoldData, bounds: Bounds) -> TruncatedPotential {
    let mut pot = TruncatedPotential::default();
    let r = orb.rank();
    for g in 0..=bounds.max_genus {
        for n in 1..=bounds.max_points {
            if !is_stable(g, n) {
                continue;
            }
            let dim = 3 * g + n as u32 - 3;
            for a in partitions_into(dim, n, bounds.max_descendant) {
                let value = group_power(orb, 2 * g as i64 - 2) * psi_integral(g, &a);
                if value.is_zero() {
                    continue;
                }
                for gamma in 0..orb.group_order() {
                    let key = PotentialKey::new(g, a.iter().map(|&x| Var::new(gamma, x)).collect());
                    let coeff = &value / Rational::from_integer(key.automorphism_factor());
                    pot.add_term(key, &PuiseuxPoly::rational(orb.field(), r, coeff));
                }
            }
        }
    }
    pot
}

/// Correlator recovered from a potential coefficient.
pub fn correlator_from_coefficient(key: &PotentialKey, coeff: &PuiseuxPoly) -> PuiseuxPoly {
    coeff.scale_rational(&Rational::from_integer(key.automorphism_factor()))
}

/// `|G|^{2g-2} <prod tau>_g` as used in vertex weights.
pub fn vertex_scalar(orb: &OrbifoldData, g: u32, heights: &[u32]) -> Rational {
    group_power(orb, 2 * g as i64 - 2) * psi_integral(g, heights)
}

pub(crate) fn order_power(orb: &OrbifoldData, exp: i64) -> Rational {
    group_power(orb, exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::exactalg::CycRational;

    fn z2() -> OrbifoldData {
        OrbifoldData::build(&[2], &[vec![1]]).unwrap()
    }

    #[test]
    fn unit_basis_values() {
        let orb = z2();
        assert_eq!(bg_correlator_units(&orb, 0, &[(0, 1), (0, 1), (0, 0)]), rat(1, 2));
        assert_eq!(bg_correlator_units(&orb, 0, &[(0, 1), (0, 0), (0, 0)]), rat(0, 1));
        let triv = OrbifoldData::build(&[], &[vec![]]).unwrap();
        assert_eq!(bg_correlator_units(&triv, 1, &[(1, 0)]), rat(1, 24));
    }

    #[test]
    fn canonical_basis_values() {
        let z3 = OrbifoldData::build(&[3], &[vec![1]]).unwrap();
        assert_eq!(bg_correlator_canonical(&z3, 0, &[(0, 2), (0, 2), (0, 2)]), rat(1, 9));
        assert_eq!(bg_correlator_canonical(&z3, 0, &[(0, 1), (0, 2), (0, 2)]), rat(0, 1));
    }

    /// Transport the unit-basis correlator through `phi = M 1` and compare.
    #[test]
    fn canonical_matches_transported_units() {
        for orb in [z2(), OrbifoldData::build(&[3], &[vec![1]]).unwrap()] {
            let (m, _) = orb.basis_matrices();
            let n = orb.group_order();
            let f = orb.field().clone();
            let cases: Vec<(u32, Vec<u32>)> = vec![(0, vec![0, 0, 0]), (0, vec![1, 0, 0, 0]), (1, vec![1])];
            for (g, a) in cases {
                let len = a.len();
                for idx in 0..n.pow(len as u32) {
                    let gammas: Vec<usize> = (0..len).map(|j| (idx / n.pow(j as u32)) % n).collect();
                    let mut total = CycRational::zero(&f);
                    for hidx in 0..n.pow(len as u32) {
                        let hs: Vec<usize> = (0..len).map(|j| (hidx / n.pow(j as u32)) % n).collect();
                        let mut coeff = CycRational::one(&f);
                        for j in 0..len {
                            coeff = &coeff * &m[gammas[j]][hs[j]];
                        }
                        let ins: Vec<(u32, usize)> = a.iter().copied().zip(hs).collect();
                        let v = bg_correlator_units(&orb, g, &ins);
                        total = &total + &coeff.scale(&v);
                    }
                    let ins: Vec<(u32, usize)> = a.iter().copied().zip(gammas).collect();
                    let expected = bg_correlator_canonical(&orb, g, &ins);
                    assert_eq!(total, CycRational::from_rational(&f, expected));
                }
            }
        }
    }

    #[test]
    fn trivial_group_potential() {
        let triv = OrbifoldData::build(&[], &[vec![]]).unwrap();
        let pot = bg_log_potential(&triv, Bounds { max_genus: 0, max_points: 3, max_descendant: 0 });
        assert_eq!(pot.len(), 1);
        let key = PotentialKey::new(0, vec![Var::new(0, 0); 3]);
        assert_eq!(pot.coefficient(&key), PuiseuxPoly::rational(triv.field(), 1, rat(1, 6)));

        let pot = bg_log_potential(&triv, Bounds { max_genus: 1, max_points: 1, max_descendant: 1 });
        let key = PotentialKey::new(1, vec![Var::new(0, 1)]);
        assert_eq!(pot.coefficient(&key), PuiseuxPoly::rational(triv.field(), 1, rat(1, 24)));
    }

    #[test]
    fn dimension_mismatch_absent() {
        let orb = z2();
        let pot = bg_log_potential(&orb, Bounds { max_genus: 0, max_points: 4, max_descendant: 3 });
        let key = PotentialKey::new(0, vec![Var::new(1, 0), Var::new(1, 0), Var::new(1, 1)]);
        assert!(pot.coefficient(&key).is_zero());
    }

    #[test]
    fn coefficients_times_automorphisms_give_correlators() {
        let orb = OrbifoldData::build(&[3], &[vec![1]]).unwrap();
        let pot = bg_log_potential(&orb, Bounds { max_genus: 2, max_points: 5, max_descendant: 7 });
        assert!(!pot.is_empty());
        for (key, c) in &pot.terms {
            let ins: Vec<(u32, usize)> = key.vars.iter().map(|v| (v.level, v.class as usize)).collect();
            let expected = bg_correlator_canonical(&orb, key.genus, &ins);
            let got = correlator_from_coefficient(key, c);
            assert_eq!(got, PuiseuxPoly::rational(orb.field(), 1, expected));
            assert!(got.is_rational());
        }
    }
}
