//! Finite abelian group data for `[C^r/G]`.
//!
//! `G` is presented as `Z/n_1 x .. x Z/n_k` (the empty product is the trivial
//! group). Elements and characters are both residue vectors; the pairing is
//! `chi_gamma(h) = exp(2 pi i sum_k gamma_k h_k / n_k)`, and it is only ever
//! materialized exactly, as a root of unity in `Q(zeta_N)` with `N` the
//! exponent of `G`, or as the fractional exponent in `[0, 1)`.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{
    rat, CycRational, CyclotomicField, Exponent, PuiseuxMonomial, PuiseuxPoly, Rational,
};

/// A group element as residues modulo the cyclic factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub Vec<u32>);

/// A character of `G`, as a dual residue vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character(pub Vec<u32>);

/// The basis a cohomology class is written in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassTag {
    /// `1_h`
    Unit(usize),
    /// `1bar_h = 1_h / prod_i w_i^{c_i(h)}`
    UnitBar(usize),
    /// `phi_gamma`
    Phi(usize),
    /// `phibar_gamma`
    PhiBar(usize),
}

/// Which canonical frame insertion coordinates are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `{phi_gamma}`, used by twisted correlators.
    Canonical,
    /// `{phibar_gamma}`, used by equivariant correlators of `[C^r/G]`.
    NormalizedCanonical,
}

/// The input geometry `[C^r/G]` with all derived tables.
#[derive(Debug, Clone)]
pub struct OrbifoldData {
    orders: Vec<u32>,
    action: Vec<Character>,
    exponent: u32,
    field: Arc<CyclotomicField>,
    elements: Vec<Element>,
    inverse: Vec<usize>,
    image_orders: Vec<u32>,
    /// `rotation[h][i] = c_i(h)`
    rotation: Vec<Vec<Exponent>>,
}

fn enumerate_residues(orders: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &n in orders {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

impl OrbifoldData {
    /// Builds `[C^r/G]` from the cyclic orders of `G` and one character
    /// exponent vector per coordinate of `C^r`.
    pub fn build(orders: &[u32], action: &[Vec<u32>]) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidOrbifold("cyclic orders must be positive".into()));
        }
        if action.is_empty() {
            return Err(Error::InvalidOrbifold("need at least one coordinate (r >= 1)".into()));
        }
        for (i, chi) in action.iter().enumerate() {
            if chi.len() != orders.len() {
                return Err(Error::InvalidOrbifold(format!(
                    "action character {} has {} residues, group has {} factors",
                    i + 1,
                    chi.len(),
                    orders.len()
                )));
            }
        }
        let exponent = orders.iter().fold(1u32, |acc, &n| acc.lcm(&n));
        let field = CyclotomicField::get(exponent);
        let elements: Vec<Element> = enumerate_residues(orders).into_iter().map(Element).collect();
        let action: Vec<Character> = action
            .iter()
            .map(|chi| Character(chi.iter().zip(orders).map(|(&x, &n)| x % n).collect()))
            .collect();

        let mut orb = OrbifoldData {
            orders: orders.to_vec(),
            action,
            exponent,
            field,
            elements,
            inverse: Vec::new(),
            image_orders: Vec::new(),
            rotation: Vec::new(),
        };
        orb.inverse = orb
            .elements
            .iter()
            .map(|h| orb.index_of(&orb.inverse_element(h)))
            .collect();
        orb.rotation = orb
            .elements
            .iter()
            .map(|h| orb.action.iter().map(|chi| orb.char_exponent(chi, h)).collect())
            .collect();
        orb.image_orders = (0..orb.rank())
            .map(|i| {
                orb.rotation
                    .iter()
                    .map(|row| *row[i].denom() as u32)
                    .fold(1u32, |acc, d| acc.lcm(&d))
            })
            .collect();
        orb.validate()?;
        Ok(orb)
    }

    fn validate(&self) -> Result<()> {
        for (hi, row) in self.rotation.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                let l = self.image_orders[i] as i64;
                if *c < Exponent::zero() || *c >= Exponent::one() || !(c * l).is_integer() {
                    return Err(Error::InvalidOrbifold(format!(
                        "rotation number c_{}({:?}) = {c} out of range",
                        i + 1,
                        self.elements[hi]
                    )));
                }
            }
        }
        if self.rotation[self.identity()].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidOrbifold("identity has nonzero rotation".into()));
        }
        if self.image_orders.iter().any(|&l| !self.exponent.is_multiple_of(l)) {
            return Err(Error::InvalidOrbifold("image order does not divide exponent".into()));
        }
        Ok(())
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn action(&self) -> &[Character] {
        &self.action
    }

    /// `r`, the dimension of the affine space.
    pub fn rank(&self) -> usize {
        self.action.len()
    }

    /// `|G|`
    pub fn group_order(&self) -> usize {
        self.elements.len()
    }

    /// Exponent of `G`, the conductor of the coefficient field.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Characters are indexed exactly like elements (the dual group has the same shape).
    pub fn characters(&self) -> Vec<Character> {
        self.elements.iter().map(|e| Character(e.0.clone())).collect()
    }

    pub fn character(&self, idx: usize) -> Character {
        Character(self.elements[idx].0.clone())
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of(&self, h: &Element) -> usize {
        h.0.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + (x % n) as usize)
    }

    pub fn inverse(&self, h: usize) -> usize {
        self.inverse[h]
    }

    pub fn multiply(&self, h1: usize, h2: usize) -> usize {
        let a = &self.elements[h1].0;
        let b = &self.elements[h2].0;
        let prod = Element(
            a.iter()
                .zip(b)
                .zip(&self.orders)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        );
        self.index_of(&prod)
    }

    fn inverse_element(&self, h: &Element) -> Element {
        Element(h.0.iter().zip(&self.orders).map(|(&x, &n)| (n - x) % n).collect())
    }

    /// Images `l_i` of the action characters.
    pub fn image_orders(&self) -> &[u32] {
        &self.image_orders
    }

    /// `c` in `[0,1)` with `chi_gamma(h) = exp(2 pi i c)`.
    pub fn char_exponent(&self, gamma: &Character, h: &Element) -> Exponent {
        let mut acc = Exponent::zero();
        for ((&g, &x), &n) in gamma.0.iter().zip(&h.0).zip(&self.orders) {
            acc += Exponent::new((g as i64) * (x as i64), n as i64);
        }
        acc - acc.floor()
    }

    /// `chi_gamma(h)` as an element of `Q(zeta_N)`.
    pub fn chi(&self, gamma: usize, h: usize) -> CycRational {
        let c = self.char_exponent(&self.character(gamma), &self.elements[h]);
        let k = c * self.exponent as i64;
        debug_assert!(k.is_integer());
        CycRational::root_power(&self.field, k.to_integer())
    }

    /// `c_i(h)` for coordinate `i` (0-based).
    pub fn rotation(&self, h: usize, i: usize) -> Exponent {
        self.rotation[h][i]
    }

    pub fn age(&self, h: usize) -> Exponent {
        self.rotation[h].iter().fold(Exponent::zero(), |acc, c| acc + c)
    }

    /// `dim (C^r)^h`
    pub fn fixed_dimension(&self, h: usize) -> usize {
        self.rotation[h].iter().filter(|c| c.is_zero()).count()
    }

    /// `e_h = prod_i w_i^{delta_{c_i(h),0}}`
    pub fn euler_monomial(&self, h: usize) -> PuiseuxMonomial {
        PuiseuxMonomial::new(
            self.rotation[h]
                .iter()
                .map(|c| if c.is_zero() { Exponent::one() } else { Exponent::zero() })
                .collect(),
        )
    }

    /// `e_1 = w_1 .. w_r`
    pub fn e_one(&self) -> PuiseuxMonomial {
        PuiseuxMonomial::new(vec![Exponent::one(); self.rank()])
    }

    pub fn sqrt_e_one(&self) -> PuiseuxMonomial {
        PuiseuxMonomial::new(vec![Exponent::new(1, 2); self.rank()])
    }

    /// `prod_i w_i^{c_i(h)}`, the factor between `1_h` and `1bar_h`.
    pub fn normalizer_monomial(&self, h: usize) -> PuiseuxMonomial {
        PuiseuxMonomial::new(self.rotation[h].clone())
    }

    /// `prod_i w_i^{c_i(h) + c_i(h') - c_i(hh')}` from `1_h * 1_h' = (..) 1_{hh'}`.
    pub fn cup_product_monomial(&self, h1: usize, h2: usize) -> PuiseuxMonomial {
        let h12 = self.multiply(h1, h2);
        PuiseuxMonomial::new(
            (0..self.rank())
                .map(|i| self.rotation[h1][i] + self.rotation[h2][i] - self.rotation[h12][i])
                .collect(),
        )
    }

    /// `1/|G|` as a rational.
    pub fn inv_order(&self) -> Rational {
        rat(1, self.group_order() as i64)
    }

    /// `(M, M_inv)` with `phi_gamma = sum_h M[gamma][h] 1_h` and
    /// `1_h = sum_gamma M_inv[h][gamma] phi_gamma`.
    pub fn basis_matrices(&self) -> (Vec<Vec<CycRational>>, Vec<Vec<CycRational>>) {
        let n = self.group_order();
        let inv_g = self.inv_order();
        let m = (0..n)
            .map(|g| (0..n).map(|h| self.chi(g, self.inverse(h)).scale(&inv_g)).collect())
            .collect();
        let m_inv = (0..n).map(|h| (0..n).map(|g| self.chi(g, h)).collect()).collect();
        (m, m_inv)
    }

    /// Coordinates of a class in the `{1_h}` basis.
    pub fn unit_coordinates(&self, tag: &ClassTag) -> Vec<PuiseuxPoly> {
        let n = self.group_order();
        let r = self.rank();
        let inv_g = self.inv_order();
        let mut out = vec![PuiseuxPoly::zero(); n];
        match *tag {
            ClassTag::Unit(h) => out[h] = PuiseuxPoly::one(&self.field, r),
            ClassTag::UnitBar(h) => {
                out[h] = PuiseuxPoly::term(self.normalizer_monomial(h).inv(), CycRational::one(&self.field))
            }
            ClassTag::Phi(g) => {
                for (h, slot) in out.iter_mut().enumerate() {
                    *slot = PuiseuxPoly::constant(self.chi(g, self.inverse(h)).scale(&inv_g), r);
                }
            }
            ClassTag::PhiBar(g) => {
                for (h, slot) in out.iter_mut().enumerate() {
                    *slot = PuiseuxPoly::term(
                        self.normalizer_monomial(h).inv(),
                        self.chi(g, self.inverse(h)).scale(&inv_g),
                    );
                }
            }
        }
        out
    }

    /// Coordinates of a class in `{phi_gamma}` or `{phibar_gamma}`.
    pub fn frame_coordinates(&self, tag: &ClassTag, frame: Frame) -> Vec<PuiseuxPoly> {
        let units = self.unit_coordinates(tag);
        let n = self.group_order();
        (0..n)
            .map(|g| {
                let mut acc = PuiseuxPoly::zero();
                for (h, x) in units.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    // 1_h = sum_g chi_g(h) phi_g ;  1_h = w^{c(h)} sum_g chi_g(h) phibar_g
                    let mut term = x.scale(&self.chi(g, h));
                    if frame == Frame::NormalizedCanonical {
                        term = term.mul_monomial(&self.normalizer_monomial(h));
                    }
                    acc.add_assign_ref(&term);
                }
                acc
            })
            .collect()
    }
}

/// Every action of `Z/n_1 x .. x Z/n_k` on `C^r`: all `|G|^r` choices of characters.
pub fn all_actions(orders: &[u32], r: usize) -> Vec<OrbifoldData> {
    let chars = enumerate_residues(orders);
    let mut actions: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for _ in 0..r {
        actions = actions
            .into_iter()
            .flat_map(|prefix| {
                chars.iter().map(move |c| {
                    let mut a = prefix.clone();
                    a.push(c.clone());
                    a
                })
            })
            .collect();
    }
    actions
        .iter()
        .map(|a| OrbifoldData::build(orders, a).expect("valid action"))
        .collect()
}

/// `{1, Z/2, Z/3, Z/2 x Z/2}` acting on `C^r` for `r <= 3`, all actions.
pub fn standard_test_set() -> Vec<OrbifoldData> {
    let groups: [&[u32]; 4] = [&[], &[2], &[3], &[2, 2]];
    groups
        .iter()
        .flat_map(|g| (1..=3).flat_map(move |r| all_actions(g, r)))
        .collect()
}
