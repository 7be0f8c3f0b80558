//! Independent evaluation of twisted correlators by the quantized
//! Riemann-Roch operator acting on the descendant potential of `BG`.
//!
//! The operator is `O = sum_m sum_i (s^i_m/(m+1)!) (A^i_{m+1} z^m)^`, which on
//! functions of `u` reads
//!
//! ```text
//! O = - sum M_m[a][b] q^a_k d/du^b_{k+m}
//!     + (hbar |G|^2 / 2) sum_{l<m} (-1)^l M_m[a][b] d/du^a_l d/du^b_{m-1-l}
//! ```
//!
//! with `q^a_1 = u^a_1 - 1` and `M_m = sum_i (-1)^m/(m(m+1)) w_i^{-m} E^i_{m+1}`.
//! `exp(O)` is applied to `D = exp(F)` by integrating the flow
//! `dF/dt = V(F) + (hbar/2) Q(ddF) + (hbar/2) Q(dF, dF)` as a Taylor series
//! in `t`: `F^(j+1) = L F^(j) + sum_i C(j,i) B(F^(i), F^(j-i))`.
//!
//! Every term of `F^(j)` has `d = 3g - 3 + n - sum a >= j`, and `chi + d`
//! (with `chi = 2g - 2 + n`) never decreases, so truncating at `g <= G` and
//! `chi + d <= budget` is exact and the series terminates.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bgpotential::{PotentialKey, TruncatedPotential, Var};
use crate::error::{Error, Result};
use crate::exactalg::{bernoulli_eval, rat, CycRational, Exponent, PuiseuxMonomial, PuiseuxPoly, Rational};
use crate::graphsum::{CorrelatorRequest, Normalization};
use crate::groupchar::OrbifoldData;
use crate::psiint::psi_integral;

/// Truncation of the oracle: genus at most `max_genus`, `chi + d <= budget`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    pub max_genus: u32,
    pub budget: u32,
}

impl OracleBounds {
    /// Smallest bounds containing every key of genus `g` with `n` points.
    pub fn for_target(g: u32, n: usize) -> Self {
        let chi = 2 * g as i64 - 2 + n as i64;
        let dim = 3 * g as i64 - 3 + n as i64;
        OracleBounds {
            max_genus: g,
            budget: (chi + dim).max(1) as u32,
        }
    }

    /// Bounds covering all of `targets`.
    pub fn covering(targets: &[(u32, usize)]) -> Self {
        targets.iter().fold(OracleBounds { max_genus: 0, budget: 1 }, |acc, &(g, n)| {
            let b = Self::for_target(g, n);
            OracleBounds {
                max_genus: acc.max_genus.max(b.max_genus),
                budget: acc.budget.max(b.budget),
            }
        })
    }

    pub fn contains(&self, key: &PotentialKey) -> bool {
        key.genus <= self.max_genus && key.euler() > 0 && weight(key) <= self.budget as i64
    }
}

/// `chi + d` of a key.
fn weight(key: &PotentialKey) -> i64 {
    key.euler() + key.defect()
}

/// `(E^i_m)[a][b] = (1/|G|) sum_h chi_a(h^-1) B_m(c_i(h)) chi_b(h)`.
pub fn e_matrix(orb: &OrbifoldData, i: usize, m: u32) -> Vec<Vec<CycRational>> {
    let n = orb.group_order();
    let inv_g = orb.inv_order();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut acc = CycRational::zero(orb.field());
                    for h in 0..n {
                        let c = orb.rotation(h, i);
                        let bm = bernoulli_eval(m, &Rational::new((*c.numer()).into(), (*c.denom()).into()));
                        let x = &orb.chi(a, orb.inverse(h)) * &orb.chi(b, h);
                        acc.add_assign_ref(&x.scale(&(&bm * &inv_g)));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// The quantized operator truncated at `m <= m_max`.
#[derive(Debug, Clone)]
pub struct QuantizedOperator {
    orb: Arc<OrbifoldData>,
    m_max: u32,
    /// `m_matrices[m - 1][a][b] = M_m[a][b]`
    m_matrices: Vec<Vec<Vec<PuiseuxPoly>>>,
    /// `sum_a M_m[a][b]`, the dilaton-shift constant
    column_sums: Vec<Vec<PuiseuxPoly>>,
}

impl QuantizedOperator {
    pub fn orb(&self) -> &Arc<OrbifoldData> {
        &self.orb
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    /// `M_m[a][b]`
    pub fn component(&self, m: u32, a: usize, b: usize) -> &PuiseuxPoly {
        &self.m_matrices[m as usize - 1][a][b]
    }
}

/// Checks that `E^i_m` is symmetric for even `m` and antisymmetric for odd `m >= 3`.
///
/// The `BG` pairing is `delta_ab/|G|^2` in the canonical basis, so adjointness is transposition.
pub fn check_adjointness(orb: &OrbifoldData, m_max: u32) -> std::result::Result<(), String> {
    let n = orb.group_order();
    for i in 0..orb.rank() {
        for m in 0..=m_max {
            if m == 1 {
                continue;
            }
            let e = e_matrix(orb, i, m);
            for a in 0..n {
                for b in 0..n {
                    let t = if m % 2 == 0 { e[b][a].clone() } else { -&e[b][a] };
                    if e[a][b] != t {
                        return Err(format!("E^{}_{} fails adjointness at ({a},{b})", i + 1, m));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Materializes `M_1 .. M_{m_max}` after verifying the adjointness pattern.
pub fn build_operator(orb: Arc<OrbifoldData>, m_max: u32) -> Result<QuantizedOperator> {
    check_adjointness(&orb, m_max + 1).map_err(Error::InvalidOrbifold)?;
    let n = orb.group_order();
    let r = orb.rank();
    let mut m_matrices = Vec::new();
    let mut column_sums = Vec::new();
    for m in 1..=m_max {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let pref = rat(sign, (m * (m + 1)) as i64);
        let mut mat = vec![vec![PuiseuxPoly::zero(); n]; n];
        for i in 0..r {
            let e = e_matrix(&orb, i, m + 1);
            let mono = PuiseuxMonomial::var(r, i, Exponent::from_integer(-(m as i64)));
            for a in 0..n {
                for b in 0..n {
                    mat[a][b].add_term(mono.clone(), e[a][b].scale(&pref));
                }
            }
        }
        let sums = (0..n)
            .map(|b| {
                let mut s = PuiseuxPoly::zero();
                for row in &mat {
                    s.add_assign_ref(&row[b]);
                }
                s
            })
            .collect();
        m_matrices.push(mat);
        column_sums.push(sums);
    }
    Ok(QuantizedOperator {
        orb,
        m_max,
        m_matrices,
        column_sums,
    })
}

type Poly = HashMap<PotentialKey, PuiseuxPoly>;

fn add_into(p: &mut Poly, key: PotentialKey, c: PuiseuxPoly) {
    if c.is_zero() {
        return;
    }
    match p.entry(key) {
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::hash_map::Entry::Occupied(mut o) => {
            o.get_mut().add_assign_ref(&c);
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn merge(parts: Vec<Vec<(PotentialKey, PuiseuxPoly)>>) -> Poly {
    let mut out = Poly::new();
    for part in parts {
        for (k, c) in part {
            add_into(&mut out, k, c);
        }
    }
    out
}

/// Distinct variables of a sorted key with multiplicities.
fn distinct(vars: &[Var]) -> Vec<(Var, usize)> {
    let mut out: Vec<(Var, usize)> = Vec::new();
    for &v in vars {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

fn remove_one(vars: &[Var], v: Var) -> Vec<Var> {
    let mut out = vars.to_vec();
    let pos = out.iter().position(|x| *x == v).expect("variable present");
    out.remove(pos);
    out
}

fn insert_sorted(vars: &mut Vec<Var>, v: Var) {
    let pos = vars.partition_point(|x| *x < v);
    vars.insert(pos, v);
}

/// A first derivative `d/du^v` of one term: the remaining key and coefficient.
struct Derivative {
    genus: u32,
    rest: Vec<Var>,
    coeff: PuiseuxPoly,
    weight: i64,
}

fn derivatives(p: &Poly) -> HashMap<Var, Vec<Derivative>> {
    let mut out: HashMap<Var, Vec<Derivative>> = HashMap::new();
    for (key, c) in p {
        let w = weight(key);
        for (v, cnt) in distinct(&key.vars) {
            out.entry(v).or_default().push(Derivative {
                genus: key.genus,
                rest: remove_one(&key.vars, v),
                coeff: c.scale_rational(&Rational::from_integer(BigInt::from(cnt))),
                weight: w,
            });
        }
    }
    for list in out.values_mut() {
        list.sort_by_key(|d| d.weight);
    }
    out
}

struct Flow<'a> {
    op: &'a QuantizedOperator,
    bounds: OracleBounds,
    /// `|G|^2 / 2`
    half_g2: Rational,
}

impl Flow<'_> {
    fn keep(&self, key: &PotentialKey) -> bool {
        self.bounds.contains(key)
    }

    /// `L = V + (hbar/2) Q dd`, the linear part of the flow.
    fn linear(&self, p: &Poly) -> Poly {
        let op = self.op;
        let n = op.orb.group_order();
        let budget = self.bounds.budget as i64;
        let terms: Vec<(&PotentialKey, &PuiseuxPoly)> = p.iter().collect();
        let parts = terms
            .par_iter()
            .map(|&(key, c)| {
                let mut out = Vec::new();
                let w = weight(key);
                let dv = distinct(&key.vars);
                for m in 1..=op.m_max {
                    if w + m as i64 - 1 > budget {
                        break;
                    }
                    let mi = m as usize - 1;
                    for &(v, cnt) in &dv {
                        let b = v.class as usize;
                        let cc = c.scale_rational(&Rational::from_integer(BigInt::from(cnt)));
                        // -M[a][b] u^a_{l-m} d/du^b_l
                        if v.level >= m && w + m as i64 <= budget {
                            let rest = remove_one(&key.vars, v);
                            for a in 0..n {
                                let mab = &op.m_matrices[mi][a][b];
                                if mab.is_zero() {
                                    continue;
                                }
                                let mut vars = rest.clone();
                                insert_sorted(&mut vars, Var::new(a, v.level - m));
                                let k = PotentialKey { genus: key.genus, vars };
                                if self.keep(&k) {
                                    out.push((k, -(&cc * mab)));
                                }
                            }
                        }
                        // dilaton shift: + sum_a M[a][b] d/du^b_{m+1}
                        if v.level == m + 1 {
                            let k = PotentialKey {
                                genus: key.genus,
                                vars: remove_one(&key.vars, v),
                            };
                            if self.keep(&k) {
                                out.push((k, &cc * &op.column_sums[mi][b]));
                            }
                        }
                    }
                    // (hbar |G|^2/2) sum (-1)^l M[a][b] d_{a,l} d_{b,m-1-l} on one term
                    if key.genus < self.bounds.max_genus && w + m as i64 <= budget {
                        for l in 0..m {
                            for &(v1, c1) in &dv {
                                if v1.level != l {
                                    continue;
                                }
                                let rest1 = remove_one(&key.vars, v1);
                                for (v2, c2) in distinct(&rest1) {
                                    if v2.level != m - 1 - l {
                                        continue;
                                    }
                                    let mab = &op.m_matrices[mi][v1.class as usize][v2.class as usize];
                                    if mab.is_zero() {
                                        continue;
                                    }
                                    let k = PotentialKey {
                                        genus: key.genus + 1,
                                        vars: remove_one(&rest1, v2),
                                    };
                                    if !self.keep(&k) {
                                        continue;
                                    }
                                    let mut x = &self.half_g2 * Rational::from_integer(BigInt::from(c1 * c2));
                                    if l % 2 == 1 {
                                        x = -x;
                                    }
                                    out.push((k, (c * mab).scale_rational(&x)));
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();
        merge(parts)
    }

    /// `B(X, Y) = (hbar |G|^2/2) sum (-1)^l M[a][b] d_{a,l} X d_{b,m-1-l} Y`.
    fn bilinear(&self, dx: &HashMap<Var, Vec<Derivative>>, dy: &HashMap<Var, Vec<Derivative>>) -> Poly {
        let op = self.op;
        let n = op.orb.group_order();
        let budget = self.bounds.budget as i64;
        let mut jobs = Vec::new();
        for m in 1..=op.m_max {
            for l in 0..m {
                for a in 0..n {
                    for b in 0..n {
                        let mab = &op.m_matrices[m as usize - 1][a][b];
                        if mab.is_zero() {
                            continue;
                        }
                        if let (Some(xs), Some(ys)) = (dx.get(&Var::new(a, l)), dy.get(&Var::new(b, m - 1 - l))) {
                            jobs.push((m, l, mab, xs, ys));
                        }
                    }
                }
            }
        }
        let parts = jobs
            .par_iter()
            .map(|&(m, l, mab, xs, ys)| {
                let mut out = Vec::new();
                let mut pref = self.half_g2.clone();
                if l % 2 == 1 {
                    pref = -pref;
                }
                for x in xs {
                    if x.weight + m as i64 + 1 > budget {
                        break;
                    }
                    let xm = (&x.coeff * mab).scale_rational(&pref);
                    for y in ys {
                        if x.weight + y.weight + m as i64 > budget {
                            break;
                        }
                        let genus = x.genus + y.genus;
                        if genus > self.bounds.max_genus {
                            continue;
                        }
                        let mut vars = x.rest.clone();
                        vars.extend_from_slice(&y.rest);
                        let k = PotentialKey::new(genus, vars);
                        if self.keep(&k) {
                            out.push((k, &xm * &y.coeff));
                        }
                    }
                }
                out
            })
            .collect();
        merge(parts)
    }
}

/// The seed `log D^BG` restricted to `bounds`.
pub fn bg_seed(orb: &OrbifoldData, bounds: OracleBounds) -> TruncatedPotential {
    let mut pot = TruncatedPotential::default();
    for g in 0..=bounds.max_genus {
        for n in 0usize..=(bounds.budget as usize + 2) {
            let chi = 2 * g as i64 - 2 + n as i64;
            if chi <= 0 || chi > bounds.budget as i64 {
                continue;
            }
            let dim = (3 * g as i64 - 3 + n as i64) as u32;
            for a in crate::bgpotential::partitions_into(dim, n, dim) {
                let value = crate::bgpotential::order_power(orb, 2 * g as i64 - 2) * psi_integral(g, &a);
                if value.is_zero() {
                    continue;
                }
                for gamma in 0..orb.group_order() {
                    let key = PotentialKey::new(g, a.iter().map(|&x| Var::new(gamma, x)).collect());
                    let c = &value / Rational::from_integer(key.automorphism_factor());
                    pot.add_term(key, &PuiseuxPoly::rational(orb.field(), orb.rank(), c));
                }
            }
        }
    }
    pot
}

/// `log D^tw` within bounds, with the bounds it is exact for.
#[derive(Debug, Clone)]
pub struct TwistedPotential {
    pub bounds: OracleBounds,
    pub potential: TruncatedPotential,
    /// Number of flow derivatives that were nonzero.
    pub depth: u32,
}

impl TwistedPotential {
    /// `<prod tau_{a_j}(phi_{gamma_j})>^tw_g`, as (descendant, character) pairs.
    pub fn extract(&self, g: u32, insertions: &[(u32, usize)]) -> Result<PuiseuxPoly> {
        let key = PotentialKey::new(g, insertions.iter().map(|&(a, gamma)| Var::new(gamma, a)).collect());
        if !self.bounds.contains(&key) {
            return Err(Error::OutOfBounds(format!("{key:?}")));
        }
        let c = self.potential.coefficient(&key);
        Ok(c.scale_rational(&Rational::from_integer(key.automorphism_factor())))
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Applies `exp(O)` to `exp(seed)` and returns the logarithm, truncated to `bounds`.
pub fn apply(op: &QuantizedOperator, seed: &TruncatedPotential, bounds: OracleBounds) -> Result<TwistedPotential> {
    let flow = Flow {
        op,
        bounds,
        half_g2: {
            let n = op.orb.group_order() as i64;
            rat(n * n, 2)
        },
    };
    let f0: Poly = seed
        .terms
        .iter()
        .filter(|(k, _)| bounds.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let mut total = f0.clone();
    let mut derivs = vec![derivatives(&f0)];
    let mut flows = vec![f0];
    let mut depth = 0;
    loop {
        let j = flows.len() - 1;
        if j as u32 > bounds.budget {
            return Err(Error::NotStabilized { depth: j as u32 });
        }
        let mut next = flow.linear(&flows[j]);
        for i in 0..=j {
            let c = Rational::from_integer(factorial(j as u32) / (factorial(i as u32) * factorial((j - i) as u32)));
            for (k, v) in flow.bilinear(&derivs[i], &derivs[j - i]) {
                add_into(&mut next, k, v.scale_rational(&c));
            }
        }
        if next.is_empty() {
            break;
        }
        depth += 1;
        let inv = Rational::new(BigInt::one(), factorial(j as u32 + 1));
        for (k, v) in &next {
            add_into(&mut total, k.clone(), v.scale_rational(&inv));
        }
        derivs.push(derivatives(&next));
        flows.push(next);
    }
    let mut potential = TruncatedPotential::default();
    for (k, v) in total {
        potential.add_term(k, &v);
    }
    Ok(TwistedPotential {
        bounds,
        potential,
        depth,
    })
}

/// `log D^tw` of `orb` within `bounds`.
pub fn twisted_potential(orb: Arc<OrbifoldData>, bounds: OracleBounds) -> Result<TwistedPotential> {
    let op = build_operator(orb.clone(), bounds.budget.max(1))?;
    let seed = bg_seed(&orb, bounds);
    apply(&op, &seed, bounds)
}

/// The oracle's value for a graph-sum request: multilinear expansion of the
/// insertion series, `e_1^{g-1}` for the equivariant normalization, and `1/n'!`.
pub fn oracle_correlator(request: &CorrelatorRequest) -> Result<PuiseuxPoly> {
    let orb = &request.orb;
    let mut series = request.ordered.clone();
    for _ in 0..request.unordered_count {
        series.push(request.unordered.clone());
    }
    let tw = twisted_potential(orb.clone(), OracleBounds::for_target(request.genus, series.len()))?;
    let mut acc = PuiseuxPoly::zero();
    let mut partial: Vec<(Vec<(u32, usize)>, PuiseuxPoly)> = vec![(Vec::new(), PuiseuxPoly::one(orb.field(), orb.rank()))];
    for s in &series {
        let mut next = Vec::new();
        for (ins, c) in &partial {
            for (&(gamma, a), x) in s.terms() {
                let mut ins = ins.clone();
                ins.push((a, gamma));
                next.push((ins, c * x));
            }
        }
        partial = next;
    }
    for (ins, c) in partial {
        let key_dim = 3 * request.genus as i64 - 3 + ins.len() as i64;
        if ins.iter().map(|&(a, _)| a as i64).sum::<i64>() > key_dim {
            continue;
        }
        let v = tw.extract(request.genus, &ins)?;
        acc.add_assign_ref(&(&c * &v));
    }
    if request.normalization == Normalization::Equivariant {
        acc = acc.mul_monomial(&orb.e_one().pow(Exponent::from_integer(request.genus as i64 - 1)));
    }
    Ok(acc.scale_rational(&Rational::new(BigInt::one(), factorial(request.unordered_count as u32))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupchar::ClassTag;
    use crate::graphsum::{correlator, InsertionSeries};

    fn trivial() -> Arc<OrbifoldData> {
        Arc::new(OrbifoldData::build(&[], &[vec![]]).unwrap())
    }

    fn w_pow(orb: &OrbifoldData, x: Rational, p: i64) -> PuiseuxPoly {
        PuiseuxPoly::term(
            PuiseuxMonomial::var(orb.rank(), 0, Exponent::from_integer(p)),
            CycRational::from_rational(orb.field(), x),
        )
    }

    #[test]
    fn e_matrices() {
        let orb = trivial();
        for m in 0..6 {
            assert_eq!(e_matrix(&orb, 0, m)[0][0], CycRational::from_rational(orb.field(), crate::exactalg::bernoulli_number(m)));
        }
        let z2 = OrbifoldData::build(&[2], &[vec![1]]).unwrap();
        let e2 = e_matrix(&z2, 0, 2);
        let q = |x| CycRational::from_rational(z2.field(), x);
        assert_eq!(e2, vec![vec![q(rat(1, 24)), q(rat(1, 8))], vec![q(rat(1, 8)), q(rat(1, 24))]]);
        check_adjointness(&OrbifoldData::build(&[3], &[vec![1], vec![2]]).unwrap(), 7).unwrap();
    }

    #[test]
    fn zero_operator_is_identity() {
        let orb = trivial();
        let bounds = OracleBounds { max_genus: 1, budget: 3 };
        let op = build_operator(orb.clone(), 0).unwrap();
        let seed = bg_seed(&orb, bounds);
        let out = apply(&op, &seed, bounds).unwrap();
        assert_eq!(out.potential, seed);
        assert_eq!(out.depth, 0);
    }

    #[test]
    fn trivial_group_values() {
        let orb = trivial();
        let tw = twisted_potential(orb.clone(), OracleBounds::for_target(1, 1)).unwrap();
        assert_eq!(tw.extract(1, &[(0, 0)]).unwrap(), w_pow(&orb, rat(-1, 24), -1));
        assert_eq!(tw.extract(1, &[(1, 0)]).unwrap(), w_pow(&orb, rat(1, 24), 0));
        let tw = twisted_potential(orb.clone(), OracleBounds::for_target(0, 3)).unwrap();
        assert_eq!(tw.extract(0, &[(0, 0); 3]).unwrap(), PuiseuxPoly::one(orb.field(), 1));
        assert!(matches!(tw.extract(2, &[(0, 0)]), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn agrees_with_graph_sum_on_small_cases() {
        let orb = Arc::new(OrbifoldData::build(&[3], &[vec![1]]).unwrap());
        for (g, a) in [(1u32, vec![0u32]), (0, vec![0, 0, 0, 1]), (1, vec![0, 1])] {
            for gamma in 0..3 {
                let mut req = CorrelatorRequest::new(orb.clone(), g, Normalization::Twisted);
                for (j, &aj) in a.iter().enumerate() {
                    let tag = ClassTag::Phi((gamma + j) % 3);
                    req = req.with_ordered(InsertionSeries::class(&orb, aj, &tag, Normalization::Twisted));
                }
                assert_eq!(oracle_correlator(&req).unwrap(), correlator(&req).unwrap(), "g={g} a={a:?}");
            }
        }
    }
}
