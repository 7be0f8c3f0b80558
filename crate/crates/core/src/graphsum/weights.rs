use crate::bgpotential::{order_power, Var};
use crate::error::{Error, Result};
use crate::exactalg::{CycRational, Exponent, PuiseuxPoly, Rational};
use crate::groupchar::OrbifoldData;
use crate::psiint::psi_integral;
use crate::rmatrix::RMatrix;

use super::graph::LabeledGraph;
use super::InsertionSeries;

/// Which weight the graph sum evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `w~`: twisted correlators in the `{phi_gamma}` frame.
    Twisted,
    /// `w`: equivariant correlators of `[C^r/G]` in the `{phibar_gamma}` frame.
    Equivariant,
}

/// `1/(|G| sqrt(e_1))`
fn leaf_factor(orb: &OrbifoldData) -> PuiseuxPoly {
    PuiseuxPoly::term(
        orb.sqrt_e_one().inv(),
        CycRational::from_rational(orb.field(), orb.inv_order()),
    )
}

fn check_height(rm: &RMatrix, k: u32) -> Result<()> {
    if k > rm.order() {
        return Err(Error::TruncationTooSmall {
            order: rm.order(),
            needed: k,
        });
    }
    Ok(())
}

/// The linear form `[z^k] sum_beta R(-z)^beta_alpha u^beta(z)` in the variables `u^beta_a`.
pub fn leaf_linear_form(rm: &RMatrix, alpha: usize, k: u32, norm: Normalization) -> Result<Vec<(Var, PuiseuxPoly)>> {
    check_height(rm, k)?;
    let orb = rm.orb();
    let mut out = Vec::new();
    for beta in 0..orb.group_order() {
        let entry = rm.entry_neg(beta, alpha);
        for a in 0..=k {
            if let Some(c) = entry.coeff_ref(k - a, 0) {
                let c = match norm {
                    Normalization::Twisted => c.clone(),
                    Normalization::Equivariant => c * &leaf_factor(orb),
                };
                out.push((Var::new(beta, a), c));
            }
        }
    }
    Ok(out)
}

/// `(L^u)^alpha_k`, with the `1/(|G| sqrt(e_1))` factor in the equivariant normalization.
pub fn leaf_weight_ordinary(
    rm: &RMatrix,
    alpha: usize,
    k: u32,
    u: &InsertionSeries,
    norm: Normalization,
) -> Result<PuiseuxPoly> {
    let mut acc = PuiseuxPoly::zero();
    for (var, c) in leaf_linear_form(rm, alpha, k, norm)? {
        if let Some(x) = u.get(var.class as usize, var.level) {
            acc.add_assign_ref(&(&c * x));
        }
    }
    Ok(acc)
}

/// `(L^1)^alpha_k = [z^{k-1}](-sum_beta R(-z)^beta_alpha)`, for `k >= 2`.
///
/// The column sum is `R_1(-z)`, so `alpha` does not enter.
pub fn leaf_weight_dilaton(rm: &RMatrix, _alpha: usize, k: u32, norm: Normalization) -> Result<PuiseuxPoly> {
    if k < 2 {
        return Err(Error::DilatonHeight(k));
    }
    check_height(rm, k - 1)?;
    let c = -rm.column_sum_neg().at(k - 1);
    Ok(match norm {
        Normalization::Twisted => c,
        Normalization::Equivariant => &c * &leaf_factor(rm.orb()),
    })
}

/// `E^{alpha,beta}_{k,l}`, times `|G|^2` in the twisted normalization.
pub fn edge_weight(
    rm: &RMatrix,
    alpha: usize,
    beta: usize,
    k: u32,
    l: u32,
    norm: Normalization,
) -> Result<PuiseuxPoly> {
    let c = rm.edge_coefficient(alpha, beta, k, l)?;
    Ok(match norm {
        Normalization::Twisted => {
            let n = rm.orb().group_order() as i64;
            c.scale_rational(&Rational::from_integer((n * n).into()))
        }
        Normalization::Equivariant => c,
    })
}

/// `|G|^{2g-2} <prod tau_k>_g`, or `(|G| sqrt(e_1))^{2g-2+val} <prod tau_k>_g`.
pub fn vertex_weight(orb: &OrbifoldData, genus: u32, heights: &[u32], norm: Normalization) -> PuiseuxPoly {
    let psi = psi_integral(genus, heights);
    let r = orb.rank();
    match norm {
        Normalization::Twisted => {
            PuiseuxPoly::rational(orb.field(), r, order_power(orb, 2 * genus as i64 - 2) * psi)
        }
        Normalization::Equivariant => {
            let e = 2 * genus as i64 - 2 + heights.len() as i64;
            PuiseuxPoly::term(
                orb.sqrt_e_one().pow(Exponent::from_integer(e)),
                CycRational::from_rational(orb.field(), order_power(orb, e) * psi),
            )
        }
    }
}

/// Product of vertex, edge and dilaton-leaf weights: everything except ordinary leaves.
pub fn graph_core_weight(rm: &RMatrix, graph: &LabeledGraph, norm: Normalization) -> Result<PuiseuxPoly> {
    let orb = rm.orb();
    let mut acc = PuiseuxPoly::one(orb.field(), orb.rank());
    for (v, vert) in graph.vertices.iter().enumerate() {
        let w = vertex_weight(orb, vert.genus, &graph.heights_at(v), norm);
        if w.is_zero() {
            return Ok(PuiseuxPoly::zero());
        }
        acc = &acc * &w;
    }
    for e in &graph.edges {
        let a = graph.vertices[e.0.vertex].marking;
        let b = graph.vertices[e.1.vertex].marking;
        acc = &acc * &edge_weight(rm, a, b, e.0.height, e.1.height, norm)?;
        if acc.is_zero() {
            return Ok(acc);
        }
    }
    for h in &graph.dilaton_leaves {
        let a = graph.vertices[h.vertex].marking;
        acc = &acc * &leaf_weight_dilaton(rm, a, h.height, norm)?;
    }
    Ok(acc)
}

/// The full weight `w~` or `w` of a graph for the given leaf series.
pub fn graph_weight(
    rm: &RMatrix,
    graph: &LabeledGraph,
    ordered: &[InsertionSeries],
    unordered: &InsertionSeries,
    norm: Normalization,
) -> Result<PuiseuxPoly> {
    let mut acc = graph_core_weight(rm, graph, norm)?;
    for (h, u) in graph.ordered_leaves.iter().zip(ordered) {
        if acc.is_zero() {
            return Ok(acc);
        }
        let a = graph.vertices[h.vertex].marking;
        acc = &acc * &leaf_weight_ordinary(rm, a, h.height, u, norm)?;
    }
    for h in &graph.unordered_leaves {
        if acc.is_zero() {
            return Ok(acc);
        }
        let a = graph.vertices[h.vertex].marking;
        acc = &acc * &leaf_weight_ordinary(rm, a, h.height, unordered, norm)?;
    }
    Ok(acc)
}
