//! Graph-sum evaluation of twisted and equivariant correlators.
//!
//! A correlator of genus `g` with `n` ordered insertions and `n'` copies of a
//! shared unordered insertion is the sum, over stable labeled graphs, of the
//! product of vertex, edge and leaf weights divided by `|Aut|`; the result is
//! `<u_1, .., u_n, u, .., u>_g / n'!`.

mod enumerate;
mod graph;
mod weights;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

pub use enumerate::enumerate_graphs;
pub use graph::{Edge, HalfEdge, LabeledGraph, Vertex};
pub use weights::{
    edge_weight, graph_core_weight, graph_weight, leaf_linear_form, leaf_weight_dilaton,
    leaf_weight_ordinary, vertex_weight, Normalization,
};

use crate::bgpotential::{PotentialKey, TruncatedPotential, Var};
use crate::error::Result;
use crate::exactalg::{PuiseuxPoly, Rational};
use crate::groupchar::{ClassTag, Frame, OrbifoldData};
use crate::rmatrix::RMatrix;

/// A descendant series `sum_{gamma,a} u^gamma_a z^a phi_gamma` with finite support.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InsertionSeries {
    terms: BTreeMap<(usize, u32), PuiseuxPoly>,
}

impl InsertionSeries {
    /// `z^a phi_gamma` with coefficient one.
    pub fn single(orb: &OrbifoldData, gamma: usize, a: u32) -> Self {
        let mut s = InsertionSeries::default();
        s.add_term(gamma, a, PuiseuxPoly::one(orb.field(), orb.rank()));
        s
    }

    /// `tau_a(class)` expanded in the frame matching `norm`.
    pub fn class(orb: &OrbifoldData, a: u32, tag: &ClassTag, norm: Normalization) -> Self {
        let frame = match norm {
            Normalization::Twisted => Frame::Canonical,
            Normalization::Equivariant => Frame::NormalizedCanonical,
        };
        let mut s = InsertionSeries::default();
        for (gamma, c) in orb.frame_coordinates(tag, frame).into_iter().enumerate() {
            s.add_term(gamma, a, c);
        }
        s
    }

    pub fn add_term(&mut self, gamma: usize, a: u32, c: PuiseuxPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((gamma, a)).or_default();
        slot.add_assign_ref(&c);
        if slot.is_zero() {
            self.terms.remove(&(gamma, a));
        }
    }

    pub fn get(&self, gamma: usize, a: u32) -> Option<&PuiseuxPoly> {
        self.terms.get(&(gamma, a))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, u32), &PuiseuxPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A request `<u_1, .., u_n, u, .., u>_{g, n+n'} / n'!`.
#[derive(Debug, Clone)]
pub struct CorrelatorRequest {
    pub orb: Arc<OrbifoldData>,
    pub genus: u32,
    pub ordered: Vec<InsertionSeries>,
    pub unordered: InsertionSeries,
    pub unordered_count: usize,
    pub normalization: Normalization,
    /// Overrides the default truncation order `3g - 3 + n + n' + 1`.
    pub order: Option<u32>,
}

impl CorrelatorRequest {
    pub fn new(orb: Arc<OrbifoldData>, genus: u32, normalization: Normalization) -> Self {
        CorrelatorRequest {
            orb,
            genus,
            ordered: Vec::new(),
            unordered: InsertionSeries::default(),
            unordered_count: 0,
            normalization,
            order: None,
        }
    }

    pub fn with_ordered(mut self, u: InsertionSeries) -> Self {
        self.ordered.push(u);
        self
    }

    pub fn with_unordered(mut self, u: InsertionSeries, count: usize) -> Self {
        self.unordered = u;
        self.unordered_count = count;
        self
    }

    pub fn points(&self) -> usize {
        self.ordered.len() + self.unordered_count
    }

    pub fn truncation_order(&self) -> u32 {
        self.order
            .unwrap_or_else(|| default_order(self.genus, self.points()))
    }
}

/// `3g - 3 + n + 1`: one more than the largest height that can occur.
pub fn default_order(genus: u32, points: usize) -> u32 {
    (3 * genus as i64 - 3 + points as i64 + 1).max(1) as u32
}

/// Result of a graph sum with bookkeeping.
#[derive(Debug, Clone)]
pub struct CorrelatorOutcome {
    pub value: PuiseuxPoly,
    pub graph_count: usize,
    /// `|Aut|` to number of graphs with that automorphism order.
    pub aut_histogram: BTreeMap<BigInt, usize>,
}

/// Enumerated graphs with their automorphism orders and a shared R-matrix.
pub struct GraphSum {
    rm: Arc<RMatrix>,
    genus: u32,
    n_ordered: usize,
    n_unordered: usize,
    graphs: Vec<(LabeledGraph, BigInt)>,
}

impl GraphSum {
    pub fn new(orb: Arc<OrbifoldData>, genus: u32, n_ordered: usize, n_unordered: usize) -> Self {
        let order = default_order(genus, n_ordered + n_unordered);
        Self::with_rmatrix(Arc::new(RMatrix::new(orb, order)), genus, n_ordered, n_unordered)
    }

    pub fn with_rmatrix(rm: Arc<RMatrix>, genus: u32, n_ordered: usize, n_unordered: usize) -> Self {
        let graphs = enumerate_graphs(rm.orb().group_order(), genus, n_ordered, n_unordered)
            .into_par_iter()
            .map(|g| {
                let aut = g.aut_order();
                (g, aut)
            })
            .collect();
        GraphSum {
            rm,
            genus,
            n_ordered,
            n_unordered,
            graphs,
        }
    }

    pub fn rmatrix(&self) -> &Arc<RMatrix> {
        &self.rm
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn leaf_counts(&self) -> (usize, usize) {
        (self.n_ordered, self.n_unordered)
    }

    pub fn graphs(&self) -> &[(LabeledGraph, BigInt)] {
        &self.graphs
    }

    pub fn aut_histogram(&self) -> BTreeMap<BigInt, usize> {
        let mut h = BTreeMap::new();
        for (_, a) in &self.graphs {
            *h.entry(a.clone()).or_default() += 1;
        }
        h
    }

    /// `sum_Gamma w(Gamma)/|Aut(Gamma)|` for concrete leaf series.
    pub fn evaluate(
        &self,
        ordered: &[InsertionSeries],
        unordered: &InsertionSeries,
        norm: Normalization,
    ) -> Result<PuiseuxPoly> {
        assert_eq!(ordered.len(), self.n_ordered, "ordered insertion count");
        let parts: Vec<PuiseuxPoly> = self
            .graphs
            .par_iter()
            .map(|(g, aut)| {
                let w = graph_weight(&self.rm, g, ordered, unordered, norm)?;
                Ok(w.scale_rational(&Rational::new(BigInt::one(), aut.clone())))
            })
            .collect::<Result<_>>()?;
        let mut acc = PuiseuxPoly::zero();
        for p in &parts {
            acc.add_assign_ref(p);
        }
        Ok(acc)
    }

    /// The genus-`g`, `n'`-point part of `log D` as a polynomial in the `u^beta_a`.
    ///
    /// Requires a sum built without ordered leaves.
    pub fn symbolic_potential(&self, norm: Normalization) -> Result<TruncatedPotential> {
        assert_eq!(self.n_ordered, 0, "symbolic potentials use unordered leaves only");
        let parts: Vec<HashMap<Vec<Var>, PuiseuxPoly>> = self
            .graphs
            .par_iter()
            .map(|(g, aut)| {
                let core = graph_core_weight(&self.rm, g, norm)?;
                let mut poly: HashMap<Vec<Var>, PuiseuxPoly> = HashMap::new();
                if core.is_zero() {
                    return Ok(poly);
                }
                poly.insert(Vec::new(), core.scale_rational(&Rational::new(BigInt::one(), aut.clone())));
                for h in &g.unordered_leaves {
                    let form = leaf_linear_form(&self.rm, g.vertices[h.vertex].marking, h.height, norm)?;
                    let mut next: HashMap<Vec<Var>, PuiseuxPoly> = HashMap::new();
                    for (key, c) in &poly {
                        for (var, x) in &form {
                            let mut k = key.clone();
                            let pos = k.partition_point(|v| v < var);
                            k.insert(pos, *var);
                            next.entry(k).or_default().add_assign_ref(&(c * x));
                        }
                    }
                    next.retain(|_, v| !v.is_zero());
                    poly = next;
                }
                Ok(poly)
            })
            .collect::<Result<_>>()?;
        let mut pot = TruncatedPotential::default();
        for part in parts {
            for (vars, c) in part {
                pot.add_term(PotentialKey::new(self.genus, vars), &c);
            }
        }
        Ok(pot)
    }
}

/// The graph sum for `request`, with graph count and `|Aut|` histogram.
pub fn correlator_detailed(request: &CorrelatorRequest) -> Result<CorrelatorOutcome> {
    let rm = Arc::new(RMatrix::new(request.orb.clone(), request.truncation_order()));
    let sum = GraphSum::with_rmatrix(rm, request.genus, request.ordered.len(), request.unordered_count);
    let value = sum.evaluate(&request.ordered, &request.unordered, request.normalization)?;
    Ok(CorrelatorOutcome {
        value,
        graph_count: sum.graphs().len(),
        aut_histogram: sum.aut_histogram(),
    })
}

/// `<u_1, .., u_n, u, .., u>_g / n'!` by the graph sum.
pub fn correlator(request: &CorrelatorRequest) -> Result<PuiseuxPoly> {
    Ok(correlator_detailed(request)?.value)
}
