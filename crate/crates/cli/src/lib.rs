//! Job configuration, result documents and the self-check driver behind the
//! `orbgw` binary.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use orbgw_core::exactalg::{parse_rational, TermRecord};
use orbgw_core::graphsum::{graph_weight, GraphSum};
use orbgw_core::groupchar::Element;
use orbgw_core::qrroracle::oracle_correlator;
use orbgw_core::{
    ClassTag, CorrelatorRequest, InsertionSeries, LabeledGraph, Normalization, OrbifoldData, PuiseuxPoly, RMatrix,
};

pub mod selfcheck;

pub const VERSION: &str = concat!("orbgw ", env!("CARGO_PKG_VERSION"));

/// Basis a single insertion class is named in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    Unit,
    UnitBar,
    Phi,
    PhiBar,
}

/// A coefficient: either a rational string or a full Puiseux polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Rational(String),
    Poly(Vec<TermRecord>),
}

/// One term `c z^a phi_gamma` of an insertion series, in the frame matching the normalization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub character: Vec<u32>,
    pub a: u32,
    pub coeff: CoeffSpec,
}

/// An insertion: a single class `z^a x` or an explicit series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InsertionSpec {
    Class {
        a: u32,
        tag: BasisTag,
        /// element residues for `unit`/`unit_bar`, character residues for `phi`/`phi_bar`
        residues: Vec<u32>,
    },
    Series { series: Vec<SeriesTerm> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnorderedSpec {
    pub count: usize,
    pub insertion: InsertionSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobConfig {
    pub group: Vec<u32>,
    pub action: Vec<Vec<u32>>,
    pub genus: u32,
    #[serde(default)]
    pub ordered: Vec<InsertionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unordered: Option<UnorderedSpec>,
    pub normalization: Normalization,
    /// overrides the R-matrix truncation order
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default)]
    pub verify_oracle: bool,
    #[serde(default)]
    pub emit_graphs: bool,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid job configuration")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn orbifold(&self) -> Result<Arc<OrbifoldData>> {
        Ok(Arc::new(OrbifoldData::build(&self.group, &self.action)?))
    }

    pub fn request(&self) -> Result<CorrelatorRequest> {
        let orb = self.orbifold()?;
        let norm = self.normalization;
        let mut req = CorrelatorRequest::new(orb.clone(), self.genus, norm);
        for spec in &self.ordered {
            req = req.with_ordered(insertion(&orb, spec, norm)?);
        }
        if let Some(u) = &self.unordered {
            req = req.with_unordered(insertion(&orb, &u.insertion, norm)?, u.count);
        }
        if let Some(order) = self.order {
            let needed = req.truncation_order();
            if order < needed {
                bail!("truncation order {order} is below the required {needed}");
            }
        }
        req.order = self.order;
        Ok(req)
    }
}

fn group_index(orb: &OrbifoldData, residues: &[u32]) -> Result<usize> {
    if residues.len() != orb.orders().len() {
        bail!(
            "residue vector {residues:?} does not match group {:?}",
            orb.orders()
        );
    }
    if let Some((x, n)) = residues.iter().zip(orb.orders()).find(|(x, n)| x >= n) {
        bail!("residue {x} out of range for Z/{n}");
    }
    Ok(orb.index_of(&Element(residues.to_vec())))
}

fn coefficient(orb: &OrbifoldData, c: &CoeffSpec) -> Result<PuiseuxPoly> {
    Ok(match c {
        CoeffSpec::Rational(s) => PuiseuxPoly::rational(orb.field(), orb.rank(), parse_rational(s)?),
        CoeffSpec::Poly(records) => PuiseuxPoly::from_records(records, orb.field())?,
    })
}

fn insertion(orb: &OrbifoldData, spec: &InsertionSpec, norm: Normalization) -> Result<InsertionSeries> {
    match spec {
        InsertionSpec::Class { a, tag, residues } => {
            let i = group_index(orb, residues)?;
            let tag = match tag {
                BasisTag::Unit => ClassTag::Unit(i),
                BasisTag::UnitBar => ClassTag::UnitBar(i),
                BasisTag::Phi => ClassTag::Phi(i),
                BasisTag::PhiBar => ClassTag::PhiBar(i),
            };
            Ok(InsertionSeries::class(orb, *a, &tag, norm))
        }
        InsertionSpec::Series { series } => {
            let mut u = InsertionSeries::default();
            for t in series {
                u.add_term(group_index(orb, &t.character)?, t.a, coefficient(orb, &t.coeff)?);
            }
            Ok(u)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub value: Vec<TermRecord>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub graph: LabeledGraph,
    pub automorphisms: String,
    /// full weight before dividing by the automorphism count
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<TermRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatorDocument {
    pub version: String,
    pub genus: u32,
    pub normalization: Normalization,
    pub result: Vec<TermRecord>,
    pub graph_count: usize,
    /// `|Aut|` -> number of graphs
    pub aut_histogram: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphs: Option<Vec<GraphRecord>>,
}

impl CorrelatorDocument {
    /// False only when an oracle comparison ran and disagreed.
    pub fn passed(&self) -> bool {
        self.oracle.as_ref().is_none_or(|o| o.agrees)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphsDocument {
    pub version: String,
    pub genus: u32,
    pub ordered_leaves: usize,
    pub unordered_leaves: usize,
    pub group_order: usize,
    pub graph_count: usize,
    pub aut_histogram: BTreeMap<String, usize>,
    pub graphs: Vec<GraphRecord>,
}

fn histogram(sum: &GraphSum) -> BTreeMap<String, usize> {
    sum.aut_histogram().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn run_correlator(config: &JobConfig) -> Result<CorrelatorDocument> {
    let req = config.request()?;
    let rm = Arc::new(RMatrix::new(req.orb.clone(), req.truncation_order()));
    let sum = GraphSum::with_rmatrix(rm.clone(), req.genus, req.ordered.len(), req.unordered_count);
    let value = sum.evaluate(&req.ordered, &req.unordered, req.normalization)?;
    let oracle = if config.verify_oracle {
        let o = oracle_correlator(&req)?;
        Some(OracleVerdict {
            agrees: o == value,
            value: o.to_records(),
        })
    } else {
        None
    };
    let graphs = if config.emit_graphs {
        let mut out = Vec::new();
        for (graph, aut) in sum.graphs() {
            let w = graph_weight(&rm, graph, &req.ordered, &req.unordered, req.normalization)?;
            out.push(GraphRecord {
                graph: graph.clone(),
                automorphisms: aut.to_string(),
                weight: Some(w.to_records()),
            });
        }
        Some(out)
    } else {
        None
    };
    Ok(CorrelatorDocument {
        version: VERSION.to_string(),
        genus: req.genus,
        normalization: req.normalization,
        result: value.to_records(),
        graph_count: sum.graphs().len(),
        aut_histogram: histogram(&sum),
        oracle,
        graphs,
    })
}

/// Enumeration only: the graphs the correlator of `config` would sum over.
pub fn run_graphs(config: &JobConfig) -> Result<GraphsDocument> {
    let orb = config.orbifold()?;
    let n_unordered = config.unordered.as_ref().map_or(0, |u| u.count);
    let sum = GraphSum::new(orb.clone(), config.genus, config.ordered.len(), n_unordered);
    Ok(GraphsDocument {
        version: VERSION.to_string(),
        genus: config.genus,
        ordered_leaves: config.ordered.len(),
        unordered_leaves: n_unordered,
        group_order: orb.group_order(),
        graph_count: sum.graphs().len(),
        aut_histogram: histogram(&sum),
        graphs: sum
            .graphs()
            .iter()
            .map(|(graph, aut)| GraphRecord {
                graph: graph.clone(),
                automorphisms: aut.to_string(),
                weight: None,
            })
            .collect(),
    })
}
