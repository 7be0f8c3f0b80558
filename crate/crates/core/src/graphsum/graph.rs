use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// A vertex label: genus and marking `alpha(v)` (a character index).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub genus: u32,
    pub marking: usize,
}

/// A half-edge or leg: the vertex it sits on and its height `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfEdge {
    pub vertex: usize,
    pub height: u32,
}

impl HalfEdge {
    pub fn new(vertex: usize, height: u32) -> Self {
        HalfEdge { vertex, height }
    }
}

/// An edge as its two half-edges, stored with the smaller one first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(pub HalfEdge, pub HalfEdge);

impl Edge {
    pub fn new(a: HalfEdge, b: HalfEdge) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn is_loop(&self) -> bool {
        self.0.vertex == self.1.vertex
    }
}

/// A stable labeled graph with ordered, unordered and dilaton leaves.
///
/// Ordered leaf `j` is `ordered_leaves[j]`. Unordered and dilaton leaves are
/// multisets and are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub ordered_leaves: Vec<HalfEdge>,
    pub unordered_leaves: Vec<HalfEdge>,
    pub dilaton_leaves: Vec<HalfEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct VertexLabel {
    genus: u32,
    marking: usize,
    ordered: Vec<(usize, u32)>,
    unordered: Vec<u32>,
    dilaton: Vec<u32>,
}

type Form = (Vec<VertexLabel>, Vec<((usize, u32), (usize, u32))>);

impl LabeledGraph {
    /// `sum g(v) + |E| - |V| + 1`
    pub fn genus(&self) -> u32 {
        let s: i64 = self.vertices.iter().map(|v| v.genus as i64).sum::<i64>()
            + self.edges.len() as i64
            - self.vertices.len() as i64
            + 1;
        s as u32
    }

    /// Heights of every half-edge and leg at `v`.
    pub fn heights_at(&self, v: usize) -> Vec<u32> {
        let mut out = Vec::new();
        for e in &self.edges {
            for h in [e.0, e.1] {
                if h.vertex == v {
                    out.push(h.height);
                }
            }
        }
        for h in self
            .ordered_leaves
            .iter()
            .chain(&self.unordered_leaves)
            .chain(&self.dilaton_leaves)
        {
            if h.vertex == v {
                out.push(h.height);
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.heights_at(v).len()
    }

    pub fn leaf_count(&self) -> usize {
        self.ordered_leaves.len() + self.unordered_leaves.len() + self.dilaton_leaves.len()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.0.vertex, e.1.vertex), (e.1.vertex, e.0.vertex)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Stability, dimension balance and dilaton heights at every vertex, plus connectedness.
    pub fn is_valid(&self) -> bool {
        if !self.is_connected() || self.dilaton_leaves.iter().any(|h| h.height < 2) {
            return false;
        }
        (0..self.vertices.len()).all(|v| {
            let hs = self.heights_at(v);
            let g = self.vertices[v].genus as i64;
            let val = hs.len() as i64;
            2 * g - 2 + val > 0 && hs.iter().map(|&x| x as i64).sum::<i64>() == 3 * g - 3 + val
        })
    }

    fn label(&self, v: usize) -> VertexLabel {
        let mut ordered: Vec<(usize, u32)> = self
            .ordered_leaves
            .iter()
            .enumerate()
            .filter(|(_, h)| h.vertex == v)
            .map(|(j, h)| (j, h.height))
            .collect();
        ordered.sort_unstable();
        let pick = |leaves: &[HalfEdge]| {
            let mut hs: Vec<u32> = leaves.iter().filter(|h| h.vertex == v).map(|h| h.height).collect();
            hs.sort_unstable();
            hs
        };
        VertexLabel {
            genus: self.vertices[v].genus,
            marking: self.vertices[v].marking,
            ordered,
            unordered: pick(&self.unordered_leaves),
            dilaton: pick(&self.dilaton_leaves),
        }
    }

    /// The form of the graph with old vertex `order[i]` moved to position `i`.
    fn form(&self, labels: &[VertexLabel], order: &[usize]) -> Form {
        let mut pos = vec![0; order.len()];
        for (i, &old) in order.iter().enumerate() {
            pos[old] = i;
        }
        let vl = order.iter().map(|&old| labels[old].clone()).collect();
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let a = (pos[e.0.vertex], e.0.height);
                let b = (pos[e.1.vertex], e.1.height);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort_unstable();
        (vl, edges)
    }

    /// Minimal form over vertex orders, and the number of orders achieving it
    /// (the number of vertex permutations extending to automorphisms).
    fn minimal_form(&self) -> (Form, Vec<usize>, u64) {
        let labels: Vec<VertexLabel> = (0..self.vertices.len()).map(|v| self.label(v)).collect();
        let mut sorted: Vec<usize> = (0..labels.len()).collect();
        sorted.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        let blocks: Vec<Vec<usize>> = sorted
            .iter()
            .copied()
            .chunk_by(|&v| labels[v].clone())
            .into_iter()
            .map(|(_, grp)| grp.collect())
            .collect();

        let block_perms: Vec<Vec<Vec<usize>>> = blocks
            .iter()
            .map(|b| b.iter().copied().permutations(b.len()).collect())
            .collect();

        let mut best: Option<(Form, Vec<usize>)> = None;
        let mut count = 0u64;
        for choice in block_perms.iter().map(|p| p.iter()).multi_cartesian_product() {
            let order: Vec<usize> = choice.into_iter().flatten().copied().collect();
            let f = self.form(&labels, &order);
            match &best {
                Some((bf, _)) if f > *bf => {}
                Some((bf, _)) if f == *bf => count += 1,
                _ => {
                    best = Some((f, order));
                    count = 1;
                }
            }
        }
        if blocks.is_empty() {
            let f = self.form(&labels, &[]);
            return (f, vec![], 1);
        }
        let (f, order) = best.expect("at least one vertex order");
        (f, order, count)
    }

    /// The isomorphic graph with vertices in canonical order and all lists sorted.
    ///
    /// Two graphs are isomorphic exactly when their canonical forms are equal.
    pub fn canonical(&self) -> LabeledGraph {
        let (_, order, _) = self.minimal_form();
        let mut pos = vec![0; order.len()];
        for (i, &old) in order.iter().enumerate() {
            pos[old] = i;
        }
        let mv = |h: &HalfEdge| HalfEdge::new(pos[h.vertex], h.height);
        let mut edges: Vec<Edge> = self.edges.iter().map(|e| Edge::new(mv(&e.0), mv(&e.1))).collect();
        edges.sort_unstable();
        let mut unordered: Vec<HalfEdge> = self.unordered_leaves.iter().map(mv).collect();
        unordered.sort_unstable();
        let mut dilaton: Vec<HalfEdge> = self.dilaton_leaves.iter().map(mv).collect();
        dilaton.sort_unstable();
        LabeledGraph {
            vertices: order.iter().map(|&old| self.vertices[old].clone()).collect(),
            edges,
            ordered_leaves: self.ordered_leaves.iter().map(mv).collect(),
            unordered_leaves: unordered,
            dilaton_leaves: dilaton,
        }
    }

    /// Order of the group of label-preserving automorphisms fixing ordered leaves.
    pub fn aut_order(&self) -> BigInt {
        let (_, _, vertex_part) = self.minimal_form();
        let mut acc = BigInt::from(vertex_part);
        let mut multiplicities = |items: Vec<(usize, u32, usize, u32)>| {
            let mut counts: BTreeMap<(usize, u32, usize, u32), u32> = BTreeMap::new();
            for it in items {
                *counts.entry(it).or_default() += 1;
            }
            for c in counts.values() {
                acc *= (1..=*c).fold(BigInt::one(), |a, i| a * i);
            }
        };
        multiplicities(
            self.edges
                .iter()
                .map(|e| (e.0.vertex, e.0.height, e.1.vertex, e.1.height))
                .collect(),
        );
        multiplicities(self.unordered_leaves.iter().map(|h| (h.vertex, h.height, 0, 0)).collect());
        multiplicities(self.dilaton_leaves.iter().map(|h| (h.vertex, h.height, 0, 0)).collect());
        let flips = self.edges.iter().filter(|e| e.is_loop() && e.0.height == e.1.height).count();
        acc * (BigInt::one() << flips)
    }
}
