use std::collections::BTreeSet;

use itertools::Itertools;

use super::graph::{Edge, HalfEdge, LabeledGraph, Vertex};
use crate::bgpotential::partitions_into;

/// Compositions of `total` into `parts` nonnegative parts.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Core graph before heights, dilaton leaves and markings.
#[derive(Debug, Clone)]
struct Shape {
    genus: Vec<u32>,
    edges: Vec<(usize, usize)>,
    ordered: Vec<usize>,
    unordered: Vec<u32>,
}

impl Shape {
    fn core_valence(&self, v: usize) -> u32 {
        let e: u32 = self
            .edges
            .iter()
            .map(|&(a, b)| (a == v) as u32 + (b == v) as u32)
            .sum();
        e + self.ordered.iter().filter(|&&x| x == v).count() as u32 + self.unordered[v]
    }

    fn as_graph(&self) -> LabeledGraph {
        LabeledGraph {
            vertices: self.genus.iter().map(|&g| Vertex { genus: g, marking: 0 }).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| Edge::new(HalfEdge::new(a, 0), HalfEdge::new(b, 0)))
                .collect(),
            ordered_leaves: self.ordered.iter().map(|&v| HalfEdge::new(v, 0)).collect(),
            unordered_leaves: self
                .unordered
                .iter()
                .enumerate()
                .flat_map(|(v, &c)| std::iter::repeat_n(HalfEdge::new(v, 0), c as usize))
                .collect(),
            dilaton_leaves: vec![],
        }
    }
}

fn connected(nv: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Stable core graphs of genus `g` with the given leaves, one per isomorphism class.
fn shapes(g: u32, n_ordered: usize, n_unordered: usize) -> Vec<Shape> {
    let legs = n_ordered + n_unordered;
    let chi = 2 * g as i64 - 2 + legs as i64;
    if chi <= 0 {
        return vec![];
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for nv in 1..=chi as usize {
        let pairs: Vec<(usize, usize)> =
            (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        for ne in nv - 1..=g as usize + nv - 1 {
            let gsum = (g as usize + nv - 1 - ne) as u32;
            for edges in pairs.iter().copied().combinations_with_replacement(ne) {
                if !connected(nv, &edges) {
                    continue;
                }
                for genus in compositions(gsum, nv) {
                    for ordered in (0..n_ordered).map(|_| 0..nv).multi_cartesian_product() {
                        for unordered in compositions(n_unordered as u32, nv) {
                            let shape = Shape {
                                genus: genus.clone(),
                                edges: edges.clone(),
                                ordered: ordered.clone(),
                                unordered,
                            };
                            let stable = (0..nv).all(|v| {
                                2 * shape.genus[v] as i64 - 2 + shape.core_valence(v) as i64 > 0
                            });
                            if stable && seen.insert(shape.as_graph().canonical()) {
                                out.push(shape);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Height choices at one vertex.
#[derive(Debug, Clone)]
struct VertexHeights {
    /// one per edge end and ordered leaf, in slot order
    slots: Vec<u32>,
    unordered: Vec<u32>,
    dilaton: Vec<u32>,
}

fn vertex_height_choices(dim: u32, slots: usize, unordered: usize, dilaton: usize) -> Vec<VertexHeights> {
    let mut out = Vec::new();
    let dil_min = 2 * dilaton as u32;
    if dim < dil_min {
        return out;
    }
    for dil_extra in 0..=dim - dil_min {
        let dil: Vec<Vec<u32>> = partitions_into(dil_extra, dilaton, dil_extra)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x + 2).collect())
            .collect();
        let rest = dim - dil_min - dil_extra;
        for un_sum in 0..=rest {
            let un = partitions_into(un_sum, unordered, un_sum);
            let sl = compositions(rest - un_sum, slots);
            for d in &dil {
                for u in &un {
                    for s in &sl {
                        out.push(VertexHeights {
                            slots: s.clone(),
                            unordered: u.clone(),
                            dilaton: d.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// All stable labeled graphs of genus `g` with `n_ordered` ordered and
/// `n_unordered` unordered ordinary leaves and markings in `0..group_order`,
/// one per isomorphism class, in canonical form.
pub fn enumerate_graphs(group_order: usize, g: u32, n_ordered: usize, n_unordered: usize) -> Vec<LabeledGraph> {
    let mut out = Vec::new();
    for shape in shapes(g, n_ordered, n_unordered) {
        let nv = shape.genus.len();
        let core: Vec<u32> = (0..nv).map(|v| shape.core_valence(v)).collect();
        // slot layout per vertex: edge ends in edge order, then ordered leaves
        let mut slot_owner: Vec<Vec<(bool, usize, usize)>> = vec![Vec::new(); nv];
        for (i, &(a, b)) in shape.edges.iter().enumerate() {
            slot_owner[a].push((true, i, 0));
            slot_owner[b].push((true, i, 1));
        }
        for (j, &v) in shape.ordered.iter().enumerate() {
            slot_owner[v].push((false, j, 0));
        }
        let max_dil: Vec<u32> = (0..nv)
            .map(|v| (3 * shape.genus[v] + core[v]).saturating_sub(3))
            .collect();
        let mut seen = BTreeSet::new();
        for dil in max_dil.iter().map(|&m| 0..=m).multi_cartesian_product() {
            let per_vertex: Vec<Vec<VertexHeights>> = (0..nv)
                .map(|v| {
                    let val = core[v] + dil[v];
                    let dim = 3 * shape.genus[v] + val - 3;
                    vertex_height_choices(
                        dim,
                        slot_owner[v].len(),
                        shape.unordered[v] as usize,
                        dil[v] as usize,
                    )
                })
                .collect();
            if per_vertex.iter().any(Vec::is_empty) {
                continue;
            }
            for choice in per_vertex.iter().map(|c| c.iter()).multi_cartesian_product() {
                let mut edge_ends = vec![[HalfEdge::new(0, 0); 2]; shape.edges.len()];
                let mut ordered = vec![HalfEdge::new(0, 0); shape.ordered.len()];
                let mut unordered = Vec::new();
                let mut dilaton = Vec::new();
                for (v, hc) in choice.iter().enumerate() {
                    for (&(is_edge, idx, side), &k) in slot_owner[v].iter().zip(&hc.slots) {
                        if is_edge {
                            edge_ends[idx][side] = HalfEdge::new(v, k);
                        } else {
                            ordered[idx] = HalfEdge::new(v, k);
                        }
                    }
                    unordered.extend(hc.unordered.iter().map(|&k| HalfEdge::new(v, k)));
                    dilaton.extend(hc.dilaton.iter().map(|&k| HalfEdge::new(v, k)));
                }
                let edges: Vec<Edge> = edge_ends.iter().map(|e| Edge::new(e[0], e[1])).collect();
                for marking in (0..nv).map(|_| 0..group_order).multi_cartesian_product() {
                    let graph = LabeledGraph {
                        vertices: (0..nv)
                            .map(|v| Vertex {
                                genus: shape.genus[v],
                                marking: marking[v],
                            })
                            .collect(),
                        edges: edges.clone(),
                        ordered_leaves: ordered.clone(),
                        unordered_leaves: unordered.clone(),
                        dilaton_leaves: dilaton.clone(),
                    };
                    let canon = graph.canonical();
                    if seen.insert(canon.clone()) {
                        out.push(canon);
                    }
                }
            }
        }
    }
    out
}
