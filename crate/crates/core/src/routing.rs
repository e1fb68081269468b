//! Splitting a linkage problem along the block-cut tree.

use serde::{Deserialize, Serialize};

use crate::connectivity::{block_cut_tree, BlockCutTree, BlockTreeNode};
use crate::error::Result;
use crate::graph::{MultiGraph, VertexId};
use crate::linkage::{solve_finite, Infeasibility, Linkage, LinkageInstance, SolverConfig, Verdict};
use crate::walk::Walk;

/// Demands routed inside one block.
#[derive(Debug, Clone)]
pub struct BlockInstance {
    pub block: usize,
    pub instance: LinkageInstance,
}

/// Segment `pair` of block instance `instance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRef {
    pub instance: usize,
    pub pair: usize,
}

#[derive(Debug, Clone)]
pub struct BlockRouting {
    pub tree: BlockCutTree,
    pub instances: Vec<BlockInstance>,
    /// For each original pair, its segments from `s_i` to `t_i`.
    pub plan: Vec<Vec<SegmentRef>>,
}

fn node_of(tree: &BlockCutTree, v: VertexId) -> BlockTreeNode {
    if tree.cut_vertices.contains(&v) {
        BlockTreeNode::Cut(v)
    } else {
        BlockTreeNode::Block(tree.blocks_of(v)[0])
    }
}

/// Follows the tree path of every pair and hands each visited block the
/// sub-pair between its entry and exit vertices.
pub fn route_via_blocks(g: &MultiGraph, pairs: &[(VertexId, VertexId)]) -> Result<BlockRouting> {
    let tree = block_cut_tree(g)?;
    let mut demands: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); tree.blocks.len()];
    let mut raw_plan: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(s, t) in pairs {
        for v in [s, t] {
            if !g.contains_vertex(v) {
                return Err(crate::Error::UnknownVertex(v));
            }
        }
        let path = tree.path(node_of(&tree, s), node_of(&tree, t)).ok_or(crate::Error::DisconnectedGraph)?;
        let mut segs = Vec::new();
        for (i, node) in path.iter().enumerate() {
            let BlockTreeNode::Block(b) = *node else { continue };
            let entry = match i.checked_sub(1).map(|j| path[j]) {
                Some(BlockTreeNode::Cut(c)) => c,
                _ => s,
            };
            let exit = match path.get(i + 1) {
                Some(&BlockTreeNode::Cut(c)) => c,
                _ => t,
            };
            segs.push((b, demands[b].len()));
            demands[b].push((entry, exit));
        }
        raw_plan.push(segs);
    }
    let mut slot = vec![usize::MAX; tree.blocks.len()];
    let mut instances = Vec::new();
    for (b, d) in demands.into_iter().enumerate() {
        if d.is_empty() {
            continue;
        }
        slot[b] = instances.len();
        let sub = g.induced(&tree.blocks[b].vertices);
        instances.push(BlockInstance { block: b, instance: LinkageInstance::new(sub, d)? });
    }
    let plan = raw_plan
        .into_iter()
        .map(|segs| segs.into_iter().map(|(b, pair)| SegmentRef { instance: slot[b], pair }).collect())
        .collect();
    Ok(BlockRouting { tree, instances, plan })
}

impl BlockRouting {
    /// Concatenates per-block paths into one walk per pair, then shortcuts.
    pub fn reassemble(&self, solved: &[Linkage]) -> Linkage {
        let paths = self
            .plan
            .iter()
            .map(|segs| {
                let mut walk = Walk::default();
                for seg in segs {
                    let (entry, _) = self.instances[seg.instance].instance.pairs[seg.pair];
                    let mut piece = solved[seg.instance].paths[seg.pair].clone();
                    if piece.start() != Some(entry) {
                        piece = piece.reversed();
                    }
                    if walk.vertices.is_empty() {
                        walk = piece;
                    } else {
                        walk.extend(&piece);
                    }
                }
                walk.shortcut()
            })
            .collect();
        Linkage { paths }
    }
}

/// Solves every block instance and glues the results.
pub fn solve_via_blocks(g: &MultiGraph, pairs: &[(VertexId, VertexId)], cfg: SolverConfig) -> Result<Verdict> {
    let routing = route_via_blocks(g, pairs)?;
    let mut solved = Vec::new();
    for bi in &routing.instances {
        match solve_finite(&bi.instance, cfg)? {
            Verdict::Linked(l) => solved.push(l),
            Verdict::Infeasible(inf) => {
                return Ok(Verdict::Infeasible(Infeasibility { cut: inf.cut, explored: inf.explored }));
            }
        }
    }
    Ok(Verdict::Linked(routing.reassemble(&solved)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::verify_linkage;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn two_connected_graph_is_one_instance() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let pairs = vec![(v(0), v(2)), (v(1), v(3))];
        let r = route_via_blocks(&g, &pairs).unwrap();
        assert_eq!(r.instances.len(), 1);
        assert_eq!(r.instances[0].instance.pairs, pairs);
    }

    #[test]
    fn bowtie_splits_at_the_cut_vertex() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        let r = route_via_blocks(&g, &[(v(0), v(4))]).unwrap();
        assert_eq!(r.instances.len(), 2);
        for bi in &r.instances {
            let (a, b) = bi.instance.pairs[0];
            assert!(a == v(2) || b == v(2));
        }
    }

    #[test]
    fn chain_of_three_blocks_reassembles() {
        // two triangles joined by a bridge
        let g = MultiGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        let pairs = vec![(v(0), v(5))];
        let r = route_via_blocks(&g, &pairs).unwrap();
        assert_eq!(r.instances.len(), 3);
        let verdict = solve_via_blocks(&g, &pairs, SolverConfig::default()).unwrap();
        assert!(verify_linkage(&g, &pairs, verdict.linkage().unwrap()).ok());
    }
}
