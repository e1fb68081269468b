use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, MultiGraph, VertexId};

/// A walk given by its vertex sequence and the edges between consecutive
/// vertices (`edges.len() + 1 == vertices.len()` unless both are empty).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Walk {
    pub fn trivial(v: VertexId) -> Self {
        Walk {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn start(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn end(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> Walk {
        let mut w = self.clone();
        w.vertices.reverse();
        w.edges.reverse();
        w
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &Walk) {
        if self.vertices.is_empty() {
            *self = other.clone();
            return;
        }
        debug_assert_eq!(self.end(), other.start());
        self.vertices.extend(other.vertices.iter().skip(1));
        self.edges.extend(other.edges.iter());
    }

    /// Appends one edge leading to `to`.
    pub fn push(&mut self, e: EdgeId, to: VertexId) {
        self.edges.push(e);
        self.vertices.push(to);
    }

    pub fn is_simple(&self) -> bool {
        let set: BTreeSet<_> = self.vertices.iter().collect();
        set.len() == self.vertices.len()
    }

    pub fn has_repeated_edge(&self) -> bool {
        let set: BTreeSet<_> = self.edges.iter().collect();
        set.len() != self.edges.len()
    }

    /// Removes closed subwalks so that no vertex repeats. The result uses a
    /// subset of the edges and has the same ends.
    pub fn shortcut(&self) -> Walk {
        let mut out = Walk::default();
        let mut pos: HashMap<VertexId, usize> = HashMap::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            if let Some(&p) = pos.get(&v) {
                for u in out.vertices.drain(p + 1..) {
                    pos.remove(&u);
                }
                out.edges.truncate(p);
            } else {
                if i > 0 {
                    out.edges.push(self.edges[i - 1]);
                }
                pos.insert(v, out.vertices.len());
                out.vertices.push(v);
            }
        }
        out
    }

    /// Checks that consecutive vertices are joined by the listed edges in `g`.
    pub fn is_walk_in(&self, g: &MultiGraph) -> bool {
        if self.vertices.is_empty() {
            return self.edges.is_empty();
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        if !g.contains_vertex(self.vertices[0]) {
            return false;
        }
        self.edges.iter().enumerate().all(|(i, &e)| {
            matches!(g.endpoints(e), Ok((a, b))
                if (a, b) == (self.vertices[i].min(self.vertices[i + 1]),
                              self.vertices[i].max(self.vertices[i + 1])))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortcut_removes_cycle() {
        let w = Walk {
            vertices: vec![VertexId(0), VertexId(1), VertexId(2), VertexId(1), VertexId(3)],
            edges: vec![EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)],
        };
        let s = w.shortcut();
        assert_eq!(s.vertices, vec![VertexId(0), VertexId(1), VertexId(3)]);
        assert_eq!(s.edges, vec![EdgeId(0), EdgeId(3)]);
        assert!(s.is_simple());
    }

    #[test]
    fn shortcut_closed_walk_collapses() {
        let w = Walk {
            vertices: vec![VertexId(0), VertexId(1), VertexId(0)],
            edges: vec![EdgeId(0), EdgeId(1)],
        };
        let s = w.shortcut();
        assert_eq!(s.vertices, vec![VertexId(0)]);
        assert!(s.edges.is_empty());
    }
}
