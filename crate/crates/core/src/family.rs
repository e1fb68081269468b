//! Finitely presented locally finite infinite graphs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// A vertex of a family: lattice position plus cell index within the period.
/// For level trees `pos = [level, index]` and `cell = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexKey {
    pub pos: [i64; 2],
    pub cell: u32,
}

impl VertexKey {
    pub const ORIGIN: VertexKey = VertexKey { pos: [0, 0], cell: 0 };

    pub fn new(x: i64, y: i64, cell: u32) -> Self {
        VertexKey { pos: [x, y], cell }
    }
}

impl fmt::Display for VertexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})#{}", self.pos[0], self.pos[1], self.cell)
    }
}

/// An edge is named by the vertex it is anchored at and the template index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub anchor: VertexKey,
    pub template: u32,
}

/// Joins `(p, from)` to `(p + offset, to)` for every lattice point `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeTemplate {
    pub from: u32,
    pub to: u32,
    pub offset: [i64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPresentation {
    /// 1 (second coordinate fixed at 0) or 2.
    pub dim: u8,
    pub cells: u32,
    pub templates: Vec<EdgeTemplate>,
}

impl PeriodicPresentation {
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) || self.cells == 0 {
            return Err(Error::PreconditionViolated("dim must be 1 or 2 and cells > 0".into()));
        }
        for t in &self.templates {
            if t.from >= self.cells || t.to >= self.cells {
                return Err(Error::PreconditionViolated(format!("template cell out of range: {t:?}")));
            }
            if t.from == t.to && t.offset == [0, 0] {
                return Err(Error::PreconditionViolated("template would create a loop".into()));
            }
            if self.dim == 1 && t.offset[1] != 0 {
                return Err(Error::PreconditionViolated("1-dimensional template with y offset".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    Periodic(PeriodicPresentation),
    /// Rooted tree with every vertex of degree `d` in the tree, plus a cycle
    /// through each level of size at least 3.
    LevelTree { d: u32 },
}

/// A named generator with parameters, answering neighbour queries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LazyFamily {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub kind: FamilyKind,
}

/// `{family, params, roots}` as read from a descriptor file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub roots: Vec<VertexKey>,
}

fn param_u32(params: &BTreeMap<String, Value>, key: &str, default: u32) -> Result<u32> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| Error::Parse(format!("parameter {key} must be a small non-negative integer"))),
    }
}

impl LazyFamily {
    /// The square grid Z², each edge with multiplicity `mult`.
    pub fn grid(mult: u32) -> Self {
        let mut templates = Vec::new();
        for _ in 0..mult.max(1) {
            templates.push(EdgeTemplate { from: 0, to: 0, offset: [1, 0] });
            templates.push(EdgeTemplate { from: 0, to: 0, offset: [0, 1] });
        }
        LazyFamily {
            name: "grid".into(),
            params: BTreeMap::from([("multiplicity".into(), Value::from(mult.max(1)))]),
            kind: FamilyKind::Periodic(PeriodicPresentation { dim: 2, cells: 1, templates }),
        }
    }

    /// Two-ended ladder: the cylinder C_w × Z (each rung is a w-cycle).
    pub fn ladder(width: u32) -> Result<Self> {
        if width < 2 {
            return Err(Error::PreconditionViolated("ladder width must be at least 2".into()));
        }
        let mut templates = Vec::new();
        for i in 0..width {
            templates.push(EdgeTemplate { from: i, to: i, offset: [1, 0] });
        }
        for i in 0..width {
            if width == 2 && i == 1 {
                break;
            }
            templates.push(EdgeTemplate { from: i, to: (i + 1) % width, offset: [0, 0] });
        }
        if width == 2 {
            templates.push(EdgeTemplate { from: 0, to: 1, offset: [0, 0] });
        }
        Ok(LazyFamily {
            name: "ladder".into(),
            params: BTreeMap::from([("width".into(), Value::from(width))]),
            kind: FamilyKind::Periodic(PeriodicPresentation { dim: 1, cells: width, templates }),
        })
    }

    pub fn tree_levels(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::PreconditionViolated("tree degree must be at least 2".into()));
        }
        Ok(LazyFamily {
            name: "tree-levels".into(),
            params: BTreeMap::from([("d".into(), Value::from(d))]),
            kind: FamilyKind::LevelTree { d },
        })
    }

    pub fn periodic(p: PeriodicPresentation) -> Result<Self> {
        p.validate()?;
        Ok(LazyFamily {
            name: "periodic".into(),
            params: BTreeMap::from([(
                "presentation".into(),
                serde_json::to_value(&p).map_err(|e| Error::Internal(e.to_string()))?,
            )]),
            kind: FamilyKind::Periodic(p),
        })
    }

    /// Looks up a registry family by name.
    pub fn from_name(name: &str, params: &BTreeMap<String, Value>) -> Result<Self> {
        match name {
            "grid" => Ok(Self::grid(param_u32(params, "multiplicity", 1)?)),
            "ladder" => Self::ladder(param_u32(params, "width", 5)?),
            "tree-levels" => Self::tree_levels(param_u32(params, "d", 3)?),
            "periodic" => {
                let p = params
                    .get("presentation")
                    .ok_or_else(|| Error::Parse("periodic family needs a presentation".into()))?;
                let p: PeriodicPresentation =
                    serde_json::from_value(p.clone()).map_err(|e| Error::Parse(e.to_string()))?;
                Self::periodic(p)
            }
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }

    pub fn from_descriptor(d: &FamilyDescriptor) -> Result<(Self, Vec<VertexKey>)> {
        let f = Self::from_name(&d.family, &d.params)?;
        let roots = if d.roots.is_empty() { vec![f.origin()] } else { d.roots.clone() };
        for r in &roots {
            if !f.contains(r) {
                return Err(Error::Parse(format!("root {r} is not a vertex of {}", f.name)));
            }
        }
        Ok((f, roots))
    }

    pub fn descriptor(&self, roots: &[VertexKey]) -> FamilyDescriptor {
        FamilyDescriptor {
            family: self.name.clone(),
            params: self.params.clone(),
            roots: roots.to_vec(),
        }
    }

    pub fn origin(&self) -> VertexKey {
        VertexKey::ORIGIN
    }

    /// Whether `v` names a vertex of the family.
    pub fn contains(&self, v: &VertexKey) -> bool {
        match &self.kind {
            FamilyKind::Periodic(p) => v.cell < p.cells && (p.dim == 2 || v.pos[1] == 0),
            FamilyKind::LevelTree { d } => {
                v.cell == 0
                    && v.pos[0] >= 0
                    && v.pos[1] >= 0
                    && level_size(*d, v.pos[0]).is_some_and(|n| v.pos[1] < n)
            }
        }
    }

    /// Edges at `v` with their other ends, in template order.
    pub fn incident(&self, v: &VertexKey) -> Vec<(EdgeKey, VertexKey)> {
        let mut out = Vec::new();
        match &self.kind {
            FamilyKind::Periodic(p) => {
                for (i, t) in p.templates.iter().enumerate() {
                    let i = i as u32;
                    if t.from == v.cell {
                        let to = VertexKey {
                            pos: [v.pos[0] + t.offset[0], v.pos[1] + t.offset[1]],
                            cell: t.to,
                        };
                        out.push((EdgeKey { anchor: *v, template: i }, to));
                    }
                    if t.to == v.cell {
                        let from = VertexKey {
                            pos: [v.pos[0] - t.offset[0], v.pos[1] - t.offset[1]],
                            cell: t.from,
                        };
                        out.push((EdgeKey { anchor: from, template: i }, from));
                    }
                }
            }
            FamilyKind::LevelTree { d } => {
                let (level, idx) = (v.pos[0], v.pos[1]);
                let children = if level == 0 { *d as i64 } else { *d as i64 - 1 };
                if level > 0 {
                    let parent_children = if level == 1 { *d as i64 } else { *d as i64 - 1 };
                    let parent = VertexKey::new(level - 1, idx / parent_children, 0);
                    out.push((EdgeKey { anchor: *v, template: 0 }, parent));
                }
                for c in 0..children {
                    let child = VertexKey::new(level + 1, idx * children + c, 0);
                    out.push((EdgeKey { anchor: child, template: 0 }, child));
                }
                if let Some(n) = level_size(*d, level).filter(|&n| n >= 3) {
                    let next = VertexKey::new(level, (idx + 1) % n, 0);
                    let prev = VertexKey::new(level, (idx + n - 1) % n, 0);
                    out.push((EdgeKey { anchor: *v, template: 1 }, next));
                    out.push((EdgeKey { anchor: prev, template: 1 }, prev));
                }
            }
        }
        out
    }

    pub fn degree(&self, v: &VertexKey) -> usize {
        self.incident(v).len()
    }
}

fn level_size(d: u32, level: i64) -> Option<i64> {
    if level == 0 {
        return Some(1);
    }
    let b = (d as i64) - 1;
    let mut n = d as i64;
    for _ in 1..level {
        n = n.checked_mul(b)?;
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric(f: &LazyFamily, v: &VertexKey) {
        for (e, w) in f.incident(v) {
            assert!(f.contains(&w), "{w} not a vertex");
            let back = f.incident(&w);
            assert!(back.contains(&(e, *v)), "edge {e:?} at {v} missing from {w}");
        }
    }

    #[test]
    fn grid_is_four_regular_and_symmetric() {
        let f = LazyFamily::grid(1);
        let o = f.origin();
        assert_eq!(f.degree(&o), 4);
        symmetric(&f, &o);
        symmetric(&f, &VertexKey::new(-3, 7, 0));
        assert_eq!(LazyFamily::grid(2).degree(&o), 8);
    }

    #[test]
    fn ladder_is_four_regular() {
        let f = LazyFamily::ladder(5).unwrap();
        for c in 0..5 {
            let v = VertexKey::new(2, 0, c);
            assert_eq!(f.degree(&v), 4);
            symmetric(&f, &v);
        }
        let two = LazyFamily::ladder(2).unwrap();
        assert_eq!(two.degree(&VertexKey::new(0, 0, 1)), 4);
        symmetric(&two, &VertexKey::new(0, 0, 1));
        assert!(LazyFamily::ladder(1).is_err());
    }

    #[test]
    fn level_tree_degrees() {
        let f = LazyFamily::tree_levels(3).unwrap();
        assert_eq!(f.degree(&f.origin()), 3);
        // level 1 has 3 vertices: parent, 2 children, 2 cycle edges
        let v = VertexKey::new(1, 0, 0);
        assert_eq!(f.degree(&v), 5);
        symmetric(&f, &v);
        symmetric(&f, &VertexKey::new(2, 5, 0));
        assert!(!f.contains(&VertexKey::new(1, 3, 0)));
    }

    #[test]
    fn descriptor_round_trip() {
        let f = LazyFamily::ladder(4).unwrap();
        let d = f.descriptor(&[f.origin()]);
        let text = serde_json::to_string(&d).unwrap();
        let back: FamilyDescriptor = serde_json::from_str(&text).unwrap();
        let (g, roots) = LazyFamily::from_descriptor(&back).unwrap();
        assert_eq!(g, f);
        assert_eq!(roots, vec![f.origin()]);
        let bad = FamilyDescriptor { family: "nope".into(), params: BTreeMap::new(), roots: vec![] };
        assert!(LazyFamily::from_descriptor(&bad).is_err());
    }

    #[test]
    fn periodic_rejects_loops() {
        let p = PeriodicPresentation {
            dim: 1,
            cells: 1,
            templates: vec![EdgeTemplate { from: 0, to: 0, offset: [0, 0] }],
        };
        assert!(LazyFamily::periodic(p).is_err());
    }
}
