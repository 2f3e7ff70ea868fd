//! Small semantic network used for attachment and coordination decisions.
//!
//! ```text
//! NODE Paris
//! TAG populated-place
//! REL hypernym city
//! NODE graduate
//! REL compatible-with populated-place 1.0 in
//! ```
//!
//! `REL <kind> <target> [weight] [label]`; kinds are `hypernym`, `meronym`
//! and `compatible-with`. A `compatible-with` edge matches a dependent that
//! is the target node or carries the target as a tag; the optional label
//! restricts it to one relation (a connective or function).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use crate::error::{read_file, ResourceError};
use crate::grammar::strip_comment;

/// Similarity of two nodes sharing a tag or a meronymy target.
pub const SHARED_SIMILARITY: f64 = 0.9;
/// Per-level decay along hypernym links.
pub const DECAY: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Hypernym,
    Meronym,
    CompatibleWith,
}

impl RelationKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "hypernym" => RelationKind::Hypernym,
            "meronym" => RelationKind::Meronym,
            "compatible-with" => RelationKind::CompatibleWith,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub kind: RelationKind,
    pub target: String,
    pub weight: f64,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SemNode {
    pub id: String,
    pub tags: BTreeSet<String>,
    pub relations: Vec<Relation>,
}

impl SemNode {
    fn targets(&self, kind: RelationKind) -> impl Iterator<Item = &str> {
        self.relations
            .iter()
            .filter(move |r| r.kind == kind)
            .map(|r| r.target.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SemNet {
    nodes: BTreeMap<String, SemNode>,
}

impl SemNet {
    pub fn load(path: impl AsRef<Path>) -> Result<SemNet, ResourceError> {
        let path = path.as_ref();
        let text = read_file(path)?;
        SemNet::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<SemNet, ResourceError> {
        let mut nodes: BTreeMap<String, SemNode> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| ResourceError::syntax(origin, i + 1, m);
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["NODE", id] => {
                    if nodes.contains_key(*id) {
                        return Err(err(format!("node {id} declared twice")));
                    }
                    nodes.insert(
                        id.to_string(),
                        SemNode {
                            id: id.to_string(),
                            ..SemNode::default()
                        },
                    );
                    current = Some(id.to_string());
                }
                ["TAG", tags @ ..] if !tags.is_empty() => {
                    let node = current
                        .as_ref()
                        .and_then(|c| nodes.get_mut(c))
                        .ok_or_else(|| err("TAG outside a NODE block".into()))?;
                    node.tags.extend(tags.iter().map(|t| t.to_string()));
                }
                ["REL", kind, target, rest @ ..] if rest.len() <= 2 => {
                    let kind = RelationKind::parse(kind)
                        .ok_or_else(|| err(format!("unknown relation `{kind}`")))?;
                    let weight = match rest.first() {
                        Some(w) => match w.parse::<f64>() {
                            Ok(w) if (0.0..=1.0).contains(&w) => w,
                            _ => return Err(err(format!("weight `{w}` must be in [0,1]"))),
                        },
                        None => 1.0,
                    };
                    let node = current
                        .as_ref()
                        .and_then(|c| nodes.get_mut(c))
                        .ok_or_else(|| err("REL outside a NODE block".into()))?;
                    node.relations.push(Relation {
                        kind,
                        target: target.to_string(),
                        weight,
                        label: rest.get(1).map(|l| l.to_string()),
                    });
                }
                _ => return Err(err(format!("cannot parse `{line}`"))),
            }
        }
        let net = SemNet { nodes };
        for node in net.nodes.values() {
            for r in &node.relations {
                if !net.nodes.contains_key(&r.target) {
                    return Err(ResourceError::DanglingTarget {
                        origin: origin.to_string(),
                        node: node.id.clone(),
                        target: r.target.clone(),
                    });
                }
            }
        }
        if let Some(node) = net.find_cycle() {
            return Err(ResourceError::HypernymCycle {
                origin: origin.to_string(),
                node,
            });
        }
        Ok(net)
    }

    fn find_cycle(&self) -> Option<String> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit<'a>(
            net: &'a SemNet,
            id: &'a str,
            marks: &mut BTreeMap<&'a str, Mark>,
        ) -> Option<String> {
            match marks.get(id) {
                Some(Mark::Active) => return Some(id.to_string()),
                Some(Mark::Done) => return None,
                None => {}
            }
            marks.insert(id, Mark::Active);
            for t in net.nodes[id].targets(RelationKind::Hypernym) {
                if let Some(c) = visit(net, t, marks) {
                    return Some(c);
                }
            }
            marks.insert(id, Mark::Done);
            None
        }
        let mut marks = BTreeMap::new();
        self.nodes.keys().find_map(|id| visit(self, id, &mut marks))
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&SemNode> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &SemNode> {
        self.nodes.values()
    }

    /// Hypernym ancestors with their minimal distance; includes the node at 0.
    pub fn ancestors(&self, id: &str) -> BTreeMap<&str, u32> {
        let mut out = BTreeMap::new();
        let Some((key, _)) = self.nodes.get_key_value(id) else {
            return out;
        };
        let mut queue = VecDeque::from([(key.as_str(), 0u32)]);
        while let Some((n, d)) = queue.pop_front() {
            if out.contains_key(n) {
                continue;
            }
            out.insert(n, d);
            for t in self.nodes[n].targets(RelationKind::Hypernym) {
                queue.push_back((t, d + 1));
            }
        }
        out
    }

    /// Symmetric similarity in [0,1]; `None` when either node is unknown or
    /// nothing relates them.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        if a == b {
            return Some(1.0);
        }
        let (na, nb) = (self.nodes.get(a)?, self.nodes.get(b)?);
        if !na.tags.is_disjoint(&nb.tags) {
            return Some(SHARED_SIMILARITY);
        }
        let ma: BTreeSet<&str> = na.targets(RelationKind::Meronym).collect();
        if nb.targets(RelationKind::Meronym).any(|t| ma.contains(t)) {
            return Some(SHARED_SIMILARITY);
        }
        let (aa, ab) = (self.ancestors(a), self.ancestors(b));
        aa.iter()
            .filter_map(|(n, da)| ab.get(n).map(|db| da + db))
            .min()
            .map(|d| SHARED_SIMILARITY * DECAY.powi(d as i32))
    }

    /// Weight of a `compatible-with` edge from `head` licensing `dependent`
    /// under `label`, inherited along the dependent's hypernyms with decay.
    pub fn compatible(&self, head: &str, label: &str, dependent: &str) -> Option<f64> {
        let h = self.nodes.get(head)?;
        if !self.nodes.contains_key(dependent) {
            return None;
        }
        let edges: Vec<&Relation> = h
            .relations
            .iter()
            .filter(|r| r.kind == RelationKind::CompatibleWith)
            .filter(|r| r.label.as_deref().is_none_or(|l| l == label))
            .collect();
        if edges.is_empty() {
            return None;
        }
        let mut by_depth: BTreeMap<u32, Vec<&str>> = BTreeMap::new();
        for (n, d) in self.ancestors(dependent) {
            by_depth.entry(d).or_default().push(n);
        }
        for (depth, level) in by_depth {
            let best = level
                .iter()
                .flat_map(|n| {
                    let node = &self.nodes[*n];
                    edges
                        .iter()
                        .filter(move |e| e.target == node.id || node.tags.contains(&e.target))
                        .map(|e| e.weight)
                })
                .fold(None, |acc: Option<f64>, w| {
                    Some(acc.map_or(w, |a| a.max(w)))
                });
            if let Some(w) = best {
                return Some(w * DECAY.powi(depth as i32));
            }
        }
        None
    }
}
