//! Constituents, the shared forest that owns them and the cycle-wise chart.

use std::collections::{HashMap, HashSet};

use crate::engine::pattern::{Draft, Position};
use crate::lexicon::{Features, Lexicon};
use crate::tagger::TerminalNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstituentId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Child {
    pub id: ConstituentId,
    pub function: String,
    /// 0-based frame position of the governor; `None` for the head.
    pub governor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Index into the lattice.
    Terminal(usize),
    /// Zero-width position anchored at a lattice vertex.
    Trace,
    Phrase {
        frame: usize,
        children: Vec<Child>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constituent {
    pub id: ConstituentId,
    pub category: String,
    pub start: usize,
    pub end: usize,
    pub node: Node,
    /// Terminal or trace at the bottom of the head chain.
    pub lexical_head: ConstituentId,
    pub lemma: Option<String>,
    pub surface: Option<String>,
    pub features: Features,
    pub connective: Option<String>,
    /// Surviving meaning ids of the lexical head.
    pub meanings: Vec<String>,
    /// Lexical heads whose meanings a valency check narrowed at this node.
    pub narrowed: Vec<(ConstituentId, Vec<String>)>,
    pub penalty: f64,
    pub cycle: u32,
}

impl Constituent {
    pub fn is_trace(&self) -> bool {
        matches!(self.node, Node::Trace)
    }

    pub fn children(&self) -> &[Child] {
        match &self.node {
            Node::Phrase { children, .. } => children,
            _ => &[],
        }
    }

    pub fn frame(&self) -> Option<usize> {
        match self.node {
            Node::Phrase { frame, .. } => Some(frame),
            _ => None,
        }
    }

    pub fn head_child(&self) -> Option<&Child> {
        self.children().iter().find(|c| c.governor.is_none())
    }
}

/// Arena of every constituent built for one sentence.
#[derive(Debug, Clone, Default)]
pub struct Forest {
    pub lattice: Vec<TerminalNode>,
    nodes: Vec<Constituent>,
}

impl Forest {
    pub fn new(lattice: Vec<TerminalNode>) -> Self {
        Forest {
            lattice,
            nodes: Vec::new(),
        }
    }

    /// A forest holding one terminal constituent per lattice node, each
    /// with every meaning its lemma has.
    pub fn seeded(lattice: Vec<TerminalNode>, lex: &Lexicon) -> Self {
        let mut forest = Forest::new(Vec::new());
        for (i, n) in lattice.iter().enumerate() {
            let id = forest.next_id();
            let meanings = lex
                .meanings_of(&n.entry.lemma, &n.entry.pos)
                .iter()
                .map(|m| m.meaning_id.clone())
                .collect();
            forest.push(Constituent {
                id,
                category: n.entry.pos.clone(),
                start: n.start,
                end: n.end,
                node: Node::Terminal(i),
                lexical_head: id,
                lemma: Some(n.entry.lemma.clone()),
                surface: Some(n.entry.surface.clone()),
                features: n.entry.morph.clone(),
                connective: None,
                meanings,
                narrowed: Vec::new(),
                penalty: n.penalty,
                cycle: 0,
            });
        }
        forest.lattice = lattice;
        forest
    }

    /// Stores a draft, creating fresh trace constituents for its trace
    /// positions, and returns the new phrase.
    pub fn add_draft(&mut self, d: Draft, cycle: u32) -> ConstituentId {
        let mut children = Vec::with_capacity(d.positions.len());
        for (i, p) in d.positions.iter().enumerate() {
            let id = match p {
                Position::Surface(id) => *id,
                Position::Trace { category, anchor } => {
                    let id = self.next_id();
                    self.push(Constituent {
                        id,
                        category: category.clone(),
                        start: *anchor,
                        end: *anchor,
                        node: Node::Trace,
                        lexical_head: id,
                        lemma: None,
                        surface: None,
                        features: Features::new(),
                        connective: None,
                        meanings: Vec::new(),
                        narrowed: Vec::new(),
                        penalty: 0.0,
                        cycle,
                    })
                }
            };
            children.push(Child {
                id,
                function: d.functions[i].clone(),
                governor: d.governors[i],
            });
        }
        let lexical_head = self.get(children[d.head].id).lexical_head;
        let id = self.next_id();
        self.push(Constituent {
            id,
            category: d.category,
            start: d.start,
            end: d.end,
            node: Node::Phrase {
                frame: d.frame,
                children,
            },
            lexical_head,
            lemma: d.lemma,
            surface: d.surface,
            features: d.features,
            connective: d.connective,
            meanings: d.meanings,
            narrowed: d.narrowed,
            penalty: d.penalty,
            cycle,
        })
    }

    pub fn get(&self, id: ConstituentId) -> &Constituent {
        &self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constituent> {
        self.nodes.iter()
    }

    pub fn next_id(&self) -> ConstituentId {
        ConstituentId(self.nodes.len())
    }

    fn push(&mut self, c: Constituent) -> ConstituentId {
        debug_assert_eq!(c.id, self.next_id());
        let id = c.id;
        self.nodes.push(c);
        id
    }

    /// The constituent and every descendant along single-surface-child
    /// links, i.e. the unary chain below it.
    pub fn unary_chain(&self, id: ConstituentId) -> Vec<ConstituentId> {
        let mut out = vec![id];
        let mut cur = id;
        loop {
            let surface: Vec<&Child> = self
                .get(cur)
                .children()
                .iter()
                .filter(|c| !self.get(c.id).is_trace())
                .collect();
            match surface.as_slice() {
                [only] => {
                    cur = only.id;
                    out.push(cur);
                }
                _ => return out,
            }
        }
    }

    /// Covered terminals in surface order.
    pub fn terminals(&self, id: ConstituentId) -> Vec<ConstituentId> {
        let c = self.get(id);
        match &c.node {
            Node::Terminal(_) => vec![id],
            Node::Trace => Vec::new(),
            Node::Phrase { children, .. } => {
                let mut out: Vec<ConstituentId> = children
                    .iter()
                    .flat_map(|ch| self.terminals(ch.id))
                    .collect();
                out.sort_by_key(|t| self.get(*t).start);
                out
            }
        }
    }

    pub fn covered_text(&self, id: ConstituentId) -> String {
        let words: Vec<&str> = self
            .terminals(id)
            .into_iter()
            .filter_map(|t| self.get(t).surface.as_deref())
            .collect();
        words.join(" ")
    }
}

/// Derivation key: a frame applied to a sequence of surface children.
/// Trace positions are always fresh, so they are left out.
pub type DerivationKey = (usize, Vec<ConstituentId>);

#[derive(Debug, Default)]
pub struct Chart {
    pub forest: Forest,
    by_category: HashMap<String, Vec<ConstituentId>>,
    by_start: HashMap<(String, usize), Vec<ConstituentId>>,
    seen: HashSet<DerivationKey>,
    pub cycle: u32,
}

impl Chart {
    pub fn new(forest: Forest) -> Self {
        let mut chart = Chart {
            forest,
            ..Chart::default()
        };
        for i in 0..chart.forest.len() {
            chart.index(ConstituentId(i));
        }
        chart
    }

    fn index(&mut self, id: ConstituentId) {
        let c = self.forest.get(id);
        if c.is_trace() {
            return;
        }
        let (cat, start) = (c.category.clone(), c.start);
        self.by_category.entry(cat.clone()).or_default().push(id);
        self.by_start.entry((cat, start)).or_default().push(id);
    }

    pub fn starting(&self, category: &str, start: usize) -> &[ConstituentId] {
        self.by_start
            .get(&(category.to_string(), start))
            .map_or(&[], Vec::as_slice)
    }

    pub fn with_category(&self, category: &str) -> &[ConstituentId] {
        self.by_category.get(category).map_or(&[], Vec::as_slice)
    }

    pub fn is_seen(&self, key: &DerivationKey) -> bool {
        self.seen.contains(key)
    }

    pub fn add_draft(&mut self, d: Draft, key: DerivationKey, cycle: u32) -> ConstituentId {
        let id = self.forest.add_draft(d, cycle);
        self.index(id);
        self.seen.insert(key);
        id
    }
}
