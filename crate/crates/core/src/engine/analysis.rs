//! Flat dependency analyses read off a derivation tree.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::engine::chart::{ConstituentId, Forest, Node};
use crate::grammar::Grammar;
use crate::lexicon::Features;

/// Row identifier: `3` for the third overt word, `5.1` for the first trace
/// after it, `0` for the virtual root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId {
    pub word: u32,
    pub sub: u32,
}

impl RowId {
    pub const ROOT: RowId = RowId { word: 0, sub: 0 };

    pub fn word(word: u32) -> RowId {
        RowId { word, sub: 0 }
    }

    pub fn trace(word: u32, sub: u32) -> RowId {
        RowId { word, sub }
    }

    pub fn is_trace(self) -> bool {
        self.sub > 0
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sub == 0 {
            write!(f, "{}", self.word)
        } else {
            write!(f, "{}.{}", self.word, self.sub)
        }
    }
}

impl FromStr for RowId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad row id `{s}`");
        match s.split_once('.') {
            Some((w, t)) => {
                let sub: u32 = t.parse().map_err(|_| bad())?;
                if sub == 0 {
                    return Err(bad());
                }
                Ok(RowId::trace(w.parse().map_err(|_| bad())?, sub))
            }
            None => Ok(RowId::word(s.parse().map_err(|_| bad())?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorefTarget {
    Row(RowId),
    /// Antecedent outside the sentence.
    Discourse,
}

impl fmt::Display for CorefTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorefTarget::Row(r) => write!(f, "{r}"),
            CorefTarget::Discourse => f.write_str("disc"),
        }
    }
}

impl FromStr for CorefTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "disc" {
            Ok(CorefTarget::Discourse)
        } else {
            s.parse().map(CorefTarget::Row)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub id: RowId,
    /// `None` for traces.
    pub form: Option<String>,
    pub lemma: Option<String>,
    pub cat: String,
    pub feats: Features,
    pub dep: RowId,
    pub fnct: String,
    pub coref: Vec<CorefTarget>,
    pub secondary: Vec<(RowId, String)>,
    pub meanings: Vec<String>,
}

impl Row {
    pub fn is_trace(&self) -> bool {
        self.id.is_trace()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SentenceType {
    Assertive,
    Interrogative,
    Exclamative,
}

impl SentenceType {
    pub fn from_punctuation(p: Option<&str>) -> SentenceType {
        match p {
            Some("?") => SentenceType::Interrogative,
            Some("!") => SentenceType::Exclamative,
            _ => SentenceType::Assertive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SentenceType::Assertive => "assertive",
            SentenceType::Interrogative => "interrogative",
            SentenceType::Exclamative => "exclamative",
        }
    }
}

impl FromStr for SentenceType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "assertive" => Ok(SentenceType::Assertive),
            "interrogative" => Ok(SentenceType::Interrogative),
            "exclamative" => Ok(SentenceType::Exclamative),
            _ => Err(format!("unknown sentence type `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Score {
    /// Non-optional valency slots with no dependent.
    pub unfilled: u32,
    pub penalty: f64,
    pub semantic: f64,
    /// Frame indices of the derivation in pre-order.
    pub rank: Vec<usize>,
}

impl Score {
    /// Best first: fewer unfilled slots, lower penalty, higher semantic
    /// weight, then lower frame indices.
    pub fn ordering(&self, other: &Score) -> Ordering {
        self.unfilled
            .cmp(&other.unfilled)
            .then(self.penalty.total_cmp(&other.penalty))
            .then(other.semantic.total_cmp(&self.semantic))
            .then_with(|| self.rank.cmp(&other.rank))
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank: Vec<String> = self.rank.iter().map(|r| r.to_string()).collect();
        write!(
            f,
            "unfilled={};penalty={};semantic={};rank={}",
            self.unfilled,
            self.penalty,
            self.semantic,
            rank.join(",")
        )
    }
}

impl FromStr for Score {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut score = Score::default();
        for part in s.split(';') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("bad score field `{part}`"))?;
            let bad = || format!("bad value in score field `{part}`");
            match k {
                "unfilled" => score.unfilled = v.parse().map_err(|_| bad())?,
                "penalty" => score.penalty = v.parse().map_err(|_| bad())?,
                "semantic" => score.semantic = v.parse().map_err(|_| bad())?,
                "rank" => {
                    score.rank = v
                        .split(',')
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse().map_err(|_| bad()))
                        .collect::<Result<_, _>>()?
                }
                _ => return Err(format!("unknown score field `{k}`")),
            }
        }
        Ok(score)
    }
}

/// A coordinated clause whose head was elided: the gap copies the first
/// member's head and every dependent the second member does not supply.
#[derive(Debug, Clone, PartialEq)]
pub struct GapFill {
    pub head: RowId,
    pub gap: RowId,
    /// Dependents of `head` copied into the gap.
    pub copied: Vec<RowId>,
    /// Overt dependents of the gap with their functions.
    pub new_elements: Vec<(RowId, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub text: String,
    pub sentence_type: SentenceType,
    pub profile: String,
    pub rows: Vec<Row>,
    pub score: Score,
    pub diagnostics: Vec<String>,
    pub gaps: Vec<GapFill>,
}

impl Analysis {
    pub fn row(&self, id: RowId) -> Option<&Row> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn row_mut(&mut self, id: RowId) -> Option<&mut Row> {
        self.rows.iter_mut().find(|r| r.id == id)
    }

    pub fn dependents(&self, id: RowId) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.dep == id)
    }

    pub fn root(&self) -> Option<&Row> {
        self.rows.iter().find(|r| r.dep == RowId::ROOT)
    }

    /// Keeps rows ordered by id.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by_key(|r| r.id);
    }
}

struct Assignment {
    governor: Option<ConstituentId>,
    function: String,
}

/// Flattens the derivation rooted at `root` into rows. Returns the rows
/// and the pre-order list of frame indices.
pub fn flatten(g: &Grammar, forest: &Forest, root: ConstituentId) -> (Vec<Row>, Vec<usize>) {
    let mut assigned: HashMap<ConstituentId, Assignment> = HashMap::new();
    let mut meanings: HashMap<ConstituentId, Vec<String>> = HashMap::new();
    let mut order: Vec<ConstituentId> = Vec::new();
    let mut rank = Vec::new();
    let root_fn = forest
        .get(root)
        .frame()
        .map(|f| {
            let fr = &g.frames()[f];
            fr.fnct[fr.head()].clone()
        })
        .unwrap_or_else(|| "head".to_string());

    let mut stack = vec![(root, None, root_fn)];
    while let Some((id, governor, function)) = stack.pop() {
        let c = forest.get(id);
        if let Node::Phrase { frame, children } = &c.node {
            rank.push(*frame);
            for (k, ms) in &c.narrowed {
                meanings.entry(*k).or_insert_with(|| ms.clone());
            }
            for ch in children.iter().rev() {
                match ch.governor {
                    None => stack.push((ch.id, governor, function.clone())),
                    Some(gpos) => {
                        let gov = forest.get(children[gpos].id).lexical_head;
                        stack.push((ch.id, Some(gov), ch.function.clone()));
                    }
                }
            }
        } else {
            order.push(id);
            assigned.insert(id, Assignment { governor, function });
        }
    }

    let mut overt: Vec<ConstituentId> = order
        .iter()
        .copied()
        .filter(|id| !forest.get(*id).is_trace())
        .collect();
    overt.sort_by_key(|id| forest.get(*id).start);
    let mut ids: HashMap<ConstituentId, RowId> = HashMap::new();
    for (k, id) in overt.iter().enumerate() {
        ids.insert(*id, RowId::word(k as u32 + 1));
    }
    let mut subs: HashMap<u32, u32> = HashMap::new();
    for id in order.iter().filter(|id| forest.get(**id).is_trace()) {
        let anchor = forest.get(*id).start;
        let k = overt
            .iter()
            .filter(|o| forest.get(**o).end <= anchor)
            .count() as u32;
        let sub = subs.entry(k).or_insert(0);
        *sub += 1;
        ids.insert(*id, RowId::trace(k, *sub));
    }

    let mut rows: Vec<Row> = order
        .iter()
        .map(|id| {
            let c = forest.get(*id);
            let a = &assigned[id];
            Row {
                id: ids[id],
                form: c.surface.clone(),
                lemma: c.lemma.clone(),
                cat: c.category.clone(),
                feats: c.features.clone(),
                dep: a.governor.map_or(RowId::ROOT, |gv| ids[&gv]),
                fnct: a.function.clone(),
                coref: Vec::new(),
                secondary: Vec::new(),
                meanings: meanings
                    .get(id)
                    .cloned()
                    .unwrap_or_else(|| c.meanings.clone()),
            }
        })
        .collect();
    rows.sort_by_key(|r| r.id);
    (rows, rank)
}
