//! Static checks over a loaded grammar and lexicon.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::grammar::{CategoryKind, Grammar, PatternFrame};
use crate::lexicon::{ArgSlot, Lexicon, MeaningFrame, OPEN_CLASSES};
use crate::semnet::SemNet;
use crate::tagger::PUNCT;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diagnostic {
    UndeclaredCategory { location: String, category: String },
    UnreachableFrame { frame: String },
    UnrealizableMeaning { lemma: String, meaning: String },
    MissingSemNode { lemma: String, node: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UndeclaredCategory { location, category } => {
                write!(f, "undeclared category {category} in {location}")
            }
            Diagnostic::UnreachableFrame { frame } => {
                write!(f, "frame {frame} can never be completed")
            }
            Diagnostic::UnrealizableMeaning { lemma, meaning } => {
                write!(
                    f,
                    "meaning {meaning} of {lemma} is not realized by any frame"
                )
            }
            Diagnostic::MissingSemNode { lemma, node } => {
                write!(
                    f,
                    "semantic node {node} of {lemma} is missing from the network"
                )
            }
        }
    }
}

/// Undeclared categories, frames that can never fire, and lexical meanings
/// no frame can realize.
pub fn validate_grammar(g: &Grammar, lex: &Lexicon) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut undeclared = |location: String, category: &str| {
        if !g.is_declared(category) && category != PUNCT {
            out.push(Diagnostic::UndeclaredCategory {
                location,
                category: category.to_string(),
            });
        }
    };
    for f in g.frames() {
        undeclared(format!("frame {}", f.id()), &f.category);
        for c in &f.seq {
            undeclared(format!("frame {}", f.id()), c);
        }
    }
    for l in lex.lemmas() {
        undeclared(format!("lemma {}", l.lemma), &l.pos);
        for m in &l.meanings {
            for s in &m.slots {
                undeclared(format!("meaning {} of {}", m.meaning_id, l.lemma), &s.cat);
            }
        }
    }

    let derivable = derivable_categories(g, lex);
    for f in g.frames() {
        if !f
            .seq
            .iter()
            .all(|c| derivable.contains(c.as_str()) || g.is_trace(c))
        {
            out.push(Diagnostic::UnreachableFrame { frame: f.id() });
        }
    }

    let heads = lexical_heads(g);
    let conn_bearing = connective_categories(g);
    for l in lex.lemmas() {
        for m in l.meanings.iter().filter(|m| !m.slots.is_empty()) {
            let realized = g.frames().iter().any(|f| {
                g.is_clausal(&f.category)
                    && !g.is_clausal(&f.seq[f.head()])
                    && heads
                        .get(f.seq[f.head()].as_str())
                        .is_some_and(|h| h.contains(l.pos.as_str()))
                    && frame_realizes(g, f, m, &conn_bearing)
            });
            if !realized {
                out.push(Diagnostic::UnrealizableMeaning {
                    lemma: l.lemma.clone(),
                    meaning: m.meaning_id.clone(),
                });
            }
        }
    }
    out
}

/// Semantic references in the lexicon that the network does not define.
pub fn validate_semantics(lex: &Lexicon, sn: &SemNet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for l in lex.lemmas() {
        let refs = l
            .sem
            .iter()
            .chain(l.meanings.iter().filter_map(|m| m.sem_ref.as_ref()));
        for node in refs {
            if !sn.contains(node) {
                out.push(Diagnostic::MissingSemNode {
                    lemma: l.lemma.clone(),
                    node: node.clone(),
                });
            }
        }
    }
    out
}

fn derivable_categories<'g>(g: &'g Grammar, lex: &'g Lexicon) -> BTreeSet<&'g str> {
    let mut known: BTreeSet<&str> = g
        .categories()
        .iter()
        .filter(|c| c.kind != CategoryKind::Phrase)
        .map(|c| c.name.as_str())
        .collect();
    known.extend(lex.lemmas().iter().map(|l| l.pos.as_str()));
    known.extend(
        lex.clitic_rules()
            .iter()
            .flat_map(|r| r.parts.iter().map(|(_, c)| c.as_str())),
    );
    known.extend(OPEN_CLASSES);
    known.insert(PUNCT);
    loop {
        let before = known.len();
        for f in g.frames() {
            if f.seq
                .iter()
                .all(|c| known.contains(c.as_str()) || g.is_trace(c))
            {
                known.insert(&f.category);
            }
        }
        if known.len() == before {
            return known;
        }
    }
}

/// For each category, the terminal categories found at the bottom of its
/// head chains.
fn lexical_heads(g: &Grammar) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut heads: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for f in g.frames() {
        for c in &f.seq {
            if g.is_terminal(c) || !g.frames().iter().any(|x| &x.category == c) {
                heads.entry(c).or_default().insert(c);
            }
        }
    }
    loop {
        let mut changed = false;
        for f in g.frames() {
            let below: Vec<&str> = heads
                .get(f.seq[f.head()].as_str())
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            let entry = heads.entry(&f.category).or_default();
            for b in below {
                changed |= entry.insert(b);
            }
        }
        if !changed {
            return heads;
        }
    }
}

/// Categories with a frame whose head governs a `conn` position.
fn connective_categories(g: &Grammar) -> BTreeSet<&str> {
    g.frames()
        .iter()
        .filter(|f| (0..f.len()).any(|i| f.fnct[i] == "conn" && f.governor(i) == Some(f.head())))
        .map(|f| f.category.as_str())
        .collect()
}

fn frame_realizes(
    g: &Grammar,
    f: &PatternFrame,
    m: &MeaningFrame,
    conn_bearing: &BTreeSet<&str>,
) -> bool {
    let args: Vec<usize> = (0..f.len())
        .filter(|&i| g.is_arg_function(&f.fnct[i]))
        .collect();
    let fits = |i: usize, s: &ArgSlot| {
        let cat = &f.seq[i];
        if !g.function_matches(&f.fnct[i], &s.function) {
            return false;
        }
        if g.is_trace(cat) {
            return true;
        }
        let can_conn = conn_bearing
            .iter()
            .any(|c| g.is_a(c, cat) || g.is_a(cat, c));
        g.is_a(cat, &s.cat) && (s.conn.is_none() || can_conn)
    };
    fn assign(
        args: &[usize],
        used: &mut Vec<bool>,
        slots: &[ArgSlot],
        fits: &dyn Fn(usize, &ArgSlot) -> bool,
    ) -> bool {
        let Some((&first, rest)) = args.split_first() else {
            return slots.iter().zip(used.iter()).all(|(s, &u)| u || s.opt);
        };
        for (k, s) in slots.iter().enumerate() {
            if !used[k] && fits(first, s) {
                used[k] = true;
                if assign(rest, used, slots, fits) {
                    return true;
                }
                used[k] = false;
            }
        }
        false
    }
    assign(&args, &mut vec![false; m.slots.len()], &m.slots, &fits)
}
