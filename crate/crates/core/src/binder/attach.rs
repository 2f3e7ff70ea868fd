//! Semantic preferences for attachment and coordination.

use std::collections::BTreeMap;
use std::path::Path;

use crate::engine::{Analysis, CorefTarget, Resources, Row};
use crate::error::{read_file, ResourceError};
use crate::grammar::strip_comment;
use crate::semnet::SemNet;

/// Congruence at or above which a modifier is shared between conjuncts.
pub const CONGRUENCE_THRESHOLD: f64 = 0.5;

/// Weighted (head, connective, dependent) lemma triples; `-` as connective
/// stands for a plain dependency.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairList {
    weights: BTreeMap<(String, String, String), f64>,
}

impl PairList {
    pub const NO_CONNECTIVE: &'static str = "-";

    pub fn load(path: impl AsRef<Path>) -> Result<PairList, ResourceError> {
        let path = path.as_ref();
        let text = read_file(path)?;
        PairList::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<PairList, ResourceError> {
        let mut weights = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [head, conn, dep, w] = cols.as_slice() else {
                return Err(ResourceError::syntax(
                    origin,
                    i + 1,
                    "expected head, connective, dependent and weight",
                ));
            };
            let w: f64 = w
                .parse()
                .map_err(|_| ResourceError::syntax(origin, i + 1, format!("bad weight `{w}`")))?;
            weights.insert(
                (head.to_lowercase(), conn.to_lowercase(), dep.to_lowercase()),
                w,
            );
        }
        Ok(PairList { weights })
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, head: &str, conn: Option<&str>, dep: &str) -> Option<f64> {
        let conn = conn.unwrap_or(Self::NO_CONNECTIVE);
        self.weights
            .get(&(head.to_lowercase(), conn.to_lowercase(), dep.to_lowercase()))
            .copied()
    }
}

/// Lemma of the connective attached to `dep`, if any.
pub fn connective_of<'a>(a: &'a Analysis, dep: &Row) -> Option<&'a str> {
    a.rows
        .iter()
        .find(|r| r.dep == dep.id && r.fnct == "conn")
        .and_then(|r| r.lemma.as_deref())
}

fn sem_node(res: &Resources, row: &Row) -> Option<String> {
    let lemma = row.lemma.as_deref()?;
    Some(
        res.lexicon
            .sem_node(lemma, &row.cat, row.meanings.first().map(String::as_str)),
    )
}

/// Overt stand-in for a row: the row itself, or the antecedent of a trace.
pub fn overt<'a>(a: &'a Analysis, row: &'a Row) -> Option<&'a Row> {
    if !row.is_trace() {
        return Some(row);
    }
    match row.coref.first() {
        Some(CorefTarget::Row(id)) => a.row(*id).filter(|r| !r.is_trace()),
        _ => None,
    }
}

/// Semantic network weight of a head/dependent link, else the pair list,
/// else `None`.
pub fn known_triple_weight(res: &Resources, a: &Analysis, head: &Row, dep: &Row) -> Option<f64> {
    let conn = connective_of(a, dep);
    let label = conn.unwrap_or(&dep.fnct);
    let (h, d) = (sem_node(res, head)?, sem_node(res, dep)?);
    res.semnet.compatible(&h, label, &d).or_else(|| {
        res.pairs
            .weight(head.lemma.as_deref()?, conn, dep.lemma.as_deref()?)
    })
}

pub fn triple_weight(res: &Resources, a: &Analysis, head: &Row, dep: &Row) -> f64 {
    known_triple_weight(res, a, head, dep).unwrap_or(0.0)
}

fn semantic_similarity(sn: &SemNet, res: &Resources, x: &Row, y: &Row) -> f64 {
    match (sem_node(res, x), sem_node(res, y)) {
        (Some(a), Some(b)) => sn.similarity(&a, &b).unwrap_or(0.0),
        _ => 0.0,
    }
}

/// Compatibility of two conjuncts in [0,1]: category match, morphological
/// agreement and twice the semantic similarity, averaged.
pub fn coordination_congruence(res: &Resources, x: &Row, y: &Row) -> f64 {
    let g = &res.grammar;
    let cat = if x.cat == y.cat || g.is_a(&x.cat, &y.cat) || g.is_a(&y.cat, &x.cat) {
        1.0
    } else {
        0.0
    };
    let shared: Vec<bool> = x
        .feats
        .iter()
        .filter_map(|(k, v)| y.feats.get(k).map(|w| v == w))
        .collect();
    let morph = if shared.is_empty() {
        1.0
    } else {
        shared.iter().filter(|b| **b).count() as f64 / shared.len() as f64
    };
    let sim = if x.lemma.is_some() && x.lemma == y.lemma && x.cat == y.cat {
        1.0
    } else {
        semantic_similarity(&res.semnet, res, x, y)
    };
    (cat + morph + 2.0 * sim) / 4.0
}

/// Stable reordering by the summed weight of every link the semantic
/// network or the pair list knows about; links neither knows leave the
/// order untouched.
pub fn disambiguate_attachment(candidates: Vec<Analysis>, res: &Resources) -> Vec<Analysis> {
    let mut keyed: Vec<(f64, Analysis)> = candidates
        .into_iter()
        .map(|a| {
            let w: f64 = a
                .rows
                .iter()
                .filter_map(|r| {
                    let head = overt(&a, a.row(r.dep)?)?;
                    let dep = overt(&a, r)?;
                    known_triple_weight(res, &a, head, dep)
                })
                .sum();
            (w, a)
        })
        .collect();
    keyed.sort_by(|x, y| y.0.total_cmp(&x.0));
    keyed.into_iter().map(|(_, a)| a).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_list_lookup() {
        let p = PairList::parse_str(
            "# head conn dep w\ngraduate\tin\tParis\t0.7\neat\t-\tcherry\t0.4\n",
            "p",
        )
        .unwrap();
        assert_eq!(p.weight("graduate", Some("in"), "paris"), Some(0.7));
        assert_eq!(p.weight("eat", None, "cherry"), Some(0.4));
        assert_eq!(p.weight("eat", Some("with"), "cherry"), None);
        assert!(PairList::parse_str("a b c\n", "p").is_err());
        assert!(PairList::parse_str("a\tb\tc\tx\n", "p").is_err());
    }
}
