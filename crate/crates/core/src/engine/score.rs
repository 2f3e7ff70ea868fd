//! Ranking of complete analyses.

use crate::binder::{coordination_congruence, overt, triple_weight};
use crate::engine::analysis::{Analysis, Row, RowId, Score};
use crate::engine::Resources;

/// Non-optional slots of `row`'s best meaning that no dependent fills.
pub fn unfilled_slots(res: &Resources, a: &Analysis, row: &Row) -> u32 {
    let Some(lemma) = &row.lemma else {
        return 0;
    };
    let fillers: Vec<&str> = a
        .rows
        .iter()
        .filter(|d| d.dep == row.id)
        .map(|d| d.fnct.as_str())
        .chain(a.rows.iter().flat_map(|d| {
            d.secondary
                .iter()
                .filter(|(h, _)| *h == row.id)
                .map(|(_, f)| f.as_str())
        }))
        .collect();
    row.meanings
        .iter()
        .filter_map(|id| res.lexicon.meaning(lemma, &row.cat, id))
        .map(|m| {
            m.slots
                .iter()
                .filter(|s| {
                    !s.opt
                        && !fillers
                            .iter()
                            .any(|f| res.grammar.function_matches(f, &s.function))
                })
                .count() as u32
        })
        .min()
        .unwrap_or(0)
}

/// Sum of head/dependent triple weights plus coordination congruence.
pub fn semantic_weight(res: &Resources, a: &Analysis) -> f64 {
    let mut total = 0.0;
    for r in a.rows.iter().filter(|r| !r.is_trace()) {
        for (h, label) in &r.secondary {
            if let (Some(h), "coord") = (a.row(*h), label.as_str()) {
                total += coordination_congruence(res, h, r);
            }
        }
        if r.dep == RowId::ROOT {
            continue;
        }
        let Some(head) = a.row(r.dep).and_then(|h| overt(a, h)) else {
            continue;
        };
        if r.fnct == "coord" {
            total += coordination_congruence(res, head, r);
        } else {
            total += triple_weight(res, a, head, r);
        }
    }
    total
}

pub fn score(res: &Resources, a: &Analysis, penalty: f64, rank: Vec<usize>) -> Score {
    Score {
        unfilled: a.rows.iter().map(|r| unfilled_slots(res, a, r)).sum(),
        penalty,
        semantic: semantic_weight(res, a),
        rank,
    }
}
