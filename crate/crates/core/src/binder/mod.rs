//! Relations resolved after parsing: trace coreference, coordination
//! sharing and gap filling, and semantic attachment preferences.

mod attach;

use std::collections::BTreeSet;

use crate::engine::{Analysis, CorefTarget, GapFill, Resources, Row, RowId};
use crate::lexicon::Control;

pub use attach::{
    connective_of, coordination_congruence, disambiguate_attachment, known_triple_weight, overt,
    triple_weight, PairList, CONGRUENCE_THRESHOLD,
};

/// Functions that never name an argument or adjunct.
pub const STRUCTURAL_FUNCTIONS: [&str; 9] = [
    "conn", "det", "aux", "mark", "coord", "v", "v_pass", "head", "punct",
];
/// Modifier functions shared between congruent conjuncts.
pub const MODIFIER_FUNCTIONS: [&str; 2] = ["mod", "rmod"];
/// Trace category standing for an elided verb.
pub const VERB_GAP: &str = "Tv";

fn is_structural(f: &str) -> bool {
    STRUCTURAL_FUNCTIONS.contains(&f)
}

/// Trace category used for a dependent copied into a gap.
pub fn trace_category(function: &str) -> &'static str {
    match function {
        "subj" | "subj_pass" => "Ts",
        "obj" | "obj_pass" => "To",
        _ => "Ti",
    }
}

pub struct Binder<'r> {
    res: &'r Resources,
}

impl<'r> Binder<'r> {
    pub fn new(res: &'r Resources) -> Self {
        Binder { res }
    }

    fn control(&self, row: &Row) -> Control {
        let Some(lemma) = &row.lemma else {
            return Control::None;
        };
        row.meanings
            .iter()
            .find_map(|id| self.res.lexicon.meaning(lemma, &row.cat, id))
            .map_or(Control::None, |m| m.ctrl)
    }

    /// Wires shared heads and dependents of coordinated structures and
    /// fills verb gaps.
    pub fn resolve_coordination(&self, a: &mut Analysis) {
        let coords: Vec<RowId> = a
            .rows
            .iter()
            .filter(|r| r.fnct == "coord")
            .map(|r| r.id)
            .collect();
        for c in coords {
            let Some(f) = a.row(c).map(|r| r.dep).and_then(|d| a.row(d)).cloned() else {
                continue;
            };
            let row_c = a.row(c).unwrap().clone();
            if row_c.is_trace() && row_c.cat == VERB_GAP {
                self.fill_gap(a, &f, &row_c);
            } else if matches!(f.fnct.as_str(), "v" | "v_pass") {
                self.share_heads(a, &f, &row_c);
            } else {
                if f.dep != RowId::ROOT {
                    let r = a.row_mut(c).unwrap();
                    r.dep = f.dep;
                    r.fnct = f.fnct.clone();
                    r.secondary.push((f.id, "coord".to_string()));
                }
                self.share_modifiers(a, &f, &row_c);
            }
        }
        a.sort_rows();
    }

    fn new_functions(a: &Analysis, head: RowId) -> BTreeSet<String> {
        a.dependents(head)
            .filter(|d| !is_structural(&d.fnct))
            .map(|d| d.fnct.clone())
            .collect()
    }

    fn share_heads(&self, a: &mut Analysis, f: &Row, c: &Row) {
        let supplied = Self::new_functions(a, c.id);
        let shared: Vec<(RowId, String, bool)> = a
            .dependents(f.id)
            .filter(|d| d.id != c.id && !is_structural(&d.fnct))
            .map(|d| (d.id, d.fnct.clone(), d.is_trace()))
            .collect();
        for (d, fnct, trace) in shared {
            if !supplied.contains(&fnct) {
                if !trace {
                    a.row_mut(d).unwrap().secondary.push((c.id, fnct));
                }
                continue;
            }
            if !trace {
                continue;
            }
            let antecedent = a
                .dependents(c.id)
                .find(|x| x.fnct == fnct && !x.is_trace())
                .map(|x| x.id);
            if let Some(x) = antecedent {
                a.row_mut(d).unwrap().coref = vec![CorefTarget::Row(x)];
                a.row_mut(x).unwrap().secondary.push((f.id, fnct));
            }
        }
    }

    fn fill_gap(&self, a: &mut Analysis, f: &Row, gap: &Row) {
        a.row_mut(gap.id).unwrap().coref = vec![CorefTarget::Row(f.id)];
        let supplied = Self::new_functions(a, gap.id);
        let new_elements: Vec<(RowId, String)> = a
            .dependents(gap.id)
            .filter(|d| !is_structural(&d.fnct))
            .map(|d| (d.id, d.fnct.clone()))
            .collect();
        let copied: Vec<(RowId, String)> = a
            .dependents(f.id)
            .filter(|d| d.id != gap.id && !is_structural(&d.fnct) && !supplied.contains(&d.fnct))
            .map(|d| (d.id, d.fnct.clone()))
            .collect();
        let mut sub = a
            .rows
            .iter()
            .filter(|r| r.id.word == gap.id.word)
            .map(|r| r.id.sub)
            .max()
            .unwrap_or(0);
        for (d, fnct) in &copied {
            sub += 1;
            let target = match a.row(*d) {
                Some(r) if r.is_trace() => r.coref.first().copied().unwrap_or(CorefTarget::Row(*d)),
                _ => CorefTarget::Row(*d),
            };
            a.rows.push(Row {
                id: RowId::trace(gap.id.word, sub),
                form: None,
                lemma: None,
                cat: trace_category(fnct).to_string(),
                feats: Default::default(),
                dep: gap.id,
                fnct: fnct.clone(),
                coref: vec![target],
                secondary: Vec::new(),
                meanings: Vec::new(),
            });
        }
        a.gaps.push(GapFill {
            head: f.id,
            gap: gap.id,
            copied: copied.into_iter().map(|(d, _)| d).collect(),
            new_elements,
        });
    }

    fn share_modifiers(&self, a: &mut Analysis, f: &Row, c: &Row) {
        if coordination_congruence(self.res, f, c) < CONGRUENCE_THRESHOLD {
            return;
        }
        let modifier = |r: &Row| MODIFIER_FUNCTIONS.contains(&r.fnct.as_str()) && !r.is_trace();
        let before_f: Vec<(RowId, String)> = a
            .dependents(f.id)
            .filter(|r| modifier(r) && r.id < f.id)
            .map(|r| (r.id, r.fnct.clone()))
            .collect();
        let after_c: Vec<(RowId, String)> = a
            .dependents(c.id)
            .filter(|r| modifier(r) && r.id > c.id)
            .map(|r| (r.id, r.fnct.clone()))
            .collect();
        for (m, fnct) in before_f {
            a.row_mut(m).unwrap().secondary.push((c.id, fnct));
        }
        for (m, fnct) in after_c {
            a.row_mut(m).unwrap().secondary.push((f.id, fnct));
        }
    }

    /// Points every unbound trace at its antecedent and lists candidate
    /// antecedents for anaphoric pronouns. Running it twice changes nothing.
    pub fn bind_traces(&self, a: &mut Analysis) {
        let traces: Vec<RowId> = a
            .rows
            .iter()
            .filter(|r| r.is_trace() && r.cat != VERB_GAP)
            .map(|r| r.id)
            .collect();
        for t in &traces {
            let mut visiting = BTreeSet::new();
            self.resolve(a, *t, &mut visiting);
        }
        for t in traces {
            if a.row(t).unwrap().coref == [CorefTarget::Discourse]
                && !a
                    .diagnostics
                    .iter()
                    .any(|d| d.starts_with(&format!("trace {t} ")))
            {
                a.diagnostics
                    .push(format!("trace {t} has no antecedent in the sentence"));
            }
        }

        let matrix_subject = a.root().and_then(|root| {
            a.dependents(root.id)
                .find(|d| d.fnct == "subj" && !d.is_trace())
                .map(|d| d.id)
        });
        let pronouns: Vec<RowId> = a
            .rows
            .iter()
            .filter(|r| !r.is_trace() && r.coref.is_empty() && self.res.grammar.is_anaphor(&r.cat))
            .map(|r| r.id)
            .collect();
        for p in pronouns {
            let mut cands: Vec<CorefTarget> = matrix_subject
                .filter(|s| *s != p)
                .map(CorefTarget::Row)
                .into_iter()
                .collect();
            cands.push(CorefTarget::Discourse);
            a.row_mut(p).unwrap().coref = cands;
        }
    }

    /// Returns the overt antecedent (or the discourse sentinel) of trace `t`,
    /// recording it on the row.
    fn resolve(&self, a: &mut Analysis, t: RowId, visiting: &mut BTreeSet<RowId>) -> CorefTarget {
        let row = a.row(t).unwrap();
        if let Some(first) = row.coref.first().copied() {
            return match first {
                CorefTarget::Row(x)
                    if a.row(x).is_some_and(|r| r.is_trace()) && visiting.insert(t) =>
                {
                    let target = self.resolve(a, x, visiting);
                    a.row_mut(t).unwrap().coref = vec![target];
                    target
                }
                other => other,
            };
        }
        if !visiting.insert(t) {
            return CorefTarget::Discourse;
        }
        let found = self.search(a, t);
        let target = match found {
            Some(x) if a.row(x).is_some_and(|r| r.is_trace()) => self.resolve(a, x, visiting),
            Some(x) => CorefTarget::Row(x),
            None => CorefTarget::Discourse,
        };
        a.row_mut(t).unwrap().coref = vec![target];
        target
    }

    /// Candidate antecedent for a trace, following the upper verb's control
    /// feature and otherwise searching one clause level at a time.
    fn search(&self, a: &Analysis, t: RowId) -> Option<RowId> {
        let trace = a.row(t)?;
        let mut lower = a.row(trace.dep)?;
        let mut upper = a.row(lower.dep)?;
        if trace.cat == "Ts" {
            if let Some(f) = self.control(upper).function() {
                let ctrl = a
                    .dependents(upper.id)
                    .find(|d| d.id != lower.id && self.res.grammar.function_matches(&d.fnct, f));
                if let Some(d) = ctrl {
                    return Some(d.id);
                }
            }
        }
        loop {
            if let Some(d) = a
                .dependents(upper.id)
                .find(|d| d.id != lower.id && d.fnct == trace.fnct)
            {
                return Some(d.id);
            }
            let nearest = a
                .dependents(upper.id)
                .filter(|d| d.id != lower.id && !d.is_trace() && !is_structural(&d.fnct))
                .min_by_key(|d| d.id.word.abs_diff(t.word));
            if let Some(d) = nearest {
                return Some(d.id);
            }
            lower = upper;
            upper = a.row(upper.dep)?;
        }
    }
}
