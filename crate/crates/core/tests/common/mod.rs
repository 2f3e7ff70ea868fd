#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use valenz::binder::Binder;
use valenz::engine::{
    apply_pattern, flatten, parse, valency_filter, Analysis, ConstituentId, CorefTarget, Forest,
    ParseConfig, Resources, Row, RowId, Score, SentenceType,
};
use valenz::tagger::{build_lattice, tokenize};

pub fn res_dir(lang: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("res")
        .join(lang)
}

pub fn resources(lang: &str) -> Resources {
    Resources::load_dir(res_dir(lang)).expect("shipped resources load")
}

/// Sentences the shipped resources are expected to analyse, by language.
pub const FIXTURES: [(&str, &str); 14] = [
    (
        "it",
        "Paolo chiede a Giovanni di lasciargli prendere l'automobile",
    ),
    ("it", "Paolo chiede a Luigi di poterla prendere"),
    ("it", "Paolo prende il automobile"),
    ("en", "Paul wants to eat a hamburger"),
    ("en", "John bought a dog for Bill to give to Mary"),
    ("en", "This book has been written by Carver"),
    ("en", "James builds and repairs computers"),
    ("en", "Paul picks and Mary eats cherries"),
    ("en", "Paul eats a hamburger and a salad"),
    ("en", "Paul eats a hamburger today and Mary a salad"),
    ("en", "Good drinks and food"),
    (
        "en",
        "A thing made of teeth and bones of some kind of animal",
    ),
    (
        "en",
        "He graduated in linguistics in Paris, philosophy of language and computer science in Rome",
    ),
    ("en", "Paul eats a cherries"),
];

pub fn config(profile: &str) -> ParseConfig {
    ParseConfig {
        profile: profile.to_string(),
        ..ParseConfig::default()
    }
}

pub fn best(res: &Resources, text: &str) -> Analysis {
    parse(text, res, &ParseConfig::default())
        .expect("parse")
        .analyses
        .into_iter()
        .next()
        .unwrap_or_else(|| panic!("no analysis for {text:?}"))
}

pub fn row_by_form<'a>(a: &'a Analysis, form: &str) -> &'a Row {
    a.rows
        .iter()
        .find(|r| r.form.as_deref() == Some(form))
        .unwrap_or_else(|| panic!("no row {form}"))
}

pub fn lemma_of(a: &Analysis, id: RowId) -> String {
    a.row(id)
        .and_then(|r| r.lemma.clone())
        .unwrap_or_else(|| "-".to_string())
}

/// (dependent lemma, function, head lemma) for every overt argument row.
pub fn argument_triples(res: &Resources, a: &Analysis) -> BTreeSet<(String, String, String)> {
    a.rows
        .iter()
        .filter(|r| !r.is_trace() && r.dep != RowId::ROOT && res.grammar.is_arg_function(&r.fnct))
        .map(|r| {
            (
                r.lemma.clone().unwrap_or_default(),
                r.fnct.clone(),
                lemma_of(a, r.dep),
            )
        })
        .collect()
}

pub fn triple(d: &str, f: &str, h: &str) -> (String, String, String) {
    (d.to_string(), f.to_string(), h.to_string())
}

/// Lemma of the overt antecedent of the trace of category `cat` governed
/// by the row with lemma `head`.
pub fn trace_antecedent(a: &Analysis, cat: &str, head: &str) -> Option<String> {
    let t = a
        .rows
        .iter()
        .find(|r| r.is_trace() && r.cat == cat && lemma_of(a, r.dep) == head)?;
    match t.coref.first()? {
        CorefTarget::Row(id) => Some(lemma_of(a, *id)),
        CorefTarget::Discourse => None,
    }
}

/// Exhaustive derivation over every span, smallest spans first, without
/// cycles or agenda. Returns each distinct bound row set with its lowest
/// penalty.
pub fn brute_force(res: &Resources, text: &str, profile: &str) -> Vec<(Vec<Row>, f64)> {
    let g = &res.grammar;
    let profile = g.profile(profile).expect("profile");
    let mut tokens = tokenize(text);
    if tokens
        .last()
        .is_some_and(|t| [".", "!", "?"].contains(&t.surface.as_str()))
    {
        tokens.pop();
    }
    let lattice = build_lattice(&tokens, &res.lexicon);
    let last = lattice.iter().map(|n| n.end).max().unwrap_or(0);
    let mut forest = Forest::seeded(lattice, &res.lexicon);
    let mut seen: BTreeSet<(usize, Vec<ConstituentId>)> = BTreeSet::new();

    let items = |forest: &Forest, cat: &str, s: usize, e: usize| -> Vec<ConstituentId> {
        forest
            .iter()
            .filter(|c| !c.is_trace() && c.category == cat && c.start == s && c.end == e)
            .map(|c| c.id)
            .collect()
    };
    for len in 1..=last {
        for s in 0..=last - len {
            let e = s + len;
            loop {
                let mut added = false;
                for (fi, frame) in g.frames().iter().enumerate() {
                    let cats: Vec<&str> = frame
                        .seq
                        .iter()
                        .filter(|c| !g.is_trace(c))
                        .map(String::as_str)
                        .collect();
                    for cuts in segmentations(s, e, cats.len()) {
                        let mut seqs: Vec<Vec<ConstituentId>> = vec![Vec::new()];
                        for (k, cat) in cats.iter().enumerate() {
                            let here = items(&forest, cat, cuts[k], cuts[k + 1]);
                            seqs = seqs
                                .into_iter()
                                .flat_map(|p| {
                                    here.iter().map(move |id| {
                                        let mut q = p.clone();
                                        q.push(*id);
                                        q
                                    })
                                })
                                .collect();
                        }
                        for seq in seqs {
                            if !seen.insert((fi, seq.clone())) {
                                continue;
                            }
                            let Ok(mut d) = apply_pattern(g, &forest, fi, &seq, profile) else {
                                continue;
                            };
                            if valency_filter(g, &res.lexicon, &forest, &mut d).is_ok() {
                                forest.add_draft(d, 1);
                                added = true;
                            }
                        }
                    }
                }
                if !added {
                    break;
                }
            }
        }
    }

    let binder = Binder::new(res);
    let mut out: Vec<(Vec<Row>, f64)> = Vec::new();
    let roots: Vec<ConstituentId> = forest
        .iter()
        .filter(|c| c.start == 0 && c.end == last && !c.is_trace() && g.is_root(&c.category))
        .map(|c| c.id)
        .collect();
    for root in roots {
        let (rows, _) = flatten(g, &forest, root);
        let mut a = Analysis {
            text: text.to_string(),
            sentence_type: SentenceType::Assertive,
            profile: profile.name.clone(),
            rows,
            score: Score::default(),
            diagnostics: Vec::new(),
            gaps: Vec::new(),
        };
        binder.resolve_coordination(&mut a);
        binder.bind_traces(&mut a);
        let penalty = forest.get(root).penalty;
        match out.iter_mut().find(|(r, _)| *r == a.rows) {
            Some(entry) => entry.1 = entry.1.min(penalty),
            None => out.push((a.rows, penalty)),
        }
    }
    out
}

/// Every way to cut [s, e) into `n` non-empty contiguous pieces, as cut points.
fn segmentations(s: usize, e: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![vec![s, e]];
    }
    let mut out = Vec::new();
    for mid in s + 1..e {
        for rest in segmentations(mid, e, n - 1) {
            let mut v = vec![s];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Engine output in the same shape as [`brute_force`].
pub fn engine_set(res: &Resources, text: &str, profile: &str) -> Vec<(Vec<Row>, f64)> {
    let cfg = ParseConfig {
        max_cycles: Some(1000),
        ..config(profile)
    };
    parse(text, res, &cfg)
        .expect("parse")
        .analyses
        .into_iter()
        .map(|a| (a.rows, a.score.penalty))
        .collect()
}

/// Order-insensitive equality of two analysis sets.
pub fn same_set(x: &[(Vec<Row>, f64)], y: &[(Vec<Row>, f64)]) -> bool {
    x.len() == y.len()
        && x.iter()
            .all(|(r, p)| y.iter().any(|(r2, p2)| r == r2 && p == p2))
}
