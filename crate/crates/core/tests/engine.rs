mod common;

use common::*;
use valenz::binder::{disambiguate_attachment, Binder};
use valenz::engine::{parse, CorefTarget, ParseConfig, RowId};
use valenz::error::ParseError;
use valenz::grammar::{validate_grammar, validate_semantics};
use valenz::output::{crossing_arcs, to_columns};

#[test]
fn shipped_resources_are_clean() {
    for lang in ["en", "it"] {
        let res = resources(lang);
        assert!(
            validate_grammar(&res.grammar, &res.lexicon).is_empty(),
            "{lang}"
        );
        assert!(
            validate_semantics(&res.lexicon, &res.semnet).is_empty(),
            "{lang}"
        );
    }
}

#[test]
fn single_noun_is_a_root_np() {
    let res = resources("en");
    let a = best(&res, "hamburger");
    assert_eq!(a.rows.len(), 1);
    assert_eq!(a.rows[0].dep, RowId::ROOT);
    assert_eq!(a.rows[0].cat, "N");
}

#[test]
fn empty_input_has_no_analysis() {
    let res = resources("en");
    let out = parse("   ", &res, &ParseConfig::default()).unwrap();
    assert!(out.analyses.is_empty());
    assert!(out.tokens.is_empty());
}

#[test]
fn unknown_profile_is_an_error() {
    let res = resources("en");
    let err = parse("Paul eats", &res, &config("casual")).unwrap_err();
    assert!(matches!(err, ParseError::UnknownProfile(p) if p == "casual"));
}

#[test]
fn control_sentence_columns_have_one_trace() {
    let res = resources("en");
    let a = best(&res, "Paul wants to eat a hamburger.");
    let cols = to_columns(&a);
    let body: Vec<&str> = cols
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("ID"))
        .collect();
    assert_eq!(body.len(), 7);
    assert_eq!(body.iter().filter(|l| l.starts_with("2.1\t")).count(), 1);
    assert!(cols.contains("# sentence_type = assertive"));
}

#[test]
fn raised_clitic_object_binds_intermediate_trace() {
    let res = resources("it");
    let a = best(&res, "Paolo chiede a Luigi di poterla prendere");
    assert_eq!(
        trace_antecedent(&a, "Ts", "potere").as_deref(),
        Some("Luigi")
    );
    assert_eq!(
        trace_antecedent(&a, "Ts", "prendere").as_deref(),
        Some("Luigi")
    );
    assert_eq!(
        trace_antecedent(&a, "Ti", "prendere").as_deref(),
        Some("la")
    );
}

#[test]
fn coordinated_objects_share_the_verb() {
    let res = resources("en");
    let a = best(&res, "Paul eats a hamburger and a salad");
    let eats = row_by_form(&a, "eats").id;
    let hamburger = row_by_form(&a, "hamburger");
    let salad = row_by_form(&a, "salad");
    assert_eq!((hamburger.dep, hamburger.fnct.as_str()), (eats, "obj"));
    assert_eq!((salad.dep, salad.fnct.as_str()), (eats, "obj"));
    assert!(salad.secondary.contains(&(hamburger.id, "coord".into())));
}

#[test]
fn gapping_copies_the_adverb() {
    let res = resources("en");
    let a = best(&res, "Paul eats a hamburger today and Mary a salad");
    let eats = row_by_form(&a, "eats").id;
    let today = row_by_form(&a, "today").id;
    let gap = a.rows.iter().find(|r| r.cat == "Tv").unwrap();
    assert_eq!(gap.coref, [CorefTarget::Row(eats)]);
    let copy = a
        .rows
        .iter()
        .find(|r| r.cat == "Ti" && r.dep == gap.id)
        .unwrap();
    assert_eq!(copy.fnct, "mod");
    assert_eq!(copy.coref, [CorefTarget::Row(today)]);
    assert_eq!(a.gaps.len(), 1);
    assert_eq!(a.gaps[0].copied, [today]);
    let new: Vec<&str> = a.gaps[0]
        .new_elements
        .iter()
        .map(|(_, f)| f.as_str())
        .collect();
    assert_eq!(new, ["subj", "obj"]);
}

#[test]
fn shared_modifier_gets_second_head() {
    let res = resources("en");
    let a = best(&res, "Good drinks and food");
    let food = row_by_form(&a, "food").id;
    let good = row_by_form(&a, "Good");
    assert_eq!(good.dep, row_by_form(&a, "drinks").id);
    assert!(good.secondary.contains(&(food, "mod".into())));
    // Both heads sit to the right of the modifier, so the arcs nest.
    assert!(crossing_arcs(&a).is_empty());
}

#[test]
fn specifier_shared_only_between_similar_heads() {
    let res = resources("en");
    let a = best(
        &res,
        "A thing made of teeth and bones of some kind of animal",
    );
    let teeth = row_by_form(&a, "teeth").id;
    let kind = row_by_form(&a, "kind");
    assert_eq!(kind.dep, row_by_form(&a, "bones").id);
    assert!(kind.secondary.contains(&(teeth, "rmod".into())));

    let a = best(
        &res,
        "A thing made of wood and bones of some kind of animal",
    );
    assert!(row_by_form(&a, "kind").secondary.is_empty());
}

#[test]
fn places_attach_as_locatives() {
    let res = resources("en");
    let text =
        "He graduated in linguistics in Paris, philosophy of language and computer science in Rome";
    let a = best(&res, text);
    let graduated = row_by_form(&a, "graduated").id;
    let paris = row_by_form(&a, "Paris");
    assert_eq!((paris.dep, paris.fnct.as_str()), (graduated, "loc"));
    let gap = a.rows.iter().find(|r| r.cat == "Tv").unwrap();
    assert_eq!(gap.coref, [CorefTarget::Row(graduated)]);
    let rome = row_by_form(&a, "Rome");
    assert_eq!((rome.dep, rome.fnct.as_str()), (gap.id, "loc"));
    let philosophy = row_by_form(&a, "philosophy").id;
    let science = row_by_form(&a, "computer science");
    assert_eq!((science.dep, science.fnct.as_str()), (gap.id, "prep.arg"));
    assert!(science.secondary.contains(&(philosophy, "coord".into())));
    assert_eq!(trace_antecedent(&a, "Ts", "-").as_deref(), Some("he"));
}

#[test]
fn known_links_decide_attachment_order() {
    let res = resources("en");
    let text =
        "He graduated in linguistics in Paris, philosophy of language and computer science in Rome";
    let mut all = parse(text, &res, &ParseConfig::default()).unwrap().analyses;
    all.reverse();
    let ranked = disambiguate_attachment(all, &res);
    let paris = row_by_form(&ranked[0], "Paris");
    assert_eq!(paris.fnct, "loc");
}

#[test]
fn relaxed_agreement_costs_the_profile_weight() {
    for (lang, text) in [
        ("en", "Paul eats a cherries"),
        ("it", "Paolo prende il automobile"),
    ] {
        let res = resources(lang);
        assert!(parse(text, &res, &ParseConfig::default())
            .unwrap()
            .analyses
            .is_empty());
        let relaxed = parse(text, &res, &config("informal")).unwrap().analyses;
        assert_eq!(relaxed[0].score.penalty, 1.0, "{text}");
        assert_eq!(relaxed[0].profile, "informal");
    }
}

#[test]
fn exhausted_budget_is_reported() {
    let res = resources("en");
    let cfg = ParseConfig {
        max_cycles: Some(1),
        ..ParseConfig::default()
    };
    let out = parse("Paul wants to eat a hamburger", &res, &cfg).unwrap();
    assert!(out.budget_exhausted);
    assert_eq!(out.cycles, 1);
    let full = parse(
        "Paul wants to eat a hamburger",
        &res,
        &ParseConfig::default(),
    )
    .unwrap();
    assert!(!full.budget_exhausted);
    assert!(full.analyses[0].diagnostics.is_empty());
}

#[test]
fn explain_shows_meaning_selection() {
    let res = resources("it");
    let cfg = ParseConfig {
        explain: true,
        ..ParseConfig::default()
    };
    let out = parse(
        "Paolo chiede a Giovanni di lasciargli prendere l'automobile",
        &res,
        &cfg,
    )
    .unwrap();
    let lines: Vec<String> = out.explain.iter().map(|e| e.to_string()).collect();
    assert!(
        lines.iter().any(|l| l.contains("accept C 0")
            && l.contains("chiedere: kept {1.4} rejected {1.1,1.2,1.3}")),
        "{lines:#?}"
    );
    assert!(lines.iter().any(|l| l.contains("reject")));
}

#[test]
fn binding_twice_changes_nothing() {
    for (lang, text) in FIXTURES {
        let res = resources(lang);
        let binder = Binder::new(&res);
        for a in parse(text, &res, &config("informal")).unwrap().analyses {
            let mut again = a.clone();
            binder.bind_traces(&mut again);
            assert_eq!(again.rows, a.rows, "{text}");
        }
    }
}

#[test]
fn unbound_trace_points_to_discourse() {
    let res = resources("en");
    let a = best(&res, "Paul eats a hamburger today and Mary a salad");
    assert!(a
        .rows
        .iter()
        .filter(|r| r.is_trace())
        .all(|r| !r.coref.is_empty()));
    let out = parse("Paul picks", &res, &ParseConfig::default()).unwrap();
    let a = &out.analyses[0];
    let to = a.rows.iter().find(|r| r.cat == "To").unwrap();
    assert_eq!(to.coref, [CorefTarget::Discourse]);
    assert!(a.diagnostics.iter().any(|d| d.contains("no antecedent")));
}
