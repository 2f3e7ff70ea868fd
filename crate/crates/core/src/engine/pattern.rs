//! Applying one pattern frame to a candidate child sequence, and the lexical
//! valency check for clause-level constituents.

use crate::engine::chart::{Child, Constituent, ConstituentId, Forest};
use crate::grammar::{CandidateView, EvalContext, Grammar, PatternFrame, Profile};
use crate::lexicon::{ArgSlot, Features, Lexicon};

/// Categories whose bare terminals count as connective words.
pub const CONNECTIVE_CATEGORIES: [&str; 2] = ["Prep", "Conj"];

#[derive(Debug, Clone, PartialEq)]
pub enum Position {
    Surface(ConstituentId),
    /// A trace of the given category anchored at a vertex.
    Trace {
        category: String,
        anchor: usize,
    },
}

/// A constituent that passed the frame constraints but is not yet in the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Draft {
    pub frame: usize,
    pub category: String,
    pub start: usize,
    pub end: usize,
    pub positions: Vec<Position>,
    pub functions: Vec<String>,
    pub governors: Vec<Option<usize>>,
    pub head: usize,
    pub lemma: Option<String>,
    pub surface: Option<String>,
    pub features: Features,
    pub connective: Option<String>,
    pub penalty: f64,
    pub soft: Vec<String>,
    /// Meanings of the head after the valency check.
    pub meanings: Vec<String>,
    /// Lexical heads whose meanings the valency check narrowed here.
    pub narrowed: Vec<(ConstituentId, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub reason: String,
}

impl Rejection {
    fn new(reason: impl Into<String>) -> Self {
        Rejection {
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValencyOutcome {
    pub lemma: String,
    pub kept: Vec<String>,
    pub rejected: Vec<String>,
}

fn is_connective_word(g: &Grammar, c: &Constituent) -> bool {
    matches!(c.node, crate::engine::chart::Node::Terminal(_))
        && CONNECTIVE_CATEGORIES.iter().any(|k| g.is_a(&c.category, k))
}

/// Matches `frame` against `surface` (the non-trace positions in order) and
/// evaluates its constraints under `profile`.
pub fn apply_pattern(
    g: &Grammar,
    forest: &Forest,
    frame_idx: usize,
    surface: &[ConstituentId],
    profile: &Profile,
) -> Result<Draft, Rejection> {
    let frame: &PatternFrame = &g.frames()[frame_idx];
    let surface_cats: Vec<&String> = frame.seq.iter().filter(|c| !g.is_trace(c)).collect();
    if surface_cats.len() != surface.len() {
        return Err(Rejection::new("wrong number of children"));
    }
    for (want, id) in surface_cats.iter().zip(surface) {
        let c = forest.get(*id);
        if &&c.category != want {
            return Err(Rejection::new(format!(
                "expected {want}, found {}",
                c.category
            )));
        }
    }
    for w in surface.windows(2) {
        if forest.get(w[0]).end != forest.get(w[1]).start {
            return Err(Rejection::new("children are not contiguous"));
        }
    }
    let start = forest.get(surface[0]).start;
    let end = forest.get(*surface.last().unwrap()).end;
    if let [only] = surface {
        if forest
            .unary_chain(*only)
            .iter()
            .any(|d| forest.get(*d).category == frame.category)
        {
            return Err(Rejection::new("unary cycle"));
        }
    }

    let mut positions = Vec::with_capacity(frame.len());
    let mut vertex = start;
    let mut next = surface.iter();
    for cat in &frame.seq {
        if g.is_trace(cat) {
            positions.push(Position::Trace {
                category: cat.clone(),
                anchor: vertex,
            });
        } else {
            let id = *next.next().unwrap();
            vertex = forest.get(id).end;
            positions.push(Position::Surface(id));
        }
    }

    let empty = Features::new();
    let views: Vec<CandidateView<'_>> = positions
        .iter()
        .map(|p| match p {
            Position::Surface(id) => {
                let c = forest.get(*id);
                CandidateView {
                    category: &c.category,
                    lemma: c.lemma.as_deref(),
                    surface: c.surface.as_deref(),
                    features: &c.features,
                    connective: c.connective.as_deref(),
                    is_trace: false,
                    is_connective_word: is_connective_word(g, c),
                }
            }
            Position::Trace { category, .. } => CandidateView {
                category,
                lemma: None,
                surface: None,
                features: &empty,
                connective: None,
                is_trace: true,
                is_connective_word: false,
            },
        })
        .collect();
    let head = frame.head();
    let is_a = |a: &str, b: &str| g.is_a(a, b);
    let ctx = EvalContext {
        candidates: &views,
        head,
        profile,
        is_a: &is_a,
    };
    let mut penalty: f64 = surface.iter().map(|id| forest.get(*id).penalty).sum();
    let mut soft = Vec::new();
    for (i, cst) in frame.cst.iter().enumerate() {
        let ev = cst.evaluate(&ctx, i);
        if let Some(atom) = ev.hard {
            return Err(Rejection::new(format!("position {}: {atom} fails", i + 1)));
        }
        penalty += ev.penalty;
        soft.extend(
            ev.soft
                .into_iter()
                .map(|a| format!("position {}: {a}", i + 1)),
        );
    }

    let governors: Vec<Option<usize>> = (0..frame.len()).map(|i| frame.governor(i)).collect();
    let (lemma, surface_form, mut features, meanings) = match &positions[head] {
        Position::Surface(id) => {
            let h = forest.get(*id);
            (
                h.lemma.clone(),
                h.surface.clone(),
                h.features.clone(),
                h.meanings.clone(),
            )
        }
        Position::Trace { .. } => (None, None, Features::new(), Vec::new()),
    };
    for (i, p) in positions.iter().enumerate() {
        if let (Position::Surface(id), "aux") = (p, frame.fnct[i].as_str()) {
            for (k, v) in &forest.get(*id).features {
                features.entry(k.clone()).or_insert_with(|| v.clone());
            }
        }
    }
    // A coordination keeps its first conjunct's connective; the
    // coordinating word is not a subordinator.
    let coordination = frame.fnct.iter().any(|f| f == "coord");
    let connective = positions.iter().enumerate().find_map(|(i, p)| match p {
        Position::Surface(id) if coordination && i == head => forest.get(*id).connective.clone(),
        Position::Surface(id)
            if !coordination && frame.fnct[i] == "conn" && governors[i] == Some(head) =>
        {
            forest.get(*id).lemma.clone()
        }
        _ => None,
    });
    Ok(Draft {
        frame: frame_idx,
        category: frame.category.clone(),
        start,
        end,
        positions,
        functions: frame.fnct.clone(),
        governors,
        head,
        lemma,
        surface: surface_form,
        features,
        connective,
        penalty,
        soft,
        meanings,
        narrowed: Vec::new(),
    })
}

struct ArgChild<'a> {
    function: &'a str,
    /// `None` for trace fillers, which fit any slot category.
    filler: Option<&'a Constituent>,
}

fn slot_fits(g: &Grammar, arg: &ArgChild<'_>, slot: &ArgSlot) -> bool {
    if !g.function_matches(arg.function, &slot.function) {
        return false;
    }
    let Some(c) = arg.filler else {
        return true;
    };
    g.is_a(&c.category, &slot.cat)
        && c.connective.as_deref().map(str::to_lowercase)
            == slot.conn.as_deref().map(str::to_lowercase)
        && slot
            .mdv
            .as_ref()
            .is_none_or(|m| c.features.get("mdv") == Some(m))
}

/// True when every argument child is licensed by a distinct slot and every
/// non-optional slot is filled.
fn licenses(g: &Grammar, args: &[ArgChild<'_>], slots: &[ArgSlot]) -> bool {
    fn go(g: &Grammar, args: &[ArgChild<'_>], slots: &[ArgSlot], used: &mut [bool]) -> bool {
        let Some((first, rest)) = args.split_first() else {
            return slots.iter().zip(used.iter()).all(|(s, &u)| u || s.opt);
        };
        for k in 0..slots.len() {
            if !used[k] && slot_fits(g, first, &slots[k]) {
                used[k] = true;
                if go(g, rest, slots, used) {
                    return true;
                }
                used[k] = false;
            }
        }
        false
    }
    go(g, args, slots, &mut vec![false; slots.len()])
}

fn split_meanings(
    g: &Grammar,
    lex: &Lexicon,
    head: &Constituent,
    meanings: &[String],
    args: &[ArgChild<'_>],
) -> ValencyOutcome {
    let lemma = head.lemma.clone().unwrap_or_default();
    let mut out = ValencyOutcome {
        lemma: lemma.clone(),
        ..ValencyOutcome::default()
    };
    for id in meanings {
        let ok = lex
            .meaning(&lemma, &head.category, id)
            .is_some_and(|m| licenses(g, args, &m.slots));
        if ok {
            out.kept.push(id.clone());
        } else {
            out.rejected.push(id.clone());
        }
    }
    out
}

/// Narrows the head's meanings to those whose slots license the draft's
/// argument children. Applies only to clausal drafts over a non-clausal
/// head that still has meanings; coordinated heads are checked as well.
pub fn valency_filter(
    g: &Grammar,
    lex: &Lexicon,
    forest: &Forest,
    draft: &mut Draft,
) -> Result<Vec<ValencyOutcome>, Rejection> {
    let Position::Surface(head_id) = draft.positions[draft.head] else {
        return Ok(Vec::new());
    };
    let head = forest.get(head_id);
    if !g.is_clausal(&draft.category) || g.is_clausal(&head.category) || draft.meanings.is_empty() {
        return Ok(Vec::new());
    }
    let args: Vec<ArgChild<'_>> = draft
        .positions
        .iter()
        .zip(&draft.functions)
        .filter(|(_, f)| g.is_arg_function(f))
        .map(|(p, f)| ArgChild {
            function: f,
            filler: match p {
                Position::Surface(id) => Some(forest.get(*id)),
                Position::Trace { .. } => None,
            },
        })
        .collect();

    let lexical = forest.get(head.lexical_head);
    let main = split_meanings(g, lex, lexical, &draft.meanings, &args);
    if main.kept.is_empty() {
        return Err(Rejection::new(format!(
            "no meaning of {} licenses the arguments",
            main.lemma
        )));
    }
    let mut outcomes = vec![main];
    draft
        .narrowed
        .push((head.lexical_head, outcomes[0].kept.clone()));
    draft.meanings = outcomes[0].kept.clone();

    for member in coordinated_heads(forest, head_id) {
        let m = forest.get(member);
        if m.meanings.is_empty() {
            continue;
        }
        let o = split_meanings(g, lex, m, &m.meanings, &args);
        if o.kept.is_empty() {
            return Err(Rejection::new(format!(
                "no meaning of coordinated {} licenses the arguments",
                o.lemma
            )));
        }
        draft.narrowed.push((member, o.kept.clone()));
        outcomes.push(o);
    }
    Ok(outcomes)
}

/// Lexical heads of the `coord` dependents found along the head chain.
fn coordinated_heads(forest: &Forest, mut id: ConstituentId) -> Vec<ConstituentId> {
    let mut out = Vec::new();
    loop {
        let c = forest.get(id);
        for ch in c.children() {
            if ch.function == "coord" {
                let member = forest.get(ch.id);
                if !member.is_trace() {
                    out.push(member.lexical_head);
                    out.extend(coordinated_heads(forest, ch.id));
                }
            }
        }
        match c.head_child() {
            Some(Child { id: next, .. }) => id = *next,
            None => return out,
        }
    }
}
