//! Bottom-up chart parsing driven by pattern frames.

pub mod analysis;
pub mod chart;
pub mod pattern;
pub mod score;

use std::fmt;
use std::path::Path;

use crate::binder::{Binder, PairList};
use crate::error::{ParseError, ResourceError};
use crate::grammar::{Grammar, Profile};
use crate::lexicon::Lexicon;
use crate::semnet::SemNet;
use crate::tagger::{build_lattice, tokenize, TerminalNode, Token};

pub use analysis::{flatten, Analysis, CorefTarget, GapFill, Row, RowId, Score, SentenceType};
pub use chart::{Chart, Child, Constituent, ConstituentId, Forest, Node};
pub use pattern::{apply_pattern, valency_filter, Draft, Position, Rejection, ValencyOutcome};

/// Everything a parse needs besides the sentence.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub grammar: Grammar,
    pub lexicon: Lexicon,
    pub semnet: SemNet,
    pub pairs: PairList,
}

impl Resources {
    pub const GRAMMAR_FILE: &'static str = "grammar.sg";
    pub const LEXICON_FILE: &'static str = "lexicon.sg";
    pub const SEMNET_FILE: &'static str = "semnet.sg";
    pub const PAIRS_FILE: &'static str = "pairs.tsv";

    /// Loads a resource directory. The semantic network and the pair list
    /// are optional.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Resources, ResourceError> {
        let dir = dir.as_ref();
        let semnet = dir.join(Self::SEMNET_FILE);
        let pairs = dir.join(Self::PAIRS_FILE);
        Ok(Resources {
            grammar: Grammar::load(dir.join(Self::GRAMMAR_FILE))?,
            lexicon: Lexicon::load(dir.join(Self::LEXICON_FILE))?,
            semnet: if semnet.exists() {
                SemNet::load(semnet)?
            } else {
                SemNet::default()
            },
            pairs: if pairs.exists() {
                PairList::load(pairs)?
            } else {
                PairList::default()
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseConfig {
    pub profile: String,
    /// Overrides the grammar's cycle budget.
    pub max_cycles: Option<u32>,
    /// Keep at most this many analyses.
    pub beam: Option<usize>,
    /// Record every frame application.
    pub explain: bool,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            profile: Profile::STRICT.to_string(),
            max_cycles: None,
            beam: None,
            explain: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExplainOutcome {
    Accepted {
        penalty: f64,
        valency: Vec<ValencyOutcome>,
    },
    Rejected(String),
}

/// One frame application attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplainEvent {
    pub cycle: u32,
    pub frame: String,
    pub span: String,
    pub outcome: ExplainOutcome,
}

impl fmt::Display for ExplainEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            ExplainOutcome::Accepted { penalty, valency } => {
                write!(
                    f,
                    "cycle {} accept {} [{}] penalty={}",
                    self.cycle, self.frame, self.span, penalty
                )?;
                for v in valency {
                    write!(
                        f,
                        "; {}: kept {{{}}} rejected {{{}}}",
                        v.lemma,
                        v.kept.join(","),
                        v.rejected.join(",")
                    )?;
                }
                Ok(())
            }
            ExplainOutcome::Rejected(reason) => {
                write!(
                    f,
                    "cycle {} reject {} [{}]: {}",
                    self.cycle, self.frame, self.span, reason
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub tokens: Vec<Token>,
    pub lattice: Vec<TerminalNode>,
    /// Best first.
    pub analyses: Vec<Analysis>,
    pub cycles: u32,
    /// The cycle budget ran out before a fixpoint; analyses are partial.
    pub budget_exhausted: bool,
    pub explain: Vec<ExplainEvent>,
    pub forest: Forest,
}

const FINAL_PUNCTUATION: [&str; 3] = [".", "!", "?"];

/// Parses one sentence.
pub fn parse(text: &str, res: &Resources, cfg: &ParseConfig) -> Result<ParseOutcome, ParseError> {
    let g = &res.grammar;
    let profile = g
        .profile(&cfg.profile)
        .ok_or_else(|| ParseError::UnknownProfile(cfg.profile.clone()))?;
    let mut tokens = tokenize(text);
    let final_punct = match tokens.last() {
        Some(t) if FINAL_PUNCTUATION.contains(&t.surface.as_str()) => {
            tokens.pop().map(|t| t.surface)
        }
        _ => None,
    };
    let sentence_type = SentenceType::from_punctuation(final_punct.as_deref());
    let lattice = build_lattice(&tokens, &res.lexicon);

    let mut parser = ChartParser {
        res,
        profile,
        chart: Chart::new(Forest::seeded(lattice.clone(), &res.lexicon)),
        explain: cfg.explain.then(Vec::new),
    };
    let max_cycles = cfg.max_cycles.unwrap_or_else(|| g.max_cycles());
    let mut fixpoint = false;
    let mut cycles = 0;
    while cycles < max_cycles {
        cycles += 1;
        if parser.run_cycle() == 0 {
            fixpoint = true;
            break;
        }
    }

    let last = lattice.iter().map(|n| n.end).max().unwrap_or(0);
    let forest = &parser.chart.forest;
    let mut analyses: Vec<Analysis> = Vec::new();
    if !tokens.is_empty() {
        for c in forest.iter() {
            if c.start != 0 || c.end != last || c.is_trace() || !g.is_root(&c.category) {
                continue;
            }
            let (rows, rank) = flatten(g, forest, c.id);
            let score = Score {
                penalty: c.penalty,
                rank,
                ..Score::default()
            };
            match analyses.iter().position(|a| a.rows == rows) {
                Some(k) => {
                    if score.ordering(&analyses[k].score).is_lt() {
                        analyses[k].score = score;
                    }
                }
                None => {
                    analyses.push(Analysis {
                        text: text.trim().to_string(),
                        sentence_type,
                        profile: profile.name.clone(),
                        rows,
                        score,
                        diagnostics: Vec::new(),
                        gaps: Vec::new(),
                    });
                }
            }
        }
    }

    let binder = Binder::new(res);
    for a in &mut analyses {
        binder.resolve_coordination(a);
        binder.bind_traces(a);
        let rank = std::mem::take(&mut a.score.rank);
        a.score = score::score(res, a, a.score.penalty, rank);
        if !fixpoint {
            a.diagnostics
                .push(format!("cycle budget of {max_cycles} exhausted"));
        }
    }
    analyses.sort_by(|a, b| a.score.ordering(&b.score));
    if let Some(k) = cfg.beam {
        analyses.truncate(k);
    }
    Ok(ParseOutcome {
        tokens,
        lattice,
        analyses,
        cycles,
        budget_exhausted: !fixpoint,
        explain: parser.explain.unwrap_or_default(),
        forest: parser.chart.forest,
    })
}

struct ChartParser<'r> {
    res: &'r Resources,
    profile: &'r Profile,
    chart: Chart,
    explain: Option<Vec<ExplainEvent>>,
}

impl ChartParser<'_> {
    /// Child sequences for every frame built from constituents of earlier
    /// cycles, with at least one child from the previous cycle.
    fn candidates(&self) -> Vec<(usize, Vec<ConstituentId>)> {
        let g = &self.res.grammar;
        let limit = self.chart.forest.len();
        let previous = self.chart.cycle;
        let mut out = Vec::new();
        for (fi, frame) in g.frames().iter().enumerate() {
            let cats: Vec<&str> = frame
                .seq
                .iter()
                .filter(|c| !g.is_trace(c))
                .map(String::as_str)
                .collect();
            let mut stack: Vec<Vec<ConstituentId>> = self
                .chart
                .with_category(cats[0])
                .iter()
                .filter(|id| id.0 < limit)
                .map(|id| vec![*id])
                .collect();
            while let Some(seq) = stack.pop() {
                if seq.len() == cats.len() {
                    if seq
                        .iter()
                        .any(|id| self.chart.forest.get(*id).cycle == previous)
                    {
                        out.push((fi, seq));
                    }
                    continue;
                }
                let end = self.chart.forest.get(*seq.last().unwrap()).end;
                for next in self.chart.starting(cats[seq.len()], end) {
                    if next.0 < limit {
                        let mut s = seq.clone();
                        s.push(*next);
                        stack.push(s);
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn run_cycle(&mut self) -> usize {
        let candidates = self.candidates();
        self.chart.cycle += 1;
        let cycle = self.chart.cycle;
        let g = &self.res.grammar;
        let mut added = 0;
        for (fi, seq) in candidates {
            let key = (fi, seq.clone());
            if self.chart.is_seen(&key) {
                continue;
            }
            let forest = &self.chart.forest;
            let result = apply_pattern(g, forest, fi, &seq, self.profile).and_then(|mut d| {
                let v = valency_filter(g, &self.res.lexicon, forest, &mut d)?;
                Ok((d, v))
            });
            if let Some(log) = &mut self.explain {
                let span: Vec<String> = seq.iter().map(|id| forest.covered_text(*id)).collect();
                log.push(ExplainEvent {
                    cycle,
                    frame: g.frames()[fi].id(),
                    span: span.join(" "),
                    outcome: match &result {
                        Ok((d, v)) => ExplainOutcome::Accepted {
                            penalty: d.penalty,
                            valency: v.clone(),
                        },
                        Err(r) => ExplainOutcome::Rejected(r.reason.clone()),
                    },
                });
            }
            if let Ok((draft, _)) = result {
                self.chart.add_draft(draft, key, cycle);
                added += 1;
            }
        }
        added
    }
}
