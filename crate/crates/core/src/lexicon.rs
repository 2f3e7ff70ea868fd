//! Meaning-related lexical database.
//!
//! File format (UTF-8, `#` comments):
//!
//! ```text
//! CLITIC gli PronDat                   # suffix split off verbal infinitives
//! CLITIC glielo glie:PronDat lo:PronAcc
//! SANDHI e                             # restored ending: lasciar+gli -> lasciare
//! LEMMA chiedere POS V
//! FORM chiede pers=3 num=sg mdv=ind tmp=pres
//! MNG 1.4 ctrl=iobj
//! subj cat=NP
//! arg cat=C mdv=inf conn=di
//! prep.arg cat=NP conn=a opt
//! SEMTAG ask-to-do
//! ```
//!
//! `SEMTAG` inside a `MNG` block links that meaning to a semantic network
//! node; placed before any `MNG` it sets the lemma's default node.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use crate::error::{read_file, ResourceError};
use crate::grammar::strip_comment;

pub type Features = BTreeMap<String, String>;

/// Penalty carried by the underspecified entries given to unknown words.
pub const FALLBACK_PENALTY: f64 = 2.0;
/// Open classes that receive fallback entries for unknown words.
pub const OPEN_CLASSES: [&str; 4] = ["N", "V", "Adj", "Adv"];

#[derive(Debug, Clone, PartialEq)]
pub struct WordEntry {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    pub morph: Features,
    /// Fixed token sequence for multiword expressions.
    pub multiword: Option<Vec<String>>,
    /// Clitics split off this (host) form, in surface order.
    pub clitic_suffixes: Option<Vec<String>>,
}

impl WordEntry {
    pub fn fallback(surface: &str, pos: &str) -> WordEntry {
        WordEntry {
            surface: surface.to_string(),
            lemma: surface.to_lowercase(),
            pos: pos.to_string(),
            morph: Features::new(),
            multiword: None,
            clitic_suffixes: None,
        }
    }

    pub fn feature(&self, key: &str) -> Option<&str> {
        self.morph.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Control {
    Subj,
    Iobj,
    Obj,
    None,
}

impl Control {
    pub fn parse(s: &str) -> Option<Control> {
        Some(match s {
            "subj" => Control::Subj,
            "iobj" => Control::Iobj,
            "obj" => Control::Obj,
            "none" => Control::None,
            _ => return None,
        })
    }

    /// The controlling function, if any.
    pub fn function(self) -> Option<&'static str> {
        match self {
            Control::Subj => Some("subj"),
            Control::Iobj => Some("iobj"),
            Control::Obj => Some("obj"),
            Control::None => None,
        }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.function().unwrap_or("none"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgSlot {
    pub function: String,
    pub cat: String,
    pub conn: Option<String>,
    pub mdv: Option<String>,
    pub opt: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeaningFrame {
    pub meaning_id: String,
    pub slots: Vec<ArgSlot>,
    pub ctrl: Control,
    pub sem_ref: Option<String>,
}

impl MeaningFrame {
    pub fn slot(&self, function: &str) -> Option<&ArgSlot> {
        self.slots.iter().find(|s| s.function == function)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaEntry {
    pub lemma: String,
    pub pos: String,
    pub sem: Option<String>,
    pub forms: Vec<WordEntry>,
    pub meanings: Vec<MeaningFrame>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliticRule {
    pub suffix: String,
    /// (surface, category) of each clitic in the suffix.
    pub parts: Vec<(String, String)>,
}

/// An agglutinated token split into a verbal host and its clitics.
#[derive(Debug, Clone, PartialEq)]
pub struct CliticSplit {
    pub host: WordEntry,
    pub clitics: Vec<WordEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    lemmas: Vec<LemmaEntry>,
    by_surface: HashMap<String, Vec<(usize, usize)>>,
    by_first_token: HashMap<String, Vec<(usize, usize)>>,
    clitics: Vec<CliticRule>,
    sandhi: Vec<String>,
}

impl Lexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, ResourceError> {
        let path = path.as_ref();
        let text = read_file(path)?;
        Lexicon::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<Lexicon, ResourceError> {
        let mut lex = Lexicon::default();
        let mut pending_clitics: Vec<(usize, CliticRule)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| ResourceError::syntax(origin, line_no, m);
            let (keyword, rest) = match line.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (line, ""),
            };
            match keyword {
                "CLITIC" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    let rule = match words.as_slice() {
                        [suffix, cat] if !cat.contains(':') => CliticRule {
                            suffix: suffix.to_lowercase(),
                            parts: vec![(suffix.to_lowercase(), cat.to_string())],
                        },
                        [suffix, parts @ ..] if !parts.is_empty() => {
                            let parts = parts
                                .iter()
                                .map(|p| {
                                    p.split_once(':')
                                        .map(|(s, c)| (s.to_lowercase(), c.to_string()))
                                        .ok_or_else(|| {
                                            err(format!("clitic part `{p}` needs surface:Category"))
                                        })
                                })
                                .collect::<Result<Vec<_>, _>>()?;
                            let joined: String = parts.iter().map(|(s, _)| s.as_str()).collect();
                            if joined != suffix.to_lowercase() {
                                return Err(err(format!("clitic parts do not spell `{suffix}`")));
                            }
                            CliticRule {
                                suffix: suffix.to_lowercase(),
                                parts,
                            }
                        }
                        _ => {
                            return Err(err(
                                "CLITIC takes <suffix> <Category> or <suffix> <part:Cat>...".into(),
                            ))
                        }
                    };
                    pending_clitics.push((line_no, rule));
                }
                "SANDHI" => lex.sandhi.extend(rest.split_whitespace().map(String::from)),
                "LEMMA" => {
                    let (lemma, tail) = split_surface(rest).map_err(&err)?;
                    let words: Vec<&str> = tail.split_whitespace().collect();
                    let ["POS", pos] = words.as_slice() else {
                        return Err(err("expected `LEMMA <lemma> POS <category>`".into()));
                    };
                    let lemma = lemma.as_str();
                    if lex
                        .lemmas
                        .iter()
                        .any(|l| l.lemma == *lemma && l.pos == *pos)
                    {
                        return Err(err(format!("lemma {lemma} ({pos}) declared twice")));
                    }
                    lex.lemmas.push(LemmaEntry {
                        lemma: lemma.to_string(),
                        pos: pos.to_string(),
                        sem: None,
                        forms: Vec::new(),
                        meanings: Vec::new(),
                    });
                }
                "FORM" => {
                    let entry = lex
                        .lemmas
                        .last_mut()
                        .ok_or_else(|| err("FORM outside a LEMMA block".into()))?;
                    let (surface, feats) = split_surface(rest).map_err(&err)?;
                    let morph = parse_features(feats).map_err(&err)?;
                    let tokens: Vec<String> =
                        surface.split_whitespace().map(String::from).collect();
                    entry.forms.push(WordEntry {
                        surface: surface.clone(),
                        lemma: entry.lemma.clone(),
                        pos: entry.pos.clone(),
                        morph,
                        multiword: (tokens.len() > 1).then_some(tokens),
                        clitic_suffixes: None,
                    });
                }
                "MNG" => {
                    let entry = lex
                        .lemmas
                        .last_mut()
                        .ok_or_else(|| err("MNG outside a LEMMA block".into()))?;
                    let mut words = rest.split_whitespace();
                    let id = words.next().ok_or_else(|| err("MNG needs an id".into()))?;
                    if entry.meanings.iter().any(|m| m.meaning_id == id) {
                        return Err(ResourceError::DuplicateMeaning {
                            origin: origin.to_string(),
                            line: line_no,
                            lemma: entry.lemma.clone(),
                            id: id.to_string(),
                        });
                    }
                    let mut ctrl = Control::None;
                    let mut sem_ref = None;
                    for w in words {
                        match w.split_once('=') {
                            Some(("ctrl", v)) => {
                                ctrl = Control::parse(v)
                                    .ok_or_else(|| err(format!("unknown control `{v}`")))?
                            }
                            Some(("sem", v)) => sem_ref = Some(v.to_string()),
                            _ => return Err(err(format!("unexpected `{w}` in MNG header"))),
                        }
                    }
                    entry.meanings.push(MeaningFrame {
                        meaning_id: id.to_string(),
                        slots: Vec::new(),
                        ctrl,
                        sem_ref,
                    });
                }
                "SEMTAG" => {
                    let entry = lex
                        .lemmas
                        .last_mut()
                        .ok_or_else(|| err("SEMTAG outside a LEMMA block".into()))?;
                    let node = rest
                        .split_whitespace()
                        .next()
                        .ok_or_else(|| err("SEMTAG needs a node id".into()))?;
                    match entry.meanings.last_mut() {
                        Some(m) => m.sem_ref = Some(node.to_string()),
                        None => entry.sem = Some(node.to_string()),
                    }
                }
                function if function.chars().next().is_some_and(char::is_lowercase) => {
                    let meaning = lex
                        .lemmas
                        .last_mut()
                        .and_then(|l| l.meanings.last_mut())
                        .ok_or_else(|| err(format!("slot `{function}` outside a MNG block")))?;
                    let slot = parse_slot(function, rest).map_err(&err)?;
                    if meaning.slot(&slot.function).is_some() {
                        return Err(err(format!(
                            "slot function `{}` repeated in meaning {}",
                            slot.function, meaning.meaning_id
                        )));
                    }
                    meaning.slots.push(slot);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        lex.index();
        for (line, rule) in pending_clitics {
            for (surface, cat) in &rule.parts {
                if lex.entries_exact(surface).all(|e| &e.pos != cat) {
                    return Err(ResourceError::syntax(
                        origin,
                        line,
                        format!("clitic `{surface}` has no {cat} entry"),
                    ));
                }
            }
            lex.clitics.push(rule);
        }
        Ok(lex)
    }

    fn index(&mut self) {
        for (li, l) in self.lemmas.iter().enumerate() {
            for (fi, f) in l.forms.iter().enumerate() {
                let key = f.surface.to_lowercase();
                if let Some(tokens) = &f.multiword {
                    self.by_first_token
                        .entry(tokens[0].to_lowercase())
                        .or_default()
                        .push((li, fi));
                } else {
                    self.by_surface.entry(key).or_default().push((li, fi));
                }
            }
        }
    }

    fn entries_exact<'a>(&'a self, surface: &str) -> impl Iterator<Item = &'a WordEntry> + 'a {
        self.by_surface
            .get(&surface.to_lowercase())
            .into_iter()
            .flatten()
            .map(|&(l, f)| &self.lemmas[l].forms[f])
    }

    /// Single-token entries for `surface`, in file order (case-insensitive).
    pub fn words(&self, surface: &str) -> Vec<&WordEntry> {
        self.entries_exact(surface).collect()
    }

    /// Multiword entries whose first token is `token`.
    pub fn multiwords_starting(&self, token: &str) -> Vec<&WordEntry> {
        self.by_first_token
            .get(&token.to_lowercase())
            .into_iter()
            .flatten()
            .map(|&(l, f)| &self.lemmas[l].forms[f])
            .collect()
    }

    /// Every reading of `surface`: direct entries, multiwords starting with
    /// it, and clitic-split hosts followed by their clitics.
    pub fn lookup(&self, surface: &str) -> Vec<WordEntry> {
        let mut out: Vec<WordEntry> = self.words(surface).into_iter().cloned().collect();
        out.extend(self.multiwords_starting(surface).into_iter().cloned());
        for split in self.clitic_splits(surface) {
            out.push(split.host);
            out.extend(split.clitics);
        }
        out
    }

    /// Splits an agglutinated verbal infinitive into host and clitics.
    pub fn clitic_splits(&self, token: &str) -> Vec<CliticSplit> {
        let lower = token.to_lowercase();
        let mut out = Vec::new();
        let endings: Vec<&str> = if self.sandhi.is_empty() {
            vec![""]
        } else {
            self.sandhi.iter().map(String::as_str).collect()
        };
        for rule in &self.clitics {
            let Some(stem_lower) = lower.strip_suffix(rule.suffix.as_str()) else {
                continue;
            };
            if stem_lower.is_empty() {
                continue;
            }
            let stem = &token[..stem_lower.len()];
            let mut pos_in_token = stem.len();
            let mut clitics = Vec::new();
            for (surface, cat) in &rule.parts {
                let Some(entry) = self.entries_exact(surface).find(|e| &e.pos == cat) else {
                    continue;
                };
                let mut entry = entry.clone();
                if let Some(s) = token.get(pos_in_token..pos_in_token + surface.len()) {
                    entry.surface = s.to_string();
                }
                pos_in_token += surface.len();
                clitics.push(entry);
            }
            if clitics.len() != rule.parts.len() {
                continue;
            }
            for ending in &endings {
                let form = format!("{stem_lower}{ending}");
                for host in self
                    .entries_exact(&form)
                    .filter(|e| e.pos == "V" && e.feature("mdv") == Some("inf"))
                {
                    let mut host = host.clone();
                    host.surface = stem.to_string();
                    host.clitic_suffixes =
                        Some(rule.parts.iter().map(|(s, _)| s.clone()).collect());
                    out.push(CliticSplit {
                        host,
                        clitics: clitics.clone(),
                    });
                }
            }
        }
        out
    }

    fn lemma_entry(&self, lemma: &str, pos: &str) -> Option<&LemmaEntry> {
        self.lemmas
            .iter()
            .find(|l| l.lemma == lemma && l.pos == pos)
    }

    /// Meanings of a lemma in declaration order; empty when unknown.
    pub fn meanings_of(&self, lemma: &str, pos: &str) -> &[MeaningFrame] {
        self.lemma_entry(lemma, pos).map_or(&[], |l| &l.meanings)
    }

    pub fn meaning(&self, lemma: &str, pos: &str, id: &str) -> Option<&MeaningFrame> {
        self.meanings_of(lemma, pos)
            .iter()
            .find(|m| m.meaning_id == id)
    }

    /// Semantic network node for a lemma, preferring the meaning's own link.
    pub fn sem_node(&self, lemma: &str, pos: &str, meaning: Option<&str>) -> String {
        let entry = self.lemma_entry(lemma, pos);
        meaning
            .and_then(|id| self.meaning(lemma, pos, id))
            .and_then(|m| m.sem_ref.clone())
            .or_else(|| entry.and_then(|l| l.sem.clone()))
            .unwrap_or_else(|| lemma.to_string())
    }

    pub fn lemmas(&self) -> &[LemmaEntry] {
        &self.lemmas
    }

    pub fn clitic_rules(&self) -> &[CliticRule] {
        &self.clitics
    }

    pub fn sandhi(&self) -> &[String] {
        &self.sandhi
    }
}

fn split_surface(rest: &str) -> Result<(String, &str), String> {
    if let Some(stripped) = rest.strip_prefix('"') {
        let end = stripped.find('"').ok_or("unterminated quoted surface")?;
        Ok((stripped[..end].to_string(), &stripped[end + 1..]))
    } else {
        match rest.split_once(char::is_whitespace) {
            Some((s, r)) => Ok((s.to_string(), r)),
            None if !rest.is_empty() => Ok((rest.to_string(), "")),
            None => Err("FORM needs a surface".into()),
        }
    }
}

fn parse_features(text: &str) -> Result<Features, String> {
    text.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| {
                    (
                        crate::grammar::constraint::canonical_feature(k),
                        v.to_string(),
                    )
                })
                .ok_or_else(|| format!("feature `{kv}` needs key=value"))
        })
        .collect()
}

fn parse_slot(function: &str, rest: &str) -> Result<ArgSlot, String> {
    let mut slot = ArgSlot {
        function: function.to_string(),
        cat: String::new(),
        conn: None,
        mdv: None,
        opt: false,
    };
    for w in rest.split_whitespace() {
        match w.split_once('=') {
            Some(("cat", v)) => slot.cat = v.to_string(),
            Some(("conn", v)) => slot.conn = Some(v.to_string()),
            Some(("mdv", v)) => slot.mdv = Some(v.to_string()),
            Some(("opt", "true")) => slot.opt = true,
            Some(("opt", "false")) => slot.opt = false,
            None if w == "opt" => slot.opt = true,
            _ => return Err(format!("unexpected `{w}` in slot `{function}`")),
        }
    }
    if slot.cat.is_empty() {
        return Err(format!("slot `{function}` needs cat=<Category>"));
    }
    Ok(slot)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"
CLITIC gli PronDat
CLITIC glielo glie:PronDat lo:PronAcc
SANDHI e
LEMMA gli POS PronDat
FORM gli pers=3 num=sg
FORM glie pers=3 num=sg
LEMMA lo POS PronAcc
FORM lo pers=3 num=sg gen=m
LEMMA lasciare POS V
FORM lasciare mdv=inf
MNG 1 ctrl=iobj
subj cat=NP
iobj cat=PronDat
arg cat=C mdv=inf
LEMMA write POS V
FORM written mdv=part tmp=past
LEMMA table POS N
FORM table num=sg
LEMMA "computer science" POS N
FORM "computer science" num=sg
"#;

    #[test]
    fn participle_lookup() {
        let lex = Lexicon::parse_str(FIXTURE, "t").unwrap();
        let e = lex.lookup("written");
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].lemma, "write");
        assert_eq!(e[0].pos, "V");
        assert_eq!(e[0].feature("mdv"), Some("part"));
        assert_eq!(e[0].feature("tmp"), Some("past"));
        assert!(lex.lookup("xyzzy").is_empty());
    }

    #[test]
    fn clitic_split() {
        let lex = Lexicon::parse_str(FIXTURE, "t").unwrap();
        let e = lex.lookup("lasciargli");
        let got: Vec<(&str, &str)> = e
            .iter()
            .map(|e| (e.lemma.as_str(), e.pos.as_str()))
            .collect();
        assert_eq!(got, [("lasciare", "V"), ("gli", "PronDat")]);
        assert_eq!(e[0].feature("mdv"), Some("inf"));
        assert_eq!(e[0].surface, "lasciar");
        let splits = lex.clitic_splits("lasciarglielo");
        assert_eq!(splits.len(), 1);
        assert_eq!(splits[0].clitics.len(), 2);
    }

    #[test]
    fn multiword_entries() {
        let lex = Lexicon::parse_str(FIXTURE, "t").unwrap();
        let m = lex.multiwords_starting("computer");
        assert_eq!(m.len(), 1);
        assert_eq!(
            m[0].multiword.as_deref(),
            Some(&["computer".to_string(), "science".to_string()][..])
        );
        assert!(lex.words("computer").is_empty());
    }

    #[test]
    fn meanings() {
        let lex = Lexicon::parse_str(FIXTURE, "t").unwrap();
        assert!(lex.meanings_of("table", "V").is_empty());
        let m = &lex.meanings_of("lasciare", "V")[0];
        assert_eq!(m.ctrl, Control::Iobj);
        assert_eq!(m.slots.len(), 3);
    }

    #[test]
    fn empty_and_errors() {
        let lex = Lexicon::parse_str("", "t").unwrap();
        assert!(lex.lookup("anything").is_empty());
        let dup = "LEMMA x POS V\nMNG 1.4\nsubj cat=NP\nMNG 1.4\n";
        assert!(matches!(
            Lexicon::parse_str(dup, "t"),
            Err(ResourceError::DuplicateMeaning { line: 4, .. })
        ));
        let repeated = "LEMMA x POS V\nMNG 1\nsubj cat=NP\nsubj cat=NP\n";
        assert!(Lexicon::parse_str(repeated, "t").is_err());
        assert!(Lexicon::parse_str("FORM x\n", "t").is_err());
        assert!(Lexicon::parse_str("CLITIC gli PronDat\n", "t").is_err());
    }
}
