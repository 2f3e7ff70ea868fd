//! Tokenization and the terminal lattice that seeds the chart.
//!
//! Tokens are separated at whitespace; the punctuation marks in
//! [`PUNCTUATION`] are tokens of their own, and an elided form ending in an
//! apostrophe is split from the following word (`l'automobile` gives `l'`
//! and `automobile`). Every lexicon reading is kept: no disambiguation
//! happens before the chart.

use std::fmt::Write as _;

use crate::lexicon::{Features, Lexicon, WordEntry, FALLBACK_PENALTY, OPEN_CLASSES};

pub const PUNCTUATION: &[char] = &[',', ';', ':', '.', '!', '?', '(', ')', '"', '«', '»'];
/// Category given to punctuation tokens.
pub const PUNCT: &str = "Punct";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    /// Byte offsets into the input.
    pub char_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminalNode {
    /// First and last covered token (1-based, inclusive).
    pub first: usize,
    pub last: usize,
    /// 0 for whole-token readings, 1.. for the parts of a clitic split.
    pub sub: usize,
    /// Lattice vertices; nodes are contiguous when `a.end == b.start`.
    pub start: usize,
    pub end: usize,
    pub entry: WordEntry,
    pub penalty: f64,
}

impl TerminalNode {
    pub fn range_label(&self) -> String {
        match (self.sub, self.first == self.last) {
            (0, true) => self.first.to_string(),
            (0, false) => format!("{}-{}", self.first, self.last),
            (s, _) => format!("{}.{}", self.first, s),
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                spans.push((s, i));
            }
        } else if PUNCTUATION.contains(&c) {
            if let Some(s) = start.take() {
                spans.push((s, i));
            }
            spans.push((i, i + c.len_utf8()));
        } else {
            let s = *start.get_or_insert(i);
            if is_apostrophe(c) && chars.peek().is_some_and(|&(_, n)| n.is_alphabetic()) {
                let end = i + c.len_utf8();
                spans.push((s, end));
                start = None;
            }
        }
    }
    if let Some(s) = start {
        spans.push((s, text.len()));
    }
    spans
        .into_iter()
        .enumerate()
        .map(|(k, (s, e))| Token {
            index: k + 1,
            surface: text[s..e].to_string(),
            char_span: (s, e),
        })
        .collect()
}

/// Splits running text after `.`, `!` or `?` outside double quotes.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut quoted = false;
    for c in text.chars() {
        current.push(c);
        match c {
            '"' => quoted = !quoted,
            '.' | '!' | '?' if !quoted => {
                let s = current.trim();
                if !s.is_empty() {
                    out.push(s.to_string());
                }
                current.clear();
            }
            _ => {}
        }
    }
    let s = current.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
    out
}

fn punct_entry(surface: &str) -> WordEntry {
    WordEntry {
        surface: surface.to_string(),
        lemma: surface.to_string(),
        pos: PUNCT.to_string(),
        morph: Features::new(),
        multiword: None,
        clitic_suffixes: None,
    }
}

/// All terminal readings of the token sequence, ordered by token then
/// lexicon order.
pub fn build_lattice(tokens: &[Token], lex: &Lexicon) -> Vec<TerminalNode> {
    let splits: Vec<_> = tokens
        .iter()
        .map(|t| lex.clitic_splits(&t.surface))
        .collect();
    let mut base = Vec::with_capacity(tokens.len() + 1);
    let mut v = 0;
    for s in &splits {
        base.push(v);
        v += 1 + s.iter().map(|s| s.clitics.len()).sum::<usize>();
    }
    base.push(v);

    let mut nodes = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        let whole = |entry: WordEntry, penalty: f64| TerminalNode {
            first: tok.index,
            last: tok.index,
            sub: 0,
            start: base[i],
            end: base[i + 1],
            entry,
            penalty,
        };
        let before = nodes.len();
        if tok.surface.chars().all(|c| PUNCTUATION.contains(&c)) {
            nodes.push(whole(punct_entry(&tok.surface), 0.0));
            continue;
        }
        for e in lex.words(&tok.surface) {
            let mut e = e.clone();
            e.surface = tok.surface.clone();
            nodes.push(whole(e, 0.0));
        }
        for e in lex.multiwords_starting(&tok.surface) {
            let parts = e.multiword.as_ref().expect("multiword entry");
            let end = i + parts.len();
            if end <= tokens.len()
                && parts
                    .iter()
                    .zip(&tokens[i..end])
                    .all(|(p, t)| p.eq_ignore_ascii_case(&t.surface))
            {
                let mut e = e.clone();
                e.surface = tokens[i..end]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                nodes.push(TerminalNode {
                    first: tok.index,
                    last: tokens[end - 1].index,
                    sub: 0,
                    start: base[i],
                    end: base[end],
                    entry: e,
                    penalty: 0.0,
                });
            }
        }
        let mut internal = base[i] + 1;
        for split in &splits[i] {
            let mut at = base[i];
            let count = split.clitics.len();
            for (k, entry) in std::iter::once(&split.host)
                .chain(&split.clitics)
                .enumerate()
            {
                let end = if k == count {
                    base[i + 1]
                } else {
                    internal + k
                };
                nodes.push(TerminalNode {
                    first: tok.index,
                    last: tok.index,
                    sub: k + 1,
                    start: at,
                    end,
                    entry: entry.clone(),
                    penalty: 0.0,
                });
                at = end;
            }
            internal += count;
        }
        if nodes.len() == before {
            for pos in OPEN_CLASSES {
                nodes.push(whole(
                    WordEntry::fallback(&tok.surface, pos),
                    FALLBACK_PENALTY,
                ));
            }
        }
    }
    nodes
}

pub fn format_features(f: &Features) -> String {
    if f.is_empty() {
        "_".to_string()
    } else {
        f.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// TSV dump: token range, category, lemma, features, penalty.
pub fn dump_lattice(nodes: &[TerminalNode]) -> String {
    let mut out = String::from("RANGE\tCAT\tLEMMA\tFEATS\tPENALTY\n");
    for n in nodes {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            n.range_label(),
            n.entry.pos,
            n.entry.lemma,
            format_features(&n.entry.morph),
            n.penalty
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn tokens() {
        assert_eq!(
            surfaces("Good drinks and food"),
            ["Good", "drinks", "and", "food"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(
            surfaces("Paolo chiede a Giovanni di lasciargli prendere l'automobile"),
            [
                "Paolo",
                "chiede",
                "a",
                "Giovanni",
                "di",
                "lasciargli",
                "prendere",
                "l'",
                "automobile"
            ]
        );
        assert_eq!(
            surfaces("in Paris, philosophy."),
            ["in", "Paris", ",", "philosophy", "."]
        );
        let t = tokenize("ab  cd");
        assert_eq!(t[1].char_span, (4, 6));
        assert_eq!(t[1].index, 2);
    }

    #[test]
    fn sentences() {
        assert_eq!(
            split_sentences("One two. Three? \"a. b\" c"),
            ["One two.", "Three?", "\"a. b\" c"]
        );
    }

    #[test]
    fn unknown_word_fallbacks() {
        let lex = Lexicon::default();
        let nodes = build_lattice(&tokenize("blorp"), &lex);
        assert_eq!(nodes.len(), 4);
        assert!(nodes.iter().all(|n| n.penalty == FALLBACK_PENALTY));
        let cats: Vec<&str> = nodes.iter().map(|n| n.entry.pos.as_str()).collect();
        assert_eq!(cats, OPEN_CLASSES);
    }

    #[test]
    fn clitic_nodes_share_token() {
        let lex = Lexicon::parse_str(
            "CLITIC gli PronDat\nSANDHI e\nLEMMA gli POS PronDat\nFORM gli\nLEMMA lasciare POS V\nFORM lasciare mdv=inf\nLEMMA di POS Prep\nFORM di\n",
            "t",
        )
        .unwrap();
        let nodes = build_lattice(&tokenize("di lasciargli"), &lex);
        assert_eq!(nodes.len(), 3);
        let (host, clitic) = (&nodes[1], &nodes[2]);
        assert_eq!((host.first, clitic.first), (2, 2));
        assert_eq!(
            (host.entry.lemma.as_str(), clitic.entry.lemma.as_str()),
            ("lasciare", "gli")
        );
        assert_eq!(host.end, clitic.start);
        assert_eq!(nodes[0].end, host.start);
        assert_eq!(clitic.range_label(), "2.2");
    }
}
