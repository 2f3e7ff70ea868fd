//! Constraint expressions attached to pattern frame positions.
//!
//! Textual form: atoms such as `agr(num,gen)`, `lex("be")`, `mdv(inf)`,
//! combined with `,` (AND, binds tighter) and `/` (OR), grouped with
//! parentheses. An atom may carry a soft weight suffix `~w`; without it the
//! atom is hard. `nil` is the always-satisfied atom.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ConstraintSyntaxError;
use crate::lexicon::Features;

/// Features compared by a bare `agr` or a positional `agr(k)`.
pub const DEFAULT_AGREEMENT: [&str; 3] = ["pers", "num", "gen"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Severity {
    Hard,
    Soft(f64),
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Hard => f.write_str("hard"),
            Severity::Soft(w) => write!(f, "soft({w})"),
        }
    }
}

/// Atom kinds, used as keys of relaxation profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    Agr,
    Lex,
    Mdv,
    Tmp,
    Cat,
    Conn,
    Reg,
    Opt,
    Nil,
}

impl AtomKind {
    pub fn name(self) -> &'static str {
        match self {
            AtomKind::Agr => "agr",
            AtomKind::Lex => "lex",
            AtomKind::Mdv => "mdv",
            AtomKind::Tmp => "tmp",
            AtomKind::Cat => "cat",
            AtomKind::Conn => "conn",
            AtomKind::Reg => "reg",
            AtomKind::Opt => "opt",
            AtomKind::Nil => "nil",
        }
    }

    pub fn from_name(name: &str) -> Option<AtomKind> {
        Some(match name {
            "agr" => AtomKind::Agr,
            "lex" => AtomKind::Lex,
            "mdv" => AtomKind::Mdv,
            "tmp" => AtomKind::Tmp,
            "cat" => AtomKind::Cat,
            "conn" => AtomKind::Conn,
            "reg" => AtomKind::Reg,
            "opt" => AtomKind::Opt,
            "nil" => AtomKind::Nil,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// Agreement with the frame head on the listed features (default set when empty).
    AgrHead(Vec<String>),
    /// Agreement with the 1-based frame position.
    AgrPos(usize),
    Lex(String),
    Mdv(String),
    Tmp(String),
    Cat(String),
    Conn(String),
    Reg(String),
    Opt(bool),
    Nil,
}

impl Atom {
    pub fn kind(&self) -> AtomKind {
        match self {
            Atom::AgrHead(_) | Atom::AgrPos(_) => AtomKind::Agr,
            Atom::Lex(_) => AtomKind::Lex,
            Atom::Mdv(_) => AtomKind::Mdv,
            Atom::Tmp(_) => AtomKind::Tmp,
            Atom::Cat(_) => AtomKind::Cat,
            Atom::Conn(_) => AtomKind::Conn,
            Atom::Reg(_) => AtomKind::Reg,
            Atom::Opt(_) => AtomKind::Opt,
            Atom::Nil => AtomKind::Nil,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::AgrHead(feats) if feats.is_empty() => f.write_str("agr"),
            Atom::AgrHead(feats) => write!(f, "agr({})", feats.join(",")),
            Atom::AgrPos(k) => write!(f, "agr({k})"),
            Atom::Lex(w) => write!(f, "lex(\"{w}\")"),
            Atom::Mdv(m) => write!(f, "mdv({m})"),
            Atom::Tmp(t) => write!(f, "tmp({t})"),
            Atom::Cat(c) => write!(f, "cat({c})"),
            Atom::Conn(w) => write!(f, "conn(\"{w}\")"),
            Atom::Reg(r) => write!(f, "reg({r})"),
            Atom::Opt(b) => write!(f, "opt({b})"),
            Atom::Nil => f.write_str("nil"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub atom: Atom,
    pub severity: Severity,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Hard => write!(f, "{}", self.atom),
            Severity::Soft(w) => write!(f, "{}~{w}", self.atom),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintExpr {
    Atom(Constraint),
    And(Vec<ConstraintExpr>),
    Or(Vec<ConstraintExpr>),
}

impl ConstraintExpr {
    pub fn nil() -> Self {
        ConstraintExpr::Atom(Constraint {
            atom: Atom::Nil,
            severity: Severity::Hard,
        })
    }

    pub fn is_nil(&self) -> bool {
        matches!(
            self,
            ConstraintExpr::Atom(Constraint {
                atom: Atom::Nil,
                ..
            })
        )
    }

    /// All atoms in the expression, left to right.
    pub fn atoms(&self) -> Vec<&Constraint> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Constraint>) {
        match self {
            ConstraintExpr::Atom(c) => out.push(c),
            ConstraintExpr::And(xs) | ConstraintExpr::Or(xs) => {
                xs.iter().for_each(|x| x.collect_atoms(out))
            }
        }
    }

    fn canonical(self) -> Self {
        match self {
            ConstraintExpr::Atom(_) => self,
            ConstraintExpr::And(xs) => {
                let mut flat = Vec::new();
                for x in xs.into_iter().map(ConstraintExpr::canonical) {
                    match x {
                        ConstraintExpr::And(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() > 1 {
                    flat.retain(|x| !x.is_nil());
                }
                match flat.len() {
                    0 => ConstraintExpr::nil(),
                    1 => flat.pop().unwrap(),
                    _ => ConstraintExpr::And(flat),
                }
            }
            ConstraintExpr::Or(xs) => {
                let mut flat = Vec::new();
                for x in xs.into_iter().map(ConstraintExpr::canonical) {
                    match x {
                        ConstraintExpr::Or(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    ConstraintExpr::Or(flat)
                }
            }
        }
    }

    /// Evaluates the expression for the candidate at `position` (0-based).
    pub fn evaluate(&self, ctx: &EvalContext<'_>, position: usize) -> Evaluation {
        match self {
            ConstraintExpr::Atom(c) => {
                if eval_atom(&c.atom, ctx, position) {
                    Evaluation::satisfied()
                } else {
                    match ctx.profile.effective(c) {
                        Severity::Hard => Evaluation {
                            hard: Some(c.atom.to_string()),
                            penalty: 0.0,
                            soft: Vec::new(),
                        },
                        Severity::Soft(w) => Evaluation {
                            hard: None,
                            penalty: w,
                            soft: vec![c.atom.to_string()],
                        },
                    }
                }
            }
            ConstraintExpr::And(xs) => {
                let mut acc = Evaluation::satisfied();
                for x in xs {
                    let e = x.evaluate(ctx, position);
                    if e.hard.is_some() {
                        return e;
                    }
                    acc.penalty += e.penalty;
                    acc.soft.extend(e.soft);
                }
                acc
            }
            ConstraintExpr::Or(xs) => {
                let mut best: Option<Evaluation> = None;
                let mut first_hard: Option<Evaluation> = None;
                for x in xs {
                    let e = x.evaluate(ctx, position);
                    if e.hard.is_some() {
                        first_hard.get_or_insert(e);
                    } else if best.as_ref().is_none_or(|b| e.penalty < b.penalty) {
                        best = Some(e);
                    }
                }
                best.or(first_hard).unwrap_or_else(Evaluation::satisfied)
            }
        }
    }
}

impl fmt::Display for ConstraintExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintExpr::Atom(c) => write!(f, "{c}"),
            ConstraintExpr::And(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    if matches!(x, ConstraintExpr::Or(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            ConstraintExpr::Or(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" / ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

/// Result of evaluating a constraint against one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// The first hard-violated atom, if any.
    pub hard: Option<String>,
    pub penalty: f64,
    /// Soft-violated atoms.
    pub soft: Vec<String>,
}

impl Evaluation {
    pub fn satisfied() -> Self {
        Evaluation {
            hard: None,
            penalty: 0.0,
            soft: Vec::new(),
        }
    }

    pub fn accepted(&self) -> bool {
        self.hard.is_none()
    }
}

/// Named severity overrides per atom kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub overrides: BTreeMap<AtomKind, Severity>,
    /// Treat every atom as hard regardless of its own severity.
    pub force_hard: bool,
}

impl Profile {
    pub const STRICT: &'static str = "strict";

    pub fn strict() -> Self {
        Profile {
            name: Self::STRICT.to_string(),
            overrides: BTreeMap::new(),
            force_hard: true,
        }
    }

    pub fn effective(&self, c: &Constraint) -> Severity {
        if self.force_hard {
            return Severity::Hard;
        }
        self.overrides
            .get(&c.atom.kind())
            .copied()
            .unwrap_or(c.severity)
    }
}

/// What the evaluator knows about one matched position.
#[derive(Debug, Clone, Copy)]
pub struct CandidateView<'a> {
    pub category: &'a str,
    pub lemma: Option<&'a str>,
    pub surface: Option<&'a str>,
    pub features: &'a Features,
    pub connective: Option<&'a str>,
    pub is_trace: bool,
    /// The candidate is a bare connective word (preposition or conjunction).
    pub is_connective_word: bool,
}

pub struct EvalContext<'a> {
    pub candidates: &'a [CandidateView<'a>],
    pub head: usize,
    pub profile: &'a Profile,
    pub is_a: &'a dyn Fn(&str, &str) -> bool,
}

fn agrees(a: &CandidateView<'_>, b: &CandidateView<'_>, feats: &[&str]) -> bool {
    if a.is_trace || b.is_trace {
        return true;
    }
    feats
        .iter()
        .all(|f| match (a.features.get(*f), b.features.get(*f)) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        })
}

fn eval_atom(atom: &Atom, ctx: &EvalContext<'_>, position: usize) -> bool {
    let cand = &ctx.candidates[position];
    let feature = |key: &str, want: &str| {
        cand.is_trace || cand.features.get(key).map(String::as_str) == Some(want)
    };
    match atom {
        Atom::Nil | Atom::Opt(_) => true,
        Atom::AgrHead(feats) => {
            let head = &ctx.candidates[ctx.head];
            if feats.is_empty() {
                agrees(cand, head, &DEFAULT_AGREEMENT)
            } else {
                let names: Vec<&str> = feats.iter().map(String::as_str).collect();
                agrees(cand, head, &names)
            }
        }
        Atom::AgrPos(k) => match ctx.candidates.get(k.wrapping_sub(1)) {
            Some(other) => agrees(cand, other, &DEFAULT_AGREEMENT),
            None => false,
        },
        Atom::Lex(w) => {
            cand.lemma.is_some_and(|l| l.eq_ignore_ascii_case(w))
                || cand.surface.is_some_and(|s| s.eq_ignore_ascii_case(w))
        }
        Atom::Mdv(m) if m == "0" => {
            cand.is_trace
                || !matches!(
                    cand.features.get("mdv").map(String::as_str),
                    Some("inf" | "part" | "ger")
                )
        }
        Atom::Mdv(m) => feature("mdv", m),
        Atom::Tmp(t) => feature("tmp", t),
        Atom::Cat(c) => (ctx.is_a)(cand.category, c),
        Atom::Conn(w) => cand.connective.is_some_and(|c| c.eq_ignore_ascii_case(w)),
        Atom::Reg(_) => cand.is_connective_word,
    }
}

/// Parses a constraint expression into its canonical tree.
pub fn parse_constraint(text: &str) -> Result<ConstraintExpr, ConstraintSyntaxError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty constraint"));
    }
    let expr = p.or_expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(expr.canonical())
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> ConstraintSyntaxError {
        ConstraintSyntaxError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ConstraintSyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn or_expr(&mut self) -> Result<ConstraintExpr, ConstraintSyntaxError> {
        let mut items = vec![self.and_expr()?];
        while self.eat('/') {
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            ConstraintExpr::Or(items)
        })
    }

    fn and_expr(&mut self) -> Result<ConstraintExpr, ConstraintSyntaxError> {
        let mut items = vec![self.unary()?];
        while self.eat(',') || self.eat('&') {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            ConstraintExpr::And(items)
        })
    }

    fn unary(&mut self) -> Result<ConstraintExpr, ConstraintSyntaxError> {
        self.skip_ws();
        if self.eat('(') {
            if self.eat(')') {
                // `()` is the empty constraint set
                return Ok(ConstraintExpr::nil());
            }
            let inner = self.or_expr()?;
            self.expect(')')?;
            return Ok(inner);
        }
        let atom = self.atom()?;
        let severity = if self.eat('~') {
            Severity::Soft(self.number()?)
        } else {
            Severity::Hard
        };
        Ok(ConstraintExpr::Atom(Constraint { atom, severity }))
    }

    fn ident(&mut self) -> Result<String, ConstraintSyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '-'))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<f64, ConstraintSyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(w) if w >= 0.0 => Ok(w),
            _ => {
                self.pos = start;
                Err(self.error("expected non-negative weight"))
            }
        }
    }

    fn literal(&mut self) -> Result<String, ConstraintSyntaxError> {
        self.skip_ws();
        match self.peek() {
            Some(q @ ('"' | '\'')) => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c != q) {
                    self.pos += 1;
                }
                if self.at_end() {
                    return Err(self.error("unterminated string"));
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                Ok(s)
            }
            _ => self.ident(),
        }
    }

    fn atom(&mut self) -> Result<Atom, ConstraintSyntaxError> {
        let start = self.pos;
        let name = self.ident()?;
        let kind = AtomKind::from_name(&name).ok_or_else(|| ConstraintSyntaxError {
            column: start + 1,
            message: format!("unknown atom `{name}`"),
        })?;
        let has_args = self.eat('(');
        let mut args = Vec::new();
        if has_args && !self.eat(')') {
            loop {
                args.push(self.literal()?);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let one = |p: &Self, args: &mut Vec<String>| -> Result<String, ConstraintSyntaxError> {
            if args.len() == 1 {
                Ok(args.pop().unwrap())
            } else {
                Err(p.error(format!("`{name}` takes exactly one argument")))
            }
        };
        Ok(match kind {
            AtomKind::Nil => {
                if has_args {
                    return Err(self.error("`nil` takes no arguments"));
                }
                Atom::Nil
            }
            AtomKind::Agr => {
                if args.len() == 1 && args[0].chars().all(|c| c.is_ascii_digit()) {
                    let k: usize = args[0].parse().map_err(|_| self.error("bad position"))?;
                    if k == 0 {
                        return Err(self.error("agreement position is 1-based"));
                    }
                    Atom::AgrPos(k)
                } else {
                    Atom::AgrHead(args.into_iter().map(|f| canonical_feature(&f)).collect())
                }
            }
            AtomKind::Mdv if args.is_empty() => Atom::Nil,
            AtomKind::Mdv => Atom::Mdv(one(self, &mut args)?),
            AtomKind::Lex => Atom::Lex(one(self, &mut args)?),
            AtomKind::Tmp => Atom::Tmp(one(self, &mut args)?),
            AtomKind::Cat => Atom::Cat(one(self, &mut args)?),
            AtomKind::Conn => Atom::Conn(one(self, &mut args)?),
            AtomKind::Reg => Atom::Reg(one(self, &mut args)?),
            AtomKind::Opt => match one(self, &mut args)?.as_str() {
                "true" => Atom::Opt(true),
                "false" => Atom::Opt(false),
                _ => return Err(self.error("`opt` takes true or false")),
            },
        })
    }
}

/// Normalizes feature-name spellings (`prs` and `n` are accepted abbreviations).
pub fn canonical_feature(name: &str) -> String {
    match name {
        "prs" | "person" => "pers".to_string(),
        "n" | "number" => "num".to_string(),
        "g" | "gender" => "gen".to_string(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(a: Atom) -> ConstraintExpr {
        ConstraintExpr::Atom(Constraint {
            atom: a,
            severity: Severity::Hard,
        })
    }

    #[test]
    fn lex_atom() {
        assert_eq!(
            parse_constraint("lex(\"have\")").unwrap(),
            atom(Atom::Lex("have".into()))
        );
    }

    #[test]
    fn conjunction_of_two_atoms() {
        let e = parse_constraint("lex(\"be\"),tmp(perf)").unwrap();
        assert_eq!(
            e,
            ConstraintExpr::And(vec![
                atom(Atom::Lex("be".into())),
                atom(Atom::Tmp("perf".into()))
            ])
        );
    }

    #[test]
    fn nil_is_always_satisfied() {
        let e = parse_constraint("nil").unwrap();
        assert!(e.is_nil());
        let feats = Features::new();
        let cands = [CandidateView {
            category: "NP",
            lemma: None,
            surface: None,
            features: &feats,
            connective: None,
            is_trace: false,
            is_connective_word: false,
        }];
        let profile = Profile::strict();
        let ctx = EvalContext {
            candidates: &cands,
            head: 0,
            profile: &profile,
            is_a: &|a, b| a == b,
        };
        assert!(e.evaluate(&ctx, 0).accepted());
    }

    #[test]
    fn alternate_spellings() {
        let e = parse_constraint("(conn('a'), cat(NP))").unwrap();
        assert_eq!(e.to_string(), "conn(\"a\"),cat(NP)");
        assert_eq!(
            parse_constraint("agr(prs,n)").unwrap().to_string(),
            "agr(pers,num)"
        );
        assert_eq!(parse_constraint("()").unwrap().to_string(), "nil");
        assert_eq!(parse_constraint("agr(2)").unwrap(), atom(Atom::AgrPos(2)));
    }

    #[test]
    fn or_binds_looser_than_and() {
        let e = parse_constraint("mdv(inf), conn(\"di\") / mdv(cng)").unwrap();
        assert!(matches!(e, ConstraintExpr::Or(ref xs) if xs.len() == 2));
        assert_eq!(e.to_string(), "mdv(inf),conn(\"di\") / mdv(cng)");
        let g = parse_constraint("agr~1.5,(lex(a) / lex(b))").unwrap();
        assert_eq!(g.to_string(), "agr~1.5,(lex(\"a\") / lex(\"b\"))");
    }

    #[test]
    fn syntax_errors_carry_column() {
        let err = parse_constraint("lex(\"be\"),,").unwrap_err();
        assert_eq!(err.column, 11);
        assert!(parse_constraint("frob(x)")
            .unwrap_err()
            .message
            .contains("frob"));
        assert!(parse_constraint("").is_err());
        assert!(parse_constraint("lex(\"a\"").is_err());
    }
}
