//! Language-specific grammar: declared categories, pattern frames and
//! relaxation profiles, loaded from a plain-text resource file.

pub mod constraint;
pub mod validate;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::error::{read_file, ResourceError};
pub use constraint::{
    parse_constraint, Atom, AtomKind, CandidateView, Constraint, ConstraintExpr, EvalContext,
    Evaluation, Profile, Severity,
};
pub use validate::{validate_grammar, validate_semantics, Diagnostic};

pub const DEFAULT_MAX_CYCLES: u32 = 32;
const DEFAULT_ARG_FUNCTIONS: [&str; 5] = ["subj", "obj", "iobj", "arg", "prep.arg"];
const HEAD_FUNCTIONS: [&str; 3] = ["head", "v", "v_pass"];
/// The category every clause type specializes.
pub const CLAUSE: &str = "C";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryKind {
    Phrase,
    Terminal,
    Trace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub kind: CategoryKind,
    /// Supertype consulted by `cat(..)` constraints and valency slots.
    pub parent: Option<String>,
}

/// One constituent description: sequence, position-referred dependencies,
/// functions and per-position constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternFrame {
    pub category: String,
    pub variant: u32,
    pub seq: Vec<String>,
    /// 1-based governor position per element; 0 marks the head.
    pub dep: Vec<usize>,
    pub fnct: Vec<String>,
    pub cst: Vec<ConstraintExpr>,
}

impl PatternFrame {
    pub fn id(&self) -> String {
        format!("{} {}", self.category, self.variant)
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// 0-based index of the head position.
    pub fn head(&self) -> usize {
        self.dep.iter().position(|&d| d == 0).unwrap_or(0)
    }

    /// 0-based governor of position `i`, `None` for the head.
    pub fn governor(&self, i: usize) -> Option<usize> {
        match self.dep[i] {
            0 => None,
            d => Some(d - 1),
        }
    }

    fn check(&self) -> Result<(), String> {
        let n = self.seq.len();
        if n == 0 {
            return Err("empty sequence".into());
        }
        if self.dep.len() != n || self.fnct.len() != n || self.cst.len() != n {
            return Err(format!(
                "length mismatch: seq {}, dep {}, fnct {}, cst {}",
                n,
                self.dep.len(),
                self.fnct.len(),
                self.cst.len()
            ));
        }
        match self.dep.iter().filter(|&&d| d == 0).count() {
            0 => return Err("no head position".into()),
            1 => {}
            _ => return Err("multiple head positions".into()),
        }
        for (i, &d) in self.dep.iter().enumerate() {
            if d > n {
                return Err(format!("dep value {d} out of range at position {}", i + 1));
            }
            if d == i + 1 {
                return Err(format!("position {d} depends on itself"));
            }
        }
        for start in 0..n {
            let mut at = start;
            let mut steps = 0;
            while let Some(g) = self.governor(at) {
                at = g;
                steps += 1;
                if steps > n {
                    return Err("dependency cycle".into());
                }
            }
        }
        if !HEAD_FUNCTIONS.contains(&self.fnct[self.head()].as_str()) {
            return Err(format!(
                "head function `{}` must be one of head, v, v_pass",
                self.fnct[self.head()]
            ));
        }
        for (i, c) in self.cst.iter().enumerate() {
            for a in c.atoms() {
                if let Atom::AgrPos(k) = a.atom {
                    if k > n || k == i + 1 {
                        return Err(format!(
                            "agr({k}) at position {} is not another position",
                            i + 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for PatternFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deps: Vec<String> = self.dep.iter().map(usize::to_string).collect();
        let cst: Vec<String> = self.cst.iter().map(ConstraintExpr::to_string).collect();
        write!(
            f,
            "PATTERN {} {} {{ seq: {}; dep: {}; fnct: {}; cst: {} }}",
            self.category,
            self.variant,
            self.seq.join(" "),
            deps.join(" "),
            self.fnct.join(" "),
            cst.join(" | ")
        )
    }
}

/// A loaded grammar; immutable after loading.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    categories: Vec<Category>,
    frames: Vec<PatternFrame>,
    roots: Vec<String>,
    arg_functions: Vec<String>,
    aliases: BTreeMap<String, Vec<String>>,
    anaphors: Vec<String>,
    max_cycles: u32,
    profiles: BTreeMap<String, Profile>,
}

impl Default for Grammar {
    fn default() -> Self {
        let mut profiles = BTreeMap::new();
        profiles.insert(Profile::STRICT.to_string(), Profile::strict());
        Grammar {
            categories: Vec::new(),
            frames: Vec::new(),
            roots: Vec::new(),
            arg_functions: DEFAULT_ARG_FUNCTIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            aliases: BTreeMap::new(),
            anaphors: Vec::new(),
            max_cycles: DEFAULT_MAX_CYCLES,
            profiles,
        }
    }
}

impl Grammar {
    pub fn load(path: impl AsRef<Path>) -> Result<Grammar, ResourceError> {
        let path = path.as_ref();
        let text = read_file(path)?;
        Grammar::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, origin: &str) -> Result<Grammar, ResourceError> {
        let mut g = Grammar::default();
        let mut args_declared = false;
        for (line, stmt) in statements(text, origin)? {
            let (keyword, rest) = split_keyword(&stmt);
            let err = |m: String| ResourceError::syntax(origin, line, m);
            match keyword {
                "CATEGORY" => {
                    let (name, parent) = match rest.split_once('<') {
                        Some((n, p)) => (n.trim(), Some(p.trim().to_string())),
                        None => (rest.trim(), None),
                    };
                    if name.is_empty() || name.contains(char::is_whitespace) {
                        return Err(err(format!("bad category declaration `{rest}`")));
                    }
                    g.declare(name, CategoryKind::Phrase, parent).map_err(err)?;
                }
                "TERMINAL" | "TRACE" => {
                    let kind = if keyword == "TERMINAL" {
                        CategoryKind::Terminal
                    } else {
                        CategoryKind::Trace
                    };
                    for name in rest.split_whitespace() {
                        g.declare(name, kind, None).map_err(err)?;
                    }
                }
                "ROOT" => g.roots.extend(rest.split_whitespace().map(String::from)),
                "ARGFUNCS" => {
                    if !args_declared {
                        g.arg_functions.clear();
                        args_declared = true;
                    }
                    g.arg_functions
                        .extend(rest.split_whitespace().map(String::from));
                }
                "ALIAS" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(err("ALIAS takes <frame-function> <slot-function>".into()));
                    }
                    g.aliases
                        .entry(parts[0].to_string())
                        .or_default()
                        .push(parts[1].to_string());
                }
                "ANAPHOR" => g.anaphors.extend(rest.split_whitespace().map(String::from)),
                "MAX_CYCLES" => {
                    g.max_cycles = match rest.trim().parse::<u32>() {
                        Ok(n) if n > 0 => n,
                        _ => {
                            return Err(err(format!(
                                "MAX_CYCLES needs a positive integer, got `{rest}`"
                            )))
                        }
                    }
                }
                "PROFILE" => {
                    let profile = parse_profile(rest).map_err(err)?;
                    if profile.name == Profile::STRICT {
                        return Err(err("the strict profile is built in".into()));
                    }
                    if g.profiles.contains_key(&profile.name) {
                        return Err(err(format!("duplicate profile `{}`", profile.name)));
                    }
                    g.profiles.insert(profile.name.clone(), profile);
                }
                "PATTERN" => {
                    let frame = parse_pattern(rest).map_err(err)?;
                    if g.frames
                        .iter()
                        .any(|f| f.category == frame.category && f.variant == frame.variant)
                    {
                        return Err(ResourceError::Frame {
                            origin: origin.to_string(),
                            frame: frame.id(),
                            rule: "duplicate frame id".into(),
                        });
                    }
                    frame.check().map_err(|rule| ResourceError::Frame {
                        origin: origin.to_string(),
                        frame: frame.id(),
                        rule,
                    })?;
                    g.frames.push(frame);
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        for frame in &g.frames {
            if frame.seq.iter().all(|c| g.is_trace(c)) {
                return Err(ResourceError::Frame {
                    origin: origin.to_string(),
                    frame: frame.id(),
                    rule: "no surface position".into(),
                });
            }
        }
        Ok(g)
    }

    fn declare(
        &mut self,
        name: &str,
        kind: CategoryKind,
        parent: Option<String>,
    ) -> Result<(), String> {
        if self.category(name).is_some() {
            return Err(format!("category `{name}` declared twice"));
        }
        self.categories.push(Category {
            name: name.to_string(),
            kind,
            parent,
        });
        Ok(())
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.category(name).is_some()
    }

    pub fn is_trace(&self, name: &str) -> bool {
        self.category(name)
            .is_some_and(|c| c.kind == CategoryKind::Trace)
    }

    pub fn is_terminal(&self, name: &str) -> bool {
        self.category(name)
            .is_some_and(|c| c.kind == CategoryKind::Terminal)
    }

    /// Subtype test along declared parents; reflexive.
    pub fn is_a(&self, sub: &str, sup: &str) -> bool {
        let mut at = Some(sub);
        let mut guard = 0;
        while let Some(name) = at {
            if name == sup {
                return true;
            }
            guard += 1;
            if guard > self.categories.len() + 1 {
                return false;
            }
            at = self.category(name).and_then(|c| c.parent.as_deref());
        }
        false
    }

    pub fn is_clausal(&self, name: &str) -> bool {
        self.is_a(name, CLAUSE)
    }

    pub fn frames(&self) -> &[PatternFrame] {
        &self.frames
    }

    pub fn roots(&self) -> &[String] {
        &self.roots
    }

    /// Root admissibility; without a ROOT declaration every phrase qualifies.
    pub fn is_root(&self, name: &str) -> bool {
        if self.roots.is_empty() {
            !self.is_terminal(name) && !self.is_trace(name)
        } else {
            self.roots.iter().any(|r| r == name)
        }
    }

    pub fn arg_functions(&self) -> &[String] {
        &self.arg_functions
    }

    pub fn is_arg_function(&self, f: &str) -> bool {
        self.arg_functions.iter().any(|a| a == f)
    }

    pub fn aliases(&self) -> &BTreeMap<String, Vec<String>> {
        &self.aliases
    }

    /// True when a child with frame function `child` can fill a lexical slot `slot`.
    pub fn function_matches(&self, child: &str, slot: &str) -> bool {
        child == slot
            || self
                .aliases
                .get(child)
                .is_some_and(|xs| xs.iter().any(|x| x == slot))
    }

    pub fn is_anaphor(&self, cat: &str) -> bool {
        self.anaphors.iter().any(|a| a == cat)
    }

    pub fn anaphors(&self) -> &[String] {
        &self.anaphors
    }

    pub fn max_cycles(&self) -> u32 {
        self.max_cycles
    }

    pub fn profile(&self, name: &str) -> Option<&Profile> {
        self.profiles.get(name)
    }

    pub fn profiles(&self) -> impl Iterator<Item = &Profile> {
        self.profiles.values()
    }

    /// Canonical, byte-stable text form; loading it yields an equal grammar.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for c in &self.categories {
            match (c.kind, &c.parent) {
                (CategoryKind::Phrase, Some(p)) => writeln!(out, "CATEGORY {} < {p}", c.name),
                (CategoryKind::Phrase, None) => writeln!(out, "CATEGORY {}", c.name),
                (CategoryKind::Terminal, _) => writeln!(out, "TERMINAL {}", c.name),
                (CategoryKind::Trace, _) => writeln!(out, "TRACE {}", c.name),
            }
            .unwrap();
        }
        if !self.roots.is_empty() {
            writeln!(out, "ROOT {}", self.roots.join(" ")).unwrap();
        }
        writeln!(out, "ARGFUNCS {}", self.arg_functions.join(" ")).unwrap();
        for (from, tos) in &self.aliases {
            for to in tos {
                writeln!(out, "ALIAS {from} {to}").unwrap();
            }
        }
        if !self.anaphors.is_empty() {
            writeln!(out, "ANAPHOR {}", self.anaphors.join(" ")).unwrap();
        }
        writeln!(out, "MAX_CYCLES {}", self.max_cycles).unwrap();
        for p in self.profiles.values().filter(|p| p.name != Profile::STRICT) {
            let entries: Vec<String> = p
                .overrides
                .iter()
                .map(|(k, s)| format!("{}: {s}", k.name()))
                .collect();
            writeln!(out, "PROFILE {} {{ {} }}", p.name, entries.join("; ")).unwrap();
        }
        for f in &self.frames {
            writeln!(out, "{f}").unwrap();
        }
        out
    }
}

/// Splits the file into logical statements, joining `{ ... }` blocks that
/// span several lines. Returns the starting line of each statement.
fn statements(text: &str, origin: &str) -> Result<Vec<(usize, String)>, ResourceError> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim().to_string();
        if let Some((start, mut acc)) = pending.take() {
            acc.push(' ');
            acc.push_str(&line);
            if line.contains('}') {
                out.push((start, acc));
            } else {
                pending = Some((start, acc));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if line.contains('{') && !line.contains('}') {
            pending = Some((i + 1, line));
        } else {
            out.push((i + 1, line));
        }
    }
    if let Some((start, _)) = pending {
        return Err(ResourceError::syntax(
            origin,
            start,
            "unterminated `{` block",
        ));
    }
    Ok(out)
}

pub(crate) fn strip_comment(line: &str) -> &str {
    let mut quote: Option<char> = None;
    for (i, c) in line.char_indices() {
        match (quote, c) {
            (None, '"') => quote = Some('"'),
            (Some(q), c) if c == q => quote = None,
            (None, '#') => return &line[..i],
            _ => {}
        }
    }
    line
}

fn split_keyword(stmt: &str) -> (&str, &str) {
    match stmt.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (stmt, ""),
    }
}

fn braces(rest: &str) -> Result<(&str, &str), String> {
    let open = rest.find('{').ok_or("expected `{`")?;
    let close = rest.rfind('}').ok_or("expected `}`")?;
    if close < open || !rest[close + 1..].trim().is_empty() {
        return Err("malformed `{ ... }` block".into());
    }
    Ok((rest[..open].trim(), &rest[open + 1..close]))
}

fn parse_profile(rest: &str) -> Result<Profile, String> {
    let (name, body) = braces(rest)?;
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(format!("bad profile name `{name}`"));
    }
    let mut overrides = BTreeMap::new();
    for entry in body.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (kind, sev) = entry
            .split_once(':')
            .ok_or_else(|| format!("profile entry `{entry}` needs `kind: severity`"))?;
        let kind = AtomKind::from_name(kind.trim())
            .ok_or_else(|| format!("unknown atom kind `{}`", kind.trim()))?;
        let sev = sev.trim();
        let severity = if sev == "hard" {
            Severity::Hard
        } else if let Some(w) = sev.strip_prefix("soft(").and_then(|s| s.strip_suffix(')')) {
            match w.trim().parse::<f64>() {
                Ok(w) if w >= 0.0 => Severity::Soft(w),
                _ => return Err(format!("bad soft weight `{w}`")),
            }
        } else {
            return Err(format!("unknown severity `{sev}`"));
        };
        overrides.insert(kind, severity);
    }
    Ok(Profile {
        name: name.to_string(),
        overrides,
        force_hard: false,
    })
}

fn parse_pattern(rest: &str) -> Result<PatternFrame, String> {
    let (head, body) = braces(rest)?;
    let mut hw = head.split_whitespace();
    let category = hw.next().ok_or("PATTERN needs a category")?.to_string();
    let variant = hw
        .next()
        .ok_or("PATTERN needs a variant index")?
        .parse::<u32>()
        .map_err(|_| "variant index must be a non-negative integer".to_string())?;
    if hw.next().is_some() {
        return Err("unexpected text before `{`".into());
    }
    let (mut seq, mut dep, mut fnct, mut cst) = (None, None, None, None);
    for field in body.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once(':')
            .ok_or_else(|| format!("field `{field}` needs `key: value`"))?;
        let value = value.trim();
        let words = || {
            value
                .split_whitespace()
                .map(String::from)
                .collect::<Vec<_>>()
        };
        match key.trim() {
            "seq" => seq = Some(words()),
            "fnct" => fnct = Some(words()),
            "dep" => {
                dep = Some(
                    value
                        .split_whitespace()
                        .map(|d| {
                            d.parse::<usize>()
                                .map_err(|_| format!("bad dep value `{d}`"))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            "cst" => {
                cst = Some(
                    value
                        .split('|')
                        .enumerate()
                        .map(|(i, cell)| {
                            parse_constraint(cell)
                                .map_err(|e| format!("constraint at position {}: {e}", i + 1))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            other => return Err(format!("unknown field `{other}`")),
        }
    }
    let seq = seq.ok_or("missing `seq`")?;
    let n = seq.len();
    Ok(PatternFrame {
        category,
        variant,
        dep: dep.ok_or("missing `dep`")?,
        fnct: fnct.ok_or("missing `fnct`")?,
        cst: cst.unwrap_or_else(|| vec![ConstraintExpr::nil(); n]),
        seq,
    })
}
