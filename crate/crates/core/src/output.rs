//! Serializations of an analysis: the indexed table, a tab-separated
//! column format that can be read back, and a DOT graph.

use std::fmt::{self, Write as _};

use crate::engine::{Analysis, CorefTarget, Row, RowId, Score, SentenceType};
use crate::lexicon::Features;
use crate::tagger::format_features;

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub id: RowId,
    /// Surface form, `-` for traces.
    pub lex: String,
    pub cat: String,
    pub dep: RowId,
    pub fnct: String,
    pub coref: Vec<CorefTarget>,
    pub secondary: Vec<(RowId, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisTable {
    pub text: String,
    pub sentence_type: SentenceType,
    pub profile: String,
    pub score: String,
    pub rows: Vec<TableRow>,
}

pub fn to_table(a: &Analysis) -> AnalysisTable {
    let mut rows: Vec<TableRow> = a
        .rows
        .iter()
        .map(|r| TableRow {
            id: r.id,
            lex: r.form.clone().unwrap_or_else(|| "-".to_string()),
            cat: r.cat.clone(),
            dep: r.dep,
            fnct: r.fnct.clone(),
            coref: r.coref.clone(),
            secondary: r.secondary.clone(),
        })
        .collect();
    rows.sort_by_key(|r| r.id);
    AnalysisTable {
        text: a.text.clone(),
        sentence_type: a.sentence_type,
        profile: a.profile.clone(),
        score: a.score.to_string(),
        rows,
    }
}

fn join_coref(c: &[CorefTarget]) -> String {
    if c.is_empty() {
        "_".to_string()
    } else {
        c.iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn join_secondary(s: &[(RowId, String)]) -> String {
    if s.is_empty() {
        "_".to_string()
    } else {
        s.iter()
            .map(|(h, f)| format!("{h}:{f}"))
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for AnalysisTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# text = {}", self.text)?;
        writeln!(f, "# sentence_type = {}", self.sentence_type.name())?;
        writeln!(f, "# profile = {}", self.profile)?;
        writeln!(f, "# score = {}", self.score)?;
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.id.to_string(),
                    r.lex.clone(),
                    r.cat.clone(),
                    r.dep.to_string(),
                    r.fnct.clone(),
                    join_coref(&r.coref),
                    join_secondary(&r.secondary),
                ]
            })
            .collect();
        let header = ["ID", "LEX", "CAT", "DEP", "FNCT", "COREF", "SECONDARY"];
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cols: Vec<&str>| {
            let padded: Vec<String> = cols
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        writeln!(f, "{}", line(header.to_vec()))?;
        for row in &cells {
            writeln!(f, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }
}

const COLUMNS: [&str; 9] = [
    "ID",
    "FORM",
    "LEMMA",
    "CAT",
    "FEATS",
    "HEAD",
    "DEPREL",
    "COREF",
    "SECONDARY",
];

fn or_blank(s: Option<&str>) -> &str {
    match s {
        Some(s) if !s.is_empty() => s,
        _ => "_",
    }
}

pub fn to_columns(a: &Analysis) -> String {
    let mut out = String::new();
    writeln!(out, "# text = {}", a.text).unwrap();
    writeln!(out, "# sentence_type = {}", a.sentence_type.name()).unwrap();
    writeln!(out, "# profile = {}", a.profile).unwrap();
    writeln!(out, "# score = {}", a.score).unwrap();
    writeln!(out, "{}", COLUMNS.join("\t")).unwrap();
    let mut rows: Vec<&Row> = a.rows.iter().collect();
    rows.sort_by_key(|r| r.id);
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            or_blank(r.form.as_deref()),
            or_blank(r.lemma.as_deref()),
            r.cat,
            format_features(&r.feats),
            r.dep,
            r.fnct,
            join_coref(&r.coref),
            join_secondary(&r.secondary)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ColumnsError {
    pub line: usize,
    pub message: String,
}

fn blank(s: &str) -> Option<String> {
    (s != "_").then(|| s.to_string())
}

/// Reads back one analysis written by [`to_columns`]. Meanings are not
/// part of the format and come back empty.
pub fn parse_columns(text: &str) -> Result<Analysis, ColumnsError> {
    let mut a = Analysis {
        text: String::new(),
        sentence_type: SentenceType::Assertive,
        profile: String::new(),
        rows: Vec::new(),
        score: Score::default(),
        diagnostics: Vec::new(),
        gaps: Vec::new(),
    };
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let err = |m: String| ColumnsError {
            line: i + 1,
            message: m,
        };
        if let Some(meta) = line.strip_prefix("# ") {
            let (k, v) = meta
                .split_once(" = ")
                .ok_or_else(|| err(format!("bad metadata `{meta}`")))?;
            match k {
                "text" => a.text = v.to_string(),
                "sentence_type" => a.sentence_type = v.parse().map_err(err)?,
                "profile" => a.profile = v.to_string(),
                "score" => a.score = v.parse().map_err(err)?,
                _ => return Err(err(format!("unknown metadata `{k}`"))),
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols == COLUMNS {
            header_seen = true;
            continue;
        }
        if !header_seen {
            return Err(err("row before the header".into()));
        }
        let [id, form, lemma, cat, feats, head, deprel, coref, secondary] = cols.as_slice() else {
            return Err(err(format!(
                "expected {} columns, found {}",
                COLUMNS.len(),
                cols.len()
            )));
        };
        let feats: Features = if *feats == "_" {
            Features::new()
        } else {
            feats
                .split('|')
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .ok_or_else(|| err(format!("bad feature `{kv}`")))
                })
                .collect::<Result<_, _>>()?
        };
        let coref = if *coref == "_" {
            Vec::new()
        } else {
            coref
                .split(',')
                .map(|c| c.parse().map_err(&err))
                .collect::<Result<_, _>>()?
        };
        let secondary = if *secondary == "_" {
            Vec::new()
        } else {
            secondary
                .split('|')
                .map(|p| {
                    let (h, f) = p
                        .split_once(':')
                        .ok_or_else(|| err(format!("bad secondary `{p}`")))?;
                    Ok((h.parse().map_err(&err)?, f.to_string()))
                })
                .collect::<Result<_, ColumnsError>>()?
        };
        a.rows.push(Row {
            id: id.parse().map_err(&err)?,
            form: blank(form),
            lemma: blank(lemma),
            cat: cat.to_string(),
            feats,
            dep: head.parse().map_err(&err)?,
            fnct: deprel.to_string(),
            coref,
            secondary,
            meanings: Vec::new(),
        });
    }
    if !header_seen {
        return Err(ColumnsError {
            line: text.lines().count(),
            message: "missing header row".into(),
        });
    }
    Ok(a)
}

fn node(id: RowId) -> String {
    format!("\"w{id}\"")
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT description: solid primary edges, dashed secondary edges, dotted
/// coreference edges.
pub fn to_graph(a: &Analysis) -> String {
    let mut out = String::from("digraph analysis {\n");
    let mut rows: Vec<&Row> = a.rows.iter().collect();
    rows.sort_by_key(|r| r.id);
    for r in &rows {
        let label = format!(
            "{} {}\\n{}",
            r.id,
            escape(r.form.as_deref().unwrap_or("-")),
            escape(&r.cat)
        );
        writeln!(out, "  {} [label=\"{}\"];", node(r.id), label).unwrap();
    }
    for r in &rows {
        if r.dep != RowId::ROOT {
            writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                node(r.dep),
                node(r.id),
                escape(&r.fnct)
            )
            .unwrap();
        }
    }
    for r in &rows {
        for (h, f) in &r.secondary {
            writeln!(
                out,
                "  {} -> {} [label=\"{}\", style=dashed];",
                node(*h),
                node(r.id),
                escape(f)
            )
            .unwrap();
        }
    }
    for r in &rows {
        for c in &r.coref {
            if let CorefTarget::Row(t) = c {
                writeln!(out, "  {} -> {} [style=dotted];", node(r.id), node(*t)).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Every edge [`to_graph`] draws (primary, secondary and coreference) as
/// ordered row pairs.
pub fn arcs(a: &Analysis) -> Vec<(RowId, RowId)> {
    let mut out: Vec<(RowId, RowId)> = Vec::new();
    for r in &a.rows {
        if r.dep != RowId::ROOT {
            out.push((r.dep, r.id));
        }
        out.extend(r.secondary.iter().map(|(h, _)| (*h, r.id)));
        out.extend(r.coref.iter().filter_map(|c| match c {
            CorefTarget::Row(t) => Some((r.id, *t)),
            CorefTarget::Discourse => None,
        }));
    }
    out
}

/// Pairs of arcs that cross when drawn above the sentence.
pub fn crossing_arcs(a: &Analysis) -> Vec<((RowId, RowId), (RowId, RowId))> {
    let all = arcs(a);
    let span = |(x, y): (RowId, RowId)| if x < y { (x, y) } else { (y, x) };
    let mut out = Vec::new();
    for (i, p) in all.iter().enumerate() {
        for q in &all[i + 1..] {
            let ((a1, b1), (a2, b2)) = (span(*p), span(*q));
            if (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1) {
                out.push((*p, *q));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, form: &str, cat: &str, dep: &str, fnct: &str) -> Row {
        Row {
            id: id.parse().unwrap(),
            form: (form != "-").then(|| form.to_string()),
            lemma: (form != "-").then(|| form.to_lowercase()),
            cat: cat.to_string(),
            feats: Features::new(),
            dep: dep.parse().unwrap(),
            fnct: fnct.to_string(),
            coref: Vec::new(),
            secondary: Vec::new(),
            meanings: Vec::new(),
        }
    }

    fn sample() -> Analysis {
        let mut rows = vec![
            row("1", "James", "N", "2", "subj"),
            row("2", "builds", "V", "0", "v"),
            row("3", "and", "Conj", "4", "conn"),
            row("4", "repairs", "V", "2", "coord"),
            row("5", "computers", "N", "2", "obj"),
        ];
        rows[0].secondary.push((RowId::word(4), "subj".into()));
        rows[4].secondary.push((RowId::word(4), "obj".into()));
        rows[4].feats.insert("num".into(), "pl".into());
        Analysis {
            text: "James builds and repairs computers".into(),
            sentence_type: SentenceType::Assertive,
            profile: "strict".into(),
            rows,
            score: Score {
                unfilled: 0,
                penalty: 0.0,
                semantic: 1.5,
                rank: vec![3, 0, 7],
            },
            diagnostics: Vec::new(),
            gaps: Vec::new(),
        }
    }

    #[test]
    fn columns_round_trip() {
        let a = sample();
        let text = to_columns(&a);
        let back = parse_columns(&text).unwrap();
        assert_eq!(to_table(&back), to_table(&a));
        assert_eq!(to_columns(&back), text);
    }

    #[test]
    fn empty_analysis_is_header_only() {
        let mut a = sample();
        a.rows.clear();
        let text = to_columns(&a);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
        assert!(parse_columns(&text).unwrap().rows.is_empty());
    }

    #[test]
    fn table_layout() {
        let t = to_table(&sample()).to_string();
        assert!(t.contains("# sentence_type = assertive"));
        let computers = t.lines().find(|l| l.starts_with("5 ")).unwrap();
        assert!(computers.contains("4:obj"), "{computers}");
    }

    #[test]
    fn graph_styles_and_crossing() {
        let a = sample();
        let g = to_graph(&a);
        assert!(g.contains("\"w4\" -> \"w5\" [label=\"obj\", style=dashed];"));
        assert_eq!(to_graph(&a), g);
        assert!(!crossing_arcs(&a).is_empty());
        let mut single = sample();
        single.rows = vec![row("1", "Run", "V", "0", "v")];
        let g = to_graph(&single);
        assert_eq!(g.matches("->").count(), 0);
        assert_eq!(g.matches("[label=").count(), 1);
    }
}
