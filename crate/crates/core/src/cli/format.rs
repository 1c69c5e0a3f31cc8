//! Line-oriented file formats. Machine-readable files start with the
//! header `epsengine/1` followed by a `kind` record.

use std::fmt::Write as _;

use crate::critical::{CriticalFormula, CriticalKind};
use crate::injury::{InjuryTrace, PathNode};
use crate::lang::{Canon, Term};
use crate::subst::{EpsSubstitution, Value};

use super::parse::{Instance, ParseError, Parser, Pos};

pub const HEADER: &str = "epsengine/1";

fn at(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        pos: Pos { line, col },
        msg: msg.into(),
    }
}

/// Prints an instance so that parsing gives it back. Critical formulas
/// refer to declared functions by name; everything else is printed inline.
pub fn print_instance(inst: &Instance) -> String {
    let mut out = String::new();
    for (name, f) in &inst.skolems {
        let _ = writeln!(out, "skolem {name}({}) := exists x. {}", f.arity(), f.matrix());
    }
    for cr in &inst.crs {
        let _ = writeln!(out, "crit {}", print_critical(inst, cr));
    }
    out
}

fn print_critical(inst: &Instance, cr: &CriticalFormula) -> String {
    let head = || {
        let f = cr.named_fn();
        let name = inst.name_of(f).map_or_else(|| f.to_string(), str::to_string);
        format!("{name}({})", join(cr.params()))
    };
    match cr.kind() {
        CriticalKind::Existence { witness } => format!("existence {} witness {witness}", head()),
        CriticalKind::Induction { bound, .. } => format!("induction {} bound {bound}", head()),
        CriticalKind::Predecessor => format!("pred {}", join(cr.params())),
    }
}

fn join(ts: &[Term]) -> String {
    ts.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn value_text(v: Value) -> String {
    match v {
        Value::Num(n) => n.to_string(),
        Value::Default => "?".to_string(),
    }
}

/// `term := value` lines sorted by their text.
pub fn substitution_lines(s: &EpsSubstitution) -> Vec<String> {
    let mut lines: Vec<String> = s.iter().map(|(k, v)| format!("{k} := {}", value_text(*v))).collect();
    lines.sort();
    lines
}

/// Key/value records describing a solution; the entries alone are read
/// back by [`parse_substitution`].
#[derive(Debug, Clone, Default)]
pub struct SolutionRecord<'a> {
    pub formulas: usize,
    pub top: usize,
    pub path: Option<&'a PathNode>,
    pub steps: usize,
}

pub fn write_substitution(s: &EpsSubstitution, meta: Option<&SolutionRecord>) -> String {
    let mut out = format!("{HEADER}\n");
    match meta {
        None => out.push_str("kind substitution\n"),
        Some(m) => {
            out.push_str("kind solution\n");
            let _ = writeln!(out, "formulas {}", m.formulas);
            let _ = writeln!(out, "top {}", m.top);
            if let Some(p) = m.path {
                let _ = writeln!(out, "path {p}");
            }
            let _ = writeln!(out, "steps {}", m.steps);
        }
    }
    for l in substitution_lines(s) {
        let _ = writeln!(out, "entry {l}");
    }
    out
}

/// Splits a machine-readable file into `(line number, key, rest)` records
/// after checking the header and kind.
fn records<'t>(text: &'t str, kinds: &[&str]) -> Result<Vec<(usize, &'t str, &'t str)>, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, other)) => return Err(at(n, 1, format!("expected header `{HEADER}`, found `{other}`"))),
        None => return Err(at(1, 1, format!("empty file, expected header `{HEADER}`"))),
    }
    let mut out = Vec::new();
    for (n, l) in lines {
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        out.push((n, key, rest.trim()));
    }
    match out.first() {
        Some((_, "kind", k)) if kinds.contains(k) => Ok(out.split_off(1)),
        Some((n, "kind", k)) => Err(at(*n, 6, format!("expected kind {}, found `{k}`", kinds.join(" or ")))),
        Some((n, ..)) => Err(at(*n, 1, "expected a `kind` record")),
        None => Err(at(1, 1, "missing `kind` record")),
    }
}

/// Reads the `entry` records of a substitution or solution file. Terms may
/// use the names declared in `inst`.
pub fn parse_substitution(text: &str, parser: &Parser, inst: &Instance) -> Result<EpsSubstitution, ParseError> {
    let mut s = EpsSubstitution::new();
    for (n, key, rest) in records(text, &["substitution", "solution"])? {
        let col = text.lines().nth(n - 1).map_or(1, |l| l.len() - l.trim_start().len() + key.len() + 2);
        match key {
            "entry" => {
                let (term, value) = rest
                    .rsplit_once(":=")
                    .ok_or_else(|| at(n, col, "expected `term := value`"))?;
                let t = parser.parse_term(term.trim(), inst).map_err(|e| at(n, col + e.pos.col - 1, e.msg))?;
                let canon = Canon::from_term(&t).ok_or_else(|| at(n, col, format!("{t} is not a canonical term")))?;
                let v = match value.trim() {
                    "?" => Value::Default,
                    num => Value::Num(
                        num.parse()
                            .map_err(|_| at(n, col, format!("expected a numeral or `?`, found `{num}`")))?,
                    ),
                };
                s.insert(canon, v).map_err(|e| at(n, col, e.to_string()))?;
            }
            "formulas" | "top" | "path" | "steps" => {}
            other => return Err(at(n, 1, format!("unknown record `{other}`"))),
        }
    }
    Ok(s)
}

pub fn write_trace(name: &str, trace: &InjuryTrace) -> String {
    let mut out = format!("{HEADER}\nkind trace\nname {name}\n");
    for (src, img) in trace.steps() {
        let _ = writeln!(out, "step {src} {img}");
    }
    out
}

/// Reads a trace file back as its name and steps.
pub fn parse_trace(text: &str) -> Result<(String, InjuryTrace), ParseError> {
    let mut name = String::new();
    let mut trace = InjuryTrace::default();
    for (n, key, rest) in records(text, &["trace"])? {
        match key {
            "name" => name = rest.to_string(),
            "step" => {
                let mut parts = rest.split_whitespace();
                let mut node = || -> Result<PathNode, ParseError> {
                    let p = parts.next().ok_or_else(|| at(n, 1, "expected `step SOURCE IMAGE`"))?;
                    p.parse().map_err(|e| at(n, 1, format!("{e}")))
                };
                let (src, img) = (node()?, node()?);
                if parts.next().is_some() {
                    return Err(at(n, 1, "trailing text after the image"));
                }
                trace.push(src, img);
            }
            other => return Err(at(n, 1, format!("unknown record `{other}`"))),
        }
    }
    Ok((name, trace))
}
