use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::critical::CriticalFormula;
use crate::lang::{Formula, LangError, Pred, SkolemFunction, Term, UserPredicate, Var};

/// Line and column, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    fn new(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

/// A parsed instance file: named Skolem functions in declaration order and
/// the ordered list of critical formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    pub skolems: Vec<(String, Arc<SkolemFunction>)>,
    pub crs: Vec<CriticalFormula>,
}

impl Instance {
    pub fn lookup(&self, name: &str) -> Option<&Arc<SkolemFunction>> {
        self.skolems.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn name_of(&self, func: &SkolemFunction) -> Option<&str> {
        self.skolems
            .iter()
            .find(|(_, f)| **f == *func)
            .map(|(n, _)| n.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

const SYMBOLS: [&str; 13] = [":=", "<=", "(", ")", ",", ".", "=", "<", "!", "&", "|", "{", "}"];

fn lex(line: &str, line_no: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line: line_no, col: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| ParseError::new(pos, format!("numeral {text} is too large")))?;
            out.push((Tok::Num(n), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(**s))
                .ok_or_else(|| ParseError::new(pos, format!("unexpected character `{c}`")))?;
            i += sym.chars().count();
            out.push((Tok::Sym(sym), pos));
        }
    }
    Ok(out)
}

const KEYWORDS: [&str; 10] = [
    "skolem", "crit", "existence", "induction", "pred", "witness", "bound", "exists", "S", "x",
];

fn is_param_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('y') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

fn is_reserved(s: &str) -> bool {
    KEYWORDS.contains(&s) || is_param_name(s) || s.starts_with("c_")
}

/// Parser for instance files and for the terms and formulas inside them.
///
/// User predicates registered with [`Parser::with_predicate`] may appear as
/// atoms `name(t1, .., tn)`.
#[derive(Debug, Clone, Default)]
pub struct Parser {
    predicates: BTreeMap<String, UserPredicate>,
}

impl Parser {
    pub fn new() -> Self {
        Parser::default()
    }

    pub fn with_predicate(mut self, p: UserPredicate) -> Self {
        self.predicates.insert(p.name().to_string(), p);
        self
    }

    pub fn parse_instance(&self, text: &str) -> Result<Instance, ParseError> {
        let mut inst = Instance::default();
        for (i, line) in text.lines().enumerate() {
            let toks = lex(line, i + 1)?;
            if toks.is_empty() {
                continue;
            }
            let mut cur = Cursor::new(&toks, i + 1, line.chars().count() + 1, self, &inst);
            match cur.ident()?.as_str() {
                "skolem" => {
                    let decl = cur.declaration()?;
                    cur.end()?;
                    inst.skolems.push(decl);
                }
                "crit" => {
                    let cr = cur.critical()?;
                    cur.end()?;
                    inst.crs.push(cr);
                }
                other => {
                    return Err(ParseError::new(
                        toks[0].1,
                        format!("expected `skolem` or `crit`, found `{other}`"),
                    ))
                }
            }
        }
        Ok(inst)
    }

    /// A closed term, with Skolem names resolved against `inst`.
    pub fn parse_term(&self, text: &str, inst: &Instance) -> Result<Term, ParseError> {
        self.parse_single(text, inst, |c| c.term(Scope::Closed))
    }

    /// A closed formula, with Skolem names resolved against `inst`.
    pub fn parse_formula(&self, text: &str, inst: &Instance) -> Result<Formula, ParseError> {
        self.parse_single(text, inst, |c| c.formula(Scope::Closed))
    }

    fn parse_single<T>(
        &self,
        text: &str,
        inst: &Instance,
        f: impl FnOnce(&mut Cursor) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let toks = lex(text, 1)?;
        let mut cur = Cursor::new(&toks, 1, text.chars().count() + 1, self, inst);
        let v = f(&mut cur)?;
        cur.end()?;
        Ok(v)
    }
}

/// Parses an instance file with no user predicates.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    Parser::new().parse_instance(text)
}

/// Which variables may occur: none, or `x` and any parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    Closed,
    Matrix,
}

struct Cursor<'a> {
    toks: &'a [(Tok, Pos)],
    at: usize,
    eol: Pos,
    parser: &'a Parser,
    inst: &'a Instance,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [(Tok, Pos)], line: usize, col: usize, parser: &'a Parser, inst: &'a Instance) -> Self {
        Cursor {
            toks,
            at: 0,
            eol: Pos { line, col },
            parser,
            inst,
        }
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.eol, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|t| &t.0)
    }

    fn found(&self) -> String {
        self.peek().map_or("end of line".to_string(), ToString::to_string)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.pos(), msg))
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.found()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err(format!("expected a name, found {}", self.found())),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.at += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{k}`, found {}", self.found())),
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.at += 1;
                Ok(n)
            }
            _ => self.err(format!("expected a numeral, found {}", self.found())),
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.err(format!("unexpected {}", self.found())),
        }
    }

    fn lang<T>(&self, pos: Pos, r: Result<T, LangError>) -> Result<T, ParseError> {
        r.map_err(|e| ParseError::new(pos, e.to_string()))
    }

    /// `name(k) := exists x. formula`, after `skolem`.
    fn declaration(&mut self) -> Result<(String, Arc<SkolemFunction>), ParseError> {
        let pos = self.pos();
        let name = self.ident()?;
        if is_reserved(&name) {
            return Err(ParseError::new(pos, format!("`{name}` is reserved")));
        }
        if self.inst.lookup(&name).is_some() {
            return Err(ParseError::new(pos, format!("`{name}` is already declared")));
        }
        if self.parser.predicates.contains_key(&name) {
            return Err(ParseError::new(pos, format!("`{name}` names a predicate")));
        }
        self.sym("(")?;
        let arity = self.number()? as usize;
        self.sym(")")?;
        self.sym(":=")?;
        self.keyword("exists")?;
        self.keyword("x")?;
        self.sym(".")?;
        let matrix = self.formula(Scope::Matrix)?;
        let func = self.lang(pos, SkolemFunction::new(matrix, arity))?;
        Ok((name, func))
    }

    fn critical(&mut self) -> Result<CriticalFormula, ParseError> {
        let pos = self.pos();
        match self.ident()?.as_str() {
            "existence" => {
                let (func, args) = self.application()?;
                self.keyword("witness")?;
                let w = self.term(Scope::Closed)?;
                self.lang(pos, CriticalFormula::existence(func, w, args))
            }
            "induction" => {
                let (func, args) = self.application()?;
                self.keyword("bound")?;
                let b = self.term(Scope::Closed)?;
                self.lang(pos, CriticalFormula::induction(func, b, args))
            }
            "pred" => Ok(CriticalFormula::predecessor(self.term(Scope::Closed)?)),
            other => Err(ParseError::new(
                pos,
                format!("expected `existence`, `induction` or `pred`, found `{other}`"),
            )),
        }
    }

    /// A Skolem function applied to closed arguments: `name(args)` or an
    /// inline `c_{exists x. phi}(args)`.
    fn application(&mut self) -> Result<(Arc<SkolemFunction>, Vec<Term>), ParseError> {
        match self.term(Scope::Closed)? {
            Term::App(f, args) => Ok((f, args)),
            _ => self.err("expected a Skolem term"),
        }
    }

    fn args(&mut self, scope: Scope) -> Result<Vec<Term>, ParseError> {
        self.sym("(")?;
        let mut out = Vec::new();
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(self.term(scope)?);
            if self.eat_sym(")") {
                return Ok(out);
            }
            self.sym(",")?;
        }
    }

    fn term(&mut self, scope: Scope) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Term::num(n))
            }
            Some(Tok::Ident(s)) => {
                self.at += 1;
                match s.as_str() {
                    "S" => Ok(Term::succ(self.term(scope)?)),
                    v if v == "x" || is_param_name(v) => {
                        if scope == Scope::Closed {
                            return Err(ParseError::new(pos, format!("variable `{s}` outside a Skolem matrix")));
                        }
                        if s == "x" {
                            return Ok(Term::var(Var::Bound));
                        }
                        let i: usize = s[1..]
                            .parse()
                            .map_err(|_| ParseError::new(pos, format!("bad parameter `{s}`")))?;
                        if i == 0 {
                            return Err(ParseError::new(pos, "parameters are numbered from y1"));
                        }
                        Ok(Term::var(Var::Param(i - 1)))
                    }
                    "c_" => {
                        self.sym("{")?;
                        let matrix_pos = self.pos();
                        self.keyword("exists")?;
                        self.keyword("x")?;
                        self.sym(".")?;
                        let matrix = self.formula(Scope::Matrix)?;
                        self.sym("}")?;
                        let args = self.args(scope)?;
                        let func = self.lang(matrix_pos, SkolemFunction::new(matrix, args.len()))?;
                        self.lang(pos, Term::app(func, args))
                    }
                    name => {
                        let func = self
                            .inst
                            .lookup(name)
                            .cloned()
                            .ok_or_else(|| ParseError::new(pos, format!("undeclared Skolem function `{name}`")))?;
                        let args = self.args(scope)?;
                        self.lang(pos, Term::app(func, args))
                    }
                }
            }
            _ => self.err(format!("expected a term, found {}", self.found())),
        }
    }

    /// `or := and ("|" or)?`, `and := unary ("&" and)?`.
    fn formula(&mut self, scope: Scope) -> Result<Formula, ParseError> {
        let a = self.conjunction(scope)?;
        if self.eat_sym("|") {
            Ok(Formula::or(a, self.formula(scope)?))
        } else {
            Ok(a)
        }
    }

    fn conjunction(&mut self, scope: Scope) -> Result<Formula, ParseError> {
        let a = self.unary(scope)?;
        if self.eat_sym("&") {
            Ok(Formula::and(a, self.conjunction(scope)?))
        } else {
            Ok(a)
        }
    }

    fn unary(&mut self, scope: Scope) -> Result<Formula, ParseError> {
        if self.eat_sym("!") {
            return Ok(self.unary(scope)?.negate());
        }
        if self.eat_sym("(") {
            let f = self.formula(scope)?;
            self.sym(")")?;
            return Ok(f);
        }
        self.atom(scope)
    }

    fn atom(&mut self, scope: Scope) -> Result<Formula, ParseError> {
        let pos = self.pos();
        if let (Some(Tok::Ident(name)), Some(Tok::Sym("("))) = (self.peek(), self.peek2()) {
            if let Some(p) = self.parser.predicates.get(name).cloned() {
                self.at += 1;
                let args = self.args(scope)?;
                if args.len() != p.arity() {
                    return Err(ParseError::new(
                        pos,
                        format!("predicate `{}` takes {} arguments, found {}", p.name(), p.arity(), args.len()),
                    ));
                }
                return Ok(Formula::atom(Pred::User(p), args));
            }
        }
        let lhs = self.term(scope)?;
        let pred = if self.eat_sym("=") {
            Pred::Eq
        } else if self.eat_sym("<=") {
            Pred::Le
        } else if self.eat_sym("<") {
            Pred::Lt
        } else {
            return self.err(format!("expected `=`, `<` or `<=`, found {}", self.found()));
        };
        let rhs = self.term(scope)?;
        Ok(Formula::atom(pred, vec![lhs, rhs]))
    }
}
