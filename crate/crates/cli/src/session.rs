//! Session files: one statement per line, `#` starts a comment.
//!
//! ```text
//! ring p=3 d=1 m=1 k=2
//! drinfeld E r=2 eT=z + z*t1 + t2
//! mstructure iota on E shape=2 points=0
//! run check-mstructure iota
//! ```

use std::fmt;
use std::sync::Arc;

use drinlevel::algebra::{make_ring, BaseRing, Matrix, Poly, RingElem};
use drinlevel::drinfeld::DrinfeldModule;
use drinlevel::finshtuka::TorsionShtuka;
use drinlevel::level::{Divisor, Gamma0Flag, MShape, MStructure};
use drinlevel::skewpoly::SkewPoly;
use thiserror::Error;

use crate::commands;
use crate::expr::{self, Mode};
use crate::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Syntax,
    UnknownName,
    TypeMismatch,
    Usage,
    Computation,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Syntax => "syntax error",
            Kind::UnknownName => "unknown name",
            Kind::TypeMismatch => "type mismatch",
            Kind::Usage => "usage error",
            Kind::Computation => "computation failed",
        })
    }
}

fn location(line: &Option<usize>, column: &Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}{}: {message}", location(.line, .column))]
pub struct Diagnostic {
    pub kind: Kind,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self { kind, line: None, column: None, message: message.into() }
    }

    pub fn at(kind: Kind, line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { kind, line: Some(line), column: Some(column), message: message.into() }
    }

    /// Adds a line number unless one is already present.
    pub fn on_line(mut self, line: usize) -> Self {
        if self.line.is_none() {
            self.line = Some(line);
        }
        self
    }
}

impl From<drinlevel::Error> for Diagnostic {
    fn from(e: drinlevel::Error) -> Self {
        Diagnostic::new(Kind::Computation, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingDecl {
    pub p: u32,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub modulus: Option<Vec<u32>>,
}

impl fmt::Display for RingDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ring p={} d={} m={} k={}", self.p, self.d, self.m, self.k)?;
        if let Some(md) = &self.modulus {
            write!(f, " modulus={}", render::csv(md))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Object {
    Drinfeld(DrinfeldModule),
    Divisor(Divisor),
    MStructure { on: String, structure: MStructure },
    Gamma0 { on: String, flag: Gamma0Flag },
    Shtuka(TorsionShtuka),
}

impl Object {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Object::Drinfeld(_) => "drinfeld",
            Object::Divisor(_) => "divisor",
            Object::MStructure { .. } => "mstructure",
            Object::Gamma0 { .. } => "gamma0",
            Object::Shtuka(_) => "shtuka",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Item {
    Object { name: String, object: Object, line: usize },
    Run { words: Vec<String>, line: usize },
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Item::Object { name: a, object: x, .. }, Item::Object { name: b, object: y, .. }) => a == b && x == y,
            (Item::Run { words: a, .. }, Item::Run { words: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for Item {}

#[derive(Debug, Clone, Default)]
pub struct Session {
    ring: Option<(RingDecl, Arc<BaseRing>)>,
    items: Vec<Item>,
}

impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        self.ring.as_ref().map(|r| &r.0) == other.ring.as_ref().map(|r| &r.0) && self.items == other.items
    }
}

impl Eq for Session {}

impl Session {
    pub fn ring_decl(&self) -> Option<&RingDecl> {
        self.ring.as_ref().map(|r| &r.0)
    }

    pub fn ring(&self) -> Option<&Arc<BaseRing>> {
        self.ring.as_ref().map(|r| &r.1)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.items.iter().find_map(|it| match it {
            Item::Object { name: n, object, .. } if n == name => Some(object),
            _ => None,
        })
    }

    /// `run` directives in file order, with their line numbers.
    pub fn directives(&self) -> Vec<(usize, &[String])> {
        self.items
            .iter()
            .filter_map(|it| match it {
                Item::Run { words, line } => Some((*line, words.as_slice())),
                _ => None,
            })
            .collect()
    }

    /// Canonical text; parses back to an equal session.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if let Some((decl, _)) = &self.ring {
            out.push_str(&decl.to_string());
            out.push('\n');
        }
        for item in &self.items {
            let line = match item {
                Item::Run { words, .. } => format!("run {}", words.join(" ")),
                Item::Object { name, object, .. } => serialize_object(name, object),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

fn elements_csv(xs: &[RingElem]) -> String {
    xs.iter().map(render::element).collect::<Vec<_>>().join(", ")
}

fn matrix_text(m: &Matrix<RingElem>) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| elements_csv(m.row(i))).collect();
    format!("[{}]", rows.join("; "))
}

fn serialize_object(name: &str, object: &Object) -> String {
    match object {
        Object::Drinfeld(e) => format!("drinfeld {name} r={} eT={}", e.rank(), render::skew(e.e_t())),
        Object::Divisor(d) => format!("divisor {name} g={}", render::poly(d.poly())),
        Object::MStructure { on, structure } => format!(
            "mstructure {name} on {on} shape={} points={}",
            render::csv(structure.shape().exponents()),
            elements_csv(structure.gens())
        ),
        Object::Gamma0 { on, flag } => {
            let polys: Vec<String> = flag.divisors().iter().map(|d| render::poly(d.poly())).collect();
            let mut s = format!("gamma0 {name} on {on} n={} flag=[{}]", flag.n(), polys.join("; "));
            if let Some(w) = flag.witness() {
                s.push_str(&format!(" witness={}", elements_csv(w)));
            }
            s
        }
        Object::Shtuka(f) => format!("shtuka {name} n={} phi={} pi={}", f.n(), matrix_text(f.phi()), matrix_text(f.pi())),
    }
}

/// One-based character column of byte offset `at` in `line`.
fn column(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

struct Field<'a> {
    at: usize,
    text: &'a str,
}

struct Statement<'a> {
    line_no: usize,
    line: &'a str,
    words: Vec<Field<'a>>,
    keys: Vec<(Field<'a>, Field<'a>)>,
}

fn is_key_token(tok: &str) -> bool {
    let Some(eq) = tok.find('=') else { return false };
    eq > 0 && tok[..eq].chars().all(|c| c.is_ascii_alphanumeric()) && tok.starts_with(|c: char| c.is_ascii_alphabetic())
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

impl<'a> Statement<'a> {
    /// Splits `word* (key=value)*`; a value runs until the next `key=` token.
    fn split(line_no: usize, line: &'a str) -> Self {
        let toks = tokens(line);
        let first_key = toks.iter().position(|(_, t)| is_key_token(t)).unwrap_or(toks.len());
        let words = toks[..first_key].iter().map(|&(at, text)| Field { at, text }).collect();
        let mut keys = Vec::new();
        let starts: Vec<usize> = toks[first_key..].iter().filter(|(_, t)| is_key_token(t)).map(|&(at, _)| at).collect();
        for (i, &at) in starts.iter().enumerate() {
            let end = starts.get(i + 1).copied().unwrap_or(line.len());
            let seg = &line[at..end];
            let eq = seg.find('=').unwrap();
            let raw = &seg[eq + 1..];
            let lead = raw.len() - raw.trim_start().len();
            let value = raw.trim();
            keys.push((Field { at, text: &seg[..eq] }, Field { at: at + eq + 1 + lead, text: value }));
        }
        Statement { line_no, line, words, keys }
    }

    fn err(&self, kind: Kind, at: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic::at(kind, self.line_no, column(self.line, at), message)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), Diagnostic> {
        for (i, (k, _)) in self.keys.iter().enumerate() {
            if !allowed.contains(&k.text) {
                return Err(self.err(Kind::Syntax, k.at, format!("unexpected key `{}`", k.text)));
            }
            if self.keys[..i].iter().any(|(other, _)| other.text == k.text) {
                return Err(self.err(Kind::Syntax, k.at, format!("key `{}` given twice", k.text)));
            }
        }
        Ok(())
    }

    fn optional(&self, key: &str) -> Option<&Field<'a>> {
        self.keys.iter().find(|(k, _)| k.text == key).map(|(_, v)| v)
    }

    fn required(&self, key: &str) -> Result<&Field<'a>, Diagnostic> {
        self.optional(key).ok_or_else(|| self.err(Kind::Syntax, self.line.len(), format!("missing `{key}=`")))
    }

    fn int(&self, f: &Field) -> Result<usize, Diagnostic> {
        f.text.parse().map_err(|_| self.err(Kind::Syntax, f.at, format!("expected an integer, found `{}`", f.text)))
    }

    /// Comma separated integers, e.g. `2,1`.
    fn ints(&self, f: &Field) -> Result<Vec<usize>, Diagnostic> {
        self.pieces(f, ',').into_iter().map(|p| self.int(&p)).collect()
    }

    /// Non-empty trimmed pieces of a value split at `sep`.
    fn pieces<'b>(&self, f: &Field<'b>, sep: char) -> Vec<Field<'b>> {
        if f.text.trim().is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut start = 0;
        for piece in f.text.split(sep) {
            let lead = piece.len() - piece.trim_start().len();
            out.push(Field { at: f.at + start + lead, text: piece.trim() });
            start += piece.len() + sep.len_utf8();
        }
        out
    }

    /// Contents of `[ ... ]`.
    fn bracketed<'b>(&self, f: &Field<'b>) -> Result<Field<'b>, Diagnostic> {
        let t = f.text;
        if !t.starts_with('[') || !t.ends_with(']') || t.len() < 2 {
            return Err(self.err(Kind::Syntax, f.at, "expected `[...]`"));
        }
        Ok(Field { at: f.at + 1, text: &t[1..t.len() - 1] })
    }

    fn expr(&self, ring: &Arc<BaseRing>, f: &Field, mode: Mode) -> Result<Vec<RingElem>, Diagnostic> {
        expr::parse(ring, f.text, mode).map_err(|e| self.err(Kind::Syntax, f.at + e.offset, e.message))
    }

    fn element(&self, ring: &Arc<BaseRing>, f: &Field) -> Result<RingElem, Diagnostic> {
        expr::parse_element(ring, f.text).map_err(|e| self.err(Kind::Syntax, f.at + e.offset, e.message))
    }

    fn elements(&self, ring: &Arc<BaseRing>, f: &Field) -> Result<Vec<RingElem>, Diagnostic> {
        self.pieces(f, ',').iter().map(|p| self.element(ring, p)).collect()
    }

    fn matrix(&self, ring: &Arc<BaseRing>, f: &Field) -> Result<Matrix<RingElem>, Diagnostic> {
        let inner = self.bracketed(f)?;
        let rows: Vec<Vec<RingElem>> =
            self.pieces(&inner, ';').iter().map(|r| self.elements(ring, r)).collect::<Result<_, _>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(rows, cols).map_err(|e| self.err(Kind::TypeMismatch, f.at, e.to_string()))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "on"
}

const STATEMENTS: &[&str] = &["ring", "drinfeld", "divisor", "mstructure", "gamma0", "shtuka", "run"];

struct Builder {
    session: Session,
    last_drinfeld: Option<String>,
}

impl Builder {
    fn ring(&self, st: &Statement) -> Result<Arc<BaseRing>, Diagnostic> {
        self.session
            .ring()
            .cloned()
            .ok_or_else(|| st.err(Kind::Syntax, st.words[0].at, "a `ring` declaration must come first"))
    }

    fn fresh_name(&self, base: &str) -> String {
        if self.session.get(base).is_none() {
            return base.to_string();
        }
        (2..).map(|i| format!("{base}{i}")).find(|n| self.session.get(n).is_none()).unwrap()
    }

    fn declare(&mut self, st: &Statement, at: usize, name: String, object: Object) -> Result<(), Diagnostic> {
        if !is_identifier(&name) {
            return Err(st.err(Kind::Syntax, at, format!("`{name}` is not a valid name")));
        }
        if self.session.get(&name).is_some() {
            return Err(st.err(Kind::Syntax, at, format!("`{name}` is already declared")));
        }
        if matches!(object, Object::Drinfeld(_)) {
            self.last_drinfeld = Some(name.clone());
        }
        self.session.items.push(Item::Object { name, object, line: st.line_no });
        Ok(())
    }

    fn drinfeld(&self, st: &Statement, f: &Field) -> Result<(String, DrinfeldModule), Diagnostic> {
        match self.session.get(f.text) {
            Some(Object::Drinfeld(e)) => Ok((f.text.to_string(), e.clone())),
            Some(other) => Err(st.err(
                Kind::TypeMismatch,
                f.at,
                format!("`{}` is a {}, expected a drinfeld module", f.text, other.kind_name()),
            )),
            None => Err(st.err(Kind::UnknownName, f.at, format!("`{}` is not declared", f.text))),
        }
    }

    /// `[name] [on E]` with defaults.
    fn named_on(&self, st: &Statement, default: &str) -> Result<(String, usize, String, DrinfeldModule), Diagnostic> {
        let w = &st.words[1..];
        let (name, name_at, on) = match w {
            [] => (None, st.words[0].at, None),
            [n] => (Some(n), n.at, None),
            [o, e] if o.text == "on" => (None, st.words[0].at, Some(e)),
            [n, o, e] if o.text == "on" => (Some(n), n.at, Some(e)),
            _ => return Err(st.err(Kind::Syntax, w[0].at, "expected `[name] [on <module>]`")),
        };
        let name = name.map_or_else(|| self.fresh_name(default), |n| n.text.to_string());
        let (on, e) = match on {
            Some(f) => self.drinfeld(st, f)?,
            None => {
                let last = self
                    .last_drinfeld
                    .clone()
                    .ok_or_else(|| st.err(Kind::UnknownName, st.words[0].at, "no drinfeld module declared"))?;
                let e = match self.session.get(&last) {
                    Some(Object::Drinfeld(e)) => e.clone(),
                    _ => unreachable!(),
                };
                (last, e)
            }
        };
        Ok((name, name_at, on, e))
    }

    fn statement(&mut self, st: &Statement) -> Result<(), Diagnostic> {
        let head = &st.words[0];
        let mismatch = |at: usize, e: drinlevel::Error| st.err(Kind::TypeMismatch, at, e.to_string());
        match head.text {
            "ring" => {
                if self.session.ring.is_some() {
                    return Err(st.err(Kind::Syntax, head.at, "ring declared twice"));
                }
                if !self.session.items.is_empty() {
                    return Err(st.err(Kind::Syntax, head.at, "a `ring` declaration must come first"));
                }
                if let Some(w) = st.words.get(1) {
                    return Err(st.err(Kind::Syntax, w.at, format!("unexpected `{}`", w.text)));
                }
                st.check_keys(&["p", "d", "m", "k", "modulus"])?;
                let p = st.int(st.required("p")?)?;
                let decl = RingDecl {
                    p: u32::try_from(p).map_err(|_| st.err(Kind::TypeMismatch, st.required("p").unwrap().at, "p too large"))?,
                    d: st.int(st.required("d")?)?,
                    m: st.int(st.required("m")?)?,
                    k: st.int(st.required("k")?)?,
                    modulus: match st.optional("modulus") {
                        Some(f) => Some(st.ints(f)?.into_iter().map(|c| c as u32).collect()),
                        None => None,
                    },
                };
                let ring = make_ring(decl.p, decl.d, decl.m, decl.k, decl.modulus.clone()).map_err(|e| mismatch(head.at, e))?;
                self.session.ring = Some((decl, ring));
            }
            "drinfeld" => {
                let ring = self.ring(st)?;
                st.check_keys(&["r", "eT"])?;
                let (name, at) = match &st.words[1..] {
                    [] => (self.fresh_name("E"), head.at),
                    [n] => (n.text.to_string(), n.at),
                    [_, extra, ..] => return Err(st.err(Kind::Syntax, extra.at, format!("unexpected `{}`", extra.text))),
                };
                let f = st.required("eT")?;
                let e_t = SkewPoly::new(&ring, st.expr(&ring, f, Mode::Skew)?);
                let e = DrinfeldModule::new(e_t).map_err(|e| mismatch(f.at, e))?;
                if let Some(rf) = st.optional("r") {
                    let r = st.int(rf)?;
                    if r != e.rank() {
                        return Err(st.err(Kind::TypeMismatch, rf.at, format!("r={r} but e_T has τ-degree {}", e.rank())));
                    }
                }
                self.declare(st, at, name, Object::Drinfeld(e))?;
            }
            "divisor" => {
                let ring = self.ring(st)?;
                st.check_keys(&["g"])?;
                let [n] = &st.words[1..] else {
                    return Err(st.err(Kind::Syntax, head.at, "expected `divisor <name> g=<poly>`"));
                };
                let f = st.required("g")?;
                let g = Divisor::new(Poly::new(&ring, st.expr(&ring, f, Mode::Poly)?)).map_err(|e| mismatch(f.at, e))?;
                self.declare(st, n.at, n.text.to_string(), Object::Divisor(g))?;
            }
            "mstructure" => {
                let ring = self.ring(st)?;
                st.check_keys(&["shape", "points"])?;
                let (name, at, on, e) = self.named_on(st, "iota")?;
                let sf = st.required("shape")?;
                let shape = MShape::new(st.ints(sf)?).map_err(|e| mismatch(sf.at, e))?;
                let pf = st.required("points")?;
                let points = st.elements(&ring, pf)?;
                let structure = MStructure::new(shape, e, points).map_err(|e| mismatch(pf.at, e))?;
                self.declare(st, at, name, Object::MStructure { on, structure })?;
            }
            "gamma0" => {
                let ring = self.ring(st)?;
                st.check_keys(&["n", "flag", "witness"])?;
                let (name, at, on, e) = self.named_on(st, "F")?;
                let n = st.int(st.required("n")?)?;
                let ff = st.required("flag")?;
                let inner = st.bracketed(ff)?;
                let divisors = st
                    .pieces(&inner, ';')
                    .iter()
                    .map(|p| Divisor::new(Poly::new(&ring, st.expr(&ring, p, Mode::Poly)?)).map_err(|e| mismatch(p.at, e)))
                    .collect::<Result<Vec<_>, _>>()?;
                let witness = match st.optional("witness") {
                    Some(w) => Some(st.elements(&ring, w)?),
                    None => None,
                };
                let flag = Gamma0Flag::new(e, n, divisors, witness).map_err(|e| mismatch(ff.at, e))?;
                self.declare(st, at, name, Object::Gamma0 { on, flag })?;
            }
            "shtuka" => {
                let ring = self.ring(st)?;
                st.check_keys(&["n", "phi", "pi"])?;
                let (name, at) = match &st.words[1..] {
                    [] => (self.fresh_name("M"), head.at),
                    [n] => (n.text.to_string(), n.at),
                    [_, extra, ..] => return Err(st.err(Kind::Syntax, extra.at, format!("unexpected `{}`", extra.text))),
                };
                let n = st.int(st.required("n")?)?;
                let phi_f = st.required("phi")?;
                let phi = st.matrix(&ring, phi_f)?;
                let pi = st.matrix(&ring, st.required("pi")?)?;
                let f = TorsionShtuka::new(&ring, n, phi, pi).map_err(|e| mismatch(phi_f.at, e))?;
                self.declare(st, at, name, Object::Shtuka(f))?;
            }
            "run" => {
                let words: Vec<String> = tokens(st.line)[1..].iter().map(|(_, t)| t.to_string()).collect();
                let Some(cmd) = words.first() else {
                    return Err(st.err(Kind::Syntax, head.at, "`run` needs a command"));
                };
                let toks = tokens(st.line);
                if !commands::COMMANDS.contains(&cmd.as_str()) {
                    return Err(st.err(Kind::Syntax, toks[1].0, format!("unknown command `{cmd}`")));
                }
                if let (Some(kind), Some(&(at, target))) = (commands::object_argument(cmd), toks.get(2)) {
                    match self.session.get(target) {
                        None => return Err(st.err(Kind::UnknownName, at, format!("`{target}` is not declared"))),
                        Some(o) if o.kind_name() != kind => {
                            return Err(st.err(
                                Kind::TypeMismatch,
                                at,
                                format!("`{target}` is a {}, `{cmd}` expects a {kind}", o.kind_name()),
                            ))
                        }
                        _ => {}
                    }
                }
                self.session.items.push(Item::Run { words, line: st.line_no });
            }
            other => {
                return Err(st.err(
                    Kind::Syntax,
                    head.at,
                    format!("unknown statement `{other}`; expected one of {}", STATEMENTS.join(", ")),
                ))
            }
        }
        Ok(())
    }
}

pub fn parse_session(text: &str) -> Result<Session, Diagnostic> {
    let mut b = Builder { session: Session::default(), last_drinfeld: None };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap();
        let st = Statement::split(i + 1, line);
        if st.words.is_empty() {
            if let Some((k, _)) = st.keys.first() {
                return Err(st.err(Kind::Syntax, k.at, "expected a statement keyword"));
            }
            continue;
        }
        b.statement(&st)?;
    }
    Ok(b.session)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_session_parses() {
        let s = parse_session("ring p=3 d=1 m=1 k=2\ndrinfeld r=2 eT=z + z*t1 + t2\n").unwrap();
        assert!(matches!(s.get("E"), Some(Object::Drinfeld(e)) if e.rank() == 2));
        assert_eq!(s.serialize(), "ring p=3 d=1 m=1 k=2\ndrinfeld E r=2 eT=z + z*t1 + t2\n");
    }

    #[test]
    fn key_values_split_on_keys() {
        let st = Statement::split(1, "drinfeld E eT=z + t2 r=2");
        assert_eq!(st.words.len(), 2);
        assert_eq!(st.keys[0].1.text, "z + t2");
        assert_eq!(st.keys[1].1.text, "2");
        assert_eq!(column(st.line, st.keys[0].1.at), 15);
    }

    #[test]
    fn diagnostics_carry_locations() {
        let e = parse_session("ring p=3 d=1 m=1 k=2\nmstructure iota on G shape=1 points=0").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (Kind::UnknownName, Some(2), Some(20)));
        let e = parse_session("ring p=3 d=1 m=1 k=2\ndrinfeld eT=z + t1*z").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (Kind::Syntax, Some(2), Some(20)));
        let e = parse_session("drinfeld eT=t1").unwrap_err();
        assert_eq!(e.kind, Kind::Syntax);
        let e = parse_session("ring p=3 d=1 m=1 k=2\ndrinfeld r=3 eT=t2").unwrap_err();
        assert_eq!(e.kind, Kind::TypeMismatch);
        let e = parse_session("ring p=4 d=1 m=1 k=1").unwrap_err();
        assert_eq!(e.kind, Kind::TypeMismatch);
        assert_eq!(e.to_string(), "type mismatch at line 1, column 1: 4 is not prime");
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = parse_session("# header\n\nring p=2 d=1 m=1 k=1  # base\ndrinfeld C eT=x + t1\n").unwrap();
        assert_eq!(s.items().len(), 1);
    }
}
