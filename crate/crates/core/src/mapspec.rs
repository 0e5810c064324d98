//! Text format for polynomial maps.
//!
//! ```text
//! map{n=2,m=1}
//! f1 = x1*x2
//! at (1/2, 0)
//! ```
//!
//! Components `f1..fm` appear exactly once each, in any order. Expressions use
//! `+`, `-`, `*`, parentheses, rational constants `p/q` and powers `xi^k`.
//! A leading minus on an expression or a point coordinate is accepted, so
//! that every printed map parses back.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::poly::{PolyError, PolyMap, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapSpecError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unknown variable `{name}` (expected x1..x{n})")]
    UnknownVariable {
        line: usize,
        col: usize,
        name: String,
        n: usize,
    },
    #[error("{line}:{col}: negative exponent")]
    NegativeExponent { line: usize, col: usize },
    #[error("component f{0} is missing")]
    MissingComponent(usize),
    #[error("point has {got} coordinates, map has {expected} variables")]
    PointDimension { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, MapSpecError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l,
                col: k,
            });
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars
                .peek()
                .filter(|d| d.is_ascii_alphanumeric() || **d == '_')
            {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push(Token {
                tok: Tok::Word(s),
                line: l,
                col: k,
            });
        } else if "{}=,()+-*/^".contains(c) {
            chars.next();
            col += 1;
            if c == '^' {
                let offset = chars
                    .clone()
                    .take_while(|d| *d == ' ' || *d == '\t')
                    .count();
                if chars.clone().nth(offset) == Some('-') {
                    return Err(MapSpecError::NegativeExponent {
                        line,
                        col: col + offset,
                    });
                }
            }
            out.push(Token {
                tok: Tok::Sym(c),
                line: l,
                col: k,
            });
        } else {
            return Err(MapSpecError::Syntax {
                line: l,
                col: k,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, MapSpecError> {
        let (line, col) = self.here();
        Err(MapSpecError::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Word(w)) => format!("`{w}`"),
            Some(Tok::Int(i)) => format!("`{i}`"),
            Some(Tok::Sym(c)) => format!("`{c}`"),
        }
    }

    fn sym(&mut self, c: char) -> Result<(), MapSpecError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{c}`, found {}", self.describe()))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        let hit = self.peek() == Some(&Tok::Sym(c));
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn word(&mut self, w: &str) -> Result<(), MapSpecError> {
        if matches!(self.peek(), Some(Tok::Word(x)) if x == w) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{w}`, found {}", self.describe()))
        }
    }

    fn int(&mut self) -> Result<BigInt, MapSpecError> {
        match self.peek() {
            Some(Tok::Int(i)) => {
                let i = i.clone();
                self.pos += 1;
                Ok(i)
            }
            _ => self.error(format!("expected an integer, found {}", self.describe())),
        }
    }

    fn small(&mut self) -> Result<usize, MapSpecError> {
        let at = self.here();
        let v = self.int()?;
        usize::try_from(v).map_err(|_| MapSpecError::Syntax {
            line: at.0,
            col: at.1,
            message: "integer too large".into(),
        })
    }

    fn rational(&mut self) -> Result<Rational, MapSpecError> {
        let num = self.int()?;
        if !self.eat('/') {
            return Ok(Rational::from_integer(num));
        }
        let at = self.here();
        let den = self.int()?;
        if den.is_zero() {
            return Err(MapSpecError::Syntax {
                line: at.0,
                col: at.1,
                message: "zero denominator".into(),
            });
        }
        Ok(Rational::new(num, den))
    }

    fn signed_rational(&mut self) -> Result<Rational, MapSpecError> {
        let neg = self.eat('-');
        let r = self.rational()?;
        Ok(if neg { -r } else { r })
    }

    fn expr(&mut self) -> Result<Polynomial, MapSpecError> {
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, MapSpecError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, MapSpecError> {
        let (line, col) = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(_)) => Ok(Polynomial::constant(self.n, self.rational()?)),
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            Some(Tok::Word(w)) => {
                let axis = w
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| i >= 1 && i <= self.n && !w[1..].starts_with('0'))
                    .ok_or(MapSpecError::UnknownVariable {
                        line,
                        col,
                        name: w.clone(),
                        n: self.n,
                    })?;
                self.pos += 1;
                let v = Polynomial::variable(self.n, axis - 1)?;
                if !self.eat('^') {
                    return Ok(v);
                }
                let k = u32::try_from(self.int()?).map_err(|_| PolyError::ExponentOverflow)?;
                Ok(v.pow(k)?)
            }
            _ => self.error(format!(
                "expected a number, variable or `(`, found {}",
                self.describe()
            )),
        }
    }
}

/// A parsed map together with its optional base point.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub n: usize,
    pub m: usize,
    /// Component sources as written, indexed by component.
    pub component_sources: Vec<String>,
    pub point: Option<Vec<Rational>>,
    map: PolyMap,
}

impl MapSpec {
    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    /// The map recentred so that the base point (default: the origin) and its image are the origin.
    pub fn localized(&self) -> Result<PolyMap, MapSpecError> {
        let origin;
        let x0 = match &self.point {
            Some(x0) => x0,
            None => {
                origin = vec![Rational::from_integer(0.into()); self.n];
                &origin
            }
        };
        Ok(self.map.shift_to_origin(x0)?)
    }

    pub fn from_map(map: PolyMap, point: Option<Vec<Rational>>) -> Result<Self, MapSpecError> {
        if let Some(p) = &point {
            if p.len() != map.source_dim() {
                return Err(MapSpecError::PointDimension {
                    expected: map.source_dim(),
                    got: p.len(),
                });
            }
        }
        Ok(MapSpec {
            n: map.source_dim(),
            m: map.target_dim(),
            component_sources: map.components().iter().map(|c| c.to_string()).collect(),
            point,
            map,
        })
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for MapSpec {
    /// Canonical form: one component per line, terms in graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map{{n={},m={}}}", self.n, self.m)?;
        for (i, c) in self.map.components().iter().enumerate() {
            writeln!(f, "f{} = {c}", i + 1)?;
        }
        if let Some(p) = &self.point {
            write!(f, "at (")?;
            for (i, r) in p.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_rational(f, r)?;
            }
            writeln!(f, ")")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for MapSpec {
    type Err = MapSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_map_spec(s)
    }
}

pub fn parse_map_spec(text: &str) -> Result<MapSpec, MapSpecError> {
    let toks = lex(text)?;
    let end = text
        .lines()
        .enumerate()
        .last()
        .map_or((1, 1), |(i, l)| (i + 1, l.chars().count() + 1));
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        n: 0,
    };

    p.word("map")?;
    p.sym('{')?;
    p.word("n")?;
    p.sym('=')?;
    let n = p.small()?;
    p.sym(',')?;
    p.word("m")?;
    p.sym('=')?;
    let m = p.small()?;
    p.sym('}')?;
    if n == 0 || m == 0 {
        return Err(MapSpecError::Poly(PolyError::EmptyMap));
    }
    if m > n {
        return Err(MapSpecError::Poly(PolyError::TargetExceedsSource { n, m }));
    }
    p.n = n;

    let mut comps: Vec<Option<(Polynomial, String)>> = vec![None; m];
    while let Some(Tok::Word(w)) = p.peek().cloned() {
        if w == "at" {
            break;
        }
        let (line, col) = p.here();
        let idx = w
            .strip_prefix('f')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i >= 1 && i <= m && !w[1..].starts_with('0'))
            .ok_or_else(|| MapSpecError::Syntax {
                line,
                col,
                message: format!("expected a component name f1..f{m}, found `{w}`"),
            })?;
        if comps[idx - 1].is_some() {
            return Err(MapSpecError::Syntax {
                line,
                col,
                message: format!("component `{w}` defined twice"),
            });
        }
        p.pos += 1;
        p.sym('=')?;
        let start = p.pos;
        let poly = p.expr()?;
        let source = source_slice(text, &p.toks[start..p.pos]);
        comps[idx - 1] = Some((poly, source));
    }
    let mut point = None;
    if p.peek() == Some(&Tok::Word("at".into())) {
        p.pos += 1;
        p.sym('(')?;
        let mut coords = vec![p.signed_rational()?];
        while p.eat(',') {
            coords.push(p.signed_rational()?);
        }
        p.sym(')')?;
        if coords.len() != n {
            return Err(MapSpecError::PointDimension {
                expected: n,
                got: coords.len(),
            });
        }
        point = Some(coords);
    }
    if p.peek().is_some() {
        return p.error(format!("unexpected {}", p.describe()));
    }

    let mut polys = Vec::with_capacity(m);
    let mut sources = Vec::with_capacity(m);
    for (i, c) in comps.into_iter().enumerate() {
        let (poly, src) = c.ok_or(MapSpecError::MissingComponent(i + 1))?;
        polys.push(poly);
        sources.push(src);
    }
    Ok(MapSpec {
        n,
        m,
        component_sources: sources,
        point,
        map: PolyMap::new(n, polys)?,
    })
}

fn source_slice(text: &str, toks: &[Token]) -> String {
    let (Some(first), Some(last)) = (toks.first(), toks.last()) else {
        return String::new();
    };
    let offset = |line: usize, col: usize| -> usize {
        let start: usize = text.split('\n').take(line - 1).map(|l| l.len() + 1).sum();
        start
            + text[start..]
                .chars()
                .take(col - 1)
                .map(char::len_utf8)
                .sum::<usize>()
    };
    let tail_len = match &last.tok {
        Tok::Word(w) => w.len(),
        Tok::Int(i) => i.to_string().len(),
        Tok::Sym(_) => 1,
    };
    text[offset(first.line, first.col)..offset(last.line, last.col) + tail_len].to_string()
}
