//! Parser for the variety description language.
//!
//! ```text
//! projective <n>; vars <idents>; eq <poly> [; eq <poly>]*
//! affine <n>; vars <idents>; eq <poly> [; eq <poly>]*
//! elliptic a=[a1,a2,a3,a4,a6]
//! zerodim <monic integer polynomial in x>
//! product { <spec> } { <spec> }
//! ```
//!
//! Newlines separate statements like `;`, and `#` starts a comment.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::mpoly::MPoly;
use super::{Ambient, Base, Kind, VarietySpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Sep,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        if c == '\n' || c == ';' {
            out.push(Token { tok: Tok::Sep, line: l0, col: c0 });
            i += 1;
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Int(s.parse().expect("digits")), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        if "+-*^()[]{},=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Parse { line: l0, col: c0, msg: format!("unexpected character '{c}'") });
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn skip_seps(&mut self) {
        while self.peek().tok == Tok::Sep {
            self.next();
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.err(&t, format!("expected '{c}'"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_seps();
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => self.err(&t, format!("expected '{kw}'")),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(n),
            Tok::Sym('-') => {
                let u = self.next();
                match u.tok {
                    Tok::Int(n) => Ok(-n),
                    _ => self.err(&u, "expected an integer"),
                }
            }
            _ => self.err(&t, "expected an integer"),
        }
    }

    fn small_int(&mut self) -> Result<usize> {
        let t = self.peek().clone();
        let n = self.int()?;
        match n.to_usize() {
            Some(v) => Ok(v),
            None => self.err(&t, "expected a small non-negative integer"),
        }
    }

    fn spec(&mut self) -> Result<VarietySpec> {
        self.skip_seps();
        let t = self.next();
        let kw = match &t.tok {
            Tok::Ident(s) => s.clone(),
            _ => return self.err(&t, "expected projective, affine, elliptic, zerodim or product"),
        };
        let kind = match kw.as_str() {
            "projective" => self.system(true, &t)?,
            "affine" => self.system(false, &t)?,
            "elliptic" => self.elliptic()?,
            "zerodim" => self.zerodim()?,
            "product" => {
                self.skip_seps();
                self.expect_sym('{')?;
                let left = self.spec()?;
                self.skip_seps();
                self.expect_sym('}')?;
                self.skip_seps();
                self.expect_sym('{')?;
                let right = self.spec()?;
                self.skip_seps();
                self.expect_sym('}')?;
                Kind::Product { left: Box::new(left), right: Box::new(right) }
            }
            other => return self.err(&t, format!("unknown variety kind '{other}'")),
        };
        Ok(VarietySpec { kind, base: Base::Integral })
    }

    fn system(&mut self, projective: bool, head: &Token) -> Result<Kind> {
        let n = self.small_int()?;
        if projective && n == 0 {
            return self.err(head, "projective dimension must be positive");
        }
        self.expect_keyword("vars")?;
        let mut vars = Vec::new();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Ident(s) => {
                    if vars.contains(s) {
                        return self.err(&t, format!("duplicate variable '{s}'"));
                    }
                    vars.push(s.clone())
                }
                _ => return self.err(&t, "expected a variable name"),
            }
            if self.peek().tok == Tok::Sym(',') {
                self.next();
            } else {
                break;
            }
        }
        let want = if projective { n + 1 } else { n };
        if vars.len() != want {
            return self.err(head, format!("ambient needs {want} variables, got {}", vars.len()));
        }
        let mut eqs = Vec::new();
        loop {
            let save = self.pos;
            self.skip_seps();
            match &self.peek().tok {
                Tok::Ident(s) if s == "eq" => {
                    self.next();
                    let start = self.peek().clone();
                    let p = self.poly(&vars)?;
                    if p.is_zero() {
                        return self.err(&start, "equation is identically zero");
                    }
                    if projective && p.homogeneous_degree().is_none() {
                        return self.err(&start, "non-homogeneous polynomial in a projective ambient");
                    }
                    eqs.push(p);
                }
                _ => {
                    self.pos = save;
                    break;
                }
            }
        }
        Ok(match (projective, eqs.len()) {
            (true, 0) => Kind::ProjectiveSpace { n },
            (true, 1) if n == 2 => Kind::PlaneProjectiveCurve { vars, poly: eqs.pop().unwrap() },
            (true, 1) => Kind::ProjectiveHypersurface { n, vars, poly: eqs.pop().unwrap() },
            (true, _) => Kind::RawSystem { ambient: Ambient::Projective(n), vars, polys: eqs },
            (false, _) => Kind::RawSystem { ambient: Ambient::Affine(n), vars, polys: eqs },
        })
    }

    fn elliptic(&mut self) -> Result<Kind> {
        let t = self.next();
        if t.tok != Tok::Ident("a".into()) {
            return self.err(&t, "expected a=[a1,a2,a3,a4,a6]");
        }
        self.expect_sym('=')?;
        self.expect_sym('[')?;
        let mut a = Vec::new();
        for i in 0..5 {
            if i > 0 {
                self.expect_sym(',')?;
            }
            let at = self.peek().clone();
            let v = self.int()?;
            match v.to_i64() {
                Some(x) => a.push(x),
                None => return self.err(&at, "a-invariant out of range"),
            }
        }
        self.expect_sym(']')?;
        Ok(Kind::EllipticCurve { a: [a[0], a[1], a[2], a[3], a[4]] })
    }

    fn zerodim(&mut self) -> Result<Kind> {
        let start = self.peek().clone();
        let vars = vec!["x".to_string()];
        let p = self.poly(&vars)?;
        let coeffs = p.univariate(0).expect("single variable");
        if coeffs.len() < 2 {
            return self.err(&start, "zerodim polynomial must have positive degree");
        }
        if !coeffs.last().unwrap().is_one() {
            return self.err(&start, "zerodim polynomial must be monic");
        }
        let mut c = Vec::with_capacity(coeffs.len());
        for x in coeffs {
            match x.to_i64() {
                Some(v) => c.push(v),
                None => return self.err(&start, "coefficient out of range"),
            }
        }
        Ok(Kind::ZeroDimensional { coeffs: c })
    }

    // poly := term (('+'|'-') term)*
    fn poly(&mut self, vars: &[String]) -> Result<MPoly> {
        let n = vars.len();
        let mut acc = if self.peek().tok == Tok::Sym('-') {
            self.next();
            self.term(vars)?.neg()
        } else {
            if self.peek().tok == Tok::Sym('+') {
                self.next();
            }
            self.term(vars)?
        };
        loop {
            match self.peek().tok {
                Tok::Sym('+') => {
                    self.next();
                    acc = acc.add(&self.term(vars)?);
                }
                Tok::Sym('-') => {
                    self.next();
                    acc = acc.sub(&self.term(vars)?);
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars(), n);
        Ok(acc)
    }

    // term := power ('*' power)*
    fn term(&mut self, vars: &[String]) -> Result<MPoly> {
        let mut acc = self.power(vars)?;
        loop {
            match &self.peek().tok {
                Tok::Sym('*') => {
                    self.next();
                    acc = acc.mul(&self.power(vars)?);
                }
                Tok::Ident(_) | Tok::Int(_) | Tok::Sym('(') => {
                    let t = self.peek().clone();
                    return self.err(&t, "implicit multiplication is not allowed; use '*'");
                }
                _ => return Ok(acc),
            }
        }
    }

    // power := atom ('^' int)?
    fn power(&mut self, vars: &[String]) -> Result<MPoly> {
        let base = self.atom(vars)?;
        if self.peek().tok == Tok::Sym('^') {
            self.next();
            let t = self.peek().clone();
            let e = self.small_int()?;
            if e > 64 {
                return self.err(&t, "exponent too large");
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self, vars: &[String]) -> Result<MPoly> {
        let t = self.next();
        match t.tok {
            Tok::Int(c) => Ok(MPoly::constant(vars.len(), c)),
            Tok::Ident(ref s) => match vars.iter().position(|v| v == s) {
                Some(i) => Ok(MPoly::var(vars.len(), i)),
                None => self.err(&t, format!("unknown variable '{s}'")),
            },
            Tok::Sym('(') => {
                let inner = self.poly(vars)?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            Tok::Sym('-') => Ok(self.atom(vars)?.neg()),
            _ => self.err(&t, "expected a number, variable or '('"),
        }
    }
}

pub fn parse_variety(text: &str) -> Result<VarietySpec> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let spec = p.spec()?;
    p.skip_seps();
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "trailing input after the variety description");
    }
    Ok(spec)
}
