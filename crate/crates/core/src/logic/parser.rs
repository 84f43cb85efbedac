//! Lexer and recursive-descent parser for predicate formulas and library
//! files.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula := imp ('<=>' imp)*
//! imp     := or ('=>' imp)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' unary | Q var (',' var)* formula | atom
//! atom    := 'true' | 'false' | '$'? Name '(' term, ... ')'
//!          | side rel side | '(' formula ')'
//! side    := Seq '[' term ']' | term
//! ```
//!
//! `Q` is `A`, `E`, `∀` or `∃`, and may be glued to the first variable as
//! in `Ak` or `Ei,j`. A quantifier body extends as far right as possible.

use super::ast::{Connective, Formula, LinExpr, Quant, Rel, SeqTerm};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(i64),
    Dollar,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Rel(Rel),
    Forall,
    Exists,
    Assign,
    Semi,
    Eof,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    let peek = |i: usize| chars.get(i).map(|&(_, c)| c);
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = match c {
            '$' => (Tok::Dollar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            ',' => (Tok::Comma, 1),
            '+' => (Tok::Plus, 1),
            '-' | '−' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            ';' => (Tok::Semi, 1),
            '~' | '¬' => (Tok::Not, 1),
            '&' | '∧' => (Tok::And, 1),
            '|' | '∨' => (Tok::Or, 1),
            '⇒' | '→' => (Tok::Imp, 1),
            '⇔' | '↔' => (Tok::Iff, 1),
            '∀' => (Tok::Forall, 1),
            '∃' => (Tok::Exists, 1),
            '≤' => (Tok::Rel(Rel::Le), 1),
            '≥' => (Tok::Rel(Rel::Ge), 1),
            '≠' => (Tok::Rel(Rel::Ne), 1),
            '!' if peek(i + 1) == Some('=') => (Tok::Rel(Rel::Ne), 2),
            '!' => (Tok::Not, 1),
            ':' if peek(i + 1) == Some('=') => (Tok::Assign, 2),
            '<' if peek(i + 1) == Some('=') && peek(i + 2) == Some('>') => (Tok::Iff, 3),
            '<' if peek(i + 1) == Some('=') => (Tok::Rel(Rel::Le), 2),
            '<' => (Tok::Rel(Rel::Lt), 1),
            '>' if peek(i + 1) == Some('=') => (Tok::Rel(Rel::Ge), 2),
            '>' => (Tok::Rel(Rel::Gt), 1),
            '=' if peek(i + 1) == Some('>') => (Tok::Imp, 2),
            '=' if peek(i + 1) == Some('=') => (Tok::Rel(Rel::Eq), 2),
            '=' => (Tok::Rel(Rel::Eq), 1),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                let n = text[pos..end].parse::<i64>().map_err(|_| Error::Syntax {
                    pos,
                    msg: "number too large".into(),
                })?;
                (Tok::Num(n), j - i)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j].1) {
                    j += 1;
                }
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                (Tok::Ident(text[pos..end].to_string()), j - i)
            }
            _ => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, pos));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

fn is_var_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_lowercase() || c == '_') && s != "true" && s != "false" && s != "def"
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut a = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let b = self.imp()?;
            a = Formula::bin(Connective::Iff, a, b);
        }
        Ok(a)
    }

    fn imp(&mut self) -> Result<Formula> {
        let a = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let b = self.imp()?;
            return Ok(Formula::bin(Connective::Implies, a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut a = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let b = self.and()?;
            a = Formula::bin(Connective::Or, a, b);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut a = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let b = self.unary()?;
            a = Formula::bin(Connective::And, a, b);
        }
        Ok(a)
    }

    /// Recognizes a quantifier prefix, returning it with the first variable.
    fn quantifier(&mut self) -> Option<(Quant, Option<String>)> {
        let q = match self.peek().clone() {
            Tok::Forall => Some((Quant::Forall, None)),
            Tok::Exists => Some((Quant::Exists, None)),
            Tok::Ident(s) => {
                let follows_name = matches!(self.peek_at(1), Tok::Ident(v) if is_var_name(v));
                let q = match s.chars().next() {
                    Some('A') => Quant::Forall,
                    Some('E') => Quant::Exists,
                    _ => return None,
                };
                let rest = &s[1..];
                if rest.is_empty() && follows_name {
                    Some((q, None))
                } else if is_var_name(rest) && *self.peek_at(1) != Tok::LBrack {
                    Some((q, Some(rest.to_string())))
                } else {
                    None
                }
            }
            _ => None,
        };
        if q.is_some() {
            self.bump();
        }
        q
    }

    fn var_name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(v) if is_var_name(&v) => {
                self.bump();
                Ok(v)
            }
            _ => self.err("expected a variable name"),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if let Some((q, first)) = self.quantifier() {
            let mut vars = vec![match first {
                Some(v) => v,
                None => self.var_name()?,
            }];
            while *self.peek() == Tok::Comma {
                self.bump();
                vars.push(self.var_name()?);
            }
            let mut body = self.formula()?;
            for v in vars.iter().rev() {
                body = Formula::quant(q, v, body);
            }
            return Ok(body);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Formula::Const(s == "true"))
            }
            Tok::Dollar => {
                self.bump();
                self.call()
            }
            Tok::Ident(s) if !is_var_name(&s) && *self.peek_at(1) == Tok::LParen => self.call(),
            Tok::LParen => {
                let save = self.at;
                match self.comparison() {
                    Ok(f) => Ok(f),
                    Err(e1) => {
                        self.at = save;
                        self.bump();
                        let inner = self.formula().and_then(|f| {
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(f)
                        });
                        match inner {
                            Ok(f) => Ok(f),
                            Err(e2) => Err(furthest(e1, e2)),
                        }
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn call(&mut self) -> Result<Formula> {
        let pos = self.pos();
        let name = match self.bump() {
            Tok::Ident(n) => n,
            _ => return Err(Error::Syntax { pos, msg: "expected a predicate name".into() }),
        };
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(Formula::Call { name, args, pos })
    }

    fn side(&mut self) -> Result<Side> {
        if let (Tok::Ident(s), Tok::LBrack) = (self.peek().clone(), self.peek_at(1).clone()) {
            self.bump();
            self.bump();
            let e = self.term()?;
            self.expect(Tok::RBrack, "`]`")?;
            return Ok(Side::Seq(s, e));
        }
        Ok(Side::Term(self.term()?))
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.side()?;
        let rel = match self.peek() {
            Tok::Rel(r) => *r,
            _ => return self.err("expected a comparison"),
        };
        let rel_pos = self.pos();
        self.bump();
        let rhs = self.side()?;
        match (lhs, rhs) {
            (Side::Term(a), Side::Term(b)) => Ok(Formula::Cmp(a, rel, b)),
            (a, b) => {
                let eq = match rel {
                    Rel::Eq => true,
                    Rel::Ne => false,
                    _ => {
                        return Err(Error::Syntax {
                            pos: rel_pos,
                            msg: "sequence values can only be compared with = or !=".into(),
                        })
                    }
                };
                Ok(Formula::Seq(a.into_seq(rel_pos)?, eq, b.into_seq(rel_pos)?))
            }
        }
    }

    fn term(&mut self) -> Result<LinExpr> {
        let mut e = if *self.peek() == Tok::Minus {
            self.bump();
            self.product()?.scale(-1)
        } else {
            self.product()?
        };
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.bump();
            let p = self.product()?;
            e = e.add(&p, sign);
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<LinExpr> {
        let start = self.pos();
        let mut e = self.primary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let f = self.primary()?;
            e = if e.coefs.is_empty() {
                f.scale(e.constant)
            } else if f.coefs.is_empty() {
                e.scale(f.constant)
            } else {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "product of two variables is not linear".into(),
                });
            };
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<LinExpr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                // `2n` is read as `2*n`
                if let Tok::Ident(v) = self.peek().clone() {
                    if is_var_name(&v) && !matches!(self.peek_at(1), Tok::LBrack | Tok::LParen) {
                        self.bump();
                        return Ok(LinExpr::var(&v).scale(n));
                    }
                }
                Ok(LinExpr::constant(n))
            }
            Tok::Ident(v) if is_var_name(&v) && !matches!(self.peek_at(1), Tok::LBrack | Tok::LParen) => {
                self.bump();
                Ok(LinExpr::var(&v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Minus => {
                self.bump();
                Ok(self.primary()?.scale(-1))
            }
            _ => self.err("expected a term"),
        }
    }
}

enum Side {
    Term(LinExpr),
    Seq(String, LinExpr),
}

impl Side {
    fn into_seq(self, pos: usize) -> Result<SeqTerm> {
        match self {
            Side::Seq(s, e) => Ok(SeqTerm::Index(s, e)),
            Side::Term(e) if e.coefs.is_empty() && e.constant >= 0 => Ok(SeqTerm::Symbol(e.constant as u32)),
            Side::Term(_) => Err(Error::Syntax {
                pos,
                msg: "a sequence value can only be compared with another sequence value or a symbol".into(),
            }),
        }
    }
}

fn furthest(a: Error, b: Error) -> Error {
    match (&a, &b) {
        (Error::Syntax { pos: p, .. }, Error::Syntax { pos: q, .. }) if p > q => a,
        _ => b,
    }
}

/// Parses a single formula.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// A `def` entry of a library file.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Formula,
}

/// Parses `def Name(p, ...) := formula;` entries.
pub fn parse_defs(text: &str) -> Result<Vec<MacroDef>> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        match p.bump() {
            Tok::Ident(d) if d == "def" => {}
            _ => {
                p.at -= 1;
                return p.err("expected `def`");
            }
        }
        let name = match p.bump() {
            Tok::Ident(n) => n,
            _ => {
                p.at -= 1;
                return p.err("expected a predicate name");
            }
        };
        p.expect(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if *p.peek() != Tok::RParen {
            loop {
                params.push(p.var_name()?);
                if *p.peek() == Tok::Comma {
                    p.bump();
                } else {
                    break;
                }
            }
        }
        p.expect(Tok::RParen, "`)`")?;
        p.expect(Tok::Assign, "`:=`")?;
        let body = p.formula()?;
        p.expect(Tok::Semi, "`;`")?;
        out.push(MacroDef { name, params, body });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(s: &str) -> Formula {
        let f = parse(s).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f, "{s} → {f}");
        f
    }

    #[test]
    fn factor_eq_body() {
        let f = round_trip("Ak (k<n) => (T[i+k]=T[j+k])");
        match f {
            Formula::Quant(Quant::Forall, v, body) => {
                assert_eq!(v, "k");
                assert!(matches!(*body, Formula::Bin(Connective::Implies, _, _)));
            }
            _ => panic!("{f:?}"),
        }
    }

    #[test]
    fn closed_sentence() {
        let f = round_trip("Ei i=i");
        assert!(f.free_vars().is_empty());
    }

    #[test]
    fn glued_and_spaced_quantifiers() {
        assert_eq!(parse("Ei,j i<j").unwrap(), parse("E i, j i < j").unwrap());
        assert_eq!(parse("∃i ∀j i<=j").unwrap(), parse("Ei Aj i<=j").unwrap());
    }

    #[test]
    fn precedence() {
        let f = parse("a=b | c=d & e=f => g=h").unwrap();
        match f {
            Formula::Bin(Connective::Implies, l, _) => {
                assert!(matches!(*l, Formula::Bin(Connective::Or, _, _)));
            }
            _ => panic!("{f:?}"),
        }
    }

    #[test]
    fn terms() {
        let f = parse("2*i + 3j - (k - 1) >= -n").unwrap();
        assert_eq!(f.to_string(), "2*i+3*j-k+1 >= -n");
        assert!(parse("i*j = 0").is_err());
    }

    #[test]
    fn sequence_atoms() {
        round_trip("T[i] = 1");
        round_trip("X[j-1] != X[j+n]");
        assert!(parse("T[i] < T[j]").is_err());
    }

    #[test]
    fn calls_with_and_without_dollar() {
        let a = parse("$Priv'(i, n+1)").unwrap();
        let b = parse("Priv'(i,n+1)").unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn syntax_error_positions() {
        match parse("i < ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse("(i < j") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn library_file() {
        let defs = parse_defs("# comment\ndef In(i,r,s) := i >= r & i <= s;\ndef Z(n) := $In(n,0,0);").unwrap();
        assert_eq!(defs.len(), 2);
        assert_eq!(defs[0].params, vec!["i", "r", "s"]);
    }
}
