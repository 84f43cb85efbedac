use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// `Σ cᵥ·v + constant` with integer coefficients; zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    pub coefs: BTreeMap<String, i64>,
    pub constant: i64,
}

impl LinExpr {
    pub fn constant(c: i64) -> Self {
        LinExpr {
            coefs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(name: &str) -> Self {
        let mut coefs = BTreeMap::new();
        coefs.insert(name.to_string(), 1);
        LinExpr { coefs, constant: 0 }
    }

    pub fn add(&self, other: &LinExpr, sign: i64) -> LinExpr {
        let mut out = self.clone();
        for (v, &c) in &other.coefs {
            let e = out.coefs.entry(v.clone()).or_insert(0);
            *e += sign * c;
            if *e == 0 {
                out.coefs.remove(v);
            }
        }
        out.constant += sign * other.constant;
        out
    }

    pub fn scale(&self, k: i64) -> LinExpr {
        if k == 0 {
            return LinExpr::default();
        }
        LinExpr {
            coefs: self.coefs.iter().map(|(v, &c)| (v.clone(), c * k)).collect(),
            constant: self.constant * k,
        }
    }

    /// `Some(v)` when the expression is exactly the variable `v`.
    pub fn as_var(&self) -> Option<&str> {
        match (self.constant, self.coefs.len()) {
            (0, 1) => self.coefs.iter().next().filter(|(_, &c)| c == 1).map(|(v, _)| v.as_str()),
            _ => None,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.coefs.keys().map(String::as_str)
    }

    /// Simultaneous substitution of variables by expressions.
    pub fn substitute(&self, map: &BTreeMap<String, LinExpr>) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, &c) in &self.coefs {
            match map.get(v) {
                Some(e) => out = out.add(&e.scale(c), 1),
                None => out = out.add(&LinExpr::var(v).scale(c), 1),
            }
        }
        out
    }

    pub fn rename(&self, f: &mut impl FnMut(&str) -> String) -> LinExpr {
        let mut out = LinExpr::constant(self.constant);
        for (v, &c) in &self.coefs {
            out = out.add(&LinExpr::var(&f(v)).scale(c), 1);
        }
        out
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in &self.coefs {
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, "{sign}")?;
            }
            if mag == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, "+{}", self.constant)
        } else if self.constant < 0 {
            write!(f, "-{}", -self.constant)
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

/// One side of a sequence atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeqTerm {
    Index(String, LinExpr),
    Symbol(u32),
}

impl fmt::Display for SeqTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqTerm::Index(s, e) => write!(f, "{s}[{e}]"),
            SeqTerm::Symbol(c) => write!(f, "@{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "=>",
            Connective::Iff => "<=>",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Cmp(LinExpr, Rel, LinExpr),
    /// `a = b` when `equal`, else `a != b`
    Seq(SeqTerm, bool, SeqTerm),
    Not(Box<Formula>),
    Bin(Connective, Box<Formula>, Box<Formula>),
    Quant(Quant, String, Box<Formula>),
    Call {
        name: String,
        args: Vec<LinExpr>,
        pos: usize,
    },
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn bin(op: Connective, a: Formula, b: Formula) -> Formula {
        Formula::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn quant(q: Quant, var: &str, body: Formula) -> Formula {
        Formula::Quant(q, var.to_string(), Box::new(body))
    }

    /// Variables occurring free.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |e: &LinExpr, bound: &Vec<String>| {
            for v in e.vars() {
                if !bound.iter().any(|b| b == v) {
                    out.insert(v.to_string());
                }
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Cmp(a, _, b) => {
                add(a, bound);
                add(b, bound);
            }
            Formula::Seq(a, _, b) => {
                for t in [a, b] {
                    if let SeqTerm::Index(_, e) = t {
                        add(e, bound);
                    }
                }
            }
            Formula::Call { args, .. } => {
                for a in args {
                    add(a, bound);
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Sequence symbols referenced by the formula.
    pub fn sequence_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Seq(a, _, b) = f {
                for t in [a, b] {
                    if let SeqTerm::Index(s, _) = t {
                        out.insert(s.clone());
                    }
                }
            }
        });
        out
    }

    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Quant(_, _, a) => a.visit(f),
            Formula::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Applies `sub` to every expression, with bound variables shadowing.
    pub fn map_exprs(&self, sub: &BTreeMap<String, LinExpr>) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Cmp(a, r, b) => Formula::Cmp(a.substitute(sub), *r, b.substitute(sub)),
            Formula::Seq(a, eq, b) => {
                let s = |t: &SeqTerm| match t {
                    SeqTerm::Index(n, e) => SeqTerm::Index(n.clone(), e.substitute(sub)),
                    SeqTerm::Symbol(c) => SeqTerm::Symbol(*c),
                };
                Formula::Seq(s(a), *eq, s(b))
            }
            Formula::Call { name, args, pos } => Formula::Call {
                name: name.clone(),
                args: args.iter().map(|a| a.substitute(sub)).collect(),
                pos: *pos,
            },
            Formula::Not(a) => Formula::not(a.map_exprs(sub)),
            Formula::Bin(op, a, b) => Formula::bin(*op, a.map_exprs(sub), b.map_exprs(sub)),
            Formula::Quant(q, v, body) => {
                if sub.contains_key(v) {
                    let mut inner = sub.clone();
                    inner.remove(v);
                    Formula::quant(*q, v, body.map_exprs(&inner))
                } else {
                    Formula::quant(*q, v, body.map_exprs(sub))
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => f.write_str("true"),
            Formula::Const(false) => f.write_str("false"),
            Formula::Cmp(a, r, b) => write!(f, "{a} {} {b}", r.symbol()),
            Formula::Seq(a, eq, b) => {
                let show = |t: &SeqTerm| match t {
                    SeqTerm::Index(..) => t.to_string(),
                    SeqTerm::Symbol(c) => c.to_string(),
                };
                write!(f, "{} {} {}", show(a), if *eq { "=" } else { "!=" }, show(b))
            }
            Formula::Not(a) => write!(f, "~({a})"),
            Formula::Bin(op, a, b) => write!(f, "({a}) {} ({b})", op.symbol()),
            Formula::Quant(q, v, body) => {
                let c = if *q == Quant::Exists { 'E' } else { 'A' };
                write!(f, "{c}{v} ({body})")
            }
            Formula::Call { name, args, .. } => {
                let a: Vec<String> = args.iter().map(|e| e.to_string()).collect();
                write!(f, "${name}({})", a.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_is_simultaneous() {
        // (i+m-j)[i:=j, j:=i, m:=m-1]
        let e = LinExpr::var("i").add(&LinExpr::var("m"), 1).add(&LinExpr::var("j"), -1);
        let mut map = BTreeMap::new();
        map.insert("i".to_string(), LinExpr::var("j"));
        map.insert("j".to_string(), LinExpr::var("i"));
        map.insert("m".to_string(), LinExpr::var("m").add(&LinExpr::constant(1), -1));
        let s = e.substitute(&map);
        assert_eq!(s.to_string(), "-i+j+m-1");
    }

    #[test]
    fn cancellation_drops_variables() {
        let e = LinExpr::var("j").add(&LinExpr::var("j"), -1);
        assert!(e.coefs.is_empty());
        assert_eq!(e.to_string(), "0");
    }

    #[test]
    fn free_variables_respect_binders() {
        let f = Formula::quant(
            Quant::Forall,
            "k",
            Formula::Cmp(LinExpr::var("k"), Rel::Lt, LinExpr::var("n")),
        );
        let fv: Vec<String> = f.free_vars().into_iter().collect();
        assert_eq!(fv, vec!["n".to_string()]);
    }
}
