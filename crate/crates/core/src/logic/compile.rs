use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::ast::{Connective, Formula, LinExpr, Quant, Rel, SeqTerm};
use super::library::Library;
use super::parser::parse;
use crate::automata::{BoolOp, Dfa};
use crate::error::{Error, Result};
use crate::numeration::{DigitOrder, LinearRel, NumerationKind, NumerationSystem};
use crate::sequences::{BuiltinSequence, Registry};

/// Automaton for a formula together with its free variables. Component `c`
/// of the automaton carries `vars[c]`; `vars` is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub vars: Vec<String>,
    pub dfa: Dfa,
    pub system: NumerationSystem,
}

impl Compiled {
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn accepts(&self, values: &[u64]) -> bool {
        self.system.accepts(&self.dfa, values)
    }

    /// Tuples accepted with every component `≤ bound`.
    pub fn enumerate(&self, bound: u64) -> Vec<Vec<u64>> {
        self.system.enumerate(&self.dfa, bound)
    }
}

/// Which built-in sequence each sequence symbol denotes.
#[derive(Clone, Debug, Default)]
pub struct Binding {
    default: Option<BuiltinSequence>,
    named: BTreeMap<String, BuiltinSequence>,
}

impl Binding {
    /// `X` (and any symbol that is not a built-in name) denotes `seq`.
    pub fn new(seq: BuiltinSequence) -> Self {
        Binding {
            default: Some(seq),
            named: BTreeMap::new(),
        }
    }

    /// Only built-in symbols such as `T` or `RS` resolve.
    pub fn builtin_only() -> Self {
        Binding::default()
    }

    pub fn with(mut self, symbol: &str, seq: BuiltinSequence) -> Self {
        self.named.insert(symbol.to_string(), seq);
        self
    }

    pub fn resolve(&self, symbol: &str) -> Result<BuiltinSequence> {
        if let Some(&s) = self.named.get(symbol) {
            return Ok(s);
        }
        if symbol == "X" || symbol == "x" {
            if let Some(s) = self.default {
                return Ok(s);
            }
        }
        if let Some(s) = crate::sequences::ALL.iter().find(|s| s.symbol() == symbol) {
            return Ok(*s);
        }
        self.default.ok_or_else(|| Error::UnboundSequence(symbol.to_string()))
    }
}

/// Result of deciding a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub truth: bool,
    /// Leading quantifier block the example refers to.
    pub quantifier: Option<Quant>,
    pub vars: Vec<String>,
    /// Witness of an `∃` block, or counterexample to an `∀` block.
    pub example: Option<Vec<u64>>,
    pub states: usize,
}

/// Compiles formulas to automata, caching subformulas up to renaming.
pub struct Compiler {
    lib: Library,
    order: DigitOrder,
    registry: Registry,
    cache: FxHashMap<(NumerationSystem, String), Dfa>,
    validity: FxHashMap<(NumerationSystem, usize), Dfa>,
    fresh: usize,
}

impl Compiler {
    pub fn new(lib: Library) -> Self {
        Compiler {
            lib,
            order: DigitOrder::Msd,
            registry: Registry::new(),
            cache: FxHashMap::default(),
            validity: FxHashMap::default(),
            fresh: 0,
        }
    }

    pub fn with_order(mut self, order: DigitOrder) -> Self {
        self.order = order;
        self
    }

    pub fn library(&self) -> &Library {
        &self.lib
    }

    pub fn library_mut(&mut self) -> &mut Library {
        &mut self.lib
    }

    pub fn order(&self) -> DigitOrder {
        self.order
    }

    pub fn compile_str(&mut self, text: &str, binding: &Binding) -> Result<Compiled> {
        let f = parse(text)?;
        self.compile(&f, binding)
    }

    /// Expands macros, resolves sequence symbols and picks the numeration
    /// system shared by every referenced sequence.
    fn prepare(&self, f: &Formula, binding: &Binding) -> Result<(Formula, NumerationSystem)> {
        let expanded = self.lib.expand(f)?;
        let mut system: Option<(NumerationSystem, BuiltinSequence)> = None;
        for sym in expanded.sequence_symbols() {
            let seq = binding.resolve(&sym)?;
            let sys = seq.system().with_order(self.order);
            match system {
                Some((s, other)) if s != sys => return Err(Error::MixedSystems(other.to_string(), seq.to_string())),
                _ => system = Some((sys, seq)),
            }
        }
        let system = system
            .map(|(s, _)| s)
            .or_else(|| binding.default.map(|s| s.system().with_order(self.order)))
            .unwrap_or(NumerationSystem::base(2).with_order(self.order));
        let resolved = resolve_symbols(&expanded, binding)?;
        Ok((resolved, system))
    }

    pub fn compile(&mut self, f: &Formula, binding: &Binding) -> Result<Compiled> {
        let (f, system) = self.prepare(f, binding)?;
        self.comp(&f, system)
    }

    /// Decides a sentence; a leading block of like quantifiers is peeled off
    /// so a witness or counterexample can be reported.
    pub fn decide(&mut self, f: &Formula, binding: &Binding) -> Result<Decision> {
        let (f, system) = self.prepare(f, binding)?;
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(Error::UnboundVariable {
                var: v,
                context: "sentence".into(),
            });
        }
        let (quant, block, body) = peel(&f);
        let Some(q) = quant else {
            let c = self.comp(&f, system)?;
            return Ok(Decision {
                truth: c.dfa.is_accepting(c.dfa.initial()),
                quantifier: None,
                vars: Vec::new(),
                example: None,
                states: c.dfa.num_states(),
            });
        };
        let c = self.comp(body, system)?;
        let target = match q {
            Quant::Exists => c.clone(),
            Quant::Forall => self.not(&c),
        };
        let example = target.dfa.shortest_accepted().map(|w| {
            let vals = system.decode_letters(target.arity(), &w).expect("accepted words are valid");
            block
                .iter()
                .map(|v| target.vars.iter().position(|x| x == v).map_or(0, |i| vals[i]))
                .collect::<Vec<u64>>()
        });
        let truth = match q {
            Quant::Exists => example.is_some(),
            Quant::Forall => example.is_none(),
        };
        Ok(Decision {
            truth,
            quantifier: Some(q),
            vars: block,
            example,
            states: c.dfa.num_states(),
        })
    }

    pub fn decide_str(&mut self, text: &str, binding: &Binding) -> Result<Decision> {
        let f = parse(text)?;
        self.decide(&f, binding)
    }

    fn validity(&mut self, system: NumerationSystem, arity: usize) -> Dfa {
        self.validity
            .entry((system, arity))
            .or_insert_with(|| system.validity_automaton(arity))
            .clone()
    }

    fn needs_validity(system: NumerationSystem) -> bool {
        matches!(system.kind, NumerationKind::Zeckendorf)
    }

    fn restrict(&mut self, system: NumerationSystem, dfa: Dfa) -> Dfa {
        if Self::needs_validity(system) {
            let v = self.validity(system, dfa.arity());
            dfa.product(&v, BoolOp::And).expect("same alphabet").minimize()
        } else {
            dfa
        }
    }

    fn not(&mut self, c: &Compiled) -> Compiled {
        let dfa = self.restrict(c.system, c.dfa.complement());
        Compiled {
            vars: c.vars.clone(),
            dfa: dfa.minimize(),
            system: c.system,
        }
    }

    fn constant(system: NumerationSystem, value: bool) -> Compiled {
        Compiled {
            vars: Vec::new(),
            dfa: Dfa::constant(system.alphabet(0), value),
            system,
        }
    }

    fn linear(&mut self, system: NumerationSystem, e: &LinExpr, rel: LinearRel) -> Compiled {
        if e.coefs.is_empty() {
            let v = match rel {
                LinearRel::Eq => e.constant == 0,
                LinearRel::Le => e.constant <= 0,
            };
            return Self::constant(system, v);
        }
        let vars: Vec<String> = e.coefs.keys().cloned().collect();
        let coefs: Vec<i64> = e.coefs.values().copied().collect();
        Compiled {
            vars,
            dfa: system.linear_automaton(&coefs, e.constant, rel),
            system,
        }
    }

    /// Re-expresses `c` over the sorted variable list `target`.
    fn align(c: &Compiled, target: &[String]) -> Dfa {
        if c.vars == target {
            return c.dfa.clone();
        }
        let positions: Vec<usize> = c
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v).expect("target covers vars"))
            .collect();
        c.dfa.remap(target.len(), &positions)
    }

    fn combine(&mut self, op: BoolOp, a: &Compiled, b: &Compiled) -> Compiled {
        let mut vars: Vec<String> = a.vars.iter().chain(&b.vars).cloned().collect();
        vars.sort();
        vars.dedup();
        let da = Self::align(a, &vars);
        let db = Self::align(b, &vars);
        let mut dfa = da.product(&db, op).expect("same alphabet");
        let widened = vars.len() > a.vars.len().min(b.vars.len());
        if op != BoolOp::And && widened {
            dfa = self.restrict(a.system, dfa);
        }
        Compiled {
            vars,
            dfa: dfa.minimize(),
            system: a.system,
        }
    }

    fn exists(&mut self, v: &str, c: Compiled) -> Compiled {
        match c.vars.iter().position(|x| x == v) {
            None => c,
            Some(i) => {
                let mut vars = c.vars.clone();
                vars.remove(i);
                Compiled {
                    vars,
                    dfa: c.dfa.project(i, c.system.order),
                    system: c.system,
                }
            }
        }
    }

    fn fresh_var(&mut self) -> String {
        self.fresh += 1;
        format!("@{}", self.fresh)
    }

    fn seq_atom(&mut self, system: NumerationSystem, a: &SeqTerm, eq: bool, b: &SeqTerm) -> Result<Compiled> {
        // each non-variable index becomes a fresh variable pinned by an equation
        let mut defs: Vec<(String, Compiled)> = Vec::new();
        let mut index = |this: &mut Self, seq: &str, e: &LinExpr| -> Result<(BuiltinSequence, String)> {
            let s: BuiltinSequence = seq.parse()?;
            if let Some(v) = e.as_var() {
                return Ok((s, v.to_string()));
            }
            let z = this.fresh_var();
            let def = this.linear(system, &LinExpr::var(&z).add(e, -1), LinearRel::Eq);
            defs.push((z.clone(), def));
            Ok((s, z))
        };
        let core = match (a, b) {
            (SeqTerm::Symbol(x), SeqTerm::Symbol(y)) => Self::constant(system, (x == y) == eq),
            (SeqTerm::Index(s, e), SeqTerm::Symbol(c)) | (SeqTerm::Symbol(c), SeqTerm::Index(s, e)) => {
                let (seq, v) = index(self, s, e)?;
                let dfao = self.registry.dfao(seq, system.order).clone();
                let mut dfa = dfao.value_automaton(*c);
                if !eq {
                    dfa = dfa.complement();
                }
                Compiled {
                    vars: vec![v],
                    dfa: self.restrict(system, dfa).minimize(),
                    system,
                }
            }
            (SeqTerm::Index(s1, e1), SeqTerm::Index(s2, e2)) => {
                let (q1, v1) = index(self, s1, e1)?;
                let (q2, v2) = index(self, s2, e2)?;
                if v1 == v2 && q1 == q2 {
                    Self::constant(system, eq)
                } else {
                    let d1 = self.registry.dfao(q1, system.order).clone();
                    let d2 = self.registry.dfao(q2, system.order).clone();
                    let pair = d1.pair_automaton(&d2, eq)?;
                    let (vars, dfa) = if v1 == v2 {
                        (vec![v1], pair.remap(1, &[0, 0]))
                    } else if v1 < v2 {
                        (vec![v1, v2], pair)
                    } else {
                        (vec![v2, v1], pair.remap(2, &[1, 0]))
                    };
                    Compiled {
                        vars,
                        dfa: self.restrict(system, dfa).minimize(),
                        system,
                    }
                }
            }
        };
        let mut out = core;
        for (z, def) in defs {
            let joined = self.combine(BoolOp::And, &out, &def);
            out = self.exists(&z, joined);
        }
        Ok(out)
    }

    fn comp(&mut self, f: &Formula, system: NumerationSystem) -> Result<Compiled> {
        let cacheable = matches!(f, Formula::Bin(..) | Formula::Quant(..) | Formula::Not(..));
        let key = if cacheable {
            let (text, free) = canonical(f);
            if let Some(dfa) = self.cache.get(&(system, text.clone())) {
                return Ok(from_canonical(dfa.clone(), &free, system));
            }
            Some((text, free))
        } else {
            None
        };
        let out = match f {
            Formula::Const(b) => Self::constant(system, *b),
            Formula::Cmp(a, rel, b) => {
                let e = a.add(b, -1);
                match rel {
                    Rel::Eq => self.linear(system, &e, LinearRel::Eq),
                    Rel::Ne => {
                        let c = self.linear(system, &e, LinearRel::Eq);
                        self.not(&c)
                    }
                    Rel::Le => self.linear(system, &e, LinearRel::Le),
                    Rel::Lt => self.linear(system, &e.add(&LinExpr::constant(1), 1), LinearRel::Le),
                    Rel::Ge => self.linear(system, &e.scale(-1), LinearRel::Le),
                    Rel::Gt => self.linear(system, &e.scale(-1).add(&LinExpr::constant(1), 1), LinearRel::Le),
                }
            }
            Formula::Seq(a, eq, b) => self.seq_atom(system, a, *eq, b)?,
            Formula::Not(a) => {
                let c = self.comp(a, system)?;
                self.not(&c)
            }
            Formula::Bin(op, a, b) => {
                let ca = self.comp(a, system)?;
                let cb = self.comp(b, system)?;
                let op = match op {
                    Connective::And => BoolOp::And,
                    Connective::Or => BoolOp::Or,
                    Connective::Implies => BoolOp::Implies,
                    Connective::Iff => BoolOp::Iff,
                };
                self.combine(op, &ca, &cb)
            }
            Formula::Quant(Quant::Exists, v, body) => {
                let c = self.comp(body, system)?;
                self.exists(v, c)
            }
            Formula::Quant(Quant::Forall, v, body) => {
                let c = self.comp(body, system)?;
                let n = self.not(&c);
                let e = self.exists(v, n);
                self.not(&e)
            }
            Formula::Call { name, .. } => return Err(Error::UnknownMacro(name.clone())),
        };
        if let Some((text, free)) = key {
            self.cache.insert((system, text), to_canonical(&out, &free));
        }
        Ok(out)
    }
}

/// Replaces sequence symbols by the names of the sequences they denote.
fn resolve_symbols(f: &Formula, binding: &Binding) -> Result<Formula> {
    let term = |t: &SeqTerm| -> Result<SeqTerm> {
        Ok(match t {
            SeqTerm::Index(s, e) => SeqTerm::Index(binding.resolve(s)?.name().to_string(), e.clone()),
            SeqTerm::Symbol(c) => SeqTerm::Symbol(*c),
        })
    };
    Ok(match f {
        Formula::Seq(a, eq, b) => Formula::Seq(term(a)?, *eq, term(b)?),
        Formula::Not(a) => Formula::not(resolve_symbols(a, binding)?),
        Formula::Bin(op, a, b) => Formula::bin(*op, resolve_symbols(a, binding)?, resolve_symbols(b, binding)?),
        Formula::Quant(q, v, body) => Formula::quant(*q, v, resolve_symbols(body, binding)?),
        other => other.clone(),
    })
}

/// Splits `Q v₁ Q v₂ … body` with one quantifier kind.
fn peel(f: &Formula) -> (Option<Quant>, Vec<String>, &Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    let mut kind = None;
    while let Formula::Quant(q, v, body) = cur {
        if kind.is_some_and(|k| k != *q) {
            break;
        }
        kind = Some(*q);
        vars.push(v.clone());
        cur = body;
    }
    (kind, vars, cur)
}

/// Text of `f` with variables renamed by order of first appearance, and the
/// free variables in that order.
fn canonical(f: &Formula) -> (String, Vec<String>) {
    struct Namer {
        free: Vec<String>,
        bound: usize,
    }
    fn go(f: &Formula, env: &mut Vec<(String, String)>, n: &mut Namer) -> Formula {
        let rename = |v: &str, env: &Vec<(String, String)>, n: &mut Namer| -> String {
            if let Some((_, b)) = env.iter().rev().find(|(x, _)| x == v) {
                return b.clone();
            }
            let i = n.free.iter().position(|x| x == v).unwrap_or_else(|| {
                n.free.push(v.to_string());
                n.free.len() - 1
            });
            format!("f{i}")
        };
        let expr = |e: &LinExpr, env: &Vec<(String, String)>, n: &mut Namer| {
            let mut out = LinExpr::constant(e.constant);
            for (v, &c) in &e.coefs {
                out = out.add(&LinExpr::var(&rename(v, env, n)).scale(c), 1);
            }
            out
        };
        match f {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Cmp(a, r, b) => {
                let a = expr(a, env, n);
                Formula::Cmp(a, *r, expr(b, env, n))
            }
            Formula::Seq(a, eq, b) => {
                let t = |t: &SeqTerm, n: &mut Namer| match t {
                    SeqTerm::Index(s, e) => SeqTerm::Index(s.clone(), expr(e, env, n)),
                    SeqTerm::Symbol(c) => SeqTerm::Symbol(*c),
                };
                let a = t(a, n);
                Formula::Seq(a, *eq, t(b, n))
            }
            Formula::Not(a) => Formula::not(go(a, env, n)),
            Formula::Bin(op, a, b) => {
                let a = go(a, env, n);
                Formula::bin(*op, a, go(b, env, n))
            }
            Formula::Quant(q, v, body) => {
                n.bound += 1;
                let name = format!("b{}", n.bound);
                env.push((v.clone(), name.clone()));
                let body = go(body, env, n);
                env.pop();
                Formula::quant(*q, &name, body)
            }
            Formula::Call { .. } => f.clone(),
        }
    }
    let mut n = Namer {
        free: Vec::new(),
        bound: 0,
    };
    let g = go(f, &mut Vec::new(), &mut n);
    (g.to_string(), n.free)
}

/// Cached automata put component `c` on the `c`-th free variable in order of
/// first appearance.
fn to_canonical(c: &Compiled, free: &[String]) -> Dfa {
    let positions: Vec<usize> = c
        .vars
        .iter()
        .map(|v| free.iter().position(|x| x == v).expect("free variable"))
        .collect();
    if positions.iter().enumerate().all(|(i, &p)| i == p) {
        c.dfa.clone()
    } else {
        c.dfa.remap(free.len(), &positions)
    }
}

fn from_canonical(dfa: Dfa, free: &[String], system: NumerationSystem) -> Compiled {
    let mut vars = free.to_vec();
    vars.sort();
    let positions: Vec<usize> = free
        .iter()
        .map(|v| vars.iter().position(|x| x == v).expect("same set"))
        .collect();
    let dfa = if positions.iter().enumerate().all(|(i, &p)| i == p) {
        dfa
    } else {
        dfa.remap(vars.len(), &positions)
    };
    Compiled { vars, dfa, system }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BuiltinSequence::*;

    fn compiler() -> Compiler {
        Compiler::new(Library::stdlib())
    }

    #[test]
    fn trivial_sentences() {
        let mut c = compiler();
        let b = Binding::new(ThueMorse);
        assert!(c.decide_str("Ei i=i", &b).unwrap().truth);
        assert!(!c.decide_str("En n<0", &b).unwrap().truth);
        let d = c.decide_str("An n < 5", &b).unwrap();
        assert!(!d.truth);
        assert_eq!(d.example, Some(vec![5]));
    }

    #[test]
    fn witness_for_exists_block() {
        let mut c = compiler();
        let d = c.decide_str("Ei,n n=3 & $Pal(i,n) & X[i]=1", &Binding::new(ThueMorse)).unwrap();
        assert!(d.truth);
        let ex = d.example.unwrap();
        let (i, n) = (ex[0] as usize, ex[1] as usize);
        let w = ThueMorse.prefix(i + n);
        assert_eq!(n, 3);
        assert_eq!(w[i], 1);
        assert_eq!(w[i], w[i + 2]);
    }

    #[test]
    fn factor_eq_matches_prefix() {
        let mut c = compiler();
        let comp = c.compile_str("$FactorEq(i,j,n)", &Binding::new(ThueMorse)).unwrap();
        assert_eq!(comp.vars, vec!["i", "j", "n"]);
        let w = ThueMorse.prefix(64);
        for i in 0..16 {
            for j in 0..16 {
                for n in 0..16 {
                    assert_eq!(comp.accepts(&[i, j, n]), w[i as usize..(i + n) as usize] == w[j as usize..(j + n) as usize]);
                }
            }
        }
    }

    #[test]
    fn pal_accepts_empty_factor() {
        let mut c = compiler();
        let comp = c.compile_str("$Pal(i,n)", &Binding::new(ThueMorse)).unwrap();
        assert!(comp.accepts(&[0, 0]));
        assert!(comp.accepts(&[7, 0]));
    }

    #[test]
    fn shifted_index_matches_addition_atom() {
        let mut c = compiler();
        let b = Binding::new(Paperfolding);
        let direct = c.compile_str("j >= 1 & X[j-1] != X[j+n]", &b).unwrap();
        let manual = c
            .compile_str("j >= 1 & (Eu Ev u+1 = j & v = j+n & X[u] != X[v])", &b)
            .unwrap();
        assert_eq!(direct.vars, manual.vars);
        assert!(direct.dfa.equivalent(&manual.dfa).unwrap());
    }

    #[test]
    fn double_negation_and_quantifier_order() {
        let mut c = compiler();
        let b = Binding::new(RudinShapiro);
        let f = c.compile_str("$Border(i,m,n)", &b).unwrap();
        let g = c.compile_str("~~$Border(i,m,n)", &b).unwrap();
        assert!(f.dfa.equivalent(&g.dfa).unwrap());
        let x = c.compile_str("Ei Em $Border(i,m,n)", &b).unwrap();
        let y = c.compile_str("Em Ei $Border(i,m,n)", &b).unwrap();
        assert!(x.dfa.equivalent(&y.dfa).unwrap());
    }

    #[test]
    fn fibonacci_system_and_mixed_systems() {
        let mut c = compiler();
        let d = c.decide_str("An,i F[i] = F[i+n] | n >= 0", &Binding::new(Fibonacci)).unwrap();
        assert!(d.truth);
        let mixed = c.compile_str("T[i] = F[i]", &Binding::builtin_only());
        assert!(matches!(mixed, Err(Error::MixedSystems(..))));
        assert!(matches!(
            c.compile_str("Q[i] = 1", &Binding::builtin_only()),
            Err(Error::UnboundSequence(_))
        ));
    }

    #[test]
    fn lsd_agrees_with_msd() {
        let b = Binding::new(ThueMorse);
        let mut m = compiler();
        let mut l = Compiler::new(Library::stdlib()).with_order(DigitOrder::Lsd);
        let cm = m.compile_str("$Pal(i,n)", &b).unwrap();
        let cl = l.compile_str("$Pal(i,n)", &b).unwrap();
        for i in 0..24 {
            for n in 0..24 {
                assert_eq!(cm.accepts(&[i, n]), cl.accepts(&[i, n]), "{i} {n}");
            }
        }
    }
}
