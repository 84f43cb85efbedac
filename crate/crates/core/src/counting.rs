//! Linear representations of counting sequences: `f(n) = v·μ(x)·w` where
//! `x` is the canonical representation of `n`. Built from automata whose
//! accepted pairs `(i, n)` are counted over `i`, then minimized, compared
//! and checked against recurrence systems. All arithmetic is exact.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::logic::Compiled;
use crate::numeration::{DigitOrder, NumerationKind, NumerationSystem};

pub type Q = BigRational;
type Mat = Vec<Vec<Q>>;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn vec_mat(x: &[Q], m: &Mat) -> Vec<Q> {
    let mut out = vec![Q::zero(); m.first().map_or(x.len(), Vec::len)];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o += xi * r;
            }
        }
    }
    out
}

fn dot(x: &[Q], y: &[Q]) -> Q {
    x.iter().zip(y).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum()
}

fn transpose(m: &Mat, dim: usize) -> Mat {
    (0..dim).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// A sequence `n ↦ v·μ(x₁)⋯μ(xₖ)·w` over the canonical digits of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRep {
    pub system: NumerationSystem,
    pub v: Vec<Q>,
    /// one `dim × dim` matrix per digit
    pub mu: Vec<Mat>,
    pub w: Vec<Q>,
}

impl LinearRep {
    pub fn new(system: NumerationSystem, v: Vec<Q>, mu: Vec<Mat>, w: Vec<Q>) -> Result<Self> {
        let d = v.len();
        if w.len() != d {
            return Err(Error::Format(format!("v has length {d} but w has length {}", w.len())));
        }
        if mu.len() != system.radix() as usize {
            return Err(Error::Format(format!(
                "{} matrices given for {} digits",
                mu.len(),
                system.radix()
            )));
        }
        if mu.iter().any(|m| m.len() != d || m.iter().any(|r| r.len() != d)) {
            return Err(Error::Format(format!("matrices must be {d}x{d}")));
        }
        Ok(LinearRep { system, v, mu, w })
    }

    /// The zero sequence, of dimension 0.
    pub fn zero(system: NumerationSystem) -> Self {
        LinearRep {
            system,
            v: Vec::new(),
            mu: vec![Vec::new(); system.radix() as usize],
            w: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Value on an arbitrary digit string in reading order.
    pub fn eval_word(&self, digits: &[u32]) -> Q {
        let mut x = self.v.clone();
        for &d in digits {
            x = vec_mat(&x, &self.mu[d as usize]);
        }
        dot(&x, &self.w)
    }

    pub fn eval(&self, n: u64) -> Q {
        self.eval_word(&self.system.to_canonical(n).component(0))
    }

    /// `eval(n)` for every `n ≤ bound`.
    pub fn table(&self, bound: u64) -> Vec<Q> {
        let k = match (self.system.kind, self.system.order) {
            (NumerationKind::Base(k), DigitOrder::Msd) => k as u64,
            _ => return (0..=bound).map(|n| self.eval(n)).collect(),
        };
        if let Some(int) = IntRep::from_rep(self) {
            return int.table(k, bound).into_iter().map(|x| Q::from_integer(x.into())).collect();
        }
        // depth-first over the tree of canonical representations
        let mut out = vec![Q::zero(); bound as usize + 1];
        let mut stack = vec![(0u64, self.v.clone())];
        while let Some((n, x)) = stack.pop() {
            out[n as usize] = dot(&x, &self.w);
            for d in (if n == 0 { 1 } else { 0 })..k {
                let m = n * k + d;
                if m <= bound {
                    stack.push((m, vec_mat(&x, &self.mu[d as usize])));
                }
            }
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        let all = self.v.iter().chain(&self.w).chain(self.mu.iter().flatten().flatten());
        all.into_iter().all(|x| x.is_integer())
    }

    fn transposed(&self) -> LinearRep {
        let d = self.dim();
        LinearRep {
            system: self.system,
            v: self.w.clone(),
            mu: self.mu.iter().map(|m| transpose(m, d)).collect(),
            w: self.v.clone(),
        }
    }

    /// Whether `v·μ(0) = v`, i.e. leading zeros do not change the value.
    pub fn is_zero_stable(&self) -> bool {
        match self.system.order {
            DigitOrder::Msd => vec_mat(&self.v, &self.mu[0]) == self.v,
            DigitOrder::Lsd => vec_mat(&self.w, &transpose(&self.mu[0], self.dim())) == self.w,
        }
    }

    /// Pointwise product with the indicator of a one-track automaton's
    /// language (digits in reading order).
    pub fn restrict(&self, dfa: &Dfa) -> LinearRep {
        let s = dfa.num_states();
        let d = self.dim();
        let idx = |i: usize, p: usize| i * s + p;
        let mut v = vec![Q::zero(); d * s];
        for i in 0..d {
            v[idx(i, dfa.initial() as usize)] = self.v[i].clone();
        }
        let mut w = vec![Q::zero(); d * s];
        for i in 0..d {
            for p in 0..s {
                if dfa.is_accepting(p as u32) {
                    w[idx(i, p)] = self.w[i].clone();
                }
            }
        }
        let mu = (0..self.mu.len())
            .map(|digit| {
                let mut m = vec![vec![Q::zero(); d * s]; d * s];
                for i in 0..d {
                    for j in 0..d {
                        let x = &self.mu[digit][i][j];
                        if x.is_zero() {
                            continue;
                        }
                        for p in 0..s {
                            let t = dfa.next(p as u32, digit) as usize;
                            m[idx(i, p)][idx(j, t)] = x.clone();
                        }
                    }
                }
                m
            })
            .collect();
        LinearRep {
            system: self.system,
            v,
            mu,
            w,
        }
    }

    /// `self - other`, dimension `dim(self) + dim(other)`.
    pub fn difference(&self, other: &LinearRep) -> LinearRep {
        let (a, b) = (self.dim(), other.dim());
        let mut v = self.v.clone();
        v.extend(other.v.iter().map(|x| -x));
        let mut w = self.w.clone();
        w.extend(other.w.iter().cloned());
        let mu = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(m1, m2)| {
                let mut m = vec![vec![Q::zero(); a + b]; a + b];
                for i in 0..a {
                    m[i][..a].clone_from_slice(&m1[i]);
                }
                for i in 0..b {
                    m[a + i][a..].clone_from_slice(&m2[i]);
                }
                m
            })
            .collect();
        LinearRep {
            system: self.system,
            v,
            mu,
            w,
        }
    }
}

/// Integer copy of an integral representation, for fast sweeps.
struct IntRep {
    v: Vec<i128>,
    mu: Vec<Vec<Vec<i128>>>,
    w: Vec<i128>,
}

impl IntRep {
    fn from_rep(rep: &LinearRep) -> Option<IntRep> {
        let conv = |x: &Q| -> Option<i128> {
            if x.is_integer() {
                x.to_integer().to_i128().filter(|v| v.abs() < 1 << 40)
            } else {
                None
            }
        };
        let row = |r: &[Q]| r.iter().map(conv).collect::<Option<Vec<_>>>();
        Some(IntRep {
            v: row(&rep.v)?,
            mu: rep
                .mu
                .iter()
                .map(|m| m.iter().map(|r| row(r)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?,
            w: row(&rep.w)?,
        })
    }

    fn table(&self, k: u64, bound: u64) -> Vec<i128> {
        let mut out = vec![0i128; bound as usize + 1];
        let mut stack = vec![(0u64, self.v.clone())];
        while let Some((n, x)) = stack.pop() {
            out[n as usize] = x.iter().zip(&self.w).map(|(a, b)| a * b).sum();
            for d in (if n == 0 { 1 } else { 0 })..k {
                let m = n * k + d;
                if m > bound {
                    continue;
                }
                let mat = &self.mu[d as usize];
                let mut y = vec![0i128; x.len()];
                for (xi, r) in x.iter().zip(mat) {
                    if *xi != 0 {
                        for (o, e) in y.iter_mut().zip(r) {
                            *o += xi * e;
                        }
                    }
                }
                stack.push((m, y));
            }
        }
        out
    }
}

/// Builds the representation of `n ↦ |{i : (i, n) accepted}|` for a
/// two-track automaton; `count` is the track of `i`.
pub fn rep_from_counting_dfa(dfa: &Dfa, system: NumerationSystem, count: usize) -> Result<LinearRep> {
    if dfa.arity() != 2 || count > 1 {
        return Err(Error::MalformedAutomaton(format!(
            "counting needs a two-track automaton, got arity {}",
            dfa.arity()
        )));
    }
    if system.order == DigitOrder::Lsd {
        let msd = rep_from_counting_dfa(&dfa.reverse().minimize(), system.with_order(DigitOrder::Msd), count)?;
        return Ok(LinearRep {
            system,
            ..msd.transposed()
        });
    }
    let value = 1 - count;
    let alpha = dfa.alphabet();
    let live = dfa.live_states();
    // reachable live states, numbered in discovery order
    let mut index = vec![usize::MAX; dfa.num_states()];
    let mut states = Vec::new();
    if live[dfa.initial() as usize] {
        index[dfa.initial() as usize] = 0;
        states.push(dfa.initial());
        let mut i = 0;
        while i < states.len() {
            let s = states[i];
            for l in 0..alpha.size() {
                let t = dfa.next(s, l);
                if live[t as usize] && index[t as usize] == usize::MAX {
                    index[t as usize] = states.len();
                    states.push(t);
                }
            }
            i += 1;
        }
    }
    let d = states.len();
    if d == 0 {
        return Ok(LinearRep::zero(system));
    }
    let radix = system.radix() as usize;
    let mut mu = vec![vec![vec![Q::zero(); d]; d]; radix];
    for (i, &s) in states.iter().enumerate() {
        for l in 0..alpha.size() {
            let t = dfa.next(s, l);
            if live[t as usize] {
                let digit = alpha.digit(l, value) as usize;
                mu[digit][i][index[t as usize]] += Q::one();
            }
        }
    }
    let w: Vec<Q> = states.iter().map(|&s| if dfa.is_accepting(s) { q(1) } else { q(0) }).collect();
    let mut v = vec![Q::zero(); d];
    v[0] = Q::one();
    let mut stable = false;
    for _ in 0..=d + 1 {
        let next = vec_mat(&v, &mu[0]);
        if next == v {
            stable = true;
            break;
        }
        v = next;
    }
    if !stable {
        return Err(Error::InfiniteCount {
            cycle: witness_cycle(dfa, &live, value),
        });
    }
    Ok(LinearRep { system, v, mu, w })
}

/// A cycle of letters with value digit 0, among live states, entered after
/// at least one nonzero letter: each turn around it yields a new witness.
fn witness_cycle(dfa: &Dfa, live: &[bool], value: usize) -> Vec<u32> {
    let alpha = dfa.alphabet();
    let zero = alpha.zero();
    let n = dfa.num_states();
    let node = |s: u32, flag: bool| s as usize * 2 + flag as usize;
    let succ = |s: u32, flag: bool| {
        (0..alpha.size())
            .filter(move |&l| alpha.digit(l, value) == 0)
            .map(move |l| (dfa.next(s, l), flag || l != zero))
            .filter(|&(t, _)| live[t as usize])
    };
    let mut colour = vec![0u8; 2 * n];
    let start = (dfa.initial(), false);
    let mut stack = vec![(start, succ(start.0, start.1).collect::<Vec<_>>())];
    colour[node(start.0, start.1)] = 1;
    while let Some((cur, todo)) = stack.last_mut() {
        let cur = *cur;
        match todo.pop() {
            None => {
                colour[node(cur.0, cur.1)] = 2;
                stack.pop();
            }
            Some(next) => match colour[node(next.0, next.1)] {
                0 => {
                    colour[node(next.0, next.1)] = 1;
                    stack.push((next, succ(next.0, next.1).collect()));
                }
                1 if next.1 => {
                    let at = stack.iter().position(|(c, _)| *c == next).unwrap_or(0);
                    return stack[at..].iter().map(|((s, _), _)| *s).collect();
                }
                _ => {}
            },
        }
    }
    Vec::new()
}

impl LinearRep {
    /// Counting representation for a compiled two-variable formula.
    pub fn from_compiled(c: &Compiled, count_var: &str) -> Result<LinearRep> {
        let pos = c.vars.iter().position(|v| v == count_var).ok_or_else(|| Error::UnboundVariable {
            var: count_var.to_string(),
            context: "counting formula".to_string(),
        })?;
        if c.arity() != 2 {
            return Err(Error::MalformedAutomaton(format!(
                "counting needs exactly two free variables, got {:?}",
                c.vars
            )));
        }
        rep_from_counting_dfa(&c.dfa, c.system, pos)
    }
}

/// Counting formulas over `(i, n)`: each factor is counted at its first
/// occurrence `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Counted {
    Closed,
    Privileged,
    PrivilegedPalindrome,
}

impl Counted {
    pub const ALL: [Counted; 3] = [Counted::Closed, Counted::Privileged, Counted::PrivilegedPalindrome];

    pub fn name(self) -> &'static str {
        match self {
            Counted::Closed => "closed",
            Counted::Privileged => "privileged",
            Counted::PrivilegedPalindrome => "privileged-palindrome",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Counted::Closed => "$UCF(i,n)",
            Counted::Privileged => "$Priv(i,n) & ~$Occurs(i,0,n,i+n-1)",
            Counted::PrivilegedPalindrome => "$Priv(i,n) & $Pal(i,n) & ~$Occurs(i,0,n,i+n-1)",
        }
    }
}

impl FromStr for Counted {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Counted::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown count `{s}`")))
    }
}

/// Row space in reduced echelon form.
#[derive(Default)]
struct Rref {
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Rref {
    fn reduce(&self, x: &mut [Q]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if x[p].is_zero() {
                continue;
            }
            let c = x[p].clone();
            for (a, b) in x.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &c * b;
                }
            }
        }
    }

    /// Adds `x` to the span; false when it was already there.
    fn insert(&mut self, mut x: Vec<Q>) -> bool {
        self.reduce(&mut x);
        let Some(p) = x.iter().position(|a| !a.is_zero()) else {
            return false;
        };
        let inv = x[p].recip();
        for a in x.iter_mut() {
            *a *= &inv;
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (a, b) in row.iter_mut().zip(&x) {
                if !b.is_zero() {
                    *a -= &c * b;
                }
            }
        }
        self.rows.push(x);
        self.pivots.push(p);
        true
    }

    /// Coordinates of a vector known to lie in the span.
    fn coords(&self, x: &[Q]) -> Vec<Q> {
        self.pivots.iter().map(|&p| x[p].clone()).collect()
    }
}

/// Basis of the span of all `v·μ(x)`.
fn reachable_space(rep: &LinearRep) -> Rref {
    let mut space = Rref::default();
    let mut queue = VecDeque::new();
    if space.insert(rep.v.clone()) {
        queue.push_back(rep.v.clone());
    }
    while let Some(x) = queue.pop_front() {
        for m in &rep.mu {
            let y = vec_mat(&x, m);
            if space.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    space
}

fn left_reduce(rep: &LinearRep) -> LinearRep {
    let space = reachable_space(rep);
    LinearRep {
        system: rep.system,
        v: space.coords(&rep.v),
        mu: rep
            .mu
            .iter()
            .map(|m| space.rows.iter().map(|r| space.coords(&vec_mat(r, m))).collect())
            .collect(),
        w: space.rows.iter().map(|r| dot(r, &rep.w)).collect(),
    }
}

/// Minimal-dimension representation of the same word function.
pub fn minimize_rep(rep: &LinearRep) -> LinearRep {
    let left = left_reduce(rep);
    left_reduce(&left.transposed()).transposed()
}

/// The canonical representations of the system, as a one-track automaton.
fn canonical_words(system: NumerationSystem) -> Dfa {
    let alpha = system.alphabet(1);
    // states: 0 empty, 1 last digit zero, 2 last digit nonzero, 3 dead
    let msd = Dfa::explore(
        alpha,
        0u8,
        move |&s, d| match (s, d, system.kind) {
            (3, _, _) | (0, 0, _) => 3,
            (2, 1, NumerationKind::Zeckendorf) => 3,
            (_, 0, _) => 1,
            _ => 2,
        },
        |&s| s != 3,
    );
    match system.order {
        DigitOrder::Msd => msd,
        DigitOrder::Lsd => msd.reverse().minimize(),
    }
}

/// Decides whether two representations define the same sequence, by
/// zero-testing their difference on canonical representations. The
/// second component is the dimension of the space that was searched.
pub fn reps_equal_certified(a: &LinearRep, b: &LinearRep) -> (bool, usize) {
    if a.system != b.system {
        return (false, 0);
    }
    let diff = a.difference(b).restrict(&canonical_words(a.system));
    let space = reachable_space(&diff);
    let zero = space.rows.iter().all(|r| dot(r, &diff.w).is_zero());
    (zero, space.rows.len())
}

pub fn reps_equal(a: &LinearRep, b: &LinearRep) -> bool {
    reps_equal_certified(a, b).0
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Format(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((p, d)) => {
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(p.parse().map_err(|_| bad())?, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for LinearRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[Q]| r.iter().map(fmt_q).collect::<Vec<_>>().join(" ");
        writeln!(f, "system {}", self.system)?;
        writeln!(f, "dim {}", self.dim())?;
        writeln!(f, "v {}", row(&self.v))?;
        for (d, m) in self.mu.iter().enumerate() {
            writeln!(f, "mu {d}")?;
            for r in m {
                writeln!(f, "{}", row(r))?;
            }
        }
        writeln!(f, "w {}", row(&self.w))
    }
}

impl FromStr for LinearRep {
    type Err = Error;

    /// Reads the text format: `system`, `dim`, `v`, one `mu d` block of
    /// `dim` rows per digit, and `w`. `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let row = |s: &str| s.split_whitespace().map(parse_q).collect::<Result<Vec<Q>>>();
        let mut system = NumerationSystem::base(2);
        let mut dim = None;
        let (mut v, mut w) = (None, None);
        let mut mu: Vec<Option<Mat>> = Vec::new();
        while let Some(line) = lines.next() {
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "system" => system = rest.parse()?,
                "dim" => dim = Some(rest.parse::<usize>().map_err(|_| Error::Format(format!("bad dim `{rest}`")))?),
                "v" => v = Some(row(rest)?),
                "w" => w = Some(row(rest)?),
                "mu" => {
                    let d: usize = rest.parse().map_err(|_| Error::Format(format!("bad digit `{rest}`")))?;
                    let n = dim.ok_or_else(|| Error::Format("`dim` must precede matrices".into()))?;
                    let m = (0..n)
                        .map(|_| row(lines.next().ok_or_else(|| Error::Format(format!("matrix {d} is short")))?))
                        .collect::<Result<Mat>>()?;
                    if mu.len() <= d {
                        mu.resize(d + 1, None);
                    }
                    mu[d] = Some(m);
                }
                _ => return Err(Error::Format(format!("unknown line `{line}`"))),
            }
        }
        let v = v.ok_or_else(|| Error::Format("missing v".into()))?;
        let w = w.ok_or_else(|| Error::Format("missing w".into()))?;
        if dim.is_some_and(|d| d != v.len()) {
            return Err(Error::Format(format!("dim does not match v of length {}", v.len())));
        }
        let mu = mu
            .into_iter()
            .enumerate()
            .map(|(d, m)| m.ok_or_else(|| Error::Format(format!("missing matrix {d}"))))
            .collect::<Result<Vec<_>>>()?;
        LinearRep::new(system, v, mu, w)
    }
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    system: String,
    dim: usize,
    v: Vec<String>,
    mu: Vec<Vec<Vec<String>>>,
    w: Vec<String>,
}

impl LinearRep {
    pub fn to_json(&self) -> String {
        let row = |r: &[Q]| r.iter().map(fmt_q).collect::<Vec<_>>();
        let j = RepJson {
            system: self.system.to_string(),
            dim: self.dim(),
            v: row(&self.v),
            mu: self.mu.iter().map(|m| m.iter().map(|r| row(r)).collect()).collect(),
            w: row(&self.w),
        };
        serde_json::to_string_pretty(&j).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: RepJson = serde_json::from_str(text)?;
        let row = |r: &[String]| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>>>();
        let mu = j
            .mu
            .iter()
            .map(|m| m.iter().map(|r| row(r)).collect::<Result<Mat>>())
            .collect::<Result<Vec<_>>>()?;
        let rep = LinearRep::new(j.system.parse()?, row(&j.v)?, mu, row(&j.w)?)?;
        if rep.dim() != j.dim {
            return Err(Error::Format(format!("dim {} does not match v", j.dim)));
        }
        Ok(rep)
    }

    /// Text or JSON, told apart by a leading `{`.
    pub fn load(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            LinearRep::from_json(text)
        } else {
            text.parse()
        }
    }
}

/// `a·n + b`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Affine {
    pub a: u64,
    pub b: i64,
}

impl Affine {
    fn at(self, n: u64) -> Option<u64> {
        u64::try_from(self.a as i128 * n as i128 + self.b as i128).ok()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, b) => write!(f, "{b}"),
            (1, 0) => write!(f, "n"),
            (a, 0) => write!(f, "{a}n"),
            (1, b) if b > 0 => write!(f, "n+{b}"),
            (1, b) => write!(f, "n{b}"),
            (a, b) if b > 0 => write!(f, "{a}n+{b}"),
            (a, b) => write!(f, "{a}n{b}"),
        }
    }
}

/// `f(a·n+b) = Σ cᵢ·f(aᵢ·n+bᵢ) + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceRelation {
    pub name: String,
    pub lhs: Affine,
    pub terms: Vec<(Q, Affine)>,
    pub constant: Q,
}

impl fmt::Display for RecurrenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) =", self.name, self.lhs)?;
        let mut first = true;
        let mut part = |f: &mut fmt::Formatter<'_>, c: &Q, body: String| -> fmt::Result {
            let sign = match (first, c.is_negative()) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => "+ ",
                (false, true) => "- ",
            };
            first = false;
            write!(f, " {sign}{body}")
        };
        for (c, t) in &self.terms {
            let mag = c.abs();
            let coef = if mag.is_one() { String::new() } else { format!("{} ", fmt_q(&mag)) };
            part(f, c, format!("{coef}{}({t})", self.name))?;
        }
        if !self.constant.is_zero() || self.terms.is_empty() {
            part(f, &self.constant, fmt_q(&self.constant.abs()))?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn number(&mut self) -> Option<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphabetic() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    /// `[a]n [± b]` or `b`, after the opening parenthesis.
    fn affine(&mut self) -> Result<Affine> {
        let a = self.number();
        if self.peek() == Some(b'n') {
            self.pos += 1;
            let a = a.unwrap_or(1);
            let b = if self.eat(b'+') {
                self.number().ok_or_else(|| self.error("expected offset"))? as i64
            } else if self.eat(b'-') {
                -(self.number().ok_or_else(|| self.error("expected offset"))? as i64)
            } else {
                0
            };
            Ok(Affine { a, b })
        } else {
            let b = a.ok_or_else(|| self.error("expected index"))?;
            Ok(Affine { a: 0, b: b as i64 })
        }
    }

    /// Unsigned rational `p` or `p/q`.
    fn rational(&mut self) -> Result<Option<Q>> {
        let Some(p) = self.number() else { return Ok(None) };
        if self.eat(b'/') {
            let d = self.number().filter(|&d| d != 0).ok_or_else(|| self.error("expected denominator"))?;
            Ok(Some(Q::new(p.into(), d.into())))
        } else {
            Ok(Some(Q::from_integer(p.into())))
        }
    }
}

impl FromStr for RecurrenceRelation {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut c = Cursor { s: text.as_bytes(), pos: 0 };
        let name = c.ident().ok_or_else(|| c.error("expected sequence name"))?;
        c.expect(b'(')?;
        let lhs = c.affine()?;
        c.expect(b')')?;
        c.expect(b'=')?;
        let mut terms: Vec<(Q, Affine)> = Vec::new();
        let mut constant = Q::zero();
        let mut first = true;
        while c.peek().is_some() {
            let sign = if c.eat(b'-') {
                -1
            } else if c.eat(b'+') || first {
                1
            } else {
                return Err(c.error("expected `+` or `-`"));
            };
            first = false;
            let coef = c.rational()?;
            c.eat(b'*');
            let at = c.pos;
            match c.ident() {
                Some(id) => {
                    if id != name {
                        c.pos = at;
                        return Err(c.error(&format!("expected `{name}`")));
                    }
                    c.expect(b'(')?;
                    let t = c.affine()?;
                    c.expect(b')')?;
                    let k = coef.unwrap_or_else(Q::one) * q(sign);
                    match terms.iter_mut().find(|(_, u)| *u == t) {
                        Some((e, _)) => *e += k,
                        None => terms.push((k, t)),
                    }
                }
                None => constant += coef.ok_or_else(|| c.error("expected term"))? * q(sign),
            }
        }
        if first {
            return Err(c.error("empty right-hand side"));
        }
        terms.retain(|(k, _)| !k.is_zero());
        Ok(RecurrenceRelation {
            name,
            lhs,
            terms,
            constant,
        })
    }
}

/// Parses one relation per line; blank lines and `#` comments are skipped.
pub fn parse_relations(text: &str) -> Result<Vec<RecurrenceRelation>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationFailure {
    pub n: u64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
    pub checked: u64,
    pub failure: Option<RelationFailure>,
}

impl RecurrenceRelation {
    /// Largest index touched for `n ≤ bound`.
    pub fn max_index(&self, bound: u64) -> u64 {
        std::iter::once(self.lhs)
            .chain(self.terms.iter().map(|t| t.1))
            .filter_map(|t| t.at(bound))
            .max()
            .unwrap_or(0)
    }

    /// Checks against a table of values; `n` where some index is negative
    /// is skipped.
    pub fn check_table(&self, table: &[Q], bound: u64) -> RelationCheck {
        let mut checked = 0;
        for n in 0..=bound {
            let Some(l) = self.lhs.at(n) else { continue };
            let idx: Option<Vec<u64>> = self.terms.iter().map(|(_, t)| t.at(n)).collect();
            let Some(idx) = idx else { continue };
            let lhs = table[l as usize].clone();
            let rhs: Q = self
                .terms
                .iter()
                .zip(&idx)
                .map(|((k, _), &i)| k * &table[i as usize])
                .sum::<Q>()
                + &self.constant;
            checked += 1;
            if lhs != rhs {
                return RelationCheck {
                    relation: self.to_string(),
                    holds: false,
                    checked,
                    failure: Some(RelationFailure {
                        n,
                        lhs: fmt_q(&lhs),
                        rhs: fmt_q(&rhs),
                    }),
                };
            }
        }
        RelationCheck {
            relation: self.to_string(),
            holds: true,
            checked,
            failure: None,
        }
    }
}

/// Evaluates both sides for every `n ≤ bound` and reports the least
/// counterexample.
pub fn verify_relation(rel: &RecurrenceRelation, rep: &LinearRep, bound: u64) -> RelationCheck {
    rel.check_table(&rep.table(rel.max_index(bound)), bound)
}

pub fn verify_relations(rels: &[RecurrenceRelation], rep: &LinearRep, bound: u64) -> Vec<RelationCheck> {
    let top = rels.iter().map(|r| r.max_index(bound)).max().unwrap_or(0);
    let table = rep.table(top);
    rels.iter().map(|r| r.check_table(&table, bound)).collect()
}

/// Piecewise closed form for the number of closed factors of length `n ≥ 8`
/// of Thue-Morse. Returns every `(k, value)` whose window holds `n`;
/// exactly one is expected.
pub fn closed_count_formula(n: u64) -> Vec<(i32, i64)> {
    let n = n as i64;
    let mut out = Vec::new();
    // with h = 2^(k+1), 2^k = h/2; compare 2n against multiples of h
    for k in -1i32..62 {
        let h = 1i64 << (k + 1);
        if 15 * h >= 2 * n {
            break;
        }
        let windows: [(i64, i64, i64); 7] = [
            (15, 18, 8 * h),
            (18, 19, 2 * n - 10 * h - 2),
            (19, 20, 28 * h - 2 * n + 2),
            (20, 22, 4 * n - 32 * h - 4),
            (22, 24, 56 * h - 4 * n + 4),
            (24, 28, 8 * h),
            (28, 30, 8 * n - 104 * h - 8),
        ];
        for (lo, hi, value) in windows {
            if lo * h < 2 * n && 2 * n <= hi * h {
                out.push((k, value));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PiecewiseCheck {
    pub checked: u64,
    /// `(n, formula, representation)`
    pub failures: Vec<(u64, i64, String)>,
    /// lengths in no window or in several
    pub coverage: Vec<u64>,
}

impl PiecewiseCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.coverage.is_empty()
    }
}

pub fn verify_piecewise_formula(rep: &LinearRep, bound: u64) -> PiecewiseCheck {
    let table = rep.table(bound);
    let mut out = PiecewiseCheck::default();
    for n in 8..=bound {
        let cases = closed_count_formula(n);
        if cases.len() != 1 {
            out.coverage.push(n);
            continue;
        }
        out.checked += 1;
        let want = cases[0].1;
        if table[n as usize] != q(want) {
            out.failures.push((n, want, fmt_q(&table[n as usize])));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::numeration::Comparison;

    const BIN: NumerationSystem = NumerationSystem::base(2);

    fn ints(xs: &[Q]) -> Vec<i64> {
        xs.iter().map(|x| x.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn less_than_counts_n() {
        let lt = BIN.comparison_automaton(Comparison::Lt);
        let rep = rep_from_counting_dfa(&lt, BIN, 0).unwrap();
        assert!(rep.is_zero_stable());
        assert_eq!(ints(&rep.table(64)), (0..=64).collect::<Vec<_>>());
        for n in 0..=64 {
            assert_eq!(rep.eval(n), q(n as i64));
        }
    }

    #[test]
    fn lsd_and_fibonacci_counts() {
        let lsd = BIN.with_order(DigitOrder::Lsd);
        let rep = rep_from_counting_dfa(&lsd.comparison_automaton(Comparison::Le), lsd, 0).unwrap();
        assert!(rep.is_zero_stable());
        assert_eq!(ints(&rep.table(20)), (1..=21).collect::<Vec<_>>());
        let fib = NumerationSystem::zeckendorf();
        let rep = rep_from_counting_dfa(&fib.comparison_automaton(Comparison::Lt), fib, 0).unwrap();
        assert_eq!(ints(&rep.table(30)), (0..=30).collect::<Vec<_>>());
    }

    #[test]
    fn empty_automaton_is_zero() {
        let rep = rep_from_counting_dfa(&Dfa::constant(Alphabet::new(2, 2), false), BIN, 0).unwrap();
        assert_eq!(rep.dim(), 0);
        assert_eq!(rep.eval(5), q(0));
        assert!(reps_equal(&rep, &LinearRep::zero(BIN)));
    }

    #[test]
    fn infinite_count_reports_cycle() {
        let ge = BIN.comparison_automaton(Comparison::Le).remap(2, &[1, 0]);
        match rep_from_counting_dfa(&ge, BIN, 0) {
            Err(Error::InfiniteCount { cycle }) => assert!(!cycle.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimization_keeps_values() {
        let lt = BIN.comparison_automaton(Comparison::Lt);
        let rep = rep_from_counting_dfa(&lt, BIN, 0).unwrap();
        let min = minimize_rep(&rep);
        assert!(min.dim() <= rep.dim());
        assert_eq!(min.dim(), 2);
        assert_eq!(minimize_rep(&min).dim(), min.dim());
        assert!(reps_equal(&rep, &min));
        assert_eq!(rep.table(200), min.table(200));
        assert_eq!(minimize_rep(&LinearRep::zero(BIN)).dim(), 0);
    }

    #[test]
    fn unequal_reps_detected() {
        let lt = rep_from_counting_dfa(&BIN.comparison_automaton(Comparison::Lt), BIN, 0).unwrap();
        let le = rep_from_counting_dfa(&BIN.comparison_automaton(Comparison::Le), BIN, 0).unwrap();
        assert!(!reps_equal(&lt, &le));
        assert!(reps_equal(&le, &le));
    }

    #[test]
    fn equality_looks_only_at_canonical_words() {
        let one = LinearRep::new(BIN, vec![q(1)], vec![vec![vec![q(1)]]; 2], vec![q(1)]).unwrap();
        // weight 5 for each leading zero, 1 once a digit 1 was read
        let m0 = vec![vec![q(5), q(0)], vec![q(0), q(1)]];
        let m1 = vec![vec![q(0), q(1)], vec![q(0), q(1)]];
        let lazy = LinearRep::new(BIN, vec![q(1), q(0)], vec![m0, m1], vec![q(1), q(1)]).unwrap();
        assert!(!lazy.is_zero_stable());
        assert_eq!(lazy.eval_word(&[0, 1]), q(5));
        assert!(reps_equal(&one, &lazy));
        let mut five = one.clone();
        five.mu[1] = vec![vec![q(5)]];
        assert!(!reps_equal(&one, &five));
    }

    #[test]
    fn text_and_json_round_trip() {
        let lt = minimize_rep(&rep_from_counting_dfa(&BIN.comparison_automaton(Comparison::Lt), BIN, 0).unwrap());
        let back: LinearRep = lt.to_string().parse().unwrap();
        assert_eq!(back, lt);
        assert_eq!(LinearRep::load(&lt.to_json()).unwrap(), lt);
        assert!("dim 1\nv 1\nmu 0\n1\nw 1/0".parse::<LinearRep>().is_err());
        assert!("dim 1\nv 1\nmu 0\n1\nw 1".parse::<LinearRep>().is_err());
    }

    #[test]
    fn relation_parsing() {
        let r: RecurrenceRelation = "f(8n+4) = 2f(2n+1) - 5/2 f(4n+1) + f(4n+2) + 1/2 f(4n+3)".parse().unwrap();
        assert_eq!(r.lhs, Affine { a: 8, b: 4 });
        assert_eq!(r.terms.len(), 4);
        assert_eq!(r.terms[1].0, Q::new((-5).into(), 2.into()));
        let back: RecurrenceRelation = r.to_string().parse().unwrap();
        assert_eq!(back, r);
        let z: RecurrenceRelation = "a(8n+5) = 0".parse().unwrap();
        assert!(z.terms.is_empty() && z.constant.is_zero());
        assert_eq!(z.to_string().parse::<RecurrenceRelation>().unwrap(), z);
        assert!("f(2n) = g(n)".parse::<RecurrenceRelation>().is_err());
        assert!("f(2n) =".parse::<RecurrenceRelation>().is_err());
        assert!("f(2n) = f(n) f(n)".parse::<RecurrenceRelation>().is_err());
    }

    #[test]
    fn relations_on_identity() {
        let rep = rep_from_counting_dfa(&BIN.comparison_automaton(Comparison::Lt), BIN, 0).unwrap();
        let good: RecurrenceRelation = "f(4n+3) = 2 f(2n+1) + 1".parse().unwrap();
        assert!(verify_relation(&good, &rep, 100).holds);
        let bad: RecurrenceRelation = "f(2n) = f(n) + f(n) + f(1) - 1 + 1/2 f(2)".parse().unwrap();
        let check = verify_relation(&bad, &rep, 100);
        assert!(!check.holds);
        assert_eq!(check.failure.unwrap().n, 0);
    }

    #[test]
    fn piecewise_windows_partition() {
        for n in 8..5000 {
            assert_eq!(closed_count_formula(n).len(), 1, "{n}");
        }
        assert_eq!(closed_count_formula(16), vec![(0, 16)]);
        assert_eq!(closed_count_formula(10)[0].0, -1);
    }
}
