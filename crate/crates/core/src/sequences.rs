//! Built-in automatic sequences and the generators used to check them.
//!
//! The base-2 sequences are synthesized from their defining recurrences by
//! a kernel construction; morphism fixed points give an independent prefix
//! generator for every sequence.

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfao};
use crate::error::{Error, Result};
use crate::numeration::{DigitOrder, NumerationSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BuiltinSequence {
    ThueMorse,
    RudinShapiro,
    Paperfolding,
    PeriodDoubling,
    Fibonacci,
    SeqA,
    SeqB,
}

pub const ALL: [BuiltinSequence; 7] = [
    BuiltinSequence::ThueMorse,
    BuiltinSequence::RudinShapiro,
    BuiltinSequence::Paperfolding,
    BuiltinSequence::PeriodDoubling,
    BuiltinSequence::Fibonacci,
    BuiltinSequence::SeqA,
    BuiltinSequence::SeqB,
];

impl BuiltinSequence {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinSequence::ThueMorse => "thue-morse",
            BuiltinSequence::RudinShapiro => "rudin-shapiro",
            BuiltinSequence::Paperfolding => "paperfolding",
            BuiltinSequence::PeriodDoubling => "period-doubling",
            BuiltinSequence::Fibonacci => "fibonacci",
            BuiltinSequence::SeqA => "seq-a",
            BuiltinSequence::SeqB => "seq-b",
        }
    }

    /// One-letter name used in predicate formulas.
    pub fn symbol(self) -> &'static str {
        match self {
            BuiltinSequence::ThueMorse => "T",
            BuiltinSequence::RudinShapiro => "RS",
            BuiltinSequence::Paperfolding => "P",
            BuiltinSequence::PeriodDoubling => "PD",
            BuiltinSequence::Fibonacci => "F",
            BuiltinSequence::SeqA => "A",
            BuiltinSequence::SeqB => "B",
        }
    }

    pub fn system(self) -> NumerationSystem {
        match self {
            BuiltinSequence::Fibonacci => NumerationSystem::zeckendorf(),
            BuiltinSequence::SeqA | BuiltinSequence::SeqB => NumerationSystem::base(4),
            _ => NumerationSystem::base(2),
        }
    }

    /// Number of output symbols; outputs are `0..alphabet_size`.
    pub fn alphabet_size(self) -> u32 {
        match self {
            BuiltinSequence::SeqA | BuiltinSequence::SeqB => 3,
            _ => 2,
        }
    }

    /// Minimal Dfao reading most significant digit first.
    pub fn dfao(self) -> Dfao {
        match self {
            BuiltinSequence::Fibonacci => fibonacci_dfao(),
            BuiltinSequence::SeqA => interval_dfao(false),
            BuiltinSequence::SeqB => interval_dfao(true),
            _ => self.kernel().expect("base-2 sequence").lsd_dfao(2).reverse(),
        }
    }

    pub fn dfao_for(self, order: DigitOrder) -> Dfao {
        match (order, self.kernel()) {
            (DigitOrder::Msd, _) => self.dfao(),
            (DigitOrder::Lsd, Some(k)) => k.lsd_dfao(2),
            (DigitOrder::Lsd, None) => self.dfao().reverse(),
        }
    }

    pub fn eval(self, n: u64) -> u32 {
        let sys = self.system();
        let letters: Vec<usize> = sys.to_canonical(n).letters();
        self.dfao().eval(&letters)
    }

    /// Prefix of the given length, generated without the Dfao.
    pub fn prefix(self, len: usize) -> Vec<u32> {
        match self {
            BuiltinSequence::SeqA => (0..len as u64).map(|i| interval_rule(i, false)).collect(),
            BuiltinSequence::SeqB => (0..len as u64).map(|i| interval_rule(i, true)).collect(),
            _ => {
                let (m, start) = self.morphism().expect("morphic sequence");
                m.fixed_point_prefix(start, len)
            }
        }
    }

    /// The generating morphism with its coding, and the start letter.
    pub fn morphism(self) -> Option<(Morphism, u32)> {
        let m = match self {
            BuiltinSequence::ThueMorse => (Morphism::new(vec![vec![0, 1], vec![1, 0]]), 0),
            BuiltinSequence::RudinShapiro => (
                Morphism::new(vec![vec![0, 1], vec![0, 2], vec![3, 1], vec![3, 2]]).with_coding(vec![0, 0, 1, 1]),
                0,
            ),
            BuiltinSequence::Paperfolding => (
                Morphism::new(vec![vec![0, 1], vec![2, 1], vec![0, 3], vec![2, 3]]).with_coding(vec![0, 0, 1, 1]),
                0,
            ),
            BuiltinSequence::PeriodDoubling => (Morphism::new(vec![vec![1, 1], vec![1, 0]]), 1),
            BuiltinSequence::Fibonacci => (Morphism::new(vec![vec![0, 1], vec![0]]), 0),
            BuiltinSequence::SeqA | BuiltinSequence::SeqB => return None,
        };
        Some(m)
    }

    /// Defining recurrences, for the base-2 sequences.
    pub fn kernel(self) -> Option<KernelSpec> {
        use Rule::{Const, Map};
        let id = vec![0, 1];
        let spec = match self {
            BuiltinSequence::ThueMorse => KernelSpec {
                rules: vec![Map(2, 0, 1, 0, id.clone()), Map(2, 1, 1, 0, vec![1, 0])],
                seeds: vec![(0, 0)],
                symbols: 2,
            },
            BuiltinSequence::RudinShapiro => KernelSpec {
                rules: vec![
                    Map(2, 0, 1, 0, id.clone()),
                    Map(4, 1, 1, 0, id.clone()),
                    Map(8, 7, 2, 1, id.clone()),
                    Map(16, 3, 8, 3, id.clone()),
                    Map(16, 11, 4, 3, id),
                ],
                // r_3 is not fixed by the relations; it is read off the prefix 00010010
                seeds: vec![(0, 0), (3, 1)],
                symbols: 2,
            },
            BuiltinSequence::Paperfolding => KernelSpec {
                rules: vec![Map(2, 1, 1, 0, id), Const(4, 0, 0), Const(4, 2, 1)],
                seeds: vec![(0, 0)],
                symbols: 2,
            },
            BuiltinSequence::PeriodDoubling => KernelSpec {
                rules: vec![Const(2, 0, 1), Const(4, 1, 0), Map(4, 3, 1, 0, id)],
                seeds: vec![(0, 1)],
                symbols: 2,
            },
            _ => return None,
        };
        Some(spec)
    }
}

impl fmt::Display for BuiltinSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ALL.iter()
            .copied()
            .find(|q| q.name() == lower || q.symbol().eq_ignore_ascii_case(s))
            .or(match lower.as_str() {
                "t" | "tm" => Some(BuiltinSequence::ThueMorse),
                "r" | "rs" => Some(BuiltinSequence::RudinShapiro),
                "p" | "pf" => Some(BuiltinSequence::Paperfolding),
                "d" | "pd" => Some(BuiltinSequence::PeriodDoubling),
                "f" | "fib" => Some(BuiltinSequence::Fibonacci),
                "a" => Some(BuiltinSequence::SeqA),
                "b" => Some(BuiltinSequence::SeqB),
                _ => None,
            })
            .ok_or_else(|| Error::UnknownSequence(s.to_string()))
    }
}

/// A morphism on `0..images.len()` with an optional coding applied after
/// iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub images: Vec<Vec<u32>>,
    pub coding: Option<Vec<u32>>,
}

impl Morphism {
    pub fn new(images: Vec<Vec<u32>>) -> Self {
        Morphism { images, coding: None }
    }

    pub fn with_coding(mut self, coding: Vec<u32>) -> Self {
        self.coding = Some(coding);
        self
    }

    pub fn is_prolongable(&self, start: u32) -> bool {
        let img = &self.images[start as usize];
        img.len() >= 2 && img[0] == start
    }

    pub fn apply(&self, word: &[u32]) -> Vec<u32> {
        word.iter().flat_map(|&c| self.images[c as usize].iter().copied()).collect()
    }

    /// Prefix of the fixed point starting with `start`, after the coding.
    pub fn fixed_point_prefix(&self, start: u32, len: usize) -> Vec<u32> {
        assert!(self.is_prolongable(start), "morphism is not prolongable on {start}");
        let mut w = vec![start];
        while w.len() < len {
            w = self.apply(&w);
        }
        w.truncate(len);
        if let Some(c) = &self.coding {
            w.iter_mut().for_each(|x| *x = c[*x as usize]);
        }
        w
    }
}

/// `x[m n + r]` is either a constant or `σ(x[m' n + r'])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `Map(m, r, m', r', σ)`
    Map(u64, u64, u64, u64, Vec<u32>),
    /// `Const(m, r, value)`
    Const(u64, u64, u32),
}

impl Rule {
    fn modulus(&self) -> (u64, u64) {
        match *self {
            Rule::Map(m, r, ..) | Rule::Const(m, r, _) => (m, r),
        }
    }
}

/// A sequence given by recurrences and seed values at the indices the
/// recurrences do not determine.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub rules: Vec<Rule>,
    pub seeds: Vec<(u64, u32)>,
    pub symbols: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum KState {
    /// `n ↦ σ(x[a n + b])`
    Sub(u64, u64, Vec<u32>),
    Const(u32),
}

impl KernelSpec {
    /// `x[n]` from the recurrences alone.
    pub fn value(&self, n: u64) -> u32 {
        let mut sigma: Vec<u32> = (0..self.symbols).collect();
        let mut n = n;
        loop {
            if let Some(&(_, v)) = self.seeds.iter().find(|&&(i, _)| i == n) {
                return sigma[v as usize];
            }
            let rule = self
                .rules
                .iter()
                .find(|r| {
                    let (m, r0) = r.modulus();
                    n % m == r0 % m
                })
                .unwrap_or_else(|| panic!("no rule covers index {n}"));
            match rule {
                Rule::Const(_, _, v) => return sigma[*v as usize],
                Rule::Map(m, r, m2, r2, s) => {
                    let next = m2 * ((n - r) / m) + r2;
                    assert!(next < n, "recurrence does not decrease at index {n}");
                    sigma = s.iter().map(|&c| sigma[c as usize]).collect();
                    n = next;
                }
            }
        }
    }

    /// Rewrites `σ(x[a n + b])` with any rule whose progression contains it
    /// and which shrinks the modulus.
    fn normalize(&self, mut a: u64, mut b: u64, mut sigma: Vec<u32>) -> KState {
        'outer: loop {
            for rule in &self.rules {
                let (m, r) = rule.modulus();
                if !a.is_multiple_of(m) || b % m != r {
                    continue;
                }
                match rule {
                    Rule::Const(_, _, v) => return KState::Const(sigma[*v as usize]),
                    Rule::Map(_, _, m2, r2, s) if *m2 < m => {
                        let (q, c) = (a / m, (b - r) / m);
                        a = m2 * q;
                        b = m2 * c + r2;
                        sigma = s.iter().map(|&x| sigma[x as usize]).collect();
                        continue 'outer;
                    }
                    Rule::Map(..) => {}
                }
            }
            if sigma.iter().all(|&x| x == sigma[0]) {
                return KState::Const(sigma[0]);
            }
            return KState::Sub(a, b, sigma);
        }
    }

    /// Dfao reading the base-`k` digits of `n`, least significant first.
    pub fn lsd_dfao(&self, k: u32) -> Dfao {
        let start = self.normalize(1, 0, (0..self.symbols).collect());
        Dfao::explore(
            Alphabet::new(1, k),
            start,
            |s, d| match s {
                KState::Const(v) => KState::Const(*v),
                KState::Sub(a, b, sigma) => self.normalize(a * k as u64, b + a * d as u64, sigma.clone()),
            },
            |s| match s {
                KState::Const(v) => *v,
                KState::Sub(_, b, sigma) => sigma[self.value(*b) as usize],
            },
        )
        .minimize()
    }
}

/// Zeckendorf evaluator: the Fibonacci word at `n` is the last digit of the
/// representation of `n`.
fn fibonacci_dfao() -> Dfao {
    Dfao::explore(Alphabet::new(1, 2), 0u32, |_, d| d as u32, |&s| s).minimize()
}

/// `(k mod 2) + 1` when `3·4ᵏ ≤ i ≤ 5·4ᵏ` for some `k ≥ 0` (strict
/// inequalities when `strict`), otherwise 0.
pub fn interval_rule(i: u64, strict: bool) -> u32 {
    let mut p = 1u64;
    for k in 0..32u32 {
        let (lo, hi) = (3 * p, 5 * p);
        let inside = if strict { lo < i && i < hi } else { lo <= i && i <= hi };
        if inside {
            return k % 2 + 1;
        }
        if lo > i {
            break;
        }
        p *= 4;
    }
    0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum IState {
    Start,
    One,
    /// leading 3; `zero` while every later digit is 0; `k` parity
    Three { zero: bool, odd: bool },
    /// leading 10
    Ten { odd: bool },
    /// leading 11 followed by zeros only
    Eleven { odd: bool },
    Dead,
}

/// msd-first base-4 Dfao for the interval rule: `3·4ᵏ` is `3 0ᵏ`, `4ᵏ⁺¹` is
/// `1 0ᵏ⁺¹` and `5·4ᵏ` is `1 1 0ᵏ`.
fn interval_dfao(strict: bool) -> Dfao {
    use IState::*;
    Dfao::explore(
        Alphabet::new(1, 4),
        Start,
        |&s, d| match (s, d) {
            (Start, 0) => Start,
            (Start, 1) => One,
            (Start, 3) => Three { zero: true, odd: false },
            (One, 0) => Ten { odd: false },
            (One, 1) => Eleven { odd: false },
            (Three { zero, odd }, d) => Three { zero: zero && d == 0, odd: !odd },
            (Ten { odd }, _) => Ten { odd: !odd },
            (Eleven { odd }, 0) => Eleven { odd: !odd },
            _ => Dead,
        },
        |&s| {
            let level = |odd: bool| if odd { 2 } else { 1 };
            match s {
                Three { zero, odd } if !(strict && zero) => level(odd),
                Ten { odd } => level(odd),
                Eleven { odd } if !strict => level(odd),
                _ => 0,
            }
        },
    )
    .minimize()
}

/// Sequence registry keyed by formula symbol, with cached Dfaos.
#[derive(Debug, Default)]
pub struct Registry {
    cache: FxHashMap<(BuiltinSequence, DigitOrder), Dfao>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dfao(&mut self, seq: BuiltinSequence, order: DigitOrder) -> &Dfao {
        self.cache.entry((seq, order)).or_insert_with(|| seq.dfao_for(order))
    }
}
