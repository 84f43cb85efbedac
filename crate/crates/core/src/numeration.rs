//! Numeration systems: how naturals and tuples of naturals become digit
//! strings, and the automata for validity, comparison and linear arithmetic
//! the compiler builds its atoms from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, BoolOp, Dfa};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DigitOrder {
    Msd,
    Lsd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NumerationKind {
    Base(u32),
    Zeckendorf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumerationSystem {
    pub kind: NumerationKind,
    pub order: DigitOrder,
}

/// Relation used by [`NumerationSystem::linear_automaton`]: the linear form
/// is compared against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinearRel {
    Eq,
    Le,
}

/// A tuple of digit strings of equal length, stored in reading order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitString {
    pub system: NumerationSystem,
    pub arity: usize,
    pub digits: Vec<Vec<u32>>,
}

impl DigitString {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn letters(&self) -> Vec<usize> {
        let alpha = self.system.alphabet(self.arity);
        self.digits.iter().map(|d| alpha.encode(d)).collect()
    }

    /// Component `c` as a plain digit string in reading order.
    pub fn component(&self, c: usize) -> Vec<u32> {
        self.digits.iter().map(|d| d[c]).collect()
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity == 1 {
            for d in &self.digits {
                write!(f, "{}", d[0])?;
            }
            return Ok(());
        }
        for d in &self.digits {
            let parts: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", parts.join(","))?;
        }
        Ok(())
    }
}

impl NumerationSystem {
    pub const fn base(k: u32) -> Self {
        NumerationSystem {
            kind: NumerationKind::Base(k),
            order: DigitOrder::Msd,
        }
    }

    pub const fn zeckendorf() -> Self {
        NumerationSystem {
            kind: NumerationKind::Zeckendorf,
            order: DigitOrder::Msd,
        }
    }

    pub fn with_order(self, order: DigitOrder) -> Self {
        NumerationSystem { order, ..self }
    }

    pub fn radix(&self) -> u32 {
        match self.kind {
            NumerationKind::Base(k) => k,
            NumerationKind::Zeckendorf => 2,
        }
    }

    pub fn alphabet(&self, arity: usize) -> Alphabet {
        Alphabet::new(arity, self.radix())
    }

    /// Canonical digits of `n`, most significant first.
    fn msd_digits(&self, mut n: u64) -> Vec<u32> {
        match self.kind {
            NumerationKind::Base(k) => {
                let mut out = Vec::new();
                while n > 0 {
                    out.push((n % k as u64) as u32);
                    n /= k as u64;
                }
                out.reverse();
                out
            }
            NumerationKind::Zeckendorf => {
                // greedy decomposition over 1, 2, 3, 5, 8, ...
                let fibs = fibonacci_weights_up_to(n);
                let mut out = Vec::with_capacity(fibs.len());
                for &f in fibs.iter().rev() {
                    if f <= n {
                        out.push(1);
                        n -= f;
                    } else {
                        out.push(0);
                    }
                }
                let lead = out.iter().position(|&d| d != 0).unwrap_or(out.len());
                out.drain(..lead);
                out
            }
        }
    }

    pub fn to_canonical(&self, n: u64) -> DigitString {
        let mut digits: Vec<Vec<u32>> = self.msd_digits(n).into_iter().map(|d| vec![d]).collect();
        if self.order == DigitOrder::Lsd {
            digits.reverse();
        }
        DigitString {
            system: *self,
            arity: 1,
            digits,
        }
    }

    fn check_digit(&self, d: u32) -> Result<()> {
        if d >= self.radix() {
            return Err(Error::InvalidDigit {
                digit: d,
                system: self.to_string(),
            });
        }
        Ok(())
    }

    /// Value of a digit string in reading order. Padding zeros are allowed;
    /// Zeckendorf strings with adjacent 1s are rejected.
    pub fn value(&self, digits: &[u32]) -> Result<u64> {
        let msd: Vec<u32> = match self.order {
            DigitOrder::Msd => digits.to_vec(),
            DigitOrder::Lsd => digits.iter().rev().copied().collect(),
        };
        for &d in &msd {
            self.check_digit(d)?;
        }
        match self.kind {
            NumerationKind::Base(k) => Ok(msd.iter().fold(0u64, |acc, &d| acc * k as u64 + d as u64)),
            NumerationKind::Zeckendorf => {
                if msd.windows(2).any(|w| w[0] == 1 && w[1] == 1) {
                    return Err(Error::InvalidDigit {
                        digit: 1,
                        system: format!("{self} (adjacent 1s)"),
                    });
                }
                let mut total = 0u64;
                let (mut lo, mut hi) = (1u64, 2u64);
                for &d in msd.iter().rev() {
                    if d == 1 {
                        total += lo;
                    }
                    let next = lo + hi;
                    lo = hi;
                    hi = next;
                }
                Ok(total)
            }
        }
    }

    pub fn from_digits(&self, w: &DigitString) -> Result<u64> {
        if w.arity != 1 {
            return Err(Error::Format(format!("expected arity 1, found {}", w.arity)));
        }
        self.value(&w.component(0))
    }

    /// Componentwise canonical representations padded to a common length.
    pub fn encode_tuple(&self, values: &[u64]) -> DigitString {
        let comps: Vec<Vec<u32>> = values.iter().map(|&v| self.msd_digits(v)).collect();
        let len = comps.iter().map(Vec::len).max().unwrap_or(0);
        let mut digits: Vec<Vec<u32>> = (0..len)
            .map(|i| {
                comps
                    .iter()
                    .map(|c| {
                        let pad = len - c.len();
                        if i < pad {
                            0
                        } else {
                            c[i - pad]
                        }
                    })
                    .collect()
            })
            .collect();
        if self.order == DigitOrder::Lsd {
            digits.reverse();
        }
        DigitString {
            system: *self,
            arity: values.len(),
            digits,
        }
    }

    /// Decodes an accepted word back into the value tuple.
    pub fn decode_letters(&self, arity: usize, letters: &[usize]) -> Result<Vec<u64>> {
        let alpha = self.alphabet(arity);
        let rows: Vec<Vec<u32>> = letters.iter().map(|&l| alpha.decode(l)).collect();
        (0..arity)
            .map(|c| {
                let comp: Vec<u32> = rows.iter().map(|r| r[c]).collect();
                self.value(&comp)
            })
            .collect()
    }

    pub fn letters_for(&self, values: &[u64]) -> Vec<usize> {
        self.encode_tuple(values).letters()
    }

    /// Accepts every string whose components are all valid (possibly padded)
    /// representations.
    pub fn validity_automaton(&self, arity: usize) -> Dfa {
        let comps: Vec<usize> = (0..arity).collect();
        self.validity_on(arity, &comps)
    }

    /// Validity constraint on the listed components only.
    pub fn validity_on(&self, arity: usize, comps: &[usize]) -> Dfa {
        let alpha = self.alphabet(arity);
        match self.kind {
            NumerationKind::Base(_) => Dfa::constant(alpha, true),
            NumerationKind::Zeckendorf => {
                // state: which constrained components just read a 1
                let mask_of = |l: usize| -> u64 {
                    comps
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| alpha.digit(l, c) == 1)
                        .fold(0u64, |m, (i, _)| m | (1 << i))
                };
                Dfa::explore(
                    alpha,
                    Some(0u64),
                    |st, l| match *st {
                        Some(prev) => {
                            let cur = mask_of(l);
                            if prev & cur != 0 {
                                None
                            } else {
                                Some(cur)
                            }
                        }
                        None => None,
                    },
                    |st| st.is_some(),
                )
                .minimize()
            }
        }
    }

    /// Automaton over `coefs.len()` components accepting the tuples `x` with
    /// `Σ coefs[c]·x[c] + constant  rel  0`, restricted to valid strings.
    pub fn linear_automaton(&self, coefs: &[i64], constant: i64, rel: LinearRel) -> Dfa {
        let arity = coefs.len();
        let alpha = self.alphabet(arity);
        let pos: i64 = coefs.iter().filter(|&&c| c > 0).sum();
        let neg: i64 = -coefs.iter().filter(|&&c| c < 0).sum::<i64>();
        let weights: Vec<i64> = (0..alpha.size())
            .map(|l| (0..arity).map(|c| coefs[c] * alpha.digit(l, c) as i64).sum())
            .collect();
        let msd = match self.kind {
            NumerationKind::Base(k) => {
                let k = k as i64;
                let classify = |s: i64| -> LinState<i64> {
                    match base_verdict(s, pos, neg, constant, rel) {
                        Some(v) => LinState::Done(v),
                        None => LinState::Run(s),
                    }
                };
                let start = classify(0);
                Dfa::explore(
                    alpha,
                    start,
                    |st, l| match *st {
                        LinState::Done(v) => LinState::Done(v),
                        LinState::Run(s) => classify(k * s + weights[l]),
                    },
                    |st| match *st {
                        LinState::Done(v) => v,
                        LinState::Run(s) => holds(s + constant, rel),
                    },
                )
            }
            NumerationKind::Zeckendorf => {
                let classify = |s: (i64, i64)| -> LinState<(i64, i64)> {
                    match zeckendorf_verdict(s, pos, neg, constant, rel) {
                        Some(v) => LinState::Done(v),
                        None => LinState::Run(s),
                    }
                };
                let start = classify((0, 0));
                Dfa::explore(
                    alpha,
                    start,
                    |st, l| match *st {
                        LinState::Done(v) => LinState::Done(v),
                        LinState::Run((a, b)) => classify((a + b + weights[l], a)),
                    },
                    |st| match *st {
                        LinState::Done(v) => v,
                        LinState::Run((a, b)) => holds(a + b + constant, rel),
                    },
                )
                .product(&self.validity_automaton(arity), BoolOp::And)
                .expect("same alphabet")
            }
        };
        self.orient(msd.minimize())
    }

    /// Turns an automaton built for msd-first reading into one for this
    /// system's digit order.
    pub fn orient(&self, msd: Dfa) -> Dfa {
        match self.order {
            DigitOrder::Msd => msd,
            DigitOrder::Lsd => msd.reverse(),
        }
    }

    /// Accepts `(x, y, z)` with `x + y = z`.
    pub fn addition_automaton(&self) -> Dfa {
        self.linear_automaton(&[1, 1, -1], 0, LinearRel::Eq)
    }

    pub fn comparison_automaton(&self, rel: Comparison) -> Dfa {
        match rel {
            Comparison::Eq => self.linear_automaton(&[1, -1], 0, LinearRel::Eq),
            Comparison::Lt => self.linear_automaton(&[1, -1], 1, LinearRel::Le),
            Comparison::Le => self.linear_automaton(&[1, -1], 0, LinearRel::Le),
        }
    }

    /// The tuples in the language whose components are all `≤ bound`, sorted.
    pub fn enumerate(&self, dfa: &Dfa, bound: u64) -> Vec<Vec<u64>> {
        let arity = dfa.arity();
        if arity == 1 {
            return (0..=bound)
                .filter(|&n| dfa.accepts(&self.letters_for(&[n])))
                .map(|n| vec![n])
                .collect();
        }
        // every tuple ≤ bound has a padded representation of this length
        let len = self.to_canonical(bound).len();
        let live = dfa.live_states();
        let alpha = dfa.alphabet();
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(len);
        self.enumerate_rec(dfa, &live, alpha, len, dfa.initial(), &mut word, bound, &mut out);
        out.sort();
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_rec(
        &self,
        dfa: &Dfa,
        live: &[bool],
        alpha: Alphabet,
        len: usize,
        state: u32,
        word: &mut Vec<usize>,
        bound: u64,
        out: &mut Vec<Vec<u64>>,
    ) {
        if !live[state as usize] {
            return;
        }
        if word.len() == len {
            if dfa.is_accepting(state) {
                if let Ok(vals) = self.decode_letters(alpha.arity, word) {
                    if vals.iter().all(|&v| v <= bound) {
                        out.push(vals);
                    }
                }
            }
            return;
        }
        for l in 0..alpha.size() {
            word.push(l);
            self.enumerate_rec(dfa, live, alpha, len, dfa.next(state, l), word, bound, out);
            word.pop();
        }
    }

    /// Whether the tuple is in the language.
    pub fn accepts(&self, dfa: &Dfa, values: &[u64]) -> bool {
        dfa.accepts(&self.letters_for(values))
    }

    /// All tuples of a finite language, or `None` when it is infinite.
    pub fn enumerate_finite(&self, dfa: &Dfa) -> Option<Vec<Vec<u64>>> {
        if self.order == DigitOrder::Lsd {
            return self.with_order(DigitOrder::Msd).enumerate_finite(&dfa.reverse());
        }
        // padding loops on the zero letter are the only cycles a finite
        // language may have; strip them by requiring canonical length
        let arity = dfa.arity();
        let alpha = dfa.alphabet();
        let live = dfa.live_states();
        let mut out = Vec::new();
        let mut stack: Vec<(u32, Vec<usize>)> = vec![(dfa.initial(), Vec::new())];
        let limit = dfa.num_states() * 2 + 2;
        while let Some((s, w)) = stack.pop() {
            if w.len() > limit {
                return None;
            }
            if dfa.is_accepting(s)
                && w.first() != Some(&0) {
                    if let Ok(vals) = self.decode_letters(arity, &w) {
                        out.push(vals);
                    }
                }
            for l in 0..alpha.size() {
                if w.is_empty() && l == 0 {
                    continue;
                }
                let t = dfa.next(s, l);
                if live[t as usize] {
                    let mut w2 = w.clone();
                    w2.push(l);
                    stack.push((t, w2));
                }
            }
        }
        out.sort();
        out.dedup();
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum LinState<S> {
    Run(S),
    Done(bool),
}

fn holds(v: i64, rel: LinearRel) -> bool {
    match rel {
        LinearRel::Eq => v == 0,
        LinearRel::Le => v <= 0,
    }
}

/// Base-k: with `s` the value of the digits read so far, the final value
/// after `m` more digits lies in `[(s-neg)k^m + neg + c, (s+pos)k^m - pos + c]`.
fn base_verdict(s: i64, pos: i64, neg: i64, c: i64, rel: LinearRel) -> Option<bool> {
    let always_pos = s >= neg && s + c > 0;
    let always_nonpos = s + pos <= 0 && s + c <= 0;
    let always_neg = s + pos <= 0 && s + c < 0;
    match rel {
        LinearRel::Le if always_pos => Some(false),
        LinearRel::Le if always_nonpos => Some(true),
        LinearRel::Eq if always_pos || always_neg => Some(false),
        _ => None,
    }
}

/// Zeckendorf: after reading a prefix, its contribution with `m` digits
/// still to come is `a·F(m+2) + b·F(m+1)` (F(1) = F(2) = 1), and the
/// remaining digits add something in `[-neg·(F(m+2)-1), pos·(F(m+2)-1)]`.
/// A verdict is returned only when it holds for every `m`.
fn zeckendorf_verdict((a, b): (i64, i64), pos: i64, neg: i64, c: i64, rel: LinearRel) -> Option<bool> {
    const EXACT: usize = 80;
    let (a, b, pos, neg, c) = (a as i128, b as i128, pos as i128, neg as i128, c as i128);
    let mut lo_all_pos = true;
    let mut hi_all_nonpos = true;
    let mut hi_all_neg = true;
    let (mut f1, mut f2) = (1i128, 1i128); // F(m+1), F(m+2)
    for _ in 0..=EXACT {
        let base = a * f2 + b * f1;
        let lo = base - neg * (f2 - 1) + c;
        let hi = base + pos * (f2 - 1) + c;
        lo_all_pos &= lo > 0;
        hi_all_nonpos &= hi <= 0;
        hi_all_neg &= hi < 0;
        let next = f1 + f2;
        f1 = f2;
        f2 = next;
    }
    // beyond EXACT digits the bounds divided by F(m+2) converge to these
    // limits; the margin dwarfs the remaining error
    let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
    let lo_lim = (a - neg) as f64 + b as f64 * phi_inv;
    let hi_lim = (a + pos) as f64 + b as f64 * phi_inv;
    const MARGIN: f64 = 1e-6;
    if b == 0 {
        // limits are exact integers; the constant decides ties
        lo_all_pos &= a - neg > 0 || (a - neg == 0 && neg + c > 0);
        hi_all_nonpos &= a + pos < 0 || (a + pos == 0 && c - pos <= 0);
        hi_all_neg &= a + pos < 0 || (a + pos == 0 && c - pos < 0);
    } else {
        lo_all_pos &= lo_lim > MARGIN;
        hi_all_nonpos &= hi_lim < -MARGIN;
        hi_all_neg &= hi_lim < -MARGIN;
    }
    match rel {
        LinearRel::Le if lo_all_pos => Some(false),
        LinearRel::Le if hi_all_nonpos => Some(true),
        LinearRel::Eq if lo_all_pos || hi_all_neg => Some(false),
        _ => None,
    }
}

/// Weights 1, 2, 3, 5, ... not exceeding `n`.
fn fibonacci_weights_up_to(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut a, mut b) = (1u64, 2u64);
    while a <= n {
        out.push(a);
        let next = a.saturating_add(b);
        a = b;
        b = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Eq,
    Lt,
    Le,
}

impl fmt::Display for NumerationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = match self.order {
            DigitOrder::Msd => "msd",
            DigitOrder::Lsd => "lsd",
        };
        match self.kind {
            NumerationKind::Base(k) => write!(f, "{order}-{k}"),
            NumerationKind::Zeckendorf => write!(f, "{order}-fib"),
        }
    }
}

impl FromStr for NumerationSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (order, rest) = s
            .split_once('-')
            .ok_or_else(|| Error::Format(format!("bad numeration system `{s}`")))?;
        let order = match order {
            "msd" => DigitOrder::Msd,
            "lsd" => DigitOrder::Lsd,
            _ => return Err(Error::Format(format!("bad digit order `{order}`"))),
        };
        let kind = match rest {
            "fib" => NumerationKind::Zeckendorf,
            k => {
                let k: u32 = k
                    .parse()
                    .map_err(|_| Error::Format(format!("bad base `{k}`")))?;
                if k < 2 {
                    return Err(Error::Format(format!("base must be at least 2, got {k}")));
                }
                NumerationKind::Base(k)
            }
        };
        Ok(NumerationSystem { kind, order })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIN: NumerationSystem = NumerationSystem::base(2);
    const FIB: NumerationSystem = NumerationSystem::zeckendorf();

    /// Brute-force Zeckendorf: the unique no-adjacent-1s string with the
    /// right value, found by enumerating all strings of a given length.
    fn zeckendorf_by_search(n: u64) -> String {
        for len in 0..20 {
            for bits in 0u64..(1 << len) {
                if bits & (bits >> 1) != 0 {
                    continue;
                }
                if len > 0 && bits >> (len - 1) == 0 {
                    continue;
                }
                let fibs = [1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765, 10946];
                let value: u64 = (0..len).filter(|i| bits >> i & 1 == 1).map(|i| fibs[i]).sum();
                if value == n {
                    return (0..len).rev().map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect();
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(BIN.to_canonical(0).to_string(), "");
        assert_eq!(BIN.to_canonical(6).to_string(), "110");
        assert_eq!(FIB.to_canonical(11).to_string(), "10100");
        assert_eq!(zeckendorf_by_search(11), "10100");
        for n in 0..300 {
            assert_eq!(FIB.to_canonical(n).to_string(), zeckendorf_by_search(n));
        }
    }

    #[test]
    fn from_digits_examples() {
        assert_eq!(BIN.value(&[0, 1, 1, 0]).unwrap(), 6);
        assert_eq!(BIN.value(&[]).unwrap(), 0);
        assert_eq!(FIB.value(&[1, 0, 1, 0, 0]).unwrap(), 11);
        assert!(BIN.value(&[2]).is_err());
        assert!(FIB.value(&[0, 1, 1]).is_err());
    }

    #[test]
    fn encode_tuple_examples() {
        assert_eq!(BIN.encode_tuple(&[6, 3]).to_string(), "[1,0][1,1][0,1]");
        assert_eq!(BIN.encode_tuple(&[0, 0]).to_string(), "");
        let lsd = BIN.with_order(DigitOrder::Lsd);
        // brute force: msd of (6,3) reversed, components swapped
        let msd = BIN.encode_tuple(&[6, 3]);
        let mut expect: Vec<Vec<u32>> = msd.digits.iter().map(|d| vec![d[1], d[0]]).collect();
        expect.reverse();
        assert_eq!(lsd.encode_tuple(&[3, 6]).digits, expect);
        assert_eq!(lsd.encode_tuple(&[3, 6]).to_string(), "[1,0][1,1][0,1]");
    }

    #[test]
    fn validity() {
        let v = BIN.validity_automaton(1);
        assert_eq!(v.num_states(), 1);
        assert!(v.is_accepting(0));
        let z = FIB.validity_automaton(1);
        assert!(!z.accepts(&[0, 1, 1]));
        // every no-11 string of length 4 is accepted, nothing else
        for bits in 0u32..16 {
            let w: Vec<usize> = (0..4).rev().map(|i| (bits >> i & 1) as usize).collect();
            assert_eq!(z.accepts(&w), bits & (bits >> 1) == 0, "{w:?}");
        }
        assert!(z.accepts(&[0, 1, 0, 1]));
    }

    #[test]
    fn binary_addition() {
        let add = BIN.addition_automaton();
        assert!(BIN.accepts(&add, &[2, 3, 5]));
        assert!(!BIN.accepts(&add, &[2, 3, 6]));
        for n in 0..=100 {
            assert!(BIN.accepts(&add, &[0, n, n]));
        }
    }

    #[test]
    fn zeckendorf_addition_exhaustive_small() {
        let add = FIB.addition_automaton();
        for x in 0..=60u64 {
            for y in 0..=60u64 {
                for z in 0..=130u64 {
                    assert_eq!(FIB.accepts(&add, &[x, y, z]), x + y == z, "{x}+{y}={z}");
                }
            }
        }
    }

    #[test]
    fn comparisons() {
        let eq = BIN.comparison_automaton(Comparison::Eq);
        for n in 0..=100 {
            assert!(BIN.accepts(&eq, &[n, n]));
        }
        let lt = BIN.comparison_automaton(Comparison::Lt);
        assert!(!BIN.accepts(&lt, &[6, 3]));
        assert!(BIN.accepts(&lt, &[3, 6]));
        let zlt = FIB.comparison_automaton(Comparison::Lt);
        let zle = FIB.comparison_automaton(Comparison::Le);
        for x in 0..=200 {
            for y in 0..=200 {
                assert_eq!(FIB.accepts(&zlt, &[x, y]), x < y);
                assert_eq!(FIB.accepts(&zle, &[x, y]), x <= y);
            }
        }
    }

    #[test]
    fn linear_with_constant_and_coefficients() {
        // 2x + 1 = y
        let a = BIN.linear_automaton(&[2, -1], 1, LinearRel::Eq);
        let z = FIB.linear_automaton(&[2, -1], 1, LinearRel::Eq);
        for x in 0..40 {
            for y in 0..90 {
                assert_eq!(BIN.accepts(&a, &[x, y]), 2 * x + 1 == y);
                assert_eq!(FIB.accepts(&z, &[x, y]), 2 * x + 1 == y);
            }
        }
        // x ≥ 5 as 5 - x ≤ 0, and the constant-only forms
        let ge5 = BIN.linear_automaton(&[-1], 5, LinearRel::Le);
        assert!(!BIN.accepts(&ge5, &[4]));
        assert!(BIN.accepts(&ge5, &[5]));
        let t = BIN.linear_automaton(&[], 0, LinearRel::Eq);
        assert!(t.accepts(&[]));
        let f = FIB.linear_automaton(&[], 1, LinearRel::Le);
        assert!(f.is_empty());
    }

    #[test]
    fn lsd_addition_is_reversal() {
        let lsd = BIN.with_order(DigitOrder::Lsd);
        let add = lsd.addition_automaton();
        for x in 0..30 {
            for y in 0..30 {
                assert!(lsd.accepts(&add, &[x, y, x + y]));
                assert!(!lsd.accepts(&add, &[x, y, x + y + 1]));
            }
        }
        let flsd = FIB.with_order(DigitOrder::Lsd);
        let fadd = flsd.addition_automaton();
        for x in 0..30 {
            for y in 0..30 {
                assert!(flsd.accepts(&fadd, &[x, y, x + y]));
                assert!(!flsd.accepts(&fadd, &[x, y, x + y + 2]));
            }
        }
    }

    #[test]
    fn system_names_round_trip() {
        for s in ["msd-2", "lsd-2", "msd-fib", "lsd-fib", "msd-4"] {
            assert_eq!(s.parse::<NumerationSystem>().unwrap().to_string(), s);
        }
        assert!("msd-1".parse::<NumerationSystem>().is_err());
        assert!("xyz".parse::<NumerationSystem>().is_err());
    }

    #[test]
    fn enumerate_pairs() {
        let lt = BIN.comparison_automaton(Comparison::Lt);
        let pairs = BIN.enumerate(&lt, 3);
        assert_eq!(pairs.len(), 6);
        assert_eq!(pairs[0], vec![0, 1]);
        let full = Dfa::constant(BIN.alphabet(1), true);
        let all: Vec<u64> = BIN.enumerate(&full, 5).into_iter().map(|v| v[0]).collect();
        assert_eq!(all, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn enumerate_finite_language() {
        // x < 5 over one component: finite
        let lt5 = BIN.linear_automaton(&[1], -4, LinearRel::Le);
        let vals = BIN.enumerate_finite(&lt5).unwrap();
        assert_eq!(vals, vec![vec![0], vec![1], vec![2], vec![3], vec![4]]);
        let ge5 = BIN.linear_automaton(&[-1], 5, LinearRel::Le);
        assert!(BIN.enumerate_finite(&ge5).is_none());
    }
}
