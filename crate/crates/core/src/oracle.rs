//! Brute-force word properties over explicit finite words, and factor
//! enumeration over stabilized prefixes of the built-in sequences. Slow on
//! purpose: everything here follows the definitions directly.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Binding, Compiler};
use crate::sequences::BuiltinSequence;

/// Number of (possibly overlapping) occurrences of `x` in `w`.
pub fn occurrences<T: PartialEq>(x: &[T], w: &[T]) -> usize {
    if x.len() > w.len() {
        return 0;
    }
    (0..=w.len() - x.len()).filter(|&i| &w[i..i + x.len()] == x).count()
}

pub fn is_palindrome<T: PartialEq>(x: &[T]) -> bool {
    x.iter().eq(x.iter().rev())
}

fn is_border<T: PartialEq>(x: &[T], b: usize) -> bool {
    x[..b] == x[x.len() - b..]
}

/// `|x| ≤ 1`, or some border occurs exactly twice.
pub fn is_closed<T: PartialEq>(x: &[T]) -> bool {
    x.len() <= 1 || (1..x.len()).any(|b| is_border(x, b) && occurrences(&x[..b], x) == 2)
}

/// `|x| ≤ 1`, or some privileged border occurs exactly twice.
pub fn is_privileged<T: PartialEq>(x: &[T]) -> bool {
    // every border is a prefix, so decide prefixes by increasing length
    let mut p = vec![true; x.len() + 1];
    for len in 2..=x.len() {
        let y = &x[..len];
        p[len] = (1..len).any(|b| p[b] && is_border(y, b) && occurrences(&y[..b], y) == 2);
    }
    p[x.len()]
}

/// For every `1 ≤ n ≤ |w|` some `x` with `1 ≤ |x| ≤ n` is a prefix of `w`
/// occurring once in its first `n` symbols and a suffix occurring once in
/// its last `n`.
pub fn has_property_p<T: PartialEq>(w: &[T]) -> bool {
    let len = w.len();
    (1..=len).all(|n| {
        (1..=n).any(|m| {
            is_border(w, m) && occurrences(&w[..m], &w[..n]) == 1 && occurrences(&w[len - m..], &w[len - n..]) == 1
        })
    })
}

/// Distinct palindromic factors, the empty word included.
pub fn palindromic_factors<T: Eq + Hash>(x: &[T]) -> HashSet<&[T]> {
    let mut out = HashSet::new();
    out.insert(&x[..0]);
    for i in 0..x.len() {
        for j in i + 1..=x.len() {
            if is_palindrome(&x[i..j]) {
                out.insert(&x[i..j]);
            }
        }
    }
    out
}

/// Rich: `|x| + 1` distinct palindromic factors.
pub fn is_rich<T: Eq + Hash>(x: &[T]) -> bool {
    palindromic_factors(x).len() == x.len() + 1
}

/// Rich: every prefix has a palindromic suffix occurring once in it.
pub fn is_rich_by_suffixes<T: PartialEq>(x: &[T]) -> bool {
    (1..=x.len()).all(|n| {
        let p = &x[..n];
        (1..=n).any(|s| is_palindrome(&p[n - s..]) && occurrences(&p[n - s..], p) == 1)
    })
}

fn factors_of_len<T: Eq + Hash>(x: &[T], m: usize) -> HashSet<&[T]> {
    if m > x.len() {
        return HashSet::new();
    }
    (0..=x.len() - m).map(|i| &x[i..i + m]).collect()
}

/// At most `m + 1` distinct factors of each length `m`.
pub fn is_trapezoidal<T: Eq + Hash>(x: &[T]) -> bool {
    (0..=x.len()).all(|m| factors_of_len(x, m).len() <= m + 1)
}

/// Trapezoidal: `|x| = R + K`.
pub fn is_trapezoidal_by_rk<T: Eq + Hash>(x: &[T]) -> bool {
    let s = FactorStats::of(x);
    x.len() == s.min_no_right_special + s.shortest_unrepeated_suffix
}

/// Distinct letters of `x`, sorted.
fn letters<T: Ord + Copy>(x: &[T]) -> Vec<T> {
    x.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Any two factors of equal length hold each letter a number of times
/// differing by at most one.
pub fn is_balanced<T: Ord + Copy>(x: &[T]) -> bool {
    let alphabet = letters(x);
    (1..=x.len()).all(|m| {
        alphabet.iter().all(|&a| {
            let counts = x.windows(m).map(|f| f.iter().filter(|&&c| c == a).count());
            let (lo, hi) = counts.fold((usize::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)));
            hi - lo <= 1
        })
    })
}

/// Binary words only: unbalanced iff `a v a` and `b v b` are factors for
/// a palindrome `v`. `None` on three or more letters.
pub fn is_balanced_coven_hedlund<T: Ord + Copy + Hash>(x: &[T]) -> Option<bool> {
    let alphabet = letters(x);
    match alphabet.len() {
        0 | 1 => return Some(true),
        2 => {}
        _ => return None,
    }
    let mut seen: HashSet<(&[T], T)> = HashSet::new();
    for i in 0..x.len() {
        for j in i + 2..=x.len() {
            let f = &x[i..j];
            let v = &f[1..f.len() - 1];
            if f[0] == f[f.len() - 1] && is_palindrome(v) {
                seen.insert((v, f[0]));
            }
        }
    }
    Some(!seen.iter().any(|&(v, c)| c == alphabet[0] && seen.contains(&(v, alphabet[1]))))
}

/// Per-length factor statistics of a finite word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorStats {
    /// indexed by length `0..=|w|`
    pub factors: Vec<usize>,
    pub palindromes: Vec<usize>,
    pub right_special: Vec<usize>,
    /// K: least length of a suffix occurring nowhere else
    pub shortest_unrepeated_suffix: usize,
    /// R: least length with no right-special factor
    pub min_no_right_special: usize,
}

impl FactorStats {
    pub fn of<T: Eq + Hash>(w: &[T]) -> Self {
        let n = w.len();
        let mut factors = Vec::with_capacity(n + 1);
        let mut palindromes = Vec::with_capacity(n + 1);
        let mut right_special = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let fs = factors_of_len(w, m);
            palindromes.push(fs.iter().filter(|f| is_palindrome(f)).count());
            factors.push(fs.len());
            let mut next: HashMap<&[T], HashSet<&T>> = HashMap::new();
            for i in 0..n.saturating_sub(m) {
                next.entry(&w[i..i + m]).or_default().insert(&w[i + m]);
            }
            right_special.push(next.values().filter(|s| s.len() >= 2).count());
        }
        let k = (0..=n).find(|&l| occurrences(&w[n - l..], w) == 1).unwrap_or(n);
        let r = (0..=n).find(|&l| right_special[l] == 0).unwrap_or(n);
        FactorStats {
            factors,
            palindromes,
            right_special,
            shortest_unrepeated_suffix: k,
            min_no_right_special: r,
        }
    }
}

/// Palindromic factors (the empty word included) of `prefix[..window]` such that
/// no `a x a` occurs in `prefix`.
pub fn maximal_palindromes<T: Ord + Copy + Hash>(prefix: &[T], window: usize) -> BTreeSet<Vec<T>> {
    let window = window.min(prefix.len());
    let ext: HashSet<&[T]> = (0..prefix.len())
        .flat_map(|i| (i + 2..=prefix.len()).map(move |j| (i, j)))
        .map(|(i, j)| &prefix[i..j])
        .filter(|f| f[0] == f[f.len() - 1] && is_palindrome(f))
        .map(|f| &f[1..f.len() - 1])
        .collect();
    palindromic_factors(&prefix[..window])
        .into_iter()
        .filter(|p| !ext.contains(p))
        .map(<[T]>::to_vec)
        .collect()
}

/// Distinct palindromes (empty included) in every prefix, by a palindromic
/// tree: `out[n]` is the count for the first `n` letters.
pub fn palindrome_counts<T: Copy + Eq + Hash>(w: &[T]) -> Vec<usize> {
    struct Node<T> {
        len: isize,
        link: usize,
        next: Vec<(T, usize)>,
    }
    // node 0 is the root of length -1, node 1 the empty palindrome
    let mut nodes: Vec<Node<T>> = vec![
        Node { len: -1, link: 0, next: Vec::new() },
        Node { len: 0, link: 0, next: Vec::new() },
    ];
    let edge = |n: &Node<T>, c: T| n.next.iter().find(|e| e.0 == c).map(|e| e.1);
    let mut last = 1;
    let mut out = Vec::with_capacity(w.len() + 1);
    out.push(1);
    for (i, &c) in w.iter().enumerate() {
        let fits = |v: usize, nodes: &[Node<T>]| {
            let j = i as isize - nodes[v].len - 1;
            j >= 0 && w[j as usize] == c
        };
        let mut cur = last;
        while !fits(cur, &nodes) {
            cur = nodes[cur].link;
        }
        last = match edge(&nodes[cur], c) {
            Some(t) => t,
            None => {
                let len = nodes[cur].len + 2;
                let link = if len == 1 {
                    1
                } else {
                    let mut l = nodes[cur].link;
                    while !fits(l, &nodes) {
                        l = nodes[l].link;
                    }
                    edge(&nodes[l], c).expect("suffix palindrome already present")
                };
                nodes.push(Node { len, link, next: Vec::new() });
                let id = nodes.len() - 1;
                nodes[cur].next.push((c, id));
                id
            }
        };
        out.push(nodes.len() - 1);
    }
    out
}

/// Distinct palindromes (empty included) in the length-`n` prefix.
pub fn count_palindromes_in_prefix(seq: BuiltinSequence, n: usize) -> usize {
    palindrome_counts(&seq.prefix(n))[n]
}

pub const DEFAULT_CAP: usize = 1 << 20;

/// Distinct factors of a built-in sequence, one length at a time. For
/// length `m` a prefix of `max(4m, 1024)` letters is doubled until the
/// doubling adds no new factor of that length.
pub struct FactorIndex {
    seq: BuiltinSequence,
    cap: usize,
    prefix: Vec<u32>,
}

impl FactorIndex {
    pub fn new(seq: BuiltinSequence, cap: usize) -> Self {
        FactorIndex {
            seq,
            cap,
            prefix: Vec::new(),
        }
    }

    pub fn sequence(&self) -> BuiltinSequence {
        self.seq
    }

    fn ensure(&mut self, len: usize) {
        if self.prefix.len() < len {
            self.prefix = self.seq.prefix(len.max(2 * self.prefix.len()));
        }
    }

    /// Sorted distinct factors of length `m`, with the prefix length that
    /// stabilized them.
    pub fn factors(&mut self, m: usize) -> Result<(Vec<Vec<u32>>, usize)> {
        let mut len = (4 * m).max(1024);
        loop {
            if 2 * len > self.cap {
                return Err(Error::NotStabilized { cap: self.cap });
            }
            self.ensure(2 * len);
            let p = &self.prefix;
            let mut set: FxHashSet<&[u32]> = (0..=len - m).map(|i| &p[i..i + m]).collect();
            let before = set.len();
            set.extend((len - m + 1..=2 * len - m).map(|i| &p[i..i + m]));
            if set.len() == before {
                let mut out: Vec<Vec<u32>> = (0..=len - m).map(|i| &p[i..i + m]).collect::<FxHashSet<_>>()
                    .into_iter()
                    .map(<[u32]>::to_vec)
                    .collect();
                out.sort();
                return Ok((out, len));
            }
            len *= 2;
        }
    }
}

/// Factor sets of each length `0..=max_len`, each stable under doubling
/// of the prefix it was read from.
#[derive(Clone, Debug)]
pub struct StableFactors {
    /// longest prefix any length needed
    pub prefix_len: usize,
    pub by_len: Vec<Vec<Vec<u32>>>,
}

pub fn stable_factors(seq: BuiltinSequence, max_len: usize, cap: usize) -> Result<StableFactors> {
    let mut index = FactorIndex::new(seq, cap);
    let mut by_len = Vec::with_capacity(max_len + 1);
    let mut prefix_len = 0;
    for m in 0..=max_len {
        let (f, len) = index.factors(m)?;
        prefix_len = prefix_len.max(len);
        by_len.push(f);
    }
    Ok(StableFactors { prefix_len, by_len })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    Any,
    Palindrome,
    Closed,
    Privileged,
    Rich,
    Trapezoidal,
    Balanced,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Any,
        Property::Palindrome,
        Property::Closed,
        Property::Privileged,
        Property::Rich,
        Property::Trapezoidal,
        Property::Balanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Any => "any",
            Property::Palindrome => "palindrome",
            Property::Closed => "closed",
            Property::Privileged => "privileged",
            Property::Rich => "rich",
            Property::Trapezoidal => "trapezoidal",
            Property::Balanced => "balanced",
        }
    }

    pub fn holds(self, x: &[u32]) -> bool {
        match self {
            Property::Any => true,
            Property::Palindrome => is_palindrome(x),
            Property::Closed => is_closed(x),
            Property::Privileged => is_privileged(x),
            Property::Rich => is_rich(x),
            Property::Trapezoidal => is_trapezoidal(x),
            Property::Balanced => is_balanced(x),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Format(format!("unknown property `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyCount {
    pub property: Property,
    /// indexed by length `0..=max_len`
    pub per_length: Vec<usize>,
    pub total: usize,
    pub longest: Option<usize>,
    pub prefix_len: usize,
}

/// Distinct factors of each length `≤ max_len` having `property`.
pub fn distinct_property_factors(seq: BuiltinSequence, property: Property, max_len: usize) -> Result<PropertyCount> {
    distinct_property_factors_capped(seq, property, max_len, DEFAULT_CAP)
}

pub fn distinct_property_factors_capped(
    seq: BuiltinSequence,
    property: Property,
    max_len: usize,
    cap: usize,
) -> Result<PropertyCount> {
    let stable = stable_factors(seq, max_len, cap)?;
    let per_length: Vec<usize> = stable
        .by_len
        .iter()
        .map(|set| set.iter().filter(|f| property.holds(f)).count())
        .collect();
    Ok(PropertyCount {
        property,
        total: per_length.iter().sum(),
        longest: per_length.iter().rposition(|&c| c > 0),
        per_length,
        prefix_len: stable.prefix_len,
    })
}

/// Maximal palindromes of length `≤ max_len`, decided on factor sets of
/// length `≤ max_len + 2` that are stable under prefix doubling.
pub fn stable_maximal_palindromes(seq: BuiltinSequence, max_len: usize) -> Result<BTreeSet<Vec<u32>>> {
    let stable = stable_factors(seq, max_len + 2, DEFAULT_CAP)?;
    let mut out = BTreeSet::new();
    for m in 0..=max_len {
        let ext = &stable.by_len[m + 2];
        for p in stable.by_len[m].iter().filter(|p| is_palindrome(p)) {
            let extended = ext.iter().any(|f| f[0] == f[m + 1] && &f[1..=m] == p.as_slice());
            if !extended {
                out.insert(p.clone());
            }
        }
    }
    Ok(out)
}

/// Oracle for a library predicate `P(i,n)` that depends only on the
/// factor `x[i..i+n-1]`.
pub fn factor_predicate(name: &str) -> Option<fn(&[u32]) -> bool> {
    Some(match name {
        "Pal" => |x| is_palindrome(x),
        "Closed" => |x| is_closed(x),
        "Priv" | "Priv'" => |x| is_privileged(x),
        "Rich" => |x| is_rich(x),
        "Trap" => |x| is_trapezoidal(x),
        "Unbal" => |x| !is_balanced(x),
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub i: u64,
    pub n: u64,
    pub engine: bool,
    pub oracle: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub sequence: String,
    pub predicate: String,
    pub bound: u64,
    pub pairs: u64,
    pub states: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Compares the compiled `P(i,n)` with the oracle on every `i + n ≤ bound`.
pub fn crosscheck(compiler: &mut Compiler, seq: BuiltinSequence, predicate: &str, bound: u64) -> Result<CrossCheck> {
    let check = factor_predicate(predicate)
        .ok_or_else(|| Error::UnknownMacro(format!("{predicate} (no oracle for it)")))?;
    let compiled = compiler.compile_str(&format!("${predicate}(i,n)"), &Binding::new(seq))?;
    if compiled.vars != ["i", "n"] {
        return Err(Error::MalformedAutomaton(format!(
            "expected free variables i, n; got {:?}",
            compiled.vars
        )));
    }
    let accepted: HashSet<(u64, u64)> = compiled.enumerate(bound).into_iter().map(|v| (v[0], v[1])).collect();
    let prefix = seq.prefix(bound as usize);
    let mut pairs = 0;
    let mut mismatches = Vec::new();
    for n in 0..=bound {
        for i in 0..=bound - n {
            pairs += 1;
            let engine = accepted.contains(&(i, n));
            let oracle = check(&prefix[i as usize..(i + n) as usize]);
            if engine != oracle {
                mismatches.push(Mismatch { i, n, engine, oracle });
            }
        }
    }
    Ok(CrossCheck {
        sequence: seq.name().to_string(),
        predicate: predicate.to_string(),
        bound,
        pairs,
        states: compiled.dfa.num_states_without_sink(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> &[u8] {
        s.as_bytes()
    }

    #[test]
    fn occurrence_counts() {
        assert_eq!(occurrences(b("on"), b("confrontation")), 3);
        assert_eq!(occurrences(b(""), b("abc")), 4);
        assert_eq!(occurrences(b("aa"), b("aaaa")), 3);
        assert_eq!(occurrences(b("abcd"), b("abc")), 0);
    }

    #[test]
    fn palindromes() {
        assert!(is_palindrome(b("radar")));
        assert!(is_palindrome(b("")));
        assert!(!is_palindrome(b("drawer")));
        let r: Vec<u8> = b("drawer").iter().rev().copied().collect();
        assert_eq!(r, b("reward"));
    }

    #[test]
    fn closed_and_privileged() {
        assert!(is_closed(b("abracadabra")));
        assert!(is_closed(b("alfalfa")));
        assert!(!is_closed(b("ab")));
        assert!(is_closed(b("mama")));
        assert!(!is_privileged(b("mama")));
        assert!(!has_property_p(b("mama")));
        assert!(is_privileged(b("a")) && is_privileged(b("aa")));
        assert!(has_property_p(b("")));
    }

    #[test]
    fn rich_words() {
        let m = b("Mississippi");
        let pals = palindromic_factors(m);
        assert_eq!(pals.len() - 1, 11);
        for p in ["M", "i", "s", "p", "ss", "pp", "sis", "issi", "ippi", "ssiss", "ississi"] {
            assert!(pals.contains(b(p)), "{p}");
        }
        assert!(is_rich(m) && is_rich_by_suffixes(m));
        assert!(is_rich(b("")) && is_rich_by_suffixes(b("")));
        assert!(!is_rich(b("aababbaa")));
    }

    #[test]
    fn trapezoidal_and_balanced() {
        assert!(is_trapezoidal(b("deeded")) && is_trapezoidal_by_rk(b("deeded")));
        assert!(!is_trapezoidal(b("abca")));
        assert!(is_balanced(b("banana")));
        assert!(!is_balanced(b("0011")));
        assert_eq!(is_balanced_coven_hedlund(b("0011")), Some(false));
        assert_eq!(is_balanced_coven_hedlund(b("abc")), None);
    }

    #[test]
    fn factor_stats_of_deeded() {
        let s = FactorStats::of(b("deeded"));
        assert_eq!(s.factors, vec![1, 2, 3, 4, 3, 2, 1]);
        assert_eq!(s.shortest_unrepeated_suffix, 3);
        assert_eq!(s.min_no_right_special, 3);
    }

    #[test]
    fn palindrome_tree_matches_sets() {
        let words: [&[u8]; 4] = [b("01101001100101101001011001101001"), b("abacabadabacaba"), b("aaaa"), b("")];
        for w in words {
            let counts = palindrome_counts(w);
            for n in 0..=w.len() {
                assert_eq!(counts[n], palindromic_factors(&w[..n]).len(), "{n}");
            }
        }
        assert_eq!(count_palindromes_in_prefix(BuiltinSequence::ThueMorse, 0), 1);
        assert_eq!(count_palindromes_in_prefix(BuiltinSequence::ThueMorse, 8), 9);
    }

    #[test]
    fn maximal_palindromes_on_finite_words() {
        // in 0110: "11" extends to "0110", "0110" cannot extend
        let got = maximal_palindromes(&[0u32, 1, 1, 0], 4);
        assert!(got.contains(&vec![0, 1, 1, 0]));
        assert!(!got.contains(&vec![1, 1]));
    }

    #[test]
    fn property_names() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
        }
        assert!("bogus".parse::<Property>().is_err());
    }
}
