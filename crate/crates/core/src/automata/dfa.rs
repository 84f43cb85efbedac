use std::collections::VecDeque;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use super::alphabet::Alphabet;
use super::partition;
use crate::error::{Error, Result};

/// Complete deterministic automaton over a tuple-digit alphabet.
///
/// `trans[s * alphabet.size() + letter]` is the successor of `s`. Every
/// state has a successor on every letter; rejection is expressed by an
/// explicit sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: u32,
    trans: Vec<u32>,
    accepting: Vec<bool>,
}

/// Boolean connective applied pointwise by [`Dfa::product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Implies,
    Iff,
}

impl BoolOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Implies => !a || b,
            BoolOp::Iff => a == b,
        }
    }
}

/// Breadth-first exploration of the states reachable from `start`; state
/// `i` of the result is `states[i]`, with `start` numbered 0.
pub(crate) fn explore_states<K, F>(sigma: usize, start: K, mut step: F) -> (Vec<K>, Vec<u32>)
where
    K: Clone + Eq + Hash,
    F: FnMut(&K, usize) -> K,
{
    let mut ids: FxHashMap<K, u32> = FxHashMap::default();
    let mut states = vec![start.clone()];
    ids.insert(start, 0);
    let mut trans = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let cur = states[head].clone();
        head += 1;
        for a in 0..sigma {
            let next = step(&cur, a);
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    ids.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            trans.push(id);
        }
    }
    (states, trans)
}

impl Dfa {
    pub fn new(alphabet: Alphabet, initial: u32, trans: Vec<u32>, accepting: Vec<bool>) -> Result<Self> {
        let n = accepting.len();
        if n == 0 {
            return Err(Error::MalformedAutomaton("no states".into()));
        }
        if trans.len() != n * alphabet.size() {
            return Err(Error::MalformedAutomaton(format!(
                "expected {} transitions, found {}",
                n * alphabet.size(),
                trans.len()
            )));
        }
        if initial as usize >= n || trans.iter().any(|&t| t as usize >= n) {
            return Err(Error::MalformedAutomaton("state index out of range".into()));
        }
        Ok(Dfa {
            alphabet,
            initial,
            trans,
            accepting,
        })
    }

    /// One-state automaton accepting everything (`true`) or nothing.
    pub fn constant(alphabet: Alphabet, value: bool) -> Self {
        Dfa {
            alphabet,
            initial: 0,
            trans: vec![0; alphabet.size()],
            accepting: vec![value],
        }
    }

    /// Builds the automaton reachable from `start` under `step`, discovering
    /// states breadth-first.
    pub fn explore<K, F, A>(alphabet: Alphabet, start: K, step: F, accept: A) -> Self
    where
        K: Clone + Eq + Hash,
        F: FnMut(&K, usize) -> K,
        A: Fn(&K) -> bool,
    {
        let (states, trans) = explore_states(alphabet.size(), start, step);
        let accepting = states.iter().map(&accept).collect();
        Dfa {
            alphabet,
            initial: 0,
            trans,
            accepting,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.alphabet.arity
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn next(&self, state: u32, letter: usize) -> u32 {
        self.trans[state as usize * self.alphabet.size() + letter]
    }

    pub fn is_accepting(&self, state: u32) -> bool {
        self.accepting[state as usize]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = u32> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(s, _)| s as u32)
    }

    pub fn run(&self, letters: &[usize]) -> u32 {
        letters.iter().fold(self.initial, |s, &l| self.next(s, l))
    }

    pub fn accepts(&self, letters: &[usize]) -> bool {
        self.is_accepting(self.run(letters))
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let sigma = self.alphabet.size();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n {
            for a in 0..sigma {
                let t = self.trans[s * sigma + a] as usize;
                if preds[t].last() != Some(&(s as u32)) {
                    preds[t].push(s as u32);
                }
            }
        }
        let mut live = self.accepting.clone();
        let mut queue: VecDeque<u32> = self.accepting_states().collect();
        while let Some(t) = queue.pop_front() {
            for &p in &preds[t as usize] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    queue.push_back(p);
                }
            }
        }
        live
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            alphabet: self.alphabet,
            initial: self.initial,
            trans: self.trans.clone(),
            accepting: self.accepting.iter().map(|a| !a).collect(),
        }
    }

    /// Pointwise combination of two languages over the same alphabet.
    pub fn product(&self, other: &Dfa, op: BoolOp) -> Result<Dfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(
                self.alphabet.to_string(),
                other.alphabet.to_string(),
            ));
        }
        let sigma = self.alphabet.size();
        // pairs whose verdict no longer depends on the suffix collapse into sinks
        let live_a = self.live_states();
        let live_b = other.live_states();
        let univ_a = self.complement().live_states();
        let univ_b = other.complement().live_states();
        let decided = |p: u32, q: u32| -> Option<bool> {
            let (p, q) = (p as usize, q as usize);
            let a_const = if !live_a[p] {
                Some(false)
            } else if !univ_a[p] {
                Some(true)
            } else {
                None
            };
            let b_const = if !live_b[q] {
                Some(false)
            } else if !univ_b[q] {
                Some(true)
            } else {
                None
            };
            match (a_const, b_const) {
                (Some(x), Some(y)) => Some(op.apply(x, y)),
                (Some(x), None) => match (op, x) {
                    (BoolOp::And, false) => Some(false),
                    (BoolOp::Or, true) => Some(true),
                    (BoolOp::Implies, false) => Some(true),
                    _ => None,
                },
                (None, Some(y)) => match (op, y) {
                    (BoolOp::And, false) => Some(false),
                    (BoolOp::Or, true) | (BoolOp::Implies, true) => Some(true),
                    _ => None,
                },
                (None, None) => None,
            }
        };

        #[derive(Clone, PartialEq, Eq, Hash)]
        enum Pair {
            Sink(bool),
            Live(u32, u32),
        }
        let classify = |p: u32, q: u32| match decided(p, q) {
            Some(v) => Pair::Sink(v),
            None => Pair::Live(p, q),
        };
        let start = classify(self.initial, other.initial);
        let dfa = Dfa::explore(
            self.alphabet,
            start,
            |pair, a| match *pair {
                Pair::Sink(v) => Pair::Sink(v),
                Pair::Live(p, q) => classify(
                    self.trans[p as usize * sigma + a],
                    other.trans[q as usize * sigma + a],
                ),
            },
            |pair| match *pair {
                Pair::Sink(v) => v,
                Pair::Live(p, q) => op.apply(self.accepting[p as usize], other.accepting[q as usize]),
            },
        );
        Ok(dfa)
    }

    /// Re-indexes components: component `c` of `self` becomes component
    /// `positions[c]` of an alphabet with `arity` components. Components not
    /// hit by `positions` are unconstrained; several old components may map
    /// onto one new component, which then forces their digits to agree.
    pub fn remap(&self, arity: usize, positions: &[usize]) -> Dfa {
        assert_eq!(positions.len(), self.arity());
        let new_alpha = Alphabet::new(arity, self.alphabet.radix);
        let old_sigma = self.alphabet.size();
        let new_sigma = new_alpha.size();
        // letters of the new alphabet whose merged components disagree go to a sink
        let mut letter_map: Vec<Option<usize>> = Vec::with_capacity(new_sigma);
        for l in 0..new_sigma {
            let digits = new_alpha.decode(l);
            let old: Vec<u32> = positions.iter().map(|&p| digits[p]).collect();
            letter_map.push(Some(self.alphabet.encode(&old)));
        }
        let merged = {
            let mut seen = positions.to_vec();
            seen.sort_unstable();
            seen.windows(2).any(|w| w[0] == w[1])
        };
        if merged {
            // a letter is consistent iff re-encoding the old letter reproduces
            // every merged component
            for (l, slot) in letter_map.iter_mut().enumerate() {
                let digits = new_alpha.decode(l);
                let ok = positions
                    .iter()
                    .enumerate()
                    .all(|(c, &p)| positions.iter().enumerate().all(|(c2, &p2)| p != p2 || c == c2 || digits[p] == digits[p2]));
                if !ok {
                    *slot = None;
                }
            }
        }
        let n = self.num_states();
        let has_sink = letter_map.iter().any(|m| m.is_none());
        let sink = n as u32;
        let total = n + has_sink as usize;
        let mut trans = Vec::with_capacity(total * new_sigma);
        for s in 0..n {
            for m in &letter_map {
                trans.push(match m {
                    Some(old) => self.trans[s * old_sigma + old],
                    None => sink,
                });
            }
        }
        let mut accepting = self.accepting.clone();
        if has_sink {
            trans.extend(std::iter::repeat_n(sink, new_sigma));
            accepting.push(false);
        }
        Dfa {
            alphabet: new_alpha,
            initial: self.initial,
            trans,
            accepting,
        }
    }

    /// Minimal complete automaton for the same language, states numbered in
    /// breadth-first order from the initial state.
    pub fn minimize(&self) -> Dfa {
        let sigma = self.alphabet.size();
        let n = self.num_states();
        let (map, order) = partition::bfs_order(n, sigma, &self.trans, self.initial);
        let m = order.len();
        let mut trans = Vec::with_capacity(m * sigma);
        for &s in &order {
            for a in 0..sigma {
                trans.push(map[self.trans[s as usize * sigma + a] as usize]);
            }
        }
        let labels: Vec<u32> = order
            .iter()
            .map(|&s| self.accepting[s as usize] as u32)
            .collect();
        let blocks = partition::refine(m, sigma, &trans, &labels);
        let nb = blocks.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        let mut qtrans = vec![0u32; nb * sigma];
        let mut qacc = vec![false; nb];
        for s in 0..m {
            let b = blocks[s] as usize;
            qacc[b] = labels[s] == 1;
            for a in 0..sigma {
                qtrans[b * sigma + a] = blocks[trans[s * sigma + a] as usize];
            }
        }
        let init = blocks[0];
        let (cmap, corder) = partition::bfs_order(nb, sigma, &qtrans, init);
        let mut ftrans = Vec::with_capacity(corder.len() * sigma);
        for &b in &corder {
            for a in 0..sigma {
                ftrans.push(cmap[qtrans[b as usize * sigma + a] as usize]);
            }
        }
        let facc = corder.iter().map(|&b| qacc[b as usize]).collect();
        Dfa {
            alphabet: self.alphabet,
            initial: 0,
            trans: ftrans,
            accepting: facc,
        }
    }

    /// `None` when the language is empty, otherwise a shortest accepted word.
    pub fn shortest_accepted(&self) -> Option<Vec<usize>> {
        let sigma = self.alphabet.size();
        let n = self.num_states();
        let mut parent: Vec<Option<(u32, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[self.initial as usize] = true;
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            if self.accepting[s as usize] {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some((p, a)) = parent[cur as usize] {
                    word.push(a);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for a in 0..sigma {
                let t = self.trans[s as usize * sigma + a];
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((s, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_accepted().is_none()
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(
                self.alphabet.to_string(),
                other.alphabet.to_string(),
            ));
        }
        Ok(self.minimize() == other.minimize())
    }

    /// Number of states of the minimal automaton, not counting a rejecting
    /// sink if it has one.
    pub fn num_states_without_sink(&self) -> usize {
        let live = self.live_states();
        self.num_states() - live.iter().filter(|l| !**l).count()
    }

    /// Whether the language is finite. Only meaningful on trimmed input:
    /// cycles among live states reachable from the initial state are what
    /// make a language infinite.
    pub fn has_live_cycle(&self) -> Option<Vec<u32>> {
        let sigma = self.alphabet.size();
        let live = self.live_states();
        let n = self.num_states();
        // iterative DFS with colors
        let mut color = vec![0u8; n];
        if !live[self.initial as usize] {
            return None;
        }
        let mut stack: Vec<(u32, usize)> = vec![(self.initial, 0)];
        color[self.initial as usize] = 1;
        while let Some(top) = stack.len().checked_sub(1) {
            let (s, a) = stack[top];
            if a == sigma {
                color[s as usize] = 2;
                stack.pop();
                continue;
            }
            stack[top].1 += 1;
            let t = self.trans[s as usize * sigma + a];
            if !live[t as usize] {
                continue;
            }
            match color[t as usize] {
                0 => {
                    color[t as usize] = 1;
                    stack.push((t, 0));
                }
                1 => {
                    let start = stack.iter().position(|&(q, _)| q == t).unwrap();
                    return Some(stack[start..].iter().map(|&(q, _)| q).collect());
                }
                _ => {}
            }
        }
        None
    }

    /// Letter-by-letter successor relation as an NFA-friendly view.
    pub(crate) fn parts(&self) -> (Alphabet, u32, &[u32], &[bool]) {
        (self.alphabet, self.initial, &self.trans, &self.accepting)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binary msd-first "value ≡ r (mod m)" automaton.
    pub(crate) fn residue(m: u32, r: u32) -> Dfa {
        let alpha = Alphabet::new(1, 2);
        Dfa::explore(alpha, 0u32, |&s, a| (2 * s + a as u32) % m, |&s| s == r)
    }

    fn bits(mut n: u32) -> Vec<usize> {
        let mut out = Vec::new();
        while n > 0 {
            out.push((n & 1) as usize);
            n >>= 1;
        }
        out.reverse();
        out
    }

    #[test]
    fn product_and_complement_is_empty() {
        let a = residue(3, 1);
        let p = a.product(&a.complement(), BoolOp::And).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.minimize().num_states(), 1);
    }

    #[test]
    fn product_or_is_idempotent() {
        let a = residue(5, 2);
        let p = a.product(&a, BoolOp::Or).unwrap();
        assert!(p.equivalent(&a).unwrap());
    }

    #[test]
    fn even_and_multiple_of_three_gives_multiples_of_six() {
        let p = residue(2, 0).product(&residue(3, 0), BoolOp::And).unwrap().minimize();
        for n in 0..=1000u32 {
            assert_eq!(p.accepts(&bits(n)), n % 6 == 0, "n = {n}");
        }
    }

    #[test]
    fn complement_twice_is_identity() {
        let a = residue(7, 3);
        assert!(a.complement().complement().equivalent(&a).unwrap());
        let empty = Dfa::constant(Alphabet::new(1, 2), false);
        let full = empty.complement();
        assert!(full.accepts(&[0, 1, 1]));
        assert!(full.accepts(&[]));
    }

    #[test]
    fn minimize_merges_equivalent_constructions() {
        let a = residue(2, 0).minimize();
        let b = residue(4, 0)
            .product(&residue(4, 2), BoolOp::Or)
            .unwrap()
            .minimize();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a, b);
        assert_eq!(a.minimize(), a);
    }

    #[test]
    fn shortest_witness() {
        let a = residue(5, 3);
        let w = a.shortest_accepted().unwrap();
        assert_eq!(w, vec![1, 1]);
        assert!(Dfa::constant(Alphabet::new(2, 2), false).is_empty());
        assert_eq!(
            Dfa::constant(Alphabet::new(2, 2), true).shortest_accepted(),
            Some(vec![])
        );
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let a = residue(2, 0);
        let b = Dfa::constant(Alphabet::new(2, 2), true);
        assert!(matches!(a.product(&b, BoolOp::And), Err(Error::AlphabetMismatch(..))));
        assert!(a.equivalent(&b).is_err());
    }

    #[test]
    fn remap_merging_components_forces_equality() {
        // accepts everything over pairs, then merge both onto one component
        let alpha = Alphabet::new(2, 2);
        let eq = Dfa::explore(alpha, true, |&ok, a| ok && alpha.digit(a, 0) == alpha.digit(a, 1), |&ok| ok);
        let diag = eq.remap(1, &[0, 0]).minimize();
        assert_eq!(diag.num_states(), 1);
        assert!(diag.accepts(&[1, 0, 1]));
        let spread = residue(3, 0).remap(2, &[1]).minimize();
        // first component is free
        let l = Alphabet::new(2, 2);
        assert!(spread.accepts(&[l.encode(&[1, 1]), l.encode(&[0, 1])]));
    }
}
