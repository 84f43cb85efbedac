use std::hash::Hash;

use super::alphabet::Alphabet;
use super::dfa::{explore_states, Dfa};
use super::partition;
use crate::error::{Error, Result};

/// Deterministic automaton with output: reads the digits of `n` and emits
/// the symbol attached to the state it stops in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfao {
    alphabet: Alphabet,
    initial: u32,
    trans: Vec<u32>,
    output: Vec<u32>,
}

impl Dfao {
    pub fn new(alphabet: Alphabet, initial: u32, trans: Vec<u32>, output: Vec<u32>) -> Result<Self> {
        let n = output.len();
        if n == 0 || trans.len() != n * alphabet.size() {
            return Err(Error::MalformedAutomaton(format!(
                "{} states need {} transitions, found {}",
                n,
                n * alphabet.size(),
                trans.len()
            )));
        }
        if initial as usize >= n || trans.iter().any(|&t| t as usize >= n) {
            return Err(Error::MalformedAutomaton("state index out of range".into()));
        }
        Ok(Dfao {
            alphabet,
            initial,
            trans,
            output,
        })
    }

    pub fn explore<K, F, O>(alphabet: Alphabet, start: K, step: F, output: O) -> Dfao
    where
        K: Clone + Eq + Hash,
        F: FnMut(&K, usize) -> K,
        O: Fn(&K) -> u32,
    {
        let (states, trans) = explore_states(alphabet.size(), start, step);
        Dfao {
            alphabet,
            initial: 0,
            trans,
            output: states.iter().map(&output).collect(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.output.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn next(&self, state: u32, letter: usize) -> u32 {
        self.trans[state as usize * self.alphabet.size() + letter]
    }

    pub fn output_of(&self, state: u32) -> u32 {
        self.output[state as usize]
    }

    pub fn outputs(&self) -> Vec<u32> {
        let mut out = self.output.clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn eval(&self, letters: &[usize]) -> u32 {
        let s = letters.iter().fold(self.initial, |s, &l| self.next(s, l));
        self.output[s as usize]
    }

    pub fn minimize(&self) -> Dfao {
        let sigma = self.alphabet.size();
        let (map, order) = partition::bfs_order(self.num_states(), sigma, &self.trans, self.initial);
        let m = order.len();
        let mut trans = Vec::with_capacity(m * sigma);
        for &s in &order {
            for a in 0..sigma {
                trans.push(map[self.trans[s as usize * sigma + a] as usize]);
            }
        }
        let labels: Vec<u32> = order.iter().map(|&s| self.output[s as usize]).collect();
        let blocks = partition::refine(m, sigma, &trans, &labels);
        let nb = blocks.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        let mut qtrans = vec![0u32; nb * sigma];
        let mut qout = vec![0u32; nb];
        for s in 0..m {
            let b = blocks[s] as usize;
            qout[b] = labels[s];
            for a in 0..sigma {
                qtrans[b * sigma + a] = blocks[trans[s * sigma + a] as usize];
            }
        }
        let (cmap, corder) = partition::bfs_order(nb, sigma, &qtrans, blocks[0]);
        let mut ftrans = Vec::with_capacity(corder.len() * sigma);
        for &b in &corder {
            for a in 0..sigma {
                ftrans.push(cmap[qtrans[b as usize * sigma + a] as usize]);
            }
        }
        Dfao {
            alphabet: self.alphabet,
            initial: 0,
            trans: ftrans,
            output: corder.iter().map(|&b| qout[b as usize]).collect(),
        }
    }

    /// Automaton reading words in the opposite order with the same outputs.
    ///
    /// After reading `u` the new automaton is in the state `q ↦ out(δ(q, uᴿ))`,
    /// a function from old states to outputs; these are finitely many.
    pub fn reverse(&self) -> Dfao {
        let sigma = self.alphabet.size();
        let start: Vec<u32> = self.output.clone();
        let init = self.initial as usize;
        Dfao::explore(
            self.alphabet,
            start,
            |h, a| {
                (0..self.num_states())
                    .map(|q| h[self.trans[q * sigma + a] as usize])
                    .collect()
            },
            |h| h[init],
        )
        .minimize()
    }

    /// Accepts `(a, b)` pairs with equal outputs, read in lockstep.
    pub fn pair_automaton(&self, other: &Dfao, equal: bool) -> Result<Dfa> {
        if self.alphabet != other.alphabet || self.alphabet.arity != 1 {
            return Err(Error::AlphabetMismatch(
                self.alphabet.to_string(),
                other.alphabet.to_string(),
            ));
        }
        let alpha = Alphabet::new(2, self.alphabet.radix);
        let dfa = Dfa::explore(
            alpha,
            (self.initial, other.initial),
            |&(p, q), l| {
                (
                    self.next(p, alpha.digit(l, 0) as usize),
                    other.next(q, alpha.digit(l, 1) as usize),
                )
            },
            |&(p, q)| (self.output_of(p) == other.output_of(q)) == equal,
        );
        Ok(dfa.minimize())
    }

    /// Accepts the inputs whose output is `symbol`.
    pub fn value_automaton(&self, symbol: u32) -> Dfa {
        Dfa::new(
            self.alphabet,
            self.initial,
            self.trans.clone(),
            self.output.iter().map(|&o| o == symbol).collect(),
        )
        .expect("same shape as the Dfao")
        .minimize()
    }
}
