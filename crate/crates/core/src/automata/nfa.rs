use rustc_hash::FxHashMap;

use super::alphabet::Alphabet;
use super::dfa::Dfa;

/// Nondeterministic automaton with a set of initial states. Transitions
/// are stored compactly: the targets of `(state, letter)` are
/// `targets[offsets[i]..offsets[i + 1]]` with `i = state * sigma + letter`.
#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    initial: Vec<u32>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    accepting: Vec<bool>,
}

impl Nfa {
    /// `edges` lists `(from, letter, to)` triples in any order.
    pub fn from_edges(
        alphabet: Alphabet,
        num_states: usize,
        initial: Vec<u32>,
        edges: impl IntoIterator<Item = (u32, usize, u32)>,
        accepting: Vec<bool>,
    ) -> Nfa {
        let sigma = alphabet.size();
        let mut buckets: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(s, a, t)| ((s as usize * sigma + a) as u32, t))
            .collect();
        buckets.sort_unstable();
        buckets.dedup();
        let mut offsets = vec![0u32; num_states * sigma + 1];
        for &(k, _) in &buckets {
            offsets[k as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let targets = buckets.into_iter().map(|(_, t)| t).collect();
        Nfa {
            alphabet,
            initial,
            offsets,
            targets,
            accepting,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn successors(&self, state: u32, letter: usize) -> &[u32] {
        let i = state as usize * self.alphabet.size() + letter;
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// States reachable from `from` using only letters in `letters`.
    pub fn closure(&self, from: &[u32], letters: &[usize]) -> Vec<u32> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<u32> = Vec::new();
        for &s in from {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &a in letters {
                for &t in self.successors(s, a) {
                    if !seen[t as usize] {
                        seen[t as usize] = true;
                        stack.push(t);
                    }
                }
            }
        }
        (0..self.num_states() as u32).filter(|&s| seen[s as usize]).collect()
    }

    pub fn set_initial(&mut self, initial: Vec<u32>) {
        self.initial = initial;
    }

    pub fn set_accepting(&mut self, accepting: Vec<bool>) {
        self.accepting = accepting;
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    /// Subset construction. The empty subset becomes the rejecting sink.
    pub fn determinize(&self) -> Dfa {
        let sigma = self.alphabet.size();
        let mut start = self.initial.clone();
        start.sort_unstable();
        start.dedup();
        let mut ids: FxHashMap<Box<[u32]>, u32> = FxHashMap::default();
        let mut subsets: Vec<Box<[u32]>> = vec![start.clone().into_boxed_slice()];
        ids.insert(start.into_boxed_slice(), 0);
        let mut trans: Vec<u32> = Vec::new();
        let mut stamp = vec![u32::MAX; self.num_states()];
        let mut buf: Vec<u32> = Vec::new();
        let mut head = 0;
        let mut round = 0u32;
        while head < subsets.len() {
            let cur = subsets[head].clone();
            head += 1;
            for a in 0..sigma {
                buf.clear();
                for &s in cur.iter() {
                    for &t in self.successors(s, a) {
                        if stamp[t as usize] != round {
                            stamp[t as usize] = round;
                            buf.push(t);
                        }
                    }
                }
                round = round.wrapping_add(1);
                if round == u32::MAX {
                    stamp.iter_mut().for_each(|x| *x = u32::MAX);
                    round = 0;
                }
                buf.sort_unstable();
                let id = match ids.get(buf.as_slice()) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len() as u32;
                        let key: Box<[u32]> = buf.clone().into_boxed_slice();
                        ids.insert(key.clone(), id);
                        subsets.push(key);
                        id
                    }
                };
                trans.push(id);
            }
        }
        let accepting = subsets
            .iter()
            .map(|set| set.iter().any(|&s| self.accepting[s as usize]))
            .collect();
        Dfa::new(self.alphabet, 0, trans, accepting).expect("subset construction is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinize_third_from_last_is_one() {
        // classic NFA: (0|1)* 1 (0|1) (0|1)
        let alpha = Alphabet::new(1, 2);
        let mut edges = vec![(0, 0, 0), (0, 1, 0), (0, 1, 1)];
        for s in 1..3 {
            edges.push((s, 0, s + 1));
            edges.push((s, 1, s + 1));
        }
        let nfa = Nfa::from_edges(alpha, 4, vec![0], edges, vec![false, false, false, true]);
        let dfa = nfa.determinize().minimize();
        assert_eq!(dfa.num_states(), 8);
        assert!(dfa.accepts(&[1, 0, 0]));
        assert!(dfa.accepts(&[0, 1, 1, 1]));
        assert!(!dfa.accepts(&[0, 1, 1]));
    }
}
