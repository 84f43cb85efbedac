//! Projection and reversal: the operations that go through an NFA.

use super::alphabet::Alphabet;
use super::dfa::Dfa;
use super::nfa::Nfa;
use crate::numeration::DigitOrder;

impl Dfa {
    /// Erases component `coord`, as an NFA over the remaining components.
    pub fn erase(&self, coord: usize) -> Nfa {
        let (alpha, initial, trans, accepting) = self.parts();
        assert!(coord < alpha.arity, "no component {coord}");
        let new_alpha = Alphabet::new(alpha.arity - 1, alpha.radix);
        let sigma = alpha.size();
        let mut old_to_new = Vec::with_capacity(sigma);
        for l in 0..sigma {
            let mut digits = alpha.decode(l);
            digits.remove(coord);
            old_to_new.push(new_alpha.encode(&digits));
        }
        let n = self.num_states();
        let edges = (0..n).flat_map(|s| {
            let old_to_new = &old_to_new;
            (0..sigma).map(move |l| (s as u32, old_to_new[l], trans[s * sigma + l]))
        });
        Nfa::from_edges(new_alpha, n, vec![initial], edges, accepting.to_vec())
    }

    /// Existential projection of component `coord`.
    ///
    /// A witness may need more digits than the remaining components, so
    /// the result is closed under padding: extra steps where every kept
    /// component reads 0 are absorbed at the most-significant end (initial
    /// closure for msd-first, accepting closure for lsd-first).
    pub fn project(&self, coord: usize, order: DigitOrder) -> Dfa {
        let mut nfa = self.erase(coord);
        let zero = [0usize];
        match order {
            DigitOrder::Msd => {
                let init = nfa.closure(&[self.initial()], &zero);
                nfa.set_initial(init);
            }
            DigitOrder::Lsd => {
                // a state accepts if a zero-padded suffix leads to acceptance
                let rev = nfa.reverse();
                let accepting_now: Vec<u32> = (0..nfa.num_states() as u32)
                    .filter(|&s| nfa.accepting()[s as usize])
                    .collect();
                let reach = rev.closure(&accepting_now, &zero);
                let mut acc = vec![false; nfa.num_states()];
                for s in reach {
                    acc[s as usize] = true;
                }
                nfa.set_accepting(acc);
            }
        }
        nfa.determinize().minimize()
    }

    /// Automaton for the reversed language.
    pub fn reverse(&self) -> Dfa {
        let (alpha, initial, trans, accepting) = self.parts();
        let sigma = alpha.size();
        let n = self.num_states();
        let edges = (0..n).flat_map(|s| (0..sigma).map(move |l| (trans[s * sigma + l], l, s as u32)));
        let starts: Vec<u32> = (0..n as u32).filter(|&s| accepting[s as usize]).collect();
        let mut acc = vec![false; n];
        acc[initial as usize] = true;
        Nfa::from_edges(alpha, n, starts, edges, acc)
            .determinize()
            .minimize()
    }
}

impl Nfa {
    pub fn reverse(&self) -> Nfa {
        let alpha = self.alphabet();
        let sigma = alpha.size();
        let n = self.num_states();
        let mut edges = Vec::new();
        for s in 0..n as u32 {
            for a in 0..sigma {
                for &t in self.successors(s, a) {
                    edges.push((t, a, s));
                }
            }
        }
        let starts: Vec<u32> = (0..n as u32).filter(|&s| self.accepting()[s as usize]).collect();
        Nfa::from_edges(alpha, n, starts, edges, vec![false; n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_alpha() -> Alphabet {
        Alphabet::new(2, 2)
    }

    /// msd-first binary automaton for x = 2y over (x, y).
    fn double() -> Dfa {
        let alpha = pair_alpha();
        // state: the bit y must read next, which is the x bit just read
        Dfa::explore(
            alpha,
            Some(0u32),
            |st, l| match *st {
                Some(expect) => {
                    let (x, y) = (alpha.digit(l, 0), alpha.digit(l, 1));
                    if y == expect {
                        Some(x)
                    } else {
                        None
                    }
                }
                None => None,
            },
            |st| *st == Some(0),
        )
        .minimize()
    }

    fn letters(x: u64, y: u64) -> Vec<usize> {
        let alpha = pair_alpha();
        let len = 64 - x.max(y).leading_zeros() as usize;
        (0..len)
            .rev()
            .map(|i| alpha.encode(&[((x >> i) & 1) as u32, ((y >> i) & 1) as u32]))
            .collect()
    }

    #[test]
    fn double_is_correct() {
        let d = double();
        for x in 0..64 {
            for y in 0..64 {
                assert_eq!(d.accepts(&letters(x, y)), x == 2 * y, "{x} {y}");
            }
        }
    }

    #[test]
    fn projecting_x_from_double_accepts_every_y() {
        let p = double().project(0, DigitOrder::Msd);
        assert_eq!(p.num_states(), 1);
        assert!(p.accepts(&[1, 1, 1]));
    }

    #[test]
    fn projecting_y_from_double_accepts_evens() {
        let p = double().project(1, DigitOrder::Msd);
        for x in 0..200u64 {
            let w: Vec<usize> = (0..8).rev().map(|i| ((x >> i) & 1) as usize).collect();
            assert_eq!(p.accepts(&w), x % 2 == 0);
        }
    }

    #[test]
    fn reverse_twice_is_identity() {
        let d = double();
        assert_eq!(d.reverse().reverse(), d);
    }
}
