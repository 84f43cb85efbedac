use std::fmt;

use serde::{Deserialize, Serialize};

/// Tuples of `arity` digits drawn from `0..radix`.
///
/// A letter is the mixed-radix index of its tuple with component 0 most
/// significant, so letter order is lexicographic order on digit tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub arity: usize,
    pub radix: u32,
}

impl Alphabet {
    pub fn new(arity: usize, radix: u32) -> Self {
        assert!(radix >= 2, "radix must be at least 2");
        Alphabet { arity, radix }
    }

    pub fn size(&self) -> usize {
        (self.radix as usize).pow(self.arity as u32)
    }

    pub fn encode(&self, digits: &[u32]) -> usize {
        debug_assert_eq!(digits.len(), self.arity);
        digits
            .iter()
            .fold(0usize, |acc, &d| acc * self.radix as usize + d as usize)
    }

    pub fn decode(&self, mut letter: usize) -> Vec<u32> {
        let mut out = vec![0; self.arity];
        for slot in out.iter_mut().rev() {
            *slot = (letter % self.radix as usize) as u32;
            letter /= self.radix as usize;
        }
        out
    }

    /// Digit of component `comp` inside `letter`.
    pub fn digit(&self, letter: usize, comp: usize) -> u32 {
        let shift = (self.radix as usize).pow((self.arity - 1 - comp) as u32);
        ((letter / shift) % self.radix as usize) as u32
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn format_letter(&self, letter: usize) -> String {
        let digits = self.decode(letter);
        let parts: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "arity {} digits 0..{}", self.arity, self.radix - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_is_lexicographic() {
        let a = Alphabet::new(2, 3);
        assert_eq!(a.size(), 9);
        assert_eq!(a.encode(&[0, 0]), 0);
        assert_eq!(a.encode(&[0, 2]), 2);
        assert_eq!(a.encode(&[1, 0]), 3);
        for l in 0..a.size() {
            assert_eq!(a.encode(&a.decode(l)), l);
            let d = a.decode(l);
            assert_eq!(a.digit(l, 0), d[0]);
            assert_eq!(a.digit(l, 1), d[1]);
        }
    }

    #[test]
    fn arity_zero_has_one_letter() {
        let a = Alphabet::new(0, 2);
        assert_eq!(a.size(), 1);
        assert_eq!(a.decode(0), Vec::<u32>::new());
        assert_eq!(a.format_letter(0), "[]");
    }
}
