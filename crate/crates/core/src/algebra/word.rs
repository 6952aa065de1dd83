use std::cmp::Ordering;
use std::fmt;

/// A word over the letters `1..=d`, stored in multiplication order:
/// `[i1, i2, ..., ik]` stands for the monomial `z_i1 z_i2 ... z_ik`.
///
/// Words are ordered degree-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are 1-based");
        Word(letters)
    }

    pub fn letter(j: usize) -> Self {
        Word::new(vec![j])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, j: usize) -> Word {
        let mut v = self.0.clone();
        v.push(j);
        Word(v)
    }

    pub fn prepend(&self, j: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(j);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn suffix_from(&self, k: usize) -> Word {
        Word(self.0[k..].to_vec())
    }

    /// All splittings `self = u v`, from `u = ∅` to `v = ∅`.
    pub fn splittings(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (0..=self.len()).map(move |k| (self.prefix(k), self.suffix_from(k)))
    }

    /// Parses a digit string (`"12"`), or a dot-separated list when letters
    /// exceed 9 (`"3.11"`). The empty string is the empty word.
    pub fn parse(s: &str) -> Option<Word> {
        if s.is_empty() {
            return Some(Word::empty());
        }
        let letters: Option<Vec<usize>> = if s.contains('.') {
            s.split('.').map(|t| t.parse().ok().filter(|&l| l >= 1)).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize).filter(|&l| l >= 1)).collect()
        };
        letters.map(Word)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&l| l < 10) {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

pub fn word_concat(u: &Word, v: &Word) -> Word {
    u.concat(v)
}

pub fn word_reverse(w: &Word) -> Word {
    w.reversed()
}

/// Every word over `1..=d` of length at most `max_len`, in degree-lex order.
pub fn words_up_to(d: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * d);
        for w in &layer {
            for j in 1..=d {
                next.push(w.push(j));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_and_reverse() {
        let w = Word::new(vec![1, 2, 2]);
        assert_eq!(word_concat(&Word::empty(), &w), w);
        assert_eq!(word_concat(&Word::new(vec![1, 2]), &Word::new(vec![2])), w);
        assert_eq!(word_reverse(&w), Word::new(vec![2, 2, 1]));
    }

    #[test]
    fn degree_lex_order() {
        let ws = words_up_to(2, 2);
        let printed: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(printed, ["", "1", "2", "11", "12", "21", "22"]);
        let mut sorted = ws.clone();
        sorted.sort();
        assert_eq!(sorted, ws);
    }

    #[test]
    fn parse_round_trip() {
        for w in words_up_to(3, 3) {
            assert_eq!(Word::parse(&w.to_string()), Some(w));
        }
        assert_eq!(Word::parse("3.11"), Some(Word::new(vec![3, 11])));
        assert_eq!(Word::parse("10"), None);
    }
}
