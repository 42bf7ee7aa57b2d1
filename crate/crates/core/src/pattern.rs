//! Transmission patterns: per-spine symbol counts ell_i and the cumulative
//! tail sums L_a = sum_{i >= a} ell_i that drive every bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionPattern {
    ells: Vec<u32>,
}

impl TransmissionPattern {
    /// Zero entries are allowed (the optimizer needs them for generality);
    /// `encode` and the bounds reject patterns whose tail sums vanish.
    pub fn new(ells: Vec<u32>) -> Result<Self> {
        if ells.is_empty() {
            return Err(Error::InvalidParams("pattern must be nonempty".into()));
        }
        Ok(TransmissionPattern { ells })
    }

    /// `passes` symbols for each of `segments` spines.
    pub fn uniform(passes: u32, segments: usize) -> Self {
        TransmissionPattern {
            ells: vec![passes; segments.max(1)],
        }
    }

    pub fn ells(&self) -> &[u32] {
        &self.ells
    }

    pub fn len(&self) -> usize {
        self.ells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ells.is_empty()
    }

    /// Total symbol budget, L_1.
    pub fn total(&self) -> u64 {
        self.ells.iter().map(|&e| e as u64).sum()
    }

    /// Tail sum L_a for 1-based segment index `a`.
    pub fn tail(&self, a: usize) -> u64 {
        self.ells[a - 1..].iter().map(|&e| e as u64).sum()
    }

    /// All tail sums L_1..L_{n/k}.
    pub fn tails(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.ells.len()];
        let mut acc = 0u64;
        for (i, &e) in self.ells.iter().enumerate().rev() {
            acc += e as u64;
            out[i] = acc;
        }
        out
    }

    /// Smallest 1-based `a` with L_a = 0, if any.
    pub fn first_empty_tail(&self) -> Option<usize> {
        self.tails().iter().position(|&t| t == 0).map(|i| i + 1)
    }

    /// Problem-1 feasibility: every ell_i >= 1.
    pub fn is_strictly_positive(&self) -> bool {
        self.ells.iter().all(|&e| e >= 1)
    }

    /// Copy with ell at 0-based `index` incremented by one.
    pub fn with_increment(&self, index: usize) -> Self {
        let mut ells = self.ells.clone();
        ells[index] += 1;
        TransmissionPattern { ells }
    }
}

impl std::fmt::Display for TransmissionPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.ells.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_are_nonincreasing() {
        let p = TransmissionPattern::new(vec![3, 0, 5, 2]).unwrap();
        let t = p.tails();
        assert_eq!(t, vec![10, 7, 7, 2]);
        assert!(t.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(p.tail(1), p.total());
    }

    #[test]
    fn empty_tail_detection() {
        let p = TransmissionPattern::new(vec![3, 3, 0, 0]).unwrap();
        assert_eq!(p.first_empty_tail(), Some(3));
        let q = TransmissionPattern::uniform(1, 4);
        assert_eq!(q.first_empty_tail(), None);
    }

    #[test]
    fn display_matches_bracket_form() {
        let p = TransmissionPattern::new(vec![3, 3, 3, 10]).unwrap();
        assert_eq!(p.to_string(), "[3,3,3,10]");
    }
}
