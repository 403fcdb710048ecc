//! Finitely supported Taylor-coefficient magnitude sequences, stored as
//! (index, log-magnitude) pairs. Only magnitudes matter here: every norm in
//! this crate is solid, so signs and phases never enter.

use crate::error::{Error, Result};
use crate::num::log_add_exp;

#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeq {
    /// Strictly increasing indices with finite log magnitudes.
    entries: Vec<(u64, f64)>,
}

impl CoeffSeq {
    pub fn empty() -> Self {
        CoeffSeq { entries: Vec::new() }
    }

    /// Builds from (index, ln magnitude) pairs in any order. Entries at
    /// `-inf` (zero magnitude) are dropped; duplicate indices are an error.
    pub fn from_log_entries(mut entries: Vec<(u64, f64)>) -> Result<Self> {
        entries.retain(|&(_, lm)| lm != f64::NEG_INFINITY);
        for &(m, lm) in &entries {
            if lm.is_nan() || lm == f64::INFINITY {
                return Err(Error::domain(format!("log magnitude at index {m} is {lm}")));
            }
        }
        entries.sort_by_key(|&(m, _)| m);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::validation(format!("duplicate coefficient index {}", pair[0].0)));
            }
        }
        Ok(CoeffSeq { entries })
    }

    /// Builds from linear magnitudes; the sign is discarded.
    pub fn from_magnitudes(entries: Vec<(u64, f64)>) -> Result<Self> {
        let logs = entries
            .into_iter()
            .map(|(m, x)| {
                if x.is_nan() || x.is_infinite() {
                    Err(Error::domain(format!("magnitude at index {m} is {x}")))
                } else {
                    Ok((m, x.abs().ln()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_log_entries(logs)
    }

    /// A single unit coefficient at the given degree.
    pub fn monomial(m: u64) -> Self {
        CoeffSeq { entries: vec![(m, 0.0)] }
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn min_degree(&self) -> Option<u64> {
        self.entries.first().map(|e| e.0)
    }

    pub fn max_degree(&self) -> Option<u64> {
        self.entries.last().map(|e| e.0)
    }

    pub fn log_mag_at(&self, m: u64) -> Option<f64> {
        self.entries
            .binary_search_by_key(&m, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Multiplies every magnitude by e^shift.
    pub fn scale_log(&self, shift: f64) -> Self {
        CoeffSeq {
            entries: self.entries.iter().map(|&(m, lm)| (m, lm + shift)).collect(),
        }
    }

    /// Keeps indices <= cut.
    pub fn truncated_above(&self, cut: u64) -> Self {
        CoeffSeq {
            entries: self.entries.iter().copied().filter(|&(m, _)| m <= cut).collect(),
        }
    }

    /// Coefficient-wise sum of magnitudes (exact for non-negative series).
    pub fn union_add(&self, other: &CoeffSeq) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            match (self.entries.get(i), other.entries.get(j)) {
                (Some(&(ma, la)), Some(&(mb, lb))) => {
                    if ma < mb {
                        out.push((ma, la));
                        i += 1;
                    } else if mb < ma {
                        out.push((mb, lb));
                        j += 1;
                    } else {
                        out.push((ma, log_add_exp(la, lb)));
                        i += 1;
                        j += 1;
                    }
                }
                (Some(&e), None) => {
                    out.push(e);
                    i += 1;
                }
                (None, Some(&e)) => {
                    out.push(e);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        CoeffSeq { entries: out }
    }

    /// True when every magnitude of `other` is dominated by the matching
    /// magnitude here (absent indices count as zero).
    pub fn dominates(&self, other: &CoeffSeq) -> bool {
        other.entries.iter().all(|&(m, lm)| match self.log_mag_at(m) {
            Some(la) => lm <= la,
            None => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_sorts_and_drops_zeros() {
        let c = CoeffSeq::from_log_entries(vec![(5, 1.0), (2, f64::NEG_INFINITY), (1, 0.0)]).unwrap();
        assert_eq!(c.entries(), &[(1, 0.0), (5, 1.0)]);
    }

    #[test]
    fn duplicate_indices_rejected() {
        assert!(CoeffSeq::from_log_entries(vec![(3, 0.0), (3, 1.0)]).is_err());
    }

    #[test]
    fn magnitudes_take_abs() {
        let c = CoeffSeq::from_magnitudes(vec![(0, -2.0), (1, 0.0)]).unwrap();
        assert_eq!(c.entries(), &[(0, 2.0_f64.ln())]);
    }

    #[test]
    fn union_adds_magnitudes_on_collision() {
        let a = CoeffSeq::from_magnitudes(vec![(1, 1.0), (3, 2.0)]).unwrap();
        let b = CoeffSeq::from_magnitudes(vec![(3, 2.0), (7, 1.0)]).unwrap();
        let u = a.union_add(&b);
        assert_eq!(u.len(), 3);
        assert!((u.log_mag_at(3).unwrap() - 4.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn domination_checks_supports() {
        let a = CoeffSeq::from_magnitudes(vec![(1, 2.0), (4, 1.0)]).unwrap();
        let b = CoeffSeq::from_magnitudes(vec![(1, 1.5)]).unwrap();
        assert!(a.dominates(&b));
        assert!(!b.dominates(&a));
        assert!(a.dominates(&a));
    }
}
