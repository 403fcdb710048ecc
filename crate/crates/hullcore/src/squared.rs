//! Even/odd coefficient lifts, the parity projection, and the hull/core
//! block norms for the squared-argument disc weight exp(-a/(1-r^2)^b).
//!
//! The lifts realize h(z) -> h(z^2) and h(z) -> z h(z^2) on coefficient
//! magnitudes; composed with the parity projection they decompose the
//! squared-weight space into its even and odd halves.

use crate::blocks::NormReport;
use crate::coeffs::CoeffSeq;
use crate::error::{Error, Result};
use crate::num::log_sum_exp;
use crate::radii::closed_form_n_min;
use crate::weights::RadialWeight;

/// Even and odd parts of a sequence, kept at their original indices.
#[derive(Clone, Debug)]
pub struct ParityDecomposition {
    pub even: CoeffSeq,
    pub odd: CoeffSeq,
}

impl ParityDecomposition {
    /// The h with lift_even(h) = even part: indices halved.
    pub fn even_origin(&self) -> CoeffSeq {
        let entries = self.even.entries().iter().map(|&(m, lm)| (m / 2, lm)).collect();
        CoeffSeq::from_log_entries(entries).expect("halved even indices stay distinct")
    }

    /// The h with lift_odd(h) = odd part: indices (m-1)/2.
    pub fn odd_origin(&self) -> CoeffSeq {
        let entries = self.odd.entries().iter().map(|&(m, lm)| ((m - 1) / 2, lm)).collect();
        CoeffSeq::from_log_entries(entries).expect("halved odd indices stay distinct")
    }
}

/// Index map k -> 2k; magnitudes unchanged.
pub fn lift_even(coeffs: &CoeffSeq) -> CoeffSeq {
    let entries = coeffs.entries().iter().map(|&(m, lm)| (2 * m, lm)).collect();
    CoeffSeq::from_log_entries(entries).expect("doubling keeps indices distinct")
}

/// Index map k -> 2k + 1; magnitudes unchanged.
pub fn lift_odd(coeffs: &CoeffSeq) -> CoeffSeq {
    let entries = coeffs.entries().iter().map(|&(m, lm)| (2 * m + 1, lm)).collect();
    CoeffSeq::from_log_entries(entries).expect("doubling keeps indices distinct")
}

/// Splits a sequence by index parity.
pub fn parity_project(coeffs: &CoeffSeq) -> ParityDecomposition {
    let (even, odd): (Vec<_>, Vec<_>) = coeffs.entries().iter().partition(|&&(m, _)| m % 2 == 0);
    ParityDecomposition {
        even: CoeffSeq::from_log_entries(even).expect("parity split keeps order"),
        odd: CoeffSeq::from_log_entries(odd).expect("parity split keeps order"),
    }
}

/// Hull block norm for exp(-a/(1-r^2)^b): blocks 2[m_n]+1 < m <= 2[m_{n+1}]+1
/// with radius factor rho_n^(2[m/2]) and prefactor e^(-b n^2), where m_n are
/// the constant-w closed-form exponents and rho_n = 1 - (a/(b n^2))^(1/b).
pub fn squared_hull_norm(a: f64, b: f64, coeffs: &CoeffSeq) -> Result<NormReport> {
    squared_norm(a, b, coeffs, 2.0)
}

/// Core variant: first-power sums with radius factor rho_n^[m/2].
pub fn squared_core_norm(a: f64, b: f64, coeffs: &CoeffSeq) -> Result<NormReport> {
    squared_norm(a, b, coeffs, 1.0)
}

fn boundary_m(a: f64, b: f64, n: i64) -> f64 {
    let nf = n as f64;
    b.powf(1.0 + 1.0 / b) * a.powf(-1.0 / b) * nf.powf(2.0 + 2.0 / b) - b * nf * nf
}

fn squared_norm(a: f64, b: f64, coeffs: &CoeffSeq, p: f64) -> Result<NormReport> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!("a and b must be positive, got a = {a}, b = {b}")));
    }
    // validate against the actual weight once so malformed parameters fail loudly
    let _ = RadialWeight::exp_disc_squared(a, b)?;

    let n_min = closed_form_n_min(a, b);
    let mut blocks: Vec<(i64, f64)> = Vec::new();
    let mut terms: Vec<f64> = Vec::new();
    let mut cur_n: Option<i64> = None;

    // Walk the support once, tracking the block (half-open in the doubled
    // index) each degree falls into. Degrees at or below the first boundary
    // fold into the first block.
    let mut n_hi = n_min;
    let boundary = |n: i64| 2.0 * boundary_m(a, b, n).floor() + 1.0;
    for &(m, lm) in coeffs.entries() {
        let mf = m as f64;
        // find n with boundary(n) < m <= boundary(n+1)
        while boundary(n_hi + 1) < mf {
            n_hi += 1;
            if n_hi > 100_000_000 {
                return Err(Error::Coverage { first_uncovered: m });
            }
        }
        let n = if mf <= boundary(n_min) { n_min } else { n_hi };
        let nf = n as f64;
        let rho = 1.0 - (a / (b * nf * nf)).powf(1.0 / b);
        let half = (m / 2) as f64;
        let term = p * (lm + half * rho.ln());
        if cur_n == Some(n) {
            terms.push(term);
        } else {
            if let Some(prev) = cur_n {
                let pf = prev as f64;
                blocks.push((prev, -b * pf * pf + log_sum_exp(terms.drain(..)) / p));
            }
            cur_n = Some(n);
            terms.push(term);
        }
    }
    if let Some(prev) = cur_n {
        let pf = prev as f64;
        blocks.push((prev, -b * pf * pf + log_sum_exp(terms.drain(..)) / p));
    }

    Ok(NormReport::from_blocks(blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::hull_block_norm;
    use crate::radii::closed_form_partition;
    use crate::weights::WFactor;

    #[test]
    fn lifts_move_indices() {
        let c = CoeffSeq::from_magnitudes(vec![(0, 1.0), (3, 2.0)]).unwrap();
        let even = lift_even(&c);
        assert_eq!(even.entries()[0].0, 0);
        assert_eq!(even.entries()[1].0, 6);
        let odd = lift_odd(&CoeffSeq::from_magnitudes(vec![(0, 1.0), (1, 1.0)]).unwrap());
        assert_eq!(odd.entries()[0].0, 1);
        assert_eq!(odd.entries()[1].0, 3);
        assert!(lift_even(&CoeffSeq::empty()).is_empty());
    }

    #[test]
    fn parity_split_reconstructs() {
        let c = CoeffSeq::from_log_entries(vec![(0, 0.1), (1, 0.2), (2, 0.3), (7, -1.0)]).unwrap();
        let d = parity_project(&c);
        assert_eq!(d.even.entries(), &[(0, 0.1), (2, 0.3)]);
        assert_eq!(d.odd.entries(), &[(1, 0.2), (7, -1.0)]);
        let rebuilt = lift_even(&d.even_origin()).union_add(&lift_odd(&d.odd_origin()));
        assert_eq!(rebuilt, c);
        // idempotence
        let dd = parity_project(&d.even);
        assert_eq!(dd.even, d.even);
        assert!(dd.odd.is_empty());
    }

    #[test]
    fn squared_norm_of_empty_is_neg_inf() {
        let rep = squared_hull_norm(1.0, 1.0, &CoeffSeq::empty()).unwrap();
        assert_eq!(rep.log_sup, f64::NEG_INFINITY);
        assert_eq!(rep.attained_n, None);
    }

    #[test]
    fn odd_neighbor_matches_even_term() {
        // [m/2] is the same for 2m and 2m+1
        let even = squared_hull_norm(1.0, 1.0, &CoeffSeq::monomial(200)).unwrap();
        let odd = squared_hull_norm(1.0, 1.0, &CoeffSeq::monomial(201)).unwrap();
        assert!((even.log_sup - odd.log_sup).abs() < 1e-12);
    }

    #[test]
    fn even_lift_matches_base_hull_blocks() {
        let w = RadialWeight::exp_disc(1.0, 1.0, WFactor::One).unwrap();
        let p = closed_form_partition(&w, 2, 10).unwrap();
        let h = CoeffSeq::from_log_entries(vec![(20, 0.0), (100, -0.5), (3000, 1.0)]).unwrap();
        let base = hull_block_norm(&p, &h).unwrap();
        let lifted = squared_hull_norm(1.0, 1.0, &lift_even(&h)).unwrap();
        assert!((base.log_sup - lifted.log_sup).abs() < 1e-9, "{} vs {}", base.log_sup, lifted.log_sup);
        let odd = squared_hull_norm(1.0, 1.0, &lift_odd(&h)).unwrap();
        assert!((base.log_sup - odd.log_sup).abs() < 1e-9);
    }
}
