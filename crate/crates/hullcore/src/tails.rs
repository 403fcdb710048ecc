//! Constructive tail machinery: radius and degree bounds for weighted tails
//! of polynomials, greedy selection of blocks concentrated in disjoint
//! annuli, the partial-sum growth probe, and the plane log-squared
//! equivalence check.

use crate::coeffs::CoeffSeq;
use crate::error::{Error, Result};
use crate::num::{log_geom_sum, log_sum_exp};
use crate::radii::critical_radius;
use crate::weights::{Domain, RadialWeight};

/// Smallest practical radius r0 past which every polynomial of degree <= m
/// has weighted modulus at most eps times its norm: the proof bound
/// sum_{k<=m} (s/r)^k v(s)/v(r) stays below eps for all s >= r0, where r is
/// the critical radius of m (r = 0 for m = 0, so each summand is at most 1
/// at s = r). The bound is non-increasing beyond r, so a doubling-then-
/// bisection search in the boundary gap is exact.
pub fn tail_radius(weight: &RadialWeight, m: u64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("eps must be positive and finite, got {eps}")));
    }
    let ln_eps = eps.ln();
    match weight.domain() {
        Domain::Disc => {
            let (r_ref, ln_r, log_v_r) = if m == 0 {
                (0.0, f64::NEG_INFINITY, weight.log_v_unchecked(0.0))
            } else {
                let c = critical_radius(weight, m as f64)?;
                (c.r, c.log_r, c.log_max - (m as f64) * c.log_r)
            };
            let bound = |s: f64| -> f64 {
                let lq = if m == 0 { 0.0 } else { (s.ln() - ln_r).max(0.0) };
                log_geom_sum(lq, m + 1) + weight.log_v_unchecked(s) - log_v_r
            };
            if bound(r_ref) <= ln_eps {
                return Ok(r_ref);
            }
            // search in u = 1 - s
            let mut u_hi = 1.0 - r_ref; // bound fails here
            let mut u_lo = u_hi;
            let mut found = false;
            for _ in 0..60 {
                u_lo *= 0.5;
                if bound(1.0 - u_lo) <= ln_eps {
                    found = true;
                    break;
                }
                u_hi = u_lo;
            }
            if !found {
                return Err(Error::numeric(
                    "tail radius search ran into the boundary before the bound fell".into(),
                ));
            }
            for _ in 0..200 {
                let mid = 0.5 * (u_lo + u_hi);
                if mid <= u_lo || mid >= u_hi {
                    break;
                }
                if bound(1.0 - mid) <= ln_eps {
                    u_lo = mid;
                } else {
                    u_hi = mid;
                }
                if (u_hi - u_lo) <= 1e-12 * u_hi {
                    break;
                }
            }
            Ok(1.0 - u_lo)
        }
        Domain::Plane => {
            let (t_ref, log_v_r) = if m == 0 {
                (0.0, weight.log_v_unchecked(0.0))
            } else {
                let c = critical_radius(weight, m as f64)?;
                (c.log_r, c.log_max - (m as f64) * c.log_r)
            };
            let bound = |t: f64| -> f64 {
                let lq = if m == 0 { 0.0 } else { (t - t_ref).max(0.0) };
                log_geom_sum(lq, m + 1) + weight.log_v_lnr(t) - log_v_r
            };
            if bound(t_ref) <= ln_eps {
                return Ok(t_ref.exp());
            }
            let mut t_lo = t_ref; // bound fails here
            let mut t_hi = t_ref;
            let mut step = 0.05;
            let mut found = false;
            for _ in 0..200 {
                t_hi += step;
                step *= 2.0;
                if bound(t_hi) <= ln_eps {
                    found = true;
                    break;
                }
                t_lo = t_hi;
            }
            if !found {
                return Err(Error::numeric("tail radius search failed to converge".into()));
            }
            for _ in 0..200 {
                let mid = 0.5 * (t_lo + t_hi);
                if mid <= t_lo || mid >= t_hi {
                    break;
                }
                if bound(mid) <= ln_eps {
                    t_hi = mid;
                } else {
                    t_lo = mid;
                }
                if (t_hi - t_lo) <= 1e-12 * t_hi.abs().max(1.0) {
                    break;
                }
            }
            Ok(t_hi.exp())
        }
    }
}

/// Smallest n such that every series supported on degrees >= n has weighted
/// modulus at most eps times its norm inside radius r1: the geometric bound
/// (r1/r)^n / (1 - r1/r) * v(0)/v(r) with r the midpoint toward the
/// boundary (disc) or r1 + 1 (plane).
pub fn tail_degree(weight: &RadialWeight, r1: f64, eps: f64) -> Result<u64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("eps must be positive and finite, got {eps}")));
    }
    let boundary = weight.domain().boundary();
    if !(0.0..boundary).contains(&r1) {
        return Err(Error::domain(format!("r1 = {r1} outside [0, {boundary})")));
    }
    let r = match weight.domain() {
        Domain::Disc => 0.5 * (r1 + 1.0),
        Domain::Plane => r1 + 1.0,
    };
    let q = r1 / r;
    let base = weight.log_v_unchecked(0.0) - weight.log_v_unchecked(r);
    let ln_eps = eps.ln();
    let tail_log = |n: u64| -> f64 {
        if q == 0.0 {
            return if n == 0 { base } else { f64::NEG_INFINITY };
        }
        (n as f64) * q.ln() - (1.0 - q).ln() + base
    };
    // closed-form first guess, then settle the boundary exactly
    let mut n = if q == 0.0 {
        0
    } else {
        let x = (ln_eps + (1.0 - q).ln() - base) / q.ln();
        if x <= 0.0 {
            0
        } else if x >= 9.0e15 {
            return Err(Error::numeric(format!("tail degree overflows: needs ~{x:.3e} terms")));
        } else {
            x.ceil() as u64
        }
    };
    while tail_log(n) > ln_eps {
        n += 1;
    }
    while n > 0 && tail_log(n - 1) <= ln_eps {
        n -= 1;
    }
    Ok(n)
}

/// One annulus of the greedy selection: the k-th selected block leaks at
/// most 3^-k of its norm outside [inner_r, outer_r].
#[derive(Clone, Copy, Debug)]
pub struct AnnulusCertificate {
    pub k: usize,
    pub inner_r: f64,
    pub outer_r: f64,
    /// Measured off-annulus sup of the weighted modulus over its norm.
    pub leakage: f64,
}

#[derive(Clone, Debug)]
pub struct SelectionReport {
    /// Indices into the input block list, in selection order.
    pub selected: Vec<usize>,
    /// r_1 <= ... <= r_{K+1}: annulus k is [radii[k-1], radii[k]].
    pub radii: Vec<f64>,
    pub certificates: Vec<AnnulusCertificate>,
    /// Set when fewer selections than requested were achievable.
    pub truncated: bool,
    /// The certified construction is stated for the disc; plane weights are
    /// accepted but flagged.
    pub experimental_plane: bool,
}

/// Greedy realization of the concentrated-subsequence construction: given
/// the previous outer radius, skip to the first block whose degrees are high
/// enough that it leaks at most 3^-k inside, then push the outer radius far
/// enough that it leaks at most 3^-k outside.
pub fn select_concentrated(
    weight: &RadialWeight,
    blocks: &[CoeffSeq],
    count: usize,
) -> Result<SelectionReport> {
    if blocks.is_empty() {
        return Err(Error::validation("no blocks supplied"));
    }
    let mut prev_min: Option<u64> = None;
    for (i, b) in blocks.iter().enumerate() {
        let min = b
            .min_degree()
            .ok_or_else(|| Error::validation(format!("block {i} is empty")))?;
        if let Some(pm) = prev_min {
            if min <= pm {
                return Err(Error::validation(format!(
                    "blocks must have strictly increasing minimal degree (block {i})"
                )));
            }
        }
        prev_min = Some(min);
    }

    let mut selected = Vec::new();
    let mut radii = vec![0.0];
    let mut certificates = Vec::new();
    let mut cursor = 0usize;
    let mut inner = 0.0f64;
    let mut k = 1usize;
    while selected.len() < count && cursor < blocks.len() {
        let eps = 3.0_f64.powi(-(k as i32));
        let need = tail_degree(weight, inner, eps)?;
        let mut pick = None;
        while cursor < blocks.len() {
            if blocks[cursor].min_degree().unwrap() >= need {
                pick = Some(cursor);
                break;
            }
            cursor += 1;
        }
        let Some(j) = pick else { break };
        let block = &blocks[j];
        let outer_raw = tail_radius(weight, block.max_degree().unwrap(), eps)?;
        let outer = if outer_raw > inner {
            outer_raw
        } else {
            // pushing the outer radius outward only strengthens the bound
            inner + (weight.domain().boundary() - inner) * 1e-3
        };
        let norm = crate::blocks::majorant_norm(weight, block)?;
        let leakage = measure_leakage(weight, block, norm, inner, outer);
        certificates.push(AnnulusCertificate { k, inner_r: inner, outer_r: outer, leakage });
        selected.push(j);
        radii.push(outer);
        inner = outer;
        cursor = j + 1;
        k += 1;
    }

    Ok(SelectionReport {
        truncated: selected.len() < count,
        experimental_plane: weight.domain() == Domain::Plane,
        selected,
        radii,
        certificates,
    })
}

/// Grid sup of the weighted block modulus off the annulus, over its norm.
fn measure_leakage(weight: &RadialWeight, block: &CoeffSeq, log_norm: f64, inner: f64, outer: f64) -> f64 {
    let obj = |r: f64| -> f64 {
        if r < 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_r = r.ln();
        weight.log_v_unchecked(r)
            + log_sum_exp(block.entries().iter().map(|&(m, lm)| {
                if m == 0 { lm } else { lm + m as f64 * ln_r }
            }))
    };
    let mut sup = f64::NEG_INFINITY;
    if inner > 0.0 {
        for i in 0..=256 {
            let r = inner * (i as f64) / 256.0;
            sup = sup.max(obj(r));
        }
    }
    match weight.domain() {
        Domain::Disc => {
            let u0 = 1.0 - outer;
            for i in 0..=256 {
                let u = u0 * (1e-10_f64).powf(i as f64 / 256.0);
                sup = sup.max(obj(1.0 - u));
            }
        }
        Domain::Plane => {
            // t-space sweep outward until every term has died off
            let t0 = outer.ln();
            for i in 0..=256 {
                let t = t0 + (i as f64) * 0.1;
                let v = weight.log_v_lnr(t)
                    + log_sum_exp(block.entries().iter().map(|&(m, lm)| {
                        if m == 0 { lm } else { lm + m as f64 * t }
                    }));
                sup = sup.max(v);
            }
        }
    }
    (sup - log_norm).exp()
}

#[derive(Clone, Copy, Debug)]
pub struct PartialSumRow {
    pub cut: u64,
    pub log_norm: f64,
    /// Norm of the truncation over the full norm, in linear scale.
    pub ratio_to_full: f64,
}

/// Majorant norms of the truncations of a magnitude sequence at the given
/// cuts, with ratios to the full norm. Exploratory: nothing is asserted.
pub fn partial_sum_growth(
    weight: &RadialWeight,
    coeffs: &CoeffSeq,
    cuts: &[u64],
) -> Result<Vec<PartialSumRow>> {
    for pair in cuts.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::validation("cuts must strictly increase"));
        }
    }
    let full = crate::blocks::majorant_norm(weight, coeffs)?;
    let mut rows = Vec::with_capacity(cuts.len());
    for &cut in cuts {
        let trunc = coeffs.truncated_above(cut);
        let log_norm = crate::blocks::majorant_norm(weight, &trunc)?;
        let ratio = if log_norm == f64::NEG_INFINITY {
            0.0
        } else {
            (log_norm - full).exp()
        };
        rows.push(PartialSumRow { cut, log_norm, ratio_to_full: ratio });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug)]
pub struct LogSqReport {
    /// sup_k |a_k| e^(k^2/4) <= majorant norm (with 1e-9 slack); this
    /// direction holds unconditionally.
    pub lower_ok: bool,
    pub log_sup_term: f64,
    pub log_majorant: f64,
    /// Empirical constant of the reverse direction.
    pub upper_ratio: f64,
}

/// Two-sided comparison of the plane log-squared norm with the weighted
/// coefficient supremum sup_k |a_k| e^(k^2/4).
pub fn logsq_equivalence_check(coeffs: &CoeffSeq) -> Result<LogSqReport> {
    let weight = RadialWeight::log_sq_plane();
    let log_sup_term = coeffs
        .entries()
        .iter()
        .map(|&(m, lm)| lm + (m as f64) * (m as f64) / 4.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let log_majorant = crate::blocks::majorant_norm(&weight, coeffs)?;
    let (lower_ok, upper_ratio) = if log_sup_term == f64::NEG_INFINITY {
        (true, 1.0)
    } else {
        (log_sup_term <= log_majorant + 1e-9, (log_majorant - log_sup_term).exp())
    };
    Ok(LogSqReport { lower_ok, log_sup_term, log_majorant, upper_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WFactor;

    fn expdisc11() -> RadialWeight {
        RadialWeight::exp_disc(1.0, 1.0, WFactor::One).unwrap()
    }

    #[test]
    fn tail_radius_degree_zero_closed_form() {
        // v(s) = eps * v(0) solves to s = 1 - 1/(1 - ln eps)
        let w = expdisc11();
        for &eps in &[1e-2, 1e-6] {
            let r0 = tail_radius(&w, 0, eps).unwrap();
            let expect = 1.0 - 1.0 / (1.0 - eps.ln());
            assert!((r0 - expect).abs() < 1e-9, "eps = {eps}: {r0} vs {expect}");
        }
    }

    #[test]
    fn tail_radius_large_eps_returns_reference() {
        let w = expdisc11();
        let m = 3u64;
        let r0 = tail_radius(&w, m, 5.0).unwrap();
        let c = critical_radius(&w, 3.0).unwrap();
        assert!((r0 - c.r).abs() < 1e-12);
    }

    #[test]
    fn tail_radius_bound_verified_on_grid() {
        let w = RadialWeight::standard(1.0).unwrap();
        let m = 3u64;
        let eps = 1e-3;
        let r0 = tail_radius(&w, m, eps).unwrap();
        let c = critical_radius(&w, m as f64).unwrap();
        for i in 0..10_000 {
            let s = r0 + (1.0 - r0) * (i as f64) / 10_000.0;
            let sum: f64 = (0..=m)
                .map(|k| (s / c.r).powi(k as i32) * (w.log_v_unchecked(s) - w.log_v_unchecked(c.r)).exp())
                .sum();
            assert!(sum <= eps * 1.01, "s = {s}: {sum}");
        }
    }

    #[test]
    fn tail_degree_closed_form_vs_direct_sum() {
        let w = expdisc11();
        let r1 = 0.5;
        let eps = 1e-6;
        let n = tail_degree(&w, r1, eps).unwrap();
        let r = 0.75;
        let base = (w.log_v_unchecked(0.0) - w.log_v_unchecked(r)).exp();
        let direct = |n: u64| -> f64 {
            (0..100_000).map(|j| (r1 / r).powf((n + j) as f64)).sum::<f64>() * base
        };
        assert!(direct(n) <= eps * (1.0 + 1e-9));
        assert!(n == 0 || direct(n - 1) > eps);
    }

    #[test]
    fn tail_degree_zero_inner_radius() {
        let w = expdisc11();
        // q = 0: everything past degree 0 vanishes at the origin
        let n = tail_degree(&w, 0.0, 1e-9).unwrap();
        assert!(n <= 1);
    }

    #[test]
    fn tail_degree_monotone_in_eps() {
        let w = expdisc11();
        let n1 = tail_degree(&w, 0.5, 1e-6).unwrap();
        let n2 = tail_degree(&w, 0.5, 2e-6).unwrap();
        assert!(n2 <= n1);
    }

    #[test]
    fn selection_single_block() {
        let w = expdisc11();
        let blocks = vec![CoeffSeq::monomial(50)];
        let rep = select_concentrated(&w, &blocks, 1).unwrap();
        assert_eq!(rep.selected, vec![0]);
        assert!(!rep.truncated);
        assert_eq!(rep.certificates.len(), 1);
        assert!(rep.certificates[0].leakage <= 1.0 / 3.0 + 1e-12);
    }

    #[test]
    fn selection_rejects_unordered_blocks() {
        let w = expdisc11();
        let blocks = vec![CoeffSeq::monomial(50), CoeffSeq::monomial(50)];
        assert!(select_concentrated(&w, &blocks, 2).is_err());
        assert!(select_concentrated(&w, &[], 1).is_err());
        assert!(select_concentrated(&w, &[CoeffSeq::empty()], 1).is_err());
    }

    #[test]
    fn selection_concentrates_monomials() {
        let w = expdisc11();
        let blocks: Vec<CoeffSeq> =
            [1u64, 10, 100, 1000].iter().map(|&d| CoeffSeq::monomial(d)).collect();
        let rep = select_concentrated(&w, &blocks, 4).unwrap();
        assert!(!rep.selected.is_empty());
        for cert in &rep.certificates {
            assert!(
                cert.leakage <= 3.0_f64.powi(-(cert.k as i32)) + 1e-12,
                "k = {}: {}",
                cert.k,
                cert.leakage
            );
        }
        // factor-2 bound of the selected family
        let mut union = CoeffSeq::empty();
        let mut sup = f64::NEG_INFINITY;
        for &j in &rep.selected {
            union = union.union_add(&blocks[j]);
            sup = sup.max(crate::blocks::majorant_norm(&w, &blocks[j]).unwrap());
        }
        let total = crate::blocks::majorant_norm(&w, &union).unwrap();
        assert!(sup <= total + std::f64::consts::LN_2 + 1e-9);
    }

    #[test]
    fn probe_rows_behave_at_edges() {
        let w = expdisc11();
        let c = CoeffSeq::from_log_entries(vec![(10, 0.0), (100, 0.0)]).unwrap();
        let rows = partial_sum_growth(&w, &c, &[5, 10, 200]).unwrap();
        assert_eq!(rows[0].log_norm, f64::NEG_INFINITY);
        assert_eq!(rows[0].ratio_to_full, 0.0);
        assert!((rows[2].ratio_to_full - 1.0).abs() < 1e-9);
        assert!(rows[1].ratio_to_full <= 1.0 + 1e-12);
        assert!(partial_sum_growth(&w, &c, &[5, 5]).is_err());
    }

    #[test]
    fn logsq_monomial_is_tight() {
        let c = CoeffSeq::monomial(6);
        let rep = logsq_equivalence_check(&c).unwrap();
        assert!(rep.lower_ok);
        assert!((rep.log_sup_term - 9.0).abs() < 1e-12);
        assert!((rep.upper_ratio - 1.0).abs() < 1e-6, "ratio {}", rep.upper_ratio);
    }

    #[test]
    fn logsq_all_ones_bounded() {
        let c = CoeffSeq::from_log_entries((0..=20).map(|m| (m, 0.0)).collect()).unwrap();
        let rep = logsq_equivalence_check(&c).unwrap();
        assert!(rep.lower_ok);
        assert!(rep.upper_ratio.is_finite());
        assert!(rep.upper_ratio < 10.0);
    }

    #[test]
    fn logsq_empty_is_vacuous() {
        let rep = logsq_equivalence_check(&CoeffSeq::empty()).unwrap();
        assert!(rep.lower_ok);
        assert_eq!(rep.upper_ratio, 1.0);
    }
}
