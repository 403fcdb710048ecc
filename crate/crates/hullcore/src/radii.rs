//! Critical radii of r^m v(r), closed-form and greedy block partitions, and
//! the two-sided spacing check along a partition.

use crate::error::{Error, Result};
use crate::num::{bisect_increasing, golden_max};
use crate::weights::{Domain, RadialWeight, WFactor};

/// Global maximizer of r^m v(r) together with the attained log value.
#[derive(Clone, Copy, Debug)]
pub struct CriticalPoint {
    pub m: f64,
    /// The maximizing radius. On the plane this can overflow f64 for very
    /// large exponents; `log_r` stays representable and is authoritative.
    pub r: f64,
    pub log_r: f64,
    pub log_max: f64,
}

/// Solves m = -r v'(r)/v(r) for the built-in families (the right-hand side
/// is strictly increasing), or maximizes m ln r + ln v(r) by golden section
/// for custom weights.
pub fn critical_radius(weight: &RadialWeight, m: f64) -> Result<CriticalPoint> {
    if !m.is_finite() || m <= 0.0 {
        return Err(Error::domain(format!("exponent m must be positive and finite, got {m}")));
    }
    match weight {
        RadialWeight::Custom { .. } => critical_radius_golden(weight, m),
        _ => match weight.domain() {
            Domain::Disc => critical_radius_disc(weight, m),
            Domain::Plane => critical_radius_plane(weight, m),
        },
    }
}

fn critical_radius_disc(weight: &RadialWeight, m: f64) -> Result<CriticalPoint> {
    let g = |r: f64| weight.neg_r_dlog_v(r);
    let mut hi = 0.5;
    let mut steps = 0;
    while g(hi) < m {
        hi = 1.0 - 0.5 * (1.0 - hi);
        steps += 1;
        if steps > 2000 || 1.0 - hi < 1e-250 {
            return Err(Error::numeric(format!(
                "no radius below 1 reaches exponent {m} for {weight:?}"
            )));
        }
    }
    let r = bisect_increasing(0.0, hi, m, g);
    let log_r = r.ln();
    let log_max = m * log_r + weight.log_v_unchecked(r);
    if !log_max.is_finite() {
        return Err(Error::numeric(format!(
            "critical value not finite at r = {r} for {weight:?}, m = {m}"
        )));
    }
    Ok(CriticalPoint { m, r, log_r, log_max })
}

fn critical_radius_plane(weight: &RadialWeight, m: f64) -> Result<CriticalPoint> {
    let g = |t: f64| weight.neg_r_dlog_v_lnr(t);
    // Bracket the root in t = ln r by doubling steps in either direction.
    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    if g(0.0) >= m {
        let mut step = 1.0;
        while g(lo) >= m {
            lo -= step;
            step *= 2.0;
            if lo < -745.0 {
                // r underflows; the maximizer is at an absurdly small radius.
                break;
            }
        }
    } else {
        let mut step = 1.0;
        while g(hi) < m {
            hi += step;
            step *= 2.0;
            if hi > 1e12 {
                return Err(Error::numeric(format!(
                    "failed to bracket the critical radius for {weight:?}, m = {m}"
                )));
            }
        }
    }
    let t = bisect_increasing(lo, hi, m, g);
    let log_max = m * t + weight.log_v_lnr(t);
    if !log_max.is_finite() {
        return Err(Error::numeric(format!(
            "critical value not finite at ln r = {t} for {weight:?}, m = {m}"
        )));
    }
    Ok(CriticalPoint { m, r: t.exp(), log_r: t, log_max })
}

fn critical_radius_golden(weight: &RadialWeight, m: f64) -> Result<CriticalPoint> {
    let obj = |r: f64| {
        if r <= 0.0 {
            f64::NEG_INFINITY
        } else {
            m * r.ln() + weight.log_v_unchecked(r)
        }
    };
    let probes: Vec<f64> = match weight.domain() {
        Domain::Disc => (1..55).map(|j| 1.0 - 0.5_f64.powi(j)).collect(),
        Domain::Plane => (-30..80).map(|j| 2.0_f64.powi(j)).collect(),
    };
    let vals: Vec<f64> = probes.iter().map(|&r| obj(r)).collect();
    let argmax = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if argmax == 0 || argmax + 1 == probes.len() || !vals[argmax].is_finite() {
        return Err(Error::numeric(format!(
            "could not bracket an interior maximum of r^m v(r) for custom weight, m = {m}"
        )));
    }
    let (r, log_max) = golden_max(probes[argmax - 1], probes[argmax + 1], 1e-13, obj);
    Ok(CriticalPoint { m, r, log_r: r.ln(), log_max })
}

/// sup_r r^m v(r), in log.
pub fn log_max_value(weight: &RadialWeight, m: f64) -> Result<f64> {
    Ok(critical_radius(weight, m)?.log_max)
}

/// One boundary of a block partition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionEntry {
    pub n: i64,
    pub m: f64,
    pub r: f64,
    pub log_v_at_r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionSource {
    ClosedForm,
    Greedy,
    UserSupplied,
}

/// An increasing exponent sequence m_n with the radii and log-weights
/// attached to each boundary. Blocks are the index ranges (m_n, m_{n+1}].
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub entries: Vec<PartitionEntry>,
    pub source: PartitionSource,
    /// First n in the generated range from which the oscillation bound
    /// 1/e <= w(r_n)/w(r_{n+1}) <= e holds through the end of the range.
    pub w_osc_ok_from: Option<i64>,
}

impl BlockPartition {
    pub fn from_entries(entries: Vec<PartitionEntry>, source: PartitionSource) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation("partition has no entries"));
        }
        for pair in entries.windows(2) {
            if !(pair[1].m > pair[0].m) {
                return Err(Error::validation(format!(
                    "partition exponents must strictly increase: m_{} = {} then m_{} = {}",
                    pair[0].n, pair[0].m, pair[1].n, pair[1].m
                )));
            }
        }
        Ok(BlockPartition { entries, source, w_osc_ok_from: None })
    }

    pub fn first_m(&self) -> f64 {
        self.entries[0].m
    }

    pub fn last_m(&self) -> f64 {
        self.entries[self.entries.len() - 1].m
    }

    /// Index i such that the integer degree m lies in (m_i, m_{i+1}].
    /// Degrees at or below the first boundary fold into the first block;
    /// degrees beyond the last boundary are a coverage error.
    pub fn block_of(&self, m: u64) -> Result<usize> {
        let mf = m as f64;
        let cnt = self.entries.partition_point(|e| e.m < mf);
        if cnt == self.entries.len() {
            return Err(Error::Coverage { first_uncovered: m });
        }
        Ok(cnt.saturating_sub(1))
    }
}

/// Smallest n for which the closed-form radius 1 - (a/(b n^2))^(1/b) is
/// positive.
pub fn closed_form_n_min(a: f64, b: f64) -> i64 {
    let mut n: i64 = 1;
    while (n as f64) * (n as f64) * b <= a {
        n += 1;
    }
    n
}

/// Closed-form partition for the disc exponential family: exponents
///
///   m_n = b (b/a)^(1/b) n^(2+2/b) - b n^2 - r_n w'(r_n)/w(r_n),
///   r_n = 1 - (a/(b n^2))^(1/b),
///
/// carrying the radius and ln v(r_n) per boundary. The w factor must pass
/// its slope and growth hypotheses.
pub fn closed_form_partition(weight: &RadialWeight, n_lo: i64, n_hi: i64) -> Result<BlockPartition> {
    let (a, b, w) = match weight {
        RadialWeight::ExpDisc { a, b, w } => (*a, *b, w),
        _ => {
            return Err(Error::domain(
                "closed-form partitions are defined for the disc exponential family only".into(),
            ))
        }
    };
    let n_min = closed_form_n_min(a, b);
    if n_lo < n_min {
        return Err(Error::domain(format!(
            "n must start at {n_min} or later for a = {a}, b = {b} (got {n_lo})"
        )));
    }
    if n_hi < n_lo {
        return Err(Error::domain(format!("empty n range {n_lo}..{n_hi}")));
    }
    let hyp = crate::weights::wfactor_violations(w, b);
    if !hyp.is_empty() {
        let details: Vec<String> = hyp.iter().map(|v| v.detail.clone()).collect();
        return Err(Error::validation(details.join("; ")));
    }

    let mut entries = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let nf = n as f64;
        let s = (a / (b * nf * nf)).powf(1.0 / b);
        let r = 1.0 - s;
        let m = b * (b / a).powf(1.0 / b) * nf.powf(2.0 + 2.0 / b) - b * nf * nf - r * w.dlog_w(r);
        entries.push(PartitionEntry { n, m, r, log_v_at_r: weight.log_v_unchecked(r) });
    }
    let mut part = BlockPartition::from_entries(entries, PartitionSource::ClosedForm)?;

    // Oscillation of the w factor along consecutive radii: report the first
    // n from which |ln w(r_n) - ln w(r_{n+1})| <= 1 holds to the end.
    let mut ok_from = None;
    for i in (0..part.entries.len().saturating_sub(1)).rev() {
        let d = w.log_w(part.entries[i].r) - w.log_w(part.entries[i + 1].r);
        if d.abs() <= 1.0 + 1e-12 {
            ok_from = Some(part.entries[i].n);
        } else {
            break;
        }
    }
    part.w_osc_ok_from = ok_from;
    Ok(part)
}

const GREEDY_EXPONENT_CAP: f64 = 1e9;
const GREEDY_M_TOL: f64 = 1e-6;

/// Grows an exponent sequence so that every consecutive pair satisfies the
/// lower spacing quantity >= b_target, by doubling then bisecting on the
/// next exponent. Works for any valid weight; no closed form needed.
pub fn greedy_partition(
    weight: &RadialWeight,
    b_target: f64,
    m_start: f64,
    count: usize,
) -> Result<BlockPartition> {
    if !(b_target > 2.0) {
        return Err(Error::domain(format!("b_target must exceed 2, got {b_target}")));
    }
    if count == 0 {
        return Err(Error::domain("count must be at least 1".into()));
    }
    let target = b_target.ln();

    let mut points = vec![critical_radius(weight, m_start)?];
    while points.len() < count {
        let prev = *points.last().unwrap();
        // log of the lower spacing quantity for the pair (prev.m, m2):
        // the drop of the prev.m-objective from its max to r_{m2}.
        let drop_at = |c2: &CriticalPoint| -> f64 {
            prev.log_max - (prev.m * c2.log_r + weight.log_v_unchecked_any(c2))
        };
        let mut hi_m = prev.m * 2.0;
        let mut hi_c = critical_radius(weight, hi_m)?;
        while drop_at(&hi_c) < target {
            hi_m *= 2.0;
            if hi_m > GREEDY_EXPONENT_CAP {
                return Err(Error::search(format!(
                    "no exponent below {GREEDY_EXPONENT_CAP:.0} reaches the spacing target {b_target} after m = {}",
                    prev.m
                )));
            }
            hi_c = critical_radius(weight, hi_m)?;
        }
        let mut lo_m = prev.m;
        while hi_m - lo_m > GREEDY_M_TOL {
            let mid = 0.5 * (lo_m + hi_m);
            let c = critical_radius(weight, mid)?;
            if drop_at(&c) < target {
                lo_m = mid;
            } else {
                hi_m = mid;
                hi_c = c;
            }
        }
        points.push(hi_c);
    }

    let entries = points
        .iter()
        .enumerate()
        .map(|(i, c)| PartitionEntry {
            n: (i + 1) as i64,
            m: c.m,
            r: c.r,
            log_v_at_r: c.log_max - c.m * c.log_r,
        })
        .collect();
    BlockPartition::from_entries(entries, PartitionSource::Greedy)
}

impl RadialWeight {
    /// ln v at a solved critical point, using the log-radius on the plane.
    fn log_v_unchecked_any(&self, c: &CriticalPoint) -> f64 {
        match self.domain() {
            Domain::Disc => self.log_v_unchecked(c.r),
            Domain::Plane => self.log_v_lnr(c.log_r),
        }
    }
}

/// Threshold for detecting the onset index: the lower quantity must clear 2
/// with a small margin.
pub const CONDITION_B_THRESHOLD: f64 = 2.0 + 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct ConditionBRow {
    pub n: i64,
    pub log_lower: f64,
    pub log_upper: f64,
    /// exp of the log quantities; +inf when not representable.
    pub lower_q: f64,
    pub upper_q: f64,
}

/// Two-sided spacing quantities along a partition, the inferred constants,
/// and the detected onset index.
#[derive(Clone, Debug)]
pub struct ConditionBReport {
    pub rows: Vec<ConditionBRow>,
    pub inferred_b: f64,
    pub inferred_k: f64,
    pub n0: Option<i64>,
    /// True when an onset exists, the inferred lower constant exceeds 2 and
    /// the upper constant dominates it.
    pub holds: bool,
}

/// Evaluates, for every consecutive pair of the partition,
///
///   lower = (r_n / r_{n+1})^{m_n} v(r_n)/v(r_{n+1}),
///   upper = (r_{n+1} / r_n)^{m_{n+1}} v(r_{n+1})/v(r_n),
///
/// in the log domain. The radii are recomputed from the weight for every
/// source: the quantities are defined through global maximum points, so a
/// partition whose stored radii drift from the true maximizers would
/// otherwise poison the report.
pub fn condition_b_check(weight: &RadialWeight, partition: &BlockPartition) -> Result<ConditionBReport> {
    if partition.entries.len() < 2 {
        return Err(Error::validation("condition check needs at least two entries"));
    }
    for pair in partition.entries.windows(2) {
        if !(pair[1].m > pair[0].m) {
            return Err(Error::validation(format!(
                "degenerate partition: m_{} = {} does not exceed m_{} = {}",
                pair[1].n, pair[1].m, pair[0].n, pair[0].m
            )));
        }
    }

    let points: Vec<CriticalPoint> = partition
        .entries
        .iter()
        .map(|e| critical_radius(weight, e.m))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(points.len() - 1);
    for (i, pair) in points.windows(2).enumerate() {
        let (c1, c2) = (&pair[0], &pair[1]);
        let lv1 = weight.log_v_unchecked_any(c1);
        let lv2 = weight.log_v_unchecked_any(c2);
        let log_lower = c1.m * (c1.log_r - c2.log_r) + lv1 - lv2;
        let log_upper = c2.m * (c2.log_r - c1.log_r) + lv2 - lv1;
        rows.push(ConditionBRow {
            n: partition.entries[i].n,
            log_lower,
            log_upper,
            lower_q: log_lower.exp(),
            upper_q: log_upper.exp(),
        });
    }

    // Onset: smallest n from which every later row clears the threshold.
    let mut onset_idx = None;
    for i in (0..rows.len()).rev() {
        if rows[i].lower_q >= CONDITION_B_THRESHOLD {
            onset_idx = Some(i);
        } else {
            break;
        }
    }
    let tail = onset_idx.unwrap_or(0);
    let mut inferred_b = f64::INFINITY;
    let mut inferred_k = f64::NEG_INFINITY;
    for row in &rows[tail..] {
        inferred_b = inferred_b.min(row.lower_q.min(row.upper_q));
        inferred_k = inferred_k.max(row.lower_q.max(row.upper_q));
    }
    let n0 = onset_idx.map(|i| rows[i].n);
    let holds = n0.is_some() && inferred_b > 2.0 && inferred_k >= inferred_b;
    Ok(ConditionBReport { rows, inferred_b, inferred_k, n0, holds })
}

/// The four w-correction terms controlling how fast the spacing quantities
/// settle, evaluated at the parameter pair (j_n, j_{n+1}) = (b/a) (n^2, (n+1)^2).
/// All four vanish identically when w is constant and decay to zero in n.
pub fn correction_terms(weight: &RadialWeight, n: i64) -> Result<(f64, f64, f64, f64)> {
    let (a, b, w) = match weight {
        RadialWeight::ExpDisc { a, b, w } => (*a, *b, w),
        _ => {
            return Err(Error::domain(
                "correction terms are defined for the disc exponential family only".into(),
            ))
        }
    };
    let n_min = closed_form_n_min(a, b);
    if n < n_min + 1 {
        return Err(Error::domain(format!(
            "n must be at least {} for a = {a}, b = {b} (got {n})",
            n_min + 1
        )));
    }
    let nf = n as f64;
    let m = b / a * nf * nf;
    let k = b / a * (nf + 1.0) * (nf + 1.0);
    let r_m = 1.0 - (1.0 / m).powf(1.0 / b);
    let r_k = 1.0 - (1.0 / k).powf(1.0 / b);
    let dw_m = w.dlog_w(r_m);
    let dw_k = w.dlog_w(r_k);

    let c1 = -(1.0 / b) * (r_k / r_m) * dw_k * (1.0 - r_k) * (k - m) / m;
    let c2 = (1.0 / b) * (1.0 / m).powf(1.0 / b) * dw_k * (k - m) / k;
    let c3 = -(1.0 / b) * dw_m * ((k - m) / m) * (1.0 - r_k);
    let c4 = (1.0 / b) * (r_m / r_k) * dw_m * (k - m) / (m.powf(1.0 / b) * k);
    Ok((c1, c2, c3, c4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WFactor;

    fn expdisc(a: f64, b: f64, w: WFactor) -> RadialWeight {
        RadialWeight::exp_disc(a, b, w).unwrap()
    }

    #[test]
    fn standard_weight_radius_closed_form() {
        let w = RadialWeight::standard(1.0).unwrap();
        let c = critical_radius(&w, 3.0).unwrap();
        assert!((c.r - 0.75).abs() < 1e-12);
    }

    #[test]
    fn exp_plane_radius_closed_form() {
        let w = RadialWeight::exp_plane(2.0).unwrap();
        let c = critical_radius(&w, 8.0).unwrap();
        assert!((c.r - 2.0).abs() < 1e-11);
    }

    #[test]
    fn exp_plane_log_max() {
        let w = RadialWeight::exp_plane(1.0).unwrap();
        let v = log_max_value(&w, 5.0).unwrap();
        assert!((v - (5.0 * 5.0_f64.ln() - 5.0)).abs() < 1e-10);
    }

    #[test]
    fn logsq_log_max_is_quarter_square() {
        let w = RadialWeight::log_sq_plane();
        assert!((log_max_value(&w, 4.0).unwrap() - 4.0).abs() < 1e-10);
        // far beyond representable radii
        let v = log_max_value(&w, 1e6).unwrap();
        assert!((v - 2.5e11).abs() / 2.5e11 < 1e-12);
    }

    #[test]
    fn grid_oracle_exp_disc_m100() {
        // Brute-force maximization of the log objective over a dense grid.
        let w = expdisc(1.0, 1.0, WFactor::One);
        let m = 100.0;
        let mut best = (0.0_f64, f64::NEG_INFINITY);
        let n = 1_000_000;
        for k in 0..n {
            let u = (-(18.42_f64) * (k as f64) / (n as f64 - 1.0)).exp(); // 1 down to ~1e-8
            let r = 1.0 - u;
            let v = if r > 0.0 { m * r.ln() + w.log_v_unchecked(r) } else { f64::NEG_INFINITY };
            if v > best.1 {
                best = (r, v);
            }
        }
        let c = critical_radius(&w, m).unwrap();
        assert!((c.r - best.0).abs() < 3e-6, "solver {} vs grid {}", c.r, best.0);
        assert!((c.log_max - best.1).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_exponent() {
        let w = RadialWeight::standard(1.0).unwrap();
        assert!(critical_radius(&w, 0.0).is_err());
        assert!(critical_radius(&w, -3.0).is_err());
    }

    #[test]
    fn custom_weight_uses_golden_section() {
        let w = RadialWeight::custom(
            Domain::Disc,
            std::sync::Arc::new(|r: f64| 2.0 * (1.0 - r).ln()),
            std::sync::Arc::new(|r: f64| -2.0 / (1.0 - r)),
        );
        let c = critical_radius(&w, 6.0).unwrap();
        assert!((c.r - 0.75).abs() < 1e-9); // m/(m+alpha) with alpha=2
    }

    #[test]
    fn malformed_custom_weight_reports_numeric_error() {
        // An increasing "weight": the objective has no interior maximum.
        let w = RadialWeight::custom(
            Domain::Disc,
            std::sync::Arc::new(|r: f64| 10.0 * r),
            std::sync::Arc::new(|_| 10.0),
        );
        assert!(matches!(critical_radius(&w, 1.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn closed_form_matches_quartic_example() {
        // a = b = 1, constant w: m_n = n^4 - n^2, r_n = 1 - n^-2.
        let w = expdisc(1.0, 1.0, WFactor::One);
        let p = closed_form_partition(&w, 2, 5).unwrap();
        let ms: Vec<f64> = p.entries.iter().map(|e| e.m).collect();
        assert_eq!(ms, vec![12.0, 72.0, 240.0, 600.0]);
        assert!((p.entries[1].r - (1.0 - 1.0 / 9.0)).abs() < 1e-14);
        assert!((p.entries[1].log_v_at_r + 9.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_matches_cubic_example() {
        // a = 1, b = 2, w = 1 - r: m_2 = 2^(3/2) 8 - 8 + 2^(1/2) 2 - 1.
        let w = expdisc(1.0, 2.0, WFactor::OneMinusR);
        let p = closed_form_partition(&w, 2, 2).unwrap();
        let expect = 8.0 * 2.0_f64.powf(1.5) - 8.0 + 2.0 * 2.0_f64.sqrt() - 1.0;
        assert!((p.entries[0].m - expect).abs() < 1e-9, "{} vs {expect}", p.entries[0].m);
    }

    #[test]
    fn closed_form_matches_log_corrected_examples() {
        // a = b = 1, w = (1 - log(1-r))^-1: m_3 = 72 + 8/(1 + ln 9).
        let w = expdisc(1.0, 1.0, WFactor::InvLog);
        let p = closed_form_partition(&w, 3, 3).unwrap();
        let expect = 72.0 + 8.0 / (1.0 + 9.0_f64.ln());
        assert!((p.entries[0].m - expect).abs() < 1e-9);

        // a = b = 1, w = exp(-log^2(1-r)): m_3 = 81 - 9 + 4*8*ln 3.
        let w = expdisc(1.0, 1.0, WFactor::ExpLogSq);
        let p = closed_form_partition(&w, 3, 3).unwrap();
        let expect = 72.0 + 32.0 * 3.0_f64.ln();
        assert!((p.entries[0].m - expect).abs() < 1e-9);
    }

    #[test]
    fn closed_form_rejects_small_n() {
        let w = expdisc(1.0, 1.0, WFactor::One);
        assert!(closed_form_partition(&w, 1, 5).is_err()); // n_min = 2
        let w2 = expdisc(1.0, 2.0, WFactor::One);
        assert!(closed_form_partition(&w2, 1, 5).is_ok()); // n_min = 1
    }

    #[test]
    fn closed_form_radius_consistency_b1() {
        // For b = 1 the closed-form exponent solves the stationary equation
        // at the closed-form radius.
        for wf in [WFactor::One, WFactor::InvLog, WFactor::ExpLogSq] {
            let w = expdisc(1.0, 1.0, wf);
            let p = closed_form_partition(&w, 2, 30).unwrap();
            for e in &p.entries {
                let c = critical_radius(&w, e.m).unwrap();
                assert!(
                    (c.r - e.r).abs() < 1e-9,
                    "n = {}: solver {} vs closed form {}",
                    e.n,
                    c.r,
                    e.r
                );
            }
        }
    }

    #[test]
    fn critical_radius_monotone_in_m() {
        let weights: Vec<RadialWeight> = vec![
            expdisc(1.0, 1.0, WFactor::One),
            expdisc(1.0, 2.0, WFactor::OneMinusR),
            RadialWeight::exp_disc_squared(1.0, 1.0).unwrap(),
            RadialWeight::standard(1.0).unwrap(),
            RadialWeight::exp_plane(1.0).unwrap(),
            RadialWeight::exp_exp_plane(),
        ];
        for w in &weights {
            let mut prev = critical_radius(w, 0.5).unwrap().log_r;
            for &m in &[1.0, 2.0, 5.0, 17.0, 100.0, 3000.0] {
                let c = critical_radius(w, m).unwrap();
                assert!(c.log_r > prev, "{w:?} at m = {m}");
                prev = c.log_r;
            }
        }
    }

    #[test]
    fn greedy_single_entry() {
        let w = RadialWeight::standard(1.0).unwrap();
        let p = greedy_partition(&w, std::f64::consts::E, 4.0, 1).unwrap();
        assert_eq!(p.entries.len(), 1);
        assert!((p.entries[0].m - 4.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_meets_target_on_plane_weight() {
        let w = RadialWeight::exp_plane(1.0).unwrap();
        let p = greedy_partition(&w, std::f64::consts::E, 10.0, 5).unwrap();
        assert_eq!(p.entries.len(), 5);
        let rep = condition_b_check(&w, &p).unwrap();
        assert!(rep.inferred_b >= std::f64::consts::E - 1e-6, "b = {}", rep.inferred_b);
    }

    #[test]
    fn greedy_ratio_bounded_on_standard_weight() {
        let w = RadialWeight::standard(1.0).unwrap();
        let p = greedy_partition(&w, std::f64::consts::E, 4.0, 6).unwrap();
        for pair in p.entries.windows(2) {
            assert!(pair[1].m / pair[0].m < 20.0);
        }
        let rep = condition_b_check(&w, &p).unwrap();
        assert!(rep.inferred_b >= std::f64::consts::E - 1e-6);
        assert!(rep.inferred_k.is_finite());
    }

    #[test]
    fn greedy_rejects_low_target() {
        let w = RadialWeight::standard(1.0).unwrap();
        assert!(greedy_partition(&w, 2.0, 4.0, 3).is_err());
    }

    #[test]
    fn condition_b_rejects_degenerate_partition() {
        let w = expdisc(1.0, 1.0, WFactor::One);
        let entries = vec![
            PartitionEntry { n: 1, m: 10.0, r: 0.5, log_v_at_r: -2.0 },
            PartitionEntry { n: 2, m: 10.0, r: 0.5, log_v_at_r: -2.0 },
        ];
        let p = BlockPartition { entries, source: PartitionSource::UserSupplied, w_osc_ok_from: None };
        assert!(condition_b_check(&w, &p).is_err());
    }

    #[test]
    fn condition_b_holds_for_quartic_partition() {
        let w = expdisc(1.0, 1.0, WFactor::One);
        let p = closed_form_partition(&w, 10, 200).unwrap();
        let rep = condition_b_check(&w, &p).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.n0, Some(10));
        for row in &rep.rows {
            if row.n >= 20 {
                assert!(row.lower_q >= 2.5, "n = {}: {}", row.n, row.lower_q);
            }
        }
        assert!(rep.inferred_k.is_finite());
    }

    #[test]
    fn condition_b_holds_for_b2_family() {
        let w = expdisc(1.0, 2.0, WFactor::One);
        let p = closed_form_partition(&w, 10, 100).unwrap();
        let rep = condition_b_check(&w, &p).unwrap();
        assert!(rep.holds);
        assert!(rep.inferred_b > 2.0);
    }

    #[test]
    fn correction_terms_vanish_for_constant_w() {
        let w = expdisc(1.0, 1.0, WFactor::One);
        for n in [3, 10, 50] {
            let (c1, c2, c3, c4) = correction_terms(&w, n).unwrap();
            assert_eq!((c1, c2, c3, c4), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn correction_terms_decay() {
        let cases = vec![
            expdisc(1.0, 2.0, WFactor::OneMinusR),
            expdisc(1.0, 1.0, WFactor::InvLog),
            expdisc(1.0, 1.0, WFactor::ExpLogSq),
        ];
        for w in &cases {
            let at = |n: i64| {
                let (c1, c2, c3, c4) = correction_terms(w, n).unwrap();
                [c1.abs(), c2.abs(), c3.abs(), c4.abs()]
            };
            let c50 = at(50);
            let c500 = at(500);
            for i in 0..4 {
                assert!(c500[i] < c50[i], "{w:?} term {i}");
                assert!(c500[i] < 0.05, "{w:?} term {i} = {}", c500[i]);
            }
        }
        // monotone decay toward zero for the log-squared factor
        let w = expdisc(1.0, 1.0, WFactor::ExpLogSq);
        let seq: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&n| correction_terms(&w, n).unwrap().0.abs())
            .collect();
        assert!(seq[0] > seq[1] && seq[1] > seq[2]);
    }

    #[test]
    fn correction_terms_respect_n_floor() {
        let w = expdisc(1.0, 1.0, WFactor::OneMinusR);
        assert!(correction_terms(&w, 2).is_err()); // n_min = 2, floor is 3
        assert!(correction_terms(&w, 3).is_ok());
    }
}
