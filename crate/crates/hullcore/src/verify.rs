//! Named verification suites behind the CLI `verify` subcommand. Each suite
//! re-derives its reference values from closed forms and reports measured
//! constants next to a pass/fail status.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::blocks::{
    core_block_norm, hull_block_norm, majorant_norm, norm_equivalence_check, BlockNormSystem,
};
use crate::coeffs::CoeffSeq;
use crate::error::{Error, Result};
use crate::io::json_float;
use crate::radii::{closed_form_n_min, closed_form_partition, condition_b_check};
use crate::squared::{lift_even, lift_odd, parity_project, squared_core_norm, squared_hull_norm};
use crate::tails::{logsq_equivalence_check, select_concentrated};
use crate::weights::{RadialWeight, WFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseStatus {
    Pass,
    Fail,
    ReportOnly,
}

impl CaseStatus {
    fn as_str(self) -> &'static str {
        match self {
            CaseStatus::Pass => "pass",
            CaseStatus::Fail => "fail",
            CaseStatus::ReportOnly => "report-only",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub id: String,
    pub status: CaseStatus,
    pub measured: BTreeMap<String, f64>,
}

impl CaseResult {
    fn new(id: &str, ok: bool) -> Self {
        CaseResult {
            id: id.into(),
            status: if ok { CaseStatus::Pass } else { CaseStatus::Fail },
            measured: BTreeMap::new(),
        }
    }

    fn report_only(id: &str) -> Self {
        CaseResult { id: id.into(), status: CaseStatus::ReportOnly, measured: BTreeMap::new() }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.into(), value);
        self
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteResult {
    pub fn pass_count(&self) -> usize {
        self.cases.iter().filter(|c| c.status == CaseStatus::Pass).count()
    }

    pub fn fail_count(&self) -> usize {
        self.cases.iter().filter(|c| c.status == CaseStatus::Fail).count()
    }

    pub fn report_only_count(&self) -> usize {
        self.cases.iter().filter(|c| c.status == CaseStatus::ReportOnly).count()
    }

    pub fn to_json(&self) -> String {
        let cases: Vec<String> = self
            .cases
            .iter()
            .map(|c| {
                let measured: Vec<String> = c
                    .measured
                    .iter()
                    .map(|(k, v)| format!("\"{k}\":{}", json_float(*v)))
                    .collect();
                format!(
                    "{{\"id\":\"{}\",\"status\":\"{}\",\"measured\":{{{}}}}}",
                    c.id,
                    c.status.as_str(),
                    measured.join(",")
                )
            })
            .collect();
        format!(
            "{{\"suite\":\"{}\",\"cases\":[{}],\"summary\":{{\"pass\":{},\"fail\":{},\"report_only\":{}}}}}",
            self.suite,
            cases.join(","),
            self.pass_count(),
            self.fail_count(),
            self.report_only_count()
        )
    }
}

/// Options shared by the suites; unset fields take suite defaults.
#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub weight: Option<RadialWeight>,
    pub n_range: Option<(i64, i64)>,
    pub trials: Option<usize>,
    pub seed: u64,
}

pub const SUITE_NAMES: &[&str] =
    &["condb", "sandwich", "lemma14", "squared", "tails", "logsq", "examples15"];

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteResult> {
    match name {
        "condb" => suite_condb(opts),
        "sandwich" => suite_sandwich(opts),
        "lemma14" => suite_lemma14(opts),
        "squared" => suite_squared(opts),
        "tails" => suite_tails(opts),
        "logsq" => suite_logsq(opts),
        "examples15" => suite_examples15(opts),
        other => Err(Error::domain(format!(
            "unknown suite `{other}`; expected one of {SUITE_NAMES:?}"
        ))),
    }
}

fn random_seq(
    rng: &mut ChaCha8Rng,
    lo: u64,
    hi: u64,
    max_terms: usize,
    lm_range: (f64, f64),
) -> CoeffSeq {
    let k = rng.gen_range(1..=max_terms);
    let mut entries: Vec<(u64, f64)> = (0..k)
        .map(|_| (rng.gen_range(lo..=hi), rng.gen_range(lm_range.0..lm_range.1)))
        .collect();
    entries.sort_by_key(|e| e.0);
    entries.dedup_by_key(|e| e.0);
    CoeffSeq::from_log_entries(entries).expect("random entries are valid")
}

// ---------------------------------------------------------------------------

/// The four concrete disc exponential families used across the suites.
pub fn example_families() -> Vec<(String, RadialWeight)> {
    vec![
        ("i".into(), RadialWeight::exp_disc(1.0, 1.0, WFactor::One).unwrap()),
        ("ii".into(), RadialWeight::exp_disc(1.0, 2.0, WFactor::OneMinusR).unwrap()),
        ("iii".into(), RadialWeight::exp_disc(1.0, 1.0, WFactor::InvLog).unwrap()),
        ("iv".into(), RadialWeight::exp_disc(1.0, 1.0, WFactor::ExpLogSq).unwrap()),
    ]
}

/// Closed-form exponent, radius and log prefactor for the four families.
pub fn example_expectation(id: &str, n: f64) -> (f64, f64, f64) {
    match id {
        "i" => (n.powi(4) - n * n, 1.0 - n.powi(-2), -n * n),
        "ii" => {
            let s = 1.0 / (2.0_f64.sqrt() * n);
            (
                2.0_f64.powf(1.5) * n.powi(3) - 2.0 * n * n + 2.0_f64.sqrt() * n - 1.0,
                1.0 - s,
                -2.0 * n * n + s.ln(),
            )
        }
        "iii" => (
            n.powi(4) - n * n + (n * n - 1.0) / (1.0 + (n * n).ln()),
            1.0 - n.powi(-2),
            -n * n - (1.0 + (n * n).ln()).ln(),
        ),
        "iv" => (
            n.powi(4) - n * n + 4.0 * (n * n - 1.0) * n.ln(),
            1.0 - n.powi(-2),
            -n * n - 4.0 * n.ln() * n.ln(),
        ),
        other => panic!("unknown example id {other}"),
    }
}

fn suite_examples15(_opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut cases = Vec::new();
    for (id, weight) in example_families() {
        let part = closed_form_partition(&weight, 2, 50)?;
        let mut max_rel: f64 = 0.0;
        for e in &part.entries {
            let (m, r, lv) = example_expectation(&id, e.n as f64);
            let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
            max_rel = max_rel.max(rel(e.m, m)).max(rel(e.r, r)).max(rel(e.log_v_at_r, lv));
        }
        cases.push(CaseResult::new(&id, max_rel <= 1e-9).with("max_rel_err", max_rel));
    }
    Ok(SuiteResult { suite: "examples15".into(), cases })
}

fn suite_condb(opts: &SuiteOptions) -> Result<SuiteResult> {
    let mut cases = Vec::new();
    let configs: Vec<(String, RadialWeight)> = match &opts.weight {
        Some(w) => vec![("weight".into(), w.clone())],
        None => example_families(),
    };
    for (id, weight) in configs {
        let (a, b) = match &weight {
            RadialWeight::ExpDisc { a, b, .. } => (*a, *b),
            _ => {
                return Err(Error::domain(
                    "condb suite runs on disc exponential weights".into(),
                ))
            }
        };
        let (lo, hi) = opts.n_range.unwrap_or((closed_form_n_min(a, b), 200));
        let part = closed_form_partition(&weight, lo, hi)?;
        let rep = condition_b_check(&weight, &part)?;
        let mut case = CaseResult::new(&id, rep.holds)
            .with("inferred_b", rep.inferred_b)
            .with("inferred_K", rep.inferred_k)
            .with("n0", rep.n0.map(|n| n as f64).unwrap_or(f64::NAN));
        if let Some(n0) = rep.n0 {
            let min_lower = rep
                .rows
                .iter()
                .filter(|r| r.n >= n0)
                .map(|r| r.lower_q)
                .fold(f64::INFINITY, f64::min);
            case = case.with("min_lower_q", min_lower);
        }
        cases.push(case);
    }
    Ok(SuiteResult { suite: "condb".into(), cases })
}

fn suite_sandwich(opts: &SuiteOptions) -> Result<SuiteResult> {
    let trials = opts.trials.unwrap_or(500);
    let mut cases = Vec::new();
    let configs: Vec<(String, RadialWeight)> = match &opts.weight {
        Some(w) => vec![("weight".into(), w.clone())],
        None => example_families(),
    };
    for (id, weight) in configs {
        let (a, b) = match &weight {
            RadialWeight::ExpDisc { a, b, .. } => (*a, *b),
            _ => return Err(Error::domain("sandwich suite runs on disc exponential weights".into())),
        };
        let part = closed_form_partition(&weight, closed_form_n_min(a, b), 40)?;
        let hi = part.last_m().floor() as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut violations = 0usize;
        let mut max_ratio: f64 = 0.0;
        for _ in 0..trials {
            let seq = random_seq(&mut rng, 0, hi, 40, (-50.0, 50.0));
            let core = core_block_norm(&part, &seq)?.log_sup;
            let maj = majorant_norm(&weight, &seq)?;
            if core > maj + 1e-9 {
                violations += 1;
            }
            max_ratio = max_ratio.max((maj - core).exp());
        }
        cases.push(
            CaseResult::new(&id, violations == 0)
                .with("violations", violations as f64)
                .with("max_ratio", max_ratio),
        );
    }
    Ok(SuiteResult { suite: "sandwich".into(), cases })
}

/// Block systems of the first concrete example: exponents n^4 - n^2 against
/// the simplified boundaries n^4, radii 1 - n^-2, prefactors e^(-n^2), with
/// an optional logarithmic prefactor correction (the third example).
pub fn example_block_systems(n_hi: i64, log_corrected: bool) -> (BlockNormSystem, BlockNormSystem) {
    let g = |n: f64| {
        if log_corrected {
            -(1.0 + (n * n).ln()).ln()
        } else {
            0.0
        }
    };
    let mut bounds_a = Vec::new();
    let mut bounds_b = Vec::new();
    let mut pref = Vec::new();
    let mut rad = Vec::new();
    for n in 2..=n_hi {
        let nf = n as f64;
        let m_a = if log_corrected {
            nf.powi(4) - nf * nf + (nf * nf - 1.0) / (1.0 + (nf * nf).ln())
        } else {
            nf.powi(4) - nf * nf
        };
        bounds_a.push(m_a);
        bounds_b.push(nf.powi(4));
        if n < n_hi {
            pref.push(-nf * nf + g(nf));
            rad.push((1.0 - nf.powi(-2)).ln());
        }
    }
    let sys_a = BlockNormSystem::new(bounds_a, pref.clone(), rad.clone()).unwrap();
    let sys_b = BlockNormSystem::new(bounds_b, pref, rad).unwrap();
    (sys_a, sys_b)
}

fn suite_lemma14(opts: &SuiteOptions) -> Result<SuiteResult> {
    let trials = opts.trials.unwrap_or(100);
    let mut cases = Vec::new();
    for (id, log_corrected, p) in [
        ("quartic_p2", false, 2.0),
        ("quartic_p1", false, 1.0),
        ("log_corrected_p2", true, 2.0),
    ] {
        let (sys_a, sys_b) = example_block_systems(31, log_corrected);
        let rep = norm_equivalence_check(&sys_a, &sys_b, p, trials, opts.seed)?;
        let ok = rep.interleaved
            && rep.log_c.is_finite()
            && rep.log_big_c.is_finite()
            && rep.forward_violations == 0
            && rep.reverse_violations == 0;
        cases.push(
            CaseResult::new(id, ok)
                .with("c", rep.c)
                .with("C", rep.big_c)
                .with("log_c", rep.log_c)
                .with("log_C", rep.log_big_c)
                .with("forward_violations", rep.forward_violations as f64)
                .with("reverse_violations", rep.reverse_violations as f64),
        );
    }
    Ok(SuiteResult { suite: "lemma14".into(), cases })
}

fn suite_squared(opts: &SuiteOptions) -> Result<SuiteResult> {
    let trials = opts.trials.unwrap_or(100);
    let (a, b) = match &opts.weight {
        Some(RadialWeight::ExpDiscSquared { a, b }) => (*a, *b),
        Some(RadialWeight::ExpDisc { a, b, .. }) => (*a, *b),
        None => (1.0, 1.0),
        Some(other) => {
            return Err(Error::domain(format!(
                "squared suite needs the squared-argument disc family, got {other:?}"
            )))
        }
    };
    let v1 = RadialWeight::exp_disc(a, b, WFactor::One)?;
    let v2 = RadialWeight::exp_disc_squared(a, b)?;
    let part = closed_form_partition(&v1, closed_form_n_min(a, b), 12)?;
    let lo = part.first_m().floor() as u64 + 1;
    let hi = part.last_m().floor() as u64;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_iso: f64 = 0.0;
    let mut max_odd_excess: f64 = f64::NEG_INFINITY;
    let mut max_proj_excess: f64 = f64::NEG_INFINITY;
    let mut max_consistency: f64 = 0.0;
    for _ in 0..trials {
        let h = random_seq(&mut rng, 0, 3000, 25, (-20.0, 20.0));
        let maj1 = majorant_norm(&v1, &h)?;
        let maj_even = majorant_norm(&v2, &lift_even(&h))?;
        let maj_odd = majorant_norm(&v2, &lift_odd(&h))?;
        max_iso = max_iso.max((maj1 - maj_even).abs());
        max_odd_excess = max_odd_excess.max(maj_odd - maj1);

        let f = random_seq(&mut rng, 0, 4000, 25, (-20.0, 20.0));
        let parts = parity_project(&f);
        if !parts.even.is_empty() {
            let maj_f = majorant_norm(&v2, &f)?;
            let maj_e = majorant_norm(&v2, &parts.even)?;
            max_proj_excess = max_proj_excess.max(maj_e - maj_f);
        }

        let hb = random_seq(&mut rng, lo, hi, 25, (-20.0, 20.0));
        let base_hull = hull_block_norm(&part, &hb)?.log_sup;
        let base_core = core_block_norm(&part, &hb)?.log_sup;
        let lifted_hull = squared_hull_norm(a, b, &lift_even(&hb))?.log_sup;
        let lifted_core = squared_core_norm(a, b, &lift_odd(&hb))?.log_sup;
        max_consistency = max_consistency
            .max((base_hull - lifted_hull).abs())
            .max((base_core - lifted_core).abs());
    }
    let cases = vec![
        CaseResult::new("isometry", max_iso <= 1e-9).with("max_abs_delta", max_iso),
        CaseResult::new("odd_contraction", max_odd_excess <= 1e-9).with("max_excess", max_odd_excess),
        CaseResult::new("projection_contraction", max_proj_excess <= 1e-9)
            .with("max_excess", max_proj_excess),
        CaseResult::new("block_consistency", max_consistency <= 1e-9)
            .with("max_abs_delta", max_consistency),
    ];
    Ok(SuiteResult { suite: "squared".into(), cases })
}

fn suite_tails(opts: &SuiteOptions) -> Result<SuiteResult> {
    let weight = match &opts.weight {
        Some(w) => w.clone(),
        None => RadialWeight::exp_disc(1.0, 1.0, WFactor::One)?,
    };
    let mut cases = Vec::new();
    for size in 4..=16usize {
        let blocks: Vec<CoeffSeq> = (0..size)
            .map(|j| CoeffSeq::monomial(25 * 5u64.pow(j as u32)))
            .collect();
        let rep = select_concentrated(&weight, &blocks, size)?;
        let mut max_cert = 0.0f64;
        for cert in &rep.certificates {
            max_cert = max_cert.max(cert.leakage * 3.0_f64.powi(cert.k as i32));
        }
        let mut union = CoeffSeq::empty();
        let mut sup = f64::NEG_INFINITY;
        for &j in &rep.selected {
            union = union.union_add(&blocks[j]);
            sup = sup.max(majorant_norm(&weight, &blocks[j])?);
        }
        let total = majorant_norm(&weight, &union)?;
        let factor2_ok = sup <= total + std::f64::consts::LN_2 + 1e-9;
        let ok = !rep.truncated && rep.selected.len() == size && max_cert <= 1.0 + 1e-12 && factor2_ok;
        cases.push(
            CaseResult::new(&format!("blocks_{size}"), ok)
                .with("selected", rep.selected.len() as f64)
                .with("max_cert_over_bound", max_cert)
                .with("sup_minus_2norm", sup - (total + std::f64::consts::LN_2)),
        );
    }
    Ok(SuiteResult { suite: "tails".into(), cases })
}

fn suite_logsq(opts: &SuiteOptions) -> Result<SuiteResult> {
    let trials = opts.trials.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut violations = 0usize;
    let mut d_max: f64 = 0.0;
    for _ in 0..trials {
        let seq = random_seq(&mut rng, 0, 40, 25, (-20.0, 20.0));
        let rep = logsq_equivalence_check(&seq)?;
        if !rep.lower_ok {
            violations += 1;
        }
        if rep.upper_ratio.is_finite() {
            d_max = d_max.max(rep.upper_ratio);
        }
    }
    let cases = vec![
        CaseResult::new("lower_bound", violations == 0).with("violations", violations as f64),
        CaseResult::report_only("upper_ratio").with("d_max", d_max),
    ];
    Ok(SuiteResult { suite: "logsq".into(), cases })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_suite_passes() {
        let res = run_suite("examples15", &SuiteOptions::default()).unwrap();
        assert_eq!(res.fail_count(), 0, "{:?}", res.cases);
        assert_eq!(res.cases.len(), 4);
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(run_suite("nope", &SuiteOptions::default()).is_err());
    }

    #[test]
    fn lemma14_suite_reports_constants() {
        let opts = SuiteOptions { trials: Some(25), ..Default::default() };
        let res = run_suite("lemma14", &opts).unwrap();
        assert_eq!(res.fail_count(), 0, "{:?}", res.cases);
        for case in &res.cases {
            assert!(case.measured["c"] > 0.0);
            assert!(case.measured["C"].is_finite());
        }
    }

    #[test]
    fn logsq_suite_passes_and_reports() {
        let opts = SuiteOptions { trials: Some(40), ..Default::default() };
        let res = run_suite("logsq", &opts).unwrap();
        assert_eq!(res.fail_count(), 0, "{:?}", res.cases);
        assert_eq!(res.report_only_count(), 1);
        let json = res.to_json();
        assert!(json.contains("\"suite\":\"logsq\""));
        assert!(json.contains("\"report-only\""));
    }
}
