//! File formats and deterministic report serialization.
//!
//! JSON output is byte-stable: keys in fixed order, every float printed as
//! C-style `%.12e`, non-finite values as the strings "inf", "-inf", "nan".
//! Reading accepts both the number and the sentinel form.

use serde_json::Value;

use crate::coeffs::CoeffSeq;
use crate::error::{Error, Result};
use crate::radii::{BlockPartition, ConditionBReport, CriticalPoint, PartitionEntry, PartitionSource};
use crate::blocks::NormReport;
use crate::tails::{AnnulusCertificate, PartialSumRow, SelectionReport};

/// C-style `%.12e` rendering: 12 digits after the point, sign on the
/// exponent, at least two exponent digits.
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x == f64::INFINITY {
        return "inf".into();
    }
    if x == f64::NEG_INFINITY {
        return "-inf".into();
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponential format");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    if digits.len() >= 2 {
        format!("{mant}e{sign}{digits}")
    } else {
        format!("{mant}e{sign}0{digits}")
    }
}

/// A float as a JSON token: bare number when finite, quoted sentinel
/// otherwise.
pub fn json_float(x: f64) -> String {
    if x.is_finite() {
        fmt_e12(x)
    } else {
        format!("\"{}\"", fmt_e12(x))
    }
}

fn value_to_f64(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::validation(format!("{what}: number out of f64 range"))),
        Value::String(s) => match s.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::validation(format!("{what}: `{other}` is not a float"))),
        },
        other => Err(Error::validation(format!("{what}: expected a float, got {other}"))),
    }
}

fn value_to_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::validation(format!("{what}: expected a non-negative integer")))
}

fn value_to_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| Error::validation(format!("{what}: expected an integer")))
}

// ---------------------------------------------------------------------------
// coefficient files

/// Parses a coefficient file. Two formats:
///
/// - text lines `m<TAB>magnitude`, with `log:<value>` accepted in the
///   magnitude position (blank lines and `#` comments skipped);
/// - a JSON array `[{"m": int, "log_mag": float}, ...]`.
pub fn parse_coeffs(input: &str) -> Result<CoeffSeq> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('[') {
        return parse_coeffs_json(input);
    }
    let mut entries = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (m_str, mag_str) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    pos: lineno,
                    msg: format!("line {}: expected `m<TAB>magnitude`", lineno + 1),
                })
            }
        };
        let m: u64 = m_str.parse().map_err(|_| Error::Parse {
            pos: lineno,
            msg: format!("line {}: `{m_str}` is not a coefficient index", lineno + 1),
        })?;
        if let Some(logv) = mag_str.strip_prefix("log:") {
            let lm: f64 = logv.parse().map_err(|_| Error::Parse {
                pos: lineno,
                msg: format!("line {}: `{logv}` is not a log magnitude", lineno + 1),
            })?;
            entries.push((m, lm));
        } else {
            let mag: f64 = mag_str.parse().map_err(|_| Error::Parse {
                pos: lineno,
                msg: format!("line {}: `{mag_str}` is not a magnitude", lineno + 1),
            })?;
            entries.push((m, mag.abs().ln()));
        }
    }
    CoeffSeq::from_log_entries(entries)
}

fn parse_coeffs_json(input: &str) -> Result<CoeffSeq> {
    let v: Value = serde_json::from_str(input)?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::validation("coefficient JSON must be an array".to_string()))?;
    let mut entries = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        let obj = item
            .as_object()
            .ok_or_else(|| Error::validation(format!("coefficient entry {i} is not an object")))?;
        let m = value_to_u64(
            obj.get("m").ok_or_else(|| Error::validation(format!("entry {i}: missing `m`")))?,
            "m",
        )?;
        let lm = value_to_f64(
            obj.get("log_mag")
                .ok_or_else(|| Error::validation(format!("entry {i}: missing `log_mag`")))?,
            "log_mag",
        )?;
        entries.push((m, lm));
    }
    CoeffSeq::from_log_entries(entries)
}

pub fn coeffs_to_json(coeffs: &CoeffSeq) -> String {
    let items: Vec<String> = coeffs
        .entries()
        .iter()
        .map(|&(m, lm)| format!("{{\"m\":{m},\"log_mag\":{}}}", json_float(lm)))
        .collect();
    format!("[{}]", items.join(","))
}

// ---------------------------------------------------------------------------
// partitions

pub fn partition_to_json(p: &BlockPartition) -> String {
    let items: Vec<String> = p
        .entries
        .iter()
        .map(|e| {
            format!(
                "{{\"n\":{},\"m_n\":{},\"r_mn\":{},\"log_v_at_rmn\":{}}}",
                e.n,
                json_float(e.m),
                json_float(e.r),
                json_float(e.log_v_at_r)
            )
        })
        .collect();
    format!("[{}]", items.join(","))
}

pub fn partition_to_csv(p: &BlockPartition) -> String {
    let mut out = String::from("n,m_n,r_mn,log_v_at_rmn\n");
    for e in &p.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.n,
            fmt_e12(e.m),
            fmt_e12(e.r),
            fmt_e12(e.log_v_at_r)
        ));
    }
    out
}

/// Reads a partition from JSON (array of row objects) or CSV with the
/// standard header. The result is marked user-supplied.
pub fn parse_partition(input: &str) -> Result<BlockPartition> {
    let trimmed = input.trim_start();
    let entries = if trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(input)?;
        let arr = v
            .as_array()
            .ok_or_else(|| Error::validation("partition JSON must be an array".to_string()))?;
        let mut entries = Vec::with_capacity(arr.len());
        for (i, item) in arr.iter().enumerate() {
            let obj = item
                .as_object()
                .ok_or_else(|| Error::validation(format!("partition row {i} is not an object")))?;
            let get = |key: &str| -> Result<&Value> {
                obj.get(key)
                    .ok_or_else(|| Error::validation(format!("partition row {i}: missing `{key}`")))
            };
            entries.push(PartitionEntry {
                n: value_to_i64(get("n")?, "n")?,
                m: value_to_f64(get("m_n")?, "m_n")?,
                r: value_to_f64(get("r_mn")?, "r_mn")?,
                log_v_at_r: value_to_f64(get("log_v_at_rmn")?, "log_v_at_rmn")?,
            });
        }
        entries
    } else {
        let mut lines = input.lines();
        let header = lines.next().unwrap_or_default().trim();
        if header != "n,m_n,r_mn,log_v_at_rmn" {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("unexpected partition CSV header `{header}`"),
            });
        }
        let mut entries = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Parse {
                    pos: lineno + 1,
                    msg: format!("line {}: expected 4 columns", lineno + 2),
                });
            }
            let parse_f = |s: &str| -> Result<f64> {
                match s {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    _ => s.parse::<f64>().map_err(|_| Error::Parse {
                        pos: lineno + 1,
                        msg: format!("line {}: `{s}` is not a float", lineno + 2),
                    }),
                }
            };
            entries.push(PartitionEntry {
                n: cols[0].parse().map_err(|_| Error::Parse {
                    pos: lineno + 1,
                    msg: format!("line {}: `{}` is not an integer", lineno + 2, cols[0]),
                })?,
                m: parse_f(cols[1])?,
                r: parse_f(cols[2])?,
                log_v_at_r: parse_f(cols[3])?,
            });
        }
        entries
    };
    BlockPartition::from_entries(entries, PartitionSource::UserSupplied)
}

// ---------------------------------------------------------------------------
// reports

pub fn norm_report_to_json(r: &NormReport) -> String {
    let blocks: Vec<String> = r
        .blocks
        .iter()
        .map(|&(n, v)| format!("{{\"n\":{n},\"log_value\":{}}}", json_float(v)))
        .collect();
    let attained = match r.attained_n {
        Some(n) => n.to_string(),
        None => "null".into(),
    };
    format!(
        "{{\"blocks\":[{}],\"log_sup\":{},\"attained_n\":{}}}",
        blocks.join(","),
        json_float(r.log_sup),
        attained
    )
}

pub fn critical_points_to_json(points: &[CriticalPoint]) -> String {
    let items: Vec<String> = points
        .iter()
        .map(|c| {
            format!(
                "{{\"m\":{},\"r_m\":{},\"log_r\":{},\"log_max\":{}}}",
                json_float(c.m),
                json_float(c.r),
                json_float(c.log_r),
                json_float(c.log_max)
            )
        })
        .collect();
    format!("{{\"points\":[{}]}}", items.join(","))
}

pub fn critical_points_to_csv(points: &[CriticalPoint]) -> String {
    let mut out = String::from("m,r_m,log_r,log_max\n");
    for c in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_e12(c.m),
            fmt_e12(c.r),
            fmt_e12(c.log_r),
            fmt_e12(c.log_max)
        ));
    }
    out
}

pub fn condition_b_to_json(r: &ConditionBReport) -> String {
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|row| {
            format!(
                "{{\"n\":{},\"lower_q\":{},\"upper_q\":{},\"log_lower\":{},\"log_upper\":{}}}",
                row.n,
                json_float(row.lower_q),
                json_float(row.upper_q),
                json_float(row.log_lower),
                json_float(row.log_upper)
            )
        })
        .collect();
    let n0 = match r.n0 {
        Some(n) => n.to_string(),
        None => "null".into(),
    };
    format!(
        "{{\"rows\":[{}],\"inferred_b\":{},\"inferred_K\":{},\"n0\":{},\"holds\":{}}}",
        rows.join(","),
        json_float(r.inferred_b),
        json_float(r.inferred_k),
        n0,
        r.holds
    )
}

pub fn certificates_to_json(r: &SelectionReport) -> String {
    let certs: Vec<String> = r
        .certificates
        .iter()
        .map(|c: &AnnulusCertificate| {
            format!(
                "{{\"k\":{},\"inner_r\":{},\"outer_r\":{},\"leakage\":{}}}",
                c.k,
                json_float(c.inner_r),
                json_float(c.outer_r),
                json_float(c.leakage)
            )
        })
        .collect();
    let selected: Vec<String> = r.selected.iter().map(|i| i.to_string()).collect();
    let radii: Vec<String> = r.radii.iter().map(|&x| json_float(x)).collect();
    format!(
        "{{\"selected\":[{}],\"radii\":[{}],\"certificates\":[{}],\"truncated\":{},\"experimental_plane\":{}}}",
        selected.join(","),
        radii.join(","),
        certs.join(","),
        r.truncated,
        r.experimental_plane
    )
}

pub fn partial_sums_to_json(rows: &[PartialSumRow]) -> String {
    let items: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{{\"cut\":{},\"log_norm\":{},\"ratio_to_full\":{}}}",
                r.cut,
                json_float(r.log_norm),
                json_float(r.ratio_to_full)
            )
        })
        .collect();
    format!("{{\"rows\":[{}]}}", items.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radii::{closed_form_partition, PartitionSource};
    use crate::weights::{RadialWeight, WFactor};

    #[test]
    fn e12_format_is_c_style() {
        assert_eq!(fmt_e12(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e12(-0.015625), "-1.562500000000e-02");
        assert_eq!(fmt_e12(123.456), "1.234560000000e+02");
        assert_eq!(fmt_e12(1e-123), "1.000000000000e-123");
        assert_eq!(fmt_e12(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e12(f64::NEG_INFINITY), "-inf");
        assert_eq!(json_float(f64::NEG_INFINITY), "\"-inf\"");
    }

    #[test]
    fn coeff_text_formats_parse() {
        let c = parse_coeffs("3\t0.5\n# comment\n7\tlog:-2.25\n\n10\t1\n").unwrap();
        assert_eq!(c.len(), 3);
        assert!((c.log_mag_at(3).unwrap() - 0.5_f64.ln()).abs() < 1e-15);
        assert_eq!(c.log_mag_at(7), Some(-2.25));
        assert_eq!(c.log_mag_at(10), Some(0.0));
    }

    #[test]
    fn coeff_json_round_trip() {
        let c = parse_coeffs("[{\"m\":2,\"log_mag\":-1.5},{\"m\":9,\"log_mag\":0.0}]").unwrap();
        let back = parse_coeffs(&coeffs_to_json(&c)).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn coeff_bad_lines_report_position() {
        assert!(matches!(parse_coeffs("abc\t1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_coeffs("3\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn partition_round_trips_both_formats() {
        let w = RadialWeight::exp_disc(1.0, 1.0, WFactor::One).unwrap();
        let p = closed_form_partition(&w, 2, 6).unwrap();
        let from_json = parse_partition(&partition_to_json(&p)).unwrap();
        assert_eq!(from_json.source, PartitionSource::UserSupplied);
        assert_eq!(from_json.entries.len(), p.entries.len());
        for (a, b) in p.entries.iter().zip(&from_json.entries) {
            assert_eq!(a.n, b.n);
            assert!((a.m - b.m).abs() <= 1e-12 * a.m.abs());
            assert!((a.r - b.r).abs() <= 1e-12);
        }
        let from_csv = parse_partition(&partition_to_csv(&p)).unwrap();
        assert_eq!(from_csv.entries.len(), p.entries.len());
    }

    #[test]
    fn norm_report_serializes_sentinels() {
        let rep = NormReport { blocks: vec![], log_sup: f64::NEG_INFINITY, attained_n: None };
        assert_eq!(
            norm_report_to_json(&rep),
            "{\"blocks\":[],\"log_sup\":\"-inf\",\"attained_n\":null}"
        );
    }
}
