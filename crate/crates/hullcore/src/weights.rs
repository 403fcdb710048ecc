//! Radial weight families on the unit disc and on the plane, evaluated
//! entirely in the log domain.
//!
//! A radial weight v is continuous, strictly positive, non-increasing on
//! [0, R) and satisfies r^n v(r) -> 0 at the boundary for every n. Direct
//! evaluation of families like exp(-a/(1-r)^b) underflows f64 long before
//! the radii of interest, so every consumer works with ln v instead.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Domain of a radial weight: the unit disc or the whole plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Disc,
    Plane,
}

impl Domain {
    /// Boundary radius: 1 on the disc, infinity on the plane.
    pub fn boundary(self) -> f64 {
        match self {
            Domain::Disc => 1.0,
            Domain::Plane => f64::INFINITY,
        }
    }
}

/// Shared callback type for user-supplied weights: r -> value.
pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Multiplicative factor w(r) in front of the disc exponential family.
///
/// The variant names describe w itself; all evaluation goes through
/// `log_w` / `dlog_w` (dlog_w is w'/w).
#[derive(Clone)]
pub enum WFactor {
    One,
    /// w(r) = 1 - r
    OneMinusR,
    /// w(r) = (1 - log(1-r))^{-1}
    InvLog,
    /// w(r) = exp(-log^2(1-r))
    ExpLogSq,
    Custom { log_w: RadialFn, dlog_w: RadialFn },
}

impl fmt::Debug for WFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WFactor::One => write!(f, "One"),
            WFactor::OneMinusR => write!(f, "OneMinusR"),
            WFactor::InvLog => write!(f, "InvLog"),
            WFactor::ExpLogSq => write!(f, "ExpLogSq"),
            WFactor::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl WFactor {
    pub fn log_w(&self, r: f64) -> f64 {
        match self {
            WFactor::One => 0.0,
            WFactor::OneMinusR => (1.0 - r).ln(),
            WFactor::InvLog => -(1.0 - (1.0 - r).ln()).ln(),
            WFactor::ExpLogSq => {
                let l = (1.0 - r).ln();
                -l * l
            }
            WFactor::Custom { log_w, .. } => log_w(r),
        }
    }

    /// w'(r)/w(r).
    pub fn dlog_w(&self, r: f64) -> f64 {
        match self {
            WFactor::One => 0.0,
            WFactor::OneMinusR => -1.0 / (1.0 - r),
            WFactor::InvLog => -1.0 / ((1.0 - r) * (1.0 - (1.0 - r).ln())),
            WFactor::ExpLogSq => 2.0 * (1.0 - r).ln() / (1.0 - r),
            WFactor::Custom { dlog_w, .. } => dlog_w(r),
        }
    }
}

/// A radial weight family. Constructors validate parameters.
#[derive(Clone)]
pub enum RadialWeight {
    /// v(r) = w(r) exp(-a/(1-r)^b) on the disc.
    ExpDisc { a: f64, b: f64, w: WFactor },
    /// v(r) = exp(-a/(1-r^2)^b) on the disc.
    ExpDiscSquared { a: f64, b: f64 },
    /// v(r) = (1-r)^alpha, or (1-r^2)^alpha when `squared` is set.
    StandardDisc { alpha: f64, squared: bool },
    /// v(r) = exp(-r^p) on the plane.
    ExpPlane { p: f64 },
    /// v(r) = exp(-exp r) on the plane.
    ExpExpPlane,
    /// v(r) = exp(-(log+ r)^2) on the plane: constant 1 below r = 1.
    ///
    /// The continuation below r = 1 keeps v non-increasing; it only affects
    /// small radii and no high-degree norm depends on it.
    LogSqPlane,
    /// User-supplied weight; both callbacks are required, there is no
    /// automatic differentiation.
    Custom {
        domain: Domain,
        log_v: RadialFn,
        dlog_v: RadialFn,
    },
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialWeight::ExpDisc { a, b, w } => write!(f, "ExpDisc{{a={a},b={b},w={w:?}}}"),
            RadialWeight::ExpDiscSquared { a, b } => write!(f, "ExpDiscSquared{{a={a},b={b}}}"),
            RadialWeight::StandardDisc { alpha, squared } => {
                write!(f, "StandardDisc{{alpha={alpha},squared={squared}}}")
            }
            RadialWeight::ExpPlane { p } => write!(f, "ExpPlane{{p={p}}}"),
            RadialWeight::ExpExpPlane => write!(f, "ExpExpPlane"),
            RadialWeight::LogSqPlane => write!(f, "LogSqPlane"),
            RadialWeight::Custom { domain, .. } => write!(f, "Custom{{domain={domain:?}}}"),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::domain(format!("{name} must be a positive finite real, got {x}")))
    }
}

impl RadialWeight {
    pub fn exp_disc(a: f64, b: f64, w: WFactor) -> Result<Self> {
        Ok(RadialWeight::ExpDisc {
            a: positive("a", a)?,
            b: positive("b", b)?,
            w,
        })
    }

    pub fn exp_disc_squared(a: f64, b: f64) -> Result<Self> {
        Ok(RadialWeight::ExpDiscSquared {
            a: positive("a", a)?,
            b: positive("b", b)?,
        })
    }

    /// (1-r)^alpha.
    pub fn standard(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::domain(format!("alpha must be non-negative, got {alpha}")));
        }
        Ok(RadialWeight::StandardDisc { alpha, squared: false })
    }

    /// (1-r^2)^alpha.
    pub fn standard_squared(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::domain(format!("alpha must be non-negative, got {alpha}")));
        }
        Ok(RadialWeight::StandardDisc { alpha, squared: true })
    }

    pub fn exp_plane(p: f64) -> Result<Self> {
        Ok(RadialWeight::ExpPlane { p: positive("p", p)? })
    }

    pub fn exp_exp_plane() -> Self {
        RadialWeight::ExpExpPlane
    }

    pub fn log_sq_plane() -> Self {
        RadialWeight::LogSqPlane
    }

    pub fn custom(domain: Domain, log_v: RadialFn, dlog_v: RadialFn) -> Self {
        RadialWeight::Custom { domain, log_v, dlog_v }
    }

    pub fn domain(&self) -> Domain {
        match self {
            RadialWeight::ExpDisc { .. }
            | RadialWeight::ExpDiscSquared { .. }
            | RadialWeight::StandardDisc { .. } => Domain::Disc,
            RadialWeight::ExpPlane { .. } | RadialWeight::ExpExpPlane | RadialWeight::LogSqPlane => {
                Domain::Plane
            }
            RadialWeight::Custom { domain, .. } => *domain,
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let ok = match self.domain() {
            Domain::Disc => (0.0..1.0).contains(&r),
            Domain::Plane => r >= 0.0 && r.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "radius {r} outside [0, {}) for {self:?}",
                self.domain().boundary()
            )))
        }
    }

    /// ln v(r).
    pub fn log_v(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.log_v_unchecked(r))
    }

    pub(crate) fn log_v_unchecked(&self, r: f64) -> f64 {
        match self {
            RadialWeight::ExpDisc { a, b, w } => w.log_w(r) - a / (1.0 - r).powf(*b),
            RadialWeight::ExpDiscSquared { a, b } => -a / (1.0 - r * r).powf(*b),
            RadialWeight::StandardDisc { alpha, squared } => {
                let base = if *squared { 1.0 - r * r } else { 1.0 - r };
                alpha * base.ln()
            }
            RadialWeight::ExpPlane { p } => -r.powf(*p),
            RadialWeight::ExpExpPlane => -r.exp(),
            RadialWeight::LogSqPlane => {
                if r <= 1.0 {
                    0.0
                } else {
                    let l = r.ln();
                    -l * l
                }
            }
            RadialWeight::Custom { log_v, .. } => log_v(r),
        }
    }

    /// ln v at r = e^t; safe on the plane where r itself may be enormous.
    pub(crate) fn log_v_lnr(&self, t: f64) -> f64 {
        match self {
            RadialWeight::ExpPlane { p } => -(p * t).exp(),
            RadialWeight::ExpExpPlane => -t.exp().exp(),
            RadialWeight::LogSqPlane => {
                if t <= 0.0 {
                    0.0
                } else {
                    -t * t
                }
            }
            _ => self.log_v_unchecked(t.exp()),
        }
    }

    /// d/dr ln v(r). Defined on [0, R) for the built-in families; a
    /// non-finite result is reported as a domain error.
    pub fn dlog_v(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let d = self.dlog_v_unchecked(r);
        if d.is_nan() || d == f64::INFINITY {
            return Err(Error::domain(format!("{self:?} is not differentiable at r = {r}")));
        }
        Ok(d)
    }

    pub(crate) fn dlog_v_unchecked(&self, r: f64) -> f64 {
        match self {
            RadialWeight::ExpDisc { a, b, w } => w.dlog_w(r) - a * b / (1.0 - r).powf(b + 1.0),
            RadialWeight::ExpDiscSquared { a, b } => {
                -2.0 * a * b * r / (1.0 - r * r).powf(b + 1.0)
            }
            RadialWeight::StandardDisc { alpha, squared } => {
                if *squared {
                    -2.0 * alpha * r / (1.0 - r * r)
                } else {
                    -alpha / (1.0 - r)
                }
            }
            RadialWeight::ExpPlane { p } => -p * r.powf(p - 1.0),
            RadialWeight::ExpExpPlane => -r.exp(),
            RadialWeight::LogSqPlane => {
                if r <= 1.0 {
                    0.0
                } else {
                    -2.0 * r.ln() / r
                }
            }
            RadialWeight::Custom { dlog_v, .. } => dlog_v(r),
        }
    }

    /// -r v'(r)/v(r): the exponent whose power-weighted maximum sits at r.
    /// Strictly increasing in r for every built-in family.
    pub(crate) fn neg_r_dlog_v(&self, r: f64) -> f64 {
        match self {
            RadialWeight::ExpDisc { a, b, w } => {
                a * b * r / (1.0 - r).powf(b + 1.0) - r * w.dlog_w(r)
            }
            RadialWeight::ExpDiscSquared { a, b } => {
                2.0 * a * b * r * r / (1.0 - r * r).powf(b + 1.0)
            }
            RadialWeight::StandardDisc { alpha, squared } => {
                if *squared {
                    2.0 * alpha * r * r / (1.0 - r * r)
                } else {
                    alpha * r / (1.0 - r)
                }
            }
            RadialWeight::ExpPlane { p } => p * r.powf(*p),
            RadialWeight::ExpExpPlane => r * r.exp(),
            RadialWeight::LogSqPlane => {
                if r <= 1.0 {
                    0.0
                } else {
                    2.0 * r.ln()
                }
            }
            RadialWeight::Custom { dlog_v, .. } => -r * dlog_v(r),
        }
    }

    /// Same quantity at r = e^t, for plane solves in log-radius space.
    pub(crate) fn neg_r_dlog_v_lnr(&self, t: f64) -> f64 {
        match self {
            RadialWeight::ExpPlane { p } => p * (p * t).exp(),
            RadialWeight::ExpExpPlane => (t + t.exp()).exp(),
            RadialWeight::LogSqPlane => {
                if t <= 0.0 {
                    0.0
                } else {
                    2.0 * t
                }
            }
            _ => self.neg_r_dlog_v(t.exp()),
        }
    }

    /// Grid checks of the weight invariants (and the w-factor hypotheses for
    /// the disc exponential family). Empty list means all checks pass.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let grid = self.validation_grid();
        let logv: Vec<f64> = grid.iter().map(|&r| self.log_v_unchecked(r)).collect();

        for (i, (&r, &lv)) in grid.iter().zip(&logv).enumerate() {
            if lv.is_nan() || lv == f64::INFINITY {
                out.push(Violation {
                    kind: ViolationKind::NotFinite,
                    detail: format!("log v({r}) is not finite (grid index {i})"),
                });
                return out;
            }
        }

        for i in 0..grid.len() - 1 {
            if logv[i + 1] > logv[i] + 1e-9 {
                out.push(Violation {
                    kind: ViolationKind::Increasing,
                    detail: format!(
                        "v increases between r = {} and r = {} (log v: {} -> {})",
                        grid[i],
                        grid[i + 1],
                        logv[i],
                        logv[i + 1]
                    ),
                });
                break;
            }
        }

        // r^n v(r) -> 0 at the boundary: the log objective must peak
        // strictly inside the grid and fall off after its peak.
        for &n in &[1.0_f64, 16.0, 256.0] {
            let obj: Vec<f64> = grid
                .iter()
                .zip(&logv)
                .map(|(&r, &lv)| if r == 0.0 { f64::NEG_INFINITY } else { lv + n * r.ln() })
                .collect();
            let argmax = obj
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            let tail_falls = argmax + 1 < obj.len()
                && obj[obj.len() - 1] < obj[argmax] - 1e-6
                && obj[obj.len() - 1] <= obj[obj.len() - 2] + 1e-9;
            if !tail_falls {
                out.push(Violation {
                    kind: ViolationKind::NoBoundaryDecay,
                    detail: format!("r^{n} v(r) does not decay toward the boundary on the grid"),
                });
                break;
            }
        }

        if let RadialWeight::ExpDisc { b, w, .. } = self {
            out.extend(wfactor_violations(w, *b));
        }
        out
    }

    /// 512 radii for the grid checks: log-spaced in 1-r on the disc, in r on
    /// the plane, pushed toward the boundary until ln v drops below -1e6
    /// (capped where f64 runs out).
    pub(crate) fn validation_grid(&self) -> Vec<f64> {
        const N: usize = 512;
        match self.domain() {
            Domain::Disc => {
                let mut u_min: f64 = 1e-3;
                while u_min > 1e-12 && self.log_v_unchecked(1.0 - u_min) > -1e6 {
                    u_min *= 0.1;
                }
                let lo = u_min.ln();
                let hi = 0.0_f64; // u = 1, i.e. r = 0
                let mut grid: Vec<f64> = (0..N)
                    .map(|k| {
                        let t = hi + (lo - hi) * (k as f64) / (N as f64 - 1.0);
                        1.0 - t.exp()
                    })
                    .collect();
                grid[0] = 0.0;
                grid
            }
            Domain::Plane => {
                let mut r_max: f64 = 2.0;
                while r_max < 1e300 && self.log_v_unchecked(r_max) > -1e6 {
                    r_max *= 2.0;
                }
                let lo = (1e-3_f64).ln();
                let hi = r_max.ln();
                (0..N)
                    .map(|k| (lo + (hi - lo) * (k as f64) / (N as f64 - 1.0)).exp())
                    .collect()
            }
        }
    }
}

/// A failed grid check, as data.
#[derive(Clone, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NotFinite,
    Increasing,
    NoBoundaryDecay,
    /// w'/w must be non-increasing.
    WSlopeIncreasing,
    /// w'/w must grow slower than (1-r)^-(1+b/2) toward the boundary.
    WGrowth,
}

/// Hypothesis checks for the w factor of the disc exponential family.
pub(crate) fn wfactor_violations(w: &WFactor, b: f64) -> Vec<Violation> {
    let mut out = Vec::new();

    // w'/w non-increasing, sampled log-spaced in 1-r.
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..128 {
        let u = (0.5_f64).ln() + ((1e-9_f64).ln() - (0.5_f64).ln()) * (k as f64) / 127.0;
        let r = 1.0 - u.exp();
        let g = w.dlog_w(r);
        if let Some((rp, gp)) = prev {
            if g > gp + 1e-9 * gp.abs().max(1.0) {
                out.push(Violation {
                    kind: ViolationKind::WSlopeIncreasing,
                    detail: format!("w'/w increases between r = {rp} and r = {r} ({gp} -> {g})"),
                });
                break;
            }
        }
        prev = Some((r, g));
    }

    // Asymptotic growth exponent of |w'/w| near the boundary, estimated from
    // two sample points; it must stay strictly below 1 + b/2.
    let u1 = 1e-4_f64;
    let u2 = 1e-8_f64;
    let g1 = w.dlog_w(1.0 - u1).abs();
    let g2 = w.dlog_w(1.0 - u2).abs();
    if g1 > 1e-12 && g2 > 1e-12 {
        let beta = (g2.ln() - g1.ln()) / (u1.ln() - u2.ln());
        let cap = 1.0 + b / 2.0;
        if beta >= cap {
            out.push(Violation {
                kind: ViolationKind::WGrowth,
                detail: format!(
                    "w'/w grows like (1-r)^-{beta:.3} near the boundary; the exponent must stay below 1 + b/2 = {cap}"
                ),
            });
        }
    }
    out
}

/// Parses the CLI weight syntax: `expdisc:a=1,b=1,w=one`, `expdisc2:a=1,b=2`,
/// `std:alpha=2`, `expplane:p=1`, `expexpplane`, `logsq`. Keys are
/// case-insensitive; values are decimal literals.
pub fn parse_weight_spec(spec: &str) -> Result<RadialWeight> {
    let (name, rest) = match spec.find(':') {
        Some(i) => (&spec[..i], Some((&spec[i + 1..], i + 1))),
        None => (spec, None),
    };
    let name_lc = name.trim().to_ascii_lowercase();

    let mut pairs: Vec<(String, String, usize)> = Vec::new();
    if let Some((rest, base)) = rest {
        let mut offset = base;
        for part in rest.split(',') {
            let pos = offset;
            offset += part.len() + 1;
            if part.trim().is_empty() {
                return Err(Error::Parse { pos, msg: "empty key=value field".into() });
            }
            match part.find('=') {
                Some(eq) => {
                    let key = part[..eq].trim().to_ascii_lowercase();
                    let val = part[eq + 1..].trim().to_string();
                    pairs.push((key, val, pos));
                }
                None => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("expected key=value, got `{part}`"),
                    })
                }
            }
        }
    }

    let take_num = |pairs: &[(String, String, usize)], key: &str| -> Result<Option<f64>> {
        for (k, v, pos) in pairs {
            if k == key {
                return match v.parse::<f64>() {
                    Ok(x) => Ok(Some(x)),
                    Err(_) => Err(Error::Parse {
                        pos: *pos,
                        msg: format!("`{v}` is not a decimal literal for key `{key}`"),
                    }),
                };
            }
        }
        Ok(None)
    };
    let require = |key: &str, v: Option<f64>| -> Result<f64> {
        v.ok_or_else(|| Error::Parse {
            pos: spec.len(),
            msg: format!("missing required key `{key}` for weight `{name_lc}`"),
        })
    };

    match name_lc.as_str() {
        "expdisc" => {
            let a = require("a", take_num(&pairs, "a")?)?;
            let b = require("b", take_num(&pairs, "b")?)?;
            let mut w = WFactor::One;
            for (k, v, pos) in &pairs {
                if k == "w" {
                    w = match v.to_ascii_lowercase().as_str() {
                        "one" | "1" => WFactor::One,
                        "oneminusr" => WFactor::OneMinusR,
                        "invlog" => WFactor::InvLog,
                        "explogsq" => WFactor::ExpLogSq,
                        other => {
                            return Err(Error::Parse {
                                pos: *pos,
                                msg: format!("unknown w factor `{other}`"),
                            })
                        }
                    };
                }
            }
            RadialWeight::exp_disc(a, b, w)
        }
        "expdisc2" => {
            let a = require("a", take_num(&pairs, "a")?)?;
            let b = require("b", take_num(&pairs, "b")?)?;
            RadialWeight::exp_disc_squared(a, b)
        }
        "std" => RadialWeight::standard(require("alpha", take_num(&pairs, "alpha")?)?),
        "expplane" => RadialWeight::exp_plane(require("p", take_num(&pairs, "p")?)?),
        "expexpplane" => Ok(RadialWeight::exp_exp_plane()),
        "logsq" => Ok(RadialWeight::log_sq_plane()),
        other => Err(Error::Parse {
            pos: 0,
            msg: format!("unknown weight family `{other}`"),
        }),
    }
}

/// Canonical spec string for a built-in weight (used by reports).
pub fn weight_spec_string(w: &RadialWeight) -> String {
    match w {
        RadialWeight::ExpDisc { a, b, w } => {
            let wname = match w {
                WFactor::One => "one",
                WFactor::OneMinusR => "oneminusr",
                WFactor::InvLog => "invlog",
                WFactor::ExpLogSq => "explogsq",
                WFactor::Custom { .. } => "custom",
            };
            format!("expdisc:a={a},b={b},w={wname}")
        }
        RadialWeight::ExpDiscSquared { a, b } => format!("expdisc2:a={a},b={b}"),
        RadialWeight::StandardDisc { alpha, squared } => {
            if *squared {
                format!("std2:alpha={alpha}")
            } else {
                format!("std:alpha={alpha}")
            }
        }
        RadialWeight::ExpPlane { p } => format!("expplane:p={p}"),
        RadialWeight::ExpExpPlane => "expexpplane".into(),
        RadialWeight::LogSqPlane => "logsq".into(),
        RadialWeight::Custom { .. } => "custom".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expdisc11() -> RadialWeight {
        RadialWeight::exp_disc(1.0, 1.0, WFactor::One).unwrap()
    }

    #[test]
    fn log_v_exp_disc_at_zero() {
        assert!((expdisc11().log_v(0.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_v_standard_variant() {
        let w = RadialWeight::standard(2.0).unwrap();
        assert!((w.log_v(0.5).unwrap() - 2.0 * 0.5_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_v_logsq_at_e() {
        let w = RadialWeight::log_sq_plane();
        assert!((w.log_v(std::f64::consts::E).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn logsq_flat_below_one() {
        let w = RadialWeight::log_sq_plane();
        assert_eq!(w.log_v(0.2).unwrap(), 0.0);
        assert_eq!(w.log_v(1.0).unwrap(), 0.0);
        assert_eq!(w.dlog_v(0.5).unwrap(), 0.0);
    }

    #[test]
    fn dlog_v_exp_disc_at_zero() {
        assert!((expdisc11().dlog_v(0.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dlog_v_exp_plane() {
        let w = RadialWeight::exp_plane(2.0).unwrap();
        assert!((w.dlog_v(3.0).unwrap() + 12.0).abs() < 1e-12);
    }

    #[test]
    fn radius_outside_domain_errors() {
        assert!(expdisc11().log_v(1.0).is_err());
        assert!(expdisc11().log_v(-0.1).is_err());
        assert!(RadialWeight::log_sq_plane().log_v(f64::INFINITY).is_err());
    }

    #[test]
    fn dlog_v_matches_finite_differences() {
        let cases: Vec<RadialWeight> = vec![
            expdisc11(),
            RadialWeight::exp_disc(1.0, 2.0, WFactor::OneMinusR).unwrap(),
            RadialWeight::exp_disc(1.0, 1.0, WFactor::InvLog).unwrap(),
            RadialWeight::exp_disc(1.0, 1.0, WFactor::ExpLogSq).unwrap(),
            RadialWeight::exp_disc_squared(1.0, 2.0).unwrap(),
            RadialWeight::standard(1.5).unwrap(),
            RadialWeight::standard_squared(2.0).unwrap(),
            RadialWeight::exp_plane(1.0).unwrap(),
            RadialWeight::exp_exp_plane(),
        ];
        for w in &cases {
            let radii: Vec<f64> = match w.domain() {
                Domain::Disc => vec![0.05, 0.2, 0.5, 0.8, 0.9],
                Domain::Plane => vec![0.5, 1.3, 2.0, 4.0],
            };
            for &r in &radii {
                let h = 1e-6;
                let fd = (w.log_v(r + h).unwrap() - w.log_v(r - h).unwrap()) / (2.0 * h);
                let an = w.dlog_v(r).unwrap();
                let rel = (fd - an).abs() / an.abs().max(1.0);
                assert!(rel < 1e-6, "{w:?} at r={r}: fd={fd} analytic={an}");
            }
        }
        // log-sq plane away from the kink at r = 1
        let w = RadialWeight::log_sq_plane();
        for &r in &[1.5, 2.5, 10.0] {
            let h = 1e-6;
            let fd = (w.log_v(r + h).unwrap() - w.log_v(r - h).unwrap()) / (2.0 * h);
            let an = w.dlog_v(r).unwrap();
            assert!((fd - an).abs() / an.abs().max(1.0) < 1e-6);
        }
    }

    #[test]
    fn builtin_families_validate_clean() {
        let cases: Vec<RadialWeight> = vec![
            expdisc11(),
            RadialWeight::exp_disc(1.0, 2.0, WFactor::OneMinusR).unwrap(),
            RadialWeight::exp_disc(1.0, 1.0, WFactor::InvLog).unwrap(),
            RadialWeight::exp_disc(1.0, 1.0, WFactor::ExpLogSq).unwrap(),
            RadialWeight::exp_disc_squared(2.0, 1.0).unwrap(),
            RadialWeight::standard(1.0).unwrap(),
            RadialWeight::standard_squared(0.5).unwrap(),
            RadialWeight::exp_plane(2.0).unwrap(),
            RadialWeight::exp_exp_plane(),
            RadialWeight::log_sq_plane(),
        ];
        for w in cases {
            let v = w.validate();
            assert!(v.is_empty(), "{w:?}: {v:?}");
        }
    }

    #[test]
    fn increasing_custom_weight_flagged() {
        let w = RadialWeight::custom(
            Domain::Disc,
            Arc::new(|r| r),
            Arc::new(|_| 1.0),
        );
        let v = w.validate();
        assert!(v.iter().any(|x| x.kind == ViolationKind::Increasing), "{v:?}");
    }

    #[test]
    fn fast_growing_w_factor_flagged() {
        // w'/w = (1-r)^-3 grows too fast for b = 1 (cap is 1.5).
        let w = RadialWeight::exp_disc(
            1.0,
            1.0,
            WFactor::Custom {
                log_w: Arc::new(|r: f64| 0.5 / ((1.0 - r) * (1.0 - r)) - 0.5),
                dlog_w: Arc::new(|r: f64| (1.0 - r).powi(-3)),
            },
        )
        .unwrap();
        let v = w.validate();
        assert!(v.iter().any(|x| x.kind == ViolationKind::WGrowth), "{v:?}");
    }

    #[test]
    fn parse_round_trips_catalogue() {
        for spec in [
            "expdisc:a=1,b=1,w=one",
            "expdisc:a=1,b=2,w=oneminusr",
            "expdisc:A=0.5,B=1.5,W=invlog",
            "expdisc2:a=1,b=2",
            "std:alpha=2",
            "expplane:p=1",
            "expexpplane",
            "logsq",
        ] {
            parse_weight_spec(spec).unwrap();
        }
    }

    #[test]
    fn parse_reports_position() {
        match parse_weight_spec("expdisc:a=1,b=oops") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 12),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_weight_spec("nosuch:x=1").is_err());
        assert!(parse_weight_spec("expdisc:a=1").is_err()); // missing b
    }
}
