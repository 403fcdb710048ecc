//! Log-domain reductions and the bracketing searches shared by the solvers.

/// log(e^a + e^b); `-inf` acts as the additive identity.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log of a sum of exponentials with max extraction. Empty input gives `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let vals: Vec<f64> = terms.into_iter().collect();
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = vals.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// log(1 + q + ... + q^(count-1)) given lq = ln q, stable for lq near zero
/// and for long runs in either direction.
pub fn log_geom_sum(lq: f64, count: u64) -> f64 {
    debug_assert!(count >= 1);
    if count == 1 {
        return 0.0;
    }
    let n = count as f64;
    if (n * lq).abs() < 1e-8 {
        // sum ~ n * (1 + (n-1) lq / 2)
        return n.ln() + (n - 1.0) * lq / 2.0;
    }
    if lq > 0.0 {
        // (q^n - 1)/(q - 1)
        n * lq + (-(-(n * lq)).exp_m1()).ln() - lq.exp_m1().ln()
    } else {
        // (1 - q^n)/(1 - q)
        (-(n * lq).exp_m1()).ln() - (-lq.exp_m1()).ln()
    }
}

/// Bisection on a non-decreasing function: returns r with f(r) ~ target,
/// assuming f(lo) <= target <= f(hi). Runs to f64 resolution, at most 200
/// iterations.
pub(crate) fn bisect_increasing<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, target: f64, f: F) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximization on [lo, hi]; returns (argmax, max) including
/// the endpoints among the candidates.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> (f64, f64) {
    const INV: f64 = 0.618_033_988_749_894_9;
    let mut best = (lo, f(lo));
    let fhi = f(hi);
    if fhi > best.1 {
        best = (hi, fhi);
    }
    let mut x1 = hi - INV * (hi - lo);
    let mut x2 = lo + INV * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if f1 >= f2 {
            if f1 > best.1 {
                best = (x1, f1);
            }
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV * (hi - lo);
            f1 = f(x1);
        } else {
            if f2 > best.1 {
                best = (x2, f2);
            }
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo <= tol {
            break;
        }
    }
    if f1 > best.1 {
        best = (x1, f1);
    }
    if f2 > best.1 {
        best = (x2, f2);
    }
    best
}
