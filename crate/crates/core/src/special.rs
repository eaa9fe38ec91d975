//! Gegenbauer polynomials and small combinatorial helpers.

use crate::error::{Error, Result};

const ENDPOINT_SLACK: f64 = 1e-9;

/// Gegenbauer polynomial `C_l^α(t)` by three-term recurrence.
///
/// Arguments within `1e-9` of `[-1, 1]` are clamped.
pub fn gegenbauer_eval(l: usize, alpha: f64, t: f64) -> Result<f64> {
    let t = clamp_unit(t)?;
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(*gegenbauer_all(l, alpha, t).last().unwrap())
}

/// `[C_0^α(t), ..., C_l^α(t)]`. No argument checks.
pub(crate) fn gegenbauer_all(l: usize, alpha: f64, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(l + 1);
    out.push(1.0);
    if l == 0 {
        return out;
    }
    out.push(2.0 * alpha * t);
    for k in 2..=l {
        let kf = k as f64;
        let next = (2.0 * t * (kf + alpha - 1.0) * out[k - 1] - (kf + 2.0 * alpha - 2.0) * out[k - 2]) / kf;
        out.push(next);
    }
    out
}

/// `C_l^α(1) = binom(l + 2α - 1, l)` for every `l ≤ max_l`, via the ratio
/// `C_l(1) / C_{l-1}(1) = (l + 2α - 1) / l`.
pub(crate) fn gegenbauer_at_one(max_l: usize, alpha: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_l + 1);
    out.push(1.0);
    for l in 1..=max_l {
        let lf = l as f64;
        let prev = out[l - 1];
        out.push(prev * (lf + 2.0 * alpha - 1.0) / lf);
    }
    out
}

pub(crate) fn clamp_unit(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + ENDPOINT_SLACK {
        return Err(Error::domain(format!("argument {t} outside [-1, 1]")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Exact binomial coefficient for the moderate sizes used by level multiplicities.
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}
