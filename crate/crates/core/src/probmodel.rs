//! Log-space evaluation of the random-subset model for Goldbach failures.
//!
//! The model treats `A_n` and `B_n` as independent uniform subsets of
//! `{0, …, n−1}` with sizes `k1` and `k2`; the chance they miss each other is
//! `C(n−k1, k2) / C(n, k2)`. With `k1 = k2 = n / ln n` this is bounded by
//! `(1 − 1/ln n)^{n/ln n}` and, more loosely, by `exp(−n / ln² n)`. Summing the
//! latter from `N` upward gives the total violation probability above a
//! verified threshold, which is in turn bounded by `e^{−√N}` and `e^{−N^α}`.
//!
//! Every value here is carried as a natural logarithm: the interesting
//! magnitudes (`10^{-183}`, `e^{-10^{15}}`) are far below `f64::MIN_POSITIVE`.

use std::f64::consts::LN_10;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subsets::IntegerSubset;
use crate::verifier::build_ab;

/// A probability stored as its natural logarithm, `≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct LogProb(f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn from_ln(ln_value: f64) -> Result<Self> {
        if ln_value.is_nan() || ln_value > 0.0 {
            return Err(Error::Domain(format!("{ln_value} is not the log of a probability")));
        }
        Ok(LogProb(ln_value))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / LN_10
    }

    /// The plain probability; underflows to 0 below about `e^{-745}`.
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "10^{}", self.log10())
    }
}

/// `ln(e^a + e^b)` without leaving log space.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Chance that uniform random `k1`- and `k2`-subsets of `{0, …, n−1}` are
/// disjoint, `C(n−k1, k2) / C(n, k2)`, as `Σ_{i<k2} ln(1 − k1/(n−i))`.
pub fn exact_disjoint_prob(n: u64, k1: u64, k2: u64) -> Result<LogProb> {
    if k1 > n || k2 > n {
        return Err(Error::Domain(format!("subset sizes ({k1}, {k2}) exceed n = {n}")));
    }
    if k2 > n - k1 {
        return Ok(LogProb::ZERO);
    }
    let k1f = k1 as f64;
    let ln: f64 = (0..k2).map(|i| (-k1f / (n - i) as f64).ln_1p()).sum();
    Ok(LogProb(ln.min(0.0)))
}

/// Subset sizes `k1 = k2 = ⌊n / ln n⌋` used when no concrete subset is given.
pub fn paper_mode_sizes(n: u64) -> Result<(u64, u64)> {
    check_floor(n as f64)?;
    let k = (n as f64 / (n as f64).ln()).floor() as u64;
    Ok((k, k))
}

/// `(|A_n|, |B_n|)` measured on a real subset.
pub fn empirical_sizes(subset: &IntegerSubset, n: u64) -> Result<(u64, u64)> {
    let ab = build_ab(subset, n)?;
    Ok((ab.a.len() as u64, ab.b.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundForm {
    /// `(1 − 1/ln n)^{n/ln n}`
    Product,
    /// `exp(−n / ln² n)`
    Exponential,
}

fn check_floor(n: f64) -> Result<()> {
    if !(n >= 3.0) {
        return Err(Error::Domain(format!("logarithmic formulas need n >= 3, got {n}")));
    }
    Ok(())
}

#[inline]
fn decay_exponent(n: f64) -> f64 {
    let l = n.ln();
    n / (l * l)
}

pub fn lemma_bound(n: f64, form: BoundForm) -> Result<LogProb> {
    check_floor(n)?;
    let l = n.ln();
    let ln = match form {
        BoundForm::Product => (n / l) * (-1.0 / l).ln_1p(),
        BoundForm::Exponential => -decay_exponent(n),
    };
    Ok(LogProb(ln))
}

/// `Σ_{n ≥ from} exp(−n / ln² n)`, truncated with an explicit remainder bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSum {
    pub from: u64,
    pub ln_sum: f64,
    pub terms_used: u64,
    /// Log of an upper bound on everything after the last summed term.
    pub truncation_bound_ln: f64,
}

impl TailSum {
    pub fn log10_sum(&self) -> f64 {
        self.ln_sum / LN_10
    }

    pub fn log10_truncation_bound(&self) -> f64 {
        self.truncation_bound_ln / LN_10
    }
}

/// Below `e³` the exponent `n / ln² n` is not concave, so chord bounds fail.
const CONCAVE_FROM: u64 = 21;

/// Log of an upper bound on `Σ_{m ≥ start} exp(−g(m))` with `g(x) = x/ln²x`.
///
/// `g` is increasing and concave on `[21, ∞)`, so on each octave `[a, 2a)` it
/// lies above its chord and the octave's terms are dominated by a geometric
/// series with ratio `e^{−s}`, `s` the chord slope. Octave bounds shrink
/// roughly quadratically, so the walk stops once one is `e^{−60}` below the
/// running total and charges twice that octave for the rest.
fn remainder_bound_ln(start: u64) -> f64 {
    debug_assert!(start >= CONCAVE_FROM);
    let mut acc = f64::NEG_INFINITY;
    let mut a = start as f64;
    loop {
        let slope = (decay_exponent(2.0 * a) - decay_exponent(a)) / a;
        let octave = -decay_exponent(a) - (-(-slope).exp_m1()).ln();
        if octave < acc - 60.0 || !a.is_finite() {
            return log_add_exp(acc, octave + std::f64::consts::LN_2);
        }
        acc = log_add_exp(acc, octave);
        a *= 2.0;
    }
}

pub fn tail_sum(from: u64, rel_eps: f64) -> Result<TailSum> {
    if from < 3 {
        return Err(Error::Domain(format!("tail sum needs N >= 3, got {from}")));
    }
    if !(rel_eps > 0.0 && rel_eps < 1.0) {
        return Err(Error::Usage(format!("rel_eps must lie in (0, 1), got {rel_eps}")));
    }
    let ln_eps = rel_eps.ln();
    let mut ln_sum = f64::NEG_INFINITY;
    let mut n = from;
    loop {
        ln_sum = log_add_exp(ln_sum, -decay_exponent(n as f64));
        n += 1;
        if n >= CONCAVE_FROM {
            let bound = remainder_bound_ln(n);
            if bound <= ln_eps + ln_sum {
                return Ok(TailSum {
                    from,
                    ln_sum,
                    terms_used: n - from,
                    truncation_bound_ln: bound,
                });
            }
        }
    }
}

/// `e^{−√N}`.
pub fn sqrt_bound(n: f64) -> Result<LogProb> {
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("sqrt bound needs N >= 0, got {n}")));
    }
    Ok(LogProb(-n.sqrt()))
}

/// `n / ln² n − (√n + ln 2√n)`; positive where the `e^{−√n}` comparison holds.
pub fn inequality_margin(n: f64) -> f64 {
    let root = n.sqrt();
    decay_exponent(n) - root - (2.0 * root).ln()
}

/// Smallest `n0` such that the margin is positive on every integer of
/// `[n0, scan_limit]`, confirmed by a full scan from 3 and by the margin still
/// increasing at `scan_limit`.
pub fn inequality_crossover(scan_limit: u64) -> Result<u64> {
    if scan_limit < 10_000 {
        return Err(Error::Usage(format!("scan limit must be >= 10000, got {scan_limit}")));
    }
    let last_failure = (3..=scan_limit)
        .rev()
        .find(|&n| inequality_margin(n as f64) <= 0.0);
    let not_found = |reason: String| Error::NotFound { scan_limit, reason };
    let n0 = match last_failure {
        Some(n) if n == scan_limit => return Err(not_found("margin not positive at the limit".into())),
        Some(n) => n + 1,
        None => 3,
    };
    let (here, before) = (
        inequality_margin(scan_limit as f64),
        inequality_margin((scan_limit - 1) as f64),
    );
    if here <= before {
        return Err(not_found(format!("margin not increasing at the limit ({before} -> {here})")));
    }
    Ok(n0)
}

/// Root of `N^α + (α−1) ln N + ln α = N / ln² N` on `(½, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSolution {
    pub alpha: f64,
    pub residual: f64,
    pub alpha_closed_form: f64,
    pub n: f64,
}

const ALPHA_TOLERANCE: f64 = 1e-12;
const ALPHA_MAX_ITER: usize = 200;

/// `f(α) = N^α + (α−1) ln N + ln α − N / ln² N`, increasing in `α`.
/// `N^α` is formed as `exp(α ln N)`.
pub fn alpha_equation(alpha: f64, n: f64) -> f64 {
    let l = n.ln();
    (alpha * l).exp() + (alpha - 1.0) * l + alpha.ln() - decay_exponent(n)
}

pub fn alpha_solve(n: f64) -> Result<AlphaSolution> {
    if !(n >= 1e3) {
        return Err(Error::Domain(format!("alpha solver needs N >= 1000, got {n}")));
    }
    let (mut lo, mut hi) = (0.5, 1.0);
    let (f_low, f_high) = (alpha_equation(lo, n), alpha_equation(hi, n));
    if !(f_low < 0.0 && f_high > 0.0) {
        return Err(Error::NoRoot { n, f_low, f_high });
    }
    for _ in 0..ALPHA_MAX_ITER {
        if hi - lo <= ALPHA_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if alpha_equation(mid, n) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    Ok(AlphaSolution {
        alpha,
        residual: alpha_equation(alpha, n).abs(),
        alpha_closed_form: alpha_approx(n)?,
        n,
    })
}

/// `1 − 2 ln ln N / ln N`.
pub fn alpha_approx(n: f64) -> Result<f64> {
    if !(n > std::f64::consts::E) {
        return Err(Error::Domain(format!("alpha approximation needs N > e, got {n}")));
    }
    let l = n.ln();
    Ok(1.0 - 2.0 * l.ln() / l)
}

/// `e^{−N^α}` with `α` from [`alpha_solve`].
pub fn alpha_tail_bound(n: f64) -> Result<LogProb> {
    let sol = alpha_solve(n)?;
    Ok(LogProb(-(sol.alpha * n.ln()).exp()))
}
