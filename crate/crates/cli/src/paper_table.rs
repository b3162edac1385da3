//! Reference figures that can be recomputed, each with its pass rule.

use std::f64::consts::LN_10;

use anyhow::Result;
use serde::Serialize;

use goldbach_core::*;

#[derive(Debug, Serialize)]
pub struct Row {
    pub quantity: &'static str,
    pub paper_value: &'static str,
    pub computed_log10: f64,
    pub pass: bool,
}

pub fn rows() -> Result<Vec<Row>> {
    let p1 = lemma_bound(1e4, BoundForm::Exponential)?.log10();
    let p2 = lemma_bound(4e4, BoundForm::Exponential)?.log10();
    let t1 = tail_sum(20_000, 1e-12)?.log10_sum();
    let t2 = tail_sum(50_000, 1e-12)?.log10_sum();
    let closed = alpha_approx(4e18)?;
    let solved = alpha_solve(4e18)?.alpha;
    let alpha_bound = alpha_tail_bound(4e18)?.ln();
    let sqrt_big = sqrt_bound(1e18)?.ln();
    let sqrt_small = sqrt_bound(1e8)?.log10();
    let in_alpha_window = |a: f64| a > 0.80 && a < 0.83;

    Ok(vec![
        Row {
            quantity: "P(10000)",
            paper_value: "<1e-51",
            computed_log10: p1,
            pass: p1 < -51.0,
        },
        Row {
            quantity: "P(40000)",
            paper_value: "<1e-154",
            computed_log10: p2,
            pass: p2 < -154.0,
        },
        Row {
            quantity: "sum_{n>=20000} P(n)",
            paper_value: "~1e-86",
            computed_log10: t1,
            pass: (t1 + 86.0).abs() <= 1.0,
        },
        Row {
            quantity: "sum_{n>=50000} P(n)",
            paper_value: "~1e-183",
            computed_log10: t2,
            pass: (t2 + 183.0).abs() <= 1.0,
        },
        Row {
            quantity: "alpha_closed_form(N=4e18)",
            paper_value: "~0.8",
            computed_log10: closed.log10(),
            pass: in_alpha_window(closed),
        },
        Row {
            quantity: "alpha_solved(N=4e18)",
            paper_value: "~0.8",
            computed_log10: solved.log10(),
            pass: in_alpha_window(solved),
        },
        Row {
            quantity: "exp(-N^alpha) at N=4e18",
            paper_value: "<exp(-1e15)",
            computed_log10: alpha_bound / LN_10,
            pass: alpha_bound <= -1e15,
        },
        Row {
            quantity: "exp(-sqrt(N)) at N=1e18",
            paper_value: "<exp(-1e9)",
            computed_log10: sqrt_big / LN_10,
            pass: sqrt_big == -1e9,
        },
        Row {
            quantity: "exp(-sqrt(N)) at N=1e8",
            paper_value: "~1e-4343",
            computed_log10: sqrt_small,
            pass: (sqrt_small + 4343.0).abs() <= 1.0,
        },
    ])
}
