use serde::{Deserialize, Serialize};

use super::{ratio_f64, Family, FunctionForm, Regime};
use crate::error::{Error, Result};

/// Symbolic verdict on `h(k^{n+1}) <= λ h(k^n)` for all large `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KRegularity {
    /// Regular; any `λ` strictly between `limit_ratio` and 1 works eventually.
    Regular {
        limit_ratio: f64,
    },
    NotRegular {
        limit_ratio: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityCheck {
    pub verdict: KRegularity,
    /// `(n, h(k^{n+1}) / h(k^n))` over the scanned range.
    pub ratios: Vec<(u32, f64)>,
    pub numeric_agrees: bool,
}

/// Decide k-regularity symbolically, then confirm on `n ∈ [n_lo, n_hi]`.
pub fn is_k_regular(form: &FunctionForm, k: f64, n_lo: u32, n_hi: u32) -> Result<RegularityCheck> {
    if !(k > 1.0) {
        return Err(Error::Invalid(format!("k must exceed 1, got {k}")));
    }
    if form.regime() != Regime::Large {
        return Err(Error::Invalid("k-regularity concerns large arguments".into()));
    }
    if n_lo >= n_hi {
        return Err(Error::Degenerate(format!("empty n range [{n_lo}, {n_hi}]")));
    }
    let verdict = match form.family() {
        Family::ExpPower => KRegularity::Regular { limit_ratio: 0.0 },
        Family::PowerLog => {
            let limit_ratio = k.powf(ratio_f64(form.power_exp()));
            if form.power_exp() < 0.into() {
                KRegularity::Regular { limit_ratio }
            } else {
                KRegularity::NotRegular { limit_ratio }
            }
        }
    };

    let ln_k = k.ln();
    let ratios: Vec<(u32, f64)> = (n_lo..=n_hi)
        .filter_map(|n| {
            let a = form.ln_evaluate_from_ln(f64::from(n) * ln_k).ok()?;
            let b = form.ln_evaluate_from_ln(f64::from(n + 1) * ln_k).ok()?;
            Some((n, (b - a).exp()))
        })
        .collect();
    let numeric_agrees = numeric_verdict(&ratios, verdict);
    Ok(RegularityCheck { verdict, ratios, numeric_agrees })
}

fn numeric_verdict(ratios: &[(u32, f64)], verdict: KRegularity) -> bool {
    let (Some(&(n0, r0)), Some(&(n1, r1))) = (ratios.first(), ratios.last()) else {
        return false;
    };
    match verdict {
        KRegularity::Regular { limit_ratio } => {
            // bounded away from 1 on the upper half of the range, near the limit at the end
            let upper = &ratios[ratios.len() / 2..];
            upper.iter().all(|&(_, r)| r < 1.0) && (r1 - limit_ratio).abs() <= (1.0 - limit_ratio) / 2.0
        }
        KRegularity::NotRegular { limit_ratio } => {
            if limit_ratio > 1.0 {
                return r1 > 1.0;
            }
            // ratio → 1: the gap to 1 shrinks at least like 1/n
            let (g0, g1) = ((1.0 - r0).abs(), (1.0 - r1).abs());
            g1 <= 1.5 * g0 * f64::from(n0) / f64::from(n1) + 1e-15
        }
    }
}
