//! Local ubiquity ratios `m(B ∩ Δ(ρ, n)) / m(B)` and natural cover sums.

use std::io::{self, Write};

use num_rational::Ratio;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Enclosure;
use crate::farey::{totients, Frac};
use crate::functions::{series_classify, Convergence, FunctionForm, Rational, SeriesSpec};
use crate::intervals::Exact;
use crate::systems::{stage_measure_in, MeasureOptions, RadiusFn, RadiusRule, ResonantSystem, StageSpec};

/// A closed ball `[center - radius, center + radius]` inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Exact,
    pub radius: Exact,
}

impl Ball {
    pub fn new(center: Exact, radius: Exact) -> Result<Self> {
        let b = Ball { center, radius };
        if radius <= Exact::zero() || b.lo() < Exact::zero() || b.hi() > Exact::from_integer(1) {
            return Err(Error::Invalid(format!("ball B({center}, {radius}) must be non-degenerate and inside [0, 1]")));
        }
        Ok(b)
    }

    /// The ball with the given endpoints.
    pub fn from_interval(lo: Exact, hi: Exact) -> Result<Self> {
        let two = Exact::from_integer(2);
        Ball::new((lo + hi) / two, (hi - lo) / two)
    }

    pub fn lo(&self) -> Exact {
        self.center - self.radius
    }

    pub fn hi(&self) -> Exact {
        self.center + self.radius
    }

    pub fn measure(&self) -> Exact {
        self.radius * Exact::from_integer(2)
    }
}

/// `m(B ∩ Δ(ρ, n)) / m(B)` with uniform radius `ρ(k^n)` over all weights `<= k^n`.
pub fn ubiquity_ratio(
    system: &ResonantSystem,
    rho: &RadiusFn,
    k: u32,
    n: u32,
    ball: &Ball,
    opts: MeasureOptions,
) -> Result<Enclosure> {
    let spec = StageSpec::new(*system, RadiusRule::Uniform(rho.clone()), k, n)?;
    let m = stage_measure_in(&spec, Frac::from_ratio(ball.lo()), Frac::from_ratio(ball.hi()), opts)?;
    let mb = Enclosure::from_exact(num_rational::BigRational::new(
        (*ball.measure().numer()).into(),
        (*ball.measure().denom()).into(),
    ));
    let mut ratio = m.enclosure.ratio(&mb);
    // the true ratio lies in [0, 1]
    ratio.lo = ratio.lo.max(0.0);
    ratio.hi = ratio.hi.min(1.0);
    Ok(ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: u32,
    pub ratio: f64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UbiquityReport {
    pub ball: Ball,
    pub k: u32,
    pub rho: RadiusFn,
    pub per_n: Vec<RatioRow>,
    /// Smallest certified ratio over the scanned stages.
    pub kappa_hat: f64,
    /// First scanned `n` whose certified ratio reaches the target.
    pub n_min: Option<u32>,
}

/// One report per ball over `n_lo..=n_hi`; balls are processed in parallel.
#[allow(clippy::too_many_arguments)]
pub fn estimate_kappa(
    system: &ResonantSystem,
    rho: &RadiusFn,
    k: u32,
    balls: &[Ball],
    n_lo: u32,
    n_hi: u32,
    target: f64,
    opts: MeasureOptions,
) -> Result<Vec<UbiquityReport>> {
    if n_lo > n_hi {
        return Err(Error::Degenerate(format!("empty stage range {n_lo}..={n_hi}; κ is undefined")));
    }
    balls
        .par_iter()
        .map(|ball| {
            let per_n = (n_lo..=n_hi)
                .map(|n| {
                    let e = ubiquity_ratio(system, rho, k, n, ball, opts)?;
                    Ok(RatioRow { n, ratio: e.midpoint(), ratio_lo: e.lo, ratio_hi: e.hi })
                })
                .collect::<Result<Vec<_>>>()?;
            let kappa_hat = per_n.iter().map(|r| r.ratio_lo).fold(f64::INFINITY, f64::min);
            let n_min = per_n.iter().find(|r| r.ratio_lo >= target).map(|r| r.n);
            Ok(UbiquityReport { ball: *ball, k, rho: rho.clone(), per_n, kappa_hat, n_min })
        })
        .collect()
}

/// Empirical κ: the smallest `kappa_hat` over a set of reports.
pub fn empirical_kappa(reports: &[UbiquityReport]) -> Option<f64> {
    reports.iter().map(|r| r.kappa_hat).min_by(f64::total_cmp)
}

pub fn write_reports_csv<W: Write>(reports: &[UbiquityReport], mut w: W) -> io::Result<()> {
    writeln!(w, "ball_lo,ball_hi,n,ratio,ratio_lo,ratio_hi")?;
    for rep in reports {
        let (lo, hi) = (to_f64(rep.ball.lo()), to_f64(rep.ball.hi()));
        for r in &rep.per_n {
            writeln!(w, "{lo},{hi},{},{:.17e},{:.17e},{:.17e}", r.n, r.ratio, r.ratio_lo, r.ratio_hi)?;
        }
    }
    Ok(())
}

fn to_f64(q: Exact) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Cover sum contributions of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverStage {
    pub n: u32,
    pub balls: u128,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSum {
    pub total: f64,
    pub stages: Vec<CoverStage>,
    /// Convergence of the matching series `Σ r^u f(ψ(r))`, when the family can decide it.
    pub verdict: Option<Convergence>,
}

/// `Σ_{n=m_start}^{m_end} Σ_{balls B of stage n} f(diam B)`, the cost of
/// covering the limsup set by the stages from `m_start` on.
pub fn natural_cover_sum(
    f: &FunctionForm,
    rule: &RadiusRule,
    system: &ResonantSystem,
    k: u32,
    m_start: u32,
    m_end: u32,
    cap: u128,
) -> Result<CoverSum> {
    if m_start < 1 || m_start > m_end {
        return Err(Error::Invalid(format!("bad stage range {m_start}..={m_end}")));
    }
    let f = f.as_dimension()?;
    let spec_hi = StageSpec::new(*system, rule.clone(), k, m_end)?;
    let (_, top) = spec_hi.window()?;
    let q_top = system.denominator_range(Ratio::zero(), top).map_or(0, |r| r.1);
    let needs_phi = !matches!(system, ResonantSystem::ClassicalRationals { coprime_only: false });
    if q_top as u128 > cap {
        return Err(Error::ResourceCap { requested: q_top as u128, cap });
    }
    let phi = if needs_phi { totients(q_top as usize) } else { Vec::new() };
    let count = |q: i64| -> u128 {
        if !needs_phi {
            q as u128 + 1
        } else if q == 1 {
            2
        } else {
            u128::from(phi[q as usize])
        }
    };
    let ln_f_of_diam = |radius_ln: f64| -> Result<f64> { f.ln_evaluate_from_ln(std::f64::consts::LN_2 + radius_ln) };

    let mut stages = Vec::new();
    for n in m_start..=m_end {
        let spec = StageSpec::new(*system, rule.clone(), k, n)?;
        let (lo, hi) = spec.window()?;
        let Some((q_lo, q_hi)) = system.denominator_range(lo, hi) else {
            stages.push(CoverStage { n, balls: 0, sum: 0.0 });
            continue;
        };
        let balls: u128 = (q_lo..=q_hi).map(count).sum();
        let sum = match rule.function() {
            RadiusFn::Zero => 0.0,
            RadiusFn::Form(psi) => match rule {
                RadiusRule::Uniform(_) => {
                    let ln_r = psi.ln_evaluate_from_ln(ln_weight(hi))?;
                    balls as f64 * ln_f_of_diam(ln_r)?.exp()
                }
                RadiusRule::PerPoint(_) => {
                    let mut s = 0.0;
                    for q in q_lo..=q_hi {
                        let ln_r = psi.ln_evaluate_from_ln(ln_weight(system.weight(q)))?;
                        s += count(q) as f64 * ln_f_of_diam(ln_r)?.exp();
                    }
                    s
                }
            },
        };
        stages.push(CoverStage { n, balls, sum });
    }
    let total = stages.iter().map(|s| s.sum).sum();
    let verdict = match (rule, rule.function()) {
        (RadiusRule::PerPoint(_), RadiusFn::Form(psi)) => {
            // points per unit weight grow like r (rationals) or stay bounded (Ford)
            let u = match system {
                ResonantSystem::ClassicalRationals { .. } => Rational::from_integer(1),
                ResonantSystem::FordHoroballs { .. } => Rational::zero(),
            };
            SeriesSpec::new(u, Some(f.clone()), psi.clone()).ok().map(|s| series_classify(&s))
        }
        _ => None,
    };
    Ok(CoverSum { total, stages, verdict })
}

fn ln_weight(w: Ratio<i128>) -> f64 {
    (*w.numer() as f64).ln() - (*w.denom() as f64).ln()
}
