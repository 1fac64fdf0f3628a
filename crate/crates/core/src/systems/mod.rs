//! Resonant systems, their stage sets and stage measures.
//!
//! A resonant system is a countable family of points in `[0, 1]` with
//! positive weights. Two instances are provided: rationals `p/q` weighted by
//! `q`, and Ford horoball bases `p/q` weighted by `2Cq²`.

mod sweep;

use std::io::{self, Write};

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedSub, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Enclosure;
use crate::farey::Frac;
use crate::functions::{FunctionForm, Rational};
use crate::intervals::{Exact, IntervalSet};
use crate::seed::sample_rng;

pub use sweep::MeasureMethod;

/// Weights are positive rationals.
pub type Weight = Ratio<i128>;

/// Default limit on the work units (enumerated pairs or swept points) of one stage.
pub const DEFAULT_CAP: u128 = 100_000_000;

/// Constants of the growth condition `a r^δ <= m(B(x, r)) <= b r^δ` for `r <= r_o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureModel {
    pub delta: Rational,
    pub a_const: f64,
    pub b_const: f64,
    pub r_nought: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelCheck {
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub holds: bool,
}

impl MeasureModel {
    pub fn new(delta: Rational, a_const: f64, b_const: f64, r_nought: f64) -> Result<Self> {
        if delta <= Rational::zero() || !(a_const > 0.0) || !(a_const <= b_const) || !(r_nought > 0.0) {
            return Err(Error::Invalid(format!(
                "measure model needs δ > 0, 0 < a <= b, r_o > 0 (got δ={delta}, a={a_const}, b={b_const}, r_o={r_nought})"
            )));
        }
        Ok(MeasureModel { delta, a_const, b_const, r_nought })
    }

    /// Lebesgue measure on `[0, 1]`: δ = 1, a = 1, b = 2, r_o = 1/2.
    pub fn unit_interval() -> Self {
        MeasureModel { delta: Rational::from_integer(1), a_const: 1.0, b_const: 2.0, r_nought: 0.5 }
    }

    /// Lebesgue measure of `B(x, r) ∩ [0, 1]`.
    pub fn ball_measure(x: f64, r: f64) -> f64 {
        ((x + r).min(1.0) - (x - r).max(0.0)).max(0.0)
    }

    /// Check the growth condition on random balls centred in `[0, 1]` with `r <= r_o`.
    pub fn check_balls(&self, samples: usize, seed: u64) -> ModelCheck {
        let delta = self.delta.to_f64().unwrap_or(1.0);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..samples {
            let mut rng = sample_rng(seed, i as u64);
            let x: f64 = rng.random();
            let r = self.r_nought * (1.0 - rng.random::<f64>());
            let ratio = Self::ball_measure(x, r) / r.powf(delta);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let holds = samples > 0 && lo >= self.a_const - 1e-12 && hi <= self.b_const + 1e-12;
        ModelCheck { samples, min_ratio: lo, max_ratio: hi, holds }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResonantSystem {
    /// Points `p/q` with `0 <= p <= q`, weight `q`.
    ClassicalRationals { coprime_only: bool },
    /// Ford horoball bases `p/q` in lowest terms, weight `2Cq²`.
    FordHoroballs { c: Rational },
}

/// One resonant point `p/q` and its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonantPoint {
    pub p: i64,
    pub q: i64,
    pub weight: Weight,
}

impl ResonantPoint {
    pub fn point(&self) -> Exact {
        Ratio::new(self.p as i128, self.q as i128)
    }
}

impl ResonantSystem {
    pub fn rationals() -> Self {
        ResonantSystem::ClassicalRationals { coprime_only: false }
    }

    pub fn coprime_rationals() -> Self {
        ResonantSystem::ClassicalRationals { coprime_only: true }
    }

    pub fn ford() -> Self {
        ResonantSystem::FordHoroballs { c: Rational::from_integer(1) }
    }

    pub fn ford_with(c: Rational) -> Result<Self> {
        if c <= Rational::zero() {
            return Err(Error::Invalid(format!("Ford constant must be positive, got {c}")));
        }
        Ok(ResonantSystem::FordHoroballs { c })
    }

    fn ford_factor(c: Rational) -> Weight {
        Ratio::new(2 * *c.numer() as i128, *c.denom() as i128)
    }

    pub fn weight(&self, q: i64) -> Weight {
        match *self {
            ResonantSystem::ClassicalRationals { .. } => Ratio::from_integer(q as i128),
            ResonantSystem::FordHoroballs { c } => Self::ford_factor(c) * Ratio::from_integer(q as i128 * q as i128),
        }
    }

    /// Inclusive range of denominators `q` whose weight lies in `(lo, hi]`.
    pub fn denominator_range(&self, lo: Weight, hi: Weight) -> Option<(i64, i64)> {
        let (q_min, q_max) = match *self {
            ResonantSystem::ClassicalRationals { .. } => (lo.floor().to_integer() + 1, hi.floor().to_integer()),
            ResonantSystem::FordHoroballs { c } => {
                let f = Self::ford_factor(c);
                // q² > Y iff q² > floor(Y), for integer q
                let y = (lo / f).floor().to_integer();
                let x = (hi / f).floor().to_integer();
                let q_min = if y < 0 { 1 } else { y.sqrt() + 1 };
                let q_max = if x < 1 { 0 } else { x.sqrt() };
                (q_min, q_max)
            }
        };
        let q_min = q_min.max(1);
        if q_min > q_max {
            return None;
        }
        Some((i64::try_from(q_min).ok()?, i64::try_from(q_max).ok()?))
    }

    /// Upper bound on the number of pairs with denominator in `[q_lo, q_hi]`.
    pub fn pair_count_bound(&self, q_lo: i64, q_hi: i64) -> u128 {
        let (a, b) = (q_lo as u128, q_hi as u128);
        // Σ (q + 1) over the range
        (b - a + 1) * (a + b + 2) / 2
    }

    fn numerators(&self, q: i64) -> impl Iterator<Item = i64> + '_ {
        let coprime = match *self {
            ResonantSystem::ClassicalRationals { coprime_only } => coprime_only,
            ResonantSystem::FordHoroballs { .. } => true,
        };
        (0..=q).filter(move |&p| !coprime || p.gcd(&q) == 1)
    }
}

/// All resonant points with weight in `(lo, hi]`, ordered by weight then point.
pub fn enumerate(system: &ResonantSystem, lo: Weight, hi: Weight, cap: u128) -> Result<Vec<ResonantPoint>> {
    if lo < Weight::zero() || lo >= hi {
        return Err(Error::Invalid(format!("weight bounds must satisfy 0 <= lo < hi, got ({lo}, {hi}]")));
    }
    let Some((q_lo, q_hi)) = system.denominator_range(lo, hi) else {
        return Ok(Vec::new());
    };
    let bound = system.pair_count_bound(q_lo, q_hi);
    if bound > cap {
        return Err(Error::ResourceCap { requested: bound, cap });
    }
    let mut out = Vec::with_capacity(bound as usize);
    for q in q_lo..=q_hi {
        let weight = system.weight(q);
        out.extend(system.numerators(q).map(|p| ResonantPoint { p, q, weight }));
    }
    Ok(out)
}

/// A radius function; `Zero` stands for `ψ ≡ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadiusFn {
    Zero,
    Form(FunctionForm),
}

impl From<FunctionForm> for RadiusFn {
    fn from(f: FunctionForm) -> Self {
        RadiusFn::Form(f)
    }
}

impl RadiusFn {
    pub fn exact_at(&self, w: Weight) -> Option<Exact> {
        match self {
            RadiusFn::Zero => Some(Exact::zero()),
            RadiusFn::Form(f) => f.evaluate_at_ratio(w),
        }
    }

    pub fn float_at(&self, w: Weight) -> Result<f64> {
        match self {
            RadiusFn::Zero => Ok(0.0),
            RadiusFn::Form(f) => {
                let ln_w = w.numer().to_f64().unwrap_or(f64::NAN).ln() - w.denom().to_f64().unwrap_or(f64::NAN).ln();
                Ok(f.ln_evaluate_from_ln(ln_w)?.exp())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RadiusFn::Zero)
    }
}

/// How balls in a stage get their radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadiusRule {
    /// Radius `ψ(β)` for weights in `(k^{n-1}, k^n]`.
    PerPoint(RadiusFn),
    /// Common radius `ρ(k^n)` for all weights `<= k^n`.
    Uniform(RadiusFn),
}

impl RadiusRule {
    pub fn function(&self) -> &RadiusFn {
        match self {
            RadiusRule::PerPoint(f) | RadiusRule::Uniform(f) => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub system: ResonantSystem,
    pub rule: RadiusRule,
    pub k: u32,
    pub n: u32,
}

impl StageSpec {
    pub fn new(system: ResonantSystem, rule: RadiusRule, k: u32, n: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid(format!("k must be an integer >= 2, got {k}")));
        }
        if n < 1 {
            return Err(Error::Invalid("stage index n must be >= 1".into()));
        }
        let spec = StageSpec { system, rule, k, n };
        spec.window()?;
        Ok(spec)
    }

    pub fn with_n(&self, n: u32) -> Result<Self> {
        StageSpec::new(self.system, self.rule.clone(), self.k, n)
    }

    /// `k^n` as an exact weight.
    pub fn k_pow(&self, n: u32) -> Result<Weight> {
        (self.k as i128)
            .checked_pow(n)
            .filter(|v| *v <= i64::MAX as i128)
            .map(Ratio::from_integer)
            .ok_or_else(|| Error::Invalid(format!("k^n = {}^{} is too large", self.k, n)))
    }

    /// The weight window `(lo, hi]` of this stage.
    pub fn window(&self) -> Result<(Weight, Weight)> {
        let hi = self.k_pow(self.n)?;
        let lo = match self.rule {
            RadiusRule::PerPoint(_) => self.k_pow(self.n - 1)?,
            RadiusRule::Uniform(_) => Weight::zero(),
        };
        Ok((lo, hi))
    }
}

/// A materialised stage set.
#[derive(Debug, Clone, PartialEq)]
pub enum StageSet {
    Exact(IntervalSet<Exact>),
    Float(IntervalSet<f64>),
}

impl StageSet {
    pub fn measure_f64(&self) -> f64 {
        match self {
            StageSet::Exact(s) => s.measure_exact_f64(),
            StageSet::Float(s) => s.measure(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            StageSet::Exact(s) => s.len(),
            StageSet::Float(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_float(&self) -> IntervalSet<f64> {
        match self {
            StageSet::Exact(s) => s.to_float(),
            StageSet::Float(s) => s.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        match self {
            StageSet::Exact(s) => s.write_csv(w),
            StageSet::Float(s) => s.write_csv(w),
        }
    }
}

/// The stage set as an explicit union of clipped balls.
pub fn delta_stage(spec: &StageSpec, cap: u128) -> Result<StageSet> {
    let (lo, hi) = spec.window()?;
    if spec.rule.function().is_zero() {
        return Ok(StageSet::Exact(IntervalSet::empty()));
    }
    let points = enumerate(&spec.system, lo, hi, cap)?;
    let uniform = match &spec.rule {
        RadiusRule::Uniform(f) => Some(f),
        RadiusRule::PerPoint(_) => None,
    };
    let exact_radius = |w: Weight| -> Option<Exact> {
        match uniform {
            Some(f) => f.exact_at(hi),
            None => spec.rule.function().exact_at(w),
        }
    };
    let exact: Option<Vec<(Exact, Exact)>> = points
        .iter()
        .map(|pt| {
            let r = exact_radius(pt.weight)?;
            let c = pt.point();
            Some((c.checked_sub(&r)?, c.checked_add(&r)?))
        })
        .collect();
    if let Some(pairs) = exact {
        return Ok(StageSet::Exact(IntervalSet::normalize(pairs)));
    }
    let float_radius = |w: Weight| match uniform {
        Some(f) => f.float_at(hi),
        None => spec.rule.function().float_at(w),
    };
    let pairs = points
        .iter()
        .map(|pt| {
            let r = float_radius(pt.weight)?;
            let c = pt.p as f64 / pt.q as f64;
            Ok((c - r, c + r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StageSet::Float(IntervalSet::normalize(pairs)))
}

/// Tuning for [`stage_measure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions {
    /// Work cap (swept points or summed denominators).
    pub cap: u128,
    /// Largest number of denominator groups for which the exact rational value is formed.
    pub exact_limit: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { cap: DEFAULT_CAP, exact_limit: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageMeasure {
    pub enclosure: Enclosure,
    pub exact_mode: bool,
    pub method: MeasureMethod,
    /// Farey terms swept, or denominators summed.
    pub work: u64,
}

impl StageMeasure {
    pub fn value(&self) -> f64 {
        self.enclosure.midpoint()
    }
}

/// Lebesgue measure of the stage set, without materialising it.
pub fn stage_measure(spec: &StageSpec, opts: MeasureOptions) -> Result<StageMeasure> {
    stage_measure_in(spec, Frac::ZERO, Frac::ONE, opts)
}

/// Lebesgue measure of the stage set inside `[c, d] ⊆ [0, 1]`.
pub fn stage_measure_in(spec: &StageSpec, c: Frac, d: Frac, opts: MeasureOptions) -> Result<StageMeasure> {
    if c < Frac::ZERO || d > Frac::ONE || c > d {
        return Err(Error::Invalid("measurement window must satisfy 0 <= c <= d <= 1".into()));
    }
    sweep::measure(spec, c, d, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanTrend {
    /// Stage measures decay; partial sums level off.
    Bounded,
    /// Stage measures stay bounded below; partial sums keep growing.
    Growing,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: u32,
    pub measure: f64,
    pub measure_lo: f64,
    pub measure_hi: f64,
    pub partial_sum: f64,
    pub partial_sum_lo: f64,
    pub partial_sum_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub trend: ScanTrend,
}

/// Stage measures for `n = n_lo..=n_hi` with running partial sums.
pub fn stage_measure_scan(spec: &StageSpec, n_lo: u32, n_hi: u32, opts: MeasureOptions) -> Result<ScanReport> {
    if n_lo < 1 || n_lo > n_hi {
        return Err(Error::Invalid(format!("bad stage range {n_lo}..={n_hi}")));
    }
    let mut rows = Vec::new();
    let (mut s, mut s_lo, mut s_hi) = (0.0, 0.0, 0.0);
    for n in n_lo..=n_hi {
        let m = stage_measure(&spec.with_n(n)?, opts)?;
        let e = &m.enclosure;
        s += e.midpoint();
        s_lo += e.lo;
        s_hi += e.hi;
        rows.push(ScanRow {
            n,
            measure: e.midpoint(),
            measure_lo: e.lo,
            measure_hi: e.hi,
            partial_sum: s,
            partial_sum_lo: crate::exact::next_down(s_lo),
            partial_sum_hi: crate::exact::next_up(s_hi),
        });
    }
    let trend = scan_trend(&rows);
    Ok(ScanReport { rows, trend })
}

fn scan_trend(rows: &[ScanRow]) -> ScanTrend {
    if rows.len() < 3 {
        return ScanTrend::Inconclusive;
    }
    let max = rows.iter().map(|r| r.measure).fold(0.0, f64::max);
    if max == 0.0 {
        return ScanTrend::Bounded;
    }
    let tail = &rows[rows.len() / 2..];
    let last = rows[rows.len() - 1].measure;
    let decaying = tail.windows(2).all(|w| w[1].measure <= w[0].measure * (1.0 + 1e-9));
    if decaying && last < 0.1 * max {
        ScanTrend::Bounded
    } else if tail.iter().all(|r| r.measure >= 0.1 * max) {
        ScanTrend::Growing
    } else {
        ScanTrend::Inconclusive
    }
}

impl ScanReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,measure,partial_sum")?;
        for r in &self.rows {
            writeln!(w, "{},{:.17e},{:.17e}", r.n, r.measure, r.partial_sum)?;
        }
        Ok(())
    }
}
