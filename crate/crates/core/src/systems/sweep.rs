//! Streaming measure of stage sets.
//!
//! Every ball of a stage is centred at a Farey fraction `a/b` of order `Q`
//! (non-reduced centres coincide with their reduced form and only the largest
//! radius matters). The sweep walks the Farey sequence, reorders balls by left
//! end in a small heap, merges them into components and records each
//! component's endpoints symbolically as `a/b ± r_b`, grouped by `b`. Ordering
//! decisions use a float filter with an exact fallback, so the result is a
//! rigorous enclosure of the exact measure.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MeasureOptions, RadiusRule, ResonantSystem, StageMeasure, StageSpec, Weight};
use crate::error::{Error, Result};
use crate::exact::{next_down, next_up, Enclosure, FractionSum};
use crate::farey::{totients, FareyIter, Frac};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureMethod {
    Empty,
    /// Balls pairwise disjoint; the measure is a sum over denominators.
    ClosedForm,
    Sweep,
}

/// Float comparisons closer than this are settled exactly.
const TOL: f64 = 1e-13;
/// Target number of swept points per parallel chunk.
const CHUNK_WORK: f64 = 2e7;

/// Radius of the ball at each reduced denominator `b` (zero when absent).
struct BallTable {
    order: i64,
    exact: Option<Vec<Frac>>,
    float: Vec<f64>,
    rmax_f: f64,
    rmax: Option<Frac>,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

impl BallTable {
    fn build(spec: &StageSpec) -> Result<Option<BallTable>> {
        let (lo, hi) = spec.window()?;
        let Some((q_lo, q_hi)) = spec.system.denominator_range(lo, hi) else {
            return Ok(None);
        };
        let order = q_hi;
        let f = spec.rule.function();
        let uniform = matches!(spec.rule, RadiusRule::Uniform(_));
        let common = if uniform { Some((f.exact_at(hi), f.float_at(hi)?)) } else { None };

        // the largest ball at a reduced centre comes from its smallest admissible weight
        let weight_for = |b: i64| -> Option<Weight> {
            match spec.system {
                ResonantSystem::ClassicalRationals { coprime_only: false } => {
                    let m = b * ceil_div(q_lo, b);
                    (m <= q_hi).then(|| spec.system.weight(m))
                }
                _ => (b >= q_lo).then(|| spec.system.weight(b)),
            }
        };
        let n = order as usize + 1;
        let mut exact: Option<Vec<Frac>> = Some(vec![Frac::ZERO; n]);
        for b in 1..=order {
            let (Some(weight), Some(v)) = (weight_for(b), exact.as_mut()) else { continue };
            let r = match &common {
                Some((ex, _)) => *ex,
                None => f.exact_at(weight),
            };
            match r {
                Some(r) => v[b as usize] = Frac::from_ratio(r),
                None => exact = None,
            }
        }
        let mut float = vec![0.0; n];
        for b in 1..=order {
            let Some(weight) = weight_for(b) else { continue };
            float[b as usize] = match (&exact, &common) {
                (Some(v), _) => v[b as usize].to_f64(),
                (None, Some((_, fl))) => *fl,
                (None, None) => f.float_at(weight)?,
            };
        }
        let rmax_f = float.iter().copied().fold(0.0, f64::max);
        let rmax = exact.as_ref().map(|v| v.iter().copied().max().unwrap_or(Frac::ZERO));
        Ok(Some(BallTable { order, exact, float, rmax_f, rmax }))
    }

    fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Whether all balls are pairwise disjoint: `2 r_max <= 1/Q²` bounds every
    /// Farey gap `1/(bb')` from below.
    fn separated(&self) -> bool {
        let q2 = (self.order as i128) * (self.order as i128);
        match self.rmax {
            Some(r) => r.num.checked_mul(2 * q2).is_some_and(|lhs| lhs <= r.den),
            None => 2.0 * self.rmax_f * (q2 as f64) <= 1.0 - 1e-9,
        }
    }
}

/// An endpoint `a/b ± r_b` with its float approximation.
#[derive(Clone, Copy, Debug)]
struct Key {
    approx: f64,
    a: i64,
    b: i64,
    neg: bool,
}

impl BallTable {
    fn key_value(&self, k: &Key) -> Option<Frac> {
        let r = self.exact.as_ref()?[k.b as usize];
        Frac::new(k.a as i128, k.b as i128).checked_add_signed(r, k.neg)
    }

    fn key_big(&self, k: &Key) -> BigRational {
        let x = BigRational::new(k.a.into(), k.b.into());
        let r = self.exact.as_ref().map_or(Frac::ZERO, |v| v[k.b as usize]);
        let r = BigRational::new(r.num.into(), r.den.into());
        if k.neg {
            x - r
        } else {
            x + r
        }
    }

    fn cmp_keys(&self, x: &Key, y: &Key) -> Ordering {
        let diff = x.approx - y.approx;
        if diff.abs() > TOL || !self.is_exact() {
            return x.approx.total_cmp(&y.approx);
        }
        match (self.key_value(x), self.key_value(y)) {
            (Some(u), Some(v)) => u.cmp_exact(v),
            _ => self.key_big(x).cmp(&self.key_big(y)),
        }
    }

    fn cmp_key_frac(&self, x: &Key, f: Frac) -> Ordering {
        let ff = f.to_f64();
        let diff = x.approx - ff;
        if diff.abs() > TOL || !self.is_exact() {
            return x.approx.total_cmp(&ff);
        }
        match self.key_value(x) {
            Some(u) => u.cmp_exact(f),
            None => self.key_big(x).cmp(&BigRational::new(f.num.into(), f.den.into())),
        }
    }
}

/// Heap entry: a ball ordered (reversed, for a min-heap) by the float
/// approximation of its left end. Near ties are settled exactly on removal.
#[derive(Clone, Copy, Debug)]
struct Ball {
    left: f64,
    right: f64,
    a: i64,
    b: i64,
}

impl Ball {
    fn left_key(&self) -> Key {
        Key { approx: self.left, a: self.a, b: self.b, neg: true }
    }

    fn right_key(&self) -> Key {
        Key { approx: self.right, a: self.a, b: self.b, neg: false }
    }
}

impl PartialEq for Ball {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left
    }
}
impl Eq for Ball {}
impl PartialOrd for Ball {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ball {
    fn cmp(&self, other: &Self) -> Ordering {
        other.left.total_cmp(&self.left)
    }
}

/// Signed endpoint tallies: the measure is
/// `Σ_b point[b]/b + Σ_b radius[b]·r_b + extra`.
struct Tally {
    point: Vec<i128>,
    radius: Vec<i64>,
    extra: FractionSum,
    work: u64,
}

impl Tally {
    fn new(order: i64) -> Self {
        let n = order as usize + 1;
        Tally { point: vec![0; n], radius: vec![0; n], extra: FractionSum::new(), work: 0 }
    }

    fn add_key(&mut self, k: &Key, sign: i64) {
        self.point[k.b as usize] += (sign * k.a) as i128;
        self.radius[k.b as usize] += if k.neg { -sign } else { sign };
    }

    fn merge(&mut self, other: Tally) {
        for (x, y) in self.point.iter_mut().zip(other.point) {
            *x += y;
        }
        for (x, y) in self.radius.iter_mut().zip(other.radius) {
            *x += y;
        }
        self.extra.merge(other.extra);
        self.work += other.work;
    }

    fn double(&mut self) {
        self.point.iter_mut().for_each(|x| *x *= 2);
        self.radius.iter_mut().for_each(|x| *x *= 2);
        let extra = self.extra.clone();
        self.extra.merge(extra);
    }

    fn finish(self, table: &BallTable, exact_limit: usize) -> Enclosure {
        let mut sum = self.extra;
        for (b, &p) in self.point.iter().enumerate().skip(1) {
            if p != 0 {
                sum.add(p, b as i128);
            }
        }
        match &table.exact {
            Some(radii) => {
                for (b, &c) in self.radius.iter().enumerate() {
                    if c != 0 {
                        let r = radii[b];
                        let num = r.num.checked_mul(c as i128).expect("radius tally overflow");
                        sum.add(num, r.den);
                    }
                }
                sum.enclosure(exact_limit)
            }
            None => {
                let base = sum.enclosure(0);
                let (mut s, mut comp, mut budget) = (0.0f64, 0.0f64, 0.0f64);
                for (b, &c) in self.radius.iter().enumerate() {
                    if c != 0 {
                        let term = c as f64 * table.float[b];
                        budget += term.abs();
                        let y = term - comp;
                        let t = s + y;
                        comp = (t - s) - y;
                        s = t;
                    }
                }
                // radii carry a few ulps each from log/exp evaluation
                let err = budget * 1e-13 + f64::MIN_POSITIVE;
                Enclosure { lo: next_down(base.lo + s - err), hi: next_up(base.hi + s + err), exact: None }
            }
        }
    }
}

fn dyadic_floor(v: f64) -> Frac {
    const S: f64 = (1u64 << 52) as f64;
    let v = v.clamp(0.0, 1.0);
    Frac::new((v * S).floor() as i128, 1 << 52)
}

fn dyadic_ceil(v: f64) -> Frac {
    const S: f64 = (1u64 << 52) as f64;
    let v = v.clamp(0.0, 1.0);
    Frac::new((v * S).ceil() as i128, 1 << 52)
}

struct Sweeper<'a> {
    table: &'a BallTable,
    c: Frac,
    d: Frac,
    cur: Option<(Key, Key)>,
    tally: Tally,
    cluster: Vec<Ball>,
}

impl Sweeper<'_> {
    fn process(&mut self, ball: &Ball) {
        let t = self.table;
        let (left, right) = (ball.left_key(), ball.right_key());
        match self.cur {
            None => self.cur = Some((left, right)),
            Some((l, r)) => {
                if t.cmp_keys(&left, &r) == Ordering::Greater {
                    self.close(l, r);
                    self.cur = Some((left, right));
                } else if t.cmp_keys(&right, &r) == Ordering::Greater {
                    self.cur = Some((l, right));
                }
            }
        }
    }

    fn close(&mut self, l: Key, r: Key) {
        let t = self.table;
        if t.cmp_key_frac(&r, self.c) != Ordering::Greater || t.cmp_key_frac(&l, self.d) != Ordering::Less {
            return;
        }
        if t.cmp_key_frac(&r, self.d) == Ordering::Greater {
            self.tally.extra.add(self.d.num, self.d.den);
        } else {
            self.tally.add_key(&r, 1);
        }
        if t.cmp_key_frac(&l, self.c) == Ordering::Less {
            self.tally.extra.add(-self.c.num, self.c.den);
        } else {
            self.tally.add_key(&l, -1);
        }
    }

    /// Process every ball whose left end lies below `limit`, which no later ball can precede.
    fn flush(&mut self, heap: &mut BinaryHeap<Ball>, limit: f64) {
        while let Some(&top) = heap.peek() {
            if top.left >= limit {
                return;
            }
            heap.pop();
            if heap.peek().is_none_or(|next| next.left - top.left > TOL) {
                self.process(&top);
                continue;
            }
            // a chain of near-equal left ends: order it exactly
            let mut cluster = std::mem::take(&mut self.cluster);
            cluster.clear();
            cluster.push(top);
            while let Some(&next) = heap.peek() {
                if next.left - cluster[cluster.len() - 1].left > TOL {
                    break;
                }
                cluster.push(next);
                heap.pop();
            }
            if cluster[cluster.len() - 1].left + TOL >= limit {
                // the chain reaches balls that are not yet final
                heap.extend(cluster.drain(..));
                self.cluster = cluster;
                return;
            }
            let t = self.table;
            cluster.sort_by(|x, y| t.cmp_keys(&x.left_key(), &y.left_key()));
            for ball in &cluster {
                self.process(ball);
            }
            self.cluster = cluster;
        }
    }

    fn run(mut self) -> Tally {
        let t = self.table;
        let margin = t.rmax_f * (1.0 + 1e-9) + 1e-12;
        let from = dyadic_floor(self.c.to_f64() - margin);
        let to = dyadic_ceil(self.d.to_f64() + margin);
        let mut heap: BinaryHeap<Ball> = BinaryHeap::new();
        for (a, b) in FareyIter::new(t.order, from, to) {
            self.tally.work += 1;
            let rf = t.float[b as usize];
            if rf <= 0.0 {
                continue;
            }
            let x = a as f64 / b as f64;
            self.flush(&mut heap, x - t.rmax_f - 2.0 * TOL);
            heap.push(Ball { left: x - rf, right: x + rf, a, b });
        }
        self.flush(&mut heap, f64::INFINITY);
        if let Some((l, r)) = self.cur.take() {
            self.close(l, r);
        }
        self.tally
    }
}

fn split_window(c: Frac, d: Frac, parts: i128) -> Option<Vec<(Frac, Frac)>> {
    let mut cuts = Vec::with_capacity(parts as usize + 1);
    for i in 0..=parts {
        let num =
            c.num.checked_mul(d.den)?.checked_mul(parts - i)?.checked_add(d.num.checked_mul(c.den)?.checked_mul(i)?)?;
        let den = c.den.checked_mul(d.den)?.checked_mul(parts)?;
        let g = num_integer::gcd(num, den).max(1);
        cuts.push(Frac::new(num / g, den / g));
    }
    Some(cuts.windows(2).map(|w| (w[0], w[1])).collect())
}

fn empty_measure() -> StageMeasure {
    StageMeasure {
        enclosure: Enclosure::from_exact(BigRational::zero()),
        exact_mode: true,
        method: MeasureMethod::Empty,
        work: 0,
    }
}

pub(super) fn measure(spec: &StageSpec, c: Frac, d: Frac, opts: MeasureOptions) -> Result<StageMeasure> {
    if spec.rule.function().is_zero() || c.cmp_exact(d) == Ordering::Equal {
        return Ok(empty_measure());
    }
    let Some(table) = BallTable::build(spec)? else {
        return Ok(empty_measure());
    };
    if table.rmax_f <= 0.0 {
        return Ok(empty_measure());
    }
    let full = c == Frac::ZERO && d.cmp_exact(Frac::ONE) == Ordering::Equal;
    if full && table.separated() {
        return closed_form(&table, opts);
    }

    // stage sets are symmetric under x -> 1 - x
    let (c, d) = if full { (Frac::ZERO, Frac::new(1, 2)) } else { (c, d) };
    let q = table.order as f64;
    let span = (d.to_f64() - c.to_f64() + 2.0 * table.rmax_f).min(1.0);
    let est = 0.304 * q * q * span + q;
    if est > opts.cap as f64 {
        return Err(Error::ResourceCap { requested: est as u128, cap: opts.cap });
    }
    let parts = ((est / CHUNK_WORK).ceil() as i128).clamp(1, 512);
    let windows = split_window(c, d, parts).unwrap_or_else(|| vec![(c, d)]);
    let tallies: Vec<Tally> = windows
        .par_iter()
        .map(|&(lo, hi)| {
            Sweeper { table: &table, c: lo, d: hi, cur: None, tally: Tally::new(table.order), cluster: Vec::new() }
                .run()
        })
        .collect();
    let mut total = Tally::new(table.order);
    for t in tallies {
        total.merge(t);
    }
    if full {
        total.double();
    }
    let work = total.work;
    let enclosure = total.finish(&table, opts.exact_limit);
    Ok(StageMeasure { enclosure, exact_mode: table.is_exact(), method: MeasureMethod::Sweep, work })
}

/// Disjoint balls: `b = 1` contributes the two half balls at 0 and 1, every
/// other denominator `φ(b)` full balls.
#[allow(clippy::needless_range_loop)]
fn closed_form(table: &BallTable, opts: MeasureOptions) -> Result<StageMeasure> {
    if (table.order as u128) > opts.cap {
        return Err(Error::ResourceCap { requested: table.order as u128, cap: opts.cap });
    }
    let phi = totients(table.order as usize);
    let mut tally = Tally::new(table.order);
    for b in 1..=table.order as usize {
        if table.float[b] > 0.0 {
            let count = if b == 1 { 1 } else { i64::from(phi[b]) };
            tally.radius[b] = 2 * count;
        }
    }
    tally.work = table.order as u64;
    let work = tally.work;
    let enclosure = tally.finish(table, opts.exact_limit);
    Ok(StageMeasure { enclosure, exact_mode: table.is_exact(), method: MeasureMethod::ClosedForm, work })
}

#[cfg(test)]
fn radius_table(spec: &StageSpec) -> Vec<f64> {
    BallTable::build(spec).unwrap().map(|t| t.float).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::super::{delta_stage, RadiusFn, StageSet, DEFAULT_CAP};
    use super::*;
    use crate::functions::{FunctionForm, Rational};
    use num_rational::Ratio;

    fn power(a: i64) -> RadiusFn {
        FunctionForm::power(Rational::from_integer(a)).into()
    }

    fn scaled_power(s: (i64, i64), a: i64) -> RadiusFn {
        FunctionForm::power_log(Rational::new(s.0, s.1), Rational::from_integer(a), 0.into(), 0.into()).unwrap().into()
    }

    fn exact_of(set: &StageSet) -> BigRational {
        match set {
            StageSet::Exact(s) => s.measure(),
            StageSet::Float(_) => panic!("expected exact"),
        }
    }

    fn check_against_materialised(spec: &StageSpec) {
        let direct = exact_of(&delta_stage(spec, DEFAULT_CAP).unwrap());
        let swept = measure(spec, Frac::ZERO, Frac::ONE, MeasureOptions::default()).unwrap();
        assert_eq!(swept.enclosure.exact.as_ref(), Some(&direct), "{spec:?}");
    }

    #[test]
    fn matches_materialised_sets() {
        for system in [ResonantSystem::rationals(), ResonantSystem::coprime_rationals(), ResonantSystem::ford()] {
            for k in [2u32, 3, 6] {
                for n in 1..=3u32 {
                    for rule in [
                        RadiusRule::PerPoint(power(-2)),
                        RadiusRule::PerPoint(power(-3)),
                        RadiusRule::PerPoint(scaled_power((1, 3), -1)),
                        RadiusRule::Uniform(scaled_power((6, 1), -2)),
                        RadiusRule::Uniform(power(-1)),
                    ] {
                        let spec = StageSpec::new(system, rule, k, n).unwrap();
                        check_against_materialised(&spec);
                    }
                }
            }
        }
    }

    #[test]
    fn windowed_sweep_is_additive() {
        let spec = StageSpec::new(ResonantSystem::rationals(), RadiusRule::PerPoint(power(-2)), 3, 3).unwrap();
        let opts = MeasureOptions::default();
        let whole = measure(&spec, Frac::ZERO, Frac::ONE, opts).unwrap().enclosure.exact.unwrap();
        let cut = Frac::new(5, 13);
        let a = measure(&spec, Frac::ZERO, cut, opts).unwrap().enclosure.exact.unwrap();
        let b = measure(&spec, cut, Frac::ONE, opts).unwrap().enclosure.exact.unwrap();
        assert_eq!(whole, a + b);
    }

    #[test]
    fn windowed_sweep_matches_intersection() {
        let spec =
            StageSpec::new(ResonantSystem::rationals(), RadiusRule::Uniform(scaled_power((6, 1), -2)), 6, 2).unwrap();
        let StageSet::Exact(set) = delta_stage(&spec, DEFAULT_CAP).unwrap() else { panic!() };
        let (c, d) = (Ratio::new(1i128, 7), Ratio::new(5i128, 9));
        let window = crate::intervals::IntervalSet::normalize([(c, d)]);
        let want = set.intersect(&window).measure();
        let got = measure(&spec, Frac::from_ratio(c), Frac::from_ratio(d), MeasureOptions::default())
            .unwrap()
            .enclosure
            .exact
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn closed_form_used_when_separated() {
        let spec = StageSpec::new(ResonantSystem::rationals(), RadiusRule::PerPoint(power(-3)), 2, 6).unwrap();
        let m = measure(&spec, Frac::ZERO, Frac::ONE, MeasureOptions::default()).unwrap();
        assert_eq!(m.method, MeasureMethod::ClosedForm);
        let direct = exact_of(&delta_stage(&spec, DEFAULT_CAP).unwrap());
        assert_eq!(m.enclosure.exact, Some(direct));
    }

    #[test]
    fn float_mode_for_log_radii() {
        let psi = FunctionForm::parse("r^-2 * log(r)^-1").unwrap();
        let spec = StageSpec::new(ResonantSystem::rationals(), RadiusRule::PerPoint(psi.into()), 2, 4).unwrap();
        let StageSet::Float(set) = delta_stage(&spec, DEFAULT_CAP).unwrap() else { panic!("expected float") };
        let m = measure(&spec, Frac::ZERO, Frac::ONE, MeasureOptions::default()).unwrap();
        assert!(!m.exact_mode);
        let direct = set.measure();
        assert!(m.enclosure.lo <= direct + 1e-12 && direct - 1e-12 <= m.enclosure.hi, "{m:?} vs {direct}");
        assert!(m.enclosure.width() < 1e-10);
    }

    #[test]
    fn large_enclosure_is_tight() {
        let spec = StageSpec::new(ResonantSystem::rationals(), RadiusRule::PerPoint(power(-2)), 6, 4).unwrap();
        let opts = MeasureOptions { exact_limit: 0, ..MeasureOptions::default() };
        let m = measure(&spec, Frac::ZERO, Frac::ONE, opts).unwrap();
        assert!(m.enclosure.width() < 1e-12);
        let exact = measure(&spec, Frac::ZERO, Frac::ONE, MeasureOptions::default()).unwrap();
        let v = exact.enclosure.midpoint();
        assert!(m.enclosure.lo <= v && v <= m.enclosure.hi);
    }

    #[test]
    fn radius_table_uses_smallest_multiple() {
        let spec = StageSpec::new(ResonantSystem::rationals(), RadiusRule::PerPoint(power(-1)), 2, 3).unwrap();
        let t = radius_table(&spec);
        // window (4, 8]: b = 1, 2, 4 use q = 5, 6, 8; b = 3 uses q = 6
        assert_eq!(t[1], 1.0 / 5.0);
        assert_eq!(t[2], 1.0 / 6.0);
        assert_eq!(t[3], 1.0 / 6.0);
        assert_eq!(t[4], 1.0 / 8.0);
        assert_eq!(t[7], 1.0 / 7.0);
    }
}
