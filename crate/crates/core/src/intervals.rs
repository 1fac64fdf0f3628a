//! Finite unions of closed subintervals of `[0, 1]`.
//!
//! Endpoints are either exact rationals (`Ratio<i128>`) or `f64`. Open and
//! closed ends are not distinguished: touching intervals merge, and a single
//! point carries no measure, so it is dropped.

use std::fmt::{self, Debug, Display};
use std::io::{self, Write};

use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::FractionSum;

/// Exact rational endpoint type.
pub type Exact = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArithmeticMode {
    Exact,
    Float,
}

/// Scalar usable as an interval endpoint.
pub trait Endpoint: Copy + PartialOrd + Debug + Display + Send + Sync {
    const MODE: ArithmeticMode;
    /// Value type of [`IntervalSet::measure`].
    type Sum: Clone + Debug;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn to_f64(self) -> f64;
    fn measure_of(pairs: &[(Self, Self)]) -> Self::Sum;
}

impl Endpoint for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;
    type Sum = f64;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn measure_of(pairs: &[(f64, f64)]) -> f64 {
        // compensated summation keeps the error at a few ulps per term
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &(lo, hi) in pairs {
            let y = (hi - lo) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }
}

impl Endpoint for Exact {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;
    type Sum = BigRational;

    fn zero() -> Self {
        Ratio::from_integer(0)
    }
    fn one() -> Self {
        Ratio::from_integer(1)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
    fn measure_of(pairs: &[(Exact, Exact)]) -> BigRational {
        let mut sum = FractionSum::new();
        for &(lo, hi) in pairs {
            sum.add_ratio(hi);
            sum.sub_ratio(lo);
        }
        sum.exact()
    }
}

/// Sorted, pairwise separated closed intervals inside `[0, 1]`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Endpoint> Debug for IntervalSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{lo}, {hi}]")?;
        }
        f.write_str("}")
    }
}

impl<T: Endpoint> Default for IntervalSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Endpoint> IntervalSet<T> {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn unit() -> Self {
        IntervalSet { intervals: vec![(T::zero(), T::one())] }
    }

    /// Clip to `[0, 1]`, drop empty pairs, sort and merge overlapping or touching pairs.
    pub fn normalize<I: IntoIterator<Item = (T, T)>>(raw: I) -> Self {
        let (zero, one) = (T::zero(), T::one());
        let mut v: Vec<(T, T)> = raw
            .into_iter()
            .filter_map(|(lo, hi)| {
                let lo = if lo < zero { zero } else { lo };
                let hi = if hi > one { one } else { hi };
                (lo < hi).then_some((lo, hi))
            })
            .collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("endpoints must be ordered"));
        let mut out: Vec<(T, T)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { intervals: out }
    }

    /// The ball `(center - radius, center + radius)` clipped to `[0, 1]`.
    pub fn ball(center: T, radius: T) -> Self {
        Self::normalize([(center.sub(radius), center.add(radius))])
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn mode(&self) -> ArithmeticMode {
        T::MODE
    }

    pub fn measure(&self) -> T::Sum {
        T::measure_of(&self.intervals)
    }

    pub fn measure_f64(&self) -> f64 {
        self.intervals.iter().map(|&(lo, hi)| hi.sub(lo).to_f64()).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalize(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = if a[i].0 > b[j].0 { a[i].0 } else { b[j].0 };
            let hi = if a[i].1 < b[j].1 { a[i].1 } else { b[j].1 };
            if lo < hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { intervals: out }
    }

    /// Intersection with the ball `(center - radius, center + radius)`.
    pub fn intersect_ball(&self, center: T, radius: T) -> Self {
        if !(radius > T::zero()) {
            return Self::empty();
        }
        self.intersect(&Self::ball(center, radius))
    }

    /// Whether every point of `other` lies in `self`.
    pub fn contains_set(&self, other: &Self) -> bool {
        other.intervals.iter().all(|&(lo, hi)| {
            let idx = self.intervals.partition_point(|iv| iv.1 < hi);
            self.intervals.get(idx).is_some_and(|iv| iv.0 <= lo && hi <= iv.1)
        })
    }

    /// Whether the two sets share a set of positive measure.
    pub fn overlaps(&self, other: &Self) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn to_float(&self) -> IntervalSet<f64> {
        IntervalSet::normalize(self.intervals.iter().map(|&(lo, hi)| (lo.to_f64(), hi.to_f64())))
    }

    /// CSV rows `lo,hi` (decimal), plus exact text columns in exact mode.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        match T::MODE {
            ArithmeticMode::Exact => {
                writeln!(w, "lo,hi,lo_exact,hi_exact")?;
                for &(lo, hi) in &self.intervals {
                    writeln!(w, "{:.17e},{:.17e},{lo},{hi}", lo.to_f64(), hi.to_f64())?;
                }
            }
            ArithmeticMode::Float => {
                writeln!(w, "lo,hi")?;
                for &(lo, hi) in &self.intervals {
                    writeln!(w, "{:.17e},{:.17e}", lo.to_f64(), hi.to_f64())?;
                }
            }
        }
        Ok(())
    }
}

impl IntervalSet<Exact> {
    /// Exact measure, as an `f64` for convenience.
    pub fn measure_exact_f64(&self) -> f64 {
        let m = self.measure();
        if m.is_zero() {
            0.0
        } else {
            m.to_f64().unwrap_or(f64::NAN)
        }
    }
}

/// Shorthand for an exact rational `n/d`.
pub fn frac(n: i128, d: i128) -> Exact {
    Ratio::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(i128, i128, i128, i128)]) -> IntervalSet<Exact> {
        IntervalSet::normalize(pairs.iter().map(|&(a, b, c, d)| (frac(a, b), frac(c, d))))
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn merges_overlaps() {
        let s = IntervalSet::normalize([(0.0, 0.5), (0.25, 0.75)]);
        assert_eq!(s.intervals(), &[(0.0, 0.75)]);
        assert_eq!(s.measure(), 0.75);
        assert!(IntervalSet::<f64>::normalize([]).is_empty());
    }

    #[test]
    fn clips_to_unit() {
        let s = IntervalSet::normalize([(0.9, 1.2), (-0.1, 0.05)]);
        assert_eq!(s.intervals(), &[(0.0, 0.05), (0.9, 1.0)]);
        assert!((s.measure() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn touching_merge_and_points_vanish() {
        let s = set(&[(0, 1, 1, 2), (1, 2, 1, 1), (1, 3, 1, 3)]);
        assert_eq!(s.intervals(), &[(frac(0, 1), frac(1, 1))]);
    }

    #[test]
    fn exact_measure() {
        assert_eq!(IntervalSet::<Exact>::unit().measure(), big(1, 1));
        let s = set(&[(0, 1, 1, 8), (3, 8, 5, 8), (7, 8, 1, 1)]);
        assert_eq!(s.measure(), big(1, 2));
        assert_eq!(IntervalSet::<Exact>::empty().measure(), big(0, 1));
    }

    #[test]
    fn ball_intersections() {
        let u = IntervalSet::<Exact>::unit();
        assert_eq!(u.intersect_ball(frac(1, 2), frac(1, 4)).intervals(), &[(frac(1, 4), frac(3, 4))]);
        assert!(u.intersect_ball(frac(1, 3), frac(0, 1)).is_empty());
        let s = set(&[(0, 1, 1, 8), (7, 8, 1, 1)]);
        assert!(s.intersect_ball(frac(1, 2), frac(1, 8)).is_empty());
    }

    #[test]
    fn containment() {
        let s = set(&[(0, 1, 1, 4), (1, 2, 3, 4)]);
        assert!(s.contains_set(&set(&[(1, 8, 1, 4), (5, 8, 3, 4)])));
        assert!(!s.contains_set(&set(&[(1, 8, 5, 8)])));
        assert!(s.contains_set(&IntervalSet::empty()));
    }

    #[test]
    fn csv_output() {
        let mut buf = Vec::new();
        set(&[(1, 4, 1, 2)]).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lo,hi,lo_exact,hi_exact\n"));
        assert!(text.contains(",1/4,1/2"));
    }
}
