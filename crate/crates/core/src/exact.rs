//! Exact sums of many small fractions.
//!
//! Adding millions of fractions with unrelated denominators one at a time
//! makes the running denominator explode. [`FractionSum`] instead groups
//! numerators by denominator (there are few distinct denominators in a stage
//! set) and combines the groups once at the end, either exactly or as a
//! rigorous floating-point enclosure.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Fixed-point scale for enclosures: `2^-ENCLOSURE_BITS` per group.
const ENCLOSURE_BITS: u32 = 128;

#[derive(Debug, Clone, Default)]
pub struct FractionSum {
    groups: HashMap<i128, i128>,
}

/// Rigorous bounds `lo <= value <= hi`, plus the exact value when it was
/// cheap to form.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub exact: Option<BigRational>,
}

impl Enclosure {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn from_exact(q: BigRational) -> Self {
        let (lo, hi) = bounds_of(q.numer(), q.denom());
        Enclosure { lo, hi, exact: Some(q) }
    }

    /// Bounds on `self / other` for positive `other`.
    pub fn ratio(&self, other: &Enclosure) -> Enclosure {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            if !b.is_zero() {
                return Enclosure::from_exact(a / b);
            }
        }
        Enclosure { lo: next_down(self.lo / other.hi), hi: next_up(self.hi / other.lo), exact: None }
    }
}

impl FractionSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, num: i128, den: i128) {
        debug_assert!(den > 0);
        if num == 0 {
            return;
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        let slot = self.groups.entry(den).or_insert(0);
        *slot = slot.checked_add(num).expect("fraction group numerator overflow");
    }

    pub fn add_ratio(&mut self, q: Ratio<i128>) {
        self.add(*q.numer(), *q.denom());
    }

    pub fn sub_ratio(&mut self, q: Ratio<i128>) {
        self.add(-*q.numer(), *q.denom());
    }

    pub fn merge(&mut self, other: FractionSum) {
        for (den, num) in other.groups {
            let slot = self.groups.entry(den).or_insert(0);
            *slot = slot.checked_add(num).expect("fraction group numerator overflow");
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Exact sum, combined pairwise to keep intermediate sizes balanced.
    pub fn exact(&self) -> BigRational {
        let mut terms: Vec<(BigInt, BigInt)> =
            self.groups.iter().filter(|(_, &n)| n != 0).map(|(&d, &n)| (BigInt::from(n), BigInt::from(d))).collect();
        if terms.is_empty() {
            return BigRational::zero();
        }
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some((n1, d1)) = it.next() {
                match it.next() {
                    Some((n2, d2)) => {
                        let g = d1.gcd(&d2);
                        let l = &d1 / &g * &d2;
                        let n = n1 * (&l / &d1) + n2 * (&l / &d2);
                        next.push((n, l));
                    }
                    None => next.push((n1, d1)),
                }
            }
            terms = next;
        }
        let (n, d) = terms.pop().expect("non-empty");
        BigRational::new(n, d)
    }

    /// Rigorous enclosure; exact as well when there are at most `exact_limit` groups.
    pub fn enclosure(&self, exact_limit: usize) -> Enclosure {
        if self.groups.len() <= exact_limit {
            return Enclosure::from_exact(self.exact());
        }
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (&den, &num) in &self.groups {
            let scaled = BigInt::from(num) << ENCLOSURE_BITS;
            let d = BigInt::from(den);
            let fl = scaled.div_floor(&d);
            let exact = &fl * &d == scaled;
            hi += if exact { fl.clone() } else { &fl + 1 };
            lo += fl;
        }
        let scale = BigInt::from(1) << ENCLOSURE_BITS;
        let (lo_f, _) = bounds_of(&lo, &scale);
        let (_, hi_f) = bounds_of(&hi, &scale);
        Enclosure { lo: lo_f, hi: hi_f, exact: None }
    }
}

/// f64 bounds on `num / den` for positive `den`.
pub(crate) fn bounds_of(num: &BigInt, den: &BigInt) -> (f64, f64) {
    // shift so the quotient carries at least 64 significant bits
    let shift = 64i64 + den.bits() as i64 - num.bits() as i64;
    let shift = shift.max(0) as u32;
    let scaled = num << shift;
    let q = scaled.div_floor(den);
    let exact = &q * den == scaled;
    let qf = big_to_f64(&q);
    let approx = qf / 2f64.powi(shift as i32);
    let approx = if approx.is_finite() { approx } else { q.to_f64().unwrap_or(f64::NAN) };
    if exact && BigInt::from_f64(qf).is_some_and(|b| b == q) && shift < 1000 {
        (approx, approx)
    } else {
        (next_down(approx), next_up(approx))
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub(crate) fn next_up(x: f64) -> f64 {
    // two ulps absorb the conversion rounding of the quotient
    x.next_up().next_up()
}

pub(crate) fn next_down(x: f64) -> f64 {
    x.next_down().next_down()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_sum_exactly() {
        let mut s = FractionSum::new();
        s.add(1, 8);
        s.add(1, 4);
        s.add(1, 8);
        assert_eq!(s.exact(), BigRational::new(1.into(), 2.into()));
        let e = s.enclosure(0);
        assert!(e.lo <= 0.5 && 0.5 <= e.hi);
        assert!(e.width() < 1e-15);
    }

    #[test]
    fn enclosure_contains_harmonic_sum() {
        let mut s = FractionSum::new();
        for q in 1..=2000i128 {
            s.add(1, q * q);
        }
        let exact = s.exact();
        let e = s.enclosure(0);
        let (lo, hi) = bounds_of(exact.numer(), exact.denom());
        assert!(e.lo <= lo && hi <= e.hi, "{e:?} vs {lo} {hi}");
        assert!(e.width() < 1e-14);
    }

    #[test]
    fn ratio_of_exacts_is_exact() {
        let a = Enclosure::from_exact(BigRational::new(1.into(), 3.into()));
        let b = Enclosure::from_exact(BigRational::new(2.into(), 3.into()));
        assert_eq!(a.ratio(&b).exact, Some(BigRational::new(1.into(), 2.into())));
    }
}
