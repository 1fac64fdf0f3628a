//! Ford circles as the horoball family of SL(2,Z): enumeration, local counting and disjointness.
//!
//! Bases are taken in half-open windows `[lo, hi)`, so `[0, 1)` counts `0/1` once and skips `1/1`.

use std::io::{self, Write};

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::Exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Horoball {
    pub p: i64,
    pub q: i64,
}

impl Horoball {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 || p.gcd(&q) != 1 {
            return Err(Error::Invalid(format!("{p}/{q} is not a reduced fraction with q >= 1")));
        }
        Ok(Horoball { p, q })
    }

    pub fn base(&self) -> Exact {
        Ratio::new(self.p as i128, self.q as i128)
    }

    /// `1 / (2q²)`
    pub fn radius(&self) -> Exact {
        Ratio::new(1, 2 * (self.q as i128).pow(2))
    }

    /// `2q²`
    pub fn weight(&self) -> Exact {
        Ratio::from_integer(2 * (self.q as i128).pow(2))
    }
}

/// Denominators `q` with `r_lo <= 1/(2q²) < r_hi`, as an inclusive range (possibly empty).
pub fn denominator_window(r_lo: Exact, r_hi: Exact) -> Result<(i64, i64)> {
    if !r_lo.is_positive() || r_lo >= r_hi {
        return Err(Error::Invalid(format!("radius window needs 0 < rLo < rHi, got [{r_lo}, {r_hi})")));
    }
    // 2q² r_lo <= 1  <=>  q <= sqrt(den / (2 num))
    let q_hi = isqrt_floor(*r_lo.denom(), 2 * r_lo.numer());
    // 2q² r_hi > 1  <=>  q > sqrt(den / (2 num))
    let q_lo = isqrt_floor(*r_hi.denom(), 2 * r_hi.numer()) + 1;
    let q_lo = q_lo.max(1);
    let to_i64 = |v: i128| i64::try_from(v).map_err(|_| Error::Invalid("denominator range exceeds i64".into()));
    Ok((to_i64(q_lo)?, to_i64(q_hi.max(0))?))
}

/// `floor(sqrt(a / b))` for positive `a, b`.
fn isqrt_floor(a: i128, b: i128) -> i128 {
    let mut s = (a / b).sqrt();
    while (s + 1) * (s + 1) * b <= a {
        s += 1;
    }
    while s * s * b > a {
        s -= 1;
    }
    s
}

/// Numerators of `q` with `p/q ∈ [lo, hi)`, as an inclusive range.
fn numerator_range(q: i64, lo: Exact, hi: Exact) -> (i128, i128) {
    let q = q as i128;
    let first = (lo * q).ceil().to_integer();
    let last = (hi * q).ceil().to_integer() - 1;
    (first, last)
}

fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `#{p ∈ [a, b] : gcd(p, q) = 1}` by inclusion-exclusion over the primes of `q`.
fn coprime_count(q: i64, a: i128, b: i128) -> u64 {
    if a > b {
        return 0;
    }
    let primes = prime_factors(q);
    let mut total: i128 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let d: i128 = primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p as i128).product();
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        total += sign * (Integer::div_floor(&b, &d) - Integer::div_floor(&(a - 1), &d));
    }
    total as u64
}

fn check_base(lo: Exact, hi: Exact) -> Result<()> {
    if lo > hi {
        return Err(Error::Invalid(format!("base window [{lo}, {hi}) is reversed")));
    }
    Ok(())
}

/// Number of Ford horoballs with base in `[lo, hi)` and radius in `[r_lo, r_hi)`.
pub fn count_horoballs(lo: Exact, hi: Exact, r_lo: Exact, r_hi: Exact, cap: u128) -> Result<u64> {
    check_base(lo, hi)?;
    let (q_lo, q_hi) = denominator_window(r_lo, r_hi)?;
    if q_hi < q_lo || lo == hi {
        return Ok(0);
    }
    let span = (q_hi - q_lo + 1) as u128;
    if span > cap {
        return Err(Error::ResourceCap { requested: span, cap });
    }
    Ok((q_lo..=q_hi)
        .into_par_iter()
        .map(|q| {
            let (a, b) = numerator_range(q, lo, hi);
            coprime_count(q, a, b)
        })
        .sum())
}

/// All Ford horoballs with base in `[lo, hi)` and radius in `[r_lo, r_hi)`, ordered by `(q, p)`.
pub fn enumerate_horoballs(lo: Exact, hi: Exact, r_lo: Exact, r_hi: Exact, cap: u128) -> Result<Vec<Horoball>> {
    let n = count_horoballs(lo, hi, r_lo, r_hi, cap)?;
    if n as u128 > cap {
        return Err(Error::ResourceCap { requested: n as u128, cap });
    }
    let (q_lo, q_hi) = denominator_window(r_lo, r_hi)?;
    let mut out = Vec::with_capacity(n as usize);
    for q in q_lo..=q_hi {
        let (a, b) = numerator_range(q, lo, hi);
        for p in a..=b {
            if p.gcd(&(q as i128)) == 1 {
                out.push(Horoball { p: p as i64, q });
            }
        }
    }
    Ok(out)
}

pub fn write_horoballs_csv<W: Write>(balls: &[Horoball], mut w: W) -> io::Result<()> {
    writeln!(w, "p,q,radius")?;
    for b in balls {
        writeln!(w, "{},{},{}", b.p, b.q, b.radius())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub r: Exact,
    pub lambda: Exact,
    pub count: u64,
    /// `count · R / m(B)`
    pub ratio: f64,
}

/// `#A_λ(B, R) · R / m(B)` where `A_λ(B, R)` holds the horoballs based in `B` with `λR <= radius < R`.
pub fn horoball_count_ratio(lo: Exact, hi: Exact, r: Exact, lambda: Exact, cap: u128) -> Result<CountRow> {
    check_base(lo, hi)?;
    if !(lambda.is_positive() && lambda < Ratio::from_integer(1)) {
        return Err(Error::Domain { value: lambda.to_f64().unwrap_or(f64::NAN), domain: "(0, 1)".into() });
    }
    if !r.is_positive() {
        return Err(Error::Domain { value: r.to_f64().unwrap_or(f64::NAN), domain: "R > 0".into() });
    }
    let m = hi - lo;
    if m.is_zero() {
        return Err(Error::Degenerate("base window has zero length".into()));
    }
    let (q_lo, q_hi) = denominator_window(lambda * r, r)?;
    if q_hi < q_lo {
        return Err(Error::Degenerate(format!("no denominators have radius in [{}, {r})", lambda * r)));
    }
    let count = count_horoballs(lo, hi, lambda * r, r, cap)?;
    let ratio = count as f64 * (r / m).to_f64().unwrap_or(f64::NAN);
    Ok(CountRow { r, lambda, count, ratio })
}

pub fn write_count_rows_csv<W: Write>(rows: &[CountRow], mut w: W) -> io::Result<()> {
    writeln!(w, "R,lambda,count,ratio")?;
    for row in rows {
        writeln!(w, "{},{},{},{:.17e}", row.r, row.lambda, row.count, row.ratio)?;
    }
    Ok(())
}

/// Outcome of the exhaustive pairwise check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub q_max: i64,
    pub circles: u64,
    pub pairs: u64,
    pub tangent: u64,
    pub separated: u64,
    /// Pairs where some check failed; empty when the circles are disjoint or tangent.
    pub failures: Vec<(Horoball, Horoball)>,
}

impl DisjointnessReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Default)]
struct PairTally {
    pairs: u64,
    tangent: u64,
    separated: u64,
    failures: Vec<(Horoball, Horoball)>,
}

impl PairTally {
    fn merge(mut self, other: PairTally) -> PairTally {
        self.pairs += other.pairs;
        self.tangent += other.tangent;
        self.separated += other.separated;
        self.failures.extend(other.failures);
        self
    }
}

/// Checks one pair. Everything is scaled by `4 q⁴ q'⁴` so the comparisons are integer identities:
/// centre distance² − (r + r')² = (D² − 1) / (q q')² with `D = p q' − p' q`.
fn check_pair(a: Horoball, b: Horoball) -> (bool, bool) {
    let (p, q) = (a.p as i128, a.q as i128);
    let (pp, qq) = (b.p as i128, b.q as i128);
    let d = p * qq - pp * q;
    let q2 = q * q;
    let qq2 = qq * qq;
    // base gap², (r + r')², (r − r')², all over 4 q⁴ q'⁴
    let gap2 = 4 * d * d * q2 * qq2;
    let sum2 = (q2 + qq2) * (q2 + qq2);
    let diff2 = (qq2 - q2) * (qq2 - q2);
    let excess = gap2 + diff2 - sum2;
    let identity = excess == (d * d - 1) * 4 * q2 * qq2;
    let tangent = excess == 0;
    let ok = identity && excess >= 0 && (tangent == (d.abs() == 1));
    (ok, tangent)
}

/// Verifies over every pair of reduced fractions in `[0, 1]` with denominators `<= q_max` that Ford circle
/// interiors are disjoint and that tangency happens exactly for Farey neighbours.
pub fn disjointness_check(q_max: i64) -> Result<DisjointnessReport> {
    if q_max < 2 {
        return Err(Error::Domain { value: q_max as f64, domain: "qMax >= 2".into() });
    }
    if q_max > 1 << 20 {
        return Err(Error::Invalid("qMax too large for exact i128 checks".into()));
    }
    let mut circles = Vec::new();
    for q in 1..=q_max {
        for p in 0..=q {
            if p.gcd(&q) == 1 {
                circles.push(Horoball { p, q });
            }
        }
    }
    let tally = (0..circles.len())
        .into_par_iter()
        .fold(PairTally::default, |mut t, i| {
            for j in i + 1..circles.len() {
                let (ok, tangent) = check_pair(circles[i], circles[j]);
                t.pairs += 1;
                if tangent {
                    t.tangent += 1;
                } else {
                    t.separated += 1;
                }
                if !ok {
                    t.failures.push((circles[i], circles[j]));
                }
            }
            t
        })
        .reduce(PairTally::default, PairTally::merge);
    let mut failures = tally.failures;
    failures.sort_by_key(|(a, b)| (a.q, a.p, b.q, b.p));
    Ok(DisjointnessReport {
        q_max,
        circles: circles.len() as u64,
        pairs: tally.pairs,
        tangent: tally.tangent,
        separated: tally.separated,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::totients;
    use crate::intervals::frac;

    #[test]
    fn window_selects_q_two() {
        let balls = enumerate_horoballs(frac(0, 1), frac(1, 1), frac(1, 8), frac(1, 2), 1000).unwrap();
        assert_eq!(balls, vec![Horoball { p: 1, q: 2 }]);
    }

    #[test]
    fn empty_base() {
        let balls = enumerate_horoballs(frac(1, 3), frac(1, 3), frac(1, 100), frac(1, 2), 1000).unwrap();
        assert!(balls.is_empty());
    }

    #[test]
    fn totient_window() {
        // radius 1/(2q²) in [1/80000, 1/20000) picks q in (100, 200]
        let n = count_horoballs(frac(0, 1), frac(1, 1), frac(1, 80_000), frac(1, 20_000), 1 << 20).unwrap();
        let phi = totients(200);
        let oracle: u64 = (101..=200).map(|q| phi[q] as u64).sum();
        assert_eq!(n, oracle);
        let listed = enumerate_horoballs(frac(0, 1), frac(1, 1), frac(1, 80_000), frac(1, 20_000), 1 << 20).unwrap();
        assert_eq!(listed.len() as u64, oracle);
        assert!(listed.iter().all(|b| (b.radius() * b.weight()) == frac(1, 1)));
    }

    #[test]
    fn coprime_count_matches_loop() {
        for q in 1..40i64 {
            for a in -5..30i128 {
                for b in a - 1..a + 45 {
                    let brute = (a..=b).filter(|p| p.gcd(&(q as i128)) == 1).count() as u64;
                    assert_eq!(coprime_count(q, a, b), brute);
                }
            }
        }
    }

    #[test]
    fn ratio_collapses_and_errors() {
        assert!(matches!(
            horoball_count_ratio(frac(0, 1), frac(1, 1), frac(1, 2), frac(99, 100), 1000),
            Err(Error::Degenerate(_))
        ));
        let row = horoball_count_ratio(frac(0, 1), frac(1, 1), frac(1, 20_000), frac(1, 4), 1 << 20).unwrap();
        let phi = totients(200);
        assert_eq!(row.count, (101..=200).map(|q| phi[q] as u64).sum::<u64>());
    }

    #[test]
    fn pair_examples() {
        let h = |p, q| Horoball { p, q };
        assert_eq!(check_pair(h(1, 2), h(1, 3)), (true, true));
        assert_eq!(check_pair(h(0, 1), h(1, 1)), (true, true));
        assert_eq!(check_pair(h(1, 3), h(2, 3)), (true, false));
    }

    #[test]
    fn small_disjointness() {
        let r = disjointness_check(12).unwrap();
        assert!(r.holds());
        assert_eq!(r.pairs, r.circles * (r.circles - 1) / 2);
        // tangent pairs are exactly the Farey neighbours across all orders
        let brute = {
            let c: Vec<(i64, i64)> =
                (1..=12).flat_map(|q| (0..=q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q))).collect();
            let mut n = 0;
            for i in 0..c.len() {
                for j in i + 1..c.len() {
                    if (c[i].0 * c[j].1 - c[j].0 * c[i].1).abs() == 1 {
                        n += 1;
                    }
                }
            }
            n
        };
        assert_eq!(r.tangent, brute);
    }
}
