//! Farey sequences, totients and exact comparison of small fractions.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;

/// An unreduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };
    pub const ONE: Frac = Frac { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Self {
        debug_assert!(den > 0);
        Frac { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_ratio(self) -> Ratio<i128> {
        Ratio::new(self.num, self.den)
    }

    pub fn from_ratio(q: Ratio<i128>) -> Self {
        Frac { num: *q.numer(), den: *q.denom() }
    }

    /// `self + sign * other`, reduced; `None` on overflow.
    pub fn checked_add_signed(self, other: Frac, negate: bool) -> Option<Frac> {
        let g = self.den.gcd(&other.den);
        let l = (self.den / g).checked_mul(other.den)?;
        let a = self.num.checked_mul(l / self.den)?;
        let b = other.num.checked_mul(l / other.den)?;
        let n = if negate { a.checked_sub(b)? } else { a.checked_add(b)? };
        let h = n.gcd(&l).max(1);
        Some(Frac { num: n / h, den: l / h })
    }

    /// Exact ordering of two fractions.
    pub fn cmp_exact(self, other: Frac) -> Ordering {
        match (self.num.checked_mul(other.den), other.num.checked_mul(self.den)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => (BigInt::from(self.num) * other.den).cmp(&(BigInt::from(other.num) * self.den)),
        }
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(*other)
    }
}

/// Consecutive terms `lo <= x <= hi` of the Farey sequence of order `order`
/// bracketing `x`, for `0 <= x <= 1`. If `x` is itself a term, `lo == x`.
pub fn bracket(x: Frac, order: i64) -> ((i64, i64), (i64, i64)) {
    assert!(order >= 1, "Farey order must be positive");
    assert!(x.num >= 0 && x.num <= x.den, "bracket target must lie in [0, 1]");
    let q = order as i128;
    let (p, d) = (x.num, x.den);
    let (mut la, mut lb) = (0i128, 1i128);
    let (mut ha, mut hb) = (1i128, 1i128);
    if p == d {
        // x = 1: predecessor of 1/1 is (Q-1)/Q
        return ((order - 1, order), (1, 1));
    }
    loop {
        // lo < x always holds unless lo hit x exactly
        let lo_gap = p * lb - la * d; // x - lo, scaled by d*lb
        let hi_gap = ha * d - p * hb; // hi - x, scaled by d*hb
        if lo_gap == 0 {
            // x is a term; push hi down to x's successor
            let t = (q - hb) / lb;
            ha += t * la;
            hb += t * lb;
            break;
        }
        // largest t with (la + t ha)/(lb + t hb) <= x and lb + t hb <= Q
        let t_lo = (lo_gap / hi_gap).min((q - lb) / hb);
        if t_lo > 0 {
            la += t_lo * ha;
            lb += t_lo * hb;
            continue;
        }
        // largest t with (ha + t la)/(hb + t lb) > x and hb + t lb <= Q
        let lim = if hi_gap % lo_gap == 0 { hi_gap / lo_gap - 1 } else { hi_gap / lo_gap };
        let t_hi = lim.min((q - hb) / lb);
        if t_hi > 0 {
            ha += t_hi * la;
            hb += t_hi * lb;
            continue;
        }
        break;
    }
    ((la as i64, lb as i64), (ha as i64, hb as i64))
}

/// Iterator over Farey terms `a/b` of order `order`, in increasing order,
/// from the first term `>= from` to the last term `<= to`.
#[derive(Debug, Clone)]
pub struct FareyIter {
    order: i64,
    cur: (i64, i64),
    next: (i64, i64),
    end: Frac,
    done: bool,
}

impl FareyIter {
    pub fn new(order: i64, from: Frac, to: Frac) -> Self {
        let (lo, hi) = bracket(from, order);
        let lo_is_from = Frac::new(lo.0 as i128, lo.1 as i128).cmp_exact(from) == Ordering::Equal;
        let (cur, next) = if lo_is_from {
            (lo, hi)
        } else {
            let k = (order + lo.1) / hi.1;
            (hi, (k * hi.0 - lo.0, k * hi.1 - lo.1))
        };
        let done = from > to || Frac::new(cur.0 as i128, cur.1 as i128) > to;
        FareyIter { order, cur, next, end: to, done }
    }

    /// The whole sequence from 0/1 to 1/1.
    pub fn full(order: i64) -> Self {
        FareyIter::new(order, Frac::ZERO, Frac::ONE)
    }
}

impl Iterator for FareyIter {
    type Item = (i64, i64);

    #[inline]
    fn next(&mut self) -> Option<(i64, i64)> {
        if self.done {
            return None;
        }
        let out = self.cur;
        if out == (1, 1) {
            self.done = true;
            return Some(out);
        }
        let (a, b) = self.cur;
        let (c, d) = self.next;
        let k = (self.order + b) / d;
        self.cur = (c, d);
        self.next = (k * c - a, k * d - b);
        // compare c/d against end exactly
        if (c as i128) * self.end.den > self.end.num * (d as i128) {
            self.done = true;
        }
        Some(out)
    }
}

/// Euler's totient for `0..=n` by a linear sieve (`phi[0] = 0`).
pub fn totients(n: usize) -> Vec<u32> {
    let mut phi: Vec<u32> = (0..=n as u32).collect();
    for i in 2..=n {
        if phi[i] == i as u32 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u32;
                j += i;
            }
        }
    }
    phi
}

/// `|F_Q| = 1 + Σ_{q<=Q} φ(q)`.
pub fn farey_len(order: usize) -> u64 {
    1 + totients(order).iter().map(|&v| u64::from(v)).sum::<u64>()
}
