//! Exact convergence decisions for sums `Σ r^u f(ψ(r))` over the closed
//! power/log/exp family, plus the critical exponents derived from them.
//!
//! A summand is first reduced to its asymptotic normal form
//! `coef * exp(-d r^w) * r^A (log r)^B (log log r)^C` (ratio tending to one),
//! and the integral test is then read off the exponents.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{lex_sign, pow_rat, ratio_f64, Family, FunctionForm, Rational, Regime};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Convergence {
    Convergent,
    Divergent,
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convergence::Convergent => "Convergent",
            Convergence::Divergent => "Divergent",
        })
    }
}

/// `coef * exp(-decay * r^omega) * r^power * (log r)^log_power * (log log r)^loglog_power`,
/// asymptotically as `r -> infinity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub coef: f64,
    pub decay: Rational,
    pub omega: Rational,
    pub power: Rational,
    pub log_power: Rational,
    pub loglog_power: Rational,
}

impl Asymptotic {
    pub fn monomial(power: Rational) -> Self {
        Asymptotic {
            coef: 1.0,
            decay: Rational::zero(),
            omega: Rational::zero(),
            power,
            log_power: Rational::zero(),
            loglog_power: Rational::zero(),
        }
    }

    /// Normal form of a large-argument form.
    pub fn of(form: &FunctionForm) -> Result<Self> {
        if form.regime == Regime::Small {
            return Err(Error::NotClosed(format!("{form} is a small-argument form and has no behaviour at infinity")));
        }
        Ok(match form.family {
            Family::ExpPower => Asymptotic {
                coef: 1.0,
                decay: Rational::from_integer(1),
                omega: form.omega,
                ..Asymptotic::monomial(Rational::zero())
            },
            Family::PowerLog => Asymptotic {
                coef: ratio_f64(form.scale),
                decay: Rational::zero(),
                omega: Rational::zero(),
                power: form.power,
                log_power: form.log_power,
                loglog_power: form.loglog_power,
            },
        })
    }

    pub fn mul(&self, other: &Asymptotic) -> Result<Self> {
        let (decay, omega) = match (self.decay.is_zero(), other.decay.is_zero()) {
            (true, true) => (Rational::zero(), Rational::zero()),
            (false, true) => (self.decay, self.omega),
            (true, false) => (other.decay, other.omega),
            (false, false) if self.omega == other.omega => (self.decay + other.decay, self.omega),
            (false, false) => return Err(Error::NotClosed("product of exponentials with different rates r^w".into())),
        };
        Ok(Asymptotic {
            coef: self.coef * other.coef,
            decay,
            omega: if decay.is_zero() { Rational::zero() } else { omega },
            power: self.power + other.power,
            log_power: self.log_power + other.log_power,
            loglog_power: self.loglog_power + other.loglog_power,
        })
    }

    pub fn pow(&self, e: Rational) -> Self {
        let decay = self.decay * e;
        Asymptotic {
            coef: pow_rat(self.coef, e),
            decay,
            omega: if decay.is_zero() { Rational::zero() } else { self.omega },
            power: self.power * e,
            log_power: self.log_power * e,
            loglog_power: self.loglog_power * e,
        }
    }

    /// Integral-test verdict for `Σ` of this summand.
    pub fn convergence(&self) -> Convergence {
        if self.decay.is_positive() {
            return Convergence::Convergent;
        }
        if self.decay.is_negative() {
            return Convergence::Divergent;
        }
        if triple_converges(self.power, self.log_power, self.loglog_power) {
            Convergence::Convergent
        } else {
            Convergence::Divergent
        }
    }

    /// Limit of the function itself as `r -> infinity`.
    pub fn limit(&self) -> GLimit {
        if self.decay.is_positive() {
            return GLimit::Zero;
        }
        if self.decay.is_negative() {
            return GLimit::Infinite;
        }
        match lex_sign(self.power, self.log_power, self.loglog_power) {
            1 => GLimit::Infinite,
            -1 => GLimit::Zero,
            _ => GLimit::Finite(self.coef),
        }
    }
}

fn triple_converges(a: Rational, b: Rational, c: Rational) -> bool {
    let m1 = Rational::from_integer(-1);
    a < m1 || (a == m1 && b < m1) || (a == m1 && b == m1 && c < m1)
}

/// Normal form of `outer(inner(r))` where `outer` is a small-argument form and
/// `inner` tends to zero.
pub fn compose(outer: &FunctionForm, inner: &FunctionForm) -> Result<Asymptotic> {
    if outer.regime != Regime::Small || outer.family != Family::PowerLog {
        return Err(Error::NotClosed(format!("outer function {outer} must be a small-argument power-log form")));
    }
    let psi = Asymptotic::of(inner)?;
    let (alpha, beta, gamma) = (outer.power, outer.log_power, outer.loglog_power);
    let scale = ratio_f64(outer.scale);

    if inner.family == Family::ExpPower {
        // log(1/ψ) = r^w exactly, log log(1/ψ) = w log r exactly.
        let w = inner.omega;
        let base = psi.pow(alpha);
        let logs = Asymptotic {
            coef: scale * pow_rat(ratio_f64(w), gamma),
            power: w * beta,
            log_power: gamma,
            ..Asymptotic::monomial(Rational::zero())
        };
        return base.mul(&logs);
    }

    let (a, b, c) = (psi.power, psi.log_power, psi.loglog_power);
    if lex_sign(a, b, c) >= 0 {
        return Err(Error::NotClosed(format!("inner function {inner} does not tend to zero")));
    }
    let base = psi.pow(alpha);
    let logs = if a.is_negative() {
        // log(1/ψ) ~ |a| log r, log log(1/ψ) ~ log log r
        Asymptotic {
            coef: scale * pow_rat(ratio_f64(-a), beta),
            log_power: beta,
            loglog_power: gamma,
            ..Asymptotic::monomial(Rational::zero())
        }
    } else if b.is_negative() {
        // log(1/ψ) ~ |b| log log r; log log(1/ψ) would need a triple logarithm
        if !gamma.is_zero() {
            return Err(Error::NotClosed(format!("{outer} composed with {inner} produces log log log r")));
        }
        Asymptotic {
            coef: scale * pow_rat(ratio_f64(-b), beta),
            loglog_power: beta,
            ..Asymptotic::monomial(Rational::zero())
        }
    } else {
        if !beta.is_zero() || !gamma.is_zero() {
            return Err(Error::NotClosed(format!(
                "{outer} composed with {inner} produces iterated logarithms beyond log log r"
            )));
        }
        Asymptotic { coef: scale, ..Asymptotic::monomial(Rational::zero()) }
    };
    base.mul(&logs)
}

/// `Σ_{r >= r0} r^u f(ψ(r))`, with `f` the identity when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    weight_power: Rational,
    outer: Option<FunctionForm>,
    inner: FunctionForm,
    summand: Asymptotic,
}

impl SeriesSpec {
    pub fn new(weight_power: Rational, outer: Option<FunctionForm>, inner: FunctionForm) -> Result<Self> {
        let composed = match &outer {
            Some(f) => compose(f, &inner)?,
            None => Asymptotic::of(&inner)?,
        };
        let summand = Asymptotic::monomial(weight_power).mul(&composed)?;
        Ok(SeriesSpec { weight_power, outer, inner, summand })
    }

    /// Parse `r^u * (psi)` or `r^u * f(psi)`; the `f` in the second form is
    /// the supplied outer function.
    pub fn parse(text: &str, outer: Option<FunctionForm>) -> Result<Self> {
        let text = text.trim();
        let perr = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        let (weight, rest_pos) = match text.find('*') {
            Some(star) if text[..star].trim_start().starts_with('r') && !text[..star].contains('(') => {
                let w = FunctionForm::parse(&text[..star])?;
                if w.family != Family::PowerLog
                    || !w.log_power.is_zero()
                    || !w.loglog_power.is_zero()
                    || w.scale != Rational::from_integer(1)
                {
                    return Err(perr(0, "weight must be a bare power r^u"));
                }
                (w.power, star + 1)
            }
            _ => (Rational::zero(), 0),
        };
        let rest = text[rest_pos..].trim();
        let offset = text.len() - text[rest_pos..].trim_start().len();
        let (uses_f, body) = if let Some(b) = rest.strip_prefix("f(") {
            (true, b)
        } else if let Some(b) = rest.strip_prefix('(') {
            (false, b)
        } else {
            return Err(perr(offset, "expected `(psi)` or `f(psi)`"));
        };
        let body = body.strip_suffix(')').ok_or_else(|| perr(text.len(), "missing closing parenthesis"))?;
        let inner = FunctionForm::parse(body)?;
        match (uses_f, outer) {
            (true, Some(f)) => SeriesSpec::new(weight, Some(f), inner),
            (true, None) => Err(perr(offset, "series uses f(...) but no outer function was given")),
            (false, outer) => SeriesSpec::new(weight, outer, inner),
        }
    }

    pub fn weight_power(&self) -> Rational {
        self.weight_power
    }
    pub fn outer(&self) -> Option<&FunctionForm> {
        self.outer.as_ref()
    }
    pub fn inner(&self) -> &FunctionForm {
        &self.inner
    }
    pub fn summand(&self) -> &Asymptotic {
        &self.summand
    }

    /// Summation start: the first integer inside every logarithmic domain.
    pub fn start_index(&self) -> u64 {
        let mut start = self.inner.summation_start();
        if !self.summand.loglog_power.is_zero() {
            start = start.max(3);
        } else if !self.summand.log_power.is_zero() {
            start = start.max(2);
        }
        start
    }
}

pub fn series_classify(spec: &SeriesSpec) -> Convergence {
    spec.summand.convergence()
}

/// Extended non-negative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalExponent {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for CriticalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalExponent::Finite(q) => write!(f, "{q}"),
            CriticalExponent::Infinite => f.write_str("inf"),
        }
    }
}

/// Set of `s >= 0` cut out by linear constraints on the exponent triple.
#[derive(Debug, Clone, Copy)]
struct Span {
    lo: Rational,
    lo_open: bool,
    hi: Option<(Rational, bool)>,
}

impl Span {
    fn nonnegative() -> Self {
        Span { lo: Rational::zero(), lo_open: false, hi: None }
    }

    fn is_empty(&self) -> bool {
        match self.hi {
            None => false,
            Some((hi, hi_open)) => hi < self.lo || (hi == self.lo && (hi_open || self.lo_open)),
        }
    }

    fn nonempty(self) -> Option<Self> {
        (!self.is_empty()).then_some(self)
    }

    fn contains(&self, s: Rational) -> bool {
        let above = if self.lo_open { s > self.lo } else { s >= self.lo };
        let below = match self.hi {
            None => true,
            Some((hi, true)) => s < hi,
            Some((hi, false)) => s <= hi,
        };
        above && below
    }

    /// Restrict to `slope * s + base < -1`.
    fn less(self, base: Rational, slope: Rational) -> Option<Self> {
        let m1 = Rational::from_integer(-1);
        if slope.is_zero() {
            return (base < m1).then_some(self);
        }
        let cut = (m1 - base) / slope;
        let mut out = self;
        if slope.is_positive() {
            out.hi = Some(match self.hi {
                Some((hi, open)) if hi < cut || (hi == cut && open) => (hi, open),
                _ => (cut, true),
            });
        } else if cut > self.lo || (cut == self.lo && !self.lo_open) {
            out.lo = cut;
            out.lo_open = true;
        }
        out.nonempty()
    }

    /// Restrict to `slope * s + base == -1`.
    fn equal(self, base: Rational, slope: Rational) -> Option<Self> {
        let m1 = Rational::from_integer(-1);
        if slope.is_zero() {
            return (base == m1).then_some(self);
        }
        let s0 = (m1 - base) / slope;
        self.contains(s0).then_some(Span { lo: s0, lo_open: false, hi: Some((s0, false)) })
    }
}

/// `inf { s >= 0 : Σ r^{b1 + s m1} (log r)^{b2 + s m2} (log log r)^{b3 + s m3} < ∞ }`.
fn inf_convergent(base: [Rational; 3], slope: [Rational; 3]) -> CriticalExponent {
    let full = Span::nonnegative();
    let alternatives = [
        full.less(base[0], slope[0]),
        full.equal(base[0], slope[0]).and_then(|s| s.less(base[1], slope[1])),
        full.equal(base[0], slope[0]).and_then(|s| s.equal(base[1], slope[1])).and_then(|s| s.less(base[2], slope[2])),
    ];
    alternatives.iter().flatten().map(|s| s.lo).min().map_or(CriticalExponent::Infinite, CriticalExponent::Finite)
}

/// Critical exponent of `s ↦ Σ r^u g(r)^s` for a summand family whose
/// `s`-th power is `per_unit^s`.
fn critical_for(u: Rational, per_unit: &Asymptotic) -> CriticalExponent {
    if per_unit.decay.is_positive() {
        return CriticalExponent::Finite(Rational::zero());
    }
    if per_unit.decay.is_negative() {
        return if u < Rational::from_integer(-1) {
            CriticalExponent::Finite(Rational::zero())
        } else {
            CriticalExponent::Infinite
        };
    }
    inf_convergent([u, Rational::zero(), Rational::zero()], [per_unit.power, per_unit.log_power, per_unit.loglog_power])
}

/// `inf { s >= 0 : Σ r^u ψ(r)^s < ∞ }`.
pub fn critical_exponent(psi: &FunctionForm, weight_power: Rational) -> Result<CriticalExponent> {
    Ok(critical_for(weight_power, &Asymptotic::of(psi)?))
}

/// Logarithmic-dimension exponent for `exp(-r^ω)` in `n` dimensions: the
/// infimum of `s` with `Σ r^{n-1} (log 1/ψ(r))^{-s} < ∞`.
pub fn log_critical_exponent(omega: Rational, n: u32) -> Result<CriticalExponent> {
    if n == 0 {
        return Err(Error::Invalid("dimension n must be positive".into()));
    }
    let psi = FunctionForm::exp_power(omega)?;
    let unit_gauge = FunctionForm::dimension(
        Rational::from_integer(1),
        Rational::zero(),
        Rational::from_integer(-1),
        Rational::zero(),
    )?;
    let per_unit = compose(&unit_gauge, &psi)?;
    Ok(critical_for(Rational::from_integer(i64::from(n) - 1), &per_unit))
}

/// Verdict for the gauge `(log 1/r)^{-n/ω} (log log 1/r)^{-(1+ε)}` against
/// `exp(-r^ω)`: convergent exactly when `ε > 0`.
pub fn liouville_gauge_classify(omega: Rational, n: u32, epsilon: Rational) -> Result<Convergence> {
    if n == 0 || !omega.is_positive() || epsilon.is_negative() {
        return Err(Error::Invalid("need n >= 1, omega > 0 and epsilon >= 0".into()));
    }
    let n_rat = Rational::from_integer(i64::from(n));
    let gauge = FunctionForm::dimension(
        Rational::from_integer(1),
        Rational::zero(),
        -n_rat / omega,
        -(Rational::from_integer(1) + epsilon),
    )?;
    let spec = SeriesSpec::new(n_rat - 1, Some(gauge), FunctionForm::exp_power(omega)?)?;
    Ok(series_classify(&spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GLimit {
    Zero,
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GReport {
    pub limit: GLimit,
    pub normal_form: Asymptotic,
    /// `(n, ln g(k^n))` for every `n <= n_max` inside all domains.
    pub scan: Vec<(u32, f64)>,
    pub numeric_consistent: bool,
}

/// `G = limsup g(k^n)` for `g(r) = f(ψ(r)) ρ(r)^{-δ}`, decided symbolically and
/// cross-checked by scanning `n = 1..=n_max` in log space.
pub fn compute_g(
    f: &FunctionForm,
    psi: &FunctionForm,
    rho: &FunctionForm,
    delta: Rational,
    k: f64,
    n_max: u32,
) -> Result<GReport> {
    if !(k > 1.0) {
        return Err(Error::Invalid(format!("k must exceed 1, got {k}")));
    }
    let normal_form = compose(f, psi)?.mul(&Asymptotic::of(rho)?.pow(-delta))?;
    let limit = normal_form.limit();
    let d = ratio_f64(delta);
    let scan: Vec<(u32, f64)> = (1..=n_max)
        .filter_map(|n| {
            let ln_r = f64::from(n) * k.ln();
            let ln_psi = psi.ln_evaluate_from_ln(ln_r).ok()?;
            let ln_f = f.ln_evaluate_from_ln(ln_psi).ok()?;
            let ln_rho = rho.ln_evaluate_from_ln(ln_r).ok()?;
            Some((n, ln_f - d * ln_rho))
        })
        .collect();
    let numeric_consistent = scan_agrees(&scan, limit);
    Ok(GReport { limit, normal_form, scan, numeric_consistent })
}

fn scan_agrees(scan: &[(u32, f64)], limit: GLimit) -> bool {
    if scan.len() < 2 {
        return true;
    }
    let mid = scan[scan.len() / 2].1;
    let last = scan[scan.len() - 1].1;
    match limit {
        GLimit::Zero => last < mid,
        GLimit::Infinite => last > mid,
        GLimit::Finite(c) => {
            let target = c.ln();
            (last - target).abs() <= (mid - target).abs() + 1e-12
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }
    fn z(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn khintchine_square_is_divergent() {
        let spec = SeriesSpec::new(z(1), None, FunctionForm::power(z(-2))).unwrap();
        assert_eq!(series_classify(&spec), Convergence::Divergent);
        let spec = SeriesSpec::new(z(1), None, FunctionForm::power(z(-3))).unwrap();
        assert_eq!(series_classify(&spec), Convergence::Convergent);
    }

    #[test]
    fn boundary_cases_of_integral_test() {
        let c = |a, b, cc| {
            let psi = FunctionForm::power_log(z(1), a, b, cc).unwrap();
            series_classify(&SeriesSpec::new(z(0), None, psi).unwrap())
        };
        assert_eq!(c(z(-1), z(0), z(0)), Convergence::Divergent);
        assert_eq!(c(z(-1), z(-1), z(0)), Convergence::Divergent);
        assert_eq!(c(z(-1), q(-11, 10), z(0)), Convergence::Convergent);
        assert_eq!(c(z(-1), z(-1), z(-2)), Convergence::Convergent);
        assert_eq!(c(z(-1), z(-1), z(-1)), Convergence::Divergent);
        assert_eq!(c(q(-101, 100), z(5), z(5)), Convergence::Convergent);
    }

    #[test]
    fn jarnik_gauge_discriminates() {
        let tau = z(3);
        // f(r) = r^{2/τ} (log r^{-1/τ})^{ε1}; the constant (1/τ)^{ε1} does not
        // affect the verdict.
        let f = FunctionForm::dimension(z(1), z(2) / tau, q(1, 10), z(0)).unwrap();
        let psi = |eps: Rational| FunctionForm::approximating(z(1), -tau, -tau * (z(1) + eps) / 2, z(0)).unwrap();
        let s1 = SeriesSpec::new(z(1), Some(f.clone()), psi(q(1, 10))).unwrap();
        let s2 = SeriesSpec::new(z(1), Some(f), psi(q(2, 10))).unwrap();
        assert_eq!(s1.summand().power, z(-1));
        assert_eq!(s1.summand().log_power, z(-1));
        assert_eq!(series_classify(&s1), Convergence::Divergent);
        assert_eq!(s2.summand().log_power, q(-11, 10));
        assert_eq!(series_classify(&s2), Convergence::Convergent);
    }

    #[test]
    fn exponential_always_converges() {
        for (w, s, n) in [(q(1, 1), q(1, 100), 1), (q(1, 3), z(2), 3), (z(5), q(1, 2), 2)] {
            let f = FunctionForm::dimension(z(1), s, z(0), z(0)).unwrap();
            let spec = SeriesSpec::new(z(n - 1), Some(f), FunctionForm::exp_power(w).unwrap()).unwrap();
            assert_eq!(series_classify(&spec), Convergence::Convergent);
        }
    }

    #[test]
    fn non_closed_compositions_rejected() {
        let psi = FunctionForm::approximating(z(1), z(0), z(-1), z(0)).unwrap();
        let f = FunctionForm::dimension(z(1), z(1), z(0), z(1)).unwrap();
        assert!(matches!(compose(&f, &psi), Err(Error::NotClosed(_))));
        let psi2 = FunctionForm::approximating(z(1), z(0), z(0), z(-1)).unwrap();
        let f2 = FunctionForm::dimension(z(1), z(1), z(-1), z(0)).unwrap();
        assert!(compose(&f2, &psi2).is_err());
        let grow = FunctionForm::power(z(1));
        assert!(compose(&f2, &grow).is_err());
        assert!(compose(&FunctionForm::power(z(1)), &psi).is_err());
    }

    #[test]
    fn critical_exponents() {
        let t = |tau: Rational, u: Rational| critical_exponent(&FunctionForm::power(-tau), u).unwrap();
        assert_eq!(t(z(3), z(1)), CriticalExponent::Finite(q(2, 3)));
        assert_eq!(t(q(5, 2), z(1)), CriticalExponent::Finite(q(4, 5)));
        assert_eq!(t(z(10), z(1)), CriticalExponent::Finite(q(1, 5)));
        assert_eq!(t(z(3), z(2)), CriticalExponent::Finite(z(1)));
        assert_eq!(t(z(3), z(-2)), CriticalExponent::Finite(z(0)));
        let e = critical_exponent(&FunctionForm::exp_power(z(1)).unwrap(), z(0)).unwrap();
        assert_eq!(e, CriticalExponent::Finite(z(0)));
        // Σ r^{-1} (log r)^{-2s}: converges iff s > 1/2
        let lg = FunctionForm::power_log(z(1), z(0), z(-2), z(0)).unwrap();
        assert_eq!(critical_exponent(&lg, z(-1)).unwrap(), CriticalExponent::Finite(q(1, 2)));
        assert_eq!(critical_exponent(&lg, z(0)).unwrap(), CriticalExponent::Infinite);
        // increasing base: no s >= 0 helps
        assert_eq!(critical_exponent(&FunctionForm::power(z(1)), z(0)).unwrap(), CriticalExponent::Infinite);
    }

    #[test]
    fn log_critical() {
        assert_eq!(log_critical_exponent(z(1), 1).unwrap(), CriticalExponent::Finite(z(1)));
        assert_eq!(log_critical_exponent(z(2), 1).unwrap(), CriticalExponent::Finite(q(1, 2)));
        assert_eq!(log_critical_exponent(z(2), 3).unwrap(), CriticalExponent::Finite(q(3, 2)));
        assert!(log_critical_exponent(z(2), 0).is_err());
    }

    #[test]
    fn liouville_gauge() {
        assert_eq!(liouville_gauge_classify(z(1), 1, z(0)).unwrap(), Convergence::Divergent);
        assert_eq!(liouville_gauge_classify(z(1), 1, q(1, 2)).unwrap(), Convergence::Convergent);
        assert_eq!(liouville_gauge_classify(z(3), 2, q(1, 1000)).unwrap(), Convergence::Convergent);
    }

    #[test]
    fn g_limits() {
        let tau = z(3);
        let psi = FunctionForm::power(-tau);
        let rho = FunctionForm::power(z(-2));
        let g = |s: Rational| {
            let f = FunctionForm::dimension(z(1), s, z(0), z(0)).unwrap();
            compute_g(&f, &psi, &rho, z(1), 2.0, 40).unwrap()
        };
        let at = g(q(2, 3));
        assert_eq!(at.limit, GLimit::Finite(1.0));
        assert!(at.numeric_consistent);
        assert!(at.scan.iter().all(|&(_, v)| v.abs() < 1e-9));
        let above = g(q(3, 4));
        assert_eq!(above.limit, GLimit::Zero);
        assert!(above.numeric_consistent);
        let below = g(q(1, 2));
        assert_eq!(below.limit, GLimit::Infinite);
        assert!(below.numeric_consistent);
    }

    #[test]
    fn series_text() {
        let spec = SeriesSpec::parse("r^1 * (r^-2)", None).unwrap();
        assert_eq!(spec.weight_power(), z(1));
        assert_eq!(series_classify(&spec), Convergence::Divergent);
        let f = FunctionForm::parse("r^(1/2)").unwrap();
        assert!(SeriesSpec::parse("r^1 * f(r^-3)", None).is_err());
        let f = FunctionForm::dimension(z(1), f.power_exp(), z(0), z(0)).unwrap();
        let spec = SeriesSpec::parse("r^1 * f(r^-3)", Some(f)).unwrap();
        assert_eq!(spec.summand().power, q(-1, 2));
        let bare = SeriesSpec::parse("(r^-2 * log(r)^-2)", None).unwrap();
        assert_eq!(bare.weight_power(), z(0));
        assert_eq!(bare.start_index(), 2);
    }
}
