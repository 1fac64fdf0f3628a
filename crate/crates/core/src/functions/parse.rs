use num_traits::{One, Zero};

use super::{FunctionForm, Rational, Regime};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    /// `-?digits[.digits][/digits]`
    fn number(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && bytes[end] == b'/' && end + 1 < bytes.len() && bytes[end + 1].is_ascii_digit() {
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        match parse_rational(&self.src[start..end]) {
            Some(q) => {
                self.pos = end;
                Ok(q)
            }
            None => self.err("expected a number"),
        }
    }

    /// An exponent after `^`: a number, optionally parenthesised.
    fn exponent(&mut self) -> Result<Rational> {
        if self.eat("(") {
            let e = self.number()?;
            self.expect(")")?;
            Ok(e)
        } else {
            self.number()
        }
    }

    fn optional_exponent(&mut self) -> Result<Rational> {
        if self.eat("^") {
            self.exponent()
        } else {
            Ok(Rational::one())
        }
    }

    /// `r` or `1/r` inside a log.
    fn log_argument(&mut self) -> Result<Regime> {
        let regime = if self.eat("1/r") {
            Regime::Small
        } else if self.eat("r") {
            Regime::Large
        } else {
            return self.err("expected `r` or `1/r`");
        };
        self.expect(")")?;
        Ok(regime)
    }
}

/// Parse a decimal or fraction literal into an exact rational.
pub(crate) fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: i64 = digits.parse().ok()?;
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    let q = Rational::new(numer, denom);
    Some(if neg { -q } else { q })
}

#[derive(Default)]
struct Factors {
    scale: Option<Rational>,
    power: Rational,
    log_power: Rational,
    loglog_power: Rational,
    regime: Option<Regime>,
    omega: Option<Rational>,
    count: usize,
}

impl Factors {
    fn set_regime(&mut self, cur: &Cursor<'_>, regime: Regime) -> Result<()> {
        match self.regime {
            Some(r) if r != regime => cur.err("cannot mix log(r) and log(1/r) factors"),
            _ => {
                self.regime = Some(regime);
                Ok(())
            }
        }
    }
}

pub(super) fn parse_form(text: &str) -> Result<FunctionForm> {
    let mut cur = Cursor::new(text);
    let form = parse_product(&mut cur)?;
    cur.skip_ws();
    if cur.pos != text.len() {
        return cur.err("unexpected trailing input");
    }
    Ok(form)
}

fn parse_product(cur: &mut Cursor<'_>) -> Result<FunctionForm> {
    let mut f = Factors::default();
    loop {
        parse_factor(cur, &mut f)?;
        if !cur.eat("*") {
            break;
        }
    }
    if let Some(omega) = f.omega {
        if f.count > 1 {
            return cur.err("exp(-r^w) cannot be combined with other factors");
        }
        return FunctionForm::exp_power(omega);
    }
    let scale = f.scale.unwrap_or_else(Rational::one);
    match f.regime.unwrap_or(Regime::Large) {
        Regime::Large => FunctionForm::power_log(scale, f.power, f.log_power, f.loglog_power),
        Regime::Small => FunctionForm::build(
            scale,
            f.power,
            f.log_power,
            f.loglog_power,
            super::Family::PowerLog,
            Rational::zero(),
            Regime::Small,
        ),
    }
}

fn parse_factor(cur: &mut Cursor<'_>, f: &mut Factors) -> Result<()> {
    f.count += 1;
    match cur.peek() {
        Some('(') => {
            cur.expect("(")?;
            let inner = parse_product(cur)?;
            cur.expect(")")?;
            merge(cur, f, &inner)
        }
        Some('e') => {
            cur.expect("exp(")?;
            cur.expect("-")?;
            cur.expect("r")?;
            let omega = cur.optional_exponent()?;
            cur.expect(")")?;
            f.omega = Some(omega);
            Ok(())
        }
        Some('l') => {
            let is_loglog = cur.eat("loglog(");
            if !is_loglog {
                cur.expect("log(")?;
            }
            let regime = cur.log_argument()?;
            f.set_regime(cur, regime)?;
            let e = cur.optional_exponent()?;
            if is_loglog {
                f.loglog_power += e;
            } else {
                f.log_power += e;
            }
            Ok(())
        }
        Some('r') => {
            cur.expect("r")?;
            f.power += cur.optional_exponent()?;
            Ok(())
        }
        Some(c) if c.is_ascii_digit() || c == '-' || c == '.' => {
            let n = cur.number()?;
            f.scale = Some(f.scale.unwrap_or_else(Rational::one) * n);
            Ok(())
        }
        _ => cur.err("expected a factor"),
    }
}

fn merge(cur: &Cursor<'_>, f: &mut Factors, inner: &FunctionForm) -> Result<()> {
    if inner.family == super::Family::ExpPower {
        f.omega = Some(inner.omega);
        return Ok(());
    }
    if inner.log_power != Rational::zero() || inner.loglog_power != Rational::zero() {
        f.set_regime(cur, inner.regime)?;
    }
    f.scale = Some(f.scale.unwrap_or_else(Rational::one) * inner.scale);
    f.power += inner.power;
    f.log_power += inner.log_power;
    f.loglog_power += inner.loglog_power;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("0.1"), Some(q(1, 10)));
        assert_eq!(parse_rational("-2"), Some(q(-2, 1)));
        assert_eq!(parse_rational("2/3"), Some(q(2, 3)));
        assert_eq!(parse_rational("-1.25"), Some(q(-5, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn full_grammar() {
        let f = parse_form("6 * r^-2 * log(r)^(-3/2) * loglog(r)^2").unwrap();
        assert_eq!(f.scale(), q(6, 1));
        assert_eq!(f.power_exp(), q(-2, 1));
        assert_eq!(f.log_exp(), q(-3, 2));
        assert_eq!(f.loglog_exp(), q(2, 1));
        assert_eq!(f.regime(), Regime::Large);
    }

    #[test]
    fn small_regime_and_exp() {
        let f = parse_form("r^(2/3) * log(1/r)^0.1").unwrap();
        assert_eq!(f.regime(), Regime::Small);
        assert_eq!(f.log_exp(), q(1, 10));
        let e = parse_form("exp(-r^2)").unwrap();
        assert_eq!(e.omega(), q(2, 1));
        let e1 = parse_form("exp(-r)").unwrap();
        assert_eq!(e1.omega(), q(1, 1));
    }

    #[test]
    fn repeated_factors_accumulate() {
        let f = parse_form("r * r^-3 * (2 * r)").unwrap();
        assert_eq!(f.power_exp(), q(-1, 1));
        assert_eq!(f.scale(), q(2, 1));
    }

    #[test]
    fn errors() {
        assert!(parse_form("r^").is_err());
        assert!(parse_form("log(x)").is_err());
        assert!(parse_form("log(r) * log(1/r)").is_err());
        assert!(parse_form("exp(-r) * r").is_err());
        assert!(parse_form("r^-2 junk").is_err());
        assert!(parse_form("0 * r").is_err());
    }
}
