//! Exact arithmetic on quadratic irrationals `(a + b·√d)/c`.
//!
//! Every floor in this module is computed from integer square roots, so no
//! value ever passes through floating point. The digit oracle used to check
//! the automata lives here as well.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Iteration cap for continued-fraction period detection.
pub const CF_ITERATION_CAP: usize = 1_000_000;

/// `⌊√n⌋` for a non-negative big integer.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::NegativeSqrt(n.to_string()));
    }
    Ok(n.sqrt())
}

/// Splits `n > 0` as `s²·f` with `f` square-free. Returns `(s, f)`.
fn square_free_split(n: &BigInt) -> Result<(BigInt, BigInt)> {
    let mut rest = n
        .to_u128()
        .ok_or_else(|| Error::Overflow(n.to_string()))?;
    let mut square = 1u128;
    let mut p = 2u128;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            rest /= p * p;
            square *= p;
        }
        p += 1;
    }
    Ok((BigInt::from(square), BigInt::from(rest)))
}

fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// The real number `(a + b·√d)/c` with `d ≥ 2` square-free, `b ≠ 0`, `c ≥ 1`
/// and `gcd(a, b, c) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational {
    a: BigInt,
    b: BigInt,
    d: u64,
    c: BigInt,
}

impl QuadraticIrrational {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, d: u64, c: impl Into<BigInt>) -> Result<Self> {
        let (mut a, mut b, mut c) = (a.into(), b.into(), c.into());
        if d < 2 || !is_square_free(d) {
            return Err(Error::NotSquareFree(d.to_string()));
        }
        if b.is_zero() {
            return Err(Error::Rational);
        }
        if c.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        Ok(QuadraticIrrational { a, b, d, c })
    }

    /// `(p + √r)/q` for a positive non-square radicand `r`, reducing `√r` to
    /// `s·√f` with `f` square-free.
    pub fn from_surd(p: &BigInt, r: &BigInt, q: &BigInt) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::NegativeSqrt(r.to_string()));
        }
        let (s, f) = square_free_split(r)?;
        let d = f.to_u64().ok_or_else(|| Error::Overflow(f.to_string()))?;
        if d == 1 {
            return Err(Error::Rational);
        }
        Self::new(p.clone(), s, d, q.clone())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// The golden ratio `(1+√5)/2`.
    pub fn golden_ratio() -> Self {
        Self::new(1, 1, 5, 2).expect("valid constant")
    }

    /// Sign of `a + b·√d` (the denominator is positive).
    pub fn signum(&self) -> Sign {
        sign_of_surd(&self.a, &self.b, self.d)
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Sign::Plus
    }

    /// `⌊self⌋`.
    pub fn floor(&self) -> BigInt {
        floor_surd(&self.a, &self.b, self.d, &self.c)
    }

    /// Exact comparison of `self` with the rational `num/den` (`den > 0`).
    pub fn cmp_rational(&self, num: &BigInt, den: &BigInt) -> Ordering {
        // self - num/den = (a·den - num·c + b·den·√d) / (c·den)
        let a = &self.a * den - num * &self.c;
        let b = &self.b * den;
        match sign_of_surd(&a, &b, self.d) {
            Sign::Plus => Ordering::Greater,
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
        }
    }

    pub fn add_integer(&self, k: &BigInt) -> Self {
        Self::new(&self.a + k * &self.c, self.b.clone(), self.d, self.c.clone())
            .expect("adding an integer keeps the value irrational")
    }

    pub fn scale(&self, num: &BigInt, den: &BigInt) -> Result<Self> {
        Self::new(&self.a * num, &self.b * num, self.d, &self.c * den)
    }

    /// `1/self`.
    pub fn recip(&self) -> Self {
        // c/(a + b√d) = c(a - b√d)/(a² - b²d); the norm is nonzero for irrationals.
        let norm = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        Self::new(&self.c * &self.a, -(&self.c * &self.b), self.d, norm)
            .expect("reciprocal of an irrational is irrational")
    }

    /// The algebraic conjugate `(a - b·√d)/c`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.d, self.c.clone())
            .expect("conjugate of an irrational is irrational")
    }

    /// Continued fraction expansion with exact period detection.
    pub fn continued_fraction(&self) -> Result<ContinuedFraction> {
        cf_expand(self)
    }
}

/// Sign of `a + b·√d` for square-free `d ≥ 2`.
fn sign_of_surd(a: &BigInt, b: &BigInt, d: u64) -> Sign {
    let sa = a.sign();
    let sb = b.sign();
    if sb == Sign::NoSign {
        return sa;
    }
    if sa == Sign::NoSign || sa == sb {
        return sb;
    }
    // Opposite signs: compare a² with b²d (never equal for square-free d).
    let lhs = a * a;
    let rhs = b * b * BigInt::from(d);
    if lhs > rhs {
        sa
    } else {
        sb
    }
}

/// `⌊(a + b·√d)/c⌋` for `c > 0`, square-free `d`.
fn floor_surd(a: &BigInt, b: &BigInt, d: u64, c: &BigInt) -> BigInt {
    let root = (b * b * BigInt::from(d)).sqrt();
    // b√d is irrational when b ≠ 0, so its floor is one below minus the root.
    let floor_b = if b.is_negative() { -root - 1 } else { root };
    (a + floor_b).div_floor(c)
}

/// `⌊n·q⌋`, computed exactly.
pub fn beatty_floor(n: &BigInt, q: &QuadraticIrrational) -> BigInt {
    floor_surd(&(n * &q.a), &(n * &q.b), q.d, &q.c)
}

/// The `n`'th base-`base` digit to the right of the point of `q`:
/// `⌊b^{n+1}q⌋ - b·⌊b^n q⌋`.
pub fn digit(n: u64, base: u32, q: &QuadraticIrrational) -> u32 {
    let b = BigInt::from(base);
    let power = Pow::pow(&b, n);
    let hi = beatty_floor(&(&power * &b), q);
    let lo = beatty_floor(&power, q);
    (hi - lo * &b)
        .to_u32()
        .expect("a base-b digit lies in [0, b)")
}

/// The first `count` digits after the point, from a single exact floor of
/// `b^count·q`. Agrees with [`digit`] index by index.
pub fn digits(q: &QuadraticIrrational, base: u32, count: usize) -> Vec<u32> {
    if count == 0 {
        return Vec::new();
    }
    let b = BigInt::from(base);
    let power = Pow::pow(&b, count as u64);
    let scaled = beatty_floor(&power, q);
    let frac = scaled - q.floor() * &power;
    let (_, raw) = frac.to_radix_be(base);
    let mut out = vec![0u32; count.saturating_sub(raw.len())];
    if !frac.is_zero() {
        out.extend(raw.into_iter().map(u32::from));
    } else {
        out.resize(count, 0);
    }
    out
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = if self.b.is_one() {
            format!("sqrt({})", self.d)
        } else if (-&self.b).is_one() {
            format!("-sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", self.b, self.d)
        };
        let body = if self.a.is_zero() {
            root
        } else if root.starts_with('-') {
            format!("{}{}", self.a, root)
        } else {
            format!("{}+{}", self.a, root)
        };
        if self.c.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{}", self.c)
        }
    }
}

impl FromStr for QuadraticIrrational {
    type Err = Error;

    /// Parses `(a+b*sqrt(d))/c` and its abbreviations, e.g. `(1+sqrt(5))/2`,
    /// `(-3+sqrt(17))/4`, `sqrt(2)`, `sqrt(3)+1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let (a, b, d) = p.sum()?;
        p.ws();
        let c = if p.eat(b'/') {
            p.ws();
            p.integer()?
        } else {
            BigInt::one()
        };
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        let d = d.ok_or_else(|| p.err("missing sqrt term"))?;
        QuadraticIrrational::new(a, b, d, c)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, ch: u8) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        let neg = self.eat(b'-');
        let digits = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.err("expected integer"));
        }
        let text = std::str::from_utf8(&self.src[digits..self.pos]).expect("ascii digits");
        let v: BigInt = text.parse().map_err(|_| self.err("bad integer"))?;
        Ok(if neg { -v } else { v })
    }

    /// Sum of integer and `[k*]sqrt(d)` terms, optionally parenthesized.
    fn sum(&mut self) -> Result<(BigInt, BigInt, Option<u64>)> {
        self.ws();
        if self.eat(b'(') {
            let inner = self.sum()?;
            self.ws();
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(inner);
        }
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        let mut d: Option<u64> = None;
        let mut first = true;
        loop {
            self.ws();
            let mut negative = false;
            if self.eat(b'+') {
            } else if self.eat(b'-') {
                negative = true;
            } else if !first {
                break;
            }
            self.ws();
            let (coef, radicand) = self.term()?;
            let coef = if negative { -coef } else { coef };
            match radicand {
                Some(r) => {
                    if d.is_some_and(|prev| prev != r) {
                        return Err(self.err("mixed radicands"));
                    }
                    d = Some(r);
                    b += coef;
                }
                None => a += coef,
            }
            first = false;
        }
        Ok((a, b, d))
    }

    fn term(&mut self) -> Result<(BigInt, Option<u64>)> {
        if self.src[self.pos..].starts_with(b"sqrt") {
            return Ok((BigInt::one(), Some(self.sqrt()?)));
        }
        let k = self.integer()?;
        self.ws();
        if self.eat(b'*') {
            self.ws();
            if !self.src[self.pos..].starts_with(b"sqrt") {
                return Err(self.err("expected sqrt after '*'"));
            }
            return Ok((k, Some(self.sqrt()?)));
        }
        Ok((k, None))
    }

    fn sqrt(&mut self) -> Result<u64> {
        self.pos += 4;
        self.ws();
        if !self.eat(b'(') {
            return Err(self.err("expected '(' after sqrt"));
        }
        self.ws();
        let r = self.integer()?;
        self.ws();
        if !self.eat(b')') {
            return Err(self.err("expected ')'"));
        }
        r.to_u64().ok_or_else(|| Error::NotSquareFree(r.to_string()))
    }
}

/// Eventually periodic simple continued fraction `[d0; d1, ..., (p1, ..., pm)]`.
/// The preperiod always holds at least `d0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(preperiod: Vec<BigInt>, period: Vec<u64>) -> Result<Self> {
        if preperiod.is_empty() || period.is_empty() || period.contains(&0) {
            return Err(Error::Unsupported(
                "continued fraction needs d0 and a non-empty period of positive terms".into(),
            ));
        }
        if preperiod[1..].iter().any(|t| !t.is_positive()) {
            return Err(Error::Unsupported("partial quotients after d0 must be positive".into()));
        }
        Ok(ContinuedFraction { preperiod, period })
    }

    /// Term `i` of the infinite expansion (`i = 0` is `d0`).
    pub fn term(&self, i: usize) -> BigInt {
        if i < self.preperiod.len() {
            self.preperiod[i].clone()
        } else {
            BigInt::from(self.period[(i - self.preperiod.len()) % self.period.len()])
        }
    }

    /// The exact value as a quadratic irrational.
    pub fn value(&self) -> Result<QuadraticIrrational> {
        let mut x = purely_periodic_value(&self.period)?;
        for t in self.preperiod.iter().rev() {
            x = x.recip().add_integer(t);
        }
        Ok(x)
    }
}

/// `[p1; p2, ..., pm, p1, ...]` as an exact value.
fn purely_periodic_value(period: &[u64]) -> Result<QuadraticIrrational> {
    // After one pass x = (h·x + h')/(k·x + k'), so k·x² + (k' - h)·x - h' = 0.
    let (mut h, mut hp) = (BigInt::one(), BigInt::zero());
    let (mut k, mut kp) = (BigInt::zero(), BigInt::one());
    for &t in period {
        let t = BigInt::from(t);
        let nh = &t * &h + &hp;
        let nk = &t * &k + &kp;
        hp = std::mem::replace(&mut h, nh);
        kp = std::mem::replace(&mut k, nk);
    }
    let lin = &kp - &h;
    let disc = &lin * &lin + BigInt::from(4) * &k * &hp;
    QuadraticIrrational::from_surd(&(-lin), &disc, &(BigInt::from(2) * &k))
}

/// Continued fraction of a quadratic irrational, detecting the period from
/// repeated `(P, Q)` surd states.
pub fn cf_expand(q: &QuadraticIrrational) -> Result<ContinuedFraction> {
    // Write q as (P + √D)/Q with Q | D - P².
    let d = BigInt::from(q.d);
    let radicand = &q.b * &q.b * &d;
    let (mut p, mut qq) = if q.b.is_positive() {
        (q.a.clone(), q.c.clone())
    } else {
        (-q.a.clone(), -q.c.clone())
    };
    let mut big_d = radicand;
    if !(&big_d - &p * &p).is_multiple_of(&qq) {
        let s = qq.abs();
        p *= &s;
        big_d *= &s * &s;
        qq *= &s;
    }
    let root = big_d.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut terms: Vec<BigInt> = Vec::new();
    for i in 0..CF_ITERATION_CAP {
        if let Some(&start) = seen.get(&(p.clone(), qq.clone())) {
            return Ok(split_period(terms, start));
        }
        seen.insert((p.clone(), qq.clone()), i);
        let t = if qq.is_positive() {
            (&p + &root).div_floor(&qq)
        } else {
            // (P + √D)/Q with Q < 0 equals -(P + √D)/|Q|.
            let pos = (&p + &root).div_floor(&(-&qq));
            -pos - 1
        };
        let np = &t * &qq - &p;
        let nq = (&big_d - &np * &np) / &qq;
        terms.push(t);
        p = np;
        qq = nq;
    }
    Err(Error::PeriodNotFound(CF_ITERATION_CAP))
}

fn split_period(terms: Vec<BigInt>, start: usize) -> ContinuedFraction {
    let len = terms.len() - start;
    let (pre, period): (Vec<BigInt>, Vec<BigInt>) = if start == 0 {
        // Purely periodic: keep d0 separate and rotate the block by one.
        let pre = vec![terms[0].clone()];
        let period = (0..len).map(|i| terms[(1 + i) % len].clone()).collect();
        (pre, period)
    } else {
        (terms[..start].to_vec(), terms[start..].to_vec())
    };
    ContinuedFraction {
        preperiod: pre,
        period: period
            .into_iter()
            .map(|t| t.to_u64().expect("periodic partial quotients are small positives"))
            .collect(),
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};", self.preperiod[0])?;
        for t in &self.preperiod[1..] {
            write!(f, " {t},")?;
        }
        let block: Vec<String> = self.period.iter().map(u64::to_string).collect();
        write!(f, " ({})]", block.join(", "))
    }
}
