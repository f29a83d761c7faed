//! The value group Γ: positive reals of the form Π pᵉᵖ with rational exponents.
//!
//! Every radius, degree and absolute value handled by the crate lives here.
//! The group is divisible (every element has q-th roots for all q ≥ 1),
//! torsion free and totally ordered. Equality is equality of exponent maps;
//! the order is decided exactly (see [`Gamma::cmp`]).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// An element of Γ, stored as a sorted list of `(prime, exponent)` pairs with
/// nonzero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gamma {
    exps: Vec<(u64, Rational)>,
}

impl Gamma {
    pub fn one() -> Self {
        Gamma { exps: Vec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// `p^e` for a prime `p`. Panics if `p` is not prime.
    pub fn prime_power(p: u64, e: Rational) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        let mut g = Gamma::one();
        if !e.is_zero() {
            g.exps.push((p, e));
        }
        g
    }

    /// The positive rational `num/den` as an element of Γ.
    pub fn from_ratio(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0);
        let mut g = Gamma::one();
        for (p, k) in factorize(num) {
            g = g.mul(&Gamma::prime_power(p, Rational::from_integer(k as i64)));
        }
        for (p, k) in factorize(den) {
            g = g.mul(&Gamma::prime_power(p, Rational::from_integer(-(k as i64))));
        }
        g
    }

    pub fn from_int(n: u64) -> Self {
        Gamma::from_ratio(n, 1)
    }

    pub fn exponents(&self) -> &[(u64, Rational)] {
        &self.exps
    }

    pub fn exponent(&self, p: u64) -> Rational {
        self.exps
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| *e)
            .unwrap_or_else(Rational::zero)
    }

    fn combine(&self, other: &Gamma, sign: i64) -> Gamma {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.exps, &other.exps);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, b[j].1 * sign));
                j += 1;
            } else {
                let e = a[i].1 + b[j].1 * sign;
                if !e.is_zero() {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Gamma { exps: out }
    }

    pub fn mul(&self, other: &Gamma) -> Gamma {
        self.combine(other, 1)
    }

    pub fn div(&self, other: &Gamma) -> Gamma {
        self.combine(other, -1)
    }

    pub fn inv(&self) -> Gamma {
        Gamma {
            exps: self.exps.iter().map(|&(p, e)| (p, -e)).collect(),
        }
    }

    pub fn pow_ratio(&self, k: Rational) -> Gamma {
        if k.is_zero() {
            return Gamma::one();
        }
        Gamma {
            exps: self.exps.iter().map(|&(p, e)| (p, e * k)).collect(),
        }
    }

    pub fn powi(&self, k: i64) -> Gamma {
        self.pow_ratio(Rational::from_integer(k))
    }

    /// The unique `q`-th root.
    pub fn root(&self, q: u32) -> Gamma {
        assert!(q >= 1, "root order must be positive");
        self.pow_ratio(Rational::new(1, q as i64))
    }

    /// Natural logarithm as a float; only used for heuristics and display.
    pub fn ln_f64(&self) -> f64 {
        self.exps
            .iter()
            .map(|(p, e)| (*e.numer() as f64 / *e.denom() as f64) * (*p as f64).ln())
            .sum()
    }

    pub fn to_f64(&self) -> f64 {
        self.ln_f64().exp()
    }

    pub fn max<'a>(&'a self, other: &'a Gamma) -> &'a Gamma {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Ord for Gamma {
    /// Exact comparison. A floating point filter settles almost every case;
    /// when the logarithm of the ratio is too close to zero the comparison
    /// falls back to big-integer arithmetic after clearing denominators.
    fn cmp(&self, other: &Gamma) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let diff = self.div(other);
        let mut sum = 0.0f64;
        let mut scale = 0.0f64;
        for (p, e) in &diff.exps {
            let term = (*e.numer() as f64 / *e.denom() as f64) * (*p as f64).ln();
            sum += term;
            scale += term.abs();
        }
        if sum.abs() > 1e-9 * (1.0 + scale) {
            return if sum > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        exact_sign(&diff)
    }
}

impl PartialOrd for Gamma {
    fn partial_cmp(&self, other: &Gamma) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares `Π p^{e_p}` with 1 by raising both sides to the common
/// denominator and comparing integers.
fn exact_sign(g: &Gamma) -> Ordering {
    let den = g
        .exps
        .iter()
        .fold(1i64, |acc, (_, e)| acc.lcm(e.denom()));
    let mut up = BigInt::one();
    let mut down = BigInt::one();
    for (p, e) in &g.exps {
        let k = (e * den).to_integer();
        let base = BigInt::from(*p);
        if k > 0 {
            up *= Pow::pow(&base, k as u64);
        } else {
            down *= Pow::pow(&base, (-k) as u64);
        }
    }
    up.cmp(&down)
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (idx, (p, e)) in self.exps.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if e.is_one() {
                write!(f, "{p}")?;
            } else if e.is_integer() {
                write!(f, "{p}^({})", e.numer())?;
            } else {
                write!(f, "{p}^({}/{})", e.numer(), e.denom())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ[{self}]")
    }
}

impl FromStr for Gamma {
    type Err = Error;

    /// Parses `2^(3/2)*5^(-1)`, `3^-2`, `6`, `1`. Composite bases are factored.
    fn from_str(s: &str) -> Result<Gamma> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse(format!("empty value-group literal")));
        }
        let mut acc = Gamma::one();
        for factor in s.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, parse_exponent(e)?),
                None => match factor.split_once('/') {
                    Some((num, den)) => {
                        acc = acc.div(&den.parse::<Gamma>()?);
                        (num, Rational::one())
                    }
                    None => (factor, Rational::one()),
                },
            };
            let base: u64 = base
                .parse()
                .map_err(|_| Error::parse(format!("bad base `{base}` in `{s}`")))?;
            if base == 0 {
                return Err(Error::parse(format!("zero base in `{s}`")));
            }
            for (p, k) in factorize(base) {
                acc = acc.mul(&Gamma::prime_power(p, exp * (k as i64)));
            }
        }
        Ok(acc)
    }
}

fn parse_exponent(e: &str) -> Result<Rational> {
    let inner = e
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .unwrap_or(e);
    let bad = || Error::parse(format!("bad exponent `{e}`"));
    match inner.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(inner.parse().map_err(|_| bad())?)),
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut k = 0;
        while n % d == 0 {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// An element of Γ ∪ {0}; zero is absorbing and below everything.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ValueOrZero {
    Zero,
    Value(Gamma),
}

impl ValueOrZero {
    pub fn is_zero(&self) -> bool {
        matches!(self, ValueOrZero::Zero)
    }

    pub fn value(&self) -> Option<&Gamma> {
        match self {
            ValueOrZero::Zero => None,
            ValueOrZero::Value(g) => Some(g),
        }
    }

    pub fn mul(&self, other: &ValueOrZero) -> ValueOrZero {
        match (self, other) {
            (ValueOrZero::Value(a), ValueOrZero::Value(b)) => ValueOrZero::Value(a.mul(b)),
            _ => ValueOrZero::Zero,
        }
    }

    pub fn mul_gamma(&self, g: &Gamma) -> ValueOrZero {
        match self {
            ValueOrZero::Zero => ValueOrZero::Zero,
            ValueOrZero::Value(a) => ValueOrZero::Value(a.mul(g)),
        }
    }

    pub fn max(self, other: ValueOrZero) -> ValueOrZero {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Gamma> for ValueOrZero {
    fn from(g: Gamma) -> Self {
        ValueOrZero::Value(g)
    }
}

impl Ord for ValueOrZero {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ValueOrZero::Zero, ValueOrZero::Zero) => Ordering::Equal,
            (ValueOrZero::Zero, _) => Ordering::Less,
            (_, ValueOrZero::Zero) => Ordering::Greater,
            (ValueOrZero::Value(a), ValueOrZero::Value(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for ValueOrZero {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ValueOrZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueOrZero::Zero => write!(f, "0"),
            ValueOrZero::Value(g) => write!(f, "{g}"),
        }
    }
}

/// A point of Γⁿ, e.g. a polyradius.
pub type Point = Vec<Gamma>;

pub fn point_mul(a: &[Gamma], b: &[Gamma]) -> Point {
    a.iter().zip(b).map(|(x, y)| x.mul(y)).collect()
}

/// `r^I = Π r_i^{I_i}` for an integer exponent vector.
pub fn monomial_value(r: &[Gamma], exps: &[i64]) -> Gamma {
    r.iter()
        .zip(exps)
        .fold(Gamma::one(), |acc, (ri, &k)| if k == 0 { acc } else { acc.mul(&ri.powi(k)) })
}

pub fn format_point(p: &[Gamma]) -> String {
    let parts: Vec<String> = p.iter().map(|g| g.to_string()).collect();
    format!("({})", parts.join(", "))
}
