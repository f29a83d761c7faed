//! Laurent and Tate series in several variables over `L`.
//!
//! Coefficients are exact Laurent polynomials in `s`. Truncation error lives at the
//! series level: a bounded tail lists points `r` with a bound `ε_r` such that the
//! omitted part `e` satisfies `‖e‖_r < ε_r`. Every operation propagates these bounds,
//! so a reported seminorm is exact whenever it clears the tail.

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::finite_field::{FiniteField, Fq};
use crate::graded_field::{GaloisData, GradedElem};
use crate::laurent::{Laurent, Tower};
use crate::linalg::HomMatrix;
use crate::value_group::{format_point, monomial_value, Gamma, Point, Rational, ValueOrZero};
use crate::zshape::ZShape;

pub type Exponent = Vec<i64>;

const MAX_SERIES_ROUNDS: usize = 4096;

/// Target accuracy `ε_r` at a list of points.
#[derive(Clone, Debug)]
pub struct Precision {
    points: Vec<Point>,
    eps: Vec<Gamma>,
    cuts: OnceCell<(Gamma, Vec<Option<LinearCut>>)>,
}

/// `cutoff(I) = ⌊(eps − Σ I_j radii_j) / den⌋` when the point and `ε` are rational
/// powers of `|s|`.
#[derive(Clone, Debug)]
struct LinearCut {
    den: i64,
    eps: i64,
    radii: Vec<i64>,
}

impl PartialEq for Precision {
    fn eq(&self, other: &Precision) -> bool {
        self.points == other.points && self.eps == other.eps
    }
}

impl Eq for Precision {}

/// Powers of a fixed family, each with the precision it was computed to.
#[derive(Default)]
struct PowerCache {
    powers: HashMap<Exponent, (Vec<Gamma>, Rc<TateSeries>)>,
}

/// `q` with `g = base^q`, if there is one.
fn log_in(base: &Gamma, g: &Gamma) -> Option<Rational> {
    let (p, e) = *base.exponents().first()?;
    let q = g.exponent(p) / e;
    (base.pow_ratio(q) == *g).then_some(q)
}

impl Precision {
    pub fn new(points: Vec<Point>, eps: Vec<Gamma>) -> Self {
        assert_eq!(points.len(), eps.len(), "one bound per point");
        Precision {
            points,
            eps,
            cuts: OnceCell::new(),
        }
    }

    pub fn uniform(points: Vec<Point>, eps: Gamma) -> Self {
        let eps = vec![eps; points.len()];
        Precision::new(points, eps)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn eps(&self) -> &[Gamma] {
        &self.eps
    }

    /// `ε_r · factor_r`.
    pub fn scaled(&self, factors: &[Gamma]) -> Precision {
        Precision::new(
            self.points.clone(),
            self.eps.iter().zip(factors).map(|(e, f)| e.mul(f)).collect(),
        )
    }

    fn linear_cuts(&self, s_abs: &Gamma) -> Vec<Option<LinearCut>> {
        self.points
            .iter()
            .zip(&self.eps)
            .map(|(r, e)| {
                let b = log_in(s_abs, e)?;
                let a: Vec<Rational> = r.iter().map(|x| log_in(s_abs, x)).collect::<Option<_>>()?;
                let den = a.iter().fold(*b.denom(), |acc, x| num_integer::lcm(acc, *x.denom()));
                let scale = |q: &Rational| (q * den).to_integer();
                Some(LinearCut {
                    den,
                    eps: scale(&b),
                    radii: a.iter().map(scale).collect(),
                })
            })
            .collect()
    }

    /// Largest `k` such that `|s|^k·r^I ≥ ε_r` at some tracked `r`.
    fn cutoff(&self, s_abs: &Gamma, exps: &[i64]) -> i64 {
        let (base, cuts) = self.cuts.get_or_init(|| (s_abs.clone(), self.linear_cuts(s_abs)));
        let cuts = (base == s_abs).then_some(cuts);
        self.points
            .iter()
            .zip(&self.eps)
            .enumerate()
            .map(|(i, (r, e))| match cuts.and_then(|c| c[i].as_ref()) {
                Some(c) => {
                    let num = i128::from(c.eps)
                        - exps.iter().zip(&c.radii).map(|(&x, &a)| i128::from(x) * i128::from(a)).sum::<i128>();
                    num.div_euclid(i128::from(c.den)) as i64
                }
                None => {
                    let ln_r: f64 = r.iter().zip(exps).map(|(x, &k)| x.ln_f64() * k as f64).sum();
                    let x = (e.ln_f64() - ln_r) / s_abs.ln_f64();
                    if (x - x.round()).abs() > 1e-7 {
                        x.floor() as i64
                    } else {
                        max_exponent(s_abs, &e.div(&monomial_value(r, exps)))
                    }
                }
            })
            .max()
            .unwrap_or(i64::MAX)
    }
}

/// Largest `k` with `base^k ≥ target`, for `base < 1`.
fn max_exponent(base: &Gamma, target: &Gamma) -> i64 {
    let est = (target.ln_f64() / base.ln_f64()).floor();
    let mut k = if est.is_finite() { est as i64 } else { 0 };
    while base.powi(k + 1) >= *target {
        k += 1;
    }
    while base.powi(k) < *target {
        k -= 1;
    }
    k
}

/// Bound on the omitted part of a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    Exact,
    /// `‖e‖_r < ε_r` at each listed point; other points are untracked.
    Bounded(Vec<(Point, ValueOrZero)>),
}

impl Tail {
    /// `None` when `r` is not tracked.
    pub fn at(&self, r: &[Gamma]) -> Option<ValueOrZero> {
        match self {
            Tail::Exact => Some(ValueOrZero::Zero),
            Tail::Bounded(list) => list
                .iter()
                .find(|(p, _)| p.as_slice() == r)
                .map(|(_, e)| e.clone()),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Tail::Exact)
    }

    fn merge(&self, other: &Tail, f: impl Fn(&Point, ValueOrZero, ValueOrZero) -> ValueOrZero) -> Tail {
        let points: Vec<&Point> = match (self, other) {
            (Tail::Exact, Tail::Exact) => return Tail::Exact,
            (Tail::Bounded(a), _) => a
                .iter()
                .map(|(p, _)| p)
                .filter(|p| other.at(p).is_some())
                .collect(),
            (Tail::Exact, Tail::Bounded(b)) => b.iter().map(|(p, _)| p).collect(),
        };
        Tail::Bounded(
            points
                .into_iter()
                .map(|p| {
                    let v = f(p, self.at(p).expect("tracked"), other.at(p).expect("tracked"));
                    (p.clone(), v)
                })
                .collect(),
        )
    }

    fn map(&self, f: impl Fn(&Point, &ValueOrZero) -> ValueOrZero) -> Tail {
        match self {
            Tail::Exact => Tail::Exact,
            Tail::Bounded(list) => Tail::Bounded(list.iter().map(|(p, e)| (p.clone(), f(p, e))).collect()),
        }
    }

    /// Raises the bound to at least `ε_r` at every point of `prec` that is tracked.
    fn raise(&self, prec: &Precision) -> Tail {
        Tail::Bounded(
            prec.points
                .iter()
                .zip(&prec.eps)
                .filter_map(|(p, e)| {
                    self.at(p)
                        .map(|old| (p.clone(), old.max(ValueOrZero::Value(e.clone()))))
                })
                .collect(),
        )
    }
}

/// `Σ a_I T^I` with exact Laurent coefficients and a tail bound.
#[derive(Clone)]
pub struct TateSeries {
    field: &'static FiniteField,
    s_abs: Gamma,
    n: usize,
    terms: BTreeMap<Exponent, Laurent>,
    tail: Tail,
}

impl PartialEq for TateSeries {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.field, other.field)
            && self.s_abs == other.s_abs
            && self.n == other.n
            && self.terms == other.terms
            && self.tail == other.tail
    }
}

impl TateSeries {
    pub fn zero(tower: &Tower, n: usize) -> Self {
        TateSeries {
            field: tower.field(),
            s_abs: tower.s_abs().clone(),
            n,
            terms: BTreeMap::new(),
            tail: Tail::Exact,
        }
    }

    pub fn one(tower: &Tower, n: usize) -> Self {
        TateSeries::constant(tower, n, Laurent::one(tower.field()))
    }

    pub fn constant(tower: &Tower, n: usize, c: Laurent) -> Self {
        TateSeries::monomial(tower, n, c, vec![0; n])
    }

    /// `T_i`, counting from 0.
    pub fn var(tower: &Tower, n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        TateSeries::monomial(tower, n, Laurent::one(tower.field()), e)
    }

    pub fn monomial(tower: &Tower, n: usize, c: Laurent, exps: Exponent) -> Self {
        TateSeries::from_terms(tower, n, [(exps, c)])
    }

    /// Coefficients must be exact.
    pub fn from_terms(tower: &Tower, n: usize, terms: impl IntoIterator<Item = (Exponent, Laurent)>) -> Self {
        let mut out = TateSeries::zero(tower, n);
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent length");
            assert!(c.is_exact(), "series coefficients are exact");
            out.push(e, c);
        }
        out
    }

    fn like(&self, n: usize) -> Self {
        TateSeries {
            field: self.field,
            s_abs: self.s_abs.clone(),
            n,
            terms: BTreeMap::new(),
            tail: Tail::Exact,
        }
    }

    fn one_like(&self, n: usize) -> Self {
        let mut out = self.like(n);
        out.terms.insert(vec![0; n], Laurent::one(self.field));
        out
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Laurent> {
        &self.terms
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_exact(&self) -> bool {
        self.tail.is_exact()
    }

    pub fn coeff(&self, exps: &[i64]) -> Laurent {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| Laurent::zero(self.field))
    }

    /// No stored terms (the tail may still be nonzero).
    pub fn is_stored_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.tail.is_exact()
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|e| e.iter().any(|&x| x < 0))
    }

    fn push(&mut self, exps: Exponent, c: Laurent) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_exact(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn coeff_abs(&self, c: &Laurent) -> Gamma {
        self.s_abs.powi(c.leading().expect("nonzero").0)
    }

    /// `|a|·r^I`.
    pub fn term_norm(&self, exps: &[i64], c: &Laurent, r: &[Gamma]) -> Gamma {
        self.coeff_abs(c).mul(&monomial_value(r, exps))
    }

    /// The maximum over stored terms, ignoring the tail.
    pub fn stored_norm(&self, r: &[Gamma]) -> ValueOrZero {
        if self.terms.len() < 4 {
            return self.terms.iter().fold(ValueOrZero::Zero, |acc, (e, a)| {
                acc.max(ValueOrZero::Value(self.term_norm(e, a, r)))
            });
        }
        let ln_s = self.s_abs.ln_f64();
        let ln_r: Vec<f64> = r.iter().map(Gamma::ln_f64).collect();
        let logs: Vec<f64> = self
            .terms
            .iter()
            .map(|(e, a)| {
                let k = a.leading().expect("nonzero").0 as f64;
                k * ln_s + e.iter().zip(&ln_r).map(|(&x, l)| x as f64 * l).sum::<f64>()
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.terms
            .iter()
            .zip(&logs)
            .filter(|(_, &l)| l >= top - 1e-7)
            .fold(ValueOrZero::Zero, |acc, ((e, a), _)| {
                acc.max(ValueOrZero::Value(self.term_norm(e, a, r)))
            })
    }

    fn tail_at(&self, r: &[Gamma]) -> Result<ValueOrZero> {
        self.tail.at(r).ok_or_else(|| {
            Error::PrecisionLoss(format!("no tail bound tracked at {}", format_point(r)))
        })
    }

    /// `‖f‖_r`, exact whenever the stored maximum clears the tail bound.
    pub fn seminorm(&self, r: &[Gamma]) -> Result<ValueOrZero> {
        let tail = self.tail_at(r)?;
        let m = self.stored_norm(r);
        if tail.is_zero() || (!m.is_zero() && m >= tail) {
            Ok(m)
        } else {
            Err(Error::PrecisionLoss(format!(
                "stored norm {m} is below the tail bound {tail} at {}",
                format_point(r)
            )))
        }
    }

    /// An upper bound for `‖f‖_r`.
    pub fn norm_bound(&self, r: &[Gamma]) -> Result<ValueOrZero> {
        Ok(self.stored_norm(r).max(self.tail_at(r)?))
    }

    pub fn add(&self, other: &TateSeries) -> TateSeries {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(e.clone(), c.clone());
        }
        out.tail = self.tail.merge(&other.tail, |_, a, b| a.max(b));
        out
    }

    fn absorb(&mut self, other: TateSeries) {
        for (e, c) in other.terms {
            self.push(e, c);
        }
        self.tail = self.tail.merge(&other.tail, |_, a, b| a.max(b));
    }

    pub fn neg(&self) -> TateSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &TateSeries) -> TateSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Laurent) -> TateSeries {
        self.mul_monomial(c, &vec![0; self.n])
    }

    /// `c·T^I·f`.
    pub fn mul_monomial(&self, c: &Laurent, exps: &[i64]) -> TateSeries {
        if c.is_zero() {
            return self.like(self.n);
        }
        let abs = self.coeff_abs(c);
        let mut out = self.like(self.n);
        for (e, a) in &self.terms {
            let k: Exponent = e.iter().zip(exps).map(|(x, y)| x + y).collect();
            out.push(k, a.mul(c));
        }
        out.tail = self
            .tail
            .map(|p, v| v.mul_gamma(&abs.mul(&monomial_value(p, exps))));
        out
    }

    pub fn mul(&self, other: &TateSeries) -> TateSeries {
        self.mul_with(other, None)
    }

    /// The product, dropping monomials below `ε_r` at every point of `prec`.
    pub fn mul_prec(&self, other: &TateSeries, prec: &Precision) -> TateSeries {
        self.mul_with(other, Some(prec))
    }

    fn mul_with(&self, other: &TateSeries, prec: Option<&Precision>) -> TateSeries {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = self.like(self.n);
        let mut dropped = false;
        for (e1, a) in &self.terms {
            for (e2, b) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let cut = prec.map_or(i64::MAX, |p| p.cutoff(&self.s_abs, &e));
                let (c, d) = mul_upto(a, b, cut);
                dropped |= d;
                out.push(e, c);
            }
        }
        out.tail = self.tail.merge(&other.tail, |p, ea, eb| {
            let na = self.stored_norm(p).max(ea.clone());
            let nb = other.stored_norm(p).max(eb.clone());
            na.mul(&eb).max(ea.mul(&nb))
        });
        if dropped {
            out.tail = out.tail.raise(prec.expect("only truncated products drop terms"));
        }
        out
    }

    /// Drops every monomial `c s^k T^I` with `|s|^k r^I < ε_r` at all points of `prec`.
    pub fn truncate(&self, prec: &Precision) -> TateSeries {
        let mut out = self.like(self.n);
        let mut dropped = false;
        for (e, a) in &self.terms {
            let cut = prec.cutoff(&self.s_abs, e);
            if a.terms().keys().next_back().is_some_and(|&k| k <= cut) {
                out.terms.insert(e.clone(), a.clone());
                continue;
            }
            dropped = true;
            let kept = Laurent::from_terms(self.field, a.terms().range(..=cut).map(|(&k, &c)| (k, c)));
            if !kept.is_zero() {
                out.terms.insert(e.clone(), kept);
            }
        }
        out.tail = if dropped {
            self.tail.raise(prec)
        } else {
            self.tail.clone()
        };
        out
    }

    /// Applies `σ` to the coefficients, leaving the variables fixed.
    pub fn act_coeffs(&self, tower: &Tower, sigma: usize) -> TateSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = tower.act(sigma, c);
        }
        out
    }

    /// `f(T^{J_1}, …, T^{J_n})`; tracked points are moved by `point_map`.
    pub fn reindex(&self, j: &[Vec<i64>], point_map: impl Fn(&Point) -> Point) -> TateSeries {
        let m = j.first().map_or(0, |row| row.len());
        let mut out = self.like(m);
        for (e, a) in &self.terms {
            let mut k = vec![0; m];
            for (ek, row) in e.iter().zip(j) {
                for (x, y) in k.iter_mut().zip(row) {
                    *x += ek * y;
                }
            }
            out.push(k, a.clone());
        }
        out.tail = match &self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded(list) => Tail::Bounded(list.iter().map(|(p, v)| (point_map(p), v.clone())).collect()),
        };
        out
    }

    pub fn graded_reduction(&self, r: &[Gamma]) -> Result<GradedPolynomial> {
        let norm = self.seminorm(r)?;
        let mut out = GradedPolynomial::zero(r.to_vec());
        if let ValueOrZero::Value(norm) = norm {
            for (e, a) in &self.terms {
                if self.term_norm(e, a, r) == norm {
                    let (v, c) = a.leading().expect("nonzero");
                    out.terms
                        .insert(e.clone(), GradedElem::homogeneous(c, self.s_abs.powi(v)));
                }
            }
        }
        Ok(out)
    }

    /// The index of the monomial strictly dominating all others and the tail at every point.
    pub fn dominant_at(&self, points: &[Point]) -> Result<Option<Exponent>> {
        let mut found: Option<&Exponent> = None;
        for r in points {
            let tail = self.tail_at(r)?;
            let mut best: Option<(&Exponent, Gamma)> = None;
            let mut tie = false;
            for (e, a) in &self.terms {
                let v = self.term_norm(e, a, r);
                match &best {
                    None => best = Some((e, v)),
                    Some((_, b)) => match v.cmp(b) {
                        Ordering::Greater => {
                            best = Some((e, v));
                            tie = false;
                        }
                        Ordering::Equal => tie = true,
                        Ordering::Less => {}
                    },
                }
            }
            let Some((e, v)) = best else {
                if tail.is_zero() {
                    return Ok(None);
                }
                return Err(Error::PrecisionLoss(format!(
                    "only a tail bound {tail} is known at {}",
                    format_point(r)
                )));
            };
            if ValueOrZero::Value(v.clone()) < tail {
                return Err(Error::PrecisionLoss(format!(
                    "largest term {v} is below the tail bound {tail} at {}",
                    format_point(r)
                )));
            }
            if tie {
                return Ok(None);
            }
            match found {
                None => found = Some(e),
                Some(f) if f != e => return Ok(None),
                _ => {}
            }
        }
        Ok(found.cloned())
    }

    /// Strict dominance over a shape, certified at its vertices.
    pub fn dominant_monomial(&self, u: &ZShape) -> Result<Option<Exponent>> {
        self.dominant_at(&u.vertices())
    }

    pub fn is_invertible(&self, u: &ZShape) -> Result<bool> {
        Ok(self.dominant_monomial(u)?.is_some())
    }

    /// `1/f` to accuracy `prec`; `f` needs a strictly dominant monomial at its points.
    pub fn inv(&self, prec: &Precision) -> Result<TateSeries> {
        if self.terms.len() == 1 && self.tail.is_exact() {
            let (e, a) = self.terms.iter().next().expect("one term");
            if a.is_monomial() {
                let (v, c) = a.leading().expect("nonzero");
                let mut out = self.like(self.n);
                out.terms
                    .insert(e.iter().map(|x| -x).collect(), Laurent::monomial(c.inv(), -v));
                return Ok(out);
            }
        }
        let idx = self.dominant_at(prec.points())?.ok_or(Error::Singular)?;
        let (v, c) = self.terms[&idx].leading().expect("nonzero");
        let neg_idx: Exponent = idx.iter().map(|x| -x).collect();
        let m_inv = Laurent::monomial(c.inv(), -v);
        let one = self.one_like(self.n);
        let neg_u = one.sub(&self.mul_monomial(&m_inv, &neg_idx));
        let abs: Vec<Gamma> = prec
            .points()
            .iter()
            .map(|p| self.s_abs.powi(v).mul(&monomial_value(p, &idx)))
            .collect();
        let rel = prec.scaled(&abs);
        let mut power = one.clone();
        let mut sum = one;
        for _ in 0..MAX_SERIES_ROUNDS {
            power = power.mul_prec(&neg_u, &rel);
            sum = sum.add(&power);
            if power.terms.is_empty() {
                return Ok(sum.mul_monomial(&m_inv, &neg_idx));
            }
        }
        Err(Error::NoContraction(format!(
            "geometric series for 1/f did not reach the target in {MAX_SERIES_ROUNDS} terms"
        )))
    }

    /// Bound on the omitted part of `f` at an image point `ρ`.
    fn tail_at_image(&self, rho: &[ValueOrZero]) -> Result<ValueOrZero> {
        let Tail::Bounded(list) = &self.tail else {
            return Ok(ValueOrZero::Zero);
        };
        if let Some(pt) = rho
            .iter()
            .map(|x| x.value().cloned())
            .collect::<Option<Point>>()
        {
            if let Some(v) = self.tail.at(&pt) {
                return Ok(v);
            }
        }
        if !self.has_negative_exponents() {
            if let Some((_, v)) = list
                .iter()
                .filter(|(q, _)| {
                    q.iter()
                        .zip(rho)
                        .all(|(qi, ri)| *ri <= ValueOrZero::Value(qi.clone()))
                })
                .min_by(|a, b| a.1.cmp(&b.1))
            {
                return Ok(v.clone());
            }
        }
        Err(Error::DomainViolation(format!(
            "no tail bound for the image point ({})",
            rho.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        )))
    }

    /// `f(h_1, …, h_n)`: exact when `prec` is `None`, otherwise accurate to `prec`,
    /// whose points must be tracked by every `h_j`.
    pub fn substitute(&self, hs: &[TateSeries], prec: Option<&Precision>) -> Result<TateSeries> {
        self.substitute_with(hs, prec, None)
    }

    /// `substitute`, reusing powers of `hs` from earlier calls with the same `hs`.
    fn substitute_with(
        &self,
        hs: &[TateSeries],
        prec: Option<&Precision>,
        mut cache: Option<&mut PowerCache>,
    ) -> Result<TateSeries> {
        if hs.len() != self.n {
            return Err(Error::DomainViolation(format!(
                "{} substitutions for {} variables",
                hs.len(),
                self.n
            )));
        }
        let m = hs.first().map_or(0, |h| h.n);
        if hs.iter().any(|h| h.n != m) {
            return Err(Error::DomainViolation("substituted series differ in variable count".into()));
        }
        let mut support: Vec<(&Exponent, &Laurent)> = Vec::new();
        for (e, a) in &self.terms {
            let mut vanishes = false;
            for (j, &x) in e.iter().enumerate() {
                if hs[j].is_zero() {
                    if x < 0 {
                        return Err(Error::DomainViolation(format!("negative power of T{} = 0", j + 1)));
                    }
                    vanishes |= x > 0;
                }
            }
            if !vanishes {
                support.push((e, a));
            }
        }
        let step = |e: &Exponent| -> Option<(usize, i64)> {
            e.iter().rposition(|&x| x != 0).map(|j| (j, e[j].signum()))
        };
        let pred = |e: &Exponent, (j, sg): (usize, i64)| -> Exponent {
            let mut p = e.clone();
            p[j] -= sg;
            p
        };
        let mut nodes: BTreeSet<Exponent> = BTreeSet::new();
        nodes.insert(vec![0; self.n]);
        for (e, _) in &support {
            let mut cur = (*e).clone();
            while let Some(st) = step(&cur) {
                if !nodes.insert(cur.clone()) {
                    break;
                }
                cur = pred(&cur, st);
            }
        }
        let depth = |e: &Exponent| e.iter().map(|x| x.abs()).sum::<i64>();
        let mut order: Vec<Exponent> = nodes.into_iter().collect();
        order.sort_by_key(depth);

        let Some(prec) = prec else {
            if !self.tail.is_exact() || hs.iter().any(|h| !h.tail.is_exact()) {
                return Err(Error::PrecisionLoss("exact substitution of an inexact series".into()));
            }
            let mut factors: HashMap<(usize, i64), TateSeries> = HashMap::new();
            let mut powers: HashMap<Exponent, TateSeries> = HashMap::new();
            powers.insert(vec![0; self.n], self.one_like(m));
            for c in order.iter().skip(1) {
                let st = step(c).expect("nonzero node");
                if !factors.contains_key(&st) {
                    let h = &hs[st.0];
                    let f = if st.1 > 0 {
                        h.clone()
                    } else if h.terms.len() == 1 && h.terms.values().all(Laurent::is_monomial) {
                        h.inv(&Precision::new(Vec::new(), Vec::new()))?
                    } else {
                        return Err(Error::PrecisionLoss(format!(
                            "inverting T{} ↦ {h} requires a precision",
                            st.0 + 1
                        )));
                    };
                    factors.insert(st, f);
                }
                let p = powers[&pred(c, st)].mul(&factors[&st]);
                powers.insert(c.clone(), p);
            }
            let mut out = self.like(m);
            for (e, a) in &support {
                out = out.add(&powers[*e].scale(a));
            }
            return Ok(out);
        };

        let pts = prec.points();
        let np = pts.len();
        let mut rho: Vec<Vec<ValueOrZero>> = Vec::with_capacity(np);
        for p in pts {
            rho.push(hs.iter().map(|h| h.seminorm(p)).collect::<Result<_>>()?);
        }
        let ftail: Vec<ValueOrZero> = rho
            .iter()
            .map(|r| self.tail_at_image(r))
            .collect::<Result<_>>()?;
        let rho_val = |p: usize, j: usize| -> Result<Gamma> {
            rho[p][j].value().cloned().ok_or_else(|| {
                Error::DomainViolation(format!("T{} vanishes at {}", j + 1, format_point(&pts[p])))
            })
        };
        let min_opt = |a: &mut Option<Gamma>, b: Gamma| {
            if a.as_ref().is_none_or(|x| b < *x) {
                *a = Some(b);
            }
        };
        let mut req: HashMap<Exponent, Vec<Option<Gamma>>> =
            order.iter().map(|e| (e.clone(), vec![None; np])).collect();
        for (e, a) in &support {
            let abs = self.coeff_abs(a);
            let slot = req.get_mut(*e).expect("node");
            for (p, eps) in prec.eps.iter().enumerate() {
                min_opt(&mut slot[p], eps.div(&abs));
            }
        }
        let mut factor_req: BTreeMap<(usize, i64), Vec<Option<Gamma>>> = BTreeMap::new();
        for c in order.iter().skip(1).rev() {
            let st = step(c).expect("nonzero node");
            let pr = pred(c, st);
            let rc = req[c].clone();
            for (p, rcp) in rc.into_iter().enumerate() {
                let Some(rcp) = rcp else { continue };
                let norm_f = rho_val(p, st.0)?.powi(st.1);
                let norm_pred = (0..self.n)
                    .filter(|&j| pr[j] != 0)
                    .map(|j| rho_val(p, j).map(|g| g.powi(pr[j])))
                    .collect::<Result<Vec<_>>>()?
                    .iter()
                    .fold(Gamma::one(), |acc, g| acc.mul(g));
                min_opt(&mut req.get_mut(&pr).expect("node")[p], rcp.div(&norm_f));
                min_opt(
                    &mut factor_req.entry(st).or_insert_with(|| vec![None; np])[p],
                    rcp.div(&norm_pred),
                );
            }
        }
        let fill = |v: &[Option<Gamma>]| -> Precision {
            Precision::new(
                pts.to_vec(),
                v.iter()
                    .zip(&prec.eps)
                    .map(|(x, e)| x.clone().unwrap_or_else(|| e.clone()))
                    .collect(),
            )
        };
        let mut factors: HashMap<(usize, i64), TateSeries> = HashMap::new();
        for (&(j, sg), fr) in &factor_req {
            let f = if sg > 0 {
                hs[j].clone()
            } else {
                hs[j].inv(&fill(fr)).map_err(|e| match e {
                    Error::Singular => Error::DomainViolation(format!(
                        "T{} ↦ {} has no dominant monomial on the target",
                        j + 1,
                        hs[j]
                    )),
                    other => other,
                })?
            };
            factors.insert((j, sg), f);
        }
        let mut powers: HashMap<Exponent, Rc<TateSeries>> = HashMap::new();
        powers.insert(vec![0; self.n], Rc::new(self.one_like(m)));
        for c in order.iter().skip(1) {
            let need = fill(&req[c]);
            if let Some((eps, p)) = cache.as_deref().and_then(|k| k.powers.get(c)) {
                if eps.iter().zip(need.eps()).all(|(a, b)| a <= b) {
                    powers.insert(c.clone(), Rc::clone(p));
                    continue;
                }
            }
            let st = step(c).expect("nonzero node");
            let p = Rc::new(powers[&pred(c, st)].mul_prec(&factors[&st], &need));
            if let Some(k) = cache.as_deref_mut() {
                k.powers.insert(c.clone(), (need.eps.clone(), Rc::clone(&p)));
            }
            powers.insert(c.clone(), p);
        }
        let mut out = self.like(m);
        if !support.is_empty() {
            out.tail = Tail::Bounded(pts.iter().map(|p| (p.clone(), ValueOrZero::Zero)).collect());
        }
        for (e, a) in &support {
            let mut c = self.like(m);
            c.terms.insert(vec![0; m], (*a).clone());
            out.absorb(powers[*e].mul_prec(&c, prec));
        }
        let mut out = out.truncate(prec);
        if ftail.iter().any(|t| !t.is_zero()) {
            let current = out.tail.clone();
            out.tail = Tail::Bounded(
                pts.iter()
                    .zip(&ftail)
                    .filter_map(|(p, ft)| current.at(p).map(|c| (p.clone(), c.max(ft.clone()))))
                    .collect(),
            );
        }
        if let Tail::Bounded(list) = &out.tail {
            if list.len() == pts.len() && list.iter().all(|(_, v)| v.is_zero()) {
                out.tail = Tail::Exact;
            }
        }
        Ok(out)
    }
}

/// The product of two exact Laurent polynomials, keeping exponents `≤ cut`.
fn mul_upto(a: &Laurent, b: &Laurent, cut: i64) -> (Laurent, bool) {
    let field = a.field();
    let Some((bmin, _)) = b.leading() else {
        return (Laurent::zero(field), false);
    };
    let mut out: BTreeMap<i64, Fq> = BTreeMap::new();
    let mut dropped = false;
    for (&ka, &ca) in a.terms() {
        if ka + bmin > cut {
            dropped = true;
            break;
        }
        for (&kb, &cb) in b.terms() {
            if ka + kb > cut {
                dropped = true;
                break;
            }
            *out.entry(ka + kb).or_insert_with(|| field.zero()) += ca * cb;
        }
    }
    (Laurent::from_map(field, out), dropped)
}

fn format_monomial(e: &[i64], var: &str) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| {
            if x == 1 {
                format!("{var}{}", i + 1)
            } else {
                format!("{var}{}^{x}", i + 1)
            }
        })
        .collect();
    parts.join("*")
}

impl fmt::Display for TateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (e, a) in &self.terms {
            let mono = format_monomial(e, "T");
            let coeff = if a.terms().len() > 1 {
                format!("({a})")
            } else {
                a.to_string()
            };
            parts.push(match (mono.is_empty(), coeff.as_str()) {
                (true, _) => coeff,
                (false, "1") => mono,
                (false, _) => format!("{coeff}*{mono}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Tail::Bounded(list) = &self.tail {
            let bounds: Vec<String> = list
                .iter()
                .map(|(p, e)| format!("{}: {e}", format_point(p)))
                .collect();
            parts.push(format!("O[{}]", bounds.join("; ")));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A polynomial in `τ_i^{±1}` with graded coefficients, `deg τ_i = r_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedPolynomial {
    radii: Point,
    terms: BTreeMap<Exponent, GradedElem>,
}

impl GradedPolynomial {
    pub fn zero(radii: Point) -> Self {
        GradedPolynomial {
            radii,
            terms: BTreeMap::new(),
        }
    }

    pub fn tau(field: &'static FiniteField, radii: Point, i: usize) -> Self {
        let mut e = vec![0; radii.len()];
        e[i] = 1;
        GradedPolynomial::from_terms(radii, [(e, GradedElem::one(field))])
    }

    pub fn from_terms(radii: Point, terms: impl IntoIterator<Item = (Exponent, GradedElem)>) -> Self {
        let mut out = GradedPolynomial::zero(radii);
        for (e, c) in terms {
            out.push(e, c);
        }
        out
    }

    fn push(&mut self, e: Exponent, c: GradedElem) {
        let sum = match self.terms.remove(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    pub fn radii(&self) -> &[Gamma] {
        &self.radii
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, GradedElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[i64]) -> Option<&GradedElem> {
        self.terms.get(e)
    }

    pub fn add(&self, other: &GradedPolynomial) -> GradedPolynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &GradedPolynomial) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(self.radii.clone());
        for (e1, a) in &self.terms {
            for (e2, b) in &other.terms {
                let e = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.push(e, a.mul(b));
            }
        }
        out
    }

    /// The common degree `deg(c)·r^I` of all terms, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<Gamma> {
        let mut degree: Option<Gamma> = None;
        for (e, c) in &self.terms {
            let d = c.degree()?.mul(&monomial_value(&self.radii, e));
            match &degree {
                None => degree = Some(d),
                Some(x) if *x != d => return None,
                _ => {}
            }
        }
        degree
    }

    /// A monomial other than `1` and `τ_j`, if any.
    pub fn non_affine_monomial(&self) -> Option<&Exponent> {
        self.terms.keys().find(|e| {
            e.iter().any(|&x| !(0..=1).contains(&x)) || e.iter().filter(|&&x| x == 1).count() > 1
        })
    }

    pub fn act(&self, g: &GaloisData, sigma: usize) -> GradedPolynomial {
        GradedPolynomial::from_terms(
            self.radii.clone(),
            self.terms.iter().map(|(e, c)| (e.clone(), g.act(sigma, c))),
        )
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono = format_monomial(e, "τ");
                let c = c.to_string();
                match (mono.is_empty(), c == "1") {
                    (true, _) => c,
                    (false, true) => mono,
                    (false, false) => format!("{c}*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dominant polydegrees of a family on a shape, and whether they form a basis of `ℤⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaceCheck {
    pub matrix: Vec<Vec<i64>>,
    pub det: i64,
    pub coordinates: bool,
}

pub fn coordinate_check_lace(fs: &[TateSeries], u: &ZShape) -> Result<LaceCheck> {
    let mut matrix = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        matrix.push(f.dominant_monomial(u)?.ok_or(Error::NotInvertible(i))?);
    }
    let det = int_det(&matrix);
    Ok(LaceCheck {
        matrix,
        det,
        coordinates: det.abs() == 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolydiscVerdict {
    Coordinates,
    NotCoordinates(String),
    /// The reduction is not affine, so the criterion does not apply.
    Unknown(String),
}

impl fmt::Display for PolydiscVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolydiscVerdict::Coordinates => write!(f, "coordinates"),
            PolydiscVerdict::NotCoordinates(m) => write!(f, "not-coordinates ({m})"),
            PolydiscVerdict::Unknown(m) => write!(f, "unknown ({m})"),
        }
    }
}

/// The affine reduction `f̃ = A·τ + B` of a family at `r`, when it exists.
#[derive(Clone, Debug)]
pub struct PolydiscCheck {
    pub verdict: PolydiscVerdict,
    pub s: Vec<Gamma>,
    pub a: Option<HomMatrix>,
    pub b: Vec<GradedElem>,
}

/// With `over_base`, `A` and `B` must also be Galois-invariant.
pub fn coordinate_check_polydisc(
    fs: &[TateSeries],
    r: &[Gamma],
    tower: &Tower,
    over_base: bool,
) -> Result<PolydiscCheck> {
    let n = r.len();
    let field = tower.field();
    let graded = tower.residue().graded();
    let mut s = Vec::with_capacity(n);
    let mut entries = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let give_up = |verdict, s| {
        Ok(PolydiscCheck {
            verdict,
            s,
            a: None,
            b: Vec::new(),
        })
    };
    for (i, f) in fs.iter().enumerate() {
        let si = match f.seminorm(r)? {
            ValueOrZero::Value(v) => v,
            ValueOrZero::Zero => {
                return give_up(PolydiscVerdict::NotCoordinates(format!("f{} = 0", i + 1)), s)
            }
        };
        let red = f.graded_reduction(r)?;
        if let Some(e) = red.terms().keys().find(|e| e.iter().any(|&x| x < 0)) {
            return give_up(
                PolydiscVerdict::Unknown(format!("f{} has a negative power {e:?}", i + 1)),
                s,
            );
        }
        if let Some(e) = red.non_affine_monomial() {
            return give_up(
                PolydiscVerdict::Unknown(format!(
                    "reduction of f{} contains {}",
                    i + 1,
                    format_monomial(e, "τ")
                )),
                s,
            );
        }
        let mut row = vec![GradedElem::zero(field); n];
        let mut bi = GradedElem::zero(field);
        for (e, c) in red.terms() {
            match e.iter().position(|&x| x == 1) {
                Some(j) => row[j] = c.clone(),
                None => bi = c.clone(),
            }
        }
        s.push(si);
        entries.push(row);
        b.push(bi);
    }
    let a = HomMatrix::from_entries(graded, s.clone(), r.to_vec(), &entries)?;
    let verdict = if !a.is_gl() {
        PolydiscVerdict::NotCoordinates("linear part is singular".into())
    } else if over_base
        && tower.residue().elements().any(|g| {
            a.act(tower.residue(), g) != a || b.iter().any(|x| tower.residue().act(g, x) != *x)
        })
    {
        PolydiscVerdict::NotCoordinates("reduction is not defined over the residue field of k".into())
    } else {
        PolydiscVerdict::Coordinates
    };
    Ok(PolydiscCheck {
        verdict,
        s,
        a: Some(a),
        b,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Polydisc(Point),
    Lace(ZShape),
}

impl Domain {
    pub fn points(&self) -> Vec<Point> {
        match self {
            Domain::Polydisc(r) => vec![r.clone()],
            Domain::Lace(u) => u.vertices(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Polydisc(r) => r.len(),
            Domain::Lace(u) => u.dim(),
        }
    }
}

/// Output of [`invert_coordinates`].
#[derive(Clone, Debug)]
pub struct Inversion {
    pub g: Vec<TateSeries>,
    pub rounds: usize,
    /// The contraction ratio `δ` at each tracked point of the normalized problem.
    pub contraction: Vec<ValueOrZero>,
    pub points: Vec<Point>,
    /// `audit[i][p]` bounds `‖g_i(f) − T_i‖` at `points[p]`.
    pub audit: Vec<Vec<ValueOrZero>>,
}

impl Inversion {
    pub fn worst(&self) -> ValueOrZero {
        self.audit
            .iter()
            .flatten()
            .cloned()
            .fold(ValueOrZero::Zero, ValueOrZero::max)
    }
}

/// Series `g` with `‖g_i(f) − T_i‖ ≤ ε` at the tracked points of the domain.
pub fn invert_coordinates(
    fs: &[TateSeries],
    domain: &Domain,
    tower: &Tower,
    eps: &Gamma,
    max_iter: usize,
) -> Result<Inversion> {
    let n = domain.dim();
    if fs.len() != n || fs.iter().any(|f| f.n != n) {
        return Err(Error::DomainViolation(format!("expected {n} series in {n} variables")));
    }
    let points = domain.points();
    let target = Precision::uniform(points.clone(), eps.clone());
    let (g, rounds, contraction) = match domain {
        Domain::Polydisc(r) => {
            let check = coordinate_check_polydisc(fs, r, tower, false)?;
            if check.verdict != PolydiscVerdict::Coordinates {
                return Err(Error::NoContraction(format!(
                    "no affine normal form: {}",
                    check.verdict
                )));
            }
            let a_inv = check.a.expect("affine").inv()?;
            let shift: Vec<Laurent> = check.b.iter().map(|b| tower.lift(b)).collect::<Result<_>>()?;
            let mut q = vec![vec![Laurent::zero(tower.field()); n]; n];
            for (i, row) in q.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = tower.lift(&a_inv.entry(i, j))?;
                }
            }
            let linear = |hs: &[TateSeries]| -> Vec<TateSeries> {
                (0..n)
                    .map(|i| {
                        (0..n).fold(TateSeries::zero(tower, n), |acc, j| {
                            let h = hs[j].sub(&TateSeries::constant(tower, n, shift[j].clone()));
                            acc.add(&h.scale(&q[i][j]))
                        })
                    })
                    .collect()
            };
            let normalized = linear(fs);
            let (big_g, rounds, contraction) = fixed_point(&normalized, &target, max_iter)?;
            let vars: Vec<TateSeries> = (0..n).map(|j| TateSeries::var(tower, n, j)).collect();
            let h = linear(&vars);
            let image = Precision::uniform(vec![check.s.clone()], eps.clone());
            let g = big_g
                .iter()
                .map(|gi| gi.substitute(&h, Some(&image)))
                .collect::<Result<Vec<_>>>()?;
            (g, rounds, contraction)
        }
        Domain::Lace(u) => {
            let check = coordinate_check_lace(fs, u)?;
            if !check.coordinates {
                return Err(Error::NoContraction(format!(
                    "dominant degrees {:?} are not a basis of ℤ^{n}",
                    check.matrix
                )));
            }
            let deg = check.matrix;
            let j = int_inverse(&deg).expect("unimodular");
            let psi = |v: &Point| -> Point { deg.iter().map(|row| monomial_value(v, row)).collect() };
            let moved: Vec<Point> = points.iter().map(psi).collect();
            let mut lead_inv = Vec::with_capacity(n);
            let mut normalized = Vec::with_capacity(n);
            for (i, f) in fs.iter().enumerate() {
                let fi = f.reindex(&j, psi);
                let mut e = vec![0; n];
                e[i] = 1;
                let (v, c) = fi.coeff(&e).leading().expect("dominant term");
                let li = Laurent::monomial(c.inv(), -v);
                normalized.push(fi.scale(&li));
                lead_inv.push(li);
            }
            let factors: Vec<Gamma> = points
                .iter()
                .zip(&moved)
                .map(|(v, w)| {
                    let mut best = Gamma::one();
                    for vi in v {
                        for wk in w {
                            let ratio = wk.div(vi);
                            if ratio < best {
                                best = ratio;
                            }
                        }
                    }
                    best
                })
                .collect();
            let inner = Precision::new(moved.clone(), factors.iter().map(|f| eps.mul(f)).collect());
            let (big_g, rounds, contraction) = fixed_point(&normalized, &inner, max_iter)?;
            let image_points: Vec<Point> = points
                .iter()
                .map(|v| {
                    fs.iter()
                        .map(|f| f.seminorm(v).map(|x| x.value().cloned().expect("invertible")))
                        .collect::<Result<Point>>()
                })
                .collect::<Result<_>>()?;
            let image_inner = Precision::new(
                image_points.clone(),
                factors.iter().map(|f| eps.mul(f)).collect(),
            );
            let scaled_vars: Vec<TateSeries> = (0..n)
                .map(|i| TateSeries::var(tower, n, i).scale(&lead_inv[i]))
                .collect();
            let h = big_g
                .iter()
                .map(|gi| gi.substitute(&scaled_vars, Some(&image_inner)))
                .collect::<Result<Vec<_>>>()?;
            let image = Precision::uniform(image_points, eps.clone());
            let g = j
                .iter()
                .map(|row| {
                    TateSeries::monomial(tower, n, Laurent::one(tower.field()), row.clone())
                        .substitute(&h, Some(&image))
                })
                .collect::<Result<Vec<_>>>()?;
            (g, rounds, contraction)
        }
    };
    let mut audit = Vec::with_capacity(n);
    for (i, gi) in g.iter().enumerate() {
        let d = gi
            .substitute(fs, Some(&target))?
            .sub(&TateSeries::var(tower, n, i));
        audit.push(points.iter().map(|p| d.norm_bound(p)).collect::<Result<Vec<_>>>()?);
    }
    Ok(Inversion {
        g,
        rounds,
        contraction,
        points,
        audit,
    })
}

/// For `F_i = T_i + F_i⁽¹⁾` with `‖F_i⁽¹⁾‖_r < r_i`, iterates `G ← G − R`,
/// `R ← R − R(F)` until `‖R‖ ≤ ε`, so that `G(F) − T = R`.
fn fixed_point(fs: &[TateSeries], prec: &Precision, max_iter: usize) -> Result<(Vec<TateSeries>, usize, Vec<ValueOrZero>)> {
    let n = fs.len();
    let vars: Vec<TateSeries> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            let mut v = fs[i].like(n);
            v.terms.insert(e, Laurent::one(fs[i].field));
            v
        })
        .collect();
    let mut r: Vec<TateSeries> = fs.iter().zip(&vars).map(|(f, t)| f.sub(t)).collect();
    let mut contraction = Vec::with_capacity(prec.points.len());
    for p in &prec.points {
        let mut delta = ValueOrZero::Zero;
        for (ri, pi) in r.iter().zip(p) {
            delta = delta.max(ri.norm_bound(p)?.mul_gamma(&pi.inv()));
        }
        if delta >= ValueOrZero::Value(Gamma::one()) {
            return Err(Error::NoContraction(format!(
                "δ = {delta} ≥ 1 at {}",
                format_point(p)
            )));
        }
        contraction.push(delta);
    }
    let mut g = vars;
    let mut cache = PowerCache::default();
    for round in 0..=max_iter {
        let mut done = true;
        for ri in &r {
            for (p, e) in prec.points.iter().zip(&prec.eps) {
                if ri.norm_bound(p)? > ValueOrZero::Value(e.clone()) {
                    done = false;
                }
            }
        }
        if done {
            return Ok((g, round, contraction));
        }
        if round == max_iter {
            break;
        }
        let mut next = Vec::with_capacity(n);
        for (gi, ri) in g.iter_mut().zip(&r) {
            let composed = ri.substitute_with(fs, Some(prec), Some(&mut cache))?;
            *gi = gi.sub(ri);
            next.push(ri.sub(&composed).truncate(prec));
        }
        r = next;
    }
    Err(Error::NoContraction(format!(
        "residual above target after {max_iter} rounds"
    )))
}

/// Determinant of an integer matrix (fraction-free elimination).
pub fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// The inverse of an integer matrix, when it is again integral.
pub fn int_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let mut a: Vec<Vec<Ratio<i128>>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Ratio<i128>> = row.iter().map(|&x| Ratio::from_integer(x as i128)).collect();
            r.extend((0..n).map(|j| if i == j { Ratio::one() } else { Ratio::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(piv, k);
        let inv = a[k][k].recip();
        for x in a[k].iter_mut() {
            *x *= inv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k];
                for j in 0..2 * n {
                    let sub = f * a[k][j];
                    a[i][j] -= sub;
                }
            }
        }
    }
    a.iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|x| x.is_integer().then(|| x.to_integer() as i64))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn third() -> Gamma {
        Gamma::from_ratio(1, 3)
    }

    fn unramified() -> Tower {
        Tower::new(3, 1, 2, 1, third(), None).unwrap()
    }

    fn ramified() -> Tower {
        Tower::new(3, 1, 1, 2, third(), None).unwrap()
    }

    fn ones(n: usize) -> Point {
        vec![Gamma::one(); n]
    }

    fn c(tower: &Tower, x: i64) -> Laurent {
        Laurent::constant(tower.field().from_int(x))
    }

    fn t(tower: &Tower) -> Laurent {
        Laurent::monomial(tower.field().one(), tower.degrees().2 as i64)
    }

    fn poly(tower: &Tower, n: usize, terms: &[(&[i64], Laurent)]) -> TateSeries {
        TateSeries::from_terms(tower, n, terms.iter().map(|(e, a)| (e.to_vec(), a.clone())))
    }

    #[test]
    fn seminorm_examples() {
        let k = unramified();
        assert_eq!(TateSeries::zero(&k, 2).seminorm(&ones(2)).unwrap(), ValueOrZero::Zero);
        let f = poly(&k, 2, &[(&[1, 0], c(&k, 1)), (&[0, 1], t(&k))]);
        assert_eq!(f.seminorm(&ones(2)).unwrap(), ValueOrZero::Value(Gamma::one()));
        let g = poly(&k, 1, &[(&[2], c(&k, 1)), (&[0], c(&k, 1))]);
        assert_eq!(g.seminorm(&ones(1)).unwrap(), ValueOrZero::Value(Gamma::one()));
        let tiny = TateSeries::zero(&k, 1).with_tail(Tail::Bounded(vec![(ones(1), ValueOrZero::Value(third()))]));
        assert!(matches!(tiny.seminorm(&ones(1)), Err(Error::PrecisionLoss(_))));
        assert!(matches!(f.clone().with_tail(Tail::Bounded(vec![])).seminorm(&ones(2)), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn reduction_examples() {
        let k = unramified();
        let field = k.field();
        let r = vec![third(), Gamma::one()];
        let red = TateSeries::var(&k, 2, 0).graded_reduction(&r).unwrap();
        assert_eq!(red, GradedPolynomial::tau(field, r.clone(), 0));
        assert_eq!(red.homogeneous_degree(), Some(third()));

        let shear = poly(&k, 2, &[(&[0, 1], c(&k, 1)), (&[2, 0], c(&k, 1))]);
        let red = shear.graded_reduction(&ones(2)).unwrap();
        let tau1 = GradedPolynomial::tau(field, ones(2), 0);
        let tau2 = GradedPolynomial::tau(field, ones(2), 1);
        assert_eq!(red, tau2.add(&tau1.mul(&tau1)));
        assert_eq!(red.non_affine_monomial(), Some(&vec![2, 0]));

        let f = poly(&k, 1, &[(&[1], c(&k, 1)), (&[0], t(&k))]);
        let red = f.graded_reduction(&[third()]).unwrap();
        assert_eq!(red.terms().len(), 2);
        assert_eq!(red.coeff(&[0]), Some(&GradedElem::homogeneous(field.one(), third())));
    }

    #[test]
    fn dominance_examples() {
        let k = unramified();
        let box2 = ZShape::boxed(&[Gamma::from_ratio(1, 2), third()], &[Gamma::from_int(2), Gamma::one()]).unwrap();
        assert_eq!(TateSeries::var(&k, 2, 0).dominant_monomial(&box2).unwrap(), Some(vec![1, 0]));

        let annulus = ZShape::interval(Gamma::from_ratio(1, 2), Gamma::from_int(2)).unwrap();
        let f = poly(&k, 1, &[(&[2], c(&k, 1)), (&[0], c(&k, 1))]);
        assert_eq!(f.dominant_monomial(&annulus).unwrap(), None);
        assert!(!f.is_invertible(&annulus).unwrap());
        assert!(TateSeries::one(&k, 1).is_invertible(&annulus).unwrap());

        let point = ZShape::point(&ones(2)).unwrap();
        let g = poly(&k, 2, &[(&[1, -1], c(&k, 1)), (&[1, 0], t(&k))]);
        assert_eq!(g.dominant_monomial(&point).unwrap(), Some(vec![1, -1]));
    }

    #[test]
    fn lace_checks() {
        let k = unramified();
        let u = ZShape::point(&ones(2)).unwrap();
        let t1 = TateSeries::var(&k, 2, 0);
        let t2 = TateSeries::var(&k, 2, 1);
        let id = coordinate_check_lace(&[t1.clone(), t2.clone()], &u).unwrap();
        assert_eq!(id.matrix, vec![vec![1, 0], vec![0, 1]]);
        assert!(id.coordinates);

        let f1 = poly(&k, 2, &[(&[1, -1], c(&k, 1))]);
        let shear = coordinate_check_lace(&[f1, t2.clone()], &u).unwrap();
        assert_eq!(shear.matrix, vec![vec![1, -1], vec![0, 1]]);
        assert!(shear.coordinates);

        let sq = coordinate_check_lace(&[t1.mul(&t1), t2], &u).unwrap();
        assert_eq!(sq.det, 2);
        assert!(!sq.coordinates);

        let tie = poly(&k, 2, &[(&[1, 0], c(&k, 1)), (&[0, 1], c(&k, 1))]);
        assert!(matches!(
            coordinate_check_lace(&[tie.clone(), tie], &u),
            Err(Error::NotInvertible(0))
        ));
    }

    #[test]
    fn polydisc_checks() {
        let k = unramified();
        let vars: Vec<TateSeries> = (0..2).map(|i| TateSeries::var(&k, 2, i)).collect();
        let id = coordinate_check_polydisc(&vars, &ones(2), &k, true).unwrap();
        assert_eq!(id.verdict, PolydiscVerdict::Coordinates);

        let shear = poly(&k, 2, &[(&[0, 1], c(&k, 1)), (&[2, 0], c(&k, 1))]);
        let check = coordinate_check_polydisc(&[vars[0].clone(), shear], &ones(2), &k, false).unwrap();
        assert!(matches!(check.verdict, PolydiscVerdict::Unknown(_)));

        let scaled = vars[0].scale(&t(&k));
        let check = coordinate_check_polydisc(&[scaled, vars[1].clone()], &ones(2), &k, true).unwrap();
        assert_eq!(check.verdict, PolydiscVerdict::Coordinates);
        assert_eq!(check.s, vec![third(), Gamma::one()]);

        let i = Laurent::constant(k.field().generator());
        let twisted = vars[0].scale(&i);
        let check = coordinate_check_polydisc(&[twisted, vars[1].clone()], &ones(2), &k, true).unwrap();
        assert!(matches!(check.verdict, PolydiscVerdict::NotCoordinates(_)));

        let dup = coordinate_check_polydisc(&[vars[0].clone(), vars[0].clone()], &ones(2), &k, false).unwrap();
        assert!(matches!(dup.verdict, PolydiscVerdict::NotCoordinates(_)));
    }

    #[test]
    fn substitution_examples() {
        let k = unramified();
        let field = k.field();
        let f = poly(&k, 2, &[(&[1, 1], c(&k, 1)), (&[2, 0], t(&k))]);
        let vars: Vec<TateSeries> = (0..2).map(|i| TateSeries::var(&k, 2, i)).collect();
        assert_eq!(f.substitute(&vars, None).unwrap(), f);
        let swapped = [vars[1].clone(), vars[0].clone()];
        let prod = poly(&k, 2, &[(&[1, 1], c(&k, 1))]);
        assert_eq!(prod.substitute(&swapped, None).unwrap(), prod);

        let i = Laurent::constant(field.generator());
        let g = poly(&k, 1, &[(&[2], c(&k, 1)), (&[0], c(&k, 1))]);
        let h = poly(&k, 1, &[(&[1], c(&k, 1)), (&[0], i.clone())]);
        let expected = poly(&k, 1, &[(&[2], c(&k, 1)), (&[1], i.scale(field.from_int(2)))]);
        assert_eq!(g.substitute(&[h], None).unwrap(), expected);
    }

    #[test]
    fn inverse_of_unit() {
        let k = ramified();
        let r = ones(1);
        let prec = Precision::uniform(vec![r.clone()], k.t_abs().powi(10));
        let f = poly(&k, 1, &[(&[0], c(&k, 1)), (&[1], Laurent::monomial(k.field().one(), 1))]);
        let g = f.inv(&prec).unwrap();
        let one = f.mul(&g).sub(&TateSeries::one(&k, 1));
        assert!(one.norm_bound(&r).unwrap() <= ValueOrZero::Value(k.t_abs().powi(10)));
        let tie = poly(&k, 1, &[(&[0], c(&k, 1)), (&[1], c(&k, 1))]);
        assert!(matches!(tie.inv(&prec), Err(Error::Singular)));
    }

    #[test]
    fn invert_identity() {
        let k = unramified();
        let f = vec![TateSeries::var(&k, 1, 0)];
        let inv = invert_coordinates(&f, &Domain::Polydisc(ones(1)), &k, &third().powi(32), 64).unwrap();
        assert_eq!(inv.g[0], TateSeries::var(&k, 1, 0));
        assert_eq!(inv.rounds, 0);
    }

    #[test]
    fn invert_quadratic_perturbation() {
        let k = unramified();
        let eps = third().powi(5);
        let f = poly(&k, 1, &[(&[1], c(&k, 1)), (&[2], t(&k))]);
        let inv = invert_coordinates(&[f.clone()], &Domain::Polydisc(ones(1)), &k, &eps, 64).unwrap();
        assert!(inv.worst() <= ValueOrZero::Value(eps.clone()));
        let stored = TateSeries::from_terms(&k, 1, inv.g[0].terms().clone());
        let composed = stored.substitute(&[f], None).unwrap();
        let diff = composed.sub(&TateSeries::var(&k, 1, 0));
        assert!(diff.seminorm(&ones(1)).unwrap() <= ValueOrZero::Value(eps));
    }

    #[test]
    fn invert_lace_translation() {
        let k = unramified();
        let f = poly(&k, 1, &[(&[1], c(&k, 1)), (&[0], t(&k))]);
        let u = ZShape::point(&ones(1)).unwrap();
        let inv = invert_coordinates(&[f], &Domain::Lace(u), &k, &third().powi(32), 64).unwrap();
        let expected = poly(&k, 1, &[(&[1], c(&k, 1)), (&[0], t(&k).neg())]);
        assert_eq!(TateSeries::from_terms(&k, 1, inv.g[0].terms().clone()), expected);
        assert_eq!(inv.worst(), ValueOrZero::Zero);
    }

    #[test]
    fn invert_lace_with_reindexing() {
        let k = unramified();
        let u = ZShape::boxed(&[Gamma::from_ratio(1, 2), Gamma::from_ratio(1, 2)], &[Gamma::one(), Gamma::one()]).unwrap();
        let f1 = poly(&k, 2, &[(&[1, -1], c(&k, 2)), (&[0, 0], t(&k))]);
        let f2 = poly(&k, 2, &[(&[0, 1], c(&k, 1)), (&[1, 1], t(&k))]);
        let eps = third().powi(12);
        let inv = invert_coordinates(&[f1, f2], &Domain::Lace(u), &k, &eps, 64).unwrap();
        assert!(inv.worst() <= ValueOrZero::Value(eps));
    }

    #[test]
    fn non_contracting_family_rejected() {
        let k = unramified();
        let f = poly(&k, 1, &[(&[1], c(&k, 1)), (&[2], c(&k, 1))]);
        let err = invert_coordinates(&[f], &Domain::Polydisc(ones(1)), &k, &third().powi(8), 64);
        assert!(matches!(err, Err(Error::NoContraction(_))));
    }

    #[test]
    fn integer_matrices() {
        assert_eq!(int_det(&[vec![1, -1], vec![0, 1]]), 1);
        assert_eq!(int_det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(int_det(&[vec![2, 0], vec![0, 1]]), 2);
        assert_eq!(int_det(&[vec![2, 1, 0], vec![1, 1, 0], vec![0, 3, 1]]), 1);
        assert_eq!(int_inverse(&[vec![1, -1], vec![0, 1]]), Some(vec![vec![1, 1], vec![0, 1]]));
        assert_eq!(int_inverse(&[vec![2, 0], vec![0, 1]]), None);
    }

    fn laurent_strategy(tower: &'static Tower) -> impl Strategy<Value = Laurent> {
        proptest::collection::vec((-2i64..4, 0u32..9), 1..4).prop_map(move |ts| {
            Laurent::from_terms(tower.field(), ts.into_iter().map(|(k, c)| (k, tower.field().from_packed(c))))
        })
    }

    fn series_strategy(tower: &'static Tower) -> impl Strategy<Value = TateSeries> {
        proptest::collection::vec(((0i64..3, 0i64..3), laurent_strategy(tower)), 1..5).prop_map(move |ts| {
            TateSeries::from_terms(tower, 2, ts.into_iter().map(|((a, b), c)| (vec![a, b], c)))
        })
    }

    fn tower_static() -> &'static Tower {
        use std::sync::OnceLock;
        static T: OnceLock<Tower> = OnceLock::new();
        T.get_or_init(unramified)
    }

    fn point_strategy() -> impl Strategy<Value = Point> {
        proptest::collection::vec((-2i64..=2).prop_map(|k| Gamma::from_ratio(1, 2).powi(k)), 2)
    }

    proptest! {
        #[test]
        fn monomial_norms_multiply(a in laurent_strategy(tower_static()), e in proptest::collection::vec(-3i64..3, 2), r in point_strategy()) {
            let k = tower_static();
            prop_assume!(!a.is_zero());
            let f = TateSeries::monomial(k, 2, a.clone(), e.clone());
            let expected = k.s_abs().powi(a.leading().unwrap().0).mul(&monomial_value(&r, &e));
            prop_assert_eq!(f.seminorm(&r).unwrap(), ValueOrZero::Value(expected));
        }

        #[test]
        fn seminorm_axioms(f in series_strategy(tower_static()), g in series_strategy(tower_static()), r in point_strategy()) {
            let nf = f.seminorm(&r).unwrap();
            let ng = g.seminorm(&r).unwrap();
            prop_assert!(f.add(&g).seminorm(&r).unwrap() <= nf.clone().max(ng.clone()));
            prop_assert_eq!(f.mul(&g).seminorm(&r).unwrap(), nf.mul(&ng));
        }

        #[test]
        fn reduction_is_multiplicative(f in series_strategy(tower_static()), g in series_strategy(tower_static()), r in point_strategy()) {
            let lhs = f.mul(&g).graded_reduction(&r).unwrap();
            let rhs = f.graded_reduction(&r).unwrap().mul(&g.graded_reduction(&r).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn truncation_never_overclaims(f in series_strategy(tower_static()), g in series_strategy(tower_static()), r in point_strategy(), cut in 0i64..6) {
            let prec = Precision::uniform(vec![r.clone()], tower_static().s_abs().powi(cut));
            let exact = f.mul(&g);
            let approx = f.mul_prec(&g, &prec);
            let err = exact.sub(&TateSeries::from_terms(tower_static(), 2, approx.terms().clone()));
            prop_assert!(err.stored_norm(&r) < approx.tail().at(&r).unwrap().max(ValueOrZero::Value(Gamma::from_ratio(1, 1 << 40))));
        }
    }
}
