//! Laurent series fields `k = 𝔽_q((t))` and tame extensions `L = 𝔽_{q^m}((s))`, `s^e = t`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::finite_field::{FiniteField, Fq};
use crate::graded_field::{
    DegreeGroup, FixedSubfield, GaloisData, GradedElem, GradedField, HomogeneousBasis,
};
use crate::value_group::{Gamma, ValueOrZero};

/// `Σ c_k s^k`, known modulo `s^N` when `prec = Some(N)` and exact otherwise.
#[derive(Clone)]
pub struct Laurent {
    field: &'static FiniteField,
    coeffs: BTreeMap<i64, Fq>,
    prec: Option<i64>,
}

impl PartialEq for Laurent {
    fn eq(&self, other: &Laurent) -> bool {
        std::ptr::eq(self.field, other.field) && self.coeffs == other.coeffs && self.prec == other.prec
    }
}

impl Eq for Laurent {}

impl Laurent {
    pub fn zero(field: &'static FiniteField) -> Self {
        Laurent {
            field,
            coeffs: BTreeMap::new(),
            prec: None,
        }
    }

    pub fn one(field: &'static FiniteField) -> Self {
        Self::monomial(field.one(), 0)
    }

    /// `c·s^k`, exact.
    pub fn monomial(c: Fq, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Laurent {
            field: c.field(),
            coeffs,
            prec: None,
        }
    }

    pub fn constant(c: Fq) -> Self {
        Self::monomial(c, 0)
    }

    /// An exact element from `(exponent, coefficient)` pairs.
    pub fn from_terms(field: &'static FiniteField, terms: impl IntoIterator<Item = (i64, Fq)>) -> Self {
        let mut x = Laurent::zero(field);
        for (k, c) in terms {
            x.add_term(k, c);
        }
        x
    }

    /// The element modulo `s^n`.
    pub fn with_prec(mut self, n: i64) -> Self {
        self.truncate(n);
        self
    }

    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn terms(&self) -> &BTreeMap<i64, Fq> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Fq {
        self.coeffs.get(&k).copied().unwrap_or(self.field.zero())
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Exactly zero (not merely zero to the known precision).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// No known nonzero coefficient.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1 && self.prec.is_none()
    }

    pub fn truncate(&mut self, n: i64) {
        self.coeffs.retain(|&k, _| k < n);
        self.prec = Some(self.prec.map_or(n, |p| p.min(n)));
    }

    pub fn add_term(&mut self, k: i64, c: Fq) {
        if c.is_zero() || self.prec.is_some_and(|n| k >= n) {
            return;
        }
        let e = self.coeffs.entry(k).or_insert(self.field.zero());
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// `self += other` for exact elements.
    pub(crate) fn add_exact(&mut self, other: &Laurent) {
        debug_assert!(self.prec.is_none() && other.prec.is_none());
        for (&k, &c) in &other.coeffs {
            self.add_term(k, c);
        }
    }

    /// An exact element from a coefficient map; zero entries are dropped.
    pub(crate) fn from_map(field: &'static FiniteField, mut coeffs: BTreeMap<i64, Fq>) -> Self {
        coeffs.retain(|_, c| !c.is_zero());
        Laurent {
            field,
            coeffs,
            prec: None,
        }
    }

    /// Least exponent with a nonzero coefficient; `None` for exact zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match (self.coeffs.keys().next(), self.prec) {
            (Some(&k), _) => Ok(Some(k)),
            (None, None) => Ok(None),
            (None, Some(n)) => Err(Error::PrecisionLoss(format!(
                "element is O(s^{n}) with no known nonzero term"
            ))),
        }
    }

    /// Valuation, or the precision bound for inexact zeros.
    fn valuation_bound(&self) -> Option<i64> {
        self.coeffs.keys().next().copied().or(self.prec)
    }

    /// Leading term `(k, c_k)`.
    pub fn leading(&self) -> Option<(i64, Fq)> {
        self.coeffs.iter().next().map(|(&k, &c)| (k, c))
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let prec = match (self.prec, other.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = Laurent {
            field: self.field,
            coeffs: self.coeffs.clone(),
            prec: None,
        };
        for (&k, &c) in &other.coeffs {
            out.add_term(k, c);
        }
        if let Some(n) = prec {
            out.truncate(n);
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        self.map_coeffs(|_, c| -c)
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: Fq) -> Laurent {
        if k.is_zero() && self.prec.is_none() {
            return Laurent::zero(self.field);
        }
        self.map_coeffs(|_, c| c * k)
    }

    /// Multiplication by `s^k`.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            field: self.field,
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
            prec: self.prec.map(|n| n + k),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(i64, Fq) -> Fq) -> Laurent {
        Laurent {
            field: self.field,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, &c)| (k, f(k, c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero(self.field);
        }
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (Some(n1), None) => Some(n1 + other.valuation_bound().unwrap()),
            (None, Some(n2)) => Some(n2 + self.valuation_bound().unwrap()),
            (Some(n1), Some(n2)) => Some(
                (n1 + other.valuation_bound().unwrap()).min(n2 + self.valuation_bound().unwrap()),
            ),
        };
        let mut out = Laurent {
            field: self.field,
            coeffs: BTreeMap::new(),
            prec,
        };
        for (&k1, &c1) in &self.coeffs {
            for (&k2, &c2) in &other.coeffs {
                out.add_term(k1 + k2, c1 * c2);
            }
        }
        out
    }

    /// Inverse modulo `s^cap`, or exactly for monomials. The output precision is the
    /// smaller of `cap` and what the input precision justifies.
    pub fn inv(&self, cap: i64) -> Result<Laurent> {
        let (v, c0) = self.leading().ok_or_else(|| match self.prec {
            None => Error::Singular,
            Some(n) => Error::PrecisionLoss(format!("inverse of O(s^{n})")),
        })?;
        if self.is_monomial() {
            return Ok(Laurent::monomial(c0.inv(), -v));
        }
        let target = match self.prec {
            Some(n) => cap.min(n - 2 * v),
            None => cap,
        };
        // x = c0 s^v (1 + w) with w of positive valuation; 1/x = c0⁻¹ s^{-v} Σ (-w)^k
        let inv_c0 = c0.inv();
        let unit: Vec<(i64, Fq)> = self
            .coeffs
            .iter()
            .map(|(&k, &c)| (k - v, c * inv_c0))
            .collect();
        let rel = target + v;
        let mut y: BTreeMap<i64, Fq> = BTreeMap::new();
        y.insert(0, self.field.one());
        for k in 1..rel.max(0) {
            let mut acc = self.field.zero();
            for &(e, c) in unit.iter().skip(1) {
                if e > k {
                    break;
                }
                if let Some(&yk) = y.get(&(k - e)) {
                    acc -= c * yk;
                }
            }
            if !acc.is_zero() {
                y.insert(k, acc);
            }
        }
        let mut out = Laurent {
            field: self.field,
            coeffs: y
                .into_iter()
                .filter(|&(k, _)| k < rel)
                .map(|(k, c)| (k - v, c * inv_c0))
                .collect(),
            prec: None,
        };
        out.truncate(target);
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Laurent {
        let mut acc = Laurent::one(self.field);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&k, c)| {
                let c_str = if c.coeffs().iter().filter(|&&d| d != 0).count() > 1 {
                    format!("({c})")
                } else {
                    c.to_string()
                };
                match k {
                    0 => c_str,
                    1 if c.is_one() => "s".to_string(),
                    _ if c.is_one() => format!("s^{k}"),
                    1 => format!("{c_str}*s"),
                    _ => format!("{c_str}*s^{k}"),
                }
            })
            .collect();
        if let Some(n) = self.prec {
            parts.push(format!("O(s^{n})"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The tower `𝔽_q((t)) ⊂ 𝔽_{q^m}((s))` with `s^e = t` and its Galois group.
///
/// Group element `j·e + a` acts by `x ↦ x^{q^j}` on coefficients and `s ↦ ζ^a s`.
#[derive(Clone, Debug)]
pub struct Tower {
    p: u32,
    f: u32,
    m: u32,
    e: u32,
    field: &'static FiniteField,
    t_abs: Gamma,
    s_abs: Gamma,
    zeta: Fq,
    residue: GaloisData,
    fixed: FixedSubfield,
    basis: HomogeneousBasis,
}

impl Tower {
    /// `zeta` defaults to `g^{(q^m - 1)/e}` for the canonical primitive element `g`.
    pub fn new(p: u32, f: u32, m: u32, e: u32, t_abs: Gamma, zeta: Option<Fq>) -> Result<Tower> {
        if f == 0 || m == 0 || e == 0 {
            return Err(Error::InvalidField("degrees must be positive".into()));
        }
        if t_abs >= Gamma::one() {
            return Err(Error::InvalidField(format!("|t| = {t_abs} must be < 1")));
        }
        let field = FiniteField::get(p, f * m)?;
        let big_q = field.order();
        if (big_q - 1) % e != 0 {
            return Err(Error::InvalidField(format!(
                "e = {e} does not divide {p}^{} - 1",
                f * m
            )));
        }
        let zeta = match zeta {
            Some(z) => {
                if !std::ptr::eq(z.field(), field) || z.pow(e as u64) != field.one()
                    || (1..e).any(|k| e % k == 0 && z.pow(k as u64).is_one())
                {
                    return Err(Error::InvalidField(format!(
                        "{z} is not a primitive {e}-th root of unity"
                    )));
                }
                z
            }
            None => field.root_of_unity(e)?,
        };
        let s_abs = t_abs.root(e);
        let q = (p as u64).pow(f);
        let n = (m * e) as usize;
        let idx = |j: u32, a: u32| (j * e + a) as usize;
        let mut table = vec![vec![0usize; n]; n];
        let mut frob = Vec::with_capacity(n);
        let mut chars = Vec::with_capacity(n);
        for j1 in 0..m {
            for a1 in 0..e {
                frob.push(f * j1);
                chars.push(vec![zeta.pow(a1 as u64)]);
                for j2 in 0..m {
                    for a2 in 0..e {
                        let qj = mod_pow(q, j1 as u64, e as u64);
                        let a = (a1 as u64 + a2 as u64 * qj) % e as u64;
                        table[idx(j1, a1)][idx(j2, a2)] = idx((j1 + j2) % m, a as u32);
                    }
                }
            }
        }
        let degrees = DegreeGroup::new(vec![s_abs.clone()])?;
        let residue = GaloisData::new(GradedField::new(field, degrees), table, frob, chars)?;
        let fixed = residue.fixed_subfield();
        let basis = HomogeneousBasis::new(&residue, &fixed)?;
        Ok(Tower {
            p,
            f,
            m,
            e,
            field,
            t_abs,
            s_abs,
            zeta,
            residue,
            fixed,
            basis,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// `(f, m, e)`: `q = p^f`, residue degree `m`, ramification index `e`.
    pub fn degrees(&self) -> (u32, u32, u32) {
        (self.f, self.m, self.e)
    }

    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn t_abs(&self) -> &Gamma {
        &self.t_abs
    }

    pub fn s_abs(&self) -> &Gamma {
        &self.s_abs
    }

    pub fn zeta(&self) -> Fq {
        self.zeta
    }

    pub fn residue(&self) -> &GaloisData {
        &self.residue
    }

    pub fn fixed_subfield(&self) -> &FixedSubfield {
        &self.fixed
    }

    pub fn basis(&self) -> &HomogeneousBasis {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.residue.order()
    }

    pub fn element(&self, j: u32, a: u32) -> Result<usize> {
        if j >= self.m || a >= self.e {
            return Err(Error::InvalidAction(format!("no group element ({j}, {a})")));
        }
        Ok((j * self.e + a) as usize)
    }

    pub fn element_parts(&self, sigma: usize) -> (u32, u32) {
        (sigma as u32 / self.e, sigma as u32 % self.e)
    }

    /// `|L^×| = |s|^ℤ`.
    pub fn value_group_l(&self) -> DegreeGroup {
        DegreeGroup::new(vec![self.s_abs.clone()]).expect("rank one")
    }

    /// `|k^×| = |t|^ℤ`.
    pub fn value_group_k(&self) -> DegreeGroup {
        DegreeGroup::new(vec![self.t_abs.clone()]).expect("rank one")
    }

    /// `|s|^k`.
    pub fn s_pow(&self, k: i64) -> Gamma {
        self.s_abs.powi(k)
    }

    /// Exponent `k` with `|s|^k = ρ`, if any.
    pub fn s_exponent(&self, rho: &Gamma) -> Option<i64> {
        self.residue.degrees().coords(rho).map(|v| v[0])
    }

    pub fn abs(&self, x: &Laurent) -> Result<ValueOrZero> {
        Ok(match x.valuation()? {
            None => ValueOrZero::Zero,
            Some(v) => ValueOrZero::Value(self.s_pow(v)),
        })
    }

    pub fn act(&self, sigma: usize, x: &Laurent) -> Laurent {
        let (j, a) = self.element_parts(sigma);
        let z = self.zeta.pow(a as u64);
        let fpow = self.f * j;
        x.map_coeffs(|k, c| c.frobenius(fpow) * z.powi(k))
    }

    /// Class of `x` in `L̃_ρ`; requires `|x| ≤ ρ` to be decidable.
    pub fn reduce(&self, x: &Laurent, rho: &Gamma) -> Result<GradedElem> {
        let zero = GradedElem::zero(self.field);
        if let Some((v, c)) = x.leading() {
            let abs = self.s_pow(v);
            match abs.cmp(rho) {
                std::cmp::Ordering::Greater => {
                    return Err(Error::PrecisionLoss(format!("|{x}| exceeds {rho}")))
                }
                std::cmp::Ordering::Equal => return Ok(GradedElem::homogeneous(c, rho.clone())),
                std::cmp::Ordering::Less => {}
            }
        }
        match x.prec() {
            Some(n) if self.s_pow(n) >= *rho => Err(Error::PrecisionLoss(format!(
                "O(s^{n}) does not determine the class in degree {rho}"
            ))),
            _ => Ok(zero),
        }
    }

    /// The monomial lift `c·s^k` of a homogeneous class `c·u_{|s|^k}`.
    pub fn lift(&self, x: &GradedElem) -> Result<Laurent> {
        if x.is_zero() {
            return Ok(Laurent::zero(self.field));
        }
        let d = x
            .degree()
            .ok_or_else(|| Error::UnrealizableDegree(format!("{x} is not homogeneous")))?;
        let k = self
            .s_exponent(d)
            .ok_or_else(|| Error::UnrealizableDegree(d.to_string()))?;
        Ok(Laurent::monomial(x.coeff(d), k))
    }
}

fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    let mut b = b % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
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

    #[test]
    fn abs_examples() {
        let t = unramified();
        let f = t.field();
        assert_eq!(t.abs(&Laurent::zero(f)).unwrap(), ValueOrZero::Zero);
        let x = Laurent::monomial(f.one(), 2).with_prec(5);
        assert_eq!(t.abs(&x).unwrap(), ValueOrZero::Value("3^(-2)".parse().unwrap()));
        let r = ramified();
        let x = Laurent::monomial(r.field().one(), 3).with_prec(7);
        assert_eq!(r.abs(&x).unwrap(), ValueOrZero::Value("3^(-3/2)".parse().unwrap()));
        let unknown = Laurent::zero(f).with_prec(4);
        assert!(matches!(t.abs(&unknown), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn reduce_examples() {
        let t = unramified();
        let f = t.field();
        let one = Laurent::one(f);
        assert_eq!(t.reduce(&one, &Gamma::one()).unwrap(), GradedElem::one(f));
        let i = f.generator();
        let x = Laurent::from_terms(f, [(0, i), (1, f.one())]);
        assert_eq!(
            t.reduce(&x, &Gamma::one()).unwrap(),
            GradedElem::homogeneous(i, Gamma::one())
        );
        let c = f.from_int(2);
        let unit = Laurent::from_terms(f, [(0, c), (3, f.one())]);
        let tu = Laurent::monomial(f.one(), 1).mul(&unit);
        assert_eq!(t.reduce(&tu, &third()).unwrap(), GradedElem::homogeneous(c, third()));
        assert!(t.reduce(&tu, &Gamma::one()).unwrap().is_zero());
        assert!(matches!(t.reduce(&tu, &"3^(-2)".parse().unwrap()), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn galois_examples() {
        let t = unramified();
        let f = t.field();
        let i = Laurent::constant(f.generator());
        let sigma = t.element(1, 0).unwrap();
        assert_eq!(t.act(sigma, &i), i.neg());
        assert_eq!(t.act(0, &i), i);
        let r = ramified();
        let f = r.field();
        let x = Laurent::from_terms(f, [(1, f.one()), (3, f.one())]);
        assert_eq!(r.act(1, &x), x.neg());
    }

    #[test]
    fn lift_examples() {
        let t = unramified();
        let f = t.field();
        assert_eq!(t.lift(&GradedElem::one(f)).unwrap(), Laurent::one(f));
        let i = GradedElem::homogeneous(f.generator(), Gamma::one());
        assert_eq!(t.lift(&i).unwrap(), Laurent::constant(f.generator()));
        let r = ramified();
        let f = r.field();
        let c = f.from_int(2);
        let x = GradedElem::homogeneous(c, "3^(-1/2)".parse().unwrap());
        let l = r.lift(&x).unwrap();
        assert_eq!(l, Laurent::monomial(c, 1));
        assert_eq!(r.reduce(&l, &"3^(-1/2)".parse().unwrap()).unwrap(), x);
        let bad = GradedElem::homogeneous(c, "3^(-1/3)".parse().unwrap());
        assert!(matches!(r.lift(&bad), Err(Error::UnrealizableDegree(_))));
    }

    #[test]
    fn inverse_and_precision() {
        let t = unramified();
        let f = t.field();
        let x = Laurent::from_terms(f, [(1, f.one()), (2, f.one())]);
        let y = x.inv(10).unwrap();
        assert_eq!(y.prec(), Some(10));
        let prod = x.mul(&y);
        assert_eq!(prod.terms().len(), 1);
        assert_eq!(prod.coeff(0), f.one());
        let inexact = x.clone().with_prec(6);
        let y = inexact.inv(100).unwrap();
        assert_eq!(y.prec(), Some(4));
    }

    #[test]
    fn group_structure_matches_action() {
        for t in [unramified(), ramified(), Tower::new(3, 1, 2, 2, third(), None).unwrap()] {
            let f = t.field();
            let x = Laurent::from_terms(f, [(-1, f.generator()), (0, f.one()), (2, f.from_int(2))]);
            let g = t.residue();
            for a in g.elements() {
                for b in g.elements() {
                    assert_eq!(t.act(g.mul(a, b), &x), t.act(a, &t.act(b, &x)));
                }
            }
        }
    }

    fn arb_laurent() -> impl Strategy<Value = Vec<(i64, u32)>> {
        prop::collection::vec((-3i64..6, 0u32..9), 1..5)
    }

    fn build(t: &Tower, terms: &[(i64, u32)]) -> Laurent {
        let f = t.field();
        Laurent::from_terms(f, terms.iter().map(|&(k, c)| (k, f.from_packed(c % f.order()))))
    }

    proptest! {
        #[test]
        fn abs_is_multiplicative_and_ultrametric(a in arb_laurent(), b in arb_laurent()) {
            let t = Tower::new(3, 1, 2, 2, third(), None).unwrap();
            let (x, y) = (build(&t, &a), build(&t, &b));
            let ax = t.abs(&x).unwrap();
            let ay = t.abs(&y).unwrap();
            prop_assert_eq!(t.abs(&x.mul(&y)).unwrap(), ax.mul(&ay));
            let s = t.abs(&x.add(&y)).unwrap();
            prop_assert!(s <= ax.clone().max(ay.clone()));
            if ax != ay {
                prop_assert_eq!(s, ax.max(ay));
            }
        }

        #[test]
        fn reduction_is_multiplicative_and_galois_compatible(a in arb_laurent(), b in arb_laurent()) {
            let t = Tower::new(3, 1, 2, 2, third(), None).unwrap();
            let (x, y) = (build(&t, &a), build(&t, &b));
            prop_assume!(!x.is_zero() && !y.is_zero());
            let rx = t.abs(&x).unwrap().value().unwrap().clone();
            let ry = t.abs(&y).unwrap().value().unwrap().clone();
            let red_x = t.reduce(&x, &rx).unwrap();
            prop_assert_eq!(
                t.reduce(&x.mul(&y), &rx.mul(&ry)).unwrap(),
                red_x.mul(&t.reduce(&y, &ry).unwrap())
            );
            for s in t.residue().elements() {
                prop_assert_eq!(t.reduce(&t.act(s, &x), &rx).unwrap(), t.residue().act(s, &red_x));
            }
        }

        #[test]
        fn precision_never_overclaims(a in arb_laurent(), b in arb_laurent(), n1 in 0i64..8, n2 in 0i64..8) {
            let t = unramified();
            let (x, y) = (build(&t, &a), build(&t, &b));
            let (xp, yp) = (x.clone().with_prec(n1), y.clone().with_prec(n2));
            prop_assume!(!xp.is_empty() && !yp.is_empty());
            let exact = x.mul(&y);
            let approx = xp.mul(&yp);
            let n = approx.prec().unwrap();
            for k in -10..n {
                prop_assert_eq!(approx.coeff(k), exact.coeff(k));
            }
        }
    }
}
