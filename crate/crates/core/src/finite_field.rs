//! Finite fields 𝔽_{p^m} in a fixed polynomial basis.
//!
//! Elements are packed as base-`p` integers (coefficient of `a^i` is digit
//! `i`), where `a` is the class of `X` modulo the canonical modulus: the first
//! monic irreducible polynomial of degree `m` in packed order. For `𝔽₉` this
//! is `X² + 1`, so `a` plays the role of `i`.
//!
//! Fields are interned and leaked, so elements are `Copy` and carry a
//! `&'static` reference to their field.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::value_group::is_prime;

/// Upper bound on the field order; log/exp tables are stored densely.
pub const MAX_ORDER: u64 = 1 << 20;

pub struct FiniteField {
    p: u32,
    m: u32,
    order: u32,
    /// Monic modulus, coefficients from low to high degree (length m + 1).
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    primitive: u32,
    /// `add[a·order + b]`, present for small fields.
    add: Vec<u32>,
}

/// Fields up to this order get a dense addition table.
const ADD_TABLE_ORDER: u32 = 256;

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.m)
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), &'static FiniteField>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), &'static FiniteField>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FiniteField {
    /// The interned field with `p^m` elements.
    pub fn get(p: u32, m: u32) -> Result<&'static FiniteField> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if m == 0 || (p as u64).checked_pow(m).map_or(true, |q| q > MAX_ORDER) {
            return Err(Error::InvalidField(format!("{p}^{m} out of range")));
        }
        let mut reg = registry().lock().expect("field registry poisoned");
        if let Some(f) = reg.get(&(p, m)) {
            return Ok(f);
        }
        let field: &'static FiniteField = Box::leak(Box::new(FiniteField::build(p, m)));
        reg.insert((p, m), field);
        Ok(field)
    }

    fn build(p: u32, m: u32) -> FiniteField {
        let order = p.pow(m);
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            (0..order)
                .map(|low| {
                    let mut f = digits_of(low, p, m as usize);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        let mut field = FiniteField {
            p,
            m,
            order,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            primitive: 0,
            add: Vec::new(),
        };
        let n = (order - 1) as usize;
        for cand in 1..order {
            let mut powers = Vec::with_capacity(n);
            let mut x = 1u32;
            let mut ok = true;
            for k in 0..n {
                if k > 0 && x == 1 {
                    ok = false;
                    break;
                }
                powers.push(x);
                x = field.slow_mul(x, cand);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; order as usize];
                for (k, &v) in powers.iter().enumerate() {
                    log[v as usize] = k as u32;
                }
                field.exp = powers;
                field.log = log;
                field.primitive = cand;
                break;
            }
        }
        if order <= ADD_TABLE_ORDER {
            field.add = (0..order * order)
                .map(|i| {
                    let (a, b) = (digits_of(i / order, p, m as usize), digits_of(i % order, p, m as usize));
                    let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + y) % p).collect();
                    from_digits(&sum, p)
                })
                .collect();
        }
        field
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let m = self.m as usize;
        let da = digits_of(a, self.p, m);
        let db = digits_of(b, self.p, m);
        let mut prod = vec![0u64; 2 * m];
        for i in 0..m {
            for j in 0..m {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for deg in (m..2 * m).rev() {
            let c = prod[deg];
            if c != 0 {
                for k in 0..=m {
                    let idx = deg - m + k;
                    prod[idx] = (prod[idx] + p * p - c * self.modulus[k] as u64) % p;
                }
            }
        }
        let digits: Vec<u32> = prod[..m].iter().map(|&x| x as u32).collect();
        from_digits(&digits, self.p)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&'static self) -> Fq {
        Fq { field: self, v: 0 }
    }

    pub fn one(&'static self) -> Fq {
        Fq { field: self, v: 1 }
    }

    /// The class `a` of the polynomial variable (zero over a prime field).
    pub fn generator(&'static self) -> Fq {
        if self.m == 1 {
            self.zero()
        } else {
            self.from_packed(self.p)
        }
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&'static self) -> Fq {
        self.from_packed(self.primitive)
    }

    pub fn from_packed(&'static self, v: u32) -> Fq {
        assert!(v < self.order);
        Fq { field: self, v }
    }

    pub fn from_int(&'static self, n: i64) -> Fq {
        let r = n.rem_euclid(self.p as i64) as u32;
        Fq { field: self, v: r }
    }

    /// Element from polynomial coefficients in `a`, low degree first.
    pub fn from_coeffs(&'static self, coeffs: &[i64]) -> Fq {
        let mut acc = self.zero();
        let mut pw = self.one();
        let a = self.generator();
        for (k, &c) in coeffs.iter().enumerate() {
            if k > 0 {
                pw *= a;
            }
            acc += self.from_int(c) * pw;
        }
        acc
    }

    pub fn elements(&'static self) -> impl Iterator<Item = Fq> {
        (0..self.order).map(move |v| self.from_packed(v))
    }

    /// Primitive `e`-th root of unity `g^{(q-1)/e}`.
    pub fn root_of_unity(&'static self, e: u32) -> Result<Fq> {
        if e == 0 || (self.order - 1) % e != 0 {
            return Err(Error::InvalidField(format!(
                "no primitive {e}-th root of unity in GF({}^{})",
                self.p, self.m
            )));
        }
        Ok(self.primitive_element().pow(((self.order - 1) / e) as u64))
    }
}

fn digits_of(mut v: u32, p: u32, m: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(m);
    for _ in 0..m {
        d.push(v % p);
        v /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0u32, |acc, &x| acc * p + x)
}

fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&x| x as u64).collect();
    let dg = g.len() - 1;
    let lead_inv = mod_inv(g[dg] as u64, p);
    while r.len() > dg && !r.is_empty() {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if top != 0 {
            let c = top * lead_inv % p;
            for (k, &gk) in g.iter().enumerate() {
                r[shift + k] = (r[shift + k] + p * p - c * gk as u64 % p) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|x| x as u32).collect()
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Trial division by every monic polynomial of degree ≤ deg/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut g = digits_of(low, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// An element of a finite field.
#[derive(Clone, Copy)]
pub struct Fq {
    field: &'static FiniteField,
    v: u32,
}

impl Fq {
    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn packed(&self) -> u32 {
        self.v
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    pub fn is_one(&self) -> bool {
        self.v == 1
    }

    /// Coefficients in `a`, low degree first.
    pub fn coeffs(&self) -> Vec<u32> {
        digits_of(self.v, self.field.p, self.field.m as usize)
    }

    pub fn inv(&self) -> Fq {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.field.order - 1;
        let l = self.field.log[self.v as usize];
        Fq {
            field: self.field,
            v: self.field.exp[((n - l) % n) as usize],
        }
    }

    pub fn pow(&self, k: u64) -> Fq {
        if self.is_zero() {
            return if k == 0 { self.field.one() } else { *self };
        }
        let n = (self.field.order - 1) as u64;
        let l = self.field.log[self.v as usize] as u64;
        Fq {
            field: self.field,
            v: self.field.exp[((l * (k % n)) % n) as usize],
        }
    }

    pub fn powi(&self, k: i64) -> Fq {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.inv().pow((-k) as u64)
        }
    }

    /// `x ↦ x^{p^k}`.
    pub fn frobenius(&self, k: u32) -> Fq {
        if self.is_zero() || k % self.field.m == 0 {
            return *self;
        }
        let n = (self.field.order - 1) as u64;
        let pk = (self.field.p as u64).pow(k % self.field.m) % n;
        self.pow(pk)
    }

    fn digitwise(self, other: Fq, f: impl Fn(u32, u32) -> u32) -> Fq {
        debug_assert!(std::ptr::eq(self.field, other.field), "mixed fields");
        let p = self.field.p;
        let (mut a, mut b) = (self.v, other.v);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.field.m {
            out += f(a % p, b % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        Fq {
            field: self.field,
            v: out,
        }
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Fq) -> bool {
        self.v == other.v && std::ptr::eq(self.field, other.field)
    }
}

impl Eq for Fq {}

impl Hash for Fq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.v.hash(state);
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Fq) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fq {
    fn cmp(&self, other: &Fq) -> std::cmp::Ordering {
        self.v.cmp(&other.v)
    }
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, o: Fq) -> Fq {
        let f = self.field;
        if !f.add.is_empty() {
            return Fq {
                field: f,
                v: f.add[(self.v * f.order + o.v) as usize],
            };
        }
        let p = f.p;
        self.digitwise(o, |x, y| (x + y) % p)
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, o: Fq) -> Fq {
        let p = self.field.p;
        self.digitwise(o, |x, y| (x + p - y) % p)
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        self.field.zero() - self
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, o: Fq) -> Fq {
        debug_assert!(std::ptr::eq(self.field, o.field), "mixed fields");
        if self.v == 0 || o.v == 0 {
            return self.field.zero();
        }
        let n = self.field.order - 1;
        let l = (self.field.log[self.v as usize] + self.field.log[o.v as usize]) % n;
        Fq {
            field: self.field,
            v: self.field.exp[l as usize],
        }
    }
}

impl Div for Fq {
    type Output = Fq;
    fn div(self, o: Fq) -> Fq {
        self * o.inv()
    }
}

impl AddAssign for Fq {
    fn add_assign(&mut self, o: Fq) {
        *self = *self + o;
    }
}

impl SubAssign for Fq {
    fn sub_assign(&mut self, o: Fq) {
        *self = *self - o;
    }
}

impl MulAssign for Fq {
    fn mul_assign(&mut self, o: Fq) {
        *self = *self * o;
    }
}

impl fmt::Display for Fq {
    /// Polynomial in `a`, highest degree first: `2a+1`, `a^2`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeffs();
        let mut parts = Vec::new();
        for (k, &ck) in c.iter().enumerate().rev() {
            if ck == 0 {
                continue;
            }
            let s = match (k, ck) {
                (0, _) => format!("{ck}"),
                (1, 1) => "a".to_string(),
                (1, _) => format!("{ck}a"),
                (_, 1) => format!("a^{k}"),
                _ => format!("{ck}a^{k}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dense matrices over a finite field, row-major `Vec<Vec<Fq>>`.
pub mod matrix {
    use super::Fq;

    pub type FMatrix = Vec<Vec<Fq>>;

    pub fn identity(one: Fq, n: usize) -> FMatrix {
        let zero = one - one;
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { one } else { zero }).collect())
            .collect()
    }

    pub fn mul(a: &FMatrix, b: &FMatrix, zero: Fq) -> FMatrix {
        let n = a.len();
        let k = b.len();
        let m = if k == 0 { 0 } else { b[0].len() };
        let mut out = vec![vec![zero; m]; n];
        for i in 0..n {
            for l in 0..k {
                let x = a[i][l];
                if x.is_zero() {
                    continue;
                }
                for j in 0..m {
                    out[i][j] += x * b[l][j];
                }
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns the rank and, for square input, the determinant.
    fn eliminate(a: &mut FMatrix, track: Option<&mut FMatrix>) -> (usize, Option<Fq>) {
        let rows = a.len();
        if rows == 0 {
            return (0, None);
        }
        let cols = a[0].len();
        let one = a[0].first().map(|x| x.field().one());
        let mut det = one;
        let mut track = track;
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
                det = one.map(|o| o - o);
                continue;
            };
            if piv != rank {
                a.swap(piv, rank);
                if let Some(t) = track.as_deref_mut() {
                    t.swap(piv, rank);
                }
                det = det.map(|d| -d);
            }
            let inv = a[rank][c].inv();
            det = det.map(|d| d * a[rank][c]);
            for x in a[rank].iter_mut() {
                *x *= inv;
            }
            if let Some(t) = track.as_deref_mut() {
                for x in t[rank].iter_mut() {
                    *x *= inv;
                }
            }
            for r in 0..rows {
                if r != rank && !a[r][c].is_zero() {
                    let f = a[r][c];
                    let pivot_row = a[rank].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x -= f * *y;
                    }
                    if let Some(t) = track.as_deref_mut() {
                        let prow = t[rank].clone();
                        for (x, y) in t[r].iter_mut().zip(&prow) {
                            *x -= f * *y;
                        }
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        (rank, det)
    }

    pub fn rank(a: &FMatrix) -> usize {
        let mut m = a.clone();
        eliminate(&mut m, None).0
    }

    pub fn det(a: &FMatrix) -> Fq {
        assert!(!a.is_empty() && a.len() == a[0].len(), "det of non-square matrix");
        let mut m = a.clone();
        let (rank, det) = eliminate(&mut m, None);
        let d = det.unwrap();
        if rank < a.len() {
            d - d
        } else {
            d
        }
    }

    pub fn inverse(a: &FMatrix) -> Option<FMatrix> {
        let n = a.len();
        if n == 0 {
            return Some(Vec::new());
        }
        let one = a[0][0].field().one();
        let mut m = a.clone();
        let mut t = identity(one, n);
        let (rank, _) = eliminate(&mut m, Some(&mut t));
        (rank == n).then_some(t)
    }
}

/// Linear algebra over the prime field, with field elements viewed as digit vectors.
pub mod prime {
    use super::{FiniteField, Fq};

    /// Row-reduces `rows` modulo `p` in place and returns the pivot columns.
    pub fn row_reduce(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
        let p64 = p as u64;
        let cols = rows.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
                continue;
            };
            rows.swap(piv, rank);
            let inv = super::mod_inv(rows[rank][c] as u64, p64);
            for x in rows[rank].iter_mut() {
                *x = (*x as u64 * inv % p64) as u32;
            }
            let prow = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[c] != 0 {
                    let f = row[c] as u64;
                    for (x, y) in row.iter_mut().zip(&prow) {
                        *x = ((*x as u64 + p64 * p64 - f * *y as u64) % p64) as u32;
                    }
                }
            }
            pivots.push(c);
            rank += 1;
        }
        rows.truncate(rank);
        pivots
    }

    pub fn rank(rows: &[Vec<u32>], p: u32) -> usize {
        let mut m = rows.to_vec();
        row_reduce(&mut m, p).len()
    }

    /// Basis of `{x : Σ_j x_j rows_j = 0}`, i.e. the left kernel of the given rows.
    pub fn left_kernel(rows: &[Vec<u32>], p: u32) -> Vec<Vec<u32>> {
        let n = rows.len();
        if n == 0 {
            return Vec::new();
        }
        let cols = rows[0].len();
        // transpose, then the right kernel of the transposed system
        let mut t: Vec<Vec<u32>> = (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        if t.is_empty() {
            t.push(vec![0; n]);
        }
        let pivots = row_reduce(&mut t, p);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u32; n];
                v[f] = 1;
                for (row, &pc) in t.iter().zip(&pivots) {
                    v[pc] = (p - row[f] % p) % p;
                }
                v
            })
            .collect()
    }

    /// Some `x` with `Σ_j x_j rows_j = target`, if one exists.
    pub fn solve(rows: &[Vec<u32>], target: &[u32], p: u32) -> Option<Vec<u32>> {
        let mut all = rows.to_vec();
        all.push(target.to_vec());
        let n = rows.len();
        let mut best = None;
        for mut k in left_kernel(&all, p) {
            if k[n] != 0 {
                let scale = (p as u64 - super::mod_inv(k[n] as u64, p as u64)) % p as u64;
                for x in k.iter_mut() {
                    *x = (*x as u64 * scale % p as u64) as u32;
                }
                k.pop();
                best = Some(k);
                break;
            }
        }
        best
    }

    pub fn to_vec(x: Fq) -> Vec<u32> {
        x.coeffs()
    }

    pub fn from_vec(field: &'static FiniteField, v: &[u32]) -> Fq {
        field.from_packed(super::from_digits(v, field.characteristic()))
    }

    /// The `F_p`-basis `1, a, …, a^{m-1}` of the field.
    pub fn monomial_basis(field: &'static FiniteField) -> Vec<Fq> {
        let p = field.characteristic();
        (0..field.degree()).map(|k| field.from_packed(p.pow(k))).collect()
    }

    /// Basis of the `F_p`-subspace `{c : f(c) = 0}` for an `F_p`-linear map `f` on the field.
    pub fn kernel_of(field: &'static FiniteField, f: impl Fn(Fq) -> Fq) -> Vec<Fq> {
        let p = field.characteristic();
        let basis = monomial_basis(field);
        let images: Vec<Vec<u32>> = basis.iter().map(|&b| to_vec(f(b))).collect();
        left_kernel(&images, p)
            .into_iter()
            .map(|k| {
                k.iter()
                    .zip(&basis)
                    .fold(field.zero(), |acc, (&c, &b)| acc + field.from_int(c as i64) * b)
            })
            .collect()
    }

    /// Whether `x` lies in the `F_p`-span of `span`.
    pub fn in_span(span: &[Fq], x: Fq) -> bool {
        let p = x.field().characteristic();
        let mut rows: Vec<Vec<u32>> = span.iter().map(|&s| to_vec(s)).collect();
        let r0 = rank(&rows, p);
        rows.push(to_vec(x));
        rank(&rows, p) == r0
    }
}

#[cfg(test)]
mod tests {
    use super::matrix::*;
    use super::*;

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        let f = FiniteField::get(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let a = f.generator();
        assert_eq!(a * a, f.from_int(-1));
        assert_eq!(a.to_string(), "a");
        assert_eq!((a + f.one()).to_string(), "a+1");
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, m) in [(2, 3), (3, 2), (5, 1), (3, 4)] {
            let f = FiniteField::get(p, m).unwrap();
            for x in f.elements().filter(|x| !x.is_zero()) {
                assert!((x * x.inv()).is_one());
                assert_eq!(x.pow((f.order() - 1) as u64), f.one());
            }
        }
    }

    #[test]
    fn frobenius_is_automorphism() {
        let f = FiniteField::get(3, 4).unwrap();
        for x in f.elements().step_by(7) {
            for y in f.elements().step_by(11) {
                assert_eq!((x + y).frobenius(1), x.frobenius(1) + y.frobenius(1));
                assert_eq!((x * y).frobenius(1), x.frobenius(1) * y.frobenius(1));
            }
            assert_eq!(x.frobenius(4), x);
        }
    }

    #[test]
    fn roots_of_unity() {
        let f = FiniteField::get(3, 1).unwrap();
        assert_eq!(f.root_of_unity(2).unwrap(), f.from_int(-1));
        assert!(f.root_of_unity(4).is_err());
        let f9 = FiniteField::get(3, 2).unwrap();
        let z = f9.root_of_unity(4).unwrap();
        assert_eq!(z.pow(2), f9.from_int(-1));
    }

    #[test]
    fn prime_field_kernel_of_frobenius_minus_identity() {
        let f = FiniteField::get(3, 2).unwrap();
        let fixed = prime::kernel_of(f, |c| c.frobenius(1) - c);
        assert_eq!(fixed.len(), 1);
        assert!(fixed[0].frobenius(1) == fixed[0]);
        let f81 = FiniteField::get(3, 4).unwrap();
        let fixed = prime::kernel_of(f81, |c| c.frobenius(2) - c);
        assert_eq!(fixed.len(), 2);
        let brute = f81.elements().filter(|c| c.frobenius(2) == *c).count();
        assert_eq!(brute, 9);
        assert!(prime::in_span(&fixed, fixed[0] + fixed[1]));
    }

    #[test]
    fn matrix_inverse_and_det() {
        let f = FiniteField::get(3, 2).unwrap();
        let a = f.generator();
        let m = vec![vec![f.one(), f.one()], vec![a, -a]];
        assert_eq!(det(&m), -(a + a));
        let inv = inverse(&m).unwrap();
        assert_eq!(mul(&m, &inv, f.zero()), identity(f.one(), 2));
        let sing = vec![vec![f.one(), a], vec![a, a * a]];
        assert!(inverse(&sing).is_none());
        assert_eq!(rank(&sing), 1);
        assert!(det(&sing).is_zero());
    }
}
