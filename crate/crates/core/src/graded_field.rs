//! Graded fields `F[D]` with a trivialized section `u_ρ u_σ = u_{ρσ}`, and tame
//! Galois actions on them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::finite_field::{prime, FiniteField, Fq};
use crate::value_group::{Gamma, Rational};

/// A finitely generated subgroup of Γ with independent generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeGroup {
    gens: Vec<Gamma>,
}

impl DegreeGroup {
    pub fn new(gens: Vec<Gamma>) -> Result<Self> {
        let d = DegreeGroup { gens };
        let primes = d.primes(None);
        let mut rows = d.exponent_rows(&primes);
        if rational_rank(&mut rows) != d.gens.len() {
            return Err(Error::InvalidField(
                "degree generators are not multiplicatively independent".into(),
            ));
        }
        Ok(d)
    }

    pub fn trivial() -> Self {
        DegreeGroup { gens: Vec::new() }
    }

    pub fn generators(&self) -> &[Gamma] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    fn primes(&self, extra: Option<&Gamma>) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .gens
            .iter()
            .chain(extra)
            .flat_map(|g| g.exponents().iter().map(|(p, _)| *p))
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// One row per generator: exponents over `primes`.
    fn exponent_rows(&self, primes: &[u64]) -> Vec<Vec<Rational>> {
        self.gens
            .iter()
            .map(|g| primes.iter().map(|&p| g.exponent(p)).collect())
            .collect()
    }

    /// Integer coordinates of `g` over the generators, if `g ∈ D`.
    pub fn coords(&self, g: &Gamma) -> Option<Vec<i64>> {
        if g.is_one() {
            return Some(vec![0; self.rank()]);
        }
        let primes = self.primes(Some(g));
        let n = self.rank();
        // augmented system: columns = generators, rows = primes
        let mut sys: Vec<Vec<Rational>> = primes
            .iter()
            .map(|&p| {
                let mut row: Vec<Rational> = self.gens.iter().map(|x| x.exponent(p)).collect();
                row.push(g.exponent(p));
                row
            })
            .collect();
        let pivots = rref(&mut sys, n);
        if sys.iter().any(|row| row[..n].iter().all(Zero::is_zero) && !row[n].is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = sys[r][n];
        }
        x.iter()
            .map(|q| q.is_integer().then(|| q.to_integer()))
            .collect()
    }

    pub fn contains(&self, g: &Gamma) -> bool {
        self.coords(g).is_some()
    }

    pub fn element(&self, coords: &[i64]) -> Gamma {
        self.gens
            .iter()
            .zip(coords)
            .fold(Gamma::one(), |acc, (g, &k)| acc.mul(&g.powi(k)))
    }
}

/// Reduced row echelon form over ℚ on the first `ncols` columns; returns pivot columns.
fn rref(m: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(piv, rank);
        let inv = Rational::one() / m[rank][c];
        for x in m[rank].iter_mut() {
            *x *= inv;
        }
        let prow = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

fn rational_rank(rows: &mut [Vec<Rational>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    rref(rows, ncols).len()
}

/// Basis of the lattice spanned by `vectors` (integer row reduction).
pub fn lattice_basis(mut vectors: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut basis = Vec::new();
    for c in 0..n {
        loop {
            let nonzero: Vec<usize> = (0..vectors.len()).filter(|&i| vectors[i][c] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&i| vectors[i][c].abs()).unwrap();
            let pv = vectors[piv].clone();
            for &i in &nonzero {
                if i != piv {
                    let q = vectors[i][c].div_euclid(pv[c]);
                    for (x, y) in vectors[i].iter_mut().zip(&pv) {
                        *x -= q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..vectors.len()).find(|&i| vectors[i][c] != 0) {
            let mut v = vectors.swap_remove(i);
            if v[c] < 0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(v);
        }
    }
    basis
}

/// An element `Σ c_ρ u_ρ` of a graded field `F[D]`.
#[derive(Clone)]
pub struct GradedElem {
    field: &'static FiniteField,
    terms: BTreeMap<Gamma, Fq>,
}

impl PartialEq for GradedElem {
    fn eq(&self, other: &GradedElem) -> bool {
        std::ptr::eq(self.field, other.field) && self.terms == other.terms
    }
}

impl Eq for GradedElem {}

impl GradedElem {
    pub fn zero(field: &'static FiniteField) -> Self {
        GradedElem {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: &'static FiniteField) -> Self {
        Self::homogeneous(field.one(), Gamma::one())
    }

    /// `c·u_ρ`.
    pub fn homogeneous(c: Fq, degree: Gamma) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(degree, c);
        }
        GradedElem {
            field: c.field(),
            terms,
        }
    }

    pub fn field(&self) -> &'static FiniteField {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Gamma, Fq> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The degree, if the element is nonzero and homogeneous.
    pub fn degree(&self) -> Option<&Gamma> {
        match self.terms.len() {
            1 => self.terms.keys().next(),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.len() <= 1
    }

    pub fn coeff(&self, degree: &Gamma) -> Fq {
        self.terms.get(degree).copied().unwrap_or(self.field.zero())
    }

    /// Homogeneous component of the given degree.
    pub fn component(&self, degree: &Gamma) -> GradedElem {
        GradedElem::homogeneous(self.coeff(degree), degree.clone())
    }

    fn insert_add(&mut self, degree: Gamma, c: Fq) {
        let e = self.terms.entry(degree).or_insert(self.field.zero());
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &GradedElem) -> GradedElem {
        let mut out = self.clone();
        for (d, &c) in &other.terms {
            out.insert_add(d.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &GradedElem) -> GradedElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedElem {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, k: Fq) -> GradedElem {
        self.map_coeffs(|c| c * k)
    }

    pub fn map_coeffs(&self, f: impl Fn(Fq) -> Fq) -> GradedElem {
        GradedElem {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(d, &c)| (d.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &GradedElem) -> GradedElem {
        let mut out = GradedElem::zero(self.field);
        for (d1, &c1) in &self.terms {
            for (d2, &c2) in &other.terms {
                out.insert_add(d1.mul(d2), c1 * c2);
            }
        }
        out
    }

    /// Inverse of a nonzero homogeneous element.
    pub fn inv(&self) -> Option<GradedElem> {
        let d = self.degree()?;
        Some(GradedElem::homogeneous(self.terms[d].inv(), d.inv()))
    }
}

impl fmt::Display for GradedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(d, c)| {
                if d.is_one() {
                    format!("{c}")
                } else {
                    format!("({c})*u[{d}]")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for GradedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The graded field `F[D]`.
#[derive(Clone, Debug)]
pub struct GradedField {
    pub field: &'static FiniteField,
    pub degrees: DegreeGroup,
}

impl GradedField {
    pub fn new(field: &'static FiniteField, degrees: DegreeGroup) -> Self {
        GradedField { field, degrees }
    }

    pub fn contains(&self, x: &GradedElem) -> bool {
        std::ptr::eq(x.field, self.field) && x.terms.keys().all(|d| self.degrees.contains(d))
    }

    pub fn homogeneous(&self, c: Fq, degree: &Gamma) -> Result<GradedElem> {
        if !c.is_zero() && !self.degrees.contains(degree) {
            return Err(Error::DegreeMismatch {
                degree: degree.to_string(),
            });
        }
        Ok(GradedElem::homogeneous(c, degree.clone()))
    }
}

/// A finite group acting on `F[D]` by `σ(c·u_ρ) = σ_F(c)·χ_σ(ρ)·u_ρ`.
#[derive(Clone, Debug)]
pub struct GaloisData {
    graded: GradedField,
    table: Vec<Vec<usize>>,
    frobenius: Vec<u32>,
    characters: Vec<Vec<Fq>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl GaloisData {
    /// `frobenius[σ] = k` means `σ_F(x) = x^{p^k}`; `characters[σ][j] = χ_σ(d_j)` on the
    /// generators `d_j` of the degree group.
    pub fn new(
        graded: GradedField,
        table: Vec<Vec<usize>>,
        frobenius: Vec<u32>,
        characters: Vec<Vec<Fq>>,
    ) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::InvalidAction(m.to_string()));
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("multiplication table is not square over the group");
        }
        if frobenius.len() != n || characters.len() != n {
            return bad("one Frobenius power and one character per group element are required");
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        else {
            return bad("no identity element");
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("multiplication is not associative");
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity) {
                Some(b) => inverses.push(b),
                None => return bad("an element has no inverse"),
            }
        }
        let field = graded.field;
        if n as u32 % field.characteristic() == 0 {
            return bad("group order divisible by the characteristic (wild action)");
        }
        let rank = graded.degrees.rank();
        if characters.iter().any(|c| c.len() != rank || c.iter().any(|x| x.is_zero())) {
            return bad("characters must give a nonzero value on every degree generator");
        }
        let m = field.degree();
        let g = GaloisData {
            graded,
            table,
            frobenius: frobenius.iter().map(|k| k % m).collect(),
            characters,
            identity,
            inverses,
        };
        for a in 0..n {
            for b in 0..n {
                let ab = g.table[a][b];
                if g.frobenius[ab] != (g.frobenius[a] + g.frobenius[b]) % m {
                    return bad("field automorphisms do not compose along the table");
                }
                for j in 0..rank {
                    let lhs = g.characters[ab][j];
                    let rhs = g.characters[a][j] * g.field_act(a, g.characters[b][j]);
                    if lhs != rhs {
                        return Err(Error::InvalidAction(format!(
                            "crossed condition fails for ({a}, {b}) on generator {j}"
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    /// The trivial group acting on `graded`.
    pub fn trivial(graded: GradedField) -> Self {
        let rank = graded.degrees.rank();
        let one = graded.field.one();
        GaloisData::new(graded, vec![vec![0]], vec![0], vec![vec![one; rank]])
            .expect("trivial action is valid")
    }

    pub fn graded(&self) -> &GradedField {
        &self.graded
    }

    pub fn field(&self) -> &'static FiniteField {
        self.graded.field
    }

    pub fn degrees(&self) -> &DegreeGroup {
        &self.graded.degrees
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn frobenius_power(&self, a: usize) -> u32 {
        self.frobenius[a]
    }

    pub fn character_values(&self, a: usize) -> &[Fq] {
        &self.characters[a]
    }

    /// `σ_F(c)`.
    pub fn field_act(&self, a: usize, c: Fq) -> Fq {
        c.frobenius(self.frobenius[a])
    }

    /// `χ_σ(ρ)`, or `None` if `ρ ∉ D`.
    pub fn character(&self, a: usize, rho: &Gamma) -> Option<Fq> {
        let coords = self.degrees().coords(rho)?;
        Some(
            coords
                .iter()
                .zip(&self.characters[a])
                .fold(self.field().one(), |acc, (&k, &z)| acc * z.powi(k)),
        )
    }

    /// Action on a coefficient of degree `ρ`: `c ↦ σ_F(c)·χ_σ(ρ)`.
    pub fn act_coeff(&self, a: usize, c: Fq, rho: &Gamma) -> Fq {
        if c.is_zero() {
            return c;
        }
        let chi = self
            .character(a, rho)
            .unwrap_or_else(|| panic!("degree {rho} outside the degree group"));
        self.field_act(a, c) * chi
    }

    pub fn act(&self, a: usize, x: &GradedElem) -> GradedElem {
        GradedElem {
            field: x.field,
            terms: x
                .terms
                .iter()
                .map(|(d, &c)| (d.clone(), self.act_coeff(a, c, d)))
                .collect(),
        }
    }

    /// `F_p`-basis of the invariant coefficients `{c : σ_F(c)χ_σ(ρ) = c ∀σ}` in degree `ρ`.
    pub fn invariant_coefficients(&self, rho: &Gamma) -> Vec<Fq> {
        let field = self.field();
        if !self.degrees().contains(rho) {
            return Vec::new();
        }
        let mut rows: Vec<Vec<u32>> = Vec::new();
        let basis = prime::monomial_basis(field);
        // stack the maps c ↦ σ(c) - c for all σ side by side
        for &b in &basis {
            let mut row = Vec::new();
            for a in self.elements() {
                row.extend(prime::to_vec(self.act_coeff(a, b, rho) - b));
            }
            rows.push(row);
        }
        let p = field.characteristic();
        prime::left_kernel(&rows, p)
            .into_iter()
            .map(|k| {
                k.iter()
                    .zip(&basis)
                    .fold(field.zero(), |acc, (&c, &b)| acc + field.from_int(c as i64) * b)
            })
            .collect()
    }

    /// The graded subfield of invariants.
    pub fn fixed_subfield(&self) -> FixedSubfield {
        let base = self.invariant_coefficients(&Gamma::one());
        let rank = self.degrees().rank();
        let n = self.order() as i64;
        let mut vectors: Vec<Vec<i64>> = (0..rank)
            .map(|j| (0..rank).map(|i| if i == j { n } else { 0 }).collect())
            .collect();
        for v in box_coords(rank, n) {
            let rho = self.degrees().element(&v);
            if !self.invariant_coefficients(&rho).is_empty() {
                vectors.push(v);
            }
        }
        let lattice = lattice_basis(vectors);
        let gens: Vec<Gamma> = lattice.iter().map(|v| self.degrees().element(v)).collect();
        let witnesses = gens
            .iter()
            .map(|g| self.invariant_coefficients(g)[0])
            .collect();
        FixedSubfield {
            base,
            degrees: DegreeGroup::new(gens).expect("sublattice of full rank"),
            witnesses,
        }
    }
}

/// All vectors in `[0, n)^rank`, lexicographically.
fn box_coords(rank: usize, n: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// The invariant subfield `k̃ = F₀[D_k]` of a graded field under a Galois action.
#[derive(Clone, Debug)]
pub struct FixedSubfield {
    /// `F_p`-basis of the invariant degree-1 coefficients `F₀`.
    pub base: Vec<Fq>,
    /// The degree group `D_k` of nonzero invariant components.
    pub degrees: DegreeGroup,
    /// For each generator of `D_k`, a nonzero invariant coefficient in that degree.
    pub witnesses: Vec<Fq>,
}

impl FixedSubfield {
    /// `[F : F₀]`.
    pub fn residue_degree(&self, field: &'static FiniteField) -> usize {
        field.degree() as usize / self.base.len()
    }

    /// A nonzero invariant coefficient in degree `δ ∈ D_k`.
    pub fn witness(&self, delta: &Gamma) -> Option<Fq> {
        let coords = self.degrees.coords(delta)?;
        let mut w = self.base[0].field().one();
        for (&k, &x) in coords.iter().zip(&self.witnesses) {
            w *= x.powi(k);
        }
        Some(w)
    }

    pub fn contains_coeff(&self, c: Fq) -> bool {
        prime::in_span(&self.base, c)
    }
}

/// A homogeneous basis of `L̃` over `k̃`, with unique decomposition of elements.
#[derive(Clone, Debug)]
pub struct HomogeneousBasis {
    pub elements: Vec<GradedElem>,
    reps: Vec<Gamma>,
    coeff_basis: Vec<Fq>,
}

impl HomogeneousBasis {
    /// Products of the greedy `F₀`-basis of `F` (packed order) with the smallest coset
    /// representatives of `D / D_k`.
    pub fn new(g: &GaloisData, k: &FixedSubfield) -> Result<Self> {
        let field = g.field();
        let mut coeff_basis: Vec<Fq> = Vec::new();
        let mut span: Vec<Fq> = Vec::new();
        for c in field.elements().skip(1) {
            if !prime::in_span(&span, c) {
                coeff_basis.push(c);
                span.extend(k.base.iter().map(|&b| b * c));
            }
            if span.len() == field.degree() as usize {
                break;
            }
        }
        let d = g.degrees();
        let mut rep_coords: Vec<Vec<i64>> = Vec::new();
        for v in box_coords(d.rank(), g.order() as i64) {
            let fresh = rep_coords.iter().all(|r| {
                let diff: Vec<i64> = v.iter().zip(r).map(|(a, b)| a - b).collect();
                !k.degrees.contains(&d.element(&diff))
            });
            if fresh {
                rep_coords.push(v);
            }
        }
        let reps: Vec<Gamma> = rep_coords.iter().map(|v| d.element(v)).collect();
        if reps.len() * coeff_basis.len() != g.order() {
            return Err(Error::InvalidAction(format!(
                "[L:k] = {} but |G| = {}",
                reps.len() * coeff_basis.len(),
                g.order()
            )));
        }
        let elements = reps
            .iter()
            .flat_map(|r| {
                coeff_basis
                    .iter()
                    .map(move |&c| GradedElem::homogeneous(c, r.clone()))
            })
            .collect();
        Ok(HomogeneousBasis {
            elements,
            reps,
            coeff_basis,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// The `F₀`-basis of `F` used for the degree-1 elements, starting with 1.
    pub fn coeff_basis(&self) -> &[Fq] {
        &self.coeff_basis
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Coefficients `a_b ∈ k̃` with `x = Σ a_b λ_b`.
    pub fn decompose(&self, g: &GaloisData, k: &FixedSubfield, x: &GradedElem) -> Result<Vec<GradedElem>> {
        let field = g.field();
        let p = field.characteristic();
        let mut out = vec![GradedElem::zero(field); self.len()];
        let nb = self.coeff_basis.len();
        for (rho, &c) in x.terms() {
            let (ri, delta) = self
                .reps
                .iter()
                .enumerate()
                .find_map(|(i, r)| {
                    let delta = rho.div(r);
                    k.degrees.contains(&delta).then_some((i, delta))
                })
                .ok_or_else(|| Error::DegreeMismatch {
                    degree: rho.to_string(),
                })?;
            let w = k.witness(&delta).expect("delta in D_k");
            let target = prime::to_vec(c / w);
            let rows: Vec<Vec<u32>> = self
                .coeff_basis
                .iter()
                .flat_map(|&f| k.base.iter().map(move |&b| prime::to_vec(f * b)))
                .collect();
            let sol = prime::solve(&rows, &target, p).ok_or(Error::Singular)?;
            for (i, chunk) in sol.chunks(k.base.len()).enumerate() {
                let a0 = chunk
                    .iter()
                    .zip(&k.base)
                    .fold(field.zero(), |acc, (&s, &b)| acc + field.from_int(s as i64) * b);
                let term = GradedElem::homogeneous(a0 * w, delta.clone());
                out[ri * nb + i] = out[ri * nb + i].add(&term);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f9_frobenius() -> GaloisData {
        let f = FiniteField::get(3, 2).unwrap();
        let d = DegreeGroup::new(vec![Gamma::from_ratio(1, 3)]).unwrap();
        GaloisData::new(
            GradedField::new(f, d),
            vec![vec![0, 1], vec![1, 0]],
            vec![0, 1],
            vec![vec![f.one()], vec![f.one()]],
        )
        .unwrap()
    }

    fn ramified() -> GaloisData {
        let f = FiniteField::get(3, 1).unwrap();
        let d = DegreeGroup::new(vec!["3^(-1/2)".parse().unwrap()]).unwrap();
        GaloisData::new(
            GradedField::new(f, d),
            vec![vec![0, 1], vec![1, 0]],
            vec![0, 0],
            vec![vec![f.one()], vec![f.from_int(-1)]],
        )
        .unwrap()
    }

    #[test]
    fn degree_group_membership() {
        let d = DegreeGroup::new(vec!["2^(1/2)".parse().unwrap(), "3".parse().unwrap()]).unwrap();
        assert_eq!(d.coords(&"2^(3/2)*3^(-2)".parse().unwrap()), Some(vec![3, -2]));
        assert_eq!(d.coords(&"2^(1/3)".parse().unwrap()), None);
        assert_eq!(d.coords(&"5".parse().unwrap()), None);
        assert!(DegreeGroup::new(vec!["2".parse().unwrap(), "4".parse().unwrap()]).is_err());
    }

    #[test]
    fn frobenius_negates_i() {
        let g = f9_frobenius();
        let f = g.field();
        let i = GradedElem::homogeneous(f.generator(), Gamma::one());
        assert_eq!(i.mul(&i), GradedElem::one(f).neg());
        assert_eq!(g.act(1, &i), i.neg());
        assert_eq!(g.act(0, &i), i);
    }

    #[test]
    fn character_on_ramified_uniformizer() {
        let g = ramified();
        let u = GradedElem::homogeneous(g.field().one(), "3^(-1/2)".parse().unwrap());
        assert_eq!(g.act(1, &u), u.neg());
    }

    #[test]
    fn fixed_subfields() {
        let g = f9_frobenius();
        let k = g.fixed_subfield();
        assert_eq!(k.base.len(), 1);
        assert_eq!(k.degrees.generators(), &[Gamma::from_ratio(1, 3)]);
        let brute = g.field().elements().filter(|&c| g.field_act(1, c) == c).count();
        assert_eq!(brute, 3);

        let g = ramified();
        let k = g.fixed_subfield();
        assert_eq!(k.degrees.generators(), &[Gamma::from_ratio(1, 3)]);
        for n in -3..4 {
            let rho: Gamma = Gamma::prime_power(3, Rational::new(-n, 2));
            let brute = g.field().elements().filter(|&c| g.act_coeff(1, c, &rho) == c).count();
            assert_eq!(brute > 1, n % 2 == 0);
        }

        let t = GaloisData::trivial(g.graded().clone());
        let k = t.fixed_subfield();
        assert_eq!(k.degrees, *t.degrees());
    }

    #[test]
    fn homogeneous_bases() {
        let g = f9_frobenius();
        let k = g.fixed_subfield();
        let b = HomogeneousBasis::new(&g, &k).unwrap();
        let f = g.field();
        assert_eq!(
            b.elements,
            vec![GradedElem::one(f), GradedElem::homogeneous(f.generator(), Gamma::one())]
        );

        let g = ramified();
        let k = g.fixed_subfield();
        let b = HomogeneousBasis::new(&g, &k).unwrap();
        let f = g.field();
        assert_eq!(
            b.elements,
            vec![
                GradedElem::one(f),
                GradedElem::homogeneous(f.one(), "3^(-1/2)".parse().unwrap())
            ]
        );

        let t = GaloisData::trivial(g.graded().clone());
        let b = HomogeneousBasis::new(&t, &t.fixed_subfield()).unwrap();
        assert_eq!(b.elements, vec![GradedElem::one(f)]);
    }

    fn random_elem(g: &GaloisData, rng: &mut ChaCha8Rng) -> GradedElem {
        let f = g.field();
        let mut x = GradedElem::zero(f);
        for _ in 0..rng.gen_range(1..4) {
            let coords: Vec<i64> = (0..g.degrees().rank()).map(|_| rng.gen_range(-3..4)).collect();
            let c = f.from_packed(rng.gen_range(0..f.order()));
            x = x.add(&GradedElem::homogeneous(c, g.degrees().element(&coords)));
        }
        x
    }

    #[test]
    fn decomposition_reassembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [f9_frobenius(), ramified()] {
            let k = g.fixed_subfield();
            let b = HomogeneousBasis::new(&g, &k).unwrap();
            for _ in 0..200 {
                let x = random_elem(&g, &mut rng);
                let coeffs = b.decompose(&g, &k, &x).unwrap();
                let mut y = GradedElem::zero(g.field());
                for (a, l) in coeffs.iter().zip(&b.elements) {
                    for s in g.elements() {
                        assert_eq!(g.act(s, a), *a);
                    }
                    y = y.add(&a.mul(l));
                }
                assert_eq!(x, y);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn graded_field_axioms_random(seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for g in [f9_frobenius(), ramified()] {
                let f = g.field();
                for _ in 0..10 {
                    let c = f.from_packed(rng.gen_range(1..f.order()));
                    let d = g.degrees().element(&[rng.gen_range(-5..6)]);
                    let x = GradedElem::homogeneous(c, d);
                    proptest::prop_assert_eq!(x.mul(&x.inv().unwrap()), GradedElem::one(f));
                }
                let x = random_elem(&g, &mut rng);
                let y = random_elem(&g, &mut rng);
                for s in g.elements() {
                    proptest::prop_assert_eq!(g.act(s, &x.mul(&y)), g.act(s, &x).mul(&g.act(s, &y)));
                    proptest::prop_assert_eq!(g.act(s, &x).terms().len(), x.terms().len());
                    proptest::prop_assert_eq!(&g.act(g.inverse(s), &g.act(s, &x)), &x);
                    for t in g.elements() {
                        proptest::prop_assert_eq!(g.act(g.mul(s, t), &x), g.act(s, &g.act(t, &x)));
                    }
                }
            }
        }
    }

    #[test]
    fn crossed_condition_is_enforced() {
        let f = FiniteField::get(3, 2).unwrap();
        let d = DegreeGroup::new(vec![Gamma::from_ratio(1, 3)]).unwrap();
        let bad = GaloisData::new(
            GradedField::new(f, d),
            vec![vec![0, 1], vec![1, 0]],
            vec![0, 0],
            vec![vec![f.one()], vec![f.generator()]],
        );
        assert!(matches!(bad, Err(Error::InvalidAction(_))));
    }
}
