//! Homogeneous vectors and matrices over `F[D]`, and the graded Hilbert 90 solvers.
//!
//! A matrix in `M(L, s, r)` is stored as its `F`-coefficient matrix `C` together with
//! the row profile `s` and column profile `r`: entry `(i, j)` is `c_ij·u_{s_i/r_j}`.
//! Because the section is multiplicative, products, determinants and inverses reduce
//! to the same operations on coefficient matrices.
//!
//! Multiplicative cocycles follow the law `α(gh) = (g·α(h))·α(g)`, which is the law
//! satisfied by `(σ·P)P⁻¹` and by the residual matrices of a left action on
//! coordinates. Twisting is `σ * u = α(σ)⁻¹(σ·u)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::finite_field::{matrix, Fq};
use crate::graded_field::{DegreeGroup, GaloisData, GradedElem, GradedField, HomogeneousBasis};
use crate::value_group::Gamma;

pub type DegreeProfile = Vec<Gamma>;

/// A matrix in `M(L, s, r)`.
#[derive(Clone, PartialEq, Eq)]
pub struct HomMatrix {
    rows: DegreeProfile,
    cols: DegreeProfile,
    coeffs: matrix::FMatrix,
}

impl HomMatrix {
    /// Builds `(c_ij·u_{s_i/r_j})`, rejecting nonzero coefficients in unrealizable degrees.
    pub fn new(
        graded: &GradedField,
        s: DegreeProfile,
        r: DegreeProfile,
        coeffs: matrix::FMatrix,
    ) -> Result<Self> {
        if coeffs.len() != s.len() || coeffs.iter().any(|row| row.len() != r.len()) {
            return Err(Error::ProfileMismatch(format!(
                "coefficient matrix does not have shape {}x{}",
                s.len(),
                r.len()
            )));
        }
        for (i, si) in s.iter().enumerate() {
            for (j, rj) in r.iter().enumerate() {
                let deg = si.div(rj);
                if !coeffs[i][j].is_zero() && !graded.degrees.contains(&deg) {
                    return Err(Error::DegreeMismatch {
                        degree: deg.to_string(),
                    });
                }
            }
        }
        Ok(HomMatrix {
            rows: s,
            cols: r,
            coeffs,
        })
    }

    /// Builds a matrix from homogeneous entries of degree `s_i/r_j` (or zero).
    pub fn from_entries(
        graded: &GradedField,
        s: DegreeProfile,
        r: DegreeProfile,
        entries: &[Vec<GradedElem>],
    ) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(s.len());
        for (i, si) in s.iter().enumerate() {
            let mut row = Vec::with_capacity(r.len());
            for (j, rj) in r.iter().enumerate() {
                let e = entries
                    .get(i)
                    .and_then(|row| row.get(j))
                    .ok_or_else(|| Error::ProfileMismatch("entry list too short".into()))?;
                let deg = si.div(rj);
                if e.is_zero() {
                    row.push(graded.field.zero());
                } else if e.degree() == Some(&deg) {
                    row.push(e.coeff(&deg));
                } else {
                    return Err(Error::DegreeMismatch {
                        degree: format!("{e} at ({i},{j}), expected degree {deg}"),
                    });
                }
            }
            coeffs.push(row);
        }
        HomMatrix::new(graded, s, r, coeffs)
    }

    pub fn identity(graded: &GradedField, r: DegreeProfile) -> Self {
        let n = r.len();
        HomMatrix {
            rows: r.clone(),
            cols: r,
            coeffs: matrix::identity(graded.field.one(), n),
        }
    }

    pub fn rows(&self) -> &[Gamma] {
        &self.rows
    }

    pub fn cols(&self) -> &[Gamma] {
        &self.cols
    }

    pub fn coeffs(&self) -> &matrix::FMatrix {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> Fq {
        self.coeffs[i][j]
    }

    pub fn entry_degree(&self, i: usize, j: usize) -> Gamma {
        self.rows[i].div(&self.cols[j])
    }

    pub fn entry(&self, i: usize, j: usize) -> GradedElem {
        GradedElem::homogeneous(self.coeffs[i][j], self.entry_degree(i, j))
    }

    pub fn size(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn mul(&self, other: &HomMatrix) -> Result<HomMatrix> {
        if self.cols != other.rows {
            return Err(Error::ProfileMismatch(format!(
                "column profile [{}] against row profile [{}]",
                crate::value_group::format_point(&self.cols),
                crate::value_group::format_point(&other.rows)
            )));
        }
        let zero = self.zero_coeff();
        Ok(HomMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            coeffs: matrix::mul(&self.coeffs, &other.coeffs, zero),
        })
    }

    fn zero_coeff(&self) -> Fq {
        let c = self.coeffs.iter().flatten().next().expect("nonempty matrix");
        *c - *c
    }

    pub fn apply(&self, v: &HomVector) -> Result<HomVector> {
        if self.cols != v.profile {
            return Err(Error::ProfileMismatch("vector profile differs from column profile".into()));
        }
        let zero = self.zero_coeff();
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| row.iter().zip(&v.coeffs).fold(zero, |acc, (&a, &b)| acc + a * b))
            .collect();
        Ok(HomVector {
            profile: self.rows.clone(),
            degree: v.degree.clone(),
            coeffs,
        })
    }

    /// Determinant, homogeneous of degree `Π s_i/r_i`.
    pub fn det(&self) -> Result<GradedElem> {
        if self.rows.len() != self.cols.len() {
            return Err(Error::ProfileMismatch("determinant of a non-square matrix".into()));
        }
        let deg = self
            .rows
            .iter()
            .zip(&self.cols)
            .fold(Gamma::one(), |acc, (s, r)| acc.mul(&s.div(r)));
        Ok(GradedElem::homogeneous(matrix::det(&self.coeffs), deg))
    }

    pub fn is_gl(&self) -> bool {
        self.det().map_or(false, |d| !d.is_zero())
    }

    /// Inverse in `M(L, r, s)`.
    pub fn inv(&self) -> Result<HomMatrix> {
        if self.rows.len() != self.cols.len() {
            return Err(Error::ProfileMismatch("inverse of a non-square matrix".into()));
        }
        let coeffs = matrix::inverse(&self.coeffs).ok_or(Error::Singular)?;
        Ok(HomMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            coeffs,
        })
    }

    /// `σ·A`, acting entrywise.
    pub fn act(&self, g: &GaloisData, sigma: usize) -> HomMatrix {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &c)| g.act_coeff(sigma, c, &self.entry_degree(i, j)))
                    .collect()
            })
            .collect();
        HomMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            coeffs,
        }
    }

    /// Checks that every nonzero entry has a degree in `D`.
    pub fn audit(&self, degrees: &DegreeGroup) -> bool {
        (0..self.rows.len()).all(|i| {
            (0..self.cols.len())
                .all(|j| self.coeffs[i][j].is_zero() || degrees.contains(&self.entry_degree(i, j)))
        })
    }
}

impl fmt::Display for HomMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows.len())
            .map(|i| {
                let entries: Vec<String> =
                    (0..self.cols.len()).map(|j| self.entry(i, j).to_string()).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for HomMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HomMatrix(s=({}), r=({}), {self})",
            crate::value_group::format_point(&self.rows),
            crate::value_group::format_point(&self.cols)
        )
    }
}

/// Positions `(i, j)` where `M(L, s, r)` admits a nonzero entry.
pub fn admissible_positions(s: &[Gamma], r: &[Gamma], degrees: &DegreeGroup) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, si) in s.iter().enumerate() {
        for (j, rj) in r.iter().enumerate() {
            if degrees.contains(&si.div(rj)) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Whether `GL(L, s, r)` is nonempty: some permutation is supported on admissible positions.
pub fn gl_nonempty(s: &[Gamma], r: &[Gamma], degrees: &DegreeGroup) -> bool {
    s.len() == r.len()
        && perfect_matching(s.len(), |i, j| degrees.contains(&s[i].div(&r[j]))).is_some()
}

/// A perfect matching `i ↦ π(i)` of the bipartite graph on `n + n` vertices, if any.
pub fn perfect_matching(n: usize, allowed: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| allowed(i, j)).collect()).collect();
    let mut match_right: Vec<Option<usize>> = vec![None; n];

    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if match_right[j].map_or(true, |k| augment(k, adj, seen, match_right)) {
                match_right[j] = Some(i);
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut pi = vec![0; n];
    for (j, m) in match_right.iter().enumerate() {
        pi[m.expect("perfect")] = j;
    }
    Some(pi)
}

/// A vector of `L_r` of degree `R`: entry `i` is `c_i·u_{R r_i}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomVector {
    pub profile: DegreeProfile,
    pub degree: Gamma,
    pub coeffs: Vec<Fq>,
}

impl HomVector {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Fq::is_zero)
    }

    pub fn entry_degree(&self, i: usize) -> Gamma {
        self.degree.mul(&self.profile[i])
    }

    pub fn entry(&self, i: usize) -> GradedElem {
        GradedElem::homogeneous(self.coeffs[i], self.entry_degree(i))
    }

    pub fn act(&self, g: &GaloisData, sigma: usize) -> HomVector {
        HomVector {
            profile: self.profile.clone(),
            degree: self.degree.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| g.act_coeff(sigma, c, &self.entry_degree(i)))
                .collect(),
        }
    }

    pub fn add(&self, other: &HomVector) -> Result<HomVector> {
        if self.profile != other.profile || self.degree != other.degree {
            return Err(Error::ProfileMismatch("adding vectors of different degrees".into()));
        }
        Ok(HomVector {
            profile: self.profile.clone(),
            degree: self.degree.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn scale(&self, k: Fq) -> HomVector {
        HomVector {
            profile: self.profile.clone(),
            degree: self.degree.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }
}

/// Checks `α(gh) = (g·α(h))·α(g)` over all pairs, with every `α(g)` in `GL(L, r)`.
pub fn check_mult_cocycle(g: &GaloisData, r: &[Gamma], alpha: &[HomMatrix]) -> Result<()> {
    if alpha.len() != g.order() {
        return Err(Error::NotASemilinearAction(format!(
            "{} matrices for a group of order {}",
            alpha.len(),
            g.order()
        )));
    }
    for (a, m) in alpha.iter().enumerate() {
        if m.rows() != r || m.cols() != r {
            return Err(Error::NotASemilinearAction(format!("α({a}) is not in M(L, r)")));
        }
        if !m.audit(g.degrees()) {
            return Err(Error::NotASemilinearAction(format!("α({a}) has unrealizable entries")));
        }
        if !m.is_gl() {
            return Err(Error::NotASemilinearAction(format!("α({a}) is singular")));
        }
    }
    for a in g.elements() {
        for b in g.elements() {
            let lhs = &alpha[g.mul(a, b)];
            let rhs = alpha[b].act(g, a).mul(&alpha[a])?;
            if *lhs != rhs {
                return Err(Error::NotASemilinearAction(format!(
                    "α({a}·{b}) ≠ ({a}·α({b}))α({a})"
                )));
            }
        }
    }
    Ok(())
}

/// Checks `b_{gh} = b_g + g·b_h` with every `b_g` in `L_ρ`.
pub fn check_add_cocycle(g: &GaloisData, rho: &Gamma, b: &[GradedElem]) -> Result<()> {
    if b.len() != g.order() {
        return Err(Error::NotASemilinearAction("one value per group element required".into()));
    }
    if b.iter().any(|x| !x.is_zero() && x.degree() != Some(rho)) {
        return Err(Error::NotASemilinearAction(format!("values must lie in L_{rho}")));
    }
    for x in g.elements() {
        for y in g.elements() {
            if b[g.mul(x, y)] != b[x].add(&g.act(x, &b[y])) {
                return Err(Error::NotASemilinearAction(format!(
                    "b({x}·{y}) ≠ b({x}) + {x}·b({y})"
                )));
            }
        }
    }
    Ok(())
}

/// The matrix `(σ_j·λ_i)` with rows indexed by group elements and columns by basis
/// elements, in `M(L, (1,…,1), (deg λ_i)⁻¹)`.
pub fn characters_matrix(g: &GaloisData, basis: &HomogeneousBasis) -> HomMatrix {
    let cols: DegreeProfile = basis
        .elements
        .iter()
        .map(|l| l.degree().expect("basis elements are homogeneous").inv())
        .collect();
    let coeffs = g
        .elements()
        .map(|s| {
            basis
                .elements
                .iter()
                .map(|l| {
                    let d = l.degree().unwrap();
                    g.act(s, l).coeff(d)
                })
                .collect()
        })
        .collect();
    HomMatrix {
        rows: vec![Gamma::one(); g.order()],
        cols,
        coeffs,
    }
}

pub fn characters_matrix_invertible(g: &GaloisData, basis: &HomogeneousBasis) -> bool {
    basis.len() == g.order() && characters_matrix(g, basis).is_gl()
}

/// A `k̃`-basis `v_1, …, v_n` of the invariants of `L_r` under `σ * u = α(σ)⁻¹(σ·u)`,
/// together with `s_i = (deg v_i)⁻¹`.
pub fn fixed_space_basis(
    g: &GaloisData,
    basis: &HomogeneousBasis,
    r: &[Gamma],
    alpha: &[HomMatrix],
) -> Result<(DegreeProfile, Vec<HomVector>)> {
    check_mult_cocycle(g, r, alpha)?;
    let field = g.field();
    let n = r.len();
    let inv_alpha: Vec<HomMatrix> = alpha.iter().map(HomMatrix::inv).collect::<Result<_>>()?;
    let inv_order = field.from_int(g.order() as i64).inv();
    let mut chosen: Vec<HomVector> = Vec::new();
    let mut coeff_rows: Vec<Vec<Fq>> = Vec::new();
    'outer: for lambda in &basis.elements {
        let d = lambda.degree().expect("homogeneous").clone();
        let c = lambda.coeff(&d);
        for l in 0..n {
            let mut coeffs = vec![field.zero(); n];
            coeffs[l] = c;
            let u = HomVector {
                profile: r.to_vec(),
                degree: d.div(&r[l]),
                coeffs,
            };
            let mut avg = HomVector {
                profile: r.to_vec(),
                degree: u.degree.clone(),
                coeffs: vec![field.zero(); n],
            };
            for s in g.elements() {
                avg = avg.add(&inv_alpha[s].apply(&u.act(g, s))?)?;
            }
            let avg = avg.scale(inv_order);
            if avg.is_zero() {
                continue;
            }
            let mut trial = coeff_rows.clone();
            trial.push(avg.coeffs.clone());
            if matrix::rank(&trial) > coeff_rows.len() {
                coeff_rows = trial;
                chosen.push(avg);
                if chosen.len() == n {
                    break 'outer;
                }
            }
        }
    }
    if chosen.len() != n {
        return Err(Error::Verification(format!(
            "found {} invariant vectors, expected {n}",
            chosen.len()
        )));
    }
    let s = chosen.iter().map(|v| v.degree.inv()).collect();
    Ok((s, chosen))
}

/// `P ∈ GL(L, r, s)` with `α(σ) = (σ·P)P⁻¹` for every `σ`.
pub fn hilbert90_mult(
    g: &GaloisData,
    basis: &HomogeneousBasis,
    r: &[Gamma],
    alpha: &[HomMatrix],
) -> Result<(DegreeProfile, HomMatrix)> {
    let (s, vs) = fixed_space_basis(g, basis, r, alpha)?;
    let n = r.len();
    let coeffs = (0..n).map(|i| vs.iter().map(|v| v.coeffs[i]).collect()).collect();
    let p = HomMatrix::new(g.graded(), r.to_vec(), s.clone(), coeffs)?;
    let p_inv = p.inv()?;
    for sigma in g.elements() {
        if p.act(g, sigma).mul(&p_inv)? != alpha[sigma] {
            return Err(Error::Verification(format!("α({sigma}) ≠ (σ·P)P⁻¹")));
        }
    }
    Ok((s, p))
}

/// `λ ∈ F` (degree 1) with `Σ_σ σ·λ = 1`.
pub fn trace_one_element(g: &GaloisData) -> Result<Fq> {
    let trace = |x: Fq| g.elements().fold(x - x, |acc, s| acc + g.field_act(s, x));
    let field = g.field();
    let x = field
        .elements()
        .find(|&x| !trace(x).is_zero())
        .ok_or(Error::DegenerateTrace)?;
    Ok(x / trace(x))
}

/// `μ ∈ L_ρ` with `b_g = g·μ − μ` for every `g`.
pub fn hilbert90_add(g: &GaloisData, rho: &Gamma, b: &[GradedElem]) -> Result<GradedElem> {
    check_add_cocycle(g, rho, b)?;
    let field = g.field();
    let lambda = GradedElem::homogeneous(trace_one_element(g)?, Gamma::one());
    let mut mu = GradedElem::zero(field);
    for h in g.elements() {
        mu = mu.sub(&b[h].mul(&g.act(h, &lambda)));
    }
    for x in g.elements() {
        if g.act(x, &mu).sub(&mu) != b[x] {
            return Err(Error::Verification(format!("b({x}) ≠ {x}·μ − μ")));
        }
    }
    Ok(mu)
}

/// Random generators for homogeneous matrices and cocycles.
pub mod random {
    use super::*;
    use rand::Rng;

    /// A random element of `GL(L, s, r)`; `None` if that set is empty.
    pub fn gl<R: Rng>(rng: &mut R, graded: &GradedField, s: &[Gamma], r: &[Gamma]) -> Option<HomMatrix> {
        if !gl_nonempty(s, r, &graded.degrees) {
            return None;
        }
        let field = graded.field;
        let allowed = admissible_positions(s, r, &graded.degrees);
        loop {
            let mut coeffs = vec![vec![field.zero(); r.len()]; s.len()];
            for &(i, j) in &allowed {
                coeffs[i][j] = field.from_packed(rng.gen_range(0..field.order()));
            }
            let m = HomMatrix::new(graded, s.to_vec(), r.to_vec(), coeffs).expect("admissible");
            if m.is_gl() {
                return Some(m);
            }
        }
    }

    /// A random coboundary `σ ↦ (σ·P₀)P₀⁻¹` with `P₀ ∈ GL(L, r, s₀)` for a random `s₀`.
    pub fn mult_cocycle<R: Rng>(rng: &mut R, g: &GaloisData, r: &[Gamma]) -> Vec<HomMatrix> {
        let d = g.degrees();
        let s0: Vec<Gamma> = r
            .iter()
            .map(|ri| {
                let coords: Vec<i64> = (0..d.rank()).map(|_| rng.gen_range(-3..4)).collect();
                ri.div(&d.element(&coords))
            })
            .collect();
        let mut s0 = s0;
        for i in (1..s0.len()).rev() {
            let j = rng.gen_range(0..=i);
            s0.swap(i, j);
        }
        let p0 = gl(rng, g.graded(), r, &s0).expect("permuted D-translate is admissible");
        let p0_inv = p0.inv().expect("invertible");
        g.elements()
            .map(|s| p0.act(g, s).mul(&p0_inv).expect("profiles compose"))
            .collect()
    }

    /// A random homogeneous element of degree `ρ` (possibly zero).
    pub fn homogeneous<R: Rng>(rng: &mut R, g: &GaloisData, rho: &Gamma) -> GradedElem {
        let f = g.field();
        GradedElem::homogeneous(f.from_packed(rng.gen_range(0..f.order())), rho.clone())
    }

    /// A random additive cocycle `g ↦ g·x − x` in degree `ρ`.
    pub fn add_cocycle<R: Rng>(rng: &mut R, g: &GaloisData, rho: &Gamma) -> Vec<GradedElem> {
        let x = homogeneous(rng, g, rho);
        g.elements().map(|s| g.act(s, &x).sub(&x)).collect()
    }
}
