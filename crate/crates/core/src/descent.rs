//! Galois descent for forms of closed polydiscs and of laces.
//!
//! A scenario lists the images `σ·T_i` of the coordinates under some group elements;
//! the action on a function is `σ·F = F^σ(σ·T)`. The pipelines either produce
//! invariant coordinates over `k` or name the obstruction they hit.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::finite_field::Fq;
use crate::graded_field::{GaloisData, GradedElem};
use crate::laurent::{Laurent, Tower};
use crate::linalg::{
    check_add_cocycle, check_mult_cocycle, gl_nonempty, hilbert90_add, hilbert90_mult,
    perfect_matching, HomMatrix,
};
use crate::tate::{
    coordinate_check_lace, coordinate_check_polydisc, Domain, Exponent, LaceCheck, PolydiscVerdict,
    Precision, TateSeries,
};
use crate::value_group::{format_point, Gamma, Point, ValueOrZero};
use crate::graded_field::DegreeGroup;
use crate::zshape::ZShape;

pub const DEFAULT_MAX_ITER: usize = 64;

#[derive(Clone, Debug)]
pub struct GaloisScenario {
    pub name: String,
    pub tower: Tower,
    pub domain: Domain,
    /// `(σ, [σ·T_1, …, σ·T_n])` for the listed elements.
    pub action: Vec<(usize, Vec<TateSeries>)>,
    pub eps: Gamma,
    pub max_iter: usize,
    /// A polyradius the descended polydisc is compared against.
    pub target: Option<Point>,
}

impl GaloisScenario {
    pub fn new(
        name: impl Into<String>,
        tower: Tower,
        domain: Domain,
        action: Vec<(usize, Vec<TateSeries>)>,
    ) -> Result<Self> {
        let n = domain.dim();
        for (g, images) in &action {
            if *g >= tower.order() {
                return Err(Error::InvalidAction(format!(
                    "element {g} outside a group of order {}",
                    tower.order()
                )));
            }
            if images.len() != n || images.iter().any(|f| f.n() != n) {
                return Err(Error::InvalidAction(format!(
                    "element {g} needs {n} images in {n} variables"
                )));
            }
            if images.iter().any(|f| !std::ptr::eq(f.field(), tower.field())) {
                return Err(Error::InvalidAction("images have coefficients outside L".into()));
            }
            if matches!(domain, Domain::Polydisc(_)) && images.iter().any(|f| f.has_negative_exponents()) {
                return Err(Error::InvalidAction(format!(
                    "image under {g} has negative exponents on a polydisc"
                )));
            }
        }
        let eps = tower.t_abs().powi(32);
        Ok(GaloisScenario {
            name: name.into(),
            tower,
            domain,
            action,
            eps,
            max_iter: DEFAULT_MAX_ITER,
            target: None,
        })
    }

    pub fn with_precision(mut self, eps: Gamma, max_iter: usize) -> Self {
        self.eps = eps;
        self.max_iter = max_iter;
        self
    }

    pub fn with_target(mut self, target: Point) -> Self {
        self.target = Some(target);
        self
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    pub fn precision(&self) -> Precision {
        Precision::uniform(self.domain.points(), self.eps.clone())
    }

    fn vars(&self) -> Vec<TateSeries> {
        (0..self.n()).map(|i| TateSeries::var(&self.tower, self.n(), i)).collect()
    }

    /// `F^σ(images)`, exactly when possible.
    fn apply(&self, sigma: usize, images: &[TateSeries], f: &TateSeries) -> Result<TateSeries> {
        let twisted = f.act_coeffs(&self.tower, sigma);
        match twisted.substitute(images, None) {
            Err(Error::PrecisionLoss(_)) => twisted.substitute(images, Some(&self.precision())),
            other => other,
        }
    }

    fn agree(&self, a: &[TateSeries], b: &[TateSeries]) -> Result<bool> {
        let bound = ValueOrZero::Value(self.eps.clone());
        for (x, y) in a.iter().zip(b) {
            let d = x.sub(y);
            if d.is_zero() {
                continue;
            }
            for p in self.domain.points() {
                if d.norm_bound(&p)? <= bound {
                    continue;
                }
                match d.seminorm(&p) {
                    Ok(_) => return Ok(false),
                    Err(Error::PrecisionLoss(m)) => {
                        return Err(Error::PrecisionLoss(format!("composition law not decided to epsilon: {m}")))
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(true)
    }

    /// Extends the listed elements to the whole group, checking the composition law.
    pub fn closure(&self) -> Result<GroupAction<'_>> {
        let g = self.tower.residue();
        let mut images: Vec<Option<Vec<TateSeries>>> = vec![None; g.order()];
        let id = g.identity();
        images[id] = Some(self.vars());
        let mut queue = VecDeque::from([id]);
        while let Some(rho) = queue.pop_front() {
            for (sigma, sigma_images) in &self.action {
                let known = images[rho].clone().expect("visited");
                let composed = known
                    .iter()
                    .map(|f| self.apply(*sigma, sigma_images, f))
                    .collect::<Result<Vec<_>>>()?;
                let target = g.mul(*sigma, rho);
                match &images[target] {
                    None => {
                        images[target] = Some(composed);
                        queue.push_back(target);
                    }
                    Some(existing) => {
                        if !self.agree(existing, &composed)? {
                            return Err(Error::InvalidAction(format!(
                                "composing {sigma} with {rho} disagrees with element {target}"
                            )));
                        }
                    }
                }
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                x.ok_or_else(|| {
                    Error::InvalidAction(format!("listed elements do not reach element {i}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupAction {
            scenario: self,
            images,
        })
    }
}

/// The action of every group element, derived from the listed ones.
pub struct GroupAction<'a> {
    scenario: &'a GaloisScenario,
    images: Vec<Vec<TateSeries>>,
}

impl GroupAction<'_> {
    pub fn images(&self, sigma: usize) -> &[TateSeries] {
        &self.images[sigma]
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    /// `σ·F = F^σ(σ·T)`.
    pub fn act(&self, sigma: usize, f: &TateSeries) -> Result<TateSeries> {
        self.scenario.apply(sigma, &self.images[sigma], f)
    }

    /// `Σ_σ σ·(l*·F)`, the coefficient of `F` on the basis vector `1` of `L/k`.
    pub fn invariant_part(&self, f: &TateSeries) -> Result<TateSeries> {
        let tower = &self.scenario.tower;
        let dual = Laurent::constant(dual_of_one(tower)?);
        let scaled = f.scale(&dual);
        let mut out = TateSeries::zero(tower, f.n());
        for sigma in 0..self.order() {
            out = out.add(&self.act(sigma, &scaled)?);
        }
        Ok(out)
    }

    /// The largest bound on `‖σ·f − f‖` over all elements and tracked points.
    pub fn invariance_defect(&self, f: &TateSeries) -> Result<ValueOrZero> {
        let mut worst = ValueOrZero::Zero;
        for sigma in 0..self.order() {
            let d = self.act(sigma, f)?.sub(f);
            if d.is_zero() {
                continue;
            }
            for p in self.scenario.domain.points() {
                worst = worst.max(d.norm_bound(&p)?);
            }
        }
        Ok(worst)
    }
}

/// `l* ∈ 𝔽_Q` with `Σ_σ σ(l*·c_j) = δ_{1j}` over the coefficient basis `c_j`.
fn dual_of_one(tower: &Tower) -> Result<Fq> {
    let g = tower.residue();
    let basis = tower.basis().coeff_basis();
    let field = tower.field();
    let trace = |x: Fq| g.elements().fold(field.zero(), |acc, s| acc + g.field_act(s, x));
    field
        .elements()
        .find(|&l| {
            basis
                .iter()
                .enumerate()
                .all(|(j, &c)| trace(l * c) == if j == 0 { field.one() } else { field.zero() })
        })
        .ok_or(Error::DegenerateTrace)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `σ·T_i` reduces to a non-affine polynomial containing `monomial`.
    NotResiduallyAffine {
        element: usize,
        index: usize,
        monomial: Exponent,
        reduction: String,
    },
    /// The dominant polydegrees of `σ·T` form `matrix` rather than the identity.
    LatticeNontrivial { element: usize, matrix: Vec<Vec<i64>> },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::NotResiduallyAffine {
                element,
                index,
                monomial,
                reduction,
            } => write!(
                f,
                "reduction of element {element} on T{} is {reduction}, with non-affine monomial {monomial:?}",
                index + 1
            ),
            Obstruction::LatticeNontrivial { element, matrix } => {
                write!(f, "element {element} acts on the lattice by {matrix:?}")
            }
        }
    }
}

/// `g·τ = A_g τ + B_g` for one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineReduction {
    pub element: usize,
    pub a: HomMatrix,
    pub b: Vec<GradedElem>,
}

pub fn residually_affine_check(action: &GroupAction) -> Result<std::result::Result<Vec<AffineReduction>, Obstruction>> {
    let scenario = action.scenario;
    let Domain::Polydisc(r) = &scenario.domain else {
        return Err(Error::InvalidAction("residual affinity concerns polydiscs".into()));
    };
    let tower = &scenario.tower;
    let field = tower.field();
    let n = r.len();
    let mut out = Vec::with_capacity(action.order());
    for sigma in 0..action.order() {
        let mut entries = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for (i, image) in action.images(sigma).iter().enumerate() {
            if image.seminorm(r)? != ValueOrZero::Value(r[i].clone()) {
                return Err(Error::InvalidAction(format!(
                    "element {sigma} does not preserve the radius of T{}",
                    i + 1
                )));
            }
            let red = image.graded_reduction(r)?;
            if let Some(e) = red.non_affine_monomial() {
                return Ok(Err(Obstruction::NotResiduallyAffine {
                    element: sigma,
                    index: i,
                    monomial: e.clone(),
                    reduction: red.to_string(),
                }));
            }
            let mut row = vec![GradedElem::zero(field); n];
            let mut bi = GradedElem::zero(field);
            for (e, c) in red.terms() {
                match e.iter().position(|&x| x == 1) {
                    Some(j) => row[j] = c.clone(),
                    None => bi = c.clone(),
                }
            }
            entries.push(row);
            b.push(bi);
        }
        let a = HomMatrix::from_entries(tower.residue().graded(), r.clone(), r.clone(), &entries)?;
        if !a.is_gl() {
            return Err(Error::InvalidAction(format!("element {sigma} has a singular linear part")));
        }
        out.push(AffineReduction { element: sigma, a, b });
    }
    let alphas: Vec<HomMatrix> = out.iter().map(|x| x.a.clone()).collect();
    check_mult_cocycle(tower.residue(), r, &alphas)?;
    Ok(Ok(out))
}

/// `g·T_i = α_{i,g} T_i (1 + small)` with `|α| = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCocycle {
    /// `a[i][g]`, the degree-1 class of `α_{i,g}`.
    pub a: Vec<Vec<GradedElem>>,
}

pub fn lattice_trivial_check(action: &GroupAction) -> Result<std::result::Result<LatticeCocycle, Obstruction>> {
    let scenario = action.scenario;
    let Domain::Lace(u) = &scenario.domain else {
        return Err(Error::InvalidAction("the lattice check concerns laces".into()));
    };
    let n = u.dim();
    let mut a = vec![Vec::with_capacity(action.order()); n];
    for sigma in 0..action.order() {
        let check = coordinate_check_lace(action.images(sigma), u).map_err(|e| match e {
            Error::NotInvertible(i) => Error::InvalidAction(format!(
                "image of T{} under element {sigma} is not invertible on the shape",
                i + 1
            )),
            other => other,
        })?;
        let identity = (0..n).all(|i| (0..n).all(|j| check.matrix[i][j] == i64::from(i == j)));
        if !identity {
            return Ok(Err(Obstruction::LatticeNontrivial {
                element: sigma,
                matrix: check.matrix,
            }));
        }
        for (i, image) in action.images(sigma).iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            let (v, c) = image.coeff(&e).leading().expect("dominant term");
            if v != 0 {
                return Err(Error::InvalidAction(format!(
                    "element {sigma} rescales T{} by a scalar of absolute value ≠ 1",
                    i + 1
                )));
            }
            a[i].push(GradedElem::homogeneous(c, Gamma::one()));
        }
    }
    let g = scenario.tower.residue();
    for ai in &a {
        let alphas: Vec<HomMatrix> = ai.iter().map(|x| one_by_one(g, x)).collect::<Result<_>>()?;
        check_mult_cocycle(g, &[Gamma::one()], &alphas)?;
    }
    Ok(Ok(LatticeCocycle { a }))
}

fn one_by_one(g: &GaloisData, x: &GradedElem) -> Result<HomMatrix> {
    HomMatrix::from_entries(g.graded(), vec![Gamma::one()], vec![Gamma::one()], &[vec![x.clone()]])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Descends,
    /// The obstruction checks passed; no descent was attempted.
    ChecksPassed,
    ObstructionNotResiduallyAffine,
    ObstructionLatticeNontrivial,
    /// The descended polydisc is not of the requested type.
    NotIsomorphic,
    PrecisionLoss,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Descends | Verdict::ChecksPassed => 0,
            Verdict::ObstructionNotResiduallyAffine
            | Verdict::ObstructionLatticeNontrivial
            | Verdict::NotIsomorphic => 2,
            Verdict::PrecisionLoss => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Descends => "Descends",
            Verdict::ChecksPassed => "ChecksPassed",
            Verdict::ObstructionNotResiduallyAffine => "ObstructionNotResiduallyAffine",
            Verdict::ObstructionLatticeNontrivial => "ObstructionLatticeNontrivial",
            Verdict::NotIsomorphic => "NotIsomorphic",
            Verdict::PrecisionLoss => "PrecisionLoss",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Residue-level data produced by a pipeline, kept for re-verification.
#[derive(Clone, Debug)]
pub enum Transcript {
    None,
    Polydisc {
        cocycle: Vec<AffineReduction>,
        p: HomMatrix,
        s: Point,
        /// `additive[i][g] = b_{i,g}`.
        additive: Vec<Vec<GradedElem>>,
        mu: Vec<GradedElem>,
    },
    Lace {
        cocycle: LatticeCocycle,
        lambda: Vec<Laurent>,
        scale: Point,
        check: LaceCheck,
    },
}

#[derive(Clone, Debug)]
pub struct DescentReport {
    pub scenario: String,
    pub verdict: Verdict,
    pub detail: String,
    pub coordinates: Vec<TateSeries>,
    pub radii: Option<Point>,
    pub scale: Option<Point>,
    pub shape: Option<ZShape>,
    pub transcript: Transcript,
    pub lines: Vec<String>,
}

impl DescentReport {
    fn new(scenario: &GaloisScenario, verdict: Verdict, detail: String, lines: Vec<String>) -> Self {
        DescentReport {
            scenario: scenario.name.clone(),
            verdict,
            detail,
            coordinates: Vec::new(),
            radii: None,
            scale: None,
            shape: None,
            transcript: Transcript::None,
            lines,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    /// Recomputes every residue-level identity of the transcript.
    pub fn reverify(&self, tower: &Tower) -> Result<()> {
        let g = tower.residue();
        match &self.transcript {
            Transcript::None => Ok(()),
            Transcript::Polydisc {
                cocycle,
                p,
                s,
                additive,
                mu,
            } => {
                let p_inv = p.inv()?;
                for x in cocycle {
                    if p.act(g, x.element).mul(&p_inv)? != x.a {
                        return Err(Error::Verification(format!(
                            "A({}) ≠ (σ·P)P⁻¹",
                            x.element
                        )));
                    }
                }
                for (i, (b, m)) in additive.iter().zip(mu).enumerate() {
                    check_add_cocycle(g, &s[i], b)?;
                    for sigma in g.elements() {
                        if g.act(sigma, m).sub(m) != b[sigma] {
                            return Err(Error::Verification(format!(
                                "b({i}, {sigma}) ≠ σ·μ − μ"
                            )));
                        }
                    }
                }
                for (si, ri) in s.iter().zip(p.rows()) {
                    if tower.s_exponent(&si.div(ri)).is_none() {
                        return Err(Error::Verification(format!("{si}/{ri} ∉ |L^×|")));
                    }
                }
                Ok(())
            }
            Transcript::Lace {
                cocycle,
                lambda,
                scale,
                check,
            } => {
                for (i, (ai, li)) in cocycle.a.iter().zip(lambda).enumerate() {
                    let (v, c) = li.leading().expect("nonzero");
                    let red = GradedElem::homogeneous(c, tower.s_pow(v));
                    let red_inv = red.inv().expect("nonzero");
                    for sigma in g.elements() {
                        if g.act(sigma, &red).mul(&red_inv) != ai[sigma] {
                            return Err(Error::Verification(format!(
                                "a({i}, {sigma}) ≠ (σ·λ̃)/λ̃"
                            )));
                        }
                    }
                    if tower.abs(li)? != ValueOrZero::Value(scale[i].inv()) {
                        return Err(Error::Verification(format!("Λ{} ≠ |λ{}|⁻¹", i + 1, i + 1)));
                    }
                }
                if !check.coordinates {
                    return Err(Error::Verification("descended family fails the lace check".into()));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for DescentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.scenario)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        if !self.detail.is_empty() {
            writeln!(f, "detail: {}", self.detail)?;
        }
        for line in &self.lines {
            writeln!(f, "  {line}")?;
        }
        if let Some(r) = &self.radii {
            writeln!(f, "radii: {}", format_point(r))?;
        }
        if let Some(l) = &self.scale {
            writeln!(f, "scale: {}", format_point(l))?;
        }
        for (i, c) in self.coordinates.iter().enumerate() {
            writeln!(f, "f{} = {c}", i + 1)?;
        }
        Ok(())
    }
}

/// Runs the obstruction checks only.
pub fn check(scenario: &GaloisScenario) -> Result<DescentReport> {
    let action = scenario.closure()?;
    let mut lines = vec![format!("group of order {} acts consistently", action.order())];
    let outcome = match &scenario.domain {
        Domain::Polydisc(_) => residually_affine_check(&action).map(|x| {
            x.map(|data| {
                for d in &data {
                    lines.push(format!("A({}) = {}", d.element, d.a));
                }
            })
        }),
        Domain::Lace(_) => lattice_trivial_check(&action).map(|x| {
            x.map(|c| {
                for (i, ai) in c.a.iter().enumerate() {
                    let parts: Vec<String> = ai.iter().map(|x| x.to_string()).collect();
                    lines.push(format!("a{} = [{}]", i + 1, parts.join(", ")));
                }
            })
        }),
    };
    Ok(match outcome {
        Err(Error::PrecisionLoss(m)) => DescentReport::new(scenario, Verdict::PrecisionLoss, m, lines),
        Err(e) => return Err(e),
        Ok(Ok(())) => DescentReport::new(scenario, Verdict::ChecksPassed, String::new(), lines),
        Ok(Err(o)) => obstructed(scenario, o, lines),
    })
}

fn obstructed(scenario: &GaloisScenario, o: Obstruction, lines: Vec<String>) -> DescentReport {
    let verdict = match o {
        Obstruction::NotResiduallyAffine { .. } => Verdict::ObstructionNotResiduallyAffine,
        Obstruction::LatticeNontrivial { .. } => Verdict::ObstructionLatticeNontrivial,
    };
    DescentReport::new(scenario, verdict, o.to_string(), lines)
}

/// Dispatches on the kind of space; precision failures become a verdict.
pub fn descend(scenario: &GaloisScenario) -> Result<DescentReport> {
    let result = match &scenario.domain {
        Domain::Polydisc(_) => descend_polydisc(scenario),
        Domain::Lace(_) => descend_lace(scenario),
    };
    match result {
        Err(Error::PrecisionLoss(m)) => Ok(DescentReport::new(
            scenario,
            Verdict::PrecisionLoss,
            m,
            Vec::new(),
        )),
        other => other,
    }
}

pub fn descend_polydisc(scenario: &GaloisScenario) -> Result<DescentReport> {
    let Domain::Polydisc(r) = &scenario.domain else {
        return Err(Error::InvalidAction("not a polydisc scenario".into()));
    };
    let tower = &scenario.tower;
    let g = tower.residue();
    let n = r.len();
    let action = scenario.closure()?;
    let mut lines = vec![format!("group of order {} acts consistently", action.order())];
    let cocycle = match residually_affine_check(&action)? {
        Ok(c) => c,
        Err(o) => return Ok(obstructed(scenario, o, lines)),
    };
    let alphas: Vec<HomMatrix> = cocycle.iter().map(|x| x.a.clone()).collect();
    for x in &cocycle {
        lines.push(format!("A({}) = {}", x.element, x.a));
    }
    let (s, p) = hilbert90_mult(g, tower.basis(), r, &alphas)?;
    let p_inv = p.inv()?;
    lines.push(format!("P = {p}, s = {}", format_point(&s)));

    let vars = scenario.vars();
    let mut changed = Vec::with_capacity(n);
    for i in 0..n {
        let mut f = TateSeries::zero(tower, n);
        for (j, t) in vars.iter().enumerate() {
            f = f.add(&t.scale(&tower.lift(&p_inv.entry(i, j))?));
        }
        changed.push(f);
    }
    let mut additive = vec![Vec::with_capacity(action.order()); n];
    for sigma in 0..action.order() {
        for (i, f) in changed.iter().enumerate() {
            let moved = action.act(sigma, f)?;
            let red = moved.graded_reduction(r)?;
            let base = f.graded_reduction(r)?;
            let linear_moved: Vec<_> = red.terms().iter().filter(|(e, _)| e.iter().any(|&x| x != 0)).collect();
            let linear_base: Vec<_> = base.terms().iter().collect();
            if linear_moved != linear_base {
                return Err(Error::Verification(format!(
                    "element {sigma} does not fix the linear part of T'{}",
                    i + 1
                )));
            }
            let b = red
                .coeff(&vec![0; n])
                .cloned()
                .unwrap_or_else(|| GradedElem::zero(tower.field()));
            additive[i].push(b);
        }
    }
    let mut mu = Vec::with_capacity(n);
    let mut translated = Vec::with_capacity(n);
    for (i, f) in changed.iter().enumerate() {
        let m = hilbert90_add(g, &s[i], &additive[i])?;
        lines.push(format!("μ{} = {m}", i + 1));
        translated.push(f.sub(&TateSeries::constant(tower, n, tower.lift(&m)?)));
        mu.push(m);
    }
    let mut coordinates = Vec::with_capacity(n);
    for (i, f) in translated.iter().enumerate() {
        let fi = action.invariant_part(f)?;
        let defect = action.invariance_defect(&fi)?;
        if defect > ValueOrZero::Value(scenario.eps.clone()) {
            return Err(Error::Verification(format!(
                "f{} moves by {defect} under the group",
                i + 1
            )));
        }
        lines.push(format!("f{} invariant (defect {defect})", i + 1));
        coordinates.push(fi);
    }
    let check = coordinate_check_polydisc(&coordinates, r, tower, false)?;
    lines.push(format!("coordinate check: {}", check.verdict));
    if check.verdict != PolydiscVerdict::Coordinates {
        return Err(Error::Verification(format!(
            "descended family fails the polydisc check: {}",
            check.verdict
        )));
    }
    if check.s != s {
        return Err(Error::Verification(format!(
            "descended radii {} differ from {}",
            format_point(&check.s),
            format_point(&s)
        )));
    }
    for (si, ri) in s.iter().zip(r) {
        if tower.s_exponent(&si.div(ri)).is_none() {
            return Err(Error::Verification(format!("{si}/{ri} ∉ |L^×|")));
        }
    }
    let mut report = DescentReport::new(scenario, Verdict::Descends, String::new(), lines);
    if let Some(target) = &scenario.target {
        match polydisc_type_equiv(&s, target, &tower.value_group_k()) {
            Some(pi) => report.lines.push(format!("type matches {} via {pi:?}", format_point(target))),
            None => {
                report.verdict = Verdict::NotIsomorphic;
                report.detail = format!(
                    "descended radii {} are not of type {} over |k^×|",
                    format_point(&s),
                    format_point(target)
                );
                if !gl_nonempty(target, &s, &tower.value_group_k()) {
                    report.lines.push(format!(
                        "GL(k̃, {}, {}) = ∅",
                        format_point(target),
                        format_point(&s)
                    ));
                }
            }
        }
    }
    report.coordinates = coordinates;
    report.radii = Some(s.clone());
    report.transcript = Transcript::Polydisc {
        cocycle,
        p,
        s,
        additive,
        mu,
    };
    Ok(report)
}

/// Multiplies `λ` by a power of `t` so that `|λ|⁻¹ ∈ (|t|, 1]`.
fn normalize_scale(tower: &Tower, lambda: Laurent) -> Laurent {
    let e = i64::from(tower.degrees().2);
    let (v, _) = lambda.leading().expect("nonzero");
    let w = (-v).rem_euclid(e);
    lambda.shift(-w - v)
}

pub fn descend_lace(scenario: &GaloisScenario) -> Result<DescentReport> {
    let Domain::Lace(u) = &scenario.domain else {
        return Err(Error::InvalidAction("not a lace scenario".into()));
    };
    let tower = &scenario.tower;
    let g = tower.residue();
    let n = u.dim();
    let action = scenario.closure()?;
    let mut lines = vec![format!("group of order {} acts consistently", action.order())];
    let cocycle = match lattice_trivial_check(&action)? {
        Ok(c) => c,
        Err(o) => return Ok(obstructed(scenario, o, lines)),
    };
    let vars = scenario.vars();
    let mut lambda = Vec::with_capacity(n);
    let mut scale = Vec::with_capacity(n);
    let mut coordinates = Vec::with_capacity(n);
    for (i, ai) in cocycle.a.iter().enumerate() {
        let alphas: Vec<HomMatrix> = ai.iter().map(|x| one_by_one(g, x)).collect::<Result<_>>()?;
        let (_, p) = hilbert90_mult(g, tower.basis(), &[Gamma::one()], &alphas)?;
        let li = normalize_scale(tower, tower.lift(&p.entry(0, 0))?);
        let (v, c) = li.leading().expect("nonzero");
        let abs = tower.s_pow(v);
        lines.push(format!("λ{} = {li}, |λ{}| = {abs}", i + 1, i + 1));
        let li_inv = Laurent::monomial(c.inv(), -v);
        let rescaled = vars[i].scale(&li_inv);
        let fi = action.invariant_part(&rescaled)?;
        for vertex in u.vertices() {
            if fi.graded_reduction(&vertex)? != rescaled.graded_reduction(&vertex)? {
                return Err(Error::Verification(format!(
                    "reduction of f{} differs from that of λ⁻¹T{} at {}",
                    i + 1,
                    i + 1,
                    format_point(&vertex)
                )));
            }
        }
        let defect = action.invariance_defect(&fi)?;
        if defect > ValueOrZero::Value(scenario.eps.clone()) {
            return Err(Error::Verification(format!(
                "f{} moves by {defect} under the group",
                i + 1
            )));
        }
        lines.push(format!("f{} invariant (defect {defect})", i + 1));
        scale.push(abs.inv());
        lambda.push(li);
        coordinates.push(fi);
    }
    let check = coordinate_check_lace(&coordinates, u)?;
    lines.push(format!(
        "lace check: degrees {:?}, det {}",
        check.matrix, check.det
    ));
    if !check.coordinates {
        return Err(Error::Verification("descended family fails the lace check".into()));
    }
    let shape = u.translate(&scale);
    let mut report = DescentReport::new(scenario, Verdict::Descends, String::new(), lines);
    report.coordinates = coordinates;
    report.scale = Some(scale.clone());
    report.shape = Some(shape);
    report.transcript = Transcript::Lace {
        cocycle,
        lambda,
        scale,
        check,
    };
    Ok(report)
}

/// A permutation `π` with `s_{π(i)}/r_i ∈ |k^×|` for all `i`, if one exists.
pub fn polydisc_type_equiv(r: &[Gamma], s: &[Gamma], value_group: &DegreeGroup) -> Option<Vec<usize>> {
    if r.len() != s.len() {
        return None;
    }
    perfect_matching(r.len(), |i, j| value_group.contains(&s[j].div(&r[i])))
}

/// Random twists of the standard action with known answers.
pub mod synth {
    use super::*;
    use rand::Rng;

    /// An invertible substitution `Y ↦ E(Y)` with its exact inverse.
    struct Elementary {
        forward: Vec<TateSeries>,
        inverse: Vec<TateSeries>,
    }

    fn unit<R: Rng>(rng: &mut R, tower: &Tower) -> Fq {
        let field = tower.field();
        field.from_packed(rng.gen_range(1..field.order()))
    }

    /// Smallest `k` with `|s|^k·base ≤ bound` (strict when `strict`).
    fn exponent_below(tower: &Tower, base: &Gamma, bound: &Gamma, strict: bool) -> i64 {
        let ok = |k: i64| {
            let v = tower.s_pow(k).mul(base);
            if strict {
                v < *bound
            } else {
                v <= *bound
            }
        };
        let mut k = 0;
        while !ok(k) {
            k += 1;
        }
        while ok(k - 1) {
            k -= 1;
        }
        k
    }

    fn compose(tower: &Tower, n: usize, maps: &[Elementary]) -> Result<(Vec<TateSeries>, Vec<TateSeries>)> {
        let vars: Vec<TateSeries> = (0..n).map(|i| TateSeries::var(tower, n, i)).collect();
        let mut phi = vars.clone();
        for m in maps {
            phi = m
                .forward
                .iter()
                .map(|f| f.substitute(&phi, None))
                .collect::<Result<_>>()?;
        }
        let mut inv = vars;
        for m in maps.iter().rev() {
            inv = m
                .inverse
                .iter()
                .map(|f| f.substitute(&inv, None))
                .collect::<Result<_>>()?;
        }
        Ok((phi, inv))
    }

    fn twisted_action(tower: &Tower, phi: &[TateSeries], inv: &[TateSeries]) -> Result<Vec<(usize, Vec<TateSeries>)>> {
        (0..tower.order())
            .map(|sigma| {
                let images = phi
                    .iter()
                    .map(|f| f.act_coeffs(tower, sigma).substitute(inv, None))
                    .collect::<Result<Vec<_>>>()?;
                Ok((sigma, images))
            })
            .collect()
    }

    fn replace(vars: &[TateSeries], i: usize, f: TateSeries) -> Vec<TateSeries> {
        let mut out = vars.to_vec();
        out[i] = f;
        out
    }

    /// `Y_i ↦ c·Y_i`.
    fn scaling(tower: &Tower, n: usize, i: usize, c: Laurent) -> Elementary {
        let vars: Vec<TateSeries> = (0..n).map(|j| TateSeries::var(tower, n, j)).collect();
        let (v, u) = c.leading().expect("nonzero");
        let c_inv = Laurent::monomial(u.inv(), -v);
        Elementary {
            forward: replace(&vars, i, vars[i].scale(&c)),
            inverse: replace(&vars, i, vars[i].scale(&c_inv)),
        }
    }

    /// `Y_i ↦ Y_i + c·Y^J` with `J_i = 0`.
    fn shear(tower: &Tower, n: usize, i: usize, c: Laurent, exps: Exponent) -> Elementary {
        let vars: Vec<TateSeries> = (0..n).map(|j| TateSeries::var(tower, n, j)).collect();
        let term = TateSeries::monomial(tower, n, c, exps);
        Elementary {
            forward: replace(&vars, i, vars[i].add(&term)),
            inverse: replace(&vars, i, vars[i].sub(&term)),
        }
    }

    fn swap(tower: &Tower, n: usize, i: usize, j: usize) -> Elementary {
        let mut vars: Vec<TateSeries> = (0..n).map(|k| TateSeries::var(tower, n, k)).collect();
        vars.swap(i, j);
        Elementary {
            forward: vars.clone(),
            inverse: vars,
        }
    }

    /// A twist of the standard action on `𝔻_r` by a random automorphism with
    /// affine residual action. Returns the scenario on the image polydisc.
    pub fn polydisc_twist<R: Rng>(rng: &mut R, tower: &Tower, r: &[Gamma], name: &str) -> Result<GaloisScenario> {
        let n = r.len();
        let mut rho = r.to_vec();
        let mut maps = Vec::new();
        let mut nonlinear = false;
        for _ in 0..rng.gen_range(2..=4) {
            let i = rng.gen_range(0..n);
            let kind = rng.gen_range(0..5);
            match kind {
                0 => {
                    let k = rng.gen_range(-2..=2);
                    maps.push(scaling(tower, n, i, Laurent::monomial(unit(rng, tower), k)));
                    rho[i] = rho[i].mul(&tower.s_pow(k));
                }
                1 if n > 1 => {
                    let j = (i + rng.gen_range(1..n)) % n;
                    let k = exponent_below(tower, &rho[j], &rho[i], false) + rng.gen_range(0..2);
                    let mut e = vec![0; n];
                    e[j] = 1;
                    maps.push(shear(tower, n, i, Laurent::monomial(unit(rng, tower), k), e));
                }
                2 if n > 1 && !nonlinear => {
                    let mut e = vec![0; n];
                    for (j, x) in e.iter_mut().enumerate() {
                        if j != i {
                            *x = rng.gen_range(0..=2);
                        }
                    }
                    if e.iter().sum::<i64>() < 2 {
                        e[(i + 1) % n] = 2;
                    }
                    let base = crate::value_group::monomial_value(&rho, &e);
                    let k = exponent_below(tower, &base, &rho[i], true);
                    maps.push(shear(tower, n, i, Laurent::monomial(unit(rng, tower), k), e));
                    nonlinear = true;
                }
                3 if n > 1 => {
                    let j = (i + rng.gen_range(1..n)) % n;
                    maps.push(swap(tower, n, i, j));
                    rho.swap(i, j);
                }
                _ => {
                    let k = exponent_below(tower, &Gamma::one(), &rho[i], false) + rng.gen_range(0..2);
                    maps.push(shear(tower, n, i, Laurent::monomial(unit(rng, tower), k), vec![0; n]));
                }
            }
        }
        let (phi, inv) = compose(tower, n, &maps)?;
        let action = twisted_action(tower, &phi, &inv)?;
        GaloisScenario::new(name, tower.clone(), Domain::Polydisc(rho), action)
    }

    /// A twist of the standard action on the lace of type `U` by rescalings and
    /// dominated shears; the scenario lives on the image shape.
    pub fn lace_twist<R: Rng>(rng: &mut R, tower: &Tower, u: &ZShape, name: &str) -> Result<GaloisScenario> {
        let n = u.dim();
        let mut shape = u.clone();
        let mut maps = Vec::new();
        for i in 0..n {
            let k = rng.gen_range(-2..=2);
            maps.push(scaling(tower, n, i, Laurent::monomial(unit(rng, tower), k)));
            let mut factor = vec![Gamma::one(); n];
            factor[i] = tower.s_pow(k);
            shape = shape.translate(&factor);
        }
        for _ in 0..rng.gen_range(1..=2) {
            let i = rng.gen_range(0..n);
            let mut e = vec![0; n];
            for (j, x) in e.iter_mut().enumerate() {
                if j != i {
                    *x = rng.gen_range(0..=1);
                }
            }
            let mut k = i64::MIN;
            for v in shape.vertices() {
                let base = crate::value_group::monomial_value(&v, &e);
                k = k.max(exponent_below(tower, &base, &v[i], true));
            }
            maps.push(shear(tower, n, i, Laurent::monomial(unit(rng, tower), k + rng.gen_range(0..2)), e));
        }
        let (phi, inv) = compose(tower, n, &maps)?;
        let action = twisted_action(tower, &phi, &inv)?;
        GaloisScenario::new(name, tower.clone(), Domain::Lace(shape), action)
    }
}
