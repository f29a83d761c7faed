//! ℤ-polytopes and ℤ-linear-by-pieces subsets of `(ℝ₊^×)ⁿ` with Γ-valued coordinates.
//!
//! A convex piece is an H-form (conjunction of `r·Π tᵢ^{aᵢ} ≤ 1`) together with a
//! supplied vertex list. Vertices are checked against the H-form on construction.

use crate::error::{Error, Result};
use crate::value_group::{format_point, monomial_value, point_mul, Gamma, Point};

/// `t ↦ r·Π tᵢ^{aᵢ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZAffineForm {
    pub exps: Vec<i64>,
    pub constant: Gamma,
}

impl ZAffineForm {
    pub fn new(exps: Vec<i64>, constant: Gamma) -> Self {
        ZAffineForm { exps, constant }
    }

    pub fn eval(&self, t: &[Gamma]) -> Gamma {
        self.constant.mul(&monomial_value(t, &self.exps))
    }

    pub fn holds(&self, t: &[Gamma]) -> bool {
        self.eval(t) <= Gamma::one()
    }

    /// The form `φ'` with `φ'(s·t) = φ(t)`.
    pub fn translate(&self, s: &[Gamma]) -> ZAffineForm {
        ZAffineForm {
            exps: self.exps.clone(),
            constant: self.constant.div(&monomial_value(s, &self.exps)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPiece {
    constraints: Vec<ZAffineForm>,
    vertices: Vec<Point>,
}

impl ConvexPiece {
    pub fn new(constraints: Vec<ZAffineForm>, vertices: Vec<Point>) -> Result<Self> {
        let n = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidShape("a piece needs at least one vertex".into()))?;
        if vertices.iter().any(|v| v.len() != n) || constraints.iter().any(|c| c.exps.len() != n) {
            return Err(Error::InvalidShape(format!("mixed dimensions, expected {n}")));
        }
        for v in &vertices {
            if let Some(c) = constraints.iter().find(|c| !c.holds(v)) {
                return Err(Error::InvalidShape(format!(
                    "vertex {} violates {:?} (value {})",
                    format_point(v),
                    c.exps,
                    c.eval(v)
                )));
            }
        }
        Ok(ConvexPiece {
            constraints,
            vertices,
        })
    }

    /// The box `Π [loᵢ, hiᵢ]` with its `2ⁿ` corners (fewer when some `loᵢ = hiᵢ`).
    pub fn boxed(lo: &[Gamma], hi: &[Gamma]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidShape("box bounds differ in length".into()));
        }
        let n = lo.len();
        let mut constraints = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            constraints.push(ZAffineForm::new(e.clone(), hi[i].inv()));
            e[i] = -1;
            constraints.push(ZAffineForm::new(e, lo[i].clone()));
        }
        let mut vertices: Vec<Point> = vec![Vec::new()];
        for i in 0..n {
            let mut next = Vec::new();
            for v in &vertices {
                for b in [&lo[i], &hi[i]] {
                    let mut w = v.clone();
                    w.push(b.clone());
                    if !next.contains(&w) {
                        next.push(w);
                    }
                }
            }
            vertices = next;
        }
        ConvexPiece::new(constraints, vertices)
    }

    pub fn point(r: &[Gamma]) -> Result<Self> {
        ConvexPiece::boxed(r, r)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn constraints(&self) -> &[ZAffineForm] {
        &self.constraints
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn contains(&self, t: &[Gamma]) -> bool {
        t.len() == self.dim() && self.constraints.iter().all(|c| c.holds(t))
    }

    pub fn translate(&self, s: &[Gamma]) -> ConvexPiece {
        ConvexPiece {
            constraints: self.constraints.iter().map(|c| c.translate(s)).collect(),
            vertices: self.vertices.iter().map(|v| point_mul(v, s)).collect(),
        }
    }
}

/// A finite union of convex pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPolytope {
    pieces: Vec<ConvexPiece>,
}

impl ZPolytope {
    pub fn new(pieces: Vec<ConvexPiece>) -> Result<Self> {
        let n = pieces
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::InvalidShape("empty polytope".into()))?;
        if pieces.iter().any(|p| p.dim() != n) {
            return Err(Error::InvalidShape("pieces of different dimension".into()));
        }
        Ok(ZPolytope { pieces })
    }

    pub fn pieces(&self) -> &[ConvexPiece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn contains(&self, t: &[Gamma]) -> bool {
        self.pieces.iter().any(|p| p.contains(t))
    }

    pub fn translate(&self, s: &[Gamma]) -> ZPolytope {
        ZPolytope {
            pieces: self.pieces.iter().map(|p| p.translate(s)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZShape {
    polytopes: Vec<ZPolytope>,
}

impl ZShape {
    pub fn new(polytopes: Vec<ZPolytope>) -> Result<Self> {
        let n = polytopes
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::InvalidShape("empty shape".into()))?;
        if polytopes.iter().any(|p| p.dim() != n) {
            return Err(Error::InvalidShape("polytopes of different dimension".into()));
        }
        Ok(ZShape { polytopes })
    }

    pub fn from_piece(piece: ConvexPiece) -> Self {
        ZShape {
            polytopes: vec![ZPolytope {
                pieces: vec![piece],
            }],
        }
    }

    pub fn point(r: &[Gamma]) -> Result<Self> {
        Ok(ZShape::from_piece(ConvexPiece::point(r)?))
    }

    pub fn boxed(lo: &[Gamma], hi: &[Gamma]) -> Result<Self> {
        Ok(ZShape::from_piece(ConvexPiece::boxed(lo, hi)?))
    }

    /// `[lo, hi] ⊂ ℝ₊^×`.
    pub fn interval(lo: Gamma, hi: Gamma) -> Result<Self> {
        ZShape::boxed(&[lo], &[hi])
    }

    pub fn polytopes(&self) -> &[ZPolytope] {
        &self.polytopes
    }

    pub fn pieces(&self) -> impl Iterator<Item = &ConvexPiece> {
        self.polytopes.iter().flat_map(|p| p.pieces.iter())
    }

    pub fn dim(&self) -> usize {
        self.polytopes[0].dim()
    }

    pub fn contains(&self, t: &[Gamma]) -> bool {
        self.polytopes.iter().any(|p| p.contains(t))
    }

    pub fn translate(&self, s: &[Gamma]) -> ZShape {
        ZShape {
            polytopes: self.polytopes.iter().map(|p| p.translate(s)).collect(),
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for v in self.pieces().flat_map(|p| p.vertices.iter()) {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value_group::Rational;
    use proptest::prelude::*;

    fn g(n: u64, d: u64) -> Gamma {
        Gamma::from_ratio(n, d)
    }

    #[test]
    fn singleton() {
        let u = ZShape::point(&[Gamma::one(), Gamma::one()]).unwrap();
        assert!(u.contains(&[Gamma::one(), Gamma::one()]));
        assert!(!u.contains(&[Gamma::one(), g(2, 1)]));
        assert_eq!(u.vertices(), vec![vec![Gamma::one(), Gamma::one()]]);
    }

    #[test]
    fn annulus_bounds() {
        let u = ZShape::interval(g(1, 2), g(2, 1)).unwrap();
        assert!(!u.contains(&[g(1, 4)]));
        assert!(u.contains(&[g(1, 2)]));
        assert!(u.contains(&[Gamma::one()]));
        assert!(!u.contains(&[g(3, 1)]));
        assert_eq!(u.vertices(), vec![vec![g(1, 2)], vec![g(2, 1)]]);
    }

    #[test]
    fn explicit_forms() {
        let forms = vec![
            ZAffineForm::new(vec![1, -1], Gamma::one()),
            ZAffineForm::new(vec![0, 1], g(1, 2)),
            ZAffineForm::new(vec![0, -1], g(1, 2)),
        ];
        let piece = ConvexPiece::new(forms, vec![vec![Gamma::one(), Gamma::one()]]).unwrap();
        let u = ZShape::from_piece(piece);
        assert!(u.contains(&[Gamma::one(), Gamma::one()]));
        assert!(!u.contains(&[g(2, 1), Gamma::one()]));
    }

    #[test]
    fn bad_vertex_rejected() {
        let forms = vec![ZAffineForm::new(vec![1], Gamma::one())];
        assert!(matches!(
            ConvexPiece::new(forms, vec![vec![g(2, 1)]]),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn box_corners() {
        let u = ZShape::boxed(&[g(1, 2), g(1, 3)], &[g(2, 1), Gamma::one()]).unwrap();
        assert_eq!(u.vertices().len(), 4);
        for v in u.vertices() {
            assert!(u.contains(&v));
        }
    }

    #[test]
    fn translate_interval() {
        let u = ZShape::interval(g(1, 2), g(2, 1)).unwrap();
        let t = u.translate(&[g(1, 3)]);
        assert_eq!(t, ZShape::interval(g(1, 6), g(2, 3)).unwrap());
        assert_eq!(u.translate(&[Gamma::one()]), u);
        assert_eq!(t.translate(&[g(3, 1)]), u);
    }

    fn gamma_strategy() -> impl Strategy<Value = Gamma> {
        (-4i64..=4, -4i64..=4, 1i64..=3).prop_map(|(a, b, d)| {
            Gamma::prime_power(2, Rational::new(a, d)).mul(&Gamma::prime_power(3, Rational::new(b, d)))
        })
    }

    fn point_strategy() -> impl Strategy<Value = Point> {
        proptest::collection::vec(gamma_strategy(), 2)
    }

    fn shape_strategy() -> impl Strategy<Value = ZShape> {
        (point_strategy(), point_strategy()).prop_map(|(a, b)| {
            let lo: Point = a.iter().zip(&b).map(|(x, y)| x.min(y).clone()).collect();
            let hi: Point = a.iter().zip(&b).map(|(x, y)| x.max(y).clone()).collect();
            ZShape::boxed(&lo, &hi).unwrap()
        })
    }

    proptest! {
        #[test]
        fn translate_is_an_action(u in shape_strategy(), s in point_strategy(), s2 in point_strategy()) {
            prop_assert_eq!(u.translate(&point_mul(&s, &s2)), u.translate(&s2).translate(&s));
        }

        #[test]
        fn contains_respects_translate(u in shape_strategy(), s in point_strategy(), r in point_strategy()) {
            prop_assert_eq!(u.translate(&s).contains(&point_mul(&s, &r)), u.contains(&r));
            for v in u.translate(&s).vertices() {
                prop_assert!(u.translate(&s).contains(&v));
            }
        }
    }
}
