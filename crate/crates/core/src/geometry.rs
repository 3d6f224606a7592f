//! The flat C₃ geometry Γ: points are k-lines in Pu_k(𝔸), lines are pairs
//! [a, b] up to a common unit scalar, planes are k-algebra embeddings 𝔸 → 𝔹.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{
    embed, extend_default, first_orthogonal, herm, orthonormal_complete, pole, project_out, pure_coords,
    pure_k_basis, random_unit_pure, AlgebraElement, AlgebraTag, Embedding, GroundField, KScalar, EPS,
};
use crate::error::{Error, Result};

/// Coordinates smaller than this are skipped when choosing the canonical scalar.
pub const CANON_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeometryCase {
    /// (ℝ, ℍ, ℍ)
    HH,
    /// (ℝ, ℍ, 𝕆)
    HO,
    /// (ℂ, 𝕆, 𝕆)
    OO,
}

impl GeometryCase {
    pub const ALL: [GeometryCase; 3] = [GeometryCase::HH, GeometryCase::HO, GeometryCase::OO];

    pub fn field(self) -> GroundField {
        match self {
            GeometryCase::OO => GroundField::C,
            _ => GroundField::R,
        }
    }

    pub fn a(self) -> AlgebraTag {
        match self {
            GeometryCase::OO => AlgebraTag::O,
            _ => AlgebraTag::H,
        }
    }

    pub fn b(self) -> AlgebraTag {
        match self {
            GeometryCase::HH => AlgebraTag::H,
            _ => AlgebraTag::O,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeometryCase::HH => "hh",
            GeometryCase::HO => "ho",
            GeometryCase::OO => "oo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hh" => Some(GeometryCase::HH),
            "ho" => Some(GeometryCase::HO),
            "oo" => Some(GeometryCase::OO),
            _ => None,
        }
    }

    pub fn pure_a_basis(self) -> Vec<AlgebraElement> {
        pure_k_basis(self.field(), self.a())
    }

    pub fn pure_b_basis(self) -> Vec<AlgebraElement> {
        pure_k_basis(self.field(), self.b())
    }

    /// Base plane: the coordinate inclusion 𝔸 ⊆ 𝔹.
    pub fn base_embedding(self) -> Embedding {
        Embedding::inclusion(self.field(), self.a(), self.b())
    }
}

impl fmt::Display for GeometryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Multiply by the unit scalar that makes the first significant k-coordinate
/// of `x` positive real; returns the scalar used.
fn canonical_scalar(x: &AlgebraElement, field: GroundField) -> KScalar {
    for z in pure_coords(x, field) {
        let m = z.norm();
        if m > CANON_THRESHOLD {
            return z.conj() / m;
        }
    }
    KScalar::new(1.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    case: GeometryCase,
    u: AlgebraElement,
}

impl Point {
    pub fn case(&self) -> GeometryCase {
        self.case
    }

    pub fn rep(&self) -> &AlgebraElement {
        &self.u
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    case: GeometryCase,
    a: AlgebraElement,
    b: AlgebraElement,
}

impl Line {
    pub fn case(&self) -> GeometryCase {
        self.case
    }

    pub fn a(&self) -> &AlgebraElement {
        &self.a
    }

    pub fn b(&self) -> &AlgebraElement {
        &self.b
    }

    /// The same line with representative rescaled by l: [a·l, b·l].
    pub fn rescaled(&self, l: KScalar) -> (AlgebraElement, AlgebraElement) {
        let f = self.case.field();
        (self.a.scal(f, l), self.b.scal(f, l))
    }

    /// Representative whose first component is exactly `a_new` (which must lie in a·k).
    pub fn with_first(&self, a_new: &AlgebraElement) -> AlgebraElement {
        let f = self.case.field();
        let l = herm(&self.a, a_new, f);
        self.b.scal(f, l / l.norm())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    case: GeometryCase,
    emb: Embedding,
}

impl Plane {
    pub fn case(&self) -> GeometryCase {
        self.case
    }

    pub fn emb(&self) -> &Embedding {
        &self.emb
    }

    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        self.emb.apply(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Vertex {
    Point(Point),
    Line(Line),
    Plane(Plane),
}

impl Vertex {
    /// Type in {1, 2, 3}.
    pub fn type_index(&self) -> u8 {
        match self {
            Vertex::Point(_) => 1,
            Vertex::Line(_) => 2,
            Vertex::Plane(_) => 3,
        }
    }

    pub fn case(&self) -> GeometryCase {
        match self {
            Vertex::Point(p) => p.case,
            Vertex::Line(l) => l.case,
            Vertex::Plane(p) => p.case,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Vertex::Point(_) => "point",
            Vertex::Line(_) => "line",
            Vertex::Plane(_) => "plane",
        }
    }

    pub fn as_point(&self) -> Option<&Point> {
        match self {
            Vertex::Point(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_line(&self) -> Option<&Line> {
        match self {
            Vertex::Line(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_plane(&self) -> Option<&Plane> {
        match self {
            Vertex::Plane(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_plane(&self) -> bool {
        matches!(self, Vertex::Plane(_))
    }
}

impl From<Point> for Vertex {
    fn from(p: Point) -> Self {
        Vertex::Point(p)
    }
}

impl From<Line> for Vertex {
    fn from(l: Line) -> Self {
        Vertex::Line(l)
    }
}

impl From<Plane> for Vertex {
    fn from(p: Plane) -> Self {
        Vertex::Plane(p)
    }
}

/// Pairwise incident vertices of distinct types.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Flag {
    pub point: Option<Point>,
    pub line: Option<Line>,
    pub plane: Option<Plane>,
}

impl Flag {
    pub fn maximal(point: Point, line: Line, plane: Plane) -> Self {
        Flag { point: Some(point), line: Some(line), plane: Some(plane) }
    }

    pub fn is_maximal(&self) -> bool {
        self.point.is_some() && self.line.is_some() && self.plane.is_some()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v = Vec::new();
        if let Some(p) = &self.point {
            v.push(Vertex::Point(*p));
        }
        if let Some(l) = &self.line {
            v.push(Vertex::Line(*l));
        }
        if let Some(p) = &self.plane {
            v.push(Vertex::Plane(p.clone()));
        }
        v
    }
}

/// An element (α, β) of Aut_k(𝔸) × Aut_k(𝔹) acting on Γ.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    pub alpha: Embedding,
    pub beta: Embedding,
}

/// Outcome of the Γ-residue solver used by `gq_project`.
#[derive(Clone, Debug, PartialEq)]
pub struct GqSolution {
    pub line: Line,
    pub rank: usize,
    /// Modulus of the second pivot after row scaling.
    pub min_pivot: f64,
}

/// Row-reduce a 2×3 system with partial pivoting on modulus; returns the
/// rank, the second pivot size, and a null vector when the rank is 2.
pub fn solve_2x3(rows: [[Complex64; 3]; 2], threshold: f64) -> (usize, f64, Option<[Complex64; 3]>) {
    let mut m = rows;
    for r in m.iter_mut() {
        let n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            for z in r.iter_mut() {
                *z /= n;
            }
        }
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    let mut min_pivot = f64::INFINITY;
    for col in 0..3 {
        if row == 2 {
            break;
        }
        let (best, val) = (row..2)
            .map(|r| (r, m[r][col].norm()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val < threshold {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        for z in m[row].iter_mut() {
            *z /= p;
        }
        for r in 0..2 {
            if r != row {
                let f = m[r][col];
                let pr = m[row];
                for (z, q) in m[r].iter_mut().zip(pr.iter()) {
                    *z -= f * q;
                }
            }
        }
        min_pivot = min_pivot.min(val);
        pivots.push((row, col));
        row += 1;
    }
    let rank = pivots.len();
    if rank != 2 {
        return (rank, if rank == 0 { 0.0 } else { min_pivot }, None);
    }
    let free = (0..3).find(|c| pivots.iter().all(|p| p.1 != *c)).unwrap();
    let mut x = [Complex64::new(0.0, 0.0); 3];
    x[free] = Complex64::new(1.0, 0.0);
    for &(r, c) in &pivots {
        x[c] = -m[r][free];
    }
    (rank, min_pivot, Some(x))
}

/// Geometry context: a case plus the equality tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub case: GeometryCase,
    pub tol: f64,
}

impl Geometry {
    pub fn new(case: GeometryCase) -> Self {
        Geometry { case, tol: EPS }
    }

    pub fn with_tol(case: GeometryCase, tol: f64) -> Self {
        Geometry { case, tol }
    }

    pub fn field(&self) -> GroundField {
        self.case.field()
    }

    fn herm(&self, x: &AlgebraElement, y: &AlgebraElement) -> KScalar {
        herm(x, y, self.field())
    }

    fn check_case(&self, c: GeometryCase) -> Result<()> {
        if c == self.case {
            Ok(())
        } else {
            Err(Error::CaseMismatch)
        }
    }

    fn check_pure(&self, x: &AlgebraElement, tag: AlgebraTag) -> Result<()> {
        if x.tag() != tag {
            return Err(Error::TagMismatch(x.tag(), tag));
        }
        let kp = x.k_part(self.field()).norm();
        if kp > 1e-7 * x.norm().max(1.0) {
            return Err(Error::Precondition(format!("{x:?} is not k-pure")));
        }
        Ok(())
    }

    pub fn point(&self, u: &AlgebraElement) -> Result<Point> {
        self.check_pure(u, self.case.a())?;
        let n = u.norm();
        if n < 1e-12 {
            return Err(Error::Precondition("zero vector does not span a point".into()));
        }
        let u = u.pure_part(self.field()).scale(1.0 / n);
        let l = canonical_scalar(&u, self.field());
        Ok(Point { case: self.case, u: u.scal(self.field(), l) })
    }

    /// The line [a, b]; |a| and |b| must agree, and both are normalized.
    pub fn line(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<Line> {
        self.check_pure(a, self.case.a())?;
        self.check_pure(b, self.case.b())?;
        let (na, nb) = (a.norm(), b.norm());
        if na < 1e-12 || nb < 1e-12 {
            return Err(Error::Precondition("line components must be nonzero".into()));
        }
        if (na - nb).abs() > 1e-7 * na.max(nb) {
            return Err(Error::Precondition(format!("line components have norms {na} and {nb}")));
        }
        let f = self.field();
        let a = a.pure_part(f).scale(1.0 / na);
        let b = b.pure_part(f).scale(1.0 / nb);
        let l = canonical_scalar(&a, f);
        Ok(Line { case: self.case, a: a.scal(f, l), b: b.scal(f, l) })
    }

    pub fn plane(&self, emb: Embedding) -> Result<Plane> {
        if emb.field() != self.field() || emb.source() != self.case.a() || emb.target() != self.case.b() {
            return Err(Error::Precondition("embedding does not match the geometry case".into()));
        }
        let d = emb.isometry_defect();
        if d > 1e-6 {
            return Err(Error::Precondition(format!("embedding is not isometric (defect {d:e})")));
        }
        Ok(Plane { case: self.case, emb })
    }

    pub fn canonical_point(&self, p: &Point) -> Point {
        self.point(&p.u).expect("stored point is valid")
    }

    pub fn canonical_line(&self, l: &Line) -> Line {
        self.line(&l.a, &l.b).expect("stored line is valid")
    }

    pub fn point_eq(&self, p: &Point, q: &Point) -> bool {
        project_out(&q.u, &[p.u], self.field()).norm() <= self.tol
    }

    pub fn line_eq(&self, l: &Line, m: &Line) -> bool {
        let f = self.field();
        let s = self.herm(&l.a, &m.a);
        if (s.norm() - 1.0).abs() > self.tol {
            return false;
        }
        let s = s / s.norm();
        m.a.dist(&l.a.scal(f, s)) <= self.tol && m.b.dist(&l.b.scal(f, s)) <= self.tol
    }

    pub fn plane_eq(&self, p: &Plane, q: &Plane) -> bool {
        p.emb.max_image_diff(&q.emb) <= self.tol
    }

    pub fn vertex_eq(&self, u: &Vertex, v: &Vertex) -> bool {
        match (u, v) {
            (Vertex::Point(p), Vertex::Point(q)) => self.point_eq(p, q),
            (Vertex::Line(l), Vertex::Line(m)) => self.line_eq(l, m),
            (Vertex::Plane(p), Vertex::Plane(q)) => self.plane_eq(p, q),
            _ => false,
        }
    }

    pub fn point_on_line(&self, p: &Point, l: &Line) -> bool {
        self.herm(&p.u, &l.a).norm() <= self.tol
    }

    pub fn line_in_plane(&self, l: &Line, pi: &Plane) -> bool {
        pi.apply(&l.a).dist(&l.b) <= self.tol
    }

    /// Symmetric incidence; vertices of one type are incident iff equal.
    pub fn incident(&self, u: &Vertex, v: &Vertex) -> Result<bool> {
        self.check_case(u.case())?;
        self.check_case(v.case())?;
        Ok(match (u, v) {
            (Vertex::Point(p), Vertex::Line(l)) | (Vertex::Line(l), Vertex::Point(p)) => self.point_on_line(p, l),
            (Vertex::Line(l), Vertex::Plane(pi)) | (Vertex::Plane(pi), Vertex::Line(l)) => self.line_in_plane(l, pi),
            (Vertex::Point(_), Vertex::Plane(_)) | (Vertex::Plane(_), Vertex::Point(_)) => true,
            _ => self.vertex_eq(u, v),
        })
    }

    pub fn is_flag(&self, vs: &[&Vertex]) -> Result<bool> {
        for (i, u) in vs.iter().enumerate() {
            for v in vs.iter().skip(i + 1) {
                if u.type_index() == v.type_index() || !self.incident(u, v)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// (a|c) − (b|d); zero iff the lines are coplanar.
    pub fn coplanarity_defect(&self, l: &Line, m: &Line) -> f64 {
        (self.herm(&l.a, &m.a) - self.herm(&l.b, &m.b)).norm()
    }

    pub fn coplanar(&self, l: &Line, m: &Line) -> Result<bool> {
        self.check_case(l.case)?;
        self.check_case(m.case)?;
        Ok(self.coplanarity_defect(l, m) <= self.tol)
    }

    pub fn common_plane(&self, l: &Line, m: &Line) -> Result<Plane> {
        self.check_case(l.case)?;
        self.check_case(m.case)?;
        let d = self.coplanarity_defect(l, m);
        if d > self.tol {
            return Err(Error::NotCoplanar(d));
        }
        if self.herm(&l.a, &m.a).norm() > 1.0 - 1e-9 {
            return Err(if self.line_eq(l, m) {
                Error::Precondition("the two lines coincide".into())
            } else {
                Error::ProportionalPair
            });
        }
        let emb = embed(&l.a, &m.a, &l.b, &m.b, self.field(), self.tol.max(1e-9) * 10.0)?;
        self.plane(emb)
    }

    /// The unique line [c, φ(c)] through p in π coplanar with L.
    pub fn gq_project(&self, p: &Point, pi: &Plane, l: &Line) -> Result<GqSolution> {
        self.check_case(p.case)?;
        self.check_case(pi.case)?;
        self.check_case(l.case)?;
        if !self.point_on_line(p, l) {
            return Err(Error::Incidence("p is not on L".into()));
        }
        let w = pi.apply(&l.a) - l.b;
        if w.norm() <= self.tol {
            return Err(Error::Incidence("L is incident with π".into()));
        }
        let basis = self.case.pure_a_basis();
        let f = self.field();
        let mut rows = [[Complex64::new(0.0, 0.0); 3]; 2];
        for (i, g) in basis.iter().enumerate() {
            rows[0][i] = herm(g, &p.u, f).conj();
            rows[1][i] = herm(&w, &pi.apply(g), f);
        }
        let (rank, min_pivot, x) = solve_2x3(rows, 1e-9);
        let x = x.ok_or_else(|| Error::IllConditioned(format!("rank {rank}, pivot {min_pivot:e}")))?;
        let c = basis
            .iter()
            .zip(x.iter())
            .fold(AlgebraElement::zero(self.case.a()), |acc, (g, z)| acc + g.scal(f, *z))
            .normalized();
        let line = self.line(&c, &pi.apply(&c))?;
        Ok(GqSolution { line, rank, min_pivot })
    }

    /// Orthonormal spanning pair of the k-plane a⊥ (the points of L).
    pub fn point_shadow(&self, l: &Line) -> [AlgebraElement; 2] {
        let v = orthonormal_complete(self.field(), self.case.a(), &[l.a], 1e-7).expect("unit pure");
        [v[1], v[2]]
    }

    /// Orthonormal spanning pair of u⊥ (the points orthogonal to p).
    pub fn polar_line(&self, p: &Point) -> [AlgebraElement; 2] {
        let v = orthonormal_complete(self.field(), self.case.a(), &[p.u], 1e-7).expect("unit pure");
        [v[1], v[2]]
    }

    /// Unit pure element orthogonal to both (independent) representatives.
    pub fn pole(&self, u: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement> {
        pole(u, v, self.field())
    }

    pub fn orthogonal(&self, p: &Point, q: &Point) -> bool {
        self.herm(&p.u, &q.u).norm() <= self.tol
    }

    /// The point of the k-line orthogonal to both vectors.
    pub fn point_orthogonal_to(&self, u: &AlgebraElement, v: &AlgebraElement) -> Result<Point> {
        self.point(&self.pole(u, v)?)
    }

    /// The unique line of π through two distinct points.
    pub fn join_in_plane(&self, p: &Point, q: &Point, pi: &Plane) -> Result<Line> {
        if self.point_eq(p, q) {
            return Err(Error::Precondition("join of equal points".into()));
        }
        let a = self.pole(&p.u, &q.u)?;
        self.line(&a, &pi.apply(&a))
    }

    /// The common point of two distinct lines of one plane (any two lines
    /// with independent first components share exactly one point).
    pub fn meet(&self, l: &Line, m: &Line) -> Result<Point> {
        self.point_orthogonal_to(&l.a, &m.a)
            .map_err(|_| Error::Precondition("lines have the same point shadow".into()))
    }

    /// A point of L orthogonal to p (deterministic); any point of L if p is its pole.
    pub fn point_on_line_orthogonal_to(&self, l: &Line, p: &Point) -> Result<Point> {
        match self.pole(&l.a, &p.u) {
            Ok(c) => self.point(&c),
            Err(_) => self.point(&self.point_shadow(l)[0]),
        }
    }

    /// A line through two distinct points with prescribed second component direction.
    pub fn line_through(&self, p: &Point, q: &Point, b: &AlgebraElement) -> Result<Line> {
        let a = self.pole(&p.u, &q.u)?;
        self.line(&a, &b.normalized())
    }

    /// Some plane through L: a ↦ b and the first completion vectors matched.
    pub fn plane_through(&self, l: &Line) -> Result<Plane> {
        let f = self.field();
        let c = first_orthogonal(f, self.case.a(), &[l.a])?;
        let d = first_orthogonal(f, self.case.b(), &[l.b])?;
        self.plane(embed(&l.a, &c, &l.b, &d, f, 1e-8)?)
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.point(&random_unit_pure(self.field(), self.case.a(), rng).unwrap()).unwrap()
    }

    pub fn random_b<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        random_unit_pure(self.field(), self.case.b(), rng).unwrap()
    }

    pub fn random_a<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        random_unit_pure(self.field(), self.case.a(), rng).unwrap()
    }

    /// Random unit element of Pu_k(𝔸) orthogonal to the given orthonormal list.
    pub fn random_a_orthogonal<R: Rng + ?Sized>(&self, rng: &mut R, to: &[AlgebraElement]) -> AlgebraElement {
        loop {
            let v = project_out(&self.random_a(rng), to, self.field());
            let v = project_out(&v, to, self.field());
            if v.norm() > 1e-3 {
                return v.normalized();
            }
        }
    }

    pub fn random_b_orthogonal<R: Rng + ?Sized>(&self, rng: &mut R, to: &[AlgebraElement]) -> AlgebraElement {
        loop {
            let v = project_out(&self.random_b(rng), to, self.field());
            let v = project_out(&v, to, self.field());
            if v.norm() > 1e-3 {
                return v.normalized();
            }
        }
    }

    pub fn random_line<R: Rng + ?Sized>(&self, rng: &mut R) -> Line {
        self.line(&self.random_a(rng), &self.random_b(rng)).unwrap()
    }

    pub fn random_line_through<R: Rng + ?Sized>(&self, p: &Point, rng: &mut R) -> Line {
        let a = self.random_a_orthogonal(rng, &[p.u]);
        self.line(&a, &self.random_b(rng)).unwrap()
    }

    pub fn random_point_on<R: Rng + ?Sized>(&self, l: &Line, rng: &mut R) -> Point {
        self.point(&self.random_a_orthogonal(rng, &[l.a])).unwrap()
    }

    pub fn random_plane<R: Rng + ?Sized>(&self, rng: &mut R) -> Plane {
        let l = self.random_line(rng);
        self.random_plane_through(&l, rng)
    }

    pub fn random_plane_through<R: Rng + ?Sized>(&self, l: &Line, rng: &mut R) -> Plane {
        let c = self.random_a_orthogonal(rng, &[l.a]);
        let d = self.random_b_orthogonal(rng, &[l.b]);
        self.plane(embed(&l.a, &c, &l.b, &d, self.field(), 1e-8).unwrap()).unwrap()
    }

    pub fn random_line_in<R: Rng + ?Sized>(&self, pi: &Plane, rng: &mut R) -> Line {
        let a = self.random_a(rng);
        self.line(&a, &pi.apply(&a)).unwrap()
    }

    /// A random vertex incident with and distinct from `v`.
    pub fn random_neighbor<R: Rng + ?Sized>(&self, v: &Vertex, rng: &mut R) -> Vertex {
        let coin = rng.random_bool(0.5);
        match v {
            Vertex::Point(p) => {
                if coin {
                    Vertex::Line(self.random_line_through(p, rng))
                } else {
                    Vertex::Plane(self.random_plane(rng))
                }
            }
            Vertex::Line(l) => {
                if coin {
                    Vertex::Point(self.random_point_on(l, rng))
                } else {
                    Vertex::Plane(self.random_plane_through(l, rng))
                }
            }
            Vertex::Plane(pi) => {
                if coin {
                    Vertex::Point(self.random_point(rng))
                } else {
                    Vertex::Line(self.random_line_in(pi, rng))
                }
            }
        }
    }

    pub fn random_flag<R: Rng + ?Sized>(&self, rng: &mut R) -> Flag {
        let p = self.random_point(rng);
        let l = self.random_line_through(&p, rng);
        let pi = self.random_plane_through(&l, rng);
        Flag::maximal(p, l, pi)
    }

    /// Random automorphism (α, β), built through the flag transporter.
    pub fn random_automorphism<R: Rng + ?Sized>(&self, rng: &mut R) -> Automorphism {
        let f1 = self.random_flag(rng);
        let f2 = self.random_flag(rng);
        self.flag_transporter(&f1, &f2).expect("random flags are maximal")
    }

    pub fn identity_automorphism(&self) -> Automorphism {
        Automorphism {
            alpha: Embedding::identity(self.field(), self.case.a()),
            beta: Embedding::identity(self.field(), self.case.b()),
        }
    }

    /// Check that (α, β) are square automorphisms of 𝔸 and 𝔹.
    pub fn check_automorphism<R: Rng + ?Sized>(&self, g: &Automorphism, rng: &mut R) -> Result<()> {
        for (e, tag) in [(&g.alpha, self.case.a()), (&g.beta, self.case.b())] {
            if e.source() != tag || e.target() != tag {
                return Err(Error::Precondition("automorphism components must be square".into()));
            }
            let d = e.isometry_defect().max(e.multiplicativity_error(rng, 8));
            if d > 1e-7 {
                return Err(Error::Precondition(format!("not an automorphism (defect {d:e})")));
            }
        }
        Ok(())
    }

    /// points: ka ↦ α(ka); lines: [a,b] ↦ [α(a), β(b)]; planes: φ ↦ βφα⁻¹.
    pub fn apply_auto(&self, g: &Automorphism, v: &Vertex) -> Result<Vertex> {
        self.check_case(v.case())?;
        Ok(match v {
            Vertex::Point(p) => Vertex::Point(self.point(&g.alpha.apply(&p.u))?),
            Vertex::Line(l) => Vertex::Line(self.line(&g.alpha.apply(&l.a), &g.beta.apply(&l.b))?),
            Vertex::Plane(pi) => {
                let inv = g.alpha.inverse()?;
                Vertex::Plane(self.plane(g.beta.compose(&pi.emb)?.compose(&inv)?)?)
            }
        })
    }

    /// g ∘ h.
    pub fn compose_auto(&self, g: &Automorphism, h: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism { alpha: g.alpha.compose(&h.alpha)?, beta: g.beta.compose(&h.beta)? })
    }

    pub fn inverse_auto(&self, g: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism { alpha: g.alpha.inverse()?, beta: g.beta.inverse()? })
    }

    /// Automorphism of 𝔹 agreeing with ψ: 𝔸 → 𝔹 after φ, i.e. β∘φ = ψ.
    fn beta_between(&self, phi: &Embedding, psi: &Embedding) -> Result<Embedding> {
        match self.case {
            GeometryCase::HO => {
                let e1 = extend_default(phi)?;
                let e2 = extend_default(psi)?;
                e2.compose(&e1.inverse()?)
            }
            _ => psi.compose(&phi.inverse()?),
        }
    }

    /// Group element mapping the maximal flag F1 onto F2.
    pub fn flag_transporter(&self, f1: &Flag, f2: &Flag) -> Result<Automorphism> {
        if !f1.is_maximal() || !f2.is_maximal() {
            return Err(Error::Precondition("flags must contain a point, a line and a plane".into()));
        }
        let (p1, l1, pi1) = (f1.point.unwrap(), f1.line.unwrap(), f1.plane.clone().unwrap());
        let (p2, l2, pi2) = (f2.point.unwrap(), f2.line.unwrap(), f2.plane.clone().unwrap());
        for (p, l, pi) in [(&p1, &l1, &pi1), (&p2, &l2, &pi2)] {
            if !self.point_on_line(p, l) || !self.line_in_plane(l, pi) {
                return Err(Error::Incidence("flag is not pairwise incident".into()));
            }
        }
        let f = self.field();
        let alpha = embed(&p1.u, &l1.a, &p2.u, &l2.a, f, 1e-7)?;
        let psi = pi2.emb.compose(&alpha)?;
        let beta = self.beta_between(&pi1.emb, &psi)?;
        Ok(Automorphism { alpha, beta })
    }

    /// Automorphism fixing nothing in particular that maps the orthonormal
    /// pair (u0, u1) of Pu_k(𝔸) to (v0, v1) and (b0, c0) of Pu_k(𝔹) to (b1, c1).
    pub fn frame_automorphism(
        &self,
        (u0, u1): (&AlgebraElement, &AlgebraElement),
        (v0, v1): (&AlgebraElement, &AlgebraElement),
        (b0, c0): (&AlgebraElement, &AlgebraElement),
        (b1, c1): (&AlgebraElement, &AlgebraElement),
    ) -> Result<Automorphism> {
        let f = self.field();
        let alpha = embed(u0, u1, v0, v1, f, 1e-7)?;
        let beta = match self.case {
            GeometryCase::HO => {
                let h = AlgebraTag::H;
                let (i, j) = (AlgebraElement::basis(h, 1), AlgebraElement::basis(h, 2));
                let e0 = extend_default(&embed(&i, &j, b0, c0, f, 1e-7)?)?;
                let e1 = extend_default(&embed(&i, &j, b1, c1, f, 1e-7)?)?;
                e1.compose(&e0.inverse()?)?
            }
            _ => embed(b0, c0, b1, c1, f, 1e-7)?,
        };
        Ok(Automorphism { alpha, beta })
    }
}
