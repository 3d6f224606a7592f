//! Reference null-homotopy of the orthogonal primitive loop (x0, L0, y0, M0, x0)
//! with L0 = [a0, b0], M0 = [a0, c0] and (b0|c0) = 0.
//!
//! The filling is an octahedron with vertices x, y, x̄, ȳ, z1, z2, slit open
//! along the edge xy so that L0 and M0 lie on the two faces over it. The
//! points z1 = z2 = ⟨x0·y0⟩ are fixed, the points x̄, ȳ and the eight face
//! planes exp(D_f)∘ι are solved for once by Levenberg–Marquardt and then
//! re-verified with the exact incidence predicates.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{from_pure_coords, pole, AlgebraElement, AlgebraTag, Embedding, GroundField, KScalar};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryCase, Line, Plane, Point, Vertex};

use super::path::Worker;

pub const X: usize = 0;
pub const Y: usize = 1;
pub const XB: usize = 2;
pub const YB: usize = 3;
pub const Z1: usize = 4;
pub const Z2: usize = 5;

/// Faces of the octahedron, one vertex from each antipodal pair.
pub const FACES: [[usize; 3]; 8] = [
    [X, Y, Z1],
    [X, Y, Z2],
    [X, YB, Z1],
    [X, YB, Z2],
    [XB, Y, Z1],
    [XB, Y, Z2],
    [XB, YB, Z1],
    [XB, YB, Z2],
];

/// Moves used by one reference contraction.
pub const REFERENCE_MOVES: usize = 50;

const MAX_ATTEMPTS: u64 = 40;
const SOLVE_TOL: f64 = 1e-13;
const MIN_SEPARATION: f64 = 0.05;

fn face_index(vs: [usize; 3]) -> usize {
    let mut s = vs;
    s.sort_unstable();
    FACES
        .iter()
        .position(|f| {
            let mut g = *f;
            g.sort_unstable();
            g == s
        })
        .expect("face of the octahedron")
}

fn edges() -> Vec<((usize, usize), usize, usize)> {
    let mut out = Vec::new();
    for p in 0..6 {
        for q in p + 1..6 {
            let fs: Vec<usize> = (0..8).filter(|&f| FACES[f].contains(&p) && FACES[f].contains(&q)).collect();
            if fs.len() == 2 {
                out.push(((p, q), fs[0], fs[1]));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ReferenceDisk {
    pub case: GeometryCase,
    pub points: [AlgebraElement; 6],
    pub planes: Vec<Embedding>,
    pub b0: AlgebraElement,
    pub c0: AlgebraElement,
    /// Residual norm of the solved incidence system.
    pub residual: f64,
    /// Smallest sin-angle between the two endpoints of an octahedron edge.
    pub separation: f64,
    pub attempt: u64,
}

struct Problem {
    case: GeometryCase,
    field: GroundField,
    db: usize,
    derivs: Vec<DMatrix<f64>>,
    x0: AlgebraElement,
    y0: AlgebraElement,
    a0: AlgebraElement,
    b0: DVector<f64>,
    c0: DVector<f64>,
}

/// Real matrix of left (or right) multiplication by e_j on 𝔹.
fn mul_matrix(tag: AlgebraTag, j: usize, left: bool) -> DMatrix<f64> {
    let n = tag.dim();
    let ej = AlgebraElement::basis(tag, j);
    DMatrix::from_fn(n, n, |r, s| {
        let es = AlgebraElement::basis(tag, s);
        let p = if left { ej * es } else { es * ej };
        p.coeff(r)
    })
}

/// Basis of the derivations of 𝔹 vanishing on k, orthonormal in Frobenius norm.
pub fn derivation_basis(field: GroundField, tag: AlgebraTag) -> Vec<DMatrix<f64>> {
    let n = tag.dim();
    let nn = n * n;
    let fixed = field.dim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let li = mul_matrix(tag, i, true);
        for j in 0..n {
            let rj = mul_matrix(tag, j, false);
            let p = AlgebraElement::basis(tag, i) * AlgebraElement::basis(tag, j);
            for r in 0..n {
                let mut row = vec![0.0; nn];
                for k in 0..n {
                    row[r * n + k] += p.coeff(k);
                }
                for s in 0..n {
                    row[s * n + i] -= rj[(r, s)];
                    row[s * n + j] -= li[(r, s)];
                }
                rows.push(row);
            }
        }
    }
    for f in 0..fixed {
        for r in 0..n {
            let mut row = vec![0.0; nn];
            row[r * n + f] = 1.0;
            rows.push(row);
        }
    }
    let m = DMatrix::from_fn(rows.len(), nn, |i, j| rows[i][j]);
    let eig = SymmetricEigen::new(m.transpose() * &m);
    let mut out = Vec::new();
    for (idx, val) in eig.eigenvalues.iter().enumerate() {
        if val.abs() < 1e-8 {
            let v = eig.eigenvectors.column(idx);
            out.push(DMatrix::from_fn(n, n, |r, s| v[r * n + s]));
        }
    }
    out
}

fn to_vec(x: &AlgebraElement, db: usize) -> DVector<f64> {
    DVector::from_fn(db, |i, _| x.coeff(i))
}

impl Problem {
    fn new(case: GeometryCase) -> Self {
        let field = case.field();
        let a_basis = case.pure_a_basis();
        let b_basis = case.pure_b_basis();
        let (x0, y0) = (a_basis[0], a_basis[1]);
        let a0 = x0 * y0;
        let db = case.b().dim();
        Problem {
            case,
            field,
            db,
            derivs: derivation_basis(field, case.b()),
            x0,
            y0,
            a0,
            b0: to_vec(&b_basis[0], db),
            c0: to_vec(&b_basis[1], db),
        }
    }

    fn point_params(&self) -> usize {
        3 * self.field.dim()
    }

    fn n_params(&self) -> usize {
        8 * self.derivs.len() + 2 * self.point_params()
    }

    fn incl(&self, x: &AlgebraElement) -> DVector<f64> {
        DVector::from_fn(self.db, |i, _| if i < x.tag().dim() { x.coeff(i) } else { 0.0 })
    }

    fn unpack(&self, p: &DVector<f64>) -> (Vec<DMatrix<f64>>, [AlgebraElement; 6]) {
        let ng = self.derivs.len();
        let planes = (0..8)
            .map(|f| {
                let mut h = DMatrix::zeros(self.db, self.db);
                for (i, d) in self.derivs.iter().enumerate() {
                    h += d * p[f * ng + i];
                }
                h.exp()
            })
            .collect();
        let mut k = 8 * ng;
        let mut free = [self.x0; 2];
        for slot in free.iter_mut() {
            let z: Vec<KScalar> = match self.field {
                GroundField::R => (0..3).map(|i| KScalar::new(p[k + i], 0.0)).collect(),
                GroundField::C => (0..3).map(|i| KScalar::new(p[k + i], p[k + 3 + i])).collect(),
            };
            k += self.point_params();
            let v = from_pure_coords(self.case.a(), self.field, &z);
            let n = v.norm().max(1e-12);
            *slot = v.scale(1.0 / n);
        }
        (planes, [self.x0, self.y0, free[0], free[1], self.a0, self.a0])
    }

    fn residual(&self, p: &DVector<f64>) -> DVector<f64> {
        let (planes, pts) = self.unpack(p);
        let mut r: Vec<f64> = Vec::new();
        for ((u, v), f1, f2) in edges() {
            if (u, v) == (X, Y) {
                continue;
            }
            let ae = match pole(&pts[u], &pts[v], self.field) {
                Ok(a) => self.incl(&a),
                Err(_) => DVector::from_element(self.db, 1.0),
            };
            r.extend((&planes[f1] * &ae - &planes[f2] * &ae).iter());
        }
        let ia = self.incl(&self.a0);
        r.extend((&planes[face_index([X, Y, Z1])] * &ia - &self.b0).iter());
        r.extend((&planes[face_index([X, Y, Z2])] * &ia - &self.c0).iter());
        DVector::from_vec(r)
    }

    fn jacobian(&self, p: &DVector<f64>, m: usize) -> DMatrix<f64> {
        let n = p.len();
        let h = 1e-6;
        let mut j = DMatrix::zeros(m, n);
        let mut q = p.clone();
        for c in 0..n {
            q[c] = p[c] + h;
            let rp = self.residual(&q);
            q[c] = p[c] - h;
            let rm = self.residual(&q);
            q[c] = p[c];
            j.set_column(c, &((rp - rm) / (2.0 * h)));
        }
        j
    }

    /// Levenberg–Marquardt from a seeded random start.
    fn solve(&self, seed: u64) -> (DVector<f64>, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n_params();
        let mut p = DVector::from_fn(n, |_, _| {
            let g: f64 = StandardNormal.sample(&mut rng);
            g
        });
        let mut r = self.residual(&p);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-2;
        for _ in 0..400 {
            if cost.sqrt() < SOLVE_TOL * 1e-2 {
                break;
            }
            let j = self.jacobian(&p, r.len());
            let jt = j.transpose();
            let a = &jt * &j;
            let g = &jt * &r;
            let mut improved = false;
            for _ in 0..30 {
                let mut lhs = a.clone();
                for d in 0..n {
                    lhs[(d, d)] += lambda * (1.0 + a[(d, d)]);
                }
                let step = match lhs.cholesky() {
                    Some(ch) => ch.solve(&(-&g)),
                    None => {
                        lambda *= 10.0;
                        continue;
                    }
                };
                let trial = &p + &step;
                let rt = self.residual(&trial);
                let ct = rt.norm_squared();
                if ct < cost {
                    p = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / 5.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (p, cost.sqrt())
    }
}

fn separation(field: GroundField, pts: &[AlgebraElement; 6]) -> f64 {
    edges()
        .iter()
        .map(|((u, v), _, _)| {
            let h = crate::algebra::herm(&pts[*u], &pts[*v], field).norm();
            (1.0 - h * h).max(0.0).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

impl ReferenceDisk {
    /// Solve for the reference disk. Fails for (ℝ,ℍ,ℍ), where orthogonal
    /// primitive loops with L ≠ M are not null-homotopic.
    pub fn solve(case: GeometryCase) -> Result<ReferenceDisk> {
        if case == GeometryCase::HH {
            return Err(Error::NotContractible(
                "in (R,H,H) only primitive loops with L = M are null-homotopic".into(),
            ));
        }
        let prob = Problem::new(case);
        let mut best = f64::INFINITY;
        for attempt in 0..MAX_ATTEMPTS {
            let (p, res) = prob.solve(0x5eed_0000 + attempt);
            best = best.min(res);
            if res > SOLVE_TOL {
                continue;
            }
            let (mats, pts) = prob.unpack(&p);
            let sep = separation(prob.field, &pts);
            if sep < MIN_SEPARATION {
                continue;
            }
            let basis = crate::algebra::k_basis(prob.field, case.a());
            let planes: Vec<Embedding> = mats
                .iter()
                .map(|u| {
                    let images = basis
                        .iter()
                        .map(|g| {
                            let v = u * prob.incl(g);
                            AlgebraElement::new(case.b(), v.as_slice()).expect("target dimension")
                        })
                        .collect();
                    Embedding::from_images(prob.field, case.a(), case.b(), images).expect("valid images")
                })
                .collect();
            let b_basis = case.pure_b_basis();
            let disk = ReferenceDisk {
                case,
                points: pts,
                planes,
                b0: b_basis[0],
                c0: b_basis[1],
                residual: res,
                separation: sep,
                attempt,
            };
            if disk.verify(&Geometry::new(case)).is_ok() {
                return Ok(disk);
            }
        }
        Err(Error::SearchFailed(format!("reference disk solve did not converge (best residual {best:e})")))
    }

    /// Cached solution per case.
    pub fn get(case: GeometryCase) -> Result<&'static ReferenceDisk> {
        static HO: OnceLock<Result<ReferenceDisk>> = OnceLock::new();
        static OO: OnceLock<Result<ReferenceDisk>> = OnceLock::new();
        let cell = match case {
            GeometryCase::HH => {
                return Err(Error::NotContractible(
                    "in (R,H,H) only primitive loops with L = M are null-homotopic".into(),
                ))
            }
            GeometryCase::HO => &HO,
            GeometryCase::OO => &OO,
        };
        cell.get_or_init(|| Self::solve(case)).as_ref().map_err(Clone::clone)
    }

    pub fn a0(&self) -> AlgebraElement {
        self.points[X] * self.points[Y]
    }

    pub fn geometric_points(&self, geo: &Geometry) -> Result<Vec<Point>> {
        self.points.iter().map(|u| geo.point(u)).collect()
    }

    pub fn geometric_planes(&self, geo: &Geometry) -> Result<Vec<Plane>> {
        self.planes.iter().map(|e| geo.plane(e.clone())).collect()
    }

    pub fn l0(&self, geo: &Geometry) -> Result<Line> {
        geo.line(&self.a0(), &self.b0)
    }

    pub fn m0(&self, geo: &Geometry) -> Result<Line> {
        geo.line(&self.a0(), &self.c0)
    }

    /// Check every face incidence with the exact predicates.
    pub fn verify(&self, geo: &Geometry) -> Result<()> {
        let pts = self.geometric_points(geo)?;
        let planes = self.geometric_planes(geo)?;
        for ((u, v), f1, f2) in edges() {
            if (u, v) == (X, Y) {
                continue;
            }
            let l1 = geo.join_in_plane(&pts[u], &pts[v], &planes[f1])?;
            if !geo.line_in_plane(&l1, &planes[f2]) {
                return Err(Error::Incidence(format!("edge ({u},{v}) is not shared by faces {f1} and {f2}")));
            }
        }
        let l0 = self.l0(geo)?;
        let m0 = self.m0(geo)?;
        if !geo.line_in_plane(&l0, &planes[face_index([X, Y, Z1])])
            || !geo.line_in_plane(&m0, &planes[face_index([X, Y, Z2])])
        {
            return Err(Error::Incidence("L0 or M0 is not in its face".into()));
        }
        if !geo.point_on_line(&pts[X], &l0) || !geo.point_on_line(&pts[Y], &m0) {
            return Err(Error::Incidence("reference loop is not incident".into()));
        }
        Ok(())
    }

    /// Contract the loop (x, L, y, V, x) starting at `pos`, where x ⊥ y and the
    /// second components of L and V are orthogonal once their first components agree.
    pub fn contract(&self, w: &mut Worker<'_>, pos: usize) -> Result<()> {
        let geo = *w.geo;
        let seg: Vec<Vertex> = w.path.get(pos..pos + 5).map(<[Vertex]>::to_vec).ok_or_else(|| {
            Error::InvalidMove("loop segment out of range".into())
        })?;
        let (x, l, y, v) = match (&seg[0], &seg[1], &seg[2], &seg[3]) {
            (Vertex::Point(x), Vertex::Line(l), Vertex::Point(y), Vertex::Line(v)) => (*x, *l, *y, *v),
            _ => return Err(Error::Precondition("expected a loop (x, L, y, V, x)".into())),
        };
        if !geo.vertex_eq(&seg[0], &seg[4]) {
            return Err(Error::Precondition("segment is not a loop".into()));
        }
        let ux = *x.rep();
        let uy = *y.rep();
        let a = ux * uy;
        let bt = l.with_first(&a);
        let vt = v.with_first(&a);
        let g = geo.frame_automorphism((&self.points[X], &self.points[Y]), (&ux, &uy), (&self.b0, &self.c0), (&bt, &vt))?;
        let pts: Vec<Point> = self
            .geometric_points(&geo)?
            .iter()
            .map(|p| geo.apply_auto(&g, &Vertex::Point(*p)).map(|v| *v.as_point().unwrap()))
            .collect::<Result<_>>()?;
        let planes: Vec<Plane> = self
            .geometric_planes(&geo)?
            .iter()
            .map(|p| geo.apply_auto(&g, &Vertex::Plane(p.clone())).map(|v| v.as_plane().unwrap().clone()))
            .collect::<Result<_>>()?;
        let l0 = geo.apply_auto(&g, &Vertex::Line(self.l0(&geo)?))?;
        let m0 = geo.apply_auto(&g, &Vertex::Line(self.m0(&geo)?))?;
        if !geo.vertex_eq(&l0, &Vertex::Line(l)) || !geo.vertex_eq(&m0, &Vertex::Line(v)) {
            return Err(Error::Precondition("loop is not an orthogonal digon with orthogonal invariant".into()));
        }
        if !geo.point_eq(&pts[X], &x) || !geo.point_eq(&pts[Y], &y) {
            return Err(Error::Precondition("transported frame does not match the loop".into()));
        }
        let pv = |i: usize| Vertex::Point(pts[i]);
        let line = |p: usize, q: usize, f: [usize; 3]| -> Result<Vertex> {
            Ok(Vertex::Line(geo.join_in_plane(&pts[p], &pts[q], &planes[face_index(f)])?))
        };
        let face = |f: [usize; 3]| &planes[face_index(f)];
        // (x, L, y) → (x, l(x,z1), z1, l(z1,y), y)
        let f = [X, Y, Z1];
        w.residue_replace(pos, 2, &[line(X, Z1, f)?, pv(Z1), line(Z1, Y, f)?], face(f))?;
        // (y, M, x) → (y, l(y,z2), z2, l(z2,x), x)
        let f = [X, Y, Z2];
        w.residue_replace(pos + 4, 2, &[line(Y, Z2, f)?, pv(Z2), line(Z2, X, f)?], face(f))?;
        // (z1, l, y) → (z1, l, x̄, l, y)
        let f = [XB, Y, Z1];
        w.residue_replace(pos + 2, 2, &[line(Z1, XB, f)?, pv(XB), line(XB, Y, f)?], face(f))?;
        // (x̄, l, y, l, z2) → (x̄, l, z2)
        let f = [XB, Y, Z2];
        w.residue_replace(pos + 4, 4, &[line(XB, Z2, f)?], face(f))?;
        // (z1, l, x̄) → (z1, l, ȳ, l, x̄)
        let f = [XB, YB, Z1];
        w.residue_replace(pos + 2, 2, &[line(Z1, YB, f)?, pv(YB), line(YB, XB, f)?], face(f))?;
        // (ȳ, l, x̄, l, z2) → (ȳ, l, z2)
        let f = [XB, YB, Z2];
        w.residue_replace(pos + 4, 4, &[line(YB, Z2, f)?], face(f))?;
        // (x, l, z1, l, ȳ) → (x, l, ȳ)
        let f = [X, YB, Z1];
        w.residue_replace(pos, 4, &[line(X, YB, f)?], face(f))?;
        // (x, l, ȳ, l, z2) → (x, l, z2)
        let f = [X, YB, Z2];
        w.residue_replace(pos, 4, &[line(X, Z2, f)?], face(f))?;
        w.remove_backtrack(pos + 1)?;
        w.remove_backtrack(pos)
    }
}
