//! Primitive loops (x, L, y, M, x): orthogonalization, the PL-invariant,
//! PL-reduction, and contraction to the trivial path.

use crate::algebra::{embed, first_orthogonal, AlgebraElement, GroundField, KScalar};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryCase, Line, Plane, Point, Vertex};

use super::path::{EdgePath, MoveLog, Worker};
use super::refdisk::ReferenceDisk;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitivePath {
    pub x: Point,
    pub l: Line,
    pub y: Point,
    pub m: Line,
}

impl PrimitivePath {
    pub fn new(geo: &Geometry, x: Point, l: Line, y: Point, m: Line) -> Result<Self> {
        if geo.point_eq(&x, &y) {
            return Err(Error::Precondition("primitive path needs two distinct points".into()));
        }
        if geo.line_eq(&l, &m) {
            return Err(Error::Precondition("primitive path needs two distinct lines".into()));
        }
        for (p, line) in [(&x, &l), (&y, &l), (&x, &m), (&y, &m)] {
            if !geo.point_on_line(p, line) {
                return Err(Error::Incidence("primitive path incidence fails".into()));
            }
        }
        Ok(PrimitivePath { x, l, y, m })
    }

    /// Read (x, L, y, M, x) from a slice of five vertices.
    pub fn from_vertices(geo: &Geometry, v: &[Vertex]) -> Result<Self> {
        match v {
            [Vertex::Point(x), Vertex::Line(l), Vertex::Point(y), Vertex::Line(m), last] => {
                if !geo.vertex_eq(&v[0], last) {
                    return Err(Error::Precondition("path is not closed".into()));
                }
                Self::new(geo, *x, *l, *y, *m)
            }
            _ => Err(Error::Precondition("expected (point, line, point, line, point)".into())),
        }
    }

    pub fn to_edge_path(&self) -> EdgePath {
        EdgePath::from_vertices_unchecked(vec![
            Vertex::Point(self.x),
            Vertex::Line(self.l),
            Vertex::Point(self.y),
            Vertex::Line(self.m),
            Vertex::Point(self.x),
        ])
    }
}

/// Loop at `pos`, possibly degenerate (x = y or L = M).
pub(crate) fn loop_at(w: &Worker<'_>, pos: usize) -> Result<(Point, Line, Point, Line)> {
    let v = w.path.get(pos..pos + 5).ok_or_else(|| Error::InvalidMove("loop segment out of range".into()))?;
    match v {
        [Vertex::Point(x), Vertex::Line(l), Vertex::Point(y), Vertex::Line(m), last] if w.geo.vertex_eq(&v[0], last) => {
            Ok((*x, *l, *y, *m))
        }
        _ => Err(Error::Precondition("expected a loop (x, L, y, M, x)".into())),
    }
}

/// The twelve-move exchange of (x, L, y, M, x) for (x, L′, y′, M′, x) through
/// planes π_L ⊇ {L, N, L′}, π_M ⊇ {M, N, M′}, with N ∋ y, y′.
#[allow(clippy::too_many_arguments)]
fn exchange(
    w: &mut Worker<'_>,
    pos: usize,
    pi_l: &Plane,
    pi_m: &Plane,
    n: &Line,
    yp: &Point,
    lp: &Line,
    mp: &Line,
) -> Result<()> {
    w.expand(pos + 1, Vertex::Plane(pi_l.clone()))?;
    w.contract(pos)?;
    w.expand(pos + 2, Vertex::Plane(pi_m.clone()))?;
    w.contract(pos + 3)?;
    w.expand(pos + 1, Vertex::Line(*n))?;
    w.contract(pos + 2)?;
    w.expand(pos + 1, Vertex::Point(*yp))?;
    w.contract(pos + 2)?;
    w.expand(pos, Vertex::Line(*lp))?;
    w.contract(pos + 1)?;
    w.expand(pos + 3, Vertex::Line(*mp))?;
    w.contract(pos + 2)
}

/// Replace the loop at `pos` by one whose two points are orthogonal (≤ 12 moves).
pub fn orthogonalize_at(w: &mut Worker<'_>, pos: usize) -> Result<()> {
    let geo = *w.geo;
    let (x, l, y, m) = loop_at(w, pos)?;
    if geo.orthogonal(&x, &y) {
        return Ok(());
    }
    let pi_m = geo.plane_through(&m)?;
    let n = geo.gq_project(&y, &pi_m, &l)?.line;
    let pi_l = geo.common_plane(&l, &n)?;
    let yp = geo.point_on_line_orthogonal_to(&n, &x)?;
    let lp = geo.join_in_plane(&x, &yp, &pi_l)?;
    let mp = geo.join_in_plane(&x, &yp, &pi_m)?;
    exchange(w, pos, &pi_l, &pi_m, &n, &yp, &lp, &mp)
}

pub fn orthogonalize_primitive(geo: &Geometry, pp: &PrimitivePath) -> Result<(PrimitivePath, MoveLog)> {
    let mut w = Worker::new(geo, &pp.to_edge_path());
    orthogonalize_at(&mut w, 0)?;
    let out = PrimitivePath::from_vertices(geo, &w.path)?;
    Ok((out, w.log))
}

/// Second components of L and M with the common first component u_x·u_y.
fn frame_components(geo: &Geometry, pp: &PrimitivePath) -> Result<(AlgebraElement, AlgebraElement, AlgebraElement)> {
    if !geo.orthogonal(&pp.x, &pp.y) {
        return Err(Error::Precondition("the PL-invariant needs orthogonal points".into()));
    }
    let a2 = *pp.x.rep() * *pp.y.rep();
    Ok((a2, pp.l.with_first(&a2), pp.m.with_first(&a2)))
}

/// (b|c) for L = [a″, b], M = [a″, c] with a″ = u_x·u_y.
pub fn pl_invariant(geo: &Geometry, pp: &PrimitivePath) -> Result<KScalar> {
    let (_, b, c) = frame_components(geo, pp)?;
    Ok(crate::algebra::herm(&b, &c, geo.field()))
}

/// PL-reduction: for a unimodular non-real invariant l, the homotopic loop
/// (x, L′, y′, M′, x) with invariant Re(l), reached in 12 moves.
pub fn pl_reduce(geo: &Geometry, pp: &PrimitivePath, l: KScalar) -> Result<(PrimitivePath, MoveLog)> {
    if geo.field() != GroundField::C {
        return Err(Error::Precondition("unimodular non-real scalars need k = C".into()));
    }
    if (l.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("|l| = {} is not 1", l.norm())));
    }
    if (l - 1.0).norm() < 1e-9 || (l + 1.0).norm() < 1e-9 {
        return Err(Error::Precondition("l must differ from ±1".into()));
    }
    let inv = pl_invariant(geo, pp)?;
    if (inv - l).norm() > 1e-7 {
        return Err(Error::Precondition(format!("path has invariant {inv}, not {l}")));
    }
    let f = geo.field();
    let (a, a1) = (*pp.x.rep(), *pp.y.rep());
    let (a2, b, _) = frame_components(geo, pp)?;
    let b1 = first_orthogonal(f, geo.case.b(), &[b])?;
    let b2 = b * b1;
    let phi = embed(&a, &a1, &b1, &b2, f, 1e-8)?;
    let psi = embed(&a, &a1, &b1, &b2.scal(f, l.conj()), f, 1e-8)?;
    let pi_l = geo.plane(phi)?;
    let pi_m = geo.plane(psi)?;
    if pi_l.apply(&a2).dist(&b) > 1e-8 || pi_m.apply(&a2).dist(&b.scal(f, l)) > 1e-8 {
        return Err(Error::Precondition("frame embeddings do not carry a″ to b and b·l".into()));
    }
    let d = (a1 + a2).scale(std::f64::consts::FRAC_1_SQRT_2);
    let yp = geo.point(&(a1 - a2))?;
    let n = geo.line(&a, &b1)?;
    let lp = geo.line(&d, &pi_l.apply(&d))?;
    let mp = geo.line(&d, &pi_m.apply(&d))?;
    let mut w = Worker::new(geo, &pp.to_edge_path());
    exchange(&mut w, 0, &pi_l, &pi_m, &n, &yp, &lp, &mp)?;
    let out = PrimitivePath::from_vertices(geo, &w.path)?;
    Ok((out, w.log))
}

/// Contract the loop at `pos` to its base point. At most 114 moves:
/// orthogonalize (12), split through [a, v] with v ⊥ b, c (2), and two
/// transported reference contractions (50 each).
pub fn contract_loop_at(w: &mut Worker<'_>, pos: usize) -> Result<()> {
    let geo = *w.geo;
    let (x, l, y, m) = loop_at(w, pos)?;
    if geo.point_eq(&x, &y) {
        w.remove_backtrack(pos)?;
        return w.remove_backtrack(pos);
    }
    if geo.line_eq(&l, &m) {
        w.remove_backtrack(pos + 1)?;
        return w.remove_backtrack(pos);
    }
    orthogonalize_at(w, pos)?;
    let (x, l, y, m) = loop_at(w, pos)?;
    if geo.line_eq(&l, &m) {
        w.remove_backtrack(pos + 1)?;
        return w.remove_backtrack(pos);
    }
    if geo.case == GeometryCase::HH {
        return Err(Error::NotContractible(format!(
            "orthogonal primitive loop with invariant {} in (R,H,H)",
            pl_invariant(&geo, &PrimitivePath::new(&geo, x, l, y, m)?)?
        )));
    }
    let disk = ReferenceDisk::get(geo.case)?;
    let pp = PrimitivePath::new(&geo, x, l, y, m)?;
    let (a2, b, c) = frame_components(&geo, &pp)?;
    let tau = crate::algebra::herm(&b, &c, geo.field());
    if tau.norm() <= 0.1 * geo.tol {
        return disk.contract(w, pos);
    }
    let v = if tau.norm() > 1.0 - 1e-9 {
        first_orthogonal(geo.field(), geo.case.b(), &[b])?
    } else {
        geo.pole(&b, &c)?
    };
    let split = Vertex::Line(geo.line(&a2, &v)?);
    w.insert_backtrack(pos + 2, split)?;
    w.insert_backtrack(pos + 3, Vertex::Point(x))?;
    disk.contract(w, pos)?;
    disk.contract(w, pos)
}

pub fn contract_primitive(geo: &Geometry, pp: &PrimitivePath) -> Result<MoveLog> {
    let mut w = Worker::new(geo, &pp.to_edge_path());
    contract_loop_at(&mut w, 0)?;
    Ok(w.log)
}

/// (y, M, z) → (y, N, z) for a line N through y and z. At most K = 116 moves.
pub fn transform_at(w: &mut Worker<'_>, pos: usize, n: &Line) -> Result<()> {
    let geo = *w.geo;
    let seg = w.path.get(pos..pos + 3).ok_or_else(|| Error::InvalidMove("segment out of range".into()))?;
    let (y, m, z) = match seg {
        [Vertex::Point(y), Vertex::Line(m), Vertex::Point(z)] => (*y, *m, *z),
        _ => return Err(Error::Precondition("expected (point, line, point)".into())),
    };
    if !geo.point_on_line(&y, n) || !geo.point_on_line(&z, n) {
        return Err(Error::Incidence("target line does not contain both endpoints".into()));
    }
    if geo.line_eq(&m, n) {
        return Ok(());
    }
    let start = w.log.len();
    if geo.point_eq(&y, &z) {
        w.remove_backtrack(pos)?;
        w.insert_backtrack(pos, Vertex::Line(*n))?;
    } else {
        w.insert_backtrack(pos, Vertex::Line(*n))?;
        w.insert_backtrack(pos + 1, Vertex::Point(z))?;
        contract_loop_at(w, pos + 2)?;
    }
    let used = w.log.len() - start;
    w.k_emp = w.k_emp.max(used);
    match w.k_budget {
        Some(k) if used > k => Err(Error::BudgetExceeded { used, budget: k }),
        _ => Ok(()),
    }
}
