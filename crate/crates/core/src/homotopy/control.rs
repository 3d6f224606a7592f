//! Plane elimination, pinching, the length-four comparison macros, length
//! reduction, and the full two-path reduction with its move budgets.

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Line, Point, Vertex};

use super::path::{EdgePath, MoveLog, Worker};
use super::primitive::{contract_loop_at, transform_at};

/// Default K: the cost bound of one (y, M, z) → (y, N, z) transformation.
pub const DEFAULT_K: usize = 116;

/// C(k) as coefficients (α, β) of α·K + β.
pub fn budget_c_affine(k: usize) -> (usize, usize) {
    match k {
        0 | 1 => (0, 0),
        2 | 3 => (1, 0),
        4 | 5 => (1, 55),
        _ => (k - 3, (k - 4) * 56 + 55),
    }
}

/// C(k) = (k−4)(K+56) + K+55 for k ≥ 6; C(0) = 0, C(2) = K, C(4) = K+55.
pub fn budget_c(k: usize, kk: usize) -> usize {
    let (a, b) = budget_c_affine(k);
    a * kk + b
}

/// D(k) = C(⌊3k/2⌋) + 4 + 6⌊(k+2)/2⌋.
pub fn budget_d(k: usize, kk: usize) -> usize {
    budget_c(3 * k / 2, kk) + 4 + 6 * ((k + 2) / 2)
}

fn point_at(w: &Worker<'_>, i: usize) -> Result<Point> {
    match w.path.get(i) {
        Some(Vertex::Point(p)) => Ok(*p),
        _ => Err(Error::Precondition(format!("vertex {i} is not a point"))),
    }
}

fn line_at(w: &Worker<'_>, i: usize) -> Result<Line> {
    match w.path.get(i) {
        Some(Vertex::Line(l)) => Ok(*l),
        _ => Err(Error::Precondition(format!("vertex {i} is not a line"))),
    }
}

/// Replace the plane at index i (with both neighbours points or lines) by a
/// path of length ≤ 3 in its residue.
fn eliminate_plane_at(w: &mut Worker<'_>, i: usize) -> Result<()> {
    let geo = *w.geo;
    let pi = w.path[i].as_plane().cloned().ok_or_else(|| Error::Precondition("not a plane".into()))?;
    let (u, v) = (w.path[i - 1].clone(), w.path[i + 1].clone());
    match (&u, &v) {
        (Vertex::Point(x), Vertex::Point(y)) => {
            if geo.point_eq(x, y) {
                w.remove_backtrack(i - 1)
            } else {
                let j = geo.join_in_plane(x, y, &pi)?;
                w.replace_plane(i - 1, &[Vertex::Line(j)])
            }
        }
        (Vertex::Point(x), Vertex::Line(l)) | (Vertex::Line(l), Vertex::Point(x)) => {
            if geo.point_on_line(x, l) {
                return w.contract(i - 1);
            }
            let z = geo.point_on_line_orthogonal_to(l, x)?;
            let j = Vertex::Line(geo.join_in_plane(x, &z, &pi)?);
            let z = Vertex::Point(z);
            if u.as_point().is_some() {
                w.replace_plane(i - 1, &[j, z])
            } else {
                w.replace_plane(i - 1, &[z, j])
            }
        }
        (Vertex::Line(l), Vertex::Line(m)) => {
            if geo.line_eq(l, m) {
                w.remove_backtrack(i - 1)
            } else {
                let p = geo.meet(l, m)?;
                w.replace_plane(i - 1, &[Vertex::Point(p)])
            }
        }
        _ => Err(Error::Precondition("adjacent planes".into())),
    }
}

/// Eliminate every plane strictly between index `lo` and the vertex `hi`
/// places before the end.
pub fn eliminate_range(w: &mut Worker<'_>, lo: usize, hi: usize) -> Result<()> {
    let mut i = lo + 1;
    while i + 1 + hi < w.path.len() {
        if w.path[i].is_plane() {
            eliminate_plane_at(w, i)?;
        } else {
            i += 1;
        }
    }
    Ok(())
}

/// A path with only points and lines, homotopic to `p`; at most 3⌊k/2⌋ moves.
pub fn eliminate_planes(geo: &Geometry, p: &EdgePath) -> Result<(EdgePath, MoveLog)> {
    p.validate(geo)?;
    if p.first().is_plane() || p.last().is_plane() {
        return Err(Error::Precondition("path starts or ends at a plane".into()));
    }
    let mut w = Worker::new(geo, p);
    eliminate_range(&mut w, 0, 0)?;
    Ok((w.edge_path(), w.log))
}

/// One pinch at `pos`. Returns true when the segment collapsed to (x, L′, z),
/// which happens when the new middle point would coincide with z.
fn pinch_step(w: &mut Worker<'_>, pos: usize, lp: &Line) -> Result<bool> {
    let geo = *w.geo;
    let x = point_at(w, pos)?;
    let l = line_at(w, pos + 1)?;
    let y = point_at(w, pos + 2)?;
    let m = line_at(w, pos + 3)?;
    let z = point_at(w, pos + 4)?;
    if !geo.point_on_line(&x, lp) {
        return Err(Error::Incidence("L′ does not contain x".into()));
    }
    if geo.line_eq(&l, lp) {
        return Err(Error::Precondition("L′ must differ from L".into()));
    }
    let pi = geo.common_plane(&l, lp)?;
    if geo.line_in_plane(&m, &pi) {
        if geo.line_eq(&m, lp) {
            w.residue_replace(pos, 4, &[Vertex::Line(*lp)], &pi)?;
            return Ok(true);
        }
        let yp = geo.meet(lp, &m)?;
        if geo.point_eq(&yp, &z) {
            w.residue_replace(pos, 4, &[Vertex::Line(*lp)], &pi)?;
            return Ok(true);
        }
        w.residue_replace(pos, 4, &[Vertex::Line(*lp), Vertex::Point(yp), Vertex::Line(m)], &pi)?;
        return Ok(false);
    }
    let n = geo.gq_project(&y, &pi, &m)?.line;
    if geo.line_eq(&n, lp) {
        w.residue_replace(pos, 2, &[Vertex::Line(*lp)], &pi)?;
        return Ok(false);
    }
    let yp = geo.meet(&n, lp)?;
    if geo.point_eq(&yp, &z) {
        w.residue_replace(pos, 2, &[Vertex::Line(*lp), Vertex::Point(z), Vertex::Line(n)], &pi)?;
        contract_loop_at(w, pos + 2)?;
        return Ok(true);
    }
    let xi = geo.common_plane(&n, &m)?;
    let mp = geo.join_in_plane(&yp, &z, &xi)?;
    w.residue_replace(pos, 2, &[Vertex::Line(*lp), Vertex::Point(yp), Vertex::Line(n)], &pi)?;
    w.residue_replace(pos + 2, 4, &[Vertex::Line(mp)], &xi)?;
    Ok(false)
}

/// (x, L, y, M, z) → (x, L′, y′, M′, z) for L′ ∋ x coplanar with and distinct
/// from L; 12 moves. Errors if the pinch degenerates to a path of length two.
pub fn pinch_at(w: &mut Worker<'_>, pos: usize, lp: &Line) -> Result<()> {
    if pinch_step(w, pos, lp)? {
        return Err(Error::IllConditioned("pinch collapsed: the new middle point coincides with z".into()));
    }
    Ok(())
}

pub fn pinch(geo: &Geometry, gamma: &EdgePath, lp: &Line) -> Result<(EdgePath, MoveLog)> {
    gamma.validate(geo)?;
    if gamma.len() != 4 {
        return Err(Error::Precondition("pinch needs a path of length four".into()));
    }
    let mut w = Worker::new(geo, gamma);
    pinch_at(&mut w, 0, lp)?;
    Ok((w.edge_path(), w.log))
}

/// Pinch at most twice so that the first line at `pos` becomes `target`.
/// Returns true if the segment collapsed to (x, L*, z) on the way.
fn align_first_line(w: &mut Worker<'_>, pos: usize, target: &Line) -> Result<bool> {
    let geo = *w.geo;
    let l = line_at(w, pos + 1)?;
    if geo.line_eq(&l, target) {
        return Ok(false);
    }
    if !geo.coplanar(&l, target)? {
        let x = point_at(w, pos)?;
        let pi = geo.plane_through(target)?;
        let mid = geo.gq_project(&x, &pi, &l)?.line;
        if pinch_step(w, pos, &mid)? {
            return Ok(true);
        }
    }
    pinch_step(w, pos, target)
}

/// (x, L, y, M, z) → (x, N, z); at most K + 30 moves.
pub fn four_to_two_at(w: &mut Worker<'_>, pos: usize, n: &Line) -> Result<()> {
    let geo = *w.geo;
    if geo.point_eq(&point_at(w, pos)?, &point_at(w, pos + 4)?) {
        contract_loop_at(w, pos)?;
        return w.insert_backtrack(pos, Vertex::Line(*n));
    }
    if align_first_line(w, pos, n)? {
        return transform_at(w, pos, n);
    }
    transform_at(w, pos + 2, n)?;
    w.remove_backtrack(pos + 1)
}

/// (x, L, y, M, z) → (x, L′, y′, M′, z); at most K + 55 moves.
pub fn four_to_four_at(w: &mut Worker<'_>, pos: usize, lp: &Line, yp: &Point, mp: &Line) -> Result<()> {
    let geo = *w.geo;
    if align_first_line(w, pos, lp)? {
        let x = point_at(w, pos)?;
        let z = point_at(w, pos + 2)?;
        let cur = line_at(w, pos + 1)?;
        let target = vec![Vertex::Point(x), Vertex::Line(*lp), Vertex::Point(*yp), Vertex::Line(*mp), Vertex::Point(z)];
        let mut tw = Worker::new(&geo, &EdgePath::from_vertices_unchecked(target));
        tw.k_budget = w.k_budget;
        four_to_two_at(&mut tw, 0, &cur)?;
        w.k_emp = w.k_emp.max(tw.k_emp);
        return w.apply_shifted(&tw.log.inverse(), pos);
    }
    let y2 = point_at(w, pos + 2)?;
    if geo.point_eq(&y2, yp) {
        return transform_at(w, pos + 2, mp);
    }
    w.insert_backtrack(pos + 1, Vertex::Point(*yp))?;
    four_to_two_at(w, pos + 2, mp)
}

/// Shorten the point–line path starting at `pos` by two; at most K + 56 moves.
pub fn shorten_at(w: &mut Worker<'_>, pos: usize) -> Result<()> {
    let geo = *w.geo;
    let x0 = point_at(w, pos)?;
    let l1 = line_at(w, pos + 1)?;
    let x2 = point_at(w, pos + 4)?;
    let l3 = line_at(w, pos + 5)?;
    let y = geo.point_on_line_orthogonal_to(&l3, &x0)?;
    if geo.point_eq(&y, &x2) {
        let m = geo.line_through(&x0, &x2, l1.b())?;
        return four_to_two_at(w, pos, &m);
    }
    let m = geo.line_through(&x0, &y, l1.b())?;
    four_to_four_at(w, pos, &m, &y, &l3)?;
    w.remove_backtrack(pos + 3)
}

pub fn shorten(geo: &Geometry, p: &EdgePath, k_budget: usize) -> Result<(EdgePath, MoveLog)> {
    p.validate(geo)?;
    if p.has_planes() {
        return Err(Error::Precondition("shorten needs a path of points and lines".into()));
    }
    if p.len() < 6 || p.first().as_point().is_none() {
        return Err(Error::Precondition("shorten needs a point-based path of length at least six".into()));
    }
    let mut w = Worker::new(geo, p).with_k_budget(k_budget);
    shorten_at(&mut w, 0)?;
    Ok((w.edge_path(), w.log))
}

/// Transform the point–line segment of length `src_len` ∈ {0, 2, 4} at `pos`
/// into `target` (same endpoints, length 0, 2 or 4).
fn compare_at(w: &mut Worker<'_>, pos: usize, src_len: usize, target: &[Vertex]) -> Result<()> {
    let geo = *w.geo;
    let tlen = target.len() - 1;
    if src_len < tlen {
        let mut tw = Worker::new(&geo, &EdgePath::from_vertices_unchecked(target.to_vec()));
        tw.k_budget = w.k_budget;
        let source: Vec<Vertex> = w.path[pos..=pos + src_len].to_vec();
        compare_at(&mut tw, 0, tlen, &source)?;
        w.k_emp = w.k_emp.max(tw.k_emp);
        return w.apply_shifted(&tw.log.inverse(), pos);
    }
    let line = |i: usize| target[i].as_line().copied().ok_or_else(|| Error::Precondition("expected a line".into()));
    match (src_len, tlen) {
        (0, 0) => Ok(()),
        (2, 0) => w.remove_backtrack(pos),
        (2, 2) => {
            if geo.point_eq(&point_at(w, pos)?, &point_at(w, pos + 2)?) {
                let l = line_at(w, pos + 1)?;
                if !geo.line_eq(&l, &line(1)?) {
                    w.remove_backtrack(pos)?;
                    w.insert_backtrack(pos, target[1].clone())?;
                }
                Ok(())
            } else {
                transform_at(w, pos, &line(1)?)
            }
        }
        (4, 0) => contract_loop_at(w, pos),
        (4, 2) => four_to_two_at(w, pos, &line(1)?),
        (4, 4) => {
            let yp = target[2].as_point().copied().ok_or_else(|| Error::Precondition("expected a point".into()))?;
            four_to_four_at(w, pos, &line(1)?, &yp, &line(3)?)
        }
        _ => Err(Error::Precondition(format!("cannot compare lengths {src_len} and {tlen}"))),
    }
}

/// Outcome of `reduce`: a verified move log from p to q and its accounting.
#[derive(Clone, Debug, PartialEq)]
pub struct ReduceOutcome {
    pub log: MoveLog,
    pub k: usize,
    pub k_budget: usize,
    pub bound_d: usize,
    /// Largest single transformation cost observed (the empirical K).
    pub k_emp: usize,
    pub normalization_moves: usize,
    pub elimination_moves: usize,
    pub shortening_moves: usize,
    pub comparison_moves: usize,
}

impl ReduceOutcome {
    pub fn total(&self) -> usize {
        self.log.len()
    }

    pub fn within_budget(&self) -> bool {
        self.total() <= self.bound_d
    }
}

/// A point incident with a line or plane, chosen deterministically.
fn anchor_point(geo: &Geometry, v: &Vertex) -> Result<Point> {
    match v {
        Vertex::Point(p) => Ok(*p),
        Vertex::Line(l) => geo.point(&geo.point_shadow(l)[0]),
        Vertex::Plane(_) => geo.point(&geo.case.pure_a_basis()[0]),
    }
}

struct Side<'g> {
    w: Worker<'g>,
    normalization: usize,
    elimination: usize,
    shortening: usize,
}

/// Remove every backtrack (u, v, u) lying between `lo` and `hi` places before the end.
fn free_reduce_range(w: &mut Worker<'_>, lo: usize, hi: usize) -> Result<()> {
    let geo = *w.geo;
    let mut i = lo;
    while i + 2 + hi < w.path.len() {
        if geo.vertex_eq(&w.path[i], &w.path[i + 2]) {
            w.remove_backtrack(i)?;
            i = i.saturating_sub(2).max(lo);
        } else {
            i += 1;
        }
    }
    Ok(())
}

fn prepare<'g>(geo: &'g Geometry, p: &EdgePath, k_budget: usize, start: &Option<Point>, end: &Option<Point>) -> Result<Side<'g>> {
    let mut w = Worker::new(geo, p).with_k_budget(k_budget);
    if let Some(x) = start {
        w.insert_backtrack(0, Vertex::Point(*x))?;
    }
    if let Some(y) = end {
        let last = w.path.len() - 1;
        w.insert_backtrack(last, Vertex::Point(*y))?;
    }
    let normalization = w.log.len();
    let (lo, hi) = (start.is_some() as usize, end.is_some() as usize);
    eliminate_range(&mut w, lo, hi)?;
    free_reduce_range(&mut w, lo, hi)?;
    let elimination = w.log.len() - normalization;
    Ok(Side { w, normalization, elimination, shortening: 0 })
}

fn shorten_side(side: &mut Side<'_>, lo: usize, hi: usize) -> Result<()> {
    let before = side.w.log.len();
    while side.w.path.len() - 1 - lo - hi >= 6 {
        shorten_at(&mut side.w, lo)?;
    }
    side.shortening = side.w.log.len() - before;
    Ok(())
}

/// A verified move log transforming p into q (same extremities), following
/// endpoint normalization, plane elimination, backtrack removal, shortening,
/// and comparison. Shortening and comparison are skipped when both sides
/// already agree after backtrack removal.
pub fn reduce(geo: &Geometry, p: &EdgePath, q: &EdgePath, k_budget: usize) -> Result<ReduceOutcome> {
    p.validate(geo)?;
    q.validate(geo)?;
    if !geo.vertex_eq(p.first(), q.first()) || !geo.vertex_eq(p.last(), q.last()) {
        return Err(Error::Precondition("paths do not share their endpoints".into()));
    }
    let k = p.len().max(q.len());
    let bound_d = budget_d(k, k_budget);
    let mut outcome = ReduceOutcome {
        log: MoveLog::new(),
        k,
        k_budget,
        bound_d,
        k_emp: 0,
        normalization_moves: 0,
        elimination_moves: 0,
        shortening_moves: 0,
        comparison_moves: 0,
    };
    if p.approx_eq(q, geo) {
        return Ok(outcome);
    }
    let start = match p.first() {
        Vertex::Point(_) => None,
        v => Some(anchor_point(geo, v)?),
    };
    let end = match p.last() {
        Vertex::Point(_) => None,
        v => Some(anchor_point(geo, v)?),
    };
    let (lo, hi) = (start.is_some() as usize, end.is_some() as usize);
    let mut sp = prepare(geo, p, k_budget, &start, &end)?;
    let mut sq = prepare(geo, q, k_budget, &start, &end)?;
    let mut cmp = Worker { geo, path: sp.w.path.clone(), log: MoveLog::new(), k_emp: 0, k_budget: Some(k_budget) };
    if !sp.w.edge_path().approx_eq(&sq.w.edge_path(), geo) {
        shorten_side(&mut sp, lo, hi)?;
        shorten_side(&mut sq, lo, hi)?;
        cmp.path = sp.w.path.clone();
        let src_len = cmp.path.len() - 1 - lo - hi;
        let target: Vec<Vertex> = sq.w.path[lo..sq.w.path.len() - hi].to_vec();
        compare_at(&mut cmp, lo, src_len, &target)?;
    }
    let mut log = sp.w.log.clone();
    log.append(&cmp.log);
    log.append(&sq.w.log.inverse());
    log.verify(geo, p, q)?;
    outcome.k_emp = sp.w.k_emp.max(sq.w.k_emp).max(cmp.k_emp);
    outcome.normalization_moves = sp.normalization + sq.normalization;
    outcome.elimination_moves = sp.elimination + sq.elimination;
    outcome.shortening_moves = sp.shortening + sq.shortening;
    outcome.comparison_moves = cmp.log.len();
    outcome.log = log;
    Ok(outcome)
}
