//! Seeded verification checks. Each check draws its own samples from the
//! generator it is handed and returns one `CheckRecord`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    embed, herm, project_out, random_element, random_unit_pure, random_unit_scalar, AlgebraElement, AlgebraTag,
    GroundField, KScalar,
};
use crate::covering::{bilinear_b, free_action_check, h_act_coords, quadratic_form, IsoclinicElement, QuadricPoint};
use crate::error::Error;
use crate::geometry::{Geometry, GeometryCase, Line, Point, Vertex};
use crate::homotopy::{
    budget_c, budget_c_affine, budget_d, contract_primitive, diam_connect, eliminate_planes, orthogonalize_primitive,
    pinch, pl_invariant, pl_reduce, reduce, shorten, EdgePath, MoveLog, PrimitivePath, Worker,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    /// Total number of elementary moves logged by the check.
    pub moves: usize,
    pub counterexample: Option<String>,
}

/// One reduce experiment: path length bound, logged total, and D(k).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReduceRecord {
    pub k: usize,
    pub total: usize,
    pub bound: usize,
    pub k_emp: usize,
}

/// A reduce experiment kept for the move-log side files.
#[derive(Clone, Debug)]
pub struct ReduceExperiment {
    pub source: EdgePath,
    pub target: EdgePath,
    pub log: MoveLog,
}

struct Tracker {
    name: String,
    tol: f64,
    samples: usize,
    max_error: f64,
    moves: usize,
    counterexample: Option<String>,
}

impl Tracker {
    fn new(name: impl Into<String>, tol: f64) -> Self {
        Tracker { name: name.into(), tol, samples: 0, max_error: 0.0, moves: 0, counterexample: None }
    }

    fn observe(&mut self, err: f64, what: impl FnOnce() -> String) {
        if err.is_nan() || err > self.tol {
            self.fail(format!("error {err:e}: {}", what()));
        }
        if !err.is_nan() {
            self.max_error = self.max_error.max(err);
        } else {
            self.max_error = f64::INFINITY;
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        if self.counterexample.is_none() {
            self.counterexample = Some(format!("sample {}: {msg}", self.samples));
        }
    }

    fn finish(self) -> CheckRecord {
        CheckRecord {
            passed: self.counterexample.is_none() && self.samples > 0,
            name: self.name,
            samples: self.samples,
            max_error: self.max_error,
            tolerance: self.tol,
            moves: self.moves,
            counterexample: self.counterexample,
        }
    }
}

/// | |xy|² − |x|²|y|² | ≤ tol·(1 + |x|²|y|²) over random pairs.
pub fn check_composition(tag: AlgebraTag, samples: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let mut t = Tracker::new(format!("algebra.composition.{tag}"), tol);
    for _ in 0..samples {
        let x = random_element(tag, rng);
        let y = random_element(tag, rng);
        let p = x.norm2() * y.norm2();
        let err = ((x * y).norm2() - p).abs() / (1.0 + p);
        t.observe(err, || format!("x = {:?}, y = {:?}", x.coeffs(), y.coeffs()));
        t.samples += 1;
    }
    t.finish()
}

/// Re(x|y) = ⟨x,y⟩, (x|x) = |x|², |(x|y)| ≤ |x||y|, equality on y = x·l, and
/// the exact gap |x|²|z|² for y = x·l + z with z ⊥ x·k.
pub fn check_hermitian(field: GroundField, tag: AlgebraTag, samples: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let mut t = Tracker::new(format!("algebra.hermitian.{field:?}.{tag}"), tol);
    for _ in 0..samples {
        let x = random_element(tag, rng);
        let y = random_element(tag, rng);
        let h = herm(&x, &y, field);
        let scale = 1.0 + x.norm() * y.norm();
        t.observe((h.re - x.bilinear(&y)).abs() / scale, || "Re (x|y) differs from <x,y>".into());
        t.observe((herm(&x, &x, field) - Complex64::new(x.norm2(), 0.0)).norm() / (1.0 + x.norm2()), || {
            "(x|x) differs from |x|^2".into()
        });
        t.observe((h.norm() - x.norm() * y.norm()).max(0.0) / scale, || "Cauchy-Schwarz violated".into());
        let l = random_unit_scalar(field, rng) * rng.random_range(0.2..2.0);
        let xl = x.scal(field, l);
        t.observe((herm(&x, &xl, field).norm() - x.norm() * xl.norm()).abs() / (1.0 + x.norm() * xl.norm()), || {
            "equality fails on a dependent pair".into()
        });
        let z = project_out(&random_element(tag, rng), &[x.normalized()], field);
        if z.norm() > 1e-6 && tag != AlgebraTag::R && !(tag == AlgebraTag::C && field == GroundField::C) {
            let s: f64 = rng.random_range(0.1..1.0);
            let z = z.scale(s / z.norm());
            let y2 = xl + z;
            let gap = x.norm2() * y2.norm2() - herm(&x, &y2, field).norm_sqr();
            let expect = x.norm2() * s * s;
            t.observe((gap - expect).abs() / (1.0 + x.norm2() * y2.norm2()), || {
                format!("independent pair gap {gap:e}, expected {expect:e}")
            });
            t.require(gap > 0.0, || "strict inequality fails on an independent pair".into());
        }
        t.samples += 1;
    }
    t.finish()
}

/// Unit d ∈ Pu_k(tag) with (b|d) = τ, from a random direction orthogonal to b.
fn unit_with_inner(field: GroundField, tag: AlgebraTag, b: &AlgebraElement, tau: KScalar, rng: &mut ChaCha8Rng) -> AlgebraElement {
    if tau.norm() > 1.0 - 1e-12 {
        return b.scal(field, tau / tau.norm());
    }
    loop {
        let w = project_out(&random_unit_pure(field, tag, rng).expect("pure part"), &[*b], field);
        if w.norm() > 1e-3 {
            let s = (1.0 - tau.norm_sqr()).max(0.0).sqrt();
            return b.scal(field, tau) + w.scale(s / w.norm());
        }
    }
}

/// embed(a, c, b, d) maps a ↦ b, c ↦ d, is multiplicative and isometric, and
/// rejects proportional pairs.
pub fn check_embed(case: GeometryCase, samples: usize, pairs: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let f = case.field();
    let mut t = Tracker::new(format!("algebra.embed.{}", case.name()), tol);
    for _ in 0..samples {
        let a = random_unit_pure(f, case.a(), rng).expect("pure");
        let c = random_unit_pure(f, case.a(), rng).expect("pure");
        let b = random_unit_pure(f, case.b(), rng).expect("pure");
        let tau = herm(&a, &c, f);
        let d = unit_with_inner(f, case.b(), &b, tau, rng);
        match embed(&a, &c, &b, &d, f, 1e-9) {
            Ok(phi) => {
                t.observe(phi.apply(&a).dist(&b), || "a is not mapped to b".into());
                t.observe(phi.apply(&c).dist(&d), || "c is not mapped to d".into());
                t.observe(phi.multiplicativity_error(rng, pairs), || "map is not multiplicative".into());
                t.observe(phi.isometry_defect(), || "map is not isometric".into());
            }
            Err(e) => t.fail(format!("embed failed on an admissible quadruple: {e}")),
        }
        let l = random_unit_scalar(f, rng);
        let rejected = matches!(embed(&a, &a.scal(f, l), &b, &d, f, 1e-9), Err(Error::ProportionalPair));
        t.require(rejected, || "proportional pair was accepted".into());
        t.samples += 1;
    }
    t.finish()
}

fn line_with_inner(geo: &Geometry, l: &Line, rng: &mut ChaCha8Rng, shift: KScalar) -> (Line, AlgebraElement, AlgebraElement) {
    let f = geo.field();
    let c = random_unit_pure(f, geo.case.a(), rng).expect("pure");
    let tau = herm(l.a(), &c, f) + shift;
    let d = unit_with_inner(f, geo.case.b(), l.b(), tau, rng);
    (geo.line(&c, &d).expect("unit pure"), c, d)
}

/// Coplanarity: pairs with (a|c) = (b|d) lie in a common plane; pairs off by
/// at least 1e-3 admit no plane.
pub fn check_coplanarity(case: GeometryCase, samples: usize, tol: f64, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let geo = Geometry::new(case);
    let f = geo.field();
    let mut pos = Tracker::new(format!("geometry.coplanar.{}", case.name()), tol);
    let mut neg = Tracker::new(format!("geometry.noncoplanar.{}", case.name()), 0.0);
    for _ in 0..samples {
        let l = geo.random_line(rng);
        let (m, c, d) = line_with_inner(&geo, &l, rng, Complex64::new(0.0, 0.0));
        match geo.common_plane(&l, &m) {
            Ok(pi) => {
                pos.observe(pi.apply(l.a()).dist(l.b()).min(pi.apply(l.a()).dist(&l.b().scale(-1.0))), || {
                    "common plane misses L".into()
                });
                pos.require(geo.line_in_plane(&l, &pi) && geo.line_in_plane(&m, &pi), || {
                    "common plane does not contain both lines".into()
                });
                pos.observe(pi.apply(&c).dist(&d), || "common plane does not map c to d".into());
            }
            Err(e) => pos.fail(format!("common_plane failed on a coplanar pair: {e}")),
        }
        pos.samples += 1;

        let tau = herm(l.a(), &c, f);
        let shift = loop {
            let z = random_unit_scalar(f, rng) * rng.random_range(1e-3..0.5);
            if (tau + z).norm() < 1.0 - 1e-3 && z.norm() >= 1e-3 {
                break z;
            }
        };
        let (m2, c2, d2) = {
            let d = unit_with_inner(f, case.b(), l.b(), tau + shift, rng);
            (geo.line(&c, &d).expect("unit pure"), c, d)
        };
        let defect = geo.coplanarity_defect(&l, &m2);
        neg.require(defect >= 1e-3 * (1.0 - 1e-9), || format!("defect {defect:e} below 1e-3"));
        neg.require(!geo.coplanar(&l, &m2).unwrap_or(true), || "criterion reports coplanar".into());
        neg.require(geo.common_plane(&l, &m2).is_err(), || "a common plane was built".into());
        neg.require(embed(l.a(), &c2, l.b(), &d2, f, 1e-9).is_err(), || "an embedding maps L and M2 together".into());
        neg.samples += 1;
    }
    vec![pos.finish(), neg.finish()]
}

/// gq_project on (point, plane, non-incident line): rank 2, and the output
/// passes the incidence and coplanarity predicates.
pub fn check_gq(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("geometry.gq_project.{}", case.name()), geo.tol);
    while t.samples < samples {
        let pi = geo.random_plane(rng);
        let l = geo.random_line(rng);
        if geo.line_in_plane(&l, &pi) {
            continue;
        }
        let p = geo.random_point_on(&l, rng);
        match geo.gq_project(&p, &pi, &l) {
            Ok(sol) => {
                t.require(sol.rank == 2, || format!("rank {}", sol.rank));
                t.require(geo.point_on_line(&p, &sol.line), || "output misses p".into());
                t.require(geo.line_in_plane(&sol.line, &pi), || "output is not in the plane".into());
                t.observe(geo.coplanarity_defect(&sol.line, &l), || "output is not coplanar with L".into());
            }
            Err(e) => t.fail(format!("gq_project failed: {e}")),
        }
        t.samples += 1;
    }
    t.finish()
}

/// Projective-plane residue: joins and meets in a random plane.
pub fn check_plane_residue(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("geometry.plane_residue.{}", case.name()), geo.tol);
    for _ in 0..samples {
        let pi = geo.random_plane(rng);
        let p = geo.random_point(rng);
        let q = geo.random_point(rng);
        match geo.join_in_plane(&p, &q, &pi) {
            Ok(j) => t.require(
                geo.point_on_line(&p, &j) && geo.point_on_line(&q, &j) && geo.line_in_plane(&j, &pi),
                || "join is not incident with p, q and the plane".into(),
            ),
            Err(e) => t.fail(format!("join failed: {e}")),
        }
        let l = geo.random_line_in(&pi, rng);
        let m = geo.random_line_in(&pi, rng);
        match geo.meet(&l, &m) {
            Ok(x) => t.require(geo.point_on_line(&x, &l) && geo.point_on_line(&x, &m), || "meet misses a line".into()),
            Err(e) => t.fail(format!("meet failed: {e}")),
        }
        t.samples += 1;
    }
    t.finish()
}

/// Random automorphisms are automorphisms of both algebras and carry flags to flags.
pub fn check_automorphisms(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("geometry.automorphism.{}", case.name()), 1e-7);
    for _ in 0..samples {
        let g = geo.random_automorphism(rng);
        if let Err(e) = geo.check_automorphism(&g, rng) {
            t.fail(e.to_string());
        }
        let flag = geo.random_flag(rng);
        let vs: Vec<Vertex> = flag.vertices();
        match vs.iter().map(|v| geo.apply_auto(&g, v)).collect::<Result<Vec<_>, _>>() {
            Ok(img) => {
                let refs: Vec<&Vertex> = img.iter().collect();
                t.require(geo.is_flag(&refs).unwrap_or(false), || "image of a flag is not a flag".into());
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// B(p, g·p) = 1 − Re(g) at p = (1,0,0,1,0,0,0), and Q preserved by h_act.
pub fn check_covering_base_point(samples: usize, delta: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let mut t = Tracker::new("covering.base_point", 1e-12);
    let p = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    for _ in 0..samples {
        let g = IsoclinicElement::random_away_from_identity(rng, delta);
        let gp = h_act_coords(&g, &p);
        let b = bilinear_b(&p, &gp);
        t.observe((b - (1.0 - g.real_part())).abs(), || "B(p, g p) differs from 1 - Re g".into());
        t.require(b >= delta * (1.0 - 1e-12), || format!("B(p, g p) = {b:e} below {delta:e}"));
        t.observe(quadratic_form(&gp).abs(), || "Q not preserved".into());
        t.samples += 1;
    }
    let id = h_act_coords(&IsoclinicElement::identity(), &p);
    t.observe(id.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max), || "identity moves p".into());
    t.finish()
}

/// Sampled freeness over random quadric points.
pub fn check_free_action(samples: usize, delta: f64, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let r = free_action_check(samples, delta, rng);
    let mut free = Tracker::new("covering.free_action", 1e-9);
    free.samples = r.samples;
    free.observe(r.max_identity_error, || "B(p, g p) differs from 1 - Re g".into());
    free.require(r.min_abs_b >= delta * (1.0 - 1e-9), || format!("min |B| = {:e} below {delta:e}", r.min_abs_b));
    let mut q = Tracker::new("covering.q_preserved", 1e-12);
    q.samples = r.samples;
    q.observe(r.max_q_drift, || "Q drifts under h_act".into());
    let mut quad = Tracker::new("covering.quadric_points", 1e-12);
    for _ in 0..samples.min(1000) {
        let p = crate::covering::random_quadric_point(rng);
        quad.observe(quadratic_form(p.coords()).abs(), || "sampled point is off the quadric".into());
        quad.require(QuadricPoint::new(*p.coords(), 1e-9).is_ok(), || "point fails validation".into());
        quad.samples += 1;
    }
    vec![free.finish(), q.finish(), quad.finish()]
}

// ---------------------------------------------------------------- homotopy

fn random_primitive(geo: &Geometry, rng: &mut ChaCha8Rng) -> PrimitivePath {
    loop {
        let x = geo.random_point(rng);
        let l = geo.random_line_through(&x, rng);
        let y = geo.random_point_on(&l, rng);
        let Ok(m) = geo.line_through(&x, &y, &geo.random_b(rng)) else { continue };
        if let Ok(pp) = PrimitivePath::new(geo, x, l, y, m) {
            return pp;
        }
    }
}

/// Point–line path through the given points, with random line directions.
fn path_through(geo: &Geometry, pts: &[Point], rng: &mut ChaCha8Rng) -> EdgePath {
    let mut v = vec![Vertex::Point(pts[0])];
    for w in pts.windows(2) {
        let l = if geo.point_eq(&w[0], &w[1]) {
            geo.random_line_through(&w[0], rng)
        } else {
            geo.line_through(&w[0], &w[1], &geo.random_b(rng)).expect("distinct points")
        };
        v.push(Vertex::Line(l));
        v.push(Vertex::Point(w[1]));
    }
    EdgePath::new(geo, v).expect("valid path")
}

/// Random loop of length 2m at x0.
pub fn random_loop(geo: &Geometry, x0: &Point, m: usize, rng: &mut ChaCha8Rng) -> EdgePath {
    let mut pts = vec![*x0];
    pts.extend((1..m).map(|_| geo.random_point(rng)));
    pts.push(*x0);
    path_through(geo, &pts, rng)
}

/// Random walk of length k through all vertex types, ending off a plane.
pub fn random_walk(geo: &Geometry, k: usize, rng: &mut ChaCha8Rng) -> EdgePath {
    let mut v = vec![Vertex::Point(geo.random_point(rng))];
    while v.len() <= k || v.last().is_some_and(Vertex::is_plane) {
        let next = geo.random_neighbor(v.last().unwrap(), rng);
        v.push(next);
    }
    EdgePath::new(geo, v).expect("valid walk")
}

/// q = p followed by n random backtrack insertions (at points and lines) and
/// plane expansions of point–line edges.
pub fn perturb(geo: &Geometry, p: &EdgePath, n: usize, rng: &mut ChaCha8Rng) -> EdgePath {
    let mut w = Worker::new(geo, p);
    let mut done = 0;
    while done < n {
        let pos = rng.random_range(0..w.path.len());
        if rng.random_bool(0.5) && pos + 1 < w.path.len() {
            if let (Vertex::Point(_), Vertex::Line(l)) | (Vertex::Line(l), Vertex::Point(_)) = (&w.path[pos], &w.path[pos + 1]) {
                let pi = geo.random_plane_through(l, rng);
                if w.expand(pos, Vertex::Plane(pi)).is_ok() {
                    done += 1;
                }
                continue;
            }
        }
        if w.path[pos].is_plane() {
            continue;
        }
        let nb = geo.random_neighbor(&w.path[pos], rng);
        if w.insert_backtrack(pos, nb).is_ok() {
            done += 1;
        }
    }
    w.edge_path()
}

/// Random moves followed by their inverse log restore the path; every move
/// keeps it valid; the log survives serialization.
pub fn check_moves(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.moves.{}", case.name()), 0.0);
    for _ in 0..samples {
        let k = rng.random_range(1..6);
        let p = random_walk(&geo, k, rng);
        let mut w = Worker::new(&geo, &p);
        for _ in 0..4 {
            let pos = rng.random_range(0..w.path.len());
            let nb = geo.random_neighbor(&w.path[pos], rng);
            w.insert_backtrack(pos, nb).expect("neighbours are incident");
            let pos = rng.random_range(0..w.path.len() - 1);
            if let (Vertex::Point(_), Vertex::Line(l)) | (Vertex::Line(l), Vertex::Point(_)) = (&w.path[pos], &w.path[pos + 1]) {
                let pi = geo.random_plane_through(l, rng);
                w.expand(pos, Vertex::Plane(pi)).expect("flag");
            }
        }
        let log = w.log.clone();
        t.moves += log.len();
        match log.replay(&geo, &p) {
            Ok(r) => {
                t.require(r.approx_eq(&w.edge_path(), &geo), || "replay differs from the worker path".into());
                t.require(r.validate(&geo).is_ok(), || "replayed path is invalid".into());
                t.require(geo.vertex_eq(r.first(), p.first()) && geo.vertex_eq(r.last(), p.last()), || {
                    "endpoints moved".into()
                });
                match log.inverse().replay(&geo, &r) {
                    Ok(back) => t.require(back.approx_eq(&p, &geo), || "inverse log does not restore the path".into()),
                    Err(e) => t.fail(e.to_string()),
                }
            }
            Err(e) => t.fail(e.to_string()),
        }
        match MoveLog::from_jsonl(&geo, &log.to_jsonl()) {
            Ok(back) => t.require(back.len() == log.len() && back.verify(&geo, &p, &w.edge_path()).is_ok(), || {
                "serialized log does not replay".into()
            }),
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// eliminate_planes: no planes left, length ≤ ⌊3k/2⌋, log ≤ 3⌊k/2⌋, replay valid.
pub fn check_eliminate_planes(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.eliminate_planes.{}", case.name()), 0.0);
    for _ in 0..samples {
        let k0 = rng.random_range(2..11);
        let p = random_walk(&geo, k0, rng);
        let k = p.len();
        match eliminate_planes(&geo, &p) {
            Ok((out, log)) => {
                t.moves += log.len();
                t.require(!out.has_planes(), || "planes remain".into());
                t.require(out.len() <= 3 * k / 2, || format!("length {} > 3k/2 for k = {k}", out.len()));
                t.require(log.len() <= 3 * (k / 2), || format!("log {} > 3 floor(k/2) for k = {k}", log.len()));
                t.require(log.verify(&geo, &p, &out).is_ok(), || "log does not replay".into());
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// orthogonalize_primitive: ≤ 12 moves, orthogonal output, replay valid.
pub fn check_orthogonalize(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.orthogonalize.{}", case.name()), geo.tol);
    for _ in 0..samples {
        let pp = random_primitive(&geo, rng);
        match orthogonalize_primitive(&geo, &pp) {
            Ok((out, log)) => {
                t.moves += log.len();
                t.require(log.len() <= 12, || format!("{} moves", log.len()));
                t.observe(herm(out.x.rep(), out.y.rep(), geo.field()).norm(), || "output points not orthogonal".into());
                t.require(geo.point_eq(&out.x, &pp.x), || "base point moved".into());
                t.require(log.verify(&geo, &pp.to_edge_path(), &out.to_edge_path()).is_ok(), || "log does not replay".into());
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// pinch: exactly 12 moves, first line L′, endpoints kept, replay valid.
pub fn check_pinch(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.pinch.{}", case.name()), 0.0);
    while t.samples < samples {
        let x = geo.random_point(rng);
        let l = geo.random_line_through(&x, rng);
        let y = geo.random_point_on(&l, rng);
        let m = geo.random_line_through(&y, rng);
        let z = geo.random_point_on(&m, rng);
        let pi = geo.random_plane_through(&l, rng);
        let q = geo.random_point(rng);
        let Ok(lp) = geo.join_in_plane(&x, &q, &pi) else { continue };
        if herm(l.a(), lp.a(), geo.field()).norm() > 1.0 - 1e-6 {
            continue;
        }
        let gamma = EdgePath::new(&geo, vec![Vertex::Point(x), Vertex::Line(l), Vertex::Point(y), Vertex::Line(m), Vertex::Point(z)])
            .expect("valid path");
        match pinch(&geo, &gamma, &lp) {
            Ok((out, log)) => {
                t.moves += log.len();
                t.require(log.len() == 12, || format!("{} moves", log.len()));
                t.require(out.len() == 4, || "output length is not 4".into());
                t.require(geo.vertex_eq(&out.vertices()[1], &Vertex::Line(lp)), || "first line is not L'".into());
                t.require(log.verify(&geo, &gamma, &out).is_ok(), || "log does not replay".into());
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// Orthogonal primitive path with PL-invariant l: x = ⟨a⟩, y = ⟨a′⟩,
/// L = [a·a′, b], M = [a·a′, c] with (b|c) = l (c = b·l when |l| = 1).
pub fn primitive_with_invariant(geo: &Geometry, l: KScalar, rng: &mut ChaCha8Rng) -> PrimitivePath {
    let a = geo.random_a(rng);
    let a1 = geo.random_a_orthogonal(rng, &[a]);
    let a2 = a * a1;
    let b = geo.random_b(rng);
    let x = geo.point(&a).expect("unit");
    let y = geo.point(&a1).expect("unit");
    let lm = geo.line(&a2, &b).expect("unit");
    let c = unit_with_inner(geo.field(), geo.case.b(), &b, l, rng);
    let mm = geo.line(&a2, &c).expect("unit");
    PrimitivePath { x, l: lm, y, m: mm }
}

/// PL-invariant: −1 on [a″, b], [a″, −b], and unchanged by random automorphisms.
pub fn check_pl_invariant(case: GeometryCase, samples: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let f = geo.field();
    let mut t = Tracker::new(format!("homotopy.pl_invariant.{}", case.name()), 1e-9);
    for _ in 0..samples {
        let pp = primitive_with_invariant(&geo, Complex64::new(-1.0, 0.0), rng);
        match pl_invariant(&geo, &pp) {
            Ok(v) => t.observe((v + 1.0).norm(), || format!("invariant {v} for c = -b")),
            Err(e) => t.fail(e.to_string()),
        }
        let l = random_unit_scalar(f, rng) * rng.random_range(0.0..1.0);
        let pp = primitive_with_invariant(&geo, l, rng);
        let g = geo.random_automorphism(rng);
        let img = |v: Vertex| geo.apply_auto(&g, &v);
        let moved = (|| -> crate::error::Result<PrimitivePath> {
            Ok(PrimitivePath {
                x: *img(Vertex::Point(pp.x))?.as_point().unwrap(),
                l: *img(Vertex::Line(pp.l))?.as_line().unwrap(),
                y: *img(Vertex::Point(pp.y))?.as_point().unwrap(),
                m: *img(Vertex::Line(pp.m))?.as_line().unwrap(),
            })
        })();
        match (pl_invariant(&geo, &pp), moved.and_then(|q| pl_invariant(&geo, &q))) {
            (Ok(v), Ok(w)) => {
                t.observe((v - l).norm(), || format!("invariant {v}, built with {l}"));
                t.observe((v - w).norm(), || format!("invariant {v} moved to {w}"));
            }
            (Err(e), _) | (_, Err(e)) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// pl_reduce: output invariant Re(l), 12 moves, replay valid. Needs k = ℂ.
pub fn check_pl_reduce(case: GeometryCase, samples: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.pl_reduce.{}", case.name()), tol);
    for i in 0..samples {
        let theta: f64 = if i == 0 { std::f64::consts::FRAC_PI_2 } else { rng.random_range(0.05..std::f64::consts::PI - 0.05) };
        let theta = if rng.random_bool(0.5) { theta } else { -theta };
        let l = Complex64::from_polar(1.0, theta);
        let pp = primitive_with_invariant(&geo, l, rng);
        match pl_reduce(&geo, &pp, l) {
            Ok((out, log)) => {
                t.moves += log.len();
                t.require(log.len() == 12, || format!("{} moves", log.len()));
                match pl_invariant(&geo, &out) {
                    Ok(v) => t.observe((v - Complex64::new(l.re, 0.0)).norm(), || format!("invariant {v}, expected {}", l.re)),
                    Err(e) => t.fail(e.to_string()),
                }
                t.require(log.verify(&geo, &pp.to_edge_path(), &out.to_edge_path()).is_ok(), || "log does not replay".into());
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// diam_connect: every step equals l, length ≤ 4n, endpoints b and c.
pub fn check_diam(case: GeometryCase, samples: usize, tol: f64, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let f = geo.field();
    let mut t = Tracker::new(format!("homotopy.diam_connect.{}", case.name()), tol);
    for i in 0..samples {
        let b = geo.random_b(rng);
        let l = random_unit_scalar(f, rng) * rng.random_range(0.05..0.95);
        let c = match i % 4 {
            0 => unit_with_inner(f, case.b(), &b, l * l, rng),
            1 => unit_with_inner(f, case.b(), &b, Complex64::new(0.0, 0.0), rng),
            2 => b,
            _ => geo.random_b(rng),
        };
        match diam_connect(f, &b, &c, l) {
            Ok(ch) => {
                t.observe(ch.step_error(f, l), || format!("step error with l = {l}"));
                t.require(ch.steps() <= 4 * ch.n, || format!("{} steps > 4n = {}", ch.steps(), 4 * ch.n));
                t.require(ch.steps() >= 1, || "empty chain".into());
                t.observe(ch.chain[0].dist(&b).max(ch.chain[ch.steps()].dist(&c)), || "chain endpoints differ".into());
                if i % 4 == 0 {
                    t.require(ch.steps() == 2, || "(b|c) = l^2 did not give two steps".into());
                }
                if i % 4 == 1 {
                    t.require(ch.steps() <= 2 * ch.n, || "orthogonal pair took more than 2n steps".into());
                }
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// Primitive contraction: ≤ K − 2 moves in (ℝ,ℍ,𝕆) and (ℂ,𝕆,𝕆); in (ℝ,ℍ,ℍ)
/// loops with L ≠ M are reported as not contractible.
pub fn check_primitive_contraction(case: GeometryCase, samples: usize, k_budget: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.primitive_contraction.{}", case.name()), 0.0);
    for _ in 0..samples {
        let pp = random_primitive(&geo, rng);
        let res = contract_primitive(&geo, &pp);
        if case == GeometryCase::HH {
            t.require(matches!(res, Err(Error::NotContractible(_))), || "loop with L != M was contracted".into());
        } else {
            match res {
                Ok(log) => {
                    t.moves += log.len();
                    t.require(log.len() + 2 <= k_budget, || format!("{} moves with K = {k_budget}", log.len()));
                    t.require(log.verify(&geo, &pp.to_edge_path(), &EdgePath::single(Vertex::Point(pp.x))).is_ok(), || {
                        "log does not replay".into()
                    });
                }
                Err(e) => t.fail(e.to_string()),
            }
        }
        t.samples += 1;
    }
    t.finish()
}

/// shorten on random point–line paths of length 6 or 8: length drops by 2,
/// ≤ K + 56 moves, endpoints kept, replay valid.
pub fn check_shorten(case: GeometryCase, samples: usize, k_budget: usize, rng: &mut ChaCha8Rng) -> CheckRecord {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.shorten.{}", case.name()), 0.0);
    for i in 0..samples {
        let pts: Vec<Point> = (0..=3 + i % 2).map(|_| geo.random_point(rng)).collect();
        let p = path_through(&geo, &pts, rng);
        match shorten(&geo, &p, k_budget) {
            Ok((out, log)) => {
                t.moves += log.len();
                t.require(out.len() + 2 == p.len(), || format!("length {} from {}", out.len(), p.len()));
                t.require(log.len() <= k_budget + 56, || format!("{} moves > K + 56", log.len()));
                t.require(log.verify(&geo, &p, &out).is_ok(), || "log does not replay".into());
            }
            Err(e) => t.fail(e.to_string()),
        }
        t.samples += 1;
    }
    t.finish()
}

/// C(k) and D(k) as affine functions of a symbolic K, for k ≤ 64.
pub fn check_budget_arithmetic() -> CheckRecord {
    let mut t = Tracker::new("homotopy.budget_arithmetic", 0.0);
    for k in 0..=64usize {
        let (a, b) = budget_c_affine(k);
        let expect = match k {
            0 | 1 => (0, 0),
            2 | 3 => (1, 0),
            4 | 5 => (1, 55),
            _ => ((k - 4) + 1, (k - 4) * 56 + 55),
        };
        t.require((a, b) == expect, || format!("C({k}) = {a}K + {b}"));
        for kk in [0usize, 1, 116, 1000] {
            t.require(budget_c(k, kk) == a * kk + b, || format!("C({k}) at K = {kk}"));
            let d = budget_d(k, kk);
            t.require(d == budget_c(3 * k / 2, kk) + 4 + 6 * ((k + 2) / 2), || format!("D({k}) at K = {kk}"));
        }
        t.samples += 1;
    }
    t.finish()
}

/// Outcome of the reduce experiments.
#[derive(Clone, Debug)]
pub struct ReduceSummary {
    pub record: CheckRecord,
    pub runs: Vec<ReduceRecord>,
    pub experiments: Vec<ReduceExperiment>,
}

/// Reduce on random loop pairs of length ≤ 8. In (ℝ,ℍ,ℍ) the target is a
/// perturbation of the source; elsewhere every third pair is, and the others
/// are independent loops at the same base point.
pub fn check_reduce(case: GeometryCase, samples: usize, k_budget: usize, rng: &mut ChaCha8Rng) -> ReduceSummary {
    let geo = Geometry::new(case);
    let mut t = Tracker::new(format!("homotopy.reduce.{}", case.name()), 0.0);
    let mut runs = Vec::new();
    let mut experiments = Vec::new();
    for i in 0..samples {
        let x0 = geo.random_point(rng);
        let m = rng.random_range(1..=4);
        let p = random_loop(&geo, &x0, m, rng);
        let q = if case == GeometryCase::HH || i % 3 == 0 {
            let n = if p.len() <= 4 { 2 } else { 1 };
            perturb(&geo, &p, n, rng)
        } else {
            random_loop(&geo, &x0, rng.random_range(1..=4), rng)
        };
        let q = if q.len() > 8 { p.clone() } else { q };
        match reduce(&geo, &p, &q, k_budget) {
            Ok(o) => {
                t.moves += o.total();
                t.require(o.within_budget(), || format!("total {} > D({}) = {}", o.total(), o.k, o.bound_d));
                t.require(o.k_emp <= k_budget, || format!("K_emp {} > K_budget {k_budget}", o.k_emp));
                t.require(o.log.verify(&geo, &p, &q).is_ok(), || "log does not replay".into());
                runs.push(ReduceRecord { k: o.k, total: o.total(), bound: o.bound_d, k_emp: o.k_emp });
                experiments.push(ReduceExperiment { source: p, target: q, log: o.log });
            }
            Err(e) => t.fail(format!("p of length {}, q of length {}: {e}", p.len(), q.len())),
        }
        t.samples += 1;
    }
    ReduceSummary { record: t.finish(), runs, experiments }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn tracker_reports_first_failure() {
        let mut t = Tracker::new("x", 1.0);
        t.observe(0.5, || unreachable!());
        t.samples += 1;
        t.observe(2.0, || "first".into());
        t.observe(3.0, || "second".into());
        let r = t.finish();
        assert!(!r.passed);
        assert_eq!(r.max_error, 3.0);
        assert!(r.counterexample.unwrap().contains("first"));
    }

    #[test]
    fn empty_check_does_not_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(!check_composition(AlgebraTag::O, 0, 1e-9, &mut rng).passed);
    }
}
