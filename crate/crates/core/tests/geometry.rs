use c3_core::algebra::{herm, random_unit_scalar, AlgebraElement, AlgebraTag, Embedding, GroundField};
use c3_core::geometry::{Flag, Geometry, GeometryCase, Vertex};
use c3_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn h(i: usize) -> AlgebraElement {
    AlgebraElement::basis(AlgebraTag::H, i)
}

fn o(i: usize) -> AlgebraElement {
    AlgebraElement::basis(AlgebraTag::O, i)
}

fn ho() -> Geometry {
    Geometry::new(GeometryCase::HO)
}

fn diag(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    (*x + *y).scale(0.5_f64.sqrt())
}

fn any_case() -> impl Strategy<Value = GeometryCase> {
    prop::sample::select(GeometryCase::ALL.to_vec())
}

#[test]
fn point_line_incidence_examples() {
    let g = ho();
    let p = g.point(&h(1)).unwrap();
    assert!(g.point_on_line(&p, &g.line(&h(2), &o(2)).unwrap()));
    assert!(!g.point_on_line(&p, &g.line(&h(1), &o(1)).unwrap()));
    let pi = g.plane(Embedding::inclusion(GroundField::R, AlgebraTag::H, AlgebraTag::O)).unwrap();
    let l = g.line(&h(1), &o(1)).unwrap();
    assert!(g.incident(&Vertex::Line(l), &Vertex::Plane(pi.clone())).unwrap());
    assert!(g.incident(&Vertex::Plane(pi.clone()), &Vertex::Line(l)).unwrap());
}

#[test]
fn every_point_lies_in_every_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in GeometryCase::ALL {
        let g = Geometry::new(case);
        for _ in 0..50 {
            let p = Vertex::Point(g.random_point(&mut rng));
            let pi = Vertex::Plane(g.random_plane(&mut rng));
            assert!(g.incident(&p, &pi).unwrap());
        }
    }
}

#[test]
fn mixed_cases_are_rejected() {
    let g = ho();
    let other = Geometry::new(GeometryCase::HH);
    let p = Vertex::Point(other.point(&h(1)).unwrap());
    let l = Vertex::Line(g.line(&h(2), &o(2)).unwrap());
    assert!(matches!(g.incident(&p, &l), Err(Error::CaseMismatch)));
}

#[test]
fn line_needs_equal_norms_and_pure_components() {
    let g = ho();
    assert!(g.line(&h(1), &o(1).scale(2.0)).is_err());
    assert!(g.line(&h(0), &o(1)).is_err());
    assert!(g.point(&AlgebraElement::zero(AlgebraTag::H)).is_err());
    let l = g.line(&h(1).scale(3.0), &o(1).scale(3.0)).unwrap();
    assert!((l.a().norm() - 1.0).abs() < 1e-15);
}

#[test]
fn coplanarity_examples() {
    let g = ho();
    let l = g.line(&h(1), &o(1)).unwrap();
    let m = g.line(&h(2), &o(2)).unwrap();
    let n = g.line(&diag(&h(1), &h(2)), &o(1)).unwrap();
    assert!(g.coplanar(&l, &m).unwrap());
    assert!(!g.coplanar(&l, &n).unwrap());
    assert!((g.coplanarity_defect(&l, &n) - (1.0 - 0.5_f64.sqrt())).abs() < 1e-12);
    assert!(g.coplanar(&l, &l).unwrap());
}

#[test]
fn common_plane_examples() {
    let g = ho();
    let pi = g
        .common_plane(&g.line(&h(1), &o(1)).unwrap(), &g.line(&h(2), &o(2)).unwrap())
        .unwrap();
    assert!(pi.emb().max_image_diff(&Embedding::inclusion(GroundField::R, AlgebraTag::H, AlgebraTag::O)) < 1e-12);

    let pi = g
        .common_plane(&g.line(&h(1), &o(2)).unwrap(), &g.line(&h(2), &o(4)).unwrap())
        .unwrap();
    assert!(pi.apply(&h(3)).max_abs_diff(&o(6)) < 1e-12);

    let l = g.line(&h(1), &o(1)).unwrap();
    let n = g.line(&diag(&h(1), &h(2)), &o(1)).unwrap();
    assert!(matches!(g.common_plane(&l, &n), Err(Error::NotCoplanar(_))));
    assert!(g.common_plane(&l, &l).is_err());
}

#[test]
fn gq_project_example_matches_grid_scan() {
    let g = ho();
    let p = g.point(&h(1)).unwrap();
    let pi = g.plane(Embedding::inclusion(GroundField::R, AlgebraTag::H, AlgebraTag::O)).unwrap();
    let l = g.line(&h(2), &o(4)).unwrap();
    let sol = g.gq_project(&p, &pi, &l).unwrap();
    assert_eq!(sol.rank, 2);

    // Candidate lines through p in π are [c, φ(c)] with c = cos t·j + sin t·k.
    let steps = 3600;
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for s in 0..steps {
        let t = std::f64::consts::PI * s as f64 / steps as f64;
        let c = h(2).scale(t.cos()) + h(3).scale(t.sin());
        let cand = g.line(&c, &pi.apply(&c)).unwrap();
        let d = g.coplanarity_defect(&cand, &l);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    let c = h(2).scale(best_t.cos()) + h(3).scale(best_t.sin());
    let scanned = g.line(&c, &pi.apply(&c)).unwrap();
    assert!(best < 1e-9);
    assert!(g.line_eq(&sol.line, &scanned));
    assert!(g.line_eq(&sol.line, &g.line(&h(3), &o(3)).unwrap()));
}

#[test]
fn gq_project_rejects_bad_inputs() {
    let g = ho();
    let pi = g.plane(Embedding::inclusion(GroundField::R, AlgebraTag::H, AlgebraTag::O)).unwrap();
    let p = g.point(&h(1)).unwrap();
    let inside = g.line(&h(2), &o(2)).unwrap();
    assert!(matches!(g.gq_project(&p, &pi, &inside), Err(Error::Incidence(_))));
    let off = g.line(&h(1), &o(4)).unwrap();
    assert!(matches!(g.gq_project(&p, &pi, &off), Err(Error::Incidence(_))));
}

#[test]
fn shadows_and_polars() {
    let g = ho();
    let [u, v] = g.point_shadow(&g.line(&h(1), &o(1)).unwrap());
    assert_eq!([u, v], [h(2), h(3)]);
    let [u, v] = g.polar_line(&g.point(&h(1)).unwrap());
    assert_eq!([u, v], [h(2), h(3)]);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in GeometryCase::ALL {
        let g = Geometry::new(case);
        let f = g.field();
        for _ in 0..50 {
            let p = g.random_point(&mut rng);
            let q = g.random_point_on(&g.random_line_through(&p, &mut rng), &mut rng);
            let [x, y] = g.polar_line(&p);
            let in_span = |w: &AlgebraElement, a: &AlgebraElement, b: &AlgebraElement| {
                let r = *w - a.scal(f, herm(a, w, f)) - b.scal(f, herm(b, w, f));
                r.norm() < 1e-9
            };
            let [x2, y2] = g.polar_line(&q);
            assert_eq!(in_span(q.rep(), &x, &y), in_span(p.rep(), &x2, &y2));
            assert_eq!(g.orthogonal(&p, &q), in_span(q.rep(), &x, &y));
        }
    }
}

#[test]
fn automorphism_identity_and_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in GeometryCase::ALL {
        let g = Geometry::new(case);
        let id = g.identity_automorphism();
        let a = g.random_automorphism(&mut rng);
        g.check_automorphism(&a, &mut rng).unwrap();
        let inv = g.inverse_auto(&a).unwrap();
        for _ in 0..20 {
            let f = g.random_flag(&mut rng);
            for v in f.vertices() {
                assert!(g.vertex_eq(&g.apply_auto(&id, &v).unwrap(), &v));
                let back = g.apply_auto(&inv, &g.apply_auto(&a, &v).unwrap()).unwrap();
                assert!(g.vertex_eq(&back, &v), "{case:?}");
            }
        }
    }
}

#[test]
fn flag_transporter_maps_flags() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in GeometryCase::ALL {
        let g = Geometry::new(case);
        let f1 = g.random_flag(&mut rng);
        let same = g.flag_transporter(&f1, &f1).unwrap();
        for v in f1.vertices() {
            assert!(g.vertex_eq(&g.apply_auto(&same, &v).unwrap(), &v));
        }
        let n = if case == GeometryCase::HH { 100 } else { 20 };
        for _ in 0..n {
            let f1 = g.random_flag(&mut rng);
            let f2 = g.random_flag(&mut rng);
            let t = g.flag_transporter(&f1, &f2).unwrap();
            for (v, w) in f1.vertices().iter().zip(f2.vertices()) {
                assert!(g.vertex_eq(&g.apply_auto(&t, v).unwrap(), &w), "{case:?}");
            }
        }
        let partial = Flag { point: f1.point, line: f1.line, plane: None };
        assert!(g.flag_transporter(&partial, &f1).is_err());
    }
}

#[test]
fn plane_residue_is_a_projective_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for case in GeometryCase::ALL {
        let g = Geometry::new(case);
        let pi = g.random_plane(&mut rng);
        for _ in 0..100 {
            let p = g.random_point(&mut rng);
            let q = g.random_point(&mut rng);
            let l = g.join_in_plane(&p, &q, &pi).unwrap();
            assert!(g.point_on_line(&p, &l) && g.point_on_line(&q, &l) && g.line_in_plane(&l, &pi));
            let l2 = g.random_line_in(&pi, &mut rng);
            let m = g.random_line_in(&pi, &mut rng);
            let x = g.meet(&l2, &m).unwrap();
            assert!(g.point_on_line(&x, &l2) && g.point_on_line(&x, &m));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_forms_are_idempotent(case in any_case(), seed in any::<u64>()) {
        let g = Geometry::new(case);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = g.random_point(&mut rng);
        let l = g.random_line(&mut rng);
        let cp = g.canonical_point(&p);
        let cl = g.canonical_line(&l);
        prop_assert!(g.canonical_point(&cp).rep().max_abs_diff(cp.rep()) < 1e-12);
        let ccl = g.canonical_line(&cl);
        prop_assert!(ccl.a().max_abs_diff(cl.a()) < 1e-12 && ccl.b().max_abs_diff(cl.b()) < 1e-12);
    }

    #[test]
    fn coplanarity_ignores_common_scalars(case in any_case(), seed in any::<u64>()) {
        let g = Geometry::new(case);
        let f = g.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = g.random_line(&mut rng);
        let pi = g.random_plane_through(&l, &mut rng);
        let m = g.random_line_in(&pi, &mut rng);
        let n = g.random_line(&mut rng);
        let s = random_unit_scalar(f, &mut rng);
        let ls = g.line(&l.a().scal(f, s), &l.b().scal(f, s)).unwrap();
        prop_assert!(g.line_eq(&l, &ls));
        prop_assert!(g.coplanar(&ls, &m).unwrap());
        prop_assert!((g.coplanarity_defect(&ls, &n) - g.coplanarity_defect(&l, &n)).abs() < 1e-12);
    }

    #[test]
    fn common_plane_contains_both_lines(case in any_case(), seed in any::<u64>()) {
        let g = Geometry::new(case);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = g.random_plane(&mut rng);
        let l = g.random_line_in(&pi, &mut rng);
        let m = g.random_line_in(&pi, &mut rng);
        prop_assume!(herm(l.a(), m.a(), g.field()).norm() < 0.999);
        let xi = g.common_plane(&l, &m).unwrap();
        prop_assert!(g.line_in_plane(&l, &xi) && g.line_in_plane(&m, &xi));
        prop_assert!(g.plane_eq(&xi, &pi) || xi.emb().max_image_diff(pi.emb()) < 1e-7);
    }

    #[test]
    fn gq_project_is_incident_and_stable(case in any_case(), seed in any::<u64>()) {
        let g = Geometry::new(case);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = g.random_point(&mut rng);
        let l = g.random_line_through(&p, &mut rng);
        let pi = g.random_plane(&mut rng);
        prop_assume!(!g.line_in_plane(&l, &pi));
        let sol = g.gq_project(&p, &pi, &l).unwrap();
        prop_assert_eq!(sol.rank, 2);
        prop_assert!(g.point_on_line(&p, &sol.line));
        prop_assert!(g.line_in_plane(&sol.line, &pi));
        prop_assert!(g.coplanar(&sol.line, &l).unwrap());
        let again = g.gq_project(&p, &pi, &l).unwrap();
        prop_assert!(g.line_eq(&again.line, &sol.line));
    }

    #[test]
    fn every_point_is_collinear_with_a_point_of_each_line(case in any_case(), seed in any::<u64>()) {
        let g = Geometry::new(case);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = g.random_point(&mut rng);
        let l = g.random_line(&mut rng);
        let q = g.random_point_on(&l, &mut rng);
        prop_assume!(!g.point_eq(&p, &q));
        let b = g.random_b(&mut rng);
        let joining = g.line_through(&p, &q, &b).unwrap();
        prop_assert!(g.point_on_line(&p, &joining) && g.point_on_line(&q, &joining));
    }

    #[test]
    fn automorphisms_preserve_incidence_and_inner_products(case in any_case(), seed in any::<u64>()) {
        let g = Geometry::new(case);
        let f = g.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = g.random_automorphism(&mut rng);
        let fl = g.random_flag(&mut rng);
        let img: Vec<Vertex> = fl.vertices().iter().map(|v| g.apply_auto(&a, v).unwrap()).collect();
        let refs: Vec<&Vertex> = img.iter().collect();
        prop_assert!(g.is_flag(&refs).unwrap());
        let l = g.random_line(&mut rng);
        let m = g.random_line(&mut rng);
        let gl = g.apply_auto(&a, &Vertex::Line(l)).unwrap();
        let gm = g.apply_auto(&a, &Vertex::Line(m)).unwrap();
        let (gl, gm) = (gl.as_line().unwrap(), gm.as_line().unwrap());
        prop_assert!((g.coplanarity_defect(gl, gm) - g.coplanarity_defect(&l, &m)).abs() < 1e-9);
        prop_assert!((herm(gl.a(), gm.a(), f).norm() - herm(l.a(), m.a(), f).norm()).abs() < 1e-9);
    }
}
