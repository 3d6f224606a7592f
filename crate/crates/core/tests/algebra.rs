use c3_core::algebra::{
    conj, embed, extend_to_automorphism, hermitian, k_decompose, mul, orthonormal_complete, project_out,
    random_element, random_unit_pure, AlgebraElement, AlgebraTag, Embedding, GroundField, KScalar,
};
use c3_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn e(tag: AlgebraTag, i: usize) -> AlgebraElement {
    AlgebraElement::basis(tag, i)
}

fn el(tag: AlgebraTag, c: &[f64]) -> AlgebraElement {
    AlgebraElement::new(tag, c).unwrap()
}

// Hamilton product written out by hand, independent of the doubling code.
fn hamilton(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

fn qconj(p: [f64; 4]) -> [f64; 4] {
    [p[0], -p[1], -p[2], -p[3]]
}

// (x + y e)(u + v e) = (xu − v̄y) + (vx + yū)e over the Hamilton product.
fn octonion_oracle(p: &[f64], q: &[f64]) -> [f64; 8] {
    let x = [p[0], p[1], p[2], p[3]];
    let y = [p[4], p[5], p[6], p[7]];
    let u = [q[0], q[1], q[2], q[3]];
    let v = [q[4], q[5], q[6], q[7]];
    let xu = hamilton(x, u);
    let vy = hamilton(qconj(v), y);
    let vx = hamilton(v, x);
    let yu = hamilton(y, qconj(u));
    let mut out = [0.0; 8];
    for i in 0..4 {
        out[i] = xu[i] - vy[i];
        out[4 + i] = vx[i] + yu[i];
    }
    out
}

fn close(x: &AlgebraElement, y: &AlgebraElement, tol: f64) -> bool {
    x.max_abs_diff(y) <= tol
}

fn kclose(x: KScalar, y: KScalar) -> bool {
    (x - y).norm() <= TOL
}

#[test]
fn quaternion_units_multiply_cyclically() {
    let h = AlgebraTag::H;
    assert_eq!(mul(&e(h, 1), &e(h, 2)).unwrap(), e(h, 3));
    assert_eq!(mul(&e(h, 2), &e(h, 3)).unwrap(), e(h, 1));
    assert_eq!(mul(&e(h, 3), &e(h, 1)).unwrap(), e(h, 2));
    assert_eq!(mul(&e(h, 2), &e(h, 1)).unwrap(), -e(h, 3));
    assert_eq!(mul(&e(h, 1), &e(h, 1)).unwrap(), -e(h, 0));
}

#[test]
fn e4_times_e1_is_minus_e5() {
    let o = AlgebraTag::O;
    assert_eq!(mul(&e(o, 4), &e(o, 1)).unwrap(), -e(o, 5));
    assert_eq!(mul(&e(o, 1), &e(o, 4)).unwrap(), e(o, 5));
}

#[test]
fn octonion_table_matches_doubling_oracle() {
    let o = AlgebraTag::O;
    for i in 0..8 {
        for j in 0..8 {
            let got = mul(&e(o, i), &e(o, j)).unwrap();
            let want = octonion_oracle(e(o, i).coeffs(), e(o, j).coeffs());
            assert_eq!(got.coeffs(), &want[..], "e{i} e{j}");
        }
    }
}

#[test]
fn random_products_match_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let x = random_element(AlgebraTag::O, &mut rng);
        let y = random_element(AlgebraTag::O, &mut rng);
        let want = octonion_oracle(x.coeffs(), y.coeffs());
        assert!(close(&(x * y), &el(AlgebraTag::O, &want), 1e-12));

        let p = random_element(AlgebraTag::H, &mut rng);
        let q = random_element(AlgebraTag::H, &mut rng);
        let c = p.coeffs();
        let d = q.coeffs();
        let want = hamilton([c[0], c[1], c[2], c[3]], [d[0], d[1], d[2], d[3]]);
        assert!(close(&(p * q), &el(AlgebraTag::H, &want), 1e-12));

        let z = random_element(AlgebraTag::C, &mut rng);
        let w = random_element(AlgebraTag::C, &mut rng);
        let zc = KScalar::new(z.coeff(0), z.coeff(1)) * KScalar::new(w.coeff(0), w.coeff(1));
        assert!(close(&(z * w), &el(AlgebraTag::C, &[zc.re, zc.im]), 1e-12));
    }
}

#[test]
fn octonions_are_not_associative() {
    let o = AlgebraTag::O;
    let lhs = (e(o, 1) * e(o, 2)) * e(o, 4);
    let rhs = e(o, 1) * (e(o, 2) * e(o, 4));
    assert!(close(&lhs, &-rhs, 0.0));
}

#[test]
fn one_is_a_two_sided_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for tag in AlgebraTag::ALL {
        let x = random_element(tag, &mut rng);
        let one = AlgebraElement::one(tag);
        assert_eq!(one * x, x);
        assert_eq!(x * one, x);
    }
}

#[test]
fn mismatched_tags_are_rejected() {
    let r = mul(&e(AlgebraTag::H, 1), &e(AlgebraTag::O, 1));
    assert!(matches!(r, Err(Error::TagMismatch(..))));
    assert!(hermitian(&e(AlgebraTag::H, 1), &e(AlgebraTag::O, 1), GroundField::R).is_err());
    assert!(AlgebraElement::new(AlgebraTag::H, &[1.0, 2.0]).is_err());
}

#[test]
fn conjugation_norm_and_bilinear_examples() {
    let c = AlgebraTag::C;
    assert_eq!(conj(&el(c, &[1.0, 1.0])), el(c, &[1.0, -1.0]));
    assert_eq!(el(AlgebraTag::H, &[1.0, 1.0, 1.0, 1.0]).norm2(), 4.0);
    assert_eq!(e(AlgebraTag::H, 2).bilinear(&e(AlgebraTag::H, 3)), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_element(AlgebraTag::O, &mut rng);
    let y = random_element(AlgebraTag::O, &mut rng);
    let polar = 0.5 * ((x + y).norm2() - x.norm2() - y.norm2());
    assert!((polar - x.bilinear(&y)).abs() < 1e-12);
}

#[test]
fn k_decompose_examples() {
    let h = AlgebraTag::H;
    let (l, p) = k_decompose(&el(h, &[2.0, 3.0, 5.0, 0.0]), GroundField::C).unwrap();
    assert_eq!(l, KScalar::new(2.0, 3.0));
    assert_eq!(p, el(h, &[0.0, 0.0, 5.0, 0.0]));

    let pure = el(h, &[0.0, 0.0, 1.0, 2.0]);
    let (l, p) = k_decompose(&pure, GroundField::C).unwrap();
    assert_eq!(l, KScalar::new(0.0, 0.0));
    assert_eq!(p, pure);

    let (l, p) = k_decompose(&el(h, &[7.0, 0.0, 0.0, 0.0]), GroundField::R).unwrap();
    assert_eq!(l, KScalar::new(7.0, 0.0));
    assert_eq!(p, AlgebraElement::zero(h));

    assert!(k_decompose(&el(AlgebraTag::R, &[1.0]), GroundField::C).is_err());
}

#[test]
fn hermitian_examples_in_octonions_over_c() {
    let o = AlgebraTag::O;
    let f = GroundField::C;
    assert!(kclose(hermitian(&e(o, 2), &e(o, 2), f).unwrap(), KScalar::new(1.0, 0.0)));
    assert!(kclose(hermitian(&e(o, 2), &e(o, 3), f).unwrap(), KScalar::new(0.0, -1.0)));
    assert!(kclose(hermitian(&e(o, 2), &e(o, 4), f).unwrap(), KScalar::new(0.0, 0.0)));
}

#[test]
fn complex_scalars_commute_past_pure_elements_by_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = GroundField::C;
    let o = AlgebraTag::O;
    for _ in 0..100 {
        let x = random_unit_pure(f, o, &mut rng).unwrap();
        let l = KScalar::new(rng_f(&mut rng), rng_f(&mut rng));
        let lx = AlgebraElement::from_k(o, f, l) * x;
        let xl = x.scal(f, l.conj());
        assert!(close(&lx, &xl, 1e-12));
    }
}

#[test]
fn right_multiplication_by_e1_preserves_the_complex_complement() {
    let o = AlgebraTag::O;
    for i in [2, 3, 4, 5, 6, 7] {
        let y = e(o, i) * e(o, 1);
        assert!(y.k_part(GroundField::C).norm() == 0.0, "e{i}·e1 = {y:?}");
    }
}

fn rng_f(rng: &mut ChaCha8Rng) -> f64 {
    random_element(AlgebraTag::R, rng).coeff(0)
}

#[test]
fn orthonormal_completion_uses_fixed_order() {
    let (f, h) = (GroundField::R, AlgebraTag::H);
    let full = orthonormal_complete(f, h, &[], TOL).unwrap();
    assert_eq!(full, vec![e(h, 1), e(h, 2), e(h, 3)]);
    let full = orthonormal_complete(f, h, &[e(h, 1)], TOL).unwrap();
    assert_eq!(full, vec![e(h, 1), e(h, 2), e(h, 3)]);

    let s = 0.5_f64.sqrt();
    let u = el(h, &[0.0, s, s, 0.0]);
    let full = orthonormal_complete(f, h, &[u], TOL).unwrap();
    assert_eq!(full.len(), 3);
    assert_eq!(full[0], u);
    for (i, a) in full.iter().enumerate() {
        for (j, b) in full.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(kclose(hermitian(a, b, f).unwrap(), KScalar::new(want, 0.0)));
        }
    }

    let dependent = [e(h, 1), e(h, 1)];
    assert!(matches!(orthonormal_complete(f, h, &dependent, TOL), Err(Error::Dependent(_))));
}

#[test]
fn embed_canonical_inclusion() {
    let (h, o) = (AlgebraTag::H, AlgebraTag::O);
    let phi = embed(&e(h, 1), &e(h, 2), &e(o, 1), &e(o, 2), GroundField::R, TOL).unwrap();
    assert!(close(&phi.apply(&e(h, 3)), &e(o, 3), 1e-12));
    assert!(phi.max_image_diff(&Embedding::inclusion(GroundField::R, h, o)) < 1e-12);
}

#[test]
fn embed_to_e2_e4_sends_k_to_e6() {
    let (h, o) = (AlgebraTag::H, AlgebraTag::O);
    let phi = embed(&e(h, 1), &e(h, 2), &e(o, 2), &e(o, 4), GroundField::R, TOL).unwrap();
    assert_eq!(e(o, 2) * e(o, 4), e(o, 6));
    assert!(close(&phi.apply(&e(h, 3)), &e(o, 6), 1e-12));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(phi.multiplicativity_error(&mut rng, 100) < 1e-12);
}

#[test]
fn embed_rejects_bad_inputs() {
    let (h, o) = (AlgebraTag::H, AlgebraTag::O);
    let r = embed(&e(h, 1), &e(h, 1), &e(o, 1), &e(o, 1), GroundField::R, TOL);
    assert!(matches!(r, Err(Error::ProportionalPair)));
    let r = embed(&e(h, 1), &e(h, 1).scale(2.0), &e(o, 1), &e(o, 1).scale(2.0), GroundField::R, TOL);
    assert!(r.is_err());

    let s = 0.5_f64.sqrt();
    let c = el(h, &[0.0, s, s, 0.0]);
    let r = embed(&e(h, 1), &c, &e(o, 1), &e(o, 2), GroundField::R, TOL);
    assert!(matches!(r, Err(Error::InnerProductMismatch(_))));

    let r = embed(&e(h, 0), &e(h, 2), &e(o, 1), &e(o, 2), GroundField::R, TOL);
    assert!(r.is_err());
}

#[test]
fn extend_identity_with_e4_is_identity() {
    let o = AlgebraTag::O;
    let phi = Embedding::inclusion(GroundField::R, AlgebraTag::H, o);
    let psi = extend_to_automorphism(&phi, &e(o, 4), TOL).unwrap();
    assert!(psi.max_image_diff(&Embedding::identity(GroundField::R, o)) < 1e-12);
}

#[test]
fn extend_identity_with_e5_moves_e4_to_e5() {
    let o = AlgebraTag::O;
    let phi = Embedding::inclusion(GroundField::R, AlgebraTag::H, o);
    let psi = extend_to_automorphism(&phi, &e(o, 5), TOL).unwrap();
    assert!(close(&psi.apply(&e(o, 4)), &e(o, 5), 1e-12));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    assert!(psi.multiplicativity_error(&mut rng, 100) < 1e-12);
    assert!(extend_to_automorphism(&phi, &e(o, 1), TOL).is_err());
}

#[test]
fn inverse_and_compose_of_automorphisms() {
    let o = AlgebraTag::O;
    let f = GroundField::C;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_unit_pure(f, o, &mut rng).unwrap();
    let c = random_unit_pure(f, o, &mut rng).unwrap();
    let b = random_unit_pure(f, o, &mut rng).unwrap();
    let d = dependent_partner(f, &b, hermitian(&a, &c, f).unwrap(), &mut rng);
    let phi = embed(&a, &c, &b, &d, f, 1e-8).unwrap();
    let id = phi.inverse().unwrap().compose(&phi).unwrap();
    assert!(id.max_image_diff(&Embedding::identity(f, o)) < 1e-10);
}

fn dependent_partner(f: GroundField, b: &AlgebraElement, tau: KScalar, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let w = loop {
        let r = random_unit_pure(f, b.tag(), rng).unwrap();
        let p = project_out(&r, &[*b], f);
        if p.norm() > 1e-3 {
            break p.normalized();
        }
    };
    b.scal(f, tau) + w.scale((1.0 - tau.norm_sqr()).max(0.0).sqrt())
}

fn element(tag: AlgebraTag) -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec(-10.0f64..10.0, tag.dim()).prop_map(move |c| AlgebraElement::new(tag, &c).unwrap())
}

fn tag_and_pair() -> impl Strategy<Value = (AlgebraElement, AlgebraElement)> {
    prop::sample::select(AlgebraTag::ALL.to_vec()).prop_flat_map(|t| (element(t), element(t)))
}

fn case_field() -> impl Strategy<Value = (GroundField, AlgebraTag)> {
    prop::sample::select(vec![
        (GroundField::R, AlgebraTag::H),
        (GroundField::R, AlgebraTag::O),
        (GroundField::C, AlgebraTag::O),
        (GroundField::C, AlgebraTag::H),
    ])
}

proptest! {
    #[test]
    fn norm_is_multiplicative((x, y) in tag_and_pair()) {
        let lhs = (x * y).norm2();
        let rhs = x.norm2() * y.norm2();
        prop_assert!((lhs - rhs).abs() <= TOL * (1.0 + rhs));
    }

    #[test]
    fn conjugation_reverses_products((x, y) in tag_and_pair()) {
        let lhs = (x * y).conj();
        let rhs = y.conj() * x.conj();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn hermitian_form_properties((f, t) in case_field(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(t, &mut rng);
        let y = random_element(t, &mut rng);
        let h = hermitian(&x, &y, f).unwrap();
        prop_assert!((h.re - x.bilinear(&y)).abs() <= TOL * (1.0 + x.norm() * y.norm()));
        let hh = hermitian(&x, &x, f).unwrap();
        prop_assert!((hh - KScalar::new(x.norm2(), 0.0)).norm() <= TOL * (1.0 + x.norm2()));
        prop_assert!(h.norm() <= x.norm() * y.norm() * (1.0 + TOL));
        let l = KScalar::new(rng_f(&mut rng), if f == GroundField::C { rng_f(&mut rng) } else { 0.0 });
        let lin = hermitian(&x, &y.scal(f, l), f).unwrap();
        prop_assert!((lin - h * l).norm() <= 1e-9 * (1.0 + h.norm() * l.norm()));
        let anti = hermitian(&x.scal(f, l), &y, f).unwrap();
        prop_assert!((anti - l.conj() * h).norm() <= 1e-9 * (1.0 + h.norm() * l.norm()));
        let dep = x.scal(f, l);
        let cs = hermitian(&x, &dep, f).unwrap().norm();
        prop_assert!((cs - x.norm() * dep.norm()).abs() <= 1e-9 * (1.0 + x.norm() * dep.norm()));
    }

    #[test]
    fn k_decompose_is_idempotent((f, t) in case_field(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(t, &mut rng);
        let (l, p) = k_decompose(&x, f).unwrap();
        let (l2, p2) = k_decompose(&p, f).unwrap();
        prop_assert_eq!(l2, KScalar::new(0.0, 0.0));
        prop_assert_eq!(p2, p);
        let back = AlgebraElement::from_k(t, f, l) + p;
        prop_assert!(back.max_abs_diff(&x) == 0.0);
    }

    #[test]
    fn embed_is_multiplicative_and_isometric(
        (f, src, tgt) in prop::sample::select(vec![
            (GroundField::R, AlgebraTag::H, AlgebraTag::H),
            (GroundField::R, AlgebraTag::H, AlgebraTag::O),
            (GroundField::C, AlgebraTag::O, AlgebraTag::O),
        ]),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_unit_pure(f, src, &mut rng).unwrap();
        let c = random_unit_pure(f, src, &mut rng).unwrap();
        let tau = hermitian(&a, &c, f).unwrap();
        prop_assume!(tau.norm() < 0.999);
        let b = random_unit_pure(f, tgt, &mut rng).unwrap();
        let d = dependent_partner(f, &b, tau, &mut rng);
        let phi = embed(&a, &c, &b, &d, f, 1e-8).unwrap();
        prop_assert!(phi.apply(&a).max_abs_diff(&b) < 1e-9);
        prop_assert!(phi.apply(&c).max_abs_diff(&d) < 1e-8);
        prop_assert!(phi.isometry_defect() < 1e-9);
        prop_assert!(phi.multiplicativity_error(&mut rng, 20) < 1e-8);
    }
}
