//! Real composition algebras ℝ, ℂ, ℍ, 𝕆 by Cayley–Dickson doubling, the
//! k-pure decomposition, the Hermitian form and the embedding constructor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Scalars of the ground field; for k = ℝ the imaginary part is zero.
pub type KScalar = Complex64;

/// Default absolute tolerance on unit-scale quantities.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraTag {
    R,
    C,
    H,
    O,
}

impl AlgebraTag {
    pub const ALL: [AlgebraTag; 4] = [AlgebraTag::R, AlgebraTag::C, AlgebraTag::H, AlgebraTag::O];

    pub const fn dim(self) -> usize {
        match self {
            AlgebraTag::R => 1,
            AlgebraTag::C => 2,
            AlgebraTag::H => 4,
            AlgebraTag::O => 8,
        }
    }

    pub fn from_dim(n: usize) -> Option<Self> {
        match n {
            1 => Some(AlgebraTag::R),
            2 => Some(AlgebraTag::C),
            4 => Some(AlgebraTag::H),
            8 => Some(AlgebraTag::O),
            _ => None,
        }
    }
}

impl fmt::Display for AlgebraTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraTag::R => "R",
            AlgebraTag::C => "C",
            AlgebraTag::H => "H",
            AlgebraTag::O => "O",
        };
        f.write_str(s)
    }
}

/// The ground field k, sitting in an algebra as span{e0} or span{e0, e1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroundField {
    R,
    C,
}

impl GroundField {
    pub const fn dim(self) -> usize {
        match self {
            GroundField::R => 1,
            GroundField::C => 2,
        }
    }

    pub fn embeds_in(self, tag: AlgebraTag) -> bool {
        tag.dim() >= self.dim()
    }

    pub fn check(self, tag: AlgebraTag) -> Result<()> {
        if self.embeds_in(tag) {
            Ok(())
        } else {
            Err(Error::FieldNotEmbedded { field: self, tag })
        }
    }

    /// Real-basis indices of the fixed k-basis: e0, e1, e2, … over ℝ and
    /// e0, e2, e4, … over ℂ.
    pub fn basis_indices(self, tag: AlgebraTag) -> Vec<usize> {
        (0..tag.dim()).step_by(self.dim()).collect()
    }

    pub fn k_dim(self, tag: AlgebraTag) -> usize {
        tag.dim() / self.dim()
    }
}

/// An element of one of the four algebras, stored in the basis e0 = 1, e1, …
#[derive(Clone, Copy, PartialEq)]
pub struct AlgebraElement {
    tag: AlgebraTag,
    c: [f64; 8],
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.tag, self.coeffs())
    }
}

fn cd_mul(x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = x.len();
    if n == 1 {
        out[0] = x[0] * y[0];
        return;
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let mut cbar = [0.0; 4];
    let mut dbar = [0.0; 4];
    cbar[..h].copy_from_slice(c);
    dbar[..h].copy_from_slice(d);
    for i in 1..h {
        cbar[i] = -cbar[i];
        dbar[i] = -dbar[i];
    }
    let mut t1 = [0.0; 4];
    let mut t2 = [0.0; 4];
    // (a + b e)(c + d e) = (ac − d̄b) + (da + bc̄)e
    cd_mul(a, c, &mut t1[..h]);
    cd_mul(&dbar[..h], b, &mut t2[..h]);
    for i in 0..h {
        out[i] = t1[i] - t2[i];
    }
    cd_mul(d, a, &mut t1[..h]);
    cd_mul(b, &cbar[..h], &mut t2[..h]);
    for i in 0..h {
        out[h + i] = t1[i] + t2[i];
    }
}

impl AlgebraElement {
    pub fn new(tag: AlgebraTag, coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() != tag.dim() {
            return Err(Error::BadLength { got: coeffs.len(), expected: tag.dim() });
        }
        let mut c = [0.0; 8];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { tag, c })
    }

    pub fn zero(tag: AlgebraTag) -> Self {
        Self { tag, c: [0.0; 8] }
    }

    pub fn one(tag: AlgebraTag) -> Self {
        Self::basis(tag, 0)
    }

    /// The basis vector e_i. Panics if i is out of range.
    pub fn basis(tag: AlgebraTag, i: usize) -> Self {
        assert!(i < tag.dim(), "basis index {i} out of range for {tag}");
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Self { tag, c }
    }

    /// The element l.re·e0 + l.im·e1 of k inside `tag`.
    pub fn from_k(tag: AlgebraTag, field: GroundField, l: KScalar) -> Self {
        let mut c = [0.0; 8];
        c[0] = l.re;
        if field == GroundField::C && tag.dim() >= 2 {
            c[1] = l.im;
        }
        Self { tag, c }
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.tag.dim()]
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs()[i]
    }

    fn same_tag(&self, other: &Self) -> Result<()> {
        if self.tag == other.tag {
            Ok(())
        } else {
            Err(Error::TagMismatch(self.tag, other.tag))
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_tag(other)?;
        let n = self.tag.dim();
        let mut out = [0.0; 8];
        cd_mul(&self.c[..n], &other.c[..n], &mut out[..n]);
        Ok(Self { tag: self.tag, c: out })
    }

    pub fn conj(&self) -> Self {
        let mut c = self.c;
        for v in c.iter_mut().skip(1) {
            *v = -*v;
        }
        Self { tag: self.tag, c }
    }

    pub fn norm2(&self) -> f64 {
        self.coeffs().iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn bilinear(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.tag, other.tag);
        self.coeffs().iter().zip(other.coeffs()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v *= s;
        }
        Self { tag: self.tag, c }
    }

    pub fn normalized(&self) -> Self {
        self.scale(1.0 / self.norm())
    }

    /// Right multiplication by a scalar of k: x·l.
    pub fn scal(&self, field: GroundField, l: KScalar) -> Self {
        *self * Self::from_k(self.tag, field, l)
    }

    /// The k-component of x in the decomposition 𝔸 = k ⊕ Pu_k(𝔸).
    pub fn k_part(&self, field: GroundField) -> KScalar {
        match field {
            GroundField::R => KScalar::new(self.c[0], 0.0),
            GroundField::C => KScalar::new(self.c[0], self.c[1]),
        }
    }

    pub fn pure_part(&self, field: GroundField) -> Self {
        let mut c = self.c;
        for v in c.iter_mut().take(field.dim()) {
            *v = 0.0;
        }
        Self { tag: self.tag, c }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for AlgebraElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.tag, rhs.tag, "adding elements of different algebras");
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        Self { tag: self.tag, c }
    }
}

impl Sub for AlgebraElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for AlgebraElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Panics on mismatched algebras; use [`AlgebraElement::checked_mul`] for a
/// fallible product.
impl Mul for AlgebraElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("product of elements of different algebras")
    }
}

pub fn mul(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    x.checked_mul(y)
}

pub fn conj(x: &AlgebraElement) -> AlgebraElement {
    x.conj()
}

pub fn norm2(x: &AlgebraElement) -> f64 {
    x.norm2()
}

pub fn bilinear(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    x.same_tag(y)?;
    Ok(x.bilinear(y))
}

pub fn k_decompose(x: &AlgebraElement, field: GroundField) -> Result<(KScalar, AlgebraElement)> {
    field.check(x.tag())?;
    Ok((x.k_part(field), x.pure_part(field)))
}

/// (x|y): the k-part of conj(x)·y. Conjugate-linear in x, linear in y.
pub fn hermitian(x: &AlgebraElement, y: &AlgebraElement, field: GroundField) -> Result<KScalar> {
    x.same_tag(y)?;
    field.check(x.tag())?;
    Ok(herm(x, y, field))
}

/// Unchecked Hermitian form for internal use on matching tags.
pub fn herm(x: &AlgebraElement, y: &AlgebraElement, field: GroundField) -> KScalar {
    (x.conj() * *y).k_part(field)
}

/// The fixed k-basis of `tag`, starting with 1.
pub fn k_basis(field: GroundField, tag: AlgebraTag) -> Vec<AlgebraElement> {
    field
        .basis_indices(tag)
        .into_iter()
        .map(|i| AlgebraElement::basis(tag, i))
        .collect()
}

/// The fixed k-basis of Pu_k(tag): e1, e2, … over ℝ and e2, e4, … over ℂ.
pub fn pure_k_basis(field: GroundField, tag: AlgebraTag) -> Vec<AlgebraElement> {
    k_basis(field, tag).into_iter().skip(1).collect()
}

/// k-coordinates of x in the fixed k-basis of Pu_k (x is assumed pure).
pub fn pure_coords(x: &AlgebraElement, field: GroundField) -> Vec<KScalar> {
    pure_k_basis(field, x.tag()).iter().map(|b| herm(b, x, field)).collect()
}

pub fn from_pure_coords(tag: AlgebraTag, field: GroundField, z: &[KScalar]) -> AlgebraElement {
    pure_k_basis(field, tag)
        .iter()
        .zip(z)
        .fold(AlgebraElement::zero(tag), |acc, (b, l)| acc + b.scal(field, *l))
}

pub fn random_element<R: Rng + ?Sized>(tag: AlgebraTag, rng: &mut R) -> AlgebraElement {
    let mut c = [0.0; 8];
    for v in c.iter_mut().take(tag.dim()) {
        *v = rng.sample(StandardNormal);
    }
    AlgebraElement { tag, c }
}

/// Gaussian direction in Pu_k(tag), normalized.
pub fn random_unit_pure<R: Rng + ?Sized>(
    field: GroundField,
    tag: AlgebraTag,
    rng: &mut R,
) -> Result<AlgebraElement> {
    field.check(tag)?;
    if tag.dim() <= field.dim() {
        return Err(Error::Precondition(format!("Pu_{field:?}({tag}) is zero")));
    }
    loop {
        let mut c = [0.0; 8];
        for v in c.iter_mut().take(tag.dim()).skip(field.dim()) {
            *v = rng.sample(StandardNormal);
        }
        let x = AlgebraElement { tag, c };
        let n = x.norm();
        if n > 1e-6 {
            return Ok(x.scale(1.0 / n));
        }
    }
}

pub fn random_unit_scalar<R: Rng + ?Sized>(field: GroundField, rng: &mut R) -> KScalar {
    match field {
        GroundField::R => {
            if rng.random_bool(0.5) {
                KScalar::new(1.0, 0.0)
            } else {
                KScalar::new(-1.0, 0.0)
            }
        }
        GroundField::C => KScalar::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
    }
}

/// Subtract the k-projection of v onto each (orthonormal) u in `basis`.
pub fn project_out(v: &AlgebraElement, basis: &[AlgebraElement], field: GroundField) -> AlgebraElement {
    basis
        .iter()
        .fold(*v, |acc, u| acc - u.scal(field, herm(u, &acc, field)))
}

/// Extend an orthonormal list in Pu_k to a full orthonormal k-basis by
/// Gram–Schmidt against the fixed basis order.
pub fn orthonormal_complete(
    field: GroundField,
    tag: AlgebraTag,
    partial: &[AlgebraElement],
    tol: f64,
) -> Result<Vec<AlgebraElement>> {
    field.check(tag)?;
    for (i, u) in partial.iter().enumerate() {
        if u.tag() != tag {
            return Err(Error::TagMismatch(u.tag(), tag));
        }
        if u.k_part(field).norm() > tol {
            return Err(Error::Precondition("partial list is not k-pure".into()));
        }
        for (j, v) in partial.iter().enumerate().take(i + 1) {
            let h = herm(v, u, field);
            let want = if i == j { 1.0 } else { 0.0 };
            if (h - want).norm() > tol.max(1e-12) * 10.0 {
                return Err(Error::Dependent(format!(
                    "partial list is not orthonormal: ({j}|{i}) = {h}"
                )));
            }
        }
    }
    let mut out: Vec<AlgebraElement> = partial.to_vec();
    let full = field.k_dim(tag) - 1;
    for b in pure_k_basis(field, tag) {
        if out.len() == full {
            break;
        }
        let r = project_out(&b, &out, field);
        // re-orthogonalize once for stability
        let r = project_out(&r, &out, field);
        let n = r.norm();
        if n > 1e-6 {
            out.push(r.scale(1.0 / n));
        }
    }
    Ok(out)
}

/// First fixed-order completion vector orthogonal to the given orthonormal list.
pub fn first_orthogonal(field: GroundField, tag: AlgebraTag, partial: &[AlgebraElement]) -> Result<AlgebraElement> {
    let all = orthonormal_complete(field, tag, partial, 1e-7)?;
    all.get(partial.len())
        .copied()
        .ok_or_else(|| Error::Precondition("no orthogonal complement left".into()))
}

/// Unit element of the pure k-line orthogonal to two pure units u, v that
/// are k-independent: the product u·v⊥ after Gram–Schmidt.
pub fn pole(u: &AlgebraElement, v: &AlgebraElement, field: GroundField) -> Result<AlgebraElement> {
    let vperp = project_out(v, &[*u], field);
    let n = vperp.norm();
    if n < 1e-9 {
        return Err(Error::Dependent("pole of k-dependent elements".into()));
    }
    let w = (*u * vperp.scale(1.0 / n)).pure_part(field);
    Ok(w.normalized())
}

/// A k-algebra embedding given by the images of the fixed k-basis of its source.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    field: GroundField,
    source: AlgebraTag,
    target: AlgebraTag,
    images: Vec<AlgebraElement>,
}

impl Embedding {
    pub fn from_images(
        field: GroundField,
        source: AlgebraTag,
        target: AlgebraTag,
        images: Vec<AlgebraElement>,
    ) -> Result<Self> {
        field.check(source)?;
        field.check(target)?;
        let want = field.k_dim(source);
        if images.len() != want {
            return Err(Error::BadLength { got: images.len(), expected: want });
        }
        if let Some(bad) = images.iter().find(|x| x.tag() != target) {
            return Err(Error::TagMismatch(bad.tag(), target));
        }
        Ok(Self { field, source, target, images })
    }

    pub fn identity(field: GroundField, tag: AlgebraTag) -> Self {
        Self::inclusion(field, tag, tag)
    }

    /// Coordinate inclusion of a smaller algebra into a larger one.
    pub fn inclusion(field: GroundField, source: AlgebraTag, target: AlgebraTag) -> Self {
        assert!(source.dim() <= target.dim());
        let images = field
            .basis_indices(source)
            .into_iter()
            .map(|i| AlgebraElement::basis(target, i))
            .collect();
        Self { field, source, target, images }
    }

    pub fn field(&self) -> GroundField {
        self.field
    }

    pub fn source(&self) -> AlgebraTag {
        self.source
    }

    pub fn target(&self) -> AlgebraTag {
        self.target
    }

    /// Images of the fixed k-basis (1, a0, a1, a0a1, … ) of the source.
    pub fn basis_images(&self) -> &[AlgebraElement] {
        &self.images
    }

    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        debug_assert_eq!(x.tag(), self.source);
        k_basis(self.field, self.source)
            .iter()
            .zip(&self.images)
            .fold(AlgebraElement::zero(self.target), |acc, (g, h)| {
                acc + h.scal(self.field, herm(g, x, self.field))
            })
    }

    pub fn try_apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.tag() != self.source {
            return Err(Error::TagMismatch(x.tag(), self.source));
        }
        Ok(self.apply(x))
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.target != self.source {
            return Err(Error::TagMismatch(inner.target, self.source));
        }
        if inner.field != self.field {
            return Err(Error::Precondition("composing maps over different fields".into()));
        }
        let images = inner.images.iter().map(|x| self.apply(x)).collect();
        Ok(Embedding { field: self.field, source: inner.source, target: self.target, images })
    }

    /// Inverse of a square isometric map: conjugate transpose in k-coordinates.
    pub fn inverse(&self) -> Result<Embedding> {
        if self.source != self.target {
            return Err(Error::Precondition("only square maps are invertible".into()));
        }
        let basis = k_basis(self.field, self.source);
        let images = basis
            .iter()
            .map(|gm| {
                basis.iter().zip(&self.images).fold(AlgebraElement::zero(self.source), |acc, (gn, hn)| {
                    acc + gn.scal(self.field, herm(hn, gm, self.field))
                })
            })
            .collect();
        Ok(Embedding { field: self.field, source: self.source, target: self.target, images })
    }

    pub fn max_image_diff(&self, other: &Embedding) -> f64 {
        self.images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// Largest |φ(xy) − φ(x)φ(y)| over random pairs of unit-scale elements.
    pub fn multiplicativity_error<R: Rng + ?Sized>(&self, rng: &mut R, pairs: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let x = random_element(self.source, rng);
            let y = random_element(self.source, rng);
            let lhs = self.apply(&(x * y));
            let rhs = self.apply(&x) * self.apply(&y);
            worst = worst.max(lhs.dist(&rhs) / (1.0 + x.norm() * y.norm()));
        }
        worst
    }

    /// Largest deviation of the basis images from an orthonormal family with φ(1) = 1.
    pub fn isometry_defect(&self) -> f64 {
        let mut worst = self.images[0].dist(&AlgebraElement::one(self.target));
        for (i, a) in self.images.iter().enumerate() {
            for (j, b) in self.images.iter().enumerate().take(i + 1) {
                let h = herm(b, a, self.field);
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((h - want).norm());
            }
        }
        worst
    }
}

fn check_unit(x: &AlgebraElement, tol: f64) -> Result<()> {
    let n2 = x.norm2();
    if (n2 - 1.0).abs() > tol.max(1e-12) * 10.0 {
        return Err(Error::NotUnit(n2));
    }
    Ok(())
}

fn check_pure(x: &AlgebraElement, field: GroundField, tol: f64) -> Result<()> {
    if x.k_part(field).norm() > tol.max(1e-12) * 10.0 {
        return Err(Error::Precondition(format!("{x:?} is not k-pure")));
    }
    Ok(())
}

/// The k-algebra morphism 𝔸 → 𝔹 with a ↦ b and c ↦ d, built on the
/// orthogonalized bases (1, a, c⟂, a·c⟂) ↦ (1, b, d⟂, b·d⟂).
pub fn embed(
    a: &AlgebraElement,
    c: &AlgebraElement,
    b: &AlgebraElement,
    d: &AlgebraElement,
    field: GroundField,
    tol: f64,
) -> Result<Embedding> {
    a.same_tag(c)?;
    b.same_tag(d)?;
    let (src, tgt) = (a.tag(), b.tag());
    field.check(src)?;
    field.check(tgt)?;
    if field.k_dim(src) != 4 {
        return Err(Error::Precondition(format!("source {src} has k-dimension {}, need 4", field.k_dim(src))));
    }
    if field.k_dim(tgt) < 4 {
        return Err(Error::Precondition(format!("target {tgt} is smaller than source {src}")));
    }
    for x in [a, c, b, d] {
        check_pure(x, field, tol)?;
        check_unit(x, tol)?;
    }
    let ac = herm(a, c, field);
    let bd = herm(b, d, field);
    if ac.norm() > 1.0 - 1e-9 {
        return Err(Error::ProportionalPair);
    }
    if (ac - bd).norm() > tol {
        return Err(Error::InnerProductMismatch((ac - bd).norm()));
    }
    let cp = project_out(c, &[*a], field).normalized();
    let dp = project_out(d, &[*b], field).normalized();
    let f = [AlgebraElement::one(src), *a, cp, *a * cp];
    let h = [AlgebraElement::one(tgt), *b, dp, *b * dp];
    let images = k_basis(field, src)
        .iter()
        .map(|g| {
            f.iter().zip(&h).fold(AlgebraElement::zero(tgt), |acc, (fn_, hn)| {
                acc + hn.scal(field, herm(fn_, g, field))
            })
        })
        .collect();
    Ok(Embedding { field, source: src, target: tgt, images })
}

/// Doubling extension of φ: ℍ → 𝕆 to an automorphism of 𝕆 over ℝ:
/// ψ(x + y·e4) = φ(x) + φ(y)·g.
pub fn extend_to_automorphism(phi: &Embedding, g: &AlgebraElement, tol: f64) -> Result<Embedding> {
    if phi.field != GroundField::R || phi.source != AlgebraTag::H || phi.target != AlgebraTag::O {
        return Err(Error::Precondition("extension needs a real embedding ℍ → 𝕆".into()));
    }
    if g.tag() != AlgebraTag::O {
        return Err(Error::TagMismatch(g.tag(), AlgebraTag::O));
    }
    check_unit(g, tol)?;
    let defect = phi.images.iter().map(|h| h.bilinear(g).abs()).fold(0.0, f64::max);
    if defect > tol {
        return Err(Error::NotOrthogonal(defect));
    }
    let mut images = phi.images.clone();
    for m in 0..4 {
        images.push(phi.images[m] * *g);
    }
    Ok(Embedding { field: GroundField::R, source: AlgebraTag::O, target: AlgebraTag::O, images })
}

/// Real G2-automorphism of 𝕆 restricting to φ on ℍ, with g the first
/// fixed-order unit orthogonal to im φ.
pub fn extend_default(phi: &Embedding) -> Result<Embedding> {
    let im: Vec<AlgebraElement> = phi.images[1..].to_vec();
    let g = first_orthogonal(GroundField::R, AlgebraTag::O, &im)?;
    extend_to_automorphism(phi, &g, 1e-7)
}
