//! The projective quadric Δ of signature (3, 4) and the free action of the
//! left isoclinic rotations H ≅ S³ on it.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraTag};
use crate::error::{Error, Result};

/// Q(X) = X0² + X1² + X2² − X3² − X4² − X5² − X6².
pub fn quadratic_form(x: &[f64; 7]) -> f64 {
    x[..3].iter().map(|v| v * v).sum::<f64>() - x[3..].iter().map(|v| v * v).sum::<f64>()
}

/// B(x, y) = ½(Q(x+y) − Q(x) − Q(y)).
pub fn bilinear_b(x: &[f64; 7], y: &[f64; 7]) -> f64 {
    x[..3].iter().zip(&y[..3]).map(|(a, b)| a * b).sum::<f64>()
        - x[3..].iter().zip(&y[3..]).map(|(a, b)| a * b).sum::<f64>()
}

/// A point of Δ: unit Euclidean norm, first significant coordinate positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadricPoint {
    coords: [f64; 7],
}

impl QuadricPoint {
    pub fn new(x: [f64; 7], tol: f64) -> Result<Self> {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n < 1e-12 {
            return Err(Error::Precondition("zero vector is not a projective point".into()));
        }
        let mut c = x.map(|v| v / n);
        let q = quadratic_form(&c);
        if q.abs() > tol {
            return Err(Error::Precondition(format!("point is off the quadric: Q = {q:e}")));
        }
        if let Some(first) = c.iter().find(|v| v.abs() > 1e-9) {
            if *first < 0.0 {
                c = c.map(|v| -v);
            }
        }
        Ok(QuadricPoint { coords: c })
    }

    pub fn coords(&self) -> &[f64; 7] {
        &self.coords
    }

    /// Base point (1,0,0,1,0,0,0), unnormalized.
    pub fn base_coords() -> [f64; 7] {
        [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
    }

    /// Representative with |(X0,X1,X2)| = |(X3..X6)| = 1.
    pub fn balanced(&self) -> [f64; 7] {
        let s = self.coords[..3].iter().map(|v| v * v).sum::<f64>().sqrt();
        self.coords.map(|v| v / s)
    }

    pub fn projectively_eq(&self, other: &QuadricPoint, tol: f64) -> bool {
        let d: f64 = self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let e: f64 = self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        d.min(e) <= tol
    }
}

/// Left multiplication by a unit quaternion on (X3, X4, X5, X6).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsoclinicElement {
    q: [f64; 4],
}

impl IsoclinicElement {
    pub fn new(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnit(n * n));
        }
        Ok(IsoclinicElement { q })
    }

    pub fn identity() -> Self {
        IsoclinicElement { q: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn quaternion(&self) -> &[f64; 4] {
        &self.q
    }

    pub fn real_part(&self) -> f64 {
        self.q[0]
    }

    pub fn inverse(&self) -> Self {
        IsoclinicElement { q: [self.q[0], -self.q[1], -self.q[2], -self.q[3]] }
    }

    pub fn compose(&self, other: &Self) -> Self {
        let p = quat(&self.q) * quat(&other.q);
        IsoclinicElement { q: [p.coeff(0), p.coeff(1), p.coeff(2), p.coeff(3)] }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut q = [0.0; 4];
        for v in q.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        IsoclinicElement { q: q.map(|v| v / n) }
    }

    /// Random element with real part at most 1 − δ.
    pub fn random_away_from_identity<R: Rng + ?Sized>(rng: &mut R, delta: f64) -> Self {
        loop {
            let g = Self::random(rng);
            if g.q[0] <= 1.0 - delta {
                return g;
            }
        }
    }
}

fn quat(q: &[f64]) -> AlgebraElement {
    AlgebraElement::new(AlgebraTag::H, q).expect("four coordinates")
}

/// g · X on raw coordinates.
pub fn h_act_coords(g: &IsoclinicElement, x: &[f64; 7]) -> [f64; 7] {
    let w = quat(&g.q) * quat(&x[3..]);
    [x[0], x[1], x[2], w.coeff(0), w.coeff(1), w.coeff(2), w.coeff(3)]
}

pub fn h_act(g: &IsoclinicElement, p: &QuadricPoint) -> QuadricPoint {
    let y = h_act_coords(g, &p.coords);
    QuadricPoint::new(y, 1e-6).expect("H preserves Q")
}

/// Random point (s, w)/√2 with s ∈ S², w ∈ S³.
pub fn random_quadric_point<R: Rng + ?Sized>(rng: &mut R) -> QuadricPoint {
    let mut x = [0.0; 7];
    for v in x.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    let s = x[..3].iter().map(|v| v * v).sum::<f64>().sqrt();
    let w = x[3..].iter().map(|v| v * v).sum::<f64>().sqrt();
    for (i, v) in x.iter_mut().enumerate() {
        *v /= if i < 3 { s } else { w };
    }
    QuadricPoint::new(x, 1e-9).expect("balanced point lies on Q")
}

/// Frame change T with T·p̂ = (1,0,0,1,0,0,0): a rotation on (X0,X1,X2) and
/// right multiplication by w̄ on the quaternion part. It commutes with H.
pub fn normalize_frame(p: &QuadricPoint, x: &[f64; 7]) -> [f64; 7] {
    let b = p.balanced();
    let s = [b[0], b[1], b[2]];
    let wbar = quat(&[b[3], -b[4], -b[5], -b[6]]);
    // Householder reflection composed with a sign flip: an orthogonal map sending s to e0.
    let v = [s[0] - 1.0, s[1], s[2]];
    let vv = v.iter().map(|t| t * t).sum::<f64>();
    let r = |y: [f64; 3]| -> [f64; 3] {
        if vv < 1e-24 {
            return y;
        }
        let d = 2.0 * (v[0] * y[0] + v[1] * y[1] + v[2] * y[2]) / vv;
        [y[0] - d * v[0], y[1] - d * v[1], y[2] - d * v[2]]
    };
    let t = r([x[0], x[1], x[2]]);
    let q = quat(&x[3..]) * wbar;
    [t[0], t[1], t[2], q.coeff(0), q.coeff(1), q.coeff(2), q.coeff(3)]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreeActionReport {
    pub samples: usize,
    pub delta: f64,
    /// Smallest |B(p̂, g·p̂)| over the samples.
    pub min_abs_b: f64,
    /// Largest |B(p̂, g·p̂) − (1 − Re g)|.
    pub max_identity_error: f64,
    /// Largest |Q(g·p)| over the samples.
    pub max_q_drift: f64,
    /// Largest distance of the transported base point from (1,0,0,1,0,0,0).
    pub max_frame_error: f64,
    pub passed: bool,
}

/// Sampled freeness: for g with Re(g) ≤ 1 − δ and p ∈ Δ, B(p̂, g·p̂) = 1 − Re(g) ≥ δ.
pub fn free_action_check<R: Rng + ?Sized>(samples: usize, delta: f64, rng: &mut R) -> FreeActionReport {
    let mut min_abs_b = f64::INFINITY;
    let mut max_identity_error: f64 = 0.0;
    let mut max_q_drift: f64 = 0.0;
    let mut max_frame_error: f64 = 0.0;
    let base = QuadricPoint::base_coords();
    for _ in 0..samples {
        let g = IsoclinicElement::random_away_from_identity(rng, delta);
        let p = random_quadric_point(rng);
        let pb = p.balanced();
        let gp = h_act_coords(&g, &pb);
        max_q_drift = max_q_drift.max(quadratic_form(&gp).abs());
        let tp = normalize_frame(&p, &pb);
        let frame_err = tp.iter().zip(&base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_frame_error = max_frame_error.max(frame_err);
        let tgp = normalize_frame(&p, &gp);
        let bval = bilinear_b(&tp, &tgp);
        min_abs_b = min_abs_b.min(bval.abs());
        max_identity_error = max_identity_error.max((bval - (1.0 - g.real_part())).abs());
    }
    let passed = samples > 0 && min_abs_b >= delta * (1.0 - 1e-9) && max_identity_error <= 1e-9 && max_q_drift <= 1e-12;
    FreeActionReport {
        samples,
        delta,
        min_abs_b,
        max_identity_error,
        max_q_drift,
        max_frame_error,
        passed,
    }
}
