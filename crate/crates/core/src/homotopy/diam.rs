//! Walks in the directed graph on unit elements of Pu_k(𝔹) with an edge
//! b → c whenever (b|c) = l.

use crate::algebra::{first_orthogonal, herm, pole, project_out, AlgebraElement, GroundField, KScalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DiamChain {
    pub chain: Vec<AlgebraElement>,
    /// Power of two used for the orthogonal connection.
    pub n: usize,
}

impl DiamChain {
    pub fn steps(&self) -> usize {
        self.chain.len() - 1
    }

    /// Largest |(v_i | v_{i+1}) − l| and largest norm defect along the chain.
    pub fn step_error(&self, field: GroundField, l: KScalar) -> f64 {
        let mut e: f64 = 0.0;
        for w in self.chain.windows(2) {
            e = e.max((herm(&w[0], &w[1], field) - l).norm());
        }
        for v in &self.chain {
            e = e.max((v.norm2() - 1.0).abs());
        }
        e
    }
}

/// Smallest power of two n with |l|^{2n} ≤ ½.
pub fn diam_power(l: KScalar) -> Result<usize> {
    let m = l.norm();
    if m >= 1.0 {
        return Err(Error::Precondition(format!("|l| = {m} is not below 1")));
    }
    let mut n = 1usize;
    while m.powi(2 * n as i32) > 0.5 {
        n *= 2;
    }
    Ok(n)
}

/// A unit d with (b|d) = l and (d|c) = l, in the frame b, c′, b·c′ with
/// c = b·τ + c′·s. Requires |l| < 1 and a nonnegative remainder r².
pub fn diam_step(field: GroundField, b: &AlgebraElement, c: &AlgebraElement, l: KScalar) -> Result<AlgebraElement> {
    if l.norm() >= 1.0 {
        return Err(Error::Precondition(format!("|l| = {} is not below 1", l.norm())));
    }
    let tau = herm(b, c, field);
    let cp = project_out(c, &[*b], field);
    let s = cp.norm();
    if s < 1e-12 {
        return Err(Error::Dependent("c is a scalar multiple of b".into()));
    }
    let cp = cp.scale(1.0 / s);
    let e = (*b * cp).pure_part(field).normalized();
    let t = ((l - l.conj() * tau) / s).conj();
    let r2 = 1.0 - l.norm_sqr() - t.norm_sqr();
    if r2 < -1e-12 {
        return Err(Error::Precondition(format!("no midpoint: remainder r² = {r2:e}")));
    }
    let r = r2.max(0.0).sqrt();
    Ok(b.scal(field, l) + cp.scal(field, t) + e.scale(r))
}

/// Chain of m = 2^j steps from b to c when (b|c) = l^m.
fn connect_power(field: GroundField, b: &AlgebraElement, c: &AlgebraElement, m: usize, l: KScalar) -> Result<Vec<AlgebraElement>> {
    if m == 1 {
        return Ok(vec![*b, *c]);
    }
    let half = l.powu((m / 2) as u32);
    let d = diam_step(field, b, c, half)?;
    let mut left = connect_power(field, b, &d, m / 2, l)?;
    let right = connect_power(field, &d, c, m / 2, l)?;
    left.extend_from_slice(&right[1..]);
    Ok(left)
}

fn connect_orthogonal(field: GroundField, b: &AlgebraElement, c: &AlgebraElement, n: usize, l: KScalar) -> Result<Vec<AlgebraElement>> {
    let d = diam_step(field, b, c, l.powu(n as u32))?;
    let mut left = connect_power(field, b, &d, n, l)?;
    let right = connect_power(field, &d, c, n, l)?;
    left.extend_from_slice(&right[1..]);
    Ok(left)
}

/// Directed walk b = v0, …, vm = c with every step equal to l; m ≤ 4n.
pub fn diam_connect(field: GroundField, b: &AlgebraElement, c: &AlgebraElement, l: KScalar) -> Result<DiamChain> {
    let n = diam_power(l)?;
    let tau = herm(b, c, field);
    let same = project_out(c, &[*b], field).norm() < 1e-12;
    let chain = if !same && (tau - l).norm() < 1e-12 {
        vec![*b, *c]
    } else if !same && (tau - l * l).norm() < 1e-12 {
        vec![*b, diam_step(field, b, c, l)?, *c]
    } else if tau.norm() < 1e-12 {
        connect_orthogonal(field, b, c, n, l)?
    } else {
        let e = if same {
            first_orthogonal(field, b.tag(), &[b.normalized()])?
        } else {
            pole(b, c, field)?
        };
        let mut left = connect_orthogonal(field, b, &e, n, l)?;
        let right = connect_orthogonal(field, &e, c, n, l)?;
        left.extend_from_slice(&right[1..]);
        left
    };
    Ok(DiamChain { chain, n })
}
