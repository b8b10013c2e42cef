//! Exact simplex moment formulas.

use crate::num::{det, factorial, Scalar};

/// Volume, first moment `∫ p dp` and second moment `∫ p p^T dp` of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentData<S> {
    pub m0: S,
    pub m1: Vec<S>,
    pub m2: Vec<Vec<S>>,
}

impl<S: Scalar> MomentData<S> {
    pub fn zero(dim: usize) -> Self {
        MomentData {
            m0: S::zero(),
            m1: vec![S::zero(); dim],
            m2: vec![vec![S::zero(); dim]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.m1.len()
    }

    pub fn accumulate(&mut self, other: &MomentData<S>) {
        self.m0 = self.m0.clone() + other.m0.clone();
        for (a, b) in self.m1.iter_mut().zip(&other.m1) {
            *a = a.clone() + b.clone();
        }
        for (ra, rb) in self.m2.iter_mut().zip(&other.m2) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a = a.clone() + b.clone();
            }
        }
    }

    pub fn barycenter(&self) -> Vec<S> {
        self.m1.iter().map(|x| x.clone() / self.m0.clone()).collect()
    }

    /// `v^T M2 w`.
    pub fn m2_form(&self, v: &[S], w: &[S]) -> S {
        let mut acc = S::zero();
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                acc = acc + vi.clone() * self.m2[i][j].clone() * wj.clone();
            }
        }
        acc
    }

    pub fn to_f64(&self) -> MomentData<f64> {
        MomentData {
            m0: self.m0.to_f64(),
            m1: self.m1.iter().map(Scalar::to_f64).collect(),
            m2: self.m2.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect(),
        }
    }
}

/// Moments of the full-dimensional simplex `conv(vertices)` in `R^d`
/// (`d + 1` vertices). Returns `None` for a degenerate simplex.
pub fn simplex_moments<S: Scalar>(vertices: &[Vec<S>]) -> Option<MomentData<S>> {
    let d = vertices.len() - 1;
    let v0 = &vertices[0];
    let edges: Vec<Vec<S>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(v0).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    let det = det(edges);
    if det.is_zero() {
        return None;
    }
    let vol = det.abs_val() / S::from_i64(factorial(d));
    Some(moments_with_volume(vertices, vol))
}

/// Simplex moments when the volume is known (e.g. an `m`-simplex embedded in
/// a higher-dimensional space with a measure supplied by the caller).
pub fn moments_with_volume<S: Scalar>(vertices: &[Vec<S>], vol: S) -> MomentData<S> {
    let k = vertices.len(); // number of vertices = simplex dimension + 1
    let dim = vertices[0].len();
    let mut sum = vec![S::zero(); dim];
    for v in vertices {
        for (s, x) in sum.iter_mut().zip(v) {
            *s = s.clone() + x.clone();
        }
    }
    let kk = S::from_i64(k as i64);
    let m1 = sum.iter().map(|s| vol.clone() * s.clone() / kk.clone()).collect();
    let c2 = vol.clone() / (kk.clone() * S::from_i64(k as i64 + 1));
    let mut m2 = vec![vec![S::zero(); dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let mut acc = sum[i].clone() * sum[j].clone();
            for v in vertices {
                acc = acc + v[i].clone() * v[j].clone();
            }
            let val = c2.clone() * acc;
            m2[i][j] = val.clone();
            m2[j][i] = val;
        }
    }
    MomentData { m0: vol, m1, m2 }
}
