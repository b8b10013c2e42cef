//! Scalars and small dense linear algebra shared by the exact and floating
//! point code paths.
//!
//! Combinatorial data (rays, facets, triangulations) is always computed with
//! integers or [`Q`]. Geometry that has to be evaluated at irrational Reeb
//! covectors is written once against [`Scalar`] and instantiated for both
//! `Q` and `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;
/// Exact integer.
pub type Z = BigInt;
/// Integer vector, used for primitive normals and ray generators.
pub type IVec = Vec<Z>;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for exact arithmetic.
    const EXACT: bool;

    fn from_q(q: &Q) -> Self;
    fn from_i64(v: i64) -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn from_z(z: &Z) -> Self {
        Self::from_q(&Q::from_integer(z.clone()))
    }

    /// Basis of the linear hyperplane `{v : <v, normal> = 0}`.
    ///
    /// The rational implementation returns an integer lattice basis; the
    /// floating point one an orthonormal basis.
    fn hyperplane_basis(normal: &[Self]) -> Vec<Vec<Self>>;

    /// Exact square root when one exists. Only meaningful for `Q`.
    fn exact_sqrt(&self) -> Option<Self>;
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_q(q: &Q) -> Self {
        q.clone()
    }

    fn from_i64(v: i64) -> Self {
        Q::from_integer(Z::from(v))
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }

    fn hyperplane_basis(normal: &[Self]) -> Vec<Vec<Self>> {
        let w = primitive_from_q(normal);
        lattice_annihilator_basis(&w)
            .into_iter()
            .map(|v| v.into_iter().map(Q::from_integer).collect())
            .collect()
    }

    fn exact_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Q::new(n, d))
        } else {
            None
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn hyperplane_basis(normal: &[Self]) -> Vec<Vec<Self>> {
        // Gram-Schmidt on the coordinate axes after removing the normal
        // direction; axes most aligned with the normal are tried last.
        let n = normal.len();
        let nn = norm2(normal).sqrt();
        let unit: Vec<f64> = normal.iter().map(|x| x / nn).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| unit[a].abs().total_cmp(&unit[b].abs()));
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
        for &axis in &order {
            if basis.len() + 1 == n {
                break;
            }
            let mut v = vec![0.0; n];
            v[axis] = 1.0;
            for q in std::iter::once(&unit).chain(basis.iter()) {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
            let len = norm2(&v).sqrt();
            if len > 1e-8 {
                basis.push(v.into_iter().map(|x| x / len).collect());
            }
        }
        basis
    }

    fn exact_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or_else(|| {
        // Very large numerators or denominators: scale down first.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| qi(x)).collect()
}

pub fn ivec(v: &[i64]) -> IVec {
    v.iter().map(|&x| Z::from(x)).collect()
}

pub fn z_to_q(v: &[Z]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

pub fn to_scalar_vec<S: Scalar>(v: &[Q]) -> Vec<S> {
    v.iter().map(S::from_q).collect()
}

pub fn z_to_scalar_vec<S: Scalar>(v: &[Z]) -> Vec<S> {
    v.iter().map(S::from_z).collect()
}

pub fn to_f64_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Parses `"p/q"`, `"p"` or a JSON integer-like string into a rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Z = n.trim().parse().map_err(|_| bad())?;
            let d: Z = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn dot_z(a: &[Z], b: &[Z]) -> Z {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairing of an integer vector with a scalar vector.
pub fn dot_zs<S: Scalar>(a: &[Z], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + S::from_z(x) * y.clone())
}

pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

/// Largest absolute entry.
pub fn max_abs<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |m, x| {
        let ax = x.abs_val();
        if ax > m {
            ax
        } else {
            m
        }
    })
}

/// Divides out the gcd of the entries. Zero vectors are returned unchanged.
pub fn primitive(v: &[Z]) -> IVec {
    let g = v.iter().fold(Z::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Positive integer multiple of a rational vector with coprime entries.
pub fn primitive_from_q(v: &[Q]) -> IVec {
    let l = v.iter().fold(Z::one(), |l, x| l.lcm(x.denom()));
    let ints: IVec = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    primitive(&ints)
}

/// Makes the first nonzero entry positive.
fn orient_positive(v: &mut [Z]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Basis of the lattice `{v in Z^n : <v, w> = 0}`.
///
/// When some `|w_j| = 1` the basis `w_j e_i - w_i e_j` (i != j) is used; it
/// spans the lattice and keeps small entries. Otherwise columns of a
/// unimodular matrix reducing `w` to `(g, 0, .., 0)` are returned.
pub fn lattice_annihilator_basis(w: &[Z]) -> Vec<IVec> {
    let n = w.len();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    if let Some(j) = w.iter().position(|x| x.abs().is_one()) {
        for i in (0..n).filter(|&i| i != j) {
            let mut v = vec![Z::zero(); n];
            v[i] = w[j].clone();
            v[j] = -w[i].clone();
            let mut v = primitive(&v);
            orient_positive(&mut v);
            out.push(v);
        }
        return out;
    }
    // Column operations on the row vector w, tracking the unimodular matrix U
    // (stored by columns) with w * U = (g, 0, ..., 0).
    let mut row = w.to_vec();
    let mut cols: Vec<IVec> = (0..n)
        .map(|i| {
            let mut e = vec![Z::zero(); n];
            e[i] = Z::one();
            e
        })
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| !row[i].is_zero()).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&i| row[i].abs()).unwrap();
        for &i in &nonzero {
            if i == p {
                continue;
            }
            let f = row[i].div_floor(&row[p]);
            row[i] = &row[i] - &f * &row[p];
            let cp = cols[p].clone();
            for (a, b) in cols[i].iter_mut().zip(cp) {
                *a = &*a - &f * b;
            }
        }
    }
    for (i, c) in cols.into_iter().enumerate() {
        if row[i].is_zero() {
            let mut c = c;
            orient_positive(&mut c);
            out.push(c);
        }
    }
    out
}

/// Determinant by Gaussian elimination with largest-magnitude pivoting.
pub fn det<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut d = S::one();
    for c in 0..n {
        let mut piv = c;
        let mut best = m[c][c].abs_val();
        for r in c + 1..n {
            let a = m[r][c].abs_val();
            if a > best {
                best = a;
                piv = r;
            }
        }
        if best.is_zero() {
            return S::zero();
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        let p = m[c][c].clone();
        d = d * p.clone();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone() / p.clone();
            for k in c..n {
                let t = m[c][k].clone() * f.clone();
                m[r][k] = m[r][k].clone() - t;
            }
        }
    }
    d
}

/// Solves a square system. Returns `None` for singular matrices.
pub fn solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = a.len();
    for c in 0..n {
        let mut piv = c;
        let mut best = a[c][c].abs_val();
        for r in c + 1..n {
            let v = a[r][c].abs_val();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best.is_zero() {
            return None;
        }
        a.swap(piv, c);
        b.swap(piv, c);
        let p = a[c][c].clone();
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() / p.clone();
            for k in c..n {
                let t = a[c][k].clone() * f.clone();
                a[r][k] = a[r][k].clone() - t;
            }
            let t = b[c].clone() * f;
            b[r] = b[r].clone() - t;
        }
    }
    Some((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

/// Reduced row echelon form over Q; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for k in c..cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let t = &m[r][k] * &f;
                    m[i][k] = &m[i][k] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn rank_z<'a>(rows: impl IntoIterator<Item = &'a IVec>) -> usize {
    let m: Vec<Vec<Q>> = rows.into_iter().map(|r| z_to_q(r)).collect();
    rank_q(&m)
}

/// Outcome of solving a possibly overdetermined linear system exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution {
    Unique(Vec<Q>),
    Inconsistent,
    Underdetermined,
}

/// Solves `rows * x = rhs` exactly.
pub fn solve_exact(rows: &[Vec<Q>], rhs: &[Q]) -> LinearSolution {
    let n = rows.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return LinearSolution::Inconsistent;
    }
    if pivots.len() < n {
        return LinearSolution::Underdetermined;
    }
    LinearSolution::Unique((0..n).map(|i| aug[i][n].clone()).collect())
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn det_z(mut m: Vec<IVec>) -> Z {
    let n = m.len();
    if n == 0 {
        return Z::one();
    }
    let mut sign = Z::one();
    let mut prev = Z::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Z::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Generalized cross product of `n - 1` integer vectors in `Z^n`: the vector
/// of signed maximal minors. It is orthogonal to every input row and is
/// nonzero exactly when the rows are independent.
pub fn cross_z(rows: &[&IVec]) -> IVec {
    let n = rows.len() + 1;
    (0..n)
        .map(|j| {
            let minor: Vec<IVec> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = det_z(minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Best rational approximation with denominator at most `max_den`, by
/// continued fractions.
pub fn rationalize(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    Q::new(Z::from(p1), Z::from(q1))
}

pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_q(" -4 ").unwrap(), qi(-4));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&q(-3, 9)), "-1/3");
        assert_eq!(fmt_q(&qi(7)), "7");
    }

    #[test]
    fn det_matches_bareiss() {
        let m = vec![ivec(&[2, -1, 3]), ivec(&[0, 4, 1]), ivec(&[5, 2, -2])];
        let dz = det_z(m.clone());
        let dq = det(m.iter().map(|r| z_to_q(r)).collect::<Vec<_>>());
        assert_eq!(Q::from_integer(dz.clone()), dq);
        assert_eq!(dz, Z::from(-85));
        let df = det(vec![
            vec![2.0, -1.0, 3.0],
            vec![0.0, 4.0, 1.0],
            vec![5.0, 2.0, -2.0],
        ]);
        assert!((df + 85.0).abs() < 1e-12);
    }

    #[test]
    fn cross_is_orthogonal() {
        let a = ivec(&[1, 1, 0]);
        let b = ivec(&[1, 1, 1]);
        let c = cross_z(&[&a, &b]);
        assert_eq!(dot_z(&c, &a), Z::zero());
        assert_eq!(dot_z(&c, &b), Z::zero());
        assert!(c.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn annihilator_basis_spans_lattice() {
        let b = lattice_annihilator_basis(&ivec(&[1, 1, 1]));
        assert_eq!(b, vec![ivec(&[1, -1, 0]), ivec(&[1, 0, -1])]);
        let b = lattice_annihilator_basis(&ivec(&[1, 0, 0]));
        assert_eq!(b, vec![ivec(&[0, 1, 0]), ivec(&[0, 0, 1])]);
        // No unit entry: the basis must still have unit covolume, i.e. the
        // gcd of its maximal minors is 1.
        let w = ivec(&[6, 10, 15]);
        let b = lattice_annihilator_basis(&w);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert_eq!(dot_z(v, &w), Z::zero());
        }
        let c: IVec = cross_z(&[&b[0], &b[1]]).iter().map(|x| x.abs()).collect();
        assert_eq!(c, ivec(&[6, 10, 15]));
    }

    #[test]
    fn float_hyperplane_basis_is_orthonormal() {
        let n = [3.0, 1.5, 1.5];
        let b = f64::hyperplane_basis(&n);
        assert_eq!(b.len(), 2);
        for (i, u) in b.iter().enumerate() {
            assert!(dot(u, &n).abs() < 1e-12);
            for (j, v) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(u, v) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_solve_classifies() {
        let rows = vec![qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])];
        assert_eq!(
            solve_exact(&rows, &qvec(&[-1, -1, -2])),
            LinearSolution::Unique(qvec(&[-1, -1]))
        );
        assert_eq!(
            solve_exact(&rows, &qvec(&[-1, -1, -1])),
            LinearSolution::Inconsistent
        );
        assert_eq!(
            solve_exact(&rows[..1], &qvec(&[-1])),
            LinearSolution::Underdetermined
        );
    }

    #[test]
    fn continued_fraction_recovers_simple_rationals() {
        assert_eq!(rationalize(1.5, 1_000_000), q(3, 2));
        assert_eq!(rationalize(1.0 / 3.0 + 1e-14, 1_000_000), q(1, 3));
        assert_eq!(rationalize(-0.25, 100), q(-1, 4));
    }

    #[test]
    fn exact_sqrt_of_squares() {
        assert_eq!(q(9, 4).exact_sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).exact_sqrt(), None);
    }
}
