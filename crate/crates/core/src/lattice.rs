//! Exact rational intersection lattices.
//!
//! A lattice is a symmetric Gram matrix on a fixed, named basis. Divisor
//! classes are coordinate vectors in that basis and the pairing is
//! `aᵀ · gram · b`. Negative definiteness of a set of classes is decided by
//! the signs of the leading principal minors of their Gram matrix, which also
//! serve as a certificate.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, serde_rational, Rational};

/// A numerical divisor class: exact coordinates in a lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(#[serde(with = "serde_rational::vec")] Vec<Rational>);

impl DivisorClass {
    pub fn new(coords: Vec<Rational>) -> Self {
        DivisorClass(coords)
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass(vec![Rational::zero(); rank])
    }

    /// The `i`-th basis vector.
    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = crate::rational::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        DivisorClass(coords.iter().map(|&c| crate::rational::int(c)).collect())
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        DivisorClass(self.0.iter().map(|x| x * c).collect())
    }

    /// Appends `extra` zero coordinates (the pullback along blow-ups, in the
    /// pullback basis).
    pub fn padded(&self, extra: usize) -> Self {
        let mut v = self.0.clone();
        v.extend(std::iter::repeat_n(Rational::zero(), extra));
        DivisorClass(v)
    }

    pub(crate) fn coords_mut(&mut self) -> &mut Vec<Rational> {
        &mut self.0
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &DivisorClass) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(x))?;
        }
        f.write_str("]")
    }
}

impl Add<&DivisorClass> for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        debug_assert_eq!(self.len(), rhs.len());
        DivisorClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&DivisorClass> for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        debug_assert_eq!(self.len(), rhs.len());
        DivisorClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl AddAssign<&DivisorClass> for DivisorClass {
    fn add_assign(&mut self, rhs: &DivisorClass) {
        debug_assert_eq!(self.len(), rhs.len());
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl SubAssign<&DivisorClass> for DivisorClass {
    fn sub_assign(&mut self, rhs: &DivisorClass) {
        debug_assert_eq!(self.len(), rhs.len());
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a -= b;
        }
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&DivisorClass> for &Rational {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scaled(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: &Rational) -> Sign {
        if x.is_negative() {
            Sign::Negative
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Zero
        }
    }
}

/// Leading principal minors of a Gram matrix on an ordered list of classes.
/// Valid iff the `k`-th minor has sign `(-1)^k` for every `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegDefCertificate {
    pub curve_indices: Vec<usize>,
    #[serde(with = "serde_rational::vec")]
    pub minors: Vec<Rational>,
    pub minor_signs: Vec<Sign>,
}

impl NegDefCertificate {
    pub fn is_valid(&self) -> bool {
        self.minor_signs.iter().enumerate().all(|(k, s)| {
            let expected = if k % 2 == 0 {
                Sign::Negative
            } else {
                Sign::Positive
            };
            *s == expected
        })
    }

    /// Certificate for the given Gram matrix.
    pub fn for_matrix(curve_indices: Vec<usize>, gram: &[Vec<Rational>]) -> Self {
        let minors = leading_principal_minors(gram);
        let minor_signs = minors.iter().map(Sign::of).collect();
        NegDefCertificate {
            curve_indices,
            minors,
            minor_signs,
        }
    }
}

/// Symmetric intersection pairing on a named basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionLattice {
    basis_names: Vec<String>,
    #[serde(serialize_with = "serialize_matrix")]
    gram: Vec<Vec<Rational>>,
}

fn serialize_matrix<S: serde::Serializer>(
    m: &[Vec<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        let row: Vec<String> = row.iter().map(format_rational).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

impl IntersectionLattice {
    pub fn new(gram: Vec<Vec<Rational>>, basis_names: Vec<String>) -> Result<Self> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::invariant("lattice rank must be positive"));
        }
        for row in &gram {
            if row.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: row.len(),
                });
            }
        }
        if basis_names.len() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: basis_names.len(),
            });
        }
        for i in 0..rank {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::invariant(format!(
                        "gram is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(IntersectionLattice { basis_names, gram })
    }

    /// Diagonal lattice, e.g. `diag(1, -1, ..., -1)` for a blown-up plane.
    pub fn diagonal(entries: &[Rational], basis_names: Vec<String>) -> Result<Self> {
        let n = entries.len();
        let gram = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            entries[i].clone()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(gram, basis_names)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    fn check(&self, a: &DivisorClass) -> Result<()> {
        if a.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: a.len(),
            });
        }
        Ok(())
    }

    /// `aᵀ · gram · b`.
    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Rational> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dot(a, b))
    }

    pub(crate) fn dot(&self, a: &DivisorClass, b: &DivisorClass) -> Rational {
        let mut total = Rational::zero();
        for (i, ai) in a.coords().iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let mut row = Rational::zero();
            for (j, bj) in b.coords().iter().enumerate() {
                if !bj.is_zero() && !self.gram[i][j].is_zero() {
                    row += &self.gram[i][j] * bj;
                }
            }
            total += ai * row;
        }
        total
    }

    pub fn self_intersection(&self, a: &DivisorClass) -> Result<Rational> {
        self.intersect(a, a)
    }

    /// Gram matrix of the pairing restricted to `classes`.
    pub fn gram_of(&self, classes: &[&DivisorClass]) -> Result<Vec<Vec<Rational>>> {
        for c in classes {
            self.check(c)?;
        }
        Ok(classes
            .iter()
            .map(|a| classes.iter().map(|b| self.dot(a, b)).collect())
            .collect())
    }

    /// Leading-minor test on the Gram matrix of `classes` in the given order.
    /// `indices` label the classes in the certificate. The empty set is
    /// negative definite.
    pub fn negative_definite(
        &self,
        indices: &[usize],
        classes: &[&DivisorClass],
    ) -> Result<NegDefCertificate> {
        if indices.len() != classes.len() {
            return Err(Error::DimensionMismatch {
                expected: classes.len(),
                found: indices.len(),
            });
        }
        let gram = self.gram_of(classes)?;
        Ok(NegDefCertificate::for_matrix(indices.to_vec(), &gram))
    }

    /// Coefficients `x` with `(Σ x_i C_i) · C_j = targets[j]` for all `j`.
    pub fn solve_on_support(
        &self,
        support: &[&DivisorClass],
        targets: &[Rational],
    ) -> Result<Vec<Rational>> {
        if support.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                found: targets.len(),
            });
        }
        let gram = self.gram_of(support)?;
        linalg::solve_square(&gram, targets).ok_or_else(|| Error::Singular {
            support: (0..support.len()).map(|i| format!("#{i}")).collect(),
        })
    }
}

/// Dense exact linear algebra on small rational matrices.
pub mod linalg {
    use super::*;

    pub type Matrix = Vec<Vec<Rational>>;

    pub fn determinant(m: &[Vec<Rational>]) -> Rational {
        let n = m.len();
        let mut a: Matrix = m.to_vec();
        let mut det = crate::rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &p;
                for c in col..n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
        det
    }

    /// Determinants of the leading `k × k` submatrices, `k = 1..=n`.
    pub fn leading_principal_minors(m: &[Vec<Rational>]) -> Vec<Rational> {
        let n = m.len();
        let mut minors = Vec::with_capacity(n);
        // Elimination without pivoting: the k-th minor is the product of
        // the first k pivots as long as none of them vanished.
        let mut a: Matrix = m.to_vec();
        let mut running = crate::rational::one();
        for k in 0..n {
            let p = a[k][k].clone();
            if p.is_zero() {
                for j in k..n {
                    let sub: Matrix = m[..=j].iter().map(|row| row[..=j].to_vec()).collect();
                    minors.push(determinant(&sub));
                }
                return minors;
            }
            running *= &p;
            minors.push(running.clone());
            for r in k + 1..n {
                if a[r][k].is_zero() {
                    continue;
                }
                let f = &a[r][k] / &p;
                for c in k..n {
                    let delta = &f * &a[k][c];
                    a[r][c] -= delta;
                }
            }
        }
        minors
    }

    /// Unique solution of the square system `m x = b`, or `None` if `m` is
    /// singular.
    pub fn solve_square(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
        let n = m.len();
        let mut a: Matrix = m
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(pivot, col);
            let p = a[col][col].clone();
            for c in col..=n {
                a[col][c] /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
        Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
    }

    /// Some solution of the (possibly rectangular) system `a x = b`, with
    /// free variables set to zero; `None` if inconsistent.
    pub fn solve_any(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut m: Matrix = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r.push(bi.clone());
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(p, r);
            let pv = m[r][c].clone();
            for k in c..=cols {
                m[r][k] /= &pv;
            }
            for i in 0..rows {
                if i == r || m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].clone();
                for k in c..=cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        if m[r..].iter().any(|row| !row[cols].is_zero()) {
            return None;
        }
        let mut x = vec![Rational::zero(); cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = m[i][cols].clone();
        }
        Some(x)
    }

    pub fn rank(a: &[Vec<Rational>]) -> usize {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut m: Matrix = a.to_vec();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(p, r);
            for i in r + 1..rows {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let delta = &f * &m[r][k];
                    m[i][k] -= delta;
                }
            }
            r += 1;
            if r == rows {
                break;
            }
        }
        r
    }
}

pub use linalg::leading_principal_minors;
