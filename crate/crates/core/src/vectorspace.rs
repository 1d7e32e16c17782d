//! Dense vectors in `R^n` and the product space `(R^n)^m`.
//!
//! Blocks are stored 0-based. The circular right-shift `R` maps
//! `(x_0, x_1, ..., x_{m-1})` to `(x_{m-1}, x_0, ..., x_{m-2})`, so block `i` of
//! `R x` is block `i - 1 (mod m)` of `x`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^n` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Vector(coords))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Vector(vec![0.0; n])
    }

    /// Builds a vector from coordinates that are finite by construction.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Vector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.map(|v| -v)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.map(|v| self * v)
    }
}

/// A point of the product space `(R^n)^m`, `m >= 2`.
///
/// Serializes as nested arrays `[[x_0...], ..., [x_{m-1}...]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ProductPoint {
    blocks: Vec<Vector>,
}

impl ProductPoint {
    pub fn new(blocks: Vec<Vector>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::TooFewBlocks(blocks.len()));
        }
        let n = blocks[0].dim();
        for b in &blocks[1..] {
            b.check_dim(n)?;
        }
        Ok(ProductPoint { blocks })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let blocks = rows
            .into_iter()
            .map(Vector::new)
            .collect::<Result<Vec<_>>>()?;
        ProductPoint::new(blocks)
    }

    /// Splits a flat slice of length `m * n` into `m` consecutive blocks.
    pub fn from_flat(m: usize, n: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: m * n,
                found: flat.len(),
            });
        }
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        ProductPoint::from_rows(flat.chunks(n).map(<[f64]>::to_vec).collect())
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        assert!(m >= 2, "product point needs at least 2 blocks");
        ProductPoint {
            blocks: vec![Vector::zeros(n); m],
        }
    }

    /// The diagonal point `(v, v, ..., v)`.
    pub fn diagonal(v: &Vector, m: usize) -> Self {
        assert!(m >= 2, "product point needs at least 2 blocks");
        ProductPoint {
            blocks: vec![v.clone(); m],
        }
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<Vector>) -> Self {
        debug_assert!(blocks.len() >= 2);
        ProductPoint { blocks }
    }

    /// Number of blocks `m`.
    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// Block dimension `n`.
    pub fn dim(&self) -> usize {
        self.blocks[0].dim()
    }

    pub fn blocks(&self) -> &[Vector] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Vector {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<Vector> {
        self.blocks
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| b.as_slice().iter().copied())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.blocks.iter().map(|b| b.as_slice().to_vec()).collect()
    }

    pub fn dot(&self, other: &ProductPoint) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &ProductPoint) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let d = a.distance(b);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `sum_i x_i`, the component that is orthogonal to `D^perp`.
    pub fn block_sum(&self) -> Vector {
        let mut acc = vec![0.0; self.dim()];
        for b in &self.blocks {
            for (a, v) in acc.iter_mut().zip(b.as_slice()) {
                *a += v;
            }
        }
        Vector::from_raw(acc)
    }

    pub fn block_mean(&self) -> Vector {
        let m = self.m() as f64;
        self.block_sum().map(|v| v / m)
    }

    pub fn map_blocks(&self, f: impl Fn(&Vector) -> Vector) -> ProductPoint {
        ProductPoint::from_blocks_unchecked(self.blocks.iter().map(f).collect())
    }

    pub fn zip_map(&self, other: &ProductPoint, f: impl Fn(f64, f64) -> f64) -> ProductPoint {
        debug_assert_eq!(self.m(), other.m());
        ProductPoint::from_blocks_unchecked(
            self.blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.zip_map(b, &f))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> ProductPoint {
        self.map_blocks(|b| s * b)
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &ProductPoint, t: f64) -> ProductPoint {
        self.zip_map(other, |a, b| (1.0 - t) * a + t * b)
    }

    pub(crate) fn check_shape(&self, m: usize, n: usize) -> Result<()> {
        if self.m() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.m(),
            });
        }
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for ProductPoint {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        ProductPoint::from_rows(rows)
    }
}

impl From<ProductPoint> for Vec<Vec<f64>> {
    fn from(p: ProductPoint) -> Self {
        p.blocks.into_iter().map(Vector::into_inner).collect()
    }
}

impl Add for &ProductPoint {
    type Output = ProductPoint;

    fn add(self, rhs: &ProductPoint) -> ProductPoint {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &ProductPoint {
    type Output = ProductPoint;

    fn sub(self, rhs: &ProductPoint) -> ProductPoint {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Neg for &ProductPoint {
    type Output = ProductPoint;

    fn neg(self) -> ProductPoint {
        self.scale(-1.0)
    }
}

impl fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Circular right-shift `R`.
pub fn shift(x: &ProductPoint) -> ProductPoint {
    let mut blocks = x.blocks.clone();
    blocks.rotate_right(1);
    ProductPoint::from_blocks_unchecked(blocks)
}

/// Inverse of [`shift`].
pub fn unshift(x: &ProductPoint) -> ProductPoint {
    let mut blocks = x.blocks.clone();
    blocks.rotate_left(1);
    ProductPoint::from_blocks_unchecked(blocks)
}

/// `(Id - R) x`, i.e. block `i` is `x_i - x_{i-1}`.
pub fn displacement(x: &ProductPoint) -> ProductPoint {
    x - &shift(x)
}

/// Orthogonal projection onto the diagonal subspace: every block becomes the block mean.
pub fn project_diagonal(x: &ProductPoint) -> ProductPoint {
    ProductPoint::diagonal(&x.block_mean(), x.m())
}

/// Minimum-norm solution of `(Id - R) x = y`.
///
/// The full solution set is `particular + D`, where `D` is the diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSolution {
    pub particular: ProductPoint,
}

impl DisplacementSolution {
    /// Whether `x` lies in `particular + D` up to `tol`.
    pub fn contains(&self, x: &ProductPoint, tol: f64) -> bool {
        self.offset_from_family(x) <= tol
    }

    /// Distance from `x` to `particular + D`.
    pub fn offset_from_family(&self, x: &ProductPoint) -> f64 {
        let d = x - &self.particular;
        d.distance(&project_diagonal(&d))
    }
}

/// Solves `x_i - x_{i-1} = y_i` (indices mod `m`) by cumulative sums, then
/// removes the block mean to land on the minimum-norm solution.
pub fn solve_displacement(y: &ProductPoint, tol: f64) -> Result<DisplacementSolution> {
    let block_sum_norm = y.block_sum().norm();
    if block_sum_norm > tol {
        return Err(Error::NotInRange {
            block_sum_norm,
            tol,
        });
    }
    let n = y.dim();
    let mut blocks = Vec::with_capacity(y.m());
    blocks.push(Vector::zeros(n));
    for i in 1..y.m() {
        let next = &blocks[i - 1] + y.block(i);
        blocks.push(next);
    }
    let raw = ProductPoint::from_blocks_unchecked(blocks);
    let mean = raw.block_mean();
    Ok(DisplacementSolution {
        particular: raw.map_blocks(|b| b - &mean),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(rows: &[&[f64]]) -> ProductPoint {
        ProductPoint::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn shift_rotates_blocks_right() {
        let x = pp(&[&[1.0], &[2.0], &[3.0]]);
        assert_eq!(shift(&x), pp(&[&[3.0], &[1.0], &[2.0]]));
        let ab = pp(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(shift(&ab), pp(&[&[3.0, 4.0], &[1.0, 2.0]]));
    }

    #[test]
    fn shift_has_order_m() {
        let x = pp(&[&[1.0], &[2.0], &[3.0], &[4.0]]);
        let mut y = x.clone();
        for _ in 0..4 {
            y = shift(&y);
        }
        assert_eq!(x, y);
    }

    #[test]
    fn unshift_inverts_shift() {
        let x = pp(&[&[3.0], &[1.0], &[2.0]]);
        assert_eq!(unshift(&x), pp(&[&[1.0], &[2.0], &[3.0]]));
        let ba = pp(&[&[2.0], &[1.0]]);
        assert_eq!(unshift(&ba), pp(&[&[1.0], &[2.0]]));
    }

    #[test]
    fn displacement_examples() {
        let diag = pp(&[&[1.5, -2.0], &[1.5, -2.0], &[1.5, -2.0]]);
        assert_eq!(displacement(&diag), ProductPoint::zeros(3, 2));

        let x = pp(&[&[2.0 / 3.0], &[4.0 / 3.0]]);
        let d = displacement(&x);
        assert!((d.block(0)[0] + 2.0 / 3.0).abs() < 1e-15);
        assert!((d.block(1)[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn project_diagonal_examples() {
        let a = pp(&[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]]);
        assert_eq!(project_diagonal(&a), a);
        assert_eq!(
            project_diagonal(&pp(&[&[0.0], &[2.0]])),
            pp(&[&[1.0], &[1.0]])
        );
    }

    #[test]
    fn solve_displacement_examples() {
        let y = pp(&[&[1.0], &[0.0], &[-1.0]]);
        let sol = solve_displacement(&y, 1e-12).unwrap();
        let expected = [1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0];
        for (b, e) in sol.particular.blocks().iter().zip(expected) {
            assert!((b[0] - e).abs() < 1e-15);
        }

        let zero = ProductPoint::zeros(3, 2);
        assert_eq!(solve_displacement(&zero, 1e-12).unwrap().particular, zero);

        let bad = pp(&[&[1.0], &[1.0], &[1.0]]);
        assert!(matches!(
            solve_displacement(&bad, 1e-9),
            Err(Error::NotInRange { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_shapes() {
        assert!(matches!(Vector::new(vec![]), Err(Error::EmptyVector)));
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            ProductPoint::from_rows(vec![vec![1.0]]),
            Err(Error::TooFewBlocks(1))
        ));
        assert!(matches!(
            ProductPoint::from_rows(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn wire_format_is_nested_arrays() {
        let x = pp(&[&[1.0, 2.0], &[3.0, 4.5]]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.5]]");
        let back: ProductPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<ProductPoint>("[[1.0]]").is_err());
    }
}
