//! Maximally monotone operators represented by their resolvents.
//!
//! Every operator exposes `resolve(x, λ) = J_{λA}(x) = (Id + λA)^{-1}(x)`.
//! Scaling an operator by `γ > 0` is the same as resolving with `λ = γ`, so no
//! separate scaling transform exists.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{from_dvector, lu_inverse, lu_solve, to_dvector};
use crate::vectorspace::{ProductPoint, Vector};

/// Tolerance on the smallest eigenvalue of the symmetric part of an affine
/// operator's matrix, relative to `max(1, ||M||)`.
pub const MONOTONICITY_TOL: f64 = 1e-10;

/// The affine single-valued operator `v ↦ M v + b` with `M + Mᵀ ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    offset: Vector,
}

impl AffineMap {
    /// Builds the map from row-major matrix rows, checking squareness and monotonicity.
    pub fn new(rows: Vec<Vec<f64>>, offset: Vector) -> Result<Self> {
        let n = offset.dim();
        if rows.len() != n {
            return Err(Error::InvalidOperator(format!(
                "affine matrix has {} rows, expected {n}",
                rows.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidOperator(format!(
                    "affine matrix row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidOperator(format!(
                    "affine matrix row {i} is not finite"
                )));
            }
            flat.extend_from_slice(r);
        }
        Self::from_matrix(DMatrix::from_row_slice(n, n, &flat), offset)
    }

    pub fn from_matrix(matrix: DMatrix<f64>, offset: Vector) -> Result<Self> {
        let n = offset.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidOperator(format!(
                "affine matrix is {}x{}, expected {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let scale = matrix.norm().max(1.0);
        if min_eig < -MONOTONICITY_TOL * scale {
            return Err(Error::InvalidOperator(format!(
                "affine matrix is not monotone (symmetric part has eigenvalue {min_eig:e})"
            )));
        }
        Ok(AffineMap { matrix, offset })
    }

    /// `v ↦ s v + b` on `R^n`.
    pub fn scalar(n: usize, s: f64, offset: Vector) -> Result<Self> {
        Self::from_matrix(DMatrix::identity(n, n) * s, offset)
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &from_dvector(&(&self.matrix * to_dvector(x))) + &self.offset
    }

    /// `y ↦ M^{-1}(y - b)`, failing when `M` is singular.
    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = lu_inverse(&self.matrix)?;
        let offset = -&from_dvector(&(&inv * to_dvector(&self.offset)));
        Ok(AffineMap {
            matrix: inv,
            offset,
        })
    }

    /// `(-Id) ∘ B ∘ (-Id)`, which for `v ↦ Mv + b` is `v ↦ Mv - b`.
    pub fn ovee(&self) -> AffineMap {
        AffineMap {
            matrix: self.matrix.clone(),
            offset: -&self.offset,
        }
    }

    fn resolve(&self, x: &Vector, lambda: f64) -> Result<Vector> {
        let n = self.dim();
        let lhs = DMatrix::identity(n, n) + &self.matrix * lambda;
        let rhs = to_dvector(&(x - &(lambda * &self.offset)));
        Ok(from_dvector(&lu_solve(&lhs, &rhs)?))
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidOperator(format!(
                "ball radius must be >= 0, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.distance(&self.center) <= self.radius
    }

    fn project(&self, x: &Vector) -> Vector {
        let d = x.distance(&self.center);
        if d <= self.radius {
            // includes x == center
            return x.clone();
        }
        let t = self.radius / d;
        x.zip_map(&self.center, |xi, ci| ci + t * (xi - ci))
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSet {
    lower: Vector,
    upper: Vector,
}

impl BoxSet {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        upper.check_dim(lower.dim())?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidOperator(format!(
                "box lower bound exceeds upper bound at coordinate {i}"
            )));
        }
        Ok(BoxSet { lower, upper })
    }

    pub fn lower(&self) -> &Vector {
        &self.lower
    }

    pub fn upper(&self) -> &Vector {
        &self.upper
    }

    pub fn contains(&self, x: &Vector) -> bool {
        (0..x.dim()).all(|i| self.lower[i] <= x[i] && x[i] <= self.upper[i])
    }

    fn project(&self, x: &Vector) -> Vector {
        Vector::from_raw(
            (0..x.dim())
                .map(|i| x[i].clamp(self.lower[i], self.upper[i]))
                .collect(),
        )
    }
}

/// Halfspace `{v : ⟨a, v⟩ <= β}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    normal: Vector,
    bound: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, bound: f64) -> Result<Self> {
        if normal.norm() == 0.0 {
            return Err(Error::InvalidOperator(
                "halfspace normal must be nonzero".into(),
            ));
        }
        if !bound.is_finite() {
            return Err(Error::InvalidOperator(
                "halfspace bound must be finite".into(),
            ));
        }
        Ok(Halfspace { normal, bound })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.normal.dot(x) <= self.bound
    }

    fn project(&self, x: &Vector) -> Vector {
        let excess = self.normal.dot(x) - self.bound;
        if excess <= 0.0 {
            return x.clone();
        }
        let t = excess / self.normal.norm_squared();
        x.zip_map(&self.normal, |xi, ai| xi - t * ai)
    }
}

/// Affine subspace `p + span(basis)`; the basis is orthonormalized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    point: Vector,
    orthonormal: Vec<Vector>,
}

impl AffineSubspace {
    pub fn new(point: Vector, basis: Vec<Vector>) -> Result<Self> {
        let n = point.dim();
        let mut orthonormal: Vec<Vector> = Vec::new();
        for b in basis {
            b.check_dim(n)?;
            let scale = b.norm();
            let mut v = b;
            // modified Gram-Schmidt, twice for stability
            for _ in 0..2 {
                for q in &orthonormal {
                    let c = q.dot(&v);
                    v = v.zip_map(q, |vi, qi| vi - c * qi);
                }
            }
            let norm = v.norm();
            if norm > 1e-12 * scale.max(1.0) {
                orthonormal.push(v.map(|vi| vi / norm));
            }
        }
        Ok(AffineSubspace { point, orthonormal })
    }

    pub fn point(&self) -> &Vector {
        &self.point
    }

    pub fn orthonormal_basis(&self) -> &[Vector] {
        &self.orthonormal
    }

    fn project(&self, x: &Vector) -> Vector {
        let d = x - &self.point;
        let mut out = self.point.clone();
        for q in &self.orthonormal {
            let c = q.dot(&d);
            out = out.zip_map(q, |oi, qi| oi + c * qi);
        }
        out
    }
}

/// A maximally monotone operator on `R^n`, evaluated through its resolvent.
#[derive(Clone, Debug, PartialEq)]
pub enum ResolventOperator {
    /// `A = 0`, so `J = Id`.
    Zero {
        dim: usize,
    },
    Affine(AffineMap),
    /// Normal cone of a ball; the resolvent is the projection.
    Ball(Ball),
    /// Normal cone of a box.
    Box(BoxSet),
    /// Normal cone of a halfspace.
    Halfspace(Halfspace),
    /// Normal cone of an affine subspace.
    AffineSet(AffineSubspace),
    /// `A^{-1}` of the inner operator.
    Inverse(Box<ResolventOperator>),
    /// `(-Id) ∘ A ∘ (-Id)` of the inner operator.
    Ovee(Box<ResolventOperator>),
}

impl ResolventOperator {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(ResolventOperator::Zero { dim })
    }

    pub fn affine(rows: Vec<Vec<f64>>, offset: Vector) -> Result<Self> {
        Ok(ResolventOperator::Affine(AffineMap::new(rows, offset)?))
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        Ok(ResolventOperator::Ball(Ball::new(center, radius)?))
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        Ok(ResolventOperator::Box(BoxSet::new(lower, upper)?))
    }

    pub fn halfspace(normal: Vector, bound: f64) -> Result<Self> {
        Ok(ResolventOperator::Halfspace(Halfspace::new(normal, bound)?))
    }

    pub fn affine_set(point: Vector, basis: Vec<Vector>) -> Result<Self> {
        Ok(ResolventOperator::AffineSet(AffineSubspace::new(
            point, basis,
        )?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ResolventOperator::Zero { dim } => *dim,
            ResolventOperator::Affine(a) => a.dim(),
            ResolventOperator::Ball(b) => b.center.dim(),
            ResolventOperator::Box(b) => b.lower.dim(),
            ResolventOperator::Halfspace(h) => h.normal.dim(),
            ResolventOperator::AffineSet(s) => s.point.dim(),
            ResolventOperator::Inverse(inner) | ResolventOperator::Ovee(inner) => inner.dim(),
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            ResolventOperator::Zero { .. } => "zero".into(),
            ResolventOperator::Affine(_) => "affine".into(),
            ResolventOperator::Ball(_) => "ball".into(),
            ResolventOperator::Box(_) => "box".into(),
            ResolventOperator::Halfspace(_) => "halfspace".into(),
            ResolventOperator::AffineSet(_) => "affine_set".into(),
            ResolventOperator::Inverse(inner) => format!("inverse({})", inner.kind_name()),
            ResolventOperator::Ovee(inner) => format!("ovee({})", inner.kind_name()),
        }
    }

    /// Normal-cone kinds, whose resolvent does not depend on `λ`.
    pub fn is_normal_cone(&self) -> bool {
        matches!(
            self,
            ResolventOperator::Ball(_)
                | ResolventOperator::Box(_)
                | ResolventOperator::Halfspace(_)
                | ResolventOperator::AffineSet(_)
        )
    }

    pub fn as_affine(&self) -> Option<&AffineMap> {
        match self {
            ResolventOperator::Affine(a) => Some(a),
            _ => None,
        }
    }

    /// `J_{λA}(x)`.
    pub fn resolve(&self, x: &Vector, lambda: f64) -> Result<Vector> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidSettings(format!(
                "resolvent parameter must be positive, got {lambda}"
            )));
        }
        x.check_dim(self.dim())?;
        self.resolve_unchecked(x, lambda)
    }

    fn resolve_unchecked(&self, x: &Vector, lambda: f64) -> Result<Vector> {
        match self {
            ResolventOperator::Zero { .. } => Ok(x.clone()),
            ResolventOperator::Affine(a) => a.resolve(x, lambda),
            ResolventOperator::Ball(b) => Ok(b.project(x)),
            ResolventOperator::Box(b) => Ok(b.project(x)),
            ResolventOperator::Halfspace(h) => Ok(h.project(x)),
            ResolventOperator::AffineSet(s) => Ok(s.project(x)),
            ResolventOperator::Inverse(inner) => {
                // J_{λA^{-1}}(x) = x - λ J_{A/λ}(x/λ)
                let scaled = x.map(|v| v / lambda);
                let j = inner.resolve_unchecked(&scaled, 1.0 / lambda)?;
                Ok(x.zip_map(&j, |xi, ji| xi - lambda * ji))
            }
            ResolventOperator::Ovee(inner) => {
                let j = inner.resolve_unchecked(&(-x), lambda)?;
                Ok(-&j)
            }
        }
    }

    /// Whether `y ∈ A(z)`, tested through `J_A(z + y) = z`.
    pub fn contains_pair(&self, z: &Vector, y: &Vector, tol: f64) -> Result<bool> {
        Ok(self.membership_residual(z, y)? <= tol)
    }

    /// `||J_A(z + y) - z||`, zero exactly when `y ∈ A(z)`.
    pub fn membership_residual(&self, z: &Vector, y: &Vector) -> Result<f64> {
        Ok(self.resolve(&(z + y), 1.0)?.distance(z))
    }
}

/// `A^{-1}`, with `resolve(x, λ) = x - λ · resolve(op, x/λ, 1/λ)`.
pub fn inverse(op: &ResolventOperator) -> ResolventOperator {
    ResolventOperator::Inverse(Box::new(op.clone()))
}

/// `A^⊻ = (-Id) ∘ A ∘ (-Id)`, with `resolve(x, λ) = -resolve(op, -x, λ)`.
pub fn ovee(op: &ResolventOperator) -> ResolventOperator {
    ResolventOperator::Ovee(Box::new(op.clone()))
}

/// `‖x−y‖² − ‖Jx−Jy‖² − ‖(x−Jx)−(y−Jy)‖²`; nonnegative for a firmly nonexpansive `J`.
pub fn firm_nonexpansive_slack(
    op: &ResolventOperator,
    x: &Vector,
    y: &Vector,
    lambda: f64,
) -> Result<f64> {
    let jx = op.resolve(x, lambda)?;
    let jy = op.resolve(y, lambda)?;
    let d = x.distance(y);
    let dj = jx.distance(&jy);
    let rx = x - &jx;
    let ry = y - &jy;
    let dr = rx.distance(&ry);
    Ok(d * d - dj * dj - dr * dr)
}

/// `A = A_0 × A_1 × ... × A_{m-1}` acting blockwise on `(R^n)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOperator {
    factors: Vec<ResolventOperator>,
}

impl ProductOperator {
    pub fn new(factors: Vec<ResolventOperator>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::TooFewBlocks(factors.len()));
        }
        let n = factors[0].dim();
        for f in &factors[1..] {
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.dim(),
                });
            }
        }
        Ok(ProductOperator { factors })
    }

    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    pub fn factors(&self) -> &[ResolventOperator] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &ResolventOperator {
        &self.factors[i]
    }

    /// Resolvent of factor `i` with `λ = 1`, tagging errors with the block index.
    pub fn resolve_factor(&self, i: usize, x: &Vector) -> Result<Vector> {
        self.factors[i].resolve(x, 1.0).map_err(|e| e.in_block(i))
    }

    pub fn is_all_affine(&self) -> bool {
        self.factors.iter().all(|f| f.as_affine().is_some())
    }

    pub(crate) fn check_point(&self, x: &ProductPoint) -> Result<()> {
        x.check_shape(self.m(), self.dim())
    }
}

/// Blockwise resolvent `(J_{λA_0} x_0, ..., J_{λA_{m-1}} x_{m-1})`.
pub fn product_resolve(p: &ProductOperator, x: &ProductPoint, lambda: f64) -> Result<ProductPoint> {
    p.check_point(x)?;
    let blocks = p
        .factors
        .iter()
        .zip(x.blocks())
        .enumerate()
        .map(|(i, (f, b))| f.resolve(b, lambda).map_err(|e| e.in_block(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductPoint::from_blocks_unchecked(blocks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn scalar_affine(m: f64, b: f64) -> ResolventOperator {
        ResolventOperator::affine(vec![vec![m]], v(&[b])).unwrap()
    }

    #[test]
    fn zero_resolvent_is_identity() {
        let z = ResolventOperator::zero(3).unwrap();
        let x = v(&[1.0, -2.0, 3.5]);
        for lambda in [0.1, 1.0, 7.0] {
            assert_eq!(z.resolve(&x, lambda).unwrap(), x);
        }
    }

    #[test]
    fn affine_identity_halves() {
        let a = scalar_affine(1.0, 0.0);
        for x in [-3.0, 0.0, 1.0, 10.0] {
            let y = a.resolve(&v(&[x]), 1.0).unwrap();
            assert!((y[0] - x / 2.0).abs() < 1e-15);
            // x ∈ y + A y
            assert!((y[0] + y[0] - x).abs() < 1e-14);
        }
    }

    #[test]
    fn ball_projection_example() {
        let b = ResolventOperator::ball(v(&[-2.0, 0.0]), 1.0).unwrap();
        let p = b.resolve(&v(&[1.0, 0.0]), 1.0).unwrap();
        assert!(p.distance(&v(&[-1.0, 0.0])) < 1e-15);
        // the center maps to itself
        assert_eq!(b.resolve(&v(&[-2.0, 0.0]), 1.0).unwrap(), v(&[-2.0, 0.0]));
    }

    #[test]
    fn box_halfspace_and_affine_set_projections() {
        let bx = ResolventOperator::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        assert_eq!(bx.resolve(&v(&[2.0, -1.0]), 1.0).unwrap(), v(&[1.0, 0.0]));

        let h = ResolventOperator::halfspace(v(&[0.0, 2.0]), 2.0).unwrap();
        assert_eq!(h.resolve(&v(&[3.0, 5.0]), 1.0).unwrap(), v(&[3.0, 1.0]));
        assert_eq!(h.resolve(&v(&[3.0, -5.0]), 1.0).unwrap(), v(&[3.0, -5.0]));

        let line = ResolventOperator::affine_set(v(&[2.0, 0.0]), vec![v(&[0.0, 3.0])]).unwrap();
        assert_eq!(line.resolve(&v(&[-4.0, 7.0]), 1.0).unwrap(), v(&[2.0, 7.0]));
        let point = ResolventOperator::affine_set(v(&[1.0, 1.0]), vec![]).unwrap();
        assert_eq!(
            point.resolve(&v(&[-4.0, 7.0]), 1.0).unwrap(),
            v(&[1.0, 1.0])
        );
    }

    #[test]
    fn inverse_of_identity_is_identity() {
        let a = scalar_affine(1.0, 0.0);
        let inv = inverse(&a);
        for x in [-2.0, 0.5, 4.0] {
            assert!((inv.resolve(&v(&[x]), 1.0).unwrap()[0] - x / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ovee_examples() {
        let z = ovee(&ResolventOperator::zero(2).unwrap());
        let x = v(&[1.0, -1.0]);
        assert_eq!(z.resolve(&x, 1.0).unwrap(), x);

        // B(v) = v + 1, B^⊻(v) = v - 1, J_{B^⊻}(x) = (x + 1)/2
        let b = ovee(&scalar_affine(1.0, 1.0));
        for x in [-3.0, 0.0, 2.0] {
            let independent = scalar_affine(1.0, -1.0).resolve(&v(&[x]), 1.0).unwrap()[0];
            let got = b.resolve(&v(&[x]), 1.0).unwrap()[0];
            assert!((got - (x + 1.0) / 2.0).abs() < 1e-15);
            assert!((got - independent).abs() < 1e-15);
        }
    }

    #[test]
    fn projections_ignore_lambda() {
        let ops = [
            ResolventOperator::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            ResolventOperator::boxed(v(&[0.0, 0.0]), v(&[1.0, 2.0])).unwrap(),
            ResolventOperator::halfspace(v(&[1.0, 1.0]), 0.5).unwrap(),
            ResolventOperator::affine_set(v(&[0.0, 1.0]), vec![v(&[1.0, 1.0])]).unwrap(),
        ];
        let x = v(&[3.0, -2.0]);
        for op in &ops {
            assert!(op.is_normal_cone());
            assert_eq!(op.resolve(&x, 0.25).unwrap(), op.resolve(&x, 4.0).unwrap());
        }
    }

    #[test]
    fn invalid_operator_data_is_rejected() {
        assert!(ResolventOperator::ball(v(&[0.0]), -1.0).is_err());
        assert!(ResolventOperator::boxed(v(&[1.0]), v(&[0.0])).is_err());
        assert!(ResolventOperator::halfspace(v(&[0.0, 0.0]), 1.0).is_err());
        // rotation by more than 90 degrees is not monotone
        assert!(
            ResolventOperator::affine(vec![vec![-1.0, 0.0], vec![0.0, 1.0]], v(&[0.0, 0.0]))
                .is_err()
        );
        // skew-symmetric is monotone
        assert!(
            ResolventOperator::affine(vec![vec![0.0, 1.0], vec![-1.0, 0.0]], v(&[0.0, 0.0]))
                .is_ok()
        );
        assert!(scalar_affine(1.0, 0.0).resolve(&v(&[1.0]), 0.0).is_err());
        assert!(scalar_affine(1.0, 0.0)
            .resolve(&v(&[1.0, 2.0]), 1.0)
            .is_err());
    }

    #[test]
    fn product_resolve_blockwise() {
        let p =
            ProductOperator::new(vec![scalar_affine(1.0, 0.0), scalar_affine(1.0, -2.0)]).unwrap();
        let x = ProductPoint::from_rows(vec![vec![4.0 / 3.0], vec![2.0 / 3.0]]).unwrap();
        let y = product_resolve(&p, &x, 1.0).unwrap();
        assert!((y.block(0)[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((y.block(1)[0] - 4.0 / 3.0).abs() < 1e-15);

        let zeros = ProductOperator::new(vec![
            ResolventOperator::zero(2).unwrap(),
            ResolventOperator::zero(2).unwrap(),
            ResolventOperator::zero(2).unwrap(),
        ])
        .unwrap();
        let x =
            ProductPoint::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(product_resolve(&zeros, &x, 0.7).unwrap(), x);
    }

    #[test]
    fn product_operator_requires_matching_factors() {
        assert!(matches!(
            ProductOperator::new(vec![ResolventOperator::zero(1).unwrap()]),
            Err(Error::TooFewBlocks(1))
        ));
        assert!(ProductOperator::new(vec![
            ResolventOperator::zero(1).unwrap(),
            ResolventOperator::zero(2).unwrap()
        ])
        .is_err());
    }
}
