//! Brute-force baselines that certify the analytic routes on small instances.
//!
//! Nothing here is used by the solver; these exist so tests can compare two
//! independent computations.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{ProductOperator, ResolventOperator};
use crate::vectorspace::{ProductPoint, Vector};

/// Rank threshold relative to the largest singular value.
const RANK_TOL: f64 = 1e-10;

/// Dense `(mn × mn)` permutation matrix of the circular right-shift.
pub fn shift_matrix(m: usize, n: usize) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(m * n, m * n);
    for i in 0..m {
        let src = (i + m - 1) % m;
        for k in 0..n {
            r[(i * n + k, src * n + k)] = 1.0;
        }
    }
    r
}

/// Dense `(mn × mn)` matrix of `Id - R`.
pub fn displacement_matrix(m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::identity(m * n, m * n) - shift_matrix(m, n)
}

fn affine_factor(p: &ProductOperator, i: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let a = p
        .factor(i)
        .as_affine()
        .ok_or(Error::NotAffine { index: i })?;
    Ok((
        a.matrix().clone(),
        DVector::from_column_slice(a.offset().as_slice()),
    ))
}

/// `x ↦ matrix · x + offset`, the composed map `J_A ∘ R` of an all-affine problem.
#[derive(Clone, Debug)]
pub struct DenseMap {
    pub matrix: DMatrix<f64>,
    pub offset: ProductPoint,
}

impl DenseMap {
    pub fn composed(p: &ProductOperator) -> Result<Self> {
        let (m, n) = (p.m(), p.dim());
        let mut resolvent = DMatrix::zeros(m * n, m * n);
        let mut offset = Vec::with_capacity(m * n);
        for i in 0..m {
            let (mi, bi) = affine_factor(p, i)?;
            let inv = (DMatrix::identity(n, n) + mi)
                .try_inverse()
                .ok_or(Error::SingularSystem { pivot_ratio: 0.0 })?;
            resolvent.view_mut((i * n, i * n), (n, n)).copy_from(&inv);
            offset.extend((-(&inv * bi)).iter().copied());
        }
        Ok(DenseMap {
            matrix: resolvent * shift_matrix(m, n),
            offset: ProductPoint::from_flat(m, n, &offset)?,
        })
    }

    pub fn apply(&self, x: &ProductPoint) -> ProductPoint {
        let y = &self.matrix * DVector::from_vec(x.to_flat())
            + DVector::from_vec(self.offset.to_flat());
        ProductPoint::from_flat(x.m(), x.dim(), y.as_slice()).expect("shape preserved")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AffineCycleOutcome {
    Unique(ProductPoint),
    NoFixedPoint,
    /// `particular + kernel`, with `kernel_dim` the dimension of the solution family.
    AffineSubspace {
        particular: ProductPoint,
        kernel_dim: usize,
    },
}

/// Solves `(I + M_i) z_i - z_{i-1} = -b_i` (indices mod `m`) as one dense system
/// and classifies the solution set by rank.
pub fn affine_cycle_oracle(p: &ProductOperator) -> Result<AffineCycleOutcome> {
    let (m, n) = (p.m(), p.dim());
    let size = m * n;
    let mut lhs = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    for i in 0..m {
        let (mi, bi) = affine_factor(p, i)?;
        let prev = (i + m - 1) % m;
        let diag = DMatrix::identity(n, n) + mi;
        lhs.view_mut((i * n, i * n), (n, n)).copy_from(&diag);
        for k in 0..n {
            lhs[(i * n + k, prev * n + k)] -= 1.0;
            rhs[i * n + k] = -bi[k];
        }
    }

    let svd = lhs.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = RANK_TOL * smax.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let z = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::InvalidSettings(e.to_string()))?;
    let residual = (&lhs * &z - &rhs).norm();
    let point = ProductPoint::from_flat(m, n, z.as_slice())?;

    if residual > 1e-9 * rhs.norm().max(1.0) {
        Ok(AffineCycleOutcome::NoFixedPoint)
    } else if rank == size {
        Ok(AffineCycleOutcome::Unique(point))
    } else {
        Ok(AffineCycleOutcome::AffineSubspace {
            particular: point,
            kernel_dim: size - rank,
        })
    }
}

/// Exhaustive nearest-point search over an `h`-grid restricted to `[lo, hi]`
/// and to the set of a normal-cone operator.
///
/// Supports balls, boxes and halfspaces in dimension at most 3; the window
/// must contain the projection for the answer to be meaningful.
///
/// For flat boundaries the argmin lies within `h·√n` of the true projection.
/// On a curved boundary it can slide tangentially by up to about
/// `sqrt(2·h·√n·dist(x, C))`, since lattice points sit at uneven depths.
pub fn projection_grid_oracle(
    set: &ResolventOperator,
    x: &Vector,
    h: f64,
    lo: &Vector,
    hi: &Vector,
) -> Result<Vector> {
    let n = x.dim();
    if n > 3 {
        return Err(Error::InvalidSettings("grid oracle supports n <= 3".into()));
    }
    lo.check_dim(n)?;
    hi.check_dim(n)?;
    let inside: Box<dyn Fn(&[f64]) -> bool + Sync> = match set {
        ResolventOperator::Ball(b) => {
            let c = b.center().as_slice().to_vec();
            let r2 = b.radius() * b.radius();
            Box::new(move |v| {
                v.iter()
                    .zip(&c)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    <= r2
            })
        }
        ResolventOperator::Box(b) => {
            let (l, u) = (b.lower().as_slice().to_vec(), b.upper().as_slice().to_vec());
            Box::new(move |v| {
                v.iter()
                    .enumerate()
                    .all(|(i, &vi)| l[i] <= vi && vi <= u[i])
            })
        }
        ResolventOperator::Halfspace(hs) => {
            let a = hs.normal().as_slice().to_vec();
            let beta = hs.bound();
            Box::new(move |v| v.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() <= beta)
        }
        other => {
            return Err(Error::InvalidSettings(format!(
                "grid oracle does not support {}",
                other.kind_name()
            )))
        }
    };

    let counts: Vec<usize> = (0..n)
        .map(|k| ((hi[k] - lo[k]) / h).floor() as usize + 1)
        .collect();
    let total: usize = counts.iter().product();
    let xs = x.as_slice();

    let best = (0..total)
        .into_par_iter()
        .fold(
            || (f64::INFINITY, usize::MAX),
            |(best_d, best_i), idx| {
                let mut v = [0.0; 3];
                let mut rest = idx;
                for k in 0..n {
                    v[k] = lo[k] + (rest % counts[k]) as f64 * h;
                    rest /= counts[k];
                }
                let v = &v[..n];
                if !inside(v) {
                    return (best_d, best_i);
                }
                let d: f64 = v.iter().zip(xs).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best_d || (d == best_d && idx < best_i) {
                    (d, idx)
                } else {
                    (best_d, best_i)
                }
            },
        )
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    if best.1 == usize::MAX {
        return Err(Error::EmptyGridIntersection);
    }
    let mut rest = best.1;
    let coords = (0..n)
        .map(|k| {
            let c = lo[k] + (rest % counts[k]) as f64 * h;
            rest /= counts[k];
            c
        })
        .collect();
    Vector::new(coords)
}

/// Minimum-norm least-squares solution of `(Id - R) x = y` from the dense
/// normal equations, with the diagonal (the kernel) deflated by adding its
/// projector.
pub fn displacement_lsq_oracle(y: &ProductPoint) -> Result<ProductPoint> {
    let (m, n) = (y.m(), y.dim());
    let d = displacement_matrix(m, n);
    let mut diag_proj = DMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                diag_proj[(i * n + k, j * n + k)] = 1.0 / m as f64;
            }
        }
    }
    let rhs = DVector::from_vec(y.to_flat());
    let normal = d.transpose() * &d + diag_proj;
    let x = normal
        .cholesky()
        .ok_or(Error::SingularSystem { pivot_ratio: 0.0 })?
        .solve(&(d.transpose() * &rhs));
    let residual = (&d * &x - &rhs).norm();
    if residual > 1e-8 * rhs.norm().max(1.0) {
        return Err(Error::Inconsistent(residual));
    }
    ProductPoint::from_flat(m, n, x.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::step_composed;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn scalar(mv: f64, b: f64) -> ResolventOperator {
        ResolventOperator::affine(vec![vec![mv]], v(&[b])).unwrap()
    }

    #[test]
    fn affine_oracle_classifies() {
        let p = ProductOperator::new(vec![scalar(1.0, 0.0), scalar(1.0, -2.0)]).unwrap();
        match affine_cycle_oracle(&p).unwrap() {
            AffineCycleOutcome::Unique(z) => {
                assert!((z.block(0)[0] - 2.0 / 3.0).abs() < 1e-14);
                assert!((z.block(1)[0] - 4.0 / 3.0).abs() < 1e-14);
                // substitution
                assert!(step_composed(&p, &z).unwrap().distance(&z) < 1e-14);
            }
            other => panic!("{other:?}"),
        }

        let shift = ProductOperator::new(vec![scalar(0.0, -1.0), scalar(0.0, -1.0)]).unwrap();
        assert_eq!(
            affine_cycle_oracle(&shift).unwrap(),
            AffineCycleOutcome::NoFixedPoint
        );

        let zero = ProductOperator::new(vec![scalar(0.0, 0.0), scalar(0.0, 0.0), scalar(0.0, 0.0)])
            .unwrap();
        match affine_cycle_oracle(&zero).unwrap() {
            AffineCycleOutcome::AffineSubspace { kernel_dim, .. } => assert_eq!(kernel_dim, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dense_map_matches_step() {
        let p = ProductOperator::new(vec![
            ResolventOperator::affine(vec![vec![2.0, 1.0], vec![-1.0, 0.5]], v(&[1.0, 0.0]))
                .unwrap(),
            ResolventOperator::affine(vec![vec![1.0, 0.0], vec![0.0, 3.0]], v(&[0.0, -2.0]))
                .unwrap(),
            ResolventOperator::affine(vec![vec![0.0, 0.0], vec![0.0, 0.0]], v(&[0.5, 0.5]))
                .unwrap(),
        ])
        .unwrap();
        let dense = DenseMap::composed(&p).unwrap();
        let x = ProductPoint::from_rows(vec![vec![1.0, -2.0], vec![0.3, 4.0], vec![-7.0, 2.5]])
            .unwrap();
        assert!(dense.apply(&x).distance(&step_composed(&p, &x).unwrap()) < 1e-12);
    }

    #[test]
    fn grid_oracle_examples() {
        let ball = ResolventOperator::ball(v(&[-2.0, 0.0]), 1.0).unwrap();
        let g = projection_grid_oracle(
            &ball,
            &v(&[1.0, 0.0]),
            1e-3,
            &v(&[-3.0, -1.0]),
            &v(&[-1.0, 1.0]),
        )
        .unwrap();
        assert!(g.distance(&v(&[-1.0, 0.0])) < 2e-3);

        let bx = ResolventOperator::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let g = projection_grid_oracle(
            &bx,
            &v(&[2.0, -1.0]),
            1e-3,
            &v(&[0.0, 0.0]),
            &v(&[1.0, 1.0]),
        )
        .unwrap();
        assert!(g.distance(&v(&[1.0, 0.0])) < 2e-3);

        let inside = v(&[0.25, 0.5]);
        let g =
            projection_grid_oracle(&bx, &inside, 1e-3, &v(&[0.0, 0.0]), &v(&[1.0, 1.0])).unwrap();
        assert!(g.distance(&inside) <= 1e-3);

        assert!(matches!(
            projection_grid_oracle(
                &ball,
                &v(&[0.0, 0.0]),
                0.1,
                &v(&[5.0, 5.0]),
                &v(&[6.0, 6.0])
            ),
            Err(Error::EmptyGridIntersection)
        ));
    }

    #[test]
    fn lsq_oracle_examples() {
        let y = ProductPoint::from_rows(vec![vec![1.0], vec![0.0], vec![-1.0]]).unwrap();
        let x = displacement_lsq_oracle(&y).unwrap();
        for (b, e) in x.blocks().iter().zip([1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0]) {
            assert!((b[0] - e).abs() < 1e-12);
        }
        let zero = ProductPoint::zeros(4, 2);
        assert!(displacement_lsq_oracle(&zero).unwrap().norm() < 1e-15);
        let bad = ProductPoint::from_rows(vec![vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(
            displacement_lsq_oracle(&bad),
            Err(Error::Inconsistent(_))
        ));
    }
}
