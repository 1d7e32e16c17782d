//! Attouch-Théra duality for a pair `(A, B)` and for the cycle pair `(A, Id - R)`.
//!
//! The primal problem is `0 ∈ A x + B x`; the dual problem is
//! `0 ∈ A^{-1} y - B^{-1}(-y)`. Set-valued relations are only checked where
//! they reduce to equalities (single-valued affine operators) or through the
//! resolvent identity `y ∈ A z ⇔ J_A(z + y) = z`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cycles::{composed_residual, gap_vector, Cycle};
use crate::error::{Error, Result};
use crate::linalg::{from_dvector, lu_solve, to_dvector};
use crate::operators::{inverse, ovee, AffineMap, ProductOperator, ResolventOperator};
use crate::vectorspace::{displacement, project_diagonal, solve_displacement, Vector};

/// Default tolerance for duality residuals.
pub const DUALITY_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub id: String,
    pub pass: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub psol: Option<Vector>,
    pub dsol: Option<Vector>,
    pub tol: f64,
    pub relations_checked: Vec<RelationCheck>,
}

impl DualityReport {
    pub fn all_pass(&self) -> bool {
        self.relations_checked.iter().all(|r| r.pass)
    }

    pub fn relation(&self, id: &str) -> Option<&RelationCheck> {
        self.relations_checked.iter().find(|r| r.id == id)
    }

    fn push(&mut self, id: &str, residual: f64) {
        self.relations_checked.push(RelationCheck {
            id: id.to_string(),
            pass: residual <= self.tol,
            residual,
        });
    }
}

/// The unique `x` with `0 = A x + B x` for affine `A`, `B`.
pub fn psol_affine(a: &AffineMap, b: &AffineMap) -> Result<Vector> {
    check_pair(a, b)?;
    let lhs = a.matrix() + b.matrix();
    let rhs = -to_dvector(&(a.offset() + b.offset()));
    lu_solve(&lhs, &rhs)
        .map(|x| from_dvector(&x))
        .map_err(|_| Error::SingularSum { problem: "primal" })
}

/// The unique `y` with `0 = A^{-1} y - B^{-1}(-y)` for invertible affine `A`, `B`.
pub fn dsol_affine(a: &AffineMap, b: &AffineMap) -> Result<Vector> {
    check_pair(a, b)?;
    let a_inv = a
        .inverse()
        .map_err(|_| Error::SingularFactor { which: "A" })?;
    let b_inv = b
        .inverse()
        .map_err(|_| Error::SingularFactor { which: "B" })?;
    // A^{-1} y = P y + p and B^{-1}(-y) = -Q y + q, so (P + Q) y = q - p.
    let lhs = a_inv.matrix() + b_inv.matrix();
    let rhs = to_dvector(&(b_inv.offset() - a_inv.offset()));
    lu_solve(&lhs, &rhs)
        .map(|y| from_dvector(&y))
        .map_err(|_| Error::SingularSum { problem: "dual" })
}

/// Checks the six singleton relations between `psol` and `dsol` of an affine pair.
///
/// `ton1`, `ton2` are tested as memberships through resolvents of the
/// transformed operators; `ton3`-`ton6` as equalities in affine algebra.
pub fn verify_singleton_relations(a: &AffineMap, b: &AffineMap, tol: f64) -> Result<DualityReport> {
    let x = psol_affine(a, b)?;
    let y = dsol_affine(a, b)?;
    let a_inv = a
        .inverse()
        .map_err(|_| Error::SingularFactor { which: "A" })?;
    let b_inv = b
        .inverse()
        .map_err(|_| Error::SingularFactor { which: "B" })?;
    let b_neg_ovee = b_inv.ovee();

    let a_op = ResolventOperator::Affine(a.clone());
    let b_op = ResolventOperator::Affine(b.clone());
    let neg_x = -&x;
    let neg_y = -&y;

    let mut report = DualityReport {
        psol: Some(x.clone()),
        dsol: Some(y.clone()),
        tol,
        relations_checked: Vec::new(),
    };

    // y ∈ A x, y ∈ -B x and y ∈ B^⊻(-x)
    let ton1 = [
        a_op.membership_residual(&x, &y)?,
        b_op.membership_residual(&x, &neg_y)?,
        ovee(&b_op).membership_residual(&neg_x, &y)?,
    ];
    report.push("ton1", max_of(&ton1));

    // x ∈ A^{-1} y, x ∈ B^{-1}(-y) and x ∈ -B^{-⊻}(y)
    let b_neg_ovee_op = ovee(&inverse(&b_op));
    let ton2 = [
        inverse(&a_op).membership_residual(&y, &x)?,
        inverse(&b_op).membership_residual(&neg_y, &x)?,
        b_neg_ovee_op.membership_residual(&y, &neg_x)?,
    ];
    report.push("ton2", max_of(&ton2));

    report.push("ton3", y.distance(&a.apply(&x)));

    let ton4 = [
        y.distance(&(-&b.apply(&x))),
        y.distance(&b.ovee().apply(&neg_x)),
    ];
    report.push("ton4", max_of(&ton4));

    report.push("ton5", x.distance(&a_inv.apply(&y)));

    let ton6 = [
        x.distance(&b_inv.apply(&neg_y)),
        x.distance(&(-&b_neg_ovee.apply(&y))),
    ];
    report.push("ton6", max_of(&ton6));

    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvolutionCheck {
    pub probes: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Compares resolvents of `(A, B)` with those of its double dual
/// `((A^{-1})^{-1}, ((B^{-⊻})^{-⊻}))` on random `(x, λ)` probes.
pub fn dual_pair_involution(
    a: &ResolventOperator,
    b: &ResolventOperator,
    probes: usize,
    seed: u64,
    tol: f64,
) -> Result<InvolutionCheck> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let neg_ovee = |op: &ResolventOperator| ovee(&inverse(op));
    let a_dd = inverse(&inverse(a));
    let b_dd = neg_ovee(&neg_ovee(b));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = a.dim();
    let mut max_deviation = 0.0_f64;
    for _ in 0..probes {
        let x = Vector::new((0..n).map(|_| rng.random_range(-10.0..10.0)).collect())?;
        let lambda = 10f64.powf(rng.random_range(-1.0..1.0));
        let da = a.resolve(&x, lambda)?.distance(&a_dd.resolve(&x, lambda)?);
        let db = b.resolve(&x, lambda)?.distance(&b_dd.resolve(&x, lambda)?);
        max_deviation = max_deviation.max(da).max(db);
    }
    Ok(InvolutionCheck {
        probes,
        max_deviation,
        pass: max_deviation <= tol,
    })
}

/// Duality checks for a cycle `z` of `(A, Id - R)` with gap `y = R z - z`:
///
/// - `gap_in_a`: `y_i ∈ A_i(z_i)` for every block,
/// - `gap_is_displacement`: `y = (Id - R)(-z)`,
/// - `gap_in_d_perp`: `sum_i y_i = 0`,
/// - `primal_in_inverse_displacement`: `-z ∈ (Id - R)^{-1}(y)`.
pub fn verify_cycle_duality(p: &ProductOperator, c: &Cycle, tol: f64) -> Result<DualityReport> {
    let residual = composed_residual(p, &c.point)?;
    if residual > tol {
        return Err(Error::CycleInvalid { residual, tol });
    }
    let z = &c.point;
    let y = gap_vector(c).y;
    let mut report = DualityReport {
        psol: None,
        dsol: None,
        tol,
        relations_checked: Vec::new(),
    };

    let mut worst = 0.0_f64;
    for i in 0..p.m() {
        let r = p
            .factor(i)
            .membership_residual(z.block(i), y.block(i))
            .map_err(|e| e.in_block(i))?;
        worst = worst.max(r);
    }
    report.push("gap_in_a", worst);

    let neg_z = -z;
    report.push("gap_is_displacement", displacement(&neg_z).distance(&y));

    let block_sum_norm = y.block_sum().norm();
    report.push("gap_in_d_perp", block_sum_norm);

    let offset = match solve_displacement(&y, tol.max(block_sum_norm)) {
        Ok(sol) => {
            let d = &neg_z - &sol.particular;
            d.distance(&project_diagonal(&d))
        }
        Err(_) => f64::MAX,
    };
    report.push("primal_in_inverse_displacement", offset);

    Ok(report)
}

fn check_pair(a: &AffineMap, b: &AffineMap) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::cycle_from_fixed_point;
    use crate::vectorspace::ProductPoint;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn aff(rows: &[&[f64]], b: &[f64]) -> AffineMap {
        AffineMap::new(rows.iter().map(|r| r.to_vec()).collect(), v(b)).unwrap()
    }

    #[test]
    fn scalar_pair_solutions() {
        let a = aff(&[&[1.0]], &[0.0]);
        let b = aff(&[&[1.0]], &[-2.0]);
        assert!((psol_affine(&a, &b).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!((dsol_affine(&a, &b).unwrap()[0] - 1.0).abs() < 1e-15);
        // ton3: dsol = A(psol)
        assert!((a.apply(&v(&[1.0]))[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn planar_pair_psol() {
        let a = aff(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0]);
        let b = aff(&[&[1.0, 0.0], &[0.0, 1.0]], &[-2.0, 0.0]);
        let x = psol_affine(&a, &b).unwrap();
        assert!(x.distance(&v(&[1.0, 0.0])) < 1e-15);
        let sym = dsol_affine(&a, &a).unwrap();
        assert!(sym.norm() < 1e-15);
    }

    #[test]
    fn degenerate_pairs_are_reported() {
        let z = aff(&[&[0.0]], &[0.0]);
        assert!(matches!(
            psol_affine(&z, &z),
            Err(Error::SingularSum { problem: "primal" })
        ));
        let one = aff(&[&[1.0]], &[0.0]);
        assert!(matches!(
            dsol_affine(&z, &one),
            Err(Error::SingularFactor { which: "A" })
        ));
    }

    #[test]
    fn six_relations_on_scalar_pair() {
        let a = aff(&[&[1.0]], &[0.0]);
        let b = aff(&[&[1.0]], &[-2.0]);
        let report = verify_singleton_relations(&a, &b, 1e-12).unwrap();
        assert_eq!(report.relations_checked.len(), 6);
        assert!(report.all_pass(), "{report:?}");
        // -B(1) = -(1 - 2) = 1
        assert!((-b.apply(&v(&[1.0]))[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_homogeneous_pair() {
        let a = aff(&[&[1.0, 0.0], &[0.0, 1.0]], &[0.0, 0.0]);
        let report = verify_singleton_relations(&a, &a, 1e-14).unwrap();
        assert_eq!(report.psol.as_ref().unwrap().norm(), 0.0);
        assert_eq!(report.dsol.as_ref().unwrap().norm(), 0.0);
        assert!(report.relations_checked.iter().all(|r| r.residual == 0.0));
    }

    #[test]
    fn involution_on_catalog_pairs() {
        let a = ResolventOperator::Affine(aff(&[&[2.0, 1.0], &[-1.0, 1.0]], &[0.5, -1.0]));
        let b = ResolventOperator::ball(v(&[1.0, 1.0]), 2.0).unwrap();
        let c = ResolventOperator::boxed(v(&[-1.0, 0.0]), v(&[1.0, 3.0])).unwrap();
        let z = ResolventOperator::zero(2).unwrap();
        assert!(dual_pair_involution(&z, &z, 100, 1, 1e-14).unwrap().pass);
        assert!(dual_pair_involution(&a, &a, 100, 2, 1e-10).unwrap().pass);
        let chk = dual_pair_involution(&b, &c, 100, 3, 1e-9).unwrap();
        assert!(chk.pass, "{chk:?}");
    }

    #[test]
    fn cycle_duality_on_affine_and_ball_examples() {
        let p = ProductOperator::new(vec![
            ResolventOperator::Affine(aff(&[&[1.0]], &[0.0])),
            ResolventOperator::Affine(aff(&[&[1.0]], &[-2.0])),
        ])
        .unwrap();
        let c = cycle_from_fixed_point(&p, &v(&[2.0 / 3.0]), 0, 1e-12).unwrap();
        let report = verify_cycle_duality(&p, &c, 1e-7).unwrap();
        assert!(report.all_pass(), "{report:?}");
        // J_1(2/3 + 2/3) = 2/3
        let j = p.factor(0).resolve(&v(&[4.0 / 3.0]), 1.0).unwrap();
        assert!((j[0] - 2.0 / 3.0).abs() < 1e-15);

        let balls = ProductOperator::new(vec![
            ResolventOperator::ball(v(&[-2.0, 0.0]), 1.0).unwrap(),
            ResolventOperator::ball(v(&[2.0, 0.0]), 1.0).unwrap(),
        ])
        .unwrap();
        let c = cycle_from_fixed_point(&balls, &v(&[-1.0, 0.0]), 0, 1e-12).unwrap();
        let report = verify_cycle_duality(&balls, &c, 1e-7).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn cycle_duality_rejects_non_cycles() {
        let p = ProductOperator::new(vec![
            ResolventOperator::ball(v(&[-2.0, 0.0]), 1.0).unwrap(),
            ResolventOperator::ball(v(&[2.0, 0.0]), 1.0).unwrap(),
        ])
        .unwrap();
        let bogus = Cycle {
            point: ProductPoint::zeros(2, 2),
            residual: 0.0,
            iterations: 0,
            map_used: None,
        };
        assert!(matches!(
            verify_cycle_duality(&p, &bogus, 1e-7),
            Err(Error::CycleInvalid { .. })
        ));
    }
}
