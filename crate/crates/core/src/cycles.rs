//! Cycles of resolvent compositions.
//!
//! A cycle is `z = (z_0, ..., z_{m-1})` with `z_i = J_i(z_{i-1})` for every
//! block (indices mod `m`), equivalently a fixed point of `x ↦ J_A(R x)`.
//! `F_i` is the fixed-point set of the cyclic composition that starts with
//! `J_{i+1}` and ends with `J_i`; block `i` of every cycle lies in `F_i`.
//!
//! Block indices in this module are 0-based.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{product_resolve, ProductOperator};
use crate::vectorspace::{shift, ProductPoint, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// `x ↦ J_A(R x)`.
    Composed,
    /// `x ↦ J_{A/2}((x + R x) / 2)`, same fixed points as the composed map.
    Averaged,
}

impl std::fmt::Display for MapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapKind::Composed => write!(f, "composed"),
            MapKind::Averaged => write!(f, "averaged"),
        }
    }
}

impl std::str::FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "composed" => Ok(MapKind::Composed),
            "averaged" => Ok(MapKind::Averaged),
            other => Err(format!("unknown map '{other}', expected composed|averaged")),
        }
    }
}

/// Settings for the Krasnoselskii-Mann iteration `x ← (1-α) x + α T x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub map: MapKind,
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations over which the best residual must improve.
    pub stall_window: usize,
    /// Minimum improvement of the best residual over `stall_window`.
    pub stall_improvement: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            map: MapKind::Averaged,
            alpha: 1.0,
            tol: 1e-8,
            max_iter: 100_000,
            stall_window: 1000,
            stall_improvement: 1e-14,
        }
    }
}

impl SolverConfig {
    pub fn composed(alpha: f64) -> Self {
        SolverConfig {
            map: MapKind::Composed,
            alpha,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSettings(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidSettings("max_iter must be >= 1".into()));
        }
        let alpha_ok = match self.map {
            MapKind::Composed => self.alpha > 0.0 && self.alpha < 1.0,
            MapKind::Averaged => self.alpha > 0.0 && self.alpha <= 1.0,
        };
        if !alpha_ok {
            return Err(Error::InvalidSettings(format!(
                "alpha {} is not allowed for the {} map",
                self.alpha, self.map
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub point: ProductPoint,
    /// `‖z - J_A(R z)‖`.
    pub residual: f64,
    pub iterations: usize,
    /// `None` when the cycle was built from a point of some `F_i`.
    pub map_used: Option<MapKind>,
}

impl Cycle {
    pub fn m(&self) -> usize {
        self.point.m()
    }

    /// Largest link error `‖z_i - J_i(z_{i-1})‖`.
    pub fn max_link_residual(&self, p: &ProductOperator) -> Result<f64> {
        let z = &self.point;
        let m = z.m();
        let mut worst = 0.0_f64;
        for i in 0..m {
            let prev = z.block((i + m - 1) % m);
            worst = worst.max(p.resolve_factor(i, prev)?.distance(z.block(i)));
        }
        Ok(worst)
    }
}

/// `y* = R z - z`, the dual solution attached to a cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GapVector {
    pub y: ProductPoint,
}

impl GapVector {
    pub fn norm(&self) -> f64 {
        self.y.norm()
    }

    pub fn block_sum_norm(&self) -> f64 {
        self.y.block_sum().norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    /// Composed-map residual of the current iterate.
    pub residual: f64,
    /// `‖R x - x‖` of the current iterate.
    pub gap_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub stalled: bool,
    pub iterations: usize,
    pub cycle: Option<Cycle>,
    pub gap: Option<GapVector>,
    pub trace: Vec<TraceRow>,
    pub last_point: ProductPoint,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.residual)
    }
}

/// `J_A(R x)`.
pub fn step_composed(p: &ProductOperator, x: &ProductPoint) -> Result<ProductPoint> {
    product_resolve(p, &shift(x), 1.0)
}

/// `J_{A/2}((x + R x) / 2)`.
pub fn step_averaged(p: &ProductOperator, x: &ProductPoint) -> Result<ProductPoint> {
    let mid = x.lerp(&shift(x), 0.5);
    product_resolve(p, &mid, 0.5)
}

/// One relaxed step `(1-α) x + α T x` of the chosen map.
pub fn km_step(
    p: &ProductOperator,
    x: &ProductPoint,
    map: MapKind,
    alpha: f64,
) -> Result<ProductPoint> {
    let tx = match map {
        MapKind::Composed => step_composed(p, x)?,
        MapKind::Averaged => step_averaged(p, x)?,
    };
    Ok(if alpha == 1.0 { tx } else { x.lerp(&tx, alpha) })
}

/// Canonical residual `‖x - J_A(R x)‖`.
pub fn composed_residual(p: &ProductOperator, x: &ProductPoint) -> Result<f64> {
    Ok(x.distance(&step_composed(p, x)?))
}

pub fn averaged_residual(p: &ProductOperator, x: &ProductPoint) -> Result<f64> {
    Ok(x.distance(&step_averaged(p, x)?))
}

/// Runs the KM iteration from `x0` until the composed residual drops to `cfg.tol`.
///
/// Returns `Err(NoConvergence)` carrying the full report when `max_iter` is
/// reached or the best residual stops improving over `cfg.stall_window`
/// iterations.
pub fn find_cycle(
    p: &ProductOperator,
    x0: &ProductPoint,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    p.check_point(x0)?;

    let mut x = x0.clone();
    let mut trace = Vec::new();
    let mut best_history: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;
    let mut stalled = false;
    let mut k = 0;
    loop {
        let tx = step_composed(p, &x)?;
        let residual = x.distance(&tx);
        let gap_norm = shift(&x).distance(&x);
        trace.push(TraceRow {
            iter: k,
            residual,
            gap_norm,
        });

        if residual <= cfg.tol {
            let cycle = Cycle {
                point: x.clone(),
                residual,
                iterations: k,
                map_used: Some(cfg.map),
            };
            let gap = gap_vector(&cycle);
            return Ok(SolveReport {
                converged: true,
                stalled: false,
                iterations: k,
                cycle: Some(cycle),
                gap: Some(gap),
                trace,
                last_point: x,
            });
        }

        best = best.min(residual);
        best_history.push(best);
        if k >= cfg.stall_window
            && best_history[k - cfg.stall_window] - best < cfg.stall_improvement
        {
            stalled = true;
            break;
        }
        if k >= cfg.max_iter {
            break;
        }

        x = match cfg.map {
            MapKind::Composed => x.lerp(&tx, cfg.alpha),
            MapKind::Averaged => km_step(p, &x, MapKind::Averaged, cfg.alpha)?,
        };
        k += 1;
    }

    Err(Error::NoConvergence(Box::new(SolveReport {
        converged: false,
        stalled,
        iterations: k,
        cycle: None,
        gap: None,
        trace,
        last_point: x,
    })))
}

/// Runs [`find_cycle`] from every start in parallel; results keep the start order.
pub fn find_cycles(
    p: &ProductOperator,
    starts: &[ProductPoint],
    cfg: &SolverConfig,
) -> Vec<Result<SolveReport>> {
    starts.par_iter().map(|x0| find_cycle(p, x0, cfg)).collect()
}

/// Applies `J_{i+1}, J_{i+2}, ..., J_i` (indices mod `m`) to `z`.
pub fn cyclic_composition(p: &ProductOperator, z: &Vector, i: usize) -> Result<Vector> {
    let m = p.m();
    check_index(i, m)?;
    z.check_dim(p.dim())?;
    let mut cur = z.clone();
    for k in 1..=m {
        cur = p.resolve_factor((i + k) % m, &cur)?;
    }
    Ok(cur)
}

/// `‖z - (J_i ∘ ... ∘ J_{i+1})(z)‖`.
pub fn cyclic_residual(p: &ProductOperator, z: &Vector, i: usize) -> Result<f64> {
    Ok(z.distance(&cyclic_composition(p, z, i)?))
}

/// Whether `z ∈ F_i` up to `tol`.
pub fn membership_fi(p: &ProductOperator, z: &Vector, i: usize, tol: f64) -> Result<bool> {
    Ok(cyclic_residual(p, z, i)? <= tol)
}

/// Builds the cycle whose block `i` is `z`, by applying `J_{i+1}, J_{i+2}, ...`
/// around the ring.
pub fn cycle_from_fixed_point(
    p: &ProductOperator,
    z: &Vector,
    i: usize,
    tol: f64,
) -> Result<Cycle> {
    let residual = cyclic_residual(p, z, i)?;
    if residual > tol {
        return Err(Error::NotAFixedPoint {
            index: i,
            residual,
            tol,
        });
    }
    let m = p.m();
    let mut blocks: Vec<Option<Vector>> = vec![None; m];
    blocks[i] = Some(z.clone());
    let mut cur = z.clone();
    for k in 1..m {
        let j = (i + k) % m;
        cur = p.resolve_factor(j, &cur)?;
        blocks[j] = Some(cur.clone());
    }
    let point = ProductPoint::new(
        blocks
            .into_iter()
            .map(|b| b.expect("every block filled"))
            .collect(),
    )?;
    let residual = composed_residual(p, &point)?;
    Ok(Cycle {
        point,
        residual,
        iterations: 0,
        map_used: None,
    })
}

/// `y = R z - z`, so `y_i = z_{i-1} - z_i`.
pub fn gap_vector(c: &Cycle) -> GapVector {
    GapVector {
        y: &shift(&c.point) - &c.point,
    }
}

/// Checks `J_{i+1}(z) = z - y_{i+1}` for every sample `z ∈ F_i`.
pub fn check_translation(
    p: &ProductOperator,
    c: &Cycle,
    samples: &[Vector],
    i: usize,
    tol: f64,
) -> Result<bool> {
    Ok(translation_error(p, c, samples, i, tol)? <= tol)
}

/// Largest `‖J_{i+1}(z) - (z - y_{i+1})‖` over the samples; every sample must be in `F_i`.
pub fn translation_error(
    p: &ProductOperator,
    c: &Cycle,
    samples: &[Vector],
    i: usize,
    membership_tol: f64,
) -> Result<f64> {
    let m = p.m();
    check_index(i, m)?;
    let next = (i + 1) % m;
    let y = gap_vector(c).y;
    let y_next = y.block(next);
    let mut worst = 0.0_f64;
    for (s, z) in samples.iter().enumerate() {
        let residual = cyclic_residual(p, z, i)?;
        if residual > membership_tol {
            return Err(Error::SampleNotInFi {
                sample: s,
                index: i,
                residual,
            });
        }
        let predicted = z - y_next;
        worst = worst.max(p.resolve_factor(next, z)?.distance(&predicted));
    }
    Ok(worst)
}

pub fn extract_block(c: &Cycle, i: usize) -> Result<Vector> {
    check_index(i, c.m())?;
    Ok(c.point.block(i).clone())
}

fn check_index(i: usize, m: usize) -> Result<()> {
    if i >= m {
        return Err(Error::IndexOutOfRange { index: i, m });
    }
    Ok(())
}
