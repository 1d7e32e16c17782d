//! Problem configuration files.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "operators": [
//!     {"kind": "ball", "center": [-2, 0], "radius": 1},
//!     {"kind": "ball", "center": [2, 0], "radius": 1}
//!   ],
//!   "solver": {"map": "averaged", "alpha": 1.0, "tol": 1e-8,
//!              "max_iter": 100000, "starts": 20, "seed": 7}
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::cycles::{MapKind, SolverConfig};
use crate::operators::{inverse, ovee, ProductOperator, ResolventOperator};
use crate::vectorspace::Vector;

/// One operator of the catalog, as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Zero {},
    /// `v ↦ matrix · v + offset`; `matrix` is row-major.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Halfspace {
        normal: Vec<f64>,
        bound: f64,
    },
    AffineSet {
        point: Vec<f64>,
        #[serde(default)]
        basis: Vec<Vec<f64>>,
    },
    Inverse {
        of: Box<OperatorSpec>,
    },
    Ovee {
        of: Box<OperatorSpec>,
    },
}

impl OperatorSpec {
    /// Instantiates the operator on `R^n`; `field` prefixes error paths.
    pub fn build(&self, n: usize, field: &str) -> Result<ResolventOperator, HarnessError> {
        let vector = |name: &str, coords: &[f64]| -> Result<Vector, HarnessError> {
            let path = format!("{field}.{name}");
            if coords.len() != n {
                return Err(HarnessError::validation(
                    path,
                    format!("expected {n} coordinates, got {}", coords.len()),
                ));
            }
            Vector::new(coords.to_vec()).map_err(|e| HarnessError::validation(path, e.to_string()))
        };
        let invalid = |e: crate::Error| HarnessError::validation(field.to_string(), e.to_string());

        match self {
            OperatorSpec::Zero {} => ResolventOperator::zero(n).map_err(invalid),
            OperatorSpec::Affine { matrix, offset } => {
                let offset = vector("offset", offset)?;
                ResolventOperator::affine(matrix.clone(), offset).map_err(invalid)
            }
            OperatorSpec::Ball { center, radius } => {
                let center = vector("center", center)?;
                ResolventOperator::ball(center, *radius)
                    .map_err(|e| HarnessError::validation(format!("{field}.radius"), e.to_string()))
            }
            OperatorSpec::Box { lower, upper } => {
                let lower = vector("lower", lower)?;
                let upper = vector("upper", upper)?;
                ResolventOperator::boxed(lower, upper).map_err(invalid)
            }
            OperatorSpec::Halfspace { normal, bound } => {
                let normal = vector("normal", normal)?;
                ResolventOperator::halfspace(normal, *bound).map_err(invalid)
            }
            OperatorSpec::AffineSet { point, basis } => {
                let point = vector("point", point)?;
                let basis = basis
                    .iter()
                    .enumerate()
                    .map(|(k, b)| vector(&format!("basis[{k}]"), b))
                    .collect::<Result<Vec<_>, _>>()?;
                ResolventOperator::affine_set(point, basis).map_err(invalid)
            }
            OperatorSpec::Inverse { of } => Ok(inverse(&of.build(n, &format!("{field}.of"))?)),
            OperatorSpec::Ovee { of } => Ok(ovee(&of.build(n, &format!("{field}.of"))?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_map")]
    pub map: MapKind,
    /// Defaults to 1 for the averaged map and 0.5 for the composed map.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_map() -> MapKind {
    MapKind::Averaged
}

fn default_tol() -> f64 {
    SolverConfig::default().tol
}

fn default_max_iter() -> usize {
    SolverConfig::default().max_iter
}

fn default_starts() -> usize {
    10
}

pub fn default_alpha(map: MapKind) -> f64 {
    match map {
        MapKind::Averaged => 1.0,
        MapKind::Composed => 0.5,
    }
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            map: default_map(),
            alpha: None,
            tol: default_tol(),
            max_iter: default_max_iter(),
            starts: default_starts(),
            seed: 0,
        }
    }
}

impl SolverSettings {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| default_alpha(self.map))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            map: self.map,
            alpha: self.alpha(),
            tol: self.tol,
            max_iter: self.max_iter,
            ..SolverConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: usize,
    operators: Vec<OperatorSpec>,
    #[serde(default)]
    solver: SolverSettings,
}

/// A validated problem: operator catalog instantiated and solver settings checked.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub dimension: usize,
    pub operators: Vec<OperatorSpec>,
    pub solver: SolverSettings,
    pub product: ProductOperator,
    /// SHA-256 of the config file bytes, hex encoded.
    pub hash: String,
}

/// Command-line overrides applied on top of the file's solver settings.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
}

impl ProblemConfig {
    pub fn m(&self) -> usize {
        self.product.m()
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self, HarnessError> {
        if let Some(tol) = o.tol {
            self.solver.tol = tol;
        }
        if let Some(max_iter) = o.max_iter {
            self.solver.max_iter = max_iter;
        }
        if let Some(seed) = o.seed {
            self.solver.seed = seed;
        }
        validate_solver(&self.solver)?;
        Ok(self)
    }
}

pub fn load_config(path: &Path) -> Result<ProblemConfig, HarnessError> {
    let bytes = std::fs::read(path).map_err(|source| HarnessError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&bytes)
}

pub fn parse_config(bytes: &[u8]) -> Result<ProblemConfig, HarnessError> {
    let raw: RawConfig =
        serde_json::from_slice(bytes).map_err(|e| HarnessError::Parse(e.to_string()))?;
    if raw.dimension < 1 {
        return Err(HarnessError::validation("dimension", "must be >= 1"));
    }
    if raw.operators.len() < 2 {
        return Err(HarnessError::validation(
            "operators",
            format!("m >= 2 operators required, got {}", raw.operators.len()),
        ));
    }
    let factors = raw
        .operators
        .iter()
        .enumerate()
        .map(|(i, spec)| spec.build(raw.dimension, &format!("operators[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let product = ProductOperator::new(factors)
        .map_err(|e| HarnessError::validation("operators", e.to_string()))?;
    validate_solver(&raw.solver)?;

    Ok(ProblemConfig {
        dimension: raw.dimension,
        operators: raw.operators,
        solver: raw.solver,
        product,
        hash: hex::encode(Sha256::digest(bytes)),
    })
}

fn validate_solver(s: &SolverSettings) -> Result<(), HarnessError> {
    if s.starts < 1 {
        return Err(HarnessError::validation("solver.starts", "must be >= 1"));
    }
    s.solver_config().validate().map_err(|e| {
        let field = if e.to_string().contains("alpha") {
            "solver.alpha"
        } else if e.to_string().contains("tol") {
            "solver.tol"
        } else {
            "solver.max_iter"
        };
        HarnessError::validation(field, e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BALLS: &str = r#"{
        "dimension": 2,
        "operators": [
            {"kind": "ball", "center": [-2, 0], "radius": 1},
            {"kind": "ball", "center": [2, 0], "radius": 1}
        ]
    }"#;

    fn validation_field(result: Result<ProblemConfig, HarnessError>) -> String {
        match result {
            Err(HarnessError::Validation { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn two_ball_config_is_valid() {
        let cfg = parse_config(TWO_BALLS.as_bytes()).unwrap();
        assert_eq!(cfg.m(), 2);
        assert_eq!(cfg.solver.map, MapKind::Averaged);
        assert_eq!(cfg.solver.alpha(), 1.0);
        assert_eq!(cfg.hash.len(), 64);
    }

    #[test]
    fn single_operator_is_rejected() {
        let json = r#"{"dimension": 1, "operators": [{"kind": "zero"}]}"#;
        assert_eq!(validation_field(parse_config(json.as_bytes())), "operators");
    }

    #[test]
    fn negative_radius_is_rejected() {
        let json = TWO_BALLS.replacen("\"radius\": 1", "\"radius\": -1", 1);
        assert_eq!(
            validation_field(parse_config(json.as_bytes())),
            "operators[0].radius"
        );
    }

    #[test]
    fn shape_mismatch_names_the_field() {
        let json = TWO_BALLS.replacen("[2, 0]", "[2, 0, 1]", 1);
        assert_eq!(
            validation_field(parse_config(json.as_bytes())),
            "operators[1].center"
        );
    }

    #[test]
    fn composed_map_needs_alpha_below_one() {
        let json = TWO_BALLS.replacen(
            "]\n    }",
            "], \"solver\": {\"map\": \"composed\", \"alpha\": 1.0}\n    }",
            1,
        );
        assert_eq!(
            validation_field(parse_config(json.as_bytes())),
            "solver.alpha"
        );
    }

    #[test]
    fn nested_transforms_parse() {
        let json = r#"{"dimension": 1, "operators": [
            {"kind": "inverse", "of": {"kind": "affine", "matrix": [[2]], "offset": [1]}},
            {"kind": "ovee", "of": {"kind": "halfspace", "normal": [1], "bound": 0}}
        ]}"#;
        let cfg = parse_config(json.as_bytes()).unwrap();
        assert_eq!(cfg.product.factor(0).kind_name(), "inverse(affine)");
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            parse_config(b"{ not json"),
            Err(HarnessError::Parse(_))
        ));
        let unknown = r#"{"dimension": 1, "operators": [{"kind": "sphere"}, {"kind": "zero"}]}"#;
        assert!(matches!(
            parse_config(unknown.as_bytes()),
            Err(HarnessError::Parse(_))
        ));
    }
}
