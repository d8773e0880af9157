//! JSON configuration files and run reports.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::axis::{AxisResult, CuspConfiguration, ScanRow};
use crate::certify::SimplicityCertificate;
use crate::cusp_group::{CuspGroup, GroupElement};
use crate::error::{Error, Result};
use crate::family::FamilyReport;
use crate::halfspace::{Horoball, InteriorPoint};
use crate::isometry::from_matrix;
use crate::linalg::{matrix_from_rows, matrix_rows, nearest_orthogonal, orthogonality_residual, Matrix, Vector};
use crate::normalize::normalize_configuration;
use crate::Tolerances;

/// Tolerance for accepting a supplied `V` before re-orthogonalizing it.
pub const V_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum GroupSpec {
    /// `basis` lists the generators.
    Lattice { basis: Vec<Vec<f64>> },
    Glide { alpha: f64, beta: f64 },
}

/// `g0` as a 2×2 complex matrix (`n = 3` only); entries are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
    #[serde(default)]
    pub orientation_reversing: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<[i64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dimension: usize,
    pub cusp_group: GroupSpec,
    #[serde(rename = "A0", default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<f64>>,
    #[serde(rename = "B0", default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<Vec<f64>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_g0: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
}

/// A validated configuration with its options.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: CuspConfiguration,
    pub tolerances: Tolerances,
    pub indices: Option<(i64, i64)>,
    pub warnings: Vec<String>,
    /// The configuration as resolved: `B0` reduced, `V` explicit and exactly
    /// orthogonal, no matrix block.
    pub resolved: ConfigFile,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::ConfigSchema(msg.into())
}

fn json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => schema(e.to_string()),
        _ => Error::ConfigParse(e.to_string()),
    }
}

fn build_group(spec: &GroupSpec) -> Result<CuspGroup> {
    match spec {
        GroupSpec::Lattice { basis } => CuspGroup::lattice(basis),
        GroupSpec::Glide { alpha, beta } => CuspGroup::glide(*alpha, *beta),
    }
    .map_err(|e| match e {
        Error::ConfigurationInvalid(m) => schema(m),
        other => other,
    })
}

fn coords(name: &str, v: &[f64], dim: usize) -> Result<Vector> {
    if v.len() != dim {
        return Err(schema(format!("{name} has {} coordinates, expected {dim}", v.len())));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(schema(format!("{name} has non-finite coordinates")));
    }
    Ok(Vector::from_column_slice(v))
}

fn fmt_vec(v: &Vector) -> String {
    format!("{:?}", v.as_slice())
}

/// Validates a parsed file.
pub fn resolve(file: &ConfigFile) -> Result<LoadedConfig> {
    let group = build_group(&file.cusp_group)?;
    let dim = group.dim();
    if file.dimension != dim + 1 {
        return Err(schema(format!(
            "dimension {} does not match a cusp group acting on R^{dim}",
            file.dimension
        )));
    }
    let mut warnings = Vec::new();
    let a0 = match &file.a0 {
        Some(a) => coords("A0", a, dim)?,
        None => Vector::zeros(dim),
    };
    if !group.in_fundamental_domain(&a0, 1e-12) {
        return Err(schema(format!("A0 = {} is outside the fundamental domain", fmt_vec(&a0))));
    }

    let config = match &file.matrix_g0 {
        Some(m) => {
            if dim != 2 {
                return Err(schema("matrix_g0 is only available in dimension 3"));
            }
            if file.v.is_some() {
                return Err(schema("give either V or matrix_g0, not both"));
            }
            let z = |p: [f64; 2]| Complex64::new(p[0], p[1]);
            let g0 = from_matrix(&[[z(m.a), z(m.b)], [z(m.c), z(m.d)]], m.orientation_reversing)?;
            let h0 = Horoball::ball(Vector::zeros(dim), 1.0)?;
            let hinf = Horoball::half_space(1.0)?;
            let a0_point = InteriorPoint::new(Vector::zeros(dim), 1.0)?;
            let image = g0.apply_interior(&a0_point);
            let (_, cfg) = normalize_configuration(&h0, &hinf, &g0, &image, &group, &a0)?;
            if let Some(b) = &file.b0 {
                let given = coords("B0", b, dim)?;
                let (reduced, _) = group.reduce_to_fundamental_domain(&given)?;
                if (&reduced - cfg.b0()).amax() > 1e-9 {
                    return Err(Error::ConfigurationInvalid(format!(
                        "B0 = {} disagrees with matrix_g0, which gives {}",
                        fmt_vec(&given),
                        fmt_vec(cfg.b0())
                    )));
                }
            }
            let raw = image.horizontal() + &a0;
            if (&raw - cfg.b0()).amax() > 0.0 {
                warnings.push(format!(
                    "B0 = {} reduced into the fundamental domain as {}",
                    fmt_vec(&raw),
                    fmt_vec(cfg.b0())
                ));
            }
            cfg
        }
        None => {
            let b = file.b0.as_ref().ok_or_else(|| schema("missing B0 (or matrix_g0)"))?;
            let b0 = coords("B0", b, dim)?;
            let v = match &file.v {
                Some(rows) => {
                    let m = matrix_from_rows(rows).ok_or_else(|| schema("V has ragged rows"))?;
                    if m.nrows() != dim || m.ncols() != dim {
                        return Err(schema(format!("V must be {dim}x{dim}")));
                    }
                    let residual = orthogonality_residual(&m);
                    if residual > V_TOLERANCE {
                        return Err(Error::NonOrthogonal { residual });
                    }
                    nearest_orthogonal(&m)
                }
                None => Matrix::identity(dim, dim),
            };
            let b0 = if group.in_fundamental_domain(&b0, 0.0) {
                b0
            } else {
                let (reduced, e) = group.reduce_to_fundamental_domain(&b0)?;
                warnings.push(format!(
                    "B0 = {} reduced into the fundamental domain as {} by element {e}",
                    fmt_vec(&b0),
                    fmt_vec(&reduced)
                ));
                reduced
            };
            CuspConfiguration::new(group, a0, b0, v)?
        }
    };

    let solver = file.solver.clone().unwrap_or_default();
    let mut tolerances = Tolerances::default();
    if let Some(t) = solver.tol {
        if !(t > 0.0) {
            return Err(schema("solver.tol must be positive"));
        }
        tolerances.iterative = t;
    }
    if let Some(m) = solver.min_norm {
        tolerances.min_norm = m;
    }
    if let Some(k) = solver.max_iterations {
        tolerances.max_iterations = k;
    }
    let indices = match solver.indices {
        Some([lo, hi]) if lo > hi => return Err(schema("solver.indices must have lo <= hi")),
        Some([lo, hi]) => Some((lo, hi)),
        None => None,
    };
    let resolved = ConfigFile {
        dimension: file.dimension,
        cusp_group: file.cusp_group.clone(),
        a0: file.a0.as_ref().map(|_| config.a0().iter().copied().collect()),
        b0: Some(config.b0().iter().copied().collect()),
        v: Some(matrix_rows(config.v())),
        matrix_g0: None,
        solver: file.solver.clone(),
    };
    Ok(LoadedConfig {
        config,
        tolerances,
        indices,
        warnings,
        resolved,
    })
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(json_error)?;
    resolve(&file)
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses `"c1,c2,.."` for lattices or `"s^n t^m"` (either factor optional)
/// for the glide group.
pub fn parse_element(text: &str, group: &CuspGroup) -> Result<GroupElement> {
    let bad = |why: &str| Error::MalformedElement(format!("{text:?}: {why}"));
    let text = text.trim();
    let e = match group {
        CuspGroup::Lattice { .. } => GroupElement::Lattice(
            text.split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| bad("expected integer coefficients")))
                .collect::<Result<_>>()?,
        ),
        CuspGroup::Glide { .. } => {
            let (mut n, mut m) = (None, None);
            for token in text.split_whitespace() {
                let (base, exp) = token.split_once('^').unwrap_or((token, "1"));
                let exp: i64 = exp.parse().map_err(|_| bad("expected an integer exponent"))?;
                let slot = match base {
                    "s" if n.is_none() && m.is_none() => &mut n,
                    "t" if m.is_none() => &mut m,
                    _ => return Err(bad("expected s^n t^m")),
                };
                *slot = Some(exp);
            }
            if n.is_none() && m.is_none() {
                return Err(bad("empty element"));
            }
            GroupElement::Glide {
                n: n.unwrap_or(0),
                m: m.unwrap_or(0),
            }
        }
    };
    group.element_action(&e)?;
    Ok(e)
}

/// Parses an inclusive `LO..HI` range.
pub fn parse_indices(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidInput(format!("{text:?}: expected LO..HI"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Payload {
    Axis {
        axis: AxisResult,
    },
    Certify {
        axis: AxisResult,
        certificate: SimplicityCertificate,
    },
    Enumerate {
        reports: Vec<FamilyReport>,
    },
    Lemma1Scan {
        rows: Vec<ScanRow>,
    },
    EmitPlot {
        files: Vec<String>,
        reports: Vec<FamilyReport>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ConfigFile,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Wall-clock seconds; left out in comparison mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, config: ConfigFile, payload: Payload, warnings: Vec<String>) -> Self {
        Self {
            tool: "cuspgeo".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            payload,
            warnings,
            elapsed_seconds: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }
}
