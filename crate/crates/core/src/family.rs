//! Families `τ_n` of stabilizer elements whose axes certify, and sweeps over
//! index ranges.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axis::{solve_axis, CuspConfiguration};
use crate::certify::{certify, Verdict, Witness};
use crate::cusp_group::{CuspGroup, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::{angle_between, Vector};
use crate::Tolerances;

const ZERO_TOL: f64 = 1e-9;
const AMBIGUITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyCase {
    #[serde(rename = "lattice-generic")]
    LatticeGeneric,
    #[serde(rename = "glide-case-1")]
    GlideCase1,
    #[serde(rename = "glide-case-2.1")]
    GlideCase21,
    #[serde(rename = "glide-case-2.2")]
    GlideCase22,
}

impl FamilyCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyCase::LatticeGeneric => "lattice-generic",
            FamilyCase::GlideCase1 => "glide-case-1",
            FamilyCase::GlideCase21 => "glide-case-2.1",
            FamilyCase::GlideCase22 => "glide-case-2.2",
        }
    }
}

/// How an index becomes a group element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "pattern")]
pub enum ElementPattern {
    /// `n · basis_j` of a rank-`rank` lattice.
    LatticeMultiple { direction: usize, rank: usize },
    /// `t^n`.
    GlideTranslation,
    /// `t^n s`, i.e. `s t^-n`.
    GlideTranslationThenS,
    /// `s^n`, even `n` only.
    GlideEvenPower,
}

impl ElementPattern {
    pub fn element(&self, index: i64) -> Result<GroupElement> {
        Ok(match *self {
            ElementPattern::LatticeMultiple { direction, rank } => {
                let mut c = vec![0; rank];
                c[direction] = index;
                GroupElement::Lattice(c)
            }
            ElementPattern::GlideTranslation => GroupElement::Glide { n: 0, m: index },
            ElementPattern::GlideTranslationThenS => GroupElement::Glide { n: 1, m: -index },
            ElementPattern::GlideEvenPower => {
                if index.rem_euclid(2) != 0 {
                    return Err(Error::InvalidPlan(format!("s^{index}: odd powers are not in this family")));
                }
                GroupElement::Glide { n: index, m: 0 }
            }
        })
    }

    /// Whether `index` belongs to the family at all.
    pub fn admits(&self, index: i64) -> bool {
        !matches!(self, ElementPattern::GlideEvenPower) || index.rem_euclid(2) == 0
    }
}

/// Which coordinate test selected the plan, with the values it saw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Justification {
    pub test: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyPlan {
    pub case: FamilyCase,
    pub pattern: ElementPattern,
    pub justification: Justification,
    /// The glide symmetry test landed within `1e-6` of its threshold.
    pub ambiguous: bool,
}

impl FamilyPlan {
    pub fn element(&self, index: i64) -> Result<GroupElement> {
        self.pattern.element(index)
    }
}

fn justification(test: &str, values: &[(&str, f64)]) -> Justification {
    Justification {
        test: test.into(),
        values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

/// Distance from `s` to the nearest multiple of `beta`.
fn off_lattice(s: f64, beta: f64) -> f64 {
    (s - beta * (s / beta).round()).abs()
}

fn lattice_plan(basis: &crate::linalg::Matrix, b0: &Vector) -> Result<FamilyPlan> {
    let coords = basis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidPlan("singular lattice basis".into()))?
        * b0;
    let rank = coords.len();
    let nonzero = |k: usize| coords[k].abs() >= ZERO_TOL;
    let direction = (0..rank)
        .find(|&j| (0..rank).any(|k| k != j && nonzero(k)))
        .ok_or_else(|| {
            Error::InvalidPlan("B0 has no nonzero basis coordinate off any direction".into())
        })?;
    let witness = (0..rank)
        .filter(|&k| k != direction)
        .max_by(|&a, &b| coords[a].abs().total_cmp(&coords[b].abs()))
        .expect("rank >= 2");
    let mut values = vec![("direction".to_string(), direction as f64), ("witness".to_string(), witness as f64)];
    values.extend((0..rank).map(|k| (format!("b{}", k + 1), coords[k])));
    Ok(FamilyPlan {
        case: FamilyCase::LatticeGeneric,
        pattern: ElementPattern::LatticeMultiple { direction, rank },
        justification: Justification {
            test: format!("basis coordinate b{} of B0 is nonzero", witness + 1),
            values: values.into_iter().collect(),
        },
        ambiguous: false,
    })
}

fn glide_plans(a0: &Vector, b0: &Vector, beta: f64) -> Vec<FamilyPlan> {
    let dx = b0[0] - a0[0];
    if dx.abs() >= ZERO_TOL {
        return vec![FamilyPlan {
            case: FamilyCase::GlideCase1,
            pattern: ElementPattern::GlideTranslation,
            justification: justification(
                "x-coordinates of A0 and B0 differ",
                &[("A0x", a0[0]), ("B0x", b0[0]), ("difference", dx)],
            ),
            ambiguous: false,
        }];
    }
    let sum = b0[1] + a0[1];
    let off = off_lattice(sum, beta);
    let values = [("A0y", a0[1]), ("B0y", b0[1]), ("sum", sum), ("distance_to_beta_z", off)];
    let ambiguous = off > 1e-12 && off <= AMBIGUITY_TOL;
    let symmetric = FamilyPlan {
        case: FamilyCase::GlideCase21,
        pattern: ElementPattern::GlideTranslationThenS,
        justification: justification("A0 and B0 symmetric about a reflection axis", &values),
        ambiguous,
    };
    let asymmetric = FamilyPlan {
        case: FamilyCase::GlideCase22,
        pattern: ElementPattern::GlideEvenPower,
        justification: justification("A0 and B0 not symmetric about any reflection axis", &values),
        ambiguous,
    };
    match (off <= ZERO_TOL, ambiguous) {
        (true, false) => vec![symmetric],
        (false, false) => vec![asymmetric],
        (true, true) => vec![symmetric, asymmetric],
        (false, true) => vec![asymmetric, symmetric],
    }
}

/// Every plan that applies to `cfg`: one, or two for near-threshold glide
/// configurations (the first is the one the strict test selects).
pub fn plans_for(cfg: &CuspConfiguration) -> Result<Vec<FamilyPlan>> {
    match cfg.group() {
        CuspGroup::Lattice { basis } => Ok(vec![lattice_plan(basis, cfg.b0())?]),
        CuspGroup::Glide { beta, .. } => Ok(glide_plans(cfg.a0(), cfg.b0(), *beta)),
    }
}

/// The plan selected for `cfg`.
pub fn plan_family(cfg: &CuspConfiguration) -> Result<FamilyPlan> {
    Ok(plans_for(cfg)?.remove(0))
}

/// Separation check for a `t^n s` family: the midpoint of `A0 B_t` must stay
/// off every reflection axis `y = kβ/2` by more than the localization error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginCheck {
    pub midpoint_y: f64,
    /// `midpoint_y mod β/2`.
    pub offset: f64,
    pub epsilon: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub index: i64,
    pub element: GroupElement,
    pub norm_t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_c_a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_d_bt: Option<f64>,
    /// `max(d_c_a0, d_d_bt)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_t_diameter: Option<f64>,
    /// Angle between `u` and the family direction (lattice plans).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<MarginCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl FamilyRecord {
    pub fn verdict_label(&self) -> String {
        match (&self.verdict, &self.error) {
            (Some(v), _) => v.as_str().to_string(),
            (None, Some(e)) => format!("error:{e}"),
            (None, None) => "error:unknown".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    /// Smallest index from which every record certifies and lengths strictly
    /// increase.
    pub first_certified_index: Option<i64>,
    pub certified_count: usize,
    /// Smallest index from which lengths strictly increase.
    pub lengths_increasing_from: Option<i64>,
    pub any_fails: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub plan: FamilyPlan,
    pub records: Vec<FamilyRecord>,
    pub summary: FamilySummary,
}

fn error_kind(e: &Error) -> String {
    match e {
        Error::NonHyperbolic { .. } => "nonhyperbolic".into(),
        Error::AxisTooShallow { .. } => "axis-too-shallow".into(),
        Error::ClassificationInconclusive { .. } => "classification-inconclusive".into(),
        other => other.to_string(),
    }
}

fn run_index(cfg: &CuspConfiguration, plan: &FamilyPlan, index: i64, tol: &Tolerances) -> Result<FamilyRecord> {
    let element = plan.element(index)?;
    let norm_t = cfg.norm_t(&element)?;
    let mut rec = FamilyRecord {
        index,
        element: element.clone(),
        norm_t,
        verdict: None,
        error: None,
        length: None,
        d_c_a0: None,
        d_d_bt: None,
        epsilon: None,
        s_t_diameter: None,
        direction_angle: None,
        margin: None,
        notes: Vec::new(),
        witness: None,
    };
    let axis = match solve_axis(cfg, &element, tol) {
        Ok(a) => a,
        Err(e) => {
            rec.error = Some(error_kind(&e));
            return Ok(rec);
        }
    };
    let epsilon = axis.d_c_a0.max(axis.d_d_bt);
    rec.length = Some(axis.translation_length);
    rec.d_c_a0 = Some(axis.d_c_a0);
    rec.d_d_bt = Some(axis.d_d_bt);
    rec.epsilon = Some(epsilon);
    rec.s_t_diameter = Some(axis.s_t_diameter());
    let (_, _, u) = axis.semicircle();

    match (&plan.pattern, cfg.group()) {
        (ElementPattern::LatticeMultiple { direction, .. }, CuspGroup::Lattice { basis }) => {
            let dir: Vector = basis.column(*direction).into_owned();
            let a = angle_between(&u, &dir);
            rec.direction_angle = Some(a.min(std::f64::consts::PI - a));
        }
        (ElementPattern::GlideTranslationThenS, CuspGroup::Glide { beta, .. }) => {
            let midpoint_y = cfg.a0()[1] + axis.b_t[1] / 2.0;
            let offset = midpoint_y.rem_euclid(beta / 2.0);
            rec.margin = Some(MarginCheck {
                midpoint_y,
                offset,
                epsilon,
                holds: epsilon < offset && offset + epsilon < beta / 2.0,
            });
        }
        (ElementPattern::GlideEvenPower, _) => {
            rec.notes = vec![
                "no reflection-axis symmetry between A0 and B0".into(),
                "y-coordinates of A0 and B_t differ, so no translation witness".into(),
            ];
        }
        _ => {}
    }

    match certify(cfg, &axis, tol) {
        Ok(cert) => {
            rec.verdict = Some(cert.verdict);
            rec.witness = cert.witness;
        }
        Err(e) => rec.error = Some(error_kind(&e)),
    }
    Ok(rec)
}

fn summarize(records: &[FamilyRecord]) -> FamilySummary {
    let certified = |r: &FamilyRecord| r.verdict == Some(Verdict::ConditionHolds);
    // Walk backwards while the suffix keeps the property.
    let mut lengths_from = None;
    let mut next_length = f64::INFINITY;
    for r in records.iter().rev() {
        match r.length {
            Some(l) if l < next_length => {
                lengths_from = Some(r.index);
                next_length = l;
            }
            _ => break,
        }
    }
    let mut first_certified = None;
    let mut next_length = f64::INFINITY;
    for r in records.iter().rev() {
        match r.length {
            Some(l) if certified(r) && l < next_length => {
                first_certified = Some(r.index);
                next_length = l;
            }
            _ => break,
        }
    }
    FamilySummary {
        first_certified_index: first_certified,
        certified_count: records.iter().filter(|r| certified(r)).count(),
        lengths_increasing_from: lengths_from,
        any_fails: records.iter().any(|r| r.verdict == Some(Verdict::ConditionFails)),
    }
}

/// Solves and certifies every admissible index of `range`. Per-index failures
/// are recorded, never propagated; records come back in index order.
pub fn enumerate_simple(
    cfg: &CuspConfiguration,
    plan: &FamilyPlan,
    range: RangeInclusive<i64>,
    tol: &Tolerances,
) -> Result<FamilyReport> {
    let fits = match (&plan.pattern, cfg.group()) {
        (ElementPattern::LatticeMultiple { rank, direction }, CuspGroup::Lattice { basis }) => {
            *rank == basis.ncols() && direction < rank
        }
        (ElementPattern::LatticeMultiple { .. }, _) | (_, CuspGroup::Lattice { .. }) => false,
        _ => true,
    };
    if !fits {
        return Err(Error::InvalidPlan("plan does not match the configuration's group".into()));
    }
    let indices: Vec<i64> = range.filter(|&i| plan.pattern.admits(i)).collect();
    let records = indices
        .par_iter()
        .map(|&i| run_index(cfg, plan, i, tol))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&records);
    Ok(FamilyReport {
        plan: plan.clone(),
        records,
        summary,
    })
}
