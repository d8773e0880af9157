//! CSV point sets for external plotting.
//!
//! `boundary.csv` has columns `kind,index,c1,..,c_{n-1}` with kinds `A0`,
//! `B_t`, `C_t`, `D_t` (indexed by family index), `domain` (fundamental-domain
//! vertices in order), `translate` (translation parts of group elements near
//! the domain) and `glide_axis` (two endpoints per reflection axis
//! `y = kβ/2`, indexed by `k`). Coordinates are the group's own.
//!
//! `summary.csv` has one row per family index.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::axis::{AxisResult, CuspConfiguration};
use crate::cusp_group::CuspGroup;
use crate::error::{Error, Result};
use crate::family::FamilyRecord;
use crate::linalg::Vector;

pub const SUMMARY_HEADER: &str = "index,norm_t,d_C_A0,d_D_Bt,length,verdict,s_t_diameter";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One `summary.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub index: i64,
    pub norm_t: f64,
    pub d_c_a0: Option<f64>,
    pub d_d_bt: Option<f64>,
    pub length: Option<f64>,
    pub verdict: String,
    pub s_t_diameter: Option<f64>,
}

impl From<&FamilyRecord> for SummaryRow {
    fn from(r: &FamilyRecord) -> Self {
        Self {
            index: r.index,
            norm_t: r.norm_t,
            d_c_a0: r.d_c_a0,
            d_d_bt: r.d_d_bt,
            length: r.length,
            verdict: r.verdict_label(),
            s_t_diameter: r.s_t_diameter,
        }
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.index,
            num(r.norm_t),
            opt(r.d_c_a0),
            opt(r.d_d_bt),
            opt(r.length),
            r.verdict,
            opt(r.s_t_diameter)
        );
    }
    out
}

pub fn boundary_header(dim: usize) -> String {
    let mut h = String::from("kind,index");
    for i in 1..=dim {
        let _ = write!(h, ",c{i}");
    }
    h
}

fn push_row(out: &mut String, kind: &str, index: Option<i64>, p: &Vector) {
    out.push_str(kind);
    out.push(',');
    if let Some(i) = index {
        let _ = write!(out, "{i}");
    }
    for c in p.iter() {
        out.push(',');
        out.push_str(&num(*c));
    }
    out.push('\n');
}

/// The boundary point set for `axes`, each tagged with its family index.
pub fn boundary_csv(cfg: &CuspConfiguration, axes: &[(i64, AxisResult)]) -> String {
    let dim = cfg.group().dim();
    let a0 = cfg.a0();
    let mut out = boundary_header(dim);
    out.push('\n');
    push_row(&mut out, "A0", None, a0);
    for (i, ax) in axes {
        push_row(&mut out, "B_t", Some(*i), &(&ax.b_t + a0));
        push_row(&mut out, "C_t", Some(*i), &(ax.c_t.horizontal() + a0));
        push_row(&mut out, "D_t", Some(*i), &(ax.d_t.horizontal() + a0));
    }
    let group = cfg.group();
    let vertices = group.fundamental_domain_vertices();
    for (k, v) in vertices.iter().enumerate() {
        push_row(&mut out, "domain", Some(k as i64), v);
    }
    // Neighbouring translates: elements moving the domain's corner by at most
    // twice the domain's diameter.
    let diameter = vertices
        .iter()
        .flat_map(|p| vertices.iter().map(move |q| (p - q).norm()))
        .fold(0.0, f64::max);
    let mut k = 0;
    group.for_each_near(&Vector::zeros(dim), 2.0 * diameter, |_, action| {
        if action.is_translation() {
            push_row(&mut out, "translate", Some(k), &action.translation);
            k += 1;
        }
    });
    if let CuspGroup::Glide { alpha, beta } = group {
        let ys = axes
            .iter()
            .flat_map(|(_, ax)| [ax.b_t[1], ax.c_t.horizontal()[1], ax.d_t.horizontal()[1]])
            .map(|y| y + a0[1])
            .chain([-beta / 2.0, beta / 2.0]);
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), y| (l.min(y), h.max(y)));
        let xs = axes
            .iter()
            .flat_map(|(_, ax)| [ax.b_t[0], ax.c_t.horizontal()[0], ax.d_t.horizontal()[0]])
            .map(|x| x + a0[0])
            .chain([0.0, *alpha]);
        let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
        let step = beta / 2.0;
        for k in (lo / step).floor() as i64..=(hi / step).ceil() as i64 {
            let y = k as f64 * step;
            push_row(&mut out, "glide_axis", Some(k), &Vector::from_column_slice(&[x_lo, y]));
            push_row(&mut out, "glide_axis", Some(k), &Vector::from_column_slice(&[x_hi, y]));
        }
    }
    out
}

/// Writes `boundary.csv` and `summary.csv` into `out_dir`, creating it if
/// needed.
pub fn emit_plot_data(
    cfg: &CuspConfiguration,
    axes: &[(i64, AxisResult)],
    rows: &[SummaryRow],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let files = [
        (out_dir.join("boundary.csv"), boundary_csv(cfg, axes)),
        (out_dir.join("summary.csv"), summary_csv(rows)),
    ];
    for (path, text) in &files {
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
