//! Fixed differentiable maps from a head output onto a constraint surface,
//! their Jacobian-transpose products, and surface-membership tests.
//!
//! | kind              | head arity | ambient dim |
//! |-------------------|-----------:|------------:|
//! | `Sphere { dim }`  | `dim`      | `dim`       |
//! | `TorusFlat`       | 2          | 4           |
//! | `TorusEmbedded`   | 2          | 3           |
//! | `MobiusFlat`      | 3          | 3           |
//! | `MobiusEmbedded`  | 2          | 3           |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{l2_norm, l2_normalize, EPS_NORM};

/// Half-width of the embedded Möbius strip. The width coordinate is squashed
/// to `MOBIUS_HALF_WIDTH * tanh(f₂)` before the parametrization.
pub const MOBIUS_HALF_WIDTH: f64 = 1.0;

pub const DEFAULT_MAJOR_RADIUS: f64 = 2.0;
pub const DEFAULT_MINOR_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    /// Unit sphere in `dim` dimensions.
    Sphere { dim: usize },
    /// Product of two unit circles in ℝ⁴.
    TorusFlat,
    /// Ring torus in ℝ³ with major radius `major` > minor radius `minor` > 0.
    TorusEmbedded { major: f64, minor: f64 },
    /// `(cos f₁·f₂, sin f₁·f₂, f₃)`.
    MobiusFlat,
    /// Half-twist strip of unit center radius.
    MobiusEmbedded,
}

impl ManifoldKind {
    pub fn sphere(dim: usize) -> Self {
        ManifoldKind::Sphere { dim }
    }

    pub fn torus_embedded() -> Self {
        ManifoldKind::TorusEmbedded {
            major: DEFAULT_MAJOR_RADIUS,
            minor: DEFAULT_MINOR_RADIUS,
        }
    }

    /// Number of head components the projection consumes.
    pub fn input_arity(&self) -> usize {
        match *self {
            ManifoldKind::Sphere { dim } => dim,
            ManifoldKind::TorusFlat | ManifoldKind::TorusEmbedded { .. } => 2,
            ManifoldKind::MobiusFlat => 3,
            ManifoldKind::MobiusEmbedded => 2,
        }
    }

    /// Length of a projected point.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            ManifoldKind::Sphere { dim } => dim,
            ManifoldKind::TorusFlat => 4,
            _ => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldKind::Sphere { .. } => "sphere",
            ManifoldKind::TorusFlat => "torus_flat",
            ManifoldKind::TorusEmbedded { .. } => "torus_embedded",
            ManifoldKind::MobiusFlat => "mobius_flat",
            ManifoldKind::MobiusEmbedded => "mobius_embedded",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ManifoldKind::Sphere { dim } if dim < 2 => Err(Error::Geometry(format!(
                "sphere dimension must be at least 2, got {dim}"
            ))),
            ManifoldKind::TorusEmbedded { major, minor } => check_radii(major, minor),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldKind::Sphere { dim } => write!(f, "sphere({dim})"),
            ManifoldKind::TorusEmbedded { major, minor } => {
                write!(f, "torus_embedded(R={major}, r={minor})")
            }
            other => f.write_str(other.name()),
        }
    }
}

fn check_radii(major: f64, minor: f64) -> Result<()> {
    if minor > 0.0 && major > minor && major.is_finite() {
        Ok(())
    } else {
        Err(Error::Geometry(format!(
            "torus radii need R > r > 0, got R={major}, r={minor}"
        )))
    }
}

pub fn project_sphere(v: &[f64]) -> Result<Vec<f64>> {
    l2_normalize(v)
}

pub fn project_torus_flat(f1: f64, f2: f64) -> [f64; 4] {
    [f1.cos(), f1.sin(), f2.cos(), f2.sin()]
}

pub fn project_torus_embedded(f1: f64, f2: f64, major: f64, minor: f64) -> Result<[f64; 3]> {
    check_radii(major, minor)?;
    let ring = major + minor * f2.cos();
    Ok([ring * f1.cos(), ring * f1.sin(), minor * f2.sin()])
}

pub fn project_mobius_flat(f1: f64, f2: f64, f3: f64) -> [f64; 3] {
    [f1.cos() * f2, f1.sin() * f2, f3]
}

/// The embedded Möbius parametrization with `f₂` used as-is. [`project`]
/// squashes `f₂` into the strip's width first; this raw form is exposed for
/// callers that manage the width themselves.
pub fn project_mobius_embedded(f1: f64, f2: f64) -> [f64; 3] {
    let half = f1 / 2.0;
    let radial = 1.0 + (f2 / 2.0) * half.cos();
    [
        radial * f1.cos(),
        radial * f1.sin(),
        (f2 / 2.0) * half.sin(),
    ]
}

fn check_arity(kind: &ManifoldKind, got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::Arity {
            kind: kind.to_string(),
            expected,
            got,
        })
    }
}

/// Maps a head output onto the surface selected by `kind`.
pub fn project(kind: &ManifoldKind, v: &[f64]) -> Result<Vec<f64>> {
    check_arity(kind, v.len(), kind.input_arity())?;
    let point = match *kind {
        ManifoldKind::Sphere { .. } => project_sphere(v)?,
        ManifoldKind::TorusFlat => project_torus_flat(v[0], v[1]).to_vec(),
        ManifoldKind::TorusEmbedded { major, minor } => {
            project_torus_embedded(v[0], v[1], major, minor)?.to_vec()
        }
        ManifoldKind::MobiusFlat => project_mobius_flat(v[0], v[1], v[2]).to_vec(),
        ManifoldKind::MobiusEmbedded => {
            project_mobius_embedded(v[0], MOBIUS_HALF_WIDTH * v[1].tanh()).to_vec()
        }
    };
    if point.iter().all(|x| x.is_finite()) {
        Ok(point)
    } else {
        Err(Error::NonFinite { op: "project" })
    }
}

/// `Jᵀ · upstream`, where `J` is the Jacobian of `project(kind, ·)` at `v`.
pub fn project_backward(kind: &ManifoldKind, v: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
    check_arity(kind, v.len(), kind.input_arity())?;
    check_arity(kind, upstream.len(), kind.ambient_dim())?;
    let g = upstream;
    let grad = match *kind {
        ManifoldKind::Sphere { .. } => {
            // (I - uuᵀ) g / ‖v‖
            let norm = l2_norm(v);
            if norm <= EPS_NORM {
                return Err(Error::DegenerateNorm {
                    norm,
                    threshold: EPS_NORM,
                });
            }
            let u: Vec<f64> = v.iter().map(|x| x / norm).collect();
            let dot: f64 = u.iter().zip(g).map(|(a, b)| a * b).sum();
            g.iter()
                .zip(&u)
                .map(|(gi, ui)| (gi - dot * ui) / norm)
                .collect()
        }
        ManifoldKind::TorusFlat => {
            let (s1, c1) = v[0].sin_cos();
            let (s2, c2) = v[1].sin_cos();
            vec![-s1 * g[0] + c1 * g[1], -s2 * g[2] + c2 * g[3]]
        }
        ManifoldKind::TorusEmbedded { major, minor } => {
            check_radii(major, minor)?;
            let (s1, c1) = v[0].sin_cos();
            let (s2, c2) = v[1].sin_cos();
            let ring = major + minor * c2;
            vec![
                -ring * s1 * g[0] + ring * c1 * g[1],
                -minor * s2 * c1 * g[0] - minor * s2 * s1 * g[1] + minor * c2 * g[2],
            ]
        }
        ManifoldKind::MobiusFlat => {
            let (s1, c1) = v[0].sin_cos();
            vec![v[1] * (-s1 * g[0] + c1 * g[1]), c1 * g[0] + s1 * g[1], g[2]]
        }
        ManifoldKind::MobiusEmbedded => {
            let squashed = v[1].tanh();
            let width = MOBIUS_HALF_WIDTH * squashed;
            let (s1, c1) = v[0].sin_cos();
            let (sh, ch) = (v[0] / 2.0).sin_cos();
            let radial = 1.0 + (width / 2.0) * ch;
            let radial_d1 = -(width / 4.0) * sh;
            let d_f1 = [
                radial_d1 * c1 - radial * s1,
                radial_d1 * s1 + radial * c1,
                (width / 4.0) * ch,
            ];
            let d_width = [ch / 2.0 * c1, ch / 2.0 * s1, sh / 2.0];
            let chain = MOBIUS_HALF_WIDTH * (1.0 - squashed * squashed);
            vec![dot3(&d_f1, g), chain * dot3(&d_width, g)]
        }
    };
    if grad.iter().all(|x| x.is_finite()) {
        Ok(grad)
    } else {
        Err(Error::NonFinite {
            op: "project_backward",
        })
    }
}

fn dot3(a: &[f64; 3], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Whether `p` lies on the surface within `tol`.
///
/// The Möbius variants are checked by recovering a preimage (angle from
/// `atan2`, remaining coordinates by least squares) and comparing its
/// reconstruction against `p`.
pub fn on_manifold(kind: &ManifoldKind, p: &[f64], tol: f64) -> Result<bool> {
    check_arity(kind, p.len(), kind.ambient_dim())?;
    if !p.iter().all(|x| x.is_finite()) {
        return Ok(false);
    }
    let ok = match *kind {
        ManifoldKind::Sphere { .. } => (l2_norm(p) - 1.0).abs() <= tol,
        ManifoldKind::TorusFlat => {
            (p[0] * p[0] + p[1] * p[1] - 1.0).abs() <= tol
                && (p[2] * p[2] + p[3] * p[3] - 1.0).abs() <= tol
        }
        ManifoldKind::TorusEmbedded { major, minor } => {
            let ring = p[0].hypot(p[1]) - major;
            (ring * ring + p[2] * p[2] - minor * minor).abs() <= tol
        }
        ManifoldKind::MobiusFlat => {
            let angle = p[1].atan2(p[0]);
            let radius = p[0].hypot(p[1]);
            let q = project_mobius_flat(angle, radius, p[2]);
            max_abs_diff(&q, p) <= tol
        }
        ManifoldKind::MobiusEmbedded => {
            let angle = p[1].atan2(p[0]);
            let (sh, ch) = (angle / 2.0).sin_cos();
            // (ρ − 1, z) = (w/2)(cos θ/2, sin θ/2)
            let half_width = (p[0].hypot(p[1]) - 1.0) * ch + p[2] * sh;
            let width = 2.0 * half_width;
            let q = project_mobius_embedded(angle, width);
            width.abs() <= MOBIUS_HALF_WIDTH + tol && max_abs_diff(&q, p) <= tol
        }
    };
    Ok(ok)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
