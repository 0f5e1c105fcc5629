//! Boundary-field recursion and its fixed points.
//!
//! A boundary field h assigns a real value to each vertex; consistency of
//! the finite-volume measures forces, at every vertex x with successors
//! y, z, the recursion u_x = f(u_y, u_z) in the variables u = e^{2h} with
//! kernel
//!
//!   f(x, y) = (θ₁²θ·xy + θ₁(x+y) + θ) / (θ·xy + θ₁(x+y) + θ₁²θ).
//!
//! Constant fields reduce to the fixed-point equation u = g(u) of the
//! diagonal g(u) = f(u, u); period-2 (word-length parity) fields reduce to
//! the two-cycle system u = g(v), v = g(u). Both are solved in closed form
//! here: the cubic behind u = g(u) is deflated by its known root u = 1 to
//! the quadratic u² + (1+α)u + 1 = 0 with α = 2θ₁/θ − θ₁², and the
//! two-cycle quotient is the quadratic c₂(x²+1) + c₁x = 0 below. No
//! iteration in the main path; the sign-scan oracle exists for tests.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::tree::{SubgroupDescriptor, Vertex, Volume};
use crate::util::bisect;

/// A boundary field h: vertex → ℝ, equivalently u = e^{2h} > 0.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldAssignment {
    /// Constant field (translation invariant).
    Constant(f64),
    /// Field depending only on word-length parity: `even` on the even
    /// subgroup, `odd` elsewhere.
    Parity { even: f64, odd: f64 },
    /// Arbitrary per-vertex values.
    Explicit(BTreeMap<Vertex, f64>),
}

fn check_field_value(h: f64) -> Result<()> {
    if !h.is_finite() || !(2.0 * h).exp().is_finite() || (2.0 * h).exp() <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "field value {h} does not give a finite positive u = exp(2h)"
        )));
    }
    Ok(())
}

impl FieldAssignment {
    pub fn constant(h: f64) -> Result<Self> {
        check_field_value(h)?;
        Ok(FieldAssignment::Constant(h))
    }

    pub fn parity(even: f64, odd: f64) -> Result<Self> {
        check_field_value(even)?;
        check_field_value(odd)?;
        Ok(FieldAssignment::Parity { even, odd })
    }

    pub fn explicit(map: BTreeMap<Vertex, f64>) -> Result<Self> {
        for h in map.values() {
            check_field_value(*h)?;
        }
        Ok(FieldAssignment::Explicit(map))
    }

    /// h at a vertex; `None` when an explicit map does not cover it.
    pub fn value(&self, v: &Vertex) -> Option<f64> {
        match self {
            FieldAssignment::Constant(h) => Some(*h),
            FieldAssignment::Parity { even, odd } => {
                Some(if v.in_even_subgroup() { *even } else { *odd })
            }
            FieldAssignment::Explicit(map) => map.get(v).copied(),
        }
    }

    /// u = e^{2h} at a vertex.
    pub fn u_value(&self, v: &Vertex) -> Option<f64> {
        self.value(v).map(|h| (2.0 * h).exp())
    }
}

/// The recursion kernel f(x, y) in the u-variables. Symmetric, positive,
/// and dual under inversion: f(1/x, 1/y) = 1/f(x, y).
pub fn kernel(params: &ModelParams, x: f64, y: f64) -> Result<f64> {
    let valid = x.is_finite() && x > 0.0 && y.is_finite() && y > 0.0;
    if !valid {
        return Err(Error::Domain(format!(
            "kernel arguments must be positive, got ({x}, {y})"
        )));
    }
    Ok(kernel_unchecked(params, x, y))
}

#[inline]
pub(crate) fn kernel_unchecked(params: &ModelParams, x: f64, y: f64) -> f64 {
    let t = params.theta();
    let t1 = params.theta1();
    let t1t1t = t1 * t1 * t;
    (t1t1t * x * y + t1 * (x + y) + t) / (t * x * y + t1 * (x + y) + t1t1t)
}

/// Diagonal of the kernel, g(u) = f(u, u).
pub fn diagonal_kernel(params: &ModelParams, u: f64) -> Result<f64> {
    kernel(params, u, u)
}

#[inline]
fn g(params: &ModelParams, u: f64) -> f64 {
    kernel_unchecked(params, u, u)
}

/// Fixed points of the constant-field equation u = g(u).
///
/// u = 1 is always a solution; the other two, when present, are the roots
/// of u² + (1+α)u + 1 = 0 with α = 2θ₁/θ − θ₁², hence u₁·u₃ = 1.
#[derive(Clone, Copy, Debug)]
pub struct TiFixedPoints {
    pub alpha: f64,
    /// (u₁, u₃) with 0 < u₁ < 1 < u₃, present exactly when the quadratic
    /// has two positive roots, i.e. 1 + α < −2.
    pub nontrivial: Option<(f64, f64)>,
}

impl TiFixedPoints {
    pub fn u1(&self) -> Option<f64> {
        self.nontrivial.map(|(u1, _)| u1)
    }

    pub fn u2(&self) -> f64 {
        1.0
    }

    pub fn u3(&self) -> Option<f64> {
        self.nontrivial.map(|(_, u3)| u3)
    }

    /// All fixed points in increasing order.
    pub fn all(&self) -> Vec<f64> {
        match self.nontrivial {
            Some((u1, u3)) => vec![u1, 1.0, u3],
            None => vec![1.0],
        }
    }
}

/// Near-zero discriminants are treated as "no pair": on the boundary
/// curves the merged double root is the trivial one.
const DISCRIMINANT_FLOOR: f64 = 1e-14;

/// Solves u = g(u) in closed form by deflating the root u = 1.
pub fn ti_fixed_points(params: &ModelParams) -> TiFixedPoints {
    let alpha = 2.0 * params.theta1() / params.theta() - params.theta1() * params.theta1();
    let b = 1.0 + alpha;
    if b < -2.0 {
        let disc = b * b - 4.0;
        if disc > DISCRIMINANT_FLOOR {
            // stable evaluation: the large root first, its reciprocal as
            // the co-root (the quadratic has constant term 1)
            let u3 = 0.5 * (-b + disc.sqrt());
            let u1 = 1.0 / u3;
            return TiFixedPoints {
                alpha,
                nontrivial: Some((u1, u3)),
            };
        }
    }
    TiFixedPoints {
        alpha,
        nontrivial: None,
    }
}

/// Solutions of the parity (two-cycle) system u = g(v), v = g(u).
#[derive(Clone, Copy, Debug)]
pub struct PeriodicFixedPoints {
    /// (u⁎, v⁎) with u⁎ < 1 < v⁎ and u⁎·v⁎ = 1; absent outside the
    /// two-cycle region. (1, 1) is always a solution.
    pub pair: Option<(f64, f64)>,
}

/// Coefficients of the genuine two-cycle quadratic c₂(x² + 1) + c₁x = 0,
/// obtained from (g(g(u)) − u)/(g(u) − u) = 0.
pub(crate) fn periodic_quadratic_coefficients(params: &ModelParams) -> (f64, f64) {
    let t = params.theta();
    let t1 = params.theta1();
    let t1t1t = t1 * t1 * t;
    let c2 = t1t1t * (t1t1t + 2.0 * t1 + t);
    let c1 = t1t1t * t1t1t + 4.0 * t1 * t1 * t1 * t + 4.0 * t1 * t1 - t * t;
    (c2, c1)
}

/// Solves the two-cycle system in closed form. The pair is returned
/// exactly when θ₁ < 1/√3 and θ > 2θ₁/(1 − 3θ₁²).
pub fn periodic_fixed_points(params: &ModelParams) -> PeriodicFixedPoints {
    let t = params.theta();
    let t1 = params.theta1();
    let sqrt3_inv = 1.0 / 3f64.sqrt();
    if t1 >= sqrt3_inv || t <= 2.0 * t1 / (1.0 - 3.0 * t1 * t1) {
        return PeriodicFixedPoints { pair: None };
    }
    let (c2, c1) = periodic_quadratic_coefficients(params);
    // normalized: x² + q x + 1 = 0, so the roots are reciprocal
    let q = c1 / c2;
    let disc = q * q - 4.0;
    if q >= -2.0 || disc <= DISCRIMINANT_FLOOR {
        return PeriodicFixedPoints { pair: None };
    }
    let v = 0.5 * (-q + disc.sqrt());
    let u = 1.0 / v;
    PeriodicFixedPoints { pair: Some((u, v)) }
}

/// Phase-diagram region of a (θ, θ₁) point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Three translation-invariant measures (θ₁ > √3, θ > 2θ₁/(θ₁²−3)).
    ThreeTranslationInvariant,
    /// Three parity-periodic measures (θ₁ < 1/√3, θ > 2θ₁/(1−3θ₁²)).
    ThreePeriodic,
    /// A unique Gibbs measure.
    Unique,
}

/// Region tag plus a signed margin to the nearest defining inequality,
/// in θ/θ₁ units: positive inside a three-measure region, zero on a
/// boundary curve (classified Unique), negative inside the unique region.
#[derive(Clone, Copy, Debug)]
pub struct RegionClass {
    pub region: Region,
    pub boundary_distance: f64,
}

/// Classifies a parameter point. Boundary equalities count as Unique; the
/// defining inequalities are strict.
pub fn classify_region(params: &ModelParams) -> RegionClass {
    let t = params.theta();
    let t1 = params.theta1();
    let sqrt3 = 3f64.sqrt();

    let margin_ti = if t1 > sqrt3 {
        (t1 - sqrt3).min(t - 2.0 * t1 / (t1 * t1 - 3.0))
    } else {
        t1 - sqrt3
    };
    let margin_p = if t1 < 1.0 / sqrt3 {
        (1.0 / sqrt3 - t1).min(t - 2.0 * t1 / (1.0 - 3.0 * t1 * t1))
    } else {
        1.0 / sqrt3 - t1
    };

    if margin_ti > 0.0 {
        RegionClass {
            region: Region::ThreeTranslationInvariant,
            boundary_distance: margin_ti,
        }
    } else if margin_p > 0.0 {
        RegionClass {
            region: Region::ThreePeriodic,
            boundary_distance: margin_p,
        }
    } else {
        RegionClass {
            region: Region::Unique,
            boundary_distance: margin_ti.max(margin_p),
        }
    }
}

/// The set of periodic Gibbs measures compatible with a finite-index
/// subgroup, as named boundary fields.
#[derive(Clone, Debug)]
pub struct PeriodicMeasures {
    pub measures: Vec<(String, FieldAssignment)>,
    /// False exactly at θ₁ = 1, where the kernel is constant in each
    /// argument and the parity classification is not asserted.
    pub kernel_injective: bool,
    pub note: Option<String>,
}

/// Enumerates the subgroup-periodic Gibbs measures: the translation
/// invariant ones always; the genuine parity pair exactly when the
/// subgroup contains no generator and the parameters lie in the two-cycle
/// region.
pub fn classify_periodic_measures(
    subgroup: SubgroupDescriptor,
    params: &ModelParams,
) -> PeriodicMeasures {
    let region = classify_region(params).region;
    let mut measures = Vec::new();

    match region {
        Region::ThreeTranslationInvariant => {
            let ti = ti_fixed_points(params);
            if let Some((u1, u3)) = ti.nontrivial {
                measures.push((
                    "mu1".to_string(),
                    FieldAssignment::Constant(0.5 * u1.ln()),
                ));
                measures.push(("mu2".to_string(), FieldAssignment::Constant(0.0)));
                measures.push((
                    "mu3".to_string(),
                    FieldAssignment::Constant(0.5 * u3.ln()),
                ));
            } else {
                measures.push(("mu2".to_string(), FieldAssignment::Constant(0.0)));
            }
        }
        Region::ThreePeriodic => {
            measures.push(("mu_star".to_string(), FieldAssignment::Constant(0.0)));
            if !subgroup.has_generator() {
                if let Some((u, v)) = periodic_fixed_points(params).pair {
                    measures.push((
                        "mu12".to_string(),
                        FieldAssignment::Parity {
                            even: 0.5 * u.ln(),
                            odd: 0.5 * v.ln(),
                        },
                    ));
                    measures.push((
                        "mu21".to_string(),
                        FieldAssignment::Parity {
                            even: 0.5 * v.ln(),
                            odd: 0.5 * u.ln(),
                        },
                    ));
                }
            }
        }
        Region::Unique => {
            measures.push(("mu2".to_string(), FieldAssignment::Constant(0.0)));
        }
    }

    let kernel_injective = params.theta1() != 1.0;
    let note = if kernel_injective {
        None
    } else {
        Some("kernel non-injective at theta1 = 1; periodic classification not asserted".into())
    };
    PeriodicMeasures {
        measures,
        kernel_injective,
        note,
    }
}

/// Outcome of checking a boundary field against the recursion on V_n.
#[derive(Clone, Copy, Debug)]
pub struct RecursionCheck {
    /// Largest relative residual |u_x − f(u_y, u_z)| / max(1, u_x, f)
    /// over all parent vertices.
    pub max_residual: f64,
    pub pass: bool,
    /// True when the root's three successors carry unequal field values,
    /// in which case the root relation was checked on the first two
    /// successors only.
    pub root_asymmetric: bool,
}

/// Checks the recursion u_x = f(u_y, u_z) for every parent x in V_{n−1}.
///
/// Non-root parents have exactly two successors. The root has three; its
/// relation is checked with the kernel applied to the first two successors
/// in lexicographic order, which is exact for constant and parity fields
/// (all successor values coincide) and flagged `root_asymmetric` otherwise.
pub fn recursion_check(
    params: &ModelParams,
    field: &FieldAssignment,
    n: usize,
    tol: f64,
) -> Result<RecursionCheck> {
    if n == 0 {
        return Err(Error::Domain("recursion check needs depth >= 1".into()));
    }
    let vol = Volume::new(n)?;
    let u_at = |v: &Vertex| -> Result<f64> {
        field.u_value(v).ok_or_else(|| {
            Error::Domain(format!("field not defined at vertex {v} (explicit map too small)"))
        })
    };

    let mut max_residual: f64 = 0.0;
    let mut root_asymmetric = false;
    for i in 0..vol.len() {
        let x = vol.vertex(i);
        if x.level() + 1 > n {
            continue;
        }
        let succ = x.direct_successors();
        if x.is_root() && succ.len() == 3 {
            let u_all: Result<Vec<f64>> = succ.iter().map(u_at).collect();
            let u_all = u_all?;
            if (u_all[0] - u_all[1]).abs() > 0.0 || (u_all[1] - u_all[2]).abs() > 0.0 {
                root_asymmetric = true;
            }
        }
        let ux = u_at(x)?;
        let uy = u_at(&succ[0])?;
        let uz = u_at(&succ[1])?;
        let fxy = kernel(params, uy, uz)?;
        let residual = (ux - fxy).abs() / ux.abs().max(fxy.abs()).max(1.0);
        if residual > max_residual {
            max_residual = residual;
        }
    }
    Ok(RecursionCheck {
        max_residual,
        pass: max_residual <= tol,
        root_asymmetric,
    })
}

/// True iff the field satisfies the recursion on V_n within `tol`.
pub fn verify_recursion(
    params: &ModelParams,
    field: &FieldAssignment,
    n: usize,
    tol: f64,
) -> Result<bool> {
    Ok(recursion_check(params, field, n, tol)?.pass)
}

/// Root counts found by the sign-scan oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootCounts {
    /// Roots of g(u) = u.
    pub fixed_points: usize,
    /// Roots of g(g(u)) = u (fixed points included).
    pub period_two_points: usize,
}

/// Log-spaced grid on [lo, hi] with `n` points, for the scan oracle.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn count_roots(grid: &[f64], mut f: impl FnMut(f64) -> f64) -> usize {
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots
            .iter()
            .all(|&x| (x - r).abs() > 1e-7 * x.abs().max(1.0))
        {
            roots.push(r);
        }
    };
    let mut prev = grid[0];
    let mut fprev = f(prev);
    if fprev == 0.0 {
        push(prev, &mut roots);
    }
    for &u in &grid[1..] {
        let fu = f(u);
        if fu == 0.0 {
            push(u, &mut roots);
        } else if fprev != 0.0 && (fu > 0.0) != (fprev > 0.0) {
            let r = bisect(&mut f, prev, u);
            push(r, &mut roots);
        }
        prev = u;
        fprev = fu;
    }
    roots.len()
}

/// Brute-force root counter for u = g(u) and u = g(g(u)): sign changes on
/// the grid refined by bisection. Used only as an independent cross-check
/// of the closed-form solvers.
pub fn scan_root_counts(params: &ModelParams, grid: &[f64]) -> RootCounts {
    assert!(grid.len() >= 2, "oracle needs a real grid");
    let fixed_points = count_roots(grid, |u| g(params, u) - u);
    let period_two_points = count_roots(grid, |u| g(params, g(params, u)) - u);
    RootCounts {
        fixed_points,
        period_two_points,
    }
}
