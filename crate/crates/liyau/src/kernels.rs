//! Closed-form heat kernels on model manifolds and grid verification of the
//! estimate catalog against them.
//!
//! Two geometries carry elementary kernels:
//!
//! * Euclidean ℝⁿ:  u = (4πt)^{−n/2} e^{−r²/4t}
//! * Hyperbolic H³ with curvature −c² (Ric = −2c²·g):
//!   u = c³ (4πc²t)^{−3/2} (cr/sinh(cr)) e^{−c²t − r²/4t}
//!
//! H² and higher odd dimensions need integral representations and are out of
//! scope; H³ keeps the oracle exact. Everything downstream consumes the
//! logarithmic derivatives f = log u, ‖∇f‖² = f_r², and f_t.

use crate::bounds::Estimate;
use crate::error::{Error, Result};
use crate::search;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Euclidean,
    /// Hyperbolic 3-space with sectional curvature −c².
    Hyperbolic3 { c: f64 },
}

/// A rotationally symmetric model space: dimension plus geometry tag. The
/// Ricci lower-bound constant is derived, not stored: 0 for Euclidean,
/// (n−1)c² = 2c² for H³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelManifold {
    n: u32,
    geometry: Geometry,
}

impl ModelManifold {
    pub fn euclidean(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
        }
        Ok(ModelManifold {
            n,
            geometry: Geometry::Euclidean,
        })
    }

    pub fn hyperbolic3(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!(
                "hyperbolic curvature scale c must be positive, got {c}"
            )));
        }
        Ok(ModelManifold {
            n: 3,
            geometry: Geometry::Hyperbolic3 { c },
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// The sharp Ricci lower-bound constant k with Ric ≥ −k·g.
    pub fn ricci_lower_k(&self) -> f64 {
        match self.geometry {
            Geometry::Euclidean => 0.0,
            Geometry::Hyperbolic3 { c } => 2.0 * c * c,
        }
    }

    pub fn geometry_name(&self) -> &'static str {
        match self.geometry {
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic3 { .. } => "hyperbolic3",
        }
    }
}

/// Kernel log-derivatives at one (r, t) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelPoint {
    pub r: f64,
    pub t: f64,
    /// f = log u
    pub f: f64,
    /// ‖∇f‖² = f_r²
    pub grad_f_sq: f64,
    pub f_t: f64,
}

/// 1/x − coth x, series-protected: both terms are ~1/x near zero while the
/// difference is −x/3 + O(x³).
fn inv_minus_coth(x: f64) -> f64 {
    if x < 0.05 {
        let x2 = x * x;
        -x * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 / 4725.0)))
    } else {
        1.0 / x - x.cosh() / x.sinh()
    }
}

/// log(x / sinh x), series-protected near zero.
fn ln_x_over_sinh(x: f64) -> f64 {
    if x < 0.05 {
        let x2 = x * x;
        -x2 * (1.0 / 6.0 - x2 * (1.0 / 180.0 - x2 / 2835.0))
    } else {
        (x / x.sinh()).ln()
    }
}

/// f, ‖∇f‖² and f_t of the heat kernel at geodesic distance r and time t.
pub fn kernel_logderivs(m: &ModelManifold, r: f64, t: f64) -> Result<KernelPoint> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("kernel time must be positive, got {t}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "geodesic distance must be nonnegative, got {r}"
        )));
    }
    let nf = m.n as f64;
    Ok(match m.geometry {
        Geometry::Euclidean => {
            let f = -(nf / 2.0) * (4.0 * std::f64::consts::PI * t).ln() - r * r / (4.0 * t);
            let fr = -r / (2.0 * t);
            KernelPoint {
                r,
                t,
                f,
                grad_f_sq: fr * fr,
                f_t: -nf / (2.0 * t) + r * r / (4.0 * t * t),
            }
        }
        Geometry::Hyperbolic3 { c } => {
            let x = c * r;
            let f = 3.0 * c.ln() - 1.5 * (4.0 * std::f64::consts::PI * c * c * t).ln()
                + ln_x_over_sinh(x)
                - c * c * t
                - r * r / (4.0 * t);
            // f_r = 1/r − c·coth(cr) − r/(2t) = c(1/x − coth x) − r/(2t)
            let fr = if r == 0.0 {
                0.0
            } else {
                c * inv_minus_coth(x) - r / (2.0 * t)
            };
            KernelPoint {
                r,
                t,
                f,
                grad_f_sq: fr * fr,
                f_t: -1.5 / t - c * c + r * r / (4.0 * t * t),
            }
        }
    })
}

/// Kernel value u = e^f; the simulator's exact initial data and oracle.
pub fn kernel_u(m: &ModelManifold, r: f64, t: f64) -> Result<f64> {
    Ok(kernel_logderivs(m, r, t)?.f.exp())
}

// ---------------------------------------------------------------------------
// Grid verification
// ---------------------------------------------------------------------------

/// Verification grid: uniform in r, log-spaced in t by default (the bounds
/// vary like 1/t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub nr: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
    pub log_time: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_max: 10.0,
            nr: 256,
            t_min: 0.1,
            t_max: 10.0,
            nt: 256,
            log_time: true,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.nr >= 2 && self.nt >= 2) {
            return Err(Error::Domain("grid needs r_max > 0 and at least 2x2 nodes".into()));
        }
        if !(self.t_min > 0.0 && self.t_max >= self.t_min) {
            return Err(Error::Domain(format!(
                "grid time range must satisfy 0 < t_min <= t_max, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    pub fn r_at(&self, i: usize) -> f64 {
        self.r_max * (i as f64) / ((self.nr - 1) as f64)
    }

    pub fn t_at(&self, j: usize) -> f64 {
        let s = (j as f64) / ((self.nt - 1) as f64);
        if self.log_time {
            self.t_min * (self.t_max / self.t_min).powf(s)
        } else {
            self.t_min + (self.t_max - self.t_min) * s
        }
    }
}

/// Outcome of checking one estimate against one kernel over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub model: String,
    pub n: u32,
    pub model_k: f64,
    /// Ricci constant the estimate was evaluated with (≥ model_k).
    pub estimate_k: f64,
    pub estimate: serde_json::Value,
    pub grid: GridSpec,
    /// max over the grid of LHS − RHS (negative means strictly satisfied).
    pub max_violation: f64,
    pub argmax_r: f64,
    pub argmax_t: f64,
    /// max over grid of LHS/RHS on nodes with RHS > 0.
    pub tightness: f64,
    pub tightness_r: f64,
    pub tightness_t: f64,
    pub tolerance: f64,
    /// RHS multiplier, 1.0 in normal use; the falsification harness feeds
    /// 0.999 to prove the check can fail.
    pub rhs_scale: f64,
    pub pass: bool,
}

struct NodeBest {
    violation: f64,
    v_ri: usize,
    v_ti: usize,
    tightness: f64,
    t_ri: usize,
    t_ti: usize,
}

fn better_violation(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    // Strictly larger wins; ties broken by smaller r index, then t index.
    a.0 > b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
}

/// Evaluate LHS = β(t)·‖∇f‖² − f_t and RHS = B(t) at every grid node and
/// report the worst violation plus the tightness ratio. `k_est` defaults to
/// the model's own Ricci constant; anything larger is also a valid lower
/// bound and is accepted.
pub fn verify_on_grid(
    m: &ModelManifold,
    e: &Estimate,
    k_est: Option<f64>,
    grid: &GridSpec,
    tolerance: f64,
    rhs_scale: f64,
) -> Result<VerificationReport> {
    grid.validate()?;
    let k = k_est.unwrap_or_else(|| m.ricci_lower_k());
    if k < m.ricci_lower_k() - 1e-15 {
        return Err(Error::Domain(format!(
            "estimate curvature constant k = {k} is below the model's Ricci \
             lower bound {} — the estimate is not guaranteed there",
            m.ricci_lower_k()
        )));
    }
    e.validate(m.n, k)?;

    let rows: Vec<NodeBest> = (0..grid.nt)
        .into_par_iter()
        .map(|ti| {
            let t = grid.t_at(ti);
            // One bound evaluation per time slice; ψ-based estimates hide a
            // running max in here.
            let beta = e.grad_coeff(t, k).expect("validated estimate");
            let rhs = e.bound(t, m.n, k).expect("validated estimate") * rhs_scale;
            let mut best_v = (f64::NEG_INFINITY, usize::MAX, ti);
            let mut best_t = (f64::NEG_INFINITY, usize::MAX, ti);
            for ri in 0..grid.nr {
                let r = grid.r_at(ri);
                let kp = kernel_logderivs(m, r, t).expect("grid inside kernel domain");
                let lhs = beta * kp.grad_f_sq - kp.f_t;
                let v = (lhs - rhs, ri, ti);
                if better_violation(v, best_v) {
                    best_v = v;
                }
                if rhs > 0.0 {
                    let ratio = (lhs / rhs, ri, ti);
                    if better_violation(ratio, best_t) {
                        best_t = ratio;
                    }
                }
            }
            NodeBest {
                violation: best_v.0,
                v_ri: best_v.1,
                v_ti: best_v.2,
                tightness: best_t.0,
                t_ri: best_t.1,
                t_ti: best_t.2,
            }
        })
        .collect();

    let mut worst = (f64::NEG_INFINITY, usize::MAX, usize::MAX);
    let mut tight = (f64::NEG_INFINITY, usize::MAX, usize::MAX);
    for row in &rows {
        if better_violation((row.violation, row.v_ri, row.v_ti), worst) {
            worst = (row.violation, row.v_ri, row.v_ti);
        }
        if row.t_ri != usize::MAX && better_violation((row.tightness, row.t_ri, row.t_ti), tight) {
            tight = (row.tightness, row.t_ri, row.t_ti);
        }
    }

    Ok(VerificationReport {
        model: m.geometry_name().to_string(),
        n: m.n,
        model_k: m.ricci_lower_k(),
        estimate_k: k,
        estimate: e.descriptor(),
        grid: *grid,
        max_violation: worst.0,
        argmax_r: grid.r_at(worst.1),
        argmax_t: grid.t_at(worst.2),
        tightness: tight.0,
        tightness_r: if tight.1 == usize::MAX { f64::NAN } else { grid.r_at(tight.1) },
        tightness_t: if tight.2 == usize::MAX { f64::NAN } else { grid.t_at(tight.2) },
        tolerance,
        rhs_scale,
        pass: worst.0 <= tolerance,
    })
}

/// Per-node slack rows (r, t, lhs, rhs, slack) for CSV dumps.
pub fn slack_grid(
    m: &ModelManifold,
    e: &Estimate,
    k_est: Option<f64>,
    grid: &GridSpec,
    rhs_scale: f64,
) -> Result<Vec<Vec<f64>>> {
    grid.validate()?;
    let k = k_est.unwrap_or_else(|| m.ricci_lower_k());
    e.validate(m.n, k)?;
    let mut rows = Vec::with_capacity(grid.nr * grid.nt);
    for ti in 0..grid.nt {
        let t = grid.t_at(ti);
        let beta = e.grad_coeff(t, k)?;
        let rhs = e.bound(t, m.n, k)? * rhs_scale;
        for ri in 0..grid.nr {
            let r = grid.r_at(ri);
            let kp = kernel_logderivs(m, r, t)?;
            let lhs = beta * kp.grad_f_sq - kp.f_t;
            rows.push(vec![r, t, lhs, rhs, lhs - rhs]);
        }
    }
    Ok(rows)
}

/// sup over r ∈ [0, r_max] of LHS/RHS at a single time slice, by dense grid
/// plus golden-section refinement in r.
pub fn sharpness_ratio(
    m: &ModelManifold,
    e: &Estimate,
    k_est: Option<f64>,
    t: f64,
    r_max: f64,
) -> Result<f64> {
    let k = k_est.unwrap_or_else(|| m.ricci_lower_k());
    if k < m.ricci_lower_k() - 1e-15 {
        return Err(Error::Domain(
            "estimate curvature constant below the model's Ricci bound".into(),
        ));
    }
    e.validate(m.n, k)?;
    let beta = e.grad_coeff(t, k)?;
    let rhs = e.bound(t, m.n, k)?;
    if !(rhs > 0.0) {
        return Err(Error::Domain(format!(
            "sharpness ratio undefined: RHS = {rhs} at t = {t}"
        )));
    }
    let lhs = |r: f64| {
        let kp = kernel_logderivs(m, r, t).expect("r in domain");
        beta * kp.grad_f_sq - kp.f_t
    };
    let sup = search::certified_max(&lhs, 0.0, r_max, 4096, &[], 1e-12 * r_max.max(1.0));
    Ok(sup.value / rhs)
}
