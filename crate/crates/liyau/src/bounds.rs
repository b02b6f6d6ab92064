//! The gradient-estimate catalog.
//!
//! Every estimate is kept in the normalized β-form
//!
//! ```text
//! β(t)·‖∇f‖² − f_t ≤ B(t),      f = log u,
//! ```
//!
//! for a positive heat-equation solution u on a manifold of dimension n with
//! Ricci curvature ≥ −k. Estimates stated in the α-form
//! ‖∇f‖² − α f_t ≤ C convert by β = 1/α, B = C/α on ingestion.
//!
//! The catalog spans the classical constant-parameter bounds, the
//! quadrature-form family driven by a weight function a(t), and the
//! time-dependent-parameter bounds ψ₁ and ψ₂ built from a curve β(t):
//!
//! ```text
//! ψ₁(t) = n/(2t) · max_{s∈[0,t]} [ 1/β + (2kβ + β′)₊ s / (4β(1−β)) ]
//! σ(t)  = max_{s∈[0,t]} (2kβ + β′)₊ s / (1−β)
//! λ(t)  = inf_{s∈[0,t]} β
//! ψ₂(t) = n/(2λt)                 if σ(t) < 2
//!       = nσ²/(8(σ−1)λt)          if σ(t) ≥ 2
//! ```
//!
//! Running extrema are certified: 2048-point uniform grids with the kinks of
//! (·)₊ located by bisection and inserted as grid points, then golden-section
//! refinement around every local extremum candidate. The removable 0/0 at
//! s = 0 when β(0) = 1 is evaluated by its analytic limit.

use crate::error::{Error, Result};
use crate::paramfun::{validate_beta, validate_weight, ParamFunction, WeightFunction};
use crate::quad;
use crate::search;

/// Evaluations below this time are rejected; every bound here diverges as
/// t → 0 and the estimates live on (0, T].
pub const MIN_TIME: f64 = 1e-10;

/// Grid density for certified running extrema.
const RUNMAX_GRID: usize = 2048;

/// Abscissa tolerance of the golden-section refinement.
fn runmax_tol(t: f64) -> f64 {
    1e-10 * t.max(1.0)
}

// ---------------------------------------------------------------------------
// Estimate identifiers and records
// ---------------------------------------------------------------------------

/// Stable identifiers; these exact strings appear in CLI flags, config files
/// and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateId {
    LiYau,
    DaviesAlpha,
    DaviesBeta,
    Hamilton,
    HamiltonTheta,
    LiXu,
    LiXuLinear,
    QianGeneral,
    QianTheta,
    Psi1,
    Psi2,
    Cor12,
    Cor14,
    Cor15,
}

impl EstimateId {
    pub const ALL: [EstimateId; 14] = [
        EstimateId::LiYau,
        EstimateId::DaviesAlpha,
        EstimateId::DaviesBeta,
        EstimateId::Hamilton,
        EstimateId::HamiltonTheta,
        EstimateId::LiXu,
        EstimateId::LiXuLinear,
        EstimateId::QianGeneral,
        EstimateId::QianTheta,
        EstimateId::Psi1,
        EstimateId::Psi2,
        EstimateId::Cor12,
        EstimateId::Cor14,
        EstimateId::Cor15,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimateId::LiYau => "li_yau",
            EstimateId::DaviesAlpha => "davies_alpha",
            EstimateId::DaviesBeta => "davies_beta",
            EstimateId::Hamilton => "hamilton",
            EstimateId::HamiltonTheta => "hamilton_theta",
            EstimateId::LiXu => "li_xu",
            EstimateId::LiXuLinear => "li_xu_linear",
            EstimateId::QianGeneral => "qian_general",
            EstimateId::QianTheta => "qian_theta",
            EstimateId::Psi1 => "psi1",
            EstimateId::Psi2 => "psi2",
            EstimateId::Cor12 => "cor12",
            EstimateId::Cor14 => "cor14",
            EstimateId::Cor15 => "cor15",
        }
    }
}

impl std::str::FromStr for EstimateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimateId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimate identifier '{s}'")))
    }
}

impl std::fmt::Display for EstimateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A concrete estimate: identifier plus whatever parameters it carries.
#[derive(Debug, Clone)]
pub enum Estimate {
    /// ‖∇f‖² − αf_t ≤ nα²/(2t) + nα²k/(2(α−1)), α > 1 (α-form).
    LiYau { alpha: f64 },
    /// ‖∇f‖² − αf_t ≤ nα²/(2t) + nα²k/(4(α−1)), α > 1 (α-form).
    DaviesAlpha { alpha: f64 },
    /// β‖∇f‖² − f_t ≤ n/(2βt) + nk/(4(1−β)), β ∈ (0,1).
    DaviesBeta { beta: f64 },
    /// ‖∇f‖² − e^{2kt}f_t ≤ e^{4kt}·n/(2t) (α-form with α = e^{2kt}).
    Hamilton,
    /// e^{−2θkt}‖∇f‖² − f_t ≤ (n/2t)e^{2θkt} + nk(1−θ)/(4(1−e^{−2θkt})),
    /// θ ∈ (0,1].
    HamiltonTheta { theta: f64 },
    /// The hyperbolic-weight estimate with coefficient
    /// 1 + (sinh(kt)cosh(kt) − kt)/sinh²(kt) (α-form).
    LiXu,
    /// ‖∇f‖² − (1 + 2kt/3)f_t ≤ n/(2t) + (nk/2)(1 + kt/3) (α-form).
    LiXuLinear,
    /// The quadrature-form estimate driven by a weight function a(t).
    QianGeneral { weight: WeightFunction },
    /// ‖∇f‖² − (1+θkt)f_t ≤ (2−θ)²n/(16θ(1−θ)t) + nk²θt/4 + nk/2, θ ∈ (0,1).
    QianTheta { theta: f64 },
    /// ψ₁ with the given parameter curve.
    Psi1 { beta: ParamFunction },
    /// ψ₂ with the given parameter curve.
    Psi2 { beta: ParamFunction },
    /// Piecewise improvement with crossover (1−β)/(2kβ); k > 0.
    Cor12 { beta: f64 },
    /// Piecewise improvement with crossover (1−β)/(kβ); k > 0.
    Cor14 { beta: f64 },
    /// Piecewise bound with crossover 3(1−β)/(2k); k > 0.
    Cor15 { beta: f64 },
}

impl Estimate {
    pub fn id(&self) -> EstimateId {
        match self {
            Estimate::LiYau { .. } => EstimateId::LiYau,
            Estimate::DaviesAlpha { .. } => EstimateId::DaviesAlpha,
            Estimate::DaviesBeta { .. } => EstimateId::DaviesBeta,
            Estimate::Hamilton => EstimateId::Hamilton,
            Estimate::HamiltonTheta { .. } => EstimateId::HamiltonTheta,
            Estimate::LiXu => EstimateId::LiXu,
            Estimate::LiXuLinear => EstimateId::LiXuLinear,
            Estimate::QianGeneral { .. } => EstimateId::QianGeneral,
            Estimate::QianTheta { .. } => EstimateId::QianTheta,
            Estimate::Psi1 { .. } => EstimateId::Psi1,
            Estimate::Psi2 { .. } => EstimateId::Psi2,
            Estimate::Cor12 { .. } => EstimateId::Cor12,
            Estimate::Cor14 { .. } => EstimateId::Cor14,
            Estimate::Cor15 { .. } => EstimateId::Cor15,
        }
    }

    /// Build a classical (parameter-scalar) estimate from an identifier and
    /// flat parameter list. `psi1`/`psi2`/`qian_general` carry structured
    /// parameters and are built directly.
    pub fn classical(id: EstimateId, params: &[f64]) -> Result<Estimate> {
        let one = |what: &str| -> Result<f64> {
            if params.len() == 1 {
                Ok(params[0])
            } else {
                Err(Error::Config(format!(
                    "estimate '{}' expects one parameter ({what}), got {}",
                    id.name(),
                    params.len()
                )))
            }
        };
        let none = || -> Result<()> {
            if params.is_empty() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "estimate '{}' takes no parameters",
                    id.name()
                )))
            }
        };
        Ok(match id {
            EstimateId::LiYau => Estimate::LiYau { alpha: one("alpha")? },
            EstimateId::DaviesAlpha => Estimate::DaviesAlpha { alpha: one("alpha")? },
            EstimateId::DaviesBeta => Estimate::DaviesBeta { beta: one("beta")? },
            EstimateId::Hamilton => {
                none()?;
                Estimate::Hamilton
            }
            EstimateId::HamiltonTheta => Estimate::HamiltonTheta { theta: one("theta")? },
            EstimateId::LiXu => {
                none()?;
                Estimate::LiXu
            }
            EstimateId::LiXuLinear => {
                none()?;
                Estimate::LiXuLinear
            }
            EstimateId::QianTheta => Estimate::QianTheta { theta: one("theta")? },
            EstimateId::Cor12 => Estimate::Cor12 { beta: one("beta")? },
            EstimateId::Cor14 => Estimate::Cor14 { beta: one("beta")? },
            EstimateId::Cor15 => Estimate::Cor15 { beta: one("beta")? },
            EstimateId::QianGeneral | EstimateId::Psi1 | EstimateId::Psi2 => {
                return Err(Error::Config(format!(
                    "estimate '{}' needs structured parameters (weight or beta curve)",
                    id.name()
                )))
            }
        })
    }

    /// Whether the estimate is natively stated in α-form or β-form;
    /// recorded in reports.
    pub fn form_note(&self) -> &'static str {
        match self {
            Estimate::LiYau { .. }
            | Estimate::DaviesAlpha { .. }
            | Estimate::Hamilton
            | Estimate::LiXu
            | Estimate::LiXuLinear
            | Estimate::QianGeneral { .. }
            | Estimate::QianTheta { .. } => "alpha-form, normalized by beta = 1/alpha, B = C/alpha",
            Estimate::DaviesBeta { .. }
            | Estimate::HamiltonTheta { .. }
            | Estimate::Psi1 { .. }
            | Estimate::Psi2 { .. }
            | Estimate::Cor12 { .. }
            | Estimate::Cor14 { .. }
            | Estimate::Cor15 { .. } => "beta-form",
        }
    }

    /// Parameter-domain validation for evaluation at a given (n, k).
    pub fn validate(&self, n: u32, k: f64) -> Result<()> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension n must be >= 2, got {n}")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("k must be nonnegative, got {k}")));
        }
        match self {
            Estimate::LiYau { alpha } | Estimate::DaviesAlpha { alpha } => {
                if !(*alpha > 1.0) {
                    return Err(Error::Domain(format!(
                        "'{}' requires alpha > 1, got {alpha}",
                        self.id().name()
                    )));
                }
            }
            Estimate::DaviesBeta { beta } => {
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::Domain(format!(
                        "davies_beta requires beta in (0,1), got {beta}"
                    )));
                }
            }
            Estimate::Hamilton | Estimate::LiXu | Estimate::LiXuLinear => {}
            Estimate::HamiltonTheta { theta } => {
                if !(*theta > 0.0 && *theta <= 1.0) {
                    return Err(Error::Domain(format!(
                        "hamilton_theta requires theta in (0,1], got {theta}"
                    )));
                }
            }
            Estimate::QianTheta { theta } => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(Error::Domain(format!(
                        "qian_theta requires theta in (0,1), got {theta}"
                    )));
                }
            }
            Estimate::QianGeneral { weight } => {
                let cert = validate_weight(weight);
                if !cert.feasible() {
                    return Err(Error::Domain(format!(
                        "qian_general weight fails (A1)-(A3): {cert:?}"
                    )));
                }
            }
            Estimate::Psi1 { beta } | Estimate::Psi2 { beta } => {
                require_admissible(beta, k)?;
            }
            Estimate::Cor12 { beta } | Estimate::Cor14 { beta } | Estimate::Cor15 { beta } => {
                if !(k > 0.0) {
                    return Err(Error::Domain(format!(
                        "'{}' requires k > 0 (crossover time degenerates at k = 0)",
                        self.id().name()
                    )));
                }
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::Domain(format!(
                        "'{}' requires beta in (0,1), got {beta}",
                        self.id().name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// β(t): the coefficient multiplying ‖∇f‖² in β-form.
    pub fn grad_coeff(&self, t: f64, k: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self {
            Estimate::LiYau { alpha } | Estimate::DaviesAlpha { alpha } => 1.0 / alpha,
            Estimate::DaviesBeta { beta }
            | Estimate::Cor12 { beta }
            | Estimate::Cor14 { beta }
            | Estimate::Cor15 { beta } => *beta,
            Estimate::Hamilton => (-2.0 * k * t).exp(),
            Estimate::HamiltonTheta { theta } => (-2.0 * theta * k * t).exp(),
            Estimate::LiXu => 1.0 / (1.0 + li_xu_ratio(k * t)),
            Estimate::LiXuLinear => 1.0 / (1.0 + 2.0 * k * t / 3.0),
            Estimate::QianTheta { theta } => 1.0 / (1.0 + theta * k * t),
            Estimate::QianGeneral { weight } => {
                let int_a = weight.integral(t)?;
                1.0 / (1.0 + 2.0 * k * int_a / weight.value(t))
            }
            Estimate::Psi1 { beta } | Estimate::Psi2 { beta } => {
                beta.eval(t)?;
                beta.value(t)
            }
        })
    }

    /// B(t): the right-hand side in β-form.
    pub fn bound(&self, t: f64, n: u32, k: f64) -> Result<f64> {
        check_time(t)?;
        let nf = n as f64;
        Ok(match self {
            Estimate::LiYau { alpha } => {
                alpha * nf / (2.0 * t) + alpha * nf * k / (2.0 * (alpha - 1.0))
            }
            Estimate::DaviesAlpha { alpha } => {
                alpha * nf / (2.0 * t) + alpha * nf * k / (4.0 * (alpha - 1.0))
            }
            Estimate::DaviesBeta { beta } => {
                nf / (2.0 * beta * t) + nf * k / (4.0 * (1.0 - beta))
            }
            Estimate::Hamilton => nf / (2.0 * t) * (2.0 * k * t).exp(),
            Estimate::HamiltonTheta { theta } => {
                // nk(1−θ)/(4(1−e^{−y})) written as n(1−θ)/(8θt)·y/(1−e^{−y})
                // so the k → 0 limit comes out of expm1 for free.
                let y = 2.0 * theta * k * t;
                let correction = if y == 0.0 { 1.0 } else { y / (-(-y).exp_m1()) };
                nf / (2.0 * t) * y.exp() + nf * (1.0 - theta) / (8.0 * theta * t) * correction
            }
            Estimate::LiXu => {
                let x = k * t;
                let c = if x == 0.0 {
                    nf / (2.0 * t)
                } else {
                    nf * k / 2.0 * (x.cosh() / x.sinh() + 1.0)
                };
                c / (1.0 + li_xu_ratio(x))
            }
            Estimate::LiXuLinear => {
                let alpha = 1.0 + 2.0 * k * t / 3.0;
                (nf / (2.0 * t) + nf * k / 2.0 * (1.0 + k * t / 3.0)) / alpha
            }
            Estimate::QianTheta { theta } => {
                let alpha = 1.0 + theta * k * t;
                let c = (2.0 - theta).powi(2) * nf / (16.0 * theta * (1.0 - theta) * t)
                    + nf * k * k * theta * t / 4.0
                    + nf * k / 2.0;
                c / alpha
            }
            Estimate::QianGeneral { weight } => {
                return qian_general_unchecked(weight, t, n, k, QuadratureMode::Auto)
                    .map(|(_, b)| b)
            }
            Estimate::Psi1 { beta } => return psi1_unchecked(beta, t, n, k),
            Estimate::Psi2 { beta } => return psi2_unchecked(beta, t, n, k),
            Estimate::Cor12 { beta } => {
                if t < (1.0 - beta) / (2.0 * k * beta) {
                    nf / (2.0 * beta * t)
                } else {
                    3.0 * nf / (8.0 * beta * t) + nf * k / (4.0 * (1.0 - beta))
                }
            }
            Estimate::Cor14 { beta } => {
                if t < (1.0 - beta) / (k * beta) {
                    nf / (2.0 * beta * t)
                } else {
                    nf / (4.0 * beta * t) + nf * k / (4.0 * (1.0 - beta))
                }
            }
            Estimate::Cor15 { beta } => {
                if t < 3.0 * (1.0 - beta) / (2.0 * k) {
                    nf / (2.0 * beta * t)
                } else {
                    3.0 * (1.0 - beta) * nf / (16.0 * k * beta * t * t)
                        + nf * k / (4.0 * (1.0 - beta) * beta)
                }
            }
        })
    }

    /// (β(t), B(t)) after validation.
    pub fn eval(&self, t: f64, n: u32, k: f64) -> Result<(f64, f64)> {
        self.validate(n, k)?;
        Ok((self.grad_coeff(t, k)?, self.bound(t, n, k)?))
    }

    /// The equivalent α-form pair (α, C) = (1/β, B/β).
    pub fn alpha_form(&self, t: f64, n: u32, k: f64) -> Result<(f64, f64)> {
        let (beta, b) = self.eval(t, n, k)?;
        Ok((1.0 / beta, b / beta))
    }

    /// JSON-friendly description (id plus parameters) for reports.
    pub fn descriptor(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("id".into(), self.id().name().into());
        match self {
            Estimate::LiYau { alpha } | Estimate::DaviesAlpha { alpha } => {
                m.insert("alpha".into(), (*alpha).into());
            }
            Estimate::DaviesBeta { beta }
            | Estimate::Cor12 { beta }
            | Estimate::Cor14 { beta }
            | Estimate::Cor15 { beta } => {
                m.insert("beta".into(), (*beta).into());
            }
            Estimate::HamiltonTheta { theta } | Estimate::QianTheta { theta } => {
                m.insert("theta".into(), (*theta).into());
            }
            Estimate::Hamilton | Estimate::LiXu | Estimate::LiXuLinear => {}
            Estimate::QianGeneral { weight } => {
                let (name, params) = weight.descriptor();
                m.insert("weight_family".into(), name.into());
                m.insert("weight_params".into(), params.into());
            }
            Estimate::Psi1 { beta } | Estimate::Psi2 { beta } => {
                let (name, params) = beta.descriptor();
                m.insert("beta_family".into(), name.into());
                m.insert("beta_params".into(), params.into());
                m.insert("horizon".into(), beta.horizon().into());
                m.insert("family_k".into(), beta.curvature().into());
            }
        }
        serde_json::Value::Object(m)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= MIN_TIME && t.is_finite()) {
        return Err(Error::Domain(format!(
            "t = {t} out of range: bounds are evaluated on [{MIN_TIME}, T]"
        )));
    }
    Ok(())
}

/// (sinh x cosh x − x)/sinh²x, the Li-Xu coefficient minus one.
/// Series-protected: the numerator cancels to O(x³) near zero.
fn li_xu_ratio(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() < 0.05 {
        let x2 = x * x;
        x * (2.0 / 3.0 + x2 * (-4.0 / 45.0 + x2 * (4.0 / 315.0)))
    } else {
        let s = x.sinh();
        (s * x.cosh() - x) / (s * s)
    }
}

/// Admissibility gate for ψ₁/ψ₂: the theorem conditions (B1)/(B2), plus the
/// constant-unit degenerate limit at k = 0 (what the closed-form families
/// become as θk → 0, where both estimates collapse to the sharp n/(2t)).
fn require_admissible(beta: &ParamFunction, k: f64) -> Result<()> {
    let cert = validate_beta(beta);
    if cert.feasible() || (cert.degenerate_unit && k == 0.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "parameter curve fails (B1)/(B2): b1={} b2={} margin={:.3e} violations={:?}",
            cert.b1_ok, cert.b2_ok, cert.min_margin, cert.violations
        )))
    }
}

// ---------------------------------------------------------------------------
// ψ₁, σ/λ, ψ₂
// ---------------------------------------------------------------------------

/// Sign-change abscissae of κ(s) = 2kβ(s) + β′(s) on [0, t]: the kinks of
/// the (·)₊ terms. Derivative breakpoints are scanned as well.
fn kappa_kinks(beta: &ParamFunction, k: f64, t: f64) -> Vec<f64> {
    let kappa = |s: f64| 2.0 * k * beta.value(s) + beta.deriv(s);
    let mut nodes: Vec<f64> = (0..=512).map(|i| t * (i as f64) / 512.0).collect();
    for b in beta.breakpoints() {
        if b > 0.0 && b < t {
            nodes.push(b);
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();

    let mut kinks = Vec::new();
    let mut prev = (nodes[0], kappa(nodes[0]));
    for &x in &nodes[1..] {
        let v = kappa(x);
        if prev.1 == 0.0 {
            kinks.push(prev.0);
        } else if prev.1.signum() != v.signum() && v != 0.0 {
            if let Some(root) = search::bisect_sign_change(&kappa, prev.0, x, 1e-14 * t.max(1.0)) {
                kinks.push(root);
            }
        }
        prev = (x, v);
    }
    kinks
}

/// The ψ₁ integrand 1/β + (2kβ + β′)₊ s / (4β(1−β)), with the s = 0 limit
/// (2k + β′(0))₊/(−4β′(0)) substituted when β(0) = 1. The 1−β factor comes
/// from the cancellation-safe form to keep the ratio smooth near β = 1.
fn psi1_integrand(beta: &ParamFunction, k: f64) -> impl Fn(f64) -> f64 + '_ {
    move |s: f64| {
        let b = beta.value(s);
        let bp = beta.deriv(s);
        let om = beta.one_minus_value(s);
        let kappa = 2.0 * k * b + bp;
        if kappa <= 0.0 {
            return 1.0 / b;
        }
        if om <= 0.0 {
            // Reachable only at s = 0 for admissible curves; (B2) forces
            // β′(0) < 0 there.
            if bp < 0.0 {
                return 1.0 / b + kappa / (-4.0 * bp);
            }
            return f64::INFINITY;
        }
        1.0 / b + kappa * s / (4.0 * b * om)
    }
}

/// The σ integrand (2kβ + β′)₊ s / (1−β) with the same s = 0 limit handling.
fn sigma_integrand(beta: &ParamFunction, k: f64) -> impl Fn(f64) -> f64 + '_ {
    move |s: f64| {
        let b = beta.value(s);
        let bp = beta.deriv(s);
        let om = beta.one_minus_value(s);
        let kappa = 2.0 * k * b + bp;
        if kappa <= 0.0 {
            return 0.0;
        }
        if om <= 0.0 {
            if bp < 0.0 {
                return kappa / (-bp);
            }
            return f64::INFINITY;
        }
        kappa * s / om
    }
}

fn check_psi_time(beta: &ParamFunction, t: f64) -> Result<()> {
    check_time(t)?;
    if t > beta.horizon() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "t = {t} beyond the parameter curve horizon T = {}",
            beta.horizon()
        )));
    }
    Ok(())
}

pub(crate) fn psi1_grid(beta: &ParamFunction, t: f64, n: u32, k: f64, grid: usize) -> Result<f64> {
    check_psi_time(beta, t)?;
    let kinks = kappa_kinks(beta, k, t);
    let g = psi1_integrand(beta, k);
    let m = search::certified_max(&g, 0.0, t, grid, &kinks, runmax_tol(t));
    Ok(n as f64 / (2.0 * t) * m.value)
}

pub(crate) fn psi1_unchecked(beta: &ParamFunction, t: f64, n: u32, k: f64) -> Result<f64> {
    psi1_grid(beta, t, n, k, RUNMAX_GRID)
}

/// ψ₁(t): requires an admissible curve (or the k = 0 unit limit).
pub fn psi1(beta: &ParamFunction, t: f64, n: u32, k: f64) -> Result<f64> {
    require_admissible(beta, k)?;
    psi1_unchecked(beta, t, n, k)
}

/// σ(t) and λ(t) with their certified arg-extrema.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SigmaLambda {
    pub sigma: f64,
    pub lambda: f64,
    pub sigma_arg: f64,
    pub lambda_arg: f64,
}

pub(crate) fn sigma_lambda_grid(
    beta: &ParamFunction,
    t: f64,
    k: f64,
    grid: usize,
) -> Result<SigmaLambda> {
    check_psi_time(beta, t)?;
    let kinks = kappa_kinks(beta, k, t);
    let s_int = sigma_integrand(beta, k);
    let smax = search::certified_max(&s_int, 0.0, t, grid, &kinks, runmax_tol(t));
    let lmin = search::certified_min(
        &|s| beta.value(s),
        0.0,
        t,
        grid,
        &beta.breakpoints(),
        runmax_tol(t),
    );
    Ok(SigmaLambda {
        sigma: smax.value.max(0.0),
        lambda: lmin.value,
        sigma_arg: smax.arg,
        lambda_arg: lmin.arg,
    })
}

pub(crate) fn sigma_lambda_unchecked(beta: &ParamFunction, t: f64, k: f64) -> Result<SigmaLambda> {
    sigma_lambda_grid(beta, t, k, RUNMAX_GRID)
}

pub fn sigma_lambda(beta: &ParamFunction, t: f64, k: f64) -> Result<SigmaLambda> {
    require_admissible(beta, k)?;
    sigma_lambda_unchecked(beta, t, k)
}

pub(crate) fn psi2_grid(beta: &ParamFunction, t: f64, n: u32, k: f64, grid: usize) -> Result<f64> {
    let sl = sigma_lambda_grid(beta, t, k, grid)?;
    let nf = n as f64;
    // σ = 2 exactly takes the σ ≥ 2 branch; the two formulas agree there.
    Ok(if sl.sigma < 2.0 {
        nf / (2.0 * sl.lambda * t)
    } else {
        nf * sl.sigma * sl.sigma / (8.0 * (sl.sigma - 1.0) * sl.lambda * t)
    })
}

pub(crate) fn psi2_unchecked(beta: &ParamFunction, t: f64, n: u32, k: f64) -> Result<f64> {
    psi2_grid(beta, t, n, k, RUNMAX_GRID)
}

/// ψ₂(t): the σ/λ-based estimate.
pub fn psi2(beta: &ParamFunction, t: f64, n: u32, k: f64) -> Result<f64> {
    require_admissible(beta, k)?;
    psi2_unchecked(beta, t, n, k)
}

// ---------------------------------------------------------------------------
// Classical evaluation entry points
// ---------------------------------------------------------------------------

/// Evaluate a classical catalog estimate at (t, n, k), returning the
/// normalized β-form pair (β(t), B(t)).
pub fn eval_classical(id: EstimateId, params: &[f64], t: f64, n: u32, k: f64) -> Result<(f64, f64)> {
    Estimate::classical(id, params)?.eval(t, n, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMode {
    /// Closed forms for the built-in weight families, quadrature otherwise.
    Auto,
    ClosedForm,
    Quadrature,
}

fn qian_general_unchecked(
    w: &WeightFunction,
    t: f64,
    n: u32,
    k: f64,
    mode: QuadratureMode,
) -> Result<(f64, f64)> {
    check_time(t)?;
    let a_t = w.value(t);
    if !(a_t > 0.0) {
        return Err(Error::Domain(format!("weight vanishes at t = {t}")));
    }
    let (int_a, int_chi) = match mode {
        QuadratureMode::Quadrature => {
            let int_a = quad::integrate(&|s| w.value(s), 0.0, t, 1e-12)?;
            let chi = |s: f64| {
                let a = w.value(s);
                let ap = w.deriv(s);
                ap * ap / a
            };
            let int_chi = quad::integrate_to_zero(&chi, t, 1e-11)?;
            (int_a, int_chi)
        }
        QuadratureMode::ClosedForm | QuadratureMode::Auto => {
            let int_a = w.integral(t)?;
            match w.chi_integral(t)? {
                Some(int_chi) => (int_a, int_chi),
                None if mode == QuadratureMode::Auto => {
                    let chi = |s: f64| {
                        let a = w.value(s);
                        let ap = w.deriv(s);
                        ap * ap / a
                    };
                    (int_a, quad::integrate_to_zero(&chi, t, 1e-11)?)
                }
                None => {
                    return Err(Error::Numerical(
                        "no closed form for the a'^2/a integral of this weight".into(),
                    ))
                }
            }
        }
    };
    let nf = n as f64;
    let alpha = 1.0 + 2.0 * k * int_a / a_t;
    let c = nf * k / 2.0 + nf * k * k / (2.0 * a_t) * int_a + nf / (8.0 * a_t) * int_chi;
    Ok((1.0 / alpha, c / alpha))
}

/// The quadrature-form estimate: coefficient 1 + (2k/a(t))∫₀ᵗa and bound
/// nk/2 + (nk²/2a)∫₀ᵗa + (n/8a)∫₀ᵗa′²/a, normalized to β-form.
/// Requires a weight satisfying (A1)-(A3).
pub fn eval_qian_general(
    w: &WeightFunction,
    t: f64,
    n: u32,
    k: f64,
    mode: QuadratureMode,
) -> Result<(f64, f64)> {
    let cert = validate_weight(w);
    if !cert.feasible() {
        return Err(Error::Domain(format!(
            "weight fails (A1)-(A3): a1={} a2={} a3={}",
            cert.a1_ok, cert.a2_ok, cert.a3_ok
        )));
    }
    qian_general_unchecked(w, t, n, k, mode)
}

// ---------------------------------------------------------------------------
// Davies minimizer and the proof-lemma maximum
// ---------------------------------------------------------------------------

/// β_m(t) = 1/(1 + √(kt/2)), the β minimizing the Davies right-hand side at
/// fixed t. Undefined at k = 0 (the minimizer degenerates to β = 1).
pub fn beta_m(t: f64, k: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("beta_m requires t > 0, got {t}")));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(
            "beta_m requires k > 0: at k = 0 the minimizer degenerates to beta = 1".into(),
        ));
    }
    Ok(1.0 / (1.0 + (k * t / 2.0).sqrt()))
}

/// Grid-search check that β_m minimizes the Davies bound over β ∈ (0, 1).
/// Returns (grid argmin, minimum bound value).
pub fn beta_m_grid_check(t: f64, k: f64, n: u32, grid: usize) -> Result<(f64, f64)> {
    if grid < 3 {
        return Err(Error::Domain("grid must have at least 3 points".into()));
    }
    let nf = n as f64;
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 1..grid {
        let beta = i as f64 / grid as f64;
        let b = nf / (2.0 * beta * t) + nf * k / (4.0 * (1.0 - beta));
        if b < best.1 {
            best = (beta, b);
        }
    }
    Ok(best)
}

/// max_{Q ≥ 0} (aQ + 1)/(1 + bQ)² = 1 when a/b < 2, a²/(4(a−b)b) otherwise.
pub fn max_h(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "max_h requires a, b > 0, got a = {a}, b = {b}"
        )));
    }
    Ok(if a / b < 2.0 {
        1.0
    } else {
        a * a / (4.0 * (a - b) * b)
    })
}

// ---------------------------------------------------------------------------
// Envelopes and dominance
// ---------------------------------------------------------------------------

/// A β-parametrized family with a parameter range, for envelope scans.
#[derive(Debug, Clone, Copy)]
pub struct FamilyRange {
    pub id: EstimateId,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnvelopePoint {
    pub x: f64,
    pub value: f64,
    pub param: f64,
}

fn beta_parametrized(id: EstimateId, beta: f64) -> Result<Estimate> {
    match id {
        EstimateId::DaviesBeta => Ok(Estimate::DaviesBeta { beta }),
        EstimateId::Cor12 => Ok(Estimate::Cor12 { beta }),
        EstimateId::Cor14 => Ok(Estimate::Cor14 { beta }),
        EstimateId::Cor15 => Ok(Estimate::Cor15 { beta }),
        other => Err(Error::Domain(format!(
            "'{}' is not a beta-parametrized family",
            other.name()
        ))),
    }
}

/// For each X in `x_grid`, the strongest implied lower bound on f_t:
/// sup over the families (and their β ranges) of β(t)·X − B(t), with the
/// achieving parameter. The supremum over an open range is approached from
/// inside (one-sided witness), never extrapolated past it.
pub fn envelope(
    families: &[FamilyRange],
    t: f64,
    n: u32,
    k: f64,
    x_grid: &[f64],
) -> Result<Vec<EnvelopePoint>> {
    if families.is_empty() {
        return Err(Error::Domain("envelope of an empty family set".into()));
    }
    if x_grid.is_empty() {
        return Err(Error::Domain("envelope needs a nonempty X grid".into()));
    }
    check_time(t)?;

    // Clamp parameter ranges strictly inside (0, 1).
    const EDGE: f64 = 1e-9;
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("X grid must be nonnegative, got {x}")));
        }
        let mut best: Option<EnvelopePoint> = None;
        for fam in families {
            let lo = fam.lo.max(EDGE);
            let hi = fam.hi.min(1.0 - EDGE);
            if !(hi >= lo) {
                return Err(Error::Domain(format!(
                    "empty parameter range for '{}' after clamping to (0,1)",
                    fam.id.name()
                )));
            }
            let objective = |beta: f64| -> f64 {
                let e = match beta_parametrized(fam.id, beta) {
                    Ok(e) => e,
                    Err(_) => return f64::NEG_INFINITY,
                };
                match (e.grad_coeff(t, k), e.bound(t, n, k)) {
                    (Ok(c), Ok(b)) => c * x - b,
                    _ => f64::NEG_INFINITY,
                }
            };
            let m = if hi - lo < 1e-15 {
                search::Extremum {
                    arg: lo,
                    value: objective(lo),
                }
            } else {
                search::certified_max(&objective, lo, hi, 512, &[], 1e-12)
            };
            if best.is_none_or(|b| m.value > b.value) {
                best = Some(EnvelopePoint {
                    x,
                    value: m.value,
                    param: m.arg,
                });
            }
        }
        out.push(best.unwrap());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DominanceVerdict {
    /// B_first ≤ B_second at every sample.
    FirstEverywhereLeq,
    /// B_second ≤ B_first at every sample.
    SecondEverywhereLeq,
    /// Strict advantages in both directions exist.
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DominanceWitness {
    pub t: f64,
    pub beta: Option<f64>,
    pub bound_first: f64,
    pub bound_second: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DominanceReport {
    pub verdict: DominanceVerdict,
    /// A sample where the first bound is strictly smaller, if any.
    pub first_smaller: Option<DominanceWitness>,
    /// A sample where the second bound is strictly smaller, if any.
    pub second_smaller: Option<DominanceWitness>,
    pub samples: usize,
}

/// Compare two estimates over a (t, β) sample grid in the shared β-form.
/// `betas` supplies the shared parameter for β-parametrized families and is
/// ignored (may be empty) when both estimates are parameter-free.
/// The shared parameter samples for a comparison: Some(β) grid when both
/// estimates are β-parametrized, a single None when both are parameter-free.
fn shared_params(first: EstimateId, second: EstimateId, betas: &[f64]) -> Result<Vec<Option<f64>>> {
    let takes_beta = |id: EstimateId| {
        matches!(
            id,
            EstimateId::DaviesBeta | EstimateId::Cor12 | EstimateId::Cor14 | EstimateId::Cor15
        )
    };
    let param_free = |id: EstimateId| {
        matches!(
            id,
            EstimateId::Hamilton | EstimateId::LiXu | EstimateId::LiXuLinear
        )
    };
    if takes_beta(first) && takes_beta(second) {
        if betas.is_empty() {
            return Err(Error::Domain(
                "both estimates take a shared beta parameter; supply a beta grid".into(),
            ));
        }
        Ok(betas.iter().map(|&b| Some(b)).collect())
    } else if param_free(first) && param_free(second) {
        Ok(vec![None])
    } else {
        Err(Error::Domain(format!(
            "'{}' and '{}' do not share a common parametrization",
            first.name(),
            second.name()
        )))
    }
}

pub fn dominates(
    first: EstimateId,
    second: EstimateId,
    n: u32,
    k: f64,
    t_range: (f64, f64),
    nt: usize,
    betas: &[f64],
) -> Result<DominanceReport> {
    let pairs = shared_params(first, second, betas)?;
    let (t_lo, t_hi) = t_range;
    if !(t_lo >= MIN_TIME && t_hi > t_lo) || nt < 2 {
        return Err(Error::Domain("invalid time range for comparison".into()));
    }

    let mut first_smaller = None;
    let mut second_smaller = None;
    let mut samples = 0;
    for i in 0..nt {
        let t = t_lo * (t_hi / t_lo).powf(i as f64 / (nt - 1) as f64);
        for beta in &pairs {
            let make = |id: EstimateId| -> Result<Estimate> {
                match beta {
                    Some(b) => beta_parametrized(id, *b),
                    None => Estimate::classical(id, &[]),
                }
            };
            let e1 = make(first)?;
            let e2 = make(second)?;
            e1.validate(n, k)?;
            e2.validate(n, k)?;
            let b1 = e1.bound(t, n, k)?;
            let b2 = e2.bound(t, n, k)?;
            samples += 1;
            let tol = 1e-12 * b1.abs().max(b2.abs()).max(1.0);
            if b1 < b2 - tol && first_smaller.is_none() {
                first_smaller = Some(DominanceWitness {
                    t,
                    beta: *beta,
                    bound_first: b1,
                    bound_second: b2,
                });
            }
            if b2 < b1 - tol && second_smaller.is_none() {
                second_smaller = Some(DominanceWitness {
                    t,
                    beta: *beta,
                    bound_first: b1,
                    bound_second: b2,
                });
            }
        }
    }

    let verdict = match (first_smaller.is_some(), second_smaller.is_some()) {
        (_, false) => DominanceVerdict::FirstEverywhereLeq,
        (false, true) => DominanceVerdict::SecondEverywhereLeq,
        (true, true) => DominanceVerdict::Crossover,
    };
    Ok(DominanceReport {
        verdict,
        first_smaller,
        second_smaller,
        samples,
    })
}

/// The raw comparison samples behind [`dominates`], one row per (t, β):
/// (t, β-or-NaN, B_first, B_second, B_first − B_second). Feeds CSV dumps.
pub fn comparison_rows(
    first: EstimateId,
    second: EstimateId,
    n: u32,
    k: f64,
    t_range: (f64, f64),
    nt: usize,
    betas: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let params = shared_params(first, second, betas)?;
    let (t_lo, t_hi) = t_range;
    if !(t_lo >= MIN_TIME && t_hi > t_lo) || nt < 2 {
        return Err(Error::Domain("invalid time range for comparison".into()));
    }
    let mut rows = Vec::with_capacity(nt * params.len());
    for i in 0..nt {
        let t = t_lo * (t_hi / t_lo).powf(i as f64 / (nt - 1) as f64);
        for beta in &params {
            let make = |id: EstimateId| -> Result<Estimate> {
                match beta {
                    Some(b) => beta_parametrized(id, *b),
                    None => Estimate::classical(id, &[]),
                }
            };
            let b1 = make(first)?.bound(t, n, k)?;
            let b2 = make(second)?.bound(t, n, k)?;
            rows.push(vec![t, beta.unwrap_or(f64::NAN), b1, b2, b1 - b2]);
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Catalog defaults
// ---------------------------------------------------------------------------

/// One instantiation of every catalog estimate that is valid at (n, k), with
/// conventional default parameters. Used by the verification harness.
pub fn default_catalog(n: u32, k: f64, horizon: f64) -> Result<Vec<Estimate>> {
    let mut out = vec![
        Estimate::LiYau { alpha: 2.0 },
        Estimate::DaviesAlpha { alpha: 2.0 },
        Estimate::DaviesBeta { beta: 0.5 },
        Estimate::Hamilton,
        Estimate::HamiltonTheta { theta: 0.5 },
        Estimate::LiXu,
        Estimate::LiXuLinear,
        Estimate::QianTheta { theta: 2.0 / 3.0 },
        Estimate::QianGeneral {
            weight: if k > 0.0 {
                WeightFunction::sinh_sq(k, horizon)?
            } else {
                WeightFunction::quadratic(horizon)?
            },
        },
        Estimate::Psi1 {
            beta: ParamFunction::exponential(1.0, horizon, k)?,
        },
        Estimate::Psi2 {
            beta: ParamFunction::exponential(1.0, horizon, k)?,
        },
    ];
    if k > 0.0 {
        out.push(Estimate::Cor12 { beta: 0.5 });
        out.push(Estimate::Cor14 { beta: 0.5 });
        out.push(Estimate::Cor15 { beta: 0.5 });
    }
    for e in &out {
        e.validate(n, k)?;
    }
    Ok(out)
}
