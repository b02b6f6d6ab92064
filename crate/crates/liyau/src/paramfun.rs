//! Time-dependent parameter curves β(t) and weight functions a(t).
//!
//! β(t) is the coefficient multiplying ‖∇f‖² in the normalized gradient
//! estimate β(t)‖∇f‖² − f_t ≤ B(t). The built-in families are
//!
//! * constant   β₀
//! * linear     1 − θkt
//! * exponential e^{−2θkt}
//! * rational   1/(1 + θkt)
//! * piecewise linear through arbitrary knots
//!
//! Admissibility for the time-dependent estimates requires
//!
//! * (B1) 0 < β(t) < 1 for every t ∈ (0, T];
//! * (B2) (1 − β(0))² + β′(0)² > 0 and β(0) > 0,
//!
//! so β(0) = 1 is allowed when β′(0) ≠ 0 (the exponential and rational
//! families start there). Weight functions a(t) feed the quadrature-form
//! estimate and must satisfy
//!
//! * (A1) a(t) > 0 and a′(t) > 0 on (0, T];
//! * (A2) a(t) → 0 and a(t)/a′(t) → 0 as t → 0;
//! * (A3) a′²/a integrable near 0.

use crate::error::{Error, Result};
use crate::quad;
use crate::search;

/// Grid density for the (B1)/(A1) scans.
const CERT_GRID: usize = 4096;

/// Required strict margin for the open conditions 0 < β < 1 on the scan grid.
const CERT_MARGIN: f64 = 1e-12;

// ---------------------------------------------------------------------------
// β(t) families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum BetaFamily {
    /// β(t) = β₀
    Constant { beta0: f64 },
    /// β(t) = 1 − θkt
    Linear { theta: f64 },
    /// β(t) = e^{−2θkt}
    Exponential { theta: f64 },
    /// β(t) = 1/(1 + θkt)
    Rational { theta: f64 },
    /// Piecewise-linear through `(t_i, v_i)` with strictly increasing t_i
    /// spanning [0, T]. The derivative at a knot is the right-hand slope.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

/// A parameter curve β(t) on the horizon [0, T], tied to the Ricci constant
/// k that shapes the closed-form families.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFunction {
    family: BetaFamily,
    horizon: f64,
    k: f64,
}

impl ParamFunction {
    pub fn new(family: BetaFamily, horizon: f64, k: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!(
                "horizon T must be positive and finite, got {horizon}"
            )));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!(
                "curvature constant k must be nonnegative and finite, got {k}"
            )));
        }
        match &family {
            BetaFamily::Constant { beta0 } => {
                if !beta0.is_finite() {
                    return Err(Error::Domain("constant beta0 must be finite".into()));
                }
            }
            BetaFamily::Linear { theta }
            | BetaFamily::Exponential { theta }
            | BetaFamily::Rational { theta } => {
                if !theta.is_finite() {
                    return Err(Error::Domain("family parameter theta must be finite".into()));
                }
            }
            BetaFamily::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Domain(
                        "piecewise_linear needs at least two knots".into(),
                    ));
                }
                if knots[0].0 != 0.0 {
                    return Err(Error::Domain(format!(
                        "piecewise_linear knots must start at t = 0, got {}",
                        knots[0].0
                    )));
                }
                let last = knots[knots.len() - 1].0;
                if (last - horizon).abs() > 1e-12 * horizon.max(1.0) {
                    return Err(Error::Domain(format!(
                        "piecewise_linear knots must span [0, T]: last knot {last}, T = {horizon}"
                    )));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::Domain(
                            "piecewise_linear knot abscissae must be strictly increasing".into(),
                        ));
                    }
                }
                if knots.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::Domain("piecewise_linear knots must be finite".into()));
                }
            }
        }
        Ok(ParamFunction { family, horizon, k })
    }

    pub fn constant(beta0: f64, horizon: f64) -> Result<Self> {
        Self::new(BetaFamily::Constant { beta0 }, horizon, 0.0)
    }

    pub fn linear(theta: f64, horizon: f64, k: f64) -> Result<Self> {
        Self::new(BetaFamily::Linear { theta }, horizon, k)
    }

    pub fn exponential(theta: f64, horizon: f64, k: f64) -> Result<Self> {
        Self::new(BetaFamily::Exponential { theta }, horizon, k)
    }

    pub fn rational(theta: f64, horizon: f64, k: f64) -> Result<Self> {
        Self::new(BetaFamily::Rational { theta }, horizon, k)
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>, horizon: f64) -> Result<Self> {
        Self::new(BetaFamily::PiecewiseLinear { knots }, horizon, 0.0)
    }

    /// Build from a config-file spec: family name plus a flat parameter list
    /// (`piecewise_linear` takes `[t0, v0, t1, v1, ...]`).
    pub fn from_spec(name: &str, params: &[f64], horizon: f64, k: f64) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if params.len() != n {
                Err(Error::Config(format!(
                    "beta family '{name}' expects {n} parameter(s), got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        match name {
            "constant" => {
                need(1)?;
                Self::new(BetaFamily::Constant { beta0: params[0] }, horizon, k)
            }
            "linear" => {
                need(1)?;
                Self::new(BetaFamily::Linear { theta: params[0] }, horizon, k)
            }
            "exponential" => {
                need(1)?;
                Self::new(BetaFamily::Exponential { theta: params[0] }, horizon, k)
            }
            "rational" => {
                need(1)?;
                Self::new(BetaFamily::Rational { theta: params[0] }, horizon, k)
            }
            "piecewise_linear" => {
                if params.len() < 4 || !params.len().is_multiple_of(2) {
                    return Err(Error::Config(
                        "piecewise_linear expects a flat even-length knot list [t0, v0, t1, v1, ...]"
                            .into(),
                    ));
                }
                let knots = params.chunks(2).map(|c| (c[0], c[1])).collect();
                Self::new(BetaFamily::PiecewiseLinear { knots }, horizon, k)
            }
            other => Err(Error::Config(format!("unknown beta family '{other}'"))),
        }
    }

    pub fn family(&self) -> &BetaFamily {
        &self.family
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    /// Family name and flat parameter list (inverse of [`Self::from_spec`]).
    pub fn descriptor(&self) -> (&'static str, Vec<f64>) {
        match &self.family {
            BetaFamily::Constant { beta0 } => ("constant", vec![*beta0]),
            BetaFamily::Linear { theta } => ("linear", vec![*theta]),
            BetaFamily::Exponential { theta } => ("exponential", vec![*theta]),
            BetaFamily::Rational { theta } => ("rational", vec![*theta]),
            BetaFamily::PiecewiseLinear { knots } => (
                "piecewise_linear",
                knots.iter().flat_map(|&(t, v)| [t, v]).collect(),
            ),
        }
    }

    /// (β(t), β′(t)) with domain checking. Deterministic closed forms.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0 && t <= self.horizon * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "t = {t} outside the parameter curve domain [0, {}]",
                self.horizon
            )));
        }
        Ok((self.value(t), self.deriv(t)))
    }

    /// β(t) without domain checks (hot path for grid scans).
    pub fn value(&self, t: f64) -> f64 {
        match &self.family {
            BetaFamily::Constant { beta0 } => *beta0,
            BetaFamily::Linear { theta } => 1.0 - theta * self.k * t,
            BetaFamily::Exponential { theta } => (-2.0 * theta * self.k * t).exp(),
            BetaFamily::Rational { theta } => 1.0 / (1.0 + theta * self.k * t),
            BetaFamily::PiecewiseLinear { knots } => {
                let (i, j) = self.segment(t, knots);
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[j];
                if t1 == t0 {
                    v0
                } else {
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    /// β′(t) without domain checks. Piecewise-linear uses the right-hand
    /// slope at knots (left-hand at T).
    pub fn deriv(&self, t: f64) -> f64 {
        match &self.family {
            BetaFamily::Constant { .. } => 0.0,
            BetaFamily::Linear { theta } => -theta * self.k,
            BetaFamily::Exponential { theta } => {
                -2.0 * theta * self.k * (-2.0 * theta * self.k * t).exp()
            }
            BetaFamily::Rational { theta } => {
                let d = 1.0 + theta * self.k * t;
                -theta * self.k / (d * d)
            }
            BetaFamily::PiecewiseLinear { knots } => {
                let (i, j) = self.segment(t, knots);
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[j];
                (v1 - v0) / (t1 - t0)
            }
        }
    }

    /// Segment indices (i, i+1) whose half-open interval [t_i, t_{i+1})
    /// contains t; the last segment is closed at T.
    fn segment(&self, t: f64, knots: &[(f64, f64)]) -> (usize, usize) {
        let n = knots.len();
        if t >= knots[n - 2].0 {
            return (n - 2, n - 1);
        }
        // Binary search for the rightmost knot with abscissa <= t.
        let mut lo = 0;
        let mut hi = n - 2;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if knots[mid].0 <= t {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        (lo, lo + 1)
    }

    /// 1 − β(t) without the catastrophic cancellation of computing
    /// `1.0 - value(t)` near β = 1. The ψ₁ and σ integrands divide by this
    /// quantity as t → 0 where β(0) = 1, so a naively cancelled value would
    /// feed amplified rounding noise into the running maxima.
    pub fn one_minus_value(&self, t: f64) -> f64 {
        match &self.family {
            BetaFamily::Constant { beta0 } => 1.0 - beta0,
            BetaFamily::Linear { theta } => theta * self.k * t,
            BetaFamily::Exponential { theta } => -(-2.0 * theta * self.k * t).exp_m1(),
            BetaFamily::Rational { theta } => {
                let x = theta * self.k * t;
                x / (1.0 + x)
            }
            BetaFamily::PiecewiseLinear { knots } => {
                let (i, j) = self.segment(t, knots);
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[j];
                let om0 = 1.0 - v0;
                let om1 = 1.0 - v1;
                if t1 == t0 {
                    om0
                } else {
                    om0 + (om1 - om0) * (t - t0) / (t1 - t0)
                }
            }
        }
    }

    /// Abscissae where β′ may jump (piecewise-linear knots); empty for the
    /// smooth families.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            BetaFamily::PiecewiseLinear { knots } => knots.iter().map(|&(t, _)| t).collect(),
            _ => Vec::new(),
        }
    }

    /// True when the curve degenerates to β ≡ 1 with β′ ≡ 0 — what the
    /// closed-form families become at θk = 0. Such a curve fails (B2), but
    /// together with k = 0 it is the continuous limit of admissible curves
    /// and evaluates to the sharp bound n/(2t); the ψ evaluators accept it
    /// in exactly that case.
    pub fn is_unit_limit(&self) -> bool {
        match &self.family {
            BetaFamily::Constant { beta0 } => *beta0 == 1.0,
            BetaFamily::Linear { theta }
            | BetaFamily::Exponential { theta }
            | BetaFamily::Rational { theta } => theta * self.k == 0.0,
            BetaFamily::PiecewiseLinear { knots } => knots.iter().all(|&(_, v)| v == 1.0),
        }
    }
}

// ---------------------------------------------------------------------------
// (B1)/(B2) certification
// ---------------------------------------------------------------------------

/// Feasibility certificate for a β curve against conditions (B1)/(B2).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BetaCertificate {
    /// 0 < β < 1 held with margin ≥ 1e-12 on the scan grid over (0, T]
    /// (refined around the grid extrema).
    pub b1_ok: bool,
    /// (1 − β(0))² + β′(0)² > 0 and β(0) > 0.
    pub b2_ok: bool,
    /// Smallest observed min(β, 1 − β) over the scan.
    pub min_margin: f64,
    /// Sample abscissae violating (B1), capped at 16 entries.
    pub violations: Vec<f64>,
    /// β ≡ 1 with β′ ≡ 0 (see [`ParamFunction::is_unit_limit`]).
    pub degenerate_unit: bool,
}

impl BetaCertificate {
    pub fn feasible(&self) -> bool {
        self.b1_ok && self.b2_ok
    }
}

/// Check (B1) on a dense grid of (0, T] with golden-section refinement
/// around the grid extrema of β, and (B2) at t = 0.
pub fn validate_beta(f: &ParamFunction) -> BetaCertificate {
    let horizon = f.horizon();
    let n = CERT_GRID;
    let grid_t = |i: usize| horizon * (i as f64) / (n as f64);
    let mut min_beta = f64::INFINITY;
    let mut max_beta = f64::NEG_INFINITY;
    let (mut argmin, mut argmax) = (1usize, 1usize);
    let mut violations = Vec::new();

    for i in 1..=n {
        let t = grid_t(i);
        let b = f.value(t);
        if b < min_beta {
            min_beta = b;
            argmin = i;
        }
        if b > max_beta {
            max_beta = b;
            argmax = i;
        }
        if !(b > CERT_MARGIN && b < 1.0 - CERT_MARGIN) && violations.len() < 16 {
            violations.push(t);
        }
    }

    // Refine around the grid extrema: an interior minimum or maximum of β
    // can dip past what the grid sees.
    let value = |t: f64| f.value(t);
    let bracket = |i: usize| (grid_t(i.saturating_sub(1).max(1)), grid_t((i + 1).min(n)));
    let (lo, hi) = bracket(argmin);
    let refined_min = search::golden_min(&value, lo, hi, 1e-12 * horizon)
        .value
        .min(min_beta);
    let (lo, hi) = bracket(argmax);
    let refined_max = search::golden_max(&value, lo, hi, 1e-12 * horizon)
        .value
        .max(max_beta);

    let min_margin = refined_min.min(1.0 - refined_max);
    let b1_ok = min_margin >= CERT_MARGIN && violations.is_empty();

    let b0 = f.value(0.0);
    let d0 = f.deriv(0.0);
    let b2_ok = ((1.0 - b0).powi(2) + d0 * d0) > 0.0 && b0 > 0.0;

    BetaCertificate {
        b1_ok,
        b2_ok,
        min_margin,
        violations,
        degenerate_unit: f.is_unit_limit(),
    }
}

// ---------------------------------------------------------------------------
// Weight functions a(t)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// a(t) = sinh²(rate·t)
    SinhSq { rate: f64 },
    /// a(t) = t²
    Quadratic,
    /// a(t) = t^{2/θ − 1}
    PowerTheta { theta: f64 },
    /// Linear interpolation through `(t_i, a_i)`, 0 < t_1 < ... < t_m = T.
    /// Below the first knot the curve continues as a_1·(t/t_1)², the mildest
    /// extension compatible with (A1)-(A3); a piecewise-linear continuation
    /// through the origin would make a'²/a non-integrable.
    Tabulated { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    family: WeightFamily,
    horizon: f64,
}

impl WeightFunction {
    pub fn new(family: WeightFamily, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!(
                "horizon T must be positive and finite, got {horizon}"
            )));
        }
        match &family {
            WeightFamily::SinhSq { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::Domain(format!(
                        "sinh_sq rate must be positive, got {rate}"
                    )));
                }
            }
            WeightFamily::Quadratic => {}
            WeightFamily::PowerTheta { theta } => {
                if !(theta.is_finite() && *theta > 0.0) {
                    return Err(Error::Domain(format!(
                        "power_theta requires theta > 0, got {theta}"
                    )));
                }
            }
            WeightFamily::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Domain("tabulated needs at least two knots".into()));
                }
                if !(knots[0].0 > 0.0) {
                    return Err(Error::Domain(
                        "tabulated knot abscissae must be strictly positive".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::Domain(
                            "tabulated knot abscissae must be strictly increasing".into(),
                        ));
                    }
                }
                let last = knots[knots.len() - 1].0;
                if (last - horizon).abs() > 1e-12 * horizon.max(1.0) {
                    return Err(Error::Domain(format!(
                        "tabulated knots must reach T: last knot {last}, T = {horizon}"
                    )));
                }
                if knots.iter().any(|&(_, a)| !(a.is_finite() && a > 0.0)) {
                    return Err(Error::Domain("tabulated values must be positive".into()));
                }
            }
        }
        Ok(WeightFunction { family, horizon })
    }

    pub fn sinh_sq(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(WeightFamily::SinhSq { rate }, horizon)
    }

    pub fn quadratic(horizon: f64) -> Result<Self> {
        Self::new(WeightFamily::Quadratic, horizon)
    }

    pub fn power_theta(theta: f64, horizon: f64) -> Result<Self> {
        Self::new(WeightFamily::PowerTheta { theta }, horizon)
    }

    pub fn tabulated(knots: Vec<(f64, f64)>, horizon: f64) -> Result<Self> {
        Self::new(WeightFamily::Tabulated { knots }, horizon)
    }

    pub fn from_spec(name: &str, params: &[f64], horizon: f64) -> Result<Self> {
        match name {
            "sinh_sq" => {
                if params.len() != 1 {
                    return Err(Error::Config("sinh_sq expects one parameter (rate)".into()));
                }
                Self::sinh_sq(params[0], horizon)
            }
            "quadratic" => {
                if !params.is_empty() {
                    return Err(Error::Config("quadratic takes no parameters".into()));
                }
                Self::quadratic(horizon)
            }
            "power_theta" => {
                if params.len() != 1 {
                    return Err(Error::Config(
                        "power_theta expects one parameter (theta)".into(),
                    ));
                }
                Self::power_theta(params[0], horizon)
            }
            "tabulated" => {
                if params.len() < 4 || !params.len().is_multiple_of(2) {
                    return Err(Error::Config(
                        "tabulated expects a flat even-length knot list [t1, a1, t2, a2, ...]"
                            .into(),
                    ));
                }
                let knots = params.chunks(2).map(|c| (c[0], c[1])).collect();
                Self::tabulated(knots, horizon)
            }
            other => Err(Error::Config(format!("unknown weight family '{other}'"))),
        }
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn descriptor(&self) -> (&'static str, Vec<f64>) {
        match &self.family {
            WeightFamily::SinhSq { rate } => ("sinh_sq", vec![*rate]),
            WeightFamily::Quadratic => ("quadratic", Vec::new()),
            WeightFamily::PowerTheta { theta } => ("power_theta", vec![*theta]),
            WeightFamily::Tabulated { knots } => (
                "tabulated",
                knots.iter().flat_map(|&(t, a)| [t, a]).collect(),
            ),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.family {
            WeightFamily::SinhSq { rate } => {
                let s = (rate * t).sinh();
                s * s
            }
            WeightFamily::Quadratic => t * t,
            WeightFamily::PowerTheta { theta } => t.powf(2.0 / theta - 1.0),
            WeightFamily::Tabulated { knots } => {
                let (t1, a1) = knots[0];
                if t < t1 {
                    a1 * (t / t1) * (t / t1)
                } else {
                    let (i, j) = self.weight_segment(t, knots);
                    let (ta, va) = knots[i];
                    let (tb, vb) = knots[j];
                    va + (vb - va) * (t - ta) / (tb - ta)
                }
            }
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &self.family {
            WeightFamily::SinhSq { rate } => rate * (2.0 * rate * t).sinh(),
            WeightFamily::Quadratic => 2.0 * t,
            WeightFamily::PowerTheta { theta } => {
                let p = 2.0 / theta - 1.0;
                p * t.powf(p - 1.0)
            }
            WeightFamily::Tabulated { knots } => {
                let (t1, a1) = knots[0];
                if t < t1 {
                    2.0 * a1 * t / (t1 * t1)
                } else {
                    let (i, j) = self.weight_segment(t, knots);
                    let (ta, va) = knots[i];
                    let (tb, vb) = knots[j];
                    (vb - va) / (tb - ta)
                }
            }
        }
    }

    fn weight_segment(&self, t: f64, knots: &[(f64, f64)]) -> (usize, usize) {
        let n = knots.len();
        if t >= knots[n - 2].0 {
            return (n - 2, n - 1);
        }
        let mut lo = 0;
        let mut hi = n - 2;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if knots[mid].0 <= t {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        (lo, lo + 1)
    }

    /// Closed-form ∫₀ᵗ a(s) ds.
    pub fn integral(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.horizon * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "t = {t} outside the weight domain [0, {}]",
                self.horizon
            )));
        }
        Ok(match &self.family {
            WeightFamily::SinhSq { rate } => sinh_cosh_minus_x(rate * t) / (2.0 * rate),
            WeightFamily::Quadratic => t * t * t / 3.0,
            WeightFamily::PowerTheta { theta } => {
                let p = 2.0 / theta - 1.0;
                t.powf(p + 1.0) / (p + 1.0)
            }
            WeightFamily::Tabulated { knots } => {
                let (t1, a1) = knots[0];
                if t <= t1 {
                    return Ok(a1 * t * t * t / (3.0 * t1 * t1));
                }
                let mut acc = a1 * t1 / 3.0;
                let mut prev = knots[0];
                for &(tb, vb) in &knots[1..] {
                    let (ta, va) = prev;
                    if t <= tb {
                        let vt = va + (vb - va) * (t - ta) / (tb - ta);
                        acc += 0.5 * (va + vt) * (t - ta);
                        return Ok(acc);
                    }
                    acc += 0.5 * (va + vb) * (tb - ta);
                    prev = (tb, vb);
                }
                acc
            }
        })
    }

    /// Closed-form ∫₀ᵗ a′²(s)/a(s) ds, or None when no finite closed form
    /// exists (power_theta with exponent ≤ 1 diverges).
    pub fn chi_integral(&self, t: f64) -> Result<Option<f64>> {
        if !(t >= 0.0 && t <= self.horizon * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "t = {t} outside the weight domain [0, {}]",
                self.horizon
            )));
        }
        Ok(match &self.family {
            // a'²/a = 4k²cosh²(kt), integral 2k·sinh(kt)cosh(kt) + 2k²t
            WeightFamily::SinhSq { rate } => {
                let x = rate * t;
                Some(2.0 * rate * (sinh_cosh_minus_x(x) + x) + 2.0 * rate * rate * t)
            }
            WeightFamily::Quadratic => Some(4.0 * t),
            WeightFamily::PowerTheta { theta } => {
                let p = 2.0 / theta - 1.0;
                if p <= 1.0 {
                    None
                } else {
                    Some(p * p * t.powf(p - 1.0) / (p - 1.0))
                }
            }
            WeightFamily::Tabulated { knots } => {
                let (t1, a1) = knots[0];
                let head = 4.0 * a1 / (t1 * t1);
                if t <= t1 {
                    return Ok(Some(head * t));
                }
                let mut acc = head * t1;
                let mut prev = knots[0];
                for &(tb, vb) in &knots[1..] {
                    let (ta, va) = prev;
                    let slope = (vb - va) / (tb - ta);
                    if slope != 0.0 {
                        // ∫ slope²/(va + slope(s - ta)) ds = slope·ln(a_hi/a_lo)
                        let a_hi = va + slope * (t.min(tb) - ta);
                        acc += slope * (a_hi / va).ln();
                    }
                    if t <= tb {
                        return Ok(Some(acc));
                    }
                    prev = (tb, vb);
                }
                Some(acc)
            }
        })
    }
}

/// sinh(x)cosh(x) − x, series-protected against cancellation near 0.
fn sinh_cosh_minus_x(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        x * x2 * (2.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * (4.0 / 315.0)))
    } else {
        x.sinh() * x.cosh() - x
    }
}

// ---------------------------------------------------------------------------
// (A1)-(A3) certification
// ---------------------------------------------------------------------------

/// Feasibility certificate for a weight function against (A1)-(A3).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WeightCertificate {
    pub a1_ok: bool,
    pub a2_ok: bool,
    pub a3_ok: bool,
    /// Converged value of ∫₀ᵀ a′²/a when (A3) holds.
    pub a3_integral: Option<f64>,
}

impl WeightCertificate {
    pub fn feasible(&self) -> bool {
        self.a1_ok && self.a2_ok && self.a3_ok
    }
}

/// Numerically certify (A1) on a dense grid, (A2) by geometric limit
/// sampling at t = T·2^{-j} (40 levels, Cauchy criterion 1e-9) and (A3) by
/// convergence of the endpoint-singular integral of a′²/a.
pub fn validate_weight(w: &WeightFunction) -> WeightCertificate {
    let horizon = w.horizon();
    let n = CERT_GRID;
    let mut a1_ok = true;
    let mut scale = 0.0_f64;
    for i in 1..=n {
        let t = horizon * (i as f64) / (n as f64);
        let a = w.value(t);
        let ap = w.deriv(t);
        scale = scale.max(a.abs());
        if !(a > 0.0 && ap > 0.0 && a.is_finite() && ap.is_finite()) {
            a1_ok = false;
        }
    }
    let scale = scale.max(1.0);

    // (A2): both a and a/a' must converge to 0 along t_j = T·2^{-j}.
    let mut a2_ok = true;
    for limit in [
        &(|t: f64| w.value(t)) as &dyn Fn(f64) -> f64,
        &(|t: f64| {
            let ap = w.deriv(t);
            if ap == 0.0 {
                f64::INFINITY
            } else {
                w.value(t) / ap
            }
        }),
    ] {
        let mut t = horizon;
        let mut last = limit(t);
        let mut cauchy = false;
        for _ in 0..40 {
            t *= 0.5;
            let v = limit(t);
            cauchy = (v - last).abs() <= 1e-9 * scale && v.abs() <= 1e-9 * scale;
            last = v;
        }
        if !(cauchy && last.is_finite()) {
            a2_ok = false;
        }
    }

    // (A3): dyadic refinement of ∫ a'²/a toward 0 with tail extrapolation.
    let chi = |s: f64| {
        let a = w.value(s);
        let ap = w.deriv(s);
        if a <= 0.0 {
            f64::INFINITY
        } else {
            ap * ap / a
        }
    };
    let (a3_ok, a3_integral) = match quad::integrate_to_zero(&chi, horizon, 1e-9) {
        Ok(v) if v.is_finite() => (true, Some(v)),
        _ => (false, None),
    };

    WeightCertificate {
        a1_ok,
        a2_ok,
        a3_ok,
        a3_integral,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_eval() {
        let f = ParamFunction::constant(0.5, 10.0).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), (0.5, 0.0));
    }

    #[test]
    fn exponential_at_origin() {
        let f = ParamFunction::exponential(1.0, 10.0, 1.0).unwrap();
        let (v, d) = f.eval(0.0).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(d, -2.0);
    }

    #[test]
    fn rational_hand_differentiated() {
        // beta = 1/(1+2t): beta(1) = 1/3, beta'(1) = -2/9, cross-checked by
        // a central finite difference.
        let f = ParamFunction::rational(2.0, 10.0, 1.0).unwrap();
        let (v, d) = f.eval(1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!((d + 2.0 / 9.0).abs() < 1e-15);
        let h = 1e-6;
        let fd = (f.value(1.0 + h) - f.value(1.0 - h)) / (2.0 * h);
        assert!((d - fd).abs() < 1e-9, "deriv {d} vs fd {fd}");
    }

    #[test]
    fn eval_outside_domain_is_rejected() {
        let f = ParamFunction::constant(0.5, 1.0).unwrap();
        assert!(f.eval(2.0).is_err());
        assert!(f.eval(-0.1).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference_across_families() {
        // 1000 deterministic samples over all built-in families.
        let mut lcg: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((lcg >> 11) as f64) / ((1u64 << 53) as f64)
        };
        for i in 0..1000 {
            let theta = 0.05 + 1.5 * next();
            let k = 0.05 + 2.0 * next();
            let horizon = 0.5 + 4.0 * next();
            let f = match i % 4 {
                0 => ParamFunction::constant(0.2 + 0.6 * next(), horizon).unwrap(),
                1 => ParamFunction::linear(theta, horizon, k).unwrap(),
                2 => ParamFunction::exponential(theta, horizon, k).unwrap(),
                _ => ParamFunction::rational(theta, horizon, k).unwrap(),
            };
            let t = horizon * (0.1 + 0.8 * next());
            let h = 1e-6 * horizon.max(1.0);
            let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
            let d = f.deriv(t);
            assert!(
                (d - fd).abs() <= 1e-6 * (1.0 + d.abs()),
                "family {:?}: deriv {d} vs fd {fd} at t = {t}",
                f.descriptor().0
            );
        }
    }

    #[test]
    fn piecewise_linear_interpolation_and_right_slope() {
        let f =
            ParamFunction::piecewise_linear(vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.8)], 2.0).unwrap();
        assert!((f.value(0.5) - 0.75).abs() < 1e-15);
        assert!((f.deriv(1.0) - 0.3).abs() < 1e-15); // right-hand slope at the knot
        assert!((f.deriv(2.0) - 0.3).abs() < 1e-15); // left segment at T
        assert!((f.value(1.5) - 0.65).abs() < 1e-15);
    }

    #[test]
    fn piecewise_linear_bad_knots_rejected() {
        assert!(ParamFunction::piecewise_linear(vec![(0.0, 1.0), (0.0, 0.5)], 1.0).is_err());
        assert!(ParamFunction::piecewise_linear(vec![(0.0, 1.0), (0.5, 0.5)], 1.0).is_err());
        assert!(ParamFunction::piecewise_linear(vec![(0.1, 1.0), (1.0, 0.5)], 1.0).is_err());
    }

    #[test]
    fn validate_constant_iff_inside_unit_interval() {
        for beta0 in [0.01, 0.5, 0.99] {
            let f = ParamFunction::constant(beta0, 10.0).unwrap();
            assert!(validate_beta(&f).feasible(), "beta0 = {beta0}");
        }
        for beta0 in [-0.2, 0.0, 1.0, 1.3] {
            let f = ParamFunction::constant(beta0, 10.0).unwrap();
            assert!(!validate_beta(&f).feasible(), "beta0 = {beta0}");
        }
    }

    #[test]
    fn validate_linear_iff_theta_k_t_below_one() {
        let ok = ParamFunction::linear(0.09, 10.0, 1.0).unwrap();
        assert!(validate_beta(&ok).feasible());
        // theta*k*T = 2 >= 1: beta crosses zero at t = 1/(theta k) = 5.
        let bad = ParamFunction::linear(0.2, 10.0, 1.0).unwrap();
        let cert = validate_beta(&bad);
        assert!(!cert.feasible());
        assert!(
            cert.violations.iter().any(|&t| t >= 5.0 - 0.01),
            "violations {:?}",
            cert.violations
        );
    }

    #[test]
    fn validate_exponential_with_unit_start() {
        // beta(0) = 1 is admissible because beta'(0) = -2 != 0.
        let f = ParamFunction::exponential(1.0, 10.0, 1.0).unwrap();
        let cert = validate_beta(&f);
        assert!(cert.feasible(), "cert {cert:?}");
    }

    #[test]
    fn degenerate_unit_limit_detected() {
        let f = ParamFunction::exponential(1.0, 10.0, 0.0).unwrap();
        let cert = validate_beta(&f);
        assert!(!cert.feasible());
        assert!(cert.degenerate_unit);
    }

    #[test]
    fn weight_sinh_sq_feasible() {
        let w = WeightFunction::sinh_sq(1.0, 5.0).unwrap();
        let cert = validate_weight(&w);
        assert!(cert.feasible(), "cert {cert:?}");
    }

    #[test]
    fn weight_quadratic_chi_integral_is_4t() {
        let w = WeightFunction::quadratic(3.0).unwrap();
        let cert = validate_weight(&w);
        assert!(cert.feasible());
        let integral = cert.a3_integral.unwrap();
        assert!(
            (integral - 12.0).abs() < 1e-8 * 12.0,
            "integral {integral}, want 12"
        );
        assert_eq!(w.chi_integral(3.0).unwrap(), Some(12.0));
    }

    #[test]
    fn weight_power_theta_feasible_below_one() {
        // theta near 1 decays so slowly per dyadic level that only the
        // geometric tail extrapolation reaches the Cauchy criterion.
        for theta in [0.2, 0.4, 0.6, 0.7, 0.9, 0.95] {
            let w = WeightFunction::power_theta(theta, 2.0).unwrap();
            let cert = validate_weight(&w);
            assert!(cert.feasible(), "theta = {theta}: {cert:?}");
            let p: f64 = 2.0 / theta - 1.0;
            let exact = p * p * 2.0_f64.powf(p - 1.0) / (p - 1.0);
            let got = cert.a3_integral.unwrap();
            assert!(
                ((got - exact) / exact).abs() < 1e-8,
                "theta = {theta}: quadrature {got} vs closed form {exact}"
            );
        }
    }

    #[test]
    fn weight_power_theta_infeasible_at_two_and_above() {
        for theta in [2.0, 3.0] {
            let w = WeightFunction::power_theta(theta, 2.0).unwrap();
            let cert = validate_weight(&w);
            assert!(!cert.a2_ok, "theta = {theta}: a2 should fail, got {cert:?}");
            assert!(!cert.feasible());
        }
        // theta = 1 keeps (A2) but loses integrability of a'²/a = 1/t.
        let w = WeightFunction::power_theta(1.0, 2.0).unwrap();
        let cert = validate_weight(&w);
        assert!(!cert.a3_ok, "cert {cert:?}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_family() -> impl Strategy<Value = ParamFunction> {
            let horizon = 0.5..8.0f64;
            let k = 0.05..3.0f64;
            let theta = 0.05..2.0f64;
            prop_oneof![
                (0.01..0.99f64, horizon.clone())
                    .prop_map(|(b, h)| ParamFunction::constant(b, h).unwrap()),
                (theta.clone(), horizon.clone(), k.clone())
                    .prop_map(|(th, h, k)| ParamFunction::linear(th, h, k).unwrap()),
                (theta.clone(), horizon.clone(), k.clone())
                    .prop_map(|(th, h, k)| ParamFunction::exponential(th, h, k).unwrap()),
                (theta, horizon, k)
                    .prop_map(|(th, h, k)| ParamFunction::rational(th, h, k).unwrap()),
            ]
        }

        proptest! {
            // Closed-form derivatives agree with central differences.
            #[test]
            fn derivative_consistent(f in arb_family(), frac in 0.05..0.95f64) {
                let t = f.horizon() * frac;
                let h = 1e-6 * f.horizon().max(1.0);
                let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
                let d = f.deriv(t);
                prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + d.abs()));
            }

            // one_minus_value is the cancellation-safe twin of 1 - value.
            #[test]
            fn one_minus_consistent(f in arb_family(), frac in 0.0..1.0f64) {
                let t = f.horizon() * frac;
                let om = f.one_minus_value(t);
                prop_assert!((om - (1.0 - f.value(t))).abs() <= 1e-12 * (1.0 + om.abs()));
            }

            // Descriptor round-trips through from_spec.
            #[test]
            fn descriptor_round_trips(f in arb_family(), frac in 0.0..1.0f64) {
                let (name, params) = f.descriptor();
                let g = ParamFunction::from_spec(name, &params, f.horizon(), f.curvature()).unwrap();
                let t = f.horizon() * frac;
                prop_assert_eq!(f.value(t).to_bits(), g.value(t).to_bits());
                prop_assert_eq!(f.deriv(t).to_bits(), g.deriv(t).to_bits());
            }
        }
    }

    #[test]
    fn tabulated_weight_closed_forms_match_quadrature() {
        let knots = vec![(0.5, 0.25), (1.0, 1.0), (2.0, 4.2)];
        let w = WeightFunction::tabulated(knots, 2.0).unwrap();
        assert!(validate_weight(&w).feasible());
        let i_exact = w.integral(2.0).unwrap();
        let i_quad = quad::integrate(&|s| w.value(s), 0.0, 2.0, 1e-12).unwrap();
        assert!(
            (i_exact - i_quad).abs() < 1e-9 * i_exact,
            "{i_exact} vs {i_quad}"
        );
        let chi_exact = w.chi_integral(2.0).unwrap().unwrap();
        let chi_quad = quad::integrate_to_zero(
            &|s| {
                let a = w.value(s);
                w.deriv(s).powi(2) / a
            },
            2.0,
            1e-11,
        )
        .unwrap();
        assert!(
            (chi_exact - chi_quad).abs() < 1e-7 * chi_exact.abs().max(1.0),
            "{chi_exact} vs {chi_quad}"
        );
    }
}
