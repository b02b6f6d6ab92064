//! Adaptive quadrature with endpoint-singularity handling.
//!
//! Two entry points:
//!
//! * [`integrate`] — adaptive Gauss-Kronrod (7/15) bisection on a finite
//!   interval with a smooth integrand.
//! * [`integrate_to_zero`] — ∫₀ᵗ g(s) ds where g may blow up at s = 0 like
//!   an integrable algebraic singularity s^q, q > −1. The interval is split
//!   into dyadic pieces (t/2, t], (t/4, t/2], ... ; each piece is smooth and
//!   integrated adaptively, and the remaining tail is summed by geometric
//!   extrapolation, which is exact for pure power singularities.

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [0, 1] (positive half; node 7 is the center).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// 7-point Gauss weights for the embedded rule (odd Kronrod nodes).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 7/15 panel. Returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let integral = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (integral, err)
}

/// Adaptive bisection around GK15. `tol` is treated as a relative tolerance
/// against the accumulated integral (with an absolute floor).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quadrature interval must be finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }

    // (lo, hi, integral, error), processed worst-first by plain scan.
    let (i0, e0) = gk15(f, a, b);
    let mut panels = vec![(a, b, i0, e0)];
    let max_panels = 2000;

    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let target = tol * total.abs().max(1e-300).max(tol);
        if err <= target || err <= 1e-16 * total.abs() {
            return Ok(total);
        }
        if panels.len() >= max_panels {
            return Err(Error::Numerical(format!(
                "adaptive quadrature failed to converge on [{a:.6e}, {b:.6e}]: \
                 {} panels, residual error {err:.3e} vs target {target:.3e}",
                panels.len()
            )));
        }
        // Split the panel with the largest error estimate.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval exhausted at machine precision; accept what we have.
            let (i, e) = gk15(f, lo, hi);
            panels.push((lo, hi, i, e.min(1e-300)));
            continue;
        }
        let left = gk15(f, lo, mid);
        let right = gk15(f, mid, hi);
        panels.push((lo, mid, left.0, left.1));
        panels.push((mid, hi, right.0, right.1));
    }
}

/// ∫₀ᵗ g(s) ds allowing an integrable algebraic singularity at s = 0.
///
/// Dyadic pieces P_j = ∫ over (t·2^{-j-1}, t·2^{-j}] are summed until the
/// geometric tail estimate P_J·q/(1−q), with q the measured ratio of
/// successive pieces, drops below `tol` relative to the running sum. For
/// g ~ c·s^q near zero the pieces are exactly geometric, so the
/// extrapolated tail is exact there.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(f: &F, t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "upper limit must be positive, got {t}"
        )));
    }
    let max_levels = 40;
    let mut sum = 0.0;
    let mut prev_piece: Option<f64> = None;
    let mut prev_extrapolated: Option<f64> = None;
    let mut hi = t;

    for level in 0..max_levels {
        let lo = hi * 0.5;
        let piece = integrate(f, lo, hi, tol * 0.01)?;
        sum += piece;

        if let Some(prev) = prev_piece {
            if piece == 0.0 && prev == 0.0 && level >= 3 {
                return Ok(sum);
            }
            let q = if prev != 0.0 { piece / prev } else { 0.0 };
            if (0.0..0.999).contains(&q) {
                // Cauchy test on the extrapolated sum, not on the raw tail:
                // for smooth integrands the raw tail only shrinks like 2^-j,
                // while the extrapolated value converges like 4^-j.
                let extrapolated = sum + piece * q / (1.0 - q);
                if let Some(prev_ext) = prev_extrapolated {
                    let diff = (extrapolated - prev_ext).abs();
                    if diff <= tol * extrapolated.abs().max(tol) && level >= 3 {
                        return Ok(extrapolated);
                    }
                }
                prev_extrapolated = Some(extrapolated);
            } else {
                // Pieces not decaying: either still outside the asymptotic
                // regime or a divergent singularity.
                prev_extrapolated = None;
            }
        }
        prev_piece = Some(piece);
        hi = lo;
    }

    Err(Error::Numerical(format!(
        "endpoint-singular integral did not converge after {max_levels} dyadic \
         levels (sum so far {sum:.6e}); the integrand may not be integrable near 0"
    )))
}
