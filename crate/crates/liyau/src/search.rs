//! Scalar search primitives: golden-section refinement, certified running
//! extrema over an interval, and sign-change bisection.
//!
//! The ψ₁/ψ₂/σ evaluations all reduce to "maximum of a smooth-plus-kink
//! function on [0, t]". The protocol here is dense uniform sampling with
//! explicitly inserted kink abscissae, followed by golden-section refinement
//! around every local extremum candidate. Everything is deterministic.

/// Inverse golden ratio, (√5 − 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location/value pair of a certified extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section minimization of `f` on `[lo, hi]` to abscissa tolerance
/// `tol_x`. Assumes unimodality on the bracket; on monotone functions it
/// converges to the better endpoint.
pub fn golden_min<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol_x: f64) -> Extremum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut best = Extremum {
        arg: a,
        value: f(a),
    };
    let fb = f(b);
    if fb < best.value {
        best = Extremum { arg: b, value: fb };
    }

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    let mut iter = 0;
    while b - a > tol_x && iter < 200 {
        iter += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        if b <= a || !(x1 < x2) {
            break;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best.value {
            best = Extremum { arg: x, value: v };
        }
    }
    best
}

/// Golden-section maximization (negated [`golden_min`]).
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol_x: f64) -> Extremum {
    let m = golden_min(&|x| -f(x), lo, hi, tol_x);
    Extremum {
        arg: m.arg,
        value: -m.value,
    }
}

/// Build the sample grid: `grid_n` uniform subintervals of `[lo, hi]` plus
/// any `extra` abscissae (kinks, knots) clamped into the interval.
fn sample_points(lo: f64, hi: f64, grid_n: usize, extra: &[f64]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(grid_n + 1 + extra.len());
    for i in 0..=grid_n {
        pts.push(lo + (hi - lo) * (i as f64) / (grid_n as f64));
    }
    for &x in extra {
        if x > lo && x < hi {
            pts.push(x);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (hi - lo).abs().max(1.0));
    pts
}

/// Certified maximum of `f` over `[lo, hi]`: dense grid + extra abscissae,
/// then golden-section refinement inside the bracketing neighbors of every
/// local maximum candidate (endpoints included).
pub fn certified_max<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    grid_n: usize,
    extra: &[f64],
    tol_x: f64,
) -> Extremum {
    if hi <= lo {
        return Extremum {
            arg: lo,
            value: f(lo),
        };
    }
    let pts = sample_points(lo, hi, grid_n, extra);
    let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();

    let mut best = Extremum {
        arg: pts[0],
        value: vals[0],
    };
    for (i, &v) in vals.iter().enumerate() {
        if v > best.value {
            best = Extremum {
                arg: pts[i],
                value: v,
            };
        }
    }

    let n = pts.len();
    for i in 0..n {
        let left_ok = i == 0 || vals[i] >= vals[i - 1];
        let right_ok = i == n - 1 || vals[i] >= vals[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let a = if i == 0 { pts[0] } else { pts[i - 1] };
        let b = if i == n - 1 { pts[n - 1] } else { pts[i + 1] };
        if b - a <= tol_x {
            continue;
        }
        let refined = golden_max(f, a, b, tol_x);
        if refined.value > best.value {
            best = refined;
        }
    }
    best
}

/// Certified minimum (negated [`certified_max`]).
pub fn certified_min<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    grid_n: usize,
    extra: &[f64],
    tol_x: f64,
) -> Extremum {
    let m = certified_max(&|x| -f(x), lo, hi, grid_n, extra, tol_x);
    Extremum {
        arg: m.arg,
        value: -m.value,
    }
}

/// Bisect a bracketed sign change of `f` on `[lo, hi]` down to width `tol`.
/// Returns `None` when the endpoint values do not bracket a root.
pub fn bisect_sign_change<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}
