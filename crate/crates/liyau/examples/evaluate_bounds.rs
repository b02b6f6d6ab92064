//! Tour of the estimate catalog: every bound in normalized β-form
//! β(t)·‖∇f‖² − f_t ≤ B(t) at a few times, plus the α-form view and the
//! Davies-optimal β_m(t).
//!
//! Run with: cargo run --example evaluate_bounds

use liyau::bounds::{beta_m, default_catalog};

fn main() -> liyau::Result<()> {
    let (n, k) = (2u32, 1.0f64);
    let times = [0.1, 1.0, 10.0];

    println!("estimate catalog at n = {n}, Ric >= -{k}");
    println!("{:<16} {:>8}  {:>12}  {:>12}", "id", "t", "beta(t)", "B(t)");
    // Horizon just past the largest evaluation time: the admissibility
    // certificate needs the exponential curve to stay a margin above 0 on
    // the whole horizon.
    for est in default_catalog(n, k, 10.5)? {
        for &t in &times {
            let (coeff, bound) = est.eval(t, n, k)?;
            println!("{:<16} {:>8.2}  {:>12.6}  {:>12.6}", est.id().name(), t, coeff, bound);
        }
    }

    println!("\nalpha-form view of the constant-parameter bound (alpha = 1/beta):");
    let davies = liyau::bounds::Estimate::DaviesBeta { beta: 0.5 };
    for &t in &times {
        let (alpha, c) = davies.alpha_form(t, n, k)?;
        println!("  t = {t:>5.2}: ||grad f||^2 - {alpha:.1} f_t <= {c:.6}");
    }

    println!("\nbeta minimizing the constant-parameter bound at fixed t:");
    for &t in &times {
        let bm = beta_m(t, k)?;
        let best = liyau::bounds::Estimate::DaviesBeta { beta: bm };
        let (_, bound) = best.eval(t, n, k)?;
        println!("  t = {t:>5.2}: beta_m = {bm:.6}, bound = {bound:.6}");
    }
    Ok(())
}
