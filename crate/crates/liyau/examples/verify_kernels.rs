//! Verify the whole catalog against exact heat kernels: flat ℝ² / ℝ³ and
//! hyperbolic H³ (Ric = −2). Every theorem-guaranteed pair must come out
//! with max violation ≤ 1e-9; tightness shows how much room each bound
//! leaves above the kernel.
//!
//! Run with: cargo run --example verify_kernels

use liyau::bounds::{default_catalog, Estimate};
use liyau::kernels::{sharpness_ratio, verify_on_grid, GridSpec, ModelManifold};

fn main() -> liyau::Result<()> {
    let cases = [
        (ModelManifold::euclidean(3)?, GridSpec::default()),
        (
            ModelManifold::hyperbolic3(1.0)?,
            GridSpec {
                r_max: 20.0,
                nr: 256,
                t_min: 0.05,
                t_max: 5.0,
                nt: 256,
                log_time: true,
            },
        ),
    ];

    for (model, grid) in &cases {
        let k = model.ricci_lower_k();
        println!(
            "=== {} (n = {}, k = {k}) on {}x{} grid, r <= {}, t in [{}, {}] ===",
            model.geometry_name(),
            model.n(),
            grid.nr,
            grid.nt,
            grid.r_max,
            grid.t_min,
            grid.t_max,
        );
        println!("{:<16} {:>14} {:>10}  status", "estimate", "max violation", "tightness");
        for est in default_catalog(model.n(), k, grid.t_max * 1.01)? {
            let rep = verify_on_grid(model, &est, None, grid, 1e-9, 1.0)?;
            println!(
                "{:<16} {:>14.3e} {:>10.4}  {}",
                est.id().name(),
                rep.max_violation,
                rep.tightness,
                if rep.pass { "ok" } else { "VIOLATED" },
            );
        }
        println!();
    }

    // Sharpness of the constant-parameter family on flat space: the kernel
    // attains exactly the fraction beta of the bound, at the origin.
    let flat = ModelManifold::euclidean(2)?;
    println!("sharpness of the beta-family on R^2 at t = 1 (ratio = beta):");
    for &beta in &[0.3, 0.6, 0.9, 0.99] {
        let ratio = sharpness_ratio(&flat, &Estimate::DaviesBeta { beta }, None, 1.0, 10.0)?;
        println!("  beta = {beta:<5}: sup LHS / RHS = {ratio:.9}");
    }
    Ok(())
}
