//! Upper bounds of the variational quantities φ₁(β₀, t₀) and φ₂(β₀, t₀):
//! minimize ψ₁/ψ₂ over parameter curves pinned to β(t₀) = β₀, and compare
//! against the closed-form corollary references the linear test curve yields.
//!
//! Run with: cargo run --example optimize_phi

use liyau::varopt::{phi_upper, Phi, PhiOptions};

fn main() -> liyau::Result<()> {
    let (n, k) = (2u32, 1.0f64);
    let opts = PhiOptions::default();

    for which in [Phi::Phi1, Phi::Phi2] {
        println!("{} upper bounds at n = {n}, k = {k}:", which.name());
        println!(
            "{:>6} {:>6}  {:>12} {:>12}  {:<16} {:>10}",
            "beta0", "t0", "value", "corollary", "family", "improve"
        );
        for &beta0 in &[0.3, 0.5, 0.8] {
            for &t0 in &[0.25, 1.0, 4.0] {
                let r = phi_upper(which, beta0, t0, n, k, &opts)?;
                println!(
                    "{beta0:>6.2} {t0:>6.2}  {:>12.6} {:>12.6}  {:<16} {:>9.2}%",
                    r.value,
                    r.corollary_reference,
                    r.family.name(),
                    100.0 * (r.corollary_reference - r.value)
                        / r.corollary_reference.abs().max(1e-300),
                );
            }
        }
        println!();
    }

    // The per-family spread is the only diagnostic of the optimization gap:
    // no lower bound for phi is known.
    let r = phi_upper(Phi::Phi1, 0.5, 1.0, n, k, &opts)?;
    println!("family spread at (beta0, t0) = (0.5, 1):");
    for o in &r.per_family {
        println!("  {:<16} value {:.9}", o.family.name(), o.value);
    }
    println!(
        "\nevery reported value is an upper bound of phi (upper_bound_of_phi = {})",
        r.upper_bound_of_phi
    );
    Ok(())
}
