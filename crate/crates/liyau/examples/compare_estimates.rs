//! Dominance comparisons between estimates sharing the β parametrization:
//! the piecewise improvements sit below the constant-parameter bound
//! everywhere, while the ψ₂-derived bound trades wins with it over time.
//!
//! Run with: cargo run --example compare_estimates

use liyau::bounds::{dominates, DominanceVerdict, EstimateId};

fn describe(first: EstimateId, second: EstimateId, n: u32, k: f64) -> liyau::Result<()> {
    let betas: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let rep = dominates(first, second, n, k, (0.01, 100.0), 80, &betas)?;
    print!("{:<8} vs {:<12}: ", first.name(), second.name());
    match rep.verdict {
        DominanceVerdict::FirstEverywhereLeq => {
            println!("{} <= {} at every sampled (t, beta)", first.name(), second.name())
        }
        DominanceVerdict::SecondEverywhereLeq => {
            println!("{} <= {} at every sampled (t, beta)", second.name(), first.name())
        }
        DominanceVerdict::Crossover => {
            println!("crossover ({} samples):", rep.samples);
            if let Some(w) = rep.first_smaller {
                println!(
                    "    {} smaller at t = {:.4}, beta = {:.2}: {:.6} < {:.6}",
                    first.name(),
                    w.t,
                    w.beta.unwrap_or(f64::NAN),
                    w.bound_first,
                    w.bound_second
                );
            }
            if let Some(w) = rep.second_smaller {
                println!(
                    "    {} smaller at t = {:.4}, beta = {:.2}: {:.6} < {:.6}",
                    second.name(),
                    w.t,
                    w.beta.unwrap_or(f64::NAN),
                    w.bound_second,
                    w.bound_first
                );
            }
        }
    }
    Ok(())
}

fn main() -> liyau::Result<()> {
    let (n, k) = (2u32, 1.0f64);
    println!("pairwise bound comparisons at n = {n}, k = {k}\n");
    describe(EstimateId::Cor14, EstimateId::Cor12, n, k)?;
    describe(EstimateId::Cor12, EstimateId::DaviesBeta, n, k)?;
    describe(EstimateId::Cor14, EstimateId::DaviesBeta, n, k)?;
    describe(EstimateId::Cor15, EstimateId::DaviesBeta, n, k)?;
    println!("\nthe last crossover is why neither psi-construction wins universally.");
    Ok(())
}
