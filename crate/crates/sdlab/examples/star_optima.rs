//! Optimal no-announcement success probabilities for AND and XOR on n bits,
//! with the closed forms cross-checked against explicitly built Helstrom
//! instances.
//!
//! Run with `cargo run --example star_optima`.

use sdlab::star::{and_star_optimum, boolean_star_upper_bound, xor_star_optimum};

fn main() -> sdlab::Result<()> {
    println!("AND, two bases (prior puts weight 1/2 on the all-ones string):");
    for n in 1..=6 {
        let r = and_star_optimum(n)?;
        println!("  n = {n}: p = {:.12}", r.value);
    }

    println!("\nXOR, uniform prior (3/4 for even n beats nothing: it equals basis-guessing):");
    for m in [2usize, 3] {
        for n in 1..=6 {
            let r = xor_star_optimum(n, m)?;
            println!("  m = {m}, n = {n}: p = {:.12}", r.value);
        }
    }

    println!("\nuniversal balanced-function ceiling ½ + 1/(2√m):");
    for m in [2usize, 3] {
        println!("  m = {m}: {:.12}", boolean_star_upper_bound(0, m));
    }
    Ok(())
}
