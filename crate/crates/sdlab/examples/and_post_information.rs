//! The optimal zero-memory AND strategy: a four-outcome measurement whose ⊥
//! outcome rules out the all-ones string outright, plus a matching dual
//! certificate proving optimality with zero duality gap.
//!
//! Run with `cargo run --example and_post_information`.

use sdlab::optimize::verify_certificate;
use sdlab::pistar::{
    and_ensemble, and_pistar_certificate, and_pistar_measurement, and_pistar_value,
    strategy_value, tuple_problem,
};
use sdlab::star::and_star_optimum;

fn main() -> sdlab::Result<()> {
    println!(" n   with announcement   without        improvement     cert gap");
    for n in 1..=6 {
        let ens = and_ensemble(n)?;
        let strategy = and_pistar_measurement(n)?;
        let value = strategy_value(&ens, &strategy)?;
        let star = and_star_optimum(n)?.value;

        let problem = tuple_problem(&ens)?;
        let report =
            verify_certificate(&problem, &strategy.to_povm()?, &and_pistar_certificate(n)?, 1e-8)?;
        assert!(report.feasible);
        println!(
            " {n}   {value:.12}      {star:.12} {:.3e}      {:.1e}",
            value - star,
            report.gap.abs()
        );
        debug_assert!((value - and_pistar_value(n)).abs() < 1e-9);
    }
    println!("\nat n = 1 the announcement is worthless; afterwards it buys 1/(2(2^n + 2^(n/2) − 2))");
    Ok(())
}
