//! The square-root-type measurement: a universal strategy for any balanced
//! function once the basis announcement is promised. Its normalizer
//! S = Σ_T (Σ_b P_{o_b b})³ collapses to c_m·I, and its value beats the
//! basis-guessing bound for every (m, |Y|).
//!
//! Run with `cargo run --example srm_lower_bound`.

use sdlab::ensembles::{
    boolean_function, build_ensemble, qubit_mub_bases, standard_prior, tensor_power_bases,
    FunctionKind,
};
use sdlab::pistar::{srm_bound_formula, srm_build, strategy_value};
use sdlab::star::guessing_bound;

fn main() -> sdlab::Result<()> {
    let cases = [
        ("one bit, m=2", boolean_function(FunctionKind::Table, 1, Some(&[0, 1]))?, 1usize, 2usize, 2usize),
        ("one bit, m=3", boolean_function(FunctionKind::Table, 1, Some(&[0, 1]))?, 1, 3, 2),
        ("xor on 2 bits, m=2", boolean_function(FunctionKind::Xor, 2, None)?, 2, 2, 2),
        ("two-bit identity, |Y|=4", boolean_function(FunctionKind::Table, 2, Some(&[0, 1, 2, 3]))?, 2, 2, 4),
    ];
    for (label, f, n, m, y) in cases {
        let bases = tensor_power_bases(&qubit_mub_bases(m)?, n)?;
        let ens = build_ensemble(&f, &bases, &standard_prior(&f, m)?)?;
        let (strategy, parts) = srm_build(&ens)?;
        let value = strategy_value(&ens, &strategy)?;
        println!("{label}:");
        println!("  S = c_m·I with c_m = {} (defect {:.2e})", parts.c_m, parts.s.max_dist_to_scaled_identity(parts.c_m));
        println!(
            "  value {value:.9} ≥ bound {:.9} > guessing {:.9}",
            srm_bound_formula(m, y),
            guessing_bound(m, y)
        );
    }
    Ok(())
}
