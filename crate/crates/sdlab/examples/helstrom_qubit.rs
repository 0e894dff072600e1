//! Discriminating a single bit encoded in two or three mutually unbiased
//! qubit bases, without knowing which basis was used: the optimal success
//! probability is ½ + 1/(2√m).
//!
//! Run with `cargo run --example helstrom_qubit`.

use sdlab::ensembles::{boolean_function, build_ensemble, qubit_mub_bases, standard_prior, FunctionKind};
use sdlab::star::helstrom;

fn main() -> sdlab::Result<()> {
    let identity_bit = boolean_function(FunctionKind::Table, 1, Some(&[0, 1]))?;
    for m in [2usize, 3] {
        let bases = qubit_mub_bases(m)?;
        let prior = standard_prior(&identity_bit, m)?;
        let ensemble = build_ensemble(&identity_bit, &bases, &prior)?;
        let result = helstrom(0.5, &ensemble.averaged_state(0), &ensemble.averaged_state(1))?;
        let closed = 0.5 + 0.5 / (m as f64).sqrt();
        println!(
            "{m} bases: optimal p = {:.12}   closed form ½ + 1/(2√{m}) = {closed:.12}",
            result.value
        );
        let witness = result.witness.expect("helstrom returns its measurement");
        println!(
            "  witness projector rank {} (measure it; answer 0 on click, 1 otherwise)",
            witness.trace().re.round() as usize
        );
    }
    Ok(())
}
