//! Three bases that force full quantum storage: with the crafted pair
//! (U₁, U₂) on top of the computational basis, every operator commuting with
//! all six support projectors is a multiple of the identity, so no
//! information-preserving measurement can compress the state. The best
//! partial fallback — run the one-qubit protocol on two bases and flip a
//! coin on the third — scores exactly 5/6.
//!
//! Run with `cargo run --example three_bases_adversarial`.

use rand::SeedableRng;

use sdlab::ensembles::{boolean_function, random_balanced_function, FunctionKind};
use sdlab::memory::{
    adversarial_bases, commutant_basis, decompose_algebra, partial_strategy_value,
    ProjectorFamily,
};
use sdlab::numkit::CMatrix;

fn main() -> sdlab::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let cases = [
        ("XOR on 2 bits".to_string(), boolean_function(FunctionKind::Xor, 2, None)?),
        ("random balanced on 3 bits".to_string(), random_balanced_function(3, &mut rng)),
    ];
    for (label, f) in cases {
        let d = 1usize << f.n;
        let (u1, u2) = adversarial_bases(&f)?;
        let family =
            ProjectorFamily::from_function_bases(&f, &[CMatrix::identity(d), u1.clone(), u2])?;
        let commutant = commutant_basis(&family)?;
        let dec = decompose_algebra(&family)?;
        println!("{label} (d = {d}):");
        println!("  commutant dimension: {} (scalars only)", commutant.len());
        println!(
            "  minimal memory dimension: {} = d, i.e. {} qubits — everything must be kept",
            dec.min_memory_dim,
            dec.min_memory_qubits()
        );
        println!("  two-basis partial strategy: {:.12}", partial_strategy_value(&f, &u1)?);
    }
    Ok(())
}
