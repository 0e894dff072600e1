//! One qubit of memory is always enough for two bases: the two preimage
//! projectors split the space into blocks of dimension ≤ 2, and measuring the
//! block label preserves everything needed to answer perfectly after the
//! basis announcement — for any Boolean function and any second basis.
//!
//! Run with `cargo run --example one_qubit_memory`.

use num_complex::Complex64;
use rand::SeedableRng;

use sdlab::ensembles::{boolean_function, hadamard, random_balanced_function, FunctionKind};
use sdlab::memory::{one_qubit_protocol_sim, two_projector_blocks};
use sdlab::numkit::{random_unitary, tensor_power, CMatrix};

fn main() -> sdlab::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);

    let cases: Vec<(String, sdlab::ensembles::FunctionSpec, CMatrix)> = vec![
        ("AND, n=3, Hadamard".into(), boolean_function(FunctionKind::And, 3, None)?, tensor_power(&hadamard(), 3)?),
        ("XOR, n=3, Hadamard".into(), boolean_function(FunctionKind::Xor, 3, None)?, tensor_power(&hadamard(), 3)?),
        ("random balanced, n=3, random basis".into(), random_balanced_function(3, &mut rng), random_unitary(8, &mut rng)),
    ];
    for (label, f, u) in cases {
        let d = 1usize << f.n;
        let mut p00 = CMatrix::zeros(d, d);
        for &x in &f.preimage(0) {
            p00.set(x, x, Complex64::new(1.0, 0.0));
        }
        let p01 = p00.conjugate_by(&u.dagger());
        let dec = two_projector_blocks(&p00, &p01)?;
        let dims: Vec<usize> = dec.blocks.iter().map(|b| b.dim_j).collect();
        let success = one_qubit_protocol_sim(&f, &u)?;
        println!("{label}: block dims {dims:?}, simulated success = {success:.12}");
    }
    Ok(())
}
