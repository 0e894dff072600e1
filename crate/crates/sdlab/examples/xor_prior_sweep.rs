//! A prior where measuring is pointless: guessing the XOR of two bits over
//! three bases, with prior weight q on XOR = 0. At q = 1/3 the optimal
//! probability drops to 2/3 — exactly what blindly answering 1 achieves.
//!
//! Run with `cargo run --example xor_prior_sweep`.

use sdlab::star::xor_two_bit_prior;

fn main() -> sdlab::Result<()> {
    println!("  q      p_opt          blind max(q, 1-q)");
    let mut qs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    qs.push(1.0 / 3.0);
    qs.sort_by(f64::total_cmp);
    for q in qs {
        let p = xor_two_bit_prior(q)?;
        let blind = q.max(1.0 - q);
        let marker = if (p - blind).abs() < 1e-9 { "  <- measurement useless" } else { "" };
        println!("  {q:.4} {p:.12} {blind:.12}{marker}");
    }
    Ok(())
}
