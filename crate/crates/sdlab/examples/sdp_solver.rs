//! The built-in discrimination SDP solver: projected gradient ascent over the
//! POVM simplex with Dykstra projections, self-certified through the
//! optimality-condition dual Q̂ = Herm(Σ c·w_i·B_i·M_i).
//!
//! Run with `cargo run --example sdp_solver`.

use sdlab::ensembles::{boolean_function, build_ensemble, qubit_mub_bases, standard_prior, FunctionKind};
use sdlab::optimize::{solve_discrimination, DiscriminationProblem, ProblemTerm};
use sdlab::pistar::{and_pistar_value, and_tuple_problem};

fn main() -> sdlab::Result<()> {
    // two-hypothesis instance: one bit across {I, H}
    let f = boolean_function(FunctionKind::Table, 1, Some(&[0, 1]))?;
    let bases = qubit_mub_bases(2)?;
    let ens = build_ensemble(&f, &bases, &standard_prior(&f, 2)?)?;
    let problem = DiscriminationProblem::new(
        1.0,
        2,
        vec![
            ProblemTerm { label: "0".into(), weight: 0.5, op: ens.averaged_state(0) },
            ProblemTerm { label: "1".into(), weight: 0.5, op: ens.averaged_state(1) },
        ],
    )?;
    let res = solve_discrimination(&problem, 1e-6)?;
    println!(
        "one-bit instance: value {:.9} (closed form {:.9}), certified={} slack={:.2e}, {} iterations",
        res.value,
        0.5 + 0.5 / 2.0_f64.sqrt(),
        res.certified,
        res.certificate_slack,
        res.iterations
    );

    // the four-outcome AND program at n = 2
    let problem = and_tuple_problem(2)?;
    let res = solve_discrimination(&problem, 1e-6)?;
    println!(
        "AND n=2 tuple SDP: value {:.9} (closed form {:.9} = 23/24), certified={} slack={:.2e}",
        res.value,
        and_pistar_value(2),
        res.certified,
        res.certificate_slack
    );
    Ok(())
}
