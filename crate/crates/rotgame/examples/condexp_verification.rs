//! The verification battery for conditional expectations: unitality,
//! idempotence, Choi positivity, trace preservation and trace duality
//! against structurally sampled image elements.
//!
//! Run with: cargo run --example condexp_verification

use num_complex::Complex64;

use rotgame::algebra::{compose, make_block_pinching, make_pinching, make_trace_embed, verify_condexp};
use rotgame::linalg::{CMatrix, CVector};
use rotgame::qstate::SubsystemLayout;
use rotgame::verify::run_verify;

fn main() {
    let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let theta = 0.4_f64;
    let basis = vec![
        CVector::from_vec(vec![
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        ]),
        CVector::from_vec(vec![
            Complex64::new(-theta.sin(), 0.0),
            Complex64::new(theta.cos(), 0.0),
        ]),
    ];
    let pinch = make_pinching(&layout, "A", &basis).unwrap();
    let embed = make_trace_embed(&layout, &["B"]).unwrap();
    let combo = compose(vec![pinch.clone(), embed.clone()]).unwrap();

    // A block pinching onto a two-outcome coarse measurement of a qutrit.
    let qutrit = SubsystemLayout::new([("A", 3)]).unwrap();
    let mut p0 = CMatrix::zeros(3, 3);
    p0[(0, 0)] = Complex64::new(1.0, 0.0);
    p0[(1, 1)] = Complex64::new(1.0, 0.0);
    let mut p1 = CMatrix::zeros(3, 3);
    p1[(2, 2)] = Complex64::new(1.0, 0.0);
    let block = make_block_pinching(&qutrit, "A", &[p0, p1]).unwrap();

    for (name, e) in [
        ("tilted pinching on A", &pinch),
        ("trace-embedding of B", &embed),
        ("their composition", &combo),
        ("block pinching on a qutrit", &block),
    ] {
        let report = verify_condexp(e, 50, 21).unwrap();
        println!("{name}: pass = {}", report.pass);
        println!(
            "  unital {:.2e} | idempotent {:.2e} | choi min {:+.2e} | trace {:.2e} | duality {:.2e}",
            report.unitality_deviation,
            report.idempotence_deviation,
            report.choi_min_eigenvalue,
            report.trace_preservation_deviation,
            report.duality_deviation,
        );
    }

    // The same battery drives the `verify` subcommand.
    let suite = run_verify("algebra", 25, 21).unwrap();
    println!(
        "\nverify suite `algebra`: {}/{} checks passed",
        suite.checks.iter().filter(|c| c.passed).count(),
        suite.checks.len()
    );
}
