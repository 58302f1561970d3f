//! The commuting squares behind the bounds: pinchings on the rotation
//! register and on A commute (they touch different factors), the
//! trace-embedding square on (A, B) commutes, and two pinchings of the
//! same qubit in tilted bases do not.
//!
//! Each commuting square yields the entropy inequality
//! S(E_N ρ) + S(E_T ρ) ≥ S(ρ) + S(E_R ρ).
//!
//! Run with: cargo run --example commuting_squares

use num_complex::Complex64;

use rotgame::algebra::{
    make_pinching, make_trace_embed, pinching_from_generator, theorem3_report,
    verify_commuting_square, verify_condexp, CommutingSquare,
};
use rotgame::ensembles::{ginibre_mixed, SeededSource};
use rotgame::linalg::CVector;
use rotgame::qstate::{Generator, SubsystemLayout};

fn computational_basis(dim: usize) -> Vec<CVector> {
    (0..dim)
        .map(|k| {
            let mut v = CVector::zeros(dim);
            v[k] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

fn main() {
    let mut source = SeededSource::new(3, "demo/squares");
    let g = Generator::pauli_x("A");

    // Register/measurement square on (R, A, B1).
    let rab1 = SubsystemLayout::new([("R", 3), ("A", 2), ("B1", 2)]).unwrap();
    let pinch_r = make_pinching(&rab1, "R", &computational_basis(3)).unwrap();
    let pinch_a = pinching_from_generator(&rab1, &g).unwrap();
    let check = verify_commuting_square(&pinch_r, &pinch_a).unwrap();
    println!(
        "register pinching vs measurement pinching on {rab1}: commutes = {} (dev {:.2e})",
        check.commutes, check.deviation
    );

    let battery = verify_condexp(&pinch_a, 50, 9).unwrap();
    println!(
        "measurement pinching passes the conditional-expectation battery: {} \
         (unital {:.1e}, idempotent {:.1e}, choi min {:.1e}, duality {:.1e})",
        battery.pass,
        battery.unitality_deviation,
        battery.idempotence_deviation,
        battery.choi_min_eigenvalue,
        battery.duality_deviation
    );

    // Memory-embedding square on (A, B).
    let ab = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let embed_b = make_trace_embed(&ab, &["B"]).unwrap();
    let pinch_ab = pinching_from_generator(&ab, &g).unwrap();
    let square = CommutingSquare::verified(embed_b, pinch_ab).unwrap();
    println!("\nentropy inequality on the (A, B) square, random states:");
    for _ in 0..5 {
        let rho = ginibre_mixed(ab.clone(), 4, &mut source).unwrap();
        let report = theorem3_report(&square, &rho).unwrap();
        println!(
            "  S(E_N ρ) {:.4} + S(E_T ρ) {:.4} − S(ρ) {:.4} − S(E_R ρ) {:.4} = slack {:+.4e}",
            report.s_n, report.s_t, report.s_m, report.s_r, report.slack
        );
    }

    // Two pinchings of the same qubit in bases tilted by π/8 cannot form a
    // commuting square.
    let qubit = SubsystemLayout::new([("A", 2)]).unwrap();
    let angle = std::f64::consts::FRAC_PI_8;
    let tilted = vec![
        CVector::from_vec(vec![
            Complex64::new(angle.cos(), 0.0),
            Complex64::new(angle.sin(), 0.0),
        ]),
        CVector::from_vec(vec![
            Complex64::new(-angle.sin(), 0.0),
            Complex64::new(angle.cos(), 0.0),
        ]),
    ];
    let pz = make_pinching(&qubit, "A", &computational_basis(2)).unwrap();
    let pt = make_pinching(&qubit, "A", &tilted).unwrap();
    let failed = verify_commuting_square(&pz, &pt).unwrap();
    println!(
        "\nz-basis vs π/8-tilted pinching of one qubit: commutes = {} (dev {:.2e})",
        failed.commutes, failed.deviation
    );
}
