//! The bipartite game for three kinds of shared state: product, partially
//! entangled and maximally entangled. Entanglement drives S(A|B)_ρ
//! negative and lowers the achievable uncertainty.
//!
//! Run with: cargo run --example bipartite_bounds

use num_complex::Complex64;

use rotgame::ensembles::{ginibre_mixed, random_angles, SeededSource};
use rotgame::games::{bipartite_report, BoundVariant, GameInstance, RotationEnsemble};
use rotgame::qstate::{tensor, DensityMatrix, Generator, PureState, SubsystemLayout};

fn entangled_pair(weight: f64) -> DensityMatrix {
    // cos(w)|00⟩ + sin(w)|11⟩
    let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let mut v = nalgebra::DVector::zeros(4);
    v[0] = Complex64::new(weight.cos(), 0.0);
    v[3] = Complex64::new(weight.sin(), 0.0);
    PureState::new(layout, v).unwrap().to_density()
}

fn main() {
    let mut source = SeededSource::new(5, "demo/bipartite");
    let angles = random_angles(4, &mut source).unwrap();
    let ensemble = RotationEnsemble::uniform(angles).unwrap();
    let generator = Generator::pauli_z("A");

    let product = {
        let a = ginibre_mixed(SubsystemLayout::new([("A", 2)]).unwrap(), 2, &mut source).unwrap();
        let b = ginibre_mixed(SubsystemLayout::new([("B", 2)]).unwrap(), 2, &mut source).unwrap();
        tensor(&[&a, &b]).unwrap()
    };
    let cases = [
        ("product ρ_A ⊗ ρ_B", product),
        ("partially entangled", entangled_pair(0.5)),
        ("maximally entangled", entangled_pair(std::f64::consts::FRAC_PI_4)),
    ];

    println!(
        "{:<22} {:>10} {:>10} {:>10} {:>11}",
        "shared state", "lhs", "rhs", "gap", "S(A|B)_ρ"
    );
    for (label, rho) in cases {
        let game = GameInstance::new(rho, generator.clone(), ensemble.clone()).unwrap();
        let report = bipartite_report(&game).unwrap();
        println!(
            "{label:<22} {:>10.5} {:>10.5} {:>10.3e} {:>11.5}",
            report.lhs,
            report.rhs(BoundVariant::Thm2).unwrap(),
            report.gap(BoundVariant::Thm2).unwrap(),
            report.term("s_a_given_b_rho").unwrap()
        );
    }
    println!("\nproduct states saturate the bound exactly; entanglement lowers both sides.");
}
