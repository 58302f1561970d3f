//! Saturation of the tripartite bound: pure shared states and product
//! states across the (A B1 | B2) split meet it exactly; generic mixed
//! states leave a strict gap.
//!
//! Run with: cargo run --example saturation

use rotgame::ensembles::{ginibre_mixed, haar_pure, mix_noise, random_angles, SeededSource};
use rotgame::games::{tripartite_report, BoundVariant, GameInstance, RotationEnsemble};
use rotgame::qstate::{tensor, Generator, SubsystemLayout};

fn main() {
    let mut source = SeededSource::new(1, "demo/saturation");
    let layout = SubsystemLayout::new([("A", 2), ("B1", 2), ("B2", 2)]).unwrap();
    let ab1 = SubsystemLayout::new([("A", 2), ("B1", 2)]).unwrap();
    let b2 = SubsystemLayout::new([("B2", 2)]).unwrap();

    println!("{:<28} {:>14} {:>14}", "shared state", "lhs", "gap_thm1");
    for i in 0..4 {
        let angles = random_angles(6, &mut source).unwrap();
        let ensemble = RotationEnsemble::uniform(angles).unwrap();

        let pure = haar_pure(layout.clone(), &mut source).unwrap().to_density();
        let game = GameInstance::new(pure, Generator::pauli_x("A"), ensemble.clone()).unwrap();
        let report = tripartite_report(&game).unwrap();
        println!(
            "{:<28} {:>14.6} {:>14.3e}",
            format!("Haar pure #{i}"),
            report.lhs,
            report.gap(BoundVariant::Thm1).unwrap()
        );

        let left = ginibre_mixed(ab1.clone(), 4, &mut source).unwrap();
        let right = ginibre_mixed(b2.clone(), 2, &mut source).unwrap();
        let product = tensor(&[&left, &right]).unwrap();
        let game = GameInstance::new(product.clone(), Generator::pauli_x("A"), ensemble.clone())
            .unwrap();
        let report = tripartite_report(&game).unwrap();
        println!(
            "{:<28} {:>14.6} {:>14.3e}",
            format!("mixed product #{i}"),
            report.lhs,
            report.gap(BoundVariant::Thm1).unwrap()
        );

        let noisy = mix_noise(&product, 0.2, &mut source).unwrap();
        let game = GameInstance::new(noisy, Generator::pauli_x("A"), ensemble).unwrap();
        let report = tripartite_report(&game).unwrap();
        println!(
            "{:<28} {:>14.6} {:>14.3e}",
            format!("generic mixed #{i}"),
            report.lhs,
            report.gap(BoundVariant::Thm1).unwrap()
        );
    }
    println!("\npure and product rows sit at machine precision; generic noise opens a gap.");
}
