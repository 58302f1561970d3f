//! Named verification suites driving the invariants of every module, for
//! the `verify` CLI subcommand and the acceptance tests.

use num_complex::Complex64;

use crate::algebra::{
    compose, make_pinching, make_trace_embed, pinching_from_generator, pinching_stinespring,
    theorem3_report, verify_commuting_square, verify_condexp, verify_prop4, verify_recovery,
    CommutingSquare, ConditionalExpectation, RecoveryCandidate, RecoverySide,
};
use crate::ensembles::{ginibre_mixed, haar_pure, random_angles, SeededSource};
use crate::entropy::{
    conditional_entropy, relative_entropy, von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::games::{
    bipartite_report, build_kappa, build_omega, build_psi, control_unitary,
    kappa_register_additivity_residual, pinch_gain_identity_residual, register_pinching,
    tripartite_report, BoundVariant, GameInstance, GameKind, RotationEnsemble,
};
use crate::linalg::{eig_hermitian, exp_i_hermitian, hermitize, max_abs, max_abs_diff, CMatrix, CVector};
use crate::qstate::{
    apply_unitary, partial_trace, tensor, DensityMatrix, Generator, SubsystemLayout,
};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn suite_names() -> Vec<&'static str> {
    vec![
        "qstate",
        "entropy",
        "algebra",
        "identities",
        "games",
        "ensembles",
        "all",
    ]
}

/// Runs one suite (or `all`). Failing checks are reported in the result;
/// only unknown suite names and invalid sample counts are errors.
pub fn run_verify(suite: &str, samples: usize, seed: u64) -> Result<VerifyReport> {
    if samples < 1 {
        return Err(Error::Config("samples: need at least one".into()));
    }
    let checks = match suite {
        "qstate" => qstate_checks(samples, seed),
        "entropy" => entropy_checks(samples, seed),
        "algebra" => algebra_checks(samples, seed),
        "identities" => identity_checks(samples, seed),
        "games" => games_checks(samples, seed),
        "ensembles" => ensembles_checks(samples, seed),
        "all" => {
            let mut all = qstate_checks(samples, seed);
            all.extend(entropy_checks(samples, seed));
            all.extend(algebra_checks(samples, seed));
            all.extend(identity_checks(samples, seed));
            all.extend(games_checks(samples, seed));
            all.extend(ensembles_checks(samples, seed));
            all
        }
        // Hidden negative control: always produces one failing check.
        "__inject-fault" => vec![CheckResult {
            name: "injected_fault".into(),
            passed: false,
            details: "deliberately failing check for exit-code tests".into(),
        }],
        other => {
            return Err(Error::Config(format!(
                "unknown suite `{other}` (expected one of {})",
                suite_names().join(", ")
            )))
        }
    };
    Ok(VerifyReport {
        suite: suite.to_string(),
        checks,
    })
}

fn check(name: &str, worst: f64, tol: f64, samples: usize) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: worst <= tol,
        details: format!("worst deviation {worst:.3e} (tolerance {tol:.1e}, {samples} samples)"),
    }
}

fn check_slack(name: &str, worst: f64, tol: f64, samples: usize) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: worst >= -tol,
        details: format!("worst slack {worst:.3e} (tolerance -{tol:.1e}, {samples} samples)"),
    }
}

fn random_state(labels: &[(&str, usize)], src: &mut SeededSource) -> DensityMatrix {
    let layout = SubsystemLayout::new(labels.iter().map(|&(l, d)| (l, d))).unwrap();
    let dim = layout.total_dim();
    ginibre_mixed(layout, dim, src).expect("ginibre construction")
}

fn random_basis(dim: usize, src: &mut SeededSource) -> Vec<CVector> {
    let h = hermitize(&CMatrix::from_fn(dim, dim, |_, _| src.complex_normal()));
    let u = exp_i_hermitian(&h, 1.0).expect("hermitian exponential");
    (0..dim).map(|k| u.column(k).into_owned()).collect()
}

fn random_game(labels: &[(&str, usize)], n_angles: usize, src: &mut SeededSource) -> GameInstance {
    let rho = random_state(labels, src);
    let angles = random_angles(n_angles, src).unwrap();
    let ensemble = if src.uniform() < 0.5 {
        RotationEnsemble::uniform(angles).unwrap()
    } else {
        let raw: Vec<f64> = (0..n_angles).map(|_| src.uniform() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        RotationEnsemble::new(angles, raw.iter().map(|x| x / total).collect()).unwrap()
    };
    GameInstance::new(rho, Generator::pauli_x("A"), ensemble).unwrap()
}

fn qstate_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut src = SeededSource::new(seed, "verify/qstate");
    let mut round_trip = 0.0_f64;
    let mut spectrum = 0.0_f64;
    let mut recon = 0.0_f64;
    for _ in 0..samples {
        let rho = random_state(&[("A", 2), ("B", 2)], &mut src);
        let sigma = random_state(&[("C", 3)], &mut src);
        let both = tensor(&[&rho, &sigma]).unwrap();
        let back = partial_trace(&both, &["A", "B"]).unwrap();
        round_trip = round_trip.max(max_abs_diff(back.matrix(), rho.matrix()));

        let h = hermitize(&CMatrix::from_fn(4, 4, |_, _| src.complex_normal()));
        let u = exp_i_hermitian(&h, 0.7).unwrap();
        let rotated = apply_unitary(&rho, &u, &["A", "B"]).unwrap();
        let before = eig_hermitian(rho.matrix()).unwrap().values;
        let after = eig_hermitian(rotated.matrix()).unwrap().values;
        for (x, y) in before.iter().zip(&after) {
            spectrum = spectrum.max((x - y).abs());
        }

        let scale = max_abs(&h).max(1.0);
        let eig = eig_hermitian(&h).unwrap();
        let lambda = CMatrix::from_diagonal(&CVector::from_iterator(
            4,
            eig.values.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let back_h = &eig.vectors * lambda * eig.vectors.adjoint();
        recon = recon.max(max_abs_diff(&back_h, &h) / scale);
    }
    vec![
        check("qstate/tensor_partial_trace_round_trip", round_trip, 1e-12, samples),
        check("qstate/unitary_preserves_spectrum", spectrum, 1e-10, samples),
        check("qstate/eig_reconstruction", recon, 1e-12, samples),
    ]
}

fn entropy_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut src = SeededSource::new(seed, "verify/entropy");
    let mut pure_entropy = 0.0_f64;
    let mut additivity = 0.0_f64;
    let mut ssa_slack = f64::INFINITY;
    let mut rel_ent_slack = f64::INFINITY;
    let mut mutual_info_slack = f64::INFINITY;
    let mut invariance = 0.0_f64;
    for _ in 0..samples {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let psi = haar_pure(layout, &mut src).unwrap().to_density();
        pure_entropy = pure_entropy.max(von_neumann_entropy(&psi).value().abs());

        let rho = random_state(&[("A", 2)], &mut src);
        let sigma = random_state(&[("B", 3)], &mut src);
        let both = tensor(&[&rho, &sigma]).unwrap();
        additivity = additivity.max(
            (von_neumann_entropy(&both).value()
                - von_neumann_entropy(&rho).value()
                - von_neumann_entropy(&sigma).value())
            .abs(),
        );

        let tri = random_state(&[("A", 2), ("B", 2), ("C", 2)], &mut src);
        let s_ab = conditional_entropy(&tri, &["A"], &["B"]).unwrap().value();
        let s_abc = conditional_entropy(&tri, &["A"], &["B", "C"]).unwrap().value();
        ssa_slack = ssa_slack.min(s_ab - s_abc);
        mutual_info_slack = mutual_info_slack.min(
            crate::entropy::mutual_information(&tri, &["A"], &["B", "C"])
                .unwrap()
                .value(),
        );

        let r1 = random_state(&[("A", 4)], &mut src);
        let r2 = random_state(&[("A", 4)], &mut src);
        let d = relative_entropy(&r1, &r2).unwrap();
        if d.is_finite() {
            rel_ent_slack = rel_ent_slack.min(d.value());
        }

        let h = hermitize(&CMatrix::from_fn(2, 2, |_, _| src.complex_normal()));
        let u = exp_i_hermitian(&h, 1.3).unwrap();
        let rotated = apply_unitary(&rho, &u, &["A"]).unwrap();
        invariance = invariance.max(
            (von_neumann_entropy(&rotated).value() - von_neumann_entropy(&rho).value()).abs(),
        );
    }
    vec![
        check("entropy/pure_states_have_zero_entropy", pure_entropy, 1e-12, samples),
        check("entropy/additivity_over_tensor", additivity, 1e-10, samples),
        check_slack("entropy/strong_subadditivity", ssa_slack, 1e-9, samples),
        check_slack("entropy/relative_entropy_nonnegative", rel_ent_slack, 1e-10, samples),
        check_slack("entropy/mutual_information_nonnegative", mutual_info_slack, 1e-10, samples),
        check("entropy/unitary_invariance", invariance, 1e-10, samples),
    ]
}

fn first_square(
    layout: &SubsystemLayout,
    generator: &Generator,
    r_basis_dim: usize,
) -> (ConditionalExpectation, ConditionalExpectation) {
    let r_basis: Vec<CVector> = (0..r_basis_dim)
        .map(|k| {
            let mut v = CVector::zeros(r_basis_dim);
            v[k] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    let pinch_r = make_pinching(layout, "R", &r_basis).unwrap();
    let pinch_a = pinching_from_generator(layout, generator).unwrap();
    (pinch_r, pinch_a)
}

fn algebra_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut src = SeededSource::new(seed, "verify/algebra");
    let mut out = Vec::new();
    let condexp_samples = samples.max(50);

    // Verification battery for each constructed kind of map.
    let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let pinch = make_pinching(&layout, "A", &random_basis(2, &mut src)).unwrap();
    let embed = make_trace_embed(&layout, &["B"]).unwrap();
    let combo = compose(vec![pinch.clone(), embed.clone()]).unwrap();
    for (name, e) in [
        ("algebra/condexp_pinching", &pinch),
        ("algebra/condexp_trace_embed", &embed),
        ("algebra/condexp_composition", &combo),
    ] {
        let report = verify_condexp(e, condexp_samples, seed ^ 0x5eed).unwrap();
        out.push(CheckResult {
            name: name.into(),
            passed: report.pass,
            details: format!(
                "unital {:.2e}, idempotent {:.2e}, choi min {:.2e}, tp {:.2e}, duality {:.2e}",
                report.unitality_deviation,
                report.idempotence_deviation,
                report.choi_min_eigenvalue,
                report.trace_preservation_deviation,
                report.duality_deviation
            ),
        });
    }

    // Register/measurement square on (R, A, B1).
    let g = Generator::pauli_x("A");
    let layout_rab1 = SubsystemLayout::new([("R", 3), ("A", 2), ("B1", 2)]).unwrap();
    let (pinch_r, pinch_a) = first_square(&layout_rab1, &g, 3);
    let first = verify_commuting_square(&pinch_r, &pinch_a).unwrap();
    out.push(CheckResult {
        name: "algebra/first_square_commutes".into(),
        passed: first.commutes,
        details: format!("superoperator deviation {:.3e}", first.deviation),
    });

    // Alternative square on (R, A, B1, B2) with embedded memories.
    let layout_full = SubsystemLayout::new([("R", 2), ("A", 2), ("B1", 2), ("B2", 2)]).unwrap();
    let (pinch_r2, pinch_a2) = first_square(&layout_full, &g, 2);
    let e_n = compose(vec![
        pinch_r2.clone(),
        make_trace_embed(&layout_full, &["B2"]).unwrap(),
    ])
    .unwrap();
    let e_t = compose(vec![
        pinch_a2.clone(),
        make_trace_embed(&layout_full, &["B1"]).unwrap(),
    ])
    .unwrap();
    let second = verify_commuting_square(&e_n, &e_t).unwrap();
    out.push(CheckResult {
        name: "algebra/second_square_commutes".into(),
        passed: second.commutes,
        details: format!("superoperator deviation {:.3e}", second.deviation),
    });

    // Bipartite square on (A, B).
    let layout_ab = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let embed_b = make_trace_embed(&layout_ab, &["B"]).unwrap();
    let pinch_ab = pinching_from_generator(&layout_ab, &g).unwrap();
    let bipartite = verify_commuting_square(&embed_b, &pinch_ab).unwrap();
    out.push(CheckResult {
        name: "algebra/bipartite_square_commutes".into(),
        passed: bipartite.commutes,
        details: format!("superoperator deviation {:.3e}", bipartite.deviation),
    });

    // Negative control: same-factor pinchings in tilted bases.
    let layout_a = SubsystemLayout::new([("A", 2)]).unwrap();
    let z_basis = vec![
        CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]),
        CVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
    ];
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
    let pz = make_pinching(&layout_a, "A", &z_basis).unwrap();
    let pt = make_pinching(&layout_a, "A", &tilted).unwrap();
    let tilted_check = verify_commuting_square(&pz, &pt).unwrap();
    out.push(CheckResult {
        name: "algebra/tilted_basis_pinchings_do_not_commute".into(),
        passed: !tilted_check.commutes,
        details: format!("superoperator deviation {:.3e}", tilted_check.deviation),
    });

    // Entropy inequality on random states for all three squares.
    let squares = [
        CommutingSquare::verified(pinch_r.clone(), pinch_a.clone()).unwrap(),
        CommutingSquare::verified(e_n.clone(), e_t.clone()).unwrap(),
        CommutingSquare::verified(embed_b.clone(), pinch_ab.clone()).unwrap(),
    ];
    let mut slack = f64::INFINITY;
    let mut theorem3_failures = 0usize;
    for i in 0..samples {
        let square = &squares[i % squares.len()];
        let dim = square.layout().total_dim();
        let rho = ginibre_mixed(square.layout().clone(), dim, &mut src).unwrap();
        match theorem3_report(square, &rho) {
            Ok(report) => slack = slack.min(report.slack),
            Err(_) => theorem3_failures += 1,
        }
    }
    out.push(CheckResult {
        name: "algebra/theorem3_nonnegative".into(),
        passed: theorem3_failures == 0 && slack >= -1e-9,
        details: format!("worst slack {slack:.3e}, {theorem3_failures} failures, {samples} samples"),
    });

    // Recovery map for the register/measurement square at game states ψ;
    // the memory B plays the guesser register of the square.
    let mut rec_worst = 0.0_f64;
    let mut sat_worst = 0.0_f64;
    let mut rec_failures = 0usize;
    let rec_rounds = samples.clamp(3, 10);
    for _ in 0..rec_rounds {
        let game = random_game(&[("A", 2), ("B", 2)], 3, &mut src);
        let psi = build_psi(&game).unwrap();
        let layout_rab = psi.layout().clone();
        let (pr, pa) = first_square(&layout_rab, game.generator(), 3);
        let square = CommutingSquare::verified(pr, pa).unwrap();
        let u = control_unitary(game.ensemble(), game.generator());
        let candidate = RecoveryCandidate::conjugated_reset(
            &layout_rab,
            &u,
            &["R", "A"],
            &["A", "B"],
            game.rho().clone(),
        )
        .unwrap();
        match verify_recovery(&candidate, &square, RecoverySide::FromT, &psi) {
            Ok(report) => {
                rec_worst = rec_worst
                    .max(report.state_deviation)
                    .max(report.corner_deviation);
                let t3 = theorem3_report(&square, &psi).unwrap();
                sat_worst = sat_worst.max(t3.slack.abs());
            }
            Err(_) => rec_failures += 1,
        }
    }
    out.push(CheckResult {
        name: "algebra/recovery_first_square".into(),
        passed: rec_failures == 0 && rec_worst <= 1e-9,
        details: format!("worst deviation {rec_worst:.3e}, {rec_rounds} games"),
    });
    out.push(CheckResult {
        name: "algebra/recovery_implies_saturation".into(),
        passed: rec_failures == 0 && sat_worst <= 1e-8,
        details: format!("worst |slack| {sat_worst:.3e} at recovered states"),
    });

    // Reset recovery on the bipartite square for product states.
    let mut prod_worst = 0.0_f64;
    for _ in 0..rec_rounds {
        let rho_a = random_state(&[("A", 2)], &mut src);
        let rho_b = random_state(&[("B", 2)], &mut src);
        let rho = tensor(&[&rho_a, &rho_b]).unwrap();
        let square =
            CommutingSquare::verified(embed_b.clone(), pinch_ab.clone()).unwrap();
        let q_a = RecoveryCandidate::reset(&layout_ab, &["A"], rho_a).unwrap();
        let report = verify_recovery(&q_a, &square, RecoverySide::FromT, &rho).unwrap();
        prod_worst = prod_worst
            .max(report.state_deviation)
            .max(report.corner_deviation);
    }
    out.push(CheckResult {
        name: "algebra/recovery_bipartite_product".into(),
        passed: prod_worst <= 1e-9,
        details: format!("worst deviation {prod_worst:.3e}, {rec_rounds} states"),
    });

    // Pinching ignores the rotations its generator produces.
    let mut rot_worst = 0.0_f64;
    for _ in 0..samples {
        let rho = random_state(&[("A", 2), ("B", 2)], &mut src);
        let pinch = pinching_from_generator(rho.layout(), &g).unwrap();
        let angle = src.uniform() * std::f64::consts::TAU;
        let rotated = apply_unitary(&rho, &g.rotation(angle), &["A"]).unwrap();
        rot_worst = rot_worst.max(max_abs_diff(
            pinch.apply(&rotated).unwrap().matrix(),
            pinch.apply(&rho).unwrap().matrix(),
        ));
    }
    out.push(check("algebra/pinching_ignores_generated_rotations", rot_worst, 1e-10, samples));

    // Support never escapes the pinched state.
    let mut support_ok = true;
    for _ in 0..samples {
        let rho = random_state(&[("A", 2), ("B", 2)], &mut src);
        let pinch = make_pinching(rho.layout(), "A", &random_basis(2, &mut src)).unwrap();
        let image = pinch.apply(&rho).unwrap();
        if !relative_entropy(&rho, &image).unwrap().is_finite() {
            support_ok = false;
        }
    }
    out.push(CheckResult {
        name: "algebra/support_contained_in_pinched_support".into(),
        passed: support_ok,
        details: format!("relative entropy finite on {samples} samples"),
    });

    out
}

fn identity_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut src = SeededSource::new(seed, "verify/identities");
    let mut additivity = 0.0_f64;
    let mut pinch_gain = 0.0_f64;
    let mut psi_to_kappa = 0.0_f64;
    for i in 0..samples {
        let game = if i % 2 == 0 {
            random_game(&[("A", 2), ("B1", 2), ("B2", 2)], 2 + i % 3, &mut src)
        } else {
            random_game(&[("A", 2), ("B", 2)], 2 + i % 4, &mut src)
        };
        additivity = additivity.max(kappa_register_additivity_residual(&game).unwrap());
        let block: Vec<&str> = match game.kind() {
            GameKind::Tripartite => vec!["A", "B1"],
            GameKind::Bipartite => vec!["A", "B"],
        };
        pinch_gain = pinch_gain.max(pinch_gain_identity_residual(&game, &block).unwrap());

        let psi = build_psi(&game).unwrap();
        let kappa = build_kappa(&game).unwrap();
        let pinched = register_pinching(&game).unwrap().apply(&psi).unwrap();
        psi_to_kappa = psi_to_kappa.max(max_abs_diff(pinched.matrix(), kappa.matrix()));
    }

    let mut prop4_worst = 0.0_f64;
    let mut complementary = 0.0_f64;
    for _ in 0..samples {
        let rho = random_state(&[("A", 2), ("B", 2)], &mut src);
        let pinch = make_pinching(rho.layout(), "A", &random_basis(2, &mut src)).unwrap();
        let report = verify_prop4(&rho, &pinch).unwrap();
        prop4_worst = prop4_worst.max(report.deviation);

        let dilation = pinching_stinespring(&pinch, "E").unwrap();
        let dilated = dilation.dilate(&rho).unwrap();
        let env = partial_trace(&dilated, &["E", "B"]).unwrap();
        let sys = pinch.apply(&rho).unwrap();
        complementary = complementary.max(max_abs_diff(env.matrix(), sys.matrix()));
    }

    vec![
        check("identities/kappa_register_entropy_additivity", additivity, 1e-9, samples),
        check("identities/pinch_entropy_gain_equals_relative_entropy", pinch_gain, 1e-9, samples),
        check("identities/register_pinched_psi_equals_kappa", psi_to_kappa, 1e-12, samples),
        check("identities/asymmetry_dual_formulas_agree", prop4_worst, 1e-9, samples),
        check("identities/pinching_complementary_channel_matches", complementary, 1e-12, samples),
    ]
}

fn games_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut src = SeededSource::new(seed, "verify/games");
    let mut dominance = f64::INFINITY;
    let mut chain = f64::INFINITY;
    let mut coles_low = f64::INFINITY;
    let mut shannon = 0.0_f64;
    for i in 0..samples {
        let b1_dim = if i % 3 == 0 { 1 } else { 2 };
        let game = random_game(&[("A", 2), ("B1", b1_dim), ("B2", 2)], 2 + i % 5, &mut src);
        let report = tripartite_report(&game).unwrap();
        let thm1 = report.rhs(BoundVariant::Thm1).unwrap();
        let first = report.rhs(BoundVariant::Thm1First).unwrap();
        dominance = dominance.min(report.lhs - thm1);
        chain = chain.min(thm1 - first);
        if let Some(coles) = report.rhs(BoundVariant::ColesTripartite) {
            coles_low = coles_low.min(report.lhs - coles);
        }
        if let Some(coles) = report.rhs(BoundVariant::ColesBipartiteSpecial) {
            chain = chain.min(thm1 - coles);
        }
        shannon =
            shannon.max((report.term("s_r_kappa").unwrap() - game.ensemble().shannon()).abs());
    }

    let mut pure_gap = 0.0_f64;
    let mut product_gap = 0.0_f64;
    let mut bi_gap = 0.0_f64;
    let sat_rounds = samples.clamp(5, 25);
    for _ in 0..sat_rounds {
        let layout = SubsystemLayout::new([("A", 2), ("B1", 2), ("B2", 2)]).unwrap();
        let psi = haar_pure(layout, &mut src).unwrap().to_density();
        let ens = RotationEnsemble::uniform(random_angles(6, &mut src).unwrap()).unwrap();
        let game = GameInstance::new(psi, Generator::pauli_x("A"), ens).unwrap();
        let report = tripartite_report(&game).unwrap();
        pure_gap = pure_gap.max(report.gap(BoundVariant::Thm1).unwrap().abs());
        pure_gap = pure_gap.max(report.gap(BoundVariant::Thm1First).unwrap().abs());

        let left = random_state(&[("A", 2), ("B1", 2)], &mut src);
        let right = random_state(&[("B2", 2)], &mut src);
        let product = tensor(&[&left, &right]).unwrap();
        let ens = RotationEnsemble::uniform(random_angles(4, &mut src).unwrap()).unwrap();
        let game = GameInstance::new(product, Generator::pauli_x("A"), ens).unwrap();
        let report = tripartite_report(&game).unwrap();
        product_gap = product_gap.max(report.gap(BoundVariant::Thm1).unwrap().abs());

        let rho_a = random_state(&[("A", 2)], &mut src);
        let rho_b = random_state(&[("B", 2)], &mut src);
        let prod = tensor(&[&rho_a, &rho_b]).unwrap();
        let ens = RotationEnsemble::uniform(random_angles(3, &mut src).unwrap()).unwrap();
        let game = GameInstance::new(prod, Generator::pauli_x("A"), ens).unwrap();
        let report = bipartite_report(&game).unwrap();
        bi_gap = bi_gap.max(report.gap(BoundVariant::Thm2).unwrap().abs());
    }

    // The maximally entangled example: both sides vanish and κ = ω is the
    // classical pair state.
    let bell = {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let mut v = CVector::zeros(4);
        v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[3] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        crate::qstate::PureState::new(layout, v).unwrap().to_density()
    };
    let ens = RotationEnsemble::uniform(vec![0.0, std::f64::consts::FRAC_PI_2]).unwrap();
    let game = GameInstance::new(bell, Generator::pauli_z("A"), ens).unwrap();
    let report = bipartite_report(&game).unwrap();
    let kappa_ab = partial_trace(&build_kappa(&game).unwrap(), &["A", "B"]).unwrap();
    let omega = build_omega(&game).unwrap();
    let mut pair = CMatrix::zeros(4, 4);
    pair[(0, 0)] = Complex64::new(0.5, 0.0);
    pair[(3, 3)] = Complex64::new(0.5, 0.0);
    let bell_dev = report
        .lhs
        .abs()
        .max(report.rhs(BoundVariant::Thm2).unwrap().abs())
        .max(max_abs_diff(kappa_ab.matrix(), &pair) * 1e3)
        .max(max_abs_diff(omega.matrix(), &pair) * 1e3);

    vec![
        check_slack("games/uncertainty_dominates_main_bound", dominance, 1e-9, samples),
        check_slack("games/main_bound_dominates_partial_bounds", chain, 1e-12, samples),
        check_slack("games/uniform_uncertainty_exceeds_log_r", coles_low, 1e-9, samples),
        check("games/register_entropy_is_shannon", shannon, 1e-12, samples),
        check("games/pure_states_saturate", pure_gap, 1e-8, sat_rounds),
        check("games/product_states_saturate", product_gap, 1e-8, sat_rounds),
        check("games/bipartite_products_saturate", bi_gap, 1e-8, sat_rounds),
        check("games/maximally_entangled_example", bell_dev, 1e-9, 1),
    ]
}

fn ensembles_checks(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut determinism_ok = true;
    {
        let layout = SubsystemLayout::new([("A", 4)]).unwrap();
        let mut a = SeededSource::new(seed, "det");
        let mut b = SeededSource::new(seed, "det");
        let ra = ginibre_mixed(layout.clone(), 4, &mut a).unwrap();
        let rb = ginibre_mixed(layout, 4, &mut b).unwrap();
        if max_abs_diff(ra.matrix(), rb.matrix()) != 0.0 {
            determinism_ok = false;
        }
        let mut c = SeededSource::new(seed, "angles");
        let mut d = SeededSource::new(seed, "angles");
        if random_angles(8, &mut c).unwrap() != random_angles(8, &mut d).unwrap() {
            determinism_ok = false;
        }
    }

    let decorrelation_ok = {
        let mut first = SeededSource::new(seed, "angles");
        let baseline = random_angles(4, &mut first).unwrap();
        let mut states = SeededSource::new(seed, "states");
        let layout = SubsystemLayout::new([("A", 8)]).unwrap();
        let _ = ginibre_mixed(layout, 8, &mut states).unwrap();
        let mut second = SeededSource::new(seed, "angles");
        baseline == random_angles(4, &mut second).unwrap()
    };

    let mut src = SeededSource::new(seed, "verify/ensembles");
    let mut state_ok = true;
    for _ in 0..samples {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        // Construction already validates trace, Hermiticity and positivity;
        // a failure would surface as an error here.
        if ginibre_mixed(layout.clone(), 4, &mut src).is_err()
            || haar_pure(layout, &mut src).is_err()
        {
            state_ok = false;
        }
    }

    let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
    let draws = 10_000;
    let mut total = 0.0;
    for _ in 0..draws {
        let psi = haar_pure(layout.clone(), &mut src).unwrap();
        let reduced = partial_trace(&psi.to_density(), &["A"]).unwrap();
        total += reduced.purity();
    }
    let mean_purity = total / draws as f64;

    let angle_draws = 100_000;
    let angles = random_angles(angle_draws, &mut src).unwrap();
    let mean_angle: f64 = angles.iter().sum::<f64>() / angle_draws as f64;

    vec![
        CheckResult {
            name: "ensembles/seeded_streams_are_deterministic".into(),
            passed: determinism_ok,
            details: "identical (seed, stream) reproduce identical draws".into(),
        },
        CheckResult {
            name: "ensembles/named_streams_decorrelate".into(),
            passed: decorrelation_ok,
            details: "angle stream unaffected by state-stream draws".into(),
        },
        CheckResult {
            name: "ensembles/generated_states_are_valid".into(),
            passed: state_ok,
            details: format!("{samples} Ginibre and Haar draws validated"),
        },
        check(
            "ensembles/mean_reduced_purity_matches_ensemble_average",
            (mean_purity - 0.8).abs(),
            0.02,
            draws,
        ),
        check(
            "ensembles/mean_angle_matches_uniform",
            (mean_angle - std::f64::consts::PI).abs(),
            0.02,
            angle_draws,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_with_modest_samples() {
        for suite in suite_names() {
            if suite == "all" {
                continue;
            }
            let report = run_verify(suite, 20, 11).unwrap();
            let failed: Vec<String> = report
                .failures()
                .map(|f| format!("{} ({})", f.name, f.details))
                .collect();
            assert!(failed.is_empty(), "{suite}: {failed:?}");
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_verify("nope", 10, 1), Err(Error::Config(_))));
        assert!(run_verify("qstate", 0, 1).is_err());
    }

    #[test]
    fn injected_fault_suite_fails() {
        let report = run_verify("__inject-fault", 1, 1).unwrap();
        assert!(!report.passed());
    }
}
