//! Guessing-game state constructions and evaluation of all bound variants.
//!
//! A game fixes a shared state ρ on (A, B1, B2) or (A, B), a generator G on
//! A and a rotation ensemble {r_k, p_k}. The two post-protocol states are
//!
//!   κ = Σ_k p_k |r_k⟩⟨r_k| ⊗ e^{−iGr_k} ρ e^{iGr_k}   (rotation branch)
//!   ω = pinching of ρ on A in the eigenbasis of G      (measurement branch)
//!
//! and ψ is the coherent version of κ, with cross terms
//! √(p_k p_j)|r_k⟩⟨r_j| ⊗ e^{−iGr_k} ρ e^{iGr_j}.

use num_complex::Complex64;

use crate::algebra::{make_pinching, pinching_from_generator};
use crate::entropy::{
    conditional_entropy, mutual_information, relative_entropy, shannon_entropy,
    von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, CMatrix, CVector};
use crate::qstate::{partial_trace, tensor, DensityMatrix, Generator, SubsystemLayout};

const PROB_SUM_TOL: f64 = 1e-12;
const GAP_TOL: f64 = 1e-9;
const SATURATION_TOL: f64 = 1e-8;
const STRUCTURE_TOL: f64 = 1e-9;

/// Rotation angles {r_k} with probabilities {p_k}.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationEnsemble {
    angles: Vec<f64>,
    probs: Vec<f64>,
}

impl RotationEnsemble {
    pub fn new(angles: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || angles.len() != probs.len() {
            return Err(Error::InvalidProbabilities(format!(
                "need equally many angles and probabilities (>= 1), got {} and {}",
                angles.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidProbabilities(
                "probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        for i in 0..angles.len() {
            for j in i + 1..angles.len() {
                if angles[i] == angles[j] {
                    return Err(Error::DuplicateAngles);
                }
            }
        }
        Ok(Self { angles, probs })
    }

    pub fn uniform(angles: Vec<f64>) -> Result<Self> {
        let n = angles.len();
        if n == 0 {
            return Err(Error::InvalidProbabilities("need at least one angle".into()));
        }
        Self::new(angles, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_uniform(&self) -> bool {
        let p = 1.0 / self.len() as f64;
        self.probs.iter().all(|&q| (q - p).abs() <= PROB_SUM_TOL)
    }

    /// H({p_k}) in bits.
    pub fn shannon(&self) -> f64 {
        shannon_entropy(&self.probs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Tripartite,
    Bipartite,
}

impl GameKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GameKind::Tripartite => "tripartite",
            GameKind::Bipartite => "bipartite",
        }
    }
}

/// A fully specified guessing-game instance.
///
/// The shared state must live on the conventional layouts (A, B1, B2) for
/// the tripartite game or (A, B) for the bipartite one; the generator acts
/// on A and the rotation register label (default "R") is prepended by the
/// state constructions.
#[derive(Debug, Clone)]
pub struct GameInstance {
    rho: DensityMatrix,
    generator: Generator,
    ensemble: RotationEnsemble,
    r_label: String,
    kind: GameKind,
}

impl GameInstance {
    pub fn new(
        rho: DensityMatrix,
        generator: Generator,
        ensemble: RotationEnsemble,
    ) -> Result<Self> {
        Self::with_r_label(rho, generator, ensemble, "R")
    }

    pub fn with_r_label(
        rho: DensityMatrix,
        generator: Generator,
        ensemble: RotationEnsemble,
        r_label: &str,
    ) -> Result<Self> {
        let labels: Vec<&str> = rho.layout().labels().collect();
        let kind = match labels.as_slice() {
            ["A", "B1", "B2"] => GameKind::Tripartite,
            ["A", "B"] => GameKind::Bipartite,
            other => {
                return Err(Error::LayoutMismatch(format!(
                    "expected labels (A, B1, B2) or (A, B), got {other:?}"
                )))
            }
        };
        if generator.target() != "A" {
            return Err(Error::UnknownLabel(format!(
                "generator must act on A, targets {}",
                generator.target()
            )));
        }
        if generator.dim() != rho.layout().dim_of("A")? {
            return Err(Error::DimensionMismatch {
                expected: rho.layout().dim_of("A")?,
                actual: generator.dim(),
            });
        }
        if rho.layout().contains(r_label) {
            return Err(Error::DuplicateLabel(r_label.to_string()));
        }
        Ok(Self {
            rho,
            generator,
            ensemble,
            r_label: r_label.to_string(),
            kind,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn ensemble(&self) -> &RotationEnsemble {
        &self.ensemble
    }

    pub fn r_label(&self) -> &str {
        &self.r_label
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    /// Layout of κ and ψ: the rotation register followed by ρ's layout.
    pub fn extended_layout(&self) -> Result<SubsystemLayout> {
        self.rho.layout().insert(0, &self.r_label, self.ensemble.len())
    }

    /// e^{−iGr_k} embedded on A inside ρ's full space, one per angle.
    fn rotations(&self) -> Result<Vec<CMatrix>> {
        self.ensemble
            .angles()
            .iter()
            .map(|&r| {
                crate::qstate::embed_operator(
                    self.rho.layout(),
                    &self.generator.rotation(r),
                    &["A"],
                )
            })
            .collect()
    }
}

/// Block-diagonal control U = Σ_k |r_k⟩⟨r_k| ⊗ e^{−iGr_k} on R ⊗ A.
pub fn control_unitary(ensemble: &RotationEnsemble, generator: &Generator) -> CMatrix {
    let n = ensemble.len();
    let d = generator.dim();
    let mut u = CMatrix::zeros(n * d, n * d);
    for (k, &angle) in ensemble.angles().iter().enumerate() {
        let rot = generator.rotation(angle);
        u.view_mut((k * d, k * d), (d, d)).copy_from(&rot);
    }
    u
}

/// κ = Σ_k p_k |r_k⟩⟨r_k| ⊗ e^{−iGr_k} ρ e^{iGr_k}, block-diagonal in R.
pub fn build_kappa(game: &GameInstance) -> Result<DensityMatrix> {
    let layout = game.extended_layout()?;
    let d = game.rho.dim();
    let n = game.ensemble.len();
    let mut m = CMatrix::zeros(n * d, n * d);
    for (k, rot) in game.rotations()?.iter().enumerate() {
        let block = rot * game.rho.matrix() * rot.adjoint();
        m.view_mut((k * d, k * d), (d, d))
            .copy_from(&block.scale(game.ensemble.probs()[k]));
    }
    DensityMatrix::new(layout, m)
}

/// ω = pinching of ρ on A in the eigenbasis of G.
pub fn build_omega(game: &GameInstance) -> Result<DensityMatrix> {
    let pinch = pinching_from_generator(game.rho.layout(), &game.generator)?;
    pinch.apply(&game.rho)
}

/// ψ = U(|Ω⟩⟨Ω| ⊗ ρ)U† with |Ω⟩ = Σ_k √p_k |r_k⟩: the coherent-register
/// version of κ, with cross blocks √(p_k p_j) e^{−iGr_k} ρ e^{iGr_j}.
pub fn build_psi(game: &GameInstance) -> Result<DensityMatrix> {
    let layout = game.extended_layout()?;
    let d = game.rho.dim();
    let n = game.ensemble.len();
    let rotations = game.rotations()?;
    let rotated: Vec<CMatrix> = rotations.iter().map(|u| u * game.rho.matrix()).collect();
    let probs = game.ensemble.probs();
    let mut m = CMatrix::zeros(n * d, n * d);
    for (k, left) in rotated.iter().enumerate() {
        for (j, rot_j) in rotations.iter().enumerate() {
            let weight = (probs[k] * probs[j]).sqrt();
            let block = (left * rot_j.adjoint()).scale(weight);
            m.view_mut((k * d, j * d), (d, d)).copy_from(&block);
        }
    }
    DensityMatrix::new(layout, m)
}

/// Computational-basis pinching on the rotation register; sends ψ to κ.
pub fn register_pinching(game: &GameInstance) -> Result<crate::algebra::ConditionalExpectation> {
    let layout = game.extended_layout()?;
    let n = game.ensemble.len();
    let basis: Vec<CVector> = (0..n)
        .map(|k| {
            let mut v = CVector::zeros(n);
            v[k] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    make_pinching(&layout, &game.r_label, &basis)
}

/// Named bound variant of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// Tripartite bound with the max term.
    Thm1,
    /// Tripartite bound from the register/measurement square alone.
    Thm1First,
    /// Tripartite bound from the alternative square (raw entropy form).
    Thm1Second,
    /// log|R| baseline, stated for uniform distributions.
    ColesTripartite,
    /// S(R) + D(κ_A‖ω_A) baseline, stated for trivial B1.
    ColesBipartiteSpecial,
    /// Bipartite bound.
    Thm2,
}

impl BoundVariant {
    pub fn key(&self) -> &'static str {
        match self {
            BoundVariant::Thm1 => "thm1",
            BoundVariant::Thm1First => "thm1_first",
            BoundVariant::Thm1Second => "thm1_second",
            BoundVariant::ColesTripartite => "coles_tripartite",
            BoundVariant::ColesBipartiteSpecial => "coles_bipartite_special",
            BoundVariant::Thm2 => "thm2",
        }
    }
}

/// Every named entropy term, the uncertainty (lhs), each applicable
/// right-hand side with its gap, and saturation flags.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub kind: GameKind,
    pub lhs: f64,
    terms: Vec<(&'static str, f64)>,
    rhs: Vec<(BoundVariant, f64)>,
    saturation: Vec<(BoundVariant, bool)>,
}

impl BoundReport {
    pub fn terms(&self) -> &[(&'static str, f64)] {
        &self.terms
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn variants(&self) -> impl Iterator<Item = BoundVariant> + '_ {
        self.rhs.iter().map(|&(v, _)| v)
    }

    pub fn rhs(&self, variant: BoundVariant) -> Option<f64> {
        self.rhs.iter().find(|(v, _)| *v == variant).map(|&(_, x)| x)
    }

    /// lhs − rhs for the variant, when reported.
    pub fn gap(&self, variant: BoundVariant) -> Option<f64> {
        self.rhs(variant).map(|r| self.lhs - r)
    }

    pub fn saturated(&self, variant: BoundVariant) -> Option<bool> {
        self.saturation
            .iter()
            .find(|(v, _)| *v == variant)
            .map(|&(_, s)| s)
    }

    /// Every reported gap must clear −1e-9.
    pub fn validate(&self) -> Result<()> {
        for &(variant, rhs) in &self.rhs {
            let gap = self.lhs - rhs;
            if gap < -GAP_TOL {
                return Err(Error::BoundViolated {
                    context: format!("{} bound", variant.key()),
                    gap,
                    tolerance: GAP_TOL,
                });
            }
        }
        Ok(())
    }
}

fn is_product_across(rho: &DensityMatrix, left: &[&str], right: &[&str]) -> Result<bool> {
    let a = partial_trace(rho, left)?;
    let b = partial_trace(rho, right)?;
    let product = tensor(&[&a, &b])?;
    Ok(max_abs_diff(product.matrix(), rho.matrix()) <= STRUCTURE_TOL)
}

fn is_pure_eigenstate(rho_a: &DensityMatrix, generator: &Generator) -> bool {
    let vecs = generator.eigenvectors();
    (0..generator.dim()).any(|k| {
        let col = vecs.column(k);
        let weight = (col.adjoint() * rho_a.matrix() * col)[(0, 0)];
        weight.re >= 1.0 - STRUCTURE_TOL
    })
}

/// Evaluates the tripartite game: lhs = S(R|AB₁)_κ + S(A|B₂)_ω against the
/// main bound, both intermediate bounds, and the applicable baselines.
pub fn tripartite_report(game: &GameInstance) -> Result<BoundReport> {
    if game.kind != GameKind::Tripartite {
        return Err(Error::LayoutMismatch(
            "tripartite report needs labels (A, B1, B2)".into(),
        ));
    }
    let r = game.r_label.as_str();
    let rho = &game.rho;
    let kappa = build_kappa(game)?;
    let omega = build_omega(game)?;

    let s_r_given_ab1 = conditional_entropy(&kappa, &[r], &["A", "B1"])?.value();
    let s_a_given_b2 = conditional_entropy(&omega, &["A"], &["B2"])?.value();
    let lhs = s_r_given_ab1 + s_a_given_b2;

    let s_r = von_neumann_entropy(&partial_trace(&kappa, &[r])?).value();
    let kappa_ab1 = partial_trace(&kappa, &["A", "B1"])?;
    let omega_ab1 = partial_trace(&omega, &["A", "B1"])?;
    let d_ab1 = relative_entropy(&kappa_ab1, &omega_ab1)?.expect_finite()?;

    let i_a_b1 = mutual_information(&omega, &["A"], &["B1"])?.value();
    let i_b1_b2 = mutual_information(rho, &["B1"], &["B2"])?.value();
    let s_a_given_b1b2 = conditional_entropy(rho, &["A"], &["B1", "B2"])?.value();

    let rhs_first = s_r + d_ab1;
    let extra = i_a_b1 - i_b1_b2 + s_a_given_b1b2;
    let rhs_thm1 = rhs_first + extra.max(0.0);

    // Raw entropy form of the alternative-square bound:
    // S(R) + S(AB₁B₂)_ρ + S(A)_ω − S(AB₁)_κ − S(B₂)_ρ.
    let rhs_second = s_r + von_neumann_entropy(rho).value()
        + von_neumann_entropy(&partial_trace(&omega, &["A"])?).value()
        - von_neumann_entropy(&kappa_ab1).value()
        - von_neumann_entropy(&partial_trace(rho, &["B2"])?).value();

    let mut rhs = vec![
        (BoundVariant::Thm1, rhs_thm1),
        (BoundVariant::Thm1First, rhs_first),
        (BoundVariant::Thm1Second, rhs_second),
    ];
    if game.ensemble.is_uniform() {
        rhs.push((
            BoundVariant::ColesTripartite,
            (game.ensemble.len() as f64).log2(),
        ));
    }
    if rho.layout().dim_of("B1")? == 1 {
        let kappa_a = partial_trace(&kappa, &["A"])?;
        let omega_a = partial_trace(&omega, &["A"])?;
        let d_a = relative_entropy(&kappa_a, &omega_a)?.expect_finite()?;
        rhs.push((BoundVariant::ColesBipartiteSpecial, s_r + d_a));
    }

    let pure = rho.is_pure(STRUCTURE_TOL);
    let product_b2 = is_product_across(rho, &["A", "B1"], &["B2"])?;
    let saturation = vec![
        (
            BoundVariant::Thm1,
            (pure || product_b2) && (lhs - rhs_thm1).abs() <= SATURATION_TOL,
        ),
        (
            BoundVariant::Thm1First,
            pure && (lhs - rhs_first).abs() <= SATURATION_TOL,
        ),
    ];

    let report = BoundReport {
        kind: GameKind::Tripartite,
        lhs,
        terms: vec![
            ("s_r_given_ab1_kappa", s_r_given_ab1),
            ("s_a_given_b2_omega", s_a_given_b2),
            ("s_r_kappa", s_r),
            ("d_kappa_ab1_omega_ab1", d_ab1),
            ("i_a_b1_omega", i_a_b1),
            ("i_b1_b2_rho", i_b1_b2),
            ("s_a_given_b1b2_rho", s_a_given_b1b2),
        ],
        rhs,
        saturation,
    };
    report.validate()?;
    Ok(report)
}

/// Evaluates the bipartite game: lhs = S(R|AB)_κ + S(A|B)_ω against
/// rhs = S(R)_κ + D(κ_A‖ω_A) + S(A|B)_ρ.
pub fn bipartite_report(game: &GameInstance) -> Result<BoundReport> {
    if game.kind != GameKind::Bipartite {
        return Err(Error::LayoutMismatch(
            "bipartite report needs labels (A, B)".into(),
        ));
    }
    let r = game.r_label.as_str();
    let rho = &game.rho;
    let kappa = build_kappa(game)?;
    let omega = build_omega(game)?;

    let s_r_given_ab = conditional_entropy(&kappa, &[r], &["A", "B"])?.value();
    let s_a_given_b_omega = conditional_entropy(&omega, &["A"], &["B"])?.value();
    let lhs = s_r_given_ab + s_a_given_b_omega;

    let s_r = von_neumann_entropy(&partial_trace(&kappa, &[r])?).value();
    let kappa_a = partial_trace(&kappa, &["A"])?;
    let omega_a = partial_trace(&omega, &["A"])?;
    let d_a = relative_entropy(&kappa_a, &omega_a)?.expect_finite()?;
    let s_a_given_b_rho = conditional_entropy(rho, &["A"], &["B"])?.value();

    let rhs_thm2 = s_r + d_a + s_a_given_b_rho;

    let product = is_product_across(rho, &["A"], &["B"])?;
    let rho_a = partial_trace(rho, &["A"])?;
    let eigenstate = is_pure_eigenstate(&rho_a, &game.generator);
    let saturation = vec![(
        BoundVariant::Thm2,
        (product || eigenstate) && (lhs - rhs_thm2).abs() <= SATURATION_TOL,
    )];

    let report = BoundReport {
        kind: GameKind::Bipartite,
        lhs,
        terms: vec![
            ("s_r_given_ab_kappa", s_r_given_ab),
            ("s_a_given_b_omega", s_a_given_b_omega),
            ("s_r_kappa", s_r),
            ("d_kappa_a_omega_a", d_a),
            ("s_a_given_b_rho", s_a_given_b_rho),
        ],
        rhs: vec![(BoundVariant::Thm2, rhs_thm2)],
        saturation,
    };
    report.validate()?;
    Ok(report)
}

/// Residual of S(RA)_κ = S(R)_κ + S(A)_ρ, an exact identity because
/// κ_RA is a controlled rotation of κ_R ⊗ ρ_A.
pub fn kappa_register_additivity_residual(game: &GameInstance) -> Result<f64> {
    let kappa = build_kappa(game)?;
    let s_ra = von_neumann_entropy(&partial_trace(&kappa, &[game.r_label.as_str(), "A"])?).value();
    let s_r = von_neumann_entropy(&partial_trace(&kappa, &[game.r_label.as_str()])?).value();
    let s_a = von_neumann_entropy(&partial_trace(&game.rho, &["A"])?).value();
    Ok((s_ra - s_r - s_a).abs())
}

/// Residual of S(block)_ω − S(block)_κ = D(κ_block‖ω_block), the entropy-gain
/// form of the relative entropy to the pinched state.
pub fn pinch_gain_identity_residual(game: &GameInstance, block: &[&str]) -> Result<f64> {
    let kappa = build_kappa(game)?;
    let omega = build_omega(game)?;
    let kappa_block = partial_trace(&kappa, block)?;
    let omega_block = partial_trace(&omega, block)?;
    let d = relative_entropy(&kappa_block, &omega_block)?.expect_finite()?;
    let gain =
        von_neumann_entropy(&omega_block).value() - von_neumann_entropy(&kappa_block).value();
    Ok((gain - d).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{ginibre_mixed, haar_pure, random_angles, SeededSource};
    use crate::linalg::{identity, unitarity_deviation, ZERO};
    use crate::qstate::test_states::*;
    use crate::qstate::apply_unitary;

    fn angles_02() -> RotationEnsemble {
        RotationEnsemble::uniform(vec![0.0, std::f64::consts::FRAC_PI_2]).unwrap()
    }

    fn bell_game() -> GameInstance {
        let rho = bell("A", "B");
        GameInstance::new(rho, Generator::pauli_z("A"), angles_02()).unwrap()
    }

    fn random_game(labels: &[(&str, usize)], n_angles: usize, seed: u64) -> GameInstance {
        let layout = SubsystemLayout::new(labels.iter().map(|&(l, d)| (l, d))).unwrap();
        let mut src = SeededSource::new(seed, "games-tests");
        let rho = ginibre_mixed(layout, labels.iter().map(|&(_, d)| d).product(), &mut src).unwrap();
        let angles = random_angles(n_angles, &mut src).unwrap();
        GameInstance::new(rho, Generator::pauli_x("A"), RotationEnsemble::uniform(angles).unwrap())
            .unwrap()
    }

    #[test]
    fn ensemble_validation() {
        assert!(RotationEnsemble::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(RotationEnsemble::new(vec![0.0, 1.0], vec![0.6, 0.6]).is_err());
        assert!(RotationEnsemble::new(vec![0.0, 1.0], vec![-0.1, 1.1]).is_err());
        let e = RotationEnsemble::new(vec![0.0, 1.0], vec![0.25, 0.75]).unwrap();
        assert!(!e.is_uniform());
        assert!(angles_02().is_uniform());
    }

    #[test]
    fn control_unitary_structure() {
        let single = RotationEnsemble::uniform(vec![0.0]).unwrap();
        let g = Generator::pauli_z("A");
        let u = control_unitary(&single, &g);
        assert!(max_abs_diff(&u, &identity(2)) < 1e-14);

        let u2 = control_unitary(&angles_02(), &g);
        assert!(max_abs_diff(&u2.view((0, 0), (2, 2)).into_owned(), &identity(2)) < 1e-14);
        let lower = u2.view((2, 2), (2, 2)).into_owned();
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_2),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2),
            ],
        );
        assert!(max_abs_diff(&lower, &expect) < 1e-14);
    }

    #[test]
    fn control_unitary_is_unitary_on_random_ensembles() {
        let mut src = SeededSource::new(1, "angles");
        for n in 2..=5 {
            let ens = RotationEnsemble::uniform(random_angles(n, &mut src).unwrap()).unwrap();
            let u = control_unitary(&ens, &Generator::pauli_x("A"));
            assert!(unitarity_deviation(&u) < 1e-12);
        }
    }

    #[test]
    fn kappa_for_generator_eigenstate_is_product() {
        // ρ_A = |0⟩⟨0| is fixed by σ_z rotations, so κ = diag(p) ⊗ ρ.
        let rho = tensor(&[&ket0("A"), &ket0("B")]).unwrap();
        let game = GameInstance::new(rho.clone(), Generator::pauli_z("A"), angles_02()).unwrap();
        let kappa = build_kappa(&game).unwrap();
        let r_marg = partial_trace(&kappa, &["R"]).unwrap();
        assert!(max_abs_diff(r_marg.matrix(), &identity(2).scale(0.5)) < 1e-14);
        let rest = partial_trace(&kappa, &["A", "B"]).unwrap();
        assert!(max_abs_diff(rest.matrix(), rho.matrix()) < 1e-14);
    }

    #[test]
    fn bell_kappa_and_omega_are_classically_correlated() {
        let game = bell_game();
        let kappa_ab = partial_trace(&build_kappa(&game).unwrap(), &["A", "B"]).unwrap();
        let omega = build_omega(&game).unwrap();
        let expect = classically_correlated("A", "B");
        assert!(max_abs_diff(kappa_ab.matrix(), expect.matrix()) < 1e-12);
        assert!(max_abs_diff(omega.matrix(), expect.matrix()) < 1e-12);
    }

    #[test]
    fn kappa_register_marginal_is_diag_p() {
        let game = random_game(&[("A", 2), ("B", 2)], 3, 2);
        let kappa = build_kappa(&game).unwrap();
        let r = partial_trace(&kappa, &["R"]).unwrap();
        for (k, &p) in game.ensemble().probs().iter().enumerate() {
            assert!((r.matrix()[(k, k)].re - p).abs() < 1e-13);
        }
    }

    #[test]
    fn omega_fixes_states_diagonal_in_generator_basis() {
        let rho = tensor(&[&ket0("A"), &ket0("B")]).unwrap();
        let game = GameInstance::new(rho.clone(), Generator::pauli_z("A"), angles_02()).unwrap();
        let omega = build_omega(&game).unwrap();
        assert!(max_abs_diff(omega.matrix(), rho.matrix()) < 1e-14);
    }

    #[test]
    fn omega_equals_pinched_kappa() {
        for seed in 0..5 {
            let game = random_game(&[("A", 2), ("B", 2)], 4, 100 + seed);
            let kappa_ab = partial_trace(&build_kappa(&game).unwrap(), &["A", "B"]).unwrap();
            let pinch = pinching_from_generator(kappa_ab.layout(), game.generator()).unwrap();
            let pinched = pinch.apply(&kappa_ab).unwrap();
            let omega = build_omega(&game).unwrap();
            assert!(max_abs_diff(pinched.matrix(), omega.matrix()) < 1e-12);
        }
    }

    #[test]
    fn psi_with_single_angle_is_rotated_rho() {
        let rho = bell("A", "B");
        let ens = RotationEnsemble::uniform(vec![0.9]).unwrap();
        let game = GameInstance::new(rho.clone(), Generator::pauli_z("A"), ens).unwrap();
        let psi = build_psi(&game).unwrap();
        let rot = game.generator().rotation(0.9);
        let rotated = apply_unitary(&rho, &rot, &["A"]).unwrap();
        let block = partial_trace(&psi, &["A", "B"]).unwrap();
        assert!(max_abs_diff(block.matrix(), rotated.matrix()) < 1e-13);
    }

    #[test]
    fn psi_matches_control_unitary_route() {
        let game = random_game(&[("A", 2), ("B", 2)], 3, 3);
        let psi = build_psi(&game).unwrap();

        // Independent route: |Ω⟩⟨Ω| ⊗ ρ conjugated by the control unitary.
        let n = game.ensemble().len();
        let omega_vec = CVector::from_iterator(
            n,
            game.ensemble()
                .probs()
                .iter()
                .map(|&p| Complex64::new(p.sqrt(), 0.0)),
        );
        let r_layout = SubsystemLayout::new([("R", n)]).unwrap();
        let r_state = crate::qstate::PureState::new(r_layout, omega_vec)
            .unwrap()
            .to_density();
        let product = tensor(&[&r_state, game.rho()]).unwrap();
        let u = control_unitary(game.ensemble(), game.generator());
        let via_unitary = apply_unitary(&product, &u, &["R", "A"]).unwrap();
        assert!(max_abs_diff(psi.matrix(), via_unitary.matrix()) < 1e-12);
    }

    #[test]
    fn pinching_psi_on_register_yields_kappa() {
        for seed in 0..5 {
            let game = random_game(&[("A", 2), ("B", 2)], 3, 200 + seed);
            let psi = build_psi(&game).unwrap();
            let pinch = register_pinching(&game).unwrap();
            let pinched = pinch.apply(&psi).unwrap();
            let kappa = build_kappa(&game).unwrap();
            assert!(max_abs_diff(pinched.matrix(), kappa.matrix()) < 1e-12);
        }
    }

    #[test]
    fn psi_of_pure_state_is_pure() {
        let mut src = SeededSource::new(4, "haar");
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho = haar_pure(layout, &mut src).unwrap().to_density();
        let ens = RotationEnsemble::uniform(random_angles(3, &mut src).unwrap()).unwrap();
        let game = GameInstance::new(rho, Generator::pauli_x("A"), ens).unwrap();
        let psi = build_psi(&game).unwrap();
        assert!(psi.is_pure(1e-10));
    }

    #[test]
    fn bell_example_lhs_and_rhs_vanish() {
        let report = bipartite_report(&bell_game()).unwrap();
        assert!(report.lhs.abs() < 1e-9, "lhs = {}", report.lhs);
        let rhs = report.rhs(BoundVariant::Thm2).unwrap();
        assert!(rhs.abs() < 1e-9, "rhs = {}", rhs);
        assert!((report.term("s_a_given_b_rho").unwrap() + 1.0).abs() < 1e-12);
        assert!((report.term("s_r_kappa").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_and_eigenstate_bipartite_saturation() {
        let mut src = SeededSource::new(5, "prod");
        let rho_a = ginibre_mixed(SubsystemLayout::new([("A", 2)]).unwrap(), 2, &mut src).unwrap();
        let rho_b = ginibre_mixed(SubsystemLayout::new([("B", 2)]).unwrap(), 2, &mut src).unwrap();
        let product = tensor(&[&rho_a, &rho_b]).unwrap();
        let ens = RotationEnsemble::uniform(random_angles(4, &mut src).unwrap()).unwrap();
        let game = GameInstance::new(product, Generator::pauli_x("A"), ens).unwrap();
        let report = bipartite_report(&game).unwrap();
        assert!(report.gap(BoundVariant::Thm2).unwrap().abs() < 1e-9);
        assert_eq!(report.saturated(BoundVariant::Thm2), Some(true));

        // Pure eigenstate of G: lhs = rhs = S(R).
        let eigen = tensor(&[&ket0("A"), &rho_b]).unwrap();
        let ens2 = RotationEnsemble::new(vec![0.1, 0.7, 2.0], vec![0.5, 0.3, 0.2]).unwrap();
        let game2 = GameInstance::new(eigen, Generator::pauli_z("A"), ens2).unwrap();
        let report2 = bipartite_report(&game2).unwrap();
        assert!((report2.lhs - report2.term("s_r_kappa").unwrap()).abs() < 1e-9);
        assert!(report2.gap(BoundVariant::Thm2).unwrap().abs() < 1e-9);
        assert_eq!(report2.saturated(BoundVariant::Thm2), Some(true));
    }

    #[test]
    fn tripartite_report_on_fully_trivial_memories() {
        // B1, B2 trivial, ρ_A = I/2, G = σ_z, angles {0, π/2}: the
        // uncertainty is 2 bits and the bound meets it.
        let layout = SubsystemLayout::new([("A", 2), ("B1", 1), ("B2", 1)]).unwrap();
        let rho = DensityMatrix::maximally_mixed(layout);
        let game = GameInstance::new(rho, Generator::pauli_z("A"), angles_02()).unwrap();
        let report = tripartite_report(&game).unwrap();
        assert!((report.lhs - 2.0).abs() < 1e-10);
        assert!((report.rhs(BoundVariant::Thm1).unwrap() - 2.0).abs() < 1e-10);
        assert!((report.term("s_r_kappa").unwrap() - 1.0).abs() < 1e-12);
        assert!(report.term("d_kappa_ab1_omega_ab1").unwrap().abs() < 1e-10);
        // Uniform distribution and trivial B1: both baselines present.
        assert!(report.rhs(BoundVariant::ColesTripartite).is_some());
        assert!(report.rhs(BoundVariant::ColesBipartiteSpecial).is_some());
    }

    #[test]
    fn tripartite_pure_state_saturates_both_bounds() {
        let mut src = SeededSource::new(6, "haar");
        let layout = SubsystemLayout::new([("A", 2), ("B1", 2), ("B2", 2)]).unwrap();
        for _ in 0..5 {
            let rho = haar_pure(layout.clone(), &mut src).unwrap().to_density();
            let ens = RotationEnsemble::uniform(random_angles(6, &mut src).unwrap()).unwrap();
            let game = GameInstance::new(rho, Generator::pauli_x("A"), ens).unwrap();
            let report = tripartite_report(&game).unwrap();
            assert!(
                report.gap(BoundVariant::Thm1).unwrap().abs() < 1e-8,
                "gap {}",
                report.gap(BoundVariant::Thm1).unwrap()
            );
            assert!(report.gap(BoundVariant::Thm1First).unwrap().abs() < 1e-8);
            assert_eq!(report.saturated(BoundVariant::Thm1), Some(true));
            assert_eq!(report.saturated(BoundVariant::Thm1First), Some(true));
        }
    }

    #[test]
    fn tripartite_product_state_saturates_main_bound() {
        let mut src = SeededSource::new(7, "prod");
        let ab1 = SubsystemLayout::new([("A", 2), ("B1", 2)]).unwrap();
        let b2 = SubsystemLayout::new([("B2", 2)]).unwrap();
        for _ in 0..5 {
            let left = ginibre_mixed(ab1.clone(), 4, &mut src).unwrap();
            let right = ginibre_mixed(b2.clone(), 2, &mut src).unwrap();
            let rho = tensor(&[&left, &right]).unwrap();
            let ens = RotationEnsemble::uniform(random_angles(4, &mut src).unwrap()).unwrap();
            let game = GameInstance::new(rho, Generator::pauli_x("A"), ens).unwrap();
            let report = tripartite_report(&game).unwrap();
            assert!(report.gap(BoundVariant::Thm1).unwrap().abs() < 1e-8);
            assert_eq!(report.saturated(BoundVariant::Thm1), Some(true));
        }
    }

    #[test]
    fn dominance_chain_on_random_mixed_games() {
        for seed in 0..10 {
            let game = random_game(&[("A", 2), ("B1", 2), ("B2", 2)], 3, 500 + seed);
            let report = tripartite_report(&game).unwrap();
            let thm1 = report.rhs(BoundVariant::Thm1).unwrap();
            let first = report.rhs(BoundVariant::Thm1First).unwrap();
            assert!(report.lhs >= thm1 - 1e-9);
            assert!(thm1 >= first - 1e-12);
            let coles = report.rhs(BoundVariant::ColesTripartite).unwrap();
            assert!(report.lhs >= coles - 1e-9);
            // The two routes to the alternative bound agree.
            let second = report.rhs(BoundVariant::Thm1Second).unwrap();
            let via_terms = first + report.term("i_a_b1_omega").unwrap()
                - report.term("i_b1_b2_rho").unwrap()
                + report.term("s_a_given_b1b2_rho").unwrap();
            assert!(
                (second - via_terms).abs() < 1e-9,
                "raw {second} vs term route {via_terms}"
            );
        }
    }

    #[test]
    fn trivial_b1_dominates_coles_baseline() {
        for seed in 0..10 {
            let game = random_game(&[("A", 2), ("B1", 1), ("B2", 2)], 4, 600 + seed);
            let report = tripartite_report(&game).unwrap();
            let thm1 = report.rhs(BoundVariant::Thm1).unwrap();
            let coles = report.rhs(BoundVariant::ColesBipartiteSpecial).unwrap();
            assert!(thm1 >= coles - 1e-12, "thm1 {thm1} < coles {coles}");
        }
    }

    #[test]
    fn register_entropy_matches_shannon() {
        let ens = RotationEnsemble::new(vec![0.3, 1.7, 4.0], vec![0.2, 0.5, 0.3]).unwrap();
        let mut src = SeededSource::new(8, "state");
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho = ginibre_mixed(layout, 4, &mut src).unwrap();
        let game = GameInstance::new(rho, Generator::pauli_x("A"), ens).unwrap();
        let report = bipartite_report(&game).unwrap();
        assert!(
            (report.term("s_r_kappa").unwrap() - game.ensemble().shannon()).abs() < 1e-12
        );
    }

    #[test]
    fn exact_identities_hold_on_random_games() {
        for seed in 0..5 {
            let game = random_game(&[("A", 2), ("B1", 2), ("B2", 2)], 3, 700 + seed);
            assert!(kappa_register_additivity_residual(&game).unwrap() < 1e-9);
            assert!(pinch_gain_identity_residual(&game, &["A", "B1"]).unwrap() < 1e-9);
        }
        for seed in 0..5 {
            let game = random_game(&[("A", 2), ("B", 2)], 4, 800 + seed);
            assert!(kappa_register_additivity_residual(&game).unwrap() < 1e-9);
            assert!(pinch_gain_identity_residual(&game, &["A", "B"]).unwrap() < 1e-9);
        }
    }

    #[test]
    fn game_construction_rejects_bad_setups() {
        let rho = bell("A", "B");
        // Generator on the wrong label.
        assert!(GameInstance::new(rho.clone(), Generator::pauli_z("B"), angles_02()).is_err());
        // Wrong layout labels.
        let odd = tensor(&[&ket0("X"), &ket0("Y")]).unwrap();
        assert!(GameInstance::new(odd, Generator::pauli_z("A"), angles_02()).is_err());
        // Register label collision.
        assert!(
            GameInstance::with_r_label(rho, Generator::pauli_z("A"), angles_02(), "A").is_err()
        );
    }

    #[test]
    fn degenerate_generator_rejected_in_omega() {
        let rho = bell("A", "B");
        let g = Generator::new("A", identity(2)).unwrap();
        let game = GameInstance::new(rho, g, angles_02()).unwrap();
        assert!(matches!(
            build_omega(&game),
            Err(Error::DegenerateGenerator { .. })
        ));
    }
}
