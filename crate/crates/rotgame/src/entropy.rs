//! Entropic functionals, base-2 logarithms throughout (values in bits).
//!
//! Relative entropy is evaluated in the eigenbasis of the second argument
//! with the first transformed once, rather than through a generic matrix
//! logarithm of a near-singular operator.

use crate::algebra::ConditionalExpectation;
use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;
use crate::qstate::{partial_trace, DensityMatrix};

/// Eigenvalues below this are treated as exact zeros, both for 0·log 0
/// and for support detection.
pub const EIGENVALUE_CLIP: f64 = 1e-12;

const ASYMMETRY_CROSS_CHECK_TOL: f64 = 1e-9;

/// A scalar entropy in bits. Only relative entropy with a support violation
/// is non-finite; every other functional returns a finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    value: f64,
    finite: bool,
}

impl EntropyValue {
    pub(crate) fn finite(value: f64) -> Self {
        Self { value, finite: true }
    }

    pub(crate) fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            finite: false,
        }
    }

    /// Value in bits; +∞ for a support violation.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }

    /// Finite value or an error for the +∞ case.
    pub fn expect_finite(&self) -> Result<f64> {
        if self.finite {
            Ok(self.value)
        } else {
            Err(Error::InfiniteRelativeEntropy)
        }
    }
}

impl std::fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.finite {
            write!(f, "{}", self.value)
        } else {
            write!(f, "inf")
        }
    }
}

fn shannon_from_eigenvalues(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > EIGENVALUE_CLIP)
        .map(|&p| -p * p.log2())
        .sum()
}

/// S(ρ) = −Tr ρ log₂ ρ.
pub fn von_neumann_entropy(state: &DensityMatrix) -> EntropyValue {
    let eig = eig_hermitian(state.matrix()).expect("density matrix is Hermitian");
    EntropyValue::finite(shannon_from_eigenvalues(&eig.values))
}

fn marginal_entropy(state: &DensityMatrix, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    if labels.len() == state.layout().len() {
        // Marginal over everything is the state itself.
        return Ok(von_neumann_entropy(state).value());
    }
    let marg = partial_trace(state, labels)?;
    Ok(von_neumann_entropy(&marg).value())
}

fn check_disjoint(x: &[&str], y: &[&str]) -> Result<()> {
    for label in x {
        if y.contains(label) {
            return Err(Error::OverlappingLabels(label.to_string()));
        }
    }
    Ok(())
}

/// S(target|condition) = S(target ∪ condition) − S(condition).
pub fn conditional_entropy(
    state: &DensityMatrix,
    target: &[&str],
    condition: &[&str],
) -> Result<EntropyValue> {
    check_disjoint(target, condition)?;
    let mut joint: Vec<&str> = target.to_vec();
    joint.extend_from_slice(condition);
    let s_joint = marginal_entropy(state, &joint)?;
    let s_cond = marginal_entropy(state, condition)?;
    Ok(EntropyValue::finite(s_joint - s_cond))
}

/// I(X:Y) = S(X) + S(Y) − S(XY).
pub fn mutual_information(state: &DensityMatrix, x: &[&str], y: &[&str]) -> Result<EntropyValue> {
    check_disjoint(x, y)?;
    let mut joint: Vec<&str> = x.to_vec();
    joint.extend_from_slice(y);
    let s_x = marginal_entropy(state, x)?;
    let s_y = marginal_entropy(state, y)?;
    let s_xy = marginal_entropy(state, &joint)?;
    Ok(EntropyValue::finite(s_x + s_y - s_xy))
}

/// D(ρ‖σ) = Tr ρ(log₂ρ − log₂σ) on the support of σ; +∞ when the support
/// of ρ escapes the support of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    rho.same_layout(sigma)?;
    let sig = eig_hermitian(sigma.matrix())?;
    // ρ in the eigenbasis of σ; only the diagonal is needed.
    let rotated = sig.vectors.adjoint() * rho.matrix() * &sig.vectors;
    let mut off_support_weight = 0.0;
    let mut cross = 0.0;
    for (i, &lambda) in sig.values.iter().enumerate() {
        let weight = rotated[(i, i)].re;
        if lambda > EIGENVALUE_CLIP {
            cross += weight * lambda.log2();
        } else {
            off_support_weight += weight;
        }
    }
    if off_support_weight > EIGENVALUE_CLIP {
        return Ok(EntropyValue::infinite());
    }
    let s_rho = von_neumann_entropy(rho).value();
    Ok(EntropyValue::finite(-s_rho - cross))
}

/// D^N(ρ) = D(ρ‖E(ρ)), cross-checked against the entropy gain
/// S(E(ρ)) − S(ρ); the two routes must agree within 1e-9.
pub fn asymmetry_measure(
    rho: &DensityMatrix,
    expectation: &ConditionalExpectation,
) -> Result<EntropyValue> {
    let image = expectation.apply(rho)?;
    let d = relative_entropy(rho, &image)?.expect_finite()?;
    let gain = von_neumann_entropy(&image).value() - von_neumann_entropy(rho).value();
    let dev = (d - gain).abs();
    if dev > ASYMMETRY_CROSS_CHECK_TOL {
        return Err(Error::CrossCheckFailed {
            context: "asymmetry measure: relative entropy vs entropy gain",
            deviation: dev,
            tolerance: ASYMMETRY_CROSS_CHECK_TOL,
        });
    }
    Ok(EntropyValue::finite(d))
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    shannon_from_eigenvalues(probs)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use super::*;

    fn complex(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }
    use crate::linalg::{identity, CMatrix};
    use crate::qstate::test_states::*;
    use crate::qstate::{apply_unitary, tensor, Generator, SubsystemLayout};
    use rand::{Rng, SeedableRng};

    fn random_density(labels: &[(&str, usize)], seed: u64) -> DensityMatrix {
        let layout = SubsystemLayout::new(labels.iter().map(|&(l, d)| (l, d))).unwrap();
        let d = layout.total_dim();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let g = &m * m.adjoint();
        let tr = g.diagonal().sum().re;
        DensityMatrix::new(layout, g.scale(1.0 / tr)).unwrap()
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        assert!(von_neumann_entropy(&bell("A", "B")).value().abs() < 1e-12);
        assert!(von_neumann_entropy(&ket0("A")).value().abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_entropy_is_log_dim() {
        let layout = SubsystemLayout::new([("A", 8)]).unwrap();
        let rho = DensityMatrix::maximally_mixed(layout);
        assert!((von_neumann_entropy(&rho).value() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_quarter_three_quarter() {
        let layout = SubsystemLayout::new([("A", 2)]).unwrap();
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = complex(0.25);
        m[(1, 1)] = complex(0.75);
        let rho = DensityMatrix::new(layout, m).unwrap();
        // −(1/4)log₂(1/4) − (3/4)log₂(3/4)
        let expect = 0.25 * 2.0 + 0.75 * (4.0_f64 / 3.0).log2();
        assert!((von_neumann_entropy(&rho).value() - expect).abs() < 1e-9);
        assert!((expect - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn bell_conditional_entropy_is_minus_one() {
        let s = conditional_entropy(&bell("A", "B"), &["A"], &["B"]).unwrap();
        assert!((s.value() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_conditional_entropy_is_marginal_entropy() {
        let rho = random_density(&[("A", 2)], 1);
        let sigma = random_density(&[("B", 3)], 2);
        let both = tensor(&[&rho, &sigma]).unwrap();
        let s_cond = conditional_entropy(&both, &["A"], &["B"]).unwrap();
        let s_a = von_neumann_entropy(&rho).value();
        assert!((s_cond.value() - s_a).abs() < 1e-10);
    }

    #[test]
    fn classically_correlated_conditional_entropy_is_zero() {
        let s = conditional_entropy(&classically_correlated("A", "B"), &["A"], &["B"]).unwrap();
        assert!(s.value().abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_rejects_overlap() {
        let rho = random_density(&[("A", 2), ("B", 2)], 3);
        assert!(matches!(
            conditional_entropy(&rho, &["A"], &["A", "B"]),
            Err(Error::OverlappingLabels(_))
        ));
    }

    #[test]
    fn mutual_information_cases() {
        let product = tensor(&[
            &random_density(&[("A", 2)], 4),
            &random_density(&[("B", 2)], 5),
        ])
        .unwrap();
        assert!(mutual_information(&product, &["A"], &["B"])
            .unwrap()
            .value()
            .abs()
            < 1e-10);
        let i_bell = mutual_information(&bell("A", "B"), &["A"], &["B"]).unwrap();
        assert!((i_bell.value() - 2.0).abs() < 1e-12);
        let i_cc = mutual_information(&classically_correlated("A", "B"), &["A"], &["B"]).unwrap();
        assert!((i_cc.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_of_state_with_itself_is_zero() {
        let rho = random_density(&[("A", 3)], 6);
        let d = relative_entropy(&rho, &rho).unwrap();
        assert!(d.value().abs() < 1e-10);
    }

    #[test]
    fn relative_entropy_pure_vs_maximally_mixed_is_one_bit() {
        let rho = ket0("A");
        let mixed = DensityMatrix::maximally_mixed(rho.layout().clone());
        let d = relative_entropy(&rho, &mixed).unwrap();
        assert!((d.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_orthogonal_supports_is_infinite() {
        let d = relative_entropy(&ket0("A"), &ket1("A")).unwrap();
        assert!(!d.is_finite());
        assert!(d.expect_finite().is_err());
    }

    #[test]
    fn relative_entropy_rejects_layout_mismatch() {
        let rho = random_density(&[("A", 2)], 7);
        let sigma = random_density(&[("B", 2)], 8);
        assert!(relative_entropy(&rho, &sigma).is_err());
    }

    #[test]
    fn relative_entropy_nonnegative_on_random_pairs() {
        for seed in 0..20 {
            let rho = random_density(&[("A", 4)], 100 + seed);
            let sigma = random_density(&[("A", 4)], 200 + seed);
            let d = relative_entropy(&rho, &sigma).unwrap();
            assert!(d.value() >= -1e-10, "seed {seed}: D = {}", d.value());
        }
    }

    #[test]
    fn entropy_additive_over_tensor_products() {
        let rho = random_density(&[("A", 2)], 9);
        let sigma = random_density(&[("B", 3)], 10);
        let both = tensor(&[&rho, &sigma]).unwrap();
        let lhs = von_neumann_entropy(&both).value();
        let rhs = von_neumann_entropy(&rho).value() + von_neumann_entropy(&sigma).value();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn entropy_invariant_under_unitary() {
        let rho = random_density(&[("A", 2), ("B", 2)], 11);
        let g = Generator::pauli_x("A");
        let rotated = apply_unitary(&rho, &g.rotation(0.9), &["A"]).unwrap();
        let before = von_neumann_entropy(&rho).value();
        let after = von_neumann_entropy(&rotated).value();
        assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn strong_subadditivity_on_random_tripartite_states() {
        for seed in 0..10 {
            let rho = random_density(&[("A", 2), ("B", 2), ("C", 2)], 300 + seed);
            let s_ab = conditional_entropy(&rho, &["A"], &["B"]).unwrap().value();
            let s_abc = conditional_entropy(&rho, &["A"], &["B", "C"])
                .unwrap()
                .value();
            assert!(s_abc <= s_ab + 1e-9, "seed {seed}: SSA violated");
        }
    }

    #[test]
    fn shannon_entropy_matches_uniform() {
        assert!((shannon_entropy(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!((shannon_entropy(&[1.0, 0.0]) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_entropy_handles_identity_keep() {
        let rho = random_density(&[("A", 2), ("B", 2)], 12);
        let direct = von_neumann_entropy(&rho).value();
        let via_cond = conditional_entropy(&rho, &["A", "B"], &[]).unwrap().value();
        assert!((direct - via_cond).abs() < 1e-12);
        let _ = identity(2);
    }
}
