//! Seeded random generation of states, angles and the θ-parameterized
//! product-state family.
//!
//! Reproducibility contract: a stream is keyed by SHA-256 of the 8-byte
//! little-endian seed followed by the UTF-8 stream name, feeding a
//! ChaCha12 generator. Uniform doubles take the top 53 bits of the next
//! 64-bit word; normal variates come from the Box–Muller transform on two
//! uniforms (the second variate of each pair is cached). Identical
//! (seed, stream, draw index) therefore reproduce identical values, and
//! distinct stream names are decorrelated regardless of draw counts.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{hermitize, trace, CMatrix, CVector};
use crate::qstate::{DensityMatrix, PureState, SubsystemLayout};

/// Deterministic named random stream.
#[derive(Debug, Clone)]
pub struct SeededSource {
    seed: u64,
    stream: String,
    rng: ChaCha12Rng,
    cached_normal: Option<f64>,
}

impl SeededSource {
    pub fn new(seed: u64, stream: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(stream.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        Self {
            seed,
            stream: stream.to_string(),
            rng: ChaCha12Rng::from_seed(key),
            cached_normal: None,
        }
    }

    /// Fresh stream named `{stream}/{suffix}`, keyed by the original seed.
    /// Independent of how many draws this source has already produced.
    pub fn substream(&self, suffix: &str) -> SeededSource {
        SeededSource::new(self.seed, &format!("{}/{}", self.stream, suffix))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> &str {
        &self.stream
    }

    /// Uniform in [0, 1), 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; used where a logarithm follows.
    fn uniform_open(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.cached_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Complex number with independent standard-normal parts.
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }
}

/// Random pure state: a vector of independent complex standard normals,
/// normalized.
pub fn haar_pure(layout: SubsystemLayout, source: &mut SeededSource) -> Result<PureState> {
    let dim = layout.total_dim();
    if dim < 1 {
        return Err(Error::InvalidParameter("haar_pure needs dimension >= 1".into()));
    }
    let mut v = CVector::from_fn(dim, |_, _| source.complex_normal());
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    PureState::new(layout, v)
}

/// Random mixed state ρ = MM†/Tr(MM†) with M a dim×rank complex Gaussian
/// matrix; the numerical rank is at most `rank`.
pub fn ginibre_mixed(
    layout: SubsystemLayout,
    rank: usize,
    source: &mut SeededSource,
) -> Result<DensityMatrix> {
    let dim = layout.total_dim();
    if rank < 1 || rank > dim {
        return Err(Error::InvalidParameter(format!(
            "rank must be in 1..={dim}, got {rank}"
        )));
    }
    let m = CMatrix::from_fn(dim, rank, |_, _| source.complex_normal());
    let g = &m * m.adjoint();
    let tr = trace(&g).re;
    DensityMatrix::new(layout, hermitize(&g).scale(1.0 / tr))
}

/// Convex noise admixture (1−eps)·ρ + eps·η with η full-rank Ginibre.
pub fn mix_noise(rho: &DensityMatrix, eps: f64, source: &mut SeededSource) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "noise weight must lie in [0, 1], got {eps}"
        )));
    }
    if eps == 0.0 {
        return Ok(rho.clone());
    }
    let dim = rho.dim();
    let eta = ginibre_mixed(rho.layout().clone(), dim, source)?;
    let mixed = rho.matrix().scale(1.0 - eps) + eta.matrix().scale(eps);
    DensityMatrix::new(rho.layout().clone(), mixed)
}

/// n angles uniform on [0, 2π), redrawn on collisions closer than 1e-12.
pub fn random_angles(n: usize, source: &mut SeededSource) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::InvalidParameter("need at least one angle".into()));
    }
    let mut angles: Vec<f64> = Vec::with_capacity(n);
    while angles.len() < n {
        let candidate = source.uniform() * std::f64::consts::TAU;
        if angles.iter().all(|a| (a - candidate).abs() >= 1e-12) {
            angles.push(candidate);
        }
    }
    Ok(angles)
}

/// |ψ(θ)⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
pub fn theta_qubit(theta: f64) -> Result<CVector> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, π], got {theta}"
        )));
    }
    Ok(CVector::from_vec(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::new((theta / 2.0).sin(), 0.0),
    ]))
}

/// Product state |ψ(θ)⟩⟨ψ(θ)|^⊗parties on each qubit part of the layout.
/// Dimension-1 parts carry the trivial factor; other dimensions are
/// rejected.
pub fn theta_family_on(theta: f64, layout: &SubsystemLayout) -> Result<DensityMatrix> {
    let qubit = theta_qubit(theta)?;
    let mut vector = CVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
    for (label, dim) in layout.parts() {
        match dim {
            1 => {}
            2 => {
                vector = vec_kron(&vector, &qubit);
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "theta family needs qubit (or trivial) parts, `{label}` has dimension {dim}"
                )))
            }
        }
    }
    Ok(PureState::new(layout.clone(), vector)?.to_density())
}

/// Tensor power with the conventional labels: (A, B) for two parties,
/// (A, B1, …, B{n−1}) otherwise.
pub fn theta_family(theta: f64, parties: usize) -> Result<DensityMatrix> {
    if parties < 2 {
        return Err(Error::InvalidParameter(
            "theta family needs at least two parties".into(),
        ));
    }
    let labels: Vec<String> = if parties == 2 {
        vec!["A".into(), "B".into()]
    } else {
        let mut l = vec!["A".to_string()];
        l.extend((1..parties).map(|i| format!("B{i}")));
        l
    };
    let layout = SubsystemLayout::new(labels.into_iter().map(|l| (l, 2usize)))?;
    theta_family_on(theta, &layout)
}

fn vec_kron(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::qstate::partial_trace;

    fn layout(dim: usize) -> SubsystemLayout {
        SubsystemLayout::new([("A", dim)]).unwrap()
    }

    #[test]
    fn identical_seed_and_stream_reproduce_draws() {
        let mut a = SeededSource::new(42, "states");
        let mut b = SeededSource::new(42, "states");
        for _ in 0..100 {
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn distinct_streams_are_independent_of_draw_counts() {
        let mut angles1 = SeededSource::new(9, "angles");
        let first = random_angles(4, &mut angles1).unwrap();

        // Interleave heavy state draws; the angle stream must not notice.
        let mut states = SeededSource::new(9, "states");
        let _ = ginibre_mixed(layout(8), 8, &mut states).unwrap();
        let mut angles2 = SeededSource::new(9, "angles");
        let second = random_angles(4, &mut angles2).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn haar_pure_is_normalized() {
        let mut src = SeededSource::new(1, "haar");
        for _ in 0..200 {
            let psi = haar_pure(layout(5), &mut src).unwrap();
            let norm_sq: f64 = psi.vector().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm_sq - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_dim_one_is_forced() {
        let mut src = SeededSource::new(2, "haar");
        let psi = haar_pure(layout(1), &mut src).unwrap();
        assert!((psi.vector()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_reduced_purity_of_two_qubit_haar_states() {
        // E[Tr ρ_A²] over Haar pairs of qubits is (d_A + d_B)/(d_A·d_B + 1) = 0.8.
        let mut src = SeededSource::new(3, "haar-purity");
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let n = 10_000;
        let mut total = 0.0;
        for _ in 0..n {
            let psi = haar_pure(layout.clone(), &mut src).unwrap();
            let reduced = partial_trace(&psi.to_density(), &["A"]).unwrap();
            total += reduced.purity();
        }
        let mean = total / n as f64;
        assert!((mean - 0.8).abs() < 0.02, "mean purity {mean}");
    }

    #[test]
    fn ginibre_rank_one_is_pure() {
        let mut src = SeededSource::new(4, "ginibre");
        let rho = ginibre_mixed(layout(4), 1, &mut src).unwrap();
        assert!(rho.is_pure(1e-10));
    }

    #[test]
    fn ginibre_trace_one_and_rank_bound() {
        let mut src = SeededSource::new(5, "ginibre");
        for rank in 1..=4 {
            let rho = ginibre_mixed(layout(4), rank, &mut src).unwrap();
            assert!((trace(rho.matrix()).re - 1.0).abs() < 1e-12);
            let eig = crate::linalg::eig_hermitian(rho.matrix()).unwrap();
            let numerical_rank = eig.values.iter().filter(|&&v| v > 1e-12).count();
            assert!(numerical_rank <= rank);
        }
    }

    #[test]
    fn ginibre_full_rank_has_positive_spectrum() {
        let mut src = SeededSource::new(6, "ginibre");
        for _ in 0..50 {
            let rho = ginibre_mixed(layout(4), 4, &mut src).unwrap();
            let eig = crate::linalg::eig_hermitian(rho.matrix()).unwrap();
            assert!(eig.values[0] > 0.0);
        }
    }

    #[test]
    fn ginibre_rejects_bad_rank() {
        let mut src = SeededSource::new(7, "ginibre");
        assert!(ginibre_mixed(layout(4), 0, &mut src).is_err());
        assert!(ginibre_mixed(layout(4), 5, &mut src).is_err());
    }

    #[test]
    fn mix_noise_endpoints() {
        let mut src = SeededSource::new(8, "noise");
        let rho = ginibre_mixed(layout(3), 1, &mut src).unwrap();
        let same = mix_noise(&rho, 0.0, &mut src).unwrap();
        assert!(max_abs_diff(same.matrix(), rho.matrix()) < 1e-15);
        let mut src_a = SeededSource::new(9, "noise");
        let mut src_b = SeededSource::new(9, "noise");
        let full = mix_noise(&rho, 1.0, &mut src_a).unwrap();
        let eta = ginibre_mixed(layout(3), 3, &mut src_b).unwrap();
        assert!(max_abs_diff(full.matrix(), eta.matrix()) < 1e-15);
        assert!(mix_noise(&rho, 1.5, &mut src).is_err());
    }

    #[test]
    fn mix_noise_on_pure_state_raises_entropy() {
        let mut src = SeededSource::new(10, "noise");
        let rho = ginibre_mixed(layout(3), 1, &mut src).unwrap();
        let noisy = mix_noise(&rho, 0.1, &mut src).unwrap();
        let s = crate::entropy::von_neumann_entropy(&noisy).value();
        assert!(s > 1e-3, "entropy after noise: {s}");
    }

    #[test]
    fn random_angles_range_and_determinism() {
        let mut src = SeededSource::new(11, "angles");
        let one = random_angles(1, &mut src).unwrap();
        assert!(one[0] >= 0.0 && one[0] < std::f64::consts::TAU);
        let mut a = SeededSource::new(12, "angles");
        let mut b = SeededSource::new(12, "angles");
        assert_eq!(
            random_angles(6, &mut a).unwrap(),
            random_angles(6, &mut b).unwrap()
        );
    }

    #[test]
    fn random_angles_empirical_mean_is_pi() {
        let mut src = SeededSource::new(13, "angles");
        let n = 100_000;
        let angles = random_angles(n, &mut src).unwrap();
        let mean: f64 = angles.iter().sum::<f64>() / n as f64;
        assert!((mean - std::f64::consts::PI).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn theta_family_endpoints_and_midpoint() {
        let zero = theta_family(0.0, 2).unwrap();
        assert!((zero.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let pi = theta_family(std::f64::consts::PI, 2).unwrap();
        assert!((pi.matrix()[(3, 3)].re - 1.0).abs() < 1e-12);
        let mid = theta_family(std::f64::consts::FRAC_PI_2, 3).unwrap();
        assert_eq!(mid.dim(), 8);
        for i in 0..8 {
            assert!((mid.matrix()[(i, i)].re - 0.125).abs() < 1e-12);
        }
        assert_eq!(
            mid.layout().labels().collect::<Vec<_>>(),
            vec!["A", "B1", "B2"]
        );
    }

    #[test]
    fn theta_family_rejects_out_of_range() {
        assert!(theta_family(-0.1, 2).is_err());
        assert!(theta_family(3.2, 2).is_err());
        assert!(theta_family(0.5, 1).is_err());
    }

    #[test]
    fn theta_family_on_layout_with_trivial_parts() {
        let layout = SubsystemLayout::new([("A", 2), ("B1", 1), ("B2", 2)]).unwrap();
        let rho = theta_family_on(1.0, &layout).unwrap();
        assert_eq!(rho.dim(), 4);
        assert!(rho.is_pure(1e-12));
    }
}
