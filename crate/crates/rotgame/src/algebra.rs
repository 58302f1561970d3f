//! Conditional expectations onto subalgebras, commuting squares and their
//! entropy inequality, Stinespring dilation of pinching, and recovery-map
//! checks.
//!
//! Application paths use the structured formulas (projector sums, marginal
//! reprepares). The d²×d² superoperator matrix of a map is materialized
//! lazily and only consumed by the verification routines, which compare
//! compositions, idempotence and Choi positivity on the full linear map.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::ensembles::{ginibre_mixed, SeededSource};
use crate::entropy::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::linalg::{hermitize, identity, max_abs, max_abs_diff, unitarity_deviation, CMatrix, CVector, ZERO};
use crate::qstate::{embed_operator, DensityMatrix, SubsystemLayout};

const UNITALITY_TOL: f64 = 1e-10;
const IDEMPOTENCE_TOL: f64 = 1e-10;
const CHOI_PSD_TOL: f64 = -1e-10;
const TRACE_PRESERVATION_TOL: f64 = 1e-10;
const DUALITY_TOL: f64 = 1e-10;
const COMMUTATION_TOL: f64 = 1e-10;
const ORTHONORMALITY_TOL: f64 = 1e-10;
const THEOREM3_TOL: f64 = 1e-9;
const RECOVERY_TOL: f64 = 1e-9;
const STINESPRING_TOL: f64 = 1e-12;
const DEGENERACY_GAP: f64 = 1e-10;

/// Diagonal blocks of a pinching: either a full orthonormal basis (rank-1
/// blocks) or a list of orthogonal projectors resolving the identity.
#[derive(Debug, Clone)]
pub enum PinchingBlocks {
    Basis(Vec<CVector>),
    Projectors(Vec<CMatrix>),
}

impl PinchingBlocks {
    fn projectors(&self) -> Vec<CMatrix> {
        match self {
            PinchingBlocks::Basis(vs) => vs.iter().map(|v| v * v.adjoint()).collect(),
            PinchingBlocks::Projectors(ps) => ps.clone(),
        }
    }
}

#[derive(Debug, Clone)]
enum CondExpKind {
    /// Erase off-diagonal blocks on one subsystem.
    Pinching {
        target: String,
        blocks: PinchingBlocks,
    },
    /// Replace the discarded subsystems by the normalized identity.
    TraceEmbed { discard: Vec<String> },
    /// Apply the parts left to right. Empty list is the identity map.
    Compose { parts: Vec<ConditionalExpectation> },
}

/// Unital, trace-dual projection onto a subalgebra.
#[derive(Debug, Clone)]
pub struct ConditionalExpectation {
    layout: SubsystemLayout,
    kind: CondExpKind,
    superop: OnceLock<CMatrix>,
}

/// ρ ↦ Σ_k |b_k⟩⟨b_k| ⟨b_k|ρ|b_k⟩ on `target`, identity elsewhere.
pub fn make_pinching(
    layout: &SubsystemLayout,
    target: &str,
    basis: &[CVector],
) -> Result<ConditionalExpectation> {
    let dim = layout.dim_of(target)?;
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: basis.len(),
        });
    }
    let mut dev = 0.0_f64;
    for (i, a) in basis.iter().enumerate() {
        if a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.len(),
            });
        }
        for (j, b) in basis.iter().enumerate() {
            let inner: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            let target_value = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((inner - Complex64::new(target_value, 0.0)).norm());
        }
    }
    if dev > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal { deviation: dev });
    }
    Ok(ConditionalExpectation {
        layout: layout.clone(),
        kind: CondExpKind::Pinching {
            target: target.to_string(),
            blocks: PinchingBlocks::Basis(basis.to_vec()),
        },
        superop: OnceLock::new(),
    })
}

/// Block pinching onto the commutant of a projective measurement
/// {P_k}: ρ ↦ Σ_k P_k ρ P_k on `target`.
pub fn make_block_pinching(
    layout: &SubsystemLayout,
    target: &str,
    projectors: &[CMatrix],
) -> Result<ConditionalExpectation> {
    let dim = layout.dim_of(target)?;
    if projectors.is_empty() {
        return Err(Error::BadProjectors("empty projector list".into()));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != dim || p.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.nrows(),
            });
        }
        let herm = max_abs_diff(p, &p.adjoint());
        let idem = max_abs_diff(&(p * p), p);
        if herm > ORTHONORMALITY_TOL || idem > ORTHONORMALITY_TOL {
            return Err(Error::BadProjectors(format!(
                "projector {i} is not an orthogonal projector (herm {herm:.2e}, idem {idem:.2e})"
            )));
        }
        for (j, q) in projectors.iter().enumerate() {
            if i != j {
                let cross = max_abs(&(p * q));
                if cross > ORTHONORMALITY_TOL {
                    return Err(Error::BadProjectors(format!(
                        "projectors {i} and {j} are not orthogonal ({cross:.2e})"
                    )));
                }
            }
        }
        sum += p;
    }
    let completeness = max_abs_diff(&sum, &identity(dim));
    if completeness > ORTHONORMALITY_TOL {
        return Err(Error::BadProjectors(format!(
            "projectors do not sum to the identity ({completeness:.2e})"
        )));
    }
    Ok(ConditionalExpectation {
        layout: layout.clone(),
        kind: CondExpKind::Pinching {
            target: target.to_string(),
            blocks: PinchingBlocks::Projectors(projectors.to_vec()),
        },
        superop: OnceLock::new(),
    })
}

/// ρ ↦ I_discard/|discard| ⊗ ρ_kept, preserving layout order.
pub fn make_trace_embed(
    layout: &SubsystemLayout,
    discard: &[&str],
) -> Result<ConditionalExpectation> {
    let mut positions = layout.positions_of(discard)?;
    positions.sort_unstable();
    let ordered: Vec<String> = positions
        .iter()
        .map(|&i| layout.parts()[i].0.clone())
        .collect();
    Ok(ConditionalExpectation {
        layout: layout.clone(),
        kind: CondExpKind::TraceEmbed { discard: ordered },
        superop: OnceLock::new(),
    })
}

/// Pinching in the eigenbasis of a generator. A near-degenerate spectrum is
/// rejected: the pinching output would depend on an arbitrary basis choice
/// inside the degenerate blocks, so an explicit basis must be supplied via
/// [`make_pinching`] instead.
pub fn pinching_from_generator(
    layout: &SubsystemLayout,
    generator: &crate::qstate::Generator,
) -> Result<ConditionalExpectation> {
    let dim = layout.dim_of(generator.target())?;
    if dim != generator.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: generator.dim(),
        });
    }
    let gap = generator.min_eigenvalue_gap();
    if gap < DEGENERACY_GAP {
        return Err(Error::DegenerateGenerator { min_gap: gap });
    }
    let basis: Vec<CVector> = (0..dim)
        .map(|k| generator.eigenvectors().column(k).into_owned())
        .collect();
    make_pinching(layout, generator.target(), &basis)
}

/// Composition applying `parts` left to right.
pub fn compose(parts: Vec<ConditionalExpectation>) -> Result<ConditionalExpectation> {
    let layout = match parts.first() {
        Some(first) => first.layout.clone(),
        None => {
            return Err(Error::InvalidParameter(
                "compose of zero parts needs a layout; use ConditionalExpectation::identity"
                    .into(),
            ))
        }
    };
    for part in &parts {
        if part.layout != layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                part.layout, layout
            )));
        }
    }
    Ok(ConditionalExpectation {
        layout,
        kind: CondExpKind::Compose { parts },
        superop: OnceLock::new(),
    })
}

impl ConditionalExpectation {
    /// The identity map as an empty composition.
    pub fn identity(layout: &SubsystemLayout) -> Self {
        ConditionalExpectation {
            layout: layout.clone(),
            kind: CondExpKind::Compose { parts: Vec::new() },
            superop: OnceLock::new(),
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    /// Pinching target and rank-1 basis, when this is such a map.
    fn rank1_basis(&self) -> Option<(&str, &[CVector])> {
        match &self.kind {
            CondExpKind::Pinching {
                target,
                blocks: PinchingBlocks::Basis(basis),
            } => Some((target, basis)),
            _ => None,
        }
    }

    /// Applies the structured formula to a raw matrix (no state validation).
    pub(crate) fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        match &self.kind {
            CondExpKind::Pinching { target, blocks } => {
                let mut out = CMatrix::zeros(m.nrows(), m.ncols());
                for p in blocks.projectors() {
                    let full = embed_operator(&self.layout, &p, &[target])
                        .expect("pinching target validated at construction");
                    out += &full * m * &full;
                }
                out
            }
            CondExpKind::TraceEmbed { discard } => {
                let discard_refs: Vec<&str> = discard.iter().map(|s| s.as_str()).collect();
                let kept: Vec<&str> = self
                    .layout
                    .labels()
                    .filter(|l| !discard_refs.contains(l))
                    .collect();
                let split = self
                    .layout
                    .index_split(&kept)
                    .expect("labels validated at construction");
                // Marginal over the discarded part, then reprepare I/d in place.
                let mut marg = CMatrix::zeros(split.dim_group, split.dim_group);
                for a in 0..split.dim_group {
                    for b in 0..split.dim_group {
                        let mut sum = ZERO;
                        for r in 0..split.dim_rest {
                            sum += m[(split.flat(a, r), split.flat(b, r))];
                        }
                        marg[(a, b)] = sum;
                    }
                }
                let weight = 1.0 / split.dim_rest as f64;
                let mut out = CMatrix::zeros(m.nrows(), m.ncols());
                for a in 0..split.dim_group {
                    for b in 0..split.dim_group {
                        let v = marg[(a, b)].scale(weight);
                        for r in 0..split.dim_rest {
                            out[(split.flat(a, r), split.flat(b, r))] = v;
                        }
                    }
                }
                out
            }
            CondExpKind::Compose { parts } => {
                let mut current = m.clone();
                for part in parts {
                    current = part.apply_matrix(&current);
                }
                current
            }
        }
    }

    /// E(ρ) as a validated state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                rho.layout(),
                self.layout
            )));
        }
        DensityMatrix::new(self.layout.clone(), self.apply_matrix(rho.matrix()))
    }

    /// The d²×d² matrix of the map in the row-major vec convention
    /// (vec(ρ)[i·d + j] = ρ[i, j]). Memoized; built once by applying the
    /// structured formula to every matrix unit.
    pub fn superoperator(&self) -> &CMatrix {
        self.superop.get_or_init(|| {
            let d = self.layout.total_dim();
            let mut s = CMatrix::zeros(d * d, d * d);
            let mut unit = CMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    unit[(i, j)] = Complex64::new(1.0, 0.0);
                    let image = self.apply_matrix(&unit);
                    unit[(i, j)] = ZERO;
                    let col = i * d + j;
                    for r in 0..d {
                        for c in 0..d {
                            s[(r * d + c, col)] = image[(r, c)];
                        }
                    }
                }
            }
            s
        })
    }

    /// Choi matrix Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|), reshuffled from the superoperator.
    pub fn choi(&self) -> CMatrix {
        let d = self.layout.total_dim();
        let s = self.superoperator();
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        choi[(i * d + k, j * d + l)] = s[(k * d + l, i * d + j)];
                    }
                }
            }
        }
        choi
    }

    /// Structurally assembled random Hermitian element of the image
    /// subalgebra, for trace-duality sampling.
    fn image_sample(&self, source: &mut SeededSource) -> CMatrix {
        let d = self.layout.total_dim();
        match &self.kind {
            CondExpKind::Pinching { target, blocks } => match blocks {
                PinchingBlocks::Basis(basis) => {
                    let split = self
                        .layout
                        .index_split(&[target])
                        .expect("validated at construction");
                    let mut out = CMatrix::zeros(d, d);
                    for b in basis {
                        let block = b * b.adjoint();
                        let h = random_hermitian(split.dim_rest, source);
                        for t1 in 0..split.dim_group {
                            for t2 in 0..split.dim_group {
                                let w = block[(t1, t2)];
                                if w == ZERO {
                                    continue;
                                }
                                for r1 in 0..split.dim_rest {
                                    for r2 in 0..split.dim_rest {
                                        out[(split.flat(t1, r1), split.flat(t2, r2))] +=
                                            w * h[(r1, r2)];
                                    }
                                }
                            }
                        }
                    }
                    out
                }
                PinchingBlocks::Projectors(ps) => {
                    let mut out = CMatrix::zeros(d, d);
                    for p in ps {
                        let full = embed_operator(&self.layout, p, &[target])
                            .expect("validated at construction");
                        let h = random_hermitian(d, source);
                        out += &full * h * &full;
                    }
                    out
                }
            },
            CondExpKind::TraceEmbed { discard } => {
                let discard_refs: Vec<&str> = discard.iter().map(|s| s.as_str()).collect();
                let kept: Vec<&str> = self
                    .layout
                    .labels()
                    .filter(|l| !discard_refs.contains(l))
                    .collect();
                let split = self
                    .layout
                    .index_split(&kept)
                    .expect("validated at construction");
                let scale = source.normal();
                let h = random_hermitian(split.dim_group, source);
                let mut out = CMatrix::zeros(d, d);
                for a in 0..split.dim_group {
                    for b in 0..split.dim_group {
                        let v = h[(a, b)].scale(scale);
                        for r in 0..split.dim_rest {
                            out[(split.flat(a, r), split.flat(b, r))] = v;
                        }
                    }
                }
                out
            }
            CondExpKind::Compose { parts } => {
                let mut h = random_hermitian(d, source);
                for part in parts {
                    h = part.apply_matrix(&h);
                }
                h
            }
        }
    }
}

fn random_hermitian(dim: usize, source: &mut SeededSource) -> CMatrix {
    let raw = CMatrix::from_fn(dim, dim, |_, _| source.complex_normal());
    hermitize(&raw)
}

/// Outcome of the conditional-expectation verification battery.
#[derive(Debug, Clone)]
pub struct CondExpReport {
    pub pass: bool,
    pub unitality_deviation: f64,
    pub idempotence_deviation: f64,
    pub choi_min_eigenvalue: f64,
    pub trace_preservation_deviation: f64,
    pub duality_deviation: f64,
    pub samples: usize,
}

/// Checks unitality, idempotence, complete positivity, trace preservation
/// and trace duality against `samples` random full-algebra states paired
/// with structurally sampled image elements. Failures are reported, not
/// thrown.
pub fn verify_condexp(
    expectation: &ConditionalExpectation,
    samples: usize,
    seed: u64,
) -> Result<CondExpReport> {
    if samples < 1 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let d = expectation.layout.total_dim();

    let unitality_deviation =
        max_abs_diff(&expectation.apply_matrix(&identity(d)), &identity(d));

    let s = expectation.superoperator();
    let idempotence_deviation = max_abs_diff(&(s * s), s);

    let choi = expectation.choi();
    let choi_eig = crate::linalg::eig_hermitian(&hermitize(&choi))?;
    let choi_min_eigenvalue = choi_eig.values.first().copied().unwrap_or(0.0);
    // Choi must also be Hermitian for the eigenvalue test to mean anything.
    let choi_herm = max_abs_diff(&choi, &choi.adjoint());

    let mut trace_preservation_deviation = choi_herm;
    for i in 0..d {
        for j in 0..d {
            let mut tr = ZERO;
            for k in 0..d {
                tr += s[(k * d + k, i * d + j)];
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            trace_preservation_deviation =
                trace_preservation_deviation.max((tr - Complex64::new(expected, 0.0)).norm());
        }
    }

    let mut source = SeededSource::new(seed, "condexp-verify");
    let mut duality_deviation = 0.0_f64;
    for _ in 0..samples {
        let rho = ginibre_mixed(expectation.layout.clone(), d, &mut source)?;
        let sigma = {
            let raw = expectation.image_sample(&mut source);
            let scale = max_abs(&raw).max(1e-30);
            raw.scale(1.0 / scale)
        };
        let image = expectation.apply_matrix(rho.matrix());
        let lhs: Complex64 = (&sigma * image).diagonal().sum();
        let rhs: Complex64 = (&sigma * rho.matrix()).diagonal().sum();
        duality_deviation = duality_deviation.max((lhs - rhs).norm());
    }

    let pass = unitality_deviation <= UNITALITY_TOL
        && idempotence_deviation <= IDEMPOTENCE_TOL
        && choi_min_eigenvalue >= CHOI_PSD_TOL
        && trace_preservation_deviation <= TRACE_PRESERVATION_TOL
        && duality_deviation <= DUALITY_TOL;

    Ok(CondExpReport {
        pass,
        unitality_deviation,
        idempotence_deviation,
        choi_min_eigenvalue,
        trace_preservation_deviation,
        duality_deviation,
        samples,
    })
}

/// Four algebras closed under a commuting pair of conditional expectations;
/// `e_r` is their composition.
#[derive(Debug, Clone)]
pub struct CommutingSquare {
    e_n: ConditionalExpectation,
    e_t: ConditionalExpectation,
    e_r: ConditionalExpectation,
}

impl CommutingSquare {
    pub fn e_n(&self) -> &ConditionalExpectation {
        &self.e_n
    }

    pub fn e_t(&self) -> &ConditionalExpectation {
        &self.e_t
    }

    pub fn e_r(&self) -> &ConditionalExpectation {
        &self.e_r
    }

    pub fn layout(&self) -> &SubsystemLayout {
        self.e_n.layout()
    }

    /// Verified constructor; rejects non-commuting pairs.
    pub fn verified(e_n: ConditionalExpectation, e_t: ConditionalExpectation) -> Result<Self> {
        let check = verify_commuting_square(&e_n, &e_t)?;
        match check.square {
            Some(square) => Ok(square),
            None => Err(Error::NotCommuting {
                deviation: check.deviation,
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SquareCheck {
    pub commutes: bool,
    pub deviation: f64,
    pub square: Option<CommutingSquare>,
}

/// Compares the superoperators of E_N∘E_T and E_T∘E_N (max-abs ≤ 1e-10);
/// on success also returns the composed corner map E_R.
pub fn verify_commuting_square(
    e_n: &ConditionalExpectation,
    e_t: &ConditionalExpectation,
) -> Result<SquareCheck> {
    if e_n.layout != e_t.layout {
        return Err(Error::LayoutMismatch(format!(
            "{} vs {}",
            e_n.layout, e_t.layout
        )));
    }
    let s_n = e_n.superoperator();
    let s_t = e_t.superoperator();
    let nt = s_n * s_t;
    let tn = s_t * s_n;
    let deviation = max_abs_diff(&nt, &tn);
    let commutes = deviation <= COMMUTATION_TOL;
    let square = commutes.then(|| CommutingSquare {
        e_n: e_n.clone(),
        e_t: e_t.clone(),
        // E_R = E_N ∘ E_T: apply E_T first, then E_N.
        e_r: compose(vec![e_t.clone(), e_n.clone()]).expect("layouts already checked"),
    });
    Ok(SquareCheck {
        commutes,
        deviation,
        square,
    })
}

/// The four entropies of the commuting-square inequality and its slack
/// S(E_N ρ) + S(E_T ρ) − S(ρ) − S(E_R ρ) ≥ 0.
#[derive(Debug, Clone, Copy)]
pub struct Theorem3Report {
    pub s_n: f64,
    pub s_t: f64,
    pub s_m: f64,
    pub s_r: f64,
    pub slack: f64,
}

pub fn theorem3_report(square: &CommutingSquare, rho: &DensityMatrix) -> Result<Theorem3Report> {
    let s_n = von_neumann_entropy(&square.e_n.apply(rho)?).value();
    let s_t = von_neumann_entropy(&square.e_t.apply(rho)?).value();
    let s_m = von_neumann_entropy(rho).value();
    let s_r = von_neumann_entropy(&square.e_r.apply(rho)?).value();
    let slack = s_n + s_t - s_m - s_r;
    if slack < -THEOREM3_TOL {
        return Err(Error::BoundViolated {
            context: "commuting-square entropy inequality".into(),
            gap: slack,
            tolerance: THEOREM3_TOL,
        });
    }
    Ok(Theorem3Report {
        s_n,
        s_t,
        s_m,
        s_r,
        slack,
    })
}

/// Isometry V = Σ_k |b_k⟩_E ⊗ |b_k⟩⟨b_k| dilating a rank-1 pinching; the
/// environment registers the measured block.
#[derive(Debug, Clone)]
pub struct StinespringIsometry {
    layout: SubsystemLayout,
    target: String,
    env_label: String,
    local: CMatrix,
}

/// Builds the dilation of a rank-1 pinching. Block pinchings are rejected;
/// their dilation would need environment dimension = number of blocks and a
/// different isometry.
pub fn pinching_stinespring(
    pinching: &ConditionalExpectation,
    env_label: &str,
) -> Result<StinespringIsometry> {
    let (target, basis) = pinching.rank1_basis().ok_or(Error::NonRank1Pinching)?;
    if pinching.layout.contains(env_label) {
        return Err(Error::DuplicateLabel(env_label.to_string()));
    }
    let dim = basis.len();
    let mut local = CMatrix::zeros(dim * dim, dim);
    for b in basis {
        for e in 0..dim {
            for a in 0..dim {
                for j in 0..dim {
                    local[(e * dim + a, j)] += b[e] * b[a] * b[j].conj();
                }
            }
        }
    }
    let dev = max_abs_diff(&(local.adjoint() * &local), &identity(dim));
    if dev > STINESPRING_TOL {
        return Err(Error::NotIsometry { deviation: dev });
    }
    Ok(StinespringIsometry {
        layout: pinching.layout.clone(),
        target: target.to_string(),
        env_label: env_label.to_string(),
        local,
    })
}

impl StinespringIsometry {
    pub fn env_label(&self) -> &str {
        &self.env_label
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    /// Local isometry matrix, (d_E·d_target) × d_target.
    pub fn isometry(&self) -> &CMatrix {
        &self.local
    }

    /// Layout of the dilated state: the environment sits directly before
    /// the target subsystem.
    pub fn dilated_layout(&self) -> Result<SubsystemLayout> {
        let pos = self
            .layout
            .position(&self.target)
            .ok_or_else(|| Error::UnknownLabel(self.target.clone()))?;
        let dim = self.layout.dim_of(&self.target)?;
        self.layout.insert(pos, &self.env_label, dim)
    }

    /// VρV† on the extended layout.
    pub fn dilate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                rho.layout(),
                self.layout
            )));
        }
        let dim_t = self.layout.dim_of(&self.target)?;
        let new_layout = self.dilated_layout()?;
        let old_split = self.layout.index_split(&[&self.target])?;
        let new_split = new_layout.index_split(&[self.env_label.as_str(), &self.target])?;
        let d_old = self.layout.total_dim();
        let d_new = new_layout.total_dim();
        let mut w = CMatrix::zeros(d_new, d_old);
        for ea in 0..dim_t * dim_t {
            for j in 0..dim_t {
                let v = self.local[(ea, j)];
                if v == ZERO {
                    continue;
                }
                for r in 0..old_split.dim_rest {
                    w[(new_split.flat(ea, r), old_split.flat(j, r))] = v;
                }
            }
        }
        let out = &w * rho.matrix() * w.adjoint();
        DensityMatrix::new(new_layout, out)
    }
}

/// Both routes to the pinching asymmetry: the relative-entropy form and
/// −S(E|system) on the dilated state.
#[derive(Debug, Clone, Copy)]
pub struct Prop4Report {
    pub asymmetry: f64,
    pub dilated_conditional: f64,
    pub deviation: f64,
    pub pass: bool,
}

pub fn verify_prop4(rho: &DensityMatrix, pinching: &ConditionalExpectation) -> Result<Prop4Report> {
    let env = fresh_env_label(pinching.layout());
    let dilation = pinching_stinespring(pinching, &env)?;
    let dilated = dilation.dilate(rho)?;
    let system_labels: Vec<&str> = pinching.layout().labels().collect();
    let marg = crate::qstate::partial_trace(&dilated, &system_labels)?;
    // −S(E|M) = S(M) − S(EM) on the dilated state.
    let dilated_conditional =
        von_neumann_entropy(&marg).value() - von_neumann_entropy(&dilated).value();
    let asymmetry = crate::entropy::asymmetry_measure(rho, pinching)?.value();
    let deviation = (asymmetry - dilated_conditional).abs();
    Ok(Prop4Report {
        asymmetry,
        dilated_conditional,
        deviation,
        pass: deviation <= 1e-9,
    })
}

fn fresh_env_label(layout: &SubsystemLayout) -> String {
    if !layout.contains("E") {
        return "E".to_string();
    }
    let mut i = 0usize;
    loop {
        let candidate = format!("E{i}");
        if !layout.contains(&candidate) {
            return candidate;
        }
        i += 1;
    }
}

/// Channel of the form U ∘ (discard-and-reprepare on C) ∘ U†, the shape of
/// every recovery candidate used here. With no conjugation it is the plain
/// reset Q_{C,ρ}: σ ↦ ρ_C ⊗ σ_rest (in place).
#[derive(Debug, Clone)]
pub struct RecoveryCandidate {
    layout: SubsystemLayout,
    conjugation: Option<(CMatrix, Vec<String>)>,
    reset_labels: Vec<String>,
    reset_state: DensityMatrix,
}

impl RecoveryCandidate {
    /// Plain discard-and-reprepare on `reset_labels`. An empty label list
    /// gives the identity channel.
    pub fn reset(
        layout: &SubsystemLayout,
        reset_labels: &[&str],
        reset_state: DensityMatrix,
    ) -> Result<Self> {
        let mut positions = layout.positions_of(reset_labels)?;
        positions.sort_unstable();
        let ordered: Vec<String> = positions
            .iter()
            .map(|&i| layout.parts()[i].0.clone())
            .collect();
        let expected = layout.sublayout(&ordered.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
        if reset_state.layout() != &expected {
            return Err(Error::LayoutMismatch(format!(
                "reset state on {} but discarding {}",
                reset_state.layout(),
                expected
            )));
        }
        Ok(Self {
            layout: layout.clone(),
            conjugation: None,
            reset_labels: ordered,
            reset_state,
        })
    }

    /// R(X) = U Q(U† X U) U† with U acting on `u_targets`.
    pub fn conjugated_reset(
        layout: &SubsystemLayout,
        u: &CMatrix,
        u_targets: &[&str],
        reset_labels: &[&str],
        reset_state: DensityMatrix,
    ) -> Result<Self> {
        let dev = unitarity_deviation(u);
        if dev > 1e-10 {
            return Err(Error::NotUnitary { deviation: dev });
        }
        let embedded = embed_operator(layout, u, u_targets)?;
        let mut candidate = Self::reset(layout, reset_labels, reset_state)?;
        candidate.conjugation = Some((
            embedded,
            u_targets.iter().map(|s| s.to_string()).collect(),
        ));
        Ok(candidate)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let rotated = match &self.conjugation {
            Some((u, _)) => u.adjoint() * m * u,
            None => m.clone(),
        };
        let reset = if self.reset_labels.is_empty() {
            rotated
        } else {
            let labels: Vec<&str> = self.reset_labels.iter().map(|s| s.as_str()).collect();
            let split = self
                .layout
                .index_split(&labels)
                .expect("validated at construction");
            let mut marg = CMatrix::zeros(split.dim_rest, split.dim_rest);
            for r1 in 0..split.dim_rest {
                for r2 in 0..split.dim_rest {
                    let mut sum = ZERO;
                    for c in 0..split.dim_group {
                        sum += rotated[(split.flat(c, r1), split.flat(c, r2))];
                    }
                    marg[(r1, r2)] = sum;
                }
            }
            let mut out = CMatrix::zeros(m.nrows(), m.ncols());
            for c1 in 0..split.dim_group {
                for c2 in 0..split.dim_group {
                    let w = self.reset_state.matrix()[(c1, c2)];
                    if w == ZERO {
                        continue;
                    }
                    for r1 in 0..split.dim_rest {
                        for r2 in 0..split.dim_rest {
                            out[(split.flat(c1, r1), split.flat(c2, r2))] += w * marg[(r1, r2)];
                        }
                    }
                }
            }
            out
        };
        match &self.conjugation {
            Some((u, _)) => u * reset * u.adjoint(),
            None => reset,
        }
    }

    pub fn apply(&self, x: &DensityMatrix) -> Result<DensityMatrix> {
        if x.layout() != &self.layout {
            return Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                x.layout(),
                self.layout
            )));
        }
        DensityMatrix::new(self.layout.clone(), self.apply_matrix(x.matrix()))
    }

    /// Choi positivity and trace preservation of the channel.
    pub fn cptp_report(&self) -> Result<CptpReport> {
        let d = self.layout.total_dim();
        let mut choi = CMatrix::zeros(d * d, d * d);
        let mut unit = CMatrix::zeros(d, d);
        let mut trace_dev = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                unit[(i, j)] = Complex64::new(1.0, 0.0);
                let image = self.apply_matrix(&unit);
                unit[(i, j)] = ZERO;
                let tr: Complex64 = image.diagonal().sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                trace_dev = trace_dev.max((tr - Complex64::new(expected, 0.0)).norm());
                for k in 0..d {
                    for l in 0..d {
                        choi[(i * d + k, j * d + l)] = image[(k, l)];
                    }
                }
            }
        }
        let eig = crate::linalg::eig_hermitian(&hermitize(&choi))?;
        let choi_min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
        let pass = choi_min_eigenvalue >= CHOI_PSD_TOL && trace_dev <= TRACE_PRESERVATION_TOL;
        Ok(CptpReport {
            pass,
            choi_min_eigenvalue,
            trace_preservation_deviation: trace_dev,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CptpReport {
    pub pass: bool,
    pub choi_min_eigenvalue: f64,
    pub trace_preservation_deviation: f64,
}

/// Which corner the recovery map restores the state from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoverySide {
    /// R(E_N(ρ)) = ρ and R(E_R(ρ)) = E_T(ρ).
    FromN,
    /// R(E_T(ρ)) = ρ and R(E_R(ρ)) = E_N(ρ).
    FromT,
}

#[derive(Debug, Clone, Copy)]
pub struct RecoveryReport {
    pub pass: bool,
    pub state_deviation: f64,
    pub corner_deviation: f64,
}

/// Checks the saturation certificate of the commuting-square inequality:
/// a CPTP candidate must restore ρ from one conditional expectation and map
/// the corner E_R(ρ) to the other one, both within 1e-9 (max-abs).
pub fn verify_recovery(
    candidate: &RecoveryCandidate,
    square: &CommutingSquare,
    side: RecoverySide,
    rho: &DensityMatrix,
) -> Result<RecoveryReport> {
    let cptp = candidate.cptp_report()?;
    if !cptp.pass {
        return Err(Error::NotCptp(format!(
            "choi min eigenvalue {:.3e}, trace deviation {:.3e}",
            cptp.choi_min_eigenvalue, cptp.trace_preservation_deviation
        )));
    }
    let (from, other) = match side {
        RecoverySide::FromN => (&square.e_n, &square.e_t),
        RecoverySide::FromT => (&square.e_t, &square.e_n),
    };
    let restored = candidate.apply(&from.apply(rho)?)?;
    let state_deviation = max_abs_diff(restored.matrix(), rho.matrix());
    let corner_out = candidate.apply(&square.e_r.apply(rho)?)?;
    let other_state = other.apply(rho)?;
    let corner_deviation = max_abs_diff(corner_out.matrix(), other_state.matrix());
    Ok(RecoveryReport {
        pass: state_deviation <= RECOVERY_TOL && corner_deviation <= RECOVERY_TOL,
        state_deviation,
        corner_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::relative_entropy;
    use crate::qstate::test_states::*;
    use crate::qstate::{apply_unitary, partial_trace, tensor, Generator};

    fn z_basis() -> Vec<CVector> {
        vec![
            CVector::from_vec(vec![Complex64::new(1.0, 0.0), ZERO]),
            CVector::from_vec(vec![ZERO, Complex64::new(1.0, 0.0)]),
        ]
    }

    fn rotated_basis(angle: f64) -> Vec<CVector> {
        let (s, c) = angle.sin_cos();
        vec![
            CVector::from_vec(vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)]),
            CVector::from_vec(vec![Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]),
        ]
    }

    fn random_state(labels: &[(&str, usize)], seed: u64) -> DensityMatrix {
        let layout = SubsystemLayout::new(labels.iter().map(|&(l, d)| (l, d))).unwrap();
        let dim = layout.total_dim();
        let mut src = SeededSource::new(seed, "algebra-tests");
        ginibre_mixed(layout, dim, &mut src).unwrap()
    }

    #[test]
    fn pinching_fixes_diagonal_states() {
        let rho = classically_correlated("A", "B");
        let pinch = make_pinching(rho.layout(), "A", &z_basis()).unwrap();
        let out = pinch.apply(&rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-14);
    }

    #[test]
    fn pinching_erases_plus_state_coherence() {
        let rho = plus("A");
        let pinch = make_pinching(rho.layout(), "A", &z_basis()).unwrap();
        let out = pinch.apply(&rho).unwrap();
        assert!(max_abs_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-14);
    }

    #[test]
    fn pinching_bell_state_gives_classical_correlation() {
        let rho = bell("A", "B");
        let pinch = make_pinching(rho.layout(), "A", &z_basis()).unwrap();
        let out = pinch.apply(&rho).unwrap();
        let expect = classically_correlated("A", "B");
        assert!(max_abs_diff(out.matrix(), expect.matrix()) < 1e-14);
    }

    #[test]
    fn pinching_rejects_non_orthonormal_basis() {
        let layout = qubit_layout("A");
        let bad = vec![
            CVector::from_vec(vec![Complex64::new(1.0, 0.0), ZERO]),
            CVector::from_vec(vec![Complex64::new(1.0, 0.0), ZERO]),
        ];
        assert!(matches!(
            make_pinching(&layout, "A", &bad),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn trace_embed_on_product_state() {
        let rho = random_state(&[("A", 2)], 1);
        let sigma = random_state(&[("B", 3)], 2);
        let both = tensor(&[&rho, &sigma]).unwrap();
        let embed = make_trace_embed(both.layout(), &["A"]).unwrap();
        let out = embed.apply(&both).unwrap();
        let expect = tensor(&[
            &DensityMatrix::maximally_mixed(rho.layout().clone()),
            &sigma,
        ])
        .unwrap();
        assert!(max_abs_diff(out.matrix(), expect.matrix()) < 1e-13);
    }

    #[test]
    fn trace_embed_is_idempotent() {
        let rho = random_state(&[("A", 2), ("B", 2)], 3);
        let embed = make_trace_embed(rho.layout(), &["B"]).unwrap();
        let once = embed.apply(&rho).unwrap();
        let twice = embed.apply(&once).unwrap();
        assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-13);
    }

    #[test]
    fn trace_embed_duality_holds_on_random_inputs() {
        let rho = random_state(&[("A", 2), ("B", 2)], 4);
        let embed = make_trace_embed(rho.layout(), &["A"]).unwrap();
        let mut src = SeededSource::new(5, "duality");
        for _ in 0..20 {
            let sigma = embed.image_sample(&mut src);
            let lhs: Complex64 = (&sigma * embed.apply_matrix(rho.matrix())).diagonal().sum();
            let rhs: Complex64 = (&sigma * rho.matrix()).diagonal().sum();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn empty_composition_is_identity() {
        let rho = random_state(&[("A", 2), ("B", 2)], 6);
        let id = ConditionalExpectation::identity(rho.layout());
        let out = id.apply(&rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn pinching_is_idempotent() {
        let rho = random_state(&[("A", 2), ("B", 2)], 7);
        let pinch = make_pinching(rho.layout(), "A", &rotated_basis(0.3)).unwrap();
        let once = pinch.apply(&rho).unwrap();
        let twice = pinch.apply(&once).unwrap();
        assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-13);
    }

    #[test]
    fn composite_pinchings_commute_in_either_order() {
        let rho = random_state(&[("R", 3), ("A", 2)], 8);
        let pinch_r = make_pinching(
            rho.layout(),
            "R",
            &[
                CVector::from_vec(vec![Complex64::new(1.0, 0.0), ZERO, ZERO]),
                CVector::from_vec(vec![ZERO, Complex64::new(1.0, 0.0), ZERO]),
                CVector::from_vec(vec![ZERO, ZERO, Complex64::new(1.0, 0.0)]),
            ],
        )
        .unwrap();
        let pinch_a = make_pinching(rho.layout(), "A", &rotated_basis(0.9)).unwrap();
        let ra = compose(vec![pinch_r.clone(), pinch_a.clone()])
            .unwrap()
            .apply(&rho)
            .unwrap();
        let ar = compose(vec![pinch_a, pinch_r]).unwrap().apply(&rho).unwrap();
        assert!(max_abs_diff(ra.matrix(), ar.matrix()) < 1e-12);
    }

    #[test]
    fn verify_condexp_passes_for_all_constructions() {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let pinch = make_pinching(&layout, "A", &rotated_basis(0.4)).unwrap();
        let embed = make_trace_embed(&layout, &["B"]).unwrap();
        let combo = compose(vec![pinch.clone(), embed.clone()]).unwrap();
        for e in [pinch, embed, combo] {
            let report = verify_condexp(&e, 50, 11).unwrap();
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn verify_condexp_fails_for_injected_non_unital_map() {
        // Bypass validation: a "pinching" whose blocks do not resolve the
        // identity is not unital.
        let layout = qubit_layout("A");
        let broken = ConditionalExpectation {
            layout: layout.clone(),
            kind: CondExpKind::Pinching {
                target: "A".into(),
                blocks: PinchingBlocks::Projectors(vec![CMatrix::from_row_slice(
                    2,
                    2,
                    &[Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO],
                )]),
            },
            superop: OnceLock::new(),
        };
        let report = verify_condexp(&broken, 10, 12).unwrap();
        assert!(!report.pass);
        assert!(report.unitality_deviation > 0.5);
    }

    #[test]
    fn block_pinching_validates_projectors() {
        let layout = SubsystemLayout::new([("A", 3)]).unwrap();
        let mut p0 = CMatrix::zeros(3, 3);
        p0[(0, 0)] = Complex64::new(1.0, 0.0);
        p0[(1, 1)] = Complex64::new(1.0, 0.0);
        let mut p1 = CMatrix::zeros(3, 3);
        p1[(2, 2)] = Complex64::new(1.0, 0.0);
        let block = make_block_pinching(&layout, "A", &[p0.clone(), p1]).unwrap();
        let report = verify_condexp(&block, 25, 13).unwrap();
        assert!(report.pass, "{report:?}");
        // Missing a block: not unital, rejected at construction.
        assert!(make_block_pinching(&layout, "A", &[p0]).is_err());
    }

    #[test]
    fn commuting_square_of_disjoint_pinchings() {
        let layout = SubsystemLayout::new([("R", 2), ("A", 2), ("B1", 2)]).unwrap();
        let pinch_r = make_pinching(&layout, "R", &z_basis()).unwrap();
        let pinch_a = make_pinching(&layout, "A", &rotated_basis(0.7)).unwrap();
        let check = verify_commuting_square(&pinch_r, &pinch_a).unwrap();
        assert!(check.commutes, "deviation {:.3e}", check.deviation);
    }

    #[test]
    fn same_expectation_commutes_with_itself() {
        let layout = qubit_layout("A");
        let pinch = make_pinching(&layout, "A", &z_basis()).unwrap();
        let check = verify_commuting_square(&pinch, &pinch).unwrap();
        assert!(check.commutes);
        let square = check.square.unwrap();
        let rho = plus("A");
        let via_corner = square.e_r().apply(&rho).unwrap();
        let direct = pinch.apply(&rho).unwrap();
        assert!(max_abs_diff(via_corner.matrix(), direct.matrix()) < 1e-13);
    }

    #[test]
    fn rotated_basis_pinchings_fail_to_commute() {
        let layout = qubit_layout("A");
        let pinch_z = make_pinching(&layout, "A", &z_basis()).unwrap();
        let pinch_tilted =
            make_pinching(&layout, "A", &rotated_basis(std::f64::consts::FRAC_PI_8)).unwrap();
        let check = verify_commuting_square(&pinch_z, &pinch_tilted).unwrap();
        assert!(!check.commutes);
        assert!(check.deviation > 1e-2);
    }

    #[test]
    fn theorem3_slack_vanishes_for_common_fixed_points() {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let pinch = make_pinching(&layout, "A", &z_basis()).unwrap();
        let embed = make_trace_embed(&layout, &["B"]).unwrap();
        let square = CommutingSquare::verified(embed, pinch).unwrap();
        // diag ⊗ I/2 is fixed by both maps.
        let rho = tensor(&[
            &classically_correlated("A", "X"),
        ])
        .unwrap();
        let fixed = {
            let m = partial_trace(&rho, &["A"]).unwrap();
            tensor(&[&m, &DensityMatrix::maximally_mixed(qubit_layout("B"))]).unwrap()
        };
        let report = theorem3_report(&square, &fixed).unwrap();
        assert!(report.slack.abs() < 1e-9, "slack {}", report.slack);
    }

    #[test]
    fn theorem3_nonnegative_on_random_states() {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let pinch = make_pinching(&layout, "A", &rotated_basis(0.3)).unwrap();
        let embed = make_trace_embed(&layout, &["B"]).unwrap();
        let square = CommutingSquare::verified(embed, pinch).unwrap();
        for seed in 0..20 {
            let rho = random_state(&[("A", 2), ("B", 2)], 100 + seed);
            let report = theorem3_report(&square, &rho).unwrap();
            assert!(report.slack >= -1e-9);
        }
    }

    #[test]
    fn stinespring_dilation_of_qubit_z_pinching() {
        let layout = qubit_layout("A");
        let pinch = make_pinching(&layout, "A", &z_basis()).unwrap();
        let v = pinching_stinespring(&pinch, "E").unwrap();
        // |0⟩ ↦ |0⟩_E|0⟩, |1⟩ ↦ |1⟩_E|1⟩.
        assert!((v.isometry()[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((v.isometry()[(3, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v.isometry()[(1, 0)].norm() < 1e-15);
        assert!(v.isometry()[(2, 1)].norm() < 1e-15);
    }

    #[test]
    fn dilation_marginals_reproduce_the_pinching() {
        let rho = random_state(&[("A", 2), ("B", 2)], 14);
        let pinch = make_pinching(rho.layout(), "A", &rotated_basis(1.1)).unwrap();
        let v = pinching_stinespring(&pinch, "E").unwrap();
        let dilated = v.dilate(&rho).unwrap();
        assert_eq!(
            dilated.layout().labels().collect::<Vec<_>>(),
            vec!["E", "A", "B"]
        );
        // Tracing the environment gives P(ρ).
        let sys = partial_trace(&dilated, &["A", "B"]).unwrap();
        let pinched = pinch.apply(&rho).unwrap();
        assert!(max_abs_diff(sys.matrix(), pinched.matrix()) < 1e-12);
        // The complementary marginal is the same pinching read on E.
        let env = partial_trace(&dilated, &["E", "B"]).unwrap();
        assert!(max_abs_diff(env.matrix(), pinched.matrix()) < 1e-12);
    }

    #[test]
    fn stinespring_rejects_block_pinching() {
        let layout = SubsystemLayout::new([("A", 3)]).unwrap();
        let mut p0 = CMatrix::zeros(3, 3);
        p0[(0, 0)] = Complex64::new(1.0, 0.0);
        p0[(1, 1)] = Complex64::new(1.0, 0.0);
        let mut p1 = CMatrix::zeros(3, 3);
        p1[(2, 2)] = Complex64::new(1.0, 0.0);
        let block = make_block_pinching(&layout, "A", &[p0, p1]).unwrap();
        assert!(matches!(
            pinching_stinespring(&block, "E"),
            Err(Error::NonRank1Pinching)
        ));
    }

    #[test]
    fn prop4_routes_agree() {
        // Diagonal state: both routes give zero.
        let diag = classically_correlated("A", "B");
        let pinch = make_pinching(diag.layout(), "A", &z_basis()).unwrap();
        let report = verify_prop4(&diag, &pinch).unwrap();
        assert!(report.pass);
        assert!(report.asymmetry.abs() < 1e-10);

        // |+⟩⟨+| under the z pinching: both routes give one bit.
        let rho = plus("A");
        let pinch = make_pinching(rho.layout(), "A", &z_basis()).unwrap();
        let report = verify_prop4(&rho, &pinch).unwrap();
        assert!(report.pass);
        assert!((report.asymmetry - 1.0).abs() < 1e-10);

        // Random two-qubit states with a single-qubit pinching.
        for seed in 0..10 {
            let rho = random_state(&[("A", 2), ("B", 2)], 200 + seed);
            let pinch = make_pinching(rho.layout(), "A", &rotated_basis(0.5)).unwrap();
            let report = verify_prop4(&rho, &pinch).unwrap();
            assert!(report.pass, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn pinching_commutes_with_generated_rotations() {
        let g = Generator::pauli_z("A");
        for seed in 0..5 {
            let rho = random_state(&[("A", 2), ("B", 2)], 300 + seed);
            let pinch = pinching_from_generator(rho.layout(), &g).unwrap();
            let rotated = apply_unitary(&rho, &g.rotation(0.8 + seed as f64), &["A"]).unwrap();
            let a = pinch.apply(&rotated).unwrap();
            let b = pinch.apply(&rho).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-10);
        }
    }

    #[test]
    fn pinching_never_shrinks_support() {
        for seed in 0..5 {
            let rho = random_state(&[("A", 2), ("B", 2)], 400 + seed);
            let pinch = make_pinching(rho.layout(), "A", &rotated_basis(0.2)).unwrap();
            let image = pinch.apply(&rho).unwrap();
            let d = relative_entropy(&rho, &image).unwrap();
            assert!(d.is_finite());
        }
    }

    #[test]
    fn degenerate_generator_is_rejected() {
        let layout = qubit_layout("A");
        let g = Generator::new("A", identity(2)).unwrap();
        assert!(matches!(
            pinching_from_generator(&layout, &g),
            Err(Error::DegenerateGenerator { .. })
        ));
    }

    #[test]
    fn identity_recovery_passes_on_common_fixed_points() {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let pinch = make_pinching(&layout, "A", &z_basis()).unwrap();
        let embed = make_trace_embed(&layout, &["B"]).unwrap();
        let square = CommutingSquare::verified(embed, pinch).unwrap();
        let fixed = {
            let diag = partial_trace(&classically_correlated("A", "X"), &["A"]).unwrap();
            tensor(&[&diag, &DensityMatrix::maximally_mixed(qubit_layout("B"))]).unwrap()
        };
        let empty_state = DensityMatrix::new(
            SubsystemLayout::new(std::iter::empty::<(String, usize)>()).unwrap(),
            identity(1),
        )
        .unwrap();
        let id = RecoveryCandidate::reset(&layout, &[], empty_state).unwrap();
        let report = verify_recovery(&id, &square, RecoverySide::FromT, &fixed).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn reset_recovery_on_bipartite_square_with_product_state() {
        let layout = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho_a = random_state(&[("A", 2)], 15);
        let rho_b = random_state(&[("B", 2)], 16);
        let rho = tensor(&[&rho_a, &rho_b]).unwrap();
        let e_n = make_trace_embed(&layout, &["B"]).unwrap();
        let e_t = make_pinching(&layout, "A", &rotated_basis(0.6)).unwrap();
        let square = CommutingSquare::verified(e_n, e_t).unwrap();
        let q_a = RecoveryCandidate::reset(&layout, &["A"], rho_a).unwrap();
        let report = verify_recovery(&q_a, &square, RecoverySide::FromT, &rho).unwrap();
        assert!(report.pass, "{report:?}");
        // Saturation direction: the entropy inequality is tight here.
        let t3 = theorem3_report(&square, &rho).unwrap();
        assert!(t3.slack.abs() <= 1e-8, "slack {}", t3.slack);
    }

    #[test]
    fn recovery_rejects_non_cptp_candidate() {
        let layout = qubit_layout("A");
        let not_state = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.5, 0.0),
                ZERO,
                ZERO,
                Complex64::new(-0.5, 0.0),
            ],
        );
        // Bypass DensityMatrix validation through direct struct construction
        // is impossible from here, so drive the CPTP check with a legal state
        // but a corrupted conjugation instead: a non-unitary matrix must be
        // rejected at construction already.
        let stretch = not_state;
        let ok_state = ket0("A");
        assert!(matches!(
            RecoveryCandidate::conjugated_reset(&layout, &stretch, &["A"], &["A"], ok_state),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn superoperator_is_memoized_once() {
        let layout = qubit_layout("A");
        let pinch = make_pinching(&layout, "A", &z_basis()).unwrap();
        let first = pinch.superoperator() as *const CMatrix;
        let second = pinch.superoperator() as *const CMatrix;
        assert_eq!(first, second);
    }
}
