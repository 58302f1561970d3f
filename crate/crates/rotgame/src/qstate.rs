//! Labeled composite quantum states and the dense linear-algebra primitives
//! every other module consumes.
//!
//! Composite indices are row-major over the layout order: the first
//! subsystem owns the slowest index, matching the Kronecker product
//! `first ⊗ second`. All reshapes and embeddings below follow this
//! convention.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitize, identity, max_abs, trace, unitarity_deviation, CMatrix, CVector, ONE, ZERO,
};
pub use crate::linalg::{eig_hermitian, HermitianEigen};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = -1e-10;
const NORM_TOL: f64 = 1e-12;
const GENERATOR_RECON_TOL: f64 = 1e-12;

/// Ordered list of (label, dimension) pairs describing a composite system.
///
/// Labels are unique, dimensions are at least 1 and the order is significant:
/// every operation preserves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    parts: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<L: Into<String>>(parts: impl IntoIterator<Item = (L, usize)>) -> Result<Self> {
        let parts: Vec<(String, usize)> = parts
            .into_iter()
            .map(|(l, d)| (l.into(), d))
            .collect();
        for (i, (label, dim)) in parts.iter().enumerate() {
            if *dim < 1 {
                return Err(Error::InvalidDimension {
                    label: label.clone(),
                });
            }
            if parts[..i].iter().any(|(other, _)| other == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { parts })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().map(|(l, _)| l.as_str())
    }

    pub fn parts(&self) -> &[(String, usize)] {
        &self.parts
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|(l, _)| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.parts[i].1)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Strides of the row-major composite index, one per subsystem.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.parts.len()];
        for i in (0..self.parts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.parts[i + 1].1;
        }
        strides
    }

    /// Sub-layout of `labels` in their original relative order.
    pub fn sublayout(&self, labels: &[&str]) -> Result<SubsystemLayout> {
        let positions = self.positions_of(labels)?;
        let mut sorted = positions;
        sorted.sort_unstable();
        Ok(SubsystemLayout {
            parts: sorted.iter().map(|&i| self.parts[i].clone()).collect(),
        })
    }

    /// Concatenation; labels must stay disjoint.
    pub fn concat(layouts: &[&SubsystemLayout]) -> Result<SubsystemLayout> {
        let mut parts = Vec::new();
        for layout in layouts {
            parts.extend(layout.parts.iter().cloned());
        }
        SubsystemLayout::new(parts)
    }

    /// New layout with (label, dim) inserted at position `pos`.
    pub fn insert(&self, pos: usize, label: &str, dim: usize) -> Result<SubsystemLayout> {
        let mut parts = self.parts.clone();
        parts.insert(pos.min(parts.len()), (label.to_string(), dim));
        SubsystemLayout::new(parts)
    }

    /// Positions of the given labels (each must exist, no duplicates among them).
    pub fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut positions = Vec::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            positions.push(
                self.position(label)
                    .ok_or_else(|| Error::UnknownLabel(label.to_string()))?,
            );
        }
        Ok(positions)
    }

    /// Splits the composite index into (group, rest). Group digits follow the
    /// order of `group_labels`, rest digits keep layout order.
    pub(crate) fn index_split(&self, group_labels: &[&str]) -> Result<IndexSplit> {
        let gpos = self.positions_of(group_labels)?;
        let in_group: Vec<bool> = {
            let mut mask = vec![false; self.parts.len()];
            for &p in &gpos {
                mask[p] = true;
            }
            mask
        };
        let rpos: Vec<usize> = (0..self.parts.len()).filter(|&i| !in_group[i]).collect();
        let strides = self.strides();
        let gdims: Vec<usize> = gpos.iter().map(|&i| self.parts[i].1).collect();
        let rdims: Vec<usize> = rpos.iter().map(|&i| self.parts[i].1).collect();
        let dim_group = gdims.iter().product();
        let dim_rest = rdims.iter().product();
        let mut table = vec![0usize; dim_group * dim_rest];
        for g in 0..dim_group {
            let gd = digits_of(g, &gdims);
            let base: usize = gd.iter().zip(&gpos).map(|(&d, &p)| d * strides[p]).sum();
            for r in 0..dim_rest {
                let rd = digits_of(r, &rdims);
                let offset: usize = rd.iter().zip(&rpos).map(|(&d, &p)| d * strides[p]).sum();
                table[g * dim_rest + r] = base + offset;
            }
        }
        Ok(IndexSplit {
            dim_group,
            dim_rest,
            table,
        })
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn digits_of(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = flat % dims[i];
        flat /= dims[i];
    }
    out
}

/// Lookup table mapping (group index, rest index) to the full flat index.
pub(crate) struct IndexSplit {
    pub dim_group: usize,
    pub dim_rest: usize,
    table: Vec<usize>,
}

impl IndexSplit {
    #[inline]
    pub fn flat(&self, group: usize, rest: usize) -> usize {
        self.table[group * self.dim_rest + rest]
    }
}

/// Trace-one positive-semidefinite Hermitian matrix over a layout.
///
/// Inputs are symmetrized once at construction; downstream code relies on
/// exact Hermiticity afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: matrix.nrows(),
            });
        }
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let matrix = hermitize(&matrix);
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let eig = eig_hermitian(&matrix)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { layout, matrix })
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        let matrix = identity(d).scale(1.0 / d as f64);
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        linalg::hs_inner(&self.matrix, &self.matrix).re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    pub fn same_layout(&self, other: &DensityMatrix) -> Result<()> {
        if self.layout == other.layout {
            Ok(())
        } else {
            Err(Error::LayoutMismatch(format!(
                "{} vs {}",
                self.layout, other.layout
            )))
        }
    }
}

/// Normalized state vector over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    vector: CVector,
}

impl PureState {
    pub fn new(layout: SubsystemLayout, vector: CVector) -> Result<Self> {
        if vector.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                actual: vector.len(),
            });
        }
        let norm_sq: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        let dev = (norm_sq - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized { deviation: dev });
        }
        Ok(Self { layout, vector })
    }

    /// Computational basis state |k⟩.
    pub fn basis_state(layout: SubsystemLayout, k: usize) -> Result<Self> {
        let d = layout.total_dim();
        if k >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: k,
            });
        }
        let mut v = CVector::zeros(d);
        v[k] = ONE;
        Ok(Self { layout, vector: v })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn to_density(&self) -> DensityMatrix {
        let outer = &self.vector * self.vector.adjoint();
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: hermitize(&outer),
        }
    }
}

/// Hermitian observable on one subsystem with a cached spectral
/// decomposition (eigenvalues ascending, eigenvectors as columns).
#[derive(Debug, Clone)]
pub struct Generator {
    target: String,
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Generator {
    pub fn new(target: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let matrix = hermitize(&matrix);
        let eig = eig_hermitian(&matrix)?;
        let scale = max_abs(&matrix).max(1.0);
        let lambda = CMatrix::from_diagonal(&CVector::from_iterator(
            eig.values.len(),
            eig.values.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let recon = &eig.vectors * lambda * eig.vectors.adjoint();
        let recon_err = linalg::max_abs_diff(&recon, &matrix);
        if recon_err > GENERATOR_RECON_TOL * scale {
            return Err(Error::CrossCheckFailed {
                context: "generator eigendecomposition reconstruction",
                deviation: recon_err,
                tolerance: GENERATOR_RECON_TOL * scale,
            });
        }
        let ortho = unitarity_deviation(&eig.vectors);
        if ortho > 1e-12 {
            return Err(Error::NotOrthonormal { deviation: ortho });
        }
        Ok(Self {
            target: target.into(),
            matrix,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
        })
    }

    pub fn pauli_x(target: impl Into<String>) -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        Self::new(target, m).expect("σ_x is Hermitian")
    }

    pub fn pauli_z(target: impl Into<String>) -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        Self::new(target, m).expect("σ_z is Hermitian")
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Smallest gap between consecutive (sorted) eigenvalues.
    pub fn min_eigenvalue_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// e^{−iGr} from the cached spectral decomposition.
    pub fn rotation(&self, angle: f64) -> CMatrix {
        let phases = CMatrix::from_diagonal(&CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues
                .iter()
                .map(|&g| Complex64::from_polar(1.0, -g * angle)),
        ));
        &self.eigenvectors * phases * self.eigenvectors.adjoint()
    }
}

/// Kronecker product of states; the output layout is the concatenation.
pub fn tensor(states: &[&DensityMatrix]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("tensor of zero states".into()));
    }
    let layouts: Vec<&SubsystemLayout> = states.iter().map(|s| s.layout()).collect();
    let layout = SubsystemLayout::concat(&layouts)?;
    let mut matrix = states[0].matrix.clone();
    for state in &states[1..] {
        matrix = linalg::kron(&matrix, &state.matrix);
    }
    DensityMatrix::new(layout, matrix)
}

/// Marginal on `keep`, in the original relative order. Trace is preserved.
pub fn partial_trace(state: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let positions = state.layout.positions_of(keep)?;
    let mut sorted = positions;
    sorted.sort_unstable();
    let ordered: Vec<&str> = sorted
        .iter()
        .map(|&i| state.layout.parts[i].0.as_str())
        .collect();
    let split = state.layout.index_split(&ordered)?;
    let mut marg = CMatrix::zeros(split.dim_group, split.dim_group);
    for a in 0..split.dim_group {
        for b in 0..split.dim_group {
            let mut sum = ZERO;
            for r in 0..split.dim_rest {
                sum += state.matrix[(split.flat(a, r), split.flat(b, r))];
            }
            marg[(a, b)] = sum;
        }
    }
    let layout = state.layout.sublayout(&ordered)?;
    DensityMatrix::new(layout, marg)
}

/// Embeds `op` (indexed row-major over `targets` in the given order) into the
/// full space, acting as the identity elsewhere.
pub(crate) fn embed_operator(
    layout: &SubsystemLayout,
    op: &CMatrix,
    targets: &[&str],
) -> Result<CMatrix> {
    let split = layout.index_split(targets)?;
    if op.nrows() != split.dim_group || op.ncols() != split.dim_group {
        return Err(Error::DimensionMismatch {
            expected: split.dim_group,
            actual: op.nrows(),
        });
    }
    let d = layout.total_dim();
    let mut full = CMatrix::zeros(d, d);
    for tr in 0..split.dim_group {
        for tc in 0..split.dim_group {
            let v = op[(tr, tc)];
            if v == ZERO {
                continue;
            }
            for r in 0..split.dim_rest {
                full[(split.flat(tr, r), split.flat(tc, r))] = v;
            }
        }
    }
    Ok(full)
}

/// Conjugates the state by `u` acting on `targets` (identity elsewhere).
/// The spectrum is untouched, so all state invariants survive.
pub fn apply_unitary(state: &DensityMatrix, u: &CMatrix, targets: &[&str]) -> Result<DensityMatrix> {
    let dev = unitarity_deviation(u);
    if dev > HERMITICITY_TOL {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let full = embed_operator(&state.layout, u, targets)?;
    let out = &full * &state.matrix * full.adjoint();
    DensityMatrix::new(state.layout.clone(), out)
}
