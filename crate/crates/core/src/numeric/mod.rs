//! Quotient frameworks of periodic bar-joint frameworks: rigidity matrices,
//! equilibrium stresses, stress matrices and signatures, the conic
//! condition, flattening and super-stability checks.
//!
//! Stress vectors are indexed by the graph's edges in storage order followed
//! by the lattice loop `e_L` as the last entry.

pub mod exact;
mod conic;
mod stress;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{GainEdge, GainGraph, GraphError, Vertex};

pub use conic::{conic_condition, flatten, flatten_until_conic, to_intrinsic, Conic};
pub use stress::{
    construct_psd_stress, equilibrium_residuals, span_check, stress_kernel, stress_matrix, stress_matrix_exact,
    verify_super_stable, EquilibriumResiduals, SpanReport, SuperStabilityReport,
};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Relative tolerance: a quantity counts as zero when it is at most
/// `tol * max(1, scale)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tol(pub f64);

impl Default for Tol {
    fn default() -> Self {
        Tol(DEFAULT_TOL)
    }
}

impl Tol {
    pub fn threshold(self, scale: f64) -> f64 {
        self.0 * scale.max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("lattice vector is zero")]
    ZeroLattice,
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} positions, found {found}")]
    VertexCountMismatch { expected: usize, found: usize },
    #[error("expected {expected} stress weights, found {found}")]
    StressLength { expected: usize, found: usize },
    #[error("framework dimension must be at least 1")]
    ZeroDimension,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("S does not satisfy the conic equations (residual {residual:e})")]
    ConicViolated { residual: f64 },
    #[error("S is zero")]
    ZeroWitness,
    #[error("flattened lattice vector vanishes")]
    DegenerateLattice,
    #[error("linear solve residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },
    #[error("the matrices F_e do not span the stress space")]
    SpanDeficient,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Edge of the quotient or the lattice loop.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EdgeRef<'a> {
    Edge(&'a GainEdge),
    Lattice,
}

/// `(G, z, p, l)`: a gain graph, one representative position per vertex orbit
/// (columns of `positions`, `d x n`) and a nonzero lattice vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientFramework {
    pub graph: GainGraph,
    pub positions: DMatrix<f64>,
    pub lattice: DVector<f64>,
}

impl QuotientFramework {
    pub fn new(graph: GainGraph, positions: DMatrix<f64>, lattice: DVector<f64>) -> Result<Self, NumericError> {
        let d = lattice.len();
        if d == 0 {
            return Err(NumericError::ZeroDimension);
        }
        if positions.nrows() != d {
            return Err(NumericError::DimensionMismatch { expected: d, found: positions.nrows() });
        }
        if positions.ncols() != graph.vertex_count() {
            return Err(NumericError::VertexCountMismatch { expected: graph.vertex_count(), found: positions.ncols() });
        }
        if positions.iter().chain(lattice.iter()).any(|x| !x.is_finite()) {
            return Err(NumericError::NonFinite);
        }
        if lattice.iter().all(|&x| x == 0.0) {
            return Err(NumericError::ZeroLattice);
        }
        Ok(QuotientFramework { graph, positions, lattice })
    }

    /// Positions given as rows of coordinates, one per vertex.
    pub fn from_points(graph: GainGraph, points: &[Vec<f64>], lattice: &[f64]) -> Result<Self, NumericError> {
        let d = lattice.len();
        for p in points {
            if p.len() != d {
                return Err(NumericError::DimensionMismatch { expected: d, found: p.len() });
            }
        }
        let positions = DMatrix::from_fn(d, points.len(), |r, c| points[c][r]);
        Self::new(graph, positions, DVector::from_column_slice(lattice))
    }

    pub fn dim(&self) -> usize {
        self.lattice.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn position(&self, v: Vertex) -> DVector<f64> {
        self.positions.column(v - 1).into_owned()
    }

    /// Edges followed by the lattice loop.
    pub fn edges_with_lattice(&self) -> impl Iterator<Item = EdgeRef<'_>> {
        self.graph.edges().iter().map(EdgeRef::Edge).chain(std::iter::once(EdgeRef::Lattice))
    }

    /// `v_e = p(head) + z l - p(tail)`; `l` for the lattice loop.
    pub fn edge_vector(&self, e: EdgeRef<'_>) -> DVector<f64> {
        match e {
            EdgeRef::Edge(e) => {
                self.position(e.head) + &self.lattice * e.label as f64 - self.position(e.tail)
            }
            EdgeRef::Lattice => self.lattice.clone(),
        }
    }

    /// `(P l; 1^T 0)`, of size `(d + 1) x (n + 1)`.
    pub fn bordered(&self) -> DMatrix<f64> {
        let (d, n) = (self.dim(), self.vertex_count());
        let mut m = DMatrix::zeros(d + 1, n + 1);
        m.view_mut((0, 0), (d, n)).copy_from(&self.positions);
        m.view_mut((0, n), (d, 1)).copy_from(&self.lattice);
        for c in 0..n {
            m[(d, c)] = 1.0;
        }
        m
    }

    /// Same periodic framework seen through the switched quotient: switching
    /// `v` by `gamma` moves its representative by `gamma * l`.
    pub fn switch(&self, v: Vertex, gamma: i64) -> Result<QuotientFramework, NumericError> {
        let graph = self.graph.switch(v, gamma)?;
        let mut positions = self.positions.clone();
        let shifted = self.position(v) + &self.lattice * gamma as f64;
        positions.set_column(v - 1, &shifted);
        Ok(QuotientFramework { graph, positions, lattice: self.lattice.clone() })
    }

    /// Representative positions of the lift vertices `(v, s)` for shifts
    /// `from..=to`, in the order of [`GainGraph::lift_window`].
    pub fn lift_positions(&self, from: i64, to: i64) -> Vec<DVector<f64>> {
        let mut out = Vec::new();
        for s in from..=to {
            for v in self.graph.vertices() {
                out.push(self.position(v) + &self.lattice * s as f64);
            }
        }
        out
    }
}

/// Indicator vector `i_e` in `R^{n+1}`: `e_head - e_tail` with the label in
/// the last slot; `e_{n+1}` for the lattice loop.
pub fn indicator(n: usize, e: EdgeRef<'_>) -> DVector<f64> {
    let mut v = DVector::zeros(n + 1);
    match e {
        EdgeRef::Edge(e) => {
            v[e.head - 1] += 1.0;
            v[e.tail - 1] -= 1.0;
            v[n] = e.label as f64;
        }
        EdgeRef::Lattice => v[n] = 1.0,
    }
    v
}

/// `rank (P l; 1^T 0) - 1`.
pub fn affine_dimension(fw: &QuotientFramework, tol: Tol) -> usize {
    numeric_rank(&fw.bordered(), tol).saturating_sub(1)
}

/// Row per element of `E ∪ {e_L}`: `-v_e^T` in the tail block, `v_e^T` in
/// the head block and `z(e) v_e^T` in the trailing lattice block.
pub fn rigidity_matrix(fw: &QuotientFramework) -> DMatrix<f64> {
    let (d, n) = (fw.dim(), fw.vertex_count());
    let rows: Vec<EdgeRef<'_>> = fw.edges_with_lattice().collect();
    let mut r = DMatrix::zeros(rows.len(), d * (n + 1));
    for (k, e) in rows.iter().enumerate() {
        let v = fw.edge_vector(*e);
        let mut add = |block: usize, scale: f64| {
            for a in 0..d {
                r[(k, block * d + a)] += scale * v[a];
            }
        };
        match e {
            EdgeRef::Edge(e) => {
                add(e.tail - 1, -1.0);
                add(e.head - 1, 1.0);
                add(n, e.label as f64);
            }
            EdgeRef::Lattice => add(n, 1.0),
        }
    }
    r
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StressSignature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl StressSignature {
    pub fn is_nonnegative(&self) -> bool {
        self.n_minus == 0
    }

    /// Full for a `d`-dimensional framework: the kernel is as small as the
    /// equilibrium conditions allow.
    pub fn is_full(&self, d: usize) -> bool {
        self.n_zero == d + 1
    }
}

impl std::fmt::Display for StressSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.n_plus, self.n_minus, self.n_zero)
    }
}

/// Inertia from the eigenvalues, zero meaning `|lambda| <= tol * max(1, max |lambda|)`.
pub fn signature(l: &DMatrix<f64>, tol: Tol) -> Result<StressSignature, NumericError> {
    if !l.is_square() {
        return Err(NumericError::NotSymmetric);
    }
    let scale = l.amax();
    if (l - l.transpose()).amax() > tol.threshold(scale) {
        return Err(NumericError::NotSymmetric);
    }
    let eig = l.clone().symmetric_eigen();
    let thr = tol.threshold(eig.eigenvalues.amax());
    let mut s = StressSignature { n_plus: 0, n_minus: 0, n_zero: 0 };
    for &x in eig.eigenvalues.iter() {
        if x > thr {
            s.n_plus += 1;
        } else if x < -thr {
            s.n_minus += 1;
        } else {
            s.n_zero += 1;
        }
    }
    Ok(s)
}

pub(crate) fn numeric_rank(m: &DMatrix<f64>, tol: Tol) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let thr = tol.threshold(sv.max());
    sv.iter().filter(|&&s| s > thr).count()
}

/// Orthonormal basis of `{x : m x = 0}`.
pub(crate) fn null_space(m: &DMatrix<f64>, tol: Tol) -> Vec<DVector<f64>> {
    let (r, c) = m.shape();
    if c == 0 {
        return Vec::new();
    }
    let mut padded = DMatrix::zeros(r.max(c), c);
    padded.view_mut((0, 0), (r, c)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let thr = tol.threshold(svd.singular_values.max());
    (0..c)
        .filter(|&k| svd.singular_values[k] <= thr)
        .map(|k| canonical_sign(v_t.row(k).transpose()))
        .collect()
}

/// Flips `v` so that its largest-magnitude entry is positive.
pub(crate) fn canonical_sign(v: DVector<f64>) -> DVector<f64> {
    let k = v.iamax();
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}
