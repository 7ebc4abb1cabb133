use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::exact::{self, RMatrix, Rational};
use super::{
    conic_condition, indicator, null_space, rigidity_matrix, signature, Conic, EdgeRef, NumericError,
    QuotientFramework, StressSignature, Tol,
};
use crate::gain_graph::GainGraph;

/// Orthonormal basis of the equilibrium stresses `{w : w^T R = 0}`.
pub fn stress_kernel(fw: &QuotientFramework, tol: Tol) -> Vec<DVector<f64>> {
    null_space(&rigidity_matrix(fw).transpose(), tol)
}

fn check_len(g: &GainGraph, len: usize) -> Result<(), NumericError> {
    let expected = g.edge_count() + 1;
    if len == expected {
        Ok(())
    } else {
        Err(NumericError::StressLength { expected, found: len })
    }
}

fn lattice_edges(g: &GainGraph) -> impl Iterator<Item = EdgeRef<'_>> {
    g.edges().iter().map(EdgeRef::Edge).chain(std::iter::once(EdgeRef::Lattice))
}

/// `L = sum w(e) i_e i_e^T` over `E ∪ {e_L}`.
pub fn stress_matrix(g: &GainGraph, omega: &[f64]) -> Result<DMatrix<f64>, NumericError> {
    check_len(g, omega.len())?;
    let n = g.vertex_count();
    let mut l = DMatrix::zeros(n + 1, n + 1);
    for (e, &w) in lattice_edges(g).zip(omega) {
        let i = indicator(n, e);
        l += &i * i.transpose() * w;
    }
    Ok(l)
}

fn exact_indicator(n: usize, e: EdgeRef<'_>) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n + 1];
    match e {
        EdgeRef::Edge(e) => {
            v[e.head - 1] += exact::int(1);
            v[e.tail - 1] -= exact::int(1);
            v[n] = exact::int(e.label);
        }
        EdgeRef::Lattice => v[n] = exact::int(1),
    }
    v
}

pub fn stress_matrix_exact(g: &GainGraph, omega: &[Rational]) -> Result<RMatrix, NumericError> {
    check_len(g, omega.len())?;
    let n = g.vertex_count();
    let mut l = vec![vec![Rational::zero(); n + 1]; n + 1];
    for (e, w) in lattice_edges(g).zip(omega) {
        let i = exact_indicator(n, e);
        for r in 0..=n {
            if i[r].is_zero() {
                continue;
            }
            for c in 0..=n {
                l[r][c] += w * &i[r] * &i[c];
            }
        }
    }
    Ok(l)
}

/// Left-hand sides of the equilibrium equations: per vertex
/// `-sum_out w v_e + sum_in w v_e`, and `sum w z(e) v_e` with `z(e_L) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumResiduals {
    pub vertex: Vec<DVector<f64>>,
    pub lattice: DVector<f64>,
}

impl EquilibriumResiduals {
    pub fn max_abs(&self) -> f64 {
        self.vertex.iter().chain(std::iter::once(&self.lattice)).map(|v| v.amax()).fold(0.0, f64::max)
    }
}

pub fn equilibrium_residuals(fw: &QuotientFramework, omega: &[f64]) -> Result<EquilibriumResiduals, NumericError> {
    check_len(&fw.graph, omega.len())?;
    let d = fw.dim();
    let mut vertex = vec![DVector::zeros(d); fw.vertex_count()];
    let mut lattice = DVector::zeros(d);
    for (e, &w) in fw.edges_with_lattice().zip(omega) {
        let v = fw.edge_vector(e) * w;
        match e {
            EdgeRef::Edge(e) => {
                vertex[e.tail - 1] -= &v;
                vertex[e.head - 1] += &v;
                lattice += &v * e.label as f64;
            }
            EdgeRef::Lattice => lattice += &v,
        }
    }
    Ok(EquilibriumResiduals { vertex, lattice })
}

/// Rank of `{F_e}` inside the `n(n+1)/2`-dimensional space of symmetric
/// matrices annihilating `(1, ..., 1, 0)`, next to the combinatorial
/// prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanReport {
    pub dimension: usize,
    pub rank: usize,
    pub count: usize,
    pub independent: bool,
    pub spanning: bool,
    pub predicted_independent: bool,
    pub predicted_spanning: bool,
}

impl SpanReport {
    pub fn agrees(&self) -> bool {
        self.independent == self.predicted_independent && self.spanning == self.predicted_spanning
    }
}

pub fn span_check(g: &GainGraph) -> SpanReport {
    let n = g.vertex_count();
    let rows: RMatrix = lattice_edges(g)
        .map(|e| {
            let i = exact_indicator(n, e);
            let mut row = Vec::with_capacity((n + 1) * (n + 2) / 2);
            for r in 0..=n {
                for c in r..=n {
                    row.push(&i[r] * &i[c]);
                }
            }
            row
        })
        .collect();
    let rank = exact::rank(&rows);
    let dimension = n * (n + 1) / 2;
    let mult = g.multiplicity_graph();
    let max_mult = g
        .vertices()
        .flat_map(|u| g.vertices().filter(move |&v| u < v).map(move |v| (u, v)))
        .map(|(u, v)| g.multiplicity(u, v))
        .max()
        .unwrap_or(0);
    SpanReport {
        dimension,
        rank,
        count: rows.len(),
        independent: rank == rows.len(),
        spanning: rank == dimension,
        predicted_independent: !g.has_loops() && max_mult <= 2 && mult.is_forest(),
        predicted_spanning: n == 0 || (g.si_graph().is_complete() && mult.is_connected()),
    }
}

/// A stress with `L = sum a_i a_i^T` for a basis `a_i` of the kernel of
/// `(P l; 1^T 0)` (positions centred first); PSD of rank `n - d` when the
/// framework spans `R^d`. Needs `{F_e}` to span the stress space.
pub fn construct_psd_stress(fw: &QuotientFramework, tol: Tol) -> Result<Vec<f64>, NumericError> {
    if !span_check(&fw.graph).spanning {
        return Err(NumericError::SpanDeficient);
    }
    let n = fw.vertex_count();
    let mut centred = fw.clone();
    let centroid = fw.positions.column_mean();
    for mut c in centred.positions.column_iter_mut() {
        c -= &centroid;
    }
    let basis = null_space(&centred.bordered(), tol);
    let mut omega_mat = DMatrix::zeros(n + 1, n + 1);
    for a in &basis {
        omega_mat += a * a.transpose();
    }
    let edges: Vec<EdgeRef<'_>> = fw.edges_with_lattice().collect();
    let eqs = (n + 1) * (n + 2) / 2;
    let mut sys = DMatrix::zeros(eqs, edges.len());
    let mut rhs = DVector::zeros(eqs);
    for (k, e) in edges.iter().enumerate() {
        let i = indicator(n, *e);
        let mut row = 0;
        for r in 0..=n {
            for c in r..=n {
                sys[(row, k)] = i[r] * i[c];
                row += 1;
            }
        }
    }
    let mut row = 0;
    for r in 0..=n {
        for c in r..=n {
            rhs[row] = omega_mat[(r, c)];
            row += 1;
        }
    }
    let svd = sys.clone().svd(true, true);
    let eps = tol.threshold(svd.singular_values.max());
    let omega = svd.solve(&rhs, eps).map_err(|_| NumericError::Residual { residual: f64::INFINITY })?;
    let residual = (&sys * &omega - &rhs).amax();
    if residual > tol.threshold(rhs.amax()) {
        return Err(NumericError::Residual { residual });
    }
    Ok(omega.iter().copied().collect())
}

/// Outcome of the three super-stability checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperStabilityReport {
    pub equilibrium_residual: f64,
    pub equilibrium: bool,
    pub signature: StressSignature,
    /// `true` when the signature was computed in exact arithmetic.
    pub exact_signature: bool,
    pub expected_signature: StressSignature,
    pub signature_ok: bool,
    pub conic_holds: bool,
    pub verified: bool,
    pub annotation: Option<String>,
}

pub fn verify_super_stable(
    fw: &QuotientFramework,
    omega: &[f64],
    tol: Tol,
) -> Result<SuperStabilityReport, NumericError> {
    check_len(&fw.graph, omega.len())?;
    let r = rigidity_matrix(fw);
    let w = DVector::from_column_slice(omega);
    let equilibrium_residual = (r.transpose() * &w).amax();
    let equilibrium = equilibrium_residual <= tol.threshold(r.amax() * w.amax());
    let exact_weights: Option<Vec<Rational>> = omega.iter().map(|&x| exact::from_integral_f64(x)).collect();
    let (signature, exact_signature) = match exact_weights {
        Some(ws) => (exact::inertia(&stress_matrix_exact(&fw.graph, &ws)?), true),
        None => (signature(&stress_matrix(&fw.graph, omega)?, tol)?, false),
    };
    let (n, d) = (fw.vertex_count(), fw.dim());
    let expected_signature = StressSignature { n_plus: n.saturating_sub(d), n_minus: 0, n_zero: d + 1 };
    let signature_ok = signature == expected_signature;
    let conic_holds = matches!(conic_condition(fw, tol), Conic::Holds);
    let verified = equilibrium && signature_ok && conic_holds;
    Ok(SuperStabilityReport {
        equilibrium_residual,
        equilibrium,
        signature,
        exact_signature,
        expected_signature,
        signature_ok,
        conic_holds,
        verified,
        annotation: verified.then(|| "periodically super stable: certifies periodic universal rigidity".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::example_framework;
    use super::*;
    use crate::gain_graph::named::*;

    const EXAMPLE_OMEGA: [f64; 6] = [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0];

    #[test]
    fn example_stress_matrix_is_exact() {
        let ws: Vec<Rational> = EXAMPLE_OMEGA.iter().map(|&x| exact::from_integral_f64(x).unwrap()).collect();
        let l = stress_matrix_exact(&stress_example(), &ws).unwrap();
        let expect = [[1, 1, -2, 1], [1, 1, -2, 1], [-2, -2, 4, -2], [1, 1, -2, 1]];
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(l[r][c], exact::int(expect[r][c]));
            }
        }
        let lf = stress_matrix(&stress_example(), &EXAMPLE_OMEGA).unwrap();
        assert_eq!(lf[(2, 2)], 4.0);
    }

    #[test]
    fn example_stress_is_in_the_kernel() {
        let fw = example_framework();
        let res = equilibrium_residuals(&fw, &EXAMPLE_OMEGA).unwrap();
        assert_eq!(res.max_abs(), 0.0);
        let kernel = stress_kernel(&fw, Tol::default());
        assert_eq!(kernel.len(), 1);
        let w = DVector::from_column_slice(&EXAMPLE_OMEGA).normalize();
        assert!((kernel[0].dot(&w).abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn example_is_super_stable() {
        let fw = example_framework();
        let rep = verify_super_stable(&fw, &EXAMPLE_OMEGA, Tol::default()).unwrap();
        assert!(rep.verified, "{rep:?}");
        assert!(rep.exact_signature);
        let zero = verify_super_stable(&fw, &[0.0; 6], Tol::default()).unwrap();
        assert!(!zero.verified);
        assert_eq!(zero.signature.n_zero, 4);
    }

    #[test]
    fn single_edge_stress_matrix() {
        let g = GainGraph::new(2, [(1, 2, 0)]).unwrap();
        let l = stress_matrix(&g, &[1.0, 0.0]).unwrap();
        assert_eq!(l, DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0]));
        assert!(matches!(stress_matrix(&g, &[1.0]), Err(NumericError::StressLength { .. })));
    }

    #[test]
    fn span_examples() {
        let kbb = span_check(&k3_bullet_bullet(0, (0, 1), (0, 2)).unwrap());
        assert!(kbb.independent && kbb.spanning && kbb.agrees());
        let k3 = span_check(&balanced_complete(3));
        assert!(k3.independent && !k3.spanning && k3.agrees());
        let triple = span_check(&GainGraph::new(2, [(1, 2, 0), (1, 2, 1), (1, 2, 2)]).unwrap());
        assert!(!triple.independent && triple.agrees());
    }

    #[test]
    fn constructed_stress_on_example() {
        let fw = example_framework();
        let omega = construct_psd_stress(&fw, Tol::default()).unwrap();
        let ratio = omega[0] / EXAMPLE_OMEGA[0];
        for (a, b) in omega.iter().zip(EXAMPLE_OMEGA) {
            assert!((a - ratio * b).abs() < 1e-9);
        }
        assert!((ratio - 1.0 / 7.0).abs() < 1e-9);
        let sig = signature(&stress_matrix(&fw.graph, &omega).unwrap(), Tol::default()).unwrap();
        assert_eq!(sig, StressSignature { n_plus: 1, n_minus: 0, n_zero: 3 });
        let k3 = QuotientFramework::from_points(
            balanced_complete(3),
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            &[1.0, 2.0],
        )
        .unwrap();
        assert_eq!(construct_psd_stress(&k3, Tol::default()), Err(NumericError::SpanDeficient));
    }
}
