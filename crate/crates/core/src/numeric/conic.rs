use nalgebra::{DMatrix, DVector};

use super::{affine_dimension, canonical_sign, null_space, NumericError, QuotientFramework, Tol};

#[derive(Clone, Debug, PartialEq)]
pub enum Conic {
    Holds,
    /// Nonzero symmetric `S` with `v_e^T S v_e = 0` for every edge and `l`.
    Violated(DMatrix<f64>),
}

/// Coordinates of `v^T S v` on the basis `E_aa`, `E_ab + E_ba` (a < b).
fn quadratic_row(v: &DVector<f64>) -> Vec<f64> {
    let d = v.len();
    let mut row = Vec::with_capacity(d * (d + 1) / 2);
    for a in 0..d {
        for b in a..d {
            row.push(if a == b { v[a] * v[a] } else { 2.0 * v[a] * v[b] });
        }
    }
    row
}

fn symmetric_from(coords: &DVector<f64>, d: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(d, d);
    let mut k = 0;
    for a in 0..d {
        for b in a..d {
            s[(a, b)] = coords[k];
            s[(b, a)] = coords[k];
            k += 1;
        }
    }
    s
}

pub fn conic_condition(fw: &QuotientFramework, tol: Tol) -> Conic {
    let d = fw.dim();
    let rows: Vec<Vec<f64>> = fw.edges_with_lattice().map(|e| quadratic_row(&fw.edge_vector(e))).collect();
    let m = DMatrix::from_fn(rows.len(), d * (d + 1) / 2, |r, c| rows[r][c]);
    match null_space(&m, tol).into_iter().next() {
        None => Conic::Holds,
        Some(x) => {
            let s = symmetric_from(&x, d);
            let norm = s.norm();
            Conic::Violated(s / norm)
        }
    }
}

/// Equivalent framework `q = A p`, `A = sqrt(I - t S)`, with `t` chosen so
/// that `I - t S` is PSD and singular.
pub fn flatten(fw: &QuotientFramework, s: &DMatrix<f64>, tol: Tol) -> Result<QuotientFramework, NumericError> {
    let d = fw.dim();
    if s.shape() != (d, d) {
        return Err(NumericError::DimensionMismatch { expected: d, found: s.nrows() });
    }
    if (s - s.transpose()).amax() > tol.threshold(s.amax()) {
        return Err(NumericError::NotSymmetric);
    }
    if s.amax() == 0.0 {
        return Err(NumericError::ZeroWitness);
    }
    let scale = s.norm();
    let mut residual: f64 = 0.0;
    for e in fw.edges_with_lattice() {
        let v = fw.edge_vector(e);
        let q = (v.transpose() * s * &v)[(0, 0)];
        residual = residual.max(q.abs() / (scale * v.norm_squared()).max(f64::MIN_POSITIVE));
    }
    if residual > tol.0 {
        return Err(NumericError::ConicViolated { residual });
    }
    let eig = s.clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.max();
    let lambda = if lambda_max > tol.threshold(scale) { lambda_max } else { eig.eigenvalues.min() };
    let t = 1.0 / lambda;
    let roots = eig.eigenvalues.map(|x| (1.0 - t * x).max(0.0).sqrt());
    let a = &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
    let lattice = &a * &fw.lattice;
    if lattice.norm() <= tol.threshold(fw.lattice.norm()) * fw.lattice.norm().max(1.0) {
        return Err(NumericError::DegenerateLattice);
    }
    QuotientFramework::new(fw.graph.clone(), &a * &fw.positions, lattice)
}

/// Re-expresses the framework in coordinates of its own affine span, so
/// that its ambient dimension equals its affine dimension.
pub fn to_intrinsic(fw: &QuotientFramework, tol: Tol) -> QuotientFramework {
    let (d, n) = (fw.dim(), fw.vertex_count());
    let origin = if n > 0 { fw.position(1) } else { DVector::zeros(d) };
    let mut dirs = DMatrix::zeros(d, n + 1);
    for v in 1..=n {
        dirs.set_column(v - 1, &(fw.position(v) - &origin));
    }
    dirs.set_column(n, &fw.lattice);
    let svd = dirs.svd(true, false);
    let u = svd.u.expect("requested");
    let thr = tol.threshold(svd.singular_values.max());
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > thr).collect();
    let basis = DMatrix::from_columns(&keep.iter().map(|&k| canonical_sign(u.column(k).into_owned())).collect::<Vec<_>>());
    let mut positions = DMatrix::zeros(keep.len(), n);
    for v in 1..=n {
        positions.set_column(v - 1, &(basis.transpose() * (fw.position(v) - &origin)));
    }
    let lattice = basis.transpose() * &fw.lattice;
    QuotientFramework::new(fw.graph.clone(), positions, lattice).expect("lattice survives projection")
}

/// Alternates [`to_intrinsic`] and [`flatten`] until the conic condition
/// holds; returns every intermediate framework, the input's intrinsic form
/// first.
pub fn flatten_until_conic(fw: &QuotientFramework, tol: Tol) -> Result<Vec<QuotientFramework>, NumericError> {
    let mut steps = vec![to_intrinsic(fw, tol)];
    for _ in 0..fw.dim() {
        let cur = steps.last().expect("nonempty");
        match conic_condition(cur, tol) {
            Conic::Holds => return Ok(steps),
            Conic::Violated(s) => {
                let next = to_intrinsic(&flatten(cur, &s, tol)?, tol);
                if affine_dimension(&next, tol) >= affine_dimension(cur, tol) {
                    return Ok(steps);
                }
                steps.push(next);
            }
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::super::tests::example_framework;
    use super::*;
    use crate::gain_graph::named::balanced_complete;

    #[test]
    fn example_satisfies_conic() {
        assert_eq!(conic_condition(&example_framework(), Tol::default()), Conic::Holds);
    }

    #[test]
    fn two_hyperplanes_violate() {
        // Edge directions along the axes only: S = e1 e2^T + e2 e1^T kills both.
        let g = crate::GainGraph::new(2, [(1, 2, 0)]).unwrap();
        let fw = QuotientFramework::from_points(g, &[vec![0.0, 0.0], vec![1.0, 0.0]], &[0.0, 2.0]).unwrap();
        let Conic::Violated(s) = conic_condition(&fw, Tol::default()) else { panic!("holds") };
        assert!(s[(0, 0)].abs() < 1e-12 && s[(1, 1)].abs() < 1e-12);
        assert!((s[(0, 1)] - s[(1, 0)]).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_always_holds() {
        let g = crate::GainGraph::new(2, [(1, 2, 0)]).unwrap();
        let fw = QuotientFramework::from_points(g, &[vec![0.0], vec![0.0]], &[1.0]).unwrap();
        assert_eq!(conic_condition(&fw, Tol::default()), Conic::Holds);
    }

    #[test]
    fn flatten_balanced_triangle_in_space() {
        let fw = QuotientFramework::from_points(
            balanced_complete(3),
            &[vec![0.3, -1.2, 0.7], vec![1.9, 0.4, -0.5], vec![-0.8, 1.1, 1.6]],
            &[0.6, 0.2, -1.3],
        )
        .unwrap();
        let tol = Tol::default();
        assert_eq!(affine_dimension(&fw, tol), 3);
        let Conic::Violated(s) = conic_condition(&fw, tol) else { panic!("holds") };
        let flat = flatten(&fw, &s, tol).unwrap();
        for (e, f) in fw.edges_with_lattice().zip(flat.edges_with_lattice()) {
            let (a, b) = (fw.edge_vector(e).norm_squared(), flat.edge_vector(f).norm_squared());
            assert!((a - b).abs() <= 1e-9 * a, "{e:?}");
        }
        assert!(affine_dimension(&flat, tol) < 3);
        let steps = flatten_until_conic(&fw, tol).unwrap();
        assert_eq!(affine_dimension(steps.last().unwrap(), tol), 2);
        assert_eq!(steps.last().unwrap().dim(), 2);
    }

    #[test]
    fn flatten_rejects_non_witness() {
        let fw = example_framework();
        let s = DMatrix::identity(2, 2);
        assert!(matches!(flatten(&fw, &s, Tol::default()), Err(NumericError::ConicViolated { .. })));
    }
}
