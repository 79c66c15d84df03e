//! Dense complex linear algebra helpers: orthonormal bases, nullspaces,
//! subspace arithmetic. Everything here works with the coordinate inner
//! product; trace inner products are handled by callers via Gram matrices.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{C64, RANK_TOL};

pub type Mat = DMatrix<C64>;
pub type Vect = DVector<C64>;

pub fn dot(a: &Vect, b: &Vect) -> C64 {
    // conjugate-linear in the second argument's conjugate, i.e. <a, b> = b^H a
    b.dotc(a)
}

pub fn norm(a: &Vect) -> f64 {
    a.norm()
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass. Returns an
/// orthonormal basis of the column span; columns with residual norm below
/// `tol * max_input_norm` are dropped.
pub fn orthonormal_columns(cols: &[Vect], tol: f64) -> Vec<Vect> {
    let mut basis: Vec<Vect> = Vec::new();
    let scale = cols.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return basis;
    }
    for col in cols {
        let mut v = col.clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = dot(&v, b);
                v.axpy(-coeff, b, crate::scalar::ONE);
            }
        }
        let nrm = v.norm();
        if nrm > tol * scale {
            v /= crate::scalar::cr(nrm);
            basis.push(v);
        }
    }
    basis
}

pub fn rank(cols: &[Vect], tol: f64) -> usize {
    orthonormal_columns(cols, tol).len()
}

/// Orthogonal projection of `v` onto the span of `basis` (assumed orthonormal).
pub fn project(basis: &[Vect], v: &Vect) -> Vect {
    let mut p = Vect::zeros(v.len());
    for b in basis {
        p.axpy(dot(v, b), b, crate::scalar::ONE);
    }
    p
}

/// Residual distance of `v` from the span of the orthonormal `basis`,
/// relative to the norm of `v` when it is large.
pub fn distance_to_span(basis: &[Vect], v: &Vect) -> f64 {
    (v - project(basis, v)).norm()
}

/// Nullspace of the linear map given by `m` (acting on coordinate vectors),
/// via SVD with a relative singular-value cutoff.
pub fn nullspace(m: &Mat, tol: f64) -> Vec<Vect> {
    let ncols = m.ncols();
    if ncols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..ncols)
            .map(|j| {
                let mut v = Vect::zeros(ncols);
                v[j] = crate::scalar::ONE;
                v
            })
            .collect();
    }
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cut = if smax == 0.0 { f64::INFINITY } else { smax * tol };
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            out.push(vt.row(i).transpose().map(|z| z.conj()));
        }
    }
    // rows of V^T beyond the number of singular values are also nullvectors
    for i in svd.singular_values.len()..vt.nrows() {
        out.push(vt.row(i).transpose().map(|z| z.conj()));
    }
    out
}

/// Intersect the subspace spanned by `basis` (orthonormal) with the nullspace
/// of the map `apply`, returning an orthonormal basis of the intersection.
pub fn refine_nullspace<F>(basis: &[Vect], apply: F, tol: f64) -> Vec<Vect>
where
    F: Fn(&Vect) -> Vect,
{
    if basis.is_empty() {
        return Vec::new();
    }
    let images: Vec<Vect> = basis.iter().map(&apply).collect();
    let rows = images[0].len();
    let mut m = Mat::zeros(rows, basis.len());
    for (j, img) in images.iter().enumerate() {
        m.set_column(j, img);
    }
    let null = nullspace(&m, tol);
    let combos: Vec<Vect> = null
        .iter()
        .map(|coef| {
            let mut v = Vect::zeros(basis[0].len());
            for (k, b) in basis.iter().enumerate() {
                v.axpy(coef[k], b, crate::scalar::ONE);
            }
            v
        })
        .collect();
    orthonormal_columns(&combos, RANK_TOL)
}

/// Mutual-containment residual between two subspaces given by orthonormal
/// bases: max over basis vectors of either side of the distance to the other.
pub fn subspace_residual(a: &[Vect], b: &[Vect]) -> f64 {
    let mut worst = 0.0f64;
    for v in a {
        worst = worst.max(distance_to_span(b, v));
    }
    for v in b {
        worst = worst.max(distance_to_span(a, v));
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix; returns (eigenvalues, columns).
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let sym = nalgebra::linalg::SymmetricEigen::new(m.clone());
    let vals: Vec<f64> = sym.eigenvalues.iter().cloned().collect();
    (vals, sym.eigenvectors)
}

/// Least-squares solution of `m x = rhs` via SVD pseudo-inverse.
pub fn lstsq(m: &Mat, rhs: &Vect, tol: f64) -> Vect {
    let svd = m.clone().svd(true, true);
    svd.solve(rhs, tol).expect("svd solve")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    #[test]
    fn nullspace_of_rank_one() {
        // 2x2 rank-1 matrix; nullspace is 1-dimensional
        let m = Mat::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(2.0), cr(4.0)]);
        let ns = nullspace(&m, RANK_TOL);
        assert_eq!(ns.len(), 1);
        let img = &m * &ns[0];
        assert!(img.norm() < 1e-12);
    }

    #[test]
    fn orthonormalisation_drops_dependent_columns() {
        let a = Vect::from_vec(vec![cr(1.0), c(0.0, 1.0)]);
        let b = Vect::from_vec(vec![cr(2.0), c(0.0, 2.0)]);
        let basis = orthonormal_columns(&[a, b], RANK_TOL);
        assert_eq!(basis.len(), 1);
        assert!((basis[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subspace_residual_detects_difference() {
        let e1 = Vect::from_vec(vec![cr(1.0), cr(0.0)]);
        let e2 = Vect::from_vec(vec![cr(0.0), cr(1.0)]);
        assert!(subspace_residual(&[e1.clone()], &[e1.clone()]) < 1e-14);
        assert!(subspace_residual(&[e1], &[e2]) > 0.9);
    }
}
